#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
模型定义模块
自旋-玻色子哈密顿量族的参数、精确有理数量子数运算以及不变扇区的枚举与标注

    H = Σ_i w_i N_i + g' J_0^s + g (J_+^r Π_i a_i^{k_i} + J_-^r Π_i a_i^{†k_i})

所有量子数（j, κ, q_i, l_μ, A_i）都用 fractions.Fraction 精确表示，
只有耦合常数和矩阵元使用浮点数。
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from errors import ModelError


class ModelSpec(BaseModel):
    """哈密顿量参数 (M, r, s, k_i, w_i, g', g)"""

    model_config = ConfigDict(frozen=True)

    M: int = Field(..., description="玻色子模式数")
    r: int = Field(..., description="自旋升降算符的幂次")
    s: int = Field(..., description="J_0 的幂次")
    k: tuple[int, ...] = Field((), description="每个模式的玻色子幂次 k_i")
    w: tuple[float, ...] = Field((), description="每个模式的频率 w_i")
    g_prime: float = Field(0.0, description="自旋能量尺度 g'")
    g: float = Field(0.0, description="耦合常数 g")
    constant_shift: float = Field(0.0, description="加性常数")
    casimir_weight: float = Field(0.0, description="su(2) Casimir 项系数，能量平移 j(j+1) 倍")

    @model_validator(mode="after")
    def _check_invariants(self):
        if self.M < 0:
            raise ValueError(f"模式数 M 必须非负，实际为 {self.M}")
        if len(self.k) != self.M or len(self.w) != self.M:
            raise ValueError(f"长度不匹配: M={self.M}, len(k)={len(self.k)}, len(w)={len(self.w)}")
        if self.r < 1:
            raise ValueError(f"r 必须为正整数，实际为 {self.r}")
        if self.s < 1:
            raise ValueError(f"s 必须为正整数，实际为 {self.s}")
        bad = [k for k in self.k if k < 1]
        if bad:
            raise ValueError(f"k_i 必须为正整数，实际含有 {bad}")
        return self


@dataclass(frozen=True)
class ReferenceState:
    """具体的乘积态 |j, mu> ⊗ |n_1 … n_M>，用于计算所属扇区的标签"""

    mu: Fraction
    n_bosons: tuple[int, ...]


@dataclass(frozen=True)
class SectorLabels:
    """确定一个有限维不变块的守恒量子数"""

    j: Fraction
    p: int
    lam: int
    kappa: Fraction
    q: tuple[Fraction, ...]
    l: tuple[Fraction, ...]  # noqa: E741
    A: tuple[Fraction, ...]
    dim: int

    @property
    def N(self) -> int:
        """多项式不变子空间的最高次数 𝒩 = dim - 1"""
        return self.dim - 1

    @property
    def key(self) -> tuple:
        """去重与排序用的标签元组 (p, κ, l, q)"""
        return (self.p, self.kappa, self.l, self.q)

    def to_dict(self) -> dict:
        """序列化为 JSON 友好的字典，有理数写成 "num/den" 字符串"""
        from data_manager import format_rational

        return {
            "j": format_rational(self.j),
            "p": self.p,
            "lambda": self.lam,
            "kappa": format_rational(self.kappa),
            "q": [format_rational(x) for x in self.q],
            "l": [format_rational(x) for x in self.l],
            "A": [format_rational(x) for x in self.A],
            "N": self.N,
            "dim": self.dim,
        }


def validate_model(raw: Union[ModelSpec, Mapping[str, Any]]) -> ModelSpec:
    """校验模型参数，合法时原样返回，否则抛出 ModelError"""
    data = raw.model_dump() if isinstance(raw, ModelSpec) else dict(raw)
    try:
        spec = ModelSpec.model_validate(data)
    except ValidationError as e:
        details = "; ".join(
            f"{'.'.join(str(x) for x in err['loc']) or 'model'}: {err['msg']}" for err in e.errors()
        )
        raise ModelError(f"模型参数不合法: {details}") from e
    return raw if isinstance(raw, ModelSpec) else spec


def check_spin(j) -> Fraction:
    """检查 j 是非负半整数"""
    j = Fraction(j)
    if j < 0 or (2 * j).denominator != 1:
        raise ModelError(f"自旋 j 必须是非负半整数，实际为 {j}")
    return j


def lambda_of(j, p: int, r: int) -> int:
    """计算 λ：使 (2j-p-λ)/r 为非负整数的唯一取值 λ = (2j-p) mod r"""
    j = check_spin(j)
    two_j = int(2 * j)
    if not 0 <= p <= min(r - 1, two_j):
        raise ModelError(f"p={p} 超出范围 [0, min(r-1, 2j)] = [0, {min(r - 1, two_j)}]")
    return (two_j - p) % r


def sector_dimension(model: ModelSpec, j, p: int, lam: int, A) -> int:
    """返回扇区维数 𝒩+1；M>0 时 𝒩 取所有 A_i 与 (2j-p-λ)/r 的最小值"""
    j = check_spin(j)
    top = Fraction(2 * j - p - lam, model.r)
    if top < 0 or top.denominator != 1:
        raise ModelError(f"(2j-p-λ)/r = {top} 不是非负整数")
    N = int(top)
    if model.M > 0:
        A = [Fraction(a) for a in A]
        if any(a < 0 or a.denominator != 1 for a in A):
            raise ModelError(f"A_i 必须是非负整数，实际为 {[str(a) for a in A]}")
        N = min(N, int(min(A)))
    return N + 1


def boson_offsets(model: ModelSpec, q) -> tuple[int, ...]:
    """由 q_i 求每个模式的玻色子数余数 t_i = k_i q_i - 1/k_i ∈ {0, …, k_i-1}"""
    return tuple(int(k * qi - Fraction(1, k)) for k, qi in zip(model.k, q))


def _allowed_q(k: int) -> list[Fraction]:
    return [Fraction(t * k + 1, k * k) for t in range(k)]


def sector_from_reference(model: ModelSpec, j, ref: ReferenceState) -> SectorLabels:
    """由具体参考态计算其所在扇区的全部标签（精确有理数运算）"""
    j = check_spin(j)
    mu = Fraction(ref.mu)
    if abs(mu) > j or (mu + j).denominator != 1:
        raise ModelError(f"mu={mu} 不在 {{-j, …, j}} 中 (j={j})")
    if len(ref.n_bosons) != model.M:
        raise ModelError(f"玻色子数个数 {len(ref.n_bosons)} 与 M={model.M} 不一致")
    if any(n < 0 for n in ref.n_bosons):
        raise ModelError(f"玻色子数必须非负: {ref.n_bosons}")

    M, r = model.M, model.r
    steps = int(mu + j)
    p, n_spin = steps % r, steps // r
    q = tuple(Fraction((n % k) * k + 1, k * k) for n, k in zip(ref.n_bosons, model.k))
    m = tuple(Fraction(n, k) - qi + Fraction(1, k * k) for n, k, qi in zip(ref.n_bosons, model.k, q))
    Q0 = [qi + mi for qi, mi in zip(q, m)]

    kappa = (M * (Fraction(p) - j) / r + M * n_spin + sum(Q0, Fraction(0))) / (M + 1)
    l = tuple(Q0[mu_] - Q0[mu_ + 1] for mu_ in range(M - 1))  # noqa: E741
    A = tuple(n_spin + mi for mi in m)
    lam = lambda_of(j, p, r)
    dim = sector_dimension(model, j, p, lam, A)
    return SectorLabels(j=j, p=p, lam=lam, kappa=kappa, q=q, l=l, A=A, dim=dim)


def sector_from_labels(model: ModelSpec, j, p: int, kappa, q=(), l=()) -> SectorLabels:  # noqa: E741
    """由守恒量 (p, κ, q, l) 直接构造扇区，A_i 按表示论公式计算"""
    j = check_spin(j)
    M, r = model.M, model.r
    kappa = Fraction(kappa)
    q = tuple(Fraction(x) for x in q)
    l = tuple(Fraction(x) for x in l)  # noqa: E741
    if len(q) != M or len(l) != max(M - 1, 0):
        raise ModelError(f"q 或 l 的长度与 M={M} 不一致")
    for qi, k in zip(q, model.k):
        if qi not in _allowed_q(k):
            raise ModelError(f"q={qi} 不在 k={k} 允许的取值集合中")
    lam = lambda_of(j, p, r)
    if M == 0:
        if kappa != 0:
            raise ModelError(f"M=0 时 κ 必须为 0，实际为 {kappa}")
        A: tuple[Fraction, ...] = ()
    else:
        weighted = sum((mu_ + 1) * lm for mu_, lm in enumerate(l)) / Fraction(M)
        A = tuple(
            Fraction(M + 1, M) * kappa - weighted + sum(l[i:], Fraction(0)) - (Fraction(p) - j) / r - q[i]
            for i in range(M)
        )
    dim = sector_dimension(model, j, p, lam, A)
    return SectorLabels(j=j, p=p, lam=lam, kappa=kappa, q=q, l=l, A=A, dim=dim)


def validate_sector(model: ModelSpec, sector: SectorLabels) -> SectorLabels:
    """检查扇区标签的全部不变量，合法时原样返回"""
    expected = sector_from_labels(model, sector.j, sector.p, sector.kappa, sector.q, sector.l)
    if expected != sector:
        raise ModelError(f"扇区标签前后不一致: {sector.to_dict()} != {expected.to_dict()}")
    return sector


def basis_state(model: ModelSpec, sector: SectorLabels, n: int) -> ReferenceState:
    """第 n 个基矢量的具体内容：mu = -j+p+rn，n_i = k_i(A_i-n) + t_i"""
    if not 0 <= n <= sector.N:
        raise ModelError(f"基矢量序号 n={n} 超出 [0, {sector.N}]")
    mu = -sector.j + sector.p + model.r * n
    t = boson_offsets(model, sector.q)
    bosons = tuple(int(k * (a - n)) + ti for k, a, ti in zip(model.k, sector.A, t))
    return ReferenceState(mu=mu, n_bosons=bosons)


def number_eigenvalue(model: ModelSpec, sector: SectorLabels, i: int, n) -> Fraction:
    """N_i 在第 n 个基矢量上的本征值（微分实现中 z d/dz → n，i 从 0 开始编号）"""
    M, r, k = model.M, model.r, model.k[i]
    weighted = sum((mu_ + 1) * lm for mu_, lm in enumerate(sector.l)) / Fraction(M)
    inner = (
        Fraction(M + 1, M) * sector.kappa
        - (Fraction(sector.p) - sector.j) / r
        + sum(sector.l[i:], Fraction(0))
        - weighted
        - n
    )
    return k * inner - Fraction(1, k)


def effective_shift(model: ModelSpec, j) -> float:
    """加性常数：constant_shift + casimir_weight·j(j+1)"""
    j = Fraction(j)
    return model.constant_shift + model.casimir_weight * float(j * (j + 1))


def enumerate_sectors(model: ModelSpec, j, max_total_bosons: int) -> list[SectorLabels]:
    """枚举所有 Σn_i ≤ max_total_bosons 的参考态生成的扇区，去重并按 (p, κ, l, q) 排序"""
    j = check_spin(j)
    if max_total_bosons < 0:
        raise ModelError(f"max_total_bosons 必须非负，实际为 {max_total_bosons}")
    found: dict[tuple, SectorLabels] = {}
    mus = [-j + step for step in range(int(2 * j) + 1)]
    for bosons in itertools.product(range(max_total_bosons + 1), repeat=model.M):
        if sum(bosons) > max_total_bosons:
            continue
        for mu in mus:
            sector = sector_from_reference(model, j, ReferenceState(mu=mu, n_bosons=bosons))
            found.setdefault(sector.key, sector)
    return [found[key] for key in sorted(found)]


def find_sector(sectors: list[SectorLabels], key: tuple) -> Optional[SectorLabels]:
    """按标签元组查找扇区"""
    for sector in sectors:
        if sector.key == key:
            return sector
    return None
