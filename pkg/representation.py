#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
表示模块
扇区正交基下的 𝒫₀、𝒫₊、𝒫₋ 与 H 矩阵，多项式代数对易关系的检查，
以及自旋⊗Fock 空间上的直接构造（暴力对角化比对用）
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import lgamma
from typing import Optional

import numpy as np

from config import MATCH_TOL
from errors import InternalError, ModelError
from linalg import jacobi_eigen
from model import (
    ModelSpec,
    ReferenceState,
    SectorLabels,
    check_spin,
    effective_shift,
    number_eigenvalue,
    sector_from_reference,
)
from operator_algebra import EulerOperator, apply_to_monomials, build_hamiltonian_operator


@dataclass(frozen=True)
class SectorMatrices:
    """扇区基 |n⟩, n = 0..𝒩 下的矩阵；norm_scale[n] 把单项式系数换算到正交基"""

    P0: np.ndarray
    Pplus: np.ndarray
    Pminus: np.ndarray
    H: np.ndarray
    norm_scale: np.ndarray


@dataclass(frozen=True)
class AlgebraDiagnostics:
    """代数关系的最大偏差（相对各自的矩阵元尺度）"""

    raising: float
    lowering: float
    commutator: float
    lowest: float
    highest: float
    min_gap: float

    @property
    def worst(self) -> float:
        return max(self.raising, self.lowering, self.commutator, self.lowest, self.highest)


@dataclass
class FockBlock:
    """Fock 截断空间中守恒荷完全相同的一组基矢量"""

    basis: list[ReferenceState]
    H: np.ndarray
    charges: tuple
    complete: bool


@dataclass
class OracleMatch:
    """扇区谱与完整 Fock 块谱的比对结果"""

    blocks: int = 0
    max_deviation: float = 0.0
    mismatches: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


def raising_square(model: ModelSpec, sector: SectorLabels, n) -> Fraction:
    """⟨n+1|𝒫₊|n⟩²，精确有理数"""
    j, p, r = sector.j, sector.p, model.r
    value = Fraction(1)
    for i in range(1, r + 1):
        value *= (p + i + r * n) * (2 * j - p - i + 1 - r * n)
    for k, a, q in zip(model.k, sector.A, sector.q):
        for mu in range(1, k + 1):
            value *= a + q - Fraction((mu - 1) * k + 1, k * k) - n
    return value


def lowering_square(model: ModelSpec, sector: SectorLabels, n) -> Fraction:
    """⟨n-1|𝒫₋|n⟩²，由共轭公式独立计算"""
    j, p, r = sector.j, sector.p, model.r
    value = Fraction(1)
    for i in range(1, r + 1):
        value *= (p - i + 1 + r * n) * (2 * j - p + i - r * n)
    for k, a, q in zip(model.k, sector.A, sector.q):
        for mu in range(1, k + 1):
            value *= a + q + Fraction(mu * k - 1, k * k) - n
    return value


def coupling_prefactor(model: ModelSpec) -> float:
    """Π_i (√k_i)^{k_i}"""
    return float(np.prod([np.sqrt(k) ** k for k in model.k])) if model.k else 1.0


def norm_scale(model: ModelSpec, sector: SectorLabels) -> np.ndarray:
    """ν_n = √((p+rn)!(2j-p-rn)! Π_i (k_i(A_i-n)+t_i)!)，用 lgamma 计算"""
    j, p, r = sector.j, sector.p, model.r
    offsets = [int(k * q - Fraction(1, k)) for k, q in zip(model.k, sector.q)]
    out = np.empty(sector.dim)
    for n in range(sector.dim):
        log = lgamma(p + r * n + 1) + lgamma(int(2 * j) - p - r * n + 1)
        for k, a, t in zip(model.k, sector.A, offsets):
            log += lgamma(int(k * (a - n)) + t + 1)
        out[n] = np.exp(0.5 * log)
    return out


def sector_matrices(model: ModelSpec, sector: SectorLabels) -> SectorMatrices:
    """按扇区作用公式填写 𝒫₀、𝒫₊、𝒫₋ 与 H"""
    dim, r = sector.dim, model.r
    P0 = np.diag([float(Fraction(sector.p) - sector.j) / r + n - float(sector.kappa) for n in range(dim)])
    Pplus = np.zeros((dim, dim))
    Pminus = np.zeros((dim, dim))
    for n in range(dim - 1):
        up = raising_square(model, sector, n)
        down = lowering_square(model, sector, n + 1)
        if up < 0 or down < 0:
            raise ModelError(f"根号下出现负数 (n={n})，扇区标签不合法: {sector.to_dict()}")
        Pplus[n + 1, n] = np.sqrt(float(up))
        Pminus[n, n + 1] = np.sqrt(float(down))

    diagonal = np.zeros(dim)
    for n in range(dim):
        spin = model.g_prime * float((sector.p - sector.j + r * n) ** model.s)
        bosons = sum(w * float(number_eigenvalue(model, sector, i, n)) for i, w in enumerate(model.w))
        diagonal[n] = spin + bosons + effective_shift(model, sector.j)
    H = np.diag(diagonal) + model.g * coupling_prefactor(model) * (Pplus + Pminus)

    asym = float(np.max(np.abs(H - H.T)))
    if asym > 1e-12 * max(1.0, float(np.max(np.abs(H)))):
        raise InternalError(f"扇区哈密顿量不对称: {asym:.3e}")
    H = (H + H.T) / 2
    return SectorMatrices(P0=P0, Pplus=Pplus, Pminus=Pminus, H=H, norm_scale=norm_scale(model, sector))


def commutator_function(model: ModelSpec, sector: SectorLabels, x, printed_sign: bool = False) -> Fraction:
    """
    Ψ(x) = ±ψ^{(2r)}(x)·Π_i φ^{(k_i)}(x)，满足 [𝒫₊, 𝒫₋] = Ψ(𝒫₀-1) - Ψ(𝒫₀)。
    ψ、φ 各带一个负号，故整体需乘 (-1)^{M+1}；printed_sign=True 时省略该因子。
    """
    M, r = model.M, model.r
    x = Fraction(x)
    kappa = sector.kappa
    C = sector.j * (sector.j + 1)
    psi = Fraction(1)
    for i in range(1, r + 1):
        psi *= C - (r * kappa + r * x + r - i + 1) * (r * kappa + r * x + r - i)
    psi = -psi
    value = psi
    if M:
        weighted = sum((mu + 1) * lm for mu, lm in enumerate(sector.l)) / Fraction(M)
        for i, k in enumerate(model.k):
            phi = Fraction(1)
            for nu in range(1, k + 1):
                phi *= kappa / M - (x + 1) - weighted + sum(sector.l[i:], Fraction(0)) + Fraction(nu * k - 1, k * k)
            value *= -phi
    if not printed_sign and M % 2 == 0:
        value = -value
    return value


def check_algebra(
    model: ModelSpec,
    sector: SectorLabels,
    mats: Optional[SectorMatrices] = None,
    printed_sign: bool = False,
) -> AlgebraDiagnostics:
    """检查 [𝒫₀, 𝒫±] = ±𝒫±、[𝒫₊, 𝒫₋] = Ψ(𝒫₀-1) - Ψ(𝒫₀) 以及最低/最高态的湮灭条件"""
    mats = mats or sector_matrices(model, sector)
    P0, Pp, Pm = mats.P0, mats.Pplus, mats.Pminus

    def scaled(dev: np.ndarray, ref: np.ndarray) -> float:
        if not dev.size:
            return 0.0
        return float(np.max(np.abs(dev))) / max(1.0, float(np.max(np.abs(ref))))

    raising = scaled(P0 @ Pp - Pp @ P0 - Pp, Pp)
    lowering = scaled(P0 @ Pm - Pm @ P0 + Pm, Pm)

    def psi(x) -> Fraction:
        return commutator_function(model, sector, x, printed_sign)

    x = [Fraction(sector.p - sector.j, model.r) + n - sector.kappa for n in range(sector.dim)]
    target = np.diag([float(psi(xn - 1) - psi(xn)) for xn in x])
    actual = Pp @ Pm - Pm @ Pp
    commutator = scaled(actual - target, np.abs(actual) + np.abs(target))

    lowest = abs(float(lowering_square(model, sector, 0)))
    highest = abs(float(raising_square(model, sector, sector.N)))

    min_gap = 0.0
    if sector.dim > 1:
        values = jacobi_eigen(mats.H).values
        min_gap = float(np.min(np.diff(values)))
    return AlgebraDiagnostics(
        raising=raising, lowering=lowering, commutator=commutator, lowest=lowest, highest=highest, min_gap=min_gap
    )


def monomial_conjugation_check(
    model: ModelSpec,
    sector: SectorLabels,
    op: Optional[EulerOperator] = None,
    mats: Optional[SectorMatrices] = None,
) -> float:
    """max|D·H_mono·D⁻¹ - H| / max(1, max|H|)，D = diag(norm_scale)"""
    op = op or build_hamiltonian_operator(model, sector)
    mats = mats or sector_matrices(model, sector)
    mono = apply_to_monomials(op, sector.N)[: sector.dim, :]
    nu = mats.norm_scale
    conjugated = (nu[:, None] * mono) / nu[None, :]
    return float(np.max(np.abs(conjugated - mats.H))) / max(1.0, float(np.max(np.abs(mats.H))))


def spin_matrices(j) -> tuple[list[Fraction], np.ndarray, np.ndarray]:
    """|j, mu⟩ 基（mu 从 -j 升序）下的 J₊ 与 J₀，矩阵元 √((j-m)(j+m+1))"""
    j = check_spin(j)
    mus = [-j + step for step in range(int(2 * j) + 1)]
    dim = len(mus)
    Jp = np.zeros((dim, dim))
    for a in range(dim - 1):
        m = mus[a]
        Jp[a + 1, a] = np.sqrt(float((j - m) * (j + m + 1)))
    J0 = np.diag([float(m) for m in mus])
    return mus, Jp, J0


def _lowering_boson(cap: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cap + 1, dtype=float)), 1)


def _charges(model: ModelSpec, j: Fraction, mu: Fraction, bosons: tuple[int, ...]) -> tuple:
    """直接由占据数计算 (p, κ, l, q)，不经过扇区构造"""
    M, r = model.M, model.r
    p = int(mu + j) % r
    Q0 = [Fraction(n * k + 1, k * k) for n, k in zip(bosons, model.k)]
    kappa = (M * mu / r + sum(Q0, Fraction(0))) / (M + 1)
    l = tuple(Q0[i] - Q0[i + 1] for i in range(M - 1))  # noqa: E741
    q = tuple(Fraction((n % k) * k + 1, k * k) for n, k in zip(bosons, model.k))
    return (p, kappa, l, q)


def fock_hamiltonian(model: ModelSpec, j, cap: int) -> tuple[np.ndarray, list[ReferenceState]]:
    """自旋⊗截断 Fock 空间上的完整哈密顿量，基矢量顺序与 np.kron 一致（自旋在前）"""
    j = check_spin(j)
    if cap < 0:
        raise ModelError(f"玻色子截断必须非负，实际为 {cap}")
    mus, Jp, J0 = spin_matrices(j)
    a = _lowering_boson(cap)
    eye_b = np.eye(cap + 1)
    number = np.diag(np.arange(cap + 1, dtype=float))

    def embed(spin_op: np.ndarray, mode_ops: list[np.ndarray]) -> np.ndarray:
        out = spin_op
        for op in mode_ops:
            out = np.kron(out, op)
        return out

    eye_s = np.eye(len(mus))
    H = model.g_prime * embed(np.linalg.matrix_power(J0, model.s), [eye_b] * model.M)
    for i, w in enumerate(model.w):
        ops = [eye_b] * model.M
        ops[i] = number
        H = H + w * embed(eye_s, ops)
    coupling = embed(np.linalg.matrix_power(Jp, model.r), [np.linalg.matrix_power(a, k) for k in model.k])
    H = H + model.g * (coupling + coupling.T)
    H = H + effective_shift(model, j) * np.eye(H.shape[0])

    basis = [
        ReferenceState(mu=mu, n_bosons=tuple(bosons))
        for mu, bosons in itertools.product(mus, itertools.product(range(cap + 1), repeat=model.M))
    ]
    return H, basis


def fock_oracle(model: ModelSpec, j, cap: int, include_incomplete: bool = False) -> list[FockBlock]:
    """按守恒荷把 Fock 基分块；只有在 H 作用下不越过截断的块标记为完整"""
    j = check_spin(j)
    H, basis = fock_hamiltonian(model, j, cap)
    groups: dict[tuple, list[int]] = {}
    for idx, state in enumerate(basis):
        groups.setdefault(_charges(model, j, state.mu, state.n_bosons), []).append(idx)

    blocks = []
    for key in sorted(groups):
        idx = groups[key]
        complete = not any(
            basis[i].mu - model.r >= -j and any(n + k > cap for n, k in zip(basis[i].n_bosons, model.k)) for i in idx
        )
        if complete or include_incomplete:
            block = FockBlock(basis=[basis[i] for i in idx], H=H[np.ix_(idx, idx)], charges=key, complete=complete)
            blocks.append(block)
    return blocks


def charge_conservation(model: ModelSpec, j, cap: int) -> float:
    """完整截断矩阵上 max|[H, 𝒦]| 与 max|[H, ℒ_μ]|"""
    j = check_spin(j)
    H, basis = fock_hamiltonian(model, j, cap)
    charges = [_charges(model, j, s.mu, s.n_bosons) for s in basis]
    worst = 0.0
    rows, cols = np.nonzero(H)
    for a, b in zip(rows, cols):
        ka, kb = charges[a], charges[b]
        diffs = [abs(float(ka[1] - kb[1]))] + [abs(float(x - y)) for x, y in zip(ka[2], kb[2])]
        worst = max(worst, abs(H[a, b]) * max(diffs, default=0.0))
    return worst


def _compare_spectra(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    return float(np.max(np.abs(np.sort(a) - np.sort(b)))) / scale if a.size else 0.0


def match_oracle(
    model: ModelSpec, j, cap: int, tol: float = MATCH_TOL, blocks: Optional[list[FockBlock]] = None
) -> OracleMatch:
    """每个完整 Fock 块定位同标签扇区，比较维数与谱"""
    j = check_spin(j)
    blocks = blocks if blocks is not None else fock_oracle(model, j, cap)
    result = OracleMatch()
    for block in blocks:
        if not block.complete:
            continue
        sector = sector_from_reference(model, j, block.basis[0])
        label = sector.to_dict()
        result.blocks += 1
        if sector.key != block.charges:
            result.mismatches.append(f"标签不一致: {label}")
            continue
        if sector.dim != len(block.basis):
            result.mismatches.append(f"维数不一致: 扇区 {sector.dim} / Fock 块 {len(block.basis)} ({label})")
            continue
        expected = jacobi_eigen(sector_matrices(model, sector).H).values
        deviation = _compare_spectra(expected, jacobi_eigen(block.H).values)
        result.max_deviation = max(result.max_deviation, deviation)
        if deviation > tol:
            result.mismatches.append(f"谱不一致: 偏差 {deviation:.3e} ({label})")
    return result


def schwinger_spectrum(model: ModelSpec, j) -> np.ndarray:
    """M=0 模型的双玻色子实现：J₊ = b₁†b₂，J₀ = (n₁-n₂)/2，总玻色子数 2j"""
    if model.M != 0:
        raise ModelError(f"Schwinger 实现只适用于 M=0 模型，实际 M={model.M}")
    j = check_spin(j)
    total = int(2 * j)
    dim = total + 1
    Jp = np.zeros((dim, dim))
    for n1 in range(total):
        # b₁†b₂|n₁, n₂⟩ = √((n₁+1)n₂)|n₁+1, n₂-1⟩
        Jp[n1 + 1, n1] = np.sqrt((n1 + 1) * (total - n1))
    J0 = np.diag([(n1 - (total - n1)) / 2 for n1 in range(dim)])
    raised = np.linalg.matrix_power(Jp, model.r)
    H = model.g_prime * np.linalg.matrix_power(J0, model.s) + model.g * (raised + raised.T)
    H = H + effective_shift(model, j) * np.eye(dim)
    return jacobi_eigen(H).values
