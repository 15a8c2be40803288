#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
微分算子模块
单变量多项式系数微分算子的正规序运算 Σ_d P_d(z)(d/dz)^d，
以及哈密顿量在扇区上的微分算子实现与 P_i(z) 的提取
"""

from fractions import Fraction
from math import comb
from typing import Mapping, Optional, Sequence

import numpy as np

from config import OPERATOR_TOL
from errors import OperatorRemainderError
from model import ModelSpec, SectorLabels, effective_shift, number_eigenvalue


class Poly:
    """实系数多项式，coeffs[i] 为 z^i 的系数，去掉末尾的零"""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[float] = ()):
        c = np.array(coeffs, dtype=float).ravel()
        nonzero = np.flatnonzero(c)
        self.coeffs = c[: nonzero[-1] + 1] if nonzero.size else c[:0]

    @property
    def degree(self) -> int:
        """次数，零多项式为 -1"""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def __call__(self, z):
        result = np.zeros_like(np.asarray(z, dtype=complex if np.iscomplexobj(z) else float))
        for c in self.coeffs[::-1]:
            result = result * z + c
        return result

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        out = np.zeros(n)
        out[: len(self.coeffs)] += self.coeffs
        out[: len(other.coeffs)] += other.coeffs
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly(-self.coeffs)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if self.is_zero() or other.is_zero():
            return Poly()
        return Poly(np.convolve(self.coeffs, other.coeffs))

    def scale(self, c: float) -> "Poly":
        return Poly(c * self.coeffs)

    def shift(self, k: int) -> "Poly":
        """乘以 z^k"""
        if self.is_zero():
            return Poly()
        return Poly(np.concatenate([np.zeros(k), self.coeffs]))

    def derivative(self, t: int = 1) -> "Poly":
        """t 阶导数"""
        c = self.coeffs
        for _ in range(t):
            if len(c) <= 1:
                return Poly()
            c = c[1:] * np.arange(1, len(c))
        return Poly(c)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if len(self.coeffs) else 0.0

    def allclose(self, other: "Poly", tol: float = OPERATOR_TOL) -> bool:
        """按最大系数的相对容差比较"""
        diff = (self - other).max_abs()
        return diff <= tol * max(1.0, self.max_abs(), other.max_abs())

    def to_list(self) -> list[float]:
        return [float(x) for x in self.coeffs]

    def __repr__(self) -> str:
        return f"Poly({self.to_list()})"


class EulerOperator:
    """正规序微分算子 Σ_d P_d(z) D^d，D = d/dz，导数全部在右侧"""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[int, Poly]] = None):
        self.terms: dict[int, Poly] = {}
        for d, poly in (terms or {}).items():
            if d < 0:
                raise ValueError(f"导数阶数必须非负: {d}")
            if not poly.is_zero():
                self.terms[int(d)] = poly

    @property
    def order(self) -> int:
        """最高导数阶数，零算子为 -1"""
        return max(self.terms) if self.terms else -1

    def coefficient(self, d: int) -> Poly:
        return self.terms.get(d, Poly())

    def is_zero(self) -> bool:
        return not self.terms

    def max_abs(self) -> float:
        return max((p.max_abs() for p in self.terms.values()), default=0.0)

    def __add__(self, other: "EulerOperator") -> "EulerOperator":
        return add(self, other)

    def __matmul__(self, other: "EulerOperator") -> "EulerOperator":
        return compose(self, other)

    def __repr__(self) -> str:
        body = ", ".join(f"D^{d}: {self.terms[d].to_list()}" for d in sorted(self.terms))
        return f"EulerOperator({{{body}}})"


def identity() -> EulerOperator:
    return EulerOperator({0: Poly([1.0])})


def z_power(k: int, c: float = 1.0) -> EulerOperator:
    """c·z^k"""
    return EulerOperator({0: Poly([0.0] * k + [c])})


def derivative(d: int = 1) -> EulerOperator:
    """D^d"""
    return EulerOperator({d: Poly([1.0])})


def euler(c0: float, c1: float) -> EulerOperator:
    """c0 + c1·z d/dz"""
    return EulerOperator({0: Poly([c0]), 1: Poly([0.0, c1])})


def add(A: EulerOperator, B: EulerOperator) -> EulerOperator:
    """逐项多项式相加"""
    terms = dict(A.terms)
    for d, poly in B.terms.items():
        terms[d] = terms[d] + poly if d in terms else poly
    return EulerOperator(terms)


def scale(c: float, A: EulerOperator) -> EulerOperator:
    return EulerOperator({d: poly.scale(c) for d, poly in A.terms.items()})


def compose(A: EulerOperator, B: EulerOperator) -> EulerOperator:
    """正规序乘积 A∘B：D^d ∘ Q(z) = Σ_t C(d,t) Q^{(t)}(z) D^{d-t}"""
    result = EulerOperator()
    for d, P in A.terms.items():
        for e, Q in B.terms.items():
            for t in range(min(d, Q.degree) + 1):
                term = P * Q.derivative(t).scale(comb(d, t))
                result = add(result, EulerOperator({d + e - t: term}))
    return result


def power(A: EulerOperator, n: int) -> EulerOperator:
    result = identity()
    for _ in range(n):
        result = compose(result, A)
    return result


def product(factors: Sequence[EulerOperator]) -> EulerOperator:
    result = identity()
    for factor in factors:
        result = compose(result, factor)
    return result


def multiply_by_z(A: EulerOperator) -> EulerOperator:
    """左乘 z"""
    return EulerOperator({d: poly.shift(1) for d, poly in A.terms.items()})


def divide_by_z(A: EulerOperator, tol: float = OPERATOR_TOL) -> EulerOperator:
    """左乘 z^{-1}；每个 P_d 的常数项必须为零，否则抛出 OperatorRemainderError"""
    limit = tol * max(1.0, A.max_abs())
    terms = {}
    for d, poly in A.terms.items():
        if abs(poly.coeffs[0]) > limit:
            raise OperatorRemainderError(f"除以 z 的余项非零: D^{d} 的常数项为 {poly.coeffs[0]}")
        terms[d] = Poly(poly.coeffs[1:])
    return EulerOperator(terms)


def apply(A: EulerOperator, f: Poly) -> Poly:
    """算子作用于多项式：Σ_d P_d · f^{(d)}"""
    result = Poly()
    for d, P in A.terms.items():
        result = result + P * f.derivative(d)
    return result


def extract_polynomials(H: EulerOperator) -> list[Poly]:
    """返回 [P_0, …, P_𝓜]"""
    return [H.coefficient(d) for d in range(H.order + 1)]


def from_polynomials(polys: Sequence[Poly]) -> EulerOperator:
    """由 [P_0, …, P_𝓜] 重新组装算子"""
    return EulerOperator({d: poly for d, poly in enumerate(polys)})


def apply_to_monomials(H: EulerOperator, N: int) -> np.ndarray:
    """(N+2)×(N+1) 矩阵：第 n 列是 H z^n 在 {1, …, z^{N+1}} 上的系数，末行为 z^{N+1} 溢出系数"""
    if N < 0:
        raise ValueError(f"N 必须非负: {N}")
    out = np.zeros((N + 2, N + 1))
    for n in range(N + 1):
        image = apply(H, Poly([0.0] * n + [1.0]))
        if image.degree > N + 1:
            raise ValueError(f"H z^{n} 的次数 {image.degree} 超过 N+1={N + 1}")
        out[: len(image.coeffs), n] = image.coeffs
    return out


def to_json(H: EulerOperator) -> dict[str, list[float]]:
    """调试与回归快照用：{"order_d": [c0, c1, …]}"""
    return {f"order_{d}": H.terms[d].to_list() for d in sorted(H.terms)}


def from_json(data: Mapping[str, Sequence[float]]) -> EulerOperator:
    return EulerOperator({int(key.split("_", 1)[1]): Poly(coeffs) for key, coeffs in data.items()})


def raising_product(model: ModelSpec, sector: SectorLabels, n) -> Fraction:
    """Π_{i=1}^r (2j-p-i+1-rn) · Π_i Π_ν k_i(A_i+q_i-n-((ν-1)k_i+1)/k_i²)，精确有理数"""
    j, p, r = sector.j, sector.p, model.r
    value = Fraction(1)
    for i in range(1, r + 1):
        value *= 2 * j - p - i + 1 - r * n
    for k, a, q in zip(model.k, sector.A, sector.q):
        for nu in range(1, k + 1):
            value *= k * (a + q - n - Fraction((nu - 1) * k + 1, k * k))
    return value


def overflow_coefficient(model: ModelSpec, sector: SectorLabels, n) -> float:
    """H z^n 中 z^{n+1} 项的系数（闭式乘积）"""
    return model.g * float(raising_product(model, sector, n))


def build_hamiltonian_operator(model: ModelSpec, sector: SectorLabels) -> EulerOperator:
    """哈密顿量在扇区上的单变量微分算子实现，阶数 𝓜 = max{r+Σk_i, s}"""
    j, p, r = sector.j, sector.p, model.r

    # Σ w_i N_i，N_i = n̄_i(0) - k_i z d/dz
    H = EulerOperator()
    for i, (k, w) in enumerate(zip(model.k, model.w)):
        H = H + scale(w, euler(float(number_eigenvalue(model, sector, i, 0)), -k))

    # g'(r z d/dz - j + p)^s
    H = H + scale(model.g_prime, power(euler(float(p - j), r), model.s))

    # g z^{-1} Π_i (r z d/dz + p - i + 1)：展开后常数项 Π(p-i+1) = 0，再除以 z
    lowering = product([euler(float(p - i + 1), r) for i in range(1, r + 1)])
    H = H + scale(model.g, divide_by_z(lowering))

    # g z Π_i (2j-p-i+1 - r z d/dz) Π_i Π_ν k_i(A_i+q_i-((ν-1)k_i+1)/k_i² - z d/dz)
    factors = [euler(float(2 * j - p - i + 1), -r) for i in range(1, r + 1)]
    for k, a, q in zip(model.k, sector.A, sector.q):
        for nu in range(1, k + 1):
            factors.append(euler(float(k * (a + q - Fraction((nu - 1) * k + 1, k * k))), -k))
    H = H + scale(model.g, multiply_by_z(product(factors)))

    shift = effective_shift(model, sector.j)
    if shift:
        H = H + EulerOperator({0: Poly([shift])})
    return H
