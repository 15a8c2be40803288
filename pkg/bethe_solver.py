#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
函数 Bethe ansatz 求解模块
由扇区本征向量恢复 ψ(z) = Π(z-α_i) 的根，计算 Bethe 方程残差与能量，
并可在 Bethe 方程上用 Newton 法精化
"""

from dataclasses import dataclass, replace
from math import factorial
from typing import Optional, Sequence

import numpy as np
from rich.console import Console

from config import (
    BAE_TOL,
    CLUSTER_TOL,
    COEFF_TOL,
    EIGEN_TOL,
    ENERGY_CROSSCHECK_TOL,
    IMAG_TOL,
    NEWTON_TOL,
    REFINE_ENERGY_TOL,
    ROOT_TOL,
    VERIFY_TOL,
)
from errors import CoincidentRootsError, EnergyMismatchError, InternalError, ModelError, NumericalError
from linalg import EigenDecomposition, jacobi_eigen, newton_solve, polynomial_from_roots, polynomial_roots
from linalg import tridiagonal_eigenvector
from model import ModelSpec, SectorLabels, effective_shift, number_eigenvalue
from operator_algebra import EulerOperator, apply_to_monomials, build_hamiltonian_operator, raising_product
from representation import SectorMatrices, sector_matrices

console = Console(stderr=True)


@dataclass(frozen=True)
class BetheState:
    """一个本征态的 Bethe 根、能量与校验结果"""

    sector: SectorLabels
    eigen_index: int
    roots: np.ndarray
    energy: float
    eigenvalue: float
    bae_residuals: Optional[np.ndarray]
    max_scaled_residual: Optional[float]
    degenerate_roots: bool
    verified: bool
    refined: bool = False
    refine_failed: bool = False
    newton_iterations: int = 0

    def to_dict(self) -> dict:
        residuals = None
        if self.bae_residuals is not None:
            residuals = [float(abs(x)) for x in self.bae_residuals]
        return {
            "index": self.eigen_index,
            "E": float(self.energy),
            "eigenvalue": float(self.eigenvalue),
            "roots": [[float(z.real), float(z.imag)] for z in self.roots],
            "residual": None if self.max_scaled_residual is None else float(self.max_scaled_residual),
            "bae_residuals": residuals,
            "degenerate_roots": bool(self.degenerate_roots),
            "verified": bool(self.verified),
            "refined": bool(self.refined),
            "refine_failed": bool(self.refine_failed),
        }


def _elementary_symmetric(xs: np.ndarray, count: int) -> np.ndarray:
    """e_0 … e_{count-1}"""
    e = np.zeros(max(count, 0), dtype=complex)
    if count > 0:
        e[0] = 1.0
    for x in xs:
        for i in range(count - 1, 0, -1):
            e[i] += x * e[i - 1]
    return e


def _check_distinct(roots: np.ndarray) -> None:
    if len(roots) < 2:
        return
    gaps = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(gaps, np.inf)
    limit = CLUSTER_TOL * max(1.0, float(np.max(np.abs(roots))))
    if gaps.min() <= limit:
        raise CoincidentRootsError(f"Bethe 根重合: 最小间距 {gaps.min():.3e} ≤ {limit:.3e}")


def bae_terms(op: EulerOperator, roots: Sequence[complex]) -> tuple[np.ndarray, np.ndarray]:
    """
    对每个 μ 计算 Σ_{i≥1} P_i(α_μ)·i!·e_{i-1}({1/(α_μ-α_n)}_{n≠μ})，
    以及把全部系数与变量取绝对值后的同样求和（残差的缩放尺度）。
    根必须两两不同。
    """
    roots = np.asarray(roots, dtype=complex)
    _check_distinct(roots)
    order = op.order
    residuals = np.zeros(len(roots), dtype=complex)
    scales = np.zeros(len(roots))
    for mu, alpha in enumerate(roots):
        inverse = 1.0 / (alpha - np.delete(roots, mu))
        e = _elementary_symmetric(inverse, order)
        e_abs = _elementary_symmetric(np.abs(inverse), order).real
        for i in range(1, order + 1):
            P = op.coefficient(i)
            if P.is_zero():
                continue
            residuals[mu] += P(alpha) * factorial(i) * e[i - 1]
            scales[mu] += float(np.polyval(np.abs(P.coeffs[::-1]), abs(alpha))) * factorial(i) * e_abs[i - 1]
    return residuals, scales


def bae_residuals(
    model: ModelSpec, sector: SectorLabels, roots: Sequence[complex], op: Optional[EulerOperator] = None
) -> np.ndarray:
    """Bethe 方程残差；𝒩=1 时即 P_1(α)"""
    op = op or build_hamiltonian_operator(model, sector)
    return bae_terms(op, roots)[0]


def scaled_residual(op: EulerOperator, roots: Sequence[complex]) -> float:
    """max_μ |残差_μ| / 求和项绝对值尺度"""
    if not len(roots):
        return 0.0
    residuals, scales = bae_terms(op, roots)
    return float(np.max(np.abs(residuals) / np.maximum(scales, np.finfo(float).tiny)))


def top_diagonal(model: ModelSpec, sector: SectorLabels) -> float:
    """z^𝒩 对 z^𝒩 的系数：Σ w_i n̄_i(𝒩) + g'(r𝒩-j+p)^s + 常数项"""
    N = sector.N
    bosons = sum(w * float(number_eigenvalue(model, sector, i, N)) for i, w in enumerate(model.w))
    spin = model.g_prime * float((model.r * N - sector.j + sector.p) ** model.s)
    return bosons + spin + effective_shift(model, sector.j)


def _lift(model: ModelSpec, sector: SectorLabels) -> float:
    """z^{𝒩-1} 被 H 抬到 z^𝒩 的系数"""
    return model.g * float(raising_product(model, sector, sector.N - 1)) if sector.N else 0.0


def energy_from_coefficients(
    model: ModelSpec,
    sector: SectorLabels,
    psi: Sequence[complex],
    op: Optional[EulerOperator] = None,
    tol: float = ENERGY_CROSSCHECK_TOL,
) -> complex:
    """
    ψ 的升幂系数给出能量 E = 对角项 - 抬升系数·Σα，Σα 取自 Vieta 关系 -ψ_{𝒩-1}/ψ_𝒩，
    不经过数值求根，重根被拆开时同样成立。结果与 [z^𝒩](Hψ)/ψ_𝒩 交叉核对
    """
    N = sector.N
    psi = np.asarray(psi, dtype=complex)
    if len(psi) != N + 1:
        raise ModelError(f"需要 {N + 1} 个系数，实际为 {len(psi)}")
    if psi[N] == 0:
        raise ModelError("ψ 的 z^𝒩 系数为零")
    psi = psi / psi[N]
    diagonal = top_diagonal(model, sector)
    lift = _lift(model, sector)
    energy = diagonal + lift * psi[N - 1] if N else complex(diagonal)

    op = op or build_hamiltonian_operator(model, sector)
    row = apply_to_monomials(op, N)[N, :]
    ratio = row @ psi
    scale = max(1.0, abs(diagonal), abs(lift * psi[N - 1]) if N else 0.0, float(np.abs(row) @ np.abs(psi)))
    if abs(ratio - energy) > tol * scale:
        raise EnergyMismatchError(f"能量公式 {energy.real:.12g} 与 z^𝒩 系数比值 {ratio.real:.12g} 不一致")
    return energy


def energy_from_roots(
    model: ModelSpec,
    sector: SectorLabels,
    roots: Sequence[complex],
    op: Optional[EulerOperator] = None,
    tol: float = ENERGY_CROSSCHECK_TOL,
) -> float:
    """比较 z^𝒩 项得到能量，并与 [z^𝒩](Hψ)/[z^𝒩]ψ 交叉核对"""
    roots = np.asarray(roots, dtype=complex)
    N = sector.N
    if len(roots) != N:
        raise ModelError(f"需要 {N} 个根，实际为 {len(roots)}")
    energy = energy_from_coefficients(model, sector, polynomial_from_roots(roots), op=op, tol=tol)
    scale = max(1.0, abs(top_diagonal(model, sector)), abs(_lift(model, sector)) * float(np.sum(np.abs(roots))))
    if abs(energy.imag) > IMAG_TOL * scale:
        raise InternalError(f"能量虚部过大: {energy.imag:.3e}")
    return float(energy.real)


def liouville_values(op: EulerOperator, roots: Sequence[complex], zs: Sequence[complex]) -> np.ndarray:
    """Hψ/ψ 在给定点处的值 Σ_{i≥1} P_i(z)·i!·e_i({1/(z-α_n)}) + P_0(z)，Bethe 方程成立时为常数"""
    roots = np.asarray(roots, dtype=complex)
    out = np.zeros(len(zs), dtype=complex)
    for idx, z in enumerate(zs):
        e = _elementary_symmetric(1.0 / (z - roots), op.order + 1)
        value = op.coefficient(0)(z) + 0j
        for i in range(1, op.order + 1):
            if i < len(e):
                value += op.coefficient(i)(z) * factorial(i) * e[i]
        out[idx] = value
    return out


def _hpsi_check(op: EulerOperator, N: int, psi: np.ndarray, energy: float) -> bool:
    mono = apply_to_monomials(op, N)
    image = mono @ psi
    target = np.concatenate([energy * psi, [0.0]])
    scale = float(np.max(np.abs(mono) @ np.abs(psi)))
    return bool(np.max(np.abs(image - target)) <= VERIFY_TOL * max(scale, abs(energy) * float(np.max(np.abs(psi)))))


def _monomial_coefficients(mats: SectorMatrices, eig: EigenDecomposition, index: int) -> np.ndarray:
    vector = eig.vectors[:, index]
    if len(vector) > 1:
        peak = int(np.argmax(np.abs(vector)))
        polished = tridiagonal_eigenvector(mats.H, float(eig.values[index]), peak)
        before = np.linalg.norm(mats.H @ vector - eig.values[index] * vector)
        after = np.linalg.norm(mats.H @ polished - eig.values[index] * polished)
        if after <= 10 * max(before, np.finfo(float).eps * np.linalg.norm(mats.H)):
            vector = polished
    return vector / mats.norm_scale


def recover_roots(
    model: ModelSpec,
    sector: SectorLabels,
    eigen_index: int,
    op: Optional[EulerOperator] = None,
    mats: Optional[SectorMatrices] = None,
    eig: Optional[EigenDecomposition] = None,
    root_tol: float = ROOT_TOL,
    bae_tol: float = BAE_TOL,
) -> BetheState:
    """对角化扇区矩阵，把本征向量换算为单项式系数并分解出 Bethe 根"""
    if not 0 <= eigen_index < sector.dim:
        raise ModelError(f"eigen_index={eigen_index} 超出 [0, {sector.N}]")
    op = op or build_hamiltonian_operator(model, sector)
    mats = mats or sector_matrices(model, sector)
    eig = eig or jacobi_eigen(mats.H)
    eigenvalue = float(eig.values[eigen_index])
    N = sector.N

    if N == 0:
        energy = energy_from_roots(model, sector, [], op)
        return BetheState(
            sector=sector,
            eigen_index=eigen_index,
            roots=np.zeros(0, dtype=complex),
            energy=energy,
            eigenvalue=eigenvalue,
            bae_residuals=np.zeros(0, dtype=complex),
            max_scaled_residual=0.0,
            degenerate_roots=False,
            verified=_hpsi_check(op, 0, np.ones(1), energy),
        )

    coeffs = _monomial_coefficients(mats, eig, eigen_index)

    if model.g == 0:
        # 解耦极限：本征向量是单个单项式 z^d
        significant = np.flatnonzero(np.abs(coeffs) > 1e-12 * np.max(np.abs(coeffs)))
        degree = int(significant[-1])
        roots = polynomial_roots(coeffs[: degree + 1], tol=root_tol).roots
        psi = np.zeros(N + 1)
        psi[: degree + 1] = coeffs[: degree + 1] / coeffs[degree]
        return BetheState(
            sector=sector,
            eigen_index=eigen_index,
            roots=roots,
            energy=eigenvalue,
            eigenvalue=eigenvalue,
            bae_residuals=None,
            max_scaled_residual=None,
            degenerate_roots=degree < N or len(roots) > 1,
            verified=_hpsi_check(op, N, psi, eigenvalue),
        )

    if coeffs[N] == 0:
        raise InternalError(f"g≠0 时 ψ 的最高次系数为零 (扇区 {sector.to_dict()})")
    root_set = polynomial_roots(coeffs, tol=root_tol, coeff_tol=COEFF_TOL)
    roots = root_set.roots
    energy = float(energy_from_coefficients(model, sector, coeffs, op).real)

    residuals: Optional[np.ndarray] = None
    worst: Optional[float] = None
    degenerate = root_set.clustered
    if not degenerate:
        try:
            residuals, scales = bae_terms(op, roots)
            worst = float(np.max(np.abs(residuals) / np.maximum(scales, np.finfo(float).tiny)))
        except CoincidentRootsError:
            degenerate = True
    # 根簇只能由系数本身校验
    psi = coeffs / coeffs[N] if degenerate else polynomial_from_roots(roots).real
    if degenerate:
        console.print(f"[yellow]⚠ 扇区 {sector.to_dict()} 第 {eigen_index} 个态的 Bethe 根重合，残差不计算[/yellow]")
    elif worst > bae_tol:
        console.print(f"[yellow]⚠ 第 {eigen_index} 个态的 Bethe 方程缩放残差 {worst:.3e} 超过 {bae_tol:.1e}[/yellow]")

    return BetheState(
        sector=sector,
        eigen_index=eigen_index,
        roots=roots,
        energy=energy,
        eigenvalue=eigenvalue,
        bae_residuals=residuals,
        max_scaled_residual=worst,
        degenerate_roots=degenerate,
        verified=_hpsi_check(op, N, psi, energy),
    )


def newton_refine_bae(
    model: ModelSpec,
    sector: SectorLabels,
    state: BetheState,
    op: Optional[EulerOperator] = None,
    tol: float = NEWTON_TOL,
) -> BetheState:
    """以恢复的根为初值，在 2𝒩 维实残差映射上做 Newton 精化；失败时返回原状态并标记"""
    N = sector.N
    if state.degenerate_roots or N == 0:
        return state
    op = op or build_hamiltonian_operator(model, sector)
    _, weights = bae_terms(op, state.roots)
    weights = np.maximum(weights, np.finfo(float).tiny)

    def residual_map(x: np.ndarray) -> np.ndarray:
        residuals = bae_terms(op, x[:N] + 1j * x[N:])[0] / weights
        return np.concatenate([residuals.real, residuals.imag])

    seed = np.concatenate([state.roots.real, state.roots.imag])
    try:
        result = newton_solve(residual_map, seed, tol=tol)
        roots = result.x[:N] + 1j * result.x[N:]
        roots = roots[np.lexsort((roots.imag, roots.real))]
        energy = energy_from_roots(model, sector, roots, op)
    except NumericalError as e:
        console.print(f"[yellow]⚠ Newton 精化失败: {e}[/yellow]")
        return replace(state, refine_failed=True)

    if abs(energy - state.energy) > REFINE_ENERGY_TOL * max(1.0, abs(state.energy)):
        console.print(f"[yellow]⚠ Newton 精化改变了能量: {state.energy:.12g} → {energy:.12g}[/yellow]")
        return replace(state, refine_failed=True)

    residuals, scales = bae_terms(op, roots)
    return replace(
        state,
        roots=roots,
        energy=energy,
        bae_residuals=residuals,
        max_scaled_residual=float(np.max(np.abs(residuals) / np.maximum(scales, np.finfo(float).tiny))),
        refined=True,
        newton_iterations=result.iterations,
    )


def solve_sector(
    model: ModelSpec,
    sector: SectorLabels,
    refine: bool = False,
    root_tol: float = ROOT_TOL,
    bae_tol: float = BAE_TOL,
    eigen_tol: float = EIGEN_TOL,
    newton_tol: float = NEWTON_TOL,
) -> list[BetheState]:
    """扇区内全部 𝒩+1 个态，按能量升序"""
    op = build_hamiltonian_operator(model, sector)
    mats = sector_matrices(model, sector)
    eig = jacobi_eigen(mats.H, tol=eigen_tol)
    states = [
        recover_roots(model, sector, k, op=op, mats=mats, eig=eig, root_tol=root_tol, bae_tol=bae_tol)
        for k in range(sector.dim)
    ]
    if refine:
        states = [newton_refine_bae(model, sector, state, op=op, tol=newton_tol) for state in states]
    return sorted(states, key=lambda state: state.energy)
