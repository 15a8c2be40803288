#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
稠密数值计算模块
对称矩阵的循环 Jacobi 对角化、Aberth–Ehrlich 多项式求根、
带线搜索的阻尼 Newton 法，以及三对角矩阵本征向量的分量精化
"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from config import (
    ABERTH_MAX_ITER,
    CLUSTER_SPREAD_TOL,
    CLUSTER_TOL,
    EIGEN_TOL,
    JACOBI_MAX_SWEEPS,
    NEWTON_FD_STEP,
    NEWTON_MAX_HALVINGS,
    NEWTON_MAX_ITER,
    NEWTON_TOL,
    ROOT_TOL,
    SYMMETRY_TOL,
)
from errors import ConvergenceError, NoDecreaseError, NonSymmetricError, SingularJacobianError

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EigenDecomposition:
    """本征值升序排列，vectors 的第 k 列对应 values[k]"""

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class RootSet:
    """多项式的全部根；residual_bound 为最大的相对后向误差"""

    roots: np.ndarray
    residual_bound: float
    clustered: bool


@dataclass(frozen=True)
class NewtonResult:
    x: np.ndarray
    iterations: int
    residual_norm: float


def _off_norm(A: np.ndarray) -> float:
    return float(np.linalg.norm(A - np.diag(np.diag(A))))


def jacobi_eigen(A, tol: float = EIGEN_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> EigenDecomposition:
    """循环 Jacobi 旋转直到非对角 Frobenius 范数 < tol·‖A‖"""
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"需要方阵，实际形状为 {A.shape}")
    n = A.shape[0]
    scale = float(np.max(np.abs(A))) if A.size else 0.0
    asym = float(np.max(np.abs(A - A.T))) if A.size else 0.0
    if asym > SYMMETRY_TOL * scale:
        raise NonSymmetricError(f"矩阵不对称: max|A-Aᵀ| = {asym:.3e}")
    A = (A + A.T) / 2
    V = np.eye(n)
    norm = float(np.linalg.norm(A))

    for sweep in range(max_sweeps + 1):
        if _off_norm(A) <= tol * norm:
            break
        if sweep == max_sweeps:
            raise ConvergenceError(f"Jacobi 在 {max_sweeps} 轮扫描后未收敛")
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2 * apq)
                t = 1.0 / (abs(theta) + np.hypot(theta, 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1)
                s = t * c
                ap, aq = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = c * ap - s * aq, s * ap + c * aq
                ap, aq = A[p, :].copy(), A[q, :].copy()
                A[p, :], A[q, :] = c * ap - s * aq, s * ap + c * aq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p], V[:, q] = c * vp - s * vq, s * vp + c * vq

    values = np.diag(A).copy()
    order = np.argsort(values, kind="stable")
    return EigenDecomposition(values=values[order], vectors=V[:, order])


def _as_coeffs(coeffs) -> np.ndarray:
    """升幂系数数组，去掉最高次的零"""
    c = np.asarray(getattr(coeffs, "coeffs", coeffs), dtype=complex).ravel()
    nonzero = np.flatnonzero(c)
    if not nonzero.size:
        raise ValueError("零多项式没有确定的根")
    return c[: nonzero[-1] + 1]


def polynomial_from_roots(roots: Sequence[complex]) -> np.ndarray:
    """首一多项式 Π(z-α) 的升幂系数"""
    c = np.array([1.0 + 0j])
    for root in roots:
        c = np.convolve(c, np.array([-root, 1.0]))
    return c


def polynomial_roots(
    coeffs,
    tol: float = ROOT_TOL,
    max_iter: int = ABERTH_MAX_ITER,
    cluster_tol: float = CLUSTER_TOL,
    spread_tol: float = CLUSTER_SPREAD_TOL,
    coeff_tol: float = EPS,
) -> RootSet:
    """
    Aberth–Ehrlich 同时迭代求出全部根，coeffs 为升幂系数或 Poly，系数的相对精度为 coeff_tol。
    最近根距离小于 cluster_tol，或系数扰动引起的根移动超过最近根距离的 spread_tol 倍时标记为根簇
    """
    c = _as_coeffs(coeffs)
    n_zero = int(np.flatnonzero(c)[0])
    reduced = c[n_zero:]
    m = len(reduced) - 1
    roots = np.zeros(n_zero, dtype=complex)

    if m > 0:
        desc = reduced[::-1] / reduced[-1]
        ddesc = np.polyder(desc)
        abs_desc = np.abs(desc)
        radius = max(abs(desc[i]) ** (1.0 / i) for i in range(1, m + 1))
        if radius == 0.0:
            radius = 1.0
        z = radius * np.exp(1j * (2 * np.pi * np.arange(m) / m + 0.4))
        done = np.zeros(m, dtype=bool)

        for _ in range(max_iter):
            pz = np.polyval(desc, z)
            backward = np.abs(pz) <= 8 * EPS * np.polyval(abs_desc, np.abs(z))
            done |= backward
            if done.all():
                break
            dpz = np.polyval(ddesc, z)
            ratio = np.where(dpz != 0, pz / np.where(dpz != 0, dpz, 1), 1e-8 * (1 + np.abs(z)))
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            diff[diff == 0] = EPS
            pull = np.sum(1.0 / diff, axis=1)
            step = ratio / (1 - ratio * pull)
            step[done] = 0
            z = z - step
            done |= np.abs(step) <= tol * np.maximum(1.0, np.abs(z))
        else:
            if not done.all():
                raise ConvergenceError(f"Aberth 迭代在 {max_iter} 步后未收敛")
        roots = np.concatenate([roots, z])

    roots = roots[np.lexsort((roots.imag, roots.real))]
    if not len(roots):
        return RootSet(roots=roots, residual_bound=0.0, clustered=False)

    desc = c[::-1]
    floor = np.finfo(float).tiny * max(1.0, float(np.max(np.abs(c))))
    values = np.abs(np.polyval(desc, roots))
    weights = np.maximum(np.polyval(np.abs(desc), np.abs(roots)), floor)
    residual_bound = float(np.max(values / weights))

    clustered = False
    if len(roots) > 1:
        gaps = np.abs(roots[:, None] - roots[None, :])
        np.fill_diagonal(gaps, np.inf)
        nearest = gaps.min(axis=1)
        # 重根被系数扰动拆开后，彼此的距离与一阶根移动量同量级
        slopes = np.maximum(np.abs(np.polyval(np.polyder(desc), roots)), floor)
        spread = (values + max(coeff_tol, EPS) * weights) / slopes
        clustered = bool(
            nearest.min() < cluster_tol * max(1.0, float(np.max(np.abs(roots))))
            or np.any(spread > spread_tol * nearest)
        )
    return RootSet(roots=roots, residual_bound=residual_bound, clustered=clustered)


def newton_solve(
    F: Callable[[np.ndarray], np.ndarray],
    x0,
    tol: float = NEWTON_TOL,
    max_iter: int = NEWTON_MAX_ITER,
    fd_step: float = NEWTON_FD_STEP,
    max_halvings: int = NEWTON_MAX_HALVINGS,
) -> NewtonResult:
    """阻尼 Newton 法：前向差分 Jacobi 矩阵，步长减半线搜索直到 ‖F‖ 下降"""
    x = np.array(x0, dtype=float).ravel()
    f = np.asarray(F(x), dtype=float).ravel()
    if f.shape != x.shape:
        raise ValueError(f"F 的输出维数 {f.size} 与未知数个数 {x.size} 不一致")
    norm = float(np.linalg.norm(f))

    for iteration in range(max_iter + 1):
        if norm <= tol:
            return NewtonResult(x=x, iterations=iteration, residual_norm=norm)
        if iteration == max_iter:
            break
        J = np.empty((x.size, x.size))
        for i in range(x.size):
            h = fd_step * (1 + abs(x[i]))
            xp = x.copy()
            xp[i] += h
            J[:, i] = (np.asarray(F(xp), dtype=float).ravel() - f) / h
        try:
            dx = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError as e:
            raise SingularJacobianError(f"第 {iteration} 步 Jacobi 矩阵奇异") from e
        if not np.all(np.isfinite(dx)):
            raise SingularJacobianError(f"第 {iteration} 步 Newton 步长非有限")

        damping = 1.0
        for _ in range(max_halvings):
            x_new = x + damping * dx
            f_new = np.asarray(F(x_new), dtype=float).ravel()
            norm_new = float(np.linalg.norm(f_new))
            if norm_new < norm:
                break
            damping /= 2
        else:
            raise NoDecreaseError(f"第 {iteration} 步线搜索无法降低残差 (‖F‖ = {norm:.3e})")
        x, f, norm = x_new, f_new, norm_new

    raise ConvergenceError(f"Newton 在 {max_iter} 步后未收敛 (‖F‖ = {norm:.3e})")


def _safe_ratio(num: float, den: float, floor: float) -> float:
    if num == 0.0:
        return 0.0
    if abs(den) < floor:
        den = floor if den >= 0 else -floor
    return -num / den


def tridiagonal_eigenvector(H, E: float, peak: Optional[int] = None) -> np.ndarray:
    """
    由本征值 E 用双向比值递推重建三对角矩阵的本征向量，在 peak 分量处衔接。
    局域化本征向量的小分量由此保持相对精度。
    """
    H = np.asarray(H, dtype=float)
    n = H.shape[0]
    if n == 1:
        return np.ones(1)
    if peak is None:
        peak = n // 2
    d = np.diag(H) - E
    b = np.concatenate([[0.0], np.diag(H, -1), [0.0]])  # b[i] = H[i, i-1]
    floor = EPS * max(1.0, float(np.max(np.abs(H))))

    # 自上而下：rho[i] = v[i]/v[i-1]
    rho = np.zeros(n + 1)
    for i in range(n - 1, peak, -1):
        rho[i] = _safe_ratio(b[i], d[i] + b[i + 1] * rho[i + 1], floor)
    # 自下而上：sigma[i] = v[i]/v[i+1]
    sigma = np.zeros(n)
    for i in range(peak):
        prev = b[i] * sigma[i - 1] if i > 0 else 0.0
        sigma[i] = _safe_ratio(b[i + 1], d[i] + prev, floor)

    v = np.zeros(n)
    v[peak] = 1.0
    for i in range(peak + 1, n):
        v[i] = rho[i] * v[i - 1]
    for i in range(peak - 1, -1, -1):
        v[i] = sigma[i] * v[i + 1]
    return v / np.linalg.norm(v)
