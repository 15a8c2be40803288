#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
预设模型模块
五个具名模型（双格点 Bose-Hubbard、LMG、非对称刚性转子、Tavis-Cummings、双模 Tavis-Cummings），
它们在文献中的 P_i(z)、Bethe 方程与能量公式，以及公式勘误表
"""

from dataclasses import dataclass
from typing import Literal, Mapping, Optional, Sequence, get_args

import numpy as np

from config import PRESET_DEFAULTS
from errors import InternalError, ModelError
from model import ModelSpec, SectorLabels, effective_shift, validate_sector
from operator_algebra import Poly, raising_product
from representation import spin_matrices

PresetName = Literal["bose_hubbard", "lmg", "rigid_rotor", "tavis_cummings", "two_mode_tc"]
PRESET_NAMES: tuple[str, ...] = get_args(PresetName)

PRESET_PARAMS = {
    "bose_hubbard": ("g", "g_prime"),
    "lmg": ("g", "g_prime"),
    "rigid_rotor": ("a", "b", "c"),
    "tavis_cummings": ("w", "g_prime", "g"),
    "two_mode_tc": ("w1", "w2", "g_prime", "g"),
}

PRESET_TITLES = {
    "bose_hubbard": "双格点 Bose-Hubbard 模型",
    "lmg": "Lipkin-Meshkov-Glick 模型",
    "rigid_rotor": "非对称刚性转子",
    "tavis_cummings": "Tavis-Cummings 模型",
    "two_mode_tc": "双模广义 Tavis-Cummings 模型",
}


@dataclass(frozen=True)
class Erratum:
    """公式勘误条目：文献印刷形式与更正形式"""

    id: str
    location: str
    printed: str
    corrected: str


ERRATA: tuple[Erratum, ...] = (
    Erratum(
        id="energy-number-weight",
        location="一般能量公式中 N_i 本征值一行",
        printed="-(1/M) Σ_μ l_μ",
        corrected="-(1/M) Σ_μ μ l_μ（与 N_i 的微分实现一致，M ≥ 3 时才有区别）",
    ),
    Erratum(
        id="bose-hubbard-polynomials",
        location="Bose-Hubbard 模型的 P_1, P_0",
        printed="P_1 = g'z(1-2j) + g(1+z²), P_0 = g'j² - 2jzg",
        corrected="P_1 = g'z(1-2j) + g(1-z²), P_0 = g'j² + 2jzg",
    ),
    Erratum(
        id="lmg-rotor-bae-constant",
        location="LMG 与刚性转子 Bethe 方程右端分子",
        printed="(3+2p-4)",
        corrected="(3+2p-4j)",
    ),
    Erratum(
        id="pair-sum-orientation",
        location="Bose-Hubbard、LMG、刚性转子、Tavis-Cummings 的 Bethe 方程左端",
        printed="Σ_{i≠μ} 2/(α_i-α_μ)",
        corrected="Σ_{i≠μ} 2/(α_μ-α_i)",
    ),
    Erratum(
        id="two-mode-b-coefficient",
        location="双模 Tavis-Cummings 模型 P_0 中的系数 B",
        printed="9jκ/2",
        corrected="9jκ²/2",
    ),
    Erratum(
        id="commutator-sign",
        location="多项式代数 [𝒫₊, 𝒫₋] 的结构函数",
        printed="Ψ = ψ^{(2r)} Π_i φ^{(k_i)}",
        corrected="Ψ = (-1)^{M+1} ψ^{(2r)} Π_i φ^{(k_i)}",
    ),
)


def _require(name: str, params: Mapping[str, float]) -> dict[str, float]:
    if name not in PRESET_PARAMS:
        raise ModelError(f"未知的预设模型: {name}，可选 {', '.join(PRESET_NAMES)}")
    expected = PRESET_PARAMS[name]
    missing = [key for key in expected if key not in params]
    unknown = [key for key in params if key not in expected]
    if missing:
        raise ModelError(f"预设 {name} 缺少参数: {', '.join(missing)}")
    if unknown:
        raise ModelError(f"预设 {name} 不接受参数: {', '.join(unknown)}")
    return {key: float(params[key]) for key in expected}


def preset(name: str, params: Mapping[str, float]) -> ModelSpec:
    """由预设名与耦合参数构造 ModelSpec"""
    p = _require(name, params)
    if name == "bose_hubbard":
        return ModelSpec(M=0, r=1, s=2, g_prime=p["g_prime"], g=p["g"])
    if name == "lmg":
        return ModelSpec(M=0, r=2, s=1, g_prime=p["g_prime"], g=p["g"])
    if name == "rigid_rotor":
        a, b, c = p["a"], p["b"], p["c"]
        return ModelSpec(M=0, r=2, s=2, g_prime=(2 * c - a - b) / 2, g=(a - b) / 4, casimir_weight=(a + b) / 2)
    if name == "tavis_cummings":
        return ModelSpec(M=1, r=1, s=1, k=(1,), w=(p["w"],), g_prime=p["g_prime"], g=p["g"])
    return ModelSpec(M=2, r=1, s=1, k=(1, 1), w=(p["w1"], p["w2"]), g_prime=p["g_prime"], g=p["g"])


def preset_params(name: str, overrides: Optional[Mapping[str, float]] = None) -> dict[str, float]:
    """默认参数与用户给定参数合并"""
    if name not in PRESET_DEFAULTS:
        raise ModelError(f"未知的预设模型: {name}，可选 {', '.join(PRESET_NAMES)}")
    return {**PRESET_DEFAULTS[name], **(overrides or {})}


def _compatible(name: str, sector: SectorLabels, params: Mapping[str, float]) -> tuple[ModelSpec, dict[str, float]]:
    p = _require(name, params)
    model = preset(name, p)
    try:
        validate_sector(model, sector)
    except ModelError as e:
        raise ModelError(f"扇区与预设 {name} 不兼容: {e}") from e
    return model, p


def published_polynomials(
    name: str, sector: SectorLabels, params: Mapping[str, float], printed: bool = False
) -> list[Poly]:
    """文献给出的 [P_0, …, P_𝓜]；默认应用勘误，printed=True 返回印刷形式"""
    _, p = _compatible(name, sector, params)
    j, pp, kappa = float(sector.j), float(sector.p), float(sector.kappa)

    if name == "bose_hubbard":
        g, gp = p["g"], p["g_prime"]
        sign = 1.0 if printed else -1.0
        P0 = Poly([gp * j * j, (-2.0 if printed else 2.0) * j * g])
        P1 = Poly([g, gp * (1 - 2 * j), sign * g])
        return [P0, P1, Poly([0.0, 0.0, gp])]

    if name == "lmg":
        g, gp = p["g"], p["g_prime"]
        P0 = Poly([gp * (pp - j), g * (2 * j - pp) * (2 * j - pp - 1)])
        P1 = Poly([g * (2 + 4 * pp), 2 * gp, g * (6 + 4 * pp - 8 * j)])
        return [P0, P1, Poly([0.0, 4 * g, 0.0, 4 * g])]

    if name == "rigid_rotor":
        a, b, c = p["a"], p["b"], p["c"]
        P0 = Poly(
            [
                (2 * c - a - b) / 2 * (pp - j) ** 2 + (a + b) / 2 * j * (j + 1),
                (a - b) / 4 * (2 * j - pp) * (2 * j - pp - 1),
            ]
        )
        P1 = Poly([(a - b) / 2 * (1 + 2 * pp), 2 * (2 * c - a - b) * (1 + pp - j), (a - b) / 2 * (3 + 2 * pp - 4 * j)])
        P2 = Poly([0.0, a - b, 2 * (2 * c - a - b), a - b])
        return [P0, P1, P2]

    if name == "tavis_cummings":
        w, g, gp = p["w"], p["g"], p["g_prime"]
        P0 = Poly([w * (2 * kappa + j - 1) - gp * j, 2 * g * j * (2 * kappa + j - 1)])
        P1 = Poly([g, gp - w, -g * (3 * j + 2 * kappa - 2)])
        return [P0, P1, Poly([0.0, 0.0, 0.0, g])]

    w1, w2, g, gp = p["w1"], p["w2"], p["g"], p["g_prime"]
    l1 = float(sector.l[0])
    A = g * (-9 * j * kappa + 10 * j + 6 * kappa + l1**2 / 4 - 5 * j**2 - 4 - 9 * kappa**2 / 4)
    b_kappa = kappa if printed else kappa**2
    B = g * (9 * j * b_kappa / 2 + 6 * j**2 * kappa - 6 * j * kappa + 2 * j - j * l1**2 / 2 + 2 * j**3 - 4 * j**2)
    F = (w1 + w2) * (3 * kappa / 2 - 1 + j) + l1 / 2 * (w1 - w2) - gp * j
    return [
        Poly([F, B]),
        Poly([g, gp - w1 - w2, A]),
        Poly([0.0, 0.0, 0.0, g * (3 * kappa + 4 * j - 5)]),
        Poly([0.0, 0.0, 0.0, 0.0, -g]),
    ]


def published_energy(name: str, sector: SectorLabels, roots: Sequence[complex], params: Mapping[str, float]) -> float:
    """文献给出的能量闭式"""
    _, p = _compatible(name, sector, params)
    roots = np.asarray(roots, dtype=complex)
    if len(roots) != sector.N:
        raise ModelError(f"需要 {sector.N} 个根，实际为 {len(roots)}")
    total = complex(np.sum(roots))
    j, kappa, lam, N = float(sector.j), float(sector.kappa), sector.lam, sector.N

    if name == "bose_hubbard":
        energy = p["g_prime"] * j**2 - p["g"] * total
    elif name == "lmg":
        energy = p["g_prime"] * (j - lam) - p["g"] * (lam + 1) * (lam + 2) * total
    elif name == "rigid_rotor":
        a, b, c = p["a"], p["b"], p["c"]
        energy = (
            (2 * c - a - b) / 2 * (j - lam) ** 2
            + (a + b) / 2 * j * (j + 1)
            - (a - b) / 4 * (lam + 1) * (lam + 2) * total
        )
    elif name == "tavis_cummings":
        energy = (
            p["w"] * (2 * kappa + j - N - 1)
            + p["g_prime"] * (N - j)
            - p["g"] * (2 * j - N + 1) * (2 * kappa + j - N) * total
        )
    else:
        l1 = float(sector.l[0])
        energy = (
            (p["w1"] + p["w2"]) * (3 * kappa / 2 - 1 + j - N)
            + l1 / 2 * (p["w1"] - p["w2"])
            + p["g_prime"] * (N - j)
            - p["g"] * (2 * j - N + 1) * ((3 * kappa / 2 + j - N) ** 2 - l1**2 / 4) * total
        )
    if abs(energy.imag) > 1e-9 * max(1.0, abs(energy)):
        raise InternalError(f"文献能量公式给出复数: {energy}")
    return float(energy.real)


def _pair_sums(roots: np.ndarray, printed: bool) -> tuple[np.ndarray, np.ndarray]:
    diff = roots[:, None] - roots[None, :]
    if printed:
        diff = -diff
    np.fill_diagonal(diff, np.inf)
    return np.sum(2.0 / diff, axis=1), np.sum(np.abs(2.0 / diff), axis=1)


def _terms(*terms: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """多项之和及其绝对值之和"""
    return sum(terms), sum(np.abs(t) for t in terms)


def published_bae_sides(
    name: str, sector: SectorLabels, roots: Sequence[complex], params: Mapping[str, float], printed: bool = False
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """文献 Bethe 方程的左端、右端，以及各项绝对值之和（用于缩放残差），逐个根求值"""
    _, p = _compatible(name, sector, params)
    alpha = np.asarray(roots, dtype=complex)
    j, pp, kappa = float(sector.j), float(sector.p), float(sector.kappa)

    if name == "two_mode_tc":
        g = p["g"]
        lhs = np.zeros(len(alpha), dtype=complex)
        lhs_abs = np.zeros(len(alpha))
        for beta, a in enumerate(alpha):
            inverse = 1.0 / (a - np.delete(alpha, beta))
            pairs = (np.sum(inverse) ** 2 - np.sum(inverse**2)) / 2
            pairs_abs = (np.sum(np.abs(inverse)) ** 2 - np.sum(np.abs(inverse) ** 2)) / 2
            first = 6 * g * a**4 * pairs
            outer = 2 * g * (3 * kappa + 4 * j - 5) * a**3
            second = outer * np.sum(inverse)
            lhs[beta] = first - second
            lhs_abs[beta] = abs(6 * g * a**4) * pairs_abs + abs(outer) * np.sum(np.abs(inverse))
        l1 = float(sector.l[0])
        A = g * (-9 * j * kappa + 10 * j + 6 * kappa + l1**2 / 4 - 5 * j**2 - 4 - 9 * kappa**2 / 4)
        rhs, rhs_abs = _terms(A * alpha**2, (p["g_prime"] - p["w1"] - p["w2"]) * alpha, np.full_like(alpha, g))
        return lhs, rhs, lhs_abs + rhs_abs

    lhs, lhs_abs = _pair_sums(alpha, printed)
    if name == "bose_hubbard":
        g, gp = p["g"], p["g_prime"]
        quadratic = (1.0 if printed else -1.0) * g
        num, num_abs = _terms(gp * (1 - 2 * j) * alpha, np.full_like(alpha, g), quadratic * alpha**2)
        den = -gp * alpha**2
    elif name == "lmg":
        g, gp = p["g"], p["g_prime"]
        top = 3 + 2 * pp - (4 if printed else 4 * j)
        num, num_abs = _terms(g * top * alpha**2, gp * alpha, np.full_like(alpha, g * (1 + 2 * pp)))
        den = -2 * g * (alpha**3 + alpha)
    elif name == "rigid_rotor":
        a, b, c = p["a"], p["b"], p["c"]
        top = 3 + 2 * pp - (4 if printed else 4 * j)
        num, num_abs = _terms(
            (a - b) * top * alpha**2,
            4 * (2 * c - a - b) * (1 + pp - j) * alpha,
            np.full_like(alpha, (a - b) * (1 + 2 * pp)),
        )
        den = -(2 * (a - b) * (alpha**3 + alpha) + 4 * (2 * c - a - b) * alpha**2)
    else:
        g, gp, w = p["g"], p["g_prime"], p["w"]
        num, num_abs = _terms(g * (3 * j + 2 * kappa - 2) * alpha**2, -(gp - w) * alpha, np.full_like(alpha, -g))
        den = g * alpha**3
    return lhs, num / den, lhs_abs + num_abs / np.abs(den)


def published_bae_residuals(
    name: str, sector: SectorLabels, roots: Sequence[complex], params: Mapping[str, float], printed: bool = False
) -> np.ndarray:
    """左端减右端，按各项绝对值之和缩放"""
    lhs, rhs, weight = published_bae_sides(name, sector, roots, params, printed)
    return np.abs(lhs - rhs) / np.maximum(weight, np.finfo(float).tiny)


def printed_general_energy(model: ModelSpec, sector: SectorLabels, roots: Sequence[complex]) -> float:
    """一般能量公式的印刷形式：N_i 本征值一行中 l_μ 不带权重 μ"""
    M, r, N = model.M, model.r, sector.N
    total = complex(np.sum(np.asarray(roots, dtype=complex)))
    bosons = 0.0
    for i, (k, w) in enumerate(zip(model.k, model.w)):
        inner = (
            (M + 1) / M * float(sector.kappa)
            - float(sector.p - sector.j) / r
            - N
            - sum(float(x) for x in sector.l) / M
            + sum(float(x) for x in sector.l[i:])
        )
        bosons += w * (k * inner - 1 / k)
    spin = model.g_prime * float((r * N - sector.j + sector.p) ** model.s)
    lift = model.g * float(raising_product(model, sector, N - 1)) if N else 0.0
    return float((bosons + spin - lift * total).real) + effective_shift(model, sector.j)


def rigid_rotor_matrix(a: float, b: float, c: float, j) -> np.ndarray:
    """直接构造 aJx² + bJy² + cJz²，其中 Jy² = -(J₊-J₋)²/4"""
    _, Jp, J0 = spin_matrices(j)
    Jm = Jp.T
    Jx = (Jp + Jm) / 2
    Jy2 = -((Jp - Jm) @ (Jp - Jm)) / 4
    return a * Jx @ Jx + b * Jy2 + c * J0 @ J0
