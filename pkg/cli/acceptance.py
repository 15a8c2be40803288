from fractions import Fraction
from functools import partial
from math import perm
from typing import Callable, Iterable, Optional

import numpy as np
from rich.console import Console

from bethe_solver import energy_from_roots, liouville_values, solve_sector
from config import COUPLING_RANGE, DEFAULT_SEED, MAX_SECTOR_SIZE, PRESET_GRIDS, RANDOM_DRAWS
from errors import NumericalError, SpinBosonError
from linalg import jacobi_eigen
from model import ModelSpec, ReferenceState, SectorLabels, enumerate_sectors, sector_from_labels, sector_from_reference
from operator_algebra import (
    EulerOperator,
    apply_to_monomials,
    build_hamiltonian_operator,
    extract_polynomials,
    from_polynomials,
    overflow_coefficient,
)
from presets import (
    ERRATA,
    PRESET_NAMES,
    PRESET_PARAMS,
    preset,
    preset_params,
    printed_general_energy,
    published_bae_residuals,
    published_energy,
    published_polynomials,
    rigid_rotor_matrix,
)
from representation import (
    SectorMatrices,
    charge_conservation,
    check_algebra,
    match_oracle,
    monomial_conjugation_check,
    schwinger_spectrum,
    sector_matrices,
)

from .schema import CheckResult, ErratumReport, RunConfig, Tolerances, VerificationReport

console = Console(stderr=True)

MatricesHook = Callable[[SectorMatrices], SectorMatrices]

# 能量公式、文献公式与 Liouville 常数性检查的固定阈值
ENERGY_TOL = 1e-9
POLY_TOL = 1e-10
CONJUGATION_TOL = 1e-9
LIOUVILLE_TOL = 1e-6
DEGENERATE_FRACTION = 0.02


def _check(name: str, scope: str, deviation: Optional[float], tol: float, detail: str = "") -> CheckResult:
    passed = deviation is not None and bool(np.isfinite(deviation) and deviation <= tol)
    return CheckResult(name=name, scope=scope, max_deviation=deviation, tolerance=tol, passed=passed, detail=detail)


def _failed(name: str, scope: str, tol: float, error: Exception) -> CheckResult:
    return CheckResult(name=name, scope=scope, max_deviation=None, tolerance=tol, passed=False, detail=str(error))


def _relative(a, b) -> float:
    a, b = np.sort(np.asarray(a, dtype=float)), np.sort(np.asarray(b, dtype=float))
    if a.shape != b.shape:
        return float("inf")
    if not a.size:
        return 0.0
    return float(np.max(np.abs(a - b))) / max(1.0, float(np.max(np.abs(a))))


def random_params(name: str, rng: np.random.Generator) -> dict[str, float]:
    """耦合参数绝对值在 COUPLING_RANGE 内均匀抽取，g 与 g' 的符号随机"""
    low, high = COUPLING_RANGE
    params = {}
    for key in PRESET_PARAMS[name]:
        value = float(rng.uniform(low, high))
        if key in ("g", "g_prime") and rng.random() < 0.5:
            value = -value
        params[key] = value
    return params


def _spins(grid: dict) -> list[Fraction]:
    return [Fraction(two_j, 2) for two_j in grid["two_j"]]


def check_oracle_equivalence(
    name: str, params: dict[str, float], tolerances: Tolerances, grid: Optional[dict] = None
) -> list[CheckResult]:
    """扇区对角化、Bethe 能量与 Fock 块（M=0 时再加 Schwinger 实现）三方比对"""
    grid = grid or PRESET_GRIDS[name]
    model = preset(name, params)
    scope = name + " " + ", ".join(f"{k}={v:.3g}" for k, v in params.items())
    sector_dev, fock_dev, bae_worst = 0.0, 0.0, 0.0
    states_total, degenerate = 0, 0
    problems: list[str] = []

    try:
        for j in _spins(grid):
            union = []
            for sector in enumerate_sectors(model, j, grid["max_bosons"]):
                if sector.N > MAX_SECTOR_SIZE:
                    continue
                eig = jacobi_eigen(sector_matrices(model, sector).H, tol=tolerances.eigen)
                states = solve_sector(
                    model, sector, root_tol=tolerances.roots, bae_tol=tolerances.bae, eigen_tol=tolerances.eigen
                )
                sector_dev = max(sector_dev, _relative([s.energy for s in states], eig.values))
                union.extend(eig.values)
                for state in states:
                    states_total += 1
                    if state.degenerate_roots:
                        degenerate += 1
                    elif state.max_scaled_residual is not None:
                        bae_worst = max(bae_worst, state.max_scaled_residual)

            match = match_oracle(model, j, grid["fock_cap"], tol=tolerances.match)
            fock_dev = max(fock_dev, match.max_deviation)
            problems.extend(f"j={j}: {m}" for m in match.mismatches)
            if model.M == 0:
                fock_dev = max(fock_dev, _relative(union, schwinger_spectrum(model, j)))
    except SpinBosonError as e:
        return [_failed("能谱一致性", scope, tolerances.match, e)]

    fraction = degenerate / states_total if states_total else 0.0
    return [
        _check("能谱一致性(扇区)", scope, sector_dev, tolerances.match),
        _check("能谱一致性(Fock)", scope, fock_dev if not problems else None, tolerances.match, "; ".join(problems)),
        _check("Bethe 方程残差", scope, bae_worst, tolerances.bae),
        _check("退化根比例", scope, fraction, DEGENERATE_FRACTION, f"{degenerate}/{states_total}"),
    ]


def check_charge_conservation(
    name: str, params: dict[str, float], tolerances: Tolerances, grid: Optional[dict] = None
) -> list[CheckResult]:
    grid = grid or PRESET_GRIDS[name]
    model = preset(name, params)
    worst = max(charge_conservation(model, j, grid["fock_cap"]) for j in _spins(grid))
    return [_check("守恒荷对易", name, worst, tolerances.algebra)]


def random_model(rng: np.random.Generator) -> ModelSpec:
    M = int(rng.integers(0, 3))
    low, high = COUPLING_RANGE
    return ModelSpec(
        M=M,
        r=int(rng.integers(1, 4)),
        s=int(rng.integers(1, 4)),
        k=tuple(int(x) for x in rng.integers(1, 4, size=M)),
        w=tuple(float(x) for x in rng.uniform(low, high, size=M)),
        g_prime=float(rng.uniform(low, high)),
        g=float(rng.uniform(low, high)) * (1 if rng.random() < 0.5 else -1),
    )


def random_sector(model: ModelSpec, rng: np.random.Generator, max_n: int = 10) -> SectorLabels:
    """随机参考态所在扇区，直到 𝒩 ≤ max_n"""
    while True:
        j = Fraction(int(rng.integers(0, 9)), 2)
        mu = -j + int(rng.integers(0, int(2 * j) + 1))
        bosons = tuple(int(x) for x in rng.integers(0, 7, size=model.M))
        sector = sector_from_reference(model, j, ReferenceState(mu=mu, n_bosons=bosons))
        if sector.N <= max_n:
            return sector


def overflow_scale(op: EulerOperator, n: int) -> float:
    """z^{n+1} 溢出系数各项绝对值之和"""
    total = 0.0
    for d, poly in op.terms.items():
        if d <= n and len(poly.coeffs) > d + 1:
            total += abs(poly.coeffs[d + 1]) * perm(n, d)
    return total


def check_algebra_random(
    rng: np.random.Generator, count: int, tolerances: Tolerances, hook: Optional[MatricesHook] = None
) -> list[CheckResult]:
    """随机 (模型, 扇区) 上的代数关系、准精确可解性与单项式共轭检查"""
    algebra, gap_ok, qes, closed_form, conjugation = 0.0, True, 0.0, 0.0, 0.0
    detail = ""
    for _ in range(count):
        model = random_model(rng)
        sector = random_sector(model, rng)
        mats = sector_matrices(model, sector)
        diagnostics = check_algebra(model, sector, mats=hook(mats) if hook else mats)
        if diagnostics.worst > algebra:
            algebra = diagnostics.worst
            detail = f"M={model.M} r={model.r} s={model.s} k={model.k} 扇区 {sector.to_dict()}"
        if sector.dim > 1 and diagnostics.min_gap <= 0.0:
            gap_ok = False

        op = build_hamiltonian_operator(model, sector)
        mono = apply_to_monomials(op, sector.N)
        qes = max(qes, abs(mono[-1, -1]) / max(1.0, overflow_scale(op, sector.N)))
        for n in range(sector.N):
            expected = overflow_coefficient(model, sector, n)
            closed_form = max(closed_form, abs(mono[n + 1, n] - expected) / max(1.0, abs(expected)))
        conjugation = max(conjugation, monomial_conjugation_check(model, sector, op=op, mats=mats))

    scope = f"{count} 个随机模型"
    return [
        _check("多项式代数对易关系", scope, algebra, tolerances.algebra, detail),
        _check("谱无简并", scope, 0.0 if gap_ok else None, 0.0),
        _check("准精确可解溢出", scope, qes, tolerances.qes),
        _check("溢出系数闭式", scope, closed_form, tolerances.qes),
        _check("单项式共轭", scope, conjugation, CONJUGATION_TOL),
    ]


def check_branching(max_r: int = 4, max_two_j: int = 12) -> CheckResult:
    """M=0 时各扇区维数之和等于 2j+1"""
    worst = 0
    for r in range(1, max_r + 1):
        model = ModelSpec(M=0, r=r, s=1, g_prime=1.0, g=1.0)
        for two_j in range(max_two_j + 1):
            j = Fraction(two_j, 2)
            total = sum(sector_from_labels(model, j, p, 0).dim for p in range(min(r - 1, two_j) + 1))
            worst = max(worst, abs(total - (two_j + 1)))
    return _check("分支规则", f"M=0, r≤{max_r}, 2j≤{max_two_j}", float(worst), 0.0)


def check_published(
    name: str, params: dict[str, float], tolerances: Tolerances, grid: Optional[dict] = None
) -> list[CheckResult]:
    """P_i(z)、能量与 Bethe 方程的文献公式回归"""
    grid = grid or PRESET_GRIDS[name]
    model = preset(name, params)
    poly_dev, energy_dev, bae_dev = 0.0, 0.0, 0.0
    for j in _spins(grid)[:6]:
        for sector in enumerate_sectors(model, j, grid["max_bosons"]):
            if sector.N > MAX_SECTOR_SIZE:
                continue
            ours = extract_polynomials(build_hamiltonian_operator(model, sector))
            theirs = published_polynomials(name, sector, params)
            for d in range(max(len(ours), len(theirs))):
                a = ours[d] if d < len(ours) else theirs[d].scale(0.0)
                b = theirs[d] if d < len(theirs) else ours[d].scale(0.0)
                scale = max(1.0, a.max_abs(), b.max_abs())
                poly_dev = max(poly_dev, (a - b).max_abs() / scale)
            for state in solve_sector(model, sector):
                if state.degenerate_roots:
                    continue
                published = published_energy(name, sector, state.roots, params)
                energy_dev = max(energy_dev, abs(published - state.energy) / max(1.0, abs(state.energy)))
                if sector.N:
                    residuals = published_bae_residuals(name, sector, state.roots, params)
                    bae_dev = max(bae_dev, float(np.max(residuals)))
    return [
        _check("文献 P_i(z)", name, poly_dev, POLY_TOL),
        _check("文献能量公式", name, energy_dev, ENERGY_TOL),
        _check("文献 Bethe 方程", name, bae_dev, tolerances.bae),
    ]


def _state_roots(model: ModelSpec, sector: SectorLabels):
    return [s for s in solve_sector(model, sector) if not s.degenerate_roots]


def _bae_gap(name: str, sector: SectorLabels, params: dict[str, float], printed: bool) -> float:
    model = preset(name, params)
    worst = 0.0
    for state in _state_roots(model, sector):
        residuals = published_bae_residuals(name, sector, state.roots, params, printed=printed)
        worst = max(worst, float(np.max(residuals)))
    return worst


def confirm_errata(rng: np.random.Generator, tolerances: Tolerances) -> list[ErratumReport]:
    """每条勘误：印刷形式在数值检查中失败，更正形式通过"""
    outcome: dict[str, tuple[bool, bool]] = {}

    # 一般能量公式：M=3 且 l_2 ≠ 0 时两种权重不同
    model = ModelSpec(
        M=3, r=1, s=1, k=(1, 1, 1), w=tuple(float(x) for x in rng.uniform(0.5, 2.0, size=3)), g_prime=0.7, g=0.3
    )
    sector = sector_from_reference(model, Fraction(1, 2), ReferenceState(mu=Fraction(1, 2), n_bosons=(0, 0, 1)))
    eig = jacobi_eigen(sector_matrices(model, sector).H)
    states = solve_sector(model, sector)
    printed = max(abs(printed_general_energy(model, sector, s.roots) - s.eigenvalue) for s in states)
    corrected = max(abs(energy_from_roots(model, sector, s.roots) - s.eigenvalue) for s in states)
    scale = max(1.0, float(np.max(np.abs(eig.values))))
    outcome["energy-number-weight"] = (printed / scale > tolerances.match, corrected / scale <= tolerances.match)

    # Bose-Hubbard 的 P_1, P_0：代回扇区矩阵做单项式共轭
    params = random_params("bose_hubbard", rng)
    model = preset("bose_hubbard", params)
    sector = sector_from_labels(model, 1, 0, 0)
    printed_op = from_polynomials(published_polynomials("bose_hubbard", sector, params, printed=True))
    corrected_op = from_polynomials(published_polynomials("bose_hubbard", sector, params))
    outcome["bose-hubbard-polynomials"] = (
        monomial_conjugation_check(model, sector, op=printed_op) > CONJUGATION_TOL,
        monomial_conjugation_check(model, sector, op=corrected_op) <= CONJUGATION_TOL,
    )

    # LMG 与刚性转子的 (3+2p-4j)：取 𝒩=1 的扇区，与求和方向无关
    confirmed = []
    for name in ("lmg", "rigid_rotor"):
        params = random_params(name, rng)
        sector = sector_from_labels(preset(name, params), Fraction(3, 2), 1, 0)
        printed_gap = _bae_gap(name, sector, params, printed=True)
        corrected_gap = _bae_gap(name, sector, params, printed=False)
        confirmed.append((printed_gap > tolerances.bae, corrected_gap <= tolerances.bae))
    outcome["lmg-rotor-bae-constant"] = (all(c[0] for c in confirmed), all(c[1] for c in confirmed))

    # 求和方向：Tavis-Cummings 的 𝒩=2 扇区只在方向上有区别
    params = random_params("tavis_cummings", rng)
    model = preset("tavis_cummings", params)
    sector = sector_from_reference(model, 1, ReferenceState(mu=Fraction(1), n_bosons=(1,)))
    outcome["pair-sum-orientation"] = (
        _bae_gap("tavis_cummings", sector, params, printed=True) > tolerances.bae,
        _bae_gap("tavis_cummings", sector, params, printed=False) <= tolerances.bae,
    )

    # 双模 Tavis-Cummings 的 B：κ = 5/3 的 𝒩=1 扇区
    params = random_params("two_mode_tc", rng)
    model = preset("two_mode_tc", params)
    sector = sector_from_reference(model, Fraction(1, 2), ReferenceState(mu=Fraction(1, 2), n_bosons=(1, 1)))
    printed_op = from_polynomials(published_polynomials("two_mode_tc", sector, params, printed=True))
    corrected_op = from_polynomials(published_polynomials("two_mode_tc", sector, params))
    outcome["two-mode-b-coefficient"] = (
        monomial_conjugation_check(model, sector, op=printed_op) > CONJUGATION_TOL,
        monomial_conjugation_check(model, sector, op=corrected_op) <= CONJUGATION_TOL,
    )

    # [𝒫₊, 𝒫₋] 的整体符号：M=0 时印刷形式给出 -2J₀
    model = preset("lmg", random_params("lmg", rng))
    sector = sector_from_labels(model, 2, 0, 0)
    outcome["commutator-sign"] = (
        check_algebra(model, sector, printed_sign=True).commutator > tolerances.algebra,
        check_algebra(model, sector).commutator <= tolerances.algebra,
    )

    return [
        ErratumReport(
            id=e.id,
            location=e.location,
            printed=e.printed,
            corrected=e.corrected,
            confirmed=all(outcome.get(e.id, (False, False))),
        )
        for e in ERRATA
    ]


def check_rigid_rotor(rng: np.random.Generator, draws: int = 5, max_two_j: int = 12) -> list[CheckResult]:
    """扇区 Bethe 能量之并与 aJx²+bJy²+cJz² 直接对角化比对，并检查 j=1 的解析结果"""
    worst = 0.0
    for _ in range(draws):
        a, b, c = (float(x) for x in rng.uniform(*COUPLING_RANGE, size=3))
        model = preset("rigid_rotor", {"a": a, "b": b, "c": c})
        for two_j in range(max_two_j + 1):
            j = Fraction(two_j, 2)
            sectors = [sector_from_labels(model, j, p, 0) for p in range(min(1, two_j) + 1)]
            energies = [s.energy for sector in sectors for s in solve_sector(model, sector)]
            worst = max(worst, _relative(energies, jacobi_eigen(rigid_rotor_matrix(a, b, c, j)).values))

    a, b, c = 1.0, 2.0, 3.0
    model = preset("rigid_rotor", {"a": a, "b": b, "c": c})
    energies = [s.energy for p in (0, 1) for s in solve_sector(model, sector_from_labels(model, 1, p, 0))]
    analytic = _relative(energies, [a + b, b + c, a + c])
    return [
        _check("刚性转子直接对角化", f"{draws} 组 (a,b,c), 2j≤{max_two_j}", worst, ENERGY_TOL),
        _check("刚性转子 j=1 解析谱", "a=1, b=2, c=3", analytic, ENERGY_TOL),
    ]


def check_liouville(rng: np.random.Generator, count: int = 20) -> CheckResult:
    """Hψ/ψ 在远离根的随机点上为常数，且等于能量"""
    worst = 0.0
    found = 0
    names = ["tavis_cummings", "two_mode_tc", "lmg", "bose_hubbard", "rigid_rotor"]
    attempts = 0
    while found < count and attempts < 20 * count:
        attempts += 1
        name = names[int(rng.integers(len(names)))]
        params = random_params(name, rng)
        model = preset(name, params)
        grid = PRESET_GRIDS[name]
        j = _spins(grid)[int(rng.integers(min(len(grid["two_j"]), 6)))]
        sectors = [s for s in enumerate_sectors(model, j, grid["max_bosons"]) if 1 <= s.N <= 8]
        if not sectors:
            continue
        sector = sectors[int(rng.integers(len(sectors)))]
        states = [s for s in solve_sector(model, sector) if s.verified and not s.degenerate_roots]
        if not states:
            continue
        state = states[int(rng.integers(len(states)))]
        op = build_hamiltonian_operator(model, sector)
        radius = 1.5 * max(1.0, float(np.max(np.abs(state.roots))))
        zs = radius * np.exp(2j * np.pi * rng.random(5))
        values = liouville_values(op, state.roots, zs)
        worst = max(worst, float(np.max(np.abs(values - state.energy))) / max(1.0, abs(state.energy)))
        found += 1
    return _check("Liouville 常数性", f"{found} 个态", worst if found == count else None, LIOUVILLE_TOL)


def _guarded(name: str, tol: float, run: Callable[[], Iterable[CheckResult]]) -> list[CheckResult]:
    try:
        return list(run())
    except (NumericalError, SpinBosonError) as e:
        return [_failed(name, "-", tol, e)]


def run_verification(
    config: RunConfig,
    hook: Optional[MatricesHook] = None,
    grids: Optional[dict[str, dict]] = None,
    algebra_samples: int = 100,
) -> VerificationReport:
    """完整验证：预设三方比对、代数关系、分支规则、文献公式回归、勘误确认、刚性转子与 Liouville 检查"""
    tolerances = config.tolerances
    rng = np.random.default_rng(config.seed if config.seed is not None else DEFAULT_SEED)
    draws = config.draws or RANDOM_DRAWS
    grids = grids or PRESET_GRIDS

    if config.preset is not None:
        runs = [(config.preset.name, [preset_params(config.preset.name, config.preset.params)])]
    else:
        runs = [(name, [random_params(name, rng) for _ in range(draws)]) for name in PRESET_NAMES]

    checks: list[CheckResult] = []
    for name, draws_for_name in runs:
        console.print(f"[cyan]• 比对预设 {name}（{len(draws_for_name)} 组耦合）[/cyan]")
        for params in draws_for_name:
            checks.extend(check_oracle_equivalence(name, params, tolerances, grid=grids.get(name)))
        first, grid = draws_for_name[0], grids.get(name)
        checks.extend(_guarded("文献公式", POLY_TOL, partial(check_published, name, first, tolerances, grid)))
        conservation = partial(check_charge_conservation, name, first, tolerances, grid)
        checks.extend(_guarded("守恒荷对易", tolerances.algebra, conservation))

    console.print("[cyan]• 随机模型代数检查[/cyan]")
    algebra = partial(check_algebra_random, rng, algebra_samples, tolerances, hook)
    checks.extend(_guarded("代数关系", tolerances.algebra, algebra))
    checks.append(check_branching())
    console.print("[cyan]• 刚性转子与 Liouville 检查[/cyan]")
    checks.extend(_guarded("刚性转子", ENERGY_TOL, lambda: check_rigid_rotor(rng)))
    checks.extend(_guarded("Liouville", LIOUVILLE_TOL, lambda: [check_liouville(rng)]))

    try:
        errata = confirm_errata(rng, tolerances)
    except SpinBosonError as e:
        console.print(f"[red]✗ 勘误确认失败: {e}[/red]")
        errata = [
            ErratumReport(id=x.id, location=x.location, printed=x.printed, corrected=x.corrected, confirmed=False)
            for x in ERRATA
        ]
    passed = all(c.passed for c in checks) and all(e.confirmed for e in errata)
    return VerificationReport(passed=passed, checks=checks, errata=errata)
