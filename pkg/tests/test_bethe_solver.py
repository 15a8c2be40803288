from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from bethe_solver import (
    bae_residuals,
    energy_from_roots,
    liouville_values,
    newton_refine_bae,
    recover_roots,
    scaled_residual,
    solve_sector,
)
from errors import CoincidentRootsError, EnergyMismatchError, ModelError
from model import ModelSpec, ReferenceState, enumerate_sectors, sector_from_labels, sector_from_reference
from operator_algebra import build_hamiltonian_operator, from_polynomials
from presets import preset_params, published_polynomials
from representation import sector_matrices
from strategies import model_sectors


@pytest.fixture
def tc_triplet(tc_model):
    """j = 1、𝒩 = 2 的 Tavis-Cummings 扇区"""
    return sector_from_reference(tc_model, 1, ReferenceState(mu=Fraction(1), n_bosons=(2,)))


def test_doublet_energies(tc_model, tc_doublet):
    states = solve_sector(tc_model, tc_doublet)
    assert [s.energy for s in states] == pytest.approx([0.4, 0.6])
    for state in states:
        assert state.verified
        assert len(state.roots) == 1
        assert state.energy == pytest.approx(state.eigenvalue)
        assert state.max_scaled_residual <= 1e-6


def test_single_root_residual_is_p1(tc_model, tc_doublet):
    op = build_hamiltonian_operator(tc_model, tc_doublet)
    state = solve_sector(tc_model, tc_doublet)[0]
    residual = bae_residuals(tc_model, tc_doublet, state.roots, op)
    assert residual[0] == pytest.approx(op.coefficient(1)(state.roots[0]))
    assert abs(residual[0]) < 1e-9


def test_rigid_rotor_spin_one(rotor_model):
    energies = [s.energy for p in (0, 1) for s in solve_sector(rotor_model, sector_from_labels(rotor_model, 1, p, 0))]
    assert sorted(energies) == pytest.approx([3.0, 4.0, 5.0])


def test_decoupled_limit():
    model = ModelSpec(M=1, r=1, s=1, k=(1,), w=(1.0,), g_prime=2.0, g=0.0)
    sector = sector_from_reference(model, Fraction(1, 2), ReferenceState(mu=Fraction(1, 2), n_bosons=(0,)))
    states = solve_sector(model, sector)
    assert [s.energy for s in states] == pytest.approx([0.0, 1.0])
    assert all(s.bae_residuals is None and s.verified for s in states)
    assert states[0].degenerate_roots
    assert len(states[1].roots) == 1


def test_energy_requires_all_roots(tc_model, tc_doublet):
    with pytest.raises(ModelError):
        energy_from_roots(tc_model, tc_doublet, [])


def test_printed_bose_hubbard_operator_is_caught(bose_hubbard_model):
    params = preset_params("bose_hubbard")
    sector = sector_from_labels(bose_hubbard_model, 1, 0, 0)
    ground = solve_sector(bose_hubbard_model, sector)[0]
    assert abs(np.sum(ground.roots)) > 1e-3
    printed = from_polynomials(published_polynomials("bose_hubbard", sector, params, printed=True))
    with pytest.raises(EnergyMismatchError):
        energy_from_roots(bose_hubbard_model, sector, ground.roots, op=printed)


def test_coincident_roots_rejected(tc_model, tc_triplet):
    op = build_hamiltonian_operator(tc_model, tc_triplet)
    with pytest.raises(CoincidentRootsError):
        scaled_residual(op, [1.0 + 0j, 1.0 + 0j])


def test_newton_refinement_keeps_energy(tc_model, tc_triplet):
    plain = solve_sector(tc_model, tc_triplet)
    refined = solve_sector(tc_model, tc_triplet, refine=True)
    for a, b in zip(plain, refined):
        assert not b.refine_failed
        assert b.refined
        assert b.energy == pytest.approx(a.energy, abs=1e-8)
        assert b.max_scaled_residual <= 1e-9


def test_newton_failure_is_flagged(tc_model, tc_triplet):
    state = solve_sector(tc_model, tc_triplet)[0]
    result = newton_refine_bae(tc_model, tc_triplet, state, tol=0.0)
    assert result.refine_failed
    assert not result.refined
    np.testing.assert_array_equal(result.roots, state.roots)


def test_liouville_constant(tc_model, tc_triplet):
    op = build_hamiltonian_operator(tc_model, tc_triplet)
    for state in solve_sector(tc_model, tc_triplet):
        radius = 2.0 * max(1.0, float(np.max(np.abs(state.roots))))
        zs = radius * np.exp(1j * np.array([0.3, 1.7, 4.0]))
        np.testing.assert_allclose(liouville_values(op, state.roots, zs), state.energy, atol=1e-8)


def test_invalid_index(tc_model, tc_doublet):
    with pytest.raises(ModelError):
        recover_roots(tc_model, tc_doublet, 2)


@pytest.mark.parametrize(
    "name, j",
    [("tavis_cummings", Fraction(3, 2)), ("lmg", 3), ("bose_hubbard", Fraction(5, 2)), ("two_mode_tc", 1)],
)
def test_energies_match_sector_diagonalisation(name, j, request):
    fixtures = {
        "tavis_cummings": "tc_model",
        "lmg": "lmg_model",
        "bose_hubbard": "bose_hubbard_model",
        "two_mode_tc": "two_mode_model",
    }
    model = request.getfixturevalue(fixtures[name])
    for sector in enumerate_sectors(model, j, 2):
        energies = [s.energy for s in solve_sector(model, sector)]
        expected = np.linalg.eigvalsh(sector_matrices(model, sector).H)
        np.testing.assert_allclose(energies, expected, atol=1e-8)


def test_state_to_dict(tc_model, tc_doublet):
    data = solve_sector(tc_model, tc_doublet)[0].to_dict()
    assert data["index"] in (0, 1)
    assert data["E"] == pytest.approx(0.4)
    assert len(data["roots"]) == 1 and len(data["roots"][0]) == 2
    assert data["verified"] is True
    assert data["refined"] is False


def test_rotated_spin_has_multiple_roots():
    # g'J₀ + g(J₊+J₋) 是转动后的 J_z，ψ(z) = (z-a)^k (z-b)^{𝒩-k}
    model = ModelSpec(M=0, r=1, s=1, g_prime=1.0, g=0.5)
    sector = sector_from_labels(model, 4, 0, 0)
    states = solve_sector(model, sector)
    np.testing.assert_allclose([s.energy for s in states], np.sqrt(2.0) * np.arange(-4, 5), atol=1e-8)
    for state in states:
        assert len(state.roots) == 8
        assert state.degenerate_roots
        assert state.max_scaled_residual is None
        assert state.verified
        assert state.energy == pytest.approx(state.eigenvalue, abs=1e-8)


def test_refinement_returns_to_recovered_roots(tc_model, tc_triplet):
    for state in solve_sector(tc_model, tc_triplet):
        shifted = replace(state, roots=state.roots + 1e-3)
        refined = newton_refine_bae(tc_model, tc_triplet, shifted)
        assert refined.refined and not refined.refine_failed
        for root in state.roots:
            assert np.min(np.abs(refined.roots - root)) <= 1e-7 * max(1.0, abs(root))
        assert refined.energy == pytest.approx(state.energy, abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(model_sectors())
def test_solve_sector_on_random_models(case):
    model, sector = case
    states = solve_sector(model, sector)
    expected = np.linalg.eigvalsh(sector_matrices(model, sector).H)
    scale = max(1.0, float(np.max(np.abs(expected))))
    assert len(states) == sector.dim
    np.testing.assert_allclose([s.energy for s in states], expected, atol=1e-7 * scale)
    for state in states:
        assert len(state.roots) == sector.N
        assert np.all(np.isfinite(state.roots))
        if state.degenerate_roots:
            assert state.max_scaled_residual is None
        else:
            assert state.max_scaled_residual is not None
