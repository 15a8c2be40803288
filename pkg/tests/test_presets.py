from fractions import Fraction

import numpy as np
import pytest

from bethe_solver import energy_from_roots, solve_sector
from errors import ModelError
from model import ReferenceState, enumerate_sectors, sector_from_labels, sector_from_reference
from operator_algebra import build_hamiltonian_operator, extract_polynomials
from presets import (
    ERRATA,
    PRESET_NAMES,
    preset,
    preset_params,
    printed_general_energy,
    published_bae_residuals,
    published_energy,
    published_polynomials,
    rigid_rotor_matrix,
)

SPINS = {
    "bose_hubbard": [Fraction(1, 2), 1, Fraction(5, 2)],
    "lmg": [1, Fraction(3, 2), 3],
    "rigid_rotor": [1, Fraction(3, 2), 2],
    "tavis_cummings": [Fraction(1, 2), 1, Fraction(3, 2)],
    "two_mode_tc": [Fraction(1, 2), 1],
}


def preset_sectors(name):
    model = preset(name, preset_params(name))
    for j in SPINS[name]:
        for sector in enumerate_sectors(model, j, 2):
            yield model, sector


def test_preset_mapping():
    tc = preset("tavis_cummings", {"w": 1.5, "g_prime": 0.5, "g": 0.2})
    assert (tc.M, tc.r, tc.s, tc.k, tc.w) == (1, 1, 1, (1,), (1.5,))

    rotor = preset("rigid_rotor", {"a": 1.0, "b": 2.0, "c": 3.0})
    assert (rotor.M, rotor.r, rotor.s) == (0, 2, 2)
    assert rotor.g_prime == pytest.approx(1.5)
    assert rotor.g == pytest.approx(-0.25)
    assert rotor.casimir_weight == pytest.approx(1.5)

    two_mode = preset("two_mode_tc", preset_params("two_mode_tc"))
    assert two_mode.k == (1, 1) and two_mode.w == (1.0, 1.5)


def test_preset_params_merge():
    assert preset_params("lmg", {"g": 0.7}) == {"g": 0.7, "g_prime": 1.0}
    with pytest.raises(ModelError):
        preset_params("dicke")


@pytest.mark.parametrize(
    "name, params",
    [
        ("lmg", {"g": 1.0}),
        ("lmg", {"g": 1.0, "g_prime": 1.0, "w": 2.0}),
        ("ising", {"g": 1.0}),
    ],
)
def test_preset_rejects_bad_params(name, params):
    with pytest.raises(ModelError):
        preset(name, params)


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_published_polynomials_match_operator(name):
    params = preset_params(name)
    for model, sector in preset_sectors(name):
        ours = extract_polynomials(build_hamiltonian_operator(model, sector))
        theirs = published_polynomials(name, sector, params)
        assert len(ours) == len(theirs)
        for a, b in zip(ours, theirs):
            assert a.allclose(b), (sector.to_dict(), a, b)


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_published_energy_and_bae(name):
    params = preset_params(name)
    for model, sector in preset_sectors(name):
        for state in solve_sector(model, sector):
            if state.degenerate_roots:
                continue
            assert published_energy(name, sector, state.roots, params) == pytest.approx(state.energy, abs=1e-8)
            if sector.N:
                assert np.max(published_bae_residuals(name, sector, state.roots, params)) <= 1e-6


def test_printed_bose_hubbard_polynomials_differ(bose_hubbard_model):
    params = preset_params("bose_hubbard")
    sector = sector_from_labels(bose_hubbard_model, 1, 0, 0)
    ours = extract_polynomials(build_hamiltonian_operator(bose_hubbard_model, sector))
    printed = published_polynomials("bose_hubbard", sector, params, printed=True)
    assert not ours[0].allclose(printed[0])
    assert not ours[1].allclose(printed[1])


def test_printed_pair_orientation_fails(tc_model):
    params = preset_params("tavis_cummings")
    sector = sector_from_reference(tc_model, 1, ReferenceState(mu=Fraction(1), n_bosons=(1,)))
    assert sector.N == 2
    for state in solve_sector(tc_model, sector):
        assert np.max(published_bae_residuals("tavis_cummings", sector, state.roots, params)) <= 1e-6
        assert np.max(published_bae_residuals("tavis_cummings", sector, state.roots, params, printed=True)) > 1e-3


def test_printed_two_mode_coefficient_differs(two_mode_model):
    params = preset_params("two_mode_tc")
    sector = sector_from_reference(two_mode_model, Fraction(1, 2), ReferenceState(mu=Fraction(1, 2), n_bosons=(1, 1)))
    assert sector.kappa == Fraction(5, 3)
    corrected = published_polynomials("two_mode_tc", sector, params)
    printed = published_polynomials("two_mode_tc", sector, params, printed=True)
    assert not corrected[0].allclose(printed[0])
    assert corrected[1].allclose(printed[1])


def test_general_energy_weight_only_matters_from_three_modes(two_mode_model):
    sector = sector_from_reference(two_mode_model, 1, ReferenceState(mu=Fraction(0), n_bosons=(1, 2)))
    for state in solve_sector(two_mode_model, sector):
        if state.degenerate_roots:
            continue
        printed = printed_general_energy(two_mode_model, sector, state.roots)
        assert printed == pytest.approx(energy_from_roots(two_mode_model, sector, state.roots), abs=1e-9)


def test_errata_ids_unique():
    ids = [e.id for e in ERRATA]
    assert len(ids) == 6
    assert len(set(ids)) == len(ids)


def test_rigid_rotor_matrix():
    H = rigid_rotor_matrix(1.0, 2.0, 3.0, 1)
    np.testing.assert_allclose(H, H.T, atol=1e-14)
    assert np.linalg.eigvalsh(H) == pytest.approx([3.0, 4.0, 5.0])


def test_incompatible_sector(tc_doublet):
    with pytest.raises(ModelError):
        published_polynomials("lmg", tc_doublet, preset_params("lmg"))
    with pytest.raises(ModelError):
        published_energy("tavis_cummings", tc_doublet, [], preset_params("tavis_cummings"))
