from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from strategies import model_sectors

from errors import ModelError
from linalg import jacobi_eigen
from model import sector_from_labels
from representation import (
    charge_conservation,
    check_algebra,
    commutator_function,
    fock_hamiltonian,
    fock_oracle,
    lowering_square,
    match_oracle,
    monomial_conjugation_check,
    raising_square,
    schwinger_spectrum,
    sector_matrices,
    spin_matrices,
)


def test_tavis_cummings_doublet_matrix(tc_model, tc_doublet):
    mats = sector_matrices(tc_model, tc_doublet)
    np.testing.assert_allclose(mats.H, [[0.5, 0.1], [0.1, 0.5]], atol=1e-14)
    np.testing.assert_allclose(np.diag(mats.P0), [-1.25, -0.25])


@settings(max_examples=60, deadline=None)
@given(pair=model_sectors())
def test_raising_and_lowering_are_conjugate(pair):
    model, sector = pair
    for n in range(sector.N):
        assert lowering_square(model, sector, n + 1) == raising_square(model, sector, n)


@settings(max_examples=60, deadline=None)
@given(pair=model_sectors())
def test_polynomial_algebra_holds(pair):
    model, sector = pair
    diagnostics = check_algebra(model, sector)
    assert diagnostics.worst <= 1e-10
    assert diagnostics.lowest == 0.0 and diagnostics.highest == 0.0


@settings(max_examples=40, deadline=None)
@given(pair=model_sectors())
def test_monomial_conjugation(pair):
    model, sector = pair
    assert monomial_conjugation_check(model, sector) <= 1e-9


def test_printed_commutator_sign_fails_for_even_mode_count(lmg_model, tc_model):
    sector = sector_from_labels(lmg_model, 2, 0, 0)
    assert check_algebra(lmg_model, sector).commutator <= 1e-10
    assert check_algebra(lmg_model, sector, printed_sign=True).commutator > 1e-3

    tc_sector = sector_from_labels(tc_model, 1, 0, 1, q=(1,))
    for x in (Fraction(-1), Fraction(1, 3), Fraction(2)):
        assert commutator_function(tc_model, tc_sector, x) == commutator_function(
            tc_model, tc_sector, x, printed_sign=True
        )


def test_commutator_reduces_to_su2(bose_hubbard_model):
    sector = sector_from_labels(bose_hubbard_model, Fraction(3, 2), 0, 0)
    for x in (Fraction(-3, 2), Fraction(-1, 2), Fraction(5, 2)):
        difference = commutator_function(bose_hubbard_model, sector, x - 1) - commutator_function(
            bose_hubbard_model, sector, x
        )
        assert difference == 2 * x


def test_sign_flip_is_detected(lmg_model):
    sector = sector_from_labels(lmg_model, 2, 0, 0)
    mats = sector_matrices(lmg_model, sector)
    broken = replace(mats, Pminus=-mats.Pminus)
    assert check_algebra(lmg_model, sector, mats=broken).commutator > 1e-3


def test_spin_matrices():
    mus, Jp, J0 = spin_matrices(Fraction(1, 2))
    assert mus == [Fraction(-1, 2), Fraction(1, 2)]
    np.testing.assert_allclose(Jp, [[0.0, 0.0], [1.0, 0.0]])

    _, Jp, J0 = spin_matrices(Fraction(3, 2))
    Jm = Jp.T
    np.testing.assert_allclose(Jp @ Jm - Jm @ Jp, 2 * J0, atol=1e-12)


def test_fock_hamiltonian(tc_model):
    H, basis = fock_hamiltonian(tc_model, Fraction(1, 2), 2)
    assert H.shape == (6, 6)
    assert len(basis) == 6
    np.testing.assert_allclose(H, H.T)
    with pytest.raises(ModelError):
        fock_hamiltonian(tc_model, Fraction(1, 2), -1)


def test_fock_oracle_blocks(tc_model):
    blocks = fock_oracle(tc_model, Fraction(1, 2), 2, include_incomplete=True)
    assert [len(b.basis) for b in blocks] == [1, 2, 2, 1]
    assert [b.complete for b in blocks] == [True, True, True, False]
    assert len(fock_oracle(tc_model, Fraction(1, 2), 2)) == 3


def test_match_oracle_tavis_cummings(tc_model):
    result = match_oracle(tc_model, Fraction(1, 2), 2)
    assert result.blocks == 3
    assert result.passed
    assert result.max_deviation <= 1e-10


def test_match_oracle_two_mode(two_mode_model):
    result = match_oracle(two_mode_model, 1, 3)
    assert result.blocks > 0
    assert result.passed, result.mismatches


def test_charge_conservation(tc_model, k2_model):
    assert charge_conservation(tc_model, 1, 3) == 0.0
    assert charge_conservation(k2_model, 1, 3) == 0.0


@pytest.mark.parametrize("j", [Fraction(1, 2), 1, Fraction(5, 2), 3])
def test_schwinger_matches_sector_union(lmg_model, j):
    union = []
    for p in range(min(1, int(2 * Fraction(j))) + 1):
        union.extend(jacobi_eigen(sector_matrices(lmg_model, sector_from_labels(lmg_model, j, p, 0)).H).values)
    np.testing.assert_allclose(np.sort(union), schwinger_spectrum(lmg_model, j), atol=1e-10)


def test_schwinger_requires_pure_spin(tc_model):
    with pytest.raises(ModelError):
        schwinger_spectrum(tc_model, 1)
