from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import models, references

from errors import ModelError
from model import (
    ModelSpec,
    ReferenceState,
    basis_state,
    effective_shift,
    enumerate_sectors,
    find_sector,
    lambda_of,
    number_eigenvalue,
    sector_dimension,
    sector_from_labels,
    sector_from_reference,
    validate_model,
    validate_sector,
)


def test_validate_model_accepts_tavis_cummings_shape():
    spec = ModelSpec(M=1, r=1, s=1, k=(1,), w=(1.0,), g_prime=0.5, g=0.1)
    assert validate_model(spec) is spec


def test_validate_model_accepts_lmg_shape():
    spec = validate_model({"M": 0, "r": 2, "s": 1, "g_prime": 1.0, "g": 0.2})
    assert spec.k == () and spec.r == 2


@pytest.mark.parametrize(
    "raw",
    [
        {"M": 2, "r": 1, "s": 1, "k": [1], "w": [1.0, 2.0]},
        {"M": 0, "r": 0, "s": 1},
        {"M": 0, "r": 1, "s": 0},
        {"M": 1, "r": 1, "s": 1, "k": [0], "w": [1.0]},
    ],
)
def test_validate_model_rejects_invalid(raw):
    with pytest.raises(ModelError):
        validate_model(raw)


@pytest.mark.parametrize(
    "j, p, r, expected",
    [(1, 0, 1, 0), (Fraction(3, 2), 0, 2, 1), (2, 1, 2, 1), (Fraction(5, 2), 2, 3, 0)],
)
def test_lambda_of(j, p, r, expected):
    assert lambda_of(j, p, r) == expected


def test_lambda_of_rejects_p_out_of_range():
    with pytest.raises(ModelError):
        lambda_of(Fraction(1, 2), 2, 3)
    with pytest.raises(ModelError):
        lambda_of(1, 2, 2)


def test_sector_from_reference_tavis_cummings(tc_model):
    sector = sector_from_reference(tc_model, 1, ReferenceState(mu=Fraction(-1), n_bosons=(2,)))
    assert sector.p == 0
    assert sector.q == (Fraction(1),)
    assert sector.kappa == 1
    assert sector.A == (Fraction(2),)
    assert sector.N == 2 and sector.dim == 3


def test_sector_from_reference_single_state(tc_model):
    sector = sector_from_reference(tc_model, Fraction(1, 2), ReferenceState(mu=Fraction(-1, 2), n_bosons=(0,)))
    assert sector.kappa == Fraction(1, 4)
    assert sector.A == (Fraction(0),)
    assert sector.dim == 1


def test_sector_from_reference_m0(bose_hubbard_model):
    j = Fraction(3, 2)
    sector = sector_from_reference(bose_hubbard_model, j, ReferenceState(mu=-j, n_bosons=()))
    assert sector.p == 0 and sector.kappa == 0
    assert sector.N == 3


def test_sector_from_reference_rejects_bad_reference(tc_model):
    with pytest.raises(ModelError):
        sector_from_reference(tc_model, 1, ReferenceState(mu=Fraction(2), n_bosons=(0,)))
    with pytest.raises(ModelError):
        sector_from_reference(tc_model, 1, ReferenceState(mu=Fraction(1, 2), n_bosons=(0,)))
    with pytest.raises(ModelError):
        sector_from_reference(tc_model, 1, ReferenceState(mu=Fraction(0), n_bosons=(0, 1)))


def test_sector_dimension(lmg_model, tc_model):
    assert sector_dimension(lmg_model, 2, 0, 0, ()) == 3
    assert sector_dimension(tc_model, Fraction(1, 2), 0, 0, (1,)) == 2
    assert sector_dimension(lmg_model, Fraction(1, 2), 1, 0, ()) == 1


def test_enumerate_sectors_branching_lmg(lmg_model):
    sectors = enumerate_sectors(lmg_model, 1, 0)
    assert [(s.p, s.dim) for s in sectors] == [(0, 2), (1, 1)]


def test_enumerate_sectors_tavis_cummings(tc_model):
    sectors = enumerate_sectors(tc_model, Fraction(1, 2), 0)
    assert [(s.kappa, s.dim) for s in sectors] == [(Fraction(1, 4), 1), (Fraction(3, 4), 2)]

    capped = enumerate_sectors(tc_model, Fraction(1, 2), 2)
    assert [s.kappa for s in capped] == [Fraction(x, 4) for x in (1, 3, 5, 7)]


def test_enumerate_sectors_m0_ignores_boson_cap(lmg_model):
    assert enumerate_sectors(lmg_model, 2, 0) == enumerate_sectors(lmg_model, 2, 5)


def test_branching_rule():
    for r in range(1, 5):
        model = ModelSpec(M=0, r=r, s=1, g_prime=1.0, g=1.0)
        for two_j in range(13):
            j = Fraction(two_j, 2)
            assert sum(s.dim for s in enumerate_sectors(model, j, 0)) == two_j + 1


def test_find_sector(tc_model):
    sectors = enumerate_sectors(tc_model, 1, 2)
    assert find_sector(sectors, sectors[-1].key) is sectors[-1]
    assert find_sector(sectors, (5, Fraction(9), (), ())) is None


def test_effective_shift():
    model = ModelSpec(M=0, r=2, s=2, g_prime=1.0, g=1.0, constant_shift=0.25, casimir_weight=0.5)
    assert effective_shift(model, 1) == pytest.approx(1.25)
    assert effective_shift(model, Fraction(1, 2)) == pytest.approx(0.625)


def test_sector_from_labels_m0_requires_zero_kappa(lmg_model):
    assert sector_from_labels(lmg_model, 2, 1, 0).dim == 2
    with pytest.raises(ModelError):
        sector_from_labels(lmg_model, 2, 0, Fraction(1, 2))


def test_sector_from_labels_rejects_bad_q(k2_model):
    with pytest.raises(ModelError):
        sector_from_labels(k2_model, 1, 0, Fraction(3, 2), q=(Fraction(1, 2), 1), l=(0,))


def test_validate_sector_rejects_tampered(tc_doublet, tc_model):
    assert validate_sector(tc_model, tc_doublet) is tc_doublet
    with pytest.raises(ModelError):
        validate_sector(tc_model, replace(tc_doublet, dim=3))


def test_to_dict_uses_rational_strings(tc_doublet):
    labels = tc_doublet.to_dict()
    assert labels["j"] == "1/2"
    assert labels["kappa"] == "3/4"
    assert labels["A"] == ["1"]
    assert labels["N"] == 1


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_sector_labels_invariants(data):
    model = data.draw(models())
    j, ref = data.draw(references(model))
    sector = sector_from_reference(model, j, ref)
    top = (2 * sector.j - sector.p - sector.lam) / model.r
    assert top.denominator == 1 and top >= 0
    assert all(a.denominator == 1 and a >= 0 for a in sector.A)
    assert sector.dim >= 1


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_labels_agree_with_reference(data):
    model = data.draw(models())
    j, ref = data.draw(references(model))
    sector = sector_from_reference(model, j, ref)
    assert sector_from_labels(model, sector.j, sector.p, sector.kappa, sector.q, sector.l) == sector


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_reference_constant_on_coupling_orbits(data):
    model = data.draw(models())
    two_j = data.draw(st.integers(model.r, model.r + 6))
    j = Fraction(two_j, 2)
    mu = -j + data.draw(st.integers(0, two_j - model.r))
    bosons = tuple(k + data.draw(st.integers(0, 4)) for k in model.k)
    ref = ReferenceState(mu=mu, n_bosons=bosons)
    moved = ReferenceState(mu=mu + model.r, n_bosons=tuple(n - k for n, k in zip(bosons, model.k)))
    assert sector_from_reference(model, j, moved) == sector_from_reference(model, j, ref)


@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_basis_states_stay_in_sector(data):
    model = data.draw(models())
    j, ref = data.draw(references(model))
    sector = sector_from_reference(model, j, ref)
    for n in range(sector.dim):
        state = basis_state(model, sector, n)
        assert sector_from_reference(model, j, state) == sector
        for i in range(model.M):
            assert number_eigenvalue(model, sector, i, n) == state.n_bosons[i]


def test_basis_state_rejects_out_of_range(tc_doublet, tc_model):
    with pytest.raises(ModelError):
        basis_state(tc_model, tc_doublet, 2)
