from fractions import Fraction

import pytest

from model import ModelSpec, ReferenceState, sector_from_reference
from presets import preset, preset_params


@pytest.fixture
def tc_model():
    """w = g' = 1, g = 0.1 的 Tavis-Cummings 模型"""
    return preset("tavis_cummings", {"w": 1.0, "g_prime": 1.0, "g": 0.1})


@pytest.fixture
def tc_doublet(tc_model):
    """j = 1/2、κ = 3/4 的二维扇区，H = [[w-g'/2, g], [g, g'/2]]"""
    return sector_from_reference(tc_model, Fraction(1, 2), ReferenceState(mu=Fraction(1, 2), n_bosons=(0,)))


@pytest.fixture
def lmg_model():
    return preset("lmg", preset_params("lmg"))


@pytest.fixture
def bose_hubbard_model():
    return preset("bose_hubbard", preset_params("bose_hubbard"))


@pytest.fixture
def two_mode_model():
    return preset("two_mode_tc", preset_params("two_mode_tc"))


@pytest.fixture
def rotor_model():
    return preset("rigid_rotor", {"a": 1.0, "b": 2.0, "c": 3.0})


@pytest.fixture
def k2_model():
    """k = (2, 1) 的双模模型，覆盖 q_i 非平凡的情形"""
    return ModelSpec(M=2, r=1, s=2, k=(2, 1), w=(0.7, 1.3), g_prime=0.9, g=0.4)
