"""Packet construction, normalization, and parameter solving."""

import math

import numpy as np
import pytest

from wavekit.dispersion import DispersionRelation
from wavekit.errors import (
    DomainError,
    InvalidParams,
    LatticePeriodicityError,
    Unsatisfiable,
)
from wavekit.moments import moments_quadrature, uncertainty_bound
from wavekit.packet import (
    MomentTargets,
    closed_form_norm_constant,
    expectation_many,
    make_minimal,
    solve_parameters,
)

NONREL = DispersionRelation.non_relativistic(3.0)
LATTICE = DispersionRelation.lattice(3.0, 1.0)
REL = DispersionRelation.relativistic(1.0)
MASSLESS = DispersionRelation.massless()

# Frozen: pi*sqrt(3)/(2 K1(sqrt 3)) and (4 pi / 3)^(1/4).
REL_NORM_SQ = 13.580514884483808
NONREL_NORM_A = 1.4306129511132552

ALL_PACKETS = [
    (NONREL, 1.0, 0.5),
    (NONREL, 0.5, -0.7),
    (LATTICE, 1.0, 0.0),
    (LATTICE, 2.0, 0.0),
    (REL, 1.0, 0.5),
    (REL, 2.0, -0.9),
    (MASSLESS, 1.0, 0.5),
    (MASSLESS, 0.5, 0.2),
]


@pytest.mark.parametrize("rel,alpha,beta_r", ALL_PACKETS)
def test_norm_invariant(rel, alpha, beta_r):
    pk = make_minimal(rel, alpha, beta_r, 0.0)
    vals, _ = expectation_many(pk, lambda p: np.ones((len(p), 1)))
    assert float(vals[0].real) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("rel,alpha,beta_r", ALL_PACKETS)
def test_closed_form_norm_agreement(rel, alpha, beta_r):
    pk = make_minimal(rel, alpha, beta_r, 0.0)
    closed = closed_form_norm_constant(rel, alpha, beta_r)
    assert abs(pk.norm_A - closed) <= 1e-9 * closed


def test_relativistic_norm_value():
    pk = make_minimal(REL, 1.0, 0.5, 0.0)
    assert pk.norm_A**2 == pytest.approx(REL_NORM_SQ, rel=1e-9)


def test_nonrel_norm_value():
    pk = make_minimal(NONREL, 1.0, 0.0, 0.0)
    assert pk.norm_A == pytest.approx(NONREL_NORM_A, rel=1e-10)


def test_lattice_periodicity_errors():
    with pytest.raises(LatticePeriodicityError):
        make_minimal(LATTICE, 1.0, 0.1, 0.0)
    with pytest.raises(LatticePeriodicityError):
        make_minimal(LATTICE, 1.0, 0.0, 0.4)
    make_minimal(LATTICE, 1.0, 0.0, 2.0)  # integer site shift is fine


def test_invalid_params():
    with pytest.raises(InvalidParams):
        make_minimal(REL, -1.0, 0.0, 0.0)
    with pytest.raises(InvalidParams):
        make_minimal(REL, 1.0, 1.0, 0.0)
    with pytest.raises(InvalidParams):
        make_minimal(MASSLESS, 0.5, 0.6, 0.0)


class TestAmplitude:
    def test_real_positive_without_phase(self):
        pk = make_minimal(NONREL, 1.0, 0.7, 0.0)
        vals = pk.amplitude(np.linspace(-2, 2, 9))
        assert np.all(vals.imag == 0.0)
        assert np.all(vals.real > 0.0)

    def test_massless_even(self):
        pk = make_minimal(MASSLESS, 1.0, 0.0, 0.0)
        q = np.array([0.3, 1.7])
        np.testing.assert_allclose(pk.amplitude(q), pk.amplitude(-q))

    def test_relativistic_rest_point(self):
        pk = make_minimal(REL, 1.0, 0.0, 0.0)
        assert pk.amplitude(0.0) == pytest.approx(pk.norm_A * math.exp(-1.0))

    def test_phase_only_beta_i(self):
        plain = make_minimal(REL, 1.0, 0.3, 0.0)
        shifted = make_minimal(REL, 1.0, 0.3, 1.5)
        p = np.linspace(-2, 2, 11)
        np.testing.assert_allclose(
            np.abs(plain.amplitude(p)), np.abs(shifted.amplitude(p)), rtol=1e-12
        )

    def test_lattice_zone_check(self):
        pk = make_minimal(LATTICE, 1.0, 0.0, 0.0)
        with pytest.raises(DomainError):
            pk.amplitude(7.0)


class TestSolveParameters:
    def test_nonrel_direct(self):
        pk = solve_parameters(NONREL, MomentTargets(0.5, 0.0, 1.0))
        assert pk.beta_r == pytest.approx(0.5, abs=1e-9)

    def test_relativistic_direct(self):
        pk = solve_parameters(REL, MomentTargets(0.5, -2.0, 1.0))
        assert pk.beta_r == pytest.approx(0.5, abs=1e-9)
        assert pk.beta_i == 2.0

    def test_lattice_moving_unsatisfiable(self):
        with pytest.raises(Unsatisfiable):
            solve_parameters(LATTICE, MomentTargets(0.3, 0.0, 1.0))

    def test_speed_limit(self):
        with pytest.raises(Unsatisfiable):
            solve_parameters(REL, MomentTargets(1.0, 0.0, 1.0))

    def test_width_mode(self):
        pk = solve_parameters(REL, MomentTargets(0.25, 0.0, 0.8), mode="width")
        m = moments_quadrature(pk)
        assert m.width_x == pytest.approx(0.8, rel=1e-7)
        assert m.mean_v == pytest.approx(0.25, abs=1e-9)

    def test_solved_packets_saturate(self):
        pk = solve_parameters(MASSLESS, MomentTargets(0.4, 1.0, 1.5))
        m = moments_quadrature(pk)
        assert abs(m.width_x * m.width_v - uncertainty_bound(pk)) <= 1e-7


def test_translation_covariance():
    base = make_minimal(REL, 1.0, 0.3, 0.0)
    shifted = make_minimal(REL, 1.0, 0.3, 0.8)
    m_base = moments_quadrature(base)
    m_shift = moments_quadrature(shifted)
    assert m_shift.mean_x - m_base.mean_x == pytest.approx(-0.8, abs=1e-10)


@pytest.mark.parametrize("rel,alpha,beta_r", ALL_PACKETS)
def test_saturation(rel, alpha, beta_r):
    pk = make_minimal(rel, alpha, beta_r, 0.0)
    m = moments_quadrature(pk)
    assert abs(m.width_x * m.width_v - uncertainty_bound(pk)) <= 1e-7
