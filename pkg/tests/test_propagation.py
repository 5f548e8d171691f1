"""Green's functions, evolution continuation, and density grids."""

import cmath
import math

import numpy as np
import pytest

from wavekit.analysis import evolved_moments, ridge_slope
from wavekit.boost import galilean_boost
from wavekit.dispersion import DispersionRelation
from wavekit.errors import InvalidInput, LightConeSingular, NonIntegerSite
from wavekit.moments import moments_quadrature, spreading_width_sq
from wavekit.packet import make_minimal
from wavekit.propagation import (
    density_grid,
    evolve_closed,
    evolve_quadrature,
    greens_closed,
)

NONREL = DispersionRelation.non_relativistic(3.0)
LATTICE = DispersionRelation.lattice(3.0, 1.0)
REL = DispersionRelation.relativistic(1.0)
MASSLESS = DispersionRelation.massless()


class TestGreensClosed:
    def test_massless_value(self):
        assert greens_closed(MASSLESS, 2.0, 1.0) == pytest.approx(1j / (3 * math.pi))

    def test_nonrel_origin(self):
        for t in (0.5, 2.0):
            expected = cmath.sqrt(3.0 / (2.0 * math.pi * 1j * t))
            assert greens_closed(NONREL, 0.0, t) == pytest.approx(expected)

    def test_nonrel_t_zero_rejected(self):
        with pytest.raises(InvalidInput):
            greens_closed(NONREL, 1.0, 0.0)

    def test_lattice_identity_at_origin(self):
        assert greens_closed(LATTICE, 0.0, 0.0) == pytest.approx(1.0)

    def test_lattice_non_integer_site(self):
        with pytest.raises(NonIntegerSite):
            greens_closed(LATTICE, 0.5, 1.0)

    def test_light_cone_band(self):
        with pytest.raises(LightConeSingular):
            greens_closed(MASSLESS, 1.0, 1.0)
        with pytest.raises(LightConeSingular):
            greens_closed(REL, 2.0, 2.0 + 1e-15)

    def test_spacelike_tail_nonzero_with_decay(self):
        t = 1.0
        s = np.linspace(5.0, 15.0, 11)
        xs = np.sqrt(t * t + s * s)
        g = np.abs(np.atleast_1d(greens_closed(REL, xs, t)))
        assert np.all(g > 0.0)
        slope = np.polyfit(s, np.log(g * s**1.5), 1)[0]
        assert abs(slope + 1.0) <= 0.05

    def test_inside_outside_overlap_band(self):
        # Just inside the cone the J/N form must agree with the K form
        # continued through t - i*eps (series regime of K_1).
        t = 2.0
        for ratio in (1.001, 1.005, 1.01):
            x = t / ratio
            inside = greens_closed(REL, x, t)
            continued = greens_closed(REL, x, t - 1e-10j)
            assert abs(inside - continued) <= 1e-5 * abs(inside)

    def test_negative_time_conjugation(self):
        x = 3.7
        assert greens_closed(REL, x, -1.5) == pytest.approx(
            greens_closed(REL, x, 1.5).conjugate()
        )


@pytest.mark.parametrize(
    "rel,beta",
    [(NONREL, 0.5), (LATTICE, 0.0), (REL, 0.5), (MASSLESS, 0.5)],
)
def test_initial_state_fourier_oracle(rel, beta):
    # At t = 0 evolve_closed must reproduce (1/2pi) int Phi(p) e^{ipx} dp.
    pk = make_minimal(rel, 1.0, beta, 0.0)
    xs = np.arange(-3.0, 4.0) if rel is LATTICE else np.linspace(-3.0, 3.0, 7)
    closed = np.atleast_1d(evolve_closed(pk, xs, 0.0))
    for j, x in enumerate(xs):
        oracle = evolve_quadrature(pk, float(x), 0.0)
        assert abs(closed[j] - oracle.value) <= 1e-8


def test_evolved_gaussian_width():
    pk = make_minimal(NONREL, 1.0, 0.0, 0.0)
    m0 = moments_quadrature(pk)
    for t in (0.0, 1.0, 3.0):
        _, mean, second = evolved_moments(pk, t, m0)
        assert second - mean**2 == pytest.approx(spreading_width_sq(m0, t), rel=1e-9)


def test_relativistic_spacelike_point_nonzero():
    pk = make_minimal(REL, 1.0, 0.0, 0.0)
    value = evolve_closed(pk, 5.0, 1.0)
    assert abs(value) > 0.0
    oracle = evolve_quadrature(pk, 5.0, 1.0)
    assert abs(value - oracle.value) <= 1e-8


class TestUnitarity:
    @pytest.mark.parametrize("rel,beta", [(NONREL, 0.5), (REL, 0.5)])
    def test_continuum_mass(self, rel, beta):
        pk = make_minimal(rel, 1.0, beta, 0.0)
        m0 = moments_quadrature(pk)
        for t in (0.5, 2.0):
            mass, _, _ = evolved_moments(pk, t, m0)
            assert abs(mass - 1.0) <= 1e-5

    def test_massless_mass_with_tails(self):
        pk = make_minimal(MASSLESS, 1.0, 0.5, 0.0)
        mass, _, _ = evolved_moments(pk, 2.0)
        assert abs(mass - 1.0) <= 1e-5

    def test_lattice_site_sum(self):
        pk = make_minimal(LATTICE, 1.0, 0.0, 0.0)
        for t in (0.0, 2.0, 5.0):
            sites = np.arange(-40.0, 41.0)
            probs = np.abs(evolve_closed(pk, sites, t)) ** 2
            assert abs(probs.sum() - 1.0) <= 1e-6


class TestDensityGrid:
    def test_mass_capture(self):
        pk = make_minimal(NONREL, 1.0, 0.5, 0.0)
        m0 = moments_quadrature(pk)
        t_vals = np.array([0.0, 1.0, 2.0])
        width = math.sqrt(spreading_width_sq(m0, t_vals[-1]))
        center = m0.mean_x + m0.mean_v * t_vals[-1]
        xs = np.linspace(center - 6.5 * width - 2, center + 6.5 * width + 2, 801)
        grid = density_grid(pk, xs, t_vals)
        for row in grid.density:
            mass = np.trapezoid(row, xs)
            assert 0.99 <= mass <= 1.0 + 5e-7

    def test_grid_validation(self):
        pk = make_minimal(NONREL, 1.0, 0.0, 0.0)
        with pytest.raises(InvalidInput):
            density_grid(pk, np.array([1.0, 0.0]), np.array([0.0]))
        with pytest.raises(InvalidInput):
            density_grid(pk, np.array([0.0, 1.0]), np.array([0.0]), method="magic")

    def test_quadrature_method_matches_closed(self):
        pk = make_minimal(MASSLESS, 1.0, 0.0, 0.0)
        xs = np.linspace(-2.0, 2.0, 5)
        ts = np.array([0.0, 1.0])
        closed = density_grid(pk, xs, ts, "closed")
        quad = density_grid(pk, xs, ts, "quadrature")
        np.testing.assert_allclose(closed.density, quad.density, atol=1e-8)


def test_galilean_drift_slope_shift():
    # Boosting by u shifts the density ridge slope by exactly -u.
    pk = make_minimal(NONREL, 1.0, 0.5, 0.0)
    boosted = galilean_boost(pk, 0.5)
    xs = np.linspace(-6.0, 8.0, 281)
    ts = np.linspace(0.0, 6.0, 13)
    slope = ridge_slope(density_grid(pk, xs, ts))
    slope_b = ridge_slope(density_grid(boosted, xs, ts))
    assert slope - slope_b == pytest.approx(0.5, abs=1e-6)
