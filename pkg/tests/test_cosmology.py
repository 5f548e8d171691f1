"""FRW red-shift laws, conservation identities, and comoving traces."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wavekit.cosmology import (
    ExponentialScale,
    PowerLawScale,
    TabulatedScale,
    classical_velocity,
    comoving_trace,
    mean_velocity,
)
from wavekit.dispersion import DispersionRelation
from wavekit.errors import InvalidInput, KindMismatch
from wavekit.moments import moments_quadrature, spreading_width_sq
from wavekit.packet import make_minimal

NONREL = DispersionRelation.non_relativistic(3.0)
LATTICE = DispersionRelation.lattice(3.0, 1.0)
REL = DispersionRelation.relativistic(1.0)
MASSLESS = DispersionRelation.massless()

EXPANDING = PowerLawScale(exponent=1.0, reference=1.0, t_scale=1.0)


class TestClassicalVelocity:
    def test_light_speed_preserved(self):
        assert classical_velocity(1.0, 1.0, 7.3) == pytest.approx(1.0)

    def test_static(self):
        assert classical_velocity(0.6, 2.0, 2.0) == pytest.approx(0.6)

    def test_reference_value(self):
        expected = 0.3 / math.sqrt(0.73)
        assert classical_velocity(0.6, 1.0, 2.0) == pytest.approx(expected, rel=1e-14)

    def test_input_validation(self):
        with pytest.raises(InvalidInput):
            classical_velocity(1.5, 1.0, 2.0)
        with pytest.raises(InvalidInput):
            classical_velocity(0.5, -1.0, 2.0)

    @given(
        st.floats(min_value=-0.99, max_value=0.99),
        st.floats(min_value=0.1, max_value=20.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_conserved_momentum_identity(self, v0, r_now):
        v = classical_velocity(v0, 1.0, r_now)
        gamma = 1.0 / math.sqrt(1.0 - v * v)
        gamma0 = 1.0 / math.sqrt(1.0 - v0 * v0)
        assert abs(v * gamma * r_now - v0 * gamma0) <= 1e-12 * max(1.0, abs(v0 * gamma0))


class TestScaleModels:
    def test_power_law(self):
        model = PowerLawScale(exponent=2.0, reference=3.0, t_scale=2.0)
        assert model.scale(2.0) == pytest.approx(12.0)

    def test_exponential(self):
        model = ExponentialScale(hubble=0.5, reference=2.0)
        assert model.scale(2.0) == pytest.approx(2.0 * math.e)

    def test_tabulated_log_linear(self):
        times = np.linspace(0.0, 4.0, 9)
        values = 2.0 * np.exp(0.3 * times)
        model = TabulatedScale(tuple(times), tuple(values))
        # Log-linear interpolation reproduces an exponential exactly.
        assert model.scale(1.37) == pytest.approx(2.0 * math.exp(0.3 * 1.37), rel=1e-12)
        with pytest.raises(InvalidInput):
            model.scale(5.0)

    def test_validation(self):
        with pytest.raises(InvalidInput):
            PowerLawScale(exponent=-1.0)
        with pytest.raises(InvalidInput):
            TabulatedScale((0.0, 1.0), (1.0, -2.0))
        with pytest.raises(InvalidInput):
            TabulatedScale((1.0, 0.0), (1.0, 2.0))


class TestMeanVelocity:
    def test_massless_not_redshifted(self):
        pk = make_minimal(MASSLESS, 1.0, 0.5, 0.0)
        for model in (EXPANDING, ExponentialScale(hubble=1.0, reference=1.0)):
            for t in (0.0, 1.0, 5.0):
                assert mean_velocity(pk, model, t) == pytest.approx(0.5, abs=1e-10)

    def test_nonrel_proportional_redshift(self):
        pk = make_minimal(NONREL, 1.0, 0.5, 0.0)
        for t in (1.0, 3.0):
            rt = float(EXPANDING.scale(t))
            assert mean_velocity(pk, EXPANDING, t) * rt == pytest.approx(0.5, abs=1e-6)

    def test_static_matches_moments(self):
        pk = make_minimal(REL, 1.0, 0.5, 0.0)
        static = PowerLawScale(exponent=0.0, reference=1.0, t_scale=1.0)
        m0 = moments_quadrature(pk)
        assert mean_velocity(pk, static, 4.0) == pytest.approx(m0.mean_v, abs=1e-10)

    def test_monotone_redshift(self):
        pk = make_minimal(REL, 1.0, 0.5, 0.0)
        vals = [mean_velocity(pk, EXPANDING, t) for t in (0.0, 0.5, 1.0, 2.0, 4.0)]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_classical_limit(self):
        # A narrow packet (large alpha) follows the classical red-shift law.
        pk = make_minimal(REL, 100.0, 50.0, 0.0)
        m0 = moments_quadrature(pk)
        quantum = mean_velocity(pk, EXPANDING, 2.0)
        classical = classical_velocity(m0.mean_v, 1.0, float(EXPANDING.scale(2.0)))
        assert abs(quantum - classical) / classical <= 0.01

    def test_lattice_rejected(self):
        pk = make_minimal(LATTICE, 1.0, 0.0, 0.0)
        with pytest.raises(KindMismatch):
            mean_velocity(pk, EXPANDING, 1.0)


class TestComovingTrace:
    def test_static_reduces_to_flat_spreading(self):
        pk = make_minimal(REL, 1.0, 0.5, 0.0)
        static = PowerLawScale(exponent=0.0, reference=2.0, t_scale=1.0)
        ts = np.array([0.0, 1.0, 2.0, 5.0])
        trace = comoving_trace(pk, static, ts)
        m0 = moments_quadrature(pk)
        for i, t in enumerate(ts):
            var_x = 4.0 * (trace.mean_rho2[i] - trace.mean_rho[i] ** 2)
            assert abs(var_x - spreading_width_sq(m0, t)) <= 1e-6
            drift = m0.mean_x + m0.mean_v * t
            assert abs(trace.mean_x[i] - drift) <= 1e-7

    def test_massless_rho_integral(self):
        # <rho>(t) = <rho>(0) + (beta/alpha) int_0^t dt'/R(t'); for the
        # power-law model the time integral is log(1 + t) exactly.
        pk = make_minimal(MASSLESS, 1.0, 0.5, 0.0)
        ts = np.array([0.0, 2.0])
        trace = comoving_trace(pk, EXPANDING, ts)
        assert trace.mean_rho[1] == pytest.approx(0.5 * math.log(3.0), abs=1e-7)

    def test_offset_packet_carries_initial_rho(self):
        pk = make_minimal(MASSLESS, 1.0, 0.0, -1.5)  # centered at x = +1.5
        trace = comoving_trace(pk, EXPANDING, np.array([0.0]))
        assert trace.mean_rho[0] == pytest.approx(1.5, abs=1e-9)
        assert trace.mean_x[0] == pytest.approx(1.5, abs=1e-9)

    def test_mean_velocity_column(self):
        pk = make_minimal(REL, 1.0, 0.5, 0.0)
        ts = np.array([0.0, 1.0])
        trace = comoving_trace(pk, EXPANDING, ts)
        assert trace.mean_v[1] == pytest.approx(mean_velocity(pk, EXPANDING, 1.0), abs=1e-10)

    def test_input_validation(self):
        pk = make_minimal(REL, 1.0, 0.0, 0.0)
        with pytest.raises(InvalidInput):
            comoving_trace(pk, EXPANDING, np.array([1.0, 0.5]))
        with pytest.raises(KindMismatch):
            comoving_trace(make_minimal(LATTICE, 1.0, 0.0, 0.0), EXPANDING, np.array([0.0]))
