"""Wave packets in an expanding 1-D FRW universe.

The metric (ds)^2 = (dt)^2 - R(t)^2 (d rho)^2 conserves the comoving
momentum p_rho; physical momentum p = p_rho / R(t) is red-shifted as the
universe grows. Packets are specified in physical momentum at t = 0 and
carried forward through the conserved p_rho = p R(0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .dispersion import Kind
from .errors import InvalidInput, KindMismatch, NonConvergence
from .moments import moments_quadrature
from .numerics import DEFAULT_SPEC
from .packet import expectation_many

__all__ = [
    "PowerLawScale",
    "ExponentialScale",
    "TabulatedScale",
    "ScaleFactorModel",
    "ComovingTrace",
    "classical_velocity",
    "mean_velocity",
    "comoving_trace",
]

_TIME_TOL = 1e-9  # sup-norm tolerance of the nested time integrals


@dataclass(frozen=True)
class PowerLawScale:
    """R(t) = R0 (1 + t/t_scale)^exponent, defined for t > -t_scale."""

    exponent: float
    reference: float = 1.0
    t_scale: float = 1.0

    def __post_init__(self):
        if self.exponent < 0.0 or self.reference <= 0.0 or self.t_scale <= 0.0:
            raise InvalidInput("power-law scale needs exponent >= 0, R0 > 0, t_scale > 0")

    def scale(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t <= -self.t_scale):
            raise InvalidInput("power-law scale undefined at t <= -t_scale")
        return self.reference * (1.0 + t / self.t_scale) ** self.exponent


@dataclass(frozen=True)
class ExponentialScale:
    """R(t) = R0 exp(H t)."""

    hubble: float
    reference: float = 1.0

    def __post_init__(self):
        if self.reference <= 0.0:
            raise InvalidInput("exponential scale needs R0 > 0")

    def scale(self, t):
        return self.reference * np.exp(self.hubble * np.asarray(t, dtype=float))


@dataclass(frozen=True)
class TabulatedScale:
    """Monotone-in-t table, interpolated piecewise-linearly in ln R."""

    times: tuple
    values: tuple

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        r = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != r.shape or len(t) < 2:
            raise InvalidInput("tabulated scale needs matching 1-D arrays, length >= 2")
        if np.any(np.diff(t) <= 0.0):
            raise InvalidInput("tabulated times must be strictly increasing")
        if np.any(r <= 0.0):
            raise InvalidInput("tabulated scale factors must be positive")

    def scale(self, t):
        t_arr = np.asarray(t, dtype=float)
        knots = np.asarray(self.times, dtype=float)
        if np.any(t_arr < knots[0]) or np.any(t_arr > knots[-1]):
            raise InvalidInput("query outside the tabulated time range")
        ln_r = np.log(np.asarray(self.values, dtype=float))
        return np.exp(np.interp(t_arr, knots, ln_r))


ScaleFactorModel = Union[PowerLawScale, ExponentialScale, TabulatedScale]


@dataclass(frozen=True)
class ComovingTrace:
    t_values: np.ndarray
    mean_rho: np.ndarray
    mean_rho2: np.ndarray
    mean_x: np.ndarray
    mean_v: np.ndarray


def classical_velocity(v0, r_start, r_now):
    """Red-shifted classical velocity from conserved p_rho = m v gamma R."""
    if not abs(v0) <= 1.0:
        raise InvalidInput("|v0| must not exceed 1")
    if r_start <= 0.0 or r_now <= 0.0:
        raise InvalidInput("scale factors must be positive")
    ratio = r_start / r_now
    return ratio * v0 / math.sqrt(1.0 - v0 * v0 + v0 * v0 * ratio * ratio)


def _redshift_velocity(rel, r0_over_rt):
    """v(p R0/R(t)) as a function of the t=0 physical momentum array."""
    m = rel.mass
    if rel.kind is Kind.RELATIVISTIC:
        def v(p):
            q = p * r0_over_rt
            return q / np.sqrt(q * q + m * m)
    elif rel.kind is Kind.MASSLESS:
        def v(p):
            return np.sign(p)
    else:  # non-relativistic limit
        def v(p):
            return p * r0_over_rt / m
    return v


def _check_kind(packet):
    if packet.rel.kind is Kind.LATTICE:
        raise KindMismatch("FRW propagation covers the continuum dispersions only")


def mean_velocity(packet, model, t, spec=DEFAULT_SPEC):
    """<v(t)> of the red-shifted packet.

    Massless packets keep <v> = beta/alpha for all times; non-relativistic
    ones are red-shifted in proportion to the scale factor. The
    relativistic case is a quadrature.
    """
    _check_kind(packet)
    kind = packet.rel.kind
    r0 = float(model.scale(0.0))
    rt = float(model.scale(t))
    if kind is Kind.MASSLESS:
        return packet.beta_r / packet.alpha
    if kind is Kind.NON_RELATIVISTIC:
        return (r0 / rt) * packet.beta_r / packet.alpha
    v = _redshift_velocity(packet.rel, r0 / rt)
    vals, _ = expectation_many(packet, lambda p: v(p)[:, np.newaxis], spec)
    return float(vals[0].real)


def _time_integral_grid(func, t_end, tol=_TIME_TOL):
    """Composite-Simpson time integral of a p-vectorized integrand,
    doubled until the sup-norm increment falls below tolerance."""
    if t_end == 0.0:
        return None  # caller substitutes zeros of the right shape
    n = 16
    prev = None
    while n <= (1 << 18):
        ts = np.linspace(0.0, t_end, n + 1)
        vals = np.stack([func(tp) for tp in ts])
        simp = (
            (t_end / n)
            / 3.0
            * (vals[0] + vals[-1] + 4.0 * vals[1:-1:2].sum(axis=0) + 2.0 * vals[2:-2:2].sum(axis=0))
        )
        if prev is not None:
            scale = max(1.0, float(np.max(np.abs(simp))))
            if float(np.max(np.abs(simp - prev))) <= tol * scale:
                return simp
        prev = simp
        n *= 2
    raise NonConvergence("time integration did not converge")


def comoving_trace(packet, model, t_values, spec=DEFAULT_SPEC):
    """Comoving moments <rho>(t), <rho^2>(t) and derived physical traces.

    <rho>(t) = <rho>(0) + int_0^t <v(t')>/R(t') dt'; the second moment adds
    the symmetrized cross term and the squared per-momentum time integral
    W(t, p) = int_0^t v(t', p)/R(t') dt', which is a single p-quadrature
    because p_rho is conserved.
    """
    _check_kind(packet)
    t_values = np.asarray(t_values, dtype=float)
    if t_values.ndim != 1 or len(t_values) == 0:
        raise InvalidInput("t_values must be a non-empty 1-D array")
    if np.any(t_values < 0.0) or np.any(np.diff(t_values) < 0.0):
        raise InvalidInput("t_values must be sorted ascending from 0")

    rel = packet.rel
    r0 = float(model.scale(0.0))
    m0 = moments_quadrature(packet, spec)
    rho0 = m0.mean_x / r0
    rho2_0 = m0.mean_x2 / (r0 * r0)
    alpha, beta_r, beta_i = packet.alpha, packet.beta_r, packet.beta_i

    mean_rho = np.empty(len(t_values))
    mean_rho2 = np.empty(len(t_values))
    mean_x = np.empty(len(t_values))
    mean_v_arr = np.empty(len(t_values))

    for i, t in enumerate(t_values):
        rt = float(model.scale(t))

        def weights(p):
            def integrand(tp):
                v = _redshift_velocity(rel, r0 / float(model.scale(tp)))
                return v(p) / float(model.scale(tp))

            w = _time_integral_grid(integrand, float(t))
            if w is None:
                w = np.zeros_like(p)
            v_now = _redshift_velocity(rel, r0 / rt)(p)
            d = beta_r - alpha * rel.velocity(p)
            x_w = -beta_i + 1j * d
            return np.stack([w, w * w, w * x_w, v_now], axis=1).astype(complex)

        vals, _ = expectation_many(packet, weights, spec)
        w_mean = float(vals[0].real)
        w_sq = float(vals[1].real)
        cross = (2.0 / r0) * float(vals[2].real)
        mean_rho[i] = rho0 + w_mean
        mean_rho2[i] = rho2_0 + cross + w_sq
        mean_x[i] = rt * mean_rho[i]
        mean_v_arr[i] = float(vals[3].real)

    return ComovingTrace(
        t_values=t_values,
        mean_rho=mean_rho,
        mean_rho2=mean_rho2,
        mean_x=mean_x,
        mean_v=mean_v_arr,
    )
