"""Minimal position-velocity uncertainty wave packets.

In momentum space a minimal packet is Phi(p) = A exp(-alpha E(p) + beta p)
with alpha > 0 and beta = beta_r + i beta_i. The normalization convention is
(1/2pi) int |Phi(p)|^2 dp = 1 with A real positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dispersion import DispersionRelation, Kind
from .errors import (
    InvalidInput,
    InvalidParams,
    LatticePeriodicityError,
    NoConvergence,
    Unsatisfiable,
)
from .numerics import (
    DEFAULT_SPEC,
    _WINDOW_SAFETY,
    _adaptive,
    _bessel_i_vec,
    _bessel_k01_vec,
    _line_window,
)

__all__ = ["PacketParams", "MomentTargets", "make_minimal", "solve_parameters"]

_SITE_TOL = 1e-9  # tolerance for beta_i/a being an integer


@dataclass(frozen=True)
class PacketParams:
    """Parameters of a normalized minimal uncertainty packet."""

    rel: DispersionRelation
    alpha: float
    beta_r: float
    beta_i: float
    norm_A: float

    @property
    def beta(self):
        return complex(self.beta_r, self.beta_i)

    def amplitude(self, p):
        """Phi(p) = A exp(-alpha E(p) + beta p); beta_i only rotates the phase."""
        p = np.asarray(p, dtype=float)
        e = self.rel.energy(p)
        return self.norm_A * np.exp(-self.alpha * e + self.beta * p)

    def density_momentum(self, p):
        """|Phi(p)|^2, independent of beta_i."""
        p = np.asarray(p, dtype=float)
        e = self.rel.energy(p)
        return self.norm_A**2 * np.exp(-2.0 * self.alpha * e + 2.0 * self.beta_r * p)


@dataclass(frozen=True)
class MomentTargets:
    """Physical targets used to solve for packet parameters.

    ``width_parameter`` is either the desired alpha directly or a target
    position uncertainty, depending on the solve mode.
    """

    mean_velocity: float
    mean_position: float
    width_parameter: float

    def __post_init__(self):
        if not self.width_parameter > 0.0:
            raise InvalidInput("width_parameter must be > 0")


def _validate_params(rel, alpha, beta_r, beta_i):
    if not (alpha > 0.0 and math.isfinite(alpha)):
        raise InvalidParams("alpha must be > 0 (normalizability of exp(-alpha E))")
    if not (math.isfinite(beta_r) and math.isfinite(beta_i)):
        raise InvalidParams("beta must be finite")
    if rel.kind in (Kind.RELATIVISTIC, Kind.MASSLESS) and alpha <= abs(beta_r):
        raise InvalidParams(
            "relativistic and massless packets require alpha > |beta_r|"
        )
    if rel.kind is Kind.LATTICE:
        a = rel.lattice_spacing
        if beta_r != 0.0:
            raise LatticePeriodicityError(
                "lattice periodicity over the Brillouin zone forces beta_r = 0"
            )
        if abs(beta_i / a - round(beta_i / a)) > _SITE_TOL:
            raise LatticePeriodicityError(
                "lattice packets require beta_i to be an integer multiple of a"
            )


def density_decay_rate(rel, alpha, beta_r, power=2, spec=DEFAULT_SPEC):
    """Exponential-decay hint for integrands carrying |Phi|^power.

    ``power`` = 2 for density-weighted integrals, 1 for single-amplitude
    Fourier integrals. The non-relativistic Gaussian decays faster than any
    exponential; there the rate is chosen so the truncation window covers
    the point where the exponent reaches the tail budget.
    """
    s = 0.5 * power
    if rel.kind is Kind.NON_RELATIVISTIC:
        m = rel.mass
        budget = math.log(1.0 / max(spec.absolute_floor, 1e-18)) + _WINDOW_SAFETY
        # Solve s*alpha*P^2/m - 2*s*|beta_r|*P = budget for the window P.
        b = abs(beta_r)
        window = (b + math.sqrt(b * b + alpha * budget / (s * m))) * m / alpha
        return budget / window
    return 2.0 * s * (alpha - abs(beta_r))


def expectation_many(packet, weight, spec=DEFAULT_SPEC):
    """(1/2pi) int weight(p) |Phi(p)|^2 dp for a stack of weights.

    ``weight`` maps an ndarray of momenta (n,) to an array (n, k); returns
    (values, errors) of shape (k,). Works on the packet's natural domain.
    """
    rel = packet.rel

    def f(p):
        dens = packet.density_momentum(p) / (2.0 * math.pi)
        return np.asarray(weight(p)) * dens[:, np.newaxis]

    if rel.kind is Kind.LATTICE:
        # Moment weights such as p and p^2 are not periodic over the zone,
        # so Gauss panels on the finite interval are used instead of the
        # spectral trapezoid rule.
        cut = math.pi / rel.lattice_spacing
        return _adaptive(f, -cut, cut, spec, initial_panels=8)

    rate = density_decay_rate(rel, packet.alpha, packet.beta_r, power=2, spec=spec)
    window = _line_window(rate, spec)
    return _adaptive(f, -window, window, spec, breakpoints=(0.0,), initial_panels=8)


def expectation(packet, weight, spec=DEFAULT_SPEC):
    """Scalar expectation value of a momentum-space weight."""
    vals, errs = expectation_many(packet, lambda p: np.asarray(weight(p))[:, np.newaxis], spec)
    return complex(vals[0]), float(errs[0])


def closed_form_norm_constant(rel, alpha, beta_r):
    """Closed-form normalization A where one exists, else None."""
    if rel.kind is Kind.NON_RELATIVISTIC:
        m = rel.mass
        inv_a2 = math.sqrt(m / (4.0 * math.pi * alpha)) * math.exp(m * beta_r**2 / alpha)
        return 1.0 / math.sqrt(inv_a2)
    if rel.kind is Kind.LATTICE:
        a = rel.lattice_spacing
        arg = 2.0 * alpha / (rel.mass * a * a)
        i0 = float(np.ravel(_bessel_i_vec(0, arg)[0])[0].real)
        return 1.0 / math.sqrt(i0 / a)
    if rel.kind is Kind.RELATIVISTIC:
        m = rel.mass
        s = math.sqrt(alpha * alpha - beta_r * beta_r)
        k1 = _bessel_k01_vec(2.0 * m * s)[1].real
        inv_a2 = m * alpha * float(k1[0]) / (math.pi * s)
        return 1.0 / math.sqrt(inv_a2)
    if rel.kind is Kind.MASSLESS:
        return math.sqrt(2.0 * math.pi * (alpha**2 - beta_r**2) / alpha)
    return None


def make_minimal(rel, alpha, beta_r=0.0, beta_i=0.0, spec=DEFAULT_SPEC):
    """Construct a normalized minimal uncertainty packet.

    The stored normalization comes from quadrature of |Phi|^2; the
    closed-form normalizations, where they exist, are cross-checked against
    it in the test suite.
    """
    alpha = float(alpha)
    beta_r = float(beta_r)
    beta_i = float(beta_i)
    _validate_params(rel, alpha, beta_r, beta_i)
    probe = PacketParams(rel, alpha, beta_r, beta_i, norm_A=1.0)

    def one(p):
        return np.ones((len(p), 1))

    vals, _ = expectation_many(probe, one, spec)
    norm_sq = float(np.real(vals[0]))
    if not (norm_sq > 0.0 and math.isfinite(norm_sq)):
        raise InvalidParams("packet is not normalizable with these parameters")
    return PacketParams(rel, alpha, beta_r, beta_i, norm_A=1.0 / math.sqrt(norm_sq))


def _mean_velocity_of(rel, alpha, beta_r, spec):
    packet = make_minimal(rel, alpha, beta_r, 0.0, spec)
    vals, _ = expectation_many(
        packet, lambda p: rel.velocity(p)[:, np.newaxis], spec
    )
    return float(np.real(vals[0]))


def _solve_beta_r(rel, alpha, target_v, spec):
    """Bisection for beta_r such that the packet's quadrature <v> matches."""
    if rel.kind is Kind.LATTICE:
        if target_v != 0.0:
            raise Unsatisfiable("lattice minimal packets do not move sideways")
        return 0.0
    if rel.kind in (Kind.RELATIVISTIC, Kind.MASSLESS):
        eps = 1e-6 * alpha
        lo, hi = -alpha + eps, alpha - eps
    else:
        half = alpha * (abs(target_v) + 1.0)
        lo, hi = -half, half
        for _ in range(60):
            if _mean_velocity_of(rel, alpha, lo, spec) < target_v:
                break
            lo *= 2.0
        for _ in range(60):
            if _mean_velocity_of(rel, alpha, hi, spec) > target_v:
                break
            hi *= 2.0

    f_lo = _mean_velocity_of(rel, alpha, lo, spec) - target_v
    f_hi = _mean_velocity_of(rel, alpha, hi, spec) - target_v
    if f_lo > 0.0 or f_hi < 0.0:
        raise Unsatisfiable(
            "mean velocity %g not reachable for this dispersion" % target_v
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = _mean_velocity_of(rel, alpha, mid, spec) - target_v
        if f_mid == 0.0 or hi - lo < 1e-15 * max(1.0, alpha):
            return mid
        if f_mid < 0.0:
            lo = mid
        else:
            hi = mid
        if abs(f_mid) < 1e-12 * max(1.0, abs(target_v)):
            return mid
    raise NoConvergence("beta_r bisection did not converge")


def _width_of(rel, alpha, target_v, spec):
    beta_r = _solve_beta_r(rel, alpha, target_v, spec)
    packet = make_minimal(rel, alpha, beta_r, 0.0, spec)

    def w(p):
        v = rel.velocity(p)
        d = beta_r - alpha * v
        return np.stack([d * d, np.ones_like(v)], axis=1)

    vals, _ = expectation_many(packet, w, spec)
    # <x^2> - <x>^2 at beta_i = 0 equals <(beta_r - alpha v)^2> - 0 ... minus
    # the squared mean shift, which vanishes for centered packets.
    x2 = float(np.real(vals[0]))
    return math.sqrt(x2 - 0.0), beta_r


def solve_parameters(rel, targets, mode="alpha", spec=DEFAULT_SPEC):
    """Solve packet parameters from physical targets.

    ``mode='alpha'`` takes ``targets.width_parameter`` as alpha directly;
    ``mode='width'`` additionally adjusts alpha by outer bisection until the
    quadrature position uncertainty matches the target.
    """
    if mode not in ("alpha", "width"):
        raise InvalidInput("mode must be 'alpha' or 'width'")
    if abs(targets.mean_velocity) >= rel.max_speed():
        raise Unsatisfiable(
            "target |<v>| must be strictly below the dispersion's top speed"
        )
    if rel.kind is Kind.LATTICE:
        if targets.mean_velocity != 0.0:
            raise Unsatisfiable("lattice minimal packets do not move sideways")
        a = rel.lattice_spacing
        if abs(targets.mean_position / a - round(targets.mean_position / a)) > _SITE_TOL:
            raise Unsatisfiable("lattice packets must be centered on a lattice site")

    beta_i = -float(targets.mean_position)
    if mode == "alpha":
        alpha = float(targets.width_parameter)
        beta_r = _solve_beta_r(rel, alpha, targets.mean_velocity, spec)
        return make_minimal(rel, alpha, beta_r, beta_i, spec)

    target_dx = float(targets.width_parameter)
    lo = hi = 1.0
    w_lo, _ = _width_of(rel, lo, targets.mean_velocity, spec)
    for _ in range(200):
        if w_lo <= target_dx:
            break
        lo *= 0.5
        w_lo, _ = _width_of(rel, lo, targets.mean_velocity, spec)
    else:
        raise NoConvergence("no lower bracket for the width solve")
    w_hi, _ = _width_of(rel, hi, targets.mean_velocity, spec)
    for _ in range(200):
        if w_hi >= target_dx:
            break
        hi *= 2.0
        w_hi, _ = _width_of(rel, hi, targets.mean_velocity, spec)
    else:
        raise NoConvergence("no upper bracket for the width solve")

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        w_mid, beta_r = _width_of(rel, mid, targets.mean_velocity, spec)
        if abs(w_mid - target_dx) <= 1e-8 * target_dx:
            return make_minimal(rel, mid, beta_r, beta_i, spec)
        if w_mid < target_dx:
            lo = mid
        else:
            hi = mid
    raise NoConvergence("width bisection did not converge")
