"""Pairings of the twisted Fuller measure and of its spectral side with Gaussians.

Both sides are evaluated in closed form term by term: the geometric side is a
sum of point masses at multiples of the periods, the spectral side a sum of
Fourier-Laplace transforms of the Gaussian along the imaginary resonance
lines.  Truncation errors are bounded by Gaussian tail estimates, so the
comparison carries no quadrature error.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from . import kernels
from .flow_model import FlowSpec, fixed_point_fuller_term
from .specfun import DEFAULT_POLICY, PrecisionPolicy
from .spectrum import p_range
from .zeta_engine import DEFAULT_CONVENTION, _convention

SQRT_2PI = math.sqrt(2.0 * math.pi)
SUPPORT_SIGMAS = 6.0


class TestFunctionError(ValueError):
    """Gaussian whose effective support leaves the positive half-line."""

    __test__ = False


@dataclass(frozen=True)
class TestFunction:
    """exp(-(t - t0)^2 / (2 sigma^2))."""

    __test__ = False  # not a pytest class

    t0: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise TestFunctionError("sigma must be positive")
        if not self.t0 - SUPPORT_SIGMAS * self.sigma > 0:
            raise TestFunctionError(f"t0 - 6 sigma must be positive (t0={self.t0}, sigma={self.sigma})")

    def __call__(self, t: float) -> float:
        d = t - self.t0
        return math.exp(-d * d / (2.0 * self.sigma**2))

    def transform(self, z: complex) -> complex:
        """int e^{z t} phi(t) dt over the real line."""
        return self.sigma * SQRT_2PI * cmath.exp(z * self.t0 + z * z * self.sigma**2 / 2.0)

    def support_end(self) -> float:
        return self.t0 + SUPPORT_SIGMAS * self.sigma

    def mass(self, lower: float = 0.0) -> float:
        """int_lower^inf phi."""
        return self.sigma * math.sqrt(math.pi / 2.0) * math.erfc((lower - self.t0) / (self.sigma * math.sqrt(2.0)))


@dataclass(frozen=True)
class GaussianSum:
    """Finite linear combination sum_i c_i phi_i of Gaussian test functions."""

    terms: tuple[tuple[complex, TestFunction], ...]

    def __post_init__(self):
        if not self.terms:
            raise TestFunctionError("empty combination")

    def support_end(self) -> float:
        return max(phi.support_end() for _, phi in self.terms)

    def __call__(self, t: float) -> complex:
        return sum(c * phi(t) for c, phi in self.terms)

    def transform(self, z: complex) -> complex:
        return sum(c * phi.transform(z) for c, phi in self.terms)

    def mass(self, lower: float = 0.0) -> complex:
        return sum(c * phi.mass(lower) for c, phi in self.terms)


@dataclass(frozen=True)
class Pairing:
    value: complex
    bound: float  # certified bound on |exact - value|


def _comb_tail(phi: TestFunction, period: float, start: float) -> float:
    """Bound on sum of phi(m P) over the lattice points beyond ``start`` (>= t0), one side."""
    gap = start - phi.t0
    first = math.exp(-gap * gap / (2.0 * phi.sigma**2))
    return first + phi.sigma / period * math.sqrt(math.pi / 2.0) * math.erfc(gap / (phi.sigma * math.sqrt(2.0)))


def geometric_pairing(spec: FlowSpec, phi: TestFunction, horizon: float, convention=DEFAULT_CONVENTION) -> Pairing:
    """Fuller measure (times t) against phi, periods up to ``horizon``.

    The bound covers the omitted periods beyond the horizon and the part of
    phi's mass on t <= 0, which the full-line transform on the spectral side
    still sees.
    """
    if horizon < phi.support_end():
        raise TestFunctionError("horizon must be at least t0 + 6 sigma")
    convention = _convention(convention)
    if isinstance(phi, GaussianSum):
        return _geometric_pointwise(spec, phi, horizon, convention)
    F = fixed_point_fuller_term(spec)
    value = complex(-F * phi.mass(0.0))
    leak = abs(F) * (phi.mass(-math.inf) - phi.mass(0.0))
    tail = 0.0
    for orbit in spec.closed_orbits:
        P = float(orbit.period)
        sign = -1 if spec.unstable_dim(orbit) % 2 else 1
        m_hi = int(math.floor(horizon / P))
        acc = 0j
        for g in orbit.holonomy_phases:
            w = orbit.delta * convention.eigenvalue(g)
            acc += kernels.gaussian_comb_sum(w, P, phi.t0, phi.sigma, 1, m_hi)
        value -= P * sign * acc
        N = len(orbit.holonomy_phases)
        tail += P * N * _comb_tail(phi, P, (m_hi + 1) * P)
        # m <= 0 mirrored: distance from t0 of the point m = 0 is t0 itself
        tail += P * N * _comb_tail(phi, P, 2.0 * phi.t0)
    return Pairing(value, tail + leak)


def _geometric_pointwise(spec: FlowSpec, phi: GaussianSum, horizon: float, convention) -> Pairing:
    # direct evaluation of the combination at every lattice point
    value = complex(-fixed_point_fuller_term(spec) * phi.mass(0.0))
    for orbit in spec.closed_orbits:
        P = float(orbit.period)
        sign = -1 if spec.unstable_dim(orbit) % 2 else 1
        ws = [orbit.delta * convention.eigenvalue(g) for g in orbit.holonomy_phases]
        for m in range(1, int(math.floor(horizon / P)) + 1):
            value -= P * sign * sum(w**m for w in ws) * phi(m * P)
    bound = sum(abs(c) * geometric_pairing(spec, f, horizon, convention).bound for c, f in phi.terms)
    return Pairing(value, bound)


def _line_tail(phi: TestFunction, period: float, cutoff: float) -> float:
    # lattice spacing in x = 2 pi nu is 2 pi / P; both signs of x
    X = 2.0 * math.pi * cutoff
    s = phi.sigma
    one_side = math.exp(-0.5 * X * X * s * s) + period / (2.0 * math.pi) * math.sqrt(math.pi / 2.0) / s * math.erfc(X * s / math.sqrt(2.0))
    return 2.0 * s * SQRT_2PI * one_side


def spectral_pairing(spec: FlowSpec, phi: TestFunction, cutoff: float) -> Pairing:
    """sum_k (-1)^{n-k+1} sum_{|nu| <= cutoff} dim(C^k & ker) * transform(z0)."""
    if not cutoff > 0:
        raise ValueError("frequency cutoff must be positive")
    n = spec.manifold_dim
    window = Fraction(cutoff).limit_denominator(10**12)
    if isinstance(phi, GaussianSum):
        return _spectral_pointwise(spec, phi, cutoff, window)
    value = 0j
    for fp in spec.fixed_points:
        value += (-1) ** (n - fp.stable_dim + 1) * spec.rank * phi.transform(0j)
    bound = 0.0
    for orbit in spec.closed_orbits:
        P = float(orbit.period)
        # U states sit in degree stable_dim - 1
        weight = (-1) ** (n - orbit.stable_dim)
        for j, g in enumerate(orbit.holonomy_phases):
            ps = p_range(orbit, j, window)
            c = float(orbit.epsilon + g)
            s = kernels.gaussian_line_sum(c, P, phi.t0, phi.sigma, ps.start, ps.stop - 1)
            value += weight * phi.sigma * SQRT_2PI * s
            bound += _line_tail(phi, P, cutoff)
    return Pairing(value, bound)


def _spectral_pointwise(spec: FlowSpec, phi: GaussianSum, cutoff: float, window: Fraction) -> Pairing:
    n = spec.manifold_dim
    value = 0j
    for fp in spec.fixed_points:
        value += (-1) ** (n - fp.stable_dim + 1) * spec.rank * phi.transform(0j)
    for orbit in spec.closed_orbits:
        weight = (-1) ** (n - orbit.stable_dim)
        for j, g in enumerate(orbit.holonomy_phases):
            for p in p_range(orbit, j, window):
                nu = (p + orbit.epsilon + g) / orbit.period
                value += weight * phi.transform(-2j * math.pi * float(nu))
    bound = sum(abs(c) * spectral_pairing(spec, f, cutoff).bound for c, f in phi.terms)
    return Pairing(value, bound)


@dataclass(frozen=True)
class FullerReport:
    geometric: Pairing
    spectral: Pairing
    tolerance: float

    @property
    def discrepancy(self) -> float:
        return abs(self.geometric.value - self.spectral.value)

    @property
    def allowance(self) -> float:
        return self.geometric.bound + self.spectral.bound + self.tolerance

    @property
    def passed(self) -> bool:
        return self.discrepancy <= self.allowance


def fuller_identity_check(
    spec: FlowSpec,
    phi: TestFunction,
    cutoff: float,
    horizon: float,
    convention=DEFAULT_CONVENTION,
    policy: PrecisionPolicy = DEFAULT_POLICY,
) -> FullerReport:
    return FullerReport(
        geometric_pairing(spec, phi, horizon, convention),
        spectral_pairing(spec, phi, cutoff),
        policy.compare_tol,
    )
