"""Zeta functions, regularized torsion and torsion functions of a flow spec.

Each closed orbit ``L`` and phase index ``j`` contribute one arithmetic
progression of resonances ``z0 = -2 i pi (p + q) / P`` (``p`` in Z, ``q`` the
shift in (0, 1]).  All infinite sums over resonances are grouped per
progression and continued through Hurwitz zeta functions; derivatives at
``s = 0`` go through Lerch's formula, never through finite differences.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .flow_model import ClosedOrbit, FlowSpec, fixed_point_fuller_term, orbit_multiplicity_m
from .specfun import (
    DEFAULT_POLICY,
    PrecisionPolicy,
    hurwitz_zeta,
    hurwitz_zeta_zero_values,
    log_gamma,
    orbit_dirichlet_sum,
    rgamma,
)
from .spectrum import spectral_fixed_constant

TWO_PI = 2.0 * math.pi
LOG_2PI = math.log(TWO_PI)


class ZetaDomainError(ValueError):
    """Argument outside the supported domain (pole, Re z <= 0, ...)."""


class MonodromyConvention(str, enum.Enum):
    """Orientation of the holonomy eigenvalue entering geometric formulas."""

    INVERSE = "inverse"  # lambda_j = exp(-2 i pi gamma_j)
    DIRECT = "direct"  # lambda_j = exp(+2 i pi gamma_j)

    def eigenvalue(self, gamma: Fraction) -> complex:
        sign = -1.0 if self is MonodromyConvention.INVERSE else 1.0
        return cmath.exp(sign * 2j * math.pi * float(gamma))


DEFAULT_CONVENTION = MonodromyConvention.INVERSE


def _convention(c) -> MonodromyConvention:
    return c if isinstance(c, MonodromyConvention) else MonodromyConvention(c)


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def _check_right_half_plane(z: complex) -> None:
    if not z.real > 0:
        raise ZetaDomainError(f"Re z must be positive (got z={z})")


def _pairs(spec: FlowSpec):
    """(orbit, shift q in (0,1], exact q) for every orbit and phase."""
    for orbit in spec.closed_orbits:
        for q in orbit.shifts():
            yield orbit, q


# ---------------------------------------------------------------------------
# zeta_V


def _xi(s: complex, q: Fraction, policy: PrecisionPolicy) -> complex:
    if q == 1:
        return 2.0 * hurwitz_zeta(s, 1.0, policy)
    return hurwitz_zeta(s, float(q), policy) + hurwitz_zeta(s, float(1 - q), policy)


def zeta_v(spec: FlowSpec, s, policy: PrecisionPolicy = DEFAULT_POLICY) -> complex:
    """sum over (orbit, j) of (-1)^{n + unstable_dim} (P / 2 pi)^s xi_j(s)."""
    s = complex(s)
    if s == 1:
        raise ZetaDomainError("zeta_v has a pole at s = 1")
    n = spec.manifold_dim
    total = 0j
    for orbit, q in _pairs(spec):
        sign = _sign(n + spec.unstable_dim(orbit))
        total += sign * (float(orbit.period) / TWO_PI) ** s * _xi(s, q, policy)
    return total


def zeta_v_residue(spec: FlowSpec) -> float:
    """Residue of zeta_v at s = 1."""
    n = spec.manifold_dim
    acc = sum(_sign(n + spec.unstable_dim(o)) * o.period for o in spec.closed_orbits)
    return spec.rank * float(acc) / math.pi


def zeta_v_derivative_at_zero(spec: FlowSpec) -> float:
    """zeta_V'(0) from Lerch's formula, one (orbit, j) at a time."""
    n = spec.manifold_dim
    total = 0.0
    for orbit, q in _pairs(spec):
        sign = _sign(n + spec.unstable_dim(orbit))
        if q == 1:
            _, d1 = hurwitz_zeta_zero_values(1.0)
            xi0, dxi0 = -1.0, 2.0 * d1.real
        else:
            z1, d1 = hurwitz_zeta_zero_values(float(q))
            z2, d2 = hurwitz_zeta_zero_values(float(1 - q))
            xi0, dxi0 = (z1 + z2).real, (d1 + d2).real
        total += sign * (dxi0 + math.log(float(orbit.period) / TWO_PI) * xi0)
    return total


@dataclass(frozen=True)
class RegularizedTorsion:
    value: float  # exp(-zeta_V'(0)), closed product
    parity_value: float  # exp((-1)^n zeta_V'(0))
    log_value: float
    lerch_value: float  # exp(-zeta_V'(0)) assembled from hurwitz_zeta_zero_values

    @property
    def discrepancy(self) -> float:
        return abs(self.value - self.lerch_value)


def regularized_torsion(spec: FlowSpec) -> RegularizedTorsion:
    n = spec.manifold_dim
    log_value = 0.0
    for orbit in spec.closed_orbits:
        sign = _sign(n + spec.unstable_dim(orbit))
        for q in orbit.shifts():
            if q != 1:
                log_value += sign * math.log(2.0 * math.sin(math.pi * float(q)))
        log_value += sign * orbit_multiplicity_m(orbit) * math.log(float(orbit.period))
    lerch_log = -zeta_v_derivative_at_zero(spec)
    parity = -log_value if n % 2 == 0 else log_value
    return RegularizedTorsion(
        value=math.exp(log_value),
        parity_value=math.exp(parity),
        log_value=log_value,
        lerch_value=math.exp(lerch_log),
    )


def torsion_partial_logs(spec: FlowSpec, cutoffs) -> list[tuple[int, float]]:
    """Renormalized partial log-products of the line torsions.

    For every cutoff ``K`` and every progression, the factors ``2 pi |p + q| / P``
    with ``-K <= p < K`` (the ``z0 = 0`` member excluded) are multiplied and
    the divergent part ``(2 pi / P)^{2K} Gamma(K) Gamma(K+1) / 2 pi`` removed;
    signed by ``(-1)^{n + unstable_dim}`` the sum tends to the log of
    ``regularized_torsion(spec).value`` at rate O(1/K).  Used for monitoring only.
    """
    n = spec.manifold_dim
    out = []
    for K in cutoffs:
        K = int(K)
        if K < 1:
            raise ValueError("cutoffs must be positive integers")
        counter_gamma = log_gamma(K).real + log_gamma(K + 1).real - LOG_2PI
        total = 0.0
        for orbit, q in _pairs(spec):
            scale = math.log(TWO_PI / float(orbit.period))
            acc = 0.0
            for p in range(-K, K):
                x = p + q
                if x != 0:
                    acc += math.log(abs(float(x)))
            acc += (2 * K - (1 if q == 1 else 0)) * scale
            acc -= 2 * K * scale + counter_gamma
            total += _sign(n + spec.unstable_dim(orbit)) * acc
        out.append((K, total))
    return out


# ---------------------------------------------------------------------------
# zeta_RS and its determinant


def _rs_weight(spec: FlowSpec, orbit: ClosedOrbit) -> int:
    # sum_k (-1)^{n-k} k dim C^k over the pair in degrees d-1, d collapses to this
    return -_sign(spec.unstable_dim(orbit))


def _hurwitz_parameters(orbit: ClosedOrbit, q: Fraction, z: complex) -> tuple[complex, complex, float]:
    P = float(orbit.period)
    a_plus = float(q) - 1j * P * z / TWO_PI
    return a_plus, 1.0 - a_plus, TWO_PI / P


def zeta_rs(spec: FlowSpec, s, z, policy: PrecisionPolicy = DEFAULT_POLICY) -> complex:
    """sum over nonzero resonances of (-1)^{n-k} k dim C^k(z0) (z - z0)^{-s}."""
    s = complex(s)
    z = complex(z)
    _check_right_half_plane(z)
    if s == 1:
        raise ZetaDomainError("zeta_rs has a pole at s = 1")
    total = 0j
    for orbit, q in _pairs(spec):
        a_plus, a_minus, c = _hurwitz_parameters(orbit, q, z)
        value = (1j * c) ** (-s) * hurwitz_zeta(s, a_plus, policy)
        value += (-1j * c) ** (-s) * hurwitz_zeta(s, a_minus, policy)
        if q == 1:
            value -= z ** (-s)
        total += _rs_weight(spec, orbit) * value
    return total


def zeta_rs_derivative_at_zero(spec: FlowSpec, z) -> complex:
    """d/ds zeta_RS(s, z) at s = 0, exactly through Lerch's formula."""
    z = complex(z)
    _check_right_half_plane(z)
    total = 0j
    for orbit, q in _pairs(spec):
        a_plus, a_minus, _ = _hurwitz_parameters(orbit, q, z)
        # the log c parts cancel because zeta(0, a+) + zeta(0, a-) = 0
        _, dp = hurwitz_zeta_zero_values(a_plus)
        _, dm = hurwitz_zeta_zero_values(a_minus)
        value = 0.5j * math.pi * (a_plus - a_minus) + dp + dm
        if q == 1:
            value += cmath.log(z)
        total += _rs_weight(spec, orbit) * value
    return total


def big_z_rs(spec: FlowSpec, z) -> complex:
    """exp(-d/ds zeta_RS(0, z))."""
    return cmath.exp(-zeta_rs_derivative_at_zero(spec, z))


def _orbit_factor(orbit: ClosedOrbit, z: complex, convention: MonodromyConvention) -> complex:
    prod = 1.0 + 0j
    decay = cmath.exp(-float(orbit.period) * z) * orbit.delta
    for g in orbit.holonomy_phases:
        prod *= 1.0 - decay * convention.eigenvalue(g)
    return prod


def z_rs_closed_form(spec: FlowSpec, z, convention=DEFAULT_CONVENTION) -> complex:
    """prod over orbits of (z^{-m} prod_j (1 - e^{-P z} Delta lambda_j))^{-(-1)^{unstable_dim}}."""
    z = complex(z)
    convention = _convention(convention)
    result = 1.0 + 0j
    for orbit in spec.closed_orbits:
        m = orbit_multiplicity_m(orbit)
        if z == 0 and m:
            raise ZetaDomainError("z = 0 is singular when some orbit has m > 0")
        if z != 0 and z.real < 0:
            raise ZetaDomainError(f"Re z must be nonnegative (got z={z})")
        w = _rs_weight(spec, orbit)
        factor = _orbit_factor(orbit, z, convention)
        if m:
            factor *= z ** (-m)
        result *= factor**w
    return result


# ---------------------------------------------------------------------------
# zeta flat and the torsion function


def zeta_flat(
    spec: FlowSpec,
    s,
    z,
    method: str = "spectral",
    policy: PrecisionPolicy = DEFAULT_POLICY,
    convention=DEFAULT_CONVENTION,
) -> complex:
    """Flat zeta function, from resonances (``spectral``) or from orbits (``geometric``)."""
    s = complex(s)
    z = complex(z)
    _check_right_half_plane(z)
    if method == "spectral":
        return spectral_fixed_constant(spec) * z ** (-s) + zeta_rs(spec, s, z, policy)
    if method != "geometric":
        raise ValueError(f"unknown method {method!r}")
    convention = _convention(convention)
    value = -fixed_point_fuller_term(spec) * z ** (-s)
    orbit_part = 0j
    for orbit in spec.closed_orbits:
        P = float(orbit.period)
        decay = cmath.exp(-P * z) * orbit.delta
        inner = sum(orbit_dirichlet_sum(s, decay * convention.eigenvalue(g), policy) for g in orbit.holonomy_phases)
        orbit_part += _sign(spec.unstable_dim(orbit)) * P**s * inner
    return value - rgamma(s) * orbit_part


def torsion_function(spec: FlowSpec, z, convention=DEFAULT_CONVENTION) -> complex:
    """Z(z) = z^{-F} prod_{orbit, j} (1 - e^{-P z} Delta lambda_j)^{-(-1)^{unstable_dim}}.

    ``F = N sum_fixed (-1)^{unstable_dim}``, the fixed-point weight of the
    Fuller measure (equal to the Euler characteristic in even dimension).
    """
    z = complex(z)
    convention = _convention(convention)
    F = fixed_point_fuller_term(spec)
    if z == 0:
        if F or any(orbit_multiplicity_m(o) for o in spec.closed_orbits):
            raise ZetaDomainError("Z(0) is singular unless F = 0 and every m vanishes")
    elif z.real < 0:
        raise ZetaDomainError(f"Re z must be nonnegative (got z={z})")
    result = z ** (-F) if F else 1.0 + 0j
    for orbit in spec.closed_orbits:
        result *= _orbit_factor(orbit, z, convention) ** _rs_weight(spec, orbit)
    return result


def torsion_function_spectral(spec: FlowSpec, z) -> complex:
    """exp(-d/ds zeta_flat(0, z)) from the resonance data alone."""
    z = complex(z)
    _check_right_half_plane(z)
    C = spectral_fixed_constant(spec)
    return cmath.exp(C * cmath.log(z) - zeta_rs_derivative_at_zero(spec, z))
