"""Hurwitz zeta, log-Gamma and the orbit Dirichlet series.

All routines work in binary64 complex arithmetic with principal branches.
The Hurwitz zeta function is continued to the whole ``s`` plane (except the
pole at 1) and to any parameter ``a`` off the closed negative real axis, the
sum being understood termwise with principal powers ``(m + a)^{-s}``.  For
``Re s >= 1/2`` it is evaluated by Euler-Maclaurin summation; for smaller
``Re s`` the direct terms would be much larger than the result, so the
Abel-Plana (Hermite) integral is used after shifting to ``Re a >= 1``.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels

HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
MAX_BERNOULLI = 15


class SpecialFunctionError(ValueError):
    """Argument outside the domain of a special function."""


@dataclass(frozen=True)
class PrecisionPolicy:
    """Numerical knobs shared by every series evaluation.

    ``em_terms`` is the minimum number of direct terms summed before the
    Euler-Maclaurin tail; ``em_order`` the number of Bernoulli corrections.
    ``compare_tol`` is the default tolerance used by identity checks.
    """

    em_terms: int = 16
    em_order: int = 8
    series_tol: float = 1e-14
    compare_tol: float = 1e-9

    def __post_init__(self):
        if self.em_terms < 8:
            raise ValueError("em_terms must be >= 8")
        if not 1 <= self.em_order <= MAX_BERNOULLI:
            raise ValueError(f"em_order must lie in [1, {MAX_BERNOULLI}]")
        if not (self.series_tol > 0 and self.compare_tol > 0):
            raise ValueError("tolerances must be positive")

    @classmethod
    def from_env(cls, **overrides) -> "PrecisionPolicy":
        """Default policy, with ``RT_PRECISION_TERMS`` overriding ``em_terms``."""
        policy = cls(**overrides)
        raw = os.environ.get("RT_PRECISION_TERMS")
        if raw:
            policy = replace(policy, em_terms=int(raw))
        return policy


DEFAULT_POLICY = PrecisionPolicy()


@lru_cache(maxsize=None)
def bernoulli_numbers(count: int) -> tuple[Fraction, ...]:
    """B_0 .. B_{count-1} (convention B_1 = -1/2)."""
    B = [Fraction(0)] * count
    for m in range(count):
        acc = Fraction(0)
        for k in range(m):
            acc += math.comb(m + 1, k) * B[k]
        B[m] = Fraction(1) if m == 0 else -acc / (m + 1)
    return tuple(B)


@lru_cache(maxsize=None)
def _em_coefficients(order: int) -> np.ndarray:
    B = bernoulli_numbers(2 * order + 1)
    return np.array([float(B[2 * k] / math.factorial(2 * k)) for k in range(1, order + 1)])


@lru_cache(maxsize=None)
def _abel_plana_rule(panels: int = 18, per_panel: int = 24) -> tuple[np.ndarray, np.ndarray]:
    # composite Gauss-Legendre on [0, panels]; the integrand decays like e^{-2 pi t}
    x, w = np.polynomial.legendre.leggauss(per_panel)
    nodes = np.concatenate([k + 0.5 * (x + 1.0) for k in range(panels)])
    weights = np.concatenate([0.5 * w for _ in range(panels)])
    return nodes, weights


@lru_cache(maxsize=None)
def _stirling_coefficients(order: int) -> tuple[float, ...]:
    B = bernoulli_numbers(2 * order + 1)
    return tuple(float(B[2 * k] / (2 * k * (2 * k - 1))) for k in range(1, order + 1))


def _on_negative_axis(a: complex) -> bool:
    return a.imag == 0.0 and a.real <= 0.0


def hurwitz_zeta(s, a, policy: PrecisionPolicy = DEFAULT_POLICY) -> complex:
    """Hurwitz zeta ``sum_{m>=0} (m + a)^{-s}``, analytically continued in ``s``.

    The number of direct terms ``M`` grows until the last Bernoulli correction
    is below ``policy.series_tol`` relative to the result; it starts large
    enough that ``Re(M + a)`` dominates ``|s|`` and the Bernoulli order.
    Left of ``Re s = 1/2`` the Abel-Plana integral representation is used
    instead, where the Euler-Maclaurin remainder no longer decays.
    """
    s = complex(s)
    a = complex(a)
    if s == 1:
        raise SpecialFunctionError("hurwitz_zeta has a pole at s = 1")
    if _on_negative_axis(a):
        raise SpecialFunctionError(f"parameter a={a} lies on the nonpositive real axis")
    if s.real < 0.5:
        return _hurwitz_abel_plana(s, a)
    bern = _em_coefficients(policy.em_order)
    M = max(policy.em_terms, math.ceil(abs(s) + 2 * policy.em_order - a.real), 0)
    if a.real < 0:
        M = max(M, math.ceil(-a.real) + policy.em_terms)
    for _ in range(24):
        head = kernels.power_sum(a, s, M)
        tail, last = kernels.em_correction(a, s, M, bern)
        value = head + tail
        if last <= policy.series_tol * max(abs(value), 1e-300):
            return value
        M *= 2
    return value


def _hurwitz_abel_plana(s: complex, a: complex) -> complex:
    shift = max(0, math.ceil(1.0 - a.real))
    head = kernels.power_sum(a, s, shift) if shift else 0j
    b = a + shift
    nodes, weights = _abel_plana_rule()
    integral = kernels.abel_plana(b, s, nodes, weights)
    return head + 0.5 * b ** (-s) + b ** (1.0 - s) / (s - 1.0) + integral


def log_gamma(a) -> complex:
    """Principal branch of log Gamma on the plane slit along (-inf, 0].

    Stirling's series at ``Re w >= 10`` with upward recursion; the shift adds
    principal logarithms so the imaginary part is continuous off the cut.
    """
    a = complex(a)
    if _on_negative_axis(a):
        raise SpecialFunctionError(f"log_gamma undefined on the nonpositive real axis (a={a})")
    shift = 0
    correction = 0j
    w = a
    if w.real < 10.0:
        shift = math.ceil(10.0 - w.real)
        for m in range(shift):
            correction += cmath.log(a + m)
        w = a + shift
    series = 0j
    winv = 1.0 / w
    winv2 = winv * winv
    power = winv
    for c in _stirling_coefficients(12):
        series += c * power
        power *= winv2
    value = (w - 0.5) * cmath.log(w) - w + HALF_LOG_2PI + series
    return value - correction


def rgamma(s) -> complex:
    """1/Gamma(s), entire; reflection for Re s < 1/2."""
    s = complex(s)
    if s.real >= 0.5:
        return cmath.exp(-log_gamma(s))
    if s.imag == 0.0 and s.real == round(s.real):
        return 0j
    return cmath.sin(math.pi * s) / math.pi * cmath.exp(log_gamma(1.0 - s))


def hurwitz_zeta_zero_values(a) -> tuple[complex, complex]:
    """``(zeta(0, a), d/ds zeta(s, a) at s=0)`` from the Lerch formula."""
    a = complex(a)
    if _on_negative_axis(a):
        raise SpecialFunctionError(f"parameter a={a} lies on the nonpositive real axis")
    return 0.5 - a, log_gamma(a) - HALF_LOG_2PI


def orbit_dirichlet_sum(s, x, policy: PrecisionPolicy = DEFAULT_POLICY) -> complex:
    """``sum_{m>=1} x^m m^{s-1}`` for ``|x| < 1`` by direct summation."""
    s = complex(s)
    x = complex(x)
    r = abs(x)
    if r >= 1.0:
        raise SpecialFunctionError(f"orbit series diverges for |x| = {r} >= 1")
    if r == 0.0:
        return 0j
    alpha = max(s.real - 1.0, 0.0)
    # from m >= min_terms on, consecutive term ratios stay below (1 + r)/2
    rho = (1.0 + r) / (2.0 * r)
    min_terms = 1 if alpha == 0.0 else math.ceil(1.0 / (rho ** (1.0 / alpha) - 1.0))
    tail_factor = 2.0 / (1.0 - r)
    value, _ = kernels.dirichlet_sum(x, s, policy.series_tol, 50_000_000, min_terms, tail_factor)
    return complex(value)
