"""Resonances on the imaginary axis and their counting identities.

A resonance ``z0 = -2*i*pi*nu`` is labelled by its exact rational frequency
``nu``.  Fixed points contribute ``N`` states at ``nu = 0`` in degree
``stable_dim``.  A closed orbit contributes, for every phase index ``j`` and
every integer ``p`` with ``nu = (p + eps + gamma_j) / P``, a state ``U`` in
degree ``stable_dim - 1`` (killed by the contraction with the flow) and a
state ``Ut`` in degree ``stable_dim``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .flow_model import ClosedOrbit, FlowSpec, euler_characteristic, orbit_multiplicity_m


class Contributor(NamedTuple):
    kind: str  # "fixed", "U" or "Ut"
    element: str
    j: int
    p: int | None


@dataclass(frozen=True)
class ResonanceLine:
    frequency: Fraction
    per_degree_dim: tuple[int, ...]
    per_degree_kernel_dim: tuple[int, ...]
    contributors: tuple[tuple[Contributor, ...], ...]

    @property
    def z0(self) -> complex:
        return -2j * math.pi * float(self.frequency)

    @property
    def total_dim(self) -> int:
        return sum(self.per_degree_dim)


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _check_degree(spec: FlowSpec, k: int) -> None:
    if not 0 <= k <= spec.manifold_dim:
        raise ValueError(f"degree k={k} outside [0, {spec.manifold_dim}]")


def orbit_states(spec: FlowSpec, nu) -> list[tuple[ClosedOrbit, int, int]]:
    """All (orbit, j, p) with (p + eps + gamma_j) / P == nu, exactly."""
    nu = _as_fraction(nu)
    out = []
    for orbit in spec.closed_orbits:
        for j, g in enumerate(orbit.holonomy_phases):
            p = nu * orbit.period - orbit.epsilon - g
            if p.denominator == 1:
                out.append((orbit, j, int(p)))
    return out


def resonance_line(spec: FlowSpec, nu) -> ResonanceLine:
    """The line at ``nu`` (all dimensions zero when ``nu`` is off-resonance)."""
    nu = _as_fraction(nu)
    n = spec.manifold_dim
    dims = [0] * (n + 1)
    kdims = [0] * (n + 1)
    contrib: list[list[Contributor]] = [[] for _ in range(n + 1)]
    if nu == 0:
        for fp in spec.fixed_points:
            for j in range(spec.rank):
                dims[fp.stable_dim] += 1
                kdims[fp.stable_dim] += 1
                contrib[fp.stable_dim].append(Contributor("fixed", fp.id, j, None))
    for orbit, j, p in orbit_states(spec, nu):
        d = orbit.stable_dim
        dims[d - 1] += 1
        kdims[d - 1] += 1
        contrib[d - 1].append(Contributor("U", orbit.id, j, p))
        dims[d] += 1
        contrib[d].append(Contributor("Ut", orbit.id, j, p))
    return ResonanceLine(nu, tuple(dims), tuple(kdims), tuple(tuple(c) for c in contrib))


def p_range(orbit: ClosedOrbit, j: int, window: Fraction) -> range:
    """Integers p with |(p + eps + gamma_j) / P| <= window."""
    c = orbit.epsilon + orbit.holonomy_phases[j]
    reach = window * orbit.period
    return range(math.ceil(-reach - c), math.floor(reach - c) + 1)


def resonances(spec: FlowSpec, window) -> list[ResonanceLine]:
    """Every line with ``|nu| <= window``, sorted by frequency."""
    window = _as_fraction(window)
    if window < 0:
        raise ValueError("window must be nonnegative")
    freqs: set[Fraction] = set()
    if spec.fixed_points:
        freqs.add(Fraction(0))
    for orbit in spec.closed_orbits:
        c_base = orbit.epsilon
        for j, g in enumerate(orbit.holonomy_phases):
            for p in p_range(orbit, j, window):
                freqs.add((p + c_base + g) / orbit.period)
    return [resonance_line(spec, nu) for nu in sorted(freqs)]


def nonzero_lines(spec: FlowSpec, count: int) -> list[ResonanceLine]:
    """The ``count`` nonzero lines closest to 0 (ties broken by frequency)."""
    if not spec.closed_orbits:
        return []
    window = Fraction(1)
    while True:
        lines = [ln for ln in resonances(spec, window) if ln.frequency != 0]
        if len(lines) >= count:
            lines.sort(key=lambda ln: (abs(ln.frequency), ln.frequency))
            return lines[:count]
        window *= 2


def dim_resonant_space(spec: FlowSpec, k: int, nu) -> int:
    _check_degree(spec, k)
    return resonance_line(spec, nu).per_degree_dim[k]


def dim_kernel_space(spec: FlowSpec, k: int, nu) -> int:
    _check_degree(spec, k)
    return resonance_line(spec, nu).per_degree_kernel_dim[k]


def orbit_multiplicity_by_stable_dim(spec: FlowSpec) -> tuple[int, ...]:
    """A_j = sum of m over orbits with stable_dim j, for j = 0..n+1."""
    A = [0] * (spec.manifold_dim + 2)
    for orbit in spec.closed_orbits:
        A[orbit.stable_dim] += orbit_multiplicity_m(orbit, spec.bundle)
    return tuple(A)


@dataclass(frozen=True)
class MorseRow:
    k: int
    lhs: int
    rhs: int
    holds: bool
    equality_required: bool

    @property
    def passed(self) -> bool:
        return self.holds and (self.lhs == self.rhs or not self.equality_required)


def morse_report(spec: FlowSpec) -> list[MorseRow]:
    """Rows of the generalized Morse-Smale inequalities, k = 0..n."""
    if spec.betti is None:
        raise ValueError("morse_report needs betti numbers in the spec")
    n = spec.manifold_dim
    N = spec.rank
    c = spec.fixed_counts()
    A = orbit_multiplicity_by_stable_dim(spec)
    rows = []
    for k in range(n + 1):
        lhs = A[k + 1] + N * sum((-1) ** (k - j) * c[j] for j in range(k + 1))
        rhs = sum((-1) ** (k - j) * spec.betti[j] for j in range(k + 1))
        rows.append(MorseRow(k, lhs, rhs, lhs >= rhs, k == n))
    return rows


def koszul_homology(spec: FlowSpec) -> tuple[int, ...]:
    """Homology dimensions of the contraction complex on the states at 0."""
    return tuple(spec.rank * ck for ck in spec.fixed_counts())


def alternating_dimension_sum(spec: FlowSpec, nu) -> int:
    line = resonance_line(spec, nu)
    return sum((-1) ** k * d for k, d in enumerate(line.per_degree_dim))


def spectral_fixed_constant(spec: FlowSpec) -> int:
    """sum_k (-1)^{n-k+1} dim(C^k(0) & Ker contraction), from the line at 0."""
    n = spec.manifold_dim
    line = resonance_line(spec, 0)
    return sum((-1) ** (n - k + 1) * d for k, d in enumerate(line.per_degree_kernel_dim))


def euler_from_resonances(spec: FlowSpec) -> int:
    return alternating_dimension_sum(spec, 0)


__all__ = [
    "Contributor",
    "MorseRow",
    "ResonanceLine",
    "alternating_dimension_sum",
    "dim_kernel_space",
    "dim_resonant_space",
    "euler_characteristic",
    "euler_from_resonances",
    "koszul_homology",
    "morse_report",
    "nonzero_lines",
    "orbit_states",
    "p_range",
    "resonance_line",
    "resonances",
    "spectral_fixed_constant",
]
