"""Finite based cochain complexes and their torsion.

A :class:`BasedComplex` stores, for degrees ``0..n``, an ordered basis and the
differential blocks ``D[k] : C^k -> C^{k+1}`` (shape ``dim_{k+1} x dim_k``),
optionally with a chain contraction ``R[k] : C^k -> C^{k-1}``.  The torsion
is ``|det (D + R)|`` restricted to even degrees -> odd degrees, computed in
the preferred bases and accumulated in the log domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .flow_model import FlowSpec, strictly_below
from .spectrum import orbit_states

RANK_RTOL = 1e-10
CONTRACTION_TOL = 1e-12


class TorsionError(ValueError):
    """Complex is not acyclic, or its contraction is not a contraction."""


class BasisLabel(NamedTuple):
    kind: str  # "fixed", "U", "Ut" or "cell"
    element: str
    j: int | None = None
    p: int | None = None

    def __str__(self) -> str:
        if self.kind == "cell":
            return self.element
        if self.p is None:
            return f"{self.kind}({self.element},j={self.j})"
        return f"{self.kind}({self.element},j={self.j},p={self.p})"


@dataclass(frozen=True)
class TorsionValue:
    value: float
    log_value: float

    @classmethod
    def from_log(cls, log_value: float) -> "TorsionValue":
        return cls(math.exp(log_value), float(log_value))


@dataclass(frozen=True, eq=False)
class BasedComplex:
    labels: tuple[tuple[BasisLabel, ...], ...]
    D: tuple[np.ndarray, ...]
    R: tuple[np.ndarray, ...] | None = None
    empty: bool = False

    @property
    def top_degree(self) -> int:
        return len(self.labels) - 1

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.labels)

    def offsets(self) -> list[int]:
        out = [0]
        for d in self.dims:
            out.append(out[-1] + d)
        return out

    def total_matrices(self) -> tuple[np.ndarray, np.ndarray | None]:
        """D and R assembled on the direct sum of all degrees."""
        off = self.offsets()
        size = off[-1]
        Dt = np.zeros((size, size), dtype=complex)
        for k, block in enumerate(self.D):
            if k + 1 <= self.top_degree:
                Dt[off[k + 1] : off[k + 2], off[k] : off[k + 1]] = block
        if self.R is None:
            return Dt, None
        Rt = np.zeros((size, size), dtype=complex)
        for k, block in enumerate(self.R):
            if k >= 1:
                Rt[off[k - 1] : off[k], off[k] : off[k + 1]] = block
        return Dt, Rt

    def to_dict(self) -> dict:
        def enc(m):
            return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]

        doc = {
            "degrees": list(range(self.top_degree + 1)),
            "labels": [[str(b) for b in basis] for basis in self.labels],
            "D": [enc(m) for m in self.D],
            "empty": self.empty,
        }
        if self.R is not None:
            doc["R"] = [enc(m) for m in self.R]
        return doc


def _zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=complex)


def complex_from_matrices(
    dims: Sequence[int],
    differentials: Sequence[np.ndarray] | None = None,
    contraction: Sequence[np.ndarray] | None = None,
    labels: Sequence[Sequence[str]] | None = None,
) -> BasedComplex:
    """Build a complex from dense blocks; missing differentials are zero.

    ``differentials[k]`` maps degree k to k+1, ``contraction[k]`` maps k to k-1
    (``contraction[0]`` is ignored).
    """
    dims = list(dims)
    top = len(dims) - 1
    if labels is None:
        labels = [[f"e{k}_{i}" for i in range(d)] for k, d in enumerate(dims)]
    lab = tuple(tuple(BasisLabel("cell", str(x)) for x in basis) for basis in labels)
    D = []
    for k in range(top + 1):
        rows = dims[k + 1] if k < top else 0
        if differentials is not None and k < len(differentials) and differentials[k] is not None:
            block = np.asarray(differentials[k], dtype=complex).reshape(rows, dims[k])
        else:
            block = _zeros(rows, dims[k])
        D.append(block)
    R = None
    if contraction is not None:
        R = [_zeros(0, dims[0])]
        for k in range(1, top + 1):
            block = contraction[k] if k < len(contraction) else None
            R.append(_zeros(dims[k - 1], dims[k]) if block is None else np.asarray(block, dtype=complex).reshape(dims[k - 1], dims[k]))
        R = tuple(R)
    return BasedComplex(lab, tuple(D), R)


def direct_sum(*complexes: BasedComplex) -> BasedComplex:
    """Disjoint union; all summands must have the same top degree."""
    top = complexes[0].top_degree
    if any(c.top_degree != top for c in complexes):
        raise ValueError("direct_sum needs complexes of equal length")
    labels = tuple(tuple(b for c in complexes for b in c.labels[k]) for k in range(top + 1))

    def block_diag(blocks):
        rows = sum(b.shape[0] for b in blocks)
        cols = sum(b.shape[1] for b in blocks)
        out = _zeros(rows, cols)
        r = c = 0
        for b in blocks:
            out[r : r + b.shape[0], c : c + b.shape[1]] = b
            r += b.shape[0]
            c += b.shape[1]
        return out

    D = tuple(block_diag([c.D[k] for c in complexes]) for k in range(top + 1))
    R = None
    if all(c.R is not None for c in complexes):
        R = tuple(block_diag([c.R[k] for c in complexes]) for k in range(top + 1))
    return BasedComplex(labels, D, R, all(c.empty for c in complexes))


# ---------------------------------------------------------------------------
# Checks


def _scale(*mats: np.ndarray) -> float:
    return max([1.0] + [float(np.abs(m).max()) for m in mats if m.size])


def differential_defect(cx: BasedComplex) -> float:
    """max |D_{k+1} D_k|, relative to the largest entry of D (at least 1)."""
    worst = 0.0
    for k in range(cx.top_degree - 1):
        prod = cx.D[k + 1] @ cx.D[k]
        if prod.size:
            worst = max(worst, float(np.abs(prod).max()))
    return worst / _scale(*cx.D) ** 2


def contraction_defects(cx: BasedComplex) -> tuple[float, float]:
    """(max |(D+R)^2 - I|, max |R^2|) on the total space."""
    Dt, Rt = cx.total_matrices()
    if Rt is None:
        raise TorsionError("complex carries no contraction")
    Q = Dt + Rt
    eye = np.eye(Q.shape[0])
    a = float(np.abs(Q @ Q - eye).max()) if Q.size else 0.0
    b = float(np.abs(Rt @ Rt).max()) if Q.size else 0.0
    return a, b


# ---------------------------------------------------------------------------
# Normal-form model complex at a resonance


def model_complex(spec: FlowSpec, nu, seed: int | None = 0, perturb: bool = True) -> BasedComplex:
    """Resonant-state complex at ``nu != 0`` in a perturbed preferred basis.

    Each contributing (orbit, j, p) gives a pair ``U`` (degree stable_dim-1),
    ``Ut`` (degree stable_dim) with ``D U = z0 Ut`` and ``R Ut = U / z0``.
    The basis of every degree is then changed by a seeded unit-triangular
    matrix whose off-diagonal entries couple a state only to states of
    elements strictly below it in the Smale order.
    """
    nu = nu if isinstance(nu, Fraction) else Fraction(nu)
    if nu == 0:
        raise TorsionError("the complex at nu = 0 is not acyclic")
    n = spec.manifold_dim
    z0 = -2j * math.pi * float(nu)
    states = orbit_states(spec, nu)

    labels: list[list[BasisLabel]] = [[] for _ in range(n + 1)]
    pairs = []
    for orbit, j, p in states:
        d = orbit.stable_dim
        labels[d - 1].append(BasisLabel("U", orbit.id, j, p))
        labels[d].append(BasisLabel("Ut", orbit.id, j, p))
        pairs.append((d, len(labels[d - 1]) - 1, len(labels[d]) - 1))

    dims = [len(b) for b in labels]
    D = [_zeros(dims[k + 1] if k < n else 0, dims[k]) for k in range(n + 1)]
    R = [_zeros(dims[k - 1] if k > 0 else 0, dims[k]) for k in range(n + 1)]
    for d, iu, iut in pairs:
        D[d - 1][iut, iu] = z0
        R[d][iu, iut] = 1.0 / z0

    if perturb and states:
        rng = np.random.default_rng(seed)
        below = strictly_below(spec)
        T = []
        for k in range(n + 1):
            basis = labels[k]
            # order by a linear extension so T is upper triangular
            m = np.eye(len(basis), dtype=complex)
            for a, la in enumerate(basis):
                for b, lb in enumerate(basis):
                    if la.element in below.get(lb.element, ()):
                        m[a, b] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            T.append(m)
        Tinv = [np.linalg.inv(t) for t in T]
        D = [Tinv[k + 1] @ D[k] @ T[k] if k < n else D[k] for k in range(n + 1)]
        R = [Tinv[k - 1] @ R[k] @ T[k] if k > 0 else R[k] for k in range(n + 1)]

    return BasedComplex(tuple(tuple(b) for b in labels), tuple(D), tuple(R), empty=not states)


# ---------------------------------------------------------------------------
# Torsion


def _even_odd_block(cx: BasedComplex) -> np.ndarray:
    Dt, Rt = cx.total_matrices()
    Q = Dt + Rt
    off = cx.offsets()
    even = [i for k in range(0, cx.top_degree + 1, 2) for i in range(off[k], off[k + 1])]
    odd = [i for k in range(1, cx.top_degree + 1, 2) for i in range(off[k], off[k + 1])]
    if len(even) != len(odd):
        raise TorsionError(f"even/odd dimensions differ ({len(even)} vs {len(odd)}); complex is not acyclic")
    return Q[np.ix_(odd, even)]


def torsion_determinant(cx: BasedComplex, tol: float = 1e-8) -> TorsionValue:
    """``|det (D + R)|`` from even to odd degrees.

    The contraction identities are checked first, with ``tol`` relative to the
    size of ``D`` and ``R``.
    """
    if cx.R is None:
        raise TorsionError("complex carries no contraction; use cw_torsion")
    if differential_defect(cx) > tol:
        raise TorsionError("D does not square to zero")
    Dt, Rt = cx.total_matrices()
    scale = _scale(Dt) * _scale(Rt)
    sq, r2 = contraction_defects(cx)
    if sq > tol * scale or r2 > tol * _scale(Rt) ** 2:
        raise TorsionError(f"contraction identities violated ((D+R)^2-I: {sq:.2e}, R^2: {r2:.2e})")
    block = _even_odd_block(cx)
    if block.size == 0:
        return TorsionValue(1.0, 0.0)
    sign, logabs = np.linalg.slogdet(block)
    if sign == 0:
        raise TorsionError("(D+R) is singular on even degrees")
    return TorsionValue.from_log(float(logabs))


def torsion_closed_form(spec: FlowSpec, nu) -> TorsionValue:
    """Product over contributing (orbit, j, p) of |2 pi nu| ^ (-1)^{n + unstable_dim}."""
    nu = nu if isinstance(nu, Fraction) else Fraction(nu)
    if nu == 0:
        raise TorsionError("torsion is only defined at nonzero resonances")
    n = spec.manifold_dim
    log_value = 0.0
    for orbit, j, p in orbit_states(spec, nu):
        x = (p + orbit.epsilon + orbit.holonomy_phases[j]) / orbit.period
        log_value += (-1) ** (n + spec.unstable_dim(orbit)) * math.log(2 * math.pi * abs(float(x)))
    return TorsionValue.from_log(log_value)


@dataclass(frozen=True)
class Cohomology:
    dims: tuple[int, ...]
    ambiguous: bool
    threshold: float

    def __iter__(self):
        return iter(self.dims)


def _rank(m: np.ndarray, rtol: float) -> tuple[int, bool]:
    if m.size == 0:
        return 0, False
    sv = np.linalg.svd(m, compute_uv=False)
    top = float(sv[0]) if sv.size else 0.0
    if top == 0.0:
        return 0, False
    cut = rtol * top
    ambiguous = bool(np.any((sv > cut / 100) & (sv < cut * 100)))
    return int(np.sum(sv > cut)), ambiguous


def complex_cohomology(cx: BasedComplex, rtol: float = RANK_RTOL) -> Cohomology:
    """dim ker D_k - rank D_{k-1}, with numerical ranks.

    Singular values below ``rtol`` times the largest singular value of the
    same block count as zero; ``ambiguous`` is set when some singular value
    lies within a factor 100 of that cut.
    """
    if differential_defect(cx) > 1e-8:
        raise TorsionError("D does not square to zero")
    ranks = []
    ambiguous = False
    for block in cx.D:
        r, amb = _rank(block, rtol)
        ranks.append(r)
        ambiguous |= amb
    dims = []
    for k, d in enumerate(cx.dims):
        prev = ranks[k - 1] if k > 0 else 0
        dims.append(d - ranks[k] - prev)
    return Cohomology(tuple(dims), ambiguous, rtol)


def synthesize_contraction(cx: BasedComplex) -> BasedComplex:
    """Attach R = pseudo-inverse of D; for an acyclic complex R^2 = 0 and DR + RD = I."""
    R = [_zeros(0, cx.dims[0])]
    for k in range(1, cx.top_degree + 1):
        R.append(np.linalg.pinv(cx.D[k - 1]))
    return BasedComplex(cx.labels, cx.D, tuple(R), cx.empty)


def cw_torsion(cx: BasedComplex) -> TorsionValue:
    """Torsion of an acyclic based complex, with a synthesized contraction."""
    h = complex_cohomology(cx)
    if any(h.dims):
        raise TorsionError(f"complex is not acyclic (cohomology {h.dims})")
    return torsion_determinant(synthesize_contraction(cx))


def circle_complex(u: complex) -> BasedComplex:
    """Cellular cochains of the circle twisted by holonomy ``u``: C^0 -> C^1, x -> (u - 1) x."""
    return complex_from_matrices([1, 1], [np.array([[u - 1.0]])], labels=[["vertex"], ["edge"]])
