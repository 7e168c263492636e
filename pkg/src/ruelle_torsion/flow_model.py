"""Combinatorial data of a Morse-Smale flow twisted by a flat unitary bundle.

Periods and holonomy phases are exact :class:`fractions.Fraction` values so
that coincidences between resonance lines are decided exactly.  Only data
consistency is validated, not geometric realisability.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable

FORMAT_VERSION = 1
MAX_DENOMINATOR = 10**12


class SpecError(ValueError):
    """Base class for problems with a flow specification."""


class SpecSchemaError(SpecError):
    """The document does not follow the canonical JSON schema."""


class SpecValidationError(SpecError):
    """The document parses but violates an invariant."""

    def __init__(self, rule: str, message: str):
        super().__init__(f"{rule}: {message}")
        self.rule = rule
        self.message = message


@dataclass(frozen=True)
class FixedPoint:
    id: str
    stable_dim: int


@dataclass(frozen=True)
class ClosedOrbit:
    id: str
    period: Fraction
    stable_dim: int
    twisted: bool
    holonomy_phases: tuple[Fraction, ...]

    @property
    def epsilon(self) -> Fraction:
        """0 for untwisted orbits, 1/2 for twisted ones."""
        return Fraction(1, 2) if self.twisted else Fraction(0)

    @property
    def delta(self) -> int:
        """Twisting index, +1 or -1."""
        return -1 if self.twisted else 1

    def shifts(self) -> tuple[Fraction, ...]:
        """The q_j in (0, 1] with q_j = epsilon + gamma_j mod 1."""
        out = []
        for g in self.holonomy_phases:
            r = (self.epsilon + g) % 1
            out.append(Fraction(1) if r == 0 else r)
        return tuple(out)


@dataclass(frozen=True)
class FlatBundleData:
    rank: int


@dataclass(frozen=True)
class FlowSpec:
    manifold_dim: int
    bundle: FlatBundleData
    fixed_points: tuple[FixedPoint, ...] = ()
    closed_orbits: tuple[ClosedOrbit, ...] = ()
    smale_order: tuple[tuple[str, str], ...] | None = None
    betti: tuple[int, ...] | None = None
    name: str | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return self.manifold_dim

    @property
    def rank(self) -> int:
        return self.bundle.rank

    def unstable_dim(self, element: FixedPoint | ClosedOrbit) -> int:
        if isinstance(element, ClosedOrbit):
            return self.manifold_dim - element.stable_dim + 1
        return self.manifold_dim - element.stable_dim

    def elements(self) -> tuple[FixedPoint | ClosedOrbit, ...]:
        return tuple(self.fixed_points) + tuple(self.closed_orbits)

    def element(self, id: str) -> FixedPoint | ClosedOrbit:
        for e in self.elements():
            if e.id == id:
                return e
        raise KeyError(id)

    def fixed_counts(self) -> tuple[int, ...]:
        """c_k: number of fixed points with stable dimension k, k = 0..n."""
        c = [0] * (self.manifold_dim + 1)
        for fp in self.fixed_points:
            c[fp.stable_dim] += 1
        return tuple(c)


# ---------------------------------------------------------------------------
# Derived quantities


def orbit_multiplicity_m(orbit: ClosedOrbit, bundle: FlatBundleData | None = None) -> int:
    """Multiplicity of the twisting index among the monodromy eigenvalues."""
    return sum(1 for q in orbit.shifts() if q == 1)


def euler_characteristic(spec: FlowSpec) -> int:
    """chi(M, E) = N * sum over fixed points of (-1)^{stable_dim}."""
    return spec.rank * sum((-1) ** fp.stable_dim for fp in spec.fixed_points)


def betti_euler_characteristic(spec: FlowSpec) -> int | None:
    if spec.betti is None:
        return None
    return sum((-1) ** k * b for k, b in enumerate(spec.betti))


def fixed_point_fuller_term(spec: FlowSpec) -> int:
    """N * sum over fixed points of (-1)^{unstable_dim}; equals (-1)^n chi."""
    return spec.rank * sum((-1) ** spec.unstable_dim(fp) for fp in spec.fixed_points)


def reversed_spec(spec: FlowSpec) -> FlowSpec:
    """Data of the time-reversed flow with the dual connection."""
    n = spec.manifold_dim
    fixed = tuple(FixedPoint(fp.id, n - fp.stable_dim) for fp in spec.fixed_points)
    orbits = tuple(
        ClosedOrbit(o.id, o.period, n + 1 - o.stable_dim, o.twisted, tuple((-g) % 1 for g in o.holonomy_phases))
        for o in spec.closed_orbits
    )
    order = None if spec.smale_order is None else tuple((b, a) for a, b in spec.smale_order)
    return FlowSpec(n, spec.bundle, fixed, orbits, order, spec.betti, spec.name)


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class RuleResult:
    rule: str
    passed: bool
    message: str = ""


@dataclass(frozen=True)
class ValidationReport:
    results: tuple[RuleResult, ...]

    @property
    def valid(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> tuple[RuleResult, ...]:
        return tuple(r for r in self.results if not r.passed)

    def failed(self, rule: str) -> bool:
        return any(r.rule == rule and not r.passed for r in self.results)


def _order_closure(edges: Iterable[tuple[str, str]]) -> dict[str, set[str]]:
    below: dict[str, set[str]] = {}
    for lo, hi in edges:
        below.setdefault(hi, set()).add(lo)
    changed = True
    while changed:
        changed = False
        for hi, lows in below.items():
            extra = set()
            for lo in lows:
                extra |= below.get(lo, set())
            if not extra <= lows:
                lows |= extra
                changed = True
    return below


def validate_spec(spec: FlowSpec) -> ValidationReport:
    """Check every data-level invariant; never raises."""
    out: list[RuleResult] = []

    def check(rule: str, ok: bool, message: str) -> None:
        out.append(RuleResult(rule, bool(ok), "" if ok else message))

    n = spec.manifold_dim
    N = spec.bundle.rank
    check("manifold_dim_positive", isinstance(n, int) and n >= 1, f"manifold_dim={n} must be >= 1")
    check("bundle_rank_positive", isinstance(N, int) and N >= 1, f"bundle rank {N} must be >= 1")

    ids = [e.id for e in spec.elements()]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    check("ids_unique", not dupes, f"duplicate ids {dupes}")
    check("nonwandering_nonempty", len(ids) > 0, "at least one critical element is required")

    bad = [fp.id for fp in spec.fixed_points if not 0 <= fp.stable_dim <= n]
    check("fixed_stable_dim_range", not bad, f"fixed point stable_dim outside [0, n]: {bad}")

    bad = [o.id for o in spec.closed_orbits if not 1 <= o.stable_dim <= n]
    check("orbit_stable_dim_range", not bad, f"orbit stable_dim >= 1 and <= n violated by {bad}")

    bad = [o.id for o in spec.closed_orbits if not o.period > 0]
    check("orbit_period_positive", not bad, f"non-positive period on {bad}")

    bad = [o.id for o in spec.closed_orbits if len(o.holonomy_phases) != N]
    check("phase_count", not bad, f"orbits without exactly N={N} phases: {bad}")

    bad = [o.id for o in spec.closed_orbits if any(not 0 <= g < 1 for g in o.holonomy_phases)]
    check("phase_range", not bad, f"phase out of [0,1) on {bad}")

    if spec.smale_order is not None:
        known = set(ids)
        unknown = sorted({x for edge in spec.smale_order for x in edge if x not in known})
        check("order_ids_known", not unknown, f"smale_order mentions unknown ids {unknown}")
        below = _order_closure(spec.smale_order)
        cyclic = sorted(x for x, lows in below.items() if x in lows)
        check("order_acyclic", not cyclic, f"order not acyclic (cycle through {cyclic})")
        if not unknown:
            du = {e.id: spec.unstable_dim(e) for e in spec.elements()}
            bad_edges = [(a, b) for a, b in spec.smale_order if du[a] > du[b]]
            check(
                "order_dimension_monotone",
                not bad_edges,
                f"edges decreasing unstable dimension: {bad_edges}",
            )

    if spec.betti is not None:
        check("betti_length", len(spec.betti) == n + 1, f"betti must have n+1={n + 1} entries")
        check("betti_nonnegative", all(b >= 0 for b in spec.betti), "betti numbers must be >= 0")

    return ValidationReport(tuple(out))


def require_valid(spec: FlowSpec) -> FlowSpec:
    report = validate_spec(spec)
    if not report.valid:
        first = report.failures[0]
        raise SpecValidationError(first.rule, first.message)
    return spec


def strictly_below(spec: FlowSpec) -> dict[str, set[str]]:
    """Strict Smale order: element id -> ids strictly below it.

    Uses ``spec.smale_order`` when given, otherwise orders elements by
    unstable dimension.
    """
    if spec.smale_order is not None:
        below = _order_closure(spec.smale_order)
        return {e.id: set(below.get(e.id, set())) - {e.id} for e in spec.elements()}
    du = {e.id: spec.unstable_dim(e) for e in spec.elements()}
    return {a: {b for b in du if du[b] < du[a]} for a in du}


# ---------------------------------------------------------------------------
# Canonical JSON


def parse_rational(value, where: str = "value") -> Fraction:
    """Exact rational from ``"p/q"`` strings, ints, or decimal literals.

    Decimals are rounded to the nearest rational with denominator at most
    10^12.
    """
    if isinstance(value, bool):
        raise SpecSchemaError(f"{where}: expected a rational, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value)).limit_denominator(MAX_DENOMINATOR)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                p, q = text.split("/")
                p, q = int(p), int(q)
                if q <= 0:
                    raise SpecSchemaError(f"{where}: denominator must be positive in {value!r}")
                return Fraction(p, q)
            return Fraction(text).limit_denominator(MAX_DENOMINATOR)
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecSchemaError(f"{where}: cannot parse rational {value!r}") from exc
    raise SpecSchemaError(f"{where}: expected a rational, got {type(value).__name__}")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _require(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise SpecSchemaError(f"{where}: missing field {key!r}")
    value = doc[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise SpecSchemaError(f"{where}.{key}: expected integer")
    if kind is not int and not isinstance(value, kind):
        raise SpecSchemaError(f"{where}.{key}: expected {kind.__name__}")
    return value


def spec_from_dict(doc: dict, name: str | None = None) -> FlowSpec:
    if not isinstance(doc, dict):
        raise SpecSchemaError("document must be a JSON object")
    version = _require(doc, "format_version", int, "spec")
    if version != FORMAT_VERSION:
        raise SpecSchemaError(f"unsupported format_version {version}")
    n = _require(doc, "manifold_dim", int, "spec")
    bundle = _require(doc, "bundle", dict, "spec")
    rank = _require(bundle, "rank", int, "bundle")

    fixed = []
    for i, item in enumerate(_require(doc, "fixed_points", list, "spec")):
        where = f"fixed_points[{i}]"
        if not isinstance(item, dict):
            raise SpecSchemaError(f"{where}: expected object")
        fixed.append(FixedPoint(str(_require(item, "id", str, where)), _require(item, "stable_dim", int, where)))

    orbits = []
    for i, item in enumerate(_require(doc, "closed_orbits", list, "spec")):
        where = f"closed_orbits[{i}]"
        if not isinstance(item, dict):
            raise SpecSchemaError(f"{where}: expected object")
        phases = _require(item, "holonomy_phases", list, where)
        if "period" not in item:
            raise SpecSchemaError(f"{where}: missing field 'period'")
        orbits.append(
            ClosedOrbit(
                id=_require(item, "id", str, where),
                period=parse_rational(item["period"], f"{where}.period"),
                stable_dim=_require(item, "stable_dim", int, where),
                twisted=_require(item, "twisted", bool, where),
                holonomy_phases=tuple(
                    parse_rational(g, f"{where}.holonomy_phases[{j}]") for j, g in enumerate(phases)
                ),
            )
        )

    order = None
    if doc.get("smale_order") is not None:
        raw = doc["smale_order"]
        if not isinstance(raw, list) or not all(
            isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e) for e in raw
        ):
            raise SpecSchemaError("smale_order must be a list of [idA, idB] pairs")
        order = tuple((a, b) for a, b in raw)

    betti = None
    if doc.get("betti") is not None:
        raw = doc["betti"]
        if not isinstance(raw, list) or not all(isinstance(b, int) and not isinstance(b, bool) for b in raw):
            raise SpecSchemaError("betti must be a list of integers")
        betti = tuple(raw)

    return FlowSpec(n, FlatBundleData(rank), tuple(fixed), tuple(orbits), order, betti, name)


def spec_to_dict(spec: FlowSpec) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "manifold_dim": spec.manifold_dim,
        "bundle": {"rank": spec.bundle.rank},
        "fixed_points": [{"id": fp.id, "stable_dim": fp.stable_dim} for fp in spec.fixed_points],
        "closed_orbits": [
            {
                "id": o.id,
                "period": format_rational(o.period),
                "stable_dim": o.stable_dim,
                "twisted": o.twisted,
                "holonomy_phases": [format_rational(g) for g in o.holonomy_phases],
            }
            for o in spec.closed_orbits
        ],
    }
    if spec.smale_order is not None:
        doc["smale_order"] = [[a, b] for a, b in spec.smale_order]
    if spec.betti is not None:
        doc["betti"] = list(spec.betti)
    return doc


def _reject_constants(token: str):
    raise SpecSchemaError(f"non-finite number {token} in document")


def parse_spec(document: str | bytes, name: str | None = None) -> FlowSpec:
    """Schema-check a canonical spec document without validating invariants."""
    try:
        doc = json.loads(document, parse_float=str, parse_constant=_reject_constants)
    except json.JSONDecodeError as exc:
        raise SpecSchemaError(f"invalid JSON: {exc}") from exc
    # floats arrive as strings from parse_float; only rational fields accept them
    return spec_from_dict(doc, name)


def load_spec(document: str | bytes, name: str | None = None) -> FlowSpec:
    """Parse and validate a canonical spec document (JSON text)."""
    return require_valid(parse_spec(document, name))


def save_spec(spec: FlowSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2, ensure_ascii=False) + "\n"


def load_spec_file(path) -> FlowSpec:
    with open(path, encoding="utf-8") as fh:
        return load_spec(fh.read(), name=str(path))


# ---------------------------------------------------------------------------
# Builtin examples

BUILTIN_FILES = {
    "s2-height": "ex-a.json",
    "torus-gradient": "ex-b.json",
    "s1-rotation": "ex-c.json",
    "s3-seifert": "ex-d.json",
    "twisted-orbit": "ex-e.json",
}


def builtin_text(name: str) -> str:
    """Canonical JSON text of a builtin example, by name or file name."""
    filename = BUILTIN_FILES.get(name, name)
    if filename not in BUILTIN_FILES.values():
        raise KeyError(f"unknown builtin example {name!r}")
    return resources.files("ruelle_torsion").joinpath("data").joinpath(filename).read_text(encoding="utf-8")


def builtin_examples() -> dict[str, FlowSpec]:
    return {name: load_spec(builtin_text(name), name=name) for name in BUILTIN_FILES}


def builtin_example(name: str) -> FlowSpec:
    key = next((k for k, v in BUILTIN_FILES.items() if name in (k, v)), None)
    if key is None:
        raise KeyError(f"unknown builtin example {name!r}")
    return load_spec(builtin_text(key), name=key)
