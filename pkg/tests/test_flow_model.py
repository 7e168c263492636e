import json
import random
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import BUILTIN_NAMES, flow_specs
from ruelle_torsion.flow_model import (
    ClosedOrbit,
    FixedPoint,
    FlatBundleData,
    FlowSpec,
    SpecSchemaError,
    SpecValidationError,
    betti_euler_characteristic,
    builtin_example,
    builtin_examples,
    builtin_text,
    euler_characteristic,
    fixed_point_fuller_term,
    load_spec,
    orbit_multiplicity_m,
    parse_rational,
    reversed_spec,
    save_spec,
    spec_to_dict,
    validate_spec,
)


def doc(**over):
    d = {
        "format_version": 1,
        "manifold_dim": 2,
        "bundle": {"rank": 1},
        "fixed_points": [{"id": "min", "stable_dim": 0}],
        "closed_orbits": [],
    }
    d.update(over)
    return json.dumps(d)


def orbit_doc(**over):
    o = {"id": "o", "period": "1/1", "stable_dim": 1, "twisted": False, "holonomy_phases": ["0/1"]}
    o.update(over)
    return o


class TestLoad:
    def test_minimal_document(self):
        spec = load_spec(doc())
        assert spec.manifold_dim == 2
        assert euler_characteristic(spec) == 1

    def test_phase_out_of_range(self):
        with pytest.raises(SpecValidationError, match=r"phase out of \[0,1\)") as info:
            load_spec(doc(closed_orbits=[orbit_doc(holonomy_phases=["5/4"])]))
        assert info.value.rule == "phase_range"

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_builtin_round_trip_is_byte_identical(self, name):
        text = builtin_text(name)
        assert save_spec(load_spec(text)) == text

    def test_decimal_literals_are_rationalized(self):
        spec = load_spec(doc(closed_orbits=[orbit_doc(period=0.75, holonomy_phases=[0.2])]))
        assert spec.closed_orbits[0].period == Fraction(3, 4)
        assert spec.closed_orbits[0].holonomy_phases == (Fraction(1, 5),)

    def test_integer_period(self):
        spec = load_spec(doc(closed_orbits=[orbit_doc(period=3)]))
        assert spec.closed_orbits[0].period == 3

    @pytest.mark.parametrize(
        "text",
        [
            "not json",
            "[]",
            doc(format_version=2),
            doc(manifold_dim="2"),
            doc(bundle={}),
            doc(fixed_points=[{"id": "a"}]),
            doc(fixed_points=[{"id": "a", "stable_dim": True}]),
            doc(closed_orbits=[{"id": "o", "stable_dim": 1, "twisted": False, "holonomy_phases": []}]),
            doc(closed_orbits=[orbit_doc(period="1/0")]),
            doc(closed_orbits=[orbit_doc(period="x")]),
            doc(closed_orbits=[orbit_doc(twisted="no")]),
            doc(smale_order=[["a"]]),
            doc(betti=[1, "0", 1]),
        ],
    )
    def test_schema_violations(self, text):
        with pytest.raises(SpecSchemaError):
            load_spec(text)

    def test_nan_rejected(self):
        with pytest.raises(SpecSchemaError):
            load_spec(doc().replace('"manifold_dim": 2', '"manifold_dim": NaN'))

    @pytest.mark.parametrize(
        "over, rule",
        [
            (dict(manifold_dim=0), "manifold_dim_positive"),
            (dict(bundle={"rank": 0}), "bundle_rank_positive"),
            (dict(fixed_points=[{"id": "a", "stable_dim": 0}, {"id": "a", "stable_dim": 1}]), "ids_unique"),
            (dict(fixed_points=[]), "nonwandering_nonempty"),
            (dict(fixed_points=[{"id": "a", "stable_dim": 3}]), "fixed_stable_dim_range"),
            (dict(closed_orbits=[orbit_doc(stable_dim=0)]), "orbit_stable_dim_range"),
            (dict(closed_orbits=[orbit_doc(period="-1/2")]), "orbit_period_positive"),
            (dict(closed_orbits=[orbit_doc(holonomy_phases=["0/1", "1/2"])]), "phase_count"),
            (dict(smale_order=[["min", "zzz"]]), "order_ids_known"),
            (dict(betti=[1, 0]), "betti_length"),
            (dict(betti=[1, -1, 1]), "betti_nonnegative"),
        ],
    )
    def test_invariant_violations_name_the_rule(self, over, rule):
        with pytest.raises(SpecValidationError) as info:
            load_spec(doc(**over))
        assert info.value.rule == rule


class TestValidate:
    def test_ex_a_passes_everything(self, ex_a):
        report = validate_spec(ex_a)
        assert report.valid and not report.failures

    def test_two_cycle(self, ex_b):
        spec = replace(ex_b, smale_order=(("saddle1", "saddle2"), ("saddle2", "saddle1")))
        report = validate_spec(spec)
        assert report.failed("order_acyclic")
        assert "order not acyclic" in next(r.message for r in report.failures if r.rule == "order_acyclic")

    def test_orbit_stable_dim_zero(self, ex_c):
        o = replace(ex_c.closed_orbits[0], stable_dim=0)
        report = validate_spec(replace(ex_c, closed_orbits=(o,)))
        assert report.failed("orbit_stable_dim_range")
        assert "orbit stable_dim >= 1" in report.failures[0].message

    def test_order_must_respect_dimension(self, ex_a):
        spec = replace(ex_a, smale_order=(("min", "max"),))
        assert validate_spec(spec).failed("order_dimension_monotone")

    def test_builtins_valid(self):
        for spec in builtin_examples().values():
            assert validate_spec(spec).valid


class TestDerived:
    def test_euler(self, ex_a, ex_b, ex_c):
        assert euler_characteristic(ex_a) == 2
        assert euler_characteristic(ex_b) == 0
        assert euler_characteristic(ex_c) == 0

    def test_betti_euler_matches(self):
        for spec in builtin_examples().values():
            assert betti_euler_characteristic(spec) == euler_characteristic(spec)

    def test_fuller_term_is_signed_euler(self):
        for spec in builtin_examples().values():
            assert fixed_point_fuller_term(spec) == (-1) ** spec.manifold_dim * euler_characteristic(spec)

    @pytest.mark.parametrize(
        "twisted, phases, m",
        [
            (False, [Fraction(0), Fraction(1, 4)], 1),
            (True, [Fraction(1, 2)], 1),
            (True, [Fraction(0)], 0),
        ],
    )
    def test_multiplicity(self, twisted, phases, m):
        orbit = ClosedOrbit("o", Fraction(1), 1, twisted, tuple(phases))
        assert orbit_multiplicity_m(orbit, FlatBundleData(len(phases))) == m

    def test_shifts_live_in_half_open_unit_interval(self):
        orbit = ClosedOrbit("o", Fraction(1), 1, True, (Fraction(0), Fraction(1, 2), Fraction(3, 4)))
        assert orbit.shifts() == (Fraction(1, 2), Fraction(1), Fraction(1, 4))

    def test_builtin_lookup(self):
        assert builtin_example("s1-rotation") == builtin_example("ex-c.json")
        c = builtin_example("s1-rotation").closed_orbits[0]
        assert (c.period, c.stable_dim, c.twisted, c.holonomy_phases) == (3, 1, False, (Fraction(1, 4),))
        with pytest.raises(KeyError):
            builtin_example("klein-bottle")

    def test_parse_rational(self):
        assert parse_rational("6/4") == Fraction(3, 2)
        assert parse_rational("0.1") == Fraction(1, 10)
        assert parse_rational(-2) == -2
        with pytest.raises(SpecSchemaError):
            parse_rational(True)


@settings(max_examples=300)
@given(flow_specs())
def test_save_load_identity(spec):
    assert validate_spec(spec).valid
    assert load_spec(save_spec(spec)) == spec
    assert spec_to_dict(load_spec(save_spec(spec))) == spec_to_dict(spec)


@settings(max_examples=300)
@given(flow_specs())
def test_dimension_bookkeeping(spec):
    n = spec.manifold_dim
    for fp in spec.fixed_points:
        assert fp.stable_dim + spec.unstable_dim(fp) == n
    for o in spec.closed_orbits:
        assert o.stable_dim + spec.unstable_dim(o) == n + 1
        m = orbit_multiplicity_m(o)
        assert m <= spec.rank
        assert (m == spec.rank) == all(q == 1 for q in o.shifts())


@settings(max_examples=200)
@given(flow_specs())
def test_euler_permutation_invariant(spec):
    rng = random.Random(0)
    fixed = list(spec.fixed_points)
    rng.shuffle(fixed)
    assert euler_characteristic(replace(spec, fixed_points=tuple(fixed))) == euler_characteristic(spec)


@settings(max_examples=200)
@given(flow_specs())
def test_reversal_is_an_involution(spec):
    assert reversed_spec(reversed_spec(spec)) == spec


def test_fixed_point_constructor_types():
    spec = FlowSpec(1, FlatBundleData(1), (FixedPoint("p", 0), FixedPoint("q", 1)))
    assert spec.fixed_counts() == (1, 1)
    assert spec.element("q").stable_dim == 1
    with pytest.raises(KeyError):
        spec.element("r")
