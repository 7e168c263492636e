from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from ruelle_torsion.flow_model import (
    ClosedOrbit,
    FixedPoint,
    FlatBundleData,
    FlowSpec,
    builtin_example,
)

settings.register_profile("default", deadline=None)
settings.load_profile("default")

BUILTIN_NAMES = ["s2-height", "torus-gradient", "s1-rotation", "s3-seifert", "twisted-orbit"]


@pytest.fixture(scope="session")
def ex_a():
    return builtin_example("s2-height")


@pytest.fixture(scope="session")
def ex_b():
    return builtin_example("torus-gradient")


@pytest.fixture(scope="session")
def ex_c():
    return builtin_example("s1-rotation")


@pytest.fixture(scope="session")
def ex_d():
    return builtin_example("s3-seifert")


@pytest.fixture(scope="session")
def ex_e():
    return builtin_example("twisted-orbit")


rationals = st.builds(Fraction, st.integers(1, 9), st.integers(1, 4))


def phase():
    return st.integers(2, 6).flatmap(lambda d: st.builds(Fraction, st.integers(0, d - 1), st.just(d)))


@st.composite
def flow_specs(draw, max_fixed=4, max_orbits=3, with_order=True, min_orbits=0):
    n = draw(st.integers(1, 4))
    N = draw(st.integers(1, 3))
    n_fixed = draw(st.integers(0, max_fixed))
    n_orb = draw(st.integers(min_orbits, max_orbits))
    if n_fixed + n_orb == 0:
        n_fixed = 1
    fixed = tuple(FixedPoint(f"x{i}", draw(st.integers(0, n))) for i in range(n_fixed))
    orbits = tuple(
        ClosedOrbit(
            f"o{i}",
            draw(rationals),
            draw(st.integers(1, n)),
            draw(st.booleans()),
            tuple(draw(phase()) for _ in range(N)),
        )
        for i in range(n_orb)
    )
    spec = FlowSpec(n, FlatBundleData(N), fixed, orbits)
    order = None
    if with_order and draw(st.booleans()):
        elems = list(spec.elements())
        edges = []
        for a in range(len(elems)):
            for b in range(len(elems)):
                ea, eb = elems[a], elems[b]
                du_a, du_b = spec.unstable_dim(ea), spec.unstable_dim(eb)
                # edges go up in unstable dimension, ties broken by list index
                if (du_a, a) < (du_b, b) and draw(st.booleans()):
                    edges.append((ea.id, eb.id))
        order = tuple(edges)
    return FlowSpec(n, FlatBundleData(N), fixed, orbits, smale_order=order)
