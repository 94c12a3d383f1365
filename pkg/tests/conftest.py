"""Shared gallery fixtures for the test suite."""

from __future__ import annotations

from fractions import Fraction

import pytest

from orbatlas.atlas import Atlas, Embedding, Span, restrict_chart
from orbatlas.gallery import cone, football, global_quotient, point_atlas, teardrop
from orbatlas.geometry import Point
from orbatlas.oracles import SpanSearchOracle


@pytest.fixture(scope="session")
def cone3():
    return cone(3)


@pytest.fixture(scope="session")
def football23():
    return football(2, 3)


@pytest.fixture(scope="session")
def teardrop3():
    return teardrop(3)


@pytest.fixture(scope="session")
def quotient22():
    return global_quotient(2, 2)


@pytest.fixture(scope="session")
def point_chart_atlas():
    return point_atlas()


def make_sub_full_pair(p: int = 3):
    """A cone(p) atlas alone, and the same atlas enlarged by a restricted chart
    at the origin: the standard sub-atlas inclusion example."""
    base = cone(p)
    m = base.conductor
    cid = base.chart_ids()[0]
    chart = base.chart(cid)
    half, inc = restrict_chart(chart, Point.origin(m, 1), Fraction(1, 4), cid="half")
    witnesses = list(base.witnesses) + [
        Span("half", Point.origin(m, 1), Embedding("half", "half", half.identity()), inc)
    ]
    unit_points = {**base.unit_points, "half": (Point.of(m, Fraction(1, 8)),)}
    full = Atlas(
        m, 1, [chart, half], [inc], SpanSearchOracle(),
        witnesses=witnesses, unit_points=unit_points,
    )
    sub = Atlas(
        m, 1, [chart], [], SpanSearchOracle(),
        witnesses=base.witnesses, unit_points=base.unit_points,
    )
    return sub, full


@pytest.fixture(scope="session")
def sub_full_cone3():
    return make_sub_full_pair(3)
