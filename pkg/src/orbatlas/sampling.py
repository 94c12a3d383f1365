"""Seeded exact sampling of points, group elements and arrows.

Proposals use floating point only to guess magnitudes; every accepted sample is
an exact rational-coordinate point whose membership was verified by the exact
ball predicate, so downstream computations stay in the decidable fragment.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .field import CycNum
from .geometry import Ball, Point, point_in_ball

_DENOM = 64


def random_fraction(rng: random.Random, bound: Fraction) -> Fraction:
    steps = int(bound * _DENOM)
    if steps <= 0:
        return Fraction(0)
    return Fraction(rng.randint(-steps, steps), _DENOM)


def _radius_overestimate(ball: Ball) -> Fraction:
    # float sqrt used only to size proposals; the sign test below is exact
    approx = 0.0
    for c in ball.r2.reduced:
        approx += abs(float(c))
    return Fraction(math.isqrt(int(4 * approx) + 4) + 1, 2)


def random_point_in_ball(rng: random.Random, ball: Ball, conductor: int) -> Point:
    """Exact rational-coordinate point strictly inside the ball."""
    if ball.dim == 0:
        return ball.center
    # proposals sized to land inside with high probability; acceptance is exact
    bound = _radius_overestimate(ball) / (2 * ball.dim + 1)
    for _ in range(512):
        coords = []
        for c in ball.center.coords:
            re = random_fraction(rng, bound)
            im = random_fraction(rng, bound)
            offset = CycNum.rational(conductor, re)
            if conductor in (3, 4, 6, 8, 12):
                offset = offset + _imag_unit_like(conductor) * im
            coords.append(c + offset)
        p = Point(tuple(coords))
        if point_in_ball(p, ball):
            return p
    # center is always inside an open ball
    return ball.center


def _imag_unit_like(m: int) -> CycNum:
    """A fixed non-real unit of Q(zeta_m), used to spread samples off the real line."""
    return CycNum.zeta(m, 1) if m > 2 else CycNum.rational(m, 0)


def random_chart_point(rng: random.Random, atlas, cid: str) -> Point:
    """Point of a chart domain, occasionally pushed around by the chart group."""
    chart = atlas.chart(cid)
    p = random_point_in_ball(rng, chart.ball, atlas.conductor)
    g = rng.choice(chart.group)
    return g(p)


def random_cycnum(rng: random.Random, m: int, size: int = 8) -> CycNum:
    from .field import _degree  # degree of the canonical basis

    coeffs = [Fraction(rng.randint(-size, size), rng.randint(1, 4)) for _ in range(_degree(m))]
    return CycNum(m, coeffs)
