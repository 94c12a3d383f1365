"""Charts, embeddings, the chart-group lemmas and the span machinery."""

import random
from fractions import Fraction

import pytest

from orbatlas.atlas import (
    Atlas,
    Chart,
    Embedding,
    common_span,
    find_conjugator,
    has_trivial_stabilizer,
    induced_homomorphism,
    overlap_transport,
    restrict_chart,
    stabilizer,
    validate_atlas,
    validate_chart,
    validate_embedding,
)
from orbatlas.errors import (
    NoConjugatorError,
    OracleRefusedError,
    PointOutsideDomainError,
)
from orbatlas.field import CycNum
from orbatlas.gallery import cone, rotation_group
from orbatlas.geometry import AffineMap, Ball, Point, balls_disjoint, map_ball
from orbatlas.oracles import SpanSearchOracle

M = 12


def zrot(k):
    return AffineMap.scaling(M, 1, CycNum.zeta(M, k))


@pytest.fixture(scope="module")
def cone3_m12():
    return cone(3, conductor=12)


class TestChartValidation:
    def test_cone_chart_valid(self, cone3_m12):
        chart = cone3_m12.chart("cone3")
        assert validate_chart(chart).ok

    def test_duplicate_identity_fails_faithfulness(self):
        ident = AffineMap.identity(M, 1)
        chart = Chart("bad", Ball.of(M, [0], 1), (ident, AffineMap.identity(M, 1)))
        rep = validate_chart(chart)
        assert not rep.ok
        assert any("faithful" in name for name, _ in rep.failures())

    def test_doubling_map_breaks_domain_preservation(self):
        chart = Chart(
            "bad2", Ball.of(M, [0], 1),
            (AffineMap.identity(M, 1), AffineMap.scaling(M, 1, 2)),
        )
        rep = validate_chart(chart)
        assert any("domain preserved" in name for name, _ in rep.failures())

    def test_missing_inverse_detected(self):
        chart = Chart("bad3", Ball.of(M, [0], 1), (AffineMap.identity(M, 1), zrot(4)))
        rep = validate_chart(chart)
        assert any("closed" in name for name, _ in rep.failures())


class TestStabilizers:
    def test_full_stabilizer_at_origin(self, cone3_m12):
        chart = cone3_m12.chart("cone3")
        assert len(stabilizer(chart, Point.origin(M, 1))) == 3

    def test_trivial_stabilizer_at_generic_point(self, cone3_m12):
        chart = cone3_m12.chart("cone3")
        p = Point.of(M, Fraction(1, 4))
        assert stabilizer(chart, p) == [chart.identity()]
        assert has_trivial_stabilizer(chart, p)
        assert not has_trivial_stabilizer(chart, Point.origin(M, 1))

    def test_point_outside_domain(self, cone3_m12):
        with pytest.raises(PointOutsideDomainError):
            stabilizer(cone3_m12.chart("cone3"), Point.of(M, 2))


class TestConjugator:
    def test_identity_case(self, cone3_m12):
        chart = cone3_m12.chart("cone3")
        lam = AffineMap.identity(M, 1)
        assert find_conjugator(chart, lam, lam).is_identity()

    def test_rotated_inclusion(self, cone3_m12):
        chart = cone3_m12.chart("cone3")
        sub, inc = restrict_chart(chart, Point.origin(M, 1), Fraction(1, 4))
        h = find_conjugator(chart, inc.map, zrot(4).compose(inc.map))
        assert h == zrot(4)

    def test_translation_is_not_conjugate(self, cone3_m12):
        chart = cone3_m12.chart("cone3")
        lam = AffineMap.identity(M, 1)
        mu = AffineMap.identity(M, 1).shift(Point.of(M, Fraction(1, 4)))
        with pytest.raises(NoConjugatorError):
            find_conjugator(chart, lam, mu)

    def test_non_reduced_chart_gives_non_unique_conjugator(self):
        from orbatlas.errors import NotUniqueError

        ident = AffineMap.identity(M, 1)
        doubled = Chart("dup", Ball.of(M, [0], 1), (ident, AffineMap.identity(M, 1)))
        with pytest.raises(NotUniqueError):
            find_conjugator(doubled, ident, ident)

    def test_torsor_has_group_size(self, cone3_m12):
        # {h . lam} has exactly |G| distinct elements and round-trips
        chart = cone3_m12.chart("cone3")
        sub, inc = restrict_chart(chart, Point.origin(M, 1), Fraction(1, 4))
        images = [h.compose(inc.map) for h in chart.group]
        assert len({hash(f) for f in images}) == len(chart.group)
        for h in chart.group:
            assert find_conjugator(chart, inc.map, h.compose(inc.map)) == h


class TestInducedHomomorphism:
    def test_inclusion_restricts_identically(self, cone3_m12):
        chart = cone3_m12.chart("cone3")
        sub, inc = restrict_chart(chart, Point.origin(M, 1), Fraction(1, 4))
        atlas = Atlas(M, 1, [chart, sub], [inc], SpanSearchOracle())
        table = induced_homomorphism(inc, atlas)
        for g, h in table.items():
            assert g == h

    def test_zeta12_automorphism_acts_by_conjugation(self, cone3_m12):
        chart = cone3_m12.chart("cone3")
        e = Embedding("cone3", "cone3", zrot(1))
        table = induced_homomorphism(e, cone3_m12)
        for g, h in table.items():
            assert g == h  # abelian conjugation

    def test_homomorphism_on_full_table(self):
        atlas = cone(6)
        chart = atlas.chart("cone6")
        sub, inc = restrict_chart(chart, Point.origin(6, 1), Fraction(1, 4))
        big = Atlas(6, 1, [chart, sub], [inc], SpanSearchOracle())
        table = induced_homomorphism(inc, big)
        elems = list(table)
        for g1 in elems:
            for g2 in elems:
                assert table[g1.compose(g2)] == table[g1].compose(table[g2])
        # injectivity
        values = list(table.values())
        assert len({hash(v) for v in values}) == len(values)


class TestOverlapTransport:
    def test_identity(self, cone3_m12):
        chart = cone3_m12.chart("cone3")
        sub, inc = restrict_chart(chart, Point.origin(M, 1), Fraction(1, 4))
        atlas = Atlas(M, 1, [chart, sub], [inc], SpanSearchOracle())
        assert overlap_transport(inc, chart.identity(), atlas).is_identity()

    def test_invariant_subball_transports_rotation(self, cone3_m12):
        chart = cone3_m12.chart("cone3")
        sub, inc = restrict_chart(chart, Point.origin(M, 1), Fraction(1, 4))
        atlas = Atlas(M, 1, [chart, sub], [inc], SpanSearchOracle())
        g = overlap_transport(inc, zrot(4), atlas)
        assert g == zrot(4)

    def test_disjoint_translate_returns_none(self, cone3_m12):
        chart = cone3_m12.chart("cone3")
        sub, inc = restrict_chart(chart, Point.of(M, Fraction(1, 2)), Fraction(1, 64))
        atlas = Atlas(M, 1, [chart, sub], [inc], SpanSearchOracle())
        assert overlap_transport(inc, zrot(4), atlas) is None
        # and the images are exactly disjoint
        img = map_ball(inc.map, sub.ball)
        assert balls_disjoint(map_ball(zrot(4), img), img)

    def test_round_trip_through_induced_map(self, cone3_m12):
        chart = cone3_m12.chart("cone3")
        sub, inc = restrict_chart(chart, Point.origin(M, 1), Fraction(1, 4))
        atlas = Atlas(M, 1, [chart, sub], [inc], SpanSearchOracle())
        table = induced_homomorphism(inc, atlas)
        for g, h in table.items():
            assert overlap_transport(inc, h, atlas) == g


class TestRestrictChart:
    def test_origin_restriction_keeps_group(self, cone3_m12):
        chart = cone3_m12.chart("cone3")
        sub, inc = restrict_chart(chart, Point.origin(M, 1), Fraction(1, 4))
        assert len(sub.group) == 3
        assert sub.ball.r2 == Fraction(1, 4)
        assert validate_chart(sub).ok
        assert inc.map.is_identity()

    def test_generic_point_gets_trivial_group_and_separation(self, cone3_m12):
        chart = cone3_m12.chart("cone3")
        p = Point.of(M, Fraction(1, 4))
        sub, _ = restrict_chart(chart, p, Fraction(1, 2))
        assert len(sub.group) == 1
        for g in chart.group:
            if g.is_identity():
                continue
            assert balls_disjoint(map_ball(g, sub.ball), sub.ball)

    def test_restriction_matches_stabilizer(self, cone3_m12):
        chart = cone3_m12.chart("cone3")
        for pt in (Point.origin(M, 1), Point.of(M, Fraction(1, 4))):
            sub, _ = restrict_chart(chart, pt, Fraction(1, 8))
            assert set(sub.group) == set(stabilizer(chart, pt))


class TestCommonSpan:
    def test_same_leg(self, cone3_m12):
        e = cone3_m12.identity_embedding("cone3")
        p = Point.of(M, Fraction(1, 4))
        span = common_span(cone3_m12, e, p, e, p)
        assert span.left(span.point) == p and span.right(span.point) == p

    def test_rotated_legs(self, cone3_m12):
        ident = cone3_m12.identity_embedding("cone3")
        z3 = Embedding("cone3", "cone3", zrot(4))
        p = Point.of(M, Fraction(1, 4))
        span = common_span(cone3_m12, ident, zrot(4)(p), z3, p)
        assert ident.map.compose(span.left.map) == z3.map.compose(span.right.map)
        assert span.left(span.point) == zrot(4)(p)
        assert span.right(span.point) == p

    def test_cross_chart_span(self, football23):
        # legs from different source charts into the same target chart
        glue = football23.chart("glue")
        to_n = football23.reps[("glue", "north")]
        ident = football23.identity_embedding("north")
        w = glue.ball.center
        span = common_span(football23, ident, to_n(w), to_n, w)
        assert ident.map.compose(span.left.map) == to_n.map.compose(span.right.map)
        assert span.left(span.point) == to_n(w)
        assert span.right(span.point) == w

    def test_unidentified_points_refused(self, cone3_m12):
        ident = cone3_m12.identity_embedding("cone3")
        with pytest.raises(OracleRefusedError):
            common_span(
                cone3_m12, ident, Point.of(M, Fraction(1, 4)), ident, Point.of(M, Fraction(1, 8))
            )


class TestAtlasValidation:
    def test_gallery_atlases_validate(self, cone3_m12, football23, teardrop3, quotient22, point_chart_atlas):
        for atlas in (cone3_m12, football23, teardrop3, quotient22, point_chart_atlas):
            rep = validate_atlas(atlas, rng=random.Random(0))
            assert rep.ok, rep.failures()

    def test_empty_atlas_fails_cover_axiom(self):
        empty = Atlas(M, 1, [], [], SpanSearchOracle())
        rep = validate_atlas(empty, rng=random.Random(0))
        assert any("has charts" in name for name, _ in rep.failures())

    def test_oversized_embedding_rejected(self, cone3_m12):
        chart = cone3_m12.chart("cone3")
        small = Chart("small", Ball.of(M, [0], Fraction(1, 4)), tuple(rotation_group(M, 1, 3)))
        bad = Embedding("cone3", "small", AffineMap.identity(M, 1))
        atlas = Atlas(M, 1, [chart, small], [bad], SpanSearchOracle())
        rep = validate_atlas(atlas, rng=random.Random(0))
        assert not rep.ok

    def test_common_span_random_pairs(self, cone3_m12, football23, teardrop3):
        # sampled oracle-identified pairs: the completed square always commutes
        from orbatlas.gallery import cone
        from orbatlas.sampling import random_chart_point

        for atlas, count in (
            (cone3_m12, 500),
            (cone(6), 500),
            (football23, 500),
            (teardrop3, 500),
        ):
            rng = random.Random(5)
            for _ in range(count):
                ci = rng.choice(atlas.chart_ids())
                p = random_chart_point(rng, atlas, ci)
                cj = rng.choice(atlas.chart_ids())
                q = atlas.locate(ci, p, cj)
                if q is None:
                    continue
                raw = atlas.refine(ci, p, cj, q)
                left = raw.left
                # complete the two legs into chart ci against each other
                ident = atlas.identity_embedding(ci)
                span = common_span(atlas, ident, p, left, raw.point)
                assert ident.map.compose(span.left.map) == left.map.compose(span.right.map)
                assert span.left(span.point) == p
                assert span.right(span.point) == raw.point
