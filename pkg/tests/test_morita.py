"""Morita checks, atlas equivalence, refinements, pushforwards, reconstruction."""

import random
from fractions import Fraction

import pytest

from orbatlas.atlas import Atlas, Embedding, validate_atlas
from orbatlas.errors import NotASubAtlasError, NotEquivalentError
from orbatlas.field import CycNum
from orbatlas.gallery import (
    WitnessSpan,
    cone,
    cone_pair,
    football,
    point_atlas,
    pushforward_pair,
    teardrop,
    teardrop_pair,
)
from orbatlas.geometry import AffineMap, Ball, Point, PolyMap
from orbatlas.groupoids import (
    ActionGroupoid,
    GroupoidMorphism,
    UnitPoint,
    check_groupoid_axioms,
    validate_groupoid_morphism,
)
from orbatlas.morita import (
    atlases_equivalent,
    bijection_demo,
    check_morita,
    common_refinement,
    is_refinement,
    isotropy_signature,
    morita_equivalence_chain,
    presentations_structurally_equal,
    pushforward_atlas,
    reconstruct_atlas,
    reconstruction_morita_morphism,
    subatlas_inclusion_morphism,
    RefinementData,
)
from orbatlas.translation import TranslationGroupoid


class TestSubAtlas:
    def test_self_inclusion_is_identity_like(self, cone3):
        mor = subatlas_inclusion_morphism(cone3, cone3)
        assert validate_groupoid_morphism(mor, samples=20, seed=0).ok
        assert check_morita(mor, samples=20, seed=1).verdict

    def test_inclusion_morphism(self, sub_full_cone3):
        sub, full = sub_full_cone3
        mor = subatlas_inclusion_morphism(sub, full)
        assert validate_groupoid_morphism(mor, samples=25, seed=2).ok

    def test_disjoint_chart_rejected(self, cone3):
        other = cone(2)
        with pytest.raises(NotASubAtlasError):
            subatlas_inclusion_morphism(other, cone3)


class TestCheckMorita:
    def test_subatlas_inclusion_passes(self, sub_full_cone3):
        sub, full = sub_full_cone3
        report = check_morita(subatlas_inclusion_morphism(sub, full), samples=40, seed=3)
        assert report.verdict, report.lines()

    def test_smaller_side_also_passes(self, sub_full_cone3):
        # the sub-atlas containing only the restricted chart
        sub, full = sub_full_cone3
        from orbatlas.oracles import SpanSearchOracle

        m = full.conductor
        half_only = Atlas(
            m, 1, [full.chart("half")], [], SpanSearchOracle(),
            unit_points={"half": full.unit_points["half"]},
        )
        report = check_morita(
            subatlas_inclusion_morphism(half_only, full), samples=40, seed=4
        )
        assert report.verdict, report.lines()

    def test_point_into_cone_fails_surjectivity(self, cone3):
        tg = TranslationGroupoid(cone3)
        pt = TranslationGroupoid(point_atlas())
        m = cone3.conductor
        const = PolyMap(m, 0, 1, [{(): 0}])
        origin = UnitPoint("cone3", Point.origin(m, 1))
        bad = GroupoidMorphism(
            pt, tg, {"pt": ("cone3", const)}, lambda a: tg.identity(origin)
        )
        report = check_morita(bad, samples=10, seed=5)
        assert not report.condition_i.ok
        # the unreached generic witness point is named
        assert any("unreached" in d for _, d in report.condition_i.failures())

    def test_forgotten_identification_fails_fullness(self):
        # two trivial charts, glued in the big atlas but not in the small one:
        # the inclusion hits every point, yet the target has arrows that no
        # source arrow maps to, so the fiber condition fails
        from orbatlas.atlas import Chart, Span
        from orbatlas.oracles import SpanSearchOracle

        m = 1
        ball = Ball(Point.of(m, 0), CycNum.rational(m, Fraction(1, 16)))
        ident = AffineMap.identity(m, 1)
        t1 = Chart("t1", ball, (ident,))
        t2 = Chart("t2", ball, (ident,))
        glue = Embedding("t1", "t2", ident)
        self_spans = [
            Span("t1", ball.center, Embedding("t1", "t1", ident), Embedding("t1", "t1", ident)),
            Span("t2", ball.center, Embedding("t2", "t2", ident), Embedding("t2", "t2", ident)),
        ]
        glued = Atlas(
            m, 1, [t1, t2], [glue], SpanSearchOracle(),
            witnesses=self_spans + [Span("t1", ball.center, Embedding("t1", "t1", ident), glue)],
        )
        disjoint = Atlas(m, 1, [t1, t2], [], SpanSearchOracle(), witnesses=self_spans)
        assert validate_atlas(glued).ok and validate_atlas(disjoint).ok
        report = check_morita(
            subatlas_inclusion_morphism(disjoint, glued), samples=60, seed=21
        )
        assert report.condition_i.ok
        assert not report.condition_ii.ok
        assert any("not hit" in d for _, d in report.condition_ii.failures())

    def test_isotropy_orders_preserved_along_passing_morphism(self, sub_full_cone3):
        sub, full = sub_full_cone3
        mor = subatlas_inclusion_morphism(sub, full)
        rng = random.Random(6)
        for _ in range(15):
            u = mor.src.random_unit(rng)
            assert len(mor.src.isotropy(u)) == len(mor.dst.isotropy(mor.psi(u)))


class TestEquivalence:
    def test_identity_witnesses(self, cone3):
        from orbatlas.atlas import restrict_chart

        m = cone3.conductor
        chart = cone3.chart("cone3")
        w0, _ = restrict_chart(chart, Point.origin(m, 1), Fraction(1, 4), cid="w0")
        ident = AffineMap.identity(m, 1)
        ws = [WitnessSpan(w0, Embedding("w0", "cone3", ident), Embedding("w0", "cone3", ident))]
        assert atlases_equivalent(cone3, cone3, ws).ok

    def test_cone_radii_pair(self):
        u1, u2, ws = cone_pair(3)
        assert atlases_equivalent(u1, u2, ws).ok

    def test_cone3_vs_cone2_has_no_witness(self):
        u1 = cone(3, conductor=6)
        u2 = cone(2, conductor=6)
        # a candidate span at the origin: the restricted Z3 chart cannot embed
        from orbatlas.atlas import restrict_chart

        w0, _ = restrict_chart(u1.chart("cone3"), Point.origin(6, 1), Fraction(1, 4), cid="w0")
        ident = AffineMap.identity(6, 1)
        ws = [WitnessSpan(w0, Embedding("w0", "cone3", ident), Embedding("w0", "cone2", ident))]
        rep = atlases_equivalent(u1, u2, ws)
        assert not rep.ok  # equivariance of the second leg is impossible

    def test_no_witnesses_is_not_equivalence_evidence(self, cone3):
        assert not atlases_equivalent(cone3, cone3, []).ok


class TestRefinement:
    def test_identity_refinement(self, cone3):
        gamma = RefinementData(
            {"cone3": "cone3"}, {"cone3": AffineMap.identity(cone3.conductor, 1)}
        )
        assert is_refinement(cone3, cone3, gamma).ok

    def test_restricted_chart_refines(self, sub_full_cone3):
        sub, full = sub_full_cone3
        m = full.conductor
        from orbatlas.oracles import SpanSearchOracle

        half_only = Atlas(m, 1, [full.chart("half")], [], SpanSearchOracle())
        gamma = RefinementData({"half": "cone3"}, {"half": AffineMap.identity(m, 1)})
        assert is_refinement(half_only, sub, gamma).ok

    def test_missing_embedding_fails(self, cone3):
        gamma = RefinementData({}, {})
        assert not is_refinement(cone3, cone3, gamma).ok

    def test_common_refinement_two_radii(self):
        u1, u2, ws = cone_pair(3)
        ref = common_refinement(u1, u2, ws)
        assert validate_atlas(ref.atlas).ok
        assert is_refinement(ref.atlas, u1, ref.into_first).ok
        assert is_refinement(ref.atlas, u2, ref.into_second).ok

    def test_common_refinement_teardrop_radii(self):
        u1, u2, ws = teardrop_pair(3)
        ref = common_refinement(u1, u2, ws)
        assert validate_atlas(ref.atlas).ok
        assert is_refinement(ref.atlas, u1, ref.into_first).ok
        assert is_refinement(ref.atlas, u2, ref.into_second).ok

    def test_not_equivalent_raises(self, cone3):
        with pytest.raises(NotEquivalentError):
            common_refinement(cone3, cone3, [])


class TestKeyPoint:
    def test_cone_pair_chain(self):
        u1, u2, ws = cone_pair(3)
        chain = morita_equivalence_chain(u1, u2, ws, samples=25, seed=7)
        assert chain.verdict, {k: v.verdict for k, v in chain.reports.items()}

    def test_refinement_inclusions_pass_both_sides(self):
        u1, u2, ws = cone_pair(3)
        chain = morita_equivalence_chain(u1, u2, ws, samples=25, seed=8)
        assert chain.reports["refinement into first union"].verdict
        assert chain.reports["refinement into second union"].verdict


class TestPushforward:
    def test_identity_relabel(self, cone3):
        pushed = pushforward_atlas({"cone3": "cone3"}, cone3)
        assert pushed.charts.keys() == cone3.charts.keys()
        assert presentations_structurally_equal(
            TranslationGroupoid(cone3), TranslationGroupoid(pushed)
        )

    def test_football_pole_swap(self, football23):
        pushed = pushforward_atlas(
            {"north": "south", "south": "north", "glue": "glue"}, football23
        )
        assert presentations_structurally_equal(
            TranslationGroupoid(football23), TranslationGroupoid(pushed)
        )

    def test_non_injective_relabel_rejected(self, cone3):
        from orbatlas.errors import InvalidRelabelingError

        with pytest.raises(InvalidRelabelingError):
            pushforward_atlas({"a": "x", "b": "x"}, cone3)


def z3_action():
    m = 3
    ball = Ball(Point.origin(m, 1), CycNum.rational(m, 1))
    z = CycNum.zeta(3)
    return ActionGroupoid(m, ball, [(f"g{k}", AffineMap.scaling(m, 1, z**k)) for k in range(3)])


class TestReconstruction:
    def test_action_groupoid_round_trip(self):
        g = z3_action()
        rec = reconstruct_atlas(g, samples=2, seed=9)
        assert validate_atlas(rec.atlas).ok
        orders = sorted(len(rec.atlas.chart(cid).group) for cid in rec.atlas.chart_ids())
        assert orders[-1] == 3  # the chart at the fixed point keeps the full group
        mor = reconstruction_morita_morphism(g, rec)
        assert validate_groupoid_morphism(mor, samples=20, seed=10).ok
        assert check_morita(mor, samples=25, seed=11).verdict

    def test_trivial_groupoid_round_trip(self):
        m = 1
        ball = Ball(Point.origin(m, 1), CycNum.rational(m, 1))
        g = ActionGroupoid(m, ball, [("e", AffineMap.identity(m, 1))])
        rec = reconstruct_atlas(g, samples=2, seed=12)
        assert validate_atlas(rec.atlas).ok
        assert all(len(rec.atlas.chart(c).group) == 1 for c in rec.atlas.chart_ids())
        assert check_morita(reconstruction_morita_morphism(g, rec), samples=15, seed=13).verdict

    def test_football_round_trip(self, football23):
        g = TranslationGroupoid(football23)
        rec = reconstruct_atlas(g, samples=1, seed=14)
        assert validate_atlas(rec.atlas).ok
        orders = sorted(len(rec.atlas.chart(cid).group) for cid in rec.atlas.chart_ids())
        assert 2 in orders and 3 in orders
        assert check_morita(reconstruction_morita_morphism(g, rec), samples=15, seed=15).verdict

    def test_reconstructed_atlas_equivalent_to_source(self, cone3):
        g = TranslationGroupoid(cone3)
        rec = reconstruct_atlas(g, samples=2, seed=16)
        m = cone3.conductor
        ws = [
            WitnessSpan(
                rec.atlas.chart(cid),
                Embedding(cid, cid, rec.atlas.chart(cid).identity()),
                Embedding(cid, rec.anchors[cid], AffineMap.identity(m, 1)),
            )
            for cid in rec.atlas.chart_ids()
        ]
        assert atlases_equivalent(rec.atlas, cone3, ws).ok


class TestBijectionDemo:
    def test_equivalent_pairs(self):
        pairs = [cone_pair(3), teardrop_pair(3), pushforward_pair(football(2, 3))]
        for u1, u2, ws in pairs:
            v = bijection_demo(u1, u2, ws, samples=15, seed=17)
            assert v.atlas_side == "equivalent"
            assert v.groupoid_side == "equivalent"
            assert v.agreement

    def test_inequivalent_pairs(self):
        pairs = [
            (cone(3, conductor=6), cone(2, conductor=6)),
            (cone(3), point_atlas()),
            (football(2, 3, conductor=6), cone(2, conductor=6)),
        ]
        for u1, u2 in pairs:
            v = bijection_demo(u1, u2, None, samples=10, seed=18)
            assert v.atlas_side == "inequivalent"
            assert v.groupoid_side == "inequivalent"
            assert v.agreement

    def test_signature_values(self):
        assert isotropy_signature(TranslationGroupoid(cone(3))) == (1, (1, 3))
        assert isotropy_signature(TranslationGroupoid(football(2, 3))) == (1, (1, 2, 3))
        assert isotropy_signature(TranslationGroupoid(teardrop(4))) == (1, (1, 4))
        assert isotropy_signature(TranslationGroupoid(point_atlas()))[0] == 0
