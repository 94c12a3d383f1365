"""Compatible systems, their 2-cells, and the 2-category law suite."""

import random
from fractions import Fraction

import pytest

from orbatlas.atlas import Embedding
from orbatlas.errors import BoundaryMismatchError
from orbatlas.field import CycNum
from orbatlas.gallery import cone, football
from orbatlas.geometry import AffineMap, PolyMap
from orbatlas.systems import (
    CompatibleSystem,
    OrbNatTrans,
    check_2cat_laws,
    compose_compatible,
    cells_equal,
    hcomp_orb,
    identity_cell,
    identity_system,
    rotation_fixture,
    rotation_system,
    systems_equal,
    validate_compatible_system,
    validate_orb_nat_trans,
    vcomp_orb,
)


@pytest.fixture(scope="module")
def a3():
    return cone(3)


def square_system(atlas):
    m = atlas.conductor
    cid = atlas.chart_ids()[0]
    sq = PolyMap(m, 1, 1, [{(2,): 1}])
    return CompatibleSystem(atlas, atlas, {cid: cid}, {}, {cid: sq})


class TestCompatibleSystems:
    def test_identity_system_valid(self, a3):
        assert validate_compatible_system(identity_system(a3)).ok

    def test_square_lift_valid(self, a3):
        f = square_system(a3)
        rep = validate_compatible_system(f)
        assert rep.ok, rep.failures()
        z3 = AffineMap.scaling(a3.conductor, 1, CycNum.zeta(3))
        assert f.group_map("cone3")[z3] == AffineMap.scaling(a3.conductor, 1, CycNum.zeta(3) ** 2)

    def test_translation_lift_invalid(self, a3):
        m = a3.conductor
        shift = PolyMap(m, 1, 1, [{(1,): 1, (0,): Fraction(1, 10)}])
        f = CompatibleSystem(a3, a3, {"cone3": "cone3"}, {}, {"cone3": shift})
        assert not validate_compatible_system(f).ok

    def test_identity_is_unit(self, a3):
        f = square_system(a3)
        assert systems_equal(compose_compatible(f, identity_system(a3)), f)
        assert systems_equal(compose_compatible(identity_system(a3), f), f)

    def test_square_composition_is_fourth_power(self, a3):
        f = square_system(a3)
        comp = compose_compatible(f, f)
        assert comp.lift("cone3").coords[0] == {(4,): CycNum.rational(a3.conductor, 1)}
        assert validate_compatible_system(comp).ok

    def test_composition_associative_on_rotations(self, a3):
        rng = random.Random(0)
        fx = rotation_fixture(a3, rng)
        lhs = compose_compatible(fx.h1, compose_compatible(fx.g1, fx.f1))
        rhs = compose_compatible(compose_compatible(fx.h1, fx.g1), fx.f1)
        assert systems_equal(lhs, rhs)

    def test_football_rotation_system(self):
        fb = football(2, 3)
        f = rotation_system(fb, {"north": 3, "south": 2, "glue": 0})
        rep = validate_compatible_system(f)
        assert rep.ok, rep.failures()


class TestNatTrans:
    def test_identity_cell_valid(self, a3):
        f = square_system(a3)
        assert validate_orb_nat_trans(identity_cell(f)).ok

    def test_rotation_cell_between_lifts(self, a3):
        # first system: identity lifts; second: z -> zeta_3 z; cell = zeta_3
        f1 = rotation_system(a3, {"cone3": 0})
        f2 = rotation_system(a3, {"cone3": 1})
        z3 = Embedding("cone3", "cone3", AffineMap.scaling(a3.conductor, 1, CycNum.zeta(3)))
        delta = OrbNatTrans(f1, f2, {"cone3": z3})
        assert validate_orb_nat_trans(delta).ok

    def test_wrong_component_detected(self, a3):
        f1 = rotation_system(a3, {"cone3": 0})
        f2 = rotation_system(a3, {"cone3": 1})
        z3sq = Embedding(
            "cone3", "cone3", AffineMap.scaling(a3.conductor, 1, CycNum.zeta(3) ** 2)
        )
        delta = OrbNatTrans(f1, f2, {"cone3": z3sq})
        rep = validate_orb_nat_trans(delta)
        assert not rep.ok
        assert any("factors" in name for name, _ in rep.failures())

    def test_vertical_composition(self, a3):
        f = [rotation_system(a3, {"cone3": k}) for k in range(3)]
        z = lambda k: Embedding(
            "cone3", "cone3", AffineMap.scaling(a3.conductor, 1, CycNum.zeta(3) ** k)
        )
        delta = OrbNatTrans(f[0], f[1], {"cone3": z(1)})
        sigma = OrbNatTrans(f[1], f[2], {"cone3": z(1)})
        comp = vcomp_orb(sigma, delta)
        assert comp.components["cone3"].map == z(2).map
        assert validate_orb_nat_trans(comp).ok
        assert cells_equal(vcomp_orb(delta, identity_cell(f[0])), delta)
        assert cells_equal(vcomp_orb(identity_cell(f[1]), delta), delta)

    def test_vcomp_boundary_mismatch(self, a3):
        f = [rotation_system(a3, {"cone3": k}) for k in range(3)]
        z1 = Embedding("cone3", "cone3", AffineMap.scaling(a3.conductor, 1, CycNum.zeta(3)))
        delta = OrbNatTrans(f[0], f[1], {"cone3": z1})
        with pytest.raises(BoundaryMismatchError):
            vcomp_orb(delta, delta)

    def test_hcomp_identity_cells(self, a3):
        f = square_system(a3)
        g = rotation_system(a3, {"cone3": 1})
        lhs = hcomp_orb(identity_cell(g), identity_cell(f))
        assert cells_equal(lhs, identity_cell(compose_compatible(g, f)))

    def test_composition_outputs_revalidate(self, a3):
        # closure: vertical and horizontal composites are valid 2-cells
        rng = random.Random(17)
        fx = rotation_fixture(a3, rng)
        assert validate_orb_nat_trans(vcomp_orb(fx.sigma, fx.delta)).ok
        assert validate_orb_nat_trans(hcomp_orb(fx.eta, fx.delta)).ok


class TestLawSuite:
    def test_all_identity_fixture(self, a3):
        rng = random.Random(99)
        fx = rotation_fixture(a3, rng)
        rep = check_2cat_laws(fx)
        assert rep.ok, rep.failures()

    @pytest.mark.parametrize("p", [2, 3, 4, 6])
    def test_random_squares_per_cone(self, p):
        atlas = cone(p)
        rng = random.Random(p)
        for _ in range(5):
            rep = check_2cat_laws(rotation_fixture(atlas, rng))
            assert rep.ok, rep.failures()

    def test_corrupted_fixture_detected(self, a3):
        rng = random.Random(1)
        fx = rotation_fixture(a3, rng)
        wrong = Embedding(
            "cone3",
            "cone3",
            fx.delta.components["cone3"].map.compose(
                AffineMap.scaling(a3.conductor, 1, CycNum.zeta(3))
            ),
        )
        fx.delta.components["cone3"] = wrong
        rep = check_2cat_laws(fx)
        assert not rep.ok
