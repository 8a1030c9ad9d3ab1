import random

import pytest

from boxops import graphs
from boxops.contractibility import certify_contractible
from boxops.errors import IntegrityError
from boxops.grothendieck import (
    PosetFunctor,
    block_fiber_functor,
    family_tuple,
    grothendieck,
    two_label_form,
    structural_certificate,
    verify_grothendieck_prop,
    verify_two_label_reduction,
)
from boxops.posets import Poset, poset_isomorphic, poset_product
from boxops.textform import from_box_expr


def chain(m):
    return Poset.from_leq(tuple(range(m)), lambda a, b: a <= b)


def point_poset(key="*"):
    return Poset((key,), (1,))


def constant_functor(base, fiber):
    fibers = {a: fiber for a in base.elements}
    transports = {}
    for a in base.elements:
        for b in base.elements:
            if base.le(a, b):
                transports[(a, b)] = {x: x for x in fiber.elements}
    return PosetFunctor(base=base, fibers=fibers, transports=transports)


def test_point_base_gives_fiber():
    fiber = chain(3)
    functor = constant_functor(point_poset(), fiber)
    total = grothendieck(functor)
    assert poset_isomorphic(total, fiber) is not None


def test_point_fibers_give_base():
    base = chain(3)
    functor = constant_functor(base, point_poset())
    total = grothendieck(functor)
    assert poset_isomorphic(total, base) is not None


def test_two_chains_identity_transport_is_grid():
    base = chain(2)
    functor = constant_functor(base, chain(2))
    total = grothendieck(functor)
    grid = poset_product([chain(2), chain(2)])
    assert poset_isomorphic(total, grid) is not None


def test_functor_laws_are_enforced():
    base = chain(2)
    fiber = chain(2)
    transports = {
        (0, 0): {0: 0, 1: 1},
        (1, 1): {0: 0, 1: 1},
        (0, 1): {0: 1, 1: 0},  # not monotone
    }
    with pytest.raises(IntegrityError):
        PosetFunctor(base=base, fibers={0: fiber, 1: fiber}, transports=transports)


def test_fibers_are_points_for_two_labels():
    for obj in family_tuple("ke", 2, 3):
        functor = block_fiber_functor(2, obj)
        assert all(len(f) == 1 for f in functor.fibers.values())


def test_functor_laws_hold_for_built_fibers():
    rng = random.Random(2024)
    objs = family_tuple("ke", 3, 3)
    for obj in rng.sample(list(objs), 25):
        block_fiber_functor(3, obj)  # construction validates the laws


def test_fiber_over_single_block_is_full_over_poset():
    # an object with no 1-labels admits the one-block partition, whose fiber
    # is the whole over-poset of the floor-2 family
    obj = from_box_expr("(1[]2 2)[]3 3", 3)
    functor = block_fiber_functor(3, obj)
    single = tuple([1] * 3)
    from boxops.graphs import Family, is_morphism, shift_labels

    members = [
        shift_labels(o, 1, 3)
        for o in graphs.enumerate_family(Family("mdown"), 2, 3)
    ]
    want = sorted(o.key for o in members if is_morphism(o, obj))
    got = sorted(key[0] for key in functor.fibers[single].elements)
    assert got == want


def test_grothendieck_prop_exhaustive_k2():
    for obj in family_tuple("ke", 3, 2):
        report = verify_grothendieck_prop(3, obj)
        assert report["isomorphic"]


def test_grothendieck_prop_sampled_k3():
    rng = random.Random(77)
    objs = family_tuple("ke", 3, 3)
    for obj in rng.sample(list(objs), 30):
        report = verify_grothendieck_prop(3, obj)
        assert report["isomorphic"]
        assert report["total"] == report["over"]


def test_trivial_reduction_for_two_labels():
    # with two labels the construction reproduces the over-poset directly
    for obj in family_tuple("ke", 2, 3)[:12]:
        report = verify_grothendieck_prop(2, obj)
        assert report["isomorphic"]
        assert all(s == 1 for s in report["fiber_sizes"])


# ---------------------------------------------------------------------------
# the two-label reduction


def test_two_label_form_labels_and_arcs():
    obj = from_box_expr("3[]1((2[]3 6)[]2 4)[]1(1[]3 5)", 3)
    prime = two_label_form(obj)
    assert prime.n == 2
    for x, y in graphs.edge_pairs(6):
        want = 1 if obj.label(x, y) == 1 else 2
        assert prime.label(x, y) == want
        if obj.label(x, y) == 1:
            assert prime.arrow(x, y) == obj.arrow(x, y)
    assert graphs.in_family(prime, graphs.KE)


def test_two_label_form_no_ones():
    obj = from_box_expr("(1[]2 2)[]3 3", 3)
    prime = two_label_form(obj)
    # orientations follow the index order when nothing is constrained
    for x, y in graphs.edge_pairs(3):
        assert prime.arrow(x, y)
        assert prime.label(x, y) == 2


def test_two_label_form_idempotent_context():
    for obj in family_tuple("ke", 2, 3):
        prime = two_label_form(obj)
        assert prime.arcs(label=1) == obj.arcs(label=1)
        report = verify_two_label_reduction(obj)
        assert report["isomorphic"]


def test_two_label_reduction_exhaustive_k3():
    for obj in family_tuple("ke", 3, 3):
        report = verify_two_label_reduction(obj)
        assert report["isomorphic"]


def test_structural_certificate_small():
    obj = from_box_expr("(1[]2 2)[]3 3", 3)
    pieces = structural_certificate(3, obj, certify_contractible)
    assert all(status == "CONTRACTIBLE-certified" for _, _, status in pieces["fibers"])


def test_recursive_pipeline_closes_direct_and_structural():
    import random

    from boxops.graphs import is_morphism
    from boxops.contractibility import object_poset

    rng = random.Random(314)
    cases = list(family_tuple("ke", 3, 2))
    cases += rng.sample(list(family_tuple("ke", 3, 3)), 30)
    cases += rng.sample(list(family_tuple("ke", 3, 4)), 8)
    down3 = {}
    for obj in cases:
        k = obj.k
        if k not in down3:
            down3[k] = list(family_tuple("mdown", 3, k))
        members = [a for a in down3[k] if is_morphism(a, obj)]
        direct = certify_contractible(object_poset(members, is_morphism))
        assert direct.contractible()
        pieces = structural_certificate(3, obj, certify_contractible)
        assert all(
            status == "CONTRACTIBLE-certified" for _, _, status in pieces["fibers"]
        )
