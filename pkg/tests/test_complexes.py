import random

import pytest

from boxops.complexes import (
    CollapseTrace,
    SimplicialComplex,
    free_faces,
    greedy_collapse,
    replay_trace,
)
from boxops.contractibility import object_poset
from boxops.errors import CapExceededError, IntegrityError
from boxops.graphs import is_morphism
from boxops.homology import reduced_homology, smith_diagonal

from conftest import family_members


def full_simplex(m):
    return SimplicialComplex.from_simplices(range(m), [tuple(range(m))])


def triangle_boundary():
    return SimplicialComplex.from_simplices(range(3), [(0, 1), (1, 2), (0, 2)])


def test_antichain_order_complex_is_points():
    from boxops.posets import Poset

    p = Poset.from_leq(tuple(range(4)), lambda a, b: a == b)
    c = p.order_complex()
    assert c.simplex_count() == 4
    assert all(m.bit_count() == 1 for m in c.materialize())


def test_total_order_order_complex_is_full_simplex():
    from boxops.posets import Poset

    p = Poset.from_leq(tuple(range(4)), lambda a, b: a <= b)
    c = p.order_complex()
    assert c.simplex_count() == 2**4 - 1


def test_order_complex_blind_to_opposite():
    from boxops.posets import Poset

    # divisibility order on 1..5 over 0-based keys
    p = Poset.from_leq(tuple(range(5)), lambda a, b: (b + 1) % (a + 1) == 0)
    assert p.order_complex().materialize() == p.opposite().order_complex().materialize()


def test_flag_materialize_cap():
    c = SimplicialComplex.flag(
        range(12), edges=[(i, j) for i in range(12) for j in range(i + 1, 12)], dim_cap=4
    )
    with pytest.raises(CapExceededError):
        c.materialize()


def test_free_faces_of_full_simplex():
    c = full_simplex(3)
    ff = free_faces(c.materialize(), 3)
    # every codim-1 face of the top cell is free, nothing else
    assert set(ff.values()) == {0b111}
    assert all(f.bit_count() == 2 for f in ff)


def test_greedy_collapse_full_simplex():
    trace = greedy_collapse(full_simplex(5))
    assert trace.collapsed_to_point
    assert len(trace.steps) == (2**5 - 2) // 2
    replay_trace(full_simplex(5), trace)


def test_greedy_collapse_triangle_boundary_inconclusive():
    c = triangle_boundary()
    trace = greedy_collapse(c)
    assert not trace.collapsed_to_point
    assert not trace.steps
    assert len(trace.terminal_maximal) == 3  # unchanged input


def test_replay_rejects_tampered_trace():
    c = full_simplex(3)
    good = greedy_collapse(c)
    bad = CollapseTrace(
        vertices=good.vertices,
        steps=good.steps[1:],  # skip the first step; later steps now illegal
        terminal_maximal=good.terminal_maximal,
        collapsed_to_point=good.collapsed_to_point,
    )
    with pytest.raises(IntegrityError):
        replay_trace(c, bad)


def test_random_strategy_is_seeded_and_legal():
    c = full_simplex(4)
    t1 = greedy_collapse(c, strategy="random", seed=7)
    t2 = greedy_collapse(c, strategy="random", seed=7)
    assert t1.steps == t2.steps
    replay_trace(c, t1)


# ---------------------------------------------------------------------------
# homology


def test_single_vertex_trivial():
    c = SimplicialComplex.from_simplices([0], [(0,)])
    assert reduced_homology(c).trivial()


def test_triangle_boundary_is_circle():
    rep = reduced_homology(triangle_boundary())
    assert rep.betti == {0: 0, 1: 1}
    assert rep.torsion == {0: [], 1: []}


def test_two_components():
    c = SimplicialComplex.from_simplices(range(4), [(0, 1), (2, 3)])
    rep = reduced_homology(c)
    assert rep.betti[0] == 1


def test_projective_plane_torsion():
    rp2 = [
        (0, 1, 4), (0, 1, 5), (0, 2, 3), (0, 2, 4), (0, 3, 5),
        (1, 2, 3), (1, 2, 5), (1, 3, 4), (2, 4, 5), (3, 4, 5),
    ]
    rep = reduced_homology(SimplicialComplex.from_simplices(range(6), rp2))
    assert rep.betti == {0: 0, 1: 0, 2: 0}
    assert rep.torsion[1] == [2]


def test_sphere_betti():
    # boundary of the 3-simplex
    faces = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    rep = reduced_homology(SimplicialComplex.from_simplices(range(4), faces))
    assert rep.betti == {0: 0, 1: 0, 2: 1}


def test_smith_diagonal_divisibility():
    # diag(2, 3) has invariant factors 1, 6
    rows = [{0: 2}, {1: 3}]
    assert smith_diagonal(rows, 2) == [1, 6]
    rows = [{0: 4, 1: 0}, {0: 0, 1: 6}]
    assert smith_diagonal(rows, 2) == [2, 12]


def test_extended_complete_graph_poset_on_two_elements_is_circle():
    objs = list(family_members("ke", 2, 2))
    poset = object_poset(objs, is_morphism)
    rep = reduced_homology(poset.order_complex())
    assert rep.betti == {0: 0, 1: 1}


def test_collapse_preserves_homology_seeded():
    rng = random.Random(20260808)
    for _ in range(40):
        nverts = rng.randint(4, 12)
        nmax = rng.randint(2, 6)
        simplices = []
        for _ in range(nmax):
            size = rng.randint(1, 4)
            simplices.append(tuple(rng.sample(range(nverts), size)))
        simplices.extend((v,) for v in range(nverts))
        c = SimplicialComplex.from_simplices(range(nverts), simplices)
        ff = free_faces(c.materialize(), nverts)
        if not ff:
            continue
        face = min(ff, key=lambda m: tuple(i for i in range(nverts) if (m >> i) & 1))
        cof = ff[face]
        before = reduced_homology(c)
        survivors = [
            c.keys_of(m) for m in c.materialize() if m not in (face, cof)
        ]
        after = reduced_homology(
            SimplicialComplex.from_simplices(range(nverts), survivors)
        )
        dims = set(before.betti) | set(after.betti)
        for d in dims:
            assert before.betti.get(d, 0) == after.betti.get(d, 0)
            assert before.torsion.get(d, []) == after.torsion.get(d, [])
