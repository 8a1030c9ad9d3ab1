"""Algebraic laws under generated inputs (derandomized, so runs are stable)."""

from hypothesis import given, settings, strategies as st

from boxops import graphs
from boxops.partitions import OrderedPartition, compatible, compatible_blocks, preceq, wedge

settings.register_profile("stable", derandomize=True, max_examples=60, deadline=None)
settings.load_profile("stable")


@st.composite
def graph_objects(draw, n_max=3, k_max=4):
    n = draw(st.integers(1, n_max))
    k = draw(st.integers(2, k_max))
    e = k * (k - 1) // 2
    codes = draw(st.lists(st.integers(0, 2 * n - 1), min_size=e, max_size=e))
    return graphs.GraphObject(n, k, codes)


@st.composite
def partition_words(draw, k_max=5):
    k = draw(st.integers(1, k_max))
    raw = draw(st.lists(st.integers(1, k), min_size=k, max_size=k))
    rank = {v: i + 1 for i, v in enumerate(sorted(set(raw)))}
    return OrderedPartition(tuple(rank[v] for v in raw))


@given(graph_objects())
def test_dual_involution(obj):
    assert graphs.dual(graphs.dual(obj)) == obj


@given(graph_objects(), st.randoms(use_true_random=False))
def test_dual_reverses_sampled_pairs(obj, rng):
    other_codes = [rng.randrange(2 * obj.n) for _ in obj.codes]
    other = graphs.GraphObject(obj.n, obj.k, other_codes)
    assert graphs.is_morphism(obj, other) == graphs.is_morphism(
        graphs.dual(other), graphs.dual(obj)
    )


@given(graph_objects(), st.randoms(use_true_random=False))
def test_sigma_action_composes(obj, rng):
    sigma = list(range(obj.k))
    tau = list(range(obj.k))
    rng.shuffle(sigma)
    rng.shuffle(tau)
    lhs = graphs.sigma_action(graphs.sigma_action(obj, sigma), tau)
    rhs = graphs.sigma_action(obj, [sigma[tau[x]] for x in range(obj.k)])
    assert lhs == rhs


@given(graph_objects(), st.randoms(use_true_random=False))
def test_restriction_composes(obj, rng):
    mid = rng.randint(1, obj.k)
    inj1 = rng.sample(range(obj.k), mid)
    inj2 = rng.sample(range(mid), rng.randint(1, mid))
    direct = graphs.restrict(obj, [inj1[e] for e in inj2])
    assert graphs.restrict(graphs.restrict(obj, inj1), inj2) == direct


@given(partition_words(), partition_words())
def test_cap_forms_agree(v, w):
    if v.k != w.k:
        return
    assert compatible(v, w) == compatible_blocks(v, w)
    assert compatible(v, w) == compatible(w, v)


@given(partition_words(), partition_words())
def test_wedge_below_both_and_commutes(v, w):
    if v.k != w.k:
        return
    u = wedge(v, w)
    assert preceq(u, v) and preceq(u, w)
    assert u == wedge(w, v)
    assert wedge(v, v) == v
