"""Ordered partitions under acyclic arc constraints, their compatibility
complex, and the deterministic collapse driver with verified traces.

A context fixes a ground set 0..k-1 and an acyclic set of arcs; the
admissible ordered partitions are those placing every arc's tail in an
earlier block than its head.  Everything downstream (the refinement order,
the compatibility relation, the wedge/least-element machinery and the
collapse of the compatibility complex) is computed from the context alone.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

from .complexes import CollapseTrace, SimplicialComplex
from .errors import FalsificationError, IntegrityError
from .graphs import GraphObject
from .posets import Poset


@dataclass(frozen=True)
class OrderedPartition:
    """Blocks encoded by the word alpha: alpha[x] is x's 1-based block."""

    alpha: tuple[int, ...]

    def __post_init__(self):
        p = max(self.alpha, default=0)
        if set(self.alpha) != set(range(1, p + 1)):
            raise ValueError(f"word {self.alpha} is not surjective onto 1..{p}")

    @classmethod
    def from_blocks(cls, blocks: Sequence[Iterable[int]]) -> "OrderedPartition":
        seen: dict[int, int] = {}
        for i, blk in enumerate(blocks, start=1):
            for x in blk:
                if x in seen:
                    raise ValueError(f"element {x} in two blocks")
                seen[x] = i
        if sorted(seen) != list(range(len(seen))):
            raise ValueError("blocks must cover 0..k-1")
        return cls(tuple(seen[x] for x in range(len(seen))))

    @property
    def k(self) -> int:
        return len(self.alpha)

    @property
    def p(self) -> int:
        return max(self.alpha, default=0)

    def blocks(self) -> tuple[frozenset[int], ...]:
        out: list[set[int]] = [set() for _ in range(self.p)]
        for x, i in enumerate(self.alpha):
            out[i - 1].add(x)
        return tuple(frozenset(b) for b in out)

    def block_masks(self) -> tuple[int, ...]:
        out = [0] * self.p
        for x, i in enumerate(self.alpha):
            out[i - 1] |= 1 << x
        return tuple(out)

    def word(self) -> str:
        if self.p <= 9:
            return "".join(str(d) for d in self.alpha)
        return "-".join(str(d) for d in self.alpha)

    @classmethod
    def from_word(cls, text: str) -> "OrderedPartition":
        if "-" in text:
            return cls(tuple(int(d) for d in text.split("-")))
        return cls(tuple(int(d) for d in text))


def _check_acyclic(k: int, arcs: frozenset[tuple[int, int]]):
    adj: dict[int, list[int]] = {v: [] for v in range(k)}
    for a, b in arcs:
        if not (0 <= a < k and 0 <= b < k) or a == b:
            raise ValueError(f"bad arc {(a, b)} for k={k}")
        adj[a].append(b)
    color = {v: 0 for v in range(k)}

    def visit(u):
        color[u] = 1
        for v in adj[u]:
            if color[v] == 1 or (color[v] == 0 and visit(v)):
                return True
        color[u] = 2
        return False

    if any(color[v] == 0 and visit(v) for v in range(k)):
        raise IntegrityError("constraint arcs contain a cycle")


@dataclass(frozen=True)
class ArcContext:
    """Ground size plus the acyclic arc set extracted from 1-labeled edges."""

    k: int
    one_arcs: frozenset[tuple[int, int]]

    def __post_init__(self):
        _check_acyclic(self.k, self.one_arcs)

    @classmethod
    def from_arcs(cls, k: int, arcs: Iterable[tuple[int, int]]) -> "ArcContext":
        return cls(k, frozenset(arcs))

    @classmethod
    def from_graph_object(cls, obj: GraphObject) -> "ArcContext":
        return cls(obj.k, frozenset(obj.arcs(label=1)))

    def closure(self) -> frozenset[tuple[int, int]]:
        return _closure(self.k, self.one_arcs)

    def context_key(self) -> tuple:
        """Canonical dedup key: admissibility depends only on the closure."""
        return (self.k, tuple(sorted(self.closure())))

    def partitions(self) -> tuple[OrderedPartition, ...]:
        return _partitions(self.k, self.closure())

    def partition_index(self) -> dict[tuple[int, ...], int]:
        return {v.alpha: i for i, v in enumerate(self.partitions())}

    def poset(self) -> Poset:
        """The admissible partitions under the block-refinement order."""
        parts = self.partitions()
        return Poset.from_leq(
            tuple(v.alpha for v in parts),
            lambda a, b: le_partition(OrderedPartition(a), OrderedPartition(b)),
            validate=True,
        )

    def compatibility_masks(self) -> tuple[int, ...]:
        return _compatibility_masks(self.k, self.closure())

    def flag_complex(self, dim_cap: int = 24) -> SimplicialComplex:
        """The compatibility flag complex on the admissible partitions."""
        parts = self.partitions()
        return SimplicialComplex.flag(
            tuple(v.alpha for v in parts), self.compatibility_masks(), dim_cap=dim_cap
        )

    def least(self) -> OrderedPartition:
        return least_element(self.partitions())


@lru_cache(maxsize=4096)
def _closure(k: int, arcs: frozenset) -> frozenset:
    reach = {v: set() for v in range(k)}
    for a, b in arcs:
        reach[a].add(b)
    changed = True
    while changed:
        changed = False
        for v in range(k):
            extra = set()
            for w in reach[v]:
                extra |= reach[w] - reach[v]
            if extra:
                reach[v] |= extra
                changed = True
    return frozenset((a, b) for a in range(k) for b in reach[a])


@lru_cache(maxsize=1024)
def _partitions(k: int, closed_arcs: frozenset) -> tuple[OrderedPartition, ...]:
    out = []
    for p in range(1, k + 1):
        for alpha in product(range(1, p + 1), repeat=k):
            if len(set(alpha)) != p:
                continue
            if all(alpha[a] < alpha[b] for a, b in closed_arcs):
                out.append(OrderedPartition(alpha))
    out.sort(key=lambda v: v.alpha)
    return tuple(out)


@lru_cache(maxsize=1024)
def _compatibility_masks(k: int, closed_arcs: frozenset) -> tuple[int, ...]:
    parts = _partitions(k, closed_arcs)
    n = len(parts)
    masks = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if compatible(parts[i], parts[j]):
                masks[i] |= 1 << j
                masks[j] |= 1 << i
    return tuple(masks)


def all_contexts(k: int) -> tuple[ArcContext, ...]:
    """Every transitively closed acyclic arc set on 0..k-1, canonically ordered.

    These are exactly the admissibility contexts realizable by objects whose
    1-labeled arcs have the given closure.
    """
    pairs = [(x, y) for x in range(k) for y in range(x + 1, k)]
    out = []
    for states in product((0, 1, 2), repeat=len(pairs)):
        arcs = set()
        for (x, y), s in zip(pairs, states):
            if s == 1:
                arcs.add((x, y))
            elif s == 2:
                arcs.add((y, x))
        fr = frozenset(arcs)
        if _closure(k, fr) != fr:
            continue
        try:
            out.append(ArcContext(k, fr))
        except IntegrityError:
            continue
    out.sort(key=lambda c: tuple(sorted(c.one_arcs)))
    return tuple(out)


# ---------------------------------------------------------------------------
# relations and operations on ordered partitions


def le_partition(v: OrderedPartition, w: OrderedPartition) -> bool:
    """Refinement morphism order: v's blocks fill w's blocks order-preservingly."""
    if v.k != w.k:
        raise ValueError("ground sets differ")
    g: dict[int, int] = {}
    for x in range(v.k):
        i, j = v.alpha[x], w.alpha[x]
        if g.setdefault(i, j) != j:
            return False
    return all(g[i] <= g[i + 1] for i in range(1, v.p))


def compatible(v: OrderedPartition, w: OrderedPartition) -> bool:
    """Compatibility: v never orders a pair strictly against w."""
    if v.k != w.k:
        raise ValueError("ground sets differ")
    a, b = v.alpha, w.alpha
    for x in range(v.k):
        ax, bx = a[x], b[x]
        for y in range(v.k):
            if ax < a[y] and bx > b[y]:
                return False
    return True


def compatible_blocks(v: OrderedPartition, w: OrderedPartition) -> bool:
    """Block-form characterization of compatibility (cross-check route)."""
    S = v.block_masks()
    T = w.block_masks()
    for i1 in range(len(S)):
        for i2 in range(i1 + 1, len(S)):
            for j1 in range(len(T)):
                for j2 in range(j1 + 1, len(T)):
                    if S[i1] & T[j2] and S[i2] & T[j1]:
                        return False
    return True


def preceq(v: OrderedPartition, w: OrderedPartition) -> bool:
    """The auxiliary pointwise order on words."""
    if v.k != w.k:
        raise ValueError("ground sets differ")
    return all(a <= b for a, b in zip(v.alpha, w.alpha))


def preceq_blocks(v: OrderedPartition, w: OrderedPartition) -> bool:
    """Block form: each w-block sits inside the corresponding v-prefix."""
    S = v.block_masks()
    T = w.block_masks()
    prefix = 0
    for i in range(len(T)):
        prefix |= S[i] if i < len(S) else 0
        if T[i] & ~prefix:
            return False
    return True


def wedge(v: OrderedPartition, w: OrderedPartition) -> OrderedPartition:
    """Pointwise minimum of the words, compressed to consecutive values."""
    if v.k != w.k:
        raise ValueError("ground sets differ")
    mins = [min(a, b) for a, b in zip(v.alpha, w.alpha)]
    rank = {val: i + 1 for i, val in enumerate(sorted(set(mins)))}
    return OrderedPartition(tuple(rank[m] for m in mins))


def block_infimum(v: OrderedPartition, w: OrderedPartition) -> OrderedPartition | None:
    """The blockwise-intersection infimum, defined exactly when compatible."""
    if not compatible(v, w):
        return None
    S = v.block_masks()
    T = w.block_masks()
    index_pairs = [
        (i, j)
        for i in range(len(S))
        for j in range(len(T))
        if S[i] & T[j]
    ]
    index_pairs.sort()
    for (i1, j1), (i2, j2) in zip(index_pairs, index_pairs[1:]):
        if not (i1 <= i2 and j1 <= j2):
            raise IntegrityError("intersection index set is not linearly ordered")
    blocks = []
    for i, j in index_pairs:
        blocks.append(
            [x for x in range(v.k) if (S[i] >> x) & 1 and (T[j] >> x) & 1]
        )
    return OrderedPartition.from_blocks(blocks)


def least_element(parts: Sequence[OrderedPartition]) -> OrderedPartition:
    """Iterated wedge over all elements; global minimality re-verified."""
    if not parts:
        raise ValueError("empty partition family has no least element")
    least = parts[0]
    for v in parts[1:]:
        least = wedge(least, v)
    for v in parts:
        if not preceq(least, v):
            raise IntegrityError(
                f"iterated wedge {least.word()} is not below {v.word()}"
            )
    return least


def compatible_predecessor(
    u: OrderedPartition,
    v: OrderedPartition,
    universe: Sequence[OrderedPartition] | None = None,
) -> OrderedPartition:
    """The compatibility-preserving element strictly below v built from u < v.

    Verifies at runtime that the result sits strictly below v, is compatible
    with v, and (when a universe is given) inherits compatibility from u and
    v across the whole universe.
    """
    if not (preceq(u, v) and u.alpha != v.alpha):
        raise ValueError("need u strictly below v in the pointwise order")
    R = list(u.block_masks())
    S = list(v.block_masks())
    p = len(S)
    j = None
    for idx in range(p):
        r = R[idx] if idx < len(R) else 0
        if S[idx] & ~r:
            j = idx + 1  # 1-based
            break
    if j is None or j < 2:
        raise IntegrityError("no valid split index; ordering predicate is broken")
    prefix_r = 0
    for idx in range(j - 1):
        prefix_r |= R[idx] if idx < len(R) else 0
    rj = R[j - 1] if j - 1 < len(R) else 0
    merged = S[j - 2] | (prefix_r & S[j - 1])
    leftover = rj & S[j - 1]
    new_masks = S[: j - 2] + [merged]
    if leftover:
        new_masks.append(leftover)
    new_masks.extend(S[j:])
    result = OrderedPartition.from_blocks(
        [[x for x in range(v.k) if (m >> x) & 1] for m in new_masks]
    )
    if not (preceq(result, v) and result.alpha != v.alpha):
        raise FalsificationError(
            "predecessor element is not strictly below v",
            {"u": u.word(), "v": v.word(), "predecessor": result.word()},
        )
    if not compatible(result, v):
        raise FalsificationError(
            "predecessor element is not compatible with v",
            {"u": u.word(), "v": v.word(), "predecessor": result.word()},
        )
    if universe is not None:
        for w in universe:
            if compatible(u, w) and compatible(v, w) and not compatible(result, w):
                raise FalsificationError(
                    "predecessor element loses compatibility with a witness",
                    {
                        "u": u.word(),
                        "v": v.word(),
                        "predecessor": result.word(),
                        "w": w.word(),
                    },
                )
    return result


# ---------------------------------------------------------------------------
# the collapse driver


@dataclass(frozen=True)
class DriverResult:
    trace: CollapseTrace
    terminal: OrderedPartition
    steps: int
    partition_count: int
    simplex_count: int


def _iter_bits(mask: int):
    while mask:
        b = mask & (-mask)
        yield b.bit_length() - 1
        mask ^= b


def _maximal_cliques(adj: Sequence[int], n: int):
    """Bron-Kerbosch with pivoting over bitmask adjacency."""
    out = []

    def expand(r: int, p: int, x: int):
        if not p and not x:
            out.append(r)
            return
        pux = p | x
        pivot = max(_iter_bits(pux), key=lambda v: (adj[v] & p).bit_count())
        for v in list(_iter_bits(p & ~adj[pivot])):
            bit = 1 << v
            expand(r | bit, p & adj[v], x & adj[v])
            p &= ~bit
            x |= bit

    expand(0, (1 << n) - 1, 0)
    return out


class _DriverState:
    """Mutable collapse state over a fixed context."""

    def __init__(self, ctx: ArcContext):
        self.ctx = ctx
        self.parts = ctx.partitions()
        if not self.parts:
            raise IntegrityError("context admits no partitions")
        self.adj = ctx.compatibility_masks()
        self.n = len(self.parts)
        self.pindex = ctx.partition_index()
        self.removed: set[int] = set()
        self.u0 = ctx.least()
        self.u0_idx = self.pindex[self.u0.alpha]
        self.maximal: dict[int, int] = {}
        self.heap: list = []
        for mask in _maximal_cliques(self.adj, self.n):
            self._add_maximal(mask)

    def _least_vertex(self, mask: int) -> int:
        verts = list(_iter_bits(mask))
        least = self.parts[verts[0]]
        for vi in verts[1:]:
            least = wedge(least, self.parts[vi])
        idx = self.pindex.get(least.alpha)
        if idx is None or not (mask >> idx) & 1:
            raise FalsificationError(
                "maximal simplex has no least vertex inside itself",
                {"simplex": [self.parts[v].word() for v in verts]},
            )
        for vi in verts:
            if not preceq(least, self.parts[vi]):
                raise FalsificationError(
                    "computed least vertex is not below every vertex",
                    {"simplex": [self.parts[v].word() for v in verts]},
                )
        return idx

    def _add_maximal(self, mask: int):
        li = self._least_vertex(mask)
        self.maximal[mask] = li
        alpha = self.parts[li].alpha
        skey = tuple(_iter_bits(mask))
        heapq.heappush(self.heap, (-sum(alpha), alpha, skey, mask))

    def present_coface_missing(self, mask: int) -> bool:
        """True iff mask has no present coface (so it is maximal)."""
        common = (1 << self.n) - 1
        for v in _iter_bits(mask):
            common &= self.adj[v]
        common &= ~mask
        for y in _iter_bits(common):
            if (mask | (1 << y)) not in self.removed:
                return False
        return True

    def verify_free(self, face: int, cofacet: int):
        common = (1 << self.n) - 1
        for v in _iter_bits(face):
            common &= self.adj[v]
        common &= ~face
        for y in _iter_bits(common):
            up = face | (1 << y)
            if up == cofacet:
                continue
            if up not in self.removed:
                raise FalsificationError(
                    "selected face is not free",
                    {
                        "face": [self.parts[v].word() for v in _iter_bits(face)],
                        "other_coface": [
                            self.parts[v].word() for v in _iter_bits(up)
                        ],
                    },
                )


def collapse_driver(ctx: ArcContext, paranoid: bool = False) -> DriverResult:
    """Collapse the compatibility complex down to the least partition.

    Each step removes a preorder-maximal maximal simplex together with its
    least-vertex-deleted free face, verifying freeness on the way; any
    violation raises FalsificationError with the offending state.
    """
    st = _DriverState(ctx)
    steps: list[tuple] = []
    words = [p.alpha for p in st.parts]

    if paranoid:
        _validate_good_subcomplex(st)

    while True:
        if len(st.maximal) == 1:
            mask = next(iter(st.maximal))
            if mask.bit_count() == 1:
                vi = mask.bit_length() - 1
                if vi != st.u0_idx:
                    raise FalsificationError(
                        "terminal vertex differs from the least element",
                        {"terminal": st.parts[vi].word(), "least": st.u0.word()},
                    )
                break
        V = None
        while st.heap:
            _, _, _, mask = heapq.heappop(st.heap)
            if mask in st.maximal:
                V = mask
                break
        if V is None:
            raise FalsificationError(
                "no collapsible simplex remains but the complex is not a point",
                {"maximal": len(st.maximal)},
            )
        v0 = st.maximal[V]
        if V.bit_count() == 1:
            raise FalsificationError(
                "singleton maximal simplex while other simplices remain",
                {"vertex": st.parts[v0].word(), "maximal": len(st.maximal)},
            )
        F = V & ~(1 << v0)
        st.verify_free(F, V)
        st.removed.add(V)
        st.removed.add(F)
        del st.maximal[V]
        steps.append(
            (
                tuple(words[i] for i in _iter_bits(F)),
                tuple(words[i] for i in _iter_bits(V)),
            )
        )
        for gone, skip in ((V, v0), (F, None)):
            for w in _iter_bits(gone):
                if w == skip:
                    continue
                W = gone & ~(1 << w)
                if not W or W in st.removed or W in st.maximal:
                    continue
                if st.present_coface_missing(W):
                    st._add_maximal(W)
        if paranoid:
            _validate_good_subcomplex(st)

    trace = CollapseTrace(
        vertices=tuple(words),
        steps=tuple(steps),
        terminal_maximal=((st.u0.alpha,),),
        collapsed_to_point=True,
    )
    return DriverResult(
        trace=trace,
        terminal=st.u0,
        steps=len(steps),
        partition_count=st.n,
        simplex_count=2 * len(steps) + 1,
    )


def _present_simplices(st: _DriverState) -> list[int]:
    """All present simplices (cliques minus removed), for paranoid checks."""
    out = []

    def grow(mask: int, cand: int, mn: int):
        bits = cand & ~((1 << mn) - 1)
        for i in _iter_bits(bits):
            new = mask | (1 << i)
            if new not in st.removed:
                out.append(new)
            grow(new, cand & st.adj[i], i + 1)

    grow(0, (1 << st.n) - 1, 0)
    return out


def _validate_good_subcomplex(st: _DriverState):
    """Exhaustive good-subcomplex validation (paranoid mode).

    Checks downward closure, least vertices of maximal simplices, and
    closure under adjoining minimal compatible elements strictly below a
    simplex.
    """
    present = set(_present_simplices(st))
    for mask in present:
        for i in _iter_bits(mask):
            sub = mask & ~(1 << i)
            if sub and sub not in present:
                raise FalsificationError(
                    "present simplex with a removed face",
                    {"simplex": [st.parts[v].word() for v in _iter_bits(mask)]},
                )
    for mask in present:
        has_coface = any(
            (mask | (1 << y)) in present
            for y in range(st.n)
            if not (mask >> y) & 1
        )
        if not has_coface:
            st._least_vertex(mask)  # raises if absent
        candidates = []
        verts = [st.parts[i] for i in _iter_bits(mask)]
        for ci in range(st.n):
            c = st.parts[ci]
            if all(
                preceq(c, v) and c.alpha != v.alpha and compatible(c, v) for v in verts
            ):
                candidates.append(ci)
        minimal = [
            ci
            for ci in candidates
            if not any(
                cj != ci
                and preceq(st.parts[cj], st.parts[ci])
                and st.parts[cj].alpha != st.parts[ci].alpha
                for cj in candidates
            )
        ]
        for ci in minimal:
            grown = mask | (1 << ci)
            if grown not in present:
                raise FalsificationError(
                    "good subcomplex is not closed under a minimal extension",
                    {
                        "simplex": [st.parts[v].word() for v in _iter_bits(mask)],
                        "candidate": st.parts[ci].word(),
                    },
                )
