"""Edge-labeled, oriented complete graphs and their operad structure.

An object over the ground set {0,...,k-1} assigns every unordered pair a
label in {1,...,n} and a direction.  This module provides the partial order
of such objects, membership tests for the acyclicity/decomposability
families, the box and gamma products, the symmetric group action,
restriction along injections, label duality and key-ordered enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Sequence

from .errors import (
    BitBudgetError,
    DimensionError,
    FamilyError,
    OrientedCycleError,
)

_PAIR_CACHE: dict[int, tuple[tuple[int, int], ...]] = {}

DEFAULT_MAX_BITS = 96


def edge_pairs(k: int) -> tuple[tuple[int, int], ...]:
    """All pairs (x, y) with x < y < k, in lexicographic order."""
    try:
        return _PAIR_CACHE[k]
    except KeyError:
        _PAIR_CACHE[k] = tuple((x, y) for x in range(k) for y in range(x + 1, k))
        return _PAIR_CACHE[k]


def pair_position(k: int, x: int, y: int) -> int:
    """Index of the pair (x, y), x < y, within edge_pairs(k)."""
    return x * (2 * k - x - 1) // 2 + (y - x - 1)


def code_bits(n: int) -> int:
    """Bits needed per edge: one of 2n states."""
    return (2 * n - 1).bit_length()


class GraphObject:
    """Immutable labeling/orientation of the complete graph on 0..k-1.

    Edge data is stored per pair, in lexicographic pair order, as the code
    (label-1)*2 + forward where forward means the edge points from the
    smaller to the larger element.  The packed integer `key` concatenates
    the codes (first pair most significant) and induces the canonical total
    order used for all deterministic tie-breaking.
    """

    __slots__ = ("n", "k", "codes", "key")

    def __init__(self, n: int, k: int, codes: Iterable[int]):
        codes = tuple(codes)
        if n < 1:
            raise ValueError(f"label bound n must be >= 1, got {n}")
        if k < 0:
            raise ValueError(f"ground size k must be >= 0, got {k}")
        if len(codes) != k * (k - 1) // 2:
            raise ValueError(
                f"expected {k * (k - 1) // 2} edge codes for k={k}, got {len(codes)}"
            )
        hi = 2 * n
        for c in codes:
            if not 0 <= c < hi:
                raise ValueError(f"edge code {c} out of range for n={n}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "codes", codes)
        bits = code_bits(n)
        key = 0
        for c in codes:
            key = (key << bits) | c
        object.__setattr__(self, "key", key)

    def __setattr__(self, name, value):
        raise AttributeError("GraphObject is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, GraphObject)
            and self.n == other.n
            and self.k == other.k
            and self.codes == other.codes
        )

    def __hash__(self):
        return hash((self.n, self.k, self.codes))

    def __repr__(self):
        return f"GraphObject(n={self.n}, k={self.k}, key={self.key})"

    def code(self, x: int, y: int) -> int:
        a, b = (x, y) if x < y else (y, x)
        return self.codes[pair_position(self.k, a, b)]

    def label(self, x: int, y: int) -> int:
        return (self.code(x, y) >> 1) + 1

    def arrow(self, x: int, y: int) -> bool:
        """True iff the edge {x, y} is oriented from x to y."""
        fwd = self.code(x, y) & 1
        return bool(fwd) if x < y else not fwd

    def arcs(self, label: int | None = None) -> list[tuple[int, int]]:
        """Oriented pairs (tail, head), optionally only those with `label`."""
        out = []
        for (x, y), c in zip(edge_pairs(self.k), self.codes):
            if label is not None and (c >> 1) + 1 != label:
                continue
            out.append((x, y) if c & 1 else (y, x))
        return out


def point(n: int) -> GraphObject:
    """The unique object on a one-element ground set."""
    return GraphObject(n, 1, ())


def empty(n: int) -> GraphObject:
    """The unique object on the empty ground set."""
    return GraphObject(n, 0, ())


def from_arcs(n: int, k: int, arcs: Iterable[tuple[int, int, int]]) -> GraphObject:
    """Build an object from (tail, head, label) triples, one per pair."""
    codes: dict[int, int] = {}
    for x, y, label in arcs:
        if not 1 <= label <= n:
            raise ValueError(f"label {label} out of range 1..{n}")
        a, b = (x, y) if x < y else (y, x)
        pos = pair_position(k, a, b)
        if pos in codes:
            raise ValueError(f"duplicate edge {{{x},{y}}}")
        codes[pos] = (label - 1) * 2 + (1 if x < y else 0)
    if len(codes) != k * (k - 1) // 2:
        raise ValueError("every pair needs exactly one arc")
    return GraphObject(n, k, tuple(codes[i] for i in range(len(codes))))


def from_key(n: int, k: int, key: int) -> GraphObject:
    bits = code_bits(n)
    mask = (1 << bits) - 1
    e = k * (k - 1) // 2
    codes = [0] * e
    for i in range(e - 1, -1, -1):
        codes[i] = key & mask
        key >>= bits
    if key:
        raise ValueError("key has more bits than the edge count allows")
    return GraphObject(n, k, codes)


# ---------------------------------------------------------------------------
# Morphisms


def edge_step_ok(a: int, b: int) -> bool:
    """Single-edge morphism condition between codes a and b."""
    la, lb = a >> 1, b >> 1
    if (a ^ b) & 1:
        return la < lb
    return la <= lb


def is_morphism(mu: GraphObject, nu: GraphObject) -> bool:
    """True iff there is a morphism mu -> nu.

    Per edge: same orientation and label(mu) <= label(nu), or opposite
    orientation and label(mu) < label(nu).
    """
    if mu.n != nu.n or mu.k != nu.k:
        raise DimensionError(
            f"objects have shapes (n={mu.n}, k={mu.k}) and (n={nu.n}, k={nu.k})"
        )
    for a, b in zip(mu.codes, nu.codes):
        la, lb = a >> 1, b >> 1
        if (a ^ b) & 1:
            if la >= lb:
                return False
        elif la > lb:
            return False
    return True


# ---------------------------------------------------------------------------
# Families


_TAGS = ("g", "ke", "k", "m", "mup", "mdown")


@dataclass(frozen=True)
class Family:
    """A family tag plus an optional label floor lo (labels in {lo..n}).

    Family("m", 1) is the plain decomposable family; Family("m", lo) is its
    restriction to labels >= lo, and similarly for the other tags.
    """

    tag: str
    lo: int = 1

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise ValueError(f"unknown family tag {self.tag!r}")
        if self.lo < 1:
            raise ValueError("label floor must be >= 1")

    def __str__(self):
        return self.tag if self.lo == 1 else f"{self.tag}[{self.lo},n]"


G = Family("g")
KE = Family("ke")
K = Family("k")
M = Family("m")
MUP = Family("mup")
MDOWN = Family("mdown")


def m_interval(lo: int) -> Family:
    return Family("m", lo)


def _digraph_has_cycle(arcs: Sequence[tuple[int, int]], k: int) -> bool:
    adj: list[list[int]] = [[] for _ in range(k)]
    for a, b in arcs:
        adj[a].append(b)
    state = [0] * k  # 0 unvisited, 1 on stack, 2 done
    for root in range(k):
        if state[root]:
            continue
        stack = [(root, 0)]
        state[root] = 1
        while stack:
            u, i = stack[-1]
            if i < len(adj[u]):
                stack[-1] = (u, i + 1)
                v = adj[u][i]
                if state[v] == 1:
                    return True
                if state[v] == 0:
                    state[v] = 1
                    stack.append((v, 0))
            else:
                state[u] = 2
                stack.pop()
    return False


def find_monochromatic_cycle(mu: GraphObject) -> list[int] | None:
    """A directed cycle using arcs of one label, as a vertex list, or None."""
    for label in range(1, mu.n + 1):
        arcs = mu.arcs(label)
        adj: list[list[int]] = [[] for _ in range(mu.k)]
        for a, b in arcs:
            adj[a].append(b)
        state = [0] * mu.k
        parent: dict[int, int] = {}

        def walk(root: int) -> list[int] | None:
            stack = [(root, 0)]
            state[root] = 1
            while stack:
                u, i = stack[-1]
                if i < len(adj[u]):
                    stack[-1] = (u, i + 1)
                    v = adj[u][i]
                    if state[v] == 1:
                        cyc = [v, u]
                        w = u
                        while w != v:
                            w = parent[w]
                            cyc.append(w)
                        cyc.pop()
                        cyc.reverse()
                        return cyc
                    if state[v] == 0:
                        state[v] = 1
                        parent[v] = u
                        stack.append((v, 0))
                else:
                    state[u] = 2
                    stack.pop()
            return None

        for root in range(mu.k):
            if state[root] == 0:
                cyc = walk(root)
                if cyc is not None:
                    return cyc
    return None


def linear_order(mu: GraphObject) -> tuple[int, ...]:
    """The linear order defined by an acyclic orientation tournament.

    x comes before y exactly when the edge {x, y} points from x to y.
    """
    k = mu.k
    if k <= 1:
        return tuple(range(k))
    wins = [0] * k
    for (x, y), c in zip(edge_pairs(k), mu.codes):
        if c & 1:
            wins[x] += 1
        else:
            wins[y] += 1
    order = sorted(range(k), key=lambda v: (-wins[v], v))
    for i in range(k):
        for j in range(i + 1, k):
            if not mu.arrow(order[i], order[j]):
                raise OrientedCycleError(
                    "orientation tournament contains a cycle; no linear order"
                )
    return tuple(order)


def _has_directed_3cycle(mu: GraphObject) -> bool:
    k = mu.k
    for x in range(k):
        for y in range(x + 1, k):
            for z in range(y + 1, k):
                # cyclic iff the three arrows run consistently around x,y,z
                if mu.arrow(x, y) == mu.arrow(y, z) == mu.arrow(z, x):
                    return True
    return False


class _IntervalChecker:
    """Decomposability predicates over the linear order of a K-family object."""

    def __init__(self, mu: GraphObject):
        self.order = linear_order(mu)
        k = mu.k
        self.k = k
        lab = [[0] * k for _ in range(k)]
        for i in range(k):
            for j in range(i + 1, k):
                lab[i][j] = mu.label(self.order[i], self.order[j])
        self.lab = lab
        self._memo: dict[tuple, bool] = {}

    def cross_label(self, a: int, m: int, b: int) -> int:
        """Common label of all edges between [a, m) and [m, b), else 0."""
        lab = self.lab
        first = lab[a][m]
        for i in range(a, m):
            row = lab[i]
            for j in range(m, b):
                if row[j] != first:
                    return 0
        return first

    def labels_within(self, a: int, b: int) -> Iterator[int]:
        lab = self.lab
        for i in range(a, b):
            row = lab[i]
            for j in range(i + 1, b):
                yield row[j]

    def decomposable(self, a: int, b: int) -> bool:
        if b - a <= 1:
            return True
        key = ("m", a, b)
        got = self._memo.get(key)
        if got is None:
            got = any(
                self.cross_label(a, m, b)
                and self.decomposable(a, m)
                and self.decomposable(m, b)
                for m in range(a + 1, b)
            )
            self._memo[key] = got
        return got

    def up(self, a: int, b: int, hi: int) -> bool:
        key = ("up", a, b, hi)
        got = self._memo.get(key)
        if got is None:
            if any(l > hi for l in self.labels_within(a, b)):
                got = False
            elif b - a <= 1:
                got = True
            else:
                got = False
                for m in range(a + 1, b):
                    i = self.cross_label(a, m, b)
                    if i and self.up(a, m, i) and self.up(m, b, i):
                        got = True
                        break
            self._memo[key] = got
        return got

    def down(self, a: int, b: int, lo: int) -> bool:
        key = ("down", a, b, lo)
        got = self._memo.get(key)
        if got is None:
            if any(l < lo for l in self.labels_within(a, b)):
                got = False
            elif b - a <= 1:
                got = True
            else:
                got = False
                for m in range(a + 1, b):
                    i = self.cross_label(a, m, b)
                    if i and self.down(a, m, i) and self.down(m, b, i):
                        got = True
                        break
            self._memo[key] = got
        return got


def in_family(mu: GraphObject, fam: Family) -> bool:
    """Membership of mu in the given family (total on valid objects)."""
    if mu.k <= 1:
        return True
    if fam.lo > 1:
        floor_code = (fam.lo - 1) * 2
        if any(c < floor_code for c in mu.codes):
            return False
    tag = fam.tag
    if tag == "g":
        return True
    if tag == "ke":
        for label in range(1, mu.n + 1):
            if _digraph_has_cycle(mu.arcs(label), mu.k):
                return False
        return True
    if tag == "k":
        return not _has_directed_3cycle(mu)
    # decomposable families live inside the acyclic one
    if _has_directed_3cycle(mu):
        return False
    chk = _IntervalChecker(mu)
    if tag == "m":
        return chk.decomposable(0, mu.k)
    if tag == "mup":
        return chk.up(0, mu.k, mu.n)
    return chk.down(0, mu.k, fam.lo)


# ---------------------------------------------------------------------------
# Structure maps


def box(i: int, mu1: GraphObject, mu2: GraphObject) -> GraphObject:
    """The product placing mu1 before mu2 with all cross edges labeled i.

    The ground set of mu2 is shifted past mu1's.
    """
    if mu1.n != mu2.n:
        raise DimensionError(f"label bounds differ: {mu1.n} vs {mu2.n}")
    n = mu1.n
    if not 1 <= i <= n:
        raise ValueError(f"label {i} out of range 1..{n}")
    k1, k2 = mu1.k, mu2.k
    k = k1 + k2
    cross = (i - 1) * 2 + 1
    codes = []
    for x, y in edge_pairs(k):
        if y < k1:
            codes.append(mu1.code(x, y))
        elif x >= k1:
            codes.append(mu2.code(x - k1, y - k1))
        else:
            codes.append(cross)
    return GraphObject(n, k, codes)


def box_chain(i: int, parts: Sequence[GraphObject]) -> GraphObject:
    """Iterated box product of one or more parts (associative per label)."""
    if not parts:
        raise ValueError("need at least one part")
    out = parts[0]
    for part in parts[1:]:
        out = box(i, out, part)
    return out


def gamma(mu: GraphObject, nus: Sequence[GraphObject]) -> GraphObject:
    """Operad structure map: substitute nus into the slots of mu.

    Internal pairs inherit the relevant nu; cross pairs inherit mu's edge
    between the slots, oriented slotwise.
    """
    if len(nus) != mu.k:
        raise DimensionError(f"mu has {mu.k} slots but {len(nus)} arguments given")
    n = mu.n
    for nu in nus:
        if nu.n != n:
            raise DimensionError("all arguments must share the label bound")
    k = sum(nu.k for nu in nus)
    block_of = []
    offset = []
    at = 0
    for b, nu in enumerate(nus):
        offset.append(at)
        block_of.extend([b] * nu.k)
        at += nu.k
    codes = []
    for x, y in edge_pairs(k):
        bx, by = block_of[x], block_of[y]
        if bx == by:
            codes.append(nus[bx].code(x - offset[bx], y - offset[bx]))
        else:
            lab = mu.label(bx, by)
            fwd = mu.arrow(bx, by)  # bx < by since x < y
            codes.append((lab - 1) * 2 + (1 if fwd else 0))
    return GraphObject(n, k, codes)


def restrict(mu: GraphObject, inj: Sequence[int]) -> GraphObject:
    """Pull back edge data along an injection into mu's ground set."""
    if len(set(inj)) != len(inj):
        raise ValueError("map is not injective")
    for e in inj:
        if not 0 <= e < mu.k:
            raise ValueError(f"element {e} outside ground set 0..{mu.k - 1}")
    k = len(inj)
    codes = []
    for x, y in edge_pairs(k):
        a, b = inj[x], inj[y]
        lab = mu.label(a, b)
        codes.append((lab - 1) * 2 + (1 if mu.arrow(a, b) else 0))
    return GraphObject(mu.n, k, codes)


def sigma_action(mu: GraphObject, sigma: Sequence[int]) -> GraphObject:
    """Right action of a permutation: (mu sigma){x,y} = mu{sigma x, sigma y}."""
    if sorted(sigma) != list(range(mu.k)):
        raise ValueError("sigma is not a permutation of the ground set")
    return restrict(mu, sigma)


def dual(mu: GraphObject) -> GraphObject:
    """Reverse the label order, keep orientations."""
    n = mu.n
    return GraphObject(
        n, mu.k, ((n - 1 - (c >> 1)) * 2 | (c & 1) for c in mu.codes)
    )


def shift_labels(mu: GraphObject, delta: int, new_n: int) -> GraphObject:
    """Add delta to every label, re-homing the object at label bound new_n.

    This is an order isomorphism onto its image and is how families with a
    label floor are reduced to plain ones.
    """
    codes = []
    for c in mu.codes:
        lab = (c >> 1) + 1 + delta
        if not 1 <= lab <= new_n:
            raise ValueError(f"shifted label {lab} out of range 1..{new_n}")
        codes.append((lab - 1) * 2 | (c & 1))
    return GraphObject(new_n, mu.k, codes)


def top_decomposition(mu: GraphObject, i: int = 1) -> tuple[tuple[int, ...], ...]:
    """Maximal split of mu into box-i factors, as ordered element blocks.

    Cuts at every position of the linear order where all crossing edges
    carry exactly label i.  Requires mu to be down-decomposable with labels
    >= i; the returned blocks then have all internal labels > i.
    """
    if not in_family(mu, Family("mdown", i)):
        raise FamilyError(
            f"object is not down-decomposable with labels >= {i}"
        )
    order = linear_order(mu)
    k = mu.k
    cuts = [0]
    for m in range(1, k):
        mono = True
        for a in range(m):
            for b in range(m, k):
                if mu.label(order[a], order[b]) != i:
                    mono = False
                    break
            if not mono:
                break
        if mono:
            cuts.append(m)
    cuts.append(k)
    blocks = tuple(tuple(order[a:b]) for a, b in zip(cuts, cuts[1:]))
    for blk in blocks:
        for p in range(len(blk)):
            for q in range(p + 1, len(blk)):
                if mu.label(blk[p], blk[q]) <= i:
                    raise FamilyError(
                        "maximal split left a label <= cut label inside a block"
                    )
    return blocks


# ---------------------------------------------------------------------------
# Enumeration


def guard_bits(n: int, k: int, max_bits: int) -> None:
    need = (k * (k - 1) // 2) * code_bits(n)
    if need > max_bits:
        raise BitBudgetError(
            f"enumeration needs {need} key bits, budget is {max_bits}"
        )


def enumerate_family(
    fam: Family, n: int, k: int, max_bits: int = DEFAULT_MAX_BITS
) -> Iterator[GraphObject]:
    """Yield every member once, in ascending canonical key order.

    Tags with an acyclicity constraint are enumerated by edge-by-edge
    depth-first extension with incremental cycle pruning; the decomposable
    tags filter the acyclic stream.
    """
    guard_bits(n, k, max_bits)
    if k <= 1:
        yield GraphObject(n, k, ())
        return
    lo_code = (fam.lo - 1) * 2
    code_range = range(lo_code, 2 * n)
    if fam.lo > n:
        return
    if fam.tag == "g":
        for codes in product(code_range, repeat=k * (k - 1) // 2):
            yield GraphObject(n, k, codes)
        return

    per_label = fam.tag == "ke"
    post = None
    if fam.tag in ("m", "mup", "mdown"):
        post = fam

    pairs = edge_pairs(k)
    e = len(pairs)
    # reach[label][v] = bitmask of vertices reachable from v via arcs of that
    # label added so far (label 0 is the shared digraph for the plain
    # acyclicity tags)
    nlabels = n + 1 if per_label else 1
    reach = [[1 << v for v in range(k)] for _ in range(nlabels)]
    codes: list[int] = []

    def add_arc(rv: list[int], tail: int, head: int) -> list[int] | None:
        if rv[head] & (1 << tail):
            return None  # would close a cycle
        out = list(rv)
        gained = out[head]
        for v in range(k):
            if out[v] & (1 << tail):
                out[v] |= gained
        return out

    def emit(obj: GraphObject) -> Iterator[GraphObject]:
        if post is None or in_family(obj, post):
            yield obj

    def walk(pos: int) -> Iterator[GraphObject]:
        if pos == e:
            yield from emit(GraphObject(n, k, codes))
            return
        x, y = pairs[pos]
        for c in code_range:
            label = (c >> 1) + 1
            tail, head = (x, y) if c & 1 else (y, x)
            slot = label if per_label else 0
            updated = add_arc(reach[slot], tail, head)
            if updated is None:
                continue
            saved = reach[slot]
            reach[slot] = updated
            codes.append(c)
            yield from walk(pos + 1)
            codes.pop()
            reach[slot] = saved

    yield from walk(0)


def count_family(fam: Family, n: int, k: int, max_bits: int = DEFAULT_MAX_BITS) -> int:
    return sum(1 for _ in enumerate_family(fam, n, k, max_bits))
