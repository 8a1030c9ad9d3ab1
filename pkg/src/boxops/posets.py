"""Finite posets over opaque sortable keys, with bitset comparability rows.

Provides induced sub-posets, under/over posets, products, opposites, a
deterministic beat-point dismantler and an order-isomorphism search.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

from .errors import IntegrityError


class Poset:
    """Immutable finite poset.  up[i] is the bitmask of {j : e_i <= e_j}."""

    __slots__ = ("elements", "index", "up", "_down")

    def __init__(self, elements: Sequence, up_rows: Sequence[int], validate: bool = True):
        elements = tuple(elements)
        up_rows = tuple(up_rows)
        if len(elements) != len(up_rows):
            raise ValueError("one row per element required")
        if len(set(elements)) != len(elements):
            raise ValueError("element keys must be distinct")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "index", {e: i for i, e in enumerate(elements)})
        object.__setattr__(self, "up", up_rows)
        object.__setattr__(self, "_down", None)
        if validate:
            self._validate()

    def __setattr__(self, name, value):
        raise AttributeError("Poset is immutable")

    def _validate(self):
        m = len(self.elements)
        full = (1 << m) - 1
        for i, row in enumerate(self.up):
            if row & ~full:
                raise ValueError("row has bits outside the element range")
            if not (row >> i) & 1:
                raise ValueError(f"order not reflexive at {self.elements[i]!r}")
        for i in range(m):
            row = self.up[i]
            j_bits = row & ~(1 << i)
            while j_bits:
                b = j_bits & (-j_bits)
                j = b.bit_length() - 1
                j_bits ^= b
                if (self.up[j] >> i) & 1:
                    raise ValueError(
                        f"antisymmetry fails between {self.elements[i]!r} "
                        f"and {self.elements[j]!r}"
                    )
                if self.up[j] & ~row:
                    raise ValueError(
                        f"transitivity fails above {self.elements[i]!r}"
                    )

    @classmethod
    def from_leq(cls, elements: Sequence, leq: Callable, validate: bool = True) -> "Poset":
        elements = tuple(elements)
        rows = []
        for a in elements:
            row = 0
            for j, b in enumerate(elements):
                if leq(a, b):
                    row |= 1 << j
            rows.append(row)
        return cls(elements, rows, validate=validate)

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"Poset({len(self.elements)} elements)"

    # -- basic queries ------------------------------------------------------

    def le_idx(self, i: int, j: int) -> bool:
        return bool((self.up[i] >> j) & 1)

    def le(self, a, b) -> bool:
        return self.le_idx(self.index[a], self.index[b])

    def down_rows(self) -> tuple[int, ...]:
        if self._down is None:
            m = len(self.elements)
            down = [0] * m
            for i, row in enumerate(self.up):
                bits = row
                while bits:
                    b = bits & (-bits)
                    down[b.bit_length() - 1] |= 1 << i
                    bits ^= b
            object.__setattr__(self, "_down", tuple(down))
        return self._down

    def minimum(self):
        """The least element's key, or None."""
        full = (1 << len(self.elements)) - 1
        for i, row in enumerate(self.up):
            if row == full:
                return self.elements[i]
        return None

    def maximum(self):
        full = (1 << len(self.elements)) - 1
        for i, row in enumerate(self.down_rows()):
            if row == full:
                return self.elements[i]
        return None

    def maximal_elements(self) -> list:
        return [
            self.elements[i]
            for i in range(len(self.elements))
            if self.up[i] == (1 << i)
        ]

    def minimal_elements(self) -> list:
        down = self.down_rows()
        return [
            self.elements[i] for i in range(len(self.elements)) if down[i] == (1 << i)
        ]

    # -- derived posets -----------------------------------------------------

    def subposet(self, keys: Iterable) -> "Poset":
        picked = [self.index[e] for e in keys]
        elements = tuple(self.elements[i] for i in picked)
        pos = {old: new for new, old in enumerate(picked)}
        rows = []
        for i in picked:
            row = 0
            bits = self.up[i]
            while bits:
                b = bits & (-bits)
                j = b.bit_length() - 1
                bits ^= b
                if j in pos:
                    row |= 1 << pos[j]
            rows.append(row)
        return Poset(elements, rows, validate=False)

    def under(self, b, within: Iterable | None = None) -> "Poset":
        """Induced poset on {a : b <= a}, optionally intersected with a subset."""
        bi = self.index[b]
        allowed = None if within is None else set(within)
        keys = [
            self.elements[j]
            for j in range(len(self.elements))
            if self.le_idx(bi, j) and (allowed is None or self.elements[j] in allowed)
        ]
        return self.subposet(keys)

    def over(self, b, within: Iterable | None = None) -> "Poset":
        """Induced poset on {a : a <= b}, optionally intersected with a subset."""
        bi = self.index[b]
        allowed = None if within is None else set(within)
        keys = [
            self.elements[j]
            for j in range(len(self.elements))
            if self.le_idx(j, bi) and (allowed is None or self.elements[j] in allowed)
        ]
        return self.subposet(keys)

    def opposite(self) -> "Poset":
        return Poset(self.elements, self.down_rows(), validate=False)

    def comparability_masks(self) -> list[int]:
        down = self.down_rows()
        return [
            (self.up[i] | down[i]) & ~(1 << i) for i in range(len(self.elements))
        ]

    def order_complex(self, dim_cap: int | None = None):
        """The flag complex of the comparability graph (chains = cliques)."""
        from .complexes import DEFAULT_DIM_CAP, SimplicialComplex

        cap = DEFAULT_DIM_CAP if dim_cap is None else dim_cap
        return SimplicialComplex.flag(
            self.elements, self.comparability_masks(), dim_cap=cap
        )

    # -- dismantling --------------------------------------------------------

    def dismantle(self) -> tuple["Poset", list[tuple]]:
        """Iteratively remove beat points, scanning elements in key order.

        A beat point is dominated in the comparability graph by the witness
        recorded with it, so each removal collapses the order complex onto
        the smaller poset's.  Returns the core and the removal steps
        (key, witness_key, "up"|"down").
        """
        m = len(self.elements)
        alive = (1 << m) - 1
        down = self.down_rows()
        steps: list[tuple] = []
        changed = True
        while changed and alive.bit_count() > 1:
            changed = False
            bits = alive
            while bits:
                b = bits & (-bits)
                i = b.bit_length() - 1
                bits ^= b
                strict_up = self.up[i] & alive & ~(1 << i)
                witness = None
                direction = None
                if strict_up:
                    for j in _iter_bits(strict_up):
                        if strict_up & ~self.up[j]:
                            continue
                        witness, direction = j, "up"
                        break
                if witness is None:
                    strict_down = down[i] & alive & ~(1 << i)
                    if strict_down:
                        for j in _iter_bits(strict_down):
                            if strict_down & ~down[j]:
                                continue
                            witness, direction = j, "down"
                            break
                if witness is not None:
                    steps.append(
                        (self.elements[i], self.elements[witness], direction)
                    )
                    alive &= ~(1 << i)
                    changed = True
                    break
        core = self.subposet([self.elements[i] for i in _iter_bits(alive)])
        return core, steps


def _iter_bits(mask: int):
    while mask:
        b = mask & (-mask)
        yield b.bit_length() - 1
        mask ^= b


def replay_dismantle(poset: Poset, steps: Sequence[tuple]) -> None:
    """Re-verify that each recorded removal really was a beat point."""
    m = len(poset.elements)
    alive = (1 << m) - 1
    down = poset.down_rows()
    for key, witness_key, direction in steps:
        i = poset.index[key]
        j = poset.index[witness_key]
        if not (alive >> i) & 1 or not (alive >> j) & 1:
            raise IntegrityError(f"dismantle step touches a removed element: {key!r}")
        if direction == "up":
            strict = poset.up[i] & alive & ~(1 << i)
            if not (strict >> j) & 1 or strict & ~poset.up[j]:
                raise IntegrityError(f"{key!r} is not an up-beat point via {witness_key!r}")
        elif direction == "down":
            strict = down[i] & alive & ~(1 << i)
            if not (strict >> j) & 1 or strict & ~down[j]:
                raise IntegrityError(f"{key!r} is not a down-beat point via {witness_key!r}")
        else:
            raise IntegrityError(f"unknown dismantle direction {direction!r}")
        alive &= ~(1 << i)


def order_complex(poset: Poset, dim_cap: int | None = None):
    """Vertices are the elements; simplices are the nonempty chains."""
    return poset.order_complex(dim_cap=dim_cap)


def under_poset(ambient: Poset, sub: Iterable, b) -> Poset:
    """Induced poset on {a in sub : b <= a}."""
    return ambient.under(b, within=sub)


def over_poset(ambient: Poset, sub: Iterable, b) -> Poset:
    """Induced poset on {a in sub : a <= b}."""
    return ambient.over(b, within=sub)


def poset_product(factors: Sequence[Poset]) -> Poset:
    """Componentwise-ordered product; element keys are key tuples."""
    from itertools import product as iproduct

    if not factors:
        return Poset(((),), (1,), validate=False)
    elements = [tuple(combo) for combo in iproduct(*(p.elements for p in factors))]
    idx_combos = [
        tuple(combo) for combo in iproduct(*(range(len(p)) for p in factors))
    ]
    rows = []
    for xs in idx_combos:
        row = 0
        for jpos, ys in enumerate(idx_combos):
            if all(p.le_idx(x, y) for p, x, y in zip(factors, xs, ys)):
                row |= 1 << jpos
        rows.append(row)
    return Poset(elements, rows, validate=False)


def poset_isomorphic(p: Poset, q: Poset, candidate: dict | None = None) -> dict | None:
    """An order isomorphism p -> q as a key map, or None.

    A given candidate is verified; otherwise a backtracking search refines
    on comparability signatures first.
    """
    mp, mq = len(p), len(q)
    if mp != mq:
        return None
    if candidate is not None:
        if sorted(candidate.keys(), key=_sort_key) != sorted(p.elements, key=_sort_key):
            return None
        image = list(candidate.values())
        if sorted(image, key=_sort_key) != sorted(q.elements, key=_sort_key):
            return None
        for a in p.elements:
            for b in p.elements:
                if p.le(a, b) != q.le(candidate[a], candidate[b]):
                    return None
        return dict(candidate)

    def signatures(poset: Poset):
        down = poset.down_rows()
        sig = [
            (poset.up[i].bit_count(), down[i].bit_count())
            for i in range(len(poset))
        ]
        for _ in range(2):
            nxt = []
            for i in range(len(poset)):
                ups = sorted(sig[j] for j in _iter_bits(poset.up[i]))
                downs = sorted(sig[j] for j in _iter_bits(down[i]))
                nxt.append(hash((sig[i], tuple(ups), tuple(downs))))
            sig = nxt
        return sig

    sp, sq = signatures(p), signatures(q)
    if sorted(sp) != sorted(sq):
        return None
    buckets: dict[int, list[int]] = {}
    for j, s in enumerate(sq):
        buckets.setdefault(s, []).append(j)

    order = sorted(range(mp), key=lambda i: (len(buckets[sp[i]]), i))
    assignment: dict[int, int] = {}
    used = [False] * mq
    qdown = q.down_rows()
    pdown = p.down_rows()

    def backtrack(t: int) -> bool:
        if t == mp:
            return True
        i = order[t]
        for j in buckets[sp[i]]:
            if used[j]:
                continue
            ok = True
            for pi, qj in assignment.items():
                if ((p.up[i] >> pi) & 1) != ((q.up[j] >> qj) & 1):
                    ok = False
                    break
                if ((pdown[i] >> pi) & 1) != ((qdown[j] >> qj) & 1):
                    ok = False
                    break
            if ok:
                assignment[i] = j
                used[j] = True
                if backtrack(t + 1):
                    return True
                del assignment[i]
                used[j] = False
        return False

    if not backtrack(0):
        return None
    return {p.elements[i]: q.elements[j] for i, j in assignment.items()}


def _sort_key(x):
    return (str(type(x)), repr(x))
