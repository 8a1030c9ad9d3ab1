"""Definition-literal oracles, independent of the package implementations.

Everything here works from decoded (label, arrow) tables and quantifies the
way the definitions do (subsets instead of linear-order intervals, generic
cycle search instead of 3-cycle shortcuts).  Used to compute expected values
that the fast implementations are then held to.
"""

from __future__ import annotations

from itertools import combinations


def decode(obj):
    """(n, k, label, arrow) with label/arrow as dicts over ordered pairs."""
    n, k = obj.n, obj.k
    label = {}
    arrow = {}
    pos = 0
    for x in range(k):
        for y in range(x + 1, k):
            c = obj.codes[pos]
            pos += 1
            lab = (c >> 1) + 1
            label[(x, y)] = label[(y, x)] = lab
            arrow[(x, y)] = bool(c & 1)
            arrow[(y, x)] = not (c & 1)
    return n, k, label, arrow


def generic_cycle_search(k, arcs):
    """Plain DFS cycle detection over arbitrary arcs."""
    adj = {v: [] for v in range(k)}
    for a, b in arcs:
        adj[a].append(b)
    color = {v: 0 for v in range(k)}

    def visit(u):
        color[u] = 1
        for v in adj[u]:
            if color[v] == 1 or (color[v] == 0 and visit(v)):
                return True
        color[u] = 2
        return False

    return any(color[v] == 0 and visit(v) for v in range(k))


def oracle_in_ke(obj):
    n, k, label, arrow = decode(obj)
    for lab in range(1, n + 1):
        arcs = [
            (x, y)
            for (x, y) in arrow
            if arrow[(x, y)] and label[(x, y)] == lab
        ]
        if generic_cycle_search(k, arcs):
            return False
    return True


def oracle_in_k(obj):
    _, k, _, arrow = decode(obj)
    arcs = [(x, y) for (x, y) in arrow if arrow[(x, y)]]
    return not generic_cycle_search(k, arcs)


def _splits(elements):
    """All ordered pairs of nonempty disjoint covering subsets."""
    elements = tuple(elements)
    for r in range(1, len(elements)):
        for s1 in combinations(elements, r):
            s2 = tuple(e for e in elements if e not in s1)
            yield s1, s2


def _cross_label(label, arrow, s1, s2):
    """The single label of all s1->s2 cross edges, or None."""
    labs = set()
    for x in s1:
        for y in s2:
            if not arrow[(x, y)]:
                return None
            labs.add(label[(x, y)])
    return labs.pop() if len(labs) == 1 else None


def oracle_in_m(obj):
    n, k, label, arrow = decode(obj)

    def dec(elements):
        if len(elements) <= 1:
            return True
        for s1, s2 in _splits(elements):
            if _cross_label(label, arrow, s1, s2) is not None:
                if dec(s1) and dec(s2):
                    return True
        return False

    return dec(tuple(range(k)))


def oracle_in_mup(obj):
    n, k, label, arrow = decode(obj)

    def up(elements, hi):
        if any(label[(x, y)] > hi for x, y in combinations(elements, 2)):
            return False
        if len(elements) <= 1:
            return True
        for s1, s2 in _splits(elements):
            i = _cross_label(label, arrow, s1, s2)
            if i is not None and i <= hi and up(s1, i) and up(s2, i):
                return True
        return False

    return up(tuple(range(k)), n)


def oracle_in_mdown(obj, lo=1):
    n, k, label, arrow = decode(obj)

    def down(elements, lo):
        if any(label[(x, y)] < lo for x, y in combinations(elements, 2)):
            return False
        if len(elements) <= 1:
            return True
        for s1, s2 in _splits(elements):
            i = _cross_label(label, arrow, s1, s2)
            if i is not None and i >= lo and down(s1, i) and down(s2, i):
                return True
        return False

    return down(tuple(range(k)), lo)


ORACLES = {
    "g": lambda obj: True,
    "ke": oracle_in_ke,
    "k": oracle_in_k,
    "m": oracle_in_m,
    "mup": oracle_in_mup,
    "mdown": oracle_in_mdown,
}


def brute_force_family(tag, n, k):
    """Enumerate a family by filtering every packed code, key-ascending."""
    from itertools import product

    from boxops.graphs import GraphObject

    if k <= 1:
        return [GraphObject(n, k, ())]
    e = k * (k - 1) // 2
    out = []
    for codes in product(range(2 * n), repeat=e):
        obj = GraphObject(n, k, codes)
        if ORACLES[tag](obj):
            out.append(obj)
    return out
