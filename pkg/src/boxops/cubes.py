"""Exact-rational little cubes and the order-pattern subspaces.

Everything here is decided by exact Fraction comparisons: realization
membership, constructive witnesses, the closed-form union membership test,
the straight-line contracting homotopies, the operad compatibility checks
and the colimit-fiber counterexample.  No floats anywhere.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import graphs
from .errors import FalsificationError, FamilyError, IntegrityError
from .graphs import (
    GraphObject,
    find_monochromatic_cycle,
    in_family,
    is_morphism,
)
from .textform import from_box_expr


@dataclass(frozen=True)
class AffineEmbedding:
    """An increasing affine self-map of the unit interval, by endpoints."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        a, b = Fraction(self.a), Fraction(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not (0 <= a < b <= 1):
            raise ValueError(f"need 0 <= a < b <= 1, got [{a}, {b}]")

    def __call__(self, t: Fraction) -> Fraction:
        return (1 - t) * self.a + t * self.b

    def compose(self, inner: "AffineEmbedding") -> "AffineEmbedding":
        return AffineEmbedding(self(inner.a), self(inner.b))


@dataclass(frozen=True)
class LittleCube:
    coords: tuple[AffineEmbedding, ...]

    @property
    def n(self) -> int:
        return len(self.coords)

    @classmethod
    def from_intervals(cls, *intervals) -> "LittleCube":
        return cls(
            tuple(AffineEmbedding(Fraction(a), Fraction(b)) for a, b in intervals)
        )


@dataclass(frozen=True)
class CubeConfig:
    """A tuple of little cubes indexed by the ground set 0..k-1."""

    n: int
    cubes: tuple[LittleCube, ...]

    def __post_init__(self):
        for c in self.cubes:
            if c.n != self.n:
                raise ValueError("all cubes must have the ambient dimension")

    @property
    def k(self) -> int:
        return len(self.cubes)

    def separated(self) -> bool:
        """Pairwise disjoint open images, via per-coordinate separation."""
        for x in range(self.k):
            for y in range(x + 1, self.k):
                cx, cy = self.cubes[x], self.cubes[y]
                if not any(
                    less_i(cx, cy, i) or less_i(cy, cx, i)
                    for i in range(1, self.n + 1)
                ):
                    return False
        return True

    def to_text(self) -> str:
        rows = []
        for c in self.cubes:
            rows.append(
                ";".join(f"{e.a.numerator}/{e.a.denominator}:"
                         f"{e.b.numerator}/{e.b.denominator}" for e in c.coords)
            )
        return "|".join(rows)

    @classmethod
    def from_text(cls, n: int, text: str) -> "CubeConfig":
        cubes = []
        for row in text.split("|"):
            coords = []
            for item in row.split(";"):
                lo, hi = item.split(":")
                coords.append(AffineEmbedding(Fraction(lo), Fraction(hi)))
            cubes.append(LittleCube(tuple(coords)))
        return cls(n, tuple(cubes))


def less_i(c: LittleCube, d: LittleCube, i: int) -> bool:
    """Coordinate-i separation: c's upper endpoint at or below d's lower."""
    if not 1 <= i <= c.n:
        raise ValueError(f"coordinate {i} out of range 1..{c.n}")
    return c.coords[i - 1].b <= d.coords[i - 1].a


def realizes(config: CubeConfig, mu: GraphObject) -> bool:
    """Does the configuration realize mu's order pattern exactly."""
    if config.n != mu.n or config.k != mu.k:
        raise ValueError("configuration and object shapes differ")
    for x, y in graphs.edge_pairs(mu.k):
        i = mu.label(x, y)
        if mu.arrow(x, y):
            if not less_i(config.cubes[x], config.cubes[y], i):
                return False
        elif not less_i(config.cubes[y], config.cubes[x], i):
            return False
    return True


def witness(mu: GraphObject) -> CubeConfig:
    """A configuration in G(mu), built from per-label linear extensions.

    Each label's arc relation is extended to a linear order; cube x occupies
    the rank-r subinterval [(r-1)/k, r/k] in that coordinate.  Membership
    and separation are re-verified before returning.
    """
    if not in_family(mu, graphs.KE):
        cycle = find_monochromatic_cycle(mu)
        raise FamilyError(
            f"no realization exists: monochromatic oriented cycle {cycle}"
        )
    k = mu.k
    ranks = []
    for label in range(1, mu.n + 1):
        order = _topo_min_index(k, mu.arcs(label))
        pos = {v: r for r, v in enumerate(order)}
        ranks.append(pos)
    cubes = []
    for x in range(k):
        coords = []
        for label in range(1, mu.n + 1):
            r = ranks[label - 1][x]
            coords.append(AffineEmbedding(Fraction(r, k), Fraction(r + 1, k)))
        cubes.append(LittleCube(tuple(coords)))
    config = CubeConfig(mu.n, tuple(cubes))
    if not realizes(config, mu):
        raise IntegrityError("constructed witness fails its own membership")
    if k > 1 and not config.separated():
        raise IntegrityError("constructed witness is not separated")
    return config


def realization_certificate(mu: GraphObject):
    """("witness", config) when realizable, ("cycle", vertices) otherwise."""
    try:
        return ("witness", witness(mu))
    except FamilyError:
        cycle = find_monochromatic_cycle(mu)
        if cycle is None:
            raise IntegrityError("refused a realizable object")
        return ("cycle", cycle)


def verify_cycle_certificate(mu: GraphObject, cycle: Sequence[int]) -> bool:
    """The cycle really is oriented and monochromatic in mu."""
    if len(cycle) < 2 or len(set(cycle)) != len(cycle):
        return False
    labels = set()
    for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]]):
        if not mu.arrow(a, b):
            return False
        labels.add(mu.label(a, b))
    return len(labels) == 1


def _topo_min_index(k: int, arcs) -> list[int]:
    import heapq

    indeg = [0] * k
    out = [[] for _ in range(k)]
    for a, b in arcs:
        out[a].append(b)
        indeg[b] += 1
    ready = [v for v in range(k) if indeg[v] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for w in out[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(ready, w)
    if len(order) != k:
        raise FamilyError("label relation contains a cycle")
    return order


def infimum_check(mu1: GraphObject, mu2: GraphObject, config: CubeConfig) -> GraphObject:
    """The labelwise minimum of two patterns sharing a configuration.

    Verifies the result stays monochromatic-cycle-free, contains the shared
    configuration, and sits below both inputs.
    """
    if not realizes(config, mu1) or not realizes(config, mu2):
        raise ValueError("configuration must realize both patterns")
    codes = []
    for c1, c2 in zip(mu1.codes, mu2.codes):
        l1, l2 = c1 >> 1, c2 >> 1
        if l1 == l2 and (c1 ^ c2) & 1:
            raise IntegrityError(
                "equal labels with opposite orientations share a configuration"
            )
        codes.append(c1 if l1 <= l2 else c2)
    mu0 = GraphObject(mu1.n, mu1.k, codes)
    if not in_family(mu0, graphs.KE):
        raise FalsificationError(
            "labelwise minimum has a monochromatic cycle",
            {"mu1": mu1.key, "mu2": mu2.key},
        )
    if not realizes(config, mu0):
        raise FalsificationError(
            "configuration left the labelwise minimum", {"mu0": mu0.key}
        )
    if not is_morphism(mu0, mu1) or not is_morphism(mu0, mu2):
        raise FalsificationError(
            "labelwise minimum is not a lower bound", {"mu0": mu0.key}
        )
    return mu0


def realizes_below(config: CubeConfig, nu: GraphObject, check_separated: bool = True) -> bool:
    """Closed-form membership in the union of realizations below nu."""
    if config.n != nu.n or config.k != nu.k:
        raise ValueError("configuration and object shapes differ")
    if check_separated and not config.separated():
        raise ValueError("configuration must have separated interiors")
    for x, y in graphs.edge_pairs(nu.k):
        if nu.arrow(x, y):
            tail, head = x, y
        else:
            tail, head = y, x
        bound = nu.label(x, y)
        ct, ch = config.cubes[tail], config.cubes[head]
        ok = any(less_i(ct, ch, i) for i in range(1, bound + 1)) or any(
            less_i(ch, ct, i) for i in range(1, bound)
        )
        if not ok:
            return False
    return True


def brute_force_realizes_below(config: CubeConfig, nu: GraphObject, family, table=None) -> bool:
    """Union test: some family member below nu realizes the configuration."""
    if table is None:
        for mu in family:
            if is_morphism(mu, nu) and realizes(config, mu):
                return True
        return False
    for mu in family:
        if is_morphism(mu, nu) and realizes_table(table, mu):
            return True
    return False


def less_table(config: CubeConfig) -> list[list[int]]:
    """tab[x][y]: bitmask of coordinates i (bit i-1) with cube x below cube y.

    Memoizes the exact comparisons so sweeps can reuse them; the membership
    formulas themselves stay unchanged.
    """
    k, n = config.k, config.n
    tab = [[0] * k for _ in range(k)]
    for x in range(k):
        for y in range(k):
            if x == y:
                continue
            bits = 0
            for i in range(1, n + 1):
                if less_i(config.cubes[x], config.cubes[y], i):
                    bits |= 1 << (i - 1)
            tab[x][y] = bits
    return tab


def realizes_table(table, mu: GraphObject) -> bool:
    for x, y in graphs.edge_pairs(mu.k):
        i = mu.label(x, y)
        tail, head = (x, y) if mu.arrow(x, y) else (y, x)
        if not (table[tail][head] >> (i - 1)) & 1:
            return False
    return True


def realizes_below_table(table, nu: GraphObject) -> bool:
    for x, y in graphs.edge_pairs(nu.k):
        tail, head = (x, y) if nu.arrow(x, y) else (y, x)
        bound = nu.label(x, y)
        if not (
            table[tail][head] & ((1 << bound) - 1)
            or table[head][tail] & ((1 << (bound - 1)) - 1)
        ):
            return False
    return True


def stage_homotopy(
    j: int,
    config: CubeConfig,
    t: Fraction,
    anchor: CubeConfig,
    nu: GraphObject | None = None,
) -> CubeConfig:
    """Stagewise straight-line homotopy toward an anchoring configuration.

    Coordinates below j come from config, coordinate j interpolates at time
    t, coordinates above j come from the anchor.
    """
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise ValueError(f"time {t} outside [0, 1]")
    if not 1 <= j <= config.n:
        raise ValueError(f"stage {j} outside 1..{config.n}")
    if config.n != anchor.n or config.k != anchor.k:
        raise ValueError("configuration and anchor shapes differ")
    if nu is not None and not realizes(anchor, nu):
        raise ValueError("anchor does not realize the pattern")
    cubes = []
    for x in range(config.k):
        coords = []
        for i in range(1, config.n + 1):
            f = config.cubes[x].coords[i - 1]
            g = anchor.cubes[x].coords[i - 1]
            if i < j:
                coords.append(f)
            elif i == j:
                coords.append(
                    AffineEmbedding((1 - t) * f.a + t * g.a, (1 - t) * f.b + t * g.b)
                )
            else:
                coords.append(g)
        cubes.append(LittleCube(tuple(coords)))
    return CubeConfig(config.n, tuple(cubes))


def blend(c1: CubeConfig, c2: CubeConfig, lam: Fraction) -> CubeConfig:
    """Affine combination of endpoint vectors (convexity probe)."""
    lam = Fraction(lam)
    if not 0 <= lam <= 1:
        raise ValueError("blend parameter outside [0, 1]")
    cubes = []
    for a, b in zip(c1.cubes, c2.cubes):
        coords = [
            AffineEmbedding(
                (1 - lam) * fa.a + lam * fb.a, (1 - lam) * fa.b + lam * fb.b
            )
            for fa, fb in zip(a.coords, b.coords)
        ]
        cubes.append(LittleCube(tuple(coords)))
    return CubeConfig(c1.n, tuple(cubes))


def permute_config(config: CubeConfig, sigma: Sequence[int]) -> CubeConfig:
    """Right action matching the object action: slot x takes cube sigma(x)."""
    if sorted(sigma) != list(range(config.k)):
        raise ValueError("sigma is not a permutation")
    return CubeConfig(config.n, tuple(config.cubes[sigma[x]] for x in range(config.k)))


def compose_configs(outer: CubeConfig, inners: Sequence[CubeConfig]) -> CubeConfig:
    """Operad composition: rescale each inner configuration into its slot."""
    if len(inners) != outer.k:
        raise ValueError("arity mismatch")
    cubes = []
    for slot, inner in enumerate(inners):
        big = outer.cubes[slot]
        for cube in inner.cubes:
            cubes.append(
                LittleCube(
                    tuple(
                        big.coords[i].compose(cube.coords[i])
                        for i in range(outer.n)
                    )
                )
            )
    return CubeConfig(outer.n, tuple(cubes))


def sample_config(
    rng: random.Random, n: int, k: int, max_den: int = 24, tries: int = 4000
) -> CubeConfig:
    """A separated configuration with grid endpoints, by rejection."""
    for _ in range(tries):
        cubes = []
        for _ in range(k):
            coords = []
            for _ in range(n):
                lo = rng.randint(0, max_den - 1)
                hi = rng.randint(lo + 1, max_den)
                coords.append(
                    AffineEmbedding(Fraction(lo, max_den), Fraction(hi, max_den))
                )
            cubes.append(LittleCube(tuple(coords)))
        config = CubeConfig(n, tuple(cubes))
        if config.separated():
            return config
    raise RuntimeError(f"no separated sample found in {tries} tries")


def factorization_checks(seed: int, gamma_samples: int = 100) -> dict:
    """Verify the two operad compatibility squares on exact samples.

    Exhaustive permutation sweep at (n=2, k=3) witnesses, plus seeded
    composed-witness samples; any failure raises FalsificationError.
    """
    from itertools import permutations

    from .grothendieck import family_tuple

    report = {"sigma_checked": 0, "gamma_checked": 0}
    for mu in family_tuple("ke", 2, 3):
        config = witness(mu)
        for sigma in permutations(range(3)):
            acted = graphs.sigma_action(mu, sigma)
            moved = permute_config(config, sigma)
            if not realizes(moved, acted):
                raise FalsificationError(
                    "permuted configuration left the permuted pattern",
                    {"mu": mu.key, "sigma": sigma},
                )
            report["sigma_checked"] += 1

    rng = random.Random(seed)
    count = 0
    while count < gamma_samples:
        n = rng.choice([2, 3])
        karity = rng.randint(1, 3)
        sizes = [rng.randint(1, 2) for _ in range(karity)]
        if karity + sum(sizes) > 5 + karity:
            continue
        outer_objs = family_tuple("ke", n, karity)
        mu = outer_objs[rng.randrange(len(outer_objs))]
        nus = []
        for s in sizes:
            pool = family_tuple("ke", n, s)
            nus.append(pool[rng.randrange(len(pool))])
        composed_obj = graphs.gamma(mu, nus)
        composed_cfg = compose_configs(witness(mu), [witness(nu) for nu in nus])
        if not realizes(composed_cfg, composed_obj):
            raise FalsificationError(
                "composed configuration left the composed pattern",
                {"mu": mu.key, "nus": [nu.key for nu in nus]},
            )
        if composed_cfg.k > 1 and not composed_cfg.separated():
            raise FalsificationError(
                "composed configuration lost separation", {"mu": mu.key}
            )
        count += 1
    report["gamma_checked"] = count
    return report


# ---------------------------------------------------------------------------
# the colimit-fiber counterexample


def reedy_counterexample() -> dict:
    """Exact verification that the punctured-overcategory colimit map is
    not injective for the decomposable three-object diagram.

    Returns the full evidence; raises FalsificationError if any of the four
    steps fails.
    """
    from .grothendieck import family_tuple

    c1 = LittleCube.from_intervals((0, Fraction(1, 2)), (0, Fraction(1, 3)), (Fraction(1, 2), 1))
    c2 = LittleCube.from_intervals((0, 1), (Fraction(1, 3), Fraction(2, 3)), (0, Fraction(1, 2)))
    c3 = LittleCube.from_intervals((Fraction(1, 2), 1), (Fraction(2, 3), 1), (Fraction(1, 2), 1))
    p = CubeConfig(3, (c1, c2, c3))
    mu1 = from_box_expr("1[]2 2[]2 3", 3)
    mu2 = from_box_expr("2[]3(1[]1 3)", 3)
    nu = from_box_expr("2[]3(1[]2 3)", 3)
    m33 = family_tuple("m", 3, 3)
    m33_keys = {o.key for o in m33}
    for obj in (mu1, mu2, nu):
        if obj.key not in m33_keys:
            raise FalsificationError("diagram object is not decomposable", {})
    if not (is_morphism(mu1, nu) and is_morphism(mu2, nu)):
        raise FalsificationError("diagram arrows are missing", {})

    report: dict = {"config": p.to_text()}

    # (1) the shared point
    step1 = realizes(p, mu1) and realizes(p, mu2)
    report["step1_in_both"] = step1
    report["step1_inequalities"] = _membership_evidence(p, mu1) + _membership_evidence(p, mu2)
    if not step1:
        raise FalsificationError("shared configuration is not shared", report)

    # (2) the interval between the two diagram arrows is bare
    interval = [o.key for o in m33 if is_morphism(mu2, o) and is_morphism(o, nu)]
    report["step2_interval"] = sorted(interval)
    if sorted(interval) != sorted([mu2.key, nu.key]):
        raise FalsificationError("extra object between the diagram arrows", report)

    # (3) nothing below mu2 contains p except mu2 itself
    below = [o.key for o in m33 if is_morphism(o, mu2) and realizes(p, o)]
    report["step3_below"] = sorted(below)
    if below != [mu2.key]:
        raise FalsificationError("a smaller pattern realizes the point", report)

    # (4) the point's fiber in the punctured overcategory is disconnected,
    # separating the two diagram objects
    punctured = [o for o in m33 if is_morphism(o, nu) and o.key != nu.key]
    fiber = [
        o
        for o in punctured
        if any(is_morphism(q, o) and realizes(p, q) for q in m33)
    ]
    fiber_keys = [o.key for o in fiber]
    parent = {key: key for key in fiber_keys}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a in fiber:
        for b in fiber:
            if a.key < b.key and (is_morphism(a, b) or is_morphism(b, a)):
                parent[find(a.key)] = find(b.key)
    components: dict = {}
    for key in fiber_keys:
        components.setdefault(find(key), []).append(key)
    report["step4_fiber_size"] = len(fiber_keys)
    report["step4_components"] = sorted(len(v) for v in components.values())
    if mu1.key not in fiber_keys or mu2.key not in fiber_keys:
        raise FalsificationError("diagram objects left the fiber", report)
    if find(mu1.key) == find(mu2.key):
        raise FalsificationError(
            "diagram objects are connected in the fiber; map would be injective",
            report,
        )
    report["not_injective"] = True
    return report


def _membership_evidence(config: CubeConfig, mu: GraphObject) -> list[str]:
    out = []
    for x, y in graphs.edge_pairs(mu.k):
        i = mu.label(x, y)
        tail, head = (x, y) if mu.arrow(x, y) else (y, x)
        upper = config.cubes[tail].coords[i - 1].b
        lower = config.cubes[head].coords[i - 1].a
        out.append(f"cube{tail + 1} <_{i} cube{head + 1}: {upper} <= {lower}")
    return out
