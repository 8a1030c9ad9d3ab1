"""Contractibility certificates for finite posets and the sweep checkers.

The certificate hierarchy is cone, then dismantling, then an explicit
collapse of the order complex; integer homology is only a necessary
condition and never upgrades a verdict past HOMOLOGY-TRIVIAL-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .complexes import greedy_collapse, replay_trace
from .errors import CapExceededError
from .homology import reduced_homology
from .posets import Poset, replay_dismantle

CONTRACTIBLE = "CONTRACTIBLE-certified"
HOMOLOGY_ONLY = "HOMOLOGY-TRIVIAL-only"
EMPTY = "EMPTY"
FAILED = "FAILED"


@dataclass(frozen=True)
class Verdict:
    status: str
    method: str | None = None
    detail: dict = field(default_factory=dict)

    def contractible(self) -> bool:
        return self.status == CONTRACTIBLE


def certify_contractible(
    poset: Poset,
    dim_cap: int = 48,
    homology_fallback: bool = True,
    replay: bool = False,
) -> Verdict:
    """Certify that a poset's order complex is contractible.

    Tries: cone (a minimum or maximum element), dismantling to a point,
    then dismantling to a core whose order complex greedily collapses to a
    point.  If only homology vanishes the verdict stays inconclusive.
    """
    m = len(poset)
    if m == 0:
        return Verdict(EMPTY)
    if m == 1:
        return Verdict(CONTRACTIBLE, "cone", {"size": 1})
    if poset.minimum() is not None or poset.maximum() is not None:
        return Verdict(CONTRACTIBLE, "cone", {"size": m})
    core, steps = poset.dismantle()
    if replay and steps:
        replay_dismantle(poset, steps)
    if len(core) == 1:
        return Verdict(
            CONTRACTIBLE, "dismantle", {"size": m, "removals": len(steps)}
        )
    try:
        complex_ = core.order_complex(dim_cap=dim_cap)
        trace = greedy_collapse(complex_)
    except CapExceededError as exc:
        return Verdict(FAILED, None, {"size": m, "error": str(exc)})
    if trace.collapsed_to_point:
        if replay:
            replay_trace(core.order_complex(dim_cap=dim_cap), trace)
        method = "dismantle+collapse" if steps else "collapse"
        return Verdict(
            CONTRACTIBLE,
            method,
            {
                "size": m,
                "removals": len(steps),
                "core": len(core),
                "collapse_steps": len(trace.steps),
            },
        )
    if not homology_fallback:
        return Verdict(FAILED, None, {"size": m, "stuck": len(trace.terminal_maximal)})
    report = reduced_homology(core.order_complex(dim_cap=dim_cap))
    if report.trivial():
        return Verdict(
            HOMOLOGY_ONLY,
            None,
            {"size": m, "core": len(core), "stuck": len(trace.terminal_maximal)},
        )
    return Verdict(
        FAILED,
        None,
        {"size": m, "homology": report.rows()},
    )


def object_poset(objs: Sequence, leq: Callable) -> Poset:
    """Poset over canonical keys of objects ordered by leq, key-ascending."""
    objs = sorted(objs, key=lambda o: o.key)
    keys = [o.key for o in objs]
    rows = []
    for a in objs:
        row = 0
        for j, b in enumerate(objs):
            if leq(a, b):
                row |= 1 << j
        rows.append(row)
    return Poset(keys, rows, validate=False)


def check_homotopy_initial(
    ambient: Iterable,
    sub: Sequence,
    leq: Callable,
    **certify_kwargs,
) -> dict:
    """Per-element verdicts for the over-posets {a in sub : a <= b}.

    `ambient` iterates objects b; `sub` is the candidate initial family.
    All verdicts CONTRACTIBLE-certified means the inclusion is homotopy
    initial at this scale.
    """
    out = {}
    for b in ambient:
        members = [a for a in sub if leq(a, b)]
        out[b.key] = certify_contractible(object_poset(members, leq), **certify_kwargs)
    return out


def check_homotopy_final(
    ambient: Iterable,
    sub: Sequence,
    leq: Callable,
    **certify_kwargs,
) -> dict:
    """Per-element verdicts for the under-posets {a in sub : b <= a}."""
    out = {}
    for b in ambient:
        members = [a for a in sub if leq(b, a)]
        out[b.key] = certify_contractible(object_poset(members, leq), **certify_kwargs)
    return out
