"""Sweep drivers behind the CLI verbs and the acceptance suite.

Each driver returns ReportRecords; FAIL records always carry replayable
evidence.  Worker pools only parallelize over instances, and results are
re-sorted by instance key, so the job count never changes any output.
"""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import graphs
from .complexes import replay_trace
from .contractibility import certify_contractible, object_poset
from .cubes import (
    brute_force_realizes_below,
    factorization_checks,
    infimum_check,
    realization_certificate,
    realizes,
    realizes_below,
    reedy_counterexample,
    sample_config,
    stage_homotopy,
    verify_cycle_certificate,
    witness,
)
from .errors import BitBudgetError, FalsificationError
from .graphs import (
    Family,
    dual,
    edge_step_ok,
    gamma,
    in_family,
    is_morphism,
    restrict,
    sigma_action,
)
from .grothendieck import (
    family_tuple,
    verify_grothendieck_prop,
    verify_two_label_reduction,
)
from .partitions import ArcContext, collapse_driver
from .reports import FAIL, INCONCLUSIVE, PASS, REFUSED, ReportRecord
from . import cache as cache_mod
from .textform import to_raw

TRACE_VERSION = "boxops-trace-v1"


def _timed(check: str, params: dict, fn) -> ReportRecord:
    t0 = time.perf_counter()
    try:
        verdict, evidence = fn()
    except FalsificationError as exc:
        verdict, evidence = FAIL, {"falsified": str(exc), **exc.state}
    wall = time.perf_counter() - t0
    return ReportRecord(check=check, params=params, verdict=verdict,
                        evidence=evidence, wall=wall)


def trace_to_json(ctx: ArcContext, result) -> str:
    steps = []
    for i, (face, simplex) in enumerate(result.trace.steps):
        steps.append(
            {
                "step": i,
                "simplex": sorted("".join(map(str, a)) for a in simplex),
                "least": "".join(
                    map(str, next(a for a in simplex if a not in face))
                )
                if len(simplex) - len(face) == 1
                else None,
                "removed_face": sorted("".join(map(str, a)) for a in face),
            }
        )
    doc = {
        "format": TRACE_VERSION,
        "k": ctx.k,
        "context": sorted(ctx.closure()),
        "partitions": result.partition_count,
        "simplex_count": result.simplex_count,
        "least": result.terminal.word(),
        "steps": steps,
    }
    return json.dumps(doc, sort_keys=True) + "\n"


def _drive_context(payload):
    k, arcs, paranoid = payload
    ctx = ArcContext.from_arcs(k, arcs)
    try:
        result = collapse_driver(ctx, paranoid=paranoid)
        replay_trace(ctx.flag_complex(), result.trace)
        return (tuple(sorted(arcs)), {
            "ok": True,
            "steps": result.steps,
            "partitions": result.partition_count,
            "simplex_count": result.simplex_count,
            "least": result.terminal.word(),
            "trace": trace_to_json(ctx, result),
        })
    except FalsificationError as exc:
        return (tuple(sorted(arcs)), {
            "ok": False,
            "error": str(exc),
            "state": exc.state,
        })


def run_collapse(
    n: int = 2,
    k: int = 3,
    paranoid: bool = False,
    jobs: int = 1,
    trace_dir=None,
    max_bits: int = graphs.DEFAULT_MAX_BITS,
) -> list[ReportRecord]:
    """Drive the partition-complex collapse for every object at (n, k).

    Objects sharing a constraint closure share one drive; each object still
    gets its own record pointing at the shared trace.
    """
    try:
        objs = family_tuple("ke", n, k)
    except BitBudgetError as exc:
        return [ReportRecord("collapse", {"n": n, "k": k}, REFUSED,
                             {"reason": str(exc)})]
    by_context: dict[tuple, list] = {}
    for obj in objs:
        ctx = ArcContext.from_graph_object(obj)
        by_context.setdefault(tuple(sorted(ctx.closure())), []).append(obj)

    payloads = [(k, arcs, paranoid) for arcs in sorted(by_context)]
    results = dict(_pmap(_drive_context, payloads, jobs))

    trace_paths = {}
    if trace_dir is not None:
        trace_dir = Path(trace_dir)
        trace_dir.mkdir(parents=True, exist_ok=True)
        for arcs, res in sorted(results.items()):
            if res.get("ok"):
                name = "-".join(f"{a}{b}" for a, b in arcs) or "free"
                path = trace_dir / f"collapse-k{k}-{name}.json"
                path.write_text(res["trace"])
                trace_paths[arcs] = str(path)

    records = []
    for arcs in sorted(by_context):
        res = results[arcs]
        for obj in by_context[arcs]:
            params = {"n": n, "k": k, "object": to_raw(obj)}
            if res.get("ok"):
                evidence = {
                    "context": [list(p) for p in arcs],
                    "steps": res["steps"],
                    "partitions": res["partitions"],
                    "simplex_count": res["simplex_count"],
                    "least": res["least"],
                }
                if arcs in trace_paths:
                    evidence["trace_path"] = trace_paths[arcs]
                records.append(ReportRecord("collapse", params, PASS, evidence))
            else:
                records.append(
                    ReportRecord("collapse", params, FAIL,
                                 {"error": res["error"], "state": res["state"]})
                )
    return records


def _pmap(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


_SWEEP_STATE: dict = {}


def _init_sweep(n, k, sub_tag, direction):
    sub = [o for o in family_tuple(sub_tag, n, k)]
    _SWEEP_STATE["sub"] = sub
    _SWEEP_STATE["direction"] = direction


def _certify_one(omega_key_nk):
    omega_key, n, k = omega_key_nk
    obj = graphs.from_key(n, k, omega_key)
    sub = _SWEEP_STATE["sub"]
    if _SWEEP_STATE["direction"] == "over":
        members = [a for a in sub if is_morphism(a, obj)]
    else:
        members = [a for a in sub if is_morphism(obj, a)]
    verdict = certify_contractible(object_poset(members, is_morphism))
    return omega_key, verdict.status, verdict.method, verdict.detail


def _poset_sweep(check, direction, n, k, sub_tag, sample, seed, jobs, ambient="ke"):
    objs = list(family_tuple(ambient, n, k))
    if sample is not None and sample < len(objs):
        if seed is None:
            raise ValueError("sampled sweeps require a seed")
        rng = random.Random(seed)
        objs = rng.sample(objs, sample)
        objs.sort(key=lambda o: o.key)
    payloads = [(o.key, n, k) for o in objs]
    _init_sweep(n, k, sub_tag, direction)
    if jobs > 1:
        with ProcessPoolExecutor(
            max_workers=jobs,
            initializer=_init_sweep,
            initargs=(n, k, sub_tag, direction),
        ) as pool:
            results = list(pool.map(_certify_one, payloads, chunksize=64))
    else:
        results = [_certify_one(p) for p in payloads]
    records = []
    for omega_key, status, method, detail in results:
        params = {"n": n, "k": k, "sub": sub_tag, "ambient": ambient,
                  "object_key": omega_key}
        if status == "CONTRACTIBLE-certified":
            records.append(
                ReportRecord(check, params, PASS,
                             {"method": method, **detail})
            )
        elif status == "HOMOLOGY-TRIVIAL-only":
            records.append(ReportRecord(check, params, INCONCLUSIVE, dict(detail)))
        else:
            records.append(ReportRecord(check, params, FAIL,
                                        {"status": status, **detail}))
    return records


def run_initiality(n, k, sub="mdown", sample=None, seed=None, jobs=1, ambient="ke"):
    """Over-posets of the sub-family inside the ambient family."""
    return _poset_sweep("initiality", "over", n, k, sub, sample, seed, jobs, ambient)


def run_finality(n, k, sub="mup", sample=None, seed=None, jobs=1, ambient="ke"):
    """Under-posets of the sub-family inside the ambient family."""
    return _poset_sweep("finality", "under", n, k, sub, sample, seed, jobs, ambient)


def run_grothendieck(n, k, sample=None, seed=None) -> list[ReportRecord]:
    """The assembly isomorphism plus the two-label reduction."""
    records = []
    objs = list(family_tuple("ke", n, k))
    chosen = objs
    if sample is not None and sample < len(objs):
        if seed is None:
            raise ValueError("sampled sweeps require a seed")
        rng = random.Random(seed)
        chosen = sorted(rng.sample(objs, sample), key=lambda o: o.key)
    for obj in chosen:
        params = {"n": n, "k": k, "variant": "iso", "object_key": obj.key}
        records.append(
            _timed("grothendieck", params,
                   lambda om=obj: (PASS, verify_grothendieck_prop(n, om)))
        )
    seen = set()
    for obj in objs:
        key = tuple(sorted(ArcContext.from_graph_object(obj).closure()))
        if key in seen:
            continue
        seen.add(key)
        params = {"n": n, "k": k, "variant": "reduction",
                  "context": [list(p) for p in key]}
        records.append(
            _timed("grothendieck", params,
                   lambda om=obj: (PASS, verify_two_label_reduction(om)))
        )
    return records


def run_duality(n, k, seed=None, pair_samples=20000) -> list[ReportRecord]:
    """Involution, membership exchange, and order reversal for the dual."""
    records = []

    def edge_table():
        for a in range(2 * n):
            for b in range(2 * n):
                da = (n - 1 - (a >> 1)) * 2 | (a & 1)
                db = (n - 1 - (b >> 1)) * 2 | (b & 1)
                if edge_step_ok(a, b) != edge_step_ok(db, da):
                    raise FalsificationError(
                        "edge relation is not reversed", {"a": a, "b": b}
                    )
        return PASS, {"states": (2 * n) ** 2}

    records.append(_timed("duality", {"n": n, "variant": "edge-table"}, edge_table))

    def membership():
        pairs = (("mup", "mdown"), ("mdown", "mup"), ("m", "m"),
                 ("k", "k"), ("ke", "ke"))
        count = 0
        for obj in family_tuple("g", n, k):
            d = dual(obj)
            if dual(d) != obj:
                raise FalsificationError("dual is not involutive", {"key": obj.key})
            for tag, dtag in pairs:
                if in_family(obj, Family(tag)) != in_family(d, Family(dtag)):
                    raise FalsificationError(
                        "membership exchange failed",
                        {"key": obj.key, "tag": tag},
                    )
            count += 1
        return PASS, {"objects": count}

    records.append(
        _timed("duality", {"n": n, "k": k, "variant": "membership"}, membership)
    )

    def reversal():
        objs = family_tuple("g", n, k)
        checked = 0
        if len(objs) ** 2 <= 4_000_000:
            for a in objs:
                for b in objs:
                    if is_morphism(a, b) != is_morphism(dual(b), dual(a)):
                        raise FalsificationError(
                            "order reversal failed", {"a": a.key, "b": b.key}
                        )
                    checked += 1
            return PASS, {"pairs": checked, "mode": "exhaustive"}
        if seed is None:
            raise ValueError("sampled sweeps require a seed")
        rng = random.Random(seed)
        for _ in range(pair_samples):
            a = objs[rng.randrange(len(objs))]
            b = objs[rng.randrange(len(objs))]
            if is_morphism(a, b) != is_morphism(dual(b), dual(a)):
                raise FalsificationError(
                    "order reversal failed", {"a": a.key, "b": b.key}
                )
            checked += 1
        return PASS, {"pairs": checked, "mode": "sampled"}

    records.append(
        _timed("duality", {"n": n, "k": k, "variant": "order-reversal"}, reversal)
    )
    return records


def run_axioms(seed, samples=100) -> list[ReportRecord]:
    """Operad laws for the structure map on seeded instances."""
    rng = random.Random(seed)

    def pick(n, k):
        pool = family_tuple("ke", n, k)
        return pool[rng.randrange(len(pool))]

    def unit_law():
        for _ in range(samples):
            n = rng.choice([2, 3])
            nu = pick(n, rng.randint(1, 4))
            if gamma(graphs.point(n), [nu]) != nu:
                raise FalsificationError("left unit failed", {"key": nu.key})
            mu = pick(n, rng.randint(1, 4))
            if gamma(mu, [graphs.point(n)] * mu.k) != mu:
                raise FalsificationError("right unit failed", {"key": mu.key})
        return PASS, {"samples": samples}

    def associativity():
        for _ in range(samples):
            n = rng.choice([2, 3])
            karity = rng.randint(1, 3)
            mu = pick(n, karity)
            inner_sizes = [rng.randint(1, 2) for _ in range(karity)]
            nus = [pick(n, s) for s in inner_sizes]
            leaf_sizes = [rng.randint(1, 2) for _ in range(sum(inner_sizes))]
            lams = [pick(n, s) for s in leaf_sizes]
            lhs = gamma(gamma(mu, nus), lams)
            chunks = []
            at = 0
            for nu in nus:
                chunks.append(lams[at:at + nu.k])
                at += nu.k
            rhs = gamma(mu, [gamma(nu, chunk) for nu, chunk in zip(nus, chunks)])
            if lhs != rhs:
                raise FalsificationError("associativity failed", {"mu": mu.key})
        return PASS, {"samples": samples}

    def equivariance():
        for _ in range(samples):
            n = rng.choice([2, 3])
            karity = rng.randint(1, 3)
            mu = pick(n, karity)
            sizes = [rng.randint(1, 2) for _ in range(karity)]
            nus = [pick(n, s) for s in sizes]
            sigma = list(range(karity))
            rng.shuffle(sigma)
            lhs = gamma(sigma_action(mu, sigma), [nus[sigma[i]] for i in range(karity)])
            starts = [0] * karity
            at = 0
            for i in range(karity):
                starts[i] = at
                at += nus[i].k
            tau = []
            for i in range(karity):
                blk = sigma[i]
                tau.extend(range(starts[blk], starts[blk] + nus[blk].k))
            rhs = restrict(gamma(mu, nus), tau)
            if lhs != rhs:
                raise FalsificationError(
                    "equivariance failed", {"mu": mu.key, "sigma": sigma}
                )
        return PASS, {"samples": samples}

    def closure():
        fams = ("ke", "k", "m")
        count = 0
        for _ in range(samples):
            n = rng.choice([2, 3])
            karity = rng.randint(1, 3)
            sizes = [rng.randint(1, 2) for _ in range(karity)]
            for tag in fams:
                pool = family_tuple(tag, n, karity)
                mu = pool[rng.randrange(len(pool))]
                nus = []
                for s in sizes:
                    p2 = family_tuple(tag, n, s)
                    nus.append(p2[rng.randrange(len(p2))])
                if not in_family(gamma(mu, nus), Family(tag)):
                    raise FalsificationError(
                        "composition left the family", {"tag": tag, "mu": mu.key}
                    )
                count += 1
        return PASS, {"samples": count}

    return [
        _timed("axioms", {"seed": seed, "law": "unit"}, unit_law),
        _timed("axioms", {"seed": seed, "law": "associativity"}, associativity),
        _timed("axioms", {"seed": seed, "law": "equivariance"}, equivariance),
        _timed("axioms", {"seed": seed, "law": "family-closure"}, closure),
    ]


def run_cubes(
    seed,
    nonempty_scales=((2, 3), (2, 4)),
    nonempty_sampled=((3, 4, 3000),),
    union_scales=((2, 3), (3, 3)),
    union_sampled_scales=((2, 4),),
    configs=1000,
    nu_samples=100,
    h_scales=((2, 3), (3, 3), (2, 4)),
    h_samples=200,
    infimum_samples=500,
) -> list[ReportRecord]:
    """The realization-space sweeps behind the cube acceptance criterion."""
    records = []

    def nonempty(n, k, sample=None):
        def body():
            objs = family_tuple("g", n, k)
            chosen = objs
            if sample is not None and sample < len(objs):
                rng = random.Random(seed + 1)
                chosen = sorted(rng.sample(list(objs), sample), key=lambda o: o.key)
            wit = cyc = 0
            for mu in chosen:
                kind, payload = realization_certificate(mu)
                if kind == "witness":
                    if not in_family(mu, Family("ke")):
                        raise FalsificationError(
                            "witness produced outside the family", {"key": mu.key}
                        )
                    wit += 1
                else:
                    if in_family(mu, Family("ke")):
                        raise FalsificationError(
                            "cycle certificate for a realizable object",
                            {"key": mu.key},
                        )
                    if not verify_cycle_certificate(mu, payload):
                        raise FalsificationError(
                            "cycle certificate does not verify", {"key": mu.key}
                        )
                    cyc += 1
            return PASS, {"witnesses": wit, "cycles": cyc}

        return _timed(
            "cubes",
            {"variant": "nonempty", "n": n, "k": k,
             **({"sample": sample} if sample else {})},
            body,
        )

    for n, k in nonempty_scales:
        records.append(nonempty(n, k))
    for n, k, sample in nonempty_sampled:
        records.append(nonempty(n, k, sample))

    def union_equivalence(n, k, exhaustive_nu):
        def body():
            from .cubes import realizes_below_table, less_table

            rng = random.Random(seed + 10 * n + k)
            objs = list(family_tuple("ke", n, k))
            checked = 0
            for _ in range(configs):
                cfg = sample_config(rng, n, k)
                table = less_table(cfg)
                if exhaustive_nu:
                    nus = objs
                else:
                    nus = [objs[rng.randrange(len(objs))] for _ in range(nu_samples)]
                for nu in nus:
                    got = realizes_below_table(table, nu)
                    want = brute_force_realizes_below(cfg, nu, objs, table=table)
                    if got != want:
                        raise FalsificationError(
                            "closed form disagrees with the union",
                            {"nu": nu.key, "config": cfg.to_text()},
                        )
                    checked += 1
            return PASS, {"configs": configs, "pairs": checked}

        return _timed(
            "cubes",
            {"variant": "union", "n": n, "k": k,
             "nu_mode": "exhaustive" if exhaustive_nu else "sampled"},
            body,
        )

    for n, k in union_scales:
        records.append(union_equivalence(n, k, True))
    for n, k in union_sampled_scales:
        records.append(union_equivalence(n, k, False))

    def homotopy(n, k):
        def body():
            rng = random.Random(seed + 100 * n + k)
            objs = list(family_tuple("ke", n, k))
            done = 0
            while done < h_samples:
                nu = objs[rng.randrange(len(objs))]
                anchor = witness(nu)
                cfg = sample_config(rng, n, k)
                if not realizes_below(cfg, nu, check_separated=False):
                    continue
                if stage_homotopy(n, cfg, 0, anchor) != cfg:
                    raise FalsificationError("identity endpoint failed", {})
                if stage_homotopy(1, cfg, 1, anchor) != anchor:
                    raise FalsificationError("anchor endpoint failed", {})
                for j in range(2, n + 1):
                    if stage_homotopy(j, cfg, 1, anchor) != stage_homotopy(j - 1, cfg, 0, anchor):
                        raise FalsificationError("stage chaining failed", {"j": j})
                j = rng.randint(1, n)
                from fractions import Fraction

                t = Fraction(rng.randint(0, 12), 12)
                moved = stage_homotopy(j, cfg, t, anchor, nu=nu)
                if not realizes_below(moved, nu, check_separated=False):
                    raise FalsificationError(
                        "membership lost along the homotopy",
                        {"nu": nu.key, "j": j, "t": str(t)},
                    )
                done += 1
            return PASS, {"samples": done}

        return _timed("cubes", {"variant": "homotopy", "n": n, "k": k}, body)

    for n, k in h_scales:
        records.append(homotopy(n, k))

    def infimum():
        rng = random.Random(seed + 777)
        done = 0
        while done < infimum_samples:
            n = rng.choice([2, 3])
            k = rng.randint(2, 3)
            cfg = sample_config(rng, n, k)
            objs = family_tuple("ke", n, k)
            holders = [mu for mu in objs if realizes(cfg, mu)]
            if len(holders) < 2:
                continue
            mu1 = holders[rng.randrange(len(holders))]
            mu2 = holders[rng.randrange(len(holders))]
            infimum_check(mu1, mu2, cfg)
            done += 1
        return PASS, {"samples": done}

    records.append(_timed("cubes", {"variant": "infimum"}, infimum))
    records.append(
        _timed(
            "cubes",
            {"variant": "factorization", "seed": seed},
            lambda: (PASS, factorization_checks(seed)),
        )
    )
    return records


def run_reedy() -> list[ReportRecord]:
    return [
        _timed("reedy", {}, lambda: (PASS, reedy_counterexample()))
    ]


def run_enumerate(specs, cache_dir, max_bits=graphs.DEFAULT_MAX_BITS):
    """Write sorted key caches; byte-identical on rerun."""
    records = []
    for tag, lo, n, k in specs:
        fam = Family(tag, lo)
        params = {"tag": tag, "lo": lo, "n": n, "k": k}

        def body(fam=fam, n=n, k=k):
            try:
                keys = [o.key for o in graphs.enumerate_family(fam, n, k, max_bits)]
            except BitBudgetError as exc:
                return REFUSED, {"reason": str(exc)}
            path = cache_mod.write_cache(cache_dir, fam, n, k, keys)
            return PASS, {"count": len(keys), "path": str(path)}

        records.append(_timed("enumerate", params, body))
    return records
