"""Integer simplicial homology via Smith normal form over Python ints."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .complexes import SimplicialComplex, _iter_bits
from .errors import CapExceededError, IntegrityError

DEFAULT_CELL_CAP = 40000


def smith_diagonal(rows: list[dict[int, int]], ncols: int) -> list[int]:
    """Nonzero diagonal of the Smith normal form of a sparse integer matrix.

    Rows are dicts col->entry.  Returns the invariant factors d1 | d2 | ...
    """
    rows = [{c: v for c, v in r.items() if v} for r in rows]
    cols: dict[int, set[int]] = {}
    for ri, row in enumerate(rows):
        for c in row:
            cols.setdefault(c, set()).add(ri)
    alive = {ri for ri, row in enumerate(rows) if row}
    diag: list[int] = []

    while True:
        pr = pc = None
        best = None
        for ri in alive:
            for c, v in rows[ri].items():
                a = -v if v < 0 else v
                if best is None or a < best:
                    best, pr, pc = a, ri, c
                    if a == 1:
                        break
            if best == 1:
                break
        if pr is None:
            break

        # shrink the pivot until it cleanly clears its row and column;
        # every re-entry strictly reduces |pivot|, so this terminates
        while True:
            pv = rows[pr][pc]
            col_rows = [
                ri for ri in cols.get(pc, ())
                if ri != pr and ri in alive and rows[ri].get(pc)
            ]
            if col_rows:
                for ri in col_rows:
                    q = rows[ri][pc] // pv
                    if q:
                        _row_axpy(rows, cols, ri, pr, -q)
                rem = [
                    ri for ri in cols.get(pc, ())
                    if ri != pr and ri in alive and rows[ri].get(pc)
                ]
                if rem:
                    pr = min(rem, key=lambda ri: (abs(rows[ri][pc]), ri))
                    continue
            row_cols = [c for c in rows[pr] if c != pc]
            if row_cols:
                for c in row_cols:
                    q = rows[pr][c] // pv
                    if q:
                        _col_axpy(rows, cols, c, pc, -q)
                rem = [c for c in rows[pr] if c != pc and rows[pr][c]]
                if rem:
                    pc = min(rem, key=lambda c: (abs(rows[pr][c]), c))
                    continue
            break
        diag.append(abs(rows[pr][pc]))
        alive.discard(pr)
        for c in list(rows[pr]):
            cols.get(c, set()).discard(pr)
        rows[pr] = {}
        for ri in list(cols.get(pc, ())):
            rows[ri].pop(pc, None)
        cols.pop(pc, None)

    # enforce divisibility d1 | d2 | ...
    changed = True
    while changed:
        changed = False
        for i in range(len(diag)):
            for j in range(i + 1, len(diag)):
                if diag[j] % diag[i]:
                    g = gcd(diag[i], diag[j])
                    diag[i], diag[j] = g, diag[i] * diag[j] // g
                    changed = True
    return sorted(diag)


def _row_axpy(rows, cols, target, source, factor):
    trow = rows[target]
    for c, v in rows[source].items():
        new = trow.get(c, 0) + factor * v
        if new:
            trow[c] = new
            cols.setdefault(c, set()).add(target)
        elif c in trow:
            del trow[c]
            cols[c].discard(target)


def _col_axpy(rows, cols, target, source, factor):
    for ri in list(cols.get(source, ())):
        v = rows[ri].get(source, 0)
        if not v:
            continue
        new = rows[ri].get(target, 0) + factor * v
        if new:
            rows[ri][target] = new
            cols.setdefault(target, set()).add(ri)
        elif target in rows[ri]:
            del rows[ri][target]
            cols[target].discard(ri)


@dataclass(frozen=True)
class HomologyReport:
    """Reduced integer homology: per dimension a Betti number and torsion."""

    betti: dict
    torsion: dict
    cells: dict

    def trivial(self) -> bool:
        return all(b == 0 for b in self.betti.values()) and all(
            not t for t in self.torsion.values()
        )

    def rows(self):
        return [
            (d, self.betti[d], tuple(self.torsion[d]))
            for d in sorted(self.betti)
        ]


def reduced_homology(
    complex_: SimplicialComplex,
    max_dim: int | None = None,
    cell_cap: int = DEFAULT_CELL_CAP,
) -> HomologyReport:
    """Reduced homology of a materialized complex up to max_dim.

    Refuses loudly when the complex exceeds cell_cap cells; there is no
    silent truncation.
    """
    simplices = complex_.materialize()
    if not simplices:
        raise ValueError("homology of the empty complex is not provided")
    if len(simplices) > cell_cap:
        raise CapExceededError(
            f"{len(simplices)} cells exceed the homology cap {cell_cap}"
        )
    by_dim: dict[int, list[int]] = {}
    for mask in simplices:
        by_dim.setdefault(mask.bit_count() - 1, []).append(mask)
    top = max(by_dim)
    if max_dim is None:
        max_dim = top
    for d in by_dim:
        by_dim[d].sort(key=lambda m: tuple(_iter_bits(m)))
    position = {
        d: {m: i for i, m in enumerate(by_dim[d])} for d in by_dim
    }

    def boundary_rows(d: int) -> tuple[list[dict[int, int]], int]:
        """Rows of the boundary matrix C_d -> C_{d-1}, rows indexed by C_{d-1}."""
        if d == 0:
            # augmentation: one row of ones
            return [
                {ci: 1 for ci in range(len(by_dim.get(0, ())))}
            ], len(by_dim.get(0, ()))
        rows = [dict() for _ in by_dim.get(d - 1, ())]
        for ci, mask in enumerate(by_dim.get(d, ())):
            verts = list(_iter_bits(mask))
            for pos, v in enumerate(verts):
                face = mask & ~(1 << v)
                ri = position[d - 1][face]
                rows[ri][ci] = -1 if pos % 2 else 1
        return rows, len(by_dim.get(d, ()))

    rank: dict[int, int] = {}
    tors: dict[int, list[int]] = {}
    for d in range(0, min(max_dim, top) + 2):
        rows, ncols = boundary_rows(d)
        if ncols == 0:
            rank[d] = 0
            tors[d] = []
            continue
        diag = smith_diagonal(rows, ncols)
        rank[d] = len(diag)
        tors[d] = [v for v in diag if v > 1]

    betti = {}
    torsion = {}
    cells = {d: len(by_dim.get(d, ())) for d in range(0, min(max_dim, top) + 1)}
    for d in range(0, min(max_dim, top) + 1):
        betti[d] = len(by_dim.get(d, ())) - rank.get(d, 0) - rank.get(d + 1, 0)
        torsion[d] = tors.get(d + 1, [])
        if betti[d] < 0:
            raise IntegrityError("negative Betti number; rank bookkeeping broken")
    report = HomologyReport(betti=betti, torsion=torsion, cells=cells)
    if max_dim >= top:
        # Euler characteristic cross-check (reduced: compare against -1+chi)
        chi_cells = sum(
            (1 if d % 2 == 0 else -1) * c for d, c in cells.items()
        )
        chi_betti = sum((1 if d % 2 == 0 else -1) * b for d, b in betti.items())
        if chi_betti + 1 != chi_cells:
            raise IntegrityError(
                f"Euler characteristic mismatch: betti {chi_betti + 1} vs cells {chi_cells}"
            )
    return report
