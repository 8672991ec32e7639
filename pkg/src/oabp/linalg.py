"""Exact Gaussian elimination over any Field.

Two views: dense row-lists for coefficient matrices, and an incremental
sparse span builder used when polynomials must be expressed as linear
combinations of earlier ones.
"""

from __future__ import annotations

from typing import Any, Callable

from .fields import Field


def matrix_rank(field: Field, rows: list[list]) -> int:
    """Rank of a dense matrix; rows are consumed as a working copy."""
    if not rows:
        return 0
    work = [list(r) for r in rows]
    ncols = len(work[0])
    zero = field.zero()
    rank = 0
    row = 0
    for col in range(ncols):
        pivot = None
        for r in range(row, len(work)):
            if work[r][col] != zero:
                pivot = r
                break
        if pivot is None:
            continue
        work[row], work[pivot] = work[pivot], work[row]
        inv = field.inv(work[row][col])
        work[row] = [field.mul(c, inv) for c in work[row]]
        for r in range(len(work)):
            if r != row and work[r][col] != zero:
                factor = work[r][col]
                work[r] = [
                    field.sub(c, field.mul(factor, pc))
                    for c, pc in zip(work[r], work[row])
                ]
        row += 1
        rank += 1
        if row == len(work):
            break
    return rank


class SpanBuilder:
    """Incremental basis of sparse vectors (dicts key -> field element).

    insert() returns None when the vector was independent (and is kept), or
    a dict expressing it as a combination of the previously kept vectors,
    keyed by their insertion tags.
    """

    def __init__(self, field: Field, key_order: Callable[[Any], Any]):
        self.field = field
        self.key_order = key_order
        # acts as echelon basis: list of (pivot_key, vector, combo_over_kept)
        self.rows: list[tuple[Any, dict, dict]] = []
        self.kept_tags: list[Any] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, vec: dict) -> tuple[dict, dict]:
        f = self.field
        zero = f.zero()
        residual = {k: v for k, v in vec.items() if v != zero}
        combo: dict = {}
        changed = True
        while changed and residual:
            changed = False
            pivot_key = min(residual, key=self.key_order)
            for pk, row_vec, row_combo in self.rows:
                if pk == pivot_key:
                    c = f.div(residual[pivot_key], row_vec[pivot_key])
                    for k, v in row_vec.items():
                        nv = f.sub(residual.get(k, zero), f.mul(c, v))
                        if nv == zero:
                            residual.pop(k, None)
                        else:
                            residual[k] = nv
                    for tag, v in row_combo.items():
                        nv = f.add(combo.get(tag, zero), f.mul(c, v))
                        if nv == zero:
                            combo.pop(tag, None)
                        else:
                            combo[tag] = nv
                    changed = True
                    break
        return residual, combo

    def insert(self, vec: dict, tag: Any) -> dict | None:
        residual, combo = self._reduce(vec)
        if not residual:
            return combo
        f = self.field
        pivot_key = min(residual, key=self.key_order)
        # combo_new expresses the stored residual over kept tags:
        # residual = vec - sum combo[t] * kept_t
        combo_new = {t: f.neg(c) for t, c in combo.items()}
        combo_new[tag] = f.one()
        self.rows.append((pivot_key, residual, combo_new))
        self.kept_tags.append(tag)
        return None
