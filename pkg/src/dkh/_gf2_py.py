"""Pure-Python GF(2) elimination on rows stored as int bitsets.

Bit ``j`` of a row is column ``j``.  Pivots are chosen lowest column first,
so the reduced rows restricted to the first ``limit`` columns are the unique
reduced row echelon form.  Their bits at or above ``limit`` are only fixed up
to the span of the residual rows.
"""
from __future__ import annotations

__all__ = ["rref", "rank", "BACKEND"]

BACKEND = "python"


def rref(rows, ncols, limit=None):
    """Return ``(pivots, pivot_rows, residual)``.

    ``pivots`` is the increasing list of pivot columns (all ``< limit``),
    ``pivot_rows[i]`` the fully reduced row whose lowest set bit is
    ``pivots[i]``, and ``residual`` the nonzero rows left with no bit below
    ``limit`` (these only carry columns ``>= limit``).
    """
    if limit is None:
        limit = ncols
    mask = (1 << limit) - 1
    piv = {}
    residual = []
    for r in rows:
        x = r
        while x & mask:
            low = (x & -x).bit_length() - 1
            p = piv.get(low)
            if p is None:
                piv[low] = x
                break
            x ^= p
        else:
            if x:
                residual.append(x)
    cols = sorted(piv)
    # back-substitute so every pivot column is clear in all other rows
    for i in range(len(cols) - 1, -1, -1):
        c = cols[i]
        bit = 1 << c
        row = piv[c]
        for j in range(i):
            other = piv[cols[j]]
            if other & bit:
                piv[cols[j]] = other ^ row
    # residual rows may still hold pivot-free leftovers above limit only
    return cols, [piv[c] for c in cols], residual


def rank(rows, ncols):
    piv = {}
    for r in rows:
        x = r
        while x:
            low = (x & -x).bit_length() - 1
            p = piv.get(low)
            if p is None:
                piv[low] = x
                break
            x ^= p
    return len(piv)
