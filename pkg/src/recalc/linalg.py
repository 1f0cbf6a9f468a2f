"""Sparse exact Gauss-Jordan elimination over a coefficient field.

Vectors are dicts column -> coefficient.  Columns are any hashable,
mutually comparable keys (integers, words).
"""

from __future__ import annotations


class RowEchelon:
    """Incrementally built, fully reduced row echelon form.

    Each stored row has coefficient 1 on its pivot column and no entries in
    any other pivot column, so reducing a vector is a single pass.
    Pivots prefer coefficients of small ``field.weight`` (monomials in q
    when exact), breaking ties towards the largest column key.
    """

    def __init__(self, field, allow_pivot=None):
        self.field = field
        self.pivots: dict = {}
        self._occ: dict = {}  # column -> set of pivots whose rows use it
        self._allow = allow_pivot

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, v: dict) -> dict:
        out = dict(v)
        pivots = self.pivots
        for col in [c for c in out if c in pivots]:
            coef = out.pop(col, None)
            if not coef:
                continue
            for c, x in pivots[col].items():
                if c == col:
                    continue
                s = out.get(c, 0) - coef * x
                if s:
                    out[c] = s
                else:
                    out.pop(c, None)
        return out

    def _choose(self, row: dict):
        weight = self.field.weight
        allow = self._allow
        best = None
        best_key = None
        for c, v in row.items():
            ok = allow is None or allow(c)
            key = (0 if ok else 1, weight(v))
            if best is None or key < best_key or (key == best_key and c > best):
                best, best_key = c, key
        return best

    def add(self, v: dict) -> bool:
        """Insert a vector; return True if it increased the rank."""
        row = self.reduce(v)
        if not row:
            return False
        col = self._choose(row)
        inv = 1 / row[col]
        row = {c: x * inv for c, x in row.items()}
        row[col] = self.field.one
        # eliminate the new pivot column from earlier rows
        users = self._occ.pop(col, set())
        for p in users:
            prow = self.pivots[p]
            f = prow.pop(col)
            for c, x in row.items():
                if c == col:
                    continue
                s = prow.get(c, 0) - f * x
                if s:
                    if c not in prow:
                        self._occ.setdefault(c, set()).add(p)
                    prow[c] = s
                elif c in prow:
                    del prow[c]
                    self._occ.get(c, set()).discard(p)
        self.pivots[col] = row
        for c in row:
            if c != col:
                self._occ.setdefault(c, set()).add(col)
        return True


def rank_of(field, vectors) -> int:
    ech = RowEchelon(field)
    for v in vectors:
        ech.add(v)
    return ech.rank


class _Tag(tuple):
    """Marker column for tracking linear combinations."""


def span_coefficients(field, vectors, target: dict):
    """Return c with target = sum c_i vectors[i], or None when target is outside the span."""
    ech = RowEchelon(field, allow_pivot=lambda c: not isinstance(c, _Tag))
    for i, v in enumerate(vectors):
        aug = dict(v)
        aug[_Tag(("tag", i))] = field.one
        ech.add(aug)
    res = ech.reduce(target)
    if any(not isinstance(c, _Tag) for c in res):
        return None
    return [-res.get(_Tag(("tag", i)), field.zero) for i in range(len(vectors))]
