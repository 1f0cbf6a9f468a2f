"""Sparse exact operators on V^{(x)k} and the Hecke-symmetry toolkit built on them.

Basis convention: x_{i_1} (x) ... (x) x_{i_k} has index sum_t (i_t - 1) N^(k - t),
so site 1 is the most significant digit.  An operator X acts by
X(x_c) = sum_r X[r, c] x_r.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from functools import reduce

from .arith import ModeMismatchError, SpecializedField, parse_scalar

DEFAULT_MAX_DIM = 4096
DEFAULT_MAX_SITES = 8


class TensorError(ValueError):
    pass


class DimensionGuardError(TensorError):
    pass


class NotSkewInvertibleError(TensorError):
    pass


def max_sites() -> int:
    return int(os.environ.get("RECALC_CAP_SITES", DEFAULT_MAX_SITES))


def check_guard(N: int, k: int) -> None:
    if k > max_sites():
        raise DimensionGuardError(
            f"{k} sites exceeds the site cap {max_sites()} (set RECALC_CAP_SITES to raise it)"
        )
    if N**k > DEFAULT_MAX_DIM:
        raise DimensionGuardError(f"dimension N^k = {N}^{k} = {N**k} exceeds {DEFAULT_MAX_DIM}")


class TensorOp:
    """Sparse N^k x N^k matrix over a coefficient field; rows stored as dicts."""

    __slots__ = ("field", "dim", "sites", "rows")

    def __init__(self, field, dim: int, sites: int, rows=None):
        check_guard(dim, sites)
        self.field = field
        self.dim = dim
        self.sites = sites
        self.rows = rows if rows is not None else {}

    # -- construction -----------------------------------------------------
    @classmethod
    def from_entries(cls, field, dim, sites, entries) -> "TensorOp":
        rows: dict = {}
        for (r, c), v in entries:
            if v:
                row = rows.setdefault(r, {})
                v = row.get(c, 0) + v
                if v:
                    row[c] = v
                else:
                    del row[c]
        return cls(field, dim, sites, {r: row for r, row in rows.items() if row})

    @classmethod
    def identity(cls, field, dim: int, sites: int = 1) -> "TensorOp":
        n = dim**sites
        return cls(field, dim, sites, {i: {i: field.one} for i in range(n)})

    @classmethod
    def zero(cls, field, dim: int, sites: int = 1) -> "TensorOp":
        return cls(field, dim, sites, {})

    @classmethod
    def from_dense(cls, field, dim, sites, matrix) -> "TensorOp":
        return cls.from_entries(
            field,
            dim,
            sites,
            (((r, c), field(v)) for r, row in enumerate(matrix) for c, v in enumerate(row)),
        )

    @property
    def size(self) -> int:
        return self.dim**self.sites

    def entries(self):
        for r, row in self.rows.items():
            for c, v in row.items():
                yield (r, c), v

    def get(self, r: int, c: int):
        return self.rows.get(r, {}).get(c, self.field.zero)

    def nnz(self) -> int:
        return sum(len(row) for row in self.rows.values())

    def to_dense(self):
        n = self.size
        out = [[self.field.zero] * n for _ in range(n)]
        for (r, c), v in self.entries():
            out[r][c] = v
        return out

    # -- compatibility --------------------------------------------------------
    def _compatible(self, other: "TensorOp") -> None:
        if self.field != other.field:
            raise ModeMismatchError(f"operators over {self.field!r} and {other.field!r}")
        if self.dim != other.dim or self.sites != other.sites:
            raise TensorError(
                f"shape mismatch: (N={self.dim}, k={self.sites}) vs (N={other.dim}, k={other.sites})"
            )

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other: "TensorOp") -> "TensorOp":
        if not isinstance(other, TensorOp):
            return NotImplemented
        self._compatible(other)
        rows = {r: dict(row) for r, row in self.rows.items()}
        for r, orow in other.rows.items():
            row = rows.setdefault(r, {})
            for c, v in orow.items():
                s = row.get(c, 0) + v
                if s:
                    row[c] = s
                else:
                    row.pop(c, None)
        return TensorOp(self.field, self.dim, self.sites, {r: w for r, w in rows.items() if w})

    def __neg__(self) -> "TensorOp":
        return TensorOp(
            self.field, self.dim, self.sites,
            {r: {c: -v for c, v in row.items()} for r, row in self.rows.items()},
        )

    def __sub__(self, other: "TensorOp") -> "TensorOp":
        if not isinstance(other, TensorOp):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "TensorOp":
        if not c:
            return TensorOp(self.field, self.dim, self.sites, {})
        return TensorOp(
            self.field, self.dim, self.sites,
            {r: {k: v * c for k, v in row.items()} for r, row in self.rows.items()},
        )

    def __mul__(self, c):
        if isinstance(c, TensorOp):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, TensorOp):
            return NotImplemented
        self._compatible(other)
        orows = other.rows
        out = {}
        for r, row in self.rows.items():
            acc: dict = {}
            for s, a in row.items():
                orow = orows.get(s)
                if not orow:
                    continue
                for c, b in orow.items():
                    acc[c] = acc.get(c, 0) + a * b
            acc = {c: v for c, v in acc.items() if v}
            if acc:
                out[r] = acc
        return TensorOp(self.field, self.dim, self.sites, out)

    def __pow__(self, e: int) -> "TensorOp":
        if e < 0:
            return self.inverse() ** (-e)
        result = TensorOp.identity(self.field, self.dim, self.sites)
        for _ in range(e):
            result = result @ self
        return result

    def is_zero(self) -> bool:
        return not any(self.rows.values())

    def __eq__(self, other):
        if not isinstance(other, TensorOp):
            return NotImplemented
        if self.field != other.field or self.dim != other.dim or self.sites != other.sites:
            return False
        return (self - other).is_zero()

    __hash__ = None

    def transpose(self) -> "TensorOp":
        return TensorOp.from_entries(
            self.field, self.dim, self.sites, (((c, r), v) for (r, c), v in self.entries())
        )

    def trace(self):
        return sum((row.get(r, 0) for r, row in self.rows.items()), self.field.zero)

    def map(self, fn, field) -> "TensorOp":
        return TensorOp.from_entries(field, self.dim, self.sites, ((rc, fn(v)) for rc, v in self.entries()))

    def specialize(self, q0) -> "TensorOp":
        """Evaluate an exact operator at q = q0."""
        if not self.field.exact:
            raise ModeMismatchError("operator is already specialized")
        target = SpecializedField(q0)
        return self.map(lambda v: v.specialize(target.q0), target)

    def inverse(self) -> "TensorOp":
        """Gauss-Jordan inverse; raises TensorError when singular."""
        n = self.size
        F = self.field
        rows = [dict(self.rows.get(i, {})) for i in range(n)]
        inv = [{i: F.one} for i in range(n)]
        for col in range(n):
            piv = None
            best = None
            for r in range(col, n):
                v = rows[r].get(col)
                if v:
                    w = F.weight(v)
                    if best is None or w < best:
                        piv, best = r, w
            if piv is None:
                raise TensorError("operator is singular")
            rows[col], rows[piv] = rows[piv], rows[col]
            inv[col], inv[piv] = inv[piv], inv[col]
            p = 1 / rows[col][col]
            rows[col] = {c: v * p for c, v in rows[col].items()}
            inv[col] = {c: v * p for c, v in inv[col].items()}
            for r in range(n):
                if r == col:
                    continue
                f = rows[r].get(col)
                if not f:
                    continue
                _axpy(rows[r], rows[col], -f)
                _axpy(inv[r], inv[col], -f)
        return TensorOp(F, self.dim, self.sites, {r: row for r, row in enumerate(inv) if row})

    def kron(self, other: "TensorOp") -> "TensorOp":
        if self.field != other.field:
            raise ModeMismatchError("kron of operators over different fields")
        if self.dim != other.dim:
            raise TensorError("kron needs equal single-site dimension")
        m = other.size
        return TensorOp.from_entries(
            self.field,
            self.dim,
            self.sites + other.sites,
            (
                ((r1 * m + r2, c1 * m + c2), a * b)
                for (r1, c1), a in self.entries()
                for (r2, c2), b in other.entries()
            ),
        )

    def __repr__(self):
        return f"TensorOp(N={self.dim}, k={self.sites}, nnz={self.nnz()}, field={self.field!r})"

    def pretty(self) -> str:
        return "\n".join(" ".join(str(v) for v in row) for row in self.to_dense())


def _axpy(acc: dict, x: dict, c) -> None:
    for k, v in x.items():
        s = acc.get(k, 0) + c * v
        if s:
            acc[k] = s
        else:
            acc.pop(k, None)


# ---------------------------------------------------------------------------
# Index helpers
# ---------------------------------------------------------------------------


def digits(index: int, N: int, k: int) -> tuple:
    out = [0] * k
    for t in range(k - 1, -1, -1):
        index, out[t] = divmod(index, N)
    return tuple(out)


def undigits(ds, N: int) -> int:
    i = 0
    for d in ds:
        i = i * N + d
    return i


# ---------------------------------------------------------------------------
# R-matrix constructors
# ---------------------------------------------------------------------------


def flip(field, N: int) -> TensorOp:
    return TensorOp.from_entries(
        field, N, 2, (((j * N + i, i * N + j), field.one) for i in range(N) for j in range(N))
    )


def super_flip(field, m: int, n: int) -> TensorOp:
    N = m + n
    par = [0] * m + [1] * n
    return TensorOp.from_entries(
        field,
        N,
        2,
        (
            ((j * N + i, i * N + j), -field.one if par[i] and par[j] else field.one)
            for i in range(N)
            for j in range(N)
        ),
    )


def dj_r_matrix(field, N: int) -> TensorOp:
    """R(x_i (x) x_j) = q^{d_ij} x_j (x) x_i + (q - q^-1)[i<j] x_i (x) x_j."""
    if N < 1:
        raise TensorError("N must be positive")
    entries = []
    for i in range(N):
        for j in range(N):
            col = i * N + j
            entries.append(((j * N + i, col), field.q if i == j else field.one))
            if i < j:
                entries.append(((col, col), field.gap))
    return TensorOp.from_entries(field, N, 2, entries)


def dj_super_r_matrix(field, m: int, n: int) -> TensorOp:
    """Standard GL(m|n) Hecke symmetry; reduces to super_flip at q = 1."""
    N = m + n
    if N < 1:
        raise TensorError("m + n must be positive")
    par = [0] * m + [1] * n
    entries = []
    for i in range(N):
        for j in range(N):
            col = i * N + j
            if i == j:
                entries.append(((col, col), -field.qi if par[i] else field.q))
                continue
            sign = -field.one if par[i] and par[j] else field.one
            entries.append(((j * N + i, col), sign))
            if i < j:
                entries.append(((col, col), field.gap))
    return TensorOp.from_entries(field, N, 2, entries)


def load_r_matrix(path, field) -> TensorOp:
    """Read the JSON R-matrix format with 1-based (i, j) pairs."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return r_matrix_from_json(data, field)


def r_matrix_from_json(data: dict, field) -> TensorOp:
    try:
        N = int(data["N"])
        raw = data["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise TensorError(f"malformed R-matrix description: {exc}") from None
    entries = []
    for e in raw:
        (i, j), (k, l) = e["row_pair"], e["col_pair"]
        for idx in (i, j, k, l):
            if not 1 <= idx <= N:
                raise TensorError(f"index {idx} out of range 1..{N}")
        value = e["value"]
        value = parse_scalar(value, field) if isinstance(value, str) else field(value)
        entries.append(((N * (i - 1) + (j - 1), N * (k - 1) + (l - 1)), value))
    return TensorOp.from_entries(field, N, 2, entries)


def r_matrix_to_json(R: TensorOp) -> dict:
    N = R.dim
    return {
        "N": N,
        "entries": [
            {
                "row_pair": [r // N + 1, r % N + 1],
                "col_pair": [c // N + 1, c % N + 1],
                "value": str(v),
            }
            for (r, c), v in sorted(R.entries(), key=lambda e: e[0])
        ],
    }


# ---------------------------------------------------------------------------
# Embeddings and checks
# ---------------------------------------------------------------------------


def embed_at(X: TensorOp, i: int, k: int) -> TensorOp:
    """I^{(i-1)} (x) X (x) I^{(k-i-s+1)} where s = sites of X (i is 1-based)."""
    s = X.sites
    if i < 1 or i + s - 1 > k:
        raise TensorError(f"cannot place a {s}-site operator at position {i} of {k}")
    N = X.dim
    after = N ** (k - i - s + 1)
    block = N**s * after
    before = N ** (i - 1)
    rows: dict = {}
    for (r, c), v in X.entries():
        for a in range(before):
            base = a * block
            for b in range(after):
                rows.setdefault(base + r * after + b, {})[base + c * after + b] = v
    return TensorOp(X.field, N, k, rows)


def r_at(R: TensorOp, i: int, k: int, inverse: bool = False, _cache={}) -> TensorOp:
    """R_i (or R_i^-1) on k sites."""
    key = (id(R), i, k, inverse)
    hit = _cache.get(key)
    if hit is not None and hit[0] is R:
        return hit[1]
    base = inverse_r(R) if inverse else R
    out = embed_at(base, i, k)
    _cache[key] = (R, out)
    return out


def inverse_r(R: TensorOp, _cache={}) -> TensorOp:
    hit = _cache.get(id(R))
    if hit is not None and hit[0] is R:
        return hit[1]
    inv = R.inverse()
    _cache[id(R)] = (R, inv)
    return inv


def r_chain(R: TensorOp, i: int, j: int, k: int, inverse: bool = False) -> TensorOp:
    """R_{i->j}: R_i R_{i+1} ... R_j for j >= i, R_i R_{i-1} ... R_j otherwise."""
    step = 1 if j >= i else -1
    ops = [r_at(R, t, k, inverse) for t in range(i, j + step, step)]
    return reduce(lambda a, b: a @ b, ops)


def check_braid(R: TensorOp) -> TensorOp:
    if R.sites != 2:
        raise TensorError("braid check needs a 2-site operator")
    R1, R2 = r_at(R, 1, 3), r_at(R, 2, 3)
    return R1 @ R2 @ R1 - R2 @ R1 @ R2


def check_hecke(R: TensorOp) -> TensorOp:
    if R.sites != 2:
        raise TensorError("Hecke check needs a 2-site operator")
    F = R.field
    I = TensorOp.identity(F, R.dim, 2)
    return (I.scale(F.q) - R) @ (I.scale(F.qi) + R)


def eigen_multiplicities(R: TensorOp) -> dict:
    """Dimensions of ker(R - q) and ker(R + q^-1)."""
    F = R.field
    I = TensorOp.identity(F, R.dim, 2)
    n = R.size
    return {
        "q": n - rank(R - I.scale(F.q)),
        "-q^-1": n - rank(R + I.scale(F.qi)),
    }


def rank(X: TensorOp) -> int:
    from .linalg import RowEchelon

    ech = RowEchelon(X.field)
    for r in range(X.size):
        row = X.rows.get(r)
        if row:
            ech.add(dict(row))
    return ech.rank


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


def partial_trace(X: TensorOp, sites) -> TensorOp:
    """Ordinary trace over the given 1-based sites; a scalar if all sites go."""
    sites = sorted(set(sites))
    k, N = X.sites, X.dim
    if any(s < 1 or s > k for s in sites):
        raise TensorError(f"trace sites {sites} out of range 1..{k}")
    keep = [t for t in range(k) if t + 1 not in sites]
    gone = [t for t in range(k) if t + 1 in sites]
    if not keep:
        return X.trace()
    out = {}
    for (r, c), v in X.entries():
        dr, dc = digits(r, N, k), digits(c, N, k)
        if any(dr[t] != dc[t] for t in gone):
            continue
        key = (undigits([dr[t] for t in keep], N), undigits([dc[t] for t in keep], N))
        out[key] = out.get(key, 0) + v
    return TensorOp.from_entries(X.field, N, len(keep), out.items())


def r_trace(X: TensorOp, sites, C: TensorOp):
    """Tr_R over ``sites``: multiply by C at each traced site, then trace.

    Returns a TensorOp on the remaining sites, or a scalar when every site
    is traced.
    """
    k = X.sites
    sites = sorted(set(sites))
    if any(s < 1 or s > k for s in sites):
        raise TensorError(f"trace sites {sites} out of range 1..{k}")
    Y = X
    for s in sites:
        Y = embed_at(C, s, k) @ Y
    return partial_trace(Y, sites)


# ---------------------------------------------------------------------------
# Skew-invertibility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SkewData:
    psi: TensorOp
    c: TensorOp
    b: TensorOp


def skew_inverse(R: TensorOp) -> SkewData:
    """Solve Tr_2 R_12 Psi_23 = P_13 for Psi and extract C = Tr_2 Psi, B = Tr_1 Psi.

    Entrywise the equation reads
        sum_{a2, c} R[(a1,a2),(b1,c)] Psi[(c,a3),(a2,b3)] = d(a1,b3) d(a3,b1)
    which, for each fixed (a3, b3), is one N^2 x N^2 system with matrix
    A[(a1,b1),(c,a2)] = R[(a1,a2),(b1,c)].
    """
    if R.sites != 2:
        raise TensorError("skew inverse needs a 2-site operator")
    F, N = R.field, R.dim
    A = TensorOp.from_entries(
        F, N, 2,
        (
            ((a1 * N + b1, c * N + a2), v)
            for (r, col), v in R.entries()
            for a1, a2 in [divmod(r, N)]
            for b1, c in [divmod(col, N)]
        ),
    )
    try:
        Ainv = A.inverse()
    except TensorError:
        raise NotSkewInvertibleError("R is not skew-invertible (singular linear system)") from None
    psi_entries = []
    for a3 in range(N):
        for b3 in range(N):
            # rhs[(a1, b1)] = 1 iff a1 == b3 and b1 == a3
            col = b3 * N + a3
            for x, row in Ainv.rows.items():
                v = row.get(col)
                if v:
                    c, a2 = divmod(x, N)
                    psi_entries.append(((c * N + a3, a2 * N + b3), v))
    psi = TensorOp.from_entries(F, N, 2, psi_entries)
    P13 = flip(F, N)
    lhs2 = partial_trace(embed_at(psi, 1, 3) @ embed_at(R, 2, 3), [2])
    if not (lhs2 - P13).is_zero():
        raise NotSkewInvertibleError("Tr_2 Psi_12 R_23 != P_13")
    c = partial_trace(psi, [2])
    b = partial_trace(psi, [1])
    return SkewData(psi=psi, c=c, b=b)


def skew_residual(R: TensorOp, psi: TensorOp) -> TensorOp:
    """Tr_2 R_12 Psi_23 - P_13 (as a 2-site operator on sites 1, 3)."""
    lhs = partial_trace(embed_at(R, 1, 3) @ embed_at(psi, 2, 3), [2])
    return lhs - flip(R.field, R.dim)


def trace_identity_residual(R: TensorOp, C: TensorOp) -> TensorOp:
    """Tr_2(C_2 R_12) - I_1."""
    return r_trace(R, [2], C) - TensorOp.identity(R.field, R.dim, 1)


# ---------------------------------------------------------------------------
# Jucys-Murphy images
# ---------------------------------------------------------------------------


def jm_image(r: int, k: int, R: TensorOp, inverse: bool = False) -> TensorOp:
    """J_r = R_{r-1} J_{r-1} R_{r-1} on k sites (J_1 = I)."""
    return jm_image_shifted(r, 0, k, R, inverse)


def jm_image_shifted(s: int, n: int, k: int, R: TensorOp, inverse: bool = False) -> TensorOp:
    """J_s^{up n} = R_{n+s-1 -> n+1} R_{n+1 -> n+s-1} (inverse: reversed chain of R^-1)."""
    if s < 1 or n < 0 or n + s > k:
        raise TensorError(f"JM index s={s}, shift n={n} out of range for {k} sites")
    if s == 1:
        return TensorOp.identity(R.field, R.dim, k)
    down = r_chain(R, n + s - 1, n + 1, k, inverse)
    up = r_chain(R, n + 1, n + s - 1, k, inverse)
    return down @ up
