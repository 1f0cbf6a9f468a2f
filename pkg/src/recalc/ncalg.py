"""Noncommutative polynomials in m_i^j and d_i^j, and matrices over them.

Generators are small integers: m_i^j -> i*N + j and d_i^j -> N*N + i*N + j
(0-based i, j).  A word is a tuple of generator ids.

``LinComb`` is the shared container: a dict key -> coefficient tied to a
ring.  For ``FreeAlgebra`` the keys are words and products concatenate.
The double algebra in ``recalc.double`` reuses the same container with
reduced (m-word, d-word) keys.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arith import ModeMismatchError
from .tensor import (
    TensorError,
    TensorOp,
    check_guard,
    digits,
    embed_at,
    inverse_r,
    r_at,
    undigits,
)

M = "M"
DEL = "D"


class NcAlgError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Generator:
    kind: str
    i: int  # 1-based
    j: int

    def id(self, N: int) -> int:
        if not (1 <= self.i <= N and 1 <= self.j <= N):
            raise NcAlgError(f"generator index out of range for N={N}: {self}")
        base = 0 if self.kind == M else N * N
        return base + (self.i - 1) * N + (self.j - 1)

    @classmethod
    def from_id(cls, g: int, N: int) -> "Generator":
        kind = M if g < N * N else DEL
        g %= N * N
        return cls(kind, g // N + 1, g % N + 1)

    def __str__(self):
        return f"{'m' if self.kind == M else 'd'}[{self.i},{self.j}]"


def m_id(i: int, j: int, N: int) -> int:
    """0-based indices."""
    return i * N + j


def d_id(i: int, j: int, N: int) -> int:
    return N * N + i * N + j


def is_m(g: int, N: int) -> bool:
    return g < N * N


def format_word(word, N: int) -> str:
    if not word:
        return "1"
    return "*".join(str(Generator.from_id(g, N)) for g in word)


def bidegree(word, N: int) -> tuple:
    nm = sum(1 for g in word if g < N * N)
    return nm, len(word) - nm


# ---------------------------------------------------------------------------
# Linear combinations
# ---------------------------------------------------------------------------


def axpy(acc: dict, terms: dict, c=None) -> None:
    """acc += c * terms, dropping cancelled keys."""
    if c is None:
        for k, v in terms.items():
            s = acc.get(k)
            s = v if s is None else s + v
            if s:
                acc[k] = s
            else:
                acc.pop(k, None)
    else:
        for k, v in terms.items():
            x = v * c
            s = acc.get(k)
            s = x if s is None else s + x
            if s:
                acc[k] = s
            else:
                acc.pop(k, None)


class LinComb:
    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms=None):
        self.ring = ring
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    def _wrap(self, terms):
        return type(self)(self.ring, terms)

    def _coerce(self, other):
        if isinstance(other, LinComb):
            if other.ring is not self.ring:
                if other.ring.field != self.ring.field:
                    raise ModeMismatchError("elements over different coefficient fields")
                raise NcAlgError("elements of different algebras")
            return other
        return self.ring.scalar(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        axpy(out, other.terms)
        return self._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-self.ring.field.one)

    def __sub__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        axpy(out, other.terms, -self.ring.field.one)
        return self._wrap(out)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c):
        c = self.ring.field(c)
        if not c:
            return self._wrap({})
        return self._wrap({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, LinComb):
            return self.scale(other)
        other = self._coerce(other)
        return self._wrap(self.ring.mul_terms(self.terms, other.terms))

    def __rmul__(self, c):
        return self.scale(c)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, LinComb):
            if other == 0:
                return not self.terms
            return NotImplemented
        return self.ring is other.ring and (self - other).is_zero()

    __hash__ = None

    def __len__(self):
        return len(self.terms)

    def __str__(self):
        return self.ring.format_terms(self.terms)

    __repr__ = __str__


class NcPoly(LinComb):
    """Element of the free algebra; words kept verbatim."""

    __slots__ = ()

    def bidegrees(self) -> set:
        N = self.ring.N
        return {bidegree(w, N) for w in self.terms}

    def is_split(self) -> bool:
        N2 = self.ring.N ** 2
        for w in self.terms:
            seen_d = False
            for g in w:
                if g >= N2:
                    seen_d = True
                elif seen_d:
                    return False
        return True

    def m_only(self) -> bool:
        return all(d == 0 for _, d in self.bidegrees())


def format_coeff_terms(terms: dict, key_fmt) -> str:
    if not terms:
        return "0"
    parts = []
    for k, c in sorted(terms.items(), key=lambda kv: (len(str(kv[0])), str(kv[0]))):
        ks = key_fmt(k)
        parts.append(f"({c})" if ks == "1" else f"({c})*{ks}")
    return " + ".join(parts)


class FreeAlgebra:
    """Free associative algebra on the 2N^2 generators m_i^j, d_i^j."""

    def __init__(self, field, N: int):
        self.field = field
        self.N = N

    def scalar(self, c) -> NcPoly:
        return NcPoly(self, {(): self.field(c)})

    def one(self) -> NcPoly:
        return self.scalar(1)

    def zero(self) -> NcPoly:
        return NcPoly(self, {})

    def gen(self, g: int) -> NcPoly:
        return NcPoly(self, {(g,): self.field.one})

    def m(self, i: int, j: int) -> NcPoly:
        """1-based m_i^j."""
        return self.gen(Generator(M, i, j).id(self.N))

    def d(self, i: int, j: int) -> NcPoly:
        return self.gen(Generator(DEL, i, j).id(self.N))

    def word(self, w, c=None) -> NcPoly:
        return NcPoly(self, {tuple(w): self.field.one if c is None else self.field(c)})

    def mul_terms(self, a: dict, b: dict) -> dict:
        out: dict = {}
        for u, x in a.items():
            for v, y in b.items():
                w = u + v
                s = out.get(w)
                s = x * y if s is None else s + x * y
                if s:
                    out[w] = s
                else:
                    out.pop(w, None)
        return out

    def format_terms(self, terms: dict) -> str:
        return format_coeff_terms(terms, lambda w: format_word(w, self.N))


# ---------------------------------------------------------------------------
# Matrices with algebra entries
# ---------------------------------------------------------------------------


class OpMatrix:
    """N^k x N^k matrix whose entries are ring elements (stored as term dicts)."""

    __slots__ = ("ring", "dim", "sites", "rows")

    def __init__(self, ring, dim: int, sites: int, rows=None):
        self.ring = ring
        self.dim = dim
        self.sites = sites
        self.rows = {}
        for r, row in (rows or {}).items():
            row = {c: t for c, t in row.items() if t}
            if row:
                self.rows[r] = row

    @property
    def size(self) -> int:
        return self.dim ** self.sites

    @classmethod
    def from_elements(cls, ring, dim, sites, entries) -> "OpMatrix":
        rows: dict = {}
        for (r, c), e in entries.items():
            if isinstance(e, LinComb):
                t = e.terms
            else:
                t = ring.scalar(e).terms
            if t:
                rows.setdefault(r, {})[c] = dict(t)
        return cls(ring, dim, sites, rows)

    @classmethod
    def from_tensor(cls, ring, T: TensorOp) -> "OpMatrix":
        one = ring.one().terms
        rows = {r: {c: {k: v * x for k, v in one.items()} for c, x in row.items()} for r, row in T.rows.items()}
        return cls(ring, T.dim, T.sites, rows)

    def entry(self, r: int, c: int):
        return self.ring_elem(self.rows.get(r, {}).get(c, {}))

    def ring_elem(self, terms):
        return self.ring.one()._wrap(dict(terms))

    def entries(self):
        for r, row in self.rows.items():
            for c, t in row.items():
                yield r, c, self.ring_elem(t)

    def _compatible(self, other):
        if isinstance(other, OpMatrix):
            if other.ring is not self.ring:
                raise NcAlgError("matrices over different algebras")
        elif other.field != self.ring.field:
            raise ModeMismatchError("matrix and scalar operator over different fields")
        if other.dim != self.dim or other.sites != self.sites:
            raise NcAlgError(
                f"shape mismatch: (N={self.dim}, k={self.sites}) vs (N={other.dim}, k={other.sites})"
            )

    def __add__(self, other):
        if isinstance(other, TensorOp):
            other = OpMatrix.from_tensor(self.ring, other)
        self._compatible(other)
        rows = {r: {c: dict(t) for c, t in row.items()} for r, row in self.rows.items()}
        for r, row in other.rows.items():
            dst = rows.setdefault(r, {})
            for c, t in row.items():
                acc = dst.setdefault(c, {})
                axpy(acc, t)
        return OpMatrix(self.ring, self.dim, self.sites, rows)

    __radd__ = __add__

    def scale(self, c) -> "OpMatrix":
        c = self.ring.field(c)
        rows = {r: {col: {k: v * c for k, v in t.items()} for col, t in row.items()} for r, row in self.rows.items()}
        return OpMatrix(self.ring, self.dim, self.sites, rows if c else {})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if isinstance(other, TensorOp):
            other = OpMatrix.from_tensor(self.ring, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __matmul__(self, other):
        if isinstance(other, TensorOp):
            self._compatible(other)
            rows = {}
            for r, row in self.rows.items():
                out: dict = {}
                for a, t in row.items():
                    for c, x in other.rows.get(a, {}).items():
                        axpy(out.setdefault(c, {}), t, x)
                rows[r] = out
            return OpMatrix(self.ring, self.dim, self.sites, rows)
        self._compatible(other)
        mul = self.ring.mul_terms
        rows = {}
        for r, row in self.rows.items():
            out: dict = {}
            for a, t in row.items():
                orow = other.rows.get(a)
                if not orow:
                    continue
                for c, u in orow.items():
                    axpy(out.setdefault(c, {}), mul(t, u))
            rows[r] = out
        return OpMatrix(self.ring, self.dim, self.sites, rows)

    def __rmatmul__(self, other):
        if not isinstance(other, TensorOp):
            return NotImplemented
        self._compatible(other)
        rows = {}
        for r, trow in other.rows.items():
            out: dict = {}
            for a, x in trow.items():
                for c, t in self.rows.get(a, {}).items():
                    axpy(out.setdefault(c, {}), t, x)
            rows[r] = out
        return OpMatrix(self.ring, self.dim, self.sites, rows)

    def is_zero(self) -> bool:
        return not self.rows

    def map_entries(self, fn, ring=None) -> "OpMatrix":
        """Apply fn(terms) -> terms entrywise, optionally changing the ring."""
        ring = ring or self.ring
        rows = {r: {c: fn(t) for c, t in row.items()} for r, row in self.rows.items()}
        return OpMatrix(ring, self.dim, self.sites, rows)

    def nonzero_entries(self):
        return [(r, c) for r, row in sorted(self.rows.items()) for c in sorted(row)]

    def embed(self, i: int, k: int) -> "OpMatrix":
        """I^(i-1) (x) X (x) I^(k-i-s+1) with s = self.sites."""
        s = self.sites
        if i < 1 or i + s - 1 > k:
            raise TensorError(f"cannot place {s}-site matrix at position {i} of {k}")
        check_guard(self.dim, k)
        N = self.dim
        left = N ** (i - 1)
        right = N ** (k - i - s + 1)
        blk = N ** s
        rows: dict = {}
        for r, row in self.rows.items():
            for a in range(left):
                for b in range(right):
                    rr = (a * blk + r) * right + b
                    rows[rr] = {(a * blk + c) * right + b: dict(t) for c, t in row.items()}
        return OpMatrix(self.ring, N, k, rows)

    def pretty(self) -> str:
        lines = []
        for r, c in self.nonzero_entries():
            rd = ",".join(str(x + 1) for x in digits(r, self.dim, self.sites))
            cd = ",".join(str(x + 1) for x in digits(c, self.dim, self.sites))
            lines.append(f"[{rd}|{cd}] {self.ring.format_terms(self.rows[r][c])}")
        return "\n".join(lines) or "0"

    def __repr__(self):
        nnz = sum(len(r) for r in self.rows.values())
        return f"OpMatrix(N={self.dim}, sites={self.sites}, nnz={nnz})"


def gen_matrix(ring, kind: str) -> OpMatrix:
    """The 1-site generating matrix M = ||m_i^j|| or D = ||d_i^j||."""
    N = ring.N
    base = 0 if kind == M else N * N
    entries = {(i, j): ring.gen(base + i * N + j) for i in range(N) for j in range(N)}
    return OpMatrix.from_elements(ring, N, 1, entries)


def l_hat(ring) -> OpMatrix:
    """L = M D, i.e. l_i^j = sum_k m_i^k d_k^j."""
    return gen_matrix(ring, M) @ gen_matrix(ring, DEL)


def k_hat(ring) -> OpMatrix:
    """K = I - (q - q^-1) L."""
    f = ring.field
    L = l_hat(ring)
    return L.scale(-f.gap) + TensorOp.identity(f, ring.N, 1)


def _conj_chain(R: TensorOp, r: int, k: int, under: bool):
    """Scalar factors (left, right) with X_r = left X_1 right."""
    f = R.field
    left = TensorOp.identity(f, R.dim, k)
    right = TensorOp.identity(f, R.dim, k)
    for s in range(1, r):
        a = r_at(R, s, k, inverse=under)
        b = r_at(R, s, k, inverse=not under)
        left = a @ left
        right = right @ b
    return left, right


def copy_overline(X: OpMatrix, r: int, R: TensorOp, k: int) -> OpMatrix:
    """X_r with X_1 = X (x) I and X_{s+1} = R_s X_s R_s^-1."""
    if X.sites != 1:
        raise NcAlgError("copies are built from 1-site matrices")
    if not 1 <= r <= k:
        raise TensorError(f"copy {r} needs at least {r} sites, have {k}")
    left, right = _conj_chain(R, r, k, under=False)
    X1 = X.embed(1, k)
    if r == 1:
        return X1
    return left @ X1 @ right


def copy_underline(X: OpMatrix, r: int, R: TensorOp, k: int) -> OpMatrix:
    """X_r with X_1 = X (x) I and X_{s+1} = R_s^-1 X_s R_s."""
    if X.sites != 1:
        raise NcAlgError("copies are built from 1-site matrices")
    if not 1 <= r <= k:
        raise TensorError(f"copy {r} needs at least {r} sites, have {k}")
    left, right = _conj_chain(R, r, k, under=True)
    X1 = X.embed(1, k)
    if r == 1:
        return X1
    return left @ X1 @ right


def _product(mats):
    out = mats[0]
    for X in mats[1:]:
        out = out @ X
    return out


def m_chain(ring, R: TensorOp, n: int, sites: int | None = None) -> OpMatrix:
    """M_1 M_2 ... M_n (overline copies) on max(n, sites) sites."""
    k = max(n, sites or n)
    Mx = gen_matrix(ring, M)
    return _product([copy_overline(Mx, r, R, k) for r in range(1, n + 1)])


def d_chain(ring, R: TensorOp, n: int, sites: int | None = None) -> OpMatrix:
    """D_1 D_2 ... D_n (overline copies, ascending)."""
    k = max(n, sites or n)
    Dx = gen_matrix(ring, DEL)
    return _product([copy_overline(Dx, r, R, k) for r in range(1, n + 1)])


def d_chain_desc(ring, R: TensorOp, n: int, sites: int | None = None) -> OpMatrix:
    """D_n ... D_1 (overline copies, descending)."""
    k = max(n, sites or n)
    Dx = gen_matrix(ring, DEL)
    return _product([copy_overline(Dx, r, R, k) for r in range(n, 0, -1)])


def l_chain(ring, R: TensorOp, n: int, sites: int | None = None) -> OpMatrix:
    """L_1 L_2 ... L_n (overline copies)."""
    k = max(n, sites or n)
    L = l_hat(ring)
    return _product([copy_overline(L, r, R, k) for r in range(1, n + 1)])


def k_chain_desc(ring, R: TensorOp, n: int, s: int = 1, sites: int | None = None) -> OpMatrix:
    """K_n K_{n-1} ... K_s (underline copies)."""
    k = max(n, sites or n)
    K = k_hat(ring)
    return _product([copy_underline(K, r, R, k) for r in range(n, s - 1, -1)])


def k_chain_overline(ring, R: TensorOp, n: int, sites: int | None = None) -> OpMatrix:
    """K_1 K_2 ... K_n (overline copies)."""
    k = max(n, sites or n)
    K = k_hat(ring)
    return _product([copy_overline(K, r, R, k) for r in range(1, n + 1)])


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


def r_trace_entries(X: OpMatrix, sites, C: TensorOp):
    """Partial R-trace: multiply C at each traced site (from the left), then contract.

    Returns an OpMatrix on the remaining sites, or a single ring element
    when every site is traced.
    """
    sites = sorted(set(sites))
    k = X.sites
    if any(s < 1 or s > k for s in sites):
        raise TensorError(f"trace sites {sites} out of range 1..{k}")
    N = X.dim
    Y = X
    for s in sites:
        Y = embed_at(C, s, k) @ Y
    keep = [s for s in range(1, k + 1) if s not in sites]
    acc: dict = {}
    for r, row in Y.rows.items():
        rd = digits(r, N, k)
        for c, t in row.items():
            cd = digits(c, N, k)
            if any(rd[s - 1] != cd[s - 1] for s in sites):
                continue
            key = (undigits([rd[s - 1] for s in keep], N), undigits([cd[s - 1] for s in keep], N))
            axpy(acc.setdefault(key, {}), t)
    if not keep:
        return X.ring_elem(acc.get((0, 0), {}))
    rows: dict = {}
    for (r, c), t in acc.items():
        rows.setdefault(r, {})[c] = t
    return OpMatrix(X.ring, N, len(keep), rows)


def full_r_trace(T: TensorOp, X: OpMatrix, C: TensorOp):
    """Tr_{R(1..k)}(T X) for a scalar operator T, without forming T X."""
    k = X.sites
    CT = T
    for s in range(1, k + 1):
        CT = embed_at(C, s, k) @ CT
    acc: dict = {}
    for r, row in CT.rows.items():
        for a, x in row.items():
            t = X.rows.get(a, {}).get(r)
            if t:
                axpy(acc, t, x)
    return X.ring_elem(acc)


# ---------------------------------------------------------------------------
# Defining relations
# ---------------------------------------------------------------------------

RE_M = "RE_M"
RE_D = "RE_D"
PERM = "PERM"


@dataclass
class RelationSet:
    kind: str
    relations: list
    homogeneous: bool

    def __len__(self):
        return len(self.relations)

    def bidegrees(self) -> set:
        out = set()
        for p in self.relations:
            out |= p.bidegrees()
        return out


def relation_matrix(ring, kind: str, R: TensorOp) -> OpMatrix:
    Rinv = inverse_r(R)
    if kind == RE_M:
        X = gen_matrix(ring, M).embed(1, 2)
        return R @ X @ R @ X - X @ R @ X @ R
    if kind == RE_D:
        X = gen_matrix(ring, DEL).embed(1, 2)
        return Rinv @ X @ Rinv @ X - X @ Rinv @ X @ Rinv
    if kind == PERM:
        Mx = gen_matrix(ring, M).embed(1, 2)
        Dx = gen_matrix(ring, DEL).embed(1, 2)
        return (Dx @ R) @ Mx @ R - (R @ Mx @ Rinv) @ Dx - OpMatrix.from_tensor(ring, R)
    raise NcAlgError(f"unknown relation kind {kind!r}")


def relations(kind: str, R: TensorOp, ring=None) -> RelationSet:
    ring = ring or FreeAlgebra(R.field, R.dim)
    X = relation_matrix(ring, kind, R)
    polys = [NcPoly(ring, t) for _, _, t in ((r, c, t) for r, row in sorted(X.rows.items()) for c, t in sorted(row.items()))]
    return RelationSet(kind, polys, homogeneous=kind != PERM)
