"""The quantum double of M(R) and D(R^-1): split forms, action, equality tests.

Elements are stored in reduced split form: a dict (m_word, d_word) -> coef
where m_word is a basis word of the graded quotient M(R) and d_word one of
D(R^-1).  The multiplication map M(R) (x) D(R^-1) -> double is a linear
isomorphism, so two elements are equal iff their reduced coordinates agree.

Quotient bases are built degree by degree:
    A_d = (A_{d-1} (x) V) / span{u . rel : u basis word of degree d-2}
which only ever row-reduces inside the (dim A_{d-1}) * N^2 candidate space.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field as dc_field
from math import comb

from .linalg import RowEchelon, span_coefficients
from .ncalg import (
    DEL,
    M,
    PERM,
    RE_D,
    RE_M,
    FreeAlgebra,
    LinComb,
    NcPoly,
    OpMatrix,
    axpy,
    format_coeff_terms,
    format_word,
    gen_matrix,
    l_hat,
    relations,
)
from .tensor import TensorOp, digits, skew_inverse

DEFAULT_MAX_DEGREE = 4


class DoubleError(ValueError):
    pass


class CapExceededError(DoubleError):
    pass


class FlatnessWarning(UserWarning):
    pass


# ---------------------------------------------------------------------------
# Graded quotients of a free algebra by quadratic relations
# ---------------------------------------------------------------------------


class QuotientBasis:
    """Degree-by-degree basis of T(V)/(rels) with a word reduction map."""

    def __init__(self, field, tag: str, letters, rels, cap: int = DEFAULT_MAX_DEGREE):
        self.field = field
        self.tag = tag
        self.letters = list(letters)
        self.rels = [dict(r) for r in rels if r]
        self.cap = cap
        self.basis = {0: [()], 1: [(x,) for x in self.letters]}
        self._basis_set = {0: {()}, 1: set(self.basis[1])}
        self._ech: dict = {}
        self._ext: dict = {}
        self._red: dict = {}
        self._lock = threading.RLock()

    def _check_cap(self, d: int):
        if d > self.cap:
            raise CapExceededError(f"{self.tag}-degree {d} exceeds the cap {self.cap}")

    def ensure(self, d: int) -> None:
        if d in self.basis:
            return
        self._check_cap(d)
        with self._lock:
            for e in range(2, d + 1):
                if e not in self.basis:
                    self._build(e)

    def _build(self, d: int) -> None:
        ech = RowEchelon(self.field)
        self._ech[d] = ech
        for u in self.basis[d - 2]:
            for rel in self.rels:
                vec: dict = {}
                for (x, y), c in rel.items():
                    for b, cb in self.reduce_word(u + (x,)).items():
                        w = b + (y,)
                        s = vec.get(w, 0) + c * cb
                        if s:
                            vec[w] = s
                        else:
                            vec.pop(w, None)
                if vec:
                    ech.add(vec)
        cand = [b + (x,) for b in self.basis[d - 1] for x in self.letters]
        self.basis[d] = [w for w in cand if w not in ech.pivots]
        self._basis_set[d] = set(self.basis[d])

    def dim(self, d: int) -> int:
        self.ensure(d)
        return len(self.basis[d])

    def _extend(self, b, x) -> dict:
        w = b + (x,)
        hit = self._ext.get(w)
        if hit is not None:
            return hit
        row = self._ech[len(w)].pivots.get(w)
        if row is None:
            out = {w: self.field.one}
        else:
            out = {c: -v for c, v in row.items() if c != w}
        self._ext[w] = out
        return out

    def reduce_word(self, w) -> dict:
        w = tuple(w)
        d = len(w)
        if d <= 1:
            return {w: self.field.one}
        hit = self._red.get(w)
        if hit is not None:
            return hit
        self.ensure(d)
        if w in self._basis_set[d]:
            out = {w: self.field.one}
        else:
            out: dict = {}
            for b, c in self.reduce_word(w[:-1]).items():
                axpy(out, self._extend(b, w[-1]), c)
        self._red[w] = out
        return out

    def reduce(self, terms: dict) -> dict:
        out: dict = {}
        for w, c in terms.items():
            axpy(out, self.reduce_word(w), c)
        return out


def flat_dimension(N: int, d: int) -> int:
    """dim of the degree-d part of Sym(gl(N))."""
    return comb(N * N + d - 1, d)


def super_flat_dimension(m: int, n: int, d: int) -> int:
    """dim of the degree-d part of the supersymmetric algebra of gl(m|n).

    Even generators commute, odd ones anticommute, so the count is
    sum_j (symmetric part of degree d-j on the even ones) * binom(#odd, j).
    """
    even, odd = m * m + n * n, 2 * m * n
    return sum(comb(even + d - j - 1, d - j) * comb(odd, j) for j in range(0, min(d, odd) + 1))


# ---------------------------------------------------------------------------
# Double algebra
# ---------------------------------------------------------------------------


class DoubleElement(LinComb):
    """Reduced split-form element: keys are (m_word, d_word)."""

    __slots__ = ()

    def bidegrees(self) -> set:
        return {(len(m), len(d)) for m, d in self.terms}

    def m_only(self) -> bool:
        return all(not d for _, d in self.terms)

    def counit(self) -> "DoubleElement":
        """Keep exactly the terms of d-degree 0."""
        return self._wrap({k: v for k, v in self.terms.items() if not k[1]})

    def degree_part(self, dm: int, dd: int = 0) -> "DoubleElement":
        return self._wrap({k: v for k, v in self.terms.items() if len(k[0]) == dm and len(k[1]) == dd})

    def to_ncpoly(self, free: FreeAlgebra | None = None) -> NcPoly:
        free = free or FreeAlgebra(self.ring.field, self.ring.N)
        return NcPoly(free, {m + d: c for (m, d), c in self.terms.items()})

    def first_term(self):
        if not self.terms:
            return None
        k = min(self.terms, key=lambda k: (len(k[0]) + len(k[1]), k))
        return k, self.terms[k]


def _r_key(R: TensorOp):
    return (R.field.key, R.dim, tuple(sorted(R.entries(), key=lambda e: e[0])))


_alg_lock = threading.RLock()
_alg_cache: dict = {}
_tower_cache: dict = {}


def double_algebra(R: TensorOp, homogeneous: bool = False, cap: int = DEFAULT_MAX_DEGREE) -> "DoubleAlgebra":
    """Shared (cached) double algebra for R; the homogeneous variant drops the
    constant term of the cross relations (used for normal ordering)."""
    key = (_r_key(R), homogeneous, cap)
    with _alg_lock:
        alg = _alg_cache.get(key)
        if alg is None:
            alg = DoubleAlgebra(R, homogeneous=homogeneous, cap=cap)
            _alg_cache[key] = alg
        return alg


class DoubleAlgebra:
    def __init__(self, R: TensorOp, homogeneous: bool = False, cap: int = DEFAULT_MAX_DEGREE):
        self.R = R
        self.field = R.field
        self.N = N = R.dim
        self.N2 = N * N
        self.homogeneous = homogeneous
        self.cap = cap
        self.skew = skew_inverse(R)
        self.free = FreeAlgebra(self.field, N)
        key = (_r_key(R), cap)
        with _alg_lock:
            towers = _tower_cache.get(key)
            if towers is None:
                towers = self._make_towers()
                _tower_cache[key] = towers
        self.Mq, self.Dq = towers
        self.rule = self._solve_rule()
        self._swap: dict = {}
        self._swap1: dict = {}
        self._tmul: dict = {}
        self._word: dict = {}

    # -- construction ------------------------------------------------------
    def _make_towers(self):
        def quad(kind):
            out = []
            for p in relations(kind, self.R, self.free).relations:
                out.append(p.terms)
            return out

        mq = QuotientBasis(self.field, "m", range(self.N2), quad(RE_M), self.cap)
        dq = QuotientBasis(self.field, "d", range(self.N2, 2 * self.N2), quad(RE_D), self.cap)
        return mq, dq

    def _solve_rule(self) -> dict:
        """Coordinate form of the cross relations: d m -> sum c m' d' + c0."""
        N2 = self.N2

        def dm_word(w):
            return len(w) == 2 and w[0] >= N2 and w[1] < N2

        ech = RowEchelon(self.field, allow_pivot=dm_word)
        for p in relations(PERM, self.R, self.free).relations:
            ech.add(p.terms)
        rule = {}
        for dg in range(N2, 2 * N2):
            for mg in range(N2):
                row = ech.pivots.get((dg, mg))
                if row is None:
                    raise DoubleError("cross relations do not determine d*m in terms of m*d")
                terms, c0 = [], self.field.zero
                for w, c in row.items():
                    if w == (dg, mg):
                        continue
                    if dm_word(w):
                        raise DoubleError("cross relations are degenerate")
                    if not w:
                        c0 = -c
                    else:
                        terms.append((w[0], w[1], -c))
                if self.homogeneous:
                    c0 = self.field.zero
                rule[(dg, mg)] = (terms, c0)
        for w in ech.pivots:
            if not dm_word(w):
                raise DoubleError("cross relations impose extra relations on split words")
        return rule

    # -- ring interface ------------------------------------------------------
    def scalar(self, c) -> DoubleElement:
        return DoubleElement(self, {((), ()): self.field(c)})

    def one(self) -> DoubleElement:
        return self.scalar(1)

    def zero(self) -> DoubleElement:
        return DoubleElement(self, {})

    def gen(self, g: int) -> DoubleElement:
        key = ((g,), ()) if g < self.N2 else ((), (g,))
        return DoubleElement(self, {key: self.field.one})

    def m(self, i: int, j: int) -> DoubleElement:
        """1-based m_i^j."""
        return self.gen((i - 1) * self.N + j - 1)

    def d(self, i: int, j: int) -> DoubleElement:
        return self.gen(self.N2 + (i - 1) * self.N + j - 1)

    def l(self, i: int, j: int) -> DoubleElement:
        out = self.zero()
        for k in range(1, self.N + 1):
            out = out + self.m(i, k) * self.d(k, j)
        return out

    def format_terms(self, terms: dict) -> str:
        return format_coeff_terms(terms, lambda k: format_word(k[0] + k[1], self.N))

    def element(self, terms: dict) -> DoubleElement:
        return DoubleElement(self, terms)

    # -- core products -----------------------------------------------------
    def mul_m(self, a, b) -> dict:
        if not a:
            return {b: self.field.one}
        if not b:
            return {a: self.field.one}
        return self.Mq.reduce_word(a + b)

    def mul_d(self, a, b) -> dict:
        if not a:
            return {b: self.field.one}
        if not b:
            return {a: self.field.one}
        return self.Dq.reduce_word(a + b)

    def swap1(self, dg: int, mword) -> dict:
        """d_g * (m-word) in reduced split form; the m-word need not be reduced."""
        key = (dg, mword)
        hit = self._swap1.get(key)
        if hit is not None:
            return hit
        one = self.field.one
        if not mword:
            out = {((), (dg,)): one}
        else:
            x, rest = mword[0], mword[1:]
            terms, c0 = self.rule[(dg, x)]
            out: dict = {}
            for y, z, c in terms:
                for (m1, d1), c1 in self.swap1(z, rest).items():
                    cc = c * c1
                    for m2, c2 in self.Mq.reduce_word((y,) + m1).items():
                        k = (m2, d1)
                        s = out.get(k, 0) + cc * c2
                        if s:
                            out[k] = s
                        else:
                            out.pop(k, None)
            if c0:
                for m2, c2 in self.Mq.reduce_word(rest).items():
                    k = (m2, ())
                    s = out.get(k, 0) + c0 * c2
                    if s:
                        out[k] = s
                    else:
                        out.pop(k, None)
        self._swap1[key] = out
        return out

    def swap(self, dword, mword) -> dict:
        """(reduced d-word) * (reduced m-word) in reduced split form."""
        if not dword or not mword:
            return {(mword, dword): self.field.one}
        key = (dword, mword)
        hit = self._swap.get(key)
        if hit is not None:
            return hit
        dp, dg = dword[:-1], dword[-1]
        out: dict = {}
        for (m1, d1), c1 in self.swap1(dg, mword).items():
            for (m2, d2), c2 in self.swap(dp, m1).items():
                cc = c1 * c2
                for d3, c3 in self.mul_d(d2, d1).items():
                    k = (m2, d3)
                    s = out.get(k, 0) + cc * c3
                    if s:
                        out[k] = s
                    else:
                        out.pop(k, None)
        self._swap[key] = out
        return out

    def term_mul(self, ka, kb) -> dict:
        (ma, da), (mb, db) = ka, kb
        if not da and not mb:
            return {(ma, db): self.field.one}
        key = (ka, kb)
        hit = self._tmul.get(key)
        if hit is not None:
            return hit
        out: dict = {}
        for (m1, d1), c1 in self.swap(da, mb).items():
            mm = self.mul_m(ma, m1)
            dd = self.mul_d(d1, db)
            for m2, c2 in mm.items():
                cc = c1 * c2
                for d2, c3 in dd.items():
                    k = (m2, d2)
                    s = out.get(k, 0) + cc * c3
                    if s:
                        out[k] = s
                    else:
                        out.pop(k, None)
        self._tmul[key] = out
        return out

    def mul_terms(self, a: dict, b: dict) -> dict:
        out: dict = {}
        for ka, ca in a.items():
            for kb, cb in b.items():
                axpy(out, self.term_mul(ka, kb), ca * cb)
        return out

    def act_terms(self, x: dict, f: dict) -> dict:
        """Counit part of x * f for m-only f, without forming the full product."""
        out: dict = {}
        for (mx, dx), cx in x.items():
            for (mf, df), cf in f.items():
                if df:
                    raise DoubleError("the action is defined on m-only elements")
                c = cx * cf
                for (m1, d1), c1 in self.swap(dx, mf).items():
                    if d1:
                        continue
                    for m2, c2 in self.mul_m(mx, m1).items():
                        k = (m2, ())
                        s = out.get(k, 0) + c * c1 * c2
                        if s:
                            out[k] = s
                        else:
                            out.pop(k, None)
        return out

    # -- conversion from free polynomials ---------------------------------------
    def word_element(self, w) -> dict:
        w = tuple(w)
        hit = self._word.get(w)
        if hit is not None:
            return hit
        if not w:
            out = {((), ()): self.field.one}
        elif len(w) == 1:
            out = self.gen(w[0]).terms
        else:
            out = self.mul_terms(self.word_element(w[:-1]), self.gen(w[-1]).terms)
        self._word[w] = out
        return out

    def normal_form(self, p) -> DoubleElement:
        """Reduced split form of a free polynomial (or pass-through for elements)."""
        if isinstance(p, DoubleElement):
            if p.ring is not self:
                raise DoubleError("element of a different double algebra")
            return p
        if not isinstance(p, NcPoly):
            return self.scalar(p)
        out: dict = {}
        for w, c in p.terms.items():
            axpy(out, self.word_element(w), c)
        return DoubleElement(self, out)

    def reduce_split(self, p: NcPoly) -> DoubleElement:
        """Reduce the m- and d-blocks of a split polynomial separately."""
        if not p.is_split():
            raise DoubleError("polynomial is not in split form")
        N2 = self.N2
        out: dict = {}
        for w, c in p.terms.items():
            k = next((i for i, g in enumerate(w) if g >= N2), len(w))
            mw, dw = w[:k], w[k:]
            for m2, c2 in self.Mq.reduce_word(mw).items():
                for d2, c3 in self.Dq.reduce_word(dw).items():
                    key = (m2, d2)
                    s = out.get(key, 0) + c * c2 * c3
                    if s:
                        out[key] = s
                    else:
                        out.pop(key, None)
        return DoubleElement(self, out)

    def to_matrix(self, X: OpMatrix) -> OpMatrix:
        if X.ring is self:
            return X
        return X.map_entries(lambda t: self.normal_form(NcPoly(X.ring, t)).terms, ring=self)

    def reinterpret(self, x):
        """Read a split-form element of another double for the same R in this one.

        Both share their quotient bases, so the split coordinates carry over.
        """
        if isinstance(x, OpMatrix):
            return OpMatrix(self, x.dim, x.sites, {r: {c: dict(t) for c, t in row.items()} for r, row in x.rows.items()})
        return DoubleElement(self, dict(x.terms))


# ---------------------------------------------------------------------------
# Rewriting to split form (explicit, word level)
# ---------------------------------------------------------------------------


def reorder_normal(p: NcPoly, alg: DoubleAlgebra) -> NcPoly:
    """Move every d past every m with the coordinate cross relations.

    Leftmost d-m adjacency first; words are not reduced modulo the
    quadratic relations, so the output is a split polynomial in the free
    algebra representing the same element of the double.
    """
    N2 = alg.N2
    out: dict = {}
    stack = list(p.terms.items())
    while stack:
        w, c = stack.pop()
        pos = next((i for i in range(len(w) - 1) if w[i] >= N2 and w[i + 1] < N2), None)
        if pos is None:
            s = out.get(w, 0) + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
            continue
        terms, c0 = alg.rule[(w[pos], w[pos + 1])]
        head, tail = w[:pos], w[pos + 2:]
        for y, z, x in terms:
            stack.append((head + (y, z) + tail, c * x))
        if c0:
            stack.append((head + tail, c * c0))
    return NcPoly(p.ring, out)


def counit_project(s):
    """Keep the d-degree 0 part of a split polynomial or reduced element."""
    if isinstance(s, DoubleElement):
        return s.counit()
    if not s.is_split():
        raise DoubleError("counit projection needs a split form")
    N2 = s.ring.N ** 2
    return NcPoly(s.ring, {w: c for w, c in s.terms.items() if all(g < N2 for g in w)})


def act(X, f, alg: DoubleAlgebra) -> DoubleElement:
    """X |> f: counit projection of the split form of X f."""
    f = alg.normal_form(f)
    if not f.m_only():
        raise DoubleError("the action is defined on m-only elements")
    return DoubleElement(alg, alg.act_terms(alg.normal_form(X).terms, f.terms))


def act_matrix(X: OpMatrix, F: OpMatrix, alg: DoubleAlgebra) -> OpMatrix:
    """Entrywise matrix action: (X |> F)_{ac} = sum_b X_ab |> F_bc."""
    X, F = alg.to_matrix(X), alg.to_matrix(F)
    if X.dim != F.dim or X.sites != F.sites:
        raise DoubleError("shape mismatch in matrix action")
    rows = {}
    for r, row in X.rows.items():
        out: dict = {}
        for a, t in row.items():
            for c, u in F.rows.get(a, {}).items():
                axpy(out.setdefault(c, {}), alg.act_terms(t, u))
        rows[r] = out
    return OpMatrix(alg, X.dim, X.sites, rows)


# ---------------------------------------------------------------------------
# Decisions
# ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    ok: bool
    witness: str | None = None
    detail: dict = dc_field(default_factory=dict)

    def __bool__(self):
        return self.ok


def _witness_terms(alg, terms: dict) -> str:
    k = min(terms, key=lambda k: (len(k[0]) + len(k[1]), k))
    return f"{format_word(k[0] + k[1], alg.N)} with coefficient {terms[k]}"


def alg_equal(a, b, alg: DoubleAlgebra) -> CheckResult:
    diff = alg.normal_form(a) - alg.normal_form(b)
    if diff.is_zero():
        return CheckResult(True)
    return CheckResult(False, _witness_terms(alg, diff.terms))


def matrix_equal(A, B, alg: DoubleAlgebra | None = None) -> CheckResult:
    """Entrywise equality of two operator matrices in the double."""
    if alg is None:
        alg = A.ring if isinstance(A, OpMatrix) and isinstance(A.ring, DoubleAlgebra) else B.ring
    A = OpMatrix.from_tensor(alg, A) if isinstance(A, TensorOp) else alg.to_matrix(A)
    B = OpMatrix.from_tensor(alg, B) if isinstance(B, TensorOp) else alg.to_matrix(B)
    D = A - B
    if D.is_zero():
        return CheckResult(True)
    r, c = D.nonzero_entries()[0]
    rd = ",".join(str(x + 1) for x in digits(r, D.dim, D.sites))
    cd = ",".join(str(x + 1) for x in digits(c, D.dim, D.sites))
    nbad = sum(len(row) for row in D.rows.values())
    return CheckResult(
        False,
        f"entry [{rd}|{cd}]: {_witness_terms(alg, D.rows[r][c])}",
        {"nonzero_entries": nbad},
    )


def scope_generators(alg: DoubleAlgebra, scope: str) -> list:
    N = alg.N
    if scope == "M":
        return [alg.m(i, j) for i in range(1, N + 1) for j in range(1, N + 1)]
    if scope == "D":
        return [alg.d(i, j) for i in range(1, N + 1) for j in range(1, N + 1)]
    if scope == "L":
        return [alg.l(i, j) for i in range(1, N + 1) for j in range(1, N + 1)]
    if scope == "double":
        return scope_generators(alg, "M") + scope_generators(alg, "D")
    raise DoubleError(f"unknown centrality scope {scope!r}")


def is_central(p, scope: str, alg: DoubleAlgebra) -> CheckResult:
    """p g = g p for every generator g of the scope (M, D, L or double)."""
    p = alg.normal_form(p)
    for g in scope_generators(alg, scope):
        comm = p * g - g * p
        if not comm.is_zero():
            return CheckResult(False, f"[p, {g}] has term {_witness_terms(alg, comm.terms)}")
    return CheckResult(True)


# ---------------------------------------------------------------------------
# Characteristic subalgebra membership
# ---------------------------------------------------------------------------

_span_lock = threading.Lock()
_span_cache: dict = {}


def char_span(alg: DoubleAlgebra, n: int) -> list:
    """Reduced ch_n(T_w) for all permutations w of S_n."""
    from .charsub import char_image
    from .hecke import HeckeElement, all_perms

    key = (id(alg), n)
    with _span_lock:
        hit = _span_cache.get(key)
        if hit is not None and hit[0] is alg:
            return hit[1]
    vecs = [char_image(HeckeElement.basis(alg.field, n, w), alg).terms for w in all_perms(n)]
    with _span_lock:
        _span_cache[key] = (alg, vecs)
    return vecs


def char_membership(f, alg: DoubleAlgebra) -> CheckResult:
    """Is the m-only element f in the characteristic subalgebra?

    Each homogeneous component of degree n is tested against the span of
    ch_n(T_w), w in S_n; the solved coefficients go into ``detail``.
    """
    f = alg.normal_form(f)
    if not f.m_only():
        return CheckResult(False, "element has d-degree > 0")
    by_deg: dict = {}
    for (m, _), c in f.terms.items():
        by_deg.setdefault(len(m), {})[(m, ())] = c
    coeffs = {}
    for n, part in sorted(by_deg.items()):
        if n == 0:
            coeffs[0] = [part[((), ())]]
            continue
        sol = span_coefficients(alg.field, char_span(alg, n), part)
        if sol is None:
            return CheckResult(False, f"degree-{n} component outside the characteristic span")
        coeffs[n] = sol
    return CheckResult(True, detail={"coefficients": coeffs})


def flatness_report(alg: DoubleAlgebra, max_degree: int, expected=None) -> list:
    """(tag, degree, dim, expected) rows for both quotients.

    ``expected`` maps a degree to the classical dimension; the default is
    the symmetric algebra of gl(N).
    """
    expected = expected or (lambda d: flat_dimension(alg.N, d))
    out = []
    for tag, tower in (("M", alg.Mq), ("D", alg.Dq)):
        for d in range(1, max_degree + 1):
            out.append((tag, d, tower.dim(d), expected(d)))
    return out


__all__ = [
    "DoubleAlgebra", "DoubleElement", "QuotientBasis", "CheckResult", "double_algebra",
    "reorder_normal", "counit_project", "act", "act_matrix", "alg_equal", "matrix_equal",
    "is_central", "char_membership", "char_span", "flatness_report", "flat_dimension", "super_flat_dimension",
    "gen_matrix", "l_hat", "M", "DEL",
]
