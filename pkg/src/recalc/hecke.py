"""The Hecke algebra H_n(q) in the T_w basis, Young tableaux and idempotents."""

from __future__ import annotations

import threading
from functools import reduce
from itertools import permutations

from .arith import ModeMismatchError
from .tensor import TensorError, TensorOp, r_at


class HeckeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Permutations (one-line notation, 0-based values)
# ---------------------------------------------------------------------------


def identity_perm(n: int) -> tuple:
    return tuple(range(n))


def perm_length(w) -> int:
    return sum(1 for i in range(len(w)) for j in range(i + 1, len(w)) if w[i] > w[j])


def reduced_word(w) -> list:
    """Generator indices i (1-based) with T_w = tau_{i_1} ... tau_{i_l}."""
    w = list(w)
    word = []
    while True:
        for i in range(len(w) - 1):
            if w[i] > w[i + 1]:
                w[i], w[i + 1] = w[i + 1], w[i]
                word.append(i + 1)
                break
        else:
            break
    return word[::-1]


def all_perms(n: int) -> list:
    return sorted(permutations(range(n)), key=lambda w: (perm_length(w), w))


# ---------------------------------------------------------------------------
# Hecke elements
# ---------------------------------------------------------------------------


class HeckeElement:
    """sum_w c_w T_w in H_n(q), tau_i^2 = 1 + (q - q^-1) tau_i."""

    __slots__ = ("field", "n", "terms")

    def __init__(self, field, n: int, terms=None):
        self.field = field
        self.n = n
        self.terms = {w: c for w, c in (terms or {}).items() if c}

    @classmethod
    def one(cls, field, n: int) -> "HeckeElement":
        return cls(field, n, {identity_perm(n): field.one})

    @classmethod
    def generator(cls, field, n: int, i: int) -> "HeckeElement":
        if not 1 <= i < n:
            raise HeckeError(f"tau_{i} does not exist in H_{n}")
        w = list(range(n))
        w[i - 1], w[i] = w[i], w[i - 1]
        return cls(field, n, {tuple(w): field.one})

    @classmethod
    def basis(cls, field, n: int, w) -> "HeckeElement":
        return cls(field, n, {tuple(w): field.one})

    @classmethod
    def from_word(cls, field, n: int, word) -> "HeckeElement":
        out = cls.one(field, n)
        for i in word:
            out = out * cls.generator(field, n, i)
        return out

    def _check(self, other: "HeckeElement"):
        if self.field != other.field:
            raise ModeMismatchError("Hecke elements over different fields")
        if self.n != other.n:
            raise HeckeError(f"degree mismatch: H_{self.n} vs H_{other.n}")

    def __add__(self, other):
        if not isinstance(other, HeckeElement):
            other = HeckeElement.one(self.field, self.n).scale(self.field(other))
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return HeckeElement(self.field, self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-self.field.one)

    def __sub__(self, other):
        if not isinstance(other, HeckeElement):
            other = HeckeElement.one(self.field, self.n).scale(self.field(other))
        return self + (-other)

    def scale(self, c) -> "HeckeElement":
        return HeckeElement(self.field, self.n, {w: v * c for w, v in self.terms.items()})

    def _mul_gen(self, terms: dict, i: int) -> dict:
        """Right multiplication of a term dict by tau_i."""
        gap = self.field.gap
        out: dict = {}
        for w, c in terms.items():
            ws = list(w)
            ws[i - 1], ws[i] = ws[i], ws[i - 1]
            ws = tuple(ws)
            out[ws] = out.get(ws, 0) + c
            if w[i - 1] > w[i]:
                out[w] = out.get(w, 0) + gap * c
        return {w: c for w, c in out.items() if c}

    def __mul__(self, other):
        if not isinstance(other, HeckeElement):
            return self.scale(self.field(other))
        self._check(other)
        out: dict = {}
        for v, c in other.terms.items():
            part = dict(self.terms)
            for i in reduced_word(v):
                part = self._mul_gen(part, i)
            for w, x in part.items():
                out[w] = out.get(w, 0) + x * c
        return HeckeElement(self.field, self.n, out)

    def __rmul__(self, c):
        return self.scale(self.field(c))

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, HeckeElement):
            return NotImplemented
        return self.field == other.field and self.n == other.n and (self - other).is_zero()

    __hash__ = None

    def embed(self, m: int) -> "HeckeElement":
        """Image under H_n -> H_m, m >= n (acting on the first n strands)."""
        if m < self.n:
            raise HeckeError("cannot embed into a smaller Hecke algebra")
        tail = tuple(range(self.n, m))
        return HeckeElement(self.field, m, {w + tail: c for w, c in self.terms.items()})

    def __repr__(self):
        parts = [f"({c})*T{''.join(map(str, reduced_word(w))) or 'e'}" for w, c in self.terms.items()]
        return " + ".join(parts) or "0"


def commutator(a: HeckeElement, b: HeckeElement) -> HeckeElement:
    return a * b - b * a


def jm_element(field, r: int, n: int) -> HeckeElement:
    """j_1 = 1, j_r = tau_{r-1} j_{r-1} tau_{r-1}."""
    if not 1 <= r <= n:
        raise HeckeError(f"JM index {r} out of range 1..{n}")
    j = HeckeElement.one(field, n)
    for s in range(2, r + 1):
        t = HeckeElement.generator(field, n, s - 1)
        j = t * j * t
    return j


def coxeter_element(field, k: int) -> HeckeElement:
    """tau_{k-1} tau_{k-2} ... tau_1 (the unit for k = 1)."""
    return HeckeElement.from_word(field, k, range(k - 1, 0, -1))


# ---------------------------------------------------------------------------
# Partitions and tableaux
# ---------------------------------------------------------------------------


class Partition(tuple):
    def __new__(cls, parts):
        parts = tuple(int(p) for p in parts)
        if any(p < 1 for p in parts) or any(a < b for a, b in zip(parts, parts[1:])):
            raise HeckeError(f"not a partition: {parts}")
        return super().__new__(cls, parts)

    @property
    def weight(self) -> int:
        return sum(self)

    @classmethod
    def parse(cls, text: str) -> "Partition":
        return cls(int(x) for x in text.split(",") if x.strip())

    def addable_contents(self) -> list:
        """Contents (column - row) of cells that can be added to the diagram."""
        out = []
        rows = list(self)
        for i in range(len(rows) + 1):
            length = rows[i] if i < len(rows) else 0
            prev = rows[i - 1] if i > 0 else None
            if prev is None or length < prev:
                out.append(length - i)
        return out


def partitions(n: int) -> list:
    def gen(n, maxpart):
        if n == 0:
            yield ()
            return
        for p in range(min(n, maxpart), 0, -1):
            for rest in gen(n - p, p):
                yield (p,) + rest

    return [Partition(p) for p in gen(n, n)]


class StdTableau(tuple):
    """Standard Young tableau as a tuple of rows of 1-based entries."""

    def __new__(cls, rows):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        t = super().__new__(cls, rows)
        t._validate()
        return t

    def _validate(self):
        shape = [len(r) for r in self]
        Partition(shape)
        flat = sorted(x for r in self for x in r)
        if flat != list(range(1, len(flat) + 1)):
            raise HeckeError(f"tableau entries must be 1..n: {self}")
        for i, r in enumerate(self):
            if any(a >= b for a, b in zip(r, r[1:])):
                raise HeckeError(f"row {i + 1} not increasing in {self}")
            if i:
                if any(self[i - 1][j] >= r[j] for j in range(len(r))):
                    raise HeckeError(f"column not increasing in {self}")

    @classmethod
    def parse(cls, text: str) -> "StdTableau":
        return cls([int(x) for x in row.split(",") if x.strip()] for row in text.split(";"))

    @property
    def shape(self) -> Partition:
        return Partition(len(r) for r in self)

    @property
    def n(self) -> int:
        return sum(len(r) for r in self)

    def content(self, s: int) -> int:
        for i, r in enumerate(self):
            if s in r:
                return r.index(s) - i
        raise HeckeError(f"{s} not in tableau")

    def contents(self) -> list:
        return [self.content(s) for s in range(1, self.n + 1)]

    def restrict(self) -> "StdTableau":
        """Remove the largest entry."""
        n = self.n
        rows = [tuple(x for x in r if x != n) for r in self]
        return StdTableau(r for r in rows if r)

    def __str__(self):
        return ";".join(",".join(map(str, r)) for r in self)


def standard_tableaux(shape) -> list:
    shape = Partition(shape)
    n = shape.weight
    out = []

    def fill(rows, k):
        if k > n:
            out.append(StdTableau(rows))
            return
        for i in range(len(shape)):
            if len(rows[i]) < shape[i] and (i == 0 or len(rows[i - 1]) > len(rows[i])):
                rows[i].append(k)
                fill(rows, k + 1)
                rows[i].pop()

    fill([[] for _ in shape], 1)
    return out


# ---------------------------------------------------------------------------
# Primitive idempotents by Jucys-Murphy interpolation
# ---------------------------------------------------------------------------

_idem_lock = threading.Lock()
_idem_cache: dict = {}


def primitive_idempotent(field, T: StdTableau) -> HeckeElement:
    """e_T with j_s e_T = e_T j_s = q^{2 c_s(T)} e_T.

    Built down the tableau chain:
        e_T = e_{T'} prod_{c} (j_n - q^{2c}) / (q^{2 c_n(T)} - q^{2c}),
    c ranging over the other addable contents of shape(T').
    """
    field.require_generic("primitive idempotent")
    T = StdTableau(T)
    key = (field.key, T)
    with _idem_lock:
        hit = _idem_cache.get(key)
    if hit is not None:
        return hit
    n = T.n
    if n == 1:
        e = HeckeElement.one(field, 1)
    else:
        Tp = T.restrict()
        e = primitive_idempotent(field, Tp).embed(n)
        cn = T.content(n)
        jn = jm_element(field, n, n)
        for c in Tp.shape.addable_contents():
            if c == cn:
                continue
            denom = field.qpow(2 * cn) - field.qpow(2 * c)
            if not denom:
                raise HeckeError("idempotent denominator vanishes (q is a root of unity)")
            e = e * (jn - field.qpow(2 * c)).scale(1 / denom)
    with _idem_lock:
        _idem_cache.setdefault(key, e)
        return _idem_cache[key]


# ---------------------------------------------------------------------------
# R-matrix representation
# ---------------------------------------------------------------------------


def rho_word(R: TensorOp, word, k: int) -> TensorOp:
    if not word:
        return TensorOp.identity(R.field, R.dim, k)
    return reduce(lambda a, b: a @ b, [r_at(R, i, k) for i in word])


def rho_r(z: HeckeElement, R: TensorOp, k: int | None = None) -> TensorOp:
    """rho_R(z) on k >= deg(z) sites; tau_i -> R_i."""
    if z.field != R.field:
        raise ModeMismatchError("Hecke element and R-matrix over different fields")
    k = z.n if k is None else k
    if z.n > k:
        raise TensorError(f"H_{z.n} element does not fit on {k} sites")
    out = TensorOp.zero(R.field, R.dim, k)
    for w, c in z.terms.items():
        out = out + rho_word(R, reduced_word(w), k).scale(c)
    return out
