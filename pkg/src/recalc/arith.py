"""Exact coefficient arithmetic in the deformation parameter q.

Two coefficient fields are supported:

* ``ExactField``: the rational function field Q(q).  Elements are
  :class:`RationalFunction` instances kept in a canonical reduced form.
* ``SpecializedField``: Q itself, obtained by evaluating at a fixed rational
  point q0.  Elements are ``flint.fmpq`` values.

Container objects (tensor operators, polynomials, matrices) carry the field
they were built over and refuse to combine with objects built over another
field; raw field elements are never tagged, which keeps the inner loops fast.
"""

from __future__ import annotations

import ast
import random
from fractions import Fraction

import flint

Rational = flint.fmpq
_P = flint.fmpq_poly
_ZERO_POLY = _P([])
_ONE_POLY = _P([1])


class ArithmeticError_(ArithmeticError):
    """Base class for coefficient-level failures."""


class ModeMismatchError(ArithmeticError_):
    pass


class PoleError(ArithmeticError_, ZeroDivisionError):
    pass


class RootOfUnityError(ArithmeticError_):
    pass


def _to_rational(x) -> Rational:
    if isinstance(x, Rational):
        return x
    if isinstance(x, int):
        return Rational(x)
    if isinstance(x, Fraction):
        return Rational(x.numerator, x.denominator)
    if isinstance(x, str):
        f = Fraction(x)
        return Rational(f.numerator, f.denominator)
    raise TypeError(f"cannot interpret {x!r} as a rational number")


def _valuation(p) -> int:
    for i, c in enumerate(p.coeffs()):
        if c:
            return i
    raise ValueError("valuation of zero polynomial")


# ---------------------------------------------------------------------------
# Laurent polynomials
# ---------------------------------------------------------------------------


class LaurentPoly:
    """Finite sum of c_e q^e with rational c_e and integer (possibly negative) e."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {}
        for e, c in (coeffs or {}).items():
            c = _to_rational(c)
            if c:
                self.coeffs[int(e)] = c

    @classmethod
    def monomial(cls, e: int, c=1) -> "LaurentPoly":
        return cls({e: c})

    @classmethod
    def _from_poly(cls, p, shift: int = 0) -> "LaurentPoly":
        return cls({i + shift: c for i, c in enumerate(p.coeffs()) if c})

    def is_zero(self) -> bool:
        return not self.coeffs

    def low(self) -> int:
        return min(self.coeffs)

    def high(self) -> int:
        return max(self.coeffs)

    def _shifted_poly(self):
        """Return (p, s) with self = q^s * p and p an ordinary polynomial."""
        if not self.coeffs:
            return _ZERO_POLY, 0
        s = self.low()
        out = [Rational(0)] * (self.high() - s + 1)
        for e, c in self.coeffs.items():
            out[e - s] = c
        return _P(out), s

    def __add__(self, other):
        other = _as_laurent(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-_as_laurent(other))

    def __rsub__(self, other):
        return _as_laurent(other) - self

    def __mul__(self, other):
        other = _as_laurent(other)
        out: dict = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = _as_laurent(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def evaluate(self, q0) -> Rational:
        q0 = _to_rational(q0)
        total = Rational(0)
        for e, c in self.coeffs.items():
            if e < 0 and q0 == 0:
                raise PoleError("negative power of q evaluated at 0")
            total += c * q0**e
        return total

    def __repr__(self):
        return f"LaurentPoly({_format_laurent(self.coeffs)!r})"

    def __str__(self):
        return _format_laurent(self.coeffs)


def _as_laurent(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    return LaurentPoly({0: _to_rational(x)})


def _format_coeff_term(c, e) -> str:
    if e == 0:
        body = ""
    elif e == 1:
        body = "q"
    else:
        body = f"q^{e}"
    if not body:
        return str(c)
    if c == 1:
        return body
    if c == -1:
        return "-" + body
    return f"{c}*{body}"


def _format_laurent(coeffs: dict) -> str:
    if not coeffs:
        return "0"
    parts = []
    for e in sorted(coeffs, reverse=True):
        t = _format_coeff_term(coeffs[e], e)
        if parts:
            parts.append(" - " + t[1:] if t.startswith("-") else " + " + t)
        else:
            parts.append(t)
    return "".join(parts)


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------


class RationalFunction:
    """Element of Q(q) in canonical form q^val * num / den.

    ``num`` and ``den`` are coprime ordinary polynomials with nonzero
    constant terms and ``den`` monic.  Zero is num = 0, val = 0, den = 1.
    Read as Laurent polynomials this is the reduced form whose denominator
    has lowest exponent 0 and leading coefficient 1.
    """

    __slots__ = ("num", "val", "den")

    def __init__(self, num, val: int = 0, den=None, *, _canonical: bool = False):
        if _canonical:
            self.num, self.val, self.den = num, val, den
            return
        n, v, d = _canonicalize(num, val, _ONE_POLY if den is None else den)
        self.num, self.val, self.den = n, v, d

    # -- construction -----------------------------------------------------
    @classmethod
    def constant(cls, c) -> "RationalFunction":
        c = _to_rational(c)
        if not c:
            return ZERO_RF
        return cls(_P([c]), 0, _ONE_POLY, _canonical=True)

    @classmethod
    def gen(cls) -> "RationalFunction":
        return cls(_ONE_POLY, 1, _ONE_POLY, _canonical=True)

    @classmethod
    def from_laurent(cls, p: LaurentPoly) -> "RationalFunction":
        poly, s = p._shifted_poly()
        return cls(poly, s)

    def numerator(self) -> LaurentPoly:
        return LaurentPoly._from_poly(self.num, self.val)

    def denominator(self) -> LaurentPoly:
        return LaurentPoly._from_poly(self.den)

    def is_laurent(self) -> bool:
        return self.den.degree() == 0

    def to_laurent(self) -> LaurentPoly:
        if not self.is_laurent():
            raise ValueError(f"{self} is not a Laurent polynomial")
        return self.numerator()

    # -- predicates ---------------------------------------------------------
    def __bool__(self):
        return not self.num.is_zero()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_unit_monomial(self) -> bool:
        return self.num.degree() == 0 and self.den.degree() == 0

    def size(self) -> int:
        return self.num.degree() + self.den.degree()

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if type(other) is not RationalFunction:
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        va, vb = self.val, other.val
        m = va if va < vb else vb
        a = self.num if va == m else self.num.left_shift(va - m)
        b = other.num if vb == m else other.num.left_shift(vb - m)
        if self.den.degree() == 0 and other.den.degree() == 0:
            n = a + b
            if n.is_zero():
                return ZERO_RF
            if va == vb and not n.coeffs()[0]:
                k = _valuation(n)
                n = n.right_shift(k)
                m += k
            return RationalFunction(n, m, _ONE_POLY, _canonical=True)
        return RationalFunction(a * other.den + b * self.den, m, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.val, self.den, _canonical=True)

    def __sub__(self, other):
        if type(other) is not RationalFunction:
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if type(other) is not RationalFunction:
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return ZERO_RF
        if self.den.degree() == 0 and other.den.degree() == 0:
            return RationalFunction(
                self.num * other.num, self.val + other.val, _ONE_POLY, _canonical=True
            )
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        g = n1.gcd(d2)
        if not g.is_one():
            n1, d2 = n1 / g, d2 / g
        g = n2.gcd(d1)
        if not g.is_one():
            n2, d1 = n2 / g, d1 / g
        d = d1 * d2
        n = n1 * n2
        lc = d.leading_coefficient()
        if lc != 1:
            n, d = n / lc, d / lc
        return RationalFunction(n, self.val + other.val, d, _canonical=True)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero():
            raise ZeroDivisionError("inversion of zero rational function")
        lc = self.num.leading_coefficient()
        return RationalFunction(self.den / lc, -self.val, self.num / lc, _canonical=True)

    def __truediv__(self, other):
        if type(other) is not RationalFunction:
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        if self.num.is_zero():
            return ONE_RF if e == 0 else ZERO_RF
        return RationalFunction(self.num**e, self.val * e, self.den**e, _canonical=True)

    # -- comparison ----------------------------------------------------------
    def __eq__(self, other):
        if type(other) is not RationalFunction:
            if isinstance(other, (int, Fraction)):
                other = RationalFunction.constant(other)
            else:
                return NotImplemented
        return self.val == other.val and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.val, tuple(self.num.coeffs()), tuple(self.den.coeffs())))

    # -- evaluation ----------------------------------------------------------
    def specialize(self, q0) -> Rational:
        q0 = _to_rational(q0)
        if self.num.is_zero():
            return Rational(0)
        d = self.den(q0)
        if not d:
            raise PoleError(f"{self} has a pole at q = {q0}")
        if self.val < 0 and q0 == 0:
            raise PoleError(f"{self} has a pole at q = 0")
        return self.num(q0) / d * q0**self.val

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"

    def __str__(self):
        n = _format_laurent(self.numerator().coeffs)
        if self.den.degree() == 0:
            return n
        d = _format_laurent(self.denominator().coeffs)
        return f"({n})/({d})"


def _canonicalize(num, val, den):
    if den.is_zero():
        raise ZeroDivisionError("rational function with zero denominator")
    if num.is_zero():
        return _ZERO_POLY, 0, _ONE_POLY
    k = _valuation(num)
    if k:
        num = num.right_shift(k)
        val += k
    k = _valuation(den)
    if k:
        den = den.right_shift(k)
        val -= k
    if den.degree() > 0:
        g = num.gcd(den)
        if not g.is_one():
            num, den = num / g, den / g
    lc = den.leading_coefficient()
    if lc != 1:
        num, den = num / lc, den / lc
    return num, val, den


def _coerce(x):
    if isinstance(x, (int, Fraction)) or type(x) is Rational:
        if type(x) is Rational:
            raise ModeMismatchError("cannot mix an exact rational function with a specialized scalar")
        return RationalFunction.constant(x)
    return NotImplemented


ZERO_RF = RationalFunction(_ZERO_POLY, 0, _ONE_POLY, _canonical=True)
ONE_RF = RationalFunction(_ONE_POLY, 0, _ONE_POLY, _canonical=True)


def rf_normalize(num: LaurentPoly, den: LaurentPoly) -> RationalFunction:
    """Canonical reduced form of num/den."""
    num, den = _as_laurent(num), _as_laurent(den)
    if den.is_zero():
        raise ZeroDivisionError("rf_normalize: zero denominator")
    pn, sn = num._shifted_poly()
    pd, sd = den._shifted_poly()
    return RationalFunction(pn, sn - sd, pd)


def rf_specialize(f: RationalFunction, q0) -> Rational:
    return f.specialize(q0)


# ---------------------------------------------------------------------------
# Coefficient fields
# ---------------------------------------------------------------------------


class ExactField:
    """Q(q): proof-grade arithmetic."""

    exact = True
    q0 = None
    generic = True
    name = "exact"

    def __init__(self):
        self.zero = ZERO_RF
        self.one = ONE_RF
        self.q = RationalFunction.gen()
        self.qi = self.q.inverse()
        self.gap = self.q - self.qi

    @property
    def key(self):
        return ("exact",)

    def __eq__(self, other):
        return isinstance(other, ExactField)

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return "ExactField()"

    def __call__(self, x):
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, LaurentPoly):
            return RationalFunction.from_laurent(x)
        if isinstance(x, str):
            return parse_scalar(x, self)
        if type(x) is Rational:
            return RationalFunction.constant(x)
        return RationalFunction.constant(_to_rational(x))

    def qpow(self, e: int):
        return RationalFunction(_ONE_POLY, e, _ONE_POLY, _canonical=True)

    def weight(self, x) -> int:
        return x.size()

    def require_generic(self, what: str = "operation"):
        return None

    def specialize(self, x, q0):
        return x.specialize(q0)


class SpecializedField:
    """Q with q fixed to a rational value q0."""

    exact = False
    name = "specialized"

    def __init__(self, q0):
        q0 = _to_rational(q0)
        if q0 == 0:
            raise RootOfUnityError("q0 = 0 is not allowed")
        self.q0 = q0
        self.zero = Rational(0)
        self.one = Rational(1)
        self.q = q0
        self.qi = 1 / q0
        self.gap = self.q - self.qi
        # rational q0 satisfies q0^n = 1 for some n > 0 only when q0 = +-1
        self.generic = q0 not in (1, -1)

    @property
    def key(self):
        return ("specialized", int(self.q0.p), int(self.q0.q))

    def __eq__(self, other):
        return isinstance(other, SpecializedField) and self.q0 == other.q0

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"SpecializedField({self.q0})"

    def __call__(self, x):
        if isinstance(x, RationalFunction):
            return x.specialize(self.q0)
        if isinstance(x, LaurentPoly):
            return x.evaluate(self.q0)
        if isinstance(x, str):
            return parse_scalar(x, self)
        return _to_rational(x)

    def qpow(self, e: int):
        return self.q0**e

    def weight(self, x) -> int:
        return int(x.p).bit_length() + int(x.q).bit_length()

    def require_generic(self, what: str = "operation"):
        if not self.generic:
            raise RootOfUnityError(f"{what} needs generic q; got q0 = {self.q0}")

    def specialize(self, x, q0):
        if _to_rational(q0) != self.q0:
            raise ModeMismatchError("value already specialized at a different point")
        return x


Field = ExactField | SpecializedField


def make_field(q0=None):
    return ExactField() if q0 is None else SpecializedField(q0)


def random_q0(rng: random.Random, bound: int = 100) -> Rational:
    """Random rational with numerator/denominator at most ``bound`` and |q0| not in {0, 1}."""
    while True:
        p = rng.randint(-bound, bound)
        d = rng.randint(1, bound)
        x = Rational(p, d)
        if x not in (0, 1, -1):
            return x


# ---------------------------------------------------------------------------
# Scalar: tagged field element for API-level use
# ---------------------------------------------------------------------------


class Scalar:
    """A field element together with its mode; mixing modes raises."""

    __slots__ = ("value", "field")

    def __init__(self, value, field=None):
        field = field if field is not None else ExactField()
        self.field = field
        self.value = field(value)

    @property
    def mode(self) -> str:
        return self.field.name

    def _check(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            return Scalar(other, self.field)
        if self.field != other.field:
            raise ModeMismatchError(f"cannot combine {self.field!r} with {other.field!r}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return Scalar(self.value + other.value, self.field)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.value, self.field)

    def __sub__(self, other):
        other = self._check(other)
        return Scalar(self.value - other.value, self.field)

    def __mul__(self, other):
        other = self._check(other)
        return Scalar(self.value * other.value, self.field)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("inversion of zero scalar")
        return Scalar(1 / self.value, self.field)

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def is_zero(self) -> bool:
        return not self.value

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        return self.value == other

    def __hash__(self):
        return hash((self.field.key, self.value))

    def __repr__(self):
        return f"Scalar({self.value}, {self.field!r})"


# ---------------------------------------------------------------------------
# Scalar literal grammar: integers, q, + - * / ^, parentheses
# ---------------------------------------------------------------------------


class ScalarParseError(ValueError):
    pass


def parse_scalar(text: str, field=None):
    """Evaluate a scalar literal such as ``q - q^-1`` in ``field``."""
    field = field if field is not None else ExactField()
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ScalarParseError(f"bad scalar literal {text!r}: {exc.msg}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return field(node.value)
        if isinstance(node, ast.Name) and node.id == "q":
            return field.q
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                e = _int_exponent(node.right)
                base = ev(node.left)
                if e < 0 and not base:
                    raise PoleError(f"zero to a negative power in {text!r}")
                return base**e
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                if not b:
                    raise PoleError(f"division by zero in {text!r}")
                return a / b
        raise ScalarParseError(f"unsupported syntax in scalar literal {text!r}")

    def _int_exponent(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = _int_exponent(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        raise ScalarParseError(f"exponent must be an integer in {text!r}")

    return ev(tree)


def format_scalar(x) -> str:
    return str(x)
