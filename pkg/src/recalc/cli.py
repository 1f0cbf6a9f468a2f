"""Command-line driver: pick an R-matrix and an arithmetic mode, run verification suites.

    recalc run --rmatrix standard:2 --qmode exact --checks symmetry,central
    recalc explain wick
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field
from fractions import Fraction

from . import charsub as cs
from .arith import (
    ExactField,
    PoleError,
    RootOfUnityError,
    ScalarParseError,
    make_field,
    random_q0,
)
from .double import (
    CapExceededError,
    CheckResult,
    alg_equal,
    double_algebra,
    flatness_report,
    is_central,
    reorder_normal,
    super_flat_dimension,
)
from .hecke import (
    HeckeElement,
    all_perms,
    coxeter_element,
    partitions,
    standard_tableaux,
)
from .ncalg import M
from .tensor import (
    DEFAULT_MAX_DIM,
    DimensionGuardError,
    NotSkewInvertibleError,
    TensorOp,
    check_braid,
    check_hecke,
    digits,
    dj_r_matrix,
    dj_super_r_matrix,
    flip,
    load_r_matrix,
    max_sites,
    skew_inverse,
    skew_residual,
    super_flip,
    trace_identity_residual,
)

SUITES = (
    "symmetry",
    "flatness",
    "central",
    "schur",
    "laplace",
    "casimir",
    "ordering",
    "wick",
    "capelli",
    "ordered-casimir",
)

PASS, FAIL, SKIPPED, ERROR = "pass", "fail", "skipped", "error"


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass
class Caps:
    max_sites: int | None = None
    max_m_degree: int = 4
    max_del_degree: int = 4


@dataclass
class RunConfig:
    rmatrix: str = "standard:2"
    qmode: str | None = None  # None: exact for N <= 2, random:0,3 otherwise
    checks: list = dc_field(default_factory=lambda: list(SUITES))
    caps: Caps = dc_field(default_factory=Caps)
    output: str = "text"
    workers: int = 1
    depth: int | None = None  # None: 3 for N <= 2, 2 otherwise
    pole_policy: str = "warn"


def parse_rmatrix(spec: str):
    """'standard:N' | 'flip:N' | 'super:m,n' | 'file:path' -> (kind, args)."""
    kind, sep, arg = spec.partition(":")
    if not sep:
        raise ConfigError(f"--rmatrix needs kind:argument, got {spec!r}")
    try:
        if kind in ("standard", "flip"):
            N = int(arg)
            if N < 1:
                raise ValueError
            return kind, (N,)
        if kind == "super":
            m, n = (int(x) for x in arg.split(","))
            if m < 0 or n < 0 or m + n < 1:
                raise ValueError
            return kind, (m, n)
    except ValueError:
        raise ConfigError(f"bad --rmatrix argument {spec!r}") from None
    if kind == "file":
        if not arg:
            raise ConfigError("file: needs a path")
        return kind, (arg,)
    raise ConfigError(f"unknown R-matrix kind {kind!r} (standard, flip, super, file)")


def _parse_q0(text: str):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"q0 must be a rational number, got {text!r}") from None


def parse_qmode(spec: str | None, N: int):
    """-> list of (label, q0 or None, seed or None)."""
    if spec is None:
        spec = "exact" if N <= 2 else "random:0,3"
    if spec == "exact":
        return [("exact", None, None)]
    kind, _, arg = spec.partition(":")
    if kind == "specialized":
        q0 = _parse_q0(arg)
        if q0 == 0:
            raise ConfigError("q0 = 0 is not allowed")
        return [(f"specialized:{q0}", q0, None)]
    if kind == "random":
        try:
            seed, count = (int(x) for x in arg.split(","))
        except ValueError:
            raise ConfigError(f"random q-mode is random:seed,count, got {spec!r}") from None
        if count < 1:
            raise ConfigError("random q-mode needs count >= 1")
        rng = random.Random(seed)
        out = []
        for _ in range(count):
            q0 = random_q0(rng)
            out.append((f"specialized:{q0}", Fraction(int(q0.p), int(q0.q)), seed))
        return out
    raise ConfigError(f"unknown q-mode {spec!r} (exact, specialized:q0, random:seed,count)")


def _rmatrix_dim(kind, args) -> int | None:
    if kind in ("standard", "flip"):
        return args[0]
    if kind == "super":
        return args[0] + args[1]
    return None


def build_r(kind, args, field) -> TensorOp:
    if kind == "standard":
        return dj_r_matrix(field, args[0])
    if kind == "flip":
        return flip(field, args[0])
    if kind == "super":
        return dj_super_r_matrix(field, *args)
    try:
        return load_r_matrix(args[0], field)
    except OSError as exc:
        raise ConfigError(f"cannot read R-matrix file: {exc}") from None
    except (ValueError, KeyError, TypeError, ScalarParseError) as exc:
        raise ConfigError(f"bad R-matrix file {args[0]}: {exc}") from None


# ---------------------------------------------------------------------------
# Run context: one R-matrix at one point of the q-mode
# ---------------------------------------------------------------------------


class Context:
    def __init__(self, config: RunConfig, kind, args, field, R, label, q0, seed):
        self.config = config
        self.kind, self.args = kind, args
        self.field, self.R = field, R
        self.N = R.dim
        self.label, self.q0, self.seed = label, q0, seed
        self.cap = max(config.caps.max_m_degree, config.caps.max_del_degree)
        self._alg = None
        self._lock = threading.Lock()

    @property
    def alg(self):
        with self._lock:
            if self._alg is None:
                self._alg = double_algebra(self.R, cap=self.cap)
            return self._alg

    @property
    def depth(self) -> int:
        if self.config.depth is not None:
            return self.config.depth
        return 3 if self.N <= 2 else 2


@dataclass
class Check:
    suite: str
    name: str
    fn: object
    params: dict = dc_field(default_factory=dict)
    sites: int = 2
    degree: tuple = (0, 0)  # (m-degree, d-degree) the check needs
    generic: bool = False
    exact_only: bool = False


def _residual(X: TensorOp, what: str) -> CheckResult:
    if X.is_zero():
        return CheckResult(True)
    (r, c), v = min(X.entries(), key=lambda e: e[0])
    rd = ",".join(str(x + 1) for x in digits(r, X.dim, X.sites))
    cd = ",".join(str(x + 1) for x in digits(c, X.dim, X.sites))
    n = sum(1 for _ in X.entries())
    return CheckResult(False, f"{what} residual at [{rd}|{cd}] = {v}", {"nonzero_entries": n})


def _hecke_basis(ctx, n):
    return [HeckeElement.basis(ctx.field, n, w) for w in all_perms(n)]


def _all_ok(results) -> CheckResult:
    """Combine (label, CheckResult) pairs; the first failure is the witness."""
    for label, res in results:
        if not res:
            return CheckResult(False, f"{label}: {res.witness}", res.detail)
    return CheckResult(True)


# -- symmetry -------------------------------------------------------------


def _skew_check(ctx):
    try:
        sk = skew_inverse(ctx.R)
    except NotSkewInvertibleError as exc:
        return CheckResult(False, str(exc))
    res = _residual(skew_residual(ctx.R, sk.psi), "Tr_2 R_12 Psi_23 - P_13")
    if res:
        I = TensorOp.identity(ctx.field, ctx.N, 1)
        res.detail["C"] = "identity" if sk.c == I else "non-trivial"
        res.detail["trace_C"] = str(sk.c.trace())
    return res


def _trace_identity_check(ctx):
    try:
        sk = skew_inverse(ctx.R)
    except NotSkewInvertibleError as exc:
        return CheckResult(False, str(exc))
    return _residual(trace_identity_residual(ctx.R, sk.c), "Tr_2(C_2 R_12) - I")


def _classical_limit_check(ctx):
    try:
        R1 = ctx.R.specialize(1)
    except (PoleError, ZeroDivisionError) as exc:
        if ctx.config.pole_policy == "error":
            return CheckResult(False, f"R has a pole at q = 1: {exc}")
        return CheckResult(True, detail={"warning": f"R has a pole at q = 1: {exc}"})
    g = R1.field
    if ctx.kind == "standard":
        return _residual(R1 - flip(g, ctx.N), "R(q=1) - P")
    if ctx.kind == "super":
        return _residual(R1 - super_flip(g, *ctx.args), "R(q=1) - super flip")
    return _residual(check_hecke(R1), "Hecke at q = 1")


def _symmetry(ctx):
    out = [
        Check("symmetry", "braid", lambda c: _residual(check_braid(c.R), "R_1 R_2 R_1 - R_2 R_1 R_2"), sites=3),
        Check("symmetry", "hecke", lambda c: _residual(check_hecke(c.R), "(q - R)(q^-1 + R)")),
        Check("symmetry", "skew-inverse", _skew_check, sites=3),
        Check("symmetry", "trace-identity", _trace_identity_check),
    ]
    if isinstance(ctx.field, ExactField):
        out.append(Check("symmetry", "classical-limit", _classical_limit_check))
    return out


# -- flatness -------------------------------------------------------------


def _flatness_check(ctx, d):
    if ctx.kind == "super":
        expected = lambda e: super_flat_dimension(*ctx.args, e)  # noqa: E731
    else:
        expected = None
    rows = flatness_report(ctx.alg, d, expected)
    detail = {f"{tag}{deg}": dim for tag, deg, dim, _ in rows}
    for tag, deg, dim, exp in rows:
        if dim != exp:
            return CheckResult(False, f"{tag} degree {deg}: dim {dim} != classical {exp}", detail)
    return CheckResult(True, detail=detail)


def _flatness(ctx):
    d = min(ctx.config.caps.max_m_degree, ctx.config.caps.max_del_degree, 4 if ctx.N <= 3 else 3)
    return [Check("flatness", "quotient-dimensions", lambda c: _flatness_check(c, d), {"max_degree": d}, degree=(d, d))]


# -- central --------------------------------------------------------------


def _central_check(ctx, n):
    res = []
    for z in _hecke_basis(ctx, n):
        w = next(iter(z.terms))
        res.append((f"ch_{n}(T{''.join(str(x + 1) for x in w)})", is_central(cs.ch(z, n, M, ctx.alg).value, "M", ctx.alg)))
    return _all_ok(res)


def _placement_check(ctx, n):
    res = []
    for z in _hecke_basis(ctx, n):
        left = cs.char_image(z, ctx.alg, M, "left")
        right = cs.char_image(z, ctx.alg, M, "right")
        res.append((f"T{next(iter(z.terms))}", alg_equal(left, right, ctx.alg)))
    return _all_ok(res)


def _power_trace_check(ctx, k):
    return alg_equal(cs.power_sum(k, M, ctx.alg).value, cs.matrix_power_trace(k, M, ctx.alg), ctx.alg)


def _central(ctx):
    nmax = 3 if ctx.N <= 3 else 2
    out = []
    for n in range(1, nmax + 1):
        out.append(Check("central", "ch-central", lambda c, n=n: _central_check(c, n), {"n": n}, sites=n, degree=(n + 1, 0)))
    for n in range(2, nmax + 1):
        out.append(Check("central", "left-right-placement", lambda c, n=n: _placement_check(c, n), {"n": n}, sites=n, degree=(n, 0)))
        out.append(Check("central", "power-sum-matrix-power", lambda c, n=n: _power_trace_check(c, n), {"k": n}, sites=n, degree=(n, 0)))
    return out


# -- schur ----------------------------------------------------------------


def _schur_independence(ctx, n):
    res = []
    for lam in partitions(n):
        Ts = standard_tableaux(lam)
        first = cs.schur(Ts[0], ctx.alg).value
        for T in Ts[1:]:
            res.append((f"shape {','.join(map(str, lam))} tableau {T}", alg_equal(first, cs.schur(T, ctx.alg).value, ctx.alg)))
    return _all_ok(res)


def _s(ctx, rows):
    return cs.schur(rows, ctx.alg).value


def _lr_check(ctx):
    s1 = _s(ctx, [[1]])
    s2, s11 = _s(ctx, [[1, 2]]), _s(ctx, [[1], [2]])
    s3, s21 = _s(ctx, [[1, 2, 3]]), _s(ctx, [[1, 2], [3]])
    return _all_ok([
        ("s1 s1 = s2 + s11", alg_equal(s1 * s1, s2 + s11, ctx.alg)),
        ("s1 s2 = s3 + s21", alg_equal(s1 * s2, s3 + s21, ctx.alg)),
        ("s2 s1 = s3 + s21", alg_equal(s2 * s1, s3 + s21, ctx.alg)),
    ])


def _schur(ctx):
    return [
        Check("schur", "tableau-independence", lambda c: _schur_independence(c, 2), {"n": 2}, sites=2, degree=(2, 0), generic=True),
        Check("schur", "tableau-independence", lambda c: _schur_independence(c, 3), {"n": 3}, sites=3, degree=(3, 0), generic=True),
        Check("schur", "littlewood-richardson", _lr_check, sites=3, degree=(3, 0), generic=True),
    ]


# -- laplace --------------------------------------------------------------


def _laplace_check(ctx, m, k):
    Q = coxeter_element(ctx.field, m)
    res = []
    for z in _hecke_basis(ctx, k):
        res.append((f"z = T{next(iter(z.terms))}", cs.verify_laplace_stability(Q, z, ctx.alg)))
    return _all_ok(res)


def _laplace(ctx):
    kmax = ctx.depth
    out = []
    for k in range(1, kmax + 1):
        out.append(Check("laplace", "p1-stability", lambda c, k=k: _laplace_check(c, 1, k), {"m": 1, "k": k}, sites=k, degree=(k, 1)))
    for m in range(2, kmax + 1):
        for k in range(1, m):
            out.append(Check("laplace", "vanishing", lambda c, m=m, k=k: _laplace_check(c, m, k), {"m": m, "k": k}, sites=m, degree=(k, m)))
    for k in range(1, kmax + 1):
        out.append(Check("laplace", "d-action-formula", lambda c, k=k: cs.verify_d_action_formula(k, c.alg), {"k": k}, sites=k + 1, degree=(k, 1)))
    return out


# -- casimir --------------------------------------------------------------


def _casimir_stability(ctx, p, n):
    Q = coxeter_element(ctx.field, p)
    res = []
    for z in _hecke_basis(ctx, n):
        res.append((f"z = T{next(iter(z.terms))}", cs.verify_casimir_stability(Q, z, ctx.alg)))
    return _all_ok(res)


def _casimir(ctx):
    d = ctx.depth
    out = [
        Check("casimir", "modified-re", lambda c: cs.verify_mre(c.alg), degree=(2, 2)),
        Check("casimir", "l-m-permutation", lambda c: cs.verify_l_m_permutation(c.alg), degree=(2, 2)),
        Check("casimir", "k-re", lambda c: cs.verify_k_re(c.alg), degree=(2, 2)),
    ]
    for n in range(1, min(d, 2) + 1):
        out.append(Check("casimir", "k-action", lambda c, n=n: cs.verify_k_action(n, c.alg), {"n": n}, sites=n + 1, degree=(n + 1, 1)))
    if d >= 3:
        out.append(Check("casimir", "k-general-action", lambda c: cs.verify_k_general_action(2, 2, c.alg), {"n": 2, "p": 2}, sites=4, degree=(4, 2)))
    for n in range(1, d + 1):
        out.append(Check("casimir", "k-under-over", lambda c, n=n: cs.verify_k_under_over(n, c.alg), {"n": n}, sites=n, degree=(n, n)))
    for p in range(1, min(d, 2) + 1):
        for n in range(1, d + 1):
            out.append(
                Check("casimir", "casimir-stability", lambda c, p=p, n=n: _casimir_stability(c, p, n), {"p": p, "n": n}, sites=max(p, n), degree=(n + 1, p))
            )
    return out


# -- ordering -------------------------------------------------------------


def _reorder_cross_check(ctx):
    """The leftmost rewriting and the basis reduction give the same element."""
    alg = ctx.alg
    free = alg.free
    N = ctx.N
    words = [
        free.d(1, 1) * free.m(1, 1),
        free.d(1, N) * free.m(N, 1) * free.m(1, N),
        free.d(N, 1) * free.d(1, 1) * free.m(1, N),
        free.m(1, 1) * free.d(1, N) * free.m(N, N) * free.d(N, 1),
    ]
    res = []
    for p in words:
        s = reorder_normal(p, alg)
        if not s.is_split():
            return CheckResult(False, f"rewriting left a non-split word in {p}")
        res.append((str(p), alg_equal(p, s, alg)))
    return _all_ok(res)


def _ordering(ctx):
    d = ctx.depth
    out = [
        Check("ordering", "definition-base", lambda c: cs.verify_definition_base(c.alg), degree=(1, 1)),
        Check("ordering", "ordered-pair", lambda c: cs.verify_ordered_pair(c.alg), degree=(2, 2)),
        Check("ordering", "rewrite-cross-check", _reorder_cross_check, degree=(2, 2)),
    ]
    for m, n in ((1, 2), (1, 3), (2, 3)):
        if n <= d:
            out.append(Check("ordering", "d-l-ordering", lambda c, m=m, n=n: cs.verify_d_l_ordering(m, n, c.alg), {"m": m, "n": n}, sites=n, degree=(1, 2)))
    for k in range(1, d + 1):
        out.append(Check("ordering", "ordered-chain", lambda c, k=k: cs.verify_ordered_chain(k, c.alg), {"k": k}, sites=k, degree=(k, k)))
    return out


# -- wick -----------------------------------------------------------------


def _wick(ctx):
    d = ctx.depth
    out = []
    for k in range(1, d + 1):
        out.append(Check("wick", "d-chain-l", lambda c, k=k: cs.verify_d_chain_l(k, c.alg), {"k": k}, sites=k + 1, degree=(1, k + 1)))
    for k in range(1, d + 1):
        out.append(Check("wick", "wick-step", lambda c, k=k: cs.verify_wick(k, c.alg), {"k": k}, sites=k + 1, degree=(k + 1, k + 1)))
    return out


# -- capelli --------------------------------------------------------------


def _projected(ctx, k):
    res = []
    for lam in partitions(k):
        for T in standard_tableaux(lam):
            res.append((f"T = {T}", cs.verify_projected_capelli(T, ctx.alg)))
    return _all_ok(res)


def _capelli(ctx):
    d = ctx.depth
    out = []
    for k in range(1, 5):
        out.append(Check("capelli", "p-forms", lambda c, k=k: cs.verify_p_forms(k, c.R), {"k": k}, sites=k, generic=True))
    if ctx.kind == "standard":
        for k in range(2, 5):
            out.append(
                Check("capelli", "classical-p-limit", lambda c, k=k: cs.verify_classical_p_limit(k, c.R), {"k": k}, sites=k, exact_only=True)
            )
    for k in range(2, d + 1):
        out.append(Check("capelli", "capelli-identity", lambda c, k=k: cs.verify_capelli(k, c.alg), {"k": k}, sites=k, degree=(k, k)))
    for k in range(1, d + 1):
        out.append(Check("capelli", "projected", lambda c, k=k: _projected(c, k), {"k": k}, sites=k, degree=(k, k), generic=True))
    return out


# -- ordered casimir ------------------------------------------------------


def _ordered_casimir_check(ctx):
    res = cs.verify_ordered_casimir(coxeter_element(ctx.field, 2), ctx.alg)
    if res:
        c = cs.ordered_casimir_mixing(ctx.alg)
        res.detail["mixing"] = "absent" if c is None else str(c)
    return res


def _ordered_casimir(ctx):
    return [
        Check("ordered-casimir", "ordered-trace-l2", _ordered_casimir_check, {"k": 2}, degree=(3, 3)),
    ]


REGISTRY = {
    "symmetry": _symmetry,
    "flatness": _flatness,
    "central": _central,
    "schur": _schur,
    "laplace": _laplace,
    "casimir": _casimir,
    "ordering": _ordering,
    "wick": _wick,
    "capelli": _capelli,
    "ordered-casimir": _ordered_casimir,
}


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    return str(x)


@dataclass
class CheckRecord:
    suite: str
    name: str
    params: dict
    status: str
    witness: str | None
    detail: dict
    timing: float
    qmode: str
    seed: int | None

    def key(self):
        """Everything except the timing."""
        d = asdict(self)
        d.pop("timing")
        return d


@dataclass
class Report:
    config: dict
    checks: list

    @property
    def counts(self) -> dict:
        out = {PASS: 0, FAIL: 0, SKIPPED: 0, ERROR: 0}
        for c in self.checks:
            out[c.status] += 1
        return out

    @property
    def ok(self) -> bool:
        n = self.counts
        return n[FAIL] == 0 and n[ERROR] == 0

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "checks": [asdict(c) for c in self.checks],
            "summary": self.counts,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        data = json.loads(text)
        return cls(data["config"], [CheckRecord(**c) for c in data["checks"]])

    def format_text(self) -> str:
        lines = []
        for c in self.checks:
            params = ",".join(f"{k}={v}" for k, v in c.params.items())
            head = f"{c.status.upper():7} {c.suite}/{c.name}"
            if params:
                head += f" [{params}]"
            lines.append(f"{head}  ({c.qmode}, {c.timing:.2f}s)")
            if c.witness:
                lines.append(f"        {c.witness}")
            if "warning" in c.detail:
                lines.append(f"        warning: {c.detail['warning']}")
        n = self.counts
        lines.append(f"{n[PASS]} passed, {n[FAIL]} failed, {n[SKIPPED]} skipped, {n[ERROR]} errors")
        return "\n".join(lines)


def _record(check: Check, ctx: Context, status, witness=None, detail=None, timing=0.0) -> CheckRecord:
    return CheckRecord(
        suite=check.suite,
        name=check.name,
        params=_jsonable(check.params),
        status=status,
        witness=witness,
        detail=_jsonable(detail or {}),
        timing=round(timing, 4),
        qmode=ctx.label,
        seed=ctx.seed,
    )


def _guard_reason(check: Check, ctx: Context) -> str | None:
    caps = ctx.config.caps
    site_cap = caps.max_sites if caps.max_sites is not None else max_sites()
    if check.sites > site_cap:
        return f"needs {check.sites} sites > site cap {site_cap}"
    if ctx.N ** check.sites > DEFAULT_MAX_DIM:
        return f"dimension {ctx.N}^{check.sites} exceeds {DEFAULT_MAX_DIM}"
    dm, dd = check.degree
    if dm > caps.max_m_degree:
        return f"needs m-degree {dm} > cap {caps.max_m_degree}"
    if dd > caps.max_del_degree:
        return f"needs d-degree {dd} > cap {caps.max_del_degree}"
    if check.generic and not getattr(ctx.field, "generic", True):
        return f"needs generic q (q0 = {ctx.q0})"
    if check.exact_only and not isinstance(ctx.field, ExactField):
        return "needs exact mode"
    return None


def run_check(check: Check, ctx: Context) -> CheckRecord:
    reason = _guard_reason(check, ctx)
    if reason:
        return _record(check, ctx, SKIPPED, reason)
    t0 = time.perf_counter()
    try:
        res = check.fn(ctx)
    except (DimensionGuardError, CapExceededError, RootOfUnityError) as exc:
        return _record(check, ctx, SKIPPED, str(exc), timing=time.perf_counter() - t0)
    except (cs.PMatrixError, NotSkewInvertibleError) as exc:
        return _record(check, ctx, FAIL, str(exc), timing=time.perf_counter() - t0)
    except Exception as exc:  # a crash in one check must not abort the run
        return _record(check, ctx, ERROR, f"{type(exc).__name__}: {exc}", timing=time.perf_counter() - t0)
    dt = time.perf_counter() - t0
    if res:
        return _record(check, ctx, PASS, None, res.detail, dt)
    return _record(check, ctx, FAIL, res.witness, res.detail, dt)


def _run_suite(suite: str, ctx: Context) -> list:
    try:
        checks = REGISTRY[suite](ctx)
    except Exception as exc:
        stub = Check(suite, "setup", None)
        return [_record(stub, ctx, ERROR, f"{type(exc).__name__}: {exc}")]
    return [run_check(c, ctx) for c in checks]


def make_contexts(config: RunConfig) -> list:
    kind, args = parse_rmatrix(config.rmatrix)
    N = _rmatrix_dim(kind, args)
    if N is None:
        # read the dimension once in exact mode to pick the default q-mode
        N = build_r(kind, args, ExactField()).dim
    points = parse_qmode(config.qmode, N)
    ctxs = []
    for label, q0, seed in points:
        try:
            field = make_field(q0)
        except RootOfUnityError as exc:
            raise ConfigError(str(exc)) from None
        try:
            R = build_r(kind, args, field)
        except PoleError as exc:
            raise ConfigError(f"R-matrix has a pole at {label}: {exc}") from None
        ctxs.append(Context(config, kind, args, field, R, label, q0, seed))
    return ctxs


def validate(config: RunConfig) -> None:
    for s in config.checks:
        if s not in REGISTRY:
            raise ConfigError(f"unknown suite {s!r}; known suites: {', '.join(SUITES)}")
    if config.output not in ("text", "json"):
        raise ConfigError("output must be text or json")
    if config.workers < 1:
        raise ConfigError("workers must be >= 1")
    if config.pole_policy not in ("warn", "error"):
        raise ConfigError("pole policy must be warn or error")
    caps = config.caps
    if caps.max_sites is not None and not 1 <= caps.max_sites <= max_sites():
        raise ConfigError(f"max_sites must lie in 1..{max_sites()} (RECALC_CAP_SITES)")
    if caps.max_m_degree < 1 or caps.max_del_degree < 1:
        raise ConfigError("degree caps must be positive")
    if config.depth is not None and config.depth < 1:
        raise ConfigError("depth must be positive")


def run(config: RunConfig) -> Report:
    """Run every requested suite at every q-point; failures never abort the run."""
    validate(config)
    ctxs = make_contexts(config)
    units = [(suite, ctx) for ctx in ctxs for suite in config.checks]
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        results = list(pool.map(lambda u: _run_suite(*u), units))
    records = [r for batch in results for r in batch]
    cfg = _jsonable(asdict(config))
    return Report(cfg, records)


# ---------------------------------------------------------------------------
# explain
# ---------------------------------------------------------------------------

EXPLAIN = {
    "symmetry": """\
Hecke symmetry certificates for R on V (x) V, each with an exactly zero residual:
  braid relation      R_1 R_2 R_1 = R_2 R_1 R_2            on V^(x)3
  Hecke condition     (q I - R)(q^-1 I + R) = 0
  skew-invertibility  Tr_2 R_12 Psi_23 = P_13, C = Tr_2 Psi
  trace identity      Tr_2(C_2 R_12) = I_1
In exact mode the q = 1 limit is also inspected (poles are reported).""",
    "flatness": """\
Dimension count for the quadratic quotients M(R) and D(R^-1): the degree-d
component has the classical dimension binom(N^2 + d - 1, d) (or the
supersymmetric count for GL(m|n)).""",
    "central": """\
Characteristic elements ch_n(z) = Tr_R(1..n)(rho_R(z) M_1 M_2..M_n), z in H_n(q),
commute with every generator m_i^j of M(R) (zero reduced commutator
coordinates).  Also checked: rho_R(z) may be placed on either side of the
chain, and p_k = ch_k(tau_(k-1)..tau_1) equals Tr_R M^k.""",
    "schur": """\
Schur elements s_lambda = ch_n(E_T) do not depend on the standard tableau T of
shape lambda, and multiply by the Littlewood-Richardson rule:
  s_(1) s_(1) = s_(2) + s_(1,1),   s_(1) s_(2) = s_(3) + s_(2,1).""",
    "laplace": """\
Generalized Laplacians D_Q = Tr_R(1..m)(Q(R) D_1..D_m) act on characteristic
elements through the counit of the double:
  D_Q |> ch_k(z) lies in the characteristic subalgebra, of degree k - m,
  and vanishes when k < m.
Cross-check of the action against the closed formula
  D_1 |> M_2..M_(k+1) = sum_s M_2..(omit M_s)..M_(k+1) R_1^-1..R_(s-1)^-1..R_1^-1.""",
    "casimir": """\
L = M D satisfies the modified reflection equation
  R L_1 R L_1 - L_1 R L_1 R = R L_1 - L_1 R,
the permutation relation R_1 L_1 R_1 M_1 = M_1 R_1 L_1 R_1^-1 + R_1 M_1, and
K = I - (q - q^-1) L satisfies R K_1 R K_1 = K_1 R K_1 R.  Action of K:
  K_(n+1) |> M_1..M_n = J_(n+1)^-1 M_1..M_n,
  K_(n+p)..K_(n+1) |> M_1..M_n = prod_i J_(n+i)^-1 prod_(s>=2) J_s^(up n) M_1..M_n,
underline and overline K chains agree, and the Casimirs Tr_R(Q(R) K_n..K_1)
map characteristic elements to characteristic elements of the same degree.""",
    "ordering": """\
Normal ordering :..: moves every derivative right of every m using the cross
relations without their constant term.  Checked:
  :D_1 M_2: = M_2 D_1 R_1^-2
  :L_1 L_2: = M_1 M_2 D_2 D_1 R_1^-2,  L_1 L_2 = :L_1 L_2: + L_1 R_1^-1
  :D_m L_n: = L_n D_m J_(n-m)^(up m) (J_(n-m+1)^-1)^(up m-1)
  :L_1..L_k: = M_1..M_k D_k..D_1 prod_s J_s^-1 (product on either side).""",
    "wick": """\
Quantum Wick theorem, one step at a time:
  D_k..D_1 L_(k+1) = L_(k+1) D_k..D_1 J_(k+1)^-1 + D_k..D_1 P_(k+1)
  :L_1..L_k: L_(k+1) = :L_1..L_(k+1): + :L_1..L_k: P_(k+1)
with P_k = (I - J_k^-1)/(q - q^-1).""",
    "capelli": """\
Matrix Capelli identity
  L_1 (L_2 - P_2)..(L_k - P_k) = M_1..M_k D_k..D_1 prod_s J_s^-1,
P_k = (I - J_k^-1)/(q - q^-1) = R_(k-1)^-1 + sum_s R^-1_(k-1->s+1) R_s^-1 R^-1_(s+1->k-1)
(both forms compared), P_k at q = 1 is the sum of transpositions (i, k), and
projecting with E_T collapses prod J_s^-1 to prod q^(-2 c_s(T)).""",
    "ordered-casimir": """\
The ordered Casimir :Tr_R L^2: = Tr_R(R_1 :L_1 L_2:) commutes with every
generator l_i^j and is a combination of Casimirs:
  :Tr_R L^2: = Tr_R L^2 + c Tr_R L,
with c solved by linear algebra and recorded.""",
}


def explain(name: str) -> str:
    if name not in EXPLAIN:
        raise ConfigError(f"unknown suite {name!r}; known suites: {', '.join(SUITES)}")
    return EXPLAIN[name]


# ---------------------------------------------------------------------------
# argparse entry point
# ---------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="recalc", description="Verify RE-algebra identities for a Hecke symmetry.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run verification suites")
    r.add_argument("--rmatrix", default="standard:2", help="standard:N | flip:N | super:m,n | file:path")
    r.add_argument("--qmode", default=None, help="exact | specialized:q0 | random:seed,count")
    r.add_argument("--checks", default="all", help="comma-separated suites, or 'all'")
    r.add_argument("--max-sites", type=int, default=None)
    r.add_argument("--max-m-degree", type=int, default=4)
    r.add_argument("--max-del-degree", type=int, default=4)
    r.add_argument("--depth", type=int, default=None, help="largest chain length tested (default 3, or 2 for N >= 3)")
    r.add_argument("--output", choices=("text", "json"), default="text")
    r.add_argument("--json-out", default=None, help="also write the JSON report here")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--pole-policy", choices=("warn", "error"), default="warn")
    e = sub.add_parser("explain", help="print what a suite verifies")
    e.add_argument("suite")
    return p


def config_from_args(ns) -> RunConfig:
    checks = list(SUITES) if ns.checks == "all" else [c.strip() for c in ns.checks.split(",") if c.strip()]
    return RunConfig(
        rmatrix=ns.rmatrix,
        qmode=ns.qmode,
        checks=checks,
        caps=Caps(ns.max_sites, ns.max_m_degree, ns.max_del_degree),
        output=ns.output,
        workers=ns.workers,
        depth=ns.depth,
        pole_policy=ns.pole_policy,
    )


def main(argv=None) -> int:
    ns = _parser().parse_args(argv)
    try:
        if ns.command == "explain":
            print(explain(ns.suite))
            return 0
        report = run(config_from_args(ns))
    except ConfigError as exc:
        print(f"recalc: {exc}", file=sys.stderr)
        return 2
    if ns.output == "json":
        print(report.to_json())
    else:
        print(report.format_text())
    if ns.json_out:
        try:
            with open(ns.json_out, "w", encoding="utf-8") as fh:
                fh.write(report.to_json())
        except OSError as exc:
            print(f"recalc: cannot write report: {exc}", file=sys.stderr)
            return 2
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
