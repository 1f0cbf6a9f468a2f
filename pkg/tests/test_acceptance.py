"""Acceptance gate: one test per criterion, each printing a single PASS/FAIL line.

Run alone with ``python3 tests/test_acceptance.py`` or as part of pytest
(the lines are repeated in the terminal summary).
"""

import functools
import random
import sys
import time

from recalc import charsub as cs
from recalc.arith import ExactField, make_field, parse_scalar, random_q0
from recalc.cli import RunConfig, run
from recalc.double import act, alg_equal, double_algebra, flat_dimension, is_central, char_membership
from recalc.hecke import HeckeElement, all_perms, coxeter_element, partitions, standard_tableaux
from recalc.ncalg import M
from recalc.tensor import (
    TensorOp,
    check_braid,
    check_hecke,
    dj_r_matrix,
    dj_super_r_matrix,
    skew_inverse,
    skew_residual,
    trace_identity_residual,
)

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # running as a script from elsewhere
    ACCEPTANCE_LINES = []

F = ExactField()


def _points(seed, count=3):
    rng = random.Random(seed)
    return [random_q0(rng) for _ in range(count)]


def criterion(number, title, budget=None):
    def wrap(fn):
        @functools.wraps(fn)
        def inner(*args, **kwargs):
            t0 = time.perf_counter()
            status = "FAIL"
            try:
                fn(*args, **kwargs)
                dt = time.perf_counter() - t0
                assert budget is None or dt < budget, f"took {dt:.1f}s, budget {budget}s"
                status = "PASS"
            finally:
                dt = time.perf_counter() - t0
                line = f"CRITERION {number}: {status} ({dt:.2f}s) {title}"
                ACCEPTANCE_LINES.append(line)
                print(line)

        return inner

    return wrap


def _basis(field, n):
    return [HeckeElement.basis(field, n, w) for w in all_perms(n)]


def _ok(res, what):
    assert res, f"{what}: {res.witness}"


@criterion(1, "symmetry certificates, N=2 exact and N=3,4 at 3 random q0", budget=5)
def test_criterion_1_symmetry():
    Rs = [dj_r_matrix(F, 2)] + [dj_r_matrix(make_field(q0), N) for N in (3, 4) for q0 in _points(N)]
    for R in Rs:
        assert check_braid(R).is_zero()
        assert check_hecke(R).is_zero()
        sk = skew_inverse(R)
        assert skew_residual(R, sk.psi).is_zero()
        assert trace_identity_residual(R, sk.c).is_zero()


@criterion(2, "flatness dimensions of M(R) and D(R^-1), N=2, d<=4", budget=60)
def test_criterion_2_flatness():
    alg = double_algebra(dj_r_matrix(F, 2))
    for tower in (alg.Mq, alg.Dq):
        assert [tower.dim(d) for d in range(1, 5)] == [flat_dimension(2, d) for d in range(1, 5)] == [4, 10, 20, 35]


@criterion(3, "ch_n(T_w) central in M(R), n<=3, N=2 exact and N=3 specialized")
def test_criterion_3_centrality():
    algs = [double_algebra(dj_r_matrix(F, 2))]
    algs += [double_algebra(dj_r_matrix(make_field(q0), 3)) for q0 in _points(3)]
    for alg in algs:
        for n in (1, 2, 3):
            for z in _basis(alg.field, n):
                _ok(is_central(cs.ch(z, n, M, alg).value, "M", alg), f"N={alg.N} {z}")


@criterion(4, "Schur tableau-independence for partitions of 3 and LR identities, N=2")
def test_criterion_4_schur():
    alg = double_algebra(dj_r_matrix(F, 2))
    for lam in partitions(3):
        vals = [cs.schur(T, alg).value for T in standard_tableaux(lam)]
        for v in vals[1:]:
            _ok(alg_equal(vals[0], v, alg), f"shape {lam}")

    def s(t):
        return cs.schur([[int(x) for x in r.split(",")] for r in t.split(";")], alg).value

    _ok(alg_equal(s("1") * s("1"), s("1,2") + s("1;2"), alg), "s1 s1")
    _ok(alg_equal(s("1") * s("1,2"), s("1,2,3") + s("1,2;3"), alg), "s1 s2")


@criterion(5, "Laplacian stability p1(D) |> ch_k(z), k<=3, and vanishing for m>k, N=2")
def test_criterion_5_laplace():
    alg = double_algebra(dj_r_matrix(F, 2))
    for k in (1, 2, 3):
        for z in _basis(F, k):
            _ok(cs.verify_laplace_stability(HeckeElement.one(F, 1), z, alg), f"k={k} {z}")
    for m in (2, 3):
        for k in range(1, m):
            for z in _basis(F, k):
                res = act(cs.laplacian(coxeter_element(F, m), alg).value, cs.ch(z, k, M, alg).value, alg)
                assert res.is_zero(), f"p_{m}(D) |> ch_{k} = {res}"
    # a frozen value: p1(D) |> p1(M) = q^-5 + q^-7
    r = act(cs.laplacian(HeckeElement.one(F, 1), alg).value, cs.power_sum(1, M, alg).value, alg)
    assert r == alg.scalar(parse_scalar("q^-5 + q^-7"))
    assert char_membership(r, alg)


@criterion(6, "modified RE, L-M permutation, K action, under/over, Casimir stability, N=2")
def test_criterion_6_k_layer():
    alg = double_algebra(dj_r_matrix(F, 2))
    _ok(cs.verify_mre(alg), "modified RE")
    _ok(cs.verify_l_m_permutation(alg), "L-M permutation")
    for n in (1, 2):
        _ok(cs.verify_k_action(n, alg), f"K action n={n}")
    _ok(cs.verify_k_general_action(2, 2, alg), "K general action p=n=2")
    for n in (1, 2, 3):
        _ok(cs.verify_k_under_over(n, alg), f"under/over n={n}")
    for p in (1, 2):
        Q = coxeter_element(F, p)
        for n in (1, 2, 3):
            for z in _basis(F, n):
                _ok(cs.verify_casimir_stability(Q, z, alg), f"Casimir p={p} on {z}")


@criterion(7, "normal ordering base case, D-L instances, ordered chains k<=3 and GL(1|1) k=2")
def test_criterion_7_ordering():
    alg = double_algebra(dj_r_matrix(F, 2))
    _ok(cs.verify_definition_base(alg), "base case")
    for m, n in ((1, 2), (1, 3), (2, 3)):
        _ok(cs.verify_d_l_ordering(m, n, alg), f"(m,n)=({m},{n})")
    for k in (1, 2, 3):
        _ok(cs.verify_ordered_chain(k, alg), f"k={k}")
    sup = double_algebra(dj_super_r_matrix(F, 1, 1))
    _ok(cs.verify_ordered_chain(2, sup), "GL(1|1) k=2")


@criterion(8, "Wick steps k<=3 at N=2 exact and k=2 at N=3 specialized")
def test_criterion_8_wick():
    alg = double_algebra(dj_r_matrix(F, 2))
    for k in (1, 2, 3):
        _ok(cs.verify_d_chain_l(k, alg), f"D chain k={k}")
        _ok(cs.verify_wick(k, alg), f"Wick k={k}")
    alg3 = double_algebra(dj_r_matrix(make_field(_points(8, 1)[0]), 3))
    _ok(cs.verify_d_chain_l(2, alg3), "N=3 D chain k=2")
    _ok(cs.verify_wick(2, alg3), "N=3 Wick k=2")


@criterion(9, "Capelli identity, P forms, classical limit and projections", budget=600)
def test_criterion_9_capelli():
    R = dj_r_matrix(F, 2)
    alg = double_algebra(R)
    for k in (2, 3):
        _ok(cs.verify_capelli(k, alg), f"Capelli k={k}")
    for q0 in _points(9):
        _ok(cs.verify_capelli(2, double_algebra(dj_r_matrix(make_field(q0), 3))), f"N=3 q0={q0}")
    for k in (1, 2, 3, 4):
        _ok(cs.verify_p_forms(k, R), f"P forms k={k}")
    for k in (2, 3, 4):
        _ok(cs.verify_classical_p_limit(k, R), f"classical P k={k}")
    for k in (1, 2, 3):
        for lam in partitions(k):
            for T in standard_tableaux(lam):
                _ok(cs.verify_projected_capelli(T, alg), f"projection {T}")


@criterion(10, "ordered Casimir :Tr_R L^2: central and in the Casimir span, N=2")
def test_criterion_10_ordered_casimir():
    alg = double_algebra(dj_r_matrix(F, 2))
    res = cs.verify_ordered_casimir(coxeter_element(F, 2), alg)
    _ok(res, "ordered Casimir")
    # regression: :Tr_R L^2: = Tr_R L^2 + c Tr_R L with c = -Tr C
    c = cs.ordered_casimir_mixing(alg)
    assert c == parse_scalar("-q^-1 - q^-3"), c
    assert res.detail["coefficients"] == {"C1[1]": str(c), "C2[21]": "1"}


@criterion(11, "falsification: perturbed matrices fail symmetry, Capelli with P_2 = 0 fails")
def test_criterion_11_falsification():
    from importlib.resources import files

    corpus = sorted(p for p in files("recalc").joinpath("data/falsification").iterdir() if p.name.endswith(".json"))
    assert len(corpus) >= 3
    for path in corpus:
        rep = run(RunConfig(rmatrix=f"file:{path}", checks=["symmetry"]))
        assert rep.exit_code == 1, path.name
        assert any(c.status == "fail" and c.witness for c in rep.checks)
    alg = double_algebra(dj_r_matrix(F, 2))
    res = cs.verify_capelli(2, alg, p_override={2: TensorOp.zero(F, 2, 2)})
    assert not res and res.witness.startswith("entry [")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError as exc:
                failed += 1
                print(f"    {exc}")
    sys.exit(1 if failed else 0)
