import pytest
from hypothesis import given, settings, strategies as st

from recalc.arith import ExactField
from recalc.linalg import rank_of
from recalc.ncalg import (
    DEL,
    M,
    PERM,
    RE_D,
    RE_M,
    FreeAlgebra,
    Generator,
    NcAlgError,
    OpMatrix,
    copy_overline,
    copy_underline,
    format_word,
    full_r_trace,
    gen_matrix,
    k_hat,
    l_hat,
    m_chain,
    r_trace_entries,
    relations,
)
from recalc.tensor import TensorOp, dj_r_matrix, inverse_r, r_at, skew_inverse

F = ExactField()
A = FreeAlgebra(F, 2)

words = st.lists(st.integers(0, 7), max_size=3).map(tuple)
polys = st.dictionaries(words, st.integers(-2, 2), max_size=3).map(lambda d: A.word((), 0) + sum((A.word(w, c) for w, c in d.items()), A.zero()))


@settings(max_examples=40, deadline=None)
@given(polys, polys, polys)
def test_free_algebra_ring_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()


def test_generator_naming():
    g = Generator(M, 1, 2)
    assert str(g) == "m[1,2]"
    assert Generator.from_id(g.id(2), 2) == g
    assert format_word((Generator(DEL, 2, 1).id(2), g.id(2)), 2) == "d[2,1]*m[1,2]"


def test_gen_matrix_and_l_hat():
    Mx = gen_matrix(A, M)
    assert Mx.entry(0, 1) == A.m(1, 2)
    L = l_hat(A)
    assert L.entry(0, 1) == A.m(1, 1) * A.d(1, 2) + A.m(1, 2) * A.d(2, 2)
    K = k_hat(A)
    assert K.entry(0, 0) == A.one() - (A.m(1, 1) * A.d(1, 1) + A.m(1, 2) * A.d(2, 1)).scale(F.gap)


def test_copies_by_conjugation(R2):
    Mx = gen_matrix(A, M)
    M1 = Mx.embed(1, 3)
    Ri = inverse_r(R2)
    R1, R2s = r_at(R2, 1, 3), r_at(R2, 2, 3)
    M2 = copy_overline(Mx, 2, R2, 3)
    assert (M2 - R1 @ M1 @ r_at(R2, 1, 3, inverse=True)).is_zero()
    M3 = copy_overline(Mx, 3, R2, 3)
    assert (M3 - R2s @ M2 @ r_at(R2, 2, 3, inverse=True)).is_zero()
    U2 = copy_underline(Mx, 2, R2, 3)
    assert (U2 - r_at(R2, 1, 3, inverse=True) @ M1 @ R1).is_zero()
    assert Ri is inverse_r(R2)


def test_copy_needs_enough_sites(R2):
    from recalc.tensor import TensorError

    with pytest.raises(TensorError):
        copy_overline(gen_matrix(A, M), 3, R2, 2)
    with pytest.raises(NcAlgError):
        copy_overline(m_chain(A, R2, 2), 1, R2, 2)


def test_scalar_operator_products(R2):
    Mx = gen_matrix(A, M).embed(1, 2)
    I = TensorOp.identity(F, 2, 2)
    assert ((I @ Mx) - Mx).is_zero()
    assert ((Mx @ I) - Mx).is_zero()
    assert ((R2 @ Mx) - (OpMatrix.from_tensor(A, R2) @ Mx)).is_zero()


def test_relation_counts(R2):
    # 16 quadratic relations each, spanning a 6-dimensional space: 16 - 10 = 6
    for kind in (RE_M, RE_D):
        rs = relations(kind, R2)
        assert rs.homogeneous
        assert rank_of(F, [p.terms for p in rs.relations]) == 6
    perm = relations(PERM, R2)
    assert not perm.homogeneous and (1, 1) in perm.bidegrees() and (0, 0) in perm.bidegrees()
    assert rank_of(F, [p.terms for p in perm.relations]) == 16


def test_rank_one_cross_relation():
    # N = 1: q^2 d m - m d - q = 0
    R1 = dj_r_matrix(F, 1)
    A1 = FreeAlgebra(F, 1)
    (p,) = relations(PERM, R1, A1).relations
    m, d = A1.m(1, 1), A1.d(1, 1)
    target = (d * m).scale(F.qpow(2)) - m * d - A1.scalar(F.q)
    assert p == target or p == -target


def test_r_trace_entries_agrees_with_full_trace(R2):
    C = skew_inverse(R2).c
    X = m_chain(A, R2, 2)
    tr = r_trace_entries(X, [1, 2], C)
    assert tr == full_r_trace(TensorOp.identity(F, 2, 2), X, C)
    partial = r_trace_entries(X, [2], C)
    assert r_trace_entries(partial, [1], C) == tr
