import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wordlab.rings import (
    BudgetExceeded,
    NotUnitError,
    Ring,
    RingElement,
    enumerate_ring,
    is_prime,
    parse_ring_literal,
    reduce_level,
    ring_make,
    unit_inverse,
)


def test_primality():
    assert [n for n in range(2, 40) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
    assert is_prime(2**31 - 1)
    assert not is_prime(2**32 + 1)


def test_zmod9_units():
    R = ring_make("zmod", 3, k=2)
    assert R.size == 9
    assert len(R.units()) == 6


def test_tpoly_2_2_square():
    R = ring_make("tpoly", 2, k=2)
    one_plus_t = R.from_coeffs((1, 1))
    assert R.mul(one_plus_t, one_plus_t) == 1


def test_f4_default_modulus():
    # oracle: scan the four monic quadratics over F_2 by hand arithmetic
    def has_root(c0, c1):
        return any((x * x + c1 * x + c0) % 2 == 0 for x in (0, 1))

    irreducible = [(c0, c1) for c0 in (0, 1) for c1 in (0, 1) if not has_root(c0, c1)]
    assert irreducible == [(1, 1)]
    F4 = ring_make("fq", 2, r=2)
    assert F4.modulus == (1, 1, 1)
    assert F4.size == 4


def test_reducible_modulus_rejected():
    with pytest.raises(ValueError):
        ring_make("fq", 2, r=2, modulus=(1, 0, 1))  # t^2+1 = (t+1)^2 over F_2


def test_galois_rings_rejected():
    with pytest.raises(ValueError):
        ring_make("zmod", 3, k=2, r=2)


def test_nonprime_rejected():
    with pytest.raises(ValueError):
        ring_make("fp", 6)


def test_unit_inverse_examples():
    Z9 = ring_make("zmod", 3, k=2)
    assert Z9.inv(2) == 5
    T3 = ring_make("tpoly", 3, k=2)
    assert T3.inv(T3.from_coeffs((1, 1))) == T3.from_coeffs((1, 2))
    with pytest.raises(NotUnitError):
        Z9.inv(3)
    x = RingElement(Z9, 2)
    assert unit_inverse(x).value == 5


def test_reduce_level_examples():
    Z9 = ring_make("zmod", 3, k=2)
    assert reduce_level(RingElement(Z9, 7), 1).value == 1
    T3 = ring_make("tpoly", 3, k=2)
    assert reduce_level(RingElement(T3, T3.from_coeffs((1, 2))), 1).value == 1
    x = RingElement(Z9, 7)
    assert reduce_level(x, 2) == x


def test_enumeration_order():
    assert [e.value for e in enumerate_ring(ring_make("fp", 3))] == [0, 1, 2]
    T = ring_make("tpoly", 2, k=2)
    assert [str(e) for e in enumerate_ring(T)] == ["0", "1", "t", "1+t"]
    Z25 = ring_make("zmod", 5, k=2)
    elems = [e.value for e in enumerate_ring(Z25)]
    assert len(elems) == 25 and elems[0] == 0 and elems[-1] == 24


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded):
        list(enumerate_ring(ring_make("zmod", 2, k=30), budget=1000))


AXIOM_RINGS = [
    ("fp", 3, 1, 1),
    ("fp", 7, 1, 1),
    ("fq", 2, 1, 2),
    ("fq", 2, 1, 3),
    ("fq", 3, 1, 2),
    ("fq", 3, 1, 3),
    ("fq", 7, 1, 2),
    ("zmod", 2, 2, 1),
    ("zmod", 3, 3, 1),
    ("zmod", 5, 2, 1),
    ("zmod", 3, 5, 1),
    ("tpoly", 2, 2, 1),
    ("tpoly", 2, 4, 1),
    ("tpoly", 3, 3, 1),
    ("tpoly", 5, 2, 1),
    ("tpoly", 7, 2, 1),
]


@pytest.mark.parametrize("kind,p,k,r", AXIOM_RINGS)
def test_ring_axioms_exhaustive(kind, p, k, r):
    """Full associativity/commutativity/distributivity on every ring <= 256."""
    R = ring_make(kind, p, k=k, r=r)
    n = R.size
    assert n <= 256
    idx = np.arange(n)
    A = R.add_np(idx[:, None], idx[None, :]).astype(np.int16)
    M = np.array([[R.mul(a, b) for b in range(n)] for a in range(n)], dtype=np.int16)
    # closure and canonical form
    assert ((0 <= A) & (A < n)).all() and ((0 <= M) & (M < n)).all()
    # identities
    assert (A[0] == idx).all() and (M[1] == idx).all() and (M[0] == 0).all()
    # commutativity
    assert (A == A.T).all() and (M == M.T).all()
    # associativity: left[i,j,k] = op(op(i,j),k), right[i,j,k] = op(i,op(j,k))
    assert (A[A] == np.take(A, A, axis=1)).all()
    assert (M[M] == np.take(M, M, axis=1)).all()
    # additive inverses
    negs = np.array([R.neg(a) for a in range(n)])
    assert (A[idx, negs] == 0).all()
    # distributivity: a*(b+c) == a*b + a*c
    lhs = np.take(M, A, axis=1)
    rhs = A[M[:, :, None], M[:, None, :]]
    assert (lhs == rhs).all()
    # unit inverses, exhaustively
    for a in range(n):
        if R.is_unit(a):
            assert R.mul(a, R.inv(a)) == 1
        else:
            with pytest.raises(NotUnitError):
                R.inv(a)


@pytest.mark.parametrize("kind,p,k", [("zmod", 2, 4), ("zmod", 3, 3), ("tpoly", 2, 4), ("tpoly", 3, 3)])
def test_reduce_level_fibers(kind, p, k):
    """Level reduction is surjective with equal fibers of size p^(k-k')."""
    R = ring_make(kind, p, k=k)
    for k_new in range(1, k + 1):
        images = {}
        for a in range(R.size):
            images.setdefault(R.reduce_level(a, k_new), 0)
            images[R.reduce_level(a, k_new)] += 1
        assert len(images) == p**k_new
        assert set(images.values()) == {p ** (k - k_new)}


def test_reduce_level_is_homomorphism():
    R = ring_make("tpoly", 3, k=3)
    S = R.at_level(2)
    for a in range(0, R.size, 5):
        for b in range(0, R.size, 7):
            assert R.reduce_level(R.add(a, b), 2) == S.add(R.reduce_level(a, 2), R.reduce_level(b, 2))
            assert R.reduce_level(R.mul(a, b), 2) == S.mul(R.reduce_level(a, 2), R.reduce_level(b, 2))


@given(st.integers(0, 3**10 - 1), st.integers(0, 3**10 - 1), st.integers(0, 3**10 - 1))
@settings(max_examples=60, deadline=None)
def test_axioms_random_large_zmod(a, b, c):
    R = ring_make("zmod", 3, k=10)
    assert R.mul(a, R.add(b, c)) == R.add(R.mul(a, b), R.mul(a, c))
    assert R.add(a, R.neg(a)) == 0
    if R.is_unit(a):
        assert R.mul(a, R.inv(a)) == 1


@given(st.integers(0, 101**3 - 1), st.integers(0, 101**3 - 1))
@settings(max_examples=40, deadline=None)
def test_axioms_random_large_tpoly(a, b):
    R = ring_make("tpoly", 101, k=3)
    assert R.mul(a, b) == R.mul(b, a)
    assert R.sub(R.add(a, b), b) == a
    if R.is_unit(a):
        assert R.mul(a, R.inv(a)) == 1


def test_fq_frobenius_and_order():
    F8 = ring_make("fq", 2, r=3)
    for a in range(8):
        assert F8.pow(a, 8) == a  # x^q = x
    F27 = ring_make("fq", 3, r=3)
    for a in range(1, 27, 4):
        assert F27.pow(a, 26) == 1


def test_vectorized_matches_scalar():
    for R in (ring_make("fq", 3, r=2), ring_make("tpoly", 2, k=3), ring_make("zmod", 5, 2)):
        n = R.size
        a = np.repeat(np.arange(n), n)
        b = np.tile(np.arange(n), n)
        add_ref = np.array([R.add(x, y) for x, y in zip(a.tolist(), b.tolist())])
        mul_ref = np.array([R.mul(x, y) for x, y in zip(a.tolist(), b.tolist())])
        assert (R.add_np(a, b) == add_ref).all()
        assert (R.mul_np(a, b) == mul_ref).all()
        assert (R.neg_np(a) == np.array([R.neg(x) for x in a.tolist()])).all()


def test_ring_literals():
    assert parse_ring_literal("fp:5") == ring_make("fp", 5)
    assert parse_ring_literal("fq:2^3") == ring_make("fq", 2, r=3)
    assert parse_ring_literal("zmod:3^2") == ring_make("zmod", 3, k=2)
    assert parse_ring_literal("tpoly:3^2") == ring_make("tpoly", 3, k=2)
    with pytest.raises(ValueError):
        parse_ring_literal("gf:4")
