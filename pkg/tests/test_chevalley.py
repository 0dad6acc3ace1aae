import itertools

import numpy as np
import pytest
from fractions import Fraction

from wordlab.chevalley import (
    BasisLabel,
    MatrixAlgebra,
    algebra_make,
    group_make,
    killing_matrix,
    mat_adjugate_packed,
    mat_det_packed,
    mat_identity_packed,
    mat_mul_packed,
    parse_carrier_literal,
    root_classify,
    unipotent_cover_fraction,
)
from wordlab.rings import BudgetExceeded, ring_make
from wordlab.words import AssocWord

from oracles import eval_assoc_word

ALL_SMALL = [("A", 1), ("A", 2), ("A", 3), ("B", 2), ("B", 3),
             ("C", 2), ("C", 3), ("D", 3), ("D", 4)]


# -- construction and dimensions --

def test_dimensions():
    expect = {("A", 1): 3, ("A", 2): 8, ("A", 3): 15,
              ("B", 2): 10, ("B", 3): 21,
              ("C", 2): 10, ("C", 3): 21,
              ("D", 3): 15, ("D", 4): 28}
    for key, d in expect.items():
        alg = algebra_make(*key)
        assert alg.dim == d
        assert alg.matrices.shape == (d, alg.matrix_size, alg.matrix_size)


def test_rank_minima_and_bad_family():
    for fam, bad_rank in [("A", 0), ("B", 1), ("C", 1), ("D", 2)]:
        with pytest.raises(ValueError):
            algebra_make(fam, bad_rank)
    with pytest.raises(ValueError):
        algebra_make("E", 8)


@pytest.mark.parametrize("fam,rank", ALL_SMALL)
def test_construction_runs_exhaustive_checks(fam, rank):
    # algebra_make asserts antisymmetry, Jacobi on every basis triple,
    # membership of every bracket in the basis span, and Killing invariance
    alg = algebra_make(fam, rank)
    assert alg.dim <= 200
    assert (alg.structure == -alg.structure.transpose(1, 0, 2)).all()


def test_type_a_cartan_matrices():
    alg = algebra_make("A", 2)
    for i in (1, 2):
        m = alg.matrices[alg.index(f"h{i}")]
        expect = np.zeros((3, 3), dtype=np.int64)
        expect[i - 1, i - 1] = 1
        expect[i, i] = -1
        assert (m == expect).all()


def test_bracket_matches_matrices():
    rng = np.random.default_rng(11)
    for fam, rank in [("A", 1), ("B", 2), ("C", 2), ("D", 3)]:
        alg = algebra_make(fam, rank)
        for _ in range(5):
            u = rng.integers(-3, 4, size=alg.dim)
            v = rng.integers(-3, 4, size=alg.dim)
            mu = np.einsum("i,ikl->kl", u, alg.matrices)
            mv = np.einsum("i,ikl->kl", v, alg.matrices)
            direct = mu @ mv - mv @ mu
            via_tensor = np.einsum("l,lkm->km", alg.bracket_vector(u, v), alg.matrices)
            assert (direct == via_tensor).all()


# -- Killing form --

def test_killing_sl2():
    alg = algebra_make("A", 1)
    k = killing_matrix(alg)
    e, f, h = alg.index("e1_2"), alg.index("e2_1"), alg.index("h1")
    assert k[h, h] == 8
    assert k[e, f] == 4
    assert k[e, e] == 0
    assert alg.bad_primes == (2,)


def test_killing_sl3_is_six_times_trace_form():
    alg = algebra_make("A", 2)
    trace_form = np.einsum("ikl,jlk->ij", alg.matrices, alg.matrices)
    assert (alg.killing == 6 * trace_form).all()
    assert (alg.killing % 2 == 0).all()
    assert alg.bad_primes == (2, 3)


def test_killing_invariance_explicit():
    alg = algebra_make("C", 2)
    k = alg.killing
    c = alg.structure
    lhs = np.einsum("ijm,ml->ijl", c, k)
    rhs = np.einsum("ilm,jm->ijl", c, k)
    assert not (lhs + rhs).any()


# -- root metadata --

def test_root_classify_examples():
    assert root_classify(algebra_make("A", 2), "e1_3") == {
        "rtype": "a", "height": 2, "sign": 1}
    assert root_classify(algebra_make("A", 2), "e3_1") == {
        "rtype": "a", "height": 2, "sign": -1}
    # long root 2*eps_1 of sp_4
    assert root_classify(algebra_make("C", 2), "b1_1") == {
        "rtype": "b", "height": 3, "sign": 1}
    # short root eps_1 of so_5
    assert root_classify(algebra_make("B", 2), "c1") == {
        "rtype": "c", "height": 2, "sign": 1}
    assert root_classify(algebra_make("B", 2), "h1")["rtype"] == "cartan"


def test_root_counts_by_type():
    alg = algebra_make("B", 2)
    kinds = {}
    for lbl in alg.labels:
        kinds[lbl.rtype] = kinds.get(lbl.rtype, 0) + 1
    assert kinds == {"a": 2, "b": 2, "c": 4, "cartan": 2}


def test_heights_symmetric_under_negation():
    for fam, rank in ALL_SMALL:
        alg = algebra_make(fam, rank)
        by_eps = {lbl.eps: lbl for lbl in alg.labels if lbl.kind == "root"}
        for eps, lbl in by_eps.items():
            neg = tuple(sorted((i, -c) for i, c in eps))
            assert by_eps[neg].height == -lbl.height
            assert by_eps[neg].rtype == lbl.rtype


# -- matrix algebra carrier --

def test_matrix_algebra_tensors():
    mat = MatrixAlgebra(2)
    assert mat.dim == 4
    i12 = mat.label_names.index("E1_2")
    i21 = mat.label_names.index("E2_1")
    i11 = mat.label_names.index("E1_1")
    assert mat.product[i12, i21, i11] == 1
    assert mat.product[i12, i21].sum() == 1
    assert (mat.structure == -mat.structure.transpose(1, 0, 2)).all()
    t = np.einsum("ijm,mkl->ijkl", mat.structure, mat.structure)
    jac = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
    assert not jac.any()


def test_standard_identity_degree4_on_m2():
    # alternating sum over S_4 of x_{s(1)} x_{s(2)} x_{s(3)} x_{s(4)}
    # vanishes identically on 2 x 2 matrices; multilinearity reduces the
    # check to basis tuples
    s4 = _standard_identity_4()
    basis = MatrixAlgebra(2).matrices
    for combo in itertools.product(range(4), repeat=4):
        mats = [basis[c] for c in combo]
        val = eval_assoc_word(s4, mats, 5)
        assert not val.any()


def _standard_identity_4() -> AssocWord:
    terms = {}
    for perm in itertools.permutations((1, 2, 3, 4)):
        inv = sum(1 for a, b in itertools.combinations(range(4), 2)
                  if perm[a] > perm[b])
        terms[tuple(perm)] = Fraction((-1) ** inv)
    return AssocWord.make(terms, 4)


def test_standard_identity_degree4_not_zero_on_m3():
    s4 = _standard_identity_4()
    basis = MatrixAlgebra(3).matrices
    hit = False
    for combo in itertools.product(range(9), repeat=4):
        if eval_assoc_word(s4, [basis[c] for c in combo], 5).any():
            hit = True
            break
    assert hit


# -- SL_n carriers --

def test_sl2_f3_order_and_identity():
    g = group_make(2, ring_make("fp", 3))
    assert g.order == 24
    eye = g.elements[g.identity_index]
    assert (eye == [1, 0, 0, 1]).all()
    cay = g.cayley()
    assert (cay[g.identity_index] == np.arange(24)).all()
    assert (cay[:, g.identity_index] == np.arange(24)).all()
    inv = g.inverse_perm()
    assert (cay[np.arange(24), inv] == g.identity_index).all()


def test_group_orders():
    assert group_make(2, ring_make("fp", 5)).order == 120
    assert group_make(2, ring_make("fp", 7)).order == 336
    assert group_make(3, ring_make("fp", 2)).order == 168
    assert group_make(2, ring_make("zmod", 3, 2)).order == 648


def test_cayley_associative_sample():
    g = group_make(2, ring_make("fp", 5))
    cay = g.cayley()
    rng = np.random.default_rng(3)
    a, b, c = (rng.integers(0, g.order, size=500) for _ in range(3))
    assert (cay[cay[a, b], c] == cay[a, cay[b, c]]).all()


def test_order_growth_one_level():
    # |SL_2(Z/p^{k+1})| = p^3 |SL_2(Z/p^k)| on every enumerable pair
    cases = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)]
    for p, k in cases:
        small = group_make(2, ring_make("zmod", p, k) if k > 1 else ring_make("fp", p))
        big = group_make(2, ring_make("zmod", p, k + 1))
        assert big.order == p**3 * small.order


def test_index_of_rejects_nonmembers():
    g = group_make(2, ring_make("fp", 3))
    with pytest.raises(ValueError):
        g.index_of(np.array([[1, 0, 0, 2]], dtype=np.int64))  # det 2


def test_group_budget():
    with pytest.raises(BudgetExceeded):
        group_make(3, ring_make("fp", 7))


def test_adjugate_inverse_sl3_z25():
    ring = ring_make("zmod", 5, 2)
    rng = np.random.default_rng(17)
    rows = 40
    a = mat_identity_packed(ring, 3, rows)
    # random products of unitriangular matrices stay in SL_3
    for _ in range(4):
        upper = mat_identity_packed(ring, 3, rows)
        lower = mat_identity_packed(ring, 3, rows)
        for (i, j) in [(0, 1), (0, 2), (1, 2)]:
            upper[:, i * 3 + j] = rng.integers(0, 25, size=rows)
            lower[:, j * 3 + i] = rng.integers(0, 25, size=rows)
        a = mat_mul_packed(ring, 3, a, mat_mul_packed(ring, 3, upper, lower))
    assert (mat_det_packed(ring, 3, a) == 1).all()
    inv = mat_adjugate_packed(ring, 3, a)
    assert (mat_mul_packed(ring, 3, a, inv) == mat_identity_packed(ring, 3, rows)).all()
    assert (mat_mul_packed(ring, 3, inv, a) == mat_identity_packed(ring, 3, rows)).all()


def test_det_matches_scalar_oracle():
    ring = ring_make("zmod", 2, 3)
    rng = np.random.default_rng(5)
    a = rng.integers(0, 8, size=(50, 9)).astype(np.int64)
    dets = mat_det_packed(ring, 3, a)
    for row, d in zip(a, dets):
        m = row.reshape(3, 3).astype(object)
        ref = (m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
               - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
               + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]))
        assert d == ref % 8


# -- unipotent covering walks --

def test_cover_fraction_first_step():
    assert unipotent_cover_fraction(1, 3, 1) == Fraction(3, 24)
    assert unipotent_cover_fraction(1, 5, 1) == Fraction(5, 120)


def test_cover_fraction_monotone_until_full():
    prev = Fraction(0)
    for steps in range(1, 14):
        frac = unipotent_cover_fraction(1, 3, steps)
        assert frac >= prev
        prev = frac
    assert prev == 1


def test_cover_fraction_full_at_13():
    assert unipotent_cover_fraction(1, 3, 13) == 1
    assert unipotent_cover_fraction(1, 5, 13) == 1


# -- carrier literals --

def test_parse_carrier_literal():
    kind, alg = parse_carrier_literal("A:2")
    assert kind == "algebra" and alg.name == "sl_3"
    kind, alg = parse_carrier_literal("C:2")
    assert kind == "algebra" and alg.name == "sp_4"
    kind, mat = parse_carrier_literal("mat:3")
    assert kind == "mat" and mat.dim == 9
    assert parse_carrier_literal("sl:3") == ("group", 3)
    for bad in ("E:8", "A", "mat:x", "sl"):
        with pytest.raises(ValueError):
            parse_carrier_literal(bad)


def test_label_str():
    lbl = BasisLabel("e1_2", "root", ((1, 1), (2, -1)), 1, "a")
    assert str(lbl) == "e1_2"
