"""Solution counting over residue towers, checked against plain scans."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wordlab.pointcount import (
    count_affine_solutions,
    count_tpoly_solutions,
    count_zmod_solutions,
    jacobian_polymaps,
    partial_derivative,
)
from wordlab.polymaps import ideal_sl, jet_of_polymap, parse_polynomials
from wordlab.rings import BudgetExceeded, ring_make

import oracles

CUSP = parse_polynomials(["x1 x1 + x2 x2 x2"])
XY = parse_polynomials(["x1 x2"])
X2 = parse_polynomials(["x1 x1"])


# ---------------------------------------------------- formal derivatives


def test_partial_derivative_product_rule():
    pm = parse_polynomials(["x1 x1 x2 + 3 x1"])
    dx1 = partial_derivative(pm, 0)
    assert dict(dx1.coords[0]) == {(1, 1): 2, (0, 0): 3}
    dx2 = partial_derivative(pm, 1)
    assert dict(dx2.coords[0]) == {(2, 0): 1}


def test_jacobian_shape_and_entries():
    jac = jacobian_polymaps(XY)
    assert len(jac) == 2
    assert dict(jac[0].coords[0]) == {(0, 1): 1}
    assert dict(jac[1].coords[0]) == {(1, 0): 1}


def test_jacobian_of_determinant_ideal():
    jac = jacobian_polymaps(ideal_sl(2).equations)
    # d/dx1 (x1 x4 - x2 x3 - 1) = x4
    assert dict(jac[0].coords[0]) == {(0, 0, 0, 1): 1}
    assert dict(jac[1].coords[0]) == {(0, 0, 1, 0): -1}


# ---------------------------------------------------------- Z/p^k towers


def test_zmod_square_towers():
    assert count_zmod_solutions(X2, 3, 4) == [1, 3, 3, 9]
    assert count_zmod_solutions(X2, 5, 4) == [1, 5, 5, 25]


def test_zmod_matches_modular_scan():
    polys = {
        "x1 x1": {2: 1},
        "x1 x1 x1": {3: 1},
        "x1 x1 + 3 x1": {2: 1, 1: 3},
        "x1 x1 x1 + x1": {3: 1, 1: 1},
        "x1 x1 - 1": {2: 1, 0: -1},
    }
    for text, coeffs in polys.items():
        pm = parse_polynomials([text])
        for p in (2, 3, 5):
            got = count_zmod_solutions(pm, p, 4)
            want = [oracles.modular_solution_count(coeffs, p**j)
                    for j in range(1, 5)]
            assert got == want, (text, p)


def test_zmod_two_variable_scan():
    for p, k in ((2, 3), (3, 2)):
        got = count_zmod_solutions(XY, p, k)
        for j in range(1, k + 1):
            m = p**j
            want = sum(1 for x in range(m) for y in range(m) if x * y % m == 0)
            assert got[j - 1] == want


def test_zmod_sl2_orders():
    # |SL_2(Z/p^k)| = p^{3(k-1)} p (p^2 - 1)
    eq = ideal_sl(2).equations
    assert count_zmod_solutions(eq, 3, 2) == [24, 648]
    assert count_zmod_solutions(eq, 5, 3) == [120, 15000, 1875000]
    for p, k in ((3, 3), (7, 2)):
        got = count_zmod_solutions(eq, p, k)
        want = [p ** (3 * (j - 1)) * p * (p * p - 1) for j in range(1, k + 1)]
        assert got == want


def test_zmod_empty_fiber_stays_empty():
    pm = parse_polynomials(["x1 x1 - 2"])  # 2 is not a square mod 3
    assert count_zmod_solutions(pm, 3, 3) == [0, 0, 0]


def test_zmod_budget_refusal():
    with pytest.raises(BudgetExceeded):
        count_zmod_solutions(ideal_sl(2).equations, 5, 3, budget=100)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.tuples(st.integers(0, 4), st.integers(-3, 3)),
             min_size=1, max_size=4),
    st.sampled_from([2, 3]),
    st.integers(1, 3),
)
def test_zmod_random_polynomial_matches_scan(terms, p, k):
    coeffs = {}
    for e, c in terms:
        coeffs[e] = coeffs.get(e, 0) + c
    parts = []
    for e, c in coeffs.items():
        if not c:
            continue
        mon = " ".join(["x1"] * e) if e else ""
        parts.append(f"+ {c} {mon}".strip())
    if not parts:
        return
    pm = parse_polynomials([" ".join(parts)], n_vars=1)
    got = count_zmod_solutions(pm, p, k)
    want = [oracles.modular_solution_count(coeffs, p**j)
            for j in range(1, k + 1)]
    assert got == want


# ------------------------------------------------------- F_q[t]/t^k towers


def test_tpoly_square_tower():
    got = count_tpoly_solutions(X2, ring_make("fp", 5), 4)
    assert got == [1, 5, 5, 25]
    for j in range(1, 4):
        def eq(a, trunc=j):
            return oracles.tmul(a[0], a[0], 5, trunc)
        assert got[j - 1] == oracles.truncated_poly_count([eq], 5, j, 1)


def test_tpoly_xy_over_f2():
    got = count_tpoly_solutions(XY, ring_make("fp", 2), 2)
    def eq(a):
        return oracles.tmul(a[0], a[1], 2, 2)
    assert got == [3, 8]
    assert got[1] == oracles.truncated_poly_count([eq], 2, 2, 2)


def test_tpoly_cusp_tower_prime_field():
    got = count_tpoly_solutions(CUSP, ring_make("fp", 3), 4)
    assert got == [3, 15, 45, 135]
    for j in (1, 2, 3):
        def eq(a, trunc=j):
            x, y = a
            x2 = oracles.tmul(x, x, 3, trunc)
            y3 = oracles.tmul(oracles.tmul(y, y, 3, trunc), y, 3, trunc)
            return oracles.tadd(x2, y3, 3, trunc)
        assert got[j - 1] == oracles.truncated_poly_count([eq], 3, j, 2)


def test_tpoly_cusp_extension_fields():
    # 2 q^{m+1} - q^m for m >= 1: the cusp's level counts are a
    # polynomial in q, so extension towers pin the jet dimensions
    assert count_tpoly_solutions(CUSP, ring_make("fq", 3, r=2), 3) == [
        9, 153, 1377]
    got = count_tpoly_solutions(CUSP, ring_make("fq", 3, r=3), 2)
    q = 27
    assert got == [q, 2 * q * q - q]


def test_tpoly_sl2_orders():
    eq = ideal_sl(2).equations
    assert count_tpoly_solutions(eq, ring_make("fp", 3), 2) == [24, 648]
    assert count_tpoly_solutions(eq, ring_make("fp", 5), 3) == [
        120, 15000, 1875000]


def test_tpoly_budget_refusal():
    with pytest.raises(BudgetExceeded):
        count_tpoly_solutions(ideal_sl(2).equations, ring_make("fp", 5), 3,
                              budget=100)


# ------------------------------------------------- affine system counting


def test_affine_simple_system():
    pm = parse_polynomials(["x1 + x2", "x1 x2 - 1"])
    # x2 = -x1 and -x1^2 = 1; mod 5 the squares are {0, 1, 4}
    assert count_affine_solutions(pm, 5) == 2
    assert count_affine_solutions(pm, 3) == 0


def test_affine_free_tail_variables():
    pm = parse_polynomials(["x1 x1"], n_vars=3)
    assert count_affine_solutions(pm, 3) == 9


def test_affine_matches_full_scan():
    pm = parse_polynomials(["x1 x1 + x2 x3", "x2 + x3"])
    for p in (2, 3, 5):
        want = sum(1
                   for x in range(p) for y in range(p) for z in range(p)
                   if (x * x + y * z) % p == 0 and (y + z) % p == 0)
        assert count_affine_solutions(pm, p) == want


def test_affine_jet_taylor_counts():
    assert count_affine_solutions(jet_of_polymap(XY, 1, "taylor"), 2) == 8
    assert count_affine_solutions(jet_of_polymap(CUSP, 1, "taylor"), 3) == 15
    sl2_jet = jet_of_polymap(ideal_sl(2).equations, 2, "taylor")
    assert count_affine_solutions(sl2_jet, 5) == 1875000


def test_affine_budget_refusal():
    pm = parse_polynomials(["x1 x2 x3 x4"])
    with pytest.raises(BudgetExceeded):
        count_affine_solutions(pm, 7, budget=10)
