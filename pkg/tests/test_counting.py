"""Exact measures, transforms and diagnostics on coded carriers."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wordlab.chevalley import algebra_make, group_make
from wordlab.counting import (
    DiagnosticSeries,
    GroupSpace,
    Measure,
    ModuleSpace,
    SeriesRow,
    additive_fourier,
    batched_field_rank,
    centralizer_size,
    centralizer_sizes_all,
    commutator_fourier_check,
    convolution_power,
    cyclotomic_as_int,
    epsilon_flat_estimate,
    fiber_count,
    flatness_scan,
    fourier_invert,
    hx_sequence,
    l2_distance_squared,
    la_distance_to_uniform,
    lct_estimate_via_jets,
    measure_convolve,
    measures_equal,
    mixing_time,
    point_measure,
    uniform_measure,
    upsilon_count,
    word_fiber_vector,
    word_measure_exact,
    word_measure_sampled,
)
from wordlab.polymaps import ideal_from_strings, ideal_sl
from wordlab.rings import BudgetExceeded, ring_make
from wordlab.words import parse_word

import oracles

SL2 = algebra_make("A", 1)
SL3 = algebra_make("A", 2)
COMM_LIE = parse_word("[x1, x2]", "lie")
DOUBLE_COMM = parse_word("[x1, x2] + [x3, x4]", "lie")
COMM_GRP = parse_word("x1 x2 x1^-1 x2^-1", "group")
SQUARE_GRP = parse_word("x1 x1", "group")
F3 = ring_make("fp", 3)
F5 = ring_make("fp", 5)


def comm_measure(p):
    return word_measure_exact(COMM_LIE, SL2, ring_make("fp", p))


# -------------------------------------------------------- spaces, measures


def test_module_space_codes_roundtrip():
    space = ModuleSpace(SL2, F3)
    codes = np.arange(space.size, dtype=np.int64)
    assert np.array_equal(space.encode(space.decode(codes)), codes)
    assert space.size == 27 and space.identity_code == 0


def test_module_space_rejects_non_module_carrier():
    with pytest.raises(ValueError):
        ModuleSpace(("group", 2), F3)


def test_measure_validation():
    space = ModuleSpace(SL2, F3)
    with pytest.raises(ValueError):
        Measure(space, np.ones(5, dtype=np.int64), 5)
    with pytest.raises(ValueError):
        Measure(space, np.ones(27, dtype=np.int64), 26)
    with pytest.raises(ValueError):
        Measure(space, np.ones(27, dtype=np.int64), 0)


def test_point_and_uniform_measures():
    space = ModuleSpace(SL2, F3)
    delta = point_measure(space)
    assert delta.mass(0) == 1 and delta.support().tolist() == [0]
    pi = uniform_measure(space)
    assert pi.is_uniform() and not delta.is_uniform()
    assert pi.mass(13) == Fraction(1, 27)


def test_measure_to_json_deterministic():
    mu = comm_measure(3)
    s1 = json.dumps(mu.to_json(), sort_keys=True)
    s2 = json.dumps(comm_measure(3).to_json(), sort_keys=True)
    assert s1 == s2
    back = json.loads(s1)
    assert back["denominator"] == 729
    assert sum(back["counts"]) == 729


# ----------------------------------------------------- batched linear rank


def _scalar_rank(ring, mat):
    """Plain row reduction with ring scalars, one matrix at a time."""
    rows = [[int(v) for v in row] for row in mat]
    m, n = len(rows), len(rows[0])
    rank = 0
    for c in range(n):
        piv = next((r for r in range(rank, m) if rows[r][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = ring.inv(rows[rank][c])
        rows[rank] = [int(ring.mul_np(np.int64(v), np.int64(inv)))
                      for v in rows[rank]]
        for r in range(m):
            if r != rank and rows[r][c]:
                f = rows[r][c]
                rows[r] = [
                    int(ring.sub_np(np.int64(v),
                                    ring.mul_np(np.int64(f), np.int64(w))))
                    for v, w in zip(rows[r], rows[rank])]
        rank += 1
    return rank


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([("fp", 3, 1), ("fp", 5, 1),
                                               ("fq", 2, 2), ("fq", 3, 2)]))
def test_batched_rank_matches_scalar_reduction(seed, spec):
    kind, p, r = spec
    ring = ring_make(kind, p, r=r)
    rng = np.random.Generator(np.random.Philox(key=[seed, 0]))
    mats = rng.integers(0, ring.size, size=(6, 3, 4), dtype=np.int64)
    ranks = batched_field_rank(ring, mats)
    for i in range(mats.shape[0]):
        assert int(ranks[i]) == _scalar_rank(ring, mats[i])


def test_batched_rank_with_rhs_consistency():
    ring = ring_make("fp", 5)
    a = np.array([[[1, 2], [2, 4]]], dtype=np.int64)
    ranks, ok = batched_field_rank(ring, a, rhs=np.array([[1, 2]]))
    assert ranks.tolist() == [1] and ok.tolist() == [True]
    ranks, ok = batched_field_rank(ring, a, rhs=np.array([[1, 3]]))
    assert ok.tolist() == [False]


# ------------------------------------------------------------ fiber counts


def test_commutator_fibers_match_brute_matrices():
    brute = oracles.lie_fiber_counts(COMM_LIE, SL2, 3)
    space = ModuleSpace(SL2, F3)
    vec = word_fiber_vector(COMM_LIE, SL2, F3)
    dec = space.decode(np.arange(space.size))
    for c in range(space.size):
        assert brute.get(tuple(int(v) for v in dec[c]), 0) == int(vec[c])
    assert fiber_count(COMM_LIE, SL2, F3) == 105
    assert fiber_count(COMM_LIE, SL2, F3, target=[0, 0, 0]) == 105


def test_census_route_equals_plain_enumeration():
    for p in (3, 5):
        ring = ring_make("fp", p)
        auto = word_measure_exact(COMM_LIE, SL2, ring, method="auto")
        plain = word_measure_exact(COMM_LIE, SL2, ring, method="enumerate")
        assert measures_equal(auto, plain)
        assert auto.meta["method"] == "auto"


def test_commutator_zero_fibers_across_primes():
    assert fiber_count(COMM_LIE, SL2, F5) == 745
    assert fiber_count(COMM_LIE, SL2, ring_make("fp", 7)) == 2737


def test_group_fiber_targets():
    carrier = ("group", 2)
    assert fiber_count(SQUARE_GRP, carrier, F5) == 2
    assert fiber_count(SQUARE_GRP, carrier, F5, target=[4, 0, 0, 4]) == 30
    grp = group_make(2, F5)
    idx = int(grp.index_of(np.array([[4, 0, 0, 4]], dtype=np.int64))[0])
    assert fiber_count(SQUARE_GRP, grp, F5, target=idx) == 30


def test_fiber_budget_refusal():
    with pytest.raises(BudgetExceeded):
        word_measure_exact(COMM_LIE, SL3, F3, budget=1000,
                           method="enumerate")
    # the image census sidesteps the tuple scan entirely
    assert fiber_count(COMM_LIE, SL2, F3, budget=1000) == 105


def test_unused_slots_scale_fibers():
    padded = parse_word("[x1, x2]", "lie", arity=3)
    base = word_fiber_vector(COMM_LIE, SL2, F3)
    vec = word_fiber_vector(padded, SL2, F3)
    assert np.array_equal(vec, base * 27)
    mu = word_measure_exact(padded, SL2, F3)
    assert mu.denom == 3**9


def test_factored_fiber_vector_equals_full_scan():
    factored = word_fiber_vector(DOUBLE_COMM, SL2, F3)
    full = word_measure_exact(DOUBLE_COMM, SL2, F3, method="enumerate")
    assert np.array_equal(factored, full.counts)
    assert int(np.sum(factored)) == 3**12


# ----------------------------------------------------------- group measures


def test_group_commutator_measure_matches_brute():
    els, brute = oracles.group_word_measure(COMM_GRP, 2, 3)
    mu = word_measure_exact(COMM_GRP, ("group", 2), F3)
    grp = mu.space.group
    assert grp.order == len(els) == 24
    for c in range(grp.order):
        key = tuple(int(v) for v in grp.elements[c])
        assert brute.get(key, 0) == int(mu.counts[c])
    assert int(mu.counts[grp.identity_index]) == 168  # 7 classes x 24


def test_group_measure_conjugation_invariant():
    mu = word_measure_exact(COMM_GRP, ("group", 2), F3)
    grp = mu.space.group
    inv = grp.inverse_perm()
    for g in (1, 7, 20):
        left = grp.multiply(np.repeat(grp.elements[g][None, :], grp.order, 0),
                            grp.elements)
        conj = grp.multiply(left, np.repeat(
            grp.elements[inv[g]][None, :], grp.order, 0))
        perm = grp.index_of(conj)
        assert np.array_equal(mu.counts[perm], mu.counts)


def test_exact_measures_worker_independent():
    one = word_measure_exact(COMM_LIE, SL2, F3, method="enumerate", workers=1)
    two = word_measure_exact(COMM_LIE, SL2, F3, method="enumerate", workers=2)
    assert measures_equal(one, two)
    g1 = word_measure_exact(COMM_GRP, ("group", 2), F3, workers=1)
    g2 = word_measure_exact(COMM_GRP, ("group", 2), F3, workers=2)
    assert measures_equal(g1, g2)


# -------------------------------------------------------- sampled measures


def test_sampled_measure_deterministic_and_seeded():
    a = word_measure_sampled(COMM_LIE, SL2, F3, 2000, seed=1)
    b = word_measure_sampled(COMM_LIE, SL2, F3, 2000, seed=1)
    c = word_measure_sampled(COMM_LIE, SL2, F3, 2000, seed=2)
    assert np.array_equal(a.counts, b.counts)
    assert not np.array_equal(a.counts, c.counts)
    assert a.denom == 2000 and int(np.sum(a.counts)) == 2000


def test_sampled_measure_worker_independent():
    one = word_measure_sampled(COMM_GRP, ("group", 2), F3, 1500, seed=3,
                               workers=1)
    two = word_measure_sampled(COMM_GRP, ("group", 2), F3, 1500, seed=3,
                               workers=2)
    assert np.array_equal(one.counts, two.counts)


def test_sampled_measure_tracks_exact_measure():
    n = 4000
    mu = word_measure_sampled(COMM_LIE, SL2, F3, n, seed=5)
    exact = Fraction(105, 729)
    se = mu.standard_errors()
    assert se.shape == (27,)
    gap = abs(mu.counts[0] / n - float(exact))
    assert gap <= 4 * math.sqrt(float(exact) * (1 - float(exact)) / n)


def test_sampled_measure_rejects_empty_draw():
    with pytest.raises(ValueError):
        word_measure_sampled(COMM_LIE, SL2, F3, 0)


# ------------------------------------------------------------- convolution


def test_point_measures_convolve_by_composition():
    space = ModuleSpace(SL2, F3)
    a, b = 5, 17
    conv = measure_convolve(point_measure(space, a), point_measure(space, b))
    dec = space.decode(np.array([a, b]))
    s = int(space.encode(space.ring.add_np(dec[0], dec[1])))
    assert conv.support().tolist() == [s]
    grp = group_make(2, F3)
    gspace = GroupSpace(grp)
    ga, gb = 3, 11
    gconv = measure_convolve(point_measure(gspace, ga),
                             point_measure(gspace, gb))
    assert gconv.support().tolist() == [int(grp.cayley()[ga, gb])]


def test_convolution_carrier_mismatch():
    with pytest.raises(ValueError):
        measure_convolve(comm_measure(3), comm_measure(5))


def test_disjoint_variable_words_convolve_lie():
    w2 = parse_word("[x1, [x1, x2]]", "lie")
    lhs = measure_convolve(word_measure_exact(COMM_LIE, SL2, F3),
                           word_measure_exact(w2, SL2, F3))
    rhs = word_measure_exact(COMM_LIE + w2.shift(2), SL2, F3,
                             method="enumerate")
    assert measures_equal(lhs, rhs)


def test_disjoint_variable_words_convolve_group():
    carrier = ("group", 2)
    pairs = [
        (COMM_GRP, SQUARE_GRP),
        (parse_word("x1", "group"), parse_word("x1 x2", "group")),
        (COMM_GRP, COMM_GRP),
    ]
    for w1, w2 in pairs:
        lhs = measure_convolve(word_measure_exact(w1, carrier, F3),
                               word_measure_exact(w2, carrier, F3))
        rhs = word_measure_exact(w1 * w2.shift(w1.arity), carrier, F3)
        assert measures_equal(lhs, rhs)


def test_high_convolution_powers_stay_exact():
    mu = comm_measure(3)
    p8 = convolution_power(mu, 8)
    assert p8.denom == 729**8
    assert p8.counts.dtype == object
    assert int(np.sum(np.asarray([int(c) for c in p8.counts],
                                 dtype=object))) == 729**8
    via4 = convolution_power(convolution_power(mu, 4), 2)
    assert measures_equal(p8, via4)
    assert convolution_power(mu, 1) is mu


# ----------------------------------------------------------------- norms


def test_distance_closed_forms_for_point_mass():
    space = ModuleSpace(SL2, F3)
    delta = point_measure(space)
    n = space.size
    assert la_distance_to_uniform(delta, 1) == Fraction(2 * (n - 1), n)
    assert l2_distance_squared(delta) == Fraction(n - 1)
    assert la_distance_to_uniform(delta, "inf") == Fraction(n - 1)
    assert la_distance_to_uniform(delta, math.inf) == Fraction(n - 1)
    pi = uniform_measure(space)
    assert la_distance_to_uniform(pi, 1) == 0
    assert l2_distance_squared(pi) == 0
    assert la_distance_to_uniform(pi, "inf") == 0


def test_distance_general_exponent_interpolates():
    mu = comm_measure(3)
    d1 = float(la_distance_to_uniform(mu, 1))
    d3 = la_distance_to_uniform(mu, 3)
    dinf = float(la_distance_to_uniform(mu, "inf"))
    assert d1 <= d3 + 1e-12 and d3 <= dinf + 1e-12
    with pytest.raises(ValueError):
        la_distance_to_uniform(mu, 0.5)


def test_second_power_infinity_norm_meets_l2_square():
    # on SL_2(F_3) the commutator walk satisfies the L^2 smoothing bound
    # with equality at the second power
    mu = word_measure_exact(COMM_GRP, ("group", 2), F3)
    twice = convolution_power(mu, 2)
    linf = la_distance_to_uniform(twice, "inf")
    l2sq = l2_distance_squared(mu)
    assert linf == l2sq == Fraction(103, 36)


# ----------------------------------------------------------------- mixing


def _float_walk_distances(p, t_max):
    """Independent float route: brute counts, index-table convolution."""
    els, brute = oracles.group_word_measure(COMM_GRP, 2, p)
    n = len(els)
    key = {tuple(int(v) for v in m.reshape(-1)): i for i, m in enumerate(els)}
    table = np.empty((n, n), dtype=np.int64)
    for i, a in enumerate(els):
        for j, b in enumerate(els):
            table[i, j] = key[tuple(int(v) for v in (a @ b % p).reshape(-1))]
    v0 = np.zeros(n)
    for k, c in brute.items():
        v0[key[k]] = c / (n * n)
    dists = {1: [], 2: [], "inf": []}
    v = v0.copy()
    for _ in range(t_max):
        gap = v - 1.0 / n
        dists[1].append(np.abs(gap).sum())
        dists[2].append(math.sqrt(n * (gap * gap).sum()))
        dists["inf"].append(n * np.abs(gap).max())
        w = np.zeros(n)
        np.add.at(w, table, np.outer(v, v0))
        v = w
    return dists


def test_mixing_times_of_commutator_walk():
    mu = word_measure_exact(COMM_GRP, ("group", 2), F5)
    oracle = _float_walk_distances(5, 6)
    r1 = mixing_time(mu, 1)
    r2 = mixing_time(mu, 2)
    rinf = mixing_time(mu, "inf")
    assert (r1.t_mix, r2.t_mix, rinf.t_mix) == (2, 2, 3)
    for rep, a in ((r1, 1), (r2, 2), (rinf, "inf")):
        for row in rep.rows:
            assert abs(row.value - oracle[a][row.t - 1]) < 1e-9
        vals = [row.value for row in rep.rows]
        assert all(x >= y - 1e-12 for x, y in zip(vals, vals[1:]))
        # halved again by twice the mixing time
        assert len(rep.rows) == 2 * rep.t_mix
        assert rep.rows[-1].value < 0.25
    assert r2.row(2).squared and not r1.row(1).squared


def test_mixing_requires_neutral_element_and_generation():
    space = ModuleSpace(SL2, F3)
    counts = np.zeros(27, dtype=np.int64)
    counts[3] = 1
    with pytest.raises(ValueError, match="neutral"):
        mixing_time(Measure(space, counts, 1), 1)
    grp = group_make(2, F3)
    gspace = GroupSpace(grp)
    counts = np.zeros(grp.order, dtype=np.int64)
    counts[grp.identity_index] = 1
    with pytest.raises(ValueError, match="generate"):
        mixing_time(Measure(gspace, counts, 1), 1)


def test_mixing_of_uniform_is_immediate():
    rep = mixing_time(uniform_measure(ModuleSpace(SL2, F3)), 1)
    assert rep.t_mix == 1 and len(rep.rows) == 2


# ------------------------------------------------------- additive transform


def test_cyclotomic_integer_recognition():
    assert cyclotomic_as_int(np.array([5, 2, 2])) == 3
    assert cyclotomic_as_int(np.array([5, 2, 1])) is None
    assert cyclotomic_as_int(np.array([4, 1, 1, 1, 1])) == 3
    assert cyclotomic_as_int(np.array([0, 0, 0])) == 0
    assert cyclotomic_as_int(np.array([7, 3])) == 4  # p = 2 is always integral


def test_transform_values_are_centralizer_sizes():
    cases = [(SL2, 3, "killing"), (SL2, 5, "killing"), (SL2, 7, "killing"),
             (SL3, 2, "trace")]
    for alg, p, pairing in cases:
        mu = word_measure_exact(COMM_LIE, alg, ring_make("fp", p))
        rep = additive_fourier(mu)
        assert rep.mode == "exact" and rep.pairing == pairing
        cents = centralizer_sizes_all(alg, p)
        size = p**alg.dim
        for z in range(size):
            val = rep.value_as_integer(z)
            assert val is not None and val * size == int(cents[z])


def test_transform_rejects_sl2_mod_2():
    mu = word_measure_exact(COMM_LIE, SL2, ring_make("fp", 2))
    with pytest.raises(ValueError, match="invariant pairing"):
        additive_fourier(mu)


def test_transform_rejects_non_algebra_and_big_carriers():
    gmu = word_measure_exact(COMM_GRP, ("group", 2), F3)
    with pytest.raises(ValueError):
        additive_fourier(gmu)
    big = word_measure_exact(COMM_LIE, SL2, ring_make("fp", 17))
    with pytest.raises(BudgetExceeded):
        additive_fourier(big)


def test_float_mode_agrees_with_exact_mode():
    mu = comm_measure(3)
    exact = additive_fourier(mu, mode="exact")
    fl = additive_fourier(mu, mode="float")
    for z in range(27):
        assert abs(exact.complex_value(z) - fl.complex_value(z)) < 1e-9
    with pytest.raises(ValueError):
        additive_fourier(mu, mode="fancy")


def test_transform_inversion_roundtrip():
    mu = comm_measure(3)
    rep = additive_fourier(mu)
    back = fourier_invert(rep, mu.space)
    assert measures_equal(mu, back)
    delta = point_measure(mu.space, 11)
    back2 = fourier_invert(additive_fourier(delta), mu.space)
    assert measures_equal(delta, back2)


def test_point_mass_transform_is_single_character():
    space = ModuleSpace(SL2, F3)
    rep = additive_fourier(point_measure(space, 4))
    ints = [rep.value_as_integer(z) for z in range(27)]
    assert ints[0] == 1
    assert any(v is None for v in ints)  # bare characters are not rational


# ----------------------------------------------- centralizers and spread


def test_centralizer_census_closed_form():
    # sl_2: the zero matrix, p^2 + p - 2 regular nilpotent/split classes...
    # the census total obeys sum |Cent|^2 = p^6 + (p^3 - 1) p^2
    for p in (3, 5, 7):
        cents = centralizer_sizes_all(SL2, p)
        assert int(cents[0]) == p**3
        total = int(np.sum(cents.astype(object) ** 2))
        assert total == p**6 + (p**3 - 1) * p**2
    assert centralizer_size(SL2, 3, [0, 0, 0]) == 27
    assert upsilon_count(SL2, 3).count == 963
    assert upsilon_count(SL2, 5).count == 18725


def test_commuting_spread_within_band_at_good_primes():
    for p in (3, 5, 7):
        assert upsilon_count(SL2, p).within(1, p)
    for p in (2, 5):
        assert upsilon_count(SL3, p).within(1, p)
    dev3 = upsilon_count(SL2, 3).deviation
    assert dev3 == Fraction(963, 729) - 1 == Fraction(26, 81)


def test_commuting_spread_detects_bad_prime():
    rep = upsilon_count(SL3, 3)
    assert not rep.within(1, 3)
    assert rep.deviation > 2


def test_commutator_transform_identity_routes():
    rep = commutator_fourier_check(SL2, 3)
    assert rep.mode == "full" and rep.match is True
    assert rep.lhs == rep.rhs == 963
    lean = commutator_fourier_check(SL2, 3, census_only=True)
    assert lean.mode == "census-only" and lean.match is None
    assert lean.lhs is None and lean.rhs == 963
    forced = commutator_fourier_check(SL2, 3, budget=100)
    assert forced.mode == "census-only"


# -------------------------------------------------------- series plumbing


def test_series_rejects_duplicate_keys():
    row = SeriesRow(3, 1, "h", 1, 1, 1.0)
    with pytest.raises(ValueError):
        DiagnosticSeries("dup", 1, 1, (row, row))


def test_series_lookup_and_csv():
    rows = (SeriesRow(3, 1, "h", 8, 9, 8 / 9),
            SeriesRow(3, 2, "h", None, None, 0.5))
    series = DiagnosticSeries("demo", 4, 3, rows)
    assert series.get(3, 1, "h").numerator == 8
    with pytest.raises(KeyError):
        series.get(5, 1, "h")
    assert series.to_csv() == (
        "p,k,statistic,numerator,denominator,float\n"
        "3,1,h,8,9,0.888888888889\n"
        "3,2,h,,,0.5\n")
    blob = series.to_json()
    assert blob["rows"][0]["q"] == 3 and blob["rows"][1]["q"] == 9


# ------------------------------------------------------------- flatness


def test_sum_of_two_commutators_is_flat():
    rep = flatness_scan(DOUBLE_COMM, SL2, [3, 5, 7])
    assert all(rep.verdicts[p] for p in (3, 5, 7))
    assert rep.series.dim_x == 12 and rep.series.dim_y == 3
    dev = rep.series.get(3, 1, "max_deviation")
    assert Fraction(dev.numerator, dev.denominator) == Fraction(26, 81)


def test_single_commutator_is_not_flat():
    rep = flatness_scan(COMM_LIE, SL2, [3, 5, 7])
    assert not any(rep.verdicts[p] for p in (3, 5, 7))
    top = rep.series.get(3, 1, "max_ratio")
    assert Fraction(top.numerator, top.denominator) == Fraction(35, 9)


def test_group_square_word_fails_flatness_with_integer_fibers():
    rep = flatness_scan(SQUARE_GRP, ("group", 2), [5])
    assert not rep.verdicts[5]
    assert rep.series.get(5, 1, "max_ratio").numerator == 30
    assert rep.series.get(5, 1, "min_ratio").numerator == 0
    int_dev = rep.series.get(5, 1, "nearest_int_deviation")
    assert int_dev.numerator == 0
    band = rep.series.get(5, 1, "flat_band")
    assert abs(band.value - 3 / math.sqrt(5)) < 1e-12


# ------------------------------------------------------- local densities


def test_square_density_sequence_and_scan():
    ideal = ideal_from_strings(["x1 x1"], dim_q=0)
    moduli = [9, 81, 25, 625, 49, 2401, 45]
    series = hx_sequence(ideal, moduli)
    for p, k in ((3, 2), (3, 4), (5, 2), (5, 4), (7, 2), (7, 4)):
        got = series.get(p, k, "h")
        assert Fraction(got.numerator, got.denominator) == p ** (k // 2)
    for n, key in zip(moduli, [(3, 2), (3, 4), (5, 2), (5, 4), (7, 2),
                               (7, 4), (45, 1)]):
        count = series.get(*key, "count").numerator
        assert count == oracles.modular_solution_count({2: 1}, n)
    crt = series.get(45, 1, "count").numerator
    assert crt == 3 * 1  # counts mod 9 and mod 5


def test_group_density_is_level_independent():
    series3 = hx_sequence(ideal_sl(2), [3, 9, 27])
    series5 = hx_sequence(ideal_sl(2), [5, 25, 125])
    for k in (1, 2, 3):
        got = series3.get(3, k, "h")
        assert Fraction(got.numerator, got.denominator) == Fraction(8, 9)
        got = series5.get(5, k, "h")
        assert Fraction(got.numerator, got.denominator) == Fraction(24, 25)


def test_density_sequence_rejects_unit_modulus():
    with pytest.raises(ValueError):
        hx_sequence(ideal_sl(2), [1])


# -------------------------------------------------- near-flat exponents


def test_exponent_estimates_from_largest_fiber():
    rep = epsilon_flat_estimate(COMM_LIE, SL2, [(7, 1)])
    assert rep.series.get(7, 1, "max_fiber").numerator == 2737
    assert abs(rep.epsilon_min - (6 - math.log(2737, 7)) / 3) < 1e-12
    assert abs(rep.epsilon_min - 0.64417) < 1e-4
    grp = epsilon_flat_estimate(SQUARE_GRP, ("group", 2), [(5, 1)])
    assert grp.series.get(5, 1, "max_fiber").numerator == 30
    assert abs(grp.epsilon_min - (3 - math.log(30, 5)) / 3) < 1e-12
    assert grp.series.dim_x == 3 and grp.series.dim_y == 3


def test_exponent_estimate_spans_levels():
    rep = epsilon_flat_estimate(SQUARE_GRP, ("group", 2),
                                [(3, 1), (3, 2)])
    assert rep.epsilon_min <= rep.series.get(3, 1, "epsilon_hat").value + 1e-12
    assert rep.series.get(3, 2, "max_fiber").numerator > 0


# ------------------------------------------------- thresholds from jets


def test_threshold_of_power_words():
    sq = ideal_from_strings(["x1 x1"], dim_q=0)
    rep = lct_estimate_via_jets(sq, 1, [3, 5])
    for p in (3, 5):
        entry = rep.entry(p)
        assert entry.dims == (0, 1)
        assert entry.estimate == Fraction(1, 2)
    cube = ideal_from_strings(["x1 x1 x1"], dim_q=0)
    rep3 = lct_estimate_via_jets(cube, 2, [3, 5])
    for p in (3, 5):
        assert rep3.entry(p).dims == (0, 1, 2)
        assert rep3.entry(p).estimate == Fraction(1, 3)


def test_threshold_of_cusp_curve():
    cusp = ideal_from_strings(["x1 x1 + x2 x2 x2"], dim_q=1)
    estimates = []
    for m_max in range(4):
        rep = lct_estimate_via_jets(cusp, m_max, [3])
        entry = rep.entry(3)
        assert entry.unresolved == ()
        estimates.append(entry.estimate)
    assert estimates[0] == Fraction(1)
    assert all(a >= b for a, b in zip(estimates, estimates[1:]))
    assert all(e >= Fraction(5, 6) for e in estimates)
    final = lct_estimate_via_jets(cusp, 3, [3]).entry(3)
    assert final.dims == (1, 2, 3, 4)
    # the first field pair overshoots the integer gate, the second lands
    assert len(final.slopes[1]) == 2
    assert abs(final.slopes[1][0] - 2) > 0.1 > abs(final.slopes[1][1] - 2)


def test_threshold_unresolved_under_tight_tolerance():
    cusp = ideal_from_strings(["x1 x1 + x2 x2 x2"], dim_q=1)
    rep = lct_estimate_via_jets(cusp, 1, [3], tolerance=1e-9)
    entry = rep.entry(3)
    assert entry.estimate is None and entry.unresolved == (1,)
    with pytest.raises(ValueError):
        lct_estimate_via_jets(cusp, -1, [3])
    with pytest.raises(KeyError):
        rep.entry(7)
