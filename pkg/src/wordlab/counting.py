"""Exact measures, fiber statistics and spectral diagnostics of word maps.

Everything here is counting.  A measure is a vector of integer counts
over an enumerated carrier together with one common denominator, so
convolution, norms and mixing thresholds stay in exact rational
arithmetic; floats appear only in reports.  The heavy enumeration paths
are chunked, and any chunk partition sums to the same counts, so results
do not depend on the worker count.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .chevalley import (ChevalleyAlgebra, MatrixAlgebra, MatrixGroup,
                        group_make, killing_matrix)
from .pointcount import count_tpoly_solutions, count_zmod_solutions
from .polymaps import IdealSpec, PolyMap, word_to_polymap
from .rings import MAX_TABLE_SIZE, BudgetExceeded, Ring, ring_make
from .words import AssocWord, GroupWord, LieWord

DEFAULT_COUNT_BUDGET = 2**24
CHUNK_ROWS = 1 << 19
MAT_CHUNK = 1 << 16
MAX_FOURIER_SIZE = 4096
SAMPLE_SHARDS = 64


# -- carriers as coded spaces --


class ModuleSpace:
    """g(R) / M_n(R) with mixed-radix integer codes, least digit first."""

    kind = "module"

    def __init__(self, carrier, ring: Ring):
        if not isinstance(carrier, (ChevalleyAlgebra, MatrixAlgebra)):
            raise ValueError(f"not a module carrier: {carrier!r}")
        self.carrier = carrier
        self.ring = ring
        self.dim = carrier.dim
        self.size = ring.size**carrier.dim
        self.identity_code = 0
        self.key = ("module", carrier.name, repr(ring))

    def decode(self, codes: np.ndarray) -> np.ndarray:
        out = np.empty(codes.shape + (self.dim,), dtype=np.int64)
        for i in range(self.dim):
            out[..., i] = (codes // self.ring.size**i) % self.ring.size
        return out

    def encode(self, vecs: np.ndarray) -> np.ndarray:
        codes = np.zeros(vecs.shape[:-1], dtype=np.int64)
        for i in range(self.dim - 1, -1, -1):
            codes = codes * self.ring.size + vecs[..., i]
        return codes

    def add_code_column(self, b: int) -> np.ndarray:
        """Index array x -> code(x + b) over the whole space."""
        all_codes = np.arange(self.size, dtype=np.int64)
        bs = self.decode(np.array([b], dtype=np.int64))[0]
        return self.encode(self.ring.add_np(self.decode(all_codes), bs))

    def neg_codes(self, codes: np.ndarray) -> np.ndarray:
        return self.encode(self.ring.neg_np(self.decode(codes)))


class GroupSpace:
    """A fully enumerated SL_n(R), composed through its Cayley table."""

    kind = "group"

    def __init__(self, group: MatrixGroup):
        self.group = group
        self.size = group.order
        self.identity_code = group.identity_index
        self.key = ("group", group.name)

    def add_code_column(self, b: int) -> np.ndarray:
        return self.group.cayley()[:, b].astype(np.int64)

    def neg_codes(self, codes: np.ndarray) -> np.ndarray:
        return self.group.inverse_perm()[codes].astype(np.int64)


Space = Union[ModuleSpace, GroupSpace]


@lru_cache(maxsize=None)
def _cached_group(n: int, kind: str, p: int, k: int) -> MatrixGroup:
    return group_make(n, ring_make(kind, p, k=k))


def _resolve_space(word, carrier, ring: Ring) -> Space:
    if isinstance(word, GroupWord):
        if isinstance(carrier, MatrixGroup):
            return GroupSpace(carrier)
        if isinstance(carrier, tuple) and carrier[0] == "group":
            carrier = carrier[1]
        if isinstance(carrier, int):
            return GroupSpace(_cached_group(carrier, ring.kind, ring.p, ring.k))
        raise ValueError("group words act on SL_n carriers")
    if isinstance(word, (LieWord, AssocWord)):
        return ModuleSpace(carrier, ring)
    raise ValueError(f"unsupported word {word!r}")


# -- measures --


@dataclass(eq=False)
class Measure:
    """Integer counts over a coded carrier with a common denominator."""

    space: Space
    counts: np.ndarray
    denom: int
    meta: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.counts) != self.space.size:
            raise ValueError("counts length must equal the carrier size")
        if self.denom < 1:
            raise ValueError("denominator must be positive")
        if sum(int(c) for c in self.counts) != self.denom:
            raise ValueError("masses must sum to one")

    def mass(self, code: int) -> Fraction:
        return Fraction(int(self.counts[code]), self.denom)

    def support(self) -> np.ndarray:
        return np.nonzero(self.counts)[0]

    def as_floats(self) -> np.ndarray:
        return np.asarray(
            [int(c) / self.denom for c in self.counts], dtype=np.float64)

    def is_uniform(self) -> bool:
        target = Fraction(self.denom, self.space.size)
        return target.denominator == 1 and bool(
            np.all(self.counts == int(target)))

    def to_json(self) -> dict:
        return {
            "carrier": list(self.space.key),
            "denominator": self.denom,
            "counts": [int(c) for c in self.counts],
            "meta": {k: v for k, v in sorted(self.meta.items())},
        }


def measures_equal(m1: Measure, m2: Measure) -> bool:
    return (m1.space.key == m2.space.key and m1.denom == m2.denom
            and all(int(a) == int(b) for a, b in zip(m1.counts, m2.counts)))


def uniform_measure(space: Space) -> Measure:
    return Measure(space, np.ones(space.size, dtype=np.int64), space.size,
                   {"word": "uniform"})


def point_measure(space: Space, code: Optional[int] = None) -> Measure:
    counts = np.zeros(space.size, dtype=np.int64)
    counts[space.identity_code if code is None else code] = 1
    return Measure(space, counts, 1, {"word": "point"})


# -- batched linear algebra over a field ring --


def batched_field_rank(ring: Ring, mats: np.ndarray,
                       rhs: Optional[np.ndarray] = None):
    """Ranks of a stack of matrices; with rhs, also solvability flags.

    Full Gauss-Jordan with per-matrix pivot bookkeeping, so one pass
    serves every matrix in the stack regardless of its pivot pattern.
    """
    if rhs is None:
        work = mats.copy()
    else:
        work = np.concatenate([mats, rhs[:, :, None]], axis=2)
    n_pts, m, _ = work.shape
    n = mats.shape[2]
    rank = np.zeros(n_pts, dtype=np.int64)
    rows = np.arange(m)
    inv_tab = ring.inv_table()
    for col in range(n):
        cand = (rows[None, :] >= rank[:, None]) & (work[:, :, col] != 0)
        has = cand.any(axis=1)
        idx = np.nonzero(has)[0]
        if idx.size == 0:
            continue
        piv = np.argmax(cand[idx], axis=1)
        r = rank[idx]
        prow = work[idx, piv, :].copy()
        work[idx, piv, :] = work[idx, r, :]
        work[idx, r, :] = prow
        scale = inv_tab[prow[:, col]]
        prow = ring.mul_np(prow, scale[:, None])
        work[idx, r, :] = prow
        delta = ring.mul_np(work[idx, :, col][:, :, None], prow[:, None, :])
        cleared = ring.sub_np(work[idx], delta)
        cleared[np.arange(idx.size), r, :] = prow
        work[idx] = cleared
        rank[idx] += 1
    if rhs is None:
        return rank
    below = rows[None, :] >= rank[:, None]
    bad = ((work[:, :, n] != 0) & below).any(axis=1)
    return rank, ~bad


# -- evaluation engines --


def _module_eval_counts(pm: PolyMap, space: ModuleSpace, start: int,
                        stop: int) -> np.ndarray:
    counts = np.zeros(space.size, dtype=np.int64)
    ring = space.ring
    n_in = pm.n_in
    for lo in range(start, stop, CHUNK_ROWS):
        hi = min(lo + CHUNK_ROWS, stop)
        codes = np.arange(lo, hi, dtype=np.int64)
        pts = np.empty((hi - lo, n_in), dtype=np.int64)
        for i in range(n_in):
            pts[:, i] = (codes // ring.size**i) % ring.size
        vals = pm.evaluate(ring, pts)
        counts += np.bincount(space.encode(vals), minlength=space.size)
    return counts


def _group_eval_indices(space: GroupSpace, word: GroupWord,
                        codes: np.ndarray) -> np.ndarray:
    g = space.size
    cay = space.group.cayley()
    invp = space.group.inverse_perm()
    r = max(word.arity, 1)
    slots = [(codes // g**s) % g for s in range(r)]
    cur = np.full(codes.shape, space.identity_code, dtype=np.int64)
    for gen, e in word.letters:
        nxt = slots[gen - 1] if e == 1 else invp[slots[gen - 1]]
        cur = cay[cur, nxt].astype(np.int64)
    return cur


def _group_eval_counts(word: GroupWord, space: GroupSpace, start: int,
                       stop: int) -> np.ndarray:
    counts = np.zeros(space.size, dtype=np.int64)
    for lo in range(start, stop, CHUNK_ROWS):
        hi = min(lo + CHUNK_ROWS, stop)
        idx = _group_eval_indices(space, word,
                                  np.arange(lo, hi, dtype=np.int64))
        counts += np.bincount(idx, minlength=space.size)
    return counts


def _is_single_commutator(word) -> bool:
    if not isinstance(word, LieWord) or word.arity != 2:
        return False
    if len(word.terms) != 1:
        return False
    tree, coef = word.terms[0]
    return tree == (1, 2) and coef == 1


def _commutator_fiber_vector(alg: ChevalleyAlgebra, p: int) -> np.ndarray:
    """Fiber counts of the bracket map over every target, via ad images.

    For each X the count over y is p^null(ad X) on the image of ad X and
    zero elsewhere, so the whole vector costs sum_X p^rank(ad X) marks
    instead of p^(2 dim) evaluations.
    """
    space = ModuleSpace(alg, ring_make("fp", p))
    d = alg.dim
    struct = alg.structure % p
    counts = np.zeros(space.size, dtype=np.int64)
    radix = p ** np.arange(d, dtype=np.int64)
    for code in range(space.size):
        x = (code // radix) % p
        # rows of this array are ad(x)^T, so its row space is the image
        adt = np.einsum("i,ijl->jl", x, struct) % p
        basis = _row_space_basis(adt, p)
        rank = basis.shape[0]
        combos = np.zeros((1, d), dtype=np.int64)
        for b in basis:
            combos = (combos[:, None, :] +
                      np.arange(p)[None, :, None] * b[None, None, :]).reshape(
                          -1, d) % p
        np.add.at(counts, combos @ radix, p ** (d - rank))
    return counts


def _row_space_basis(mat: np.ndarray, p: int) -> np.ndarray:
    m = mat % p
    rank = 0
    for col in range(m.shape[1]):
        piv = next((r for r in range(rank, m.shape[0]) if m[r, col]), None)
        if piv is None:
            continue
        m[[rank, piv]] = m[[piv, rank]]
        m[rank] = (m[rank] * pow(int(m[rank, col]), -1, p)) % p
        for r in range(m.shape[0]):
            if r != rank and m[r, col]:
                m[r] = (m[r] - m[r, col] * m[rank]) % p
        rank += 1
    return m[:rank]


# -- worker plumbing --


def _partition(total: int, parts: int) -> List[Tuple[int, int]]:
    cuts = [total * i // parts for i in range(parts + 1)]
    return [(cuts[i], cuts[i + 1]) for i in range(parts)
            if cuts[i] < cuts[i + 1]]


def _pool_worker(args):
    payload, start, stop = args
    mode = payload["mode"]
    if mode == "module":
        return _module_eval_counts(payload["pm"], payload["space"], start,
                                   stop)
    if mode == "group":
        return _group_eval_counts(payload["word"], payload["space"], start,
                                  stop)
    raise ValueError(mode)


def _counts_partitioned(payload: dict, total: int, workers: int) -> np.ndarray:
    spans = _partition(total, max(workers, 1))
    if workers <= 1:
        parts = [_pool_worker((payload, s, e)) for s, e in spans]
    else:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers) as pool:
            parts = pool.map(_pool_worker,
                             [(payload, s, e) for s, e in spans])
    total_counts = np.zeros_like(parts[0])
    for c in parts:
        total_counts += c
    return total_counts


def _fiber_vector(word, space: Space, budget: int,
                  workers: int = 1, census: bool = True) -> np.ndarray:
    """Counts of the word map over every carrier point."""
    if isinstance(space, GroupSpace):
        r = max(word.arity, 1)
        total = space.size**r
        if total > budget:
            raise BudgetExceeded(
                f"group enumeration needs {total} tuples, budget {budget}")
        space.group.cayley()
        space.group.inverse_perm()
        return _counts_partitioned(
            {"mode": "group", "word": word, "space": space}, total, workers)
    ring = space.ring
    if (census and _is_single_commutator(word)
            and isinstance(space.carrier, ChevalleyAlgebra)
            and ring.short_kind == "fp"):
        return _commutator_fiber_vector(space.carrier, ring.p)
    pm = word_to_polymap(word, space.carrier)
    total = ring.size**pm.n_in
    if total > budget:
        raise BudgetExceeded(
            f"module enumeration needs {total} points, budget {budget}")
    return _counts_partitioned(
        {"mode": "module", "pm": pm, "space": space}, total, workers)


# -- public counting API --


def fiber_count(word, carrier, ring: Ring, target=None,
                budget: int = DEFAULT_COUNT_BUDGET, workers: int = 1) -> int:
    """|word_map^{-1}(target)| by exact enumeration.

    target defaults to the neutral element (zero vector or identity
    matrix).  Module targets are coordinate code vectors; group targets
    may be packed entry vectors or element indices.
    """
    space = _resolve_space(word, carrier, ring)
    code = _target_code(space, target)
    if (isinstance(space, ModuleSpace) and _is_single_commutator(word)
            and isinstance(space.carrier, ChevalleyAlgebra)
            and ring.short_kind == "fp"):
        return _census_fiber_count(space.carrier, ring.p, code)
    vec = _fiber_vector(word, space, budget, workers=workers)
    return int(vec[code])


def _target_code(space: Space, target) -> int:
    if target is None:
        return space.identity_code
    if isinstance(space, ModuleSpace):
        t = np.asarray(target, dtype=np.int64)
        if t.shape != (space.dim,):
            raise ValueError(f"module target needs {space.dim} coordinates")
        return int(space.encode(t[None, :])[0])
    if isinstance(target, (int, np.integer)):
        if not 0 <= int(target) < space.size:
            raise ValueError("group element index out of range")
        return int(target)
    t = np.asarray(target, dtype=np.int64)
    return int(space.group.index_of(t[None, :])[0])


def _census_fiber_count(alg: ChevalleyAlgebra, p: int,
                        target_code: int) -> int:
    """Commutator fiber over one target: solvability of ad X v = y per X."""
    ring = ring_make("fp", p)
    space = ModuleSpace(alg, ring)
    d = alg.dim
    struct = alg.structure % p
    y = space.decode(np.array([target_code], dtype=np.int64))[0]
    total = 0
    for lo in range(0, space.size, MAT_CHUNK):
        hi = min(lo + MAT_CHUNK, space.size)
        xs = space.decode(np.arange(lo, hi, dtype=np.int64))
        ad = np.einsum("ni,ijl->nlj", xs, struct) % p
        rank, ok = batched_field_rank(
            ring, ad, np.broadcast_to(y, (hi - lo, d)).copy())
        total += int(np.sum(ok * p ** (d - rank)))
    return total


def word_measure_exact(word, carrier, ring: Ring,
                       budget: int = DEFAULT_COUNT_BUDGET, workers: int = 1,
                       method: str = "auto") -> Measure:
    """Push-forward of the uniform measure on carrier^arity.

    method "auto" may use the commutator image census; "enumerate"
    forces the plain scan of all argument tuples.
    """
    if method not in ("auto", "enumerate"):
        raise ValueError("method is 'auto' or 'enumerate'")
    space = _resolve_space(word, carrier, ring)
    vec = _fiber_vector(word, space, budget, workers=workers,
                        census=method == "auto")
    denom = int(np.sum(vec))
    return Measure(space, vec, denom,
                   {"word": str(word), "method": method})


@dataclass(eq=False)
class SampledMeasure(Measure):
    """Empirical push-forward; counts over denom = drawn samples."""

    def standard_errors(self) -> np.ndarray:
        n = self.denom
        phat = self.counts / n
        return np.sqrt(phat * (1.0 - phat) / n)


def word_measure_sampled(word, carrier, ring: Ring, n_samples: int,
                         seed: int = 0, workers: int = 1) -> SampledMeasure:
    """Monte Carlo estimate with counter-based per-shard streams.

    Samples are split over a fixed shard grid, each shard drawing from
    Philox(key=(seed, shard)), so the result depends on (n_samples,
    seed) but not on the worker count.
    """
    if n_samples < 1:
        raise ValueError("n_samples >= 1")
    space = _resolve_space(word, carrier, ring)
    shard_sizes = [n_samples * (s + 1) // SAMPLE_SHARDS
                   - n_samples * s // SAMPLE_SHARDS
                   for s in range(SAMPLE_SHARDS)]
    payload: Dict[str, object] = {"space": space, "word": word, "seed": seed}
    if isinstance(space, GroupSpace):
        space.group.cayley()
        space.group.inverse_perm()
    else:
        payload["pm"] = word_to_polymap(word, space.carrier)
    jobs = [(payload, s, size)
            for s, size in enumerate(shard_sizes) if size]
    if workers <= 1:
        parts = [_sample_worker(j) for j in jobs]
    else:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers) as pool:
            parts = pool.map(_sample_worker, jobs)
    counts = np.zeros(space.size, dtype=np.int64)
    for c in parts:
        counts += c
    return SampledMeasure(space, counts, n_samples,
                          {"word": str(word), "seed": seed,
                           "n_samples": n_samples})


def _sample_worker(args) -> np.ndarray:
    payload, shard, size = args
    space = payload["space"]
    word = payload["word"]
    rng = np.random.Generator(np.random.Philox(key=[payload["seed"], shard]))
    if isinstance(space, GroupSpace):
        r = max(word.arity, 1)
        codes = _draw_codes(rng, space.size**r, size)
        idx = _group_eval_indices(space, word, codes)
        return np.bincount(idx, minlength=space.size)
    pm = payload["pm"]
    pts = rng.integers(0, space.ring.size, size=(size, pm.n_in),
                       dtype=np.int64)
    vals = pm.evaluate(space.ring, pts)
    return np.bincount(space.encode(vals), minlength=space.size)


def _draw_codes(rng, total: int, size: int) -> np.ndarray:
    if total <= 2**63 - 1:
        return rng.integers(0, total, size=size, dtype=np.int64)
    raise BudgetExceeded("sample domain too large to index")


def measure_convolve(m1: Measure, m2: Measure) -> Measure:
    """Convolution over the carrier's own composition.

    Module carriers convolve additively, group carriers through the
    Cayley table.  Counts are exact arbitrary-precision integers.
    """
    if m1.space.key != m2.space.key:
        raise ValueError(
            f"carrier mismatch: {m1.space.key} vs {m2.space.key}")
    space = m1.space
    out = [0] * space.size
    for b in m2.support():
        cb = int(m2.counts[b])
        col = space.add_code_column(int(b))
        for x in np.nonzero(m1.counts)[0]:
            out[col[x]] += int(m1.counts[x]) * cb
    counts = np.array(out, dtype=object)
    if max(out) <= 2**62:
        counts = counts.astype(np.int64)
    return Measure(space, counts, m1.denom * m2.denom,
                   {"word": f"({m1.meta.get('word')})*({m2.meta.get('word')})"})


def convolution_power(mu: Measure, t: int) -> Measure:
    if t < 1:
        raise ValueError("t >= 1")
    out = mu
    for _ in range(t - 1):
        out = measure_convolve(out, mu)
    return out


# -- norms and mixing --


def l2_distance_squared(mu: Measure) -> Fraction:
    """Exact square of the L^2 distance to the uniform density."""
    n = mu.space.size
    d = mu.denom
    acc = 0
    for c in mu.counts:
        acc += (n * int(c) - d) ** 2
    return Fraction(acc, n * d * d)


def la_distance_to_uniform(mu: Measure, a) -> Union[Fraction, float]:
    """L^a distance of the density to 1, exact for a in {1, 2, inf}.

    a = 1 and a = "inf" return Fractions; a = 2 returns the float square
    root of the exact l2_distance_squared; other real a > 1 are floats.
    """
    n = mu.space.size
    d = mu.denom
    if a == 1:
        acc = sum(abs(n * int(c) - d) for c in mu.counts)
        return Fraction(acc, n * d)
    if a in ("inf", math.inf):
        top = max(abs(n * int(c) - d) for c in mu.counts)
        return Fraction(top, d)
    if a == 2:
        return math.sqrt(l2_distance_squared(mu))
    if not a > 1:
        raise ValueError("a must be >= 1 or 'inf'")
    acc = sum((abs(n * int(c) - d) / (n * d)) ** a for c in mu.counts)
    return float(n ** (a - 1) * acc) ** (1 / a)


def _distance_exact(mu: Measure, a) -> Tuple[Fraction, bool]:
    """(value, squared?) with exact rational value for a in {1, 2, inf}."""
    if a == 2:
        return l2_distance_squared(mu), True
    return la_distance_to_uniform(mu, a), False


@dataclass(frozen=True)
class MixingRow:
    t: int
    value: float
    exact: Fraction
    squared: bool


@dataclass(frozen=True)
class MixingReport:
    a: object
    threshold: Fraction
    t_mix: Optional[int]
    rows: Tuple[MixingRow, ...]

    def row(self, t: int) -> MixingRow:
        return self.rows[t - 1]


def _support_generates(space: Space, support: np.ndarray) -> bool:
    reached = {int(space.identity_code)}
    frontier = list(reached)
    cols = {int(b): space.add_code_column(int(b)) for b in support}
    while frontier:
        nxt = []
        for x in frontier:
            for b, col in cols.items():
                y = int(col[x])
                if y not in reached:
                    reached.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(reached) == space.size


def mixing_time(mu: Measure, a, threshold: Fraction = Fraction(1, 2),
                t_max: int = 16) -> MixingReport:
    """Least t with ||mu^{*t} - uniform||_a below the threshold.

    The support must contain the neutral element and generate the
    carrier, otherwise the walk cannot converge and the call fails.
    Comparisons are exact; for a = 2 the squared distance is compared
    against the squared threshold.
    """
    support = mu.support()
    if mu.counts[mu.space.identity_code] == 0:
        raise ValueError("support must contain the neutral element")
    if not _support_generates(mu.space, support):
        raise ValueError("support does not generate the carrier")
    rows: List[MixingRow] = []
    t_mix: Optional[int] = None
    nu = mu
    for t in range(1, t_max + 1):
        exact, squared = _distance_exact(nu, a)
        value = math.sqrt(exact) if squared else float(exact)
        rows.append(MixingRow(t, value, exact, squared))
        bound = threshold * threshold if squared else threshold
        if t_mix is None and exact < bound:
            t_mix = t
        if t_mix is not None and t >= 2 * t_mix:
            break
        if t < t_max:
            nu = measure_convolve(nu, mu)
    return MixingReport(a, threshold, t_mix, tuple(rows))


# -- additive Fourier analysis on g(F_p) --


@dataclass(frozen=True)
class FourierReport:
    """Transform values as cyclotomic class counts or complex floats.

    Exact mode: value at z is sum_j class_counts[z, j] zeta^j / denom
    with zeta a primitive p-th root of unity.
    """

    p: int
    mode: str
    pairing: str
    class_counts: Optional[np.ndarray]
    values: Optional[np.ndarray]
    denom: int
    pair_matrix: np.ndarray

    def value_as_integer(self, z_code: int) -> Optional[Fraction]:
        """The transform value at z when it is a rational integer scaled
        by denom; None when the class vector is not constant off 0."""
        if self.class_counts is None:
            raise ValueError("float mode has no exact values")
        num = cyclotomic_as_int(self.class_counts[z_code])
        return None if num is None else Fraction(num, self.denom)

    def complex_value(self, z_code: int) -> complex:
        if self.values is not None:
            return complex(self.values[z_code])
        zeta = np.exp(2j * np.pi * np.arange(self.p) / self.p)
        return complex(self.class_counts[z_code] @ zeta) / self.denom


def cyclotomic_as_int(vec: np.ndarray) -> Optional[int]:
    """sum_j vec[j] zeta_p^j as an integer, or None if it is not one.

    The only linear relation on (1, zeta, .., zeta^{p-1}) is that the
    all-ones vector sums to zero, so the value is integral exactly when
    the coefficients are constant from index 1 on.
    """
    tail = vec[1:]
    if tail.size and np.any(tail != tail[0]):
        return None
    return int(vec[0]) - (int(tail[0]) if tail.size else 0)


def _pairing_matrix(alg: ChevalleyAlgebra, p: int) -> Tuple[np.ndarray, str]:
    kappa = killing_matrix(alg) % p
    if _int_det(kappa, p) != 0:
        return kappa, "killing"
    trace = np.einsum("iab,jba->ij", alg.matrices, alg.matrices) % p
    if _int_det(trace, p) != 0:
        return trace, "trace"
    raise ValueError(
        f"no nondegenerate invariant pairing on {alg.name} mod {p}")


def _int_det(mat: np.ndarray, p: int) -> int:
    m = mat % p
    det = 1
    n = m.shape[0]
    m = m.copy()
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r, col] % p), None)
        if piv is None:
            return 0
        if piv != col:
            m[[col, piv]] = m[[piv, col]]
            det = -det
        det = det * int(m[col, col]) % p
        inv = pow(int(m[col, col]), -1, p)
        for r in range(col + 1, n):
            m[r] = (m[r] - m[r, col] * inv * m[col]) % p
    return det % p


def additive_fourier(mu: Measure, mode: str = "auto") -> FourierReport:
    """Characters paired through the invariant form on the algebra.

    Needs a Lie algebra carrier over a prime field.  The Killing form is
    used when nondegenerate mod p, else the trace form (flagged in the
    report); with neither the prime is rejected.
    """
    space = mu.space
    if not isinstance(space, ModuleSpace) or not isinstance(
            space.carrier, ChevalleyAlgebra):
        raise ValueError("additive transform needs a Lie algebra carrier")
    ring = space.ring
    if ring.short_kind != "fp":
        raise ValueError("additive transform works over prime fields")
    p = ring.p
    if space.size > MAX_FOURIER_SIZE:
        raise BudgetExceeded(
            f"transform on {space.size} characters above {MAX_FOURIER_SIZE}")
    if mode == "auto":
        mode = "exact" if p <= 7 else "float"
    if mode not in ("exact", "float"):
        raise ValueError("mode is 'auto', 'exact' or 'float'")
    form, pairing = _pairing_matrix(space.carrier, p)
    vecs = space.decode(np.arange(space.size, dtype=np.int64))
    pair = vecs @ (form % p) @ vecs.T % p
    if mode == "exact":
        cc = np.zeros((space.size, p), dtype=np.int64)
        counts = np.asarray([int(c) for c in mu.counts], dtype=np.int64)
        for j in range(p):
            cc[:, j] = (pair == j).astype(np.int64) @ counts
        return FourierReport(p, "exact", pairing, cc, None, mu.denom,
                             pair.astype(np.int16))
    zeta = np.exp(2j * np.pi * np.arange(p) / p)
    vals = zeta[pair] @ mu.as_floats()
    return FourierReport(p, "float", pairing, None, vals, mu.denom,
                         pair.astype(np.int16))


def fourier_invert(report: FourierReport, space: ModuleSpace) -> Measure:
    """Exact inverse transform back to a counts measure."""
    if report.class_counts is None:
        raise ValueError("inversion needs the exact mode")
    p = report.p
    n = space.size
    pair = report.pair_matrix.astype(np.int64)
    counts = np.zeros(n, dtype=np.int64)
    for w in range(n):
        tvec = np.zeros(p, dtype=np.int64)
        shifted = report.class_counts[
            np.arange(n)[:, None], (np.arange(p)[None, :] + pair[:, [w]]) % p]
        tvec = shifted.sum(axis=0)
        num = cyclotomic_as_int(tvec)
        if num is None or num % n:
            raise ValueError("inverse transform is not integral")
        counts[w] = num // n
    return Measure(space, counts, report.denom, {"word": "inverse transform"})


# -- centralizer censuses --


def centralizer_size(alg: ChevalleyAlgebra, p: int, z: Sequence[int]) -> int:
    """|Cent(z)| in g(F_p), as p^nullity(ad z)."""
    ring = ring_make("fp", p)
    zv = np.asarray(z, dtype=np.int64) % p
    ad = np.einsum("i,ijl->lj", zv, alg.structure % p) % p
    rank = int(batched_field_rank(ring, ad[None, :, :])[0])
    return p ** (alg.dim - rank)


def centralizer_sizes_all(alg: ChevalleyAlgebra, p: int) -> np.ndarray:
    """p^nullity(ad z) for every z code, in carrier code order."""
    ring = ring_make("fp", p)
    space = ModuleSpace(alg, ring)
    d = alg.dim
    struct = alg.structure % p
    out = np.empty(space.size, dtype=np.int64)
    for lo in range(0, space.size, MAT_CHUNK):
        hi = min(lo + MAT_CHUNK, space.size)
        zs = space.decode(np.arange(lo, hi, dtype=np.int64))
        ad = np.einsum("ni,ijl->nlj", zs, struct) % p
        rank = batched_field_rank(ring, ad)
        out[lo:hi] = p ** (d - rank)
    return out


@dataclass(frozen=True)
class UpsilonReport:
    count: int
    expected: int
    ratio: Fraction
    deviation: Fraction

    def within(self, c, p: int) -> bool:
        """deviation <= c / sqrt(p), compared exactly via squares."""
        c = Fraction(c)
        return self.deviation**2 * p <= c**2


def upsilon_count(alg: ChevalleyAlgebra, p: int) -> UpsilonReport:
    """Commuting-pair census sum_z |Cent(z)|^2 against |g|^2."""
    cents = centralizer_sizes_all(alg, p)
    count = int(np.sum(cents.astype(object) ** 2))
    expected = p ** (2 * alg.dim)
    ratio = Fraction(count, expected)
    return UpsilonReport(count, expected, ratio, abs(ratio - 1))


@dataclass(frozen=True)
class CommutatorFourierReport:
    lhs: Optional[Fraction]
    rhs: Fraction
    match: Optional[bool]
    mode: str


def commutator_fourier_check(alg: ChevalleyAlgebra, p: int,
                             budget: int = DEFAULT_COUNT_BUDGET,
                             census_only: bool = False,
                             workers: int = 1) -> CommutatorFourierReport:
    """tau_comm^{*2}(0) |g|^3 against the centralizer square census.

    The left side is a plain enumeration of the bracket map (no census
    shortcut), so the two sides are independent routes; census_only
    skips the left side when the enumeration exceeds the budget.
    """
    word = LieWord.make({(1, 2): Fraction(1)}, 2)
    size = p**alg.dim
    rhs = Fraction(int(np.sum(centralizer_sizes_all(alg, p)
                              .astype(object) ** 2)))
    if census_only or size**2 > budget:
        return CommutatorFourierReport(None, rhs, None, "census-only")
    space = ModuleSpace(alg, ring_make("fp", p))
    vec = _fiber_vector(word, space, budget, workers=workers, census=False)
    neg = space.neg_codes(np.arange(space.size, dtype=np.int64))
    pair_sum = int(np.sum(vec.astype(object) * vec[neg].astype(object)))
    lhs = Fraction(pair_sum, size)
    return CommutatorFourierReport(lhs, rhs, lhs == rhs, "full")


# -- diagnostic series --


@dataclass(frozen=True)
class SeriesRow:
    p: int
    k: int
    statistic: str
    numerator: Optional[int]
    denominator: Optional[int]
    value: float

    @property
    def q(self) -> int:
        return self.p**self.k


@dataclass(frozen=True)
class DiagnosticSeries:
    """Rows keyed by (p, k, statistic); dimensions are declared inputs."""

    label: str
    dim_x: int
    dim_y: int
    rows: Tuple[SeriesRow, ...]

    def __post_init__(self):
        keys = [(r.p, r.k, r.statistic) for r in self.rows]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (p, k, statistic) row")

    def get(self, p: int, k: int, statistic: str) -> SeriesRow:
        for r in self.rows:
            if (r.p, r.k, r.statistic) == (p, k, statistic):
                return r
        raise KeyError((p, k, statistic))

    def to_csv(self) -> str:
        lines = ["p,k,statistic,numerator,denominator,float"]
        for r in self.rows:
            num = "" if r.numerator is None else str(r.numerator)
            den = "" if r.denominator is None else str(r.denominator)
            lines.append(
                f"{r.p},{r.k},{r.statistic},{num},{den},{r.value:.12g}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "dim_x": self.dim_x,
            "dim_y": self.dim_y,
            "rows": [
                {"p": r.p, "k": r.k, "q": r.q, "statistic": r.statistic,
                 "numerator": r.numerator, "denominator": r.denominator,
                 "float": r.value}
                for r in self.rows
            ],
        }


def _frac_row(p: int, k: int, statistic: str, frac: Fraction) -> SeriesRow:
    return SeriesRow(p, k, statistic, frac.numerator, frac.denominator,
                     float(frac))


# -- flatness diagnostics --


def _split_independent_factors(word: LieWord) -> List[LieWord]:
    """Connected components of the slot-sharing graph, renumbered.

    A sum of terms over disjoint slot sets is an independent-variable
    convolution, so its fiber vector is the additive convolution of the
    component fiber vectors.
    """
    from .words import tree_leaves, leaf_generator

    slot_sets = []
    for tree, _ in word.terms:
        slot_sets.append({leaf_generator(leaf) for leaf in tree_leaves(tree)})
    parent = list(range(len(slot_sets)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(slot_sets)):
        for j in range(i + 1, len(slot_sets)):
            if slot_sets[i] & slot_sets[j]:
                parent[find(i)] = find(j)
    groups: Dict[int, List[int]] = {}
    for i in range(len(slot_sets)):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        slots = sorted(set().union(*(slot_sets[i] for i in members)))
        remap = {s: t + 1 for t, s in enumerate(slots)}
        terms: Dict = {}
        for i in members:
            tree, coef = word.terms[i]
            terms[_remap_tree(tree, remap)] = coef
        out.append(LieWord.make(terms, len(slots)))
    return out


def _remap_tree(tree, remap):
    if isinstance(tree, tuple):
        return (_remap_tree(tree[0], remap), _remap_tree(tree[1], remap))
    return remap[int(tree)]


def _additive_convolve_counts(space: ModuleSpace, a: np.ndarray,
                              b: np.ndarray) -> np.ndarray:
    out = np.zeros(space.size, dtype=object)
    for code in np.nonzero(b)[0]:
        col = space.add_code_column(int(code))
        out[col] += a.astype(object) * int(b[code])
    if np.all([v <= 2**62 for v in out]):
        out = out.astype(np.int64)
    return out


def word_fiber_vector(word, carrier, ring: Ring,
                      budget: int = DEFAULT_COUNT_BUDGET,
                      workers: int = 1) -> np.ndarray:
    """Counts over every target, factoring independent-variable sums."""
    space = _resolve_space(word, carrier, ring)
    if isinstance(word, LieWord):
        factors = _split_independent_factors(word)
        if len(factors) > 1:
            vec = None
            used = 0
            for f in factors:
                used += f.arity
                fv = _fiber_vector(f, space, budget, workers=workers)
                vec = fv if vec is None else _additive_convolve_counts(
                    space, vec, fv)
            idle = word.arity - used
            if idle:
                vec = vec * (space.ring.size ** (idle * space.dim))
            return vec
    return _fiber_vector(word, space, budget, workers=workers)


@dataclass(frozen=True)
class FlatnessReport:
    series: DiagnosticSeries
    verdicts: Dict[int, bool]
    c: Fraction


def flatness_scan(word, carrier, primes: Sequence[int],
                  c: Fraction = Fraction(3),
                  budget: int = DEFAULT_COUNT_BUDGET,
                  workers: int = 1) -> FlatnessReport:
    """Normalized fiber spread against the c q^{-1/2} band, per prime.

    The consistency verdict compares max |fiber/expected - 1| with
    c p^{-1/2} by exact squared rationals.  Rows also carry the spread
    of the ratios around their nearest integers, a quick eye test for
    union-of-cosets fibers.
    """
    c = Fraction(c)
    rows: List[SeriesRow] = []
    verdicts: Dict[int, bool] = {}
    dim_x = dim_y = 0
    for p in primes:
        ring = ring_make("fp", p)
        space = _resolve_space(word, carrier, ring)
        vec = word_fiber_vector(word, carrier, ring, budget=budget,
                                workers=workers)
        domain = int(np.sum(np.asarray([int(v) for v in vec], dtype=object)))
        expected = Fraction(domain, space.size)
        ratios = [Fraction(int(v)) / expected for v in vec]
        dev = max(abs(r - 1) for r in ratios)
        max_ratio = max(ratios)
        min_ratio = min(ratios)
        int_dev = max(abs(r - round(r)) for r in ratios)
        verdicts[p] = dev**2 * p <= c**2
        rows.append(_frac_row(p, 1, "max_ratio", max_ratio))
        rows.append(_frac_row(p, 1, "min_ratio", min_ratio))
        rows.append(_frac_row(p, 1, "max_deviation", dev))
        rows.append(_frac_row(p, 1, "nearest_int_deviation", int_dev))
        rows.append(SeriesRow(p, 1, "flat_band", None, None,
                              float(c) * p**-0.5))
        if isinstance(space, ModuleSpace):
            dim_x = word.arity * space.dim
            dim_y = space.dim
        else:
            n = space.group.n
            dim_x = word.arity * (n * n - 1)
            dim_y = n * n - 1
    series = DiagnosticSeries(f"flatness:{word}", dim_x, dim_y, tuple(rows))
    return FlatnessReport(series, verdicts, c)


# -- local densities over Z/n --


def _factorize(n: int) -> List[Tuple[int, int]]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def hx_sequence(ideal: IdealSpec, moduli: Sequence[int],
                budget: int = DEFAULT_COUNT_BUDGET) -> DiagnosticSeries:
    """Solution densities |X(Z/n)| / n^dim over a modulus list.

    Composite n always goes through the prime-power factor counts and
    the product formula; each prime power is counted by lifting.
    """
    rows: List[SeriesRow] = []
    for n in moduli:
        if n < 2:
            raise ValueError("moduli must be at least 2")
        factors = _factorize(n)
        count = 1
        for p, k in factors:
            count *= count_zmod_solutions(ideal.equations, p, k,
                                          budget=budget)[-1]
        h = Fraction(count, n**ideal.dim_q)
        if len(factors) == 1:
            p, k = factors[0]
        else:
            p, k = n, 1
        rows.append(SeriesRow(p, k, "count", count, 1, float(count)))
        rows.append(_frac_row(p, k, "h", h))
    return DiagnosticSeries("h-sequence", ideal.equations.n_in, ideal.dim_q,
                            tuple(rows))


# -- near-flatness exponents --


@dataclass(frozen=True)
class EpsilonReport:
    series: DiagnosticSeries
    epsilon_min: float


def epsilon_flat_estimate(word, carrier, levels: Sequence[Tuple[int, int]],
                          budget: int = DEFAULT_COUNT_BUDGET,
                          workers: int = 1) -> EpsilonReport:
    """(dim X - log_q max fiber) / dim Y over (p, k) levels.

    dim X and dim Y are the generic source and target dimensions of the
    word map, declared from the carrier, never fitted from counts.
    """
    rows: List[SeriesRow] = []
    eps_min = math.inf
    dim_x = dim_y = 0
    for p, k in levels:
        ring = ring_make("fp" if k == 1 else "zmod", p, k=k)
        space = _resolve_space(word, carrier, ring)
        if isinstance(space, ModuleSpace):
            dim_x = word.arity * space.dim
            dim_y = space.dim
        else:
            n = space.group.n
            dim_x = word.arity * (n * n - 1)
            dim_y = n * n - 1
        vec = word_fiber_vector(word, carrier, ring, budget=budget,
                                workers=workers)
        max_fib = max(int(v) for v in vec)
        eps = (dim_x - math.log(max_fib, p**k)) / dim_y
        eps_min = min(eps_min, eps)
        rows.append(SeriesRow(p, k, "max_fiber", max_fib, 1, float(max_fib)))
        rows.append(SeriesRow(p, k, "epsilon_hat", None, None, eps))
    series = DiagnosticSeries(f"epsilon:{word}", dim_x, dim_y, tuple(rows))
    return EpsilonReport(series, eps_min)


# -- log canonical thresholds from jet growth --


@dataclass(frozen=True)
class LctPrimeEstimate:
    p: int
    counts: Dict[int, Tuple[int, ...]]
    dims: Tuple[Optional[int], ...]
    slopes: Tuple[Tuple[float, ...], ...]
    estimate: Optional[Fraction]
    unresolved: Tuple[int, ...]


@dataclass(frozen=True)
class LctReport:
    """Threshold upper bounds n - max_m dim J_m / (m + 1), per prime.

    Jet dimensions come from count slopes across extension fields; a
    slope is accepted only when within the tolerance of an integer, and
    the first passing field pair wins.  Estimates are upper bounds
    because the sup over truncation levels is cut at m_max.
    """

    m_max: int
    tolerance: float
    entries: Tuple[LctPrimeEstimate, ...]

    def entry(self, p: int) -> LctPrimeEstimate:
        for e in self.entries:
            if e.p == p:
                return e
        raise KeyError(p)


def lct_estimate_via_jets(ideal: IdealSpec, m_max: int,
                          primes: Sequence[int],
                          budget: int = DEFAULT_COUNT_BUDGET,
                          s_max: int = 3,
                          tolerance: float = 0.1) -> LctReport:
    if m_max < 0:
        raise ValueError("m_max >= 0")
    pm = ideal.equations
    n_amb = pm.n_in
    entries: List[LctPrimeEstimate] = []
    for p in primes:
        counts: Dict[int, Tuple[int, ...]] = {}
        s_feasible = []
        for s in range(1, s_max + 1):
            if p**s > MAX_TABLE_SIZE:
                break
            s_feasible.append(s)
        dims: List[Optional[int]] = []
        slopes_all: List[Tuple[float, ...]] = []
        unresolved: List[int] = []

        def tower(s: int) -> Tuple[int, ...]:
            if s not in counts:
                base = (ring_make("fp", p) if s == 1
                        else ring_make("fq", p, r=s))
                counts[s] = tuple(
                    count_tpoly_solutions(pm, base, m_max + 1, budget=budget))
            return counts[s]

        for m in range(m_max + 1):
            dim_m: Optional[int] = None
            slopes: List[float] = []
            for s in s_feasible[:-1]:
                c1 = tower(s)[m]
                c2 = tower(s + 1)[m]
                if c1 == 0 or c2 == 0:
                    break
                slope = math.log(c2 / c1, p)
                slopes.append(slope)
                if abs(slope - round(slope)) < tolerance:
                    dim_m = round(slope)
                    break
            dims.append(dim_m)
            slopes_all.append(tuple(slopes))
            if dim_m is None:
                unresolved.append(m)
        if unresolved:
            estimate = None
        else:
            best = max(Fraction(d, m + 1) for m, d in enumerate(dims))
            estimate = Fraction(n_amb) - best
        entries.append(LctPrimeEstimate(p, counts, tuple(dims),
                                        tuple(slopes_all), estimate,
                                        tuple(unresolved)))
    return LctReport(m_max, tolerance, tuple(entries))
