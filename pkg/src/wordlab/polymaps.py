"""Polynomial maps: word maps in coordinates, jets, weights, symbols.

A PolyMap is a sparse exact-integer polynomial map between coordinate
spaces.  Word maps on algebras expand through structure constants; word
maps on SL_n use ambient matrix entries with inverses replaced by
adjugates (exact on the det = 1 locus).  Jet prolongation comes in two
flavors: the formal-derivative convention (no division by u!) and the
Taylor-coefficient convention; the two differ over small primes, and
point counting must use the Taylor one.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .chevalley import ChevalleyAlgebra, MatrixAlgebra
from .rings import Ring
from .words import AssocWord, GroupWord, JetVar, LieWord, left_normalize

Key = Tuple[int, ...]
Poly = Dict[Key, int]
# One integer weight per input variable, in variable-table order.
WeightVector = Tuple[int, ...]

_JET_SUFFIX = re.compile(r"\^\((\d+)\)$")
_SLOT_PREFIX = re.compile(r"^x(\d+)(?::|$)")


def poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            c = out.get(key, 0) + ca * cb
            if c:
                out[key] = c
            elif key in out:
                del out[key]
    return out


def poly_add_into(acc: Poly, other: Poly, scale: int = 1) -> None:
    for e, c in other.items():
        v = acc.get(e, 0) + scale * c
        if v:
            acc[e] = v
        elif e in acc:
            del acc[e]


def monomial_degree(e: Key) -> int:
    return sum(e)


def weighted_degree(e: Key, omega: Sequence[int]) -> int:
    return sum(a * w for a, w in zip(e, omega))


@dataclass(frozen=True)
class PolyMap:
    """Exact polynomial map; coefficients are integers, monomials sorted."""

    varnames: Tuple[str, ...]
    coords: Tuple[Tuple[Tuple[Key, int], ...], ...]

    @staticmethod
    def make(varnames: Sequence[str], polys: Sequence[Poly]) -> "PolyMap":
        names = tuple(varnames)
        n = len(names)
        canon = []
        for poly in polys:
            items = []
            for e, c in poly.items():
                if len(e) != n:
                    raise ValueError("exponent vector length mismatch")
                if isinstance(c, Fraction):
                    if c.denominator != 1:
                        raise ValueError(f"non-integer coefficient {c}")
                    c = int(c)
                if c:
                    items.append((tuple(int(x) for x in e), int(c)))
            items.sort(key=lambda ec: ec[0])
            canon.append(tuple(items))
        return PolyMap(names, tuple(canon))

    @property
    def n_in(self) -> int:
        return len(self.varnames)

    @property
    def n_out(self) -> int:
        return len(self.coords)

    def coord_dicts(self) -> List[Poly]:
        return [dict(c) for c in self.coords]

    def degree(self) -> int:
        return max((monomial_degree(e) for c in self.coords for e, _ in c), default=0)

    def evaluate(self, ring: Ring, pts: np.ndarray) -> np.ndarray:
        """Exact evaluation on packed points, shape (N, n_in) -> (N, n_out)."""
        pts = np.asarray(pts, dtype=np.int64)
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.shape[1] != self.n_in:
            raise ValueError("point arity mismatch")
        n_pts = pts.shape[0]
        pow_cache: Dict[Tuple[int, int], np.ndarray] = {}

        def var_power(i: int, e: int) -> np.ndarray:
            got = pow_cache.get((i, e))
            if got is None:
                if e == 1:
                    got = pts[:, i]
                else:
                    half = var_power(i, e // 2)
                    got = ring.mul_np(half, half)
                    if e % 2:
                        got = ring.mul_np(got, pts[:, i])
                pow_cache[(i, e)] = got
            return got

        out = np.zeros((n_pts, self.n_out), dtype=np.int64)
        for j, coord in enumerate(self.coords):
            acc = np.zeros(n_pts, dtype=np.int64)
            for e, c in coord:
                term = np.full(n_pts, ring.embed_int(c), dtype=np.int64)
                for i, a in enumerate(e):
                    if a:
                        term = ring.mul_np(term, var_power(i, a))
                acc = ring.add_np(acc, term)
            out[:, j] = acc
        return out

    def to_json(self) -> dict:
        return {
            "vars": list(self.varnames),
            "coords": [[[list(e), c] for e, c in coord] for coord in self.coords],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"), sort_keys=True)

    @staticmethod
    def from_json(data: dict) -> "PolyMap":
        polys = [{tuple(e): c for e, c in coord} for coord in data["coords"]]
        return PolyMap.make(tuple(data["vars"]), polys)


@dataclass(frozen=True)
class IdealSpec:
    """Fiber equations plus the declared expected dimension over Q.

    The dimension is user bookkeeping consumed by the diagnostics; it is
    never inferred from counts.
    """

    equations: PolyMap
    dim_q: int

    def __post_init__(self):
        if self.equations.n_out < 1:
            raise ValueError("ideal needs at least one polynomial")


# -- word maps as polynomial maps --


def _carrier_basis(carrier) -> Tuple[Tuple[str, ...], np.ndarray]:
    if isinstance(carrier, ChevalleyAlgebra):
        return tuple(l.name for l in carrier.labels), carrier.structure
    if isinstance(carrier, MatrixAlgebra):
        return tuple(carrier.label_names), carrier.structure
    raise ValueError(f"unsupported carrier {carrier!r}")


def jet_variable_names(base: Sequence[str], m: int) -> Tuple[str, ...]:
    """Order-major jet table: all order-0 names, then order 1, ..."""
    out = []
    for u in range(m + 1):
        for name in base:
            out.append(name if u == 0 else f"{name}^({u})")
    return tuple(out)


def split_jet_name(name: str) -> Tuple[str, int]:
    m = _JET_SUFFIX.search(name)
    if m is None:
        return name, 0
    return name[: m.start()], int(m.group(1))


def slot_of_name(name: str) -> int:
    base, _ = split_jet_name(name)
    m = _SLOT_PREFIX.match(base)
    if m is None:
        raise ValueError(f"variable {name!r} has no slot prefix")
    return int(m.group(1))


def word_to_polymap(word, carrier) -> PolyMap:
    """Coordinates of the word map on the carrier.

    Lie and associative words expand through the carrier's structure
    tensors; group words on SL_n produce a map on the n^2 ambient
    entries per copy, with inverse letters replaced by adjugates.
    """
    if isinstance(word, GroupWord):
        return _group_word_polymap(word, carrier)
    if isinstance(word, LieWord):
        labels, tensor = _carrier_basis(carrier)
        word = left_normalize(word)
        return _tensor_word_polymap(word.terms, word.arity, labels, tensor,
                                    flat=False)
    if isinstance(word, AssocWord):
        if not isinstance(carrier, MatrixAlgebra):
            raise ValueError("associative words need a matrix algebra carrier")
        return _tensor_word_polymap(word.terms, word.arity,
                                    tuple(carrier.label_names), carrier.product,
                                    flat=True)
    raise ValueError(f"unsupported word {word!r}")


def _leaf_slot_order(leaf) -> Tuple[int, int]:
    if isinstance(leaf, JetVar):
        return leaf.s, leaf.u
    return int(leaf), 0


def _tensor_word_polymap(terms, arity: int, labels: Tuple[str, ...],
                         tensor: np.ndarray, flat: bool) -> PolyMap:
    dim = len(labels)
    max_u = 0
    for t, _ in terms:
        for leaf in _term_leaves(t):
            max_u = max(max_u, _leaf_slot_order(leaf)[1])
    base = tuple(f"x{s}:{lbl}" for s in range(1, arity + 1) for lbl in labels)
    names = jet_variable_names(base, max_u)
    n_in = len(names)

    def var_index(s: int, u: int, i: int) -> int:
        return u * (arity * dim) + (s - 1) * dim + i

    nz = [[] for _ in range(dim)]
    ti, tj, tl = np.nonzero(tensor)
    for i, j, l in zip(ti, tj, tl):
        nz[l].append((int(i), int(j), int(tensor[i, j, l])))

    def leaf_vec(leaf) -> List[Poly]:
        s, u = _leaf_slot_order(leaf)
        vec: List[Poly] = []
        for i in range(dim):
            e = [0] * n_in
            e[var_index(s, u, i)] = 1
            vec.append({tuple(e): 1})
        return vec

    def combine(left: List[Poly], right: List[Poly]) -> List[Poly]:
        out: List[Poly] = [dict() for _ in range(dim)]
        for l in range(dim):
            for i, j, c in nz[l]:
                if left[i] and right[j]:
                    poly_add_into(out[l], poly_mul(left[i], right[j]), c)
        return out

    def fold_tree(node) -> List[Poly]:
        if not isinstance(node, tuple) or isinstance(node, JetVar):
            return leaf_vec(node)
        return combine(fold_tree(node[0]), fold_tree(node[1]))

    def fold_flat(leaves) -> List[Poly]:
        vec = leaf_vec(leaves[0])
        for leaf in leaves[1:]:
            vec = combine(vec, leaf_vec(leaf))
        return vec

    acc: List[Poly] = [dict() for _ in range(dim)]
    for node, coef in terms:
        frac = Fraction(coef)
        if frac.denominator != 1:
            raise ValueError("polynomial maps need integer word coefficients")
        vec = fold_flat(node) if flat else fold_tree(node)
        for l in range(dim):
            poly_add_into(acc[l], vec[l], int(frac))
    return PolyMap.make(names, acc)


def _term_leaves(node):
    if not isinstance(node, tuple) or isinstance(node, JetVar):
        yield node
        return
    for part in node:
        if isinstance(part, tuple) and not isinstance(part, JetVar):
            yield from _term_leaves(part)
        else:
            yield part


def _group_word_polymap(word: GroupWord, carrier) -> PolyMap:
    if isinstance(carrier, int):
        n = carrier
    elif hasattr(carrier, "n") and hasattr(carrier, "ring"):
        n = carrier.n
    elif isinstance(carrier, tuple) and len(carrier) == 2 and carrier[0] == "group":
        n = carrier[1]
    else:
        raise ValueError(f"unsupported carrier {carrier!r} for a group word")
    r = word.arity
    labels = [f"E{i}_{j}" for i in range(1, n + 1) for j in range(1, n + 1)]
    names = tuple(f"x{s}:{lbl}" for s in range(1, r + 1) for lbl in labels)
    n_in = len(names)

    def copy_matrix(s: int) -> List[List[Poly]]:
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                e = [0] * n_in
                e[(s - 1) * n * n + i * n + j] = 1
                row.append({tuple(e): 1})
            out.append(row)
        return out

    def mat_mul(a, b):
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc: Poly = {}
                for k in range(n):
                    poly_add_into(acc, poly_mul(a[i][k], b[k][j]))
                row.append(acc)
            out.append(row)
        return out

    def adjugate(a):
        idx = tuple(range(n))

        def minor(rows, cols):
            if len(rows) == 1:
                return a[rows[0]][cols[0]]
            acc: Poly = {}
            sign = 1
            for t, c in enumerate(cols):
                sub = minor(rows[1:], tuple(x for x in cols if x != c))
                poly_add_into(acc, poly_mul(a[rows[0]][c], sub), sign)
                sign = -sign
            return acc

        out = []
        for i in range(n):
            row = []
            for j in range(n):
                rows = tuple(r_ for r_ in idx if r_ != j)
                cols = tuple(c_ for c_ in idx if c_ != i)
                m = minor(rows, cols) if n > 1 else {(0,) * n_in: 1}
                if (i + j) % 2 == 1:
                    m = {e: -c for e, c in m.items()}
                row.append(m)
            out.append(row)
        return out

    const_one = {(0,) * n_in: 1}
    result = [[const_one if i == j else {} for j in range(n)] for i in range(n)]
    inverses: Dict[int, List[List[Poly]]] = {}
    for gen, exp in word.letters:
        if exp == 1:
            factor = copy_matrix(gen)
        else:
            if gen not in inverses:
                inverses[gen] = adjugate(copy_matrix(gen))
            factor = inverses[gen]
        result = mat_mul(result, factor)
    coords = [result[i][j] for i in range(n) for j in range(n)]
    return PolyMap.make(names, coords)


# -- jets --


def jet_of_polymap(pm: PolyMap, m: int, convention: str = "derivative") -> PolyMap:
    """J_m: inputs and outputs replicated per jet order 0..m.

    convention "derivative": block u is the u-th formal derivative
    (iterated Leibniz, no division).  convention "taylor": block u is
    the t^u coefficient after substituting truncated Taylor expansions;
    over Q the two differ by u! factors, over F_p they genuinely differ
    once u reaches p, and counting points must use "taylor".
    """
    if m < 0:
        raise ValueError("m >= 0")
    if convention not in ("derivative", "taylor"):
        raise ValueError(f"unknown convention {convention!r}")
    for name in pm.varnames:
        if _JET_SUFFIX.search(name):
            raise ValueError("input map already lives on jet variables")
    if m == 0:
        return pm
    n = pm.n_in
    names = jet_variable_names(pm.varnames, m)
    n_big = len(names)

    def lift_key(e: Key) -> Key:
        return tuple(e) + (0,) * (n_big - n)

    blocks: List[List[Poly]] = [[] for _ in range(m + 1)]
    if convention == "derivative":
        for coord in pm.coords:
            f: Poly = {lift_key(e): c for e, c in coord}
            blocks[0].append(f)
            cur = f
            for u in range(1, m + 1):
                cur = _formal_derivative_poly(cur, n, m)
                blocks[u].append(cur)
    else:
        for coord in pm.coords:
            series = _taylor_substitute(coord, n, m, n_big)
            for u in range(m + 1):
                blocks[u].append(series.get(u, {}))
    out: List[Poly] = []
    for u in range(m + 1):
        out.extend(blocks[u])
    return PolyMap.make(names, out)


def _formal_derivative_poly(f: Poly, n: int, m: int) -> Poly:
    """One Leibniz step; variable (u, i) maps to (u+1, i)."""
    out: Poly = {}
    for e, c in f.items():
        for idx, a in enumerate(e):
            if not a:
                continue
            u, i = divmod(idx, n)
            if u + 1 > m:
                raise ValueError("derivative order exceeds jet truncation")
            lst = list(e)
            lst[idx] -= 1
            lst[(u + 1) * n + i] += 1
            key = tuple(lst)
            v = out.get(key, 0) + a * c
            if v:
                out[key] = v
            elif key in out:
                del out[key]
    return out


def _taylor_substitute(coord, n: int, m: int, n_big: int) -> Dict[int, Poly]:
    """Substitute x_i -> sum_u x_i^{(u)} t^u and truncate at t^m."""

    def tmul(a: Dict[int, Poly], b: Dict[int, Poly]) -> Dict[int, Poly]:
        out: Dict[int, Poly] = {}
        for da, pa in a.items():
            for db, pb in b.items():
                d = da + db
                if d > m:
                    continue
                tgt = out.setdefault(d, {})
                poly_add_into(tgt, poly_mul(pa, pb))
        return out

    var_series: List[Dict[int, Poly]] = []
    for i in range(n):
        s: Dict[int, Poly] = {}
        for u in range(m + 1):
            e = [0] * n_big
            e[u * n + i] = 1
            s[u] = {tuple(e): 1}
        var_series.append(s)

    total: Dict[int, Poly] = {}
    for e, c in coord:
        term: Dict[int, Poly] = {0: {(0,) * n_big: c}}
        for i, a in enumerate(e):
            for _ in range(a):
                term = tmul(term, var_series[i])
        for d, poly in term.items():
            tgt = total.setdefault(d, {})
            poly_add_into(tgt, poly)
    return total


# -- weights and symbols --


def weight_symbol(pm: PolyMap, omega: Sequence[int]) -> PolyMap:
    """Keep, per coordinate, exactly the monomials of least omega-degree."""
    omega = tuple(omega)
    if len(omega) != pm.n_in:
        raise ValueError("weight length mismatch")
    polys: List[Poly] = []
    for coord in pm.coords:
        if not coord:
            polys.append({})
            continue
        degs = [weighted_degree(e, omega) for e, _ in coord]
        lo = min(degs)
        polys.append({e: c for (e, c), d in zip(coord, degs) if d == lo})
    return PolyMap.make(pm.varnames, polys)


def canonical_weights(kind: str, *, d: Optional[int] = None, r: Optional[int] = None,
                      m: Optional[int] = None,
                      varnames: Optional[Sequence[str]] = None,
                      base: int = 10,
                      blocks: Tuple[Tuple[int, ...], ...] = ((2, 3), (3, 1))):
    """The degeneration weight families.

    averaging: (d+1)^u per jet order u.  monomialization: (d+1)^ord with
    ord = u*r + s, strictly separating every variable.  pure-type:
    (d+1)^s per copy s.  level-separation: a tuple of per-copy weight
    vectors (default: the two-copy table with multipliers (2,3) and
    (3,1) on a base-10 ladder), meant to be applied after one
    convolution.
    """
    if kind == "averaging":
        if d is None or varnames is None:
            raise ValueError("averaging weights need d and varnames")
        return tuple((d + 1) ** split_jet_name(nm)[1] for nm in varnames)
    if kind == "monomialization":
        if d is None or r is None or varnames is None:
            raise ValueError("monomialization weights need d, r, varnames")
        out = []
        for nm in varnames:
            u = split_jet_name(nm)[1]
            s = slot_of_name(nm)
            if not 1 <= s <= r:
                raise ValueError(f"slot {s} outside 1..{r}")
            out.append((d + 1) ** (u * r + s))
        return tuple(out)
    if kind == "pure-type":
        if d is None or varnames is None:
            raise ValueError("pure-type weights need d and varnames")
        return tuple((d + 1) ** slot_of_name(nm) for nm in varnames)
    if kind == "level-separation":
        if m is None:
            raise ValueError("level-separation weights need m")
        if varnames is not None:
            out_blocks = []
            for blk in blocks:
                ws = []
                for nm in varnames:
                    u = split_jet_name(nm)[1]
                    s = slot_of_name(nm)
                    if not 1 <= s <= len(blk):
                        raise ValueError(f"slot {s} outside the block table")
                    ws.append(blk[s - 1] * base**u)
                out_blocks.append(tuple(ws))
            return tuple(out_blocks)
        if r is None:
            raise ValueError("level-separation weights need r or varnames")
        out_blocks = []
        for blk in blocks:
            if len(blk) != r:
                raise ValueError("block length must equal r")
            ws = []
            for u in range(m + 1):
                for s in range(1, r + 1):
                    ws.append(blk[s - 1] * base**u)
            out_blocks.append(tuple(ws))
        return tuple(out_blocks)
    raise ValueError(f"unknown weight kind {kind!r}")


# -- generating checks --


GENERATING_EXHAUSTIVE_BUDGET = 2**16


def generating_check(pm: PolyMap, primes: Sequence[int], seed: int = 0,
                     samples: int = 400) -> Dict[int, dict]:
    """Does the image affinely span the whole target space mod p?

    A positive verdict is always exact (a spanning certificate); a
    negative verdict is exact only when the domain was enumerated
    exhaustively, and is labeled heuristic otherwise.
    """
    from .rings import ring_make

    # A constant map (every monomial of every coordinate has zero exponent
    # vector) has a one-point image, so a negative verdict is exact no
    # matter how large the domain is.
    constant = all(not any(e) for coord in pm.coords for e, _ in coord)
    report: Dict[int, dict] = {}
    for p in primes:
        ring = ring_make("fp", p)
        n_in, n_out = pm.n_in, pm.n_out
        if constant:
            base = pm.evaluate(ring, np.zeros((1, n_in), dtype=np.int64))[0]
            c_vec = [1] + [0] * (n_out - 1)
            report[p] = {
                "generating": False,
                "mode": "exhaustive",
                "samples": 1,
                "witness": {"functional": c_vec, "offset": int(base[0]) % p},
            }
            continue
        exhaustive = p**n_in <= GENERATING_EXHAUSTIVE_BUDGET
        if exhaustive:
            codes = np.arange(p**n_in, dtype=np.int64)
            pts = np.empty((p**n_in, n_in), dtype=np.int64)
            for i in range(n_in):
                pts[:, i] = (codes // p**i) % p
        else:
            sweep = []
            for i in range(n_in):
                for v in range(1, p):
                    row = [0] * n_in
                    row[i] = v
                    sweep.append(row)
            for i in range(n_in - 1):
                row = [0] * n_in
                row[i] = row[i + 1] = 1
                sweep.append(row)
            rng = np.random.default_rng(np.random.Philox(key=seed + p))
            rand = rng.integers(0, p, size=(samples, n_in))
            pts = np.vstack([np.zeros((1, n_in), dtype=np.int64),
                             np.array(sweep, dtype=np.int64), rand])
        values = pm.evaluate(ring, pts)
        diffs = (values - values[0]) % p
        rank = _rank_mod_p(diffs, p)
        entry = {
            "generating": rank == n_out,
            "mode": "exhaustive" if exhaustive else "heuristic",
            "samples": int(pts.shape[0]),
        }
        if rank < n_out:
            entry["witness"] = _span_complement_witness(diffs, values[0], p)
        report[p] = entry
    return report


def _rank_mod_p(rows: np.ndarray, p: int) -> int:
    mat = (rows % p).astype(np.int64)
    n_cols = mat.shape[1]
    rank = 0
    for col in range(n_cols):
        piv = np.nonzero(mat[rank:, col])[0]
        if piv.size == 0:
            continue
        r = rank + int(piv[0])
        mat[[rank, r]] = mat[[r, rank]]
        inv = pow(int(mat[rank, col]), -1, p)
        mat[rank] = mat[rank] * inv % p
        mask = mat[:, col] != 0
        mask[rank] = False
        mat[mask] = (mat[mask] - np.outer(mat[mask, col], mat[rank])) % p
        rank += 1
        if rank == min(mat.shape):
            break
    return rank


def _span_complement_witness(diffs: np.ndarray, base: np.ndarray, p: int) -> dict:
    """A functional c with c . (image - base) = 0 on all observed values."""
    mat = (diffs % p).astype(np.int64)
    n = mat.shape[1]
    # kernel vector of the observed difference matrix: mat @ c = 0
    m2 = mat.copy()
    pivots = []
    rank = 0
    for col in range(n):
        piv = np.nonzero(m2[rank:, col])[0]
        if piv.size == 0:
            continue
        r = rank + int(piv[0])
        m2[[rank, r]] = m2[[r, rank]]
        inv = pow(int(m2[rank, col]), -1, p)
        m2[rank] = m2[rank] * inv % p
        mask = m2[:, col] != 0
        mask[rank] = False
        m2[mask] = (m2[mask] - np.outer(m2[mask, col], m2[rank])) % p
        pivots.append(col)
        rank += 1
    free = [c for c in range(n) if c not in pivots]
    c_vec = np.zeros(n, dtype=np.int64)
    if free:
        f = free[0]
        c_vec[f] = 1
        for row_i, col in enumerate(pivots):
            c_vec[col] = (-int(m2[row_i, f])) % p
    offset = int(np.dot(c_vec, base) % p)
    return {"functional": [int(x) for x in c_vec], "offset": offset}


# -- ideals --


def parse_polynomials(lines: Iterable[str], n_vars: Optional[int] = None) -> PolyMap:
    """One polynomial per line, in the associative-word sum grammar.

    Extends the word grammar by constant terms, so fiber equations like
    ``x1 x4 - x2 x3 - 1`` parse directly.
    """
    from .words import _split_top_terms, _take_coefficient, _tokenize

    raw = []  # per line: list of (coef, generator list)
    for line in lines:
        if not line.strip():
            continue
        terms = []
        for sign, chunk in _split_top_terms(_tokenize(line)):
            coef, chunk = _take_coefficient(chunk)
            gens = []
            for tok, pos in chunk:
                if not re.fullmatch(r"x\d+", tok):
                    raise ValueError(f"expected a plain variable, got {tok!r}")
                g = int(tok[1:])
                if g < 1:
                    raise ValueError("variable indices start at 1")
                gens.append(g)
            frac = sign * Fraction(coef)
            if frac.denominator != 1:
                raise ValueError("ideal coefficients must be integers")
            terms.append((int(frac), gens))
        if not terms:
            raise ValueError("empty polynomial line")
        raw.append(terms)
    if not raw:
        raise ValueError("no polynomials given")
    arity = max((g for terms in raw for _, gens in terms for g in gens),
                default=0)
    if n_vars is not None:
        if arity > n_vars:
            raise ValueError("polynomial uses more variables than declared")
        arity = n_vars
    names = tuple(f"x{i}" for i in range(1, arity + 1))
    polys: List[Poly] = []
    for terms in raw:
        poly: Poly = {}
        for coef, gens in terms:
            e = [0] * arity
            for g in gens:
                e[g - 1] += 1
            key = tuple(e)
            v = poly.get(key, 0) + coef
            if v:
                poly[key] = v
            elif key in poly:
                del poly[key]
        polys.append(poly)
    return PolyMap.make(names, polys)


def ideal_from_strings(lines: Sequence[str], dim_q: int,
                       n_vars: Optional[int] = None) -> IdealSpec:
    return IdealSpec(parse_polynomials(lines, n_vars), dim_q)


@lru_cache(maxsize=None)
def ideal_sl(n: int) -> IdealSpec:
    """det = 1 in the n^2 ambient matrix entries; dim = n^2 - 1."""
    import itertools

    n_in = n * n
    names = tuple(f"x{k}" for k in range(1, n_in + 1))
    poly: Poly = {}
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for a in range(n) for b in range(a + 1, n)
                         if perm[a] > perm[b])
        e = [0] * n_in
        for i in range(n):
            e[i * n + perm[i]] += 1
        poly[tuple(e)] = (-1) ** inversions
    poly_minus_one = dict(poly)
    zero = (0,) * n_in
    poly_minus_one[zero] = poly_minus_one.get(zero, 0) - 1
    return IdealSpec(PolyMap.make(names, [poly_minus_one]), n * n - 1)


def word_fiber_ideal(word, carrier, target: Sequence[int]) -> IdealSpec:
    """Equations (word map) - target = 0, with dim bookkeeping from the carrier."""
    pm = word_to_polymap(word, carrier)
    if len(target) != pm.n_out:
        raise ValueError("target length mismatch")
    polys = []
    for coord, tv in zip(pm.coords, target):
        poly = dict(coord)
        zero = (0,) * pm.n_in
        poly[zero] = poly.get(zero, 0) - int(tv)
        if not poly[zero]:
            del poly[zero]
        polys.append(poly)
    dim_q = pm.n_in - pm.n_out
    return IdealSpec(PolyMap.make(pm.varnames, polys), dim_q)
