"""Exact solution counting over residue towers.

Two backends share one lifting scheme: counting zeros of integer
polynomial systems over Z/p^k, and over F_q[t]/t^k with q a prime power.
Both climb level by level: a solution x mod pi^j extends to x + pi^j v
exactly when the level-j coefficient of F(x) cancels against J_F(x_0) v
over the residue field, where x_0 is the residue of x.  Intermediate
levels materialize their solution sets; the top level only counts.

A separate progressive-filtering enumerator counts common zeros of a
system over F_p directly, expanding the assignment table variable block
by variable block and discarding rows as soon as an equation's support
is covered.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .polymaps import Poly, PolyMap
from .rings import BudgetExceeded, Ring, ring_make

DEFAULT_POINT_BUDGET = 2**26


# -- formal partial derivatives, for residue Jacobians --


def partial_derivative(pm: PolyMap, var: int) -> PolyMap:
    polys: List[Poly] = []
    for coord in pm.coords:
        out: Poly = {}
        for e, c in coord:
            if e[var] == 0:
                continue
            e2 = list(e)
            e2[var] -= 1
            key = tuple(e2)
            out[key] = out.get(key, 0) + c * e[var]
        polys.append({k: v for k, v in out.items() if v})
    return PolyMap.make(pm.varnames, polys)


def jacobian_polymaps(pm: PolyMap) -> Tuple[PolyMap, ...]:
    """One PolyMap per input variable; column i of the Jacobian."""
    return tuple(partial_derivative(pm, i) for i in range(pm.n_in))


# -- scalar linear algebra over a Ring that is a field --


def _field_solve_all(ring: Ring, rows: Sequence[Sequence[int]],
                     rhs: Sequence[int]) -> Optional[List[Tuple[int, ...]]]:
    """All solutions of A v = b over a field ring; None if inconsistent."""
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    n = len(rows[0]) if rows else 0
    pivots: List[int] = []
    rank = 0
    for col in range(n):
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = ring.inv(m[rank][col])
        m[rank] = [ring.mul(inv, x) for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col]
                m[r] = [ring.sub(x, ring.mul(f, y))
                        for x, y in zip(m[r], m[rank])]
        pivots.append(col)
        rank += 1
    for r in range(rank, len(m)):
        if m[r][n] != 0:
            return None
    free = [c for c in range(n) if c not in pivots]
    sols: List[Tuple[int, ...]] = []
    for combo in itertools.product(range(ring.size), repeat=len(free)):
        v = [0] * n
        for c, val in zip(free, combo):
            v[c] = val
        for r, col in enumerate(pivots):
            acc = m[r][n]
            for c, val in zip(free, combo):
                acc = ring.sub(acc, ring.mul(m[r][c], val))
            v[col] = acc
        sols.append(tuple(v))
    return sols


# -- residue-level brute force --


def _enumerate_residue_solutions(pm: PolyMap, ring: Ring,
                                 budget: int) -> np.ndarray:
    n = pm.n_in
    total = ring.size**n
    if total > budget:
        raise BudgetExceeded(
            f"residue enumeration needs {total} points, budget {budget}")
    codes = np.arange(total, dtype=np.int64)
    pts = np.empty((total, n), dtype=np.int64)
    for i in range(n):
        pts[:, i] = (codes // ring.size**i) % ring.size
    vals = pm.evaluate(ring, pts)
    return pts[np.all(vals == 0, axis=1)]


# -- Z/p^k backend --


def count_zmod_solutions(pm: PolyMap, p: int, k: int,
                         budget: int = DEFAULT_POINT_BUDGET) -> List[int]:
    """|{x in (Z/p^j)^n : F(x) = 0}| for every 1 <= j <= k."""
    if k < 1:
        raise ValueError("k must be at least 1")
    base = ring_make("fp", p)
    pts = _enumerate_residue_solutions(pm, base, budget)
    counts = [int(pts.shape[0])]
    jacs = jacobian_polymaps(pm)
    for j in range(1, k):
        level_ring = ring_make("zmod", p, k=j + 1)
        vals = pm.evaluate(level_ring, pts % level_ring.size)
        assert np.all(vals % p**j == 0), "lower-level residue broke"
        c = (vals // p**j) % p
        x0 = pts % p
        jac = np.stack([jc.evaluate(base, x0) for jc in jacs], axis=2)
        # jac[t] is the n_out x n Jacobian at point t over F_p
        if j == k - 1:
            counts.append(_count_lift_layer(jac, c, p, pm.n_in))
        else:
            new_pts = []
            total = 0
            for t in range(pts.shape[0]):
                sols = _field_solve_all(
                    base, jac[t].tolist(), ((-c[t]) % p).tolist())
                if sols is None:
                    continue
                total += len(sols)
                if total > budget:
                    raise BudgetExceeded(
                        f"level {j + 1} solution set exceeds budget {budget}")
                for v in sols:
                    new_pts.append(pts[t] + p**j * np.array(v, dtype=np.int64))
            pts = (np.array(new_pts, dtype=np.int64).reshape(-1, pm.n_in))
            counts.append(int(pts.shape[0]))
    return counts


def _count_lift_layer(jac: np.ndarray, c: np.ndarray, q: int,
                      n_in: int) -> int:
    """Sum of |{v : J v = -c}| over the point axis, mod-q field arithmetic."""
    n_pts, n_out, _ = jac.shape
    if n_out == 1:
        row = jac[:, 0, :] % q
        rhs = (-c[:, 0]) % q
        nonzero = np.any(row != 0, axis=1)
        count = int(np.count_nonzero(nonzero)) * q ** (n_in - 1)
        count += int(np.count_nonzero(~nonzero & (rhs == 0))) * q**n_in
        return count
    ring = ring_make("fp", q)
    total = 0
    for t in range(n_pts):
        sols = _field_solve_all(ring, jac[t].tolist(), ((-c[t]) % q).tolist())
        if sols is not None:
            total += len(sols)
    return total


# -- F_q[t]/t^k backend --


def _tconv(ring: Ring, a: np.ndarray, b: np.ndarray, trunc: int) -> np.ndarray:
    """Truncated convolution of coefficient arrays (..., trunc)."""
    out = np.zeros(np.broadcast(a, b).shape[:-1] + (trunc,), dtype=np.int64)
    for s in range(trunc):
        acc = out[..., s]
        for u in range(s + 1):
            acc = ring.add_np(acc, ring.mul_np(a[..., u], b[..., s - u]))
        out[..., s] = acc
    return out


def _tpoly_evaluate(pm: PolyMap, ring: Ring, coeffs: np.ndarray,
                    trunc: int) -> np.ndarray:
    """Evaluate on points with F_q[t]/t^trunc coordinates.

    coeffs has shape (N, n_in, w) with w <= trunc; missing high
    coefficients are zero.  Result (N, n_out, trunc).
    """
    if coeffs.shape[2] < trunc:
        pad = np.zeros(coeffs.shape[:2] + (trunc - coeffs.shape[2],),
                       dtype=np.int64)
        coeffs = np.concatenate([coeffs, pad], axis=2)
    n_pts = coeffs.shape[0]
    one = np.zeros(trunc, dtype=np.int64)
    one[0] = ring.embed_int(1)
    powers: Dict[Tuple[int, int], np.ndarray] = {}

    def power(i: int, e: int) -> np.ndarray:
        if e == 0:
            return np.broadcast_to(one, (n_pts, trunc))
        key = (i, e)
        if key not in powers:
            if e == 1:
                powers[key] = coeffs[:, i, :]
            else:
                half = power(i, e // 2)
                sq = _tconv(ring, half, half, trunc)
                powers[key] = (
                    sq if e % 2 == 0 else _tconv(ring, sq, coeffs[:, i, :],
                                                 trunc))
        return powers[key]

    out = np.zeros((n_pts, pm.n_out, trunc), dtype=np.int64)
    for l, coord in enumerate(pm.coords):
        acc = np.zeros((n_pts, trunc), dtype=np.int64)
        for e, coef in coord:
            term = np.zeros((n_pts, trunc), dtype=np.int64)
            term[:, 0] = ring.embed_int(coef)
            for i, exp in enumerate(e):
                if exp:
                    term = _tconv(ring, term, power(i, exp), trunc)
            acc = ring.add_np(acc, term)
        out[:, l, :] = acc
    return out


def count_tpoly_solutions(pm: PolyMap, base: Ring, k: int,
                          budget: int = DEFAULT_POINT_BUDGET) -> List[int]:
    """|{x in (F_q[t]/t^j)^n : F(x) = 0}| for every 1 <= j <= k.

    base must be a finite field ring (fp or fq); k >= 1.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    pts0 = _enumerate_residue_solutions(pm, base, budget)
    coeffs = pts0[:, :, None]  # (N, n, 1)
    counts = [int(pts0.shape[0])]
    jacs = jacobian_polymaps(pm)
    neg = {v: base.neg(v) for v in range(base.size)}
    for j in range(1, k):
        vals = _tpoly_evaluate(pm, base, coeffs, j + 1)
        assert not np.any(vals[:, :, :j]), "lower-level residue broke"
        c = vals[:, :, j]
        x0 = coeffs[:, :, 0]
        jac = np.stack([jc.evaluate(base, x0) for jc in jacs], axis=2)
        if j == k - 1:
            counts.append(_count_lift_layer_field(base, jac, c, pm.n_in))
        else:
            new_coeffs = []
            total = 0
            for t in range(coeffs.shape[0]):
                rhs = [neg[int(v)] for v in c[t]]
                sols = _field_solve_all(base, jac[t].tolist(), rhs)
                if sols is None:
                    continue
                total += len(sols)
                if total > budget:
                    raise BudgetExceeded(
                        f"level {j + 1} solution set exceeds budget {budget}")
                for v in sols:
                    ext = np.concatenate(
                        [coeffs[t], np.array(v, dtype=np.int64)[:, None]],
                        axis=1)
                    new_coeffs.append(ext)
            coeffs = (np.array(new_coeffs, dtype=np.int64)
                      .reshape(-1, pm.n_in, j + 1))
            counts.append(int(coeffs.shape[0]))
    return counts


def _count_lift_layer_field(ring: Ring, jac: np.ndarray, c: np.ndarray,
                            n_in: int) -> int:
    n_pts, n_out, _ = jac.shape
    q = ring.size
    if n_out == 1:
        row = jac[:, 0, :]
        rhs = c[:, 0]
        nonzero = np.any(row != 0, axis=1)
        count = int(np.count_nonzero(nonzero)) * q ** (n_in - 1)
        count += int(np.count_nonzero(~nonzero & (rhs == 0))) * q**n_in
        return count
    total = 0
    for t in range(n_pts):
        rhs = [ring.neg(int(v)) for v in c[t]]
        sols = _field_solve_all(ring, jac[t].tolist(), rhs)
        if sols is not None:
            total += len(sols)
    return total


# -- progressive-filtering brute force over F_p --


def count_affine_solutions(pm: PolyMap, p: int,
                           budget: int = DEFAULT_POINT_BUDGET) -> int:
    """Common zeros in F_p^n by block expansion and early filtering.

    Equations are applied as soon as the expanded assignment prefix
    covers their support, so sparse leading equations prune the table
    before the tail variables multiply it.
    """
    ring = ring_make("fp", p)
    n = pm.n_in
    support = []
    for coord in pm.coords:
        top = 0
        for e, _ in coord:
            for i in range(n - 1, -1, -1):
                if e[i]:
                    top = max(top, i + 1)
                    break
        support.append(top)
    order = sorted(range(pm.n_out), key=lambda l: support[l])
    rows = np.zeros((1, 0), dtype=np.int64)
    filled = 0
    for l in order:
        need = support[l]
        while filled < need:
            if rows.shape[0] * p > budget:
                raise BudgetExceeded(
                    f"expansion to {rows.shape[0] * p} rows exceeds budget")
            rows = np.repeat(rows, p, axis=0)
            col = np.tile(np.arange(p, dtype=np.int64),
                          rows.shape[0] // p)[:, None]
            rows = np.hstack([rows, col])
            filled += 1
        sub = PolyMap.make(pm.varnames[:filled],
                           [{e[:filled]: c for e, c in pm.coords[l]}])
        vals = sub.evaluate(ring, rows)
        rows = rows[vals[:, 0] == 0]
        if rows.shape[0] == 0:
            return 0
    return int(rows.shape[0]) * p ** (n - filled)
