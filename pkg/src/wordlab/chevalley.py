"""Classical simple Lie algebras, matrix algebras, and SL_n carriers.

Each algebra is built from an explicit integer matrix realization: type A
as trace-zero matrices, types B/D as matrices antisymmetric with respect
to the split symmetric forms, type C as the symplectic algebra.  The
structure constants are solved exactly from the matrix brackets, so signs
are pinned by the realization, and every derived table (Jacobi, Killing
form, root metadata) is verified at construction.

Exceptional types are rejected: no uniform matrix model is in scope.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple

import numpy as np

from .rings import BudgetExceeded, Ring, ring_make

DEFAULT_GROUP_BUDGET = 2**24
MAX_CAYLEY = 3000


# -- exact rational linear algebra, small and dense --


def _rref_solve_setup(columns: List[List[Fraction]], nrows: int):
    """Pick pivot rows making the column matrix invertible; return solver data."""
    ncols = len(columns)
    a = [[columns[j][i] for j in range(ncols)] for i in range(nrows)]
    # Gaussian elimination tracking original row indices
    rows = list(range(nrows))
    mat = [row[:] for row in a]
    pivots = []
    col = 0
    for col in range(ncols):
        pivot = None
        for r in range(len(pivots), nrows):
            if mat[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            raise ValueError("basis columns are linearly dependent")
        r0 = len(pivots)
        mat[r0], mat[pivot] = mat[pivot], mat[r0]
        rows[r0], rows[pivot] = rows[pivot], rows[r0]
        pivots.append(rows[r0])
        inv = Fraction(1) / mat[r0][col]
        mat[r0] = [x * inv for x in mat[r0]]
        for r in range(nrows):
            if r != r0 and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[r0])]
    square = [[a[i][j] for j in range(ncols)] for i in pivots]
    return pivots, _invert_rational(square)


def _invert_rational(a: List[List[Fraction]]) -> List[List[Fraction]]:
    n = len(a)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(a)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _bareiss_det(a: List[List[int]]) -> int:
    """Fraction-free determinant of an integer matrix."""
    m = [row[:] for row in a]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _factor(n: int) -> Tuple[int, ...]:
    n = abs(n)
    out = []
    for p in (2, 3, 5):
        while n % p == 0:
            out.append(p)
            n //= p
    f = 7
    while f * f <= n:
        while n % f == 0:
            out.append(f)
            n //= f
        f += 2
    if n > 1:
        out.append(n)
    return tuple(sorted(set(out)))


@dataclass(frozen=True)
class BasisLabel:
    """One basis element: a root vector or a Cartan coordinate."""

    name: str
    kind: str  # "root" or "cartan"
    eps: Tuple[Tuple[int, int], ...]  # sorted (axis index, coefficient)
    height: int  # signed root height; 0 for cartan
    rtype: str  # "a", "b", "c", or "cartan"

    def __str__(self) -> str:
        return self.name


class ChevalleyAlgebra:
    """A classical Lie algebra with exact integer structure tables."""

    def __init__(self, family: str, rank: int):
        if family not in ("A", "B", "C", "D"):
            raise ValueError(
                f"family {family!r} not supported (exceptional types are out of scope)")
        minimum = {"A": 1, "B": 2, "C": 2, "D": 3}[family]
        if rank < minimum:
            raise ValueError(f"type {family} needs rank >= {minimum}")
        self.family = family
        self.rank = rank
        labels, mats, simples = _build_realization(family, rank)
        self.labels: Tuple[BasisLabel, ...] = tuple(labels)
        self.matrices = np.array(mats, dtype=np.int64)
        self.dim = len(labels)
        self.matrix_size = self.matrices.shape[1]
        self._index = {lbl.name: i for i, lbl in enumerate(self.labels)}
        self._simple_roots = simples
        self.structure = self._solve_structure()
        self._verify_tables()
        self.killing = np.einsum("ilm,jml->ij", self.structure, self.structure)
        self._verify_killing()
        self._bad = None

    def __repr__(self) -> str:
        names = {"A": "sl", "B": "so", "C": "sp", "D": "so"}
        n = {"A": self.rank + 1, "B": 2 * self.rank + 1,
             "C": 2 * self.rank, "D": 2 * self.rank}[self.family]
        return f"{names[self.family]}_{n}"

    @property
    def name(self) -> str:
        return repr(self)

    def index(self, label: str) -> int:
        return self._index[label]

    def label(self, i: int) -> BasisLabel:
        return self.labels[i]

    @property
    def bad_primes(self) -> Tuple[int, ...]:
        """Primes dividing det(Killing form); degeneration happens mod these."""
        if self._bad is None:
            det = _bareiss_det([[int(x) for x in row] for row in self.killing])
            if det == 0:
                raise AssertionError("Killing form degenerate over Q")
            self._bad = _factor(det)
        return self._bad

    def bracket_vector(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """[u, v] in basis coordinates, exact over int64."""
        return np.einsum("i,j,ijl->l", u, v, self.structure)

    def _solve_structure(self) -> np.ndarray:
        d, N = self.dim, self.matrix_size
        columns = [[Fraction(int(self.matrices[i].flat[t])) for t in range(N * N)]
                   for i in range(d)]
        pivots, inv = _rref_solve_setup(columns, N * N)
        c = np.zeros((d, d, d), dtype=np.int64)
        for i in range(d):
            for j in range(i + 1, d):
                br = self.matrices[i] @ self.matrices[j] - self.matrices[j] @ self.matrices[i]
                flat = br.flatten()
                rhs = [Fraction(int(flat[t])) for t in pivots]
                coeffs = [sum(inv[a][b] * rhs[b] for b in range(d)) for a in range(d)]
                recon = np.zeros((N, N), dtype=np.int64)
                for l, x in enumerate(coeffs):
                    if x != 0:
                        if x.denominator != 1:
                            raise AssertionError("non-integer structure constant")
                        recon = recon + int(x) * self.matrices[l]
                        c[i, j, l] = int(x)
                        c[j, i, l] = -int(x)
                if not (recon == br).all():
                    raise AssertionError("bracket not in basis span")
        return c

    def _verify_tables(self) -> None:
        c = self.structure
        assert (c == -c.transpose(1, 0, 2)).all()
        # Jacobi on all basis triples: [[i,j],k] + [[j,k],i] + [[k,i],j] = 0
        t = np.einsum("ijm,mkl->ijkl", c, c)
        jac = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
        assert not jac.any(), "Jacobi identity failed"

    def _verify_killing(self) -> None:
        k = self.killing
        assert (k == k.T).all()
        # invariance: kappa([i,j],l) + kappa(j,[i,l]) = 0
        inv1 = np.einsum("ijm,ml->ijl", self.structure, k)
        inv2 = np.einsum("ilm,jm->ijl", self.structure, k)
        assert not (inv1 + inv2).any(), "Killing form not invariant"


def _eps_key(vec: Dict[int, int]) -> Tuple[Tuple[int, int], ...]:
    return tuple(sorted((i, c) for i, c in vec.items() if c != 0))


def _height_from_eps(eps: Dict[int, int], simples: List[Dict[int, int]], axes: int) -> int:
    """Signed height: solve eps = sum_k x_k * simple_k, assert integral."""
    columns = [[Fraction(s.get(i, 0)) for i in range(1, axes + 1)] for s in simples]
    pivots, inv = _rref_solve_setup(columns, axes)
    rhs = [Fraction(eps.get(i + 1, 0)) for i in pivots]
    coeffs = [sum(inv[a][b] * rhs[b] for b in range(len(simples))) for a in range(len(simples))]
    # verify full consistency, the pivot solve only covers a square subsystem
    for i in range(1, axes + 1):
        total = sum(coeffs[kk] * simples[kk].get(i, 0) for kk in range(len(simples)))
        assert total == eps.get(i, 0), "root outside simple-root lattice"
    assert all(x.denominator == 1 for x in coeffs)
    ints = [int(x) for x in coeffs]
    assert all(x >= 0 for x in ints) or all(x <= 0 for x in ints)
    return sum(ints)


def _build_realization(family: str, rank: int):
    n = rank
    if family == "A":
        N = n + 1
        axes = N

        def E(i, j):
            m = np.zeros((N, N), dtype=np.int64)
            m[i - 1, j - 1] = 1
            return m

        simples = [{i: 1, i + 1: -1} for i in range(1, N)]
        labels, mats = [], []
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                if i == j:
                    continue
                eps = {i: 1, j: -1}
                h = _height_from_eps(eps, simples, axes)
                labels.append(BasisLabel(f"e{i}_{j}", "root", _eps_key(eps), h, "a"))
                mats.append(E(i, j))
        for i in range(1, n + 1):
            labels.append(BasisLabel(f"h{i}", "cartan", (), 0, "cartan"))
            mats.append(E(i, i) - E(i + 1, i + 1))
        return labels, mats, simples

    if family == "B":
        N = 2 * n + 1
        axes = n

        def E(i, j):
            m = np.zeros((N, N), dtype=np.int64)
            m[i - 1, j - 1] = 1
            return m

        form = np.zeros((N, N), dtype=np.int64)
        for i in range(n):
            form[i, n + i] = form[n + i, i] = 1
        form[2 * n, 2 * n] = 1
        simples = [{i: 1, i + 1: -1} for i in range(1, n)] + [{n: 1}]
        labels, mats = [], []

        def add(name, rtype, eps, mat):
            assert (mat.T @ form + form @ mat == 0).all(), name
            labels.append(BasisLabel(name, "root", _eps_key(eps),
                                     _height_from_eps(eps, simples, axes), rtype))
            mats.append(mat)

        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i != j:
                    add(f"a{i}_{j}", "a", {i: 1, j: -1}, E(i, j) - E(n + j, n + i))
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                add(f"b{i}_{j}", "b", {i: 1, j: 1}, E(i, n + j) - E(j, n + i))
                add(f"bm{i}_{j}", "b", {i: -1, j: -1}, E(n + j, i) - E(n + i, j))
        for i in range(1, n + 1):
            add(f"c{i}", "c", {i: 1}, E(i, N) - E(N, n + i))
            add(f"cm{i}", "c", {i: -1}, E(n + i, N) - E(N, i))
        _append_cartans(labels, mats, simples, axes)
        return labels, mats, simples

    if family == "C":
        N = 2 * n
        axes = n

        def E(i, j):
            m = np.zeros((N, N), dtype=np.int64)
            m[i - 1, j - 1] = 1
            return m

        form = np.zeros((N, N), dtype=np.int64)
        for i in range(n):
            form[i, n + i] = 1
            form[n + i, i] = -1
        simples = [{i: 1, i + 1: -1} for i in range(1, n)] + [{n: 2}]
        labels, mats = [], []

        def add(name, rtype, eps, mat):
            assert (mat.T @ form + form @ mat == 0).all(), name
            labels.append(BasisLabel(name, "root", _eps_key(eps),
                                     _height_from_eps(eps, simples, axes), rtype))
            mats.append(mat)

        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i != j:
                    add(f"a{i}_{j}", "a", {i: 1, j: -1}, E(i, j) - E(n + j, n + i))
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                if i == j:
                    add(f"b{i}_{i}", "b", {i: 2}, E(i, n + i))
                    add(f"bm{i}_{i}", "b", {i: -2}, E(n + i, i))
                else:
                    add(f"b{i}_{j}", "b", {i: 1, j: 1}, E(i, n + j) + E(j, n + i))
                    add(f"bm{i}_{j}", "b", {i: -1, j: -1}, E(n + i, j) + E(n + j, i))
        _append_cartans(labels, mats, simples, axes)
        return labels, mats, simples

    # family D
    N = 2 * n
    axes = n

    def E(i, j):
        m = np.zeros((N, N), dtype=np.int64)
        m[i - 1, j - 1] = 1
        return m

    form = np.zeros((N, N), dtype=np.int64)
    for i in range(n):
        form[i, n + i] = form[n + i, i] = 1
    simples = [{i: 1, i + 1: -1} for i in range(1, n)] + [{n - 1: 1, n: 1}]
    labels, mats = [], []

    def add(name, rtype, eps, mat):
        assert (mat.T @ form + form @ mat == 0).all(), name
        labels.append(BasisLabel(name, "root", _eps_key(eps),
                                 _height_from_eps(eps, simples, axes), rtype))
        mats.append(mat)

    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                add(f"a{i}_{j}", "a", {i: 1, j: -1}, E(i, j) - E(n + j, n + i))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            add(f"b{i}_{j}", "b", {i: 1, j: 1}, E(i, n + j) - E(j, n + i))
            add(f"bm{i}_{j}", "b", {i: -1, j: -1}, E(n + j, i) - E(n + i, j))
    _append_cartans(labels, mats, simples, axes)
    return labels, mats, simples


def _append_cartans(labels, mats, simples, axes) -> None:
    """Cartan basis h_alpha = [e_alpha, e_{-alpha}] over the simple roots."""
    by_eps = {lbl.eps: m for lbl, m in zip(labels, mats)}
    for idx, alpha in enumerate(simples, start=1):
        plus = by_eps[_eps_key(alpha)]
        minus = by_eps[_eps_key({i: -c for i, c in alpha.items()})]
        labels.append(BasisLabel(f"h{idx}", "cartan", (), 0, "cartan"))
        mats.append(plus @ minus - minus @ plus)


@lru_cache(maxsize=None)
def algebra_make(family: str, rank: int) -> ChevalleyAlgebra:
    """Construct (and cache) a classical algebra; all invariants verified."""
    return ChevalleyAlgebra(family, rank)


def killing_matrix(alg: ChevalleyAlgebra) -> np.ndarray:
    """kappa_{ij} = trace(ad e_i ad e_j), with bad primes on alg.bad_primes."""
    return alg.killing.copy()


def root_classify(alg: ChevalleyAlgebra, label: str) -> Dict[str, int]:
    """Root type (a/b/c/cartan) and height of a basis label."""
    lbl = alg.labels[alg.index(label)]
    return {
        "rtype": lbl.rtype,
        "height": abs(lbl.height),
        "sign": 0 if lbl.height == 0 else (1 if lbl.height > 0 else -1),
    }


class MatrixAlgebra:
    """The full matrix algebra M_n as a module carrier (basis E_{i,j})."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n >= 1")
        self.n = n
        self.dim = n * n
        self.matrix_size = n
        names = []
        mats = np.zeros((self.dim, n, n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                names.append(f"E{i + 1}_{j + 1}")
                mats[i * n + j, i, j] = 1
        self.label_names = tuple(names)
        self.matrices = mats
        # product tensor: E_{ab} E_{cd} = delta_{bc} E_{ad}
        prod = np.zeros((self.dim, self.dim, self.dim), dtype=np.int64)
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for d in range(n):
                        if b == c:
                            prod[a * n + b, c * n + d, a * n + d] = 1
        self.product = prod
        self.structure = prod - prod.transpose(1, 0, 2)

    def __repr__(self) -> str:
        return f"M_{self.n}"

    @property
    def name(self) -> str:
        return repr(self)

    @property
    def labels(self):
        return self.label_names


def mat_identity_packed(ring: Ring, n: int, rows: int = 1) -> np.ndarray:
    out = np.zeros((rows, n * n), dtype=np.int64)
    for i in range(n):
        out[:, i * n + i] = 1
    return out


def mat_mul_packed(ring: Ring, n: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise product of packed n x n matrices over the ring."""
    out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            acc = None
            for k in range(n):
                term = ring.mul_np(a[..., i * n + k], b[..., k * n + j])
                acc = term if acc is None else ring.add_np(acc, term)
            out[..., i * n + j] = acc
    return out


def _mat_minor_det(ring: Ring, n: int, entries: np.ndarray, rows, cols) -> np.ndarray:
    if len(rows) == 1:
        return entries[..., rows[0] * n + cols[0]]
    total = None
    sign = 1
    for c in cols:
        sub = _mat_minor_det(ring, n, entries, rows[1:], tuple(x for x in cols if x != c))
        term = ring.mul_np(entries[..., rows[0] * n + c], sub)
        if sign < 0:
            term = ring.neg_np(term)
        total = term if total is None else ring.add_np(total, term)
        sign = -sign
    return total


def mat_det_packed(ring: Ring, n: int, entries: np.ndarray) -> np.ndarray:
    """Determinant by cofactor expansion; fine for the small n used here."""
    return _mat_minor_det(ring, n, entries, tuple(range(n)), tuple(range(n)))


def mat_adjugate_packed(ring: Ring, n: int, a: np.ndarray) -> np.ndarray:
    """Adjugate; equals the inverse on the det = 1 locus."""
    out = np.zeros_like(a)
    rows = tuple(range(n))
    for i in range(n):
        for j in range(n):
            sub_rows = tuple(r for r in rows if r != j)
            sub_cols = tuple(c for c in rows if c != i)
            minor = _mat_minor_det(ring, n, a, sub_rows, sub_cols)
            if (i + j) % 2 == 1:
                minor = ring.neg_np(minor)
            out[..., i * n + j] = minor
    return out


class MatrixGroup:
    """SL_n over a finite coefficient ring, with full enumeration.

    Elements are stored as packed entry vectors (row major); the
    enumeration order is ascending mixed-radix code.  Inverses come from
    the adjugate, valid since det = 1.
    """

    def __init__(self, n: int, ring: Ring, budget: int = DEFAULT_GROUP_BUDGET):
        if n < 2:
            raise ValueError("n >= 2")
        self.n = n
        self.ring = ring
        total = ring.size ** (n * n)
        if total > budget:
            raise BudgetExceeded(
                f"enumerating SL_{n}({ring!r}) scans {total} matrices, budget {budget}")
        entries = self._all_matrices()
        dets = self._det_vec(entries)
        keep = dets == 1
        self.elements = entries[keep]  # (|G|, n*n) packed entries
        self.order = int(keep.sum())
        self._codes = self._encode(self.elements)
        sort = np.argsort(self._codes)
        self._codes_sorted = self._codes[sort]
        self._sort_perm = sort
        self.identity_index = int(self.index_of(mat_identity_packed(ring, n))[0])
        self._cayley = None
        self._inverse = None

    def __repr__(self) -> str:
        return f"SL_{self.n}({self.ring!r})"

    @property
    def name(self) -> str:
        return repr(self)

    def _all_matrices(self) -> np.ndarray:
        m = self.ring.size
        k = self.n * self.n
        codes = np.arange(m**k, dtype=np.int64)
        out = np.empty((m**k, k), dtype=np.int64)
        for t in range(k):
            out[:, t] = (codes // m**t) % m
        return out

    def _encode(self, entries: np.ndarray) -> np.ndarray:
        m = self.ring.size
        code = np.zeros(entries.shape[0], dtype=np.int64)
        for t in range(entries.shape[1] - 1, -1, -1):
            code = code * m + entries[:, t]
        return code

    def index_of(self, entries: np.ndarray) -> np.ndarray:
        codes = self._encode(entries)
        pos = np.searchsorted(self._codes_sorted, codes)
        if (pos >= self.order).any() or (self._codes_sorted[pos] != codes).any():
            raise ValueError("matrix is not in the group (det != 1?)")
        return self._sort_perm[pos]

    def _det_vec(self, entries: np.ndarray) -> np.ndarray:
        return mat_det_packed(self.ring, self.n, entries)

    def multiply(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Row-wise matrix product of packed entry arrays."""
        return mat_mul_packed(self.ring, self.n, a, b)

    def inverse_entries(self, a: np.ndarray) -> np.ndarray:
        """Adjugate; exact inverse on the det = 1 locus."""
        return mat_adjugate_packed(self.ring, self.n, a)

    def cayley(self) -> np.ndarray:
        """Full multiplication table, cayley[i, j] = index of g_i g_j."""
        if self._cayley is None:
            if self.order > MAX_CAYLEY:
                raise BudgetExceeded(
                    f"Cayley table for |G| = {self.order} above limit {MAX_CAYLEY}")
            g = self.order
            table = np.empty((g, g), dtype=np.int32)
            for i in range(g):
                prod = self.multiply(np.repeat(self.elements[i][None, :], g, axis=0),
                                     self.elements)
                table[i] = self.index_of(prod)
            self._cayley = table
        return self._cayley

    def inverse_perm(self) -> np.ndarray:
        if self._inverse is None:
            inv = self.inverse_entries(self.elements)
            self._inverse = self.index_of(inv).astype(np.int32)
        return self._inverse


def group_make(n: int, ring: Ring, budget: int = DEFAULT_GROUP_BUDGET) -> MatrixGroup:
    """SL_n(ring) with multiplication, adjugate inverses and enumeration."""
    return MatrixGroup(n, ring, budget=budget)


def unipotent_cover_fraction(n: int, p: int, steps: int) -> Fraction:
    """Fraction of SL_2n(F_p) reached by alternating block unipotent factors.

    Factor i is the upper (odd i) or lower (even i) block unipotent
    subgroup; the walk starts from the upper one.  Returns the exact
    fraction of the group covered by length-`steps` products.
    """
    if steps < 1:
        raise ValueError("steps >= 1")
    group = group_make(2 * n, ring_make("fp", p))
    size = 2 * n
    uppers, lowers = [], []
    for code in range(p ** (n * n)):
        block = [(code // p**t) % p for t in range(n * n)]
        up = np.zeros((1, size * size), dtype=np.int64)
        lo = np.zeros((1, size * size), dtype=np.int64)
        for i in range(size):
            up[0, i * size + i] = 1
            lo[0, i * size + i] = 1
        for bi in range(n):
            for bj in range(n):
                up[0, bi * size + (n + bj)] = block[bi * n + bj]
                lo[0, (n + bi) * size + bj] = block[bi * n + bj]
        uppers.append(group.index_of(up)[0])
        lowers.append(group.index_of(lo)[0])
    upper_idx = np.array(uppers, dtype=np.int64)
    lower_idx = np.array(lowers, dtype=np.int64)
    cayley = group.cayley()
    reached = upper_idx.copy()
    for step in range(2, steps + 1):
        factor = lower_idx if step % 2 == 0 else upper_idx
        prods = cayley[np.ix_(reached, factor)]
        reached = np.unique(prods)
    return Fraction(int(reached.size), group.order)


def parse_carrier_literal(text: str):
    """CLI carrier literals: A:2, B:3, C:2, D:4, mat:3, sl:3.

    Returns ("algebra", ChevalleyAlgebra), ("mat", MatrixAlgebra) or
    ("group", n); group carriers bind their ring at use.
    """
    try:
        head, num = text.split(":", 1)
        num_i = int(num)
    except ValueError:
        raise ValueError(f"bad carrier literal {text!r}")
    head = head.strip()
    if head in ("A", "B", "C", "D"):
        return ("algebra", algebra_make(head, num_i))
    if head == "mat":
        return ("mat", MatrixAlgebra(num_i))
    if head == "sl":
        return ("group", num_i)
    raise ValueError(f"unknown carrier kind {head!r}")
