"""Finite local coefficient rings with exact arithmetic.

Four kinds: prime fields F_p, prime power fields F_{p^r}, integer
quotients Z/p^k and truncated polynomial rings F_p[t]/t^k.  Every element
is a packed integer in ``range(size)``: the least nonnegative residue for
the integer kinds, and base-p digit packing of the coefficient vector
(constant coefficient in the least significant digit) for the polynomial
kinds.  Enumeration order is ascending packed value, so F_2[t]/t^2
enumerates as 0, 1, t, 1+t.

Unramified extensions of Z/p^k (Galois rings, r > 1 with k > 1) are
rejected on purpose: F_{p^r} and F_p[t]/t^k together cover the use cases
and keep arithmetic elementary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

KIND_PRIME_FIELD = "prime-field"
KIND_PRIME_POWER_FIELD = "prime-power-field"
KIND_INTEGERS_MOD = "integers-mod-prime-power"
KIND_TRUNCATED_POLY = "truncated-polynomials"

_KIND_ALIASES = {
    "fp": KIND_PRIME_FIELD,
    "fq": KIND_PRIME_POWER_FIELD,
    "zmod": KIND_INTEGERS_MOD,
    "tpoly": KIND_TRUNCATED_POLY,
    KIND_PRIME_FIELD: KIND_PRIME_FIELD,
    KIND_PRIME_POWER_FIELD: KIND_PRIME_POWER_FIELD,
    KIND_INTEGERS_MOD: KIND_INTEGERS_MOD,
    KIND_TRUNCATED_POLY: KIND_TRUNCATED_POLY,
}

_SHORT_KIND = {
    KIND_PRIME_FIELD: "fp",
    KIND_PRIME_POWER_FIELD: "fq",
    KIND_INTEGERS_MOD: "zmod",
    KIND_TRUNCATED_POLY: "tpoly",
}

# Residues must fit a machine word; counts use Python ints and never overflow.
MAX_SIZE = 2**63
# Above this, pairwise lookup tables are not built and vectorized
# multiplication falls back to a per-element loop.
MAX_TABLE_SIZE = 4096
DEFAULT_ENUM_BUDGET = 2**24


class NotUnitError(ValueError):
    """Raised when inverting a non-unit (signals a singular matrix downstream)."""


class BudgetExceeded(RuntimeError):
    """An exhaustive operation would exceed its configured budget."""


_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 2^64."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n == q:
            return True
        if n % q == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# -- polynomial helpers over F_p (coefficient tuples, low degree first) --


def _poly_trim(c: Sequence[int]) -> Tuple[int, ...]:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> Tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_divmod(a: Sequence[int], b: Sequence[int], p: int):
    """Division with remainder in F_p[t]; b need not be monic."""
    a = list(_poly_trim(a))
    b = _poly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(b[-1], -1, p)
    q = [0] * max(0, len(a) - len(b) + 1)
    while len(a) >= len(b):
        shift = len(a) - len(b)
        coef = a[-1] * inv_lead % p
        q[shift] = coef
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * bi) % p
        a = list(_poly_trim(a))
        if not a:
            break
    return _poly_trim(q), _poly_trim(a)


def _poly_is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Exhaustive trial division by every monic polynomial of degree <= r/2."""
    mod = _poly_trim(modulus)
    r = len(mod) - 1
    if r < 1 or mod[-1] != 1:
        return False
    if r == 1:
        return True
    for d in range(1, r // 2 + 1):
        for packed in range(p**d):
            cand = _digits(packed, p, d) + (1,)
            _, rem = _poly_divmod(mod, cand, p)
            if not rem:
                return False
    return True


def _least_irreducible(p: int, r: int) -> Tuple[int, ...]:
    """Lexicographically least monic irreducible of degree r over F_p.

    Order: ascending packed value of the non-leading coefficient vector,
    constant coefficient least significant.
    """
    for packed in range(p**r):
        cand = _digits(packed, p, r) + (1,)
        if _poly_is_irreducible(cand, p):
            return cand
    raise AssertionError("no irreducible polynomial found (unreachable)")


def _digits(x: int, base: int, n: int) -> Tuple[int, ...]:
    out = []
    for _ in range(n):
        out.append(x % base)
        x //= base
    return tuple(out)


def _pack(coeffs: Sequence[int], base: int) -> int:
    out = 0
    for c in reversed(list(coeffs)):
        out = out * base + c % base
    return out


class Ring:
    """A finite coefficient ring; elements are packed ints in range(size).

    Immutable after construction (lazy lookup tables aside); safe to share
    across worker processes.
    """

    __slots__ = (
        "kind",
        "p",
        "k",
        "r",
        "modulus",
        "size",
        "_red_rows",
        "_mul_table",
        "_inv_table",
        "_powers",
    )

    def __init__(self, kind: str, p: int, k: int = 1, r: int = 1,
                 modulus: Optional[Sequence[int]] = None):
        kind = _KIND_ALIASES.get(kind, kind)
        if kind not in _SHORT_KIND:
            raise ValueError(f"unknown ring kind {kind!r}")
        if not is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if kind == KIND_PRIME_FIELD:
            k = r = 1
            modulus = None
        elif kind == KIND_PRIME_POWER_FIELD:
            k = 1
            if r < 1:
                raise ValueError("extension degree r must be >= 1")
            if p**r > MAX_TABLE_SIZE**2:
                raise ValueError(f"field size p^r = {p**r} above the configured limit")
            if modulus is None:
                modulus = _least_irreducible(p, r)
            else:
                modulus = tuple(c % p for c in modulus)
                if len(_poly_trim(modulus)) != r + 1 or modulus[-1] != 1:
                    raise ValueError("modulus must be monic of degree r")
                if not _poly_is_irreducible(modulus, p):
                    raise ValueError(f"modulus {list(modulus)} is reducible over F_{p}")
        elif kind == KIND_INTEGERS_MOD:
            if r != 1:
                raise ValueError("Galois rings (unramified Z_q, r > 1) are out of scope")
            if k < 1:
                raise ValueError("level k must be >= 1")
            modulus = None
        else:  # truncated polynomials
            if r != 1:
                raise ValueError("truncated polynomials use r = 1")
            if k < 1:
                raise ValueError("level k must be >= 1")
            modulus = None
        size = p**r if kind == KIND_PRIME_POWER_FIELD else p**k
        if size > MAX_SIZE:
            raise ValueError(f"ring size {size} exceeds 2^63")
        self.kind = kind
        self.p = p
        self.k = k
        self.r = r
        self.modulus = tuple(modulus) if modulus is not None else None
        self.size = size
        self._mul_table = None
        self._inv_table = None
        self._powers = tuple(p**i for i in range(max(k, r) + 1))
        # reduction of t^j (j = r .. 2r-2) modulo the field modulus
        self._red_rows = ()
        if kind == KIND_PRIME_POWER_FIELD and r > 1:
            cur = _poly_trim([(-c) % p for c in self.modulus[:-1]])  # t^r
            self._red_rows = (cur,)
            for _ in range(r - 2):
                cur = self._reduce_poly(_poly_mul(cur, (0, 1), p))
                self._red_rows = self._red_rows + (cur,)

    # construction is deterministic, so identity is structural
    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Ring)
            and (self.kind, self.p, self.k, self.r, self.modulus)
            == (other.kind, other.p, other.k, other.r, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.p, self.k, self.r, self.modulus))

    def __repr__(self) -> str:
        if self.kind == KIND_PRIME_FIELD:
            return f"F_{self.p}"
        if self.kind == KIND_PRIME_POWER_FIELD:
            return f"F_{self.size}"
        if self.kind == KIND_INTEGERS_MOD:
            return f"Z/{self.size}"
        return f"F_{self.p}[t]/t^{self.k}"

    @property
    def short_kind(self) -> str:
        return _SHORT_KIND[self.kind]

    @property
    def is_field(self) -> bool:
        return self.kind in (KIND_PRIME_FIELD, KIND_PRIME_POWER_FIELD)

    @property
    def is_local_quotient(self) -> bool:
        return self.kind in (KIND_INTEGERS_MOD, KIND_TRUNCATED_POLY)

    def _reduce_poly(self, c: Sequence[int]) -> Tuple[int, ...]:
        """Reduce a coefficient tuple modulo the field modulus."""
        c = list(c)
        while len(c) > self.r:
            top = c.pop()
            if top:
                row = self._red_rows[len(c) - self.r]
                for i, ri in enumerate(row):
                    c[i] = (c[i] + top * ri) % self.p
        return _poly_trim(c)

    # -- scalar arithmetic on packed values --

    def check(self, a: int) -> int:
        a = int(a)
        if not 0 <= a < self.size:
            raise ValueError(f"{a} is not a canonical element of {self!r}")
        return a

    def coeffs(self, a: int) -> Tuple[int, ...]:
        """Coefficient vector (integer kinds: the single residue)."""
        if self.kind in (KIND_PRIME_FIELD, KIND_INTEGERS_MOD):
            return (a,)
        n = self.r if self.kind == KIND_PRIME_POWER_FIELD else self.k
        return _digits(a, self.p, n)

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        if self.kind in (KIND_PRIME_FIELD, KIND_INTEGERS_MOD):
            (c,) = coeffs
            return c % self.size
        n = self.r if self.kind == KIND_PRIME_POWER_FIELD else self.k
        coeffs = list(coeffs)[:n] + [0] * max(0, n - len(coeffs))
        return _pack(coeffs, self.p)

    def add(self, a: int, b: int) -> int:
        if self.kind in (KIND_PRIME_FIELD, KIND_INTEGERS_MOD):
            return (a + b) % self.size
        p = self.p
        out = 0
        for i, pi in enumerate(self._powers[:-1]):
            out += ((a // pi + b // pi) % p) * pi
        return out

    def neg(self, a: int) -> int:
        if self.kind in (KIND_PRIME_FIELD, KIND_INTEGERS_MOD):
            return (self.size - a) % self.size
        p = self.p
        out = 0
        for pi in self._powers[:-1]:
            out += ((p - (a // pi) % p) % p) * pi
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.kind in (KIND_PRIME_FIELD, KIND_INTEGERS_MOD):
            return a * b % self.size
        pa = self.coeffs(a)
        pb = self.coeffs(b)
        prod = _poly_mul(pa, pb, self.p)
        if self.kind == KIND_PRIME_POWER_FIELD:
            prod = self._reduce_poly(prod)
        else:
            prod = prod[: self.k]
        return self.from_coeffs(prod)

    def is_unit(self, a: int) -> bool:
        if self.kind == KIND_PRIME_POWER_FIELD:
            return a != 0
        return a % self.p != 0

    def inv(self, a: int) -> int:
        if not self.is_unit(a):
            raise NotUnitError(f"{self.format_element(a)} is not a unit in {self!r}")
        if self.kind in (KIND_PRIME_FIELD, KIND_INTEGERS_MOD):
            return pow(a, -1, self.size)
        if self.kind == KIND_PRIME_POWER_FIELD:
            return self.pow(a, self.size - 2)
        # truncated polynomials: forward substitution on the series
        c = list(self.coeffs(a))
        p = self.p
        b0 = pow(c[0], -1, p)
        out = [b0] + [0] * (self.k - 1)
        for m in range(1, self.k):
            s = sum(c[i] * out[m - i] for i in range(1, m + 1)) % p
            out[m] = (-b0 * s) % p
        return self.from_coeffs(out)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def scale(self, n: int, a: int) -> int:
        """Integer multiple n*a (image of n under Z -> R times a)."""
        return self.mul(self.embed_int(n), a)

    def embed_int(self, n: int) -> int:
        if self.kind in (KIND_PRIME_FIELD, KIND_INTEGERS_MOD):
            return n % self.size
        return n % self.p

    def units(self) -> Tuple[int, ...]:
        return tuple(a for a in range(self.size) if self.is_unit(a))

    def reduce_level(self, a: int, k_new: int) -> int:
        """Image of a under the level reduction R -> R at level k_new <= k."""
        if not self.is_local_quotient:
            raise ValueError(f"{self!r} has no level structure")
        if k_new > self.k:
            raise ValueError(f"cannot reduce level {self.k} to {k_new}")
        if k_new < 1:
            raise ValueError("target level must be >= 1")
        # packed truncation is reduction for both local kinds
        return a % self.p**k_new

    def at_level(self, k_new: int) -> "Ring":
        if not self.is_local_quotient:
            raise ValueError(f"{self!r} has no level structure")
        if k_new == self.k:
            return self
        if k_new == 1:
            return Ring(KIND_PRIME_FIELD, self.p)
        return Ring(self.kind, self.p, k=k_new)

    def residue_field(self) -> "Ring":
        if self.kind == KIND_PRIME_POWER_FIELD:
            return self
        return Ring(KIND_PRIME_FIELD, self.p)

    def format_element(self, a: int) -> str:
        if self.kind in (KIND_PRIME_FIELD, KIND_INTEGERS_MOD):
            return str(a)
        terms = []
        for i, c in enumerate(self.coeffs(a)):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append("t" if c == 1 else f"{c}t")
            else:
                terms.append(f"t^{i}" if c == 1 else f"{c}t^{i}")
        return "+".join(terms) if terms else "0"

    # -- vectorized arithmetic on numpy arrays of packed values --

    def add_np(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.kind in (KIND_PRIME_FIELD, KIND_INTEGERS_MOD):
            return (a + b) % self.size
        p = self.p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for pi in self._powers[:-1]:
            out += ((a // pi + b // pi) % p) * pi
        return out

    def neg_np(self, a: np.ndarray) -> np.ndarray:
        if self.kind in (KIND_PRIME_FIELD, KIND_INTEGERS_MOD):
            return (self.size - a) % self.size
        p = self.p
        out = np.zeros(np.shape(a), dtype=np.int64)
        for pi in self._powers[:-1]:
            out += ((p - (a // pi) % p) % p) * pi
        return out

    def sub_np(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.add_np(a, self.neg_np(b))

    def mul_np(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.kind in (KIND_PRIME_FIELD, KIND_INTEGERS_MOD):
            return a * b % self.size
        return self.mul_table()[a, b]

    def mul_table(self) -> np.ndarray:
        if self._mul_table is None:
            if self.size > MAX_TABLE_SIZE:
                raise BudgetExceeded(
                    f"no multiplication table for {self!r} (size {self.size})")
            t = np.zeros((self.size, self.size), dtype=np.int64)
            for a in range(self.size):
                for b in range(a, self.size):
                    t[a, b] = t[b, a] = self.mul(a, b)
            self._mul_table = t
        return self._mul_table

    def inv_table(self) -> np.ndarray:
        """inv_table[a] = a^{-1} for units, -1 for non-units."""
        if self._inv_table is None:
            t = np.full(self.size, -1, dtype=np.int64)
            for a in range(self.size):
                if self.is_unit(a):
                    t[a] = self.inv(a)
            self._inv_table = t
        return self._inv_table

    def unit_mask(self) -> np.ndarray:
        return self.inv_table() >= 0


@dataclass(frozen=True)
class RingElement:
    """A ring element in canonical packed form."""

    ring: Ring
    value: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.ring.check(self.value))

    def __add__(self, other: "RingElement") -> "RingElement":
        self._same(other)
        return RingElement(self.ring, self.ring.add(self.value, other.value))

    def __sub__(self, other: "RingElement") -> "RingElement":
        self._same(other)
        return RingElement(self.ring, self.ring.sub(self.value, other.value))

    def __mul__(self, other: "RingElement") -> "RingElement":
        self._same(other)
        return RingElement(self.ring, self.ring.mul(self.value, other.value))

    def __neg__(self) -> "RingElement":
        return RingElement(self.ring, self.ring.neg(self.value))

    def __pow__(self, e: int) -> "RingElement":
        return RingElement(self.ring, self.ring.pow(self.value, e))

    def inverse(self) -> "RingElement":
        return RingElement(self.ring, self.ring.inv(self.value))

    def is_unit(self) -> bool:
        return self.ring.is_unit(self.value)

    def _same(self, other: "RingElement") -> None:
        if self.ring != other.ring:
            raise ValueError(f"mixed rings {self.ring!r} and {other.ring!r}")

    def __str__(self) -> str:
        return self.ring.format_element(self.value)


def ring_make(kind: str, p: int, k: int = 1, r: int = 1,
              modulus: Optional[Sequence[int]] = None) -> Ring:
    """Build and validate a coefficient ring.

    kind is one of prime-field, prime-power-field, integers-mod-prime-power,
    truncated-polynomials (short aliases fp, fq, zmod, tpoly).  For fq with
    no modulus given, the lexicographically least monic irreducible of
    degree r is chosen, so construction is deterministic.
    """
    return Ring(kind, p, k=k, r=r, modulus=modulus)


def unit_inverse(x: RingElement) -> RingElement:
    """Multiplicative inverse; raises NotUnitError on non-units."""
    return x.inverse()


def reduce_level(x: RingElement, k_new: int) -> RingElement:
    """Level reduction for the two local kinds; a ring homomorphism."""
    target = x.ring.at_level(k_new)
    return RingElement(target, x.ring.reduce_level(x.value, k_new))


def enumerate_ring(ring: Ring, budget: int = DEFAULT_ENUM_BUDGET) -> Iterator[RingElement]:
    """Yield every element exactly once, in ascending packed order."""
    if ring.size > budget:
        raise BudgetExceeded(
            f"enumerating {ring!r} needs {ring.size} elements, budget {budget}")
    for a in range(ring.size):
        yield RingElement(ring, a)


def parse_ring_literal(text: str, modulus: Optional[Sequence[int]] = None) -> Ring:
    """Parse CLI ring literals: fp:5, fq:2^3, zmod:3^2, tpoly:3^2."""
    try:
        short, spec = text.split(":", 1)
    except ValueError:
        raise ValueError(f"bad ring literal {text!r} (expected kind:p or kind:p^k)")
    short = short.strip().lower()
    if short not in ("fp", "fq", "zmod", "tpoly"):
        raise ValueError(f"unknown ring kind {short!r} in literal {text!r}")
    if "^" in spec:
        p_text, e_text = spec.split("^", 1)
        p, e = int(p_text), int(e_text)
    else:
        p, e = int(spec), 1
    if short == "fp":
        if e != 1:
            raise ValueError("fp takes a bare prime; use fq/zmod/tpoly for powers")
        return ring_make("fp", p)
    if short == "fq":
        return ring_make("fq", p, r=e, modulus=modulus)
    if short == "zmod":
        return ring_make("zmod", p, k=e)
    return ring_make("tpoly", p, k=e)
