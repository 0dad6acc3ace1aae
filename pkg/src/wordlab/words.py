"""Free group, free Lie and free associative words.

Parsing, free reduction, disjoint-variable concatenation, left-normed
rewriting, pure-type decomposition, formal derivatives in jet variables,
and the symbol-and-degree computation through the truncated
exponential/logarithm in the free associative algebra.

Lie and associative words carry exact rational coefficients.  Bracket
trees are nested pairs with integer leaves (generator s names X_s) or
JetVar leaves (generator plus derivative order); a derivative order of
zero is always stored as the bare integer, so underived words have one
canonical form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union


@dataclass(frozen=True)
class JetVar:
    """Jet variable X_s^(u): generator index s, derivative order u >= 1.

    Deliberately not a tuple subclass: bracket trees are plain 2-tuples,
    and a tuple-like JetVar(1,2) would collide with the tree [x1,x2] as a
    dict key.
    """

    s: int
    u: int


Leaf = Union[int, JetVar]
Tree = Union[Leaf, tuple]


class WordSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DegreeExceedsTruncation(ValueError):
    """The symbol computation was truncated below the word's degree."""


def _jet(s: int, u: int) -> Leaf:
    return s if u == 0 else JetVar(s, u)


def leaf_generator(leaf: Leaf) -> int:
    return leaf.s if isinstance(leaf, JetVar) else leaf


def leaf_order(leaf: Leaf) -> int:
    return leaf.u if isinstance(leaf, JetVar) else 0


def jet_rank(leaf: Leaf, arity: int) -> int:
    """Total order ord(X_s^(u)) = u*arity + s."""
    return leaf_order(leaf) * arity + leaf_generator(leaf)


def tree_leaves(tree: Tree) -> List[Leaf]:
    if not isinstance(tree, tuple) or isinstance(tree, JetVar):
        return [tree]
    return tree_leaves(tree[0]) + tree_leaves(tree[1])


def tree_degree(tree: Tree) -> int:
    return len(tree_leaves(tree))


def _tree_key(tree: Tree):
    if isinstance(tree, JetVar):
        return (0, tree.s, tree.u)
    if isinstance(tree, int):
        return (0, tree, 0)
    return (1, _tree_key(tree[0]), _tree_key(tree[1]))


def _leaf_str(leaf: Leaf) -> str:
    if isinstance(leaf, JetVar):
        return f"x{leaf.s}^({leaf.u})"
    return f"x{leaf}"


def tree_str(tree: Tree) -> str:
    if not isinstance(tree, tuple) or isinstance(tree, JetVar):
        return _leaf_str(tree)
    return f"[{tree_str(tree[0])},{tree_str(tree[1])}]"


def _coef_str(c: Fraction, first: bool) -> str:
    sign = "-" if c < 0 else ("" if first else "+")
    a = abs(c)
    body = "" if a == 1 else (f"{a} " if a.denominator == 1 else f"{a.numerator}/{a.denominator} ")
    return f"{sign} {body}".replace("  ", " ") if not first else f"{sign}{body}"


def _canonical_terms(terms: Dict, key) -> Tuple:
    items = [(t, Fraction(c)) for t, c in terms.items() if c != 0]
    items.sort(key=lambda tc: (tree_degree(tc[0]), key(tc[0])))
    return tuple(items)


@dataclass(frozen=True)
class GroupWord:
    """A freely reduced word in the free group F_r."""

    arity: int
    letters: Tuple[Tuple[int, int], ...]  # (generator, +1 or -1)

    @staticmethod
    def make(letters: Iterable[Tuple[int, int]], arity: Optional[int] = None) -> "GroupWord":
        reduced: List[Tuple[int, int]] = []
        for g, e in letters:
            if e not in (1, -1):
                raise ValueError("letters carry exponent +1 or -1")
            if reduced and reduced[-1] == (g, -e):
                reduced.pop()
            else:
                reduced.append((g, e))
        max_gen = max((g for g, _ in reduced), default=0)
        if arity is None:
            arity = max_gen
        elif max_gen > arity:
            raise ValueError(f"generator x{max_gen} exceeds declared arity {arity}")
        return GroupWord(arity, tuple(reduced))

    @property
    def length(self) -> int:
        return len(self.letters)

    def inverse(self) -> "GroupWord":
        return GroupWord(self.arity, tuple((g, -e) for g, e in reversed(self.letters)))

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        """Product inside the same free group (with free reduction)."""
        arity = max(self.arity, other.arity)
        return GroupWord.make(self.letters + other.letters, arity)

    def shift(self, offset: int) -> "GroupWord":
        return GroupWord(self.arity + offset, tuple((g + offset, e) for g, e in self.letters))

    def variables(self) -> Tuple[int, ...]:
        return tuple(sorted({g for g, _ in self.letters}))

    def __str__(self) -> str:
        if not self.letters:
            return "<empty>"
        out = []
        for g, e in self.letters:
            out.append(f"x{g}" if e == 1 else f"x{g}^-1")
        return " ".join(out)


def group_commutator(a: GroupWord, b: GroupWord) -> GroupWord:
    return a * b * a.inverse() * b.inverse()


def engel_word(n: int) -> GroupWord:
    """[..[[x1,x2],x2]..,x2] with n brackets, as a group word in F_2."""
    x = GroupWord.make([(1, 1)], arity=2)
    y = GroupWord.make([(2, 1)], arity=2)
    w = x
    for _ in range(n):
        w = group_commutator(w, y)
    return w


@dataclass(frozen=True)
class LieWord:
    """Exact-rational combination of bracket trees over X_1..X_r."""

    arity: int
    terms: Tuple[Tuple[Tree, Fraction], ...]

    @staticmethod
    def make(terms: Dict[Tree, Fraction], arity: Optional[int] = None) -> "LieWord":
        canon = _canonical_terms(terms, _tree_key)
        max_gen = max((leaf_generator(l) for t, _ in canon for l in tree_leaves(t)), default=0)
        if arity is None:
            arity = max_gen
        elif max_gen > arity:
            raise ValueError(f"generator x{max_gen} exceeds declared arity {arity}")
        return LieWord(arity, canon)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Maximal nonvanishing grade."""
        return max((tree_degree(t) for t, _ in self.terms), default=0)

    def is_homogeneous(self) -> bool:
        return len({tree_degree(t) for t, _ in self.terms}) <= 1

    def terms_dict(self) -> Dict[Tree, Fraction]:
        return dict(self.terms)

    def __add__(self, other: "LieWord") -> "LieWord":
        out = self.terms_dict()
        for t, c in other.terms:
            out[t] = out.get(t, Fraction(0)) + c
        return LieWord.make(out, max(self.arity, other.arity))

    def scale(self, c) -> "LieWord":
        c = Fraction(c)
        return LieWord.make({t: c * v for t, v in self.terms}, self.arity)

    def bracket(self, other: "LieWord") -> "LieWord":
        out: Dict[Tree, Fraction] = {}
        for t1, c1 in self.terms:
            for t2, c2 in other.terms:
                key = (t1, t2)
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return LieWord.make(out, max(self.arity, other.arity))

    def shift(self, offset: int) -> "LieWord":
        return LieWord.make(
            {_shift_tree(t, offset): c for t, c in self.terms}, self.arity + offset)

    def variables(self) -> Tuple[int, ...]:
        return tuple(sorted({leaf_generator(l) for t, _ in self.terms for l in tree_leaves(t)}))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for i, (t, c) in enumerate(self.terms):
            out.append(f"{_coef_str(c, i == 0)}{tree_str(t)}")
        return " ".join(out).strip()


def _shift_tree(tree: Tree, offset: int) -> Tree:
    if isinstance(tree, JetVar):
        return JetVar(tree.s + offset, tree.u)
    if isinstance(tree, int):
        return tree + offset
    return (_shift_tree(tree[0], offset), _shift_tree(tree[1], offset))


@dataclass(frozen=True)
class AssocWord:
    """Exact-rational combination of generator strings (flat tuples)."""

    arity: int
    terms: Tuple[Tuple[Tuple[Leaf, ...], Fraction], ...]

    @staticmethod
    def make(terms: Dict[Tuple[Leaf, ...], Fraction], arity: Optional[int] = None) -> "AssocWord":
        canon = [(tuple(t), Fraction(c)) for t, c in terms.items() if c != 0]
        canon.sort(key=lambda tc: (len(tc[0]), tuple(_tree_key(l) for l in tc[0])))
        max_gen = max((leaf_generator(l) for t, _ in canon for l in t), default=0)
        if arity is None:
            arity = max_gen
        elif max_gen > arity:
            raise ValueError(f"generator x{max_gen} exceeds declared arity {arity}")
        return AssocWord(arity, tuple(canon))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((len(t) for t, _ in self.terms), default=0)

    def is_homogeneous(self) -> bool:
        return len({len(t) for t, _ in self.terms}) <= 1

    def terms_dict(self) -> Dict[Tuple[Leaf, ...], Fraction]:
        return dict(self.terms)

    def __add__(self, other: "AssocWord") -> "AssocWord":
        out = self.terms_dict()
        for t, c in other.terms:
            out[t] = out.get(t, Fraction(0)) + c
        return AssocWord.make(out, max(self.arity, other.arity))

    def scale(self, c) -> "AssocWord":
        c = Fraction(c)
        return AssocWord.make({t: c * v for t, v in self.terms}, self.arity)

    def __mul__(self, other: "AssocWord") -> "AssocWord":
        out: Dict[Tuple[Leaf, ...], Fraction] = {}
        for t1, c1 in self.terms:
            for t2, c2 in other.terms:
                key = t1 + t2
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return AssocWord.make(out, max(self.arity, other.arity))

    def shift(self, offset: int) -> "AssocWord":
        return AssocWord.make(
            {tuple(_shift_tree(l, offset) for l in t): c for t, c in self.terms},
            self.arity + offset)

    def variables(self) -> Tuple[int, ...]:
        return tuple(sorted({leaf_generator(l) for t, _ in self.terms for l in t}))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for i, (t, c) in enumerate(self.terms):
            body = " ".join(_leaf_str(l) for l in t)
            out.append(f"{_coef_str(c, i == 0)}{body}")
        return " ".join(out).strip()


Word = Union[GroupWord, LieWord, AssocWord]


# -- parsing --

_TOKEN = re.compile(r"\s*(x\d+|\^-?\d+|-?\d+/\d+|-?\d+|[\[\],+-])")


def _tokenize(text: str):
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise WordSyntaxError(f"unexpected character {text[pos]!r}", pos)
        out.append((m.group(1), m.start(1)))
        pos = m.end()
    return out


def parse_word(text: str, kind: str, arity: Optional[int] = None) -> Word:
    """Parse a word; kind is one of group, lie, assoc."""
    if kind == "group":
        return _parse_group(text, arity)
    if kind == "lie":
        return _parse_lie(text, arity)
    if kind == "assoc":
        return _parse_assoc(text, arity)
    raise ValueError(f"unknown word kind {kind!r}")


def _parse_group(text: str, arity: Optional[int]) -> GroupWord:
    tokens = _tokenize(text)
    letters: List[Tuple[int, int]] = []
    i = 0
    while i < len(tokens):
        tok, pos = tokens[i]
        if not tok.startswith("x"):
            raise WordSyntaxError(f"expected generator, got {tok!r}", pos)
        g = int(tok[1:])
        if g < 1:
            raise WordSyntaxError("generator indices start at 1", pos)
        e = 1
        if i + 1 < len(tokens) and tokens[i + 1][0].startswith("^"):
            e = int(tokens[i + 1][0][1:])
            i += 1
        if e >= 0:
            letters.extend([(g, 1)] * e)
        else:
            letters.extend([(g, -1)] * (-e))
        i += 1
    return GroupWord.make(letters, arity)


def _split_top_terms(tokens):
    """Split a token list into (sign, chunk) at top-level +/-."""
    terms, depth, cur, sign = [], 0, [], 1
    for tok, pos in tokens:
        if tok == "[":
            depth += 1
        elif tok == "]":
            depth -= 1
            if depth < 0:
                raise WordSyntaxError("unbalanced ']'", pos)
        if depth == 0 and tok in ("+", "-") and cur:
            terms.append((sign, cur))
            sign = 1 if tok == "+" else -1
            cur = []
            continue
        if depth == 0 and tok == "-" and not cur:
            sign = -sign
            continue
        if depth == 0 and tok == "+" and not cur:
            continue
        cur.append((tok, pos))
    if cur:
        terms.append((sign, cur))
    return terms


def _take_coefficient(chunk):
    coef = Fraction(1)
    if chunk and re.fullmatch(r"-?\d+(/\d+)?", chunk[0][0]):
        coef = Fraction(chunk[0][0])
        chunk = chunk[1:]
    return coef, chunk


def _parse_lie(text: str, arity: Optional[int]) -> LieWord:
    tokens = _tokenize(text)
    terms: Dict[Tree, Fraction] = {}
    for sign, chunk in _split_top_terms(tokens):
        coef, chunk = _take_coefficient(chunk)
        tree, rest = _parse_tree(chunk)
        if rest:
            raise WordSyntaxError(f"trailing input {rest[0][0]!r}", rest[0][1])
        terms[tree] = terms.get(tree, Fraction(0)) + sign * coef
    if not terms:
        raise WordSyntaxError("empty Lie word", 0)
    return LieWord.make(terms, arity)


def _parse_tree(chunk):
    if not chunk:
        raise WordSyntaxError("expected a Lie monomial", 0)
    tok, pos = chunk[0]
    if tok.startswith("x"):
        g = int(tok[1:])
        if g < 1:
            raise WordSyntaxError("generator indices start at 1", pos)
        return g, chunk[1:]
    if tok != "[":
        raise WordSyntaxError(f"expected '[' or generator, got {tok!r}", pos)
    left, rest = _parse_tree(chunk[1:])
    if not rest or rest[0][0] != ",":
        raise WordSyntaxError("expected ',' in bracket", rest[0][1] if rest else pos)
    right, rest = _parse_tree(rest[1:])
    if not rest or rest[0][0] != "]":
        raise WordSyntaxError("expected ']'", rest[0][1] if rest else pos)
    return (left, right), rest[1:]


def _parse_assoc(text: str, arity: Optional[int]) -> AssocWord:
    tokens = _tokenize(text)
    terms: Dict[Tuple[Leaf, ...], Fraction] = {}
    for sign, chunk in _split_top_terms(tokens):
        coef, chunk = _take_coefficient(chunk)
        word: List[Leaf] = []
        for tok, pos in chunk:
            if not tok.startswith("x"):
                raise WordSyntaxError(f"expected generator, got {tok!r}", pos)
            g = int(tok[1:])
            if g < 1:
                raise WordSyntaxError("generator indices start at 1", pos)
            word.append(g)
        if not word:
            raise WordSyntaxError("empty associative monomial", 0)
        key = tuple(word)
        terms[key] = terms.get(key, Fraction(0)) + sign * coef
    if not terms:
        raise WordSyntaxError("empty associative word", 0)
    return AssocWord.make(terms, arity)


# -- structural operations --


def word_concat(w1: Word, w2: Word) -> Word:
    """Disjoint-variable concatenation; the word behind convolution powers.

    Group words concatenate after shifting w2's generators by r1; Lie and
    associative words form the sum w1 + (w2 shifted).  Arity adds.
    """
    if isinstance(w1, GroupWord) and isinstance(w2, GroupWord):
        shifted = tuple((g + w1.arity, e) for g, e in w2.letters)
        return GroupWord(w1.arity + w2.arity, w1.letters + shifted)
    if isinstance(w1, LieWord) and isinstance(w2, LieWord):
        out = w1.terms_dict()
        for t, c in w2.shift(w1.arity).terms:
            out[t] = out.get(t, Fraction(0)) + c
        lw = LieWord.make(out)
        return LieWord(w1.arity + w2.arity, lw.terms)
    if isinstance(w1, AssocWord) and isinstance(w2, AssocWord):
        out = w1.terms_dict()
        for t, c in w2.shift(w1.arity).terms:
            out[t] = out.get(t, Fraction(0)) + c
        aw = AssocWord.make(out)
        return AssocWord(w1.arity + w2.arity, aw.terms)
    raise TypeError("word_concat needs two words of the same kind")


def convolution_power(w: Word, t: int) -> Word:
    if t < 1:
        raise ValueError("t >= 1")
    out = w
    for _ in range(t - 1):
        out = word_concat(out, w)
    return out


def _bracket_ln(u: Tree, w: Tree) -> Dict[Tree, int]:
    """[u, w] for left-normed trees u, w, as a left-normed combination."""
    if not isinstance(w, tuple) or isinstance(w, JetVar):
        return {(u, w): 1}
    w1, v = w  # w = [w1, v] with v a leaf
    out: Dict[Tree, int] = {}
    for t, c in _bracket_ln(u, w1).items():
        out[(t, v)] = out.get((t, v), 0) + c
    for t, c in _bracket_ln((u, v), w1).items():
        out[t] = out.get(t, 0) - c
    return out


def _normalize_tree(tree: Tree) -> Dict[Tree, int]:
    if not isinstance(tree, tuple) or isinstance(tree, JetVar):
        return {tree: 1}
    left = _normalize_tree(tree[0])
    right = _normalize_tree(tree[1])
    out: Dict[Tree, int] = {}
    for t1, c1 in left.items():
        for t2, c2 in right.items():
            for t, c in _bracket_ln(t1, t2).items():
                out[t] = out.get(t, 0) + c1 * c2 * c
    return out


def is_left_normed(tree: Tree) -> bool:
    if not isinstance(tree, tuple) or isinstance(tree, JetVar):
        return True
    a, b = tree
    return is_left_normed(a) and (not isinstance(b, tuple) or isinstance(b, JetVar))


def _straighten_first_pair(tree: Tree) -> Tuple[Optional[Tree], int]:
    """Order the innermost pair of a left-normed tree; returns (tree, sign).

    [b,a] = -[a,b] and [a,a] = 0; only the deepest pair needs it.  Not a
    full canonical basis (none is attempted), just enough to merge mirror
    images.
    """
    if not isinstance(tree, tuple) or isinstance(tree, JetVar):
        return tree, 1
    a, b = tree
    if isinstance(a, tuple) and not isinstance(a, JetVar):
        inner, sign = _straighten_first_pair(a)
        return (None, 0) if inner is None else ((inner, b), sign)
    if _tree_key(a) == _tree_key(b):
        return None, 0
    if _tree_key(b) < _tree_key(a):
        return (b, a), -1
    return tree, 1


def left_normalize(w: LieWord) -> LieWord:
    """Rewrite into left-normed monomials [[..[x,x],..],x], value unchanged."""
    out: Dict[Tree, Fraction] = {}
    for tree, coef in w.terms:
        for t, c in _normalize_tree(tree).items():
            t2, sign = _straighten_first_pair(t)
            if t2 is None:
                continue
            out[t2] = out.get(t2, Fraction(0)) + coef * c * sign
    result = LieWord.make(out)
    return LieWord(w.arity, result.terms)


def pure_type_decompose(w: Union[LieWord, AssocWord]):
    """Split into pure summands by the multiset of generators used.

    Returns a list of (type multiset as a sorted tuple, summand), ordered
    canonically.  Mixed grades decompose grade by grade (types of different
    grades have different multiset sizes).
    """
    buckets: Dict[Tuple[int, ...], Dict] = {}
    for term, coef in w.terms:
        leaves = tree_leaves(term) if isinstance(w, LieWord) else list(term)
        key = tuple(sorted(leaf_generator(l) for l in leaves))
        buckets.setdefault(key, {})[term] = coef
    maker = LieWord.make if isinstance(w, LieWord) else AssocWord.make
    out = []
    for key in sorted(buckets, key=lambda k: (len(k), k)):
        part = maker(buckets[key])
        part = type(part)(w.arity, part.terms)
        out.append((key, part))
    return out


def word_formal_derivative(w: Union[LieWord, AssocWord], u: int) -> Union[LieWord, AssocWord]:
    """u-th formal derivative in jet variables, via the product rule.

    One derivative step bumps a single leaf's order; iterating u times
    produces the multinomial coefficients exactly.
    """
    if u < 0:
        raise ValueError("u >= 0")
    if isinstance(w, GroupWord):
        raise TypeError("group words differentiate at the polynomial-map level")
    out = w
    for _ in range(u):
        out = _derive_once(out)
    return out


def _bump(leaf: Leaf) -> Leaf:
    return _jet(leaf_generator(leaf), leaf_order(leaf) + 1)


def _derive_tree_once(tree: Tree) -> Dict[Tree, int]:
    if not isinstance(tree, tuple) or isinstance(tree, JetVar):
        return {_bump(tree): 1}
    a, b = tree
    out: Dict[Tree, int] = {}
    for t, c in _derive_tree_once(a).items():
        out[(t, b)] = out.get((t, b), 0) + c
    for t, c in _derive_tree_once(b).items():
        out[(a, t)] = out.get((a, t), 0) + c
    return out


def _derive_once(w: Union[LieWord, AssocWord]) -> Union[LieWord, AssocWord]:
    if isinstance(w, LieWord):
        out: Dict[Tree, Fraction] = {}
        for tree, coef in w.terms:
            for t, c in _derive_tree_once(tree).items():
                out[t] = out.get(t, Fraction(0)) + coef * c
        res = LieWord.make(out)
        return LieWord(w.arity, res.terms)
    out2: Dict[Tuple[Leaf, ...], Fraction] = {}
    for word, coef in w.terms:
        for pos in range(len(word)):
            key = word[:pos] + (_bump(word[pos]),) + word[pos + 1:]
            out2[key] = out2.get(key, Fraction(0)) + coef
    res2 = AssocWord.make(out2)
    return AssocWord(w.arity, res2.terms)


# -- symbol and degree through the truncated free associative algebra --


def _series_mul(a: Dict[Tuple[int, ...], Fraction], b, cap: int):
    out: Dict[Tuple[int, ...], Fraction] = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            if len(wa) + len(wb) > cap:
                continue
            key = wa + wb
            out[key] = out.get(key, Fraction(0)) + ca * cb
    return {k: v for k, v in out.items() if v != 0}


def _series_exp_letter(g: int, sign: int, cap: int):
    out: Dict[Tuple[int, ...], Fraction] = {}
    fact = 1
    for k in range(cap + 1):
        if k:
            fact *= k
        out[(g,) * k] = Fraction(sign**k, fact)
    return out


def _series_log(p: Dict[Tuple[int, ...], Fraction], cap: int):
    u = {k: v for k, v in p.items() if k}  # p minus its constant term 1
    out: Dict[Tuple[int, ...], Fraction] = {}
    power = {(): Fraction(1)}
    for k in range(1, cap + 1):
        power = _series_mul(power, u, cap)
        if not power:
            break
        coef = Fraction((-1) ** (k + 1), k)
        for w, c in power.items():
            out[w] = out.get(w, Fraction(0)) + coef * c
    return {k: v for k, v in out.items() if v != 0}


def expand_to_assoc(w: LieWord) -> Dict[Tuple[int, ...], Fraction]:
    """Expand bracket trees through [a,b] = ab - ba."""
    def expand(tree: Tree) -> Dict[Tuple[int, ...], Fraction]:
        if not isinstance(tree, tuple) or isinstance(tree, JetVar):
            return {(leaf_generator(tree),): Fraction(1)}
        a = expand(tree[0])
        b = expand(tree[1])
        out: Dict[Tuple[int, ...], Fraction] = {}
        for wa, ca in a.items():
            for wb, cb in b.items():
                out[wa + wb] = out.get(wa + wb, Fraction(0)) + ca * cb
                out[wb + wa] = out.get(wb + wa, Fraction(0)) - ca * cb
        return out

    total: Dict[Tuple[int, ...], Fraction] = {}
    for tree, coef in w.terms:
        for k, c in expand(tree).items():
            total[k] = total.get(k, Fraction(0)) + coef * c
    return {k: v for k, v in total.items() if v != 0}


def magnus_symbol(w: GroupWord, max_degree: Optional[int] = None) -> Tuple[LieWord, int]:
    """Degree and symbol of a group word.

    Maps generator g to exp(X_g) in the truncated free associative algebra
    over Q, multiplies along the word, takes log, and returns the lowest
    nonvanishing homogeneous part; that part is primitive, and the Dynkin
    projection (certified by re-expansion) rewrites it as a Lie word.
    """
    if not w.letters:
        raise ValueError("the empty word has no symbol")
    cap = max_degree if max_degree is not None else max(w.length, 2)
    if cap < 1:
        raise ValueError("max_degree >= 1")
    series: Dict[Tuple[int, ...], Fraction] = {(): Fraction(1)}
    for g, e in w.letters:
        series = _series_mul(series, _series_exp_letter(g, e, cap), cap)
    log = _series_log(series, cap)
    if not log:
        raise DegreeExceedsTruncation(
            f"no nonzero term up to degree {cap}; raise max_degree")
    d = min(len(k) for k in log)
    lowest = {k: v for k, v in log.items() if len(k) == d}
    # Dynkin projection: word (i1..id) -> [[..[X_i1,X_i2],..],X_id] / d
    terms: Dict[Tree, Fraction] = {}
    for word_key, coef in lowest.items():
        tree: Tree = word_key[0]
        for g in word_key[1:]:
            tree = (tree, g)
        terms[tree] = terms.get(tree, Fraction(0)) + coef / d
    symb = left_normalize(LieWord(w.arity, LieWord.make(terms).terms))
    if expand_to_assoc(symb) != lowest:
        raise ArithmeticError("lowest log term failed the Lie certification")
    return symb, d
