"""Typed hypergraph encodings of pure homogeneous Lie word maps.

A degree-d word map on a based algebra splits, coordinate by coordinate,
into multilinear forms indexed by (multiset of d basis vertices, output
type).  This module builds that encoding, applies weight elimination and
colorings to it, and re-emits the induced polynomial map for any number
of convolution copies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .chevalley import ChevalleyAlgebra
from .polymaps import Poly, PolyMap, _carrier_basis
from .words import JetVar, LieWord, pure_type_decompose, tree_leaves

# A form table maps a sorted tuple of (slot, vertex index) factor pairs,
# with multiplicity, to its integer coefficient.
FormKey = Tuple[Tuple[int, int], ...]


@dataclass(frozen=True)
class Edge:
    """One hyperedge: a vertex multiset, an output type, and its form."""

    vertices: Tuple[int, ...]  # sorted, length d, with multiplicity
    type_index: int
    form: Tuple[Tuple[FormKey, int], ...]  # canonically sorted items

    def form_dict(self) -> Dict[FormKey, int]:
        return dict(self.form)


@dataclass(frozen=True)
class PolyHypergraph:
    d: int
    arity: int
    vertices: Tuple[str, ...]  # basis labels
    types: Tuple[str, ...]  # dual basis labels, same order
    edges: Tuple[Edge, ...]
    vertex_heights: Tuple[int, ...]  # signed root heights, 0 on Cartan
    vertex_rtypes: Tuple[str, ...]

    @property
    def missing_types(self) -> Tuple[str, ...]:
        """Types with no hyperedge; nonempty flags a non-generating source."""
        seen = {e.type_index for e in self.edges}
        return tuple(t for i, t in enumerate(self.types) if i not in seen)

    @property
    def non_generating(self) -> bool:
        return bool(self.missing_types)

    def edges_of_type(self, type_index: int) -> Tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.type_index == type_index)


@dataclass(frozen=True)
class ColoringReport:
    admissible: bool
    witness_type: Optional[str]
    parts: Tuple[PolyHypergraph, ...]
    assignment: Tuple[Tuple[str, int], ...]  # (type label, color) pairs
    type_tuples: Tuple[Tuple[str, Tuple[int, ...]], ...]


@dataclass(frozen=True)
class Nu0Split:
    positive: PolyHypergraph
    cartan: PolyHypergraph
    negative: PolyHypergraph
    type_tuples: Tuple[Tuple[str, Tuple[int, int, int]], ...]

    def __iter__(self):
        return iter((self.positive, self.cartan, self.negative))


def _sorted_edges(edges: Sequence[Edge]) -> Tuple[Edge, ...]:
    return tuple(sorted(edges, key=lambda e: (e.type_index, e.vertices)))


def dph_build(alg: ChevalleyAlgebra, word: LieWord) -> PolyHypergraph:
    """Encode a pure homogeneous word map as a typed hypergraph.

    Raises if the word mixes generator multisets or induces the zero map
    on the algebra; a word that misses some output types builds fine but
    is flagged through missing_types.
    """
    if not isinstance(word, LieWord):
        raise ValueError("hypergraph encoding needs a Lie word")
    for term, _ in word.terms:
        for leaf in tree_leaves(term):
            if isinstance(leaf, JetVar):
                raise ValueError("jet variables are not supported here")
    parts = pure_type_decompose(word)
    if len(parts) != 1:
        raise ValueError("word is not pure: generator multisets differ")
    d = word.degree
    from .polymaps import word_to_polymap

    pm = word_to_polymap(word, alg)
    names, _ = _carrier_basis(alg)
    dim = len(names)
    groups: Dict[Tuple[Tuple[int, ...], int], Dict[FormKey, int]] = {}
    for l, coord in enumerate(pm.coords):
        for expvec, coef in coord:
            pairs: List[Tuple[int, int]] = []
            for idx, exp in enumerate(expvec):
                if exp:
                    s, i = idx // dim + 1, idx % dim
                    pairs.extend([(s, i)] * exp)
            key = tuple(sorted(pairs))
            vset = tuple(sorted(i for _, i in key))
            groups.setdefault((vset, l), {})[key] = coef
    if not groups:
        raise ValueError(f"word map is identically zero on {alg!r}")
    edges = [
        Edge(vset, l, tuple(sorted(form.items())))
        for (vset, l), form in groups.items()
    ]
    labels = alg.labels
    return PolyHypergraph(
        d=d,
        arity=word.arity,
        vertices=tuple(names),
        types=tuple(names),
        edges=_sorted_edges(edges),
        vertex_heights=tuple(lbl.height for lbl in labels),
        vertex_rtypes=tuple(lbl.rtype for lbl in labels),
    )


def edge_weight(ph: PolyHypergraph, edge: Edge, omega: Sequence[int]) -> int:
    return sum(omega[i] for i in edge.vertices)


def dph_eliminate(ph: PolyHypergraph, omega: Sequence[int]) -> PolyHypergraph:
    """Keep, per type, only the hyperedges of least total vertex weight."""
    if len(omega) != len(ph.vertices):
        raise ValueError("weight length mismatch")
    if ph.missing_types:
        raise ValueError(
            f"type(s) with no hyperedges: {', '.join(ph.missing_types)}")
    kept: List[Edge] = []
    for l in range(len(ph.types)):
        edges = ph.edges_of_type(l)
        if not edges:
            continue
        weights = [edge_weight(ph, e, omega) for e in edges]
        lo = min(weights)
        kept.extend(e for e, w in zip(edges, weights) if w == lo)
    return PolyHypergraph(
        d=ph.d, arity=ph.arity, vertices=ph.vertices, types=ph.types,
        edges=_sorted_edges(kept), vertex_heights=ph.vertex_heights,
        vertex_rtypes=ph.vertex_rtypes,
    )


def dph_color(ph: PolyHypergraph,
              coloring: Sequence[Sequence[int]]) -> ColoringReport:
    """Split by a multi-color weight table; verdict checked exactly.

    Admissible means: for every type there is one color whose summed
    weight is the strict minimum on every hyperedge of that type.  When
    that holds the per-color hypergraphs partition the edge set.
    """
    if not coloring:
        raise ValueError("need at least one color")
    vectors = [tuple(v) for v in coloring]
    for v in vectors:
        if len(v) != len(ph.vertices):
            raise ValueError("color weight length mismatch")
    n_colors = len(vectors)
    assignment: List[Tuple[str, int]] = []
    type_tuples: List[Tuple[str, Tuple[int, ...]]] = []
    per_color: Dict[int, List[Edge]] = {m: [] for m in range(n_colors)}
    for l, label in enumerate(ph.types):
        edges = ph.edges_of_type(l)
        if not edges:
            continue
        chosen: Optional[int] = None
        for pos, e in enumerate(edges):
            tup = tuple(edge_weight(ph, e, v) for v in vectors)
            if pos == 0:
                type_tuples.append((label, tup))
            lo = min(tup)
            mins = [m for m, w in enumerate(tup) if w == lo]
            if len(mins) != 1 or (chosen is not None and mins[0] != chosen):
                return ColoringReport(False, label, (), (), tuple(type_tuples))
            chosen = mins[0]
        assignment.append((label, chosen))
        per_color[chosen].extend(edges)
    parts = tuple(
        PolyHypergraph(
            d=ph.d, arity=ph.arity, vertices=ph.vertices,
            types=tuple(lbl for lbl, m in assignment if m == color),
            edges=_relabel_types(ph, per_color[color],
                                 [lbl for lbl, m in assignment if m == color]),
            vertex_heights=ph.vertex_heights,
            vertex_rtypes=ph.vertex_rtypes,
        )
        for color in range(n_colors)
    )
    return ColoringReport(True, None, parts, tuple(assignment),
                          tuple(type_tuples))


def _relabel_types(ph: PolyHypergraph, edges: Sequence[Edge],
                   new_types: Sequence[str]) -> Tuple[Edge, ...]:
    index = {ph.types.index(t): i for i, t in enumerate(new_types)}
    out = [Edge(e.vertices, index[e.type_index], e.form) for e in edges]
    return _sorted_edges(out)


def nu0_coloring(ph: PolyHypergraph,
                 literal: bool = False) -> Tuple[Tuple[int, ...], ...]:
    """The three-color root-direction weight table.

    Per vertex of signed height h the shipped table is
    (-2dh + 1, 0, 2dh + 1), giving every positive-root type a strict
    minimum in color 0, Cartan types in color 1, negative in color 2.
    The literal variant (-2dh, 1, 2dh) ties colors 0 and 2 on Cartan
    types and therefore fails the exact admissibility check.
    """
    d = ph.d
    c0, c1, c2 = [], [], []
    for h in ph.vertex_heights:
        if literal:
            c0.append(-2 * d * h)
            c1.append(1)
            c2.append(2 * d * h)
        else:
            c0.append(-2 * d * h + 1)
            c1.append(0)
            c2.append(2 * d * h + 1)
    return (tuple(c0), tuple(c1), tuple(c2))


def dph_nu0_split(ph: PolyHypergraph) -> Nu0Split:
    """Partition into positive-root, Cartan, and negative-root types.

    Splits by the stored root classification and cross-checks that the
    root-direction coloring reproduces the same partition exactly.
    """
    report = dph_color(ph, nu0_coloring(ph))
    if not report.admissible:
        raise RuntimeError("root-direction coloring unexpectedly inadmissible")
    by_sign = {1: [], 0: [], -1: []}
    for lbl, color in report.assignment:
        by_sign[(1, 0, -1)[color]].append(lbl)
    for sign, labels in by_sign.items():
        for lbl in labels:
            idx = ph.types.index(lbl)
            h = ph.vertex_heights[idx]
            got = 0 if h == 0 else (1 if h > 0 else -1)
            if got != sign:
                raise RuntimeError(
                    f"coloring and root classification disagree on {lbl}")
    display = tuple(
        (lbl, (-2 * ph.d * ph.vertex_heights[ph.types.index(lbl)],
               ph.d,
               2 * ph.d * ph.vertex_heights[ph.types.index(lbl)]))
        for lbl, _ in report.assignment
    )
    pos, car, neg = report.parts
    return Nu0Split(pos, car, neg, display)


def dph_induced_polymap(ph: PolyHypergraph, t: int = 1) -> PolyMap:
    """The polynomial map of t convolution copies of the encoded word map.

    Copy c of word slot s becomes global slot (c-1)*arity + s; output
    coordinates follow the type list, each the sum over copies and edges
    of that type.
    """
    if t < 1:
        raise ValueError("need at least one copy")
    dim = len(ph.vertices)
    names = tuple(
        f"x{slot}:{lbl}"
        for slot in range(1, t * ph.arity + 1)
        for lbl in ph.vertices
    )
    n_in = len(names)
    polys: List[Poly] = [{} for _ in ph.types]
    for edge in ph.edges:
        target = polys[edge.type_index]
        for pairs, coef in edge.form:
            for c in range(t):
                e = [0] * n_in
                for s, i in pairs:
                    e[(c * ph.arity + s - 1) * dim + i] += 1
                key = tuple(e)
                v = target.get(key, 0) + coef
                if v:
                    target[key] = v
                elif key in target:
                    del target[key]
    return PolyMap.make(names, polys)


def dph_to_json(ph: PolyHypergraph) -> dict:
    """A deterministic, label-based export of the whole structure."""
    return {
        "d": ph.d,
        "arity": ph.arity,
        "vertices": [
            {"label": lbl, "rtype": rt, "height": h}
            for lbl, rt, h in zip(ph.vertices, ph.vertex_rtypes,
                                  ph.vertex_heights)
        ],
        "types": list(ph.types),
        "missing_types": list(ph.missing_types),
        "edges": [
            {
                "vertices": [ph.vertices[i] for i in e.vertices],
                "type": ph.types[e.type_index],
                "form": [
                    [[[s, ph.vertices[i]] for s, i in pairs], coef]
                    for pairs, coef in e.form
                ],
            }
            for e in ph.edges
        ],
    }
