"""wordlab: word maps on classical Lie algebras, matrix algebras and SL_n
over finite coefficient rings.

Exact fiber counts, word measures and convolutions, mixing times, additive
Fourier analysis, jet constructions, weight degenerations and
polyhypergraph encodings, at desk scale.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .rings import Ring, RingElement, enumerate_ring, reduce_level, ring_make, unit_inverse

__all__ = [
    "Ring",
    "RingElement",
    "ring_make",
    "unit_inverse",
    "reduce_level",
    "enumerate_ring",
    "__version__",
]
