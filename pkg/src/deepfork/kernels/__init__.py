"""Similarity-kernel backend selection.

Prefers the compiled Cython extension; falls back to the pure-Python
implementation when the extension was not built. Both expose the same
``pair_scores`` contract and produce bit-identical results.
"""

try:
    from ._ckernels import BACKEND, SCORE_COLUMNS, pair_scores

    CYTHON_AVAILABLE = True
except ImportError:  # extension not compiled
    from ._pykernels import BACKEND, SCORE_COLUMNS, pair_scores

    CYTHON_AVAILABLE = False

__all__ = ["BACKEND", "CYTHON_AVAILABLE", "SCORE_COLUMNS", "pair_scores"]
