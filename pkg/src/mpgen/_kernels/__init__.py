"""Hot numeric kernels with a compiled core and a pure-Python fallback.

The two inner loops that dominate end-to-end runtime live here: filling the
additive-smoothed next-token distribution (once per decoding step) and the
character-level edit-distance table (once per evaluated pair). A Cython
extension implements both; if it is not built, the pure backend is selected
at import time. Both backends perform identical floating-point operations
in the same order, so results are bitwise equal either way. Set
MPGEN_PURE_KERNELS=1 to force the fallback (used by the benchmark and the
equivalence tests).
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("MPGEN_PURE_KERNELS") == "1":
    from . import _pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]

        BACKEND = "native"
    except ImportError:
        from . import _pure as _impl

        BACKEND = "pure"


def smoothed_distribution(
    vocab_size: int,
    ids: np.ndarray,
    counts: np.ndarray,
    alpha: float,
    total: float,
) -> np.ndarray:
    """(count + alpha) / (total + alpha*|V|) over the whole vocabulary.

    ids/counts hold the observed next-token counts for one context; every
    other entry gets the pure-smoothing value. The result sums to 1 up to
    float rounding.
    """
    out = np.empty(vocab_size, dtype=np.float64)
    denom = total + alpha * vocab_size
    _impl.smoothed_fill(
        out,
        np.ascontiguousarray(ids, dtype=np.int64),
        np.ascontiguousarray(counts, dtype=np.float64),
        float(alpha),
        float(denom),
    )
    return out


def levenshtein(a: str, b: str) -> int:
    """Character-level edit distance (insert/delete/substitute, unit cost)."""
    if a == b:
        return 0
    ca = np.fromiter((ord(c) for c in a), dtype=np.int32, count=len(a))
    cb = np.fromiter((ord(c) for c in b), dtype=np.int32, count=len(b))
    return int(_impl.levenshtein(ca, cb))
