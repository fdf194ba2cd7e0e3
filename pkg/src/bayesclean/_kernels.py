"""Kernel dispatch: the compiled extension when it imports, else the pure-Python twin.

Set ``BAYESCLEAN_PURE=1`` to force the fallback.
"""

import os

from . import _pure

BACKEND = "python"

if os.environ.get("BAYESCLEAN_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _impl

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _pure
else:
    _impl = _pure

levenshtein = _impl.levenshtein
bounded_levenshtein = _impl.bounded_levenshtein
distance_matrix = _impl.distance_matrix
rows_within = _impl.rows_within
