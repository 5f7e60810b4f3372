"""Select the compiled graph kernels when available.

Set ``PURPOSECHECK_PURE=1`` to force the pure-Python implementation.
"""

from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
all_pairs_hops = _pykernels.all_pairs_hops
nearest_seed = _pykernels.nearest_seed

if os.environ.get("PURPOSECHECK_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        all_pairs_hops = _ckernels.all_pairs_hops
        nearest_seed = _ckernels.nearest_seed

__all__ = ["BACKEND", "all_pairs_hops", "nearest_seed"]
