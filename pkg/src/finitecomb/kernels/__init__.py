"""Hot loops, compiled with numba when available.

Set ``FINITECOMB_NUMBA=0`` to force the pure-numpy implementations. Both
backends return identical values; the test-suite checks this.
"""

from __future__ import annotations

import os

from . import _numpy

BACKEND = "numpy"
_backend = _numpy

if os.environ.get("FINITECOMB_NUMBA", "1").lower() not in ("0", "false", "no", "off"):
    try:
        from . import _numba as _backend  # noqa: F811

        BACKEND = "numba"
    except ImportError:  # numba missing: keep numpy path
        _backend = _numpy

mark_sums = _backend.mark_sums
mark_products = _backend.mark_products
dilate_sum_sizes = _backend.dilate_sum_sizes
sumset_sizes_masks = _backend.sumset_sizes_masks
subset_stats = _backend.subset_stats
minmax_exhaustive = _backend.minmax_exhaustive
incidence_naive = _backend.incidence_naive
dist_set_size = _backend.dist_set_size
distance_exhaustive = _backend.distance_exhaustive
bsg_rep_counts = _backend.bsg_rep_counts
kakeya_climb = _backend.kakeya_climb


def backends():
    """Both kernel modules, for cross-checking and benchmarks."""
    out = {"numpy": _numpy}
    try:
        from . import _numba

        out["numba"] = _numba
    except ImportError:
        pass
    return out
