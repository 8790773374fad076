"""Backend selection for the subset-table kernels.

The compiled extension is used when it imports; otherwise the numpy
implementation takes over.  Setting ``FMSM_PURE_PYTHON=1`` forces the
fallback.
"""

import os

from fmsm import _pykernels

if os.environ.get("FMSM_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from fmsm import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

BACKENDS = {"python": _pykernels}
if BACKEND == "cython":
    BACKENDS["cython"] = _impl

subset_weights = _impl.subset_weights
multilinear_value = _impl.multilinear_value
multilinear_gradient = _impl.multilinear_gradient
coverage_table = _impl.coverage_table
cut_table = _impl.cut_table
facility_table = _impl.facility_table
modular_table = _impl.modular_table
group_counts = _impl.group_counts
bounded_masks = _impl.bounded_masks
submodularity_gap = _impl.submodularity_gap
monotonicity_gap = _impl.monotonicity_gap
