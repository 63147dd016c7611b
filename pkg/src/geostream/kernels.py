"""Kernel backend selection.

Imports the compiled extension when it is built, otherwise the pure-Python
fallback. ``GEOSTREAM_PURE_PYTHON=1`` forces the fallback (used by the
backend benchmark and for debugging).
"""

import os

if os.environ.get("GEOSTREAM_PURE_PYTHON"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernels as _impl

BACKEND = "cython" if _impl.__name__.endswith("_ckernels") else "python"

visual_weight = _impl.visual_weight
spatial_cost = _impl.spatial_cost
rect_min_cost = _impl.rect_min_cost
recency_cost = _impl.recency_cost
relevance_cost = _impl.relevance_cost
combine = _impl.combine
