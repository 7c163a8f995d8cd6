"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-Python module
is a drop-in fallback.  Set ``PANTOSIM_PURE=1`` to force the fallback (used
by the benchmark and by backend-equivalence tests).
"""

import os

if os.environ.get("PANTOSIM_PURE", "") not in ("", "0"):
    from . import _kernels_py as _impl

    COMPILED = False
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        from . import _kernels_py as _impl

        COMPILED = False

BACKEND = "compiled" if COMPILED else "pure-python"

TOUCH_TOL = 1e-9

fk_points = _impl.fk_points
ik_angles = _impl.ik_angles
in_sector = _impl.in_sector
clamp_to_sector = _impl.clamp_to_sector
count_in_sector = _impl.count_in_sector
project_halfspaces = _impl.project_halfspaces
heightfield_query = _impl.heightfield_query
actuator_advance = _impl.actuator_advance
erase_tiles = _impl.erase_tiles
