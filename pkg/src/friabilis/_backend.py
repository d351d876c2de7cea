"""Import-time selection of the kernel backend.

The compiled Cython module is preferred; the NumPy fallback is used when the
extension is missing or when FRIABILIS_PURE_PYTHON=1 forces it (useful for
the backend benchmark and for debugging).
"""

import os

if os.environ.get("FRIABILIS_PURE_PYTHON") == "1":
    from friabilis import _kernels_py as kernels
else:
    try:
        from friabilis import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        from friabilis import _kernels_py as kernels  # type: ignore[no-redef]

BACKEND = kernels.BACKEND_NAME


def get_backend():
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return BACKEND
