"""Backend selection for the edit-distance hot kernel.

The compiled Cython extension is preferred; the pure-Python fallback is
selected at import time when the extension is not built. `plan2text bench
--kernels` compares the two.
"""

from . import _kernels_py

try:
    from . import _kernels  # type: ignore[attr-defined]

    _active = _kernels
except ImportError:
    _kernels = None
    _active = _kernels_py

ACTIVE_BACKEND: str = _active.BACKEND

levenshtein_ids = _active.levenshtein_ids


def available_backends() -> dict[str, object]:
    """Name -> module for every usable kernel backend."""
    out: dict[str, object] = {"python": _kernels_py}
    if _kernels is not None:
        out["cython"] = _kernels
    return out
