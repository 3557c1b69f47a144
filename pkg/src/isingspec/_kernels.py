"""Backend selection: compiled extension when built, pure Python otherwise."""

from __future__ import annotations

import warnings

try:
    from . import _accel as _impl

    BACKEND = "cython"
except ImportError:  # extension not built
    from . import _pykernels as _impl

    BACKEND = "python"
    warnings.warn(
        "isingspec._accel extension not available; using the pure-Python "
        "kernels (large enumerations will be slow)",
        RuntimeWarning,
        stacklevel=2,
    )

gray_histogram = _impl.gray_histogram
metropolis_chain = _impl.metropolis_chain


def backends() -> dict[str, object]:
    """All importable kernel backends, keyed by name (for tests/benchmarks)."""
    out: dict[str, object] = {}
    try:
        from . import _accel

        out["cython"] = _accel
    except ImportError:
        pass
    from . import _pykernels

    out["python"] = _pykernels
    return out
