"""Backend selection for the hot elementwise kernels.

The compiled extension is preferred when importable; the numpy fallback is
numerically identical.  Set DAMPEDWAVE_PURE_PYTHON=1 to force the fallback
(useful for benchmarking and debugging).
"""

from __future__ import annotations

import os

from . import _accel_py

if os.environ.get("DAMPEDWAVE_PURE_PYTHON"):
    _impl = _accel_py
else:
    try:
        from . import _accel as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _accel_py

BACKEND: str = _impl.BACKEND_NAME
DELTA: float = _impl.DELTA

khat_kprime = _impl.khat_kprime
abs_pow = _impl.abs_pow
predict_combine = _impl.predict_combine
correct_combine = _impl.correct_combine

__all__ = [
    "BACKEND",
    "DELTA",
    "khat_kprime",
    "abs_pow",
    "predict_combine",
    "correct_combine",
]
