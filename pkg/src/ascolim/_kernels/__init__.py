"""Kernel dispatch: compiled extension when importable, pure Python otherwise.

Set ``ASCOLIM_PURE=1`` in the environment to force the pure backend (used by
the parity tests and the benchmark).  The compiled kernels guard an int64
fast path and raise ``OverflowError`` past it; the wrappers below fall back
to the pure twin per call, so results are always exact.
"""

import os

from ascolim._kernels import pure as _pure

if os.environ.get("ASCOLIM_PURE"):
    _impl = _pure
else:
    try:
        from ascolim._kernels import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure

KERNEL_BACKEND = "pure" if _impl is _pure else "compiled"


def matvec_q(mat_num, mat_den, vec_num, vec_den):
    try:
        return _impl.matvec_q(mat_num, mat_den, vec_num, vec_den)
    except OverflowError:
        return _pure.matvec_q(mat_num, mat_den, vec_num, vec_den)


def max_pairwise_sqdist_q(coords_num):
    try:
        return _impl.max_pairwise_sqdist_q(coords_num)
    except OverflowError:
        return _pure.max_pairwise_sqdist_q(coords_num)


def winding_crossings_q(xs, ys, dx, dy):
    try:
        return _impl.winding_crossings_q(xs, ys, dx, dy)
    except OverflowError:
        return _pure.winding_crossings_q(xs, ys, dx, dy)
