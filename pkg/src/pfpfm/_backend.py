"""Kernel backend selection.

Hot loops are written once in numba-compatible Python. With the default
``numba`` backend they are compiled with ``@njit``; setting
``PFPFM_BACKEND=numpy`` runs the same loops interpreted and switches the
stages that vectorize well (suffix sorting, window hashing, wavelet level
partitioning) to plain numpy implementations.
"""

import os

import numpy as np

BACKEND = os.environ.get("PFPFM_BACKEND", "numba").strip().lower()
if BACKEND not in ("numba", "numpy"):
    raise ImportError(f"PFPFM_BACKEND must be 'numba' or 'numpy', got {BACKEND!r}")

USE_NUMBA = False
if BACKEND == "numba":
    try:
        import numba

        USE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a hard dependency
        BACKEND = "numpy"


def njit(func):
    if USE_NUMBA:
        return numba.njit(cache=True, nogil=True)(func)
    return func


if USE_NUMBA:

    @njit
    def popcount(x):
        x = np.uint64(x)
        x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
        x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
        x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
        return np.int64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))

else:

    def popcount(x):
        return int(x).bit_count()
