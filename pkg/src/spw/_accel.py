"""Accelerated inner-loop kernels.

Hot pixel loops (connected-component labeling) are compiled with numba when
available. Set ``SPW_PURE_NUMPY=1`` to force the pure NumPy/SciPy fallback;
both paths produce bit-identical labelings. ``SPW_THREADS`` caps the number
of FFT worker threads (default: single-threaded).
"""

import os

import numpy as np


def fft_workers():
    """Worker count for scipy.fft calls, from the SPW_THREADS env var."""
    try:
        n = int(os.environ.get("SPW_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


_force_fallback = os.environ.get("SPW_PURE_NUMPY", "") not in ("", "0")

if not _force_fallback:
    try:
        import numba
    except ImportError:  # pragma: no cover
        numba = None
else:
    numba = None

USING_NUMBA = numba is not None


def _label_4conn_py(cls):
    """Union-find labeling, one component id per 4-connected same-class region.

    Fallback path built on scipy.ndimage; ids are arbitrary but distinct,
    canonicalization happens in :func:`label_components`.
    """
    from scipy import ndimage

    lab = np.zeros(cls.shape, dtype=np.int64)
    offset = 0
    for c in np.unique(cls):
        comp, n = ndimage.label(cls == c)  # default structure is 4-connected
        sel = comp > 0
        lab[sel] = comp[sel] + offset
        offset += n
    return lab - 1


if USING_NUMBA:

    @numba.njit(cache=True)
    def _label_4conn_nb(cls):  # pragma: no cover - exercised via wrapper
        h, w = cls.shape
        lab = np.zeros((h, w), dtype=np.int64)
        parent = np.empty(h * w, dtype=np.int64)
        nlab = 0
        for y in range(h):
            for x in range(w):
                c = cls[y, x]
                a = -1
                if y > 0 and cls[y - 1, x] == c:
                    a = lab[y - 1, x]
                    while parent[a] != a:
                        parent[a] = parent[parent[a]]
                        a = parent[a]
                b = -1
                if x > 0 and cls[y, x - 1] == c:
                    b = lab[y, x - 1]
                    while parent[b] != b:
                        parent[b] = parent[parent[b]]
                        b = parent[b]
                if a < 0 and b < 0:
                    parent[nlab] = nlab
                    lab[y, x] = nlab
                    nlab += 1
                elif a < 0:
                    lab[y, x] = b
                elif b < 0 or a == b:
                    lab[y, x] = a
                else:
                    r = a if a < b else b
                    s = b if a < b else a
                    parent[s] = r
                    lab[y, x] = r
        for y in range(h):
            for x in range(w):
                a = lab[y, x]
                while parent[a] != a:
                    a = parent[a]
                lab[y, x] = a
        return lab


def _canonicalize(lab):
    """Remap component ids to 0..n-1 in raster order of first occurrence."""
    flat = lab.ravel()
    uniq, first = np.unique(flat, return_index=True)
    order = np.argsort(first, kind="stable")
    remap = np.empty(uniq.max() + 1, dtype=np.int64)
    remap[uniq[order]] = np.arange(len(uniq), dtype=np.int64)
    return remap[flat].reshape(lab.shape)


def label_components(cls):
    """4-connected components of a class-id map, ids deterministic by raster order."""
    cls = np.ascontiguousarray(cls, dtype=np.int64)
    if USING_NUMBA:
        raw = _label_4conn_nb(cls)
    else:
        raw = _label_4conn_py(cls)
    return _canonicalize(raw)
