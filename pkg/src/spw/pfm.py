"""Single-channel portable float map (PFM) reader/writer.

Header: "Pf", then "width height", then the scale line whose sign encodes
endianness (negative = little-endian). Payload is 32-bit floats, row-major,
bottom row first.
"""

import numpy as np


def write_pfm(path, grid):
    a = np.asarray(grid, dtype=np.float32)
    if a.ndim != 2:
        raise ValueError("PFM writer expects a 2-D grid")
    h, w = a.shape
    with open(path, "wb") as f:
        f.write(b"Pf\n")
        f.write(f"{w} {h}\n".encode("ascii"))
        f.write(b"-1.0\n")
        f.write(np.flipud(a).astype("<f4").tobytes())


def read_pfm(path):
    with open(path, "rb") as f:
        tag = f.readline().strip()
        if tag != b"Pf":
            raise ValueError(f"{path}: not a single-channel PFM file")
        dims = f.readline().split()
        if len(dims) != 2:
            raise ValueError(f"{path}: malformed PFM dimension line")
        w, h = int(dims[0]), int(dims[1])
        scale = float(f.readline())
        dtype = "<f4" if scale < 0 else ">f4"
        data = np.frombuffer(f.read(4 * w * h), dtype=dtype)
        if data.size != w * h:
            raise ValueError(f"{path}: truncated PFM payload")
    return np.flipud(data.reshape(h, w)).astype(np.float64)
