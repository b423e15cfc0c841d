"""Core 2-D grid operations: FFT contract, frequency coordinates, pad/crop.

All grids are plain NumPy arrays, float64 for real fields and complex128 for
spectra. Operations are pure; callers may share arrays read-only across
threads.
"""

import numpy as np
from scipy import fft as _fft

from ._accel import fft_workers


def as_real_grid(a):
    """Validate and return a 2-D float64 grid with finite values."""
    g = np.asarray(a, dtype=np.float64)
    if g.ndim != 2 or g.shape[0] < 1 or g.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D grid, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise ValueError("grid contains non-finite values")
    return g


def as_complex_grid(a):
    g = np.asarray(a, dtype=np.complex128)
    if g.ndim != 2 or g.shape[0] < 1 or g.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D grid, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise ValueError("grid contains non-finite values")
    return g


def forward_fft(g):
    """Unnormalized 2-D DFT of a real grid."""
    return _fft.fft2(g, workers=fft_workers())


def inverse_fft(s, overwrite=False):
    """Inverse 2-D DFT with 1/(H*W) normalization.

    Pass overwrite=True when ``s`` is a throwaway temporary; the transform
    may then reuse its buffer instead of allocating a copy.
    """
    return _fft.ifft2(s, workers=fft_workers(), overwrite_x=overwrite)


def frequency_coords(height, width):
    """Polar frequency coordinates (r, theta) of each DFT bin.

    Signed frequencies with the Nyquist bin assigned to the positive side:
    index u maps to 2*pi*wrap(u)/H with wrap(u) in (-H/2, H/2]. r reaches
    pi*sqrt(2) at the grid corners; theta = atan2(wy, wx) in (-pi, pi].
    """
    u = np.arange(height)
    v = np.arange(width)
    wu = np.where(u > height // 2, u - height, u)
    wv = np.where(v > width // 2, v - width, v)
    wy = (2.0 * np.pi / height) * wu
    wx = (2.0 * np.pi / width) * wv
    wy2d, wx2d = np.meshgrid(wy, wx, indexing="ij")
    r = np.hypot(wx2d, wy2d)
    theta = np.arctan2(wy2d, wx2d)
    return r, theta


def pad_to_multiple(g, factor):
    """Mirror-pad right/bottom so both dimensions are multiples of factor.

    Reflection does not repeat the edge sample. Returns the padded grid and
    the original (height, width) for later cropping.
    """
    g = as_real_grid(g)
    if factor < 1:
        raise ValueError("factor must be >= 1")
    h, w = g.shape
    th = -(-h // factor) * factor
    tw = -(-w // factor) * factor
    if (th, tw) == (h, w):
        return g, (h, w)
    return np.pad(g, ((0, th - h), (0, tw - w)), mode="reflect"), (h, w)


def crop_to(g, size):
    """Top-left sub-grid of the recorded size."""
    h, w = size
    if h > g.shape[0] or w > g.shape[1]:
        raise ValueError(f"cannot crop {g.shape} to larger size {(h, w)}")
    return g[:h, :w]


def downsample_spectrum(s):
    """Central half of a spectrum (frequency-domain downsample by 2 per axis).

    Amplitude is rescaled by 1/4 so spatial sample values are preserved.
    """
    h, w = s.shape
    if h % 2 or w % 2:
        raise ValueError("spectrum dimensions must be even to downsample")
    shifted = _fft.fftshift(s)
    out = shifted[h // 4 : h // 4 + h // 2, w // 4 : w // 4 + w // 2]
    return _fft.ifftshift(out) / 4.0


def embed_spectrum(s, target_shape):
    """Zero-pad a spectrum centered into a larger grid (sinc upsampling).

    Nyquist rows/columns of even-sized sources are split symmetrically so the
    result stays conjugate-symmetric for real inputs. Amplitude is scaled by
    the area ratio so spatial sample values are preserved.
    """
    h, w = s.shape
    th, tw = target_shape
    if th < h or tw < w:
        raise ValueError(f"target {target_shape} smaller than source {s.shape}")
    if (th, tw) == (h, w):
        return s.copy()
    shifted = _fft.fftshift(s)
    if h % 2 == 0 and th > h:
        nyq = shifted[:1, :] / 2.0
        shifted = np.concatenate([nyq, shifted[1:, :], nyq], axis=0)
    if w % 2 == 0 and tw > w:
        nyq = shifted[:, :1] / 2.0
        shifted = np.concatenate([nyq, shifted[:, 1:], nyq], axis=1)
    sh, sw = shifted.shape
    out = np.zeros((th, tw), dtype=np.complex128)
    r0 = th // 2 - h // 2
    c0 = tw // 2 - w // 2
    out[r0 : r0 + sh, c0 : c0 + sw] = shifted
    return _fft.ifftshift(out) * (th * tw) / (h * w)
