"""Amplitude envelopes of analytic subbands and zero-pad upsampling."""

import numpy as np

from .grid import as_complex_grid, embed_spectrum, forward_fft, inverse_fft


def amplitude(subband):
    """Per-pixel modulus of an analytic subband: a smooth non-negative envelope."""
    return np.abs(as_complex_grid(subband))


def upsample_zero_pad(envelope, target_shape):
    """Interpolate an envelope to target_shape via centered spectrum zero-padding.

    Target dimensions must be integer multiples of the source dimensions and
    at least as large. Sinc-ringing negatives are clamped to zero since the
    result is semantically a non-negative weight.
    """
    env = np.asarray(envelope, dtype=np.float64)
    h, w = env.shape
    th, tw = target_shape
    if th < h or tw < w:
        raise ValueError(f"target {target_shape} smaller than source {env.shape}")
    if th % h or tw % w:
        raise ValueError(f"target {target_shape} not a multiple of source {env.shape}")
    if (th, tw) == (h, w):
        return env.copy()
    out = inverse_fft(embed_spectrum(forward_fft(env), target_shape)).real
    return np.maximum(out, 0.0)


def scale_weight(envelopes, beta, level):
    """Per-scale weight map: beta^(level-1) times the sum over orientations."""
    if level < 1:
        raise ValueError("level must be >= 1")
    if beta <= 0:
        raise ValueError("beta must be > 0")
    envelopes = [np.asarray(e, dtype=np.float64) for e in envelopes]
    shape = envelopes[0].shape
    for e in envelopes[1:]:
        if e.shape != shape:
            raise ValueError("envelopes must share one size")
    total = envelopes[0].copy()
    for e in envelopes[1:]:  # running sum; avoids stacking a (K, H, W) copy
        total += e
    return beta ** (level - 1) * total
