"""Steerable-pyramid frequency-response filters.

Raised-cosine radial responses paired with oriented angular gains; oriented
band masks are analytic (single half-plane, doubled gain) so subbands come
out complex with the amplitude envelope directly available.
"""

import math
import threading
from dataclasses import dataclass

import numpy as np

from .grid import frequency_coords

# Tolerance for classifying a bin as lying on the half-plane dividing line.
_LINE_TOL = 1e-12


@dataclass(frozen=True)
class FilterBankSpec:
    """Number of orientations K and recursion levels N."""

    orientations: int = 4
    levels: int = 4

    def __post_init__(self):
        if self.orientations < 1:
            raise ValueError("orientations must be >= 1")
        if self.levels < 1:
            raise ValueError("levels must be >= 1")


@dataclass(frozen=True)
class LevelFilters:
    """Masks for one recursion level, sampled at that level's grid size."""

    analytic_bands: tuple  # K real-valued masks, values in [0, 2]
    real_bands: tuple  # K masks H(r)*G_k(theta), full plane
    lowpass: np.ndarray


@dataclass(frozen=True)
class FilterBank:
    spec: FilterBankSpec
    height: int
    width: int
    high_pass: np.ndarray
    low_pass: np.ndarray
    levels: tuple  # N LevelFilters, grid size halved per level
    alpha: float


def radial_highpass(r):
    """High-pass radial response: 0 below pi/4, 1 above pi/2, raised-cosine between."""
    r = np.asarray(r, dtype=np.float64)
    out = np.ones_like(r)
    out[r <= np.pi / 4] = 0.0
    band = (r > np.pi / 4) & (r < np.pi / 2)
    out[band] = np.cos((np.pi / 2) * np.log2(2.0 * r[band] / np.pi))
    return out


def radial_lowpass(r):
    """Complementary low-pass response, sqrt(1 - highpass^2)."""
    hp = radial_highpass(r)
    return np.sqrt(np.clip(1.0 - hp * hp, 0.0, 1.0))


def angular_normalizer(orientations):
    """Gain constant making the squared angular responses tile to 1."""
    k = orientations
    return (
        2.0 ** (k - 1)
        * math.factorial(k - 1)
        / math.sqrt(k * math.factorial(2 * (k - 1)))
    )


def angular_gain(theta, k, orientations):
    """Directional response of orientation k in 1..K at angle theta."""
    if not 1 <= k <= orientations:
        raise ValueError("orientation index out of range")
    theta = np.asarray(theta, dtype=np.float64)
    alpha = angular_normalizer(orientations)
    return alpha * np.abs(np.cos(theta - np.pi * k / orientations)) ** (
        orientations - 1
    )


def _level_masks(spec, height, width):
    r, theta = frequency_coords(height, width)
    lowpass = radial_lowpass(r)
    hp = radial_highpass(r)
    analytic = []
    real = []
    for k in range(1, spec.orientations + 1):
        g = angular_gain(theta, k, spec.orientations)
        base = hp * g
        side = np.cos(theta - np.pi * k / spec.orientations)
        gain = np.where(side > _LINE_TOL, 2.0, np.where(side < -_LINE_TOL, 0.0, 1.0))
        gain[0, 0] = 1.0  # DC is conventionally on the line; base is 0 there anyway
        analytic.append(gain * base)
        real.append(base)
    return LevelFilters(tuple(analytic), tuple(real), lowpass)


def build_filter_bank(spec, height, width):
    """Sample all masks for a target grid size.

    Requires both dimensions divisible by 2^(levels-1) so the recursion's
    frequency-domain downsampling stays integral.
    """
    div = 2 ** (spec.levels - 1)
    if height % div or width % div:
        raise ValueError(
            f"grid {height}x{width} not divisible by {div} "
            f"(required for {spec.levels} levels)"
        )
    r, _ = frequency_coords(height, width)
    levels = tuple(
        _level_masks(spec, height >> i, width >> i) for i in range(spec.levels)
    )
    return FilterBank(
        spec=spec,
        height=height,
        width=width,
        high_pass=radial_highpass(r),
        low_pass=radial_lowpass(r),
        levels=levels,
        alpha=angular_normalizer(spec.orientations),
    )


_bank_cache = {}
_bank_lock = threading.Lock()


def get_filter_bank(spec, height, width):
    """Cached filter bank per (spec, size); at most one construction per key."""
    key = (spec.orientations, spec.levels, height, width)
    with _bank_lock:
        bank = _bank_cache.get(key)
        if bank is None:
            bank = build_filter_bank(spec, height, width)
            _bank_cache[key] = bank
    return bank
