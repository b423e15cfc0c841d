"""Frequency-domain steerable pyramid decomposition and reconstruction.

An image maps to a high-pass residue, N levels of K complex (analytic)
oriented subbands with spatial resolution halved per level, and a low-pass
residue at the coarsest band resolution. The transform is linear, uses
circular boundary handling, and reconstructs the input as a tight frame.
"""

from dataclasses import dataclass

import numpy as np

from .filters import FilterBankSpec, get_filter_bank
from .grid import (
    as_real_grid,
    downsample_spectrum,
    embed_spectrum,
    forward_fft,
    inverse_fft,
)


@dataclass
class PyramidDecomposition:
    high_pass: np.ndarray  # real, full resolution
    subbands: list  # subbands[i][k], complex, level i at size / 2**i
    low_pass: np.ndarray  # real, same size as the last level's bands
    spec: FilterBankSpec
    original_size: tuple


def decompose(image, spec=FilterBankSpec()):
    """Split an image into the oriented multi-scale hierarchy.

    Dimensions must be divisible by 2^(levels-1); pad with
    :func:`spw.grid.pad_to_multiple` first otherwise.
    """
    g = as_real_grid(image)
    bank = get_filter_bank(spec, *g.shape)
    spectrum = forward_fft(g)
    high = inverse_fft(bank.high_pass * spectrum).real
    low_spec = bank.low_pass * spectrum
    subbands = []
    low = None
    for i, lev in enumerate(bank.levels):
        subbands.append([inverse_fft(m * low_spec) for m in lev.analytic_bands])
        residual = lev.lowpass * low_spec
        if i < spec.levels - 1:
            low_spec = downsample_spectrum(residual)
        else:
            low = inverse_fft(residual).real
    return PyramidDecomposition(high, subbands, low, spec, g.shape)


def band_envelopes(image, spec=FilterBankSpec()):
    """Per-level amplitude envelopes of every oriented subband.

    Produces the same values as taking the modulus of each subband of
    :func:`decompose`, but skips synthesizing the high- and low-pass residues
    that the envelopes never use.
    """
    g = as_real_grid(image)
    bank = get_filter_bank(spec, *g.shape)
    low_spec = bank.low_pass * forward_fft(g)
    levels = []
    for i, lev in enumerate(bank.levels):
        levels.append(
            [
                np.abs(inverse_fft(m * low_spec, overwrite=True))
                for m in lev.analytic_bands
            ]
        )
        if i < spec.levels - 1:
            low_spec = downsample_spectrum(lev.lowpass * low_spec)
    return levels


def _check_ladder(p):
    h, w = p.original_size
    if len(p.subbands) != p.spec.levels:
        raise ValueError("subband level count does not match spec")
    for i, bands in enumerate(p.subbands):
        expect = (h >> i, w >> i)
        if len(bands) != p.spec.orientations:
            raise ValueError(f"level {i + 1} has {len(bands)} bands")
        for b in bands:
            if b.shape != expect:
                raise ValueError(
                    f"level {i + 1} band shape {b.shape}, expected {expect}"
                )
    expect = (h >> (p.spec.levels - 1), w >> (p.spec.levels - 1))
    if p.low_pass.shape != expect:
        raise ValueError(f"low-pass shape {p.low_pass.shape}, expected {expect}")


def reconstruct(p):
    """Invert :func:`decompose` by applying conjugate filters in reverse.

    Only the real parts of the analytic subbands carry independent
    information; reconstruction uses them with the non-analytic band masks.
    """
    _check_ladder(p)
    spec = p.spec
    h, w = p.original_size
    bank = get_filter_bank(spec, h, w)
    low_spec = None
    for i in range(spec.levels - 1, -1, -1):
        lev = bank.levels[i]
        acc = np.zeros((h >> i, w >> i), dtype=np.complex128)
        for mask, band in zip(lev.real_bands, p.subbands[i]):
            acc += mask * forward_fft(band.real)
        if i == spec.levels - 1:
            acc += lev.lowpass * forward_fft(p.low_pass)
        else:
            acc += lev.lowpass * embed_spectrum(low_spec, acc.shape)
        low_spec = acc
    spectrum = bank.high_pass * forward_fft(p.high_pass) + bank.low_pass * low_spec
    return inverse_fft(spectrum).real
