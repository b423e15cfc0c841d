"""Steerable-pyramid weighted cross-entropy: weight maps, loss, gradients.

Class fields are stacks of shape (C, H, W): one-hot indicators for labels,
probabilities summing to 1 per pixel for predictions. Binary tasks may pass
a single (H, W) foreground grid; it is expanded to a two-class stack.
"""

from dataclasses import dataclass

import numpy as np

from .envelope import scale_weight
from .filters import FilterBankSpec
from .grid import crop_to, embed_spectrum, forward_fft, inverse_fft, pad_to_multiple
from .pyramid import band_envelopes

PROB_FLOOR = 1e-12  # clamp before logarithms so saturated predictions stay finite


@dataclass(frozen=True)
class SpwConfig:
    """Hyperparameters governing weight-map and loss computation."""

    lam: float = 10.0  # contribution of the multi-scale weight term
    beta: float = 0.9  # per-level scale emphasis
    levels: int = 4
    orientations: int = 4
    class_weight_mode: str = "uniform"  # or "invfreq"
    reduction: str = "mean"  # or "sum"

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")
        if self.class_weight_mode not in ("uniform", "invfreq"):
            raise ValueError(f"unknown class_weight_mode {self.class_weight_mode!r}")
        if self.reduction not in ("sum", "mean"):
            raise ValueError(f"unknown reduction {self.reduction!r}")

    def filter_spec(self):
        return FilterBankSpec(orientations=self.orientations, levels=self.levels)


def as_class_stack(field):
    """Coerce to a (C, H, W) float64 stack; a 2-D grid becomes (1-g, g)."""
    a = np.asarray(field, dtype=np.float64)
    if a.ndim == 2:
        a = np.stack([1.0 - a, a])
    if a.ndim != 3 or a.shape[0] < 2:
        raise ValueError(f"expected (C>=2, H, W) stack, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("field contains non-finite values")
    return a


def one_hot(labels, classes):
    """One-hot (C, H, W) stack from an integer class map."""
    labels = np.asarray(labels)
    if labels.min() < 0 or labels.max() >= classes:
        raise ValueError("label ids out of range")
    return (labels[None, :, :] == np.arange(classes)[:, None, None]).astype(np.float64)


def spw_map(field, cfg=SpwConfig()):
    """Multi-scale boundary/texture weight map of a class-probability stack.

    Each channel is mirror-padded to a pyramid-compatible size, decomposed,
    and its per-level envelope sums are beta-weighted, upsampled to full size,
    and accumulated; channels are summed and the padding is cropped away.
    """
    stack = as_class_stack(field)
    factor = 2 ** (cfg.levels - 1)
    spec = cfg.filter_spec()
    if stack.shape[0] == 2 and np.array_equal(stack[0], 1.0 - stack[1]):
        # complementary binary channels carry identical band envelopes: the
        # constant offset lives entirely in the lowpass and the sign flip
        # drops under the modulus, so one decomposition suffices
        stack = stack[1:]
        channel_gain = 2.0
    else:
        channel_gain = 1.0
    total = None
    for channel in stack:
        padded, size = pad_to_multiple(channel, factor)
        weights = [
            scale_weight(envelopes, cfg.beta, i)
            for i, envelopes in enumerate(band_envelopes(padded, spec), start=1)
        ]
        acc = np.zeros(padded.shape)
        # coarse levels are upsampled in one cascade: each spectrum is
        # embedded only one octave up, and a single full-size inverse
        # transform synthesizes all of them (embedding composes exactly,
        # since an embedded spectrum is zero on the next Nyquist band)
        coarse_spec = None
        for level_weight in reversed(weights):
            if level_weight.shape == padded.shape:
                acc += level_weight
                continue
            spectrum = forward_fft(level_weight)
            if coarse_spec is not None:
                spectrum += embed_spectrum(coarse_spec, spectrum.shape)
            coarse_spec = spectrum
        if coarse_spec is not None:
            acc += inverse_fft(
                embed_spectrum(coarse_spec, padded.shape), overwrite=True
            ).real
        contrib = crop_to(np.maximum(acc, 0.0), size)
        total = contrib if total is None else total + contrib
    return channel_gain * total


def combined_spw_weight(label, pred, cfg=SpwConfig()):
    """Sum of label- and prediction-derived maps; a constant under differentiation."""
    y = as_class_stack(label)
    p = as_class_stack(pred)
    if y.shape != p.shape:
        raise ValueError(f"label shape {y.shape} != prediction shape {p.shape}")
    return spw_map(y, cfg) + spw_map(p, cfg)


def class_weight_values(label_stack, mode):
    """Per-class weights; inverse-frequency is normalized to unit average.

    A class absent from the label gets the maximum assigned weight.
    """
    classes = label_stack.shape[0]
    if mode == "uniform":
        return np.ones(classes)
    counts = label_stack.sum(axis=(1, 2))
    present = counts > 0
    n = counts.sum()
    weights = np.empty(classes)
    weights[present] = n / (present.sum() * counts[present])
    if not present.all():
        weights[~present] = weights[present].max()
    return weights


def pixel_weights(label, pred, cfg=SpwConfig()):
    """Per-pixel loss weights: class term plus lambda times the SPW map.

    Pass ``pred=None`` for the label-only ablation. The SPW term is skipped
    entirely at lambda=0, where the result is exactly the class-weight map.
    """
    y = as_class_stack(label)
    wc = class_weight_values(y, cfg.class_weight_mode)
    base = np.einsum("c,chw->hw", wc, y)
    if cfg.lam == 0:
        return base
    if pred is None:
        spw = spw_map(y, cfg)
    else:
        spw = combined_spw_weight(y, pred, cfg)
    return base + cfg.lam * spw


def weighted_ce_loss(label, pred, weights, reduction="mean"):
    """Weighted negative log-likelihood of the true class at each pixel."""
    y = as_class_stack(label)
    p = as_class_stack(pred)
    w = np.asarray(weights, dtype=np.float64)
    if y.shape != p.shape or w.shape != y.shape[1:]:
        raise ValueError("label, prediction and weight shapes do not agree")
    ce = -(y * np.log(np.clip(p, PROB_FLOOR, None))).sum(axis=0)
    total = (w * ce).sum()
    if reduction == "mean":
        total /= w.size
    elif reduction != "sum":
        raise ValueError(f"unknown reduction {reduction!r}")
    return float(total)


def weighted_ce_gradient(label, logits, weights, reduction="mean"):
    """Analytic gradient of the weighted loss w.r.t. softmax logits.

    The weight map is treated as a constant: d/dlogit_c = w * (P_c - Y_c),
    divided by the pixel count under mean reduction.
    """
    y = as_class_stack(label)
    z = np.asarray(logits, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if z.shape != y.shape or w.shape != y.shape[1:]:
        raise ValueError("label, logits and weight shapes do not agree")
    p = softmax(z)
    g = w[None, :, :] * (p - y)
    if reduction == "mean":
        g = g / w.size
    elif reduction != "sum":
        raise ValueError(f"unknown reduction {reduction!r}")
    return g


def softmax(logits):
    """Numerically stable softmax over the class axis of a (C, H, W) stack."""
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=0, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=0, keepdims=True)
