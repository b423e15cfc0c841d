"""Toy end-to-end trainer: thin synthetic curves, per-pixel linear softmax model.

The classifier scores each pixel from its 5x5 neighborhood plus a bias term
and is trained by full-batch gradient descent on the weighted cross-entropy.
Everything is deterministic given the seed.
"""

import numpy as np

from .metrics import evaluate_all
from .spwloss import one_hot, pixel_weights, softmax, weighted_ce_gradient, weighted_ce_loss

PATCH = 5
IMAGE_SIZE = 64
NUM_SAMPLES = 200
NOISE_SIGMA = 0.3


def _draw_curve(mask, rng):
    h, w = mask.shape
    x0 = rng.uniform(0, w)
    y0 = rng.uniform(0, h)
    ang = rng.uniform(0, 2 * np.pi)
    amp = rng.uniform(2.0, 6.0)
    freq = rng.uniform(0.05, 0.2)
    length = rng.uniform(30.0, 80.0)
    t = np.arange(0.0, length, 0.4)
    wiggle = amp * np.sin(freq * t)
    cx = x0 + t * np.cos(ang) - wiggle * np.sin(ang)
    cy = y0 + t * np.sin(ang) + wiggle * np.cos(ang)
    ix = np.round(cx).astype(int)
    iy = np.round(cy).astype(int)
    keep = (ix >= 0) & (ix < w) & (iy >= 0) & (iy < h)
    mask[iy[keep], ix[keep]] = 1


def make_dataset(seed, samples=NUM_SAMPLES, size=IMAGE_SIZE):
    """Seeded images of thin curves on noisy background, with binary labels."""
    rng = np.random.default_rng(seed)
    images = np.empty((samples, size, size))
    labels = np.empty((samples, size, size), dtype=np.int64)
    for s in range(samples):
        mask = np.zeros((size, size), dtype=np.int64)
        for _ in range(rng.integers(2, 5)):
            _draw_curve(mask, rng)
        images[s] = rng.normal(0.0, NOISE_SIGMA, (size, size)) + mask
        labels[s] = mask
    return images, labels


def patch_features(images):
    """Per-pixel 5x5 neighborhood values plus a bias column, reflect-padded."""
    pad = PATCH // 2
    feats = []
    for img in images:
        padded = np.pad(img, pad, mode="reflect")
        windows = np.lib.stride_tricks.sliding_window_view(padded, (PATCH, PATCH))
        feats.append(windows.reshape(img.shape[0], img.shape[1], PATCH * PATCH))
    x = np.stack(feats)
    bias = np.ones(x.shape[:3] + (1,))
    return np.concatenate([x, bias], axis=-1)


def train(seed, steps, loss_kind, cfg, lr=0.05, samples=NUM_SAMPLES):
    """Full-batch gradient descent; returns (log lines, final metrics dict).

    loss_kind "ce" uses unit weights; "spw" recomputes the weight map from
    the current predictions at every step. At lambda=0 both produce the same
    all-ones weights, so their logs coincide.
    """
    images, labels = make_dataset(seed, samples=samples)
    x = patch_features(images)  # (S, H, W, F)
    s, h, w, nfeat = x.shape
    y = np.stack([one_hot(lab, 2) for lab in labels])  # (S, 2, H, W)
    x_flat = x.reshape(s, h * w, nfeat)
    weights_model = np.zeros((nfeat, 2))
    unit = np.ones((h, w))
    log = []
    for step in range(steps):
        logits = np.einsum("spf,fc->scp", x_flat, weights_model).reshape(s, 2, h, w)
        total_loss = 0.0
        grad = np.zeros_like(weights_model)
        for i in range(s):
            if loss_kind == "spw" and cfg.lam != 0:
                probs = softmax(logits[i])
                wmap = pixel_weights(y[i], probs, cfg)
            else:
                wmap = unit
            total_loss += weighted_ce_loss(y[i], softmax(logits[i]), wmap, "sum")
            g = weighted_ce_gradient(y[i], logits[i], wmap, "sum")
            grad += x_flat[i].T @ g.reshape(2, h * w).T
        scale = 1.0 / (s * h * w)
        total_loss *= scale
        weights_model -= lr * scale * grad
        log.append(f"step={step} loss={total_loss:.12f}")
    logits = np.einsum("spf,fc->scp", x_flat, weights_model).reshape(s, 2, h, w)
    preds = logits.argmax(axis=1)
    records = [evaluate_all(labels[i], preds[i], 2) for i in range(s)]
    final = {k: float(np.mean([r[k] for r in records])) for k in records[0]}
    for k in ("miou", "mdice", "vi", "ari"):
        log.append(f"final_{k}={final[k]:.6f}")
    return log, final
