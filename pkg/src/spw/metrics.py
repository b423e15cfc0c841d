"""Segmentation metrics: mIoU, mDice, variation of information, adjusted Rand.

Regional metrics compare class masks directly; the clustering metrics compare
4-connected component labelings built from the masks, with background
components included as clusters by default.
"""

from dataclasses import dataclass

import numpy as np

from ._accel import label_components


@dataclass(frozen=True)
class ContingencyTable:
    """Sparse cluster co-occurrence counts between two labelings."""

    counts: np.ndarray  # nonzero cell counts n_ij
    row_of: np.ndarray  # row cluster index per cell
    col_of: np.ndarray  # column cluster index per cell
    row_totals: np.ndarray  # a_i
    col_totals: np.ndarray  # b_j
    total: int


def _check_same_shape(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def connected_components(mask):
    """Per-class 4-connected components; ids assigned in raster order."""
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise ValueError("mask must be 2-D")
    return label_components(mask)


def contingency_table(a, b):
    a, b = _check_same_shape(a, b)
    _, ai = np.unique(a.ravel(), return_inverse=True)
    bu, bi = np.unique(b.ravel(), return_inverse=True)
    pair = ai.astype(np.int64) * len(bu) + bi
    cells, counts = np.unique(pair, return_counts=True)
    return ContingencyTable(
        counts=counts,
        row_of=cells // len(bu),
        col_of=cells % len(bu),
        row_totals=np.bincount(ai),
        col_totals=np.bincount(bi),
        total=a.size,
    )


def miou(gt, pred, classes):
    """Mean IoU over classes present in either labeling."""
    gt, pred = _check_same_shape(gt, pred)
    scores = []
    for c in range(classes):
        gm = gt == c
        pm = pred == c
        union = gm.sum() + pm.sum()
        inter = (gm & pm).sum()
        union -= inter
        if union == 0:
            continue  # class absent from both; skip from the mean
        scores.append(inter / union)
    return float(np.mean(scores))


def mdice(gt, pred, classes):
    """Mean Dice over classes present in either labeling."""
    gt, pred = _check_same_shape(gt, pred)
    scores = []
    for c in range(classes):
        gm = gt == c
        pm = pred == c
        denom = gm.sum() + pm.sum()
        if denom == 0:
            continue
        scores.append(2.0 * (gm & pm).sum() / denom)
    return float(np.mean(scores))


def variation_of_information(a, b):
    """VI = H(A|B) + H(B|A) in nats; 0 iff identical up to id permutation."""
    t = contingency_table(a, b)
    p = t.counts / t.total
    terms = np.log(t.counts / t.row_totals[t.row_of]) + np.log(
        t.counts / t.col_totals[t.col_of]
    )
    return float(-(p * terms).sum() + 0.0)  # + 0.0 normalizes IEEE -0.0


def _comb2(x):
    x = np.asarray(x, dtype=np.float64)
    return x * (x - 1.0) / 2.0


def adjusted_rand_index(a, b):
    """Chance-corrected pair-counting agreement in [-1, 1]."""
    t = contingency_table(a, b)
    if t.total < 2:
        raise ValueError("need at least 2 pixels")
    sum_cells = _comb2(t.counts).sum()
    sum_rows = _comb2(t.row_totals).sum()
    sum_cols = _comb2(t.col_totals).sum()
    expected = sum_rows * sum_cols / _comb2(np.int64(t.total))
    maximum = 0.5 * (sum_rows + sum_cols)
    if maximum == expected:
        return 1.0  # degenerate: both labelings trivial
    return float((sum_cells - expected) / (maximum - expected))


def evaluate_all(gt_mask, pred_mask, classes, include_background=True):
    """Full metric record: regional scores on masks, clustering scores on components.

    With include_background=False, pixels whose ground-truth class is 0 are
    excluded from the VI/ARI contingency.
    """
    gt_mask, pred_mask = _check_same_shape(gt_mask, pred_mask)
    gt_cc = connected_components(gt_mask)
    pred_cc = connected_components(pred_mask)
    if not include_background:
        keep = gt_mask != 0
        gt_cc = gt_cc[keep]
        pred_cc = pred_cc[keep]
    return {
        "miou": miou(gt_mask, pred_mask, classes),
        "mdice": mdice(gt_mask, pred_mask, classes),
        "vi": variation_of_information(gt_cc, pred_cc),
        "ari": adjusted_rand_index(gt_cc, pred_cc),
    }
