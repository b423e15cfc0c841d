import numpy as np
import pytest
from scipy.ndimage import distance_transform_edt

from spw.spwloss import (
    SpwConfig,
    as_class_stack,
    class_weight_values,
    combined_spw_weight,
    one_hot,
    pixel_weights,
    softmax,
    spw_map,
    weighted_ce_gradient,
    weighted_ce_loss,
)


def disk_mask(n, radius):
    y, x = np.mgrid[:n, :n]
    return ((y - n / 2) ** 2 + (x - n / 2) ** 2 <= radius**2).astype(np.float64)


def test_config_validation():
    with pytest.raises(ValueError):
        SpwConfig(lam=-1.0)
    with pytest.raises(ValueError):
        SpwConfig(beta=0.0)
    with pytest.raises(ValueError):
        SpwConfig(class_weight_mode="softmax")
    with pytest.raises(ValueError):
        SpwConfig(reduction="median")


def test_as_class_stack_expands_binary():
    g = np.array([[0.0, 1.0], [0.25, 0.5]])
    stack = as_class_stack(g)
    assert stack.shape == (2, 2, 2)
    assert np.array_equal(stack[1], g)
    assert np.array_equal(stack[0], 1.0 - g)
    with pytest.raises(ValueError):
        as_class_stack(np.ones((1, 4, 4)))
    with pytest.raises(ValueError):
        as_class_stack(np.array([[np.inf, 0.0]]))


def test_one_hot():
    labels = np.array([[0, 2], [1, 1]])
    stack = one_hot(labels, 3)
    assert stack.shape == (3, 2, 2)
    assert stack.sum(axis=0).min() == 1.0
    assert stack[2, 0, 1] == 1.0 and stack[2, 0, 0] == 0.0
    with pytest.raises(ValueError):
        one_hot(labels, 2)


def test_spw_map_constant_field_is_zero():
    g = np.full((64, 64), 0.5)
    assert np.abs(spw_map(g)).max() < 1e-10


def test_spw_map_nonnegative_and_boundary_peaked():
    g = disk_mask(128, 36)
    w = spw_map(g)
    assert w.min() >= -1e-12
    dist = distance_transform_edt(g) + distance_transform_edt(1 - g)
    near = w[dist <= 2].mean()
    far = w[dist > 10].mean()
    assert near > 3 * far


def test_spw_map_vertical_edge_profile_peaks_at_edge():
    g = np.zeros((64, 64))
    g[:, 32:] = 1.0
    w = spw_map(g)
    profile = w.mean(axis=0)
    # the edge and its periodic image (column 0 under the FFT) carry the
    # maxima; the troughs between them stay well below
    assert profile[31:33].max() >= profile.max() - 1e-9
    assert profile[28:36].mean() > 2.5 * profile[12:20].mean()


def test_combined_weight_doubles_when_pred_equals_label():
    g = disk_mask(64, 14)
    single = spw_map(g)
    both = combined_spw_weight(g, g)
    assert np.array_equal(both, 2.0 * single)


def test_combined_weight_marks_both_boundaries():
    y = np.zeros((64, 64))
    y[:, 20:28] = 1.0
    p = np.zeros((64, 64))
    p[:, 40:48] = 1.0
    w = combined_spw_weight(y, p)
    background = w[:, 0:8].mean()
    assert w[:, 18:30].mean() > 2 * background
    assert w[:, 38:50].mean() > 2 * background


def test_uniform_prediction_contributes_nothing():
    y = disk_mask(64, 10)
    p = np.full((64, 64), 0.5)
    both = combined_spw_weight(y, p)
    assert np.abs(both - spw_map(y)).max() < 1e-9


def test_class_weight_values():
    y = one_hot(np.array([[0, 0], [0, 1]]), 2)
    assert np.array_equal(class_weight_values(y, "uniform"), np.ones(2))
    w = class_weight_values(y, "invfreq")
    # n / (present * count): 4/(2*3) and 4/(2*1)
    assert np.allclose(w, [2 / 3, 2.0])
    # absent class takes the maximum assigned weight
    y3 = one_hot(np.array([[0, 0], [0, 1]]), 3)
    w3 = class_weight_values(y3, "invfreq")
    assert w3[2] == pytest.approx(w3[:2].max())


def test_pixel_weights_lambda_zero_is_class_map():
    y = disk_mask(32, 9)
    cfg = SpwConfig(lam=0.0)
    assert np.array_equal(pixel_weights(y, None, cfg), np.ones((32, 32)))
    cfg = SpwConfig(lam=0.0, class_weight_mode="invfreq")
    stack = as_class_stack(y)
    expect = np.einsum("c,chw->hw", class_weight_values(stack, "invfreq"), stack)
    assert np.array_equal(pixel_weights(y, None, cfg), expect)


def test_pixel_weights_linear_in_lambda():
    rng = np.random.default_rng(21)
    y = disk_mask(32, 8)
    p = np.clip(y + 0.1 * rng.standard_normal((32, 32)), 0.0, 1.0)
    base = pixel_weights(y, p, SpwConfig(lam=0.0))
    w1 = pixel_weights(y, p, SpwConfig(lam=2.0))
    w2 = pixel_weights(y, p, SpwConfig(lam=6.0))
    assert np.allclose(w2 - base, 3.0 * (w1 - base), rtol=1e-12, atol=1e-12)


def test_pixel_weights_never_below_class_term():
    y = disk_mask(32, 8)
    base = pixel_weights(y, None, SpwConfig(lam=0.0))
    full = pixel_weights(y, None, SpwConfig(lam=10.0))
    assert (full >= base - 1e-12).all()


def test_weighted_ce_loss_hand_case():
    y = np.array([[1.0, 1.0]])  # both pixels foreground
    p = np.array([[0.5, 0.25]])
    w = np.array([[1.0, 2.0]])
    loss = weighted_ce_loss(y, p, w, reduction="sum")
    assert loss == pytest.approx(-(np.log(0.5) + 2 * np.log(0.25)), abs=1e-12)
    assert loss == pytest.approx(3.465736, abs=1e-6)
    assert weighted_ce_loss(y, p, w, reduction="mean") == pytest.approx(loss / 2)


def test_weighted_ce_loss_zero_on_perfect_prediction():
    y = one_hot(np.array([[0, 1], [2, 1]]), 3)
    w = np.full((2, 2), 3.3)
    assert weighted_ce_loss(y, y, w) == 0.0


def test_weighted_ce_loss_shape_errors():
    y = np.ones((2, 4, 4)) * 0.5
    with pytest.raises(ValueError):
        weighted_ce_loss(y, np.ones((3, 4, 4)) / 3, np.ones((4, 4)))
    with pytest.raises(ValueError):
        weighted_ce_loss(y, y, np.ones((5, 4)))
    with pytest.raises(ValueError):
        weighted_ce_loss(y, y, np.ones((4, 4)), reduction="max")


def test_gradient_single_pixel_hand_case():
    y = np.array([[1.0]])  # foreground -> one-hot (0, 1)... build explicitly
    label = np.zeros((2, 1, 1))
    label[0] = 1.0
    logits = np.zeros((2, 1, 1))  # softmax = (0.5, 0.5)
    w = np.full((1, 1), 3.0)
    g = weighted_ce_gradient(label, logits, w, reduction="sum")
    assert g[0, 0, 0] == pytest.approx(-1.5)
    assert g[1, 0, 0] == pytest.approx(1.5)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(22)
    label = one_hot(rng.integers(0, 3, size=(4, 4)), 3)
    logits = rng.standard_normal((3, 4, 4))
    w = np.abs(rng.standard_normal((4, 4))) + 0.1
    g = weighted_ce_gradient(label, logits, w, reduction="sum")
    eps = 1e-6
    for idx in [(0, 0, 0), (1, 2, 3), (2, 3, 1), (0, 1, 2)]:
        zp = logits.copy()
        zp[idx] += eps
        zm = logits.copy()
        zm[idx] -= eps
        lp = weighted_ce_loss(label, softmax(zp), w, reduction="sum")
        lm = weighted_ce_loss(label, softmax(zm), w, reduction="sum")
        assert g[idx] == pytest.approx((lp - lm) / (2 * eps), abs=1e-5)


def test_gradient_mean_is_sum_over_pixels():
    rng = np.random.default_rng(23)
    label = one_hot(rng.integers(0, 2, size=(4, 4)), 2)
    logits = rng.standard_normal((2, 4, 4))
    w = np.ones((4, 4))
    gs = weighted_ce_gradient(label, logits, w, reduction="sum")
    gm = weighted_ce_gradient(label, logits, w, reduction="mean")
    assert np.allclose(gs, 16 * gm, rtol=1e-14)


def test_gradient_sums_to_zero_over_classes():
    rng = np.random.default_rng(24)
    label = one_hot(rng.integers(0, 4, size=(6, 6)), 4)
    logits = rng.standard_normal((4, 6, 6))
    w = np.abs(rng.standard_normal((6, 6)))
    g = weighted_ce_gradient(label, logits, w)
    assert np.abs(g.sum(axis=0)).max() < 1e-15


def test_softmax_stability_and_normalization():
    z = np.array([[[1000.0]], [[998.0]]])
    p = softmax(z)
    assert np.isfinite(p).all()
    assert p.sum(axis=0)[0, 0] == pytest.approx(1.0)
    assert p[0, 0, 0] == pytest.approx(1 / (1 + np.exp(-2.0)))
