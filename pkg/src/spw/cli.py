"""Command-line surface for decomposition, weight maps, loss, metrics,
benchmarking, and the toy trainer.

Outputs are line-delimited key=value records with a versioned schema field.
Exit codes: 0 success, 2 input error, 1 internal failure.
"""

import argparse
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .demo import train
from .filters import FilterBankSpec
from .grid import crop_to, pad_to_multiple
from .metrics import evaluate_all
from .pfm import read_pfm, write_pfm
from .pyramid import decompose
from .spwloss import (
    SpwConfig,
    as_class_stack,
    one_hot,
    pixel_weights,
    weighted_ce_loss,
)

SCHEMA = "spw-cli/1"


class InputError(Exception):
    """User-facing input problem; maps to exit code 2."""


def _load_pil(path):
    try:
        from PIL import Image

        return Image.open(path)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}")
    except Exception as exc:
        raise InputError(f"cannot read image {path}: {exc}")


def load_intensity(path):
    """Grayscale image in [0, 1]; RGB is converted to luminance."""
    img = _load_pil(path)
    if img.mode == "L":
        return np.asarray(img, dtype=np.float64) / 255.0
    if img.mode in ("I;16", "I;16B", "I;16L"):
        return np.asarray(img, dtype=np.float64) / 65535.0
    if img.mode == "I":
        a = np.asarray(img, dtype=np.float64)
        return a / max(a.max(), 1.0)
    if img.mode in ("RGB", "RGBA"):
        a = np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0
        return a @ np.array([0.299, 0.587, 0.114])
    raise InputError(f"{path}: unsupported image mode {img.mode}")


def load_classes(path):
    """Integer class-id image."""
    img = _load_pil(path)
    if img.mode in ("L", "P", "I", "I;16", "I;16B", "I;16L"):
        return np.asarray(img, dtype=np.int64)
    if img.mode in ("RGB", "RGBA"):
        a = np.asarray(img.convert("RGB"), dtype=np.int64)
        if not (a[..., 0] == a[..., 1]).all() or not (a[..., 1] == a[..., 2]).all():
            raise InputError(f"{path}: RGB label image with unequal channels")
        return a[..., 0]
    raise InputError(f"{path}: unsupported label image mode {img.mode}")


def load_probability_stack(path):
    """Probability field: PFM-per-class directory, single PFM, or 8-bit image.

    Single-channel inputs are read as foreground probability and expanded to
    a two-class stack.
    """
    p = Path(path)
    if p.is_dir():
        files = sorted(p.glob("*.pfm"))
        if len(files) < 2:
            raise InputError(f"{path}: need at least 2 per-class .pfm files")
        return np.stack([read_pfm(f) for f in files])
    if p.suffix.lower() == ".pfm":
        try:
            fg = read_pfm(p)
        except FileNotFoundError:
            raise InputError(f"no such file: {path}")
        except ValueError as exc:
            raise InputError(str(exc))
        return np.stack([1.0 - fg, fg])
    fg = load_intensity(path)
    return np.stack([1.0 - fg, fg])


def _write_preview(path, grid):
    from PIL import Image

    lo, hi = float(grid.min()), float(grid.max())
    scaled = (grid - lo) / (hi - lo) if hi > lo else np.zeros_like(grid)
    Image.fromarray((scaled * 255).astype(np.uint8)).save(path)


def _emit(pairs):
    for key, value in pairs:
        print(f"{key}={value}")


def _config_pairs(cfg):
    return [
        ("lambda", cfg.lam),
        ("beta", cfg.beta),
        ("levels", cfg.levels),
        ("orients", cfg.orientations),
        ("class_weights", cfg.class_weight_mode),
        ("reduction", cfg.reduction),
    ]


def _cfg_from_args(args):
    return SpwConfig(
        lam=args.lam,
        beta=args.beta,
        levels=args.levels,
        orientations=args.orients,
        class_weight_mode=args.class_weights,
        reduction=args.reduction,
    )


def cmd_decompose(args):
    image = load_intensity(args.image)
    spec = FilterBankSpec(orientations=args.orients, levels=args.levels)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    padded, size = pad_to_multiple(image, 2 ** (spec.levels - 1))
    dec = decompose(padded, spec)
    elapsed_ms = (time.perf_counter() - t0) * 1000.0

    written = []

    def emit_map(name, grid):
        if grid.shape == padded.shape:
            grid = crop_to(grid, size)
        write_pfm(out / f"{name}.pfm", grid)
        _write_preview(out / f"{name}.png", grid)
        written.append((name, grid.shape))

    emit_map("highpass", dec.high_pass)
    for i, bands in enumerate(dec.subbands, start=1):
        for k, band in enumerate(bands, start=1):
            emit_map(f"level{i}_band{k}", np.abs(band))
    emit_map("lowpass", dec.low_pass)

    pairs = [("schema", SCHEMA), ("version", __version__)]
    pairs += [("input", args.image), ("out_dir", str(out))]
    pairs += [("levels", spec.levels), ("orients", spec.orientations)]
    pairs += [("input_size", f"{size[0]}x{size[1]}")]
    pairs += [("padded_size", f"{padded.shape[0]}x{padded.shape[1]}")]
    pairs += [("outputs", len(written))]
    pairs += [(f"map_{name}", f"{shape[0]}x{shape[1]}") for name, shape in written]
    pairs += [("decompose_ms", f"{elapsed_ms:.3f}")]
    _emit(pairs)
    (out / "manifest.txt").write_text(
        "".join(f"{k}={v}\n" for k, v in pairs), encoding="ascii"
    )


def _load_label_and_pred(args, need_pred):
    labels = load_classes(args.label)
    classes = max(int(labels.max()) + 1, 2)
    y = one_hot(labels, classes)
    pred = None
    if getattr(args, "pred", None) is not None:
        pred = load_probability_stack(args.pred)
        if pred.shape != y.shape:
            raise InputError(
                f"label {y.shape} and prediction {pred.shape} disagree in "
                "classes or size"
            )
    elif need_pred:
        raise InputError("a prediction input is required")
    return y, pred


def cmd_weightmap(args):
    cfg = _cfg_from_args(args)
    y, pred = _load_label_and_pred(args, need_pred=False)
    if args.no_pred_map:
        pred = None
    t0 = time.perf_counter()
    wmap = pixel_weights(y, pred, cfg)
    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    out = Path(args.out)
    write_pfm(out, wmap)
    _write_preview(out.with_suffix(".png"), wmap)
    _emit(
        [("schema", SCHEMA)]
        + _config_pairs(cfg)
        + [
            ("pred_map", "none" if pred is None else "included"),
            ("out", str(out)),
            ("weight_min", f"{wmap.min():.9g}"),
            ("weight_max", f"{wmap.max():.9g}"),
            ("weightmap_ms", f"{elapsed_ms:.3f}"),
        ]
    )


def cmd_loss(args):
    cfg = _cfg_from_args(args)
    y, pred = _load_label_and_pred(args, need_pred=True)
    t0 = time.perf_counter()
    wmap = pixel_weights(y, None if args.no_pred_map else pred, cfg)
    t1 = time.perf_counter()
    loss = weighted_ce_loss(y, pred, wmap, cfg.reduction)
    t2 = time.perf_counter()
    _emit(
        [("schema", SCHEMA)]
        + _config_pairs(cfg)
        + [
            ("pred_map", "none" if args.no_pred_map else "included"),
            ("loss", f"{loss:.12g}"),
            ("weightmap_ms", f"{(t1 - t0) * 1000:.3f}"),
            ("loss_ms", f"{(t2 - t1) * 1000:.3f}"),
        ]
    )


def cmd_metrics(args):
    gt = load_classes(args.gt)
    pred = load_classes(args.pred)
    if gt.shape != pred.shape:
        raise InputError(f"size mismatch: {gt.shape} vs {pred.shape}")
    classes = max(int(gt.max()), int(pred.max())) + 1
    record = evaluate_all(
        gt, pred, max(classes, 2), include_background=not args.exclude_background
    )
    _emit(
        [
            ("schema", SCHEMA),
            ("classes", max(classes, 2)),
            ("clustering", "connected-components-4"),
            ("background", "excluded" if args.exclude_background else "included"),
            ("miou", f"{record['miou']:.6f}"),
            ("mdice", f"{record['mdice']:.6f}"),
            ("vi", f"{record['vi']:.6f}"),
            ("ari", f"{record['ari']:.6f}"),
        ]
    )


def run_bench(sizes, reps, cfg, seed):
    """Median timings of the SPW weight-map path vs plain CE on random data.

    Reps are interleaved round-robin across sizes so that slow drifts in
    machine load hit every size alike and cancel out of the growth ratios.
    """
    rng = np.random.default_rng(seed)
    cases = []
    for size in sizes:
        y = one_hot(rng.integers(0, 2, (size, size)), 2)
        fg = rng.random((size, size))
        pred = np.stack([1.0 - fg, fg])
        unit = np.ones((size, size))
        pixel_weights(y, pred, cfg)  # warmup; amortizes filter-bank build
        cases.append({"size": size, "y": y, "pred": pred, "unit": unit,
                      "spw": [], "ce": []})
    for _ in range(reps):
        for case in cases:
            t0 = time.perf_counter()
            pixel_weights(case["y"], case["pred"], cfg)
            case["spw"].append(time.perf_counter() - t0)
            t0 = time.perf_counter()
            weighted_ce_loss(case["y"], case["pred"], case["unit"], cfg.reduction)
            case["ce"].append(time.perf_counter() - t0)
    rows = [
        {
            "size": case["size"],
            "spw_ms": statistics.median(case["spw"]) * 1000.0,
            "ce_ms": statistics.median(case["ce"]) * 1000.0,
        }
        for case in cases
    ]
    if len(rows) > 1:
        x = np.log([r["size"] ** 2 * np.log(r["size"] ** 2) for r in rows])
        t = np.log([r["spw_ms"] for r in rows])
        exponent = float(np.polyfit(x, t, 1)[0])
    else:
        exponent = float("nan")
    return rows, exponent


def cmd_bench(args):
    cfg = _cfg_from_args(args)
    sizes = [int(s) for s in args.sizes.split(",")]
    if any(s < 2 ** (cfg.levels - 1) for s in sizes):
        raise InputError("benchmark sizes too small for the pyramid depth")
    rows, exponent = run_bench(sizes, args.reps, cfg, args.seed)
    pairs = [("schema", SCHEMA), ("reps", args.reps), ("stat", "median")]
    for row in rows:
        s = row["size"]
        pairs += [
            (f"size_{s}_spw_ms", f"{row['spw_ms']:.3f}"),
            (f"size_{s}_ce_ms", f"{row['ce_ms']:.3f}"),
            (f"size_{s}_delta_to_ce_ms", f"{row['spw_ms'] - row['ce_ms']:.3f}"),
        ]
    for prev, cur in zip(rows, rows[1:]):
        if cur["size"] == 2 * prev["size"]:
            pairs.append(
                (
                    f"growth_{prev['size']}_to_{cur['size']}",
                    f"{cur['spw_ms'] / prev['spw_ms']:.3f}",
                )
            )
    pairs.append(("scaling_exponent", f"{exponent:.4f}"))
    _emit(pairs)


def cmd_demo_train(args):
    cfg = _cfg_from_args(args)
    if args.steps < 1:
        raise InputError("steps must be >= 1")
    t0 = time.perf_counter()
    log, _ = train(args.seed, args.steps, args.loss, cfg, lr=args.lr)
    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    _emit(
        [("schema", SCHEMA), ("loss_kind", args.loss), ("seed", args.seed)]
        + _config_pairs(cfg)
    )
    for line in log:
        print(line)
    print(f"train_ms={elapsed_ms:.3f}")


def _add_cfg_flags(p):
    p.add_argument("--lambda", dest="lam", type=float, default=10.0)
    p.add_argument("--beta", type=float, default=0.9)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--orients", type=int, default=4)
    p.add_argument("--class-weights", choices=["uniform", "invfreq"], default="uniform")
    p.add_argument("--reduction", choices=["sum", "mean"], default="mean")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spw",
        description="Steerable-pyramid weighted loss pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="write subband envelopes of an image")
    p.add_argument("image")
    p.add_argument("out_dir")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--orients", type=int, default=4)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("weightmap", help="compute the per-pixel weight map")
    p.add_argument("label")
    p.add_argument("--pred", default=None)
    p.add_argument("--no-pred-map", action="store_true")
    p.add_argument("--out", default="weights.pfm")
    _add_cfg_flags(p)
    p.set_defaults(func=cmd_weightmap)

    p = sub.add_parser("loss", help="evaluate the weighted cross-entropy loss")
    p.add_argument("label")
    p.add_argument("pred")
    p.add_argument("--no-pred-map", action="store_true")
    _add_cfg_flags(p)
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("metrics", help="mIoU / mDice / VI / ARI of two labelings")
    p.add_argument("gt")
    p.add_argument("pred")
    p.add_argument("--exclude-background", action="store_true")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("bench", help="weight-map timing vs plain CE across sizes")
    p.add_argument("--sizes", default="256,512,1024")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    _add_cfg_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("demo-train", help="train the toy per-pixel classifier")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=30)
    p.add_argument("--loss", choices=["ce", "spw"], default="spw")
    p.add_argument("--lr", type=float, default=0.05)
    _add_cfg_flags(p)
    p.set_defaults(func=cmd_demo_train)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (InputError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # internal failure
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
