"""Command-line orchestration: synth, train, enhance, eval, gradcheck, ablate.

Exit codes: 0 success, 2 configuration error, 3 I/O or file-format error,
4 numeric divergence during training, 5 gradient-check failure. Every command
prints its fully resolved configuration as one `run-config` JSON line so runs
can be reproduced from logs.
"""

import argparse
import concurrent.futures
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import color, imageio, loss, optim, quality, tensor, watersim
from . import model as model_mod
from .errors import (
    ConfigError,
    DataIOError,
    DimensionError,
    FormatError,
    NumericError,
    UwnetError,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4
EXIT_GRADCHECK = 5

GRADCHECK_TOLERANCE = 1e-5
ABLATION_VARIANTS = ("full", "woRL", "woDC", "woSSIM")


def _print_config(command, args_dict):
    resolved = {"command": command}
    resolved.update({k: (str(v) if isinstance(v, Path) else v) for k, v in args_dict.items()})
    print("run-config " + json.dumps(resolved, sort_keys=True))


def _parse_resize(text):
    if text == "none":
        return None
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise ConfigError(f"bad --resize value {text!r}, expected WIDTHxHEIGHT or none") from None


# ---------------------------------------------------------------------------
# training


class _PairLoader:
    """Loads (degraded, truth) tensors for manifest entries, with a memory cache."""

    def __init__(self, manifest, cache=True, require_ssim_size=False):
        self.manifest = manifest
        self.cache = {} if cache else None
        self.require_ssim_size = require_ssim_size

    def __len__(self):
        return len(self.manifest.entries)

    def load(self, index):
        if self.cache is not None and index in self.cache:
            return self.cache[index]
        entry = self.manifest.entries[index]
        degraded = imageio.read_image(self.manifest.resolve(entry.path_a))
        truth = imageio.read_image(self.manifest.resolve(entry.path_b))
        if degraded.shape != truth.shape:
            raise ConfigError(
                f"pair {entry.path_a} / {entry.path_b} sizes differ: "
                f"{degraded.shape} vs {truth.shape}"
            )
        if self.require_ssim_size and (
            degraded.shape[0] < loss.SSIM_WINDOW or degraded.shape[1] < loss.SSIM_WINDOW
        ):
            raise ConfigError(
                f"{entry.path_a} is smaller than the {loss.SSIM_WINDOW}x{loss.SSIM_WINDOW} "
                "SSIM window; train with --no-ssim-loss or bigger images"
            )
        pair = (degraded, truth)
        if self.cache is not None:
            self.cache[index] = pair
        return pair


def _random_crop(rng, degraded, truth, size):
    h, w = degraded.shape[:2]
    if size > h or size > w:
        raise ConfigError(f"--crop {size} exceeds image size {h}x{w}")
    y = int(rng.integers(0, h - size + 1))
    x = int(rng.integers(0, w - size + 1))
    return (
        degraded[y : y + size, x : x + size, :],
        truth[y : y + size, x : x + size, :],
    )


def train_model(
    train_manifest,
    epochs=20,
    batch_size=16,
    crop=None,
    use_ssim=True,
    config=None,
    seed=0,
    cache_images=True,
    log=None,
):
    """Train a model over a (degraded, truth) manifest.

    Gradients are accumulated sequentially over each mini-batch, averaged,
    then applied with one ADAM step. Returns (model, epoch_rows,
    shuffle_lines) where epoch_rows are (epoch, meanTotal, meanMse,
    meanSsimLoss) tuples and shuffle_lines record the per-epoch sample order.
    """
    if seed < 0:
        raise ConfigError("--seed must be nonnegative")
    if batch_size < 1:
        raise ConfigError(f"batch size must be >= 1, got {batch_size}")
    if epochs < 1:
        raise ConfigError(f"epochs must be >= 1, got {epochs}")
    if crop is not None and use_ssim and crop < loss.SSIM_WINDOW:
        raise ConfigError(f"--crop {crop} is below the {loss.SSIM_WINDOW} pixel SSIM window")
    if not train_manifest.entries:
        raise ConfigError("training manifest is empty")

    net = model_mod.build(config if config is not None else model_mod.ModelConfig(seed=seed))
    state = optim.adam_init(net)
    loader = _PairLoader(train_manifest, cache=cache_images, require_ssim_size=use_ssim)

    epoch_rows = []
    shuffle_lines = []
    for epoch in range(epochs):
        rng = np.random.default_rng(seed ^ epoch)
        perm = rng.permutation(len(loader))
        shuffle_lines.append(f"{epoch}\t{','.join(str(i) for i in perm)}")
        sums = np.zeros(3)
        for start in range(0, len(perm), batch_size):
            batch = perm[start : start + batch_size]
            grads = model_mod.ModelGradients.zeros_like(net)
            for index in batch:
                degraded, truth = loader.load(int(index))
                if crop is not None:
                    degraded, truth = _random_crop(rng, degraded, truth, crop)
                _, enhanced, cache = model_mod.forward(net, degraded)
                if use_ssim:
                    report = loss.total_loss(enhanced, truth)
                    total_v, mse_v, ssim_v = report.total, report.mse, report.ssim_loss
                    grad = report.grad_wrt_prediction
                else:
                    mse_v, grad = loss.mse_loss(enhanced, truth)
                    total_v, ssim_v = mse_v, 0.0
                if not np.isfinite(total_v):
                    raise NumericError(
                        f"non-finite loss at epoch {epoch}, sample {index}: "
                        f"total={total_v} mse={mse_v} ssim={ssim_v}"
                    )
                grads.accumulate(model_mod.backward(net, cache, grad))
                sums += (total_v, mse_v, ssim_v)
            grads.scale(1.0 / len(batch))
            optim.adam_step(state, net, grads)
        means = sums / len(perm)
        epoch_rows.append((epoch, float(means[0]), float(means[1]), float(means[2])))
        if log is not None:
            log(f"epoch {epoch}: total={means[0]:.6f} mse={means[1]:.6f} ssim={means[2]:.6f}")
    return net, epoch_rows, shuffle_lines


def _write_metrics(rows, path):
    text = "".join(f"{e}\t{t!r}\t{m!r}\t{s!r}\n" for e, t, m, s in rows)
    imageio._atomic_write_bytes(path, text.encode("utf-8"))


def _write_shuffle_log(lines, path):
    imageio._atomic_write_bytes(path, ("\n".join(lines) + "\n").encode("utf-8"))


def enhance_tensor(net, degraded, post=False):
    """Forward pass clamped to [0, 1], optional range post-processing."""
    _, enhanced, _ = model_mod.forward(net, degraded)
    out = np.clip(enhanced, 0.0, 1.0)
    if post:
        out = color.postprocess(out)
    return out


def _score_pairs(net, manifest, cache_images=True):
    """Mean 0-255 metrics of (enhanced, truth) and (raw, truth) over a manifest."""
    loader = _PairLoader(manifest, cache=cache_images)
    rows = {"enhanced": [], "raw": []}
    for index in range(len(loader)):
        degraded, truth = loader.load(index)
        truth255 = np.rint(truth * 255.0)
        for name, image in (("enhanced", enhance_tensor(net, degraded)), ("raw", degraded)):
            img255 = np.rint(np.clip(image, 0.0, 1.0) * 255.0)
            mse = quality.mse_metric(img255, truth255)
            rows[name].append(
                (mse, quality.psnr_from_mse(mse), quality.ssim_metric(img255, truth255))
            )
    means = {}
    for name, triples in rows.items():
        arr = np.asarray(triples)
        means[name] = tuple(float(v) for v in arr.mean(axis=0))
    return means["enhanced"], means["raw"]


# ---------------------------------------------------------------------------
# gradient checks


def _primitive_checks(size, seed):
    rng = np.random.default_rng(seed)
    results = []

    params = tensor.ConvParams(
        kernel=rng.normal(0, 0.5, size=(3, 3, 2, 3)), bias=rng.normal(0, 0.5, size=3)
    )
    x = rng.uniform(-1, 1, size=(size, size, 2))

    def conv_wrt_input(t):
        out = tensor.conv2d_forward(t, params)
        gi, _, _ = tensor.conv2d_backward(np.ones_like(out), t, params)
        return float(out.sum()), gi

    results.append(("conv2d/input", tensor.finite_difference_check(conv_wrt_input, x.copy())))

    def conv_wrt_kernel(k):
        p = tensor.ConvParams(kernel=k, bias=params.bias)
        out = tensor.conv2d_forward(x, p)
        _, gk, _ = tensor.conv2d_backward(np.ones_like(out), x, p)
        return float(out.sum()), gk

    results.append(
        ("conv2d/kernel", tensor.finite_difference_check(conv_wrt_kernel, params.kernel.copy()))
    )

    def conv_wrt_bias(b):
        p = tensor.ConvParams(kernel=params.kernel, bias=b)
        out = tensor.conv2d_forward(x, p)
        _, _, gb = tensor.conv2d_backward(np.ones_like(out), x, p)
        return float(out.sum()), gb

    results.append(
        ("conv2d/bias", tensor.finite_difference_check(conv_wrt_bias, params.bias.copy()))
    )

    # keep ReLU probes away from the kink
    r = rng.uniform(0.05, 1.0, size=(size, size, 3)) * rng.choice([-1.0, 1.0], size=(size, size, 3))

    def relu_fn(t):
        out = tensor.relu_forward(t)
        return float((out * out).sum()), tensor.relu_backward(2.0 * out, t)

    results.append(("relu", tensor.finite_difference_check(relu_fn, r.copy())))

    c = rng.uniform(-1, 1, size=(size, size, 4))

    def concat_fn(t):
        parts = [t[:, :, :1], t[:, :, 1:]]
        merged = tensor.concat_channels(parts)
        grad_parts = tensor.concat_backward(2.0 * merged, [1, 3])
        return float((merged * merged).sum()), np.concatenate(grad_parts, axis=2)

    results.append(("concat", tensor.finite_difference_check(concat_fn, c.copy())))

    other = rng.uniform(-1, 1, size=(size, size, 3))

    def add_fn(t):
        out = tensor.add(t, other)
        return float((out * out).sum()), 2.0 * out

    results.append(("add", tensor.finite_difference_check(add_fn, r.copy())))
    return results


def _model_variant_configs(seed):
    base = dict(seed=seed)
    return (
        ("full", model_mod.ModelConfig(**base)),
        ("woRL", model_mod.ModelConfig(residual_learning=False, **base)),
        ("woDC", model_mod.ModelConfig(dense_concat=False, **base)),
        ("woSSIM", model_mod.ModelConfig(**base)),  # loss-side ablation, same graph
    )


def _full_model_check(config, size, seed, samples_per_layer=25, corrupt=False, eps=1e-6):
    """Finite differences through the whole network with loss = sum(enhanced).

    Every bias entry, every input pixel and a seeded sample of kernel weights
    per layer are perturbed. The relative-error denominator is floored so
    that components whose true derivative sits at the central-difference
    roundoff level (about |loss| * machine-eps / eps in absolute terms) are
    judged against that noise budget instead of their own magnitude; sizable
    components still face the plain relative bound. Returns
    (worstErr, worstLabel).
    """
    rng = np.random.default_rng(seed)
    net = model_mod.build(config)
    x = rng.uniform(0.05, 0.95, size=(size, size, 3))

    def loss_value():
        _, enhanced, _ = model_mod.forward(net, x)
        return float(enhanced.sum())

    _, enhanced, cache = model_mod.forward(net, x)
    grads = model_mod.backward(net, cache, np.ones_like(enhanced))
    if corrupt:
        grads.layers[len(net.layers) // 2].kernel += 1e-3

    fd_noise = max(1.0, abs(loss_value())) * np.finfo(np.float64).eps / eps
    denominator_floor = 20.0 * fd_noise / GRADCHECK_TOLERANCE
    worst = (0.0, "none")

    def probe(array, analytic, label, indices):
        nonlocal worst
        flat = array.reshape(-1)
        gflat = np.asarray(analytic).reshape(-1)
        for k in map(int, np.atleast_1d(indices)):
            orig = flat[k]
            flat[k] = orig + eps
            up = loss_value()
            flat[k] = orig - eps
            down = loss_value()
            flat[k] = orig
            numeric = (up - down) / (2 * eps)
            err = abs(gflat[k] - numeric) / max(
                abs(gflat[k]), abs(numeric), denominator_floor
            )
            if err > worst[0]:
                worst = (err, f"{label}[{k}]")

    for li, (params, g) in enumerate(zip(net.layers, grads.layers)):
        picks = rng.choice(
            params.kernel.size, size=min(samples_per_layer, params.kernel.size), replace=False
        )
        probe(params.kernel, g.kernel, f"layer{li}.kernel", picks)
        probe(params.bias, g.bias, f"layer{li}.bias", np.arange(params.bias.size))
    probe(x, grads.input, "input", np.arange(x.size))
    return worst


def run_gradient_checks(size=8, seed=0, corrupt=False):
    """Primitive and full-model gradient suites; returns (results, worst).

    `results` is a list of (name, maxRelativeError); `worst` is the largest
    entry, annotated with the offending parameter for the model checks.
    """
    results = list(_primitive_checks(size, seed))
    for name, config in _model_variant_configs(seed):
        err, label = _full_model_check(config, size, seed, corrupt=corrupt)
        results.append((f"model/{name}/{label}", err))
    worst = max(results, key=lambda r: r[1])
    return results, worst


# ---------------------------------------------------------------------------
# commands


def cmd_synth(args):
    _print_config(
        "synth",
        dict(
            manifest=args.manifest,
            water_type=args.water_type,
            variants=args.variants,
            resize=args.resize,
            out=args.out,
            seed=args.seed,
            threads=args.threads,
        ),
    )
    wtype = watersim.water_type(args.water_type)
    manifest = imageio.read_manifest(args.manifest)
    resize = _parse_resize(args.resize)
    if args.variants < 0:
        raise ConfigError(f"--variants must be >= 0, got {args.variants}")
    out = watersim.build_dataset(
        manifest,
        wtype,
        args.out,
        variants_per_image=args.variants,
        seed=args.seed,
        resize=resize,
        threads=args.threads,
    )
    print(f"synthesized {len(out.entries)} pairs into {args.out}")
    return EXIT_OK


def cmd_train(args):
    _print_config(
        "train",
        dict(
            train_manifest=args.train_manifest,
            val_manifest=args.val_manifest,
            epochs=args.epochs,
            batch=args.batch,
            crop=args.crop,
            out_checkpoint=args.out_checkpoint,
            metrics=args.metrics,
            no_residual=args.no_residual,
            no_dense=args.no_dense,
            no_ssim_loss=args.no_ssim_loss,
            water_type=args.water_type,
            seed=args.seed,
            threads=args.threads,
        ),
    )
    manifest = imageio.read_manifest(args.train_manifest)
    config = model_mod.ModelConfig(
        residual_learning=not args.no_residual,
        dense_concat=not args.no_dense,
        seed=args.seed,
    )
    crop = None if args.crop == "none" else int(args.crop)
    net, rows, shuffle_lines = train_model(
        manifest,
        epochs=args.epochs,
        batch_size=args.batch,
        crop=crop,
        use_ssim=not args.no_ssim_loss,
        config=config,
        seed=args.seed,
        log=print,
    )
    checkpoint = Path(args.out_checkpoint)
    metrics_path = Path(args.metrics) if args.metrics else checkpoint.with_suffix(".metrics.tsv")
    model_mod.save(net, checkpoint, water_type_tag=args.water_type or "")
    _write_metrics(rows, metrics_path)
    _write_shuffle_log(shuffle_lines, checkpoint.with_suffix(".shuffle.log"))
    if args.val_manifest:
        val = imageio.read_manifest(args.val_manifest)
        (e_mse, e_psnr, e_ssim), (r_mse, r_psnr, r_ssim) = _score_pairs(net, val)
        print(f"validation enhanced: mse={e_mse:.4f} psnr={e_psnr:.4f} ssim={e_ssim:.4f}")
        print(f"validation raw:      mse={r_mse:.4f} psnr={r_psnr:.4f} ssim={r_ssim:.4f}")
    print(f"wrote checkpoint {checkpoint} and metrics {metrics_path}")
    return EXIT_OK


def _enhance_paths(input_path):
    path = Path(input_path)
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.suffix.lower() in (".png", ".ppm"))
        if not files:
            raise DataIOError(f"no .png/.ppm inputs in {path}")
        return files, True
    if not path.exists():
        raise DataIOError(f"input {path} does not exist")
    return [path], False


def cmd_enhance(args):
    _print_config(
        "enhance",
        dict(
            checkpoint=args.checkpoint,
            input=args.input,
            out=args.out,
            post=args.post,
            threads=args.threads,
        ),
    )
    net, tag = imageio.read_checkpoint(args.checkpoint)
    if tag:
        print(f"checkpoint water type: {tag}")
    files, is_dir = _enhance_paths(args.input)
    out = Path(args.out)

    def process(src):
        enhanced = enhance_tensor(net, imageio.read_image(src), post=args.post)
        target = out / src.name if is_dir else out
        imageio.write_image(enhanced, target)
        return target

    if is_dir:
        imageio.ensure_dir(out)
    if args.threads > 1 and len(files) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=args.threads) as pool:
            targets = list(pool.map(process, files))
    else:
        targets = [process(f) for f in files]
    print(f"enhanced {len(targets)} image(s)")
    return EXIT_OK


def cmd_eval(args):
    _print_config(
        "eval",
        dict(manifest=args.manifest, enhanced_dir=args.enhanced_dir, report=args.report),
    )
    manifest = imageio.read_manifest(args.manifest)
    report = quality.evaluate_pairs(manifest, args.enhanced_dir)
    text = quality.format_report(report)
    report_path = (
        Path(args.report) if args.report else Path(args.enhanced_dir) / "report.tsv"
    )
    imageio._atomic_write_bytes(report_path, text.encode("utf-8"))
    print(text.splitlines()[-1])
    print(f"wrote report {report_path}")
    return EXIT_OK


def cmd_gradcheck(args):
    _print_config("gradcheck", dict(size=args.size, seed=args.seed))
    results, worst = run_gradient_checks(size=args.size, seed=args.seed)
    for name, err in results:
        status = "ok" if err < GRADCHECK_TOLERANCE else "FAIL"
        print(f"{status}\t{name}\t{err:.3e}")
    if worst[1] >= GRADCHECK_TOLERANCE:
        print(f"gradient check FAILED: {worst[0]} error {worst[1]:.3e}", file=sys.stderr)
        return EXIT_GRADCHECK
    print(f"gradient checks passed (worst {worst[1]:.3e} at {worst[0]})")
    return EXIT_OK


def run_ablation(train_manifest, val_manifest, out_dir, epochs, batch=16, seed=0, crop=None):
    """Train all four variants with identical data order and score them.

    Returns {variant: (mse, psnr, ssim)} on the validation pairs and writes
    per-variant checkpoints, metrics, shuffle logs and ablation.tsv.
    """
    out_dir = imageio.ensure_dir(out_dir)
    scores = {}
    timings = {}
    for name in ABLATION_VARIANTS:
        config = model_mod.ModelConfig(
            residual_learning=(name != "woRL"),
            dense_concat=(name != "woDC"),
            seed=seed,
        )
        started = time.perf_counter()
        net, rows, shuffle_lines = train_model(
            train_manifest,
            epochs=epochs,
            batch_size=batch,
            crop=crop,
            use_ssim=(name != "woSSIM"),
            config=config,
            seed=seed,
        )
        timings[name] = time.perf_counter() - started
        model_mod.save(net, out_dir / f"{name}.ckpt", water_type_tag="")
        _write_metrics(rows, out_dir / f"{name}.metrics.tsv")
        _write_shuffle_log(shuffle_lines, out_dir / f"{name}.shuffle.log")
        enhanced, _ = _score_pairs(net, val_manifest)
        scores[name] = enhanced
    lines = ["variant\tmse\tpsnr\tssim"]
    for name in ABLATION_VARIANTS:
        mse, psnr, ssim = scores[name]
        lines.append(f"{name}\t{mse:.6f}\t{psnr:.6f}\t{ssim:.6f}")
    imageio._atomic_write_bytes(out_dir / "ablation.tsv", ("\n".join(lines) + "\n").encode("utf-8"))
    timing_lines = [f"{name}\t{timings[name]:.3f}" for name in ABLATION_VARIANTS]
    imageio._atomic_write_bytes(
        out_dir / "timings.tsv", ("\n".join(timing_lines) + "\n").encode("utf-8")
    )
    return scores


def cmd_ablate(args):
    _print_config(
        "ablate",
        dict(
            train_manifest=args.train_manifest,
            val_manifest=args.val_manifest,
            epochs=args.epochs,
            batch=args.batch,
            out_dir=args.out_dir,
            seed=args.seed,
        ),
    )
    train = imageio.read_manifest(args.train_manifest)
    val = imageio.read_manifest(args.val_manifest)
    crop = None if args.crop == "none" else int(args.crop)
    scores = run_ablation(
        train, val, args.out_dir, epochs=args.epochs, batch=args.batch, seed=args.seed, crop=crop
    )
    for name in ABLATION_VARIANTS:
        mse, psnr, ssim = scores[name]
        print(f"{name}\tmse={mse:.4f}\tpsnr={psnr:.4f}\tssim={ssim:.4f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="uwnet",
        description="Synthesize underwater image datasets, train the enhancement "
        "network, enhance and evaluate images.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a degraded/ground-truth dataset")
    p.add_argument("--manifest", required=True)
    p.add_argument("--water-type", required=True)
    p.add_argument("--variants", type=int, default=5)
    p.add_argument("--resize", default="none", help="WIDTHxHEIGHT or none")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train the enhancement network")
    p.add_argument("--train-manifest", required=True)
    p.add_argument("--val-manifest", default=None)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--batch", type=int, default=16)
    p.add_argument("--crop", default="none", help="random square crop size or none")
    p.add_argument("--out-checkpoint", required=True)
    p.add_argument("--metrics", default=None)
    p.add_argument("--water-type", default=None, help="tag stored in the checkpoint")
    p.add_argument("--no-residual", action="store_true")
    p.add_argument("--no-dense", action="store_true")
    p.add_argument("--no-ssim-loss", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("enhance", help="enhance a file or directory of images")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--post", action="store_true", help="apply HSI range post-processing")
    _add_common(p)
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("eval", help="score enhanced images against ground truth")
    p.add_argument("--manifest", required=True)
    p.add_argument("--enhanced-dir", required=True)
    p.add_argument("--report", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gradcheck", help="finite-difference gradient verification")
    p.add_argument("--size", type=int, default=8)
    _add_common(p)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("ablate", help="train and compare all four network variants")
    p.add_argument("--train-manifest", required=True)
    p.add_argument("--val-manifest", required=True)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--batch", type=int, default=16)
    p.add_argument("--crop", default="none")
    p.add_argument("--out-dir", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_ablate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataIOError, FormatError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericError as exc:
        print("numeric divergence diagnostic:", file=sys.stderr)
        print(f"  {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DimensionError, UwnetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
