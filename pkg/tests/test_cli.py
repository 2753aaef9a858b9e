import numpy as np
import pytest

from uwnet import cli, fixtures, imageio, model, watersim


def run(args):
    return cli.main([str(a) for a in args])


class TestSynthCommand:
    def test_produces_expected_pair_count(self, small_dataset, tmp_path, capsys):
        out = tmp_path / "ds"
        code = run(["synth", "--manifest", small_dataset, "--water-type", "1",
                    "--variants", 5, "--out", out, "--seed", 3])
        assert code == 0
        degraded = sorted((out / "degraded").iterdir())
        assert len(degraded) == 10
        assert "run-config" in capsys.readouterr().out

    def test_unknown_water_type_exits_2_and_lists_names(self, small_dataset, tmp_path, capsys):
        code = run(["synth", "--manifest", small_dataset, "--water-type", "X",
                    "--out", tmp_path / "ds"])
        assert code == 2
        err = capsys.readouterr().err
        for name in watersim.WATER_TYPES:
            assert name in err

    def test_reruns_are_byte_identical(self, small_dataset, tmp_path):
        for d in ("r1", "r2"):
            assert run(["synth", "--manifest", small_dataset, "--water-type", "3",
                        "--variants", 2, "--out", tmp_path / d, "--seed", 17]) == 0
        m1 = (tmp_path / "r1" / "manifest.tsv").read_bytes()
        m2 = (tmp_path / "r2" / "manifest.tsv").read_bytes()
        assert m1 == m2
        for entry in imageio.read_manifest(tmp_path / "r1" / "manifest.tsv").entries:
            assert (tmp_path / "r1" / entry.path_a).read_bytes() == (
                tmp_path / "r2" / entry.path_a
            ).read_bytes()

    def test_resize_flag(self, small_dataset, tmp_path):
        out = tmp_path / "rs"
        assert run(["synth", "--manifest", small_dataset, "--water-type", "1",
                    "--variants", 1, "--resize", "18x12", "--out", out]) == 0
        entry = imageio.read_manifest(out / "manifest.tsv").entries[0]
        img = imageio.read_image(out / entry.path_a)
        assert img.shape == (12, 18, 3)

    def test_bad_resize_exits_2(self, small_dataset, tmp_path):
        assert run(["synth", "--manifest", small_dataset, "--water-type", "1",
                    "--resize", "banana", "--out", tmp_path / "x"]) == 2

    def test_missing_manifest_exits_3(self, tmp_path):
        assert run(["synth", "--manifest", tmp_path / "none.tsv", "--water-type", "1",
                    "--out", tmp_path / "x"]) == 3


@pytest.fixture
def trained(synthesized_dataset, tmp_path):
    """A quick 2-epoch training run on the tiny synthesized dataset."""
    ckpt = tmp_path / "run" / "net.ckpt"
    code = run(["train", "--train-manifest", synthesized_dataset.base_dir / "manifest.tsv",
                "--epochs", 2, "--batch", 3, "--out-checkpoint", ckpt, "--seed", 5,
                "--water-type", "1"])
    assert code == 0
    return ckpt


class TestTrainCommand:
    def test_metrics_file_has_one_row_per_epoch(self, trained):
        metrics = trained.with_suffix(".metrics.tsv")
        rows = metrics.read_text().strip().splitlines()
        assert len(rows) == 2
        for epoch, row in enumerate(rows):
            fields = row.split("\t")
            assert int(fields[0]) == epoch
            assert len(fields) == 4

    def test_checkpoint_carries_water_type(self, trained):
        _, tag = imageio.read_checkpoint(trained)
        assert tag == "1"

    def test_no_ssim_loss_makes_total_equal_mse(self, synthesized_dataset, tmp_path):
        ckpt = tmp_path / "nossim" / "net.ckpt"
        assert run(["train", "--train-manifest", synthesized_dataset.base_dir / "manifest.tsv",
                    "--epochs", 2, "--batch", 3, "--out-checkpoint", ckpt,
                    "--no-ssim-loss", "--seed", 5]) == 0
        for row in ckpt.with_suffix(".metrics.tsv").read_text().strip().splitlines():
            _, total, mse, ssim = row.split("\t")
            assert total == mse
            assert float(ssim) == 0.0

    def test_metrics_and_shuffle_are_deterministic(self, synthesized_dataset, tmp_path):
        outputs = []
        for d in ("d1", "d2"):
            ckpt = tmp_path / d / "net.ckpt"
            assert run(["train", "--train-manifest",
                        synthesized_dataset.base_dir / "manifest.tsv",
                        "--epochs", 2, "--batch", 3, "--out-checkpoint", ckpt,
                        "--seed", 5]) == 0
            outputs.append(
                (
                    ckpt.with_suffix(".metrics.tsv").read_bytes(),
                    ckpt.with_suffix(".shuffle.log").read_bytes(),
                    ckpt.read_bytes(),
                )
            )
        assert outputs[0] == outputs[1]

    def test_variant_flags_reach_the_checkpoint(self, synthesized_dataset, tmp_path):
        ckpt = tmp_path / "v" / "net.ckpt"
        assert run(["train", "--train-manifest", synthesized_dataset.base_dir / "manifest.tsv",
                    "--epochs", 1, "--batch", 3, "--out-checkpoint", ckpt,
                    "--no-residual", "--no-dense", "--seed", 5]) == 0
        restored, _ = imageio.read_checkpoint(ckpt)
        assert restored.config.residual_learning is False
        assert restored.config.dense_concat is False

    def test_crop_below_ssim_window_exits_2(self, synthesized_dataset, tmp_path):
        assert run(["train", "--train-manifest", synthesized_dataset.base_dir / "manifest.tsv",
                    "--epochs", 1, "--crop", 8,
                    "--out-checkpoint", tmp_path / "c.ckpt", "--seed", 1]) == 2

    def test_crop_with_mse_only_trains(self, synthesized_dataset, tmp_path):
        ckpt = tmp_path / "crop" / "net.ckpt"
        assert run(["train", "--train-manifest", synthesized_dataset.base_dir / "manifest.tsv",
                    "--epochs", 1, "--batch", 3, "--crop", 8, "--no-ssim-loss",
                    "--out-checkpoint", ckpt, "--seed", 1]) == 0

    def test_divergent_loss_exits_4_with_diagnostic(
        self, synthesized_dataset, tmp_path, monkeypatch, capsys
    ):
        from uwnet import loss

        def blow_up(prediction, target):
            return np.nan, np.zeros_like(prediction)

        monkeypatch.setattr(loss, "mse_loss", blow_up)
        code = run(["train", "--train-manifest", synthesized_dataset.base_dir / "manifest.tsv",
                    "--epochs", 1, "--batch", 3, "--no-ssim-loss",
                    "--out-checkpoint", tmp_path / "nan.ckpt", "--seed", 1])
        assert code == 4
        err = capsys.readouterr().err
        assert "diagnostic" in err and "epoch 0" in err


def zero_checkpoint(tmp_path, **config_kw):
    net = model.build(model.ModelConfig(seed=0, **config_kw))
    for p in net.layers:
        p.kernel[:] = 0.0
        p.bias[:] = 0.0
    path = tmp_path / "zero.ckpt"
    model.save(net, path)
    return path


class TestEnhanceCommand:
    def test_zero_weight_checkpoint_reproduces_input(self, rng, tmp_path):
        src = tmp_path / "in.png"
        imageio.write_image(rng.uniform(size=(20, 20, 3)), src)
        ckpt = zero_checkpoint(tmp_path)
        out = tmp_path / "out.png"
        assert run(["enhance", "--checkpoint", ckpt, "--input", src, "--out", out]) == 0
        assert out.read_bytes() == src.read_bytes()

    def test_directory_input_preserves_names(self, rng, tmp_path):
        src_dir = tmp_path / "inputs"
        for name in ("one.png", "two.png"):
            imageio.write_image(rng.uniform(size=(16, 16, 3)), src_dir / name)
        ckpt = zero_checkpoint(tmp_path)
        out_dir = tmp_path / "outputs"
        assert run(["enhance", "--checkpoint", ckpt, "--input", src_dir, "--out", out_dir]) == 0
        assert sorted(p.name for p in out_dir.iterdir()) == ["one.png", "two.png"]

    def test_post_flag_stretches_low_contrast_input(self, tmp_path):
        src = tmp_path / "flat.png"
        imageio.write_image(fixtures.make_low_contrast_image((64, 64)), src)
        ckpt = zero_checkpoint(tmp_path)
        out = tmp_path / "post.png"
        assert run(["enhance", "--checkpoint", ckpt, "--input", src, "--out", out, "--post"]) == 0
        from uwnet import color

        intensity = color.rgb_to_hsi(imageio.read_image(out)).intensity
        assert intensity.max() - intensity.min() >= 0.95

    def test_missing_checkpoint_exits_3(self, rng, tmp_path):
        src = tmp_path / "in.png"
        imageio.write_image(rng.uniform(size=(8, 8, 3)), src)
        assert run(["enhance", "--checkpoint", tmp_path / "no.ckpt", "--input", src,
                    "--out", tmp_path / "o.png"]) == 3

    def test_threaded_run_matches_serial(self, rng, tmp_path):
        src_dir = tmp_path / "inputs"
        for i in range(4):
            imageio.write_image(rng.uniform(size=(16, 16, 3)), src_dir / f"{i}.png")
        ckpt = zero_checkpoint(tmp_path)
        for out_name, threads in (("serial", 1), ("threaded", 3)):
            assert run(["enhance", "--checkpoint", ckpt, "--input", src_dir,
                        "--out", tmp_path / out_name, "--threads", threads]) == 0
        for i in range(4):
            assert (tmp_path / "serial" / f"{i}.png").read_bytes() == (
                tmp_path / "threaded" / f"{i}.png"
            ).read_bytes()


class TestEvalCommand:
    def test_perfect_enhancement_reports_zero_mse(self, synthesized_dataset, tmp_path, capsys):
        enhanced = tmp_path / "enh"
        enhanced.mkdir()
        for entry in synthesized_dataset.entries:
            truth = imageio.read_image(synthesized_dataset.resolve(entry.path_b))
            imageio.write_image(truth, enhanced / entry.path_a.split("/")[-1])
        code = run(["eval", "--manifest", synthesized_dataset.base_dir / "manifest.tsv",
                    "--enhanced-dir", enhanced])
        assert code == 0
        out = capsys.readouterr().out
        assert "MEAN\t0.000000\tinf\t1.000000" in out
        report = (enhanced / "report.tsv").read_text().strip().splitlines()
        assert len(report) == len(synthesized_dataset.entries) + 1

    def test_raw_degradation_ranks_water_types(self, small_dataset, tmp_path):
        """Raw-vs-truth error grows with turbidity: type 9 beats type 1."""
        scores = {}
        for wt in ("1", "9"):
            out = tmp_path / f"ds{wt}"
            assert run(["synth", "--manifest", small_dataset, "--water-type", wt,
                        "--variants", 2, "--out", out, "--seed", 3]) == 0
            manifest = imageio.read_manifest(out / "manifest.tsv")
            from uwnet import quality

            report = quality.evaluate_pairs(manifest, out / "degraded")
            scores[wt] = report.mse
        assert scores["9"] > scores["1"]

    def test_missing_enhanced_files_exit_3(self, synthesized_dataset, tmp_path):
        empty = tmp_path / "none"
        empty.mkdir()
        assert run(["eval", "--manifest", synthesized_dataset.base_dir / "manifest.tsv",
                    "--enhanced-dir", empty]) == 3


class TestGradcheckCommand:
    def test_default_run_passes(self, capsys):
        assert run(["gradcheck", "--size", 6, "--seed", 1]) == 0
        assert "gradient checks passed" in capsys.readouterr().out

    def test_corrupted_backward_is_caught(self):
        results, worst = cli.run_gradient_checks(size=6, seed=1, corrupt=True)
        assert worst[1] >= cli.GRADCHECK_TOLERANCE

    def test_all_variants_covered(self, capsys):
        assert run(["gradcheck", "--size", 6, "--seed", 1]) == 0
        out = capsys.readouterr().out
        for name in ("model/full", "model/woRL", "model/woDC", "model/woSSIM"):
            assert name in out


class TestAblateCommand:
    def test_tiny_ablation_table_and_logs(self, synthesized_dataset, tmp_path):
        out_dir = tmp_path / "ablate"
        manifest = synthesized_dataset.base_dir / "manifest.tsv"
        assert run(["ablate", "--train-manifest", manifest, "--val-manifest", manifest,
                    "--epochs", 1, "--batch", 3, "--out-dir", out_dir, "--seed", 2]) == 0
        table = (out_dir / "ablation.tsv").read_text().strip().splitlines()
        assert table[0] == "variant\tmse\tpsnr\tssim"
        assert [row.split("\t")[0] for row in table[1:]] == list(cli.ABLATION_VARIANTS)
        logs = {(out_dir / f"{v}.shuffle.log").read_bytes() for v in cli.ABLATION_VARIANTS}
        assert len(logs) == 1  # identical sample order across all four runs
