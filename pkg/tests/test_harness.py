import numpy as np
import pytest

from phypred.cli import main as cli_main
from phypred.config import (
    DataSettings,
    OptimSettings,
    RunConfig,
    build_run_config,
    dump_run_config,
    parse_config_text,
)
from phypred.data import gen_bouncing_blobs
from phypred.errors import ConfigError
from phypred.evaluate import (
    evaluate_model,
    evaluate_persistence,
    format_table,
    kv_lines,
    rollout_predictions,
)
from phypred.losses import LossWeights
from phypred.model import ModelConfig, PredictionModel
from phypred.train import (
    load_checkpoint,
    load_model,
    save_checkpoint,
    train_loop,
)


def tiny_cfg(out_dir, **optim_kw):
    model = ModelConfig(frame_channels=1, frame_h=16, frame_w=16,
                        patch_size=4, embed_dim=8, n_transformer_blocks=1,
                        n_fourier_blocks=1, window_size=2)
    data = DataSettings(generator="blobs", n_train=8, n_eval=4, t_in=3,
                        t_out=3, h=16, w=16, seed=50)
    kw = dict(lr=2e-3, steps=6, batch_size=2)
    kw.update(optim_kw)
    optim = OptimSettings(**kw)
    return RunConfig(model=model, optim=optim, data=data, loss=LossWeights(),
                     seed=5, out_dir=str(out_dir))


class TestConfig:
    def test_parse_lines_with_comments(self):
        flat = parse_config_text(
            "# a comment\nmodel.patch_size = 8\n\noptim.lr = 0.01  # inline\n")
        assert flat == {"model.patch_size": "8", "optim.lr": "0.01"}

    def test_defaults_plus_overrides(self):
        cfg = build_run_config(None, ["model.embed_dim=16", "seed=9",
                                      "optim.moment_only=true"])
        assert cfg.model.embed_dim == 16
        assert cfg.seed == 9
        assert cfg.optim.moment_only is True

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            build_run_config(None, ["model.hidden_layers=3"])
        with pytest.raises(ConfigError):
            build_run_config(None, ["mystery=1"])

    def test_bad_value_rejected(self):
        with pytest.raises(ConfigError):
            build_run_config(None, ["optim.lr=fast"])

    def test_dump_round_trips(self, tmp_path):
        cfg = build_run_config(None, ["model.patch_size=2", "data.h=32",
                                      "data.w=32", "data.generator=advection",
                                      "loss.lambda_h1=0.07"])
        path = tmp_path / "run.cfg"
        path.write_text(dump_run_config(cfg))
        again = build_run_config(path, [])
        assert again == cfg


class TestTrainLoop:
    def test_zero_learning_rate_leaves_parameters_bit_unchanged(self, tmp_path):
        cfg = tiny_cfg(tmp_path, lr=0.0, steps=4)
        before = PredictionModel(cfg.model, seed=cfg.seed).state_dict()
        result = train_loop(cfg, write_outputs=False)
        after = result.model.state_dict()
        for name in before:
            assert np.array_equal(before[name], after[name]), name

    def test_same_seed_reproduces_log_bitwise(self, tmp_path):
        cfg = tiny_cfg(tmp_path)
        a = train_loop(cfg, write_outputs=False)
        b = train_loop(cfg, write_outputs=False)
        assert a.log_lines == b.log_lines

    def test_log_format(self, tmp_path):
        cfg = tiny_cfg(tmp_path, steps=2)
        result = train_loop(cfg, write_outputs=False)
        for i, line in enumerate(result.log_lines):
            keys = [item.split("=")[0] for item in line.split()]
            assert keys == ["step", "total", "mse", "h1", "moment",
                            "grad_norm"]
            assert line.startswith(f"step={i} ")

    def test_moment_only_mode_is_data_free_and_converges(self, tmp_path):
        cfg = tiny_cfg(tmp_path, moment_only=True, lr=1e-2, steps=2000,
                       clip_norm=1e6)
        cfg.data.generator = "none"
        result = train_loop(cfg, write_outputs=False)
        assert result.losses[-1] < 1e-6

    def test_training_reduces_loss(self, tmp_path):
        cfg = tiny_cfg(tmp_path, steps=30)
        result = train_loop(cfg, write_outputs=False)
        assert result.losses[-1] < result.losses[0]


class TestCheckpoints:
    def test_round_trip_preserves_evaluation_exactly(self, tmp_path):
        cfg = tiny_cfg(tmp_path, steps=3)
        result = train_loop(cfg)
        evalb = gen_bouncing_blobs(3, 3, 3, 16, 16, seed=77)
        before = rollout_predictions(result.model, evalb)
        reloaded = load_model(cfg.model, result.checkpoint_path)
        after = rollout_predictions(reloaded, evalb)
        assert np.array_equal(before, after)

    def test_manifest_contents(self, tmp_path):
        model = PredictionModel(tiny_cfg(tmp_path).model, seed=0)
        path = tmp_path / "m.ckpt"
        save_checkpoint(path, model.state_dict())
        arrays = load_checkpoint(path)
        assert set(arrays) == set(model.named_parameters())
        for name, p in model.named_parameters().items():
            assert np.array_equal(arrays[name], p.data)

    def test_shape_mismatch_names_the_tensor(self, tmp_path):
        from phypred.errors import CheckpointError

        cfg = tiny_cfg(tmp_path)
        model = PredictionModel(cfg.model, seed=0)
        path = tmp_path / "m.ckpt"
        save_checkpoint(path, model.state_dict())
        other = ModelConfig(frame_channels=1, frame_h=16, frame_w=16,
                            patch_size=4, embed_dim=12,
                            n_transformer_blocks=1, n_fourier_blocks=1,
                            window_size=2)
        with pytest.raises(CheckpointError) as err:
            load_model(other, path)
        assert "patch.weight" in str(err.value)


class TestEvaluate:
    def test_model_vs_its_own_outputs_scores_perfectly(self, tmp_path):
        cfg = tiny_cfg(tmp_path, steps=2)
        result = train_loop(cfg, write_outputs=False)
        evalb = gen_bouncing_blobs(2, 3, 3, 16, 16, seed=31)
        preds = rollout_predictions(result.model, evalb)
        from phypred.data import SequenceBatch

        self_batch = SequenceBatch(evalb.inputs, preds, {})
        report = evaluate_model(result.model, self_batch,
                                metrics=("mse", "ssim"))
        assert report.aggregate["mse"] < 1e-28
        assert abs(report.aggregate["ssim"] - 1.0) < 1e-12

    def test_persistence_on_static_scene_is_perfect(self):
        frame = np.random.default_rng(0).random((2, 1, 16, 16))
        inputs = np.repeat(frame[:, None], 3, axis=1)
        targets = np.repeat(frame[:, None], 3, axis=1)
        from phypred.data import SequenceBatch

        batch = SequenceBatch(inputs, targets, {})
        report = evaluate_persistence(batch, metrics=("mse", "mae"))
        assert report.aggregate["mse"] == 0.0
        assert report.aggregate["mae"] == 0.0

    def test_aggregate_is_mean_of_leads(self, tmp_path):
        cfg = tiny_cfg(tmp_path, steps=2)
        result = train_loop(cfg, write_outputs=False)
        evalb = gen_bouncing_blobs(3, 3, 3, 16, 16, seed=41)
        report = evaluate_model(result.model, evalb, metrics=("mse",))
        assert abs(report.aggregate["mse"] -
                   report.per_lead["mse"].mean()) < 1e-12

    def test_report_rendering(self, tmp_path):
        cfg = tiny_cfg(tmp_path, steps=2)
        result = train_loop(cfg, write_outputs=False)
        evalb = gen_bouncing_blobs(2, 3, 3, 16, 16, seed=43)
        reports = [evaluate_model(result.model, evalb),
                   evaluate_persistence(evalb)]
        table = format_table(reports)
        assert "[model]" in table and "[persistence]" in table
        lines = kv_lines(reports).splitlines()
        assert any(line.startswith("label=model lead=1 ") for line in lines)
        assert any("lead=all" in line for line in lines)


class TestCLI:
    def test_gen_train_eval_pipeline(self, tmp_path, capsys):
        out = tmp_path / "run"
        common = ["--set", "model.frame_h=16", "--set", "model.frame_w=16",
                  "--set", "model.patch_size=4", "--set", "model.embed_dim=8",
                  "--set", "model.n_transformer_blocks=1",
                  "--set", "model.window_size=2",
                  "--set", "model.n_fourier_blocks=1",
                  "--set", "data.h=16", "--set", "data.w=16",
                  "--set", "data.n_train=6", "--set", "data.n_eval=3",
                  "--set", "data.t_in=3", "--set", "data.t_out=3",
                  "--set", f"out_dir={out}"]
        assert cli_main(["gen-data"] + common) == 0
        assert (out / "data" / "train_inputs.stpt").exists()
        assert cli_main(["train", "--data-dir", str(out / "data"),
                         "--set", "optim.steps=3"] + common) == 0
        assert (out / "model.ckpt").exists()
        assert (out / "metrics.log").exists()
        assert cli_main(["eval", "--data-dir", str(out / "data"),
                         "--persistence"] + common) == 0
        captured = capsys.readouterr().out
        assert "persistence" in captured and "lead=all" in captured

    def test_unknown_flag_fails_with_nonzero_exit(self):
        assert cli_main(["train", "--wat"]) != 0

    def test_config_error_exits_with_code_two(self, tmp_path):
        assert cli_main(["train", "--set", "bogus.key=1",
                         "--set", f"out_dir={tmp_path}"]) == 2
