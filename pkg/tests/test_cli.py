import json

import numpy as np
import pytest

from cmapsmith import cli


def run(argv):
    return cli.main(argv)


class TestQuantize:
    def test_writes_512_states(self, tmp_path):
        out = tmp_path / "space.json"
        assert run(["quantize", "--seed-rng", "0", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert len(doc["states"]) == 512

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(["quantize", "--seed-rng", "3", "--out", str(a)])
        run(["quantize", "--seed-rng", "3", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_unwritable_out_fails(self, tmp_path, capsys):
        code = run(["quantize", "--seed-rng", "0", "--out", "/nonexistent-dir/x.json"])
        assert code == cli.EXIT_IO
        assert capsys.readouterr().err


class TestTrain:
    def test_zero_rounds_writes_prior(self, tmp_path):
        out = tmp_path / "m.json"
        code = run(
            ["train", "--seed-color", "#186E8D", "--oracle", "random",
             "--n", "0", "--rng", "1", "--out", str(out)]
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert len(doc["samples"]) == 100
        assert doc["history"] == []

    def test_bad_theta_dimension(self, tmp_path, capsys):
        theta = tmp_path / "theta.json"
        theta.write_text(json.dumps([0.1] * 8))
        code = run(
            ["train", "--seed-color", "#186E8D", "--oracle", str(theta),
             "--n", "1", "--out", str(tmp_path / "m.json")]
        )
        assert code == cli.EXIT_VALIDATION
        assert "9" in capsys.readouterr().err

    def test_deterministic_given_rng(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        argv = ["train", "--seed-color", "#59A14F", "--oracle", "random",
                "--n", "2", "--rng", "11", "--noiseless"]
        run(argv + ["--out", str(a)])
        run(argv + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


@pytest.fixture(scope="module")
def trained_model(tmp_path_factory):
    out = tmp_path_factory.mktemp("model") / "model.json"
    theta_file = out.parent / "theta.json"
    theta = np.zeros(9)
    theta[8] = -1.0
    theta_file.write_text(json.dumps(list(theta)))
    run(
        ["train", "--seed-color", "#186E8D", "--oracle", str(theta_file),
         "--n", "3", "--rng", "7", "--noiseless", "--out", str(out)]
    )
    return out


class TestRank:
    def test_matches_brute_force(self, trained_model, capsys):
        code = run(
            ["--json", "rank", "--model", str(trained_model),
             "--seed-color", "#186E8D", "--top", "10"]
        )
        assert code == 0
        got = json.loads(capsys.readouterr().out)

        from cmapsmith.corpus import load_starter_corpus
        from cmapsmith.environment import build_graph, get_state_space
        from cmapsmith.colorspace import hex_to_lab
        from cmapsmith.reward import RewardContext

        doc = json.loads(trained_model.read_text())
        mean = np.asarray(doc["samples"], float).mean(axis=0)
        space = get_state_space(0)
        graph, cands = build_graph(load_starter_corpus(), hex_to_lab("#186E8D"), space)
        ctx = RewardContext.for_candidates(cands)
        brute = sorted(
            ((float(mean @ ctx.features(t)), t.id) for t in cands),
            key=lambda x: (-x[0], x[1]),
        )[:10]
        assert [e["id"] for e in got] == [tid for _, tid in brute]


class TestSearch:
    def test_deterministic_output_file(self, trained_model, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        argv = ["search", "--model", str(trained_model), "--seed-color", "#186E8D",
                "--episodes", "2000", "--rng", "3"]
        assert run(argv + ["--out", str(a)]) == 0
        assert run(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_output_is_valid_profile(self, trained_model, tmp_path, capsys):
        out = tmp_path / "c.json"
        run(["search", "--model", str(trained_model), "--seed-color", "#186E8D",
             "--episodes", "2000", "--rng", "3", "--out", str(out)])
        assert run(["profile", "--cmap", str(out)]) == 0


class TestBenchmark:
    def test_empty_models_dir_errors(self, tmp_path, capsys):
        code = run(
            ["benchmark", "--models", str(tmp_path), "--reps", "1",
             "--out", str(tmp_path / "t.csv")]
        )
        assert code == cli.EXIT_VALIDATION

    def test_table_and_trace_rows(self, trained_model, tmp_path):
        models = tmp_path / "models"
        models.mkdir()
        (models / "m1.json").write_text(trained_model.read_text())
        out = tmp_path / "table.csv"
        code = run(
            ["benchmark", "--models", str(models), "--reps", "1",
             "--episodes", "300", "--rng", "5", "--out", str(out)]
        )
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "variant,theta_id,rep,best_reward"
        assert len(lines) == 1 + 3  # three variants x one rep
        trace_dir = out.parent / (out.name + "_traces")
        traces = sorted(trace_dir.glob("*.csv"))
        assert len(traces) == 3
        for tf in traces:
            assert len(tf.read_text().strip().splitlines()) == 300


class TestProfile:
    def test_corrupted_lightness_detected(self, trained_model, tmp_path, capsys):
        out = tmp_path / "c.json"
        run(["search", "--model", str(trained_model), "--seed-color", "#186E8D",
             "--episodes", "1500", "--rng", "3", "--out", str(out)])
        doc = json.loads(out.read_text())
        doc["lab"][40][0] = doc["lab"][39][0] + 5.0
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        code = run(["profile", "--cmap", str(bad)])
        assert code == cli.EXIT_INVARIANT
        # The inversion sits between samples 39 and 40; the report names it.
        assert "39" in capsys.readouterr().err

    def test_uniform_synthetic_ramp_flatness_one(self, tmp_path, capsys):
        # A ramp with mathematically equal gaps: flatness exactly 1.
        labs = [[90 - i * 0.3, 0.0, 0.0] for i in range(256)]
        from cmapsmith.colorspace import delta_e_2000
        import numpy as np

        arr = np.asarray(labs)
        gaps = delta_e_2000(arr[:-1], arr[1:])
        # Neutral-line equal-L steps are not equal dE gaps; rescale L targets
        # by inverting the cumulative arc instead.
        s = np.concatenate([[0], np.cumsum(gaps)])
        targets = np.linspace(0, s[-1], 256)
        L = np.interp(targets, s, arr[:, 0])
        doc = {"lab": [[float(v), 0.0, 0.0] for v in L]}
        p = tmp_path / "ramp.json"
        p.write_text(json.dumps(doc))
        code = run(["--json", "profile", "--cmap", str(p)])
        assert code == 0
        stats = json.loads(capsys.readouterr().out)
        assert stats["flatness"] > 0.9999
