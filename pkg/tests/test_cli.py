import json
import random

from lscert.bundled import certificate_path
from lscert.cli import EXIT_FALSE, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestVerify:
    def test_bundled_t3_passes(self, capsys):
        code, out, _ = run(capsys, "verify", str(certificate_path("t3")))
        assert code == EXIT_OK
        assert "epsilon-straightforward with eps=0" in out

    def test_corrupted_entry_fails_named_condition(self, capsys, tmp_path):
        obj = json.loads(certificate_path("t3").read_text())
        obj["lambda"][1][2] = "-" + obj["lambda"][1][2]
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(obj))
        code, out, _ = run(capsys, "verify", str(bad))
        assert code == EXIT_FALSE
        assert "lambda_nonneg" in out

    def test_recompute_eps(self, capsys):
        code, out, _ = run(capsys, "verify", str(certificate_path("t7")),
                           "--recompute-eps")
        assert code == EXIT_OK
        assert "eps_min" in out

    def test_pointwise_flag(self, capsys):
        code, out, _ = run(capsys, "verify", str(certificate_path("t3")),
                           "--pointwise", "8", "--json")
        assert code == EXIT_OK
        obj = json.loads(out)
        assert obj["certificates"][0]["pointwise_checks"] == 9
        assert obj["certificates"][0]["pointwise_ok"]

    def test_malformed_file_exits_2(self, capsys, tmp_path):
        bad = tmp_path / "junk.json"
        bad.write_text("{weird")
        code, _, err = run(capsys, "verify", str(bad))
        assert code == EXIT_USAGE
        assert "junk.json" in err

    def test_batch_jobs(self, capsys):
        code, out, _ = run(capsys, "verify", str(certificate_path("t2")),
                           str(certificate_path("t3")), "--jobs", "2")
        assert code == EXIT_OK
        assert out.count("PASS") == 2

    def test_seeded_corruption_always_exits_1(self, capsys, tmp_path):
        # property: corrupting any single multiplier entry gives exit 1, never 0 or 3
        rng = random.Random(20240613)
        base = json.loads(certificate_path("t3").read_text())
        dim = base["t"] + 2
        for trial in range(6):
            obj = json.loads(json.dumps(base))
            which = rng.choice(["lambda", "gamma"])
            i = rng.randrange(dim)
            j = rng.randrange(dim)
            if i == j:
                j = (j + 1) % dim
            obj[which][i][j] = str(rng.randrange(1, 50)) + "/7"
            bad = tmp_path / f"corrupt{trial}.json"
            bad.write_text(json.dumps(obj))
            code, _, _ = run(capsys, "verify", str(bad))
            assert code == EXIT_FALSE

    def test_json_schema_version(self, capsys):
        code, out, _ = run(capsys, "verify", str(certificate_path("t3")), "--json")
        assert json.loads(out)["schema_version"] == 1


class TestGenerate:
    def test_unit_pattern(self, capsys, tmp_path):
        out_path = tmp_path / "one.json"
        code, out, _ = run(capsys, "generate", "--pattern", "1",
                           "--delta", "0.01", "--out", str(out_path))
        assert code == EXIT_OK
        assert out_path.exists()
        code, _, _ = run(capsys, "verify", str(out_path))
        assert code == EXIT_OK

    def test_two_step_coefficient(self, capsys, tmp_path):
        code, out, _ = run(capsys, "generate", "--pattern", "2.9,1.5",
                           "--delta", "0.001", "--json")
        assert code == EXIT_OK
        obj = json.loads(out)
        assert obj["rate_coefficient_float"] >= 2.2 - 1e-6

    def test_not_found_exits_1(self, capsys):
        code, _, err = run(capsys, "generate", "--pattern", "10,10",
                           "--delta", "0.001")
        assert code == EXIT_FALSE
        assert "best residuals" in err

    def test_bad_pattern_exits_2(self, capsys):
        code, _, err = run(capsys, "generate", "--pattern", "1.5,oops",
                           "--delta", "0.001")
        assert code == EXIT_USAGE


class TestRate:
    def test_prints_phases_and_crossover(self, capsys):
        code, out, _ = run(capsys, "rate", "--cert", str(certificate_path("t7")),
                           "--L", "1", "--D", "1", "--f0gap", "1", "--T", "70000")
        assert code == EXIT_OK
        assert "s_bar = 51392" in out
        assert "contraction phase" in out and "sublinear phase" in out
        assert "crossover at T = 359744" in out

    def test_json_fields(self, capsys):
        code, out, _ = run(capsys, "rate", "--cert", str(certificate_path("t3")),
                           "--T", "300000", "--json")
        assert code == EXIT_OK
        obj = json.loads(out)
        assert obj["phase"] == "sublinear"
        assert 0 < obj["bound"] < 1

    def test_non_multiple_T_exits_2(self, capsys):
        code, _, err = run(capsys, "rate", "--cert", str(certificate_path("t7")),
                           "--T", "12345")
        assert code == EXIT_USAGE
        assert "multiple" in err


class TestSimulate:
    def test_writes_csv_and_descriptor(self, capsys, tmp_path):
        out = tmp_path / "run.csv"
        code, _, _ = run(capsys, "simulate", "--problem", "lsq", "--n", "30",
                         "--seed", "42", "--pattern-id", "t3", "--iters", "60",
                         "--out", str(out))
        assert code == EXIT_OK
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "iter,gap"
        assert len(lines) == 62
        desc = json.loads(out.with_suffix(".descriptor.json").read_text())
        assert desc["problem"]["generator"] == "pcg64-box-muller"

    def test_unknown_pattern_id(self, capsys, tmp_path):
        code, _, err = run(capsys, "simulate", "--pattern-id", "nope",
                           "--out", str(tmp_path / "x.csv"))
        assert code == EXIT_USAGE
        assert "nope" in err


class TestDumpPep:
    def test_stdout_json(self, capsys):
        code, out, _ = run(capsys, "dump-pep", "--pattern", "1.5,4.9,1.5")
        assert code == EXIT_OK
        obj = json.loads(out)
        assert obj["t"] == 3
        assert obj["pairs"]["*,0"]["a"] == ["1", "0", "0", "0"]
        # B_{0,*} has a single unit entry in the corner
        b = obj["pairs"]["0,*"]["B"]
        assert b[0][0] == "1"
        assert all(v == "0" for row in b for v in row) is False
