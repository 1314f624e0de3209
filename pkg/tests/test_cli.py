import json
import math
from pathlib import Path

import pytest

from expinfo.cli import run_command
from expinfo.corpus import IngestionConfig, ingest_corpus, ingest_files, tokenize
from expinfo.maxent import read_family

FIXTURES = Path(__file__).parent / "fixtures"
TEXTS = [str(FIXTURES / "cats.txt"), str(FIXTURES / "birds.txt")]


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def load(path):
    return json.loads(Path(path).read_text())


@pytest.fixture
def files(tmp_path):
    d = tmp_path / "in"
    d.mkdir()
    return {
        "m": write(d / "m.json", {"alphabet": ["a", "b"], "weights": [3, 1]}),
        "half": write(d / "half.json", {"alphabet": ["a", "b"], "weights": [0.3, 0.7]}),
        "point": write(d / "point.json", {"alphabet": ["a", "b"], "weights": [1, 0]}),
        "family": write(d / "family.json", {"alphabet": ["a", "b"], "instances": [[2, 0], [0, 2]]}),
        "hull": write(d / "hull.json", {"alphabet": ["a", "b"], "instances": [[1, 0], [0, 1]]}),
        "bad": write(d / "bad.json", {"alphabet": ["a", "b"], "weights": [1, -1]}),
        "other": write(d / "other.json", {"alphabet": ["x"], "weights": [1]}),
    }


class TestCorpus:
    def test_char_mode(self, tmp_path):
        (tmp_path / "1").write_text("ab")
        (tmp_path / "2").write_text("ba")
        fam = ingest_files([tmp_path / "1", tmp_path / "2"])
        assert list(fam.alphabet) == ["a", "b"]
        assert fam.matrix.tolist() == [[1, 1], [1, 1]]

    def test_counts_and_padding(self, tmp_path):
        (tmp_path / "1").write_text("aab")
        (tmp_path / "2").write_text("c")
        fam = ingest_files([tmp_path / "1", tmp_path / "2"])
        assert fam.matrix.tolist() == [[2, 1, 0], [0, 0, 1]]
        assert fam.names == ("1", "2")

    def test_token_mode(self):
        assert sorted(tokenize(b"x y x", "token")) == ["x", "x", "y"]

    def test_byte_mode_and_casefold(self):
        assert tokenize(b"Ab", "byte") == ["41", "62"]
        assert tokenize(b"Ab", "byte", True) == ["61", "62"]
        assert tokenize("Straße".encode(), "char", True) == list("strasse")

    def test_unicode_symbols(self):
        assert tokenize("é\n".encode(), "char") == ["é", "\n"]

    def test_errors(self, tmp_path):
        with pytest.raises(OSError, match="missing"):
            ingest_files([str(tmp_path / "missing")])
        (tmp_path / "empty").write_text("")
        with pytest.raises(ValueError, match="empty"):
            ingest_files([str(tmp_path / "empty")])
        (tmp_path / "latin").write_bytes(b"\xff\xfe")
        with pytest.raises(ValueError, match="UTF-8"):
            ingest_files([str(tmp_path / "latin")])
        with pytest.raises(ValueError):
            IngestionConfig((), "char")
        with pytest.raises(ValueError):
            IngestionConfig(("x",), "words")

    def test_round_trip(self, tmp_path):
        fam = ingest_corpus(IngestionConfig(tuple(TEXTS)))
        assert run_command(["ingest", *TEXTS, "--out", str(tmp_path)]) == 0
        back = read_family(tmp_path / "family.json")
        assert back.alphabet == fam.alphabet
        assert (back.matrix == fam.matrix).all()
        assert back.names == fam.names


class TestCommands:
    def test_divergence_self(self, files, tmp_path, capsys):
        assert run_command(["divergence", files["m"], files["m"], "--out", str(tmp_path)]) == 0
        out = load(tmp_path / "divergence.json")
        assert out["divergence_nats"] == 0.0
        assert capsys.readouterr().out.startswith("divergence 0 nats")

    def test_divergence_infinite(self, files, tmp_path):
        assert run_command(["divergence", files["m"], files["point"], "--out", str(tmp_path)]) == 0
        out = load(tmp_path / "divergence.json")
        assert out["divergence_nats"] == "Infinity"
        assert out["mass_term_nats"] is None

    def test_entropy(self, files, tmp_path):
        assert run_command(["entropy", files["m"], "--out", str(tmp_path)]) == 0
        h = load(tmp_path / "entropy.json")["entropy_nats"]
        assert h == pytest.approx(-3 * math.log(0.75) - math.log(0.25), abs=1e-15)

    def test_maxent_symmetric(self, files, tmp_path):
        assert run_command(["maxent", files["family"], "--out", str(tmp_path), "--format", "csv"]) == 0
        sol = load(tmp_path / "solution.json")
        assert sol["c_nats"] == pytest.approx(2 * math.log(2), abs=1e-9)
        assert sol["gap"] <= 1e-9
        rows = (tmp_path / "solution.csv").read_text().splitlines()
        assert rows[0] == "symbol,mu_star,ell_star_nats,ell_star_bits" and len(rows) == 3

    def test_check_equilibrium(self, files, tmp_path):
        out = str(tmp_path)
        assert run_command(["maxent", files["family"], "--out", out]) == 0
        assert run_command(["check-equilibrium", str(tmp_path / "solution.json"), files["family"],
                            "--out", out, "--tol", "1e-7"]) == 0
        assert load(tmp_path / "equilibrium.json")["pass"] is True

    def test_tampered_solution(self, files, tmp_path):
        out = str(tmp_path)
        run_command(["maxent", files["family"], "--out", out])
        sol = load(tmp_path / "solution.json")
        sol["ell_star_nats"][0] += 0.01
        tampered = write(tmp_path / "tampered.json", sol)
        assert run_command(["check-equilibrium", tampered, files["family"], "--out", out]) == 1
        assert load(tmp_path / "equilibrium.json")["pass"] is False

    def test_iproj(self, files, tmp_path):
        nu = write(tmp_path / "nu.json", {"alphabet": ["a", "b"], "weights": [1, 1]})
        assert run_command(["iproj", files["family"], nu, "--out", str(tmp_path), "--samples", "100"]) == 0
        out = load(tmp_path / "iproj.json")
        assert out["minimizer"] == pytest.approx([1, 1], abs=1e-6)
        assert all(c["pass"] for c in out["checks"])

    def test_iproj_infinite(self, files, tmp_path):
        zero = write(tmp_path / "zero.json", {"alphabet": ["a", "b"], "weights": [0, 0]})
        assert run_command(["iproj", files["family"], zero, "--out", str(tmp_path)]) == 0
        out = load(tmp_path / "iproj.json")
        assert out["optimum_nats"] == "Infinity" and out["minimizer"] is None

    def test_riproj(self, files, tmp_path):
        assert run_command(["riproj", files["hull"], files["half"], "--out", str(tmp_path),
                            "--format", "csv"]) == 0
        out = load(tmp_path / "riproj.json")
        assert out["minimizer"] == pytest.approx([0.3, 0.7], abs=1e-6)
        assert (tmp_path / "riproj.csv").exists()

    def test_evalue(self, files, tmp_path):
        assert run_command(["evalue", files["hull"], files["half"], files["half"],
                            "--out", str(tmp_path)]) == 0
        bad = write(tmp_path / "nh.json", {"alphabet": ["a", "b"], "weights": [0.6, 0.4]})
        assert run_command(["evalue", files["hull"], files["half"], bad, "--out", str(tmp_path)]) == 1
        assert run_command(["evalue", files["hull"], files["half"], files["point"],
                            "--out", str(tmp_path)]) == 2

    def test_poisson_verify(self, files, tmp_path):
        assert run_command(["poisson-verify", files["m"], files["half"], "--out", str(tmp_path)]) == 0
        out = load(tmp_path / "poisson_verify.json")
        assert out["abs_error"] <= 1e-8
        assert run_command(["poisson-verify", files["m"], files["half"], "--truncation", "3",
                            "--out", str(tmp_path)]) == 1

    def test_poisson_sample(self, files, tmp_path):
        assert run_command(["poisson-sample", files["m"], "--n", "2000", "--seed", "4",
                            "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "samples.csv").read_text().splitlines()
        assert lines[0] == "a,b" and len(lines) == 2001
        assert load(tmp_path / "expectation.json")["check"]["pass"] is True

    def test_score_sim(self, files, tmp_path):
        assert run_command(["score-sim", files["family"], "--perturbations", "200",
                            "--out", str(tmp_path)]) == 0
        out = load(tmp_path / "scan.json")
        assert out["gap"] <= 1e-9 and out["n"] == 200

    def test_manifest(self, files, tmp_path):
        run_command(["entropy", files["m"], "--out", str(tmp_path), "--seed", "7"])
        man = load(tmp_path / "manifest.json")
        assert man["command"] == "entropy" and man["seed"] == 7
        assert man["inputs"][0]["name"] == "m.json" and len(man["inputs"][0]["sha256"]) == 64


class TestExitCodes:
    @pytest.mark.parametrize("argv", [
        [],
        ["nonsense"],
        ["divergence", "only-one"],
        ["maxent", "fam.json", "--tol", "abc"],
    ])
    def test_usage_errors(self, argv, capsys):
        assert run_command(argv) == 2

    def test_domain_errors(self, files, tmp_path):
        out = ["--out", str(tmp_path)]
        assert run_command(["entropy", files["bad"], *out]) == 2
        assert run_command(["divergence", files["m"], files["other"], *out]) == 2
        assert run_command(["entropy", str(tmp_path / "missing.json"), *out]) == 2
        assert run_command(["maxent", files["family"], "--tol", "0", *out]) == 2
        (tmp_path / "junk.json").write_text("{not json")
        assert run_command(["entropy", str(tmp_path / "junk.json"), *out]) == 2

    def test_non_convergence(self, tmp_path):
        fam = write(tmp_path / "f.json", {"alphabet": ["a", "b", "c"],
                                          "instances": [[5, 1, 0], [0, 2, 7], [1, 6, 2]]})
        assert run_command(["maxent", fam, "--tol", "1e-15", "--max-iter", "2",
                            "--out", str(tmp_path)]) == 1
        assert (tmp_path / "solution.json").exists()


def _end_to_end(out: Path) -> list[int]:
    codes = [run_command(["ingest", *TEXTS, "--out", str(out)])]
    fam = str(out / "family.json")
    codes.append(run_command(["maxent", fam, "--out", str(out), "--format", "csv"]))
    codes.append(run_command(["check-equilibrium", str(out / "solution.json"), fam,
                              "--tol", "1e-7", "--out", str(out)]))
    codes.append(run_command(["score-sim", fam, "--perturbations", "100", "--seed", "3",
                              "--out", str(out / "scan")]))
    return codes


def test_end_to_end_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert _end_to_end(a) == [0, 0, 0, 0]
    assert _end_to_end(b) == [0, 0, 0, 0]
    names = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    assert names == sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
