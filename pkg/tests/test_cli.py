import json

import pytest

from operp.cli import main
from operp.config import ConfigError, RunConfig, read_config_file


@pytest.fixture(autouse=True)
def _cache_env(tmp_path, monkeypatch):
    monkeypatch.setenv("OPERP_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.chdir(tmp_path)


def test_build_and_reverify(tmp_path, capsys, M2):
    assert main(["build", "--N", "4", "--track", "rr", "--n", "2"]) == 0
    path = tmp_path / "cache" / "M_rr_N4_n2.json"
    from operp.formats import load_matrix
    assert load_matrix(path) == M2
    assert main(["verify-magic", "--n", "2"]) == 0
    assert "magic: OK" in capsys.readouterr().out


def test_separation(capsys):
    assert main(["verify-separation", "--N", "4"]) == 0
    assert "24×24 identity: OK" in capsys.readouterr().out


def test_norm_commutator(capsys, tmp_path):
    assert main(["norm", "--elem", "commutator", "--grid", "1001", "--out", str(tmp_path / "o")]) == 0
    out = capsys.readouterr().out
    assert out.startswith("commutator: 0.5")
    rep = json.loads((tmp_path / "o" / "norm.json").read_text())
    assert abs(rep["value"] - 0.5) < 1e-9 and rep["config"]["grid"] == 1001


def test_norm_of_a_polynomial(capsys):
    assert main(["norm", "--poly", "X11*X22 - X22*X11", "--grid", "9"]) == 0
    assert "0.5" in capsys.readouterr().out


def test_relations_and_nonvanishing(capsys):
    assert main(["relations"]) == 0
    assert main(["verify-nonvanishing"]) == 0
    assert main(["relations", "--partition", "; w ; (1)"]) == 0


def test_kernel_search(tmp_path, capsys):
    assert main(["kernel-search", "--n", "1", "--degree", "1", "--out", str(tmp_path / "k")]) == 0
    out = capsys.readouterr().out
    assert "re-verified from caches: OK" in out
    doc = json.loads((tmp_path / "k" / "kernel_search.json").read_text())
    assert doc["nullity_n"] >= 8


def test_failing_check_exits_one(capsys):
    assert main(["kernel-search", "--track", "general", "--N", "4"]) == 1


def test_usage_errors_exit_two(tmp_path, capsys):
    assert main(["frobnicate"]) == 2
    assert main(["verify-magic", "--N", "5", "--track", "rr"]) == 2
    cfg = tmp_path / "run.cfg"
    cfg.write_text("N = 4\nbogus = 1\n")
    assert main(["verify-magic", "--config", str(cfg)]) == 2


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep settings\nN = 4\ntrack = rr\nseed = 3\ntasks = magic, relations\ngrid = none\n")
    values = read_config_file(cfg)
    rc = RunConfig.from_mapping(values)
    assert rc.seed == 3 and rc.tasks == ("magic", "relations") and rc.grid is None
    assert main(["sweep", "--config", str(cfg), "--seed", "4", "--out", str(tmp_path / "b")]) == 0
    index = json.loads((tmp_path / "b" / "index.json").read_text())
    assert index["seed"] == 4 and index["config"]["cache_dir"].endswith("cache")


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(track="other")
    with pytest.raises(ConfigError):
        RunConfig(N=5, track="general", L=2)
    with pytest.raises(ConfigError):
        RunConfig(tasks=("nothing",))
    with pytest.raises(ConfigError):
        RunConfig.from_mapping({"seed": "x"})
