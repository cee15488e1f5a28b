import json
import shutil

import pytest

from lscert import bundled
from lscert.certificate import check_membership


def test_pattern_registry_covers_table(monkeypatch):
    monkeypatch.delenv(bundled.ENV_VAR, raising=False)
    ids = bundled.pattern_ids()
    assert {"const1", "t2", "t3", "t7", "t15", "t31", "t63", "t127"} <= set(ids)
    for pid in ids:
        pattern = bundled.bundled_pattern(pid)
        meta = bundled.bundled_pattern_meta(pid)
        assert pattern.t >= 1
        assert 0 < meta["delta"] <= 1
        assert meta["epsilon"] >= 0


def test_pattern_lengths_match_ids():
    for pid in ("t2", "t3", "t7", "t15", "t31", "t63", "t127"):
        assert bundled.bundled_pattern(pid).t == int(pid[1:])


def test_all_bundled_certificates_verify_exactly():
    for pid in bundled.certificate_ids():
        cert = bundled.bundled_certificate(pid)
        assert check_membership(cert).overall, f"{pid} failed exact verification"


def test_registry_matches_certificates():
    # where a certificate ships, the registry quotes exactly its Delta and eps
    for pid in bundled.certificate_ids():
        cert = bundled.bundled_certificate(pid)
        meta = bundled.bundled_pattern_meta(pid)
        assert meta["delta"] == cert.Delta
        assert meta["epsilon"] == cert.epsilon
        assert bundled.bundled_pattern(pid).h == cert.pattern.h


def test_env_var_overrides_data_dir(tmp_path, monkeypatch):
    alt = tmp_path / "data"
    shutil.copytree(bundled.data_dir(), alt)
    reg = json.loads((alt / "patterns.json").read_text())
    reg["custom99"] = {"h": ["1.25"], "delta": "0.01", "epsilon": "0"}
    (alt / "patterns.json").write_text(json.dumps(reg))
    monkeypatch.setenv(bundled.ENV_VAR, str(alt))
    assert "custom99" in bundled.pattern_ids()
    assert bundled.bundled_pattern("custom99").as_text() == "5/4"
    monkeypatch.setenv(bundled.ENV_VAR, str(tmp_path / "missing"))
    with pytest.raises(FileNotFoundError):
        bundled.data_dir()


def test_unknown_ids_raise():
    with pytest.raises(KeyError):
        bundled.bundled_pattern("t999")
    with pytest.raises(FileNotFoundError):
        bundled.bundled_certificate("t999")
