import json
import math

import numpy as np
import pytest

from corrspike import harness as H
from corrspike.errors import ConfigError


DETECT = """{
  "mode": "DetectSim",
  "model": "Wigner",
  "params": {"lambda": 0.95, "mu": 0.95, "rho": 0.95, "n": 60},
  "prior": {"kind": "CorrelatedRademacher"},
  "detect": {"ell": 4, "t": 8},
  "trials": 2,
  "seed": 7
}
"""


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_threshold_cli_output(capsys):
    assert H.main(["threshold", "--lambda", ".9", "--mu", ".9", "--rho", ".9", "--gamma", "1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "F=1.5509"
    assert out[1] == "A+=1.4661"
    assert out[-1] == "verdict: above threshold"
    H.main(["threshold", "--lambda", ".3", "--mu", ".3", "--rho", ".3"])
    assert capsys.readouterr().out.splitlines()[-1] == "verdict: below threshold"


def test_threshold_bad_gamma_exits_2(capsys):
    assert H.main(["threshold", "--lambda", ".9", "--mu", ".9", "--rho", ".9", "--gamma", "0"]) == 2


def test_zero_trials_exits_2_with_line(tmp_path, capsys):
    cfg = _write(tmp_path, "c.json", DETECT.replace('"trials": 2', '"trials": 0'))
    out = tmp_path / "out"
    assert H.main(["detect-sim", "--config", cfg, "--out", str(out)]) == 2
    assert "line 7:" in capsys.readouterr().err
    assert not out.exists()


def test_malformed_json_reports_line():
    with pytest.raises(ConfigError, match="line 3"):
        H.parse_config('{\n "mode": "DetectSim",\n "trials": ,\n}')


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError, match="line 6"):
        H.parse_config(DETECT.replace('"ell": 4', '"elll": 4'))


def test_mode_mismatch(tmp_path):
    cfg = _write(tmp_path, "c.json", DETECT)
    assert H.main(["recover-sim", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_prior_rho_defaults_to_model_rho():
    cfg = H.parse_config(DETECT)
    assert cfg.prior.rho == 0.95


def test_detect_csv_identical_across_threads(tmp_path):
    cfg = _write(tmp_path, "c.json", DETECT)
    a, b = tmp_path / "a", tmp_path / "b"
    assert H.main(["detect-sim", "--config", cfg, "--out", str(a), "--threads", "1"]) == 0
    assert H.main(["detect-sim", "--config", cfg, "--out", str(b), "--threads", "4"]) == 0
    assert (a / "detect.csv").read_bytes() == (b / "detect.csv").read_bytes()
    ma, mb = (json.loads((d / "manifest.json").read_text()) for d in (a, b))
    assert ma["input_hash"] == mb["input_hash"]
    assert ma["trial_seeds"] == mb["trial_seeds"]


def test_manifest_replay(tmp_path):
    cfg = _write(tmp_path, "c.json", DETECT)
    a, b = tmp_path / "a", tmp_path / "b"
    H.main(["detect-sim", "--config", cfg, "--out", str(a)])
    assert H.main(["detect-sim", "--config", str(a / "manifest.json"), "--out", str(b)]) == 0
    assert (a / "detect.csv").read_bytes() == (b / "detect.csv").read_bytes()


def test_detect_rows_and_summary(tmp_path):
    cfg = H.parse_config(DETECT, {"output_path": str(tmp_path / "o")})
    man = H.run(cfg)
    lines = (tmp_path / "o" / "detect.csv").read_text().splitlines()
    assert lines[0] == "trial,hypothesis,value,decision"
    assert [l.split(",")[1] for l in lines[1:]] == ["P", "Q", "P", "Q"]
    assert 0 <= man.summary["auc"] <= 1
    assert len({s["data_seed"] for s in man.trial_seeds}) == 4


def test_empirical_null_mode(tmp_path):
    text = DETECT.replace('"t": 8', '"t": 4, "threshold_mode": "EmpiricalNull", "null_reps": 5')
    man = H.run(H.parse_config(text, {"output_path": str(tmp_path / "o")}))
    assert math.isfinite(man.summary["threshold"])


def test_phase_diagram_header_and_inf(tmp_path, capsys):
    out = tmp_path / "pd"
    assert H.main(["phase-diagram", "--grid", "5", "--out", str(out)]) == 0
    lines = (out / "phase_diagram.csv").read_text().splitlines()
    assert lines[0] == "lambda,mu_crit_subgraph,mu_crit_pls,mu_crit_cca"
    assert len(lines) == 6
    # at lambda = 1 the PLS curve never succeeds and is written as an empty cell
    assert lines[-1].split(",")[2] == ""
    assert json.loads(capsys.readouterr().out)["ordering_holds"] is True


def test_fmt_encodings():
    assert H._fmt(float("inf")) == "" and H._fmt(None) == ""
    assert H._fmt(True) == "1" and H._fmt(np.int64(3)) == "3"
    assert float(H._fmt(0.1)) == 0.1


def test_numeric_failure_exits_3(tmp_path, capsys):
    cfg = _write(tmp_path, "ld.json", """{
  "mode": "LowDeg",
  "params": {"lambda": 1e12, "mu": 1e12, "rho": 0.5, "n": 1},
  "lowdeg": {"n_values": [500], "D": 15, "reps": 1000}
}
""")
    out = tmp_path / "o"
    assert H.main(["lowdeg", "--config", cfg, "--out", str(out)]) == 3
    assert "numeric failure" in capsys.readouterr().err
    assert not out.exists()


def test_lowdeg_and_recover_runs(tmp_path):
    ld = H.parse_config("""{"mode": "LowDeg", "params": {"lambda": 0.6, "mu": 0.6, "rho": 0.3, "n": 1},
 "prior": {"rho_mode": "Squared"}, "lowdeg": {"n_values": [100, 200], "D": 6, "reps": 2000}}""",
                        {"output_path": str(tmp_path / "l")})
    man = H.run(ld)
    assert len(man.summary["estimates"]) == 2
    rec = H.parse_config("""{"mode": "RecoverSim", "model": "Wishart",
 "params": {"lambda": 0.9, "mu": 0.9, "rho": 0.9, "n": 40, "N": 40},
 "recover": {"ell": 2, "t": 5}, "trials": 2}""", {"output_path": str(tmp_path / "r")})
    man = H.run(rec)
    assert 0 <= man.summary["mean_overlap"] <= 1
    assert (tmp_path / "r" / "recover.csv").exists()


def test_content_hash_ignores_threads():
    a = H.parse_config(DETECT)
    b = H.parse_config(DETECT, {"threads": 3, "output_path": "elsewhere"})
    c = H.parse_config(DETECT, {"seed": 8})
    assert a.content_hash() == b.content_hash() != c.content_hash()
