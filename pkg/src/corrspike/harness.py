"""Experiment configuration, orchestration and the command line interface.

Every mode writes its CSV next to a JSON manifest holding the fully resolved
configuration, a SHA-256 of that configuration, per-trial seeds and the
wall-clock time. Re-running with the manifest as the config reproduces the
CSV byte for byte. Outputs are staged in temporary files and only renamed
into place once the run succeeds.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import enum
import hashlib
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import baselines, detection, graphfam, lowdeg, recovery
from .errors import ConfigError, ConvergenceError, ParameterError
from .models import (ModelParams, sample_null_wigner, sample_null_wishart, sample_wigner_pair,
                     sample_wishart_pair)
from .prior import PriorSpec

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class Mode(str, enum.Enum):
    THRESHOLD = "Threshold"
    PHASE_DIAGRAM = "PhaseDiagram"
    DETECT_SIM = "DetectSim"
    RECOVER_SIM = "RecoverSim"
    LOW_DEG = "LowDeg"


class ModelKind(str, enum.Enum):
    WIGNER = "Wigner"
    WISHART = "Wishart"


@dataclass(frozen=True)
class LowDegConfig:
    n_values: tuple = (500, 1000, 2000)
    D: int = 15
    reps: int = 100_000
    N_ratio: float = 4.0

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(v) for v in self.n_values))
        if not self.n_values or min(self.n_values) < 1:
            raise ParameterError("n_values must be a nonempty list of positive integers")
        if self.D < 0 or self.reps < 1000 or self.N_ratio <= 0:
            raise ParameterError("need D >= 0, reps >= 1000 and N_ratio > 0")


@dataclass(frozen=True)
class PhaseConfig:
    gamma: float = 0.25
    rho: float = 0.99
    grid: int = 200
    lambda_max: float = 1.0

    def __post_init__(self):
        if self.gamma <= 0 or self.grid < 1 or self.lambda_max <= 0:
            raise ParameterError("need gamma > 0, grid >= 1 and lambda_max > 0")
        if not 0 <= self.rho <= 1:
            raise ParameterError("rho must lie in [0, 1]")


@dataclass(frozen=True)
class ExperimentConfig:
    mode: Mode
    model: ModelKind = ModelKind.WIGNER
    params: Optional[ModelParams] = None
    prior: PriorSpec = PriorSpec()
    detect: detection.DetectConfig = detection.DetectConfig()
    recover: recovery.RecoverConfig = recovery.RecoverConfig()
    lowdeg: LowDegConfig = LowDegConfig()
    phase: PhaseConfig = PhaseConfig()
    trials: int = 1
    seed: int = 0
    threads: int = 1
    output_path: str = "out"

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError("trials must be at least 1")
        if self.threads < 1:
            raise ParameterError("threads must be at least 1")

    def to_dict(self) -> dict:
        p = self.params
        return {
            "mode": self.mode.value,
            "model": self.model.value,
            "params": None if p is None else {"lambda": p.lam, "mu": p.mu, "rho": p.rho,
                                              "n": p.n, "N": p.N},
            "prior": self.prior.to_dict(),
            "detect": _plain(dataclasses.asdict(self.detect), drop=("threads",)),
            "recover": _plain(dataclasses.asdict(self.recover), drop=("threads",)),
            "lowdeg": _plain(dataclasses.asdict(self.lowdeg)),
            "phase": dataclasses.asdict(self.phase),
            "trials": self.trials,
            "seed": self.seed,
            "threads": self.threads,
            "output_path": self.output_path,
        }

    def content_hash(self) -> str:
        d = self.to_dict()
        # worker count and destination do not change results
        d.pop("threads"), d.pop("output_path")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


def _plain(d, drop=()):
    out = {}
    for k, v in d.items():
        if k in drop:
            continue
        if isinstance(v, enum.Enum):
            v = v.value
        elif isinstance(v, tuple):
            v = list(v)
        out[k] = v
    return out


# ------------------------------------------------------------ config loading

_TOP_KEYS = {"mode", "model", "params", "prior", "detect", "recover", "lowdeg", "phase",
             "trials", "seed", "threads", "output_path"}
_PARAM_KEYS = {"lambda", "mu", "rho", "n", "N"}


def _line_of(text: str, key: str) -> int:
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return 1


def _fail(text, key, msg):
    raise ConfigError(f"line {_line_of(text, key)}: {msg}")


def _sub(text, raw, name, cls):
    d = raw.get(name, {})
    if d is None:
        d = {}
    if not isinstance(d, dict):
        _fail(text, name, f"'{name}' must be an object")
    names = {f.name for f in dataclasses.fields(cls)}
    for k in d:
        if k not in names or k in ("threads",):
            _fail(text, k, f"unknown key '{k}' in '{name}'")
    try:
        return cls(**d)
    except (ParameterError, TypeError, ValueError) as exc:
        key = next(iter(d), name)
        _fail(text, key, f"invalid '{name}' section: {exc}")


def parse_config(text: str, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Validate a JSON config; errors carry the offending line number."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(raw, dict):
        raise ConfigError("line 1: config must be a JSON object")
    if "config" in raw and "input_hash" in raw:
        raw = raw["config"]  # a manifest from an earlier run
    for k in raw:
        if k not in _TOP_KEYS:
            _fail(text, k, f"unknown key '{k}'")
    if "mode" not in raw:
        raise ConfigError("line 1: missing required key 'mode'")
    try:
        mode = Mode(raw["mode"])
    except ValueError:
        _fail(text, "mode", f"unknown mode {raw['mode']!r}")
    try:
        model = ModelKind(raw.get("model", "Wigner"))
    except ValueError:
        _fail(text, "model", f"unknown model {raw.get('model')!r}")

    params = None
    if raw.get("params") is not None:
        p = raw["params"]
        if not isinstance(p, dict):
            _fail(text, "params", "'params' must be an object")
        for k in p:
            if k not in _PARAM_KEYS:
                _fail(text, k, f"unknown key '{k}' in 'params'")
        try:
            params = ModelParams(float(p.get("lambda", 0.0)), float(p.get("mu", 0.0)),
                                 float(p.get("rho", 0.0)), int(p["n"]),
                                 None if p.get("N") is None else int(p["N"]))
        except KeyError:
            _fail(text, "params", "'params' needs 'n'")
        except (ParameterError, TypeError, ValueError) as exc:
            _fail(text, "params", f"invalid 'params': {exc}")
    if mode in (Mode.DETECT_SIM, Mode.RECOVER_SIM) and params is None:
        _fail(text, "mode", f"mode {mode.value} needs 'params'")
    if model is ModelKind.WISHART and params is not None and params.N is None \
            and mode is not Mode.LOW_DEG:
        _fail(text, "params", "Wishart experiments need 'N'")

    try:
        prior_raw = dict(raw.get("prior") or {})
        if "rho" not in prior_raw and params is not None:
            prior_raw["rho"] = params.rho  # the spike coupling defaults to the model rho
        prior = PriorSpec.from_dict(prior_raw)
    except ParameterError as exc:
        _fail(text, "prior", f"invalid 'prior': {exc}")
    det = _sub(text, raw, "detect", detection.DetectConfig)
    rec = _sub(text, raw, "recover", recovery.RecoverConfig)
    ld = _sub(text, raw, "lowdeg", LowDegConfig)
    ph = _sub(text, raw, "phase", PhaseConfig)

    fields = {"trials": raw.get("trials", 1), "seed": raw.get("seed", 0),
              "threads": raw.get("threads", 1), "output_path": raw.get("output_path", "out")}
    for k in ("trials", "seed", "threads"):
        if not isinstance(fields[k], int) or isinstance(fields[k], bool):
            _fail(text, k, f"'{k}' must be an integer")
    for k, v in (overrides or {}).items():
        if v is not None:
            fields[k] = v
    if fields["trials"] < 1:
        _fail(text, "trials", "'trials' must be at least 1")
    det = dataclasses.replace(det, threads=fields["threads"])
    rec = dataclasses.replace(rec, threads=fields["threads"])
    try:
        return ExperimentConfig(mode, model, params, prior, det, rec, ld, ph, **fields)
    except ParameterError as exc:
        raise ConfigError(f"line 1: {exc}") from None


# ---------------------------------------------------------------- outputs

class _Staged:
    """Collects output files and commits them atomically-ish at the end."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.files = {}

    def write(self, name: str, text: str):
        self.files[name] = text

    def commit(self):
        os.makedirs(self.out_dir, exist_ok=True)
        tmp = []
        try:
            for name, text in self.files.items():
                path = os.path.join(self.out_dir, name)
                with open(path + ".part", "w", newline="") as fh:
                    fh.write(text)
                tmp.append(path)
            for path in tmp:
                os.replace(path + ".part", path)
        except OSError:
            for path in tmp:
                if os.path.exists(path + ".part"):
                    os.remove(path + ".part")
            raise


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isinf(v):
        return ""
    return repr(v)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([c if isinstance(c, str) else _fmt(c) for c in r])
    return buf.getvalue()


@dataclass
class RunManifest:
    config: dict
    input_hash: str
    wall_clock: float
    trial_seeds: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True,
                          default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"not serializable: {type(o)}")


def _finite_or_none(x):
    return None if x is None or not math.isfinite(x) else float(x)


# ---------------------------------------------------------------- modes

def threshold_report(lam, mu, rho, gamma) -> dict:
    F = graphfam.f_threshold(lam, mu, rho, gamma)
    return {
        "F": F,
        "A_plus": graphfam.a_plus(lam, mu, rho),
        "pls_tau": baselines.pls_threshold(lam, mu, rho),
        "pls_success": baselines.pls_threshold(lam, mu, rho) <= gamma,
        "cca_value": baselines.cca_value(lam, mu, rho, gamma),
        "cca_condition": baselines.cca_condition(lam, mu, rho, gamma),
        "verdict": "above threshold" if F > 1 else "below threshold",
    }


def format_threshold(rep: dict) -> str:
    tau = rep["pls_tau"]
    return "\n".join([
        f"F={rep['F']:.4f}",
        f"A+={rep['A_plus']:.4f}",
        f"PLS tau={'inf' if math.isinf(tau) else f'{tau:.4f}'} "
        f"({'succeeds' if rep['pls_success'] else 'fails'})",
        f"CCA value={rep['cca_value']:.4f} ({'succeeds' if rep['cca_condition'] else 'fails'})",
        f"verdict: {rep['verdict']}",
    ])


def phase_diagram(gamma: float, rho: float, lambdas) -> list:
    """Rows (lambda, mu_subgraph, mu_pls, mu_cca); inf means never succeeds."""
    lambdas = list(lambdas)
    if not lambdas:
        raise ParameterError("empty lambda grid")
    rows = []
    for lam in lambdas:
        rows.append((float(lam),) + tuple(
            graphfam.critical_mu(float(lam), rho, gamma, m) for m in graphfam.Method))
    return rows


def _int_seed(*path) -> int:
    return int(np.random.SeedSequence(list(path)).generate_state(1, np.uint64)[0] >> 1)


def _sample(cfg: ExperimentConfig, planted: bool, seed):
    p = cfg.params
    if cfg.model is ModelKind.WIGNER:
        if planted:
            return sample_wigner_pair(p, cfg.prior, seed)
        return sample_null_wigner(p.n, seed)
    if planted:
        return sample_wishart_pair(p, cfg.prior, seed)
    return sample_null_wishart(p.n, p.N, seed)


def _detect_one(cfg: ExperimentConfig, pair, coloring_seed):
    p = cfg.params
    dcfg = dataclasses.replace(cfg.detect, seed=coloring_seed)
    fn = detection.detect_stat_wigner if cfg.model is ModelKind.WIGNER else detection.detect_stat_wishart
    rep = fn(pair, p.lam, p.mu, p.rho, dcfg)
    if not math.isfinite(rep.value):
        raise FloatingPointError("non-finite detection statistic")
    return rep


def run_detect(cfg: ExperimentConfig, staged: _Staged) -> tuple:
    seeds, rows = [], []
    reports = {"P": [], "Q": []}
    for i in range(cfg.trials):
        for h, planted in (("P", True), ("Q", False)):
            hid = 1 if planted else 0
            ds, cs = _int_seed(cfg.seed, 1, hid, i), _int_seed(cfg.seed, 2, hid, i)
            seeds.append({"trial": i, "hypothesis": h, "data_seed": ds, "coloring_seed": cs})
            reports[h].append(_detect_one(cfg, _sample(cfg, planted, ds), cs))
    calib = None
    if cfg.detect.threshold_mode is detection.ThresholdMode.EMPIRICAL_NULL:
        calib = []
        for j in range(cfg.detect.null_reps):
            ds, cs = _int_seed(cfg.seed, 3, 0, j), _int_seed(cfg.seed, 4, 0, j)
            calib.append(_detect_one(cfg, _sample(cfg, False, ds), cs).value)
    tau = detection.threshold(reports["P"][0], cfg.detect, calib)
    for i in range(cfg.trials):
        for h in ("P", "Q"):
            rep = reports[h][i]
            rows.append((i, h, rep.value, detection.decide(rep, cfg.detect, calib)))
    pv = [r.value for r in reports["P"]]
    qv = [r.value for r in reports["Q"]]
    summary = {
        "threshold": tau,
        "type_I": float(np.mean([r.decision for r in reports["Q"]])),
        "type_II": float(np.mean([not r.decision for r in reports["P"]])),
        "auc": detection.auc(pv, qv),
        "mean_P": float(np.mean(pv)),
        "mean_Q": float(np.mean(qv)),
        "mean_P_analytic": reports["P"][0].mean_P_analytic,
        "t": reports["P"][0].t,
    }
    staged.write("detect.csv", _csv(["trial", "hypothesis", "value", "decision"], rows))
    return seeds, summary


def run_recover(cfg: ExperimentConfig, staged: _Staged) -> tuple:
    p = cfg.params
    seeds, rows = [], []
    fn = (recovery.recovery_scores_wigner if cfg.model is ModelKind.WIGNER
          else recovery.recovery_scores_wishart)
    for i in range(cfg.trials):
        ds, cs = _int_seed(cfg.seed, 5, 1, i), _int_seed(cfg.seed, 6, 1, i)
        seeds.append({"trial": i, "data_seed": ds, "coloring_seed": cs})
        pair = _sample(cfg, True, ds)
        rcfg = dataclasses.replace(cfg.recover, seed=cs)
        row = fn(pair, p.lam, p.mu, p.rho, rcfg)
        if not np.all(np.isfinite(row.scores)):
            raise FloatingPointError("non-finite recovery score")
        est = recovery.assemble_estimate(row, rcfg)
        prods = recovery.conditional_products(row, pair.spikes.x)
        rows.append((i, row.pivot, recovery.overlap(est, pair.spikes.x), float(prods.mean())))
    summary = {
        "mean_overlap": float(np.mean([r[2] for r in rows])),
        "mean_product": float(np.mean([r[3] for r in rows])),
        "product_stderr": float(np.std([r[3] for r in rows], ddof=1) / math.sqrt(len(rows)))
        if len(rows) > 1 else 0.0,
    }
    staged.write("recover.csv", _csv(["trial", "pivot", "overlap", "mean_product"], rows))
    return seeds, summary


def run_lowdeg(cfg: ExperimentConfig, staged: _Staged) -> tuple:
    p = cfg.params
    lam, mu, rho = (p.lam, p.mu, p.rho) if p is not None else (0.0, 0.0, 0.0)
    ld = cfg.lowdeg
    prior = cfg.prior
    rows, seeds = [], []
    for n in ld.n_values:
        seeds.append({"n": n, "seed": cfg.seed})
        if cfg.model is ModelKind.WIGNER:
            est = lowdeg.adv_wigner_mc(prior, lam, mu, n, ld.D, ld.reps, cfg.seed)
        else:
            N = max(1, int(round(ld.N_ratio * n)))
            est = lowdeg.adv_wishart_mc(prior, lam, mu, n, N, ld.D, ld.reps, cfg.seed)
        if not math.isfinite(est.value):
            raise FloatingPointError("advantage estimate overflowed")
        rows.append((n, ld.D, lam, mu, rho, est.value, est.std_error))
    staged.write("lowdeg.csv", _csv(["n", "D", "lambda", "mu", "rho", "estimate", "stderr"], rows))
    return seeds, {"estimates": [r[5] for r in rows]}


def run_phase(cfg: ExperimentConfig, staged: _Staged) -> tuple:
    ph = cfg.phase
    lambdas = np.linspace(0.0, ph.lambda_max, ph.grid)
    rows = phase_diagram(ph.gamma, ph.rho, lambdas)
    staged.write("phase_diagram.csv",
                 _csv(["lambda", "mu_crit_subgraph", "mu_crit_pls", "mu_crit_cca"], rows))
    ordered = all(r[1] <= r[2] and r[1] <= r[3] for r in rows)
    return [], {"ordering_holds": ordered}


def run_threshold(cfg: ExperimentConfig, staged: _Staged) -> tuple:
    p = cfg.params
    if p is None:
        raise ParameterError("threshold mode needs params")
    gamma = p.gamma if p.N is not None else cfg.phase.gamma
    rep = threshold_report(p.lam, p.mu, p.rho, gamma)
    staged.write("threshold.csv", _csv(list(rep), [list(rep.values())]))
    return [], {k: (_finite_or_none(v) if isinstance(v, float) else v) for k, v in rep.items()}


_RUNNERS = {Mode.DETECT_SIM: run_detect, Mode.RECOVER_SIM: run_recover,
            Mode.LOW_DEG: run_lowdeg, Mode.PHASE_DIAGRAM: run_phase,
            Mode.THRESHOLD: run_threshold}


def run(cfg: ExperimentConfig) -> RunManifest:
    """Execute ``cfg`` and write its CSV and manifest.json into output_path."""
    t0 = time.perf_counter()
    staged = _Staged(cfg.output_path)
    with np.errstate(over="raise", invalid="raise"):
        seeds, summary = _RUNNERS[cfg.mode](cfg, staged)
    man = RunManifest(cfg.to_dict(), cfg.content_hash(), time.perf_counter() - t0, seeds,
                      summary, sorted(staged.files) + ["manifest.json"])
    staged.write("manifest.json", man.to_json())
    staged.commit()
    return man


# ---------------------------------------------------------------- CLI

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--out", default=None, help="output directory")
    ap = argparse.ArgumentParser(prog="corrspike",
                                 description="Correlated spike detection experiments.")
    sub = ap.add_subparsers(dest="command", required=True)
    th = sub.add_parser("threshold", parents=[common], help="threshold calculus at one point")
    th.add_argument("--lambda", dest="lam", type=float, required=True)
    th.add_argument("--mu", type=float, required=True)
    th.add_argument("--rho", type=float, required=True)
    th.add_argument("--gamma", type=float, default=1.0)
    pd = sub.add_parser("phase-diagram", parents=[common], help="critical mu curves")
    pd.add_argument("--gamma", type=float, default=0.25)
    pd.add_argument("--rho", type=float, default=0.99)
    pd.add_argument("--grid", type=int, default=200, help="number of lambda points")
    pd.add_argument("--lambda-max", type=float, default=1.0)
    for name in ("detect-sim", "recover-sim", "lowdeg"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--config", required=True)
    return ap


_MODE_OF = {"detect-sim": Mode.DETECT_SIM, "recover-sim": Mode.RECOVER_SIM,
            "lowdeg": Mode.LOW_DEG}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    overrides = {"seed": args.seed, "threads": args.threads, "output_path": args.out}
    try:
        if args.command == "threshold":
            if args.gamma <= 0:
                raise ConfigError("gamma must be positive")
            rep = threshold_report(args.lam, args.mu, args.rho, args.gamma)
            print(format_threshold(rep))
            if args.out:
                cfg = ExperimentConfig(Mode.THRESHOLD,
                                       params=ModelParams(args.lam, args.mu, args.rho, 1),
                                       phase=PhaseConfig(gamma=args.gamma), output_path=args.out)
                run(cfg)
            return EXIT_OK
        if args.command == "phase-diagram":
            try:
                ph = PhaseConfig(args.gamma, args.rho, args.grid, args.lambda_max)
            except ParameterError as exc:
                raise ConfigError(str(exc)) from None
            fields = {k: v for k, v in overrides.items() if v is not None}
            cfg = ExperimentConfig(Mode.PHASE_DIAGRAM, phase=ph, **fields)
            man = run(cfg)
            print(json.dumps(man.summary))
            return EXIT_OK
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        cfg = parse_config(text, overrides)
        if cfg.mode is not _MODE_OF[args.command]:
            raise ConfigError(f"line {_line_of(text, 'mode')}: config mode {cfg.mode.value} "
                              f"does not match command {args.command}")
        man = run(cfg)
        print(json.dumps(man.summary, default=_json_default))
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParameterError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, FloatingPointError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
