"""Command-line front end: ``chshlab {verify,chsh,scan,models}``.

Configuration comes from an optional flat ``key = value`` file (``--config``)
overridden by command-line flags.  Angles are given in degrees.  Records go
to stdout or ``--out``; the format follows the file extension (``.jsonl``,
``.csv``) unless ``--format`` says otherwise.

Exit status: 0 success, 1 invariant failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from .algebra import BellState
from .chsh import chsh_exact, chsh_from_counts, chsh_value, maximize_chsh, simulate_events
from .extensions import ContinuousBasisModel, IndependentSourceModel, PeakedDensity, RegularizedDelta, WernerModel, kappa_sm
from .gudder import GudderModel
from .lhv import random_deterministic_strategy, random_factorized_strategy, sign_model, standard_settings
from .models import SettingsQuad
from .quantum import QuantumModel

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "build_model",
    "run_chsh",
    "run_scan",
    "emit_records",
    "parse_records",
    "main",
]

OK, INVARIANT_FAILURE, CONFIG_ERROR = 0, 1, 2

MODELS = {
    "qm": "quantum reference on a Bell ket (state)",
    "gudder": "tensor-product correlation on a Bell vector (state)",
    "werner": "Bell vector mixed with the random vector (state, lambda_mix)",
    "lhv": "local hidden-variable strategy (strategy)",
    "model1": "continuous hidden-variable basis (state, sigma, sigma_b, eps)",
    "model3": "independent local smearing (state, sigma, sigma_b, eps)",
}
STRATEGIES = ("sign", "random-deterministic", "random-factorized")
FORMATS = ("jsonl", "csv")
SCAN_PARAMS = ("lambda_mix", "sigma", "sigma_b", "eps", "events")
LHV_CEILING = 2.0
QM_CEILING = 2.0 * math.sqrt(2.0)
BOUND_TOL = 1e-9


class ConfigError(ValueError):
    pass


def _choice(options):
    def conv(s):
        s = s.strip().lower()
        if s not in options:
            raise ValueError(f"unknown value {s!r}; choose from {', '.join(options)}")
        return s

    return conv


def _float(lo=None, hi=None, positive=False):
    def conv(s):
        x = float(s)
        if not math.isfinite(x):
            raise ValueError(f"must be finite, got {s!r}")
        if positive and not x > 0:
            raise ValueError(f"must be > 0, got {x}")
        if lo is not None and x < lo or hi is not None and x > hi:
            raise ValueError(f"must lie in [{lo}, {hi}], got {x}")
        return x

    return conv


def _int(lo):
    def conv(s):
        x = float(s)
        if x != int(x):
            raise ValueError(f"must be an integer, got {s!r}")
        if x < lo:
            raise ValueError(f"must be >= {lo}, got {int(x)}")
        return int(x)

    return conv


def _state(s):
    return BellState.parse(s.strip()).value


def _settings(s):
    s = s.strip()
    if s.lower() in ("optimize", "standard"):
        return s.lower()
    parts = s.replace(",", " ").split()
    if len(parts) != 8:
        raise ValueError(f"need 'optimize', 'standard' or 8 angles in degrees, got {len(parts)} values")
    return tuple(_float()(p) for p in parts)


def _bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    model: str = "qm"
    state: str = "PsiMinus"
    lambda_mix: float = 1.0
    sigma: float = 0.1
    sigma_b: Optional[float] = None
    eps: Optional[float] = None
    strategy: str = "sign"
    settings: Any = "optimize"
    events: Optional[int] = None
    seed: int = 0
    restarts: int = 4
    workers: int = 1
    out: Optional[str] = None
    format: Optional[str] = None
    param: Optional[str] = None
    start: Optional[float] = None
    stop: Optional[float] = None
    points: int = 21
    log: bool = False


PARSERS: dict[str, Callable[[str], Any]] = {
    "model": _choice(tuple(MODELS)),
    "state": _state,
    "lambda_mix": _float(0.0, 1.0),
    "sigma": _float(positive=True),
    "sigma_b": _float(positive=True),
    "eps": _float(positive=True),
    "strategy": _choice(STRATEGIES),
    "settings": _settings,
    "events": _int(1),
    "seed": _int(0),
    "restarts": _int(1),
    "workers": _int(1),
    "out": str,
    "format": _choice(FORMATS),
    "param": _choice(SCAN_PARAMS),
    "start": _float(),
    "stop": _float(),
    "points": _int(2),
    "log": _bool,
}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in PARSERS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = PARSERS[key](val)
        except ValueError as e:
            raise ConfigError(f"{source}:{lineno}: field {key!r}: {e}") from None
    return values


def load_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> ExperimentConfig:
    values = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise ConfigError(f"{path}: {e.strerror}") from None
        values.update(parse_config_text(text, path))
    for key, raw in (overrides or {}).items():
        if raw is None:
            continue
        try:
            values[key] = PARSERS[key](str(raw))
        except ValueError as e:
            raise ConfigError(f"--{key.replace('_', '-')}: {e}") from None
    cfg = ExperimentConfig(**values)
    _check_consistency(cfg)
    return cfg


def _check_consistency(cfg: ExperimentConfig) -> None:
    if cfg.model == "lhv" and cfg.strategy != "sign" and cfg.settings == "optimize":
        raise ConfigError("field 'settings': random finite strategies live on one quad; give explicit settings")
    fmt = _format_from_path(cfg.out)
    if fmt and cfg.format and fmt != cfg.format:
        raise ConfigError(f"field 'format': {cfg.format!r} conflicts with the extension of {cfg.out!r}")
    if cfg.out and not (fmt or cfg.format):
        raise ConfigError(f"field 'out': cannot infer format from {cfg.out!r}; use .jsonl or .csv")


def _format_from_path(path) -> Optional[str]:
    if not path:
        return None
    return {".jsonl": "jsonl", ".json": "jsonl", ".csv": "csv"}.get(Path(path).suffix.lower())


def output_format(cfg: ExperimentConfig) -> str:
    return _format_from_path(cfg.out) or cfg.format or "jsonl"


# ---------------------------------------------------------------- models


def _densities(cfg):
    sb = cfg.sigma if cfg.sigma_b is None else cfg.sigma_b
    return PeakedDensity(0.0, cfg.sigma), PeakedDensity(0.0, sb)


def resolve_settings(cfg: ExperimentConfig) -> Optional[SettingsQuad]:
    if cfg.settings == "optimize":
        return None
    if cfg.settings == "standard":
        return standard_settings()
    return SettingsQuad.from_degrees(cfg.settings)


def build_model(cfg: ExperimentConfig, settings: Optional[SettingsQuad] = None):
    m = cfg.model
    if m == "qm":
        return QuantumModel(cfg.state)
    if m == "gudder":
        return GudderModel(cfg.state)
    if m == "werner":
        return WernerModel(cfg.lambda_mix, cfg.state)
    if m == "lhv":
        if cfg.strategy == "sign":
            return sign_model()
        make = random_deterministic_strategy if cfg.strategy == "random-deterministic" else random_factorized_strategy
        return make(cfg.seed, settings=settings)
    rho_a, rho_b = _densities(cfg)
    if m == "model1":
        eps = RegularizedDelta(cfg.eps if cfg.eps is not None else rho_b.sigma / 100)
        return ContinuousBasisModel(cfg.state, rho_a, rho_b, eps)
    eps = RegularizedDelta(cfg.eps) if cfg.eps is not None else None
    return IndependentSourceModel(cfg.state, rho_a, rho_b, eps)


def _prefactor_limit(model) -> float:
    """The ``eps -> 0`` value of the absorbed constant."""
    if isinstance(model, ContinuousBasisModel):
        return kappa_sm(model.rho_S, model.rho_M)
    na = model.rho_A.square_integral().value
    nb = model.rho_B.square_integral().value
    return float(model.rho_A(model.rho_A.mu) * model.rho_B(model.rho_B.mu)) / math.sqrt(na * nb)


# --------------------------------------------------------------- records

PAIR_TAGS = ("ab", "abp", "apb", "apbp")
OUTCOME_TAGS = ("pp", "pm", "mp", "mm")
ANGLE_FIELDS = tuple(f"{d}_{x}" for d in ("a", "ap", "b", "bp") for x in ("theta", "phi"))
TERM_FIELDS = tuple(f"E_{t}" for t in PAIR_TAGS)
COUNT_FIELDS = tuple(f"n_{t}_{o}" for t in PAIR_TAGS for o in OUTCOME_TAGS)

FIELD_TYPES: dict[str, type] = {
    "model": str,
    "state": str,
    "lambda_mix": float,
    "sigma": float,
    "sigma_b": float,
    "eps": float,
    "strategy": str,
    "seed": int,
    "events": int,
    "restarts": int,
    **{f: float for f in ANGLE_FIELDS},
    **{f: float for f in TERM_FIELDS},
    "S": float,
    "S_exact": float,
    "stderr": float,
    "prefactor": float,
    "prefactor_ratio": float,
    **{f: int for f in COUNT_FIELDS},
}
FIELDS = tuple(FIELD_TYPES)


class InvariantFailure(RuntimeError):
    pass


def _model_fields(cfg: ExperimentConfig) -> dict:
    sb = cfg.sigma if cfg.sigma_b is None else cfg.sigma_b
    rec = dict.fromkeys(FIELDS)
    rec["model"] = cfg.model
    if cfg.model != "lhv":
        rec["state"] = cfg.state
    else:
        rec["strategy"] = cfg.strategy
    if cfg.model == "werner":
        rec["lambda_mix"] = cfg.lambda_mix
    if cfg.model in ("model1", "model3"):
        rec["sigma"], rec["sigma_b"], rec["eps"] = cfg.sigma, sb, cfg.eps
        if cfg.model == "model1" and cfg.eps is None:
            rec["eps"] = sb / 100
    rec["seed"] = cfg.seed
    rec["events"] = cfg.events
    return rec


def _ceiling(model) -> float:
    return LHV_CEILING if model.name.startswith("lhv") else QM_CEILING


def run_chsh(cfg: ExperimentConfig, _optimum_cache: Optional[dict] = None) -> dict:
    """One record for ``cfg``: exact when ``events`` is unset, sampled otherwise."""
    q = resolve_settings(cfg)
    model = build_model(cfg, q)
    rec = _model_fields(cfg)
    if q is None:
        key = replace(cfg, events=None, out=None, format=None)
        cache = {} if _optimum_cache is None else _optimum_cache
        if key not in cache:
            cache[key] = maximize_chsh(model, restarts=cfg.restarts, seed=cfg.seed).settings
        q = cache[key]
        rec["restarts"] = cfg.restarts
    exact = chsh_exact(model, q)
    if abs(exact.S) > _ceiling(model) + BOUND_TOL:
        raise InvariantFailure(f"{model.name}: |S| = {abs(exact.S)!r} exceeds {_ceiling(model)!r}")
    result = exact
    if cfg.events is not None:
        try:
            counts = simulate_events(model, q, cfg.events, seed=cfg.seed, workers=cfg.workers)
        except ValueError as e:
            raise InvariantFailure(str(e)) from None
        if np.any(counts.n_tot == 0):
            raise InvariantFailure("setting pair without coincidences")
        result = chsh_from_counts(counts)
        for f, v in zip(COUNT_FIELDS, counts.counts.ravel()):
            rec[f] = int(v)
    if result.S != chsh_value(result.terms):
        raise InvariantFailure("stored S differs from the signed sum of its terms")
    rec.update(zip(ANGLE_FIELDS, q.degrees()))
    rec.update(zip(TERM_FIELDS, result.terms))
    rec["S"] = result.S
    rec["S_exact"] = exact.S
    rec["stderr"] = result.stderr
    if cfg.model in ("model1", "model3"):
        rec["prefactor"] = model.constant.value
        rec["prefactor_ratio"] = model.constant.value / _prefactor_limit(model)
    return {k: None if v is None else FIELD_TYPES[k](v) for k, v in rec.items()}


def scan_values(cfg: ExperimentConfig) -> list:
    if cfg.param is None or cfg.start is None or cfg.stop is None:
        raise ConfigError("scan needs 'param', 'start' and 'stop'")
    if cfg.log:
        if not (cfg.start > 0 and cfg.stop > 0):
            raise ConfigError("field 'start'/'stop': log sweeps need positive bounds")
        vals = np.geomspace(cfg.start, cfg.stop, cfg.points)
    else:
        vals = np.linspace(cfg.start, cfg.stop, cfg.points)
    out = []
    for v in vals:
        try:
            out.append(PARSERS[cfg.param](repr(float(round(v)) if cfg.param == "events" else float(v))))
        except ValueError as e:
            raise ConfigError(f"field {cfg.param!r}: sweep point {v!r} {e}") from None
    return out


def run_scan(cfg: ExperimentConfig) -> list[dict]:
    cache: dict = {}
    return [run_chsh(replace(cfg, **{cfg.param: v}), cache) for v in scan_values(cfg)]


def emit_records(records, fmt: str) -> str:
    if fmt == "jsonl":
        return "".join(json.dumps({k: r.get(k) for k in FIELDS}, allow_nan=False) + "\n" for r in records)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in records:
        w.writerow(["" if r.get(k) is None else repr(r[k]) if isinstance(r[k], float) else r[k] for k in FIELDS])
    return buf.getvalue()


def parse_records(text: str, fmt: str) -> list[dict]:
    if fmt == "jsonl":
        recs = [json.loads(line) for line in text.splitlines() if line.strip()]
        for r in recs:
            for k, t in FIELD_TYPES.items():
                if r.get(k) is not None:
                    r[k] = t(r[k])
        return recs
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != FIELDS:
        raise ValueError("CSV header does not match the record schema")
    return [{k: (None if v == "" else FIELD_TYPES[k](v)) for k, v in zip(FIELDS, row)} for row in rows[1:]]


# ------------------------------------------------------------------ main


def _add_config_flags(p: argparse.ArgumentParser, scan: bool = False) -> None:
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--model", help=f"one of {', '.join(MODELS)}")
    p.add_argument("--state", help="PhiPlus, PhiMinus, PsiPlus or PsiMinus")
    p.add_argument("--lambda-mix", dest="lambda_mix")
    p.add_argument("--sigma", help="width of the first density")
    p.add_argument("--sigma-b", dest="sigma_b", help="width of the second density (default: sigma)")
    p.add_argument("--eps", help="width of the regularized delta")
    p.add_argument("--strategy", help=f"lhv strategy: {', '.join(STRATEGIES)}")
    p.add_argument("--settings", help="'optimize', 'standard' or 8 angles in degrees: a, a', b, b' as theta,phi pairs")
    p.add_argument("--events", help="events per setting pair; exact values if omitted")
    p.add_argument("--seed")
    p.add_argument("--restarts", help="optimizer restarts")
    p.add_argument("--workers", help="sampling threads")
    p.add_argument("--out", help="output file (.jsonl or .csv)")
    p.add_argument("--format", help="jsonl or csv")
    if scan:
        p.add_argument("--param", help=f"swept field: {', '.join(SCAN_PARAMS)}")
        p.add_argument("--start")
        p.add_argument("--stop")
        p.add_argument("--points")
        p.add_argument("--log", action="store_const", const="true", default=None)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chshlab", description="CHSH correlation models")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run the invariant suites")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--only", nargs="+", metavar="SUITE", help="run a subset of suites")
    _add_config_flags(sub.add_parser("chsh", help="CHSH value for one configuration"))
    _add_config_flags(sub.add_parser("scan", help="CHSH values along a parameter sweep"), scan=True)
    sub.add_parser("models", help="list models and their parameters")
    return p


def _write(cfg: ExperimentConfig, records, stdout) -> None:
    text = emit_records(records, output_format(cfg))
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        stdout.write(text)


def _cmd_verify(args, stdout, bell_vector_fn=None) -> int:
    from .algebra import bell_vector
    from .verify import SUITES, format_report, run_suites

    unknown = [n for n in (args.only or []) if n not in SUITES]
    if unknown:
        print(f"chshlab: unknown suite(s) {', '.join(unknown)}; choose from {', '.join(SUITES)}", file=sys.stderr)
        return CONFIG_ERROR
    reports = run_suites(args.seed, bell_vector_fn or bell_vector, args.only)
    print(format_report(reports), file=stdout)
    return OK if all(r.passed for r in reports) else INVARIANT_FAILURE


def _cmd_models(stdout) -> int:
    for name, desc in MODELS.items():
        print(f"{name:<8} {desc}", file=stdout)
    defaults = ExperimentConfig()
    print("\nparameters (default):", file=stdout)
    for f in fields(ExperimentConfig):
        if f.name in ("model", "out", "format", "param", "start", "stop", "points", "log"):
            continue
        print(f"  {f.name:<11} {getattr(defaults, f.name)!r}", file=stdout)
    print(f"\nstates: {', '.join(s.value for s in BellState)}", file=stdout)
    print(f"lhv strategies: {', '.join(STRATEGIES)}", file=stdout)
    return OK


def main(argv=None, stdout=None, bell_vector_fn=None) -> int:
    """Entry point; ``bell_vector_fn`` is a test hook forwarded to ``verify``."""
    stdout = stdout or sys.stdout
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command == "verify":
        return _cmd_verify(args, stdout, bell_vector_fn)
    if args.command == "models":
        return _cmd_models(stdout)
    try:
        overrides = {k: v for k, v in vars(args).items() if k in PARSERS}
        cfg = load_config(args.config, overrides)
        if args.command == "scan":
            scan_values(cfg)
            records = run_scan(cfg)
        else:
            records = [run_chsh(cfg)]
    except ConfigError as e:
        print(f"chshlab: config error: {e}", file=sys.stderr)
        return CONFIG_ERROR
    except InvariantFailure as e:
        print(f"chshlab: invariant failure: {e}", file=sys.stderr)
        return INVARIANT_FAILURE
    _write(cfg, records, stdout)
    return OK


if __name__ == "__main__":
    sys.exit(main())
