"""Config-driven experiment runs and plot-data output."""

import json
import math
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import certify as cert
from .generators import GenSpec, generate
from .graph import RegularGraph
from .percolate import census_csv, fmt_float, trial_census
from .sprinkle import sprinkle_csv, sprinkle_trials
from .theory import TheoryParams, default_delta, theorem_constants

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt(conv):
    def parse(text):
        return None if text.strip().lower() in ("", "none") else conv(text)
    return parse


@dataclass
class ExperimentConfig:
    graph: str = None
    gen_model: str = None
    gen_n: int = None
    gen_d: int = None
    gen_seed: int = 0
    lam: float = 1.5
    delta: float = None
    c: float = 0.1
    C: float = 3.0
    alpha: float = 0.02
    b: float = 0.0
    trials: int = 20
    sprinkle_trials: int = 0
    seed: int = 0
    out_dir: str = "."
    certify_spectral: bool = False
    certify_exact_expansion: bool = False
    certify_local_k: int = None
    certify_cycle_spacing: int = None
    certify_cycle_free_radius: int = None
    spread_radius: int = None
    gap_low: float = None
    gap_high: float = None
    workers: int = field(default=0, metadata={"echo": False})


# config-file key -> (field name, parser)
_KEYS = {
    "graph": ("graph", _opt(str)),
    "gen_model": ("gen_model", _opt(str)),
    "gen_n": ("gen_n", _opt(int)),
    "gen_d": ("gen_d", _opt(int)),
    "gen_seed": ("gen_seed", int),
    "lambda": ("lam", float),
    "delta": ("delta", _opt(float)),
    "c": ("c", float),
    "C": ("C", float),
    "alpha": ("alpha", float),
    "b": ("b", float),
    "trials": ("trials", int),
    "sprinkle_trials": ("sprinkle_trials", int),
    "seed": ("seed", int),
    "out_dir": ("out_dir", str),
    "certify_spectral": ("certify_spectral", _bool),
    "certify_exact_expansion": ("certify_exact_expansion", _bool),
    "certify_local_k": ("certify_local_k", _opt(int)),
    "certify_cycle_spacing": ("certify_cycle_spacing", _opt(int)),
    "certify_cycle_free_radius": ("certify_cycle_free_radius", _opt(int)),
    "spread_radius": ("spread_radius", _opt(int)),
    "gap_low": ("gap_low", _opt(float)),
    "gap_high": ("gap_high", _opt(float)),
    "workers": ("workers", int),
}
_FIELD_TO_KEY = {name: key for key, (name, _) in _KEYS.items()}


def parse_config(text, base_dir="."):
    """Parse ``key = value`` lines; ``#`` starts a comment. Unknown keys are errors."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        name, conv = _KEYS[key]
        try:
            values[name] = conv(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    cfg = ExperimentConfig(**values)
    return resolve(cfg, base_dir)


def load_config(path):
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)


def resolve(cfg, base_dir="."):
    """Validate, fill defaults and make paths absolute."""
    base = Path(base_dir)
    env_out = os.environ.get("PERCOLAB_OUT_DIR")
    if env_out:
        cfg.out_dir = env_out
    cfg.out_dir = str((base / cfg.out_dir).resolve())
    if (cfg.graph is None) == (cfg.gen_model is None):
        raise ConfigError("give exactly one of graph or gen_model")
    if cfg.graph is not None:
        cfg.graph = str((base / cfg.graph).resolve())
        if not Path(cfg.graph).is_file():
            raise ConfigError(f"graph file not found: {cfg.graph}")
    elif cfg.gen_n is None or cfg.gen_d is None:
        raise ConfigError("gen_model needs gen_n and gen_d")
    if cfg.delta is None:
        cfg.delta = default_delta(cfg.lam)
    if cfg.trials < 0 or cfg.sprinkle_trials < 0:
        raise ConfigError("trial counts must be nonnegative")
    return cfg


def echo_config(cfg):
    lines = []
    for f in fields(cfg):
        if not f.metadata.get("echo", True):
            continue
        value = getattr(cfg, f.name)
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = fmt_float(value)
        elif value is None:
            text = "none"
        else:
            text = str(value)
        lines.append(f"{_FIELD_TO_KEY[f.name]} = {text}")
    return "\n".join(lines) + "\n"


def _graph_order(cfg):
    if cfg.graph is not None:
        with open(cfg.graph) as fh:
            n, d, _ = (int(x) for x in fh.readline().split())
        return n, d
    return cfg.gen_n, cfg.gen_d


def _load_graph(cfg):
    if cfg.graph is not None:
        return RegularGraph.read(cfg.graph)
    return generate(GenSpec(model=cfg.gen_model, n=cfg.gen_n, d=cfg.gen_d, seed=cfg.gen_seed))


def log_bins(sizes):
    """Counts of sizes in the bins [2^k, 2^(k+1) - 1]."""
    sizes = np.asarray(sizes, dtype=np.int64)
    if sizes.size == 0:
        return []
    k = np.floor(np.log2(sizes)).astype(np.int64)
    counts = np.bincount(k)
    return [(1 << i, (1 << (i + 1)) - 1, int(c)) for i, c in enumerate(counts.tolist()) if c]


def plot_data_text(census, theory_params):
    """Two whitespace-separated blocks: L1/n per trial, and a log-binned size histogram.

    ``census`` is a list of ``(TrialSummary, sizes)`` pairs.
    """
    y = theory_params.y if hasattr(theory_params, "y") else float(theory_params)
    out = [f"# y = {fmt_float(y)}", "# trial L1_over_n"]
    for summary, _ in census:
        out.append(f"{summary.trial} {fmt_float(summary.L1 / summary.n)}")
    out.append("")
    out.append("# size_low size_high count")
    all_sizes = np.concatenate([s for _, s in census]) if census else np.array([], dtype=np.int64)
    for lo, hi, count in log_bins(all_sizes):
        out.append(f"{lo} {hi} {count}")
    return "\n".join(out) + "\n"


def emit_plot_data(census, theory_params, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(plot_data_text(census, theory_params))


def _write(path, text):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def run_experiment(cfg, log=print):
    """Run theory, certification, percolation and sprinkling per ``cfg``.

    Writes into ``cfg.out_dir``: ``config.resolved``, ``report.json`` and,
    when trials are requested, ``percolate.csv``, ``sprinkle.csv`` and
    ``plot_data.txt``. Returns an exit status (0 ok, 1 a check failed).
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write(out / "config.resolved", echo_config(cfg))

    n, d = _graph_order(cfg)
    params = TheoryParams.from_lambda(d, cfg.lam)
    consts = theorem_constants(n, d, cfg.lam, c=cfg.c, C=cfg.C, alpha=cfg.alpha, b=cfg.b, delta=cfg.delta)
    gap_low = consts.gap_low if cfg.gap_low is None else cfg.gap_low
    gap_high = consts.gap_high if cfg.gap_high is None else cfg.gap_high
    report = {"theory": {"q": params.q, "y": params.y, **consts.as_dict()},
              "thresholds_used": {"gap_low": gap_low, "gap_high": gap_high}}
    failures = []

    wants_certify = (cfg.certify_spectral or cfg.certify_exact_expansion or cfg.certify_local_k
                     or cfg.certify_cycle_spacing or cfg.certify_cycle_free_radius)
    if cfg.trials or cfg.sprinkle_trials or wants_certify:
        g = _load_graph(cfg)
        if wants_certify:
            rep = cert.certify_graph(g, spectral=cfg.certify_spectral, exact=cfg.certify_exact_expansion,
                               local_k=cfg.certify_local_k, cycle_spacing=cfg.certify_cycle_spacing,
                               cycle_free_radius=cfg.certify_cycle_free_radius, c_values=(cfg.c,))
            report["certify"] = rep.to_dict()

        if cfg.trials:
            census = trial_census(g, params.p, cfg.trials, cfg.seed, gap_low=gap_low,
                                  gap_high=gap_high, workers=cfg.workers, keep_sizes=True)
            summaries = [s for s, _ in census]
            _write(out / "percolate.csv", census_csv(summaries))
            emit_plot_data(census, params, out / "plot_data.txt")
            bad_theorem = [s.trial for s in summaries
                           if abs(1 - s.L1 / (params.y * n)) > cfg.alpha or s.L2 > consts.small_cap]
            bad_gap = [s.trial for s in summaries if s.gap_violations]
            report["percolate"] = {"trials": cfg.trials, "theorem_failures": bad_theorem,
                                   "gap_failures": bad_gap}
            if bad_theorem:
                failures.append(f"percolate: theorem bound failed in trials {bad_theorem}")
            if bad_gap:
                failures.append(f"percolate: gap interval hit in trials {bad_gap}")

        if cfg.sprinkle_trials:
            sc = consts
            if cfg.gap_low is not None or cfg.gap_high is not None:
                sc = replace(consts, gap_low=gap_low, gap_high=gap_high)
            runs = sprinkle_trials(g, sc, params.y, cfg.sprinkle_trials, cfg.seed,
                                   spread_radius=cfg.spread_radius, workers=cfg.workers)
            _write(out / "sprinkle.csv", sprinkle_csv(runs))
            summary = {}
            for name in ("gap_ok", "merge_ok", "unique_ok", "theorem_ok", "w_monotone", "spread_ok"):
                summary[name] = [r.trial for r in runs if not getattr(r, name)]
            report["sprinkle"] = {"trials": cfg.sprinkle_trials, "failed_trials": summary,
                                  "spread_is_informational": True}
            for name, bad in summary.items():
                if bad and name != "spread_ok":
                    failures.append(f"sprinkle: {name} false in trials {bad}")

    report["failures"] = failures
    _write(out / "report.json", json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    for msg in failures:
        log(msg)
    return EXIT_CHECK_FAILED if failures else EXIT_OK


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj
