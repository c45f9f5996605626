"""Experiment execution: dispatch, result tables, summaries, run manifests.

Outputs per run directory:

  results.csv    one row per trial; fixed columns trial_id, protocol, then
                 truth_*, estimate_*, error_*, diagnostics_* (units in a
                 leading '#' comment line); floats carry 17 significant
                 digits so identical runs are byte-identical
  summary.json   aggregate statistics (means, RMS, CIs) per error key
  manifest.json  reproducibility record: config hash, seed, trial counts,
                 RNG algorithm identifier, artifact version, output names

Sweeps vary one named parameter over a grid and emit sweep.csv instead of
results.csv: one plot-ready row per grid point.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import ScenarioConfig
from .errors import ConfigError
from .protocols import Protocol, compare_equivalence, run_trials
from .rng import RNG_ALGORITHM

ARTIFACT_VERSION = "0.1.0"

SUBCOMMANDS = ("qcs", "beat", "syntonize", "esct", "compare", "sweep")

PROTOCOL_BY_NAME = {
    "qcs": Protocol.QCS_BASIC,
    "beat": Protocol.QCS_BEAT,
    "syntonize": Protocol.QCS_SYNTONIZE,
    "esct": Protocol.ESCT_BASELINE,
}

#: Error key each protocol is judged on.
PRIMARY_ERROR_KEY = {
    "qcs": "time_offset",
    "beat": "time_offset",
    "syntonize": "rate_offset",
    "esct": "time_offset",
}

_UNITS_COMMENT = (
    "# units: *_time_offset s, *_rate_offset dimensionless, theta*/sigma_theta/"
    "phi_common* rad, sigma_time s, sigma_rate dimensionless, counts dimensionless"
)


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def config_sha256(cfg: ScenarioConfig) -> str:
    canonical = json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _ordered_union(results, group):
    keys: list[str] = []
    for r in results:
        for k in sorted(getattr(r, group)):
            if k not in keys:
                keys.append(k)
    return keys


def write_results_csv(path, results):
    """One row per trial, merged in trial_id order."""
    groups = ("truth", "estimate", "error", "diagnostics")
    columns = [(g, k) for g in groups for k in _ordered_union(results, g)]
    header = ["trial_id", "protocol"] + [f"{g}_{k}" for g, k in columns]
    lines = [_UNITS_COMMENT, ",".join(header)]
    for r in results:
        row = [str(r.trial_id), r.protocol.value]
        for g, k in columns:
            value = getattr(r, g).get(k)
            row.append("" if value is None else _fmt(value))
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def summarize_trials(results) -> dict:
    """Aggregate per-error-key statistics plus mean diagnostics."""
    n = len(results)
    metrics = {}
    for key in _ordered_union(results, "error"):
        errs = np.array([r.error[key] for r in results])
        std = float(np.std(errs, ddof=1)) if n > 1 else 0.0
        metrics[key] = {
            "mean": float(np.mean(errs)),
            "std": std,
            "rms": float(np.sqrt(np.mean(errs**2))),
            "min": float(np.min(errs)),
            "max": float(np.max(errs)),
            "ci95_halfwidth": 1.959963984540054 * std / math.sqrt(n) if n > 1 else 0.0,
        }
    mean_diag = {
        key: float(np.mean([r.diagnostics[key] for r in results]))
        for key in _ordered_union(results, "diagnostics")
    }
    return {"trials": n, "metrics": metrics, "mean_diagnostics": mean_diag}


def _write_json(path, payload):
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record: everything needed to regenerate a run's bytes."""

    subcommand: str
    config_sha256: str
    seed: int
    trials: dict[str, int]
    outputs: dict[str, str]
    artifact_version: str = ARTIFACT_VERSION
    rng_algorithm: str = RNG_ALGORITHM
    sweep: dict | None = field(default=None)

    def to_dict(self) -> dict:
        return asdict(self)


def _manifest(subcommand, cfg, seed, trials_by_protocol, outputs, sweep=None) -> RunManifest:
    return RunManifest(
        subcommand=subcommand,
        config_sha256=config_sha256(cfg),
        seed=seed,
        trials=trials_by_protocol,
        outputs=outputs,
        sweep=sweep,
    )


# -- sweep parameter plumbing ------------------------------------------------


def apply_sweep_value(cfg: ScenarioConfig, param: str, value: float) -> ScenarioConfig:
    """Return a copy of cfg with one named parameter set to `value`.

    `param` is a dotted path into the config document (e.g. transport.alpha,
    clock_b.y, trip.jitter, transport.beta_by_species.cs, ensemble_size), or
    one of the matched pseudo-parameters used for compare runs:

      matched_alpha    sets trip.alpha and transport.alpha together
      matched_jitter   sets trip.jitter and transport.sigma_common together
                       (sigma_common = jitter * omega of the first species)
    """
    doc = cfg.to_dict()
    if param == "matched_alpha":
        doc["trip"]["alpha"] = value
        doc["transport"]["alpha"] = value
    elif param == "matched_jitter":
        omega = next(iter(doc["species"].values()))
        doc["trip"]["jitter"] = value
        doc["transport"]["sigma_common"] = value * omega
    else:
        node = doc
        parts = param.split(".")
        for part in parts[:-1]:
            if not isinstance(node, dict) or part not in node:
                raise ConfigError(f"unknown sweep parameter {param!r}")
            node = node[part]
        leaf = parts[-1]
        if not isinstance(node, dict) or leaf not in node:
            raise ConfigError(f"unknown sweep parameter {param!r}")
        node[leaf] = type(node[leaf])(value) if isinstance(node[leaf], int) else value
    return ScenarioConfig.from_dict(doc)


def run_sweep(protocol_name, cfg, seed, trials, out_dir, param, values) -> dict:
    """Run one protocol per grid point; emit a plot-ready table."""
    rows = []
    for value in values:
        cfg_v = apply_sweep_value(cfg, param, value)
        if protocol_name == "compare":
            summary = compare_equivalence(cfg_v, seed=seed, trials=trials)
            rows.append({
                "param": param,
                "value": value,
                "trials": summary["trials"],
                "rms_qcs": summary["rms_qcs"],
                "rms_esct": summary["rms_esct"],
                "ratio": summary["ratio"],
            })
        else:
            results = run_trials(PROTOCOL_BY_NAME[protocol_name], cfg_v, seed, trials)
            key = PRIMARY_ERROR_KEY[protocol_name]
            stats = summarize_trials(results)["metrics"][key]
            rows.append({
                "param": param,
                "value": value,
                "trials": len(results),
                "metric": f"error_{key}",
                "mean_error": stats["mean"],
                "rms_error": stats["rms"],
                "ci95_halfwidth": stats["ci95_halfwidth"],
            })

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = list(rows[0].keys())
    lines = [_UNITS_COMMENT, ",".join(header)]
    for row in rows:
        lines.append(",".join("" if row[k] is None else _fmt(row[k]) for k in header))
    (out / "sweep.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    summary = {"protocol": protocol_name, "param": param, "points": rows}
    _write_json(out / "summary.json", summary)
    manifest = _manifest(
        "sweep", cfg, seed,
        {protocol_name: trials},
        {"sweep": "sweep.csv", "summary": "summary.json"},
        sweep={"param": param, "values": list(values), "protocol": protocol_name},
    )
    _write_json(out / "manifest.json", manifest.to_dict())
    return summary


# -- top-level entry ----------------------------------------------------------


def run_experiment(
    subcommand: str,
    cfg: ScenarioConfig,
    out_dir,
    seed=None,
    trials=None,
    protocol: str | None = None,
    sweep_param: str | None = None,
    sweep_values: Sequence[float] | None = None,
) -> dict:
    """Execute one subcommand and write results/summary/manifest to out_dir.

    Returns the summary record. Raises ConfigError/ValueError for invalid
    configurations or arguments (CLI exit 2) and lets I/O errors propagate
    (CLI exit 3).
    """
    if subcommand not in SUBCOMMANDS:
        raise ValueError(f"unknown subcommand {subcommand!r}")
    seed = cfg.seed if seed is None else int(seed)
    trials = cfg.trials if trials is None else int(trials)
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")

    if subcommand == "sweep":
        if protocol is None or protocol not in ("compare", *PROTOCOL_BY_NAME):
            raise ConfigError("sweep requires a valid --protocol")
        if not sweep_param or not sweep_values:
            raise ConfigError("sweep requires --sweep-param and --sweep-values")
        return run_sweep(protocol, cfg, seed, trials, out_dir, sweep_param, list(sweep_values))
    if sweep_param or sweep_values:
        # sweep flags on a protocol subcommand reroute to the sweep runner
        if not sweep_param or not sweep_values:
            raise ConfigError("--sweep-param and --sweep-values must be given together")
        return run_sweep(subcommand, cfg, seed, trials, out_dir, sweep_param, list(sweep_values))

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if subcommand == "compare":
        summary = compare_equivalence(cfg, seed=seed, trials=trials, keep_trials=True)
        results = summary.pop("trials_qcs") + summary.pop("trials_esct")
        trials_by_protocol = {"qcs": trials, "esct": trials}
    else:
        results = run_trials(PROTOCOL_BY_NAME[subcommand], cfg, seed, trials)
        summary = summarize_trials(results)
        trials_by_protocol = {subcommand: trials}
    summary = {"subcommand": subcommand, "seed": seed, **summary}

    write_results_csv(out / "results.csv", results)
    _write_json(out / "summary.json", summary)
    manifest = _manifest(
        subcommand, cfg, seed, trials_by_protocol,
        {"results": "results.csv", "summary": "summary.json"},
    )
    _write_json(out / "manifest.json", manifest.to_dict())
    return summary
