"""Command-line front end.

Subcommands:
  mean-experiment     variance benchmark of the mixed estimator vs threshold sampling
  median-experiment   RMSE benchmark for private medians over privacy-mix ratios
  variance-curves     closed-form subsampling and threshold variance profiles
  weights             per-group variances and mixing weights as a table
  version             print the package version

Configs are flat ``key = value`` text files; see ``parse_config_text``.
Exit codes: 0 success, 2 configuration problem, 3 output I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import subsampling_variance_curve, threshold_variance_curve
from .baselines import ThresholdStrategy
from .errors import EmptyInputError, InvalidParameterError
from .estimators import (
    PUBLIC,
    PrivacyGroup,
    group_variance,
    is_public,
    joint_variance,
    optimal_weights,
)
from .harness import (
    ExperimentConfig,
    MethodSpec,
    Statistic,
    Sweep,
    run_experiment,
    write_results_csv,
)

OUTPUT_DIR_ENV = "HETDP_OUTPUT_DIR"

DEFAULT_MEAN_METHODS = (
    MethodSpec.mixed(),
    MethodSpec.pdp_sample(ThresholdStrategy.minimum()),
    MethodSpec.pdp_sample(ThresholdStrategy.optimized()),
    MethodSpec.pdp_sample(ThresholdStrategy.average()),
    MethodSpec.pdp_sample(ThresholdStrategy.maximum()),
)
DEFAULT_MEDIAN_SCENARIOS = ((0.1, 1.0), (0.01, 10.0))

CURVE_CSV_HEADER = ("curve", "parameter", "parameter_value", "variance")


class ConfigError(Exception):
    """Anything wrong with a config file: missing, unparsable, or invalid."""


def parse_config_text(text: str) -> dict:
    """Parse a flat ``key = value`` config into a string map.

    Blank lines and ``#`` comments are skipped; keys may not repeat.
    """
    entries: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value in {raw!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def _parse_float(entries, key, default=None):
    if key not in entries:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return float(entries[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: not a number: {entries[key]!r}") from None


def _parse_int(entries, key, default=None):
    if key not in entries:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return int(entries[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: not an integer: {entries[key]!r}") from None


def _parse_list(value: str):
    return [item.strip() for item in value.split(",") if item.strip()]


def _parse_epsilon(token: str):
    if token.lower() == "public":
        return PUBLIC
    try:
        return float(token)
    except ValueError:
        raise ConfigError(f"epsilon must be a number or 'public', got {token!r}") from None


def _parse_statistic(entries) -> Statistic:
    token = entries.get("statistic", "mean")
    if token == "mean":
        return Statistic.mean()
    if token.startswith("quantile:"):
        try:
            q = float(token.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad quantile level in {token!r}") from None
        try:
            return Statistic.quantile(q)
        except InvalidParameterError as exc:
            raise ConfigError(str(exc)) from None
    raise ConfigError(f"statistic must be 'mean' or 'quantile:<q>', got {token!r}")


def _parse_method(token: str) -> MethodSpec:
    if token == "mixed":
        return MethodSpec.mixed()
    if token.startswith("pdp_sample:"):
        spec = token.split(":", 1)[1]
        if spec.startswith("fixed="):
            try:
                return MethodSpec.pdp_sample(ThresholdStrategy.fixed(float(spec[len("fixed=") :])))
            except (ValueError, InvalidParameterError) as exc:
                raise ConfigError(f"bad fixed threshold in {token!r}: {exc}") from None
        try:
            return MethodSpec.pdp_sample(ThresholdStrategy(spec))
        except InvalidParameterError as exc:
            raise ConfigError(str(exc)) from None
    raise ConfigError(f"method must be 'mixed' or 'pdp_sample:<strategy>', got {token!r}")


def _parse_sweep(entries) -> Sweep | None:
    if "sweep" not in entries:
        return None
    token = entries["sweep"]
    if ":" not in token:
        raise ConfigError(f"sweep must look like 'name: v1, v2, ...', got {token!r}")
    name, values = (part.strip() for part in token.split(":", 1))
    try:
        grid = tuple(float(v) for v in _parse_list(values))
        return Sweep(name, grid)
    except (ValueError, InvalidParameterError) as exc:
        raise ConfigError(f"bad sweep {token!r}: {exc}") from None


def _parse_scenarios(entries):
    if "scenarios" not in entries:
        return None
    pairs = []
    for token in _parse_list(entries["scenarios"]):
        parts = token.split("/")
        if len(parts) != 2:
            raise ConfigError(f"scenario must look like 'eps_high/eps_low', got {token!r}")
        try:
            pairs.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise ConfigError(f"bad scenario epsilons in {token!r}") from None
    if not pairs:
        raise ConfigError("scenarios key present but empty")
    return tuple(pairs)


def load_experiment_config(path, seed_override=None, trials_override=None):
    """Load a config file into an ExperimentConfig plus optional scenario list."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    entries = parse_config_text(path.read_text(encoding="utf-8"))

    if "group_sizes" not in entries:
        raise ConfigError("missing required key 'group_sizes'")
    try:
        sizes = tuple(int(v) for v in _parse_list(entries["group_sizes"]))
    except ValueError:
        raise ConfigError(f"bad group_sizes: {entries['group_sizes']!r}") from None
    if "epsilons" not in entries:
        raise ConfigError("missing required key 'epsilons'")
    epsilons = tuple(_parse_epsilon(v) for v in _parse_list(entries["epsilons"]))

    domain_tokens = _parse_list(entries.get("domain", ""))
    if len(domain_tokens) != 2:
        raise ConfigError("key 'domain' must give two comma-separated bounds")
    try:
        bounds = (float(domain_tokens[0]), float(domain_tokens[1]))
    except ValueError:
        raise ConfigError(f"bad domain bounds: {entries['domain']!r}") from None

    methods = tuple(_parse_method(tok) for tok in _parse_list(entries.get("methods", "mixed")))

    try:
        config = ExperimentConfig(
            group_sizes=sizes,
            epsilons=epsilons,
            mu=_parse_float(entries, "mu", 0.0),
            sigma2=_parse_float(entries, "sigma2"),
            domain_bounds=bounds,
            trials=trials_override if trials_override is not None else _parse_int(entries, "trials", 1),
            seed=seed_override if seed_override is not None else _parse_int(entries, "seed", 0),
            statistic=_parse_statistic(entries),
            methods=methods,
            sweep=_parse_sweep(entries),
            rmse_reference=entries.get("rmse_reference", "population"),
        )
    except (InvalidParameterError, EmptyInputError) as exc:
        raise ConfigError(str(exc)) from None
    return config, _parse_scenarios(entries)


def _resolve_output(args, default_name: str) -> Path:
    if args.out is not None:
        return Path(args.out)
    base = os.environ.get(OUTPUT_DIR_ENV, ".")
    return Path(base) / default_name


def _write_rows(rows, out_path: Path, meta: dict) -> None:
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_results_csv(rows, out_path)
    meta_path = out_path.with_name(out_path.name + ".meta.json")
    meta_path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _config_meta(config: ExperimentConfig) -> dict:
    return {
        "group_sizes": list(config.group_sizes),
        "epsilons": ["public" if is_public(e) else e for e in config.epsilons],
        "mu": config.mu,
        "sigma2": config.sigma2,
        "domain_bounds": list(config.domain_bounds),
        "trials": config.trials,
        "seed": config.seed,
        "statistic": config.statistic.kind
        + ("" if config.statistic.q is None else f":{config.statistic.q}"),
        "methods": [m.label for m in config.methods],
        "sweep": None if config.sweep is None else [config.sweep.name, list(config.sweep.values)],
        "rmse_reference": config.rmse_reference,
    }


def cmd_mean_experiment(args) -> int:
    config, _ = load_experiment_config(args.config, args.seed, args.trials)
    if config.statistic.kind != "mean":
        raise ConfigError("mean-experiment needs 'statistic = mean'")
    if not any(m.kind == "pdp_sample" for m in config.methods):
        config = replace(config, methods=DEFAULT_MEAN_METHODS)
    rows = run_experiment(config)
    out = _resolve_output(args, "mean_experiment.csv")
    meta = {
        "command": "mean-experiment",
        "config": _config_meta(config),
        "notes": {
            "sweep_n": "the 'n' sweep replaces the size of the first group",
            "domain_bounds": "clamping bounds are a config choice; results depend on them",
        },
    }
    _write_rows(rows, out, meta)
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def cmd_median_experiment(args) -> int:
    config, scenarios = load_experiment_config(args.config, args.seed, args.trials)
    if config.statistic.kind != "quantile":
        raise ConfigError("median-experiment needs 'statistic = quantile:<q>'")
    if len(config.group_sizes) != 2:
        raise ConfigError("median-experiment needs exactly two groups (high/low privacy)")
    if scenarios is None:
        scenarios = DEFAULT_MEDIAN_SCENARIOS
    rows = []
    for eps_high, eps_low in scenarios:
        try:
            scenario_config = replace(config, epsilons=(eps_high, eps_low))
        except InvalidParameterError as exc:
            raise ConfigError(str(exc)) from None
        tag = f"eps_high={eps_high:g};eps_low={eps_low:g}"
        for row in run_experiment(scenario_config):
            row.method = f"{row.method};{tag}"
            rows.append(row)
    out = _resolve_output(args, "median_experiment.csv")
    meta = {
        "command": "median-experiment",
        "config": _config_meta(config),
        "scenarios": [list(pair) for pair in scenarios],
        "notes": {
            "low_privacy_share": "share of the fixed total assigned to the loosest-epsilon group",
            "rmse_reference": config.rmse_reference,
            "ratio_grid_and_bounds": "ratio grid, clamping bounds and the RMSE reference are artifact choices",
        },
    }
    _write_rows(rows, out, meta)
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def _write_curves_csv(rows, path: Path) -> None:
    import csv as _csv

    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = _csv.writer(handle, lineterminator="\n")
        writer.writerow(CURVE_CSV_HEADER)
        for curve, parameter, value, variance in rows:
            writer.writerow([curve, parameter, "%.17g" % value, "%.17g" % variance])


def cmd_variance_curves(args) -> int:
    config, _ = load_experiment_config(args.config, args.seed, args.trials)
    domain = config.domain
    groups = [PrivacyGroup(np.zeros(n), e) for n, e in zip(config.group_sizes, config.epsilons)]

    private = [(g.n, float(g.epsilon)) for g in groups if not is_public(g.epsilon)]
    if not private:
        raise ConfigError("variance-curves needs at least one group with a finite epsilon")
    m, epsilon = max(private)  # largest private group drives the subsampling curve
    p_grid = np.round(np.linspace(0.1, 1.0, 10), 10)
    plain = subsampling_variance_curve(m, domain.sigma2, domain.r, epsilon, p_grid, False)
    amplified = subsampling_variance_curve(m, domain.sigma2, domain.r, epsilon, p_grid, True)

    finite = sorted(eps for _, eps in private)
    if finite[0] == finite[-1]:
        t_grid = np.geomspace(finite[0] / 20.0, finite[0] * 20.0, 200)
    else:
        t_grid = np.geomspace(finite[0], finite[-1], 200)
    threshold = threshold_variance_curve(groups, domain, t_grid)
    mixed_reference = joint_variance(optimal_weights(groups, domain), groups, domain)

    rows = []
    rows += [("subsampled_no_amplification", "p", p, v) for p, v in zip(plain.grid, plain.variance)]
    rows += [("subsampled_amplified", "p", p, v) for p, v in zip(amplified.grid, amplified.variance)]
    rows += [("pdp_predicted", "t", t, v) for t, v in zip(threshold.grid, threshold.variance)]
    rows += [("mixed_optimal", "t", t, mixed_reference) for t in threshold.grid]

    out = _resolve_output(args, "variance_curves.csv")
    _write_curves_csv(rows, out)
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def cmd_weights(args) -> int:
    config, _ = load_experiment_config(args.config, args.seed, args.trials)
    domain = config.domain
    groups = [PrivacyGroup(np.zeros(n), e) for n, e in zip(config.group_sizes, config.epsilons)]
    if not groups:
        raise ConfigError("weights needs at least one group")
    weights = optimal_weights(groups, domain)
    print(f"{'group':>5} {'n':>8} {'epsilon':>10} {'variance':>14} {'raw_weight':>14} {'weight':>10}")
    for i, (group, beta) in enumerate(zip(groups, weights.beta)):
        variance = group_variance(group, domain)
        eps_text = "public" if is_public(group.epsilon) else f"{float(group.epsilon):g}"
        print(f"{i:>5} {group.n:>8} {eps_text:>10} {variance:>14.6g} {1.0 / variance:>14.6g} {beta:>10.6f}")
    print(f"joint variance at optimal weights: {joint_variance(weights, groups, domain):.6g}")
    return 0


def cmd_version(args) -> int:
    print(__version__)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetdp",
        description="Benchmarks for private estimation with heterogeneous privacy budgets.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_common(sub):
        sub.add_argument("--config", required=True, help="path to a key = value config file")
        sub.add_argument("--out", default=None, help=f"output file (default: ${OUTPUT_DIR_ENV} or cwd)")
        sub.add_argument("--seed", type=int, default=None, help="override the config seed")
        sub.add_argument("--trials", type=int, default=None, help="override the config trial count")

    sub = subparsers.add_parser("mean-experiment", help="variance benchmark for the mean")
    add_common(sub)
    sub.set_defaults(func=cmd_mean_experiment)

    sub = subparsers.add_parser("median-experiment", help="RMSE benchmark for the median")
    add_common(sub)
    sub.set_defaults(func=cmd_median_experiment)

    sub = subparsers.add_parser("variance-curves", help="closed-form variance profiles")
    add_common(sub)
    sub.set_defaults(func=cmd_variance_curves)

    sub = subparsers.add_parser("weights", help="print per-group variances and mixing weights")
    add_common(sub)
    sub.set_defaults(func=cmd_weights)

    sub = subparsers.add_parser("version", help="print the package version")
    sub.set_defaults(func=cmd_version)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (InvalidParameterError, EmptyInputError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
