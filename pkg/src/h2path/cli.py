"""Command-line entry point: run, compare, sweep, and ledger dumps.

Exit codes: 0 on success, 1 for configuration problems, 2 for simulation
failures.  Reports are written atomically (temp file + rename) and contain
no timestamps, so identical inputs give byte-identical outputs.
"""

import argparse
import json
import os
import re
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .dispatch import simulate_year
from .econ import TABLE_HEADER, UndefinedLCOHError, annual_report
from .plantmodel import ConvergenceError
from .profiles import ProfileFormatError, WindProfile, load_farm_profiles, synth_profile
from .scenarios import (
    PRESET_IDS,
    ConfigError,
    ScenarioConfig,
    SweepSpec,
    evaluate,
    preset,
    sweep,
)

_PARAM_ALIASES = {
    "p_ppa": "p_ppa_multiplier",
    "pem_capex": "pem_capex_multiplier",
    "efficiency": "efficiency_uplift",
    "stack_life": "stack_life_hours",
}
# Multiplier parameters take --range as relative deltas around the base value.
_DELTA_RANGE_PARAMS = {"p_ppa_multiplier", "pem_capex_multiplier"}

OUT_ENV_VAR = "H2PATH_OUT"
DEFAULT_OUT = "results"


@dataclass
class RunConfig:
    """Parsed invocation: what to run, on which profile, where to write."""

    command: str
    scenario_source: str            # preset id or scenario file path
    is_file: bool
    profile_source: str             # file path or "synth:cf,seed"
    out_dir: Path
    overrides: list[str] = field(default_factory=list)
    jobs: int | None = None
    write_ledger: bool = False


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # accept range values with a leading minus, e.g. --range -0.8:0.3:0.1
        self._negative_number_matcher = re.compile(r"^-\d[\d.:,]*$|^-\.\d[\d.:,]*$")

    def error(self, message):  # route usage problems to exit code 1
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="h2path", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_common(p, scenario=True):
        if scenario:
            grp = p.add_mutually_exclusive_group(required=True)
            grp.add_argument("--preset", choices=PRESET_IDS, help="built-in configuration id")
            grp.add_argument("--scenario", help="scenario JSON file")
        p.add_argument(
            "--profile", required=True,
            help="wind profile: CSV path or synth:<cf>,<seed>",
        )
        p.add_argument(
            "--out", default=None,
            help=f"output directory (default ${OUT_ENV_VAR} or ./{DEFAULT_OUT})",
        )
        p.add_argument(
            "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
            help="override a scenario parameter, e.g. econ.p_ppa=0 (repeatable)",
        )
        p.add_argument("--jobs", type=int, default=None, help="worker pool size (default: cores)")

    p_run = sub.add_parser("run", help="evaluate one scenario")
    add_common(p_run)
    p_run.add_argument("--ledger", action="store_true", help="also dump the per-step ledger CSV")

    p_cmp = sub.add_parser("compare", help="evaluate several presets side by side")
    p_cmp.add_argument(
        "--presets", default="all",
        help="comma-separated preset ids, or 'all'",
    )
    add_common(p_cmp, scenario=False)

    p_swp = sub.add_parser("sweep", help="one-parameter sensitivity sweep")
    add_common(p_swp)
    p_swp.add_argument(
        "--param", required=True,
        help="p_ppa | pem_capex | efficiency | stack_life (or full parameter id)",
    )
    p_swp.add_argument(
        "--range", dest="value_range", default=None, metavar="LO:HI:STEP",
        help="relative deltas for price/capex (e.g. -0.8:0.3:0.1), absolute hours for stack_life",
    )
    p_swp.add_argument(
        "--values", default=None,
        help="comma-separated explicit values (final values, not deltas)",
    )

    p_dmp = sub.add_parser("dump-ledger", help="simulate and dump the per-step ledger")
    add_common(p_dmp)
    return parser


def _resolve_out(arg: str | None) -> Path:
    if arg:
        return Path(arg)
    return Path(os.environ.get(OUT_ENV_VAR, DEFAULT_OUT))


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _coerce(raw: str, old) -> object:
    if isinstance(old, bool):
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"expected a boolean, got {raw!r}")
    if isinstance(old, (int, float)) or old is None:
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"expected a number, got {raw!r}") from exc
    if isinstance(old, (list, tuple)):
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"expected JSON for {raw!r}") from exc
    return raw


def apply_overrides(config: ScenarioConfig, overrides: list[str]) -> ScenarioConfig:
    """Apply dotted key=value overrides, then re-validate the scenario."""
    if not overrides:
        config.validate()
        return config
    data = config.to_dict()
    for pair in overrides:
        key, sep, raw = pair.partition("=")
        if not sep:
            raise ConfigError(f"override {pair!r} must look like key=value")
        node = data
        parts = key.split(".")
        for part in parts[:-1]:
            if not isinstance(node, dict) or part not in node:
                raise ConfigError(f"unknown parameter {key!r}")
            node = node[part]
        leaf = parts[-1]
        if not isinstance(node, dict) or leaf not in node:
            raise ConfigError(f"unknown parameter {key!r}")
        node[leaf] = _coerce(raw, node[leaf])
    out = ScenarioConfig.from_dict(data)
    out.validate()
    return out


def _load_scenario(args) -> ScenarioConfig:
    if getattr(args, "scenario", None):
        cfg = ScenarioConfig.from_json(args.scenario)
    else:
        cfg = preset(args.preset)
    return apply_overrides(cfg, args.overrides)


def _load_profile_arg(source: str, rated_mw: float) -> WindProfile | list[WindProfile]:
    if source.startswith("synth:"):
        body = source[len("synth:"):]
        parts = body.split(",")
        if len(parts) != 2:
            raise ConfigError(f"--profile synth takes 'synth:<cf>,<seed>', got {source!r}")
        try:
            cf, seed = float(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ConfigError(f"bad synth profile spec {source!r}") from exc
        return synth_profile(cf, rated_mw, seed)
    farms = load_farm_profiles(source, rated_mw)
    return farms[0] if len(farms) == 1 else farms


def _report_csv(rows: list[tuple[str, ...]]) -> str:
    lines = [",".join(TABLE_HEADER)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def _cmd_run(args) -> int:
    cfg = _load_scenario(args)
    profile = _load_profile_arg(args.profile, cfg.plant.wind.rated_mw)
    out = _resolve_out(args.out)
    ledger = simulate_year(cfg, profile)
    report = annual_report(cfg, ledger)
    _write_atomic(out / f"{cfg.id}.csv", _report_csv([report.table_row()]))
    _write_atomic(out / f"{cfg.id}.json", json.dumps(report.to_dict(), indent=2) + "\n")
    if args.ledger:
        _write_atomic(out / f"{cfg.id}_ledger.csv", ledger.csv_text())
    print(f"wrote {out}/{cfg.id}.csv")
    return 0


def _cmd_compare(args) -> int:
    ids = PRESET_IDS if args.presets == "all" else tuple(
        s.strip() for s in args.presets.split(",") if s.strip()
    )
    scenarios = [apply_overrides(preset(i), args.overrides) for i in ids]
    profiles = [
        _load_profile_arg(args.profile, cfg.plant.wind.rated_mw) for cfg in scenarios
    ]
    jobs = args.jobs or os.cpu_count() or 1
    if jobs > 1 and len(scenarios) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(evaluate, scenarios, profiles))
    else:
        reports = [evaluate(cfg, prof) for cfg, prof in zip(scenarios, profiles)]
    out = _resolve_out(args.out)
    _write_atomic(out / "comparison.csv", _report_csv([r.table_row() for r in reports]))
    _write_atomic(
        out / "comparison.json",
        json.dumps([r.to_dict() for r in reports], indent=2) + "\n",
    )
    print(f"wrote {out}/comparison.csv ({len(reports)} rows)")
    return 0


def _parse_range(text: str) -> list[float]:
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise ConfigError(f"--range must be LO:HI:STEP, got {text!r}") from exc
    if step <= 0 or hi < lo:
        raise ConfigError(f"--range must ascend with a positive step, got {text!r}")
    n = int(round((hi - lo) / step))
    values = [round(lo + k * step, 10) for k in range(n + 1)]
    return [v for v in values if v <= hi + 1e-12]


def _sweep_values(param: str, args) -> tuple[float, ...]:
    if args.values and args.value_range:
        raise ConfigError("give either --values or --range, not both")
    if args.values:
        try:
            return tuple(float(v) for v in args.values.split(","))
        except ValueError as exc:
            raise ConfigError(f"bad --values {args.values!r}") from exc
    if args.value_range:
        if param == "efficiency_uplift":
            raise ConfigError("efficiency sweeps take --values, not --range")
        raw = _parse_range(args.value_range)
        if param in _DELTA_RANGE_PARAMS:
            return tuple(round(1.0 + v, 10) for v in raw)
        return tuple(raw)
    return SweepSpec.default(param).values


def _cmd_sweep(args) -> int:
    cfg = _load_scenario(args)
    param = _PARAM_ALIASES.get(args.param, args.param)
    spec = SweepSpec(param, _sweep_values(param, args))
    profile = _load_profile_arg(args.profile, cfg.plant.wind.rated_mw)
    points = sweep(cfg, spec, profile)
    out = _resolve_out(args.out)
    alias = args.param if args.param in _PARAM_ALIASES else param
    lines = ["parameter,value,lcoh_gbp_per_mwh,lcoh_gbp_per_kg"]
    lines.extend(
        f"{param},{p.value!r},{p.lcoh_per_mwh_hhv!r},{p.lcoh_per_kg!r}" for p in points
    )
    _write_atomic(out / f"sweep_{alias}.csv", "\n".join(lines) + "\n")
    payload = {
        "scenario": cfg.id,
        "parameter": param,
        "points": [
            {"value": p.value, "lcoh_gbp_per_mwh": p.lcoh_per_mwh_hhv,
             "lcoh_gbp_per_kg": p.lcoh_per_kg}
            for p in points
        ],
    }
    _write_atomic(out / f"sweep_{alias}.json", json.dumps(payload, indent=2) + "\n")
    print(f"wrote {out}/sweep_{alias}.csv ({len(points)} points)")
    return 0


def _cmd_dump_ledger(args) -> int:
    cfg = _load_scenario(args)
    profile = _load_profile_arg(args.profile, cfg.plant.wind.rated_mw)
    ledger = simulate_year(cfg, profile)
    out = _resolve_out(args.out)
    _write_atomic(out / f"{cfg.id}_ledger.csv", ledger.csv_text())
    print(f"wrote {out}/{cfg.id}_ledger.csv ({len(ledger)} steps)")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "compare": _cmd_compare,
    "sweep": _cmd_sweep,
    "dump-ledger": _cmd_dump_ledger,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except (ConvergenceError, UndefinedLCOHError) as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ProfileFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
