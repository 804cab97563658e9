"""Command-line front end: analyze one map, classify a point, sweep a family.

Single-map reports are JSON (nested), sweeps are CSV (tabular); every
scalar is emitted as an exact ``p/q`` string, so identical inputs and
configuration reproduce reports byte for byte.  Exit codes: 0 success,
2 invalid map, 3 precision exhausted, 4 cap exceeded; partial reports
carry a ``status`` field.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass

from .numerics import PrecisionExhausted, format_scalar, parse_scalar
from .maps import (
    LorenzMap,
    beta_transformation,
    describe_map,
    parse_map_text,
    symmetric_map,
    validate_map,
)
from .interval_dynamics import CapExceeded, IntervalUnion, format_union
from .periods import (
    BranchBudgetExceeded,
    minimal_period,
    minimal_periodic_orbit,
)
from .renorm import Tower, TowerTerminal, Trichotomy, renorm_tower
from .limits import alpha_classify, omega_decomposition, orbit_unions

DEFAULTS = {
    "l_max": 64,
    "level_cap": 16,
    "hit_cap": 10_000,
    "precision_bits": 4096,
}

ENV_PREFIX = "LORENZ_"

SWEEP_COLUMNS = [
    "parameter",
    "kappa",
    "tower_length",
    "periodic_flags",
    "trichotomy",
    "status",
]

EXIT_OK = 0
EXIT_INVALID_MAP = 2
EXIT_PRECISION = 3
EXIT_CAP = 4

STATUS_FOR_EXIT = {
    EXIT_OK: "ok",
    EXIT_INVALID_MAP: "invalid-map",
    EXIT_PRECISION: "precision-exhausted",
    EXIT_CAP: "cap-exceeded",
}


@dataclass(frozen=True)
class Config:
    l_max: int
    level_cap: int
    hit_cap: int
    precision_bits: int

    def echo(self) -> dict:
        return {
            "l_max": self.l_max,
            "level_cap": self.level_cap,
            "hit_cap": self.hit_cap,
            "precision_bits": self.precision_bits,
        }


def resolve_config(args: argparse.Namespace) -> Config:
    """Flags beat LORENZ_* environment variables beat defaults."""
    values = {}
    for key, default in DEFAULTS.items():
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
            continue
        env = os.environ.get(ENV_PREFIX + key.upper())
        values[key] = int(env) if env is not None else default
    return Config(**values)


def build_map(args: argparse.Namespace, config: Config) -> tuple:
    """Construct the map from flags or a map file; returns (map, echo)."""
    if getattr(args, "map_file", None):
        with open(args.map_file, "r", encoding="utf-8") as handle:
            text = handle.read()
        m = parse_map_text(text, config.precision_bits)
        return m, {"source": args.map_file, **describe_map(m)}
    family = getattr(args, "family", None)
    if family == "symmetric":
        if args.a is None:
            raise ValueError("--family symmetric needs --a")
        a = parse_scalar(args.a)
        m = symmetric_map(a, config.precision_bits)
        return m, {"family": "symmetric", "a": format_scalar(a), **describe_map(m)}
    if family == "beta":
        if args.beta is None or args.alpha is None:
            raise ValueError("--family beta needs --beta and --alpha")
        beta, alpha = parse_scalar(args.beta), parse_scalar(args.alpha)
        m = beta_transformation(beta, alpha, config.precision_bits)
        return m, {
            "family": "beta",
            "beta": format_scalar(beta),
            "alpha": format_scalar(alpha),
            **describe_map(m),
        }
    raise ValueError("need --family symmetric|beta with parameters, or --map-file")


def _orbit_dict(orbit) -> dict:
    return {
        "points": [format_scalar(p.x) for p in orbit.points],
        "period": orbit.period,
        "itinerary": orbit.itinerary,
        "flank_left": format_scalar(orbit.flank_left),
        "flank_right": format_scalar(orbit.flank_right),
    }


def _tower_dict(tower: Tower) -> dict:
    levels = []
    for level in tower.levels:
        step = level.step
        levels.append(
            {
                "index": level.index,
                "ell": step.ell,
                "r": step.r,
                "u": format_scalar(step.u),
                "v": format_scalar(step.v),
                "e_minus": format_scalar(step.e_minus),
                "e_plus": format_scalar(step.e_plus),
                "periodic": step.periodic,
                "interval_base": [
                    format_scalar(level.interval[0]),
                    format_scalar(level.interval[1]),
                ],
                "e_minus_base": format_scalar(level.e_minus),
                "e_plus_base": format_scalar(level.e_plus),
                "return_left": level.return_left,
                "return_right": level.return_right,
                "inner_slopes": {
                    "left": [format_scalar(s) for s in step.inner_map.left.slopes],
                    "right": [format_scalar(s) for s in step.inner_map.right.slopes],
                },
            }
        )
    return {
        "levels": levels,
        "terminal": tower.terminal.value,
        "bound": tower.bound,
        "level_cap": tower.level_cap,
    }


def _omega_dict(omega) -> dict:
    return {
        "parts": [
            {
                "level": part.level,
                "periodic": part.periodic,
                "exact": part.exact,
                "points": [format_scalar(x) for x in part.points],
            }
            for part in omega.parts
        ],
        "attractor": format_union(omega.attractor),
        "flags": list(omega.flags),
    }


def analyze_map(m: LorenzMap, echo: dict, config: Config) -> tuple:
    """Full analysis; returns (report, exit_code)."""
    report: dict = {"status": "ok", "map": echo}

    exit_code = EXIT_OK
    try:
        validation = validate_map(m)
        report["validation"] = {
            "valid": validation.valid,
            "violations": list(validation.violations),
        }
        if not validation.valid:
            report["status"] = STATUS_FOR_EXIT[EXIT_INVALID_MAP]
            report["config"] = config.echo()
            return report, EXIT_INVALID_MAP

        period = minimal_period(m, config.hit_cap)
        report["kappa"] = period.kappa
        report["backward_steps"] = period.m
        report["backward_chain"] = [format_scalar(x) for x in period.backward_chain]

        orbit = None
        if period.kappa is not None and period.kappa > 1:
            orbit = minimal_periodic_orbit(m, period.kappa)
        report["orbit"] = _orbit_dict(orbit) if orbit is not None else None

        if period.kappa == 1:
            trichotomy = Trichotomy.PRIME
            tower = renorm_tower(m, config.level_cap, config.l_max, period, orbit)
        else:
            tower = renorm_tower(m, config.level_cap, config.l_max, period, orbit)
            if period.undetermined:
                trichotomy = Trichotomy.UNKNOWN
            elif tower.levels:
                first = tower.levels[0].step
                trichotomy = (
                    Trichotomy.PERIODIC_MINIMAL_RENORM
                    if first.periodic
                    else Trichotomy.CANTOR_MINIMAL_RENORM
                )
            else:
                trichotomy = Trichotomy.UNKNOWN
        report["trichotomy"] = trichotomy.value
        report["tower"] = _tower_dict(tower)

        unions = orbit_unions(m, tower)
        omega = omega_decomposition(m, tower, unions)
        report["omega"] = _omega_dict(omega)
        report["attractor"] = format_union(omega.attractor)

        if period.undetermined or tower.terminal is TowerTerminal.PERIOD_CAP_REACHED:
            exit_code = EXIT_CAP
    except PrecisionExhausted as err:
        report["error"] = str(err)
        exit_code = EXIT_PRECISION
    except (CapExceeded, BranchBudgetExceeded) as err:
        report["error"] = str(err)
        exit_code = EXIT_CAP

    report["status"] = STATUS_FOR_EXIT[exit_code]
    report["config"] = config.echo()
    return report, exit_code


def summary_row(report: dict) -> dict:
    tower = report.get("tower", {"levels": []})
    flags = ";".join(
        "P" if level["periodic"] else "C" for level in tower.get("levels", [])
    )
    parameter = report.get("map", {}).get("a") or report.get("map", {}).get("beta", "")
    return {
        "parameter": parameter,
        "kappa": "" if report.get("kappa") is None else report["kappa"],
        "tower_length": len(tower.get("levels", [])),
        "periodic_flags": flags,
        "trichotomy": report.get("trichotomy", ""),
        "status": report.get("status", ""),
    }


def cmd_analyze(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    try:
        m, echo = build_map(args, config)
    except PrecisionExhausted as err:
        print(json.dumps({"status": "precision-exhausted", "error": str(err)}))
        return EXIT_PRECISION
    except (ValueError, OSError) as err:
        print(json.dumps({"status": "invalid-map", "error": str(err)}))
        return EXIT_INVALID_MAP
    report, code = analyze_map(m, echo, config)
    if args.format == "csv":
        writer = csv.DictWriter(sys.stdout, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        writer.writerow(summary_row(report))
    else:
        print(json.dumps(report, indent=2))
    return code


def cmd_classify(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    try:
        m, echo = build_map(args, config)
        x = parse_scalar(args.x)
    except PrecisionExhausted as err:
        print(json.dumps({"status": "precision-exhausted", "error": str(err)}))
        return EXIT_PRECISION
    except (ValueError, OSError) as err:
        print(json.dumps({"status": "invalid-map", "error": str(err)}))
        return EXIT_INVALID_MAP
    validation = validate_map(m)
    if not validation.valid:
        print(
            json.dumps(
                {"status": "invalid-map", "violations": list(validation.violations)}
            )
        )
        return EXIT_INVALID_MAP
    try:
        period = minimal_period(m, config.hit_cap)
        orbit = (
            minimal_periodic_orbit(m, period.kappa)
            if period.kappa is not None and period.kappa > 1
            else None
        )
        tower = renorm_tower(m, config.level_cap, config.l_max, period, orbit)
        unions = orbit_unions(m, tower)
        klass = alpha_classify(m, tower, x, unions)
        if klass.index is not None:
            outer = (
                unions[klass.index - 2]
                if klass.index >= 2
                else IntervalUnion.from_pairs([(m.a, m.b)])
            )
        else:
            outer = unions[-1] if unions else IntervalUnion.from_pairs([(m.a, m.b)])
        witness = outer.component_containing(x)
        result = {
            "status": "ok",
            "x": format_scalar(x),
            "class": klass.label(),
            "witness_component": [format_scalar(witness.lo), format_scalar(witness.hi)]
            if witness
            else None,
            "config": config.echo(),
        }
        print(json.dumps(result))
        return EXIT_OK
    except PrecisionExhausted as err:
        print(json.dumps({"status": "precision-exhausted", "error": str(err)}))
        return EXIT_PRECISION
    except (CapExceeded, BranchBudgetExceeded) as err:
        print(json.dumps({"status": "cap-exceeded", "error": str(err)}))
        return EXIT_CAP
    except ValueError as err:
        print(json.dumps({"status": "invalid-map", "error": str(err)}))
        return EXIT_INVALID_MAP


def sweep_rows(args: argparse.Namespace, config: Config):
    start = parse_scalar(args.start)
    end = parse_scalar(args.end)
    step = parse_scalar(args.step)
    if step <= 0:
        raise ValueError("--step must be positive")
    param = start
    while param <= end:
        try:
            if args.family == "symmetric":
                m = symmetric_map(param, config.precision_bits)
                echo = {"family": "symmetric", "a": format_scalar(param)}
            elif args.family == "beta":
                alpha = parse_scalar(args.alpha)
                m = beta_transformation(param, alpha, config.precision_bits)
                echo = {
                    "family": "beta",
                    "beta": format_scalar(param),
                    "alpha": format_scalar(alpha),
                }
            else:
                raise ValueError("sweep supports --family symmetric|beta")
            report, _code = analyze_map(m, echo, config)
            row = summary_row(report)
        except PrecisionExhausted:
            row = dict.fromkeys(SWEEP_COLUMNS, "")
            row["status"] = STATUS_FOR_EXIT[EXIT_PRECISION]
        except (CapExceeded, BranchBudgetExceeded):
            row = dict.fromkeys(SWEEP_COLUMNS, "")
            row["status"] = STATUS_FOR_EXIT[EXIT_CAP]
        except ValueError as err:
            row = dict.fromkeys(SWEEP_COLUMNS, "")
            row["status"] = STATUS_FOR_EXIT[EXIT_INVALID_MAP]
            row["trichotomy"] = str(err)
        row["parameter"] = format_scalar(param)
        yield row
        param += step


def cmd_sweep(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    if args.family == "beta" and not args.alpha:
        print(json.dumps({"status": "invalid-map", "error": "beta sweeps need --alpha"}))
        return EXIT_INVALID_MAP
    try:
        rows = list(sweep_rows(args, config))
    except (ValueError, TypeError) as err:
        print(json.dumps({"status": "invalid-map", "error": str(err)}))
        return EXIT_INVALID_MAP
    if args.format == "json":
        print(json.dumps(rows, indent=2))
    else:
        writer = csv.DictWriter(sys.stdout, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return EXIT_OK


def _add_map_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", choices=["symmetric", "beta"])
    parser.add_argument("--a", help="slope for the symmetric family, p/q")
    parser.add_argument("--beta", help="slope for the beta family, p/q")
    parser.add_argument("--alpha", help="offset for the beta family, p/q")
    parser.add_argument("--map-file", help="plain-text map description")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--l-max", dest="l_max", type=int, default=None)
    parser.add_argument("--level-cap", dest="level_cap", type=int, default=None)
    parser.add_argument("--hit-cap", dest="hit_cap", type=int, default=None)
    parser.add_argument(
        "--precision-bits", dest="precision_bits", type=int, default=None
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lorenzmap",
        description="Exact analysis of expanding Lorenz maps: minimal period, "
        "renormalization towers, backward-limit classification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="full analysis report (JSON)")
    _add_map_flags(p_analyze)
    _add_config_flags(p_analyze)
    p_analyze.add_argument("--format", choices=["json", "csv"], default="json")
    p_analyze.set_defaults(func=cmd_analyze)

    p_classify = sub.add_parser("classify", help="backward-limit class of a point")
    _add_map_flags(p_classify)
    _add_config_flags(p_classify)
    p_classify.add_argument("--x", required=True, help="point to classify, p/q")
    p_classify.add_argument("--format", choices=["json"], default="json")
    p_classify.set_defaults(func=cmd_classify)

    p_sweep = sub.add_parser("sweep", help="parameter sweep (CSV)")
    p_sweep.add_argument("--family", choices=["symmetric", "beta"], required=True)
    p_sweep.add_argument("--alpha", help="fixed offset for beta sweeps, p/q")
    p_sweep.add_argument("--start", required=True)
    p_sweep.add_argument("--end", required=True)
    p_sweep.add_argument("--step", required=True)
    _add_config_flags(p_sweep)
    p_sweep.add_argument("--format", choices=["csv", "json"], default="csv")
    p_sweep.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
