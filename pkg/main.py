"""
hyplab command line.

    python main.py density  --set bmpp-hitting --b 3 --k 1 --functional banach --window 27 --horizon 100000
    python main.py construct bg --horizon 10000
    python main.py check    --criterion shift-upper --construction bmpp --p 1 --M 8 --horizon 10000
    python main.py orbit    --vector 3:1 --radius 1/2 --horizon 100
    python main.py hvector  --construction bg --p-max 2 --horizon 10000

Every subcommand also accepts `--config run.json` (an ExperimentConfig; its parameters win
over flags), `--output DIR` and `--seed N`.

Exit codes: 0 pass, 1 fail with witness, 2 usage or precondition error, 3 internal error.
Errors are printed to stderr as JSON.
"""
import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable

import pandas as pd
import yaml
from pydantic import ValidationError

from config import LOG_LEVEL
from constructions import getConstruction
from constructions.bmpp import pair_threshold
from dynamics.criteria import check_shift_general, check_shift_upper, check_shift_upper_per_j
from dynamics.densities import (
    WeightProfile,
    banach_density_profile,
    exponential_density_profile,
    geometric_horizons,
    hindman_profile,
    natural_density_profile,
    phi_sum_profile,
    polya_density_grid,
    weighted_density_profile,
)
from dynamics.hvector import TargetSchedule, build_vector, verify_orbit
from dynamics.index_sets import IndexSet, arithmetic
from dynamics.shift_ops import Space, TruncatedVector, WeightSequence, geometric, orbit_visit_set, unweighted
from helpers.arith import is_square
from helpers.errors import HyplabError, OracleError, PreconditionError
from helpers.exporters import write_csv, write_json, write_set
from helpers.text_utils import dict_to_table
from helpers.utils import find_best_match, get_range, get_trace
from models.experiment import (
    CheckParameters,
    Command,
    CommonParameters,
    ConstructParameters,
    DensityParameters,
    ExperimentConfig,
    Functional,
    HVectorParameters,
    OrbitParameters,
)
from models.params import ConstructionParams
from models.profiles import DensityProfile

CRITERIA = ["shift-upper", "shift-upper-per-j", "shift-general", "verify"]


# ------------------------------------------------------------------ helpers


def construction_params(params: CommonParameters) -> ConstructionParams:
    return ConstructionParams(
        base=params.base,
        weight_base=params.weight_base,
        coefficient=params.coefficient,
        m_schedule=params.m_schedule,
        j_schedule=params.j_schedule,
    )


def squares() -> IndexSet:
    return IndexSet(
        is_square,
        "squares",
        elements=lambda N: (i * i for i in range(math.isqrt(N) + 1)),
        counter=lambda N: math.isqrt(N) + 1,
    )


def resolve_set(params: DensityParameters) -> IndexSet:
    """`multiples`, `squares` or `<construction>-<set>` such as bmpp-hitting, bg-A, vfhc-B."""
    if params.set_name == "multiples":
        return arithmetic(params.step, 0, label=f"{params.step}N0")
    if params.set_name == "squares":
        return squares()
    name, _, key = params.set_name.partition("-")
    construction = getConstruction(name, construction_params(params))
    return construction.named_set(key, k=params.k, p=params.p, r=params.r)


def density_profiles(A: IndexSet, params: DensityParameters) -> list[DensityProfile]:
    hs = params.horizons or geometric_horizons(params.horizon, params.points)
    match params.functional:
        case Functional.LOWER | Functional.UPPER:
            return [natural_density_profile(A, hs, mode=params.functional.value)]
        case Functional.BANACH:
            lengths = geometric_horizons(params.window, params.points, start=1)
            return [banach_density_profile(A, lengths, params.horizon)]
        case Functional.WEIGHTED:
            return [weighted_density_profile(A, WeightProfile.power(params.alpha), hs)]
        case Functional.PHI:
            return [phi_sum_profile(A, WeightProfile.power(params.alpha), hs)]
        case Functional.EXPONENTIAL:
            return [exponential_density_profile(A, hs)]
        case Functional.HINDMAN:
            return [hindman_profile(A, params.depth, hs)]
        case Functional.POLYA:
            return polya_density_grid(A, [params.alpha], hs)


def construction_levels(name: str, params: ConstructParameters | HVectorParameters) -> dict[str, Any]:
    if name in ("bmpp", "br"):
        return {"levels": (params.k,)}
    top = params.p_max if isinstance(params, HVectorParameters) else max(params.p, 2)
    options: dict[str, Any] = {"levels": tuple(range(1, top + 1))}
    if name == "vfhc" and getattr(params, "r", None) is not None:
        options["r"] = params.r
    return options


def orbit_weights(params: OrbitParameters) -> WeightSequence:
    if params.weights == "unweighted":
        return unweighted()
    if params.weights == "geometric":
        return geometric(params.ratio)
    return getConstruction(params.weights, ConstructionParams(base=params.base)).weights


# ------------------------------------------------------------------ runners


def run_density(config: ExperimentConfig, params: DensityParameters) -> int:
    A = resolve_set(params)
    profiles = density_profiles(A, params)
    df = pd.concat([p.to_df() for p in profiles], ignore_index=True)
    path = write_csv(df, config, f"{params.set_name}-{params.functional.value}")
    rows = [{"functional": p.functional_tag, "N": p.horizons[-1], "value": p.last} for p in profiles if p.horizons]
    print(dict_to_table(rows))
    print(path)
    return 0


def run_construct(config: ExperimentConfig, params: ConstructParameters) -> int:
    construction = getConstruction(params.name, construction_params(params), **construction_levels(params.name, params))
    paths = [write_csv(construction.weight_table(params.horizon), config, f"{params.name}-weights")]
    levels = {k: getattr(params, k) for k in construction.level_names if getattr(params, k) is not None}
    for key, A in construction.sets(**levels).items():
        paths.append(write_set(A, params.horizon, config, f"{params.name}-{key}"))
    report = construction.verify(params.horizon)
    paths.append(write_json(report, config, f"{params.name}-verification"))
    failed = report.failed()
    print(f"{params.name}: {report.verdict.value}, {len(report.checks)} checks, {len(failed)} failed")
    if failed:
        print(dict_to_table([{"check": c.name, "lhs": c.lhs, "relation": c.relation, "rhs": c.rhs} for c in failed]))
    print("\n".join(str(p) for p in paths))
    return report.verdict.exit_code


def run_check(config: ExperimentConfig, params: CheckParameters) -> int:
    if params.criterion not in CRITERIA:
        match = find_best_match(params.criterion, CRITERIA)
        raise PreconditionError(
            f"unknown criterion {params.criterion!r}, did you mean {match.text!r}?", {"criterion": params.criterion}
        )
    construction = getConstruction(params.construction, construction_params(params))
    w = construction.weights
    wb = params.weight_base
    if params.criterion == "verify":
        report = construction.verify(params.horizon)
    elif params.criterion == "shift-general":
        if not hasattr(construction, "A"):
            raise PreconditionError("shift-general runs on the bg and vfhc families", {"construction": params.construction})
        families = params.families or [1, 2]
        if params.M is None:
            M = construction.thresholds(tuple(families))
        else:
            M = [params.M * wb**i for i in range(len(families))]
        report = check_shift_general(w, [construction.A(p) for p in families], M, params.horizon, growth_floor=wb)
    else:
        A = construction.named_set("hitting", k=params.k)
        M = params.M if params.M is not None else pair_threshold(wb, params.k)
        checker = check_shift_upper if params.criterion == "shift-upper" else check_shift_upper_per_j
        report = checker(w, A, params.p, M, params.horizon)
    path = write_json(report, config, f"{params.construction}-{params.criterion}")
    print(f"{params.criterion} on {params.construction}: {report.verdict.value}")
    if hasattr(report, "to_rows"):
        print(dict_to_table(report.to_rows()))
    print(path)
    return report.verdict.exit_code


def run_orbit(config: ExperimentConfig, params: OrbitParameters) -> int:
    space = Space.parse(params.space)
    x = TruncatedVector.from_entries(params.vector, space)
    center = TruncatedVector.from_entries(params.center, space)
    visits = orbit_visit_set(orbit_weights(params), x, center, params.radius, params.horizon)
    path = write_set(visits, params.horizon, config, "visits")
    profile = natural_density_profile(visits, [params.horizon], mode="lower")
    print(dict_to_table([{"visits": visits.count(params.horizon), "N": params.horizon, "density": profile.last}]))
    print(path)
    return 0


def run_hvector(config: ExperimentConfig, params: HVectorParameters) -> int:
    construction = getConstruction(
        params.construction, construction_params(params), **construction_levels(params.construction, params)
    )
    w = construction.weights
    schedule = TargetSchedule.for_construction(construction, params.p_max, params.scale)
    x = build_vector(schedule, w, params.horizon)
    report = verify_orbit(schedule, w, x, params.horizon)
    paths = [
        write_json(x, config, f"{params.construction}-vector"),
        write_json(report, config, f"{params.construction}-orbit"),
    ]
    print(f"hypercyclic vector on {params.construction}: {report.verdict.value}, slack {schedule.slack}")
    print(dict_to_table(report.to_rows()))
    print("\n".join(str(p) for p in paths))
    return report.verdict.exit_code


RUNNERS: dict[Command, Callable[[ExperimentConfig, Any], int]] = {
    Command.DENSITY: run_density,
    Command.CONSTRUCT: run_construct,
    Command.CHECK: run_check,
    Command.ORBIT: run_orbit,
    Command.HVECTOR: run_hvector,
}


def run(config: ExperimentConfig) -> int:
    logging.info(f"hyplab {config.command.value}: {config.echo()}")
    return RUNNERS[config.command](config, config.typed_parameters())


# ------------------------------------------------------------------ arguments


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.replace(" ", "").split(",") if t]


def _sparse_vector(text: str) -> dict[int, str]:
    """'3:1,5:1/2' -> {3: '1', 5: '1/2'}"""
    entries = {}
    for item in text.replace(" ", "").split(","):
        if item:
            index, _, value = item.partition(":")
            entries[int(index)] = value or "1"
    return entries


def build_parser() -> argparse.ArgumentParser:
    run_args = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    run_args.add_argument("--config", help="ExperimentConfig file (.json, .yml, .yaml); its parameters win over flags")
    run_args.add_argument("--output", dest="output_path", help="output directory (default HYPLAB_OUTPUT_DIR)")
    run_args.add_argument("--seed", type=int)

    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--b", "--base", dest="base", type=int)
    common.add_argument("--weight-base", dest="weight_base", type=int)
    common.add_argument("--coefficient", type=int)
    common.add_argument("--m-schedule", dest="m_schedule", type=_int_list)
    common.add_argument("--j-schedule", dest="j_schedule", type=_int_list)

    parser = argparse.ArgumentParser(prog="hyplab", description="Density and hypercyclicity workbench")
    sub = parser.add_subparsers(dest="command")

    density = sub.add_parser("density", parents=[run_args, common], argument_default=argparse.SUPPRESS)
    density.add_argument("--set", dest="set_name", help="multiples, squares or <construction>-<set>")
    density.add_argument("--functional", choices=[f.value for f in Functional])
    for flag in ("k", "p", "j", "r", "step", "window", "depth", "horizon", "points"):
        density.add_argument(f"--{flag}", type=int)
    density.add_argument("--alpha", type=float)
    density.add_argument("--horizons", type=get_range, help="e.g. 10^3,10^4 or 100-110")

    construct = sub.add_parser("construct", parents=[run_args, common], argument_default=argparse.SUPPRESS)
    construct.add_argument("name", choices=["bmpp", "br", "bg", "vfhc"])
    for flag in ("horizon", "k", "p", "r"):
        construct.add_argument(f"--{flag}", type=int)

    check = sub.add_parser("check", parents=[run_args, common], argument_default=argparse.SUPPRESS)
    check.add_argument("--criterion")
    check.add_argument("--construction")
    check.add_argument("--families", type=get_range)
    check.add_argument("--M", help="rational threshold, e.g. 8 or 1/2")
    for flag in ("k", "p", "horizon"):
        check.add_argument(f"--{flag}", type=int)

    orbit = sub.add_parser("orbit", parents=[run_args], argument_default=argparse.SUPPRESS)
    orbit.add_argument("--weights", help="unweighted, geometric or a construction name")
    orbit.add_argument("--ratio")
    orbit.add_argument("--b", "--base", dest="base", type=int)
    orbit.add_argument("--vector", type=_sparse_vector, help="sparse vector, e.g. 3:1,5:1/2")
    orbit.add_argument("--center", type=_sparse_vector)
    orbit.add_argument("--radius")
    orbit.add_argument("--space", help="c0 or lp with an integer p, e.g. l2")
    orbit.add_argument("--horizon", type=int)

    hvector = sub.add_parser("hvector", parents=[run_args, common], argument_default=argparse.SUPPRESS)
    hvector.add_argument("--construction", choices=["bg", "vfhc"])
    hvector.add_argument("--p-max", dest="p_max", type=int)
    hvector.add_argument("--horizon", type=int)
    hvector.add_argument("--scale")
    return parser


def _read_config_file(path: str) -> dict[str, Any]:
    if Path(path).suffix not in (".json", ".yml", ".yaml"):
        raise PreconditionError("Invalid file format. Must be .json or .yaml.", {"config": path})
    return yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    flags = dict(vars(args))
    command = flags.pop("command")
    data: dict[str, Any] = {
        "command": command,
        "output_path": flags.pop("output_path", None),
        "seed": flags.pop("seed", 0),
    }
    path = flags.pop("config", None)
    data["parameters"] = flags
    if path:
        stored = _read_config_file(path)
        if stored.get("command", command) != command:
            raise PreconditionError(
                f"config file is for {stored['command']!r}, not {command!r}", {"config": path, "command": command}
            )
        data["parameters"] = {**flags, **stored.get("parameters", {})}
        for key in ("output_path", "seed"):
            if key in stored:
                data[key] = stored[key]
    return ExperimentConfig.from_dict(data)


def _print_error(payload: dict[str, Any]):
    print(json.dumps(payload, default=str), file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=LOG_LEVEL, format="%(asctime)s %(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2
    try:
        return run(config_from_args(args))
    except ValidationError as e:
        _print_error(
            {
                "error": "ValidationError",
                "message": f"{e.error_count()} invalid parameter(s)",
                "witness": {"errors": e.errors(include_url=False, include_context=False)},
            }
        )
        return 2
    except OracleError as e:
        _print_error(e.to_dict())
        return 3
    except HyplabError as e:
        _print_error(e.to_dict())
        return 2
    except Exception as e:
        logging.error(f"hyplab failed:\n{get_trace(e)}")
        _print_error({"error": type(e).__name__, "message": str(e), "witness": {}})
        return 3


if __name__ == "__main__":
    sys.exit(main())
