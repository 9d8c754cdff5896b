"""Command-line interface: ingest, enhance, evaluate, oracle, export.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 oracle
budget refusal.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from pathlib import Path
from typing import Any, Sequence

import yaml

from .analysis import enhanced_matrix, split_validate
from .andfeature import (
    DEFAULT_ORACLE_BUDGET,
    count_possible_and_features,
    enumerate_connected_oracle,
    read_afs,
    write_afs,
)
from .errors import AndFeaturesError, ConfigError, OracleInfeasible
from .lga import LgaConfig, run_lga
from .network import FeatureSampleNetwork, binarize, build_network, export_graph_description, ingest_csv, read_fsn, write_fsn
from .objectives import CandidateSolution
from .operators import InitParams, VariationParams
from .spea2 import Spea2Config, run_spea2

log = logging.getLogger("andfeatures")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_BUDGET = 0, 2, 3, 4

# every key a config file may set, with its built-in default
DEFAULTS: dict[str, Any] = {
    "strategy": "lga",
    "seed": 0,
    "threads": 1,
    "population": 1000,
    "archive": 100,
    "elitism": 100,
    "generations": 1000,
    "mu": 50.0,
    "sigma": 10.0,
    "recombination_rate": 0.6,
    "eta": 1,
    "max_new_features": None,
    "bins": 3,
    "binning": "quantile",
    "label_column": None,
    "delimiter": ",",
    "header": True,
    "fractions": [0.7, 0.8],
    "repeats": 20,
    "k_max": 20,
}


def _fractions(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="YAML or JSON file of option defaults")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_ingest_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bins", type=int)
    p.add_argument("--binning", choices=["quantile", "width"])
    p.add_argument("--label-column", dest="label_column")
    p.add_argument("--delimiter")
    p.add_argument("--header", dest="header", action="store_true", default=None)
    p.add_argument("--no-header", dest="header", action="store_false")


def _add_engine_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--strategy", choices=["lga", "spea2"])
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--population", type=int)
    p.add_argument("--archive", type=int)
    p.add_argument("--elitism", type=int)
    p.add_argument("--generations", type=int)
    p.add_argument("--mu", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--recombination-rate", dest="recombination_rate", type=float)
    p.add_argument("--eta", type=int)
    p.add_argument("--max-new-features", dest="max_new_features", type=int)


def _add_analysis_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int)
    p.add_argument("--fractions", type=_fractions)
    p.add_argument("--repeats", type=int)
    p.add_argument("--k-max", dest="k_max", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="andfeatures", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="CSV to feature-sample network (FSN v1)")
    p.add_argument("csv", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True)
    _add_ingest_opts(p)
    _add_common(p)

    p = sub.add_parser("enhance", help="evolve and-features with LGA or SPEA2")
    p.add_argument("fsn", type=Path)
    p.add_argument("--report", type=Path, help="run report JSON (default: stdout)")
    p.add_argument("--afs", type=Path, help="write the best final solution as AFS v1")
    p.add_argument("--timing", action="store_true", help="include wall time in the report")
    _add_engine_opts(p)
    _add_common(p)

    p = sub.add_parser("evaluate", help="k-NN split validation of an (enhanced) network")
    p.add_argument("fsn", type=Path)
    p.add_argument("afs", help='AFS v1 file or "none"')
    p.add_argument("-o", "--output", type=Path, help="table CSV (default: stdout)")
    p.add_argument("--json", type=Path, help="also write the table and resolved options as JSON")
    _add_analysis_opts(p)
    _add_common(p)

    p = sub.add_parser("oracle", help="exact set of connected and-features")
    p.add_argument("fsn", type=Path)
    p.add_argument("--dump", type=Path, help="write the full set as AFS v1")
    p.add_argument("--budget", type=int, default=DEFAULT_ORACLE_BUDGET)
    _add_common(p)

    p = sub.add_parser("export", help="DOT description of the (enhanced) network")
    p.add_argument("fsn", type=Path)
    p.add_argument("afs", nargs="?", help="optional AFS v1 file of and-features to draw")
    p.add_argument("-o", "--output", type=Path)
    _add_common(p)
    return parser


def resolve(args: argparse.Namespace) -> dict[str, Any]:
    """Built-in defaults, then the config file, then explicit flags."""
    opts = dict(DEFAULTS)
    if args.config is not None:
        try:
            loaded = yaml.safe_load(args.config.read_text())
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
        loaded = loaded or {}
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a mapping")
        loaded = {k.replace("-", "_"): v for k, v in loaded.items()}
        unknown = sorted(set(loaded) - set(DEFAULTS))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        opts.update(loaded)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            opts[key] = value
    if opts["strategy"] not in ("lga", "spea2"):
        raise ConfigError(f"unknown strategy {opts['strategy']!r}")
    if opts["threads"] < 1:
        raise ConfigError("threads must be >= 1")
    return opts


def _read_network(path: Path) -> FeatureSampleNetwork:
    with open(path) as fh:
        return read_fsn(fh)


def _read_solution(path: str, network: FeatureSampleNetwork) -> CandidateSolution:
    if path == "none":
        return CandidateSolution()
    with open(path) as fh:
        return CandidateSolution(read_afs(fh, network.n_features))


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def cmd_ingest(args, opts) -> int:
    with open(args.csv, newline="") as fh:
        raw = ingest_csv(fh, opts["delimiter"], opts["header"], opts["label_column"])
    network = build_network(binarize(raw, opts["bins"], opts["binning"]))
    with open(args.output, "w") as fh:
        write_fsn(network, fh)
    hist = Counter(len(adj) for adj in network.sample_adj)
    print(f"samples: {network.n_samples}")
    print(f"features: {network.n_features}")
    print("degree histogram: " + " ".join(f"{k}:{hist[k]}" for k in sorted(hist)))
    print(f"possible and-features: {count_possible_and_features(network.n_features)}")
    return EXIT_OK


def engine_config(opts: dict[str, Any]) -> LgaConfig | Spea2Config:
    common = dict(
        population_size=opts["population"],
        generations=opts["generations"],
        init=InitParams(opts["mu"], opts["sigma"]),
        variation=VariationParams(opts["recombination_rate"], opts["eta"]),
        m_max=opts["max_new_features"],
        seed=opts["seed"],
    )
    if opts["strategy"] == "lga":
        cfg = LgaConfig(elite_size=opts["elitism"], **common)
    else:
        cfg = Spea2Config(archive_size=opts["archive"], **common)
    cfg.validate()
    return cfg


def cmd_enhance(args, opts) -> int:
    network = _read_network(args.fsn)
    cfg = engine_config(opts)
    run = run_lga if opts["strategy"] == "lga" else run_spea2
    report = run(network, cfg, threads=opts["threads"])
    best = report.best()
    log.info("best: %d and-features, disproportion %.6g", best.count, best.disproportion)
    _emit(report.to_json(include_timing=args.timing), args.report)
    if args.afs is not None:
        with open(args.afs, "w") as fh:
            write_afs(best.features, fh)
    return EXIT_OK


def cmd_evaluate(args, opts) -> int:
    network = _read_network(args.fsn)
    solution = _read_solution(args.afs, network)
    if opts["k_max"] < 1 or opts["repeats"] < 1:
        raise ConfigError("k_max and repeats must be >= 1")
    table = split_validate(
        enhanced_matrix(network, solution),
        fractions=opts["fractions"],
        repeats=opts["repeats"],
        k_range=range(1, opts["k_max"] + 1),
        seed=opts["seed"],
    )
    _emit(table.to_csv(), args.output)
    if args.json is not None:
        echo = {k: opts[k] for k in ("seed", "fractions", "repeats", "k_max")}
        echo["afs"] = args.afs
        args.json.write_text(json.dumps({"options": echo, "table": table.to_dict()}, indent=1, sort_keys=True) + "\n")
    for f in table.fractions():
        b = table.best(f)
        log.info("fraction %.2f: best k=%d mean %.4f sd %.4f", f, b["k"], b["mean"], b["sd"])
    return EXIT_OK


def cmd_oracle(args, opts) -> int:
    network = _read_network(args.fsn)
    found = enumerate_connected_oracle(network, budget=args.budget)
    print(len(found))
    if args.dump is not None:
        with open(args.dump, "w") as fh:
            write_afs(found, fh)
    return EXIT_OK


def cmd_export(args, opts) -> int:
    network = _read_network(args.fsn)
    solution = _read_solution(args.afs, network) if args.afs else None
    _emit(export_graph_description(network, solution), args.output)
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "enhance": cmd_enhance,
    "evaluate": cmd_evaluate,
    "oracle": cmd_oracle,
    "export": cmd_export,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        opts = resolve(args)
        return COMMANDS[args.command](args, opts)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OracleInfeasible as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (AndFeaturesError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
