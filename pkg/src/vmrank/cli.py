"""Command-line interface: ``vmrank {rank,enumerate,validate,inspect}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .catalog import DEFAULT_CATALOG, DEFAULT_RUNS, GROUP_NAMES, CatalogError, load_catalog, load_matrix
from .ranking import P, PC, RankingResult, rank, ranking_from_ranks
from .scoring import AGGREGATE, FINE_GRAIN, PARALLEL, SEQUENTIAL, expand_weights, load_weights, prepare, score
from .validation import (
    OBSERVATIONS_HEADER,
    PUBLISHED_CORRELATIONS,
    ValidationError,
    compare,
    empirical_rank,
    load_case_study,
    read_observations,
)
from .weightspace import score_curve, top_k_frequency

MODES = {"p": P, "pc": PC}
EXECS = {"seq": SEQUENTIAL, "par": PARALLEL}
SPACES = {"aggregate": AGGREGATE, "fine": FINE_GRAIN}


class UsageError(Exception):
    pass


def _num(x: float) -> str:
    return repr(float(x))


def ranking_to_csv(result: RankingResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["vm_id", "rank", "score", "key"])
    for e in sorted(result.entries, key=lambda e: e.rank):
        w.writerow([e.vm_id, e.rank, _num(e.score), _num(e.key)])
    return buf.getvalue()


def read_ranking_csv(path, mode: str, execution: str) -> RankingResult:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or not {"vm_id", "rank"} <= set(reader.fieldnames):
            raise ValidationError(f"{path}: ranking file needs vm_id and rank columns")
        ranks = {row["vm_id"]: int(row["rank"]) for row in reader}
    return ranking_from_ranks(ranks, mode, execution)


def _ranking_report(result, config, weights, expanded, attributes, fmt) -> str:
    if fmt == "csv":
        return ranking_to_csv(result)
    expanded_map = {a.id: float(w) for a, w in zip(attributes, expanded)}
    if fmt == "json":
        doc = {
            "mode": result.mode,
            "execution": result.execution,
            "weights": {"kind": weights.kind, "values": weights.as_mapping()},
            "expanded_weights": expanded_map,
            "tie_break_applied": result.tie_break_applied,
            "entries": [
                {"vm_id": e.vm_id, "rank": e.rank, "score": e.score, "key": e.key}
                for e in sorted(result.entries, key=lambda e: e.rank)
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    key_name = "key (score)" if result.mode == P else "key (cost/score)"
    lines = [
        f"# {result.mode} ranking, {result.execution} execution",
        "",
        f"weights ({weights.kind}): " + ", ".join(f"{g}={v}" for g, v in weights.as_mapping().items()),
        "",
        f"| rank | vm_id | score | {key_name} |",
        "|---:|---|---:|---:|",
    ]
    for e in sorted(result.entries, key=lambda e: e.rank):
        lines.append(f"| {e.rank} | {e.vm_id} | {e.score:.6f} | {e.key:.6g} |")
    lines += ["", "## Expanded weights", "", "| attribute | weight |", "|---|---:|"]
    lines += [f"| {a} | {w:+g} |" for a, w in expanded_map.items()]
    return "\n".join(lines) + "\n"


def method_ranking(matrix, weights, mode, execution) -> tuple[RankingResult, np.ndarray]:
    expanded = expand_weights(weights, matrix.attributes)
    scores = score(prepare(matrix, execution), expanded)
    return rank(scores, matrix.vms, mode, execution), expanded


def _load_empirical(path, profiles, mode, execution) -> RankingResult:
    with open(path, newline="", encoding="utf-8") as f:
        header = next(csv.reader(f), None) or []
    header = tuple(h.strip() for h in header)
    if header == OBSERVATIONS_HEADER:
        obs = read_observations(path, execution)
        if not obs:
            raise ValidationError(f"{path}: no {execution} observations")
        return empirical_rank(obs, profiles, mode)
    return read_ranking_csv(path, mode, execution)


def cmd_rank(args) -> str:
    if not args.weights:
        raise UsageError("rank requires --weights")
    matrix = load_matrix(args.catalog, args.runs)
    weights = load_weights(args.weights)
    result, expanded = method_ranking(matrix, weights, MODES[args.mode], EXECS[args.exec])
    return _ranking_report(result, args, weights, expanded, matrix.attributes, args.format)


def cmd_enumerate(args) -> str:
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    matrix = load_matrix(args.catalog, args.runs)
    mode, execution, space = MODES[args.mode], EXECS[args.exec], SPACES[args.space]
    if args.empirical:
        emp = _load_empirical(args.empirical, matrix.vms, mode, execution)
        result = score_curve(matrix, None, space, mode, execution, emp, workers=args.workers)
    else:
        if not 1 <= args.top <= len(matrix.vms):
            raise UsageError(f"--top must be between 1 and {len(matrix.vms)}, got {args.top}")
        result = top_k_frequency(matrix, None, space, mode, execution, args.top, workers=args.workers)
    if args.summary:
        Path(args.summary).write_text(result.to_markdown(), encoding="utf-8")
    if args.format == "md":
        return result.to_markdown()
    if args.format == "json":
        if args.empirical:
            doc = {"weights": ["-".join(map(str, w.values)) for w, _ in result], "scores": result.scores.tolist()}
        else:
            doc = {"vm_ids": list(result.vm_ids), "counts": result.counts.tolist()}
        doc.update(kind=space, mode=mode, execution=execution)
        return json.dumps(doc, indent=2) + "\n"
    return result.to_csv()


def _validation_text(reports, fmt) -> str:
    if fmt == "json":
        return json.dumps([r.as_dict() for r in reports], indent=2) + "\n"
    if fmt == "md":
        lines = ["| mode | execution | vms | pearson % | hamming |", "|---|---|---:|---:|---:|"]
        lines += [f"| {r.mode} | {r.execution} | {r.vm_count} | {r.pearson_percent:.2f} | {r.hamming_score} |"
                  for r in reports]
        return "\n".join(lines) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mode", "execution", "vm_count", "pearson_percent", "hamming_score"])
    for r in reports:
        w.writerow([r.mode, r.execution, r.vm_count, _num(r.pearson_percent), r.hamming_score])
    return buf.getvalue()


def cmd_validate(args) -> str:
    if args.case_study is not None:
        pairs = load_case_study(args.case_study)
        reports = [compare(bench, emp) for bench, emp in pairs.values()]
        if args.format == "md":
            published = PUBLISHED_CORRELATIONS[args.case_study]
            lines = ["| mode | execution | pearson % | published % | hamming |", "|---|---|---:|---:|---:|"]
            lines += [
                f"| {r.mode} | {r.execution} | {r.pearson_percent:.2f} | {published[(r.execution, r.mode)]} "
                f"| {r.hamming_score} |"
                for r in reports
            ]
            return "\n".join(lines) + "\n"
        return _validation_text(reports, args.format)

    if not args.empirical:
        raise UsageError("validate requires --empirical (or --case-study)")
    mode, execution = MODES[args.mode], EXECS[args.exec]
    if args.ranking:
        method = read_ranking_csv(args.ranking, mode, execution)
        profiles = load_catalog(args.catalog).vms
    else:
        if not args.weights:
            raise UsageError("validate requires --weights or --ranking")
        matrix = load_matrix(args.catalog, args.runs)
        method, _ = method_ranking(matrix, load_weights(args.weights), mode, execution)
        profiles = matrix.vms
    emp = _load_empirical(args.empirical, profiles, mode, execution)
    return _validation_text([compare(method, emp)], args.format)


def cmd_inspect(args) -> str:
    catalog = load_catalog(args.catalog)
    lines = [f"# Catalog {args.catalog}", "", f"{len(catalog.vms)} VMs, {len(catalog.attributes)} attributes", ""]
    lines += ["| vm_id | vCPUs | memory GiB | $/hour |", "|---|---:|---:|---:|"]
    lines += [f"| {v.id} | {v.vcpus} | {v.memory_gib:g} | {v.cost_per_hour:.3f} |" for v in catalog.vms]
    lines += ["", "| attribute | group | direction | unit | parallel |", "|---|---|---|---|---|"]
    lines += [
        f"| {a.id} | {a.sub_group} ({GROUP_NAMES[a.sub_group]}) | {a.direction} | {a.unit} | "
        f"{'yes' if a.parallel_scalable else 'no'} |"
        for a in catalog.attributes
    ]
    if args.runs:
        matrix = load_matrix(args.catalog, args.runs)
        norm = prepare(matrix, EXECS[args.exec])
        lines += ["", f"## Measurements ({norm.values.shape[0]} x {norm.values.shape[1]}, {args.exec})", "",
                  "| attribute | mean | population std |", "|---|---:|---:|"]
        lines += [f"| {a.id} | {mu:.6g} | {sd:.6g} |" for a, mu, sd in zip(matrix.attributes, norm.mean, norm.std)]
    return "\n".join(lines) + "\n"


def _common(runs_default=str(DEFAULT_RUNS)) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--catalog", default=str(DEFAULT_CATALOG), help="catalog JSON (default: bundled 11-VM EC2 catalog)")
    common.add_argument("--runs", default=runs_default, help="runs CSV (default: bundled synthetic runs)")
    common.add_argument("--weights", help="weight file (JSON)")
    common.add_argument("--mode", choices=sorted(MODES), default="p")
    common.add_argument("--exec", choices=sorted(EXECS), default="seq")
    common.add_argument("--format", choices=["csv", "json", "md"], default="csv")
    common.add_argument("--output", help="write the report here instead of standard output")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="vmrank", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("rank", parents=[common], help="rank VMs for one weight vector")

    p = sub.add_parser("enumerate", parents=[common], help="top-k frequencies or score curve over a weight space")
    p.add_argument("--space", choices=sorted(SPACES), default="aggregate")
    p.add_argument("--top", type=int, default=3)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--empirical", help="empirical observations or ranking CSV; emits a score curve")
    p.add_argument("--summary", help="also write a markdown summary to this path")

    p = sub.add_parser("validate", parents=[common], help="compare method and empirical rankings")
    p.add_argument("--empirical", help="observations CSV (vm_id,execution,time_seconds) or ranking CSV")
    p.add_argument("--ranking", help="method ranking CSV to use instead of computing one")
    p.add_argument("--case-study", type=int, choices=sorted(PUBLISHED_CORRELATIONS),
                   help="validate the bundled published rank columns of a case study")

    sub.add_parser("inspect", parents=[_common(None)], help="summarise a catalog and its measurements")
    return parser


COMMANDS = {"rank": cmd_rank, "enumerate": cmd_enumerate, "validate": cmd_validate, "inspect": cmd_inspect}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = COMMANDS[args.command](args)
    except (UsageError, CatalogError, ValidationError, ValueError, OSError) as exc:
        print(f"vmrank {args.command}: error: {exc}", file=sys.stderr)
        return 1
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0
