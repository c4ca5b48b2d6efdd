"""Command-line entry point: rank, sweep, synth, summarize, eval.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import ParameterError, SolverError, ValidationError
from .graph import (
    Graph,
    PlantedPartitionSpec,
    generate_planted_partition,
    load_edge_list,
    write_attributes,
    write_edge_list,
)
from .metrics import attribute_coverage, density, rouge1_recall
from .rankers import ALGORITHMS, RankingResult, RankParams, nr2_factorize, nr2_rank, rank
from .text import STOPWORDS, extract_summary, load_stopwords, prepare_cluster, rank_cluster

log = logging.getLogger("nr2rank")

SWEEP_PARAMS = ("alpha", "beta", "lambda", "gamma")
SWEEP_HEADER = ("param_value", "k", "density", "coverage", "wall_time_ms")


class UsageError(Exception):
    pass


# --
# helpers


def _existing(path, what: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"{what} not found: {p}")
    return p


def _algorithm(name: str) -> str:
    if name not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {name!r} (choose from {', '.join(ALGORITHMS)})")
    return name


def _params(args) -> RankParams:
    return RankParams(
        damping=args.damping,
        alpha=args.alpha,
        beta=args.beta,
        k=args.k,
        lambda_mmr=args.lambda_mmr,
        divrank_iters=args.divrank_iters,
    )


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-", "stdout"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load_prior(spec: str, g: Graph) -> np.ndarray | None:
    if spec == "uniform":
        return None
    path = _existing(spec, "prior file")
    r = np.zeros(g.n)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.rstrip("\r\n").split("\t")
            if len(parts) != 2:
                raise ValidationError(f"{path}:{lineno}: expected node<TAB>weight")
            r[g.index(parts[0].strip())] += float(parts[1])
    return r


def ranking_to_dict(res: RankingResult) -> dict:
    return {
        "algorithm": res.algorithm,
        "params": res.params.as_dict(),
        "entries": [{"node": nid, "score": score} for nid, score in res.entries],
    }


def _format_ranking(res: RankingResult, fmt: str, extra: dict) -> str:
    if fmt == "tsv":
        lines = ["node\tscore"] + [f"{nid}\t{score!r}" for nid, score in res.entries]
        return "\n".join(lines) + "\n"
    doc = ranking_to_dict(res)
    doc.update(extra)
    return json.dumps(doc, indent=2) + "\n"


def _graph_from_args(args) -> Graph:
    if args.input:
        attrs = _existing(args.attrs, "attribute file") if args.attrs else None
        return load_edge_list(_existing(args.input, "edge list"), attrs, directed=args.directed)
    spec_flags = (args.clusters, args.size, args.p_in, args.p_out)
    if any(v is None for v in spec_flags):
        raise UsageError("give --input, or all of --clusters --size --p-in --p-out")
    return generate_planted_partition(PlantedPartitionSpec(args.clusters, args.size, args.p_in, args.p_out, args.seed or 0))


# --
# subcommands


def cmd_rank(args) -> int:
    algo = _algorithm(args.algo)
    g = load_edge_list(
        _existing(args.input, "edge list"),
        _existing(args.attrs, "attribute file") if args.attrs else None,
        directed=args.directed,
    )
    r = _load_prior(args.prior, g)
    params = _params(args)
    t0 = time.perf_counter()
    res = rank(algo, g, r, params)
    wall_ms = (time.perf_counter() - t0) * 1e3
    log.info("%s top-%d in %.1f ms", algo, params.k, wall_ms)
    extra = {}
    if args.seed is not None:
        extra["seed"] = args.seed
    if args.timing:
        extra["wall_time_ms"] = wall_ms
    _emit(_format_ranking(res, args.format, extra), args.out)
    return 0


def _sweep_point(g: Graph, algo: str, name: str, value: float, base: RankParams, factorization):
    r = None
    if name == "gamma":
        # position prior over node order, as for an emitted sentence graph
        r = np.arange(1, g.n + 1, dtype=float) ** -value
        params = base
    elif name == "lambda":
        params = replace(base, damping=value)
    else:
        params = replace(base, **{name: value})
    if algo == "nr2" and r is None and factorization is not None and params.damping == base.damping:
        return nr2_rank(g, np.full(g.n, 1.0 / g.n), params, factorization)
    return rank(algo, g, r, params)


def cmd_sweep(args) -> int:
    algo = _algorithm(args.algo)
    if args.param not in SWEEP_PARAMS:
        raise UsageError(f"cannot sweep {args.param!r} (choose from {', '.join(SWEEP_PARAMS)})")
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad --values list {args.values!r}") from None
    if not values:
        raise UsageError("--values is empty")
    g = _graph_from_args(args)
    if args.attribute not in g.attribute_names():
        raise UsageError(f"unknown attribute {args.attribute!r}")
    base = _params(args)
    factorization = nr2_factorize(g, base.damping) if algo == "nr2" else None

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for value in values:
        t0 = time.perf_counter()
        res = _sweep_point(g, algo, args.param, value, base, factorization)
        wall_ms = (time.perf_counter() - t0) * 1e3
        log.info("%s=%g: %.1f ms", args.param, value, wall_ms)
        dens = density(g, res.indices) if len(res) >= 2 else ""
        cov = attribute_coverage(g, res.indices, args.attribute).unique_values
        writer.writerow((repr(value), len(res), repr(dens), cov, f"{wall_ms:.3f}" if args.timing else ""))
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_synth(args) -> int:
    spec = PlantedPartitionSpec(args.clusters, args.size, args.p_in, args.p_out, args.seed)
    g = generate_planted_partition(spec)
    prefix = args.out_prefix
    write_edge_list(g, f"{prefix}.edges.tsv")
    write_attributes(g, f"{prefix}.attrs.tsv")
    return 0


def _read_docs(directory) -> tuple[list[str], list[str]]:
    d = _existing(directory, "document directory")
    files = sorted(p for p in d.iterdir() if p.is_file() and not p.name.startswith("."))
    docs = [p.read_text(encoding="utf-8") for p in files]
    keep = [(p.stem, t) for p, t in zip(files, docs) if t.strip()]
    if not keep:
        raise UsageError(f"no non-empty documents in {d}")
    return [t for _, t in keep], [name for name, _ in keep]


def cmd_summarize(args) -> int:
    algo = _algorithm(args.algo)
    docs, ids = _read_docs(args.docs)
    stop = load_stopwords(_existing(args.stopwords, "stopword file")) if args.stopwords else STOPWORDS
    if args.budget < 1:
        raise UsageError("--budget must be >= 1")
    sg = prepare_cluster(docs, ids, args.threshold, stop)
    if args.emit_graph:
        write_edge_list(sg.graph, args.emit_graph)
    pool = args.candidate_pool
    if pool == 0:
        pool = max(1, args.budget // 5)
    ranking = rank_cluster(sg, algo, _params(args), args.gamma, pool)
    summary = extract_summary(sg, ranking, args.budget)
    _emit(summary + "\n", args.out)
    return 0


def _ranking_nodes(path: Path, g: Graph) -> list[int]:
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
        return [g.index(str(e["node"])) for e in doc["entries"]]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValidationError(f"malformed ranking file {path}: {exc}") from exc


def cmd_eval(args) -> int:
    if args.ranking:
        if not args.input:
            raise UsageError("--ranking needs its graph via --input")
        ranking = _existing(args.ranking, "ranking file")
        attrs = _existing(args.attrs, "attribute file") if args.attrs else None
        g = load_edge_list(_existing(args.input, "edge list"), attrs, directed=args.directed)
        nodes = _ranking_nodes(ranking, g)
        names = args.attribute or sorted(g.attribute_names())
        for name in names:
            if name not in g.attribute_names():
                raise UsageError(f"unknown attribute {name!r}")
        report = {
            "k": len(nodes),
            "density": density(g, nodes) if len(nodes) >= 2 else None,
            "coverage": {name: attribute_coverage(g, nodes, name).unique_values for name in names},
        }
    elif args.summary:
        if not args.refs:
            raise UsageError("--summary needs reference summaries via --refs")
        summary = _existing(args.summary, "summary file").read_text(encoding="utf-8")
        ref_dir = _existing(args.refs, "reference directory")
        refs = [p.read_text(encoding="utf-8") for p in sorted(ref_dir.iterdir()) if p.is_file()]
        try:
            score = rouge1_recall(summary, refs)
        except ParameterError as exc:
            raise UsageError(str(exc)) from exc
        report = {
            "rouge1_recall": score.recall,
            "overlap": score.overlap,
            "reference_total": score.reference_total,
            "references": len(score.per_reference),
        }
    else:
        raise UsageError("eval needs --ranking/--input or --summary/--refs")
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return 0


# --
# parser


def _add_rank_params(p: argparse.ArgumentParser, k: int = 10) -> None:
    p.add_argument("--algo", default="nr2", help=f"one of {', '.join(ALGORITHMS)}")
    p.add_argument("--k", type=int, default=k)
    p.add_argument("--lambda", dest="damping", type=float, default=0.85, help="damping factor")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--lambda-mmr", type=float, default=0.5)
    p.add_argument("--divrank-iters", type=int, default=100)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nr2rank", description="Diversity-aware graph ranking.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", help="rank the nodes of an edge-list graph")
    p.add_argument("--input", required=True)
    p.add_argument("--attrs")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--prior", default="uniform", help="'uniform' or a node<TAB>weight file")
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--timing", action="store_true", help="include wall_time_ms in the output")
    _add_rank_params(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("sweep", help="sweep one parameter and report density/coverage as CSV")
    p.add_argument("--param", required=True, help=f"one of {', '.join(SWEEP_PARAMS)}")
    p.add_argument("--values", required=True, help="comma-separated list")
    p.add_argument("--input")
    p.add_argument("--attrs")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--clusters", type=int)
    p.add_argument("--size", type=int)
    p.add_argument("--p-in", type=float)
    p.add_argument("--p-out", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--attribute", default="cluster")
    p.add_argument("--out")
    p.add_argument("--timing", action="store_true", help="fill the wall_time_ms column")
    _add_rank_params(p, k=20)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="write a planted-partition graph")
    p.add_argument("--clusters", type=int, required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--p-in", type=float, required=True)
    p.add_argument("--p-out", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("summarize", help="extractive summary of a directory of documents")
    p.add_argument("--docs", required=True)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--budget", type=int, default=100)
    p.add_argument("--stopwords")
    p.add_argument("--candidate-pool", type=int, help="cap k; 0 means budget // 5")
    p.add_argument("--emit-graph")
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    _add_rank_params(p)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("eval", help="density/coverage of a ranking, or ROUGE-1 of a summary")
    p.add_argument("--ranking")
    p.add_argument("--input")
    p.add_argument("--attrs")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--attribute", action="append")
    p.add_argument("--summary")
    p.add_argument("--refs")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, ParameterError) as exc:
        print(f"nr2rank {args.command}: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, SolverError, OSError) as exc:
        print(f"nr2rank {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
