"""Command line interface.

Subcommands: generate, spectrum, counts, ci, two-sample, coverage,
cluster, rho-compare.  Every command validates its inputs up front, runs
the corresponding library routine, and writes a deterministic report file;
failures exit nonzero with a single "error: ..." line on stderr.
"""

import argparse
import os
import sys

from . import fileio
from .counts import MOTIFS, normalized_count, raw_count
from .inference import (cluster_spectra, coverage_experiment,
                        rho_mode_comparison, two_sample_test)
from .models import model_label, sample_graph
from .spectral import StatisticSpec, normalized_spectrum, rho_hat
from .subsample import PSampleScheme, VertexScheme, confidence_interval


def _add_model_arguments(parser):
    parser.add_argument("--model", required=True,
                        choices=["sbm", "gaussian_rbf", "lowrank"])
    parser.add_argument("--sbm-b", help="block matrix rows 'a,b;c,d'")
    parser.add_argument("--sbm-pi", help="class proportions 'p1,p2,...'")
    parser.add_argument("--bandwidth", type=float, default=25.0)
    parser.add_argument("--latent-law", default="standard_normal",
                        choices=["uniform_01", "standard_normal"])
    parser.add_argument("--eigenvalues", help="lowrank eigenvalues 'l1,l2,...'")


def _model_from_args(args):
    keys = {"model": args.model}
    if args.sbm_b is not None:
        keys["sbm_b"] = args.sbm_b
    if args.sbm_pi is not None:
        keys["sbm_pi"] = args.sbm_pi
    keys["bandwidth"] = args.bandwidth
    keys["latent_law"] = args.latent_law
    if args.eigenvalues is not None:
        keys["eigenvalues"] = args.eigenvalues
    return fileio.build_model_from_keys(keys)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="netsub",
        description="Subsampling inference for sparse-graphon networks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="simulate a graph, write an edge list")
    _add_model_arguments(p)
    p.add_argument("--sparsity", default="constant:1",
                   help="'exponent:<gamma>' or 'constant:<nu>'")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("spectrum", help="normalized extreme eigenvalues")
    p.add_argument("--graph", required=True)
    p.add_argument("--k-pos", type=int, default=5)
    p.add_argument("--k-neg", type=int, default=0)
    p.add_argument("--rho-mode", default="estimated")
    p.add_argument("--out", required=True)

    p = sub.add_parser("counts", help="normalized motif counts")
    p.add_argument("--graph", required=True)
    p.add_argument("--motifs", default="edge,twostar,triangle",
                   help=f"comma list from: {','.join(sorted(MOTIFS))}")
    p.add_argument("--rho-mode", default="estimated")
    p.add_argument("--out", required=True)

    p = sub.add_parser("ci", help="subsampling confidence interval")
    p.add_argument("--graph", required=True)
    p.add_argument("--statistic", required=True,
                   help="eig:<r> | gap | ratio:<k> | trace:<p>:<k> | count:<motif>")
    p.add_argument("--scheme", default="vertex", choices=["vertex", "psample"])
    p.add_argument("--b", type=int, help="vertex subsample size")
    p.add_argument("--b-frac", type=float, help="vertex subsample fraction of n")
    p.add_argument("--p", type=float, help="p-sampling inclusion probability")
    p.add_argument("--replicates", type=int, default=500)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rho-mode", default="estimated")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("two-sample", help="two-sample test on two edge lists")
    p.add_argument("--graph1", required=True)
    p.add_argument("--graph2", required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--b-frac", type=float, default=0.33)
    p.add_argument("--replicates", type=int, default=500)
    p.add_argument("--k-max", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("coverage", help="coverage experiment from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="override the config's output path")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("cluster", help="complete-linkage clustering of spectra")
    p.add_argument("--k", type=int, default=10,
                   help="number of top normalized eigenvalues per graph")
    p.add_argument("--out", required=True)
    p.add_argument("graphs", nargs="+", help="edge list files")

    p = sub.add_parser("rho-compare",
                       help="top eigenvalue: known vs estimated density")
    _add_model_arguments(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    return parser


def _run_generate(args) -> str:
    model = _model_from_args(args).with_sparsity(
        fileio.parse_sparsity_token(args.sparsity))
    graph = sample_graph(model, args.n, args.seed)
    fileio.write_edge_list(graph, args.out)
    return f"wrote {args.out} ({graph!r}, model={model_label(model)})"


def _run_spectrum(args) -> str:
    graph = fileio.read_edge_list(args.graph)
    normalization = fileio.parse_rho_mode(args.rho_mode)
    spectrum = normalized_spectrum(graph, args.k_pos, args.k_neg, normalization)
    report = {"n": graph.n, "edges": graph.edge_count,
              "rho_mode": args.rho_mode,
              "rho_hat": fileio.round6(rho_hat(graph)),
              "index_note": "negative indices count from the bottom of the spectrum"}
    for i, value in enumerate(spectrum.top, start=1):
        report[f"eig:{i}"] = fileio.round6(float(value))
    for i, value in enumerate(spectrum.bottom, start=1):
        report[f"eig:-{i}"] = fileio.round6(float(value))
    fileio.write_kv_report(report, args.out)
    return f"wrote {args.out}"


def _run_counts(args) -> str:
    graph = fileio.read_edge_list(args.graph)
    normalization = fileio.parse_rho_mode(args.rho_mode)
    report = {"n": graph.n, "edges": graph.edge_count,
              "rho_mode": args.rho_mode}
    for name in args.motifs.split(","):
        name = name.strip()
        if name not in MOTIFS:
            raise fileio.ConfigError(f"unknown motif {name!r}")
        motif = MOTIFS[name]
        report[f"raw:{name}"] = raw_count(graph, motif)
        report[f"count:{name}"] = fileio.round6(
            normalized_count(graph, motif, normalization))
    fileio.write_kv_report(report, args.out)
    return f"wrote {args.out}"


def _resolve_cli_scheme(args, n: int):
    if args.scheme == "vertex":
        if (args.b is None) == (args.b_frac is None):
            raise fileio.ConfigError("vertex scheme needs exactly one of "
                                     "--b or --b-frac")
        b = args.b if args.b is not None else max(2, round(args.b_frac * n))
        return VertexScheme(b)
    if args.p is None:
        raise fileio.ConfigError("psample scheme needs --p")
    return PSampleScheme(args.p)


def _run_ci(args) -> str:
    graph = fileio.read_edge_list(args.graph)
    spec = StatisticSpec(fileio.parse_statistic_token(args.statistic),
                         fileio.parse_rho_mode(args.rho_mode))
    scheme = _resolve_cli_scheme(args, graph.n)
    ci = confidence_interval(graph, spec, scheme, args.replicates, args.level,
                             args.seed, workers=args.workers)
    report = {"statistic": spec.label(),
              "statistic_value": fileio.round6(ci.statistic_value),
              "lower": fileio.round6(ci.lower),
              "upper": fileio.round6(ci.upper),
              "level": fileio.round6(float(args.level)),
              "scheme": scheme.label(), "replicates": args.replicates,
              "seed": args.seed}
    for key, value in sorted(ci.provenance.items()):
        if key in report:
            continue
        report[key] = fileio.round6(value) if isinstance(value, float) else value
    fileio.write_kv_report(report, args.out)
    return (f"wrote {args.out} "
            f"[{report['lower']:.6g}, {report['upper']:.6g}]")


def _run_two_sample(args) -> str:
    g1 = fileio.read_edge_list(args.graph1)
    g2 = fileio.read_edge_list(args.graph2)
    result = two_sample_test(g1, g2, alpha=args.alpha, b_fraction=args.b_frac,
                             replicates=args.replicates, k_max=args.k_max,
                             seed=args.seed, workers=args.workers)
    report = {"statistic": result.statistic.label(),
              "decision": result.decision,
              "alpha": fileio.round6(float(args.alpha)),
              "value_1": fileio.round6(result.value_1),
              "value_2": fileio.round6(result.value_2),
              "ci_1_lower": fileio.round6(result.ci_1.lower),
              "ci_1_upper": fileio.round6(result.ci_1.upper),
              "ci_2_lower": fileio.round6(result.ci_2.lower),
              "ci_2_upper": fileio.round6(result.ci_2.upper),
              "ci_level_each": fileio.round6(result.ci_1.level),
              "construction": result.ci_1.provenance["construction"],
              "rho_mode": result.ci_1.provenance["rho_mode"],
              "tau": result.ci_1.provenance["tau"]}
    for key in ("b_1", "b_2", "rho_hat_test_1", "rho_hat_test_2", "seed",
                "k_max", "b_fraction", "split_fraction"):
        value = result.provenance[key]
        report[key] = fileio.round6(value) if isinstance(value, float) else value
    fileio.write_kv_report(report, args.out)
    return f"wrote {args.out} decision={result.decision}"


def _run_coverage(args) -> str:
    config = fileio.read_config(args.config)
    report = coverage_experiment(config.model, config.n_grid,
                                 config.sparsity_grid, config.scheme_grid,
                                 config.statistics, config.trials,
                                 config.replicates, config.seed,
                                 level=config.level, workers=args.workers)
    out = args.out or config.out
    fileio.write_coverage_report(report, out)
    return f"wrote {out} ({len(report.cells)} cells)"


def _run_cluster(args) -> str:
    items = []
    for path in args.graphs:
        graph = fileio.read_edge_list(path)
        label = os.path.splitext(os.path.basename(path))[0]
        items.append((label, normalized_spectrum(graph, args.k).top))
    dendrogram = cluster_spectra(items)
    lines = ["# leaves"]
    lines += [f"{i} {label}" for i, label in enumerate(dendrogram.leaves)]
    lines.append("# merges (cluster cluster height)")
    lines += [f"{a} {b} {fileio.format_value(float(h))}"
              for a, b, h in dendrogram.merges]
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return f"wrote {args.out} ({len(items)} networks)"


def _run_rho_compare(args) -> str:
    model = _model_from_args(args)
    result = rho_mode_comparison(model, args.n, args.nu, args.trials, args.seed)
    rows = []
    for t in range(args.trials):
        rows.append({"trial": t,
                     "known": fileio.round6(float(result.known[t])),
                     "estimated": fileio.round6(float(result.estimated[t])),
                     "rho_known": fileio.round6(result.rho_known),
                     "rho_mode": result.rho_mode,
                     "var_known": fileio.round6(result.known_variance),
                     "var_estimated": fileio.round6(result.estimated_variance),
                     "seed": args.seed})
    table = fileio.serialize_table(
        rows, ["trial", "known", "estimated", "rho_known", "rho_mode",
               "var_known", "var_estimated", "seed"])
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(table)
    return f"wrote {args.out} ({args.trials} paired draws)"


_RUNNERS = {
    "generate": _run_generate,
    "spectrum": _run_spectrum,
    "counts": _run_counts,
    "ci": _run_ci,
    "two-sample": _run_two_sample,
    "coverage": _run_coverage,
    "cluster": _run_cluster,
    "rho-compare": _run_rho_compare,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        message = _RUNNERS[args.command](args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(message)
    return 0


if __name__ == "__main__":
    sys.exit(main())
