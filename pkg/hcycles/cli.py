"""Command line interface for hcycles.

Every command writes a machine readable report to stdout, or to --out.
Logging goes to stderr. Exit codes: 0 success, 2 input error, 3 budget or
overflow, 4 internal invariant breach.
"""
import argparse
import concurrent.futures
import csv
import io
import itertools
import json
import logging
import sys

import numpy as np

from hcycles import count_heavy
from hcycles import exact
from hcycles import find_heavy
from hcycles import graph
from hcycles import hardness
from hcycles import matmul
from hcycles import template
from hcycles import utils

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_INVARIANT = 4

BENCH_COLUMNS = [
    "n", "t", "h", "eps", "preset", "status", "estimate", "oracle",
    "success", "stopping_i", "fallback", "scalar_mults", "mm_calls",
    "largest_shape",
]

BENCH_EPILOG = """CSV columns, one row per (n, t) cell in sweep order:
  {}
status is "ok" or "infeasible"; estimate and oracle are empty for
infeasible cells. success means |estimate - oracle| <= eps * oracle.
""".format(", ".join(BENCH_COLUMNS))


def parse_cfg_value(text):
    """Parse a --cfg value as bool, none, int or float."""
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    if lowered in ("none", "null"):
        return None
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


def parse_cfg_overrides(items):
    """Turn a list of key=value strings into a dict."""
    overrides = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise utils.InputError(
                "Expected --cfg key=value, got {!r}".format(item))
        overrides[key.strip()] = parse_cfg_value(value)
    return overrides


def build_config(args):
    """Get the EstimatorConfig described by the command line."""
    overrides = parse_cfg_overrides(getattr(args, "cfg", None))
    overrides["h"] = args.h
    if getattr(args, "eps", None) is not None:
        overrides["eps"] = args.eps
    if getattr(args, "scale_mode", None) is not None:
        overrides["scale_mode"] = args.scale_mode
    return count_heavy.EstimatorConfig(**overrides)


def _to_csv(rows, columns):
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n",
                            extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def emit(args, payload, rows=None, columns=None):
    """Write a report in the requested format.

    Args:
        args: parsed arguments with ``out`` and ``format``.
        payload (dict): JSON report.
        rows (list of dict): table form of the report, used for csv.
        columns (list of str): csv column order.
    """
    if args.format == "csv":
        if rows is None:
            rows = [{key: value for key, value in payload.items()
                     if not isinstance(value, (dict, list))}]
            columns = sorted(rows[0])
        text = _to_csv(rows, columns or (sorted(rows[0]) if rows else []))
    else:
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as out_file:
            out_file.write(text)
        logger.info("Wrote %s", args.out)
    else:
        sys.stdout.write(text)


def cmd_exact(args):
    """Count h-cycles by brute force."""
    g = graph.read_graph(args.input)
    budget = args.budget if args.budget else None
    total, per_vertex = exact.brute_force_cycles(g, args.h, budget)
    payload = {"h": args.h, "n": g.n, "mode": g.mode, "total": total}
    rows = None
    if args.per_vertex:
        payload["per_vertex"] = {str(v): c for v, c in
                                 per_vertex.as_dict().items()}
        rows = [{"vertex": v, "count": c} for v, c in enumerate(per_vertex)]
    emit(args, payload, rows, ["vertex", "count"])
    return EXIT_OK


def cmd_approx(args):
    """Run the doubling estimator."""
    g = graph.read_graph(args.input)
    cfg = build_config(args)
    report = template.doubling(g, cfg.eps, cfg, args.seed)
    emit(args, report.as_dict())
    return EXIT_OK


def cmd_find_heavy(args):
    """Run Find-Heavy once."""
    g = graph.read_graph(args.input)
    cfg = build_config(args)
    wc = matmul.WorkCounter()
    heavy = find_heavy.find_heavy(g, args.lam, cfg, args.seed, wc)
    payload = {
        "h": cfg.h,
        "lam": args.lam,
        "seed": args.seed,
        "heavy": list(heavy),
        "work": wc.summary(),
    }
    emit(args, payload, [{"vertex": v} for v in heavy], ["vertex"])
    return EXIT_OK


def cmd_count_heavy(args):
    """Run Count-Heavy once on a vertex set read from a file."""
    g = graph.read_graph(args.input)
    s = graph.read_vertex_set(args.s_file, g.n)
    cfg = build_config(args)
    band = count_heavy.HeavyBand(args.a, args.b)
    wc = matmul.WorkCounter()
    estimate = count_heavy.count_heavy(g, s, band, cfg.eps, cfg, args.seed,
                                       wc)
    payload = {
        "h": cfg.h,
        "eps": cfg.eps,
        "seed": args.seed,
        "band": band.as_dict(),
        "size_s": len(s),
        "estimate": estimate,
        "work": wc.summary(),
    }
    emit(args, payload)
    return EXIT_OK


def _gap_instance(args):
    spec = hardness.TripartiteSpec.random(
        (args.n, args.n, args.n), args.density, args.seed)
    triangles = spec.triangle_count()
    if args.preset == "blowup":
        g = hardness.triangle_gap_blowup(spec, args.t)
        h, factor = 3, args.t
    else:
        g = hardness.hcycle_gap_layering(spec, args.h, args.t, args.mode)
        h, factor = args.h, hardness.layer_width(args.h, args.t)[1]
    total, per_vertex = exact.brute_force_cycles(g, h, args.budget or None)
    if total != factor * triangles:
        raise utils.InvariantError(
            "Gadget has {} cycles, expected {} x {}.".format(
                total, factor, triangles))
    params = {"n": args.n, "h": h, "t": args.t, "density": args.density,
              "triangles": triangles, "factor": factor, "mode": g.mode}
    return g, hardness.GroundTruth(args.preset, params, total,
                                   list(per_vertex))


def cmd_gen(args):
    """Write a generated graph and its ground truth sidecar."""
    if not args.out:
        raise utils.InputError("gen needs --out for the graph file.")
    if args.preset in ("blowup", "layering"):
        g, truth = _gap_instance(args)
    else:
        options = {"noise": args.noise, "shared": not args.separate}
        g, truth = hardness.plant_instance(
            args.n, args.h, args.t, args.preset, args.seed, args.mode,
            args.budget or None, **options)
    graph.write_graph(g, args.out)
    sidecar = args.out + ".json"
    with open(sidecar, "w") as sidecar_file:
        sidecar_file.write(truth.to_json() + "\n")
    logger.info("Wrote %s and %s", args.out, sidecar)
    return EXIT_OK


def bench_cell(cell):
    """Run one benchmark cell and get its CSV row.

    Args:
        cell (dict): n, t, h, eps, preset, mode, cfg (EstimatorConfig) and
            seed (SeedSequence).
    """
    row = {key: cell[key] for key in ("n", "t", "h", "eps", "preset")}
    instance_seed, run_seed = utils.spawn_seeds(cell["seed"], 2)
    try:
        g, truth = hardness.plant_instance(
            cell["n"], cell["h"], cell["t"], cell["preset"], instance_seed,
            cell["mode"])
    except (utils.InputError, utils.BudgetExceededError) as error:
        logger.warning("Infeasible cell n=%s t=%s: %s", cell["n"], cell["t"],
                       error)
        row["status"] = "infeasible"
        return row
    cfg = cell["cfg"]
    wc = matmul.WorkCounter()
    report = template.doubling(g, cell["eps"], cfg, run_seed, wc)
    summary = wc.summary()
    estimate = report.estimate
    row.update({
        "status": "ok",
        "estimate": estimate,
        "oracle": truth.total,
        "success": (estimate is not None and
                    abs(estimate - truth.total) <= cfg.eps * truth.total),
        "stopping_i": report.stopping_i,
        "fallback": report.fallback,
        "scalar_mults": summary["scalar_mults"],
        "mm_calls": summary["mm_calls"],
        "largest_shape": "x".join(str(d) for d in
                                  summary["largest_shape"] or ()),
    })
    return row


def cmd_bench(args):
    """Sweep a grid of planted instances."""
    cfg = build_config(args)
    grid = list(itertools.product(args.sizes, args.counts))
    cells = [{
        "n": n, "t": t, "h": args.h, "eps": cfg.eps, "preset": args.preset,
        "mode": args.mode, "cfg": cfg, "seed": seed,
    } for (n, t), seed in zip(grid, utils.spawn_seeds(args.seed, len(grid)))]

    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(bench_cell, cells))
    else:
        rows = [bench_cell(cell) for cell in cells]
    emit(args, {"rows": rows}, rows, BENCH_COLUMNS)
    return EXIT_OK


def _random_instance(n, mode, rng):
    density = rng.uniform(0.3, 0.8)
    adj = rng.random((n, n)) < density
    if mode == graph.UNDIRECTED:
        adj = np.triu(adj, 1)
        adj = adj | adj.T
    np.fill_diagonal(adj, False)
    return graph.Graph(adj, mode)


def cmd_verify(args):
    """Compare the matrix counters with brute force on random instances."""
    rng = utils.make_rng(args.seed)
    checked = 0
    mismatches = []
    for index in range(args.instances):
        h = int(rng.choice(args.h_values))
        mode = graph.MODES[index % 2]
        n = int(rng.integers(h, args.max_n + 1))
        g = _random_instance(n, mode, rng)
        coloring = graph.Coloring(rng.integers(1, h + 1, size=n), h)
        s = graph.VertexSet.from_mask(rng.random(n) < 0.5)
        sigma = exact.OrderedPartition(
            [coloring.class_members(i) for i in range(1, h + 1)])
        if exact.count_t_sigma(g, sigma) != exact.brute_force_t_sigma(
                g, sigma):
            mismatches.append({"instance": index, "check": "t_sigma"})
        for k in range(1, h + 1):
            fast = exact.count_colorful_k(g, coloring, s, k)
            slow = exact.brute_force_colorful(g, coloring, s, k)
            if fast != slow:
                mismatches.append({"instance": index, "check": "k", "k": k})
        checked += 1
    payload = {"seed": args.seed, "instances": checked,
               "mismatches": mismatches}
    emit(args, payload)
    if mismatches:
        logger.error("%d mismatches against brute force", len(mismatches))
        return EXIT_INVARIANT
    return EXIT_OK


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--h", type=int, default=3,
                        help="cycle length (default 3)")
    common.add_argument("--out", help="write the report here, not stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for info, -vv for debug logging")
    return common


def _estimator_parser():
    estimator = argparse.ArgumentParser(add_help=False)
    estimator.add_argument("--seed", type=int, required=True,
                           help="random seed, required")
    estimator.add_argument("--eps", type=float, default=None,
                           help="target precision, at most 0.5")
    estimator.add_argument("--scale-mode", choices=count_heavy.SCALE_MODES,
                           default=None)
    estimator.add_argument("--cfg", action="append", default=[],
                           metavar="KEY=VALUE",
                           help="override an EstimatorConfig field")
    return estimator


def build_parser():
    """Get the argument parser with all subcommands."""
    common = _common_parser()
    estimator = _estimator_parser()
    parser = argparse.ArgumentParser(
        prog="hcycles", description="Approximate h-cycle counting.")
    commands = parser.add_subparsers(dest="command")
    commands.required = True

    exact_cmd = commands.add_parser("exact", parents=[common],
                                    help="count cycles by brute force")
    exact_cmd.add_argument("--input", required=True)
    exact_cmd.add_argument("--per-vertex", action="store_true")
    exact_cmd.add_argument("--budget", type=int,
                           default=exact.DEFAULT_ENUMERATION_BUDGET,
                           help="enumeration step limit, 0 for none")
    exact_cmd.set_defaults(handler=cmd_exact)

    approx = commands.add_parser("approx", parents=[common, estimator],
                                 help="estimate the cycle count")
    approx.add_argument("--input", required=True)
    approx.set_defaults(handler=cmd_approx)

    heavy = commands.add_parser("find-heavy", parents=[common, estimator],
                                help="find vertices on many cycles")
    heavy.add_argument("--input", required=True)
    heavy.add_argument("--lam", type=float, required=True,
                       help="heaviness threshold")
    heavy.set_defaults(handler=cmd_find_heavy)

    counting = commands.add_parser(
        "count-heavy", parents=[common, estimator],
        help="estimate the cycles meeting a vertex set")
    counting.add_argument("--input", required=True)
    counting.add_argument("--s-file", required=True,
                          help="file with whitespace separated vertex ids")
    counting.add_argument("--a", type=float, required=True)
    counting.add_argument("--b", type=float, required=True)
    counting.set_defaults(handler=cmd_count_heavy)

    gen = commands.add_parser("gen", parents=[common],
                              help="write a planted or gadget instance")
    gen.add_argument("--preset", required=True,
                     choices=hardness.PRESETS + ("blowup", "layering"))
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--t", type=int, default=1)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--mode", choices=graph.MODES,
                     default=graph.UNDIRECTED)
    gen.add_argument("--noise", type=float, default=0.05)
    gen.add_argument("--density", type=float, default=0.3)
    gen.add_argument("--separate", action="store_true",
                     help="witness preset with three separate triangles")
    gen.add_argument("--budget", type=int,
                     default=exact.DEFAULT_ENUMERATION_BUDGET)
    gen.set_defaults(handler=cmd_gen)

    bench = commands.add_parser(
        "bench", parents=[common, estimator], help="sweep planted instances",
        epilog=BENCH_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    bench.add_argument("--sizes", type=int, nargs="+", required=True)
    bench.add_argument("--counts", type=int, nargs="+", required=True)
    bench.add_argument("--preset", choices=hardness.PRESETS, default="hub")
    bench.add_argument("--mode", choices=graph.MODES,
                       default=graph.UNDIRECTED)
    bench.add_argument("--jobs", type=int, default=1)
    bench.set_defaults(handler=cmd_bench, format="csv")

    verify = commands.add_parser(
        "verify", parents=[common],
        help="check the matrix counters against brute force")
    verify.add_argument("--seed", type=int, required=True)
    verify.add_argument("--instances", type=int, default=50)
    verify.add_argument("--max-n", type=int, default=8)
    verify.add_argument("--h-values", type=int, nargs="+", default=[3, 4])
    verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv=None):
    """Run the command line interface and get the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose,
                                                               2)]
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except utils.InputError as error:
        logger.error("%s", error)
        return EXIT_INPUT
    except (utils.BudgetExceededError, utils.CountOverflowError) as error:
        logger.error("%s", error)
        return EXIT_BUDGET
    except utils.InvariantError as error:
        logger.error("%s", error)
        return EXIT_INVARIANT
    except (IOError, OSError) as error:
        logger.error("%s", error)
        return EXIT_INPUT
