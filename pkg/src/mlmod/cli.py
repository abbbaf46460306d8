"""Command-line front end: ``mlmod <command> ...``.

Every command writes its outputs plus a ``manifest.json`` into ``--out``;
``mlmod rerun MANIFEST --out DIR`` repeats a recorded run.
Exit codes: 0 success, 2 usage error, 3 invalid input data, 4 numerical or
degenerate-estimate failure.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from importlib import metadata
from pathlib import Path

import numpy as np

from . import estimator, evalx, itermodmax, netcore, synth
from .netcore import InterlayerTopology, TopologyKind, ValidationError
from .optimizer import MovePolicy, OptimizerConfig, maximize
from .params import ModularityParams

log = logging.getLogger("mlmod")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
THREADS_ENV = "MLMOD_THREADS"


class UsageError(Exception):
    pass


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _floats(s: str):
    """Scalar or comma-separated per-layer list."""
    try:
        vals = [float(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or comma-separated numbers, got {s!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty value")
    return vals[0] if len(vals) == 1 else np.array(vals)


def _grid(s: str) -> np.ndarray:
    """``a:b:n`` (n points from a to b inclusive) or a comma-separated list."""
    if ":" in s:
        try:
            a, b, n = s.split(":")
            return np.linspace(float(a), float(b), int(n))
        except ValueError:
            raise argparse.ArgumentTypeError(f"grid must be 'start:stop:count', got {s!r}") from None
    return np.atleast_1d(_floats(s)).astype(float)


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, Path):
        return str(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_rows(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([itermodmax._fmt(v) for v in r])


# -- shared argument groups ---------------------------------------------------

def _add_network_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("network", type=Path, help="edge file with 't i j' lines")
    topo = p.add_mutually_exclusive_group(required=True)
    topo.add_argument("--temporal", action="store_true", help="couple each node to itself in the next layer")
    topo.add_argument("--multiplex", action="store_true", help="couple each node across all layer pairs")
    topo.add_argument("--multilevel", action="store_true", help="couple each node to its parent (needs --parents)")
    p.add_argument("--parents", type=Path, help="parent-map file with 't i p' lines (multilevel only)")
    p.add_argument("--directed", action="store_true", help="read layers as directed")


def _add_optimizer_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--policy", choices=[m.value for m in MovePolicy], default=MovePolicy.BEST.value)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--postprocess", action="store_true",
                   help="relabel communities to increase persistence (temporal and multilevel only)")


def _load_inputs(args):
    """Network and topology from the shared arguments, with input digests."""
    if args.parents is not None and not args.multilevel:
        raise UsageError("--parents is only valid with --multilevel")
    if args.multilevel and args.parents is None:
        raise UsageError("--multilevel needs --parents FILE")
    net = netcore.load_network(args.network, directed=args.directed)
    digests = {str(args.network): _sha256(args.network)}
    if args.multilevel:
        parents = netcore.load_parent_maps(args.parents, net.layer_sizes)
        topo = InterlayerTopology.multilevel(parents)
        digests[str(args.parents)] = _sha256(args.parents)
    elif args.multiplex:
        topo = InterlayerTopology.multiplex()
    else:
        topo = InterlayerTopology.temporal()
    topo.validate(net)
    return net, topo, digests


def _optimizer_cfg(args) -> OptimizerConfig:
    return OptimizerConfig(move_policy=MovePolicy(args.policy), rng_seed=args.seed,
                           postprocess_persistence=args.postprocess)


# -- commands -----------------------------------------------------------------

def cmd_detect(args, out: Path) -> dict:
    net, topo, digests = _load_inputs(args)
    params = ModularityParams(gamma=args.gamma, omega=args.omega, beta=args.beta)
    part, q = maximize(net, topo, params, _optimizer_cfg(args))
    netcore.save_partition(part, out / "partition.txt")
    res = {"Q": q, "num_communities": part.num_communities(),
           "communities_per_layer": [int(len(np.unique(g))) for g in part.layers()]}
    _write_json(res, out / "result.json")
    print(f"Q = {q:.9g}, {part.num_communities()} communities")
    return digests


def cmd_iterate(args, out: Path) -> dict:
    if args.layer_dependent and args.multiplex:
        raise UsageError("--layer-dependent is not available with --multiplex")
    if args.fix_gamma and not args.layer_dependent:
        raise UsageError("--fix-gamma needs --layer-dependent")
    net, topo, digests = _load_inputs(args)
    cfg = itermodmax.IterConfig(
        gamma0=args.gamma0, omega0=args.omega0, max_iters=args.max_iters, tol=args.tol, K_max=args.kmax,
        gamma_shrink=args.gamma_shrink, fix_gamma=args.fix_gamma, omega_max=args.omega_max,
        trials_per_iter=args.trials, warm_start=not args.no_warm_start, optimizer=_optimizer_cfg(args))
    fn = itermodmax.iterate_layer_dependent if args.layer_dependent else itermodmax.iterate
    res = fn(net, topo, cfg)
    itermodmax.write_trajectory_jsonl(res, out / "trajectory.jsonl")
    netcore.save_partition(res.partition, out / "partition.txt")
    summ = itermodmax.summary(res)
    _write_json(summ, out / "summary.json")
    if res.message and not res.converged and res.trajectory and res.trajectory[-1].action == "degenerate":
        raise estimator.DegenerateEstimate(res.message)
    g = np.round(np.mean(res.gamma), 6)
    w = np.round(np.mean(res.omega), 6)
    print(f"converged={res.converged} iterations={res.iterations} gamma={g} omega={w}")
    return digests


def cmd_multirun(args, out: Path) -> dict:
    if args.layer_dependent and args.multiplex:
        raise UsageError("--layer-dependent is not available with --multiplex")
    if args.runs < 1:
        raise UsageError("--runs must be at least 1")
    net, topo, digests = _load_inputs(args)
    cfg = itermodmax.IterConfig(max_iters=args.max_iters, tol=args.tol, K_max=args.kmax,
                                omega_max=args.omega_max, trials_per_iter=args.trials,
                                optimizer=_optimizer_cfg(args))
    mr = itermodmax.multi_run(net, topo, cfg, args.runs, seed=args.seed, gamma_range=tuple(args.gamma_range),
                              omega_range=tuple(args.omega_range), layer_dependent=args.layer_dependent,
                              workers=args.threads)
    itermodmax.write_records_csv(mr.records, out / "runs.csv")
    itermodmax.write_matrix_csv(mr.nmi, out / "nmi_matrix.csv")
    pdir = out / "partitions"
    pdir.mkdir(exist_ok=True)
    for k, r in enumerate(mr.results):
        netcore.save_partition(r.partition, pdir / f"run_{k:04d}.txt")
    n_conv = sum(r["converged"] for r in mr.records)
    print(f"{n_conv}/{args.runs} runs converged")
    return digests


def cmd_generate(args, out: Path) -> dict:
    digests = {}
    if args.toy_merge:
        net, part = synth.toy_merge_network(args.seed)
        topo = InterlayerTopology.temporal()
    else:
        kind = (TopologyKind.MULTIPLEX if args.multiplex else
                TopologyKind.MULTILEVEL if args.multilevel else TopologyKind.TEMPORAL)
        if args.parents is not None and kind is not TopologyKind.MULTILEVEL:
            raise UsageError("--parents is only valid with --multilevel")
        if args.N is None or args.T is None or args.K is None:
            raise UsageError("generation needs --N, --T and --K (or --toy-merge)")
        by_prob = args.p_in is not None or args.p_out is not None
        by_degree = args.c is not None or args.eps is not None
        if by_prob == by_degree:
            raise UsageError("give either --p-in/--p-out or --c/--eps")
        topo = None
        if kind is TopologyKind.MULTILEVEL:
            if args.parents is None:
                raise UsageError("--multilevel needs --parents FILE")
            topo = InterlayerTopology.multilevel(netcore.load_parent_maps(args.parents))
            digests[str(args.parents)] = _sha256(args.parents)
            if not all(len(p) == args.N for p in topo.parents):
                raise ValidationError("generated layers have N nodes each; parent maps must match")
        cfg = synth.GeneratorConfig(N=args.N, T=args.T, K=args.K, eta=args.eta, p_in=args.p_in,
                                    p_out=args.p_out, c=args.c, eps=args.eps, kind=kind, rng_seed=args.seed)
        net, part, topo = synth.generate(cfg, topo)
    netcore.save_network(net, out / "network.txt")
    netcore.save_partition(part, out / "planted.txt")
    if topo.kind is TopologyKind.MULTILEVEL:
        netcore.save_parent_maps(topo.parents, out / "parents.txt")
    print(f"{net.num_layers} layers, {net.num_states} node-layer pairs")
    return digests


def cmd_evaluate(args, out: Path) -> dict:
    if (args.b is None) == (args.metadata is None):
        raise UsageError("give exactly one of --b PARTITION or --metadata CSV")
    a = netcore.load_partition(args.a)
    digests = {str(args.a): _sha256(args.a)}
    rows = []
    if args.b is not None:
        b = netcore.load_partition(args.b, a.layer_sizes)
        digests[str(args.b)] = _sha256(args.b)
        vals = evalx.layer_nmis(a, b, args.normalization)
        rows = [[f"layer_{t + 1}", v] for t, v in enumerate(vals)]
        rows.append(["layer_average", float(vals.mean())])
        header = ["quantity", "nmi"]
    else:
        md = netcore.load_metadata(args.metadata, bin_columns=args.bin_columns or (), bin_width=args.bin_width,
                                   id_column=args.id_column)
        digests[str(args.metadata)] = _sha256(args.metadata)
        header = ["column", "nmi"]
        for col, labels in md.items():
            rows.append([col, evalx.metadata_nmi(a, labels, args.layer_mode, args.normalization).value])
    _write_rows(out / "metrics.csv", header, rows)
    for r in rows:
        print(f"{r[0]}: {r[1]:.4f}")
    return digests


def _sweep_cell(net, topo, ref, args, g, w):
    nmis, ups = [], []
    for k in range(args.trials):
        cfg = OptimizerConfig(move_policy=MovePolicy(args.policy), rng_seed=args.seed + k)
        part, _ = maximize(net, topo, ModularityParams(gamma=g, omega=w), cfg)
        if ref is not None:
            nmis.append(evalx.layer_avg_nmi(part, ref))
        try:
            g_new, w_new, *_ = itermodmax._estimate_uniform(net, topo, part, args.omega_max)
            ups.append((g_new, w_new))
        except estimator.DegenerateEstimate:
            ups.append((np.nan, np.nan))
    u = np.array(ups)
    with np.errstate(all="ignore"):
        mean = np.nanmean(u, axis=0) if np.isfinite(u).any() else np.array([np.nan, np.nan])
    n_valid = int(np.isfinite(u[:, 0]).sum())
    return (float(np.mean(nmis)) if nmis else np.nan), mean, n_valid


def cmd_sweep(args, out: Path) -> dict:
    if args.reference is None and not args.no_nmi:
        raise UsageError("--reference PARTITION is needed for the NMI heatmap (or pass --no-nmi)")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    net, topo, digests = _load_inputs(args)
    ref = None
    if args.reference is not None:
        ref = netcore.load_partition(args.reference, net.layer_sizes)
        digests[str(args.reference)] = _sha256(args.reference)
    cells = [(g, w) for g in args.gammas for w in args.omegas]
    with ThreadPoolExecutor(max_workers=args.threads) as ex:
        res = list(ex.map(lambda c: _sweep_cell(net, topo, ref, args, *c), cells))
    heat, arrows = [], []
    for (g, w), (nmi, up, n_valid) in zip(cells, res):
        heat.append([g, w, nmi])
        arrows.append([g, w, up[0], up[1], up[0] - g, up[1] - w, n_valid])
    if ref is not None:
        _write_rows(out / "heatmap.csv", ["gamma", "omega", "mean_nmi"], heat)
    _write_rows(out / "arrows.csv",
                ["gamma", "omega", "gamma_next", "omega_next", "d_gamma", "d_omega", "valid_trials"], arrows)
    print(f"{len(cells)} grid cells x {args.trials} trials")
    return digests


def cmd_qsigma(args, out: Path) -> dict:
    rows = []
    for T in args.T:
        for p in args.p:
            t0 = time.perf_counter()
            r = synth.qsigma_table(p, args.K, T, args.trials, seed=args.seed)
            rows.append([p, args.K, T, args.trials, r["mean"], r["std"], time.perf_counter() - t0])
            print(f"p={p:g} T={T}: mean={r['mean']:.4f} std={r['std']:.4f}")
    _write_rows(out / "qsigma.csv", ["p", "K", "T", "trials", "mean", "std", "seconds"], rows)
    return {}


def rerun_argv(manifest_path, out) -> list:
    """Argument list of a recorded run with its output directory replaced."""
    with open(manifest_path, encoding="utf-8") as fh:
        argv = list(json.load(fh)["argv"])
    if "--out" not in argv:
        raise ValidationError(f"{manifest_path}: manifest has no --out argument")
    argv[argv.index("--out") + 1] = str(out)
    return argv


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mlmod", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--out", type=Path, required=True, help="output directory")
        return p

    p = add("detect", "maximize multilayer modularity once")
    _add_network_args(p)
    p.add_argument("--gamma", type=_floats, default=1.0, help="resolution, scalar or per layer")
    p.add_argument("--omega", type=_floats, default=1.0,
                   help="coupling per interlayer link (counted once), scalar or per layer")
    p.add_argument("--beta", type=_floats, default=1.0, help="layer weights, scalar or per layer")
    _add_optimizer_args(p)
    p.set_defaults(func=cmd_detect)

    def iter_args(p):
        p.add_argument("--max-iters", type=int, default=30)
        p.add_argument("--tol", type=float, default=1e-3)
        p.add_argument("--kmax", type=int, default=None)
        p.add_argument("--omega-max", type=float, default=estimator.OMEGA_MAX)
        p.add_argument("--trials", type=int, default=1, help="optimizer restarts per iteration")
        p.add_argument("--layer-dependent", action="store_true")

    p = add("iterate", "alternate maximization and parameter estimation")
    _add_network_args(p)
    p.add_argument("--gamma0", type=_floats, default=1.0)
    p.add_argument("--omega0", type=_floats, default=1.0)
    p.add_argument("--gamma-shrink", type=float, default=0.8)
    p.add_argument("--fix-gamma", action="store_true")
    p.add_argument("--no-warm-start", action="store_true",
                   help="do not reuse the previous iteration's partition as an extra start")
    iter_args(p)
    _add_optimizer_args(p)
    p.set_defaults(func=cmd_iterate)

    p = add("multirun", "iterate from many random starting points")
    _add_network_args(p)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--gamma-range", type=float, nargs=2, default=(0.0, 5.0), metavar=("LO", "HI"))
    p.add_argument("--omega-range", type=float, nargs=2, default=(0.0, 1.0), metavar=("LO", "HI"))
    p.add_argument("--threads", type=int, default=_default_threads())
    iter_args(p)
    _add_optimizer_args(p)
    p.set_defaults(func=cmd_multirun)

    p = add("generate", "sample a benchmark network and its planted partition")
    p.add_argument("--toy-merge", action="store_true", help="two-layer network with 20 groups merging into 10")
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--temporal", action="store_true")
    kind.add_argument("--multiplex", action="store_true")
    kind.add_argument("--multilevel", action="store_true")
    p.add_argument("--parents", type=Path)
    p.add_argument("--N", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--eta", type=_floats, default=0.0, help="copying probability, scalar or per layer")
    p.add_argument("--p-in", type=float)
    p.add_argument("--p-out", type=float)
    p.add_argument("--c", type=float, help="mean degree")
    p.add_argument("--eps", type=float, help="p_out / p_in")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)

    p = add("evaluate", "compare a partition with another partition or with node metadata")
    p.add_argument("--a", type=Path, required=True)
    p.add_argument("--b", type=Path)
    p.add_argument("--metadata", type=Path)
    p.add_argument("--bin-columns", nargs="*", default=None, help="numeric metadata columns to bin")
    p.add_argument("--bin-width", type=float, default=5.0)
    p.add_argument("--id-column", default=None)
    p.add_argument("--layer-mode", choices=[m.value for m in evalx.LayerMode], default=evalx.LayerMode.PER_LAYER.value)
    p.add_argument("--normalization", choices=[m.value for m in evalx.Normalization],
                   default=evalx.Normalization.MEAN.value)
    p.set_defaults(func=cmd_evaluate)

    p = add("sweep", "NMI heatmap and one-step update field over a (gamma, omega) grid")
    _add_network_args(p)
    p.add_argument("--gammas", type=_grid, required=True, help="'start:stop:count' or comma list")
    p.add_argument("--omegas", type=_grid, required=True, help="'start:stop:count' or comma list")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--reference", type=Path)
    p.add_argument("--no-nmi", action="store_true", help="only write the update field")
    p.add_argument("--omega-max", type=float, default=estimator.OMEGA_MAX)
    p.add_argument("--policy", choices=[m.value for m in MovePolicy], default=MovePolicy.BEST.value)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.set_defaults(func=cmd_sweep)

    p = add("qsigma", "statistics of the layer-order posterior of multiplex labels")
    p.add_argument("--p", type=float, nargs="+", required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--T", type=int, nargs="+", required=True)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_qsigma)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if argv[:1] == ["rerun"]:
        # mlmod rerun MANIFEST --out DIR
        if len(argv) != 4 or argv[2] != "--out":
            print("usage: mlmod rerun MANIFEST --out DIR", file=sys.stderr)
            return EXIT_USAGE
        try:
            argv = rerun_argv(argv[1], argv[3])
        except (OSError, ValueError, KeyError) as exc:
            print(f"mlmod rerun: invalid manifest: {exc}", file=sys.stderr)
            return EXIT_DATA
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    out: Path = args.out
    t0 = time.perf_counter()
    try:
        out.mkdir(parents=True, exist_ok=True)
        digests = args.func(args, out)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"mlmod {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except estimator.DegenerateEstimate as exc:
        print(f"mlmod {args.command}: degenerate estimate: {exc}", file=sys.stderr)
        code = EXIT_NUMERIC
    except (ValidationError, FileNotFoundError) as exc:
        print(f"mlmod {args.command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (FloatingPointError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"mlmod {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    else:
        code = EXIT_OK
        digests = digests or {}
    params = {k: v for k, v in vars(args).items() if k not in ("func", "verbose")}
    manifest = {
        "command": args.command, "argv": argv, "params": params, "seed": params.get("seed"),
        "version": _version(), "inputs": digests if code == EXIT_OK else {},
        "duration_seconds": time.perf_counter() - t0, "exit_code": code,
    }
    _write_json(manifest, out / "manifest.json")
    return code


if __name__ == "__main__":
    sys.exit(main())
