"""Command-line front end: ``hyperblock <subcommand> ...``.

Every output file carries a manifest (subcommand, flags, seed, paths and
package version) so results can be traced back to the command that made
them.  Text and CSV outputs hold it in a ``# manifest: {...}`` comment
line, JSON outputs under a ``"manifest"`` key.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from .exceptions import HyperblockError
from .hypergraph import (
    ingest_bipartite,
    largest_component,
    parse_hyperedge_text,
    read_bipartite_csv,
    write_hyperedge_text,
    write_remap_csv,
)
from .metrics import ari, ks_thresholds, msre
from .model import HsbmParams, sample_hsbm
from .selection import icl_table_csv, select_q
from .synth import build_line_hypergraph, gen_line_points, make_scenario, scenario_model, scenario_params
from .vem import FitConfig, fit

logger = logging.getLogger(__name__)
MANIFEST_PREFIX = "# manifest: "


def _version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:  # pragma: no cover - source checkout
        return "0+unknown"


def worker_count(requested: int | None = None) -> int:
    """Workers allowed by ``HYPERBLOCK_THREADS`` (0 or unset means all cores)."""
    cap = int(os.environ.get("HYPERBLOCK_THREADS", "0") or 0)
    cores = os.cpu_count() or 1
    cap = cores if cap <= 0 else cap
    return max(1, min(cap, requested or cap))


def make_manifest(args: argparse.Namespace, inputs=(), outputs=()) -> dict:
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
    return {
        "subcommand": args.command,
        "flags": flags,
        "seed": getattr(args, "seed", None),
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "version": _version(),
    }


def manifest_line(manifest: dict) -> str:
    return "manifest: " + json.dumps(manifest, sort_keys=True)


def read_manifest(text: str) -> dict | None:
    for line in text.splitlines():
        if line.startswith(MANIFEST_PREFIX):
            return json.loads(line[len(MANIFEST_PREFIX):])
    return None


def _fmt(x: float, precision: int) -> str:
    return f"{x:.{precision}g}"


def _write(path, text: str):
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _replicate_path(path, index: int, replicates: int):
    if path is None or replicates <= 1:
        return path
    p = Path(path)
    return p.with_name(f"{p.stem}.r{index}{p.suffix}")


def _replicate_prefix(prefix: str, index: int, replicates: int) -> str:
    return prefix if replicates <= 1 else f"{prefix}.r{index}"


def _fan_out(func, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, jobs))
    return [func(job) for job in jobs]


def _seed_for(args, index):
    return None if args.seed is None else args.seed + index


def truth_csv(z, node_ids=None, header=()) -> str:
    out = io.StringIO()
    for line in header:
        out.write(f"# {line}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["node", "group"])
    ids = range(len(z)) if node_ids is None else node_ids
    for node, g in zip(ids, z):
        writer.writerow([int(node), int(g)])
    return out.getvalue()


def read_truth_csv(text: str) -> dict[int, int]:
    lines = [l for l in text.splitlines() if l.strip() and not l.startswith("#")]
    reader = csv.DictReader(lines)
    key = "group" if reader.fieldnames and "group" in reader.fieldnames else "label"
    return {int(row["node"]): int(row[key]) for row in reader}


# --- subcommands -----------------------------------------------------------


def _sample_one(job):
    args, index = job
    seed = _seed_for(args, index)
    s = make_scenario(args.scenario)
    params = scenario_model(s, args.n)
    H, z = sample_hsbm(params, args.n, seed=seed)
    out = _replicate_path(args.out, index, args.replicates)
    truth = _replicate_path(args.truth, index, args.replicates)
    outputs = [p for p in (out, truth, args.params) if p]
    manifest = make_manifest(args, outputs=outputs)
    manifest["seed"] = seed
    header = [manifest_line(manifest), f"n {H.n}"]
    _write(out, write_hyperedge_text(H, header))
    if truth:
        _write(truth, truth_csv(z, header=[manifest_line(manifest)]))
    if args.params and index == 0:
        _write(args.params, json.dumps({"manifest": manifest, **params.to_dict()}, indent=2) + "\n")
    return str(out)


def cmd_sample(args):
    jobs = [(args, i) for i in range(args.replicates)]
    for path in _fan_out(_sample_one, jobs, worker_count(args.replicates)):
        print(path)
    return 0


def _load_hypergraph(path):
    text = Path(path).read_text()
    H, external = parse_hyperedge_text(text, compact=True)
    return H, external, read_manifest(text)


def _fit_config(args, seed):
    return FitConfig(
        epsilon=args.epsilon,
        U_max=args.umax,
        T_max=args.tmax,
        init=args.init,
        submodel=getattr(args, "submodel", None) or getattr(args, "variant", "full"),
        seed=seed,
        kmeans_restarts=args.restarts,
    )


def _fit_one(job):
    args, index = job
    seed = _seed_for(args, index)
    H, external, source = _load_hypergraph(args.input)
    result = fit(H, args.q, _fit_config(args, seed))
    out = _replicate_path(args.out, index, args.replicates)
    manifest = make_manifest(args, inputs=[args.input], outputs=[out] if out else [])
    manifest["seed"] = seed
    payload = {"manifest": manifest, "source_manifest": source, "node_ids": external.tolist()}
    payload.update(result.to_dict())
    payload["elbo"] = result.elbo
    payload["n_iter"] = result.n_iter
    text = json.dumps(payload, indent=2) + "\n"
    if out:
        _write(out, text)
    return out, text, result


def cmd_fit(args):
    jobs = [(args, i) for i in range(args.replicates)]
    for out, text, result in _fan_out(_fit_one, jobs, worker_count(args.replicates)):
        if out:
            print(f"{out}\telbo={_fmt(result.elbo, args.precision)}\tconverged={result.converged}")
        else:
            sys.stdout.write(text)
    return 0


def cmd_select(args):
    H, _, _ = _load_hypergraph(args.input)
    if args.qmin < 1 or args.qmax < args.qmin:
        raise ValueError("need 1 <= qmin <= qmax")
    cfg = _fit_config(args, args.seed)
    sel = select_q(H, range(args.qmin, args.qmax + 1), cfg, args.variant,
                   workers=worker_count(args.qmax - args.qmin + 1))
    manifest = make_manifest(args, inputs=[args.input], outputs=[args.out] if args.out else [])
    text = icl_table_csv(sel, args.precision, header=[manifest_line(manifest), f"best_q {sel.best_q}"])
    if args.out:
        _write(args.out, text)
        print(f"best_q={sel.best_q}")
    else:
        sys.stdout.write(text)
    return 0


def _lines_one(job):
    args, index = job
    seed = _seed_for(args, index)
    # one seed stream for the points, an independent child for the triplets
    point_seed, edge_seed = np.random.SeedSequence(seed).spawn(2)
    ds = gen_line_points(args.lines, args.points, args.noise, args.sd, seed=point_seed)
    lh = build_line_hypergraph(ds, target_edges=args.target_edges, seed=edge_seed)
    prefix = _replicate_prefix(args.out_prefix, index, args.replicates)
    paths = [f"{prefix}.points.csv", f"{prefix}.txt", f"{prefix}.labels.csv"]
    manifest = make_manifest(args, outputs=paths)
    manifest["seed"] = seed
    head = f"# {manifest_line(manifest)}\n"

    pts = io.StringIO()
    pts.write(head)
    w = csv.writer(pts, lineterminator="\n")
    w.writerow(["x", "y", "label"])
    for (x, y), lab in zip(ds.points.tolist(), ds.labels.tolist()):
        w.writerow([_fmt(x, args.precision), _fmt(y, args.precision), lab])
    _write(paths[0], pts.getvalue())

    _write(paths[1], write_hyperedge_text(
        lh.H, [manifest_line(manifest), f"n {lh.H.n}", f"signal {lh.n_signal}", f"noise {lh.n_noise}"]))

    labs = io.StringIO()
    labs.write(head)
    w = csv.writer(labs, lineterminator="\n")
    w.writerow(["node", "label", "isolated"])
    for i, (lab, iso) in enumerate(zip(lh.labels.tolist(), lh.isolated.tolist())):
        w.writerow([i, lab, int(iso)])
    _write(paths[2], labs.getvalue())
    return prefix, len(lh.H.edges), int(lh.isolated.sum())


def cmd_lines(args):
    jobs = [(args, i) for i in range(args.replicates)]
    for prefix, n_edges, n_iso in _fan_out(_lines_one, jobs, worker_count(args.replicates)):
        print(f"{prefix}\tedges={n_edges}\tisolated={n_iso}")
    return 0


def cmd_ingest(args):
    records = read_bipartite_csv(Path(args.bipartite).read_text())
    H, authors, report = ingest_bipartite(records, args.mcap)
    ids = list(range(H.n))
    if args.main_component:
        H, ids = largest_component(H)
        ids = ids.tolist()
    manifest = make_manifest(args, inputs=[args.bipartite], outputs=[p for p in (args.out, args.map) if p])
    counts = H.size_counts()
    header = [manifest_line(manifest), f"n {H.n}",
              "sizes " + " ".join(f"{m}:{c}" for m, c in sorted(counts.items()))]
    _write(args.out, write_hyperedge_text(H, header))
    if args.map:
        _write(args.map, write_remap_csv([authors[i] for i in ids], [manifest_line(manifest)]))
    total = max(len(H.edges), 1)
    shares = " ".join(f"{m}:{_fmt(100 * c / total, args.precision)}%" for m, c in sorted(counts.items()))
    print(f"nodes={H.n}\thyperedges={len(H.edges)}\tshares={shares}")
    print(f"papers={report.n_papers}\ttoo_large={report.n_too_large}\t"
          f"single_author={report.n_single_author}\tduplicates={report.n_duplicate_sets}")
    return 0


def cmd_ks(args):
    s = make_scenario(args.scenario)
    values = scenario_params(s, args.n)
    p = args.precision
    for m in (2, 3):
        ks, kst = ks_thresholds(s.pi, values["alpha"][m], values["beta"][m], m)
        print(f"KS_{m} = {ks:.{p - 1}e}")
        print(f"KStilde_{m} = {kst:.{p - 1}e}")
    return 0


def cmd_metrics(args):
    result = json.loads(Path(args.fit).read_text())
    truth = read_truth_csv(Path(args.truth).read_text())
    node_ids = result.get("node_ids") or list(range(len(result["labels"])))
    missing = [v for v in node_ids if v not in truth]
    if missing:
        raise ValueError(f"{len(missing)} fitted nodes missing from the truth file")
    est = np.asarray(result["labels"])
    true = np.array([truth[v] for v in node_ids])
    score = ari(est, true)
    err = float("nan")
    if args.true_params:
        tp = json.loads(Path(args.true_params).read_text())
        err = msre(HsbmParams.from_dict(result), est, HsbmParams.from_dict(tp), true)
    source = result.get("source_manifest") or {}
    setting = (source.get("flags") or {}).get("scenario", "")
    seed = (source.get("seed") if source else None)
    manifest = make_manifest(args, inputs=[p for p in (args.fit, args.truth, args.true_params) if p],
                             outputs=[args.out] if args.out else [])
    out = io.StringIO()
    out.write(f"# {manifest_line(manifest)}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["seed", "n", "setting", "ari", "msre"])
    w.writerow(["" if seed is None else seed, len(est), setting, _fmt(score, args.precision),
                _fmt(err, args.precision)])
    if args.out:
        _write(args.out, out.getvalue())
    sys.stdout.write(out.getvalue())
    return 0


# --- parser ----------------------------------------------------------------


def _add_fit_flags(p, submodel_flag: str):
    p.add_argument("--in", dest="input", required=True, help="hypergraph text file")
    if submodel_flag == "submodel":
        p.add_argument("--submodel", choices=("full", "affm", "aff"), default="full")
    else:
        p.add_argument("--variant", choices=("full", "affm", "aff"), default="full")
    p.add_argument("--init", choices=("random", "spectral", "absolute", "all"), default="spectral")
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--umax", type=int, default=50)
    p.add_argument("--tmax", type=int, default=50)
    p.add_argument("--restarts", type=int, default=100, help="k-means restarts for spectral inits")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperblock", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, replicates=False):
        p.add_argument("--precision", type=int, default=6, help="significant digits in printed numbers")
        if replicates:
            p.add_argument("--replicates", type=int, default=1,
                           help="run seeds seed..seed+R-1, writing one file per replicate")

    p = sub.add_parser("sample", help="draw a hypergraph from a simulation scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--truth", help="CSV of latent groups")
    p.add_argument("--params", help="JSON of the true parameters")
    common(p, replicates=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("fit", help="variational EM fit with a fixed number of groups")
    _add_fit_flags(p, "submodel")
    p.add_argument("--q", type=int, required=True)
    common(p, replicates=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("select", help="ICL sweep over the number of groups")
    _add_fit_flags(p, "variant")
    p.add_argument("--qmin", type=int, default=1)
    p.add_argument("--qmax", type=int, default=5)
    common(p)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("lines", help="line-clustering 3-uniform hypergraph")
    p.add_argument("--lines", type=int, default=2)
    p.add_argument("--points", type=int, default=30, help="points per line")
    p.add_argument("--noise", type=int, default=40, help="uniform noise points")
    p.add_argument("--sd", type=float, default=0.01)
    p.add_argument("--target-edges", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-prefix", required=True)
    common(p, replicates=True)
    p.set_defaults(func=cmd_lines)

    p = sub.add_parser("ingest", help="co-authorship hypergraph from paper,author incidences")
    p.add_argument("--bipartite", required=True)
    p.add_argument("--mcap", type=int, default=4)
    p.add_argument("--main-component", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--map")
    common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("ks", help="Kesten-Stigum quantities of a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--n", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_ks)

    p = sub.add_parser("metrics", help="ARI (and MSRE) of a fit against the truth")
    p.add_argument("--fit", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--true-params")
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=cmd_metrics)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "precision", 6) < 1 or getattr(args, "replicates", 1) < 1:
        parser.print_usage(sys.stderr)
        print("hyperblock: error: --precision and --replicates must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (HyperblockError, ValueError, OSError, KeyError) as exc:
        print(f"hyperblock {args.command}: error: {exc}", file=sys.stderr)
        return 1


def main():  # pragma: no cover - console entry point
    sys.exit(run())
