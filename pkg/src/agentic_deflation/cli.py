"""Command-line entry point.

Subcommands: ``synth``, ``baseline``, ``run``, ``eval`` and ``render``. Every
flag can also be given in a JSON file passed with ``--config`` (keys are the
flag names with dashes replaced by underscores); explicit flags win.

Exit status: 0 on success, 1 on usage errors, 2 on runtime failures.
"""
import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .datasets import (
    bundled_digits_path,
    default_cifar_path,
    load_cifar10_bin,
    load_digits_csv,
    sample_indices,
)
from .evaluation import RunRecord, baseline_for, summarize, summary_csv, summary_table
from .matrix import quantize_u8, read_pgm, render_pgm, rmse_to_zero
from .orchestrator import (
    AGENT_KINDS,
    RunConfig,
    StepError,
    build_agents,
    run_deflation,
    trace_from_json,
    trace_to_json,
)
from .permutation import STRATEGIES, apply_permutation
from .rank1 import baseline_deflate, baseline_deflate_k
from .synthetic import SyntheticSpec, export_sample, generate

log = logging.getLogger(__name__)

DATASETS = ("synthetic", "digits", "cifar")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _add_common(p):
    p.add_argument("--config", type=Path, help="JSON file with default flag values")
    p.add_argument("--out", type=Path, help="output directory (file for render)")
    p.add_argument("--seed", type=int, default=0)


def _add_data(p):
    p.add_argument("--dataset", choices=DATASETS, default="synthetic")
    p.add_argument("--data-path", type=Path,
                   help="Digits CSV or CIFAR-10 batch file (Digits defaults to the "
                        "copy bundled with scikit-learn; CIFAR to $DEFLATE_CIFAR_PATH)")
    p.add_argument("--n", type=int, default=10, help="number of matrices")
    p.add_argument("--noise-sigma", type=float, default=SyntheticSpec.noise_sigma)
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")


def build_parser():
    parser = _Parser(prog="agentic-deflation", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic samples as PGM + JSON")
    _add_common(p)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--noise-sigma", type=float, default=SyntheticSpec.noise_sigma)
    p.add_argument("--rows", type=int, default=16)
    p.add_argument("--cols", type=int, default=16)
    p.add_argument("--scale", type=int, default=1)

    p = sub.add_parser("baseline", help="numerical deflation baselines")
    _add_common(p)
    _add_data(p)
    p.add_argument("--mode", choices=("k-steps", "fraction"),
                   help="default: k-steps for synthetic, fraction otherwise")
    p.add_argument("--stop-fraction", type=float, default=0.1)
    p.add_argument("--max-steps", type=int, default=32)

    p = sub.add_parser("run", help="agentic deflation")
    _add_common(p)
    _add_data(p)
    p.add_argument("--agents", choices=AGENT_KINDS, default="oracle")
    p.add_argument("--solver", choices=AGENT_KINDS, help="override --agents for the solver")
    p.add_argument("--rank1-evaluator", choices=AGENT_KINDS)
    p.add_argument("--stop-evaluator", choices=AGENT_KINDS)
    p.add_argument("--perm", choices=STRATEGIES, default="none")
    p.add_argument("--icl", type=int, default=0, help="number of ICL examples")
    p.add_argument("--max-steps", type=int, default=32)
    p.add_argument("--max-retries", type=int, default=5)
    p.add_argument("--stop-fraction", type=float, default=0.1)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--script-solver", type=Path, help="JSON array of canned solver replies")
    p.add_argument("--script-rank1", type=Path)
    p.add_argument("--script-stop", type=Path)
    p.add_argument("--endpoint-config", type=Path,
                   help='JSON {"solver": {...}, "evaluator": {...}} endpoint settings')

    p = sub.add_parser("eval", help="join agent and baseline traces into a summary table")
    _add_common(p)
    p.add_argument("--runs", type=Path, required=True, help="output directory of `run`")
    p.add_argument("--baselines", type=Path,
                   help="output directory of `baseline`; recomputed when omitted")

    p = sub.add_parser("render", help="render a matrix or trace as a PGM strip")
    _add_common(p)
    p.add_argument("--trace", type=Path)
    p.add_argument("--matrix", type=Path, help="PGM or JSON nested-list matrix")
    p.add_argument("--scale", type=int, default=8)
    p.add_argument("--permuted", action="store_true",
                   help="add a second row showing the permuted view")
    return parser, sub


def _parse(argv):
    parser, sub = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None) is not None:
        try:
            defaults = json.loads(args.config.read_text())
        except (OSError, ValueError) as err:
            raise UsageError(f"error: cannot read config {args.config}: {err}") from None
        sp = sub.choices[args.command]
        known = {a.dest for a in sp._actions}
        unknown = sorted(set(defaults) - known)
        if unknown:
            raise UsageError(f"error: unknown config keys: {', '.join(unknown)}")
        for k, v in defaults.items():
            action = next(a for a in sp._actions if a.dest == k)
            if action.type is Path and v is not None:
                defaults[k] = str(v)
        sp.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


# -- data ---------------------------------------------------------------

def load_matrices(args):
    """``[(sample_id, matrix, k_or_None)]`` for the selected dataset."""
    if args.dataset == "synthetic":
        spec = SyntheticSpec(noise_sigma=args.noise_sigma, seed=args.seed)
        return [(i, s.matrix, s.k) for i, s in ((i, generate(spec, i)) for i in range(args.n))]
    if args.dataset == "digits":
        path = args.data_path or bundled_digits_path()
        if path is None:
            raise RuntimeError("no Digits CSV given and scikit-learn's copy was not found")
        mats = load_digits_csv(path)
    else:
        path = args.data_path or default_cifar_path()
        if path is None:
            raise RuntimeError("no CIFAR-10 batch given (--data-path or $DEFLATE_CIFAR_PATH)")
        mats = load_cifar10_bin(path)
    return [(i, mats[i], None) for i in sample_indices(len(mats), args.n, args.seed)]


def _map(fn, items, jobs):
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def _write(path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        path.write_text(data)
    else:
        path.write_bytes(data)


def _manifest(out, command, args, outputs):
    config = {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items())
              if k not in ("out", "config")}
    doc = {
        "command": command,
        "config": config,
        "versions": {"agentic_deflation": __version__, "numpy": np.__version__,
                     "python": ".".join(map(str, sys.version_info[:3]))},
        "outputs": sorted(str(p.relative_to(out)) for p in outputs),
    }
    _write(out / "manifest.json", json.dumps(doc, indent=2) + "\n")


def _require_out(args):
    if args.out is None:
        raise UsageError(f"agentic-deflation {args.command}: error: --out is required")
    return args.out


# -- subcommands --------------------------------------------------------

def cmd_synth(args):
    out = _require_out(args)
    spec = SyntheticSpec(rows=args.rows, cols=args.cols, noise_sigma=args.noise_sigma,
                         seed=args.seed, k_max=min(10, args.rows, args.cols))
    outputs = []
    for i in range(args.n):
        pgm, sidecar = export_sample(generate(spec, i), spec, args.scale)
        for suffix, data in ((".pgm", pgm), (".json", sidecar)):
            p = out / "samples" / f"synthetic_{i:04d}{suffix}"
            _write(p, data)
            outputs.append(p)
    _manifest(out, "synth", args, outputs)
    print(f"wrote {args.n} samples to {out / 'samples'}")


def _baseline_job(job):
    dataset, mode, frac, max_steps, sid, m, k = job
    if mode == "k-steps":
        tr = baseline_deflate_k(m, k)
    else:
        tr = baseline_deflate(m, frac, max_steps)
    tr.metadata.update({"dataset": dataset, "sample_id": sid, "k": k, "mode": mode})
    return tr


def cmd_baseline(args):
    out = _require_out(args)
    mode = args.mode or ("k-steps" if args.dataset == "synthetic" else "fraction")
    if mode == "k-steps" and args.dataset != "synthetic":
        raise UsageError("error: --mode k-steps needs a known construction rank (synthetic only)")
    jobs = [(args.dataset, mode, args.stop_fraction, args.max_steps, sid, m, k)
            for sid, m, k in load_matrices(args)]
    traces = _map(_baseline_job, jobs, args.jobs)
    outputs = []
    for tr in traces:
        p = out / "traces" / f"baseline_{tr.metadata['sample_id']:05d}.json"
        _write(p, trace_to_json(tr))
        outputs.append(p)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["dataset", "mode", "n_samples", "baseline_steps_mean", "residual_rmse_mean"])
    n = len(traces)
    w.writerow([args.dataset, mode, n,
                f"{sum(t.n_steps for t in traces) / n:.6f}",
                f"{math.fsum([rmse_to_zero(t.residual) for t in traces]) / n:.6f}"])
    _write(out / "summary.csv", buf.getvalue())
    outputs.append(out / "summary.csv")
    _manifest(out, "baseline", args, outputs)
    sys.stdout.write(buf.getvalue())


def _run_job(job):
    cfg, dataset, sid, m, k, agent_kw = job
    agents = build_agents(cfg, dims=m.shape, **agent_kw)
    try:
        tr = run_deflation(m, cfg, agents)
    except StepError as err:
        raise RuntimeError(f"sample {sid}: {err}") from err
    tr.metadata.update({"dataset": dataset, "sample_id": sid, "k": k})
    return tr


def cmd_run(args):
    out = _require_out(args)
    cfg = RunConfig(
        permutation_strategy=args.perm,
        icl_count=args.icl,
        max_steps=args.max_steps,
        max_retries=args.max_retries,
        stop_fraction=args.stop_fraction,
        epsilon=args.epsilon,
        solver=args.solver or args.agents,
        rank1_evaluator=args.rank1_evaluator or args.agents,
        stop_evaluator=args.stop_evaluator or args.agents,
        seed=args.seed,
    )
    agent_kw = {"scripts": {}}
    for role, path in (("solver", args.script_solver), ("rank1_evaluator", args.script_rank1),
                       ("stop_evaluator", args.script_stop)):
        if path is not None:
            agent_kw["scripts"][role] = str(path)
    if args.endpoint_config is not None:
        eps = json.loads(args.endpoint_config.read_text())
        agent_kw["solver_endpoint"] = eps.get("solver")
        agent_kw["evaluator_endpoint"] = eps.get("evaluator")
    jobs = [(cfg, args.dataset, sid, m, k, agent_kw) for sid, m, k in load_matrices(args)]
    traces = _map(_run_job, jobs, args.jobs)
    outputs = []
    for tr in traces:
        p = out / "traces" / f"run_{tr.metadata['sample_id']:05d}.json"
        _write(p, trace_to_json(tr))
        outputs.append(p)
    _manifest(out, "run", args, outputs)
    aborted = sum(t.aborted for t in traces)
    print(f"{len(traces)} runs, mean steps {np.mean([t.n_steps for t in traces]):.3f}, "
          f"{aborted} aborted")


def _load_traces(directory, prefix):
    files = sorted((directory / "traces").glob(f"{prefix}_*.json"))
    if not files:
        raise RuntimeError(f"no {prefix} traces under {directory / 'traces'}")
    return {int(f.stem.split("_")[1]): trace_from_json(f.read_text()) for f in files}


def cmd_eval(args):
    out = _require_out(args)
    runs = _load_traces(args.runs, "run")
    baselines = _load_traces(args.baselines, "baseline") if args.baselines else {}
    records = []
    for sid, tr in sorted(runs.items()):
        meta = tr.metadata
        dataset = meta.get("dataset", "unknown")
        base = baselines.get(sid)
        if base is None:
            base = baseline_for(tr.original, dataset, k=meta.get("k"),
                                stop_fraction=meta["config"]["stop_fraction"])
        records.append(RunRecord(dataset, meta["config"]["permutation_strategy"],
                                 meta["config"]["icl_count"], tr, base))
    rows = summarize(records)
    _write(out / "summary.csv", summary_csv(rows))
    _write(out / "summary.txt", summary_table(rows))
    _manifest(out, "eval", args, [out / "summary.csv", out / "summary.txt"])
    sys.stdout.write(summary_table(rows))


def _load_matrix(path):
    data = path.read_bytes()
    if data[:2] == b"P5":
        return read_pgm(data)
    return np.array(json.loads(data), dtype=np.float64)


def _strip(panels, scale):
    rows = [np.hstack([quantize_u8(p) for p in row]) for row in panels]
    return render_pgm(np.vstack(rows), scale)


def cmd_render(args):
    out = _require_out(args)
    if (args.trace is None) == (args.matrix is None):
        raise UsageError("error: render needs exactly one of --trace or --matrix")
    if args.matrix is not None:
        panels = [[_load_matrix(args.matrix)]]
    else:
        tr = trace_from_json(args.trace.read_text())
        views = [tr.original] + [st.residual for st in tr.steps]
        panels = [views]
        if args.permuted and tr.permutation is not None:
            panels.append([apply_permutation(v, tr.permutation) for v in views])
    _write(out, _strip(panels, args.scale))
    print(f"wrote {out}")


COMMANDS = {
    "synth": cmd_synth,
    "baseline": cmd_baseline,
    "run": cmd_run,
    "eval": cmd_eval,
    "render": cmd_render,
}


def dispatch(argv=None):
    try:
        args = _parse(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
        COMMANDS[args.command](args)
    except UsageError as err:
        print(err, file=sys.stderr)
        return 1
    except SystemExit as err:  # --help / --version
        return 0 if err.code in (0, None) else 1
    except Exception as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
