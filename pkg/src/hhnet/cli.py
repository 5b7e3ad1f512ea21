"""``hhnet`` command line tool.

Every command reads UTF-8 CSV/JSON and writes UTF-8 CSV/JSON. Runs that write
files also write a manifest (``<out>.manifest.json``, or ``manifest.json`` in
the output directory for ``batch``) holding the tool version, every resolved
parameter, SHA-256 digests of inputs and outputs and the wall-clock time.
``hhnet rerun MANIFEST`` repeats such a run and reproduces its outputs.

Exit codes: 0 success, 2 invalid input, 3 I/O problem, 4 numerically
undefined result.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from hhnet import __version__, contraction, diffusion, entitativity, io, metrics, randgraph
from hhnet.errors import DegeneracyError, HHNetError, ValidationError
from hhnet.graph import build_network

SEED_ENV = "HHNET_SEED"
_NOT_PARAMS = {"handler", "config", "force", "manifest"}


class Run:
    """Tracks the inputs and outputs of one command invocation."""

    def __init__(self, force: bool = False):
        self.force = force
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}

    def input(self, path) -> Path:
        if path is None:
            raise ValidationError("a required input file was not given")
        p = Path(path)
        if not p.is_file():
            raise FileNotFoundError(f"{p}: no such file")
        self.inputs[str(p)] = io.sha256(p)
        return p

    def write(self, path, text: str) -> None:
        if path is None:
            sys.stdout.write(text)
            return
        p = Path(path)
        if p.exists() and not self.force and str(p) not in self.outputs:
            raise FileExistsError(f"{p} exists; pass --force to overwrite")
        p.parent.mkdir(parents=True, exist_ok=True)
        data = text.encode("utf-8")
        p.write_bytes(data)
        self.outputs[str(p)] = hashlib.sha256(data).hexdigest()


# ----------------------------------------------------------------- helpers

def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) in (None, "")]
    if missing:
        raise ValidationError(f"{args.command}: missing required option(s) {', '.join(missing)}")


def _seed(args) -> int:
    """Resolve the RNG seed from --seed or HHNET_SEED and record it on args."""
    if args.seed is None:
        env = os.environ.get(SEED_ENV)
        if env is None or not env.strip():
            raise ValidationError(f"{args.command}: pass --seed or set {SEED_ENV}")
        try:
            args.seed = int(env)
        except ValueError:
            raise ValidationError(f"{SEED_ENV}={env!r} is not an integer") from None
    return int(args.seed)


def _csv_list(text, cast=str):
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return [cast(x) for x in text]
    try:
        return [cast(x.strip()) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"cannot parse list {text!r}") from None


def parse_grid(text) -> list[float]:
    """``a:b:step`` (inclusive of b) or a comma-separated list of values."""
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    if ":" in str(text):
        try:
            a, b, step = (float(x) for x in str(text).split(":"))
        except ValueError:
            raise ValidationError(f"grid {text!r} is not of the form start:stop:step") from None
        if step <= 0 or b < a:
            raise ValidationError(f"grid {text!r} must have step > 0 and stop >= start")
        count = int(round((b - a) / step)) + 1
        return [round(a + k * step, 10) for k in range(count) if a + k * step <= b + 1e-9]
    return _csv_list(text, float)


def _bundle(args, run):
    _need(args, "nodes", "edges")
    return io.load_bundle(run.input(args.nodes), run.input(args.edges), args.directed)


def _cascade_config(args) -> diffusion.CascadeConfig:
    return diffusion.CascadeConfig(q=args.q, intra=args.intra, reps=args.reps, seed=_seed(args))


def _target(bundle, level):
    """Network a cascade runs on: the decomposition-aware individual network
    or the basic household contraction."""
    if level == "household":
        return contraction.contract_basic(bundle.network, bundle.partition), None
    return bundle.network, bundle.partition


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_PARAMS}


def _json_out(run, args, result):
    run.write(args.out, io.dumps_json({"params": _params(args), "version": __version__,
                                       "result": result}))


# ---------------------------------------------------------------- commands

def cmd_contract(args, run):
    _need(args, "out")
    b = _bundle(args, run)
    rule = args.rule
    if rule == "basic":
        hh = contraction.contract_basic(b.network, b.partition)
    elif rule == "weighted":
        hh = contraction.contract_weighted(b.network, b.partition, normalize=args.normalize,
                                           directed_output=args.directed_output)
    elif rule == "gendered":
        _need(args, "gender")
        hh = contraction.contract_gendered(b.network, b.partition, b.attributes, args.gender,
                                           weighted=args.weighted or args.normalize,
                                           normalize=args.normalize)
    elif rule == "layered":
        _need(args, "layers")
        hh = contraction.contract_layered(b.network, b.partition, _csv_list(args.layers))
    else:
        raise ValidationError(f"unknown rule {rule!r}")
    rows = [(u, v, rule, w) for u, v, w in hh.edges]
    run.write(args.out, io.csv_text(io.EDGE_COLUMNS, rows))
    run.write(str(args.out) + ".provenance.json", io.dumps_json({
        "provenance": hh.provenance, "directed": hh.directed, "households": list(hh.nodes),
        "edge_count": len(hh.edges), "inputs": dict(run.inputs), "version": __version__,
    }))


def cmd_metrics(args, run):
    b = _bundle(args, run)
    partition = b.partition if args.partition_from_attributes else None
    reports = metrics.summarize(b.network, partition, "individual")
    if partition is not None:
        hh = contraction.contract_basic(b.network, partition)
        reports += metrics.summarize(hh, None, "household")
    _json_out(run, args, {"reports": [r.to_dict() for r in reports]})


def cmd_sweep(args, run):
    b = _bundle(args, run)
    rows = metrics.inversity_removal_sweep(b.network, b.partition, parse_grid(args.grid),
                                           reps=args.reps, seed=_seed(args))
    header = ("p", "mean_inversity", "q05", "q95", "undefined_count")
    run.write(args.out, io.csv_text(header, [[r.to_dict()[h] for h in header] for r in rows]))


def cmd_cascade(args, run):
    _need(args, "seeds")
    b = _bundle(args, run)
    seeds = io.read_ids(run.input(args.seeds))
    target, part = _target(b, args.level)
    res = diffusion.independent_cascade(target, seeds, _cascade_config(args), part)
    _json_out(run, args, {"seeds": seeds, "mean": res.mean, "std": res.std, "n": res.n,
                          "reaches": res.reaches})


def cmd_seeds(args, run):
    b = _bundle(args, run)
    target, part = _target(b, args.level)
    s = diffusion.greedy_seed_selection(target, args.k, _cascade_config(args), part, args.level)
    _json_out(run, args, s.to_dict())


def cmd_compare_seeds(args, run):
    _need(args, "nodes", "individual_seeds", "household_seeds")
    bundle = build_network(io.read_nodes(run.input(args.nodes)), [])
    s_i = io.read_ids(run.input(args.individual_seeds))
    s_h = io.read_ids(run.input(args.household_seeds))
    _json_out(run, args, diffusion.compare_seed_sets(s_i, s_h, bundle.partition))


def cmd_cross_eval(args, run):
    _need(args, "individual_seeds", "household_seeds")
    b = _bundle(args, run)
    s_i = io.read_ids(run.input(args.individual_seeds))
    s_h = io.read_ids(run.input(args.household_seeds))
    hh = contraction.contract_basic(b.network, b.partition)
    _json_out(run, args, diffusion.cross_evaluate(s_i, s_h, b.network, hh, b.partition,
                                                  _cascade_config(args), args.inclusion))


def _gendered_networks(b, genders):
    if len(genders) != 2:
        raise ValidationError(f"expected two genders, got {genders}")
    return [contraction.contract_gendered(b.network, b.partition, b.attributes, g)
            for g in genders]


def cmd_dc(args, run):
    b = _bundle(args, run)
    if args.level == "household":
        net = contraction.contract_basic(b.network, b.partition)
    else:
        net = b.network
    T = args.T if args.T is not None else diffusion.default_horizon(net)
    result = {"T": T, "dc": {"B" if args.level == "household" else "G": diffusion.network_dc(net, T, args.share)}}
    if args.gendered:
        if args.level != "household":
            raise ValidationError("--gendered applies to household networks")
        genders = _csv_list(args.gendered)
        for g, net_g in zip(genders, _gendered_networks(b, genders)):
            result["dc"][f"B_{g}{g}"] = diffusion.network_dc(net_g, T, args.share)
    _json_out(run, args, result)


def cmd_dc_gendered(args, run):
    b = _bundle(args, run)
    genders = _csv_list(args.genders)
    ff, mm = _gendered_networks(b, genders)
    hh = contraction.contract_basic(b.network, b.partition)
    _json_out(run, args, diffusion.gendered_dc_correlation(hh, ff, mm, args.T, args.share))


def cmd_gen_er(args, run):
    _need(args, "n", "p", "out")
    seed = _seed(args)
    g = randgraph.generate_er(randgraph.ErConfig(args.n, args.p, seed))
    run.write(args.out, io.csv_text(io.EDGE_COLUMNS, [(e.source, e.target, e.layer, e.weight)
                                                      for e in g.edges]))
    if args.nodes_out:
        sizes = _csv_list(args.sizes, int) if args.sizes else [1]
        spec = randgraph.HouseholdSizeSpec.cycling(args.n, sizes)
        part = randgraph.random_partition(args.n, spec, [seed, 0])
        rows = [(v, part.household_of(v), "") for v in g.nodes]
        run.write(args.nodes_out, io.csv_text(io.NODE_COLUMNS, rows))


def cmd_verify_er(args, run):
    _need(args, "n", "p", "sizes")
    seed = _seed(args)
    spec = randgraph.HouseholdSizeSpec.cycling(args.n, _csv_list(args.sizes, int))
    report = randgraph.verify_contraction_distribution(
        randgraph.ErConfig(args.n, args.p, seed), spec, args.draws,
        args.z_threshold, args.degree_threshold)
    report["homogeneity"] = randgraph.homogeneity_test(report, args.alpha)
    _json_out(run, args, report)


def cmd_recommend(args, run):
    if bool(args.answers) == bool(args.interactive):
        raise ValidationError("recommend: give exactly one of --answers or --interactive")
    if args.answers:
        answers = entitativity.load_answers(run.input(args.answers))
    else:
        def respond():
            line = sys.stdin.readline()
            if not line:
                raise ValidationError("input ended before the questionnaire was complete")
            return line
        answers = entitativity.run_wizard(lambda s: print(s, file=sys.stderr), respond)
    rec = entitativity.recommend(answers)
    _json_out(run, args, {"answers": answers.to_dict(), "recommendation": rec.to_dict()})


def _village_results(name, bundle, opts):
    """Everything ``batch`` computes for one village. Depends only on the
    village's own data and the options, never on the other villages."""
    net, part = bundle.network, bundle.partition
    hh = contraction.contract_basic(net, part)
    out = {"metrics": [], "seeds": None, "dc": None, "sweep": []}
    for r in metrics.summarize(net, part, "individual") + metrics.summarize(hh, None, "household"):
        out["metrics"].append((name, r.network, r.metric, r.value))
    if opts["k"]:
        cfg = diffusion.CascadeConfig(opts["q"], opts["intra"], opts["reps"], opts["seed"])
        s_i = diffusion.greedy_seed_selection(net, min(opts["k"], net.n), cfg, part)
        s_h = diffusion.greedy_seed_selection(hh, min(opts["k"], hh.n), cfg)
        cmp = diffusion.compare_seed_sets(s_i, s_h, part)
        out["seeds"] = (name, opts["k"], cmp["overlap"], cmp["proportion"])
    if opts["genders"]:
        try:
            ff, mm = _gendered_networks(bundle, opts["genders"])
            res = diffusion.gendered_dc_correlation(hh, ff, mm, opts["T"])
            out["dc"] = (name, res["corr_B_FF"], res["corr_B_MM"], res["corr_FF_MM"], res["T"],
                         len(res["households"]), "")
        except (DegeneracyError, ValidationError) as exc:
            out["dc"] = (name, None, None, None, opts["T"], 0, str(exc).splitlines()[0])
    if opts["grid"]:
        rows = metrics.inversity_removal_sweep(net, part, opts["grid"], opts["sweep_reps"],
                                               opts["seed"])
        out["sweep"] = [(name, r.p, r.mean_inversity, r.q05, r.q95, r.undefined_count)
                        for r in rows]
    return out


def cmd_batch(args, run):
    _need(args, "villages", "out")
    stochastic = bool(args.k) or bool(args.sweep_grid)
    opts = {"k": args.k, "q": args.q, "intra": args.intra, "reps": args.reps,
            "seed": _seed(args) if stochastic else args.seed,
            "genders": _csv_list(args.dc_genders) if args.dc_genders else None,
            "T": args.T, "grid": parse_grid(args.sweep_grid) if args.sweep_grid else None,
            "sweep_reps": args.sweep_reps}
    bundles, skipped = io.ingest_village_bundle(args.villages, args.directed)
    for path in sorted(Path(args.villages).rglob("*.csv")):
        run.input(path)
    names = sorted(bundles)
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            results = list(pool.map(_village_results, names, [bundles[n] for n in names],
                                    [opts] * len(names)))
    else:
        results = [_village_results(n, bundles[n], opts) for n in names]

    out = Path(args.out)
    run.write(out / "metrics.csv", io.csv_text(("village", "network", "metric", "value"),
                                               [r for res in results for r in res["metrics"]]))
    run.write(out / "skipped.json", io.dumps_json(skipped))
    if opts["k"]:
        run.write(out / "seed_overlap.csv", io.csv_text(("village", "k", "overlap", "proportion"),
                                                        [res["seeds"] for res in results]))
    if opts["genders"]:
        run.write(out / "dc_correlations.csv", io.csv_text(
            ("village", "corr_B_FF", "corr_B_MM", "corr_FF_MM", "T", "households", "note"),
            [res["dc"] for res in results]))
    if opts["grid"]:
        run.write(out / "sweep.csv", io.csv_text(
            ("village", "p", "mean_inversity", "q05", "q95", "undefined_count"),
            [r for res in results for r in res["sweep"]]))
    print(f"{len(bundles)} village(s) processed, {len(skipped)} skipped", file=sys.stderr)


# ------------------------------------------------------------------ parser

def _net_opts(p):
    p.add_argument("--nodes", help="nodes CSV: person_id,household_id,gender[,role...]")
    p.add_argument("--edges", help="edges CSV: source,target[,layer][,weight]")
    p.add_argument("--directed", action="store_true", help="treat edges as directed")


def _out_opt(p, help="output file (stdout when omitted)"):
    p.add_argument("--out", help=help)


def _cascade_opts(p, reps=1000):
    p.add_argument("--q", type=float, default=0.05, help="extrahousehold transmission probability")
    p.add_argument("--intra", type=float, default=0.7,
                   help="intrahousehold transmission probability (1 - p)")
    p.add_argument("--reps", type=int, default=reps, help="cascade replications")
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default: ${SEED_ENV})")


COMMANDS = {}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hhnet", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"hhnet {__version__}")
    parser.add_argument("--config", help="flat JSON file of option values; flags override it")
    parser.add_argument("--force", action="store_true", help="overwrite existing outputs")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add(name, handler, help):
        p = sub.add_parser(name, help=help, description=help)
        p.add_argument("--force", action="store_true", default=argparse.SUPPRESS,
                       help="overwrite existing outputs")
        p.set_defaults(handler=handler)
        COMMANDS[name] = p
        return p

    p = add("contract", cmd_contract, "contract an individual network into a household network")
    _net_opts(p)
    p.add_argument("--rule", choices=("basic", "weighted", "gendered", "layered"), default="basic")
    p.add_argument("--normalize", action="store_true",
                   help="weights are shares of members with a cross edge")
    p.add_argument("--directed-output", action="store_true",
                   help="keep both directions of normalized weights")
    p.add_argument("--gender", help="gender label for the gendered rule")
    p.add_argument("--weighted", action="store_true", help="sum weights under the gendered rule")
    p.add_argument("--layers", help="comma-separated layers for the layered rule")
    _out_opt(p, "household edge CSV; a .provenance.json sidecar is written next to it")

    p = add("metrics", cmd_metrics, "assortativity, clustering and inversity")
    _net_opts(p)
    p.add_argument("--partition-from-attributes", action="store_true",
                   help="also report household-level metrics using the household_id column")
    _out_opt(p)

    p = add("sweep-inversity", cmd_sweep, "inversity as intrahousehold edges are removed")
    _net_opts(p)
    p.add_argument("--grid", default="0.1:1.0:0.1", help="start:stop:step or comma list of p")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default: ${SEED_ENV})")
    _out_opt(p)

    for name, handler, help in (("cascade", cmd_cascade, "simulate independent cascades"),
                                ("seeds", cmd_seeds, "greedy seed selection")):
        p = add(name, handler, help)
        _net_opts(p)
        _cascade_opts(p)
        p.add_argument("--level", choices=("individual", "household"), default="individual")
        if name == "cascade":
            p.add_argument("--seeds", help="seed ids: JSON list or one id per line")
        else:
            p.add_argument("--k", type=int, default=10, help="number of seeds")
        _out_opt(p)

    p = add("compare-seeds", cmd_compare_seeds, "overlap between individual and household seeds")
    p.add_argument("--nodes")
    p.add_argument("--individual-seeds")
    p.add_argument("--household-seeds")
    _out_opt(p)

    p = add("cross-eval", cmd_cross_eval, "score both seed sets on both networks")
    _net_opts(p)
    _cascade_opts(p)
    p.add_argument("--individual-seeds")
    p.add_argument("--household-seeds")
    p.add_argument("--inclusion", type=float, default=None,
                   help="member inclusion probability when mapping household seeds (default: --intra)")
    _out_opt(p)

    p = add("dc", cmd_dc, "diffusion centrality")
    _net_opts(p)
    p.add_argument("--T", type=int, default=None, help="horizon (default: diameter of largest component)")
    p.add_argument("--share", type=float, default=1.0, help="passing probability per edge")
    p.add_argument("--level", choices=("individual", "household"), default="household")
    p.add_argument("--gendered", help="two genders, e.g. F,M: also report same-gender networks")
    _out_opt(p)

    p = add("dc-gendered", cmd_dc_gendered, "correlate household and same-gender centralities")
    _net_opts(p)
    p.add_argument("--genders", default="F,M")
    p.add_argument("--T", type=int, default=None)
    p.add_argument("--share", type=float, default=1.0)
    _out_opt(p)

    p = add("gen-er", cmd_gen_er, "generate an Erdos-Renyi edge list")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--sizes", help="household sizes, repeated to cover n (with --nodes-out)")
    p.add_argument("--nodes-out", help="also write a nodes CSV with a random partition")
    _out_opt(p)

    p = add("verify-er", cmd_verify_er, "Monte Carlo check of contracted ER edge probabilities")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--sizes", help="household sizes, repeated to cover n")
    p.add_argument("--draws", type=int, default=5000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--z-threshold", type=float, default=4.0)
    p.add_argument("--degree-threshold", type=float, default=3.0)
    p.add_argument("--alpha", type=float, default=0.01)
    _out_opt(p)

    p = add("recommend", cmd_recommend, "choose a network from the entitativity questionnaire")
    p.add_argument("--answers", help="answers JSON file")
    p.add_argument("--interactive", action="store_true", help="ask the questions on the terminal")
    _out_opt(p)

    p = add("batch", cmd_batch, "run metrics (and optionally seeds, DC, sweeps) over villages")
    p.add_argument("--villages", help="directory of village CSVs")
    p.add_argument("--directed", action="store_true")
    _cascade_opts(p)
    p.add_argument("--k", type=int, default=0, help="seed set size; 0 skips seed overlap")
    p.add_argument("--dc-genders", help="e.g. F,M; computes gendered DC correlations")
    p.add_argument("--T", type=int, default=None)
    p.add_argument("--sweep-grid", help="p grid for inversity sweeps; omitted skips sweeps")
    p.add_argument("--sweep-reps", type=int, default=100)
    p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    _out_opt(p, "output directory")

    p = sub.add_parser("rerun", help="repeat a run from its manifest",
                       description="repeat a run from its manifest")
    p.add_argument("manifest")
    p.add_argument("--force", action="store_true", default=argparse.SUPPRESS,
                   help="overwrite existing outputs (implied)")
    p.add_argument("--ignore-input-changes", action="store_true",
                   help="run even if an input digest no longer matches")
    p.set_defaults(handler=None)
    return parser


def _load_config(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: line 1: expected a flat JSON object")
    nested = [k for k, v in data.items() if isinstance(v, dict)]
    if nested:
        raise ValidationError(f"{path}: configuration must be flat", nested)
    return {k.replace("-", "_"): v for k, v in data.items()}


def _parse(argv):
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    config = _load_config(known.config) if known.config else {}
    if config:
        cmd = next((a for a in argv if a in COMMANDS), None) or config.get("command")
        if cmd not in COMMANDS:
            raise ValidationError("configuration does not name a command and none was given")
        sub = COMMANDS[cmd]
        valid = {a.dest for a in sub._actions} - {"help"}
        unknown = sorted(set(config) - valid - {"command"})
        if unknown:
            raise ValidationError(f"{known.config}: unknown option(s) for {cmd}", unknown)
        sub.set_defaults(**{k: v for k, v in config.items() if k != "command"})
        if cmd not in argv:
            argv = list(argv) + [cmd]
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        raise ValidationError("no command given")
    return parser, args


def _manifest_path(args):
    if args.command == "batch":
        return Path(args.out) / "manifest.json"
    if getattr(args, "out", None):
        return Path(str(args.out) + ".manifest.json")
    return None


def execute(args, force: bool = False) -> Run:
    """Run a parsed command and write its manifest."""
    run = Run(force)
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    args.handler(args, run)
    elapsed = time.perf_counter() - t0
    path = _manifest_path(args)
    if path is not None and run.outputs:
        manifest = {
            "tool": "hhnet", "version": __version__, "command": args.command,
            "params": _params(args), "inputs": run.inputs, "outputs": dict(run.outputs),
            "started_at": started.isoformat(), "wall_clock_seconds": elapsed,
        }
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(io.dumps_json(manifest), encoding="utf-8")
    return run


def rerun(manifest_path, ignore_input_changes: bool = False) -> Run:
    """Repeat the run a manifest describes, overwriting its outputs."""
    text = Path(manifest_path).read_text(encoding="utf-8")
    try:
        manifest = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{manifest_path}: line {exc.lineno}: {exc.msg}") from None
    for key in ("command", "params", "inputs"):
        if key not in manifest:
            raise ValidationError(f"{manifest_path}: not a manifest (no {key!r})")
    changed = [p for p, digest in manifest["inputs"].items()
               if not Path(p).is_file() or io.sha256(p) != digest]
    if changed and not ignore_input_changes:
        raise ValidationError("inputs changed since the manifest was written", changed)
    parser = build_parser()
    args = parser.parse_args([manifest["command"]])
    for k, v in manifest["params"].items():
        setattr(args, k, v)
    return execute(args, force=True)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser, args = _parse(argv)
        if args.command == "rerun":
            rerun(args.manifest, args.ignore_input_changes)
        else:
            execute(args, force=getattr(args, "force", False))
    except HHNetError as exc:
        print(f"hhnet: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"hhnet: I/O error: {exc}", file=sys.stderr)
        return 3
    except UnicodeDecodeError as exc:
        print(f"hhnet: I/O error: input is not UTF-8: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
