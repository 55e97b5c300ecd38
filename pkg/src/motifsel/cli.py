"""Command line pipeline: build-graphs -> mine -> select -> eval, plus stats.

Exit codes: 0 success, 1 runtime error, 2 usage, configuration or parse error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import random
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import __version__
from .evaluation import (feature_matrix, naive_bayes_cv, selection_rate, size_distribution)
from .graph import GraphError, LabeledGraph, read_graphs, write_graphs
from .ingest import ContactConfig, ResidueParseError, graph_from_text
from .miner import MiningConfig, MiningError, mine
from .patterns import PatternSet, format_patterns, parse_patterns
from .selector import SelectionConfig, format_report, report_csv, select
from .substitution import MatrixError, load_matrix
from .synth import benchmark_patterns

log = logging.getLogger("motifsel")

DEFAULT_MATRIX_ENV = "MOTIFSEL_MATRIX"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str = ""
    inputs: List[str] = field(default_factory=list)
    matrix: str = "blosum62"
    tau: float = 30.0
    delta: float = 7.0
    min_support: float = 0.3
    max_edges: int = 10
    bijection: str = "canonical"
    seed: int = 0
    workers: int = 1
    output: str = ""

    def to_dict(self) -> Dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))


def _digest(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path: Path, cfg: RunConfig, inputs: Sequence[Path], outputs: Sequence[Path],
                   extra: Optional[Dict] = None) -> Path:
    doc = {
        "version": __version__,
        "config": cfg.to_dict(),
        "inputs": {str(p): _digest(p) for p in inputs},
        "outputs": [str(p) for p in outputs],
    }
    if extra:
        doc.update(extra)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def _default_workers() -> int:
    return os.cpu_count() or 1


def _read_graph_files(paths: Sequence[str]) -> List[LabeledGraph]:
    graphs: List[LabeledGraph] = []
    for p in paths:
        graphs.extend(read_graphs(Path(p).read_text(), source=p))
    return graphs


def _taus(text: str) -> List[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"bad threshold list {text!r}") from None


def _ints(text: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"bad integer list {text!r}") from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_build_graphs(args) -> int:
    cfg = ContactConfig(args.delta)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    for src in args.inputs:
        path = Path(src)
        g = graph_from_text(path.read_text(), cfg, id=path.stem, tag=args.cls, source=src)
        out = out_dir / f"{path.stem}.graph"
        out.write_text(write_graphs([g]))
        outputs.append(out)
        log.info("%s: %d residues, %d contacts", src, g.order, g.size)
    rc = RunConfig("build-graphs", list(args.inputs), delta=args.delta, output=str(out_dir))
    write_manifest(out_dir / "manifest.json", rc, [Path(p) for p in args.inputs], outputs)
    return 0


def cmd_mine(args) -> int:
    cfg = MiningConfig(args.min_support, args.max_edges, args.max_patterns, args.min_edges)
    graphs = _read_graph_files(args.graphs)
    ps = mine(graphs, cfg, workers=args.workers)
    ps.meta.update({"method": "frequent", "graphs": str(len(graphs))})
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(format_patterns(ps))
    rc = RunConfig("mine", list(args.graphs), min_support=args.min_support,
                   max_edges=args.max_edges, workers=args.workers, output=str(out))
    write_manifest(Path(str(out) + ".manifest.json"), rc, [Path(p) for p in args.graphs], [out])
    print(f"{len(ps)} frequent patterns -> {out}")
    return 0


def cmd_select(args) -> int:
    src = args.patterns_in or args.patterns
    if not src:
        raise ConfigError("select needs a pattern file (positional or --patterns-in)")
    matrix = load_matrix(args.matrix, bottom=args.bottom, top=args.top)
    cfg = SelectionConfig(args.tau, matrix, args.bijection, args.workers)
    omega = parse_patterns(Path(src).read_text(), source=src)
    report = select(omega, cfg)
    selected = report.selected
    selected.meta["method"] = "unsubstituted"
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(format_patterns(selected))
    rep_path = Path(args.report or f"{out}.report.txt")
    csv_path = Path(args.csv or f"{out}.groups.csv")
    rep_path.write_text(format_report(report, cfg))
    csv_path.write_text(report_csv(report))
    rc = RunConfig("select", [src], matrix=args.matrix, tau=args.tau, bijection=args.bijection,
                   workers=args.workers, output=str(out))
    write_manifest(Path(str(out) + ".manifest.json"), rc, [Path(src)], [out, rep_path, csv_path],
                   {"bottom": args.bottom, "top": args.top})
    print(f"{report.after} of {report.before} patterns selected "
          f"({report.selection_rate:.2f}%) -> {out}")
    return 0


METRIC_FIELDS = ["dataset", "method", "tau", "matrix", "patterns", "accuracy", "precision",
                 "recall", "f_score", "auc", "tp", "fp", "tn", "fn"]


def cmd_eval(args) -> int:
    graphs = _read_graph_files(args.graphs)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig_dir = Path(args.figures) if args.figures else out.parent
    rows = []
    histograms = {}
    outputs = [out]
    for src in args.patterns:
        ps = parse_patterns(Path(src).read_text(), source=src)
        name = Path(src).stem
        fm = feature_matrix(ps, graphs)
        if args.features:
            fpath = out.parent / f"{name}.features.csv"
            fpath.write_text(fm.to_csv())
            spath = out.parent / f"{name}.features.txt"
            spath.write_text(fm.to_sparse())
            outputs += [fpath, spath]
        if not args.no_cv:
            res = naive_bayes_cv(fm, args.folds, args.runs, args.seed)
            row = {"dataset": args.dataset, "method": ps.meta.get("method", name),
                   "tau": ps.meta.get("tau", ""), "matrix": ps.meta.get("matrix", ""),
                   "patterns": len(ps), "tp": res.tp, "fp": res.fp, "tn": res.tn, "fn": res.fn}
            row.update({k: f"{v:.4f}" for k, v in res.row().items()})
            rows.append(row)
        if args.histogram:
            hist = size_distribution(ps)
            histograms[name] = hist
            hpath = out.parent / f"{name}.sizes.csv"
            hpath.write_text("size,count\n" + "".join(f"{k},{v}\n" for k, v in hist.items()))
            outputs.append(hpath)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=METRIC_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    out.write_text(buf.getvalue())
    if args.histogram and histograms:
        from .plotting import plot_size_distribution
        outputs.append(plot_size_distribution(histograms, fig_dir / "size_distribution.png"))
    rc = RunConfig("eval", list(args.patterns) + list(args.graphs), seed=args.seed,
                   output=str(out))
    write_manifest(Path(str(out) + ".manifest.json"), rc,
                   [Path(p) for p in list(args.patterns) + list(args.graphs)], outputs,
                   {"folds": args.folds, "runs": args.runs})
    return 0


def cmd_stats(args) -> int:
    from . import plotting
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs: List[Path] = []
    inputs: List[Path] = []
    taus = _taus(args.taus)
    if args.runtime:
        sizes = _ints(args.sizes)
        matrix = load_matrix(args.matrix)
        full = benchmark_patterns(max(sizes), seed=args.seed)
        pool = list(full.patterns)
        random.Random(args.seed).shuffle(pool)
        lines = ["patterns," + ",".join(f"tau{t:g}" for t in taus)]
        series: Dict[str, List[float]] = {f"tau = {t:g}%": [] for t in taus}
        for n in sizes:
            sub = PatternSet(pool[:n])
            secs = []
            for t in taus:
                rep = select(sub, SelectionConfig(t, matrix, args.bijection, args.workers))
                secs.append(rep.seconds)
                series[f"tau = {t:g}%"].append(rep.seconds)
            lines.append(f"{n}," + ",".join(f"{s:.3f}" for s in secs))
            print(lines[-1], flush=True)
        path = out_dir / "runtime.csv"
        path.write_text("\n".join(lines) + "\n")
        outputs += [path, plotting.plot_runtime(sizes, series, out_dir / "runtime.png")]
    if args.patterns:
        matrix = load_matrix(args.matrix, bottom=args.bottom, top=args.top)
        omega = parse_patterns(Path(args.patterns).read_text(), source=args.patterns)
        inputs.append(Path(args.patterns))
        graphs = _read_graph_files(args.graphs) if args.graphs else None
        if graphs:
            inputs += [Path(p) for p in args.graphs]
        hist = {"frequent": size_distribution(omega)}
        lines = ["tau,before,after,selection_rate,seconds" + (",accuracy" if graphs else "")]
        rates, accs = [], []
        for t in taus:
            rep = select(omega, SelectionConfig(t, matrix, args.bijection, args.workers))
            rate = selection_rate(len(omega), rep.after)
            rates.append(rate)
            hist[f"tau = {t:g}%"] = size_distribution(rep.selected)
            line = f"{t:g},{len(omega)},{rep.after},{rate:.4f},{rep.seconds:.4f}"
            if graphs:
                acc = naive_bayes_cv(feature_matrix(rep.selected, graphs), args.folds,
                                     args.runs, args.seed).accuracy
                accs.append(acc)
                line += f",{acc:.4f}"
            lines.append(line)
        path = out_dir / "sweep.csv"
        path.write_text("\n".join(lines) + "\n")
        sizes = sorted({s for h in hist.values() for s in h})
        spath = out_dir / "sizes.csv"
        spath.write_text("size," + ",".join(hist) + "\n" + "".join(
            f"{s}," + ",".join(str(h.get(s, 0)) for h in hist.values()) + "\n" for s in sizes))
        outputs += [path, spath,
                    plotting.plot_selection_rate(taus, rates, out_dir / "selection_rate.png"),
                    plotting.plot_size_distribution(hist, out_dir / "size_distribution.png")]
        if graphs:
            base = naive_bayes_cv(feature_matrix(omega, graphs), args.folds, args.runs,
                                  args.seed).accuracy
            outputs.append(plotting.plot_accuracy(taus, accs, base, out_dir / "accuracy.png"))
    if not outputs:
        raise ConfigError("stats needs --patterns and/or --runtime")
    rc = RunConfig("stats", [str(p) for p in inputs], matrix=args.matrix, seed=args.seed,
                   workers=args.workers, output=str(out_dir))
    write_manifest(out_dir / "manifest.json", rc, inputs, outputs, {"taus": taus})
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    default_matrix = os.environ.get(DEFAULT_MATRIX_ENV, "blosum62")
    ap = argparse.ArgumentParser(prog="motifsel", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    ap.add_argument("--config", help="JSON run config providing defaults for flags")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-graphs", help="residue files -> contact graph files")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--delta", type=float, default=7.0, help="contact distance in angstroms")
    p.add_argument("--class", dest="cls", help="class tag for every input (default: file's)")
    p.add_argument("-o", "--out-dir", default="graphs")
    p.set_defaults(func=cmd_build_graphs)

    p = sub.add_parser("mine", help="graph files -> frequent pattern file")
    p.add_argument("graphs", nargs="+")
    p.add_argument("--min-support", type=float, default=0.3)
    p.add_argument("--max-edges", type=int, default=10)
    p.add_argument("--min-edges", type=int, default=0, help="1 drops single-node patterns")
    p.add_argument("--max-patterns", type=int, default=2_000_000)
    p.add_argument("--workers", type=int, default=_default_workers())
    p.add_argument("-o", "--output", default="patterns.txt")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("select", help="pattern file -> unsubstituted pattern file + report")
    p.add_argument("patterns", nargs="?")
    p.add_argument("--patterns-in", help="externally mined pattern file")
    p.add_argument("--tau", type=float, default=30.0)
    p.add_argument("--matrix", default=default_matrix, help="file or blosum62/blosum80/pam250")
    p.add_argument("--bottom", type=float, help="score meaning impossible substitution")
    p.add_argument("--top", type=float, help="score meaning certain substitution")
    p.add_argument("--bijection", choices=("canonical", "maximizing"), default="canonical")
    p.add_argument("--workers", type=int, default=_default_workers())
    p.add_argument("-o", "--output", default="selected.txt")
    p.add_argument("--report")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("eval", help="naive Bayes CV metrics and size histograms")
    p.add_argument("--graphs", nargs="+", required=True)
    p.add_argument("--patterns", nargs="+", required=True)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dataset", default="dataset")
    p.add_argument("--histogram", action="store_true")
    p.add_argument("--features", action="store_true", help="also export feature matrices")
    p.add_argument("--no-cv", action="store_true")
    p.add_argument("--figures", help="figure directory (default: next to output)")
    p.add_argument("-o", "--output", default="metrics.csv")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stats", help="threshold sweep and runtime study with figures")
    p.add_argument("--patterns")
    p.add_argument("--graphs", nargs="+")
    p.add_argument("--matrix", default=default_matrix)
    p.add_argument("--bottom", type=float)
    p.add_argument("--top", type=float)
    p.add_argument("--bijection", choices=("canonical", "maximizing"), default="canonical")
    p.add_argument("--taus", default="0,10,20,30,40,50,60,70,80,90")
    p.add_argument("--runtime", action="store_true", help="time selection on synthetic sets")
    p.add_argument("--sizes", default="10000,20000,30000,40000,50000,60000,70000,80000,"
                                      "90000,100000")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=_default_workers())
    p.add_argument("-o", "--out-dir", default="stats")
    p.set_defaults(func=cmd_stats)
    return ap


_FLAG_FOR = {"min_support": "min_support", "max_edges": "max_edges", "tau": "tau",
             "delta": "delta", "matrix": "matrix", "bijection": "bijection", "seed": "seed",
             "workers": "workers"}


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    rc = RunConfig.from_json(Path(known.config).read_text())
    defaults = {k: getattr(rc, k) for k in _FLAG_FOR}
    for action in parser._subparsers._group_actions:
        for sp in action.choices.values():
            valid = {a.dest for a in sp._actions}
            sp.set_defaults(**{k: v for k, v in defaults.items() if k in valid})


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"motifsel: error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ResidueParseError, GraphError, MatrixError, ConfigError, FileNotFoundError) as exc:
        print(f"motifsel: error: {exc}", file=sys.stderr)
        return 2
    except MiningError as exc:
        print(f"motifsel: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"motifsel: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"motifsel: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
