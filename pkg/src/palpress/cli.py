"""Command-line front end for the palpation depth-pressure pipeline.

Subcommands::

    generate   write a synthetic RGB-D corpus + manifest
    label      depth-label a dataset; write labels.json; print range table
    extract    export per-scheme feature arrays (.npy) + index.json
    train      train one classifier on one scheme set; write model.json
    eval       evaluate a saved model on a dataset's test split
    bench      run the scheme-by-model benchmark; write report.csv/.json
    report     render figures + CSV from a benchmark report.json

Every subcommand is byte-reproducible given identical flags and seed. All
errors print a single line starting with ``error:`` and exit nonzero.
A JSON config file (--config) may supply any flag value; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dataio, pipeline, synth
from . import report as report_mod
from .core import PalpressError
from .features import FeatureConfig, Scheme, SchemeSet
from .learn import (
    BenchmarkTable,
    ModelKind,
    TrainedModel,
    benchmark,
    combine_datasets,
    evaluate,
    train_model,
)

__all__ = ["main"]


class UsageError(Exception):
    """Bad flag combination detected after parsing."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        self.exit(2, f"error: {message}\n")


def _frames_count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid int value {text!r}") from None
    if value < 2:
        raise argparse.ArgumentTypeError("must be >= 2")
    return value


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master RNG seed (default 0)")
    common.add_argument("--out", default=None, help="output file or directory")
    common.add_argument("--data", default=None, help="dataset directory (with manifest.json)")
    common.add_argument("--config", default=None, help="JSON config file mirroring flags")
    common.add_argument("--verbose", action="store_true", default=None, help="progress output")

    feat = argparse.ArgumentParser(add_help=False)
    feat.add_argument("--shadow-threshold", type=int, default=None, help="shadow cutoff (default 50)")
    feat.add_argument("--laws-bins", type=int, default=None, help="bins per energy map (default 16)")
    feat.add_argument(
        "--laws-window", type=int, default=None, help="mean-removal window (default 15)"
    )
    feat.add_argument(
        "--reducer",
        choices=("median", "mean", "min"),
        default=None,
        help="per-frame depth reducer (default median)",
    )

    parser = _Parser(prog="palpress", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="write a synthetic corpus")
    p.add_argument("--frames", type=_frames_count, default=None,
                   help="frames per clip for every cell (default: the reference plan)")
    p.add_argument("--frame-size", type=int, default=None, help="square frame size (default 128)")
    p.add_argument("--noise-sigma", type=float, default=None, help="texture noise (default 4.0)")
    p.add_argument("--cycles", type=int, default=None, help="palpation cycles per clip (default 6)")

    sub.add_parser("label", parents=[common, feat], help="depth-label a dataset")

    p = sub.add_parser("extract", parents=[common, feat], help="export feature arrays")
    p.add_argument("--schemes", default=None, help="comma list of single schemes (default all)")

    p = sub.add_parser("train", parents=[common, feat], help="train one classifier")
    p.add_argument("--model", default=None, help="reg|svm|gbt|ann (default svm)")
    p.add_argument("--schemes", default=None, help="scheme set, e.g. lawlbp (default lawlbp)")

    p = sub.add_parser("eval", parents=[common, feat], help="evaluate a saved model")
    p.add_argument("--model-file", default=None, help="model JSON from `train` (default model.json)")

    p = sub.add_parser("bench", parents=[common, feat], help="run the full benchmark")
    p.add_argument("--models", default=None, help="comma list of model kinds (default all four)")
    p.add_argument("--schemes", default=None,
                   help="comma list of scheme sets (default all singles and pairs)")

    p = sub.add_parser("report", parents=[common], help="render report figures")
    p.add_argument("--report", dest="report_file", default=None,
                   help="benchmark report.json (default <data>/report.json)")
    return parser


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        loaded = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path}: invalid JSON ({exc})") from None
    if not isinstance(loaded, dict):
        raise UsageError(f"config file {path}: expected a JSON object")
    return loaded


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Merge precedence: explicit flag > config file entry > default."""
    cfg = _load_config_file(getattr(args, "config", None))
    resolved = {}
    for key, default in defaults.items():
        value = getattr(args, key, None)
        if value is None:
            value = cfg.get(key, default)
        resolved[key] = value
    return resolved


def _feature_config(opt: dict) -> FeatureConfig:
    return FeatureConfig(
        shadow_threshold=int(opt["shadow_threshold"]),
        laws_bins=int(opt["laws_bins"]),
        laws_mean_window=int(opt["laws_window"]),
    )


_FEATURE_DEFAULTS = {
    "shadow_threshold": 50,
    "laws_bins": 16,
    "laws_window": 15,
    "reducer": "median",
}


def _require_data(opt: dict) -> Path:
    if not opt["data"]:
        raise UsageError("--data is required for this subcommand")
    return Path(opt["data"])


def _parse_schemes(text: str, singles_only: bool) -> tuple[SchemeSet, ...]:
    sets = tuple(SchemeSet.parse(token) for token in str(text).split(",") if token.strip())
    if not sets:
        raise UsageError("no schemes given")
    if singles_only and any(len(ss) > 1 for ss in sets):
        raise UsageError("this subcommand takes single schemes only")
    if len(set(sets)) != len(sets):
        raise UsageError("duplicate scheme sets")
    return sets


def _parse_models(text: str) -> tuple[ModelKind, ...]:
    kinds = tuple(ModelKind.from_label(tok) for tok in str(text).split(",") if tok.strip())
    if not kinds:
        raise UsageError("no models given")
    if len(set(kinds)) != len(kinds):
        raise UsageError("duplicate model kinds")
    return kinds


def _say(opt: dict, message: str) -> None:
    if opt.get("verbose"):
        print(message)


# --------------------------------------------------------------------------
# subcommands


def cmd_generate(args: argparse.Namespace) -> int:
    opt = _resolve(args, {
        "seed": 0, "out": "data", "verbose": False, "frames": None,
        "frame_size": 128, "noise_sigma": 4.0, "cycles": 6,
    })
    if opt["frames"] is not None and int(opt["frames"]) < 2:
        raise UsageError("--frames must be >= 2")
    if opt["frames"] is None:
        plan = synth.DEFAULT_SPLIT_COUNTS
    else:
        n = int(opt["frames"])
        plan = {cell: (n, n) for cell in synth.cell_order()}
    _say(opt, f"generating corpus (seed {opt['seed']}) under {opt['out']}")
    corpus = synth.generate_corpus(
        plan,
        seed=int(opt["seed"]),
        frame_size=int(opt["frame_size"]),
        noise_sigma=float(opt["noise_sigma"]),
        palpation_cycles=int(opt["cycles"]),
    )
    generator_echo = {
        "seed": int(opt["seed"]),
        "frame_size": int(opt["frame_size"]),
        "noise_sigma": float(opt["noise_sigma"]),
        "palpation_cycles": int(opt["cycles"]),
        "plan": {
            f"{cup.value.lower()}/{quadrant.value}": list(plan[(cup, quadrant)])
            for cup, quadrant in synth.cell_order()
            if (cup, quadrant) in plan
        },
    }
    dataio.save_dataset(corpus.clips, opt["out"], generator=generator_echo)
    counts = corpus.counts()
    print(f"{'cup':<4} {'quadrant':<9} {'train':>6} {'test':>5}")
    total_train = total_test = 0
    for cell in synth.cell_order():
        if cell not in counts:
            continue
        n_train, n_test = counts[cell]
        total_train += n_train
        total_test += n_test
        print(f"{cell[0].value:<4} {cell[1].value:<9} {n_train:>6} {n_test:>5}")
    print(f"{'all':<4} {'':<9} {total_train:>6} {total_test:>5}")
    print(f"wrote {len(corpus.clips)} clips to {Path(opt['out']) / 'manifest.json'}")
    return 0


def cmd_label(args: argparse.Namespace) -> int:
    opt = _resolve(args, {"data": None, "out": None, "verbose": False, **_FEATURE_DEFAULTS})
    data_dir = _require_data(opt)
    clips = dataio.load_dataset(data_dir)
    _say(opt, f"loaded {len(clips)} clips from {data_dir}")
    table = pipeline.label_clips(clips, reducer=str(opt["reducer"]))
    out = Path(opt["out"]) if opt["out"] else data_dir
    out_path = out if out.suffix == ".json" else out / "labels.json"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(dataio.canonical_json(table.to_json_dict()), encoding="utf-8")
    header = f"{'cup':<4} {'quadrant':<9} {'low':<18} {'medium':<18} {'high':<18}"
    print(header)
    print("-" * len(header))
    for row in table.cell_rows():
        low_med, med_high = row.boundaries
        low = f"[{row.stats.min_mm:.1f}, {low_med:.1f}]"
        mid = f"[{low_med:.1f}, {med_high:.1f}]"
        high = f"[{med_high:.1f}, {row.stats.max_mm:.1f}]"
        print(f"{row.cup.value:<4} {row.quadrant.value:<9} {low:<18} {mid:<18} {high:<18}")
    print(f"labeled {table.n_frames} frames; wrote {out_path}")
    return 0


def _labeled_datasets(opt: dict, schemes: tuple[Scheme, ...]):
    data_dir = _require_data(opt)
    clips = dataio.load_dataset(data_dir)
    _say(opt, f"loaded {len(clips)} clips from {data_dir}")
    table = pipeline.label_clips(clips, reducer=str(opt["reducer"]))
    _say(opt, f"labeled {table.n_frames} frames; extracting {len(schemes)} schemes")
    config = _feature_config(opt)
    singles = pipeline.build_datasets(clips, table, schemes=schemes, config=config)
    return singles, config


def cmd_extract(args: argparse.Namespace) -> int:
    opt = _resolve(args, {
        "data": None, "out": None, "verbose": False, "schemes": "ent,sha,law,lbp",
        **_FEATURE_DEFAULTS,
    })
    scheme_sets = _parse_schemes(opt["schemes"], singles_only=True)
    schemes = tuple(ss.schemes[0] for ss in scheme_sets)
    singles, config = _labeled_datasets(opt, schemes)
    out_dir = Path(opt["out"]) if opt["out"] else _require_data(opt) / "features"
    out_dir.mkdir(parents=True, exist_ok=True)

    any_ds = singles[schemes[0]]
    rows = [
        {
            "clip_id": s.meta.clip_id,
            "frame_index": s.meta.frame_index,
            "cup": s.meta.cup.value,
            "quadrant": s.meta.quadrant.value,
            "split": split,
            "label": s.label.label,
        }
        for split in ("train", "test")
        for s in getattr(any_ds, split)
    ]
    index = {
        "format_version": "1",
        "feature_config": config.to_dict(),
        "schemes": {},
        "rows": rows,
    }
    for scheme in schemes:
        ds = singles[scheme]
        matrix = np.stack(
            [s.features.values for split in ("train", "test") for s in getattr(ds, split)]
        )
        npy_path = out_dir / f"{scheme.label}.npy"
        np.save(npy_path, matrix)
        index["schemes"][scheme.label] = {"file": npy_path.name, "dim": int(matrix.shape[1])}
        print(f"{scheme.label}: {matrix.shape[0]} x {matrix.shape[1]} -> {npy_path}")
    (out_dir / "index.json").write_text(dataio.canonical_json(index), encoding="utf-8")
    print(f"wrote {out_dir / 'index.json'}")
    return 0


def _single_set_dataset(opt: dict, scheme_set: SchemeSet):
    singles, config = _labeled_datasets(opt, tuple(scheme_set))
    if len(scheme_set) == 1:
        return singles[scheme_set.schemes[0]], config
    return combine_datasets(singles, scheme_set), config


def cmd_train(args: argparse.Namespace) -> int:
    opt = _resolve(args, {
        "data": None, "out": "model.json", "seed": 0, "verbose": False,
        "model": "svm", "schemes": "lawlbp", **_FEATURE_DEFAULTS,
    })
    kind = ModelKind.from_label(str(opt["model"]))
    scheme_set = SchemeSet.parse(str(opt["schemes"]))
    data, config = _single_set_dataset(opt, scheme_set)
    _say(opt, f"training {kind.label} on {scheme_set.label} ({len(data.train)} samples)")
    model = train_model(kind, data, seed=int(opt["seed"]))
    train_acc = evaluate(model, data.train).accuracy
    test_acc = evaluate(model, data.test).accuracy if data.test else float("nan")
    out_path = Path(opt["out"])
    if out_path.suffix != ".json":
        out_path = out_path / "model.json"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "format_version": "1",
        "scheme": scheme_set.label,
        "feature_config": config.to_dict(),
        "seed": int(opt["seed"]),
        "model": model.to_dict(),
    }
    out_path.write_text(dataio.canonical_json(payload), encoding="utf-8")
    print(f"{kind.label} on {scheme_set.label}: train_acc={train_acc:.4f} test_acc={test_acc:.4f}")
    print(f"wrote {out_path}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    opt = _resolve(args, {
        "data": None, "out": None, "verbose": False, "model_file": "model.json",
        **_FEATURE_DEFAULTS,
    })
    model_path = Path(opt["model_file"])
    if not model_path.is_file():
        raise UsageError(f"model file not found: {model_path}")
    payload = json.loads(model_path.read_text(encoding="utf-8"))
    if str(payload.get("format_version")) != "1":
        raise PalpressError(f"unknown model format_version {payload.get('format_version')!r}")
    scheme_set = SchemeSet.parse(payload["scheme"])
    stored = FeatureConfig.from_dict(payload.get("feature_config", {}))
    opt = dict(opt)
    opt["shadow_threshold"] = stored.shadow_threshold
    opt["laws_bins"] = stored.laws_bins
    opt["laws_window"] = stored.laws_mean_window
    model = TrainedModel.from_dict(payload["model"])
    data, _ = _single_set_dataset(opt, scheme_set)
    report = evaluate(model, data.test if data.test else data.train)
    split_name = "test" if data.test else "train"
    print(f"{model.kind.label} on {scheme_set.label} ({split_name}, n={report.n}): "
          f"accuracy={report.accuracy:.4f}")
    print("confusion (rows: truth low/medium/high, cols: predicted):")
    for row in report.confusion:
        print("  " + " ".join(f"{v:>5d}" for v in row))
    if opt["out"]:
        out_path = Path(opt["out"])
        if out_path.suffix != ".json":
            out_path = out_path / "eval.json"
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(
            dataio.canonical_json({"format_version": "1", "split": split_name} | report.to_dict()),
            encoding="utf-8",
        )
        print(f"wrote {out_path}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    opt = _resolve(args, {
        "data": None, "out": None, "seed": 0, "verbose": False,
        "models": "reg,svm,gbt,ann", "schemes": None, **_FEATURE_DEFAULTS,
    })
    kinds = _parse_models(opt["models"])
    if opt["schemes"]:
        scheme_sets = _parse_schemes(opt["schemes"], singles_only=False)
    else:
        scheme_sets = SchemeSet.all_sets()
    needed = tuple(sorted({s for ss in scheme_sets for s in ss}))
    singles, _ = _labeled_datasets(opt, needed)
    _say(opt, f"benchmarking {len(scheme_sets)} scheme sets x {len(kinds)} models")
    table = benchmark(singles, kinds=kinds, scheme_sets=scheme_sets, seed=int(opt["seed"]))
    out_dir = Path(opt["out"]) if opt["out"] else _require_data(opt)
    csv_path, json_path = report_mod.write_delimited(table, out_dir)
    print(table.format_table())
    print(f"wrote {csv_path} and {json_path}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    opt = _resolve(args, {
        "data": None, "out": None, "verbose": False, "report_file": None,
    })
    if opt["report_file"]:
        report_path = Path(opt["report_file"])
    elif opt["data"]:
        report_path = Path(opt["data"]) / "report.json"
    else:
        report_path = Path("report.json")
    if not report_path.is_file():
        raise UsageError(f"report not found: {report_path} (run `bench` first)")
    table = BenchmarkTable.from_json_dict(json.loads(report_path.read_text(encoding="utf-8")))
    out_dir = Path(opt["out"]) if opt["out"] else report_path.parent
    csv_path, _ = report_mod.write_delimited(table, out_dir)
    figures = report_mod.render_figures(table, out_dir)
    print(table.format_table())
    print(f"wrote {csv_path}")
    for fig in figures:
        print(f"wrote {fig}")
    return 0


_COMMANDS = {
    "generate": cmd_generate,
    "label": cmd_label,
    "extract": cmd_extract,
    "train": cmd_train,
    "eval": cmd_eval,
    "bench": cmd_bench,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PalpressError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
