"""``elastika`` command line: tuning runs, sweeps, noise studies, forests, reports and benchmarks.

Exit codes: 0 success, 2 usage or parse error, 3 dataset gate, 4 I/O error,
5 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from elastika import __version__
from elastika.data import Split, add_noise, check_seed, load_pair, load_split, write_ucr_tsv
from elastika.exceptions import DatasetGateError, ElastikaError, StorageError, UsageError

log = logging.getLogger("elastika")

STOCHASTIC_HELP = "master seed (u64); required because the run samples randomly"


def _configure_threads():
    cap = os.environ.get("ELASTIKA_THREADS")
    if not cap:
        return
    import numba

    try:
        n = int(cap)
    except ValueError as exc:
        raise UsageError(f"ELASTIKA_THREADS must be a positive integer, got {cap!r}") from exc
    if n < 1:
        raise UsageError(f"ELASTIKA_THREADS must be a positive integer, got {cap!r}")
    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def _data_root(args) -> Path:
    if args.data_root:
        return Path(args.data_root)
    from elastika.synthetic import bundled_root

    return bundled_root()


def _require_seed(args, why="this command samples randomly"):
    if args.seed is None:
        raise UsageError(f"--seed is required: {why}")
    return check_seed(args.seed)


def _timed(fn, *a, **kw):
    start = time.perf_counter()
    out = fn(*a, **kw)
    return out, time.perf_counter() - start


def run_classifier(cid, train, test, seed, trees=100, candidates=5, noise=None):
    """Train and test one classifier id on one dataset; returns a RunRecord."""
    from elastika.forest import PFConfig, train_pf
    from elastika.records import RunRecord
    from elastika.tuning import classify, train_plus

    if cid.is_forest:
        config = PFConfig(num_trees=trees, candidates_per_node=candidates, plus_mode=cid.set_name is not None,
                          exponent_set=cid.set_name or "a", seed=seed)
        forest, train_s = _timed(train_pf, train, config)
        acc, test_s = _timed(forest.score, test)
        model = {"pf_config": config.__dict__.copy()}
    else:
        model_obj, train_s = _timed(train_plus, train, cid.family, cid.exponents, cid.per_gamma, seed or 0)
        acc, test_s = _timed(classify, model_obj, train, test)
        model = model_obj.to_dict()
    return RunRecord(train.name, str(cid), model, float(acc), train_s, test_s, seed, __version__, noise)


# ---------------------------------------------------------------- commands


def cmd_tune(args) -> int:
    from elastika.records import ClassifierId, RecordStore

    if args.gamma is not None and args.set is not None:
        raise UsageError("give either --set or --gamma, not both")
    core = f"^{args.gamma}" if args.gamma is not None else f"+{args.set or 'a'}"
    suffix = f"_{args.per_gamma}" if args.per_gamma != 100 else ""
    cid = ClassifierId.parse(f"{args.distance}{core}{suffix}")
    seed = _require_seed(args, "ADTW samples pairs to scale its penalties") if cid.stochastic else args.seed
    train, test = load_pair(_data_root(args), args.dataset)
    record = run_classifier(cid, train, test, seed)
    if args.out:
        RecordStore(args.out).append(record)
    print(record.to_json())
    return 0


def _dataset_names(args) -> list[str]:
    names = list(args.dataset or [])
    if args.list:
        try:
            lines = Path(args.list).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise StorageError(f"cannot read dataset list {args.list}: {exc.strerror or exc}") from exc
        names += [ln.split("#", 1)[0].strip() for ln in lines]
    names = [n for n in names if n]
    if not names:
        raise UsageError("no datasets given (use --dataset or --list)")
    return names


def _sweep(names, cids, args, seed, data_root, noise=None) -> int:
    from elastika.records import RecordStore

    store = RecordStore(args.out)
    done = store.completed()
    failures = []
    for name in names:
        pending = [c for c in cids if (name, str(c), seed, noise) not in done]
        if not pending:
            log.info("%s: already complete", name)
            continue
        try:
            train, test = load_pair(data_root, name)
        except (ElastikaError, OSError) as exc:
            failures.append(_failure(name, None, exc))
            continue
        for cid in pending:
            try:
                record = run_classifier(cid, train, test, seed, args.trees, args.candidates, noise)
            except ElastikaError as exc:
                failures.append(_failure(name, cid, exc))
                continue
            store.append(record)  # the parent is the only writer
            log.info("%s %s: %.4f", name, cid, record.test_accuracy)
    manifest = Path(str(args.out) + ".failures.json")
    if failures:
        _write_json(manifest, failures)
        for f in failures:
            log.warning("%s %s: %s", f["dataset"], f["classifier"] or "-", f["message"])
    codes = [f["exit_code"] for f in failures if not f["excluded"]]
    return max(codes, default=0)


def _failure(name, cid, exc) -> dict:
    code = exc.exit_code if isinstance(exc, ElastikaError) else 4
    return {
        "dataset": name,
        "classifier": str(cid) if cid is not None else None,
        "error": type(exc).__name__,
        "message": str(exc),
        "exit_code": code,
        # datasets failing the benchmark filter are exclusions, not errors
        "excluded": isinstance(exc, DatasetGateError),
    }


def _write_json(path: Path, obj):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _parse_ids(text) -> list:
    from elastika.records import ClassifierId

    ids = [ClassifierId.parse(t) for t in str(text).split(",") if t.strip()]
    if not ids:
        raise UsageError("no classifier ids given")
    return ids


def cmd_sweep(args) -> int:
    cids = _parse_ids(args.classifiers)
    seed = _require_seed(args) if any(c.stochastic for c in cids) else args.seed
    return _sweep(_dataset_names(args), cids, args, seed, _data_root(args))


def _noise_seeds(seed: int) -> tuple[int, int]:
    train_ss, test_ss = np.random.SeedSequence(seed).spawn(2)
    return int(train_ss.generate_state(1, np.uint64)[0]), int(test_ss.generate_state(1, np.uint64)[0])


def cmd_noise(args) -> int:
    seed = _require_seed(args, "noise is random")
    if args.scale < 0:
        raise UsageError("noise scale must be nonnegative")
    cids = _parse_ids(args.classifiers)
    names = _dataset_names(args)
    work = Path(args.work_dir or f"{args.out}.noise-{args.scale:g}")
    root = _data_root(args)
    s_train, s_test = _noise_seeds(seed)
    available = []
    failures = []
    for name in names:
        try:
            train, test = load_pair(root, name)
        except (ElastikaError, OSError) as exc:
            failures.append(_failure(name, None, exc))
            continue
        for ds, s in ((train, s_train), (test, s_test)):
            noisy = add_noise(ds, args.scale, s)
            try:
                write_ucr_tsv(noisy, work / name / f"{name}_{ds.split.value}.tsv")
            except OSError as exc:
                raise StorageError(f"cannot write noisy copy under {work}: {exc.strerror or exc}") from exc
        available.append(name)
    if failures:
        _write_json(Path(str(args.out) + ".noise-failures.json"), failures)
    code = _sweep(available, cids, args, seed, work, noise=float(args.scale))
    return max([code] + [f["exit_code"] for f in failures if not f["excluded"]])


def cmd_pf(args) -> int:
    from elastika.forest import PFConfig, train_pf
    from elastika.records import ClassifierId, RecordStore, RunRecord

    seed = _require_seed(args)
    train, test = load_pair(_data_root(args), args.dataset)
    config = PFConfig(args.trees, args.candidates, args.plus, args.set, seed)
    forest, train_s = _timed(train_pf, train, config)
    acc, test_s = _timed(forest.score, test)
    if args.save_forest:
        _write_text(Path(args.save_forest), forest.to_json())
    cid = ClassifierId.parse("pf+" if args.plus else "pf")
    record = RunRecord(train.name, str(cid), {"pf_config": config.__dict__.copy()}, acc, train_s, test_s, seed)
    if args.out:
        RecordStore(args.out).append(record)
    print(record.to_json())
    return 0


def _write_text(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot write {path}: {exc.strerror or exc}") from exc


def cmd_pf_predict(args) -> int:
    from elastika.forest import ProximityForest

    try:
        text = Path(args.forest).read_text(encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot read forest {args.forest}: {exc.strerror or exc}") from exc
    root = _data_root(args)
    train = load_split(root, args.dataset, Split.TRAIN)
    forest = ProximityForest.from_json(text, train)
    target = load_split(root, args.dataset, Split(args.split))
    pred = forest.predict(target.X)
    if args.predictions:
        _write_text(Path(args.predictions), "".join(f"{int(p)}\n" for p in pred))
    print(json.dumps({"dataset": target.name, "split": target.split.value,
                      "accuracy": float(np.mean(pred == target.y)), "n": len(target)}))
    return 0


def _mean_accuracy(records, cid: str) -> dict[str, float]:
    by_dataset: dict[str, list[float]] = {}
    for r in records:
        if r.classifier == cid:
            by_dataset.setdefault(r.dataset, []).append(r.test_accuracy)
    # several seeds or noise draws of the same run are averaged
    return {d: float(np.mean(v)) for d, v in by_dataset.items()}


def cmd_report(args) -> int:
    from elastika.records import RecordStore
    from elastika.report import emit_cd, emit_scatter
    from elastika.stats import PairedAccuracies, cliques, mean_ranks

    records = []
    for path in args.records:
        if not Path(path).exists():
            raise StorageError(f"record file {path} not found")
        records += RecordStore(path).read()
    if args.noise is not None:
        records = [r for r in records if r.noise == args.noise]
    ids = [t.strip() for t in args.ids.split(",")] if args.ids else sorted({r.classifier for r in records})
    table = {cid: _mean_accuracy(records, cid) for cid in ids}
    for cid, accs in table.items():
        if not accs:
            raise UsageError(f"no records for classifier {cid!r}")
    if args.kind == "scatter":
        if len(ids) != 2:
            raise UsageError("a scatter report compares exactly two classifier ids")
        a, b = table[ids[0]], table[ids[1]]
        common = sorted(set(a) & set(b))
        if not common:
            raise UsageError("the two classifiers share no dataset")
        pairs = PairedAccuracies(tuple(common), [a[d] for d in common], [b[d] for d in common])
        paths = emit_scatter(pairs, ids, args.out)
    else:
        datasets = set.union(*(set(v) for v in table.values()))
        if any(set(v) != datasets for v in table.values()):
            raise UsageError("classifiers cover different datasets; a rank diagram needs complete rows")
        order = sorted(datasets)
        M = np.array([[table[c][d] for c in ids] for d in order])
        paths = emit_cd(mean_ranks(M, ids), cliques(M, args.alpha, ids), args.out)
    for p in paths:
        print(p)
    return 0


def cmd_bench(args) -> int:
    from elastika.bench import cell_counts, fast_path_speedups

    result = {
        "fast_path": fast_path_speedups(args.size, args.repeats, seed=0),
        "band_cells": cell_counts(args.length),
        "threads": __import__("numba").get_num_threads(),
    }
    print(json.dumps(result, indent=2, sort_keys=True))
    return 0


# ---------------------------------------------------------------- parser


def _add_common(p, stochastic=True):
    p.add_argument("--config", help="JSON file whose keys supply any flag of this command")
    p.add_argument("--data-root", help="directory with <name>/<name>_TRAIN.tsv (default: bundled datasets)")
    p.add_argument("--seed", type=int, help=STOCHASTIC_HELP if stochastic else "seed recorded with the run")


def _add_sweep_args(p):
    p.add_argument("--dataset", action="append", help="dataset name; repeatable")
    p.add_argument("--list", help="file with one dataset name per line ('#' starts a comment)")
    p.add_argument("--classifiers", default="dtw+a", help="comma-separated ids, e.g. dtw+a,adtw+a,dtw^1_500,pf+")
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--candidates", type=int, default=5)
    p.add_argument("--out", required=False, help="JSON-lines record store (appended, resumable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elastika", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"elastika {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tune", help="tune DTW/ADTW with the cost exponent and evaluate on the test split")
    _add_common(p)
    p.add_argument("--dataset", required=False)
    p.add_argument("--distance", choices=["dtw", "adtw"], default="dtw")
    p.add_argument("--set", help="exponent set a, b or c (default a)")
    p.add_argument("--gamma", type=float, help="fixed exponent instead of a set")
    p.add_argument("--per-gamma", type=int, default=100, help="windows or penalties per exponent")
    p.add_argument("--out", help="append the record to this JSON-lines file")
    p.set_defaults(func=cmd_tune, required=("dataset",))

    p = sub.add_parser("sweep", help="run classifier ids over many datasets; resumable")
    _add_common(p)
    _add_sweep_args(p)
    p.set_defaults(func=cmd_sweep, required=("out",))

    p = sub.add_parser("noise", help="add scaled Gaussian noise to every dataset, then sweep")
    _add_common(p)
    _add_sweep_args(p)
    p.add_argument("--scale", type=float, default=0.1, help="noise sd as a multiple of each series' sd")
    p.add_argument("--work-dir", help="where the noisy copies are written")
    p.set_defaults(func=cmd_noise, required=("out",))

    p = sub.add_parser("pf", help="train and test a proximity forest")
    _add_common(p)
    p.add_argument("--dataset")
    p.add_argument("--plus", action="store_true", help="sample the cost exponent at each node")
    p.add_argument("--set", default="a")
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--candidates", type=int, default=5)
    p.add_argument("--save-forest", help="write the trained forest as JSON")
    p.add_argument("--out", help="append the record to this JSON-lines file")
    p.set_defaults(func=cmd_pf, required=("dataset",))

    p = sub.add_parser("pf-predict", help="reload a saved forest and classify a split")
    _add_common(p, stochastic=False)
    p.add_argument("--forest")
    p.add_argument("--dataset")
    p.add_argument("--split", choices=["TRAIN", "TEST"], default="TEST")
    p.add_argument("--predictions", help="write one predicted label per line")
    p.set_defaults(func=cmd_pf_predict, required=("forest", "dataset"))

    p = sub.add_parser("report", help="scatter or critical-difference report from record files")
    p.add_argument("--config")
    p.add_argument("--kind", choices=["scatter", "cd"], default="scatter")
    p.add_argument("--records", nargs="+")
    p.add_argument("--ids", help="comma-separated classifier ids (scatter: exactly two)")
    p.add_argument("--noise", type=float, help="only use records with this noise scale")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", help="output stem; .csv and .svg are written")
    p.set_defaults(func=cmd_report, required=("records", "out"))

    p = sub.add_parser("bench", help="fast-path and band-size microbenchmarks")
    p.add_argument("--config")
    p.add_argument("--size", type=int, default=10**6)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--length", type=int, default=256)
    p.set_defaults(func=cmd_bench, required=())
    return parser


def _load_config(path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise StorageError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        config = _load_config(args.config)
        defaults = vars(parser.parse_args([args.command]))
        unknown = set(config) - (set(vars(args)) - {"func", "required", "command", "config"})
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        # explicit flags win over the config file, the config over built-in defaults
        for key, value in config.items():
            if getattr(args, key) == defaults.get(key):
                setattr(args, key, value)
    missing = [k for k in args.required if getattr(args, k, None) in (None, [], "")]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))
    return args


def main(argv=None) -> int:
    warnings.filterwarnings("ignore", message=".*TBB threading layer.*")
    try:
        args = parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        _configure_threads()
        return args.func(args)
    except ElastikaError as exc:
        print(f"elastika: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"elastika: error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
