"""Command-line entry point: fingerprint, train, eval, compare, simulate.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
All randomness comes from the master seed through named streams
(fingerprint, split, forest, channel, scenario).
"""

import argparse
import copy
import json
import sys
from pathlib import Path

from . import classifier as clf
from .control import OracleClassifier, Trajectory, run_scenario
from .errors import ConfigError, RoomsenseError
from .fingerprints import FingerprintDatabase, SplitSpec, class_counts, load_csv, save_csv, split
from .link.channel import ChannelConfig
from .metrics import dump_metrics, evaluate, roc_csv
from .radio import Point2D, collect_fingerprints, load_environment
from .rng import SEED_MASK, stream
from .scenarios import DEFAULT_DURATION, default_environment, default_walk

DEFAULTS = {
    "environment": None,
    "seed": 42,
    "samples_per_room": 50,
    "dataset": None,
    "model": None,
    "out": "out",
    "split": {"train_fraction": 0.7, "stratified": True},
    "classifier": {"kind": "tree", "max_depth": None, "min_samples_leaf": 1, "min_gain": 1e-12,
                   "n_trees": 25, "feature_subsample": None, "bootstrap": True},
    "channel": {"bit_rate": 1_000_000, "loss_prob": 0.05, "latency": 0.001},
    "scenario": {"trajectory": None, "duration": DEFAULT_DURATION, "sample_period": 1.0,
                 "reliable": False, "retries": 3, "ack_timeout": 0.01, "abstain_below": None},
}


def _merge(base, override, where="config"):
    for key, value in override.items():
        if key not in base:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if isinstance(base[key], dict) and isinstance(value, dict):
            _merge(base[key], value, f"{where}.{key}")
        else:
            base[key] = value
    return base


def load_config(args) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    base_dir = Path.cwd()
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        _merge(cfg, doc)
        base_dir = path.parent
        for key in ("environment", "dataset", "model", "out"):
            if cfg[key] is not None and key in doc:
                cfg[key] = str(base_dir / cfg[key])

    # flags win over the config file
    if args.env is not None:
        cfg["environment"] = args.env
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.out is not None:
        cfg["out"] = args.out
    if getattr(args, "dataset", None) is not None:
        cfg["dataset"] = args.dataset
    if getattr(args, "model", None) is not None:
        cfg["model"] = args.model
    if getattr(args, "samples_per_room", None) is not None:
        cfg["samples_per_room"] = args.samples_per_room
    c = cfg["classifier"]
    if getattr(args, "classifier", None) is not None:
        c["kind"] = args.classifier
    if getattr(args, "trees", None) is not None:
        c["n_trees"] = args.trees
    if getattr(args, "no_bootstrap", False):
        c["bootstrap"] = False
    if getattr(args, "features", None) is not None:
        c["feature_subsample"] = args.features
    if getattr(args, "max_depth", None) is not None:
        c["max_depth"] = args.max_depth
    if getattr(args, "loss", None) is not None:
        cfg["channel"]["loss_prob"] = args.loss
    if getattr(args, "reliable", False):
        cfg["scenario"]["reliable"] = True
    if getattr(args, "duration", None) is not None:
        cfg["scenario"]["duration"] = args.duration

    seed = cfg["seed"]
    if not isinstance(seed, int) or not 0 <= seed <= SEED_MASK:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    if c["kind"] not in clf.KINDS:
        raise ConfigError(f"unknown classifier {c['kind']!r}")
    out = Path(cfg["out"])
    cfg["dataset"] = cfg["dataset"] or str(out / "fingerprints.csv")
    cfg["model"] = cfg["model"] or str(out / "model.json")
    return cfg


def _environment(cfg):
    if cfg["environment"] is None:
        return default_environment(cfg["seed"])
    path = Path(cfg["environment"])
    if not path.is_file():
        raise ConfigError(f"environment file not found: {path}")
    return load_environment(path)


def _dataset(cfg) -> FingerprintDatabase:
    path = Path(cfg["dataset"])
    if not path.is_file():
        raise ConfigError(f"fingerprint CSV not found: {path} (run 'fingerprint' first)")
    return load_csv(path)


def _split(cfg, db):
    s = cfg["split"]
    return split(db, SplitSpec(float(s["train_fraction"]), cfg["seed"], bool(s["stratified"])))


def _fit(cfg, kind, train):
    c = cfg["classifier"]
    tree_cfg = clf.TrainConfig(c["max_depth"], int(c["min_samples_leaf"]), float(c["min_gain"]))
    features = c["feature_subsample"]
    if features == "all":
        features = len(train.ap_macs)
    forest = clf.ForestParams(int(c["n_trees"]), features, bool(c["bootstrap"]), tree_cfg)
    return clf.fit(kind, train, tree_cfg, forest, seed=cfg["seed"])


def _out_dir(cfg) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str) -> None:
    path.write_bytes(text.encode("utf-8"))


def cmd_fingerprint(cfg) -> int:
    env = _environment(cfg)
    samples = collect_fingerprints(env, int(cfg["samples_per_room"]), stream(cfg["seed"], "fingerprint"))
    db = FingerprintDatabase(env.ap_macs, samples)
    out = Path(cfg["dataset"])
    out.parent.mkdir(parents=True, exist_ok=True)
    save_csv(db, out)
    print(f"wrote {len(db)} samples to {out}")
    for room, n in class_counts(db).items():
        print(f"  room {room}: {n}")
    return 0


def _report(result):
    print(f"accuracy {result['accuracy']:.4f}")
    print(result["confusion"].render())
    aucs = " ".join(f"room{c}={r.auc:.4f}" for c, r in result["roc"].items())
    print(f"auc {aucs} micro={result['micro'].auc:.4f} macro={result['macro'].auc:.4f}")


def cmd_train(cfg) -> int:
    db = _dataset(cfg)
    train, test = _split(cfg, db)
    kind = cfg["classifier"]["kind"]
    model = _fit(cfg, kind, train)
    out = _out_dir(cfg)
    model_path = Path(cfg["model"])
    model_path.parent.mkdir(parents=True, exist_ok=True)
    clf.save_model(model, model_path)
    result = evaluate(model, test)
    _write(out / "metrics.json", dump_metrics(result))
    _write(out / "roc.csv", roc_csv(result))
    print(f"{kind}: trained on {len(train)}, tested on {len(test)}; model -> {model_path}")
    _report(result)
    return 0


def cmd_eval(cfg) -> int:
    model_path = Path(cfg["model"])
    if not model_path.is_file():
        raise ConfigError(f"model file not found: {model_path}")
    model = clf.load_model(model_path)
    _, test = _split(cfg, _dataset(cfg))
    result = evaluate(model, test)
    out = _out_dir(cfg)
    _write(out / "metrics.json", dump_metrics(result))
    _write(out / "roc.csv", roc_csv(result))
    _report(result)
    return 0


def compare(cfg, db):
    train, test = _split(cfg, db)
    rows = []
    for kind in clf.KINDS:
        result = evaluate(_fit(cfg, kind, train), test)
        rows.append({"classifier": kind, "accuracy": result["accuracy"],
                     "macro_auc": result["macro"].auc})
    return rows


def format_table(rows) -> str:
    lines = [f"{'classifier':<10} {'accuracy':>9} {'macro_auc':>9}"]
    for r in rows:
        lines.append(f"{r['classifier']:<10} {r['accuracy']:>9.4f} {r['macro_auc']:>9.4f}")
    return "\n".join(lines) + "\n"


def cmd_compare(cfg) -> int:
    rows = compare(cfg, _dataset(cfg))
    out = _out_dir(cfg)
    _write(out / "comparison.json", json.dumps(rows, indent=2) + "\n")
    table = format_table(rows)
    _write(out / "comparison.txt", table)
    sys.stdout.write(table)
    return 0


def _trajectory(cfg):
    spec = cfg["scenario"]["trajectory"]
    if spec is None:
        return default_walk()
    try:
        return Trajectory(tuple((float(t), Point2D(float(x), float(y))) for t, x, y in spec))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"scenario.trajectory: {exc}") from exc


def cmd_simulate(cfg, oracle=False) -> int:
    env = _environment(cfg)
    if oracle:
        model = OracleClassifier(env.floorplan)
    else:
        model_path = Path(cfg["model"])
        if not model_path.is_file():
            raise ConfigError(f"model file not found: {model_path} (run 'train' first)")
        model = clf.load_model(model_path)
    ch = cfg["channel"]
    sc = cfg["scenario"]
    channel = ChannelConfig(float(ch["bit_rate"]), float(ch["loss_prob"]), float(ch["latency"]), cfg["seed"])
    log = run_scenario(env, model, _trajectory(cfg), channel, float(sc["duration"]),
                       stream(cfg["seed"], "scenario"), float(sc["sample_period"]),
                       bool(sc["reliable"]), int(sc["retries"]), float(sc["ack_timeout"]),
                       sc["abstain_below"])
    out = _out_dir(cfg)
    log.write(out / "scenario.jsonl", out / "summary.json", out / "events.jsonl")
    s = log.summary
    acc = "n/a" if s["tracking_accuracy"] is None else f"{s['tracking_accuracy']:.4f}"
    print(f"ticks {s['ticks']} (post-warmup {s['post_warmup_ticks']}), tracking accuracy {acc}")
    print(f"frames sent {s['frames_sent']}, delivered {s['frames_delivered']}, lost {s['frames_lost']}")
    return 0


def _features(text):
    if text == "all":
        return "all"
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer or 'all'") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _probability(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    common.add_argument("--out", help="output directory (default: out)")
    common.add_argument("--env", help="environment JSON (default: built-in three-room layout)")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--dataset", help="fingerprint CSV (default: <out>/fingerprints.csv)")
    data.add_argument("--model", help="model JSON (default: <out>/model.json)")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--classifier", choices=clf.KINDS)
    model.add_argument("--trees", type=int, help="forest size")
    model.add_argument("--no-bootstrap", action="store_true", help="fit forest trees on the full train set")
    model.add_argument("--features", type=_features, help="features tried per split, or 'all'")
    model.add_argument("--max-depth", type=int)

    parser = argparse.ArgumentParser(prog="roomsense", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    fp = sub.add_parser("fingerprint", parents=[common, data], help="collect a simulated radio map")
    fp.add_argument("--samples-per-room", type=int)
    sub.add_parser("train", parents=[common, data, model], help="split, fit and evaluate")
    sub.add_parser("eval", parents=[common, data], help="evaluate a saved model on the test split")
    sub.add_parser("compare", parents=[common, data, model], help="tree vs naive Bayes vs forest")
    sim = sub.add_parser("simulate", parents=[common, data], help="run the wearable/controller scenario")
    sim.add_argument("--loss", type=_probability, help="per-frame loss probability")
    sim.add_argument("--reliable", action="store_true", help="acknowledged delivery with retransmission")
    sim.add_argument("--duration", type=float, help="virtual seconds")
    sim.add_argument("--oracle", action="store_true", help="use the ground-truth locator as classifier")
    return parser


COMMANDS = {"fingerprint": cmd_fingerprint, "train": cmd_train, "eval": cmd_eval,
            "compare": cmd_compare, "simulate": cmd_simulate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "simulate":
            return cmd_simulate(cfg, oracle=args.oracle)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RoomsenseError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
