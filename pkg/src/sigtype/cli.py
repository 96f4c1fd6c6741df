"""``sigtype`` command line: extract, build, train-embeddings, train, predict, eval, stats.

Every command reads and writes fixed file names inside ``--workdir`` and leaves
a ``<command>.meta.json`` sidecar recording the run-configuration hash, the
hashes of bundled language resources, and a SHA-256 for each artifact written.
"""
from __future__ import annotations

import argparse
import configparser
import dataclasses
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from sigtype.dataset import (
    apply_split_manifest,
    build_datapoints,
    get_variant,
    query_datapoints,
    read_datapoints,
    split_train_test,
    write_datapoints,
    write_split_manifest,
)
from sigtype.embed import EmbeddingConfig, load_embeddings, save_embeddings
from sigtype.errors import DataError, EmptyDataset, NumericError, ShapeMismatch, SigtypeError
from sigtype.evaluation import csv_text, evaluate, feature_length_stats, format_feature_stats, format_table
from sigtype.extract import (
    ExtractionStats,
    RawFunction,
    SourceFile,
    extract_corpus,
    extract_functions,
    load_manifest,
    parse_module,
    read_functions,
    write_functions,
)
from sigtype.neural import ModelConfig, TrainConfig, load_checkpoint, predict_proba, rank_classes, read_header, save_checkpoint, train
from sigtype.nlp import resource_hashes
from sigtype.pipeline import train_embedding_pair
from sigtype.vectorize import (
    FeatureBudget,
    TypeVocabulary,
    build_tensors,
    build_type_vocabulary,
    read_labels,
    read_tensors,
    vectorize,
    write_labels,
    write_tensors,
)

log = logging.getLogger("sigtype")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

FILES = {
    "functions": "functions.jsonl",
    "extract_stats": "extract_stats.json",
    "datapoints": "datapoints.jsonl",
    "split": "split.json",
    "vocab": "vocab.txt",
    "emb_comment": "embeddings_comment.txt",
    "emb_identifier": "embeddings_identifier.txt",
    "train_x": "train.tensors",
    "train_y": "train.labels",
    "test_x": "test.tensors",
    "test_y": "test.labels",
    "checkpoint": "model.ckpt",
    "loss": "loss.dat",
    "report": "report.csv",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    """Everything that determines a run's outputs; paths are excluded from the hash."""

    manifest: str | None = None
    workdir: str = "work"
    variant: int = 1
    arch: str = "C"
    seed: int = 0
    dim: int = 14
    cap: int = 1000
    deterministic: bool = False
    auto_dim: bool = False
    per_project_split: bool = False
    embedding: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    budget: FeatureBudget = field(default_factory=FeatureBudget)

    PATH_FIELDS = ("manifest", "workdir")

    def hashable(self) -> dict:
        d = dataclasses.asdict(self)
        for key in self.PATH_FIELDS:
            d.pop(key)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.hashable(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()

    @property
    def embed_config(self) -> EmbeddingConfig:
        return dataclasses.replace(self.embedding, seed=self.seed)

    @property
    def train_config(self) -> TrainConfig:
        return dataclasses.replace(self.train, seed=self.seed)

    def path(self, key: str) -> Path:
        return Path(self.workdir) / FILES[key]


_SECTIONS = {"embedding": EmbeddingConfig, "train": TrainConfig, "budget": FeatureBudget}
_TOP_LEVEL = {f.name: f for f in dataclasses.fields(RunConfig) if f.name not in _SECTIONS}


def _coerce(raw: str, default, key: str):
    if isinstance(default, bool):
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"config key {key!r}: expected a boolean, got {raw!r}")
    try:
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError:
        raise UsageError(f"config key {key!r}: cannot parse {raw!r}") from None
    if raw.strip().lower() in ("", "none"):
        return None
    if key == "epochs":
        return int(raw)
    return raw.strip()


def load_config_file(path) -> dict:
    """Parse a ``key = value`` file with ``[run]``, ``[embedding]``, ``[train]`` and ``[budget]`` sections."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}") from None
    except configparser.Error as exc:
        raise UsageError(f"config file {path}: {exc}") from None
    base = RunConfig()
    out: dict = {}
    for section in parser.sections():
        if section == "run":
            for key, raw in parser.items(section):
                if key not in _TOP_LEVEL:
                    raise UsageError(f"config file {path}: unknown key {key!r} in [run]")
                out[key] = _coerce(raw, getattr(base, key), key)
        elif section in _SECTIONS:
            defaults = getattr(base, section)
            names = {f.name for f in dataclasses.fields(defaults)}
            values = {}
            for key, raw in parser.items(section):
                if key not in names:
                    raise UsageError(f"config file {path}: unknown key {key!r} in [{section}]")
                values[key] = _coerce(raw, getattr(defaults, key), key)
            out[section] = values
        else:
            raise UsageError(f"config file {path}: unknown section [{section}]")
    return out


def resolve_config(args) -> RunConfig:
    """Defaults, then the config file, then command-line flags."""
    from_file = load_config_file(args.config) if args.config else {}
    top = {k: v for k, v in from_file.items() if k not in _SECTIONS}
    sections = {k: dict(from_file.get(k, {})) for k in _SECTIONS}

    for name in ("workdir", "seed", "variant", "arch", "dim", "cap", "manifest"):
        value = getattr(args, name, None)
        if value is not None:
            top[name] = value
    for name in ("deterministic", "auto_dim", "per_project_split"):
        if getattr(args, name, False):
            top[name] = True
    for flag, key in (("epochs", "epochs"), ("batch_size", "batch_size"), ("learning_rate", "learning_rate")):
        value = getattr(args, flag, None)
        if value is not None:
            sections["train"][key] = value
    value = getattr(args, "embed_epochs", None)
    if value is not None:
        sections["embedding"]["epochs"] = value

    try:
        cfg = RunConfig(
            **top,
            embedding=EmbeddingConfig(**sections["embedding"]),
            train=TrainConfig(**sections["train"]),
            budget=FeatureBudget(**sections["budget"]),
        )
    except TypeError as exc:
        raise UsageError(str(exc)) from None
    try:
        get_variant(cfg.variant)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if cfg.arch not in ("A", "B", "C"):
        raise UsageError(f"unknown architecture {cfg.arch!r}; expected A, B or C")
    return cfg


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_meta(cfg: RunConfig, command: str, artifacts, extra: dict | None = None) -> Path:
    meta = {
        "command": command,
        "config_hash": cfg.digest(),
        "config": cfg.hashable(),
        "resources": resource_hashes(),
        "artifacts": {Path(a).name: _sha256(Path(a)) for a in artifacts},
    }
    meta.update(extra or {})
    out = Path(cfg.workdir) / f"{command}.meta.json"
    out.write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return out


def _read_meta(cfg: RunConfig, command: str) -> dict:
    path = Path(cfg.workdir) / f"{command}.meta.json"
    if not path.exists():
        return {}
    return json.loads(path.read_text(encoding="utf-8"))


def _require(path: Path, hint: str) -> Path:
    if not Path(path).exists():
        raise UsageError(f"{path} not found; {hint}")
    return Path(path)


def _workdir(cfg: RunConfig) -> Path:
    wd = Path(cfg.workdir)
    wd.mkdir(parents=True, exist_ok=True)
    return wd


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n", encoding="utf-8")


# ---------------------------------------------------------------- commands

def cmd_extract(cfg: RunConfig, args) -> int:
    if not cfg.manifest:
        raise UsageError("extract needs a manifest (positional argument or [run] manifest)")
    _workdir(cfg)
    manifest = load_manifest(cfg.manifest)
    stats = ExtractionStats()
    functions = extract_corpus(manifest, stats)
    out = Path(args.out) if args.out else cfg.path("functions")
    write_functions(functions, out)
    _write_json(cfg.path("extract_stats"), stats.as_dict())
    write_meta(cfg, "extract", [out, cfg.path("extract_stats")])
    print(f"files {stats.files} (skipped {stats.skipped}), parsed {stats.parsed}, failed {stats.failed}")
    print(f"functions {stats.functions}, typed {stats.typed_functions}")
    for project, rel, reason in stats.failures:
        log.warning("parse failure %s/%s: %s", project, rel, reason)
    return EXIT_OK


def _embedding_step(cfg: RunConfig, split) -> dict:
    models = train_embedding_pair(split.train, cfg.embed_config, None if cfg.auto_dim else cfg.dim)
    save_embeddings(models["comment"], cfg.path("emb_comment"))
    save_embeddings(models["identifier"], cfg.path("emb_identifier"))
    return models


def _load_models(cfg: RunConfig) -> dict:
    hint = "run `sigtype build` or `sigtype train-embeddings` first"
    return {
        "comment": load_embeddings(_require(cfg.path("emb_comment"), hint), "comment"),
        "identifier": load_embeddings(_require(cfg.path("emb_identifier"), hint), "identifier"),
    }


def cmd_build(cfg: RunConfig, args) -> int:
    src = _require(Path(args.functions) if args.functions else cfg.path("functions"), "run `sigtype extract` first")
    _workdir(cfg)
    variant = get_variant(cfg.variant)
    points = build_datapoints(read_functions(src), variant)
    if not points:
        raise EmptyDataset(f"variant {variant.id} yields no datapoints from {src}")
    split = split_train_test(points, 0.8, cfg.seed, by_project=cfg.per_project_split)
    vocab = build_type_vocabulary(split.train, cfg.cap)
    write_datapoints(points, cfg.path("datapoints"))
    write_split_manifest(split, cfg.path("split"))
    vocab.save(cfg.path("vocab"))
    models = _load_models(cfg) if args.reuse_embeddings else _embedding_step(cfg, split)
    x_train, y_train = build_tensors(split.train, models, vocab, variant, cfg.budget)
    x_test, y_test = build_tensors(split.test, models, vocab, variant, cfg.budget)
    write_tensors(x_train, cfg.path("train_x"))
    write_labels(y_train, cfg.path("train_y"))
    write_tensors(x_test, cfg.path("test_x"))
    write_labels(y_test, cfg.path("test_y"))
    artifacts = [cfg.path(k) for k in ("datapoints", "split", "vocab", "emb_comment", "emb_identifier",
                                       "train_x", "train_y", "test_x", "test_y")]
    write_meta(cfg, "build", artifacts, {"variant": variant.id, "dim": int(x_train.shape[2])})
    print(f"variant {variant.id}: {len(points)} datapoints ({len(split.train)} train, {len(split.test)} test), "
          f"{len(vocab.types)} types, tensors {x_train.shape[1]}x{x_train.shape[2]}")
    return EXIT_OK


def cmd_train_embeddings(cfg: RunConfig, args) -> int:
    hint = "run `sigtype build` first"
    points = read_datapoints(_require(cfg.path("datapoints"), hint))
    manifest = json.loads(_require(cfg.path("split"), hint).read_text(encoding="utf-8"))
    split = apply_split_manifest(points, manifest)
    models = _embedding_step(cfg, split)
    write_meta(cfg, "train-embeddings", [cfg.path("emb_comment"), cfg.path("emb_identifier")])
    for kind, model in models.items():
        print(f"{kind}: {len(model.words)} words, dim {model.dim}")
    return EXIT_OK


def _build_variant(cfg: RunConfig) -> int:
    return int(_read_meta(cfg, "build").get("variant", cfg.variant))


def cmd_train(cfg: RunConfig, args) -> int:
    hint = "run `sigtype build` first"
    x = read_tensors(_require(cfg.path("train_x"), hint))
    y = read_labels(_require(cfg.path("train_y"), hint))
    vocab = TypeVocabulary.load(_require(cfg.path("vocab"), hint))
    if len(x) != len(y):
        raise ShapeMismatch(f"{len(x)} training tensors but {len(y)} labels")
    variant = _build_variant(cfg)
    config = ModelConfig(cfg.arch, vocab.size, input_dim=x.shape[2], seq_len=x.shape[1])
    tc = cfg.train_config
    model = train(config, tc, x, y, vocab, variant=variant,
                  callback=lambda e, v: log.info("epoch %d loss %.6f", e + 1, v))
    save_checkpoint(model, cfg.path("checkpoint"), {"config_hash": cfg.digest()})
    with open(cfg.path("loss"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# epoch loss\n")
        fh.writelines(f"{i + 1} {v:.9g}\n" for i, v in enumerate(model.loss_curve))
    write_meta(cfg, "train", [cfg.path("checkpoint"), cfg.path("loss")], {"arch": cfg.arch})
    print(f"arch {cfg.arch}: {model.epochs} epochs, final loss {model.loss_curve[-1]:.6f}")
    return EXIT_OK


def _load_model(cfg: RunConfig, args):
    ckpt = _require(Path(args.checkpoint) if args.checkpoint else cfg.path("checkpoint"), "run `sigtype train` first")
    vocab = TypeVocabulary.load(_require(cfg.path("vocab"), "run `sigtype build` first"))
    return load_checkpoint(ckpt, vocab)


def _query_functions(path: Path) -> list[RawFunction]:
    text = path.read_text(encoding="utf-8")
    if path.suffix in (".json", ".jsonl"):
        try:
            objs = [json.loads(line) for line in text.splitlines() if line.strip()] if path.suffix == ".jsonl" \
                else [json.loads(text)]
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: invalid JSON ({exc})") from None
        return [RawFunction.from_json(o) for o in objs]
    source = SourceFile("query", path.name, text)
    return extract_functions(parse_module(source), source)


def cmd_predict(cfg: RunConfig, args) -> int:
    model = _load_model(cfg, args)
    models = _load_models(cfg)
    if not 1 <= args.k <= model.vocab.size:
        raise UsageError(f"-k must be between 1 and {model.vocab.size}")
    functions = _query_functions(_require(Path(args.input), "no such input file"))
    for fn in functions:
        if not fn.return_exprs:
            print(f"{fn.qualname}\tnot eligible: no return expression")
            continue
        points = query_datapoints(fn)
        x = np.stack([vectorize(dp, models, model.variant, cfg.budget) for dp in points])
        probs = predict_proba(model, x)
        ranked = rank_classes(probs)[:, :args.k]
        for dp, row, order in zip(points, probs, ranked):
            slot = dp.provenance.rsplit("#", 1)[1]
            for rank, idx in enumerate(order, 1):
                print(f"{fn.qualname}\t{slot}\t{rank}\t{model.vocab.decode(int(idx))}\t{row[idx]:.6f}")
    return EXIT_OK


def cmd_eval(cfg: RunConfig, args) -> int:
    model = _load_model(cfg, args)
    hint = "run `sigtype build` first"
    x = read_tensors(_require(Path(args.tensors) if args.tensors else cfg.path("test_x"), hint))
    y = read_labels(_require(Path(args.labels) if args.labels else cfg.path("test_y"), hint))
    if len(x) != len(y):
        raise ShapeMismatch(f"{len(x)} test tensors but {len(y)} labels")
    report = evaluate(model, x, y, ks=tuple(range(1, args.k + 1)))
    cfg.path("report").write_text(csv_text([report]), encoding="utf-8", newline="\n")
    ckpt_hash = read_header(Path(args.checkpoint) if args.checkpoint else cfg.path("checkpoint")).get("config_hash")
    write_meta(cfg, "eval", [cfg.path("report")], {"checkpoint_config_hash": ckpt_hash})
    print(format_table([report]))
    return EXIT_OK


def cmd_stats(cfg: RunConfig, args) -> int:
    stats_path = cfg.path("extract_stats")
    if stats_path.exists():
        stats = json.loads(stats_path.read_text(encoding="utf-8"))
        print(f"files {stats['files']}, parsed {stats['parsed']}, failed {stats['failed']}, "
              f"functions {stats['functions']}, typed {stats['typed_functions']}")
    path = Path(args.datapoints) if args.datapoints else cfg.path("datapoints")
    points = read_datapoints(_require(path, "run `sigtype build` first"))
    print(format_feature_stats(feature_length_stats(points, cfg.budget)))
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sigtype", description="Type prediction for Python from names and comments.")
    p.add_argument("--config", help="key = value file with [run], [embedding], [train], [budget] sections")
    p.add_argument("--seed", type=int)
    p.add_argument("--deterministic", action="store_true",
                   help="record that outputs are expected to be byte-identical across reruns")
    p.add_argument("--workdir")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def variant_opts(sp):
        sp.add_argument("--variant", type=int, choices=range(1, 6))
        sp.add_argument("--dim", type=int)
        sp.add_argument("--auto-dim", action="store_true", help="embedding size from the vocabulary size")
        sp.add_argument("--embed-epochs", type=int)

    sp = sub.add_parser("extract", help="extract functions from a project manifest")
    sp.add_argument("manifest", nargs="?")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_extract)

    sp = sub.add_parser("build", help="datapoints, split, vocabulary, embeddings and tensors")
    sp.add_argument("--functions")
    variant_opts(sp)
    sp.add_argument("--cap", type=int, help="number of frequent types kept")
    sp.add_argument("--per-project-split", action="store_true")
    sp.add_argument("--reuse-embeddings", action="store_true")
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("train-embeddings", help="retrain both embeddings on the training split")
    variant_opts(sp)
    sp.set_defaults(func=cmd_train_embeddings)

    sp = sub.add_parser("train", help="train a classifier on the training tensors")
    sp.add_argument("--arch", choices=("A", "B", "C"))
    sp.add_argument("--epochs", type=int)
    sp.add_argument("--batch-size", type=int)
    sp.add_argument("--learning-rate", type=float)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("predict", help="rank types for each slot of the functions in a file")
    sp.add_argument("input", help="Python source, or function JSON / JSONL as written by extract")
    sp.add_argument("--checkpoint")
    sp.add_argument("-k", type=int, default=3)
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("eval", help="top-k precision, recall and F1 on test tensors")
    sp.add_argument("--checkpoint")
    sp.add_argument("--tensors")
    sp.add_argument("--labels")
    sp.add_argument("-k", type=int, default=3, choices=range(1, 11))
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("stats", help="feature length table for built datapoints")
    sp.add_argument("--datapoints")
    sp.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return args.func(cfg, args)
    except UsageError as exc:
        print(f"sigtype: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"sigtype: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, ShapeMismatch) as exc:
        print(f"sigtype: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SigtypeError as exc:
        print(f"sigtype: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
