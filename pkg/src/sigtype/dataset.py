"""Function selection, datapoint construction, dataset variants and train/test splitting."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from sigtype.errors import EmptyDataset
from sigtype.extract import RawFunction
from sigtype.nlp import preprocess_comment, preprocess_identifier, preprocess_identifiers

PARAMETER_FIELDS = ("name", "comment")
RETURN_FIELDS = ("fname", "fcomment", "rcomment", "retexprs", "paramnames")
EXCLUDED_LABELS = frozenset({"Any"})
EXCLUDED_RETURN_LABELS = frozenset({"Any", "None"})


@dataclass(frozen=True)
class DatasetVariant:
    id: int
    requires_param_comment: bool = False
    requires_fn_comment: bool = False
    requires_return_comment: bool = False
    requires_docstring: bool = False
    zero_return_exprs: bool = False
    drop_return_expr_rows: bool = False


VARIANTS = {
    1: DatasetVariant(1, requires_param_comment=True, requires_fn_comment=True,
                      requires_return_comment=True, requires_docstring=True),
    2: DatasetVariant(2, requires_docstring=True),
    3: DatasetVariant(3),
    4: DatasetVariant(4, requires_param_comment=True, requires_fn_comment=True,
                      requires_return_comment=True, requires_docstring=True,
                      zero_return_exprs=True),
    5: DatasetVariant(5, requires_param_comment=True, requires_fn_comment=True,
                      requires_return_comment=True, requires_docstring=True,
                      zero_return_exprs=True, drop_return_expr_rows=True),
}


def get_variant(variant) -> DatasetVariant:
    if isinstance(variant, DatasetVariant):
        return variant
    try:
        return VARIANTS[int(variant)]
    except (KeyError, ValueError, TypeError):
        raise ValueError(f"unknown dataset variant {variant!r}; expected 1-5") from None


@dataclass
class Datapoint:
    kind: Literal["parameter", "return"]
    tokens: dict[str, tuple[str, ...]]
    label: str
    provenance: str
    project: str = ""

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "tokens": {name: list(toks) for name, toks in self.tokens.items()},
            "label": self.label,
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, obj: dict) -> Datapoint:
        return cls(
            kind=obj["kind"],
            tokens={name: tuple(toks) for name, toks in obj["tokens"].items()},
            label=obj["label"],
            provenance=obj["provenance"],
            project=obj["provenance"].split("/", 1)[0],
        )


@dataclass
class SplitDataset:
    train: list[Datapoint]
    test: list[Datapoint]
    seed: int
    ratio: float = 0.8
    by_project: bool = False

    def manifest(self) -> dict:
        return {
            "seed": self.seed,
            "ratio": self.ratio,
            "by_project": self.by_project,
            "train": [dp.provenance for dp in self.train],
            "test": [dp.provenance for dp in self.test],
        }


def _present(text) -> bool:
    return text is not None and bool(text.strip())


def select_functions(functions: list[RawFunction]) -> list[RawFunction]:
    """Keep typed functions with at least one return expression; drop ``self``."""
    selected = []
    for fn in functions:
        keep = [i for i, name in enumerate(fn.params) if name != "self"]
        if len(keep) != len(fn.params):
            fn = dataclasses.replace(
                fn,
                params=[fn.params[i] for i in keep],
                param_types=[fn.param_types[i] for i in keep],
                param_comments=[fn.param_comments[i] for i in keep],
            )
        if not fn.return_exprs:
            continue
        if fn.return_type is None and all(t is None for t in fn.param_types):
            continue
        selected.append(fn)
    return selected


def _parameter_point(fn: RawFunction, name: str, label: str, comment) -> Datapoint:
    return Datapoint(
        kind="parameter",
        tokens={
            "name": preprocess_identifier(name).tokens,
            "comment": preprocess_comment(comment).tokens,
        },
        label=label,
        provenance=f"{fn.identity}#param:{name}",
        project=fn.project,
    )


def _function_comment(fn: RawFunction):
    return fn.fn_comment if _present(fn.fn_comment) else fn.docstring


def _return_point(fn: RawFunction, label: str) -> Datapoint:
    return Datapoint(
        kind="return",
        tokens={
            "fname": preprocess_identifier(fn.name).tokens,
            "fcomment": preprocess_comment(_function_comment(fn)).tokens,
            "rcomment": preprocess_comment(fn.return_comment).tokens,
            "retexprs": preprocess_identifiers(tok for expr in fn.return_exprs for tok in expr).tokens,
            "paramnames": preprocess_identifiers(fn.params).tokens,
        },
        label=label,
        provenance=f"{fn.identity}#return",
        project=fn.project,
    )


def to_datapoints(fn: RawFunction, variant) -> list[Datapoint]:
    """Explode a selected function into parameter datapoints and a return datapoint."""
    variant = get_variant(variant)
    points = []
    for name, label, comment in zip(fn.params, fn.param_types, fn.param_comments):
        if label is None or label in EXCLUDED_LABELS:
            continue
        if variant.requires_param_comment and not _present(comment):
            continue
        points.append(_parameter_point(fn, name, label, comment))

    label = fn.return_type
    if label is None or label in EXCLUDED_RETURN_LABELS or not fn.return_exprs:
        return points
    if variant.requires_fn_comment and not _present(fn.fn_comment):
        return points
    if variant.requires_docstring and not _present(_function_comment(fn)):
        return points
    if variant.requires_return_comment and not _present(fn.return_comment):
        return points
    points.append(_return_point(fn, label))
    return points


def query_datapoints(fn: RawFunction) -> list[Datapoint]:
    """One datapoint per slot of ``fn`` whatever its annotations, for prediction.

    Labels hold the existing annotation or ``""``. ``self`` is skipped, and the
    return slot exists only when ``fn`` has a return expression.
    """
    points = [
        _parameter_point(fn, name, label or "", comment)
        for name, label, comment in zip(fn.params, fn.param_types, fn.param_comments)
        if name != "self"
    ]
    if fn.return_exprs:
        points.append(_return_point(fn, fn.return_type or ""))
    return points


def build_datapoints(functions: list[RawFunction], variant) -> list[Datapoint]:
    """Select functions, then explode every survivor under ``variant``."""
    variant = get_variant(variant)
    return [dp for fn in select_functions(functions) for dp in to_datapoints(fn, variant)]


def split_train_test(points: list[Datapoint], ratio: float = 0.8, seed: int = 0,
                     by_project: bool = False) -> SplitDataset:
    """Seeded shuffle then prefix split; ``floor(ratio * n)`` points go to train.

    With ``by_project`` whole projects are assigned to one side, shuffled by
    the same seed, filling train until it holds at least the target size.
    """
    if not points:
        raise EmptyDataset("cannot split an empty datapoint list")
    n = len(points)
    n_train = int(Fraction(str(ratio)) * n)
    rng = np.random.default_rng(seed)
    if not by_project:
        order = rng.permutation(n)
        train = [points[i] for i in order[:n_train]]
        test = [points[i] for i in order[n_train:]]
        return SplitDataset(train, test, seed, ratio)

    projects = sorted({dp.project for dp in points})
    members = {p: [dp for dp in points if dp.project == p] for p in projects}
    train, test = [], []
    for idx in rng.permutation(len(projects)):
        group = members[projects[idx]]
        (train if len(train) < n_train else test).extend(group)
    return SplitDataset(train, test, seed, ratio, by_project=True)


def write_datapoints(points, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for dp in points:
            fh.write(json.dumps(dp.to_json(), ensure_ascii=False))
            fh.write("\n")


def read_datapoints(path) -> list[Datapoint]:
    with open(path, encoding="utf-8") as fh:
        return [Datapoint.from_json(json.loads(line)) for line in fh if line.strip()]


def write_split_manifest(split: SplitDataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(split.manifest(), fh, indent=1)
        fh.write("\n")


def apply_split_manifest(points: list[Datapoint], manifest: dict) -> SplitDataset:
    """Rebuild a :class:`SplitDataset` from ``points`` and a saved manifest."""
    by_id = {dp.provenance: dp for dp in points}
    return SplitDataset(
        train=[by_id[p] for p in manifest["train"]],
        test=[by_id[p] for p in manifest["test"]],
        seed=manifest["seed"],
        ratio=manifest.get("ratio", 0.8),
        by_project=manifest.get("by_project", False),
    )
