"""Top-K precision / recall / F1, experiment orchestration and feature-length statistics."""
from __future__ import annotations

import csv
import dataclasses
import io
import statistics
from dataclasses import dataclass, field

import numpy as np

from sigtype.errors import EmptyTestSet
from sigtype.neural import ModelConfig, TrainConfig, predict_proba, rank_classes, train
from sigtype.pipeline import prepare
from sigtype.vectorize import DEFAULT_BUDGET

KS = (1, 2, 3)
CSV_COLUMNS = ("arch", "variant", "k", "precision", "recall", "f1", "p", "p_valid", "p_valid_correct", "seed")


@dataclass
class EvalCounts:
    p: int
    p_valid: int
    p_valid_correct: dict[int, int]


@dataclass
class EvalReport:
    counts: EvalCounts
    precision: dict[int, float]
    recall: dict[int, float]
    f1: dict[int, float]
    zero_valid: bool = False
    arch: str = ""
    variant: int = 0
    seed: int | None = None
    repetitions: int = 1
    runs: list["EvalReport"] = field(default_factory=list, repr=False)

    @property
    def ks(self):
        return sorted(self.precision)

    def rows(self) -> list[dict]:
        return [
            {
                "arch": self.arch,
                "variant": self.variant,
                "k": k,
                "precision": self.precision[k],
                "recall": self.recall[k],
                "f1": self.f1[k],
                "p": self.counts.p,
                "p_valid": self.counts.p_valid,
                "p_valid_correct": self.counts.p_valid_correct[k],
                "seed": "" if self.seed is None else self.seed,
            }
            for k in self.ks
        ]


def count_predictions(ranked, labels, other_index: int, ks=KS) -> EvalCounts:
    """Tally predictions from per-row class rankings (most likely first).

    A prediction is valid when its top-1 class is not ``other``; a valid
    prediction is correct at ``k`` when the true label is among the first
    ``k`` classes. A true label of ``other`` is never counted correct.
    """
    ranked = np.asarray(ranked)
    labels = np.asarray(labels)
    valid = ranked[:, 0] != other_index
    counts = {}
    for k in ks:
        hit = (ranked[:, :k] == labels[:, None]).any(axis=1) & (labels != other_index)
        counts[k] = int(np.sum(valid & hit))
    return EvalCounts(len(labels), int(valid.sum()), counts)


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def report_from_counts(counts: EvalCounts, **meta) -> EvalReport:
    precision, recall, f1 = {}, {}, {}
    zero_valid = counts.p_valid == 0
    for k, correct in counts.p_valid_correct.items():
        precision[k] = 0.0 if zero_valid else correct / counts.p_valid
        recall[k] = correct / counts.p if counts.p else 0.0
        f1[k] = f1_score(precision[k], recall[k])
    return EvalReport(counts, precision, recall, f1, zero_valid=zero_valid, **meta)


def evaluate(model, x_test, y_test, ks=KS) -> EvalReport:
    if len(x_test) == 0:
        raise EmptyTestSet("the test set is empty")
    probs = predict_proba(model, x_test)
    ranked = rank_classes(probs)[:, :max(ks)]
    counts = count_predictions(ranked, y_test, model.vocab.index_of_other, ks)
    return report_from_counts(counts, arch=model.config.arch, variant=model.variant, seed=model.seed)


def aggregate(reports: list[EvalReport]) -> EvalReport:
    """Mean of per-run metrics; counts are summed across runs."""
    if not reports:
        raise ValueError("nothing to aggregate")
    ks = reports[0].ks
    mean = lambda attr, k: float(np.mean([getattr(r, attr)[k] for r in reports]))  # noqa: E731
    counts = EvalCounts(
        sum(r.counts.p for r in reports),
        sum(r.counts.p_valid for r in reports),
        {k: sum(r.counts.p_valid_correct[k] for r in reports) for k in ks},
    )
    return EvalReport(
        counts,
        {k: mean("precision", k) for k in ks},
        {k: mean("recall", k) for k in ks},
        {k: mean("f1", k) for k in ks},
        zero_valid=any(r.zero_valid for r in reports),
        arch=reports[0].arch,
        variant=reports[0].variant,
        seed=None if len(reports) > 1 else reports[0].seed,
        repetitions=len(reports),
        runs=list(reports),
    )


def run_experiment(arch: str, variant: int, functions, repetitions: int = 3, seeds=None,
                   train_config: TrainConfig | None = None, prepare_kwargs: dict | None = None,
                   prepared=None) -> EvalReport:
    """Train and evaluate ``arch`` on ``variant`` once per seed; report the mean.

    Each repetition re-splits the data, refits embeddings and vocabulary, and
    trains from a fresh initialization, all under its own seed. ``prepared``
    may map a seed to already-built :class:`~sigtype.pipeline.PreparedData`.
    """
    seeds = list(seeds) if seeds is not None else list(range(repetitions))
    if len(seeds) != repetitions:
        raise ValueError("need one seed per repetition")
    train_config = train_config or TrainConfig()
    reports = []
    for seed in seeds:
        data = (prepared or {}).get(seed)
        if data is None:
            data = prepare(functions, variant, seed, **(prepare_kwargs or {}))
        config = ModelConfig(arch, data.vocab.size, input_dim=data.dim, seq_len=data.seq_len)
        tc = dataclasses.replace(train_config, seed=seed)
        model = train(config, tc, data.x_train, data.y_train, data.vocab, variant=data.variant)
        reports.append(evaluate(model, data.x_test, data.y_test))
    return aggregate(reports)


def run_grid(functions, archs=("A", "B", "C"), variants=(1, 2, 3, 4, 5), repetitions: int = 3,
             seeds=None, train_config: TrainConfig | None = None,
             prepare_kwargs: dict | None = None) -> list[EvalReport]:
    """One aggregated report per (arch, variant) pair, arch-major as in a results table.

    Datasets are prepared once per (variant, seed) and shared across architectures.
    """
    seeds = list(seeds) if seeds is not None else list(range(repetitions))
    cache = {v: {s: prepare(functions, v, s, **(prepare_kwargs or {})) for s in seeds} for v in variants}
    return [
        run_experiment(arch, v, functions, repetitions, seeds, train_config, prepared=cache[v])
        for arch in archs
        for v in variants
    ]


def write_csv(reports, fh) -> None:
    writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for report in reports:
        for row in report.rows():
            writer.writerow({**row, **{m: f"{row[m]:.6f}" for m in ("precision", "recall", "f1")}})


def csv_text(reports) -> str:
    buf = io.StringIO()
    write_csv(reports, buf)
    return buf.getvalue()


def format_table(reports) -> str:
    ks = reports[0].ks if reports else list(KS)
    head = f"{'arch':<5}{'var':>4}" + "".join(f"  top-{k} P    R    F1 " for k in ks)
    lines = [head]
    for r in reports:
        cells = "".join(
            f"  {100 * r.precision[k]:5.1f}{100 * r.recall[k]:5.1f}{100 * r.f1[k]:5.1f} " for k in ks
        )
        lines.append(f"{r.arch:<5}{r.variant:>4}{cells}" + ("  (no valid predictions)" if r.zero_valid else ""))
    return "\n".join(lines)


FEATURES = (
    ("Function Name", "return", "fname", "name"),
    ("Function Comment", "return", "fcomment", "comment"),
    ("Return Comment", "return", "rcomment", "return_comment"),
    ("Return Expressions", "return", "retexprs", "return_exprs"),
    ("Parameter names", "return", "paramnames", "param_names"),
    ("Parameter Name", "parameter", "name", "param_name"),
    ("Parameter Comment", "parameter", "comment", "param_comment"),
)


@dataclass
class FeatureStats:
    feature: str
    mean: float
    median: float
    max: int
    budget: int
    covered: float


def length_stats(feature: str, lengths, budget: int) -> FeatureStats:
    lengths = list(lengths)
    return FeatureStats(
        feature,
        float(statistics.fmean(lengths)),
        float(statistics.median(lengths)),
        max(lengths),
        budget,
        sum(1 for n in lengths if n <= budget) / len(lengths),
    )


def feature_length_stats(datapoints, budget=None) -> list[FeatureStats]:
    """Token-length summary per feature and the share of datapoints fitting the budget."""
    budget = budget or DEFAULT_BUDGET
    datapoints = list(datapoints)
    table = []
    for label, kind, field_name, budget_attr in FEATURES:
        lengths = [len(dp.tokens.get(field_name, ())) for dp in datapoints if dp.kind == kind]
        if lengths:
            table.append(length_stats(label, lengths, getattr(budget, budget_attr)))
    return table


def format_feature_stats(table) -> str:
    lines = [f"{'Feature':<20}{'Average':>9}{'Median':>8}{'Max':>6}{'Chosen':>8}{'Covered':>9}"]
    for row in table:
        lines.append(
            f"{row.feature:<20}{row.mean:>9.2f}{row.median:>8g}{row.max:>6}{row.budget:>8}{100 * row.covered:>8.2f}%"
        )
    return "\n".join(lines)
