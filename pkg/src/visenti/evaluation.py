"""Metrics, corpus statistics, dataset I/O, and the variant-comparison harness.

Datasets are UTF-8 TSV files of ``label<TAB>text`` rows against a declared
label set; the label's position in that set is its class index. The harness
trains each requested model variant with identical data and seed, evaluates
macro precision/recall/F1 on the held-out file, and persists checkpoints,
histories, and an aligned-text plus CSV comparison table.
"""

import os
from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingTable, encode_static, load_embeddings
from .errors import ConfigError, DataError, ParseError
from .ioutil import atomic_write, fmt
from .lexicon import load_lexicon
from .neural import ModelConfig, build_model, save_checkpoint
from .sentivec import DEFAULT_NEGATORS, SentiVecConfig, extract_senti_vectors, tokenize
from .training import TrainConfig, train, write_history

VARIANTS = ("static+lstm", "rcnn-only", "rcnn+sentivec")
DEFAULT_LABELS = ("NEG", "POS")


# ---------------------------------------------------------------------------
# Metrics


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class EvalReport:
    precision: tuple  # per class
    recall: tuple
    f1: tuple
    macro_precision: float
    macro_recall: float
    macro_f1: float
    confusion: np.ndarray  # [gold, predicted]
    sample_count: int

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.confusion)) / self.sample_count


def compute_metrics(predictions, gold, class_count: int) -> EvalReport:
    """Per-class and macro precision/recall/F1 plus the confusion matrix.

    Zero denominators yield metric 0 rather than an error.
    """
    predictions = list(predictions)
    gold = list(gold)
    if len(predictions) != len(gold):
        raise DataError(f"{len(predictions)} predictions for {len(gold)} gold labels")
    if not gold:
        raise DataError("no samples to score")
    if class_count < 1:
        raise ConfigError(f"class_count must be >= 1, got {class_count}")
    confusion = np.zeros((class_count, class_count), dtype=np.int64)
    for pred, true in zip(predictions, gold):
        if not 0 <= int(true) < class_count or not 0 <= int(pred) < class_count:
            raise DataError(f"label pair ({pred}, {true}) outside [0, {class_count})")
        confusion[int(true), int(pred)] += 1
    precision, recall, f1 = [], [], []
    for c in range(class_count):
        tp = float(confusion[c, c])
        fp = float(confusion[:, c].sum()) - tp
        fn = float(confusion[c, :].sum()) - tp
        p = tp / (tp + fp) if tp + fp > 0 else 0.0
        r = tp / (tp + fn) if tp + fn > 0 else 0.0
        precision.append(p)
        recall.append(r)
        f1.append(f1_score(p, r))
    return EvalReport(
        precision=tuple(precision),
        recall=tuple(recall),
        f1=tuple(f1),
        macro_precision=float(np.mean(precision)),
        macro_recall=float(np.mean(recall)),
        macro_f1=float(np.mean(f1)),
        confusion=confusion,
        sample_count=len(gold),
    )


def format_metrics(report: EvalReport, labels=None) -> str:
    """Two-decimal table; the report object keeps full precision."""
    names = list(labels) if labels else [f"class{c}" for c in range(len(report.precision))]
    width = max(len(n) for n in names + ["macro"])
    lines = [f"{'':<{width}}  precision  recall  f1"]
    for c, name in enumerate(names):
        lines.append(
            f"{name:<{width}}  {report.precision[c]:>9.2f}  {report.recall[c]:>6.2f}  {report.f1[c]:>4.2f}"
        )
    lines.append(
        f"{'macro':<{width}}  {report.macro_precision:>9.2f}  {report.macro_recall:>6.2f}  {report.macro_f1:>4.2f}"
    )
    lines.append(f"samples: {report.sample_count}  accuracy: {report.accuracy:.2f}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Corpus statistics


@dataclass(frozen=True)
class StatsReport:
    mean: float
    std: float
    minimum: float
    p25: float
    p50: float
    p75: float
    maximum: float


def corpus_stats(token_counts) -> StatsReport:
    """Mean, sample std (n-1 divisor, 0 for singletons), linear-interpolation
    quartiles, and extremes of per-review token counts."""
    counts = np.asarray(list(token_counts), dtype=np.float64)
    if counts.size == 0:
        raise DataError("no token counts to summarize")
    std = 0.0 if counts.size == 1 else float(np.std(counts, ddof=1))
    p25, p50, p75 = (float(np.percentile(counts, q, method="linear")) for q in (25, 50, 75))
    return StatsReport(
        mean=float(np.mean(counts)),
        std=std,
        minimum=float(counts.min()),
        p25=p25,
        p50=p50,
        p75=p75,
        maximum=float(counts.max()),
    )


def format_stats(report: StatsReport) -> str:
    lines = [
        f"mean {report.mean:.2f}",
        f"std {report.std:.2f}",
        f"min {report.minimum:g}",
        f"p25 {report.p25:g}",
        f"p50 {report.p50:g}",
        f"p75 {report.p75:g}",
        f"max {report.maximum:g}",
    ]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Datasets


def load_dataset(path, labels=DEFAULT_LABELS):
    """Rows of (class index, text) from a label<TAB>text file."""
    labels = tuple(labels)
    index = {name: k for k, name in enumerate(labels)}
    rows = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            stripped = line.rstrip("\n")
            if not stripped:
                continue
            if "\t" not in stripped:
                raise ParseError(path, lineno, "expected 'label<TAB>text'")
            label, text = stripped.split("\t", 1)
            if label not in index:
                raise ParseError(path, lineno, f"label {label!r} not in declared set {labels}")
            rows.append((index[label], text))
    return rows


def save_dataset(rows, labels, path) -> None:
    labels = tuple(labels)
    with atomic_write(path) as handle:
        for label_index, text in rows:
            handle.write(f"{labels[label_index]}\t{text}\n")


def prepare_samples(
    rows,
    table: EmbeddingTable,
    seq_len: int,
    lexicon=None,
    negators=DEFAULT_NEGATORS,
    sv_config: SentiVecConfig = SentiVecConfig(),
):
    """Turn (label, text) rows into (encoder output, sentivec, label) triples.

    Without a lexicon the sentiment-vector slot is None.
    """
    samples = []
    for label, text in rows:
        tokens = tokenize(text)
        enc = encode_static(tokens, table, seq_len)
        sv = (
            extract_senti_vectors(tokens, lexicon, negators, sv_config)
            if lexicon is not None
            else None
        )
        samples.append((enc, sv, label))
    return samples


# ---------------------------------------------------------------------------
# Experiment harness


@dataclass(frozen=True)
class ExperimentConfig:
    train_path: str
    test_path: str
    seed: int
    out_dir: str
    variants: tuple = VARIANTS
    labels: tuple = DEFAULT_LABELS
    lexicon_path: str = None
    embeddings_path: str = None
    negators: tuple = DEFAULT_NEGATORS
    seq_len: int = 32
    senti_len: int = 32
    enc_dim: int = 16
    negation_window: int = 2
    hidden_dim: int = 16
    filters: int = 16
    d_lm: int = 16
    d_sw: int = 16
    fusion_hidden: tuple = (16,)
    head_hidden: tuple = ()
    epochs: int = 20
    batch_size: int = 24
    learning_rate: float = 1e-3
    accumulation_steps: int = 16
    optimizer: str = "adam"

    def __post_init__(self):
        object.__setattr__(self, "variants", tuple(self.variants))
        object.__setattr__(self, "labels", tuple(self.labels))
        if not self.variants:
            raise ConfigError("no variants requested")
        unknown = [v for v in self.variants if v not in VARIANTS]
        if unknown:
            raise ConfigError(f"unknown variants {unknown}; choose from {VARIANTS}")


@dataclass(frozen=True)
class VariantResult:
    variant: str
    report: EvalReport
    history: list
    checkpoint_path: str
    history_path: str


@dataclass(frozen=True)
class ComparisonTable:
    results: list
    text: str
    csv: str


def _variant_slug(variant: str) -> str:
    return variant.replace("+", "_")


def _comparison_strings(results):
    with_deltas = len(results) > 1
    base = results[0].report
    header = ["variant", "precision", "recall", "f1"]
    if with_deltas:
        header += ["d_precision", "d_recall", "d_f1"]
    table_rows = []
    csv_rows = [",".join(header)]
    for k, res in enumerate(results):
        rep = res.report
        cells = [res.variant, f"{rep.macro_precision:.2f}", f"{rep.macro_recall:.2f}", f"{rep.macro_f1:.2f}"]
        if with_deltas:
            if k == 0:
                cells += ["-", "-", "-"]
            else:
                cells += [
                    f"{rep.macro_precision - base.macro_precision:+.2f}",
                    f"{rep.macro_recall - base.macro_recall:+.2f}",
                    f"{rep.macro_f1 - base.macro_f1:+.2f}",
                ]
        table_rows.append(cells)
        csv_rows.append(",".join(cells))
    widths = [max(len(row[c]) for row in [header] + table_rows) for c in range(len(header))]
    lines = ["  ".join(name.ljust(widths[c]) for c, name in enumerate(header))]
    for row in table_rows:
        lines.append("  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)))
    return "\n".join(lines) + "\n", "\n".join(csv_rows) + "\n"


def run_experiment(config: ExperimentConfig) -> ComparisonTable:
    """Train every variant on identical data/seed and compare test metrics."""
    needs_sentivec = "rcnn+sentivec" in config.variants
    missing = []
    for label, path, required in (
        ("train dataset", config.train_path, True),
        ("test dataset", config.test_path, True),
        ("lexicon", config.lexicon_path, needs_sentivec),
        ("embeddings", config.embeddings_path, config.embeddings_path is not None),
    ):
        if required and (path is None or not os.path.exists(path)):
            missing.append(f"{label}: {path}")
    if missing:
        raise ConfigError("missing inputs: " + "; ".join(missing))
    table = (
        load_embeddings(config.embeddings_path)
        if config.embeddings_path
        else EmbeddingTable(dim=config.enc_dim, vectors={})
    )
    if table.dim != config.enc_dim:
        raise ConfigError(f"embeddings dim {table.dim} != configured enc_dim {config.enc_dim}")
    lexicon = load_lexicon(config.lexicon_path) if needs_sentivec else None
    sv_config = SentiVecConfig(length=config.senti_len, negation_window=config.negation_window)

    def prepare(rows, with_sv):
        return prepare_samples(
            rows,
            table,
            config.seq_len,
            lexicon=lexicon if with_sv else None,
            negators=config.negators,
            sv_config=sv_config,
        )

    train_rows = load_dataset(config.train_path, config.labels)
    test_rows = load_dataset(config.test_path, config.labels)
    os.makedirs(config.out_dir, exist_ok=True)
    results = []
    for variant in config.variants:
        with_sv = variant == "rcnn+sentivec"
        kind = "lstm" if variant == "static+lstm" else "comb"
        model_config = ModelConfig(
            enc_dim=config.enc_dim,
            senti_len=config.senti_len,
            hidden_dim=config.hidden_dim,
            filters=config.filters,
            d_lm=config.d_lm,
            d_sw=config.d_sw,
            fusion_hidden=config.fusion_hidden,
            head_hidden=config.head_hidden,
            class_count=len(config.labels),
            use_sentivec=with_sv,
        )
        model = build_model(model_config, kind=kind)
        train_config = TrainConfig(
            rng_seed=config.seed,
            batch_size=config.batch_size,
            epochs=config.epochs,
            learning_rate=config.learning_rate,
            accumulation_steps=config.accumulation_steps,
            optimizer=config.optimizer,
        )
        model, history = train(model, prepare(train_rows, with_sv), train_config)
        test_samples = prepare(test_rows, with_sv)
        predictions = [int(np.argmax(model.forward(enc, sv))) for enc, sv, _ in test_samples]
        report = compute_metrics(predictions, [label for _, _, label in test_samples], len(config.labels))
        slug = _variant_slug(variant)
        checkpoint_path = os.path.join(config.out_dir, f"{slug}.ckpt")
        history_path = os.path.join(config.out_dir, f"{slug}.history.csv")
        save_checkpoint(model, checkpoint_path)
        write_history(history, history_path)
        results.append(
            VariantResult(
                variant=variant,
                report=report,
                history=history,
                checkpoint_path=checkpoint_path,
                history_path=history_path,
            )
        )
    text, csv = _comparison_strings(results)
    with atomic_write(os.path.join(config.out_dir, "comparison.txt")) as handle:
        handle.write(text)
    with atomic_write(os.path.join(config.out_dir, "comparison.csv")) as handle:
        handle.write(csv)
    return ComparisonTable(results=results, text=text, csv=csv)
