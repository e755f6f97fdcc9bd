"""Command-line entry point wiring the pipeline modules together.

Exit codes: 0 success, 1 usage error, 2 data/parse/config error, and 3 when
grad-check exceeds its tolerance (so shell scripts can gate on gradient
health). Every subcommand that writes artifacts also records its effective
configuration as a key=value file (run.cfg inside an output directory, or a
<out>.cfg sidecar next to a single output file); replaying with
``--config <that file>`` reproduces the run byte for byte. Flags beat
config-file values, which beat defaults.
"""

import argparse
import os
import sys

import numpy as np

from .embeddings import EmbeddingTable, EncoderOutput, encode_static, load_embeddings, save_encoder_outputs
from .errors import ConfigError, ParseError, VisentiError
from .evaluation import (
    DEFAULT_LABELS,
    VARIANTS,
    compute_metrics,
    corpus_stats,
    format_metrics,
    format_stats,
    load_dataset,
    prepare_samples,
    save_dataset,
)
from .expansion import ExpansionConfig, expand_lexicon, load_candidates, load_thesaurus
from .ioutil import atomic_write, fmt
from .lexicon import load_lexicon, save_lexicon
from .neural import ModelConfig, build_model, grad_check, load_checkpoint, save_checkpoint
from .sentivec import (
    DEFAULT_NEGATORS,
    SentiVecConfig,
    SentiVectors,
    extract_senti_vectors,
    load_negators,
    tokenize,
)
from .synthetic import SyntheticConfig, generate
from .training import TrainConfig, train, write_history


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Option plumbing: flags > config file > defaults, echoed for replay


def _parse_bool(text):
    if isinstance(text, bool):
        return text
    lowered = str(text).strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_int_tuple(text):
    if isinstance(text, tuple):
        return tuple(int(v) for v in text)
    stripped = str(text).strip()
    if stripped in ("-", ""):
        return ()
    return tuple(int(v) for v in stripped.split(","))


def _parse_str_tuple(text):
    if isinstance(text, tuple):
        return text
    return tuple(part.strip() for part in str(text).split(",") if part.strip())


def _encode_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value) if value else "-"
    if isinstance(value, float):
        return fmt(value)
    return str(value)


# (key, cast, default) per subcommand; every flag is --key-with-dashes
OPTIONS = {
    "expand-lexicon": [
        ("lexicon", str, None),
        ("thesaurus", str, None),
        ("embeddings", str, None),
        ("candidates", str, None),
        ("out", str, None),
        ("T", float, 0.5),
        ("depth", int, 1),
        ("metric", str, "cosine"),
        ("orientation", str, "proximal"),
        ("min_seed_hits", int, 1),
    ],
    "extract-sentivec": [
        ("lexicon", str, None),
        ("dataset", str, None),
        ("labels", _parse_str_tuple, DEFAULT_LABELS),
        ("out", str, None),
        ("length", int, 128),
        ("window", int, 2),
        ("negators", str, None),
    ],
    "encode": [
        ("dataset", str, None),
        ("labels", _parse_str_tuple, DEFAULT_LABELS),
        ("embeddings", str, None),
        ("dim", int, 16),
        ("sl", int, 32),
        ("out_dir", str, None),
    ],
    "train": [
        ("train", str, None),
        ("labels", _parse_str_tuple, DEFAULT_LABELS),
        ("lexicon", str, None),
        ("embeddings", str, None),
        ("negators", str, None),
        ("seed", int, None),
        ("out_dir", str, None),
        ("variant", str, "rcnn+sentivec"),
        ("sl", int, 32),
        ("senti_len", int, 128),
        ("window", int, 2),
        ("dim", int, 16),
        ("hidden_dim", int, 32),
        ("filters", int, 64),
        ("d_lm", int, 64),
        ("d_sw", int, 64),
        ("fusion_hidden", _parse_int_tuple, (64,)),
        ("head_hidden", _parse_int_tuple, ()),
        ("batch_size", int, 24),
        ("epochs", int, 20),
        ("learning_rate", float, 1e-3),
        ("accumulation_steps", int, 16),
        ("optimizer", str, "adam"),
    ],
    "evaluate": [
        ("test", str, None),
        ("labels", _parse_str_tuple, DEFAULT_LABELS),
        ("checkpoint", str, None),
        ("lexicon", str, None),
        ("embeddings", str, None),
        ("negators", str, None),
        ("sl", int, 32),
        ("window", int, 2),
        ("out", str, None),
    ],
    "stats": [
        ("dataset", str, None),
        ("labels", _parse_str_tuple, DEFAULT_LABELS),
    ],
    "gen-synthetic": [
        ("seed", int, None),
        ("out_dir", str, None),
        ("train_size", int, 400),
        ("test_size", int, 100),
        ("positive_words", int, 6),
        ("negative_words", int, 6),
        ("filler_words", int, 30),
        ("min_len", int, 4),
        ("max_len", int, 12),
        ("max_sentiment", int, 3),
        ("negation_prob", float, 0.3),
        ("joined_negator_prob", float, 0.2),
        ("margin", float, 0.3),
        ("labels", _parse_str_tuple, DEFAULT_LABELS),
    ],
    "grad-check": [
        ("seed", int, 50),
        ("kind", str, "comb"),
        ("init_scale", float, 0.7),
        ("sl", int, 4),
        ("enc_dim", int, 3),
        ("senti_len", int, 4),
        ("hidden_dim", int, 4),
        ("filters", int, 4),
        ("d_lm", int, 4),
        ("d_sw", int, 4),
        ("fusion_hidden", _parse_int_tuple, (4,)),
        ("head_hidden", _parse_int_tuple, ()),
        ("classes", int, 2),
        ("use_sentivec", _parse_bool, True),
        ("epsilon", float, 1e-5),
        ("budget", int, None),
        ("tol", float, 1e-4),
    ],
}

REQUIRED = {
    "expand-lexicon": ("lexicon", "thesaurus", "embeddings", "candidates", "out"),
    "extract-sentivec": ("lexicon", "dataset", "out"),
    "encode": ("dataset", "out_dir"),
    "train": ("train", "seed", "out_dir"),
    "evaluate": ("test", "checkpoint"),
    "stats": ("dataset",),
    "gen-synthetic": ("seed", "out_dir"),
    "grad-check": (),
}

HELP = {
    "expand-lexicon": "score candidate words against seed sets and write the grown lexicon",
    "extract-sentivec": "emit per-review positive/negative score vectors as TSV",
    "encode": "encode a dataset into an encoder-output container with static embeddings",
    "train": "train one model variant and write checkpoint + history",
    "evaluate": "score a checkpoint on a labeled dataset",
    "stats": "print token-count statistics for a dataset",
    "gen-synthetic": "generate the lexicon-determined synthetic corpus",
    "grad-check": "compare analytic gradients against central differences",
}


def _load_config_file(path):
    values = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ParseError(path, lineno, "expected key=value")
            key, _, value = stripped.partition("=")
            values[key.strip()] = value.strip()
    return values


def _resolve(args, command):
    spec = OPTIONS[command]
    file_values = _load_config_file(args.config) if args.config else {}
    known = {key for key, _, _ in spec}
    unknown = sorted(set(file_values) - known)
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {unknown}")
    effective = {}
    for key, cast, default in spec:
        flag_value = getattr(args, key)
        if flag_value is not None:
            effective[key] = cast(flag_value)
        elif key in file_values:
            effective[key] = cast(file_values[key])
        else:
            effective[key] = default
    missing = [key for key in REQUIRED[command] if effective[key] is None]
    if missing:
        flags = ", ".join("--" + key.replace("_", "-") for key in missing)
        raise UsageError(f"{command}: missing required flags: {flags}")
    return effective


def _echo_config(effective, path):
    with atomic_write(path) as handle:
        for key in sorted(effective):
            if effective[key] is None:
                continue
            handle.write(f"{key}={_encode_value(effective[key])}\n")


def _table_or_empty(path, dim):
    if path:
        return load_embeddings(path)
    return EmbeddingTable(dim=dim, vectors={})


def _negators_or_default(path):
    return load_negators(path) if path else DEFAULT_NEGATORS


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_expand_lexicon(args):
    eff = _resolve(args, "expand-lexicon")
    lexicon = load_lexicon(eff["lexicon"])
    graph = load_thesaurus(eff["thesaurus"])
    table = load_embeddings(eff["embeddings"])
    candidates = load_candidates(eff["candidates"])
    config = ExpansionConfig(
        threshold=eff["T"],
        depth=eff["depth"],
        metric=eff["metric"],
        orientation=eff["orientation"],
        min_seed_hits=eff["min_seed_hits"],
    )
    merged, report = expand_lexicon(lexicon, graph, table, candidates, config)
    save_lexicon(merged, eff["out"])
    _echo_config(eff, eff["out"] + ".cfg")
    sys.stdout.write(report.as_text())
    return 0


def _cmd_extract_sentivec(args):
    eff = _resolve(args, "extract-sentivec")
    lexicon = load_lexicon(eff["lexicon"])
    rows = load_dataset(eff["dataset"], eff["labels"])
    negators = _negators_or_default(eff["negators"])
    sv_config = SentiVecConfig(length=eff["length"], negation_window=eff["window"])
    with atomic_write(eff["out"]) as handle:
        for index, (_, text) in enumerate(rows):
            sv = extract_senti_vectors(tokenize(text), lexicon, negators, sv_config)
            pos = ",".join(fmt(v) for v in sv.pos)
            neg = ",".join(fmt(v) for v in sv.neg)
            handle.write(f"{index}\t{pos}\t{neg}\n")
    _echo_config(eff, eff["out"] + ".cfg")
    print(f"wrote {len(rows)} vector pairs to {eff['out']}")
    return 0


def _cmd_encode(args):
    eff = _resolve(args, "encode")
    table = _table_or_empty(eff["embeddings"], eff["dim"])
    rows = load_dataset(eff["dataset"], eff["labels"])
    items = {
        str(index): encode_static(tokenize(text), table, eff["sl"])
        for index, (_, text) in enumerate(rows)
    }
    save_encoder_outputs(eff["out_dir"], items)
    _echo_config(eff, os.path.join(eff["out_dir"], "run.cfg"))
    print(f"wrote {len(items)} matrices to {eff['out_dir']}")
    return 0


def _model_config_from(eff, class_count, use_sentivec):
    return ModelConfig(
        enc_dim=eff["dim"],
        senti_len=eff["senti_len"],
        hidden_dim=eff["hidden_dim"],
        filters=eff["filters"],
        d_lm=eff["d_lm"],
        d_sw=eff["d_sw"],
        fusion_hidden=eff["fusion_hidden"],
        head_hidden=eff["head_hidden"],
        class_count=class_count,
        use_sentivec=use_sentivec,
    )


def _cmd_train(args):
    eff = _resolve(args, "train")
    if eff["variant"] not in VARIANTS:
        raise ConfigError(f"variant must be one of {VARIANTS}, got {eff['variant']!r}")
    use_sentivec = eff["variant"] == "rcnn+sentivec"
    if use_sentivec and not eff["lexicon"]:
        raise ConfigError("variant rcnn+sentivec needs --lexicon")
    rows = load_dataset(eff["train"], eff["labels"])
    table = _table_or_empty(eff["embeddings"], eff["dim"])
    if table.dim != eff["dim"]:
        raise ConfigError(f"embeddings dim {table.dim} != --dim {eff['dim']}")
    lexicon = load_lexicon(eff["lexicon"]) if use_sentivec else None
    sv_config = SentiVecConfig(length=eff["senti_len"], negation_window=eff["window"])
    samples = prepare_samples(
        rows,
        table,
        eff["sl"],
        lexicon=lexicon,
        negators=_negators_or_default(eff["negators"]),
        sv_config=sv_config,
    )
    kind = "lstm" if eff["variant"] == "static+lstm" else "comb"
    model = build_model(_model_config_from(eff, len(eff["labels"]), use_sentivec), kind=kind)
    train_config = TrainConfig(
        rng_seed=eff["seed"],
        batch_size=eff["batch_size"],
        epochs=eff["epochs"],
        learning_rate=eff["learning_rate"],
        accumulation_steps=eff["accumulation_steps"],
        optimizer=eff["optimizer"],
    )
    model, history = train(model, samples, train_config)
    os.makedirs(eff["out_dir"], exist_ok=True)
    save_checkpoint(model, os.path.join(eff["out_dir"], "checkpoint.ckpt"))
    write_history(history, os.path.join(eff["out_dir"], "history.csv"))
    _echo_config(eff, os.path.join(eff["out_dir"], "run.cfg"))
    last = history[-1]
    print(f"trained {eff['variant']} for {last.epoch} epochs: "
          f"loss {last.loss:.6f} accuracy {last.accuracy:.4f}")
    return 0


def _cmd_evaluate(args):
    eff = _resolve(args, "evaluate")
    model = load_checkpoint(eff["checkpoint"])
    use_sentivec = model.kind == "comb" and model.config.use_sentivec
    if use_sentivec and not eff["lexicon"]:
        raise ConfigError("checkpoint consumes sentiment vectors: needs --lexicon")
    rows = load_dataset(eff["test"], eff["labels"])
    if len(eff["labels"]) != model.config.class_count:
        raise ConfigError(
            f"{len(eff['labels'])} labels for a {model.config.class_count}-class checkpoint"
        )
    table = _table_or_empty(eff["embeddings"], model.config.enc_dim)
    if table.dim != model.config.enc_dim:
        raise ConfigError(f"embeddings dim {table.dim} != checkpoint enc_dim {model.config.enc_dim}")
    sv_config = SentiVecConfig(length=model.config.senti_len, negation_window=eff["window"])
    samples = prepare_samples(
        rows,
        table,
        eff["sl"],
        lexicon=load_lexicon(eff["lexicon"]) if use_sentivec else None,
        negators=_negators_or_default(eff["negators"]),
        sv_config=sv_config,
    )
    predictions = [int(np.argmax(model.forward(enc, sv))) for enc, sv, _ in samples]
    report = compute_metrics(predictions, [label for _, _, label in samples], model.config.class_count)
    text = format_metrics(report, eff["labels"])
    sys.stdout.write(text)
    if eff["out"]:
        with atomic_write(eff["out"]) as handle:
            handle.write(text)
        _echo_config(eff, eff["out"] + ".cfg")
    return 0


def _cmd_stats(args):
    eff = _resolve(args, "stats")
    rows = load_dataset(eff["dataset"], eff["labels"])
    counts = [len(tokenize(text)) for _, text in rows]
    sys.stdout.write(format_stats(corpus_stats(counts)))
    return 0


def _cmd_gen_synthetic(args):
    eff = _resolve(args, "gen-synthetic")
    config = SyntheticConfig(
        seed=eff["seed"],
        train_size=eff["train_size"],
        test_size=eff["test_size"],
        positive_words=eff["positive_words"],
        negative_words=eff["negative_words"],
        filler_words=eff["filler_words"],
        min_len=eff["min_len"],
        max_len=eff["max_len"],
        max_sentiment=eff["max_sentiment"],
        negation_prob=eff["negation_prob"],
        joined_negator_prob=eff["joined_negator_prob"],
        margin=eff["margin"],
        labels=eff["labels"],
    )
    corpus = generate(config)
    os.makedirs(eff["out_dir"], exist_ok=True)
    save_lexicon(corpus.lexicon, os.path.join(eff["out_dir"], "lexicon.tsv"))
    save_dataset(corpus.train_rows, corpus.labels, os.path.join(eff["out_dir"], "train.tsv"))
    save_dataset(corpus.test_rows, corpus.labels, os.path.join(eff["out_dir"], "test.tsv"))
    _echo_config(eff, os.path.join(eff["out_dir"], "run.cfg"))
    print(
        f"wrote lexicon ({len(corpus.lexicon)} entries), "
        f"{len(corpus.train_rows)} train and {len(corpus.test_rows)} test reviews "
        f"to {eff['out_dir']}"
    )
    return 0


def _cmd_grad_check(args):
    eff = _resolve(args, "grad-check")
    rng = np.random.default_rng(eff["seed"])
    config = ModelConfig(
        enc_dim=eff["enc_dim"],
        senti_len=eff["senti_len"],
        hidden_dim=eff["hidden_dim"],
        filters=eff["filters"],
        d_lm=eff["d_lm"],
        d_sw=eff["d_sw"],
        fusion_hidden=eff["fusion_hidden"],
        head_hidden=eff["head_hidden"],
        class_count=eff["classes"],
        use_sentivec=eff["use_sentivec"],
    )
    model = build_model(config, kind=eff["kind"])
    # a well-scaled random point keeps every gradient clear of the relative
    # error floor, where central-difference roundoff would dominate
    for arr in model.param_tensors().values():
        arr[...] = rng.uniform(-eff["init_scale"], eff["init_scale"], arr.shape)
    enc = EncoderOutput(1.5 * rng.standard_normal((eff["sl"], eff["enc_dim"])))
    needs_sv = eff["kind"] == "comb" and eff["use_sentivec"]
    sv = (
        SentiVectors(rng.uniform(0.2, 1, eff["senti_len"]), rng.uniform(0.2, 1, eff["senti_len"]))
        if needs_sv
        else None
    )
    label = int(rng.integers(eff["classes"]))
    report = grad_check(
        model, (enc, sv, label), epsilon=eff["epsilon"], budget=eff["budget"], rng=rng
    )
    print(
        f"checked={report.checked} max_rel_error={report.max_rel_error:.3e} "
        f"worst={report.worst_name}[{report.worst_index}] "
        f"analytic={fmt(report.analytic)} numeric={fmt(report.numeric)}"
    )
    if report.max_rel_error <= eff["tol"]:
        print("PASS")
        return 0
    print(f"FAIL (tolerance {eff['tol']})")
    return 3


HANDLERS = {
    "expand-lexicon": _cmd_expand_lexicon,
    "extract-sentivec": _cmd_extract_sentivec,
    "encode": _cmd_encode,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "stats": _cmd_stats,
    "gen-synthetic": _cmd_gen_synthetic,
    "grad-check": _cmd_grad_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="visenti",
        description="sentiment lexicon expansion and lexicon-aware text classification",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, spec in OPTIONS.items():
        sub = subparsers.add_parser(command, help=HELP[command])
        sub.add_argument("--config", default=None, help="key=value file; flags win")
        for key, _, _ in spec:
            sub.add_argument("--" + key.replace("_", "-"), dest=key, default=None)
        sub.set_defaults(handler=HANDLERS[command])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 1
        return 0 if code == 0 else 1
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except VisentiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
