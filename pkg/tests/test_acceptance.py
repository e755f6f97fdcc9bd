"""Acceptance gate: one test per numbered criterion.

Each test announces a single ``[criterion NN] name: PASS`` or ``FAIL`` line
directly to the terminal (bypassing capture) so a run of this file doubles as
a checklist. Every check here recomputes its expectation from first
principles instead of calling back into the code under test.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from visenti import (
    DEFAULT_NEGATORS,
    EmbeddingTable,
    EncoderOutput,
    ExperimentConfig,
    ModelConfig,
    SentiEntry,
    SentiLexicon,
    SentiVecConfig,
    SentiVectors,
    ThesaurusGraph,
    TrainConfig,
    build_model,
    compute_metrics,
    expand_lexicon,
    extract_senti_vectors,
    f1_score,
    grad_check,
    load_lexicon,
    polarity_from_distances,
    prepare_samples,
    run_experiment,
    save_checkpoint,
    save_dataset,
    save_lexicon,
    train,
    write_history,
)
from visenti.synthetic import SyntheticConfig, generate


@pytest.fixture
def announce(capsys):
    @contextmanager
    def _block(number, name):
        ok = False
        try:
            yield
            ok = True
        finally:
            with capsys.disabled():
                print(f"[criterion {number:02d}] {name}: {'PASS' if ok else 'FAIL'}")

    return _block


# ---------------------------------------------------------------------------
# Shared toy shapes


def _toy_model(hidden_dim=3):
    config = ModelConfig(
        enc_dim=3,
        senti_len=4,
        hidden_dim=hidden_dim,
        filters=4,
        d_lm=4,
        d_sw=4,
        fusion_hidden=(4,),
        head_hidden=(),
        class_count=2,
        use_sentivec=True,
    )
    return build_model(config, kind="comb")


def _toy_samples(count, rng, enc_dim=3, senti_len=4, sl=4):
    samples = []
    for k in range(count):
        enc = EncoderOutput(rng.standard_normal((sl, enc_dim)))
        label = k % 2
        high = rng.uniform(0.7, 1.0, senti_len)
        low = rng.uniform(0.0, 0.2, senti_len)
        pos, neg = (high, low) if label == 1 else (low, high)
        samples.append((enc, SentiVectors(pos, neg), label))
    return samples


# ---------------------------------------------------------------------------
# 1. distance-pair polarity normalization


def test_criterion_01_polarity_pairs(announce):
    with announce(1, "distance-pair polarity normalization"):
        pairs = np.random.default_rng(12).uniform(0.0, 10.0, size=(10_000, 2)).tolist()
        start = time.perf_counter()
        for d_pos, d_neg in pairs:
            lit_pos, lit_neg = polarity_from_distances(d_pos, d_neg, "literal")
            prox_pos, prox_neg = polarity_from_distances(d_pos, d_neg, "proximal")
            assert abs(lit_pos + lit_neg - 1.0) <= 1e-12
            assert abs(prox_pos + prox_neg - 1.0) <= 1e-12
            assert 0.0 <= lit_pos <= 1.0 and 0.0 <= prox_pos <= 1.0
            # the two orientations answer opposite questions about one pair
            assert abs(lit_pos + prox_pos - 1.0) <= 1e-12
        elapsed = time.perf_counter() - start
        assert elapsed < 1.0, f"10,000 pairs took {elapsed:.3f}s"


# ---------------------------------------------------------------------------
# 2. lexicon growth against a hand-computed trace


def test_criterion_02_expansion_hand_trace(announce):
    with announce(2, "lexicon growth hand trace"):
        lexicon = SentiLexicon.from_entries(
            [
                SentiEntry(lemma="tốt", pos_tag="adjective", pos_score=0.9),
                SentiEntry(lemma="đẹp", pos_tag="adjective", pos_score=0.8),
                SentiEntry(lemma="xấu", pos_tag="adjective", neg_score=0.85),
                SentiEntry(lemma="tệ", pos_tag="adjective", neg_score=0.95),
            ],
            name="fixture",
        )
        graph = ThesaurusGraph()
        graph.add_synonym("tốt", "tuyệt")
        graph.add_antonym("đẹp", "xấu_xí")
        graph.add_synonym("xấu", "kém_cỏi")
        vectors = {
            "tốt": (1.0, 0.0),
            "đẹp": (0.9, 0.1),
            "tuyệt": (1.0, 0.2),
            "xấu": (-1.0, 0.0),
            "tệ": (-0.9, -0.1),
            "xấu_xí": (-1.0, 0.2),
            "kém_cỏi": (-0.8, -0.2),
            "hay": (0.8, 0.05),
            "dở": (-0.85, 0.1),
        }
        table = EmbeddingTable(
            dim=2, vectors={k: np.array(v, dtype=np.float64) for k, v in vectors.items()}
        )
        candidates = ("hay", "dở", "mới", "tốt", "xấu", "đẹp")
        merged, report = expand_lexicon(lexicon, graph, table, candidates)

        positive = {"tốt", "đẹp", "tuyệt"}
        negative = {"xấu", "tệ", "xấu_xí", "kém_cỏi"}
        assert report.positive == frozenset(positive)
        assert report.negative == frozenset(negative)
        assert report.conflicts == frozenset()
        assert (report.scored, report.skipped_existing, report.unscorable) == (2, 3, 1)
        assert "mới" not in merged

        def cos_dist(a, b):
            dot = a[0] * b[0] + a[1] * b[1]
            return 1.0 - dot / (
                math.sqrt(a[0] ** 2 + a[1] ** 2) * math.sqrt(b[0] ** 2 + b[1] ** 2)
            )

        for word in ("hay", "dở"):
            d_pos = sum(cos_dist(vectors[word], vectors[s]) for s in sorted(positive))
            d_pos /= len(positive)
            d_neg = sum(cos_dist(vectors[word], vectors[s]) for s in sorted(negative))
            d_neg /= len(negative)
            entry = merged.get(word)
            assert abs(entry.pos_score - d_neg / (d_pos + d_neg)) <= 1e-9, word
            assert abs(entry.neg_score - d_pos / (d_pos + d_neg)) <= 1e-9, word
            assert entry.provenance == "expanded"
        for lemma in ("tốt", "đẹp", "xấu", "tệ"):
            assert merged.get(lemma) == lexicon.get(lemma)

        # a word reachable from both poles is quarantined, never adopted
        clex = SentiLexicon.from_entries(
            [
                SentiEntry(lemma="ngon", pos_tag="adjective", pos_score=0.9),
                SentiEntry(lemma="chán", pos_tag="adjective", neg_score=0.9),
            ]
        )
        cgraph = ThesaurusGraph()
        cgraph.add_synonym("ngon", "vừa")
        cgraph.add_synonym("chán", "vừa")
        ctable = EmbeddingTable(
            dim=2,
            vectors={
                "ngon": np.array([1.0, 0.0]),
                "chán": np.array([-1.0, 0.0]),
                "vừa": np.array([0.0, 1.0]),
            },
        )
        cmerged, creport = expand_lexicon(clex, cgraph, ctable, ())
        assert creport.conflicts == frozenset({"vừa"})
        assert "vừa" not in creport.positive and "vừa" not in creport.negative
        assert "vừa" not in cmerged


# ---------------------------------------------------------------------------
# 3. extractor vs a full-window brute-force scan


def _full_window_extract(tokens, score_table, negators, window, length):
    """Reference extractor: exhaustive scans, no longest-match shortcuts."""
    tokens = list(tokens)
    max_span = max((lemma.count("_") + 1 for lemma in score_table), default=1)
    occurrences = []
    for pattern in negators:
        words = pattern.split()
        for start in range(len(tokens)):
            if tokens[start] == "_".join(words):
                occurrences.append((start, start, len(words)))
            if len(words) > 1 and tokens[start : start + len(words)] == words:
                occurrences.append((start, start + len(words) - 1, len(words)))
    occurrences = sorted(set(occurrences))
    claimed = set()
    blocked = set()
    pos_out, neg_out = [], []
    position = 0
    while position < len(tokens):
        if position in blocked:
            position += 1
            continue
        found = None
        for span in range(min(max_span, len(tokens) - position), 0, -1):
            lemma = "_".join(tokens[position : position + span])
            if lemma in score_table:
                found = (score_table[lemma], span)
                break
        if found is None:
            position += 1
            continue
        (pos_score, neg_score), span = found
        best = None
        for k, (start, end, size) in enumerate(occurrences):
            if k in claimed:
                continue
            if any(t in blocked for t in range(start, end + 1)):
                continue
            if not (position - window <= end <= position - 1):
                continue
            if best is None or (size, end) > (occurrences[best][2], occurrences[best][1]):
                best = k
        if best is None:
            pos_out.append(pos_score)
            neg_out.append(neg_score)
        else:
            claimed.add(best)
            start, end, _ = occurrences[best]
            blocked.update(range(start, end + 1))
            pos_out.append(neg_score)
            neg_out.append(pos_score)
        blocked.update(range(position, position + span))
        position += span
    pad = lambda vals: (list(vals) + [0.0] * length)[:length]
    return pad(pos_out), pad(neg_out)


def test_criterion_03_extractor_vs_brute_force(announce):
    with announce(3, "extractor vs brute-force scan"):
        lexicon = SentiLexicon.from_entries(
            [
                SentiEntry(lemma="tốt", pos_tag="adjective", pos_score=0.9),
                SentiEntry(lemma="đẹp", pos_tag="adjective", pos_score=0.8),
                SentiEntry(lemma="xấu", pos_tag="adjective", neg_score=0.85),
                SentiEntry(lemma="tệ", pos_tag="adjective", neg_score=0.95),
                SentiEntry(lemma="hết_ý", pos_tag="adjective", pos_score=0.75),
                SentiEntry(lemma="kém", pos_tag="adjective", neg_score=0.7),
                SentiEntry(lemma="ý", pos_tag="noun", pos_score=0.4),
                SentiEntry(lemma="bao", pos_tag="noun", pos_score=0.4, neg_score=0.1),
            ]
        )
        score_table = {
            lemma: (entry.pos_score, entry.neg_score)
            for lemma, entry in lexicon.entries.items()
        }
        vocab = (
            "tốt", "đẹp", "xấu", "tệ", "kém", "ý",
            "hết", "bao", "giờ",
            "hết_ý", "không_bao_giờ", "chẳng_hề",
            "không", "chẳng", "vô", "bất",
            "xe", "này", "rất", "quá",
        )
        assert len(vocab) == 20
        config = SentiVecConfig(length=16, negation_window=2)
        rng = np.random.default_rng(31)
        start = time.perf_counter()
        for _ in range(500):
            tokens = [
                vocab[int(k)] for k in rng.integers(0, len(vocab), int(rng.integers(0, 13)))
            ]
            sv = extract_senti_vectors(tokens, lexicon, DEFAULT_NEGATORS, config)
            want_pos, want_neg = _full_window_extract(
                tokens, score_table, DEFAULT_NEGATORS, config.negation_window, config.length
            )
            assert sv.pos.tobytes() == np.array(want_pos, dtype=np.float64).tobytes(), tokens
            assert sv.neg.tobytes() == np.array(want_neg, dtype=np.float64).tobytes(), tokens
        elapsed = time.perf_counter() - start
        assert elapsed < 10.0, f"500 comparisons took {elapsed:.3f}s"


# ---------------------------------------------------------------------------
# 4. negation flips the worked sentence pair


def test_criterion_04_negation_flips_pair(announce):
    with announce(4, "negation flips the sentence pair"):
        lexicon = SentiLexicon.from_entries(
            [
                SentiEntry(lemma="nhanh", pos_tag="adjective", pos_score=0.8),
                SentiEntry(lemma="tiết_kiệm", pos_tag="verb", pos_score=0.7),
            ]
        )
        plain = "Chiếc xe này chạy nhanh mà còn tiết_kiệm nhiên_liệu nữa".split()
        negated = "Chiếc xe này không nhanh mà còn chẳng tiết_kiệm nhiên_liệu nữa".split()
        sv_plain = extract_senti_vectors(plain, lexicon)
        sv_negated = extract_senti_vectors(negated, lexicon)
        assert float(sv_plain.pos.sum()) > float(sv_plain.neg.sum())
        assert float(sv_negated.neg.sum()) > float(sv_negated.pos.sum())
        # both sentiment words flip, nothing is lost
        assert float(sv_plain.pos.sum()) == pytest.approx(0.8 + 0.7)
        assert float(sv_negated.neg.sum()) == pytest.approx(0.8 + 0.7)


# ---------------------------------------------------------------------------
# 5. fixed-length output under the default configuration


def test_criterion_05_default_vector_length(announce):
    with announce(5, "sentiment vectors keep the default length"):
        lexicon = SentiLexicon.from_entries(
            [SentiEntry(lemma="nhanh", pos_tag="adjective", pos_score=0.8)]
        )
        inputs = (
            [],
            ["xe"],
            ["nhanh"] * 3,
            ["không", "nhanh"] * 4,
            ["xe"] * 300,
            ["nhanh"] * 200,  # more hits than slots: truncation still fixed-length
        )
        for tokens in inputs:
            sv = extract_senti_vectors(tokens, lexicon)
            assert sv.pos.shape == (128,)
            assert sv.neg.shape == (128,)


# ---------------------------------------------------------------------------
# 6. analytic gradients vs central differences


def test_criterion_06_grad_check(announce):
    with announce(6, "analytic gradients match central differences"):
        model = _toy_model(hidden_dim=4)
        rng = np.random.default_rng(50)
        for arr in model.param_tensors().values():
            arr[...] = rng.uniform(-0.7, 0.7, arr.shape)
        enc = EncoderOutput(1.5 * rng.standard_normal((4, 3)))
        sv = SentiVectors(rng.uniform(0.2, 1, 4), rng.uniform(0.2, 1, 4))
        label = int(rng.integers(2))
        start = time.perf_counter()
        report = grad_check(model, (enc, sv, label), epsilon=1e-5, budget=None, rng=rng)
        elapsed = time.perf_counter() - start
        total = sum(arr.size for arr in model.param_tensors().values())
        assert report.checked == total  # every coordinate, no sampling
        assert report.max_rel_error < 1e-4, report
        assert elapsed < 30.0, f"full check took {elapsed:.3f}s"


# ---------------------------------------------------------------------------
# 7. a single sample is memorized


def test_criterion_07_single_sample_memorized(announce):
    with announce(7, "single sample memorized"):
        sample = _toy_samples(1, np.random.default_rng(3))[0]
        config = TrainConfig(
            rng_seed=7, batch_size=1, epochs=500, learning_rate=1e-2, accumulation_steps=1
        )
        _, history = train(_toy_model(), [sample], config)
        assert len(history) <= 500
        assert history[-1].loss < 0.01, history[-1]


# ---------------------------------------------------------------------------
# 8. the ablation shows where the signal lives


def test_criterion_08_ablation_signal(announce, tmp_path):
    with announce(8, "sentiment vectors carry signal the zeroed encoder lacks"):
        corpus = generate(SyntheticConfig(seed=29, train_size=400, test_size=100))
        lexicon_path = tmp_path / "lexicon.tsv"
        train_path = tmp_path / "train.tsv"
        test_path = tmp_path / "test.tsv"
        save_lexicon(corpus.lexicon, lexicon_path)
        save_dataset(corpus.train_rows, corpus.labels, train_path)
        save_dataset(corpus.test_rows, corpus.labels, test_path)
        config = ExperimentConfig(
            train_path=str(train_path),
            test_path=str(test_path),
            seed=29,
            out_dir=str(tmp_path / "out"),
            variants=("rcnn-only", "rcnn+sentivec"),
            lexicon_path=str(lexicon_path),
            seq_len=16,
            senti_len=16,
            enc_dim=8,
            hidden_dim=8,
            filters=8,
            d_lm=8,
            d_sw=8,
            fusion_hidden=(8,),
            epochs=35,
            batch_size=24,
            learning_rate=1e-3,
            accumulation_steps=1,
        )
        start = time.perf_counter()
        table = run_experiment(config)
        elapsed = time.perf_counter() - start
        by_variant = {res.variant: res.report for res in table.results}
        # no embedding file: every encoder matrix is all-zero, so the text
        # pathway alone cannot separate anything
        assert by_variant["rcnn+sentivec"].macro_f1 >= 0.95, table.text
        assert by_variant["rcnn-only"].macro_f1 <= 0.70, table.text
        assert elapsed < 300.0, f"two-variant run took {elapsed:.1f}s"


# ---------------------------------------------------------------------------
# 9. a separable corpus is fit within budget


def test_criterion_09_separable_fit(announce):
    with announce(9, "separable corpus fit within budget"):
        corpus = generate(SyntheticConfig(seed=33, train_size=200, test_size=4))
        table = EmbeddingTable(dim=8, vectors={})
        samples = prepare_samples(
            corpus.train_rows,
            table,
            seq_len=16,
            lexicon=corpus.lexicon,
            sv_config=SentiVecConfig(length=16, negation_window=2),
        )
        model = build_model(
            ModelConfig(
                enc_dim=8,
                senti_len=16,
                hidden_dim=8,
                filters=8,
                d_lm=8,
                d_sw=8,
                fusion_hidden=(8,),
                head_hidden=(),
                class_count=2,
                use_sentivec=True,
            ),
            kind="comb",
        )
        config = TrainConfig(
            rng_seed=33, batch_size=24, epochs=120, learning_rate=1e-3, accumulation_steps=1
        )
        start = time.perf_counter()
        model, history = train(model, samples, config)
        elapsed = time.perf_counter() - start
        assert len(history) <= 200
        hits = sum(
            int(np.argmax(model.forward(enc, sv))) == label for enc, sv, label in samples
        )
        accuracy = hits / len(samples)
        assert accuracy >= 0.95, f"train accuracy {accuracy:.3f}"
        assert elapsed < 120.0, f"fit took {elapsed:.1f}s"


# ---------------------------------------------------------------------------
# 10. reported metric triples are internally consistent


def test_criterion_10_metric_triples(announce):
    with announce(10, "reported metric triples internally consistent"):
        rng = np.random.default_rng(77)
        for _ in range(1_000):
            class_count = int(rng.integers(2, 4))
            n = int(rng.integers(1, 40))
            gold = rng.integers(0, class_count, n).tolist()
            pred = rng.integers(0, class_count, n).tolist()
            report = compute_metrics(pred, gold, class_count)
            for c in range(class_count):
                tp = sum(1 for p, g in zip(pred, gold) if p == c and g == c)
                fp = sum(1 for p, g in zip(pred, gold) if p == c and g != c)
                fn = sum(1 for p, g in zip(pred, gold) if p != c and g == c)
                precision = tp / (tp + fp) if tp + fp else 0.0
                recall = tp / (tp + fn) if tp + fn else 0.0
                f1 = (
                    2 * precision * recall / (precision + recall)
                    if precision + recall
                    else 0.0
                )
                assert abs(report.precision[c] - precision) <= 1e-12
                assert abs(report.recall[c] - recall) <= 1e-12
                assert abs(report.f1[c] - f1) <= 1e-12

        # each published (precision, recall, f1) triple must satisfy
        # f1 = harmonic_mean(p, r) to two decimals
        triples = (
            (0.92, 0.90, 0.91),
            (0.94, 0.92, 0.93),
            (0.96, 0.94, 0.95),
            (0.88, 0.86, 0.87),
            (0.85, 0.85, 0.85),
            (0.88, 0.90, 0.89),
            (0.93, 0.92, 0.93),
            (0.95, 0.94, 0.94),
        )
        bad = []
        for precision, recall, stated in triples:
            recomputed = round(f1_score(precision, recall), 2)
            if abs(recomputed - stated) > 5e-3:
                bad.append((precision, recall, stated, recomputed))
        assert not bad, f"stated f1 disagrees with harmonic mean of stated p/r: {bad}"


# ---------------------------------------------------------------------------
# 11. artifacts round-trip and reruns are byte-identical


def _random_lexicon(rng, index):
    glosses = ("", "mô tả", "ghi chú dài hơn", "cột\tcó\ttab")
    lemmas = set()
    while len(lemmas) < int(rng.integers(1, 12)):
        parts = [
            "".join(rng.choice(list("abcdeghiklmnostuvxyđàáạảằẵ"), int(rng.integers(1, 7))))
            for _ in range(int(rng.integers(1, 4)))
        ]
        lemmas.add("_".join(parts))
    entries = []
    for lemma in sorted(lemmas):
        tag = ("noun", "verb", "adjective", "adverb", "unknown")[int(rng.integers(5))]
        gloss = glosses[int(rng.integers(len(glosses)))]
        if rng.random() < 0.5:
            pos = float(rng.uniform(0.0, 1.0))
            entries.append(
                SentiEntry(
                    lemma=lemma, pos_tag=tag, pos_score=pos, neg_score=1.0 - pos,
                    gloss=gloss, provenance="expanded",
                )
            )
        else:
            entries.append(
                SentiEntry(
                    lemma=lemma,
                    pos_tag=tag,
                    pos_score=float(rng.uniform(0.0, 1.0)),
                    neg_score=float(rng.uniform(0.0, 1.0)),
                    gloss=gloss,
                )
            )
    return SentiLexicon.from_entries(entries, name=f"rand{index}")


def test_criterion_11_round_trips_and_determinism(announce, tmp_path):
    with announce(11, "round trips and reruns are byte-identical"):
        rng = np.random.default_rng(4242)
        for index in range(100):
            lexicon = _random_lexicon(rng, index)
            first = tmp_path / f"lex{index}.tsv"
            save_lexicon(lexicon, first)
            loaded = load_lexicon(first)
            assert loaded.entries == lexicon.entries, index
            assert loaded.name == lexicon.name
            second = tmp_path / f"lex{index}b.tsv"
            save_lexicon(loaded, second)
            assert first.read_bytes() == second.read_bytes(), index

        def fit_and_dump(out_dir):
            out_dir.mkdir()
            samples = _toy_samples(6, np.random.default_rng(100))
            model, history = train(
                _toy_model(),
                samples,
                TrainConfig(
                    rng_seed=8, batch_size=2, epochs=3,
                    learning_rate=1e-3, accumulation_steps=2,
                ),
            )
            save_checkpoint(model, out_dir / "model.ckpt")
            write_history(history, out_dir / "history.csv")

        fit_and_dump(tmp_path / "run_a")
        fit_and_dump(tmp_path / "run_b")
        for name in ("model.ckpt", "history.csv"):
            assert (tmp_path / "run_a" / name).read_bytes() == (
                tmp_path / "run_b" / name
            ).read_bytes(), name
