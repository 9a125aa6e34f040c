#!/usr/bin/env python3
"""Smoke test for the sievecoref_py extension module.

Exercises the full Python surface: corpus generation and round-tripping,
synthetic embeddings, training (with cross-validation), resolution with and
without a model, evaluation, persistence, determinism, and error paths.

Build the module first, then run from the repository root:

    cargo build -p sievecoref-py --release
    cp target/release/libsievecoref_py.so python/sievecoref_py.so
    python3 python/smoke_test.py
"""

import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from sievecoref_py import Corpus, Embeddings, Model, Resolved, resolve  # noqa: E402

checks = 0


def check(cond, label):
    global checks
    checks += 1
    if not cond:
        raise SystemExit(f"FAIL [{label}]")
    print(f"  ok: {label}")


def expect_error(fn, label):
    try:
        fn()
    except ValueError as e:
        check(str(e) != "", f"{label} (raised: {str(e)[:60]})")
    else:
        raise SystemExit(f"FAIL [{label}]: no error raised")


print("corpus generation")
corpus, stats = Corpus.generate(40, seed=11, quote_rate=0.3)
check(len(corpus) == 40, "generate returns the requested document count")
check(stats["documents"] == 40, "stats dict counts documents")
check(stats["pronouns"] > 0 and stats["chains"] > 0, "stats dict counts pronouns and chains")
check(len(set(corpus.doc_ids())) == 40, "doc ids are distinct")
check(corpus.token_count() > 400, "corpus has a plausible token volume")

print("round trips")
text = corpus.to_text()
check(Corpus.from_text(text).to_text() == text, "text round trip is the identity")
corpus2, _ = Corpus.generate(40, seed=11, quote_rate=0.3)
check(corpus2.to_text() == text, "generation is deterministic per seed")

print("embeddings")
emb = Embeddings.synthetic(corpus, dim=12, seed=11)
check(emb.dim() == 12, "synthetic table has the requested dimension")
check(len(emb) > 50, "synthetic table covers the corpus vocabulary")
token_lines = [l for l in text.splitlines() if l and not l.startswith("#")]
some_form = token_lines[0].split("\t")[2]
check(some_form in emb, "a corpus token is in the table")

print("training")
train, test = corpus.split(30)
check(len(train) == 30 and len(test) == 10, "split partitions the corpus")
model = Model.train(train, n_estimators=30, cv_folds=3, seed=7, embeddings=emb)
check(model.mode == "hybrid" and model.classifier == "forest", "trained model reports its shape")
check(model.uses_embeddings, "model built with embeddings requires them")
check(model.n_examples > 0 and model.n_documents == 30, "training metadata is exposed")
cv = model.cv()
check(cv is not None and len(cv["folds"]) == 3, "cross-validation ran the requested folds")
check(0.0 <= cv["mean_f1"] <= 1.0, "cv mean f1 is a probability")
again = Model.train(train, n_estimators=30, cv_folds=3, seed=7, embeddings=emb)
check(again.to_json() == model.to_json(), "training is byte-deterministic per seed")

print("resolution")
resolved = resolve(test, model, embeddings=emb)
check(len(resolved) > 0, "pronouns were detected")
recs = resolved.records()
check(
    all(r["provenance"] in ("rule", "model") for r in recs),
    "every record carries a provenance",
)
check(
    all(0.0 <= r["score"] <= 1.0 for r in recs),
    "every score is a probability",
)
check(
    all(r["members"] for r in recs if r["linked"]),
    "linked records list antecedent members",
)
report = resolved.evaluate(test, "gold-anaphoric-only")
check(0.0 <= report["f1"] <= 1.0, "evaluation produces a valid f1")
check(report["f1"] > 0.3, f"hybrid model is clearly better than chance (f1={report['f1']:.3f})")
check(
    set(report) >= {"linked", "correct", "gold_anaphoric", "precision", "recall", "f1"},
    "evaluation dict has all counts and rates",
)
report_all = resolved.evaluate(test, "all-pronouns")
check(report_all["precision"] <= report["precision"] + 1e-12, "all-pronouns policy is stricter")

print("rules only")
rules_only = resolve(test)
check(
    all(r["provenance"] == "rule" for r in rules_only.records()),
    "without a model every decision is rule-provenance",
)
check(rules_only.linked_count() > 0, "reported-speech pronouns are linked by rule alone")
bare = resolve(test, rule_sieves=False)
check(bare.linked_count() == 0, "no model and no sieves links nothing")

print("persistence")
with tempfile.TemporaryDirectory() as tmp:
    model_path = os.path.join(tmp, "model.json")
    dump_path = os.path.join(tmp, "resolved.tsv")
    corpus_path = os.path.join(tmp, "corpus.conll")

    model.save(model_path)
    loaded = Model.load(model_path)
    check(loaded.cv() is None, "loaded model has no training metadata")
    check(loaded.merge_threshold == model.merge_threshold, "threshold survives persistence")
    re_resolved = resolve(test, loaded, embeddings=emb)
    check(re_resolved.to_tsv() == resolved.to_tsv(), "loaded model reproduces the dump")

    resolved.save(dump_path)
    check(Resolved.load(dump_path).to_tsv() == resolved.to_tsv(), "dump file round trip")
    check(Resolved.from_tsv(resolved.to_tsv()).to_tsv() == resolved.to_tsv(), "dump text round trip")

    corpus.save(corpus_path)
    check(Corpus.load(corpus_path).to_text() == text, "corpus file round trip")

print("error paths")
expect_error(lambda: Model.train(train, mode="rule-only"), "training in rule-only mode is rejected")
expect_error(lambda: Model.train(train, mode="nonsense"), "unknown mode is rejected")
expect_error(lambda: resolve(test, model), "embedding-trained model without a table is rejected")
expect_error(lambda: Corpus.from_text("not\ta\tvalid\tline"), "malformed annotation text is rejected")
expect_error(lambda: resolved.evaluate(test, "bogus"), "unknown eval policy is rejected")
expect_error(lambda: corpus.split(999), "oversized split is rejected")

print(f"smoke test: all {checks} checks passed")
