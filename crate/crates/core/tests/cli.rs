//! End-to-end tests of the command-line binary: the gen → train → resolve →
//! eval flow, reproducibility at a fixed seed, flag/env/config precedence,
//! and error signaling.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sievecoref"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn binary");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn gen_corpus_file(dir: &Path, docs: usize, seed: u64) -> std::path::PathBuf {
    let corpus = dir.join("corpus.conll");
    run_ok(bin()
        .args(["gen", "--out"])
        .arg(&corpus)
        .args(["--docs", &docs.to_string(), "--seed", &seed.to_string()]));
    corpus
}

#[test]
fn gen_train_resolve_eval_flow() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = gen_corpus_file(dir.path(), 24, 11);
    assert!(corpus.is_file());
    assert!(dir.path().join("corpus.stats.txt").is_file());
    assert!(dir.path().join("corpus.stats.txt.json").is_file());

    // Train with a small forest and a 3-fold estimate.
    let model = dir.path().join("model.json");
    let report = dir.path().join("train.txt");
    let out = run_ok(bin()
        .args(["train", "--corpus"])
        .arg(&corpus)
        .args(["--model-out"])
        .arg(&model)
        .args(["--report-out"])
        .arg(&report)
        .args(["--cv-folds", "3", "--n-estimators", "20", "--seed", "6"]));
    assert!(model.is_file());
    assert!(report.is_file());
    assert!(report.with_extension("txt.json").is_file());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("examples"), "train summary missing: {stdout}");

    // Resolve the same corpus with the trained model.
    let dump = dir.path().join("pred.tsv");
    run_ok(bin()
        .args(["resolve", "--corpus"])
        .arg(&corpus)
        .args(["--model"])
        .arg(&model)
        .args(["--out"])
        .arg(&dump));
    let dump_text = std::fs::read_to_string(&dump).unwrap();
    assert!(!dump_text.is_empty());
    assert!(dump_text.lines().all(|l| l.split('\t').count() == 7));

    // Evaluate the dump against the gold annotation.
    let eval_out = dir.path().join("eval.txt");
    run_ok(bin()
        .args(["eval", "--corpus"])
        .arg(&corpus)
        .args(["--predictions"])
        .arg(&dump)
        .args(["--out"])
        .arg(&eval_out)
        .args(["--policy", "gold-anaphoric-only"]));
    let eval_text = std::fs::read_to_string(&eval_out).unwrap();
    assert!(eval_text.contains("f1"), "eval report missing f1: {eval_text}");
    assert!(eval_out.with_extension("txt.json").is_file());
}

#[test]
fn training_twice_at_one_seed_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = gen_corpus_file(dir.path(), 16, 21);
    let model_a = dir.path().join("a.json");
    let model_b = dir.path().join("b.json");
    for model in [&model_a, &model_b] {
        run_ok(bin()
            .args(["train", "--corpus"])
            .arg(&corpus)
            .args(["--model-out"])
            .arg(model)
            .args(["--cv-folds", "0", "--n-estimators", "15", "--seed", "40"]));
    }
    let a = std::fs::read(&model_a).unwrap();
    let b = std::fs::read(&model_b).unwrap();
    assert_eq!(a, b, "same-seed retrain produced different model files");
}

#[test]
fn resolve_without_model_uses_rules_only() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = gen_corpus_file(dir.path(), 6, 31);
    let out = run_ok(bin().args(["resolve", "--corpus"]).arg(&corpus));
    let text = String::from_utf8_lossy(&out.stdout);
    // Without a model no line carries model provenance.
    assert!(text.lines().any(|l| !l.is_empty()));
    assert!(
        text.lines().all(|l| l.split('\t').nth(5) == Some("rule")),
        "rule-only resolve emitted a model decision:\n{text}"
    );
}

#[test]
fn no_rule_sieves_flag_changes_the_output() {
    let dir = tempfile::tempdir().unwrap();
    // Plenty of quoted speech, so the speaker sieve has pronouns to link.
    let corpus = dir.path().join("corpus.conll");
    run_ok(bin()
        .args(["gen", "--out"])
        .arg(&corpus)
        .args(["--docs", "10", "--seed", "41", "--quote-rate", "0.6"]));
    let with_rules = run_ok(bin().args(["resolve", "--corpus"]).arg(&corpus));
    let without_rules =
        run_ok(bin().args(["resolve", "--no-rule-sieves", "--corpus"]).arg(&corpus));
    let with_text = String::from_utf8_lossy(&with_rules.stdout).into_owned();
    let without_text = String::from_utf8_lossy(&without_rules.stdout).into_owned();
    let linked = |s: &str| s.lines().filter(|l| l.contains("\tLINKED\t")).count();
    assert!(
        linked(&with_text) > linked(&without_text),
        "rule sieves should link pronouns that the bare pipeline leaves open \
         ({} vs {})",
        linked(&with_text),
        linked(&without_text)
    );
    assert_eq!(linked(&without_text), 0, "no scorer and no rules, yet links appeared");
}

#[test]
fn errors_exit_nonzero_with_a_message() {
    // Missing corpus file.
    let out = bin()
        .args(["resolve", "--corpus", "/nonexistent/nowhere.conll"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("error:"), "stderr was: {stderr}");

    // Malformed predictions file.
    let dir = tempfile::tempdir().unwrap();
    let corpus = gen_corpus_file(dir.path(), 4, 51);
    let bad = dir.path().join("bad.tsv");
    std::fs::write(&bad, "only three\tcolumns\there\n").unwrap();
    let out = bin()
        .args(["eval", "--corpus"])
        .arg(&corpus)
        .args(["--predictions"])
        .arg(&bad)
        .output()
        .unwrap();
    assert!(!out.status.success());

    // Unknown key in the config file.
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "no_such_option = true\n").unwrap();
    let out = bin()
        .args(["--config"])
        .arg(&cfg)
        .args(["resolve", "--corpus"])
        .arg(&corpus)
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn flags_override_env_and_env_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_a = gen_corpus_file(dir.path(), 5, 61);
    let corpus_b = dir.path().join("b.conll");
    run_ok(bin()
        .args(["gen", "--out"])
        .arg(&corpus_b)
        .args(["--docs", "5", "--seed", "62", "--entities", "2"]));

    // Config file points at corpus A; env overrides to corpus B.
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, format!("corpus = {:?}\n", corpus_a.to_str().unwrap())).unwrap();
    let via_env = run_ok(bin()
        .env("SIEVECOREF_CORPUS", &corpus_b)
        .args(["--config"])
        .arg(&cfg)
        .args(["resolve"]));
    let via_config = run_ok(bin().args(["--config"]).arg(&cfg).args(["resolve"]));
    assert_ne!(
        via_env.stdout, via_config.stdout,
        "env override had no effect over the config file"
    );

    // And an explicit flag beats the env var.
    let via_flag = run_ok(bin()
        .env("SIEVECOREF_CORPUS", &corpus_b)
        .args(["--config"])
        .arg(&cfg)
        .args(["resolve", "--corpus"])
        .arg(&corpus_a));
    assert_eq!(
        via_flag.stdout, via_config.stdout,
        "flag did not win over the env var"
    );
}

#[test]
fn gridsearch_and_ablate_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = gen_corpus_file(dir.path(), 16, 71);

    let grid_out = dir.path().join("grid.txt");
    // A tiny corpus would make the full default grid slow; the subcommand
    // always enumerates the full space, so keep the corpus small but real.
    run_ok(bin()
        .args(["gridsearch", "--corpus"])
        .arg(&corpus)
        .args(["--cv-folds", "2", "--out"])
        .arg(&grid_out)
        .args(["--seed", "5"]));
    let grid_text = std::fs::read_to_string(&grid_out).unwrap();
    // Header + 88 point rows + the best-point line.
    assert_eq!(grid_text.lines().count(), 90, "grid table shape unexpected:\n{grid_text}");
    assert!(grid_text.lines().last().unwrap().starts_with("best: "));
    assert!(grid_out.with_extension("txt.json").is_file());

    let ablate_out = dir.path().join("ablate.txt");
    run_ok(bin()
        .args(["ablate", "--corpus"])
        .arg(&corpus)
        .args(["--n-estimators", "10", "--out"])
        .arg(&ablate_out)
        .args(["--seed", "5"]));
    let ablate_text = std::fs::read_to_string(&ablate_out).unwrap();
    for name in [
        "rule-only",
        "mention-pair",
        "hybrid-system-emb-sieves",
        "logistic-system-emb-sieves",
    ] {
        assert!(ablate_text.contains(name), "missing row {name}:\n{ablate_text}");
    }
    assert!(ablate_out.with_extension("txt.json").is_file());
}
