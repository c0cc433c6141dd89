//! End-to-end tests of the command-line interface: golden outputs for the
//! documented examples, every exit code, the derivation file round trip,
//! and parse/render round trips on generated terms.

use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lamgs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lamgs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("no signal")
}

#[test]
fn eval_converges_with_exit_zero() {
    let out = lamgs(&["eval", "set[l0](\\x. unit x). get[l0](\\y. unit y)"]);
    assert_eq!(code(&out), 0, "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("converged in 2 steps"), "{text}");
    assert!(text.contains("\\x. unit x"), "{text}");
}

#[test]
fn eval_blocked_get_exits_one() {
    let out = lamgs(&["eval", "get[l0](\\x. unit x)"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("blocked"));
}

#[test]
fn eval_divergent_exits_two() {
    // The paradigmatic self-looping term.
    let omega = "unit (\\x. unit x >>= x) >>= \\x. unit x >>= x";
    let out = lamgs(&["eval", omega, "--fuel", "50"]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("fuel exhausted after 50 steps"));
}

#[test]
fn eval_parse_error_exits_three() {
    let out = lamgs(&["eval", "unit (\\x. unit"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn trace_reproduces_overriding_example() {
    // set W; set V; get — four configurations, final store un-normalized.
    let term = "set[l0](\\w. unit w >>= w). set[l0](\\v. unit v). get[l0](\\x. unit x)";
    let out = lamgs(&["trace", term]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5, "4 configurations plus the outcome: {text}");
    assert!(lines[0].contains("emp"));
    assert!(lines[1].contains("upd(l0, \\w. unit w >>= w, emp)"));
    assert!(lines[3].contains("unit (\\v. unit v)"));
    assert!(lines[3].contains("upd(l0, \\v. unit v, upd(l0, \\w. unit w >>= w, emp))"));
}

#[test]
fn store_nf_sorts_and_resolves() {
    let out = lamgs(&[
        "store-nf",
        "upd(l1, \\x. unit x, upd(l0, lkp(l1, upd(l1, \\y. unit y, emp)), upd(l1, \\z. unit z, emp)))",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out).trim(),
        "upd(l0, \\y. unit y, upd(l1, \\x. unit x, emp))"
    );
}

#[test]
fn store_eq_axioms() {
    // Overriding.
    let out = lamgs(&[
        "store-eq",
        "upd(l0, \\x. unit x, upd(l0, \\y. unit y >>= y, emp))",
        "upd(l0, \\x. unit x, emp)",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "true");
    // Distinct values differ.
    let out = lamgs(&[
        "store-eq",
        "upd(l0, \\x. unit x, emp)",
        "upd(l0, \\y. unit y >>= y, emp)",
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out).trim(), "false");
}

#[test]
fn subtype_command_examples() {
    let out = lamgs(&["subtype", "wD", "wD -> wT"]);
    assert_eq!(code(&out), 0);
    let out = lamgs(&["subtype", "wS", "<l0 : wD>"]);
    assert_eq!(code(&out), 1);
    let out = lamgs(&[
        "subtype",
        "(wD -> wS -> wD x wS) /\\ (wD -> wS -> wD x <l0 : wD>)",
        "wD -> wS -> wD x <l0 : wD>",
    ]);
    assert_eq!(code(&out), 0);
    // Sort mismatch is an input error.
    let out = lamgs(&["subtype", "wD", "wS"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn certify_writes_derivation_that_typechecks() {
    let dir = std::env::temp_dir().join("lamgs-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("setget.drv");
    let out = lamgs(&[
        "certify",
        "set[l0](\\x. unit x). get[l0](\\y. unit y)",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("wS -> wD x wS"));
    let check = lamgs(&["typecheck", path.to_str().unwrap()]);
    assert_eq!(code(&check), 0, "{}", stdout(&check));
    assert_eq!(stdout(&check).trim(), "Ok");
}

#[test]
fn certify_blocked_and_divergent() {
    let out = lamgs(&["certify", "get[l0](\\x. unit x)"]);
    assert_eq!(code(&out), 1);
    let omega = "unit (\\x. unit x >>= x) >>= \\x. unit x >>= x";
    let out = lamgs(&["certify", omega, "--fuel", "40"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn typecheck_reports_failing_path() {
    let dir = std::env::temp_dir().join("lamgs-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.drv");
    // An omega node claiming a non-top type.
    std::fs::write(&path, "(w [] |- unit (\\x. unit x) : wS -> wD x wS)").unwrap();
    let out = lamgs(&["typecheck", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("Err"), "{}", stdout(&out));
}

#[test]
fn search_finds_and_rejects() {
    let out = lamgs(&[
        "search",
        "set[l0](\\x. unit x). get[l0](\\y. unit y)",
        "--type",
        "wS -> wD x wS",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("(set"));
    let out = lamgs(&[
        "search",
        "get[l0](\\x. unit x)",
        "--type",
        "wS -> wD x wS",
        "--depth",
        "6",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("not found"));
}

#[test]
fn member_verdicts_and_exit_codes() {
    let out = lamgs(&[
        "member",
        "\\x. unit x",
        "--sort",
        "value",
        "--type",
        "wD -> wS -> wD x wS",
        "--samples",
        "10",
        "--size",
        "5",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).starts_with("yes"));
    let omega = "unit (\\x. unit x >>= x) >>= \\x. unit x >>= x";
    let out = lamgs(&["member", omega, "--type", "wS -> wD x wS", "--fuel", "60"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("no"));
    assert!(stdout(&out).contains("ran on emp"));
}

#[test]
fn member_json_is_reproducible() {
    let args = [
        "member",
        "\\x. unit x",
        "--sort",
        "value",
        "--type",
        "wD -> wS -> wD x wS",
        "--samples",
        "6",
        "--size",
        "5",
        "--seed",
        "42",
        "--json",
    ];
    let a = stdout(&lamgs(&args));
    let b = stdout(&lamgs(&args));
    assert_eq!(a, b, "same seed must give identical output");
    let v: serde_json::Value = serde_json::from_str(a.trim()).unwrap();
    assert_eq!(v["verdict"], "yes");
    assert_eq!(v["seed"], 42);
    assert_eq!(v["budget"]["samples"], 6);
}

#[test]
fn trace_json_structure() {
    let out = lamgs(&[
        "trace",
        "set[l0](\\x. unit x). unit (\\y. unit y)",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["outcome"], "converged");
    assert_eq!(v["trace"][0]["step"], 0);
    assert_eq!(v["trace"][1]["store"], "upd(l0, \\x. unit x, emp)");
}

#[test]
fn batch_mode_reports_worst_outcome() {
    let dir = std::env::temp_dir().join("lamgs-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("batch.txt");
    std::fs::write(&path, "unit (\\x. unit x)\nget[l0](\\x. unit x)\n").unwrap();
    let out = lamgs(&["eval", "--batch", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("converged"));
    assert!(text.contains("blocked"));
}

#[test]
fn unicode_rendering() {
    let out = lamgs(&["eval", "unit (\\x. unit x)", "--unicode"]);
    assert!(stdout(&out).contains("λx. unit x"));
    let out = lamgs(&["store-nf", "upd(l0, \\x. unit x, emp)", "--unicode"]);
    assert!(stdout(&out).contains("ℓ0"));
}

#[test]
fn proptest_command_runs_named_suite() {
    let out = lamgs(&["proptest", "--suite", "golden"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).starts_with("PASS — golden"));
}

#[test]
fn parse_render_round_trip_on_generated_terms() {
    use lamgs_core::enumgen::{rand_closed_comp, rand_closed_store};
    use lamgs_core::syntax::Location;
    // Rendered terms must parse back: drive them through eval --json,
    // which parses before running.
    let locs = vec![Location(0), Location(1)];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..40 {
        let m = rand_closed_comp(&mut rng, 12, &locs);
        let s = rand_closed_store(&mut rng, i % 3, &locs);
        let mt = lamgs_cli::render::render_comp(&m, &lamgs_cli::render::ASCII);
        let st = lamgs_cli::render::render_store(&s, &lamgs_cli::render::ASCII);
        let out = lamgs(&["eval", &mt, "--store", &st, "--fuel", "0", "--json"]);
        assert_ne!(code(&out), 3, "rendered term failed to parse: {mt} -| {st}");
        let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
        assert_eq!(v["trace"], serde_json::Value::Null);
    }
}

#[test]
fn structural_round_trip_terms_stores_types() {
    use lamgs_cli::parse::{parse_computation, parse_store, parse_type};
    use lamgs_cli::render::{render_comp, render_store, render_type, ASCII};
    use lamgs_core::enumgen::{rand_closed_comp, rand_closed_store, rand_type};
    use lamgs_core::syntax::Location;
    use lamgs_core::types::Sort;

    let locs = vec![Location(0), Location(1), Location(2)];
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..200usize {
        let m = rand_closed_comp(&mut rng, 14, &locs);
        let text = render_comp(&m, &ASCII);
        let back = parse_computation(&text).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert_eq!(back, m, "term round trip failed on {text}");

        let s = rand_closed_store(&mut rng, i % 4, &locs);
        let text = render_store(&s, &ASCII);
        let back = parse_store(&text).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert_eq!(back, s, "store round trip failed on {text}");

        for sort in [Sort::Value, Sort::Store, Sort::Result, Sort::Comp] {
            let t = rand_type(&mut rng, sort, 4, &locs);
            let text = render_type(&t, &ASCII);
            let back = parse_type(&text).unwrap_or_else(|e| panic!("{text}: {e}"));
            assert_eq!(back, t, "type round trip failed on {text}");
        }
    }
}

#[test]
fn derivation_exchange_format_round_trips_exactly() {
    use lamgs_cli::parse::parse_derivation;
    use lamgs_cli::render::{render_derivation, ASCII};
    use lamgs_core::suites::certificate_corpus;
    use lamgs_core::typing::check_derivation;

    for cert in certificate_corpus(0xD00D, 25, 300) {
        let text = render_derivation(&cert.derivation, &ASCII);
        let back = parse_derivation(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        assert_eq!(
            back, cert.derivation,
            "derivation round trip changed the tree"
        );
        check_derivation(&back).unwrap();
    }
}
