//! The batch property suites: one per acceptance gate, each reporting a
//! single pass/fail line. `cargo test` runs them through the integration
//! tests; the command-line `proptest` subcommand runs them directly.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::enumgen::{
    enumerate_canonical_types, enumerate_stores, rand_closed_comp, rand_closed_store, rand_type,
};
use crate::eval::{eval_big, run, Configuration, RunOutcome};
use crate::realize::{falsify_comp_soundness, member, Budget, Entity, Falsification};
use crate::store::{ext_equiv, normal_form, rewrite_oracle, store_eq, StoreTerm};
use crate::syntax::{alpha_eq, alpha_eq_value, Computation, Location, Name, Value};
use crate::types::{
    dom_sigma, subtype, subtype_oracle, to_raw, type_equiv, AnyType, CompType, Sort, StoreType,
    ValueType,
};
use crate::typing::{
    certify_convergence, check_derivation, invert::invert_store, preserve_step, search_typing,
    stores::retype_equal_store, type_store_at, Certificate, Context, Derivation, Subject,
};

/// Outcome of one suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub failures: usize,
    pub detail: String,
    pub millis: u128,
}

impl SuiteReport {
    pub fn line(&self) -> String {
        format!(
            "{} — {} — {} cases, {} failures ({} ms){}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.failures,
            self.millis,
            if self.detail.is_empty() {
                String::new()
            } else {
                format!(" — {}", self.detail)
            }
        )
    }
}

pub const SUITE_NAMES: [&str; 8] = [
    "big-small",
    "store-theory",
    "subtyping",
    "subject-reduction",
    "characterization",
    "golden",
    "interp-soundness",
    "store-type-stability",
];

/// Runs one suite by name.
pub fn run_suite(name: &str, seed: u64) -> Option<SuiteReport> {
    Some(match name {
        "big-small" => big_small_suite(seed),
        "store-theory" => store_theory_suite(),
        "subtyping" => subtyping_suite(seed),
        "subject-reduction" => subject_reduction_suite(seed),
        "characterization" => characterization_suite(seed),
        "golden" => golden_suite(seed),
        "interp-soundness" => interp_soundness_suite(seed),
        "store-type-stability" => store_type_stability_suite(seed),
        _ => return None,
    })
}

/// Runs every suite.
pub fn all_suites(seed: u64) -> Vec<SuiteReport> {
    SUITE_NAMES
        .iter()
        .map(|n| run_suite(n, seed).expect("known name"))
        .collect()
}

fn report(
    name: &'static str,
    start: Instant,
    cases: usize,
    failures: usize,
    detail: String,
) -> SuiteReport {
    SuiteReport {
        name,
        passed: failures == 0,
        cases,
        failures,
        detail,
        millis: start.elapsed().as_millis(),
    }
}

fn three_locations() -> Vec<Location> {
    vec![Location(0), Location(1), Location(2)]
}

fn two_locations() -> Vec<Location> {
    vec![Location(0), Location(1)]
}

/// The two fixed closed values of the store-theory envelope.
fn fixed_values() -> [Value; 2] {
    [
        Value::identity(),
        Value::lam(
            "x",
            Computation::bind(Computation::unit(Value::var("x")), Value::var("x")),
        ),
    ]
}

// ---------------------------------------------------------------------------
// 1. big-step / small-step agreement
// ---------------------------------------------------------------------------

/// 1000 generated closed configurations (term size <= 20, <= 3 locations,
/// fuel 500): the recursive evaluator and the step-driving loop agree on the
/// outcome class, the result value up to alpha, and the final store up to
/// derivable equality; converged runs also agree on the derivation weight.
pub fn big_small_suite(seed: u64) -> SuiteReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let locs = three_locations();
    let mut failures = 0;
    let mut detail = String::new();
    let cases = 1000;
    for i in 0..cases {
        let size = rng.random_range(3..=20);
        let m = rand_closed_comp(&mut rng, size, &locs);
        let bindings = rng.random_range(0..3);
        let s = rand_closed_store(&mut rng, bindings, &locs);
        let c = Configuration::new(m, s);
        let (small, _) = run(&c, 500).expect("closed");
        let big = eval_big(&c, 500).expect("closed");
        let ok = match (&small, &big) {
            (
                RunOutcome::Converged {
                    value: v1,
                    store: s1,
                    steps,
                    ..
                },
                RunOutcome::Converged {
                    value: v2,
                    store: s2,
                    index,
                    ..
                },
            ) => alpha_eq_value(v1, v2) && store_eq(s1, s2) && steps == index,
            (RunOutcome::Blocked { config: c1, .. }, RunOutcome::Blocked { config: c2, .. }) => {
                alpha_eq(&c1.comp, &c2.comp) && store_eq(&c1.store, &c2.store)
            }
            (RunOutcome::FuelExhausted { .. }, RunOutcome::FuelExhausted { .. }) => true,
            _ => false,
        };
        if !ok {
            failures += 1;
            if detail.is_empty() {
                detail = format!("first disagreement at case {i}: {small:?} vs {big:?}");
            }
        }
    }
    report("big-small", start, cases, failures, detail)
}

// ---------------------------------------------------------------------------
// 2. store-theory decidability
// ---------------------------------------------------------------------------

/// Exhaustive over store terms of size <= 6 with 2 locations and 2 fixed
/// closed values: the normal-form decision, extensional equivalence, and
/// the axiomatic rewrite search at depth 8 agree on every pair.
pub fn store_theory_suite() -> SuiteReport {
    let start = Instant::now();
    let stores = enumerate_stores(6, &two_locations(), &fixed_values());
    let mut failures = 0;
    let mut detail = String::new();
    let mut cases = 0;
    for a in &stores {
        for b in &stores {
            cases += 1;
            let eq = store_eq(a, b);
            let ext = ext_equiv(a, b);
            let oracle = rewrite_oracle(a, b, 8);
            if eq != ext || eq != oracle {
                failures += 1;
                if detail.is_empty() {
                    detail =
                        format!("store_eq={eq} ext_equiv={ext} oracle={oracle} on {a:?} vs {b:?}");
                }
            }
        }
    }
    report(
        "store-theory",
        start,
        cases,
        failures,
        if detail.is_empty() {
            format!("{} store terms enumerated", stores.len())
        } else {
            detail
        },
    )
}

// ---------------------------------------------------------------------------
// 3. subtyping decision procedure vs the axiomatic oracle
// ---------------------------------------------------------------------------

const ORACLE_DEPTH: usize = 12;

/// Exhaustive agreement of the decision procedure with the axiomatic search
/// on all canonical pairs of height <= 3 over 2 locations, 5000 random
/// deeper pairs, the preorder laws, and the domain anti-monotonicity of
/// store subtyping.
pub fn subtyping_suite(seed: u64) -> SuiteReport {
    let start = Instant::now();
    let locs = two_locations();
    let by_sort = enumerate_canonical_types(3, &locs);
    let mut failures = 0;
    let mut cases = 0;
    let mut detail = String::new();
    let fail = |msg: String, failures: &mut usize, detail: &mut String| {
        *failures += 1;
        if detail.is_empty() {
            *detail = msg;
        }
    };

    for types in &by_sort {
        for a in types {
            cases += 1;
            if subtype(a, a) != Ok(true) {
                fail(
                    format!("reflexivity fails on {a}"),
                    &mut failures,
                    &mut detail,
                );
            }
            for b in types {
                cases += 1;
                let decided = subtype(a, b).expect("same sort");
                let axiomatic = subtype_oracle(&to_raw(a), &to_raw(b), ORACLE_DEPTH);
                if decided != axiomatic {
                    fail(
                        format!("decision={decided} oracle={axiomatic} on {a} <= {b}"),
                        &mut failures,
                        &mut detail,
                    );
                }
                if type_equiv(a, b).expect("same sort") != (a == b) {
                    fail(
                        format!("equivalence/canonical mismatch on {a} and {b}"),
                        &mut failures,
                        &mut detail,
                    );
                }
            }
        }
    }

    // Domain anti-monotonicity on the store sort.
    let store_types = &by_sort[1];
    for a in store_types {
        for b in store_types {
            if subtype(a, b) == Ok(true) {
                cases += 1;
                let (AnyType::S(sa), AnyType::S(sb)) = (a, b) else {
                    unreachable!()
                };
                if !dom_sigma(sa).is_superset(&dom_sigma(sb)) {
                    fail(
                        format!("dom({a}) does not contain dom({b})"),
                        &mut failures,
                        &mut detail,
                    );
                }
            }
        }
    }

    // Random deeper pairs: oracle agreement and transitivity.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sorts = [Sort::Value, Sort::Store, Sort::Result, Sort::Comp];
    for i in 0..5000usize {
        let sort = sorts[i % 4];
        let a = rand_type(&mut rng, sort, 4, &locs);
        let b = rand_type(&mut rng, sort, 4, &locs);
        cases += 1;
        let decided = subtype(&a, &b).expect("same sort");
        let axiomatic = subtype_oracle(&to_raw(&a), &to_raw(&b), ORACLE_DEPTH);
        if decided != axiomatic {
            fail(
                format!("random pair: decision={decided} oracle={axiomatic} on {a} <= {b}"),
                &mut failures,
                &mut detail,
            );
        }
        if type_equiv(&a, &b).expect("same sort") != (a == b) {
            fail(
                format!("random pair: equivalence/canonical mismatch on {a} and {b}"),
                &mut failures,
                &mut detail,
            );
        }
        let c = rand_type(&mut rng, sort, 4, &locs);
        if subtype(&a, &b) == Ok(true) && subtype(&b, &c) == Ok(true) && subtype(&a, &c) != Ok(true)
        {
            fail(
                format!("transitivity fails on {a} <= {b} <= {c}"),
                &mut failures,
                &mut detail,
            );
        }
    }
    report("subtyping", start, cases, failures, detail)
}

// ---------------------------------------------------------------------------
// Converging-term corpus shared by suites 4, 5, and 7
// ---------------------------------------------------------------------------

/// Generates closed terms until `want` of them converge from the empty
/// store, certifying each.
pub fn certificate_corpus(seed: u64, want: usize, fuel: usize) -> Vec<Certificate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let locs = three_locations();
    let mut out = Vec::new();
    let mut toggle = false;
    while out.len() < want {
        let size = rng.random_range(3..=20);
        // Alternate between free-form terms and read-after-write ones, so
        // the corpus mixes trivial and deep traces.
        let m = if toggle {
            rand_closed_comp(&mut rng, size, &locs)
        } else {
            crate::enumgen::rand_convergent_candidate(&mut rng, size, &locs)
        };
        toggle = !toggle;
        if let Ok(cert) = certify_convergence(&m, fuel) {
            out.push(cert);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// 4. subject reduction along certified traces
// ---------------------------------------------------------------------------

/// For 500 convergence certificates, replay the trace forward: every
/// transported derivation checks and keeps the result type.
pub fn subject_reduction_suite(seed: u64) -> SuiteReport {
    let start = Instant::now();
    let certs = certificate_corpus(seed, 500, 500);
    let mut failures = 0;
    let mut cases = 0;
    let mut detail = String::new();
    for cert in &certs {
        let store_d = Derivation::omega(Context::empty(), Subject::Store(StoreTerm::Emp));
        let mut d = Derivation::conf(cert.derivation.clone(), store_d);
        let kappa = d.conclusion.ty.clone();
        let mut ok = check_derivation(&d).is_ok();
        for next in cert.trace.iter().skip(1) {
            if !ok {
                break;
            }
            match preserve_step(&d, next) {
                Ok(next_d) => {
                    d = next_d;
                    ok = check_derivation(&d).is_ok()
                        && type_equiv(&d.conclusion.ty, &kappa) == Ok(true);
                }
                Err(e) => {
                    ok = false;
                    if detail.is_empty() {
                        detail = format!("preservation failed: {e}");
                    }
                }
            }
            cases += 1;
        }
        if !ok {
            failures += 1;
            if detail.is_empty() {
                detail = format!("failed on term {:?}", cert.term);
            }
        }
    }
    report(
        "subject-reduction",
        start,
        cases.max(certs.len()),
        failures,
        detail,
    )
}

// ---------------------------------------------------------------------------
// 5. subject expansion and the characterization of convergence
// ---------------------------------------------------------------------------

/// 500 generated converging closed terms receive checked certificates at
/// `wS -> wD x wS`; the divergent and blocked exemplars admit no such
/// typing within the search depth and fail the membership test.
pub fn characterization_suite(seed: u64) -> SuiteReport {
    let start = Instant::now();
    let mut failures = 0;
    let mut detail = String::new();
    let certs = certificate_corpus(seed.wrapping_add(1), 500, 500);
    let mut cases = certs.len();
    for cert in &certs {
        let good = check_derivation(&cert.derivation).is_ok()
            && cert.derivation.conclusion.ty == AnyType::T(CompType::convergent())
            && cert.derivation.conclusion.ctx.is_empty();
        if !good {
            failures += 1;
            if detail.is_empty() {
                detail = format!("bad certificate for {:?}", cert.term);
            }
        }
    }
    let budget = Budget::default();
    for (name, term) in [
        ("omega", Computation::omega()),
        (
            "blocked get",
            Computation::get(Location(0), "x", Computation::unit(Value::var("x"))),
        ),
    ] {
        cases += 2;
        if search_typing(&Context::empty(), &term, &CompType::convergent(), 6).is_some() {
            failures += 1;
            if detail.is_empty() {
                detail = format!("search found a convergent typing for {name}");
            }
        }
        if !member(
            &Entity::Comp(term.clone()),
            &AnyType::T(CompType::convergent()),
            &budget,
            seed,
        )
        .is_no()
        {
            failures += 1;
            if detail.is_empty() {
                detail = format!("membership did not reject {name}");
            }
        }
    }
    report("characterization", start, cases, failures, detail)
}

// ---------------------------------------------------------------------------
// 6. golden examples
// ---------------------------------------------------------------------------

/// The mutation trace, the sequencing trace, the two derivations built in
/// the text, and the two membership verdicts, reproduced exactly.
pub fn golden_suite(seed: u64) -> SuiteReport {
    let start = Instant::now();
    let mut failures = 0;
    let mut detail = String::new();
    let check = |name: &str, ok: bool, failures: &mut usize, detail: &mut String| {
        if !ok {
            *failures += 1;
            if detail.is_empty() {
                *detail = format!("golden example failed: {name}");
            }
        }
    };
    let l0 = Location(0);
    let v = Value::identity();
    let w = Value::lam(
        "y",
        Computation::bind(Computation::unit(Value::var("y")), Value::var("y")),
    );

    // Overriding: set W; set V; get returns V in exactly 3 steps, with the
    // raw store kept un-normalized along the trace.
    {
        let get = Computation::get(l0, "x", Computation::unit(Value::var("x")));
        let m = Computation::set(l0, w.clone(), Computation::set(l0, v.clone(), get.clone()));
        let (outcome, trace) = run(&Configuration::new(m, StoreTerm::Emp), 10).expect("closed");
        let s1 = StoreTerm::upd_val(l0, w.clone(), StoreTerm::Emp);
        let s2 = StoreTerm::upd_val(l0, v.clone(), s1.clone());
        let ok = matches!(
            &outcome,
            RunOutcome::Converged { value, store, steps: 3, .. }
                if alpha_eq_value(value, &v) && *store == s2
        ) && trace.len() == 4
            && trace[1].store == s1
            && trace[2] == Configuration::new(get, s2.clone())
            && store_eq(&s2, &StoreTerm::upd_val(l0, v.clone(), StoreTerm::Emp));
        check("overriding trace", ok, &mut failures, &mut detail);
    }

    // Sequencing: (set V; unit W) ; get binds the stored value, discarding W.
    {
        let n = Computation::unit(Value::var("x"));
        let m = Computation::bind(
            Computation::set(l0, v.clone(), Computation::unit(w.clone())),
            Value::Lam(
                Name::from("_"),
                Arc::new(Computation::get(l0, "x", n.clone())),
            ),
        );
        let (_, trace) = run(&Configuration::new(m, StoreTerm::Emp), 10).expect("closed");
        let expected_store = StoreTerm::upd_val(l0, v.clone(), StoreTerm::Emp);
        let ok = trace.len() >= 4
            && trace[3] == Configuration::new(Computation::unit(v.clone()), expected_store);
        check("sequencing trace", ok, &mut failures, &mut detail);
    }

    // The bind/lambda expansion of the sequenced set-unit-get derivation.
    {
        let d = invariance_figure_derivation();
        let ok = check_derivation(&d).is_ok();
        check("sequencing derivation", ok, &mut failures, &mut detail);
        // Close it off against a store typed at sigma.
        let store = StoreTerm::upd_val(Location(1), w.clone(), StoreTerm::Emp);
        let sigma = StoreType::entry(Location(1), ValueType::top());
        let ds = type_store_at(&Context::empty(), &store, &sigma, &mut |_, seen| {
            Some(Derivation::omega(
                Context::empty(),
                Subject::Val(seen.clone()),
            ))
        })
        .expect("store matches sigma");
        let conf = Derivation::conf(d, ds);
        check(
            "sequencing configuration",
            check_derivation(&conf).is_ok(),
            &mut failures,
            &mut detail,
        );
    }

    // The dual set/get derivation at the convergence type.
    {
        let x = Name::from("x");
        let inner_ctx = Context::empty()
            .extended(x.clone(), ValueType::top())
            .unwrap();
        let unit_x = Derivation::unit(Derivation::var(inner_ctx, x.clone()), StoreType::Top);
        let get = Derivation::get(l0, x, unit_x);
        let dv = Derivation::omega(Context::empty(), Subject::Val(v.clone()));
        let set_get = Derivation::set(l0, dv, get);
        let ok = check_derivation(&set_get).is_ok()
            && set_get.conclusion.ty == AnyType::T(CompType::convergent());
        check("dual set/get derivation", ok, &mut failures, &mut detail);
    }

    // Membership of the identity, and non-membership of the constant
    // divergence, in the total function type.
    {
        let ty = AnyType::D(ValueType::arrow(ValueType::top(), CompType::convergent()));
        let budget = Budget::default();
        let yes = member(&Entity::Val(Value::identity()), &ty, &budget, seed);
        check(
            "identity membership",
            yes.is_yes(),
            &mut failures,
            &mut detail,
        );
        let no = member(
            &Entity::Val(Value::lam("x", Computation::omega())),
            &ty,
            &budget,
            seed,
        );
        check(
            "divergent-body non-membership",
            no.is_no(),
            &mut failures,
            &mut detail,
        );
    }

    report("golden", start, 7, failures, detail)
}

/// The derivation of `set[l0](V). unit W ; get[l0](\x. unit x)` at
/// `s -> wD x s` for `s = <l1 : wD>`, with the sequencing sugar expanded
/// into bind and lambda nodes.
fn invariance_figure_derivation() -> Derivation {
    let l0 = Location(0);
    let wd = ValueType::top();
    let sigma = StoreType::entry(Location(1), wd.clone());
    let v = Value::identity();
    let w = Value::lam(
        "y",
        Computation::bind(Computation::unit(Value::var("y")), Value::var("y")),
    );
    // set[l0](V). unit W : sigma -> wD x (<l0:wD> /\ sigma)
    let d_v = Derivation::omega(Context::empty(), Subject::Val(v));
    let src = StoreType::entry(l0, wd.clone()).meet(&sigma);
    let d_w = Derivation::omega(Context::empty(), Subject::Val(w));
    let unit_w = Derivation::unit(d_w, src.clone());
    let set_node = Derivation::set(l0, d_v, unit_w);
    // \_. get[l0](\x. unit x) : wD -> (<l0:wD> /\ sigma) -> wD x sigma
    let dummy = Name::from("_");
    let x = Name::from("x");
    let ctx_dummy = Context::empty()
        .extended(dummy.clone(), wd.clone())
        .unwrap();
    let ctx_inner = ctx_dummy.extended(x.clone(), wd.clone()).unwrap();
    let unit_x = Derivation::unit(Derivation::var(ctx_inner, x.clone()), sigma.clone());
    let get_node = Derivation::get(l0, x, unit_x);
    let lam_node = Derivation::lam(dummy, get_node);
    Derivation::bind(set_node, lam_node)
}

// ---------------------------------------------------------------------------
// 7. interpretation soundness falsifier
// ---------------------------------------------------------------------------

/// 200 sub-derivations sampled from the certificate corpus, each fed with
/// sampled closing substitutions: the falsifier finds no counterexample.
pub fn interp_soundness_suite(seed: u64) -> SuiteReport {
    let start = Instant::now();
    let budget = Budget {
        max_samples: 50,
        fuel: 500,
        max_term_size: 8,
    };
    let certs = certificate_corpus(seed.wrapping_add(2), 60, 500);
    let mut pool = Vec::new();
    for cert in &certs {
        collect_comp_judgments(&cert.derivation, &mut pool);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut detail = String::new();
    let cases = 200;
    for i in 0..cases {
        let d = &pool[rng.random_range(0..pool.len())];
        match falsify_comp_soundness(d, &budget, seed.wrapping_add(i as u64)) {
            Ok(Falsification::None) => {}
            Ok(Falsification::Counterexample { witness, .. }) => {
                failures += 1;
                if detail.is_empty() {
                    detail = format!("counterexample: {}", witness.reason);
                }
            }
            Err(e) => {
                failures += 1;
                if detail.is_empty() {
                    detail = format!("invalid instance: {e:?}");
                }
            }
        }
    }
    report("interp-soundness", start, cases, failures, detail)
}

fn collect_comp_judgments(d: &Derivation, out: &mut Vec<Derivation>) {
    if matches!(d.conclusion.subject, Subject::Comp(_)) {
        out.push(d.clone());
    }
    for p in &d.premises {
        collect_comp_judgments(p, out);
    }
}

// ---------------------------------------------------------------------------
// 8. store typings are stable under derivable equality
// ---------------------------------------------------------------------------

/// 500 sampled store typings: every store derivably equal to the typed one
/// (drawn from the size <= 6 enumeration) types at the same store type.
pub fn store_type_stability_suite(seed: u64) -> SuiteReport {
    let start = Instant::now();
    let stores = enumerate_stores(6, &two_locations(), &fixed_values());
    // Group the enumeration by equality class.
    let mut classes: BTreeMap<StoreTerm, Vec<&StoreTerm>> = BTreeMap::new();
    for s in &stores {
        classes.entry(canonical_key(s)).or_default().push(s);
    }
    let id_type = ValueType::arrow(ValueType::top(), CompType::convergent());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut detail = String::new();
    let mut cases = 0;
    while cases < 500 {
        for s in &stores {
            if cases >= 500 {
                break;
            }
            let dom = crate::store::dom_store(s);
            if dom.is_empty() {
                continue;
            }
            cases += 1;
            // Entry types: the identity sometimes gets its functional type,
            // everything else the trivial one.
            let mut entry_types = std::collections::BTreeMap::new();
            for l in &dom {
                let resolved = crate::store::resolve_lookup(*l, s).expect("domain");
                let rich = rng.random_bool(0.5) && alpha_eq_value(&resolved, &Value::identity());
                entry_types.insert(
                    *l,
                    if rich {
                        id_type.clone()
                    } else {
                        ValueType::top()
                    },
                );
            }
            let sigma = StoreType::from_entries(entry_types);
            let typing = type_store_at(&Context::empty(), s, &sigma, &mut |_, seen| {
                if alpha_eq_value(seen, &Value::identity()) {
                    Some(identity_typing())
                } else {
                    Some(Derivation::omega(
                        Context::empty(),
                        Subject::Val(seen.clone()),
                    ))
                }
            })
            .expect("sigma constrains only the domain");
            if check_derivation(&typing).is_err() {
                failures += 1;
                if detail.is_empty() {
                    detail = format!("seed store typing fails to check on {s:?}");
                }
                continue;
            }
            let entries = invert_store(&typing);
            for t in &classes[&canonical_key(s)] {
                let ok = retype_equal_store(&Context::empty(), t, &sigma, &entries)
                    .map(|d| check_derivation(&d).is_ok())
                    .unwrap_or(false);
                if !ok {
                    failures += 1;
                    if detail.is_empty() {
                        detail = format!("equal store fails the typing: {s:?} = {t:?} at {sigma}");
                    }
                }
            }
        }
    }
    report("store-type-stability", start, cases, failures, detail)
}

/// The canonical representative of a store's equality class.
fn canonical_key(s: &StoreTerm) -> StoreTerm {
    let nf = normal_form(s);
    fn canon(s: &StoreTerm) -> StoreTerm {
        match s {
            StoreTerm::Emp => StoreTerm::Emp,
            StoreTerm::Upd(l, u, rest) => {
                let u = match u {
                    crate::store::LookupTerm::Val(v) => {
                        crate::store::LookupTerm::Val(crate::syntax::canonical_rename_value(v))
                    }
                    other => other.clone(),
                };
                StoreTerm::Upd(*l, u, Arc::new(canon(rest)))
            }
        }
    }
    canon(&nf)
}

/// `|- \x. unit x : wD -> wS -> wD x wS`.
fn identity_typing() -> Derivation {
    let x = Name::from("x");
    let ctx = Context::empty()
        .extended(x.clone(), ValueType::top())
        .unwrap();
    Derivation::lam(
        x.clone(),
        Derivation::unit(Derivation::var(ctx, x), StoreType::Top),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_suite_passes() {
        let r = golden_suite(7);
        assert!(r.passed, "{}", r.line());
    }
}
