//! Budgeted, sampled membership in the term-level interpretation of types.
//!
//! Types denote sets of closed terms: `wD` is all closed values and
//! `d -> t` the values `V` with `unit W >>= V` in the set of `t` for every
//! `W` in the set of `d`; `<l : d>` is the stores resolving `l` to a value
//! in the set of `d`; `d x s` the results built componentwise, never the
//! undefined outcome; `s -> k` the computations sending every store in the
//! set of `s` to an outcome in the set of `k`; intersections intersect.
//!
//! Arrow memberships quantify over infinite sets, so the test samples
//! candidate values and stores within an explicit budget and reports
//! whether the explored slice was exhaustive. Evaluations that run out of
//! fuel count as undefined outcomes, which is conservative toward `No` for
//! product types; the budget travels with the verdict so any `No` witness
//! can be re-run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::enumgen::enumerate_closed_values;
use crate::eval::{run, Configuration, RunOutcome};
use crate::store::{resolve_lookup, StoreTerm};
use crate::syntax::{substitute, Computation, Location, Value};
use crate::types::{AnyType, CompType, ResultType, StoreType, ValueType};
use crate::typing::{check_derivation, Derivation, Subject};

/// Sampling and evaluation limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_samples: usize,
    pub fuel: usize,
    pub max_term_size: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_samples: 50,
            fuel: 500,
            max_term_size: 8,
        }
    }
}

/// What a membership check may answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MembershipVerdict {
    /// No counterexample found; `exhaustive` records whether every
    /// candidate of the explored slice was covered.
    Yes { exhaustive: bool },
    /// A re-runnable counterexample.
    No(Box<Counterexample>),
    /// The budget produced no candidates to test.
    Unknown,
}

impl MembershipVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, MembershipVerdict::Yes { .. })
    }

    pub fn is_no(&self) -> bool {
        matches!(self, MembershipVerdict::No(_))
    }
}

/// The trail leading to a failed membership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub steps: Vec<Probe>,
    pub reason: String,
}

/// One probe of the failing run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Probe {
    /// The candidate argument fed to an arrow membership.
    AppliedValue(Value),
    /// The store a computation membership ran on.
    RanOnStore(StoreTerm),
    /// The store entry that failed.
    AtLocation(Location),
}

/// The kinds of entity a membership test accepts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entity {
    Val(Value),
    Comp(Computation),
    Store(StoreTerm),
}

fn no(reason: impl Into<String>) -> MembershipVerdict {
    MembershipVerdict::No(Box::new(Counterexample {
        steps: Vec::new(),
        reason: reason.into(),
    }))
}

fn push_probe(v: MembershipVerdict, probe: Probe) -> MembershipVerdict {
    match v {
        MembershipVerdict::No(mut c) => {
            c.steps.insert(0, probe);
            MembershipVerdict::No(c)
        }
        other => other,
    }
}

fn conj(parts: impl IntoIterator<Item = MembershipVerdict>) -> MembershipVerdict {
    let mut exhaustive = true;
    let mut unknown = false;
    for p in parts {
        match p {
            MembershipVerdict::No(c) => return MembershipVerdict::No(c),
            MembershipVerdict::Unknown => unknown = true,
            MembershipVerdict::Yes { exhaustive: e } => exhaustive &= e,
        }
    }
    if unknown {
        MembershipVerdict::Unknown
    } else {
        MembershipVerdict::Yes { exhaustive }
    }
}

/// Membership of an entity in the set of a type of the matching sort.
pub fn member(entity: &Entity, ty: &AnyType, b: &Budget, seed: u64) -> MembershipVerdict {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match (entity, ty) {
        (Entity::Val(v), AnyType::D(d)) => member_value(v, d, b, &mut rng),
        (Entity::Comp(m), AnyType::T(t)) => member_comp(m, t, b, &mut rng),
        (Entity::Store(s), AnyType::S(st)) => member_store(s, st, b, &mut rng),
        _ => no(format!("entity does not match the sort {}", ty.sort())),
    }
}

fn member_value(v: &Value, d: &ValueType, b: &Budget, rng: &mut ChaCha8Rng) -> MembershipVerdict {
    if d.is_top() {
        return MembershipVerdict::Yes { exhaustive: true };
    }
    let mut parts = Vec::new();
    for (src, tgt) in d.arrows() {
        let (candidates, complete) = gen_values(src, b, rng);
        if candidates.is_empty() {
            parts.push(MembershipVerdict::Unknown);
            continue;
        }
        let mut arrow_parts = Vec::new();
        for w in &candidates {
            let applied = Computation::bind(Computation::Unit(w.clone()), v.clone());
            let verdict = member_comp(&applied, tgt, b, rng);
            arrow_parts.push(push_probe(verdict, Probe::AppliedValue(w.clone())));
        }
        let combined = conj(arrow_parts);
        parts.push(match combined {
            MembershipVerdict::Yes { exhaustive } => MembershipVerdict::Yes {
                exhaustive: exhaustive && complete,
            },
            other => other,
        });
    }
    conj(parts)
}

fn member_comp(
    m: &Computation,
    t: &CompType,
    b: &Budget,
    rng: &mut ChaCha8Rng,
) -> MembershipVerdict {
    if t.is_top() {
        return MembershipVerdict::Yes { exhaustive: true };
    }
    let mut parts = Vec::new();
    for (src, tgt) in t.arrows() {
        let (stores, complete) = gen_stores(src, b, rng);
        if stores.is_empty() {
            parts.push(MembershipVerdict::Unknown);
            continue;
        }
        let mut arrow_parts = Vec::new();
        for s in &stores {
            let outcome = run(&Configuration::new(m.clone(), s.clone()), b.fuel)
                .expect("membership entities are closed");
            let verdict = match outcome.0 {
                RunOutcome::Converged { value, store, .. } => {
                    member_result(Some((&value, &store)), tgt, b, rng)
                }
                RunOutcome::Blocked { .. } => member_result(None, tgt, b, rng)
                    .and_reason("the run blocked, an undefined outcome"),
                RunOutcome::FuelExhausted { .. } => member_result(None, tgt, b, rng)
                    .and_reason("the run exhausted its fuel, treated as undefined"),
            };
            arrow_parts.push(push_probe(verdict, Probe::RanOnStore(s.clone())));
        }
        let combined = conj(arrow_parts);
        parts.push(match combined {
            MembershipVerdict::Yes { exhaustive } => MembershipVerdict::Yes {
                exhaustive: exhaustive && complete,
            },
            other => other,
        });
    }
    conj(parts)
}

impl MembershipVerdict {
    fn and_reason(self, why: &str) -> MembershipVerdict {
        match self {
            MembershipVerdict::No(mut c) => {
                c.reason = why.to_string();
                MembershipVerdict::No(c)
            }
            other => other,
        }
    }
}

/// Results are pairs or the undefined outcome `None`.
fn member_result(
    r: Option<(&Value, &StoreTerm)>,
    k: &ResultType,
    b: &Budget,
    rng: &mut ChaCha8Rng,
) -> MembershipVerdict {
    match k {
        ResultType::Top => MembershipVerdict::Yes { exhaustive: true },
        ResultType::Prod(d, s) => match r {
            None => no("an undefined outcome never inhabits a product"),
            Some((v, t)) => conj([member_value(v, d, b, rng), member_store(t, s, b, rng)]),
        },
    }
}

fn member_store(
    s: &StoreTerm,
    st: &StoreType,
    b: &Budget,
    rng: &mut ChaCha8Rng,
) -> MembershipVerdict {
    match st.entries() {
        None => MembershipVerdict::Yes { exhaustive: true },
        Some(entries) => {
            let mut parts = Vec::new();
            for (l, d) in entries {
                let part = match resolve_lookup(*l, s) {
                    Err(_) => no(format!("location {l} is outside the store's domain")),
                    Ok(v) => member_value(&v, d, b, rng),
                };
                parts.push(push_probe(part, Probe::AtLocation(*l)));
            }
            conj(parts)
        }
    }
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Closed values inhabiting `d`, drawn from the size-bounded enumeration and
/// filtered by membership; the flag reports whether the filtered slice was
/// covered completely.
pub fn gen_values(d: &ValueType, b: &Budget, rng: &mut ChaCha8Rng) -> (Vec<Value>, bool) {
    let locs = locations_of_value(d);
    let (all, complete) = enumerate_closed_values(b.max_term_size, &locs, 4 * b.max_samples);
    let mut kept = Vec::new();
    let mut fully_filtered = complete;
    for v in all {
        if d.is_top() {
            kept.push(v);
            continue;
        }
        match member_value(&v, d, b, rng) {
            MembershipVerdict::Yes { .. } => kept.push(v),
            MembershipVerdict::No(_) => {}
            MembershipVerdict::Unknown => fully_filtered = false,
        }
        if kept.len() >= b.max_samples {
            fully_filtered = false;
            break;
        }
    }
    (kept, fully_filtered)
}

/// Closed stores inhabiting `sigma`, built entry by entry from value
/// generators, with up to two extra unconstrained locations. The empty
/// store comes first for the trivial store type.
pub fn gen_stores(sigma: &StoreType, b: &Budget, rng: &mut ChaCha8Rng) -> (Vec<StoreTerm>, bool) {
    match sigma.entries() {
        None => {
            let mut out = vec![StoreTerm::Emp];
            // A couple of arbitrary extensions of the empty store.
            let locs = [Location(0), Location(1)];
            for i in 0..2usize {
                let s = crate::enumgen::rand_closed_store(rng, i + 1, &locs);
                if !out.contains(&s) {
                    out.push(s);
                }
            }
            (out, false)
        }
        Some(entries) => {
            let mut choices: Vec<(Location, Vec<Value>)> = Vec::new();
            let mut complete = true;
            for (l, d) in entries {
                let (vals, c) = gen_values(d, b, rng);
                if vals.is_empty() {
                    return (Vec::new(), false);
                }
                complete &= c;
                choices.push((*l, vals));
            }
            let mut out = Vec::new();
            let mut counter = 0usize;
            build_stores(
                &choices,
                StoreTerm::Emp,
                &mut out,
                b.max_samples,
                &mut counter,
            );
            if counter >= b.max_samples {
                complete = false;
            }
            // Extra unconstrained locations exercise record weakening.
            let mut extended = Vec::new();
            for (i, s) in out.iter().enumerate() {
                if i % 3 == 0 {
                    let fresh = fresh_location(sigma);
                    extended.push(StoreTerm::upd_val(fresh, Value::identity(), s.clone()));
                }
            }
            out.extend(extended);
            out.truncate(b.max_samples.max(1));
            (out, complete)
        }
    }
}

fn build_stores(
    choices: &[(Location, Vec<Value>)],
    acc: StoreTerm,
    out: &mut Vec<StoreTerm>,
    cap: usize,
    counter: &mut usize,
) {
    if *counter >= cap {
        return;
    }
    match choices.split_first() {
        None => {
            out.push(acc);
            *counter += 1;
        }
        Some(((l, vals), rest)) => {
            for v in vals {
                build_stores(
                    rest,
                    StoreTerm::upd_val(*l, v.clone(), acc.clone()),
                    out,
                    cap,
                    counter,
                );
                if *counter >= cap {
                    return;
                }
            }
        }
    }
}

fn fresh_location(sigma: &StoreType) -> Location {
    let max = sigma
        .entries()
        .and_then(|m| m.keys().map(|l| l.0).max())
        .unwrap_or(0);
    Location(max + 1)
}

fn locations_of_value(d: &ValueType) -> Vec<Location> {
    let mut out = vec![Location(0)];
    fn walk_value(d: &ValueType, out: &mut Vec<Location>) {
        for (src, tgt) in d.arrows() {
            walk_value(src, out);
            for (s, k) in tgt.arrows() {
                walk_store(s, out);
                if let ResultType::Prod(dd, ss) = k {
                    walk_value(dd, out);
                    walk_store(ss, out);
                }
            }
        }
    }
    fn walk_store(s: &StoreType, out: &mut Vec<Location>) {
        if let Some(m) = s.entries() {
            for (l, dd) in m {
                out.push(*l);
                walk_value(dd, out);
            }
        }
    }
    walk_value(d, &mut out);
    out.sort();
    out.dedup();
    out
}

// ---------------------------------------------------------------------------
// Falsifier for the soundness of typings w.r.t. the interpretation
// ---------------------------------------------------------------------------

/// Outcome of trying to falsify the interpretation soundness of a
/// computation typing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Falsification {
    None,
    Counterexample {
        substitution: Vec<(crate::syntax::Name, Value)>,
        witness: Counterexample,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FalsifyError {
    InputInvalid(String),
}

/// Samples closing substitutions compatible with the context and tests the
/// substituted term against the derivation's type. Returns the first
/// counterexample found, if any; soundness of the system says there is
/// none.
pub fn falsify_comp_soundness(
    d: &Derivation,
    b: &Budget,
    seed: u64,
) -> Result<Falsification, FalsifyError> {
    if let Err(e) = check_derivation(d) {
        return Err(FalsifyError::InputInvalid(e.to_string()));
    }
    let Subject::Comp(m) = &d.conclusion.subject else {
        return Err(FalsifyError::InputInvalid(
            "expected a computation judgment".into(),
        ));
    };
    let AnyType::T(tau) = &d.conclusion.ty else {
        return Err(FalsifyError::InputInvalid(
            "expected a computation type".into(),
        ));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ctx: Vec<(crate::syntax::Name, ValueType)> = d
        .conclusion
        .ctx
        .iter()
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    let mut pools = Vec::new();
    for (x, delta) in &ctx {
        let (vals, _) = gen_values(delta, b, &mut rng);
        if vals.is_empty() {
            // No inhabitants within budget; the instance is vacuous.
            return Ok(Falsification::None);
        }
        pools.push((x.clone(), vals));
    }
    let combos = if pools.is_empty() { 1 } else { b.max_samples };
    for _ in 0..combos {
        let mut substitution = Vec::new();
        let mut term = m.clone();
        for (x, vals) in &pools {
            let v = vals[rng.random_range(0..vals.len())].clone();
            term = substitute(&term, x, &v);
            substitution.push((x.clone(), v));
        }
        let verdict = member_comp(&term, tau, b, &mut rng);
        if let MembershipVerdict::No(c) = verdict {
            return Ok(Falsification::Counterexample {
                substitution,
                witness: *c,
            });
        }
    }
    Ok(Falsification::None)
}
