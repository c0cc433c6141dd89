//! Type invariance along reduction steps, as derivation transformers.
//!
//! [`preserve_step`] maps a derivation of `G |- (M, s) : k` across the
//! unique step `(M, s) -> (N, t)` to one of `G |- (N, t) : k`;
//! [`expand_step`] goes the other way. Both follow the constructive proofs
//! case by case: the beta case goes through derivation-level substitution
//! and expansion; the get case moves value typings between the store typing
//! and the bound variable; the set case splits on whether the conclusion
//! constrains the written location; the bind-context case recurses on the
//! inner step and reassembles the surrounding bind node.
//!
//! When the claimed result type is the trivial `wC` the transported
//! derivation is a single omega node.

use std::fmt;

use crate::eval::{step_raw, Configuration, StepOutcome};
use crate::store::{resolve_lookup, StoreTerm};
use crate::syntax::{Computation, Value};
use crate::types::{subtype_store, subtype_value, AnyType, CompType, ResultType, StoreType};
use crate::typing::invert::{
    invert_bind, invert_conf, invert_get, invert_set, invert_store, invert_unit,
};
use crate::typing::stores::type_store_at;
use crate::typing::subst::{align, expand_unchecked, subst_unchecked};
use crate::typing::{check_derivation, Derivation, Subject};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepError {
    /// The input derivation does not check, or is not a configuration
    /// judgment.
    InputInvalid(String),
    /// The claimed step is not the reduction step of the subject.
    NotAStep,
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepError::InputInvalid(s) => write!(f, "invalid input derivation: {s}"),
            StepError::NotAStep => write!(f, "the supplied step is not the actual reduction"),
        }
    }
}

impl std::error::Error for StepError {}

fn subject_config(d: &Derivation) -> Result<Configuration, StepError> {
    match &d.conclusion.subject {
        Subject::Config(m, s) => Ok(Configuration::new(m.clone(), s.clone())),
        _ => Err(StepError::InputInvalid(
            "expected a configuration judgment".into(),
        )),
    }
}

/// Carries `G |- (M, s) : k` across `(M, s) -> (N, t)`.
pub fn preserve_step(d: &Derivation, target: &Configuration) -> Result<Derivation, StepError> {
    if let Err(e) = check_derivation(d) {
        return Err(StepError::InputInvalid(e.to_string()));
    }
    let source = subject_config(d)?;
    match step_raw(&source) {
        StepOutcome::Next(actual) if actual == *target => {}
        _ => return Err(StepError::NotAStep),
    }
    let out = preserve_unchecked(d, target);
    Ok(out)
}

/// Carries `G |- (N, t) : k` backwards across `(M, s) -> (N, t)`.
pub fn expand_step(d: &Derivation, source: &Configuration) -> Result<Derivation, StepError> {
    if let Err(e) = check_derivation(d) {
        return Err(StepError::InputInvalid(e.to_string()));
    }
    let target = subject_config(d)?;
    match step_raw(source) {
        StepOutcome::Next(actual) if actual == target => {}
        _ => return Err(StepError::NotAStep),
    }
    let out = expand_unchecked_step(d, source);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Forward direction
// ---------------------------------------------------------------------------

fn preserve_unchecked(d: &Derivation, target: &Configuration) -> Derivation {
    let kappa = d.conclusion.ty.clone();
    let ctx = d.conclusion.ctx.clone();
    let tsubj = Subject::Config(target.comp.clone(), target.store.clone());
    if kappa.is_top() {
        return Derivation::omega(ctx, tsubj);
    }
    let source = subject_config(d).expect("checked configuration judgment");
    let mut per_conf = Vec::new();
    for (dm, ds) in invert_conf(d) {
        per_conf.push(preserve_at_conf(&dm, &ds, &source, target));
    }
    assert!(
        !per_conf.is_empty(),
        "a non-trivial configuration typing must contain a conf node"
    );
    let combined = Derivation::inter(per_conf).sub(kappa);
    align(&combined, &tsubj).expect("transported subject is alpha-equal")
}

/// One conf family: `dm : G |- M : s_i -> k_i`, `ds : G |- s : s_i`.
fn preserve_at_conf(
    dm: &Derivation,
    ds: &Derivation,
    source: &Configuration,
    target: &Configuration,
) -> Derivation {
    let (sigma_i, kappa_i) = single_arrow_of(dm);
    match &source.comp {
        // beta: unit W >>= \x. B
        Computation::Bind(m0, fun) if matches!(**m0, Computation::Unit(_)) => {
            let Computation::Unit(w) = &**m0 else {
                unreachable!()
            };
            let Value::Lam(x, _) = fun else {
                unreachable!("closed function positions are abstractions")
            };
            let mut contributions = Vec::new();
            for (p_unit, p_lam) in invert_bind(dm) {
                let (sigma_j, mid_j) = single_arrow_of(&p_unit);
                if !subtype_store(&sigma_i, &sigma_j) {
                    continue;
                }
                let ResultType::Prod(delta_j, _) = mid_j else {
                    unreachable!("bind first premise target is a product")
                };
                // Typings of W from the unit nodes applicable at sigma_j.
                let mut w_parts = Vec::new();
                for (d_w, sigma_k) in invert_unit(&p_unit) {
                    if subtype_store(&sigma_j, &sigma_k) {
                        w_parts.push(d_w);
                    }
                }
                assert!(
                    !w_parts.is_empty(),
                    "unit inversion is nonempty below a product"
                );
                let d_w = Derivation::inter(w_parts).sub(AnyType::D(delta_j.clone()));
                // Typings of the body from the lambda nodes applicable at
                // delta_j.
                let mut body_parts = Vec::new();
                for d_body in crate::typing::invert::invert_lam(&p_lam) {
                    let dm_ty = d_body
                        .conclusion
                        .ctx
                        .get(x)
                        .expect("lambda premise binds the binder")
                        .clone();
                    if !subtype_value(&delta_j, &dm_ty) {
                        continue;
                    }
                    let d_w_m = d_w.clone().sub(AnyType::D(dm_ty));
                    body_parts.push(subst_unchecked(&d_body, x, w, &d_w_m));
                }
                assert!(
                    !body_parts.is_empty(),
                    "lambda inversion is nonempty below an arrow"
                );
                let contribution = Derivation::inter(body_parts).sub(AnyType::T(CompType::arrow(
                    sigma_i.clone(),
                    bind_target(&p_lam),
                )));
                contributions.push(contribution);
            }
            finish_conf(contributions, ds, sigma_i, kappa_i)
        }
        // bind context: M0 >>= V with an inner step
        Computation::Bind(m0, _) => {
            let inner_target = Configuration::new(
                match &target.comp {
                    Computation::Bind(n0, _) => (**n0).clone(),
                    _ => unreachable!("bind context steps to a bind"),
                },
                target.store.clone(),
            );
            let mut contributions = Vec::new();
            for (p_m0, p_v) in invert_bind(dm) {
                let (sigma_j, mid_j) = single_arrow_of(&p_m0);
                if !subtype_store(&sigma_i, &sigma_j) {
                    continue;
                }
                let inner_conf = Derivation::conf(
                    p_m0.clone()
                        .sub(AnyType::T(CompType::arrow(sigma_i.clone(), mid_j.clone()))),
                    ds.clone(),
                );
                debug_assert_eq!(
                    inner_conf.conclusion.subject,
                    Subject::Config((**m0).clone(), source.store.clone())
                );
                let inner_out = preserve_unchecked(&inner_conf, &inner_target);
                let rebuilt = rebuild_bind(&inner_out, &p_v, &mid_j);
                contributions.push(rebuilt);
            }
            finish_conf(contributions, ds, sigma_i, kappa_i)
        }
        // get: substitute the store's value for the bound variable
        Computation::Get(l, x, _) => {
            let v = resolve_lookup(*l, &source.store).expect("the step resolved this location");
            let entries = invert_store(ds);
            let mut contributions = Vec::new();
            for d_body in invert_get(dm) {
                let delta_j = d_body
                    .conclusion
                    .ctx
                    .get(x)
                    .expect("get premise binds the binder")
                    .clone();
                let (sigma_j, kappa_j) = single_arrow_of(&d_body);
                let required = StoreType::entry(*l, delta_j.clone()).meet(&sigma_j);
                if !subtype_store(&sigma_i, &required) {
                    continue;
                }
                let d_v = entries
                    .get(l)
                    .expect("sigma_i constrains the read location")
                    .clone()
                    .sub(AnyType::D(delta_j));
                let substituted = subst_unchecked(&d_body, x, &v, &d_v);
                contributions.push(substituted.sub(AnyType::T(CompType::arrow(
                    sigma_i.clone(),
                    kappa_j.clone(),
                ))));
            }
            finish_conf(contributions, ds, sigma_i, kappa_i)
        }
        // set: retype the store under the pushed update
        Computation::Set(l, v, _) => {
            let entries = invert_store(ds);
            let ctx = dm.conclusion.ctx.clone();
            let mut contributions = Vec::new();
            for (d_v, d_cont) in invert_set(dm) {
                let (src_in, kappa_j) = single_arrow_of(&d_cont);
                let sigma_j = src_in.without(*l);
                if !subtype_store(&sigma_i, &sigma_j) {
                    continue;
                }
                let delta_j = src_in
                    .entries()
                    .and_then(|m| m.get(l))
                    .expect("set continuation constrains the written location")
                    .clone();
                // |- upd(l, V, s) : <l:d_j> /\ s_j, from the value premise
                // and the existing store typing.
                let new_store = StoreTerm::upd_val(*l, v.clone(), source.store.clone());
                let target_sigma = StoreType::entry(*l, delta_j).meet(&sigma_j);
                let d_v = d_v.clone();
                let d_t = type_store_at(&ctx, &new_store, &target_sigma, &mut |loc, _| {
                    if loc == *l {
                        Some(d_v.clone())
                    } else {
                        entries.get(&loc).cloned()
                    }
                })
                .expect("pushed update is typable at the continuation source");
                let conf = Derivation::conf(d_cont.clone(), d_t);
                contributions.push(conf.sub(AnyType::C(kappa_j.clone())));
            }
            // Here the contributions are configuration judgments already.
            assert!(
                !contributions.is_empty(),
                "set inversion is nonempty below an arrow"
            );
            Derivation::inter(contributions).sub(AnyType::C(kappa_i))
        }
        Computation::Unit(_) => unreachable!("results do not step"),
    }
}

/// Recombines computation-typed contributions into the stepped
/// configuration judgment at `k_i`.
fn finish_conf(
    contributions: Vec<Derivation>,
    ds: &Derivation,
    sigma_i: StoreType,
    kappa_i: ResultType,
) -> Derivation {
    assert!(
        !contributions.is_empty(),
        "an applicable arrow exists below a non-trivial target"
    );
    if let Subject::Config(_, _) = contributions[0].conclusion.subject {
        return Derivation::inter(contributions).sub(AnyType::C(kappa_i));
    }
    let m_typing =
        Derivation::inter(contributions).sub(AnyType::T(CompType::arrow(sigma_i, kappa_i.clone())));
    Derivation::conf(m_typing, ds.clone()).sub(AnyType::C(kappa_i))
}

/// The inner result type named by a bind function premise
/// `d' -> s' -> d'' x s''`.
fn bind_target(p_lam: &Derivation) -> ResultType {
    let AnyType::D(f) = &p_lam.conclusion.ty else {
        unreachable!("bind function premise carries a value type");
    };
    let [(_, inner)] = f.arrows() else {
        unreachable!("bind function premise is a single arrow");
    };
    let [(_, kappa)] = inner.arrows() else {
        unreachable!("bind function premise is curried");
    };
    kappa.clone()
}

/// Rebuilds the bind around a transported inner configuration derivation.
fn rebuild_bind(inner_out: &Derivation, p_v: &Derivation, mid_j: &ResultType) -> Derivation {
    let fams = invert_conf(inner_out);
    let kappa_v = bind_target(p_v);
    // The inner type is a product, hence non-trivial, hence concluded
    // through at least one conf node.
    assert!(
        !fams.is_empty(),
        "product-typed configurations have conf nodes"
    );
    let mut n0_parts = Vec::new();
    let mut t_parts = Vec::new();
    let mut sigma_t = StoreType::Top;
    for (q_n0, q_t) in fams {
        let AnyType::S(sp) = &q_t.conclusion.ty else {
            unreachable!("store premise carries a store type");
        };
        sigma_t = sigma_t.meet(sp);
        n0_parts.push(q_n0);
        t_parts.push(q_t);
    }
    let d_n0 = Derivation::inter(n0_parts)
        .sub(AnyType::T(CompType::arrow(sigma_t.clone(), mid_j.clone())));
    let d_t = Derivation::inter(t_parts);
    debug_assert_eq!(d_t.conclusion.ty, AnyType::S(sigma_t));
    let bind_node = Derivation::bind(d_n0, p_v.clone());
    Derivation::conf(bind_node, d_t).sub(AnyType::C(kappa_v))
}

fn single_arrow_of(d: &Derivation) -> (StoreType, ResultType) {
    let AnyType::T(t) = &d.conclusion.ty else {
        panic!("expected a computation typing, got {:?}", d.conclusion.ty);
    };
    let (s, k) = t
        .as_single_arrow()
        .expect("rule premises are single arrows");
    (s.clone(), k.clone())
}

// ---------------------------------------------------------------------------
// Backward direction
// ---------------------------------------------------------------------------

fn expand_unchecked_step(d: &Derivation, source: &Configuration) -> Derivation {
    let kappa = d.conclusion.ty.clone();
    let ctx = d.conclusion.ctx.clone();
    let ssubj = Subject::Config(source.comp.clone(), source.store.clone());
    if kappa.is_top() {
        return Derivation::omega(ctx, ssubj);
    }
    let mut per_conf = Vec::new();
    for (dn, dt) in invert_conf(d) {
        per_conf.push(expand_at_conf(&dn, &dt, source));
    }
    assert!(
        !per_conf.is_empty(),
        "a non-trivial configuration typing must contain a conf node"
    );
    let combined = Derivation::inter(per_conf).sub(kappa);
    align(&combined, &ssubj).expect("expanded subject is alpha-equal")
}

/// One conf family at the reduct: `dn : G |- N : s_i -> k_i`,
/// `dt : G |- t : s_i`; rebuilds the redex typing.
fn expand_at_conf(dn: &Derivation, dt: &Derivation, source: &Configuration) -> Derivation {
    let (sigma_i, kappa_i) = single_arrow_of(dn);
    let ctx = dn.conclusion.ctx.clone();
    match &source.comp {
        // beta: unit W >>= \x. B  <-  B[W/x]
        Computation::Bind(m0, fun) if matches!(**m0, Computation::Unit(_)) => {
            let Computation::Unit(w) = &**m0 else {
                unreachable!()
            };
            let Value::Lam(x, body) = fun else {
                unreachable!("closed function positions are abstractions")
            };
            let (_, d_w, d_b) =
                expand_unchecked(dn, body, x, w).expect("the reduct is the substituted body");
            let unit_node = Derivation::unit(d_w, sigma_i.clone());
            let lam_node = Derivation::lam(x.clone(), d_b);
            let bind_node = Derivation::bind(unit_node, lam_node);
            Derivation::conf(bind_node, dt.clone()).sub(AnyType::C(kappa_i))
        }
        // bind context: M0 >>= V  <-  N0 >>= V
        Computation::Bind(m0, _) => {
            let mut contributions = Vec::new();
            for (q_n0, q_v) in invert_bind(dn) {
                let (sigma_j, mid_j) = single_arrow_of(&q_n0);
                if !subtype_store(&sigma_i, &sigma_j) {
                    continue;
                }
                let inner_conf = Derivation::conf(
                    q_n0.clone()
                        .sub(AnyType::T(CompType::arrow(sigma_i.clone(), mid_j.clone()))),
                    dt.clone(),
                );
                let inner_source = Configuration::new((**m0).clone(), source.store.clone());
                let inner_out = expand_unchecked_step(&inner_conf, &inner_source);
                contributions.push(rebuild_bind(&inner_out, &q_v, &mid_j));
            }
            assert!(
                !contributions.is_empty(),
                "an applicable arrow exists below a non-trivial target"
            );
            Derivation::inter(contributions).sub(AnyType::C(kappa_i))
        }
        // get: re-type the store at <l:d> /\ s_i
        Computation::Get(l, x, body) => {
            let v = resolve_lookup(*l, &source.store).expect("the step resolved this location");
            let (delta, d_v, d_b) =
                expand_unchecked(dn, body, x, &v).expect("the reduct is the substituted body");
            let get_node = Derivation::get(*l, x.clone(), d_b);
            let entries = invert_store(dt);
            let target_sigma = StoreType::entry(*l, delta).meet(&sigma_i);
            let d_v = d_v.clone();
            let d_s = type_store_at(&ctx, &source.store, &target_sigma, &mut |loc, _| {
                if loc == *l {
                    let mut parts = vec![d_v.clone()];
                    parts.extend(entries.get(&loc).cloned());
                    Some(Derivation::inter(parts))
                } else {
                    entries.get(&loc).cloned()
                }
            })
            .expect("the read location resolves in the source store");
            Derivation::conf(get_node, d_s).sub(AnyType::C(kappa_i))
        }
        // set: split on whether s_i constrains the written location
        Computation::Set(l, v, _) => {
            let entries = invert_store(dt);
            match sigma_i.entries().and_then(|m| m.get(l)).cloned() {
                Some(_delta_l) => {
                    // s_i = <l:d> /\ s'; the written value had type d.
                    let d_v = entries
                        .get(l)
                        .expect("inverted entries cover sigma_i")
                        .clone();
                    let sigma_rest = sigma_i.without(*l);
                    let set_node = Derivation::set(*l, d_v, dn.clone());
                    let d_s = type_store_at(&ctx, &source.store, &sigma_rest, &mut |loc, _| {
                        entries.get(&loc).cloned()
                    })
                    .expect("remaining entries resolve in the source store");
                    Derivation::conf(set_node, d_s).sub(AnyType::C(kappa_i))
                }
                None => {
                    // l unconstrained: write at wD and keep s_i.
                    let d_v = Derivation::omega(ctx.clone(), Subject::Val(v.clone()));
                    let widened = dn.clone().sub(AnyType::T(CompType::arrow(
                        StoreType::entry(*l, crate::types::ValueType::top()).meet(&sigma_i),
                        kappa_i.clone(),
                    )));
                    let set_node = Derivation::set(*l, d_v, widened);
                    let d_s = type_store_at(&ctx, &source.store, &sigma_i, &mut |loc, _| {
                        entries.get(&loc).cloned()
                    })
                    .expect("entries away from l resolve in the source store");
                    Derivation::conf(set_node, d_s).sub(AnyType::C(kappa_i))
                }
            }
        }
        Computation::Unit(_) => unreachable!("results do not step"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Location;
    use crate::typing::Context;

    fn l(i: u32) -> Location {
        Location(i)
    }

    fn idv() -> Value {
        Value::identity()
    }

    /// Seed `|- (unit V, t) : wD x wS`.
    fn seed(v: &Value, t: &StoreTerm) -> Derivation {
        let unit = Derivation::unit(
            Derivation::omega(Context::empty(), Subject::Val(v.clone())),
            StoreType::Top,
        );
        let st = Derivation::omega(Context::empty(), Subject::Store(t.clone()));
        Derivation::conf(unit, st)
    }

    #[test]
    fn expand_across_set_red_with_trivial_seed() {
        // (set[l](V). unit V', s) -> (unit V', upd(l,V,s)); the seed at the
        // reduct expands to a set node typed wS -> wD x wS.
        let v = idv();
        let m = Computation::set(l(0), v.clone(), Computation::unit(idv()));
        let source = Configuration::new(m, StoreTerm::Emp);
        let StepOutcome::Next(next) = step_raw(&source) else {
            panic!()
        };
        let d_next = seed(&idv(), &next.store);
        check_derivation(&d_next).unwrap();
        let d = expand_step(&d_next, &source).unwrap();
        check_derivation(&d).unwrap();
        assert_eq!(d.conclusion.ty, AnyType::C(ResultType::trivial_result()));
        assert_eq!(
            d.conclusion.subject,
            Subject::Config(source.comp.clone(), source.store.clone())
        );
    }

    #[test]
    fn expand_across_get_red_builds_entry_typing() {
        // (get[l](\x. unit x), upd(l, V, emp)) -> (unit V, upd(l, V, emp)).
        let v = idv();
        let store = StoreTerm::upd_val(l(0), v.clone(), StoreTerm::Emp);
        let m = Computation::get(l(0), "x", Computation::unit(Value::var("x")));
        let source = Configuration::new(m, store.clone());
        let StepOutcome::Next(next) = step_raw(&source) else {
            panic!()
        };
        let d_next = seed(&v, &next.store);
        let d = expand_step(&d_next, &source).unwrap();
        check_derivation(&d).unwrap();
    }

    #[test]
    fn expand_across_beta() {
        // (unit V >>= \x. unit x, emp) -> (unit V, emp).
        let v = idv();
        let m = Computation::bind(
            Computation::unit(v.clone()),
            Value::lam("x", Computation::unit(Value::var("x"))),
        );
        let source = Configuration::new(m, StoreTerm::Emp);
        let StepOutcome::Next(next) = step_raw(&source) else {
            panic!()
        };
        let d_next = seed(&v, &next.store);
        let d = expand_step(&d_next, &source).unwrap();
        check_derivation(&d).unwrap();
    }

    #[test]
    fn preserve_across_beta_keeps_kappa() {
        // Build |- (unit V >>= \x. unit x, emp) : wD x wS by expansion, then
        // push it forward again.
        let v = idv();
        let m = Computation::bind(
            Computation::unit(v.clone()),
            Value::lam("x", Computation::unit(Value::var("x"))),
        );
        let source = Configuration::new(m, StoreTerm::Emp);
        let StepOutcome::Next(next) = step_raw(&source) else {
            panic!()
        };
        let d_src = expand_step(&seed(&v, &next.store), &source).unwrap();
        let d_fwd = preserve_step(&d_src, &next).unwrap();
        check_derivation(&d_fwd).unwrap();
        assert_eq!(d_fwd.conclusion.ty, d_src.conclusion.ty);
        assert_eq!(
            d_fwd.conclusion.subject,
            Subject::Config(next.comp.clone(), next.store.clone())
        );
    }

    #[test]
    fn preserve_across_set_and_get() {
        // Type (set;get, emp) at wD x wS via expansion over the whole trace,
        // then replay forward with preservation at every step.
        let v = idv();
        let m = Computation::set(
            l(0),
            v.clone(),
            Computation::get(l(0), "x", Computation::unit(Value::var("x"))),
        );
        let c0 = Configuration::new(m, StoreTerm::Emp);
        let (outcome, trace) = crate::eval::run(&c0, 10).unwrap();
        assert!(outcome.is_converged());
        // Backward.
        let last = trace.last().unwrap();
        let Computation::Unit(final_v) = &last.comp else {
            panic!()
        };
        let mut d = seed(final_v, &last.store);
        for i in (0..trace.len() - 1).rev() {
            d = expand_step(&d, &trace[i]).unwrap();
            check_derivation(&d).unwrap();
        }
        // Forward.
        for next in trace.iter().skip(1) {
            d = preserve_step(&d, next).unwrap();
            check_derivation(&d).unwrap();
            assert_eq!(d.conclusion.ty, AnyType::C(ResultType::trivial_result()));
        }
    }

    #[test]
    fn non_step_rejected() {
        let v = idv();
        let d = seed(&v, &StoreTerm::Emp);
        let bogus = Configuration::new(Computation::unit(v), StoreTerm::Emp);
        assert_eq!(preserve_step(&d, &bogus), Err(StepError::NotAStep));
    }
}
