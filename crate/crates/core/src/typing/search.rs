//! Bounded, inversion-guided search for typing derivations.
//!
//! The system assigns intersection types, so full inference is out of
//! reach; this search instead reads the rules backwards from a target type,
//! instantiating the intermediate types it must guess from a finite menu:
//! the components of the target plus the tops. `None` at a given depth is
//! evidence, not proof, of underivability.

use crate::syntax::{substitute, Computation, Value, VarSet};
use crate::types::{subtype_value, AnyType, CompType, ResultType, StoreType, ValueType};
use crate::typing::subst::freshen_comp;
use crate::typing::{check_derivation, Context, Derivation, Subject};

/// Searches for a derivation of `ctx |- m : tau` of nesting depth at most
/// `depth`. A found derivation checks; its subject is an alpha-variant of
/// `m` when binders had to be renamed apart from the context.
pub fn search_typing(
    ctx: &Context,
    m: &Computation,
    tau: &CompType,
    depth: usize,
) -> Option<Derivation> {
    let mut avoid: VarSet = m.free_vars();
    for (k, _) in ctx.iter() {
        avoid.insert(k.clone());
    }
    let m = freshen_comp(m, &mut avoid);
    let found = derive_comp(ctx, &m, tau, depth)?;
    check_derivation(&found).expect("search results must check");
    Some(found)
}

fn derive_comp(ctx: &Context, m: &Computation, tau: &CompType, depth: usize) -> Option<Derivation> {
    if tau.is_top() {
        return Some(Derivation::omega(ctx.clone(), Subject::Comp(m.clone())));
    }
    if depth == 0 {
        return None;
    }
    let mut parts = Vec::new();
    for (sigma, kappa) in tau.arrows() {
        parts.push(derive_comp_arrow(ctx, m, sigma, kappa, depth)?);
    }
    Some(Derivation::inter(parts))
}

fn derive_comp_arrow(
    ctx: &Context,
    m: &Computation,
    sigma: &StoreType,
    kappa: &ResultType,
    depth: usize,
) -> Option<Derivation> {
    if depth == 0 {
        return None;
    }
    let goal = CompType::arrow(sigma.clone(), kappa.clone());
    match m {
        Computation::Unit(v) => {
            let ResultType::Prod(dt, st) = kappa else {
                unreachable!("canonical arrow targets are products")
            };
            if !crate::types::subtype_store(sigma, st) {
                return None;
            }
            let dv = derive_value(ctx, v, dt, depth - 1)?;
            Some(Derivation::unit(dv, sigma.clone()).sub(AnyType::T(goal)))
        }
        Computation::Bind(m0, v) => {
            let dmenu = value_menu(sigma, kappa);
            let smenu = store_menu(sigma, kappa);
            for dmid in &dmenu {
                for smid in &smenu {
                    let mid = ResultType::Prod(dmid.clone(), smid.clone());
                    let fun_ty = ValueType::arrow(
                        dmid.clone(),
                        CompType::arrow(smid.clone(), kappa.clone()),
                    );
                    if fun_ty.is_top() {
                        continue;
                    }
                    let Some(d0) = derive_comp_arrow(ctx, m0, sigma, &mid, depth - 1) else {
                        continue;
                    };
                    let Some(dv) = derive_value(ctx, v, &fun_ty, depth - 1) else {
                        continue;
                    };
                    return Some(Derivation::bind(d0, dv));
                }
            }
            None
        }
        Computation::Get(l, x, body) => {
            // The source must constrain the read location.
            let delta = sigma.entries().and_then(|e| e.get(l))?.clone();
            let inner = ctx.extended(x.clone(), delta)?;
            let d_body = derive_comp(&inner, body, &goal, depth - 1)?;
            // <l:d> /\ sigma collapses back to sigma since l is present.
            Some(Derivation::get(*l, x.clone(), d_body))
        }
        Computation::Set(l, v, rest) => {
            let sigma0 = sigma.without(*l);
            let mut dmenu = vec![ValueType::top()];
            dmenu.extend(value_menu(sigma, kappa));
            if let Some(d) = sigma.entries().and_then(|e| e.get(l)) {
                dmenu.push(d.clone());
            }
            dmenu.dedup();
            for delta in &dmenu {
                let Some(dv) = derive_value(ctx, v, delta, depth - 1) else {
                    continue;
                };
                let inner_src = StoreType::entry(*l, delta.clone()).meet(&sigma0);
                let Some(dr) = derive_comp(
                    ctx,
                    rest,
                    &CompType::arrow(inner_src, kappa.clone()),
                    depth - 1,
                ) else {
                    continue;
                };
                return Some(Derivation::set(*l, dv, dr).sub(AnyType::T(goal)));
            }
            None
        }
    }
}

fn derive_value(ctx: &Context, v: &Value, delta: &ValueType, depth: usize) -> Option<Derivation> {
    if delta.is_top() {
        return Some(Derivation::omega(ctx.clone(), Subject::Val(v.clone())));
    }
    if depth == 0 {
        return None;
    }
    match v {
        Value::Var(x) => {
            let have = ctx.get(x)?;
            subtype_value(have, delta)
                .then(|| Derivation::var(ctx.clone(), x.clone()).sub(AnyType::D(delta.clone())))
        }
        Value::Lam(y, body) => {
            let mut parts = Vec::new();
            for (src, tgt) in delta.arrows() {
                // Rename the binder apart from the context if needed.
                let (y2, body2) = if ctx.contains(y) {
                    let mut avoid: VarSet = body.free_vars();
                    for (k, _) in ctx.iter() {
                        avoid.insert(k.clone());
                    }
                    let y2 = crate::syntax::fresh_name(y, &avoid);
                    (y2.clone(), substitute(body, y, &Value::Var(y2)))
                } else {
                    (y.clone(), (**body).clone())
                };
                let inner = ctx.extended(y2.clone(), src.clone())?;
                let d_body = derive_comp(&inner, &body2, tgt, depth - 1)?;
                parts.push(Derivation::lam(y2, d_body));
            }
            Some(Derivation::inter(parts))
        }
    }
}

/// Value types mentioned anywhere in the goal.
fn value_menu(sigma: &StoreType, kappa: &ResultType) -> Vec<ValueType> {
    let mut out = vec![ValueType::top()];
    collect_store(sigma, &mut out);
    collect_result(kappa, &mut out);
    out.sort();
    out.dedup();
    out
}

/// Store types mentioned anywhere in the goal.
fn store_menu(sigma: &StoreType, kappa: &ResultType) -> Vec<StoreType> {
    let mut out = vec![StoreType::Top, sigma.clone()];
    let mut values = Vec::new();
    collect_store(sigma, &mut values);
    collect_result(kappa, &mut values);
    if let ResultType::Prod(_, s) = kappa {
        out.push(s.clone());
        collect_result_stores(kappa, &mut out);
    }
    for d in values {
        collect_value_stores(&d, &mut out);
    }
    out.sort();
    out.dedup();
    out
}

fn collect_store(s: &StoreType, out: &mut Vec<ValueType>) {
    if let Some(m) = s.entries() {
        for d in m.values() {
            out.push(d.clone());
            collect_value(d, out);
        }
    }
}

fn collect_result(k: &ResultType, out: &mut Vec<ValueType>) {
    if let ResultType::Prod(d, s) = k {
        out.push(d.clone());
        collect_value(d, out);
        collect_store(s, out);
    }
}

fn collect_value(d: &ValueType, out: &mut Vec<ValueType>) {
    for (src, tgt) in d.arrows() {
        out.push(src.clone());
        collect_value(src, out);
        for (s, k) in tgt.arrows() {
            collect_store(s, out);
            collect_result(k, out);
        }
    }
}

fn collect_value_stores(d: &ValueType, out: &mut Vec<StoreType>) {
    for (src, tgt) in d.arrows() {
        collect_value_stores(src, out);
        for (s, k) in tgt.arrows() {
            out.push(s.clone());
            collect_result_stores(k, out);
        }
    }
}

fn collect_result_stores(k: &ResultType, out: &mut Vec<StoreType>) {
    if let ResultType::Prod(d, s) = k {
        out.push(s.clone());
        collect_value_stores(d, out);
    }
}
