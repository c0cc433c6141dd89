//! Pretty-printers for terms, stores, types, judgments and derivations.
//!
//! The ASCII style round-trips through the parser; the unicode style swaps
//! in the usual symbols for display only.

use lamgs_core::store::{LookupTerm, StoreTerm};
use lamgs_core::syntax::{Computation, Value};
use lamgs_core::types::{AnyType, CompType, ResultType, StoreType, ValueType};
use lamgs_core::typing::{Derivation, Judgment, Subject};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Style {
    pub lambda: &'static str,
    pub bind: &'static str,
    pub and: &'static str,
    pub arrow: &'static str,
    pub prod: &'static str,
    pub omega_d: &'static str,
    pub omega_s: &'static str,
    pub omega_c: &'static str,
    pub omega_t: &'static str,
    pub loc_prefix: &'static str,
    pub turnstile: &'static str,
}

pub const ASCII: Style = Style {
    lambda: "\\",
    bind: ">>=",
    and: "/\\",
    arrow: "->",
    prod: "x",
    omega_d: "wD",
    omega_s: "wS",
    omega_c: "wC",
    omega_t: "wT",
    loc_prefix: "l",
    turnstile: "|-",
};

pub const UNICODE: Style = Style {
    lambda: "λ",
    bind: "⟫=",
    and: "∧",
    arrow: "→",
    prod: "×",
    omega_d: "ωD",
    omega_s: "ωS",
    omega_c: "ωC",
    omega_t: "ωT",
    loc_prefix: "ℓ",
    turnstile: "⊢",
};

fn loc(l: lamgs_core::syntax::Location, st: &Style) -> String {
    format!("{}{}", st.loc_prefix, l.0)
}

pub fn render_value(v: &Value, st: &Style) -> String {
    match v {
        Value::Var(x) => x.0.clone(),
        Value::Lam(x, body) => format!("{}{}. {}", st.lambda, x.0, render_comp(body, st)),
    }
}

/// A value in argument position: abstractions get parentheses.
fn value_atom(v: &Value, st: &Style) -> String {
    match v {
        Value::Var(_) => render_value(v, st),
        Value::Lam(_, _) => format!("({})", render_value(v, st)),
    }
}

pub fn render_comp(m: &Computation, st: &Style) -> String {
    match m {
        Computation::Unit(v) => format!("unit {}", value_atom(v, st)),
        Computation::Bind(inner, v) => {
            // The left operand needs parentheses when its rendering would
            // swallow the bind: a set continuation or a bind ending in an
            // abstraction.
            let left = render_comp(inner, st);
            let left = if swallows_right(inner) {
                format!("({left})")
            } else {
                left
            };
            format!("{left} {} {}", st.bind, render_value(v, st))
        }
        Computation::Get(l, x, body) => format!(
            "get[{}]({}{}. {})",
            loc(*l, st),
            st.lambda,
            x.0,
            render_comp(body, st)
        ),
        Computation::Set(l, v, rest) => format!(
            "set[{}]({}). {}",
            loc(*l, st),
            render_value(v, st),
            render_comp(rest, st)
        ),
    }
}

/// Whether a computation's rendering extends maximally right.
fn swallows_right(m: &Computation) -> bool {
    match m {
        Computation::Set(_, _, _) => true,
        Computation::Bind(_, Value::Lam(_, _)) => true,
        Computation::Bind(inner, _) => swallows_right(inner),
        _ => false,
    }
}

pub fn render_store(s: &StoreTerm, st: &Style) -> String {
    match s {
        StoreTerm::Emp => "emp".into(),
        StoreTerm::Upd(l, u, rest) => format!(
            "upd({}, {}, {})",
            loc(*l, st),
            render_lookup(u, st),
            render_store(rest, st)
        ),
    }
}

pub fn render_lookup(u: &LookupTerm, st: &Style) -> String {
    match u {
        LookupTerm::Val(v) => render_value(v, st),
        LookupTerm::Lkp(l, s) => format!("lkp({}, {})", loc(*l, st), render_store(s, st)),
    }
}

// -- types ------------------------------------------------------------------

pub fn render_type(t: &AnyType, st: &Style) -> String {
    match t {
        AnyType::D(d) => render_value_type(d, st, false),
        AnyType::S(s) => render_store_type(s, st),
        AnyType::C(k) => render_result_type(k, st),
        AnyType::T(tt) => render_comp_type(tt, st, false),
    }
}

fn render_value_type(d: &ValueType, st: &Style, atom: bool) -> String {
    if d.arrows().is_empty() {
        return st.omega_d.into();
    }
    let parens = atom || d.arrows().len() > 1;
    let parts: Vec<String> = d
        .arrows()
        .iter()
        .map(|(src, tgt)| {
            let s = format!(
                "{} {} {}",
                render_value_type(src, st, src.arrows().len() == 1),
                st.arrow,
                render_comp_type(tgt, st, false)
            );
            if parens {
                format!("({s})")
            } else {
                s
            }
        })
        .collect();
    parts.join(&format!(" {} ", st.and))
}

fn render_store_type(s: &StoreType, st: &Style) -> String {
    match s.entries() {
        None => st.omega_s.into(),
        Some(m) => m
            .iter()
            .map(|(l, d)| format!("<{} : {}>", loc(*l, st), render_value_type(d, st, false)))
            .collect::<Vec<_>>()
            .join(&format!(" {} ", st.and)),
    }
}

fn render_result_type(k: &ResultType, st: &Style) -> String {
    match k.as_prod() {
        None => st.omega_c.into(),
        Some((d, s)) => format!(
            "{} {} {}",
            render_value_type(d, st, d.arrows().len() == 1),
            st.prod,
            render_store_type(s, st)
        ),
    }
}

fn render_comp_type(t: &CompType, st: &Style, atom: bool) -> String {
    if t.arrows().is_empty() {
        return st.omega_t.into();
    }
    let parens = atom || t.arrows().len() > 1;
    let parts: Vec<String> = t
        .arrows()
        .iter()
        .map(|(src, tgt)| {
            let s = format!(
                "{} {} {}",
                render_store_type(src, st),
                st.arrow,
                render_result_type(tgt, st)
            );
            if parens {
                format!("({s})")
            } else {
                s
            }
        })
        .collect();
    parts.join(&format!(" {} ", st.and))
}

// -- judgments and derivations ------------------------------------------------

pub fn render_subject(subject: &Subject, st: &Style) -> String {
    match subject {
        Subject::Val(v) => render_value(v, st),
        Subject::Comp(m) => render_comp(m, st),
        Subject::Store(s) => render_store(s, st),
        Subject::Lookup(u) => render_lookup(u, st),
        Subject::Config(m, s) => format!("({}, {})", render_comp(m, st), render_store(s, st)),
    }
}

pub fn render_judgment(j: &Judgment, st: &Style) -> String {
    let ctx = j
        .ctx
        .iter()
        .map(|(x, d)| format!("{} : {}", x.0, render_value_type(d, st, false)))
        .collect::<Vec<_>>()
        .join(", ");
    format!(
        "[{}] {} {} : {}",
        ctx,
        st.turnstile,
        render_subject(&j.subject, st),
        render_type(&j.ty, st)
    )
}

/// The exchange format: `(rule judgment premise*)`, indented for reading.
pub fn render_derivation(d: &Derivation, st: &Style) -> String {
    let mut out = String::new();
    render_derivation_at(d, st, 0, &mut out);
    out
}

fn render_derivation_at(d: &Derivation, st: &Style, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    out.push_str(&pad);
    out.push('(');
    out.push_str(d.rule.name());
    out.push(' ');
    out.push_str(&render_judgment(&d.conclusion, st));
    if d.premises.is_empty() {
        out.push(')');
        out.push('\n');
        return;
    }
    out.push('\n');
    for p in &d.premises {
        render_derivation_at(p, st, indent + 1, out);
    }
    out.push_str(&pad);
    out.push(')');
    out.push('\n');
}

// -- structured output ---------------------------------------------------------

pub fn derivation_json(d: &Derivation) -> serde_json::Value {
    serde_json::json!({
        "rule": d.rule.name(),
        "judgment": {
            "ctx": d.conclusion.ctx.iter()
                .map(|(x, t)| (x.0.clone(), render_value_type(t, &ASCII, false)))
                .collect::<std::collections::BTreeMap<_, _>>(),
            "subject": render_subject(&d.conclusion.subject, &ASCII),
            "type": render_type(&d.conclusion.ty, &ASCII),
        },
        "premises": d.premises.iter().map(derivation_json).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use lamgs_core::syntax::Location;

    #[test]
    fn set_under_bind_parenthesized() {
        let m = Computation::bind(
            Computation::set(
                Location(0),
                Value::identity(),
                Computation::unit(Value::identity()),
            ),
            Value::var("f"),
        );
        let s = render_comp(&m, &ASCII);
        assert!(s.starts_with("(set"), "{s}");
    }

    #[test]
    fn convergent_type_renders() {
        assert_eq!(
            render_type(&AnyType::T(CompType::convergent()), &ASCII),
            "wS -> wD x wS"
        );
        assert_eq!(
            render_type(&AnyType::T(CompType::convergent()), &UNICODE),
            "ωS → ωD × ωS"
        );
    }
}
