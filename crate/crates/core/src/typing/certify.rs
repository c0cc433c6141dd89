//! The convergence certifier.
//!
//! A closed computation converges (from every store, equivalently from the
//! empty one) exactly when it can be typed `wS -> wD x wS`. The certifier
//! mechanizes the constructive half of that equivalence: it runs the
//! configuration `(M, emp)`, seeds the trivial typing of the final result
//! `|- (unit V, t) : wD x wS`, folds [`expand_step`] backwards over the
//! trace, and reads the typing of `M` off the initial configuration
//! judgment. The produced derivation passes the checker by construction and
//! is re-checked before being returned.

use std::fmt;

use crate::eval::{run, Configuration, RunOutcome, Trace};
use crate::store::StoreTerm;
use crate::syntax::{Computation, VarSet};
use crate::types::{AnyType, CompType, StoreType};
use crate::typing::invert::invert_conf;
use crate::typing::steps::expand_step;
use crate::typing::subst::freshen_comp;
use crate::typing::{check_derivation, Context, Derivation, Subject};

/// A checked witness of convergence.
#[derive(Debug, Clone)]
pub struct Certificate {
    /// The certified computation; an alpha-variant of the input with
    /// pairwise distinct binders.
    pub term: Computation,
    /// The full reduction trace of `(term, emp)`.
    pub trace: Trace,
    /// `|- term : wS -> wD x wS`.
    pub derivation: Derivation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertifyFailure {
    /// The term has free variables.
    Open,
    /// Evaluation reached a blocked configuration.
    Blocked(Configuration, usize),
    /// The fuel ran out; convergence is unknown.
    FuelExhausted(usize),
}

impl fmt::Display for CertifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifyFailure::Open => write!(f, "the term is not closed"),
            CertifyFailure::Blocked(_, steps) => {
                write!(f, "blocked configuration after {steps} steps")
            }
            CertifyFailure::FuelExhausted(steps) => {
                write!(f, "fuel exhausted after {steps} steps")
            }
        }
    }
}

impl std::error::Error for CertifyFailure {}

/// Runs `(M, emp)` and, on convergence, certifies `|- M : wS -> wD x wS`.
pub fn certify_convergence(m: &Computation, fuel: usize) -> Result<Certificate, CertifyFailure> {
    if !m.is_closed() {
        return Err(CertifyFailure::Open);
    }
    // Distinct binders keep context extensions well-formed along the trace.
    let mut avoid: VarSet = m.free_vars();
    let term = freshen_comp(m, &mut avoid);
    let start = Configuration::new(term.clone(), StoreTerm::Emp);
    let (outcome, trace) = run(&start, fuel).expect("closed by construction");
    let (value, store) = match outcome {
        RunOutcome::Converged { value, store, .. } => (value, store),
        RunOutcome::Blocked { config, steps } => {
            return Err(CertifyFailure::Blocked(config, steps))
        }
        RunOutcome::FuelExhausted { steps, .. } => {
            return Err(CertifyFailure::FuelExhausted(steps))
        }
    };

    // Seed: |- (unit V, t) : wD x wS.
    let unit_v = Derivation::unit(
        Derivation::omega(Context::empty(), Subject::Val(value)),
        StoreType::Top,
    );
    let d_store = Derivation::omega(Context::empty(), Subject::Store(store));
    let mut d = Derivation::conf(unit_v, d_store);

    // Fold expansion backwards over the trace.
    for config in trace.iter().rev().skip(1) {
        d = expand_step(&d, config).expect("trace steps are the actual reductions");
    }

    // Extract the typing of M from the initial configuration judgment. The
    // empty store types only at wS, so every conf premise arrow starts
    // there and subsumes into the convergence type.
    let fams = invert_conf(&d);
    assert!(!fams.is_empty(), "the seed type is non-trivial");
    let m_typings: Vec<Derivation> = fams.into_iter().map(|(dm, _)| dm).collect();
    let derivation = Derivation::inter(m_typings).sub(AnyType::T(CompType::convergent()));
    check_derivation(&derivation).expect("certificates must check");
    Ok(Certificate {
        term,
        trace,
        derivation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Location, Value};

    fn l(i: u32) -> Location {
        Location(i)
    }

    #[test]
    fn certifies_set_get() {
        let m = Computation::set(
            l(0),
            Value::identity(),
            Computation::get(l(0), "x", Computation::unit(Value::var("x"))),
        );
        let cert = certify_convergence(&m, 100).unwrap();
        assert_eq!(
            cert.derivation.conclusion.ty,
            AnyType::T(CompType::convergent())
        );
        assert_eq!(cert.derivation.conclusion.subject, Subject::Comp(cert.term));
    }

    #[test]
    fn certifies_trivial_unit() {
        let cert = certify_convergence(&Computation::unit(Value::identity()), 10).unwrap();
        assert_eq!(cert.trace.len(), 1);
        check_derivation(&cert.derivation).unwrap();
    }

    #[test]
    fn blocked_term_fails() {
        let m = Computation::get(l(0), "x", Computation::unit(Value::var("x")));
        assert!(matches!(
            certify_convergence(&m, 10),
            Err(CertifyFailure::Blocked(_, 0))
        ));
    }

    #[test]
    fn divergent_term_exhausts_fuel() {
        assert!(matches!(
            certify_convergence(&Computation::omega(), 50),
            Err(CertifyFailure::FuelExhausted(_))
        ));
    }

    #[test]
    fn certifies_sequencing_example() {
        // (set[l](V). unit W) ; get[l](\x. unit x)
        let v = Value::identity();
        let w = Value::lam("w", Computation::unit(Value::var("w")));
        let m = Computation::bind(
            Computation::set(l(0), v, Computation::unit(w)),
            Value::lam(
                "_",
                Computation::get(l(0), "x", Computation::unit(Value::var("x"))),
            ),
        );
        let cert = certify_convergence(&m, 100).unwrap();
        assert_eq!(cert.trace.len(), 4);
        check_derivation(&cert.derivation).unwrap();
    }
}
