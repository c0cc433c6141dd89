//! Operational semantics: configurations, the deterministic one-step
//! reduction, blocked-configuration detection, the big-step evaluator with
//! derivation weights, and fuel-bounded driving loops.
//!
//! Reduction rules on configurations `(M, s)`:
//!
//! - `(unit V >>= \x.M, s) -> (M[V/x], s)`
//! - `(M, s) -> (N, t)` implies `(M >>= V, s) -> (N >>= V, t)`
//! - `(get[l](\x.M), s) -> (M[V/x], s)` when `l` resolves to `V` in `s`
//! - `(set[l](V). M, s) -> (M, upd(l, V, s))`
//!
//! Stores along a trace are never normalized eagerly: the set rule pushes a
//! raw update node, and final stores are compared up to derivable equality.

use std::fmt;
use std::sync::Arc;

use crate::store::{dom_store, resolve_lookup, StoreTerm};
use crate::syntax::{substitute, Computation, Value};

/// A pair of a computation and a store term; the unit of evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub comp: Computation,
    pub store: StoreTerm,
}

impl Configuration {
    pub fn new(comp: Computation, store: StoreTerm) -> Self {
        Configuration { comp, store }
    }

    /// Evaluation entry points require both components closed.
    pub fn is_closed(&self) -> bool {
        self.comp.is_closed() && self.store.is_closed()
    }
}

/// Result of a single reduction attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Next(Configuration),
    /// The configuration is `(unit V, t)`: a proper result.
    Value(Value, StoreTerm),
    /// Irreducible but not a result: a get on an undefined location,
    /// possibly under bind contexts.
    Blocked(Configuration),
}

/// Outcome of driving a configuration with bounded fuel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Converged {
        value: Value,
        store: StoreTerm,
        /// Number of small-step reductions taken.
        steps: usize,
        /// Weight of the corresponding big-step derivation.
        index: usize,
    },
    Blocked {
        config: Configuration,
        steps: usize,
    },
    FuelExhausted {
        config: Configuration,
        steps: usize,
    },
}

impl RunOutcome {
    pub fn is_converged(&self) -> bool {
        matches!(self, RunOutcome::Converged { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    /// The configuration had free variables.
    OpenTerm,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::OpenTerm => write!(f, "configuration is not closed"),
        }
    }
}

impl std::error::Error for EvalError {}

/// Default small-step fuel for the driving loops.
pub const DEFAULT_FUEL: usize = 10_000;

/// One reduction step; mechanical, no closedness check. Used internally by
/// the typing transformers, which step open subjects under a context.
pub(crate) fn step_raw(c: &Configuration) -> StepOutcome {
    match &c.comp {
        Computation::Unit(v) => StepOutcome::Value(v.clone(), c.store.clone()),
        Computation::Bind(m, v) => match (&**m, v) {
            (Computation::Unit(w), Value::Lam(x, body)) => {
                StepOutcome::Next(Configuration::new(substitute(body, x, w), c.store.clone()))
            }
            _ => match step_raw(&Configuration::new((**m).clone(), c.store.clone())) {
                StepOutcome::Next(inner) => StepOutcome::Next(Configuration::new(
                    Computation::Bind(Arc::new(inner.comp), v.clone()),
                    inner.store,
                )),
                StepOutcome::Value(_, _) => StepOutcome::Blocked(c.clone()),
                StepOutcome::Blocked(_) => StepOutcome::Blocked(c.clone()),
            },
        },
        Computation::Get(l, x, body) => match resolve_lookup(*l, &c.store) {
            Ok(v) => {
                StepOutcome::Next(Configuration::new(substitute(body, x, &v), c.store.clone()))
            }
            Err(_) => StepOutcome::Blocked(c.clone()),
        },
        Computation::Set(l, v, rest) => StepOutcome::Next(Configuration::new(
            (**rest).clone(),
            StoreTerm::upd_val(*l, v.clone(), c.store.clone()),
        )),
    }
}

/// The deterministic one-step reduction of a closed configuration.
pub fn step(c: &Configuration) -> Result<StepOutcome, EvalError> {
    if !c.is_closed() {
        return Err(EvalError::OpenTerm);
    }
    Ok(step_raw(c))
}

/// Matches the inductive grammar of blocked configurations:
/// `(get[l](\x.M), s)` with `l` outside `dom(s)`, or `(B >>= V, s)` with
/// `(B, s)` blocked.
pub fn is_blocked(c: &Configuration) -> bool {
    match &c.comp {
        Computation::Get(l, _, _) => !dom_store(&c.store).contains(l),
        Computation::Bind(m, _) => is_blocked(&Configuration::new((**m).clone(), c.store.clone())),
        _ => false,
    }
}

/// A run's intermediate configurations, starting with the initial one.
pub type Trace = Vec<Configuration>;

/// Iterates [`step`] up to `fuel` times, recording the trace.
pub fn run(c: &Configuration, fuel: usize) -> Result<(RunOutcome, Trace), EvalError> {
    if !c.is_closed() {
        return Err(EvalError::OpenTerm);
    }
    let mut trace = vec![c.clone()];
    let mut cur = c.clone();
    let mut steps = 0;
    loop {
        match step_raw(&cur) {
            StepOutcome::Value(v, t) => {
                return Ok((
                    RunOutcome::Converged {
                        value: v,
                        store: t,
                        steps,
                        index: steps,
                    },
                    trace,
                ))
            }
            StepOutcome::Blocked(b) => {
                return Ok((RunOutcome::Blocked { config: b, steps }, trace))
            }
            StepOutcome::Next(next) => {
                if steps == fuel {
                    return Ok((RunOutcome::FuelExhausted { config: cur, steps }, trace));
                }
                steps += 1;
                trace.push(next.clone());
                cur = next;
            }
        }
    }
}

/// Direct recursive evaluator for the big-step relation, returning the
/// derivation weight: `unit` costs 0, `get`/`set` add 1, `bind` adds
/// `n + m + 1`. The recursion budget is shared across the whole derivation.
pub fn eval_big(c: &Configuration, fuel: usize) -> Result<RunOutcome, EvalError> {
    if !c.is_closed() {
        return Err(EvalError::OpenTerm);
    }
    let mut budget = fuel;
    Ok(eval_big_raw(c, &mut budget))
}

fn eval_big_raw(c: &Configuration, budget: &mut usize) -> RunOutcome {
    match &c.comp {
        Computation::Unit(v) => RunOutcome::Converged {
            value: v.clone(),
            store: c.store.clone(),
            steps: 0,
            index: 0,
        },
        Computation::Bind(m, v) => {
            if *budget == 0 {
                return RunOutcome::FuelExhausted {
                    config: c.clone(),
                    steps: 0,
                };
            }
            *budget -= 1;
            let first = eval_big_raw(&Configuration::new((**m).clone(), c.store.clone()), budget);
            match first {
                RunOutcome::Converged {
                    value: w,
                    store: s1,
                    steps,
                    index: n,
                } => {
                    let Value::Lam(x, body) = v else {
                        // Closed function positions are always abstractions.
                        return RunOutcome::Blocked {
                            config: c.clone(),
                            steps,
                        };
                    };
                    let next = Configuration::new(substitute(body, x, &w), s1);
                    match eval_big_raw(&next, budget) {
                        RunOutcome::Converged {
                            value,
                            store,
                            steps: steps2,
                            index: m2,
                        } => RunOutcome::Converged {
                            value,
                            store,
                            steps: steps + 1 + steps2,
                            index: n + m2 + 1,
                        },
                        RunOutcome::Blocked { config, steps: s2 } => RunOutcome::Blocked {
                            config,
                            steps: steps + 1 + s2,
                        },
                        RunOutcome::FuelExhausted { config, steps: s2 } => {
                            RunOutcome::FuelExhausted {
                                config,
                                steps: steps + 1 + s2,
                            }
                        }
                    }
                }
                RunOutcome::Blocked { config, steps } => {
                    // Blocked under the bind context.
                    RunOutcome::Blocked {
                        config: Configuration::new(
                            Computation::Bind(Arc::new(config.comp), v.clone()),
                            config.store,
                        ),
                        steps,
                    }
                }
                RunOutcome::FuelExhausted { config, steps } => {
                    RunOutcome::FuelExhausted { config, steps }
                }
            }
        }
        Computation::Get(l, x, body) => {
            if *budget == 0 {
                return RunOutcome::FuelExhausted {
                    config: c.clone(),
                    steps: 0,
                };
            }
            *budget -= 1;
            match resolve_lookup(*l, &c.store) {
                Ok(v) => {
                    let next = Configuration::new(substitute(body, x, &v), c.store.clone());
                    bump(eval_big_raw(&next, budget))
                }
                Err(_) => RunOutcome::Blocked {
                    config: c.clone(),
                    steps: 0,
                },
            }
        }
        Computation::Set(l, v, rest) => {
            if *budget == 0 {
                return RunOutcome::FuelExhausted {
                    config: c.clone(),
                    steps: 0,
                };
            }
            *budget -= 1;
            let next = Configuration::new(
                (**rest).clone(),
                StoreTerm::upd_val(*l, v.clone(), c.store.clone()),
            );
            bump(eval_big_raw(&next, budget))
        }
    }
}

fn bump(out: RunOutcome) -> RunOutcome {
    match out {
        RunOutcome::Converged {
            value,
            store,
            steps,
            index,
        } => RunOutcome::Converged {
            value,
            store,
            steps: steps + 1,
            index: index + 1,
        },
        RunOutcome::Blocked { config, steps } => RunOutcome::Blocked {
            config,
            steps: steps + 1,
        },
        RunOutcome::FuelExhausted { config, steps } => RunOutcome::FuelExhausted {
            config,
            steps: steps + 1,
        },
    }
}

/// Semi-decision of convergence from the empty store.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Convergence {
    /// Converged with a result witness.
    Yes(Value, StoreTerm),
    /// Reached a blocked configuration.
    No(Configuration),
    /// Fuel ran out; divergence is never claimed outright.
    Unknown,
}

/// Evaluates `(M, emp)`; convergence from the empty store implies
/// convergence from every store.
pub fn converges(m: &Computation, fuel: usize) -> Result<Convergence, EvalError> {
    let (outcome, _) = run(&Configuration::new(m.clone(), StoreTerm::Emp), fuel)?;
    Ok(match outcome {
        RunOutcome::Converged { value, store, .. } => Convergence::Yes(value, store),
        RunOutcome::Blocked { config, .. } => Convergence::No(config),
        RunOutcome::FuelExhausted { .. } => Convergence::Unknown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{alpha_eq_value, Location, Name};

    fn l(i: u32) -> Location {
        Location(i)
    }

    fn idv() -> Value {
        Value::identity()
    }

    #[test]
    fn omega_steps_to_itself() {
        let omega = Computation::omega();
        let c = Configuration::new(omega.clone(), StoreTerm::Emp);
        match step(&c).unwrap() {
            StepOutcome::Next(next) => {
                assert_eq!(next.comp, omega);
                assert_eq!(next.store, StoreTerm::Emp);
            }
            other => panic!("expected a step, got {other:?}"),
        }
    }

    #[test]
    fn set_pushes_raw_update() {
        // set[l](W). set[l](V). get[l](\x. unit x) steps to the inner set
        // with the store extended by W.
        let w = idv();
        let v = Value::lam("y", Computation::unit(Value::var("y")));
        let inner = Computation::set(
            l(0),
            v.clone(),
            Computation::get(l(0), "x", Computation::unit(Value::var("x"))),
        );
        let m = Computation::set(l(0), w.clone(), inner.clone());
        let c = Configuration::new(m, StoreTerm::Emp);
        match step(&c).unwrap() {
            StepOutcome::Next(next) => {
                assert_eq!(next.comp, inner);
                assert_eq!(next.store, StoreTerm::upd_val(l(0), w, StoreTerm::Emp));
            }
            other => panic!("expected a step, got {other:?}"),
        }
    }

    #[test]
    fn get_on_empty_store_is_blocked() {
        let m = Computation::get(l(0), "x", Computation::unit(Value::var("x")));
        let c = Configuration::new(m, StoreTerm::Emp);
        assert!(is_blocked(&c));
        assert!(matches!(step(&c).unwrap(), StepOutcome::Blocked(_)));
    }

    #[test]
    fn blocked_propagates_through_bind() {
        let b = Computation::get(l(0), "x", Computation::unit(Value::var("x")));
        let m = Computation::bind(b, idv());
        let c = Configuration::new(m, StoreTerm::Emp);
        assert!(is_blocked(&c));
        assert!(matches!(step(&c).unwrap(), StepOutcome::Blocked(_)));
    }

    #[test]
    fn unit_is_not_blocked() {
        let c = Configuration::new(Computation::unit(idv()), StoreTerm::Emp);
        assert!(!is_blocked(&c));
        assert!(matches!(step(&c).unwrap(), StepOutcome::Value(_, _)));
    }

    #[test]
    fn overriding_trace() {
        // (set[l](W). set[l](V). get[l](\x. unit x), emp) converges to V in
        // 3 steps with the exact intermediate configurations.
        let w = idv();
        let v = Value::lam("y", Computation::unit(Value::var("y")));
        let get = Computation::get(l(0), "x", Computation::unit(Value::var("x")));
        let m = Computation::set(
            l(0),
            w.clone(),
            Computation::set(l(0), v.clone(), get.clone()),
        );
        let start = Configuration::new(m, StoreTerm::Emp);
        let (outcome, trace) = run(&start, 10).unwrap();
        let s1 = StoreTerm::upd_val(l(0), w.clone(), StoreTerm::Emp);
        let s2 = StoreTerm::upd_val(l(0), v.clone(), s1.clone());
        match outcome {
            RunOutcome::Converged {
                value,
                store,
                steps,
                ..
            } => {
                assert!(alpha_eq_value(&value, &v));
                assert_eq!(store, s2);
                assert_eq!(steps, 3);
            }
            other => panic!("expected convergence, got {other:?}"),
        }
        assert_eq!(trace.len(), 4);
        assert_eq!(trace[1].store, s1);
        assert_eq!(trace[2], Configuration::new(get, s2.clone()));
        assert_eq!(trace[3], Configuration::new(Computation::unit(v), s2));
    }

    #[test]
    fn sequencing_discards_value_keeps_effect() {
        // (set[l](V). unit W) ; get[l](\x. N) reaches (N[V/x], upd(l,V,s))
        // in 3 steps.
        let v = idv();
        let w = Value::lam("w", Computation::unit(Value::var("w")));
        let n = Computation::bind(Computation::unit(Value::var("x")), Value::var("x"));
        let seq = Computation::bind(
            Computation::set(l(0), v.clone(), Computation::unit(w)),
            Value::Lam(
                Name::from("_"),
                Arc::new(Computation::get(l(0), "x", n.clone())),
            ),
        );
        let (outcome, trace) = run(&Configuration::new(seq, StoreTerm::Emp), 10).unwrap();
        let expected_store = StoreTerm::upd_val(l(0), v.clone(), StoreTerm::Emp);
        let expected_comp = substitute(&n, &Name::from("x"), &v);
        assert_eq!(trace[3], Configuration::new(expected_comp, expected_store));
        // The tail then diverges or converges depending on N; here N[V/x]
        // applies the identity to itself, which converges.
        assert!(outcome.is_converged());
    }

    #[test]
    fn omega_exhausts_fuel() {
        let c = Configuration::new(Computation::omega(), StoreTerm::Emp);
        let (outcome, trace) = run(&c, 100).unwrap();
        assert!(matches!(
            outcome,
            RunOutcome::FuelExhausted { steps: 100, .. }
        ));
        assert_eq!(trace.len(), 101);
    }

    #[test]
    fn eval_big_unit_has_weight_zero() {
        let c = Configuration::new(Computation::unit(idv()), StoreTerm::Emp);
        match eval_big(&c, 10).unwrap() {
            RunOutcome::Converged { index, steps, .. } => {
                assert_eq!(index, 0);
                assert_eq!(steps, 0);
            }
            other => panic!("expected convergence, got {other:?}"),
        }
    }

    #[test]
    fn eval_big_set_get_weight() {
        // set[l](V). get[l](\x. unit x) has big-step weight 2.
        let v = idv();
        let m = Computation::set(
            l(0),
            v.clone(),
            Computation::get(l(0), "x", Computation::unit(Value::var("x"))),
        );
        match eval_big(&Configuration::new(m, StoreTerm::Emp), 10).unwrap() {
            RunOutcome::Converged {
                value,
                store,
                index,
                ..
            } => {
                assert!(alpha_eq_value(&value, &v));
                assert_eq!(store, StoreTerm::upd_val(l(0), v, StoreTerm::Emp));
                assert_eq!(index, 2);
            }
            other => panic!("expected convergence, got {other:?}"),
        }
    }

    #[test]
    fn eval_big_blocked_get() {
        let m = Computation::get(l(0), "x", Computation::unit(Value::var("x")));
        assert!(matches!(
            eval_big(&Configuration::new(m, StoreTerm::Emp), 10).unwrap(),
            RunOutcome::Blocked { .. }
        ));
    }

    #[test]
    fn converges_examples() {
        let v = idv();
        let set_get = Computation::set(
            l(0),
            v,
            Computation::get(l(0), "x", Computation::unit(Value::var("x"))),
        );
        assert!(matches!(
            converges(&set_get, 100).unwrap(),
            Convergence::Yes(_, _)
        ));
        let blocked = Computation::get(l(0), "x", Computation::unit(Value::var("x")));
        assert!(matches!(
            converges(&blocked, 100).unwrap(),
            Convergence::No(_)
        ));
        assert!(matches!(
            converges(&Computation::unit(idv()), 100).unwrap(),
            Convergence::Yes(_, _)
        ));
        assert!(matches!(
            converges(&Computation::omega(), 100).unwrap(),
            Convergence::Unknown
        ));
    }

    #[test]
    fn open_configuration_rejected() {
        let c = Configuration::new(Computation::unit(Value::var("x")), StoreTerm::Emp);
        assert_eq!(step(&c), Err(EvalError::OpenTerm));
        assert!(run(&c, 10).is_err());
        assert!(eval_big(&c, 10).is_err());
    }
}
