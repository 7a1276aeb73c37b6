//! Analytic error bounds and step-count planning.
//!
//! Every analytic bound is a per-step bound chained over `N` steps: since the
//! operator norm is unitarily invariant, `‖V₁W₁ − V₂W₂‖ ≤ ‖V₁ − V₂‖ + ‖W₁ − W₂‖`.

use std::fmt;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::dense::{dense_of_expansion, operator_norm, DenseConfig};
use crate::error::{Error, Result};
use crate::pauli::{max_coupling, HamExpansion};
use crate::synth::Order;

/// Default ceiling for the constant of the global bound.
pub const DEFAULT_GLOBAL_C: f64 = 1e4;

/// Largest step count an analytic plan may request.
pub const MAX_ANALYTIC_STEPS: usize = 100_000_000;

/// Largest step count the empirical search will try.
pub const MAX_EMPIRICAL_STEPS: usize = 1 << 20;

/// Largest register on which bound constants use dense commutator norms;
/// above it the Pauli-level bound is used.
pub const DENSE_BOUND_MAX_QUBITS: usize = 4;

/// Which bound drives step-count planning.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum BoundKind {
    /// `8 t Δ`, the first-order bound of the controlled-NOT example.
    FirstOrderCnot,
    /// `½ t Δ²`, the second-order bound of the controlled-NOT example.
    SecondOrderCnot,
    /// `C D² t Δ` with `D = |h k / h_rs|`.
    Global { c: f64 },
    /// Per-step commutator bound of the actual schedule, times `N`.
    Chained,
    /// Smallest `N` whose dense-measured error meets the target. Not analytic.
    Empirical,
}

impl BoundKind {
    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::FirstOrderCnot => "first_order_cnot",
            BoundKind::SecondOrderCnot => "second_order_cnot",
            BoundKind::Global { .. } => "global",
            BoundKind::Chained => "chained",
            BoundKind::Empirical => "empirical",
        }
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self, BoundKind::Empirical)
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How many Trotter steps to use.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum StepCount {
    Fixed(usize),
    Accuracy { epsilon: f64, bound: BoundKind },
}

/// Constants of the global bound.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GlobalConstants {
    pub c: f64,
    pub d: f64,
    pub h: f64,
    pub k: f64,
    pub h_rs: f64,
}

/// The chosen step count and what it is predicted to achieve.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorPlan {
    /// `None` when the step count was fixed by the caller.
    pub bound: Option<BoundKind>,
    pub order: Order,
    pub steps: usize,
    pub delta: f64,
    pub t: f64,
    /// Value of the planning bound at `steps` (measured error for empirical plans,
    /// the chained bound for fixed step counts).
    pub predicted_error: f64,
    /// Chained analytic bound at `steps`, always reported.
    pub chained_bound: f64,
    /// Per-step bound is `per_step_coefficient · Δ^(order+1)`.
    pub per_step_coefficient: f64,
    pub constants: Option<GlobalConstants>,
}

/// What the planner needs to know about a compilation.
pub trait StepModel {
    fn order(&self) -> Order;
    fn total_time(&self) -> f64;
    /// `c` such that one step of length `Δ` errs by at most `c · Δ^(order+1)`.
    fn per_step_coefficient(&self, config: &DenseConfig) -> Result<f64>;
    fn global_constants(&self, c: f64) -> Result<GlobalConstants>;
    /// Dense phase-aligned error of the `steps`-step schedule.
    fn measured_error(&self, steps: usize, config: &DenseConfig) -> Result<f64>;
}

/// Commutator norms and norms, dense for small registers and Pauli-level otherwise.
#[derive(Copy, Clone, Debug)]
pub(crate) struct NormEstimator {
    dense: bool,
}

impl NormEstimator {
    pub(crate) fn for_qubits(n: usize, config: &DenseConfig) -> Self {
        NormEstimator { dense: n <= config.cap.min(DENSE_BOUND_MAX_QUBITS) }
    }

    /// Norm of the traceless part (identity terms do not enter commutators).
    pub(crate) fn norm(&self, a: &HamExpansion) -> f64 {
        let a = a.without_identity();
        if self.dense {
            operator_norm(&dense_of_expansion(&a))
        } else {
            a.one_norm()
        }
    }

    pub(crate) fn commutator_norm(&self, a: &HamExpansion, b: &HamExpansion) -> f64 {
        if self.dense {
            dense_commutator_norm(a, b)
        } else {
            pauli_commutator_norm(a, b)
        }
    }

    /// `½ Σ_{i<j} ‖[A_i, A_j]‖`.
    pub(crate) fn first_order_coefficient(&self, terms: &[HamExpansion]) -> f64 {
        let pairs: Vec<(usize, usize)> = (0..terms.len())
            .flat_map(|i| ((i + 1)..terms.len()).map(move |j| (i, j)))
            .collect();
        let f = |&(i, j): &(usize, usize)| self.commutator_norm(&terms[i], &terms[j]);
        #[cfg(feature = "parallel")]
        let norms: Vec<f64> = pairs.par_iter().map(f).collect();
        #[cfg(not(feature = "parallel"))]
        let norms: Vec<f64> = pairs.iter().map(f).collect();
        0.5 * norms.iter().sum::<f64>()
    }

    /// Suffix sums `R_i = A_{i+1} + … + A_m`.
    fn suffixes(terms: &[HamExpansion]) -> Result<Vec<HamExpansion>> {
        let mut out = vec![HamExpansion::zero(terms.first().map_or(0, HamExpansion::n)); terms.len()];
        for i in (0..terms.len().saturating_sub(1)).rev() {
            out[i] = out[i + 1].add(&terms[i + 1])?;
        }
        Ok(out)
    }

    /// Forward product as nested two-term splittings: `½ Σ_i ‖[A_i, R_i]‖`.
    pub(crate) fn nested_first_order_coefficient(&self, terms: &[HamExpansion]) -> Result<f64> {
        let rest = Self::suffixes(terms)?;
        let f = |i: usize| self.commutator_norm(&terms[i], &rest[i]);
        #[cfg(feature = "parallel")]
        let norms: Vec<f64> = (0..terms.len()).into_par_iter().map(f).collect();
        #[cfg(not(feature = "parallel"))]
        let norms: Vec<f64> = (0..terms.len()).map(f).collect();
        Ok(0.5 * norms.iter().sum::<f64>())
    }

    /// Symmetric splitting of `A_1 … A_m` as nested two-term splittings:
    /// `Σ_i (1/6)‖A_i‖‖R_i‖(‖A_i‖ + 2‖R_i‖)`.
    pub(crate) fn second_order_coefficient(&self, terms: &[HamExpansion]) -> Result<f64> {
        let rest = Self::suffixes(terms)?;
        let f = |i: usize| second_order_correction(self.norm(&terms[i]), self.norm(&rest[i]), 1.0);
        let m = terms.len().saturating_sub(1);
        #[cfg(feature = "parallel")]
        let parts: Vec<f64> = (0..m).into_par_iter().map(f).collect();
        #[cfg(not(feature = "parallel"))]
        let parts: Vec<f64> = (0..m).map(f).collect();
        Ok(parts.iter().sum())
    }

    pub(crate) fn coefficient(&self, terms: &[HamExpansion], order: Order) -> Result<f64> {
        match order {
            Order::First => self.nested_first_order_coefficient(terms),
            Order::Second => self.second_order_coefficient(terms),
        }
    }
}

fn dense_commutator_norm(a: &HamExpansion, b: &HamExpansion) -> f64 {
    let (da, db) = (dense_of_expansion(a), dense_of_expansion(b));
    let ab = da.matmul(&db).expect("same register");
    let ba = db.matmul(&da).expect("same register");
    operator_norm(&ab.sub(&ba).expect("same register"))
}

/// `Σ 2|a_p||b_q|` over anticommuting pairs: a valid bound on `‖[A, B]‖`.
fn pauli_commutator_norm(a: &HamExpansion, b: &HamExpansion) -> f64 {
    let mut total = 0.0;
    for (p, x) in a.terms() {
        for (q, y) in b.terms() {
            if !p.commutes_with(q) {
                total += 2.0 * x.abs() * y.abs();
            }
        }
    }
    total
}

/// `(τ²/2) Σ_{j<k} ‖[A_j, A_k]‖`, computed with dense commutators.
pub fn commutator_bound(terms: &[HamExpansion], tau: f64, config: &DenseConfig) -> Result<f64> {
    let n = match terms.first() {
        Some(t) => t.n(),
        None => return Ok(0.0),
    };
    if terms.iter().any(|t| t.n() != n) {
        return Err(Error::InvalidTerm("terms act on different registers".into()));
    }
    config.check(n)?;
    let est = NormEstimator { dense: true };
    Ok(tau * tau * est.first_order_coefficient(terms))
}

/// Same bound with `‖[A, B]‖ ≤ Σ 2|a_p||b_q|` over anticommuting Pauli pairs;
/// usable at any register size.
pub fn commutator_bound_symbolic(terms: &[HamExpansion], tau: f64) -> f64 {
    let est = NormEstimator { dense: false };
    tau * tau * est.first_order_coefficient(terms)
}

/// `(1/6)‖J₁‖‖J₂‖(‖J₁‖ + 2‖J₂‖) Δ³` for `e^{-iΔJ₁/2} e^{-iΔJ₂} e^{-iΔJ₁/2}`.
pub fn second_order_correction(j1_norm: f64, j2_norm: f64, delta: f64) -> f64 {
    j1_norm * j2_norm * (j1_norm + 2.0 * j2_norm) * delta.powi(3) / 6.0
}

/// Constants `h`, `k`, `h_rs` and `D = |h k / h_rs|` for two-qubit `H` and `K`.
pub fn global_constants(h: &HamExpansion, k: &HamExpansion, c: f64) -> Result<GlobalConstants> {
    let h_rs = max_coupling(h, (0, 1))?.coefficient.abs();
    let hmax = h.max_abs_coefficient();
    let kmax = k.max_abs_coefficient();
    Ok(GlobalConstants { c, d: (hmax * kmax / h_rs).abs(), h: hmax, k: kmax, h_rs })
}

/// `C D² t Δ`.
pub fn global_bound(h: &HamExpansion, k: &HamExpansion, t: f64, delta: f64, c: f64) -> Result<f64> {
    let g = global_constants(h, k, c)?;
    Ok(g.c * g.d * g.d * t * delta)
}

fn predicted(kind: BoundKind, steps: usize, t: f64, order: Order, coef: f64, g: Option<&GlobalConstants>) -> f64 {
    let n = steps as f64;
    let delta = t / n;
    match kind {
        BoundKind::FirstOrderCnot => 8.0 * t * delta,
        BoundKind::SecondOrderCnot => 0.5 * t * delta * delta,
        BoundKind::Global { .. } => {
            let g = g.expect("global constants");
            g.c * g.d * g.d * t * delta
        }
        BoundKind::Chained | BoundKind::Empirical => chained(coef, steps, t, order),
    }
}

fn chained(coef: f64, steps: usize, t: f64, order: Order) -> f64 {
    let delta = t / steps as f64;
    let p = order.as_u8() as i32 + 1;
    coef * steps as f64 * delta.powi(p)
}

/// Choose the smallest `N` whose predicted error is at most `epsilon`.
pub fn plan_steps<M: StepModel + ?Sized>(
    kind: BoundKind,
    epsilon: f64,
    model: &M,
    config: &DenseConfig,
) -> Result<ErrorPlan> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::Infeasible(format!("accuracy target {epsilon} must be positive")));
    }
    let order = model.order();
    let t = model.total_time();
    match (kind, order) {
        (BoundKind::FirstOrderCnot, Order::Second) | (BoundKind::SecondOrderCnot, Order::First) => {
            return Err(Error::InvalidStep(format!("bound {kind} does not apply at order {}", order.as_u8())));
        }
        _ => {}
    }
    let coef = model.per_step_coefficient(config)?;
    let constants = match kind {
        BoundKind::Global { c } => Some(model.global_constants(c)?),
        _ => model.global_constants(DEFAULT_GLOBAL_C).ok(),
    };

    let (steps, predicted_error) = if let BoundKind::Empirical = kind {
        empirical_steps(epsilon, model, config)?
    } else {
        let f = |n: usize| predicted(kind, n, t, order, coef, constants.as_ref());
        let p = f64::from(order.as_u8() as u32);
        // f(N) ∝ N^(-p) for the chained bound and N^(-1) or N^(-2) for the others
        let exponent = match kind {
            BoundKind::FirstOrderCnot | BoundKind::Global { .. } => 1.0,
            BoundKind::SecondOrderCnot => 2.0,
            _ => p,
        };
        let at_one = f(1);
        if !at_one.is_finite() {
            return Err(Error::Infeasible(format!("bound {kind} is not finite")));
        }
        let guess = (at_one / epsilon).powf(1.0 / exponent).ceil();
        if guess > MAX_ANALYTIC_STEPS as f64 {
            return Err(Error::Infeasible(format!(
                "bound {kind} needs about {guess:e} steps for accuracy {epsilon:e}"
            )));
        }
        let mut n = (guess as usize).max(1);
        while f(n) > epsilon {
            n += 1;
        }
        while n > 1 && f(n - 1) <= epsilon {
            n -= 1;
        }
        (n, f(n))
    };

    Ok(ErrorPlan {
        bound: Some(kind),
        order,
        steps,
        delta: t / steps as f64,
        t,
        predicted_error,
        chained_bound: chained(coef, steps, t, order),
        per_step_coefficient: coef,
        constants,
    })
}

/// Plan for a caller-chosen step count; the prediction is the chained bound.
pub fn fixed_plan<M: StepModel + ?Sized>(steps: usize, model: &M, config: &DenseConfig) -> Result<ErrorPlan> {
    if steps == 0 {
        return Err(Error::InvalidStep("step count must be at least 1".into()));
    }
    let order = model.order();
    let t = model.total_time();
    let coef = model.per_step_coefficient(config)?;
    let bound = chained(coef, steps, t, order);
    Ok(ErrorPlan {
        bound: None,
        order,
        steps,
        delta: t / steps as f64,
        t,
        predicted_error: bound,
        chained_bound: bound,
        per_step_coefficient: coef,
        constants: model.global_constants(DEFAULT_GLOBAL_C).ok(),
    })
}

/// Doubling search followed by bisection on the measured error.
fn empirical_steps<M: StepModel + ?Sized>(epsilon: f64, model: &M, config: &DenseConfig) -> Result<(usize, f64)> {
    let mut hi = 1usize;
    let mut hi_err = model.measured_error(hi, config)?;
    let mut lo = 0usize;
    while hi_err > epsilon {
        if hi >= MAX_EMPIRICAL_STEPS {
            return Err(Error::Infeasible(format!(
                "measured error {hi_err:e} still above {epsilon:e} at {hi} steps"
            )));
        }
        lo = hi;
        hi *= 2;
        hi_err = model.measured_error(hi, config)?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let err = model.measured_error(mid, config)?;
        if err <= epsilon {
            hi = mid;
            hi_err = err;
        } else {
            lo = mid;
        }
    }
    Ok((hi, hi_err))
}
