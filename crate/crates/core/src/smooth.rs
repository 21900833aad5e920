//! Methods for β-smooth objectives.

use crate::descent::check_iterate;
use crate::{Error, FeasibleSet, NormKind, Objective, Result, State, Trace, Vector};

/// `x − g/β`.
pub fn smooth_gd_step(x: &Vector, g: &Vector, beta: f64) -> Vector {
    assert!(beta > 0.0, "smoothness must be positive");
    x.axpy(-1.0 / beta, g)
}

/// `f(x⁺) − (f(x) − ‖∇f(x)‖²/(2β))` for `x⁺ = x − ∇f(x)/β`. Non-positive
/// whenever `f` is β-smooth.
pub fn descent_lemma_gap(p: &dyn Objective, x: &Vector, beta: f64) -> f64 {
    let g = p.gradient(x);
    let next = smooth_gd_step(x, &g, beta);
    p.value(&next) - (p.value(x) - g.norm2_sq() / (2.0 * beta))
}

/// `Π_K(x − g/β)`.
pub fn projected_smooth_step(set: &FeasibleSet, x: &Vector, g: &Vector, beta: f64) -> Vector {
    set.project(&smooth_gd_step(x, g, beta))
}

/// For `x⁺ = Π_K(x − ∇f(x)/β)` and any member `y`, returns
/// `[f(x⁺) − f(y)] − [β⟨x − x⁺, x − y⟩ − (β/2)‖x − x⁺‖²]`, which is
/// non-positive for β-smooth convex `f`.
pub fn claim_proj_magic_gap(set: &FeasibleSet, p: &dyn Objective, x: &Vector, y: &Vector, beta: f64) -> f64 {
    let next = projected_smooth_step(set, x, &p.gradient(x), beta);
    let step = x - &next;
    let lhs = p.value(&next) - p.value(y);
    let rhs = beta * step.dot(&(x - y)) - 0.5 * beta * step.norm2_sq();
    lhs - rhs
}

/// Linear minimization oracle over a bounded set.
pub fn lmo(set: &FeasibleSet, g: &Vector) -> Result<Vector> {
    set.lmo(g)
}

/// `(1 − η)x + η·lmo(g)`. Stays feasible by convexity, so `η` must lie in
/// `[0, 1]`.
pub fn frank_wolfe_step(set: &FeasibleSet, x: &Vector, g: &Vector, eta: f64) -> Result<Vector> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::invalid("eta", "Frank-Wolfe step must lie in [0, 1]"));
    }
    let vertex = set.lmo(g)?;
    Ok(x.lincomb(1.0 - eta, eta, &vertex))
}

/// Frank–Wolfe step-size rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FwSchedule {
    /// `η_t = 1/(t+1)`.
    Harmonic,
    /// `η_t = 2/(t+2)`: the `2/(t+1)` rule with iterations counted from one,
    /// so the first step is exactly 1.
    Doubled,
}

impl FwSchedule {
    pub fn eta(self, t: usize) -> f64 {
        match self {
            FwSchedule::Harmonic => 1.0 / (t + 1) as f64,
            FwSchedule::Doubled => 2.0 / (t + 2) as f64,
        }
    }
}

pub fn run_frank_wolfe(
    p: &dyn Objective,
    set: &FeasibleSet,
    x0: &Vector,
    sched: FwSchedule,
    steps: usize,
) -> Result<Trace> {
    if !set.is_bounded() {
        return Err(Error::Unsupported("Frank-Wolfe needs a bounded set".into()));
    }
    set.require_member(x0, "x0")?;
    let mut trace = Trace::new();
    let mut x = x0.clone();
    for t in 0..steps {
        let g = p.gradient(&x);
        let eta = sched.eta(t);
        trace.push_state(State::single(x.clone()));
        trace.record_round(p.value(&x), g.clone(), eta);
        x = frank_wolfe_step(set, &x, &g, eta)?;
        check_iterate(&x, t + 1)?;
    }
    trace.push_state(State::single(x));
    Ok(trace)
}

/// Projected smooth gradient descent with step `1/β` (plain smooth descent
/// when `set` is unconstrained).
pub fn run_smooth_gd(p: &dyn Objective, set: &FeasibleSet, x0: &Vector, beta: f64, steps: usize) -> Result<Trace> {
    if !(beta > 0.0) {
        return Err(Error::invalid("beta", "smoothness must be positive"));
    }
    set.require_member(x0, "x0")?;
    let mut trace = Trace::new();
    let mut x = x0.clone();
    for t in 0..steps {
        let g = p.gradient(&x);
        trace.push_state(State::single(x.clone()));
        trace.record_round(p.value(&x), g.clone(), 1.0 / beta);
        x = projected_smooth_step(set, &x, &g, beta);
        check_iterate(&x, t + 1)?;
    }
    trace.push_state(State::single(x));
    Ok(trace)
}

/// A well-conditioned run together with its condition number.
#[derive(Debug, Clone)]
pub struct WellConditionedRun {
    pub trace: Trace,
    pub kappa: f64,
    /// `γ = 1/(κ − 1)`; undefined when `κ = 1`.
    pub gamma: Option<f64>,
}

/// Smooth descent on an α-strongly convex, β-smooth objective. With `κ = 1`
/// a single step lands on the minimizer and the run stops there.
pub fn run_well_conditioned(p: &dyn Objective, x0: &Vector, steps: usize) -> Result<WellConditionedRun> {
    run_well_conditioned_over(p, &FeasibleSet::unconstrained(p.dim()), x0, steps)
}

/// [`run_well_conditioned`] with projection onto `set`.
pub fn run_well_conditioned_over(
    p: &dyn Objective,
    set: &FeasibleSet,
    x0: &Vector,
    steps: usize,
) -> Result<WellConditionedRun> {
    let c = p.constants();
    let (alpha, beta) = match (c.alpha, c.beta) {
        (Some(a), Some(b)) if a > 0.0 && b >= a => (a, b),
        _ => return Err(Error::invalid("problem", "needs declared 0 < α ≤ β")),
    };
    let kappa = beta / alpha;
    if kappa == 1.0 {
        let trace = run_smooth_gd(p, set, x0, beta, steps.min(1))?;
        return Ok(WellConditionedRun { trace, kappa, gamma: None });
    }
    Ok(WellConditionedRun {
        trace: run_smooth_gd(p, set, x0, beta, steps)?,
        kappa,
        gamma: Some(1.0 / (kappa - 1.0)),
    })
}

/// `argmin_y {½‖y − x‖² + (1/β)⟨g, y − x⟩}` under `norm`.
///
/// The ℓ1 step moves only the coordinate with the largest `|gᵢ|` (lowest
/// index on ties); the ℓ∞ step moves every coordinate by `‖g‖₁/β`.
pub fn general_norm_smooth_step(norm: NormKind, x: &Vector, g: &Vector, beta: f64) -> Vector {
    assert!(beta > 0.0, "smoothness must be positive");
    match norm {
        NormKind::Euclidean => smooth_gd_step(x, g, beta),
        NormKind::L1 => {
            let mut next = x.clone();
            if let Some(i) = g.argmax_abs() {
                next[i] -= g[i].signum() * g.norm_inf() / beta * (g[i] != 0.0) as u8 as f64;
            }
            next
        }
        NormKind::LInf => {
            let r = g.norm1() / beta;
            x.zip_map(g, |xi, gi| if gi == 0.0 { xi } else { xi - r * gi.signum() })
        }
    }
}

/// The optimal value of the model minimized by [`general_norm_smooth_step`]:
/// `−½‖g/β‖_*²`.
pub fn general_norm_model_value(norm: NormKind, g: &Vector, beta: f64) -> f64 {
    let d = norm.dual_norm(g) / beta;
    -0.5 * d * d
}

/// Steepest descent with the general-norm smooth step.
pub fn run_general_norm_gd(p: &dyn Objective, norm: NormKind, x0: &Vector, steps: usize) -> Result<Trace> {
    let beta = p
        .smoothness_wrt(norm)
        .filter(|b| *b > 0.0)
        .ok_or_else(|| Error::invalid("problem", "no smoothness constant for this norm"))?;
    let mut trace = Trace::new();
    let mut x = x0.clone();
    for t in 0..steps {
        let g = p.gradient(&x);
        trace.push_state(State::single(x.clone()));
        trace.record_round(p.value(&x), g.clone(), 1.0 / beta);
        x = general_norm_smooth_step(norm, &x, &g, beta);
        check_iterate(&x, t + 1)?;
    }
    trace.push_state(State::single(x));
    Ok(trace)
}
