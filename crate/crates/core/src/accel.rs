//! Nesterov acceleration.
//!
//! The two-sequence form couples a cautious smooth step `y` with an
//! aggressive mirror step `z` and plays their convex combination `x`:
//!
//! ```text
//! y⁺ = x − ∇f(x)/β
//! z⁺ = z − η_t ∇f(x)
//! x⁺ = (1 − τ_{t+1}) y⁺ + τ_{t+1} z⁺
//! ```
//!
//! The one-sequence form (AGM1) drives the same iterates through the
//! recurrence `λ_t² − λ_{t−1}² = λ_t`. The strongly convex variant replaces
//! the growing step sizes with a fixed momentum and converges linearly.

use alloc::vec::Vec;

use crate::descent::check_iterate;
use crate::mirror::{mirror_step, MirrorMap};
use crate::smooth::{general_norm_smooth_step, projected_smooth_step, smooth_gd_step};
use crate::{Error, FeasibleSet, NormKind, Objective, Result, State, Trace, Vector};

/// `(x_t, y_t, z_t)` at step `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AccelState {
    pub x: Vector,
    pub y: Vector,
    pub z: Vector,
    pub t: usize,
}

impl AccelState {
    /// `x₀ = y₀ = z₀`.
    pub fn start(x0: &Vector) -> Self {
        AccelState {
            x: x0.clone(),
            y: x0.clone(),
            z: x0.clone(),
            t: 0,
        }
    }

    pub fn to_state(&self) -> State {
        State::coupled(self.x.clone(), self.y.clone(), self.z.clone())
    }
}

/// Step-size and coupling rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AccelSchedule {
    /// `η_t = (t+1)/(2β)`, `τ_t = 2/(t+2)`.
    PaperSmooth,
    /// `η_t = λ_t/β`, `τ_t = 1/λ_t`.
    LambdaCoupled,
    /// Projected coupling with `η_t = (t+1)/(2β)` (`full == false`) or
    /// `η_t = (t+1)/β` (`full == true`); `τ_t = 2/(t+2)`.
    ConstrainedSmooth { full: bool },
    /// `η_t = (t+1)α_h/(2β)`, `τ_t = 2/(t+2)`.
    GeneralNorm { alpha_h: f64 },
    /// Fixed `τ = 1/(√κ + 1)`.
    StronglyConvex { kappa: f64 },
}

impl AccelSchedule {
    pub fn id(&self) -> &'static str {
        match self {
            AccelSchedule::PaperSmooth => "paper-smooth",
            AccelSchedule::LambdaCoupled => "lambda-coupled",
            AccelSchedule::ConstrainedSmooth { full: false } => "constrained-half",
            AccelSchedule::ConstrainedSmooth { full: true } => "constrained-full",
            AccelSchedule::GeneralNorm { .. } => "general-norm",
            AccelSchedule::StronglyConvex { .. } => "strongly-convex",
        }
    }

    /// `η_t`.
    pub fn eta(&self, t: usize, beta: f64) -> f64 {
        let k = (t + 1) as f64;
        match *self {
            AccelSchedule::PaperSmooth | AccelSchedule::ConstrainedSmooth { full: false } => k / (2.0 * beta),
            AccelSchedule::ConstrainedSmooth { full: true } => k / beta,
            AccelSchedule::GeneralNorm { alpha_h } => k * alpha_h / (2.0 * beta),
            AccelSchedule::LambdaCoupled => lambda_at(t) / beta,
            AccelSchedule::StronglyConvex { kappa } => {
                // z-step of the strongly convex form, with α = β/κ.
                let sk = libm::sqrt(kappa);
                kappa / (beta * sk)
            }
        }
    }

    /// `τ_t` for `t ≥ 1`.
    pub fn tau(&self, t: usize) -> f64 {
        match *self {
            AccelSchedule::LambdaCoupled => 1.0 / lambda_at(t),
            AccelSchedule::StronglyConvex { kappa } => 1.0 / (libm::sqrt(kappa) + 1.0),
            _ => 2.0 / (t + 2) as f64,
        }
    }
}

/// `λ₀ = 0`, `λ_t = (1 + √(1 + 4λ_{t−1}²))/2` for `t = 0..=T`.
pub fn lambda_schedule(horizon: usize) -> Vec<f64> {
    let mut lam = Vec::with_capacity(horizon + 1);
    lam.push(0.0);
    for t in 1..=horizon {
        let prev: f64 = lam[t - 1];
        lam.push((1.0 + libm::sqrt(1.0 + 4.0 * prev * prev)) / 2.0);
    }
    lam
}

fn lambda_at(t: usize) -> f64 {
    lambda_schedule(t)[t]
}

fn coupled_step(set: &FeasibleSet, p: &dyn Objective, s: &AccelState, beta: f64, eta: f64, tau: f64) -> AccelState {
    let g = p.gradient(&s.x);
    let y = projected_smooth_step(set, &s.x, &g, beta);
    let z = set.project(&s.z.axpy(-eta, &g));
    let x = y.lincomb(1.0 - tau, tau, &z);
    AccelState { x, y, z, t: s.t + 1 }
}

/// One unconstrained two-sequence step.
pub fn agm2_step(p: &dyn Objective, s: &AccelState, beta: f64, sched: AccelSchedule) -> Result<AccelState> {
    if !matches!(sched, AccelSchedule::PaperSmooth | AccelSchedule::LambdaCoupled) {
        return Err(Error::invalid("schedule", "agm2 takes paper-smooth or lambda-coupled"));
    }
    let free = FeasibleSet::unconstrained(s.x.dim());
    Ok(coupled_step(&free, p, s, beta, sched.eta(s.t, beta), sched.tau(s.t + 1)))
}

/// One AGM1 step: returns `(x_{t+1}, y_{t+1})`.
pub fn agm1_step(p: &dyn Objective, x: &Vector, y_prev: &Vector, lam_t: f64, lam_next: f64, beta: f64) -> (Vector, Vector) {
    assert!(lam_next > 0.0, "λ_(t+1) must be positive");
    let y = smooth_gd_step(x, &p.gradient(x), beta);
    let c = (1.0 - lam_t) / lam_next;
    let x_next = y.lincomb(1.0 - c, c, y_prev);
    (x_next, y)
}

/// `z = λx − (λ − 1)y`.
pub fn agm1_to_agm2_state(x: &Vector, y: &Vector, lam: f64) -> Vector {
    x.lincomb(lam, 1.0 - lam, y)
}

/// One projected two-sequence step with an explicit `η_t`.
pub fn constrained_agm_step(set: &FeasibleSet, p: &dyn Objective, s: &AccelState, beta: f64, eta_t: f64) -> AccelState {
    coupled_step(set, p, s, beta, eta_t, 2.0 / (s.t + 3) as f64)
}

/// `argmin_{y∈Δ} ⟨g, y − x⟩ + (β/2)‖y − x‖₁²` for `x` in the simplex.
///
/// For a transferred mass `s` the best move puts `s` on the smallest
/// gradient coordinate and withdraws it from the largest ones first, each
/// capped by its current mass. The objective is then convex and piecewise
/// quadratic in `s`; the scan stops on the first piece holding a stationary
/// point.
pub fn l1_prox_simplex(x: &Vector, g: &Vector, beta: f64) -> Vector {
    let Some(sink) = g.argmin() else {
        return x.clone();
    };
    let gmin = g[sink];
    let mut donors: Vec<usize> = (0..x.dim()).filter(|&j| j != sink && x[j] > 0.0).collect();
    donors.sort_by(|&a, &b| g[b].total_cmp(&g[a]).then(a.cmp(&b)));
    let mut y = x.clone();
    let mut moved = 0.0;
    for j in donors {
        let slope = gmin - g[j];
        if slope >= 0.0 {
            break;
        }
        // On this piece the derivative in s is slope + 4βs.
        let stationary = -slope / (4.0 * beta);
        let take = (stationary - moved).min(x[j]);
        if take <= 0.0 {
            break;
        }
        y[j] -= take;
        moved += take;
        if take < x[j] {
            break;
        }
    }
    y[sink] += moved;
    y
}

/// One general-norm step: a smooth step in the map's norm for `y`, a
/// mirror step for `z`, and the usual coupling.
pub fn general_norm_agm_step(
    map: MirrorMap,
    set: &FeasibleSet,
    p: &dyn Objective,
    s: &AccelState,
    beta: f64,
) -> Result<AccelState> {
    if !map.supports(set) {
        return Err(Error::Unsupported(alloc::format!(
            "{} map over a {} set",
            map.id(),
            set.kind()
        )));
    }
    let sched = AccelSchedule::GeneralNorm { alpha_h: map.alpha_h() };
    let g = p.gradient(&s.x);
    let y = match (map, set) {
        (MirrorMap::Euclidean, _) => projected_smooth_step(set, &s.x, &g, beta),
        (MirrorMap::NegEntropy, FeasibleSet::Simplex { .. }) => l1_prox_simplex(&s.x, &g, beta),
        (MirrorMap::NegEntropy, _) => general_norm_smooth_step(NormKind::L1, &s.x, &g, beta),
    };
    let z = mirror_step(map, set, &s.z, &g, sched.eta(s.t, beta))?;
    let tau = sched.tau(s.t + 1);
    let x = y.lincomb(1.0 - tau, tau, &z);
    Ok(AccelState { x, y, z, t: s.t + 1 })
}

/// Momentum coefficient `(√κ − 1)/(√κ + 1)`.
pub fn sc_momentum(kappa: f64) -> f64 {
    let sk = libm::sqrt(kappa);
    (sk - 1.0) / (sk + 1.0)
}

/// One strongly convex step: returns `(x_{t+1}, y_{t+1})`.
pub fn sc_agm_step(p: &dyn Objective, x: &Vector, y_prev: &Vector, kappa: f64, beta: f64) -> Result<(Vector, Vector)> {
    if !(kappa >= 1.0) {
        return Err(Error::invalid("kappa", "condition number must be at least 1"));
    }
    let m = sc_momentum(kappa);
    let y = smooth_gd_step(x, &p.gradient(x), beta);
    let x_next = y.lincomb(1.0 + m, -m, y_prev);
    Ok((x_next, y))
}

/// `z = √κ(x − y) + x`.
pub fn sc_agm_z(x: &Vector, y: &Vector, kappa: f64) -> Vector {
    let sk = libm::sqrt(kappa);
    x.lincomb(1.0 + sk, -sk, y)
}

/// Largest coordinate gap between `z_next` and
/// `(1 − 1/√κ)z + x/√κ − ∇f(x)/(α√κ)`.
pub fn sc_agm_claim_residual(p: &dyn Objective, x: &Vector, z: &Vector, z_next: &Vector, kappa: f64, alpha: f64) -> f64 {
    let sk = libm::sqrt(kappa);
    let predicted = z.lincomb(1.0 - 1.0 / sk, 1.0 / sk, x).axpy(-1.0 / (alpha * sk), &p.gradient(x));
    predicted.max_abs_diff(z_next)
}

fn beta_of(p: &dyn Objective) -> Result<f64> {
    p.constants()
        .beta
        .filter(|b| *b > 0.0)
        .ok_or_else(|| Error::invalid("problem", "needs a declared smoothness constant"))
}

fn push(trace: &mut Trace, p: &dyn Objective, s: &AccelState, eta: f64) {
    trace.push_state(s.to_state());
    trace.record_round(p.value(&s.y), p.gradient(&s.x), eta);
}

/// Runs the two-sequence method. `PaperSmooth` and `LambdaCoupled` need an
/// unconstrained set; `ConstrainedSmooth` projects onto `set`.
pub fn run_accelerated(
    p: &dyn Objective,
    set: &FeasibleSet,
    x0: &Vector,
    sched: AccelSchedule,
    steps: usize,
) -> Result<Trace> {
    let beta = beta_of(p)?;
    match sched {
        AccelSchedule::PaperSmooth | AccelSchedule::LambdaCoupled if set.is_bounded() => {
            return Err(Error::invalid("schedule", "use a constrained schedule on a bounded set"))
        }
        AccelSchedule::GeneralNorm { .. } | AccelSchedule::StronglyConvex { .. } => {
            return Err(Error::invalid("schedule", "use the dedicated runner for this schedule"))
        }
        _ => {}
    }
    set.require_member(x0, "x0")?;
    let lam = lambda_schedule(steps + 1);
    let coeffs = |t: usize| match sched {
        AccelSchedule::LambdaCoupled => (lam[t] / beta, 1.0 / lam[t + 1]),
        _ => (sched.eta(t, beta), sched.tau(t + 1)),
    };
    let mut trace = Trace::new();
    let mut s = AccelState::start(x0);
    for t in 0..steps {
        let (eta, tau) = coeffs(t);
        push(&mut trace, p, &s, eta);
        s = coupled_step(set, p, &s, beta, eta, tau);
        check_iterate(&s.x, t + 1)?;
    }
    trace.push_state(s.to_state());
    Ok(trace)
}

/// Runs AGM1 from `x₀ = y₀`, recording `z_t = λ_t x_t − (λ_t − 1)y_t`.
pub fn run_agm1(p: &dyn Objective, x0: &Vector, steps: usize) -> Result<Trace> {
    let beta = beta_of(p)?;
    let lam = lambda_schedule(steps + 1);
    let mut trace = Trace::new();
    let (mut x, mut y) = (x0.clone(), x0.clone());
    for t in 0..steps {
        // z₀ = x₀ by convention (λ₀ = 0 would give y₀, which is the same point).
        let z = agm1_to_agm2_state(&x, &y, lam[t]);
        trace.push_state(State::coupled(x.clone(), y.clone(), z));
        trace.record_round(p.value(&y), p.gradient(&x), lam[t] / beta);
        let (xn, yn) = agm1_step(p, &x, &y, lam[t], lam[t + 1], beta);
        x = xn;
        y = yn;
        check_iterate(&x, t + 1)?;
    }
    let z = agm1_to_agm2_state(&x, &y, lam[steps]);
    trace.push_state(State::coupled(x, y, z));
    Ok(trace)
}

/// Runs the general-norm method; `β` is the smoothness wrt the map's norm.
pub fn run_general_norm_agm(
    map: MirrorMap,
    set: &FeasibleSet,
    p: &dyn Objective,
    x0: &Vector,
    steps: usize,
) -> Result<Trace> {
    let beta = p
        .smoothness_wrt(map.norm())
        .filter(|b| *b > 0.0)
        .ok_or_else(|| Error::invalid("problem", "no smoothness constant for the map's norm"))?;
    set.require_member(x0, "x0")?;
    if !map.is_interior(x0) {
        return Err(Error::OutsideDomain("x0 must be interior for the mirror map".into()));
    }
    let sched = AccelSchedule::GeneralNorm { alpha_h: map.alpha_h() };
    let mut trace = Trace::new();
    let mut s = AccelState::start(x0);
    for t in 0..steps {
        push(&mut trace, p, &s, sched.eta(t, beta));
        s = general_norm_agm_step(map, set, p, &s, beta)?;
        check_iterate(&s.x, t + 1)?;
    }
    trace.push_state(s.to_state());
    Ok(trace)
}

/// Runs the strongly convex method from `x₀ = y₀`, recording
/// `z_t = √κ(x_t − y_t) + x_t`. With `κ = 1` one exact step is taken.
pub fn run_sc_agm(p: &dyn Objective, x0: &Vector, steps: usize) -> Result<Trace> {
    let c = p.constants();
    let (alpha, beta) = match (c.alpha, c.beta) {
        (Some(a), Some(b)) if a > 0.0 && b >= a => (a, b),
        _ => return Err(Error::invalid("problem", "needs declared 0 < α ≤ β")),
    };
    let kappa = beta / alpha;
    let steps = if kappa == 1.0 { steps.min(1) } else { steps };
    let eta = AccelSchedule::StronglyConvex { kappa }.eta(0, beta);
    let mut trace = Trace::new();
    let (mut x, mut y) = (x0.clone(), x0.clone());
    for t in 0..steps {
        trace.push_state(State::coupled(x.clone(), y.clone(), sc_agm_z(&x, &y, kappa)));
        trace.record_round(p.value(&y), p.gradient(&x), eta);
        let (xn, yn) = sc_agm_step(p, &x, &y, kappa, beta)?;
        x = xn;
        y = yn;
        check_iterate(&x, t + 1)?;
    }
    let z = sc_agm_z(&x, &y, kappa);
    trace.push_state(State::coupled(x, y, z));
    Ok(trace)
}

/// One restart epoch, as indices into the run's trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Epoch {
    pub start: usize,
    pub end: usize,
    pub start_distance: f64,
    pub end_distance: f64,
}

#[derive(Debug, Clone)]
pub struct RestartRun {
    pub trace: Trace,
    pub epochs: Vec<Epoch>,
    pub epoch_length: usize,
    /// Steps taken until the gap first reached the target.
    pub steps_to_target: usize,
}

/// `⌈4√κ⌉`.
pub fn restart_epoch_length(kappa: f64) -> usize {
    libm::ceil(4.0 * libm::sqrt(kappa)) as usize
}

const MAX_RESTART_STEPS: usize = 10_000_000;

/// Runs the `PaperSmooth` method in epochs of `⌈4√κ⌉` steps, restarting
/// from the last `y`, until `f(y) − f* ≤ ε`.
pub fn restart_accelerated(p: &dyn Objective, x0: &Vector, epsilon: f64) -> Result<RestartRun> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon", "target gap must be positive"));
    }
    let c = p.constants();
    let kappa = c
        .kappa()
        .ok_or_else(|| Error::invalid("problem", "needs declared α and β"))?;
    let beta = beta_of(p)?;
    let free = FeasibleSet::unconstrained(p.dim());
    let x_star = p
        .minimizer_over(&free)
        .ok_or_else(|| Error::invalid("problem", "needs a known minimizer"))?;
    let f_star = p.value(&x_star);
    let len = restart_epoch_length(kappa);
    let sched = AccelSchedule::PaperSmooth;

    let mut trace = Trace::new();
    let mut epochs = Vec::new();
    let mut s = AccelState::start(x0);
    let mut taken = 0;
    while p.value(&s.y) - f_star > epsilon {
        if taken >= MAX_RESTART_STEPS {
            return Err(Error::invalid("epsilon", "target gap not reached within the step budget"));
        }
        let start = taken;
        let start_distance = s.y.dist2(&x_star);
        let mut local = AccelState::start(&s.y);
        for k in 0..len {
            push(&mut trace, p, &local, sched.eta(k, beta));
            local = coupled_step(&free, p, &local, beta, sched.eta(k, beta), sched.tau(k + 1));
            taken += 1;
            check_iterate(&local.x, taken)?;
            if p.value(&local.y) - f_star <= epsilon {
                break;
            }
        }
        s = local;
        epochs.push(Epoch {
            start,
            end: taken,
            start_distance,
            end_distance: s.y.dist2(&x_star),
        });
    }
    let mut last = s;
    last.t = taken;
    trace.push_state(last.to_state());
    Ok(RestartRun {
        trace,
        epochs,
        epoch_length: len,
        steps_to_target: taken,
    })
}
