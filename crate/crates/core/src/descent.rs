//! Gradient descent for bounded-gradient objectives: online, projected and
//! strongly convex variants, plus the weighted-average offline readout.

use crate::{Error, FeasibleSet, OnlineAdversary, Result, State, Trace, Vector};

/// Step-size rule `η_t` indexed by the trace position `t = 0, 1, …`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    Constant(f64),
    /// `η_t = 1/(α(t+1))`. Labelling the first iterate `x_1` instead of
    /// `x_0` gives the `η_t = 1/(αt)` form; the iterates are identical.
    InverseAlpha { alpha: f64 },
    /// `η = D/(G√T)` for a known horizon `T`.
    HorizonTuned { d: f64, g: f64, horizon: usize },
    /// `η_t = D/(G√(t+1))` when the horizon is unknown.
    AnytimeTuned { d: f64, g: f64 },
}

impl StepSchedule {
    pub fn eta(&self, t: usize) -> f64 {
        match *self {
            StepSchedule::Constant(eta) => eta,
            StepSchedule::InverseAlpha { alpha } => 1.0 / (alpha * (t + 1) as f64),
            StepSchedule::HorizonTuned { d, g, horizon } => d / (g * libm::sqrt(horizon as f64)),
            StepSchedule::AnytimeTuned { d, g } => d / (g * libm::sqrt((t + 1) as f64)),
        }
    }

    /// Constant schedules return their single step size.
    pub fn constant_eta(&self) -> Option<f64> {
        match self {
            StepSchedule::Constant(_) | StepSchedule::HorizonTuned { .. } => Some(self.eta(0)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            StepSchedule::Constant(eta) => eta > 0.0 && eta.is_finite(),
            StepSchedule::InverseAlpha { alpha } => alpha > 0.0 && alpha.is_finite(),
            StepSchedule::HorizonTuned { d, g, horizon } => {
                d > 0.0 && g > 0.0 && horizon > 0 && d.is_finite() && g.is_finite()
            }
            StepSchedule::AnytimeTuned { d, g } => d > 0.0 && g > 0.0 && d.is_finite() && g.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("schedule", "step sizes must be positive and finite"))
        }
    }
}

/// `x − η·g`, which is also `argmin_y {η⟨g, y − x⟩ + ½‖y − x‖²}`.
pub fn gd_step(x: &Vector, g: &Vector, eta: f64) -> Vector {
    assert!(eta > 0.0, "step size must be positive");
    x.axpy(-eta, g)
}

/// `Π_K(x − η·g)`.
pub fn projected_gd_step(set: &FeasibleSet, x: &Vector, g: &Vector, eta: f64) -> Vector {
    set.project(&gd_step(x, g, eta))
}

fn check_start(set: &FeasibleSet, x0: &Vector, steps: usize) -> Result<()> {
    if steps == 0 {
        return Err(Error::invalid("steps", "at least one step is required"));
    }
    if !x0.is_finite() {
        return Err(Error::NonFinite("x0"));
    }
    set.require_member(x0, "x0")
}

pub(crate) fn check_iterate(x: &Vector, t: usize) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            "iterate",
            alloc::format!("non-finite iterate after step {t}; last good step is {}", t.saturating_sub(1)),
        ))
    }
}

/// Online projected gradient descent: plays `x_t`, observes `f_t`, and moves
/// to `Π_K(x_t − η_t∇f_t(x_t))`.
pub fn run_online_gd(
    adv: &dyn OnlineAdversary,
    set: &FeasibleSet,
    x0: &Vector,
    sched: StepSchedule,
    steps: usize,
) -> Result<Trace> {
    check_start(set, x0, steps)?;
    sched.validate()?;
    let mut trace = Trace::new();
    let mut x = x0.clone();
    for t in 0..steps {
        let f = adv.loss(t);
        let g = f.gradient(&x);
        let eta = sched.eta(t);
        trace.push_state(State::single(x.clone()));
        trace.record_round(f.value(&x), g.clone(), eta);
        x = projected_gd_step(set, &x, &g, eta);
        check_iterate(&x, t + 1)?;
    }
    trace.push_state(State::single(x));
    Ok(trace)
}

/// Gradient descent with `η_t = 1/(α(t+1))` for α-strongly convex losses.
pub fn run_strongly_convex_gd(
    adv: &dyn OnlineAdversary,
    set: &FeasibleSet,
    x0: &Vector,
    alpha: f64,
    steps: usize,
) -> Result<Trace> {
    run_online_gd(adv, set, x0, StepSchedule::InverseAlpha { alpha }, steps)
}

/// `Σ_{t=1}^T λ_t x_t` with `λ_t = 2t/(T(T+1))`.
///
/// Iterates are labelled from one: `x_1` is the first record of `trace`, so
/// the schedule reads `η_t = 1/(αt)` under this labelling.
pub fn weighted_average(trace: &Trace, horizon: usize) -> Result<Vector> {
    if horizon < 1 {
        return Err(Error::invalid("T", "horizon must be at least 1"));
    }
    if trace.steps.len() < horizon {
        return Err(Error::invalid("T", "trace is shorter than the horizon"));
    }
    let dim = trace.steps[0].state.x.dim();
    let mut avg = Vector::zeros(dim);
    for (t, w) in averaging_weights(horizon).enumerate() {
        avg = avg.axpy(w, &trace.steps[t].state.x);
    }
    Ok(avg)
}

/// The weights `λ_t = 2t/(T(T+1))` for `t = 1..=T`.
pub fn averaging_weights(horizon: usize) -> impl Iterator<Item = f64> {
    let denom = (horizon * (horizon + 1)) as f64;
    (1..=horizon).map(move |t| 2.0 * t as f64 / denom)
}

/// Total and average regret of a trace against a fixed comparator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regret {
    pub total: f64,
    pub average: f64,
    pub rounds: usize,
}

/// `Σ_{t<T} f_t(x_t) − f_t(x*)` over every recorded round.
pub fn regret(trace: &Trace, adv: &dyn OnlineAdversary, comparator: &Vector) -> Regret {
    let mut total = 0.0;
    let mut rounds = 0;
    for step in trace.steps.iter().filter(|s| s.loss.is_some()) {
        let f = adv.loss(step.t);
        total += f.value(&step.state.x) - f.value(comparator);
        rounds += 1;
    }
    Regret {
        total,
        average: if rounds == 0 { 0.0 } else { total / rounds as f64 },
        rounds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{make_diag_quadratic, ExpertsAdversary, FixedLoss};
    use crate::vector;

    #[test]
    fn gd_step_examples() {
        assert_eq!(gd_step(&vector![1, 1], &vector![0, 0], 0.1), vector![1, 1]);
        assert!(gd_step(&vector![1, 1], &vector![2, 0], 0.1).max_abs_diff(&vector![0.8, 1]) < 1e-15);
        assert_eq!(gd_step(&vector![1], &vector![1], 1.0), vector![0]);
    }

    #[test]
    fn projected_gd_step_examples() {
        let free = FeasibleSet::unconstrained(2);
        assert_eq!(
            projected_gd_step(&free, &vector![1, 1], &vector![2, 0], 0.1),
            gd_step(&vector![1, 1], &vector![2, 0], 0.1)
        );
        let ball = FeasibleSet::unit_ball(2);
        assert_eq!(projected_gd_step(&ball, &vector![1, 0], &vector![-2, 0], 1.0), vector![1, 0]);
        let s = FeasibleSet::simplex(2).unwrap();
        let x = projected_gd_step(&s, &vector![0.5, 0.5], &vector![1, 0], 0.2);
        assert!(x.max_abs_diff(&vector![0.4, 0.6]) < 1e-15);
    }

    #[test]
    fn schedule_values() {
        assert_eq!(StepSchedule::InverseAlpha { alpha: 2.0 }.eta(0), 0.5);
        let s = StepSchedule::HorizonTuned { d: 1.0, g: 1.0, horizon: 100 };
        assert_eq!(s.eta(0), 0.1);
        assert_eq!(s.eta(57), 0.1);
        assert_eq!(StepSchedule::AnytimeTuned { d: 1.0, g: 1.0 }.eta(3), 0.5);
        assert!(StepSchedule::Constant(0.0).validate().is_err());
    }

    #[test]
    fn zero_losses_keep_the_start() {
        let adv = crate::problem::make_experts_adversary(alloc::vec![vector![0, 0]]).unwrap();
        let set = FeasibleSet::simplex(2).unwrap();
        let x0 = vector![0.3, 0.7];
        let trace = run_online_gd(&adv, &set, &x0, StepSchedule::Constant(0.5), 20).unwrap();
        assert!(trace.iterates().all(|x| x.max_abs_diff(&x0) < 1e-15));
        assert_eq!(regret(&trace, &adv, &vector![1, 0]).total, 0.0);
    }

    #[test]
    fn p1_geometric_recursion() {
        let adv = FixedLoss::new(make_diag_quadratic(vector![1], vector![0]).unwrap());
        let set = FeasibleSet::unconstrained(1);
        let trace = run_online_gd(&adv, &set, &vector![1], StepSchedule::Constant(0.1), 50).unwrap();
        for step in &trace.steps {
            let expected = libm::pow(0.9, step.t as f64);
            assert!((step.state.x[0] - expected).abs() < 1e-14);
        }
        // Average regret stays below ηG²/2 + D²/(2ηT) with G = D = 1.
        let r = regret(&trace, &adv, &vector![0]);
        assert!(r.average <= 0.1 / 2.0 + 1.0 / (2.0 * 0.1 * 50.0));
    }

    #[test]
    fn strongly_convex_first_step_is_exact_on_p1() {
        let adv = FixedLoss::new(make_diag_quadratic(vector![1], vector![0]).unwrap());
        let set = FeasibleSet::unconstrained(1);
        let trace = run_strongly_convex_gd(&adv, &set, &vector![1], 1.0, 3).unwrap();
        assert_eq!(trace.steps[1].state.x, vector![0]);
    }

    #[test]
    fn run_rejects_bad_start() {
        let adv = ExpertsAdversary::alternating();
        let set = FeasibleSet::simplex(2).unwrap();
        assert!(run_online_gd(&adv, &set, &vector![1, 1], StepSchedule::Constant(0.1), 5).is_err());
        assert!(run_online_gd(&adv, &set, &vector![0.5, 0.5], StepSchedule::Constant(0.1), 0).is_err());
    }

    #[test]
    fn weighted_average_weights() {
        let w: alloc::vec::Vec<f64> = averaging_weights(2).collect();
        assert!((w[0] - 1.0 / 3.0).abs() < 1e-15 && (w[1] - 2.0 / 3.0).abs() < 1e-15);
        let total: f64 = averaging_weights(1000).sum();
        assert!((total - 1.0).abs() <= 1e-14);

        let mut trace = Trace::new();
        trace.push_state(State::single(vector![4, 2]));
        assert_eq!(weighted_average(&trace, 1).unwrap(), vector![4, 2]);
        assert!(weighted_average(&trace, 0).is_err());
    }
}
