//! In-memory run records.

use alloc::vec::Vec;

use crate::Vector;

/// Method state at one iteration. Single-sequence methods only fill `x`;
/// accelerated methods also carry the cautious sequence `y` and the
/// aggressive sequence `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub x: Vector,
    pub y: Option<Vector>,
    pub z: Option<Vector>,
}

impl State {
    pub fn single(x: Vector) -> Self {
        State { x, y: None, z: None }
    }

    pub fn coupled(x: Vector, y: Vector, z: Vector) -> Self {
        State {
            x,
            y: Some(y),
            z: Some(z),
        }
    }

    /// The point a method reports as its answer: `y` when present, else `x`.
    pub fn output(&self) -> &Vector {
        self.y.as_ref().unwrap_or(&self.x)
    }
}

/// One record of a run.
///
/// `loss`, `gradient` and `step_size` describe the round played at this
/// state (`f_t(x_t)`, `∇f_t(x_t)`, `η_t`). The final record of a `T`-step run
/// holds `x_T` only.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub t: usize,
    pub state: State,
    pub loss: Option<f64>,
    pub gradient: Option<Vector>,
    pub step_size: Option<f64>,
}

/// The sequence of records `t = 0..=T` produced by a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub steps: Vec<Step>,
}

impl Trace {
    pub fn new() -> Self {
        Trace::default()
    }

    /// Number of update steps taken (`T`).
    pub fn len(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.steps.len() <= 1
    }

    pub fn push(&mut self, step: Step) {
        debug_assert_eq!(step.t, self.steps.len(), "trace records must be contiguous");
        self.steps.push(step);
    }

    pub fn push_state(&mut self, state: State) {
        let t = self.steps.len();
        self.steps.push(Step {
            t,
            state,
            loss: None,
            gradient: None,
            step_size: None,
        });
    }

    /// Attaches the round played at the most recent state.
    pub fn record_round(&mut self, loss: f64, gradient: Vector, step_size: f64) {
        let last = self.steps.last_mut().expect("record_round on an empty trace");
        last.loss = Some(loss);
        last.gradient = Some(gradient);
        last.step_size = Some(step_size);
    }

    pub fn last(&self) -> Option<&Step> {
        self.steps.last()
    }

    pub fn first(&self) -> Option<&Step> {
        self.steps.first()
    }

    pub fn iterates(&self) -> impl Iterator<Item = &Vector> {
        self.steps.iter().map(|s| &s.state.x)
    }

    /// Largest `‖∇_t‖` over the recorded rounds, measured with `norm`.
    pub fn max_gradient_norm(&self, norm: crate::NormKind) -> f64 {
        self.steps
            .iter()
            .filter_map(|s| s.gradient.as_ref())
            .map(|g| norm.norm(g))
            .fold(0.0, f64::max)
    }

    /// Largest `‖x_t − reference‖₂` over the output points.
    pub fn max_distance(&self, reference: &Vector) -> f64 {
        self.steps
            .iter()
            .map(|s| s.state.output().dist2(reference).max(s.state.x.dist2(reference)))
            .fold(0.0, f64::max)
    }
}
