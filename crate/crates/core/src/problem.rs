//! Test objectives with known constants, online adversaries and a
//! finite-difference gradient checker.

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, FeasibleSet, NormKind, Result, Vector};

/// Curvature and gradient constants declared by an objective, all relative
/// to the Euclidean norm.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Constants {
    /// Uniform bound `G` on `‖∇f‖₂`.
    pub lipschitz: Option<f64>,
    /// Strong convexity `α`.
    pub alpha: Option<f64>,
    /// Smoothness `β`.
    pub beta: Option<f64>,
}

impl Constants {
    /// `κ = β/α` when both are declared.
    pub fn kappa(&self) -> Option<f64> {
        match (self.alpha, self.beta) {
            (Some(a), Some(b)) if a > 0.0 => Some(b / a),
            _ => None,
        }
    }
}

/// A differentiable convex objective with a value/gradient oracle.
pub trait Objective {
    fn dim(&self) -> usize;

    fn value(&self, x: &Vector) -> f64;

    fn gradient(&self, x: &Vector) -> Vector;

    fn constants(&self) -> Constants;

    /// Smoothness constant relative to `norm`. Defaults to the Euclidean `β`
    /// only.
    fn smoothness_wrt(&self, norm: NormKind) -> Option<f64> {
        match norm {
            NormKind::Euclidean => self.constants().beta,
            _ => None,
        }
    }

    /// A minimizer over `set`, if one exists and is known.
    fn minimizer_over(&self, set: &FeasibleSet) -> Option<Vector>;

    /// The minimizer closest to `x0`, for objectives whose minimizer set is
    /// not a single point.
    fn minimizer_near(&self, set: &FeasibleSet, _x0: &Vector) -> Option<Vector> {
        self.minimizer_over(set)
    }

    fn optimal_value_over(&self, set: &FeasibleSet) -> Option<f64> {
        self.minimizer_over(set).map(|x| self.value(&x))
    }

    /// `max{‖x − x*‖₂ : f(x) ≤ f(x0)}` when available in closed form.
    fn sublevel_diameter(&self, _x0: &Vector) -> Option<f64> {
        None
    }
}

/// `f(x) = ½ Σ qᵢ (xᵢ − sᵢ)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagQuadratic {
    diag: Vector,
    shift: Vector,
}

pub fn make_diag_quadratic(diag: Vector, shift: Vector) -> Result<DiagQuadratic> {
    DiagQuadratic::new(diag, shift)
}

impl DiagQuadratic {
    pub fn new(diag: Vector, shift: Vector) -> Result<Self> {
        if diag.dim() == 0 {
            return Err(Error::Empty("diagonal"));
        }
        if diag.dim() != shift.dim() {
            return Err(Error::invalid("shift", "dimension differs from diagonal"));
        }
        if diag.iter().any(|&q| q <= 0.0) {
            return Err(Error::invalid("diag", "entries must be positive"));
        }
        Ok(DiagQuadratic { diag, shift })
    }

    pub fn diag(&self) -> &Vector {
        &self.diag
    }

    pub fn shift(&self) -> &Vector {
        &self.shift
    }

    fn alpha(&self) -> f64 {
        self.diag.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn beta(&self) -> f64 {
        self.diag.iter().copied().fold(0.0, f64::max)
    }
}

impl Objective for DiagQuadratic {
    fn dim(&self) -> usize {
        self.diag.dim()
    }

    fn value(&self, x: &Vector) -> f64 {
        0.5 * x
            .iter()
            .zip(self.shift.iter().zip(self.diag.iter()))
            .map(|(xi, (si, qi))| qi * (xi - si) * (xi - si))
            .sum::<f64>()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        (x - &self.shift).zip_map(&self.diag, |d, q| q * d)
    }

    fn constants(&self) -> Constants {
        Constants {
            lipschitz: None,
            alpha: Some(self.alpha()),
            beta: Some(self.beta()),
        }
    }

    fn minimizer_over(&self, set: &FeasibleSet) -> Option<Vector> {
        match set {
            FeasibleSet::Unconstrained { .. } => Some(self.shift.clone()),
            // Separable objective: clamping the unconstrained minimizer is exact.
            FeasibleSet::Box { .. } => Some(set.project(&self.shift)),
            _ => Some(projected_minimizer(self, set, self.beta())),
        }
    }

    fn sublevel_diameter(&self, x0: &Vector) -> Option<f64> {
        Some(libm::sqrt(2.0 * self.value(x0) / self.alpha()))
    }
}

/// `f(x) = ln Σ exp(xᵢ) − ⟨c, x⟩` with `c` in the open simplex.
///
/// Smooth with `β = 1` relative to ℓ2, ℓ1 and ℓ∞, and not strongly convex:
/// the objective is constant along the all-ones direction, so its
/// unconstrained minimizers form the line `ln c + k·1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltedLogSumExp {
    tilt: Vector,
}

impl TiltedLogSumExp {
    pub fn new(tilt: Vector) -> Result<Self> {
        if tilt.dim() == 0 {
            return Err(Error::Empty("tilt"));
        }
        if tilt.iter().any(|&c| c <= 0.0) || (tilt.sum() - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("tilt", "must lie in the open probability simplex"));
        }
        Ok(TiltedLogSumExp { tilt })
    }

    pub fn tilt(&self) -> &Vector {
        &self.tilt
    }

    fn log_tilt(&self) -> Vector {
        self.tilt.map(libm::log)
    }
}

/// Numerically stable `ln Σ exp(xᵢ)`.
pub fn log_sum_exp(x: &[f64]) -> f64 {
    let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + libm::log(x.iter().map(|v| libm::exp(v - m)).sum::<f64>())
}

/// `softmax(x)` with a max shift.
pub fn softmax(x: &[f64]) -> Vec<f64> {
    let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = x.iter().map(|v| libm::exp(v - m)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

impl Objective for TiltedLogSumExp {
    fn dim(&self) -> usize {
        self.tilt.dim()
    }

    fn value(&self, x: &Vector) -> f64 {
        log_sum_exp(x) - self.tilt.dot(x)
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let p = Vector::new(softmax(x)).expect("softmax is finite");
        &p - &self.tilt
    }

    fn constants(&self) -> Constants {
        Constants {
            lipschitz: None,
            alpha: None,
            beta: Some(1.0),
        }
    }

    fn smoothness_wrt(&self, _norm: NormKind) -> Option<f64> {
        Some(1.0)
    }

    fn minimizer_over(&self, set: &FeasibleSet) -> Option<Vector> {
        match set {
            FeasibleSet::Unconstrained { .. } => {
                let l = self.log_tilt();
                let mean = l.sum() / l.dim() as f64;
                Some(l.map(|v| v - mean))
            }
            _ => Some(projected_minimizer(self, set, 1.0)),
        }
    }

    fn minimizer_near(&self, set: &FeasibleSet, x0: &Vector) -> Option<Vector> {
        match set {
            FeasibleSet::Unconstrained { .. } => {
                // Gradient steps never change Σ xᵢ, so this is also the
                // minimizer every unconstrained run converges to.
                let l = self.log_tilt();
                let k = (x0.sum() - l.sum()) / l.dim() as f64;
                Some(l.map(|v| v + k))
            }
            _ => self.minimizer_over(set),
        }
    }
}

/// `f(x) = ⟨ℓ, x⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearLoss {
    coeffs: Vector,
}

impl LinearLoss {
    pub fn new(coeffs: Vector) -> Self {
        LinearLoss { coeffs }
    }

    pub fn coeffs(&self) -> &Vector {
        &self.coeffs
    }
}

impl Objective for LinearLoss {
    fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    fn value(&self, x: &Vector) -> f64 {
        self.coeffs.dot(x)
    }

    fn gradient(&self, _x: &Vector) -> Vector {
        self.coeffs.clone()
    }

    fn constants(&self) -> Constants {
        Constants {
            lipschitz: Some(self.coeffs.norm2()),
            alpha: None,
            beta: Some(0.0),
        }
    }

    fn smoothness_wrt(&self, _norm: NormKind) -> Option<f64> {
        Some(0.0)
    }

    fn minimizer_over(&self, set: &FeasibleSet) -> Option<Vector> {
        set.lmo(&self.coeffs).ok()
    }
}

/// Minimizes `p` over `set` by projected gradient steps of length `1/β`
/// until successive iterates agree to 1e−15 (or 10⁶ iterations).
///
/// Used to pin constrained optima that have no closed form; the test suite
/// cross-checks the result by grid refinement.
pub fn projected_minimizer(p: &dyn Objective, set: &FeasibleSet, beta: f64) -> Vector {
    let mut x = set.default_start();
    for _ in 0..1_000_000 {
        let next = set.project(&x.axpy(-1.0 / beta, &p.gradient(&x)));
        let moved = next.max_abs_diff(&x);
        x = next;
        if moved <= 1e-15 {
            break;
        }
    }
    x
}

/// The round-by-round loss sequence of an online problem.
///
/// Adversaries here are oblivious: the round-`t` loss depends on `t` only.
pub trait OnlineAdversary {
    fn dim(&self) -> usize;

    fn loss(&self, t: usize) -> &dyn Objective;

    /// A uniform bound on the round gradients measured in `norm`, if known a
    /// priori.
    fn gradient_bound(&self, norm: NormKind) -> Option<f64>;

    /// Smallest strong-convexity constant over all rounds.
    fn strong_convexity(&self) -> Option<f64>;

    /// The best fixed point in hindsight, `argmin_{x∈K} Σ_{t<T} f_t(x)`.
    fn best_fixed(&self, set: &FeasibleSet, rounds: usize) -> Option<Vector>;
}

/// The offline setting: the same objective every round.
#[derive(Debug, Clone)]
pub struct FixedLoss<P> {
    objective: P,
}

impl<P: Objective> FixedLoss<P> {
    pub fn new(objective: P) -> Self {
        FixedLoss { objective }
    }

    pub fn objective(&self) -> &P {
        &self.objective
    }
}

impl<P: Objective> OnlineAdversary for FixedLoss<P> {
    fn dim(&self) -> usize {
        self.objective.dim()
    }

    fn loss(&self, _t: usize) -> &dyn Objective {
        &self.objective
    }

    fn gradient_bound(&self, norm: NormKind) -> Option<f64> {
        match norm {
            NormKind::Euclidean => self.objective.constants().lipschitz,
            _ => None,
        }
    }

    fn strong_convexity(&self) -> Option<f64> {
        self.objective.constants().alpha
    }

    fn best_fixed(&self, set: &FeasibleSet, _rounds: usize) -> Option<Vector> {
        self.objective.minimizer_over(set)
    }
}

impl Objective for &dyn Objective {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn value(&self, x: &Vector) -> f64 {
        (**self).value(x)
    }

    fn gradient(&self, x: &Vector) -> Vector {
        (**self).gradient(x)
    }

    fn constants(&self) -> Constants {
        (**self).constants()
    }

    fn smoothness_wrt(&self, norm: NormKind) -> Option<f64> {
        (**self).smoothness_wrt(norm)
    }

    fn minimizer_over(&self, set: &FeasibleSet) -> Option<Vector> {
        (**self).minimizer_over(set)
    }

    fn minimizer_near(&self, set: &FeasibleSet, x0: &Vector) -> Option<Vector> {
        (**self).minimizer_near(set, x0)
    }

    fn sublevel_diameter(&self, x0: &Vector) -> Option<f64> {
        (**self).sublevel_diameter(x0)
    }
}

/// Prediction with expert advice: round `t` plays the linear loss
/// `x ↦ ⟨ℓ_t, x⟩` with `ℓ_t ∈ [0,1]ⁿ`. Rows are cycled when the run is
/// longer than the matrix.
#[derive(Debug, Clone)]
pub struct ExpertsAdversary {
    rows: Vec<LinearLoss>,
}

pub fn make_experts_adversary(loss_matrix: Vec<Vector>) -> Result<ExpertsAdversary> {
    ExpertsAdversary::new(loss_matrix)
}

impl ExpertsAdversary {
    pub fn new(loss_matrix: Vec<Vector>) -> Result<Self> {
        let first = loss_matrix.first().ok_or(Error::Empty("loss matrix"))?;
        let n = first.dim();
        for (t, row) in loss_matrix.iter().enumerate() {
            if row.dim() != n {
                return Err(Error::invalid("loss_matrix", format!("row {t} has dimension {}", row.dim())));
            }
            if row.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                return Err(Error::invalid("loss_matrix", format!("row {t} has an entry outside [0, 1]")));
            }
        }
        Ok(ExpertsAdversary {
            rows: loss_matrix.into_iter().map(LinearLoss::new).collect(),
        })
    }

    /// Two experts whose losses alternate `(1,0), (0,1), (1,0), …`.
    pub fn alternating() -> Self {
        ExpertsAdversary {
            rows: alloc::vec![
                LinearLoss::new(crate::vector![1, 0]),
                LinearLoss::new(crate::vector![0, 1]),
            ],
        }
    }

    pub fn cumulative_loss(&self, rounds: usize) -> Vector {
        let mut total = Vector::zeros(self.dim());
        for t in 0..rounds {
            total = &total + self.rows[t % self.rows.len()].coeffs();
        }
        total
    }
}

impl OnlineAdversary for ExpertsAdversary {
    fn dim(&self) -> usize {
        self.rows[0].dim()
    }

    fn loss(&self, t: usize) -> &dyn Objective {
        &self.rows[t % self.rows.len()]
    }

    fn gradient_bound(&self, norm: NormKind) -> Option<f64> {
        Some(self.rows.iter().map(|r| norm.norm(r.coeffs())).fold(0.0, f64::max))
    }

    fn strong_convexity(&self) -> Option<f64> {
        None
    }

    fn best_fixed(&self, set: &FeasibleSet, rounds: usize) -> Option<Vector> {
        set.lmo(&self.cumulative_loss(rounds)).ok()
    }
}

/// Largest coordinate-wise discrepancy between the analytic gradient and a
/// central difference with step `h`, relative to `1 + |∇f|`.
pub fn gradient_check(p: &dyn Objective, x: &Vector, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::invalid("h", "step must be positive"));
    }
    let g = p.gradient(x);
    let mut worst: f64 = 0.0;
    for i in 0..x.dim() {
        let mut up = x.clone();
        let mut down = x.clone();
        up[i] += h;
        down[i] -= h;
        let cd = (p.value(&up) - p.value(&down)) / (2.0 * h);
        worst = worst.max((cd - g[i]).abs() / (1.0 + g[i].abs()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector;

    fn p1() -> DiagQuadratic {
        make_diag_quadratic(vector![1], vector![0]).unwrap()
    }

    fn p2() -> DiagQuadratic {
        make_diag_quadratic(vector![1, 4], vector![0, 0]).unwrap()
    }

    #[test]
    fn quadratic_examples() {
        let p = p1();
        assert_eq!(p.value(&vector![1]), 0.5);
        assert_eq!(p.gradient(&vector![1]), vector![1]);
        assert_eq!(p.constants().kappa(), Some(1.0));

        let p = p2();
        assert_eq!(p.value(&vector![1, 1]), 2.5);
        assert_eq!(p.gradient(&vector![1, 1]), vector![1, 4]);
        assert_eq!(p.constants().kappa(), Some(4.0));
        assert!((p.sublevel_diameter(&vector![1, 1]).unwrap() - libm::sqrt(5.0)).abs() < 1e-15);

        let p3 = make_diag_quadratic(vector![1, 100], vector![0, 0]).unwrap();
        assert_eq!(p3.constants().kappa(), Some(100.0));
    }

    #[test]
    fn quadratic_rejects_non_positive_diagonal() {
        assert!(make_diag_quadratic(vector![1, 0], vector![0, 0]).is_err());
        assert!(make_diag_quadratic(vector![-1], vector![0]).is_err());
    }

    #[test]
    fn quadratic_minimizer_is_stationary() {
        let p = make_diag_quadratic(vector![2, 3], vector![1, -1]).unwrap();
        let set = FeasibleSet::unconstrained(2);
        let x = p.minimizer_over(&set).unwrap();
        assert!(p.value(&x).abs() <= 1e-12);
        assert!(p.gradient(&x).norm2() <= 1e-10);
        assert_eq!(p.optimal_value_over(&set), Some(0.0));
    }

    #[test]
    fn p2_over_simplex() {
        // x1 = 4 x2 on the simplex edge: (0.8, 0.2), f* = 0.4.
        let set = FeasibleSet::simplex(2).unwrap();
        let x = p2().minimizer_over(&set).unwrap();
        assert!(x.max_abs_diff(&vector![0.8, 0.2]) < 1e-12);
        assert!((p2().value(&x) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn experts_examples() {
        let adv = make_experts_adversary(alloc::vec![vector![0, 1]]).unwrap();
        assert_eq!(adv.loss(0).value(&vector![0.5, 0.5]), 0.5);
        assert!(make_experts_adversary(alloc::vec![vector![0, 1.5]]).is_err());
        assert!(make_experts_adversary(alloc::vec![vector![0, -0.1]]).is_err());

        let alt = ExpertsAdversary::alternating();
        let total = alt.cumulative_loss(100);
        assert_eq!(total, vector![50, 50]);
        let simplex = FeasibleSet::simplex(2).unwrap();
        let best = alt.best_fixed(&simplex, 100).unwrap();
        assert_eq!(total.dot(&best), 50.0);
        assert_eq!(alt.gradient_bound(NormKind::LInf), Some(1.0));
    }

    #[test]
    fn gradient_check_examples() {
        assert!(gradient_check(&p1(), &vector![1], 1e-5).unwrap() <= 1e-8);
        assert!(gradient_check(&p2(), &vector![1, 1], 1e-5).unwrap() <= 1e-8);
        assert!(gradient_check(&p2(), &vector![0, 0], 1e-5).unwrap() <= 1e-8);
        assert!(gradient_check(&p1(), &vector![1], 0.0).is_err());
    }

    #[test]
    fn lse_minimizer_line() {
        let p = TiltedLogSumExp::new(vector![0.5, 0.3, 0.2]).unwrap();
        let set = FeasibleSet::unconstrained(3);
        let x = p.minimizer_over(&set).unwrap();
        assert!(p.gradient(&x).norm2() < 1e-15);
        let near = p.minimizer_near(&set, &Vector::ones(3)).unwrap();
        assert!((near.sum() - 3.0).abs() < 1e-12);
        assert!((p.value(&near) - p.value(&x)).abs() < 1e-12);
        assert!(TiltedLogSumExp::new(vector![0.5, 0.5, 0.0]).is_err());
    }
}
