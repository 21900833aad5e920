//! Mirror maps, Bregman divergences and projections, and mirror descent.
//!
//! The negative-entropy map lives on the positive orthant. Its iterates must
//! stay strictly positive; comparators with zero coordinates are fine as the
//! first argument of [`MirrorMap::bregman`] since `0·ln 0 = 0`.

use alloc::format;
use alloc::vec::Vec;

use crate::descent::check_iterate;
use crate::{Error, FeasibleSet, NormKind, OnlineAdversary, Result, State, Trace, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MirrorMap {
    /// `h(x) = ½‖x‖₂²`, 1-strongly convex wrt ℓ2.
    Euclidean,
    /// `h(x) = Σ xᵢ ln xᵢ`, taken as 1-strongly convex wrt ℓ1.
    NegEntropy,
}

impl MirrorMap {
    pub const ALL: [MirrorMap; 2] = [MirrorMap::Euclidean, MirrorMap::NegEntropy];

    pub fn id(self) -> &'static str {
        match self {
            MirrorMap::Euclidean => "euclidean",
            MirrorMap::NegEntropy => "negentropy",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.id() == id)
    }

    /// The norm `h` is strongly convex against.
    pub fn norm(self) -> NormKind {
        match self {
            MirrorMap::Euclidean => NormKind::Euclidean,
            MirrorMap::NegEntropy => NormKind::L1,
        }
    }

    /// Strong-convexity constant of `h` wrt [`MirrorMap::norm`].
    pub fn alpha_h(self) -> f64 {
        1.0
    }

    /// Whether `∇h` is defined at `x`.
    pub fn is_interior(self, x: &Vector) -> bool {
        match self {
            MirrorMap::Euclidean => true,
            MirrorMap::NegEntropy => x.iter().all(|&v| v > 0.0),
        }
    }

    fn require_interior(self, x: &Vector, what: &str) -> Result<()> {
        if self.is_interior(x) {
            Ok(())
        } else {
            Err(Error::OutsideDomain(format!(
                "{what} has a non-positive coordinate; the entropy gradient is undefined there"
            )))
        }
    }

    /// `h(x)`; for the entropy map, `0·ln 0 = 0` and negative coordinates
    /// give `+∞`.
    pub fn h(self, x: &Vector) -> f64 {
        match self {
            MirrorMap::Euclidean => 0.5 * x.norm2_sq(),
            MirrorMap::NegEntropy => x.iter().map(|&v| xlnx(v)).sum(),
        }
    }

    pub fn grad_h(self, x: &Vector) -> Result<Vector> {
        self.require_interior(x, "point")?;
        Ok(match self {
            MirrorMap::Euclidean => x.clone(),
            MirrorMap::NegEntropy => x.map(|v| 1.0 + libm::log(v)),
        })
    }

    /// `(∇h)⁻¹(θ)`.
    pub fn grad_h_star(self, theta: &Vector) -> Vector {
        match self {
            MirrorMap::Euclidean => theta.clone(),
            MirrorMap::NegEntropy => theta.map(|v| libm::exp(v - 1.0)),
        }
    }

    /// `D_h(y‖x) = h(y) − h(x) − ⟨∇h(x), y − x⟩`; `x` must be interior.
    pub fn bregman(self, y: &Vector, x: &Vector) -> Result<f64> {
        self.require_interior(x, "second argument of the divergence")?;
        Ok(match self {
            MirrorMap::Euclidean => 0.5 * y.dist2_sq(x),
            // Generalized KL: Σ yᵢ ln(yᵢ/xᵢ) − yᵢ + xᵢ.
            MirrorMap::NegEntropy => y
                .iter()
                .zip(x.iter())
                .map(|(&a, &b)| {
                    let head = if a == 0.0 { 0.0 } else if a < 0.0 { f64::INFINITY } else { a * libm::log(a / b) };
                    head - a + b
                })
                .sum(),
        })
    }

    /// `argmin_{x∈K} D_h(x‖x')`. The entropy map supports the simplex, where
    /// the projection is `x'/‖x'‖₁`, and the unconstrained set.
    pub fn bregman_project(self, set: &FeasibleSet, x_prime: &Vector) -> Result<Vector> {
        match (self, set) {
            (MirrorMap::Euclidean, _) => Ok(set.project(x_prime)),
            (MirrorMap::NegEntropy, FeasibleSet::Unconstrained { .. }) => {
                self.require_interior(x_prime, "point")?;
                Ok(x_prime.clone())
            }
            (MirrorMap::NegEntropy, FeasibleSet::Simplex { .. }) => {
                self.require_interior(x_prime, "point")?;
                Ok(x_prime.scale(1.0 / x_prime.norm1()))
            }
            (MirrorMap::NegEntropy, other) => Err(Error::Unsupported(format!(
                "entropy projection onto a {} set",
                other.kind()
            ))),
        }
    }

    /// Whether [`MirrorMap::bregman_project`] supports `set`.
    pub fn supports(self, set: &FeasibleSet) -> bool {
        match self {
            MirrorMap::Euclidean => true,
            MirrorMap::NegEntropy => matches!(set, FeasibleSet::Unconstrained { .. } | FeasibleSet::Simplex { .. }),
        }
    }
}

fn xlnx(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else if v < 0.0 {
        f64::INFINITY
    } else {
        v * libm::log(v)
    }
}

/// `Π^h_K(∇h*(∇h(x) − η·g))`.
///
/// The entropy step is evaluated as `exp(ln xᵢ − η gᵢ − m)` with `m` the
/// largest exponent; the shift cancels in the projection onto the simplex.
pub fn mirror_step(map: MirrorMap, set: &FeasibleSet, x: &Vector, g: &Vector, eta: f64) -> Result<Vector> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::invalid("eta", "step size must be positive and finite"));
    }
    if !map.supports(set) {
        return Err(Error::Unsupported(format!("{} map over a {} set", map.id(), set.kind())));
    }
    let next = match (map, set) {
        (MirrorMap::NegEntropy, FeasibleSet::Simplex { .. }) => {
            map.require_interior(x, "iterate")?;
            let exponents = x.zip_map(g, |xi, gi| libm::log(xi) - eta * gi);
            normalized_exp(&exponents)
        }
        _ => {
            let theta = map.grad_h(x)?.axpy(-eta, g);
            map.bregman_project(set, &map.grad_h_star(&theta))?
        }
    };
    if !map.is_interior(&next) {
        return Err(Error::OutsideDomain(
            "mirror step reached the boundary of the entropy domain".into(),
        ));
    }
    Ok(next)
}

fn normalized_exp(exponents: &Vector) -> Vector {
    let m = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w = exponents.map(|e| libm::exp(e - m));
    let s = w.sum();
    w.scale(1.0 / s)
}

/// Online mirror descent with a constant step size.
pub fn run_mirror_descent(
    adv: &dyn OnlineAdversary,
    map: MirrorMap,
    set: &FeasibleSet,
    x0: &Vector,
    eta: f64,
    steps: usize,
) -> Result<Trace> {
    if steps == 0 {
        return Err(Error::invalid("steps", "at least one step is required"));
    }
    set.require_member(x0, "x0")?;
    map.require_interior(x0, "x0")?;
    let mut trace = Trace::new();
    let mut x = x0.clone();
    for t in 0..steps {
        let f = adv.loss(t);
        let g = f.gradient(&x);
        trace.push_state(State::single(x.clone()));
        trace.record_round(f.value(&x), g.clone(), eta);
        x = mirror_step(map, set, &x, &g, eta)?;
        check_iterate(&x, t + 1)?;
    }
    trace.push_state(State::single(x));
    Ok(trace)
}

/// Hedge: `(x_T)ᵢ ∝ (x₀)ᵢ exp(−η Σ_t (∇_t)ᵢ)`.
pub fn hedge_closed_form(x0: &Vector, cumulative_grads: &Vector, eta: f64) -> Vector {
    let exponents = x0.zip_map(cumulative_grads, |xi, s| libm::log(xi) - eta * s);
    normalized_exp(&exponents)
}

/// With `b = Π^h_K(b')`, returns `(⟨∇h(b') − ∇h(b), a − b⟩,
/// D_h(a‖b') − D_h(a‖b) − D_h(b‖b'))`. The first is non-positive and the
/// second non-negative for every member `a`.
pub fn generalized_pythagorean_gap(
    map: MirrorMap,
    set: &FeasibleSet,
    a: &Vector,
    b_prime: &Vector,
) -> Result<(f64, f64)> {
    let b = map.bregman_project(set, b_prime)?;
    let inner = (&map.grad_h(b_prime)? - &map.grad_h(&b)?).dot(&(a - &b));
    let three_point = map.bregman(a, b_prime)? - map.bregman(a, &b)? - map.bregman(&b, b_prime)?;
    Ok((inner, three_point))
}

/// Sum of the gradients recorded in `trace`.
pub fn cumulative_gradient(trace: &Trace) -> Option<Vector> {
    let grads: Vec<&Vector> = trace.steps.iter().filter_map(|s| s.gradient.as_ref()).collect();
    let first = grads.first()?;
    Some(grads[1..].iter().fold((*first).clone(), |acc, g| &acc + g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descent::{run_online_gd, StepSchedule};
    use crate::problem::ExpertsAdversary;
    use crate::vector;

    const LN2: f64 = core::f64::consts::LN_2;

    #[test]
    fn bregman_examples() {
        let x = vector![0.3, 0.7];
        for m in MirrorMap::ALL {
            assert!(m.bregman(&x, &x).unwrap().abs() < 1e-15);
        }
        assert_eq!(MirrorMap::Euclidean.bregman(&vector![1, 0], &vector![0, 0]).unwrap(), 0.5);
        let kl = MirrorMap::NegEntropy.bregman(&vector![1, 0], &vector![0.5, 0.5]).unwrap();
        assert!((kl - LN2).abs() < 1e-15);
        assert!(MirrorMap::NegEntropy.bregman(&vector![0.5, 0.5], &vector![1, 0]).is_err());
    }

    #[test]
    fn round_trip() {
        let x = vector![0.2, 0.5, 0.3];
        for m in MirrorMap::ALL {
            let back = m.grad_h_star(&m.grad_h(&x).unwrap());
            assert!(back.max_abs_diff(&x) < 1e-15);
        }
    }

    #[test]
    fn entropy_projection_rescales() {
        let s = FeasibleSet::simplex(2).unwrap();
        let p = MirrorMap::NegEntropy.bregman_project(&s, &vector![0.3, 0.9]).unwrap();
        assert!(p.max_abs_diff(&vector![0.25, 0.75]) < 1e-15);
        let member = vector![0.4, 0.6];
        assert_eq!(MirrorMap::NegEntropy.bregman_project(&s, &member).unwrap(), member);
        assert!(MirrorMap::NegEntropy.bregman_project(&FeasibleSet::unit_ball(2), &member).is_err());
    }

    #[test]
    fn entropy_projection_matches_kl_grid_search() {
        let target = vector![0.3, 0.9];
        let mut best = (f64::INFINITY, 0.0);
        for k in 1..100_000 {
            let s = k as f64 / 100_000.0;
            let d = MirrorMap::NegEntropy.bregman(&vector![s, 1.0 - s], &target).unwrap();
            if d < best.0 {
                best = (d, s);
            }
        }
        assert!((best.1 - 0.25).abs() < 1e-4);
    }

    #[test]
    fn mirror_step_examples() {
        let free = FeasibleSet::unconstrained(2);
        let x = vector![1, -2];
        let g = vector![0.5, 3];
        assert_eq!(
            mirror_step(MirrorMap::Euclidean, &free, &x, &g, 0.1).unwrap(),
            crate::descent::gd_step(&x, &g, 0.1)
        );
        let s = FeasibleSet::simplex(2).unwrap();
        let next = mirror_step(MirrorMap::NegEntropy, &s, &vector![0.5, 0.5], &vector![1, 0], LN2).unwrap();
        assert!(next.max_abs_diff(&vector![1.0 / 3.0, 2.0 / 3.0]) < 1e-15);
        let same = mirror_step(MirrorMap::NegEntropy, &s, &vector![0.2, 0.8], &vector![0, 0], 0.5).unwrap();
        assert!(same.max_abs_diff(&vector![0.2, 0.8]) < 1e-15);
    }

    #[test]
    fn entropy_step_survives_huge_exponents() {
        let s = FeasibleSet::simplex(2).unwrap();
        let next = mirror_step(MirrorMap::NegEntropy, &s, &vector![0.5, 0.5], &vector![-800, -801], 1.0).unwrap();
        assert!(next.is_finite());
        assert!((next.sum() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn entropy_step_rejects_boundary() {
        let s = FeasibleSet::simplex(2).unwrap();
        assert!(mirror_step(MirrorMap::NegEntropy, &s, &vector![1, 0], &vector![1, 0], 0.1).is_err());
        assert!(mirror_step(MirrorMap::NegEntropy, &s, &vector![0.5, 0.5], &vector![1e6, 0], 1.0).is_err());
    }

    #[test]
    fn hedge_examples() {
        let x0 = vector![0.5, 0.5];
        assert!(hedge_closed_form(&x0, &vector![0, 0], 0.3).max_abs_diff(&x0) < 1e-15);
        let x = hedge_closed_form(&x0, &vector![1, 0], LN2);
        assert!(x.max_abs_diff(&vector![1.0 / 3.0, 2.0 / 3.0]) < 1e-15);
    }

    #[test]
    fn euclidean_map_reproduces_projected_gd() {
        let adv = ExpertsAdversary::alternating();
        let ball = FeasibleSet::unit_ball(2);
        let x0 = vector![0.6, 0.0];
        let md = run_mirror_descent(&adv, MirrorMap::Euclidean, &ball, &x0, 0.2, 60).unwrap();
        let gd = run_online_gd(&adv, &ball, &x0, StepSchedule::Constant(0.2), 60).unwrap();
        for (a, b) in md.iterates().zip(gd.iterates()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn generalized_pythagorean_examples() {
        let s = FeasibleSet::simplex(2).unwrap();
        let (inner, three) =
            generalized_pythagorean_gap(MirrorMap::NegEntropy, &s, &vector![1, 0], &vector![0.3, 0.9]).unwrap();
        assert!(inner <= 1e-10 && three >= -1e-10);
        let (inner, three) =
            generalized_pythagorean_gap(MirrorMap::NegEntropy, &s, &vector![1, 0], &vector![0.4, 0.6]).unwrap();
        assert!(inner.abs() < 1e-15 && three.abs() < 1e-15);
    }

    #[test]
    fn map_ids_round_trip() {
        for m in MirrorMap::ALL {
            assert_eq!(MirrorMap::from_id(m.id()), Some(m));
        }
        assert_eq!(MirrorMap::from_id("lp"), None);
    }
}
