//! Feasible sets: membership, Euclidean projection and linear minimization.

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result, Vector, MEMBERSHIP_TOL};

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    Unconstrained { dim: usize },
    Ball { center: Vector, radius: f64 },
    Box { lo: Vector, hi: Vector },
    /// The probability simplex `{x ≥ 0, Σ xᵢ = 1}`.
    Simplex { dim: usize },
}

impl FeasibleSet {
    pub fn unconstrained(dim: usize) -> Self {
        FeasibleSet::Unconstrained { dim }
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("radius", "must be positive and finite"));
        }
        Ok(FeasibleSet::Ball { center, radius })
    }

    pub fn unit_ball(dim: usize) -> Self {
        FeasibleSet::Ball {
            center: Vector::zeros(dim),
            radius: 1.0,
        }
    }

    pub fn cube(lo: Vector, hi: Vector) -> Result<Self> {
        if lo.dim() != hi.dim() {
            return Err(Error::invalid("box", "bounds differ in dimension"));
        }
        if lo.iter().zip(hi.iter()).any(|(l, h)| l > h) {
            return Err(Error::invalid("box", "lower bound exceeds upper bound"));
        }
        Ok(FeasibleSet::Box { lo, hi })
    }

    pub fn simplex(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("simplex", "dimension must be positive"));
        }
        Ok(FeasibleSet::Simplex { dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Unconstrained { dim } | FeasibleSet::Simplex { dim } => *dim,
            FeasibleSet::Ball { center, .. } => center.dim(),
            FeasibleSet::Box { lo, .. } => lo.dim(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, FeasibleSet::Unconstrained { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FeasibleSet::Unconstrained { .. } => "unconstrained",
            FeasibleSet::Ball { .. } => "ball",
            FeasibleSet::Box { .. } => "box",
            FeasibleSet::Simplex { .. } => "simplex",
        }
    }

    fn check_dim(&self, x: &Vector) {
        assert_eq!(self.dim(), x.dim(), "dimension mismatch with feasible set");
    }

    /// Membership with absolute tolerance [`MEMBERSHIP_TOL`] per constraint.
    pub fn contains(&self, x: &Vector) -> bool {
        self.check_dim(x);
        match self {
            FeasibleSet::Unconstrained { .. } => true,
            FeasibleSet::Ball { center, radius } => x.dist2(center) <= radius + MEMBERSHIP_TOL,
            FeasibleSet::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi.iter()))
                .all(|(v, (l, h))| *v >= l - MEMBERSHIP_TOL && *v <= h + MEMBERSHIP_TOL),
            FeasibleSet::Simplex { .. } => {
                x.iter().all(|&v| v >= -MEMBERSHIP_TOL) && (x.sum() - 1.0).abs() <= MEMBERSHIP_TOL
            }
        }
    }

    /// Euclidean projection `argmin_{x∈K} ‖x − x'‖₂`.
    pub fn project(&self, x: &Vector) -> Vector {
        self.check_dim(x);
        match self {
            FeasibleSet::Unconstrained { .. } => x.clone(),
            FeasibleSet::Ball { center, radius } => {
                let d = x - center;
                let n = d.norm2();
                if n <= *radius {
                    x.clone()
                } else {
                    center.axpy(radius / n, &d)
                }
            }
            FeasibleSet::Box { lo, hi } => {
                let mut out = x.clone();
                for i in 0..out.dim() {
                    out[i] = out[i].clamp(lo[i], hi[i]);
                }
                out
            }
            FeasibleSet::Simplex { .. } => project_simplex(x),
        }
    }

    /// Euclidean diameter `max_{u,v∈K} ‖u − v‖₂`; `None` when unbounded.
    pub fn diameter(&self) -> Option<f64> {
        match self {
            FeasibleSet::Unconstrained { .. } => None,
            FeasibleSet::Ball { radius, .. } => Some(2.0 * radius),
            FeasibleSet::Box { lo, hi } => Some(lo.dist2(hi)),
            FeasibleSet::Simplex { dim } => Some(if *dim > 1 { libm::sqrt(2.0) } else { 0.0 }),
        }
    }

    /// Linear minimization oracle `argmin_{y∈K} ⟨g, y⟩`, returning an
    /// extreme point. Ties go to the lowest coordinate index; a zero
    /// gradient on the ball returns the center.
    pub fn lmo(&self, g: &Vector) -> Result<Vector> {
        self.check_dim(g);
        match self {
            FeasibleSet::Unconstrained { .. } => Err(Error::Unsupported(
                "linear minimization over an unbounded set".into(),
            )),
            FeasibleSet::Ball { center, radius } => {
                let n = g.norm2();
                if n == 0.0 {
                    Ok(center.clone())
                } else {
                    Ok(center.axpy(-radius / n, g))
                }
            }
            FeasibleSet::Box { lo, hi } => Ok(Vector::new(
                g.iter()
                    .enumerate()
                    .map(|(i, &gi)| if gi < 0.0 { hi[i] } else { lo[i] })
                    .collect(),
            )
            .expect("box bounds are finite")),
            FeasibleSet::Simplex { dim } => {
                let i = g.argmin().ok_or(Error::Empty("gradient"))?;
                Ok(Vector::basis(*dim, i))
            }
        }
    }

    /// A deterministic interior-ish starting point: the all-ones vector
    /// projected onto the set (the uniform point for the simplex).
    pub fn default_start(&self) -> Vector {
        match self {
            FeasibleSet::Simplex { dim } => Vector::filled(*dim, 1.0 / *dim as f64),
            _ => self.project(&Vector::ones(self.dim())),
        }
    }

    /// Validates that `x` is a member, with a diagnostic naming `what`.
    pub fn require_member(&self, x: &Vector, what: &str) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutsideDomain(format!(
                "{what} is not in the {} set",
                self.kind()
            )))
        }
    }
}

/// Sort-then-threshold projection onto the probability simplex.
///
/// The threshold index is the largest `j` with `u_j − (Σ_{i≤j} u_i − 1)/j ≥ 0`
/// over the descending sort `u`, so ties resolve toward the larger support.
pub fn project_simplex(x: &Vector) -> Vector {
    let mut u: Vec<f64> = x.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if uj - t >= 0.0 {
            theta = t;
        }
    }
    x.map(|v| (v - theta).max(0.0))
}

/// `⟨a − b, b' − b⟩` with `b = Π_K(b')`. Non-positive for every member `a`.
pub fn pythagorean_gap(set: &FeasibleSet, a: &Vector, b_prime: &Vector) -> f64 {
    let b = set.project(b_prime);
    (a - &b).dot(&(b_prime - &b))
}
