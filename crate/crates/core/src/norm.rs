//! The ℓ2 / ℓ1 / ℓ∞ norm family and its duality.

use crate::Vector;

/// A norm on ℝⁿ. Gradients live in the dual space and are measured with
/// [`NormKind::dual`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    Euclidean,
    L1,
    LInf,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::Euclidean, NormKind::L1, NormKind::LInf];

    pub fn dual(self) -> NormKind {
        match self {
            NormKind::Euclidean => NormKind::Euclidean,
            NormKind::L1 => NormKind::LInf,
            NormKind::LInf => NormKind::L1,
        }
    }

    pub fn norm(self, x: &Vector) -> f64 {
        match self {
            NormKind::Euclidean => x.norm2(),
            NormKind::L1 => x.norm1(),
            NormKind::LInf => x.norm_inf(),
        }
    }

    /// `‖y‖_* = max_{‖x‖=1} ⟨x, y⟩`.
    pub fn dual_norm(self, y: &Vector) -> f64 {
        self.dual().norm(y)
    }

    pub fn id(self) -> &'static str {
        match self {
            NormKind::Euclidean => "l2",
            NormKind::L1 => "l1",
            NormKind::LInf => "linf",
        }
    }
}

/// Free-function form of [`NormKind::dual_norm`].
pub fn dual_norm(kind: NormKind, y: &Vector) -> f64 {
    kind.dual_norm(y)
}
