//! String ids for problems, sets, methods, schedules and theorems, and the
//! method/theorem compatibility table.

use certgd::certify::TheoremId;
use certgd::problem::{make_diag_quadratic, ExpertsAdversary, FixedLoss, TiltedLogSumExp};
use certgd::{vector, FeasibleSet, Objective, OnlineAdversary, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemId {
    P1,
    P2,
    P3,
    Lse3,
    ExpertsAlt,
}

impl ProblemId {
    pub const ALL: [ProblemId; 5] = [
        ProblemId::P1,
        ProblemId::P2,
        ProblemId::P3,
        ProblemId::Lse3,
        ProblemId::ExpertsAlt,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ProblemId::P1 => "p1",
            ProblemId::P2 => "p2",
            ProblemId::P3 => "p3",
            ProblemId::Lse3 => "lse3",
            ProblemId::ExpertsAlt => "experts-alt",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.id() == id)
    }

    pub fn describe(self) -> &'static str {
        match self {
            ProblemId::P1 => "f(x) = x²/2 in one dimension",
            ProblemId::P2 => "f(x) = (x₁² + 4x₂²)/2",
            ProblemId::P3 => "f(x) = (x₁² + 100x₂²)/2",
            ProblemId::Lse3 => "log Σ exp(xᵢ) − ⟨(0.5, 0.3, 0.2), x⟩",
            ProblemId::ExpertsAlt => "two experts with alternating losses (1,0), (0,1)",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            ProblemId::P1 => 1,
            ProblemId::P2 | ProblemId::P3 | ProblemId::ExpertsAlt => 2,
            ProblemId::Lse3 => 3,
        }
    }

    pub fn is_online(self) -> bool {
        self == ProblemId::ExpertsAlt
    }

    pub fn build(self) -> Instance {
        let quad = |q: Vector| make_diag_quadratic(q, Vector::zeros(self.dim())).expect("registered problem");
        match self {
            ProblemId::P1 => Instance::fixed(quad(vector![1])),
            ProblemId::P2 => Instance::fixed(quad(vector![1, 4])),
            ProblemId::P3 => Instance::fixed(quad(vector![1, 100])),
            ProblemId::Lse3 => Instance::fixed(TiltedLogSumExp::new(vector![0.5, 0.3, 0.2]).expect("registered problem")),
            ProblemId::ExpertsAlt => Instance {
                objective: None,
                adversary: Box::new(ExpertsAdversary::alternating()),
            },
        }
    }
}

/// A built problem: the fixed objective when there is one, and the
/// round-by-round view every online method consumes.
pub struct Instance {
    pub objective: Option<Box<dyn Objective>>,
    pub adversary: Box<dyn OnlineAdversary>,
}

impl Instance {
    fn fixed<P: Objective + Clone + 'static>(p: P) -> Self {
        Instance {
            objective: Some(Box::new(p.clone())),
            adversary: Box::new(FixedLoss::new(p)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetId {
    Unconstrained,
    Ball,
    BallOffset,
    Box,
    BoxOffset,
    Simplex,
}

impl SetId {
    pub const ALL: [SetId; 6] = [
        SetId::Unconstrained,
        SetId::Ball,
        SetId::BallOffset,
        SetId::Box,
        SetId::BoxOffset,
        SetId::Simplex,
    ];

    pub fn id(self) -> &'static str {
        match self {
            SetId::Unconstrained => "unconstrained",
            SetId::Ball => "ball",
            SetId::BallOffset => "ball-offset",
            SetId::Box => "box",
            SetId::BoxOffset => "box-offset",
            SetId::Simplex => "simplex",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.id() == id)
    }

    pub fn describe(self) -> &'static str {
        match self {
            SetId::Unconstrained => "ℝⁿ",
            SetId::Ball => "unit ℓ2 ball at the origin",
            SetId::BallOffset => "unit ℓ2 ball centred at the all-ones vector",
            SetId::Box => "[−1, 1]ⁿ",
            SetId::BoxOffset => "[0.5, 2]ⁿ",
            SetId::Simplex => "probability simplex",
        }
    }

    pub fn build(self, dim: usize) -> FeasibleSet {
        let built = match self {
            SetId::Unconstrained => Ok(FeasibleSet::unconstrained(dim)),
            SetId::Ball => Ok(FeasibleSet::unit_ball(dim)),
            SetId::BallOffset => FeasibleSet::ball(Vector::ones(dim), 1.0),
            SetId::Box => FeasibleSet::cube(Vector::filled(dim, -1.0), Vector::ones(dim)),
            SetId::BoxOffset => FeasibleSet::cube(Vector::filled(dim, 0.5), Vector::filled(dim, 2.0)),
            SetId::Simplex => FeasibleSet::simplex(dim),
        };
        built.expect("registered sets are valid for every positive dimension")
    }
}

/// What a method demands of its feasible set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetRule {
    Any,
    Unconstrained,
    Bounded,
    Simplex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodId {
    OnlineGd,
    ScGd,
    SmoothGd,
    FrankWolfe,
    WellConditioned,
    MirrorEuclidean,
    MirrorNegEntropy,
    Agm2,
    Agm1,
    AgmConstrained,
    AgmGeneralNorm,
    ScAgm,
    RestartAgm,
}

impl MethodId {
    pub const ALL: [MethodId; 13] = [
        MethodId::OnlineGd,
        MethodId::ScGd,
        MethodId::SmoothGd,
        MethodId::FrankWolfe,
        MethodId::WellConditioned,
        MethodId::MirrorEuclidean,
        MethodId::MirrorNegEntropy,
        MethodId::Agm2,
        MethodId::Agm1,
        MethodId::AgmConstrained,
        MethodId::AgmGeneralNorm,
        MethodId::ScAgm,
        MethodId::RestartAgm,
    ];

    pub fn id(self) -> &'static str {
        match self {
            MethodId::OnlineGd => "online-gd",
            MethodId::ScGd => "sc-gd",
            MethodId::SmoothGd => "smooth-gd",
            MethodId::FrankWolfe => "frank-wolfe",
            MethodId::WellConditioned => "well-conditioned",
            MethodId::MirrorEuclidean => "mirror-euclidean",
            MethodId::MirrorNegEntropy => "mirror-negentropy",
            MethodId::Agm2 => "agm2",
            MethodId::Agm1 => "agm1",
            MethodId::AgmConstrained => "agm-constrained",
            MethodId::AgmGeneralNorm => "agm-general-norm",
            MethodId::ScAgm => "sc-agm",
            MethodId::RestartAgm => "restart-agm",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.id() == id)
    }

    /// Accepted schedule ids; the first is the default.
    pub fn schedules(self) -> &'static [&'static str] {
        match self {
            MethodId::OnlineGd => &["horizon-tuned", "anytime-tuned"],
            MethodId::ScGd => &["inverse-alpha"],
            MethodId::SmoothGd | MethodId::WellConditioned => &["inverse-beta"],
            MethodId::FrankWolfe => &["doubled", "harmonic"],
            MethodId::MirrorEuclidean | MethodId::MirrorNegEntropy => &["tuned"],
            MethodId::Agm2 => &["paper-smooth", "lambda-coupled"],
            MethodId::Agm1 => &["lambda-coupled"],
            MethodId::AgmConstrained => &["constrained-half", "constrained-full"],
            MethodId::AgmGeneralNorm => &["euclidean", "negentropy"],
            MethodId::ScAgm => &["strongly-convex"],
            MethodId::RestartAgm => &["restart"],
        }
    }

    /// Whether the method plays an online game rather than minimizing one
    /// fixed objective.
    pub fn is_online(self) -> bool {
        matches!(
            self,
            MethodId::OnlineGd | MethodId::ScGd | MethodId::MirrorEuclidean | MethodId::MirrorNegEntropy
        )
    }

    pub fn set_rule(self, schedule: &str) -> SetRule {
        match self {
            MethodId::FrankWolfe => SetRule::Bounded,
            MethodId::MirrorNegEntropy => SetRule::Simplex,
            MethodId::AgmGeneralNorm if schedule == "negentropy" => SetRule::Simplex,
            MethodId::Agm2 | MethodId::Agm1 | MethodId::ScAgm | MethodId::RestartAgm => SetRule::Unconstrained,
            _ => SetRule::Any,
        }
    }

    pub fn needs_alpha(self) -> bool {
        matches!(
            self,
            MethodId::ScGd | MethodId::WellConditioned | MethodId::ScAgm | MethodId::RestartAgm
        )
    }

    pub fn needs_beta(self) -> bool {
        !self.is_online() && self != MethodId::FrankWolfe
    }
}

/// `(method, schedule or any, theorem)`: every pairing the CLI accepts.
///
/// The accelerated potential is tied to `η_t = (t+1)/(2β)`, so the λ
/// schedule and its momentum form carry no certificate of their own; the
/// tuned online bound needs a constant step.
pub const COMPATIBILITY: &[(MethodId, Option<&str>, TheoremId)] = &[
    (MethodId::OnlineGd, Some("horizon-tuned"), TheoremId::GdBasic),
    (MethodId::ScGd, None, TheoremId::GdSc),
    (MethodId::ScGd, None, TheoremId::GdScOff),
    (MethodId::SmoothGd, None, TheoremId::Smooth1),
    (MethodId::SmoothGd, None, TheoremId::Smooth2),
    (MethodId::SmoothGd, None, TheoremId::Smooth3),
    (MethodId::SmoothGd, None, TheoremId::SmoothProj),
    (MethodId::SmoothGd, None, TheoremId::FailedAttempt),
    (MethodId::FrankWolfe, Some("harmonic"), TheoremId::FrankW),
    (MethodId::FrankWolfe, Some("doubled"), TheoremId::FrankW2),
    (MethodId::WellConditioned, None, TheoremId::WellCond),
    (MethodId::WellConditioned, None, TheoremId::WellCondDist),
    (MethodId::MirrorEuclidean, None, TheoremId::Mirror),
    (MethodId::MirrorNegEntropy, None, TheoremId::Mirror),
    (MethodId::Agm2, Some("paper-smooth"), TheoremId::NestAgm2),
    (MethodId::AgmConstrained, None, TheoremId::NestAgm2Cond),
    (MethodId::AgmGeneralNorm, None, TheoremId::NestAgm2Norms),
    (MethodId::ScAgm, None, TheoremId::NestWcond),
];

/// Theorems certifiable on runs of `method` under `schedule`.
pub fn compatible_theorems(method: MethodId, schedule: &str) -> Vec<TheoremId> {
    COMPATIBILITY
        .iter()
        .filter(|(m, s, _)| *m == method && s.is_none_or(|s| s == schedule))
        .map(|(_, _, t)| *t)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for p in ProblemId::ALL {
            assert_eq!(ProblemId::from_id(p.id()), Some(p));
        }
        for s in SetId::ALL {
            assert_eq!(SetId::from_id(s.id()), Some(s));
        }
        for m in MethodId::ALL {
            assert_eq!(MethodId::from_id(m.id()), Some(m));
            assert!(!m.schedules().is_empty());
        }
    }

    #[test]
    fn every_table_entry_names_a_real_schedule() {
        for (m, s, _) in COMPATIBILITY {
            if let Some(s) = s {
                assert!(m.schedules().contains(s), "{} {s}", m.id());
            }
        }
    }

    #[test]
    fn frank_wolfe_schedules_select_their_theorem() {
        assert_eq!(compatible_theorems(MethodId::FrankWolfe, "harmonic"), vec![TheoremId::FrankW]);
        assert_eq!(compatible_theorems(MethodId::FrankWolfe, "doubled"), vec![TheoremId::FrankW2]);
        assert!(compatible_theorems(MethodId::RestartAgm, "restart").is_empty());
        assert!(compatible_theorems(MethodId::Agm2, "lambda-coupled").is_empty());
    }

    #[test]
    fn problems_build_at_their_dimension() {
        for p in ProblemId::ALL {
            let inst = p.build();
            assert_eq!(inst.adversary.dim(), p.dim());
            assert_eq!(inst.objective.is_none(), p.is_online());
        }
    }
}
