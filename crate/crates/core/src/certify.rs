//! Potential-function certificates.
//!
//! Each convergence proof is a potential `Φ_t` with a per-step bound
//! `ΔΦ_t (+ round regret) ≤ B_t`; summing the steps gives the theorem. The
//! certifier evaluates `Φ` along a recorded trace, checks every step with
//! slack `tol·(1 + |Φ_t|)`, confirms the telescoping identity, and checks
//! the theorem's end-to-end inequality.
//!
//! Constants that the theory needs but the problem cannot supply (`D`, `G`)
//! are estimated from the trajectory; such certificates carry a flag.

use alloc::string::String;
use alloc::vec::Vec;

use crate::descent::weighted_average;
use crate::mirror::MirrorMap;
use crate::{Error, FeasibleSet, NormKind, Objective, OnlineAdversary, Result, State, Step, Trace, Vector};

/// Relative slack used on traces up to [`LONG_TRACE`] steps.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Relative slack used on longer traces.
pub const LONG_TOL: f64 = 1e-8;
pub const LONG_TRACE: usize = 100_000;

pub const FLAG_ESTIMATED_D: &str = "trajectory-estimated D";
pub const FLAG_ESTIMATED_G: &str = "trajectory-estimated G";
pub const FLAG_ALT_ETA: &str = "alternative eta schedule";
pub const FLAG_NON_FINITE: &str = "non-finite potential";

pub fn default_tol(steps: usize) -> f64 {
    if steps > LONG_TRACE {
        LONG_TOL
    } else {
        DEFAULT_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    /// `‖x_t − x*‖²/(2η)`.
    BasicGd,
    /// `(tα/2)‖x_t − x*‖²`.
    StrongConvexGd,
    /// `t(f(x_t) − f*)`.
    SmoothTakeI,
    /// `t(t+1)(f(x_t) − f*)`.
    SmoothTakeII,
    /// `t(f(x_t) − f*) + (β/2)‖x_t − x*‖²`.
    SmoothTakeIII,
    /// `(1+γ)^t (f(x_t) − f*)` with `γ = 1/(κ − 1)`.
    WellConditioned,
    /// `D_h(x*‖x_t)/η`.
    MirrorDescent,
    /// `t(t+1)(f(y_t) − f*) + 2β‖z_t − x*‖²`.
    Agm2,
    /// As [`PotentialKind::Agm2`] with projected sequences.
    Agm2Constrained,
    /// `t(t+1)(f(y_t) − f*) + (4β/α_h) D_h(x*‖z_t)`.
    Agm2GeneralNorm,
    /// `(1+γ)^t (f(y_t) − f* + (α/2)‖z_t − x*‖²)` with `γ = 1/(√κ − 1)`.
    StronglyConvexAgm,
    /// `t(t+1)(f(x_t) − f*) + (a/2)‖x_t − x*‖²` with `a = 4β` under plain
    /// smooth descent. Expected to increase somewhere.
    FailedAttempt,
}

impl PotentialKind {
    pub fn id(self) -> &'static str {
        match self {
            PotentialKind::BasicGd => "basic-gd",
            PotentialKind::StrongConvexGd => "strong-convex-gd",
            PotentialKind::SmoothTakeI => "smooth-take-1",
            PotentialKind::SmoothTakeII => "smooth-take-2",
            PotentialKind::SmoothTakeIII => "smooth-take-3",
            PotentialKind::WellConditioned => "well-conditioned",
            PotentialKind::MirrorDescent => "mirror-descent",
            PotentialKind::Agm2 => "agm2",
            PotentialKind::Agm2Constrained => "agm2-constrained",
            PotentialKind::Agm2GeneralNorm => "agm2-general-norm",
            PotentialKind::StronglyConvexAgm => "strongly-convex-agm",
            PotentialKind::FailedAttempt => "failed-attempt",
        }
    }

    /// Whether the proof adds the round regret `f_t(x_t) − f_t(x*)` to `ΔΦ`.
    pub fn is_amortized(self) -> bool {
        matches!(
            self,
            PotentialKind::BasicGd | PotentialKind::StrongConvexGd | PotentialKind::MirrorDescent
        )
    }

    /// Whether the per-step bound is `ΔΦ ≤ 0`.
    pub fn is_monotone(self) -> bool {
        matches!(
            self,
            PotentialKind::SmoothTakeIII
                | PotentialKind::WellConditioned
                | PotentialKind::Agm2
                | PotentialKind::Agm2Constrained
                | PotentialKind::Agm2GeneralNorm
                | PotentialKind::StronglyConvexAgm
        )
    }

    fn is_exponential(self) -> bool {
        matches!(self, PotentialKind::WellConditioned | PotentialKind::StronglyConvexAgm)
    }

    /// Violations are the expected outcome.
    pub fn expects_violation(self) -> bool {
        self == PotentialKind::FailedAttempt
    }
}

/// A constant together with whether it was read off the trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub estimated: bool,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, estimated: false }
    }

    pub fn from_trajectory(value: f64) -> Self {
        Estimate { value, estimated: true }
    }
}

/// Everything a certificate may need besides the trace itself.
#[derive(Debug, Clone, PartialEq)]
pub struct CertContext {
    /// Comparator: the minimizer, or the best fixed point in hindsight.
    pub x_star: Vector,
    /// `f(x*)` for offline runs.
    pub f_star: f64,
    pub alpha: Option<f64>,
    /// Smoothness, measured in the mirror map's norm when one is set.
    pub beta: Option<f64>,
    /// Constant step size of the run.
    pub eta: Option<f64>,
    pub map: Option<MirrorMap>,
    pub d: Option<Estimate>,
    pub g: Option<Estimate>,
    /// Distance weight of the accelerated potential, as a multiple of `β`.
    /// The `(t+1)/(2β)` schedule gives 2; the `(t+1)/β` alternative gives 1.
    pub coupling: f64,
    /// Per-step relative slack; `None` picks [`default_tol`].
    pub tol: Option<f64>,
}

impl CertContext {
    pub fn new(x_star: Vector, f_star: f64) -> Self {
        CertContext {
            x_star,
            f_star,
            alpha: None,
            beta: None,
            eta: None,
            map: None,
            d: None,
            g: None,
            coupling: 2.0,
            tol: None,
        }
    }

    /// Context for an offline run of `p` over `set` from the first record of
    /// `trace`. `D` is the set diameter, else the closed-form sublevel radius,
    /// else the largest iterate distance; `G` is the declared bound, else the
    /// largest recorded gradient.
    pub fn offline(p: &dyn Objective, set: &FeasibleSet, trace: &Trace, map: Option<MirrorMap>) -> Result<Self> {
        let x0 = &trace.first().ok_or(Error::Empty("trace"))?.state.x;
        let x_star = p
            .minimizer_near(set, x0)
            .ok_or_else(|| Error::Unsupported("no known minimizer for this problem and set".into()))?;
        let mut ctx = CertContext::new(x_star.clone(), p.value(&x_star));
        let c = p.constants();
        ctx.alpha = c.alpha;
        ctx.beta = match map {
            Some(m) => p.smoothness_wrt(m.norm()),
            None => c.beta,
        };
        ctx.map = map;
        ctx.eta = constant_step(trace);
        ctx.d = Some(match set.diameter() {
            Some(d) => Estimate::exact(d),
            None => match p.sublevel_diameter(x0) {
                Some(d) => Estimate::exact(d),
                None => Estimate::from_trajectory(trace.max_distance(&x_star)),
            },
        });
        let norm = map.map_or(NormKind::Euclidean, |m| m.norm().dual());
        ctx.g = Some(match (c.lipschitz, norm) {
            (Some(g), NormKind::Euclidean) => Estimate::exact(g),
            _ => Estimate::from_trajectory(trace.max_gradient_norm(norm)),
        });
        Ok(ctx)
    }

    /// Context for an online run against the best fixed point in hindsight.
    pub fn online(adv: &dyn OnlineAdversary, set: &FeasibleSet, trace: &Trace, map: Option<MirrorMap>) -> Result<Self> {
        let rounds = trace.len();
        let x_star = adv
            .best_fixed(set, rounds)
            .ok_or_else(|| Error::Unsupported("no best fixed point for this adversary and set".into()))?;
        let mut ctx = CertContext::new(x_star.clone(), 0.0);
        ctx.alpha = adv.strong_convexity();
        ctx.map = map;
        ctx.eta = constant_step(trace);
        ctx.d = Some(match set.diameter() {
            Some(d) => Estimate::exact(d),
            None => Estimate::from_trajectory(trace.max_distance(&x_star)),
        });
        let norm = map.map_or(NormKind::Euclidean, |m| m.norm().dual());
        ctx.g = Some(match adv.gradient_bound(norm) {
            Some(g) => Estimate::exact(g),
            None => Estimate::from_trajectory(trace.max_gradient_norm(norm)),
        });
        Ok(ctx)
    }

    fn tol(&self, steps: usize) -> f64 {
        self.tol.unwrap_or_else(|| default_tol(steps))
    }

    fn flags(&self) -> Vec<&'static str> {
        let mut flags = Vec::new();
        if self.d.is_some_and(|d| d.estimated) {
            flags.push(FLAG_ESTIMATED_D);
        }
        if self.g.is_some_and(|g| g.estimated) {
            flags.push(FLAG_ESTIMATED_G);
        }
        if self.coupling != 2.0 {
            flags.push(FLAG_ALT_ETA);
        }
        flags
    }
}

fn constant_step(trace: &Trace) -> Option<f64> {
    let mut sizes = trace.steps.iter().filter_map(|s| s.step_size);
    let first = sizes.next()?;
    sizes.all(|e| e == first).then_some(first)
}

fn need(v: Option<f64>, name: &'static str) -> Result<f64> {
    v.ok_or_else(|| Error::invalid(name, "required by this certificate but not available"))
}

/// The source of the loss played at each round.
#[derive(Clone, Copy)]
pub enum Losses<'a> {
    Fixed(&'a dyn Objective),
    Online(&'a dyn OnlineAdversary),
}

impl<'a> Losses<'a> {
    pub fn at(&self, t: usize) -> &dyn Objective {
        match self {
            Losses::Fixed(p) => *p,
            Losses::Online(adv) => adv.loss(t),
        }
    }
}

/// A potential with all of its constants resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub eta: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub alpha_h: Option<f64>,
    pub map: Option<MirrorMap>,
    pub coupling: f64,
    pub d: Option<f64>,
    pub g: Option<f64>,
    pub x_star: Vector,
    pub f_star: f64,
}

impl PotentialSpec {
    /// Resolves the constants `kind` needs from `ctx`.
    pub fn new(kind: PotentialKind, ctx: &CertContext) -> Result<Self> {
        let mut spec = PotentialSpec {
            kind,
            eta: None,
            alpha: None,
            beta: None,
            gamma: None,
            alpha_h: None,
            map: None,
            coupling: ctx.coupling,
            d: None,
            g: None,
            x_star: ctx.x_star.clone(),
            f_star: ctx.f_star,
        };
        match kind {
            PotentialKind::BasicGd => {
                spec.eta = Some(need(ctx.eta, "eta")?);
                spec.g = Some(need(ctx.g.map(|g| g.value), "G")?);
            }
            PotentialKind::StrongConvexGd => {
                spec.alpha = Some(need(ctx.alpha, "alpha")?);
                spec.g = Some(need(ctx.g.map(|g| g.value), "G")?);
            }
            PotentialKind::SmoothTakeI | PotentialKind::SmoothTakeII => {
                spec.beta = Some(need(ctx.beta, "beta")?);
                spec.d = Some(need(ctx.d.map(|d| d.value), "D")?);
            }
            PotentialKind::SmoothTakeIII
            | PotentialKind::Agm2
            | PotentialKind::Agm2Constrained
            | PotentialKind::FailedAttempt => {
                spec.beta = Some(need(ctx.beta, "beta")?);
            }
            PotentialKind::WellConditioned | PotentialKind::StronglyConvexAgm => {
                let alpha = need(ctx.alpha, "alpha")?;
                let beta = need(ctx.beta, "beta")?;
                let kappa = beta / alpha;
                if kappa <= 1.0 {
                    return Err(Error::invalid("kappa", "γ is undefined at κ = 1"));
                }
                spec.alpha = Some(alpha);
                spec.beta = Some(beta);
                spec.gamma = Some(if kind == PotentialKind::WellConditioned {
                    1.0 / (kappa - 1.0)
                } else {
                    1.0 / (libm::sqrt(kappa) - 1.0)
                });
            }
            PotentialKind::MirrorDescent => {
                let map = ctx.map.ok_or_else(|| Error::invalid("map", "mirror potential needs a map"))?;
                spec.eta = Some(need(ctx.eta, "eta")?);
                spec.map = Some(map);
                spec.alpha_h = Some(map.alpha_h());
            }
            PotentialKind::Agm2GeneralNorm => {
                let map = ctx.map.ok_or_else(|| Error::invalid("map", "general-norm potential needs a map"))?;
                spec.beta = Some(need(ctx.beta, "beta")?);
                spec.map = Some(map);
                spec.alpha_h = Some(map.alpha_h());
            }
        }
        Ok(spec)
    }

    /// The time-dependent weight separated from exponential potentials:
    /// `(1+γ)^t`, or 1 for every other kind.
    fn scale(&self, t: usize) -> f64 {
        match self.gamma {
            Some(g) if self.kind.is_exponential() => libm::pow(1.0 + g, t as f64),
            _ => 1.0,
        }
    }

    /// `Φ_t / scale(t)`.
    fn reduced(&self, state: &State, t: usize, f: &dyn Objective) -> Result<f64> {
        let tf = t as f64;
        let xs = &self.x_star;
        let gap = |v: &Vector| f.value(v) - self.f_star;
        let z = || {
            state
                .z
                .as_ref()
                .ok_or_else(|| Error::invalid("state", "accelerated potential needs z"))
        };
        let b = |v: Option<f64>| v.expect("resolved by PotentialSpec::new");
        Ok(match self.kind {
            PotentialKind::BasicGd => state.x.dist2_sq(xs) / (2.0 * b(self.eta)),
            PotentialKind::StrongConvexGd => tf * b(self.alpha) / 2.0 * state.x.dist2_sq(xs),
            PotentialKind::SmoothTakeI => tf * gap(&state.x),
            PotentialKind::SmoothTakeII => tf * (tf + 1.0) * gap(&state.x),
            PotentialKind::SmoothTakeIII => tf * gap(&state.x) + b(self.beta) / 2.0 * state.x.dist2_sq(xs),
            PotentialKind::WellConditioned => gap(&state.x),
            PotentialKind::MirrorDescent => {
                self.map.expect("resolved").bregman(xs, &state.x)? / b(self.eta)
            }
            PotentialKind::Agm2 | PotentialKind::Agm2Constrained => {
                tf * (tf + 1.0) * gap(state.output()) + self.coupling * b(self.beta) * z()?.dist2_sq(xs)
            }
            PotentialKind::Agm2GeneralNorm => {
                let map = self.map.expect("resolved");
                tf * (tf + 1.0) * gap(state.output())
                    + 4.0 * b(self.beta) / b(self.alpha_h) * map.bregman(xs, z()?)?
            }
            PotentialKind::StronglyConvexAgm => {
                gap(state.output()) + b(self.alpha) / 2.0 * z()?.dist2_sq(xs)
            }
            PotentialKind::FailedAttempt => {
                tf * (tf + 1.0) * gap(&state.x) + 2.0 * b(self.beta) * state.x.dist2_sq(xs)
            }
        })
    }

    /// The per-step allowance `B_t` for the step from `t` to `t + 1`.
    fn allowance(&self, t: usize, prev: &Step) -> f64 {
        let tf = t as f64;
        let b = |v: Option<f64>| v.expect("resolved by PotentialSpec::new");
        match self.kind {
            PotentialKind::BasicGd => b(self.eta) * sq(b(self.g)) / 2.0,
            PotentialKind::StrongConvexGd => {
                let eta = prev.step_size.unwrap_or(1.0 / (b(self.alpha) * (tf + 1.0)));
                eta * sq(b(self.g)) / 2.0
            }
            PotentialKind::SmoothTakeI => sq(b(self.d)) * b(self.beta) / (2.0 * (tf + 1.0)),
            PotentialKind::SmoothTakeII => 2.0 * sq(b(self.d)) * b(self.beta) * (tf + 1.0) / (tf + 2.0),
            PotentialKind::MirrorDescent => {
                let map = self.map.expect("resolved");
                let dual = prev.gradient.as_ref().map_or(0.0, |g| map.norm().dual_norm(g));
                b(self.eta) / (2.0 * b(self.alpha_h)) * dual * dual
            }
            _ => 0.0,
        }
    }
}

/// `Φ_t` at `state`, with `f` the objective used for function-value terms.
pub fn potential(spec: &PotentialSpec, state: &State, t: usize, f: &dyn Objective) -> Result<f64> {
    Ok(spec.scale(t) * spec.reduced(state, t, f)?)
}

/// One checked step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: usize,
    pub phi: f64,
    pub phi_next: f64,
    pub delta: f64,
    /// `ΔΦ` plus the round regret for amortized kinds, else `ΔΦ`.
    pub amortized: f64,
    pub allowed: f64,
    pub slack: f64,
    /// Whether the step satisfied its bound (before any inversion).
    pub within_bound: bool,
}

/// Checks the step from `prev` to `next`. Exponential potentials are
/// compared after dividing by `(1+γ)^t`, which keeps long runs finite.
pub fn certify_step(spec: &PotentialSpec, losses: Losses<'_>, prev: &Step, next: &Step, tol: f64) -> Result<StepRecord> {
    let t = prev.t;
    // Offline kinds evaluate function values on the fixed objective.
    let f_now = losses.at(t);
    let f_next = if spec.kind.is_amortized() { f_now } else { losses.at(next.t) };
    let r = spec.reduced(&prev.state, t, f_now)?;
    let r_next = spec.reduced(&next.state, next.t, f_next)?;
    let s = spec.scale(t);
    let growth = spec.scale(next.t) / s;
    let reduced_delta = growth * r_next - r;
    let regret = if spec.kind.is_amortized() {
        f_now.value(&prev.state.x) - f_now.value(&spec.x_star)
    } else {
        0.0
    };
    let allowed = spec.allowance(t, prev);
    let within_bound = if spec.kind.is_exponential() {
        reduced_delta <= tol * (1.0 / s + r.abs())
    } else {
        reduced_delta + regret <= allowed + tol * (1.0 + r.abs())
    };
    let phi = s * r;
    Ok(StepRecord {
        t,
        phi,
        phi_next: s * growth * r_next,
        delta: s * reduced_delta,
        amortized: s * reduced_delta + regret,
        allowed,
        slack: tol * (1.0 + phi.abs()),
        within_bound,
    })
}

/// All steps of one trace under one potential.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub kind: PotentialKind,
    pub steps: Vec<StepRecord>,
    pub violations: usize,
    /// `|Φ_T − Φ₀ − Σ ΔΦ_t|`, or `None` when a potential is not finite.
    pub telescoping_residual: Option<f64>,
    pub telescoping_ok: bool,
    /// Every step within bound, or, for the failed attempt, at least one
    /// step outside it.
    pub pass: bool,
    pub flags: Vec<&'static str>,
}

pub fn certify_steps(spec: &PotentialSpec, losses: Losses<'_>, trace: &Trace, tol: f64) -> Result<StepReport> {
    let mut steps = Vec::with_capacity(trace.len());
    for w in trace.steps.windows(2) {
        steps.push(certify_step(spec, losses, &w[0], &w[1], tol)?);
    }
    let violations = steps.iter().filter(|s| !s.within_bound).count();
    let mut flags = Vec::new();
    let (residual, telescoping_ok) = match (steps.first(), steps.last()) {
        (Some(first), Some(last)) => {
            let sum: f64 = steps.iter().map(|s| s.delta).sum();
            let scale = steps.iter().map(|s| s.phi.abs().max(s.delta.abs())).fold(1.0, f64::max);
            let residual = ((last.phi_next - first.phi) - sum).abs();
            if residual.is_finite() {
                (Some(residual), residual <= 1e-9 * scale)
            } else {
                flags.push(FLAG_NON_FINITE);
                (None, true)
            }
        }
        _ => (Some(0.0), true),
    };
    let pass = if spec.kind.expects_violation() {
        violations > 0
    } else {
        violations == 0
    };
    Ok(StepReport {
        kind: spec.kind,
        steps,
        violations,
        telescoping_residual: residual,
        telescoping_ok,
        pass,
        flags,
    })
}

/// Theorems with an end-to-end check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremId {
    GdBasic,
    GdSc,
    GdScOff,
    Smooth1,
    Smooth2,
    Smooth3,
    SmoothProj,
    FrankW,
    FrankW2,
    WellCond,
    WellCondDist,
    Mirror,
    NestAgm2,
    NestAgm2Cond,
    NestAgm2Norms,
    NestWcond,
    FailedAttempt,
}

impl TheoremId {
    pub const ALL: [TheoremId; 17] = [
        TheoremId::GdBasic,
        TheoremId::GdSc,
        TheoremId::GdScOff,
        TheoremId::Smooth1,
        TheoremId::Smooth2,
        TheoremId::Smooth3,
        TheoremId::SmoothProj,
        TheoremId::FrankW,
        TheoremId::FrankW2,
        TheoremId::WellCond,
        TheoremId::WellCondDist,
        TheoremId::Mirror,
        TheoremId::NestAgm2,
        TheoremId::NestAgm2Cond,
        TheoremId::NestAgm2Norms,
        TheoremId::NestWcond,
        TheoremId::FailedAttempt,
    ];

    pub fn id(self) -> &'static str {
        match self {
            TheoremId::GdBasic => "gd-basic",
            TheoremId::GdSc => "gd-sc",
            TheoremId::GdScOff => "gd-sc-off",
            TheoremId::Smooth1 => "smooth-1",
            TheoremId::Smooth2 => "smooth-2",
            TheoremId::Smooth3 => "smooth-3",
            TheoremId::SmoothProj => "smooth-proj",
            TheoremId::FrankW => "frankw",
            TheoremId::FrankW2 => "frankw2",
            TheoremId::WellCond => "wellcond",
            TheoremId::WellCondDist => "wellcond-dist",
            TheoremId::Mirror => "mirror",
            TheoremId::NestAgm2 => "nest-agm2",
            TheoremId::NestAgm2Cond => "nest-agm2-cond",
            TheoremId::NestAgm2Norms => "nest-agm2-norms",
            TheoremId::NestWcond => "nest-wcond",
            TheoremId::FailedAttempt => "failed-attempt",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.id() == id)
    }

    pub fn potential(self) -> PotentialKind {
        match self {
            TheoremId::GdBasic => PotentialKind::BasicGd,
            TheoremId::GdSc | TheoremId::GdScOff => PotentialKind::StrongConvexGd,
            TheoremId::Smooth1 | TheoremId::FrankW => PotentialKind::SmoothTakeI,
            TheoremId::Smooth2 | TheoremId::FrankW2 => PotentialKind::SmoothTakeII,
            TheoremId::Smooth3 | TheoremId::SmoothProj => PotentialKind::SmoothTakeIII,
            TheoremId::WellCond | TheoremId::WellCondDist => PotentialKind::WellConditioned,
            TheoremId::Mirror => PotentialKind::MirrorDescent,
            TheoremId::NestAgm2 => PotentialKind::Agm2,
            TheoremId::NestAgm2Cond => PotentialKind::Agm2Constrained,
            TheoremId::NestAgm2Norms => PotentialKind::Agm2GeneralNorm,
            TheoremId::NestWcond => PotentialKind::StronglyConvexAgm,
            TheoremId::FailedAttempt => PotentialKind::FailedAttempt,
        }
    }

    /// Whether the inequality is claimed at every `t`, not only at `T`.
    pub fn is_anytime(self) -> bool {
        matches!(
            self,
            TheoremId::NestAgm2 | TheoremId::NestAgm2Cond | TheoremId::NestAgm2Norms | TheoremId::NestWcond
        )
    }

    fn is_regret(self) -> bool {
        matches!(self, TheoremId::GdBasic | TheoremId::GdSc | TheoremId::Mirror)
    }

    /// The right-hand side at horizon `t` for a run starting at `x0`.
    ///
    /// The mirror envelope uses `G` in place of the recorded gradients and
    /// the general-norm envelope drops the final divergence, so both are the
    /// looser textbook forms.
    pub fn envelope(self, ctx: &CertContext, x0: &Vector, f0: f64, t: usize) -> Option<f64> {
        let tf = t as f64;
        if t == 0 && self != TheoremId::NestWcond {
            return None;
        }
        let d = ctx.d.map(|d| d.value);
        let g = ctx.g.map(|g| g.value);
        let r0 = x0.dist2_sq(&ctx.x_star);
        Some(match self {
            TheoremId::GdBasic => {
                let (eta, g, d) = (ctx.eta?, g?, d?);
                eta * g * g / 2.0 + d * d / (2.0 * eta * tf)
            }
            TheoremId::GdSc => sq(g?) * libm::log(tf) / (2.0 * tf * ctx.alpha?),
            TheoremId::GdScOff => sq(g?) / (ctx.alpha? * (tf + 1.0)),
            TheoremId::Smooth1 | TheoremId::FrankW => ctx.beta? * sq(d?) * (1.0 + libm::log(tf)) / (2.0 * tf),
            TheoremId::Smooth2 | TheoremId::FrankW2 => 2.0 * ctx.beta? * sq(d?) / (tf + 1.0),
            TheoremId::Smooth3 | TheoremId::SmoothProj => ctx.beta? * r0 / (2.0 * tf),
            TheoremId::WellCond => libm::exp(-tf / kappa(ctx)?) * (f0 - ctx.f_star),
            TheoremId::WellCondDist => {
                let k = kappa(ctx)?;
                k * libm::exp(-tf / k) * r0
            }
            TheoremId::Mirror => {
                let map = ctx.map?;
                let eta = ctx.eta?;
                map.bregman(&ctx.x_star, x0).ok()? / eta + eta * tf * sq(g?) / (2.0 * map.alpha_h())
            }
            TheoremId::NestAgm2 | TheoremId::NestAgm2Cond => 2.0 * ctx.beta? * r0 / (tf * (tf + 1.0)),
            TheoremId::NestAgm2Norms => {
                let map = ctx.map?;
                4.0 * ctx.beta? / map.alpha_h() * map.bregman(&ctx.x_star, x0).ok()? / (tf * (tf + 1.0))
            }
            TheoremId::NestWcond => {
                let (alpha, beta) = (ctx.alpha?, ctx.beta?);
                let gamma = 1.0 / (libm::sqrt(beta / alpha) - 1.0);
                libm::pow(1.0 + gamma, -tf) * (alpha + beta) / 2.0 * r0
            }
            TheoremId::FailedAttempt => return None,
        })
    }
}

fn sq(v: f64) -> f64 {
    v * v
}

fn kappa(ctx: &CertContext) -> Option<f64> {
    Some(ctx.beta? / ctx.alpha?)
}

/// End-to-end verdict for one theorem.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub theorem: TheoremId,
    /// Measured gap or regret; for anytime theorems, at the worst `t`.
    pub lhs: f64,
    pub rhs: f64,
    /// The `t` at which `lhs` and `rhs` were taken.
    pub at: usize,
    pub pass: bool,
    /// `T = 0`: nothing to check.
    pub vacuous: bool,
    /// Set when a required constant is missing.
    pub not_certifiable: Option<String>,
    pub flags: Vec<&'static str>,
}

impl RunRecord {
    fn unavailable(theorem: TheoremId, why: String, flags: Vec<&'static str>) -> Self {
        RunRecord {
            theorem,
            lhs: f64::NAN,
            rhs: f64::NAN,
            at: 0,
            pass: false,
            vacuous: false,
            not_certifiable: Some(why),
            flags,
        }
    }
}

fn regret_total(trace: &Trace, losses: Losses<'_>, x_star: &Vector) -> f64 {
    trace
        .steps
        .iter()
        .filter(|s| s.loss.is_some())
        .map(|s| {
            let f = losses.at(s.t);
            f.value(&s.state.x) - f.value(x_star)
        })
        .sum()
}

/// Checks the end-to-end inequality of `theorem` on `trace`.
pub fn certify_run(theorem: TheoremId, trace: &Trace, losses: Losses<'_>, ctx: &CertContext) -> RunRecord {
    let flags = ctx.flags();
    let big_t = trace.len();
    let first = match trace.first() {
        Some(s) => s,
        None => return RunRecord::unavailable(theorem, "empty trace".into(), flags),
    };
    if big_t == 0 {
        return RunRecord {
            theorem,
            lhs: 0.0,
            rhs: 0.0,
            at: 0,
            pass: true,
            vacuous: true,
            not_certifiable: None,
            flags,
        };
    }
    let x0 = &first.state.x;
    let f0 = losses.at(0).value(x0);
    let tol = ctx.tol(big_t);
    let ok = |lhs: f64, rhs: f64| lhs <= rhs + tol * (1.0 + rhs.abs());

    if theorem == TheoremId::FailedAttempt {
        let report = PotentialSpec::new(theorem.potential(), ctx)
            .and_then(|spec| certify_steps(&spec, losses, trace, tol));
        return match report {
            Ok(r) => {
                let worst = r.steps.iter().max_by(|a, b| a.delta.total_cmp(&b.delta)).copied();
                RunRecord {
                    theorem,
                    lhs: worst.map_or(0.0, |s| s.delta),
                    rhs: 0.0,
                    at: worst.map_or(0, |s| s.t),
                    pass: r.pass,
                    vacuous: false,
                    not_certifiable: None,
                    flags,
                }
            }
            Err(e) => RunRecord::unavailable(theorem, alloc::format!("{e}"), flags),
        };
    }

    if theorem.is_anytime() {
        let start = if theorem == TheoremId::NestWcond { 0 } else { 1 };
        let mut worst: Option<(f64, f64, usize, f64)> = None;
        let f = losses.at(0);
        for step in &trace.steps[start..] {
            let t = step.t;
            let lhs = f.value(step.state.output()) - ctx.f_star;
            let rhs = if theorem == TheoremId::NestAgm2Norms {
                let (Some(map), Some(beta), Some(z)) = (ctx.map, ctx.beta, step.state.z.as_ref()) else {
                    return RunRecord::unavailable(theorem, "needs a map, β and z".into(), flags);
                };
                let (Ok(d0), Ok(dt)) = (map.bregman(&ctx.x_star, x0), map.bregman(&ctx.x_star, z)) else {
                    return RunRecord::unavailable(theorem, "divergence undefined".into(), flags);
                };
                let tf = t as f64;
                4.0 * beta / map.alpha_h() * (d0 - dt) / (tf * (tf + 1.0))
            } else {
                match theorem.envelope(ctx, x0, f0, t) {
                    Some(r) => r,
                    None => return RunRecord::unavailable(theorem, "missing constants".into(), flags),
                }
            };
            let excess = (lhs - rhs) / (1.0 + rhs.abs());
            if worst.is_none_or(|w| excess > w.3) {
                worst = Some((lhs, rhs, t, excess));
            }
        }
        let (lhs, rhs, at, _) = worst.expect("at least one step");
        return RunRecord {
            theorem,
            lhs,
            rhs,
            at,
            pass: ok(lhs, rhs),
            vacuous: false,
            not_certifiable: None,
            flags,
        };
    }

    let last = trace.last().expect("non-empty");
    let lhs = if theorem.is_regret() {
        let total = regret_total(trace, losses, &ctx.x_star);
        if theorem == TheoremId::Mirror {
            total
        } else {
            total / big_t as f64
        }
    } else if theorem == TheoremId::GdScOff {
        match weighted_average(trace, big_t) {
            Ok(avg) => losses.at(0).value(&avg) - ctx.f_star,
            Err(e) => return RunRecord::unavailable(theorem, alloc::format!("{e}"), flags),
        }
    } else if theorem == TheoremId::WellCondDist {
        last.state.x.dist2_sq(&ctx.x_star)
    } else {
        losses.at(0).value(last.state.output()) - ctx.f_star
    };
    let rhs = if theorem == TheoremId::Mirror {
        let (Some(map), Some(eta)) = (ctx.map, ctx.eta) else {
            return RunRecord::unavailable(theorem, "needs a map and a constant η".into(), flags);
        };
        let Ok(d0) = map.bregman(&ctx.x_star, x0) else {
            return RunRecord::unavailable(theorem, "divergence undefined at x0".into(), flags);
        };
        let sum_sq: f64 = trace
            .steps
            .iter()
            .filter_map(|s| s.gradient.as_ref())
            .map(|g| sq(map.norm().dual_norm(g)))
            .sum();
        d0 / eta + eta * sum_sq / (2.0 * map.alpha_h())
    } else {
        match theorem.envelope(ctx, x0, f0, big_t) {
            Some(r) => r,
            None => return RunRecord::unavailable(theorem, "missing constants".into(), flags),
        }
    };
    RunRecord {
        theorem,
        lhs,
        rhs,
        at: big_t,
        pass: ok(lhs, rhs),
        vacuous: false,
        not_certifiable: None,
        flags,
    }
}

/// Step-level and end-to-end results for one theorem.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremReport {
    pub run: RunRecord,
    pub steps: Option<StepReport>,
    /// For monotone potentials: all steps passing while the end-to-end
    /// check fails would contradict the telescoping argument.
    pub consistent: bool,
}

impl TheoremReport {
    /// Both levels pass (or, for the failed attempt, the expected violation
    /// was found).
    pub fn pass(&self) -> bool {
        self.run.pass && self.steps.as_ref().is_none_or(|s| s.pass && s.telescoping_ok) && self.consistent
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CertReport {
    pub theorems: Vec<TheoremReport>,
}

impl CertReport {
    /// Aggregate verdict over every theorem except the failed attempt.
    pub fn pass(&self) -> bool {
        self.theorems
            .iter()
            .filter(|r| r.run.theorem != TheoremId::FailedAttempt)
            .all(TheoremReport::pass)
    }

    pub fn get(&self, theorem: TheoremId) -> Option<&TheoremReport> {
        self.theorems.iter().find(|r| r.run.theorem == theorem)
    }
}

/// Runs the step-level and end-to-end checks of each theorem.
pub fn certify(theorems: &[TheoremId], trace: &Trace, losses: Losses<'_>, ctx: &CertContext) -> CertReport {
    let tol = ctx.tol(trace.len());
    let mut out = Vec::with_capacity(theorems.len());
    for &th in theorems {
        let run = certify_run(th, trace, losses, ctx);
        let steps = PotentialSpec::new(th.potential(), ctx)
            .and_then(|spec| certify_steps(&spec, losses, trace, tol))
            .ok();
        let consistent = match &steps {
            Some(s) if th.potential().is_monotone() && s.pass && !run.vacuous => run.pass,
            _ => true,
        };
        out.push(TheoremReport { run, steps, consistent });
    }
    CertReport { theorems: out }
}

/// Per-iteration gaps of several runs beside theoretical envelopes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RateTable {
    pub columns: Vec<String>,
    /// `(t, value per column)`; `None` past a run's end or where an envelope
    /// is undefined.
    pub rows: Vec<(usize, Vec<Option<f64>>)>,
}

/// Tabulates `f(output_t) − f*` for every trace and the envelope of every
/// theorem, evaluated from the first trace's starting point.
pub fn rate_comparison(
    p: &dyn Objective,
    ctx: &CertContext,
    traces: &[(&str, &Trace)],
    theorems: &[TheoremId],
) -> RateTable {
    let Some(x0) = traces.first().and_then(|(_, t)| t.first()).map(|s| s.state.x.clone()) else {
        return RateTable::default();
    };
    let f0 = p.value(&x0);
    let mut columns: Vec<String> = traces.iter().map(|(name, _)| String::from(*name)).collect();
    columns.extend(theorems.iter().map(|t| String::from(t.id())));
    let horizon = traces.iter().map(|(_, t)| t.len()).max().unwrap_or(0);
    let rows = (0..=horizon)
        .map(|t| {
            let mut row: Vec<Option<f64>> = traces
                .iter()
                .map(|(_, tr)| tr.steps.get(t).map(|s| p.value(s.state.output()) - ctx.f_star))
                .collect();
            row.extend(theorems.iter().map(|th| th.envelope(ctx, &x0, f0, t)));
            (t, row)
        })
        .collect();
    RateTable { columns, rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::accel::{run_accelerated, AccelSchedule};
    use crate::descent::{run_online_gd, StepSchedule};
    use crate::problem::{make_diag_quadratic, DiagQuadratic, FixedLoss};
    use crate::smooth::{run_smooth_gd, run_well_conditioned};
    use crate::vector;

    fn p1() -> DiagQuadratic {
        make_diag_quadratic(vector![1], vector![0]).unwrap()
    }

    fn p2() -> DiagQuadratic {
        make_diag_quadratic(vector![1, 4], vector![0, 0]).unwrap()
    }

    fn ctx_with(x_star: Vector, f: impl FnOnce(&mut CertContext)) -> CertContext {
        let mut c = CertContext::new(x_star, 0.0);
        f(&mut c);
        c
    }

    #[test]
    fn potential_examples() {
        let p = p1();
        let ctx = ctx_with(vector![0], |c| {
            c.eta = Some(0.1);
            c.g = Some(Estimate::exact(1.0));
            c.beta = Some(1.0);
        });
        let basic = PotentialSpec::new(PotentialKind::BasicGd, &ctx).unwrap();
        assert!((potential(&basic, &State::single(vector![1]), 0, &p).unwrap() - 5.0).abs() < 1e-12);
        let agm = PotentialSpec::new(PotentialKind::Agm2, &ctx).unwrap();
        let s0 = State::coupled(vector![1], vector![1], vector![1]);
        assert_eq!(potential(&agm, &s0, 0, &p).unwrap(), 2.0);
        let opt = State::coupled(vector![0], vector![0], vector![0]);
        assert_eq!(potential(&agm, &opt, 7, &p).unwrap(), 0.0);
    }

    #[test]
    fn missing_constants_are_rejected() {
        let ctx = CertContext::new(vector![0], 0.0);
        assert!(PotentialSpec::new(PotentialKind::BasicGd, &ctx).is_err());
        assert!(PotentialSpec::new(PotentialKind::Agm2, &ctx).is_err());
    }

    #[test]
    fn basic_step_hand_chain() {
        let p = p1();
        let adv = FixedLoss::new(p.clone());
        let trace = run_online_gd(&adv, &FeasibleSet::unconstrained(1), &vector![1], StepSchedule::Constant(0.1), 1).unwrap();
        let ctx = ctx_with(vector![0], |c| {
            c.eta = Some(0.1);
            c.g = Some(Estimate::exact(1.0));
        });
        let spec = PotentialSpec::new(PotentialKind::BasicGd, &ctx).unwrap();
        let rec = certify_step(&spec, Losses::Fixed(&p), &trace.steps[0], &trace.steps[1], DEFAULT_TOL).unwrap();
        assert!((rec.amortized + 0.45).abs() < 1e-12);
        assert!((rec.allowed - 0.05).abs() < 1e-15);
        assert!(rec.within_bound);
    }

    #[test]
    fn take_two_envelope_example() {
        let ctx = ctx_with(vector![0, 0], |c| {
            c.beta = Some(4.0);
            c.d = Some(Estimate::exact(libm::sqrt(5.0)));
        });
        let rhs = TheoremId::Smooth2.envelope(&ctx, &vector![1, 1], 2.5, 100).unwrap();
        assert!((rhs - 40.0 / 101.0).abs() < 1e-12);
    }

    #[test]
    fn nest_agm2_envelope_example() {
        let ctx = ctx_with(vector![0], |c| c.beta = Some(1.0));
        let rhs = TheoremId::NestAgm2.envelope(&ctx, &vector![1], 0.5, 10).unwrap();
        assert!((rhs - 2.0 / 110.0).abs() < 1e-15);
    }

    #[test]
    fn take_three_is_monotone_on_p2() {
        let p = p2();
        let set = FeasibleSet::unconstrained(2);
        let trace = run_smooth_gd(&p, &set, &vector![1, 1], 4.0, 100).unwrap();
        let ctx = CertContext::offline(&p, &set, &trace, None).unwrap();
        let report = certify(&[TheoremId::Smooth3], &trace, Losses::Fixed(&p), &ctx);
        assert!(report.pass());
        assert!(report.theorems[0].steps.as_ref().unwrap().telescoping_ok);
    }

    #[test]
    fn agm2_certifies_on_p2() {
        let p = p2();
        let set = FeasibleSet::unconstrained(2);
        let trace = run_accelerated(&p, &set, &vector![1, 1], AccelSchedule::PaperSmooth, 200).unwrap();
        let ctx = CertContext::offline(&p, &set, &trace, None).unwrap();
        assert!(certify(&[TheoremId::NestAgm2], &trace, Losses::Fixed(&p), &ctx).pass());
    }

    #[test]
    fn well_conditioned_long_run_stays_finite() {
        let p = make_diag_quadratic(vector![1, 100], vector![0, 0]).unwrap();
        let run = run_well_conditioned(&p, &vector![1, 1], 20_000).unwrap();
        let set = FeasibleSet::unconstrained(2);
        let ctx = CertContext::offline(&p, &set, &run.trace, None).unwrap();
        let report = certify(&[TheoremId::WellCond], &run.trace, Losses::Fixed(&p), &ctx);
        assert!(report.theorems[0].steps.as_ref().unwrap().pass);
    }

    #[test]
    fn zero_step_trace_is_vacuous() {
        let p = p1();
        let mut trace = Trace::new();
        trace.push_state(State::single(vector![1]));
        let ctx = ctx_with(vector![0], |c| c.beta = Some(1.0));
        let rec = certify_run(TheoremId::Smooth3, &trace, Losses::Fixed(&p), &ctx);
        assert!(rec.vacuous && rec.pass);
    }

    #[test]
    fn trajectory_estimates_are_flagged() {
        let ctx = ctx_with(vector![0], |c| {
            c.d = Some(Estimate::from_trajectory(1.0));
            c.g = Some(Estimate::exact(1.0));
            c.coupling = 1.0;
        });
        let flags = ctx.flags();
        assert!(flags.contains(&FLAG_ESTIMATED_D) && flags.contains(&FLAG_ALT_ETA));
        assert!(!flags.contains(&FLAG_ESTIMATED_G));
    }

    #[test]
    fn rate_table_shapes() {
        let p = p2();
        let set = FeasibleSet::unconstrained(2);
        let trace = run_smooth_gd(&p, &set, &vector![1, 1], 4.0, 5).unwrap();
        let ctx = CertContext::offline(&p, &set, &trace, None).unwrap();
        assert_eq!(rate_comparison(&p, &ctx, &[], &[TheoremId::Smooth3]), RateTable::default());
        let table = rate_comparison(&p, &ctx, &[("gd", &trace)], &[]);
        assert_eq!(table.columns.len(), 1);
        assert_eq!(table.rows.len(), 6);
    }

    #[test]
    fn theorem_ids_round_trip() {
        for t in TheoremId::ALL {
            assert_eq!(TheoremId::from_id(t.id()), Some(t));
        }
    }
}
