//! Run configuration and its resolution against the registry.

use std::collections::BTreeSet;
use std::path::PathBuf;

use certgd::certify::TheoremId;
use certgd::mirror::MirrorMap;
use certgd::{FeasibleSet, Vector};
use serde::{Deserialize, Serialize};

use crate::registry::{compatible_theorems, MethodId, ProblemId, SetId, SetRule};
use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// The starting point: `"default"` or explicit coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StartPoint {
    Point(Vec<f64>),
    Named(String),
}

impl Default for StartPoint {
    fn default() -> Self {
        StartPoint::Named("default".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: String,
    pub method: String,
    #[serde(default)]
    pub schedule: Option<String>,
    #[serde(default)]
    pub set: Option<String>,
    pub steps: usize,
    #[serde(default)]
    pub x0: StartPoint,
    #[serde(default)]
    pub certify: bool,
    #[serde(default)]
    pub theorems: Vec<String>,
    pub out: PathBuf,
    #[serde(default)]
    pub format: Format,
    /// Echoed into the trace; every registered run is deterministic.
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn new(problem: &str, method: &str, steps: usize, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            problem: problem.into(),
            method: method.into(),
            schedule: None,
            set: None,
            steps,
            x0: StartPoint::default(),
            certify: false,
            theorems: Vec::new(),
            out: out.into(),
            format: Format::Json,
            seed: 0,
        }
    }
}

/// A validated configuration with every id resolved.
#[derive(Debug, Clone)]
pub struct Plan {
    /// The config with defaults filled in, as echoed into the trace.
    pub config: RunConfig,
    pub problem: ProblemId,
    pub method: MethodId,
    pub schedule: &'static str,
    pub set_id: SetId,
    pub set: FeasibleSet,
    pub x0: Vector,
    /// Empty unless certifying.
    pub theorems: Vec<TheoremId>,
}

impl Plan {
    /// The mirror map a method runs with, if any.
    pub fn map(&self) -> Option<MirrorMap> {
        map_of(self.method, self.schedule)
    }
}

fn map_of(method: MethodId, schedule: &str) -> Option<MirrorMap> {
    match (method, schedule) {
        (MethodId::MirrorEuclidean, _) | (MethodId::AgmGeneralNorm, "euclidean") => Some(MirrorMap::Euclidean),
        (MethodId::MirrorNegEntropy, _) | (MethodId::AgmGeneralNorm, "negentropy") => Some(MirrorMap::NegEntropy),
        _ => None,
    }
}

fn default_set(problem: ProblemId, method: MethodId, schedule: &str) -> SetId {
    match method.set_rule(schedule) {
        SetRule::Simplex => SetId::Simplex,
        SetRule::Bounded => SetId::Ball,
        _ if problem.is_online() => SetId::Simplex,
        _ => SetId::Unconstrained,
    }
}

fn names<T: Copy>(all: &[T], id: impl Fn(T) -> &'static str) -> String {
    all.iter().map(|&x| id(x)).collect::<Vec<_>>().join(", ")
}

/// Checks every id, pairing and constant requirement before anything runs.
pub fn resolve(config: &RunConfig) -> Result<Plan> {
    let problem = ProblemId::from_id(&config.problem).ok_or_else(|| {
        HarnessError::config("problem", format!("unknown id `{}`; known: {}", config.problem, names(&ProblemId::ALL, ProblemId::id)))
    })?;
    let method = MethodId::from_id(&config.method).ok_or_else(|| {
        HarnessError::config("method", format!("unknown id `{}`; known: {}", config.method, names(&MethodId::ALL, MethodId::id)))
    })?;
    let schedule = match &config.schedule {
        None => method.schedules()[0],
        Some(s) => method.schedules().iter().copied().find(|k| k == s).ok_or_else(|| {
            HarnessError::config(
                "schedule",
                format!("`{s}` is not a schedule of {}; known: {}", method.id(), method.schedules().join(", ")),
            )
        })?,
    };
    let set_id = match &config.set {
        None => default_set(problem, method, schedule),
        Some(s) => SetId::from_id(s).ok_or_else(|| {
            HarnessError::config("set", format!("unknown id `{s}`; known: {}", names(&SetId::ALL, SetId::id)))
        })?,
    };
    if config.steps < 1 {
        return Err(HarnessError::config("steps", "at least one step is required"));
    }

    let dim = problem.dim();
    let set = set_id.build(dim);
    match method.set_rule(schedule) {
        SetRule::Unconstrained if set.is_bounded() => {
            return Err(HarnessError::config("set", format!("{} runs unconstrained only", method.id())))
        }
        SetRule::Bounded if !set.is_bounded() => {
            return Err(HarnessError::config("set", format!("{} needs a bounded set", method.id())))
        }
        SetRule::Simplex if set_id != SetId::Simplex => {
            return Err(HarnessError::config("set", format!("{} {schedule} needs the simplex", method.id())))
        }
        _ => {}
    }
    if problem.is_online() && !method.is_online() {
        return Err(HarnessError::config(
            "method",
            format!("{} has no fixed objective; use an online method", problem.id()),
        ));
    }
    if problem.is_online() && !set.is_bounded() {
        return Err(HarnessError::config("set", format!("{} plays linear losses and needs a bounded set", problem.id())));
    }

    let instance = problem.build();
    if let Some(p) = &instance.objective {
        let c = p.constants();
        if method.needs_alpha() && c.alpha.is_none() {
            return Err(HarnessError::config("problem", format!("{} needs a strongly convex problem", method.id())));
        }
        if method.needs_beta() && c.beta.is_none() {
            return Err(HarnessError::config("problem", format!("{} needs a smooth problem", method.id())));
        }
    }
    if method == MethodId::ScGd && instance.adversary.strong_convexity().is_none() {
        return Err(HarnessError::config("problem", "sc-gd needs strongly convex losses"));
    }

    let x0 = match &config.x0 {
        StartPoint::Named(s) if s == "default" => set.default_start(),
        StartPoint::Named(s) => return Err(HarnessError::config("x0", format!("expected \"default\" or a list of numbers, got `{s}`"))),
        StartPoint::Point(v) => {
            if v.len() != dim {
                return Err(HarnessError::config("x0", format!("{} has dimension {dim}, got {} coordinates", problem.id(), v.len())));
            }
            Vector::new(v.clone()).map_err(|e| HarnessError::config("x0", e.to_string()))?
        }
    };
    set.require_member(&x0, "x0").map_err(|e| HarnessError::config("x0", e.to_string()))?;

    if let Some(map) = map_of(method, schedule) {
        if !map.is_interior(&x0) {
            return Err(HarnessError::config("x0", format!("must lie in the interior of the {} domain", map.id())));
        }
        if method == MethodId::AgmGeneralNorm {
            let p = instance.objective.as_ref().expect("offline method on a fixed problem");
            if p.smoothness_wrt(map.norm()).is_none() {
                return Err(HarnessError::config(
                    "problem",
                    format!("{} declares no smoothness in the {} norm", problem.id(), map.norm().id()),
                ));
            }
        }
    }

    let compatible = compatible_theorems(method, schedule);
    let theorems = if !config.certify {
        if !config.theorems.is_empty() {
            return Err(HarnessError::config("theorems", "theorems given without certify"));
        }
        Vec::new()
    } else if config.theorems.is_empty() {
        compatible
    } else {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for id in &config.theorems {
            let th = TheoremId::from_id(id).ok_or_else(|| {
                HarnessError::config("theorems", format!("unknown id `{id}`; known: {}", names(&TheoremId::ALL, TheoremId::id)))
            })?;
            if !compatible.contains(&th) {
                return Err(HarnessError::config(
                    "theorems",
                    format!("{id} does not apply to {} with schedule {schedule}", method.id()),
                ));
            }
            if seen.insert(th.id()) {
                out.push(th);
            }
        }
        out
    };

    let mut config = config.clone();
    config.schedule = Some(schedule.into());
    config.set = Some(set_id.id().into());
    config.theorems = theorems.iter().map(|t| t.id().to_string()).collect();
    Ok(Plan {
        config,
        problem,
        method,
        schedule,
        set_id,
        set,
        x0,
        theorems,
    })
}

/// Rejects suites whose runs would write the same file.
pub fn check_suite(configs: &[RunConfig]) -> Result<Vec<Plan>> {
    let mut outs = BTreeSet::new();
    let mut plans = Vec::with_capacity(configs.len());
    for (i, c) in configs.iter().enumerate() {
        if !outs.insert(c.out.clone()) {
            return Err(HarnessError::config(format!("[{i}].out"), format!("{} is written by an earlier run", c.out.display())));
        }
        plans.push(resolve(c).map_err(|e| match e {
            HarnessError::Config { key, message } => HarnessError::config(format!("[{i}].{key}"), message),
            other => other,
        })?);
    }
    Ok(plans)
}
