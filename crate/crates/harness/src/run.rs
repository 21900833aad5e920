//! Executes a resolved plan and assembles its trace document.

use certgd::accel::{restart_accelerated, run_accelerated, run_agm1, run_general_norm_agm, run_sc_agm, AccelSchedule};
use certgd::certify::{certify, CertContext, CertReport, Estimate, Losses, TheoremReport};
use certgd::descent::{run_online_gd, run_strongly_convex_gd, StepSchedule};
use certgd::mirror::{run_mirror_descent, MirrorMap};
use certgd::smooth::{run_frank_wolfe, run_smooth_gd, run_well_conditioned_over, FwSchedule};
use certgd::{FeasibleSet, NormKind, OnlineAdversary, Trace, Vector};

use crate::config::{resolve, Plan, RunConfig};
use crate::emit::{finite, CertificateDoc, ConstantsDoc, Meta, PotentialDoc, RestartDoc, StepDoc, TraceDoc};
use crate::registry::MethodId;
use crate::Result;

/// Target gap of a restarted run.
pub const RESTART_EPSILON: f64 = 1e-9;

/// A finished run: its document and, when certifying, the raw report.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub doc: TraceDoc,
    pub report: Option<CertReport>,
}

impl Outcome {
    /// True unless some certificate failed.
    pub fn pass(&self) -> bool {
        self.doc.meta.pass.unwrap_or(true)
    }
}

pub fn run_experiment(config: &RunConfig) -> Result<Outcome> {
    run_plan(&resolve(config)?)
}

fn unsupported(what: &str) -> certgd::Error {
    certgd::Error::Unsupported(what.into())
}

/// `D` and `G` for the tuned online schedules: the set diameter and the
/// declared gradient bound when known, else `‖x₀ − x*‖` and `‖∇f₀(x₀)‖`.
fn online_pilot(adv: &dyn OnlineAdversary, set: &FeasibleSet, x0: &Vector, steps: usize) -> Result<(Estimate, Estimate)> {
    let d = match set.diameter() {
        Some(d) => Estimate::exact(d),
        None => {
            let x_star = adv.best_fixed(set, steps).ok_or_else(|| unsupported("no comparator for this problem and set"))?;
            Estimate::from_trajectory(x0.dist2(&x_star))
        }
    };
    let g = match adv.gradient_bound(NormKind::Euclidean) {
        Some(g) => Estimate::exact(g),
        None => Estimate::from_trajectory(adv.loss(0).gradient(x0).norm2()),
    };
    Ok((d, g))
}

/// `η = √(2B/(G²T))` with `B = D_h(x*‖x₀)` and `G` the dual gradient bound,
/// which balances the two terms of the mirror bound; `1/√T` when either
/// vanishes.
fn mirror_eta(adv: &dyn OnlineAdversary, map: MirrorMap, set: &FeasibleSet, x0: &Vector, steps: usize) -> Result<f64> {
    let x_star = adv.best_fixed(set, steps).ok_or_else(|| unsupported("no comparator for this problem and set"))?;
    let b = map.bregman(&x_star, x0)?;
    let dual = map.norm().dual();
    let g = adv
        .gradient_bound(dual)
        .unwrap_or_else(|| dual.norm(&adv.loss(0).gradient(x0)));
    let t = steps as f64;
    Ok(if b > 0.0 && g > 0.0 {
        (2.0 * b / (g * g * t)).sqrt()
    } else {
        1.0 / t.sqrt()
    })
}

fn truncate(mut trace: Trace, steps: usize) -> Trace {
    if trace.len() > steps {
        trace.steps.truncate(steps + 1);
        let last = trace.steps.last_mut().expect("non-empty");
        last.loss = None;
        last.gradient = None;
        last.step_size = None;
    }
    trace
}

pub fn run_plan(plan: &Plan) -> Result<Outcome> {
    let inst = plan.problem.build();
    let adv = inst.adversary.as_ref();
    let obj = inst.objective.as_deref();
    let fixed = || obj.ok_or_else(|| unsupported("method needs a fixed objective"));
    let beta = || fixed().and_then(|p| p.constants().beta.ok_or_else(|| unsupported("problem declares no β")));
    let (set, x0, steps, schedule) = (&plan.set, &plan.x0, plan.config.steps, plan.schedule);

    let mut pilot = None;
    let mut restart = None;
    let trace = match plan.method {
        MethodId::OnlineGd => {
            let (d, g) = online_pilot(adv, set, x0, steps)?;
            pilot = Some((d, g));
            let sched = match schedule {
                "horizon-tuned" => StepSchedule::HorizonTuned {
                    d: d.value,
                    g: g.value,
                    horizon: steps,
                },
                _ => StepSchedule::AnytimeTuned { d: d.value, g: g.value },
            };
            run_online_gd(adv, set, x0, sched, steps)?
        }
        MethodId::ScGd => {
            let alpha = adv.strong_convexity().ok_or_else(|| unsupported("losses are not strongly convex"))?;
            run_strongly_convex_gd(adv, set, x0, alpha, steps)?
        }
        MethodId::SmoothGd => run_smooth_gd(fixed()?, set, x0, beta()?, steps)?,
        MethodId::FrankWolfe => {
            let sched = if schedule == "harmonic" { FwSchedule::Harmonic } else { FwSchedule::Doubled };
            run_frank_wolfe(fixed()?, set, x0, sched, steps)?
        }
        MethodId::WellConditioned => run_well_conditioned_over(fixed()?, set, x0, steps)?.trace,
        MethodId::MirrorEuclidean | MethodId::MirrorNegEntropy => {
            let map = plan.map().expect("mirror methods carry a map");
            let eta = mirror_eta(adv, map, set, x0, steps)?;
            run_mirror_descent(adv, map, set, x0, eta, steps)?
        }
        MethodId::Agm2 => {
            let sched = if schedule == "lambda-coupled" {
                AccelSchedule::LambdaCoupled
            } else {
                AccelSchedule::PaperSmooth
            };
            run_accelerated(fixed()?, set, x0, sched, steps)?
        }
        MethodId::Agm1 => run_agm1(fixed()?, x0, steps)?,
        MethodId::AgmConstrained => {
            let full = schedule == "constrained-full";
            run_accelerated(fixed()?, set, x0, AccelSchedule::ConstrainedSmooth { full }, steps)?
        }
        MethodId::AgmGeneralNorm => {
            let map = plan.map().expect("general-norm schedules name a map");
            run_general_norm_agm(map, set, fixed()?, x0, steps)?
        }
        MethodId::ScAgm => run_sc_agm(fixed()?, x0, steps)?,
        MethodId::RestartAgm => {
            let run = restart_accelerated(fixed()?, x0, RESTART_EPSILON)?;
            restart = Some(RestartDoc {
                epsilon: RESTART_EPSILON,
                epoch_length: run.epoch_length,
                epochs: run.epochs.len(),
                steps_to_target: run.steps_to_target,
            });
            truncate(run.trace, steps)
        }
    };

    let ctx = if plan.method.is_online() {
        CertContext::online(adv, set, &trace, plan.map())
    } else {
        CertContext::offline(fixed()?, set, &trace, plan.map())
    }
    .map(|mut ctx| {
        if let Some((d, g)) = pilot {
            ctx.d = Some(d);
            ctx.g = Some(g);
        }
        if plan.schedule == "constrained-full" {
            ctx.coupling = 1.0;
        }
        ctx
    });

    let losses = match obj {
        Some(p) if !plan.method.is_online() => Losses::Fixed(p),
        _ => Losses::Online(adv),
    };
    let certifying = plan.config.certify;
    let report = match (&ctx, certifying) {
        (Ok(ctx), true) => Some(certify(&plan.theorems, &trace, losses, ctx)),
        _ => None,
    };
    let certificates: Vec<CertificateDoc> = match (&report, &ctx) {
        (Some(r), _) => r.theorems.iter().map(certificate_doc).collect(),
        (None, Err(e)) if certifying => plan
            .theorems
            .iter()
            .map(|t| not_certifiable(t.id(), &e.to_string()))
            .collect(),
        _ => Vec::new(),
    };
    let pass = certifying.then(|| report.as_ref().is_some_and(CertReport::pass));

    let ctx = ctx.ok();
    let f_star = ctx.as_ref().map(|c| c.f_star).filter(|_| obj.is_some());
    let dual = plan.map().map_or(NormKind::Euclidean, |m| m.norm().dual());
    let mut docs: Vec<StepDoc> = trace
        .steps
        .iter()
        .map(|s| {
            let f = match obj {
                Some(p) => finite(p.value(s.state.output())),
                None => s.loss.and_then(finite),
            };
            StepDoc {
                t: s.t,
                x: s.state.x.as_slice().to_vec(),
                y: s.state.y.as_ref().map(|v| v.as_slice().to_vec()),
                z: s.state.z.as_ref().map(|v| v.as_slice().to_vec()),
                f,
                gap: f.zip(f_star).map(|(f, fs)| f - fs),
                grad_norm: s.gradient.as_ref().map(Vector::norm2),
                dual_grad_norm: s.gradient.as_ref().map(|g| dual.norm(g)),
                step_size: s.step_size,
                potentials: Vec::new(),
            }
        })
        .collect();
    if let Some(r) = &report {
        for th in &r.theorems {
            let Some(sr) = &th.steps else { continue };
            let id = th.run.theorem.id();
            for (t, doc) in docs.iter_mut().enumerate() {
                let (phi, ok) = match sr.steps.get(t) {
                    Some(rec) => (rec.phi, Some(rec.within_bound)),
                    None => (sr.steps.last().map_or(f64::NAN, |rec| rec.phi_next), None),
                };
                doc.potentials.push(PotentialDoc {
                    theorem: id.into(),
                    phi: finite(phi),
                    ok,
                });
            }
        }
    }

    let constants = ctx.as_ref().map_or_else(ConstantsDoc::default, |c| ConstantsDoc {
        x_star: Some(c.x_star.as_slice().to_vec()),
        f_star: f_star.and_then(finite),
        alpha: c.alpha,
        beta: c.beta,
        eta: c.eta,
        d: c.d.map(|d| d.value),
        d_estimated: c.d.is_some_and(|d| d.estimated),
        g: c.g.map(|g| g.value),
        g_estimated: c.g.is_some_and(|g| g.estimated),
        coupling: is_accelerated(plan.method).then_some(c.coupling),
    });

    let doc = TraceDoc {
        meta: Meta {
            config: plan.config.clone(),
            dim: plan.problem.dim(),
            x0: x0.as_slice().to_vec(),
            steps_taken: trace.len(),
            constants,
            certificates,
            pass,
            restart,
        },
        steps: docs,
    };
    Ok(Outcome { doc, report })
}

fn is_accelerated(method: MethodId) -> bool {
    matches!(
        method,
        MethodId::Agm2 | MethodId::Agm1 | MethodId::AgmConstrained | MethodId::AgmGeneralNorm
    )
}

fn certificate_doc(r: &TheoremReport) -> CertificateDoc {
    let mut flags: Vec<String> = r.run.flags.iter().map(|f| f.to_string()).collect();
    if let Some(s) = &r.steps {
        for f in &s.flags {
            if !flags.iter().any(|g| g == f) {
                flags.push(f.to_string());
            }
        }
    }
    CertificateDoc {
        theorem: r.run.theorem.id().into(),
        lhs: finite(r.run.lhs),
        rhs: finite(r.run.rhs),
        at: r.run.at,
        run_pass: r.run.pass,
        vacuous: r.run.vacuous,
        not_certifiable: r.run.not_certifiable.clone(),
        step_violations: r.steps.as_ref().map(|s| s.violations),
        steps_pass: r.steps.as_ref().map(|s| s.pass),
        telescoping_residual: r.steps.as_ref().and_then(|s| s.telescoping_residual),
        telescoping_ok: r.steps.as_ref().map(|s| s.telescoping_ok),
        consistent: r.consistent,
        pass: r.pass(),
        flags,
    }
}

fn not_certifiable(theorem: &str, why: &str) -> CertificateDoc {
    CertificateDoc {
        theorem: theorem.into(),
        lhs: None,
        rhs: None,
        at: 0,
        run_pass: false,
        vacuous: false,
        not_certifiable: Some(why.into()),
        step_violations: None,
        steps_pass: None,
        telescoping_residual: None,
        telescoping_ok: None,
        consistent: true,
        pass: false,
        flags: Vec::new(),
    }
}
