use certgd::accel::lambda_schedule;
use certgd::mirror::{generalized_pythagorean_gap, MirrorMap};
use certgd::problem::{gradient_check, make_diag_quadratic, TiltedLogSumExp};
use certgd::set::pythagorean_gap;
use certgd::smooth::{claim_proj_magic_gap, descent_lemma_gap};
use certgd::{vector, FeasibleSet, NormKind, Objective, Vector};
use proptest::prelude::*;

fn vec3(range: f64) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-range..range, 3).prop_map(|v| Vector::new(v).unwrap())
}

fn simplex_interior() -> impl Strategy<Value = Vector> {
    prop::collection::vec(0.01f64..1.0, 3).prop_map(|v| {
        let s: f64 = v.iter().sum();
        Vector::new(v.into_iter().map(|x| x / s).collect()).unwrap()
    })
}

fn sets() -> Vec<FeasibleSet> {
    vec![
        FeasibleSet::unit_ball(3),
        FeasibleSet::ball(Vector::ones(3), 0.7).unwrap(),
        FeasibleSet::cube(Vector::filled(3, -1.0), Vector::filled(3, 0.5)).unwrap(),
        FeasibleSet::simplex(3).unwrap(),
        FeasibleSet::unconstrained(3),
    ]
}

proptest! {
    #[test]
    fn projection_is_idempotent_and_feasible(x in vec3(5.0)) {
        for set in sets() {
            let p = set.project(&x);
            prop_assert!(set.contains(&p));
            prop_assert!(set.project(&p).max_abs_diff(&p) <= 1e-12);
        }
    }

    #[test]
    fn pythagorean_gap_is_non_positive(x in vec3(5.0), a in vec3(5.0)) {
        for set in sets() {
            let a = set.project(&a);
            prop_assert!(pythagorean_gap(&set, &a, &x) <= 1e-12);
        }
    }

    #[test]
    fn generalized_pythagorean_holds(a in simplex_interior(), b in prop::collection::vec(0.01f64..2.0, 3)) {
        let b = Vector::new(b).unwrap();
        let (inner, three) = generalized_pythagorean_gap(MirrorMap::NegEntropy, &FeasibleSet::simplex(3).unwrap(), &a, &b).unwrap();
        prop_assert!(inner <= 1e-10 && three >= -1e-10);
    }

    #[test]
    fn norm_axioms(x in vec3(10.0), y in vec3(10.0), c in -5.0f64..5.0) {
        for n in NormKind::ALL {
            prop_assert!(n.norm(&(&x + &y)) <= n.norm(&x) + n.norm(&y) + 1e-12);
            prop_assert!((n.norm(&x.scale(c)) - c.abs() * n.norm(&x)).abs() <= 1e-12 * (1.0 + n.norm(&x)));
            // Hölder: ⟨x, y⟩ ≤ ‖x‖‖y‖_*.
            prop_assert!(x.dot(&y) <= n.norm(&x) * n.dual_norm(&y) + 1e-9);
        }
    }

    #[test]
    fn quadratic_curvature_bounds(x in vec3(3.0), y in vec3(3.0)) {
        let p = make_diag_quadratic(vector![1.0, 4.0, 100.0], vector![0.5, -1.0, 0.0]).unwrap();
        let lin = p.value(&x) + p.gradient(&x).dot(&(&y - &x));
        let d = y.dist2_sq(&x);
        prop_assert!(p.value(&y) >= lin + 0.5 * 1.0 * d - 1e-9);
        prop_assert!(p.value(&y) <= lin + 0.5 * 100.0 * d + 1e-9);
    }

    #[test]
    fn lse_is_convex_and_one_smooth(x in vec3(3.0), y in vec3(3.0)) {
        let p = TiltedLogSumExp::new(vector![0.5, 0.3, 0.2]).unwrap();
        let lin = p.value(&x) + p.gradient(&x).dot(&(&y - &x));
        prop_assert!(p.value(&y) >= lin - 1e-12);
        prop_assert!(p.value(&y) <= lin + 0.5 * y.dist2_sq(&x) + 1e-12);
        prop_assert!(p.value(&y) <= lin + 0.5 * (&y - &x).norm1().powi(2) + 1e-12);
    }

    #[test]
    fn descent_lemma_and_projection_claim(x in vec3(3.0)) {
        let p = make_diag_quadratic(vector![1.0, 4.0, 9.0], vector![2.0, 0.0, -1.0]).unwrap();
        prop_assert!(descent_lemma_gap(&p, &x, 9.0) <= 1e-12);
        let ball = FeasibleSet::unit_ball(3);
        let x = ball.project(&x);
        let star = p.minimizer_over(&ball).unwrap();
        prop_assert!(claim_proj_magic_gap(&ball, &p, &x, &star, 9.0) <= 1e-9);
    }

    #[test]
    fn bregman_lower_bounds(p in simplex_interior(), q in simplex_interior(), x in vec3(3.0), y in vec3(3.0)) {
        let kl = MirrorMap::NegEntropy.bregman(&p, &q).unwrap();
        prop_assert!(kl >= 0.5 * (&p - &q).norm1().powi(2) - 1e-12);
        let e = MirrorMap::Euclidean.bregman(&y, &x).unwrap();
        prop_assert!((e - 0.5 * y.dist2_sq(&x)).abs() <= 1e-12 * (1.0 + e));
    }

    #[test]
    fn mirror_round_trip(x in simplex_interior()) {
        for m in MirrorMap::ALL {
            let back = m.grad_h_star(&m.grad_h(&x).unwrap());
            prop_assert!(back.max_abs_diff(&x) <= 1e-10);
        }
    }

    #[test]
    fn gradients_match_central_differences(x in vec3(3.0)) {
        let lse = TiltedLogSumExp::new(vector![0.5, 0.3, 0.2]).unwrap();
        let q = make_diag_quadratic(vector![1.0, 4.0, 100.0], Vector::zeros(3)).unwrap();
        prop_assert!(gradient_check(&lse, &x, 1e-5).unwrap() <= 1e-6);
        prop_assert!(gradient_check(&q, &x, 1e-5).unwrap() <= 1e-6);
    }
}

#[test]
fn lambda_recurrence_identity() {
    let lam = lambda_schedule(1000);
    for t in 1..=1000 {
        let lhs = lam[t] * lam[t] - lam[t - 1] * lam[t - 1];
        assert!((lhs - lam[t]).abs() <= 1e-12 * lam[t], "t = {t}");
    }
}
