use cubelab_core::asymptotics::{cdsecond_value, decomposition_gap};
use cubelab_core::checks::*;
use cubelab_core::cube::{gradient, semigroup, sup_ell2_norm, CubeFunction};
use cubelab_core::dualnorm::{brute_force_norm, dual_sweep, MultistartConfig};
use cubelab_core::kernel::{apply_kernel, kernel_table, objective};
use cubelab_core::khintchine::{cumulant_moments, exact_mean_abs, BiasedDist};
use cubelab_core::SphereVector;

use std::f64::consts::FRAC_PI_2;

#[test]
fn kernel_tail_identities_are_exact() {
    for n in 1..=20 {
        assert!(kernel_identities_hold(n).unwrap(), "n = {n}");
    }
}

#[test]
fn gram_slices_are_exact() {
    assert!(gram_identities_hold(10).unwrap());
}

#[test]
fn decomposition_gap_within_bound() {
    for n in 1..=12 {
        assert!(decomposition_ratio(n, 6, 100 + n as u64).unwrap() <= 1.0, "n = {n}");
    }
}

#[test]
fn cdsecond_tracks_objective() {
    let mut gaps = Vec::new();
    for n in 4..=14 {
        let l = SphereVector::uniform(n).unwrap();
        let obj = objective(&kernel_table(n).unwrap(), &l).unwrap();
        let v = cdsecond_value(&l).unwrap();
        assert!(v.is_finite() && v > 0.0);
        gaps.push((v - obj).abs());
    }
    assert!(gaps.last().unwrap() < gaps.first().unwrap());
    assert!(decomposition_gap(&SphereVector::uniform(14).unwrap()).unwrap() <= 2.0 / 15f64.sqrt());
}

fn outcome_value(d: &BiasedDist, mask: usize, i: usize) -> f64 {
    if mask >> i & 1 == 1 {
        d.v_minus()
    } else {
        d.v_plus()
    }
}

fn enumerate<F: FnMut(f64, f64)>(d: &BiasedDist, l: &SphereVector, mut visit: F) {
    let n = l.dim();
    for mask in 0..1usize << n {
        let k = mask.count_ones() as i32;
        let w = d.p().powi(n as i32 - k) * (1.0 - d.p()).powi(k);
        let ell: f64 = (0..n).map(|i| l.coords()[i] * outcome_value(d, mask, i)).sum();
        visit(w, ell);
    }
}

#[test]
fn cumulant_moments_match_enumeration() {
    let mut rng = seeded(7);
    let d = BiasedDist::new(0.75).unwrap();
    for _ in 0..5 {
        let l = SphereVector::random(6, &mut rng);
        let r = cumulant_moments(&d, &l);
        let mut m = [0.0; 4];
        enumerate(&d, &l, |w, ell| {
            for (j, mj) in m.iter_mut().enumerate() {
                *mj += w * ell.powi(2 * (j as i32 + 1));
            }
        });
        for j in 0..4 {
            assert!((r.moments[j] - m[j]).abs() < 1e-12 * m[j].max(1.0), "order {}", 2 * (j + 1));
        }
    }
}

#[test]
fn paley_zygmund_holds_on_enumeration() {
    let mut rng = seeded(11);
    for (n, p) in [(4, 0.6), (7, 0.75), (10, 0.9), (10, 0.5)] {
        let d = BiasedDist::new(p).unwrap();
        let l = SphereVector::random(n, &mut rng);
        let r = cumulant_moments(&d, &l);
        let Some(b) = r.ratio_b else { continue };
        let threshold = 0.5 * r.ex2.sqrt();
        let mut mass = 0.0;
        enumerate(&d, &l, |w, ell| {
            if (ell * ell - 1.0).abs() >= threshold {
                mass += w;
            }
        });
        assert!(mass >= 0.5625 / b - 1e-12, "n = {n}, p = {p}");
    }
}

#[test]
fn biased_law_is_the_heat_flow_marginal() {
    // ⟨λ, ∇P_t g⟩ at the all-ones vertex equals e^{-t}/√(1-e^{-2t}) E[g ℓ];
    // with g = sign(ℓ) this is the Khintchine mean.
    let mut rng = seeded(3);
    for (n, t) in [(3, 0.4), (5, 1.0), (6, 2.5)] {
        let d = BiasedDist::from_time(t).unwrap();
        let l = SphereVector::random(n, &mut rng);
        let g = CubeFunction::from_fn(n, |mask| {
            let ell: f64 = (0..n).map(|i| l.coords()[i] * outcome_value(&d, mask, i)).sum();
            if ell >= 0.0 {
                1.0
            } else {
                -1.0
            }
        })
        .unwrap();
        let grad = gradient(&semigroup(&g, t).unwrap());
        let at_ones: f64 = (0..n).map(|i| l.coords()[i] * grad.component(i).value(0)).sum();
        let rho = (-t).exp();
        let expected = rho / (1.0 - rho * rho).sqrt() * exact_mean_abs(&d, &l).unwrap();
        assert!((at_ones - expected).abs() < 1e-12, "n = {n}, t = {t}");
        assert!(sup_ell2_norm(&grad) >= expected - 1e-12);
    }
}

#[test]
fn brute_force_maximizer_attains_norm_through_kernel() {
    for n in 1..=4 {
        let bf = brute_force_norm(n).unwrap();
        let field = apply_kernel(&kernel_table(n).unwrap(), &bf.maximizer).unwrap();
        assert!((sup_ell2_norm(&field) - bf.value).abs() < 1e-12, "n = {n}");
    }
}

#[test]
fn n2_maximizer_is_min_up_to_symmetry() {
    let bf = brute_force_norm(2).unwrap();
    let u = bf.maximizer.values().to_vec();
    // min(x₁,x₂) up to a global sign and a translation of the cube: exactly
    // one vertex disagrees with the other three.
    let plus = u.iter().filter(|&&v| v > 0.0).count();
    assert!(plus == 1 || plus == 3);
    assert!((bf.value - 3.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
}

#[test]
fn figure_rows_are_monotone_and_sandwiched() {
    let rows = dual_sweep(1, 8, &MultistartConfig::default()).unwrap();
    assert!((rows[0].value - 1.0).abs() < 1e-15);
    for w in rows.windows(2) {
        assert!(w[0].value <= w[1].value + 1e-9);
    }
    for r in &rows {
        assert!(r.value >= 1.0 - 1e-12 && r.value < FRAC_PI_2);
        assert_eq!(r.certified, r.n <= 4);
    }
}
