use anm_core::entropy::{admissible_beta_bound, theory_bandwidths};
use anm_core::model::geometric_points;
use anm_core::synth::{sample_x, XDist};
use anm_core::{resubstitution_entropy, tune_sigma_loo, Error, Kernel};

#[test]
fn loo_sigma_near_silverman() {
    let v = sample_x(&XDist::Gaussian { sd: 1.0 }, 2000, 31).unwrap();
    let sigma = tune_sigma_loo(&v, Kernel::Biweight, &geometric_points(0.01, 10.0, 30)).unwrap();
    let silverman = 1.06 * 2000f64.powf(-0.2);
    assert!(sigma > silverman / 3.0 && sigma < silverman * 3.0, "sigma {sigma}");
}

#[test]
fn schedule_bound_arithmetic() {
    assert!((admissible_beta_bound(0.4) - 0.15).abs() < 1e-15);
    assert!(theory_bandwidths(1000, 1.0, 0.4, 1.0, 0.1).is_ok());
    assert!(matches!(
        theory_bandwidths(1000, 1.0, 0.4, 1.0, 0.2),
        Err(Error::ScheduleViolation { .. })
    ));
}

#[test]
fn entropy_shift_and_scale() {
    let v = sample_x(&XDist::Gaussian { sd: 1.0 }, 3000, 32).unwrap();
    let base = resubstitution_entropy(&v, 0.3, Kernel::Biweight).unwrap().value;
    let shifted: Vec<f64> = v.iter().map(|x| x + 3.0).collect();
    let s = resubstitution_entropy(&shifted, 0.3, Kernel::Biweight).unwrap().value;
    assert!((s - base).abs() <= 1e-12 * base.abs().max(1.0));
    let scaled: Vec<f64> = v.iter().map(|x| x * 4.0).collect();
    let c = resubstitution_entropy(&scaled, 1.2, Kernel::Biweight).unwrap().value;
    assert!((c - base - 4f64.ln()).abs() <= 1e-12);
}

#[test]
fn heavy_tails_do_not_force_oversmoothing() {
    use anm_core::oracle::{analytic_entropy, AnalyticDist};
    let d = AnalyticDist::Laplace { scale: 1.0 };
    // Seeds whose extreme spacings exceed one standard deviation.
    for seed in [1002, 1005, 1010] {
        let v = d.sample(10_000, seed).unwrap();
        let sd = anm_core::model::sample_sd(&v);
        let grid: Vec<f64> = geometric_points(1e-3, 10.0, 30).iter().map(|g| g * sd).collect();
        let sigma = tune_sigma_loo(&v, Kernel::Biweight, &grid).unwrap();
        assert!(sigma < 1.0, "seed {seed}: sigma {sigma}");
        let h = resubstitution_entropy(&v, sigma, Kernel::Biweight).unwrap().value;
        assert!((h - analytic_entropy(&d)).abs() < 0.05, "seed {seed}: {h}");
    }
}
