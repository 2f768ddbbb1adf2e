//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use anm_cli::cli_main;
use anm_core::bench::{aggregate, read_rows, Aggregate};
use anm_core::entropy::theory_bandwidths;
use anm_core::model::{sample_sd, EstimationMode};
use anm_core::oracle::AnalyticDist;
use anm_core::{
    estimate_entropy, resubstitution_entropy, sample_anm, score_direction, AnmSpec, Direction, InferenceConfig, Kernel,
};

const ENTROPY_N: usize = 10_000;
const ENTROPY_TOL: f64 = 0.05;
const ENTROPY_BUDGET: Duration = Duration::from_secs(30);
const IDENTITY_BUDGET: Duration = Duration::from_secs(120);
const RECOVERY_MIN_XTOY: f64 = 0.9;
const SWEEP_BUDGET: Duration = Duration::from_secs(600);
const TAIL_MAX_INVERSIONS: usize = 1;
/// Most undersmoothed bandwidth of the variance sweep, in covariate
/// standard deviations; the box window then holds about two points.
const VARIANCE_H0: f64 = 0.003;
const NULL_MIN_ABSTAIN: usize = 8;
const NULL_BUDGET: Duration = Duration::from_secs(300);
const INVARIANT_REL_TOL: f64 = 1e-12;
const AFFINE_GAP_TOL: f64 = 1e-10;
const INVARIANT_BUDGET: Duration = Duration::from_secs(60);

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn run_sweep_file(dir: &Path, name: &str, spec: &str) -> Result<Vec<Aggregate>, String> {
    let spec_path = dir.join(format!("{name}.cfg"));
    let out = dir.join(name);
    fs::write(&spec_path, spec).map_err(|e| e.to_string())?;
    let code = cli_main([
        "anm",
        "sweep",
        "--spec",
        spec_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    if code != 0 {
        return Err(format!("sweep exited {code}"));
    }
    let rows = read_rows(out.join("rows.csv")).map_err(|e| e.to_string())?;
    Ok(aggregate(&rows))
}

fn entropy_accuracy() -> Outcome {
    let truths = [
        5f64.ln(),
        0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln(),
        1.0 + 2f64.ln(),
    ];
    let dists = [
        AnalyticDist::Uniform { lo: -2.5, hi: 2.5 },
        AnalyticDist::Gaussian { sd: 1.0 },
        AnalyticDist::Laplace { scale: 1.0 },
    ];
    let config = InferenceConfig::default();
    let mut passed = true;
    let mut parts = Vec::new();
    for (i, (dist, truth)) in dists.iter().zip(truths).enumerate() {
        let start = Instant::now();
        let values = dist.sample(ENTROPY_N, 1000 + i as u64).unwrap();
        let est = estimate_entropy(&values, &config.entropy_bandwidth, config.entropy_kernel).unwrap();
        let err = (est.value - truth).abs();
        let took = start.elapsed();
        passed &= err < ENTROPY_TOL && took < ENTROPY_BUDGET;
        parts.push(format!("{dist:?} err={err:.4} {:.1}s", took.as_secs_f64()));
    }
    Outcome {
        passed,
        detail: parts.join("; "),
    }
}

fn identity_check() -> Outcome {
    let start = Instant::now();
    let code = cli_main(["anm", "verify", "--lemma1"]);
    let took = start.elapsed();
    Outcome {
        passed: code == 0 && took < IDENTITY_BUDGET,
        detail: format!("verify --lemma1 exit {code}, {:.1}s", took.as_secs_f64()),
    }
}

const RECOVERY_SPEC: &str = "axis = sample-size\naxis_values = 250,500,1000,2000\ngenerator = cubic\nb = 1\nq = 1\n\
repetitions = 10\ntau0 = 0\nseed = 1\nmode = coupled\n";

fn recovery(dir: &Path) -> Outcome {
    let start = Instant::now();
    let aggs = match run_sweep_file(dir, "recovery", RECOVERY_SPEC) {
        Ok(a) => a,
        Err(e) => {
            return Outcome {
                passed: false,
                detail: e,
            }
        }
    };
    let took = start.elapsed();
    let all_positive = aggs.iter().all(|a| a.mean_gap > 0.0 && a.n_rows == 10);
    let last = aggs.last().map_or(0.0, |a| a.frac_xtoy);
    let gaps: Vec<String> = aggs.iter().map(|a| format!("{:.3}", a.mean_gap)).collect();
    Outcome {
        passed: aggs.len() == 4 && all_positive && last >= RECOVERY_MIN_XTOY && took < SWEEP_BUDGET,
        detail: format!(
            "mean gaps [{}], XtoY at n=2000 {last:.2}, {:.1}s",
            gaps.join(", "),
            took.as_secs_f64()
        ),
    }
}

fn tail_trend(dir: &Path) -> Outcome {
    let spec =
        "axis = noise-power\naxis_values = 0.5,1.0,1.5,2.0\nb = 1\nn = 1000\nrepetitions = 10\ntau0 = 0\nseed = 1\n";
    let start = Instant::now();
    let aggs = match run_sweep_file(dir, "tail", spec) {
        Ok(a) => a,
        Err(e) => {
            return Outcome {
                passed: false,
                detail: e,
            }
        }
    };
    let took = start.elapsed();
    let inversions = aggs.windows(2).filter(|w| w[1].mean_gap < w[0].mean_gap).count();
    let gaps: Vec<String> = aggs.iter().map(|a| format!("{:.3}", a.mean_gap)).collect();
    Outcome {
        passed: aggs.len() == 4 && inversions <= TAIL_MAX_INVERSIONS && took < SWEEP_BUDGET,
        detail: format!(
            "mean gaps over q=0.5..2 [{}], {inversions} inversions, {:.1}s",
            gaps.join(", "),
            took.as_secs_f64()
        ),
    }
}

fn mode_variance(dir: &Path) -> Outcome {
    let spec = format!(
        "axis = bandwidth-geometric\naxis_values = {VARIANCE_H0},1.5,10\nb = 1\nq = 1\nn = 1000\n\
repetitions = 10\ncompare_modes = true\ntau0 = 0\nseed = 1\n"
    );
    let start = Instant::now();
    let aggs = match run_sweep_file(dir, "variance", &spec) {
        Ok(a) => a,
        Err(e) => {
            return Outcome {
                passed: false,
                detail: e,
            }
        }
    };
    let took = start.elapsed();
    let smallest = aggs.iter().map(|a| a.axis_value).fold(f64::INFINITY, f64::min);
    let sd = |mode: &str| {
        aggs.iter()
            .find(|a| a.axis_value == smallest && a.mode == mode)
            .map_or(f64::NAN, |a| a.sd_gap)
    };
    let (coupled, decoupled) = (sd("coupled"), sd("decoupled"));
    Outcome {
        passed: aggs.len() == 20 && coupled > decoupled && took < SWEEP_BUDGET,
        detail: format!(
            "h={smallest:.4}sd: sd(gap) coupled {coupled:.4} vs decoupled {decoupled:.4}, {:.1}s",
            took.as_secs_f64()
        ),
    }
}

fn gaussian_null() -> Outcome {
    let start = Instant::now();
    let mut abstain = 0;
    for r in 0..10u64 {
        let seed = 2000 + r;
        let s = sample_anm(&AnmSpec::linear_gaussian(1.0, 1.0), 2000, seed).unwrap();
        let cfg = InferenceConfig {
            tau0: 0.5,
            seed,
            ..InferenceConfig::default()
        };
        if score_direction(&s, &cfg).unwrap().decision == Direction::Abstain {
            abstain += 1;
        }
    }
    let took = start.elapsed();
    Outcome {
        passed: abstain >= NULL_MIN_ABSTAIN && took < NULL_BUDGET,
        detail: format!("{abstain}/10 abstained, {:.1}s", took.as_secs_f64()),
    }
}

fn invariants() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();

    let v = AnalyticDist::Laplace { scale: 1.0 }.sample(4000, 7).unwrap();
    let h = resubstitution_entropy(&v, 0.25, Kernel::Biweight).unwrap().value;
    let shifted: Vec<f64> = v.iter().map(|x| x + 5.0).collect();
    let hs = resubstitution_entropy(&shifted, 0.25, Kernel::Biweight).unwrap().value;
    if (hs - h).abs() > INVARIANT_REL_TOL * h.abs().max(1.0) {
        failures.push(format!("location {}", hs - h));
    }
    let a = 3.0;
    let scaled: Vec<f64> = v.iter().map(|x| a * x).collect();
    let ha = resubstitution_entropy(&scaled, 0.25 * a, Kernel::Biweight)
        .unwrap()
        .value;
    if (ha - h - a.ln()).abs() > INVARIANT_REL_TOL * h.abs().max(1.0) {
        failures.push(format!("scale {}", ha - h - a.ln()));
    }

    let s = sample_anm(&AnmSpec::cubic(1.0, 1.0), 1000, 8).unwrap();
    for mode in [EstimationMode::Coupled, EstimationMode::Decoupled { split_seed: 8 }] {
        let cfg = InferenceConfig {
            mode,
            seed: 8,
            ..InferenceConfig::default()
        };
        let base = score_direction(&s, &cfg).unwrap();
        // Bandwidth grids are in sample-sd units, so they rescale with the data.
        let moved = score_direction(&s.affine(2.0 / sample_sd(s.xs()), -3.0, 0.1, 7.0).unwrap(), &cfg).unwrap();
        if (moved.gap - base.gap).abs() >= AFFINE_GAP_TOL || moved.decision != base.decision {
            failures.push(format!("affine {mode:?} {}", moved.gap - base.gap));
        }
        let swapped = score_direction(&s.swapped(), &InferenceConfig { seed: 8 ^ 1, ..cfg }).unwrap();
        if swapped.gap != -base.gap {
            failures.push(format!("antisymmetry {mode:?} {}", swapped.gap + base.gap));
        }
    }

    if theory_bandwidths(1000, 1.0, 0.4, 1.0, 0.2).is_ok() {
        failures.push("schedule accepted beta=0.2".into());
    }
    if theory_bandwidths(1000, 1.0, 0.4, 1.0, 0.1).is_err() {
        failures.push("schedule rejected beta=0.1".into());
    }
    let took = start.elapsed();
    Outcome {
        passed: failures.is_empty() && took < INVARIANT_BUDGET,
        detail: if failures.is_empty() {
            format!("all identities hold, {:.1}s", took.as_secs_f64())
        } else {
            failures.join("; ")
        },
    }
}

fn determinism(dir: &Path) -> Outcome {
    let spec = RECOVERY_SPEC.replace("250,500,1000,2000", "250");
    let spec_path = dir.join("determinism.cfg");
    fs::write(&spec_path, spec).unwrap();
    let mut files = Vec::new();
    for run in ["first", "second"] {
        let out = dir.join(run);
        let code = cli_main([
            "anm",
            "sweep",
            "--spec",
            spec_path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        if code != 0 {
            return Outcome {
                passed: false,
                detail: format!("sweep exited {code}"),
            };
        }
        files.push(fs::read(out.join("rows.csv")).unwrap());
    }
    Outcome {
        passed: files[0] == files[1] && !files[0].is_empty(),
        detail: format!("{} bytes, identical: {}", files[0].len(), files[0] == files[1]),
    }
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let criteria: Vec<Criterion> = vec![
        ("1 entropy estimator accuracy", Box::new(entropy_accuracy)),
        ("2 identity check", Box::new(identity_check)),
        ("3 direction recovery", Box::new(|| recovery(dir.path()))),
        ("4 tail-sharpness trend", Box::new(|| tail_trend(dir.path()))),
        (
            "5 coupled vs decoupled variance",
            Box::new(|| mode_variance(dir.path())),
        ),
        ("6 gaussian null", Box::new(gaussian_null)),
        ("7 exact invariants", Box::new(invariants)),
        ("8 sweep determinism", Box::new(|| determinism(dir.path()))),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let o = check();
        println!(
            "{} criterion {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
