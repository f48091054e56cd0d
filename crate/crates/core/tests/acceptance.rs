//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.
//!
//!     cargo test -p measinfo --test acceptance

use std::process::{Command, ExitCode};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use measinfo::cli::{run_sweep, Preset, Settings, SweepConfig, SweepRow};
use measinfo::ensemble::Ensemble;
use measinfo::fock::{coherent_state, default_n_max, displacement, StateVector, C64};
use measinfo::info::{
    accessible_info_binary_pure, accessible_info_numeric, mutual_information, OptimizerConfig,
};
use measinfo::receivers::{
    atomic_receiver_unambiguous, homodyne_hard, homodyne_hard_povm, homodyne_soft_information,
    min_error_beta, pnrd_hard_instrument, pnrd_receiver, quadrature_likelihood, BetaChoice,
    BinaryCoherentScenario, Detection, ThetaChoice,
};
use measinfo::numerics::QuadConfig;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn preset_rows(p: &str) -> Vec<SweepRow> {
    let cfg = SweepConfig::resolve(Settings { preset: Some(p.into()), ..Settings::default() }).unwrap();
    run_sweep(&cfg).unwrap()
}

struct Presets {
    a: Vec<SweepRow>,
    b: Vec<SweepRow>,
    c: Vec<SweepRow>,
    d: Vec<SweepRow>,
}

impl Presets {
    fn all(&self) -> impl Iterator<Item = &SweepRow> {
        self.a.iter().chain(&self.b).chain(&self.c).chain(&self.d)
    }
}

fn near(x: f64, y: f64) -> bool {
    (x - y).abs() < 1e-9
}

fn pick<'a>(rows: &'a [SweepRow], scheme: &str, alpha_sq: f64) -> &'a SweepRow {
    rows.iter()
        .find(|r| r.scheme == scheme && near(r.alpha_sq, alpha_sq))
        .unwrap_or_else(|| panic!("no {scheme} row at {alpha_sq}"))
}

fn conservation(p: &Presets) -> Outcome {
    let mut worst = 0.0f64;
    let mut errors = 0;
    for r in p.all() {
        match (r.extracted, r.residual, r.destroyed) {
            (Some(e), Some(res), Some(d)) => worst = worst.max((e + res + d - 1.0).abs()),
            _ => errors += 1,
        }
    }
    outcome(
        errors == 0 && worst <= 1e-9,
        format!("max |E+R+D-1| = {worst:.2e} over {} rows, {errors} error rows", p.all().count()),
    )
}

fn bounds_chain(p: &Presets) -> Outcome {
    let tol = 1e-9;
    let mut violations = Vec::new();
    for r in p.all() {
        let sc = BinaryCoherentScenario::from_mean_photons(r.alpha_sq, 0.5).unwrap();
        let (i, ip, ia) = (r.mutual_info.unwrap(), r.i_prime_max.unwrap(), r.i_acc.unwrap());
        let (chi, h) = (sc.holevo(), sc.prior_entropy());
        let ok = -tol <= i && i <= ip + tol && ip <= ia + tol && ia <= chi + tol && chi <= h + tol;
        if !ok {
            violations.push(format!("{}@{}", r.scheme, r.alpha_sq));
        }
    }
    outcome(violations.is_empty(), format!("{} violations {:?}", violations.len(), violations))
}

fn oracle_equivalence() -> Outcome {
    let grid: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let mut worst = 0.0f64;
    let mut unconverged = 0;
    for &s in &grid {
        let a = StateVector::from_slice(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let b = StateVector::from_slice(&[C64::new(s.sqrt(), 0.0), C64::new((1.0 - s).sqrt(), 0.0)]);
        for &eta in &grid {
            let ens = Ensemble::pure(vec![a.clone(), b.clone()], vec![eta, 1.0 - eta]).unwrap();
            let numeric = accessible_info_numeric(&ens, &OptimizerConfig::default()).unwrap();
            let closed = accessible_info_binary_pure(s, [eta, 1.0 - eta]).unwrap();
            worst = worst.max((numeric.value - closed).abs());
            unconverged += usize::from(!numeric.converged);
        }
    }
    outcome(
        worst <= 1e-6,
        format!("max |numeric - closed form| = {worst:.2e} on 81 points ({unconverged} flagged unconverged)"),
    )
}

fn matrix_path() -> Outcome {
    let mut worst = 0.0f64;
    for a2 in [0.1, 0.5, 1.0, 2.0] {
        let sc = BinaryCoherentScenario::from_mean_photons(a2, 0.5).unwrap();

        let n_max = default_n_max(a2);
        let ens = sc.ensemble(n_max).unwrap();
        let matrix = mutual_information(&ens, &homodyne_hard_povm(n_max).unwrap()).unwrap();
        worst = worst.max((matrix - homodyne_hard(&sc).unwrap().breakdown.mutual_info).abs());

        let alpha = sc.alpha();
        for beta in [alpha, min_error_beta(&sc).unwrap()] {
            let n_max = default_n_max((alpha + beta).powi(2)) + 10;
            let d = displacement(C64::new(beta, 0.0), n_max).unwrap();
            let shifted = |amp: f64| d.apply(&coherent_state(C64::new(amp, 0.0), n_max).unwrap());
            let ens = Ensemble::pure(vec![shifted(alpha), shifted(-alpha)], vec![0.5, 0.5]).unwrap();
            let povm = measinfo::ensemble::induced_povm(&pnrd_hard_instrument(n_max)).unwrap();
            let matrix = mutual_information(&ens, &povm).unwrap();
            let closed = pnrd_receiver(&sc, BetaChoice::Fixed(C64::new(beta, 0.0)), Detection::Hard)
                .unwrap()
                .breakdown
                .mutual_info;
            worst = worst.max((matrix - closed).abs());
        }
    }
    outcome(worst <= 1e-7, format!("max |closed form - matrix path| = {worst:.2e}"))
}

fn soft_beats_hard(p: &Presets) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (rows, hard, soft) in [(&p.a, "homodyne-hard", "homodyne-soft"), (&p.b, "pnrd-hard", "pnrd-soft")] {
        let hs: Vec<&SweepRow> = rows.iter().filter(|r| r.scheme == hard).collect();
        let ss: Vec<&SweepRow> = rows.iter().filter(|r| r.scheme == soft).collect();
        let min_gap = hs
            .iter()
            .zip(&ss)
            .map(|(h, s)| s.extracted.unwrap() - h.extracted.unwrap())
            .fold(f64::INFINITY, f64::min);
        let gap = |x| pick(rows, soft, x).extracted.unwrap() - pick(rows, hard, x).extracted.unwrap();
        let (g_low, g_high) = (gap(0.1), gap(2.0));
        let max_r = hs.iter().chain(&ss).map(|r| r.residual.unwrap().abs()).fold(0.0, f64::max);
        ok &= min_gap >= -1e-12 && g_low > g_high && max_r == 0.0;
        notes.push(format!(
            "{soft}-{hard}: min gap {min_gap:.2e}, gap(0.1) {g_low:.4} > gap(2) {g_high:.2e}, max |R| {max_r:.1e}"
        ));
    }
    outcome(ok, notes.join("; "))
}

fn atomic_optimal(p: &Presets) -> Outcome {
    let max_d = p.c.iter().map(|r| r.destroyed.unwrap().abs()).fold(0.0, f64::max);
    let min_e = p
        .c
        .iter()
        .filter(|r| r.alpha_sq <= 0.1 + 1e-12)
        .map(|r| r.extracted.unwrap())
        .fold(f64::INFINITY, f64::min);
    let worst_ratio = p
        .c
        .iter()
        .filter(|r| r.alpha_sq <= 0.2 + 1e-12)
        .map(|r| {
            let sc = BinaryCoherentScenario::from_mean_photons(r.alpha_sq, 0.5).unwrap();
            r.avg_error.unwrap() / sc.helstrom_avg_error() - 1.0
        })
        .fold(0.0, f64::max);
    outcome(
        max_d <= 1e-6 && min_e >= 0.99 && worst_ratio <= 0.1,
        format!("max D {max_d:.1e}, min E(a2<=0.1) {min_e:.4}, max error excess over Helstrom {:.2}%", worst_ratio * 100.0),
    )
}

fn unambiguous(p: &Presets) -> Outcome {
    let mut vacuum_errors = 0;
    for a2 in [0.05, 0.4, 1.0, 3.0] {
        let sc = BinaryCoherentScenario::from_mean_photons(a2, 0.5).unwrap();
        for stages in [1, 2] {
            let r = atomic_receiver_unambiguous(&sc, stages, &[ThetaChoice::Auto]).unwrap();
            vacuum_errors += usize::from(r.error_probs.1 != 0.0);
        }
    }
    let d_fail = p
        .d
        .iter()
        .filter(|r| r.extracted.unwrap() > 0.0 && (r.destroyed.unwrap() <= 0.0 || r.destroyed.unwrap().is_nan()))
        .count();
    let sc = BinaryCoherentScenario::from_mean_photons(0.4, 0.5).unwrap();
    let two = atomic_receiver_unambiguous(&sc, 2, &[ThetaChoice::Auto]).unwrap();
    let increment = two.stage_infos[1] - two.stage_infos[0];
    outcome(
        vacuum_errors == 0 && d_fail == 0 && increment >= 1e-3,
        format!(
            "nonzero vacuum-branch errors {vacuum_errors}, rows with E>0 but D<=0 {d_fail}, \
             two-stage increment at a2=0.4 {increment:.4} bits"
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_measinfo"))
            .args(["sweep", "--preset", "fig1c", "--seed", "7", "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(path).unwrap()
    };
    let (first, second) = (run("a.csv"), run("b.csv"));
    outcome(first == second && !first.is_empty(), format!("{} bytes, identical: {}", first.len(), first == second))
}

fn monte_carlo() -> Outcome {
    let alpha = 0.2f64.sqrt();
    let quad = homodyne_soft_information(alpha, [0.5, 0.5], &QuadConfig::default()).unwrap();
    let n = 10_000_000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(20_251_015);
    let noise = Normal::new(0.0, 0.5).unwrap();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for i in 0..n {
        let mean = if i % 2 == 0 { alpha } else { -alpha };
        let x = mean + noise.sample(&mut rng);
        let f = quadrature_likelihood(x, mean);
        let mix = 0.5 * quadrature_likelihood(x, alpha) + 0.5 * quadrature_likelihood(x, -alpha);
        let v = (f / mix).log2();
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / n as f64;
    let sigma = ((sum_sq / n as f64 - mean * mean) / n as f64).sqrt();
    let z = (quad - mean) / sigma;
    outcome(z.abs() <= 3.0, format!("quadrature {quad:.6}, Monte Carlo {mean:.6} ± {sigma:.1e} ({z:+.2}σ)"))
}

fn main() -> ExitCode {
    let presets = Presets {
        a: preset_rows("fig1a"),
        b: preset_rows("fig1b"),
        c: preset_rows("fig1c"),
        d: preset_rows("fig1d"),
    };
    assert_eq!(presets.c.len(), Preset::GRID.points().len());
    let results = [
        ("1 conservation E+R+D=1", conservation(&presets)),
        ("2 bounds chain", bounds_chain(&presets)),
        ("3 numeric vs closed-form accessible information", oracle_equivalence()),
        ("4 closed form vs matrix path", matrix_path()),
        ("5 soft vs hard decisions", soft_beats_hard(&presets)),
        ("6 atomic optimal receiver", atomic_optimal(&presets)),
        ("7 unambiguous atomic receiver", unambiguous(&presets)),
        ("8 determinism", determinism()),
        ("9 Monte Carlo homodyne-soft", monte_carlo()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("{} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
