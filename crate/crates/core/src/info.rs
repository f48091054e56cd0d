//! Information functionals on ensembles and measurements, in bits.
//!
//! Besides the Shannon and Holevo quantities this module computes the
//! accessible information (closed form for two pure states, numerical search
//! otherwise), the best mutual information reachable after a first
//! measurement, and the split of the accessible information into extracted,
//! residual and destroyed fractions.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{
    induced_povm, outcome_probabilities, post_measurement_branch, statistical_operator, Ensemble,
    Instrument, JointTable, Povm, Signal, OUTCOME_EPS,
};
use crate::error::{Error, Result};
use crate::fock::{Operator, C64};
use crate::linalg;

/// Slack on Σ p = 1 for distributions handed to the entropy functions.
pub const DIST_TOL: f64 = 1e-9;
/// Accessible information at or below this makes the E/R/D fractions undefined.
pub const INFO_EPS: f64 = 1e-12;
/// Purity slack used to recognise pure post-measurement states.
pub const PURITY_TOL: f64 = 1e-10;

fn h_term(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy −Σ p log₂ p with 0 log 0 = 0.
pub fn shannon_entropy(dist: &[f64]) -> Result<f64> {
    if dist.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::InvalidDistribution(
            "entries must be finite and nonnegative".into(),
        ));
    }
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > DIST_TOL {
        return Err(Error::InvalidDistribution(format!("sums to {total}")));
    }
    Ok(dist.iter().map(|&p| h_term(p)).sum())
}

/// H(p) = −p log₂ p − (1−p) log₂(1−p).
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(h_term(p) + h_term(1.0 - p))
}

/// Mutual information of a joint distribution table.
pub fn table_mutual_information(table: &JointTable) -> f64 {
    let rows = table.signal_marginals();
    let cols = table.outcome_marginals();
    let p = table.matrix();
    let mut info = 0.0;
    for j in 0..p.nrows() {
        for k in 0..p.ncols() {
            let pjk = p[(j, k)];
            if pjk > 0.0 {
                info += pjk * (pjk / (rows[j] * cols[k])).log2();
            }
        }
    }
    info.max(0.0)
}

/// I(ℰ:Π) = H(ℰ) − Σ_k P_k H(ℰ|Π_k).
pub fn mutual_information(ens: &Ensemble, povm: &Povm) -> Result<f64> {
    Ok(table_mutual_information(&outcome_probabilities(ens, povm)?))
}

/// Mutual information of a binary two-outcome scheme with error probabilities
/// `r1 = P(outcome 2 | signal 1)` and `r2 = P(outcome 1 | signal 2)`.
pub fn two_element_mutual_info(r1: f64, r2: f64, priors: [f64; 2]) -> Result<f64> {
    for r in [r1, r2] {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidProbability(r));
        }
    }
    let [eta1, eta2] = priors;
    let p1 = eta1 * (1.0 - r1) + eta2 * r2;
    let p2 = 1.0 - p1;
    let mut info = binary_entropy(eta1)?;
    if p1 > 0.0 {
        info -= p1 * binary_entropy((eta2 * r2 / p1).clamp(0.0, 1.0))?;
    }
    if p2 > 0.0 {
        info -= p2 * binary_entropy((eta1 * r1 / p2).clamp(0.0, 1.0))?;
    }
    Ok(info.max(0.0))
}

fn check_binary(overlap_sq: f64, priors: [f64; 2]) -> Result<()> {
    if !(0.0..=1.0).contains(&overlap_sq) {
        return Err(Error::InvalidArgument(format!(
            "overlap {overlap_sq} is outside [0, 1]"
        )));
    }
    if priors.iter().any(|&p| !(0.0..=1.0).contains(&p))
        || (priors[0] + priors[1] - 1.0).abs() > DIST_TOL
    {
        return Err(Error::InvalidDistribution(format!("{priors:?}")));
    }
    Ok(())
}

/// Minimum-error probabilities (r₁, r₂) for two pure states with squared overlap
/// `overlap_sq`.
///
/// Identical states with equal priors have no preferred decision; this returns
/// (½, ½) there.
pub fn helstrom_error_probs(overlap_sq: f64, priors: [f64; 2]) -> Result<(f64, f64)> {
    check_binary(overlap_sq, priors)?;
    let [eta1, eta2] = priors;
    let disc = 1.0 - 4.0 * eta1 * eta2 * overlap_sq;
    if disc <= 0.0 {
        return Ok((0.5, 0.5));
    }
    let root = disc.sqrt();
    let r1 = 0.5 * (1.0 - (1.0 - 2.0 * eta2 * overlap_sq) / root);
    let r2 = 0.5 * (1.0 - (1.0 - 2.0 * eta1 * overlap_sq) / root);
    Ok((r1.clamp(0.0, 1.0), r2.clamp(0.0, 1.0)))
}

/// ½(1 − √(1 − 4η₁η₂ |⟨ψ₁|ψ₂⟩|²)).
pub fn helstrom_avg_error(overlap_sq: f64, priors: [f64; 2]) -> f64 {
    0.5 * (1.0 - (1.0 - 4.0 * priors[0] * priors[1] * overlap_sq).max(0.0).sqrt())
}

/// Accessible information of two pure states: the mutual information of the
/// minimum-error measurement.
pub fn accessible_info_binary_pure(overlap_sq: f64, priors: [f64; 2]) -> Result<f64> {
    let (r1, r2) = helstrom_error_probs(overlap_sq, priors)?;
    two_element_mutual_info(r1, r2, priors)
}

/// χ = S(ρ) − Σ_j η_j S(ρ_j).
pub fn holevo_quantity(ens: &Ensemble) -> f64 {
    let s_rho = match ens.weighted_gram() {
        Some(gram) => linalg::von_neumann_entropy(&gram),
        None => statistical_operator(ens).entropy(),
    };
    let s_parts: f64 = ens
        .signals()
        .iter()
        .zip(ens.priors())
        .map(|(s, &eta)| eta * s.entropy())
        .sum();
    (s_rho - s_parts).max(0.0)
}

/// Settings of the multi-start accessible-information search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub max_iter: usize,
    pub grad_tol: f64,
    pub seed: u64,
    /// Largest ensemble support dimension accepted.
    pub max_dim: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 32,
            max_iter: 500,
            grad_tol: 1e-8,
            seed: 0x5EED,
            max_dim: 8,
        }
    }
}

/// Best measurement found by [`accessible_info_numeric`].
#[derive(Debug, Clone, PartialEq)]
pub struct NumericAccessInfo {
    /// Mutual information of `povm`, a lower bound on the accessible information.
    pub value: f64,
    pub povm: Povm,
    /// False when the winning start hit the iteration limit.
    pub converged: bool,
    pub iterations: usize,
    pub best_start: usize,
}

/// Signals restricted to the support of ρ, each pre-multiplied by its prior.
struct Reduced {
    basis: DMatrix<C64>,
    weighted: Vec<DMatrix<C64>>,
    priors: Vec<f64>,
}

fn reduce_to_support(ens: &Ensemble) -> Reduced {
    let rho = statistical_operator(ens);
    let (values, vectors) = linalg::hermitian_eigen(rho.matrix());
    let keep: Vec<usize> = (0..values.len()).filter(|&i| values[i] > 1e-12).collect();
    let basis = DMatrix::from_fn(vectors.nrows(), keep.len(), |r, c| vectors[(r, keep[c])]);
    let weighted = ens
        .signals()
        .iter()
        .zip(ens.priors())
        .map(|(s, &eta)| {
            let m = match s {
                Signal::Pure(v) => {
                    let w = basis.adjoint() * v.amplitudes();
                    &w * w.adjoint()
                }
                Signal::Mixed(r) => basis.adjoint() * r.matrix() * &basis,
            };
            linalg::hermitian_part(&m).scale(eta)
        })
        .collect();
    Reduced {
        basis,
        weighted,
        priors: ens.priors().to_vec(),
    }
}

/// Mutual information (nats) and its Euclidean gradient for the rank-one POVM
/// whose elements are yₖ†yₖ, with yₖ the rows of the isometry `y`.
fn objective(red: &Reduced, y: &DMatrix<C64>, want_grad: bool) -> (f64, Option<DMatrix<C64>>) {
    let m = y.nrows();
    let n = red.weighted.len();
    // rows y_k times each weighted signal
    let ys: Vec<DMatrix<C64>> = red.weighted.iter().map(|s| y * s).collect();
    let mut p = DMatrix::<f64>::zeros(n, m);
    for j in 0..n {
        for k in 0..m {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..y.ncols() {
                acc += ys[j][(k, a)] * y[(k, a)].conj();
            }
            p[(j, k)] = acc.re.max(0.0);
        }
    }
    let q: Vec<f64> = (0..m).map(|k| p.column(k).sum()).collect();
    let mut value = 0.0;
    for j in 0..n {
        for k in 0..m {
            let pjk = p[(j, k)];
            if pjk > 0.0 && red.priors[j] > 0.0 {
                value += pjk * (pjk / (red.priors[j] * q[k])).ln();
            }
        }
    }
    if !want_grad {
        return (value, None);
    }
    let mut grad = DMatrix::<C64>::zeros(m, y.ncols());
    for k in 0..m {
        for j in 0..n {
            let pjk = p[(j, k)];
            if pjk <= 1e-300 {
                continue;
            }
            let g = 2.0 * (pjk / q[k]).ln();
            for a in 0..y.ncols() {
                grad[(k, a)] += ys[j][(k, a)] * g;
            }
        }
    }
    (value, Some(grad))
}

/// Polar retraction X (X†X)^{-1/2} onto the isometries.
fn polar(x: &DMatrix<C64>) -> DMatrix<C64> {
    let gram = x.adjoint() * x;
    let (values, vectors) = linalg::hermitian_eigen(&gram);
    let inv_sqrt = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&l| C64::new(1.0 / l.max(1e-300).sqrt(), 0.0)),
    ));
    x * (&vectors * inv_sqrt * vectors.adjoint())
}

fn random_isometry(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let x = DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    polar(&x)
}

struct Ascent {
    value: f64,
    y: DMatrix<C64>,
    converged: bool,
    iterations: usize,
}

fn ascend(red: &Reduced, mut y: DMatrix<C64>, cfg: &OptimizerConfig) -> Ascent {
    let (mut value, mut grad) = objective(red, &y, true);
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        iterations += 1;
        let g = grad.take().expect("gradient requested");
        let yg = y.adjoint() * &g;
        let xi = &g - &y * linalg::hermitian_part(&yg);
        let xi_norm_sqr = xi.norm_squared();
        if xi_norm_sqr.sqrt() < cfg.grad_tol {
            converged = true;
            break;
        }
        let mut accepted = None;
        step *= 2.0;
        for _ in 0..60 {
            let cand = polar(&(&y + xi.scale(step)));
            let (v, _) = objective(red, &cand, false);
            if v >= value + 1e-4 * step * xi_norm_sqr {
                accepted = Some((cand, v));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((cand, v)) => {
                let gain = v - value;
                y = cand;
                value = v;
                grad = objective(red, &y, true).1;
                if gain <= 1e-16 * value.abs().max(1e-300) {
                    converged = true;
                    break;
                }
            }
            None => {
                // No ascent direction left at working precision.
                converged = true;
                break;
            }
        }
    }
    Ascent {
        value,
        y,
        converged,
        iterations,
    }
}

/// Numerical accessible information: best mutual information over rank-one
/// POVMs with d² outcomes, d the support dimension of the ensemble.
///
/// Each start draws a Haar-random isometry and performs projected gradient
/// ascent with backtracking on the isometry manifold. Starts run in parallel;
/// the winner is the largest value, ties going to the lower start index.
pub fn accessible_info_numeric(ens: &Ensemble, cfg: &OptimizerConfig) -> Result<NumericAccessInfo> {
    let red = reduce_to_support(ens);
    let d = red.basis.ncols();
    let full_dim = ens.dim();
    if d > cfg.max_dim {
        return Err(Error::EnsembleTooLarge {
            dim: d,
            max: cfg.max_dim,
        });
    }
    if d <= 1 {
        return Ok(NumericAccessInfo {
            value: 0.0,
            povm: Povm::new(vec![Operator::identity(full_dim)])?,
            converged: true,
            iterations: 0,
            best_start: 0,
        });
    }
    if cfg.starts == 0 {
        return Err(Error::InvalidArgument("optimizer needs at least one start".into()));
    }
    let outcomes = d * d;
    let best = (0..cfg.starts)
        .into_par_iter()
        .map(|start| {
            let seed = cfg
                .seed
                .wrapping_add((start as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let y0 = random_isometry(outcomes, d, &mut rng);
            (start, ascend(&red, y0, cfg))
        })
        .reduce_with(|a, b| {
            let a_wins = a.1.value > b.1.value || (a.1.value == b.1.value && a.0 < b.0);
            if a_wins {
                a
            } else {
                b
            }
        })
        .expect("at least one start");

    let (best_start, run) = best;
    let mut elements = Vec::with_capacity(outcomes + 1);
    for k in 0..outcomes {
        let v = red.basis.clone() * run.y.row(k).adjoint();
        elements.push(Operator::new(&v * v.adjoint()));
    }
    let complement =
        DMatrix::<C64>::identity(full_dim, full_dim) - &red.basis * red.basis.adjoint();
    if linalg::max_abs(complement.iter()) > 1e-12 {
        elements.push(Operator::new(complement));
    }
    Ok(NumericAccessInfo {
        value: (run.value / std::f64::consts::LN_2).max(0.0),
        povm: Povm::new(elements)?,
        converged: run.converged,
        iterations: run.iterations,
        best_start,
    })
}

/// Source of accessible-information values for post-measurement ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum AccessOracle {
    /// Closed form for two pure states; anything else is an error.
    ClosedForm,
    /// Numerical search for every ensemble.
    Numeric(OptimizerConfig),
    /// Closed form when the ensemble is two pure states, numerical otherwise.
    #[default]
    Auto,
    /// As `Auto` with explicit optimizer settings.
    AutoWith(OptimizerConfig),
}

impl AccessOracle {
    pub fn accessible_info(&self, ens: &Ensemble) -> Result<f64> {
        if ens.priors().iter().filter(|&&p| p > 0.0).count() <= 1 {
            return Ok(0.0);
        }
        let closed = || {
            ens.binary_pure(PURITY_TOL)
                .map(|(ov, priors)| accessible_info_binary_pure(ov, priors))
        };
        match self {
            AccessOracle::ClosedForm => closed().unwrap_or_else(|| {
                Err(Error::OracleFailure(
                    "closed form needs an ensemble of two pure states".into(),
                ))
            }),
            AccessOracle::Numeric(cfg) => Ok(accessible_info_numeric(ens, cfg)?.value),
            AccessOracle::Auto => match closed() {
                Some(v) => v,
                None => Ok(accessible_info_numeric(ens, &OptimizerConfig::default())?.value),
            },
            AccessOracle::AutoWith(cfg) => match closed() {
                Some(v) => v,
                None => Ok(accessible_info_numeric(ens, cfg)?.value),
            },
        }
    }
}

/// Best mutual information reachable when `instr` is followed by an optimal
/// measurement on each post-measurement ensemble.
///
/// Destructive instruments leave nothing to measure, so the result is the
/// mutual information of the instrument itself.
pub fn i_prime_max(ens: &Ensemble, instr: &Instrument, oracle: &AccessOracle) -> Result<f64> {
    let povm = induced_povm(instr)?;
    if instr.is_destructive() {
        return mutual_information(ens, &povm);
    }
    let table = outcome_probabilities(ens, &povm)?;
    let marginals = table.outcome_marginals();
    let mut remaining = 0.0;
    for (k, &pk) in marginals.iter().enumerate() {
        if pk <= OUTCOME_EPS {
            continue;
        }
        let branch = post_measurement_branch(ens, instr, k)?;
        let h = branch.ensemble.prior_entropy();
        let acc = oracle
            .accessible_info(&branch.ensemble)
            .map_err(|e| match e {
                Error::OracleFailure(_) => e,
                other => Error::OracleFailure(other.to_string()),
            })?;
        remaining += pk * (h - acc);
    }
    Ok(ens.prior_entropy() - remaining)
}

/// What the fractions are normalized by.
#[derive(Debug, Clone, PartialEq)]
pub enum Normalizer {
    /// The accessible information of the ensemble.
    Exact,
    /// The mutual information of a named reference measurement.
    Reference { label: String, mutual_info: f64 },
}

/// Extracted, residual and destroyed fractions of one measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoBreakdown {
    pub mutual_info: f64,
    pub i_acc: f64,
    pub i_prime_max: f64,
    pub extracted: f64,
    pub residual: f64,
    pub destroyed: f64,
    pub reference_label: String,
}

impl InfoBreakdown {
    pub const EXACT_LABEL: &'static str = "exact";

    /// Fails with [`Error::ZeroAccessibleInfo`] when `i_acc` ≤ [`INFO_EPS`].
    pub fn new(mutual_info: f64, i_acc: f64, i_prime_max: f64, label: &str) -> Result<Self> {
        if !(i_acc > INFO_EPS) {
            return Err(Error::ZeroAccessibleInfo { i_acc });
        }
        Ok(Self {
            mutual_info,
            i_acc,
            i_prime_max,
            extracted: mutual_info / i_acc,
            residual: (i_prime_max - mutual_info) / i_acc,
            destroyed: (i_acc - i_prime_max) / i_acc,
            reference_label: label.to_string(),
        })
    }

    /// E + R + D − 1.
    pub fn conservation_residual(&self) -> f64 {
        self.extracted + self.residual + self.destroyed - 1.0
    }

    /// Checks the fraction ranges, conservation and I ≤ I′ ≤ I_acc within `tol`.
    pub fn check_invariants(&self, tol: f64) -> std::result::Result<(), String> {
        for (name, v) in [
            ("E", self.extracted),
            ("R", self.residual),
            ("D", self.destroyed),
        ] {
            if !(-tol..=1.0 + tol).contains(&v) {
                return Err(format!("{name} = {v} outside [0, 1]"));
            }
        }
        if self.conservation_residual().abs() > tol {
            return Err(format!("E+R+D-1 = {:e}", self.conservation_residual()));
        }
        if self.mutual_info > self.i_prime_max + tol || self.i_prime_max > self.i_acc + tol {
            return Err(format!(
                "bounds violated: I = {}, I' = {}, I_acc = {}",
                self.mutual_info, self.i_prime_max, self.i_acc
            ));
        }
        Ok(())
    }
}

/// E/R/D breakdown of `instr` on `ens`.
pub fn erd_breakdown(
    ens: &Ensemble,
    instr: &Instrument,
    normalizer: &Normalizer,
    oracle: &AccessOracle,
) -> Result<InfoBreakdown> {
    let povm = induced_povm(instr)?;
    let mi = mutual_information(ens, &povm)?;
    let ip = i_prime_max(ens, instr, oracle)?;
    match normalizer {
        Normalizer::Exact => {
            let acc = oracle.accessible_info(ens)?;
            InfoBreakdown::new(mi, acc, ip, InfoBreakdown::EXACT_LABEL)
        }
        Normalizer::Reference { label, mutual_info } => {
            InfoBreakdown::new(mi, *mutual_info, ip, label)
        }
    }
}
