//! Binary coherent-state receivers for the signal pair {|α⟩, |−α⟩}.
//!
//! Outcome 1 is associated with |α⟩ and outcome 2 with |−α⟩; `r1` is the
//! probability of deciding 2 when |α⟩ was sent and `r2` the probability of
//! deciding 1 when |−α⟩ was sent. The amplitude is rotated to be real and
//! nonnegative, which removes an information-free global phase.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use statrs::function::erf::erfc;

use crate::ensemble::{
    induced_povm, outcome_probabilities, post_measurement_branch, Ensemble, Instrument, JointTable,
    Povm, Signal,
};
use crate::error::{Error, Result};
use crate::fock::{coherent_state_with_tol, default_n_max, jc_unitary, Operator, StateVector, Tolerances, C64};
use crate::info::{
    accessible_info_binary_pure, helstrom_avg_error, i_prime_max, table_mutual_information,
    two_element_mutual_info, AccessOracle, InfoBreakdown, OptimizerConfig,
};
use crate::linalg;
use crate::numerics::{adaptive_simpson, minimize_scalar, QuadConfig};

/// Points in the uniform scan that precedes each golden-section refinement.
const SCAN_POINTS: usize = 400;
const RESTARTS: usize = 3;
const ANGLE_TOL: f64 = 1e-9;

/// The pair {|α⟩, |−α⟩} with priors, truncation and tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryCoherentScenario {
    alpha: f64,
    priors: [f64; 2],
    n_max: Option<usize>,
    pub tolerances: Tolerances,
    pub optimizer: OptimizerConfig,
}

impl BinaryCoherentScenario {
    /// A complex amplitude is replaced by its modulus.
    pub fn new(alpha: C64, priors: [f64; 2]) -> Result<Self> {
        if priors.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (priors[0] + priors[1] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("priors {priors:?}")));
        }
        let alpha = alpha.norm();
        if !alpha.is_finite() {
            return Err(Error::InvalidArgument("amplitude must be finite".into()));
        }
        Ok(Self {
            alpha,
            priors,
            n_max: None,
            tolerances: Tolerances::default(),
            optimizer: OptimizerConfig::default(),
        })
    }

    /// Scenario with real amplitude √(mean photon number) and priors (η₁, 1 − η₁).
    pub fn from_mean_photons(alpha_sq: f64, eta1: f64) -> Result<Self> {
        if !(alpha_sq >= 0.0) {
            return Err(Error::InvalidArgument(format!("mean photon number {alpha_sq} < 0")));
        }
        Self::new(C64::new(alpha_sq.sqrt(), 0.0), [eta1, 1.0 - eta1])
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = Some(n_max);
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mean_photons(&self) -> f64 {
        self.alpha * self.alpha
    }

    pub fn priors(&self) -> [f64; 2] {
        self.priors
    }

    /// Truncation for states whose largest mean photon number is `mean`.
    pub fn n_max_for(&self, mean: f64) -> usize {
        self.n_max.unwrap_or_else(|| default_n_max(mean))
    }

    /// |⟨α|−α⟩|² = e^{−4|α|²}.
    pub fn overlap_sq(&self) -> f64 {
        (-4.0 * self.mean_photons()).exp()
    }

    pub fn accessible_info(&self) -> Result<f64> {
        accessible_info_binary_pure(self.overlap_sq(), self.priors)
    }

    pub fn helstrom_avg_error(&self) -> f64 {
        helstrom_avg_error(self.overlap_sq(), self.priors)
    }

    /// Holevo quantity of the pair, from the spectrum (1 ± √(1 − 4η₁η₂(1 − s)))/2.
    pub fn holevo(&self) -> f64 {
        let root = (1.0 - 4.0 * self.priors[0] * self.priors[1] * (1.0 - self.overlap_sq())).max(0.0).sqrt();
        linalg::spectrum_entropy(&[(1.0 + root) / 2.0, (1.0 - root) / 2.0])
    }

    pub fn prior_entropy(&self) -> f64 {
        linalg::spectrum_entropy(&self.priors)
    }

    fn coherent(&self, amp: f64, n_max: usize) -> Result<StateVector> {
        coherent_state_with_tol(C64::new(amp, 0.0), n_max, self.tolerances.trunc)
    }

    /// {|α⟩, |−α⟩} in a Fock space truncated at `n_max`.
    pub fn ensemble(&self, n_max: usize) -> Result<Ensemble> {
        Ensemble::pure(
            vec![self.coherent(self.alpha, n_max)?, self.coherent(-self.alpha, n_max)?],
            self.priors.to_vec(),
        )
    }

    fn breakdown(&self, mutual_info: f64, i_prime_max: f64) -> Result<InfoBreakdown> {
        InfoBreakdown::new(mutual_info, self.accessible_info()?, i_prime_max, InfoBreakdown::EXACT_LABEL)
    }
}

/// Outcome of running one receiver on one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverResult {
    pub breakdown: InfoBreakdown,
    pub error_probs: (f64, f64),
    pub avg_error: f64,
    pub instrument: Option<Instrument>,
    /// Cumulative mutual information after each stage of a sequential scheme.
    pub stage_infos: Vec<f64>,
    /// Interaction angle of each atomic stage.
    pub thetas: Vec<f64>,
    /// Displacement applied before detection, when there is one.
    pub beta: Option<C64>,
}

impl ReceiverResult {
    fn new(breakdown: InfoBreakdown, error_probs: (f64, f64), priors: [f64; 2]) -> Self {
        Self {
            breakdown,
            error_probs,
            avg_error: priors[0] * error_probs.0 + priors[1] * error_probs.1,
            instrument: None,
            stage_infos: Vec::new(),
            thetas: Vec::new(),
            beta: None,
        }
    }
}

fn gaussian_cdf_above(mean: f64, threshold: f64) -> f64 {
    // P(x > threshold) for x ~ N(mean, 1/4)
    0.5 * erfc(SQRT_2 * (threshold - mean))
}

/// Sign-of-quadrature homodyne decision.
pub fn homodyne_hard(sc: &BinaryCoherentScenario) -> Result<ReceiverResult> {
    let r = 0.5 * erfc(SQRT_2 * sc.alpha);
    let info = two_element_mutual_info(r, r, sc.priors)?;
    Ok(ReceiverResult::new(sc.breakdown(info, info)?, (r, r), sc.priors))
}

/// Quadrature likelihood |⟨±α|x⟩|² = √(2/π) e^{−2(x ∓ α)²}.
pub fn quadrature_likelihood(x: f64, mean: f64) -> f64 {
    (2.0 / PI).sqrt() * (-2.0 * (x - mean).powi(2)).exp()
}

/// Mutual information of a homodyne detector that keeps the full quadrature value.
pub fn homodyne_soft_information(alpha: f64, priors: [f64; 2], cfg: &QuadConfig) -> Result<f64> {
    let [eta1, eta2] = priors;
    if alpha == 0.0 || eta1 == 0.0 || eta2 == 0.0 {
        return Ok(0.0);
    }
    let log_prior_ratio = (eta1 / eta2).ln();
    let integrand = |x: f64| {
        let p = eta1 * quadrature_likelihood(x, alpha) + eta2 * quadrature_likelihood(x, -alpha);
        // posterior of |α⟩ as a logistic function of the log-likelihood ratio
        let llr = log_prior_ratio + 8.0 * alpha * x;
        let post = 1.0 / (1.0 + (-llr).exp());
        let h = if post <= 0.0 || post >= 1.0 {
            0.0
        } else {
            -post * post.log2() - (1.0 - post) * (1.0 - post).log2()
        };
        p * h
    };
    let half = alpha + 8.0;
    let conditional = adaptive_simpson(integrand, -half, half, cfg)?;
    let prior_entropy = linalg::spectrum_entropy(&priors);
    Ok((prior_entropy - conditional).max(0.0))
}

/// Homodyne detection keeping every quadrature value as an outcome.
///
/// Error probabilities are those of the maximum-a-posteriori threshold, which
/// is the sign decision for equal priors.
pub fn homodyne_soft(sc: &BinaryCoherentScenario, cfg: &QuadConfig) -> Result<ReceiverResult> {
    let info = homodyne_soft_information(sc.alpha, sc.priors, cfg)?;
    let breakdown = sc.breakdown(info, info)?;
    let [eta1, eta2] = sc.priors;
    let threshold = if eta1 > 0.0 && eta2 > 0.0 {
        (eta2 / eta1).ln() / (8.0 * sc.alpha)
    } else {
        0.0
    };
    let r1 = 1.0 - gaussian_cdf_above(sc.alpha, threshold);
    let r2 = gaussian_cdf_above(-sc.alpha, threshold);
    Ok(ReceiverResult::new(breakdown, (r1, r2), sc.priors))
}

/// Π₁ = ∫₀^∞ |x⟩⟨x| dx and Π₂ = 1 − Π₁ on the truncated Fock space.
///
/// Matrix elements are integrals of products of Hermite functions, evaluated
/// with a fine composite Simpson rule.
pub fn homodyne_hard_povm(n_max: usize) -> Result<Povm> {
    let dim = n_max + 1;
    let upper = (2.0 * n_max as f64 + 1.0).sqrt() + 12.0;
    let intervals = 40_000;
    let h = upper / intervals as f64;
    let mut pi1 = DMatrix::<f64>::zeros(dim, dim);
    let mut phi = vec![0.0; dim];
    for i in 0..=intervals {
        let y = h * i as f64;
        hermite_functions(y, &mut phi);
        let w = if i == 0 || i == intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        } * h
            / 3.0;
        for m in 0..dim {
            let wm = w * phi[m];
            for n in m..dim {
                pi1[(m, n)] += wm * phi[n];
            }
        }
    }
    let pi1 = DMatrix::from_fn(dim, dim, |m, n| {
        let v = if m <= n { pi1[(m, n)] } else { pi1[(n, m)] };
        C64::new(v, 0.0)
    });
    let pi2 = DMatrix::<C64>::identity(dim, dim) - &pi1;
    Povm::new(vec![Operator::new(pi1), Operator::new(pi2)])
}

/// Orthonormal Hermite functions φ₀(y) … φ_N(y) via the stable three-term recurrence.
fn hermite_functions(y: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = PI.powf(-0.25) * (-0.5 * y * y).exp();
    if out.len() > 1 {
        out[1] = SQRT_2 * y * out[0];
    }
    for n in 1..out.len() - 1 {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * y * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
}

/// Displacement used ahead of photon counting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaChoice {
    Fixed(C64),
    /// β = α, the Kennedy point.
    Kennedy,
    /// β minimizing the on/off decision error.
    MinError,
}

impl FromStr for BetaChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kennedy" | "alpha" => Ok(BetaChoice::Kennedy),
            "opt" | "min-error" | "optimal" => Ok(BetaChoice::MinError),
            other => other
                .parse::<f64>()
                .map(|b| BetaChoice::Fixed(C64::new(b, 0.0)))
                .map_err(|_| {
                    Error::InvalidArgument(format!(
                        "beta must be a number, 'kennedy' or 'opt', got '{s}'"
                    ))
                }),
        }
    }
}

impl fmt::Display for BetaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaChoice::Fixed(b) if b.im == 0.0 => write!(f, "{}", b.re),
            BetaChoice::Fixed(b) => write!(f, "{b}"),
            BetaChoice::Kennedy => f.write_str("kennedy"),
            BetaChoice::MinError => f.write_str("opt"),
        }
    }
}

/// Photon-number detection mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    /// Click / no-click.
    Hard,
    /// Every photon number is an outcome.
    Soft,
}

fn pnrd_hard_error(alpha: f64, beta: C64) -> (f64, f64) {
    let a = C64::new(alpha, 0.0);
    let r1 = (-(a + beta).norm_sqr()).exp();
    let r2 = 1.0 - (-(beta - a).norm_sqr()).exp();
    (r1, r2)
}

/// Displacement minimizing η₁ r₁ + η₂ r₂ for on/off detection, searched over real β ∈ [0, α + 4].
pub fn min_error_beta(sc: &BinaryCoherentScenario) -> Result<f64> {
    let [eta1, eta2] = sc.priors;
    let alpha = sc.alpha;
    let cost = |b: f64| {
        let (r1, r2) = pnrd_hard_error(alpha, C64::new(b, 0.0));
        eta1 * r1 + eta2 * r2
    };
    minimize_scalar(cost, 0.0, alpha + 4.0, SCAN_POINTS, RESTARTS, 1e-12).map(|(b, _)| b)
}

fn resolve_beta(sc: &BinaryCoherentScenario, beta: BetaChoice) -> Result<C64> {
    Ok(match beta {
        BetaChoice::Fixed(b) => b,
        BetaChoice::Kennedy => C64::new(sc.alpha, 0.0),
        BetaChoice::MinError => C64::new(min_error_beta(sc)?, 0.0),
    })
}

/// Photon-count distributions of the two displaced signals, tail lumped into a last outcome.
fn poisson_table(means: [f64; 2], priors: [f64; 2]) -> JointTable {
    let mut pmf = [vec![(-means[0]).exp()], vec![(-means[1]).exp()]];
    let mut cum = [pmf[0][0], pmf[1][0]];
    let target = 1.0 - 1e-12;
    let mut n = 0usize;
    while (cum[0] <= target || cum[1] <= target) && n < 100_000 {
        n += 1;
        for s in 0..2 {
            let p = pmf[s][n - 1] * means[s] / n as f64;
            pmf[s].push(p);
            cum[s] += p;
        }
    }
    let cols = n + 2;
    let mut t = DMatrix::<f64>::zeros(2, cols);
    for s in 0..2 {
        for (k, &p) in pmf[s].iter().enumerate() {
            t[(s, k)] = priors[s] * p;
        }
        t[(s, cols - 1)] = priors[s] * (1.0 - cum[s]).max(0.0);
    }
    JointTable::from_matrix(t)
}

/// Displacement D(β) followed by photon counting.
pub fn pnrd_receiver(sc: &BinaryCoherentScenario, beta: BetaChoice, mode: Detection) -> Result<ReceiverResult> {
    let beta = resolve_beta(sc, beta)?;
    let (info, errs) = match mode {
        Detection::Hard => {
            let (r1, r2) = pnrd_hard_error(sc.alpha, beta);
            (two_element_mutual_info(r1, r2, sc.priors)?, (r1, r2))
        }
        Detection::Soft => {
            let a = C64::new(sc.alpha, 0.0);
            let table = poisson_table([(a + beta).norm_sqr(), (beta - a).norm_sqr()], sc.priors);
            let info = table_mutual_information(&table);
            // maximum-a-posteriori decision per photon number
            let p = table.matrix();
            let (mut e1, mut e2) = (0.0, 0.0);
            for k in 0..p.ncols() {
                if p[(0, k)] >= p[(1, k)] {
                    e2 += p[(1, k)];
                } else {
                    e1 += p[(0, k)];
                }
            }
            let r1 = if sc.priors[0] > 0.0 { e1 / sc.priors[0] } else { 0.0 };
            let r2 = if sc.priors[1] > 0.0 { e2 / sc.priors[1] } else { 0.0 };
            (info, (r1, r2))
        }
    };
    let mut res = ReceiverResult::new(sc.breakdown(info, info)?, errs, sc.priors);
    res.beta = Some(beta);
    Ok(res)
}

/// On/off detection on the truncated space: Π₁ = 1 − |0⟩⟨0| (click), Π₂ = |0⟩⟨0|.
pub fn pnrd_hard_instrument(n_max: usize) -> Instrument {
    let dim = n_max + 1;
    let mut vac = DMatrix::<C64>::zeros(dim, dim);
    vac[(0, 0)] = C64::new(1.0, 0.0);
    let click = DMatrix::<C64>::identity(dim, dim) - &vac;
    Instrument::new(vec![vec![Operator::new(click)], vec![Operator::new(vac)]], true)
        .expect("projectors are complete")
}

/// Instrument realized by coupling to a qubit ancilla through `u` and measuring
/// the ancilla in `ancilla_basis`.
///
/// `u` acts on field ⊗ qubit with the qubit as the fast index. Kraus operator k
/// is (1 ⊗ ⟨b_k|) U (1 ⊗ |i⟩).
pub fn neumark_instrument(u: &Operator, ancilla_init: [C64; 2], ancilla_basis: [[C64; 2]; 2]) -> Result<Instrument> {
    if !u.is_square() || !u.dim().is_multiple_of(2) {
        return Err(Error::InvalidArgument("coupling must be square on field ⊗ qubit".into()));
    }
    let dev = u.unitarity_deviation(None);
    if dev > Tolerances::default().unit {
        return Err(Error::NonUnitary { deviation: dev });
    }
    let norm = |v: &[C64; 2]| v[0].norm_sqr() + v[1].norm_sqr();
    let inner = |a: &[C64; 2], b: &[C64; 2]| a[0].conj() * b[0] + a[1].conj() * b[1];
    if (norm(&ancilla_init) - 1.0).abs() > 1e-12
        || ancilla_basis.iter().any(|b| (norm(b) - 1.0).abs() > 1e-12)
        || inner(&ancilla_basis[0], &ancilla_basis[1]).norm() > 1e-12
    {
        return Err(Error::InvalidArgument("ancilla states must be orthonormal".into()));
    }
    let field = u.dim() / 2;
    let m = u.matrix();
    let groups = ancilla_basis
        .iter()
        .map(|b| {
            let a = DMatrix::from_fn(field, field, |row, col| {
                let mut acc = C64::new(0.0, 0.0);
                for qo in 0..2 {
                    for qi in 0..2 {
                        acc += b[qo].conj() * m[(2 * row + qo, 2 * col + qi)] * ancilla_init[qi];
                    }
                }
                acc
            });
            vec![Operator::new(a)]
        })
        .collect();
    Instrument::new(groups, false)
}

pub const GROUND: [C64; 2] = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
pub const EXCITED: [C64; 2] = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];

/// {(|g⟩ − i|e⟩)/√2, (|g⟩ + i|e⟩)/√2}.
pub fn superposition_basis() -> [[C64; 2]; 2] {
    [
        [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, -FRAC_1_SQRT_2)],
        [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, FRAC_1_SQRT_2)],
    ]
}

/// (1 ⊗ ⟨b|) U_JC(θ) (1 ⊗ |g⟩) applied to a field vector without forming U.
///
/// U|n⟩|g⟩ = cos(θ√n)|n⟩|g⟩ − i sin(θ√n)|n−1⟩|e⟩, which matches
/// [`jc_unitary`] exactly for a ground-state ancilla.
pub fn jc_ground_kraus_apply(theta: f64, bra: [C64; 2], psi: &DVector<C64>) -> DVector<C64> {
    let (bg, be) = (bra[0].conj(), bra[1].conj());
    let minus_i = C64::new(0.0, -1.0);
    let mut out = DVector::zeros(psi.len());
    for n in 0..psi.len() {
        let (s, c) = (theta * (n as f64).sqrt()).sin_cos();
        out[n] += bg * c * psi[n];
        if n >= 1 {
            out[n - 1] += be * minus_i * s * psi[n];
        }
    }
    out
}

/// Atomic interaction angle θ = g t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaChoice {
    Fixed(f64),
    Auto,
}

fn theta_upper(n_max: usize) -> f64 {
    PI * 8.0 / (n_max.max(1) as f64).sqrt()
}

fn pure_vectors(ens: &Ensemble) -> Vec<DVector<C64>> {
    ens.signals()
        .iter()
        .map(|s| match s {
            Signal::Pure(v) => v.amplitudes().clone(),
            Signal::Mixed(_) => unreachable!("single-Kraus branches of pure signals stay pure"),
        })
        .collect()
}

/// Joint table for a ground-state atom with angle θ measured in `basis`.
fn jc_table(theta: f64, basis: &[[C64; 2]; 2], vectors: &[DVector<C64>], priors: &[f64]) -> JointTable {
    let mut t = DMatrix::<f64>::zeros(vectors.len(), 2);
    for (j, v) in vectors.iter().enumerate() {
        for (k, b) in basis.iter().enumerate() {
            t[(j, k)] = priors[j] * jc_ground_kraus_apply(theta, *b, v).norm_squared();
        }
    }
    JointTable::from_matrix(t)
}

fn binary_errors(table: &JointTable, priors: [f64; 2]) -> (f64, f64) {
    let r1 = if priors[0] > 0.0 { table.get(0, 1) / priors[0] } else { 0.0 };
    let r2 = if priors[1] > 0.0 { table.get(1, 0) / priors[1] } else { 0.0 };
    (r1, r2)
}

/// Atom in |g⟩ coupled to the field, then projected on (|g⟩ ∓ i|e⟩)/√2.
///
/// With [`ThetaChoice::Auto`] the angle minimizes the average error.
pub fn atomic_receiver_optimal(sc: &BinaryCoherentScenario, theta: ThetaChoice) -> Result<ReceiverResult> {
    let n_max = sc.n_max_for(sc.mean_photons());
    let ens = sc.ensemble(n_max)?;
    let basis = superposition_basis();
    let theta = match theta {
        ThetaChoice::Fixed(t) => t,
        ThetaChoice::Auto => {
            let vecs = pure_vectors(&ens);
            let cost = |t: f64| {
                let table = jc_table(t, &basis, &vecs, ens.priors());
                let (r1, r2) = binary_errors(&table, sc.priors);
                sc.priors[0] * r1 + sc.priors[1] * r2
            };
            minimize_scalar(cost, 1e-4, theta_upper(n_max), SCAN_POINTS, RESTARTS, ANGLE_TOL)?.0
        }
    };
    let instr = neumark_instrument(&jc_unitary(theta, n_max), GROUND, basis)?;
    let table = outcome_probabilities(&ens, &induced_povm(&instr)?)?;
    let info = table_mutual_information(&table);
    let ip = i_prime_max(&ens, &instr, &AccessOracle::AutoWith(sc.optimizer))?;
    let errs = binary_errors(&table, sc.priors);
    let mut res = ReceiverResult::new(sc.breakdown(info, ip)?, errs, sc.priors);
    res.instrument = Some(instr);
    res.thetas = vec![theta];
    Ok(res)
}

/// Unambiguous identification of |α⟩ with one or two atoms.
///
/// The signals are displaced by D(α) to {|2α⟩, |0⟩}; all quantities are
/// computed in that frame, which leaves every information measure unchanged.
/// An atom found in |e⟩ proves the signal was |α⟩, since |0⟩|g⟩ does not
/// evolve. When the first atom stays in |g⟩ a second atom (if requested)
/// probes the post-measurement field; its angle maximizes the information it
/// adds. Stage 1 with [`ThetaChoice::Auto`] minimizes the average error.
pub fn atomic_receiver_unambiguous(
    sc: &BinaryCoherentScenario,
    stages: usize,
    thetas: &[ThetaChoice],
) -> Result<ReceiverResult> {
    if !(1..=2).contains(&stages) {
        return Err(Error::InvalidArgument(format!("stages must be 1 or 2, got {stages}")));
    }
    let choice = |i: usize| thetas.get(i).or(thetas.last()).copied().unwrap_or(ThetaChoice::Auto);
    let n_max = sc.n_max_for(4.0 * sc.mean_photons());
    let ens = Ensemble::pure(
        vec![sc.coherent(2.0 * sc.alpha, n_max)?, sc.coherent(0.0, n_max)?],
        sc.priors.to_vec(),
    )?;
    let basis = [EXCITED, GROUND];
    let upper = theta_upper(n_max);

    let theta1 = match choice(0) {
        ThetaChoice::Fixed(t) => t,
        ThetaChoice::Auto => {
            let vecs = pure_vectors(&ens);
            let cost = |t: f64| {
                let table = jc_table(t, &basis, &vecs, ens.priors());
                sc.priors[0] * binary_errors(&table, sc.priors).0
            };
            minimize_scalar(cost, 1e-4, upper, SCAN_POINTS, RESTARTS, ANGLE_TOL)?.0
        }
    };
    let first = neumark_instrument(&jc_unitary(theta1, n_max), GROUND, basis)?;
    let table1 = outcome_probabilities(&ens, &induced_povm(&first)?)?;
    let info1 = table_mutual_information(&table1);

    let (instr, thetas_used, stage_infos) = if stages == 1 {
        (first, vec![theta1], vec![info1])
    } else {
        let branch = post_measurement_branch(&ens, &first, 1)?;
        let theta2 = match choice(1) {
            ThetaChoice::Fixed(t) => t,
            ThetaChoice::Auto => {
                let vecs = pure_vectors(&branch.ensemble);
                let priors = branch.ensemble.priors().to_vec();
                let cost = |t: f64| -table_mutual_information(&jc_table(t, &basis, &vecs, &priors));
                minimize_scalar(cost, 1e-4, upper, SCAN_POINTS, RESTARTS, ANGLE_TOL)?.0
            }
        };
        let second = neumark_instrument(&jc_unitary(theta2, n_max), GROUND, basis)?;
        let groups = first.kraus_groups();
        let (a_e, a_g) = (&groups[0][0], &groups[1][0]);
        let next = second.kraus_groups();
        let composite = Instrument::new(
            vec![
                vec![a_e.clone()],
                vec![next[0][0].compose(a_g)],
                vec![next[1][0].compose(a_g)],
            ],
            false,
        )?;
        let table = outcome_probabilities(&ens, &induced_povm(&composite)?)?;
        let cumulative = table_mutual_information(&table);
        (composite, vec![theta1, theta2], vec![info1, cumulative])
    };

    let povm = induced_povm(&instr)?;
    let table = outcome_probabilities(&ens, &povm)?;
    let info = table_mutual_information(&table);
    let ip = i_prime_max(&ens, &instr, &AccessOracle::AutoWith(sc.optimizer))?;
    // Every outcome except the last (atom(s) in |g⟩) identifies |α⟩.
    let last = table.num_outcomes() - 1;
    let [eta1, eta2] = sc.priors;
    let r1 = if eta1 > 0.0 { table.get(0, last) / eta1 } else { 0.0 };
    let r2 = if eta2 > 0.0 { (0..last).map(|k| table.get(1, k)).sum::<f64>() / eta2 } else { 0.0 };
    let mut res = ReceiverResult::new(sc.breakdown(info, ip)?, (r1, r2), sc.priors);
    res.instrument = Some(instr);
    res.thetas = thetas_used;
    res.stage_infos = stage_infos;
    res.beta = Some(C64::new(sc.alpha, 0.0));
    Ok(res)
}

/// Receiver families available to sweeps and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    HomodyneHard,
    HomodyneSoft,
    PnrdHard,
    PnrdSoft,
    Kennedy,
    AtomicOptimal,
    AtomicUnambiguous,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Scheme::HomodyneHard,
        Scheme::HomodyneSoft,
        Scheme::PnrdHard,
        Scheme::PnrdSoft,
        Scheme::Kennedy,
        Scheme::AtomicOptimal,
        Scheme::AtomicUnambiguous,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::HomodyneHard => "homodyne-hard",
            Scheme::HomodyneSoft => "homodyne-soft",
            Scheme::PnrdHard => "pnrd-hard",
            Scheme::PnrdSoft => "pnrd-soft",
            Scheme::Kennedy => "kennedy",
            Scheme::AtomicOptimal => "atomic-optimal",
            Scheme::AtomicUnambiguous => "atomic-unambiguous",
        }
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(|s| s.name()).collect()
    }

    /// Whether the scheme uses an atomic interaction angle.
    pub fn is_atomic(self) -> bool {
        matches!(self, Scheme::AtomicOptimal | Scheme::AtomicUnambiguous)
    }

    /// Runs the receiver with the given parameters.
    pub fn run(self, sc: &BinaryCoherentScenario, params: &SchemeParams) -> Result<ReceiverResult> {
        match self {
            Scheme::HomodyneHard => homodyne_hard(sc),
            Scheme::HomodyneSoft => homodyne_soft(sc, &params.quad),
            Scheme::PnrdHard => pnrd_receiver(sc, params.beta, Detection::Hard),
            Scheme::PnrdSoft => pnrd_receiver(sc, params.beta, Detection::Soft),
            Scheme::Kennedy => pnrd_receiver(sc, BetaChoice::Kennedy, Detection::Hard),
            Scheme::AtomicOptimal => {
                atomic_receiver_optimal(sc, params.thetas.first().copied().unwrap_or(ThetaChoice::Auto))
            }
            Scheme::AtomicUnambiguous => atomic_receiver_unambiguous(sc, params.stages, &params.thetas),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown scheme '{s}'; valid schemes: {}",
                    Self::names().join(", ")
                ))
            })
    }
}

/// Receiver-specific knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeParams {
    pub beta: BetaChoice,
    pub stages: usize,
    pub thetas: Vec<ThetaChoice>,
    pub quad: QuadConfig,
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self {
            beta: BetaChoice::MinError,
            stages: 1,
            thetas: vec![ThetaChoice::Auto],
            quad: QuadConfig::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn scenario_overlap_matches_truncated_states() {
        for a2 in [0.05, 0.4, 1.0, 3.0] {
            let sc = BinaryCoherentScenario::from_mean_photons(a2, 0.5).unwrap();
            let ens = sc.ensemble(sc.n_max_for(a2)).unwrap();
            let (ov, _) = ens.binary_pure(1e-10).unwrap();
            assert_abs_diff_eq!(ov, sc.overlap_sq(), epsilon = 1e-8);
        }
    }

    #[test]
    fn holevo_matches_truncated_ensemble() {
        let sc = BinaryCoherentScenario::from_mean_photons(0.4, 0.3).unwrap();
        let ens = sc.ensemble(sc.n_max_for(0.4)).unwrap();
        assert_abs_diff_eq!(sc.holevo(), crate::info::holevo_quantity(&ens), epsilon = 1e-9);
        assert!(sc.accessible_info().unwrap() <= sc.holevo());
    }

    #[test]
    fn complex_amplitude_is_rotated() {
        let sc = BinaryCoherentScenario::new(C64::new(0.0, -0.8), [0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(sc.alpha(), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn zero_amplitude_is_rejected_by_every_receiver() {
        let sc = BinaryCoherentScenario::from_mean_photons(0.0, 0.5).unwrap();
        let params = SchemeParams::default();
        for s in Scheme::ALL {
            assert!(
                matches!(s.run(&sc, &params), Err(Error::ZeroAccessibleInfo { .. })),
                "{s}"
            );
        }
    }

    #[test]
    fn homodyne_soft_vanishes_without_signal() {
        assert_eq!(
            homodyne_soft_information(0.0, [0.5, 0.5], &QuadConfig::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn kennedy_error_probabilities() {
        let sc = BinaryCoherentScenario::from_mean_photons(0.3, 0.5).unwrap();
        let res = pnrd_receiver(&sc, BetaChoice::Kennedy, Detection::Hard).unwrap();
        assert_abs_diff_eq!(res.error_probs.0, (-1.2_f64).exp(), epsilon = 1e-15);
        assert_eq!(res.error_probs.1, 0.0);
    }

    #[test]
    fn undisplaced_counting_errors() {
        let sc = BinaryCoherentScenario::from_mean_photons(0.3, 0.5).unwrap();
        let (r1, r2) = pnrd_hard_error(sc.alpha(), C64::new(0.0, 0.0));
        assert_abs_diff_eq!(r1, (-0.3_f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(r2, 1.0 - (-0.3_f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn beta_parsing() {
        assert_eq!("kennedy".parse::<BetaChoice>().unwrap(), BetaChoice::Kennedy);
        assert_eq!("opt".parse::<BetaChoice>().unwrap(), BetaChoice::MinError);
        assert_eq!(
            "0.25".parse::<BetaChoice>().unwrap(),
            BetaChoice::Fixed(C64::new(0.25, 0.0))
        );
        assert!("sideways".parse::<BetaChoice>().is_err());
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        let err = "heterodyne".parse::<Scheme>().unwrap_err().to_string();
        assert!(err.contains("homodyne-hard") && err.contains("atomic-unambiguous"));
    }

    #[test]
    fn fast_jc_kraus_matches_dilation() {
        let n_max = 12;
        let theta = 0.83;
        let instr = neumark_instrument(&jc_unitary(theta, n_max), GROUND, superposition_basis()).unwrap();
        let psi = coherent_state_with_tol(C64::new(0.9, 0.0), n_max, 1e-3).unwrap();
        for (k, b) in superposition_basis().iter().enumerate() {
            let fast = jc_ground_kraus_apply(theta, *b, psi.amplitudes());
            let slow = instr.kraus_groups()[k][0].apply(&psi);
            assert!((fast - slow.amplitudes()).norm() < 1e-14);
        }
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let n = 8;
        let mut acc = DMatrix::<f64>::zeros(n, n);
        let mut phi = vec![0.0; n];
        let h = 1e-3;
        for i in -12_000..=12_000 {
            hermite_functions(i as f64 * h, &mut phi);
            for a in 0..n {
                for b in 0..n {
                    acc[(a, b)] += h * phi[a] * phi[b];
                }
            }
        }
        assert!((acc - DMatrix::identity(n, n)).amax() < 1e-10);
    }
}
