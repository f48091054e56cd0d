//! Signal ensembles, POVMs, Kraus instruments and their outcome statistics.
//!
//! Pure signals stay as vectors and are only promoted to density matrices
//! when a mixed result is unavoidable (several Kraus operators per outcome).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{Operator, StateVector, C64};
use crate::linalg;

/// Slack on Σ η_j = 1.
pub const PRIOR_TOL: f64 = 1e-12;
/// Slack on state trace, Hermiticity and the PSD eigenvalue floor.
pub const STATE_TOL: f64 = 1e-10;
/// Slack on Σ_k Π_k = 1.
pub const POVM_TOL: f64 = 1e-8;
/// Outcome probabilities at or below this are treated as zero.
pub const OUTCOME_EPS: f64 = 1e-14;

/// A validated density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<C64>,
}

impl DensityOperator {
    /// Checks Hermiticity, positivity and unit trace, then stores the Hermitian part.
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidEnsemble("density matrix must be square".into()));
        }
        if linalg::hermiticity_defect(&matrix) > STATE_TOL {
            return Err(Error::InvalidEnsemble("density matrix is not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidEnsemble(format!(
                "density matrix trace {tr} is not 1"
            )));
        }
        let matrix = linalg::hermitian_part(&matrix);
        let min_eig = linalg::hermitian_eigenvalues(&matrix)
            .first()
            .copied()
            .unwrap_or(0.0);
        if min_eig < -STATE_TOL {
            return Err(Error::InvalidEnsemble(format!(
                "density matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        Self {
            matrix: psi.projector(),
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// tr ρ².
    pub fn purity(&self) -> f64 {
        linalg::trace_product(&self.matrix, &self.matrix).re
    }

    pub fn entropy(&self) -> f64 {
        linalg::von_neumann_entropy(&self.matrix)
    }
}

/// One member of an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub enum Signal {
    Pure(StateVector),
    Mixed(DensityOperator),
}

impl Signal {
    pub fn dim(&self) -> usize {
        match self {
            Signal::Pure(v) => v.dim(),
            Signal::Mixed(r) => r.dim(),
        }
    }

    pub fn density(&self) -> DMatrix<C64> {
        match self {
            Signal::Pure(v) => v.projector(),
            Signal::Mixed(r) => r.matrix().clone(),
        }
    }

    /// tr(M ρ) for a Hermitian `m`.
    pub fn expectation(&self, m: &DMatrix<C64>) -> f64 {
        match self {
            Signal::Pure(v) => v.amplitudes().dotc(&(m * v.amplitudes())).re,
            Signal::Mixed(r) => linalg::trace_product(m, r.matrix()).re,
        }
    }

    pub fn purity(&self) -> f64 {
        match self {
            Signal::Pure(v) => v.norm_sqr().powi(2),
            Signal::Mixed(r) => r.purity(),
        }
    }

    pub fn entropy(&self) -> f64 {
        match self {
            Signal::Pure(_) => 0.0,
            Signal::Mixed(r) => r.entropy(),
        }
    }

    /// The state vector if this signal is pure (tr ρ² = 1 within `tol`).
    pub fn as_pure(&self, tol: f64) -> Option<StateVector> {
        match self {
            Signal::Pure(v) => Some(v.clone()),
            Signal::Mixed(r) => {
                if (r.purity() - 1.0).abs() > tol {
                    return None;
                }
                let (_, vectors) = linalg::hermitian_eigen(r.matrix());
                let top = vectors.column(vectors.ncols() - 1).into_owned();
                Some(StateVector::new(top))
            }
        }
    }
}

impl From<StateVector> for Signal {
    fn from(v: StateVector) -> Self {
        Signal::Pure(v)
    }
}

impl From<DensityOperator> for Signal {
    fn from(r: DensityOperator) -> Self {
        Signal::Mixed(r)
    }
}

/// Signal states with their prior probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    signals: Vec<Signal>,
    priors: Vec<f64>,
}

impl Ensemble {
    pub fn new(signals: Vec<Signal>, priors: Vec<f64>) -> Result<Self> {
        if signals.is_empty() {
            return Err(Error::InvalidEnsemble("ensemble is empty".into()));
        }
        if signals.len() != priors.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} signals but {} priors",
                signals.len(),
                priors.len()
            )));
        }
        if priors.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidEnsemble("priors must be nonnegative".into()));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > PRIOR_TOL {
            return Err(Error::InvalidEnsemble(format!("priors sum to {total}")));
        }
        let dim = signals[0].dim();
        for s in &signals {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
            if let Signal::Pure(v) = s {
                if (v.norm_sqr() - 1.0).abs() > STATE_TOL {
                    return Err(Error::InvalidEnsemble(format!(
                        "pure signal has squared norm {}",
                        v.norm_sqr()
                    )));
                }
            }
        }
        Ok(Self { signals, priors })
    }

    pub fn pure(states: Vec<StateVector>, priors: Vec<f64>) -> Result<Self> {
        Self::new(states.into_iter().map(Signal::Pure).collect(), priors)
    }

    pub fn signals(&self) -> &[Signal] {
        &self.signals
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.signals[0].dim()
    }

    /// H(ℰ) in bits.
    pub fn prior_entropy(&self) -> f64 {
        self.priors
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.log2())
            .sum()
    }

    /// Gram matrix √(η_i η_j) ⟨ψ_i|ψ_j⟩ when every signal is pure.
    ///
    /// Its nonzero spectrum equals that of the statistical operator.
    pub fn weighted_gram(&self) -> Option<DMatrix<C64>> {
        let vecs: Vec<&StateVector> = self
            .signals
            .iter()
            .map(|s| match s {
                Signal::Pure(v) => Some(v),
                Signal::Mixed(_) => None,
            })
            .collect::<Option<_>>()?;
        let n = vecs.len();
        Some(DMatrix::from_fn(n, n, |i, j| {
            vecs[i].inner(vecs[j]) * (self.priors[i] * self.priors[j]).sqrt()
        }))
    }

    /// Overlap |⟨ψ₁|ψ₂⟩|² and priors when this is an ensemble of two pure states.
    pub fn binary_pure(&self, purity_tol: f64) -> Option<(f64, [f64; 2])> {
        if self.len() != 2 {
            return None;
        }
        let a = self.signals[0].as_pure(purity_tol)?;
        let b = self.signals[1].as_pure(purity_tol)?;
        let ov = a.inner(&b).norm_sqr() / (a.norm_sqr() * b.norm_sqr());
        Some((ov.min(1.0), [self.priors[0], self.priors[1]]))
    }
}

/// Positive operator-valued measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<Operator>,
}

impl Povm {
    pub fn new(elements: Vec<Operator>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        let dim = elements[0].dim();
        let mut sum = DMatrix::<C64>::zeros(dim, dim);
        for (k, e) in elements.iter().enumerate() {
            if !e.is_square() || e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.ncols(),
                });
            }
            if linalg::hermiticity_defect(e.matrix()) > POVM_TOL {
                return Err(Error::InvalidPovm(format!("element {k} is not Hermitian")));
            }
            let min_eig = linalg::hermitian_eigenvalues(e.matrix())[0];
            if min_eig < -STATE_TOL {
                return Err(Error::InvalidPovm(format!(
                    "element {k} has negative eigenvalue {min_eig:.3e}"
                )));
            }
            sum += e.matrix();
        }
        let dev = linalg::identity_defect(&sum);
        if dev > POVM_TOL {
            return Err(Error::InvalidPovm(format!(
                "elements sum to identity only within {dev:.3e}"
            )));
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }
}

/// A measurement with explicit Kraus operators, grouped by outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    kraus_groups: Vec<Vec<Operator>>,
    destructive: bool,
}

impl Instrument {
    /// Fails with [`Error::IncompleteInstrument`] if the induced POVM is not complete.
    pub fn new(kraus_groups: Vec<Vec<Operator>>, destructive: bool) -> Result<Self> {
        let instr = Self {
            kraus_groups,
            destructive,
        };
        induced_povm(&instr)?;
        Ok(instr)
    }

    /// The do-nothing instrument with a single outcome.
    pub fn identity(dim: usize) -> Self {
        Self {
            kraus_groups: vec![vec![Operator::identity(dim)]],
            destructive: false,
        }
    }

    /// Lüders instrument of a POVM: one Kraus operator √Π_k per outcome.
    pub fn luders(povm: &Povm, destructive: bool) -> Self {
        Self {
            kraus_groups: povm
                .elements()
                .iter()
                .map(|e| vec![Operator::new(linalg::psd_sqrt(e.matrix()))])
                .collect(),
            destructive,
        }
    }

    pub fn kraus_groups(&self) -> &[Vec<Operator>] {
        &self.kraus_groups
    }

    pub fn is_destructive(&self) -> bool {
        self.destructive
    }

    pub fn num_outcomes(&self) -> usize {
        self.kraus_groups.len()
    }

    pub fn input_dim(&self) -> usize {
        self.kraus_groups[0][0].ncols()
    }

    /// Runs `self` and then `next` on every outcome of `self` (row-major outcome order).
    pub fn then(&self, next: &Instrument) -> Result<Instrument> {
        let mut groups = Vec::with_capacity(self.num_outcomes() * next.num_outcomes());
        for first in &self.kraus_groups {
            for second in &next.kraus_groups {
                let mut g = Vec::with_capacity(first.len() * second.len());
                for a in first {
                    for b in second {
                        if b.ncols() != a.dim() {
                            return Err(Error::DimensionMismatch {
                                expected: a.dim(),
                                found: b.ncols(),
                            });
                        }
                        g.push(b.compose(a));
                    }
                }
                groups.push(g);
            }
        }
        Instrument::new(groups, self.destructive || next.destructive)
    }
}

/// Π_k = Σ_ℓ A†_kℓ A_kℓ, checked for completeness.
pub fn induced_povm(instr: &Instrument) -> Result<Povm> {
    if instr.kraus_groups.is_empty() || instr.kraus_groups.iter().any(|g| g.is_empty()) {
        return Err(Error::InvalidArgument("instrument has an empty Kraus group".into()));
    }
    let dim = instr.input_dim();
    let mut elements = Vec::with_capacity(instr.kraus_groups.len());
    let mut sum = DMatrix::<C64>::zeros(dim, dim);
    for group in &instr.kraus_groups {
        let mut pi = DMatrix::<C64>::zeros(dim, dim);
        for a in group {
            if a.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: a.ncols(),
                });
            }
            pi += a.matrix().adjoint() * a.matrix();
        }
        let pi = linalg::hermitian_part(&pi);
        sum += &pi;
        elements.push(Operator::new(pi));
    }
    let dev = linalg::identity_defect(&sum);
    if dev > POVM_TOL {
        return Err(Error::IncompleteInstrument { deviation: dev });
    }
    Povm::new(elements)
}

/// Joint distribution P(j, k) = η_j tr(Π_k ρ_j); rows are signals, columns outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    p: DMatrix<f64>,
}

impl JointTable {
    pub fn from_matrix(p: DMatrix<f64>) -> Self {
        Self { p }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.p[(j, k)]
    }

    pub fn num_signals(&self) -> usize {
        self.p.nrows()
    }

    pub fn num_outcomes(&self) -> usize {
        self.p.ncols()
    }

    /// Σ_k P(j, k), which reproduces the priors.
    pub fn signal_marginals(&self) -> Vec<f64> {
        self.p.row_iter().map(|r| r.sum()).collect()
    }

    /// Σ_j P(j, k) = tr(Π_k ρ).
    pub fn outcome_marginals(&self) -> Vec<f64> {
        self.p.column_iter().map(|c| c.sum()).collect()
    }
}

pub fn outcome_probabilities(ens: &Ensemble, povm: &Povm) -> Result<JointTable> {
    if ens.dim() != povm.dim() {
        return Err(Error::DimensionMismatch {
            expected: ens.dim(),
            found: povm.dim(),
        });
    }
    let p = DMatrix::from_fn(ens.len(), povm.len(), |j, k| {
        let v = ens.priors[j] * ens.signals[j].expectation(povm.elements[k].matrix());
        v.max(0.0)
    });
    Ok(JointTable { p })
}

/// ρ = Σ_j η_j ρ_j.
pub fn statistical_operator(ens: &Ensemble) -> DensityOperator {
    let dim = ens.dim();
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    for (s, &eta) in ens.signals.iter().zip(&ens.priors) {
        if eta > 0.0 {
            rho += s.density().scale(eta);
        }
    }
    DensityOperator {
        matrix: linalg::hermitian_part(&rho),
    }
}

/// Outcome-conditioned ensemble together with bookkeeping about the branch.
#[derive(Debug, Clone, PartialEq)]
pub struct PostMeasurement {
    pub ensemble: Ensemble,
    /// tr(Π_k ρ).
    pub probability: f64,
    /// Indices into the input ensemble of the signals that survive outcome k.
    pub kept: Vec<usize>,
}

/// The normalized post-measurement ensemble ℰ⁽ᵏ⁾ and its probability.
///
/// Signals with tr(Π_k ρ_j) ≤ [`OUTCOME_EPS`] cannot occur given outcome k and
/// are dropped.
pub fn post_measurement_branch(
    ens: &Ensemble,
    instr: &Instrument,
    k: usize,
) -> Result<PostMeasurement> {
    if instr.destructive {
        return Err(Error::DestructiveMeasurement);
    }
    let group = instr
        .kraus_groups
        .get(k)
        .ok_or_else(|| Error::InvalidArgument(format!("outcome {k} out of range")))?;
    if instr.input_dim() != ens.dim() {
        return Err(Error::DimensionMismatch {
            expected: ens.dim(),
            found: instr.input_dim(),
        });
    }

    let mut signals = Vec::new();
    let mut weights = Vec::new();
    let mut kept = Vec::new();
    for (j, (sig, &eta)) in ens.signals.iter().zip(&ens.priors).enumerate() {
        if eta <= 0.0 {
            continue;
        }
        let post = match (sig, group.as_slice()) {
            (Signal::Pure(psi), [a]) => {
                let out = a.apply(psi);
                let p = out.norm_sqr();
                (p > OUTCOME_EPS).then(|| (Signal::Pure(StateVector::new(out.amplitudes().unscale(p.sqrt()))), p))
            }
            _ => {
                let rho = sig.density();
                let out_dim = group[0].dim();
                let mut acc = DMatrix::<C64>::zeros(out_dim, out_dim);
                for a in group {
                    acc += a.matrix() * &rho * a.matrix().adjoint();
                }
                let p = acc.trace().re;
                if p > OUTCOME_EPS {
                    let m = linalg::hermitian_part(&acc.unscale(p));
                    Some((Signal::Mixed(DensityOperator::new(m)?), p))
                } else {
                    None
                }
            }
        };
        if let Some((s, p)) = post {
            signals.push(s);
            weights.push(eta * p);
            kept.push(j);
        }
    }
    let total: f64 = weights.iter().sum();
    if total <= OUTCOME_EPS {
        return Err(Error::ZeroProbabilityOutcome {
            outcome: k,
            probability: total,
        });
    }
    let priors = weights.iter().map(|w| w / total).collect();
    Ok(PostMeasurement {
        ensemble: Ensemble::new(signals, priors)?,
        probability: total,
        kept,
    })
}

/// ℰ⁽ᵏ⁾: post-measurement states ρ_j⁽ᵏ⁾ and updated priors η_j⁽ᵏ⁾.
pub fn post_measurement_ensemble(ens: &Ensemble, instr: &Instrument, k: usize) -> Result<Ensemble> {
    post_measurement_branch(ens, instr, k).map(|b| b.ensemble)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::coherent_state;
    use approx::assert_abs_diff_eq;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn basis(n: usize, dim: usize) -> StateVector {
        StateVector::fock(n, dim - 1).unwrap()
    }

    fn proj(n: usize, dim: usize) -> Operator {
        Operator::new(basis(n, dim).projector())
    }

    #[test]
    fn rejects_bad_priors() {
        let s = vec![basis(0, 2), basis(1, 2)];
        assert!(Ensemble::pure(s.clone(), vec![0.6, 0.6]).is_err());
        assert!(Ensemble::pure(s.clone(), vec![-0.1, 1.1]).is_err());
        assert!(Ensemble::pure(s, vec![1.0]).is_err());
    }

    #[test]
    fn rejects_non_density_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(DensityOperator::new(m).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.3), c(0.0), c(0.5)]);
        assert!(DensityOperator::new(m).is_err());
    }

    #[test]
    fn single_identity_group_gives_identity_povm() {
        let povm = induced_povm(&Instrument::identity(3)).unwrap();
        assert_eq!(povm.len(), 1);
        assert_eq!(povm.elements()[0].matrix(), &DMatrix::identity(3, 3));
    }

    #[test]
    fn projective_groups_induce_themselves() {
        let p0 = proj(0, 3);
        let rest = Operator::new(DMatrix::identity(3, 3) - p0.matrix());
        let instr = Instrument::new(vec![vec![p0.clone()], vec![rest.clone()]], false).unwrap();
        let povm = induced_povm(&instr).unwrap();
        assert!(crate::linalg::max_abs((povm.elements()[0].matrix() - p0.matrix()).iter()) < 1e-15);
        assert!(crate::linalg::max_abs((povm.elements()[1].matrix() - rest.matrix()).iter()) < 1e-15);
    }

    #[test]
    fn incomplete_instrument_is_rejected() {
        let err = Instrument::new(vec![vec![proj(0, 3)]], false).unwrap_err();
        assert!(matches!(err, Error::IncompleteInstrument { .. }));
    }

    #[test]
    fn orthogonal_states_give_diagonal_table() {
        let ens = Ensemble::pure(vec![basis(0, 2), basis(1, 2)], vec![0.5, 0.5]).unwrap();
        let povm = Povm::new(vec![proj(0, 2), proj(1, 2)]).unwrap();
        let t = outcome_probabilities(&ens, &povm).unwrap();
        assert_eq!(t.get(0, 0), 0.5);
        assert_eq!(t.get(1, 1), 0.5);
        assert_eq!(t.get(0, 1), 0.0);
        assert_eq!(t.get(1, 0), 0.0);
    }

    #[test]
    fn trivial_povm_reproduces_priors() {
        let a = coherent_state(c(0.7), 30).unwrap();
        let b = coherent_state(c(-0.7), 30).unwrap();
        let ens = Ensemble::pure(vec![a, b], vec![0.3, 0.7]).unwrap();
        let povm = Povm::new(vec![Operator::identity(31)]).unwrap();
        let t = outcome_probabilities(&ens, &povm).unwrap();
        assert_abs_diff_eq!(t.get(0, 0), 0.3, epsilon = 1e-10);
        assert_abs_diff_eq!(t.get(1, 0), 0.7, epsilon = 1e-10);
    }

    #[test]
    fn vacuum_probability_of_coherent_signal() {
        let n_max = 30;
        let a = coherent_state(c(0.5), n_max).unwrap();
        let b = coherent_state(c(-0.5), n_max).unwrap();
        let ens = Ensemble::pure(vec![a, b], vec![0.5, 0.5]).unwrap();
        let p0 = proj(0, n_max + 1);
        let rest = Operator::new(DMatrix::identity(n_max + 1, n_max + 1) - p0.matrix());
        let povm = Povm::new(vec![p0, rest]).unwrap();
        let t = outcome_probabilities(&ens, &povm).unwrap();
        assert_abs_diff_eq!(t.get(0, 0), 0.5 * (-0.25_f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(t.get(1, 0), 0.5 * (-0.25_f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let ens = Ensemble::pure(vec![basis(0, 2)], vec![1.0]).unwrap();
        let povm = Povm::new(vec![Operator::identity(3)]).unwrap();
        assert!(matches!(
            outcome_probabilities(&ens, &povm),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn identity_instrument_leaves_ensemble_unchanged() {
        let a = coherent_state(c(0.4), 20).unwrap();
        let b = coherent_state(c(-0.4), 20).unwrap();
        let ens = Ensemble::pure(vec![a, b], vec![0.25, 0.75]).unwrap();
        let post = post_measurement_ensemble(&ens, &Instrument::identity(21), 0).unwrap();
        for (x, y) in post.signals().iter().zip(ens.signals()) {
            assert!(crate::linalg::max_abs((x.density() - y.density()).iter()) < 1e-10);
        }
        for (x, y) in post.priors().iter().zip(ens.priors()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-10);
        }
    }

    #[test]
    fn perfect_discrimination_collapses_priors() {
        let ens = Ensemble::pure(vec![basis(0, 3), basis(1, 3)], vec![0.4, 0.6]).unwrap();
        let p2 = proj(2, 3);
        let instr = Instrument::new(
            vec![vec![proj(0, 3)], vec![proj(1, 3)], vec![p2]],
            false,
        )
        .unwrap();
        let b = post_measurement_branch(&ens, &instr, 1).unwrap();
        assert_eq!(b.kept, vec![1]);
        assert_eq!(b.ensemble.priors(), &[1.0]);
        assert_abs_diff_eq!(b.probability, 0.6, epsilon = 1e-15);
        assert!(matches!(
            post_measurement_branch(&ens, &instr, 2),
            Err(Error::ZeroProbabilityOutcome { outcome: 2, .. })
        ));
    }

    #[test]
    fn destructive_instrument_has_no_post_state() {
        let ens = Ensemble::pure(vec![basis(0, 2)], vec![1.0]).unwrap();
        let povm = Povm::new(vec![proj(0, 2), proj(1, 2)]).unwrap();
        let instr = Instrument::luders(&povm, true);
        assert_eq!(
            post_measurement_ensemble(&ens, &instr, 0),
            Err(Error::DestructiveMeasurement)
        );
    }

    #[test]
    fn multi_kraus_outcome_yields_mixed_state() {
        // Completely dephasing a qubit in one outcome.
        let ens = Ensemble::pure(
            vec![StateVector::from_slice(&[c(0.6), c(0.8)])],
            vec![1.0],
        )
        .unwrap();
        let instr = Instrument::new(vec![vec![proj(0, 2), proj(1, 2)]], false).unwrap();
        let post = post_measurement_ensemble(&ens, &instr, 0).unwrap();
        match &post.signals()[0] {
            Signal::Mixed(r) => {
                assert_abs_diff_eq!(r.matrix()[(0, 0)].re, 0.36, epsilon = 1e-15);
                assert_abs_diff_eq!(r.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-15);
                assert!(r.purity() < 1.0);
            }
            Signal::Pure(_) => panic!("expected a mixed state"),
        }
    }

    #[test]
    fn statistical_operator_examples() {
        let one = Ensemble::pure(vec![basis(1, 3)], vec![1.0]).unwrap();
        assert_eq!(statistical_operator(&one).matrix(), &basis(1, 3).projector());

        let two = Ensemble::pure(vec![basis(0, 2), basis(1, 2)], vec![0.5, 0.5]).unwrap();
        let rho = statistical_operator(&two);
        assert_eq!(rho.matrix(), &DMatrix::<C64>::identity(2, 2).scale(0.5));
    }

    #[test]
    fn coherent_mixture_spectrum() {
        let n_max = 30;
        let a = coherent_state(c(1.0), n_max).unwrap();
        let b = coherent_state(c(-1.0), n_max).unwrap();
        let ens = Ensemble::pure(vec![a, b], vec![0.5, 0.5]).unwrap();
        let eig = linalg::hermitian_eigenvalues(statistical_operator(&ens).matrix());
        let ov = (-2.0_f64).exp();
        let top = &eig[eig.len() - 2..];
        assert_abs_diff_eq!(top[0], (1.0 - ov) / 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(top[1], (1.0 + ov) / 2.0, epsilon = 1e-10);
        assert!(eig[..eig.len() - 2].iter().all(|l| l.abs() < 1e-10));
    }
}
