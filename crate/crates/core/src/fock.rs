//! Truncated single-mode Fock space.
//!
//! States live in span{|0⟩, …, |n_max⟩}. The field ⊗ qubit space used by the
//! Jaynes–Cummings interaction is ordered with the qubit as the fast index:
//! basis vector `2 n + q` is |n⟩|q⟩ with q = 0 for |g⟩ and q = 1 for |e⟩.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Numerical tolerances for the truncated-space factories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Largest Poisson mass allowed outside the truncated space.
    pub trunc: f64,
    /// Largest entry of `U^dag U - 1` accepted for a unitary.
    pub unit: f64,
    /// Largest `|D(beta)|0⟩ - |beta⟩|` accepted for a displacement.
    pub disp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            trunc: 1e-10,
            unit: 1e-8,
            disp: 1e-8,
        }
    }
}

/// Truncation index that keeps the Poisson tail of mean `mean_photons` below ~1e-12.
pub fn default_n_max(mean_photons: f64) -> usize {
    let mu = mean_photons.max(0.0);
    let n = (mu + 8.0 * mu.sqrt() + 8.0).ceil() as usize;
    n.max(16)
}

/// A pure state in a truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(amplitudes: DVector<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn from_slice(amps: &[C64]) -> Self {
        Self::new(DVector::from_column_slice(amps))
    }

    /// Fock state |n⟩ in a space truncated at `n_max`.
    pub fn fock(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::InvalidArgument(format!(
                "Fock index {n} exceeds truncation {n_max}"
            )));
        }
        let mut v = DVector::zeros(n_max + 1);
        v[n] = C64::new(1.0, 0.0);
        Ok(Self::new(v))
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Truncation index when this vector lives in a single-mode Fock space.
    pub fn n_max(&self) -> usize {
        self.dim().saturating_sub(1)
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn normalized(&self) -> Option<StateVector> {
        let n = self.amplitudes.norm();
        (n > 0.0).then(|| StateVector::new(self.amplitudes.unscale(n)))
    }

    /// |self⟩ ⊗ |other⟩ with `other` as the fast index.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let (a, b) = (self.dim(), other.dim());
        let mut v = DVector::zeros(a * b);
        for i in 0..a {
            for j in 0..b {
                v[i * b + j] = self.amplitudes[i] * other.amplitudes[j];
            }
        }
        StateVector::new(v)
    }

    /// |ψ⟩⟨ψ|.
    pub fn projector(&self) -> DMatrix<C64> {
        &self.amplitudes * self.amplitudes.adjoint()
    }
}

/// A dense operator on a truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn new(matrix: DMatrix<C64>) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(DMatrix::identity(dim, dim))
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    /// Number of rows; the dimension for square operators.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.matrix.is_square()
    }

    pub fn adjoint(&self) -> Operator {
        Operator::new(self.matrix.adjoint())
    }

    pub fn compose(&self, rhs: &Operator) -> Operator {
        Operator::new(&self.matrix * &rhs.matrix)
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        StateVector::new(&self.matrix * v.amplitudes())
    }

    /// max |(U^dag U - 1)_ij| over the leading `block × block` corner
    /// (the whole matrix when `block` is `None`).
    pub fn unitarity_deviation(&self, block: Option<usize>) -> f64 {
        let g = self.matrix.adjoint() * &self.matrix;
        let n = block.unwrap_or(g.nrows()).min(g.nrows());
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

fn poisson_tail_beyond(mean: f64, n_max: usize, last_amp_sqr: f64) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let mut term = last_amp_sqr;
    let mut tail = 0.0;
    let mut n = n_max + 1;
    loop {
        term *= mean / n as f64;
        tail += term;
        if (n as f64 > mean && term <= tail * 1e-17) || term < 1e-300 {
            break;
        }
        n += 1;
    }
    tail
}

/// Coherent state |α⟩ truncated at `n_max`, default tolerance.
pub fn coherent_state(alpha: C64, n_max: usize) -> Result<StateVector> {
    coherent_state_with_tol(alpha, n_max, Tolerances::default().trunc)
}

/// Coherent state with amplitudes e^{-|α|²/2} αⁿ/√(n!).
///
/// Fails with [`Error::TruncationTooSmall`] when the discarded Poisson mass
/// exceeds `tol`. The returned vector is not renormalized.
pub fn coherent_state_with_tol(alpha: C64, n_max: usize, tol: f64) -> Result<StateVector> {
    let mean = alpha.norm_sqr();
    let mut amps = DVector::zeros(n_max + 1);
    amps[0] = C64::new((-0.5 * mean).exp(), 0.0);
    for n in 1..=n_max {
        amps[n] = amps[n - 1] * alpha / (n as f64).sqrt();
    }
    let tail = poisson_tail_beyond(mean, n_max, amps[n_max].norm_sqr());
    if tail > tol {
        return Err(Error::TruncationTooSmall {
            discarded: tail,
            tolerance: tol,
        });
    }
    Ok(StateVector::new(amps))
}

/// Annihilation and creation operators on span{|0⟩, …, |n_max⟩}.
///
/// The truncated commutator `[a, a†]` is the identity except at
/// `(n_max, n_max)`, where it equals `-n_max`.
pub fn ladder_ops(n_max: usize) -> (Operator, Operator) {
    let dim = n_max + 1;
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let adag = a.adjoint();
    (Operator::new(a), Operator::new(adag))
}

/// Displacement D(β) = exp(β a† − β* a) on the truncated space, default tolerances.
pub fn displacement(beta: C64, n_max: usize) -> Result<Operator> {
    displacement_with_tol(beta, n_max, &Tolerances::default())
}

pub fn displacement_with_tol(beta: C64, n_max: usize, tol: &Tolerances) -> Result<Operator> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("displacement needs n_max >= 1".into()));
    }
    let (a, adag) = ladder_ops(n_max);
    let generator = adag.matrix() * beta - a.matrix() * beta.conj();
    let d = Operator::new(generator.exp());

    let target = coherent_state_with_tol(beta, n_max, tol.trunc)?;
    let vac = StateVector::fock(0, n_max)?;
    let err = (d.apply(&vac).amplitudes() - target.amplitudes()).norm();
    if err > tol.disp {
        return Err(Error::TruncationTooSmall {
            discarded: err,
            tolerance: tol.disp,
        });
    }
    Ok(d)
}

/// Index of |n⟩|q⟩ in the field ⊗ qubit basis.
#[inline]
pub fn field_qubit_index(n: usize, q: usize) -> usize {
    2 * n + q
}

/// Resonant Jaynes–Cummings propagator exp(−iθ(a σ₊ + a† σ₋)) on field ⊗ qubit.
///
/// Assembled from the exact 2×2 rotations on each manifold
/// span{|n⟩|e⟩, |n+1⟩|g⟩} (angle θ√(n+1)); |0⟩|g⟩ is left invariant. The
/// state |n_max⟩|e⟩, whose partner |n_max+1⟩|g⟩ lies outside the truncated
/// space, is also left invariant so the result is exactly unitary.
pub fn jc_unitary(theta: f64, n_max: usize) -> Operator {
    let dim = 2 * (n_max + 1);
    let mut u = DMatrix::zeros(dim, dim);
    let g0 = field_qubit_index(0, 0);
    u[(g0, g0)] = C64::new(1.0, 0.0);
    let top = field_qubit_index(n_max, 1);
    u[(top, top)] = C64::new(1.0, 0.0);
    for n in 0..n_max {
        let e = field_qubit_index(n, 1);
        let g = field_qubit_index(n + 1, 0);
        let phase = theta * ((n + 1) as f64).sqrt();
        let (s, c) = phase.sin_cos();
        u[(e, e)] = C64::new(c, 0.0);
        u[(g, g)] = C64::new(c, 0.0);
        u[(g, e)] = C64::new(0.0, -s);
        u[(e, g)] = C64::new(0.0, -s);
    }
    Operator::new(u)
}
