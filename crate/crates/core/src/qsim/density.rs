use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::{Complex, Complex64};

use super::{max_qubits, PureState, QsimError, Real, Result};

/// Hermitian, positive semidefinite, unit-trace matrix over `qubits` qubits.
#[derive(Clone, Debug)]
pub struct DensityMatrix<T: Real = f64> {
    qubits: usize,
    /// Row-major `dim × dim` entries.
    data: Vec<Complex<T>>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, trace and positivity before wrapping `data`.
    pub fn new(qubits: usize, data: Vec<Complex<T>>) -> Result<Self> {
        let rho = Self::unchecked(qubits, data)?;
        rho.validate()?;
        Ok(rho)
    }

    fn unchecked(qubits: usize, data: Vec<Complex<T>>) -> Result<Self> {
        check_density_qubits(qubits)?;
        let dim = 1usize << qubits;
        if data.len() != dim * dim {
            return Err(QsimError::DimensionMismatch { left: dim * dim, right: data.len() });
        }
        Ok(Self { qubits, data })
    }

    fn validate(&self) -> Result<()> {
        let tol = T::identity_tolerance();
        let dim = self.dim();
        for i in 0..dim {
            for j in 0..dim {
                if (self.entry(i, j) - self.entry(j, i).conj()).norm() > tol {
                    return Err(QsimError::NotDensityMatrix(format!("not Hermitian at ({i},{j})")));
                }
            }
        }
        let tr = self.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(QsimError::NotDensityMatrix(format!("trace {} != 1", tr.re)));
        }
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -tol.as_f64() {
            return Err(QsimError::NotDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn from_pure(state: &PureState<T>) -> Self {
        let amps = state.amplitudes();
        let data = amps
            .iter()
            .flat_map(|a| amps.iter().map(move |b| a * b.conj()))
            .collect();
        Self { qubits: state.qubit_count(), data }
    }

    /// `I / 2^q`.
    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        check_density_qubits(qubits)?;
        let dim = 1usize << qubits;
        let mut data = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        let w = T::of(1.0 / dim as f64);
        for i in 0..dim {
            data[i * dim + i] = Complex::new(w, T::zero());
        }
        Self::unchecked(qubits, data)
    }

    /// `Σ_i w_i |ψ_i⟩⟨ψ_i|`; weights must sum to one.
    pub fn ensemble<'a, I>(qubits: usize, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = (T, &'a PureState<T>)>,
    {
        check_density_qubits(qubits)?;
        let dim = 1usize << qubits;
        let mut data = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for (w, s) in members {
            if s.qubit_count() != qubits {
                return Err(QsimError::DimensionMismatch { left: dim, right: s.dim() });
            }
            let amps = s.amplitudes();
            for i in 0..dim {
                for j in 0..dim {
                    data[i * dim + j] += (amps[i] * amps[j].conj()).scale(w);
                }
            }
        }
        Self::new(qubits, data)
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim()).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self.entry(i, i))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(self.dim(), &self.to_c64())
    }

    fn to_c64(&self) -> Vec<Complex64> {
        self.data.iter().map(|c| Complex64::new(c.re.as_f64(), c.im.as_f64())).collect()
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, state: &PureState<T>) -> Result<T> {
        if state.qubit_count() != self.qubits {
            return Err(QsimError::DimensionMismatch { left: self.dim(), right: state.dim() });
        }
        let a = state.amplitudes();
        let dim = self.dim();
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..dim {
            let row = self.data[i * dim..(i + 1) * dim]
                .iter()
                .zip(a)
                .fold(Complex::new(T::zero(), T::zero()), |acc, (r, x)| acc + r * x);
            acc += a[i].conj() * row;
        }
        Ok(acc.re.max(T::zero()).min(T::one()))
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.qubits != other.qubits {
            return Err(QsimError::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(())
    }

    /// Half the trace norm of `self − other`.
    pub fn trace_distance(&self, other: &Self) -> Result<T> {
        self.same_dim(other)?;
        let diff: Vec<Complex64> = self
            .to_c64()
            .into_iter()
            .zip(other.to_c64())
            .map(|(a, b)| a - b)
            .collect();
        Ok(T::of((0.5 * hermitian_trace_norm(self.dim(), &diff)).clamp(0.0, 1.0)))
    }

    /// Uhlmann fidelity `(tr sqrt(sqrt(ρ) σ sqrt(ρ)))²`.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        self.same_dim(other)?;
        let dim = self.dim();
        let rho = DMatrix::from_row_slice(dim, dim, &self.to_c64());
        let sigma = DMatrix::from_row_slice(dim, dim, &other.to_c64());
        let eig = SymmetricEigen::new(rho);
        let sqrt_vals = eig.eigenvalues.map(|v| Complex64::new(clip_sqrt(v), 0.0));
        let v = &eig.eigenvectors;
        let sqrt_rho = v * DMatrix::from_diagonal(&sqrt_vals) * v.adjoint();
        let m = &sqrt_rho * sigma * &sqrt_rho;
        let m = (&m + m.adjoint()).scale(0.5);
        let s: f64 = m.symmetric_eigenvalues().iter().map(|&x| clip_sqrt(x)).sum();
        Ok(T::of((s * s).clamp(0.0, 1.0)))
    }
}

// Round-off eigenvalues of order 1e-16 would otherwise contribute 1e-8 each.
fn clip_sqrt(v: f64) -> f64 {
    if v > 1e-13 {
        v.sqrt()
    } else {
        0.0
    }
}

/// Density matrices are dense `4^q` buffers and stay far below the
/// state-vector limit.
pub const MAX_DENSITY_QUBITS: usize = 12;

fn check_density_qubits(qubits: usize) -> Result<()> {
    if qubits == 0 {
        return Err(QsimError::QubitCount { qubits, max: MAX_DENSITY_QUBITS });
    }
    let max = MAX_DENSITY_QUBITS.min(max_qubits());
    if qubits > max {
        return Err(QsimError::Capacity { requested: qubits, max });
    }
    Ok(())
}

/// Eigenvalues of a Hermitian matrix given row-major.
pub fn hermitian_eigenvalues(dim: usize, data: &[Complex64]) -> Vec<f64> {
    let m = DMatrix::from_row_slice(dim, dim, data);
    m.symmetric_eigenvalues().iter().copied().collect()
}

/// `Σ |λ_i|` of a Hermitian matrix given row-major.
pub fn hermitian_trace_norm(dim: usize, data: &[Complex64]) -> f64 {
    hermitian_eigenvalues(dim, data).iter().map(|x| x.abs()).sum()
}

/// `Σ |λ_i|` of a real symmetric matrix given row-major.
pub fn symmetric_trace_norm(dim: usize, data: &[f64]) -> f64 {
    let m = DMatrix::from_row_slice(dim, dim, data);
    m.symmetric_eigenvalues().iter().map(|x| x.abs()).sum()
}
