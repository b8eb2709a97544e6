use num_complex::Complex;
use rand::Rng;

use super::{FunctionKey, PrfKey, PrimitiveError, Result};
use crate::bits::BitString;
use crate::qsim::{max_qubits, QsimError, QuantumState, PureState, Real};

/// Widths of a `(d, n)` PRFS generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrfsParams {
    pub key_width: usize,
    pub input_width: usize,
    pub output_qubits: usize,
}

impl PrfsParams {
    pub fn new(key_width: usize, input_width: usize, output_qubits: usize) -> Result<Self> {
        if input_width == 0 || output_qubits == 0 || key_width == 0 {
            return Err(PrimitiveError::Config(format!(
                "PRFS widths must be positive (w={key_width}, d={input_width}, n={output_qubits})"
            )));
        }
        Ok(Self { key_width, input_width, output_qubits })
    }

    /// Whether `d > log2 λ`, the desk-scale stand-in for `d = ω(log λ)`.
    pub fn super_logarithmic_input(&self) -> bool {
        self.input_width as f64 > (self.key_width as f64).log2()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PrfsInstantiation {
    /// `2^{-n/2} Σ_y (−1)^{f_k(x ∥ y)} |y⟩`.
    #[default]
    BinaryPhase,
    /// `|+⟩^{⊗n}` for every key and input. Broken on purpose.
    Constant,
}

/// Pseudorandom function-like state generator with an exact tester.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prfs {
    pub params: PrfsParams,
    pub instantiation: PrfsInstantiation,
}

impl Prfs {
    pub fn new(params: PrfsParams, instantiation: PrfsInstantiation) -> Self {
        Self { params, instantiation }
    }

    fn check_input(&self, x: &BitString) -> Result<()> {
        if x.len() != self.params.input_width {
            return Err(PrimitiveError::Width { what: "PRFS input", expected: self.params.input_width, actual: x.len() });
        }
        Ok(())
    }

    /// `|ψ_{k,x}⟩`.
    pub fn gen<T: Real>(&self, key: &FunctionKey, x: &BitString) -> Result<PureState<T>> {
        self.check_input(x)?;
        let n = self.params.output_qubits;
        match self.instantiation {
            PrfsInstantiation::Constant => Ok(PureState::uniform_superposition(n)?),
            PrfsInstantiation::BinaryPhase => {
                let amp = T::of(2f64.powf(-(n as f64) / 2.0));
                let amps = (0..1u64 << n)
                    .map(|y| {
                        let bit = key.eval(&x.concat(&BitString::from_u64(y, n)), 1)?.get(0);
                        Ok(Complex::new(if bit { -amp } else { amp }, T::zero()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(PureState::new(n, amps)?)
            }
        }
    }

    /// `Σ_x α_x |x⟩ ↦ Σ_x α_x |x⟩|ψ_{k,x}⟩`; the input register stays on the low wires.
    pub fn oracle_isometry<T: Real>(&self, key: &FunctionKey, state: &PureState<T>) -> Result<PureState<T>> {
        let d = self.params.input_width;
        let n = self.params.output_qubits;
        if state.qubit_count() != d {
            return Err(PrimitiveError::Width { what: "PRFS oracle register", expected: d, actual: state.qubit_count() });
        }
        if d + n > max_qubits() {
            return Err(QsimError::Capacity { requested: d + n, max: max_qubits() }.into());
        }
        let zero = Complex::new(T::zero(), T::zero());
        let mut amps = vec![zero; 1usize << (d + n)];
        for (x, alpha) in state.amplitudes().iter().enumerate() {
            if *alpha == zero {
                continue;
            }
            let psi: PureState<T> = self.gen(key, &BitString::from_u64(x as u64, d))?;
            for (y, a) in psi.amplitudes().iter().enumerate() {
                amps[x | (y << d)] = alpha * a;
            }
        }
        Ok(PureState::new(d + n, amps)?)
    }

    /// Acceptance probability of the tester: the projective measurement onto
    /// `|ψ_{k,x}⟩`, i.e. `⟨ψ_{k,x}|ρ|ψ_{k,x}⟩`.
    pub fn test_exact<T: Real>(&self, key: &FunctionKey, x: &BitString, candidate: &QuantumState<T>) -> Result<T> {
        if candidate.qubit_count() != self.params.output_qubits {
            return Err(QsimError::DimensionMismatch {
                left: self.params.output_qubits,
                right: candidate.qubit_count(),
            }
            .into());
        }
        let psi = QuantumState::Pure(self.gen(key, x)?);
        Ok(crate::qsim::fidelity(&psi, candidate)?)
    }

    pub fn test<T: Real, R: Rng + ?Sized>(
        &self,
        key: &FunctionKey,
        x: &BitString,
        candidate: &QuantumState<T>,
        rng: &mut R,
    ) -> Result<bool> {
        let p = self.test_exact(key, x, candidate)?.as_f64();
        Ok(rng.random::<f64>() < p)
    }
}

/// Binary-phase PRFS with `d = |x|`, PRF key `k`, `n` output qubits.
pub fn prfs_gen(key: &PrfKey, x: &BitString, output_qubits: usize) -> Result<PureState> {
    let prfs = Prfs::new(PrfsParams::new(key.len(), x.len(), output_qubits)?, PrfsInstantiation::BinaryPhase);
    prfs.gen(&FunctionKey::Prf(key.clone()), x)
}
