use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{max_qubits, QsimError, Real, Result};
use crate::bits::BitString;

/// A contiguous register `offset .. offset + width` inside a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WireRange {
    pub offset: usize,
    pub width: usize,
}

impl WireRange {
    pub const fn new(offset: usize, width: usize) -> Self {
        Self { offset, width }
    }

    pub const fn full(qubits: usize) -> Self {
        Self { offset: 0, width: qubits }
    }

    pub fn end(&self) -> usize {
        self.offset + self.width
    }

    pub fn check(&self, qubits: usize) -> Result<()> {
        if self.width == 0 || self.end() > qubits {
            return Err(QsimError::WireRange { offset: self.offset, width: self.width, qubits });
        }
        Ok(())
    }

    pub fn overlaps(&self, other: &WireRange) -> bool {
        self.offset < other.end() && other.offset < self.end()
    }

    fn mask(&self) -> usize {
        ((1usize << self.width) - 1) << self.offset
    }

    /// Value held by this register in computational-basis index `index`.
    pub fn extract(&self, index: usize) -> usize {
        (index >> self.offset) & ((1usize << self.width) - 1)
    }

    fn replace(&self, index: usize, value: usize) -> usize {
        (index & !self.mask()) | (value << self.offset)
    }
}

/// One outcome of an exact (branching) measurement.
#[derive(Clone, Debug)]
pub struct MeasurementBranch<T: Real = f64> {
    pub outcome: BitString,
    pub probability: T,
    pub post: PureState<T>,
}

/// Normalized state vector over the computational basis of `qubits` qubits.
///
/// Basis index bit `i` is qubit `i`. The amplitude buffer is shared between
/// clones; every operation returns a new state.
#[derive(Clone, Debug)]
pub struct PureState<T: Real = f64> {
    qubits: usize,
    amps: Arc<[Complex<T>]>,
    cdf: Arc<OnceLock<Vec<f64>>>,
}

fn check_qubits(qubits: usize) -> Result<()> {
    let max = max_qubits();
    if qubits == 0 || qubits > max {
        return Err(QsimError::QubitCount { qubits, max });
    }
    Ok(())
}

impl<T: Real> PureState<T> {
    /// Wraps an amplitude vector, checking length and normalization.
    pub fn new(qubits: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        check_qubits(qubits)?;
        if amps.len() != 1usize << qubits {
            return Err(QsimError::DimensionMismatch { left: 1 << qubits, right: amps.len() });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |s, x| s + x);
        if (norm - T::one()).abs() > T::identity_tolerance() {
            return Err(QsimError::NotNormalized(norm.as_f64()));
        }
        Ok(Self::from_parts(qubits, amps))
    }

    /// Scales an arbitrary nonzero vector to unit norm.
    pub fn normalized(qubits: usize, mut amps: Vec<Complex<T>>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |s, x| s + x);
        if norm <= T::zero() {
            return Err(QsimError::EmptyProjection);
        }
        let scale = norm.sqrt().recip();
        amps.iter_mut().for_each(|a| *a = a.scale(scale));
        Self::new(qubits, amps)
    }

    pub(crate) fn from_parts(qubits: usize, amps: Vec<Complex<T>>) -> Self {
        Self { qubits, amps: amps.into(), cdf: Arc::new(OnceLock::new()) }
    }

    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        check_qubits(qubits)?;
        if index >> qubits != 0 {
            return Err(QsimError::DimensionMismatch { left: 1 << qubits, right: index });
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << qubits];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(Self::from_parts(qubits, amps))
    }

    /// `|b⟩` for the bit string `b`, one qubit per bit.
    pub fn from_bits(bits: &BitString) -> Result<Self> {
        Self::basis(bits.len(), bits.to_u64() as usize)
    }

    /// `2^{-q/2} Σ_x |x⟩`.
    pub fn uniform_superposition(qubits: usize) -> Result<Self> {
        check_qubits(qubits)?;
        let amp = T::of(2f64.powf(-(qubits as f64) / 2.0));
        Ok(Self::from_parts(qubits, vec![Complex::new(amp, T::zero()); 1 << qubits]))
    }

    /// Haar-random state: normalized vector of i.i.d. complex Gaussians.
    pub fn haar_random<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Result<Self> {
        check_qubits(qubits)?;
        let amps: Vec<Complex<T>> = (0..1usize << qubits)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex::new(T::of(re), T::of(im))
            })
            .collect();
        Self::normalized(qubits, amps)
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |s, x| s + x)
    }

    /// Basis indices carrying nonzero amplitude.
    pub fn support(&self) -> Vec<usize> {
        let eps = T::identity_tolerance();
        (0..self.dim()).filter(|&i| self.amps[i].norm_sqr() > eps * eps).collect()
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.qubits != other.qubits {
            return Err(QsimError::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.same_dim(other)?;
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(clamp_unit(self.inner(other)?.norm_sqr()))
    }

    /// `sqrt(1 − |⟨self|other⟩|²)`.
    pub fn trace_distance(&self, other: &Self) -> Result<T> {
        Ok((T::one() - self.fidelity(other)?).max(T::zero()).sqrt())
    }

    /// Kronecker product; `self` occupies the low wires.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let qubits = self.qubits + other.qubits;
        if qubits > max_qubits() {
            return Err(QsimError::Capacity { requested: qubits, max: max_qubits() });
        }
        let mut amps = Vec::with_capacity(1usize << qubits);
        for b in other.amps.iter() {
            for a in self.amps.iter() {
                amps.push(a * b);
            }
        }
        Ok(Self::from_parts(qubits, amps))
    }

    /// `|x⟩_in |z⟩_out ↦ |x⟩_in |z ⊕ f(x)⟩_out`.
    pub fn apply_function_oracle<F>(&self, f: F, input: WireRange, output: WireRange) -> Result<Self>
    where
        F: Fn(&BitString) -> BitString,
    {
        input.check(self.qubits)?;
        output.check(self.qubits)?;
        if input.overlaps(&output) {
            return Err(QsimError::OverlappingRanges);
        }
        let table = (0..1usize << input.width)
            .map(|x| {
                let y = f(&BitString::from_u64(x as u64, input.width));
                if y.len() != output.width {
                    return Err(QsimError::OracleWidth { expected: output.width, actual: y.len() });
                }
                Ok(y.to_u64() as usize)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.apply_function_table(&table, input, output))
    }

    pub(crate) fn apply_function_table(&self, table: &[usize], input: WireRange, output: WireRange) -> Self {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); self.dim()];
        for (i, a) in self.amps.iter().enumerate() {
            let z = output.extract(i) ^ table[input.extract(i)];
            amps[output.replace(i, z)] = *a;
        }
        Self::from_parts(self.qubits, amps)
    }

    /// Multiplies the amplitude of `|y⟩` by `(−1)^{g(y)}`.
    pub fn apply_phase_oracle<G>(&self, g: G) -> Self
    where
        G: Fn(&BitString) -> bool,
    {
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| if g(&BitString::from_u64(i as u64, self.qubits)) { -a } else { *a })
            .collect();
        Self::from_parts(self.qubits, amps)
    }

    /// Born probabilities of every value of `wires`, indexed by register value.
    pub fn probabilities(&self, wires: WireRange) -> Result<Vec<T>> {
        wires.check(self.qubits)?;
        let mut probs = vec![T::zero(); 1 << wires.width];
        for (i, a) in self.amps.iter().enumerate() {
            probs[wires.extract(i)] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Projects `wires` onto `value`; returns the branch probability and the
    /// renormalized post-measurement state.
    pub fn project(&self, wires: WireRange, value: usize) -> Result<(T, Self)> {
        wires.check(self.qubits)?;
        let zero = Complex::new(T::zero(), T::zero());
        let mut amps: Vec<Complex<T>> = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| if wires.extract(i) == value { *a } else { zero })
            .collect();
        let p = amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |s, x| s + x);
        if p <= T::zero() {
            return Err(QsimError::EmptyProjection);
        }
        let scale = p.sqrt().recip();
        amps.iter_mut().for_each(|a| *a = a.scale(scale));
        Ok((p, Self::from_parts(self.qubits, amps)))
    }

    /// Every outcome of measuring `wires` with nonzero probability.
    pub fn branches(&self, wires: WireRange) -> Result<Vec<MeasurementBranch<T>>> {
        let probs = self.probabilities(wires)?;
        let eps = T::identity_tolerance();
        probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > eps * eps)
            .map(|(v, _)| {
                let (probability, post) = self.project(wires, v)?;
                Ok(MeasurementBranch {
                    outcome: BitString::from_u64(v as u64, wires.width),
                    probability,
                    post,
                })
            })
            .collect()
    }

    /// Computational-basis measurement of `wires`: Born-sampled outcome and
    /// collapsed state.
    pub fn measure<R: Rng + ?Sized>(&self, wires: WireRange, rng: &mut R) -> Result<(BitString, Self)> {
        let probs = self.probabilities(wires)?;
        let value = sample_index(probs.iter().map(|p| p.as_f64()), rng);
        let (_, post) = self.project(wires, value)?;
        Ok((BitString::from_u64(value as u64, wires.width), post))
    }

    /// Measures every qubit, discarding the (basis) post-state. Shared clones
    /// reuse one cumulative distribution.
    pub fn measure_all<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        let cdf = self.cdf.get_or_init(|| {
            let mut acc = 0.0;
            self.amps
                .iter()
                .map(|a| {
                    acc += a.norm_sqr().as_f64();
                    acc
                })
                .collect()
        });
        let u = rng.random::<f64>() * cdf.last().copied().unwrap_or(1.0);
        let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        BitString::from_u64(idx as u64, self.qubits)
    }

    /// Removes the `marked` value of `wires` from the superposition.
    pub fn puncture(&self, marked: &BitString, wires: WireRange) -> Result<Self> {
        wires.check(self.qubits)?;
        if marked.len() != wires.width {
            return Err(QsimError::OracleWidth { expected: wires.width, actual: marked.len() });
        }
        let value = marked.to_u64() as usize;
        let zero = Complex::new(T::zero(), T::zero());
        let amps: Vec<Complex<T>> = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| if wires.extract(i) == value { zero } else { *a })
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |s, x| s + x);
        if norm <= T::identity_tolerance() * T::identity_tolerance() {
            return Err(QsimError::EmptyProjection);
        }
        Self::normalized(self.qubits, amps)
    }

    /// Text dump: header line, then `index re im` for each nonzero amplitude.
    pub fn dump(&self) -> String {
        let mut out = format!("# qubits={} order=little-endian\n", self.qubits);
        for i in self.support() {
            let a = self.amps[i];
            let _ = writeln!(out, "{i} {:e} {:e}", a.re.as_f64(), a.im.as_f64());
        }
        out
    }

    /// Parses the output of [`dump`](Self::dump).
    pub fn parse_dump(text: &str) -> Result<Self> {
        let bad = |line: &str| QsimError::Parse(line.to_string());
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad(""))?;
        let qubits: usize = header
            .split_whitespace()
            .find_map(|tok| tok.strip_prefix("qubits="))
            .and_then(|q| q.parse().ok())
            .ok_or_else(|| bad(header))?;
        check_qubits(qubits)?;
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << qubits];
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let mut parts = line.split_whitespace();
            let mut next = || parts.next().ok_or_else(|| bad(line));
            let idx: usize = next()?.parse().map_err(|_| bad(line))?;
            let re: f64 = next()?.parse().map_err(|_| bad(line))?;
            let im: f64 = next()?.parse().map_err(|_| bad(line))?;
            *amps.get_mut(idx).ok_or_else(|| bad(line))? = Complex::new(T::of(re), T::of(im));
        }
        Self::new(qubits, amps)
    }
}

pub(crate) fn clamp_unit<T: Real>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}

pub(crate) fn sample_index<R: Rng + ?Sized>(weights: impl Iterator<Item = f64>, rng: &mut R) -> usize {
    let weights: Vec<f64> = weights.collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut last_nonzero = 0;
    for (i, w) in weights.iter().enumerate() {
        if *w > 0.0 {
            last_nonzero = i;
            if u < *w {
                return i;
            }
        }
        u -= w;
    }
    last_nonzero
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::rng::seeded;
    use proptest::prelude::*;

    type S = PureState<f64>;

    fn plus() -> S {
        S::uniform_superposition(1).unwrap()
    }

    #[test]
    fn uniform_superposition_amplitudes() {
        let s = plus();
        for a in s.amplitudes() {
            assert!((a.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }
        let s2 = S::uniform_superposition(2).unwrap();
        assert!(s2.amplitudes().iter().all(|a| (a.re - 0.5).abs() < 1e-15));
        assert!((S::uniform_superposition(3).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qubit_count_out_of_range() {
        assert!(matches!(S::uniform_superposition(0), Err(QsimError::QubitCount { .. })));
        assert!(matches!(S::uniform_superposition(64), Err(QsimError::QubitCount { .. })));
    }

    #[test]
    fn identity_oracle_is_cnot() {
        let s = plus().tensor(&S::basis(1, 0).unwrap()).unwrap();
        let out = s
            .apply_function_oracle(|x| x.clone(), WireRange::new(0, 1), WireRange::new(1, 1))
            .unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [h, 0.0, 0.0, h];
        for (a, e) in out.amplitudes().iter().zip(expected) {
            assert!((a.re - e).abs() < 1e-15 && a.im.abs() < 1e-15);
        }
    }

    #[test]
    fn constant_zero_oracle_is_identity() {
        let s = S::haar_random(3, &mut seeded(1)).unwrap();
        let out = s
            .apply_function_oracle(|_| BitString::zeros(1), WireRange::new(0, 2), WireRange::new(2, 1))
            .unwrap();
        assert!((out.fidelity(&s).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_rejects_overlap_and_width() {
        let s = S::uniform_superposition(3).unwrap();
        assert!(matches!(
            s.apply_function_oracle(|x| x.clone(), WireRange::new(0, 2), WireRange::new(1, 2)),
            Err(QsimError::OverlappingRanges)
        ));
        assert!(matches!(
            s.apply_function_oracle(|_| BitString::zeros(2), WireRange::new(0, 1), WireRange::new(1, 1)),
            Err(QsimError::OracleWidth { .. })
        ));
    }

    #[test]
    fn phase_oracle_examples() {
        let s = S::haar_random(2, &mut seeded(3)).unwrap();
        let same = s.apply_phase_oracle(|_| false);
        assert_eq!(same.amplitudes(), s.amplitudes());
        let flipped = s.apply_phase_oracle(|_| true);
        assert!((flipped.fidelity(&s).unwrap() - 1.0).abs() < 1e-12);
        assert!((flipped.inner(&s).unwrap().re + 1.0).abs() < 1e-12);

        // g(y) = y_0 on |++⟩ gives |−⟩ on qubit 0.
        let pp = S::uniform_superposition(2).unwrap();
        let out = pp.apply_phase_oracle(|y| y.get(0));
        let minus = S::new(1, vec![Complex::new(0.5f64.sqrt(), 0.0), Complex::new(-(0.5f64.sqrt()), 0.0)]).unwrap();
        let expected = minus.tensor(&plus()).unwrap();
        assert!((out.fidelity(&expected).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measuring_basis_state_is_deterministic() {
        let s = S::basis(3, 5).unwrap();
        let mut rng = seeded(9);
        for _ in 0..20 {
            let (o, post) = s.measure(WireRange::full(3), &mut rng).unwrap();
            assert_eq!(o.to_u64(), 5);
            assert!((post.fidelity(&s).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn plus_measurement_frequency() {
        let mut rng = seeded(11);
        let s = plus();
        let n = 10_000;
        let ones = (0..n).filter(|_| s.measure(WireRange::full(1), &mut rng).unwrap().0.get(0)).count();
        let sigma = (0.25f64 / n as f64).sqrt();
        assert!((ones as f64 / n as f64 - 0.5).abs() < 3.0 * sigma);
    }

    #[test]
    fn measurement_is_idempotent() {
        let mut rng = seeded(5);
        let s = S::haar_random(4, &mut rng).unwrap();
        let wires = WireRange::new(1, 2);
        for _ in 0..50 {
            let (first, post) = s.measure(wires, &mut rng).unwrap();
            let (second, _) = post.measure(wires, &mut rng).unwrap();
            assert_eq!(first, second);
        }
    }

    #[test]
    fn swap_examples_via_tensor() {
        let zero = S::basis(1, 0).unwrap();
        let one = S::basis(1, 1).unwrap();
        let t = zero.tensor(&one).unwrap();
        assert_eq!(t.support(), vec![0b10]);
        assert_eq!(zero.fidelity(&one).unwrap(), 0.0);
    }

    #[test]
    fn puncture_examples() {
        let s = S::uniform_superposition(2).unwrap();
        let p = s.puncture(&BitString::zeros(2), WireRange::full(2)).unwrap();
        assert_eq!(p.amplitude(0).norm(), 0.0);
        for i in 1..4 {
            assert!((p.amplitude(i).re - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        }
        let x = S::basis(2, 1).unwrap();
        assert!(matches!(
            x.puncture(&BitString::from_u64(1, 2), WireRange::full(2)),
            Err(QsimError::EmptyProjection)
        ));
    }

    #[test]
    fn dump_round_trips() {
        let s = S::haar_random(3, &mut seeded(2)).unwrap();
        let back = S::parse_dump(&s.dump()).unwrap();
        assert!((back.fidelity(&s).unwrap() - 1.0).abs() < 1e-12);
        assert!(S::basis(2, 2).unwrap().dump().ends_with("2 1e0 0e0\n"));
    }

    #[test]
    fn scalar_generic_f32() {
        let s = PureState::<f32>::uniform_superposition(3).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-6);
        let t = s.apply_phase_oracle(|y| y.get(1));
        assert!(t.fidelity(&s).unwrap() < 1e-6);
    }

    proptest! {
        #[test]
        fn oracles_preserve_norm(seed in any::<u64>(), table in proptest::collection::vec(0usize..4, 8)) {
            let s = S::haar_random(5, &mut seeded(seed)).unwrap();
            let out = s.apply_function_oracle(
                |x| BitString::from_u64(table[x.to_u64() as usize] as u64, 2),
                WireRange::new(0, 3),
                WireRange::new(3, 2),
            ).unwrap();
            prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
            let ph = out.apply_phase_oracle(|y| table[(y.to_u64() % 8) as usize] & 1 == 1);
            prop_assert!((ph.norm_sqr() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn punctured_value_never_measured(seed in any::<u64>(), marked in 0u64..4) {
            let mut rng = seeded(seed);
            let s = S::haar_random(4, &mut rng).unwrap();
            let wires = WireRange::new(2, 2);
            let p = s.puncture(&BitString::from_u64(marked, 2), wires).unwrap();
            for _ in 0..20 {
                let (o, _) = p.measure(wires, &mut rng).unwrap();
                prop_assert_ne!(o.to_u64(), marked);
            }
        }

        #[test]
        fn trace_distance_fidelity_identity(seed in any::<u64>()) {
            let mut rng = seeded(seed);
            let a = S::haar_random(3, &mut rng).unwrap();
            let b = S::haar_random(3, &mut rng).unwrap();
            let td = a.trace_distance(&b).unwrap();
            prop_assert!((td * td + a.fidelity(&b).unwrap() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn tensor_overlap_squares(seed in any::<u64>()) {
            let mut rng = seeded(seed);
            let a = S::haar_random(2, &mut rng).unwrap();
            let b = S::haar_random(2, &mut rng).unwrap();
            let lhs = a.tensor(&a).unwrap().inner(&b.tensor(&b).unwrap()).unwrap();
            let ab = a.inner(&b).unwrap();
            prop_assert!((lhs - ab * ab).norm() < 1e-12);
            prop_assert!((a.tensor(&b).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}
