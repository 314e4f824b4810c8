//! Pure states, density matrices, Haar sampling and the constructions used to
//! perturb boundary states.
//!
//! Subsystems are ordered row-major: the leftmost factor is the slowest
//! index of the flattened Hilbert space. Subsystem indices in this API are
//! zero-based.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matkernel::{self, ComplexMatrix};

/// Allowed deviation of ‖ψ‖₂ from one.
pub const NORM_TOL: f64 = 1e-12;
/// Allowed Hermiticity, trace and positivity defects of a density matrix.
pub const STATE_TOL: f64 = 1e-10;
/// Eigenvalues above this count towards the numerical rank.
pub const RANK_TOL: f64 = 1e-12;

/// Reproducible random stream identified by `(seed, stream)`.
///
/// Each parallel task builds its own generator from its own pair, so output
/// never depends on scheduling or thread count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamSeed {
    pub seed: u64,
    pub stream: u64,
}

impl StreamSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

fn standard_complex_normal(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// Inner product ⟨a|b⟩.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::Dimension("at least one subsystem is required".into()));
    }
    if dims.contains(&0) {
        return Err(Error::Dimension(format!("zero-dimensional factor in {dims:?}")));
    }
    let total: usize = dims.iter().product();
    if total > matkernel::MAX_DIM * 4 {
        return Err(Error::Dimension(format!("total dimension {total} is too large")));
    }
    Ok(total)
}

/// Normalised state vector on a tensor product of factors.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalised to within [`NORM_TOL`].
    pub fn new(dims: &[usize], amplitudes: Vec<Complex64>) -> Result<Self> {
        let total = check_dims(dims)?;
        if amplitudes.len() != total {
            return Err(Error::Dimension(format!(
                "dims {dims:?} need {total} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Contract(format!("state norm is {norm}, expected 1")));
        }
        Ok(Self {
            dims: dims.to_vec(),
            amplitudes,
        })
    }

    /// Normalises `amplitudes` first.
    pub fn normalized(dims: &[usize], mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::Contract("cannot normalise a zero vector".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::new(dims, amplitudes)
    }

    /// Same as [`PureState::normalized`] for real amplitudes.
    pub fn from_real(dims: &[usize], amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(dims, amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis state |index⟩.
    pub fn basis(dims: &[usize], index: usize) -> Result<Self> {
        let total = check_dims(dims)?;
        if index >= total {
            return Err(Error::Dimension(format!("basis index {index} >= {total}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); total];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(dims, amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.amplitudes)
    }

    /// |⟨self|other⟩|.
    pub fn overlap(&self, other: &Self) -> f64 {
        inner(&self.amplitudes, &other.amplitudes).norm()
    }

    /// Tensor product with another pure state.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::normalized(&dims, matkernel::kron_vec(&self.amplitudes, &other.amplitudes))
    }

    /// Applies U₁ ⊗ U₂ ⊗ … with one unitary per factor.
    pub fn apply_local(&self, unitaries: &[ComplexMatrix]) -> Result<Self> {
        if unitaries.len() != self.dims.len() {
            return Err(Error::Dimension(format!(
                "{} local operators for {} subsystems",
                unitaries.len(),
                self.dims.len()
            )));
        }
        for (u, &d) in unitaries.iter().zip(&self.dims) {
            if u.rows() != d || u.cols() != d {
                return Err(Error::Dimension(format!(
                    "local operator {}x{} on a factor of dimension {d}",
                    u.rows(),
                    u.cols()
                )));
            }
        }
        let full = unitaries[1..]
            .iter()
            .fold(unitaries[0].clone(), |acc, u| matkernel::kron(&acc, u));
        Self::normalized(&self.dims, full.apply(&self.amplitudes)?)
    }

    /// Applies an operator on the full space.
    pub fn apply(&self, op: &ComplexMatrix) -> Result<Self> {
        Self::normalized(&self.dims, op.apply(&self.amplitudes)?)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims.clone(),
            matrix: ComplexMatrix::projector(&self.amplitudes),
        }
    }
}

/// Hermitian, positive semidefinite, unit-trace operator with subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity to within [`STATE_TOL`].
    pub fn new(dims: &[usize], matrix: ComplexMatrix) -> Result<Self> {
        let total = check_dims(dims)?;
        if matrix.rows() != total || matrix.cols() != total {
            return Err(Error::Dimension(format!(
                "dims {dims:?} need a {total}x{total} matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > STATE_TOL {
            return Err(Error::Contract(format!("not Hermitian (defect {defect:e})")));
        }
        let trace = matrix.trace();
        if (trace - 1.0).norm() > STATE_TOL {
            return Err(Error::Contract(format!("trace is {trace}, expected 1")));
        }
        let min = matkernel::eig_hermitian(&matrix)?[0];
        if min < -STATE_TOL {
            return Err(Error::Contract(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self {
            dims: dims.to_vec(),
            matrix: matrix.hermitian_part(),
        })
    }

    /// Maximally mixed state I/D.
    pub fn maximally_mixed(dims: &[usize]) -> Result<Self> {
        let total = check_dims(dims)?;
        Ok(Self {
            dims: dims.to_vec(),
            matrix: ComplexMatrix::identity(total).scale(1.0 / total as f64),
        })
    }

    /// Σ wᵢ |vᵢ⟩⟨vᵢ| with weights normalised to sum to one.
    pub fn from_ensemble(dims: &[usize], weights: &[f64], vectors: &[Vec<Complex64>]) -> Result<Self> {
        let total = check_dims(dims)?;
        if weights.len() != vectors.len() || weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::Domain(
                "ensemble weights must be nonnegative, one per vector".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::Domain("ensemble weights sum to zero".into()));
        }
        let mut m = ComplexMatrix::zeros(total, total);
        for (&w, v) in weights.iter().zip(vectors) {
            if v.len() != total {
                return Err(Error::Dimension(format!(
                    "vector of length {} in dimension {total}",
                    v.len()
                )));
            }
            let norm2 = v.iter().map(Complex64::norm_sqr).sum::<f64>();
            m = &m + &ComplexMatrix::projector(v).scale(w / (sum * norm2));
        }
        Self::new(dims, m)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_two_qubit(&self) -> bool {
        self.dims == [2, 2]
    }

    /// tr ρ².
    pub fn purity(&self) -> f64 {
        // ρ is Hermitian, so tr ρ² = Σ |ρᵢⱼ|².
        self.matrix.norm_fro().powi(2)
    }

    /// Ascending spectrum.
    pub fn eigenvalues(&self) -> Vec<f64> {
        matkernel::eig_hermitian(&self.matrix).expect("density matrix is Hermitian")
    }

    /// Number of eigenvalues above [`RANK_TOL`].
    pub fn rank(&self) -> usize {
        self.eigenvalues().iter().filter(|&&x| x > RANK_TOL).count()
    }

    /// U ρ U†.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = u.matmul(&self.matrix)?.matmul(&u.adjoint())?;
        Ok(Self {
            dims: self.dims.clone(),
            matrix: m.hermitian_part(),
        })
    }

    /// (U₁ ⊗ U₂ ⊗ …) ρ (U₁ ⊗ U₂ ⊗ …)†.
    pub fn conjugate_local(&self, unitaries: &[ComplexMatrix]) -> Result<Self> {
        if unitaries.len() != self.dims.len() {
            return Err(Error::Dimension(format!(
                "{} local operators for {} subsystems",
                unitaries.len(),
                self.dims.len()
            )));
        }
        let full = unitaries[1..]
            .iter()
            .fold(unitaries[0].clone(), |acc, u| matkernel::kron(&acc, u));
        self.conjugate(&full)
    }

    /// Exchanges the two factors of a bipartite state.
    pub fn swap_subsystems(&self) -> Result<Self> {
        self.reduce(&[1, 0])
    }

    /// Wraps a matrix produced by a trusted construction. Only Hermiticity is
    /// enforced by symmetrising.
    pub(crate) fn from_trusted(dims: Vec<usize>, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.rows());
        Self {
            dims,
            matrix: matrix.hermitian_part(),
        }
    }
}

/// Partial trace onto an ordered list of kept subsystems.
///
/// The kept factors appear in the output in the order given, so
/// `reduce(&[1, 0])` also exchanges them.
pub trait PartialTrace {
    fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix>;
}

type IndexSplit = (usize, usize, Vec<(usize, usize)>);

/// For every flat index of the full space: (flat index within the kept
/// factors in `keep` order, flat index within the traced factors).
fn index_split(dims: &[usize], keep: &[usize]) -> Result<IndexSplit> {
    if keep.is_empty() {
        return Err(Error::InvalidIndices("keep set is empty".into()));
    }
    let mut seen = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::InvalidIndices(format!(
                "subsystem {k} out of range for {} subsystems",
                dims.len()
            )));
        }
        if seen[k] {
            return Err(Error::InvalidIndices(format!("subsystem {k} repeated")));
        }
        seen[k] = true;
    }
    let rest: Vec<usize> = (0..dims.len()).filter(|i| !seen[*i]).collect();
    let keep_dim: usize = keep.iter().map(|&k| dims[k]).product();
    let rest_dim: usize = rest.iter().map(|&k| dims[k]).product();
    let total: usize = dims.iter().product();

    let mut map = Vec::with_capacity(total);
    let mut digits = vec![0usize; dims.len()];
    for flat in 0..total {
        let mut rem = flat;
        for (pos, &d) in dims.iter().enumerate().rev() {
            digits[pos] = rem % d;
            rem /= d;
        }
        let k = keep.iter().fold(0, |acc, &s| acc * dims[s] + digits[s]);
        let r = rest.iter().fold(0, |acc, &s| acc * dims[s] + digits[s]);
        map.push((k, r));
    }
    Ok((keep_dim, rest_dim, map))
}

impl PartialTrace for PureState {
    fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let (kd, rd, map) = index_split(&self.dims, keep)?;
        // Ψ[k, r] so that ρ = Ψ Ψ†.
        let mut psi = ComplexMatrix::zeros(kd, rd);
        for (flat, &(k, r)) in map.iter().enumerate() {
            psi[(k, r)] = self.amplitudes[flat];
        }
        let rho = psi.matmul(&psi.adjoint())?;
        Ok(DensityMatrix::from_trusted(
            keep.iter().map(|&k| self.dims[k]).collect(),
            rho,
        ))
    }
}

impl PartialTrace for DensityMatrix {
    fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let (kd, _rd, map) = index_split(&self.dims, keep)?;
        let mut out = ComplexMatrix::zeros(kd, kd);
        for (a, &(ka, ra)) in map.iter().enumerate() {
            for (b, &(kb, rb)) in map.iter().enumerate() {
                if ra == rb {
                    out[(ka, kb)] += self.matrix[(a, b)];
                }
            }
        }
        Ok(DensityMatrix::from_trusted(
            keep.iter().map(|&k| self.dims[k]).collect(),
            out,
        ))
    }
}

/// Haar-random pure state: a normalised vector of i.i.d. standard complex
/// Gaussians.
pub fn haar_random_pure(dims: &[usize], rng: &mut impl Rng) -> Result<PureState> {
    let total = check_dims(dims)?;
    let amps = (0..total).map(|_| standard_complex_normal(rng)).collect();
    PureState::normalized(dims, amps)
}

/// Haar-random d×d unitary (QR of a Ginibre matrix with the phase fix that
/// makes the distribution exactly Haar).
pub fn haar_random_unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..d)
        .map(|_| (0..d).map(|_| standard_complex_normal(rng)).collect())
        .collect();
    // Modified Gram-Schmidt; the diagonal of R is then real positive, which
    // is the phase convention that yields the Haar measure.
    for j in 0..d {
        for i in 0..j {
            let (head, tail) = cols.split_at_mut(j);
            let proj = inner(&head[i], &tail[0]);
            for (x, y) in tail[0].iter_mut().zip(&head[i]) {
                *x -= proj * y;
            }
        }
        let n = vec_norm(&cols[j]);
        for x in &mut cols[j] {
            *x /= n;
        }
    }
    let mut u = ComplexMatrix::zeros(d, d);
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            u[(i, j)] = x;
        }
    }
    u
}

/// Spectral purification Σₖ √pₖ |vₖ⟩|k⟩ with an ancilla of dimension equal
/// to the numerical rank of `rho`. The ancilla is appended as the last factor.
pub fn purify(rho: &DensityMatrix) -> Result<PureState> {
    let eig = matkernel::eigh(rho.matrix())?;
    let support: Vec<usize> = (0..eig.values.len())
        .rev()
        .filter(|&k| eig.values[k] > RANK_TOL)
        .collect();
    let r = support.len().max(1);
    let n = rho.dim();
    let mut amps = vec![Complex64::new(0.0, 0.0); n * r];
    for (slot, &k) in support.iter().enumerate() {
        let weight = eig.values[k].sqrt();
        for i in 0..n {
            amps[i * r + slot] = eig.vectors[(i, k)] * weight;
        }
    }
    let mut dims = rho.dims().to_vec();
    dims.push(r);
    PureState::normalized(&dims, amps)
}

/// (a + ε b)/(1 + ε).
pub fn mix(a: &DensityMatrix, b: &DensityMatrix, eps: f64) -> Result<DensityMatrix> {
    if a.dims != b.dims {
        return Err(Error::Dimension(format!(
            "cannot mix states with dims {:?} and {:?}",
            a.dims, b.dims
        )));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!(
            "mixing weight must be finite and >= 0, got {eps}"
        )));
    }
    let m = (&a.matrix + &b.matrix.scale(eps)).scale(1.0 / (1.0 + eps));
    Ok(DensityMatrix::from_trusted(a.dims.clone(), m))
}

/// (ψ + ε ψ_R)/‖ψ + ε ψ_R‖.
pub fn perturb_pure(psi: &PureState, psi_r: &PureState, eps: f64) -> Result<PureState> {
    if psi.dims != psi_r.dims {
        return Err(Error::Dimension(format!(
            "cannot combine states with dims {:?} and {:?}",
            psi.dims, psi_r.dims
        )));
    }
    let amps: Vec<Complex64> = psi
        .amplitudes
        .iter()
        .zip(&psi_r.amplitudes)
        .map(|(a, b)| a + b * eps)
        .collect();
    let norm = vec_norm(&amps);
    if norm < 1e-12 {
        return Err(Error::DegenerateCancellation(norm));
    }
    PureState::normalized(&psi.dims, amps)
}

/// Σᵢ wᵢ |vᵢ⟩⟨vᵢ| with (w₁, w₂, w₃) = (cos²θ, sin²θ cos²φ, sin²θ sin²φ).
pub fn fixed_eigvecs_state(
    dims: &[usize],
    eigvecs: &[Vec<Complex64>; 3],
    theta: f64,
    phi: f64,
) -> Result<DensityMatrix> {
    let total = check_dims(dims)?;
    for (i, v) in eigvecs.iter().enumerate() {
        if v.len() != total {
            return Err(Error::Dimension(format!("eigenvector {i} has length {}", v.len())));
        }
        for (j, w) in eigvecs.iter().enumerate() {
            let expect = if i == j { 1.0 } else { 0.0 };
            if (inner(v, w) - expect).norm() > STATE_TOL {
                return Err(Error::Contract("eigenvectors are not orthonormal".into()));
            }
        }
    }
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let weights = [ct * ct, st * st * cp * cp, st * st * sp * sp];
    let mut m = ComplexMatrix::zeros(total, total);
    for (w, v) in weights.iter().zip(eigvecs) {
        m = &m + &ComplexMatrix::projector(v).scale(*w);
    }
    Ok(DensityMatrix::from_trusted(dims.to_vec(), m))
}

/// Random state with the given three eigenvectors: θ ~ U[0, π], φ ~ U[0, 2π].
pub fn random_fixed_eigvecs(
    dims: &[usize],
    eigvecs: &[Vec<Complex64>; 3],
    rng: &mut impl Rng,
) -> Result<DensityMatrix> {
    let theta = rng.random_range(0.0..std::f64::consts::PI);
    let phi = rng.random_range(0.0..2.0 * std::f64::consts::PI);
    fixed_eigvecs_state(dims, eigvecs, theta, phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn ghz() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut a = vec![c(0.0); 8];
        a[0] = c(s);
        a[7] = c(s);
        PureState::new(&[2, 2, 2], a).unwrap()
    }

    #[test]
    fn haar_is_reproducible_and_normalised() {
        let a = haar_random_pure(&[2, 2, 2], &mut StreamSeed::new(7, 3).rng()).unwrap();
        let b = haar_random_pure(&[2, 2, 2], &mut StreamSeed::new(7, 3).rng()).unwrap();
        let other = haar_random_pure(&[2, 2, 2], &mut StreamSeed::new(7, 4).rng()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, other);
        assert_eq!(a.dim(), 8);
        for dims in [vec![2, 2], vec![2, 2, 3], vec![2, 2, 4], vec![3, 3]] {
            let s = haar_random_pure(&dims, &mut StreamSeed::new(1, 0).rng()).unwrap();
            assert!((s.norm() - 1.0).abs() <= 1e-12);
        }
        assert!(haar_random_pure(&[], &mut StreamSeed::new(1, 0).rng()).is_err());
    }

    #[test]
    fn ghz_reduces_to_classical_mixture() {
        let rho = ghz().reduce(&[0, 1]).unwrap();
        let expect = ComplexMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5]);
        assert!(rho.matrix().max_abs_diff(&expect) < 1e-15);
        assert_eq!(rho.dims(), &[2, 2]);
    }

    #[test]
    fn product_state_reduces_to_projector() {
        let a = PureState::from_real(&[2], &[0.6, 0.8]).unwrap();
        let b = PureState::from_real(&[2], &[1.0, 1.0]).unwrap();
        let rho = a.tensor(&b).unwrap().reduce(&[0]).unwrap();
        assert!(rho.matrix().max_abs_diff(&a.to_density().into_matrix()) < 1e-15);
        assert_eq!(rho.rank(), 1);
    }

    #[test]
    fn reduce_rejects_bad_indices() {
        let s = ghz();
        assert!(matches!(s.reduce(&[]), Err(Error::InvalidIndices(_))));
        assert!(matches!(s.reduce(&[3]), Err(Error::InvalidIndices(_))));
        assert!(matches!(s.reduce(&[1, 1]), Err(Error::InvalidIndices(_))));
    }

    #[test]
    fn reduce_of_density_matches_reduce_of_pure() {
        let psi = haar_random_pure(&[2, 3, 2], &mut StreamSeed::new(2, 0).rng()).unwrap();
        let rho = psi.to_density();
        for keep in [vec![0], vec![1], vec![2, 0], vec![0, 1], vec![1, 2]] {
            let a = psi.reduce(&keep).unwrap();
            let b = rho.reduce(&keep).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-14);
            assert!((a.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn purify_pure_maximally_mixed_and_random() {
        let phi = PureState::from_real(&[2, 2], &[0.1, 0.7, -0.3, 0.2]).unwrap();
        let p = purify(&phi.to_density()).unwrap();
        assert_eq!(p.dims(), &[2, 2, 1]);
        assert!((p.overlap(&PureState::new(&[2, 2, 1], phi.amplitudes().to_vec()).unwrap()) - 1.0).abs() < 1e-12);

        let mixed = DensityMatrix::maximally_mixed(&[2, 2]).unwrap();
        let p = purify(&mixed).unwrap();
        assert_eq!(p.dims(), &[2, 2, 4]);
        assert!((p.reduce(&[0, 1]).unwrap().purity() - 0.25).abs() < 1e-12);

        let mut rng = StreamSeed::new(3, 0).rng();
        for k in 1..=4 {
            let rho = haar_random_pure(&[2, 2, k], &mut rng).unwrap().reduce(&[0, 1]).unwrap();
            let p = purify(&rho).unwrap();
            assert_eq!(p.dims()[2], k);
            let back = p.reduce(&[0, 1]).unwrap();
            assert!(back.matrix().max_abs_diff(rho.matrix()) <= 1e-9);
        }
    }

    #[test]
    fn mix_limits_and_errors() {
        let mut rng = StreamSeed::new(4, 0).rng();
        let a = haar_random_pure(&[2, 2, 2], &mut rng).unwrap().reduce(&[0, 1]).unwrap();
        let b = haar_random_pure(&[2, 2, 3], &mut rng).unwrap().reduce(&[0, 1]).unwrap();
        assert!(mix(&a, &b, 0.0).unwrap().matrix().max_abs_diff(a.matrix()) < 1e-15);
        assert!(mix(&a, &b, 1e6).unwrap().matrix().max_abs_diff(b.matrix()) < 1e-5);
        let m = mix(&a, &b, 0.51).unwrap();
        assert!(DensityMatrix::new(m.dims(), m.matrix().clone()).is_ok());
        let single = DensityMatrix::maximally_mixed(&[4]).unwrap();
        assert!(matches!(mix(&a, &single, 0.5), Err(Error::Dimension(_))));
        assert!(matches!(mix(&a, &b, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn perturb_pure_edge_cases() {
        let mut rng = StreamSeed::new(5, 0).rng();
        let psi = haar_random_pure(&[2, 2, 2], &mut rng).unwrap();
        let r = haar_random_pure(&[2, 2, 2], &mut rng).unwrap();
        assert_eq!(perturb_pure(&psi, &r, 0.0).unwrap(), psi);
        let same = perturb_pure(&psi, &psi, 0.7).unwrap();
        assert!((same.overlap(&psi) - 1.0).abs() < 1e-12);
        let out = perturb_pure(&psi, &r, 0.51).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-12);
        let minus = PureState::new(psi.dims(), psi.amplitudes().iter().map(|a| -a).collect()).unwrap();
        assert!(matches!(
            perturb_pure(&psi, &minus, 1.0),
            Err(Error::DegenerateCancellation(_))
        ));
    }

    #[test]
    fn fixed_eigvecs_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v1 = vec![c(s), c(0.0), c(0.0), c(s)];
        let v2 = vec![c(0.0), c(s), c(s), c(0.0)];
        let v3 = vec![c(0.0), c(s), c(-s), c(0.0)];
        let vecs = [v1.clone(), v2.clone(), v3.clone()];
        let r = fixed_eigvecs_state(&[2, 2], &vecs, 0.0, 1.3).unwrap();
        assert!(r.matrix().max_abs_diff(&ComplexMatrix::projector(&v1)) < 1e-15);
        let r = fixed_eigvecs_state(&[2, 2], &vecs, std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_4).unwrap();
        let expect = (&ComplexMatrix::projector(&v2) + &ComplexMatrix::projector(&v3)).scale(0.5);
        assert!(r.matrix().max_abs_diff(&expect) < 1e-15);

        let mut rng = StreamSeed::new(6, 0).rng();
        for _ in 0..100 {
            let r = random_fixed_eigvecs(&[2, 2], &vecs, &mut rng).unwrap();
            assert!(r.rank() <= 3);
            assert!(DensityMatrix::new(r.dims(), r.matrix().clone()).is_ok());
        }
        let bad = [v1.clone(), v1, v3];
        assert!(matches!(
            fixed_eigvecs_state(&[2, 2], &bad, 0.1, 0.1),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = StreamSeed::new(8, 0).rng();
        for d in [2, 3, 4] {
            let u = haar_random_unitary(d, &mut rng);
            let id = u.adjoint().matmul(&u).unwrap();
            assert!(id.max_abs_diff(&ComplexMatrix::identity(d)) < 1e-13);
        }
    }

    #[test]
    fn density_validation() {
        let bad_trace = ComplexMatrix::diag_real(&[0.5, 0.4, 0.0, 0.0]);
        assert!(DensityMatrix::new(&[2, 2], bad_trace).is_err());
        let negative = ComplexMatrix::diag_real(&[1.2, -0.2, 0.0, 0.0]);
        assert!(DensityMatrix::new(&[2, 2], negative).is_err());
        let wrong_size = ComplexMatrix::identity(3).scale(1.0 / 3.0);
        assert!(DensityMatrix::new(&[2, 2], wrong_size).is_err());
    }
}
