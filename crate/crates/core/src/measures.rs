//! Scalar correlation and entanglement measures.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{self, ComplexMatrix, Lu};
use crate::permutations::{self, Side};
use crate::qstate::{DensityMatrix, PartialTrace, PureState};

/// Raw values may leave [0, 1] by this much before it is treated as an error.
pub const RANGE_TOL: f64 = 1e-9;

/// A pivot (or singular value) at or below this fraction of the largest
/// entry (or singular value) marks the realigned array as rank deficient.
pub const RANK_GUARD: f64 = 1e-12;

/// (1/3)^{3/4}: the largest R₁₂ of a separable two-qubit state.
pub fn separable_r12_max() -> f64 {
    (1.0f64 / 3.0).powf(0.75)
}

/// Slack added to the witness threshold so that states sitting exactly on
/// it are not reported entangled because of rounding.
pub const WITNESS_MARGIN: f64 = 1e-12;

fn clamp_unit(name: &'static str, value: f64) -> Result<f64> {
    if !(-RANGE_TOL..=1.0 + RANGE_TOL).contains(&value) {
        return Err(Error::OutOfRange { name, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

fn require_two_qubit(rho: &DensityMatrix, what: &str) -> Result<()> {
    if !rho.is_two_qubit() {
        return Err(Error::Dimension(format!(
            "{what} needs a two-qubit state, got dims {:?}",
            rho.dims()
        )));
    }
    Ok(())
}

fn square_dims(rho: &DensityMatrix) -> Result<usize> {
    match rho.dims() {
        &[d1, d2] if d1 == d2 => Ok(d1),
        &[d1, d2] => Err(Error::UnsupportedDimension(format!(
            "R12 needs equal local dimensions, got {d1} and {d2}"
        ))),
        dims => Err(Error::Dimension(format!(
            "expected a bipartite state, got dims {dims:?}"
        ))),
    }
}

/// R₁₂ = d |det R(ρ^{T₂})|^{1/d²}, computed from an LU factorisation.
///
/// Numerically rank-deficient arrays give exactly 0.
pub fn r12(rho: &DensityMatrix) -> Result<f64> {
    let d = square_dims(rho)?;
    let m = permutations::realigned_pt(rho)?.matrix;
    let scale = m.norm_max();
    let lu = Lu::new(&m)?;
    let pivots = lu.pivots();
    if scale == 0.0 || pivots.iter().any(|p| p.norm() <= RANK_GUARD * scale) {
        return Ok(0.0);
    }
    let log_det: f64 = pivots.iter().map(|p| p.norm().ln()).sum();
    let n = (d * d) as f64;
    clamp_unit("R12", d as f64 * (log_det / n).exp())
}

/// R₁₂ as d times the geometric mean of the singular values of R(ρ^{T₂}).
pub fn r12_singular_values(rho: &DensityMatrix) -> Result<f64> {
    let d = square_dims(rho)?;
    let m = permutations::realigned_pt(rho)?.matrix;
    let sv = matkernel::singular_values(&m)?;
    let largest = sv[0];
    if largest == 0.0 || sv.iter().any(|&s| s <= RANK_GUARD * largest) {
        return Ok(0.0);
    }
    let n = sv.len() as f64;
    let log_mean = sv.iter().map(|s| s.ln()).sum::<f64>() / n;
    clamp_unit("R12", d as f64 * log_mean.exp())
}

fn sigma_y_sigma_y() -> ComplexMatrix {
    // σ_y ⊗ σ_y is real: anti-diagonal (-1, 1, 1, -1).
    let mut m = ComplexMatrix::zeros(4, 4);
    for (i, s) in [-1.0, 1.0, 1.0, -1.0].into_iter().enumerate() {
        m[(i, 3 - i)] = Complex64::new(s, 0.0);
    }
    m
}

/// Wootters concurrence.
///
/// The square roots of the eigenvalues of ρρ̃ are taken as the singular
/// values of √ρ (σ_y⊗σ_y) √ρ*, which avoids a non-Hermitian eigenproblem.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubit(rho, "concurrence")?;
    let sqrt_rho = matkernel::eigh(rho.matrix())?.reconstruct_with(|x| x.max(0.0).sqrt());
    let yy = sigma_y_sigma_y();
    let m = sqrt_rho.matmul(&yy)?.matmul(&sqrt_rho.conj())?;
    let s = matkernel::singular_values(&m)?;
    clamp_unit("C12", (s[0] - s[1] - s[2] - s[3]).max(0.0))
}

/// 2|ad − bc| for a two-qubit pure state a|00⟩ + b|01⟩ + c|10⟩ + d|11⟩.
pub fn pure_concurrence(psi: &PureState) -> Result<f64> {
    if psi.dims() != [2, 2] {
        return Err(Error::Dimension(format!("expected two qubits, got {:?}", psi.dims())));
    }
    let a = psi.amplitudes();
    clamp_unit("C12", 2.0 * (a[0] * a[3] - a[1] * a[2]).norm())
}

/// max{0, −2 μ_min(ρ^{T₂})}.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubit(rho, "negativity")?;
    let pt = permutations::partial_transpose(rho, Side::Second)?;
    let mu_min = matkernel::eig_hermitian(&pt)?[0];
    clamp_unit("N12", (-2.0 * mu_min).max(0.0))
}

/// τ = 4 det ρ₁ − C₁₂² − C₁₃² for a three-qubit pure state.
pub fn three_tangle(psi: &PureState) -> Result<f64> {
    if psi.dims() != [2, 2, 2] {
        return Err(Error::Dimension(format!(
            "3-tangle needs three qubits, got {:?}",
            psi.dims()
        )));
    }
    let rho1 = psi.reduce(&[0])?;
    let m = rho1.matrix();
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
    let c12 = concurrence(&psi.reduce(&[0, 1])?)?;
    let c13 = concurrence(&psi.reduce(&[0, 2])?)?;
    clamp_unit("tau", 4.0 * det - c12 * c12 - c13 * c13)
}

/// τ = (R₁₂⁴ − C₁₂⁴)/C₁₂², valid for rank-2 states with a three-qubit purification.
pub fn tau_from_r_c(r12: f64, c12: f64) -> Result<f64> {
    if !(c12 > 1e-12) {
        return Err(Error::UndefinedRatio(c12));
    }
    Ok((r12.powi(4) - c12.powi(4)) / (c12 * c12))
}

/// Trace norm of R(ρ), without partial transpose.
pub fn ccnr_norm(rho: &DensityMatrix) -> Result<f64> {
    let (d1, d2) = match rho.dims() {
        &[d1, d2] => (d1, d2),
        dims => {
            return Err(Error::Dimension(format!(
                "expected a bipartite state, got dims {dims:?}"
            )))
        }
    };
    matkernel::trace_norm(&permutations::realign(rho.matrix(), d1, d2)?.matrix)
}

/// D/(D−1) · (1 − tr ρ²); for two qubits this is (4/3)(1 − tr ρ²).
pub fn linear_entropy(rho: &DensityMatrix) -> Result<f64> {
    let n = rho.dim() as f64;
    if rho.dim() < 2 {
        return Ok(0.0);
    }
    clamp_unit("linear entropy", n / (n - 1.0) * (1.0 - rho.purity()))
}

/// True when R₁₂ exceeds (1/3)^{3/4}, which certifies entanglement of a
/// two-qubit state.
pub fn witness_r12(rho: &DensityMatrix) -> Result<bool> {
    require_two_qubit(rho, "the R12 witness")?;
    Ok(r12(rho)? > separable_r12_max() + WITNESS_MARGIN)
}

/// One sampled two-qubit state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureRecord {
    pub rank: usize,
    pub c12: f64,
    pub n12: f64,
    pub r12: f64,
    /// Present only when the state came from a three-qubit pure parent.
    pub tau: Option<f64>,
    pub family: String,
}

impl MeasureRecord {
    pub fn from_state(rho: &DensityMatrix, tau: Option<f64>, family: impl Into<String>) -> Result<Self> {
        Ok(Self {
            rank: rho.rank(),
            c12: concurrence(rho)?,
            n12: negativity(rho)?,
            r12: r12(rho)?,
            tau,
            family: family.into(),
        })
    }

    /// Measures of ρ₁₂ for a three-qubit pure state, including τ.
    pub fn from_three_qubit(psi: &PureState, family: impl Into<String>) -> Result<Self> {
        let tau = three_tangle(psi)?;
        Self::from_state(&psi.reduce(&[0, 1])?, Some(tau), family)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{haar_random_pure, StreamSeed};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn bell_phi_plus() -> Vec<Complex64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        vec![c(s), c(0.0), c(0.0), c(s)]
    }

    fn werner(p: f64) -> DensityMatrix {
        let m =
            &ComplexMatrix::projector(&bell_phi_plus()).scale(p) + &ComplexMatrix::identity(4).scale((1.0 - p) / 4.0);
        DensityMatrix::new(&[2, 2], m).unwrap()
    }

    fn schmidt(a2: f64) -> PureState {
        PureState::new(&[2, 2], vec![c(a2.sqrt()), c(0.0), c(0.0), c((1.0 - a2).sqrt())]).unwrap()
    }

    #[test]
    fn r12_examples() {
        assert!((r12(&werner(1.0)).unwrap() - 1.0).abs() < 1e-12);
        assert!((r12(&werner(0.5)).unwrap() - 0.5946035575).abs() < 1e-10);
        let product = PureState::from_real(&[2, 2], &[0.3, 0.4, 0.6, 0.8]).unwrap();
        assert_eq!(r12(&product.to_density()).unwrap(), 0.0);
        let ghz_reduced = DensityMatrix::new(&[2, 2], ComplexMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5])).unwrap();
        assert_eq!(r12(&ghz_reduced).unwrap(), 0.0);
        let unequal = DensityMatrix::maximally_mixed(&[2, 3]).unwrap();
        assert!(matches!(r12(&unequal), Err(Error::UnsupportedDimension(_))));
    }

    #[test]
    fn r12_routes_agree() {
        let mut rng = StreamSeed::new(40, 0).rng();
        for env in 1..=4 {
            for _ in 0..50 {
                let rho = haar_random_pure(&[2, 2, env], &mut rng)
                    .unwrap()
                    .reduce(&[0, 1])
                    .unwrap();
                let a = r12(&rho).unwrap();
                let b = r12_singular_values(&rho).unwrap();
                assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn concurrence_and_negativity_examples() {
        let psi = schmidt(0.8);
        let rho = psi.to_density();
        assert!((concurrence(&rho).unwrap() - 0.8).abs() < 1e-12);
        assert!((pure_concurrence(&psi).unwrap() - 0.8).abs() < 1e-12);
        assert!((negativity(&rho).unwrap() - 0.8).abs() < 1e-12);
        assert!((concurrence(&werner(0.5)).unwrap() - 0.25).abs() < 1e-12);
        assert!(negativity(&werner(1.0 / 3.0)).unwrap() < 1e-12);
        let x = DensityMatrix::new(
            &[2, 2],
            ComplexMatrix::from_real(
                4,
                4,
                &[
                    0.5, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.5,
                ],
            )
            .unwrap(),
        )
        .unwrap();
        assert!((concurrence(&x).unwrap() - 1.0).abs() < 1e-12);
        let qutrits = DensityMatrix::maximally_mixed(&[3, 3]).unwrap();
        assert!(concurrence(&qutrits).is_err());
        assert!(negativity(&qutrits).is_err());
    }

    #[test]
    fn concurrence_matches_pure_formula() {
        let mut rng = StreamSeed::new(41, 0).rng();
        for _ in 0..200 {
            let psi = haar_random_pure(&[2, 2], &mut rng).unwrap();
            let a = concurrence(&psi.to_density()).unwrap();
            let b = pure_concurrence(&psi).unwrap();
            assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn three_tangle_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut a = vec![c(0.0); 8];
        a[0] = c(s);
        a[7] = c(s);
        let ghz = PureState::new(&[2, 2, 2], a).unwrap();
        assert!((three_tangle(&ghz).unwrap() - 1.0).abs() < 1e-12);
        let w = PureState::from_real(&[2, 2, 2], &[0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(three_tangle(&w).unwrap() < 1e-12);
        assert!(three_tangle(&schmidt(0.5).tensor(&PureState::basis(&[1], 0).unwrap()).unwrap()).is_err());
    }

    #[test]
    fn tau_from_r_c_examples() {
        assert_eq!(tau_from_r_c(0.5, 0.5).unwrap(), 0.0);
        assert!((tau_from_r_c(0.6f64.sqrt(), 0.6).unwrap() - 0.64).abs() < 1e-12);
        assert!((tau_from_r_c(0.7589466, 0.6).unwrap() - 0.5616).abs() < 1e-6);
        assert!(matches!(tau_from_r_c(0.3, 0.0), Err(Error::UndefinedRatio(_))));
    }

    #[test]
    fn ccnr_and_linear_entropy() {
        let mixed = DensityMatrix::maximally_mixed(&[2, 2]).unwrap();
        assert!((ccnr_norm(&mixed).unwrap() - 0.5).abs() < 1e-12);
        assert!((ccnr_norm(&werner(1.0)).unwrap() - 2.0).abs() < 1e-12);
        assert!(ccnr_norm(&werner(1.0 / 3.0)).unwrap() <= 1.0 + 1e-12);
        assert!(linear_entropy(&schmidt(0.3).to_density()).unwrap() < 1e-12);
        assert!((linear_entropy(&mixed).unwrap() - 1.0).abs() < 1e-12);
        for p in [0.0, 0.2, 0.7, 1.0] {
            assert!((linear_entropy(&werner(p)).unwrap() - (1.0 - p * p)).abs() < 1e-12);
        }
    }

    #[test]
    fn witness_examples() {
        assert!(witness_r12(&werner(0.9)).unwrap());
        assert!(!witness_r12(&DensityMatrix::maximally_mixed(&[2, 2]).unwrap()).unwrap());
        // (1−p)/2 (|ψ⁺⟩⟨ψ⁺| + |ψ⁻⟩⟨ψ⁻|) + p|φ⁺⟩⟨φ⁺| at p = 1/3 sits exactly on the threshold.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi_plus = vec![c(0.0), c(s), c(s), c(0.0)];
        let psi_minus = vec![c(0.0), c(s), c(-s), c(0.0)];
        let p = 1.0 / 3.0;
        let rho = DensityMatrix::from_ensemble(
            &[2, 2],
            &[(1.0 - p) / 2.0, (1.0 - p) / 2.0, p],
            &[psi_plus, psi_minus, bell_phi_plus()],
        )
        .unwrap();
        assert!((r12(&rho).unwrap() - separable_r12_max()).abs() < 1e-12);
        assert!(!witness_r12(&rho).unwrap());
    }

    #[test]
    fn range_check_rejects_garbage() {
        assert!(clamp_unit("x", 1.0 + 1e-10).unwrap() == 1.0);
        assert!(clamp_unit("x", -1e-10).unwrap() == 0.0);
        assert!(matches!(clamp_unit("x", 1.1), Err(Error::OutOfRange { .. })));
        assert!(clamp_unit("x", f64::NAN).is_err());
    }

    #[test]
    fn record_from_three_qubit_state() {
        let psi = haar_random_pure(&[2, 2, 2], &mut StreamSeed::new(42, 0).rng()).unwrap();
        let rec = MeasureRecord::from_three_qubit(&psi, "haar").unwrap();
        assert_eq!(rec.rank, 2);
        let tau = rec.tau.unwrap();
        let lhs = rec.r12.powi(4);
        let rhs = rec.c12 * rec.c12 * (rec.c12 * rec.c12 + tau);
        assert!((lhs - rhs).abs() <= 1e-8);
    }
}
