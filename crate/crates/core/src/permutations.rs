//! Partial transpose, realignment and the matrices built from them.
//!
//! For a bipartite operator on C^{d1} ⊗ C^{d2} the row index (i, α) is
//! flattened as i·d2 + α.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matkernel::{self, ComplexMatrix};
use crate::qstate::{DensityMatrix, PartialTrace, PureState};

/// Which factor of a bipartite system an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

fn bipartite_dims(rho: &DensityMatrix) -> Result<(usize, usize)> {
    match rho.dims() {
        &[d1, d2] => Ok((d1, d2)),
        dims => Err(Error::Dimension(format!(
            "expected a bipartite state, got dims {dims:?}"
        ))),
    }
}

fn equal_dims(rho: &DensityMatrix) -> Result<usize> {
    let (d1, d2) = bipartite_dims(rho)?;
    if d1 != d2 {
        return Err(Error::UnsupportedDimension(format!(
            "local dimensions {d1} and {d2} differ"
        )));
    }
    Ok(d1)
}

/// Partial transpose of a bipartite operator given its factor dimensions.
pub fn partial_transpose_matrix(m: &ComplexMatrix, d1: usize, d2: usize, side: Side) -> Result<ComplexMatrix> {
    let n = d1 * d2;
    if m.rows() != n || m.cols() != n {
        return Err(Error::Dimension(format!(
            "{}x{} matrix on a {d1}x{d2} system",
            m.rows(),
            m.cols()
        )));
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..d1 {
        for a in 0..d2 {
            for j in 0..d1 {
                for b in 0..d2 {
                    let (src_row, src_col) = match side {
                        Side::Second => (i * d2 + b, j * d2 + a),
                        Side::First => (j * d2 + a, i * d2 + b),
                    };
                    out[(i * d2 + a, j * d2 + b)] = m[(src_row, src_col)];
                }
            }
        }
    }
    Ok(out)
}

/// ρ^{T₁} or ρ^{T₂}.
pub fn partial_transpose(rho: &DensityMatrix, side: Side) -> Result<ComplexMatrix> {
    let (d1, d2) = bipartite_dims(rho)?;
    partial_transpose_matrix(rho.matrix(), d1, d2, side)
}

/// Output of the realignment permutation: a d1²×d2² array with no state
/// semantics.
#[derive(Debug, Clone, PartialEq)]
pub struct RealignedMatrix {
    pub d1: usize,
    pub d2: usize,
    pub matrix: ComplexMatrix,
}

impl RealignedMatrix {
    /// Realigns back; only defined when d1 = d2.
    pub fn realign_again(&self) -> Result<RealignedMatrix> {
        if self.d1 != self.d2 {
            return Err(Error::UnsupportedDimension(format!(
                "realigned array of a {}x{} system is rectangular",
                self.d1, self.d2
            )));
        }
        realign(&self.matrix, self.d1, self.d2)
    }
}

/// R(m)[(i·d1 + j), (α·d2 + β)] = m[(i·d2 + α), (j·d2 + β)].
pub fn realign(m: &ComplexMatrix, d1: usize, d2: usize) -> Result<RealignedMatrix> {
    let n = d1 * d2;
    if m.rows() != n || m.cols() != n {
        return Err(Error::Dimension(format!(
            "{}x{} matrix cannot be realigned as a {d1}x{d2} system",
            m.rows(),
            m.cols()
        )));
    }
    let mut out = ComplexMatrix::zeros(d1 * d1, d2 * d2);
    for i in 0..d1 {
        for a in 0..d2 {
            for j in 0..d1 {
                for b in 0..d2 {
                    out[(i * d1 + j, a * d2 + b)] = m[(i * d2 + a, j * d2 + b)];
                }
            }
        }
    }
    Ok(RealignedMatrix { d1, d2, matrix: out })
}

/// Stacks the rows of `m` into one column.
pub fn reshape_vec(m: &ComplexMatrix) -> Vec<Complex64> {
    m.as_slice().to_vec()
}

/// R(ρ^{T₂}) for a bipartite state.
pub fn realigned_pt(rho: &DensityMatrix) -> Result<RealignedMatrix> {
    let (d1, d2) = bipartite_dims(rho)?;
    realign(&partial_transpose(rho, Side::Second)?, d1, d2)
}

/// P = R(ρ^{T₂}) R(ρ^{T₂})†, a d²×d² positive matrix with trace tr ρ².
#[derive(Debug, Clone, PartialEq)]
pub struct LinkProduct {
    pub d: usize,
    pub matrix: ComplexMatrix,
}

impl LinkProduct {
    /// Ascending, real spectrum.
    pub fn eigenvalues(&self) -> Vec<f64> {
        matkernel::eig_hermitian(&self.matrix).expect("link product is Hermitian")
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

pub fn link_product(rho: &DensityMatrix) -> Result<LinkProduct> {
    let d = equal_dims(rho)?;
    let m = realigned_pt(rho)?.matrix;
    let p = m.matmul(&m.adjoint())?.hermitian_part();
    Ok(LinkProduct { d, matrix: p })
}

/// L(a, b) = R(ρ_ab^{T_b}), with ρ_ab the reduced state of `a` and `b` in that order.
fn link(psi: &PureState, a: usize, b: usize) -> Result<ComplexMatrix> {
    let rho = psi.reduce(&[a, b])?;
    let d = equal_dims(&rho)?;
    realign(&partial_transpose(&rho, Side::Second)?, d, d).map(|r| r.matrix)
}

/// Ordered product of link transforms around the closed path
/// `path[0] → path[1] → … → path[0]`:
/// L(i₁, i_K) L(i_K, i_{K−1}) ⋯ L(i₂, i₁).
pub fn path_matrix(psi: &PureState, path: &[usize]) -> Result<ComplexMatrix> {
    if path.len() < 2 {
        return Err(Error::InvalidIndices("a closed path needs at least two labels".into()));
    }
    let n = psi.dims().len();
    for (k, &label) in path.iter().enumerate() {
        if label >= n {
            return Err(Error::InvalidIndices(format!(
                "label {label} out of range for {n} subsystems"
            )));
        }
        let next = path[(k + 1) % path.len()];
        if label == next {
            return Err(Error::InvalidIndices(format!(
                "path repeats label {label} consecutively"
            )));
        }
    }
    let k = path.len();
    let mut acc = link(psi, path[0], path[k - 1])?;
    for step in (1..k).rev() {
        acc = acc.matmul(&link(psi, path[step], path[step - 1])?)?;
    }
    Ok(acc)
}

/// Eigenvalues of [`path_matrix`]; local-unitary invariants of `psi`.
pub fn path_invariant_spectrum(psi: &PureState, path: &[usize]) -> Result<Vec<Complex64>> {
    matkernel::eig_general(&path_matrix(psi, path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{haar_random_pure, StreamSeed};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_rho(dims: &[usize], env: usize, seed: u64) -> DensityMatrix {
        let mut full = dims.to_vec();
        full.push(env);
        let keep: Vec<usize> = (0..dims.len()).collect();
        haar_random_pure(&full, &mut StreamSeed::new(seed, 0).rng())
            .unwrap()
            .reduce(&keep)
            .unwrap()
    }

    #[test]
    fn displayed_two_qubit_array() {
        // Entries a_{kl} with k, l = 1..4, Hermitian.
        let mut m = ComplexMatrix::zeros(4, 4);
        for k in 0..4 {
            for l in 0..4 {
                m[(k, l)] = if k == l {
                    c(10.0 * (k + 1) as f64, 0.0)
                } else if k < l {
                    c((k + 1) as f64, (l + 1) as f64)
                } else {
                    c((l + 1) as f64, -((k + 1) as f64))
                };
            }
        }
        let a = |k: usize, l: usize| m[(k - 1, l - 1)];
        let r = realign(&partial_transpose_matrix(&m, 2, 2, Side::Second).unwrap(), 2, 2)
            .unwrap()
            .matrix;
        let expect = [
            [a(1, 1), a(1, 2).conj(), a(1, 2), a(2, 2)],
            [a(1, 3), a(2, 3), a(1, 4), a(2, 4)],
            [a(1, 3).conj(), a(1, 4).conj(), a(2, 3).conj(), a(2, 4).conj()],
            [a(3, 3), a(3, 4).conj(), a(3, 4), a(4, 4)],
        ];
        for (i, row) in expect.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                assert_eq!(r[(i, j)], x, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn involutions() {
        let rho = random_rho(&[3, 3], 2, 1);
        for side in [Side::First, Side::Second] {
            let once = partial_transpose(&rho, side).unwrap();
            let twice = partial_transpose_matrix(&once, 3, 3, side).unwrap();
            assert_eq!(&twice, rho.matrix());
            assert!(once.hermiticity_defect() < 1e-15);
            assert!((once.trace() - rho.matrix().trace()).norm() < 1e-15);
        }
        let r = realign(rho.matrix(), 3, 3).unwrap();
        assert_eq!(&r.realign_again().unwrap().matrix, rho.matrix());
        let rect = realign(random_rho(&[2, 3], 1, 2).matrix(), 2, 3).unwrap();
        assert_eq!((rect.matrix.rows(), rect.matrix.cols()), (4, 9));
        assert!(rect.realign_again().is_err());
    }

    #[test]
    fn maximally_entangled_gives_half_swap() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = PureState::new(&[2, 2], vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap();
        let rho = phi.to_density();
        let pt = partial_transpose(&rho, Side::Second).unwrap();
        assert!((matkernel::eig_hermitian(&pt).unwrap()[0] + 0.5).abs() < 1e-14);
        let r = realigned_pt(&rho).unwrap().matrix;
        let mut swap = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                swap[(i * 2 + j, j * 2 + i)] = c(0.5, 0.0);
            }
        }
        assert!(r.max_abs_diff(&swap) < 1e-15);
        let p = link_product(&rho).unwrap();
        assert!(p.matrix.max_abs_diff(&ComplexMatrix::identity(4).scale(0.25)) < 1e-15);
    }

    #[test]
    fn product_state_realigns_to_rank_one() {
        let r1 = random_rho(&[2], 2, 3).into_matrix();
        let r2 = random_rho(&[2], 2, 4).into_matrix();
        let rho = DensityMatrix::new(&[2, 2], matkernel::kron(&r1, &r2)).unwrap();
        let m = realigned_pt(&rho).unwrap().matrix;
        let expect = ComplexMatrix::outer(&reshape_vec(&r1), &reshape_vec(&r2));
        assert!(m.max_abs_diff(&expect) < 1e-15);
        // The same array is R(ρ₁ ⊗ ρ₂ᵀ) with no partial transpose.
        let direct = realign(&matkernel::kron(&r1, &r2.transpose()), 2, 2).unwrap().matrix;
        assert!(direct.max_abs_diff(&expect) < 1e-15);
        let p = link_product(&rho).unwrap();
        let ev = p.eigenvalues();
        assert!(ev[..3].iter().all(|x| x.abs() < 1e-12));
        let expect_tr = r1.norm_fro().powi(2) * r2.norm_fro().powi(2);
        assert!((p.trace() - expect_tr).abs() < 1e-12);
    }

    #[test]
    fn reshape_examples() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 1.0)], vec![c(3.0, 0.0), c(4.0, 0.0)]]).unwrap();
        assert_eq!(
            reshape_vec(&m),
            vec![c(1.0, 0.0), c(2.0, 1.0), c(3.0, 0.0), c(4.0, 0.0)]
        );
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert_eq!(
            reshape_vec(&half),
            vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]
        );
    }

    #[test]
    fn link_product_trace_is_purity() {
        for (seed, env) in [(10, 1), (11, 2), (12, 3), (13, 4)] {
            let rho = random_rho(&[2, 2], env, seed);
            let p = link_product(&rho).unwrap();
            assert!((p.trace() - rho.purity()).abs() < 1e-12);
            assert!(p.matrix.hermiticity_defect() < 1e-14);
            assert!(p.eigenvalues()[0] > -1e-12);
        }
        let rho = random_rho(&[2, 3], 1, 5);
        assert!(matches!(link_product(&rho), Err(Error::UnsupportedDimension(_))));
    }

    #[test]
    fn classical_quantum_link_product_has_zero_modes() {
        // Σ p_i |i⟩⟨i| ⊗ ρ_i with orthonormal |i⟩.
        let d = 3;
        let mut m = ComplexMatrix::zeros(d * d, d * d);
        let weights = [0.5, 0.3, 0.2];
        for (i, &w) in weights.iter().enumerate() {
            let mut ket = vec![c(0.0, 0.0); d];
            ket[i] = c(1.0, 0.0);
            let local = random_rho(&[d], 2, 20 + i as u64).into_matrix();
            m = &m + &matkernel::kron(&ComplexMatrix::projector(&ket), &local).scale(w);
        }
        let rho = DensityMatrix::new(&[d, d], m).unwrap();
        let ev = link_product(&rho).unwrap().eigenvalues();
        let zeros = ev.iter().filter(|x| x.abs() < 1e-12).count();
        assert!(zeros >= d * d - d, "{ev:?}");
    }

    #[test]
    fn schmidt_path_spectrum() {
        let (a, d) = (0.8f64.sqrt(), 0.2f64.sqrt());
        let psi = PureState::new(&[2, 2], vec![c(a, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(d, 0.0)]).unwrap();
        let mut spec: Vec<f64> = path_invariant_spectrum(&psi, &[0, 1])
            .unwrap()
            .iter()
            .map(|z| {
                assert!(z.im.abs() < 1e-12);
                z.re
            })
            .collect();
        spec.sort_by(|x, y| y.total_cmp(x));
        for (got, want) in spec.iter().zip([0.64, 0.16, 0.16, 0.04]) {
            assert!((got - want).abs() < 1e-12, "{spec:?}");
        }
    }

    #[test]
    fn path_rejects_bad_labels_and_unequal_dims() {
        let psi = haar_random_pure(&[2, 2, 3], &mut StreamSeed::new(30, 0).rng()).unwrap();
        assert!(matches!(
            path_invariant_spectrum(&psi, &[0]),
            Err(Error::InvalidIndices(_))
        ));
        assert!(matches!(
            path_invariant_spectrum(&psi, &[0, 5]),
            Err(Error::InvalidIndices(_))
        ));
        assert!(matches!(
            path_invariant_spectrum(&psi, &[0, 0]),
            Err(Error::InvalidIndices(_))
        ));
        assert!(matches!(
            path_invariant_spectrum(&psi, &[0, 2]),
            Err(Error::UnsupportedDimension(_))
        ));
        assert!(path_invariant_spectrum(&psi, &[0, 1]).is_ok());
    }
}
