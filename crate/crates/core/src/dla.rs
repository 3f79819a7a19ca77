//! Dynamical Lie algebra closure: orthonormal basis, projections, structure
//! constants and ad-matrices.
//!
//! The closure runs breadth-first over pairwise brackets, admitting a new
//! element whenever its orthogonal-projection residual exceeds the
//! independence tolerance. Budgets on the dimension and on the Pauli support
//! surface exponential DLAs and slow-Pauli-expansion violations instead of
//! silently grinding.

use crate::pauli::HermitianPauliSum;
use crate::pauli::PauliString;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// Residual norm above which a candidate counts as linearly independent.
pub const INDEPENDENCE_TOL: f64 = 1e-10;

/// Residual norm below which an element is considered a member of the algebra.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DlaError {
    #[error("DLA dimension exceeded budget {max_dim}; the closure is still growing (exponential DLA, not snapshot-recoverable)")]
    DimBudgetExceeded { max_dim: usize },
    #[error("basis element supports {support} Pauli strings, over budget {max_support}; slow Pauli expansion violated")]
    SupportBudgetExceeded { support: usize, max_support: usize },
    #[error("element lies outside the algebra: projection residual {residual:.3e}")]
    NotInAlgebra { residual: f64 },
    #[error("generators must be nonzero and on a common qubit count")]
    InvalidGenerators,
}

/// Frobenius-orthonormal basis of a dynamical Lie algebra.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DlaBasis {
    n_qubits: usize,
    basis: Vec<HermitianPauliSum>,
}

/// The matrices of `ad` for each basis element, in that same basis.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StructureConstants {
    pub ad: Vec<DMatrix<f64>>,
}

impl DlaBasis {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn elements(&self) -> &[HermitianPauliSum] {
        &self.basis
    }

    pub fn element(&self, alpha: usize) -> &HermitianPauliSum {
        &self.basis[alpha]
    }

    /// Set of Pauli strings spanning all basis elements.
    pub fn pauli_support(&self) -> BTreeSet<PauliString> {
        self.basis
            .iter()
            .flat_map(|b| b.terms().map(|(p, _)| *p))
            .collect()
    }

    /// Coefficients of `a` over the basis together with the norm of what is
    /// left over; `a` is in the algebra iff the residual is below
    /// [`MEMBERSHIP_TOL`].
    pub fn project(&self, a: &HermitianPauliSum) -> (DVector<f64>, f64) {
        let coeffs = DVector::from_iterator(
            self.basis.len(),
            self.basis.iter().map(|b| b.inner(a)),
        );
        let mut residual = a.clone();
        for (b, c) in self.basis.iter().zip(coeffs.iter()) {
            residual = residual.add_scaled(b, -c);
        }
        (coeffs, residual.norm())
    }

    /// Reassemble an operator from basis coefficients.
    pub fn combine(&self, coeffs: &DVector<f64>) -> HermitianPauliSum {
        assert_eq!(coeffs.len(), self.basis.len());
        let mut out = HermitianPauliSum::zero(self.n_qubits);
        for (b, c) in self.basis.iter().zip(coeffs.iter()) {
            out = out.add_scaled(b, *c);
        }
        out
    }
}

/// Orthogonalize `a` against `basis` (re-orthogonalized twice for stability)
/// and return the remainder plus its norm.
fn orthogonal_remainder(
    a: &HermitianPauliSum,
    basis: &[HermitianPauliSum],
) -> (HermitianPauliSum, f64) {
    let mut rem = a.clone();
    for _ in 0..2 {
        for b in basis {
            let c = b.inner(&rem);
            if c != 0.0 {
                rem = rem.add_scaled(b, -c);
            }
        }
    }
    let norm = rem.norm();
    (rem, norm)
}

/// Compute an orthonormal basis of the Lie closure of `generators` under the
/// Hermitian bracket `-i[.,.]`.
///
/// Pairwise brackets are processed breadth-first round by round, so the result
/// is deterministic given the generator order. `max_dim` bounds the dimension
/// and `max_pauli_support` bounds the Pauli support of any admitted element.
pub fn compute_dla_basis(
    generators: &[HermitianPauliSum],
    max_dim: usize,
    max_pauli_support: usize,
) -> Result<DlaBasis, DlaError> {
    if generators.is_empty() || generators.iter().any(|g| g.is_zero()) {
        return Err(DlaError::InvalidGenerators);
    }
    let n_qubits = generators[0].n_qubits();
    if generators.iter().any(|g| g.n_qubits() != n_qubits) {
        return Err(DlaError::InvalidGenerators);
    }

    let mut basis: Vec<HermitianPauliSum> = Vec::new();
    let admit = |cand: &HermitianPauliSum,
                     basis: &mut Vec<HermitianPauliSum>|
     -> Result<bool, DlaError> {
        let (rem, norm) = orthogonal_remainder(cand, basis);
        if norm <= INDEPENDENCE_TOL {
            return Ok(false);
        }
        let elem = rem.scaled(1.0 / norm);
        if elem.num_terms() > max_pauli_support {
            return Err(DlaError::SupportBudgetExceeded {
                support: elem.num_terms(),
                max_support: max_pauli_support,
            });
        }
        basis.push(elem);
        if basis.len() > max_dim {
            return Err(DlaError::DimBudgetExceeded { max_dim });
        }
        Ok(true)
    };

    for g in generators {
        admit(g, &mut basis)?;
    }

    // Breadth-first rounds: only pairs touching elements added in the previous
    // round can produce anything new.
    let mut frontier_start = 0usize;
    loop {
        let round_len = basis.len();
        let mut grew = false;
        for i in 0..round_len {
            let j_start = i.max(frontier_start).max(i + 1);
            for j in j_start..round_len {
                let cand = basis[i].bracket(&basis[j]);
                if cand.is_zero() {
                    continue;
                }
                grew |= admit(&cand, &mut basis)?;
            }
        }
        if !grew && basis.len() == round_len {
            break;
        }
        if !grew {
            break;
        }
        frontier_start = round_len;
    }

    Ok(DlaBasis { n_qubits, basis })
}

impl StructureConstants {
    /// Matrices of `k -> bracket(B_alpha, k)` over the basis coefficients.
    pub fn compute(basis: &DlaBasis) -> Self {
        let dim = basis.dim();
        let mut ad = Vec::with_capacity(dim);
        for alpha in 0..dim {
            let mut m = DMatrix::<f64>::zeros(dim, dim);
            for beta in 0..dim {
                let br = basis.element(alpha).bracket(basis.element(beta));
                for gamma in 0..dim {
                    m[(gamma, beta)] = basis.element(gamma).inner(&br);
                }
            }
            ad.push(m);
        }
        Self { ad }
    }

    pub fn dim(&self) -> usize {
        self.ad.len()
    }
}

/// Matrix of `k -> bracket(h, k)` for an arbitrary algebra element `h`,
/// assembled from the structure constants by linearity.
pub fn ad_matrix(
    h: &HermitianPauliSum,
    basis: &DlaBasis,
    sc: &StructureConstants,
) -> Result<DMatrix<f64>, DlaError> {
    let (coeffs, residual) = basis.project(h);
    if residual > MEMBERSHIP_TOL {
        return Err(DlaError::NotInAlgebra { residual });
    }
    let dim = basis.dim();
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for (alpha, c) in coeffs.iter().enumerate() {
        if *c != 0.0 {
            m += &sc.ad[alpha] * *c;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Axis, PauliString};
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn single(s: &str) -> HermitianPauliSum {
        HermitianPauliSum::single(p(s), 1.0)
    }

    fn closure(gens: &[HermitianPauliSum]) -> DlaBasis {
        compute_dla_basis(gens, 1000, 10_000).unwrap()
    }

    /// Independent oracle: dimension of the Lie closure computed with dense
    /// matrices and Gram-Schmidt over vectorized entries.
    fn dense_closure_dim(gens: &[HermitianPauliSum]) -> usize {
        fn vectorize(m: &DMatrix<Complex64>) -> Vec<f64> {
            m.iter().flat_map(|c| [c.re, c.im]).collect()
        }
        fn gs_add(basis: &mut Vec<Vec<f64>>, mut v: Vec<f64>) -> bool {
            for _ in 0..2 {
                for b in basis.iter() {
                    let dot: f64 = b.iter().zip(&v).map(|(a, c)| a * c).sum();
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= dot * bi;
                    }
                }
            }
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-9 {
                return false;
            }
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            basis.push(v);
            true
        }
        let mut dense: Vec<DMatrix<Complex64>> = Vec::new();
        let mut span: Vec<Vec<f64>> = Vec::new();
        for g in gens {
            let d = g.to_dense().unwrap();
            if gs_add(&mut span, vectorize(&d)) {
                dense.push(d);
            }
        }
        loop {
            let len = dense.len();
            let mut grew = false;
            for i in 0..len {
                for j in (i + 1)..len {
                    let comm =
                        (&dense[i] * &dense[j] - &dense[j] * &dense[i]) * Complex64::new(0.0, -1.0);
                    if gs_add(&mut span, vectorize(&comm)) {
                        dense.push(comm.clone());
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        dense.len()
    }

    #[test]
    fn abelian_single_generator() {
        let b = closure(&[single("X")]);
        assert_eq!(b.dim(), 1);
        assert_abs_diff_eq!(b.element(0).inner(&single("X")), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn su2_closure() {
        let b = closure(&[single("X"), single("Y")]);
        assert_eq!(b.dim(), 3);
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let elem = HermitianPauliSum::single(PauliString::single(1, 0, axis), 1.0);
            let (_, res) = b.project(&elem);
            assert!(res < 1e-10);
        }
    }

    #[test]
    fn two_qubit_closure_matches_dense_oracle() {
        let gens = [single("ZZ"), single("XI"), single("IX")];
        let b = closure(&gens);
        assert_eq!(b.dim(), dense_closure_dim(&gens));
        assert_eq!(b.dim(), 6);
    }

    #[test]
    fn basis_is_orthonormal_and_closed() {
        let b = closure(&[single("ZZ"), single("XI"), single("IX")]);
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(
                    b.element(i).inner(b.element(j)),
                    expected,
                    epsilon = 1e-10
                );
            }
        }
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                let (_, res) = b.project(&b.element(i).bracket(b.element(j)));
                assert!(res < 1e-8, "closure residual {res}");
            }
        }
    }

    #[test]
    fn closure_is_fixed_point() {
        let b = closure(&[single("ZZ"), single("XI"), single("IX")]);
        let again = closure(b.elements());
        assert_eq!(again.dim(), b.dim());
    }

    #[test]
    fn dim_invariant_under_generator_permutation() {
        let gens = [single("ZZ"), single("XI"), single("IX")];
        let dim = closure(&gens).dim();
        let permuted = [gens[2].clone(), gens[0].clone(), gens[1].clone()];
        assert_eq!(closure(&permuted).dim(), dim);
    }

    #[test]
    fn dim_budget_surfaced() {
        let gens = [single("ZZ"), single("XI"), single("IX")];
        let err = compute_dla_basis(&gens, 4, 10_000).unwrap_err();
        assert_eq!(err, DlaError::DimBudgetExceeded { max_dim: 4 });
    }

    #[test]
    fn support_budget_surfaced() {
        let heisenberg = single("XX").add(&single("YY")).add(&single("ZZ"));
        let gens = [heisenberg, single("XI"), single("IY")];
        match compute_dla_basis(&gens, 1000, 2) {
            Err(DlaError::SupportBudgetExceeded { .. }) => {}
            other => panic!("expected SupportBudgetExceeded, got {other:?}"),
        }
    }

    #[test]
    fn projection_contract() {
        let b = closure(&[single("ZZ"), single("XI"), single("IX")]);
        // a = B_1 -> e_1, residual 0
        let (coeffs, res) = b.project(b.element(1));
        assert!(res < 1e-12);
        for (i, c) in coeffs.iter().enumerate() {
            assert_abs_diff_eq!(*c, if i == 1 { 1.0 } else { 0.0 }, epsilon = 1e-10);
        }
        // orthogonal element -> zero coeffs, residual = norm
        let w = single("ZI");
        let (coeffs, res) = b.project(&w);
        if coeffs.amax() < 1e-10 {
            assert_abs_diff_eq!(res, w.norm(), epsilon = 1e-10);
        }
        // linear combination plus orthogonal part
        let (coeffs_w, res_w) = b.project(&w);
        let a = b
            .element(2)
            .scaled(3.0)
            .add_scaled(b.element(5), -1.0)
            .add(&w);
        let (coeffs, res) = b.project(&a);
        assert_abs_diff_eq!(coeffs[2], 3.0 + coeffs_w[2], epsilon = 1e-10);
        assert_abs_diff_eq!(coeffs[5], -1.0 + coeffs_w[5], epsilon = 1e-10);
        assert_abs_diff_eq!(res, res_w, epsilon = 1e-10);
    }

    #[test]
    fn structure_constants_antisymmetric_and_jacobi() {
        let b = closure(&[single("ZZ"), single("XI"), single("IX")]);
        let sc = StructureConstants::compute(&b);
        for m in &sc.ad {
            assert!((m + m.transpose()).norm() < 1e-10, "ad not antisymmetric");
        }
        // [ad_a, ad_b] = sum_c f_{ab}^c ad_c
        for a in 0..b.dim() {
            for bb in 0..b.dim() {
                let lhs = &sc.ad[a] * &sc.ad[bb] - &sc.ad[bb] * &sc.ad[a];
                let br = b.element(a).bracket(b.element(bb));
                let (f, _) = b.project(&br);
                let mut rhs = DMatrix::<f64>::zeros(b.dim(), b.dim());
                for (c, fc) in f.iter().enumerate() {
                    rhs += &sc.ad[c] * *fc;
                }
                assert!((lhs - rhs).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn ad_matrix_contract() {
        // su(2): ad of X generates rotations in the (Y, Z) coefficient plane
        let b = closure(&[single("X"), single("Y")]);
        let sc = StructureConstants::compute(&b);
        let m = ad_matrix(&single("X"), &b, &sc).unwrap();
        // entries checked against brackets directly
        for beta in 0..3 {
            let br = single("X").bracket(b.element(beta));
            let (coeffs, _) = b.project(&br);
            for gamma in 0..3 {
                assert_abs_diff_eq!(m[(gamma, beta)], coeffs[gamma], epsilon = 1e-12);
            }
        }
        // h = B_alpha reproduces sc.ad[alpha]
        let m1 = ad_matrix(b.element(1), &b, &sc).unwrap();
        assert!((m1 - &sc.ad[1]).norm() < 1e-10);
        // h = 0 -> zero matrix
        let z = ad_matrix(&HermitianPauliSum::zero(1), &b, &sc).unwrap();
        assert!(z.norm() < 1e-14);
        // outside the algebra -> error
        assert!(matches!(
            ad_matrix(&single("Z").scaled(2.0).add(&single("X")), &b, &sc),
            Ok(_)
        ));
        let b2 = closure(&[single("XI"), single("YI")]);
        let sc2 = StructureConstants::compute(&b2);
        assert!(matches!(
            ad_matrix(&single("IZ"), &b2, &sc2),
            Err(DlaError::NotInAlgebra { .. })
        ));
    }

    #[test]
    fn adjoint_is_homomorphism() {
        let b = closure(&[single("ZZ"), single("XI"), single("IX")]);
        let sc = StructureConstants::compute(&b);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let g = b.combine(&DVector::from_fn(b.dim(), |_, _| rng.gen_range(-1.0..1.0)));
            let h = b.combine(&DVector::from_fn(b.dim(), |_, _| rng.gen_range(-1.0..1.0)));
            let lhs = ad_matrix(&g.bracket(&h), &b, &sc).unwrap();
            let mg = ad_matrix(&g, &b, &sc).unwrap();
            let mh = ad_matrix(&h, &b, &sc).unwrap();
            let rhs = &mg * &mh - &mh * &mg;
            assert!((lhs - rhs).norm() < 1e-8);
        }
    }

    #[test]
    fn basis_serde_roundtrip() {
        let b = closure(&[single("ZZ"), single("XI"), single("IX")]);
        let sc = StructureConstants::compute(&b);
        let jb = serde_json::to_string(&b).unwrap();
        let jsc = serde_json::to_string(&sc).unwrap();
        assert_eq!(serde_json::from_str::<DlaBasis>(&jb).unwrap(), b);
        assert_eq!(serde_json::from_str::<StructureConstants>(&jsc).unwrap(), sc);
    }
}
