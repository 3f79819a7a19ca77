//! Real trigonometric polynomials in up to two variables: interpolation from
//! samples and conversion to Chebyshev polynomial systems in u_j = cos x_j,
//! v_j = sin x_j.

use super::poly::{chebyshev_t, chebyshev_u, CPoly, Poly};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrigError {
    #[error("need at least {needed} samples for order {r} in {dims} dims, got {got}")]
    TooFewSamples { needed: usize, got: usize, r: usize, dims: usize },
    #[error("interpolation system is singular (duplicate sample points?)")]
    SingularSystem,
    #[error("sample point has {got} coordinates, expected {dims}")]
    DimMismatch { got: usize, dims: usize },
}

/// f(x) = sum over r in [-R..R]^dims of alpha_r e^{i r.x}, real-valued
/// (alpha_{-r} = conj(alpha_r)).
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    dims: usize,
    r_max: i64,
    /// Row-major over the (2R+1)^dims frequency lattice, index j encodes
    /// r_i = (j / stride_i) % (2R+1) - R.
    coeffs: Vec<Complex64>,
}

impl TrigPolynomial {
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn r_max(&self) -> i64 {
        self.r_max
    }

    fn side(&self) -> usize {
        (2 * self.r_max + 1) as usize
    }

    /// Frequency multi-index of flat index j.
    fn freq_of(&self, mut j: usize) -> Vec<i64> {
        let side = self.side();
        let mut r = vec![0i64; self.dims];
        for i in (0..self.dims).rev() {
            r[i] = (j % side) as i64 - self.r_max;
            j /= side;
        }
        r
    }

    pub fn coeff(&self, r: &[i64]) -> Complex64 {
        let side = self.side();
        let mut j = 0usize;
        for &ri in r {
            j = j * side + (ri + self.r_max) as usize;
        }
        self.coeffs[j]
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = Complex64::default();
        for (j, c) in self.coeffs.iter().enumerate() {
            let r = self.freq_of(j);
            let phase: f64 = r.iter().zip(x).map(|(&ri, &xi)| ri as f64 * xi).sum();
            acc += c * Complex64::new(0.0, phase).exp();
        }
        acc.re
    }

    /// Largest coefficient magnitude at nonzero frequency.
    pub fn dominant_magnitude(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(j, _)| self.freq_of(*j).iter().any(|&r| r != 0))
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    /// The canonical interpolation grid: (2R+1)^dims points with coordinates
    /// 2 pi r / (2R+1), r = -R..R.
    pub fn sample_grid(dims: usize, r_max: i64) -> Vec<Vec<f64>> {
        let side = (2 * r_max + 1) as usize;
        let total = side.pow(dims as u32);
        (0..total)
            .map(|mut j| {
                let mut x = vec![0.0; dims];
                for i in (0..dims).rev() {
                    let r = (j % side) as i64 - r_max;
                    x[i] = 2.0 * std::f64::consts::PI * r as f64 / side as f64;
                    j /= side;
                }
                x
            })
            .collect()
    }

    /// Express the real part as a polynomial in (u_1, v_1, ..., u_d, v_d)
    /// using cos(m x) = T_m(u) and sin(m x) = v U_{m-1}(u).
    pub fn to_chebyshev_poly(&self) -> Poly {
        let n_vars = 2 * self.dims;
        let mut acc = CPoly::zero(n_vars);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            let r = self.freq_of(j);
            let mut term = CPoly::constant(n_vars, *c);
            for (i, &ri) in r.iter().enumerate() {
                let (u_var, v_var) = (2 * i, 2 * i + 1);
                let m = ri.unsigned_abs() as u32;
                // e^{i m x} = T_m(u) + i sign(m) v U_{m-1}(u)
                let mut factor = CPoly::from_real(&chebyshev_t(m, n_vars, u_var));
                if m > 0 {
                    let sin_part = Poly::var(n_vars, v_var)
                        .mul(&chebyshev_u(m - 1, n_vars, u_var));
                    let sign = if ri > 0 { 1.0 } else { -1.0 };
                    factor = factor.add(
                        &CPoly::from_real(&sin_part).scaled(Complex64::new(0.0, sign)),
                    );
                }
                term = term.mul(&factor);
            }
            acc = acc.add(&term);
        }
        acc.real_part().pruned()
    }
}

/// Interpolate a trig polynomial of order `r_max` through the samples by
/// least squares on the complex Fourier Vandermonde system; on the canonical
/// uniform grid this is an exact DFT.
pub fn fit_trig(
    samples: &[(Vec<f64>, f64)],
    dims: usize,
    r_max: i64,
) -> Result<TrigPolynomial, TrigError> {
    let side = (2 * r_max + 1) as usize;
    let n_coeffs = side.pow(dims as u32);
    if samples.len() < n_coeffs {
        return Err(TrigError::TooFewSamples {
            needed: n_coeffs,
            got: samples.len(),
            r: r_max as usize,
            dims,
        });
    }
    for (x, _) in samples {
        if x.len() != dims {
            return Err(TrigError::DimMismatch { got: x.len(), dims });
        }
    }
    let proto = TrigPolynomial { dims, r_max, coeffs: vec![Complex64::default(); n_coeffs] };
    let mut vandermonde = DMatrix::<Complex64>::zeros(samples.len(), n_coeffs);
    let mut rhs = DVector::<Complex64>::zeros(samples.len());
    for (row, (x, y)) in samples.iter().enumerate() {
        rhs[row] = Complex64::new(*y, 0.0);
        for col in 0..n_coeffs {
            let r = proto.freq_of(col);
            let phase: f64 = r.iter().zip(x).map(|(&ri, &xi)| ri as f64 * xi).sum();
            vandermonde[(row, col)] = Complex64::new(0.0, phase).exp();
        }
    }
    let svd = vandermonde.svd(true, true);
    let sigma_max = svd.singular_values.max();
    if svd.singular_values.min() < 1e-10 * sigma_max {
        return Err(TrigError::SingularSystem);
    }
    let coeffs = svd.solve(&rhs, 0.0).expect("u and v_t requested");
    Ok(TrigPolynomial { dims, r_max, coeffs: coeffs.iter().copied().collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sample_fn(dims: usize, r: i64, f: impl Fn(&[f64]) -> f64) -> Vec<(Vec<f64>, f64)> {
        TrigPolynomial::sample_grid(dims, r)
            .into_iter()
            .map(|x| {
                let y = f(&x);
                (x, y)
            })
            .collect()
    }

    #[test]
    fn cosine_coefficients() {
        let tp = fit_trig(&sample_fn(1, 1, |x| x[0].cos()), 1, 1).unwrap();
        assert_abs_diff_eq!(tp.coeff(&[1]).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(tp.coeff(&[-1]).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(tp.coeff(&[0]).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_function() {
        let tp = fit_trig(&sample_fn(1, 1, |_| 1.0), 1, 1).unwrap();
        assert_abs_diff_eq!(tp.coeff(&[0]).re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(tp.coeff(&[1]).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn high_harmonic_matches_dft_oracle() {
        // f = cos(5x) on the 11-point grid: exactly one conjugate pair at |r|=5
        let samples = sample_fn(1, 5, |x| (5.0 * x[0]).cos());
        let tp = fit_trig(&samples, 1, 5).unwrap();
        // independent plain-DFT oracle
        let m = 11usize;
        for r in -5i64..=5 {
            let mut acc = Complex64::default();
            for (x, y) in &samples {
                acc += Complex64::new(*y, 0.0) * Complex64::new(0.0, -(r as f64) * x[0]).exp();
            }
            acc /= m as f64;
            assert_abs_diff_eq!((tp.coeff(&[r]) - acc).norm(), 0.0, epsilon = 1e-10);
            let expect = if r.abs() == 5 { 0.5 } else { 0.0 };
            assert_abs_diff_eq!(tp.coeff(&[r]).re, expect, epsilon = 1e-10);
        }
    }

    #[test]
    fn interpolation_reproduces_samples() {
        let samples = sample_fn(2, 2, |x| {
            (x[0].cos() + (2.0 * x[0] + x[1]).sin()) * 0.7 - 0.2 * (x[1].cos())
        });
        let tp = fit_trig(&samples, 2, 2).unwrap();
        for (x, y) in &samples {
            assert_abs_diff_eq!(tp.eval(x), *y, epsilon = 1e-8);
        }
        // conjugate symmetry
        for r0 in -2i64..=2 {
            for r1 in -2i64..=2 {
                let a = tp.coeff(&[r0, r1]);
                let b = tp.coeff(&[-r0, -r1]);
                assert_abs_diff_eq!((a - b.conj()).norm(), 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn chebyshev_conversion_agrees_pointwise() {
        let samples = sample_fn(1, 2, |x| (2.0 * x[0]).cos() + 0.3 * x[0].sin());
        let tp = fit_trig(&samples, 1, 2).unwrap();
        let poly = tp.to_chebyshev_poly();
        for &x in &[0.3f64, 1.9, -2.4] {
            assert_abs_diff_eq!(poly.eval(&[x.cos(), x.sin()]), tp.eval(&[x]), epsilon = 1e-10);
        }
    }

    #[test]
    fn too_few_samples() {
        let err = fit_trig(&[(vec![0.0], 1.0)], 1, 1).unwrap_err();
        assert!(matches!(err, TrigError::TooFewSamples { needed: 3, .. }));
    }

    #[test]
    fn duplicate_points_are_singular() {
        let samples = vec![(vec![0.1], 1.0); 4];
        assert!(matches!(fit_trig(&samples, 1, 1), Err(TrigError::SingularSystem)));
    }
}
