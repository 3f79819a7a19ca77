//! Small dense-coefficient multivariate polynomials used by the snapshot
//! inversion solver: at most four variables (u_j = cos x_j, v_j = sin x_j for
//! a block of at most two inputs), real f64 coefficients, with a complex
//! sibling for intermediate trig-to-Chebyshev expansion.

use num_complex::Complex64;
use std::collections::BTreeMap;

/// Coefficients smaller than this (relative to the largest) are dropped.
pub const COEFF_PRUNE: f64 = 1e-12;

pub type Exps = Vec<u32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonomialOrder {
    /// Graded reverse lexicographic (the public default).
    GrevLex,
    /// Pure lexicographic with variable 0 largest; used for elimination.
    Lex,
}

impl MonomialOrder {
    /// Returns Ordering::Greater when `a` is the larger monomial.
    pub fn cmp(&self, a: &[u32], b: &[u32]) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self {
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::GrevLex => {
                let da: u32 = a.iter().sum();
                let db: u32 = b.iter().sum();
                match da.cmp(&db) {
                    Ordering::Equal => {
                        for i in (0..a.len()).rev() {
                            match a[i].cmp(&b[i]) {
                                Ordering::Equal => continue,
                                Ordering::Less => return Ordering::Greater,
                                Ordering::Greater => return Ordering::Less,
                            }
                        }
                        Ordering::Equal
                    }
                    other => other,
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub n_vars: usize,
    pub terms: BTreeMap<Exps, f64>,
}

impl Poly {
    pub fn zero(n_vars: usize) -> Self {
        Poly { n_vars, terms: BTreeMap::new() }
    }

    pub fn constant(n_vars: usize, c: f64) -> Self {
        let mut p = Poly::zero(n_vars);
        if c != 0.0 {
            p.terms.insert(vec![0; n_vars], c);
        }
        p
    }

    pub fn var(n_vars: usize, i: usize) -> Self {
        let mut e = vec![0; n_vars];
        e[i] = 1;
        let mut p = Poly::zero(n_vars);
        p.terms.insert(e, 1.0);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Drop coefficients tiny relative to the largest.
    pub fn pruned(mut self) -> Self {
        let cut = self.max_coeff() * COEFF_PRUNE;
        self.terms.retain(|_, c| c.abs() > cut);
        self
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            *out.terms.entry(e.clone()).or_insert(0.0) += c;
        }
        out.terms.retain(|_, c| *c != 0.0);
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, s: f64) -> Poly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out.terms.retain(|_, c| *c != 0.0);
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.n_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exps = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *out.terms.entry(e).or_insert(0.0) += ca * cb;
            }
        }
        out.terms.retain(|_, c| *c != 0.0);
        out
    }

    /// Multiply by the monomial `coeff * x^exps`.
    pub fn mul_monomial(&self, exps: &[u32], coeff: f64) -> Poly {
        let mut out = Poly::zero(self.n_vars);
        for (e, c) in &self.terms {
            let ne: Exps = e.iter().zip(exps).map(|(a, b)| a + b).collect();
            out.terms.insert(ne, c * coeff);
        }
        out
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                c * e
                    .iter()
                    .zip(point)
                    .map(|(&k, &x)| x.powi(k as i32))
                    .product::<f64>()
            })
            .sum()
    }

    /// Leading monomial and coefficient under the given order.
    pub fn leading(&self, order: MonomialOrder) -> Option<(&Exps, f64)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| order.cmp(a, b))
            .map(|(e, &c)| (e, c))
    }

    /// Scale so the leading coefficient is 1.
    pub fn monic(&self, order: MonomialOrder) -> Poly {
        match self.leading(order) {
            Some((_, c)) => self.scaled(1.0 / c),
            None => self.clone(),
        }
    }

    /// Substitute `value` for the last variable, dropping it from the ring.
    pub fn substitute_last(&self, value: f64) -> Poly {
        let n = self.n_vars - 1;
        let mut out = Poly::zero(n);
        for (e, c) in &self.terms {
            let scaled = c * value.powi(e[n] as i32);
            let trimmed: Exps = e[..n].to_vec();
            *out.terms.entry(trimmed).or_insert(0.0) += scaled;
        }
        out.terms.retain(|_, c| *c != 0.0);
        out
    }

    /// Coefficients of the polynomial as univariate in the last variable,
    /// provided all other exponents are zero. Returns None otherwise.
    pub fn as_univariate_in_last(&self) -> Option<Vec<f64>> {
        let n = self.n_vars;
        let mut deg = 0u32;
        for e in self.terms.keys() {
            if n > 1 && e[..n - 1].iter().any(|&k| k != 0) {
                return None;
            }
            deg = deg.max(e[n - 1]);
        }
        let mut coeffs = vec![0.0; deg as usize + 1];
        for (e, c) in &self.terms {
            coeffs[e[n - 1] as usize] += c;
        }
        Some(coeffs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CPoly {
    pub n_vars: usize,
    pub terms: BTreeMap<Exps, Complex64>,
}

impl CPoly {
    pub fn zero(n_vars: usize) -> Self {
        CPoly { n_vars, terms: BTreeMap::new() }
    }

    pub fn constant(n_vars: usize, c: Complex64) -> Self {
        let mut p = CPoly::zero(n_vars);
        if c != Complex64::default() {
            p.terms.insert(vec![0; n_vars], c);
        }
        p
    }

    pub fn from_real(p: &Poly) -> Self {
        CPoly {
            n_vars: p.n_vars,
            terms: p
                .terms
                .iter()
                .map(|(e, &c)| (e.clone(), Complex64::new(c, 0.0)))
                .collect(),
        }
    }

    pub fn add(&self, other: &CPoly) -> CPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            *out.terms.entry(e.clone()).or_insert_with(Complex64::default) += c;
        }
        out.terms.retain(|_, c| c.norm_sqr() != 0.0);
        out
    }

    pub fn mul(&self, other: &CPoly) -> CPoly {
        let mut out = CPoly::zero(self.n_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exps = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *out.terms.entry(e).or_insert_with(Complex64::default) += ca * cb;
            }
        }
        out.terms.retain(|_, c| c.norm_sqr() != 0.0);
        out
    }

    pub fn scaled(&self, s: Complex64) -> CPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out
    }

    pub fn real_part(&self) -> Poly {
        let mut out = Poly::zero(self.n_vars);
        for (e, c) in &self.terms {
            if c.re != 0.0 {
                out.terms.insert(e.clone(), c.re);
            }
        }
        out
    }
}

/// Chebyshev polynomial of the first kind T_m as a polynomial in variable
/// `var` of an `n_vars` ring: T_m(cos t) = cos(m t).
pub fn chebyshev_t(m: u32, n_vars: usize, var: usize) -> Poly {
    let u = Poly::var(n_vars, var);
    let mut prev = Poly::constant(n_vars, 1.0);
    if m == 0 {
        return prev;
    }
    let mut cur = u.clone();
    for _ in 1..m {
        let next = u.mul(&cur).scaled(2.0).sub(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// Chebyshev polynomial of the second kind U_m: sin((m+1)t) = sin t U_m(cos t).
pub fn chebyshev_u(m: u32, n_vars: usize, var: usize) -> Poly {
    let u = Poly::var(n_vars, var);
    let mut prev = Poly::constant(n_vars, 1.0);
    if m == 0 {
        return prev;
    }
    let mut cur = u.scaled(2.0);
    for _ in 1..m {
        let next = u.mul(&cur).scaled(2.0).sub(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn arithmetic_and_eval() {
        // (u + 2)(u - 2) = u^2 - 4
        let u = Poly::var(1, 0);
        let p = u.add(&Poly::constant(1, 2.0)).mul(&u.sub(&Poly::constant(1, 2.0)));
        assert_abs_diff_eq!(p.eval(&[3.0]), 5.0);
        assert_eq!(p.total_degree(), 2);
    }

    #[test]
    fn chebyshev_identities() {
        for m in 0..6u32 {
            for &t in &[0.3f64, 1.7, -0.9] {
                let tm = chebyshev_t(m, 1, 0);
                assert_abs_diff_eq!(tm.eval(&[t.cos()]), (m as f64 * t).cos(), epsilon = 1e-12);
                let um = chebyshev_u(m, 1, 0);
                assert_abs_diff_eq!(
                    t.sin() * um.eval(&[t.cos()]),
                    ((m + 1) as f64 * t).sin(),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn monomial_orders() {
        use std::cmp::Ordering;
        // lex: x0 beats any power of x1
        assert_eq!(MonomialOrder::Lex.cmp(&[1, 0], &[0, 5]), Ordering::Greater);
        // grevlex: degree first
        assert_eq!(MonomialOrder::GrevLex.cmp(&[1, 0], &[0, 5]), Ordering::Less);
        // grevlex tie-break: last differing exponent smaller wins
        assert_eq!(MonomialOrder::GrevLex.cmp(&[2, 1], &[1, 2]), Ordering::Greater);
    }

    #[test]
    fn substitution() {
        // p = u^2 v + 3 v^2, substitute v = 2 -> 2 u^2 + 12
        let u = Poly::var(2, 0);
        let v = Poly::var(2, 1);
        let p = u.mul(&u).mul(&v).add(&v.mul(&v).scaled(3.0));
        let q = p.substitute_last(2.0);
        assert_eq!(q.n_vars, 1);
        assert_abs_diff_eq!(q.eval(&[1.5]), 2.0 * 2.25 + 12.0);
    }

    #[test]
    fn univariate_extraction() {
        let v = Poly::var(2, 1);
        let p = v.mul(&v).sub(&Poly::constant(2, 1.0));
        assert_eq!(p.as_univariate_in_last(), Some(vec![-1.0, 0.0, 1.0]));
        let u = Poly::var(2, 0);
        assert_eq!(u.as_univariate_in_last(), None);
    }
}
