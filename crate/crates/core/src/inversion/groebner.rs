//! Buchberger's algorithm over f64 coefficients, plus back-substitution for
//! the zero-dimensional systems produced by snapshot inversion (at most four
//! variables). Elimination uses lexicographic order; grevlex is the default
//! order exposed for general basis computation.

use super::poly::{Exps, MonomialOrder, Poly};
use nalgebra::DMatrix;
use thiserror::Error;

/// Division steps abort when the leading pivot coefficient falls below this.
pub const PIVOT_TOL: f64 = 1e-12;
/// Imaginary parts below this mark an eigenvalue as a real root.
pub const REAL_ROOT_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroebnerError {
    #[error("polynomial degree {degree} exceeds the budget {budget}")]
    DegreeBudgetExceeded { degree: u32, budget: u32 },
    #[error("leading coefficient {coeff:.3e} below pivot threshold; system is numerically degenerate")]
    CoefficientBlowup { coeff: f64 },
    #[error("no univariate eliminant found during back-substitution")]
    NotTriangular,
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn exp_sub(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn exp_lcm(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

/// Remainder of `p` on division by `divisors` under `order`.
pub fn reduce(
    p: &Poly,
    divisors: &[Poly],
    order: MonomialOrder,
) -> Result<Poly, GroebnerError> {
    let mut rem = Poly::zero(p.n_vars);
    let mut work = p.clone().pruned();
    let leads: Vec<Option<(Exps, f64)>> = divisors
        .iter()
        .map(|d| d.leading(order).map(|(e, c)| (e.clone(), c)))
        .collect();
    while let Some((le, lc)) = work.leading(order).map(|(e, c)| (e.clone(), c)) {
        let mut divided = false;
        for (d, lead) in divisors.iter().zip(&leads) {
            if let Some((de, dc)) = lead {
                if divides(de, &le) {
                    if dc.abs() < PIVOT_TOL {
                        return Err(GroebnerError::CoefficientBlowup { coeff: dc.abs() });
                    }
                    let factor = lc / dc;
                    let shift = exp_sub(&le, de);
                    work = work.sub(&d.mul_monomial(&shift, factor)).pruned();
                    divided = true;
                    break;
                }
            }
        }
        if !divided {
            let mut single = Poly::zero(p.n_vars);
            single.terms.insert(le.clone(), lc);
            rem = rem.add(&single);
            work.terms.remove(&le);
        }
    }
    Ok(rem)
}

fn s_polynomial(f: &Poly, g: &Poly, order: MonomialOrder) -> Option<Poly> {
    let (fe, fc) = f.leading(order)?;
    let (ge, gc) = g.leading(order)?;
    let lcm = exp_lcm(fe, ge);
    let a = f.mul_monomial(&exp_sub(&lcm, fe), 1.0 / fc);
    let b = g.mul_monomial(&exp_sub(&lcm, ge), 1.0 / gc);
    Some(a.sub(&b).pruned())
}

/// Buchberger's algorithm with a total-degree budget. Returns a reduced,
/// monic Groebner basis for the ideal generated by `polys`.
pub fn buchberger(
    polys: &[Poly],
    order: MonomialOrder,
    degree_budget: u32,
) -> Result<Vec<Poly>, GroebnerError> {
    let basis_init: Vec<Poly> = polys
        .iter()
        .map(|p| p.clone().pruned())
        .filter(|p| !p.is_zero())
        .map(|p| p.monic(order))
        .collect();
    let mut basis = basis_init;
    let mut pairs: Vec<(usize, usize)> = (0..basis.len())
        .flat_map(|i| (0..i).map(move |j| (j, i)))
        .collect();
    while let Some((i, j)) = pairs.pop() {
        let s = match s_polynomial(&basis[i], &basis[j], order) {
            Some(s) => s,
            None => continue,
        };
        let r = reduce(&s, &basis, order)?;
        // float arithmetic leaves ~1e-16 residue where exact reduction gives
        // zero; judge zero relative to the S-polynomial's scale
        if r.is_zero() || r.max_coeff() < 1e-10 * s.max_coeff().max(1.0) {
            continue;
        }
        let degree = r.total_degree();
        if degree > degree_budget {
            return Err(GroebnerError::DegreeBudgetExceeded { degree, budget: degree_budget });
        }
        let r = r.monic(order);
        let new_idx = basis.len();
        pairs.extend((0..new_idx).map(|k| (k, new_idx)));
        basis.push(r);
    }
    Ok(inter_reduce(basis, order)?)
}

/// Remove redundant elements and fully reduce each against the others.
fn inter_reduce(mut basis: Vec<Poly>, order: MonomialOrder) -> Result<Vec<Poly>, GroebnerError> {
    // discard any element whose leading monomial is divisible by another's
    let mut keep = vec![true; basis.len()];
    for i in 0..basis.len() {
        let (le_i, _) = basis[i].leading(order).unwrap();
        for j in 0..basis.len() {
            if i == j || !keep[j] {
                continue;
            }
            let (le_j, _) = basis[j].leading(order).unwrap();
            if divides(le_j, le_i) && (le_i != le_j || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let kept: Vec<Poly> = basis
        .drain(..)
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect();
    let mut reduced = Vec::with_capacity(kept.len());
    for i in 0..kept.len() {
        let others: Vec<Poly> = kept
            .iter()
            .enumerate()
            .filter_map(|(j, p)| (j != i).then(|| p.clone()))
            .collect();
        let r = reduce(&kept[i], &others, order)?;
        if !r.is_zero() {
            reduced.push(r.monic(order));
        }
    }
    Ok(reduced)
}

/// Check the Buchberger criterion: every S-polynomial reduces to ~0.
pub fn is_groebner_basis(basis: &[Poly], order: MonomialOrder, tol: f64) -> bool {
    for i in 0..basis.len() {
        for j in 0..i {
            if let Some(s) = s_polynomial(&basis[i], &basis[j], order) {
                match reduce(&s, basis, order) {
                    Ok(r) => {
                        let scale = s.max_coeff().max(1.0);
                        if r.max_coeff() > tol * scale {
                            return false;
                        }
                    }
                    Err(_) => return false,
                }
            }
        }
    }
    true
}

/// Real roots of a univariate polynomial (ascending coefficients) via the
/// companion-matrix eigenvalue method.
pub fn univariate_real_roots(coeffs: &[f64]) -> Vec<f64> {
    // trim trailing near-zero leading coefficients
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].abs() < 1e-12 * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let mut companion = DMatrix::<f64>::zeros(deg, deg);
    for r in 1..deg {
        companion[(r, r - 1)] = 1.0;
    }
    for r in 0..deg {
        companion[(r, deg - 1)] = -coeffs[r] / lead;
    }
    let eigs = companion.complex_eigenvalues();
    let mut roots: Vec<f64> = eigs
        .iter()
        .filter(|e| e.im.abs() < REAL_ROOT_TOL * (1.0 + e.re.abs()))
        .map(|e| e.re)
        .collect();
    roots.sort_by(f64::total_cmp);
    roots
}

/// All real solutions of a zero-dimensional lex Groebner basis, found by
/// eliminating from the smallest (last) variable upward. Candidate points are
/// *not* residual-filtered here; the caller applies its own tolerance.
pub fn solve_lex_basis(basis: &[Poly], root_merge_tol: f64) -> Result<Vec<Vec<f64>>, GroebnerError> {
    let n_vars = match basis.first() {
        Some(p) => p.n_vars,
        None => return Ok(Vec::new()),
    };
    if n_vars == 0 {
        return Ok(Vec::new());
    }
    // univariate eliminant in the last variable: smallest-degree candidate
    let mut eliminant: Option<Vec<f64>> = None;
    for p in basis {
        if let Some(c) = p.as_univariate_in_last() {
            if c.len() > 1
                && eliminant.as_ref().map_or(true, |cur| c.len() < cur.len())
            {
                eliminant = Some(c);
            }
        }
    }
    let coeffs = eliminant.ok_or(GroebnerError::NotTriangular)?;
    let mut roots = univariate_real_roots(&coeffs);
    roots.dedup_by(|a, b| (*a - *b).abs() < root_merge_tol);

    if n_vars == 1 {
        return Ok(roots.into_iter().map(|r| vec![r]).collect());
    }
    let mut solutions = Vec::new();
    for r in roots {
        let lower: Vec<Poly> = basis
            .iter()
            .map(|p| p.substitute_last(r).pruned())
            .filter(|p| !p.is_zero())
            .collect();
        if lower.is_empty() {
            // the root leaves the remaining variables unconstrained; skip
            continue;
        }
        for mut sol in solve_lex_basis(&lower, root_merge_tol)? {
            sol.push(r);
            solutions.push(sol);
        }
    }
    Ok(solutions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn circle_and_line() -> Vec<Poly> {
        // u^2 + v^2 - 1 and v (vars: u=0, v=1)
        let u = Poly::var(2, 0);
        let v = Poly::var(2, 1);
        let circle = u.mul(&u).add(&v.mul(&v)).sub(&Poly::constant(2, 1.0));
        vec![circle, v]
    }

    #[test]
    fn substitution_example() {
        let basis = buchberger(&circle_and_line(), MonomialOrder::Lex, 16).unwrap();
        // expected reduced basis {v, u^2 - 1}
        assert_eq!(basis.len(), 2);
        assert!(is_groebner_basis(&basis, MonomialOrder::Lex, 1e-9));
        let mut sols = solve_lex_basis(&basis, 1e-9).unwrap();
        sols.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert_eq!(sols.len(), 2);
        assert_abs_diff_eq!(sols[0][0], -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sols[1][0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sols[0][1], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn single_linear_is_its_own_basis() {
        let p = Poly::var(1, 0).sub(&Poly::constant(1, 0.5));
        let basis = buchberger(&[p.clone()], MonomialOrder::GrevLex, 8).unwrap();
        assert_eq!(basis.len(), 1);
        assert_abs_diff_eq!(basis[0].eval(&[0.5]), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn degree_budget_fires() {
        // x^5 - y and y^5 - x generate high-degree S-polynomial chains in lex
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let pow5 = |p: &Poly| p.mul(p).mul(p).mul(p).mul(p);
        let sys = vec![pow5(&x).sub(&y), pow5(&y).sub(&x)];
        let err = buchberger(&sys, MonomialOrder::Lex, 6).unwrap_err();
        assert!(matches!(err, GroebnerError::DegreeBudgetExceeded { .. }));
    }

    #[test]
    fn groebner_check_rejects_incomplete_set() {
        // {u^2 + v^2 - 1, u v} is not a Groebner basis in lex
        let u = Poly::var(2, 0);
        let v = Poly::var(2, 1);
        let sys = vec![u.mul(&u).add(&v.mul(&v)).sub(&Poly::constant(2, 1.0)), u.mul(&v)];
        assert!(!is_groebner_basis(&sys, MonomialOrder::Lex, 1e-9));
        let completed = buchberger(&sys, MonomialOrder::Lex, 16).unwrap();
        assert!(is_groebner_basis(&completed, MonomialOrder::Lex, 1e-9));
    }

    #[test]
    fn companion_roots() {
        // (x - 2)(x + 3)(x - 0.5) = x^3 + 0.5 x^2 - 6.5 x + 3
        let roots = univariate_real_roots(&[3.0, -6.5, 0.5, 1.0]);
        assert_eq!(roots.len(), 3);
        assert_abs_diff_eq!(roots[0], -3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(roots[1], 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(roots[2], 2.0, epsilon = 1e-9);
        // x^2 + 1 has no real roots
        assert!(univariate_real_roots(&[1.0, 0.0, 1.0]).is_empty());
    }

    #[test]
    fn two_variable_trig_style_system() {
        // cos/sin constraints for x = 1.1: {u - cos(1.1), u^2 + v^2 - 1}
        let (c, s) = (1.1f64.cos(), 1.1f64.sin());
        let u = Poly::var(2, 0);
        let v = Poly::var(2, 1);
        let sys = vec![
            u.sub(&Poly::constant(2, c)),
            u.mul(&u).add(&v.mul(&v)).sub(&Poly::constant(2, 1.0)),
        ];
        let basis = buchberger(&sys, MonomialOrder::Lex, 16).unwrap();
        let sols = solve_lex_basis(&basis, 1e-9).unwrap();
        assert_eq!(sols.len(), 2);
        for sol in sols {
            assert_abs_diff_eq!(sol[0], c, epsilon = 1e-9);
            assert_abs_diff_eq!(sol[1].abs(), s.abs(), epsilon = 1e-9);
        }
    }
}
