//! Determinants: fraction-free (Bareiss) elimination over polynomials in the
//! matrix atoms, and plain cofactor expansion as a cross-check.

use super::{SymMatError, SymMatrix};
use crate::expr::Expr;
use crate::poly::{gcd, Poly};
use crate::ratfunc::{AtomTable, ConvertOptions, RatFunc};
use crate::simplify::{merge_exp, simplify};

/// Largest square size accepted by the symbolic routines.
pub const MAX_SYMBOLIC_DIM: usize = 6;

fn check_square(m: &SymMatrix) -> Result<usize, SymMatError> {
    if !m.is_square() {
        return Err(SymMatError::NotSquare(m.rows(), m.cols()));
    }
    if m.rows() > MAX_SYMBOLIC_DIM {
        return Err(SymMatError::TooLarge(m.rows()));
    }
    Ok(m.rows())
}

fn poly_lcm(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() {
        return b.clone();
    }
    if b.is_constant() {
        return a.clone();
    }
    let g = gcd(a, b);
    a.div_exact(&g).expect("gcd divides").mul(b)
}

/// Determinant by Bareiss elimination. Entries are read as rational
/// functions of their atoms, each row is cleared of denominators, and the
/// result is divided back and brought to normal form.
pub fn determinant(m: &SymMatrix) -> Result<Expr, SymMatError> {
    let n = check_square(m)?;
    let mut table = AtomTable::new();
    let opts = ConvertOptions { split_exp: true };
    let mut a: Vec<Vec<Poly>> = Vec::with_capacity(n);
    let mut scale = Poly::one();
    for i in 0..n {
        let row: Vec<RatFunc> = (0..n).map(|j| table.to_ratfunc(m.get(i, j), opts).normalize()).collect();
        let l = row.iter().fold(Poly::one(), |acc, r| poly_lcm(&acc, &r.den));
        a.push(
            row.iter()
                .map(|r| r.num.mul(&l).div_exact(&r.den).expect("lcm is a multiple"))
                .collect(),
        );
        scale = scale.mul(&l);
    }
    let mut sign = Poly::one();
    let mut prev = Poly::one();
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return Ok(Expr::zero());
            };
            a.swap(k, p);
            sign = sign.neg();
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = v.div_exact(&prev).expect("Bareiss step divides exactly");
            }
            a[i][k] = Poly::zero();
        }
        prev = a[k][k].clone();
    }
    let det = RatFunc { num: a[n - 1][n - 1].mul(&sign), den: scale };
    let det = table.reduce_radicals(&det);
    let det = table.canonical_order(&det).normalize();
    Ok(merge_exp(&table.to_expr(&det)))
}

/// Determinant by Laplace expansion along the first row, simplified.
pub fn determinant_cofactor(m: &SymMatrix) -> Result<Expr, SymMatError> {
    check_square(m)?;
    Ok(simplify(&laplace(m)))
}

fn laplace(m: &SymMatrix) -> Expr {
    let n = m.rows();
    if n == 1 {
        return m.get(0, 0).clone();
    }
    Expr::add_all((0..n).filter(|&j| !m.get(0, j).is_zero()).map(|j| {
        let term = m.get(0, j) * laplace(&m.minor(0, j));
        if j % 2 == 0 {
            term
        } else {
            -term
        }
    }))
}
