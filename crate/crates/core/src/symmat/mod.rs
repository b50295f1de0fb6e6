//! Dense matrices of expressions.

mod det;

use std::collections::BTreeMap;
use std::fmt;

use crate::expr::{Expr, LatexOptions, Symbol};
use crate::simplify::simplify;

pub use det::{determinant, determinant_cofactor, MAX_SYMBOLIC_DIM};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymMatError {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    Shape { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is singular (determinant simplifies to 0)")]
    Singular,
    #[error("symbolic {0}x{0} exceeds the supported size")]
    TooLarge(usize),
    #[error("cannot factor out a zero scalar")]
    ZeroScalar,
    #[error("{0}")]
    Invalid(String),
}

/// Row-major grid of expressions. Vectors are single-column matrices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Expr>,
}

impl SymMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Expr>) -> Result<Self, SymMatError> {
        if rows == 0 || cols == 0 || rows * cols != entries.len() {
            return Err(SymMatError::Invalid(format!(
                "{} entries do not fill a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(SymMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Expr>>) -> Result<Self, SymMatError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(SymMatError::Invalid("rows have different lengths".into()));
        }
        SymMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn column(entries: Vec<Expr>) -> Self {
        let n = entries.len();
        SymMatrix { rows: n, cols: 1, entries }
    }

    pub fn row(entries: Vec<Expr>) -> Self {
        let n = entries.len();
        SymMatrix { rows: 1, cols: n, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        SymMatrix { rows, cols, entries: vec![Expr::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SymMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Expr::one());
        }
        m
    }

    /// Column of fresh symbols `prefix_1 .. prefix_k`.
    pub fn vector_sym(k: usize, prefix: &str) -> Self {
        SymMatrix::column((1..=k).map(|i| Expr::sym(&format!("{prefix}_{i}"))).collect())
    }

    /// Matrix of fresh symbols `prefix_ij` (`prefix_i_j` once an index
    /// exceeds 9).
    pub fn matrix_sym(rows: usize, cols: usize, prefix: &str) -> Self {
        let wide = rows > 9 || cols > 9;
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 1..=rows {
            for j in 1..=cols {
                let name = if wide { format!("{prefix}_{i}_{j}") } else { format!("{prefix}_{i}{j}") };
                entries.push(Expr::sym(&name));
            }
        }
        SymMatrix { rows, cols, entries }
    }

    /// Symmetric Toeplitz matrix with the given first row.
    pub fn toeplitz_sym(first_row: &[Expr]) -> Self {
        let n = first_row.len();
        let mut m = SymMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, first_row[i.abs_diff(j)].clone());
            }
        }
        m
    }

    /// Identity with `offdiag` on the first subdiagonal; `corner` replaces
    /// entry (1,1) when given.
    pub fn diff_mat(n: usize, offdiag: &Expr, corner: Option<Expr>) -> Self {
        let mut m = SymMatrix::identity(n);
        for i in 1..n {
            m.set(i, i - 1, offdiag.clone());
        }
        if let Some(c) = corner {
            m.set(0, 0, c);
        }
        m
    }

    /// Treatment-contrast design matrix for two crossed factors with `nr`
    /// and `nc` levels, observations in column-major cell order.
    pub fn model_matrix_two_way(nr: usize, nc: usize) -> Self {
        let p = 1 + (nr - 1) + (nc - 1);
        let n = nr * nc;
        let mut m = SymMatrix::zeros(n, p);
        for k in 0..n {
            let (r, s) = (k % nr, k / nr);
            m.set(k, 0, Expr::one());
            if r > 0 {
                m.set(k, r, Expr::one());
            }
            if s > 0 {
                m.set(k, nr - 1 + s, Expr::one());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_vector(&self) -> bool {
        self.cols == 1
    }

    pub fn entries(&self) -> &[Expr] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Expr> {
        self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: Expr) {
        self.entries[i * self.cols + j] = e;
    }

    pub fn row_vec(&self, i: usize) -> Vec<Expr> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Self {
        SymMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut out = SymMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    fn same_shape(&self, o: &SymMatrix, op: &'static str) -> Result<(), SymMatError> {
        if self.shape() != o.shape() {
            return Err(SymMatError::Shape { op, left: self.shape(), right: o.shape() });
        }
        Ok(())
    }

    pub fn add(&self, o: &SymMatrix) -> Result<Self, SymMatError> {
        self.same_shape(o, "add")?;
        Ok(self.zip(o, |a, b| a + b))
    }

    pub fn sub(&self, o: &SymMatrix) -> Result<Self, SymMatError> {
        self.same_shape(o, "sub")?;
        Ok(self.zip(o, |a, b| a - b))
    }

    /// Entrywise product.
    pub fn hadamard(&self, o: &SymMatrix) -> Result<Self, SymMatError> {
        self.same_shape(o, "hadamard")?;
        Ok(self.zip(o, |a, b| a * b))
    }

    fn zip(&self, o: &SymMatrix, f: impl Fn(&Expr, &Expr) -> Expr) -> Self {
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| f(a, b)).collect();
        SymMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn scale(&self, s: &Expr) -> Self {
        self.map(|e| s * e)
    }

    pub fn div_scalar(&self, s: &Expr) -> Self {
        let inv = s.recip();
        self.map(|e| e * &inv)
    }

    pub fn neg(&self) -> Self {
        self.map(|e| -e)
    }

    pub fn matmul(&self, o: &SymMatrix) -> Result<Self, SymMatError> {
        if self.cols != o.rows {
            return Err(SymMatError::Shape { op: "matmul", left: self.shape(), right: o.shape() });
        }
        let mut out = SymMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let e = Expr::add_all((0..self.cols).map(|k| self.get(i, k) * o.get(k, j)));
                out.set(i, j, e);
            }
        }
        Ok(out)
    }

    /// `AᵀA`, simplified entrywise when `simplify_entries` is set.
    pub fn crossprod_with(&self, simplify_entries: bool) -> Self {
        let m = self.transpose().matmul(self).expect("conformable by construction");
        if simplify_entries {
            m.simplified()
        } else {
            m
        }
    }

    pub fn crossprod(&self) -> Self {
        self.crossprod_with(true)
    }

    /// `AAᵀ`, simplified entrywise when `simplify_entries` is set.
    pub fn tcrossprod_with(&self, simplify_entries: bool) -> Self {
        let m = self.matmul(&self.transpose()).expect("conformable by construction");
        if simplify_entries {
            m.simplified()
        } else {
            m
        }
    }

    pub fn tcrossprod(&self) -> Self {
        self.tcrossprod_with(true)
    }

    pub fn simplified(&self) -> Self {
        self.map(simplify)
    }

    pub fn subs(&self, bindings: &BTreeMap<Symbol, Expr>) -> Self {
        self.map(|e| e.subs(bindings))
    }

    /// Sum of all entries.
    pub fn sum(&self) -> Expr {
        Expr::add_all(self.entries.iter().cloned())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Expr::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| {
                let e = self.get(i, j);
                if i == j {
                    e.is_one()
                } else {
                    e.is_zero()
                }
            }))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn determinant(&self) -> Result<Expr, SymMatError> {
        determinant(self)
    }

    /// Exact inverse as adjugate over determinant, simplified entrywise when
    /// `simplify_entries` is set.
    pub fn inverse_with(&self, simplify_entries: bool) -> Result<Self, SymMatError> {
        if !self.is_square() {
            return Err(SymMatError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        if n > MAX_SYMBOLIC_DIM {
            return Err(SymMatError::TooLarge(n));
        }
        let d = determinant(self)?;
        if simplify(&d).is_zero() {
            return Err(SymMatError::Singular);
        }
        if n == 1 {
            let e = d.recip();
            return Ok(SymMatrix::column(vec![if simplify_entries { simplify(&e) } else { e }]));
        }
        let inv_d = d.recip();
        let mut out = SymMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(j, i);
                let c = determinant(&minor)?;
                let sign = if (i + j) % 2 == 0 { Expr::one() } else { Expr::int(-1) };
                let e = sign * c * &inv_d;
                out.set(i, j, if simplify_entries { simplify(&e) } else { e });
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<Self, SymMatError> {
        self.inverse_with(true)
    }

    /// The matrix with row `r` and column `c` removed.
    pub fn minor(&self, r: usize, c: usize) -> Self {
        let mut entries = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != r && j != c {
                    entries.push(self.get(i, j).clone());
                }
            }
        }
        SymMatrix { rows: self.rows - 1, cols: self.cols - 1, entries }
    }

    pub fn to_latex(&self) -> String {
        self.to_latex_with(LatexOptions::default())
    }

    pub fn to_latex_with(&self, opts: LatexOptions) -> String {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let e = self.get(i, j);
                        if opts.zero_as_dot && e.is_zero() {
                            ".".to_string()
                        } else {
                            e.to_latex()
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" & ")
            })
            .collect();
        format!("\\left[\\begin{{matrix}}{}\\end{{matrix}}\\right]", rows.join("\\\\"))
    }

    /// Plain rendering; column vectors print as a transposed row.
    pub fn to_plain(&self) -> String {
        let row = |v: &[Expr]| v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ");
        if self.is_vector() && self.rows > 1 {
            return format!("[{}]^T", row(&self.entries));
        }
        let rows: Vec<String> = (0..self.rows).map(|i| format!("[{}]", row(&self.row_vec(i)))).collect();
        format!("[{}]", rows.join(", "))
    }
}

impl fmt::Display for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_plain())
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymMatrix{}x{}{}", self.rows, self.cols, self.to_plain())
    }
}

/// A scalar pulled out in front of a matrix for display.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredMatrix {
    pub scalar: Expr,
    pub matrix: SymMatrix,
}

impl FactoredMatrix {
    /// Recombined matrix `scalar * matrix`.
    pub fn expand(&self) -> SymMatrix {
        self.matrix.scale(&self.scalar)
    }

    pub fn to_latex_with(&self, opts: LatexOptions) -> String {
        if self.scalar.is_one() {
            return self.matrix.to_latex_with(opts);
        }
        format!("{} {}", self.scalar.to_latex(), self.matrix.to_latex_with(opts))
    }

    pub fn to_latex(&self) -> String {
        self.to_latex_with(LatexOptions::default())
    }
}

/// Writes `a` as `s * m` with `m = simplify(a / s)` entrywise.
pub fn factor_out_scalar(s: &Expr, a: &SymMatrix) -> Result<FactoredMatrix, SymMatError> {
    let s = simplify(s);
    if s.is_zero() {
        return Err(SymMatError::ZeroScalar);
    }
    let inv = s.recip();
    Ok(FactoredMatrix { scalar: s, matrix: a.map(|e| simplify(&(e * &inv))) })
}
