//! Linear algebra over [`Rat`]: dense solve, invert and determinant, and an
//! incremental sparse eliminator.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::rational::Rat;

/// Row-major dense matrix.
pub type Matrix = Vec<Vec<Rat>>;

/// Solves `A x = b` for square nonsingular `A`. `None` when singular.
pub fn solve(a: &Matrix, b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut m: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = Rat::one() / &m[col][col];
        for v in m[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let t = &m[col][c] * &f;
                    m[r][c] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<Rat> = (0..n).map(|i| if i == j { Rat::one() } else { Rat::zero() }).collect();
        cols.push(solve(a, &e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

/// Determinant by Gaussian elimination.
pub fn determinant(a: &Matrix) -> Rat {
    let n = a.len();
    let mut m = a.clone();
    let mut det = Rat::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rat::zero();
        };
        if piv != col {
            m.swap(col, piv);
            det = -det;
        }
        det *= &m[col][col];
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &m[col][col];
            for c in col..n {
                let t = &m[col][c] * &f;
                m[r][c] -= t;
            }
        }
    }
    det
}

/// Sparse linear equation `Σ c_j u_j = rhs`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseRow {
    pub coeffs: BTreeMap<usize, Rat>,
    pub rhs: Rat,
}

impl SparseRow {
    pub fn new() -> Self {
        SparseRow { coeffs: BTreeMap::new(), rhs: Rat::zero() }
    }

    pub fn add(&mut self, col: usize, c: &Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(col).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&col);
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.is_empty() && self.rhs.is_zero()
    }

    fn axpy(&mut self, c: &Rat, other: &SparseRow) {
        for (k, v) in &other.coeffs {
            self.add(*k, &(v * c));
        }
        self.rhs += c * &other.rhs;
    }

    /// Scales so the leading coefficient is 1.
    pub fn normalized(mut self) -> SparseRow {
        if let Some((_, lead)) = self.coeffs.iter().next() {
            let inv = Rat::one() / lead;
            for v in self.coeffs.values_mut() {
                *v *= &inv;
            }
            self.rhs *= &inv;
        }
        self
    }
}

/// Outcome of adding one equation to an [`Echelon`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insert {
    Independent(usize),
    Redundant,
    Inconsistent(Rat),
}

/// Incremental reduced row echelon form over sparse rows.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// `row` reduced against every pivot.
    pub fn reduce(&self, row: &SparseRow) -> SparseRow {
        let mut r = row.clone();
        let cols: Vec<usize> = r.coeffs.keys().copied().filter(|c| self.rows.contains_key(c)).collect();
        for c in cols {
            if let Some(v) = r.coeffs.get(&c).cloned() {
                r.axpy(&-v, &self.rows[&c]);
            }
        }
        r
    }

    pub fn insert(&mut self, row: &SparseRow) -> Insert {
        let r = self.reduce(row);
        let Some(&p) = r.coeffs.keys().next() else {
            return if r.rhs.is_zero() { Insert::Redundant } else { Insert::Inconsistent(r.rhs) };
        };
        let r = r.normalized();
        for other in self.rows.values_mut() {
            if let Some(v) = other.coeffs.get(&p).cloned() {
                other.axpy(&-v, &r);
            }
        }
        self.rows.insert(p, r);
        Insert::Independent(p)
    }

    /// Value of column `c` when the system pins it down.
    pub fn value(&self, c: usize) -> Option<Rat> {
        let r = self.rows.get(&c)?;
        (r.coeffs.len() == 1).then(|| r.rhs.clone())
    }

    /// Whether the row lies in the span of the inserted rows, ignoring the
    /// right-hand side.
    pub fn spans(&self, coeffs: &BTreeMap<usize, Rat>) -> bool {
        let row = SparseRow { coeffs: coeffs.clone(), rhs: Rat::zero() };
        self.reduce(&row).coeffs.is_empty()
    }
}
