//! Exact scalars, sparse polynomials, weight systems, exponent matrices,
//! Berglund–Hübsch transposition and diagonal symmetry groups.

pub mod group;
pub mod linalg;
pub mod poly;
pub mod rational;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use group::{symmetry_group, GroupElement, SymmetryGroup};
pub use poly::{default_names, Monomial, Poly};
pub use rational::{factorial, fmt_rat, frac, int, is_integer, parse_rat, rat, to_i64, Rat};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("undefined degree: zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial is not weighted homogeneous")]
    Inhomogeneous,
    #[error("not an invertible polynomial: {0}")]
    NotInvertible(String),
    #[error("not a sum of Fermat, chain and loop blocks: {0}")]
    NotAtomic(String),
    #[error("exponent vector of length {found}, expected {expected}")]
    Arity { expected: usize, found: usize },
    #[error("bad rational literal {0:?}")]
    BadRational(String),
    #[error("phase vector {0} is not a diagonal symmetry")]
    NotInGroup(String),
}

/// Weights `q_1..q_n` together with the central charge `ĉ = Σ(1 − 2q_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightSystem {
    weights: Vec<Rat>,
    central_charge: Rat,
}

impl WeightSystem {
    /// Validates `0 < q_i ≤ 1/2`.
    pub fn new(weights: Vec<Rat>) -> Result<Self, AlgebraError> {
        let half = rat(1, 2);
        if let Some(q) = weights.iter().find(|q| !q.is_positive() || **q > half) {
            return Err(AlgebraError::NotInvertible(format!("weight {} outside (0, 1/2]", fmt_rat(q))));
        }
        let central_charge = weights.iter().fold(Rat::zero(), |acc, q| acc + Rat::one() - q * int(2));
        Ok(WeightSystem { weights, central_charge })
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn central_charge(&self) -> &Rat {
        &self.central_charge
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    /// Milnor number `∏(1/q_i − 1)`.
    pub fn milnor_number(&self) -> Rat {
        self.weights.iter().fold(Rat::one(), |acc, q| acc * (Rat::one() / q - Rat::one()))
    }
}

/// The common weighted degree of every term of `p`.
pub fn weighted_degree(p: &Poly, w: &WeightSystem) -> Result<Rat, AlgebraError> {
    let mut it = p.terms().map(|(m, _)| m.degree(w));
    let first = it.next().ok_or(AlgebraError::ZeroPolynomial)?;
    if it.all(|d| d == first) {
        Ok(first)
    } else {
        Err(AlgebraError::Inhomogeneous)
    }
}

/// Integer exponent matrix `E_W`, row `i` being the monomial owned by `x_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentMatrix {
    entries: Vec<Vec<u32>>,
}

impl ExponentMatrix {
    /// Reads `E_W` from an invertible polynomial. Each monomial is owned by
    /// its unique variable of exponent at least two (or its only variable);
    /// ownership must be a bijection so the rows can be indexed by variables.
    pub fn from_poly(w: &Poly) -> Result<Self, AlgebraError> {
        let n = w.nvars();
        if w.len() != n {
            return Err(AlgebraError::NotInvertible(format!("{} monomials in {} variables", w.len(), n)));
        }
        let mut rows: Vec<Option<Vec<u32>>> = vec![None; n];
        for (m, c) in w.terms() {
            if !c.is_one() {
                return Err(AlgebraError::NotInvertible("coefficients must be 1".into()));
            }
            let e = m.exps();
            let big: Vec<usize> = (0..n).filter(|&j| e[j] >= 2).collect();
            let owner = match big.as_slice() {
                [j] => *j,
                [] if m.total_degree() == 1 => (0..n).find(|&j| e[j] == 1).unwrap(),
                _ => return Err(AlgebraError::NotAtomic(format!("monomial {:?} has no unique owning variable", e))),
            };
            if rows[owner].is_some() {
                return Err(AlgebraError::NotAtomic(format!("two monomials owned by variable {}", owner + 1)));
            }
            rows[owner] = Some(e.to_vec());
        }
        let entries: Vec<Vec<u32>> = rows.into_iter().map(Option::unwrap).collect();
        let e = ExponentMatrix { entries };
        if e.determinant().is_zero() {
            return Err(AlgebraError::NotInvertible("singular exponent matrix".into()));
        }
        Ok(e)
    }

    pub fn entries(&self) -> &[Vec<u32>] {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn as_rational(&self) -> linalg::Matrix {
        self.entries.iter().map(|r| r.iter().map(|&v| int(v as i64)).collect()).collect()
    }

    pub fn determinant(&self) -> BigInt {
        linalg::determinant(&self.as_rational()).to_integer()
    }

    pub fn transposed(&self) -> ExponentMatrix {
        let n = self.n();
        ExponentMatrix { entries: (0..n).map(|i| (0..n).map(|j| self.entries[j][i]).collect()).collect() }
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_exponents(self.n(), &self.entries).expect("square matrix")
    }
}

/// Unique weights with every monomial of `W` of degree one.
pub fn solve_weights(w: &Poly) -> Result<WeightSystem, AlgebraError> {
    let e = ExponentMatrix::from_poly(w)?;
    let ones = vec![Rat::one(); e.n()];
    let q = linalg::solve(&e.as_rational(), &ones)
        .ok_or_else(|| AlgebraError::NotInvertible("singular exponent matrix".into()))?;
    WeightSystem::new(q)
}

/// Berglund–Hübsch transpose `W^T = Σ_i ∏_j x_j^{a_ji}`.
pub fn transpose(w: &Poly) -> Result<Poly, AlgebraError> {
    Ok(ExponentMatrix::from_poly(w)?.transposed().to_poly())
}

/// Atomic type of a block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtomicKind {
    Fermat,
    Chain,
    Loop,
}

/// One atomic summand. `vars` lists the block's variables in structural
/// order: for a chain `x_1^{a_1}x_2 + … + x_m^{a_m}` the head `x_1` comes
/// first; for a loop the cycle starts at the lowest variable index.
/// `exponents[k]` is the owning exponent of `vars[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomicBlock {
    pub kind: AtomicKind,
    pub vars: Vec<usize>,
    pub exponents: Vec<u32>,
}

/// Splits an invertible polynomial into Fermat, chain and loop blocks.
pub fn classify_atomic(w: &Poly) -> Result<Vec<AtomicBlock>, AlgebraError> {
    let e = ExponentMatrix::from_poly(w)?;
    let n = e.n();
    let mut next: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        for j in 0..n {
            let a = e.entries[i][j];
            if j == i || a == 0 {
                continue;
            }
            if a != 1 || next[i].is_some() {
                return Err(AlgebraError::NotAtomic(format!("row {} of E_W", i + 1)));
            }
            next[i] = Some(j);
        }
    }
    let mut indeg = vec![0usize; n];
    for j in next.iter().flatten() {
        indeg[*j] += 1;
    }
    if indeg.iter().any(|&d| d > 1) {
        return Err(AlgebraError::NotAtomic("a variable is pointed at twice".into()));
    }
    let mut seen = vec![false; n];
    let mut blocks = Vec::new();
    let mut push = |kind, vars: Vec<usize>, seen: &mut Vec<bool>| {
        for &v in &vars {
            seen[v] = true;
        }
        let exponents = vars.iter().map(|&v| e.entries[v][v]).collect();
        blocks.push(AtomicBlock { kind, vars, exponents });
    };
    // chains and Fermat points start at a variable nobody points to
    for start in 0..n {
        if indeg[start] != 0 {
            continue;
        }
        let mut vars = vec![start];
        let mut cur = start;
        while let Some(nx) = next[cur] {
            vars.push(nx);
            cur = nx;
        }
        let kind = if vars.len() == 1 { AtomicKind::Fermat } else { AtomicKind::Chain };
        push(kind, vars, &mut seen);
    }
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut vars = vec![start];
        let mut cur = next[start].expect("in-degree one everywhere on a cycle");
        while cur != start {
            vars.push(cur);
            cur = next[cur].expect("cycle");
        }
        push(AtomicKind::Loop, vars, &mut seen);
    }
    for b in &blocks {
        let min = if b.kind == AtomicKind::Fermat { 2 } else { 1 };
        if b.exponents.iter().any(|&a| a < min) {
            return Err(AlgebraError::NotAtomic("exponent too small".into()));
        }
    }
    blocks.sort_by_key(|b| b.vars.iter().copied().min());
    Ok(blocks)
}
