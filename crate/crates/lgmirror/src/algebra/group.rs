//! Diagonal symmetry groups `G_W`, stored additively as phase vectors in ℚ/ℤ.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::rational::{fmt_rat, frac, int, is_integer, Rat};
use super::{linalg, AlgebraError, ExponentMatrix, Poly};

/// `γ = (exp(2πiΘ_1), …, exp(2πiΘ_n))`, kept as the phases `Θ_i ∈ [0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    phases: Vec<Rat>,
}

impl GroupElement {
    pub fn new(phases: Vec<Rat>) -> Self {
        GroupElement { phases: phases.iter().map(frac).collect() }
    }

    pub fn identity(n: usize) -> Self {
        GroupElement { phases: vec![Rat::zero(); n] }
    }

    pub fn phases(&self) -> &[Rat] {
        &self.phases
    }

    pub fn nvars(&self) -> usize {
        self.phases.len()
    }

    /// Group law: componentwise addition mod 1.
    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement::new(self.phases.iter().zip(&other.phases).map(|(a, b)| a + b).collect())
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement::new(self.phases.iter().map(|a| -a).collect())
    }

    pub fn pow(&self, k: i64) -> GroupElement {
        GroupElement::new(self.phases.iter().map(|a| a * int(k)).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.phases.iter().all(Zero::is_zero)
    }

    /// `N_γ`: number of coordinates fixed by `γ`.
    pub fn fixed_dim(&self) -> usize {
        self.phases.iter().filter(|p| p.is_zero()).count()
    }

    pub fn is_narrow(&self) -> bool {
        self.fixed_dim() == 0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.phases.iter().map(fmt_rat).collect();
        write!(f, "({})", p.join(", "))
    }
}

/// `G_W` with generators `ρ_k` (columns of `E_W^{-1}`), its order and `J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryGroup {
    exponents: ExponentMatrix,
    pub generators: Vec<GroupElement>,
    pub order: BigInt,
    pub j: GroupElement,
}

impl SymmetryGroup {
    /// Whether `γ` preserves every monomial: `Σ_j a_ij Θ_j ∈ ℤ` for all `i`.
    pub fn contains(&self, g: &GroupElement) -> bool {
        self.exponents.entries().iter().all(|row| {
            let s: Rat = row.iter().zip(g.phases()).map(|(a, t)| t * int(*a as i64)).sum();
            is_integer(&s)
        })
    }

    pub fn check(&self, g: &GroupElement) -> Result<(), AlgebraError> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(AlgebraError::NotInGroup(g.to_string()))
        }
    }

    /// `J^k`.
    pub fn j_pow(&self, k: i64) -> GroupElement {
        self.j.pow(k)
    }

    /// `J · ∏ ρ_k^{e_k}`.
    pub fn j_times_rho(&self, e: &[u32]) -> GroupElement {
        e.iter().zip(&self.generators).fold(self.j.clone(), |acc, (k, r)| acc.mul(&r.pow(*k as i64)))
    }

    /// Smallest `k > 0` with `J^k = γ`, when `γ ∈ ⟨J⟩`.
    pub fn j_log(&self, g: &GroupElement) -> Option<i64> {
        let ord = self.j_order();
        (1..=ord).find(|&k| &self.j.pow(k) == g)
    }

    /// Order of `J`.
    pub fn j_order(&self) -> i64 {
        crate::algebra::rational::lcm_denominators(self.j.phases()).try_into().expect("small group")
    }
}

/// Builds `G_W` from an invertible polynomial.
pub fn symmetry_group(w: &Poly) -> Result<SymmetryGroup, AlgebraError> {
    let e = ExponentMatrix::from_poly(w)?;
    let inv = linalg::inverse(&e.as_rational())
        .ok_or_else(|| AlgebraError::NotInvertible("singular exponent matrix".into()))?;
    let n = e.n();
    let generators: Vec<GroupElement> =
        (0..n).map(|k| GroupElement::new((0..n).map(|i| inv[i][k].clone()).collect())).collect();
    let j = generators.iter().fold(GroupElement::identity(n), |acc, r| acc.mul(r));
    let order = e.determinant().abs();
    Ok(SymmetryGroup { exponents: e, generators, order, j })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;
    use crate::algebra::solve_weights;

    fn poly(rows: &[&[u32]]) -> Poly {
        Poly::from_exponents(rows[0].len(), &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn fermat_group() {
        let g = symmetry_group(&poly(&[&[3, 0], &[0, 7]])).unwrap();
        assert_eq!(g.j.phases(), &[rat(1, 3), rat(1, 7)]);
        assert_eq!(g.order, BigInt::from(21));
        assert_eq!(g.j_order(), 21);
    }

    #[test]
    fn orders_of_chain_and_loop() {
        let w13 = poly(&[&[2, 0, 0], &[1, 2, 0], &[0, 1, 4]]);
        assert_eq!(symmetry_group(&w13).unwrap().order, BigInt::from(16));
        let q12 = poly(&[&[2, 1, 0], &[1, 3, 0], &[0, 0, 3]]);
        assert_eq!(symmetry_group(&q12).unwrap().order, BigInt::from(15));
    }

    #[test]
    fn j_equals_weights() {
        let w = poly(&[&[2, 0, 0], &[1, 3, 0], &[0, 1, 3]]);
        let g = symmetry_group(&w).unwrap();
        assert_eq!(g.j.phases(), solve_weights(&w).unwrap().weights());
        assert!(g.generators.iter().all(|r| g.contains(r)));
        assert!(!g.contains(&GroupElement::new(vec![rat(1, 3), int(0), int(0)])));
    }
}
