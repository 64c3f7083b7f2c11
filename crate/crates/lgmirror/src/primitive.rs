//! Perturbative primitive forms: the unfolding `F = f + Σ s_α φ_α`, the
//! exponential map `e^{(F−f)/z}` on the Brieskorn lattice, and the
//! order-by-order solution of `(ζ, 𝒥)`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{factorial, Monomial, Poly, Rat};
use crate::brieskorn::{BrieskornError, LatticeElement, Reducer};
use crate::jacobi::JacobiRing;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrimitiveError {
    #[error(transparent)]
    Brieskorn(#[from] BrieskornError),
    #[error("order {0} out of range (1..=8)")]
    Order(usize),
    #[error("inhomogeneous coefficient at {0}")]
    Inhomogeneous(String),
}

/// Exponents over `s_1..s_μ`. Ordered graded-lex: total order first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        MultiIndex(exps)
    }

    pub fn zero(mu: usize) -> Self {
        MultiIndex(vec![0; mu])
    }

    pub fn unit(mu: usize, a: usize) -> Self {
        let mut e = vec![0; mu];
        e[a] = 1;
        MultiIndex(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self − other` when componentwise nonnegative.
    pub fn sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(MultiIndex)
    }

    /// `∏ k_α!`.
    pub fn factorial(&self) -> Rat {
        self.0.iter().map(|&k| factorial(k)).product()
    }

    /// `Σ k_α (1 − deg φ_α)`.
    pub fn degree(&self, degrees: &[Rat]) -> Rat {
        self.0.iter().zip(degrees).map(|(&k, d)| (Rat::one() - d) * Rat::from_integer(k.into())).sum()
    }

    /// `∏ φ_α^{k_α}` as a monomial.
    pub fn product(&self, ring: &JacobiRing) -> Monomial {
        let mut m = Monomial::one(ring.nvars());
        for (a, &k) in self.0.iter().enumerate() {
            if k > 0 {
                m = m.mul(&ring.phi(a).pow(k));
            }
        }
        m
    }

    /// As a monomial in `μ` variables, for polynomial arithmetic in `s`.
    pub fn to_monomial(&self) -> Monomial {
        Monomial::new(self.0.clone())
    }

    /// All multi-indices of the given total order, graded-lex descending in
    /// the first slot.
    pub fn of_order(mu: usize, n: u32) -> Vec<MultiIndex> {
        fn rec(mu: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == mu {
                prefix.push(left);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for k in (0..=left).rev() {
                prefix.push(k);
                rec(mu, left - k, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if mu == 0 {
            return out;
        }
        rec(mu, n, &mut Vec::new(), &mut out);
        out
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.order(), other.0.as_slice()).cmp(&(other.order(), self.0.as_slice()))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (a, &k) in self.0.iter().enumerate() {
            match k {
                0 => {}
                1 => parts.push(format!("s{}", a + 1)),
                _ => parts.push(format!("s{}^{}", a + 1, k)),
            }
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

/// Series in `s` with lattice coefficients, truncated at `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationSeries {
    pub mu: usize,
    pub order: usize,
    pub window: (i64, i64),
    pub coeffs: BTreeMap<MultiIndex, LatticeElement>,
}

impl DeformationSeries {
    pub fn new(mu: usize, order: usize, window: (i64, i64)) -> Self {
        DeformationSeries { mu, order, window, coeffs: BTreeMap::new() }
    }

    pub fn get(&self, k: &MultiIndex) -> Option<&LatticeElement> {
        self.coeffs.get(k)
    }

    /// `Σ_K c_K s^K` where `c_K` is the `z^p φ_α` coefficient of each term.
    pub fn component(&self, alpha: usize, p: i64) -> Result<Poly, BrieskornError> {
        let mut out = Poly::zero(self.mu);
        for (k, e) in &self.coeffs {
            out.add_term(k.to_monomial(), e.get(alpha, p)?);
        }
        Ok(out)
    }

    /// Nonzero `(K, α, p, c)` entries.
    pub fn entries(&self) -> Vec<(MultiIndex, usize, i64, Rat)> {
        let mut out = Vec::new();
        for (k, e) in &self.coeffs {
            for ((a, p), c) in e.terms() {
                out.push((k.clone(), *a, *p, c.clone()));
            }
        }
        out
    }
}

/// The solved pair `(ζ, 𝒥)`.
#[derive(Clone, Debug)]
pub struct PrimitiveForm {
    pub zeta: DeformationSeries,
    pub j: DeformationSeries,
}

/// Evaluation order of multi-indices within one s-order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Enumeration {
    #[default]
    GradedLex,
    Reversed,
}

/// z-window `[−(N+1), N+n]` used for every lattice element at order `N`.
pub fn window(order: usize, nvars: usize) -> (i64, i64) {
    let n = order as i64;
    (-(n + 1), n + nvars as i64)
}

fn contribution(
    reducer: &Reducer<'_>,
    source: &LatticeElement,
    k: &MultiIndex,
    target: &mut LatticeElement,
) -> Result<(), BrieskornError> {
    let ring = reducer.ring();
    let prod = k.product(ring);
    let scale = Rat::one() / k.factorial();
    let shift = -(k.order() as i64);
    for ((a, p), c) in source.terms() {
        let m = prod.mul(ring.phi(*a));
        reducer.reduce_into(&Poly::monomial(m), p + shift, &(c * &scale), target)?;
    }
    Ok(())
}

/// `e^{(F−f)/z} ζ` through s-order `order`.
pub fn exp_expand(
    reducer: &Reducer<'_>,
    zeta: &DeformationSeries,
    order: usize,
) -> Result<DeformationSeries, PrimitiveError> {
    let ring = reducer.ring();
    let mu = ring.mu();
    let win = zeta.window;
    let mut out = DeformationSeries::new(mu, order, win);
    for n in 0..=order as u32 {
        for l in MultiIndex::of_order(mu, n) {
            let mut acc = LatticeElement::zero(mu, win.0, win.1);
            for (kz, src) in &zeta.coeffs {
                if let Some(k) = l.sub(kz) {
                    contribution(reducer, src, &k, &mut acc)?;
                }
            }
            if !acc.is_zero() {
                out.coeffs.insert(l, acc);
            }
        }
    }
    Ok(out)
}

/// Solves for `ζ` with `e^{(F−f)/z}ζ ∈ [dⁿx] + z^{−1}B[z^{−1}][[s]]` through
/// order `order`, then expands `𝒥`.
pub fn solve_primitive_form(ring: &JacobiRing, order: usize) -> Result<PrimitiveForm, PrimitiveError> {
    solve_primitive_form_with(ring, order, Enumeration::GradedLex)
}

pub fn solve_primitive_form_with(
    ring: &JacobiRing,
    order: usize,
    enumeration: Enumeration,
) -> Result<PrimitiveForm, PrimitiveError> {
    if order == 0 || order > 8 {
        return Err(PrimitiveError::Order(order));
    }
    let reducer = Reducer::new(ring);
    let mu = ring.mu();
    let degrees = &ring.basis().degrees;
    let win = window(order, ring.nvars());
    let mut zeta = DeformationSeries::new(mu, order, win);
    let mut one = LatticeElement::zero(mu, win.0, win.1);
    one.add(0, 0, &Rat::one())?;
    zeta.coeffs.insert(MultiIndex::zero(mu), one);
    let zero = Rat::zero();
    for n in 1..=order as u32 {
        let mut layer: Vec<MultiIndex> =
            MultiIndex::of_order(mu, n).into_iter().filter(|l| l.degree(degrees) <= zero).collect();
        if enumeration == Enumeration::Reversed {
            layer.reverse();
        }
        let mut fresh = Vec::new();
        for l in layer {
            let mut r = LatticeElement::zero(mu, win.0, win.1);
            for (kz, src) in &zeta.coeffs {
                if let Some(k) = l.sub(kz) {
                    contribution(&reducer, src, &k, &mut r)?;
                }
            }
            let plus = r.restrict(0, win.1);
            if plus.is_zero() {
                continue;
            }
            let mut z = LatticeElement::zero(mu, win.0, win.1);
            z.add_scaled(&plus, &-Rat::one(), 0)?;
            fresh.push((l, z));
        }
        for (l, z) in fresh {
            zeta.coeffs.insert(l, z);
        }
    }
    for (k, e) in &zeta.coeffs {
        let dk = k.degree(degrees);
        for ((a, p), _) in e.terms() {
            if &dk + Rat::from_integer((*p).into()) + &degrees[*a] != zero {
                return Err(PrimitiveError::Inhomogeneous(k.to_string()));
            }
        }
    }
    let j = exp_expand(&reducer, &zeta, order)?;
    Ok(PrimitiveForm { zeta, j })
}

/// Nonnegative-z part of `𝒥 − [dⁿx]`; empty when the pair is solved.
pub fn residual(pf: &PrimitiveForm) -> Vec<(MultiIndex, usize, i64, Rat)> {
    let mu = pf.j.mu;
    pf.j.entries()
        .into_iter()
        .filter(|(k, a, p, c)| *p >= 0 && !(k == &MultiIndex::zero(mu) && *a == 0 && *p == 0 && c.is_one()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat};

    fn ring(rows: &[Vec<u32>]) -> JacobiRing {
        JacobiRing::new(&Poly::from_exponents(rows[0].len(), rows).unwrap()).unwrap()
    }

    fn idx(mu: usize, s: &[usize]) -> MultiIndex {
        let mut e = vec![0; mu];
        for &a in s {
            e[a - 1] += 1;
        }
        MultiIndex::new(e)
    }

    #[test]
    fn multi_index_enumeration() {
        let all = MultiIndex::of_order(3, 2);
        assert_eq!(all.len(), 6);
        assert_eq!(all[0].exps(), &[2, 0, 0]);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
    }

    #[test]
    fn a2_has_trivial_zeta() {
        let r = ring(&[vec![3]]);
        let pf = solve_primitive_form(&r, 4).unwrap();
        assert_eq!(pf.zeta.coeffs.len(), 1);
        assert!(residual(&pf).is_empty());
    }

    #[test]
    fn e12_zeta_starts_at_order_three() {
        let r = ring(&[vec![3, 0], vec![0, 7]]);
        let pf = solve_primitive_form(&r, 3).unwrap();
        assert!(pf.zeta.coeffs.keys().all(|k| k.order() == 0 || k.order() == 3));
        assert!(residual(&pf).is_empty());
        let e = pf.j.get(&idx(12, &[5])).unwrap();
        assert_eq!(e.terms().collect::<Vec<_>>(), vec![(&(4, -1), &int(1))]);
        let e = pf.j.get(&idx(12, &[7, 9])).unwrap();
        assert_eq!(e.get(2, -1).unwrap(), rat(-3, 7));
    }

    #[test]
    fn e13_zeta_through_order_three() {
        // E13 basis in the appendix ordering
        let f = Poly::from_exponents(2, &[vec![3, 0], vec![1, 5]]).unwrap();
        let basis =
            [[0, 0], [0, 1], [0, 2], [1, 0], [0, 3], [1, 1], [0, 4], [1, 2], [2, 0], [1, 3], [2, 1], [2, 2], [2, 3]]
                .iter()
                .map(|e| Monomial::new(e.to_vec()))
                .collect();
        let r = JacobiRing::with_options(&f, Some(basis), Default::default()).unwrap();
        let pf = solve_primitive_form(&r, 3).unwrap();
        let entries = pf.zeta.entries();
        assert_eq!(entries.len(), 3);
        assert!(entries.contains(&(idx(13, &[12, 13]), 0, 0, rat(-4, 75))));
        assert!(entries.contains(&(idx(13, &[13, 13]), 1, 0, rat(-1, 25))));
        assert!(residual(&pf).is_empty());
    }
}
