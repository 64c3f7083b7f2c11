//! Reduction of forms `g·dⁿx·z^p` in the Brieskorn lattice onto the monomial
//! good basis, and the degree-counting test for good bases.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{fmt_rat, int, Monomial, Poly, Rat};
use crate::jacobi::{JacobiError, JacobiRing};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BrieskornError {
    #[error(transparent)]
    Jacobi(#[from] JacobiError),
    #[error("z^{power} outside the window [{lo}, {hi}]")]
    OutOfWindow { power: i64, lo: i64, hi: i64 },
}

/// `Σ_α c_α(z)[φ_α dⁿx]` with Laurent coefficients on a tracked z-window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeElement {
    mu: usize,
    lo: i64,
    hi: i64,
    coeffs: BTreeMap<(usize, i64), Rat>,
}

impl LatticeElement {
    pub fn zero(mu: usize, lo: i64, hi: i64) -> Self {
        LatticeElement { mu, lo, hi, coeffs: BTreeMap::new() }
    }

    /// `z^p [φ_α dⁿx]`.
    pub fn basis(mu: usize, alpha: usize, p: i64) -> Self {
        let mut e = LatticeElement::zero(mu, p, p);
        e.coeffs.insert((alpha, p), Rat::one());
        e
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    fn check(&self, p: i64) -> Result<(), BrieskornError> {
        if p < self.lo || p > self.hi {
            Err(BrieskornError::OutOfWindow { power: p, lo: self.lo, hi: self.hi })
        } else {
            Ok(())
        }
    }

    /// Coefficient of `z^p φ_α`; reading outside the window is an error.
    pub fn get(&self, alpha: usize, p: i64) -> Result<Rat, BrieskornError> {
        self.check(p)?;
        Ok(self.coeffs.get(&(alpha, p)).cloned().unwrap_or_else(Rat::zero))
    }

    pub fn add(&mut self, alpha: usize, p: i64, c: &Rat) -> Result<(), BrieskornError> {
        self.check(p)?;
        if c.is_zero() {
            return Ok(());
        }
        let e = self.coeffs.entry((alpha, p)).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&(alpha, p));
        }
        Ok(())
    }

    /// `self += c · z^shift · other`.
    pub fn add_scaled(&mut self, other: &LatticeElement, c: &Rat, shift: i64) -> Result<(), BrieskornError> {
        for ((a, p), v) in &other.coeffs {
            self.add(*a, p + shift, &(v * c))?;
        }
        Ok(())
    }

    /// Same coefficients on a different window.
    pub fn rewindow(&self, lo: i64, hi: i64) -> Result<Self, BrieskornError> {
        let mut out = LatticeElement::zero(self.mu, lo, hi);
        out.add_scaled(self, &Rat::one(), 0)?;
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Nonzero entries `((α, p), c)` in (α, p) order.
    pub fn terms(&self) -> impl Iterator<Item = (&(usize, i64), &Rat)> {
        self.coeffs.iter()
    }

    /// Part with z-power in `[lo, hi]`, window unchanged.
    pub fn restrict(&self, lo: i64, hi: i64) -> Self {
        let mut out = LatticeElement::zero(self.mu, self.lo, self.hi);
        out.coeffs =
            self.coeffs.iter().filter(|((_, p), _)| *p >= lo && *p <= hi).map(|(k, v)| (*k, v.clone())).collect();
        out
    }

    /// Coordinates of the `z^p` slice.
    pub fn slice(&self, p: i64) -> Result<Vec<Rat>, BrieskornError> {
        (0..self.mu).map(|a| self.get(a, p)).collect()
    }
}

type Reduced = Arc<Vec<(usize, i64, Rat)>>;

/// Memoized reduction map over a fixed ring.
#[derive(Debug)]
pub struct Reducer<'a> {
    ring: &'a JacobiRing,
    cache: RwLock<HashMap<Monomial, Reduced>>,
}

impl<'a> Reducer<'a> {
    pub fn new(ring: &'a JacobiRing) -> Self {
        Reducer { ring, cache: RwLock::new(HashMap::new()) }
    }

    pub fn ring(&self) -> &JacobiRing {
        self.ring
    }

    /// `[m dⁿx]` as entries `(α, relative z-power, c)`.
    fn monomial(&self, m: &Monomial) -> Result<Reduced, BrieskornError> {
        if let Some(r) = self.cache.read().expect("lock").get(m) {
            return Ok(r.clone());
        }
        let ring = self.ring;
        let mut acc: BTreeMap<(usize, i64), Rat> = BTreeMap::new();
        let nf = ring.normal_form(&Poly::monomial(m.clone()))?;
        for (a, c) in nf.coords.iter().enumerate() {
            if !c.is_zero() {
                acc.insert((a, 0), c.clone());
            }
        }
        let mut div = Poly::zero(ring.nvars());
        for (i, h) in nf.witness.iter().enumerate() {
            div.add_scaled(&h.derivative(i), &Rat::one());
        }
        let minus = -Rat::one();
        for (dm, c) in div.terms() {
            for (a, p, v) in self.monomial(dm)?.iter() {
                let e = acc.entry((*a, p + 1)).or_insert_with(Rat::zero);
                *e += v * c * &minus;
            }
        }
        let out: Reduced =
            Arc::new(acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((a, p), v)| (a, p, v)).collect());
        self.cache.write().expect("lock").insert(m.clone(), out.clone());
        Ok(out)
    }

    /// `[g dⁿx z^p]` on the exact window `[p, p + ⌊deg g⌋]`.
    pub fn reduce(&self, g: &Poly, p: i64) -> Result<LatticeElement, BrieskornError> {
        let top = g
            .terms()
            .map(|(m, _)| m.degree(self.ring.weights()).floor().to_integer())
            .max()
            .map(|d| i64::try_from(d).expect("small degree"))
            .unwrap_or(0);
        let mut out = LatticeElement::zero(self.ring.mu(), p, p + top.max(0));
        self.reduce_into(g, p, &Rat::one(), &mut out)?;
        Ok(out)
    }

    /// `target += c·[g dⁿx z^p]`.
    pub fn reduce_into(&self, g: &Poly, p: i64, c: &Rat, target: &mut LatticeElement) -> Result<(), BrieskornError> {
        for (m, gc) in g.terms() {
            let f = gc * c;
            for (a, q, v) in self.monomial(m)?.iter() {
                target.add(*a, p + q, &(v * &f))?;
            }
        }
        Ok(())
    }
}

/// One violated degree condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GoodBasisViolation {
    /// `deg φ_α + deg φ_β − ĉ` is a positive integer.
    Pairing { alpha: usize, beta: usize, excess: Rat },
    /// `deg φ_α − deg φ_β` is a positive integer.
    Gauge { alpha: usize, beta: usize, gap: Rat },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodBasisReport {
    pub violations: Vec<GoodBasisViolation>,
}

impl GoodBasisReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for GoodBasisViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GoodBasisViolation::Pairing { alpha, beta, excess } => {
                write!(f, "pairing of φ_{} and φ_{} exceeds top degree by {}", alpha + 1, beta + 1, fmt_rat(excess))
            }
            GoodBasisViolation::Gauge { alpha, beta, gap } => {
                write!(f, "φ_{} − φ_{} differ by integer degree {}", alpha + 1, beta + 1, fmt_rat(gap))
            }
        }
    }
}

/// Degree counting on a raw degree list.
pub fn good_basis_degree_check_degrees(degrees: &[Rat], chat: &Rat) -> GoodBasisReport {
    let zero = Rat::zero();
    let mut violations = Vec::new();
    for (a, da) in degrees.iter().enumerate() {
        for (b, db) in degrees.iter().enumerate() {
            let excess = da + db - chat;
            if b >= a && excess.is_integer() && excess > zero {
                violations.push(GoodBasisViolation::Pairing { alpha: a, beta: b, excess });
            }
            let gap = da - db;
            if gap.is_integer() && gap > zero {
                violations.push(GoodBasisViolation::Gauge { alpha: a, beta: b, gap });
            }
        }
    }
    GoodBasisReport { violations }
}

/// Degree counting for the ring's basis.
pub fn good_basis_degree_check(ring: &JacobiRing) -> GoodBasisReport {
    good_basis_degree_check_degrees(&ring.basis().degrees, ring.central_charge())
}

/// Upper bound on recursion layers, `⌈deg g / min q⌉`.
pub fn descent_bound(ring: &JacobiRing, deg: &Rat) -> i64 {
    let qmin = ring.weights().weights().iter().min().cloned().unwrap_or_else(|| int(1));
    i64::try_from((deg / qmin).ceil().to_integer()).expect("small")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn e12() -> JacobiRing {
        JacobiRing::new(&Poly::from_exponents(2, &[vec![3, 0], vec![0, 7]]).unwrap()).unwrap()
    }

    #[test]
    fn basis_element_reduces_to_itself() {
        let r = e12();
        let red = Reducer::new(&r);
        let e = red.reduce(&Poly::monomial(r.phi(5).clone()), 0).unwrap();
        assert_eq!(e.terms().collect::<Vec<_>>(), vec![(&(5, 0), &int(1))]);
    }

    #[test]
    fn one_step_relations() {
        let r = e12();
        let red = Reducer::new(&r);
        let e = red.reduce(&Poly::monomial(Monomial::new(vec![3, 0])), 0).unwrap();
        assert_eq!(e.get(0, 1).unwrap(), rat(-1, 3));
        assert_eq!(e.terms().count(), 1);
        assert!(red.reduce(&Poly::monomial(Monomial::new(vec![1, 6])), 0).unwrap().is_zero());
    }

    #[test]
    fn window_is_enforced() {
        let e = LatticeElement::zero(3, -1, 1);
        assert!(e.get(0, 2).is_err());
        assert_eq!(e.get(0, 1).unwrap(), int(0));
    }

    #[test]
    fn padded_counterexample_fails() {
        let report = good_basis_degree_check_degrees(&[int(0), rat(1, 3), int(1)], &rat(1, 3));
        assert!(!report.passed());
        assert!(good_basis_degree_check(&e12()).passed());
    }
}
