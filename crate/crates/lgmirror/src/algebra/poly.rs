//! Monomials and sparse multivariate polynomials over [`Rat`].

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::rational::{fmt_rat, int, Rat};
use super::{AlgebraError, WeightSystem};

/// Exponent vector `∏ x_j^{e_j}`. The derived order is lex on exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    /// The constant monomial `1` in `n` variables.
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    /// The variable `x_i` in `n` variables.
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn pow(&self, k: u32) -> Monomial {
        Monomial(self.0.iter().map(|a| a * k).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Monomial(out))
    }

    /// Weighted degree `Σ e_j q_j`.
    pub fn degree(&self, w: &WeightSystem) -> Rat {
        self.0.iter().zip(w.weights()).fold(Rat::zero(), |acc, (e, q)| acc + q * int(*e as i64))
    }

    /// Renders with the given variable names, `1` for the constant.
    pub fn render(&self, names: &[&str]) -> String {
        let mut parts = Vec::new();
        for (e, name) in self.0.iter().zip(names) {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// Default variable names for up to three variables, then `x1, x2, ...`.
pub fn default_names(n: usize) -> Vec<String> {
    if n <= 3 {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

/// Sparse polynomial: a map from [`Monomial`] to nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        Poly::term(Monomial::one(nvars), c)
    }

    pub fn term(m: Monomial, c: Rat) -> Self {
        let mut p = Poly::zero(m.nvars());
        p.add_term(m, c);
        p
    }

    pub fn monomial(m: Monomial) -> Self {
        Poly::term(m, Rat::one())
    }

    /// Polynomial with unit coefficients on the given exponent vectors.
    pub fn from_exponents(nvars: usize, rows: &[Vec<u32>]) -> Result<Self, AlgebraError> {
        let mut p = Poly::zero(nvars);
        for r in rows {
            if r.len() != nvars {
                return Err(AlgebraError::Arity { expected: nvars, found: r.len() });
            }
            p.add_term(Monomial::new(r.clone()), Rat::one());
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// Adds `c·m`, dropping the entry if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        debug_assert_eq!(m.nvars(), self.nvars);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c·other`.
    pub fn add_scaled(&mut self, other: &Poly, c: &Rat) {
        if c.is_zero() {
            return;
        }
        for (m, a) in &other.terms {
            self.add_term(m.clone(), a * c);
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        let mut out = Poly::zero(self.nvars);
        out.add_scaled(self, c);
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, a) in &self.terms {
            for (n, b) in &other.terms {
                out.add_term(m.mul(n), a * b);
            }
        }
        out
    }

    /// `self · c·m`.
    pub fn mul_term(&self, m: &Monomial, c: &Rat) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (n, a) in &self.terms {
            out.add_term(n.mul(m), a * c);
        }
        out
    }

    /// Partial derivative in `x_i`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, a) in &self.terms {
            let e = m.exps()[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[i] -= 1;
            out.add_term(Monomial::new(exps), a * int(e as i64));
        }
        out
    }

    /// Splits into weighted-homogeneous components keyed by degree.
    pub fn homogeneous_parts(&self, w: &WeightSystem) -> BTreeMap<Rat, Poly> {
        let mut parts: BTreeMap<Rat, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            parts.entry(m.degree(w)).or_insert_with(|| Poly::zero(self.nvars)).add_term(m.clone(), c.clone());
        }
        parts
    }

    /// Renders using `names`, terms in canonical order (weighted degree,
    /// then exponent lex) when weights are supplied.
    pub fn render(&self, names: &[&str], w: Option<&WeightSystem>) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        if let Some(w) = w {
            terms.sort_by(|a, b| (a.0.degree(w), a.0).cmp(&(b.0.degree(w), b.0)));
        }
        let mut out = String::new();
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = c < &Rat::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = m.render(names);
            if m.is_one() {
                out.push_str(&fmt_rat(&mag));
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{}*{}", fmt_rat(&mag), mono));
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars);
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.render(&names, None))
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rat::one());
        out
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rat::one());
        out
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        Poly::mul(self, rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    fn p(rows: &[(i64, i64, &[u32])]) -> Poly {
        let mut out = Poly::zero(rows[0].2.len());
        for (n, d, e) in rows {
            out.add_term(Monomial::new(e.to_vec()), rat(*n, *d));
        }
        out
    }

    #[test]
    fn cancellation_leaves_no_zero_entries() {
        let a = p(&[(1, 1, &[1, 0]), (2, 1, &[0, 1])]);
        let b = p(&[(1, 1, &[1, 0])]);
        let d = &a - &b;
        assert_eq!(d.len(), 1);
        assert_eq!(d.coeff(&Monomial::new(vec![0, 1])), rat(2, 1));
        assert!((&d - &d).is_zero());
    }

    #[test]
    fn product_and_derivative() {
        let a = p(&[(1, 1, &[1, 0]), (1, 1, &[0, 1])]);
        let sq = &a * &a;
        assert_eq!(sq.coeff(&Monomial::new(vec![1, 1])), rat(2, 1));
        let dx = sq.derivative(0);
        assert_eq!(dx, p(&[(2, 1, &[1, 0]), (2, 1, &[0, 1])]));
    }

    #[test]
    fn rendering() {
        let a = p(&[(-1, 3, &[0, 0]), (1, 1, &[1, 2]), (5, 7, &[0, 1])]);
        assert_eq!(a.to_string(), "-1/3 + 5/7*y + x*y^2");
    }
}
