//! Flat coordinates, their inverse, the genus-zero prepotential, the sign
//! normalization `t̃_j = (−1)^{1−deg t_j} t_j`, and B-side WDVV residuals.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{fmt_rat, int, is_integer, Monomial, Poly, Rat};
use crate::brieskorn::BrieskornError;
use crate::jacobi::JacobiRing;
use crate::primitive::PrimitiveForm;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrobeniusError {
    #[error(transparent)]
    Brieskorn(#[from] BrieskornError),
    #[error("J solved only to order {0}; need at least {1}")]
    OrderTooLow(usize, usize),
    #[error("gradient is not integrable at {0}")]
    NotIntegrable(String),
    #[error("non-real phase (-1)^{0} on {1}")]
    Phase(String, String),
}

/// Drops every term of total degree above `n`.
pub fn truncate(p: &Poly, n: u32) -> Poly {
    let mut out = Poly::zero(p.nvars());
    for (m, c) in p.terms() {
        if m.total_degree() <= n {
            out.add_term(m.clone(), c.clone());
        }
    }
    out
}

/// Product truncated at total degree `n`.
pub fn mul_trunc(a: &Poly, b: &Poly, n: u32) -> Poly {
    let mut out = Poly::zero(a.nvars());
    for (m, x) in a.terms() {
        let dm = m.total_degree();
        if dm > n {
            continue;
        }
        for (k, y) in b.terms() {
            if dm + k.total_degree() <= n {
                out.add_term(m.mul(k), x * y);
            }
        }
    }
    out
}

/// `p(subs_1, …, subs_μ)` truncated at total degree `n`; every substituted
/// series must have no constant term.
pub fn compose(p: &Poly, subs: &[Poly], n: u32) -> Poly {
    let nv = subs.first().map_or(p.nvars(), Poly::nvars);
    let mut powers: Vec<Vec<Poly>> = subs.iter().map(|s| vec![Poly::constant(nv, Rat::one()), s.clone()]).collect();
    let mut out = Poly::zero(nv);
    for (m, c) in p.terms() {
        if m.total_degree() > n {
            continue;
        }
        let mut term = Poly::constant(nv, c.clone());
        for (a, &e) in m.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            while powers[a].len() <= e as usize {
                let next = mul_trunc(powers[a].last().unwrap(), &subs[a], n);
                powers[a].push(next);
            }
            term = mul_trunc(&term, &powers[a][e as usize], n);
        }
        out.add_scaled(&term, &Rat::one());
    }
    out
}

/// `t_α(s)` and its inverse `s_α(t)`, both truncated at `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatCoordinateMap {
    pub order: usize,
    pub t_of_s: Vec<Poly>,
    pub s_of_t: Vec<Poly>,
}

/// Inverts `t = s + O(s²)` by fixed-point iteration `s ← t − (t(s) − s)`.
pub fn invert(t_of_s: &[Poly], order: u32) -> Vec<Poly> {
    let mu = t_of_s.len();
    let ident: Vec<Poly> = (0..mu).map(|a| Poly::monomial(Monomial::var(mu, a))).collect();
    let nonlinear: Vec<Poly> = t_of_s.iter().zip(&ident).map(|(t, s)| t - s).collect();
    let mut s = ident.clone();
    for _ in 1..order {
        s = nonlinear.iter().zip(&ident).map(|(nl, t)| t - &compose(nl, &s, order)).collect();
    }
    s
}

/// Reads `t_α = 𝒥_{−1}^α` and inverts it.
pub fn flat_coordinates(pf: &PrimitiveForm) -> Result<FlatCoordinateMap, FrobeniusError> {
    let order = pf.j.order;
    if order < 2 {
        return Err(FrobeniusError::OrderTooLow(order, 2));
    }
    let t_of_s = (0..pf.j.mu).map(|a| pf.j.component(a, -1)).collect::<Result<Vec<_>, _>>()?;
    let s_of_t = invert(&t_of_s, order as u32);
    Ok(FlatCoordinateMap { order, t_of_s, s_of_t })
}

/// `F₀` through order `order`, in monomial-coefficient form over `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prepotential {
    pub order: usize,
    pub poly: Poly,
}

impl Prepotential {
    /// Homogeneous component of total degree `k` (e.g. `F^{(4)}`).
    pub fn part(&self, k: u32) -> Poly {
        let mut out = Poly::zero(self.poly.nvars());
        for (m, c) in self.poly.terms() {
            if m.total_degree() == k {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// `∂_{t_{i_1}} ⋯ ∂_{t_{i_k}} F₀ |_{t=0}`.
    pub fn correlator(&self, idx: &[usize]) -> Rat {
        let mu = self.poly.nvars();
        let mut e = vec![0u32; mu];
        for &i in idx {
            e[i] += 1;
        }
        let m = Monomial::new(e.clone());
        let sym: Rat = e.iter().map(|&k| crate::algebra::factorial(k)).product();
        self.poly.coeff(&m) * sym
    }
}

/// Integrates `∂_α F₀ = Σ_β g_{αβ} 𝒥_{−2}^β(s(t))`.
pub fn prepotential(
    ring: &JacobiRing,
    pf: &PrimitiveForm,
    flat: &FlatCoordinateMap,
) -> Result<Prepotential, FrobeniusError> {
    let mu = ring.mu();
    let order = flat.order as u32;
    let j2: Vec<Poly> = (0..mu).map(|b| pf.j.component(b, -2)).collect::<Result<_, _>>()?;
    let j2t: Vec<Poly> = j2.iter().map(|p| compose(p, &flat.s_of_t, order)).collect();
    let g = &ring.pairing().g;
    let grads: Vec<Poly> = (0..mu)
        .map(|a| {
            let mut grad = Poly::zero(mu);
            for (b, p) in j2t.iter().enumerate() {
                if !g[a][b].is_zero() {
                    grad.add_scaled(p, &g[a][b]);
                }
            }
            grad
        })
        .collect();
    let mut coeffs: BTreeMap<Monomial, Rat> = BTreeMap::new();
    for (a, grad) in grads.iter().enumerate() {
        for (m, c) in grad.terms() {
            let mut e = m.exps().to_vec();
            e[a] += 1;
            let k = Monomial::new(e);
            let v = c / int(i64::from(k.exps()[a]));
            if coeffs.get(&k).is_some_and(|prev| prev != &v) {
                return Err(FrobeniusError::NotIntegrable(render_t(&k)));
            }
            coeffs.insert(k, v);
        }
    }
    for (k, v) in &coeffs {
        for (a, &e) in k.exps().iter().enumerate().filter(|(_, e)| **e > 0) {
            let mut lower = k.exps().to_vec();
            lower[a] -= 1;
            if grads[a].coeff(&Monomial::new(lower)) != v * int(i64::from(e)) {
                return Err(FrobeniusError::NotIntegrable(render_t(k)));
            }
        }
    }
    let mut poly = Poly::zero(mu);
    for (k, v) in coeffs {
        poly.add_term(k, v);
    }
    Ok(Prepotential { order: flat.order + 1, poly })
}

/// Variable names `t1..tμ`.
pub fn t_names(mu: usize) -> Vec<String> {
    (1..=mu).map(|i| format!("t{i}")).collect()
}

/// A monomial rendered over `t1..tμ`.
pub fn render_t(m: &Monomial) -> String {
    let names = t_names(m.nvars());
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    m.render(&refs)
}

/// Phase exponent `ĉ − Σ k_j deg φ_j` of a monomial, reduced mod 2.
pub fn phase_exponent(ring: &JacobiRing, m: &Monomial) -> Rat {
    let degs = &ring.basis().degrees;
    let mut r = ring.central_charge().clone();
    for (j, &k) in m.exps().iter().enumerate() {
        r -= &degs[j] * int(i64::from(k));
    }
    let two = int(2);
    let q = (&r / &two).floor();
    r - q * two
}

/// Rescales by `t_j = (−1)^{deg φ_j} t̃_j` and `ζ̃ = (−1)^{−ĉ}ζ`; every phase
/// must come out real.
pub fn sign_normalize(ring: &JacobiRing, p: &Prepotential) -> Result<Prepotential, FrobeniusError> {
    let mut poly = Poly::zero(p.poly.nvars());
    for (m, c) in p.poly.terms() {
        let e = phase_exponent(ring, m);
        if !is_integer(&e) {
            return Err(FrobeniusError::Phase(fmt_rat(&e), render_t(m)));
        }
        let sign = if e.is_zero() { c.clone() } else { -c.clone() };
        poly.add_term(m.clone(), sign);
    }
    Ok(Prepotential { order: p.order, poly })
}

/// Third derivatives `F_{abc}` cached for repeated WDVV residuals.
pub struct WdvvResidual {
    mu: usize,
    eta: Vec<(usize, usize, Rat)>,
    thirds: BTreeMap<[usize; 3], Poly>,
    valid: u32,
}

impl WdvvResidual {
    pub fn new(ring: &JacobiRing, p: &Prepotential) -> Self {
        let mu = ring.mu();
        let inv = ring.pairing().inverse();
        let eta = (0..mu)
            .flat_map(|e| (0..mu).map(move |f| (e, f)))
            .filter(|&(e, f)| !inv[e][f].is_zero())
            .map(|(e, f)| (e, f, inv[e][f].clone()))
            .collect();
        let valid = (p.order as u32).saturating_sub(3);
        let mut thirds = BTreeMap::new();
        for i in 0..mu {
            let di = p.poly.derivative(i);
            for j in i..mu {
                let dij = di.derivative(j);
                for k in j..mu {
                    let d = truncate(&dij.derivative(k), valid);
                    if !d.is_zero() {
                        thirds.insert([i, j, k], d);
                    }
                }
            }
        }
        WdvvResidual { mu, eta, thirds, valid }
    }

    fn third(&self, i: usize, j: usize, k: usize) -> Option<&Poly> {
        let mut key = [i, j, k];
        key.sort_unstable();
        self.thirds.get(&key)
    }

    /// `Σ_{e,f} F_{abe} η^{ef} F_{fcd} − F_{ace} η^{ef} F_{fbd}` as a series in
    /// `t`, kept through the degree the truncation supports.
    pub fn residual(&self, q: [usize; 4]) -> Poly {
        let [a, b, c, d] = q;
        let mut out = Poly::zero(self.mu);
        for (e, f, w) in &self.eta {
            for (x, y, sign) in [((a, b), (c, d), Rat::one()), ((a, c), (b, d), -Rat::one())] {
                if let (Some(l), Some(r)) = (self.third(x.0, x.1, *e), self.third(*f, y.0, y.1)) {
                    out.add_scaled(&mul_trunc(l, r, self.valid), &(w * &sign));
                }
            }
        }
        out
    }
}

/// One residual; see [`WdvvResidual`] for many.
pub fn wdvv_residual(ring: &JacobiRing, p: &Prepotential, q: [usize; 4]) -> Poly {
    WdvvResidual::new(ring, p).residual(q)
}
