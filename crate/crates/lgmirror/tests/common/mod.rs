//! Checks shared by the property suites and the acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::OnceLock;

use lgmirror::algebra::{transpose, Monomial, Poly, Rat, WeightSystem};
use lgmirror::brieskorn::Reducer;
use lgmirror::catalog::{Catalog, SingularityRecord};
use lgmirror::frobenius::{compose, flat_coordinates, prepotential, truncate, WdvvResidual};
use lgmirror::jacobi::{monomials_of_degree, rank, JacobiRing, PivotOrder};
use lgmirror::primitive::{solve_primitive_form, MultiIndex};
use num_traits::{One, Zero};
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::TestRunner;

/// Strange-duality partner of each primary entry under the transpose.
pub const DUALS: [(&str, &str); 14] = [
    ("E12", "E12"),
    ("E13", "Z11"),
    ("E14", "Q10"),
    ("Z11", "E13"),
    ("Z12", "Z12"),
    ("Z13", "Q11"),
    ("Q10", "E14"),
    ("Q11", "Z13"),
    ("Q12", "Q12"),
    ("W12", "W12"),
    ("W13", "S11"),
    ("S11", "W13"),
    ("S12", "S12"),
    ("U12", "U12"),
];

pub fn catalog() -> &'static Catalog {
    static CAT: OnceLock<Catalog> = OnceLock::new();
    CAT.get_or_init(Catalog::builtin)
}

pub fn record(name: &str) -> &'static SingularityRecord {
    catalog().get(name).expect("builtin entry")
}

pub fn primary() -> Vec<&'static SingularityRecord> {
    catalog().primary().collect()
}

/// `Σ k_α (1 − deg φ_α)` of an `s`- or `t`-monomial.
fn s_degree(ring: &JacobiRing, m: &Monomial) -> Rat {
    MultiIndex::new(m.exps().to_vec()).degree(&ring.basis().degrees)
}

/// Distinct weighted degrees of monomials up to `bound`.
pub fn monomial_degrees(w: &WeightSystem, bound: &Rat) -> Vec<Rat> {
    let mut out = BTreeSet::new();
    let mut stack = vec![(0usize, Rat::zero())];
    while let Some((i, d)) = stack.pop() {
        if i == w.nvars() {
            out.insert(d);
            continue;
        }
        let mut e = d;
        while &e <= bound {
            stack.push((i + 1, e.clone()));
            e += &w.weights()[i];
        }
    }
    out.into_iter().collect()
}

/// Random weighted-homogeneous polynomials of degree at most `ĉ + 2`.
pub fn homogeneous_poly(w: &WeightSystem) -> impl Strategy<Value = Poly> {
    let w = w.clone();
    let bound = w.central_charge() + Rat::from_integer(2.into());
    let degrees = monomial_degrees(&w, &bound);
    (0..degrees.len(), vec(-6i64..=6, 1..12)).prop_map(move |(k, cs)| {
        let mut p = Poly::zero(w.nvars());
        for (m, c) in monomials_of_degree(&w, &degrees[k]).into_iter().zip(cs.iter().cycle()) {
            p.add_term(m, Rat::from_integer((*c).into()));
        }
        p
    })
}

/// Brieskorn reduction and Jacobi normal forms agree between pivot orders.
pub fn pivot_suite(rec: &SingularityRecord, runner: &mut TestRunner) -> Result<(), String> {
    let fw = rec.ring_with(PivotOrder::Forward).map_err(|e| e.to_string())?;
    let rv = rec.ring_with(PivotOrder::Reverse).map_err(|e| e.to_string())?;
    let (rf, rr) = (Reducer::new(&fw), Reducer::new(&rv));
    runner
        .run(&homogeneous_poly(fw.weights()), |g| {
            let a = rf.reduce(&g, 0).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let b = rr.reduce(&g, 0).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(a, b);
            prop_assert_eq!(fw.coords(&g).ok(), rv.coords(&g).ok());
            Ok(())
        })
        .map_err(|e| format!("{}: {e}", rec.name))
}

/// `ζ`, `𝒥`, `t` and `F₀` are homogeneous of the expected degrees.
pub fn homogeneity(rec: &SingularityRecord, order: usize) -> Result<(), String> {
    let ring = rec.ring().map_err(|e| e.to_string())?;
    let degs = &ring.basis().degrees;
    let pf = solve_primitive_form(&ring, order).map_err(|e| e.to_string())?;
    for (series, name) in [(&pf.zeta, "zeta"), (&pf.j, "J")] {
        for (k, a, p, _) in series.entries() {
            let d = k.degree(degs) + Rat::from_integer(p.into()) + &degs[a];
            if !d.is_zero() {
                return Err(format!("{}: {name} term {k} at φ_{} z^{p} has degree {d}", rec.name, a + 1));
            }
        }
    }
    let flat = flat_coordinates(&pf).map_err(|e| e.to_string())?;
    for (a, t) in flat.t_of_s.iter().enumerate() {
        for (m, _) in t.terms() {
            if s_degree(&ring, m) != Rat::one() - &degs[a] {
                return Err(format!("{}: t{} has an inhomogeneous term", rec.name, a + 1));
            }
        }
    }
    let f0 = prepotential(&ring, &pf, &flat).map_err(|e| e.to_string())?;
    let target = Rat::from_integer(3.into()) - ring.central_charge();
    for (m, _) in f0.poly.terms() {
        if s_degree(&ring, m) != target {
            return Err(format!("{}: F0 has an inhomogeneous term", rec.name));
        }
    }
    Ok(())
}

/// The gradient `g_{αβ} 𝒥_{−2}^β(s(t))` is closed, and `F₀` integrates it.
pub fn integrability(rec: &SingularityRecord, order: usize) -> Result<(), String> {
    let ring = rec.ring().map_err(|e| e.to_string())?;
    let mu = ring.mu();
    let pf = solve_primitive_form(&ring, order).map_err(|e| e.to_string())?;
    let flat = flat_coordinates(&pf).map_err(|e| e.to_string())?;
    let n = flat.order as u32;
    let g = &ring.pairing().g;
    let j2: Vec<Poly> = (0..mu)
        .map(|b| pf.j.component(b, -2).map(|p| compose(&p, &flat.s_of_t, n)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let grads: Vec<Poly> = (0..mu)
        .map(|a| {
            let mut out = Poly::zero(mu);
            for (b, p) in j2.iter().enumerate() {
                out.add_scaled(p, &g[a][b]);
            }
            out
        })
        .collect();
    let f0 = prepotential(&ring, &pf, &flat).map_err(|e| e.to_string())?;
    for a in 0..mu {
        if truncate(&f0.poly.derivative(a), n) != truncate(&grads[a], n) {
            return Err(format!("{}: dF0/dt{} differs from the gradient", rec.name, a + 1));
        }
        for b in a + 1..mu {
            let ab = truncate(&grads[a].derivative(b), n - 1);
            let ba = truncate(&grads[b].derivative(a), n - 1);
            if ab != ba {
                return Err(format!("{}: gradient not closed in (t{}, t{})", rec.name, a + 1, b + 1));
            }
        }
    }
    Ok(())
}

/// WDVV residual of `F₀` over every quadruple, up to the symmetries
/// `b ↔ c` and `(a, b) ↔ (d, c)`. Returns the number checked.
pub fn wdvv_vanishes(rec: &SingularityRecord, order: usize) -> Result<usize, String> {
    let ring = rec.ring().map_err(|e| e.to_string())?;
    let pf = solve_primitive_form(&ring, order).map_err(|e| e.to_string())?;
    let flat = flat_coordinates(&pf).map_err(|e| e.to_string())?;
    let f0 = prepotential(&ring, &pf, &flat).map_err(|e| e.to_string())?;
    let w = WdvvResidual::new(&ring, &f0);
    let mu = ring.mu();
    let mut n = 0;
    for a in 0..mu {
        for d in a..mu {
            for b in 0..mu {
                for c in b + 1..mu {
                    n += 1;
                    if !w.residual([a, b, c, d]).is_zero() {
                        return Err(format!("{}: WDVV fails at {:?}", rec.name, [a + 1, b + 1, c + 1, d + 1]));
                    }
                }
            }
        }
    }
    Ok(n)
}

/// `dim C[x]/(∂W)` by linear algebra on each graded piece; pieces above
/// `ĉ` must vanish.
pub fn brute_force_milnor(w: &Poly, weights: &WeightSystem) -> usize {
    let chat = weights.central_charge();
    let bound = chat + Rat::one();
    let partials: Vec<Poly> = (0..w.nvars()).map(|i| w.derivative(i)).collect();
    let mut total = 0;
    for d in monomial_degrees(weights, &bound) {
        let basis = monomials_of_degree(weights, &d);
        let mut rows = Vec::new();
        for (i, p) in partials.iter().enumerate() {
            let shift = &d - (Rat::one() - &weights.weights()[i]);
            if shift < Rat::zero() {
                continue;
            }
            for m in monomials_of_degree(weights, &shift) {
                let prod = p.mul_term(&m, &Rat::one());
                rows.push(basis.iter().map(|b| prod.coeff(b)).collect::<Vec<Rat>>());
            }
        }
        let dim = basis.len() - rank(&rows);
        if &d > chat {
            assert_eq!(dim, 0, "quotient survives above ĉ in degree {d}");
        }
        total += dim;
    }
    total
}

/// Milnor number three ways, the last only for curves.
pub fn milnor_oracle(rec: &SingularityRecord) -> Result<(), String> {
    let ring = rec.ring().map_err(|e| e.to_string())?;
    let expected = ring.weights().milnor_number();
    if Rat::from_integer(ring.mu().into()) != expected {
        return Err(format!("{}: basis {} vs product formula {expected}", rec.name, ring.mu()));
    }
    if rec.nvars() == 2 {
        let brute = brute_force_milnor(&rec.poly(), ring.weights());
        if brute != ring.mu() {
            return Err(format!("{}: brute force {brute} vs basis {}", rec.name, ring.mu()));
        }
    }
    Ok(())
}

fn exponent_set(p: &Poly, perm: &[usize]) -> BTreeSet<Vec<u32>> {
    p.terms().map(|(m, _)| perm.iter().map(|&i| m.exps()[i]).collect()).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// Primary entry whose polynomial is `f^T` up to renaming variables.
pub fn transpose_partner(rec: &SingularityRecord) -> Option<&'static str> {
    let t = transpose(&rec.poly()).ok()?;
    let target = exponent_set(&t, &(0..t.nvars()).collect::<Vec<_>>());
    primary().into_iter().find_map(|other| {
        let p = other.poly();
        (p.nvars() == t.nvars() && permutations(p.nvars()).iter().any(|perm| exponent_set(&p, perm) == target))
            .then_some(other.name.as_str())
    })
}
