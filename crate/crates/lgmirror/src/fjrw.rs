//! Genus-zero FJRW side: sector degrees, selection and concavity tests, the
//! orbifold-GRR 4-point formula, and WDVV reconstruction of 4- and 5-point
//! correlators in the mirror Jacobi basis.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::linalg::{Echelon, Insert, SparseRow};
use crate::algebra::rational::{bernoulli2, lcm_denominators};
use crate::algebra::{
    fmt_rat, frac, int, is_integer, solve_weights, symmetry_group, to_i64, AlgebraError, ExponentMatrix, GroupElement,
    Monomial, Poly, Rat, SymmetryGroup, WeightSystem,
};
use crate::jacobi::{JacobiError, JacobiRing};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FjrwError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Jacobi(#[from] JacobiError),
    #[error("{0} is not in G_W")]
    NotInGroup(String),
    #[error("{found} sectors for a {expected}-dimensional state space")]
    SectorCount { found: usize, expected: usize },
    #[error("not concave with D = 1 ({0}); use WDVV path")]
    NotConcave(String),
    #[error("restriction of W to Fix {0} is not invertible")]
    Restriction(String),
    #[error("WDVV leaves {} correlators unresolved: {}", .0.len(), .0.join(", "))]
    Underdetermined(Vec<String>),
    #[error("inconsistent WDVV system: {0}")]
    Inconsistent(String),
}

/// `H_γ` together with the label and normalization of the state `Ψ(φ_α)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sector {
    pub gamma: GroupElement,
    /// `φ` in a broad state `φ·1_γ`, over the variables of `W`.
    pub broad_label: Option<Monomial>,
    /// Normalization as printed, e.g. `∓3` or `sqrt(-3/K)`; unit for narrow rows.
    pub scale: String,
    /// Row carries a `∓`; resolved to the upper sign.
    pub ambiguous_sign: bool,
}

impl Sector {
    pub fn narrow(gamma: GroupElement) -> Self {
        Sector { gamma, broad_label: None, scale: "1".into(), ambiguous_sign: false }
    }

    /// `N_γ`.
    pub fn fix_dim(&self) -> usize {
        self.gamma.fixed_dim()
    }

    pub fn is_narrow(&self) -> bool {
        self.gamma.is_narrow()
    }
}

/// A genus-`g` correlator `⟨τ_{ℓ_1}(e_{a_1}) ⋯ τ_{ℓ_k}(e_{a_k})⟩`, insertions
/// being mirror basis indices; kept sorted so keys are multisets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorrelatorKey {
    pub genus: u32,
    pub insertions: Vec<usize>,
    pub psi_powers: Vec<u32>,
}

impl CorrelatorKey {
    /// Primary genus-zero key.
    pub fn genus0(mut insertions: Vec<usize>) -> Self {
        insertions.sort_unstable();
        let k = insertions.len();
        CorrelatorKey { genus: 0, insertions, psi_powers: vec![0; k] }
    }

    pub fn len(&self) -> usize {
        self.insertions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.insertions.is_empty()
    }

    /// Stability `2g − 2 + k > 0`.
    pub fn is_stable(&self) -> bool {
        2 * self.genus as usize + self.len() > 2
    }

    /// Renders insertions through the mirror basis monomials.
    pub fn render(&self, ring: &JacobiRing) -> String {
        let names = crate::algebra::default_names(ring.nvars());
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let parts: Vec<String> = self.insertions.iter().map(|&a| ring.phi(a).render(&refs)).collect();
        format!("<{}>", parts.join(", "))
    }
}

impl fmt::Display for CorrelatorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.insertions.iter().map(|a| format!("e{}", a + 1)).collect();
        write!(f, "<{}>_{}", parts.join(","), self.genus)
    }
}

/// `deg ρ_*ℒ_i` per variable and what follows from them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcavityReport {
    pub line_degrees: Vec<Rat>,
    /// All degrees integral; otherwise the moduli space is empty.
    pub integral: bool,
    pub concave: bool,
    /// `D = Σ_i (−deg_i − 1)`.
    pub rank_d: i64,
}

/// The pair `(W, G_W)`.
#[derive(Clone, Debug)]
pub struct FjrwTheory {
    poly: Poly,
    weights: WeightSystem,
    group: SymmetryGroup,
}

impl FjrwTheory {
    pub fn new(w: &Poly) -> Result<Self, FjrwError> {
        Ok(FjrwTheory { poly: w.clone(), weights: solve_weights(w)?, group: symmetry_group(w)? })
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn weights(&self) -> &WeightSystem {
        &self.weights
    }

    pub fn group(&self) -> &SymmetryGroup {
        &self.group
    }

    pub fn central_charge(&self) -> &Rat {
        self.weights.central_charge()
    }

    fn check(&self, g: &GroupElement) -> Result<(), FjrwError> {
        if self.group.contains(g) {
            Ok(())
        } else {
            Err(FjrwError::NotInGroup(g.to_string()))
        }
    }

    /// `N_γ/2 + Σ_i (Θ_i^γ − q_i)`.
    pub fn sector_degree(&self, g: &GroupElement) -> Result<Rat, FjrwError> {
        self.check(g)?;
        let mut d = int(g.fixed_dim() as i64) / int(2);
        for (t, q) in g.phases().iter().zip(self.weights.weights()) {
            d += t - q;
        }
        Ok(d)
    }

    /// Line bundle degrees `(2g − 2 + k) q_i − Σ_j Θ_i^{γ_j}` on a genus-`g`
    /// curve with `k = gammas.len()` markings.
    pub fn line_bundle_degrees(&self, gammas: &[&GroupElement], genus: u32) -> ConcavityReport {
        let k = gammas.len() as i64;
        let chi = int(2 * genus as i64 - 2 + k);
        let line_degrees: Vec<Rat> = self
            .weights
            .weights()
            .iter()
            .enumerate()
            .map(|(i, q)| {
                let s: Rat = gammas.iter().map(|g| g.phases()[i].clone()).sum();
                q * &chi - s
            })
            .collect();
        let integral = line_degrees.iter().all(is_integer);
        let narrow = gammas.iter().all(|g| g.is_narrow());
        let minus_one = -Rat::one();
        let concave = integral
            && narrow
            && genus == 0
            && line_degrees.iter().all(|d| d <= &minus_one)
            && self.boundary_negative(gammas);
        let rank_d = if integral { line_degrees.iter().map(|d| -to_i64(d).expect("small") - 1).sum() } else { 0 };
        ConcavityReport { line_degrees, integral, concave, rank_d }
    }

    /// Every component of every genus-zero stable tree carries negative
    /// degree in each variable. A component is a set partition of the
    /// markings into `m ≥ 3` branches; a branch `B` with `|B| ≥ 2` meets it
    /// at a node with phase `⟨Σ_B Θ − (|B| − 1) q⟩`.
    fn boundary_negative(&self, gammas: &[&GroupElement]) -> bool {
        let k = gammas.len();
        set_partitions(k).into_iter().filter(|p| p.len() >= 3).all(|blocks| {
            self.weights.weights().iter().enumerate().all(|(i, q)| {
                let mut deg = q * int(blocks.len() as i64 - 2);
                for b in &blocks {
                    let s: Rat = b.iter().map(|&j| gammas[j].phases()[i].clone()).sum();
                    deg -= if b.len() == 1 { s } else { frac(&(s - q * int(b.len() as i64 - 1))) };
                }
                deg.is_negative()
            })
        })
    }

    /// Orbifold-GRR evaluation of a concave genus-zero 4-point class with
    /// `D = 1`:
    /// `Σ_i [B₂(q_i)/2 − Σ_j B₂(Θ_i^{γ_j})/2 + Σ_{cuts} B₂(Θ_i^{cut})/2]`.
    pub fn ogrr_fourpoint(&self, gammas: [&GroupElement; 4]) -> Result<Rat, FjrwError> {
        for g in gammas {
            self.check(g)?;
        }
        let report = self.line_bundle_degrees(&gammas, 0);
        if !report.concave || report.rank_d != 1 {
            let d: Vec<String> = report.line_degrees.iter().map(fmt_rat).collect();
            return Err(FjrwError::NotConcave(format!("line degrees ({})", d.join(", "))));
        }
        let half = Rat::new(1.into(), 2.into());
        let mut total = Rat::zero();
        for (i, q) in self.weights.weights().iter().enumerate() {
            let th = |j: usize| &gammas[j].phases()[i];
            total += bernoulli2(q) * &half;
            for j in 0..4 {
                total -= bernoulli2(th(j)) * &half;
            }
            for (a, b) in [(0, 1), (0, 2), (0, 3)] {
                let cut = frac(&(q - th(a) - th(b)));
                debug_assert_eq!(bernoulli2(&cut), bernoulli2(&(Rat::one() - &cut)));
                total += bernoulli2(&cut) * &half;
            }
        }
        let l = lcm_denominators(gammas.iter().flat_map(|g| g.phases().iter()).chain(self.weights.weights()));
        debug_assert!((int(2) * &l * &l * &total).is_integer());
        Ok(total)
    }

    /// `W` restricted to `Fix(γ)`, in the fixed variables only.
    pub fn restriction(&self, g: &GroupElement) -> (Vec<usize>, Poly) {
        let fixed: Vec<usize> = (0..g.nvars()).filter(|&i| g.phases()[i].is_zero()).collect();
        let mut p = Poly::zero(fixed.len());
        for (m, c) in self.poly.terms() {
            let e = m.exps();
            if (0..e.len()).all(|i| e[i] == 0 || fixed.contains(&i)) {
                p.add_term(Monomial::new(fixed.iter().map(|&i| e[i]).collect()), c.clone());
            }
        }
        (fixed, p)
    }

    /// `dim H_γ`: `G_W`-invariant forms `m·∏_{i∈Fix γ} dx_i` with `m` in a
    /// Milnor basis of the restriction.
    pub fn sector_dim(&self, g: &GroupElement) -> Result<usize, FjrwError> {
        Ok(self.sector_basis(g)?.len())
    }

    /// Labels `m` spanning `H_γ`, over the variables of `W`.
    pub fn sector_basis(&self, g: &GroupElement) -> Result<Vec<Monomial>, FjrwError> {
        self.check(g)?;
        let n = g.nvars();
        if g.is_narrow() {
            return Ok(vec![Monomial::one(n)]);
        }
        let (fixed, p) = self.restriction(g);
        if p.len() != fixed.len() {
            return Err(FjrwError::Restriction(g.to_string()));
        }
        let ring = JacobiRing::new(&p).map_err(|_| FjrwError::Restriction(g.to_string()))?;
        let mut out = Vec::new();
        for m in &ring.basis().basis {
            let mut full = vec![0u32; n];
            for (k, &i) in fixed.iter().enumerate() {
                full[i] = m.exps()[k];
            }
            let invariant = self.group.generators.iter().all(|r| {
                let s: Rat = fixed.iter().map(|&i| &r.phases()[i] * int(i64::from(full[i]) + 1)).sum();
                is_integer(&s)
            });
            if invariant {
                out.push(Monomial::new(full));
            }
        }
        Ok(out)
    }
}

/// One seed `⟨x_i, x_i, M_i/x_i², φ_μ⟩ = q_i(W)` expanded in the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seed {
    pub variable: usize,
    pub combination: BTreeMap<CorrelatorKey, Rat>,
    pub value: Rat,
}

/// Correlator values for one arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correlators {
    pub arity: usize,
    /// Every degree- and group-admissible key and its value.
    pub values: BTreeMap<CorrelatorKey, Rat>,
    pub unknowns: usize,
    /// WDVV rows fed to the eliminator before it closed.
    pub rows_used: usize,
    /// Distinct WDVV rows generated, all checked for consistency.
    pub rows_total: usize,
}

impl Correlators {
    /// Value of any genus-zero key of this arity; inadmissible keys are 0.
    pub fn get(&self, ins: &[usize]) -> Rat {
        self.values.get(&CorrelatorKey::genus0(ins.to_vec())).cloned().unwrap_or_else(Rat::zero)
    }
}

/// Linear WDVV system in the unknown `k`-point correlators.
#[derive(Clone, Debug)]
pub struct WdvvSystem {
    pub arity: usize,
    pub unknowns: Vec<CorrelatorKey>,
    pub rows: Vec<SparseRow>,
    index: HashMap<CorrelatorKey, usize>,
}

impl WdvvSystem {
    pub fn column(&self, key: &CorrelatorKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Whether `Σ c_K ⟨K⟩ = 0` is a consequence of the homogeneous rows.
    pub fn implies(&self, combination: &BTreeMap<CorrelatorKey, Rat>) -> bool {
        let mut e = Echelon::new();
        for r in &self.rows {
            let _ = e.insert(&SparseRow { coeffs: r.coeffs.clone(), rhs: Rat::zero() });
        }
        let mut coeffs = BTreeMap::new();
        for (k, c) in combination {
            match self.column(k) {
                Some(col) => {
                    coeffs.insert(col, c.clone());
                }
                None if c.is_zero() => {}
                None => return false,
            }
        }
        e.spans(&coeffs)
    }
}

/// Outcome of the 5-point check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FivePointCertificate {
    /// `(ĉ + 1)/(1 − P) + 2`, `P` the top primitive degree.
    pub bound: Rat,
    pub basic: Vec<CorrelatorKey>,
    /// Solved values of the basic keys, when any exist.
    pub solved: BTreeMap<CorrelatorKey, Rat>,
}

impl FivePointCertificate {
    pub fn holds(&self) -> bool {
        self.bound < int(6) && self.solved.values().all(Zero::is_zero)
    }
}

/// FJRW theory of `W` with its state space identified with `Jac(W^T)`
/// through `Ψ`: `e_α = Ψ(φ_α)`, so pairing and 3-point values come from the
/// mirror ring.
#[derive(Debug)]
pub struct Mirror<'a> {
    ring: &'a JacobiRing,
    theory: FjrwTheory,
    sectors: Vec<Sector>,
    degrees: Vec<Rat>,
    identity: usize,
    top: usize,
    primitive: Vec<bool>,
    eta_inv: Vec<(usize, usize, Rat)>,
    c3: Vec<Vec<Vec<Rat>>>,
}

type Lower<'b> = &'b dyn Fn(&[usize]) -> Rat;

enum Term {
    Zero,
    Known(Rat),
    Unknown(usize),
}

impl<'a> Mirror<'a> {
    pub fn new(ring: &'a JacobiRing, w: &Poly, sectors: Vec<Sector>) -> Result<Self, FjrwError> {
        let theory = FjrwTheory::new(w)?;
        let mu = ring.mu();
        if sectors.len() != mu {
            return Err(FjrwError::SectorCount { found: sectors.len(), expected: mu });
        }
        let degrees = sectors.iter().map(|s| theory.sector_degree(&s.gamma)).collect::<Result<Vec<_>, _>>()?;
        let identity = ring
            .index_of(&Monomial::one(ring.nvars()))
            .ok_or_else(|| FjrwError::Jacobi(JacobiError::BadBasis("basis lacks 1".into())))?;
        let top = ring.basis().top_index;
        let eta = ring.pairing().inverse();
        let mut eta_inv = Vec::new();
        for (e, row) in eta.iter().enumerate() {
            for (f, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    eta_inv.push((e, f, v.clone()));
                }
            }
        }
        let c3 = (0..mu).map(|a| (0..mu).map(|b| (0..mu).map(|c| ring.triple(a, b, c)).collect()).collect()).collect();
        Ok(Mirror { ring, theory, sectors, degrees, identity, top, primitive: ring.primitive_classes(), eta_inv, c3 })
    }

    pub fn ring(&self) -> &JacobiRing {
        self.ring
    }

    pub fn theory(&self) -> &FjrwTheory {
        &self.theory
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    /// Degree of the state `e_α`.
    pub fn degree(&self, a: usize) -> &Rat {
        &self.degrees[a]
    }

    /// `Σ deg α_j + Σ ℓ_j = (ĉ − 3)(1 − g) + k`.
    pub fn selection_rule(&self, key: &CorrelatorKey) -> bool {
        let lhs: Rat = key.insertions.iter().map(|&a| self.degrees[a].clone()).sum::<Rat>()
            + int(key.psi_powers.iter().map(|&l| i64::from(l)).sum());
        let rhs = (self.theory.central_charge() - int(3)) * int(1 - i64::from(key.genus)) + int(key.len() as i64);
        lhs == rhs
    }

    pub fn concavity(&self, ins: &[usize]) -> ConcavityReport {
        let gs: Vec<&GroupElement> = ins.iter().map(|&a| &self.sectors[a].gamma).collect();
        self.theory.line_bundle_degrees(&gs, 0)
    }

    /// Nonzero candidates: no identity, selection rule, integral line degrees.
    pub fn admissible(&self, ins: &[usize]) -> bool {
        !ins.contains(&self.identity)
            && self.selection_rule(&CorrelatorKey::genus0(ins.to_vec()))
            && self.concavity(ins).integral
    }

    /// `⟨e_a, e_b, e_c⟩ = η(φ_aφ_b, φ_c)`.
    pub fn threepoint(&self, a: usize, b: usize, c: usize) -> Rat {
        self.c3[a][b][c].clone()
    }

    /// Narrow concave `D = 0` triples whose ring value is not the geometric 1.
    pub fn threepoint_crosscheck(&self) -> Vec<(CorrelatorKey, Rat)> {
        let mu = self.ring.mu();
        let mut bad = Vec::new();
        for a in 0..mu {
            for b in a..mu {
                for c in b..mu {
                    let key = CorrelatorKey::genus0(vec![a, b, c]);
                    if !self.selection_rule(&key) {
                        continue;
                    }
                    let r = self.concavity(&key.insertions);
                    if r.concave && r.rank_d == 0 && !self.c3[a][b][c].is_one() {
                        bad.push((key, self.c3[a][b][c].clone()));
                    }
                }
            }
        }
        bad
    }

    pub fn primitive(&self) -> &[bool] {
        &self.primitive
    }

    /// All admissible genus-zero `k`-point keys.
    pub fn enumerate(&self, k: usize) -> Vec<CorrelatorKey> {
        let mu = self.ring.mu();
        let target = self.theory.central_charge() - int(3) + int(k as i64);
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(k);
        self.enumerate_rec(mu, k, &target, 0, &mut cur, &mut out);
        out
    }

    fn enumerate_rec(
        &self,
        mu: usize,
        k: usize,
        rest: &Rat,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<CorrelatorKey>,
    ) {
        if cur.len() == k {
            if rest.is_zero() && self.concavity(cur).integral {
                out.push(CorrelatorKey::genus0(cur.clone()));
            }
            return;
        }
        for a in start..mu {
            if a == self.identity || self.degrees[a].is_negative() || &self.degrees[a] > rest {
                continue;
            }
            cur.push(a);
            self.enumerate_rec(mu, k, &(rest - &self.degrees[a]), a, cur, out);
            cur.pop();
        }
    }

    /// Admissible keys with at least `k − 2` primitive insertions.
    pub fn enumerate_basic(&self, k: usize) -> Vec<CorrelatorKey> {
        self.enumerate(k)
            .into_iter()
            .filter(|key| key.insertions.iter().filter(|&&a| self.primitive[a]).count() + 2 >= k)
            .collect()
    }

    /// `(ĉ + 1)/(1 − P) + 2` with `P` the largest primitive degree.
    pub fn arity_bound(&self) -> Rat {
        let p = (0..self.ring.mu())
            .filter(|&a| self.primitive[a])
            .map(|a| self.degrees[a].clone())
            .max()
            .unwrap_or_else(Rat::zero);
        (self.theory.central_charge() + int(1)) / (int(1) - p) + int(2)
    }

    /// Seeds from the monomials `M_i` of the mirror polynomial, skipping
    /// `M_i = x_i²`.
    pub fn seeds(&self) -> Result<Vec<Seed>, FjrwError> {
        let e = ExponentMatrix::from_poly(self.ring.poly())?;
        let n = self.ring.nvars();
        let mut out = Vec::new();
        for (i, row) in e.entries().iter().enumerate() {
            let mut rest = row.clone();
            if rest[i] < 2 {
                continue;
            }
            rest[i] -= 2;
            let rest = Monomial::new(rest);
            if rest.is_one() {
                continue;
            }
            let xi = self.ring.coords(&Poly::monomial(Monomial::var(n, i)))?;
            let g = self.ring.coords(&Poly::monomial(rest))?;
            let mut combination: BTreeMap<CorrelatorKey, Rat> = BTreeMap::new();
            for (a, ua) in xi.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                for (b, ub) in xi.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                    for (c, vc) in g.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                        let key = CorrelatorKey::genus0(vec![a, b, c, self.top]);
                        let entry = combination.entry(key).or_insert_with(Rat::zero);
                        *entry += ua * ub * vc;
                    }
                }
            }
            combination.retain(|_, v| !v.is_zero());
            if combination.is_empty() {
                continue;
            }
            out.push(Seed { variable: i, combination, value: self.theory.weights().weights()[i].clone() });
        }
        Ok(out)
    }

    fn term(&self, ins: &[usize], k: usize, index: &HashMap<CorrelatorKey, usize>, lower: Lower<'_>) -> Term {
        if ins.len() == 3 {
            let v = &self.c3[ins[0]][ins[1]][ins[2]];
            return if v.is_zero() { Term::Zero } else { Term::Known(v.clone()) };
        }
        if ins.len() == k {
            return match index.get(&CorrelatorKey::genus0(ins.to_vec())) {
                Some(&c) => Term::Unknown(c),
                None => Term::Zero,
            };
        }
        let v = lower(ins);
        if v.is_zero() {
            Term::Zero
        } else {
            Term::Known(v)
        }
    }

    /// WDVV differentiated along `dirs`:
    /// `Σ_{S₁⊔S₂} F_{abeS₁} η^{ef} F_{fcdS₂} − (b ↔ c) = 0`.
    fn wdvv_row(
        &self,
        q: [usize; 4],
        dirs: &[usize],
        k: usize,
        index: &HashMap<CorrelatorKey, usize>,
        lower: Lower<'_>,
    ) -> SparseRow {
        let [a, b, c, d] = q;
        let mut row = SparseRow::new();
        let n = dirs.len();
        for (sign, (p1, p2, p3, p4)) in [(Rat::one(), (a, b, c, d)), (-Rat::one(), (a, c, b, d))] {
            for mask in 0..(1u32 << n) {
                let (s1, s2): (Vec<usize>, Vec<usize>) = {
                    let mut s1 = Vec::new();
                    let mut s2 = Vec::new();
                    for (j, &x) in dirs.iter().enumerate() {
                        if mask & (1 << j) != 0 {
                            s1.push(x);
                        } else {
                            s2.push(x);
                        }
                    }
                    (s1, s2)
                };
                for (e, f, h) in &self.eta_inv {
                    let mut left = vec![p1, p2, *e];
                    left.extend(&s1);
                    let mut right = vec![*f, p3, p4];
                    right.extend(&s2);
                    let l = self.term(&left, k, index, lower);
                    if matches!(l, Term::Zero) {
                        continue;
                    }
                    let r = self.term(&right, k, index, lower);
                    let w = &sign * h;
                    match (l, r) {
                        (Term::Zero, _) | (_, Term::Zero) => {}
                        (Term::Known(x), Term::Known(y)) => row.rhs -= w * x * y,
                        (Term::Unknown(u), Term::Known(y)) | (Term::Known(y), Term::Unknown(u)) => {
                            row.add(u, &(w * y));
                        }
                        (Term::Unknown(_), Term::Unknown(_)) => unreachable!("two unknown factors"),
                    }
                }
            }
        }
        row
    }

    /// All distinct non-trivial WDVV rows for arity `k ≥ 4`, lower arities
    /// supplied by `lower`.
    pub fn wdvv_system(&self, k: usize, lower: Lower<'_>) -> WdvvSystem {
        let unknowns = self.enumerate(k);
        let index: HashMap<CorrelatorKey, usize> =
            unknowns.iter().enumerate().map(|(i, key)| (key.clone(), i)).collect();
        let mu = self.ring.mu();
        let target = self.theory.central_charge() + int(k as i64 - 3);
        let nonid: Vec<usize> = (0..mu).filter(|&a| a != self.identity).collect();
        let mut seen: HashSet<Vec<(usize, Rat, bool)>> = HashSet::new();
        let mut rows = Vec::new();
        let ndirs = k - 3;
        let mut dir_sets: Vec<Vec<usize>> = Vec::new();
        multisets(&nonid, ndirs, 0, &mut Vec::new(), &mut dir_sets);
        for &a in &nonid {
            for &b in &nonid {
                for &c in &nonid {
                    if c < b {
                        continue;
                    }
                    for &d in &nonid {
                        let partial = &self.degrees[a] + &self.degrees[b] + &self.degrees[c] + &self.degrees[d];
                        if partial > target {
                            continue;
                        }
                        for dirs in &dir_sets {
                            let s: Rat = dirs.iter().map(|&x| self.degrees[x].clone()).sum();
                            if &partial + &s != target {
                                continue;
                            }
                            let row = self.wdvv_row([a, b, c, d], dirs, k, &index, lower);
                            if row.coeffs.is_empty() {
                                debug_assert!(row.rhs.is_zero(), "WDVV fails among known values");
                                continue;
                            }
                            let norm = row.clone().normalized();
                            let sig: Vec<(usize, Rat, bool)> = norm
                                .coeffs
                                .iter()
                                .map(|(c, v)| (*c, v.clone(), false))
                                .chain(std::iter::once((usize::MAX, norm.rhs.clone(), true)))
                                .collect();
                            if seen.insert(sig) {
                                rows.push(row);
                            }
                        }
                    }
                }
            }
        }
        WdvvSystem { arity: k, unknowns, rows, index }
    }

    /// Solves the `k`-point system from `seeds`; every admissible key must
    /// come out determined and every row consistent.
    pub fn wdvv_solve(&self, k: usize, seeds: &[Seed], lower: Lower<'_>) -> Result<Correlators, FjrwError> {
        let sys = self.wdvv_system(k, lower);
        let n = sys.unknowns.len();
        let mut ech = Echelon::new();
        for s in seeds {
            let mut row = SparseRow::new();
            for (key, c) in &s.combination {
                match sys.column(key) {
                    Some(col) => row.add(col, c),
                    None => {
                        return Err(FjrwError::Inconsistent(format!(
                            "seed for x{} involves the inadmissible {}",
                            s.variable + 1,
                            key.render(self.ring)
                        )))
                    }
                }
            }
            row.rhs = s.value.clone();
            if let Insert::Inconsistent(r) = ech.insert(&row) {
                return Err(FjrwError::Inconsistent(format!("seed for x{} off by {}", s.variable + 1, fmt_rat(&r))));
            }
        }
        let mut used = 0;
        for row in &sys.rows {
            if ech.rank() == n {
                break;
            }
            used += 1;
            if let Insert::Inconsistent(r) = ech.insert(row) {
                return Err(FjrwError::Inconsistent(self.describe(&sys, row, &r)));
            }
        }
        let values: Vec<Option<Rat>> = (0..n).map(|c| ech.value(c)).collect();
        let missing: Vec<String> =
            (0..n).filter(|&c| values[c].is_none()).map(|c| sys.unknowns[c].render(self.ring)).collect();
        if !missing.is_empty() {
            return Err(FjrwError::Underdetermined(missing));
        }
        let values: Vec<Rat> = values.into_iter().map(Option::unwrap).collect();
        for row in &sys.rows {
            let lhs: Rat = row.coeffs.iter().map(|(c, v)| v * &values[*c]).sum();
            if lhs != row.rhs {
                return Err(FjrwError::Inconsistent(self.describe(&sys, row, &(lhs - &row.rhs))));
            }
        }
        Ok(Correlators {
            arity: k,
            values: sys.unknowns.iter().cloned().zip(values).collect(),
            unknowns: n,
            rows_used: used,
            rows_total: sys.rows.len(),
        })
    }

    fn describe(&self, sys: &WdvvSystem, row: &SparseRow, excess: &Rat) -> String {
        let terms: Vec<String> =
            row.coeffs.iter().map(|(c, v)| format!("{} {}", fmt_rat(v), sys.unknowns[*c].render(self.ring))).collect();
        format!("{} = {} (off by {})", terms.join(" + "), fmt_rat(&row.rhs), fmt_rat(excess))
    }

    /// 4-point values from the seeds alone.
    pub fn solve_fourpoint(&self) -> Result<Correlators, FjrwError> {
        let seeds = self.seeds()?;
        self.wdvv_solve(4, &seeds, &|_| Rat::zero())
    }

    /// Basic 5-point keys, and when any exist their WDVV-solved values.
    pub fn five_point_certificate(&self, four: &Correlators) -> Result<FivePointCertificate, FjrwError> {
        let bound = self.arity_bound();
        let basic = self.enumerate_basic(5);
        let mut solved = BTreeMap::new();
        if !basic.is_empty() {
            let sol = self.wdvv_solve(5, &[], &|ins: &[usize]| four.get(ins))?;
            for key in &basic {
                solved.insert(key.clone(), sol.values[key].clone());
            }
        }
        Ok(FivePointCertificate { bound, basic, solved })
    }

    /// oGRR values of every admissible concave 4-point key.
    pub fn ogrr_table(&self) -> Vec<(CorrelatorKey, Rat)> {
        let mut out = Vec::new();
        for key in self.enumerate(4) {
            let g: Vec<&GroupElement> = key.insertions.iter().map(|&a| &self.sectors[a].gamma).collect();
            if let Ok(v) = self.theory.ogrr_fourpoint([g[0], g[1], g[2], g[3]]) {
                out.push((key, v));
            }
        }
        out
    }

    /// Nonzero basic keys grouped by their exponent totals, for reports.
    pub fn exponent_classes(&self, keys: &[CorrelatorKey]) -> BTreeSet<Vec<u32>> {
        keys.iter()
            .map(|k| {
                let mut e = vec![0u32; self.ring.nvars()];
                for &a in &k.insertions {
                    for (i, x) in self.ring.phi(a).exps().iter().enumerate() {
                        e[i] += x;
                    }
                }
                e
            })
            .collect()
    }
}

fn multisets(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..items.len() {
        cur.push(items[i]);
        multisets(items, k, i, cur, out);
        cur.pop();
    }
}

/// All set partitions of `0..k`.
fn set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new()];
    for j in 0..k {
        let mut next = Vec::new();
        for p in out {
            for b in 0..p.len() {
                let mut q: Vec<Vec<usize>> = p.clone();
                q[b].push(j);
                next.push(q);
            }
            let mut q = p;
            q.push(vec![j]);
            next.push(q);
        }
        out = next;
    }
    out
}

/// Sectors `J·∏ρ_k^{m_k}` for every basis monomial `∏x_k^{m_k}`, the rule
/// behind every narrow row of the tables.
pub fn rule_sectors(ring: &JacobiRing, theory: &FjrwTheory) -> Vec<GroupElement> {
    ring.basis().basis.iter().map(|m| theory.group().j_times_rho(m.exps())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, transpose};

    fn poly(rows: &[&[u32]]) -> Poly {
        Poly::from_exponents(rows[0].len(), &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn ge(p: &[(i64, i64)]) -> GroupElement {
        GroupElement::new(p.iter().map(|&(a, b)| rat(a, b)).collect())
    }

    #[test]
    fn fermat_ogrr_is_one_over_p() {
        for (p, q) in [(3u32, 7u32), (4, 5)] {
            let t = FjrwTheory::new(&poly(&[&[p, 0], &[0, q]])).unwrap();
            let (p, q) = (i64::from(p), i64::from(q));
            let a = ge(&[(2, p), (1, q)]);
            let b = ge(&[(p - 1, p), (1, q)]);
            let c = ge(&[(p - 1, p), (q - 1, q)]);
            let r = t.line_bundle_degrees(&[&a, &a, &b, &c], 0);
            assert_eq!(r.line_degrees, vec![int(-2), int(-1)]);
            assert_eq!(r.rank_d, 1);
            assert_eq!(t.ogrr_fourpoint([&a, &a, &b, &c]).unwrap(), rat(1, p));
            assert_eq!(t.ogrr_fourpoint([&c, &a, &b, &a]).unwrap(), rat(1, p));
            assert_eq!(t.sector_degree(&a).unwrap(), rat(1, p));
        }
    }

    #[test]
    fn chain_ogrr_values() {
        let t = FjrwTheory::new(&poly(&[&[2, 0, 0], &[1, 2, 0], &[0, 1, 4]])).unwrap();
        let j = |k| t.group().j_pow(k);
        let v = |a, b, c, d| t.ogrr_fourpoint([&j(a), &j(b), &j(c), &j(d)]).unwrap();
        assert_eq!(v(9, 9, 13, 3), rat(1, 4));
        assert_eq!(v(9, 9, 11, 5), rat(-1, 8));
        assert_eq!(v(9, 9, 9, 7), rat(1, 8));
        assert_eq!(-v(13, 13, 9, 15), rat(-3, 16));
        assert_eq!(t.sector_degree(&j(12)).unwrap(), rat(5, 16));
        assert!(t.sector_degree(&ge(&[(1, 2), (0, 1), (0, 1)])).is_err());
        assert_eq!(t.sector_dim(&j(12)).unwrap(), 1);
        assert_eq!(t.sector_dim(&j(8)).unwrap(), 1);
    }

    #[test]
    fn index_zero_case_is_not_concave() {
        let t = FjrwTheory::new(&poly(&[&[2, 0, 0], &[1, 3, 0], &[0, 1, 3]])).unwrap();
        let j = |k| t.group().j_pow(k);
        let r = t.line_bundle_degrees(&[&j(15), &j(11), &j(11)], 0);
        assert_eq!(r.line_degrees, vec![int(-1), int(-2), int(0)]);
        assert!(!r.concave);
        let r = t.line_bundle_degrees(&[&j(15), &j(15), &j(7)], 0);
        assert_eq!(r.line_degrees, vec![int(-1), int(-1), int(-1)]);
        assert!(r.concave && r.rank_d == 0);
        assert!(t.ogrr_fourpoint([&j(15), &j(15), &j(11), &j(1)]).is_err());
    }

    #[test]
    fn boundary_component_breaks_concavity() {
        let t = FjrwTheory::new(&poly(&[&[2, 0, 0], &[1, 2, 0], &[0, 1, 4]])).unwrap();
        let j = |k| t.group().j_pow(k);
        let r = t.line_bundle_degrees(&[&j(11), &j(11), &j(13), &j(15)], 0);
        assert_eq!(r.line_degrees, vec![int(-1), int(-2), int(-1)]);
        assert!(!r.concave);
        assert!(t.ogrr_fourpoint([&j(11), &j(11), &j(13), &j(15)]).is_err());
    }

    #[test]
    fn fermat_mirror_reconstructs() {
        let f = poly(&[&[3, 0], &[0, 7]]);
        let ring = JacobiRing::new(&f).unwrap();
        let w = transpose(&f).unwrap();
        let theory = FjrwTheory::new(&w).unwrap();
        let sectors = rule_sectors(&ring, &theory).into_iter().map(Sector::narrow).collect();
        let m = Mirror::new(&ring, &w, sectors).unwrap();
        assert!(m.threepoint_crosscheck().is_empty());
        let four = m.solve_fourpoint().unwrap();
        let x = ring.index_of(&Monomial::new(vec![1, 0])).unwrap();
        let top = ring.basis().top_index;
        assert_eq!(four.get(&[x, x, x, top]), rat(1, 3));
        for (key, v) in m.ogrr_table() {
            assert_eq!(four.values[&key], v, "{}", key.render(&ring));
        }
        let cert = m.five_point_certificate(&four).unwrap();
        assert!(cert.basic.is_empty() && cert.holds());
    }
}
