//! Milnor rings `Jac(W) = ℚ[x]/(∂W)` of invertible polynomials: monomial
//! bases, normal forms with quotient witnesses, the normalized residue
//! pairing and structure constants.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{
    classify_atomic, fmt_rat, int, solve_weights, AlgebraError, AtomicBlock, AtomicKind, Monomial, Poly, Rat,
    WeightSystem,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JacobiError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("basis has {found} elements but the Milnor number is {expected}")]
    BasisCount { found: usize, expected: String },
    #[error("invalid basis: {0}")]
    BadBasis(String),
    #[error("normal form system inconsistent in degree {0}")]
    Inconsistent(String),
}

/// Ordered monomial basis `φ_1 = 1, …, φ_μ` of the Milnor ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiBasis {
    pub basis: Vec<Monomial>,
    pub degrees: Vec<Rat>,
    pub mu: usize,
    pub top_index: usize,
}

/// Normalized residue pairing `g_{ab}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingMatrix {
    pub g: Vec<Vec<Rat>>,
}

impl PairingMatrix {
    /// Index pairs with a nonzero entry.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, row) in self.g.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Inverse matrix `g^{ab}`.
    pub fn inverse(&self) -> Vec<Vec<Rat>> {
        crate::algebra::linalg::inverse(&self.g).expect("pairing is nondegenerate")
    }
}

/// Order in which candidate generators `m·∂_iW` enter the elimination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum PivotOrder {
    /// `i` ascending, then `m` ascending.
    #[default]
    Forward,
    /// The reverse of [`PivotOrder::Forward`].
    Reverse,
}

/// Coordinates in the basis together with witnesses `h_i` such that
/// `g = Σ c_α φ_α + Σ h_i ∂_iW`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub coords: Vec<Rat>,
    pub witness: Vec<Poly>,
}

/// Per-variable exponent lists for a block basis, following Table-2 rules.
fn block_basis(b: &AtomicBlock) -> Vec<Vec<u32>> {
    let a = &b.exponents;
    let m = a.len();
    let mut all: Vec<Vec<u32>> = vec![vec![]];
    for (pos, &ai) in a.iter().enumerate() {
        let bound = match b.kind {
            AtomicKind::Fermat => ai - 2,
            _ => ai - 1,
        };
        let _ = pos;
        all = all
            .into_iter()
            .flat_map(|prefix| {
                (0..=bound).map(move |e| {
                    let mut p = prefix.clone();
                    p.push(e);
                    p
                })
            })
            .collect();
    }
    if b.kind == AtomicKind::Chain {
        all.retain(|k| !chain_excluded(k, a));
    }
    let _ = m;
    all
}

/// The chain exclusion `(a_1−1, 0, a_3−1, 0, …, a_{2l−1}−1, i, *, …)` with
/// `i ≥ 1`; when the alternating prefix uses up an odd-length chain the
/// whole vector is excluded as well.
fn chain_excluded(k: &[u32], a: &[u32]) -> bool {
    let m = a.len();
    let mut pos = 0;
    loop {
        if k[pos] != a[pos] - 1 {
            return false;
        }
        if pos + 1 == m {
            return true;
        }
        if k[pos + 1] >= 1 {
            return true;
        }
        pos += 2;
        if pos >= m {
            return false;
        }
    }
}

/// Top class exponents for a block: Fermat `a−2`, loop `a−1`, chain head
/// `a_1−2` and `a_i−1` elsewhere.
fn block_top(b: &AtomicBlock) -> Vec<u32> {
    b.exponents
        .iter()
        .enumerate()
        .map(|(k, &a)| match b.kind {
            AtomicKind::Fermat => a - 2,
            AtomicKind::Loop => a - 1,
            AtomicKind::Chain if k == 0 => a - 2,
            AtomicKind::Chain => a - 1,
        })
        .collect()
}

/// Monomial basis of `Jac(W)` from the atomic decomposition, tensored across
/// blocks and sorted by weighted degree (ties by exponent lex).
pub fn milnor_basis(weights: &WeightSystem, blocks: &[AtomicBlock]) -> Result<JacobiBasis, JacobiError> {
    let n = weights.nvars();
    let mut monos: Vec<Vec<u32>> = vec![vec![0; n]];
    for b in blocks {
        let local = block_basis(b);
        monos = monos
            .into_iter()
            .flat_map(|base| {
                local.iter().map(move |k| {
                    let mut e = base.clone();
                    for (v, x) in b.vars.iter().zip(k) {
                        e[*v] = *x;
                    }
                    e
                })
            })
            .collect();
    }
    let mut basis: Vec<Monomial> = monos.into_iter().map(Monomial::new).collect();
    basis.sort_by(|a, b| (a.degree(weights), a).cmp(&(b.degree(weights), b)));
    let expected = weights.milnor_number();
    if int(basis.len() as i64) != expected {
        return Err(JacobiError::BasisCount { found: basis.len(), expected: fmt_rat(&expected) });
    }
    let mut top = vec![0; n];
    for b in blocks {
        for (v, e) in b.vars.iter().zip(block_top(b)) {
            top[*v] = e;
        }
    }
    let top = Monomial::new(top);
    let basis = finish_basis(weights, basis)?;
    if basis.basis[basis.top_index] != top {
        return Err(JacobiError::BadBasis("top class mismatch".into()));
    }
    Ok(basis)
}

fn finish_basis(weights: &WeightSystem, basis: Vec<Monomial>) -> Result<JacobiBasis, JacobiError> {
    let degrees: Vec<Rat> = basis.iter().map(|m| m.degree(weights)).collect();
    let chat = weights.central_charge();
    let tops: Vec<usize> = (0..basis.len()).filter(|&i| &degrees[i] == chat).collect();
    let [top_index] = tops.as_slice() else {
        return Err(JacobiError::BadBasis(format!("{} elements of top degree", tops.len())));
    };
    match basis.first() {
        Some(m) if m.is_one() => {}
        _ => return Err(JacobiError::BadBasis("first element must be 1".into())),
    }
    Ok(JacobiBasis { mu: basis.len(), top_index: *top_index, basis, degrees })
}

/// All monomials in `n` variables of weighted degree exactly `d`, lex order.
pub fn monomials_of_degree(weights: &WeightSystem, d: &Rat) -> Vec<Monomial> {
    fn rec(q: &[Rat], left: &Rat, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        let i = prefix.len();
        if i + 1 == q.len() {
            let e = left / &q[i];
            if e.is_integer() && e >= Rat::zero() {
                prefix.push(e.to_integer().try_into().expect("small exponent"));
                out.push(Monomial::new(prefix.clone()));
                prefix.pop();
            }
            return;
        }
        let mut e = 0u32;
        let mut used = Rat::zero();
        while &used <= left {
            prefix.push(e);
            rec(q, &(left - &used), prefix, out);
            prefix.pop();
            e += 1;
            used += &q[i];
        }
    }
    let mut out = Vec::new();
    if d < &Rat::zero() {
        return out;
    }
    rec(weights.weights(), d, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug)]
struct Row {
    vec: BTreeMap<usize, Rat>,
    witness: Vec<Poly>,
    phi: BTreeMap<usize, Rat>,
}

impl Row {
    fn axpy(&mut self, c: &Rat, other: &Row) {
        for (k, v) in &other.vec {
            let e = self.vec.entry(*k).or_insert_with(Rat::zero);
            *e += v * c;
            if e.is_zero() {
                self.vec.remove(k);
            }
        }
        for (h, oh) in self.witness.iter_mut().zip(&other.witness) {
            h.add_scaled(oh, c);
        }
        for (k, v) in &other.phi {
            let e = self.phi.entry(*k).or_insert_with(Rat::zero);
            *e += v * c;
            if e.is_zero() {
                self.phi.remove(k);
            }
        }
    }

    fn scale(&mut self, c: &Rat) {
        for v in self.vec.values_mut() {
            *v *= c;
        }
        for h in self.witness.iter_mut() {
            *h = h.scale(c);
        }
        for v in self.phi.values_mut() {
            *v *= c;
        }
    }
}

/// Echelon form of `span{m·∂_iW} ⊕ span{φ_α}` inside one weighted degree.
#[derive(Debug)]
struct DegreeSolver {
    index: HashMap<Monomial, usize>,
    rows: BTreeMap<usize, Row>,
}

impl DegreeSolver {
    fn build(ring: &JacobiRing, d: &Rat) -> Result<Self, JacobiError> {
        let n = ring.nvars();
        let monos = monomials_of_degree(&ring.weights, d);
        let index: HashMap<Monomial, usize> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut gens: Vec<(usize, Monomial)> = Vec::new();
        for i in 0..n {
            let dm = d - (Rat::one() - &ring.weights.weights()[i]);
            for m in monomials_of_degree(&ring.weights, &dm) {
                gens.push((i, m));
            }
        }
        if ring.pivot == PivotOrder::Reverse {
            gens.reverse();
        }
        let mut solver = DegreeSolver { index, rows: BTreeMap::new() };
        for (i, m) in gens {
            let p = ring.partials[i].mul_term(&m, &Rat::one());
            let mut witness = vec![Poly::zero(n); n];
            witness[i] = Poly::monomial(m);
            let row = Row { vec: solver.embed(&p), witness, phi: BTreeMap::new() };
            solver.insert(row);
        }
        for (a, phi) in ring.basis.basis.iter().enumerate() {
            if &ring.basis.degrees[a] != d {
                continue;
            }
            let mut vec = BTreeMap::new();
            vec.insert(solver.index[phi], Rat::one());
            let row = Row { vec, witness: vec![Poly::zero(n); n], phi: BTreeMap::from([(a, Rat::one())]) };
            if !solver.insert(row) {
                return Err(JacobiError::BadBasis(format!(
                    "φ_{} lies in the Jacobian ideal plus earlier basis elements",
                    a + 1
                )));
            }
        }
        if solver.rows.len() != monos.len() {
            return Err(JacobiError::BadBasis(format!("basis does not span degree {}", fmt_rat(d))));
        }
        Ok(solver)
    }

    fn embed(&self, p: &Poly) -> BTreeMap<usize, Rat> {
        p.terms().map(|(m, c)| (self.index[m], c.clone())).collect()
    }

    /// Reduces `row` against the echelon rows; returns whether it was new.
    fn insert(&mut self, mut row: Row) -> bool {
        loop {
            let Some((&p, c)) = row.vec.iter().next() else {
                return false;
            };
            match self.rows.get(&p) {
                Some(r) => {
                    let c = -c.clone();
                    row.axpy(&c, r);
                }
                None => {
                    let inv = Rat::one() / c;
                    row.scale(&inv);
                    self.rows.insert(p, row);
                    return true;
                }
            }
        }
    }

    fn solve(&self, g: &Poly, n: usize, d: &Rat) -> Result<Row, JacobiError> {
        let mut v: BTreeMap<usize, Rat> = BTreeMap::new();
        for (m, c) in g.terms() {
            let Some(&k) = self.index.get(m) else {
                return Err(JacobiError::Inconsistent(fmt_rat(d)));
            };
            v.insert(k, c.clone());
        }
        let mut acc = Row { vec: BTreeMap::new(), witness: vec![Poly::zero(n); n], phi: BTreeMap::new() };
        let mut cur = Row { vec: v, witness: vec![Poly::zero(n); n], phi: BTreeMap::new() };
        while let Some((&p, c)) = cur.vec.iter().next() {
            let r = self.rows.get(&p).ok_or_else(|| JacobiError::Inconsistent(fmt_rat(d)))?;
            let c = c.clone();
            acc.axpy(&c, r);
            cur.axpy(&-c, r);
        }
        Ok(acc)
    }
}

/// Milnor ring with a fixed monomial basis; normal forms are memoized per
/// weighted degree.
#[derive(Debug)]
pub struct JacobiRing {
    poly: Poly,
    weights: WeightSystem,
    blocks: Vec<AtomicBlock>,
    basis: JacobiBasis,
    basis_index: HashMap<Monomial, usize>,
    partials: Vec<Poly>,
    pivot: PivotOrder,
    solvers: RwLock<HashMap<Rat, Arc<DegreeSolver>>>,
    pairing: PairingMatrix,
    structure: Vec<Vec<Vec<Rat>>>,
}

impl JacobiRing {
    /// Ring with the Table-2 basis.
    pub fn new(w: &Poly) -> Result<Self, JacobiError> {
        Self::with_options(w, None, PivotOrder::Forward)
    }

    /// Ring with an optional explicit basis and a pivot order.
    pub fn with_options(w: &Poly, basis: Option<Vec<Monomial>>, pivot: PivotOrder) -> Result<Self, JacobiError> {
        let weights = solve_weights(w)?;
        let blocks = classify_atomic(w)?;
        let standard = milnor_basis(&weights, &blocks)?;
        let basis = match basis {
            None => standard,
            Some(b) => {
                let mut sorted = b.clone();
                sorted.sort();
                sorted.dedup();
                if sorted.len() != b.len() {
                    return Err(JacobiError::BadBasis("repeated element".into()));
                }
                if b.len() != standard.mu {
                    return Err(JacobiError::BasisCount { found: b.len(), expected: standard.mu.to_string() });
                }
                finish_basis(&weights, b)?
            }
        };
        let n = w.nvars();
        let partials = (0..n).map(|i| w.derivative(i)).collect();
        let basis_index = basis.basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut ring = JacobiRing {
            poly: w.clone(),
            weights,
            blocks,
            basis,
            basis_index,
            partials,
            pivot,
            solvers: RwLock::new(HashMap::new()),
            pairing: PairingMatrix { g: vec![] },
            structure: vec![],
        };
        let mu = ring.basis.mu;
        let mut structure = vec![vec![vec![]; mu]; mu];
        for a in 0..mu {
            for b in a..mu {
                let p = ring.basis.basis[a].mul(&ring.basis.basis[b]);
                let c = ring.normal_form(&Poly::monomial(p))?.coords;
                structure[a][b] = c.clone();
                structure[b][a] = c;
            }
        }
        let top = ring.basis.top_index;
        let g = (0..mu).map(|a| (0..mu).map(|b| structure[a][b][top].clone()).collect()).collect();
        ring.pairing = PairingMatrix { g };
        ring.structure = structure;
        if crate::algebra::linalg::determinant(&ring.pairing.g).is_zero() {
            return Err(JacobiError::BadBasis("degenerate pairing".into()));
        }
        Ok(ring)
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn weights(&self) -> &WeightSystem {
        &self.weights
    }

    pub fn blocks(&self) -> &[AtomicBlock] {
        &self.blocks
    }

    pub fn basis(&self) -> &JacobiBasis {
        &self.basis
    }

    pub fn mu(&self) -> usize {
        self.basis.mu
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    pub fn pivot(&self) -> PivotOrder {
        self.pivot
    }

    pub fn central_charge(&self) -> &Rat {
        self.weights.central_charge()
    }

    pub fn partials(&self) -> &[Poly] {
        &self.partials
    }

    /// Position of a monomial in the basis.
    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.basis_index.get(m).copied()
    }

    pub fn phi(&self, a: usize) -> &Monomial {
        &self.basis.basis[a]
    }

    fn solver(&self, d: &Rat) -> Result<Arc<DegreeSolver>, JacobiError> {
        if let Some(s) = self.solvers.read().expect("lock").get(d) {
            return Ok(s.clone());
        }
        let s = Arc::new(DegreeSolver::build(self, d)?);
        self.solvers.write().expect("lock").entry(d.clone()).or_insert(s.clone());
        Ok(s)
    }

    /// Checks every basis degree up to `ĉ` now instead of lazily.
    pub fn validate(&self) -> Result<(), JacobiError> {
        let mut degs = self.basis.degrees.clone();
        degs.dedup();
        for d in &degs {
            self.solver(d)?;
        }
        Ok(())
    }

    /// Degree-by-degree normal form with quotient witnesses.
    pub fn normal_form(&self, g: &Poly) -> Result<NormalForm, JacobiError> {
        let n = self.nvars();
        let mut coords = vec![Rat::zero(); self.mu()];
        let mut witness = vec![Poly::zero(n); n];
        for (d, part) in g.homogeneous_parts(&self.weights) {
            if part.len() == 1 {
                let (m, c) = part.terms().next().unwrap();
                if let Some(a) = self.index_of(m) {
                    coords[a] += c;
                    continue;
                }
            }
            let row = self.solver(&d)?.solve(&part, n, &d)?;
            for (a, c) in row.phi {
                coords[a] += c;
            }
            for (h, rh) in witness.iter_mut().zip(&row.witness) {
                h.add_scaled(rh, &Rat::one());
            }
        }
        Ok(NormalForm { coords, witness })
    }

    /// Coordinates of `g` in the basis.
    pub fn coords(&self, g: &Poly) -> Result<Vec<Rat>, JacobiError> {
        Ok(self.normal_form(g)?.coords)
    }

    /// `Σ c_α φ_α` as a polynomial.
    pub fn to_poly(&self, coords: &[Rat]) -> Poly {
        let mut p = Poly::zero(self.nvars());
        for (a, c) in coords.iter().enumerate() {
            p.add_term(self.basis.basis[a].clone(), c.clone());
        }
        p
    }

    pub fn pairing(&self) -> &PairingMatrix {
        &self.pairing
    }

    /// `g_{ab}`: coefficient of `φ_μ` in the normal form of `φ_aφ_b`.
    pub fn residue_pairing(&self, a: usize, b: usize) -> Rat {
        self.pairing.g[a][b].clone()
    }

    /// `C_{ab}^c` with `φ_a·φ_b = Σ_c C_{ab}^c φ_c`.
    pub fn structure_constants(&self) -> &Vec<Vec<Vec<Rat>>> {
        &self.structure
    }

    /// Product of two coordinate vectors.
    pub fn mul_coords(&self, u: &[Rat], v: &[Rat]) -> Vec<Rat> {
        let mu = self.mu();
        let mut out = vec![Rat::zero(); mu];
        for (a, ua) in u.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            for (b, vb) in v.iter().enumerate() {
                if vb.is_zero() {
                    continue;
                }
                let f = ua * vb;
                for (c, k) in self.structure[a][b].iter().enumerate() {
                    if !k.is_zero() {
                        out[c] += &f * k;
                    }
                }
            }
        }
        out
    }

    /// `η(φ_aφ_b, φ_c)`.
    pub fn triple(&self, a: usize, b: usize, c: usize) -> Rat {
        self.structure[a][b]
            .iter()
            .enumerate()
            .filter(|(_, k)| !k.is_zero())
            .map(|(d, k)| k * &self.pairing.g[d][c])
            .sum()
    }

    /// Whether `φ_a` is primitive: not a sum of products of two classes of
    /// strictly positive, strictly smaller degree.
    pub fn primitive_classes(&self) -> Vec<bool> {
        let mu = self.mu();
        let zero = Rat::zero();
        let mut out = vec![false; mu];
        for a in 0..mu {
            let d = &self.basis.degrees[a];
            if d <= &zero {
                continue;
            }
            let mut span: Vec<Vec<Rat>> = Vec::new();
            for b in 1..mu {
                for c in b..mu {
                    if &(&self.basis.degrees[b] + &self.basis.degrees[c]) == d {
                        span.push(self.structure[b][c].clone());
                    }
                }
            }
            let mut e = vec![Rat::zero(); mu];
            e[a] = Rat::one();
            out[a] = !in_span(&span, &e);
        }
        out
    }
}

/// Whether `v` is in the row span of `rows` (exact elimination).
pub fn in_span(rows: &[Vec<Rat>], v: &[Rat]) -> bool {
    rank(rows) == rank(&[rows, &[v.to_vec()]].concat())
}

/// Rank of a dense rational matrix.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for k in c..ncols {
                    let t = &m[r][k] * &f;
                    m[i][k] -= t;
                }
            }
        }
        r += 1;
    }
    r
}
