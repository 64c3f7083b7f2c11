//! The singularity catalog: Table-1 polynomials and their alternates, the
//! Ψ state-space tables and the golden fixtures, stored as one TOML file.
//!
//! Loading goes through serde; writing uses a fixed emitter so that
//! `serialize(load(x)) == x` holds byte for byte on canonical input.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use num_traits::Zero;
use serde::Deserialize;
use thiserror::Error;

use crate::algebra::{fmt_rat, parse_rat, solve_weights, transpose, GroupElement, Monomial, Poly, Rat};
use crate::fjrw::{rule_sectors, FjrwTheory, Sector};
use crate::jacobi::{JacobiError, JacobiRing, PivotOrder};

/// The catalog compiled into the binary.
pub const BUILTIN: &str = include_str!("../data/catalog.toml");

pub const SCHEMA_VERSION: i64 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("catalog does not parse: {0}")]
    Parse(String),
    #[error("unsupported schema_version {0}, expected {SCHEMA_VERSION}")]
    Schema(i64),
    #[error("{record}: field `{field}`: {message}")]
    Field { record: String, field: &'static str, message: String },
    #[error("unknown singularity {0:?}")]
    Unknown(String),
    #[error("cannot read {0}: {1}")]
    Io(String, String),
    #[error(transparent)]
    Jacobi(#[from] JacobiError),
}

/// FJRW group element as written in the tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SectorId {
    /// `J^k`.
    JPower(i64),
    /// Explicit phases `(Θ_1, …, Θ_n)`.
    Phases(Vec<Rat>),
}

impl SectorId {
    pub fn element(&self, theory: &FjrwTheory) -> GroupElement {
        match self {
            SectorId::JPower(k) => theory.group().j_pow(*k),
            SectorId::Phases(p) => GroupElement::new(p.clone()),
        }
    }

    fn parse(s: &str) -> Option<Self> {
        if let Some(k) = s.strip_prefix("J^") {
            return k.parse().ok().map(SectorId::JPower);
        }
        s.split(',').map(|t| parse_rat(t).ok()).collect::<Option<Vec<_>>>().map(SectorId::Phases)
    }

    fn render(&self) -> String {
        match self {
            SectorId::JPower(k) => format!("J^{k}"),
            SectorId::Phases(p) => p.iter().map(fmt_rat).collect::<Vec<_>>().join(","),
        }
    }
}

/// One row `φ ↦ scale · label · 1_γ` of a Ψ table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiRow {
    pub jacobi: Monomial,
    pub sector: SectorId,
    /// Broad label, over the variables of `W`.
    pub label: Option<Monomial>,
    /// Normalization constant as printed, e.g. `"3"` or `"sqrt(-3/K)"`.
    pub scale: Option<String>,
    /// The printed constant carries a `∓`.
    pub ambiguous_sign: bool,
}

/// `c · φ · ∏ s_i` in the primitive form; `printed` keeps the φ of a
/// corrected misprint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaTerm {
    pub c: Rat,
    pub phi: Monomial,
    pub s: Vec<usize>,
    pub printed: Option<Monomial>,
}

/// Nonlinear term `c · ∏ s_i` of `t_k(s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatTerm {
    pub t: usize,
    pub c: Rat,
    pub s: Vec<usize>,
}

/// Term `c · ∏ t_i` of `−F₀^{(4)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuarticTerm {
    pub c: Rat,
    pub t: Vec<usize>,
    pub boxed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularityRecord {
    pub name: String,
    pub variables: Vec<String>,
    /// Exponent vectors of the B-side polynomial `f`.
    pub polynomial: Vec<Vec<u32>>,
    pub supported: bool,
    pub alternate: bool,
    pub basis: Option<Vec<Monomial>>,
    pub psi: Vec<PsiRow>,
    pub zeta: Vec<ZetaTerm>,
    pub flat: Vec<FlatTerm>,
    pub quartic: Vec<QuarticTerm>,
}

impl SingularityRecord {
    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    /// The B-side polynomial `f`.
    pub fn poly(&self) -> Poly {
        Poly::from_exponents(self.nvars(), &self.polynomial).expect("validated at load")
    }

    /// The A-side polynomial `W = f^T`.
    pub fn mirror_poly(&self) -> Poly {
        transpose(&self.poly()).expect("validated at load")
    }

    pub fn names(&self) -> Vec<&str> {
        self.variables.iter().map(String::as_str).collect()
    }

    pub fn ring(&self) -> Result<JacobiRing, CatalogError> {
        self.ring_with(PivotOrder::Forward)
    }

    pub fn ring_with(&self, pivot: PivotOrder) -> Result<JacobiRing, CatalogError> {
        Ok(JacobiRing::with_options(&self.poly(), self.basis.clone(), pivot)?)
    }

    pub fn theory(&self) -> FjrwTheory {
        FjrwTheory::new(&self.mirror_poly()).expect("validated at load")
    }

    pub fn has_fixtures(&self) -> bool {
        !self.zeta.is_empty() || !self.flat.is_empty() || !self.quartic.is_empty()
    }

    /// Sectors in the ring's basis order: the Ψ table when present,
    /// otherwise `J·∏ρ^m`.
    pub fn sectors(&self, ring: &JacobiRing, theory: &FjrwTheory) -> Result<Vec<Sector>, CatalogError> {
        if self.psi.is_empty() {
            return Ok(rule_sectors(ring, theory).into_iter().map(Sector::narrow).collect());
        }
        let rows: BTreeMap<&Monomial, &PsiRow> = self.psi.iter().map(|r| (&r.jacobi, r)).collect();
        ring.basis()
            .basis
            .iter()
            .map(|m| {
                let row =
                    rows.get(m).ok_or_else(|| self.field("psi", format!("no row for {}", m.render(&self.names()))))?;
                Ok(Sector {
                    gamma: row.sector.element(theory),
                    broad_label: row.label.clone(),
                    scale: row.scale.clone().unwrap_or_else(|| "1".into()),
                    ambiguous_sign: row.ambiguous_sign,
                })
            })
            .collect()
    }

    fn field(&self, field: &'static str, message: String) -> CatalogError {
        CatalogError::Field { record: self.name.clone(), field, message }
    }
}

/// The loaded catalog, in file order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Catalog {
    pub records: Vec<SingularityRecord>,
}

impl Catalog {
    pub fn builtin() -> Self {
        parse_catalog(BUILTIN).expect("built-in catalog is valid")
    }

    pub fn get(&self, name: &str) -> Result<&SingularityRecord, CatalogError> {
        self.records.iter().find(|r| r.name == name).ok_or_else(|| CatalogError::Unknown(name.into()))
    }

    pub fn primary(&self) -> impl Iterator<Item = &SingularityRecord> {
        self.records.iter().filter(|r| !r.alternate)
    }

    pub fn alternates(&self) -> impl Iterator<Item = &SingularityRecord> {
        self.records.iter().filter(|r| r.alternate)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalog {
    schema_version: i64,
    #[serde(default)]
    singularity: Vec<RawRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    name: String,
    variables: Vec<String>,
    polynomial: Vec<Vec<u32>>,
    supported: bool,
    alternate: bool,
    basis: Option<Vec<Vec<u32>>>,
    #[serde(default)]
    psi: Vec<RawPsi>,
    #[serde(default)]
    zeta: Vec<RawZeta>,
    #[serde(default)]
    flat: Vec<RawFlat>,
    #[serde(default)]
    quartic: Vec<RawQuartic>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPsi {
    jacobi: Vec<u32>,
    sector: String,
    label: Option<Vec<u32>>,
    scale: Option<String>,
    #[serde(default)]
    ambiguous_sign: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawZeta {
    c: String,
    phi: Vec<u32>,
    s: Vec<usize>,
    printed: Option<Vec<u32>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFlat {
    t: usize,
    c: String,
    s: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuartic {
    c: String,
    t: Vec<usize>,
    #[serde(default)]
    boxed: bool,
}

pub fn load_catalog(path: &Path) -> Result<Catalog, CatalogError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CatalogError::Io(path.display().to_string(), e.to_string()))?;
    parse_catalog(&text)
}

/// Parses and validates catalog text. An empty file is an empty catalog.
pub fn parse_catalog(text: &str) -> Result<Catalog, CatalogError> {
    if text.trim().is_empty() {
        return Ok(Catalog::default());
    }
    let raw: RawCatalog = toml::from_str(text).map_err(|e| CatalogError::Parse(e.to_string()))?;
    if raw.schema_version != SCHEMA_VERSION {
        return Err(CatalogError::Schema(raw.schema_version));
    }
    let mut records = Vec::new();
    let mut names = BTreeSet::new();
    for r in raw.singularity {
        if !names.insert(r.name.clone()) {
            return Err(CatalogError::Field { record: r.name, field: "name", message: "duplicate".into() });
        }
        records.push(convert(r)?);
    }
    Ok(Catalog { records })
}

fn convert(r: RawRecord) -> Result<SingularityRecord, CatalogError> {
    let name = r.name.clone();
    let err = |field: &'static str, message: String| CatalogError::Field { record: name.clone(), field, message };
    let n = r.variables.len();
    let mono = |field: &'static str, e: Vec<u32>| {
        if e.len() == n {
            Ok(Monomial::new(e))
        } else {
            Err(err(field, format!("exponent vector {e:?} has length {}, expected {n}", e.len())))
        }
    };
    let coef = |field: &'static str, c: &str| parse_rat(c).map_err(|e| err(field, e.to_string()));

    let f = Poly::from_exponents(n, &r.polynomial).map_err(|e| err("polynomial", e.to_string()))?;
    let weights = solve_weights(&f).map_err(|e| err("polynomial", e.to_string()))?;
    let w = transpose(&f).map_err(|e| err("polynomial", e.to_string()))?;
    let theory = FjrwTheory::new(&w).map_err(|e| err("polynomial", e.to_string()))?;
    let mu = usize::try_from(weights.milnor_number().to_integer())
        .map_err(|_| err("polynomial", "bad Milnor number".into()))?;

    let basis = r.basis.map(|b| b.into_iter().map(|e| mono("basis", e)).collect::<Result<Vec<_>, _>>()).transpose()?;
    if let Some(b) = &basis {
        if b.len() != mu {
            return Err(err("basis", format!("{} elements, Milnor number is {mu}", b.len())));
        }
    }

    let mut psi = Vec::new();
    for p in r.psi {
        let jacobi = mono("psi", p.jacobi)?;
        let sector = SectorId::parse(&p.sector).ok_or_else(|| err("psi", format!("bad sector {:?}", p.sector)))?;
        if let SectorId::Phases(ph) = &sector {
            if ph.len() != n {
                return Err(err("psi", format!("sector {:?} has {} phases", p.sector, ph.len())));
            }
        }
        let gamma = sector.element(&theory);
        let deg = theory.sector_degree(&gamma).map_err(|e| err("psi", e.to_string()))?;
        let jdeg = jacobi.degree(&weights);
        if deg != jdeg {
            return Err(err(
                "psi",
                format!(
                    "degree mismatch: {} has degree {}, {} has degree {}",
                    jacobi.render(&r.variables.iter().map(String::as_str).collect::<Vec<_>>()),
                    fmt_rat(&jdeg),
                    p.sector,
                    fmt_rat(&deg)
                ),
            ));
        }
        let label = p.label.map(|e| mono("psi", e)).transpose()?;
        psi.push(PsiRow { jacobi, sector, label, scale: p.scale, ambiguous_sign: p.ambiguous_sign });
    }
    if !psi.is_empty() && psi.len() != mu {
        return Err(err("psi", format!("{} rows, Milnor number is {mu}", psi.len())));
    }

    let index = |field: &'static str, i: usize| {
        if (1..=mu).contains(&i) {
            Ok(i)
        } else {
            Err(err(field, format!("index {i} outside 1..={mu}")))
        }
    };
    let mut zeta = Vec::new();
    for z in r.zeta {
        zeta.push(ZetaTerm {
            c: coef("zeta", &z.c)?,
            phi: mono("zeta", z.phi)?,
            s: z.s.into_iter().map(|i| index("zeta", i)).collect::<Result<_, _>>()?,
            printed: z.printed.map(|e| mono("zeta", e)).transpose()?,
        });
    }
    let mut flat = Vec::new();
    for t in r.flat {
        flat.push(FlatTerm {
            t: index("flat", t.t)?,
            c: coef("flat", &t.c)?,
            s: t.s.into_iter().map(|i| index("flat", i)).collect::<Result<_, _>>()?,
        });
    }
    let mut quartic = Vec::new();
    for q in r.quartic {
        if q.t.len() != 4 {
            return Err(err("quartic", format!("{} indices", q.t.len())));
        }
        quartic.push(QuarticTerm {
            c: coef("quartic", &q.c)?,
            t: q.t.into_iter().map(|i| index("quartic", i)).collect::<Result<_, _>>()?,
            boxed: q.boxed,
        });
    }
    Ok(SingularityRecord {
        name: r.name,
        variables: r.variables,
        polynomial: r.polynomial,
        supported: r.supported,
        alternate: r.alternate,
        basis,
        psi,
        zeta,
        flat,
        quartic,
    })
}

fn list<T: ToString>(xs: &[T]) -> String {
    format!("[{}]", xs.iter().map(T::to_string).collect::<Vec<_>>().join(", "))
}

fn exps(m: &Monomial) -> String {
    list(m.exps())
}

/// Canonical text of a catalog.
pub fn serialize(cat: &Catalog) -> String {
    let mut out = format!("schema_version = {SCHEMA_VERSION}\n");
    for r in &cat.records {
        out.push('\n');
        emit_record(&mut out, r);
    }
    out
}

fn emit_record(out: &mut String, r: &SingularityRecord) {
    let vars: Vec<String> = r.variables.iter().map(|v| format!("{v:?}")).collect();
    let rows: Vec<String> = r.polynomial.iter().map(|e| list(e)).collect();
    let _ = writeln!(out, "[[singularity]]");
    let _ = writeln!(out, "name = {:?}", r.name);
    let _ = writeln!(out, "variables = [{}]", vars.join(", "));
    let _ = writeln!(out, "polynomial = [{}]", rows.join(", "));
    let _ = writeln!(out, "supported = {}", r.supported);
    let _ = writeln!(out, "alternate = {}", r.alternate);
    if let Some(b) = &r.basis {
        let b: Vec<String> = b.iter().map(exps).collect();
        let _ = writeln!(out, "basis = [{}]", b.join(", "));
    }
    if !r.psi.is_empty() {
        out.push_str("psi = [\n");
        for p in &r.psi {
            let _ = write!(out, "    {{ jacobi = {}, sector = {:?}", exps(&p.jacobi), p.sector.render());
            if let Some(l) = &p.label {
                let _ = write!(out, ", label = {}", exps(l));
            }
            if let Some(s) = &p.scale {
                let _ = write!(out, ", scale = {s:?}");
            }
            if p.ambiguous_sign {
                out.push_str(", ambiguous_sign = true");
            }
            out.push_str(" },\n");
        }
        out.push_str("]\n");
    }
    if !r.zeta.is_empty() {
        out.push_str("zeta = [\n");
        for z in &r.zeta {
            let _ = write!(out, "    {{ c = {:?}, phi = {}, s = {}", fmt_rat(&z.c), exps(&z.phi), list(&z.s));
            if let Some(p) = &z.printed {
                let _ = write!(out, ", printed = {}", exps(p));
            }
            out.push_str(" },\n");
        }
        out.push_str("]\n");
    }
    if !r.flat.is_empty() {
        out.push_str("flat = [\n");
        for t in &r.flat {
            let _ = writeln!(out, "    {{ t = {}, c = {:?}, s = {} }},", t.t, fmt_rat(&t.c), list(&t.s));
        }
        out.push_str("]\n");
    }
    if !r.quartic.is_empty() {
        out.push_str("quartic = [\n");
        for q in &r.quartic {
            let _ = write!(out, "    {{ c = {:?}, t = {}", fmt_rat(&q.c), list(&q.t));
            if q.boxed {
                out.push_str(", boxed = true");
            }
            out.push_str(" },\n");
        }
        out.push_str("]\n");
    }
}

/// One failed Ψ check; `row` indexes the record's table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiFailure {
    pub row: Option<usize>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiReport {
    pub rows: usize,
    pub failures: Vec<PsiFailure>,
    /// Rows whose sector differs from `J·∏ρ^m`; informational.
    pub off_rule: Vec<usize>,
}

impl PsiReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks a Ψ table against its ring: bijectivity onto the basis, group
/// membership, degree preservation, sector dimensions, broad labels and
/// pairing compatibility. Records without a table are checked on the
/// `J·∏ρ^m` rule.
pub fn validate_psi(record: &SingularityRecord) -> Result<PsiReport, CatalogError> {
    let ring = record.ring()?;
    let theory = record.theory();
    let names = record.names();
    let mut failures = Vec::new();
    let mut fail = |row: Option<usize>, message: String| failures.push(PsiFailure { row, message });
    let rows: Vec<PsiRow> = if record.psi.is_empty() {
        ring.basis()
            .basis
            .iter()
            .zip(rule_sectors(&ring, &theory))
            .map(|(m, g)| PsiRow {
                jacobi: m.clone(),
                sector: SectorId::Phases(g.phases().to_vec()),
                label: None,
                scale: None,
                ambiguous_sign: false,
            })
            .collect()
    } else {
        record.psi.clone()
    };

    let basis: BTreeSet<&Monomial> = ring.basis().basis.iter().collect();
    let mut seen = BTreeSet::new();
    for (i, r) in rows.iter().enumerate() {
        if !basis.contains(&r.jacobi) {
            fail(Some(i), format!("{} is not a basis element", r.jacobi.render(&names)));
        }
        if !seen.insert(&r.jacobi) {
            fail(Some(i), format!("{} appears twice", r.jacobi.render(&names)));
        }
    }
    if seen.len() != basis.len() {
        fail(None, format!("{} distinct rows for {} basis elements", seen.len(), basis.len()));
    }

    let gammas: Vec<GroupElement> = rows.iter().map(|r| r.sector.element(&theory)).collect();
    let mut per_sector: BTreeMap<Vec<Rat>, Vec<usize>> = BTreeMap::new();
    let mut states = BTreeSet::new();
    let mut off_rule = Vec::new();
    for (i, (r, g)) in rows.iter().zip(&gammas).enumerate() {
        if !theory.group().contains(g) {
            fail(Some(i), format!("{} is not in G_W", g));
            continue;
        }
        let deg = theory.sector_degree(g).expect("member");
        let jdeg = r.jacobi.degree(ring.weights());
        if deg != jdeg {
            fail(
                Some(i),
                format!(
                    "{} has degree {}, its state has degree {}",
                    r.jacobi.render(&names),
                    fmt_rat(&jdeg),
                    fmt_rat(&deg)
                ),
            );
        }
        if &theory.group().j_times_rho(r.jacobi.exps()) != g {
            off_rule.push(i);
        }
        per_sector.entry(g.phases().to_vec()).or_default().push(i);
        match (&r.label, g.is_narrow(), record.psi.is_empty()) {
            (Some(_), true, _) => fail(Some(i), "narrow sector with a broad label".into()),
            (None, false, false) => fail(Some(i), format!("broad sector {} without a label", g)),
            (Some(l), false, _) => {
                let labels = theory.sector_basis(g).unwrap_or_default();
                if !labels.contains(l) {
                    fail(
                        Some(i),
                        format!("label {} is not an invariant of H_γ for γ = {}", l.render(&["x", "y", "z"]), g),
                    );
                }
            }
            _ => {}
        }
        let known = g.is_narrow() || r.label.is_some();
        if known && !states.insert((g.phases().to_vec(), r.label.clone())) {
            fail(Some(i), format!("state over {} used twice", g));
        }
    }
    for (phases, idx) in &per_sector {
        let g = GroupElement::new(phases.clone());
        if let Ok(dim) = theory.sector_dim(&g) {
            if idx.len() > dim {
                fail(Some(idx[0]), format!("{} rows over {} but dim H_γ = {dim}", idx.len(), g));
            }
        }
    }

    let position: BTreeMap<&Monomial, usize> = rows.iter().enumerate().map(|(i, r)| (&r.jacobi, i)).collect();
    let g = &ring.pairing().g;
    for a in 0..ring.mu() {
        for b in a..ring.mu() {
            if g[a][b].is_zero() {
                continue;
            }
            let (Some(&i), Some(&j)) = (position.get(ring.phi(a)), position.get(ring.phi(b))) else { continue };
            if !gammas[i].mul(&gammas[j]).is_identity() {
                fail(
                    Some(i),
                    format!(
                        "{} and {} pair but their sectors {} and {} are not inverse",
                        ring.phi(a).render(&names),
                        ring.phi(b).render(&names),
                        gammas[i],
                        gammas[j]
                    ),
                );
            }
        }
    }
    Ok(PsiReport { rows: rows.len(), failures, off_rule })
}
