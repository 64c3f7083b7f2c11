//! Reports behind the `lgmirror` binary.
//!
//! Every command builds one JSON payload and a verdict. The text format is
//! rendered from the same JSON value, so both formats carry identical data.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{fmt_rat, int, Monomial, Poly, Rat};
use crate::catalog::{validate_psi, Catalog, CatalogError, PsiReport, SingularityRecord};
use crate::fjrw::{CorrelatorKey, FjrwError, Mirror};
use crate::frobenius::{
    flat_coordinates, prepotential, render_t, sign_normalize, truncate, FrobeniusError, Prepotential,
};
use crate::jacobi::JacobiRing;
use crate::primitive::{solve_primitive_form, PrimitiveError, PrimitiveForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Computation {
    Jacobi,
    PrimitiveForm,
    Prepotential,
    Fjrw,
    MirrorCheck,
}

impl Computation {
    pub fn name(self) -> &'static str {
        match self {
            Computation::Jacobi => "jacobi",
            Computation::PrimitiveForm => "primitive-form",
            Computation::Prepotential => "prepotential",
            Computation::Fjrw => "fjrw",
            Computation::MirrorCheck => "mirror-check",
        }
    }

    /// Admissible `--order` values.
    pub fn orders(self) -> std::ops::RangeInclusive<usize> {
        match self {
            Computation::Jacobi | Computation::Fjrw | Computation::PrimitiveForm => 1..=8,
            Computation::Prepotential => 2..=8,
            Computation::MirrorCheck => 3..=8,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("order {order} out of range {lo}..={hi} for {computation}")]
    Order { computation: &'static str, order: usize, lo: usize, hi: usize },
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
    #[error(transparent)]
    Frobenius(#[from] FrobeniusError),
    #[error(transparent)]
    Fjrw(#[from] FjrwError),
}

impl CliError {
    /// Exit status: 2 for usage errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Catalog(CatalogError::Unknown(_)) | CliError::Order { .. } => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Match,
    Mismatch(Vec<String>),
    Unsupported,
}

impl Verdict {
    fn from_problems(problems: Vec<String>) -> Self {
        if problems.is_empty() {
            Verdict::Match
        } else {
            Verdict::Mismatch(problems)
        }
    }

    pub fn is_mismatch(&self) -> bool {
        matches!(self, Verdict::Mismatch(_))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    pub computation: &'static str,
    pub payload: Value,
    pub verdict: Verdict,
}

impl Report {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "== {} {}", self.name, self.computation);
        render_text(&mut out, "", &self.payload);
        match &self.verdict {
            Verdict::Match => out.push_str("verdict: match\n"),
            Verdict::Unsupported => out.push_str("verdict: unsupported\n"),
            Verdict::Mismatch(v) => {
                let _ = writeln!(out, "verdict: mismatch ({})", v.len());
                for m in v {
                    let _ = writeln!(out, "  - {m}");
                }
            }
        }
        out
    }
}

fn render_text(out: &mut String, path: &str, v: &Value) {
    let scalar = |v: &Value| match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                render_text(out, &p, x);
            }
        }
        Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = xs.iter().map(scalar).collect();
            let _ = writeln!(out, "{path}: [{}]", items.join(", "));
        }
        Value::Array(xs) => {
            let _ = writeln!(out, "{path}: {} entries", xs.len());
            for (i, x) in xs.iter().enumerate() {
                match x {
                    Value::Object(map) => {
                        let fields: Vec<String> = map.iter().map(|(k, y)| format!("{k}={}", compact(y))).collect();
                        let _ = writeln!(out, "  [{i}] {}", fields.join(" "));
                    }
                    other => {
                        let _ = writeln!(out, "  [{i}] {}", compact(other));
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{path}: {}", scalar(other));
        }
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn r(x: &Rat) -> Value {
    Value::String(fmt_rat(x))
}

fn exps(m: &Monomial) -> Value {
    json!(m.exps())
}

fn key_json(ring: &JacobiRing, key: &CorrelatorKey) -> Value {
    let ins: Vec<Value> = key.insertions.iter().map(|&a| exps(ring.phi(a))).collect();
    json!({ "key": key.render(ring), "insertions": ins })
}

/// Runs one computation on one record.
pub fn run(record: &SingularityRecord, computation: Computation, order: usize) -> Result<Report, CliError> {
    let range = computation.orders();
    if !range.contains(&order) {
        return Err(CliError::Order { computation: computation.name(), order, lo: *range.start(), hi: *range.end() });
    }
    let unsupported = !record.supported && matches!(computation, Computation::Fjrw | Computation::MirrorCheck);
    let (payload, verdict) = if unsupported {
        (json!({ "reason": "broad ring generators outside the reconstruction method" }), Verdict::Unsupported)
    } else {
        match computation {
            Computation::Jacobi => jacobi(record)?,
            Computation::PrimitiveForm => primitive(record, order)?,
            Computation::Prepotential => prepotential_report(record, order)?,
            Computation::Fjrw => fjrw(record)?,
            Computation::MirrorCheck => mirror_check(record, order)?,
        }
    };
    Ok(Report { name: record.name.clone(), computation: computation.name(), payload, verdict })
}

/// Runs `computation` on every record, one worker per record, reports in
/// catalog order.
pub fn run_all(cat: &Catalog, computation: Computation, order: usize) -> Vec<Result<Report, CliError>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = cat.records.iter().map(|rec| scope.spawn(move || run(rec, computation, order))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn jacobi(record: &SingularityRecord) -> Result<(Value, Verdict), CliError> {
    let ring = record.ring()?;
    let names = record.names();
    let mut problems = Vec::new();
    let milnor = ring.weights().milnor_number();
    if int(ring.mu() as i64) != milnor {
        problems.push(format!("basis has {} elements, Milnor number {}", ring.mu(), fmt_rat(&milnor)));
    }
    let psi = validate_psi(record)?;
    problems.extend(psi_problems(&psi));
    let basis: Vec<Value> = ring
        .basis()
        .basis
        .iter()
        .zip(&ring.basis().degrees)
        .map(|(m, d)| json!({ "monomial": exps(m), "text": m.render(&names), "degree": r(d) }))
        .collect();
    let pairing: Vec<Value> = ring
        .pairing()
        .support()
        .into_iter()
        .filter(|(a, b)| a <= b)
        .map(|(a, b)| json!({ "a": a + 1, "b": b + 1, "value": r(&ring.pairing().g[a][b]) }))
        .collect();
    let mu = ring.mu();
    let mut structure = Vec::new();
    for a in 0..mu {
        for b in a..mu {
            for (c, v) in ring.structure_constants()[a][b].iter().enumerate() {
                if !v.is_zero() {
                    structure.push(json!({ "a": a + 1, "b": b + 1, "c": c + 1, "value": r(v) }));
                }
            }
        }
    }
    let payload = json!({
        "polynomial": record.poly().render(&names, None),
        "mirror": record.mirror_poly().render(&names, None),
        "weights": ring.weights().weights().iter().map(r).collect::<Vec<_>>(),
        "central_charge": r(ring.central_charge()),
        "mu": mu,
        "basis": basis,
        "pairing": pairing,
        "structure_constants": structure,
        "psi_rows_checked": psi.rows,
    });
    Ok((payload, Verdict::from_problems(problems)))
}

fn idx_of(m: &Monomial) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, &e) in m.exps().iter().enumerate() {
        out.extend(std::iter::repeat_n(i + 1, e as usize));
    }
    out
}

fn monomial_of(mu: usize, idx: &[usize]) -> Monomial {
    let mut e = vec![0u32; mu];
    for &i in idx {
        e[i - 1] += 1;
    }
    Monomial::new(e)
}

/// ζ terms of s-order 1..=`order` as `(s indices, α, c)`.
fn zeta_terms(pf: &PrimitiveForm) -> BTreeMap<(Vec<usize>, usize), Rat> {
    let mut out = BTreeMap::new();
    for (k, a, p, c) in pf.zeta.entries() {
        if k.order() == 0 {
            continue;
        }
        debug_assert_eq!(p, 0);
        out.insert((idx_of(&k.to_monomial()), a), c);
    }
    out
}

fn primitive(record: &SingularityRecord, order: usize) -> Result<(Value, Verdict), CliError> {
    let ring = record.ring()?;
    let names = record.names();
    let pf = solve_primitive_form(&ring, order)?;
    let mut problems = Vec::new();
    let computed = zeta_terms(&pf);
    if !record.zeta.is_empty() {
        let cap = order.min(3);
        let mut expected = BTreeMap::new();
        for z in &record.zeta {
            if z.s.len() <= cap {
                let a = ring.index_of(&z.phi).expect("fixture φ in basis");
                expected.insert((z.s.clone(), a), z.c.clone());
            }
        }
        let keys: std::collections::BTreeSet<_> =
            computed.keys().filter(|(s, _)| s.len() <= cap).chain(expected.keys()).cloned().collect();
        for key in keys {
            let a = computed.get(&key).cloned().unwrap_or_else(Rat::zero);
            let e = expected.get(&key).cloned().unwrap_or_else(Rat::zero);
            if a != e {
                problems.push(format!(
                    "zeta {}·{}: computed {}, expected {}",
                    s_name(&key.0),
                    ring.phi(key.1).render(&names),
                    fmt_rat(&a),
                    fmt_rat(&e)
                ));
            }
        }
    }
    for (k, a, p, c) in crate::primitive::residual(&pf) {
        problems.push(format!("J has z^{p} term {} at φ_{} s^{:?}", fmt_rat(&c), a + 1, k.exps()));
    }
    let zeta: Vec<Value> =
        computed.iter().map(|((s, a), c)| json!({ "s": s, "phi": exps(ring.phi(*a)), "c": r(c) })).collect();
    let mut j = Vec::new();
    for (k, a, p, c) in pf.j.entries() {
        j.push(json!({ "s": idx_of(&k.to_monomial()), "alpha": a + 1, "z": p, "c": r(&c) }));
    }
    let payload = json!({
        "order": order,
        "zeta": zeta,
        "zeta_fixture_terms": record.zeta.len(),
        "j": j,
    });
    Ok((payload, Verdict::from_problems(problems)))
}

fn s_name(s: &[usize]) -> String {
    s.iter().map(|i| format!("s{i}")).collect::<Vec<_>>().join("*")
}

fn poly_terms(p: &Poly) -> Vec<Value> {
    p.terms().map(|(m, c)| json!({ "t": idx_of(m), "c": r(c) })).collect()
}

struct BSide {
    ring: JacobiRing,
    flat_order: usize,
    t_of_s: Vec<Poly>,
    raw: Prepotential,
    tilde: Prepotential,
}

fn b_side(record: &SingularityRecord, order: usize) -> Result<BSide, CliError> {
    let ring = record.ring()?;
    let pf = solve_primitive_form(&ring, order)?;
    let flat = flat_coordinates(&pf)?;
    let raw = prepotential(&ring, &pf, &flat)?;
    let tilde = sign_normalize(&ring, &raw)?;
    Ok(BSide { flat_order: flat.order, t_of_s: flat.t_of_s, raw, tilde, ring })
}

fn prepotential_report(record: &SingularityRecord, order: usize) -> Result<(Value, Verdict), CliError> {
    let b = b_side(record, order)?;
    let mu = b.ring.mu();
    let mut problems = Vec::new();
    if !record.flat.is_empty() {
        for (k, t) in b.t_of_s.iter().enumerate() {
            let mut expected = Poly::monomial(Monomial::var(mu, k));
            for f in record.flat.iter().filter(|f| f.t == k + 1) {
                expected.add_term(monomial_of(mu, &f.s), f.c.clone());
            }
            let got = truncate(t, 2);
            if got != expected {
                problems.push(format!(
                    "t{}: computed {}, expected {}",
                    k + 1,
                    got.render(&s_refs(mu), None),
                    expected.render(&s_refs(mu), None)
                ));
            }
        }
    }
    if !record.quartic.is_empty() && b.raw.order >= 4 {
        let mut expected = Poly::zero(mu);
        for q in &record.quartic {
            expected.add_term(monomial_of(mu, &q.t), q.c.clone());
        }
        let got = b.raw.part(4).scale(&int(-1));
        for (m, c) in got.terms() {
            if expected.coeff(m) != *c {
                problems.push(format!(
                    "-F4 {}: computed {}, expected {}",
                    render_t(m),
                    fmt_rat(c),
                    fmt_rat(&expected.coeff(m))
                ));
            }
        }
        for (m, c) in expected.terms() {
            if got.coeff(m).is_zero() {
                problems.push(format!("-F4 {}: computed 0, expected {}", render_t(m), fmt_rat(c)));
            }
        }
    }
    let flat: Vec<Value> = b
        .t_of_s
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let nonlinear: Vec<Value> = t
                .terms()
                .filter(|(m, _)| m.total_degree() > 1)
                .map(|(m, c)| json!({ "s": idx_of(m), "c": r(c) }))
                .collect();
            json!({ "t": k + 1, "nonlinear": nonlinear })
        })
        .collect();
    let mut raw = serde_json::Map::new();
    let mut tilde = serde_json::Map::new();
    for k in 3..=b.raw.order.min(4) as u32 {
        raw.insert(format!("F{k}"), json!(poly_terms(&b.raw.part(k))));
        tilde.insert(format!("F{k}"), json!(poly_terms(&b.tilde.part(k))));
    }
    let payload = json!({
        "order": b.raw.order,
        "flat_order": b.flat_order,
        "flat_coordinates": flat,
        "raw": raw,
        "sign_normalized": tilde,
        "fixture_terms": { "flat": record.flat.len(), "quartic": record.quartic.len() },
    });
    Ok((payload, Verdict::from_problems(problems)))
}

fn s_refs(mu: usize) -> Vec<&'static str> {
    const S: [&str; 24] = [
        "s1", "s2", "s3", "s4", "s5", "s6", "s7", "s8", "s9", "s10", "s11", "s12", "s13", "s14", "s15", "s16", "s17",
        "s18", "s19", "s20", "s21", "s22", "s23", "s24",
    ];
    S[..mu].to_vec()
}

fn fjrw(record: &SingularityRecord) -> Result<(Value, Verdict), CliError> {
    let ring = record.ring()?;
    let theory = record.theory();
    let sectors = record.sectors(&ring, &theory)?;
    let w = record.mirror_poly();
    let m = Mirror::new(&ring, &w, sectors)?;
    let mut problems = Vec::new();
    for (key, v) in m.threepoint_crosscheck() {
        problems.push(format!("3-point {} is {} but the concave value is 1", key.render(&ring), fmt_rat(&v)));
    }
    let seeds = m.seeds()?;
    let four = m.solve_fourpoint()?;
    let ogrr = m.ogrr_table();
    for (key, v) in &ogrr {
        let s = &four.values[key];
        if s != v {
            problems.push(format!("{}: oGRR {} but WDVV {}", key.render(&ring), fmt_rat(v), fmt_rat(s)));
        }
    }
    let cert = m.five_point_certificate(&four)?;
    for (key, v) in cert.solved.iter().filter(|(_, v)| !v.is_zero()) {
        problems.push(format!("basic 5-point {} = {}", key.render(&ring), fmt_rat(v)));
    }
    let seeds_json: Vec<Value> = seeds
        .iter()
        .map(|s| {
            let comb: Vec<Value> =
                s.combination.iter().map(|(k, c)| json!({ "key": k.render(&ring), "c": r(c) })).collect();
            json!({ "variable": record.variables[s.variable], "combination": comb, "value": r(&s.value) })
        })
        .collect();
    let ogrr_json: Vec<Value> = ogrr
        .iter()
        .map(|(k, v)| {
            let mut o = key_json(&ring, k);
            o["value"] = r(v);
            o
        })
        .collect();
    let basic: Vec<Value> = m
        .enumerate_basic(4)
        .iter()
        .map(|k| {
            let mut o = key_json(&ring, k);
            o["value"] = r(&four.values[k]);
            o
        })
        .collect();
    let five: Vec<Value> = cert
        .basic
        .iter()
        .map(|k| {
            let mut o = key_json(&ring, k);
            o["value"] = cert.solved.get(k).map(r).unwrap_or(Value::Null);
            o
        })
        .collect();
    let payload = json!({
        "mirror": w.render(&record.names(), None),
        "group_order": theory.group().order.to_string(),
        "sectors": m.sectors().iter().map(|s| s.gamma.to_string()).collect::<Vec<_>>(),
        "seeds": seeds_json,
        "ogrr": ogrr_json,
        "basic_fourpoint": basic,
        "fourpoint_unknowns": four.unknowns,
        "wdvv_rows_used": four.rows_used,
        "wdvv_rows_total": four.rows_total,
        "fivepoint": { "bound": r(&cert.bound), "basic": five, "holds": cert.holds() },
    });
    Ok((payload, Verdict::from_problems(problems)))
}

/// Sign-normalized B-side quartic against the A-side WDVV solution.
pub fn mirror_problems(record: &SingularityRecord, order: usize) -> Result<(Value, Vec<String>), CliError> {
    let b = b_side(record, order)?;
    let ring = &b.ring;
    let theory = record.theory();
    let sectors = record.sectors(ring, &theory)?;
    let w = record.mirror_poly();
    let m = Mirror::new(ring, &w, sectors)?;
    let seeds = m.seeds()?;
    let four = m.solve_fourpoint()?;
    let psi = validate_psi(record)?;
    let mut problems = psi_problems(&psi);
    let mut table = Vec::new();
    for (key, a) in &four.values {
        let bv = b.tilde.correlator(&key.insertions);
        if &bv != a {
            problems.push(format!("{}: A-side {}, B-side {}", key.render(ring), fmt_rat(a), fmt_rat(&bv)));
        }
        if !a.is_zero() || !bv.is_zero() {
            let mut o = key_json(ring, key);
            o["a_side"] = r(a);
            o["b_side"] = r(&bv);
            table.push(o);
        }
    }
    for (mono, c) in b.tilde.part(4).terms() {
        let key = CorrelatorKey::genus0(idx_of(mono).into_iter().map(|i| i - 1).collect());
        if !four.values.contains_key(&key) {
            problems.push(format!("B-side {} has coefficient {} but is not admissible", render_t(mono), fmt_rat(c)));
        }
    }
    for s in &seeds {
        let bv: Rat = s.combination.iter().map(|(k, c)| c * b.tilde.correlator(&k.insertions)).sum();
        if bv != s.value {
            problems.push(format!(
                "seed for {}: B-side {}, expected {}",
                record.variables[s.variable],
                fmt_rat(&bv),
                fmt_rat(&s.value)
            ));
        }
    }
    let payload = json!({
        "order": b.raw.order,
        "psi_slots_verified": if psi.passed() { psi.rows } else { 0 },
        "seeds": seeds.len(),
        "keys_compared": four.values.len(),
        "nonzero_table": table,
    });
    Ok((payload, problems))
}

fn psi_problems(psi: &PsiReport) -> Vec<String> {
    psi.failures
        .iter()
        .map(|f| match f.row {
            Some(i) => format!("psi row {}: {}", i + 1, f.message),
            None => format!("psi: {}", f.message),
        })
        .collect()
}

fn mirror_check(record: &SingularityRecord, order: usize) -> Result<(Value, Verdict), CliError> {
    let (payload, problems) = mirror_problems(record, order)?;
    Ok((payload, Verdict::from_problems(problems)))
}
