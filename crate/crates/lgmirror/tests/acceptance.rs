//! Acceptance runner: one PASS/FAIL line per criterion.
//!
//! The process exits non-zero when a criterion fails in a way that is not
//! listed in [`KNOWN_RED`]. A known failure still prints `FAIL`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;

use common::*;
use lgmirror::algebra::{rat, GroupElement, Monomial, Poly, Rat};
use lgmirror::catalog::SingularityRecord;
use lgmirror::cli::{run, Computation, Verdict};
use lgmirror::fjrw::{CorrelatorKey, FjrwTheory, Mirror};
use lgmirror::frobenius::{flat_coordinates, prepotential, sign_normalize, truncate, Prepotential};
use lgmirror::jacobi::JacobiRing;
use lgmirror::primitive::{solve_primitive_form, PrimitiveForm};
use num_traits::Zero;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// Criterion 6 fails for these entries; see the README.
const KNOWN_RED: &[(u8, &[&str])] = &[(6, &["Q11", "Q12", "S11", "S12"])];

struct Outcome {
    id: u8,
    title: &'static str,
    summary: String,
    /// `(entry, message)`; empty entry for global failures.
    failures: Vec<(String, String)>,
}

impl Outcome {
    fn new(id: u8, title: &'static str) -> Self {
        Outcome { id, title, summary: String::new(), failures: Vec::new() }
    }

    fn fail(&mut self, entry: &str, msg: impl Into<String>) {
        self.failures.push((entry.to_string(), msg.into()));
    }

    fn known(&self) -> bool {
        let entries: BTreeSet<&str> = self.failures.iter().map(|(e, _)| e.as_str()).collect();
        KNOWN_RED.iter().any(|(id, names)| *id == self.id && entries == names.iter().copied().collect())
    }
}

fn mono(mu: usize, one_based: &[usize]) -> Monomial {
    let mut e = vec![0; mu];
    for &i in one_based {
        e[i - 1] += 1;
    }
    Monomial::new(e)
}

fn poly(mu: usize, terms: &[(Rat, &[usize])]) -> Poly {
    let mut p = Poly::zero(mu);
    for (c, s) in terms {
        p.add_term(mono(mu, s), c.clone());
    }
    p
}

fn one_based(m: &Monomial) -> Vec<usize> {
    m.exps().iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i + 1, k as usize)).collect()
}

struct BSide {
    ring: JacobiRing,
    pf: PrimitiveForm,
    t_of_s: Vec<Poly>,
    raw: Prepotential,
    tilde: Prepotential,
}

fn b_side(rec: &SingularityRecord, order: usize) -> Result<BSide, String> {
    let ring = rec.ring().map_err(|e| e.to_string())?;
    let pf = solve_primitive_form(&ring, order).map_err(|e| e.to_string())?;
    let flat = flat_coordinates(&pf).map_err(|e| e.to_string())?;
    let raw = prepotential(&ring, &pf, &flat).map_err(|e| e.to_string())?;
    let tilde = sign_normalize(&ring, &raw).map_err(|e| e.to_string())?;
    Ok(BSide { t_of_s: flat.t_of_s, ring, pf, raw, tilde })
}

fn mirror<'r>(rec: &SingularityRecord, ring: &'r JacobiRing) -> Result<Mirror<'r>, String> {
    let sectors = rec.sectors(ring, &rec.theory()).map_err(|e| e.to_string())?;
    Mirror::new(ring, &rec.mirror_poly(), sectors).map_err(|e| e.to_string())
}

/// Compares `got` with the fixture polynomial term by term.
fn compare(out: &mut Outcome, entry: &str, what: &str, got: &Poly, expected: &Poly) {
    let keys: BTreeSet<&Monomial> = got.terms().chain(expected.terms()).map(|(m, _)| m).collect();
    for m in keys {
        let (a, e) = (got.coeff(m), expected.coeff(m));
        if a != e {
            out.fail(entry, format!("{what} at t{:?}: computed {a}, expected {e}", one_based(m)));
        }
    }
}

fn flat_fixture(rec: &SingularityRecord, k: usize, mu: usize) -> Poly {
    let mut p = Poly::monomial(Monomial::var(mu, k));
    for f in rec.flat.iter().filter(|f| f.t == k + 1) {
        p.add_term(mono(mu, &f.s), f.c.clone());
    }
    p
}

fn quartic_fixture(rec: &SingularityRecord, mu: usize) -> Poly {
    let mut p = Poly::zero(mu);
    for q in &rec.quartic {
        p.add_term(mono(mu, &q.t), q.c.clone());
    }
    p
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::new(1, "E12 flat coordinates");
    let rec = record("E12");
    match b_side(rec, 3) {
        Err(e) => out.fail("E12", e),
        Ok(b) => {
            let mu = b.ring.mu();
            for k in 0..mu {
                compare(&mut out, "E12", &format!("t{}", k + 1), &truncate(&b.t_of_s[k], 2), &flat_fixture(rec, k, mu));
            }
            let t3 = poly(mu, &[(rat(1, 1), &[3]), (rat(-3, 7), &[7, 9])]);
            let t10 = poly(mu, &[(rat(1, 1), &[10]), (rat(-4, 7), &[9, 12])]);
            compare(&mut out, "E12", "t3", &truncate(&b.t_of_s[2], 2), &t3);
            compare(&mut out, "E12", "t10", &truncate(&b.t_of_s[9], 2), &t10);
            out.summary = format!("{mu} expressions, {} nonlinear fixture terms", rec.flat.len());
        }
    }
    out
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::new(2, "E12 quartic table");
    let rec = record("E12");
    match b_side(rec, 3) {
        Err(e) => out.fail("E12", e),
        Ok(b) => {
            let mu = b.ring.mu();
            let minus = b.raw.part(4).scale(&rat(-1, 1));
            compare(&mut out, "E12", "-F4", &minus, &quartic_fixture(rec, mu));
            for (idx, v) in [([4, 4, 4, 12], rat(-1, 3)), ([2, 2, 9, 12], rat(-1, 7))] {
                let zero_based: Vec<usize> = idx.iter().map(|i| i - 1).collect();
                let got = b.raw.correlator(&zero_based);
                if got != v {
                    out.fail("E12", format!("d^4 F0 at t{idx:?}: {got}, expected {v}"));
                }
            }
            out.summary = format!("{} coefficients", minus.len());
            if minus.len() != 27 {
                out.fail("E12", format!("{} nonzero quartic coefficients, expected 27", minus.len()));
            }
        }
    }
    out
}

/// `(s-indices, φ index) ↦ c` for the `z⁰` part of `ζ` through `cap`.
fn zeta_terms(pf: &PrimitiveForm, cap: u32) -> BTreeMap<(Vec<usize>, usize), Rat> {
    let mut out = BTreeMap::new();
    for (k, a, p, c) in pf.zeta.entries() {
        if k.order() >= 1 && k.order() <= cap && p == 0 {
            out.insert((one_based(&k.to_monomial()), a), c);
        }
    }
    out
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::new(3, "13 further zeta and quartic fixtures");
    let mut zeta_terms_checked = 0;
    let mut quartic_terms = 0;
    let mut boxed = 0;
    for rec in primary().into_iter().filter(|r| r.name != "E12") {
        let b = match b_side(rec, 3) {
            Ok(b) => b,
            Err(e) => {
                out.fail(&rec.name, e);
                continue;
            }
        };
        let got = zeta_terms(&b.pf, 3);
        let mut expected = BTreeMap::new();
        for z in &rec.zeta {
            match b.ring.index_of(&z.phi) {
                Some(a) => {
                    expected.insert((z.s.clone(), a), z.c.clone());
                }
                None => out.fail(&rec.name, "zeta fixture outside the basis"),
            }
        }
        if expected.is_empty() {
            out.fail(&rec.name, "no zeta fixture");
        }
        let keys: BTreeSet<_> = got.keys().chain(expected.keys()).cloned().collect();
        for key in keys {
            let (a, e) = (got.get(&key).cloned().unwrap_or_default(), expected.get(&key).cloned().unwrap_or_default());
            if a != e {
                out.fail(&rec.name, format!("zeta s{:?} phi{}: computed {a}, expected {e}", key.0, key.1 + 1));
            }
        }
        zeta_terms_checked += expected.len();
        let mu = b.ring.mu();
        compare(&mut out, &rec.name, "-F4", &b.raw.part(4).scale(&rat(-1, 1)), &quartic_fixture(rec, mu));
        quartic_terms += rec.quartic.len();
        boxed += rec.quartic.iter().filter(|q| q.boxed).count();
        if rec.name == "Z12" {
            let x = b.ring.index_of(&Monomial::new(vec![1, 0])).expect("x");
            let y = b.ring.index_of(&Monomial::new(vec![0, 1])).expect("y");
            for (s, a, c) in [
                (vec![11, 12], 0, rat(-6, 121)),
                (vec![12, 12], y, rat(-5, 121)),
                (vec![10, 12, 12], 0, rat(29, 1331)),
                (vec![12, 12, 12], x, rat(9, 1331)),
            ] {
                if got.get(&(s.clone(), a)) != Some(&c) {
                    out.fail("Z12", format!("zeta s{s:?} is not {c}"));
                }
            }
        }
    }
    out.summary = format!("{zeta_terms_checked} zeta terms, {quartic_terms} quartic terms ({boxed} boxed)");
    out
}

fn criterion_4() -> Outcome {
    let mut out = Outcome::new(4, "FJRW oGRR values");
    for (p, q) in [(3i64, 7i64), (4, 5)] {
        let w = Poly::from_exponents(2, &[vec![p as u32, 0], vec![0, q as u32]]).unwrap();
        let t = FjrwTheory::new(&w).unwrap();
        let g = |a: i64, b: i64| GroupElement::new(vec![rat(a, p), rat(b, q)]);
        let (g21, gp1, gpq) = (g(2, 1), g(p - 1, 1), g(p - 1, q - 1));
        match t.ogrr_fourpoint([&g21, &g21, &gp1, &gpq]) {
            Ok(v) if v == rat(1, p) => {}
            other => out.fail(&format!("x^{p}+y^{q}"), format!("{other:?}, expected 1/{p}")),
        }
    }
    let w = Poly::from_exponents(3, &[vec![2, 0, 0], vec![1, 2, 0], vec![0, 1, 4]]).unwrap();
    let t = FjrwTheory::new(&w).unwrap();
    let j = |k| t.group().j_pow(k);
    for (k, sign, v) in [
        ([9, 9, 13, 3], 1, rat(1, 4)),
        ([9, 9, 11, 5], 1, rat(-1, 8)),
        ([9, 9, 9, 7], 1, rat(1, 8)),
        ([13, 13, 9, 15], -1, rat(-3, 16)),
    ] {
        match t.ogrr_fourpoint([&j(k[0]), &j(k[1]), &j(k[2]), &j(k[3])]) {
            Ok(x) if &x * rat(sign, 1) == v => {}
            other => out.fail("x^2+xy^2+yz^4", format!("J^{k:?}: {other:?}, expected {v}")),
        }
    }
    let mut checked = 0;
    for rec in catalog().records.iter().filter(|r| r.supported) {
        let ring = rec.ring().unwrap();
        let m = match mirror(rec, &ring) {
            Ok(m) => m,
            Err(e) => {
                out.fail(&rec.name, e);
                continue;
            }
        };
        let four = match m.solve_fourpoint() {
            Ok(f) => f,
            Err(e) => {
                out.fail(&rec.name, e.to_string());
                continue;
            }
        };
        for (key, v) in m.ogrr_table() {
            checked += 1;
            if four.values[&key] != v {
                out.fail(&rec.name, format!("{}: oGRR {v}, WDVV {}", key.render(&ring), four.values[&key]));
            }
        }
    }
    out.summary = format!("6 closed-form values, {checked} oGRR evaluations agree with WDVV");
    out
}

fn key(one_based: [usize; 4]) -> CorrelatorKey {
    CorrelatorKey::genus0(one_based.iter().map(|i| i - 1).collect())
}

fn criterion_5() -> Outcome {
    let mut out = Outcome::new(5, "WDVV reconstruction equals the B-side");
    let mut total = 0;
    for rec in primary() {
        let b = match b_side(rec, 3) {
            Ok(b) => b,
            Err(e) => {
                out.fail(&rec.name, e);
                continue;
            }
        };
        let m = match mirror(rec, &b.ring) {
            Ok(m) => m,
            Err(e) => {
                out.fail(&rec.name, e);
                continue;
            }
        };
        let seeds = m.seeds().unwrap_or_default();
        let seeded = (0..rec.nvars()).filter(|&i| rec.polynomial[i].iter().sum::<u32>() > 2).count();
        if seeds.len() != seeded {
            out.fail(&rec.name, format!("{} seeds, expected one per M_i other than x_i^2 ({seeded})", seeds.len()));
        }
        for s in &seeds {
            if s.value != m.theory().weights().weights()[s.variable] {
                out.fail(&rec.name, format!("seed for x{} is not q{}", s.variable + 1, s.variable + 1));
            }
        }
        let four = match m.solve_fourpoint() {
            Ok(f) => f,
            Err(e) => {
                out.fail(&rec.name, e.to_string());
                continue;
            }
        };
        for (k, a) in &four.values {
            let bv = b.tilde.correlator(&k.insertions);
            if &bv != a {
                out.fail(&rec.name, format!("{}: A-side {a}, B-side {bv}", k.render(&b.ring)));
            }
        }
        for (mono, c) in b.tilde.part(4).terms() {
            let k = CorrelatorKey::genus0(one_based(mono).into_iter().map(|i| i - 1).collect());
            if !four.values.contains_key(&k) {
                out.fail(&rec.name, format!("B-side t{:?} = {c} is not admissible", one_based(mono)));
            }
        }
        total += four.values.len();
        if rec.name == "Q10" {
            let basic = m.enumerate_basic(4).len();
            if basic != 10 {
                out.fail("Q10", format!("{basic} basic 4-point keys, expected 10"));
            }
            let sys = m.wdvv_system(4, &|_| Rat::zero());
            let one = rat(1, 1);
            let identities: Vec<Vec<(Rat, [usize; 4])>> = vec![
                vec![(one.clone(), [4, 4, 6, 8]), (-&one, [2, 4, 4, 10])],
                vec![(one.clone(), [4, 4, 5, 9]), (-&one, [2, 4, 4, 10])],
                vec![(one.clone(), [2, 4, 7, 8]), (-&one, [2, 4, 4, 10])],
                vec![(one.clone(), [2, 4, 4, 10]), (rat(-4, 1), [2, 2, 8, 9])],
                vec![(one.clone(), [2, 3, 8, 8]), (one.clone(), [2, 2, 5, 10]), (-&one, [2, 2, 8, 9])],
                vec![(one.clone(), [3, 3, 6, 9]), (-&one, [3, 3, 3, 10])],
                vec![(one.clone(), [3, 3, 7, 7]), (rat(4, 1), [3, 3, 3, 10])],
            ];
            for (i, id) in identities.iter().enumerate() {
                let mut comb: BTreeMap<CorrelatorKey, Rat> = BTreeMap::new();
                for (c, k) in id {
                    *comb.entry(key(*k)).or_insert_with(Rat::zero) += c;
                }
                if !sys.implies(&comb) {
                    out.fail("Q10", format!("identity {} is not implied", i + 1));
                }
            }
        }
    }
    out.summary = format!("{total} correlators over 14 entries, Q10 identities checked");
    out
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::new(6, "basic 5-point correlators vanish");
    let mut empty = 0;
    let mut solved = 0;
    let (mut confirmed, mut nonzero) = (0, 0);
    for rec in primary() {
        let ring = rec.ring().unwrap();
        let cert = mirror(rec, &ring).and_then(|m| {
            let four = m.solve_fourpoint().map_err(|e| e.to_string())?;
            m.five_point_certificate(&four).map_err(|e| e.to_string())
        });
        match cert {
            Err(e) => out.fail(&rec.name, e),
            Ok(c) => {
                if c.basic.is_empty() {
                    empty += 1;
                } else {
                    solved += 1;
                }
                let bad: Vec<_> = c.solved.iter().filter(|(_, v)| !v.is_zero()).collect();
                if bad.is_empty() {
                    continue;
                }
                let b5 = b_side(rec, 4).ok();
                for (k, v) in bad {
                    nonzero += 1;
                    let b = b5.as_ref().map(|b| b.tilde.correlator(&k.insertions));
                    if b.as_ref() == Some(v) {
                        confirmed += 1;
                    }
                    let b = b.map_or("unavailable".to_string(), |b| b.to_string());
                    out.fail(&rec.name, format!("{} = {v} (B-side at order 5: {b})", k.render(&ring)));
                }
            }
        }
    }
    out.summary = format!("{empty} entries with no basic keys, {solved} solved");
    if nonzero > 0 {
        out.summary += &format!(", B-side F0 confirms {confirmed} of {nonzero} nonzero values");
    }
    out
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::new(7, "property suites");
    let mut wdvv = 0;
    for rec in primary() {
        let config = Config { failure_persistence: None, ..Config::with_cases(100) };
        let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
        let checks = [
            pivot_suite(rec, &mut runner),
            homogeneity(rec, 3),
            integrability(rec, 3),
            wdvv_vanishes(rec, 4).map(|n| wdvv += n),
            milnor_oracle(rec),
        ];
        for e in checks.into_iter().filter_map(Result::err) {
            out.fail(&rec.name, e);
        }
    }
    out.summary = format!("100 pivot cases per entry, {wdvv} WDVV quadruples at order 4");
    out
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new(8, "alternate representatives");
    let (mut matched, mut unsupported) = (0, 0);
    for rec in catalog().alternates() {
        match run(rec, Computation::MirrorCheck, 3).map(|r| r.verdict) {
            Ok(Verdict::Match) if rec.supported => matched += 1,
            Ok(Verdict::Unsupported) if !rec.supported => unsupported += 1,
            Ok(v) => out.fail(&rec.name, format!("verdict {v:?}")),
            Err(e) => out.fail(&rec.name, e.to_string()),
        }
    }
    if unsupported != 1 || catalog().alternates().find(|r| !r.supported).map(|r| r.name.as_str()) != Some("U12''") {
        out.fail("", "x^2y+xy^2+z^4 must be the single unsupported alternate");
    }
    out.summary = format!("{matched} match, {unsupported} unsupported");
    out
}

fn main() -> ExitCode {
    let outcomes = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ];
    let mut unexpected = 0;
    let mut known = 0;
    for o in &outcomes {
        if o.failures.is_empty() {
            println!("PASS [{}] {}: {}", o.id, o.title, o.summary);
            continue;
        }
        let tag = if o.known() {
            known += 1;
            "known"
        } else {
            unexpected += 1;
            "unexpected"
        };
        let entries: BTreeSet<&str> = o.failures.iter().map(|(e, _)| e.as_str()).collect();
        let entries: Vec<&str> = entries.into_iter().collect();
        println!("FAIL [{}] {}: {} ({tag}; {})", o.id, o.title, o.summary, entries.join(", "));
        for (e, m) in &o.failures {
            println!("    {e}: {m}");
        }
    }
    let passed = outcomes.len() - known - unexpected;
    println!("acceptance: {passed} pass, {} fail ({known} known)", known + unexpected);
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
