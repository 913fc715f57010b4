//! Corpus files and the acceptance checks run by `blocky suite`.
//!
//! A corpus directory holds, per instance `NAME`, the matrix `NAME.bm`, an
//! optional factorization `NAME.lf` and an optional JSON sidecar `NAME.json`
//! with the generating spec and known parameters.

use std::f64::consts::{PI, SQRT_2};
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::cover::{cover_support, is_blocky};
use crate::error::{Error, Result};
use crate::extract::{corollary_rectangle, extract_blocky_with, guarantee_ledger, Branch, ExtractionTrace};
use crate::factor::{inner_product_sums, large_pair_count, pivotal_row, potential, verify, Factorization};
use crate::families::{blocky_corpus, generate, regression_corpus, FamilySpec, GroundTruth};
use crate::gamma2::{als_search, group_lift, halfgraph_lower_bound, GroupFunction};
use crate::io::{format_factorization, format_matrix, parse_factorization, parse_matrix};
use crate::matrix::BooleanMatrix;
use crate::structure::threshold_dimension;

/// Pinned `(coverage, support)` of the regression instances under the
/// default configuration.
pub const REGRESSION_COVERAGE: [(usize, usize); 20] = [
    (178, 204),
    (41, 50),
    (57, 96),
    (48, 69),
    (17, 21),
    (24, 28),
    (180, 236),
    (93, 98),
    (38, 43),
    (104, 130),
    (151, 189),
    (43, 94),
    (73, 103),
    (117, 156),
    (97, 114),
    (15, 19),
    (10, 10),
    (620, 644),
    (149, 184),
    (102, 110),
];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sidecar {
    pub name: String,
    pub spec: FamilySpec,
    pub truth: GroundTruth,
    pub m: usize,
    pub n: usize,
    pub support: usize,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub matrix: BooleanMatrix,
    /// `Err` holds the reason a present `.lf` file was rejected.
    pub factorization: Option<std::result::Result<Factorization, String>>,
    pub sidecar: Option<Sidecar>,
}

/// Generates every spec, then writes the files. Nothing is written if any
/// spec fails to generate.
pub fn write_corpus(dir: &Path, specs: &[(String, FamilySpec)]) -> Result<usize> {
    let mut files = Vec::with_capacity(specs.len());
    for (name, spec) in specs {
        let inst = generate(spec)?;
        let sidecar = Sidecar {
            name: name.clone(),
            spec: spec.clone(),
            truth: inst.truth.clone(),
            m: inst.matrix.rows(),
            n: inst.matrix.cols(),
            support: inst.matrix.support_size(),
        };
        files.push((
            name,
            format_matrix(&inst.matrix),
            inst.factorization.as_ref().map(format_factorization),
            serde_json::to_string_pretty(&sidecar)?,
        ));
    }
    fs::create_dir_all(dir)?;
    for (name, bm, lf, json) in &files {
        fs::write(dir.join(format!("{name}.bm")), bm)?;
        if let Some(lf) = lf {
            fs::write(dir.join(format!("{name}.lf")), lf)?;
        }
        fs::write(dir.join(format!("{name}.json")), json)?;
    }
    Ok(files.len())
}

/// Reads every `*.bm` in `dir` (sorted by name). A malformed matrix is an
/// error; a malformed or invalid factorization is recorded on the entry.
pub fn load_corpus(dir: &Path, tol: f64) -> Result<Vec<CorpusEntry>> {
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let p = e.path();
            (p.extension().is_some_and(|x| x == "bm")).then(|| p.file_stem()?.to_str().map(str::to_owned)).flatten()
        })
        .collect();
    names.sort();
    if names.is_empty() {
        return Err(Error::NoInstances(dir.display().to_string()));
    }
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        let bm = fs::read_to_string(dir.join(format!("{name}.bm")))?;
        let matrix = parse_matrix(&bm).map_err(|e| e.in_file(&dir.join(format!("{name}.bm"))))?;
        let lf_path = dir.join(format!("{name}.lf"));
        let factorization = lf_path.exists().then(|| {
            let text = fs::read_to_string(&lf_path).map_err(|e| e.to_string())?;
            let f = parse_factorization(&text, tol).map_err(|e| e.to_string())?;
            let violations = verify(&matrix, &f);
            match violations.first() {
                None => Ok(f),
                Some(v) => Err(format!("{} violation(s), first: {v}", violations.len())),
            }
        });
        let json_path = dir.join(format!("{name}.json"));
        let sidecar = if json_path.exists() {
            Some(serde_json::from_str(&fs::read_to_string(&json_path)?)?)
        } else {
            None
        };
        out.push(CorpusEntry { name, matrix, factorization, sidecar });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    /// Number of individual checks performed.
    pub checked: usize,
    pub detail: String,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteSummary {
    pub instances: usize,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

/// Collects failures; keeps the first few messages.
#[derive(Default)]
struct Tally {
    checked: usize,
    failures: Vec<String>,
    failed: usize,
    /// Appended to the failure summary.
    context: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < 5 {
                self.failures.push(msg());
            }
        }
    }

    fn finish(self, id: u8, name: &'static str, start: Instant, limit: Option<Duration>, note: String) -> CriterionResult {
        let elapsed = start.elapsed();
        let slow = limit.is_some_and(|l| elapsed > l);
        let mut detail = if self.failed == 0 {
            note
        } else {
            let context = self.context.map(|c| format!(" ({c})")).unwrap_or_default();
            format!("{} of {} checks failed{context}: {}", self.failed, self.checked, self.failures.join("; "))
        };
        if slow {
            detail = format!("{detail}; took {:.2}s, limit {:.0}s", elapsed.as_secs_f64(), limit.unwrap().as_secs_f64());
        }
        CriterionResult {
            id,
            name,
            passed: self.failed == 0 && !slow,
            checked: self.checked,
            detail,
            elapsed_ms: elapsed.as_secs_f64() * 1e3,
        }
    }
}

/// Longest staircase by extending prefixes in every possible way.
pub fn brute_force_td(a: &BooleanMatrix) -> usize {
    fn extend(a: &BooleanMatrix, rows: &mut Vec<usize>, cols: &mut Vec<usize>) -> usize {
        let mut best = rows.len();
        for i in 0..a.rows() {
            if rows.contains(&i) || cols.iter().any(|&c| !a.get(i, c)) {
                continue;
            }
            for j in 0..a.cols() {
                if !cols.contains(&j) && a.get(i, j) && rows.iter().all(|&r| !a.get(r, j)) {
                    rows.push(i);
                    cols.push(j);
                    best = best.max(extend(a, rows, cols));
                    rows.pop();
                    cols.pop();
                }
            }
        }
        best
    }
    extend(a, &mut Vec::new(), &mut Vec::new())
}

fn valid_factorizations(corpus: &[CorpusEntry]) -> impl Iterator<Item = (&CorpusEntry, &Factorization)> {
    corpus.iter().filter_map(|e| match &e.factorization {
        Some(Ok(f)) => Some((e, f)),
        _ => None,
    })
}

fn rejected_factorizations(corpus: &[CorpusEntry], tally: &mut Tally) {
    for e in corpus {
        if let Some(Err(msg)) = &e.factorization {
            tally.check(false, || format!("{}: {msg}", e.name));
        }
    }
}

struct Extraction<'a> {
    name: &'a str,
    matrix: &'a BooleanMatrix,
    outcome: Result<ExtractionTrace>,
}

pub fn run_suite(corpus: &[CorpusEntry], config: &Config) -> SuiteSummary {
    let tol = config.tol;
    let extractions: Vec<Extraction> = valid_factorizations(corpus)
        .map(|(e, f)| Extraction {
            name: &e.name,
            matrix: &e.matrix,
            outcome: extract_blocky_with(&e.matrix, f, &config.extract_options()).map(|(_, t)| t),
        })
        .collect();
    let traces = || extractions.iter().filter_map(|x| x.outcome.as_ref().ok().map(|t| (x.name, x.matrix, t)));

    let mut criteria = Vec::new();

    // 1
    let start = Instant::now();
    let mut t = Tally::default();
    for spec in blocky_corpus(200, 7000) {
        let inst = generate(&spec).expect("blocky specs are valid");
        let f = inst.factorization.expect("blocky instances carry a factorization");
        match extract_blocky_with(&inst.matrix, &f, &config.extract_options()) {
            Ok((cover, trace)) => {
                let valid = cover.validate(inst.matrix.rows(), inst.matrix.cols()).is_ok()
                    && cover_support(&inst.matrix, &cover).is_ok();
                t.check(valid && trace.coverage == inst.matrix.support_size(), || {
                    format!("{spec:?}: coverage {} of {}", trace.coverage, inst.matrix.support_size())
                });
            }
            Err(e) => t.check(false, || format!("{spec:?}: {e}")),
        }
    }
    criteria.push(t.finish(1, "blocky round-trip", start, Some(Duration::from_secs(10)), "200 blocky matrices fully covered".into()));

    // 2
    let start = Instant::now();
    let mut t = Tally::default();
    rejected_factorizations(corpus, &mut t);
    for (e, f) in valid_factorizations(corpus) {
        match potential(&e.matrix, f) {
            Ok(p) => {
                t.check(p.within_bounds(tol), || format!("{}: potential {} outside [{}, {}]", e.name, p.value, p.lower, p.upper));
                if f.lambda() == 1.0 {
                    t.check((p.value - p.upper).abs() <= tol, || format!("{}: lambda = 1 but potential {} != F", e.name, p.value));
                }
            }
            Err(err) => t.check(false, || format!("{}: {err}", e.name)),
        }
    }
    criteria.push(t.finish(2, "potential bounds", start, None, "all potentials within [F/lambda^2, F]".into()));

    // 3
    let start = Instant::now();
    let mut t = Tally::default();
    rejected_factorizations(corpus, &mut t);
    let le = |x: f64, y: f64| x <= y + tol * y.abs().max(1.0);
    let (mut stated_misses, mut columns) = (0usize, 0usize);
    for (e, f) in valid_factorizations(corpus) {
        let a = &e.matrix;
        let l2 = f.lambda() * f.lambda();
        let sums = match inner_product_sums(f, a) {
            Ok(s) => s,
            Err(err) => {
                t.check(false, || format!("{}: {err}", e.name));
                continue;
            }
        };
        for (i, &s) in sums.rows.iter().enumerate() {
            let r2 = (a.row_count(i) as f64).powi(2);
            t.check(le(r2, s) && le(s, l2 * l2 * r2), || format!("{}: row {} sum {s} outside [{r2}, {}]", e.name, i + 1, l2 * l2 * r2));
        }
        for (j, &s) in sums.cols.iter().enumerate() {
            let c2 = (a.col_count(j) as f64).powi(2);
            columns += 1;
            t.check(le(s, c2), || format!("{}: column {} sum {s} above {c2}", e.name, j + 1));
            // what the Cauchy-Schwarz argument yields for columns
            t.check(le(c2 / (l2 * l2), s), || format!("{}: column {} sum {s} below |C|^2/lambda^4", e.name, j + 1));
            let stated = le(c2 / l2, s);
            stated_misses += usize::from(!stated);
            t.check(stated, || format!("{}: column {} sum {s} below |C|^2/lambda^2 = {}", e.name, j + 1, c2 / l2));
            let need = c2 / (2.0 * l2);
            match large_pair_count(f, a, j) {
                Ok(n) => t.check(n as f64 >= need - tol, || format!("{}: column {} has {n} large pairs < {need}", e.name, j + 1)),
                Err(err) => t.check(false, || format!("{}: {err}", e.name)),
            }
        }
    }
    t.context = Some(format!("|C|^2/lambda^2 column lower bound missed on {stated_misses} of {columns} columns"));
    criteria.push(t.finish(3, "inner-product sums and large pairs", start, None, format!("{columns} columns and all rows within bounds")));

    // 4
    let start = Instant::now();
    let mut t = Tally::default();
    rejected_factorizations(corpus, &mut t);
    for (e, f) in valid_factorizations(corpus).filter(|(e, _)| !e.matrix.is_zero()) {
        let r = pivotal_row(&e.matrix, f);
        t.check(r.is_ok(), || format!("{}: {}", e.name, r.unwrap_err()));
    }
    for x in &extractions {
        if let Err(err) = &x.outcome {
            t.check(false, || format!("{}: extraction failed: {err}", x.name));
        }
    }
    let count = t.checked;
    t.check(count >= 1000, || format!("only {count} nonzero instances with a factorization, need 1000"));
    criteria.push(t.finish(4, "pivotal row", start, None, format!("pivotal row found on {count} instances")));

    // 5
    let start = Instant::now();
    let mut t = Tally::default();
    for (name, _, trace) in traces() {
        for s in trace.steps.iter().filter(|s| s.branch == Branch::Projection) {
            let (eta, post) = (s.eta.unwrap_or(0), s.post_potential.unwrap_or(f64::NAN));
            let drop = s.potential - post;
            t.check(drop >= 2.0 * eta as f64 - 1e-9, || format!("{name} step {}: potential drop {drop} < 2 * {eta}", s.id));
            t.check(s.projection_verified == Some(true), || format!("{name} step {}: projected factorization invalid", s.id));
        }
    }
    let steps = t.checked / 2;
    criteria.push(t.finish(5, "projection step", start, None, format!("{steps} projection steps checked")));

    // 6
    let start = Instant::now();
    let mut t = Tally::default();
    for mask in 0u32..512 {
        let a = BooleanMatrix::from_fn(3, 3, |i, j| mask >> (3 * i + j) & 1 == 1);
        let (got, want) = (threshold_dimension(&a).value, brute_force_td(&a));
        t.check(got == want, || format!("3x3 mask {mask}: solver {got}, enumeration {want}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for k in 0..500 {
        let a = BooleanMatrix::from_fn(4, 4, |_, _| rng.random_bool(0.5));
        let (got, want) = (threshold_dimension(&a).value, brute_force_td(&a));
        t.check(got == want, || format!("random 4x4 #{k}: solver {got}, enumeration {want}"));
    }
    for spec in blocky_corpus(50, 6000) {
        let a = generate(&spec).expect("valid").matrix;
        if !a.is_zero() {
            let td = threshold_dimension(&a);
            t.check(td.value == 1 && td.exact, || format!("{spec:?}: TD {} for a blocky matrix", td.value));
        }
    }
    for n in 1..=12 {
        let td = threshold_dimension(&BooleanMatrix::half_graph(n));
        t.check(td.value == n && td.exact, || format!("half graph {n}: TD {}", td.value));
    }
    criteria.push(t.finish(6, "threshold dimension oracle", start, Some(Duration::from_secs(60)), "solver agrees with enumeration".into()));

    // 7
    let start = Instant::now();
    let mut t = Tally::default();
    let bound = |n: usize| halfgraph_lower_bound(n).unwrap_or(f64::NAN);
    let v1 = bound(1);
    t.check((v1 - 1.0).abs() <= 1e-9, || format!("n = 1: {v1}"));
    let v2 = bound(2);
    t.check((v2 - (0.5 + SQRT_2 / 2.0)).abs() <= 1e-9, || format!("n = 2: {v2}"));
    for p in 1..=12 {
        let n = 1usize << p;
        let v = bound(n);
        let floor = (n as f64).ln() / (2.0 * PI) - 1.0;
        t.check(v >= floor, || format!("n = {n}: {v} < {floor}"));
    }
    criteria.push(t.finish(7, "half-graph bound", start, Some(Duration::from_secs(5)), "n = 1, 2 exact; powers of two above ln(n)/(2 pi) - 1".into()));

    // 8
    let start = Instant::now();
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for s in 0..100 {
        let k = 1 + s % 5;
        let mut values: Vec<bool> = (0..1usize << k).map(|_| rng.random_bool(0.5)).collect();
        values[0] |= !values.iter().any(|&b| b);
        let f = GroupFunction::new(k, values).expect("sizes agree");
        let naive: f64 = (0..1usize << k)
            .map(|a| {
                let sum: f64 = (0..1usize << k)
                    .filter(|&x| f.values()[x])
                    .map(|x| if (a & x).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
                    .sum();
                (sum / (1usize << k) as f64).abs()
            })
            .sum();
        match group_lift(&f) {
            Ok((a, fac)) => {
                let err = (fac.product() - as_real(&a)).amax();
                t.check(err <= 1e-9, || format!("f #{s}: reproduction error {err}"));
                t.check((fac.lambda() - naive).abs() <= 1e-9, || format!("f #{s}: lambda {} vs {naive}", fac.lambda()));
            }
            Err(e) => t.check(false, || format!("f #{s}: {e}")),
        }
    }
    for (k, basis, shift) in [(3usize, vec![1usize, 2], 4usize), (4, vec![3], 0), (5, vec![], 9), (4, vec![1, 2, 4, 8], 0)] {
        let f = GroupFunction::coset(k, &basis, shift);
        match group_lift(&f) {
            Ok((a, fac)) => {
                t.check((fac.lambda() - 1.0).abs() <= 1e-9, || format!("coset {basis:?}+{shift}: lambda {}", fac.lambda()));
                t.check(is_blocky(&a).is_some(), || format!("coset {basis:?}+{shift}: lift not blocky"));
            }
            Err(e) => t.check(false, || format!("coset {basis:?}+{shift}: {e}")),
        }
    }
    criteria.push(t.finish(8, "group lifts", start, None, "100 lifts reproduce; cosets give blocky lifts".into()));

    // 9
    let start = Instant::now();
    let mut t = Tally::default();
    for (name, _, trace) in traces() {
        for s in &trace.steps {
            let Some(split) = &s.split else { continue };
            t.check(split.retains_half(), || format!("{name} step {}: retained {} of {}", s.id, split.retained_ones, split.delta_block_ones));
            t.check(split.complement_bound_holds(tol), || format!("{name} step {}: complement {} too small", s.id, split.complement_ones));
            if s.branch == Branch::TdDrop {
                let child = &trace.steps[s.children[0]];
                if s.td_exact && child.td_exact {
                    t.check(child.td < s.td, || format!("{name} step {}: TD {} -> {}", s.id, s.td, child.td));
                }
            }
        }
    }
    criteria.push(t.finish(9, "case split", start, None, "every split step checked".into()));

    // 10
    let start = Instant::now();
    let mut t = Tally::default();
    let mut fractions = Vec::new();
    for (k, spec) in regression_corpus().iter().enumerate() {
        let inst = generate(spec).expect("pinned specs are valid");
        let f = inst.factorization.expect("differences carry a factorization");
        match extract_blocky_with(&inst.matrix, &f, &config.extract_options()) {
            Ok((_, trace)) => {
                let got = (trace.coverage, trace.support);
                fractions.push(trace.coverage_fraction());
                t.check(got == REGRESSION_COVERAGE[k], || format!("instance {k}: {got:?}, pinned {:?}", REGRESSION_COVERAGE[k]));
                t.check(trace.coverage > 0, || format!("instance {k}: empty cover"));
                let flags = guarantee_ledger(&trace, config.ledger_constant);
                t.check(flags.is_empty(), || format!("instance {k}: ledger flags {flags:?}"));
            }
            Err(e) => t.check(false, || format!("instance {k}: {e}")),
        }
    }
    let min = fractions.iter().copied().fold(f64::INFINITY, f64::min);
    criteria.push(t.finish(10, "extraction regression", start, None, format!("20 pinned instances, smallest coverage fraction {min:.4}")));

    // 11
    let start = Instant::now();
    let mut t = Tally::default();
    for (name, a, trace) in traces().filter(|(_, _, t)| t.coverage > 0) {
        match corollary_rectangle(a, &trace.cover) {
            Ok(r) => t.check(r.certified(a.rows(), a.cols()), || format!("{name}: block {} misses a threshold", r.block + 1)),
            Err(e) => t.check(false, || format!("{name}: {e}")),
        }
    }
    criteria.push(t.finish(11, "single rectangle", start, None, "every nonempty cover yields a certified block".into()));

    // 12
    let start = Instant::now();
    let mut t = Tally::default();
    let a = BooleanMatrix::from_rows(&[[1, 0], [1, 1]]).expect("literal");
    match als_search(&a, &config.als_options(1.0, 0)) {
        Ok(report) => {
            t.check(report.runs.len() == config.als_restarts, || format!("{} restarts ran", report.runs.len()));
            t.check(report.factorization.is_none(), || "found a 1-factorization of a non-blocky matrix".into());
        }
        Err(e) => t.check(false, || e.to_string()),
    }
    criteria.push(t.finish(12, "negative control", start, None, format!("all {} restarts failed as expected", config.als_restarts)));

    let passed = criteria.iter().all(|c| c.passed);
    SuiteSummary { instances: corpus.len(), passed, criteria }
}

fn as_real(a: &BooleanMatrix) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_fn(a.rows(), a.cols(), |i, j| f64::from(u8::from(a.get(i, j))))
}
