//! Exact character sums D(u,v,w), S and T, exhaustive distribution scans,
//! moment identities and the scan cache.
//!
//! D(u,v,w) = Σ_{y∈F_p*} Σ_x ζ^{y Q_{u,v,w}(x)} is evaluated through the
//! zero-count identity D = p·N_0 - p^m: the inner sum over y is p - 1 where
//! Q(x) = 0 and -1 elsewhere.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::code::MessageTuple;
use crate::field::{ExtensionField, FieldElement, PrimeField};
use crate::quadform::{
    diagonalize_in_place, form_value_with, gram_matrix, lemma21_predict, lemma22_consistent,
    polynomial_basis, FormExponents, FormParams, FormScanTally, PivotStrategy,
};
use crate::syscount;

/// Scans estimated above this many form evaluations need `force`.
pub const SCAN_BUDGET: u64 = 10_000_000_000;

pub const CACHE_MAGIC: &str = "fivezero-scan v1";

#[derive(Debug, Error)]
pub enum CharSumError {
    #[error("{kind:?} sums need k of the other parity (k = {k})")]
    WrongParity { kind: SumKind, k: u32 },
    #[error("character sum is not rational: residue counts {0:?}")]
    NotRational(Vec<u64>),
    #[error("scan needs {evaluations} form evaluations, above the budget of {budget}; use force")]
    BudgetExceeded { evaluations: u128, budget: u64 },
    #[error("exhaustive scans support p < 128, got p = {0}")]
    UnsupportedPrime(u32),
    #[error("CacheWriteFailure: {0}")]
    CacheWriteFailure(String),
    #[error("malformed scan cache: {0}")]
    CacheFormat(String),
    #[error("scan cache header mismatch: expected {expected:?}, found {found:?}")]
    CacheMismatch { expected: String, found: String },
    #[error("IdentityViolation: {0}")]
    IdentityViolation(String),
}

/// Which two-term sum governs codeword weights: S for even k, T for odd k.
#[derive(Copy, Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub enum SumKind {
    S,
    T,
}

impl SumKind {
    pub fn for_k(k: u32) -> Self {
        if k % 2 == 0 {
            SumKind::S
        } else {
            SumKind::T
        }
    }
}

/// p^m as i64.
fn field_size(field: &ExtensionField) -> i64 {
    field.size() as i64
}

/// D(u, v, w) = p·N_0(Q_{u,v,w}) - p^m.
pub fn d_sum(field: &ExtensionField, k: u32, u: FieldElement, v: FieldElement, w: FieldElement) -> i64 {
    let q = FormParams::new(u, v, w, k);
    let e = FormExponents::new(field, k);
    let zeros = 1 + (0..field.order() as u64)
        .filter(|&lx| form_value_with(field, &q, &e, lx) == 0)
        .count() as i64;
    field.p() as i64 * zeros - field_size(field)
}

/// S(a1,a2,b1,b2,c) = D(a1+a2, b1+b2, c) + D(a1-a2, b1-b2, c), for even k.
pub fn s_sum(field: &ExtensionField, k: u32, t: &MessageTuple) -> Result<i64, CharSumError> {
    if k % 2 != 0 {
        return Err(CharSumError::WrongParity { kind: SumKind::S, k });
    }
    Ok(d_sum(field, k, field.add(t.a1, t.a2), field.add(t.b1, t.b2), t.c)
        + d_sum(field, k, field.sub(t.a1, t.a2), field.sub(t.b1, t.b2), t.c))
}

/// T(a1,a2,b1,b2,c) = D(a1+a2, b1+b2, c) + D(a1-a2, -(b1-b2), c), for odd k.
pub fn t_sum(field: &ExtensionField, k: u32, t: &MessageTuple) -> Result<i64, CharSumError> {
    if k % 2 != 1 {
        return Err(CharSumError::WrongParity { kind: SumKind::T, k });
    }
    Ok(d_sum(field, k, field.add(t.a1, t.a2), field.add(t.b1, t.b2), t.c)
        + d_sum(field, k, field.sub(t.a1, t.a2), field.sub(t.b2, t.b1), t.c))
}

/// The alternative reading of T with a1+a2 in both first arguments:
/// D(a1+a2, b1+b2, c) + D(a1+a2, -(b1-b2), c).
pub fn t_sum_alternative_reading(field: &ExtensionField, k: u32, t: &MessageTuple) -> i64 {
    let u = field.add(t.a1, t.a2);
    d_sum(field, k, u, field.add(t.b1, t.b2), t.c) + d_sum(field, k, u, field.sub(t.b2, t.b1), t.c)
}

/// S for even k, T for odd k.
pub fn weight_sum(field: &ExtensionField, k: u32, t: &MessageTuple) -> i64 {
    match SumKind::for_k(k) {
        SumKind::S => s_sum(field, k, t),
        SumKind::T => t_sum(field, k, t),
    }
    .expect("parity matches by construction")
}

/// An element Σ_t c_t ζ^t of Z[ζ_p] held as its exponent counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicCounts {
    counts: Vec<u64>,
}

impl CyclotomicCounts {
    pub fn new(p: u32) -> Self {
        Self {
            counts: vec![0; p as usize],
        }
    }

    pub fn add_power(&mut self, exponent: u32) {
        self.counts[exponent as usize] += 1;
    }

    /// The integer value, when c_1 = ... = c_{p-1}.
    pub fn to_integer(&self) -> Result<i64, CharSumError> {
        let c1 = self.counts[1];
        if self.counts[1..].iter().all(|&c| c == c1) {
            Ok(self.counts[0] as i64 - c1 as i64)
        } else {
            Err(CharSumError::NotRational(self.counts.clone()))
        }
    }
}

/// The two-term sum straight from the trace representation of a codeword,
/// before any λ-absorption:
///
/// Σ_{y∈F_p*} Σ_x ζ^{y Tr((a1+a2)x² + (b1+b2)x^{d1} + c x^{d2})}
///              + ζ^{y Tr((a1-a2)λx² + (b1-b2)λ^{d1/2}x^{d1} + cλ^{d2/2}x^{d2})}
///
/// with λ-powers taken by direct exponentiation. Equals S for even k and T
/// for odd k.
pub fn literal_sum(field: &ExtensionField, k: u32, t: &MessageTuple) -> Result<i64, CharSumError> {
    let prime = field.prime();
    let lambda = prime.lambda();
    let first = FormParams::new(field.add(t.a1, t.a2), field.add(t.b1, t.b2), t.c, k);
    let second = FormParams::new(
        field.scale(field.sub(t.a1, t.a2), lambda),
        field.scale(field.sub(t.b1, t.b2), prime.lambda_power(k)),
        field.scale(t.c, prime.lambda_power(2 * k)),
        k,
    );
    let e = FormExponents::new(field, k);
    let mut acc = CyclotomicCounts::new(field.p());
    for q in [&first, &second] {
        for y in 1..field.p() {
            // x = 0 contributes ζ^0
            acc.add_power(0);
            for lx in 0..field.order() as u64 {
                acc.add_power(prime.mul(y, form_value_with(field, q, &e, lx)));
            }
        }
    }
    acc.to_integer()
}

/// Where a distribution came from.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Scope {
    /// D(u, v, w) over all (u, v) at the w with this dense index.
    FixedW(usize),
    /// S or T over all five-tuples, by convolution of per-w scans.
    Tuples(SumKind),
    /// Evaluated from closed forms.
    ClosedForm,
}

/// Exact multiset "value -> frequency".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueDistribution {
    pub p: u32,
    pub m: u32,
    pub k: u32,
    pub scope: Scope,
    counts: BTreeMap<i64, BigUint>,
}

impl ValueDistribution {
    pub fn new(p: u32, m: u32, k: u32, scope: Scope) -> Self {
        Self {
            p,
            m,
            k,
            scope,
            counts: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, value: i64, freq: impl Into<BigUint>) {
        let freq = freq.into();
        if freq.is_zero() {
            return;
        }
        *self.counts.entry(value).or_default() += freq;
    }

    pub fn frequency(&self, value: i64) -> BigUint {
        self.counts.get(&value).cloned().unwrap_or_default()
    }

    pub fn table(&self) -> &BTreeMap<i64, BigUint> {
        &self.counts
    }

    /// Value and frequency, values descending.
    pub fn iter_desc(&self) -> impl Iterator<Item = (i64, &BigUint)> {
        self.counts.iter().rev().map(|(v, f)| (*v, f))
    }

    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }

    /// Σ value^j · frequency.
    pub fn power_sum(&self, j: u32) -> BigInt {
        self.counts
            .iter()
            .map(|(v, f)| BigInt::from(*v).pow(j) * BigInt::from(f.clone()))
            .sum()
    }

    pub fn same_table(&self, other: &ValueDistribution) -> bool {
        self.counts == other.counts
    }
}

/// Per-scan options.
#[derive(Clone)]
pub struct ScanOptions {
    pub threads: usize,
    /// Also check rank, discriminant and residue profile of every form.
    pub lemma_checks: bool,
    /// Reuse one scan per orbit of w under t -> t^{p^{2k}+1}.
    pub orbit_reduction: bool,
    pub force: bool,
    /// Called with (finished w count, total w count).
    pub progress: Option<Arc<dyn Fn(usize, usize) + Send + Sync>>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            threads: 1,
            lemma_checks: false,
            orbit_reduction: false,
            force: false,
            progress: None,
        }
    }
}

/// All per-w distributions for one (p, m, k).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanOutput {
    pub p: u32,
    pub m: u32,
    pub k: u32,
    pub modulus: String,
    /// Indexed by the dense index of w.
    pub per_w: Vec<ValueDistribution>,
    pub tally: Option<FormScanTally>,
}

/// Precomputed trace tables shared by every w of a scan.
struct ScanKernel<'a> {
    field: &'a ExtensionField,
    k: u32,
    q: usize,
    p: u8,
    /// [u][x] = Tr(u x^2), dense indices
    sq: Vec<u8>,
    /// [v][x] = Tr(v x^{d1})
    d1: Vec<u8>,
    /// [w][x] = Tr(w x^{d2})
    d2: Vec<u8>,
    gram: Option<GramParts>,
}

struct GramParts {
    m: usize,
    u: Vec<u8>,
    v: Vec<u8>,
    w: Vec<u8>,
    /// predicted profiles indexed by rank * 3 + (disc + 1)
    predicted: Vec<Option<Vec<u64>>>,
}

impl<'a> ScanKernel<'a> {
    fn new(field: &'a ExtensionField, k: u32, lemma_checks: bool) -> Result<Self, CharSumError> {
        let p = field.p();
        if p >= 128 {
            return Err(CharSumError::UnsupportedPrime(p));
        }
        let q = field.size() as usize;
        let n = field.order() as u64;
        let e = FormExponents::new(field, k);
        let tr = field.trace_by_log();
        let table = |exp: u64| {
            let mut t = vec![0u8; q * q];
            for c in 1..q {
                let lc = (c - 1) as u64;
                let row = &mut t[c * q..(c + 1) * q];
                for (x, slot) in row.iter_mut().enumerate().skip(1) {
                    let lx = (x - 1) as u64;
                    *slot = tr[((lc + lx * exp) % n) as usize] as u8;
                }
            }
            t
        };
        let gram = lemma_checks.then(|| {
            let m = field.m() as usize;
            let basis = polynomial_basis(field);
            let z = FieldElement::ZERO;
            let parts = |slot: usize| {
                let mut out = Vec::with_capacity(q * m * m);
                for c in field.elements() {
                    let mut coeffs = [z; 3];
                    coeffs[slot] = c;
                    let [u, v, w] = coeffs;
                    let g = gram_matrix(field, &FormParams::new(u, v, w, k), &basis)
                        .expect("polynomial basis is independent");
                    out.extend(g.entries().iter().map(|&a| a as u8));
                }
                out
            };
            let mut predicted = vec![None; (m + 1) * 3];
            for r in 0..=m {
                for disc in [-1i8, 0, 1] {
                    if let Ok(prof) = lemma21_predict(r, disc, field.prime(), field.m()) {
                        predicted[r * 3 + (disc + 1) as usize] = Some(prof.counts().to_vec());
                    }
                }
            }
            GramParts {
                m,
                u: parts(0),
                v: parts(1),
                w: parts(2),
                predicted,
            }
        });
        Ok(Self {
            field,
            k,
            q,
            p: p as u8,
            sq: table(2),
            d1: table(e.d1),
            d2: table(e.d2),
            gram,
        })
    }

    fn scan_w(&self, w: usize) -> (ValueDistribution, Option<FormScanTally>) {
        let (q, p) = (self.q, self.p);
        let prime = self.field.prime();
        let m = self.field.m();
        let sw = &self.d2[w * q..(w + 1) * q];
        let mut base = vec![0u8; q];
        let mut zero_hist = vec![0u64; q + 1];
        let mut counts = vec![0u64; p as usize];
        let mut tally = self.gram.as_ref().map(|_| FormScanTally::default());
        let mut work = Vec::new();
        let mut work_alt = Vec::new();
        let mut diag = Vec::new();
        for u in 0..q {
            let su = &self.sq[u * q..(u + 1) * q];
            for ((b, &x), &y) in base.iter_mut().zip(su).zip(sw) {
                let s = x + y;
                *b = if s >= p { s - p } else { s };
            }
            for v in 0..q {
                let row = &self.d1[v * q..(v + 1) * q];
                let zeros = count_residue(&base, row, 0, p);
                zero_hist[zeros as usize] += 1;
                if let (Some(parts), Some(tally)) = (&self.gram, tally.as_mut()) {
                    counts[0] = zeros as u64;
                    let mut rest = q as u64 - zeros as u64;
                    for t in 1..p - 1 {
                        let c = count_residue(&base, row, t, p) as u64;
                        counts[t as usize] = c;
                        rest -= c;
                    }
                    counts[p as usize - 1] = rest;
                    check_form(
                        parts, prime, m, [u, v, w], &counts, tally, &mut work, &mut work_alt,
                        &mut diag,
                    );
                }
            }
        }
        let mut dist = ValueDistribution::new(self.field.p(), m, self.k, Scope::FixedW(w));
        for (zeros, &freq) in zero_hist.iter().enumerate() {
            dist.add(p as i64 * zeros as i64 - q as i64, freq);
        }
        (dist, tally)
    }
}

#[inline]
fn count_residue(base: &[u8], row: &[u8], t: u8, p: u8) -> u32 {
    let t2 = t + p;
    base.iter()
        .zip(row)
        .map(|(&a, &b)| {
            let s = a + b;
            (s == t) as u32 + (s == t2) as u32
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn check_form(
    parts: &GramParts,
    prime: &PrimeField,
    m: u32,
    [u, v, w]: [usize; 3],
    counts: &[u64],
    tally: &mut FormScanTally,
    work: &mut Vec<u32>,
    work_alt: &mut Vec<u32>,
    diag: &mut Vec<u32>,
) {
    let mm = parts.m * parts.m;
    let p = prime.p();
    work.clear();
    work.extend(
        parts.u[u * mm..(u + 1) * mm]
            .iter()
            .zip(&parts.v[v * mm..(v + 1) * mm])
            .zip(&parts.w[w * mm..(w + 1) * mm])
            .map(|((&a, &b), &c)| (a as u32 + b as u32 + c as u32) % p),
    );
    work_alt.clear();
    work_alt.extend_from_slice(work);
    let (rank, disc) = diagonalize_in_place(work, parts.m, prime, PivotStrategy::FirstFound, diag);
    let (rank_alt, disc_alt) =
        diagonalize_in_place(work_alt, parts.m, prime, PivotStrategy::LastFound, diag);

    tally.forms += 1;
    *tally.rank_histogram.entry(rank).or_default() += 1;
    let nonzero = (u, v, w) != (0, 0, 0);
    if nonzero && rank + 4 < m as usize {
        tally.rank_floor_violations += 1;
    }
    if (rank, disc) != (rank_alt, disc_alt) {
        tally.pivot_disagreements += 1;
    }
    let predicted = &parts.predicted[rank * 3 + (disc + 1) as usize];
    if predicted.as_deref() != Some(counts) {
        tally.profile_mismatches += 1;
    }
    let size = counts.iter().sum::<u64>() as i64;
    let twisted = p as i64 * counts[0] as i64 - size;
    if !lemma22_consistent(twisted, rank, p, m) {
        tally.parity_violations += 1;
    }
    *tally.twisted_sums.entry(twisted).or_default() += 1;
}

/// Number of form evaluations a scan will perform.
pub fn scan_cost(field: &ExtensionField, k: u32, orbit_reduction: bool) -> u128 {
    let q = field.size() as u128;
    let ws = if orbit_reduction {
        orbit_representatives(field, k).len() as u128
    } else {
        q
    };
    ws * q * q * q
}

/// Distribution of D(u, v, w) over all (u, v) at one fixed w.
pub fn scan_fixed_w(
    field: &ExtensionField,
    k: u32,
    w: FieldElement,
) -> Result<ValueDistribution, CharSumError> {
    let kernel = ScanKernel::new(field, k, false)?;
    Ok(kernel.scan_w(field.index_of(w)).0)
}

/// Representatives of the orbits of F* under multiplication by t^{d2}, plus
/// ZERO, as dense indices; `rep_of[i]` maps every dense index to its
/// representative.
fn orbit_map(field: &ExtensionField, k: u32) -> (Vec<usize>, Vec<usize>) {
    let n = field.order() as u64;
    let d2 = FormExponents::new(field, k).d2;
    let g = gcd(d2, n) as usize;
    let reps: Vec<usize> = std::iter::once(0).chain((0..g).map(|i| i + 1)).collect();
    let rep_of = (0..field.size() as usize)
        .map(|i| if i == 0 { 0 } else { (i - 1) % g + 1 })
        .collect();
    (reps, rep_of)
}

fn orbit_representatives(field: &ExtensionField, k: u32) -> Vec<usize> {
    orbit_map(field, k).0
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exhaustive scan of D(u, v, w) for every w. Results do not depend on the
/// worker count.
pub fn scan_all(field: &ExtensionField, k: u32, options: &ScanOptions) -> Result<ScanOutput, CharSumError> {
    let cost = scan_cost(field, k, options.orbit_reduction);
    if cost > SCAN_BUDGET as u128 && !options.force {
        return Err(CharSumError::BudgetExceeded {
            evaluations: cost,
            budget: SCAN_BUDGET,
        });
    }
    let kernel = ScanKernel::new(field, k, options.lemma_checks)?;
    let q = field.size() as usize;
    let (targets, rep_of): (Vec<usize>, Option<Vec<usize>>) = if options.orbit_reduction {
        let (reps, rep_of) = orbit_map(field, k);
        (reps, Some(rep_of))
    } else {
        ((0..q).collect(), None)
    };
    let done = AtomicUsize::new(0);
    let total = targets.len();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads.max(1))
        .build()
        .map_err(|e| CharSumError::IdentityViolation(format!("thread pool: {e}")))?;
    let results: Vec<(ValueDistribution, Option<FormScanTally>)> = pool.install(|| {
        targets
            .par_iter()
            .map(|&w| {
                let r = kernel.scan_w(w);
                let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
                if let Some(cb) = &options.progress {
                    cb(finished, total);
                }
                r
            })
            .collect()
    });
    let mut tally = options.lemma_checks.then(FormScanTally::default);
    let mut scanned = BTreeMap::new();
    for (&w, (dist, t)) in targets.iter().zip(results) {
        if let (Some(acc), Some(t)) = (tally.as_mut(), t) {
            acc.merge(&t);
        }
        scanned.insert(w, dist);
    }
    let per_w = (0..q)
        .map(|w| {
            let src = rep_of.as_ref().map_or(w, |r| r[w]);
            let mut d = scanned[&src].clone();
            d.scope = Scope::FixedW(w);
            d
        })
        .collect();
    Ok(ScanOutput {
        p: field.p(),
        m: field.m(),
        k,
        modulus: field.modulus().to_string(),
        per_w,
        tally,
    })
}

impl ScanOutput {
    /// Every nonzero w yields the same distribution.
    pub fn w_independent(&self) -> bool {
        self.per_w[1..].windows(2).all(|pair| pair[0].same_table(&pair[1]))
    }

    pub fn header(&self) -> String {
        cache_header(self.p, self.m, self.k, &self.modulus)
    }

    /// Cache text: header line, then "w_index,value,frequency" rows with w
    /// ascending and value descending.
    pub fn to_cache_text(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for (w, dist) in self.per_w.iter().enumerate() {
            for (value, freq) in dist.iter_desc() {
                writeln!(out, "{w},{value},{freq}").unwrap();
            }
        }
        out
    }

    pub fn write_cache(&self, path: &Path) -> Result<(), CharSumError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| CharSumError::CacheWriteFailure(e.to_string()))?;
        }
        std::fs::write(path, self.to_cache_text())
            .map_err(|e| CharSumError::CacheWriteFailure(format!("{}: {e}", path.display())))
    }

    /// Parses cache text, rejecting it unless the header matches the field and k.
    pub fn from_cache_text(text: &str, field: &ExtensionField, k: u32) -> Result<Self, CharSumError> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        let expected = cache_header(field.p(), field.m(), k, &field.modulus().to_string());
        if header != expected {
            return Err(CharSumError::CacheMismatch {
                expected,
                found: header.to_string(),
            });
        }
        let q = field.size() as usize;
        let mut per_w: Vec<ValueDistribution> = (0..q)
            .map(|w| ValueDistribution::new(field.p(), field.m(), k, Scope::FixedW(w)))
            .collect();
        for line in lines.filter(|l| !l.is_empty()) {
            let bad = || CharSumError::CacheFormat(line.to_string());
            let mut parts = line.split(',');
            let w: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let value: i64 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let freq: BigUint = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            if parts.next().is_some() || w >= q {
                return Err(bad());
            }
            per_w[w].add(value, freq);
        }
        let expected_mass = BigUint::from(q as u64 * q as u64);
        if let Some(w) = per_w.iter().position(|d| d.total() != expected_mass) {
            return Err(CharSumError::CacheFormat(format!("w index {w} has wrong total mass")));
        }
        Ok(Self {
            p: field.p(),
            m: field.m(),
            k,
            modulus: field.modulus().to_string(),
            per_w,
            tally: None,
        })
    }

    pub fn read_cache(path: &Path, field: &ExtensionField, k: u32) -> Result<Self, CharSumError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CharSumError::CacheFormat(format!("{}: {e}", path.display())))?;
        Self::from_cache_text(&text, field, k)
    }
}

pub fn cache_header(p: u32, m: u32, k: u32, modulus: &str) -> String {
    format!("{CACHE_MAGIC} p={p} m={m} k={k} poly={modulus} scope=all")
}

/// Power sums Σ D^j over (u, v) at a fixed nonzero w, against their expected
/// values from the solution counts N_2, N_3, N_4.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentReport {
    pub power_sums: [BigInt; 4],
    pub expected: [BigInt; 4],
    /// The second moment as (p-1)^2 p^{2m}, the value without the extra p^m
    /// contributed by N_2.
    pub second_moment_short_form: BigInt,
}

impl MomentReport {
    pub fn passed(&self) -> [bool; 4] {
        std::array::from_fn(|j| self.power_sums[j] == self.expected[j])
    }

    pub fn check(&self) -> Result<(), CharSumError> {
        match self.passed().iter().position(|ok| !ok) {
            None => Ok(()),
            Some(j) => Err(CharSumError::IdentityViolation(format!(
                "moment {}: sum {} != expected {}",
                j + 1,
                self.power_sums[j],
                self.expected[j]
            ))),
        }
    }
}

pub fn moments(dist: &ValueDistribution, p: u32, m: u32) -> MomentReport {
    let pb = BigInt::from(p);
    let p2m = pb.pow(2 * m);
    let counts = syscount::closed_forms(p, m);
    let expected = [
        (&pb - 1u32) * &p2m,
        &p2m * BigInt::from(counts.n2),
        &p2m * BigInt::from(counts.n3),
        &p2m * BigInt::from(counts.n4),
    ];
    MomentReport {
        power_sums: std::array::from_fn(|j| dist.power_sum(j as u32 + 1)),
        expected,
        second_moment_short_form: (&pb - 1u32).pow(2) * &p2m,
    }
}

/// Distribution of S (or T) over all five-tuples, by convolving each per-c
/// distribution with itself: (a1,a2) -> (a1+a2, a1-a2) and
/// (b1,b2) -> (b1+b2, ±(b1-b2)) are bijections for odd p.
pub fn s_distribution_oracle(scan: &ScanOutput) -> ValueDistribution {
    let mut out = ValueDistribution::new(scan.p, scan.m, scan.k, Scope::Tuples(SumKind::for_k(scan.k)));
    for dist in &scan.per_w {
        for (v1, f1) in dist.table() {
            for (v2, f2) in dist.table() {
                out.add(v1 + v2, f1 * f2);
            }
        }
    }
    out
}

/// Outcome of checking both readings of T against the literal sum.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TReadingCheck {
    pub samples: usize,
    pub derived_agree: usize,
    pub alternative_agree: usize,
}

/// Compares T and its alternative reading with [`literal_sum`] on the given
/// tuples (k odd).
pub fn check_t_readings(field: &ExtensionField, k: u32, tuples: &[MessageTuple]) -> Result<TReadingCheck, CharSumError> {
    let mut out = TReadingCheck {
        samples: tuples.len(),
        ..Default::default()
    };
    for t in tuples {
        let literal = literal_sum(field, k, t)?;
        out.derived_agree += (t_sum(field, k, t)? == literal) as usize;
        out.alternative_agree += (t_sum_alternative_reading(field, k, t) == literal) as usize;
    }
    Ok(out)
}

/// Frequency as u64 when it fits.
pub fn freq_u64(f: &BigUint) -> Option<u64> {
    f.to_u64()
}
