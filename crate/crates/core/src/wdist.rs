//! Closed-form value counts, the seventeen-row S table, the weight
//! distribution derived from it, and reconciliation against scan oracles.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::charsum::{Scope, TReadingCheck, ValueDistribution};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WdistError {
    #[error("InvalidParameters: {0}")]
    InvalidParameters(String),
    #[error("closed form {0} is not an integer")]
    InexactDivision(&'static str),
    #[error("MassMismatch: total {actual}, expected {expected}")]
    MassMismatch { actual: BigUint, expected: BigUint },
    #[error("DivisibilityFailure: S = {0} is not divisible by 2p")]
    DivisibilityFailure(i64),
    #[error("RangeViolation: weight {0} outside [0, p^m - 1]")]
    RangeViolation(i64),
    #[error("weight table invariant failed: {0}")]
    InvariantViolation(String),
    #[error("value {0} does not fit in 64 bits")]
    Overflow(BigInt),
    #[error("malformed weight CSV: {0}")]
    ParseCsv(String),
}

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

fn exact_div(a: BigInt, b: &BigInt, what: &'static str) -> Result<BigInt, WdistError> {
    if (&a % b).is_zero() {
        Ok(a / b)
    } else {
        Err(WdistError::InexactDivision(what))
    }
}

fn to_biguint(a: BigInt, what: &'static str) -> Result<BigUint, WdistError> {
    a.to_biguint().ok_or(WdistError::InexactDivision(what))
}

fn to_i64(a: &BigInt) -> Result<i64, WdistError> {
    a.to_i64().ok_or_else(|| WdistError::Overflow(a.clone()))
}

fn check_params(p: u32, m: u32) -> Result<(), WdistError> {
    if p < 3 || p % 2 == 0 || m < 5 || m % 2 == 0 {
        return Err(WdistError::InvalidParameters(format!(
            "need odd p >= 3 and odd m >= 5, got p = {p}, m = {m}"
        )));
    }
    Ok(())
}

/// Frequencies of D(u, v, 0) and of D(u, v, w) for fixed w != 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormCounts {
    pub p: u32,
    pub m: u32,
    pub n0: BigUint,
    pub n_plus: BigUint,
    pub n_minus: BigUint,
    pub n_plus_1: BigUint,
    pub n_minus_1: BigUint,
    pub n_plus_3: BigUint,
    pub n_minus_3: BigUint,
    pub n0_star: BigUint,
}

impl ClosedFormCounts {
    pub fn new(p: u32, m: u32) -> Result<Self, WdistError> {
        check_params(p, m)?;
        let pb = big(p as u64);
        let pw = |e: u32| pb.pow(e);
        let q = pw(m);
        let sh = pw((m - 1) / 2);
        let sh3 = pw((m - 3) / 2);
        let denom = 2 * (pw(2) - 1);
        let n_eps = |eps: i32| -> Result<BigUint, WdistError> {
            let v = (&q - 1) * (pw(m - 1) + eps * &sh);
            to_biguint(exact_div(v, &big(2), "n_eps")?, "n_eps")
        };
        let n_eps_1 = |eps: i32| -> Result<BigUint, WdistError> {
            let v = (pw(m + 2) - pw(m) - pw(m - 1) + 1) * (pw(m - 1) + eps * &sh);
            to_biguint(exact_div(v, &denom, "n_eps_1")?, "n_eps_1")
        };
        let n_eps_3 = |eps: i32| -> Result<BigUint, WdistError> {
            let v = (pw(m - 1) - 1) * (pw(m - 3) + eps * &sh3);
            to_biguint(exact_div(v, &denom, "n_eps_3")?, "n_eps_3")
        };
        let n0 = (&q - 1) * (&q - pw(m - 1) + 1);
        let n0_star = pw(2 * m) - pw(2 * m - 1) + pw(2 * m - 4) - pw(m - 3);
        Ok(Self {
            p,
            m,
            n0: to_biguint(n0, "n0")?,
            n_plus: n_eps(1)?,
            n_minus: n_eps(-1)?,
            n_plus_1: n_eps_1(1)?,
            n_minus_1: n_eps_1(-1)?,
            n_plus_3: n_eps_3(1)?,
            n_minus_3: n_eps_3(-1)?,
            n0_star: to_biguint(n0_star, "n0_star")?,
        })
    }

    fn p2m(&self) -> BigUint {
        BigUint::from(self.p).pow(2 * self.m)
    }

    /// n0 + n+ + n- + 1 = p^{2m}.
    pub fn w_zero_partition_holds(&self) -> bool {
        &self.n0 + &self.n_plus + &self.n_minus + 1u32 == self.p2m()
    }

    /// n0* + n_{±1,1} + n_{±1,3} = p^{2m}.
    pub fn w_nonzero_partition_holds(&self) -> bool {
        &self.n0_star + &self.n_plus_1 + &self.n_minus_1 + &self.n_plus_3 + &self.n_minus_3 == self.p2m()
    }

    /// Expected D distribution at w = 0.
    pub fn w_zero_distribution(&self, k: u32) -> ValueDistribution {
        let (p, m) = (self.p as i64, self.m);
        let h1 = (p - 1) * p.pow((m + 1) / 2);
        let mut d = ValueDistribution::new(self.p, m, k, Scope::ClosedForm);
        d.add((p - 1) * p.pow(m), 1u32);
        d.add(h1, self.n_plus.clone());
        d.add(-h1, self.n_minus.clone());
        d.add(0, self.n0.clone());
        d
    }

    /// Expected D distribution at any fixed w != 0.
    pub fn w_nonzero_distribution(&self, k: u32) -> ValueDistribution {
        let (p, m) = (self.p as i64, self.m);
        let h1 = (p - 1) * p.pow((m + 1) / 2);
        let h3 = (p - 1) * p.pow((m + 3) / 2);
        let mut d = ValueDistribution::new(self.p, m, k, Scope::ClosedForm);
        d.add(h1, self.n_plus_1.clone());
        d.add(-h1, self.n_minus_1.clone());
        d.add(h3, self.n_plus_3.clone());
        d.add(-h3, self.n_minus_3.clone());
        d.add(0, self.n0_star.clone());
        d
    }
}

/// One row of the S table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SRow {
    /// Symbolic S value, e.g. "(p-1)(p^m+p^((m+1)/2))".
    pub tag: &'static str,
    pub value: i64,
    pub frequency: BigUint,
    /// 2W as printed in the weight table for this row.
    pub printed_double_weight: i64,
    pub printed_weight_tag: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SValueTable {
    pub p: u32,
    pub m: u32,
    pub rows: Vec<SRow>,
}

impl SValueTable {
    pub fn total(&self) -> BigUint {
        self.rows.iter().map(|r| &r.frequency).sum()
    }

    /// Rows merged by integer value.
    pub fn distribution(&self, k: u32) -> ValueDistribution {
        let mut d = ValueDistribution::new(self.p, self.m, k, Scope::ClosedForm);
        for r in &self.rows {
            d.add(r.value, r.frequency.clone());
        }
        d
    }

    /// Tags of all rows with this value.
    pub fn tags_of(&self, value: i64) -> Vec<&'static str> {
        self.rows.iter().filter(|r| r.value == value).map(|r| r.tag).collect()
    }
}

/// The seventeen S values with their frequencies; total mass is asserted to
/// be p^{5m}.
pub fn s_table(p: u32, m: u32) -> Result<SValueTable, WdistError> {
    let c = ClosedFormCounts::new(p, m)?;
    let pb = big(p as u64);
    let q = pb.pow(m);
    let q1: BigInt = &q - 1u32;
    let pm1: BigInt = &pb - 1u32;
    let h1 = pb.pow((m + 1) / 2);
    let h3 = pb.pow((m + 3) / 2);
    let p1 = pb.pow(m - 1);
    let sh = pb.pow((m - 1) / 2);
    let [n0, n1, nm1, n11, nm11, n13, nm13, n0s] = [
        &c.n0, &c.n_plus, &c.n_minus, &c.n_plus_1, &c.n_minus_1, &c.n_plus_3, &c.n_minus_3, &c.n0_star,
    ]
    .map(|x| BigInt::from(x.clone()));

    let two = big(2);
    #[rustfmt::skip]
    let raw: Vec<(&'static str, BigInt, BigInt, &'static str, BigInt)> = vec![
        ("2(p-1)p^m", &two * &pm1 * &q, big(1),
            "0", big(0)),
        ("(p-1)p^m", &pm1 * &q, &two * &n0,
            "(1/2)(p-1)p^(m-1)", &pm1 * &p1),
        ("(p-1)(p^m-p^((m+1)/2))", &pm1 * (&q - &h1), &two * &nm1,
            "(1/2)(p-1)(p^(m-1)+p^((m-1)/2))", &pm1 * (&p1 + &sh)),
        ("(p-1)(p^m+p^((m+1)/2))", &pm1 * (&q + &h1), &two * &n1,
            "(1/2)(p-1)(p^(m-1)-p^((m+1)/2))", &pm1 * (&p1 - &h1)),
        ("(p-1)p^((m+1)/2)", &pm1 * &h1, &two * &n0 * &n1 + &two * &q1 * &n0s * &n11,
            "(p-1)(p^(m-1)-(1/2)p^((m-1)/2))", &pm1 * (&two * &p1 - &sh)),
        ("(p-1)p^((m+3)/2)", &pm1 * &h3, &two * &q1 * &n0s * &n13,
            "(p-1)(p^(m-1)-(1/2)p^((m+1)/2))", &pm1 * (&two * &p1 - &h1)),
        ("2(p-1)p^((m+1)/2)", &two * &pm1 * &h1, &n1 * &n1 + &q1 * &n11 * &n11,
            "(p-1)(p^(m-1)-p^((m-1)/2))", &two * &pm1 * (&p1 - &sh)),
        ("2(p-1)p^((m+3)/2)", &two * &pm1 * &h3, &q1 * &n13 * &n13,
            "(p-1)(p^(m-1)-p^((m+1)/2))", &two * &pm1 * (&p1 - &h1)),
        ("-(p-1)p^((m+1)/2)", -(&pm1 * &h1), &two * &n0 * &nm1 + &two * &q1 * &n0s * &nm11,
            "(p-1)(p^(m-1)+(1/2)p^((m-1)/2))", &pm1 * (&two * &p1 + &sh)),
        ("-(p-1)p^((m+3)/2)", -(&pm1 * &h3), &two * &q1 * &n0s * &nm13,
            "(p-1)(p^(m-1)+(1/2)p^((m+1)/2))", &pm1 * (&two * &p1 + &h1)),
        ("-2(p-1)p^((m+1)/2)", -(&two * &pm1 * &h1), &nm1 * &nm1 + &q1 * &nm11 * &nm11,
            "(p-1)(p^(m-1)+p^((m-1)/2))", &two * &pm1 * (&p1 + &sh)),
        ("-2(p-1)p^((m+3)/2)", -(&two * &pm1 * &h3), &q1 * &nm13 * &nm13,
            "(p-1)(p^(m-1)-p^((m+1)/2))", &two * &pm1 * (&p1 - &h1)),
        ("(p-1)(p^((m+1)/2)+p^((m+3)/2))", &pm1 * (&h1 + &h3), &two * &q1 * &n11 * &n13,
            "(p-1)(p^(m-1)-(1/2)p^((m-1)/2)-(1/2)p^((m+1)/2))", &pm1 * (&two * &p1 - &sh - &h1)),
        ("(p-1)(p^((m+1)/2)-p^((m+3)/2))", &pm1 * (&h1 - &h3), &two * &q1 * &n11 * &nm13,
            "(p-1)(p^(m-1)-(1/2)p^((m-1)/2)+(1/2)p^((m+1)/2))", &pm1 * (&two * &p1 - &sh + &h1)),
        ("(p-1)(-p^((m+1)/2)+p^((m+3)/2))", &pm1 * (&h3 - &h1), &two * &q1 * &nm11 * &n13,
            "(p-1)(p^(m-1)+(1/2)p^((m-1)/2)-(1/2)p^((m+1)/2))", &pm1 * (&two * &p1 + &sh - &h1)),
        ("(p-1)(-p^((m+1)/2)-p^((m+3)/2))", -(&pm1 * (&h1 + &h3)), &two * &q1 * &nm11 * &nm13,
            "(p-1)(p^(m-1)+(1/2)p^((m-1)/2)+(1/2)p^((m+1)/2))", &pm1 * (&two * &p1 + &sh + &h1)),
        ("0", big(0),
            &n0 * &n0 + &two * &n1 * &nm1 + &q1 * &n0s * &n0s + &two * &q1 * (&n11 * &nm11 + &n13 * &nm13),
            "(p-1)p^(m-1)", &two * &pm1 * &p1),
    ];
    let rows = raw
        .into_iter()
        .map(|(tag, value, freq, wtag, w2)| {
            Ok(SRow {
                tag,
                value: to_i64(&value)?,
                frequency: to_biguint(freq, "S-table frequency")?,
                printed_double_weight: to_i64(&w2)?,
                printed_weight_tag: wtag,
            })
        })
        .collect::<Result<Vec<_>, WdistError>>()?;
    let table = SValueTable { p, m, rows };
    let expected = BigUint::from(p).pow(5 * m);
    let actual = table.total();
    if actual != expected {
        return Err(WdistError::MassMismatch { actual, expected });
    }
    Ok(table)
}

/// W = p^m - p^{m-1} - S/(2p).
pub fn weight_map(s: i64, p: u32, m: u32) -> Result<i64, WdistError> {
    let p = p as i64;
    if s % (2 * p) != 0 {
        return Err(WdistError::DivisibilityFailure(s));
    }
    let q = p.pow(m);
    let w = q - q / p - s / (2 * p);
    if !(0..q).contains(&w) {
        return Err(WdistError::RangeViolation(w));
    }
    Ok(w)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightDistribution {
    pub p: u32,
    pub m: u32,
    pub k: u32,
    pub provenance: Provenance,
    /// weight -> frequency, ascending
    pub rows: BTreeMap<i64, BigUint>,
    /// weight -> S-value tags merged into it
    pub tags: BTreeMap<i64, Vec<String>>,
}

impl WeightDistribution {
    /// Applies the weight map to every value of an S distribution.
    pub fn from_s_distribution(
        s: &ValueDistribution,
        provenance: Provenance,
        tag_of: impl Fn(i64) -> Vec<String>,
    ) -> Result<Self, WdistError> {
        let mut rows: BTreeMap<i64, BigUint> = BTreeMap::new();
        let mut tags: BTreeMap<i64, Vec<String>> = BTreeMap::new();
        for (&value, freq) in s.table() {
            let w = weight_map(value, s.p, s.m)?;
            *rows.entry(w).or_default() += freq;
            tags.entry(w).or_default().extend(tag_of(value));
        }
        Ok(Self {
            p: s.p,
            m: s.m,
            k: s.k,
            provenance,
            rows,
            tags,
        })
    }

    pub fn frequency(&self, weight: i64) -> BigUint {
        self.rows.get(&weight).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> BigUint {
        self.rows.values().sum()
    }

    /// Σ w · A_w.
    pub fn first_moment(&self) -> BigUint {
        self.rows
            .iter()
            .map(|(&w, f)| BigUint::from(w as u64) * f)
            .sum()
    }

    /// A_0 = 1, Σ A_w = p^{5m}, Σ w A_w = (p^m-1)(p-1)p^{5m-1}, weights in [0, p^m-1].
    pub fn check_invariants(&self) -> Result<(), WdistError> {
        let p = BigUint::from(self.p);
        let q = p.pow(self.m);
        let fail = |s: String| Err(WdistError::InvariantViolation(s));
        if !self.frequency(0).is_one() {
            return fail(format!("A_0 = {}", self.frequency(0)));
        }
        if self.total() != p.pow(5 * self.m) {
            return fail(format!("total {} != p^(5m)", self.total()));
        }
        let expected = (&q - 1u32) * (&p - 1u32) * p.pow(5 * self.m - 1);
        if self.first_moment() != expected {
            return fail(format!("first moment {} != {expected}", self.first_moment()));
        }
        let max = q.to_i64().unwrap_or(i64::MAX) - 1;
        if let Some((&w, _)) = self.rows.iter().find(|(&w, _)| w < 0 || w > max) {
            return fail(format!("weight {w} out of range"));
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("weight,frequency\n");
        for (w, f) in &self.rows {
            writeln!(out, "{w},{f}").unwrap();
        }
        out
    }

    /// Parses "weight,frequency" rows back into a table.
    pub fn rows_from_csv(text: &str) -> Result<BTreeMap<i64, BigUint>, WdistError> {
        let mut lines = text.lines();
        if lines.next() != Some("weight,frequency") {
            return Err(WdistError::ParseCsv("missing header".into()));
        }
        let mut rows = BTreeMap::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let bad = || WdistError::ParseCsv(line.to_string());
            let (w, f) = line.split_once(',').ok_or_else(bad)?;
            let w: i64 = w.parse().map_err(|_| bad())?;
            let f: BigUint = f.parse().map_err(|_| bad())?;
            if rows.insert(w, f).is_some() {
                return Err(bad());
            }
        }
        Ok(rows)
    }

    pub fn to_json(&self, discrepancies: &[Discrepancy]) -> String {
        #[derive(Serialize)]
        struct Row {
            weight: i64,
            #[serde(serialize_with = "as_decimal")]
            frequency: BigUint,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            p: u32,
            m: u32,
            k: u32,
            kind: &'static str,
            rows: Vec<Row>,
            provenance: Provenance,
            discrepancies: &'a [Discrepancy],
        }
        let doc = Doc {
            p: self.p,
            m: self.m,
            k: self.k,
            kind: "weight-distribution",
            rows: self
                .rows
                .iter()
                .map(|(&weight, f)| Row {
                    weight,
                    frequency: f.clone(),
                })
                .collect(),
            provenance: self.provenance,
            discrepancies,
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }
}

pub fn as_decimal<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Weight distribution generated from the closed-form S table.
pub fn weight_table(p: u32, m: u32, k: u32) -> Result<WeightDistribution, WdistError> {
    let table = s_table(p, m)?;
    let wd = WeightDistribution::from_s_distribution(&table.distribution(k), Provenance::ClosedForm, |v| {
        table.tags_of(v).into_iter().map(String::from).collect()
    })?;
    wd.check_invariants()?;
    Ok(wd)
}

/// Smallest positive weight with nonzero frequency.
pub fn min_distance(wd: &WeightDistribution) -> Option<i64> {
    wd.rows
        .iter()
        .find(|(&w, f)| w > 0 && !f.is_zero())
        .map(|(&w, _)| w)
}

/// Minimum distance claimed in the main theorem: (1/2)(p-1)(p^{m-1} - p^{(m+1)/2}).
pub fn printed_min_distance(p: u32, m: u32) -> i64 {
    let p = p as i64;
    (p - 1) * (p.pow(m - 1) - p.pow((m + 1) / 2)) / 2
}

/// Evidence gathered from scans and sampled sums.
#[derive(Clone, Debug, Default)]
pub struct OracleEvidence {
    /// S (or T) distribution over all five-tuples.
    pub s_distribution: Option<ValueDistribution>,
    /// Σ D^2 over (u, v) at a fixed w != 0.
    pub second_moment: Option<BigInt>,
    /// Whether all nonzero-w scans agree.
    pub w_independent: Option<bool>,
    pub t_readings: Option<TReadingCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowComparison {
    pub value: i64,
    pub tags: Vec<String>,
    #[serde(serialize_with = "as_decimal")]
    pub closed: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub oracle: BigUint,
    pub matches: bool,
}

/// A printed statement that disagrees with the derivation, with the evidence
/// deciding it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub id: &'static str,
    pub printed: String,
    pub derived: String,
    pub evidence: String,
    /// true: evidence supports the derived reading; false: it supports the
    /// printed one; None: no evidence supplied.
    pub derived_confirmed: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinDistanceReport {
    pub printed_claim: i64,
    pub closed_form: Option<i64>,
    pub oracle: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReconciliationReport {
    pub p: u32,
    pub m: u32,
    pub k: u32,
    pub s_rows: Vec<RowComparison>,
    pub weight_rows: Vec<RowComparison>,
    pub discrepancies: Vec<Discrepancy>,
    pub min_distance: MinDistanceReport,
}

impl ReconciliationReport {
    /// Every closed-form row agrees with the oracle (vacuous without oracle).
    pub fn rows_match(&self) -> bool {
        self.s_rows.iter().chain(&self.weight_rows).all(|r| r.matches)
    }

    /// Rows agree and no evidence contradicts a derived reading.
    pub fn passed(&self) -> bool {
        self.rows_match() && self.discrepancies.iter().all(|d| d.derived_confirmed != Some(false))
    }

    pub fn failing_rows(&self) -> Vec<i64> {
        self.s_rows.iter().filter(|r| !r.matches).map(|r| r.value).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

fn compare_rows(
    closed: &BTreeMap<i64, BigUint>,
    oracle: &BTreeMap<i64, BigUint>,
    tags: impl Fn(i64) -> Vec<String>,
) -> Vec<RowComparison> {
    let values: std::collections::BTreeSet<i64> = closed.keys().chain(oracle.keys()).copied().collect();
    values
        .into_iter()
        .map(|v| {
            let c = closed.get(&v).cloned().unwrap_or_default();
            let o = oracle.get(&v).cloned().unwrap_or_default();
            RowComparison {
                value: v,
                tags: tags(v),
                matches: c == o,
                closed: c,
                oracle: o,
            }
        })
        .collect()
}

/// Compares the closed-form tables with oracle evidence and lists every
/// printed statement that the derivation corrects.
pub fn reconcile(p: u32, m: u32, k: u32, evidence: &OracleEvidence) -> Result<ReconciliationReport, WdistError> {
    let table = s_table(p, m)?;
    let closed_w = weight_table(p, m, k)?;
    let oracle_w = evidence
        .s_distribution
        .as_ref()
        .map(|s| WeightDistribution::from_s_distribution(s, Provenance::Oracle, |_| Vec::new()))
        .transpose()?;
    let tag_list = |v: i64| table.tags_of(v).into_iter().map(String::from).collect::<Vec<_>>();

    let (s_rows, weight_rows) = match (&evidence.s_distribution, &oracle_w) {
        (Some(s), Some(ow)) => (
            compare_rows(table.distribution(k).table(), s.table(), tag_list),
            compare_rows(&closed_w.rows, &ow.rows, |w| closed_w.tags.get(&w).cloned().unwrap_or_default()),
        ),
        _ => (Vec::new(), Vec::new()),
    };

    let pi = p as i64;
    let mut discrepancies = Vec::new();

    // Weight-table rows whose printed weight differs from the mapped one.
    for (id, tag) in [
        ("weight-row-2n1", "(p-1)(p^m+p^((m+1)/2))"),
        ("weight-row-n13-minus-squared", "-2(p-1)p^((m+3)/2)"),
    ] {
        let row = table.rows.iter().find(|r| r.tag == tag).expect("row exists");
        let derived = weight_map(row.value, p, m)?;
        let printed2 = row.printed_double_weight;
        let evidence_text;
        let confirmed = match &oracle_w {
            Some(ow) => {
                let at_derived = ow.frequency(derived);
                let printed_freq = if printed2 % 2 == 0 {
                    ow.frequency(printed2 / 2)
                } else {
                    BigUint::zero()
                };
                let printed_other = closed_w.frequency(printed2 / 2);
                evidence_text = format!(
                    "oracle frequency at derived weight {derived}: {at_derived}; at printed weight {}: {printed_freq}",
                    printed2 as f64 / 2.0
                );
                Some(at_derived >= row.frequency && (printed_freq.is_zero() || printed_freq == printed_other))
            }
            None => {
                evidence_text = "weight map applied to the S row".into();
                None
            }
        };
        discrepancies.push(Discrepancy {
            id,
            printed: format!("{} = {}", row.printed_weight_tag, printed2 as f64 / 2.0),
            derived: format!("{derived} (weight map of S = {})", row.tag),
            evidence: evidence_text,
            derived_confirmed: confirmed,
        });
    }

    // Second moment.
    let pb = BigInt::from(p);
    let pm1: BigInt = &pb - 1u32;
    let printed_second = pm1.pow(2) * pb.pow(2 * m);
    let derived_second = pm1.pow(2) * pb.pow(3 * m);
    discrepancies.push(Discrepancy {
        id: "second-moment",
        printed: format!("(p-1)^2 p^(2m) = {printed_second}"),
        derived: format!("(p-1)^2 p^(3m) = {derived_second}"),
        evidence: match &evidence.second_moment {
            Some(s) => format!("scanned sum of D^2 at fixed w != 0: {s}"),
            None => "p^(2m) N_2 with N_2 = (p-1)^2 p^m".into(),
        },
        derived_confirmed: evidence.second_moment.as_ref().map(|s| *s == derived_second),
    });

    // The count n_{-1}^2 + (p^m-1) n_{-1,1}^2 belongs to S = -2(p-1)p^((m+1)/2).
    let h1 = (pi - 1) * pi.pow((m + 1) / 2);
    let neg_row = table.rows.iter().find(|r| r.tag == "-2(p-1)p^((m+1)/2)").unwrap();
    let pos_closed = table.distribution(k).frequency(2 * h1);
    discrepancies.push(Discrepancy {
        id: "proof-sign-of-n-minus-squared",
        printed: format!("S = 2(p-1)p^((m+1)/2) = {} for the count n_-1^2 + (p^m-1)n_-1,1^2", 2 * h1),
        derived: format!("S = -2(p-1)p^((m+1)/2) = {}", -2 * h1),
        evidence: match &evidence.s_distribution {
            Some(s) => format!(
                "oracle frequency at {}: {}; at {}: {}",
                2 * h1,
                s.frequency(2 * h1),
                -2 * h1,
                s.frequency(-2 * h1)
            ),
            None => "the count arises from D(u1,v1,c) = D(u2,v2,c) = -(p-1)p^((m+1)/2)".into(),
        },
        derived_confirmed: evidence
            .s_distribution
            .as_ref()
            .map(|s| s.frequency(2 * h1) == pos_closed && s.frequency(-2 * h1) >= neg_row.frequency),
    });

    // Minimum distance.
    let printed_d = printed_min_distance(p, m);
    let closed_d = min_distance(&closed_w);
    let oracle_d = oracle_w.as_ref().and_then(min_distance);
    discrepancies.push(Discrepancy {
        id: "minimum-distance",
        printed: format!("(1/2)(p-1)(p^(m-1)-p^((m+1)/2)) = {printed_d}"),
        derived: format!("{}", closed_d.map_or("none".into(), |d| d.to_string())),
        evidence: match oracle_d {
            Some(d) => format!("smallest nonzero weight in the oracle table: {d}"),
            None => "smallest nonzero weight of the generated table".into(),
        },
        derived_confirmed: oracle_d.map(|d| Some(d) == closed_d && d != printed_d),
    });

    // Wording of the w-independence claim.
    discrepancies.push(Discrepancy {
        id: "w-independence-wording",
        printed: "counts are dependent of the choice of w".into(),
        derived: "counts are independent of w != 0".into(),
        evidence: match evidence.w_independent {
            Some(b) => format!("all nonzero-w scans identical: {b}"),
            None => "not scanned".into(),
        },
        derived_confirmed: evidence.w_independent,
    });

    // The remark's formula for T.
    if let Some(t) = &evidence.t_readings {
        discrepancies.push(Discrepancy {
            id: "t-remark-first-argument",
            printed: "T = D(a1+a2, b1+b2, c) + D(a1+a2, -(b1-b2), c)".into(),
            derived: "T = D(a1+a2, b1+b2, c) + D(a1-a2, -(b1-b2), c)".into(),
            evidence: format!(
                "literal sum agreement on {} tuples: derived {}, printed {}",
                t.samples, t.derived_agree, t.alternative_agree
            ),
            derived_confirmed: Some(t.derived_agree == t.samples && t.alternative_agree < t.samples),
        });
    }

    Ok(ReconciliationReport {
        p,
        m,
        k,
        s_rows,
        weight_rows,
        discrepancies,
        min_distance: MinDistanceReport {
            printed_claim: printed_d,
            closed_form: closed_d,
            oracle: oracle_d,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn u(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn closed_form_counts_desk() {
        let c = ClosedFormCounts::new(3, 5).unwrap();
        assert_eq!((c.n0.clone(), c.n_plus.clone(), c.n_minus.clone()), (u(39446), u(10890), u(8712)));
        assert_eq!(
            [&c.n_plus_1, &c.n_minus_1, &c.n_plus_3, &c.n_minus_3, &c.n0_star].map(Clone::clone),
            [u(10485), u(8388), u(60), u(30), u(40086)]
        );
        assert!(c.w_zero_partition_holds());
        assert!(c.w_nonzero_partition_holds());
    }

    #[test]
    fn partitions_hold_beyond_desk_scale() {
        for (p, m) in [(3, 7), (3, 9), (5, 5), (7, 5), (5, 7), (11, 5)] {
            let c = ClosedFormCounts::new(p, m).unwrap();
            assert!(c.w_zero_partition_holds(), "{p},{m}");
            assert!(c.w_nonzero_partition_holds(), "{p},{m}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ClosedFormCounts::new(3, 4).is_err());
        assert!(ClosedFormCounts::new(3, 3).is_err());
        assert!(s_table(2, 5).is_err());
    }

    #[test]
    fn s_table_rows() {
        let t = s_table(3, 5).unwrap();
        assert_eq!(t.rows.len(), 17);
        assert_eq!(t.total(), u(847288609443));
        let d = t.distribution(2);
        assert_eq!(d.frequency(972), u(1));
        assert_eq!(d.frequency(486), u(78892));
        for (p, m) in [(3, 7), (5, 5)] {
            let t = s_table(p, m).unwrap();
            assert_eq!(t.total(), BigUint::from(p).pow(5 * m));
        }
    }

    #[test]
    fn weight_map_examples() {
        assert_eq!(weight_map(972, 3, 5).unwrap(), 0);
        assert_eq!(weight_map(486, 3, 5).unwrap(), 81);
        assert_eq!(weight_map(-324, 3, 5).unwrap(), 216);
        assert_eq!(weight_map(5, 3, 5), Err(WdistError::DivisibilityFailure(5)));
        assert_eq!(weight_map(-6000, 3, 5), Err(WdistError::RangeViolation(1162)));
    }

    #[test]
    fn weight_table_desk() {
        let wd = weight_table(3, 5, 1).unwrap();
        assert_eq!(wd.frequency(0), u(1));
        assert_eq!(wd.frequency(81), u(78892));
        assert_eq!(wd.total(), u(847288609443));
        assert_eq!(wd.first_moment(), u(242 * 2) * BigUint::from(3u32).pow(24));
        assert_eq!(min_distance(&wd), Some(72));
        assert_eq!(printed_min_distance(3, 5), 54);
        let weights: Vec<i64> = wd.rows.keys().copied().collect();
        assert_eq!(
            weights,
            vec![0, 72, 81, 90, 108, 126, 135, 144, 153, 162, 171, 180, 189, 198, 216]
        );
    }

    #[test]
    fn printed_weights_that_disagree() {
        for (p, m) in [(3, 5), (3, 7), (5, 5)] {
            let t = s_table(p, m).unwrap();
            let bad: Vec<&str> = t
                .rows
                .iter()
                .filter(|r| 2 * weight_map(r.value, p, m).unwrap() != r.printed_double_weight)
                .map(|r| r.tag)
                .collect();
            assert_eq!(bad, vec!["(p-1)(p^m+p^((m+1)/2))", "-2(p-1)p^((m+3)/2)"]);
        }
    }

    #[test]
    fn csv_round_trip() {
        let wd = weight_table(3, 5, 2).unwrap();
        let rows = WeightDistribution::rows_from_csv(&wd.to_csv()).unwrap();
        assert_eq!(rows, wd.rows);
        assert!(WeightDistribution::rows_from_csv("weight,frequency\n1,x\n").is_err());
        assert!(WeightDistribution::rows_from_csv("1,2\n").is_err());
    }

    #[test]
    fn json_document_shape() {
        let wd = weight_table(3, 5, 1).unwrap();
        let v: serde_json::Value = serde_json::from_str(&wd.to_json(&[])).unwrap();
        assert_eq!(v["kind"], "weight-distribution");
        assert_eq!(v["provenance"], "closed-form");
        assert_eq!(v["rows"][0]["frequency"], "1");
    }

    #[test]
    fn reconcile_closed_against_itself_and_tampered() {
        let good = s_table(3, 5).unwrap().distribution(2);
        let ev = OracleEvidence {
            s_distribution: Some(good.clone()),
            ..Default::default()
        };
        let r = reconcile(3, 5, 2, &ev).unwrap();
        assert!(r.rows_match());
        assert_eq!(r.min_distance.oracle, Some(72));
        let mut bad = good;
        bad.add(54, 3u32);
        let r = reconcile(3, 5, 2, &OracleEvidence { s_distribution: Some(bad), ..Default::default() }).unwrap();
        assert_eq!(r.failing_rows(), vec![54]);
    }

    #[test]
    fn reconcile_without_oracle_lists_discrepancies() {
        let r = reconcile(3, 5, 1, &OracleEvidence::default()).unwrap();
        let ids: Vec<&str> = r.discrepancies.iter().map(|d| d.id).collect();
        assert_eq!(
            ids,
            vec![
                "weight-row-2n1",
                "weight-row-n13-minus-squared",
                "second-moment",
                "proof-sign-of-n-minus-squared",
                "minimum-distance",
                "w-independence-wording"
            ]
        );
        assert!(r.passed());
    }

    proptest! {
        #[test]
        fn weight_map_inverts_affine_form(w in 0i64..243) {
            // S = 2p((p-1)p^(m-1) - W) maps back to W.
            let s = 6 * (162 - w);
            prop_assert_eq!(weight_map(s, 3, 5).unwrap(), w);
        }
    }
}
