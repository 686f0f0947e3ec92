//! Solution counts N_2, N_3, N_4 of the diagonal systems
//!
//!   Σ_i y_i x_i^2 = 0,  Σ_i y_i x_i^{d1} = 0  [,  Σ_i y_i x_i^{d2} = 0]
//!
//! over (x_i, y_i) ∈ F_{p^m} × F_p*.
//!
//! Enumeration is exact: every term (y x^2, y x^{d1}, y x^{d2}) is tabulated
//! once, and a j-variable count is the number of j-tuples of terms summing to
//! zero, collected by matching partial sums against negated partial sums.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::charsum::ValueDistribution;
use crate::field::{ExtensionField, FieldElement};
use crate::quadform::FormExponents;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SysCountError {
    #[error("{name} = {actual} but the closed form gives {expected}")]
    MismatchWithClosedForm {
        name: String,
        actual: BigUint,
        expected: BigUint,
    },
    #[error("moment sum {sum} is not divisible by {divisor}")]
    NonIntegralDivision { sum: BigInt, divisor: BigUint },
    #[error("{vars}-variable counts differ: {two_eq} with two equations, {three_eq} with three")]
    EquivalenceViolation { vars: usize, two_eq: u64, three_eq: u64 },
    #[error("arity must be 2, 3 or 4, got {0}")]
    InvalidArity(usize),
    #[error("field of size {0} is too large to enumerate")]
    TooLarge(u32),
}

/// Closed forms N_2 = (p-1)^2 p^m, N_3 = (p-1)^3 (p^{m+1} + p^m - p),
/// N_4 = p^m (p^{m+1} + p^m - p) (p-1)^4.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormN {
    pub n2: BigUint,
    pub n3: BigUint,
    pub n4: BigUint,
}

pub fn closed_forms(p: u32, m: u32) -> ClosedFormN {
    let p = BigUint::from(p);
    let pm = p.pow(m);
    let q1 = &p - 1u32;
    let bracket = &pm * &p + &pm - &p;
    ClosedFormN {
        n2: q1.pow(2) * &pm,
        n3: q1.pow(3) * &bracket,
        n4: &pm * &bracket * q1.pow(4),
    }
}

impl ClosedFormN {
    pub fn get(&self, vars: usize) -> Option<&BigUint> {
        match vars {
            2 => Some(&self.n2),
            3 => Some(&self.n3),
            4 => Some(&self.n4),
            _ => None,
        }
    }
}

/// Multiset of term vectors, keyed by packed dense indices.
type TermCounts = HashMap<u64, u64>;

const KEY_BITS: u32 = 21;

struct Terms<'a> {
    field: &'a ExtensionField,
    equations: usize,
}

impl Terms<'_> {
    fn pack(&self, parts: &[FieldElement]) -> u64 {
        parts
            .iter()
            .enumerate()
            .map(|(i, &e)| (self.field.index_of(e) as u64) << (KEY_BITS * i as u32))
            .sum()
    }

    fn unpack(&self, key: u64) -> Vec<FieldElement> {
        let mask = (1u64 << KEY_BITS) - 1;
        (0..self.equations)
            .map(|i| self.field.element_at(((key >> (KEY_BITS * i as u32)) & mask) as usize))
            .collect()
    }

    fn combine(&self, a: u64, b: u64) -> u64 {
        let (a, b) = (self.unpack(a), self.unpack(b));
        let sum: Vec<_> = a.iter().zip(&b).map(|(&x, &y)| self.field.add(x, y)).collect();
        self.pack(&sum)
    }

    fn negate(&self, a: u64) -> u64 {
        let neg: Vec<_> = self.unpack(a).iter().map(|&x| self.field.neg(x)).collect();
        self.pack(&neg)
    }

    /// Multiset of (y x^2, y x^{d1} [, y x^{d2}]) over x ∈ F, y ∈ F_p*.
    fn singles(&self, k: u32) -> TermCounts {
        let f = self.field;
        let e = FormExponents::new(f, k);
        let mut out = TermCounts::new();
        for y in 1..f.p() {
            let yy = f.from_prime(y);
            for x in f.elements() {
                let exps = [2, e.d1, e.d2];
                let parts: Vec<_> = exps[..self.equations]
                    .iter()
                    .map(|&d| f.mul(yy, f.pow(x, d)))
                    .collect();
                *out.entry(self.pack(&parts)).or_default() += 1;
            }
        }
        out
    }

    fn convolve(&self, a: &TermCounts, b: &TermCounts) -> TermCounts {
        let mut out = TermCounts::new();
        for (&ka, &ca) in a {
            for (&kb, &cb) in b {
                *out.entry(self.combine(ka, kb)).or_default() += ca * cb;
            }
        }
        out
    }

    /// Number of pairs (s, t) from a × b with s + t = 0.
    fn matching(&self, a: &TermCounts, b: &TermCounts) -> u64 {
        a.iter()
            .map(|(&ka, &ca)| ca * b.get(&self.negate(ka)).copied().unwrap_or(0))
            .sum()
    }
}

/// Exact number of solutions with `vars` unknown pairs (x_i, y_i) and
/// `equations` ∈ {2, 3} equations.
pub fn enumerate_count(
    field: &ExtensionField,
    k: u32,
    vars: usize,
    equations: usize,
) -> Result<u64, SysCountError> {
    if field.size() >= 1 << KEY_BITS {
        return Err(SysCountError::TooLarge(field.size()));
    }
    assert!(equations == 2 || equations == 3, "two or three equations");
    let t = Terms { field, equations };
    let one = t.singles(k);
    match vars {
        2 => Ok(t.matching(&one, &one)),
        3 => Ok(t.matching(&t.convolve(&one, &one), &one)),
        4 => {
            let two = t.convolve(&one, &one);
            Ok(t.matching(&two, &two))
        }
        _ => Err(SysCountError::InvalidArity(vars)),
    }
}

fn checked(name: &str, actual: u64, expected: &BigUint) -> Result<BigUint, SysCountError> {
    let actual = BigUint::from(actual);
    if &actual == expected {
        Ok(actual)
    } else {
        Err(SysCountError::MismatchWithClosedForm {
            name: name.into(),
            actual,
            expected: expected.clone(),
        })
    }
}

/// N_2 by enumeration, checked against (p-1)^2 p^m.
pub fn count_n2(field: &ExtensionField, k: u32) -> Result<BigUint, SysCountError> {
    let n = enumerate_count(field, k, 2, 2)?;
    checked("N2", n, &closed_forms(field.p(), field.m()).n2)
}

/// N_3 by enumeration, checked against (p-1)^3 (p^{m+1} + p^m - p).
pub fn count_n3(field: &ExtensionField, k: u32) -> Result<BigUint, SysCountError> {
    let n = enumerate_count(field, k, 3, 2)?;
    checked("N3", n, &closed_forms(field.p(), field.m()).n3)
}

/// N_j = p^{-2m} Σ_{(u,v)} D(u,v,0)^j from a w = 0 distribution, with exact
/// division asserted.
pub fn moment_derived(dist: &ValueDistribution, j: u32) -> Result<BigUint, SysCountError> {
    let sum = dist.power_sum(j);
    let divisor = BigUint::from(dist.p).pow(2 * dist.m);
    let d = BigInt::from(divisor.clone());
    let (quot, rem) = (&sum / &d, &sum % &d);
    if !rem.is_zero() || quot.is_negative() {
        return Err(SysCountError::NonIntegralDivision { sum, divisor });
    }
    Ok(quot.magnitude().clone())
}

/// N_4 from the fourth moment of the w = 0 distribution, checked against the
/// closed form.
pub fn count_n4(dist: &ValueDistribution) -> Result<BigUint, SysCountError> {
    let n = moment_derived(dist, 4)?;
    let expected = closed_forms(dist.p, dist.m).n4;
    if n == expected {
        Ok(n)
    } else {
        Err(SysCountError::MismatchWithClosedForm {
            name: "N4".into(),
            actual: n,
            expected,
        })
    }
}

/// The two-equation and three-equation systems with `vars` unknown pairs have
/// the same number of solutions.
pub fn equivalence_check(field: &ExtensionField, k: u32, vars: usize) -> Result<bool, SysCountError> {
    if !(2..=3).contains(&vars) {
        return Err(SysCountError::InvalidArity(vars));
    }
    let two_eq = enumerate_count(field, k, vars, 2)?;
    let three_eq = enumerate_count(field, k, vars, 3)?;
    if two_eq == three_eq {
        Ok(true)
    } else {
        Err(SysCountError::EquivalenceViolation { vars, two_eq, three_eq })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    Enumeration,
    MomentDerived,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountEntry {
    pub name: String,
    pub method: CountMethod,
    pub value: BigUint,
    pub expected: BigUint,
}

impl CountEntry {
    pub fn passed(&self) -> bool {
        self.value == self.expected
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemCountReport {
    pub p: u32,
    pub m: u32,
    pub k: u32,
    pub entries: Vec<CountEntry>,
    /// (vars, two-equation count, three-equation count)
    pub equivalence: Vec<(usize, u64, u64)>,
}

impl SystemCountReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(CountEntry::passed)
            && self.equivalence.iter().all(|(_, a, b)| a == b)
    }
}

/// Every count by every available method. `w0` is the w = 0 distribution.
pub fn system_report(field: &ExtensionField, k: u32, w0: &ValueDistribution) -> Result<SystemCountReport, SysCountError> {
    let closed = closed_forms(field.p(), field.m());
    let mut entries = Vec::new();
    for vars in 2..=4usize {
        let expected = closed.get(vars).unwrap().clone();
        let name = format!("N{vars}");
        entries.push(CountEntry {
            name: name.clone(),
            method: CountMethod::Enumeration,
            value: enumerate_count(field, k, vars, 2)?.into(),
            expected: expected.clone(),
        });
        entries.push(CountEntry {
            name,
            method: CountMethod::MomentDerived,
            value: moment_derived(w0, vars as u32)?,
            expected,
        });
    }
    let equivalence = (2..=3)
        .map(|vars| Ok((vars, enumerate_count(field, k, vars, 2)?, enumerate_count(field, k, vars, 3)?)))
        .collect::<Result<_, SysCountError>>()?;
    Ok(SystemCountReport {
        p: field.p(),
        m: field.m(),
        k,
        entries,
        equivalence,
    })
}
