//! The cyclic code C_(p,m,k) with five dual zeros, its trace-representation
//! codewords and the weight / character-sum bridge.

use std::fmt;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::charsum::weight_sum;
use crate::field::{pow_mod, ExtensionField, FieldElement, FieldError, Polynomial};

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("InvalidParameters: {0}")]
    InvalidParameters(String),
    #[error("DegenerateZeros: {0}")]
    DegenerateZeros(String),
    #[error("DivisibilityFailure: {value} is not divisible by {divisor}")]
    DivisibilityFailure { value: i64, divisor: i64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Message (a1, a2, b1, b2, c) indexing a codeword.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct MessageTuple {
    pub a1: FieldElement,
    pub a2: FieldElement,
    pub b1: FieldElement,
    pub b2: FieldElement,
    pub c: FieldElement,
}

impl MessageTuple {
    pub fn new(a1: FieldElement, a2: FieldElement, b1: FieldElement, b2: FieldElement, c: FieldElement) -> Self {
        Self { a1, a2, b1, b2, c }
    }

    pub fn zero() -> Self {
        let z = FieldElement::ZERO;
        Self::new(z, z, z, z, z)
    }

    pub fn from_array([a1, a2, b1, b2, c]: [FieldElement; 5]) -> Self {
        Self::new(a1, a2, b1, b2, c)
    }

    pub fn to_array(self) -> [FieldElement; 5] {
        [self.a1, self.a2, self.b1, self.b2, self.c]
    }

    /// Uniformly random tuple.
    pub fn random<R: Rng + ?Sized>(field: &ExtensionField, rng: &mut R) -> Self {
        let size = field.size() as usize;
        let mut pick = || field.element_at(rng.gen_range(0..size));
        Self::new(pick(), pick(), pick(), pick(), pick())
    }

    pub fn add(self, other: Self, field: &ExtensionField) -> Self {
        let (a, b) = (self.to_array(), other.to_array());
        Self::from_array(std::array::from_fn(|i| field.add(a[i], b[i])))
    }
}

/// A vector of n symbols of F_p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Codeword(pub Vec<u32>);

impl Codeword {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&c| c != 0).count()
    }

    /// Cyclic shift by one position: (c_{n-1}, c_0, ..., c_{n-2}).
    pub fn rotate(&self) -> Self {
        let mut v = self.0.clone();
        v.rotate_right(1);
        Self(v)
    }

    pub fn to_polynomial(&self, p: u32) -> Polynomial {
        Polynomial::new(p, self.0.clone())
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Hamming weight of a codeword.
pub fn weight(cw: &Codeword) -> usize {
    cw.weight()
}

/// Structural data of C_(p,m,k).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeSpec {
    pub p: u32,
    pub m: u32,
    pub k: u32,
    pub n: u64,
    /// Logs of γ_1..γ_5 = π, -π, π^{(p^k+1)/2}, -π^{(p^k+1)/2}, π^{(p^{2k}+1)/2}.
    pub zero_inverse_logs: [u64; 5],
    /// Minimal polynomials of γ_i^{-1}, in the order h_0, h_-0, h_1, h_-1, h_2.
    pub minimal_polys: [Polynomial; 5],
    pub h: Polynomial,
    pub g: Polynomial,
}

/// Serializable view: polynomials as ascending coefficient arrays.
#[derive(Serialize)]
struct CodeSpecDoc<'a> {
    p: u32,
    m: u32,
    k: u32,
    n: u64,
    dimension: u32,
    zero_inverse_logs: [u64; 5],
    minimal_polynomials: Vec<&'a [u32]>,
    h: &'a [u32],
    g: &'a [u32],
}

impl CodeSpec {
    pub fn dimension(&self) -> u32 {
        5 * self.m
    }

    pub fn to_json(&self) -> String {
        let doc = CodeSpecDoc {
            p: self.p,
            m: self.m,
            k: self.k,
            n: self.n,
            dimension: self.dimension(),
            zero_inverse_logs: self.zero_inverse_logs,
            minimal_polynomials: self.minimal_polys.iter().map(Polynomial::coeffs).collect(),
            h: self.h.coeffs(),
            g: self.g.coeffs(),
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }
}

/// (p^e + 1)/2 modulo n.
fn half_p_pow_plus_one(p: u32, e: u64, n: u64) -> u64 {
    let two_n = 2 * n;
    (pow_mod(p as u64, e, two_n) + 1) % two_n / 2 % n
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn validate_parameters(m: u32, k: u32) -> Result<(), CodeError> {
    if m < 5 || m % 2 == 0 {
        return Err(CodeError::InvalidParameters(format!("m = {m} must be odd and at least 5")));
    }
    if k == 0 || gcd(m, k) != 1 {
        return Err(CodeError::InvalidParameters(format!("k = {k} must be positive with gcd(m, k) = 1")));
    }
    Ok(())
}

/// A code together with the field it is defined over.
#[derive(Clone, Debug)]
pub struct Code {
    pub field: ExtensionField,
    pub spec: CodeSpec,
}

impl Code {
    pub fn build(p: u64, m: u32, k: u32) -> Result<Self, CodeError> {
        validate_parameters(m, k)?;
        let field = ExtensionField::new(p, m)?;
        Self::from_field(field, k)
    }

    pub fn from_field(field: ExtensionField, k: u32) -> Result<Self, CodeError> {
        let spec = build_code(&field, k)?;
        Ok(Self { field, spec })
    }

    fn gamma_logs(&self) -> &[u64; 5] {
        &self.spec.zero_inverse_logs
    }

    /// c_t = Tr(a1 γ_1^t + a2 γ_2^t + b1 γ_3^t + b2 γ_4^t + c γ_5^t), t = 0..n-1.
    pub fn codeword(&self, t: &MessageTuple) -> Codeword {
        let f = &self.field;
        let n = self.spec.n;
        let tr = f.trace_by_log();
        let p = f.p();
        let terms: Vec<(u64, u64)> = t
            .to_array()
            .iter()
            .zip(self.gamma_logs())
            .filter_map(|(a, &g)| a.log().map(|la| (la as u64, g)))
            .collect();
        Codeword(
            (0..n)
                .map(|i| {
                    terms
                        .iter()
                        .map(|&(la, g)| tr[((la + g * i) % n) as usize])
                        .sum::<u32>()
                        % p
                })
                .collect(),
        )
    }

    /// p^m - p^{m-1} - S/(2p), with S for even k and T for odd k.
    pub fn weight_via_charsum(&self, t: &MessageTuple) -> Result<i64, CodeError> {
        let s = weight_sum(&self.field, self.spec.k, t);
        weight_from_sum(s, self.field.p(), self.field.m())
    }

    /// Codeword polynomial is divisible by g.
    pub fn is_codeword(&self, cw: &Codeword) -> bool {
        cw.len() as u64 == self.spec.n
            && cw
                .to_polynomial(self.field.p())
                .rem(&self.spec.g)
                .expect("g is nonzero")
                .is_zero()
    }
}

/// p^m - p^{m-1} - s/(2p), failing when 2p does not divide s.
pub fn weight_from_sum(s: i64, p: u32, m: u32) -> Result<i64, CodeError> {
    crate::wdist::weight_map(s, p, m).map_err(|_| CodeError::DivisibilityFailure {
        value: s,
        divisor: 2 * p as i64,
    })
}

/// Builds the zeros, minimal polynomials, h and g for C_(p,m,k) over `field`.
pub fn build_code(field: &ExtensionField, k: u32) -> Result<CodeSpec, CodeError> {
    let (p, m) = (field.p(), field.m());
    validate_parameters(m, k)?;
    let n = field.order() as u64;
    let e1 = half_p_pow_plus_one(p, k as u64, n);
    let e2 = half_p_pow_plus_one(p, 2 * k as u64, n);
    let half = n / 2;
    let logs = [1, (1 + half) % n, e1, (e1 + half) % n, e2];
    let minimal_polys: [Polynomial; 5] = std::array::from_fn(|i| {
        let inverse = field.from_log(-(logs[i] as i64));
        field.minimal_poly(inverse)
    });
    for (i, f) in minimal_polys.iter().enumerate() {
        if f.degree() != Some(m as usize) || !f.is_monic() {
            return Err(CodeError::DegenerateZeros(format!(
                "minimal polynomial {i} is {f}, not monic of degree {m}"
            )));
        }
        if let Some(j) = (0..i).find(|&j| minimal_polys[j] == *f) {
            return Err(CodeError::DegenerateZeros(format!(
                "minimal polynomials {j} and {i} coincide"
            )));
        }
    }
    let h = minimal_polys
        .iter()
        .fold(Polynomial::one(p), |acc, f| &acc * f);
    let (g, rem) = Polynomial::x_pow_minus_one(p, n as usize).div_rem(&h)?;
    if !rem.is_zero() {
        return Err(CodeError::DegenerateZeros("h does not divide X^n - 1".into()));
    }
    Ok(CodeSpec {
        p,
        m,
        k,
        n,
        zero_inverse_logs: logs,
        minimal_polys,
        h,
        g,
    })
}

/// Factor structure of h.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualZeroReport {
    pub factors: usize,
    pub degrees: Vec<usize>,
    pub all_monic: bool,
    /// Irreducibility by gcd(f, X^{p^j} - X) = 1 for 1 <= j <= deg/2.
    pub all_irreducible: bool,
    pub pairwise_distinct: bool,
    pub product_equals_h: bool,
}

impl DualZeroReport {
    pub fn confirms_five_zeros(&self) -> bool {
        self.factors == 5
            && self.all_monic
            && self.all_irreducible
            && self.pairwise_distinct
            && self.product_equals_h
    }
}

/// base^e mod f.
fn poly_pow_mod(base: &Polynomial, mut e: u64, f: &Polynomial) -> Polynomial {
    let mut acc = Polynomial::one(base.modulus());
    let mut b = base.rem(f).expect("f is nonzero");
    while e > 0 {
        if e & 1 == 1 {
            acc = (&acc * &b).rem(f).unwrap();
        }
        b = (&b * &b).rem(f).unwrap();
        e >>= 1;
    }
    acc
}

/// Irreducibility test over F_p: f has no factor of degree <= deg/2.
pub fn is_irreducible(f: &Polynomial) -> bool {
    let Some(d) = f.degree() else { return false };
    if d == 0 {
        return false;
    }
    let p = f.modulus() as u64;
    let x = Polynomial::x(f.modulus());
    let mut power = x.clone();
    for _ in 1..=d / 2 {
        power = poly_pow_mod(&power, p, f);
        if f.gcd(&(&power - &x)).degree() != Some(0) {
            return false;
        }
    }
    true
}

pub fn dual_zero_report(spec: &CodeSpec) -> DualZeroReport {
    let fs = &spec.minimal_polys;
    let product = fs.iter().fold(Polynomial::one(spec.p), |acc, f| &acc * f);
    DualZeroReport {
        factors: fs.len(),
        degrees: fs.iter().map(|f| f.degree().unwrap_or(0)).collect(),
        all_monic: fs.iter().all(Polynomial::is_monic),
        all_irreducible: fs.iter().all(is_irreducible),
        pairwise_distinct: (0..fs.len()).all(|i| (0..i).all(|j| fs[i] != fs[j])),
        product_equals_h: product == spec.h,
    }
}

/// How the literal exponent reading ((-π)^{(p^k+1)/2})^t of the b2 term
/// compares with the zero-inverse reading (-1)^t π^{(p^k+1)t/2}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExponentReading {
    /// (p^k+1)/2 is even, so the literal b2 term equals the b1 term.
    pub literal_collapses: bool,
}

pub fn exponent_reading(p: u32, k: u32) -> ExponentReading {
    // (p^k + 1)/2 mod 2 needs p^k mod 4
    let r = pow_mod(p as u64, k as u64, 4);
    ExponentReading {
        literal_collapses: (r + 1) % 4 == 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn desk_code_shape() {
        for k in [1, 2] {
            let code = Code::build(3, 5, k).unwrap();
            let s = &code.spec;
            assert_eq!(s.n, 242);
            assert_eq!(s.h.degree(), Some(25));
            assert_eq!(s.g.degree(), Some(217));
            assert_eq!(&s.g * &s.h, Polynomial::x_pow_minus_one(3, 242));
            assert!(dual_zero_report(s).confirms_five_zeros());
        }
    }

    #[test]
    fn zero_inverse_logs_at_desk_scale() {
        let code = Code::build(3, 5, 1).unwrap();
        assert_eq!(code.spec.zero_inverse_logs, [1, 122, 2, 123, 5]);
    }

    #[test]
    fn invalid_parameters() {
        assert!(matches!(Code::build(3, 6, 1), Err(CodeError::InvalidParameters(_))));
        assert!(matches!(Code::build(3, 3, 1), Err(CodeError::InvalidParameters(_))));
        assert!(matches!(Code::build(3, 5, 5), Err(CodeError::InvalidParameters(_))));
        assert!(matches!(Code::build(4, 5, 1), Err(CodeError::Field(FieldError::NotPrime(4)))));
    }

    #[test]
    fn irreducibility_test() {
        let reducible = &Polynomial::from_signed(3, &[1, 1]) * &Polynomial::from_signed(3, &[1, 0, 1]);
        assert!(!is_irreducible(&reducible));
        assert!(is_irreducible(&Polynomial::from_signed(3, &[1, 0, 1])));
        assert!(is_irreducible(&Polynomial::parse(3, "1,2,0,0,0,1").unwrap()));
    }

    #[test]
    fn weight_examples() {
        let code = Code::build(3, 5, 1).unwrap();
        assert_eq!(code.codeword(&MessageTuple::zero()).weight(), 0);
        assert_eq!(Codeword(vec![0, 2, 0]).weight(), 1);
        let mut t = MessageTuple::zero();
        t.a1 = FieldElement::ONE;
        let cw = code.codeword(&t);
        assert_eq!(cw.weight(), 162);
        assert_eq!(code.weight_via_charsum(&t).unwrap(), 162);
        assert!(code.is_codeword(&cw));
        assert_eq!(code.weight_via_charsum(&MessageTuple::zero()).unwrap(), 0);
    }

    #[test]
    fn weight_from_sum_errors() {
        assert_eq!(weight_from_sum(972, 3, 5).unwrap(), 0);
        assert_eq!(weight_from_sum(486, 3, 5).unwrap(), 81);
        assert!(matches!(weight_from_sum(5, 3, 5), Err(CodeError::DivisibilityFailure { .. })));
    }

    #[test]
    fn bridge_and_membership_on_random_tuples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in [1, 2] {
            let code = Code::build(3, 5, k).unwrap();
            for _ in 0..40 {
                let t = MessageTuple::random(&code.field, &mut rng);
                let cw = code.codeword(&t);
                assert_eq!(cw.weight() as i64, code.weight_via_charsum(&t).unwrap());
                assert!(code.is_codeword(&cw));
                assert!(code.is_codeword(&cw.rotate()));
            }
        }
    }

    #[test]
    fn non_codeword_rejected() {
        let code = Code::build(3, 5, 1).unwrap();
        let mut v = vec![0u32; 242];
        v[0] = 1;
        assert!(!code.is_codeword(&Codeword(v)));
    }

    #[test]
    fn literal_exponent_reading() {
        assert!(exponent_reading(3, 1).literal_collapses);
        assert!(!exponent_reading(3, 2).literal_collapses);
        assert!(!exponent_reading(5, 1).literal_collapses);
    }

    #[test]
    fn json_export() {
        let code = Code::build(3, 5, 1).unwrap();
        let v: serde_json::Value = serde_json::from_str(&code.spec.to_json()).unwrap();
        assert_eq!(v["n"], 242);
        assert_eq!(v["dimension"], 25);
        assert_eq!(v["minimal_polynomials"].as_array().unwrap().len(), 5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn codewords_are_linear(seed in any::<u64>()) {
            let code = Code::build(3, 5, 1).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = MessageTuple::random(&code.field, &mut rng);
            let b = MessageTuple::random(&code.field, &mut rng);
            let (ca, cb) = (code.codeword(&a), code.codeword(&b));
            let sum = Codeword(ca.0.iter().zip(&cb.0).map(|(x, y)| (x + y) % 3).collect());
            prop_assert_eq!(code.codeword(&a.add(b, &code.field)), sum);
        }

        #[test]
        fn distinct_tuples_give_distinct_codewords(seed in any::<u64>()) {
            let code = Code::build(3, 5, 2).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = MessageTuple::random(&code.field, &mut rng);
            let b = MessageTuple::random(&code.field, &mut rng);
            prop_assume!(a != b);
            prop_assert_ne!(code.codeword(&a), code.codeword(&b));
        }
    }
}
