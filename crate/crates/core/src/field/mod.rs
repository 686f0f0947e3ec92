//! Table-driven arithmetic in F_p and F_{p^m}.
//!
//! Nonzero elements of F_{p^m} are stored as discrete logarithms with
//! respect to a fixed primitive element π, the canonical root of the modulus
//! polynomial. Multiplication adds logarithms; addition goes through a Zech
//! table, `log(1 + π^i)`. Each element also has a coefficient view in the
//! polynomial basis 1, π, ..., π^{m-1}, packed as a base-p integer with the
//! coefficient of π^j in digit j.

mod poly;
mod prime;

use thiserror::Error;

pub use poly::Polynomial;
pub use prime::{is_prime, pow_mod, PrimeField};

/// Default cap on the number of field elements that may be tabulated.
pub const DEFAULT_MEMORY_CAP: u64 = 1 << 27;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("NotPrime: {0} is not an odd prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    InvalidDegree,
    #[error("NotPrimitive: {poly} is not a monic primitive polynomial of degree {m}")]
    NotPrimitive { poly: String, m: u32 },
    #[error("MemoryCapExceeded: field of {size} elements exceeds the cap of {cap}")]
    MemoryCapExceeded { size: u128, cap: u64 },
    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,
    #[error("cannot parse polynomial coefficients from {0:?}")]
    ParsePolynomial(String),
    #[error("lambda^((1+p^{k})/2) = {actual}, expected {expected}")]
    LambdaPowerMismatch { k: u32, actual: u32, expected: u32 },
}

/// An element of F_{p^m}: ZERO or a discrete-log index in [0, p^m - 1).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: Self = FieldElement(u32::MAX);
    pub const ONE: Self = FieldElement(0);

    /// The element π^log. The caller keeps `log` below the group order.
    pub const fn from_log(log: u32) -> Self {
        FieldElement(log)
    }

    pub fn log(self) -> Option<u32> {
        (!self.is_zero()).then_some(self.0)
    }

    pub fn is_zero(self) -> bool {
        self.0 == u32::MAX
    }
}

/// Construction options for [`ExtensionField`].
#[derive(Clone, Debug)]
pub struct FieldOptions {
    pub modulus: Option<Polynomial>,
    pub memory_cap: u64,
}

impl Default for FieldOptions {
    fn default() -> Self {
        Self {
            modulus: None,
            memory_cap: DEFAULT_MEMORY_CAP,
        }
    }
}

/// Tabulated F_{p^m}. Immutable after construction.
#[derive(Clone, Debug)]
pub struct ExtensionField {
    prime: PrimeField,
    m: u32,
    size: u32,
    order: u32,
    modulus: Polynomial,
    /// log -> packed coefficient vector
    antilog: Vec<u32>,
    /// packed coefficient vector -> log; entry 0 is unused
    log: Vec<u32>,
    /// zech[i] = log(1 + π^i), u32::MAX when 1 + π^i = 0
    zech: Vec<u32>,
    /// log -> trace in F_p
    trace: Vec<u32>,
}

impl ExtensionField {
    pub fn new(p: u64, m: u32) -> Result<Self, FieldError> {
        Self::with_options(p, m, &FieldOptions::default())
    }

    pub fn with_options(p: u64, m: u32, options: &FieldOptions) -> Result<Self, FieldError> {
        let prime = PrimeField::new(p)?;
        if m == 0 {
            return Err(FieldError::InvalidDegree);
        }
        let size = (p as u128).checked_pow(m).unwrap_or(u128::MAX);
        if size > options.memory_cap as u128 || size > u32::MAX as u128 {
            return Err(FieldError::MemoryCapExceeded {
                size,
                cap: options.memory_cap,
            });
        }
        let p32 = p as u32;
        let modulus = match &options.modulus {
            Some(f) => {
                let ok = f.modulus() == p32
                    && f.degree() == Some(m as usize)
                    && f.is_monic()
                    && is_primitive(f, m);
                if !ok {
                    return Err(FieldError::NotPrimitive {
                        poly: f.to_string(),
                        m,
                    });
                }
                f.clone()
            }
            None => smallest_primitive(p32, m),
        };
        Ok(Self::from_modulus(prime, m, modulus))
    }

    fn from_modulus(prime: PrimeField, m: u32, modulus: Polynomial) -> Self {
        let p = prime.p();
        let size = p.pow(m);
        let order = size - 1;
        let mut antilog = Vec::with_capacity(order as usize);
        let mut log = vec![u32::MAX; size as usize];
        let mut walk = PowerWalk::new(&modulus, m);
        for i in 0..order {
            let packed = walk.packed();
            antilog.push(packed);
            log[packed as usize] = i;
            walk.step();
        }
        let zech = antilog
            .iter()
            .map(|&a| {
                let s = packed_add(a, 1, p, m);
                if s == 0 {
                    u32::MAX
                } else {
                    log[s as usize]
                }
            })
            .collect();
        let mut field = Self {
            prime,
            m,
            size,
            order,
            modulus,
            antilog,
            log,
            zech,
            trace: vec![],
        };
        // Tr(π^j) for the basis, then extend linearly over the coefficient view.
        let basis_trace: Vec<u32> = (0..m)
            .map(|j| field.trace_slow(FieldElement::from_log(j)))
            .collect();
        field.trace = field
            .antilog
            .iter()
            .map(|&packed| {
                let mut acc = 0u64;
                let mut rest = packed;
                for &t in &basis_trace {
                    acc += (rest % p) as u64 * t as u64;
                    rest /= p;
                }
                (acc % p as u64) as u32
            })
            .collect();
        field
    }

    fn trace_slow(&self, x: FieldElement) -> u32 {
        let mut acc = FieldElement::ZERO;
        let mut y = x;
        for _ in 0..self.m {
            acc = self.add(acc, y);
            y = self.frobenius(y);
        }
        self.to_prime(acc).expect("trace lies in the prime field")
    }

    pub fn prime(&self) -> &PrimeField {
        &self.prime
    }

    pub fn p(&self) -> u32 {
        self.prime.p()
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Number of elements, p^m.
    pub fn size(&self) -> u32 {
        self.size
    }

    /// Order of the multiplicative group, p^m - 1.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &Polynomial {
        &self.modulus
    }

    /// The primitive element π.
    pub fn primitive(&self) -> FieldElement {
        self.from_log(1)
    }

    /// π^e for any integer exponent.
    pub fn from_log(&self, e: i64) -> FieldElement {
        FieldElement(e.rem_euclid(self.order as i64) as u32)
    }

    /// Dense index: 0 for ZERO, `log + 1` otherwise.
    pub fn index_of(&self, x: FieldElement) -> usize {
        match x.log() {
            None => 0,
            Some(l) => l as usize + 1,
        }
    }

    pub fn element_at(&self, index: usize) -> FieldElement {
        if index == 0 {
            FieldElement::ZERO
        } else {
            FieldElement((index - 1) as u32)
        }
    }

    /// All elements in dense-index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.size as usize).map(|i| self.element_at(i))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        FieldElement(((a.0 as u64 + b.0 as u64) % self.order as u64) as u32)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        let diff = (b.0 + self.order - a.0) % self.order;
        let z = self.zech[diff as usize];
        if z == u32::MAX {
            FieldElement::ZERO
        } else {
            FieldElement(((a.0 as u64 + z as u64) % self.order as u64) as u32)
        }
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if a.is_zero() {
            return a;
        }
        // -1 = π^{n/2}
        FieldElement((a.0 + self.order / 2) % self.order)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        a.log().map(|l| FieldElement((self.order - l) % self.order))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        match a.log() {
            None if e == 0 => FieldElement::ONE,
            None => FieldElement::ZERO,
            Some(l) => {
                let n = self.order as u64;
                FieldElement(((l as u128 * (e % n) as u128) % n as u128) as u32)
            }
        }
    }

    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.p() as u64)
    }

    /// Multiplication by a prime-field scalar.
    pub fn scale(&self, a: FieldElement, c: u32) -> FieldElement {
        self.mul(a, self.from_prime(c))
    }

    /// Embeds c mod p into F_{p^m}.
    pub fn from_prime(&self, c: u32) -> FieldElement {
        let c = c % self.p();
        if c == 0 {
            FieldElement::ZERO
        } else {
            FieldElement(self.log[c as usize])
        }
    }

    /// The F_p value of `a` when it lies in the prime subfield.
    pub fn to_prime(&self, a: FieldElement) -> Option<u32> {
        let packed = self.packed(a);
        (packed < self.p()).then_some(packed)
    }

    fn packed(&self, a: FieldElement) -> u32 {
        match a.log() {
            None => 0,
            Some(l) => self.antilog[l as usize],
        }
    }

    /// Coordinates in the basis 1, π, ..., π^{m-1}.
    pub fn coords(&self, a: FieldElement) -> Vec<u32> {
        let p = self.p();
        let mut rest = self.packed(a);
        (0..self.m)
            .map(|_| {
                let d = rest % p;
                rest /= p;
                d
            })
            .collect()
    }

    pub fn from_coords(&self, coords: &[u32]) -> FieldElement {
        let p = self.p();
        let packed = coords
            .iter()
            .rev()
            .fold(0u32, |acc, &c| acc * p + c % p);
        if packed == 0 {
            FieldElement::ZERO
        } else {
            FieldElement(self.log[packed as usize])
        }
    }

    /// Absolute trace to F_p.
    pub fn trace(&self, a: FieldElement) -> u32 {
        match a.log() {
            None => 0,
            Some(l) => self.trace[l as usize],
        }
    }

    /// Trace table indexed by discrete log.
    pub fn trace_by_log(&self) -> &[u32] {
        &self.trace
    }

    /// Minimal polynomial over F_p: the product of (X - c) over the Frobenius
    /// orbit of `x`.
    pub fn minimal_poly(&self, x: FieldElement) -> Polynomial {
        let p = self.p();
        let orbit = self.conjugates(x);
        let mut coeffs = vec![FieldElement::ONE];
        for &c in &orbit {
            let mut next = vec![FieldElement::ZERO; coeffs.len() + 1];
            for (i, &a) in coeffs.iter().enumerate() {
                next[i + 1] = self.add(next[i + 1], a);
                next[i] = self.sub(next[i], self.mul(a, c));
            }
            coeffs = next;
        }
        let coeffs = coeffs
            .into_iter()
            .map(|c| {
                self.to_prime(c)
                    .expect("conjugate-orbit product has coefficients in F_p")
            })
            .collect();
        Polynomial::new(p, coeffs)
    }

    /// The Frobenius orbit {x, x^p, x^{p^2}, ...} without repetition.
    pub fn conjugates(&self, x: FieldElement) -> Vec<FieldElement> {
        let mut orbit = vec![x];
        let mut y = self.frobenius(x);
        while y != x {
            orbit.push(y);
            y = self.frobenius(y);
        }
        orbit
    }

    /// Evaluates an F_p polynomial at a field element.
    pub fn eval_poly(&self, f: &Polynomial, x: FieldElement) -> FieldElement {
        f.coeffs().iter().rev().fold(FieldElement::ZERO, |acc, &c| {
            self.add(self.mul(acc, x), self.from_prime(c))
        })
    }

    /// Number of F_p-linearly independent vectors among `elems`.
    pub fn rank_over_prime(&self, elems: &[FieldElement]) -> usize {
        let rows: Vec<Vec<u32>> = elems.iter().map(|&e| self.coords(e)).collect();
        crate::quadform::rank_mod_p(rows, &self.prime)
    }
}

fn packed_add(a: u32, b: u32, p: u32, m: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let mut out = 0u32;
    let mut scale = 1u32;
    for _ in 0..m {
        out += ((a % p + b % p) % p) * scale;
        a /= p;
        b /= p;
        scale = scale.wrapping_mul(p);
    }
    out
}

/// Successive powers X^i modulo a degree-m monic polynomial.
struct PowerWalk {
    p: u32,
    /// low coefficients of the modulus, c_0..c_{m-1}
    low: Vec<u32>,
    state: Vec<u32>,
}

impl PowerWalk {
    fn new(modulus: &Polynomial, m: u32) -> Self {
        let mut state = vec![0u32; m as usize];
        state[0] = 1;
        Self {
            p: modulus.modulus(),
            low: (0..m as usize).map(|i| modulus.coeff(i)).collect(),
            state,
        }
    }

    fn packed(&self) -> u32 {
        self.state
            .iter()
            .rev()
            .fold(0u32, |acc, &c| acc * self.p + c)
    }

    fn is_one(&self) -> bool {
        self.state[0] == 1 && self.state[1..].iter().all(|&c| c == 0)
    }

    /// Multiply by X and reduce: X^m = -(c_0 + ... + c_{m-1} X^{m-1}).
    fn step(&mut self) {
        let p = self.p as u64;
        let top = *self.state.last().unwrap() as u64;
        for i in (1..self.state.len()).rev() {
            self.state[i] = self.state[i - 1];
        }
        self.state[0] = 0;
        if top != 0 {
            for (s, &c) in self.state.iter_mut().zip(&self.low) {
                *s = ((*s as u64 + p - top * c as u64 % p) % p) as u32;
            }
        }
    }
}

/// X has multiplicative order exactly p^m - 1 modulo f.
fn is_primitive(f: &Polynomial, m: u32) -> bool {
    if f.coeff(0) == 0 {
        return false;
    }
    let order = (f.modulus() as u64).pow(m) - 1;
    let mut walk = PowerWalk::new(f, m);
    for i in 1..=order {
        walk.step();
        if walk.is_one() {
            return i == order;
        }
    }
    false
}

/// The lexicographically smallest monic primitive polynomial of degree m,
/// comparing coefficients from X^{m-1} down to X^0. At (3, 5) this is
/// X^5 + 2X + 1.
fn smallest_primitive(p: u32, m: u32) -> Polynomial {
    let count = (p as u64).pow(m);
    for idx in 0..count {
        // Order as written, X^m + c_{m-1} X^{m-1} + ... + c_0: c_{m-1} is the
        // most significant digit of idx.
        let mut coeffs = vec![0u32; m as usize + 1];
        let mut rest = idx;
        for j in 0..m as usize {
            coeffs[j] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        coeffs[m as usize] = 1;
        if coeffs[0] == 0 {
            continue;
        }
        let f = Polynomial::new(p, coeffs);
        if is_primitive(&f, m) {
            return f;
        }
    }
    unreachable!("primitive polynomials exist for every degree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f35() -> ExtensionField {
        ExtensionField::new(3, 5).unwrap()
    }

    #[test]
    fn desk_field_shape() {
        let f = f35();
        assert_eq!(f.size(), 243);
        assert_eq!(f.order(), 242);
        assert_eq!(f.modulus().to_string(), "1,2,0,0,0,1");
        assert_eq!(f.trace(FieldElement::ONE), 2);
    }

    #[test]
    fn primitive_element_has_full_order() {
        let f = f35();
        let pi = f.primitive();
        let mut x = pi;
        for i in 1..f.order() {
            assert_ne!(x, FieldElement::ONE, "π^{i} = 1");
            x = f.mul(x, pi);
        }
        assert_eq!(x, FieldElement::ONE);
        assert_eq!(f.eval_poly(f.modulus(), pi), FieldElement::ZERO);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(ExtensionField::new(4, 5).unwrap_err(), FieldError::NotPrime(4));
        let cap = FieldOptions {
            modulus: None,
            memory_cap: 100,
        };
        assert!(matches!(
            ExtensionField::with_options(3, 5, &cap),
            Err(FieldError::MemoryCapExceeded { .. })
        ));
        // 1 + X^5 has the root -1.
        let bad = FieldOptions {
            modulus: Some(Polynomial::parse(3, "1,0,0,0,0,1").unwrap()),
            ..FieldOptions::default()
        };
        assert!(matches!(
            ExtensionField::with_options(3, 5, &bad),
            Err(FieldError::NotPrimitive { .. })
        ));
    }

    #[test]
    fn override_modulus_is_used() {
        // 1 + 2X + X^5 reversed and normalised is another primitive quintic.
        let base = f35();
        let recip = base.minimal_poly(base.inv(base.primitive()).unwrap());
        let opts = FieldOptions {
            modulus: Some(recip.clone()),
            ..FieldOptions::default()
        };
        let alt = ExtensionField::with_options(3, 5, &opts).unwrap();
        assert_eq!(alt.modulus(), &recip);
        assert_eq!(alt.trace(FieldElement::ONE), 2);
    }

    #[test]
    fn smallest_primitive_is_minimal() {
        for (p, m) in [(3u32, 2u32), (3, 3), (5, 2), (7, 2), (3, 5)] {
            let found = smallest_primitive(p, m);
            // Every candidate preceding it in lexicographic order fails.
            let target: Vec<u32> = (0..m as usize).map(|i| found.coeff(i)).collect();
            for idx in 0..(p as u64).pow(m) {
                let mut c = vec![0u32; m as usize];
                let mut rest = idx;
                for j in 0..m as usize {
                    c[j] = (rest % p as u64) as u32;
                    rest /= p as u64;
                }
                if c == target {
                    break;
                }
                let mut full = c.clone();
                full.push(1);
                assert!(!is_primitive(&Polynomial::new(p, full), m));
            }
        }
    }

    #[test]
    fn group_law_exhaustive() {
        let f = f35();
        let n = f.order();
        for i in 0..n {
            for j in 0..n {
                let prod = f.mul(FieldElement::from_log(i), FieldElement::from_log(j));
                assert_eq!(prod, FieldElement::from_log((i + j) % n));
            }
        }
    }

    #[test]
    fn addition_matches_coordinates() {
        let f = f35();
        for a in f.elements() {
            for b in f.elements().step_by(7) {
                let ca = f.coords(a);
                let cb = f.coords(b);
                let sum: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % 3).collect();
                assert_eq!(f.add(a, b), f.from_coords(&sum));
            }
            assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
            }
        }
    }

    #[test]
    fn trace_is_balanced_and_frobenius_invariant() {
        for (p, m) in [(3u64, 5u32), (5, 3), (7, 2)] {
            let f = ExtensionField::new(p, m).unwrap();
            let mut hits = vec![0u64; p as usize];
            for x in f.elements() {
                hits[f.trace(x) as usize] += 1;
                assert_eq!(f.trace(f.frobenius(x)), f.trace(x));
                assert_eq!(f.trace(x), f.trace_slow(x));
            }
            assert!(hits.iter().all(|&h| h == (p as u64).pow(m - 1)));
        }
    }

    #[test]
    fn minimal_polynomials() {
        let f = f35();
        assert_eq!(f.minimal_poly(f.primitive()), *f.modulus());
        assert_eq!(
            f.minimal_poly(FieldElement::ONE),
            Polynomial::from_signed(3, &[-1, 1])
        );
        assert_eq!(f.minimal_poly(FieldElement::ZERO), Polynomial::x(3));
        // π^{-1} is a root of the reversed modulus.
        let inv = f.minimal_poly(f.inv(f.primitive()).unwrap());
        assert_eq!(inv, f.modulus().reciprocal().monic());
        let xq = &Polynomial::x_pow_minus_one(3, 243) + &Polynomial::one(3);
        let xq_minus_x = &xq - &Polynomial::x(3);
        for x in f.elements().step_by(5) {
            let mp = f.minimal_poly(x);
            assert!(mp.is_monic());
            assert_eq!(mp.degree().unwrap(), f.conjugates(x).len());
            assert_eq!(5 % mp.degree().unwrap(), 0);
            assert_eq!(f.eval_poly(&mp, x), FieldElement::ZERO);
            assert!(xq_minus_x.rem(&mp).unwrap().is_zero());
        }
    }

    proptest! {
        #[test]
        fn trace_is_linear(a in 0usize..243, b in 0usize..243, c in 0u32..3) {
            let f = f35();
            let (x, y) = (f.element_at(a), f.element_at(b));
            prop_assert_eq!(f.trace(f.add(x, y)), (f.trace(x) + f.trace(y)) % 3);
            prop_assert_eq!(f.trace(f.scale(x, c)), (c * f.trace(x)) % 3);
        }
    }
}
