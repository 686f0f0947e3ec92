use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::prime::pow_mod;
use super::FieldError;

/// A polynomial over F_p, coefficients in ascending degree order with no
/// trailing zeros. The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    p: u32,
    coeffs: Vec<u32>,
}

impl Polynomial {
    pub fn new(p: u32, coeffs: Vec<u32>) -> Self {
        let mut poly = Self {
            p,
            coeffs: coeffs.into_iter().map(|c| c % p).collect(),
        };
        poly.trim();
        poly
    }

    /// Builds a polynomial from signed coefficients, reducing each mod p.
    pub fn from_signed(p: u32, coeffs: &[i64]) -> Self {
        Self::new(
            p,
            coeffs
                .iter()
                .map(|&c| c.rem_euclid(p as i64) as u32)
                .collect(),
        )
    }

    pub fn zero(p: u32) -> Self {
        Self { p, coeffs: vec![] }
    }

    pub fn one(p: u32) -> Self {
        Self::new(p, vec![1])
    }

    pub fn x(p: u32) -> Self {
        Self::new(p, vec![0, 1])
    }

    /// X^n - 1.
    pub fn x_pow_minus_one(p: u32, n: usize) -> Self {
        let mut coeffs = vec![0; n + 1];
        coeffs[0] = p - 1;
        coeffs[n] = 1;
        Self::new(p, coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    fn inv(&self, a: u32) -> u32 {
        pow_mod(a as u64, self.p as u64 - 2, self.p as u64) as u32
    }

    pub fn scale(&self, c: u32) -> Self {
        let p = self.p as u64;
        Self::new(
            self.p,
            self.coeffs
                .iter()
                .map(|&a| (a as u64 * c as u64 % p) as u32)
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.inv(self.leading()))
    }

    /// Coefficients reversed: X^deg * f(1/X).
    pub fn reciprocal(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self::new(self.p, coeffs)
    }

    pub fn eval(&self, x: u32) -> u32 {
        let p = self.p as u64;
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| (acc * x as u64 + c as u64) % p) as u32
    }

    /// Euclidean division: `self = q * divisor + r` with deg r < deg divisor.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), FieldError> {
        assert_eq!(self.p, divisor.p, "polynomials over different fields");
        let dd = divisor.degree().ok_or(FieldError::DivisionByZeroPolynomial)?;
        let p = self.p as u64;
        let lead_inv = self.inv(divisor.leading()) as u64;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(self.p), self.clone()));
        }
        let mut quot = vec![0u32; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dd] as u64 * lead_inv % p;
            quot[i] = c as u32;
            if c == 0 {
                continue;
            }
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                let t = c * d as u64 % p;
                rem[i + j] = ((rem[i + j] as u64 + p - t) % p) as u32;
            }
        }
        rem.truncate(dd);
        Ok((Self::new(self.p, quot), Self::new(self.p, rem)))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self, FieldError> {
        self.div_rem(divisor).map(|(_, r)| r)
    }

    /// Monic greatest common divisor; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Parses comma-separated ascending coefficients, e.g. "1,2,0,0,0,1".
    pub fn parse(p: u32, s: &str) -> Result<Self, FieldError> {
        let coeffs = s
            .split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<u32>()
                    .ok()
                    .filter(|&c| c < p)
                    .ok_or_else(|| FieldError::ParsePolynomial(s.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(p, coeffs))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.p, rhs.p);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| ((self.coeff(i) as u64 + rhs.coeff(i) as u64) % self.p as u64) as u32)
            .collect();
        Polynomial::new(self.p, coeffs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial::new(
            self.p,
            self.coeffs.iter().map(|&c| (self.p - c) % self.p).collect(),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.p, rhs.p);
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero(self.p);
        }
        let p = self.p as u64;
        let mut acc = vec![0u64; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u64 * b as u64) % p;
            }
        }
        Polynomial::new(self.p, acc.into_iter().map(|c| c as u32).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(coeffs: &[i64]) -> Polynomial {
        Polynomial::from_signed(3, coeffs)
    }

    #[test]
    fn small_ring_examples() {
        let xm1 = poly(&[-1, 1]);
        let xp1 = poly(&[1, 1]);
        let x2m1 = poly(&[-1, 0, 1]);
        assert_eq!(&xm1 * &xp1, x2m1);
        let (q, r) = x2m1.div_rem(&xm1).unwrap();
        assert_eq!(q, xp1);
        assert!(r.is_zero());
        assert_eq!(x2m1.gcd(&xm1), xm1);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let a = poly(&[1, 1]);
        assert_eq!(
            a.div_rem(&Polynomial::zero(3)).unwrap_err(),
            FieldError::DivisionByZeroPolynomial
        );
    }

    #[test]
    fn display_and_parse() {
        let f = Polynomial::parse(3, "1,2,0,0,0,1").unwrap();
        assert_eq!(f.degree(), Some(5));
        assert_eq!(f.to_string(), "1,2,0,0,0,1");
        assert!(Polynomial::parse(3, "1,3").is_err());
        assert!(Polynomial::parse(3, "1,,2").is_err());
        assert_eq!(Polynomial::zero(3).to_string(), "0");
    }

    #[test]
    fn gcd_is_monic() {
        let a = &poly(&[2, 2]) * &poly(&[1, 0, 1]);
        let b = &poly(&[2, 2]) * &poly(&[2, 1]);
        let g = a.gcd(&b);
        assert!(g.is_monic());
        assert_eq!(g, poly(&[1, 1]));
    }

    fn arb_poly(max_len: usize) -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(0u32..5, 0..max_len).prop_map(|c| Polynomial::new(5, c))
    }

    proptest! {
        #[test]
        fn div_rem_reconstructs(a in arb_poly(12), b in arb_poly(6)) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.div_rem(&b).unwrap();
            prop_assert_eq!(&(&q * &b) + &r, a);
            prop_assert!(r.is_zero() || r.degree() < b.degree());
        }

        #[test]
        fn gcd_divides_both(a in arb_poly(8), b in arb_poly(8)) {
            prop_assume!(!a.is_zero() || !b.is_zero());
            let g = a.gcd(&b);
            prop_assert!(g.is_monic());
            prop_assert!(a.rem(&g).unwrap().is_zero());
            prop_assert!(b.rem(&g).unwrap().is_zero());
        }
    }
}
