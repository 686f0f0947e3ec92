use super::FieldError;

/// Deterministic primality test by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Modular exponentiation with a 128-bit intermediate.
pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut b = (base as u128) % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// The prime field F_p for an odd prime p, with Legendre and inverse tables.
#[derive(Clone, Debug)]
pub struct PrimeField {
    p: u32,
    legendre: Vec<i8>,
    inverse: Vec<u32>,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p % 2 == 0 || p > u32::MAX as u64 || !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let pu = p as usize;
        let mut legendre = vec![-1i8; pu];
        legendre[0] = 0;
        for a in 1..p {
            legendre[(a * a % p) as usize] = 1;
        }
        let mut inverse = vec![0u32; pu];
        for a in 1..p {
            inverse[a as usize] = pow_mod(a, p - 2, p) as u32;
        }
        Ok(Self {
            p: p as u32,
            legendre,
            inverse,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn reduce(&self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    /// Legendre symbol (a/p) in {-1, 0, 1}.
    pub fn legendre(&self, a: i64) -> i8 {
        self.legendre[self.reduce(a) as usize]
    }

    pub fn legendre_table(&self) -> &[i8] {
        &self.legendre
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        let a = a % self.p;
        (a != 0).then(|| self.inverse[a as usize])
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - (b % self.p) as u64) % self.p as u64) as u32
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        self.sub(0, a)
    }

    pub fn pow(&self, a: u32, exp: u64) -> u32 {
        pow_mod(a as u64, exp, self.p as u64) as u32
    }

    /// (-1/p): +1 when p = 1 (mod 4), -1 when p = 3 (mod 4).
    pub fn minus_one_symbol(&self) -> i8 {
        if self.p % 4 == 1 {
            1
        } else {
            -1
        }
    }

    /// The fixed non-square: the smallest positive non-residue mod p.
    pub fn lambda(&self) -> u32 {
        (1..self.p)
            .find(|&a| self.legendre[a as usize] == -1)
            .expect("an odd prime field has non-squares")
    }

    /// lambda^((1 + p^k) / 2), evaluated by modular exponentiation.
    pub fn lambda_power(&self, k: u32) -> u32 {
        self.pow(self.lambda(), half_one_plus_p_pow(self.p, k as u64))
    }

    /// Returns lambda^((1 + p^k) / 2) after asserting it is lambda for even k
    /// and -lambda for odd k.
    pub fn lambda_power_check(&self, k: u32) -> Result<u32, FieldError> {
        let lambda = self.lambda();
        let actual = self.lambda_power(k);
        let expected = if k % 2 == 0 { lambda } else { self.neg(lambda) };
        if actual == expected {
            Ok(actual)
        } else {
            Err(FieldError::LambdaPowerMismatch {
                k,
                actual,
                expected,
            })
        }
    }
}

/// (1 + p^e) / 2 reduced modulo p - 1, suitable as an exponent in F_p*.
fn half_one_plus_p_pow(p: u32, e: u64) -> u64 {
    let modulus = 2 * (p as u64 - 1);
    let reduced = (1 + pow_mod(p as u64, e, modulus)) % modulus;
    debug_assert_eq!(reduced % 2, 0);
    reduced / 2
}
