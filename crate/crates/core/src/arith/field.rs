//! Coefficient fields: ℚ and F_p for a prime p.
//!
//! The field is passed around as a value ("structure" style) so that prime
//! moduli stay runtime data while the element type is monomorphized in the
//! hot linear algebra.

use super::rat::Rat;
use super::ArithError;
use std::fmt;
use std::fmt::Debug;

pub trait Field: Copy + Eq + Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Debug + Send + Sync + 'static;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|i| self.mul(a, &i))
    }

    /// `acc -= c * x`, the inner loop of row reduction.
    fn sub_mul_assign(&self, acc: &mut Self::Elem, c: &Self::Elem, x: &Self::Elem) {
        *acc = self.sub(acc, &self.mul(c, x));
    }

    fn add_assign(&self, acc: &mut Self::Elem, x: &Self::Elem) {
        *acc = self.add(acc, x);
    }

    fn spec(&self) -> FieldSpec;

    fn fmt_elem(&self, a: &Self::Elem) -> String;
}

/// The rational numbers.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = Rat;

    fn zero(&self) -> Rat {
        Rat::ZERO
    }
    fn one(&self) -> Rat {
        Rat::ONE
    }
    fn from_int(&self, n: i64) -> Rat {
        Rat::from_int(n)
    }
    fn is_zero(&self, a: &Rat) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        a.add(b)
    }
    fn sub(&self, a: &Rat, b: &Rat) -> Rat {
        a.sub(b)
    }
    fn neg(&self, a: &Rat) -> Rat {
        a.neg()
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        a.mul(b)
    }
    fn inv(&self, a: &Rat) -> Option<Rat> {
        a.inv()
    }

    fn sub_mul_assign(&self, acc: &mut Rat, c: &Rat, x: &Rat) {
        if c.is_zero() || x.is_zero() {
            return;
        }
        *acc = acc.sub(&c.mul(x));
    }

    fn spec(&self) -> FieldSpec {
        FieldSpec::Q
    }

    fn fmt_elem(&self, a: &Rat) -> String {
        a.to_string()
    }
}

/// The prime field F_p, elements stored as canonical representatives `0..p`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PrimeField {
    p: u64,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    /// Moduli are capped well below 2^32 so products fit in u128 with room.
    pub fn new(p: u64) -> Result<Self, ArithError> {
        if p >= (1 << 31) || !is_prime(p) {
            return Err(ArithError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn from_int(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // Fermat: a^(p-2) mod p
        let mut base = *a as u128;
        let mut e = self.p - 2;
        let m = self.p as u128;
        let mut acc: u128 = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        Some(acc as u64)
    }

    fn spec(&self) -> FieldSpec {
        FieldSpec::Fp(self.p)
    }

    fn fmt_elem(&self, a: &u64) -> String {
        a.to_string()
    }
}

/// Runtime field descriptor, parsed from `"Q"` or `"Fp:<prime>"`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum FieldSpec {
    Q,
    Fp(u64),
}

impl FieldSpec {
    pub fn parse(s: &str) -> Result<FieldSpec, ArithError> {
        if s == "Q" {
            return Ok(FieldSpec::Q);
        }
        if let Some(rest) = s.strip_prefix("Fp:") {
            let p: u64 = rest.parse().map_err(|_| ArithError::NotPrime(0))?;
            PrimeField::new(p)?;
            return Ok(FieldSpec::Fp(p));
        }
        Err(ArithError::NotPrime(0))
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Q => write!(f, "Q"),
            FieldSpec::Fp(p) => write!(f, "Fp:{p}"),
        }
    }
}

/// A scalar tagged with its field, for the dynamic entry points.
#[derive(Clone, PartialEq, Debug)]
pub enum FieldElem {
    Q(Rat),
    Fp { p: u64, val: u64 },
}

impl FieldElem {
    pub fn spec(&self) -> FieldSpec {
        match self {
            FieldElem::Q(_) => FieldSpec::Q,
            FieldElem::Fp { p, .. } => FieldSpec::Fp(*p),
        }
    }
}
