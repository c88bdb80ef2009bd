//! Exact rational numbers with an `i64/i64` fast path.
//!
//! Row reduction over Bruhat moment graphs keeps numerators and denominators
//! tiny almost always, so the representation is a reduced fraction of two
//! machine words, promoted to `num::BigRational` only when a result does not
//! fit. The `Big` variant is kept canonical: a value that fits the small
//! variant is always stored small, which makes equality a plain structural
//! comparison.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, Debug)]
pub enum Rat {
    /// Reduced fraction, denominator > 0.
    Small(i64, i64),
    /// Out-of-range fallback; never representable as `Small`.
    Big(Box<BigRational>),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Build a reduced rational from a raw i128 fraction, `den != 0`.
fn from_i128(num: i128, den: i128) -> Rat {
    debug_assert!(den != 0);
    if num == 0 {
        return Rat::Small(0, 1);
    }
    let neg = (num < 0) != (den < 0);
    let (un, ud) = (num.unsigned_abs(), den.unsigned_abs());
    let g = gcd_u128(un, ud);
    let (un, ud) = (un / g, ud / g);
    if un <= i64::MAX as u128 && ud <= i64::MAX as u128 {
        let n = if neg { -(un as i64) } else { un as i64 };
        Rat::Small(n, ud as i64)
    } else {
        let mut n = BigInt::from(un);
        if neg {
            n = -n;
        }
        Rat::Big(Box::new(BigRational::new(n, BigInt::from(ud))))
    }
}

fn demote(b: BigRational) -> Rat {
    if let (Some(n), Some(d)) = (b.numer().to_i64(), b.denom().to_i64()) {
        Rat::Small(n, d)
    } else {
        Rat::Big(Box::new(b))
    }
}

impl Rat {
    pub const ZERO: Rat = Rat::Small(0, 1);
    pub const ONE: Rat = Rat::Small(1, 1);

    pub fn from_int(n: i64) -> Rat {
        Rat::Small(n, 1)
    }

    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        from_i128(num as i128, den as i128)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rat::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Rat::Small(1, 1))
    }

    fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(n, d) => BigRational::new(BigInt::from(*n), BigInt::from(*d)),
            Rat::Big(b) => (**b).clone(),
        }
    }

    pub fn add(&self, o: &Rat) -> Rat {
        if let (Rat::Small(a, b), Rat::Small(c, d)) = (self, o) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if let Some(n) = (a * d).checked_add(c * b) {
                return from_i128(n, b * d);
            }
        }
        demote(self.to_big() + o.to_big())
    }

    pub fn sub(&self, o: &Rat) -> Rat {
        if let (Rat::Small(a, b), Rat::Small(c, d)) = (self, o) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if let Some(n) = (a * d).checked_sub(c * b) {
                return from_i128(n, b * d);
            }
        }
        demote(self.to_big() - o.to_big())
    }

    pub fn mul(&self, o: &Rat) -> Rat {
        if let (Rat::Small(a, b), Rat::Small(c, d)) = (self, o) {
            return from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128);
        }
        demote(self.to_big() * o.to_big())
    }

    pub fn neg(&self) -> Rat {
        match self {
            Rat::Small(n, d) => from_i128(-(*n as i128), *d as i128),
            Rat::Big(b) => demote(-(**b).clone()),
        }
    }

    pub fn inv(&self) -> Option<Rat> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Rat::Small(n, d) => from_i128(*d as i128, *n as i128),
            Rat::Big(b) => demote(b.recip()),
        })
    }

    pub fn div(&self, o: &Rat) -> Option<Rat> {
        o.inv().map(|i| self.mul(&i))
    }

    /// Integer value if the fraction is integral.
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Rat::Small(n, 1) => Some(*n),
            _ => None,
        }
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Self) -> bool {
        // Big is canonical (never fits Small), so variants never cross.
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => a == c && b == d,
            (Rat::Big(a), Rat::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        if let (Rat::Small(a, b), Rat::Small(c, d)) = (self, other) {
            return (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128));
        }
        let diff = self.to_big() - other.to_big();
        if diff.is_zero() {
            Ordering::Equal
        } else if diff.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(n, 1) => write!(f, "{n}"),
            Rat::Small(n, d) => write!(f, "{n}/{d}"),
            Rat::Big(b) => write!(f, "{b}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_ops() {
        let half = Rat::new(1, 2);
        let third = Rat::new(2, 6);
        assert_eq!(third, Rat::new(1, 3));
        assert_eq!(half.add(&third), Rat::new(5, 6));
        assert_eq!(half.mul(&third), Rat::new(1, 6));
        assert_eq!(half.sub(&half), Rat::ZERO);
        assert_eq!(half.inv().unwrap(), Rat::from_int(2));
        assert!(Rat::ZERO.inv().is_none());
        assert_eq!(Rat::new(-3, -6), Rat::new(1, 2));
        assert_eq!(format!("{}", Rat::new(-4, 6)), "-2/3");
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Rat::from_int(i64::MAX);
        let sq = big.mul(&big);
        assert!(matches!(sq, Rat::Big(_)));
        // dividing back down demotes to the small representation
        let back = sq.div(&big).unwrap();
        assert_eq!(back, big);
        assert!(matches!(back, Rat::Small(_, _)));
    }

    proptest! {
        #[test]
        fn matches_bigrational(a in -500i64..500, b in 1i64..50, c in -500i64..500, d in 1i64..50) {
            let x = Rat::new(a, b);
            let y = Rat::new(c, d);
            let bx = x.to_big();
            let by = y.to_big();
            prop_assert_eq!(x.add(&y).to_big(), bx.clone() + by.clone());
            prop_assert_eq!(x.sub(&y).to_big(), bx.clone() - by.clone());
            prop_assert_eq!(x.mul(&y).to_big(), bx.clone() * by.clone());
            prop_assert_eq!(x.cmp(&y), bx.cmp(&by));
        }
    }
}
