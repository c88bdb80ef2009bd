//! Sparse multivariate polynomials, integer polynomials in q, and Laurent
//! polynomials in v.

use super::field::Field;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Sparse polynomial over the graded polynomial ring (deg x_i = 1),
/// a map from exponent vectors to coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedPoly<F: Field> {
    pub nvars: usize,
    terms: BTreeMap<Vec<u8>, F::Elem>,
}

impl<F: Field> GradedPoly<F> {
    pub fn zero(nvars: usize) -> Self {
        GradedPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn var(f: F, nvars: usize, i: usize) -> Self {
        let mut e = vec![0u8; nvars];
        e[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, f.one());
        GradedPoly { nvars, terms }
    }

    /// Linear form with the given coordinate vector.
    pub fn linear(f: F, coeffs: &[F::Elem]) -> Self {
        let mut p = Self::zero(coeffs.len());
        for (i, c) in coeffs.iter().enumerate() {
            if !f.is_zero(c) {
                let mut e = vec![0u8; coeffs.len()];
                e[i] = 1;
                p.terms.insert(e, c.clone());
            }
        }
        p
    }

    pub fn constant(f: F, nvars: usize, c: F::Elem) -> Self {
        let mut p = Self::zero(nvars);
        if !f.is_zero(&c) {
            p.terms.insert(vec![0u8; nvars], c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &F::Elem)> {
        self.terms.iter()
    }

    fn insert_term(&mut self, f: F, e: Vec<u8>, c: F::Elem) {
        if f.is_zero(&c) {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(o.get(), &c);
                if f.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, f: F, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.insert_term(f, e.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, f: F, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars);
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u8> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert_term(f, e, f.mul(c1, c2));
            }
        }
        out
    }

    /// Homogeneous degree-d part; summing over all d recovers the polynomial.
    pub fn homog_component(&self, d: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.iter().map(|&x| x as usize).sum::<usize>() == d)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        GradedPoly { nvars: self.nvars, terms }
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| e.iter().map(|&x| x as usize).sum()).max()
    }

    /// Total degree if homogeneous, `None` otherwise (zero counts as homogeneous).
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut deg = None;
        for e in self.terms.keys() {
            let d: usize = e.iter().map(|&x| x as usize).sum();
            match deg {
                None => deg = Some(d),
                Some(x) if x == d => {}
                _ => return None,
            }
        }
        deg.or(Some(0))
    }

    pub fn fmt_with(&self, f: F) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in &self.terms {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| if x == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, x) })
                .collect();
            let cs = f.fmt_elem(c);
            if mono.is_empty() {
                parts.push(cs);
            } else if cs == "1" {
                parts.push(mono.join("*"));
            } else {
                parts.push(format!("{}*{}", cs, mono.join("*")));
            }
        }
        parts.join(" + ")
    }
}

/// Integer polynomial in the variable q, coefficients ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QPoly(Vec<i64>);

impl QPoly {
    pub fn zero() -> Self {
        QPoly(Vec::new())
    }

    pub fn one() -> Self {
        QPoly(vec![1])
    }

    pub fn from_coeffs(mut c: Vec<i64>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        QPoly(c)
    }

    pub fn q_pow(k: usize) -> Self {
        let mut c = vec![0; k + 1];
        c[k] = 1;
        QPoly(c)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0 == [1]
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let c = (0..n).map(|i| self.coeff(i) + o.coeff(i)).collect();
        QPoly::from_coeffs(c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let c = (0..n).map(|i| self.coeff(i) - o.coeff(i)).collect();
        QPoly::from_coeffs(c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut c = vec![0i64; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        QPoly::from_coeffs(c)
    }

    pub fn scale(&self, k: i64) -> Self {
        QPoly::from_coeffs(self.0.iter().map(|c| c * k).collect())
    }

    /// Multiply by q^k.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return QPoly::zero();
        }
        let mut c = vec![0i64; k];
        c.extend(&self.0);
        QPoly(c)
    }

    pub fn eval_one(&self) -> i64 {
        self.0.iter().sum()
    }

    /// Keep only the coefficients of q^i for i < bound.
    pub fn truncate_below(&self, bound: usize) -> Self {
        QPoly::from_coeffs(self.0.iter().take(bound).copied().collect())
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0 { "-" } else { "+" })?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            let a = c.unsigned_abs();
            match i {
                0 => write!(f, "{a}")?,
                1 => {
                    if a != 1 {
                        write!(f, "{a}")?;
                    }
                    write!(f, "q")?;
                }
                _ => {
                    if a != 1 {
                        write!(f, "{a}")?;
                    }
                    write!(f, "q^{i}")?;
                }
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Integer Laurent polynomial in v, for the h-normalization
/// h(v) = v^(l(w)-l(x)) P(v^-2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VPoly {
    terms: BTreeMap<i64, i64>,
}

impl VPoly {
    pub fn from_kl(p: &QPoly, length_gap: usize) -> VPoly {
        let mut terms = BTreeMap::new();
        for (i, &c) in p.coeffs().iter().enumerate() {
            if c != 0 {
                terms.insert(length_gap as i64 - 2 * i as i64, c);
            }
        }
        VPoly { terms }
    }

    pub fn coeff(&self, e: i64) -> i64 {
        self.terms.get(&e).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> impl Iterator<Item = (&i64, &i64)> {
        self.terms.iter()
    }
}

impl fmt::Display for VPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(&e, &c)| {
                let head = if c == 1 && e != 0 { String::new() } else { c.to_string() };
                match e {
                    0 => {
                        if head.is_empty() {
                            "1".into()
                        } else {
                            head
                        }
                    }
                    1 => format!("{head}v"),
                    _ => format!("{head}v^{e}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{Rat, Rationals};

    #[test]
    fn homog_component_examples() {
        let f = Rationals;
        // f = x1 + x1 x2, d = 1  ->  x1
        let x1 = GradedPoly::var(f, 2, 0);
        let x2 = GradedPoly::var(f, 2, 1);
        let p = x1.add(f, &x1.mul(f, &x2));
        assert_eq!(p.homog_component(1), x1);
        assert_eq!(p.homog_component(0), GradedPoly::zero(2));
        // zero polynomial: every component zero
        let z: GradedPoly<Rationals> = GradedPoly::zero(2);
        assert!(z.homog_component(3).is_zero());
        // (x1+x2)^2, d = 2  ->  x1^2 + 2 x1 x2 + x2^2 (expanded by hand)
        let s = x1.add(f, &x2);
        let sq = s.mul(f, &s);
        let expected = {
            let mut q = GradedPoly::zero(2);
            q.insert_term(f, vec![2, 0], Rat::from_int(1));
            q.insert_term(f, vec![1, 1], Rat::from_int(2));
            q.insert_term(f, vec![0, 2], Rat::from_int(1));
            q
        };
        assert_eq!(sq.homog_component(2), expected);
        assert_eq!(sq.homogeneous_degree(), Some(2));
        // components sum back to the polynomial
        let mix = p.add(f, &sq);
        let mut acc = GradedPoly::zero(2);
        for d in 0..=3 {
            acc = acc.add(f, &mix.homog_component(d));
        }
        assert_eq!(acc, mix);
        assert_eq!(mix.homogeneous_degree(), None);
    }

    #[test]
    fn qpoly_display_and_ops() {
        let p = QPoly::from_coeffs(vec![1, 1]);
        assert_eq!(p.to_string(), "1 + q");
        assert_eq!(QPoly::one().to_string(), "1");
        assert_eq!(QPoly::zero().to_string(), "0");
        assert_eq!(QPoly::from_coeffs(vec![0, 2, 0, 1]).to_string(), "2q + q^3");
        assert_eq!(p.mul(&p).to_string(), "1 + 2q + q^2");
        assert_eq!(p.mul(&p).eval_one(), 4);
        assert_eq!(p.shift(2).to_string(), "q^2 + q^3");
        assert_eq!(QPoly::from_coeffs(vec![1, -1]).to_string(), "1 - q");
    }

    #[test]
    fn vpoly_from_kl() {
        // P = 1 + q, l(w)-l(x) = 4: v^4 P(v^-2) = v^4 + v^2
        let h = VPoly::from_kl(&QPoly::from_coeffs(vec![1, 1]), 4);
        assert_eq!(h.coeff(4), 1);
        assert_eq!(h.coeff(2), 1);
        assert_eq!(h.coeff(0), 0);
        assert_eq!(h.to_string(), "v^4 + v^2");
        // P = 1, gap 0: v^0
        assert_eq!(VPoly::from_kl(&QPoly::one(), 0).to_string(), "1");
        // gap 1, P = 1: v
        assert_eq!(VPoly::from_kl(&QPoly::one(), 1).to_string(), "v");
    }
}
