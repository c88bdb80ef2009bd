//! Monomial bases of the symmetric algebra, one level per degree.
//!
//! `PolyRing` fixes the number of variables and a truncation bound and
//! enumerates the monomials of each degree in a deterministic order
//! (lexicographic by exponent vector, first variable major, descending).
//! Multiplication by a variable is a precomputed index map between
//! consecutive levels.

use super::field::Field;
use super::mat::Mat;
use std::collections::HashMap;
use std::fmt;

pub struct PolyRing {
    pub nvars: usize,
    pub dmax: usize,
    levels: Vec<Level>,
}

struct Level {
    monos: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    /// mult[var][i] = index of monos[i] * x_var in the next level
    mult: Vec<Vec<usize>>,
}

fn enumerate_monos(nvars: usize, deg: usize) -> Vec<Vec<u8>> {
    fn rec(out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, left: usize, vars_left: usize) {
        if vars_left == 1 {
            cur.push(left as u8);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e as u8);
            rec(out, cur, left - e, vars_left - 1);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut out, &mut Vec::new(), deg, nvars);
    out
}

impl fmt::Debug for PolyRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyRing({} vars, dmax {})", self.nvars, self.dmax)
    }
}

impl PolyRing {
    pub fn new(nvars: usize, dmax: usize) -> PolyRing {
        assert!(nvars >= 1);
        let mut levels: Vec<Level> = Vec::with_capacity(dmax + 1);
        for d in 0..=dmax {
            let monos = enumerate_monos(nvars, d);
            let index: HashMap<Vec<u8>, usize> =
                monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
            levels.push(Level { monos, index, mult: Vec::new() });
        }
        for d in 0..dmax {
            let mut mult = Vec::with_capacity(nvars);
            for v in 0..nvars {
                let map = levels[d]
                    .monos
                    .iter()
                    .map(|m| {
                        let mut up = m.clone();
                        up[v] += 1;
                        levels[d + 1].index[&up]
                    })
                    .collect();
                mult.push(map);
            }
            levels[d].mult = mult;
        }
        PolyRing { nvars, dmax, levels }
    }

    /// dim S_d = C(d + nvars - 1, nvars - 1)
    pub fn dim(&self, d: usize) -> usize {
        self.levels[d].monos.len()
    }

    pub fn monos(&self, d: usize) -> &[Vec<u8>] {
        &self.levels[d].monos
    }

    pub fn mono_index(&self, m: &[u8]) -> Option<usize> {
        let d: usize = m.iter().map(|&e| e as usize).sum();
        if d > self.dmax {
            return None;
        }
        self.levels[d].index.get(m).copied()
    }

    /// Index of `monos(d)[i] * x_var` in level d+1.
    pub fn mult_index(&self, d: usize, var: usize, i: usize) -> usize {
        self.levels[d].mult[var][i]
    }

    /// Matrix of multiplication by the linear form with the given
    /// coefficients, as a map S_d -> S_{d+1}.
    pub fn linear_form_mat<F: Field>(&self, f: F, coeffs: &[F::Elem], d: usize) -> Mat<F> {
        assert_eq!(coeffs.len(), self.nvars);
        let mut m = Mat::zeros(f, self.dim(d + 1), self.dim(d));
        for (v, c) in coeffs.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            for i in 0..self.dim(d) {
                let j = self.mult_index(d, v, i);
                let cur = f.add(m.at(j, i), c);
                m.set(j, i, cur);
            }
        }
        m
    }

    /// Apply multiplication by a linear form to a coefficient vector in S_d.
    pub fn apply_linear_form<F: Field>(
        &self,
        f: F,
        coeffs: &[F::Elem],
        d: usize,
        v: &[F::Elem],
    ) -> Vec<F::Elem> {
        let mut out = vec![f.zero(); self.dim(d + 1)];
        for (var, c) in coeffs.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            for (i, x) in v.iter().enumerate() {
                if !f.is_zero(x) {
                    let j = self.mult_index(d, var, i);
                    f.add_assign(&mut out[j], &f.mul(c, x));
                }
            }
        }
        out
    }
}
