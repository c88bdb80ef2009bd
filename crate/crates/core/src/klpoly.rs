//! Kazhdan-Lusztig polynomials by the classical descent recursion.
//!
//! For a left descent s of w (so sw < w) and x ≤ w,
//!
//!   P_{x,w} = q^{1-c} P_{sx,sw} + q^c P_{x,sw}
//!             - Σ_z μ(z,sw) q^{(l(w)-l(z))/2} P_{x,z},
//!
//! where c = 1 if sx < x and 0 otherwise, the sum runs over x ≤ z < sw with
//! sz < z, and μ(z,v) is the coefficient of q^{(l(v)-l(z)-1)/2} in P_{z,v}.
//! The table is memoized per Bruhat interval; every value can be recomputed
//! through any available descent, which `check_descent_independence`
//! exercises.

use crate::arith::{QPoly, VPoly};
use crate::weyl::{BruhatInterval, ElemId, WeylError, WeylGroup};
use std::collections::HashMap;

pub struct KLTable {
    n: usize,
    lengths: Vec<u32>,
    leq: Vec<Vec<bool>>,
    /// smul[g][i]: position of (generator g) * x_i, if inside the interval
    smul: Vec<Vec<Option<usize>>>,
    memo: HashMap<(usize, usize), QPoly>,
    words: Vec<String>,
}

impl KLTable {
    pub fn new(weyl: &mut WeylGroup, interval: &BruhatInterval) -> Result<KLTable, WeylError> {
        let n = interval.len();
        let gens: Vec<_> = weyl.generators().to_vec();
        let mut smul = Vec::with_capacity(gens.len());
        for &(g, _) in &gens {
            let mut row = Vec::with_capacity(n);
            for &x in &interval.elems {
                let sx = weyl.left_mul_gen(g, x);
                row.push(interval.position(sx));
            }
            smul.push(row);
        }
        let leq = (0..n)
            .map(|i| (0..n).map(|j| interval.leq(i, j)).collect())
            .collect();
        let words = (0..n).map(|i| interval.word_string(i)).collect();
        Ok(KLTable { n, lengths: interval.lengths.clone(), leq, smul, memo: HashMap::new(), words })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn length_of(&self, i: usize) -> u32 {
        self.lengths[i]
    }

    pub fn leq(&self, x: usize, w: usize) -> bool {
        self.leq[x][w]
    }

    /// Generator indices s (into the group's generator list) with sw < w.
    fn descents(&self, w: usize) -> Vec<usize> {
        (0..self.smul.len())
            .filter(|&s| self.smul[s][w].is_some_and(|sw| self.lengths[sw] < self.lengths[w]))
            .collect()
    }

    /// μ(z, v): coefficient of q^{(l(v)-l(z)-1)/2} in P_{z,v}.
    fn mu(&mut self, z: usize, v: usize) -> i64 {
        let gap = self.lengths[v] as i64 - self.lengths[z] as i64 - 1;
        if gap < 0 || gap % 2 != 0 {
            return 0;
        }
        let p = self.kl(z, v);
        p.coeff((gap / 2) as usize)
    }

    /// P_{x,w} through the first available descent of w.
    pub fn kl(&mut self, x: usize, w: usize) -> QPoly {
        if let Some(p) = self.memo.get(&(x, w)) {
            return p.clone();
        }
        let p = match self.descents(w).first() {
            Some(&s) => self.kl_via(x, w, s),
            None => {
                // w = e
                if x == w {
                    QPoly::one()
                } else {
                    QPoly::zero()
                }
            }
        };
        self.memo.insert((x, w), p.clone());
        p
    }

    /// P_{x,w} computed through the specific descent s of w.
    pub fn kl_via(&mut self, x: usize, w: usize, s: usize) -> QPoly {
        if x == w {
            return QPoly::one();
        }
        if !self.leq[x][w] {
            return QPoly::zero();
        }
        let v = self.smul[s][w].expect("descent stays in the interval");
        debug_assert!(self.lengths[v] < self.lengths[w]);
        let sx = self.smul[s][x];
        let c = sx.is_some_and(|sx| self.lengths[sx] < self.lengths[x]);
        let p_sx_v = match sx {
            Some(sx) => self.kl(sx, v),
            // sx outside the interval: sx is not below v
            None => QPoly::zero(),
        };
        let p_x_v = self.kl(x, v);
        let mut p = if c {
            p_sx_v.add(&p_x_v.shift(1))
        } else {
            p_sx_v.shift(1).add(&p_x_v)
        };
        // μ-correction
        for z in 0..self.n {
            if z == v || !self.leq[x][z] || !self.leq[z][v] {
                continue;
            }
            let sz_desc = self.smul[s][z].is_some_and(|sz| self.lengths[sz] < self.lengths[z]);
            if !sz_desc {
                continue;
            }
            let m = self.mu(z, v);
            if m == 0 {
                continue;
            }
            let exp = (self.lengths[w] - self.lengths[z]) as usize / 2;
            debug_assert_eq!((self.lengths[w] - self.lengths[z]) % 2, 0);
            let term = self.kl(x, z).scale(m).shift(exp);
            p = p.sub(&term);
        }
        p
    }

    /// Recompute P_{x,w} through every descent of w; all must agree with the
    /// memoized value. Returns the violations.
    pub fn check_descent_independence(&mut self) -> Vec<String> {
        let mut bad = Vec::new();
        for w in 0..self.n {
            for x in 0..self.n {
                if !self.leq[x][w] {
                    continue;
                }
                let reference = self.kl(x, w);
                for s in self.descents(w) {
                    let alt = self.kl_via(x, w, s);
                    if alt != reference {
                        bad.push(format!(
                            "P({}, {}) differs through descent {}: {} vs {}",
                            self.words[x], self.words[w], s, alt, reference
                        ));
                    }
                }
            }
        }
        bad
    }

    /// The four table invariants: P_{w,w} = 1, vanishing off the order,
    /// degree bound, constant term 1.
    pub fn check_invariants(&mut self) -> Vec<String> {
        let mut bad = Vec::new();
        for w in 0..self.n {
            for x in 0..self.n {
                let p = self.kl(x, w);
                if x == w && !p.is_one() {
                    bad.push(format!("P({w},{w}) != 1"));
                }
                if self.leq[x][w] {
                    if p.coeff(0) != 1 {
                        bad.push(format!(
                            "constant term of P({}, {}) = {} is not 1",
                            self.words[x], self.words[w], p
                        ));
                    }
                    if x != w {
                        let gap = self.lengths[w] - self.lengths[x];
                        if let Some(d) = p.degree() {
                            if 2 * d as u32 >= gap {
                                bad.push(format!(
                                    "deg P({}, {}) = {} not below (l(w)-l(x))/2",
                                    self.words[x], self.words[w], d
                                ));
                            }
                        }
                    }
                } else if !p.is_zero() {
                    bad.push(format!(
                        "P({}, {}) nonzero but x not below w",
                        self.words[x], self.words[w]
                    ));
                }
            }
        }
        bad
    }

    /// TSV rows "x-word \t w-word \t c0,c1,..." for all x below the interval top.
    pub fn to_tsv(&mut self) -> String {
        let w = self.n - 1;
        let mut out = String::from("x\tw\tP\n");
        for x in 0..self.n {
            if !self.leq[x][w] {
                continue;
            }
            let p = self.kl(x, w);
            let coeffs: Vec<String> = if p.is_zero() {
                vec!["0".into()]
            } else {
                p.coeffs().iter().map(|c| c.to_string()).collect()
            };
            out.push_str(&format!("{}\t{}\t{}\n", self.words[x], self.words[w], coeffs.join(",")));
        }
        out
    }

    pub fn word(&self, i: usize) -> &str {
        &self.words[i]
    }
}

/// h_{x,w}(v) = v^(l(w)-l(x)) P_{x,w}(v^-2).
pub fn h_polynomial(table: &mut KLTable, x: usize, w: usize) -> Result<VPoly, WeylError> {
    if !table.leq(x, w) {
        return Err(WeylError::NotInInterval);
    }
    let gap = (table.lengths[w] - table.lengths[x]) as usize;
    Ok(VPoly::from_kl(&table.kl(x, w), gap))
}

/// Deodhar's combinatorial smoothness predicate: n_w(x) = l(w).
pub fn deodhar_smooth(
    weyl: &mut WeylGroup,
    interval: &BruhatInterval,
    x: ElemId,
) -> Result<bool, WeylError> {
    let n = weyl.deodhar_count(x, interval)?;
    Ok(n as u32 == interval.max_length())
}
