//! Shared helpers for the integration tests, most importantly the
//! independent Kazhdan-Lusztig oracle.
//!
//! The oracle computes R-polynomials by their own recursion and recovers
//! the KL polynomials from the defining triangular identity
//!
//!   q^(l(w)-l(x)) P_{x,w}(1/q) - P_{x,w} = Σ_{x<z≤w} R_{x,z} P_{z,w},
//!
//! using only the degree bound deg P < (l(w)-l(x))/2. It never touches the
//! descent-recursion code path in the library, and it asserts the full
//! identity for every pair it produces.

#![allow(dead_code)]

use mgsheaf::arith::QPoly;
use mgsheaf::momentgraph::MomentGraph;
use mgsheaf::rootsys::{CartanType, RootSystem};
use mgsheaf::weyl::{BruhatInterval, ElemId, WeylGroup};
use std::collections::HashMap;
use std::sync::Arc;

pub fn group(t: CartanType, affine: bool, horizon: u32) -> WeylGroup {
    WeylGroup::new(Arc::new(RootSystem::new(t).unwrap()), affine, horizon)
}

/// All elements with length at most `maxlen`.
pub fn ball(weyl: &mut WeylGroup, maxlen: u32) -> Vec<ElemId> {
    let mut out = Vec::new();
    for l in 0..=maxlen {
        out.extend(weyl.layer(l).unwrap());
    }
    out
}

/// Interval positions and length data compressed for the oracle.
struct OracleTables {
    n: usize,
    lengths: Vec<u32>,
    leq: Vec<Vec<bool>>,
    smul: Vec<Vec<Option<usize>>>,
}

fn tables(weyl: &mut WeylGroup, interval: &BruhatInterval) -> OracleTables {
    let n = interval.len();
    let gens: Vec<_> = weyl.generators().to_vec();
    let mut smul = Vec::new();
    for &(g, _) in &gens {
        let mut row = Vec::with_capacity(n);
        for &x in &interval.elems {
            let sx = weyl.left_mul_gen(g, x);
            row.push(interval.position(sx));
        }
        smul.push(row);
    }
    let leq = (0..n).map(|i| (0..n).map(|j| interval.leq(i, j)).collect()).collect();
    OracleTables { n, lengths: interval.lengths.clone(), leq, smul }
}

fn r_poly(
    t: &OracleTables,
    memo: &mut HashMap<(usize, usize), QPoly>,
    x: usize,
    w: usize,
) -> QPoly {
    if x == w {
        return QPoly::one();
    }
    if !t.leq[x][w] {
        return QPoly::zero();
    }
    if let Some(p) = memo.get(&(x, w)) {
        return p.clone();
    }
    // any left descent s of w: l(sw) < l(w)
    let s = (0..t.smul.len())
        .find(|&s| t.smul[s][w].is_some_and(|sw| t.lengths[sw] < t.lengths[w]))
        .expect("non-identity w has a descent");
    let sw = t.smul[s][w].unwrap();
    let sx = t.smul[s][x];
    let x_desc = sx.is_some_and(|sx| t.lengths[sx] < t.lengths[x]);
    let r = if x_desc {
        r_poly(t, memo, sx.unwrap(), sw)
    } else {
        // (q-1) R_{x,sw} + q R_{sx,sw}; sx outside the interval cannot be
        // below sw
        let a = r_poly(t, memo, x, sw).mul(&QPoly::from_coeffs(vec![-1, 1]));
        let b = match sx {
            Some(sx) => r_poly(t, memo, sx, sw).shift(1),
            None => QPoly::zero(),
        };
        a.add(&b)
    };
    memo.insert((x, w), r.clone());
    r
}

/// KL polynomials for every pair of the interval, by the R-polynomial
/// route. Panics if the defining identity fails for any pair.
pub fn kl_via_r_oracle(
    weyl: &mut WeylGroup,
    interval: &BruhatInterval,
) -> HashMap<(usize, usize), QPoly> {
    let t = tables(weyl, interval);
    let mut rmemo: HashMap<(usize, usize), QPoly> = HashMap::new();
    let mut p: HashMap<(usize, usize), QPoly> = HashMap::new();
    for w in 0..t.n {
        // descending positions: all z with x < z ≤ w come earlier
        for x in (0..=w).rev() {
            if !t.leq[x][w] {
                continue;
            }
            if x == w {
                p.insert((x, w), QPoly::one());
                continue;
            }
            let gap = (t.lengths[w] - t.lengths[x]) as usize;
            let mut f = QPoly::zero();
            for z in 0..=w {
                if z == x || !t.leq[x][z] || !t.leq[z][w] {
                    continue;
                }
                let rv = r_poly(&t, &mut rmemo, x, z);
                f = f.add(&rv.mul(&p[&(z, w)]));
            }
            // coefficients below gap/2 come only from -P
            let half = gap.div_ceil(2);
            let poly = f.truncate_below(half).scale(-1);
            // the full identity must hold: q^gap P(1/q) - P = F
            let mut rev = vec![0i64; gap + 1];
            for (i, &c) in poly.coeffs().iter().enumerate() {
                rev[gap - i] += c;
            }
            let lhs = QPoly::from_coeffs(rev).sub(&poly);
            assert_eq!(lhs, f, "triangular identity failed at ({x},{w})");
            p.insert((x, w), poly);
        }
    }
    p
}

/// Moment graph over Q for the lower interval of a word.
pub fn graph_q(
    t: CartanType,
    affine: bool,
    word: &str,
) -> (WeylGroup, MomentGraph<mgsheaf::arith::Rationals>) {
    let mut weyl = group(t, affine, 24);
    let (w, _) = weyl.parse_word(word).unwrap();
    let interval = weyl.lower_interval(w).unwrap();
    let graph = MomentGraph::build(&mut weyl, interval, mgsheaf::arith::Rationals).unwrap();
    (weyl, graph)
}
