//! Finite and affine Weyl groups acting linearly on V ⊕ ℚ.
//!
//! Group elements are canonicalized as (r+1)x(r+1) integer matrices in the
//! basis (simple roots, second-summand unit); the affine reflection s_{α,n}
//! acts at level ξ by λ ↦ λ - (⟨λ,α∨⟩ - ξn)α. Equality is matrix equality.
//! Lengths come from a cached breadth-first search of the Cayley graph with
//! an explicit horizon: a query beyond the horizon is an error, never a
//! wrong answer.

use crate::arith::Rat;
use crate::rootsys::RootSystem;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

pub type ElemId = u32;

const LEN_UNKNOWN: u32 = u32::MAX;

/// Dense little integer matrix, row major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WMat {
    pub n: usize,
    pub data: Vec<i64>,
}

impl WMat {
    pub fn identity(n: usize) -> WMat {
        let mut data = vec![0i64; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        WMat { n, data }
    }

    pub fn at(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn mul(&self, o: &WMat) -> WMat {
        assert_eq!(self.n, o.n);
        let n = self.n;
        let mut data = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * o.at(k, j);
                }
            }
        }
        WMat { n, data }
    }

    /// Exact inverse; the group matrices are unimodular so the inverse is
    /// integral. Computed by rational elimination, then checked.
    pub fn inverse(&self) -> WMat {
        let n = self.n;
        let mut aug: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                let mut row: Vec<Rat> = (0..n).map(|j| Rat::from_int(self.at(i, j))).collect();
                row.extend((0..n).map(|j| Rat::from_int((i == j) as i64)));
                row
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&i| !aug[i][col].is_zero()).expect("singular group matrix");
            aug.swap(col, piv);
            let inv = aug[col][col].inv().unwrap();
            for x in aug[col].iter_mut() {
                *x = x.mul(&inv);
            }
            for i in 0..n {
                if i != col && !aug[i][col].is_zero() {
                    let c = aug[i][col].clone();
                    for j in 0..2 * n {
                        let t = c.mul(&aug[col][j]);
                        aug[i][j] = aug[i][j].sub(&t);
                    }
                }
            }
        }
        let mut data = Vec::with_capacity(n * n);
        for row in &aug {
            for x in &row[n..] {
                data.push(x.as_int().expect("non-integral inverse"));
            }
        }
        let out = WMat { n, data };
        debug_assert_eq!(self.mul(&out), WMat::identity(n));
        out
    }

    /// Apply at level 1: image of (λ, 1) for λ in simple-root coordinates.
    pub fn act_level1(&self, lambda: &[Rat]) -> Vec<Rat> {
        let n = self.n;
        assert_eq!(lambda.len(), n - 1);
        (0..n - 1)
            .map(|i| {
                let mut acc = Rat::from_int(self.at(i, n - 1));
                for (j, l) in lambda.iter().enumerate() {
                    acc = acc.add(&l.mul(&Rat::from_int(self.at(i, j))));
                }
                acc
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeylError {
    /// BFS horizon exceeded before the element (or length) was found.
    Horizon { horizon: u32 },
    /// Elements of different underlying groups were combined.
    MixedSystems,
    /// Reduced word parse failure at a token.
    WordParse { position: usize, token: String },
    /// The input word is not reduced: its element has shorter length.
    NotReduced { word_len: usize, length: u32 },
    NotInInterval,
}

impl fmt::Display for WeylError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeylError::Horizon { horizon } => {
                write!(f, "BFS horizon {horizon} exceeded; raise the horizon")
            }
            WeylError::MixedSystems => write!(f, "elements from different groups"),
            WeylError::WordParse { position, token } => {
                write!(f, "cannot parse generator `{token}` at word position {position}")
            }
            WeylError::NotReduced { word_len, length } => {
                write!(f, "word of {word_len} letters is not reduced (element has length {length})")
            }
            WeylError::NotInInterval => write!(f, "element outside the Bruhat interval"),
        }
    }
}

impl std::error::Error for WeylError {}

/// Generator labels: `s1..sr` are the finite simple reflections, `s0` the
/// affine one (s_{θ,1}).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct Gen(pub u8);

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

pub struct WeylGroup {
    pub rs: Arc<RootSystem>,
    pub affine: bool,
    pub dim: usize,
    /// (label, element), sorted by label; label 0 is the affine generator
    gens: Vec<(Gen, ElemId)>,
    elems: Vec<WMat>,
    index: HashMap<WMat, ElemId>,
    lengths: Vec<u32>,
    /// elements of each BFS layer, layer l = elements of length l
    layers: Vec<Vec<ElemId>>,
    horizon: u32,
    leq_memo: HashMap<(ElemId, ElemId), bool>,
    inv_memo: HashMap<ElemId, ElemId>,
}

impl WeylGroup {
    pub fn new(rs: Arc<RootSystem>, affine: bool, horizon: u32) -> WeylGroup {
        let dim = rs.rank + 1;
        let mut g = WeylGroup {
            rs,
            affine,
            dim,
            gens: Vec::new(),
            elems: Vec::new(),
            index: HashMap::new(),
            lengths: Vec::new(),
            layers: Vec::new(),
            horizon,
            leq_memo: HashMap::new(),
            inv_memo: HashMap::new(),
        };
        let id = g.intern(WMat::identity(dim));
        g.lengths[id as usize] = 0;
        g.layers.push(vec![id]);
        let mut gens = Vec::new();
        if affine {
            let theta = g.rs.theta;
            let m = g.reflection_matrix(theta, 1);
            gens.push((Gen(0), g.intern(m)));
        }
        for i in 0..g.rs.rank {
            let m = g.reflection_matrix(i, 0);
            gens.push((Gen(i as u8 + 1), g.intern(m)));
        }
        gens.sort_by_key(|&(l, _)| l);
        g.gens = gens;
        g
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn set_horizon(&mut self, h: u32) {
        self.horizon = self.horizon.max(h);
    }

    pub fn identity(&self) -> ElemId {
        0
    }

    pub fn generators(&self) -> &[(Gen, ElemId)] {
        &self.gens
    }

    pub fn matrix(&self, x: ElemId) -> &WMat {
        &self.elems[x as usize]
    }

    /// Matrix of s_{α,n} in the basis (α_1..α_r, unit of the second summand):
    /// column j is α_j - ⟨α_j,α∨⟩ α, the last column is (n α, 1).
    pub fn reflection_matrix(&self, root_idx: usize, n: i64) -> WMat {
        let r = self.rs.rank;
        let a = &self.rs.positive_roots[root_idx].root;
        let pair = &self.rs.positive_roots[root_idx].coroot_pairings;
        let mut m = WMat::identity(r + 1);
        for j in 0..r {
            for i in 0..r {
                m.data[i * (r + 1) + j] -= pair[j] * a[i];
            }
        }
        for i in 0..r {
            m.data[i * (r + 1) + r] = n * a[i];
        }
        m
    }

    fn intern(&mut self, m: WMat) -> ElemId {
        if let Some(&id) = self.index.get(&m) {
            return id;
        }
        let id = self.elems.len() as ElemId;
        self.elems.push(m.clone());
        self.index.insert(m, id);
        self.lengths.push(LEN_UNKNOWN);
        id
    }

    pub fn multiply(&mut self, a: ElemId, b: ElemId) -> ElemId {
        let m = self.elems[a as usize].mul(&self.elems[b as usize]);
        self.intern(m)
    }

    pub fn invert(&mut self, a: ElemId) -> ElemId {
        if let Some(&id) = self.inv_memo.get(&a) {
            return id;
        }
        let m = self.elems[a as usize].inverse();
        let id = self.intern(m);
        self.inv_memo.insert(a, id);
        self.inv_memo.insert(id, a);
        id
    }

    /// Grow the BFS ball of the Cayley graph to the given radius (capped by
    /// the horizon).
    fn expand_to(&mut self, len: u32) {
        let len = len.min(self.horizon);
        if self.exhausted() {
            return;
        }
        while (self.layers.len() as u32) <= len {
            let prev: Vec<ElemId> = self.layers.last().unwrap().clone();
            let depth = self.layers.len() as u32;
            let mut layer = Vec::new();
            let gen_ids: Vec<ElemId> = self.gens.iter().map(|&(_, g)| g).collect();
            for x in prev {
                for &g in &gen_ids {
                    let m = self.elems[g as usize].mul(&self.elems[x as usize]);
                    let id = self.intern(m);
                    if self.lengths[id as usize] == LEN_UNKNOWN {
                        self.lengths[id as usize] = depth;
                        layer.push(id);
                    }
                }
            }
            let done = layer.is_empty();
            self.layers.push(layer);
            if done {
                break;
            }
        }
    }

    /// Whether the whole (finite) group has been enumerated.
    fn exhausted(&self) -> bool {
        self.layers.last().is_some_and(|l| l.is_empty())
    }

    pub fn length(&mut self, x: ElemId) -> Result<u32, WeylError> {
        if self.lengths[x as usize] != LEN_UNKNOWN {
            return Ok(self.lengths[x as usize]);
        }
        self.expand_to(self.horizon);
        if self.lengths[x as usize] != LEN_UNKNOWN {
            Ok(self.lengths[x as usize])
        } else {
            Err(WeylError::Horizon { horizon: self.horizon })
        }
    }

    /// All elements of length exactly l (expanding the ball as needed).
    pub fn layer(&mut self, l: u32) -> Result<Vec<ElemId>, WeylError> {
        self.expand_to(l);
        if (l as usize) < self.layers.len() {
            Ok(self.layers[l as usize].clone())
        } else if self.exhausted() {
            Ok(Vec::new())
        } else {
            Err(WeylError::Horizon { horizon: self.horizon })
        }
    }

    /// Left multiplication by the generator with the given label.
    pub fn left_mul_gen(&mut self, g: Gen, x: ElemId) -> ElemId {
        let gid = self
            .gens
            .iter()
            .find(|&&(l, _)| l == g)
            .map(|&(_, e)| e)
            .expect("unknown generator label");
        self.multiply(gid, x)
    }

    /// Right multiplication by the generator with the given label.
    pub fn right_mul_gen(&mut self, x: ElemId, g: Gen) -> ElemId {
        let gid = self
            .gens
            .iter()
            .find(|&&(l, _)| l == g)
            .map(|&(_, e)| e)
            .expect("unknown generator label");
        self.multiply(x, gid)
    }

    /// Smallest-label s with l(s x) < l(x); None for the identity.
    pub fn left_descent(&mut self, x: ElemId) -> Result<Option<(Gen, ElemId)>, WeylError> {
        let lx = self.length(x)?;
        if lx == 0 {
            return Ok(None);
        }
        for (g, gid) in self.gens.clone() {
            let sx = self.multiply(gid, x);
            if self.length(sx)? < lx {
                return Ok(Some((g, sx)));
            }
        }
        unreachable!("non-identity element without descent")
    }

    /// The standard descent recursion for Bruhat order: with s a left
    /// descent of w, x ≤ w iff (sx ≤ sw when sx < x) else (x ≤ sw).
    pub fn bruhat_leq(&mut self, x: ElemId, w: ElemId) -> Result<bool, WeylError> {
        if x == w || x == self.identity() {
            return Ok(true);
        }
        if self.length(x)? >= self.length(w)? {
            return Ok(false);
        }
        if let Some(&v) = self.leq_memo.get(&(x, w)) {
            return Ok(v);
        }
        let (g, sw) = self.left_descent(w)?.expect("w != e here");
        let sx = self.left_mul_gen(g, x);
        let ans = if self.length(sx)? < self.length(x)? {
            self.bruhat_leq(sx, sw)?
        } else {
            self.bruhat_leq(x, sw)?
        };
        self.leq_memo.insert((x, w), ans);
        Ok(ans)
    }

    /// Serialize to the lexicographically smallest reduced word (by
    /// generator label, s0 < s1 < ...).
    pub fn word(&mut self, x: ElemId) -> Result<Vec<Gen>, WeylError> {
        let mut out = Vec::new();
        let mut cur = x;
        while let Some((g, sx)) = self.left_descent(cur)? {
            out.push(g);
            cur = sx;
        }
        Ok(out)
    }

    /// Parse a whitespace-separated word like "s1 s0 s1" and multiply the
    /// generators left to right.
    pub fn parse_word(&mut self, s: &str) -> Result<(ElemId, Vec<Gen>), WeylError> {
        let mut gens = Vec::new();
        for (i, tok) in s.split_whitespace().enumerate() {
            let fail = || WeylError::WordParse { position: i, token: tok.to_string() };
            let rest = tok.strip_prefix('s').ok_or_else(fail)?;
            let label: u8 = rest.parse().map_err(|_| fail())?;
            let ok = (label as usize) <= self.rs.rank && (label != 0 || self.affine);
            if !ok {
                return Err(fail());
            }
            gens.push(Gen(label));
        }
        let mut cur = self.identity();
        for &g in &gens {
            cur = self.right_mul_gen(cur, g);
        }
        Ok((cur, gens))
    }

    /// Unique (α ∈ R+, n) with g = s_{α,n}, if g is a reflection.
    pub fn is_reflection(&self, g: &WMat) -> Option<(usize, i64)> {
        let r = self.rs.rank;
        if *g == WMat::identity(self.dim) {
            return None;
        }
        for root_idx in 0..self.rs.positive_roots.len() {
            let a = &self.rs.positive_roots[root_idx].root;
            // last column must be n * α
            let mut n: Option<i64> = None;
            let mut ok = true;
            for i in 0..r {
                let c = g.at(i, r);
                if a[i] == 0 {
                    if c != 0 {
                        ok = false;
                        break;
                    }
                } else {
                    if c % a[i] != 0 {
                        ok = false;
                        break;
                    }
                    let q = c / a[i];
                    match n {
                        None => n = Some(q),
                        Some(p) if p == q => {}
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
            }
            if !ok {
                continue;
            }
            let n = n.unwrap_or(0);
            if !self.affine && n != 0 {
                continue;
            }
            if *g == self.reflection_matrix(root_idx, n) {
                return Some((root_idx, n));
            }
        }
        None
    }

    /// n_w(x) = #{t reflection : t x ≤ w} = #{y in the interval with
    /// y x^{-1} a reflection}.
    pub fn deodhar_count(
        &mut self,
        x: ElemId,
        interval: &BruhatInterval,
    ) -> Result<usize, WeylError> {
        if !interval.contains(x) {
            return Err(WeylError::NotInInterval);
        }
        let xinv = self.invert(x);
        let mut count = 0;
        for &y in &interval.elems {
            let t = self.multiply(y, xinv);
            let m = self.elems[t as usize].clone();
            if self.is_reflection(&m).is_some() {
                count += 1;
            }
        }
        Ok(count)
    }

    /// The lower Bruhat interval {x : x ≤ w}, sorted by (length, word).
    pub fn lower_interval(&mut self, w: ElemId) -> Result<BruhatInterval, WeylError> {
        let lw = self.length(w)?;
        self.expand_to(lw);
        let mut elems: Vec<ElemId> = Vec::new();
        for l in 0..=lw {
            for x in self.layer(l)? {
                if self.bruhat_leq(x, w)? {
                    elems.push(x);
                }
            }
        }
        let mut keyed: Vec<(u32, Vec<Gen>, ElemId)> = Vec::with_capacity(elems.len());
        for x in elems {
            let word = self.word(x)?;
            keyed.push((self.length(x)?, word, x));
        }
        keyed.sort();
        let elems: Vec<ElemId> = keyed.iter().map(|k| k.2).collect();
        let lengths: Vec<u32> = keyed.iter().map(|k| k.0).collect();
        let words: Vec<Vec<Gen>> = keyed.into_iter().map(|k| k.1).collect();
        let pos: HashMap<ElemId, usize> = elems.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let n = elems.len();
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                leq[i][j] = self.bruhat_leq(elems[i], elems[j])?;
            }
        }
        Ok(BruhatInterval { w, elems, lengths, words, pos, leq })
    }

    /// Longest element of the finite Weyl group (ignores the affine
    /// generator).
    pub fn finite_longest(&mut self) -> ElemId {
        let fin_gens: Vec<ElemId> = self
            .gens
            .iter()
            .filter(|&&(l, _)| l.0 != 0)
            .map(|&(_, e)| e)
            .collect();
        let mut frontier = vec![self.identity()];
        let mut seen: std::collections::HashSet<ElemId> =
            frontier.iter().copied().collect();
        let mut last = self.identity();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for x in frontier {
                for &g in &fin_gens {
                    let y = self.multiply(g, x);
                    if seen.insert(y) {
                        next.push(y);
                    }
                }
            }
            if let Some(&y) = next.first() {
                last = y;
                // the top layer of a finite Coxeter group is a single element
                debug_assert!(next.len() == 1 || !next.is_empty());
            }
            frontier = next;
        }
        last
    }

    /// Membership in the restricted antidominant set: w = w0·u with
    /// 0 ≤ ⟨u·0, α∨⟩ < p for all simple α, where u·0 = u(ρ) - ρ.
    pub fn is_restricted_antidominant(&mut self, w: ElemId, p: u64) -> Result<bool, WeylError> {
        assert!(p > 0, "characteristic must be positive");
        let w0 = self.finite_longest();
        let u = self.multiply(w0, w);
        let rho = self.rs.rho.clone();
        let img = self.elems[u as usize].act_level1(&rho);
        let dot0: Vec<Rat> = img.iter().zip(&rho).map(|(a, b)| a.sub(b)).collect();
        for i in 0..self.rs.rank {
            let v = self.rs.pair_rat(&dot0, i);
            if v < Rat::ZERO || v >= Rat::from_int(p as i64) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The lower interval of w with per-pair order data.
pub struct BruhatInterval {
    pub w: ElemId,
    /// sorted by (length, serialized reduced word)
    pub elems: Vec<ElemId>,
    pub lengths: Vec<u32>,
    pub words: Vec<Vec<Gen>>,
    pos: HashMap<ElemId, usize>,
    leq: Vec<Vec<bool>>,
}

impl BruhatInterval {
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, x: ElemId) -> bool {
        self.pos.contains_key(&x)
    }

    pub fn position(&self, x: ElemId) -> Option<usize> {
        self.pos.get(&x).copied()
    }

    /// Bruhat comparison by interval positions.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn length_of(&self, i: usize) -> u32 {
        self.lengths[i]
    }

    pub fn max_length(&self) -> u32 {
        *self.lengths.last().unwrap_or(&0)
    }

    pub fn word_string(&self, i: usize) -> String {
        if self.words[i].is_empty() {
            "e".to_string()
        } else {
            self.words[i].iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" ")
        }
    }

    /// Covering pairs (i, j): i < j, l(j) = l(i) + 1.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in 0..self.len() {
                if self.lengths[j] == self.lengths[i] + 1 && self.leq[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Positions of {i : x_i ≥ x_j}.
    pub fn up_set(&self, j: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.leq[j][i]).collect()
    }
}
