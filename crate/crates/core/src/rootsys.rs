//! Finite irreducible root systems and affine coroots.
//!
//! Roots are stored in simple-root coordinates and coroots in simple-coroot
//! coordinates, both integral. For a coroot we also keep its coordinates in
//! the basis of fundamental coweights, i.e. the pairing row
//! (⟨α_1, β∨⟩, ..., ⟨α_r, β∨⟩); together with the δ∨ coordinate these are
//! the integral moment graph label coordinates. With these conventions the
//! pairing of a vector in simple-root coordinates against a coroot is a
//! plain dot product.

use crate::arith::Rat;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum CartanType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    G2,
}

impl CartanType {
    pub fn rank(&self) -> usize {
        match *self {
            CartanType::A(r) | CartanType::B(r) | CartanType::C(r) | CartanType::D(r) => r,
            CartanType::G2 => 2,
        }
    }

    pub fn parse(s: &str) -> Result<CartanType, RootSystemError> {
        let err = || RootSystemError::UnsupportedType(s.to_string());
        let s = s.trim();
        if s.eq_ignore_ascii_case("G2") {
            return Ok(CartanType::G2);
        }
        if s.len() < 2 {
            return Err(err());
        }
        let (letter, num) = s.split_at(1);
        let r: usize = num.parse().map_err(|_| err())?;
        let t = match letter {
            "A" | "a" => CartanType::A(r),
            "B" | "b" => CartanType::B(r),
            "C" | "c" => CartanType::C(r),
            "D" | "d" => CartanType::D(r),
            _ => return Err(err()),
        };
        t.validate().then_some(t).ok_or_else(err)
    }

    fn validate(&self) -> bool {
        match *self {
            CartanType::A(r) => (1..=4).contains(&r),
            CartanType::B(r) | CartanType::C(r) => (2..=4).contains(&r),
            CartanType::D(r) => r == 4,
            CartanType::G2 => true,
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CartanType::A(r) => write!(f, "A{r}"),
            CartanType::B(r) => write!(f, "B{r}"),
            CartanType::C(r) => write!(f, "C{r}"),
            CartanType::D(r) => write!(f, "D{r}"),
            CartanType::G2 => write!(f, "G2"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootSystemError {
    UnsupportedType(String),
}

impl fmt::Display for RootSystemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootSystemError::UnsupportedType(s) => write!(f, "unsupported Cartan type `{s}`"),
        }
    }
}

impl std::error::Error for RootSystemError {}

/// A positive root with its coroot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    /// coordinates in the simple roots
    pub root: Vec<i64>,
    /// coordinates in the simple coroots
    pub coroot: Vec<i64>,
    /// pairing row (⟨α_1, β∨⟩, ..., ⟨α_r, β∨⟩): the coroot in the basis of
    /// fundamental coweights
    pub coroot_pairings: Vec<i64>,
}

impl Root {
    pub fn height(&self) -> i64 {
        self.root.iter().sum()
    }
}

pub struct RootSystem {
    pub ctype: CartanType,
    pub rank: usize,
    /// cartan[i][j] = ⟨α_j, α_i∨⟩
    pub cartan: Vec<Vec<i64>>,
    pub positive_roots: Vec<Root>,
    /// index of the highest root θ in `positive_roots`
    pub theta: usize,
    pub coxeter_number: usize,
    /// half-sum of positive roots, in simple-root coordinates
    pub rho: Vec<Rat>,
}

fn cartan_matrix(t: CartanType) -> Vec<Vec<i64>> {
    let r = t.rank();
    let mut c = vec![vec![0i64; r]; r];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    let chain = |c: &mut Vec<Vec<i64>>, upto: usize| {
        for i in 0..upto {
            c[i][i + 1] = -1;
            c[i + 1][i] = -1;
        }
    };
    match t {
        CartanType::A(_) => chain(&mut c, r - 1),
        CartanType::B(_) => {
            // last simple root short: ⟨α_{r-1}, α_r∨⟩ = -2
            chain(&mut c, r - 1);
            c[r - 1][r - 2] = -2;
        }
        CartanType::C(_) => {
            // last simple root long: ⟨α_r, α_{r-1}∨⟩ = -2
            chain(&mut c, r - 1);
            c[r - 2][r - 1] = -2;
        }
        CartanType::D(_) => {
            chain(&mut c, r - 2);
            c[r - 3][r - 1] = -1;
            c[r - 1][r - 3] = -1;
        }
        CartanType::G2 => {
            c[0][1] = -1;
            c[1][0] = -3;
        }
    }
    c
}

impl RootSystem {
    pub fn new(ctype: CartanType) -> Result<RootSystem, RootSystemError> {
        if !ctype.validate() {
            return Err(RootSystemError::UnsupportedType(ctype.to_string()));
        }
        let r = ctype.rank();
        let cartan = cartan_matrix(ctype);
        // enumerate R+ as the closure of the simple roots under simple
        // reflections, keeping vectors with nonnegative coordinates
        let mut roots: Vec<Root> = (0..r)
            .map(|i| {
                let mut root = vec![0i64; r];
                root[i] = 1;
                let mut coroot = vec![0i64; r];
                coroot[i] = 1;
                let coroot_pairings = (0..r).map(|j| cartan[i][j]).collect();
                Root { root, coroot, coroot_pairings }
            })
            .collect();
        let mut changed = true;
        while changed {
            changed = false;
            let mut new_roots: Vec<Root> = Vec::new();
            for root in &roots {
                for i in 0..r {
                    // s_i(β) = β - ⟨β, α_i∨⟩ α_i
                    let pair: i64 = (0..r).map(|j| cartan[i][j] * root.root[j]).sum();
                    let mut img = root.root.clone();
                    img[i] -= pair;
                    if img.iter().any(|&x| x < 0) {
                        continue;
                    }
                    if roots.iter().any(|q| q.root == img) || new_roots.iter().any(|q| q.root == img)
                    {
                        continue;
                    }
                    // s_i(β∨) = β∨ - ⟨α_i, β∨⟩ α_i∨
                    let copair: i64 = (0..r).map(|j| cartan[j][i] * root.coroot[j]).sum();
                    let mut cimg = root.coroot.clone();
                    cimg[i] -= copair;
                    let pairings = (0..r)
                        .map(|j| (0..r).map(|k| cimg[k] * cartan[k][j]).sum())
                        .collect();
                    new_roots.push(Root { root: img, coroot: cimg, coroot_pairings: pairings });
                    changed = true;
                }
            }
            roots.extend(new_roots);
        }
        // height order, simple roots first as α1..αr
        roots.sort_by(|a, b| a.height().cmp(&b.height()).then_with(|| b.root.cmp(&a.root)));
        let theta = roots.len() - 1;
        let coxeter_number = (roots[theta].height() + 1) as usize;
        // standard identity |R| = h r, used as a self-check
        assert_eq!(2 * roots.len(), coxeter_number * r, "|R| = h*r failed for {ctype}");
        // every root pairs to 2 with its own coroot
        for q in &roots {
            let v: i64 = q.root.iter().zip(&q.coroot_pairings).map(|(a, b)| a * b).sum();
            assert_eq!(v, 2, "<a, a~> != 2 for {:?}", q.root);
        }
        let mut rho = vec![Rat::ZERO; r];
        for q in &roots {
            for (acc, &x) in rho.iter_mut().zip(&q.root) {
                *acc = acc.add(&Rat::new(x, 2));
            }
        }
        Ok(RootSystem { ctype, rank: r, cartan, positive_roots: roots, theta, coxeter_number, rho })
    }

    /// ⟨λ, β∨⟩ for λ in simple-root coordinates and β∨ one of the positive
    /// coroots: dot product against the stored pairing row.
    pub fn pair_rat(&self, lambda: &[Rat], root_idx: usize) -> Rat {
        let mut acc = Rat::ZERO;
        for (l, &p) in lambda.iter().zip(&self.positive_roots[root_idx].coroot_pairings) {
            acc = acc.add(&l.mul(&Rat::from_int(p)));
        }
        acc
    }

    /// Integer version of [`Self::pair_rat`].
    pub fn pair_int(&self, lambda: &[i64], root_idx: usize) -> i64 {
        lambda
            .iter()
            .zip(&self.positive_roots[root_idx].coroot_pairings)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Bilinear pairing of a weight-side vector (simple-root coordinates)
    /// with a coweight-side vector (fundamental-coweight coordinates).
    pub fn pairing(lambda: &[Rat], coweight: &[Rat]) -> Result<Rat, crate::arith::ArithError> {
        if lambda.len() != coweight.len() {
            return Err(crate::arith::ArithError::DimensionMismatch);
        }
        let mut acc = Rat::ZERO;
        for (a, b) in lambda.iter().zip(coweight) {
            acc = acc.add(&a.mul(b));
        }
        Ok(acc)
    }

    pub fn positive_root_index(&self, root: &[i64]) -> Option<usize> {
        self.positive_roots.iter().position(|q| q.root == root)
    }

    /// Affine coroot α∨_n = α∨ - n δ∨ in the integral coordinates
    /// (fundamental coweights, δ∨): the pairing row extended by -n.
    pub fn affine_coroot(&self, root_idx: usize, n: i64) -> Vec<i64> {
        let mut v = self.positive_roots[root_idx].coroot_pairings.clone();
        v.push(-n);
        v
    }

    /// Name like "a1+a2" for a positive root, used in reports.
    pub fn root_name(&self, root_idx: usize) -> String {
        let mut parts = Vec::new();
        for (i, &c) in self.positive_roots[root_idx].root.iter().enumerate() {
            match c {
                0 => {}
                1 => parts.push(format!("a{}", i + 1)),
                _ => parts.push(format!("{}a{}", c, i + 1)),
            }
        }
        parts.join("+")
    }
}
