//! Bruhat moment graphs over W_k = (X∨ ⊕ ℤδ∨) ⊗ k.
//!
//! Vertices are the elements of a lower Bruhat interval; x and y are joined
//! by an edge when x = s_{α,n} y, and the edge is labelled by the image of
//! the affine coroot α∨ - nδ∨ in W_k. The finite Weyl case is the n = 0
//! sub-case: the δ∨ coordinate is identically zero but the ambient
//! dimension stays r+1, so finite and affine code paths are identical.

use crate::arith::{Field, Mat};
use crate::weyl::{BruhatInterval, WeylError, WeylGroup};
use std::fmt;

#[derive(Clone, Debug)]
pub struct Edge<F: Field> {
    /// interval positions, lo < hi in Bruhat order
    pub lo: usize,
    pub hi: usize,
    /// positive root index of the reflection datum
    pub root_idx: usize,
    /// affine level of the reflection datum
    pub n: i64,
    /// integral label coordinates (fundamental coweights, δ∨)
    pub label_int: Vec<i64>,
    /// label reduced into the field
    pub label: Vec<F::Elem>,
}

pub struct MomentGraph<F: Field> {
    pub field: F,
    pub interval: BruhatInterval,
    pub edges: Vec<Edge<F>>,
    /// n(y): number of edges at each vertex
    pub n_edges: Vec<usize>,
    /// edges_at[v]: edge indices incident to v
    pub edges_at: Vec<Vec<usize>>,
    /// ambient label dimension r+1 = number of polynomial variables
    pub nvars: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    /// An edge label reduces to zero in the field, violating the moment
    /// graph definition. Carries the offending pair of vertex words and the
    /// reflection datum.
    ZeroLabel { x: String, y: String, alpha: String, n: i64 },
    Weyl(WeylError),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::ZeroLabel { x, y, alpha, n } => write!(
                f,
                "edge ({x}) -- ({y}) from s_({alpha},{n}) has zero label in the coefficient field"
            ),
            GraphError::Weyl(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for GraphError {}

impl From<WeylError> for GraphError {
    fn from(e: WeylError) -> Self {
        GraphError::Weyl(e)
    }
}

/// One GKM violation: two dependent labels at a common vertex, or a zero
/// label.
#[derive(Debug, Clone)]
pub enum GkmViolation {
    DependentPair { vertex: String, e1: String, e2: String },
    ZeroLabel { edge: String },
}

impl fmt::Display for GkmViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GkmViolation::DependentPair { vertex, e1, e2 } => {
                write!(f, "labels of edges {e1} and {e2} at vertex ({vertex}) are linearly dependent")
            }
            GkmViolation::ZeroLabel { edge } => write!(f, "edge {edge} has zero label"),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct GkmReport {
    pub violations: Vec<GkmViolation>,
}

impl GkmReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl<F: Field> MomentGraph<F> {
    /// Build the moment graph of the interval; a zero label in the field is
    /// a hard error naming the edge.
    pub fn build(
        weyl: &mut WeylGroup,
        interval: BruhatInterval,
        field: F,
    ) -> Result<MomentGraph<F>, GraphError> {
        let g = Self::build_raw(weyl, interval, field)?;
        for e in &g.edges {
            if e.label.iter().all(|c| field.is_zero(c)) {
                return Err(GraphError::ZeroLabel {
                    x: g.interval.word_string(e.lo),
                    y: g.interval.word_string(e.hi),
                    alpha: weyl.rs.root_name(e.root_idx),
                    n: e.n,
                });
            }
        }
        Ok(g)
    }

    /// Build without the zero-label check, so `gkm_check` can report the
    /// violations instead.
    pub fn build_raw(
        weyl: &mut WeylGroup,
        interval: BruhatInterval,
        field: F,
    ) -> Result<MomentGraph<F>, GraphError> {
        let n = interval.len();
        let nvars = weyl.rs.rank + 1;
        let mut edges: Vec<Edge<F>> = Vec::new();
        for i in 0..n {
            let xinv = weyl.invert(interval.elems[i]);
            for j in i + 1..n {
                // y = t x with t = y x^{-1} a reflection
                let t = weyl.multiply(interval.elems[j], xinv);
                let m = weyl.matrix(t).clone();
                let Some((root_idx, lvl)) = weyl.is_reflection(&m) else { continue };
                // reflection-related pairs are Bruhat comparable; i < j in
                // interval order means l(x_i) <= l(x_j), so the edge is
                // directed i -> j
                debug_assert!(interval.leq(i, j), "edge endpoints must be comparable");
                let label_int = weyl.rs.affine_coroot(root_idx, lvl);
                let label: Vec<F::Elem> =
                    label_int.iter().map(|&c| field.from_int(c)).collect();
                edges.push(Edge { lo: i, hi: j, root_idx, n: lvl, label_int, label });
            }
        }
        let mut n_edges = vec![0usize; n];
        let mut edges_at = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            n_edges[e.lo] += 1;
            n_edges[e.hi] += 1;
            edges_at[e.lo].push(k);
            edges_at[e.hi].push(k);
        }
        Ok(MomentGraph { field, interval, edges, n_edges, edges_at, nvars })
    }

    pub fn vertex_count(&self) -> usize {
        self.interval.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn edge_name(&self, e: &Edge<F>) -> String {
        format!("({})--({})", self.interval.word_string(e.lo), self.interval.word_string(e.hi))
    }

    /// GKM condition: at every vertex, the labels of any two distinct edges
    /// are linearly independent (and all labels are nonzero).
    pub fn gkm_check(&self) -> GkmReport {
        let f = self.field;
        let mut violations = Vec::new();
        for e in &self.edges {
            if e.label.iter().all(|c| f.is_zero(c)) {
                violations.push(GkmViolation::ZeroLabel { edge: self.edge_name(e) });
            }
        }
        for v in 0..self.vertex_count() {
            let inc = &self.edges_at[v];
            for a in 0..inc.len() {
                for b in a + 1..inc.len() {
                    let e1 = &self.edges[inc[a]];
                    let e2 = &self.edges[inc[b]];
                    let rows = vec![e1.label.clone(), e2.label.clone()];
                    let rank = Mat::from_rows(f, rows, self.nvars).rank(f);
                    if rank < 2 {
                        violations.push(GkmViolation::DependentPair {
                            vertex: self.interval.word_string(v),
                            e1: self.edge_name(e1),
                            e2: self.edge_name(e2),
                        });
                    }
                }
            }
        }
        GkmReport { violations }
    }

    /// {x : n(y) = l for all y ≥ x}, with l = l(w). Upward closed by
    /// construction.
    pub fn smooth_locus_combinatorial(&self) -> Vec<usize> {
        let l = self.interval.max_length() as usize;
        (0..self.vertex_count())
            .filter(|&x| self.interval.up_set(x).iter().all(|&y| self.n_edges[y] == l))
            .collect()
    }

    /// Open means upward closed.
    pub fn is_open(&self, subset: &[usize]) -> bool {
        subset.iter().all(|&x| {
            self.interval.up_set(x).iter().all(|&y| subset.contains(&y))
        })
    }

    /// The principal open {≥ x}.
    pub fn principal_up(&self, x: usize) -> Vec<usize> {
        self.interval.up_set(x)
    }

    /// The punctured open {> x}.
    pub fn strict_up(&self, x: usize) -> Vec<usize> {
        self.interval.up_set(x).into_iter().filter(|&y| y != x).collect()
    }

    /// All open subsets (exponential; callers gate on vertex count).
    pub fn all_opens(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        assert!(n <= 20, "open-set enumeration is exponential");
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            let subset: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            if self.is_open(&subset) {
                out.push(subset);
            }
        }
        out
    }

    /// Edges with both endpoints inside the subset.
    pub fn edges_within(&self, subset: &[usize]) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| subset.contains(&e.lo) && subset.contains(&e.hi))
            .map(|(k, _)| k)
            .collect()
    }

    /// The order generated by the directed edges equals the Bruhat order on
    /// the interval ("two comparable vertices are linked by a directed
    /// path"). Returns violating pairs.
    pub fn check_order_generated_by_edges(&self) -> Vec<(usize, usize)> {
        let n = self.vertex_count();
        // reachability along directed edges
        let mut reach = vec![vec![false; n]; n];
        for (i, r) in reach.iter_mut().enumerate() {
            r[i] = true;
        }
        // repeated relaxation; graphs are tiny
        let mut changed = true;
        while changed {
            changed = false;
            for e in &self.edges {
                for i in 0..n {
                    if reach[i][e.lo] && !reach[i][e.hi] {
                        reach[i][e.hi] = true;
                        changed = true;
                    }
                }
            }
        }
        let mut bad = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.interval.leq(i, j) != reach[i][j] {
                    bad.push((i, j));
                }
            }
        }
        bad
    }

    /// Graph connectivity (ignoring directions).
    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &k in &self.edges_at[v] {
                let e = &self.edges[k];
                let o = if e.lo == v { e.hi } else { e.lo };
                if !seen[o] {
                    seen[o] = true;
                    stack.push(o);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    /// DOT rendering with label tuples on the edges.
    pub fn to_dot(&self, weyl: &WeylGroup) -> String {
        let mut out = String::from("digraph moment_graph {\n  rankdir=BT;\n");
        for i in 0..self.vertex_count() {
            out.push_str(&format!("  v{} [label=\"{}\"];\n", i, self.interval.word_string(i)));
        }
        for e in &self.edges {
            let label: Vec<String> = e.label_int.iter().map(|c| c.to_string()).collect();
            out.push_str(&format!(
                "  v{} -> v{} [label=\"s({},{}): ({})\"];\n",
                e.lo,
                e.hi,
                weyl.rs.root_name(e.root_idx),
                e.n,
                label.join(",")
            ));
        }
        out.push_str("}\n");
        out
    }

    /// JSON dump: vertices as reduced words, edges as
    /// {from, to, alpha, n, label: [...]}.
    pub fn to_json(&self, weyl: &WeylGroup) -> serde_json::Value {
        let vertices: Vec<String> =
            (0..self.vertex_count()).map(|i| self.interval.word_string(i)).collect();
        let edges: Vec<serde_json::Value> = self
            .edges
            .iter()
            .map(|e| {
                serde_json::json!({
                    "from": self.interval.word_string(e.lo),
                    "to": self.interval.word_string(e.hi),
                    "alpha": weyl.rs.root_name(e.root_idx),
                    "n": e.n,
                    "label": e.label_int,
                })
            })
            .collect();
        serde_json::json!({ "vertices": vertices, "edges": edges })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{PrimeField, Rationals};
    use crate::rootsys::{CartanType, RootSystem};
    use std::sync::Arc;

    fn graph_q(t: CartanType, affine: bool, word: &str) -> (WeylGroup, MomentGraph<Rationals>) {
        let rs = Arc::new(RootSystem::new(t).unwrap());
        let mut g = WeylGroup::new(rs, affine, 24);
        let (w, _) = g.parse_word(word).unwrap();
        let interval = g.lower_interval(w).unwrap();
        let mg = MomentGraph::build(&mut g, interval, Rationals).unwrap();
        (g, mg)
    }

    #[test]
    fn single_reflection_interval() {
        let (_, mg) = graph_q(CartanType::A(1), false, "s1");
        assert_eq!(mg.vertex_count(), 2);
        assert_eq!(mg.edge_count(), 1);
        // label is ᾱ1∨ = (2, 0)
        assert_eq!(mg.edges[0].label_int, vec![2, 0]);
        assert!(mg.gkm_check().passed());
    }

    #[test]
    fn a2_full_graph() {
        // 6 vertices, one edge per pair {x, tx}: 3 reflections x 6 / 2 = 9
        let (_, mg) = graph_q(CartanType::A(2), false, "s1 s2 s1");
        assert_eq!(mg.vertex_count(), 6);
        assert_eq!(mg.edge_count(), 9);
        assert!(mg.gkm_check().passed());
        // handshake identity
        let total: usize = mg.n_edges.iter().sum();
        assert_eq!(total, 2 * mg.edge_count());
        assert!(mg.is_connected());
        assert!(mg.check_order_generated_by_edges().is_empty());
    }

    #[test]
    fn affine_a1_length3_interval() {
        // the interval of s1 s0 s1: all six subwords
        // e, s1, s0, s1 s0, s0 s1, s1 s0 s1
        let (mut weyl, mg) = graph_q(CartanType::A(1), true, "s1 s0 s1");
        assert_eq!(mg.vertex_count(), 6);
        assert_eq!(mg.edge_count(), 9);
        // brute-force reflection scan: every pair must be checked
        let mut expected = 0;
        for i in 0..6 {
            let xinv = weyl.invert(mg.interval.elems[i]);
            for j in i + 1..6 {
                let t = weyl.multiply(mg.interval.elems[j], xinv);
                let m = weyl.matrix(t).clone();
                if weyl.is_reflection(&m).is_some() {
                    expected += 1;
                }
            }
        }
        assert_eq!(mg.edge_count(), expected);
        assert!(mg.gkm_check().passed());
        assert!(mg.check_order_generated_by_edges().is_empty());
    }

    #[test]
    fn n_table_matches_deodhar_count() {
        // two independent code paths for n(y)
        let (mut weyl, mg) = graph_q(CartanType::A(3), false, "s2 s1 s3 s2");
        for i in 0..mg.vertex_count() {
            let n = weyl.deodhar_count(mg.interval.elems[i], &mg.interval).unwrap();
            assert_eq!(mg.n_edges[i], n, "vertex {}", mg.interval.word_string(i));
        }
    }

    #[test]
    fn edge_reconstruction() {
        // s_{α,n} x equals the other endpoint for every edge
        let (weyl, mg) = graph_q(CartanType::A(2), true, "s1 s0 s2");
        for e in &mg.edges {
            let t = weyl.reflection_matrix(e.root_idx, e.n);
            let x = weyl.matrix(mg.interval.elems[e.lo]).clone();
            let y = weyl.matrix(mg.interval.elems[e.hi]).clone();
            assert_eq!(t.mul(&x), y);
        }
    }

    #[test]
    fn zero_label_rejected_mod_2() {
        // Ã1 over F_2: the finite reflection has label (2,0) ≡ 0
        let rs = Arc::new(RootSystem::new(CartanType::A(1)).unwrap());
        let mut g = WeylGroup::new(rs, true, 16);
        let (w, _) = g.parse_word("s1 s0 s1").unwrap();
        let interval = g.lower_interval(w).unwrap();
        let f2 = PrimeField::new(2).unwrap();
        match MomentGraph::build(&mut g, interval, f2) {
            Err(GraphError::ZeroLabel { alpha, n, .. }) => {
                assert_eq!(alpha, "a1");
                assert_eq!(n % 2, 0);
            }
            Err(e) => panic!("unexpected {e:?}"),
            Ok(_) => panic!("zero label not detected"),
        }
    }

    #[test]
    fn gkm_fails_mod_2_on_congruent_levels() {
        // edges s_{α,n} x and s_{α,n+2} x at a common vertex have labels
        // α∨-nδ∨ ≡ α∨-(n+2)δ∨ mod 2
        let rs = Arc::new(RootSystem::new(CartanType::A(1)).unwrap());
        let mut g = WeylGroup::new(rs, true, 16);
        let (w, _) = g.parse_word("s1 s0 s1").unwrap();
        let interval = g.lower_interval(w).unwrap();
        let f2 = PrimeField::new(2).unwrap();
        let mg = MomentGraph::build_raw(&mut g, interval, f2).unwrap();
        let report = mg.gkm_check();
        assert!(!report.passed());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, GkmViolation::DependentPair { .. })));
        assert!(report.violations.iter().any(|v| matches!(v, GkmViolation::ZeroLabel { .. })));
        // identify the congruent odd pair at the bottom vertex: s_{α,1} e =
        // s0 and s_{α,-1} e = s1 s0 s1 both meet e
        let at_e: Vec<_> = mg.edges_at[0].iter().map(|&k| (mg.edges[k].root_idx, mg.edges[k].n)).collect();
        assert!(at_e.contains(&(0, 1)));
        assert!(at_e.contains(&(0, -1)));
    }

    #[test]
    fn single_edge_graph_passes_gkm() {
        let (_, mg) = graph_q(CartanType::A(1), false, "s1");
        assert!(mg.gkm_check().passed());
    }

    #[test]
    fn q_graphs_pass_gkm() {
        for (t, affine, word) in [
            (CartanType::A(2), false, "s1 s2 s1"),
            (CartanType::A(3), false, "s2 s1 s3 s2"),
            (CartanType::B(2), false, "s1 s2 s1 s2"),
            (CartanType::A(1), true, "s1 s0 s1 s0"),
            (CartanType::A(2), true, "s0 s1 s2 s0"),
        ] {
            let (_, mg) = graph_q(t, affine, word);
            assert!(mg.gkm_check().passed(), "{t} {word}");
        }
    }

    #[test]
    fn smooth_locus_combinatorics() {
        // dihedral B2: every vertex lies on l(w0) = 4 edges
        let (_, mg) = graph_q(CartanType::B(2), false, "s1 s2 s1 s2");
        assert_eq!(mg.smooth_locus_combinatorial().len(), mg.vertex_count());
        // A3 singular interval: s2 and e are excluded
        let (mut weyl, mg) = graph_q(CartanType::A(3), false, "s2 s1 s3 s2");
        let locus = mg.smooth_locus_combinatorial();
        let (s2, _) = weyl.parse_word("s2").unwrap();
        let p = mg.interval.position(s2).unwrap();
        assert!(!locus.contains(&p));
        assert!(!locus.contains(&0));
        // w itself always qualifies: n_w(w) = l(w)
        assert!(locus.contains(&(mg.vertex_count() - 1)));
        // upward closed
        for &x in &locus {
            for y in mg.interval.up_set(x) {
                assert!(locus.contains(&y));
            }
        }
    }

    #[test]
    fn open_sets() {
        let (_, mg) = graph_q(CartanType::A(2), false, "s1 s2 s1");
        let all: Vec<usize> = (0..mg.vertex_count()).collect();
        assert!(mg.is_open(&all));
        // {w} is open (w maximal)
        assert!(mg.is_open(&[mg.vertex_count() - 1]));
        // {e} is not: {≥ e} is everything
        assert!(!mg.is_open(&[0]));
        let opens = mg.all_opens();
        // every principal up-set appears
        for x in 0..mg.vertex_count() {
            assert!(opens.contains(&mg.principal_up(x)));
        }
        // opens contain the empty set and are upward closed
        assert!(opens.iter().any(|o| o.is_empty()));
    }

    #[test]
    fn dot_and_json_exports() {
        let (weyl, mg) = graph_q(CartanType::A(1), false, "s1");
        let dot = mg.to_dot(&weyl);
        assert!(dot.contains("digraph"));
        assert!(dot.contains("v0 -> v1"));
        let js = mg.to_json(&weyl);
        assert_eq!(js["vertices"].as_array().unwrap().len(), 2);
        assert_eq!(js["edges"][0]["label"], serde_json::json!([2, 0]));
        assert_eq!(js["edges"][0]["alpha"], "a1");
    }
}
