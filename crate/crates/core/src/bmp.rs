//! The Braden-MacPherson construction and its verification.
//!
//! Vertices are processed along a linear extension of decreasing Bruhat
//! order. The top stalk is S; each edge module is the quotient of its upper
//! stalk by the label; at a new vertex x the sections over {>x} are
//! projected to the modules of the edges above x, the image is the module
//! ℬ^{δx}, and the stalk at x is the free module on its minimal generator
//! degrees with the restriction map defined by the chosen generator lifts
//! (a projective cover). Graded ranks of the stalks are the object of the
//! rank checks against Kazhdan-Lusztig polynomials.

use crate::arith::{
    minimal_generator_degrees, EchelonBasis, Field, Mat, PolyRing, QPoly, TruncatedModule,
};
use crate::klpoly::KLTable;
use crate::momentgraph::MomentGraph;
use crate::sheafcore::{
    costalk, quotient_by_linear, sections, MGSheaf, SectionSpace, SheafError,
};
use std::fmt;
use std::sync::Arc;

/// Which linear extension of decreasing Bruhat order to process; the result
/// must not depend on the choice.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum OrderVariant {
    /// levels by decreasing length, words descending inside a level
    #[default]
    Standard,
    /// levels by decreasing length, words ascending inside a level
    Alternate,
}

#[derive(Debug)]
pub enum BmpError {
    Sheaf(SheafError),
    /// A verification entry point was called on an uncertified run (some
    /// generator computation hit the truncation bound).
    Uncertified { vertices: Vec<String> },
}

impl fmt::Display for BmpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BmpError::Sheaf(e) => write!(f, "{e}"),
            BmpError::Uncertified { vertices } => write!(
                f,
                "run is not certified: generator degrees may exceed the truncation bound at {}",
                vertices.join(", ")
            ),
        }
    }
}

impl std::error::Error for BmpError {}

impl From<SheafError> for BmpError {
    fn from(e: SheafError) -> Self {
        BmpError::Sheaf(e)
    }
}

/// The constructed sheaf together with the per-vertex data of the
/// induction.
pub struct BmpSheaf<F: Field> {
    pub sheaf: MGSheaf<F>,
    /// sorted generator degree multiset of each stalk
    pub gen_degrees: Vec<Vec<usize>>,
    /// ℬ^{δx} per vertex: echelon bases per degree in the concatenated
    /// edge-module coordinates
    pub delta_bases: Vec<Vec<EchelonBasis<F>>>,
    /// edges above each vertex, in ambient concatenation order
    pub delta_edges: Vec<Vec<usize>>,
    /// ρ_{x,δx} per vertex per degree (rows = ambient edge coordinates)
    pub cover: Vec<Vec<Mat<F>>>,
    pub saturated_at: Vec<bool>,
    pub certified: bool,
    pub order: Vec<usize>,
}

fn processing_order(graph: &MomentGraph<impl Field>, variant: OrderVariant) -> Vec<usize> {
    let n = graph.vertex_count();
    let mut order: Vec<usize> = (0..n).collect();
    match variant {
        // interval positions are ascending in (length, word); descending
        // positions reverse both
        OrderVariant::Standard => order.reverse(),
        OrderVariant::Alternate => {
            order.sort_by_key(|&i| (std::cmp::Reverse(graph.interval.length_of(i)), i));
        }
    }
    order
}

/// Dimension of ⊕_{E in delta} ℬ^E in one degree.
fn ambient_dim<F: Field>(sheaf: &MGSheaf<F>, delta: &[usize], d: usize) -> usize {
    delta.iter().map(|&e| sheaf.edge_modules[e].dims[d]).sum()
}

/// Blockwise action of a variable on the edge-module ambient.
fn ambient_apply<F: Field>(
    sheaf: &MGSheaf<F>,
    delta: &[usize],
    d: usize,
    var: usize,
    v: &[F::Elem],
) -> Vec<F::Elem> {
    let mut out = Vec::with_capacity(ambient_dim(sheaf, delta, d + 1));
    let mut off = 0usize;
    for &e in delta {
        let nd = sheaf.edge_modules[e].dims[d];
        out.extend(sheaf.edge_modules[e].apply_var(d, var, &v[off..off + nd]));
        off += nd;
    }
    debug_assert_eq!(off, v.len());
    out
}

/// Run the construction on a GKM graph with truncation bound `dmax`.
pub fn braden_macpherson<F: Field>(
    graph: &MomentGraph<F>,
    dmax: usize,
    variant: OrderVariant,
) -> Result<BmpSheaf<F>, BmpError> {
    let gkm = graph.gkm_check();
    if !gkm.passed() {
        return Err(SheafError::NonGkm(gkm.violations.iter().map(|v| v.to_string()).collect())
            .into());
    }
    let f = graph.field;
    let n = graph.vertex_count();
    let ring = Arc::new(PolyRing::new(graph.nvars, dmax + 1));
    let zero_stalk = TruncatedModule::zero(f, dmax);
    let mut sheaf = MGSheaf {
        field: f,
        ring: Arc::clone(&ring),
        dmax,
        stalks: vec![zero_stalk; n],
        edge_modules: vec![TruncatedModule::zero(f, dmax); graph.edge_count()],
        rho_lo: vec![Vec::new(); graph.edge_count()],
        rho_hi: vec![Vec::new(); graph.edge_count()],
    };
    let mut gen_degrees: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut delta_bases: Vec<Vec<EchelonBasis<F>>> = Vec::with_capacity(n);
    for _ in 0..n {
        delta_bases.push(Vec::new());
    }
    let mut delta_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut cover: Vec<Vec<Mat<F>>> = vec![Vec::new(); n];
    let mut saturated_at = vec![true; n];
    let order = processing_order(graph, variant);
    let mut processed = vec![false; n];
    let internal = |s: String| BmpError::Sheaf(SheafError::Internal(s));

    for (step, &x) in order.iter().enumerate() {
        if step == 0 {
            // the unique maximal vertex carries S
            debug_assert_eq!(x, n - 1);
            sheaf.stalks[x] = TruncatedModule::free(f, &ring, &[0], dmax)
                .map_err(|e| internal(e.to_string()))?;
            gen_degrees[x] = vec![0];
            processed[x] = true;
            continue;
        }
        // edges above x; their upper stalks are already built
        let mut delta: Vec<usize> = graph.edges_at[x]
            .iter()
            .copied()
            .filter(|&e| {
                let e = &graph.edges[e];
                let other = if e.lo == x { e.hi } else { e.lo };
                graph.interval.leq(x, other) && other != x
            })
            .collect();
        delta.sort_unstable();
        debug_assert!(!delta.is_empty(), "non-maximal vertex without upper edges");
        for &ei in &delta {
            let e = &graph.edges[ei];
            debug_assert_eq!(e.lo, x);
            debug_assert!(processed[e.hi], "upper endpoint not processed");
            let (q, p) = quotient_by_linear(&sheaf.stalks[e.hi], &e.label);
            sheaf.edge_modules[ei] = q;
            sheaf.rho_hi[ei] = p;
        }
        // sections over {>x} of the partial sheaf
        let upper = graph.strict_up(x);
        let gamma = sections(&sheaf, graph, &upper);
        // project to ⊕ ℬ^E and span ℬ^{δx}
        let mut bases: Vec<EchelonBasis<F>> = Vec::with_capacity(dmax + 1);
        for d in 0..=dmax {
            let mut eb = EchelonBasis::new(f, ambient_dim(&sheaf, &delta, d));
            for row in &gamma.basis[d] {
                let mut img: Vec<F::Elem> = Vec::with_capacity(eb.cols);
                for &ei in &delta {
                    let e = &graph.edges[ei];
                    let k = gamma.lam_index(e.hi).expect("upper endpoint inside {>x}");
                    let block = gamma.block_of(d, k, row);
                    img.extend(sheaf.rho_hi[ei][d].mul_vec(f, block));
                }
                eb.insert(img);
            }
            bases.push(eb);
        }
        // ℬ^{δx} as a module in its own coordinates
        let dims: Vec<usize> = bases.iter().map(|b| b.dim()).collect();
        let mut acts: Vec<Vec<Mat<F>>> = Vec::with_capacity(dmax);
        for d in 0..dmax {
            let mut per_var = Vec::with_capacity(graph.nvars);
            for var in 0..graph.nvars {
                let mut mat = Mat::zeros(f, dims[d + 1], dims[d]);
                for (k, row) in bases[d].rows().iter().enumerate() {
                    let img = ambient_apply(&sheaf, &delta, d, var, row);
                    let coords = bases[d + 1].coords(&img).ok_or_else(|| {
                        internal(format!(
                            "image of sections at ({}) is not action-closed",
                            graph.interval.word_string(x)
                        ))
                    })?;
                    for (i, c) in coords.into_iter().enumerate() {
                        mat.set(i, k, c);
                    }
                }
                per_var.push(mat);
            }
            acts.push(per_var);
        }
        let delta_module = TruncatedModule::from_acts(f, dims, acts);
        // projective cover: free module on the minimal generator degrees
        let report = minimal_generator_degrees(&delta_module);
        saturated_at[x] = report.saturated;
        let gens = report.degrees();
        let stalk = TruncatedModule::free(f, &ring, &gens, dmax)
            .map_err(|e| internal(e.to_string()))?;
        // generator lifts as ambient edge-coordinate vectors
        let lifts: Vec<(usize, Vec<F::Elem>)> = report
            .lifts
            .iter()
            .map(|(d, coords)| {
                let mut v = vec![f.zero(); bases[*d].cols];
                for (c, row) in coords.iter().zip(bases[*d].rows()) {
                    if !f.is_zero(c) {
                        for (t, y) in v.iter_mut().zip(row) {
                            f.add_assign(t, &f.mul(c, y));
                        }
                    }
                }
                (*d, v)
            })
            .collect();
        // ρ_{x,δx}: image of each free basis element (gen j, monomial μ) is
        // μ applied to the lift of j, built one degree at a time
        let mut images: Vec<Vec<Vec<F::Elem>>> = vec![Vec::new(); lifts.len()];
        let mut rho_delta: Vec<Mat<F>> = Vec::with_capacity(dmax + 1);
        for d in 0..=dmax {
            let basis = stalk.free_basis(d).expect("stalk is free");
            let mut mat = Mat::zeros(f, ambient_dim(&sheaf, &delta, d), basis.len());
            let mut new_images: Vec<Vec<Vec<F::Elem>>> = vec![Vec::new(); lifts.len()];
            for (col, &(gi, mi)) in basis.iter().enumerate() {
                let (gdeg, lift) = &lifts[gi as usize];
                let img: Vec<F::Elem> = if d == *gdeg {
                    debug_assert_eq!(mi, 0);
                    lift.clone()
                } else {
                    // divide the monomial by its first variable
                    let mono = ring.monos(d - gdeg)[mi as usize].clone();
                    let var = mono.iter().position(|&e| e > 0).expect("nonconstant monomial");
                    let mut prev = mono.clone();
                    prev[var] -= 1;
                    let pi = ring.mono_index(&prev).expect("predecessor monomial");
                    let prev_img = &images[gi as usize][pi];
                    ambient_apply(&sheaf, &delta, d - 1, var, prev_img)
                };
                for (i, c) in img.iter().enumerate() {
                    mat.set(i, col, c.clone());
                }
                new_images[gi as usize].push(img);
            }
            images = new_images;
            rho_delta.push(mat);
        }
        // split the cover into per-edge restriction maps
        for d in 0..=dmax {
            let mut off = 0usize;
            for &ei in &delta {
                let qd = sheaf.edge_modules[ei].dims[d];
                let mut m = Mat::zeros(f, qd, stalk.dims[d]);
                for i in 0..qd {
                    for j in 0..stalk.dims[d] {
                        m.set(i, j, rho_delta[d].at(off + i, j).clone());
                    }
                }
                if sheaf.rho_lo[ei].len() <= d {
                    sheaf.rho_lo[ei].push(m);
                } else {
                    sheaf.rho_lo[ei][d] = m;
                }
                off += qd;
            }
        }
        sheaf.stalks[x] = stalk;
        gen_degrees[x] = gens;
        delta_bases[x] = bases;
        delta_edges[x] = delta;
        cover[x] = rho_delta;
        processed[x] = true;
    }
    let certified = saturated_at.iter().all(|&b| b);
    Ok(BmpSheaf {
        sheaf,
        gen_degrees,
        delta_bases,
        delta_edges,
        cover,
        saturated_at,
        certified,
        order,
    })
}

impl<F: Field> BmpSheaf<F> {
    /// Graded rank of a stalk: a generator in degree d contributes q^d.
    pub fn graded_rank(&self, x: usize) -> QPoly {
        let mut coeffs = Vec::new();
        for &d in &self.gen_degrees[x] {
            if coeffs.len() <= d {
                coeffs.resize(d + 1, 0);
            }
            coeffs[d] += 1;
        }
        QPoly::from_coeffs(coeffs)
    }

    /// Vertices with rank-one stalk.
    pub fn smooth_locus_rank(&self) -> Result<Vec<usize>, BmpError> {
        self.require_certified()?;
        Ok((0..self.gen_degrees.len())
            .filter(|&x| self.gen_degrees[x] == [0])
            .collect())
    }

    pub fn require_certified(&self) -> Result<(), BmpError> {
        if self.certified {
            return Ok(());
        }
        let vertices = self
            .saturated_at
            .iter()
            .enumerate()
            .filter(|(_, &ok)| !ok)
            .map(|(x, _)| format!("vertex #{x}"))
            .collect();
        Err(BmpError::Uncertified { vertices })
    }

    pub fn global_sections(&self, graph: &MomentGraph<F>) -> SectionSpace<F> {
        let all: Vec<usize> = (0..graph.vertex_count()).collect();
        sections(&self.sheaf, graph, &all)
    }
}

/// The structural invariants of the construction: the top stalk is S, the
/// upper restriction of every edge is surjective with kernel α times the
/// stalk, the cover maps onto ℬ^{δx}, and each stalk has exactly one
/// generator in degree 0 with the rest in positive degrees.
pub fn verify_construction<F: Field>(
    bmp: &BmpSheaf<F>,
    graph: &MomentGraph<F>,
) -> Vec<String> {
    let f = bmp.sheaf.field;
    let dmax = bmp.sheaf.dmax;
    let mut bad = Vec::new();
    let top = graph.vertex_count() - 1;
    if bmp.gen_degrees[top] != [0] {
        bad.push(format!("top stalk generators {:?}, expected [0]", bmp.gen_degrees[top]));
    }
    // edge property: ρ_{y,E} surjective with kernel α·ℬ^y
    for (ei, e) in graph.edges.iter().enumerate() {
        let y = e.hi;
        let stalk = &bmp.sheaf.stalks[y];
        let qmod = &bmp.sheaf.edge_modules[ei];
        for d in 0..=dmax {
            let rho = &bmp.sheaf.rho_hi[ei][d];
            if rho.rank(f) != qmod.dims[d] {
                bad.push(format!("edge {ei} degree {d}: upper restriction not surjective"));
            }
            let expected_kernel = stalk.dims[d] - qmod.dims[d];
            if d > 0 {
                // α·ℬ^y_{d-1} must have that dimension and die under ρ
                let mut span = EchelonBasis::new(f, stalk.dims[d]);
                for k in 0..stalk.dims[d - 1] {
                    let mut unit = vec![f.zero(); stalk.dims[d - 1]];
                    unit[k] = f.one();
                    let img = stalk.apply_linear(&e.label, d - 1, &unit);
                    if !rho.mul_vec(f, &img).iter().all(|v| f.is_zero(v)) {
                        bad.push(format!(
                            "edge {ei} degree {d}: α·stalk not inside the kernel"
                        ));
                    }
                    span.insert(img);
                }
                if span.dim() != expected_kernel {
                    bad.push(format!(
                        "edge {ei} degree {d}: kernel dimension {} but α·stalk has {}",
                        expected_kernel,
                        span.dim()
                    ));
                }
            } else if expected_kernel != 0 {
                bad.push(format!("edge {ei}: degree-0 kernel should vanish"));
            }
        }
    }
    // cover property: image of ρ_{x,δx} equals ℬ^{δx} degreewise
    for x in 0..graph.vertex_count() {
        if x == top {
            continue;
        }
        for d in 0..=dmax {
            let mat = &bmp.cover[x][d];
            let mut image = EchelonBasis::new(f, mat.rows);
            for j in 0..mat.cols {
                image.insert(mat.col(j));
            }
            let target = &bmp.delta_bases[x][d];
            if image.dim() != target.dim() {
                bad.push(format!(
                    "cover at ({}) degree {d}: image dim {} vs delta dim {}",
                    graph.interval.word_string(x),
                    image.dim(),
                    target.dim()
                ));
                continue;
            }
            for row in image.rows() {
                if !target.contains(row) {
                    bad.push(format!(
                        "cover image escapes ℬ^δ at ({}) degree {d}",
                        graph.interval.word_string(x)
                    ));
                    break;
                }
            }
        }
    }
    // one generator in degree zero, the rest positive
    for x in 0..graph.vertex_count() {
        let zeros = bmp.gen_degrees[x].iter().filter(|&&d| d == 0).count();
        if zeros != 1 {
            bad.push(format!(
                "stalk at ({}) has {} degree-0 generators",
                graph.interval.word_string(x),
                zeros
            ));
        }
    }
    bad
}

/// Graded rank equals the Kazhdan-Lusztig polynomial at every vertex.
pub fn verify_rank_conjecture<F: Field>(
    bmp: &BmpSheaf<F>,
    graph: &MomentGraph<F>,
    kl: &mut KLTable,
) -> Result<Vec<String>, BmpError> {
    bmp.require_certified()?;
    let top = graph.vertex_count() - 1;
    let mut bad = Vec::new();
    for x in 0..graph.vertex_count() {
        let rank = bmp.graded_rank(x);
        let p = kl.kl(x, top);
        if rank != p {
            bad.push(format!(
                "rank at ({}) is {} but P = {}",
                graph.interval.word_string(x),
                rank,
                p
            ));
        }
    }
    Ok(bad)
}

/// Rank-one locus equals the combinatorial locus {x : n(y) = l(w) ∀ y ≥ x}.
pub fn verify_main_theorem<F: Field>(
    bmp: &BmpSheaf<F>,
    graph: &MomentGraph<F>,
) -> Result<Vec<String>, BmpError> {
    let rank_locus = bmp.smooth_locus_rank()?;
    let comb_locus = graph.smooth_locus_combinatorial();
    let mut bad = Vec::new();
    if rank_locus != comb_locus {
        bad.push(format!(
            "rank-one locus {:?} differs from edge-count locus {:?}",
            rank_locus
                .iter()
                .map(|&x| graph.interval.word_string(x))
                .collect::<Vec<_>>(),
            comb_locus
                .iter()
                .map(|&x| graph.interval.word_string(x))
                .collect::<Vec<_>>()
        ));
    }
    // upward closure of the rank locus
    for &x in &rank_locus {
        for y in graph.interval.up_set(x) {
            if !rank_locus.contains(&y) {
                bad.push(format!(
                    "rank-one locus not upward closed at ({})",
                    graph.interval.word_string(y)
                ));
            }
        }
    }
    Ok(bad)
}

/// At a rank-one vertex, the costalk is the product of the incident labels
/// times the stalk, degreewise up to dmax - n(x).
pub fn verify_smooth_costalk<F: Field>(
    bmp: &BmpSheaf<F>,
    graph: &MomentGraph<F>,
    x: usize,
) -> Result<Vec<String>, BmpError> {
    bmp.require_certified()?;
    if bmp.gen_degrees[x] != [0] {
        return Err(BmpError::Sheaf(SheafError::Internal(format!(
            "vertex ({}) is not rank-smooth; the costalk identity assumes a rank-one stalk",
            graph.interval.word_string(x)
        ))));
    }
    let f = bmp.sheaf.field;
    let ring = &bmp.sheaf.ring;
    let dmax = bmp.sheaf.dmax;
    let word = graph.interval.word_string(x);
    let mut bad = Vec::new();
    let all: Vec<usize> = (0..graph.vertex_count()).collect();
    let co = match costalk(&bmp.sheaf, graph, &all, x) {
        Ok(m) => m,
        Err(e) => return Err(BmpError::Sheaf(e)),
    };
    let n_x = graph.n_edges[x];
    for d in 0..n_x.min(dmax + 1) {
        if co.dims[d] != 0 {
            bad.push(format!("costalk at ({word}) nonzero below degree n(x) = {n_x}"));
        }
    }
    if n_x <= dmax {
        // rank-one stalk: the product ideal has the dimensions of S{-n_x}
        for d in n_x..=dmax {
            if d > dmax - n_x {
                break;
            }
            let expected = ring.dim(d - n_x);
            if co.dims[d] != expected {
                bad.push(format!(
                    "costalk at ({word}) degree {d}: dim {} vs {} for the label-product module",
                    co.dims[d], expected
                ));
            }
        }
        // the product of the labels is itself a costalk section
        let mut prod = vec![f.one()];
        for (lvl, &ei) in graph.edges_at[x].iter().enumerate() {
            prod = ring.apply_linear_form(f, &graph.edges[ei].label, lvl, &prod);
        }
        let mut kernel = EchelonBasis::new(f, bmp.sheaf.stalks[x].dims[n_x]);
        let cons: Vec<Vec<F::Elem>> = {
            let nv = bmp.sheaf.stalks[x].dims[n_x];
            let mut rows = Vec::new();
            for &ei in &graph.edges_at[x] {
                let e = &graph.edges[ei];
                let rho = bmp.sheaf.rho(ei, e.lo == x, n_x);
                for i in 0..bmp.sheaf.edge_modules[ei].dims[n_x] {
                    rows.push((0..nv).map(|j| rho.at(i, j).clone()).collect());
                }
            }
            rows
        };
        for v in crate::arith::kernel_basis(f, cons, bmp.sheaf.stalks[x].dims[n_x]) {
            kernel.insert(v);
        }
        if !kernel.contains(&prod) {
            bad.push(format!("label product is not a costalk section at ({word})"));
        }
    }
    Ok(bad)
}

/// Degree-bound consistency: with the rank conjecture verified, every
/// generator degree at x < w stays below (l(w) - l(x)) / 2.
pub fn verify_degree_bound<F: Field>(bmp: &BmpSheaf<F>, graph: &MomentGraph<F>) -> Vec<String> {
    let top = graph.vertex_count() - 1;
    let lw = graph.interval.max_length();
    let mut bad = Vec::new();
    for x in 0..graph.vertex_count() {
        if x == top {
            continue;
        }
        let gap = lw - graph.interval.length_of(x);
        for &d in &bmp.gen_degrees[x] {
            if 2 * d as u32 >= gap && d > 0 {
                bad.push(format!(
                    "generator degree {d} at ({}) reaches (l(w)-l(x))/2",
                    graph.interval.word_string(x)
                ));
            }
        }
    }
    bad
}
