//! Sheaves on a moment graph and their section spaces, degree by degree.
//!
//! A sheaf assigns a truncated graded module to every vertex and every edge
//! together with degreewise restriction maps; edge modules are killed by
//! their label. Sections over a vertex subset are computed per degree as
//! the kernel of the assembled edge constraints. The solver adds one vertex
//! at a time in decreasing Bruhat order, so each elimination only touches
//! the constraints of the new vertex; pivots are taken in the new stalk
//! block first, which keeps most kernel vectors sparse in the
//! old-basis coordinates.

use crate::arith::{kernel_basis, span_module, EchelonBasis, Field, Mat, PolyRing, TruncatedModule};
use crate::momentgraph::MomentGraph;
use rayon::prelude::*;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub enum SheafError {
    /// The construction requires the GKM property.
    NonGkm(Vec<String>),
    Internal(String),
}

impl fmt::Display for SheafError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SheafError::NonGkm(v) => {
                write!(f, "moment graph fails the GKM condition: {}", v.join("; "))
            }
            SheafError::Internal(s) => write!(f, "internal sheaf error: {s}"),
        }
    }
}

impl std::error::Error for SheafError {}

/// Sheaf data on a moment graph: stalk modules, edge modules and the two
/// restriction maps of every edge, all degree-truncated.
pub struct MGSheaf<F: Field> {
    pub field: F,
    pub ring: Arc<PolyRing>,
    pub dmax: usize,
    pub stalks: Vec<TruncatedModule<F>>,
    pub edge_modules: Vec<TruncatedModule<F>>,
    /// restriction from the lower endpoint, per edge per degree
    pub rho_lo: Vec<Vec<Mat<F>>>,
    /// restriction from the upper endpoint, per edge per degree
    pub rho_hi: Vec<Vec<Mat<F>>>,
}

impl<F: Field> MGSheaf<F> {
    pub fn rho(&self, edge: usize, from_lo: bool, d: usize) -> &Mat<F> {
        if from_lo {
            &self.rho_lo[edge][d]
        } else {
            &self.rho_hi[edge][d]
        }
    }
}

/// Degreewise quotient of a module by multiplication with a linear form:
/// returns the quotient module (with induced actions) and the projection
/// matrices.
pub fn quotient_by_linear<F: Field>(
    m: &TruncatedModule<F>,
    alpha: &[F::Elem],
) -> (TruncatedModule<F>, Vec<Mat<F>>) {
    let f = m.field;
    let dmax = m.dmax;
    let nv = m.nvars();
    // image spans α·M_{d-1} inside M_d
    let mut images: Vec<EchelonBasis<F>> = Vec::with_capacity(dmax + 1);
    images.push(EchelonBasis::new(f, m.dims[0]));
    for d in 1..=dmax {
        let mut eb = EchelonBasis::new(f, m.dims[d]);
        for k in 0..m.dims[d - 1] {
            let mut e = vec![f.zero(); m.dims[d - 1]];
            e[k] = f.one();
            eb.insert(m.apply_linear(alpha, d - 1, &e));
        }
        images.push(eb);
    }
    // quotient coordinates = non-pivot coordinates of the image span
    let nonpivots: Vec<Vec<usize>> = images
        .iter()
        .enumerate()
        .map(|(d, eb)| (0..m.dims[d]).filter(|j| !eb.pivots().contains(j)).collect())
        .collect();
    let dims: Vec<usize> = nonpivots.iter().map(|np| np.len()).collect();
    let mut proj: Vec<Mat<F>> = Vec::with_capacity(dmax + 1);
    for d in 0..=dmax {
        let mut p = Mat::zeros(f, dims[d], m.dims[d]);
        for k in 0..m.dims[d] {
            let mut e = vec![f.zero(); m.dims[d]];
            e[k] = f.one();
            images[d].reduce(&mut e);
            for (i, &np) in nonpivots[d].iter().enumerate() {
                p.set(i, k, e[np].clone());
            }
        }
        proj.push(p);
    }
    // induced action: lift a quotient basis vector to the ambient
    // coordinate, act, project
    let mut acts: Vec<Vec<Mat<F>>> = Vec::with_capacity(dmax);
    for d in 0..dmax {
        let mut per_var = Vec::with_capacity(nv);
        for var in 0..nv {
            let mut mat = Mat::zeros(f, dims[d + 1], dims[d]);
            for (k, &np) in nonpivots[d].iter().enumerate() {
                let mut e = vec![f.zero(); m.dims[d]];
                e[np] = f.one();
                let img = m.apply_var(d, var, &e);
                let q = proj[d + 1].mul_vec(f, &img);
                for (i, c) in q.into_iter().enumerate() {
                    mat.set(i, k, c);
                }
            }
            per_var.push(mat);
        }
        acts.push(per_var);
    }
    (TruncatedModule::from_acts(f, dims, acts), proj)
}

/// The structure sheaf: every stalk is S (rank-one free, generator in
/// degree 0), every edge module is S/α·S with the canonical projections on
/// both sides.
pub fn structure_sheaf<F: Field>(
    graph: &MomentGraph<F>,
    dmax: usize,
) -> Result<MGSheaf<F>, SheafError> {
    let gkm = graph.gkm_check();
    if !gkm.passed() {
        return Err(SheafError::NonGkm(
            gkm.violations.iter().map(|v| v.to_string()).collect(),
        ));
    }
    let f = graph.field;
    let ring = Arc::new(PolyRing::new(graph.nvars, dmax + 1));
    let s = TruncatedModule::free(f, &ring, &[0], dmax)
        .map_err(|e| SheafError::Internal(e.to_string()))?;
    let stalks: Vec<TruncatedModule<F>> = vec![s.clone(); graph.vertex_count()];
    let mut edge_modules = Vec::with_capacity(graph.edge_count());
    let mut rho = Vec::with_capacity(graph.edge_count());
    for e in &graph.edges {
        let (q, p) = quotient_by_linear(&s, &e.label);
        edge_modules.push(q);
        rho.push(p);
    }
    Ok(MGSheaf { field: f, ring, dmax, stalks, edge_modules, rho_lo: rho.clone(), rho_hi: rho })
}

/// A space of sections over a vertex subset: for each degree a basis of the
/// solution space of the edge constraints inside the direct sum of the
/// stalks, stored as rows over the concatenated stalk coordinates.
pub struct SectionSpace<F: Field> {
    /// interval positions, ascending
    pub lam: Vec<usize>,
    /// offsets[d][k] = column offset of the lam[k] block in degree d
    pub offsets: Vec<Vec<usize>>,
    pub total: Vec<usize>,
    /// basis[d]: rows of width total[d]
    pub basis: Vec<Vec<Vec<F::Elem>>>,
}

impl<F: Field> SectionSpace<F> {
    pub fn dims(&self) -> Vec<usize> {
        self.basis.iter().map(|b| b.len()).collect()
    }

    pub fn block_of<'a>(&self, d: usize, pos_in_lam: usize, row: &'a [F::Elem]) -> &'a [F::Elem] {
        let off = self.offsets[d][pos_in_lam];
        let next = if pos_in_lam + 1 < self.lam.len() {
            self.offsets[d][pos_in_lam + 1]
        } else {
            self.total[d]
        };
        &row[off..next]
    }

    pub fn lam_index(&self, vertex: usize) -> Option<usize> {
        self.lam.iter().position(|&v| v == vertex)
    }
}

/// Sections of the sheaf over `lam`. If `vanish_crossing` is set, edges
/// from a `lam` vertex to an outside vertex force the section to vanish
/// under that restriction map (used for spaces of sections supported on a
/// downward-closed subset).
pub fn sections_with<F: Field>(
    sheaf: &MGSheaf<F>,
    graph: &MomentGraph<F>,
    lam: &[usize],
    vanish_crossing: bool,
) -> SectionSpace<F> {
    let f = sheaf.field;
    let dmax = sheaf.dmax;
    let mut lam: Vec<usize> = lam.to_vec();
    lam.sort_unstable();
    lam.dedup();
    let nlam = lam.len();
    let in_lam = |v: usize| lam.binary_search(&v).is_ok();
    // column layout per degree
    let mut offsets = Vec::with_capacity(dmax + 1);
    let mut total = Vec::with_capacity(dmax + 1);
    for d in 0..=dmax {
        let mut offs = Vec::with_capacity(nlam);
        let mut acc = 0usize;
        for &v in &lam {
            offs.push(acc);
            acc += sheaf.stalks[v].dims[d];
        }
        offsets.push(offs);
        total.push(acc);
    }
    // process vertices in decreasing interval order (a linear extension of
    // reverse Bruhat order)
    let order: Vec<usize> = (0..nlam).rev().collect();
    let basis: Vec<Vec<Vec<F::Elem>>> = (0..=dmax)
        .into_par_iter()
        .map(|d| {
            let mut rows: Vec<Vec<F::Elem>> = Vec::new();
            let mut placed: Vec<usize> = Vec::new(); // lam indices
            for &k in &order {
                let v = lam[k];
                let nv = sheaf.stalks[v].dims[d];
                let kk = rows.len();
                // assemble constraints: [ m-block | c-block ]
                let mut cons: Vec<Vec<F::Elem>> = Vec::new();
                for &ei in &graph.edges_at[v] {
                    let e = &graph.edges[ei];
                    let other = if e.lo == v { e.hi } else { e.lo };
                    let v_is_lo = e.lo == v;
                    let qd = sheaf.edge_modules[ei].dims[d];
                    if qd == 0 {
                        continue;
                    }
                    if in_lam(other) {
                        let other_k = lam.binary_search(&other).unwrap();
                        if !placed.contains(&other_k) {
                            continue;
                        }
                        let rho_v = sheaf.rho(ei, v_is_lo, d);
                        let rho_o = sheaf.rho(ei, !v_is_lo, d);
                        // ρ_v(m) - ρ_o((Σ c_j b_j)|_other) = 0
                        let ooff = offsets[d][other_k];
                        let oend = ooff + sheaf.stalks[other].dims[d];
                        let mut block: Vec<Vec<F::Elem>> =
                            vec![vec![f.zero(); nv + kk]; qd];
                        for (i, row) in block.iter_mut().enumerate() {
                            for j in 0..nv {
                                row[j] = rho_v.at(i, j).clone();
                            }
                        }
                        for (j, b) in rows.iter().enumerate() {
                            let img = rho_o.mul_vec(f, &b[ooff..oend]);
                            for (i, x) in img.into_iter().enumerate() {
                                if !f.is_zero(&x) {
                                    block[i][nv + j] = f.neg(&x);
                                }
                            }
                        }
                        cons.extend(block);
                    } else if vanish_crossing {
                        // ρ_v(m) = 0 on edges leaving the support
                        let rho_v = sheaf.rho(ei, v_is_lo, d);
                        for i in 0..qd {
                            let mut row = vec![f.zero(); nv + kk];
                            for j in 0..nv {
                                row[j] = rho_v.at(i, j).clone();
                            }
                            cons.push(row);
                        }
                    }
                }
                let kernel = kernel_basis(f, cons, nv + kk);
                let voff = offsets[d][k];
                let mut new_rows: Vec<Vec<F::Elem>> = Vec::with_capacity(kernel.len());
                for kv in kernel {
                    let mut row = vec![f.zero(); total[d]];
                    for (j, x) in kv[..nv].iter().enumerate() {
                        if !f.is_zero(x) {
                            row[voff + j] = x.clone();
                        }
                    }
                    for (j, c) in kv[nv..].iter().enumerate() {
                        if !f.is_zero(c) {
                            for (t, y) in rows[j].iter().enumerate() {
                                if !f.is_zero(y) {
                                    f.add_assign(&mut row[t], &f.mul(c, y));
                                }
                            }
                        }
                    }
                    new_rows.push(row);
                }
                rows = new_rows;
                placed.push(k);
            }
            rows
        })
        .collect();
    SectionSpace { lam, offsets, total, basis }
}

pub fn sections<F: Field>(
    sheaf: &MGSheaf<F>,
    graph: &MomentGraph<F>,
    lam: &[usize],
) -> SectionSpace<F> {
    sections_with(sheaf, graph, lam, false)
}

/// Global sections of the structure sheaf: the (truncated) structure
/// algebra.
pub fn structure_algebra<F: Field>(
    graph: &MomentGraph<F>,
    dmax: usize,
) -> Result<(MGSheaf<F>, SectionSpace<F>), SheafError> {
    let sheaf = structure_sheaf(graph, dmax)?;
    let all: Vec<usize> = (0..graph.vertex_count()).collect();
    let z = sections(&sheaf, graph, &all);
    Ok((sheaf, z))
}

/// Image of the coordinate projection of a section space at a vertex, as a
/// truncated module.
pub fn stalk_restriction<F: Field>(
    sheaf: &MGSheaf<F>,
    space: &SectionSpace<F>,
    vertex: usize,
) -> Result<TruncatedModule<F>, SheafError> {
    let k = space
        .lam_index(vertex)
        .ok_or_else(|| SheafError::Internal("vertex outside the section subset".into()))?;
    let spans: Vec<Vec<Vec<F::Elem>>> = (0..=sheaf.dmax)
        .map(|d| {
            space.basis[d]
                .iter()
                .map(|row| space.block_of(d, k, row).to_vec())
                .collect()
        })
        .collect();
    let (m, _) = span_module(&sheaf.stalks[vertex], &spans)
        .map_err(SheafError::Internal)?;
    Ok(m)
}

/// Sections supported on a single vertex: the kernel of all restriction
/// maps at that vertex along edges inside `lam`. (A tuple supported on one
/// vertex satisfies every other constraint trivially.)
pub fn costalk<F: Field>(
    sheaf: &MGSheaf<F>,
    graph: &MomentGraph<F>,
    lam: &[usize],
    vertex: usize,
) -> Result<TruncatedModule<F>, SheafError> {
    if !lam.contains(&vertex) {
        return Err(SheafError::Internal("vertex outside the section subset".into()));
    }
    let f = sheaf.field;
    let spans: Vec<Vec<Vec<F::Elem>>> = (0..=sheaf.dmax)
        .map(|d| {
            let nv = sheaf.stalks[vertex].dims[d];
            let mut cons: Vec<Vec<F::Elem>> = Vec::new();
            for &ei in &graph.edges_at[vertex] {
                let e = &graph.edges[ei];
                let other = if e.lo == vertex { e.hi } else { e.lo };
                if !lam.contains(&other) {
                    continue;
                }
                let rho_v = sheaf.rho(ei, e.lo == vertex, d);
                for i in 0..sheaf.edge_modules[ei].dims[d] {
                    cons.push((0..nv).map(|j| rho_v.at(i, j).clone()).collect());
                }
            }
            kernel_basis(f, cons, nv)
        })
        .collect();
    let (m, _) = span_module(&sheaf.stalks[vertex], &spans).map_err(SheafError::Internal)?;
    Ok(m)
}

/// Check that a section space is closed under the variable action: acting
/// on any degree-d basis row lands in the degree-(d+1) space.
pub fn verify_closure<F: Field>(
    sheaf: &MGSheaf<F>,
    space: &SectionSpace<F>,
) -> Result<(), String> {
    let f = sheaf.field;
    for d in 0..sheaf.dmax {
        let mut next = EchelonBasis::new(f, space.total[d + 1]);
        for row in &space.basis[d + 1] {
            next.insert(row.clone());
        }
        for var in 0..sheaf.ring.nvars {
            for row in &space.basis[d] {
                let img = apply_blockwise(sheaf, space, d, var, row);
                if !next.contains(&img) {
                    return Err(format!("action of x{} leaves the space at degree {d}", var + 1));
                }
            }
        }
    }
    Ok(())
}

/// Blockwise variable action on a section row.
pub fn apply_blockwise<F: Field>(
    sheaf: &MGSheaf<F>,
    space: &SectionSpace<F>,
    d: usize,
    var: usize,
    row: &[F::Elem],
) -> Vec<F::Elem> {
    let f = sheaf.field;
    let mut out = vec![f.zero(); space.total[d + 1]];
    for (k, &v) in space.lam.iter().enumerate() {
        let img = sheaf.stalks[v].apply_var(d, var, space.block_of(d, k, row));
        let off = space.offsets[d + 1][k];
        for (j, x) in img.into_iter().enumerate() {
            out[off + j] = x;
        }
    }
    out
}

/// Restriction of global rows to a subset's coordinates.
pub fn restrict_rows<F: Field>(
    space: &SectionSpace<F>,
    d: usize,
    subset: &[usize],
) -> Vec<Vec<F::Elem>> {
    space.basis[d]
        .iter()
        .map(|row| {
            let mut out = Vec::new();
            for &v in subset {
                let k = space.lam_index(v).expect("subset inside lam");
                out.extend_from_slice(space.block_of(d, k, row));
            }
            out
        })
        .collect()
}

/// One flabbiness failure: the named open set misses sections in the given
/// degree.
#[derive(Debug, Clone)]
pub struct FlabbyFailure {
    pub open: String,
    pub degree: usize,
    pub image_dim: usize,
    pub sections_dim: usize,
}

#[derive(Debug, Clone, Default)]
pub struct FlabbyReport {
    pub failures: Vec<FlabbyFailure>,
    pub opens_checked: usize,
}

impl FlabbyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Surjectivity of Γ(𝓜) → Γ(Ω,𝓜) for the principal opens {≥x} and {>x}
/// (optionally every open when the graph is small): flabbiness in the form
/// of the section-extension criterion. The image dimension is computed as
/// dim Γ minus the dimension of the sections vanishing on Ω, which is a
/// section space supported on the complement.
pub fn check_flabby<F: Field>(
    sheaf: &MGSheaf<F>,
    graph: &MomentGraph<F>,
    global: &SectionSpace<F>,
    exhaustive: bool,
) -> FlabbyReport {
    let nv = graph.vertex_count();
    let mut opens: Vec<(String, Vec<usize>)> = Vec::new();
    for x in 0..nv {
        let ge = graph.principal_up(x);
        let gt = graph.strict_up(x);
        opens.push((format!("{{>= {}}}", graph.interval.word_string(x)), ge));
        if !gt.is_empty() {
            opens.push((format!("{{> {}}}", graph.interval.word_string(x)), gt));
        }
    }
    if exhaustive {
        assert!(nv <= 12, "exhaustive open enumeration needs at most 12 vertices");
        for o in graph.all_opens() {
            if !o.is_empty() {
                let name = format!(
                    "{{{}}}",
                    o.iter().map(|&v| graph.interval.word_string(v)).collect::<Vec<_>>().join(", ")
                );
                opens.push((name, o));
            }
        }
    }
    opens.retain(|(_, o)| !o.is_empty());
    opens.sort_by(|a, b| a.1.cmp(&b.1));
    opens.dedup_by(|a, b| a.1 == b.1);
    let mut report = FlabbyReport::default();
    let all: Vec<usize> = (0..nv).collect();
    for (name, open) in opens {
        report.opens_checked += 1;
        if open == all {
            continue; // restriction is the identity
        }
        let omega_sections = sections(sheaf, graph, &open);
        let complement: Vec<usize> = (0..nv).filter(|v| !open.contains(v)).collect();
        let vanishing = sections_with(sheaf, graph, &complement, true);
        for d in 0..=sheaf.dmax {
            let image = global.basis[d].len() - vanishing.basis[d].len();
            let target = omega_sections.basis[d].len();
            debug_assert!(image <= target, "restriction image exceeds section space");
            if image != target {
                report.failures.push(FlabbyFailure {
                    open: name.clone(),
                    degree: d,
                    image_dim: image,
                    sections_dim: target,
                });
            }
        }
    }
    report
}

/// Structure algebra checks: every stalk restriction is S, every costalk is
/// the product of the incident labels times S (degreewise up to
/// D - n(x)), and the degree-0 global sections of a connected graph are
/// one-dimensional.
pub fn check_structure_algebra<F: Field>(
    sheaf: &MGSheaf<F>,
    graph: &MomentGraph<F>,
    z: &SectionSpace<F>,
) -> Vec<String> {
    let f = sheaf.field;
    let ring = &sheaf.ring;
    let mut bad = Vec::new();
    if graph.is_connected() && z.basis[0].len() != 1 {
        bad.push(format!(
            "degree-0 sections of a connected graph have dimension {}, not 1",
            z.basis[0].len()
        ));
    }
    for x in 0..graph.vertex_count() {
        let word = graph.interval.word_string(x);
        // Z^x = S
        match stalk_restriction(sheaf, z, x) {
            Ok(m) => {
                for d in 0..=sheaf.dmax {
                    if m.dims[d] != ring.dim(d) {
                        bad.push(format!(
                            "stalk restriction at ({word}) has dim {} in degree {d}, expected {}",
                            m.dims[d],
                            ring.dim(d)
                        ));
                    }
                }
            }
            Err(e) => bad.push(e.to_string()),
        }
        // Z_x = (product of labels) * S, in ambient S_d coordinates
        let n_x = graph.n_edges[x];
        let kernels: Vec<EchelonBasis<F>> = (0..=sheaf.dmax)
            .map(|d| {
                let nv = sheaf.stalks[x].dims[d];
                let mut cons: Vec<Vec<F::Elem>> = Vec::new();
                for &ei in &graph.edges_at[x] {
                    let e = &graph.edges[ei];
                    let rho_v = sheaf.rho(ei, e.lo == x, d);
                    for i in 0..sheaf.edge_modules[ei].dims[d] {
                        cons.push((0..nv).map(|j| rho_v.at(i, j).clone()).collect());
                    }
                }
                let mut eb = EchelonBasis::new(f, nv);
                for v in kernel_basis(f, cons, nv) {
                    eb.insert(v);
                }
                eb
            })
            .collect();
        for (d, k) in kernels.iter().enumerate().take(n_x.min(sheaf.dmax + 1)) {
            if k.dim() != 0 {
                bad.push(format!("costalk at ({word}) nonzero in degree {d} < n(x) = {n_x}"));
            }
        }
        if n_x > sheaf.dmax {
            continue;
        }
        let mut prod = vec![f.one()];
        for (lvl, &ei) in graph.edges_at[x].iter().enumerate() {
            prod = ring.apply_linear_form(f, &graph.edges[ei].label, lvl, &prod);
        }
        // layer holds a spanning set of (label product)·S_{d-n_x} in S_d
        let mut layer: Vec<Vec<F::Elem>> = vec![prod];
        for d in n_x..=sheaf.dmax {
            if d <= sheaf.dmax - n_x {
                let mut ideal = EchelonBasis::new(f, ring.dim(d));
                for v in &layer {
                    ideal.insert(v.clone());
                }
                if kernels[d].dim() != ideal.dim() {
                    bad.push(format!(
                        "costalk at ({word}) degree {d}: dim {} vs label-product ideal {}",
                        kernels[d].dim(),
                        ideal.dim()
                    ));
                }
                for v in ideal.rows() {
                    if !kernels[d].contains(v) {
                        bad.push(format!(
                            "label-product ideal not inside the costalk at ({word}) degree {d}"
                        ));
                        break;
                    }
                }
            }
            if d < sheaf.dmax {
                let mut seen = EchelonBasis::new(f, ring.dim(d + 1));
                let mut next: Vec<Vec<F::Elem>> = Vec::new();
                for v in &layer {
                    for var in 0..ring.nvars {
                        let mut coeffs = vec![f.zero(); ring.nvars];
                        coeffs[var] = f.one();
                        let img = ring.apply_linear_form(f, &coeffs, d, v);
                        if seen.insert(img.clone()) {
                            next.push(img);
                        }
                    }
                }
                layer = next;
            }
        }
    }
    bad
}
