//! End-to-end pipelines shared by the command line tool and the C API:
//! build a graph, compute a KL table, run the construction and the selected
//! checks, and emit the JSON report.

use crate::arith::{Field, FieldSpec, PrimeField, QPoly, Rationals};
use crate::bmp::{self, BmpSheaf, OrderVariant};
use crate::klpoly::KLTable;
use crate::momentgraph::{GraphError, MomentGraph};
use crate::rootsys::{CartanType, RootSystem};
use crate::sheafcore::{check_flabby, check_structure_algebra, sections, structure_sheaf};
use crate::weyl::WeylGroup;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Stable process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNCERTIFIED: i32 = 3;

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub ctype: CartanType,
    pub affine: bool,
    pub word: String,
    pub field: FieldSpec,
    pub max_degree: Option<usize>,
    pub checks: CheckSelection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckSelection {
    pub conj_mc: bool,
    pub main_t: bool,
    pub flabby: bool,
    pub struc_z: bool,
    pub sm_b: bool,
    pub deodhar: bool,
}

impl CheckSelection {
    pub fn all() -> Self {
        CheckSelection {
            conj_mc: true,
            main_t: true,
            flabby: true,
            struc_z: true,
            sm_b: true,
            deodhar: true,
        }
    }

    pub fn none() -> Self {
        CheckSelection {
            conj_mc: false,
            main_t: false,
            flabby: false,
            struc_z: false,
            sm_b: false,
            deodhar: false,
        }
    }

    /// Parse a comma list like "conjMC,mainT,flabby,strucZ,smB,deodhar".
    pub fn parse(s: &str) -> Result<Self, RunError> {
        let mut sel = Self::none();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok {
                "conjMC" => sel.conj_mc = true,
                "mainT" => sel.main_t = true,
                "flabby" => sel.flabby = true,
                "strucZ" => sel.struc_z = true,
                "smB" => sel.sm_b = true,
                "deodhar" => sel.deodhar = true,
                _ => return Err(RunError::Input(format!("unknown check `{tok}`"))),
            }
        }
        Ok(sel)
    }
}

#[derive(Debug)]
pub enum RunError {
    /// Bad configuration or word: exit code 2.
    Input(String),
    /// The moment graph is unusable (zero label / GKM failure): exit 1,
    /// message carries the violating pairs.
    Graph(String),
    /// Construction self-checks failed; indicates a bug, exit 1.
    Internal(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Input(s) => write!(f, "input error: {s}"),
            RunError::Graph(s) => write!(f, "moment graph rejected: {s}"),
            RunError::Internal(s) => write!(f, "internal error: {s}"),
        }
    }
}

impl std::error::Error for RunError {}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Input(_) => EXIT_INPUT,
            RunError::Graph(_) | RunError::Internal(_) => EXIT_CHECK_FAILED,
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct VertexReport {
    pub word: String,
    pub rank_poly: Vec<i64>,
    pub n_edges: usize,
    pub smooth_rank: bool,
    pub smooth_comb: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct Checks {
    #[serde(rename = "conjMC")]
    pub conj_mc: String,
    #[serde(rename = "mainT")]
    pub main_t: String,
    pub flabby: String,
    #[serde(rename = "strucZ")]
    pub struc_z: String,
    #[serde(rename = "smB")]
    pub sm_b: String,
    pub deodhar: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    #[serde(rename = "type")]
    pub ctype: String,
    pub affine: bool,
    pub w: String,
    pub field: String,
    #[serde(rename = "D")]
    pub d: usize,
    pub vertices: Vec<VertexReport>,
    pub checks: Checks,
}

impl RunReport {
    pub fn all_selected_passed(&self) -> bool {
        [
            &self.checks.conj_mc,
            &self.checks.main_t,
            &self.checks.flabby,
            &self.checks.struc_z,
            &self.checks.sm_b,
            &self.checks.deodhar,
        ]
        .iter()
        .all(|s| *s == "pass" || s.starts_with("skipped"))
    }

    pub fn uncertified(&self) -> bool {
        self.checks.conj_mc.contains("uncertified")
    }

    pub fn exit_code(&self) -> i32 {
        if self.uncertified() {
            EXIT_UNCERTIFIED
        } else if self.all_selected_passed() {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }
}

#[derive(Debug)]
pub struct VerifyOutcome {
    pub report: RunReport,
    /// human-readable details of every failure
    pub failures: Vec<String>,
    pub dot: Option<String>,
    pub hilbert: Option<serde_json::Value>,
}

pub struct BuildOutput {
    pub vertices: usize,
    pub edges: usize,
    pub gkm_passed: bool,
    pub gkm_violations: Vec<String>,
    pub n_table: Vec<(String, usize)>,
    pub graph_json: serde_json::Value,
    pub dot: Option<String>,
    pub hilbert: Option<serde_json::Value>,
}

struct Prepared<F: Field> {
    weyl: WeylGroup,
    graph: MomentGraph<F>,
    dmax: usize,
}

fn prepare<F: Field>(cfg: &RunConfig, field: F) -> Result<Prepared<F>, RunError> {
    let rs = Arc::new(
        RootSystem::new(cfg.ctype).map_err(|e| RunError::Input(e.to_string()))?,
    );
    // provisional horizon from the word length; retuned after parsing
    let wordlen = cfg.word.split_whitespace().count() as u32;
    let mut weyl = WeylGroup::new(rs, cfg.affine, 2 * wordlen + 2);
    let (w, gens) = weyl
        .parse_word(&cfg.word)
        .map_err(|e| RunError::Input(e.to_string()))?;
    let lw = weyl.length(w).map_err(|e| RunError::Input(e.to_string()))?;
    if lw as usize != gens.len() {
        return Err(RunError::Input(
            crate::weyl::WeylError::NotReduced { word_len: gens.len(), length: lw }.to_string(),
        ));
    }
    let dmax = cfg.max_degree.unwrap_or((lw as usize).max(1));
    if dmax < 1 {
        return Err(RunError::Input("max degree must be at least 1".into()));
    }
    let interval = weyl
        .lower_interval(w)
        .map_err(|e| RunError::Input(e.to_string()))?;
    let graph = MomentGraph::build(&mut weyl, interval, field).map_err(|e| match e {
        GraphError::ZeroLabel { .. } => RunError::Graph(e.to_string()),
        GraphError::Weyl(we) => RunError::Input(we.to_string()),
    })?;
    Ok(Prepared { weyl, graph, dmax })
}

fn hilbert_json<F: Field>(
    graph: &MomentGraph<F>,
    dims: Vec<usize>,
) -> serde_json::Value {
    let subset: Vec<String> =
        (0..graph.vertex_count()).map(|i| graph.interval.word_string(i)).collect();
    serde_json::json!({ "subset": subset, "dims": dims })
}

fn build_with<F: Field>(
    cfg: &RunConfig,
    field: F,
    want_dot: bool,
    want_hilbert: bool,
) -> Result<BuildOutput, RunError> {
    let p = prepare(cfg, field)?;
    let gkm = p.graph.gkm_check();
    let n_table = (0..p.graph.vertex_count())
        .map(|i| (p.graph.interval.word_string(i), p.graph.n_edges[i]))
        .collect();
    let hilbert = if want_hilbert && gkm.passed() {
        let (sheaf, z) = crate::sheafcore::structure_algebra(&p.graph, p.dmax)
            .map_err(|e| RunError::Internal(e.to_string()))?;
        let _ = sheaf;
        Some(hilbert_json(&p.graph, z.dims()))
    } else {
        None
    };
    Ok(BuildOutput {
        vertices: p.graph.vertex_count(),
        edges: p.graph.edge_count(),
        gkm_passed: gkm.passed(),
        gkm_violations: gkm.violations.iter().map(|v| v.to_string()).collect(),
        n_table,
        graph_json: p.graph.to_json(&p.weyl),
        dot: want_dot.then(|| p.graph.to_dot(&p.weyl)),
        hilbert,
    })
}

pub fn cmd_build(
    cfg: &RunConfig,
    want_dot: bool,
    want_hilbert: bool,
) -> Result<BuildOutput, RunError> {
    match cfg.field {
        FieldSpec::Q => build_with(cfg, Rationals, want_dot, want_hilbert),
        FieldSpec::Fp(p) => {
            let f = PrimeField::new(p).map_err(|e| RunError::Input(e.to_string()))?;
            build_with(cfg, f, want_dot, want_hilbert)
        }
    }
}

pub struct KlOutput {
    pub tsv: String,
    pub rows: Vec<(String, String, Vec<i64>)>,
}

pub fn cmd_kl(cfg: &RunConfig) -> Result<KlOutput, RunError> {
    // the KL table is field-independent; prepare over Q
    let mut p = prepare(cfg, Rationals)?;
    let mut table =
        KLTable::new(&mut p.weyl, &p.graph.interval).map_err(|e| RunError::Input(e.to_string()))?;
    let n = p.graph.vertex_count();
    let rows = (0..n)
        .map(|x| {
            let poly = table.kl(x, n - 1);
            let coeffs =
                if poly.is_zero() { vec![0] } else { poly.coeffs().to_vec() };
            (
                p.graph.interval.word_string(x),
                p.graph.interval.word_string(n - 1),
                coeffs,
            )
        })
        .collect();
    Ok(KlOutput { tsv: table.to_tsv(), rows })
}

fn verify_with<F: Field>(
    cfg: &RunConfig,
    field: F,
    want_dot: bool,
    want_hilbert: bool,
) -> Result<VerifyOutcome, RunError> {
    let mut p = prepare(cfg, field)?;
    let gkm = p.graph.gkm_check();
    if !gkm.passed() {
        let msgs: Vec<String> = gkm.violations.iter().map(|v| v.to_string()).collect();
        return Err(RunError::Graph(msgs.join("; ")));
    }
    let sel = cfg.checks;
    let bmp_sheaf = bmp::braden_macpherson(&p.graph, p.dmax, OrderVariant::Standard)
        .map_err(|e| RunError::Internal(e.to_string()))?;
    // construction invariants always run; failures are internal errors
    let construction = bmp::verify_construction(&bmp_sheaf, &p.graph);
    if !construction.is_empty() {
        return Err(RunError::Internal(construction.join("; ")));
    }
    let mut failures: Vec<String> = Vec::new();
    let graph = &p.graph;
    let n = graph.vertex_count();
    let comb_locus = graph.smooth_locus_combinatorial();

    let mut checks = Checks {
        conj_mc: "skipped(not selected)".into(),
        main_t: "skipped(not selected)".into(),
        flabby: "skipped(not selected)".into(),
        struc_z: "skipped(not selected)".into(),
        sm_b: "skipped(not selected)".into(),
        deodhar: "skipped(not selected)".into(),
    };
    let mut kl_table =
        KLTable::new(&mut p.weyl, &graph.interval).map_err(|e| RunError::Input(e.to_string()))?;

    if !bmp_sheaf.certified {
        let skip = "skipped(uncertified truncation)".to_string();
        checks = Checks {
            conj_mc: skip.clone(),
            main_t: skip.clone(),
            flabby: skip.clone(),
            struc_z: skip.clone(),
            sm_b: skip.clone(),
            deodhar: skip,
        };
    } else {
        let mut run_check = |name: &str, selected: bool, bad: Vec<String>| -> String {
            if !selected {
                return "skipped(not selected)".into();
            }
            if bad.is_empty() {
                "pass".into()
            } else {
                failures.extend(bad.iter().map(|b| format!("[{name}] {b}")));
                "fail".into()
            }
        };
        if sel.conj_mc {
            let bad = bmp::verify_rank_conjecture(&bmp_sheaf, graph, &mut kl_table)
                .map_err(|e| RunError::Internal(e.to_string()))?;
            checks.conj_mc = run_check("conjMC", true, bad);
        }
        if sel.main_t {
            let bad = bmp::verify_main_theorem(&bmp_sheaf, graph)
                .map_err(|e| RunError::Internal(e.to_string()))?;
            checks.main_t = run_check("mainT", true, bad);
        }
        if sel.deodhar {
            let mut bad = Vec::new();
            let lw = graph.interval.max_length() as usize;
            for x in 0..n {
                let p_one = kl_table.kl(x, n - 1).eval_one() == 1;
                let count = graph.n_edges[x] == lw;
                if p_one != count {
                    bad.push(format!(
                        "vertex ({}): P(1)=1 is {} but n_w(x)=l(w) is {}",
                        graph.interval.word_string(x),
                        p_one,
                        count
                    ));
                }
            }
            checks.deodhar = run_check("deodhar", true, bad);
        }
        if sel.struc_z {
            let sheaf = structure_sheaf(graph, p.dmax)
                .map_err(|e| RunError::Internal(e.to_string()))?;
            let all: Vec<usize> = (0..n).collect();
            let z = sections(&sheaf, graph, &all);
            let bad = check_structure_algebra(&sheaf, graph, &z);
            checks.struc_z = run_check("strucZ", true, bad);
        }
        let mut global = None;
        if sel.flabby {
            let g = bmp_sheaf.global_sections(graph);
            let report = check_flabby(&bmp_sheaf.sheaf, graph, &g, false);
            let bad: Vec<String> = report
                .failures
                .iter()
                .map(|f| {
                    format!(
                        "open {} degree {}: image {} of {}",
                        f.open, f.degree, f.image_dim, f.sections_dim
                    )
                })
                .collect();
            checks.flabby = run_check("flabby", true, bad);
            global = Some(g);
        }
        if sel.sm_b {
            let mut bad = Vec::new();
            let locus = bmp_sheaf
                .smooth_locus_rank()
                .map_err(|e| RunError::Internal(e.to_string()))?;
            for &x in &locus {
                match bmp::verify_smooth_costalk(&bmp_sheaf, graph, x) {
                    Ok(b) => bad.extend(b),
                    Err(e) => bad.push(e.to_string()),
                }
            }
            checks.sm_b = run_check("smB", true, bad);
        }
        if want_hilbert && global.is_none() {
            global = Some(bmp_sheaf.global_sections(graph));
        }
        if want_hilbert {
            // reuse below
            let dims = global.as_ref().unwrap().dims();
            let h = hilbert_json(graph, dims);
            let report = make_report(cfg, graph, &bmp_sheaf, &comb_locus, p.dmax, checks);
            return Ok(VerifyOutcome {
                report,
                failures,
                dot: want_dot.then(|| graph.to_dot(&p.weyl)),
                hilbert: Some(h),
            });
        }
    }
    let report = make_report(cfg, graph, &bmp_sheaf, &comb_locus, p.dmax, checks);
    Ok(VerifyOutcome {
        report,
        failures,
        dot: want_dot.then(|| p.graph.to_dot(&p.weyl)),
        hilbert: None,
    })
}

fn make_report<F: Field>(
    cfg: &RunConfig,
    graph: &MomentGraph<F>,
    bmp_sheaf: &BmpSheaf<F>,
    comb_locus: &[usize],
    dmax: usize,
    checks: Checks,
) -> RunReport {
    let n = graph.vertex_count();
    let vertices = (0..n)
        .map(|x| {
            let rank = bmp_sheaf.graded_rank(x);
            let coeffs: Vec<i64> = if rank.is_zero() {
                vec![0]
            } else {
                rank.coeffs().to_vec()
            };
            VertexReport {
                word: graph.interval.word_string(x),
                rank_poly: coeffs,
                n_edges: graph.n_edges[x],
                smooth_rank: bmp_sheaf.gen_degrees[x] == [0],
                smooth_comb: comb_locus.contains(&x),
            }
        })
        .collect();
    RunReport {
        ctype: cfg.ctype.to_string(),
        affine: cfg.affine,
        w: graph.interval.word_string(n - 1),
        field: cfg.field.to_string(),
        d: dmax,
        vertices,
        checks,
    }
}

pub fn cmd_verify(
    cfg: &RunConfig,
    want_dot: bool,
    want_hilbert: bool,
) -> Result<VerifyOutcome, RunError> {
    match cfg.field {
        FieldSpec::Q => verify_with(cfg, Rationals, want_dot, want_hilbert),
        FieldSpec::Fp(p) => {
            let f = PrimeField::new(p).map_err(|e| RunError::Input(e.to_string()))?;
            verify_with(cfg, f, want_dot, want_hilbert)
        }
    }
}

/// Graded rank table without any checks, as (word, rank coefficients).
pub fn rank_table(cfg: &RunConfig) -> Result<Vec<(String, QPoly)>, RunError> {
    let mut cfg = cfg.clone();
    cfg.checks = CheckSelection::none();
    let out = cmd_verify(&cfg, false, false)?;
    Ok(out
        .report
        .vertices
        .into_iter()
        .map(|v| (v.word, QPoly::from_coeffs(v.rank_poly)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(t: &str, affine: bool, word: &str, field: &str) -> RunConfig {
        RunConfig {
            ctype: CartanType::parse(t).unwrap(),
            affine,
            word: word.into(),
            field: FieldSpec::parse(field).unwrap(),
            max_degree: None,
            checks: CheckSelection::all(),
        }
    }

    #[test]
    fn build_a2_w0() {
        let out = cmd_build(&config("A2", false, "s1 s2 s1", "Q"), true, false).unwrap();
        assert_eq!(out.vertices, 6);
        assert_eq!(out.edges, 9);
        assert!(out.gkm_passed);
        assert!(out.dot.unwrap().contains("digraph"));
    }

    #[test]
    fn build_a1_simple() {
        let out = cmd_build(&config("A1", false, "s1", "Q"), false, false).unwrap();
        assert_eq!(out.vertices, 2);
        assert_eq!(out.edges, 1);
    }

    #[test]
    fn build_affine_f2_rejected() {
        // zero labels mod 2 reject the graph outright
        let err = cmd_build(&config("A1", true, "s1 s0 s1 s0", "Fp:2"), false, false);
        assert!(err.is_err() || !err.unwrap().gkm_passed);
    }

    #[test]
    fn nonreduced_word_is_input_error() {
        let err = cmd_verify(&config("A2", false, "s1 s1", "Q"), false, false).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_INPUT);
    }

    #[test]
    fn kl_rows() {
        let out = cmd_kl(&config("A3", false, "s2 s1 s3 s2", "Q")).unwrap();
        let s2_row = out.rows.iter().find(|r| r.0 == "s2").unwrap();
        assert_eq!(s2_row.2, vec![1, 1]);
        let top = out.rows.last().unwrap();
        assert_eq!(top.2, vec![1]);
        assert!(out.tsv.contains("s2\ts2 s1 s3 s2\t1,1"));
    }

    #[test]
    fn verify_a3_singular_q() {
        let out = cmd_verify(&config("A3", false, "s2 s1 s3 s2", "Q"), false, true).unwrap();
        assert_eq!(out.report.exit_code(), EXIT_OK, "failures: {:?}", out.failures);
        assert_eq!(out.report.checks.conj_mc, "pass");
        assert_eq!(out.report.checks.main_t, "pass");
        assert_eq!(out.report.checks.flabby, "pass");
        assert_eq!(out.report.checks.struc_z, "pass");
        assert_eq!(out.report.checks.sm_b, "pass");
        assert_eq!(out.report.checks.deodhar, "pass");
        let s2 = out.report.vertices.iter().find(|v| v.word == "s2").unwrap();
        assert_eq!(s2.rank_poly, vec![1, 1]);
        assert!(!s2.smooth_rank);
        assert!(!s2.smooth_comb);
        // hilbert dump has one dim per degree 0..=D
        let h = out.hilbert.unwrap();
        assert_eq!(h["dims"].as_array().unwrap().len(), out.report.d + 1);
        // JSON round trip reproduces identical verdicts
        let text = serde_json::to_string(&out.report).unwrap();
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, out.report);
    }

    #[test]
    fn verify_affine_a1_q() {
        let out = cmd_verify(&config("A1", true, "s1 s0 s1", "Q"), false, false).unwrap();
        assert_eq!(out.report.exit_code(), EXIT_OK, "failures: {:?}", out.failures);
        // all ranks 1, smooth locus = all
        for v in &out.report.vertices {
            assert_eq!(v.rank_poly, vec![1]);
            assert!(v.smooth_rank);
        }
    }

    #[test]
    fn verify_gkm_failure_exit() {
        let err =
            cmd_verify(&config("A1", true, "s1 s0 s1", "Fp:2"), false, false).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_CHECK_FAILED);
        let msg = err.to_string();
        assert!(msg.contains("zero label") || msg.contains("rejected"), "{msg}");
    }

    #[test]
    fn check_selection_parsing() {
        let sel = CheckSelection::parse("conjMC,deodhar").unwrap();
        assert!(sel.conj_mc && sel.deodhar);
        assert!(!sel.main_t && !sel.flabby && !sel.struc_z && !sel.sm_b);
        assert!(CheckSelection::parse("bogus").is_err());
        assert_eq!(CheckSelection::parse("").unwrap(), CheckSelection::none());
    }

    #[test]
    fn rank_table_shortcut() {
        let table = rank_table(&config("B2", false, "s1 s2 s1 s2", "Q")).unwrap();
        assert_eq!(table.len(), 8);
        assert!(table.iter().all(|(_, p)| p.is_one()));
    }
}
