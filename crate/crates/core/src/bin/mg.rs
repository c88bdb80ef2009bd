//! Command line front end: build moment graphs, print KL tables, run the
//! sheaf construction with its verification checks.
//!
//! Exit codes: 0 all selected checks pass, 1 a check or the GKM condition
//! failed, 2 input error, 3 the run was not certified (truncation).

use clap::{Args, Parser, Subcommand};
use mgsheaf::arith::FieldSpec;
use mgsheaf::rootsys::CartanType;
use mgsheaf::run::{
    cmd_build, cmd_kl, cmd_verify, CheckSelection, RunConfig, RunError, EXIT_UNCERTIFIED,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mg",
    about = "Bruhat moment graphs, Kazhdan-Lusztig polynomials and the sheaf construction over exact fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Cartan type: A1..A4, B2..B4, C2..C4, D4, G2
    #[arg(long = "type")]
    ctype: String,
    /// Use the affine Weyl group (adds the generator s0)
    #[arg(long)]
    affine: bool,
    /// Reduced word for w, e.g. "s1 s0 s1"
    #[arg(long)]
    w: String,
    /// Coefficient field: Q or Fp:<prime>
    #[arg(long, default_value = "Q")]
    field: String,
    /// Truncation bound D (default: l(w))
    #[arg(long = "max-degree")]
    max_degree: Option<usize>,
    /// Write a DOT rendering of the graph to this path
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Emit machine-readable JSON
    #[arg(long)]
    json: bool,
    /// Dump per-degree dimensions of the relevant section space
    #[arg(long)]
    hilbert: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build the moment graph and report its size, GKM status and n(y) table
    Build(CommonArgs),
    /// Print the Kazhdan-Lusztig table of the interval
    Kl {
        #[command(flatten)]
        common: CommonArgs,
        /// Tab-separated output
        #[arg(long)]
        tsv: bool,
    },
    /// Run the sheaf construction; checks are off unless selected
    Bmp {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma list of checks to run: conjMC,mainT,flabby,strucZ,smB,deodhar
        #[arg(long)]
        checks: Option<String>,
    },
    /// Run the sheaf construction and all (or the selected) checks
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma list of checks to run: conjMC,mainT,flabby,strucZ,smB,deodhar
        #[arg(long)]
        checks: Option<String>,
    },
}

fn parse_config(common: &CommonArgs, checks: CheckSelection) -> Result<RunConfig, RunError> {
    let ctype = CartanType::parse(&common.ctype).map_err(|e| RunError::Input(e.to_string()))?;
    let field = FieldSpec::parse(&common.field)
        .map_err(|_| RunError::Input(format!("cannot parse field `{}`", common.field)))?;
    Ok(RunConfig {
        ctype,
        affine: common.affine,
        word: common.w.clone(),
        field,
        max_degree: common.max_degree,
        checks,
    })
}

fn write_dot(path: &PathBuf, dot: &str) -> Result<(), RunError> {
    std::fs::write(path, dot)
        .map_err(|e| RunError::Input(format!("cannot write {}: {e}", path.display())))
}

fn construction_command(common: CommonArgs, sel: CheckSelection) -> Result<i32, RunError> {
    let cfg = parse_config(&common, sel)?;
    let out = cmd_verify(&cfg, common.dot.is_some(), common.hilbert)?;
    if let (Some(path), Some(dot)) = (&common.dot, &out.dot) {
        write_dot(path, dot)?;
    }
    println!("{}", serde_json::to_string_pretty(&out.report).unwrap());
    if let Some(h) = &out.hilbert {
        println!("{}", serde_json::to_string(h).unwrap());
    }
    for f in &out.failures {
        eprintln!("failure: {f}");
    }
    let code = out.report.exit_code();
    if code == EXIT_UNCERTIFIED {
        eprintln!(
            "run is not certified: a generator computation reached the truncation bound; \
             re-run with a larger --max-degree"
        );
    }
    Ok(code)
}

fn run() -> Result<i32, RunError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Build(common) => {
            let cfg = parse_config(&common, CheckSelection::none())?;
            let out = cmd_build(&cfg, common.dot.is_some(), common.hilbert)?;
            if let (Some(path), Some(dot)) = (&common.dot, &out.dot) {
                write_dot(path, dot)?;
            }
            if common.json {
                println!("{}", serde_json::to_string_pretty(&out.graph_json).unwrap());
            } else {
                println!("vertices: {}", out.vertices);
                println!("edges:    {}", out.edges);
                println!("GKM:      {}", if out.gkm_passed { "pass" } else { "FAIL" });
                for v in &out.gkm_violations {
                    println!("  violation: {v}");
                }
                println!("n(y):");
                for (word, n) in &out.n_table {
                    println!("  {n:>3}  {word}");
                }
            }
            if let Some(h) = &out.hilbert {
                println!("{}", serde_json::to_string(h).unwrap());
            }
            Ok(if out.gkm_passed { 0 } else { 1 })
        }
        Command::Kl { common, tsv } => {
            let cfg = parse_config(&common, CheckSelection::none())?;
            let out = cmd_kl(&cfg)?;
            if common.json {
                let rows: Vec<serde_json::Value> = out
                    .rows
                    .iter()
                    .map(|(x, w, p)| serde_json::json!({ "x": x, "w": w, "p": p }))
                    .collect();
                println!("{}", serde_json::to_string_pretty(&rows).unwrap());
            } else if tsv {
                print!("{}", out.tsv);
            } else {
                for (x, _, p) in &out.rows {
                    let poly = mgsheaf::arith::QPoly::from_coeffs(p.clone());
                    println!("P({x}, w) = {poly}");
                }
            }
            Ok(0)
        }
        Command::Bmp { common, checks } => {
            let sel = match &checks {
                Some(list) => CheckSelection::parse(list)?,
                None => CheckSelection::none(),
            };
            construction_command(common, sel)
        }
        Command::Verify { common, checks } => {
            let sel = match &checks {
                Some(list) => CheckSelection::parse(list)?,
                None => CheckSelection::all(),
            };
            construction_command(common, sel)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
