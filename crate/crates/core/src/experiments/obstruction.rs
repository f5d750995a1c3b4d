//! Searches for a change of variable that makes `‖v∘h‖ · ‖u_n∘h‖` small.
//!
//! For every `n` the left side `(1/2π) |∫ v du_n|` does not depend on `h`,
//! and the duality inequality bounds it by the product for every `h`. The
//! search therefore cannot push the objective `max_n ‖v∘h‖ ‖u_n∘h‖` below
//! `max_n (1/2π) ∫ v du_n`; the record shows how close it gets.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circle::{PiecewiseLinearFunction, TAU};
use crate::construction::{build_delta_sequence, build_u, build_v, n_grid, place_intervals, truncate_un};
use crate::error::{Error, Result};
use crate::halfnorm::sobolev_half_exact;
use crate::homeo::{superpose, PLHomeomorphism};
use crate::optimize::NelderMead;
use crate::seminorm::ModulusSpec;
use crate::stieltjes::{stieltjes_check, rs_integral};

/// Relative slack on the per-candidate inequality.
pub const PRODUCT_SLACK: f64 = 1e-6;
/// One evaluation in this many is re-derived through superposed integrals.
pub const AUDIT_EVERY: usize = 100;
/// Agreement required between the audited and the reference left side.
pub const AUDIT_TOLERANCE: f64 = 1e-9;

pub const SEARCH_FAMILY: &str =
    "piecewise-linear homeomorphisms fixing 0 with uniform input knots; the minimum is empirical";

#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionOptions {
    pub omega: ModulusSpec,
    pub blocks: Vec<usize>,
    pub knots: usize,
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionRecord {
    #[serde(rename = "J")]
    pub blocks: usize,
    #[serde(rename = "K")]
    pub triangles: usize,
    pub n_grid: Vec<u64>,
    /// `(1/2π) ∫ v du_n`, one entry per `n`.
    pub lhs: Vec<f64>,
    pub sup_lower_bound: f64,
    /// `max_n (1/2π) Σ_{w_k >= 3/n} (2/9) w_k²`.
    pub certified_lower_bound: f64,
    pub best_homeo: PLHomeomorphism,
    /// `‖v∘h‖ ‖u_n∘h‖` at the best `h`, one entry per `n`.
    pub achieved_products: Vec<f64>,
    pub min_product: f64,
    pub identity_products: Vec<f64>,
    pub evals: usize,
    pub budget_exhausted: bool,
    /// Candidates for which some product fell below its left side.
    pub violations: usize,
    pub audited: usize,
    pub audit_max_rel_dev: f64,
    pub search_family: String,
}

struct Problem {
    v: PiecewiseLinearFunction,
    uns: Vec<PiecewiseLinearFunction>,
    lhs: Vec<f64>,
}

impl Problem {
    fn products(&self, h: &PLHomeomorphism) -> Result<Vec<f64>> {
        let nv = sobolev_half_exact(&superpose(&self.v, h)?)?;
        self.uns.iter().map(|un| Ok(nv * sobolev_half_exact(&superpose(un, h)?)?)).collect()
    }

    fn violated(&self, products: &[f64]) -> bool {
        self.lhs.iter().zip(products).any(|(l, p)| *l > p * (1.0 + PRODUCT_SLACK))
    }

    /// Largest relative deviation of `(1/2π) ∫ v∘h d(u_n∘h)` from the reference.
    fn audit(&self, h: &PLHomeomorphism) -> Result<f64> {
        let vh = superpose(&self.v, h)?;
        let mut worst: f64 = 0.0;
        for (un, l) in self.uns.iter().zip(&self.lhs) {
            let moved = rs_integral(&vh, &superpose(un, h)?)?.re / TAU;
            worst = worst.max((moved - l).abs() / l.abs().max(f64::MIN_POSITIVE));
        }
        Ok(worst)
    }
}

fn derived_seed(seed: u64, blocks: usize) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(blocks as u64)
}

pub fn run_obstruction(opts: &ObstructionOptions) -> Result<Vec<ObstructionRecord>> {
    if let ModulusSpec::Power { alpha } = opts.omega {
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(Error::Config(format!("α = {alpha} must lie in (0, 1/2)")));
        }
    }
    if opts.knots < 2 {
        return Err(Error::Config("the homeomorphism family needs at least two knots".into()));
    }
    opts.blocks.iter().map(|&j| run_one(opts, j)).collect()
}

fn run_one(opts: &ObstructionOptions, blocks: usize) -> Result<ObstructionRecord> {
    let seq = build_delta_sequence(&opts.omega, blocks)?;
    let sys = place_intervals(&seq, seq.len())?;
    let grid = n_grid(&sys);
    let u = build_u(&sys);
    let mut lhs = Vec::with_capacity(grid.len());
    let mut certified: f64 = 0.0;
    for &n in &grid {
        let report = stieltjes_check(&sys, n)?;
        lhs.push(report.value.re / TAU);
        certified = certified.max(report.lower_bound / TAU);
    }
    let problem = Problem {
        v: build_v(&sys),
        uns: grid.iter().map(|&n| truncate_un(&u, n)).collect::<Result<_>>()?,
        lhs,
    };
    let sup_lower_bound = problem.lhs.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut violations = 0;
    let mut audited = 0;
    let mut audit_max_rel_dev: f64 = 0.0;
    let mut count = 0;
    let mut failure: Option<Error> = None;
    let mut objective = |raw: &[f64]| -> f64 {
        let mut step = || -> Result<f64> {
            let h = PLHomeomorphism::from_increments(raw)?;
            let products = problem.products(&h)?;
            if problem.violated(&products) {
                violations += 1;
            }
            if count % AUDIT_EVERY == 0 {
                audited += 1;
                audit_max_rel_dev = audit_max_rel_dev.max(problem.audit(&h)?);
            }
            count += 1;
            Ok(products.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        };
        step().unwrap_or_else(|e| {
            failure.get_or_insert(e);
            f64::INFINITY
        })
    };
    let best = NelderMead::default().minimize_restarts(
        &mut objective,
        opts.knots,
        0.5,
        opts.restarts,
        opts.budget,
        derived_seed(opts.seed, blocks),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let best_homeo = PLHomeomorphism::from_increments(&best.x)?;
    let achieved_products = problem.products(&best_homeo)?;
    let identity_products = problem.products(&PLHomeomorphism::identity())?;
    Ok(ObstructionRecord {
        blocks,
        triangles: sys.len(),
        n_grid: grid,
        lhs: problem.lhs,
        sup_lower_bound,
        certified_lower_bound: certified,
        best_homeo,
        min_product: achieved_products.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        achieved_products,
        identity_products,
        evals: best.evals,
        budget_exhausted: best.budget_exhausted,
        violations,
        audited,
        audit_max_rel_dev,
        search_family: SEARCH_FAMILY.to_string(),
    })
}

impl ObstructionRecord {
    /// Problems with this record, empty when every check passed.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.violations > 0 {
            out.push(format!("J={}: {} candidates violated the product inequality", self.blocks, self.violations));
        }
        if self.audit_max_rel_dev > AUDIT_TOLERANCE {
            out.push(format!("J={}: audited integral deviates by {:e}", self.blocks, self.audit_max_rel_dev));
        }
        if self.min_product < self.sup_lower_bound * (1.0 - PRODUCT_SLACK) {
            out.push(format!(
                "J={}: best product {} fell below the lower bound {}",
                self.blocks, self.min_product, self.sup_lower_bound
            ));
        }
        for (i, (l, p)) in self.lhs.iter().zip(&self.identity_products).enumerate() {
            if *l > p * (1.0 + PRODUCT_SLACK) {
                out.push(format!("J={}: identity product below the left side at n={}", self.blocks, self.n_grid[i]));
            }
        }
        out
    }
}

#[derive(Serialize)]
struct CsvRow {
    #[serde(rename = "J")]
    blocks: usize,
    #[serde(rename = "K")]
    triangles: usize,
    sup_lower_bound: f64,
    min_product: f64,
    evals: usize,
}

pub fn records_to_csv(records: &[ObstructionRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(CsvRow {
            blocks: r.blocks,
            triangles: r.triangles,
            sup_lower_bound: r.sup_lower_bound,
            min_product: r.min_product,
            evals: r.evals,
        })
        .map_err(|e| Error::Serde(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serde(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

/// Writes `obstruction.json` and/or `obstruction.csv` into `dir`, returning
/// the paths written.
pub fn emit(records: &[ObstructionRecord], dir: &Path, formats: &[Format]) -> Result<Vec<std::path::PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for f in formats {
        let (name, body) = match f {
            Format::Json => ("obstruction.json", serde_json::to_string_pretty(records)? + "\n"),
            Format::Csv => ("obstruction.csv", records_to_csv(records)?),
        };
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}
