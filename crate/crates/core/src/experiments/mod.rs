//! Orchestration used by the command-line tool: verification suites, the
//! obstruction search, the lacunary fixture and result files.

pub mod config;
pub mod lacunary;
pub mod obstruction;
pub mod suites;

use serde::{Deserialize, Serialize};

pub use config::Config;
pub use lacunary::{lacunary_fixture, LacunaryReport};
pub use obstruction::{emit, run_obstruction, Format, ObstructionOptions, ObstructionRecord};
pub use suites::SuiteResult;

use crate::construction::{build_delta_sequence, build_delta_sequence_exploratory, build_v, place_intervals};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
    pub warnings: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SuiteResult> {
        self.suites.iter().filter(|s| !s.passed)
    }
}

/// Runs every suite for `config`. Construction errors become failed suites
/// rather than errors, so the report is always complete.
pub fn verify_all(config: &Config) -> Result<VerifyReport> {
    config.validate()?;
    let mut warnings = Vec::new();
    let mut out = Vec::new();
    let omega = &config.omega;

    if config.exploratory {
        warnings.push("exploratory mode: the scale sequence ignores the growth condition and no bounds are claimed".into());
        let seq = build_delta_sequence_exploratory(omega, config.blocks)?;
        let sys = place_intervals(&seq, config.truncation.unwrap_or(seq.len()).min(seq.len()))?;
        out.push(suites::suite_truncation(&sys, 200, config.seed));
    } else {
        out.push(suites::suite_sequence(omega, config.blocks));
        match build_delta_sequence(omega, config.blocks) {
            Ok(seq) => {
                let count = config.truncation.unwrap_or(seq.len());
                if count == 0 {
                    warnings.push("empty construction (K = 0): construction suites hold vacuously".into());
                }
                match place_intervals(&seq, count) {
                    Ok(sys) => {
                        let v = if config.halve_v {
                            warnings.push("mutation: weights of v halved".into());
                            build_v(&sys.with_scaled_weights(0.5))
                        } else {
                            build_v(&sys)
                        };
                        out.push(suites::suite_lipschitz(&sys, omega, config.lip_constant));
                        out.push(suites::suite_truncation(&sys, 200, config.seed));
                        out.push(suites::suite_stieltjes(&sys, &v));
                    }
                    Err(e) => warnings.push(format!("placement failed: {e}")),
                }
                if config.truncation.is_none() && !config.halve_v {
                    out.push(suites::suite_growth(omega, config.blocks));
                }
            }
            Err(e) => warnings.push(format!("construction failed: {e}")),
        }
    }
    out.push(suites::suite_triangle_bound(config.triangle_samples, config.seed));
    out.push(suites::suite_duality(config.audit_pairs, config.seed));
    out.push(suites::suite_superposition(config.superposition_pairs, config.seed_secondary));
    out.push(suites::suite_lacunary(config.lacunary_terms));
    out.push(suites::suite_equivalence(config.equivalence_harmonics, config.equivalence_grid));
    Ok(VerifyReport { suites: out, warnings })
}
