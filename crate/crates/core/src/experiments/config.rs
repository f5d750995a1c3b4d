//! Flat `key = value` configuration, one entry per line, `#` starts a comment.
//!
//! Numbers accept a fraction form such as `1/3`, evaluated in double
//! precision so that `1/3` matches `1.0 / 3.0` bit for bit.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::seminorm::ModulusSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub omega: ModulusSpec,
    /// Block count `J`.
    pub blocks: usize,
    /// Triangle count `K`; `None` keeps every scale of the `J` blocks.
    pub truncation: Option<usize>,
    /// Knot count `M` of the homeomorphism family.
    pub knots: usize,
    pub seed: u64,
    pub seed_secondary: u64,
    pub budget: usize,
    pub restarts: usize,
    pub audit_pairs: usize,
    pub triangle_samples: usize,
    pub superposition_pairs: usize,
    pub lacunary_terms: usize,
    pub equivalence_grid: usize,
    pub equivalence_harmonics: usize,
    pub lip_constant: f64,
    /// Allows `α = 1/2`, building the sequence without the growth condition.
    pub exploratory: bool,
    /// Halves the weights of `v` only; the Stieltjes suite must then fail.
    pub halve_v: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            omega: ModulusSpec::Power { alpha: 1.0 / 3.0 },
            blocks: 4,
            truncation: None,
            knots: 32,
            seed: 7,
            seed_secondary: 42,
            budget: 2000,
            restarts: 4,
            audit_pairs: 200,
            triangle_samples: 100_000,
            superposition_pairs: 100,
            lacunary_terms: 12,
            equivalence_grid: 1 << 12,
            equivalence_harmonics: 64,
            lip_constant: 8.0,
            exploratory: false,
            halve_v: false,
        }
    }
}

pub const KEYS: &[&str] = &[
    "omega.kind",
    "omega.alpha",
    "omega.table",
    "blocks",
    "truncation",
    "placement.gap_rule",
    "knots",
    "seed",
    "seed.secondary",
    "budget",
    "restarts",
    "audit.pairs",
    "triangle.samples",
    "superposition.pairs",
    "lacunary.terms",
    "equivalence.grid",
    "equivalence.harmonics",
    "lip.constant",
    "exploratory",
    "mutation.halve_v",
];

/// Parses `a`, `a/b`, or any float literal.
pub fn parse_number(text: &str) -> Result<f64> {
    let text = text.trim();
    let bad = || Error::Config(format!("not a number: {text:?}"));
    match text.split_once('/') {
        Some((num, den)) => {
            let n: f64 = num.trim().parse().map_err(|_| bad())?;
            let d: f64 = den.trim().parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            Ok(n / d)
        }
        None => text.parse().map_err(|_| bad()),
    }
}

fn parse_int<T: std::str::FromStr>(key: &str, text: &str) -> Result<T> {
    text.trim().parse().map_err(|_| Error::Config(format!("{key}: expected a non-negative integer, got {text:?}")))
}

fn parse_bool(key: &str, text: &str) -> Result<bool> {
    match text.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(Error::Config(format!("{key}: expected true or false, got {other:?}"))),
    }
}

/// `δ:ω` pairs separated by commas.
fn parse_table(text: &str) -> Result<Vec<(f64, f64)>> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (d, w) = p
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("omega.table entry {p:?} is not of the form δ:ω")))?;
            Ok((parse_number(d)?, parse_number(w)?))
        })
        .collect()
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::Config(format!("line {}: unknown key {key:?}", lineno + 1)));
            }
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key {key:?}", lineno + 1)));
            }
        }
        Self::from_entries(&entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn from_entries(e: &BTreeMap<String, String>) -> Result<Self> {
        let mut c = Config::default();
        let get = |k: &str| e.get(k).map(String::as_str);
        if let Some(v) = get("blocks") {
            c.blocks = parse_int("blocks", v)?;
        }
        if let Some(v) = get("truncation") {
            c.truncation = Some(parse_int("truncation", v)?);
        }
        if let Some(v) = get("placement.gap_rule") {
            if v != "equal" {
                return Err(Error::Config(format!("placement.gap_rule: only \"equal\" is supported, got {v:?}")));
            }
        }
        if let Some(v) = get("knots") {
            c.knots = parse_int("knots", v)?;
        }
        if let Some(v) = get("seed") {
            c.seed = parse_int("seed", v)?;
        }
        if let Some(v) = get("seed.secondary") {
            c.seed_secondary = parse_int("seed.secondary", v)?;
        }
        if let Some(v) = get("budget") {
            c.budget = parse_int("budget", v)?;
        }
        if let Some(v) = get("restarts") {
            c.restarts = parse_int("restarts", v)?;
        }
        if let Some(v) = get("audit.pairs") {
            c.audit_pairs = parse_int("audit.pairs", v)?;
        }
        if let Some(v) = get("triangle.samples") {
            c.triangle_samples = parse_int("triangle.samples", v)?;
        }
        if let Some(v) = get("superposition.pairs") {
            c.superposition_pairs = parse_int("superposition.pairs", v)?;
        }
        if let Some(v) = get("lacunary.terms") {
            c.lacunary_terms = parse_int("lacunary.terms", v)?;
        }
        if let Some(v) = get("equivalence.grid") {
            c.equivalence_grid = parse_int("equivalence.grid", v)?;
        }
        if let Some(v) = get("equivalence.harmonics") {
            c.equivalence_harmonics = parse_int("equivalence.harmonics", v)?;
        }
        if let Some(v) = get("lip.constant") {
            c.lip_constant = parse_number(v)?;
        }
        if let Some(v) = get("exploratory") {
            c.exploratory = parse_bool("exploratory", v)?;
        }
        if let Some(v) = get("mutation.halve_v") {
            c.halve_v = parse_bool("mutation.halve_v", v)?;
        }
        let kind = get("omega.kind").unwrap_or("power");
        c.omega = match kind {
            "power" => {
                if get("omega.table").is_some() {
                    return Err(Error::Config("omega.table given for a power modulus".into()));
                }
                let alpha = get("omega.alpha").map(parse_number).transpose()?.unwrap_or(1.0 / 3.0);
                ModulusSpec::power(alpha)?
            }
            "table" => {
                let table = get("omega.table").ok_or_else(|| Error::Config("omega.kind = table needs omega.table".into()))?;
                ModulusSpec::table(parse_table(table)?)?
            }
            other => return Err(Error::Config(format!("omega.kind: unknown kind {other:?}"))),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(&self.omega, self.exploratory)?;
        if self.knots < 2 {
            return Err(Error::Config("knots must be at least 2".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be positive".into()));
        }
        if !(self.equivalence_grid >= 2 && self.equivalence_grid.is_power_of_two()) {
            return Err(Error::Config("equivalence.grid must be a power of two".into()));
        }
        if 4 * self.equivalence_harmonics > self.equivalence_grid {
            return Err(Error::Config("equivalence.harmonics must not exceed a quarter of the grid".into()));
        }
        Ok(())
    }
}

/// Power exponents for the construction lie in `(0, 1/2)`; `1/2` itself is
/// admitted in exploratory mode.
pub fn check_alpha(omega: &ModulusSpec, exploratory: bool) -> Result<()> {
    if let ModulusSpec::Power { alpha } = omega {
        let ok = *alpha > 0.0 && (*alpha < 0.5 || (exploratory && *alpha == 0.5));
        if !ok {
            return Err(Error::Config(if *alpha == 0.5 {
                "α = 1/2 is only accepted in exploratory mode".to_string()
            } else {
                format!("α = {alpha} must lie in (0, 1/2)")
            }));
        }
    }
    Ok(())
}
