//! Tolerances, caps and run-wide settings.

use std::path::PathBuf;

use opkernel_core::cpd::DEFAULT_MAX_GENERATORS;
use opkernel_core::kernels::DEFAULT_MAX_POINTS;
use opkernel_core::semigroups::{default_time_grid, DEFAULT_FOCK_LEVEL, DEFAULT_MAX_SYM_BASIS};
use opkernel_core::{Error, Result, Tolerance};

pub const TOL_ENV: &str = "OPKERNEL_TOL";

/// Seed of the selftest PRNG (Xoshiro256++ seeded through SplitMix64).
pub const DEFAULT_SEED: u64 = 0x5eed_0bad_cafe_f00d;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub tol: Tolerance,
    /// Largest accepted `|S|`.
    pub max_points: usize,
    /// Largest Gram matrix a GNS construction may factor.
    pub max_generators: usize,
    pub fock_level: usize,
    /// Largest occupation-number basis of the truncated Fock space.
    pub max_sym_basis: usize,
    pub time_grid: Vec<f64>,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub parallel: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            max_points: DEFAULT_MAX_POINTS,
            max_generators: DEFAULT_MAX_GENERATORS,
            fock_level: DEFAULT_FOCK_LEVEL,
            max_sym_basis: DEFAULT_MAX_SYM_BASIS,
            time_grid: default_time_grid(),
            seed: DEFAULT_SEED,
            output: None,
            parallel: false,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        let caps = [
            ("max-points", self.max_points),
            ("max-generators", self.max_generators),
            ("fock-n", self.fock_level),
            ("max-sym-basis", self.max_sym_basis),
        ];
        if let Some((name, _)) = caps.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Validation(format!("{name} must be positive")));
        }
        if !(self.tol.rel_eps > 0.0) || !(self.tol.abs_floor > 0.0) {
            return Err(Error::Validation("tolerances must be positive".into()));
        }
        if self.time_grid.is_empty() || self.time_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::Validation("times must be finite and nonnegative".into()));
        }
        Ok(())
    }

    /// Bound on derived identities with inputs of size `scale`.
    pub fn limit(&self, scale: f64) -> f64 {
        self.tol.rel_eps * (1.0 + scale)
    }
}

/// Parses `rel` or `rel,abs`.
pub fn parse_tolerance(text: &str) -> Result<Tolerance> {
    let bad = || Error::Validation(format!("cannot parse tolerance {text:?}; expected REL or REL,ABS"));
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    let tol = match parts.as_slice() {
        [rel] => Tolerance::new(num(rel)?, Tolerance::default().abs_floor)?,
        [rel, abs] => Tolerance::new(num(rel)?, num(abs)?)?,
        _ => return Err(bad()),
    };
    if tol.abs_floor <= 0.0 {
        return Err(Error::Validation("abs_floor must be positive".into()));
    }
    Ok(tol)
}

/// Tolerance from the environment, if set.
pub fn env_tolerance() -> Result<Option<Tolerance>> {
    match std::env::var(TOL_ENV) {
        Ok(v) => parse_tolerance(&v).map(Some),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::Validation(format!("{TOL_ENV}: {e}"))),
    }
}
