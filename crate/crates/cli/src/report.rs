//! Machine-readable command reports.

use std::collections::BTreeMap;

use opkernel_core::Error;
use serde::Serialize;

/// One named check; `pass` is `residual <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub witness: Option<f64>,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            pass: residual <= tolerance,
            residual,
            tolerance,
            witness: None,
        }
    }

    /// A yes/no outcome as residual 0 or 1 against tolerance 0.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }

    /// Spectral test: residual `max(0, -λ_min)` against the threshold.
    pub fn spectral(name: impl Into<String>, min_eigenvalue: f64, threshold: f64) -> Self {
        Self::new(name, (-min_eigenvalue).max(0.0), threshold).with_witness(min_eigenvalue)
    }

    pub fn with_witness(mut self, witness: f64) -> Self {
        self.witness = Some(witness);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub checks: Vec<Check>,
    pub dims: BTreeMap<String, usize>,
    pub timing: Timing,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<serde_json::Value>,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            command,
            checks: Vec::new(),
            dims: BTreeMap::new(),
            timing: Timing { seconds: 0.0 },
            error: None,
            result: None,
        }
    }

    pub fn check(&mut self, c: Check) -> &mut Self {
        self.checks.push(c);
        self
    }

    pub fn dim(&mut self, name: &str, value: usize) -> &mut Self {
        self.dims.insert(name.to_string(), value);
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// Records a failed mathematical check raised as an error.
    pub fn fail_with(&mut self, e: &Error) {
        let mut c = Check::flag(check_name(e), false);
        if let Some(w) = error_witness(e) {
            c = c.with_witness(w);
        }
        self.checks.push(c);
        self.error = Some(e.to_string());
    }
}

fn check_name(e: &Error) -> &'static str {
    match e {
        Error::NotPsd { .. } => "psd",
        Error::NotPositive { .. } => "positive",
        Error::KernelMismatch(_) => "kernel",
        Error::NotPd { .. } => "pd",
        Error::NotCp { .. } => "cp",
        Error::NotCpd { .. } => "cpd",
        Error::NotPhiMap(_) => "phi_map",
        Error::NotCondPd { .. } => "cond_pd",
        Error::NormalizationNotPsd { .. } => "normalization",
        Error::NotCpAtTime { .. } => "cp_at_time",
        Error::NotCpdAtTime { .. } => "cpd_at_time",
        Error::NotSPositiveKernel { .. } => "s_positive_kernel",
        Error::NotSPositive(_) => "s_positive",
        _ => "construction",
    }
}

fn error_witness(e: &Error) -> Option<f64> {
    match *e {
        Error::NotPsd { eigenvalue }
        | Error::NotPositive { eigenvalue, .. }
        | Error::NotPd { eigenvalue }
        | Error::NotCp { eigenvalue }
        | Error::NotCpd { eigenvalue }
        | Error::NotCondPd { eigenvalue }
        | Error::NormalizationNotPsd { eigenvalue }
        | Error::NotSPositiveKernel { eigenvalue, .. } => Some(eigenvalue),
        Error::KernelMismatch(r) | Error::NotPhiMap(r) => Some(r),
        Error::NotCpAtTime { time } | Error::NotCpdAtTime { time } => Some(time),
        _ => None,
    }
}
