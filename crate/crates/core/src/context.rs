use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkingPrecision {
    Double,
    /// Tighter series tolerance and a larger term budget; arithmetic stays f64.
    Extended,
}

impl std::str::FromStr for WorkingPrecision {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "double" => Ok(Self::Double),
            "extended" => Ok(Self::Extended),
            other => Err(format!("unknown precision '{other}' (expected double|extended)")),
        }
    }
}

/// Read-only numerical settings threaded through every evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionContext {
    pub tol: f64,
    pub max_terms: usize,
    pub fd_step: f64,
    pub working_precision: WorkingPrecision,
    /// Lattice-proximity threshold on |θ1|.
    pub pole_threshold: f64,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self { tol: 1e-12, max_terms: 64, fd_step: 1e-6, working_precision: WorkingPrecision::Double, pole_threshold: 1e-8 }
    }
}

impl PrecisionContext {
    pub fn new(tol: f64, max_terms: usize, fd_step: f64, wp: WorkingPrecision) -> Result<Self> {
        let ctx = Self { tol, max_terms, fd_step, working_precision: wp, ..Self::default() };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn extended() -> Self {
        Self { working_precision: WorkingPrecision::Extended, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(domain("PrecisionContext", "tol must be positive"));
        }
        if self.max_terms < 8 {
            return Err(domain("PrecisionContext", "max_terms must be at least 8"));
        }
        if !(self.fd_step > 0.0) {
            return Err(domain("PrecisionContext", "fd_step must be positive"));
        }
        Ok(())
    }

    /// Effective series tolerance.
    pub fn series_tol(&self) -> f64 {
        match self.working_precision {
            WorkingPrecision::Double => self.tol,
            WorkingPrecision::Extended => (self.tol * 1e-3).max(1e-18),
        }
    }

    /// Effective term budget.
    pub fn term_budget(&self) -> usize {
        match self.working_precision {
            WorkingPrecision::Double => self.max_terms,
            WorkingPrecision::Extended => 2 * self.max_terms,
        }
    }
}
