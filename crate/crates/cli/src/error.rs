use circlepat::complex::ComplexError;
use circlepat::covering::CoveringError;
use circlepat::geometry::GeometryError;
use circlepat::io::ParseError;
use circlepat::kat::KatError;
use circlepat::solver::SolveError;
use serde::Serialize;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const DOMAIN: i32 = 1;
    pub const IO: i32 = 2;
    pub const CAP: i32 = 3;
    pub const BUDGET: i32 = 4;
}

#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

impl CliError {
    pub fn new(kind: &'static str, exit_code: i32, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
            exit_code,
            details: None,
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Self::new("io", exit::IO, format!("{}: {err}", path.display()))
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new("usage", exit::IO, message)
    }

    pub fn with_details(mut self, details: impl Serialize) -> Self {
        self.details = serde_json::to_value(details).ok();
        self
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        let kind = match e {
            ParseError::Syntax { .. } => "syntax",
            _ => "invalid-input",
        };
        Self::new(kind, exit::DOMAIN, e.to_string())
    }
}

impl From<ComplexError> for CliError {
    fn from(e: ComplexError) -> Self {
        Self::new("complex", exit::DOMAIN, e.to_string())
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        let err = Self::new("geometry", exit::DOMAIN, e.to_string());
        match e {
            GeometryError::Degenerate { triangle, lengths } => err.with_details(serde_json::json!({
                "triangle": triangle,
                "lengths": lengths,
            })),
            _ => err,
        }
    }
}

impl From<CoveringError> for CliError {
    fn from(e: CoveringError) -> Self {
        let err = Self::new("covering", exit::DOMAIN, e.to_string());
        match &e {
            CoveringError::NoSimplicialCover { attempts, .. } => err
                .with_details(serde_json::json!({ "rejected_primes": attempts }))
                .hint("supply an explicit voltage file with --voltages"),
            _ => err,
        }
    }
}

impl From<KatError> for CliError {
    fn from(e: KatError) -> Self {
        match e {
            KatError::CapExceeded { required, cap } => Self::new("cap-exceeded", exit::CAP, e.to_string())
                .with_details(serde_json::json!({ "required": required, "cap": cap })),
            _ => Self::new("kat", exit::DOMAIN, e.to_string()),
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match &e {
            SolveError::BudgetExhausted { divergence, .. } | SolveError::StepUnderflow { divergence, .. } => {
                Self::new("budget-exhausted", exit::BUDGET, e.to_string()).with_details(divergence)
            }
            SolveError::Kat(k) => k.clone().into(),
            SolveError::Geometry(g) => g.clone().into(),
            _ => Self::new("solver", exit::DOMAIN, e.to_string()),
        }
    }
}

impl CliError {
    fn hint(mut self, hint: &str) -> Self {
        self.message = format!("{} ({hint})", self.message);
        self
    }
}
