use std::fmt;

/// Failure modes of a run, split by exit code: configuration and I/O
/// problems exit 1, numerical problems (non-convergence, lost finiteness)
/// exit 2.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numerical(String),
}

impl Failure {
    pub fn validation(msg: impl Into<String>) -> Self {
        Failure::Validation(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Failure::Numerical(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(msg) | Failure::Numerical(msg) => write!(f, "{msg}"),
        }
    }
}
