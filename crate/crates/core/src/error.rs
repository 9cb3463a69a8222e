use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("wire {wire} out of range for a {n_wires}-wire circuit")]
    WireOutOfRange { wire: usize, n_wires: usize },

    #[error("gate acts twice on wire {0}")]
    WireCollision(usize),

    #[error("composite gate `{0}` must be lowered to native gates first")]
    NotNative(String),

    #[error("{n_wires} wires exceeds the dense-matrix bound of {max}")]
    TooManyWires { n_wires: usize, max: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("qubits {0} and {1} are not connected on this device")]
    NotConnected(usize, usize),

    #[error("unknown qubit {0}")]
    UnknownQubit(usize),

    #[error("device: {0}")]
    Device(String),

    #[error("qubit {qubit}: T2 = {t2_us} us exceeds 2*T1 = {} us", 2.0 * t1_us)]
    Unphysical { qubit: usize, t1_us: f64, t2_us: f64 },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("circuit is not a two-qubit Clifford")]
    NotClifford,

    #[error("{stage}: output is not equivalent to its input")]
    Unverified { stage: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
