use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AllocationError {
    #[error("{0} must be >= 1")]
    EmptyDomain(&'static str),
    #[error("zipf exponent must be > 0, got {0}")]
    BadZipfExponent(f64),
    #[error("primary fraction must lie in (0, 1], got {0}")]
    BadPrimaryFraction(f64),
    #[error("record floor {floor} x {users} users x {silos} silos exceeds {records} records")]
    InfeasibleFloor {
        floor: u64,
        users: u64,
        silos: u64,
        records: u64,
    },
    #[error("group size k must be >= 1")]
    BadGroupSize,
    #[error("record {record} references user {user} outside 0..{num_users}")]
    UserOutOfRange {
        record: usize,
        user: u32,
        num_users: u32,
    },
    #[error("record {record} references silo {silo} outside 0..{num_silos}")]
    SiloOutOfRange {
        record: usize,
        silo: u32,
        num_silos: u32,
    },
    #[error("dataset dimension must be >= 1")]
    BadDimension,
    #[error("dataset needs >= 2 classes, got {0}")]
    BadClassCount(usize),
    #[error("malformed csv at line {line}: {reason}")]
    MalformedCsv { line: usize, reason: String },
}
