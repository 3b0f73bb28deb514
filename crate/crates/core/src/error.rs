use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unrecognized volume file format: {0}")]
    UnknownFormat(String),
    #[error("unsupported datatype: {0}")]
    UnsupportedDatatype(String),
    #[error("unsupported header: {0}")]
    UnsupportedHeader(String),
    #[error("invalid dimensions {0:?}: every extent must be positive")]
    InvalidDims([i64; 3]),
    #[error("payload size mismatch: expected {expected} bytes, found {found}")]
    PayloadSizeMismatch { expected: usize, found: usize },
    #[error("invalid volume: {0}")]
    InvalidVolume(String),
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error("index {index} out of range for extent {extent}")]
    IndexOutOfRange { index: usize, extent: usize },
    #[error("seed ({:.3}, {:.3}, {:.3}) mm lies outside the volume", .0.x, .0.y, .0.z)]
    SeedOutOfBounds(crate::WorldPoint),
    #[error("seed neighbourhood lies entirely outside the volume")]
    EmptySeedNeighbourhood,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("mesh level {0} exceeds the maximum of {max}", max = crate::spheremesh::MAX_LEVEL)]
    MeshLevelTooLarge(usize),
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error("both masks are empty")]
    EmptyMasks,
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("malformed DIMACS input at line {line}: {msg}")]
    Dimacs { line: usize, msg: String },
    #[error("invalid RVOL header: {0}")]
    RvolHeader(#[from] serde_json::Error),
    #[error("invalid manifest: {0}")]
    Manifest(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
