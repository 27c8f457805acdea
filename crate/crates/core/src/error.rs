use thiserror::Error;

/// Failure modes shared by the geometric and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("points are collinear (height {height:.3e} below threshold {threshold:.3e})")]
    Collinear { height: f64, threshold: f64 },

    #[error("zero-length edge {tet}{i}{tet}{j}", i = .edge.0 + 1, j = .edge.1 + 1)]
    ZeroLengthEdge { tet: char, edge: (usize, usize) },

    #[error("tetrahedra are not orthologic: max residual {max:.3e} exceeds {threshold:.3e}")]
    NotOrthologic {
        residuals: [f64; 6],
        max: f64,
        threshold: f64,
    },

    #[error("tetrahedra do not orthosect: max residual {max:.3e} exceeds {threshold:.3e}")]
    NotOrthosecting {
        residuals: [f64; 12],
        max: f64,
        threshold: f64,
    },

    #[error("perpendiculars are all parallel; partner tetrahedron is flat")]
    FlatPartner,

    #[error("source lies on the circumcircle of its face (offset {offset:.3e}); pedal triangle degenerates to a Simson line")]
    SimsonDegenerate { offset: f64 },

    #[error("source is {distance:.3e} away from the face plane")]
    OffPlane { distance: f64 },

    #[error("reconstruction postcondition failed: max gap {max_gap:.3e}, max orthogonality residual {max_orthogonality:.3e}")]
    Postcondition {
        gaps: [f64; 6],
        orthogonality: [f64; 6],
        max_gap: f64,
        max_orthogonality: f64,
    },

    #[error("chain is not spherical: max carrier residual {residual:.3e}")]
    NotSpherical { residual: f64 },

    #[error("point is not on the self-conjugate curve: residual {residual:.3e}")]
    OffCurve { residual: f64 },

    #[error("no real sphericity parameter at this point")]
    NoRealParameter,

    #[error("root index {index} out of range ({available} available)")]
    RootIndex { index: usize, available: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
