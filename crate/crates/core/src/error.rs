use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("symmetry rank must be at least 1")]
    ZeroRank,
    #[error("a periodic graph needs at least one vertex orbit")]
    NoVertexOrbits,
    #[error("edge orbit {edge}: vertex orbit {orbit} is out of range (n = {orbits})")]
    OrbitOutOfRange { edge: usize, orbit: usize, orbits: usize },
    #[error("edge orbit {edge}: translation has {found} entries, expected {expected}")]
    TranslationLength { edge: usize, found: usize, expected: usize },
    #[error("variable count mismatch: {0} vs {1}")]
    VariableMismatch(usize, usize),
    #[error("point has {found} coordinates, expected {expected}")]
    PointLength { found: usize, expected: usize },
    #[error("coordinate {0} is not on the unit circle")]
    NotUnitModulus(usize),
    #[error("lattice basis must be a {0}x{0} integer matrix")]
    BasisShape(usize),
    #[error("lattice basis is singular")]
    SingularBasis,
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
    #[error("{what} is {value}, above the limit {limit}")]
    GuardExceeded { what: &'static str, value: u128, limit: u128 },
    #[error("Δ ≡ 0: graph contains a closed component (vanishing criterion for the Laplacian polynomial)")]
    DeltaZero,
    #[error("the zero polynomial has no Mahler measure")]
    ZeroPolynomial,
    #[error("expected a polynomial in one variable, found {0}")]
    NotUnivariate(usize),
    #[error("vertex {vertex} is out of range (vertex count {count})")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("{0}")]
    Numerical(String),
}
