use num_complex::Complex64;
use num_rational::Rational64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("spec needs at least one source eigenvalue")]
    Empty,
    #[error("got {eigenvalues} eigenvalues but {fractions} filling fractions")]
    LengthMismatch { eigenvalues: usize, fractions: usize },
    #[error("eigenvalue {0} is not finite")]
    NonFinite(f64),
    #[error("duplicate eigenvalues: {0} appears more than once")]
    DuplicateEigenvalue(f64),
    #[error("filling fraction {fraction} at position {index} is not positive")]
    NonPositiveFraction { index: usize, fraction: Rational64 },
    #[error("fractions sum to {0}, not 1")]
    FractionSum(Rational64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("polynomial has no roots to find")]
    DegeneratePolynomial,
    #[error("eigenvalue iteration failed to converge")]
    EigenFailure,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("critical curve: branch points {separation:.3e} apart (threshold {threshold:.3e})")]
    Degenerate { separation: f64, threshold: f64 },
    #[error("|x''| = {value:.3e} at branch point {at}: near-critical edge")]
    NearCriticalEdge { at: f64, value: f64 },
    #[error("continuation path passes too close to a branch point near {at}")]
    PathNearBranchPoint { at: Complex64 },
    #[error("Newton tracking diverged near {at}")]
    NewtonDivergence { at: Complex64 },
    #[error("conjugate branch points at {at} have real part outside every cut")]
    PairOutsideCuts { at: Complex64 },
    #[error("crossing {m} of cut {cut} does not fall inside the cut")]
    NoCrossing { cut: usize, m: usize },
    #[error("evaluation point {0} coincides with a pole of the curve")]
    Pole(Complex64),
    #[error("model RH solution requires all branch points real; found {real} of {total}")]
    ComplexBranchPoints { real: usize, total: usize },
    #[error("evaluation point {0} lies on a cut; ask for a boundary value instead")]
    OnCut(f64),
    #[error("points_per_cut must be at least 2, got {0}")]
    Resolution(usize),
    #[error("no matching condition fixes the λ constant of sheet {0}")]
    Unanchored(usize),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolutionError {
    #[error("time {0} outside the open interval (0, 1)")]
    TimeOutOfRange(f64),
    #[error("N = {n} is not a multiple of fraction denominator {denominator}")]
    NotCommonMultiple { n: u64, denominator: i64 },
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
    #[error("time grid must be strictly increasing")]
    Grid,
    #[error("scan too coarse: more than one transition in ({lo}, {hi})")]
    AmbiguousBracket { lo: f64, hi: f64 },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    #[error("N = {n} is not a multiple of fraction denominator {denominator}")]
    NotCommonMultiple { n: usize, denominator: i64 },
    #[error("need at least {needed} draws, got {got}")]
    TooFewDraws { needed: usize, got: usize },
    #[error("need at least {needed} spacings, got {got}")]
    TooFewSpacings { needed: usize, got: usize },
    #[error("empty input")]
    Empty,
    #[error("input is not sorted ascending")]
    NotSorted,
    #[error("histogram range is empty: [{lo}, {hi}] with {bins} bins")]
    EmptyRange { lo: f64, hi: f64, bins: usize },
    #[error("window [{lo}, {hi}] is not inside a single cut away from its edges")]
    Window { lo: f64, hi: f64 },
    #[error("edge index {0} out of range")]
    EdgeIndex(usize),
    #[error("matrix size {0} outside 1..=2048")]
    Size(usize),
    #[error("reference data: {0}")]
    Reference(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AiryError {
    #[error("|z| = {0} exceeds the overflow guard")]
    Overflow(f64),
}
