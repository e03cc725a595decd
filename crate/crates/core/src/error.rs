use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong in the toolkit.
///
/// Variant names are part of the command-line contract: the CLI prints them
/// verbatim, so renaming one is a breaking change.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The profile is malformed (non-finite coefficient, negative mean).
    InvalidProfile { reason: &'static str },
    /// Some sampled radius is not strictly positive.
    NonPositiveRadius { t: f64, radius: f64 },
    /// A parameter is outside its admissible set.
    InvalidArgument { reason: &'static str },
    /// The flight time `tau = t1 - t0` is outside the generating strip.
    OutOfStrip { tau: f64, lo: f64, hi: f64 },
    /// `c^2 tau^2 >= R0^2 R1^2`, so `h_c` is undefined.
    DiscriminantNonPositive { tau: f64, c: f64 },
    /// `-d12 <= 0` somewhere on a scanned strip.
    TwistViolation { t0: f64, tau: f64, neg_d12: f64 },
    /// The requested momentum cannot be reached inside the strip.
    NoRootInStrip { t: f64, k: f64, k_lo: f64, k_hi: f64 },
    /// The extension could not be certified twist after all retries.
    ExtensionFailed { lambda: f64, worst_d12: f64 },
    /// No wall crossing found before the search horizon.
    NoImpact { time: f64, horizon: f64 },
    /// The particle meets the wall tangentially.
    GrazingImpact { time: f64, relative_speed: f64 },
    /// Newton iteration did not reach the tolerance.
    NoConvergence { iterations: usize, residual: f64 },
    /// A damped Newton step kept leaving the strip.
    StripEscape { iteration: usize },
    /// A converged configuration violates `|t_{n+1} - t_n - p/q| <= 1`.
    BoundedDeviation { index: usize, deviation: f64 },
    /// `omega` is outside `(1, sigma - 1)`.
    OutOfRange { omega: f64, lo: f64, hi: f64 },
    /// The profile is not in the class required by the requested mode.
    NotInClass { sigma: f64 },
    /// `B^2 - 4C` is not positive in the graph inequality.
    DegenerateDiscriminant { b: f64, c: f64 },
    /// A graph sample is not ordered or leaves its rotation strip.
    InvalidGraph { index: usize },
}

impl Error {
    /// The variant name, as printed by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidProfile { .. } => "InvalidProfile",
            Error::NonPositiveRadius { .. } => "NonPositiveRadius",
            Error::InvalidArgument { .. } => "InvalidArgument",
            Error::OutOfStrip { .. } => "OutOfStrip",
            Error::DiscriminantNonPositive { .. } => "DiscriminantNonPositive",
            Error::TwistViolation { .. } => "TwistViolation",
            Error::NoRootInStrip { .. } => "NoRootInStrip",
            Error::ExtensionFailed { .. } => "ExtensionFailed",
            Error::NoImpact { .. } => "NoImpact",
            Error::GrazingImpact { .. } => "GrazingImpact",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::StripEscape { .. } => "StripEscape",
            Error::BoundedDeviation { .. } => "BoundedDeviation",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::NotInClass { .. } => "NotInClass",
            Error::DegenerateDiscriminant { .. } => "DegenerateDiscriminant",
            Error::InvalidGraph { .. } => "InvalidGraph",
        }
    }

    /// True when the error reports a broken structural invariant (twist,
    /// extension, bounded deviation, graph discriminant) rather than bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::TwistViolation { .. }
                | Error::ExtensionFailed { .. }
                | Error::BoundedDeviation { .. }
                | Error::DegenerateDiscriminant { .. }
                | Error::NoConvergence { .. }
                | Error::StripEscape { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.name())?;
        match *self {
            Error::InvalidProfile { reason } => write!(f, "{reason}"),
            Error::NonPositiveRadius { t, radius } => write!(f, "R({t}) = {radius}"),
            Error::InvalidArgument { reason } => write!(f, "{reason}"),
            Error::OutOfStrip { tau, lo, hi } => write!(f, "tau = {tau} not in ({lo}, {hi})"),
            Error::DiscriminantNonPositive { tau, c } => {
                write!(f, "R0^2 R1^2 - c^2 tau^2 <= 0 at tau = {tau}, c = {c}")
            }
            Error::TwistViolation { t0, tau, neg_d12 } => {
                write!(f, "-d12 = {neg_d12} at t0 = {t0}, tau = {tau}")
            }
            Error::NoRootInStrip { t, k, k_lo, k_hi } => {
                write!(f, "K = {k} at t = {t}; admissible K in [{k_lo}, {k_hi}]")
            }
            Error::ExtensionFailed { lambda, worst_d12 } => {
                write!(f, "d12 = {worst_d12} with lambda = {lambda}")
            }
            Error::NoImpact { time, horizon } => write!(f, "no wall crossing in [{time}, {horizon}]"),
            Error::GrazingImpact { time, relative_speed } => {
                write!(f, "relative radial speed {relative_speed} at t = {time}")
            }
            Error::NoConvergence { iterations, residual } => {
                write!(f, "residual {residual} after {iterations} iterations")
            }
            Error::StripEscape { iteration } => write!(f, "step left the strip at iteration {iteration}"),
            Error::BoundedDeviation { index, deviation } => {
                write!(f, "|t_(n+1) - t_n - p/q| = {deviation} at n = {index}")
            }
            Error::OutOfRange { omega, lo, hi } => write!(f, "omega = {omega} not in ({lo}, {hi})"),
            Error::NotInClass { sigma } => write!(f, "sigma = {sigma} <= 2"),
            Error::DegenerateDiscriminant { b, c } => write!(f, "B^2 - 4C <= 0 with B = {b}, C = {c}"),
            Error::InvalidGraph { index } => write!(f, "graph sample {index} breaks ordering"),
        }
    }
}

impl core::error::Error for Error {}
