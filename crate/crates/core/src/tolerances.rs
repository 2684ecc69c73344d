//! Every threshold the verification suites compare against, in one place.
//!
//! Values are fixed here rather than at call sites so that the acceptance
//! suite, the CLI and the unit tests all agree on what "holds" means.

/// Relative agreement between the Gamma-moment oracle and tensor quadrature.
pub const BACKEND_AGREEMENT: f64 = 1e-10;

/// Sharp HUP equality for the extremal family, oracle backend.
pub const SHARP_EQUALITY_ORACLE: f64 = 1e-9;

/// Sharp HUP equality for the extremal family, quadrature backend.
pub const SHARP_EQUALITY_QUADRATURE: f64 = 1e-8;

/// Slack for one-sided constant checks (HUP and Hardy ratios).
pub const ONE_SIDED: f64 = 1e-8;

/// Relative residual of the scale non-invariant identity.
pub const IDENTITY_RESIDUAL: f64 = 1e-8;

/// Agreement of the optimal-alpha envelope with the deficit.
pub const ENVELOPE: f64 = 1e-9;

/// Slack (times the field scale) for every stability inequality.
pub const STABILITY_MARGIN: f64 = 1e-7;

/// A stability margin this small (times scale) counts as equality.
pub const EQUALITY_DETECTION: f64 = 1e-7;

/// Lifting gaps when both sides have Gamma closed forms.
pub const LIFT_EXACT_GAP: f64 = 1e-9;

/// Lifting gaps for compactly supported bump fields.
pub const LIFT_BUMP_GAP: f64 = 1e-6;

/// Poincare quotient slack below 1/lambda^2.
pub const POINCARE_QUOTIENT: f64 = 1e-9;

/// Poincare stability margin slack (times scale).
pub const POINCARE_STABILITY: f64 = 1e-8;

/// Relative change allowed under quadrature order doubling.
pub const ORDER_DOUBLING: f64 = 1e-6;

/// Ratios refuse to divide by a mass below this.
pub const MIN_MASS: f64 = 1e-300;
