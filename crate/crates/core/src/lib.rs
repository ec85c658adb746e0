//! Scale calculus of variations for non-differentiable curves.
//!
//! Curves are differentiated at a finite resolution `ε` by the complex scale
//! derivative `□_ε`. Functionals built from `□_ε y` have Euler–Lagrange
//! residuals whose `ε → 0` limits are taken by the bracket filter `[·]_ε`,
//! and isoperimetric problems are checked through a real Lagrange multiplier.
//!
//! ```
//! use scale_calculus::{scale_derivative, Curve};
//!
//! let y = Curve::parse("abs(x)", -1.0, 1.0).unwrap();
//! let d = scale_derivative(&y, 0.0, 0.1).unwrap();
//! assert_eq!((d.re, d.im), (0.0, -1.0));
//! ```

pub mod curve;
mod error;
pub mod expr;
pub mod holder;
pub mod isoperimetric;
pub mod scale_ops;
pub mod variational;

pub use curve::{ComplexCurve, Curve, CurveKind};
pub use error::{Error, Result};
pub use expr::{parse, Env, Expr, Var};
pub use holder::{
    estimate_exponent, is_admissible_variation, min_variation_exponent, HolderEstimate, ProbeConfig,
};
pub use isoperimetric::{
    check_constraint, check_hypotheses, estimate_multiplier, verify_iso_extremal, IsoProblem,
    IsoReport, Verdict,
};
pub use num_complex::Complex64;
pub use scale_ops::{
    conj_scale_derivative, leibniz_defect, scale_derivative, scale_derivative_field, ComplexScalar,
};
pub use variational::{
    bracket_field, bracket_limit, el_residual, functional_value, is_extremal, variation_derivative,
    BracketConfig, EpsilonSchedule, Extremality, LimitEstimate, QuadratureConfig,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scale-derivatives.md")]
    mod scale_derivatives {}
    #[doc = include_str!("../../../book/src/expressions.md")]
    mod expressions {}
    #[doc = include_str!("../../../book/src/holder.md")]
    mod holder {}
    #[doc = include_str!("../../../book/src/functionals.md")]
    mod functionals {}
    #[doc = include_str!("../../../book/src/isoperimetric.md")]
    mod isoperimetric {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
