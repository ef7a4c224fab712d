//! Truncated Siegel q-expansions and the operators acting on them.
//!
//! Keys are forms Q = (m, r, n) on the box m, n <= B. The Hecke pieces U, Z,
//! Z2 shrink the box, V and V2 grow it, and X2, S, the theta operators and
//! Hasse shifts keep it.

pub mod elliptic;
pub mod expansion;
pub mod expr;
pub mod ops;
pub mod random;

pub use elliptic::{EllipticExpansion, EllipticOp};
pub use expansion::{box_keys, in_box, CoeffSource, SiegelExpansion, Weight};
pub use expr::{
    build_expr, evaluate_expr, evaluate_lazy, formally_equal, parse_expr, reduce_mod_p, simplify_expr, NamedOp,
    OperatorExpr, Word,
};
pub use ops::{
    apply_primitive, apply_primitive_capped, check_equivariance, hasse_shift, theta, theta1, EquivarianceViolation,
    Prim, DEFAULT_PRECISION_CAP,
};
