//! Chart-coordinate expressions and differential forms.

pub mod affine;
pub mod canon;
pub mod expr;
pub mod interval;
pub mod parse;
pub mod pform;

pub use affine::AffineMap;
pub use expr::{Env, Expr, Func, Var};
pub use interval::{certify_nonvanishing, Domain};
pub use parse::parse_expr;
pub use pform::PForm;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown symbol `{name}` at byte {offset}")]
    UnknownSymbol { name: String, offset: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("cannot certify `{expr}` is nonvanishing on the chart box")]
    PossibleZero { expr: String },
}

/// Reject `log` applications whose argument may vanish on `dom`.
pub fn validate_logs(e: &Expr, dom: &Domain) -> Result<(), FormError> {
    for arg in e.log_arguments() {
        if !certify_nonvanishing(arg, dom) {
            return Err(FormError::PossibleZero {
                expr: arg.to_string(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_validation() {
        let dom = Domain::boxed(vec![(0.0, 1.0)]);
        assert!(validate_logs(&parse_expr("log(2 + sin(x1))").unwrap(), &dom).is_ok());
        assert!(matches!(
            validate_logs(&parse_expr("log(x1)").unwrap(), &dom),
            Err(FormError::PossibleZero { .. })
        ));
    }
}
