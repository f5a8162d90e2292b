//! Normalization by evaluation for free λ-theories over many-typed
//! signatures.
//!
//! Terms are those of the simply typed λ-calculus with products and
//! uninterpreted operations, presented with explicit substitutions and a
//! single variable. [`nbe::nf`] computes η-long β-normal forms by evaluating
//! into a glued model. [`oracle::oracle_eq`] decides the same equality by
//! rewriting and serves as a reference. [`testgen`] and [`suite`] compare
//! the two on random input.
//!
//! ```
//! use glue_core::nbe::nf;
//! use glue_core::normal::readback_nf;
//! use glue_core::signature::{parse_ctx, parse_signature};
//! use glue_core::syntax::parse_tm;
//!
//! let sig = parse_signature("(signature (sorts a) (ops))").unwrap();
//! let ctx = parse_ctx("((arr a a))").unwrap();
//! let n = nf(&sig, &ctx, &parse_tm("v").unwrap()).unwrap();
//! assert_eq!(readback_nf(&n).to_string(), "(lam a (app (ix 1) v))");
//! ```

pub mod error;
pub mod nbe;
pub mod normal;
pub mod oracle;
pub mod renaming;
pub mod sexp;
pub mod signature;
pub mod suite;
pub mod syntax;
pub mod testgen;

// The book's and README's snippets run as doctests through these.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/terms.md")]
    mod terms {}
    #[doc = include_str!("../../../book/src/renamings.md")]
    mod renamings {}
    #[doc = include_str!("../../../book/src/normal-forms.md")]
    mod normal_forms {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/testing.md")]
    mod testing {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
