//! A deliberately naive decision procedure for definitional equality.
//!
//! The equations are oriented and run as a rewrite system in three phases:
//! push every explicit substitution down to variables and operations,
//! contract β-redexes, then η-expand by type. Two terms are equal when the
//! results are syntactically identical.
//!
//! Rule names follow the equational theory (`app/beta`, `sb/cmp/dot`, ...).
//! Four rules have no name there and are reported as:
//!
//! * `sb/sb`: `t[ε][δ] → t[ε ∘ δ]`
//! * `sb/tm/idn`: `t[id] → t` for `t` other than `v`
//! * `sb/eta`: `δ → (p ∘ δ, v[δ])`, used to spell out operation arguments
//! * the empty substitution into `()` is always `p^|Γ|` (implicit in `sb/eta`)

mod eta;
pub mod perturb;
mod rewrite;

use serde::{Deserialize, Serialize};

pub use perturb::{perturb, perturb_with, PerturbRule};
pub use rewrite::{Step, FUEL};

use crate::error::{NormError, TypeError};
use crate::signature::{Ctx, Signature, Ty};
use crate::syntax::{infer_tm, Tm};
use rewrite::Engine;

/// The rules fired by a normalization run and its result.
///
/// Positions in `steps` are relative to the term each phase started from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteTrace {
    pub steps: Vec<Step>,
    #[serde(rename = "final")]
    pub result: Tm,
}

/// Push explicit substitutions to the leaves. The result has `Sub` nodes
/// only directly above `v` (as `v[p^k]`) and above operations.
pub fn push_subst(t: &Tm) -> Result<Tm, NormError> {
    Engine::new(false).push_tm(t)
}

pub fn push_subst_traced(t: &Tm) -> Result<RewriteTrace, NormError> {
    let mut e = Engine::new(true);
    let result = e.push_tm(t)?;
    Ok(RewriteTrace {
        steps: e.into_steps(),
        result,
    })
}

/// Contract β-redexes innermost first, pushing the substitutions they
/// create. Expects a pushed term.
pub fn beta_normalize(t: &Tm) -> Result<Tm, NormError> {
    Engine::new(false).beta_tm(t)
}

/// η-expand a pushed, β-normal term of type `ty` into η-long form.
pub fn eta_expand(sig: &Signature, ctx: &Ctx, t: &Tm, ty: &Ty) -> Result<Tm, NormError> {
    Engine::new(false).eta(sig, ctx, t.clone(), ty)
}

/// `eta_expand ∘ beta_normalize ∘ push_subst` at the inferred type.
pub fn naive_nf(sig: &Signature, ctx: &Ctx, t: &Tm) -> Result<Tm, NormError> {
    let ty = infer_tm(sig, ctx, t)?;
    run(&mut Engine::new(false), sig, ctx, t, &ty)
}

pub fn naive_nf_traced(sig: &Signature, ctx: &Ctx, t: &Tm) -> Result<RewriteTrace, NormError> {
    let ty = infer_tm(sig, ctx, t)?;
    let mut e = Engine::new(true);
    let result = run(&mut e, sig, ctx, t, &ty)?;
    Ok(RewriteTrace {
        steps: e.into_steps(),
        result,
    })
}

fn run(e: &mut Engine, sig: &Signature, ctx: &Ctx, t: &Tm, ty: &Ty) -> Result<Tm, NormError> {
    let pushed = e.push_tm(t)?;
    e.reset_path();
    let reduced = e.beta_tm(&pushed)?;
    e.reset_path();
    e.eta(sig, ctx, reduced, ty)
}

/// Decide `t1 ≡ t2` by comparing naive normal forms. Terms of different
/// types are reported as a mismatch.
pub fn oracle_eq(sig: &Signature, ctx: &Ctx, t1: &Tm, t2: &Tm) -> Result<bool, NormError> {
    let ty1 = infer_tm(sig, ctx, t1)?;
    let ty2 = infer_tm(sig, ctx, t2)?;
    if ty1 != ty2 {
        return Err(TypeError::Mismatch {
            left: ty1.to_string(),
            right: ty2.to_string(),
        }
        .into());
    }
    let n1 = run(&mut Engine::new(false), sig, ctx, t1, &ty1)?;
    let n2 = run(&mut Engine::new(false), sig, ctx, t2, &ty2)?;
    Ok(n1 == n2)
}
