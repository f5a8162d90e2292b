//! Type-directed η-expansion of pushed, β-normal terms.

use super::rewrite::Engine;
use crate::error::{NormError, TypeError};
use crate::signature::{Ctx, Signature, Ty};
use crate::syntax::{as_proj_pow, as_var_ix, proj_pow, var_ix, Sb, Tm};

impl Engine {
    pub(crate) fn eta(&mut self, sig: &Signature, ctx: &Ctx, t: Tm, ty: &Ty) -> Result<Tm, NormError> {
        match ty {
            Ty::Arrow(dom, cod) => {
                let inner = ctx.extended((**dom).clone());
                let body = match t {
                    Tm::Lam(_, body) => *body,
                    t => {
                        self.fire("abs/eta")?;
                        Tm::app(self.subst(t, Sb::Proj)?, Tm::Var)
                    }
                };
                Ok(Tm::lam((**dom).clone(), self.at(0, |e| e.eta(sig, &inner, body, cod))?))
            }
            Ty::Prod(l, r) => {
                let (a, b) = match t {
                    Tm::Pair(a, b) => (*a, *b),
                    t => {
                        self.fire("pair/eta")?;
                        (Tm::fst(t.clone()), Tm::snd(t))
                    }
                };
                Ok(Tm::pair(
                    self.at(0, |e| e.eta(sig, ctx, a, l))?,
                    self.at(1, |e| e.eta(sig, ctx, b, r))?,
                ))
            }
            Ty::Atom(_) => {
                let (t, found) = self.eta_ne(sig, ctx, t)?;
                if found != *ty {
                    return Err(mismatch(&found, ty));
                }
                Ok(t)
            }
        }
    }

    /// Expand the arguments along a neutral spine and return its type.
    fn eta_ne(&mut self, sig: &Signature, ctx: &Ctx, t: Tm) -> Result<(Tm, Ty), NormError> {
        if let Some(k) = as_var_ix(&t) {
            let ty = ctx
                .lookup(k)
                .cloned()
                .ok_or_else(|| TypeError::ill_typed("variable", &t, format!("index {k} out of range in {ctx}")))?;
            return Ok((t, ty));
        }
        match t {
            Tm::App(f, a) => {
                let (f, fty) = self.at(0, |e| e.eta_ne(sig, ctx, *f))?;
                let Ty::Arrow(dom, cod) = fty else {
                    return Err(TypeError::ill_typed("app", &f, format!("head has type {fty}")).into());
                };
                let a = self.at(1, |e| e.eta(sig, ctx, *a, &dom))?;
                Ok((Tm::app(f, a), (*cod).clone()))
            }
            Tm::Fst(p) => match self.at(0, |e| e.eta_ne(sig, ctx, *p))? {
                (p, Ty::Prod(l, _)) => Ok((Tm::fst(p), (*l).clone())),
                (p, ty) => Err(TypeError::ill_typed("proj1", p, format!("non-product {ty}")).into()),
            },
            Tm::Snd(p) => match self.at(0, |e| e.eta_ne(sig, ctx, *p))? {
                (p, Ty::Prod(_, r)) => Ok((Tm::snd(p), (*r).clone())),
                (p, ty) => Err(TypeError::ill_typed("proj2", p, format!("non-product {ty}")).into()),
            },
            Tm::Op(name) => self.eta_op(sig, ctx, name, Sb::Id),
            Tm::Sub(head, args) => match *head {
                Tm::Op(name) => self.at(1, |e| e.eta_op(sig, ctx, name, *args)),
                head => Err(NormError::Internal(format!("unpushed substitution over {head}"))),
            },
            t => Err(NormError::Internal(format!("not a neutral: {t}"))),
        }
    }

    /// Spell the argument substitution out as exactly one entry per arity
    /// slot, rooted at the empty substitution `p^|ctx|`, and expand each.
    fn eta_op(&mut self, sig: &Signature, ctx: &Ctx, name: crate::signature::Name, args: Sb) -> Result<(Tm, Ty), NormError> {
        let arity = sig.lookup_op(&name)?.clone();
        let entries = self.vectorize(ctx, args, arity.args.len())?;
        let mut sb = proj_pow(ctx.len());
        for (j, (entry, ty)) in entries.into_iter().zip(&arity.args).enumerate() {
            let entry = self.at(j, |e| e.eta(sig, ctx, entry, ty))?;
            sb = Sb::ext(sb, entry);
        }
        Ok((Tm::sub(Tm::Op(name), sb), arity.result))
    }

    fn vectorize(&mut self, ctx: &Ctx, d: Sb, n: usize) -> Result<Vec<Tm>, NormError> {
        match d {
            Sb::Ext(rest, t) if n > 0 => {
                let mut entries = self.vectorize(ctx, *rest, n - 1)?;
                entries.push(*t);
                Ok(entries)
            }
            d => {
                let k = as_proj_pow(&d).ok_or_else(|| NormError::Internal(format!("unpushed substitution {d}")))?;
                if k + n != ctx.len() {
                    return Err(NormError::Internal(format!("{d} cannot have {n} entries over {ctx}")));
                }
                if n > 0 {
                    self.fire("sb/eta")?;
                }
                Ok((0..n).map(|j| var_ix(k + n - 1 - j)).collect())
            }
        }
    }
}

fn mismatch(found: &Ty, expected: &Ty) -> NormError {
    TypeError::Mismatch {
        left: found.to_string(),
        right: expected.to_string(),
    }
    .into()
}
