//! Normalization by evaluation.
//!
//! A value of type `τ` in world `Γ` is:
//!
//! * at an atom, an η-long normal form;
//! * at a product, a pair of values;
//! * at an arrow, a glued value: a Kripke function usable at every world
//!   reached from `Γ` by a renaming, together with the term it denotes.
//!
//! `reflect` embeds neutrals into values and `reify` extracts normal forms.
//! Normalizing `t` in `Γ` evaluates it in the environment that reflects the
//! identity substitution and reifies the result.

use std::sync::Arc;

use crate::error::{NormError, TypeError};
use crate::normal::{id_ne_sub, readback_ne, readback_nf, readback_nfsb, Ne, NeSb, Nf, NfSb};
use crate::renaming::{ren_comp, ren_id, ren_weaken, rename_ne, rename_nf, Ren};
use crate::signature::{Ctx, Name, Signature, Ty};
use crate::syntax::{infer_sb, infer_tm, Sb, Tm};

#[derive(Clone, Debug, PartialEq)]
pub enum Val {
    Atom(Nf),
    Pair(Box<Val>, Box<Val>),
    Arrow(Glued),
}

/// A function value. `pending` is the renaming from the world the value
/// currently lives in to the world its closure was built in; it is
/// composed into every application instead of being pushed through the
/// closure eagerly.
#[derive(Clone, Debug, PartialEq)]
pub struct Glued {
    closure: Arc<Closure>,
    pending: Option<Ren>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Closure {
    /// The value of `lam` in `env`.
    Lam { src: Arc<Tm>, body: Arc<Code>, env: Env },
    /// The reflection of a neutral of type `dom → cod` in `world`.
    Neutral { ne: Ne, dom: Ty, cod: Ty, world: Ctx },
}

/// Values for each variable of `tys`, all living in `world`.
#[derive(Clone, Debug, PartialEq)]
pub struct Env {
    world: Ctx,
    tys: Ctx,
    vals: Vec<Val>,
}

/// Terms with the type annotations evaluation needs.
#[derive(Clone, Debug, PartialEq)]
pub enum Code {
    Var,
    Op(Name),
    Sub(Box<Code>, Box<CodeSb>),
    Lam(Ty, Arc<Tm>, Arc<Code>),
    App(Box<Code>, Box<Code>),
    Pair(Box<Code>, Box<Code>),
    Fst(Box<Code>),
    Snd(Box<Code>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum CodeSb {
    Id,
    Proj,
    Ext(Box<CodeSb>, Box<Code>, Ty),
    Comp(Box<CodeSb>, Box<CodeSb>),
}

impl Env {
    pub fn new(world: Ctx, tys: Ctx, vals: Vec<Val>) -> Env {
        assert_eq!(tys.len(), vals.len(), "one value per variable");
        Env { world, tys, vals }
    }

    pub fn world(&self) -> &Ctx {
        &self.world
    }

    pub fn tys(&self) -> &Ctx {
        &self.tys
    }

    pub fn vals(&self) -> &[Val] {
        &self.vals
    }

    fn push(&mut self, ty: Ty, v: Val) {
        self.tys.push(ty);
        self.vals.push(v);
    }
}

impl Glued {
    /// The world the value lives in.
    pub fn world(&self) -> &Ctx {
        match (&self.pending, &*self.closure) {
            (Some(r), _) => r.dom(),
            (None, Closure::Lam { env, .. }) => &env.world,
            (None, Closure::Neutral { world, .. }) => world,
        }
    }

    pub fn closure(&self) -> &Closure {
        &self.closure
    }

    /// The syntactic half of the glued pair: a term of the arrow type in
    /// [`Glued::world`] denoting this function. A closure yields its
    /// λ-term under the reified environment; a reflected neutral yields the
    /// neutral itself.
    pub fn syn(&self, sig: &Signature) -> Result<Tm, NormError> {
        match &*self.closure {
            Closure::Lam { src, env, .. } => {
                let env = match &self.pending {
                    Some(r) => rename_env(r, env)?,
                    None => env.clone(),
                };
                Ok(Tm::sub((**src).clone(), readback_nfsb(&reify_env(sig, &env)?)))
            }
            Closure::Neutral { ne, .. } => Ok(readback_ne(&match &self.pending {
                Some(r) => rename_ne(r, ne),
                None => ne.clone(),
            })),
        }
    }
}

/// `↑τ n`: η-expand a neutral into a value.
pub fn reflect(world: &Ctx, ty: &Ty, n: Ne) -> Val {
    match ty {
        Ty::Atom(_) => Val::Atom(Nf::Shift(n)),
        Ty::Prod(l, r) => Val::Pair(
            Box::new(reflect(world, l, n.clone().fst())),
            Box::new(reflect(world, r, n.snd())),
        ),
        Ty::Arrow(dom, cod) => Val::Arrow(Glued {
            closure: Arc::new(Closure::Neutral {
                ne: n,
                dom: (**dom).clone(),
                cod: (**cod).clone(),
                world: world.clone(),
            }),
            pending: None,
        }),
    }
}

/// `↓τ v`: read a value back as an η-long normal form.
pub fn reify(sig: &Signature, world: &Ctx, ty: &Ty, v: &Val) -> Result<Nf, NormError> {
    match (ty, v) {
        (Ty::Atom(_), Val::Atom(n)) => Ok(n.clone()),
        (Ty::Prod(l, r), Val::Pair(a, b)) => Ok(Nf::pair(reify(sig, world, l, a)?, reify(sig, world, r, b)?)),
        (Ty::Arrow(dom, cod), Val::Arrow(g)) => {
            let inner = world.extended((**dom).clone());
            let fresh = reflect(&inner, dom, Ne::Var(0));
            let out = apply(sig, g, &ren_weaken(world, dom), fresh)?;
            Ok(Nf::lam((**dom).clone(), reify(sig, &inner, cod, &out)?))
        }
        (ty, v) => Err(NormError::Internal(format!("value {v:?} does not inhabit {ty}"))),
    }
}

/// `readback ∘ reify`.
pub fn quote(sig: &Signature, world: &Ctx, ty: &Ty, v: &Val) -> Result<Tm, NormError> {
    Ok(readback_nf(&reify(sig, world, ty, v)?))
}

/// Apply a function value at the world `r.dom()`, reached from the value's
/// world by `r`.
pub fn apply(sig: &Signature, g: &Glued, r: &Ren, arg: Val) -> Result<Val, NormError> {
    let total = match &g.pending {
        Some(p) => ren_comp(p, r)?,
        None => r.clone(),
    };
    match &*g.closure {
        Closure::Lam { src, body, env } => {
            let Tm::Lam(dom, _) = &**src else {
                return Err(NormError::Internal(format!("closure over {src}")));
            };
            let mut env = if total.is_identity() {
                env.clone()
            } else {
                rename_env(&total, env)?
            };
            env.push(dom.clone(), arg);
            eval(sig, &env, body)
        }
        Closure::Neutral { ne, dom, cod, .. } => {
            let head = if total.is_identity() {
                ne.clone()
            } else {
                rename_ne(&total, ne)
            };
            let arg = reify(sig, total.dom(), dom, &arg)?;
            Ok(reflect(total.dom(), cod, head.app(arg)))
        }
    }
}

/// Move a value from world `r.cod()` to world `r.dom()`.
pub fn rename_val(r: &Ren, v: &Val) -> Result<Val, NormError> {
    Ok(match v {
        Val::Atom(n) => Val::Atom(rename_nf(r, n)),
        Val::Pair(a, b) => Val::Pair(Box::new(rename_val(r, a)?), Box::new(rename_val(r, b)?)),
        Val::Arrow(g) => Val::Arrow(Glued {
            closure: g.closure.clone(),
            pending: Some(match &g.pending {
                Some(p) => ren_comp(p, r)?,
                None => r.clone(),
            }),
        }),
    })
}

pub fn rename_env(r: &Ren, env: &Env) -> Result<Env, NormError> {
    Ok(Env {
        world: r.dom().clone(),
        tys: env.tys.clone(),
        vals: env.vals.iter().map(|v| rename_val(r, v)).collect::<Result<_, _>>()?,
    })
}

/// Reflect each entry of a neutral substitution at the matching type of `tys`.
pub fn reflect_env(s: &NeSb, tys: &Ctx) -> Env {
    Env {
        world: s.dom.clone(),
        tys: tys.clone(),
        vals: s.entries.iter().zip(tys).map(|(n, ty)| reflect(&s.dom, ty, n.clone())).collect(),
    }
}

/// Reify every entry: the normal substitution `env.world() → env.tys()`.
pub fn reify_env(sig: &Signature, env: &Env) -> Result<NfSb, NormError> {
    Ok(NfSb {
        dom: env.world.clone(),
        entries: env
            .tys
            .iter()
            .zip(&env.vals)
            .map(|(ty, v)| reify(sig, &env.world, ty, v))
            .collect::<Result<_, _>>()?,
    })
}

/// Evaluate a term whose free variables are typed by `env.tys()`.
pub fn eval_tm(sig: &Signature, env: &Env, t: &Tm) -> Result<Val, NormError> {
    infer_tm(sig, &env.tys, t)?;
    eval(sig, env, &compile_tm(sig, &env.tys, t)?.0)
}

/// Evaluate a substitution out of `env.tys()`, giving an environment over
/// its codomain.
pub fn eval_sb(sig: &Signature, env: &Env, d: &Sb) -> Result<Env, NormError> {
    infer_sb(sig, &env.tys, d)?;
    eval_code_sb(sig, env, &compile_sb(sig, &env.tys, d)?.0)
}

fn eval(sig: &Signature, env: &Env, c: &Code) -> Result<Val, NormError> {
    match c {
        Code::Var => env
            .vals
            .last()
            .cloned()
            .ok_or_else(|| NormError::Internal("variable in an empty environment".into())),
        Code::Op(name) => {
            let arity = sig.lookup_op(name)?;
            let args = reify_env(sig, env)?;
            Ok(reflect(&env.world, &arity.result, Ne::Op(name.clone(), args)))
        }
        Code::Sub(u, d) => eval(sig, &eval_code_sb(sig, env, d)?, u),
        Code::Lam(_, src, body) => Ok(Val::Arrow(Glued {
            closure: Arc::new(Closure::Lam {
                src: src.clone(),
                body: body.clone(),
                env: env.clone(),
            }),
            pending: None,
        })),
        Code::App(f, a) => match eval(sig, env, f)? {
            Val::Arrow(g) => {
                let a = eval(sig, env, a)?;
                apply(sig, &g, &ren_id(&env.world), a)
            }
            v => Err(NormError::Internal(format!("applied a non-function {v:?}"))),
        },
        Code::Pair(a, b) => Ok(Val::Pair(Box::new(eval(sig, env, a)?), Box::new(eval(sig, env, b)?))),
        Code::Fst(p) => match eval(sig, env, p)? {
            Val::Pair(a, _) => Ok(*a),
            v => Err(NormError::Internal(format!("projected a non-pair {v:?}"))),
        },
        Code::Snd(p) => match eval(sig, env, p)? {
            Val::Pair(_, b) => Ok(*b),
            v => Err(NormError::Internal(format!("projected a non-pair {v:?}"))),
        },
    }
}

fn eval_code_sb(sig: &Signature, env: &Env, d: &CodeSb) -> Result<Env, NormError> {
    match d {
        CodeSb::Id => Ok(env.clone()),
        CodeSb::Proj => {
            let mut env = env.clone();
            env.tys.pop();
            env.vals.pop();
            Ok(env)
        }
        CodeSb::Ext(s, t, ty) => {
            let mut out = eval_code_sb(sig, env, s)?;
            out.push(ty.clone(), eval(sig, env, t)?);
            Ok(out)
        }
        CodeSb::Comp(x, s) => eval_code_sb(sig, &eval_code_sb(sig, env, s)?, x),
    }
}

/// Annotate a term already known to be well-typed in `ctx`.
fn compile_tm(sig: &Signature, ctx: &Ctx, t: &Tm) -> Result<(Code, Ty), NormError> {
    let broken = || NormError::Internal(format!("cannot compile {t} in {ctx}"));
    Ok(match t {
        Tm::Var => (Code::Var, ctx.last().ok_or_else(broken)?.clone()),
        Tm::Op(name) => (Code::Op(name.clone()), sig.lookup_op(name)?.result.clone()),
        Tm::Sub(u, d) => {
            let (d, cod) = compile_sb(sig, ctx, d)?;
            let (u, ty) = compile_tm(sig, &cod, u)?;
            (Code::Sub(Box::new(u), Box::new(d)), ty)
        }
        Tm::Lam(dom, body) => {
            let (body, cod) = compile_tm(sig, &ctx.extended(dom.clone()), body)?;
            (
                Code::Lam(dom.clone(), Arc::new(t.clone()), Arc::new(body)),
                Ty::arrow(dom.clone(), cod),
            )
        }
        Tm::App(f, a) => {
            let (f, fty) = compile_tm(sig, ctx, f)?;
            let (a, _) = compile_tm(sig, ctx, a)?;
            let Ty::Arrow(_, cod) = fty else { return Err(broken()) };
            (Code::App(Box::new(f), Box::new(a)), (*cod).clone())
        }
        Tm::Pair(a, b) => {
            let (a, l) = compile_tm(sig, ctx, a)?;
            let (b, r) = compile_tm(sig, ctx, b)?;
            (Code::Pair(Box::new(a), Box::new(b)), Ty::prod(l, r))
        }
        Tm::Fst(p) => match compile_tm(sig, ctx, p)? {
            (p, Ty::Prod(l, _)) => (Code::Fst(Box::new(p)), (*l).clone()),
            _ => return Err(broken()),
        },
        Tm::Snd(p) => match compile_tm(sig, ctx, p)? {
            (p, Ty::Prod(_, r)) => (Code::Snd(Box::new(p)), (*r).clone()),
            _ => return Err(broken()),
        },
    })
}

fn compile_sb(sig: &Signature, ctx: &Ctx, d: &Sb) -> Result<(CodeSb, Ctx), NormError> {
    Ok(match d {
        Sb::Id => (CodeSb::Id, ctx.clone()),
        Sb::Proj => (
            CodeSb::Proj,
            ctx.init()
                .ok_or_else(|| NormError::Internal(format!("p out of the empty context {ctx}")))?,
        ),
        Sb::Ext(s, t) => {
            let (s, cod) = compile_sb(sig, ctx, s)?;
            let (t, ty) = compile_tm(sig, ctx, t)?;
            (CodeSb::Ext(Box::new(s), Box::new(t), ty.clone()), cod.extended(ty))
        }
        Sb::Comp(x, s) => {
            let (s, mid) = compile_sb(sig, ctx, s)?;
            let (x, cod) = compile_sb(sig, &mid, x)?;
            (CodeSb::Comp(Box::new(x), Box::new(s)), cod)
        }
    })
}

/// The environment interpreting `ctx` by its own variables.
pub fn identity_env(ctx: &Ctx) -> Env {
    reflect_env(&id_ne_sub(ctx), ctx)
}

/// Evaluate `t` at the reflected identity environment of `ctx`, returning
/// the value and its type.
pub fn eval_identity(sig: &Signature, ctx: &Ctx, t: &Tm) -> Result<(Val, Ty), NormError> {
    let ty = infer_tm(sig, ctx, t)?;
    let (code, _) = compile_tm(sig, ctx, t)?;
    Ok((eval(sig, &identity_env(ctx), &code)?, ty))
}

/// The η-long β-normal form of `t`.
pub fn nf(sig: &Signature, ctx: &Ctx, t: &Tm) -> Result<Nf, NormError> {
    Ok(nf_typed(sig, ctx, t)?.0)
}

/// [`nf`] together with the inferred type.
pub fn nf_typed(sig: &Signature, ctx: &Ctx, t: &Tm) -> Result<(Nf, Ty), NormError> {
    let (v, ty) = eval_identity(sig, ctx, t)?;
    Ok((reify(sig, ctx, &ty, &v)?, ty))
}

/// The normal form of a substitution out of `ctx`: one normal per entry of
/// its codomain.
pub fn nf_sub(sig: &Signature, ctx: &Ctx, d: &Sb) -> Result<NfSb, NormError> {
    infer_sb(sig, ctx, d)?;
    let (code, _) = compile_sb(sig, ctx, d)?;
    reify_env(sig, &eval_code_sb(sig, &identity_env(ctx), &code)?)
}

/// Decide definitional equality by comparing normal forms.
pub fn def_eq(sig: &Signature, ctx: &Ctx, t1: &Tm, t2: &Tm) -> Result<bool, NormError> {
    let (n1, ty1) = nf_typed(sig, ctx, t1)?;
    let (n2, ty2) = nf_typed(sig, ctx, t2)?;
    if ty1 != ty2 {
        return Err(TypeError::Mismatch {
            left: ty1.to_string(),
            right: ty2.to_string(),
        }
        .into());
    }
    Ok(n1 == n2)
}
