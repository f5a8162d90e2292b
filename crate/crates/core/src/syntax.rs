//! Raw explicit-substitution syntax with De Bruijn variables, and type
//! synthesis for it.
//!
//! There is a single variable constructor, [`Tm::Var`], naming the most
//! recent binding. Older bindings are reached by weakening: index `k` is
//! `Var[p^k]`, built by [`var_ix`]. Operations are typed exactly in their
//! arity context; to use one elsewhere, substitute into it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ParseError, TypeError};
use crate::sexp::{self, Sexp};
use crate::signature::{name_of, ty_from_sexp, Ctx, Name, Signature, Ty};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag", content = "args")]
pub enum Tm {
    Var,
    Op(Name),
    Sub(Box<Tm>, Box<Sb>),
    Lam(Ty, Box<Tm>),
    App(Box<Tm>, Box<Tm>),
    Pair(Box<Tm>, Box<Tm>),
    Fst(Box<Tm>),
    Snd(Box<Tm>),
}

/// Substitutions. `Comp(outer, inner)` runs `inner` first: if
/// `inner : Γ → Δ` and `outer : Δ → Ξ` then `Comp(outer, inner) : Γ → Ξ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag", content = "args")]
pub enum Sb {
    Id,
    Proj,
    Ext(Box<Sb>, Box<Tm>),
    Comp(Box<Sb>, Box<Sb>),
}

impl Tm {
    pub fn op(name: &str) -> Tm {
        Tm::Op(Name::from(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(t: Tm, d: Sb) -> Tm {
        Tm::Sub(Box::new(t), Box::new(d))
    }

    pub fn lam(dom: Ty, body: Tm) -> Tm {
        Tm::Lam(dom, Box::new(body))
    }

    pub fn app(f: Tm, a: Tm) -> Tm {
        Tm::App(Box::new(f), Box::new(a))
    }

    pub fn pair(a: Tm, b: Tm) -> Tm {
        Tm::Pair(Box::new(a), Box::new(b))
    }

    pub fn fst(t: Tm) -> Tm {
        Tm::Fst(Box::new(t))
    }

    pub fn snd(t: Tm) -> Tm {
        Tm::Snd(Box::new(t))
    }

    /// Number of term and substitution nodes.
    pub fn size(&self) -> usize {
        match self {
            Tm::Var | Tm::Op(_) => 1,
            Tm::Sub(t, d) => 1 + t.size() + d.size(),
            Tm::Lam(_, t) | Tm::Fst(t) | Tm::Snd(t) => 1 + t.size(),
            Tm::App(a, b) | Tm::Pair(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl Sb {
    pub fn ext(d: Sb, t: Tm) -> Sb {
        Sb::Ext(Box::new(d), Box::new(t))
    }

    pub fn comp(outer: Sb, inner: Sb) -> Sb {
        Sb::Comp(Box::new(outer), Box::new(inner))
    }

    pub fn size(&self) -> usize {
        match self {
            Sb::Id | Sb::Proj => 1,
            Sb::Ext(d, t) => 1 + d.size() + t.size(),
            Sb::Comp(a, b) => 1 + a.size() + b.size(),
        }
    }
}

/// `p^k`: `Id` for zero, otherwise `Comp(Proj, p^(k-1))`.
pub fn proj_pow(k: usize) -> Sb {
    (0..k).fold(Sb::Id, |acc, i| if i == 0 { Sb::Proj } else { Sb::comp(Sb::Proj, acc) })
}

/// Recognize `p^k` as built by [`proj_pow`].
pub fn as_proj_pow(d: &Sb) -> Option<usize> {
    match d {
        Sb::Id => Some(0),
        Sb::Proj => Some(1),
        Sb::Comp(outer, inner) if **outer == Sb::Proj => match as_proj_pow(inner)? {
            0 => None,
            k => Some(k + 1),
        },
        _ => None,
    }
}

/// The variable with De Bruijn index `k`, i.e. `Var[p^k]` (plain `Var` for 0).
pub fn var_ix(k: usize) -> Tm {
    match k {
        0 => Tm::Var,
        k => Tm::sub(Tm::Var, proj_pow(k)),
    }
}

/// Recognize the output of [`var_ix`].
pub fn as_var_ix(t: &Tm) -> Option<usize> {
    match t {
        Tm::Var => Some(0),
        Tm::Sub(t, d) if **t == Tm::Var => match as_proj_pow(d)? {
            0 => None,
            k => Some(k),
        },
        _ => None,
    }
}

/// De Bruijn lifting: `lift(δ) = (δ ∘ p, Var)`, so `δ : Γ → Δ` gives
/// `lift(δ) : Γ,σ → Δ,σ`.
pub fn lift(d: Sb) -> Sb {
    Sb::ext(Sb::comp(d, Sb::Proj), Tm::Var)
}

/// Synthesize the type of `t` in `ctx`.
pub fn infer_tm(sig: &Signature, ctx: &Ctx, t: &Tm) -> Result<Ty, TypeError> {
    match t {
        Tm::Var => ctx
            .last()
            .cloned()
            .ok_or_else(|| TypeError::ill_typed("variable", t, "empty context")),
        Tm::Op(name) => {
            let arity = sig.lookup_op(name)?;
            if arity.args == *ctx {
                Ok(arity.result.clone())
            } else {
                Err(TypeError::ill_typed(
                    "operation",
                    t,
                    format!("operation context is {} but ambient context is {ctx}", arity.args),
                ))
            }
        }
        Tm::Sub(body, d) => {
            let target = infer_sb(sig, ctx, d)?;
            infer_tm(sig, &target, body)
        }
        Tm::Lam(dom, body) => {
            if !sig.ty_well_formed(dom) {
                return Err(TypeError::ill_typed("abstraction", t, format!("ill-formed domain {dom}")));
            }
            let cod = infer_tm(sig, &ctx.extended(dom.clone()), body)?;
            Ok(Ty::arrow(dom.clone(), cod))
        }
        Tm::App(f, a) => match infer_tm(sig, ctx, f)? {
            Ty::Arrow(dom, cod) => {
                let arg = infer_tm(sig, ctx, a)?;
                if arg == *dom {
                    Ok((*cod).clone())
                } else {
                    Err(TypeError::ill_typed(
                        "application",
                        t,
                        format!("argument has type {arg}, expected {dom}"),
                    ))
                }
            }
            other => Err(TypeError::ill_typed(
                "application",
                t,
                format!("head has non-function type {other}"),
            )),
        },
        Tm::Pair(a, b) => Ok(Ty::prod(infer_tm(sig, ctx, a)?, infer_tm(sig, ctx, b)?)),
        Tm::Fst(p) => match infer_tm(sig, ctx, p)? {
            Ty::Prod(a, _) => Ok((*a).clone()),
            other => Err(TypeError::ill_typed("proj1", t, format!("non-product type {other}"))),
        },
        Tm::Snd(p) => match infer_tm(sig, ctx, p)? {
            Ty::Prod(_, b) => Ok((*b).clone()),
            other => Err(TypeError::ill_typed("proj2", t, format!("non-product type {other}"))),
        },
    }
}

/// Synthesize the codomain of `d : ctx → Δ`.
pub fn infer_sb(sig: &Signature, ctx: &Ctx, d: &Sb) -> Result<Ctx, TypeError> {
    match d {
        Sb::Id => Ok(ctx.clone()),
        Sb::Proj => ctx
            .init()
            .ok_or_else(|| TypeError::ill_typed("sb/proj", d, "empty context")),
        Sb::Ext(d, t) => {
            let mut target = infer_sb(sig, ctx, d)?;
            target.push(infer_tm(sig, ctx, t)?);
            Ok(target)
        }
        Sb::Comp(outer, inner) => {
            let mid = infer_sb(sig, ctx, inner)?;
            infer_sb(sig, &mid, outer)
        }
    }
}

/// Length of the codomain of `d`, given the length of its domain. Untyped.
pub fn cod_len(d: &Sb, dom_len: usize) -> Option<usize> {
    match d {
        Sb::Id => Some(dom_len),
        Sb::Proj => dom_len.checked_sub(1),
        Sb::Ext(d, _) => Some(cod_len(d, dom_len)? + 1),
        Sb::Comp(outer, inner) => cod_len(outer, cod_len(inner, dom_len)?),
    }
}

impl fmt::Display for Tm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(k) = as_var_ix(self) {
            return match k {
                0 => write!(f, "v"),
                k => write!(f, "(ix {k})"),
            };
        }
        match self {
            Tm::Var => write!(f, "v"),
            Tm::Op(name) => write!(f, "(op {name})"),
            Tm::Sub(t, d) => write!(f, "(sub {t} {d})"),
            Tm::Lam(ty, t) => write!(f, "(lam {ty} {t})"),
            Tm::App(a, b) => write!(f, "(app {a} {b})"),
            Tm::Pair(a, b) => write!(f, "(pair {a} {b})"),
            Tm::Fst(t) => write!(f, "(fst {t})"),
            Tm::Snd(t) => write!(f, "(snd {t})"),
        }
    }
}

impl fmt::Display for Sb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sb::Id => write!(f, "id"),
            Sb::Proj => write!(f, "p"),
            Sb::Ext(d, t) => write!(f, "(ext {d} {t})"),
            Sb::Comp(a, b) => write!(f, "(comp {a} {b})"),
        }
    }
}

fn arity_error(sexp: &Sexp, keyword: &str, n: usize) -> ParseError {
    ParseError::new(sexp.pos(), format!("`{keyword}` takes {n} argument(s)"))
}

fn tm_from_sexp<'a>(sexp: &'a Sexp) -> Result<Tm, ParseError> {
    match sexp {
        Sexp::Atom(s, _) if s == "v" => return Ok(Tm::Var),
        Sexp::Atom(s, pos) => {
            return Err(ParseError::new(*pos, format!("expected a term, found `{s}`")));
        }
        Sexp::List(..) => {}
    }
    let items = sexp.as_list().unwrap_or_default();
    let Some((head, args)) = items.split_first() else {
        return Err(ParseError::new(sexp.pos(), "expected a term, found `()`"));
    };
    let keyword = head.as_atom().unwrap_or("");
    let one = |args: &'a [Sexp]| match args {
        [a] => Ok(a),
        _ => Err(arity_error(sexp, keyword, 1)),
    };
    let two = |args: &'a [Sexp]| match args {
        [a, b] => Ok((a, b)),
        _ => Err(arity_error(sexp, keyword, 2)),
    };
    match keyword {
        "ix" => {
            let arg = one(args)?;
            let k = arg
                .as_atom()
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| ParseError::new(arg.pos(), "expected a natural number"))?;
            Ok(var_ix(k))
        }
        "op" => Ok(Tm::Op(name_of(one(args)?)?)),
        "sub" => {
            let (t, d) = two(args)?;
            Ok(Tm::sub(tm_from_sexp(t)?, sb_from_sexp(d)?))
        }
        "lam" => {
            let (ty, t) = two(args)?;
            Ok(Tm::lam(ty_from_sexp(ty)?, tm_from_sexp(t)?))
        }
        "app" => {
            let (a, b) = two(args)?;
            Ok(Tm::app(tm_from_sexp(a)?, tm_from_sexp(b)?))
        }
        "pair" => {
            let (a, b) = two(args)?;
            Ok(Tm::pair(tm_from_sexp(a)?, tm_from_sexp(b)?))
        }
        "fst" => Ok(Tm::fst(tm_from_sexp(one(args)?)?)),
        "snd" => Ok(Tm::snd(tm_from_sexp(one(args)?)?)),
        _ => Err(ParseError::new(head.pos(), format!("unknown term former `{keyword}`"))),
    }
}

fn sb_from_sexp(sexp: &Sexp) -> Result<Sb, ParseError> {
    match sexp {
        Sexp::Atom(s, _) if s == "id" => Ok(Sb::Id),
        Sexp::Atom(s, _) if s == "p" => Ok(Sb::Proj),
        Sexp::Atom(s, pos) => Err(ParseError::new(*pos, format!("expected a substitution, found `{s}`"))),
        Sexp::List(items, pos) => match items.as_slice() {
            [Sexp::Atom(k, _), d, t] if k == "ext" => Ok(Sb::ext(sb_from_sexp(d)?, tm_from_sexp(t)?)),
            [Sexp::Atom(k, _), a, b] if k == "comp" => Ok(Sb::comp(sb_from_sexp(a)?, sb_from_sexp(b)?)),
            _ => Err(ParseError::new(*pos, "expected `(ext SB TM)` or `(comp SB SB)`")),
        },
    }
}

pub fn parse_tm(src: &str) -> Result<Tm, ParseError> {
    tm_from_sexp(&sexp::read(src)?)
}

pub fn parse_sb(src: &str) -> Result<Sb, ParseError> {
    sb_from_sexp(&sexp::read(src)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::parse_signature;
    use crate::signature::tests::SIG0;

    fn sig0() -> Signature {
        parse_signature(SIG0).unwrap()
    }

    fn a() -> Ty {
        Ty::atom("a")
    }

    fn b() -> Ty {
        Ty::atom("b")
    }

    #[test]
    fn var_ix_shapes() {
        assert_eq!(var_ix(0), Tm::Var);
        assert_eq!(var_ix(1), Tm::sub(Tm::Var, Sb::Proj));
        assert_eq!(var_ix(2), Tm::sub(Tm::Var, Sb::comp(Sb::Proj, Sb::Proj)));
        for k in 0..6 {
            assert_eq!(as_var_ix(&var_ix(k)), Some(k));
            assert_eq!(as_proj_pow(&proj_pow(k)), Some(k));
        }
        assert_eq!(as_var_ix(&Tm::sub(Tm::Var, Sb::Id)), None);
    }

    #[test]
    fn lift_shapes() {
        let lifted = |d| Sb::ext(Sb::comp(d, Sb::Proj), Tm::Var);
        assert_eq!(lift(Sb::Id), lifted(Sb::Id));
        assert_eq!(lift(Sb::Proj), lifted(Sb::Proj));
        let d = Sb::ext(Sb::Id, Tm::Var);
        assert_eq!(lift(d.clone()), lifted(d));
    }

    #[test]
    fn lift_is_well_typed() {
        let sig = sig0();
        let gamma = Ctx::from(vec![a(), b()]);
        let d = Sb::ext(Sb::Proj, Tm::Var);
        let delta = infer_sb(&sig, &gamma, &d).unwrap();
        let up = infer_sb(&sig, &gamma.extended(a()), &lift(d)).unwrap();
        assert_eq!(up, delta.extended(a()));
    }

    #[test]
    fn infer_examples() {
        let sig = sig0();
        let ctx_a = Ctx::from(vec![a()]);
        assert_eq!(infer_tm(&sig, &ctx_a, &Tm::Var), Ok(a()));
        assert_eq!(infer_tm(&sig, &ctx_a, &Tm::op("f")), Ok(a()));
        let applied = Tm::sub(Tm::op("f"), Sb::ext(Sb::Id, Tm::op("c")));
        assert_eq!(infer_tm(&sig, &Ctx::empty(), &applied), Ok(a()));
        let bad = Tm::app(Tm::op("c"), Tm::op("c"));
        assert!(matches!(
            infer_tm(&sig, &Ctx::empty(), &bad),
            Err(TypeError::IllTyped { rule: "application", .. })
        ));
        assert_eq!(
            infer_tm(&sig, &Ctx::empty(), &Tm::op("q")),
            Err(TypeError::UnknownOp("q".into()))
        );
        // operations are not implicitly weakened
        assert!(infer_tm(&sig, &ctx_a, &Tm::op("c")).is_err());
    }

    #[test]
    fn infer_sb_examples() {
        let sig = sig0();
        let ab = Ctx::from(vec![a(), b()]);
        assert_eq!(infer_sb(&sig, &ab, &Sb::Proj), Ok(Ctx::from(vec![a()])));
        let ctx_a = Ctx::from(vec![a()]);
        assert_eq!(
            infer_sb(&sig, &ctx_a, &Sb::ext(Sb::Id, Tm::Var)),
            Ok(Ctx::from(vec![a(), a()]))
        );
        let pp = Sb::comp(Sb::Proj, Sb::Proj);
        assert_eq!(infer_sb(&sig, &ab, &pp), Ok(Ctx::empty()));
        assert!(infer_sb(&sig, &ctx_a, &pp).is_err());
    }

    #[test]
    fn var_ix_types() {
        let sig = sig0();
        let ctx = Ctx::from(vec![a(), b(), Ty::arrow(a(), b())]);
        for k in 0..ctx.len() {
            assert_eq!(infer_tm(&sig, &ctx, &var_ix(k)).as_ref(), Ok(ctx.lookup(k).unwrap()));
        }
        assert!(infer_tm(&sig, &ctx, &var_ix(3)).is_err());
    }

    #[test]
    fn weakening_preserves_types() {
        let sig = sig0();
        let ctx = Ctx::from(vec![a()]);
        let t = Tm::lam(b(), Tm::sub(Tm::op("h"), Sb::ext(Sb::ext(Sb::comp(Sb::Proj, Sb::Proj), var_ix(1)), Tm::Var)));
        let ty = infer_tm(&sig, &ctx, &t).unwrap();
        let weakened = Tm::sub(t, Sb::Proj);
        assert_eq!(infer_tm(&sig, &ctx.extended(b()), &weakened), Ok(ty));
    }

    #[test]
    fn parse_and_print() {
        let src = "(lam (arr a a) (app (ix 1) (sub (op f) (ext p v))))";
        let t = parse_tm(src).unwrap();
        assert_eq!(t.to_string(), src);
        assert_eq!(parse_tm("(ix 0)").unwrap(), Tm::Var);
        assert_eq!(parse_tm("(sub v p)").unwrap().to_string(), "(ix 1)");
        assert_eq!(parse_tm("(sub v id)").unwrap().to_string(), "(sub v id)");
        assert_eq!(parse_sb("(comp p (ext id v))").unwrap().to_string(), "(comp p (ext id v))");
        assert!(parse_tm("(lam a)").is_err());
        assert!(parse_tm("(frob v)").is_err());
        let err = parse_tm("(app v\n  (ix x))").unwrap_err();
        assert_eq!(err.pos, sexp::Pos { line: 2, col: 7 });
    }

    #[test]
    fn json_round_trip() {
        let t = parse_tm("(pair (fst v) (sub (op c) (comp p id)))").unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<Tm>(&json).unwrap(), t);
    }
}
