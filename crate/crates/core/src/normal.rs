//! Neutral and η-long normal forms, their restricted typing judgments, and
//! readback into raw syntax.
//!
//! The grammars are:
//!
//! ```text
//! Ne ::= NVar k | NOp ϑ NfSb | NApp Ne Nf | NFst Ne | NSnd Ne
//! Nf ::= NShift Ne            (atomic types only)
//!      | NLam σ Nf | NPair Nf Nf
//! ```
//!
//! Normal substitutions are vectors of normals over a domain context `Γ`;
//! they read back as `Ext` chains rooted at `p^|Γ|`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::TypeError;
use crate::signature::{Ctx, Name, Signature, Ty};
use crate::syntax::{proj_pow, var_ix, Sb, Tm};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag", content = "args")]
pub enum Ne {
    Var(usize),
    Op(Name, NfSb),
    App(Box<Ne>, Box<Nf>),
    Fst(Box<Ne>),
    Snd(Box<Ne>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag", content = "args")]
pub enum Nf {
    Shift(Ne),
    Lam(Ty, Box<Nf>),
    Pair(Box<Nf>, Box<Nf>),
}

/// A normal substitution `dom → Δ`, with `entries[j]` normal at `Δ_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NfSb {
    pub dom: Ctx,
    pub entries: Vec<Nf>,
}

/// A neutral substitution. Only used for the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NeSb {
    pub dom: Ctx,
    pub entries: Vec<Ne>,
}

impl Ne {
    pub fn app(self, arg: Nf) -> Ne {
        Ne::App(Box::new(self), Box::new(arg))
    }

    pub fn fst(self) -> Ne {
        Ne::Fst(Box::new(self))
    }

    pub fn snd(self) -> Ne {
        Ne::Snd(Box::new(self))
    }
}

impl Nf {
    pub fn lam(dom: Ty, body: Nf) -> Nf {
        Nf::Lam(dom, Box::new(body))
    }

    pub fn pair(a: Nf, b: Nf) -> Nf {
        Nf::Pair(Box::new(a), Box::new(b))
    }

    pub fn size(&self) -> usize {
        match self {
            Nf::Shift(n) => 1 + n.size(),
            Nf::Lam(_, b) => 1 + b.size(),
            Nf::Pair(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl Ne {
    pub fn size(&self) -> usize {
        match self {
            Ne::Var(_) => 1,
            Ne::Op(_, d) => 1 + d.entries.iter().map(Nf::size).sum::<usize>(),
            Ne::App(f, a) => 1 + f.size() + a.size(),
            Ne::Fst(n) | Ne::Snd(n) => 1 + n.size(),
        }
    }
}

/// Synthesize the type of a neutral.
pub fn check_ne(sig: &Signature, ctx: &Ctx, n: &Ne) -> Result<Ty, TypeError> {
    match n {
        Ne::Var(k) => ctx.lookup(*k).cloned().ok_or_else(|| {
            TypeError::ill_typed("variable", readback_ne(n), format!("index {k} out of range in {ctx}"))
        }),
        Ne::Op(name, args) => {
            let arity = sig.lookup_op(name)?;
            if !check_nfsb(sig, ctx, args, &arity.args) {
                return Err(TypeError::ill_typed(
                    "operation",
                    readback_ne(n),
                    format!("arguments do not form a normal substitution {ctx} → {}", arity.args),
                ));
            }
            Ok(arity.result.clone())
        }
        Ne::App(f, a) => match check_ne(sig, ctx, f)? {
            Ty::Arrow(dom, cod) if check_nf(sig, ctx, a, &dom) => Ok((*cod).clone()),
            Ty::Arrow(dom, _) => Err(TypeError::ill_typed(
                "app",
                readback_ne(n),
                format!("argument is not a normal of type {dom}"),
            )),
            other => Err(TypeError::ill_typed("app", readback_ne(n), format!("head has type {other}"))),
        },
        Ne::Fst(p) => match check_ne(sig, ctx, p)? {
            Ty::Prod(a, _) => Ok((*a).clone()),
            other => Err(TypeError::ill_typed("proj1", readback_ne(n), format!("non-product {other}"))),
        },
        Ne::Snd(p) => match check_ne(sig, ctx, p)? {
            Ty::Prod(_, b) => Ok((*b).clone()),
            other => Err(TypeError::ill_typed("proj2", readback_ne(n), format!("non-product {other}"))),
        },
    }
}

/// Check a normal against a type. `Shift` is accepted only at atoms.
pub fn check_nf(sig: &Signature, ctx: &Ctx, n: &Nf, ty: &Ty) -> bool {
    match (n, ty) {
        (Nf::Shift(ne), Ty::Atom(_)) => check_ne(sig, ctx, ne).is_ok_and(|t| t == *ty),
        (Nf::Shift(_), _) => false,
        (Nf::Lam(dom, body), Ty::Arrow(d, c)) => **d == *dom && check_nf(sig, &ctx.extended(dom.clone()), body, c),
        (Nf::Pair(a, b), Ty::Prod(l, r)) => check_nf(sig, ctx, a, l) && check_nf(sig, ctx, b, r),
        _ => false,
    }
}

/// Check `s` as a normal substitution `ctx → target`.
pub fn check_nfsb(sig: &Signature, ctx: &Ctx, s: &NfSb, target: &Ctx) -> bool {
    s.dom == *ctx
        && s.entries.len() == target.len()
        && s.entries.iter().zip(target).all(|(n, ty)| check_nf(sig, ctx, n, ty))
}

/// The identity substitution on `ctx`, as a vector of neutral variables.
pub fn id_ne_sub(ctx: &Ctx) -> NeSb {
    let len = ctx.len();
    NeSb {
        dom: ctx.clone(),
        entries: (0..len).map(|j| Ne::Var(len - 1 - j)).collect(),
    }
}

pub fn readback_ne(n: &Ne) -> Tm {
    match n {
        Ne::Var(k) => var_ix(*k),
        Ne::Op(name, args) => Tm::sub(Tm::Op(name.clone()), readback_nfsb(args)),
        Ne::App(f, a) => Tm::app(readback_ne(f), readback_nf(a)),
        Ne::Fst(p) => Tm::fst(readback_ne(p)),
        Ne::Snd(p) => Tm::snd(readback_ne(p)),
    }
}

pub fn readback_nf(n: &Nf) -> Tm {
    match n {
        Nf::Shift(ne) => readback_ne(ne),
        Nf::Lam(dom, body) => Tm::lam(dom.clone(), readback_nf(body)),
        Nf::Pair(a, b) => Tm::pair(readback_nf(a), readback_nf(b)),
    }
}

pub fn readback_nfsb(s: &NfSb) -> Sb {
    s.entries
        .iter()
        .fold(proj_pow(s.dom.len()), |acc, n| Sb::ext(acc, readback_nf(n)))
}

pub fn readback_nesb(s: &NeSb) -> Sb {
    s.entries
        .iter()
        .fold(proj_pow(s.dom.len()), |acc, n| Sb::ext(acc, readback_ne(n)))
}

impl fmt::Display for Ne {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", readback_ne(self))
    }
}

impl fmt::Display for Nf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", readback_nf(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::parse_signature;
    use crate::signature::tests::SIG0;
    use crate::syntax::infer_tm;

    fn a() -> Ty {
        Ty::atom("a")
    }

    fn b() -> Ty {
        Ty::atom("b")
    }

    fn empty_args(dom: Ctx) -> NfSb {
        NfSb { dom, entries: vec![] }
    }

    #[test]
    fn check_examples() {
        let sig = parse_signature(SIG0).unwrap();
        let ctx_a = Ctx::from(vec![a()]);
        assert!(check_nf(&sig, &ctx_a, &Nf::Shift(Ne::Var(0)), &a()));

        let aa = Ty::arrow(a(), a());
        let ctx_aa = Ctx::from(vec![aa.clone()]);
        assert!(!check_nf(&sig, &ctx_aa, &Nf::Shift(Ne::Var(0)), &aa));

        let f_var = Ne::Op(
            "f".into(),
            NfSb {
                dom: ctx_a.clone(),
                entries: vec![Nf::Shift(Ne::Var(0))],
            },
        );
        assert_eq!(check_ne(&sig, &ctx_a, &f_var), Ok(a()));
    }

    #[test]
    fn operation_arguments_must_match_arity() {
        let sig = parse_signature(SIG0).unwrap();
        let ctx_b = Ctx::from(vec![b()]);
        let bad = Ne::Op(
            "f".into(),
            NfSb {
                dom: ctx_b.clone(),
                entries: vec![Nf::Shift(Ne::Var(0))],
            },
        );
        assert!(check_ne(&sig, &ctx_b, &bad).is_err());
        // the vector's domain must be the ambient context
        let c = Ne::Op("c".into(), empty_args(Ctx::empty()));
        assert!(check_ne(&sig, &ctx_b, &c).is_err());
        assert_eq!(check_ne(&sig, &Ctx::empty(), &c), Ok(a()));
    }

    #[test]
    fn identity_neutral_substitution() {
        assert!(id_ne_sub(&Ctx::empty()).entries.is_empty());
        assert_eq!(id_ne_sub(&Ctx::from(vec![a()])).entries, vec![Ne::Var(0)]);
        assert_eq!(id_ne_sub(&Ctx::from(vec![a(), b()])).entries, vec![Ne::Var(1), Ne::Var(0)]);
        assert_eq!(readback_nesb(&id_ne_sub(&Ctx::empty())), Sb::Id);
    }

    #[test]
    fn readback_examples() {
        assert_eq!(readback_nf(&Nf::Shift(Ne::Var(0))), Tm::Var);
        assert_eq!(readback_nf(&Nf::lam(a(), Nf::Shift(Ne::Var(0)))), Tm::lam(a(), Tm::Var));
        let c = Ne::Op("c".into(), empty_args(Ctx::empty()));
        assert_eq!(readback_ne(&c), Tm::sub(Tm::op("c"), Sb::Id));
        assert_eq!(readback_ne(&c).to_string(), "(sub (op c) id)");
        let c_in_ab = Ne::Op("c".into(), empty_args(Ctx::from(vec![a(), b()])));
        assert_eq!(readback_ne(&c_in_ab).to_string(), "(sub (op c) (comp p p))");
    }

    #[test]
    fn readback_preserves_types() {
        let sig = parse_signature(SIG0).unwrap();
        let ctx = Ctx::from(vec![a(), b()]);
        let h = Ne::Op(
            "h".into(),
            NfSb {
                dom: ctx.clone(),
                entries: vec![Nf::Shift(Ne::Var(1)), Nf::Shift(Ne::Var(0))],
            },
        );
        let n = Nf::pair(Nf::Shift(h), Nf::lam(a(), Nf::Shift(Ne::Var(0))));
        let ty = Ty::prod(b(), Ty::arrow(a(), a()));
        assert!(check_nf(&sig, &ctx, &n, &ty));
        assert_eq!(infer_tm(&sig, &ctx, &readback_nf(&n)), Ok(ty));
    }
}
