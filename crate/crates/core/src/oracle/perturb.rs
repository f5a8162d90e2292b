//! Random equality-preserving rewrites, used to build pairs of terms that
//! are definitionally equal but syntactically different.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::TypeError;
use crate::signature::{Ctx, Signature, Ty};
use crate::syntax::{as_proj_pow, infer_tm, lift, proj_pow, Sb, Tm};

/// The local rewrites `perturb` may apply. Each is an instance of one of the
/// equations, used in either direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PerturbRule {
    /// `t → t[id]`
    InsertIdentity,
    /// `t → (λτ. v) t`
    BetaExpand,
    /// `t → (t, t).1`
    FstExpand,
    /// `t → (t, t).2`
    SndExpand,
    /// `t → v[(id, t)]`
    VarExt,
    /// `t → t[p][(id, t)]`
    WeakenInstantiate,
    /// `t → λσ. t[p] v` at arrows, `t → (t.1, t.2)` at products
    EtaExpand,
    /// the inverse of `EtaExpand`, where the pattern matches
    EtaContract,
    /// one β-step at the root
    BetaReduce,
    /// one substitution-pushing step at the root
    PushSubst,
    /// `δ → id ∘ δ` or `δ → δ ∘ id`
    CompIdentity,
    /// reassociate a composition
    CompAssoc,
    /// one composition-resolving step at the root
    CompReduce,
    /// `δ → (p ∘ δ, v[δ])`
    SbEta,
    /// replace any substitution into `()` by `p^|Γ|`
    SbEmpty,
}

impl PerturbRule {
    pub const ALL: [PerturbRule; 15] = [
        PerturbRule::InsertIdentity,
        PerturbRule::BetaExpand,
        PerturbRule::FstExpand,
        PerturbRule::SndExpand,
        PerturbRule::VarExt,
        PerturbRule::WeakenInstantiate,
        PerturbRule::EtaExpand,
        PerturbRule::EtaContract,
        PerturbRule::BetaReduce,
        PerturbRule::PushSubst,
        PerturbRule::CompIdentity,
        PerturbRule::CompAssoc,
        PerturbRule::CompReduce,
        PerturbRule::SbEta,
        PerturbRule::SbEmpty,
    ];
}

/// Apply up to `steps` random rewrites at random positions. The result has
/// the same type as `t` and is definitionally equal to it. Stops early if no
/// rule applies anywhere.
pub fn perturb(seed: u64, sig: &Signature, ctx: &Ctx, t: &Tm, steps: usize) -> Result<Tm, TypeError> {
    perturb_with(seed, sig, ctx, t, steps, &PerturbRule::ALL)
}

/// Like [`perturb`], restricted to the given rules.
pub fn perturb_with(
    seed: u64,
    sig: &Signature,
    ctx: &Ctx,
    t: &Tm,
    steps: usize,
    rules: &[PerturbRule],
) -> Result<Tm, TypeError> {
    let ty = infer_tm(sig, ctx, t)?;
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut cur = t.clone();
    for _ in 0..steps {
        match step(&mut rng, sig, ctx, &cur, rules) {
            Some(next) => cur = next,
            None => break,
        }
        debug_assert_eq!(infer_tm(sig, ctx, &cur).as_ref(), Ok(&ty), "perturb broke typing: {cur}");
    }
    Ok(cur)
}

fn step(rng: &mut SplitMix64, sig: &Signature, ctx: &Ctx, t: &Tm, rules: &[PerturbRule]) -> Option<Tm> {
    let mut sites = Vec::new();
    collect_tm(sig, ctx, t, &mut Vec::new(), &mut sites)?;
    sites.shuffle(rng);
    let mut order = rules.to_vec();
    for site in sites {
        order.shuffle(rng);
        let mut next = t.clone();
        let replaced = match (place_tm(&mut next, &site.path), &site.kind) {
            (Place::Tm(slot), Kind::Tm(ty)) => order
                .iter()
                .find_map(|&r| rewrite_tm(r, ty, slot))
                .map(|new| *slot = new)
                .is_some(),
            (Place::Sb(slot), Kind::Sb(cod)) => order
                .iter()
                .find_map(|&r| rewrite_sb(rng, r, &site.ctx, cod, slot))
                .map(|new| *slot = new)
                .is_some(),
            _ => unreachable!("site kinds follow the tree"),
        };
        if replaced {
            return Some(next);
        }
    }
    None
}

fn rewrite_tm(rule: PerturbRule, ty: &Ty, t: &Tm) -> Option<Tm> {
    use PerturbRule::*;
    let t0 = || t.clone();
    match rule {
        InsertIdentity => Some(Tm::sub(t0(), Sb::Id)),
        BetaExpand => Some(Tm::app(Tm::lam(ty.clone(), Tm::Var), t0())),
        FstExpand => Some(Tm::fst(Tm::pair(t0(), t0()))),
        SndExpand => Some(Tm::snd(Tm::pair(t0(), t0()))),
        VarExt => Some(Tm::sub(Tm::Var, Sb::ext(Sb::Id, t0()))),
        WeakenInstantiate => Some(Tm::sub(Tm::sub(t0(), Sb::Proj), Sb::ext(Sb::Id, t0()))),
        EtaExpand => match ty {
            Ty::Arrow(dom, _) => Some(Tm::lam((**dom).clone(), Tm::app(Tm::sub(t0(), Sb::Proj), Tm::Var))),
            Ty::Prod(..) => Some(Tm::pair(Tm::fst(t0()), Tm::snd(t0()))),
            Ty::Atom(_) => None,
        },
        EtaContract => match t {
            Tm::Lam(_, body) => match &**body {
                Tm::App(f, a) if **a == Tm::Var => match &**f {
                    Tm::Sub(u, d) if **d == Sb::Proj => Some((**u).clone()),
                    _ => None,
                },
                _ => None,
            },
            Tm::Pair(l, r) => match (&**l, &**r) {
                (Tm::Fst(u), Tm::Snd(w)) if u == w => Some((**u).clone()),
                _ => None,
            },
            _ => None,
        },
        BetaReduce => match t {
            Tm::App(f, s) => match &**f {
                Tm::Lam(_, b) => Some(Tm::sub((**b).clone(), Sb::ext(Sb::Id, (**s).clone()))),
                _ => None,
            },
            Tm::Fst(p) => match &**p {
                Tm::Pair(a, _) => Some((**a).clone()),
                _ => None,
            },
            Tm::Snd(p) => match &**p {
                Tm::Pair(_, b) => Some((**b).clone()),
                _ => None,
            },
            _ => None,
        },
        PushSubst => {
            let Tm::Sub(u, d) = t else { return None };
            let d0 = || (**d).clone();
            match (&**u, &**d) {
                (u, Sb::Id) => Some(u.clone()),
                (Tm::Var, Sb::Ext(_, s)) => Some((**s).clone()),
                (Tm::Sub(w, e), _) => Some(Tm::sub((**w).clone(), Sb::comp((**e).clone(), d0()))),
                (Tm::Lam(dom, b), _) => Some(Tm::lam(dom.clone(), Tm::sub((**b).clone(), lift(d0())))),
                (Tm::App(f, a), _) => Some(Tm::app(Tm::sub((**f).clone(), d0()), Tm::sub((**a).clone(), d0()))),
                (Tm::Pair(a, b), _) => Some(Tm::pair(Tm::sub((**a).clone(), d0()), Tm::sub((**b).clone(), d0()))),
                (Tm::Fst(p), _) => Some(Tm::fst(Tm::sub((**p).clone(), d0()))),
                (Tm::Snd(p), _) => Some(Tm::snd(Tm::sub((**p).clone(), d0()))),
                _ => None,
            }
        }
        CompIdentity | CompAssoc | CompReduce | SbEta | SbEmpty => None,
    }
}

fn rewrite_sb(rng: &mut SplitMix64, rule: PerturbRule, ctx: &Ctx, cod: &Ctx, d: &Sb) -> Option<Sb> {
    use PerturbRule::*;
    match rule {
        CompIdentity => Some(if rng.random_bool(0.5) {
            Sb::comp(Sb::Id, d.clone())
        } else {
            Sb::comp(d.clone(), Sb::Id)
        }),
        CompAssoc => match d {
            Sb::Comp(a, bc) => match &**bc {
                Sb::Comp(b, c) => Some(Sb::comp(Sb::comp((**a).clone(), (**b).clone()), (**c).clone())),
                _ => match &**a {
                    Sb::Comp(a, b) => Some(Sb::comp((**a).clone(), Sb::comp((**b).clone(), (**bc).clone()))),
                    _ => None,
                },
            },
            _ => None,
        },
        CompReduce => match d {
            Sb::Comp(x, s) => match (&**x, &**s) {
                (Sb::Id, s) => Some(s.clone()),
                (x, Sb::Id) => Some(x.clone()),
                (Sb::Proj, Sb::Ext(rest, _)) => Some((**rest).clone()),
                (Sb::Ext(x, t), s) => Some(Sb::ext(Sb::comp((**x).clone(), s.clone()), Tm::sub((**t).clone(), s.clone()))),
                _ => None,
            },
            _ => None,
        },
        SbEta if !cod.is_empty() => Some(Sb::ext(Sb::comp(Sb::Proj, d.clone()), Tm::sub(Tm::Var, d.clone()))),
        SbEmpty if cod.is_empty() && as_proj_pow(d) != Some(ctx.len()) => Some(proj_pow(ctx.len())),
        _ => None,
    }
}

enum Kind {
    Tm(Ty),
    Sb(Ctx),
}

struct Site {
    path: Vec<usize>,
    ctx: Ctx,
    kind: Kind,
}

fn collect_tm(sig: &Signature, ctx: &Ctx, t: &Tm, path: &mut Vec<usize>, out: &mut Vec<Site>) -> Option<Ty> {
    let child = |ix: usize, ctx: &Ctx, t: &Tm, path: &mut Vec<usize>, out: &mut Vec<Site>| {
        path.push(ix);
        let ty = collect_tm(sig, ctx, t, path, out);
        path.pop();
        ty
    };
    let ty = match t {
        Tm::Var | Tm::Op(_) => infer_tm(sig, ctx, t).ok()?,
        Tm::Sub(u, d) => {
            path.push(1);
            let cod = collect_sb(sig, ctx, d, path, out);
            path.pop();
            child(0, &cod?, u, path, out)?
        }
        Tm::Lam(dom, b) => Ty::arrow(dom.clone(), child(0, &ctx.extended(dom.clone()), b, path, out)?),
        Tm::App(f, a) => {
            let fty = child(0, ctx, f, path, out)?;
            child(1, ctx, a, path, out)?;
            match fty {
                Ty::Arrow(_, cod) => (*cod).clone(),
                _ => return None,
            }
        }
        Tm::Pair(a, b) => {
            let l = child(0, ctx, a, path, out)?;
            Ty::prod(l, child(1, ctx, b, path, out)?)
        }
        Tm::Fst(p) => match child(0, ctx, p, path, out)? {
            Ty::Prod(l, _) => (*l).clone(),
            _ => return None,
        },
        Tm::Snd(p) => match child(0, ctx, p, path, out)? {
            Ty::Prod(_, r) => (*r).clone(),
            _ => return None,
        },
    };
    out.push(Site {
        path: path.clone(),
        ctx: ctx.clone(),
        kind: Kind::Tm(ty.clone()),
    });
    Some(ty)
}

fn collect_sb(sig: &Signature, ctx: &Ctx, d: &Sb, path: &mut Vec<usize>, out: &mut Vec<Site>) -> Option<Ctx> {
    let cod = match d {
        Sb::Id => ctx.clone(),
        Sb::Proj => ctx.init()?,
        Sb::Ext(s, t) => {
            path.push(0);
            let rest = collect_sb(sig, ctx, s, path, out);
            path.pop();
            path.push(1);
            let ty = collect_tm(sig, ctx, t, path, out);
            path.pop();
            rest?.extended(ty?)
        }
        Sb::Comp(x, s) => {
            path.push(1);
            let mid = collect_sb(sig, ctx, s, path, out);
            path.pop();
            path.push(0);
            let cod = collect_sb(sig, &mid?, x, path, out);
            path.pop();
            cod?
        }
    };
    out.push(Site {
        path: path.clone(),
        ctx: ctx.clone(),
        kind: Kind::Sb(cod.clone()),
    });
    Some(cod)
}

enum Place<'a> {
    Tm(&'a mut Tm),
    Sb(&'a mut Sb),
}

fn place_tm<'a>(t: &'a mut Tm, path: &[usize]) -> Place<'a> {
    let Some((&ix, rest)) = path.split_first() else {
        return Place::Tm(t);
    };
    match (t, ix) {
        (Tm::Sub(u, _), 0) => place_tm(u, rest),
        (Tm::Sub(_, d), 1) => place_sb(d, rest),
        (Tm::Lam(_, b), 0) | (Tm::Fst(b), 0) | (Tm::Snd(b), 0) => place_tm(b, rest),
        (Tm::App(a, _), 0) | (Tm::Pair(a, _), 0) => place_tm(a, rest),
        (Tm::App(_, b), 1) | (Tm::Pair(_, b), 1) => place_tm(b, rest),
        (t, ix) => unreachable!("no child {ix} in {t}"),
    }
}

fn place_sb<'a>(d: &'a mut Sb, path: &[usize]) -> Place<'a> {
    let Some((&ix, rest)) = path.split_first() else {
        return Place::Sb(d);
    };
    match (d, ix) {
        (Sb::Ext(s, _), 0) | (Sb::Comp(s, _), 0) => place_sb(s, rest),
        (Sb::Ext(_, t), 1) => place_tm(t, rest),
        (Sb::Comp(_, s), 1) => place_sb(s, rest),
        (d, ix) => unreachable!("no child {ix} in {d}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_eq;
    use crate::signature::{parse_ctx, parse_signature, tests::SIG0};
    use crate::syntax::parse_tm;

    #[test]
    fn zero_steps_is_identity() {
        let sig = parse_signature(SIG0).unwrap();
        let t = parse_tm("(lam a (sub (op f) (ext p v)))").unwrap();
        for seed in 0..5 {
            assert_eq!(perturb(seed, &sig, &Ctx::empty(), &t, 0).unwrap(), t);
        }
    }

    #[test]
    fn forced_identity_insertion() {
        let sig = parse_signature(SIG0).unwrap();
        let ctx = parse_ctx("(a)").unwrap();
        for seed in 0..5 {
            let got = perturb_with(seed, &sig, &ctx, &Tm::Var, 1, &[PerturbRule::InsertIdentity]).unwrap();
            assert_eq!(got, Tm::sub(Tm::Var, Sb::Id));
        }
    }

    #[test]
    fn no_applicable_rule_is_identity() {
        let sig = parse_signature(SIG0).unwrap();
        let ctx = parse_ctx("(a)").unwrap();
        let got = perturb_with(3, &sig, &ctx, &Tm::Var, 2, &[PerturbRule::BetaReduce]).unwrap();
        assert_eq!(got, Tm::Var);
    }

    #[test]
    fn every_rule_preserves_typing_and_equality() {
        let sig = parse_signature(SIG0).unwrap();
        let ctx = parse_ctx("((arr a a) (prod a b))").unwrap();
        let terms = [
            "(app (ix 1) (fst v))",
            "(lam a (sub (op h) (ext (ext (comp p (comp p p)) v) (snd (ix 1)))))",
            "(pair (fst v) (snd v))",
            "(lam a (app (sub (ix 1) p) v))",
            "(sub (app (lam a v) (fst v)) (ext (comp id p) (sub v id)))",
        ];
        for rule in PerturbRule::ALL {
            for src in terms {
                let t = parse_tm(src).unwrap();
                for seed in 0..8 {
                    let p = perturb_with(seed, &sig, &ctx, &t, 3, &[rule]).unwrap();
                    assert_eq!(infer_tm(&sig, &ctx, &p), infer_tm(&sig, &ctx, &t), "{rule:?} {src} -> {p}");
                    assert!(oracle_eq(&sig, &ctx, &p, &t).unwrap(), "{rule:?} {src} -> {p}");
                }
            }
        }
    }

    #[test]
    fn seeds_are_deterministic() {
        let sig = parse_signature(SIG0).unwrap();
        let ctx = parse_ctx("(a b)").unwrap();
        let t = parse_tm("(sub (op h) (ext (ext (comp p p) (ix 1)) v))").unwrap();
        let a = perturb(42, &sig, &ctx, &t, 3).unwrap();
        let b = perturb(42, &sig, &ctx, &t, 3).unwrap();
        assert_eq!(a, b);
    }
}
