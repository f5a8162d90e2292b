//! The category of renamings: context morphisms built only from variables.
//!
//! A renaming `r : dom → cod` is a vector with one De Bruijn index into
//! `dom` per entry of `cod`. It acts on anything living in `cod` and moves
//! it to `dom`.

use crate::error::TypeError;
use crate::normal::{Ne, NeSb, Nf, NfSb};
use crate::signature::{Ctx, Ty};
use crate::syntax::{as_proj_pow, as_var_ix, proj_pow, var_ix, Sb, Tm};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ren {
    dom: Ctx,
    cod: Ctx,
    map: Vec<usize>,
}

impl Ren {
    /// Build a renaming, checking that every entry is in range and
    /// type-preserving.
    pub fn new(dom: Ctx, cod: Ctx, map: Vec<usize>) -> Result<Ren, TypeError> {
        if map.len() != cod.len() {
            return Err(TypeError::Mismatch {
                left: format!("{} indices", map.len()),
                right: format!("codomain {cod}"),
            });
        }
        for (ty, &k) in cod.iter().zip(&map) {
            match dom.lookup(k) {
                Some(found) if found == ty => {}
                Some(found) => {
                    return Err(TypeError::Mismatch {
                        left: format!("index {k} : {found}"),
                        right: ty.to_string(),
                    })
                }
                None => {
                    return Err(TypeError::Mismatch {
                        left: format!("index {k}"),
                        right: format!("domain {dom}"),
                    })
                }
            }
        }
        Ok(Ren { dom, cod, map })
    }

    pub fn dom(&self) -> &Ctx {
        &self.dom
    }

    pub fn cod(&self) -> &Ctx {
        &self.cod
    }

    /// `map[j]` is the index in `dom` realizing `cod`'s entry `j`.
    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// Where index `k` of the codomain goes.
    pub fn apply_ix(&self, k: usize) -> usize {
        self.map[self.map.len() - k - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.dom == self.cod && self.map.iter().enumerate().all(|(j, &k)| k == self.map.len() - 1 - j)
    }

    /// If this renaming is `p^k` (drops the `k` newest entries), return `k`.
    pub fn as_weakening(&self) -> Option<usize> {
        let k = self.dom.len().checked_sub(self.cod.len())?;
        let n = self.cod.len();
        self.map
            .iter()
            .enumerate()
            .all(|(j, &ix)| ix == n - 1 - j + k)
            .then_some(k)
    }

    /// `r : Γ → Δ` becomes `Γ,σ → Δ,σ`.
    pub fn lift(&self, ty: &Ty) -> Ren {
        let mut map: Vec<usize> = self.map.iter().map(|k| k + 1).collect();
        map.push(0);
        Ren {
            dom: self.dom.extended(ty.clone()),
            cod: self.cod.extended(ty.clone()),
            map,
        }
    }

    /// Postcompose with `p^k`, dropping the `k` newest codomain entries.
    pub fn drop_newest(&self, k: usize) -> Ren {
        let keep = self.map.len() - k;
        Ren {
            dom: self.dom.clone(),
            cod: self.cod.entries()[..keep].iter().cloned().collect(),
            map: self.map[..keep].to_vec(),
        }
    }

    /// The shortest substitution denoting this renaming: `p^k` for a
    /// weakening, otherwise an `Ext` chain that stops at the longest
    /// weakening prefix.
    pub fn to_short_sub(&self) -> Sb {
        if let Some(k) = self.as_weakening() {
            return proj_pow(k);
        }
        let last = *self.map.last().expect("empty renamings are weakenings");
        Sb::ext(self.drop_newest(1).to_short_sub(), var_ix(last))
    }
}

pub fn ren_id(ctx: &Ctx) -> Ren {
    let n = ctx.len();
    Ren {
        dom: ctx.clone(),
        cod: ctx.clone(),
        map: (0..n).map(|j| n - 1 - j).collect(),
    }
}

/// `ctx,ty → ctx`, shifting every index up by one.
pub fn ren_weaken(ctx: &Ctx, ty: &Ty) -> Ren {
    let n = ctx.len();
    Ren {
        dom: ctx.extended(ty.clone()),
        cod: ctx.clone(),
        map: (0..n).map(|j| n - j).collect(),
    }
}

/// `outer ∘ inner`: first `inner : Γ → Δ`, then `outer : Δ → Ξ`.
pub fn ren_comp(outer: &Ren, inner: &Ren) -> Result<Ren, TypeError> {
    if inner.cod != outer.dom {
        return Err(TypeError::Mismatch {
            left: inner.cod.to_string(),
            right: outer.dom.to_string(),
        });
    }
    Ok(Ren {
        dom: inner.dom.clone(),
        cod: outer.cod.clone(),
        map: outer.map.iter().map(|&k| inner.apply_ix(k)).collect(),
    })
}

/// The inclusion of renamings into substitutions: an `Ext` chain of
/// variables rooted at `p^|dom|`.
pub fn ren_to_sub(r: &Ren) -> Sb {
    r.map
        .iter()
        .fold(proj_pow(r.dom.len()), |acc, &k| Sb::ext(acc, var_ix(k)))
}

/// Rename a raw term living in `r.cod()`.
///
/// Variables `Var[p^k]` are relabeled directly. The other context-dependent
/// leaves (`Id`, `p^k`, bare operations) are replaced by the shortest
/// substitution denoting their composite with `r`. Only the substitution part
/// of an explicit substitution node is visited.
pub fn rename_tm(r: &Ren, t: &Tm) -> Tm {
    if r.is_identity() {
        t.clone()
    } else {
        rename_tm_in(r, t)
    }
}

pub fn rename_sb(r: &Ren, d: &Sb) -> Sb {
    if r.is_identity() {
        d.clone()
    } else {
        rename_sb_in(r, d)
    }
}

fn rename_tm_in(r: &Ren, t: &Tm) -> Tm {
    if let Some(k) = as_var_ix(t) {
        return var_ix(r.apply_ix(k));
    }
    match t {
        Tm::Var => unreachable!("handled as index 0"),
        Tm::Op(_) => match r.to_short_sub() {
            Sb::Id => t.clone(),
            d => Tm::sub(t.clone(), d),
        },
        Tm::Sub(body, d) => Tm::sub((**body).clone(), rename_sb_in(r, d)),
        Tm::Lam(dom, body) => Tm::lam(dom.clone(), rename_tm_in(&r.lift(dom), body)),
        Tm::App(f, a) => Tm::app(rename_tm_in(r, f), rename_tm_in(r, a)),
        Tm::Pair(a, b) => Tm::pair(rename_tm_in(r, a), rename_tm_in(r, b)),
        Tm::Fst(p) => Tm::fst(rename_tm_in(r, p)),
        Tm::Snd(p) => Tm::snd(rename_tm_in(r, p)),
    }
}

fn rename_sb_in(r: &Ren, d: &Sb) -> Sb {
    if let Some(k) = as_proj_pow(d) {
        return r.drop_newest(k).to_short_sub();
    }
    match d {
        Sb::Id | Sb::Proj => unreachable!("handled as p^0 and p^1"),
        Sb::Ext(d, t) => Sb::ext(rename_sb_in(r, d), rename_tm_in(r, t)),
        // the outer substitution lives in the inner one's codomain
        Sb::Comp(outer, inner) => Sb::comp((**outer).clone(), rename_sb_in(r, inner)),
    }
}

pub fn rename_ne(r: &Ren, n: &Ne) -> Ne {
    match n {
        Ne::Var(k) => Ne::Var(r.apply_ix(*k)),
        Ne::Op(name, args) => Ne::Op(name.clone(), rename_nfsb(r, args)),
        Ne::App(f, a) => Ne::App(Box::new(rename_ne(r, f)), Box::new(rename_nf(r, a))),
        Ne::Fst(p) => Ne::Fst(Box::new(rename_ne(r, p))),
        Ne::Snd(p) => Ne::Snd(Box::new(rename_ne(r, p))),
    }
}

pub fn rename_nf(r: &Ren, n: &Nf) -> Nf {
    match n {
        Nf::Shift(ne) => Nf::Shift(rename_ne(r, ne)),
        Nf::Lam(dom, body) => Nf::Lam(dom.clone(), Box::new(rename_nf(&r.lift(dom), body))),
        Nf::Pair(a, b) => Nf::Pair(Box::new(rename_nf(r, a)), Box::new(rename_nf(r, b))),
    }
}

pub fn rename_nfsb(r: &Ren, s: &NfSb) -> NfSb {
    NfSb {
        dom: r.dom.clone(),
        entries: s.entries.iter().map(|n| rename_nf(r, n)).collect(),
    }
}

pub fn rename_nesb(r: &Ren, s: &NeSb) -> NeSb {
    NeSb {
        dom: r.dom.clone(),
        entries: s.entries.iter().map(|n| rename_ne(r, n)).collect(),
    }
}
