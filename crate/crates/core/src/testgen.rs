//! Deterministic random generation of well-typed types, contexts, terms,
//! neutrals, normal forms and renamings.
//!
//! Randomness comes from splitmix64 seeded with [`GenConfig::seed`], so a
//! seed fixes every output on every platform.
//!
//! Terms are generated top-down against a target type and a node budget.
//! Candidate productions are tried in a weighted random order with
//! backtracking. An inhabitation check runs before any search, so
//! requests for uninhabited types fail fast with [`Uninhabited`].

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use thiserror::Error;

use crate::normal::{Ne, Nf, NfSb};
use crate::renaming::Ren;
use crate::signature::{Arity, Ctx, Name, Signature, Ty};
use crate::syntax::{proj_pow, var_ix, Sb, Tm};

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub seed: u64,
    /// Upper bound on [`Tm::size`] of generated terms.
    pub max_size: usize,
    /// Upper bound on [`Ty::depth`] of generated types.
    pub max_depth: usize,
    pub signature: Signature,
    /// Upper bound on the length of generated contexts.
    pub max_ctx_len: usize,
}

impl GenConfig {
    pub fn new(signature: Signature, seed: u64) -> GenConfig {
        GenConfig {
            seed,
            max_size: 30,
            max_depth: 3,
            signature,
            max_ctx_len: 4,
        }
    }
}

/// No term of the requested type fits the budget, or none exists at all.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("uninhabited: no term of type {ty} in context {ctx} within size {size}")]
pub struct Uninhabited {
    pub ctx: Ctx,
    pub ty: Ty,
    pub size: usize,
}

/// Cap on search nodes per request, so tight budgets fail instead of
/// searching exhaustively.
const WORK: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Elim {
    App(Ty),
    Fst,
    Snd,
}

#[derive(Clone, Debug)]
enum Head {
    Var(usize),
    Op(Name),
}

#[derive(Clone, Debug)]
enum Rule {
    Intro,
    Spine(Head, Vec<Elim>),
    Beta,
    FstRedex,
    SndRedex,
    Weaken,
    Instantiate,
    Subst,
}

pub struct Gen {
    cfg: GenConfig,
    rng: SplitMix64,
    inhabited: HashMap<(BTreeSet<Ty>, Ty), bool>,
    work: usize,
}

impl Gen {
    pub fn new(cfg: GenConfig) -> Gen {
        let rng = SplitMix64::seed_from_u64(cfg.seed);
        Gen {
            cfg,
            rng,
            inhabited: HashMap::new(),
            work: 0,
        }
    }

    pub fn config(&self) -> &GenConfig {
        &self.cfg
    }

    pub fn signature(&self) -> &Signature {
        &self.cfg.signature
    }

    /// A fresh 64-bit value from the stream, for seeding other generators.
    pub fn next_seed(&mut self) -> u64 {
        self.rng.random()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn gen_ty(&mut self, depth: usize) -> Ty {
        let sorts: Vec<Name> = self.cfg.signature.sorts().cloned().collect();
        assert!(!sorts.is_empty(), "the signature has no sorts");
        self.ty_with(&sorts, depth)
    }

    fn ty_with(&mut self, sorts: &[Name], depth: usize) -> Ty {
        let pick = if depth <= 1 { 0 } else { self.rng.random_range(0..4) };
        match pick {
            2 => Ty::Prod(self.ty_with(sorts, depth - 1).into(), self.ty_with(sorts, depth - 1).into()),
            3 => Ty::Arrow(self.ty_with(sorts, depth - 1).into(), self.ty_with(sorts, depth - 1).into()),
            _ => Ty::Atom(sorts.choose(&mut self.rng).expect("nonempty").clone()),
        }
    }

    pub fn gen_ctx(&mut self) -> Ctx {
        let len = self.rng.random_range(0..=self.cfg.max_ctx_len);
        (0..len).map(|_| self.gen_ty(self.cfg.max_depth)).collect()
    }

    /// A term of type `ty` in `ctx` of size at most `max_size`.
    pub fn gen_tm(&mut self, ctx: &Ctx, ty: &Ty) -> Result<Tm, Uninhabited> {
        self.gen_tm_sized(ctx, ty, self.cfg.max_size)
    }

    pub fn gen_tm_sized(&mut self, ctx: &Ctx, ty: &Ty, size: usize) -> Result<Tm, Uninhabited> {
        self.work = 0;
        self.tm(ctx, ty, size).ok_or_else(|| Uninhabited {
            ctx: ctx.clone(),
            ty: ty.clone(),
            size,
        })
    }

    /// A random context, type and term, retrying until the type is
    /// inhabited.
    pub fn gen_typed_tm(&mut self) -> (Ctx, Ty, Tm) {
        loop {
            let ctx = self.gen_ctx();
            let ty = self.gen_ty(self.cfg.max_depth);
            if let Ok(t) = self.gen_tm(&ctx, &ty) {
                return (ctx, ty, t);
            }
        }
    }

    /// A neutral in `ctx` together with its type. The spine stops at a
    /// random point, so the type need not be atomic.
    pub fn gen_ne(&mut self, ctx: &Ctx) -> Result<(Ne, Ty), Uninhabited> {
        self.work = 0;
        let size = self.cfg.max_size;
        let fail = || Uninhabited {
            ctx: ctx.clone(),
            ty: Ty::atom("?"),
            size,
        };
        let mut heads: Vec<(Head, Ty)> = (0..ctx.len())
            .map(|k| (Head::Var(k), ctx.lookup(k).expect("in range").clone()))
            .collect();
        for (name, arity) in self.op_list() {
            if arity.args.iter().all(|a| self.inhabited_in(ctx, a)) {
                heads.push((Head::Op(name), arity.result));
            }
        }
        heads.shuffle(&mut self.rng);
        for (head, head_ty) in heads {
            let mut elims = Vec::new();
            let mut ty = head_ty;
            let len = self.rng.random_range(0..=3);
            for _ in 0..len {
                let next = match &ty {
                    Ty::Arrow(d, c) if self.inhabited_in(ctx, d) => (Elim::App((**d).clone()), (**c).clone()),
                    Ty::Prod(l, r) => {
                        if self.rng.random_bool(0.5) {
                            (Elim::Fst, (**l).clone())
                        } else {
                            (Elim::Snd, (**r).clone())
                        }
                    }
                    _ => break,
                };
                elims.push(next.0);
                ty = next.1;
            }
            if let Some(n) = self.ne_spine(ctx, &head, &elims, size) {
                return Ok((n, ty));
            }
        }
        Err(fail())
    }

    /// An η-long normal form of type `ty` in `ctx`.
    pub fn gen_nf(&mut self, ctx: &Ctx, ty: &Ty) -> Result<Nf, Uninhabited> {
        self.work = 0;
        let size = self.cfg.max_size;
        self.nf(ctx, ty, size).ok_or_else(|| Uninhabited {
            ctx: ctx.clone(),
            ty: ty.clone(),
            size,
        })
    }

    /// A renaming into `cod` from a fresh domain that permutes, duplicates
    /// and contracts `cod`'s entries and adds unused ones.
    pub fn gen_ren(&mut self, cod: &Ctx) -> Ren {
        // each slot of the domain, in creation order
        let mut slots: Vec<Ty> = Vec::new();
        let mut assign = vec![0; cod.len()];
        let mut order: Vec<usize> = (0..cod.len()).collect();
        order.shuffle(&mut self.rng);
        for j in order {
            let ty = &cod.entries()[j];
            let reuse: Vec<usize> = (0..slots.len()).filter(|&s| slots[s] == *ty).collect();
            assign[j] = match reuse.choose(&mut self.rng) {
                Some(&s) if self.rng.random_bool(0.3) => s,
                _ => {
                    slots.push(ty.clone());
                    slots.len() - 1
                }
            };
        }
        for _ in 0..self.rng.random_range(0..=2) {
            let ty = self.gen_ty(self.cfg.max_depth);
            slots.push(ty);
        }
        let mut perm: Vec<usize> = (0..slots.len()).collect();
        perm.shuffle(&mut self.rng);
        // perm[pos] is the slot stored at position pos of the domain
        let mut pos_of = vec![0; slots.len()];
        for (pos, &s) in perm.iter().enumerate() {
            pos_of[s] = pos;
        }
        let dom: Ctx = perm.iter().map(|&s| slots[s].clone()).collect();
        let map = assign.iter().map(|&s| dom.len() - 1 - pos_of[s]).collect();
        Ren::new(dom, cod.clone(), map).expect("generated renamings are well-typed")
    }

    /// A substitution `ctx → cod`, or `None` if some entry of `cod` is
    /// uninhabited in `ctx` or the budget is too small.
    pub fn gen_sb(&mut self, ctx: &Ctx, cod: &Ctx) -> Option<Sb> {
        self.work = 0;
        self.sb(ctx, cod, self.cfg.max_size)
    }

    // Inhabitation.

    /// Whether some term of `ty` exists in `ctx`, ignoring size.
    pub fn inhabited_in(&mut self, ctx: &Ctx, ty: &Ty) -> bool {
        let hyps: BTreeSet<Ty> = ctx.iter().cloned().collect();
        let key = (hyps, ty.clone());
        if let Some(&known) = self.inhabited.get(&key) {
            return known;
        }
        let answer = self.prove(&key.0, ty, &mut HashSet::new());
        self.inhabited.insert(key, answer);
        answer
    }

    fn prove(&mut self, hyps: &BTreeSet<Ty>, goal: &Ty, seen: &mut HashSet<(BTreeSet<Ty>, Ty)>) -> bool {
        match goal {
            Ty::Arrow(d, c) => {
                let mut more = hyps.clone();
                more.insert((**d).clone());
                self.prove(&more, c, seen)
            }
            Ty::Prod(l, r) => self.prove(hyps, l, seen) && self.prove(hyps, r, seen),
            Ty::Atom(_) => {
                let key = (hyps.clone(), goal.clone());
                if let Some(&known) = self.inhabited.get(&key) {
                    return known;
                }
                if !seen.insert(key.clone()) {
                    return false;
                }
                let mut sources: Vec<(Vec<Ty>, Ty)> = hyps.iter().map(|h| (vec![], h.clone())).collect();
                sources.extend(self.op_list().into_iter().map(|(_, ar)| (ar.args.entries().to_vec(), ar.result)));
                let found = sources.iter().any(|(pre, src)| {
                    pre.iter().all(|a| self.prove(hyps, a, seen))
                        && spines(src, goal).iter().any(|path| {
                            path.iter().all(|e| match e {
                                Elim::App(d) => self.prove(hyps, d, seen),
                                _ => true,
                            })
                        })
                });
                seen.remove(&key);
                if found {
                    self.inhabited.insert(key, true);
                }
                found
            }
        }
    }

    fn op_list(&self) -> Vec<(Name, Arity)> {
        self.cfg.signature.ops().map(|(n, a)| (n.clone(), a.clone())).collect()
    }

    // Terms.

    fn tm(&mut self, ctx: &Ctx, ty: &Ty, budget: usize) -> Option<Tm> {
        self.work += 1;
        if budget == 0 || self.work > WORK || !self.inhabited_in(ctx, ty) {
            return None;
        }
        let mut rules: Vec<(Rule, u32)> = vec![
            (Rule::Intro, if ty.is_atom() { 0 } else { 6 }),
            (Rule::Beta, 1),
            (Rule::FstRedex, 1),
            (Rule::SndRedex, 1),
            (Rule::Weaken, if ctx.is_empty() { 0 } else { 1 }),
            (Rule::Instantiate, 1),
            (Rule::Subst, 1),
        ];
        for k in 0..ctx.len() {
            let src = ctx.lookup(k).expect("in range").clone();
            for path in spines(&src, ty) {
                rules.push((Rule::Spine(Head::Var(k), path), 4));
            }
        }
        for (name, arity) in self.op_list() {
            for path in spines(&arity.result, ty) {
                rules.push((Rule::Spine(Head::Op(name.clone()), path), 3));
            }
        }
        while !rules.is_empty() {
            let total: u32 = rules.iter().map(|r| r.1).sum();
            if total == 0 {
                break;
            }
            let mut pick = self.rng.random_range(0..total);
            let ix = rules
                .iter()
                .position(|(_, w)| {
                    if pick < *w {
                        true
                    } else {
                        pick -= w;
                        false
                    }
                })
                .expect("pick is below the total weight");
            let (rule, _) = rules.swap_remove(ix);
            if let Some(t) = self.apply_rule(ctx, ty, budget, rule) {
                return Some(t);
            }
            if self.work > WORK {
                return None;
            }
        }
        None
    }

    fn apply_rule(&mut self, ctx: &Ctx, ty: &Ty, budget: usize, rule: Rule) -> Option<Tm> {
        match rule {
            Rule::Intro => match ty {
                Ty::Arrow(d, c) => Some(Tm::lam((**d).clone(), self.tm(&ctx.extended((**d).clone()), c, budget - 1)?)),
                Ty::Prod(l, r) => {
                    let [a, b] = self.split(budget.checked_sub(1)?)?;
                    Some(Tm::pair(self.tm(ctx, l, a)?, self.tm(ctx, r, b)?))
                }
                Ty::Atom(_) => None,
            },
            Rule::Spine(head, path) => self.tm_spine(ctx, &head, &path, budget),
            Rule::Beta => {
                let sigma = self.side_ty(ctx)?;
                let [b, s] = self.split(budget.checked_sub(2)?)?;
                let body = self.tm(&ctx.extended(sigma.clone()), ty, b)?;
                Some(Tm::app(Tm::lam(sigma.clone(), body), self.tm(ctx, &sigma, s)?))
            }
            Rule::FstRedex | Rule::SndRedex => {
                let sigma = self.side_ty(ctx)?;
                let [a, b] = self.split(budget.checked_sub(2)?)?;
                let main = self.tm(ctx, ty, a)?;
                let junk = self.tm(ctx, &sigma, b)?;
                Some(match rule {
                    Rule::FstRedex => Tm::fst(Tm::pair(main, junk)),
                    _ => Tm::snd(Tm::pair(junk, main)),
                })
            }
            Rule::Weaken => {
                let init = ctx.init()?;
                Some(Tm::sub(self.tm(&init, ty, budget.checked_sub(2)?)?, Sb::Proj))
            }
            Rule::Instantiate => {
                let sigma = self.side_ty(ctx)?;
                let [u, s] = self.split(budget.checked_sub(3)?)?;
                let body = self.tm(&ctx.extended(sigma.clone()), ty, u)?;
                Some(Tm::sub(body, Sb::ext(Sb::Id, self.tm(ctx, &sigma, s)?)))
            }
            Rule::Subst => {
                let cod = self.side_ctx(ctx)?;
                let [u, d] = self.split(budget.checked_sub(1)?)?;
                let body = self.tm(&cod, ty, u)?;
                Some(Tm::sub(body, self.sb(ctx, &cod, d)?))
            }
        }
    }

    /// A type for a β-redex argument or discarded component: usually one
    /// already in scope.
    fn side_ty(&mut self, ctx: &Ctx) -> Option<Ty> {
        let ty = match ctx.entries().choose(&mut self.rng) {
            Some(t) if self.rng.random_bool(0.6) => t.clone(),
            _ => self.gen_ty(self.cfg.max_depth.min(2)),
        };
        self.inhabited_in(ctx, &ty).then_some(ty)
    }

    /// A codomain for an explicit substitution out of `ctx`.
    fn side_ctx(&mut self, ctx: &Ctx) -> Option<Ctx> {
        let mut cod = ctx.clone();
        match self.rng.random_range(0..4) {
            0 => {
                cod.pop()?;
            }
            1 => cod.push(self.side_ty(ctx)?),
            2 if ctx.len() >= 2 => {
                let last = cod.pop()?;
                let prev = cod.pop()?;
                cod.push(last);
                cod.push(prev);
            }
            _ => {}
        }
        Some(cod)
    }

    fn sb(&mut self, ctx: &Ctx, cod: &Ctx, budget: usize) -> Option<Sb> {
        self.work += 1;
        if budget == 0 || self.work > WORK {
            return None;
        }
        let mut options = vec![0, 1, 2, 3];
        options.shuffle(&mut self.rng);
        for opt in options {
            let found = match opt {
                0 if ctx == cod => Some(Sb::Id),
                1 if ctx.init().as_ref() == Some(cod) => Some(Sb::Proj),
                2 if !cod.is_empty() => (|| {
                    let [d, t] = self.split(budget.checked_sub(1)?)?;
                    let rest = self.sb(ctx, &cod.init()?, d)?;
                    Some(Sb::ext(rest, self.tm(ctx, cod.last()?, t)?))
                })(),
                3 => (|| {
                    let mid = self.side_ctx(ctx)?;
                    if mid == *ctx {
                        return None;
                    }
                    let [x, d] = self.split(budget.checked_sub(1)?)?;
                    let inner = self.sb(ctx, &mid, d)?;
                    Some(Sb::comp(self.sb(&mid, cod, x)?, inner))
                })(),
                _ => None,
            };
            if found.is_some() {
                return found;
            }
        }
        // the empty substitution always exists
        (cod.is_empty() && 2 * ctx.len() <= budget + 1).then(|| proj_pow(ctx.len()))
    }

    fn tm_spine(&mut self, ctx: &Ctx, head: &Head, path: &[Elim], budget: usize) -> Option<Tm> {
        let n_args = path.iter().filter(|e| matches!(e, Elim::App(_))).count();
        let mut t = match head {
            Head::Var(k) => var_ix(*k),
            Head::Op(name) => {
                let arity = self.cfg.signature.lookup_op(name).ok()?.clone();
                if arity.args == *ctx && self.rng.random_bool(0.5) {
                    Tm::Op(name.clone())
                } else {
                    let mut args = proj_pow(ctx.len());
                    let fixed = 2 + args.size() + arity.args.len() + path.len();
                    let shares = self.split_n(budget.checked_sub(fixed)?, arity.args.len() + n_args)?;
                    for (ty, share) in arity.args.iter().zip(shares) {
                        args = Sb::ext(args, self.tm(ctx, ty, share)?);
                    }
                    Tm::sub(Tm::Op(name.clone()), args)
                }
            }
        };
        let rest = budget.checked_sub(t.size() + path.len())?;
        let mut shares = self.split_n(rest, n_args)?.into_iter();
        for e in path {
            t = match e {
                Elim::App(d) => Tm::app(t, self.tm(ctx, d, shares.next()?)?),
                Elim::Fst => Tm::fst(t),
                Elim::Snd => Tm::snd(t),
            };
        }
        Some(t)
    }

    // Normal forms.

    fn nf(&mut self, ctx: &Ctx, ty: &Ty, budget: usize) -> Option<Nf> {
        self.work += 1;
        if budget == 0 || self.work > WORK || !self.inhabited_in(ctx, ty) {
            return None;
        }
        match ty {
            Ty::Arrow(d, c) => Some(Nf::lam((**d).clone(), self.nf(&ctx.extended((**d).clone()), c, budget - 1)?)),
            Ty::Prod(l, r) => {
                let [a, b] = self.split(budget.checked_sub(1)?)?;
                Some(Nf::pair(self.nf(ctx, l, a)?, self.nf(ctx, r, b)?))
            }
            Ty::Atom(_) => {
                let mut heads: Vec<(Head, Vec<Elim>)> = Vec::new();
                for k in 0..ctx.len() {
                    for path in spines(ctx.lookup(k).expect("in range"), ty) {
                        heads.push((Head::Var(k), path));
                    }
                }
                for (name, arity) in self.op_list() {
                    for path in spines(&arity.result, ty) {
                        heads.push((Head::Op(name.clone()), path));
                    }
                }
                heads.shuffle(&mut self.rng);
                for (head, path) in heads {
                    if let Some(n) = self.ne_spine(ctx, &head, &path, budget) {
                        return Some(Nf::Shift(n));
                    }
                    if self.work > WORK {
                        return None;
                    }
                }
                None
            }
        }
    }

    fn ne_spine(&mut self, ctx: &Ctx, head: &Head, path: &[Elim], budget: usize) -> Option<Ne> {
        let n_args = path.iter().filter(|e| matches!(e, Elim::App(_))).count();
        let mut n = match head {
            Head::Var(k) => Ne::Var(*k),
            Head::Op(name) => {
                let arity = self.cfg.signature.lookup_op(name).ok()?.clone();
                let shares = self.split_n(budget.checked_sub(1 + path.len())?, arity.args.len() + n_args)?;
                let mut entries = Vec::new();
                for (ty, share) in arity.args.iter().zip(shares) {
                    entries.push(self.nf(ctx, ty, share)?);
                }
                Ne::Op(
                    name.clone(),
                    NfSb {
                        dom: ctx.clone(),
                        entries,
                    },
                )
            }
        };
        let rest = budget.checked_sub(n.size() + path.len())?;
        let mut shares = self.split_n(rest, n_args)?.into_iter();
        for e in path {
            n = match e {
                Elim::App(d) => n.app(self.nf(ctx, d, shares.next()?)?),
                Elim::Fst => n.fst(),
                Elim::Snd => n.snd(),
            };
        }
        Some(n)
    }

    // Budgets.

    fn split(&mut self, total: usize) -> Option<[usize; 2]> {
        let v = self.split_n(total, 2)?;
        Some([v[0], v[1]])
    }

    /// Split `total` into `n` random positive parts.
    fn split_n(&mut self, total: usize, n: usize) -> Option<Vec<usize>> {
        if n == 0 {
            return Some(vec![]);
        }
        if total < n {
            return None;
        }
        let mut cuts: Vec<usize> = (0..n - 1).map(|_| self.rng.random_range(1..total)).collect();
        cuts.sort_unstable();
        let mut parts = Vec::with_capacity(n);
        let mut prev = 0;
        for c in cuts.into_iter().chain([total]) {
            parts.push(c - prev);
            prev = c;
        }
        // equal cuts give empty parts; move one unit from the largest
        while let Some(z) = parts.iter().position(|&p| p == 0) {
            let big = (0..n).max_by_key(|&i| parts[i]).expect("n > 0");
            parts[big] -= 1;
            parts[z] += 1;
        }
        Some(parts)
    }
}

/// Every elimination path from `src` to `target`.
fn spines(src: &Ty, target: &Ty) -> Vec<Vec<Elim>> {
    let mut out = Vec::new();
    if src == target {
        out.push(vec![]);
    }
    let mut prefixed = |first: Elim, rest: &Ty| {
        for mut p in spines(rest, target) {
            p.insert(0, first.clone());
            out.push(p);
        }
    };
    match src {
        Ty::Arrow(d, c) => prefixed(Elim::App((**d).clone()), c),
        Ty::Prod(l, r) => {
            prefixed(Elim::Fst, l);
            prefixed(Elim::Snd, r);
        }
        Ty::Atom(_) => {}
    }
    out
}
