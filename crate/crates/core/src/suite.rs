//! The property suites: the normalizer checked against the oracle, the
//! typing judgments and its own laws on a random corpus.
//!
//! A run is a pure function of its [`SuiteConfig`]; the summary contains no
//! timings, so equal configurations print byte-identical summaries.

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::error::NormError;
use crate::nbe::{eval_identity, nf_typed, reflect, reify, Val};
use crate::normal::{check_nf, readback_ne, readback_nf, Nf};
use crate::oracle::{naive_nf, oracle_eq, perturb};
use crate::renaming::{rename_nf, rename_tm};
use crate::signature::{Ctx, Signature, Ty};
use crate::syntax::Tm;
use crate::testgen::{Gen, GenConfig};

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub signature: Signature,
    pub seed: u64,
    /// Corpus size. The pair-based properties use as many pairs, the
    /// neutral and renaming properties half as many, and the glued-term
    /// property three tenths.
    pub count: usize,
    pub max_size: usize,
    pub max_depth: usize,
}

impl SuiteConfig {
    pub fn new(signature: Signature, seed: u64) -> SuiteConfig {
        SuiteConfig {
            signature,
            seed,
            count: 1000,
            max_size: 30,
            max_depth: 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Property {
    NfMembership,
    OracleAgreement,
    Normalization,
    Completeness,
    Soundness,
    ReifyReflect,
    Naturality,
    GluedSyntax,
    Idempotence,
}

impl Property {
    pub const ALL: [Property; 9] = [
        Property::NfMembership,
        Property::OracleAgreement,
        Property::Normalization,
        Property::Completeness,
        Property::Soundness,
        Property::ReifyReflect,
        Property::Naturality,
        Property::GluedSyntax,
        Property::Idempotence,
    ];

    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Property::NfMembership => "nf-membership",
            Property::OracleAgreement => "oracle-agreement",
            Property::Normalization => "normalization",
            Property::Completeness => "completeness",
            Property::Soundness => "soundness",
            Property::ReifyReflect => "reify-reflect",
            Property::Naturality => "naturality",
            Property::GluedSyntax => "glued-syntax",
            Property::Idempotence => "idempotence",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Property::NfMembership => "nf(t) checks as a normal form at the type of t",
            Property::OracleAgreement => "readback(nf(t)) is syntactically naive_nf(t)",
            Property::Normalization => "readback(nf(t)) is oracle-equal to t",
            Property::Completeness => "nf(t) = nf(perturb(t)) for up to three rewrites",
            Property::Soundness => "def_eq agrees with oracle_eq on same-type pairs",
            Property::ReifyReflect => "reify(reflect(n)) is oracle-equal to n, and is n at atoms",
            Property::Naturality => "nf(rename(r, t)) = rename(r, nf(t))",
            Property::GluedSyntax => "the syntactic part of an evaluated function is oracle-equal to it",
            Property::Idempotence => "nf(readback(nf(t))) = nf(t)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub property: Property,
    pub trials: usize,
    pub failures: usize,
    /// The first counterexample, if any.
    pub example: Option<String>,
}

impl Outcome {
    fn new(property: Property) -> Outcome {
        Outcome {
            property,
            trials: 0,
            failures: 0,
            example: None,
        }
    }

    fn record(&mut self, result: Result<bool, NormError>, describe: impl FnOnce() -> String) {
        self.trials += 1;
        let failure = match result {
            Ok(true) => return,
            Ok(false) => describe(),
            Err(e) => format!("{}: {e}", describe()),
        };
        self.failures += 1;
        self.example.get_or_insert(failure);
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.trials > 0
    }

    /// Fold another run of the same property into this one.
    pub fn merge(&mut self, other: &Outcome) {
        assert_eq!(self.property, other.property);
        self.trials += other.trials;
        self.failures += other.failures;
        if self.example.is_none() {
            self.example = other.example.clone();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub count: usize,
    pub max_size: usize,
    pub max_depth: usize,
    pub outcomes: Vec<Outcome>,
    /// How many soundness pairs were definitionally equal.
    pub equal_pairs: usize,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(Outcome::passed)
    }

    pub fn outcome(&self, p: Property) -> &Outcome {
        self.outcomes.iter().find(|o| o.property == p).expect("every property is run")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "seed {} count {} max-size {} max-depth {}",
            self.seed, self.count, self.max_size, self.max_depth
        )?;
        for o in &self.outcomes {
            writeln!(
                f,
                "{} {} {:<17} {}/{} passed",
                if o.passed() { "PASS" } else { "FAIL" },
                o.property.number(),
                o.property.name(),
                o.trials - o.failures,
                o.trials
            )?;
            if let Some(e) = &o.example {
                writeln!(f, "    first failure: {e}")?;
            }
        }
        writeln!(f, "soundness pairs equal: {}", self.equal_pairs)?;
        write!(f, "{}", if self.passed() { "all properties hold" } else { "some properties FAILED" })
    }
}

struct Sample {
    ctx: Ctx,
    ty: Ty,
    tm: Tm,
}

fn show(ctx: &Ctx, t: &Tm) -> String {
    let mut s = String::new();
    let _ = write!(s, "{t} in {ctx}");
    s
}

pub fn run(cfg: &SuiteConfig) -> Report {
    let mut gen = Gen::new(GenConfig {
        seed: cfg.seed,
        max_size: cfg.max_size,
        max_depth: cfg.max_depth,
        signature: cfg.signature.clone(),
        max_ctx_len: 4,
    });
    let sig = &cfg.signature;
    let mut out: Vec<Outcome> = Property::ALL.iter().map(|&p| Outcome::new(p)).collect();
    let corpus: Vec<Sample> = (0..cfg.count)
        .map(|_| {
            let (ctx, ty, tm) = gen.gen_typed_tm();
            Sample { ctx, ty, tm }
        })
        .collect();

    // 1, 2, 3, 9 on the whole corpus
    for s in &corpus {
        let normal = nf_typed(sig, &s.ctx, &s.tm);
        let ctx_t = || show(&s.ctx, &s.tm);
        let nf = match normal {
            Ok((n, ty)) if ty == s.ty => n,
            Ok((_, ty)) => {
                for o in [0, 1, 2, 8] {
                    out[o].record(Ok(false), || format!("{} inferred at {ty}", ctx_t()));
                }
                continue;
            }
            Err(e) => {
                for o in [0, 1, 2, 8] {
                    out[o].record(Err(e.clone()), ctx_t);
                }
                continue;
            }
        };
        let rb = readback_nf(&nf);
        out[0].record(Ok(check_nf(sig, &s.ctx, &nf, &s.ty)), ctx_t);
        out[1].record(naive_nf(sig, &s.ctx, &s.tm).map(|n| n == rb), ctx_t);
        out[2].record(oracle_eq(sig, &s.ctx, &rb, &s.tm), ctx_t);
        out[8].record(crate::nbe::nf(sig, &s.ctx, &rb).map(|again| again == nf), ctx_t);
    }

    // 4: perturbed copies of corpus terms
    for s in &corpus {
        let steps = gen.below(4);
        let seed = gen.next_seed();
        let result = perturb(seed, sig, &s.ctx, &s.tm, steps)
            .map_err(NormError::from)
            .and_then(|p| Ok((crate::nbe::nf(sig, &s.ctx, &s.tm)? == crate::nbe::nf(sig, &s.ctx, &p)?, p)));
        let (res, p) = match result {
            Ok((eq, p)) => (Ok(eq), Some(p)),
            Err(e) => (Err(e), None),
        };
        out[3].record(res, || {
            format!(
                "{} perturbed to {}",
                show(&s.ctx, &s.tm),
                p.map(|p| p.to_string()).unwrap_or_default()
            )
        });
    }

    // 5: same-type pairs, a third of them equal by construction
    let mut equal_pairs = 0;
    for (i, s) in corpus.iter().enumerate() {
        let other = match i % 3 {
            0 => {
                let seed = gen.next_seed();
                perturb(seed, sig, &s.ctx, &s.tm, 3).ok()
            }
            1 => gen.gen_nf(&s.ctx, &s.ty).ok().map(|n| readback_nf(&n)),
            _ => gen.gen_tm(&s.ctx, &s.ty).ok(),
        }
        .unwrap_or_else(|| s.tm.clone());
        let verdict = crate::nbe::def_eq(sig, &s.ctx, &s.tm, &other)
            .and_then(|d| Ok((d, oracle_eq(sig, &s.ctx, &s.tm, &other)?)));
        if let Ok((true, _)) = verdict {
            equal_pairs += 1;
        }
        out[4].record(verdict.map(|(d, o)| d == o), || format!("{} versus {other}", show(&s.ctx, &s.tm)));
    }

    // 6: generated neutrals in fresh contexts
    let mut neutrals = 0;
    while neutrals < cfg.count / 2 {
        let ctx = gen.gen_ctx();
        let Ok((n, ty)) = gen.gen_ne(&ctx) else { continue };
        neutrals += 1;
        let reified = reify(sig, &ctx, &ty, &reflect(&ctx, &ty, n.clone()));
        let verdict = reified.and_then(|r| {
            if ty.is_atom() {
                Ok(r == Nf::Shift(n.clone()))
            } else {
                oracle_eq(sig, &ctx, &readback_nf(&r), &readback_ne(&n))
            }
        });
        out[5].record(verdict, || format!("{n} : {ty} in {ctx}"));
    }

    // 7: corpus terms under generated renamings
    for s in corpus.iter().take(cfg.count / 2) {
        let r = gen.gen_ren(&s.ctx);
        let verdict = (|| {
            let before = crate::nbe::nf(sig, &s.ctx, &s.tm)?;
            let after = crate::nbe::nf(sig, r.dom(), &rename_tm(&r, &s.tm))?;
            Ok(after == rename_nf(&r, &before))
        })();
        out[6].record(verdict, || format!("{} renamed by {:?} from {}", show(&s.ctx, &s.tm), r.map(), r.dom()));
    }

    // 8: arrow-typed terms, topped up from the generator if the corpus is short
    let wanted = cfg.count * 3 / 10;
    let mut arrows: Vec<Sample> = Vec::new();
    for s in corpus.iter().filter(|s| matches!(s.ty, Ty::Arrow(..))).take(wanted) {
        arrows.push(Sample {
            ctx: s.ctx.clone(),
            ty: s.ty.clone(),
            tm: s.tm.clone(),
        });
    }
    while arrows.len() < wanted {
        let ctx = gen.gen_ctx();
        let ty = Ty::arrow(gen.gen_ty(cfg.max_depth - 1), gen.gen_ty(cfg.max_depth - 1));
        if let Ok(tm) = gen.gen_tm(&ctx, &ty) {
            arrows.push(Sample { ctx, ty, tm });
        }
    }
    for s in &arrows {
        let verdict = eval_identity(sig, &s.ctx, &s.tm).and_then(|(v, _)| match v {
            Val::Arrow(g) => oracle_eq(sig, &s.ctx, &g.syn(sig)?, &s.tm),
            _ => Ok(false),
        });
        out[7].record(verdict, || show(&s.ctx, &s.tm));
    }

    Report {
        seed: cfg.seed,
        count: cfg.count,
        max_size: cfg.max_size,
        max_depth: cfg.max_depth,
        outcomes: out,
        equal_pairs,
    }
}
