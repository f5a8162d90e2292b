//! The oriented equational theory, run as an innermost rewriter.
//!
//! Every traversal normalizes children before looking at the root, so each
//! helper below may assume that its arguments are already in normal form
//! for the phase it belongs to.

use serde::{Deserialize, Serialize};

use crate::error::NormError;
use crate::syntax::{as_proj_pow, proj_pow, Sb, Tm};

/// Rewrite budget. Exhausting it indicates a bug, not a large input.
pub const FUEL: u64 = 1_000_000;

/// One rule firing. `path` lists child indices from the root of the term
/// the phase started on (`Sub`: 0 term, 1 substitution; `Lam`: 0 body;
/// `Ext`: 0 substitution, 1 term; `Comp`: 0 outer, 1 inner).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub rule: String,
    pub path: Vec<usize>,
}

pub(crate) struct Engine {
    used: u64,
    steps: Option<Vec<Step>>,
    path: Vec<usize>,
}

impl Engine {
    pub(crate) fn new(tracing: bool) -> Engine {
        Engine {
            used: 0,
            steps: tracing.then(Vec::new),
            path: Vec::new(),
        }
    }

    pub(crate) fn into_steps(self) -> Vec<Step> {
        self.steps.unwrap_or_default()
    }

    pub(crate) fn fire(&mut self, rule: &'static str) -> Result<(), NormError> {
        self.used += 1;
        if self.used > FUEL {
            return Err(NormError::FuelExhausted(FUEL));
        }
        if let Some(steps) = &mut self.steps {
            steps.push(Step {
                rule: rule.to_owned(),
                path: self.path.clone(),
            });
        }
        Ok(())
    }

    pub(crate) fn at<T>(&mut self, ix: usize, f: impl FnOnce(&mut Self) -> T) -> T {
        self.path.push(ix);
        let out = f(self);
        self.path.pop();
        out
    }

    pub(crate) fn reset_path(&mut self) {
        self.path.clear();
    }

    // Substitution pushing.

    pub(crate) fn push_tm(&mut self, t: &Tm) -> Result<Tm, NormError> {
        Ok(match t {
            Tm::Var | Tm::Op(_) => t.clone(),
            Tm::Sub(u, d) => {
                let u = self.at(0, |e| e.push_tm(u))?;
                let d = self.at(1, |e| e.push_sb(d))?;
                self.subst(u, d)?
            }
            Tm::Lam(dom, b) => Tm::lam(dom.clone(), self.at(0, |e| e.push_tm(b))?),
            Tm::App(f, a) => Tm::app(self.at(0, |e| e.push_tm(f))?, self.at(1, |e| e.push_tm(a))?),
            Tm::Pair(a, b) => Tm::pair(self.at(0, |e| e.push_tm(a))?, self.at(1, |e| e.push_tm(b))?),
            Tm::Fst(p) => Tm::fst(self.at(0, |e| e.push_tm(p))?),
            Tm::Snd(p) => Tm::snd(self.at(0, |e| e.push_tm(p))?),
        })
    }

    pub(crate) fn push_sb(&mut self, d: &Sb) -> Result<Sb, NormError> {
        Ok(match d {
            Sb::Id | Sb::Proj => d.clone(),
            Sb::Ext(s, t) => Sb::ext(self.at(0, |e| e.push_sb(s))?, self.at(1, |e| e.push_tm(t))?),
            Sb::Comp(x, s) => {
                let x = self.at(0, |e| e.push_sb(x))?;
                let s = self.at(1, |e| e.push_sb(s))?;
                self.comp(x, s)?
            }
        })
    }

    /// `u[d]` for pushed `u` and `d`.
    pub(crate) fn subst(&mut self, u: Tm, d: Sb) -> Result<Tm, NormError> {
        if d == Sb::Id {
            self.fire(if u == Tm::Var { "sb/var/idn" } else { "sb/tm/idn" })?;
            return Ok(u);
        }
        Ok(match u {
            Tm::Var => match d {
                Sb::Ext(_, t) => {
                    self.fire("sb/var/ext")?;
                    *t
                }
                d => Tm::sub(Tm::Var, d),
            },
            Tm::Op(_) => Tm::sub(u, d),
            Tm::Sub(head, e) => {
                self.fire("sb/sb")?;
                let e = self.comp(*e, d)?;
                self.subst(*head, e)?
            }
            Tm::Lam(dom, b) => {
                self.fire("sb/abs")?;
                let shifted = self.comp(d, Sb::Proj)?;
                Tm::lam(dom, self.subst(*b, Sb::ext(shifted, Tm::Var))?)
            }
            Tm::App(f, a) => {
                self.fire("sb/app")?;
                Tm::app(self.subst(*f, d.clone())?, self.subst(*a, d)?)
            }
            Tm::Pair(a, b) => {
                self.fire("sb/pair")?;
                Tm::pair(self.subst(*a, d.clone())?, self.subst(*b, d)?)
            }
            Tm::Fst(p) => {
                self.fire("sb/proj1")?;
                Tm::fst(self.subst(*p, d)?)
            }
            Tm::Snd(p) => {
                self.fire("sb/proj2")?;
                Tm::snd(self.subst(*p, d)?)
            }
        })
    }

    /// `x ∘ d` for pushed `x` and `d`: first `d`, then `x`.
    pub(crate) fn comp(&mut self, x: Sb, d: Sb) -> Result<Sb, NormError> {
        if d == Sb::Id {
            self.fire("sb/cmp/idn/r")?;
            return Ok(x);
        }
        match x {
            Sb::Id => {
                self.fire("sb/cmp/idn/l")?;
                Ok(d)
            }
            Sb::Ext(x, t) => {
                self.fire("sb/cmp/dot")?;
                Ok(Sb::ext(self.comp(*x, d.clone())?, self.subst(*t, d)?))
            }
            Sb::Proj => match d {
                Sb::Ext(rest, _) => {
                    self.fire("sb/cmp/proj")?;
                    Ok(*rest)
                }
                d => match as_proj_pow(&d) {
                    Some(k) => Ok(proj_pow(k + 1)),
                    None => Err(NormError::Internal(format!("unpushed substitution {d}"))),
                },
            },
            Sb::Comp(p, rest) if *p == Sb::Proj => {
                self.fire("sb/cmp/assoc")?;
                let inner = self.comp(*rest, d)?;
                self.comp(Sb::Proj, inner)
            }
            x => Err(NormError::Internal(format!("unpushed substitution {x}"))),
        }
    }

    // β-normalization of pushed terms.

    pub(crate) fn beta_tm(&mut self, t: &Tm) -> Result<Tm, NormError> {
        Ok(match t {
            Tm::Var | Tm::Op(_) => t.clone(),
            Tm::Sub(head, s) => Tm::sub((**head).clone(), self.at(1, |e| e.beta_sb(s))?),
            Tm::Lam(dom, b) => Tm::lam(dom.clone(), self.at(0, |e| e.beta_tm(b))?),
            Tm::App(f, a) => {
                let f = self.at(0, |e| e.beta_tm(f))?;
                let a = self.at(1, |e| e.beta_tm(a))?;
                match f {
                    Tm::Lam(_, body) => {
                        self.fire("app/beta")?;
                        let reduct = self.subst(*body, Sb::ext(Sb::Id, a))?;
                        self.beta_tm(&reduct)?
                    }
                    f => Tm::app(f, a),
                }
            }
            Tm::Pair(a, b) => Tm::pair(self.at(0, |e| e.beta_tm(a))?, self.at(1, |e| e.beta_tm(b))?),
            Tm::Fst(p) => match self.at(0, |e| e.beta_tm(p))? {
                Tm::Pair(a, _) => {
                    self.fire("fst/beta")?;
                    *a
                }
                p => Tm::fst(p),
            },
            Tm::Snd(p) => match self.at(0, |e| e.beta_tm(p))? {
                Tm::Pair(_, b) => {
                    self.fire("snd/beta")?;
                    *b
                }
                p => Tm::snd(p),
            },
        })
    }

    fn beta_sb(&mut self, d: &Sb) -> Result<Sb, NormError> {
        Ok(match d {
            Sb::Ext(s, t) => Sb::ext(self.at(0, |e| e.beta_sb(s))?, self.at(1, |e| e.beta_tm(t))?),
            d => d.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Ty;
    use crate::syntax::{parse_sb, parse_tm, var_ix};

    fn push(src: &str) -> Tm {
        Engine::new(false).push_tm(&parse_tm(src).unwrap()).unwrap()
    }

    fn rules(src: &str) -> Vec<String> {
        let mut e = Engine::new(true);
        e.push_tm(&parse_tm(src).unwrap()).unwrap();
        e.into_steps().into_iter().map(|s| s.rule).collect()
    }

    #[test]
    fn variable_rules() {
        assert_eq!(push("(sub v (ext id (op c)))"), Tm::op("c"));
        assert_eq!(push("(sub v id)"), Tm::Var);
        assert_eq!(rules("(sub v id)"), ["sb/var/idn"]);
        assert_eq!(push("(sub (sub v p) p)"), var_ix(2));
        assert_eq!(push("(sub (sub v p) (ext (ext id (op c)) v))"), Tm::op("c"));
    }

    #[test]
    fn abstraction_under_weakening() {
        assert_eq!(push("(sub (lam a v) p)"), Tm::lam(Ty::atom("a"), Tm::Var));
        assert_eq!(push("(sub (lam a (ix 1)) p)"), Tm::lam(Ty::atom("a"), var_ix(2)));
    }

    #[test]
    fn composition_rules() {
        let mut e = Engine::new(false);
        let x = e.push_sb(&parse_sb("(comp p (ext (comp p p) v))").unwrap()).unwrap();
        assert_eq!(x, proj_pow(2));
        let y = e.push_sb(&parse_sb("(comp (comp p p) (ext (ext id v) v))").unwrap()).unwrap();
        assert_eq!(y, Sb::Id);
        let z = e.push_sb(&parse_sb("(comp (ext p v) p)").unwrap()).unwrap();
        assert_eq!(z, Sb::ext(proj_pow(2), var_ix(1)));
    }

    #[test]
    fn operations_keep_their_substitution() {
        assert_eq!(push("(sub (op f) (ext id (op c)))").to_string(), "(sub (op f) (ext id (op c)))");
        assert_eq!(push("(sub (op c) id)"), Tm::op("c"));
        assert_eq!(push("(sub (sub (op f) p) (ext id v))"), Tm::op("f"));
    }

    #[test]
    fn beta_rules() {
        let mut e = Engine::new(true);
        let t = e.push_tm(&parse_tm("(app (lam a v) v)").unwrap()).unwrap();
        assert_eq!(e.beta_tm(&t).unwrap(), Tm::Var);
        let t = parse_tm("(fst (pair (op c) (op c)))").unwrap();
        assert_eq!(e.beta_tm(&t).unwrap(), Tm::op("c"));
        let rules: Vec<_> = e.into_steps().into_iter().map(|s| s.rule).collect();
        assert_eq!(rules, ["app/beta", "sb/var/ext", "fst/beta"]);
    }

    #[test]
    fn trace_positions() {
        let mut e = Engine::new(true);
        e.push_tm(&parse_tm("(pair v (sub v id))").unwrap()).unwrap();
        assert_eq!(
            e.into_steps(),
            [Step {
                rule: "sb/var/idn".into(),
                path: vec![1]
            }]
        );
    }
}
