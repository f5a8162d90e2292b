//! Many-typed signatures, the simple types they generate, and contexts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ParseError, SignatureError, TypeError};
use crate::sexp::{self, Sexp};

/// Sort and operation names.
pub type Name = Arc<str>;

/// Simple types over a set of sorts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "tag", content = "args")]
pub enum Ty {
    Atom(Name),
    Prod(Arc<Ty>, Arc<Ty>),
    Arrow(Arc<Ty>, Arc<Ty>),
}

impl Ty {
    pub fn atom(name: &str) -> Ty {
        Ty::Atom(Name::from(name))
    }

    pub fn prod(left: Ty, right: Ty) -> Ty {
        Ty::Prod(Arc::new(left), Arc::new(right))
    }

    pub fn arrow(dom: Ty, cod: Ty) -> Ty {
        Ty::Arrow(Arc::new(dom), Arc::new(cod))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Ty::Atom(_))
    }

    /// Nesting depth of type constructors; atoms have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Ty::Atom(_) => 1,
            Ty::Prod(a, b) | Ty::Arrow(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Atom(name) => write!(f, "{name}"),
            Ty::Prod(a, b) => write!(f, "(prod {a} {b})"),
            Ty::Arrow(a, b) => write!(f, "(arr {a} {b})"),
        }
    }
}

/// A typing context. Entry 0 is the oldest binding; De Bruijn index `k`
/// refers to entry `len - k - 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ctx(Vec<Ty>);

impl Ctx {
    pub fn empty() -> Ctx {
        Ctx(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Ty] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Ty> {
        self.0.iter()
    }

    /// The type of De Bruijn index `k`, if in range.
    pub fn lookup(&self, k: usize) -> Option<&Ty> {
        let len = self.0.len();
        if k < len {
            Some(&self.0[len - k - 1])
        } else {
            None
        }
    }

    pub fn last(&self) -> Option<&Ty> {
        self.0.last()
    }

    pub fn push(&mut self, ty: Ty) {
        self.0.push(ty);
    }

    pub fn pop(&mut self) -> Option<Ty> {
        self.0.pop()
    }

    pub fn extended(&self, ty: Ty) -> Ctx {
        let mut ctx = self.clone();
        ctx.push(ty);
        ctx
    }

    /// The context with its most recent entry removed.
    pub fn init(&self) -> Option<Ctx> {
        let (_, init) = self.0.split_last()?;
        Some(Ctx(init.to_vec()))
    }
}

impl From<Vec<Ty>> for Ctx {
    fn from(entries: Vec<Ty>) -> Ctx {
        Ctx(entries)
    }
}

impl FromIterator<Ty> for Ctx {
    fn from_iter<I: IntoIterator<Item = Ty>>(iter: I) -> Ctx {
        Ctx(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Ctx {
    type Item = &'a Ty;
    type IntoIter = std::slice::Iter<'a, Ty>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for Ctx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, ty) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{ty}")?;
        }
        write!(f, ")")
    }
}

/// An operation's argument context and result type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arity {
    pub args: Ctx,
    pub result: Ty,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    sorts: BTreeSet<Name>,
    ops: BTreeMap<Name, Arity>,
}

impl Signature {
    pub fn empty() -> Signature {
        Signature::default()
    }

    /// Build a signature from parts, validating it.
    pub fn new<S, O>(sorts: S, ops: O) -> Result<Signature, SignatureError>
    where
        S: IntoIterator<Item = Name>,
        O: IntoIterator<Item = (Name, Arity)>,
    {
        let nowhere = sexp::Pos { line: 0, col: 0 };
        let mut sig = Signature::empty();
        for sort in sorts {
            if !sig.sorts.insert(sort.clone()) {
                return Err(SignatureError::DuplicateSort {
                    name: sort.to_string(),
                    pos: nowhere,
                });
            }
        }
        for (name, arity) in ops {
            for ty in arity.args.iter().chain([&arity.result]) {
                if let Some(bad) = sig.undeclared_sort(ty) {
                    return Err(SignatureError::UndeclaredSort {
                        name: bad.to_string(),
                        pos: nowhere,
                    });
                }
            }
            if sig.ops.insert(name.clone(), arity).is_some() {
                return Err(SignatureError::DuplicateOp {
                    name: name.to_string(),
                    pos: nowhere,
                });
            }
        }
        Ok(sig)
    }

    pub fn sorts(&self) -> impl Iterator<Item = &Name> {
        self.sorts.iter()
    }

    pub fn ops(&self) -> impl Iterator<Item = (&Name, &Arity)> {
        self.ops.iter()
    }

    pub fn has_sort(&self, name: &str) -> bool {
        self.sorts.contains(name)
    }

    pub fn lookup_op(&self, name: &str) -> Result<&Arity, TypeError> {
        self.ops
            .get(name)
            .ok_or_else(|| TypeError::UnknownOp(name.to_owned()))
    }

    /// True iff every atom of `ty` is a declared sort.
    pub fn ty_well_formed(&self, ty: &Ty) -> bool {
        self.undeclared_sort(ty).is_none()
    }

    pub fn ctx_well_formed(&self, ctx: &Ctx) -> bool {
        ctx.iter().all(|ty| self.ty_well_formed(ty))
    }

    fn undeclared_sort<'t>(&self, ty: &'t Ty) -> Option<&'t Name> {
        match ty {
            Ty::Atom(name) if self.sorts.contains(name) => None,
            Ty::Atom(name) => Some(name),
            Ty::Prod(a, b) | Ty::Arrow(a, b) => {
                self.undeclared_sort(a).or_else(|| self.undeclared_sort(b))
            }
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(signature (sorts")?;
        for sort in &self.sorts {
            write!(f, " {sort}")?;
        }
        write!(f, ") (ops")?;
        for (name, arity) in &self.ops {
            write!(f, " ({name} {} {})", arity.args, arity.result)?;
        }
        write!(f, "))")
    }
}

/// Parse and validate a signature source text.
pub fn parse_signature(src: &str) -> Result<Signature, SignatureError> {
    let sexp = sexp::read(src)?;
    let body = sexp
        .tagged("signature")
        .ok_or_else(|| ParseError::new(sexp.pos(), "expected `(signature ...)`"))?;
    let [sorts, ops] = body else {
        return Err(ParseError::new(sexp.pos(), "expected `(sorts ...)` and `(ops ...)`").into());
    };
    let sort_items = sorts
        .tagged("sorts")
        .ok_or_else(|| ParseError::new(sorts.pos(), "expected `(sorts NAME*)`"))?;
    let op_items = ops
        .tagged("ops")
        .ok_or_else(|| ParseError::new(ops.pos(), "expected `(ops OPDECL*)`"))?;

    let mut sig = Signature::empty();
    for item in sort_items {
        let name = name_of(item)?;
        if !sig.sorts.insert(name.clone()) {
            return Err(SignatureError::DuplicateSort {
                name: name.to_string(),
                pos: item.pos(),
            });
        }
    }
    for decl in op_items {
        let parts = decl
            .as_list()
            .ok_or_else(|| ParseError::new(decl.pos(), "expected `(NAME (TY*) TY)`"))?;
        let [name, args, result] = parts else {
            return Err(ParseError::new(decl.pos(), "expected `(NAME (TY*) TY)`").into());
        };
        let name = name_of(name)?;
        let arg_items = args
            .as_list()
            .ok_or_else(|| ParseError::new(args.pos(), "expected argument list `(TY*)`"))?;
        let mut arg_tys = Ctx::empty();
        for arg in arg_items {
            arg_tys.push(sig.checked_ty(arg)?);
        }
        let result = sig.checked_ty(result)?;
        if sig.ops.contains_key(&name) {
            return Err(SignatureError::DuplicateOp {
                name: name.to_string(),
                pos: decl.pos(),
            });
        }
        sig.ops.insert(
            name,
            Arity {
                args: arg_tys,
                result,
            },
        );
    }
    Ok(sig)
}

impl Signature {
    fn checked_ty(&self, sexp: &Sexp) -> Result<Ty, SignatureError> {
        let ty = ty_from_sexp(sexp)?;
        match self.undeclared_sort(&ty) {
            None => Ok(ty),
            Some(name) => Err(SignatureError::UndeclaredSort {
                name: name.to_string(),
                pos: find_atom(sexp, name).unwrap_or(sexp.pos()),
            }),
        }
    }
}

fn find_atom(sexp: &Sexp, name: &str) -> Option<sexp::Pos> {
    match sexp {
        Sexp::Atom(s, pos) if s == name => Some(*pos),
        Sexp::Atom(..) => None,
        Sexp::List(items, _) => items.iter().skip(1).find_map(|s| find_atom(s, name)),
    }
}

pub(crate) fn name_of(sexp: &Sexp) -> Result<Name, ParseError> {
    match sexp.as_atom() {
        Some(s) if sexp::is_name(s) => Ok(Name::from(s)),
        Some(s) => Err(ParseError::new(sexp.pos(), format!("invalid name `{s}`"))),
        None => Err(ParseError::new(sexp.pos(), "expected a name")),
    }
}

pub(crate) fn ty_from_sexp(sexp: &Sexp) -> Result<Ty, ParseError> {
    if sexp.as_atom().is_some() {
        return Ok(Ty::Atom(name_of(sexp)?));
    }
    let binary = |args: &[Sexp], what: &str| -> Result<(Ty, Ty), ParseError> {
        match args {
            [a, b] => Ok((ty_from_sexp(a)?, ty_from_sexp(b)?)),
            _ => Err(ParseError::new(sexp.pos(), format!("`{what}` takes two types"))),
        }
    };
    if let Some(args) = sexp.tagged("prod") {
        let (a, b) = binary(args, "prod")?;
        Ok(Ty::prod(a, b))
    } else if let Some(args) = sexp.tagged("arr") {
        let (a, b) = binary(args, "arr")?;
        Ok(Ty::arrow(a, b))
    } else {
        Err(ParseError::new(sexp.pos(), "expected a type"))
    }
}

/// Parse a type. Sorts are not checked; see [`Signature::ty_well_formed`].
pub fn parse_ty(src: &str) -> Result<Ty, ParseError> {
    ty_from_sexp(&sexp::read(src)?)
}

/// Parse a context literal: a parenthesised list of types.
pub fn parse_ctx(src: &str) -> Result<Ctx, ParseError> {
    let sexp = sexp::read(src)?;
    let items = sexp
        .as_list()
        .ok_or_else(|| ParseError::new(sexp.pos(), "a context is a list of types"))?;
    items.iter().map(ty_from_sexp).collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const SIG0: &str = "(signature (sorts a b) (ops (c () a) (f (a) a) (h (a b) b)))";

    fn a() -> Ty {
        Ty::atom("a")
    }

    fn b() -> Ty {
        Ty::atom("b")
    }

    #[test]
    fn parses_sig0() {
        let sig = parse_signature(SIG0).unwrap();
        assert_eq!(sig.sorts().count(), 2);
        assert_eq!(sig.ops().count(), 3);
    }

    #[test]
    fn parses_empty_signature() {
        let sig = parse_signature("(signature (sorts) (ops))").unwrap();
        assert_eq!(sig, Signature::empty());
    }

    #[test]
    fn rejects_undeclared_sort() {
        let err = parse_signature("(signature (sorts a) (ops (c () z)))").unwrap_err();
        match err {
            SignatureError::UndeclaredSort { name, pos } => {
                assert_eq!(name, "z");
                assert_eq!(pos, sexp::Pos { line: 1, col: 33 });
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicates() {
        assert!(matches!(
            parse_signature("(signature (sorts a a) (ops))"),
            Err(SignatureError::DuplicateSort { .. })
        ));
        assert!(matches!(
            parse_signature("(signature (sorts a) (ops (c () a) (c (a) a)))"),
            Err(SignatureError::DuplicateOp { .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_signature("(signature (sorts a) (ops (c () a))").unwrap_err();
        assert!(matches!(err, SignatureError::Syntax(ParseError { pos, .. }) if pos.line == 1 && pos.col == 1));
        let err = parse_signature("(signature (sorts 1a) (ops))").unwrap_err();
        assert!(err.to_string().starts_with("1:19"), "{err}");
    }

    #[test]
    fn lookup_op_reads_declarations() {
        let sig = parse_signature(SIG0).unwrap();
        let f = sig.lookup_op("f").unwrap();
        assert_eq!(f.args, Ctx::from(vec![a()]));
        assert_eq!(f.result, a());
        let c = sig.lookup_op("c").unwrap();
        assert!(c.args.is_empty());
        assert_eq!(c.result, a());
        assert_eq!(sig.lookup_op("q"), Err(TypeError::UnknownOp("q".into())));
    }

    #[test]
    fn well_formedness() {
        let sig = parse_signature(SIG0).unwrap();
        assert!(sig.ty_well_formed(&Ty::arrow(a(), Ty::prod(a(), b()))));
        assert!(!sig.ty_well_formed(&Ty::atom("z")));
        assert!(!Signature::empty().ty_well_formed(&a()));
    }

    #[test]
    fn printer_round_trips() {
        let sig = parse_signature(SIG0).unwrap();
        let printed = sig.to_string();
        assert_eq!(printed, SIG0);
        assert_eq!(parse_signature(&printed).unwrap(), sig);
    }

    #[test]
    fn ctx_indexing() {
        let ctx = parse_ctx("(a b (arr a a))").unwrap();
        assert_eq!(ctx.lookup(0), Some(&Ty::arrow(a(), a())));
        assert_eq!(ctx.lookup(2), Some(&a()));
        assert_eq!(ctx.lookup(3), None);
        assert_eq!(ctx.to_string(), "(a b (arr a a))");
        assert_eq!(parse_ctx("()").unwrap(), Ctx::empty());
    }
}
