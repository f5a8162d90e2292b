//! A small S-expression reader shared by the signature, context and term
//! grammars. Every node remembers where it started so that conversion errors
//! can point back into the source text.

use std::fmt;

use crate::error::ParseError;

/// A line/column position in the source (both 1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, pos) | Sexp::List(_, pos) => *pos,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Atom(..) => None,
        }
    }

    /// If this is a list whose head is the atom `keyword`, return the tail.
    pub fn tagged(&self, keyword: &str) -> Option<&[Sexp]> {
        match self.as_list()? {
            [Sexp::Atom(head, _), rest @ ..] if head == keyword => Some(rest),
            _ => None,
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl Reader<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                // line comment
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp, ParseError> {
        self.skip_trivia();
        let start = self.pos;
        match self.chars.peek().copied() {
            None => Err(ParseError::new(start, "unexpected end of input")),
            Some(')') => Err(ParseError::new(start, "unexpected `)`")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => {
                            return Err(ParseError::new(start, "unclosed `(`"));
                        }
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                let mut atom = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    atom.push(c);
                    self.bump();
                }
                Ok(Sexp::Atom(atom, start))
            }
        }
    }
}

/// Read exactly one S-expression from `src`.
pub fn read(src: &str) -> Result<Sexp, ParseError> {
    let mut reader = Reader {
        chars: src.chars().peekable(),
        pos: Pos { line: 1, col: 1 },
    };
    let sexp = reader.read()?;
    reader.skip_trivia();
    if reader.chars.peek().is_some() {
        return Err(ParseError::new(reader.pos, "trailing input after expression"));
    }
    Ok(sexp)
}

/// Identifiers are `[A-Za-z][A-Za-z0-9_]*`.
pub fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists() {
        let s = read("(a (b c) ())").unwrap();
        let items = s.as_list().unwrap();
        assert_eq!(items.len(), 3);
        assert_eq!(items[0].as_atom(), Some("a"));
        assert_eq!(items[1].as_list().unwrap().len(), 2);
        assert!(items[2].as_list().unwrap().is_empty());
    }

    #[test]
    fn reports_positions() {
        let err = read("(a\n  (b c)").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 1 });
        let err = read("(a) b").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 5 });
        let err = read("\n )").unwrap_err();
        assert_eq!(err.pos, Pos { line: 2, col: 2 });
    }

    #[test]
    fn comments_are_trivia() {
        let s = read("; header\n(x ; trailing\n y)").unwrap();
        assert_eq!(s.as_list().unwrap().len(), 2);
    }

    #[test]
    fn names() {
        assert!(is_name("a"));
        assert!(is_name("Foo_1"));
        assert!(!is_name("1a"));
        assert!(!is_name("_a"));
        assert!(!is_name("a-b"));
        assert!(!is_name(""));
    }
}
