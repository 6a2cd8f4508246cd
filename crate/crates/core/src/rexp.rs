//! Rational expressions over label words.
//!
//! Surface syntax: labels are identifiers, juxtaposition is concatenation,
//! `|` is alternation, postfix `*`, `+` and `?` are star, plus and option,
//! parentheses group. Whitespace is insignificant. Matching is whole-word.
//!
//! Expressions are compiled through a Thompson construction into an
//! epsilon-free automaton; membership runs the usual state-set simulation.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ars::{Ars, LabelId};

const MAX_NESTING: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RexpError {
    #[error("at offset {position}: expected {expected}, found {found}")]
    Parse {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
}

/// Expression tree, generic over how labels are named.
///
/// `Concat` and `Alt` always have at least two children and never directly
/// contain a node of their own kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rexp<L> {
    Label(L),
    Concat(Vec<Rexp<L>>),
    Alt(Vec<Rexp<L>>),
    Star(Box<Rexp<L>>),
    Plus(Box<Rexp<L>>),
    Opt(Box<Rexp<L>>),
}

impl<L> Rexp<L> {
    pub fn try_map<M, E>(&self, f: &mut impl FnMut(&L) -> Result<M, E>) -> Result<Rexp<M>, E> {
        Ok(match self {
            Rexp::Label(l) => Rexp::Label(f(l)?),
            Rexp::Concat(xs) => Rexp::Concat(xs.iter().map(|x| x.try_map(f)).collect::<Result<_, _>>()?),
            Rexp::Alt(xs) => Rexp::Alt(xs.iter().map(|x| x.try_map(f)).collect::<Result<_, _>>()?),
            Rexp::Star(x) => Rexp::Star(Box::new(x.try_map(f)?)),
            Rexp::Plus(x) => Rexp::Plus(Box::new(x.try_map(f)?)),
            Rexp::Opt(x) => Rexp::Opt(Box::new(x.try_map(f)?)),
        })
    }

    fn concat(mut parts: Vec<Rexp<L>>) -> Rexp<L> {
        if parts.len() == 1 {
            return parts.pop().unwrap();
        }
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Rexp::Concat(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        Rexp::Concat(flat)
    }

    fn alt(mut parts: Vec<Rexp<L>>) -> Rexp<L> {
        if parts.len() == 1 {
            return parts.pop().unwrap();
        }
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Rexp::Alt(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        Rexp::Alt(flat)
    }

    fn precedence(&self) -> u8 {
        match self {
            Rexp::Alt(_) => 0,
            Rexp::Concat(_) => 1,
            Rexp::Star(_) | Rexp::Plus(_) | Rexp::Opt(_) => 2,
            Rexp::Label(_) => 3,
        }
    }
}

/// Spelled-out expression as written in source text.
pub type RexpSyntax = Rexp<String>;

impl<L: fmt::Display> fmt::Display for Rexp<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child<L: fmt::Display>(f: &mut fmt::Formatter<'_>, x: &Rexp<L>, min: u8) -> fmt::Result {
            if x.precedence() < min {
                write!(f, "({x})")
            } else {
                write!(f, "{x}")
            }
        }
        match self {
            Rexp::Label(l) => write!(f, "{l}"),
            Rexp::Concat(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    child(f, x, 2)?;
                }
                Ok(())
            }
            Rexp::Alt(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    child(f, x, 1)?;
                }
                Ok(())
            }
            Rexp::Star(x) => {
                child(f, x, 3)?;
                f.write_str("*")
            }
            Rexp::Plus(x) => {
                child(f, x, 3)?;
                f.write_str("+")
            }
            Rexp::Opt(x) => {
                child(f, x, 3)?;
                f.write_str("?")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok<'a> {
    Ident(&'a str),
    Bar,
    Star,
    Plus,
    Question,
    Open,
    Close,
    End,
}

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Bar => "`|`".into(),
            Tok::Star => "`*`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Question => "`?`".into(),
            Tok::Open => "`(`".into(),
            Tok::Close => "`)`".into(),
            Tok::End => "end of expression".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok<'_>, usize)>, RexpError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'|' => Tok::Bar,
            b'*' => Tok::Star,
            b'+' => Tok::Plus,
            b'?' => Tok::Question,
            b'(' => Tok::Open,
            b')' => Tok::Close,
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(&text[start..i]), start));
                continue;
            }
            _ => {
                let found = text[i..].chars().next().unwrap();
                return Err(RexpError::Parse {
                    position: i,
                    expected: "a label, `(`, `|` or a postfix operator".into(),
                    found: format!("`{found}`"),
                });
            }
        };
        out.push((tok, i));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok<'a>, usize)>,
    pos: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Tok<'a> {
        self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn error(&self, expected: &str) -> RexpError {
        RexpError::Parse {
            position: self.offset(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn alt(&mut self) -> Result<RexpSyntax, RexpError> {
        let mut parts = vec![self.concat()?];
        while self.peek() == Tok::Bar {
            self.pos += 1;
            parts.push(self.concat()?);
        }
        Ok(Rexp::alt(parts))
    }

    fn concat(&mut self) -> Result<RexpSyntax, RexpError> {
        let mut parts = vec![self.postfix()?];
        while matches!(self.peek(), Tok::Ident(_) | Tok::Open) {
            parts.push(self.postfix()?);
        }
        Ok(Rexp::concat(parts))
    }

    fn postfix(&mut self) -> Result<RexpSyntax, RexpError> {
        let mut atom = self.atom()?;
        loop {
            atom = match self.peek() {
                Tok::Star => Rexp::Star(Box::new(atom)),
                Tok::Plus => Rexp::Plus(Box::new(atom)),
                Tok::Question => Rexp::Opt(Box::new(atom)),
                _ => return Ok(atom),
            };
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<RexpSyntax, RexpError> {
        match self.peek() {
            Tok::Ident(name) => {
                self.pos += 1;
                Ok(Rexp::Label(name.to_string()))
            }
            Tok::Open => {
                if self.depth >= MAX_NESTING {
                    return Err(self.error("shallower nesting"));
                }
                self.depth += 1;
                self.pos += 1;
                let inner = self.alt()?;
                if self.peek() != Tok::Close {
                    return Err(self.error("`)` or `|`"));
                }
                self.pos += 1;
                self.depth -= 1;
                Ok(inner)
            }
            _ => Err(self.error("a label or `(`")),
        }
    }
}

/// Parses the surface syntax without resolving labels. Error positions are
/// byte offsets into `text`.
pub fn parse_syntax(text: &str) -> Result<RexpSyntax, RexpError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        depth: 0,
    };
    let r = p.alt()?;
    if p.peek() != Tok::End {
        return Err(p.error("a label, `(`, `|` or a postfix operator"));
    }
    Ok(r)
}

/// Epsilon-free nondeterministic automaton over labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    transitions: Vec<Vec<(LabelId, usize)>>,
    accepting: Vec<bool>,
    start: usize,
}

impl Automaton {
    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn transitions(&self, state: usize) -> &[(LabelId, usize)] {
        &self.transitions[state]
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn accepts(&self, word: &[LabelId]) -> bool {
        let mut current = vec![false; self.state_count()];
        current[self.start] = true;
        let mut next = vec![false; self.state_count()];
        for &label in word {
            next.iter_mut().for_each(|x| *x = false);
            let mut any = false;
            for (s, _) in current.iter().enumerate().filter(|(_, on)| **on) {
                for &(l, t) in &self.transitions[s] {
                    if l == label {
                        next[t] = true;
                        any = true;
                    }
                }
            }
            if !any {
                return false;
            }
            std::mem::swap(&mut current, &mut next);
        }
        current.iter().zip(&self.accepting).any(|(on, acc)| *on && *acc)
    }
}

/// Thompson fragment builder with explicit epsilon edges.
#[derive(Default)]
struct Thompson {
    eps: Vec<Vec<usize>>,
    edges: Vec<Vec<(LabelId, usize)>>,
}

impl Thompson {
    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.edges.push(Vec::new());
        self.eps.len() - 1
    }

    /// Returns `(entry, exit)` of the fragment for `r`.
    fn build(&mut self, r: &Rexp<LabelId>) -> (usize, usize) {
        match r {
            Rexp::Label(l) => {
                let (s, t) = (self.state(), self.state());
                self.edges[s].push((*l, t));
                (s, t)
            }
            Rexp::Concat(xs) => {
                let (entry, mut exit) = self.build(&xs[0]);
                for x in &xs[1..] {
                    let (s, t) = self.build(x);
                    self.eps[exit].push(s);
                    exit = t;
                }
                (entry, exit)
            }
            Rexp::Alt(xs) => {
                let (entry, exit) = (self.state(), self.state());
                for x in xs {
                    let (s, t) = self.build(x);
                    self.eps[entry].push(s);
                    self.eps[t].push(exit);
                }
                (entry, exit)
            }
            Rexp::Star(x) | Rexp::Plus(x) | Rexp::Opt(x) => {
                let (entry, exit) = (self.state(), self.state());
                let (s, t) = self.build(x);
                self.eps[entry].push(s);
                self.eps[t].push(exit);
                if !matches!(r, Rexp::Plus(_)) {
                    self.eps[entry].push(exit);
                }
                if !matches!(r, Rexp::Opt(_)) {
                    self.eps[t].push(s);
                }
                (entry, exit)
            }
        }
    }

    fn closure(&self, s: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([s]);
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &y in &self.eps[x] {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    fn finish(self, entry: usize, exit: usize) -> Automaton {
        // Keep the entry and every state entered by a labeled edge.
        let n = self.eps.len();
        let mut keep: Vec<usize> = vec![entry];
        keep.extend((0..n).filter(|&s| s != entry && self.edges.iter().flatten().any(|&(_, t)| t == s)));
        let mut renumber = vec![usize::MAX; n];
        for (i, &s) in keep.iter().enumerate() {
            renumber[s] = i;
        }
        let mut transitions = Vec::with_capacity(keep.len());
        let mut accepting = Vec::with_capacity(keep.len());
        for &s in &keep {
            let closure = self.closure(s);
            accepting.push(closure.contains(&exit));
            let mut out: BTreeSet<(LabelId, usize)> = BTreeSet::new();
            for c in closure {
                out.extend(self.edges[c].iter().map(|&(l, t)| (l, renumber[t])));
            }
            transitions.push(out.into_iter().collect());
        }
        Automaton {
            transitions,
            accepting,
            start: 0,
        }
    }
}

/// A rational expression resolved against a system's labels, with its
/// compiled automaton.
#[derive(Debug, Clone)]
pub struct RationalExpr {
    tree: Rexp<LabelId>,
    automaton: Automaton,
}

impl PartialEq for RationalExpr {
    fn eq(&self, other: &Self) -> bool {
        self.tree == other.tree
    }
}

impl Eq for RationalExpr {}

impl RationalExpr {
    /// Parses and resolves `text` against the labels of `ars`.
    pub fn parse(text: &str, ars: &Ars) -> Result<RationalExpr, RexpError> {
        RationalExpr::resolve(&parse_syntax(text)?, ars)
    }

    pub fn resolve(syntax: &RexpSyntax, ars: &Ars) -> Result<RationalExpr, RexpError> {
        let tree = syntax.try_map(&mut |name: &String| {
            ars.label(name).ok_or_else(|| RexpError::UnknownLabel(name.clone()))
        })?;
        Ok(RationalExpr::from_tree(tree))
    }

    pub fn from_tree(tree: Rexp<LabelId>) -> RationalExpr {
        let mut builder = Thompson::default();
        let (entry, exit) = builder.build(&tree);
        let automaton = builder.finish(entry, exit);
        RationalExpr { tree, automaton }
    }

    pub fn tree(&self) -> &Rexp<LabelId> {
        &self.tree
    }

    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    /// Whole-word membership.
    pub fn matches(&self, word: &[LabelId]) -> bool {
        self.automaton.accepts(word)
    }

    pub fn to_syntax(&self, ars: &Ars) -> RexpSyntax {
        self.tree
            .try_map(&mut |l: &LabelId| Ok::<_, ()>(ars.label_name(*l).to_string()))
            .expect("infallible")
    }
}
