//! The `.ars` specification language: a system, label orders, accepting
//! conditions, strategies and queries in one document.
//!
//! ```text
//! ars {
//!   objects: a, b, c, d;
//!   labels: phi1, phi2, phi3, phi4;
//!   steps: (a, phi1, b), (a, phi2, c), (b, phi3, a), (b, phi4, d);
//! }
//! order asc {
//!   phi1 < phi2;
//!   phi2 < phi3;
//!   phi3 < phi4;
//! }
//! strategy gm = greatmost(asc);
//! query enumerate gm depth 5;
//! ```
//!
//! [`parse`] checks syntax and names and lowers the document into a
//! [`Model`]; [`serialize`] prints the canonical form.

mod lexer;
mod parser;
mod serialize;

use std::collections::BTreeMap;
use std::fmt;

use crate::ars::{Ars, ObjectId};
use crate::intensional::{IntensionalStrategy, LabelOrder};
use crate::logical::AcceptCondition;
use crate::rexp::RexpSyntax;
use crate::strategy::Property;

pub use parser::parse;
pub use serialize::serialize;

pub const MAX_NESTING: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A positioned message; line and column are 1-based, columns count
/// characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {}: {}", self.line, self.column, sev, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArsDecl {
    pub objects: Vec<String>,
    pub labels: Vec<String>,
    pub steps: Vec<(String, String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderDecl {
    pub name: String,
    /// `(lo, hi)` for each `lo < hi`.
    pub pairs: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetItem {
    Label(String),
    Step(String, String, String),
}

/// `{phi1, (a, phi2, c)}`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SetExpr {
    pub items: Vec<SetItem>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Cmp {
    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Eq => "=",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AcceptExpr {
    True,
    False,
    Word(RexpSyntax),
    Len(Cmp, usize),
    At(String),
    /// `trace(a, phi1, b, phi3, a)`: the traced object with that history.
    Trace(Vec<String>),
    Always(Box<AcceptExpr>),
    And(Vec<AcceptExpr>),
    Or(Vec<AcceptExpr>),
    Not(Box<AcceptExpr>),
    Ref(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategyExpr {
    Universal,
    Fail,
    Greatmost(String),
    MaxLen(usize),
    Alternate(SetExpr, SetExpr),
    /// White labels, then black labels.
    Colors(SetExpr, SetExpr),
    Restrict(SetExpr),
    Intersect(Vec<StrategyExpr>),
    UnionP(Box<StrategyExpr>, Box<StrategyExpr>),
    UnionC(Box<StrategyExpr>, Box<StrategyExpr>),
    Accept(Box<StrategyExpr>, AcceptExpr),
    Ref(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    Enumerate,
    Apply,
    Check(Property),
    Witness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub kind: QueryKind,
    pub strategy: Option<String>,
    pub from: Option<String>,
    pub depth: Option<usize>,
    pub horizon: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Section {
    Ars(ArsDecl),
    Order(OrderDecl),
    Accept { name: String, expr: AcceptExpr },
    Strategy { name: String, expr: StrategyExpr },
    Query(Query),
}

impl Section {
    fn rank(&self) -> u8 {
        match self {
            Section::Ars(_) => 0,
            Section::Order(_) => 1,
            Section::Accept { .. } => 2,
            Section::Strategy { .. } => 3,
            Section::Query(_) => 4,
        }
    }
}

/// The document lowered onto a concrete system.
#[derive(Debug, Clone)]
pub struct Model {
    pub ars: Ars,
    pub orders: BTreeMap<String, LabelOrder>,
    pub accepts: BTreeMap<String, AcceptCondition>,
    pub strategies: BTreeMap<String, IntensionalStrategy>,
}

impl Model {
    pub fn strategy(&self, name: &str) -> Option<&IntensionalStrategy> {
        self.strategies.get(name)
    }

    pub fn object(&self, name: &str) -> Option<ObjectId> {
        self.ars.object(name)
    }
}

/// A parsed, validated document. Equality is structural over the sections.
#[derive(Debug, Clone)]
pub struct SpecDocument {
    sections: Vec<Section>,
    model: Model,
}

impl PartialEq for SpecDocument {
    fn eq(&self, other: &Self) -> bool {
        self.sections == other.sections
    }
}

impl SpecDocument {
    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn ars(&self) -> &Ars {
        &self.model.ars
    }

    pub fn queries(&self) -> impl Iterator<Item = &Query> {
        self.sections.iter().filter_map(|s| match s {
            Section::Query(q) => Some(q),
            _ => None,
        })
    }
}

#[cfg(test)]
mod tests;
