use std::fmt::Write;

use super::{AcceptExpr, Query, QueryKind, Section, SetExpr, SetItem, SpecDocument, StrategyExpr};
use crate::strategy::Property;

/// Canonical text: sections grouped by kind (system, orders, accepts,
/// strategies, queries), declaration order kept within a kind, LF line
/// endings, two-space indentation.
pub fn serialize(doc: &SpecDocument) -> String {
    let mut sections: Vec<&Section> = doc.sections().iter().collect();
    sections.sort_by_key(|s| s.rank());
    let mut out = String::new();
    for s in sections {
        section(&mut out, s);
    }
    out
}

fn section(out: &mut String, s: &Section) {
    match s {
        Section::Ars(a) => {
            out.push_str("ars {\n");
            let _ = writeln!(out, "  objects: {};", a.objects.join(", "));
            let _ = writeln!(out, "  labels: {};", a.labels.join(", "));
            let steps: Vec<String> = a.steps.iter().map(|(s, l, t)| format!("({s}, {l}, {t})")).collect();
            let _ = writeln!(out, "  steps: {};", steps.join(", "));
            out.push_str("}\n");
        }
        Section::Order(o) => {
            let _ = writeln!(out, "order {} {{", o.name);
            for (lo, hi) in &o.pairs {
                let _ = writeln!(out, "  {lo} < {hi};");
            }
            out.push_str("}\n");
        }
        Section::Accept { name, expr } => {
            let _ = writeln!(out, "accept {name} = {};", aexpr(expr));
        }
        Section::Strategy { name, expr } => {
            let _ = writeln!(out, "strategy {name} = {};", sexpr(expr));
        }
        Section::Query(q) => {
            let _ = writeln!(out, "{};", query(q));
        }
    }
}

fn set(s: &SetExpr) -> String {
    let items: Vec<String> = s
        .items
        .iter()
        .map(|i| match i {
            SetItem::Label(l) => l.clone(),
            SetItem::Step(a, l, b) => format!("({a}, {l}, {b})"),
        })
        .collect();
    format!("{{{}}}", items.join(", "))
}

pub(super) fn sexpr(e: &StrategyExpr) -> String {
    match e {
        StrategyExpr::Universal => "universal".to_string(),
        StrategyExpr::Fail => "fail".to_string(),
        StrategyExpr::Greatmost(o) => format!("greatmost({o})"),
        StrategyExpr::MaxLen(k) => format!("maxlen({k})"),
        StrategyExpr::Alternate(a, b) => format!("alternate({}; {})", set(a), set(b)),
        StrategyExpr::Colors(a, b) => format!("colors({}; {})", set(a), set(b)),
        StrategyExpr::Restrict(a) => format!("restrict({})", set(a)),
        StrategyExpr::Intersect(xs) => {
            let parts: Vec<String> = xs.iter().map(sexpr).collect();
            format!("intersect({})", parts.join(", "))
        }
        StrategyExpr::UnionP(a, b) => format!("unionP({}, {})", sexpr(a), sexpr(b)),
        StrategyExpr::UnionC(a, b) => format!("unionC({}, {})", sexpr(a), sexpr(b)),
        StrategyExpr::Accept(a, c) => format!("accept({}, {})", sexpr(a), aexpr(c)),
        StrategyExpr::Ref(n) => n.clone(),
    }
}

pub(super) fn aexpr(e: &AcceptExpr) -> String {
    let list = |xs: &[AcceptExpr]| xs.iter().map(aexpr).collect::<Vec<_>>().join(", ");
    match e {
        AcceptExpr::True => "true".to_string(),
        AcceptExpr::False => "false".to_string(),
        AcceptExpr::Word(r) => format!("word({r})"),
        AcceptExpr::Len(cmp, k) => format!("len {} {k}", cmp.symbol()),
        AcceptExpr::At(a) => format!("at({a})"),
        AcceptExpr::Trace(names) => format!("trace({})", names.join(", ")),
        AcceptExpr::Always(c) => format!("always({})", aexpr(c)),
        AcceptExpr::And(xs) => format!("and({})", list(xs)),
        AcceptExpr::Or(xs) => format!("or({})", list(xs)),
        AcceptExpr::Not(c) => format!("not({})", aexpr(c)),
        AcceptExpr::Ref(n) => n.clone(),
    }
}

fn query(q: &Query) -> String {
    let mut out = String::from("query ");
    out.push_str(match q.kind {
        QueryKind::Enumerate => "enumerate",
        QueryKind::Apply => "apply",
        QueryKind::Witness => "witness",
        QueryKind::Check(p) => match p {
            Property::PrefixClosed => "check prefix",
            Property::FactorClosed => "check factor",
            Property::CompositionClosed => "check composition",
            Property::Closed => "check closed",
        },
    });
    if let Some(s) = &q.strategy {
        let _ = write!(out, " {s}");
    }
    if let Some(a) = &q.from {
        let _ = write!(out, " from {a}");
    }
    if let Some(k) = q.depth {
        let _ = write!(out, " depth {k}");
    }
    if let Some(k) = q.horizon {
        let _ = write!(out, " horizon {k}");
    }
    out
}
