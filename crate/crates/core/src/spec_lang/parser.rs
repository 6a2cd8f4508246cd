use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::lexer::{diagnostic_at, tokenize, Kind, Token};
use super::{
    AcceptExpr, ArsDecl, Cmp, Diagnostic, Model, OrderDecl, Query, QueryKind, Section, SetExpr, SetItem,
    SpecDocument, StrategyExpr, MAX_NESTING,
};
use crate::ars::{Ars, ArsError, ObjectId, Trace};
use crate::intensional::{Color, IntensionalStrategy, LabelOrder, OrderError, StepSet};
use crate::logical::{AcceptCondition, LogicalStrategy};
use crate::rexp::{self, RationalExpr, RexpError};
use crate::strategy::Property;

type PResult<T> = Result<T, Diagnostic>;

/// Parses and validates a document. Stops at the first error.
pub fn parse(text: &str) -> Result<SpecDocument, Vec<Diagnostic>> {
    let toks = tokenize(text).map_err(|d| vec![d])?;
    let mut p = Parser {
        src: text,
        toks,
        pos: 0,
        depth: 0,
        ars: None,
        orders: BTreeMap::new(),
        accepts: BTreeMap::new(),
        strategies: BTreeMap::new(),
    };
    p.document().map_err(|d| vec![d])
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
    ars: Option<Ars>,
    orders: BTreeMap<String, LabelOrder>,
    accepts: BTreeMap<String, AcceptCondition>,
    strategies: BTreeMap<String, IntensionalStrategy>,
}

fn describe(kind: Kind, text: &str) -> String {
    match kind {
        Kind::Eof => "end of input".to_string(),
        Kind::Keyword => format!("keyword `{text}`"),
        _ => format!("`{text}`"),
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Token {
        self.toks[self.pos]
    }

    fn text(&self, t: Token) -> &'a str {
        t.text(self.src)
    }

    fn bump(&mut self) -> Token {
        let t = self.peek();
        if t.kind != Kind::Eof {
            self.pos += 1;
        }
        t
    }

    fn at_sym(&self, s: &str) -> bool {
        let t = self.peek();
        t.kind == Kind::Sym && self.text(t) == s
    }

    fn at_kw(&self, k: &str) -> bool {
        let t = self.peek();
        t.kind == Kind::Keyword && self.text(t) == k
    }

    fn error_at(&self, t: Token, message: String) -> Diagnostic {
        diagnostic_at(self.src, t.start, message, vec![])
    }

    fn unexpected(&self, expected: &[&str]) -> Diagnostic {
        let t = self.peek();
        let list: Vec<String> = expected.iter().map(|e| e.to_string()).collect();
        diagnostic_at(
            self.src,
            t.start,
            format!("expected {}, found {}", list.join(" or "), describe(t.kind, self.text(t))),
            list,
        )
    }

    fn expect_sym(&mut self, s: &str) -> PResult<Token> {
        if self.at_sym(s) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&[&format!("`{s}`")]))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<Token> {
        if self.at_kw(k) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&[&format!("`{k}`")]))
        }
    }

    fn ident(&mut self) -> PResult<(String, Token)> {
        let t = self.peek();
        if t.kind == Kind::Ident {
            self.bump();
            Ok((self.text(t).to_string(), t))
        } else {
            Err(self.unexpected(&["identifier"]))
        }
    }

    fn int(&mut self) -> PResult<(usize, Token)> {
        let t = self.peek();
        match t.kind {
            Kind::Int(v) => {
                self.bump();
                Ok((v, t))
            }
            _ => Err(self.unexpected(&["integer"])),
        }
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            let t = self.peek();
            return Err(self.error_at(t, format!("expression nested deeper than {MAX_NESTING}")));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn ars(&self) -> &Ars {
        self.ars.as_ref().expect("ars section parsed first")
    }

    fn document(&mut self) -> PResult<SpecDocument> {
        let mut sections = Vec::new();
        loop {
            let t = self.peek();
            if t.kind == Kind::Eof && !sections.is_empty() {
                break;
            }
            let is_ars = self.at_kw("ars");
            if self.ars.is_none() && !is_ars {
                return Err(if self.at_kw("order") || self.at_kw("strategy") || self.at_kw("accept") || self.at_kw("query") {
                    self.error_at(t, "the `ars` section must come first".to_string())
                } else {
                    self.unexpected(&["`ars`"])
                });
            }
            let section = if is_ars {
                if self.ars.is_some() {
                    return Err(self.error_at(t, "a document declares exactly one `ars` section".to_string()));
                }
                Section::Ars(self.ars_section()?)
            } else if self.at_kw("order") {
                Section::Order(self.order_section()?)
            } else if self.at_kw("accept") {
                self.accept_section()?
            } else if self.at_kw("strategy") {
                self.strategy_section()?
            } else if self.at_kw("query") {
                Section::Query(self.query_section()?)
            } else {
                return Err(self.unexpected(&["`order`", "`accept`", "`strategy`", "`query`", "end of input"]));
            };
            sections.push(section);
        }
        let model = Model {
            ars: self.ars.take().expect("ars present"),
            orders: std::mem::take(&mut self.orders),
            accepts: std::mem::take(&mut self.accepts),
            strategies: std::mem::take(&mut self.strategies),
        };
        Ok(SpecDocument { sections, model })
    }

    fn id_list(&mut self) -> PResult<Vec<(String, Token)>> {
        let mut out = vec![self.ident()?];
        while self.at_sym(",") {
            self.bump();
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn ars_section(&mut self) -> PResult<ArsDecl> {
        let kw = self.expect_kw("ars")?;
        self.expect_sym("{")?;
        self.expect_kw("objects")?;
        self.expect_sym(":")?;
        let objects = self.id_list()?;
        self.expect_sym(";")?;
        self.expect_kw("labels")?;
        self.expect_sym(":")?;
        let labels = self.id_list()?;
        self.expect_sym(";")?;
        self.expect_kw("steps")?;
        self.expect_sym(":")?;
        let mut steps = vec![self.step_triple()?];
        while self.at_sym(",") {
            self.bump();
            steps.push(self.step_triple()?);
        }
        self.expect_sym(";")?;
        self.expect_sym("}")?;

        let mut seen_objects = BTreeSet::new();
        for (name, t) in &objects {
            if !seen_objects.insert(name.as_str()) {
                return Err(self.error_at(*t, ArsError::DuplicateSymbol(name.clone()).to_string()));
            }
        }
        let mut seen_labels = BTreeSet::new();
        for (name, t) in &labels {
            if seen_objects.contains(name.as_str()) {
                return Err(self.error_at(*t, ArsError::ObjectLabelOverlap(name.clone()).to_string()));
            }
            if !seen_labels.insert(name.as_str()) {
                return Err(self.error_at(*t, ArsError::DuplicateSymbol(name.clone()).to_string()));
            }
        }
        let object_set: BTreeSet<&str> = objects.iter().map(|(n, _)| n.as_str()).collect();
        let label_set: BTreeSet<&str> = labels.iter().map(|(n, _)| n.as_str()).collect();
        let mut targets: HashMap<(&str, &str), &str> = HashMap::new();
        for (open, [(s, st), (l, lt), (d, dt)]) in &steps {
            for (name, tok, set, what) in [
                (s, st, &object_set, "object"),
                (l, lt, &label_set, "label"),
                (d, dt, &object_set, "object"),
            ] {
                if !set.contains(name.as_str()) {
                    return Err(self.error_at(*tok, format!("undeclared {what} `{name}`")));
                }
            }
            if let Some(prev) = targets.insert((s, l), d) {
                if prev != d {
                    let err = ArsError::FunctionalityViolation {
                        from: s.clone(),
                        label: l.clone(),
                        first: prev.to_string(),
                        second: d.clone(),
                    };
                    return Err(self.error_at(*open, err.to_string()));
                }
            }
        }
        let decl = ArsDecl {
            objects: objects.into_iter().map(|(n, _)| n).collect(),
            labels: labels.into_iter().map(|(n, _)| n).collect(),
            steps: steps
                .into_iter()
                .map(|(_, [(s, _), (l, _), (d, _)])| (s, l, d))
                .collect(),
        };
        let ars = Ars::new(&decl.objects, &decl.labels, &decl.steps).map_err(|e| self.error_at(kw, e.to_string()))?;
        self.ars = Some(ars);
        Ok(decl)
    }

    fn step_triple(&mut self) -> PResult<(Token, [(String, Token); 3])> {
        let open = self.expect_sym("(")?;
        let a = self.ident()?;
        self.expect_sym(",")?;
        let l = self.ident()?;
        self.expect_sym(",")?;
        let b = self.ident()?;
        self.expect_sym(")")?;
        Ok((open, [a, l, b]))
    }

    fn label_id(&self, name: &str, t: Token) -> PResult<crate::ars::LabelId> {
        self.ars()
            .label(name)
            .ok_or_else(|| self.error_at(t, format!("undeclared label `{name}`")))
    }

    fn object_id(&self, name: &str, t: Token) -> PResult<ObjectId> {
        self.ars()
            .object(name)
            .ok_or_else(|| self.error_at(t, format!("undeclared object `{name}`")))
    }

    fn order_section(&mut self) -> PResult<OrderDecl> {
        self.expect_kw("order")?;
        let (name, name_tok) = self.ident()?;
        if self.orders.contains_key(&name) {
            return Err(self.error_at(name_tok, format!("order `{name}` is already defined")));
        }
        self.expect_sym("{")?;
        let mut pairs = Vec::new();
        let mut ids = Vec::new();
        loop {
            let (lo, lt) = self.ident()?;
            self.expect_sym("<")?;
            let (hi, ht) = self.ident()?;
            self.expect_sym(";")?;
            ids.push((self.label_id(&lo, lt)?, self.label_id(&hi, ht)?));
            pairs.push((lo, hi));
            if self.at_sym("}") {
                self.bump();
                break;
            }
        }
        let order = LabelOrder::new(self.ars(), &ids).map_err(|e| match e {
            OrderError::Cyclic(l) => self.error_at(
                name_tok,
                format!(
                    "order `{name}` is not irreflexive: `{}` < `{}` follows from its pairs",
                    self.ars().label_name(l),
                    self.ars().label_name(l)
                ),
            ),
        })?;
        self.orders.insert(name.clone(), order);
        Ok(OrderDecl { name, pairs })
    }

    fn accept_section(&mut self) -> PResult<Section> {
        self.expect_kw("accept")?;
        let (name, name_tok) = self.ident()?;
        if self.accepts.contains_key(&name) {
            return Err(self.error_at(name_tok, format!("accept condition `{name}` is already defined")));
        }
        self.expect_sym("=")?;
        let (expr, cond) = self.aexpr()?;
        self.expect_sym(";")?;
        self.accepts.insert(name.clone(), cond);
        Ok(Section::Accept { name, expr })
    }

    fn strategy_section(&mut self) -> PResult<Section> {
        self.expect_kw("strategy")?;
        let (name, name_tok) = self.ident()?;
        if self.strategies.contains_key(&name) {
            return Err(self.error_at(name_tok, format!("strategy `{name}` is already defined")));
        }
        self.expect_sym("=")?;
        let (expr, xi) = self.sexpr()?;
        self.expect_sym(";")?;
        self.strategies.insert(name.clone(), xi);
        Ok(Section::Strategy { name, expr })
    }

    fn query_section(&mut self) -> PResult<Query> {
        self.expect_kw("query")?;
        let kind = if self.at_kw("enumerate") {
            self.bump();
            QueryKind::Enumerate
        } else if self.at_kw("apply") {
            self.bump();
            QueryKind::Apply
        } else if self.at_kw("witness") {
            self.bump();
            QueryKind::Witness
        } else if self.at_kw("check") {
            self.bump();
            let prop = [
                ("prefix", Property::PrefixClosed),
                ("factor", Property::FactorClosed),
                ("composition", Property::CompositionClosed),
                ("closed", Property::Closed),
            ]
            .into_iter()
            .find(|(k, _)| self.at_kw(k))
            .map(|(_, p)| p)
            .ok_or_else(|| self.unexpected(&["`prefix`", "`factor`", "`composition`", "`closed`"]))?;
            self.bump();
            QueryKind::Check(prop)
        } else {
            return Err(self.unexpected(&["`enumerate`", "`apply`", "`check`", "`witness`"]));
        };

        let strategy = if kind == QueryKind::Enumerate && self.peek().kind != Kind::Ident {
            None
        } else {
            let (name, t) = self.ident()?;
            if !self.strategies.contains_key(&name) {
                return Err(self.error_at(t, format!("undefined strategy `{name}`")));
            }
            Some(name)
        };
        let mut from = None;
        if kind == QueryKind::Apply || self.at_kw("from") {
            self.expect_kw("from")?;
            let (name, t) = self.ident()?;
            self.object_id(&name, t)?;
            from = Some(name);
        }
        let mut depth = None;
        if self.at_kw("depth") {
            self.bump();
            let (k, t) = self.int()?;
            if k == 0 {
                return Err(self.error_at(t, "depth must be at least 1".to_string()));
            }
            depth = Some(k);
        }
        let mut horizon = None;
        if self.at_kw("horizon") {
            self.bump();
            let (k, t) = self.int()?;
            if k == 0 {
                return Err(self.error_at(t, "horizon must be at least 1".to_string()));
            }
            horizon = Some(k);
        }
        if !self.at_sym(";") {
            let mut expected = Vec::new();
            if from.is_none() {
                expected.push("`from`");
            }
            if depth.is_none() && horizon.is_none() {
                expected.push("`depth`");
            }
            if horizon.is_none() {
                expected.push("`horizon`");
            }
            expected.push("`;`");
            return Err(self.unexpected(&expected));
        }
        self.bump();
        Ok(Query {
            kind,
            strategy,
            from,
            depth,
            horizon,
        })
    }

    fn set(&mut self) -> PResult<Vec<(SetItem, Token)>> {
        self.expect_sym("{")?;
        let mut items = Vec::new();
        if self.at_sym("}") {
            self.bump();
            return Ok(items);
        }
        loop {
            let t = self.peek();
            if self.at_sym("(") {
                let (_, [(a, _), (l, _), (b, _)]) = self.step_triple()?;
                items.push((SetItem::Step(a, l, b), t));
            } else {
                let (name, _) = self.ident()?;
                items.push((SetItem::Label(name), t));
            }
            if self.at_sym(",") {
                self.bump();
            } else {
                self.expect_sym("}")?;
                return Ok(items);
            }
        }
    }

    fn step_set(&self, items: &[(SetItem, Token)]) -> PResult<StepSet> {
        let mut set = StepSet::default();
        for (item, t) in items {
            match item {
                SetItem::Label(l) => {
                    set.labels.insert(self.label_id(l, *t)?);
                }
                SetItem::Step(a, l, b) => {
                    let ars = self.ars();
                    let step = ars
                        .object(a)
                        .zip(ars.label(l))
                        .and_then(|(a, l)| ars.step(a, l))
                        .filter(|s| ars.object_name(s.target) == b)
                        .ok_or_else(|| self.error_at(*t, format!("({a}, {l}, {b}) is not a step of the system")))?;
                    set.steps.insert(step);
                }
            }
        }
        Ok(set)
    }

    fn bare(items: Vec<(SetItem, Token)>) -> SetExpr {
        SetExpr {
            items: items.into_iter().map(|(i, _)| i).collect(),
        }
    }

    fn sexpr(&mut self) -> PResult<(StrategyExpr, IntensionalStrategy)> {
        self.enter()?;
        let r = self.sexpr_inner();
        self.leave();
        r
    }

    fn sexpr_inner(&mut self) -> PResult<(StrategyExpr, IntensionalStrategy)> {
        let t = self.peek();
        if t.kind == Kind::Ident {
            let (name, t) = self.ident()?;
            let xi = self
                .strategies
                .get(&name)
                .cloned()
                .ok_or_else(|| self.error_at(t, format!("undefined strategy `{name}`")))?;
            return Ok((StrategyExpr::Ref(name), xi));
        }
        if t.kind != Kind::Keyword {
            return Err(self.unexpected(&["strategy expression"]));
        }
        let kw = self.text(t);
        match kw {
            "universal" => {
                self.bump();
                Ok((StrategyExpr::Universal, IntensionalStrategy::Universal))
            }
            "fail" => {
                self.bump();
                Ok((StrategyExpr::Fail, IntensionalStrategy::Fail))
            }
            "greatmost" => {
                self.bump();
                self.expect_sym("(")?;
                let (name, nt) = self.ident()?;
                self.expect_sym(")")?;
                let order = self
                    .orders
                    .get(&name)
                    .cloned()
                    .ok_or_else(|| self.error_at(nt, format!("undefined order `{name}`")))?;
                Ok((StrategyExpr::Greatmost(name), IntensionalStrategy::Greatmost(order)))
            }
            "maxlen" => {
                self.bump();
                self.expect_sym("(")?;
                let (k, _) = self.int()?;
                self.expect_sym(")")?;
                Ok((StrategyExpr::MaxLen(k), IntensionalStrategy::MaxLen(k)))
            }
            "alternate" | "colors" => {
                self.bump();
                self.expect_sym("(")?;
                let first = self.set()?;
                self.expect_sym(";")?;
                let second = self.set()?;
                self.expect_sym(")")?;
                if kw == "alternate" {
                    let xi = IntensionalStrategy::Alternate {
                        first: self.step_set(&first)?,
                        second: self.step_set(&second)?,
                    };
                    return Ok((StrategyExpr::Alternate(Self::bare(first), Self::bare(second)), xi));
                }
                let mut coloring = BTreeMap::new();
                for (items, color) in [(&first, Color::White), (&second, Color::Black)] {
                    for (item, it) in items {
                        let SetItem::Label(l) = item else {
                            return Err(self.error_at(*it, "colors take labels, not steps".to_string()));
                        };
                        let id = self.label_id(l, *it)?;
                        if coloring.insert(id, color).is_some() {
                            return Err(self.error_at(*it, format!("label `{l}` is colored twice")));
                        }
                    }
                }
                Ok((
                    StrategyExpr::Colors(Self::bare(first), Self::bare(second)),
                    IntensionalStrategy::ColorAlternate(coloring),
                ))
            }
            "restrict" => {
                self.bump();
                self.expect_sym("(")?;
                let items = self.set()?;
                self.expect_sym(")")?;
                let mut allowed = BTreeSet::new();
                for (item, it) in &items {
                    let SetItem::Label(l) = item else {
                        return Err(self.error_at(*it, "restrict takes labels, not steps".to_string()));
                    };
                    allowed.insert(self.label_id(l, *it)?);
                }
                Ok((StrategyExpr::Restrict(Self::bare(items)), IntensionalStrategy::RestrictLabels(allowed)))
            }
            "intersect" => {
                self.bump();
                self.expect_sym("(")?;
                let mut exprs = Vec::new();
                let mut xis = Vec::new();
                let (e, x) = self.sexpr()?;
                exprs.push(e);
                xis.push(x);
                loop {
                    if exprs.len() >= 2 && self.at_sym(")") {
                        self.bump();
                        break;
                    }
                    if exprs.len() >= 2 && !self.at_sym(",") {
                        return Err(self.unexpected(&["`,`", "`)`"]));
                    }
                    self.expect_sym(",")?;
                    let (e, x) = self.sexpr()?;
                    exprs.push(e);
                    xis.push(x);
                }
                Ok((StrategyExpr::Intersect(exprs), IntensionalStrategy::Intersect(xis)))
            }
            "unionP" | "unionC" => {
                self.bump();
                self.expect_sym("(")?;
                let (e1, x1) = self.sexpr()?;
                self.expect_sym(",")?;
                let (e2, x2) = self.sexpr()?;
                self.expect_sym(")")?;
                if kw == "unionP" {
                    Ok((
                        StrategyExpr::UnionP(Box::new(e1), Box::new(e2)),
                        IntensionalStrategy::union_pointwise(x1, x2),
                    ))
                } else {
                    Ok((
                        StrategyExpr::UnionC(Box::new(e1), Box::new(e2)),
                        IntensionalStrategy::union_committed(x1, x2),
                    ))
                }
            }
            "accept" => {
                self.bump();
                self.expect_sym("(")?;
                let (e, x) = self.sexpr()?;
                self.expect_sym(",")?;
                let (a, cond) = self.aexpr()?;
                self.expect_sym(")")?;
                Ok((
                    StrategyExpr::Accept(Box::new(e), a),
                    LogicalStrategy::new(x, cond).into_strategy(),
                ))
            }
            _ => Err(self.unexpected(&["strategy expression"])),
        }
    }

    fn aexpr(&mut self) -> PResult<(AcceptExpr, AcceptCondition)> {
        self.enter()?;
        let r = self.aexpr_inner();
        self.leave();
        r
    }

    fn aexpr_list(&mut self) -> PResult<(Vec<AcceptExpr>, Vec<AcceptCondition>)> {
        self.expect_sym("(")?;
        let mut exprs = Vec::new();
        let mut conds = Vec::new();
        loop {
            let (e, c) = self.aexpr()?;
            exprs.push(e);
            conds.push(c);
            if self.at_sym(",") {
                self.bump();
            } else {
                self.expect_sym(")")?;
                return Ok((exprs, conds));
            }
        }
    }

    fn aexpr_inner(&mut self) -> PResult<(AcceptExpr, AcceptCondition)> {
        let t = self.peek();
        if t.kind == Kind::Ident {
            let (name, t) = self.ident()?;
            let cond = self
                .accepts
                .get(&name)
                .cloned()
                .ok_or_else(|| self.error_at(t, format!("undefined accept condition `{name}`")))?;
            return Ok((AcceptExpr::Ref(name), cond));
        }
        if t.kind != Kind::Keyword {
            return Err(self.unexpected(&["accept expression"]));
        }
        match self.text(t) {
            "true" => {
                self.bump();
                Ok((AcceptExpr::True, AcceptCondition::True))
            }
            "false" => {
                self.bump();
                Ok((AcceptExpr::False, AcceptCondition::False))
            }
            "word" => {
                self.bump();
                self.word()
            }
            "len" => {
                self.bump();
                let cmp = [("<", Cmp::Lt), ("<=", Cmp::Le), ("=", Cmp::Eq), (">=", Cmp::Ge), (">", Cmp::Gt)]
                    .into_iter()
                    .find(|(s, _)| self.at_sym(s))
                    .map(|(_, c)| c)
                    .ok_or_else(|| self.unexpected(&["`<`", "`<=`", "`=`", "`>=`", "`>`"]))?;
                self.bump();
                let (k, _) = self.int()?;
                let cond = match cmp {
                    Cmp::Lt if k == 0 => AcceptCondition::False,
                    Cmp::Lt => AcceptCondition::LenAtMost(k - 1),
                    Cmp::Le => AcceptCondition::LenAtMost(k),
                    Cmp::Eq => AcceptCondition::LenEq(k),
                    Cmp::Ge => AcceptCondition::LenAtLeast(k),
                    Cmp::Gt => AcceptCondition::LenAtLeast(k.saturating_add(1)),
                };
                Ok((AcceptExpr::Len(cmp, k), cond))
            }
            "at" => {
                self.bump();
                self.expect_sym("(")?;
                let (name, nt) = self.ident()?;
                self.expect_sym(")")?;
                let a = self.object_id(&name, nt)?;
                Ok((AcceptExpr::At(name), AcceptCondition::AtObject(a)))
            }
            "trace" => {
                self.bump();
                self.expect_sym("(")?;
                let mut names = Vec::new();
                let mut pairs = Vec::new();
                loop {
                    let (o, ot) = self.ident()?;
                    let obj = self.object_id(&o, ot)?;
                    names.push(o);
                    if self.at_sym(")") {
                        self.bump();
                        let trace = Trace::new(pairs, obj);
                        self.ars()
                            .derivation_of_trace(&trace)
                            .map_err(|e| self.error_at(t, e.to_string()))?;
                        let set = BTreeSet::from([trace]);
                        return Ok((AcceptExpr::Trace(names), AcceptCondition::ExplicitTraceSet(set)));
                    }
                    self.expect_sym(",")?;
                    let (l, lt) = self.ident()?;
                    let label = self.label_id(&l, lt)?;
                    names.push(l);
                    pairs.push((obj, label));
                    self.expect_sym(",")?;
                }
            }
            "always" | "not" => {
                let tok = self.bump();
                let kw = self.text(tok);
                self.expect_sym("(")?;
                let (e, c) = self.aexpr()?;
                self.expect_sym(")")?;
                if kw == "always" {
                    Ok((AcceptExpr::Always(Box::new(e)), AcceptCondition::Invariant(Box::new(c))))
                } else {
                    Ok((AcceptExpr::Not(Box::new(e)), AcceptCondition::Not(Box::new(c))))
                }
            }
            "and" => {
                self.bump();
                let (es, cs) = self.aexpr_list()?;
                Ok((AcceptExpr::And(es), AcceptCondition::And(cs)))
            }
            "or" => {
                self.bump();
                let (es, cs) = self.aexpr_list()?;
                Ok((AcceptExpr::Or(es), AcceptCondition::Or(cs)))
            }
            _ => Err(self.unexpected(&["accept expression"])),
        }
    }

    /// `word` has been consumed; the expression text between the
    /// parentheses goes to the rational-expression parser.
    fn word(&mut self) -> PResult<(AcceptExpr, AcceptCondition)> {
        let open = self.expect_sym("(")?;
        let first = self.pos;
        let mut depth = 0usize;
        loop {
            let t = self.peek();
            if t.kind == Kind::Eof {
                return Err(self.unexpected(&["`)`"]));
            }
            if self.at_sym("(") {
                depth += 1;
            } else if self.at_sym(")") {
                if depth == 0 {
                    break;
                }
                depth -= 1;
            }
            self.bump();
        }
        let close = self.bump();
        let raw = &self.src[open.end..close.start];
        let syntax = rexp::parse_syntax(raw).map_err(|e| match e {
            RexpError::Parse {
                position,
                expected,
                found,
            } => diagnostic_at(
                self.src,
                open.end + position,
                format!("in word expression: expected {expected}, found {found}"),
                vec![expected],
            ),
            other => self.error_at(open, other.to_string()),
        })?;
        let expr = RationalExpr::resolve(&syntax, self.ars()).map_err(|e| {
            let at = match &e {
                RexpError::UnknownLabel(name) => self.toks[first..self.pos]
                    .iter()
                    .find(|t| t.text(self.src) == name)
                    .copied()
                    .unwrap_or(open),
                _ => open,
            };
            self.error_at(at, e.to_string())
        })?;
        Ok((AcceptExpr::Word(syntax), AcceptCondition::LabelWordIn(expr)))
    }
}
