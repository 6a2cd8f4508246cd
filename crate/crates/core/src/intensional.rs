//! Intensional strategies: partial functions from traced objects to sets of
//! next steps.
//!
//! A strategy is a closed algebra of built-ins and combinators. Evaluating it
//! on `⟨α⟩a` yields a [`Choice`]: a subset of the out-steps of `a`, together
//! with whether the strategy is defined there at all. The finite support of
//! its extension is generated by [`IntensionalStrategy::finite_support`],
//! truncated at a depth.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::ars::{label_id, object_id, Ars, Derivation, LabelId, Lasso, ObjectId, Step, Trace};
use crate::logical::{CharacteristicPredicate, LogicalStrategy};
use crate::strategy::{AbstractStrategy, Verdict, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntensionalError {
    #[error("strategy uses its history; a memoryless strategy is required")]
    MemoryRequired,
    #[error("strategy is not factor-closed: {0:?}")]
    NotFactorClosed(Box<Violation>),
    #[error("strategy is not closed under composition: {0:?}")]
    NotCompositionClosed(Box<Violation>),
    #[error("strategy is not prefix-closed: {0:?}")]
    NotPrefixClosed(Box<Violation>),
    #[error("strategy has infinite members; only finite derivation sets are accepted")]
    HasLassos,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("order relates {0:?} to itself")]
    Cyclic(LabelId),
}

/// A strict partial order on labels, stored transitively closed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelOrder {
    less: BTreeSet<(LabelId, LabelId)>,
    total: bool,
}

impl LabelOrder {
    /// Closes `pairs` (read as `lo < hi`) transitively and rejects cycles.
    /// Totality is judged over the labels of `ars`.
    pub fn new(ars: &Ars, pairs: &[(LabelId, LabelId)]) -> Result<LabelOrder, OrderError> {
        let mut less: BTreeSet<(LabelId, LabelId)> = pairs.iter().copied().collect();
        loop {
            let mut added = Vec::new();
            for &(x, y) in &less {
                for &(_, z) in less.range((y, label_id(0))..=(y, label_id(u32::MAX))) {
                    if !less.contains(&(x, z)) {
                        added.push((x, z));
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            less.extend(added);
        }
        if let Some(&(x, _)) = less.iter().find(|(x, y)| x == y) {
            return Err(OrderError::Cyclic(x));
        }
        let labels: Vec<LabelId> = ars.labels().collect();
        let total = labels.iter().enumerate().all(|(i, &x)| {
            labels[i + 1..]
                .iter()
                .all(|&y| less.contains(&(x, y)) || less.contains(&(y, x)))
        });
        Ok(LabelOrder { less, total })
    }

    /// `lo < hi` for consecutive entries of `chain`.
    pub fn chain(ars: &Ars, chain: &[LabelId]) -> Result<LabelOrder, OrderError> {
        let pairs: Vec<_> = chain.windows(2).map(|w| (w[0], w[1])).collect();
        LabelOrder::new(ars, &pairs)
    }

    pub fn less(&self, lo: LabelId, hi: LabelId) -> bool {
        self.less.contains(&(lo, hi))
    }

    pub fn is_total(&self) -> bool {
        self.total
    }

    pub fn pairs(&self) -> &BTreeSet<(LabelId, LabelId)> {
        &self.less
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn negate(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

/// A set of steps given by labels, explicit steps, or both.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepSet {
    pub labels: BTreeSet<LabelId>,
    pub steps: BTreeSet<Step>,
}

impl StepSet {
    pub fn of_labels(labels: impl IntoIterator<Item = LabelId>) -> StepSet {
        StepSet {
            labels: labels.into_iter().collect(),
            steps: BTreeSet::new(),
        }
    }

    pub fn of_steps(steps: impl IntoIterator<Item = Step>) -> StepSet {
        StepSet {
            labels: BTreeSet::new(),
            steps: steps.into_iter().collect(),
        }
    }

    pub fn contains(&self, step: &Step) -> bool {
        self.labels.contains(&step.label) || self.steps.contains(step)
    }
}

/// Which traced objects a table entry covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TracePattern {
    Any,
    /// Any history ending at the object.
    At(ObjectId),
    /// Exactly the traces with `⟦α⟧` equal to the derivation; an empty
    /// derivation at `a` matches `⟨Λ⟩a`.
    Exact(Derivation),
    /// Traces whose derivation extends the given one.
    Extends(Derivation),
}

impl TracePattern {
    pub fn matches(&self, trace: &Trace) -> bool {
        match self {
            TracePattern::Any => true,
            TracePattern::At(a) => trace.head() == *a,
            TracePattern::Exact(d) => d.matches_trace(trace),
            TracePattern::Extends(d) => d.is_traced_prefix_of(trace),
        }
    }

    fn is_memoryless(&self) -> bool {
        matches!(self, TracePattern::Any | TracePattern::At(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableValue {
    AllSteps,
    Steps(BTreeSet<Step>),
}

/// An explicit finite strategy: the first matching entry decides, and a
/// trace matched by no entry is outside the domain.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StrategyTable {
    entries: Vec<(TracePattern, TableValue)>,
}

impl StrategyTable {
    pub fn new() -> StrategyTable {
        StrategyTable::default()
    }

    pub fn entry(mut self, pattern: TracePattern, value: TableValue) -> StrategyTable {
        self.entries.push((pattern, value));
        self
    }

    pub fn push(&mut self, pattern: TracePattern, value: TableValue) {
        self.entries.push((pattern, value));
    }

    pub fn entries(&self) -> &[(TracePattern, TableValue)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemoryClass {
    Memoryless,
    Memoried,
}

/// Steps chosen at a traced object. `defined = false` means the traced
/// object is outside the strategy's domain; `steps` is then empty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Choice {
    pub defined: bool,
    pub steps: Vec<Step>,
}

impl Choice {
    fn undefined() -> Choice {
        Choice::default()
    }

    fn defined(steps: Vec<Step>) -> Choice {
        Choice { defined: true, steps }
    }

    pub fn contains(&self, step: &Step) -> bool {
        self.steps.contains(step)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IntensionalStrategy {
    /// Every out-step, everywhere.
    Universal,
    /// Defined nowhere.
    Fail,
    /// Out-steps whose label is maximal among the out-labels.
    Greatmost(LabelOrder),
    /// All out-steps while `|α| < k − 1`.
    MaxLen(usize),
    /// Steps from the first set after a step of the second (and at the
    /// start), steps from the second after a step of the first.
    Alternate { first: StepSet, second: StepSet },
    /// Steps of the color opposite to the last step's color.
    ColorAlternate(BTreeMap<LabelId, Color>),
    RestrictLabels(BTreeSet<LabelId>),
    /// Pointwise intersection; the empty family is universal.
    Intersect(Vec<IntensionalStrategy>),
    /// Pointwise union; the empty family fails.
    UnionPointwise(Vec<IntensionalStrategy>),
    /// Union committed to the children the history is consistent with.
    UnionCommitted(Vec<IntensionalStrategy>),
    Table(StrategyTable),
    /// Out-steps whose label satisfies the characteristic predicate.
    Predicate(CharacteristicPredicate),
    /// Steps of the base; the acceptance condition only filters what the
    /// strategy generates.
    Accept(Box<LogicalStrategy>),
}

impl IntensionalStrategy {
    pub fn intersect(children: Vec<IntensionalStrategy>) -> IntensionalStrategy {
        IntensionalStrategy::Intersect(children)
    }

    pub fn union_pointwise(a: IntensionalStrategy, b: IntensionalStrategy) -> IntensionalStrategy {
        IntensionalStrategy::UnionPointwise(vec![a, b])
    }

    pub fn union_committed(a: IntensionalStrategy, b: IntensionalStrategy) -> IntensionalStrategy {
        IntensionalStrategy::UnionCommitted(vec![a, b])
    }

    pub fn memory_class(&self) -> MemoryClass {
        use IntensionalStrategy::*;
        let all = |xs: &[IntensionalStrategy]| {
            if xs.iter().all(|x| x.memory_class() == MemoryClass::Memoryless) {
                MemoryClass::Memoryless
            } else {
                MemoryClass::Memoried
            }
        };
        match self {
            Universal | Fail | Greatmost(_) | RestrictLabels(_) => MemoryClass::Memoryless,
            MaxLen(_) | Alternate { .. } | ColorAlternate(_) => MemoryClass::Memoried,
            Intersect(xs) | UnionPointwise(xs) => all(xs),
            UnionCommitted(xs) if xs.len() <= 1 => all(xs),
            UnionCommitted(_) => MemoryClass::Memoried,
            Table(t) => {
                if t.entries().iter().all(|(p, _)| p.is_memoryless()) {
                    MemoryClass::Memoryless
                } else {
                    MemoryClass::Memoried
                }
            }
            Predicate(p) => p.memory_class(),
            Accept(ls) => ls.base.memory_class(),
        }
    }

    pub fn eval(&self, ars: &Ars, trace: &Trace) -> Choice {
        use IntensionalStrategy::*;
        let out = ars.out_steps(trace.head());
        let filter = |keep: &dyn Fn(&Step) -> bool| out.iter().copied().filter(|s| keep(s)).collect::<Vec<_>>();
        match self {
            Universal => Choice::defined(out.to_vec()),
            Fail => Choice::undefined(),
            Greatmost(order) => {
                if out.is_empty() {
                    Choice::undefined()
                } else {
                    Choice::defined(filter(&|s| !out.iter().any(|t| order.less(s.label, t.label))))
                }
            }
            MaxLen(k) => {
                if trace.len() + 1 < *k {
                    Choice::defined(out.to_vec())
                } else {
                    Choice::defined(Vec::new())
                }
            }
            Alternate { first, second } => match trace.last_step() {
                None => Choice::defined(filter(&|s| first.contains(s))),
                Some(last) => {
                    let after_second = second.contains(&last);
                    let after_first = first.contains(&last);
                    if !after_first && !after_second {
                        return Choice::undefined();
                    }
                    Choice::defined(filter(&|s| {
                        (after_second && first.contains(s)) || (after_first && second.contains(s))
                    }))
                }
            },
            ColorAlternate(coloring) => match trace.last_step() {
                None => Choice::defined(filter(&|s| coloring.contains_key(&s.label))),
                Some(last) => match coloring.get(&last.label) {
                    None => Choice::undefined(),
                    Some(color) => {
                        let wanted = color.negate();
                        Choice::defined(filter(&|s| coloring.get(&s.label) == Some(&wanted)))
                    }
                },
            },
            RestrictLabels(allowed) => Choice::defined(filter(&|s| allowed.contains(&s.label))),
            Intersect(children) => {
                let mut steps = out.to_vec();
                for child in children {
                    let c = child.eval(ars, trace);
                    if !c.defined {
                        return Choice::undefined();
                    }
                    steps.retain(|s| c.contains(s));
                }
                Choice::defined(steps)
            }
            UnionPointwise(children) => union_of(children.iter().map(|c| c.eval(ars, trace))),
            UnionCommitted(children) => union_of(
                children
                    .iter()
                    .filter(|c| c.history_consistent(ars, trace))
                    .map(|c| c.eval(ars, trace)),
            ),
            Table(table) => match table.entries().iter().find(|(p, _)| p.matches(trace)) {
                None => Choice::undefined(),
                Some((_, TableValue::AllSteps)) => Choice::defined(out.to_vec()),
                Some((_, TableValue::Steps(steps))) => Choice::defined(filter(&|s| steps.contains(s))),
            },
            Predicate(p) => Choice::defined(filter(&|s| p.holds(ars, trace, s.label))),
            Accept(ls) => ls.base.eval(ars, trace),
        }
    }

    /// Every step of `⟦α⟧` was chosen by `self` at its own prefix.
    pub fn history_consistent(&self, ars: &Ars, trace: &Trace) -> bool {
        (0..trace.len()).all(|j| self.eval(ars, &trace.prefix(j)).contains(&trace.step(j)))
    }

    /// Whether every step of `d` obeys the strategy.
    pub fn obeys(&self, ars: &Ars, d: &Derivation) -> bool {
        self.history_consistent(ars, &d.to_trace())
    }

    /// The finite derivations of the extension with at most `depth` steps,
    /// from `sources` (all objects by default).
    ///
    /// Seeds with `ξ(⟨Λ⟩a)` and extends each member `π` by every step of
    /// `ξ(⟨α⟩Im(π))` where `⟦α⟧ = π`.
    pub fn finite_support(&self, ars: &Ars, depth: usize, sources: Option<&[ObjectId]>) -> AbstractStrategy {
        let sources: Vec<ObjectId> = match sources {
            Some(s) => s.to_vec(),
            None => ars.objects().collect(),
        };
        let mut result = BTreeSet::new();
        if depth == 0 {
            return AbstractStrategy::from_nonempty(result);
        }
        let mut frontier: Vec<Derivation> = sources
            .iter()
            .flat_map(|&a| self.eval(ars, &Trace::empty(a)).steps)
            .map(Derivation::from_step)
            .collect();
        for len in 1..=depth {
            let mut next = Vec::new();
            for d in frontier {
                if len < depth {
                    for step in self.eval(ars, &d.to_trace()).steps {
                        next.push(d.extended(step).expect("chosen step leaves the head"));
                    }
                }
                result.insert(d);
            }
            frontier = next;
        }
        AbstractStrategy::from_nonempty(result)
    }

    /// What the strategy generates up to `depth`: the finite support, or the
    /// accepted derivations for a strategy with an acceptance condition.
    pub fn generate(&self, ars: &Ars, depth: usize, sources: Option<&[ObjectId]>) -> AbstractStrategy {
        match self {
            IntensionalStrategy::Accept(ls) => ls.accepted(ars, depth, sources),
            other => other.finite_support(ars, depth, sources),
        }
    }

    /// The sub-system `⋃ₐ ξ(a)` induced by a memoryless strategy.
    pub fn induced_steps(&self, ars: &Ars) -> Result<Vec<Step>, IntensionalError> {
        if self.memory_class() != MemoryClass::Memoryless {
            return Err(IntensionalError::MemoryRequired);
        }
        Ok(ars
            .objects()
            .flat_map(|a| self.eval(ars, &Trace::empty(a)).steps)
            .collect())
    }

    /// Witnesses for the infinite members of the extension of a memoryless
    /// strategy: from every source, one lasso per simple cycle of the
    /// induced sub-system it can reach, with a shortest stem.
    pub fn lassos_of_memoryless(&self, ars: &Ars) -> Result<BTreeSet<Lasso>, IntensionalError> {
        let steps = self.induced_steps(ars)?;
        let mut out_edges: Vec<Vec<Step>> = vec![Vec::new(); ars.object_count()];
        for s in steps {
            out_edges[s.source.index()].push(s);
        }
        let cycles = simple_cycles(&out_edges);
        let mut by_start: HashMap<ObjectId, Vec<&Derivation>> = HashMap::new();
        for c in &cycles {
            by_start.entry(c.source()).or_default().push(c);
        }

        let mut lassos = BTreeSet::new();
        for source in ars.objects() {
            for (vertex, stem) in shortest_paths(&out_edges, source) {
                for cycle in by_start.get(&vertex).into_iter().flatten() {
                    let lasso = Lasso::new(stem.clone(), (*cycle).clone()).expect("stem reaches the cycle");
                    lassos.insert(lasso);
                }
            }
        }
        Ok(lassos)
    }

    /// Memoryless table `a ↦ {a -φ-> b ∈ ζ}` for a finite strategy that is
    /// factor-closed and closed under composition (composites up to the
    /// longest member).
    pub fn memoryless_from(z: &AbstractStrategy) -> Result<IntensionalStrategy, IntensionalError> {
        if !z.lasso_part().is_empty() {
            return Err(IntensionalError::HasLassos);
        }
        if z.is_empty() {
            return Ok(IntensionalStrategy::Fail);
        }
        reject(z.check_factor_closed(), IntensionalError::NotFactorClosed)?;
        reject(
            z.check_composition_closed_within(z.max_len()),
            IntensionalError::NotCompositionClosed,
        )?;
        let mut per_object: BTreeMap<ObjectId, BTreeSet<Step>> = BTreeMap::new();
        for d in z.finite_part().iter().filter(|d| d.len() == 1) {
            per_object.entry(d.source()).or_default().insert(d.step(0));
        }
        let mut table = StrategyTable::new();
        for (a, steps) in per_object {
            table.push(TracePattern::At(a), TableValue::Steps(steps));
        }
        Ok(IntensionalStrategy::Table(table))
    }

    /// Table strategy for a prefix-closed finite strategy:
    /// `ξ(⟨Λ⟩a) = {π ∈ ζ ∩ Γ | Dom(π) = a}` and
    /// `ξ(⟨α⟩a) = {π' ∈ Γ | ⟦α⟧π' ∈ ζ}`.
    pub fn memoried_from(z: &AbstractStrategy) -> Result<IntensionalStrategy, IntensionalError> {
        if !z.lasso_part().is_empty() {
            return Err(IntensionalError::HasLassos);
        }
        reject(z.check_prefix_closed(), IntensionalError::NotPrefixClosed)?;
        let mut next: BTreeMap<Derivation, BTreeSet<Step>> = BTreeMap::new();
        for d in z.finite_part() {
            let n = d.len();
            let prefix = d.prefix(n - 1);
            next.entry(prefix).or_default().insert(d.step(n - 1));
        }
        let mut table = StrategyTable::new();
        for (prefix, steps) in next {
            table.push(TracePattern::Exact(prefix), TableValue::Steps(steps));
        }
        Ok(IntensionalStrategy::Table(table))
    }
}

fn reject(verdict: Verdict, wrap: fn(Box<Violation>) -> IntensionalError) -> Result<(), IntensionalError> {
    match verdict.violation {
        Some(v) => Err(wrap(Box::new(v))),
        None => Ok(()),
    }
}

fn union_of(choices: impl Iterator<Item = Choice>) -> Choice {
    let mut defined = false;
    let mut steps = BTreeSet::new();
    for c in choices {
        defined |= c.defined;
        steps.extend(c.steps);
    }
    Choice {
        defined,
        steps: steps.into_iter().collect(),
    }
}

/// All simple cycles, each listed once per start vertex.
fn simple_cycles(out_edges: &[Vec<Step>]) -> Vec<Derivation> {
    fn walk(
        out_edges: &[Vec<Step>],
        root: ObjectId,
        path: &mut Derivation,
        on_path: &mut Vec<bool>,
        found: &mut Vec<Derivation>,
    ) {
        for &step in &out_edges[path.target().index()] {
            if step.target == root {
                found.push(path.extended(step).unwrap());
            } else if step.target > root && !on_path[step.target.index()] {
                on_path[step.target.index()] = true;
                let mut longer = path.extended(step).unwrap();
                walk(out_edges, root, &mut longer, on_path, found);
                on_path[step.target.index()] = false;
            }
        }
    }

    let mut minimal_rooted = Vec::new();
    for root in 0..out_edges.len() {
        let root = object_id(root as u32);
        let mut on_path = vec![false; out_edges.len()];
        on_path[root.index()] = true;
        walk(out_edges, root, &mut Derivation::empty(root), &mut on_path, &mut minimal_rooted);
    }
    let mut all = Vec::new();
    for c in minimal_rooted {
        for shift in 0..c.len() {
            let rotated = c
                .factor(shift, c.len())
                .compose(&c.factor(0, shift))
                .expect("rotation of a cycle");
            all.push(rotated);
        }
    }
    all
}

/// Breadth-first shortest derivations from `source` to each reachable
/// object, preferring lower labels.
fn shortest_paths(out_edges: &[Vec<Step>], source: ObjectId) -> Vec<(ObjectId, Derivation)> {
    let mut best: BTreeMap<ObjectId, Derivation> = BTreeMap::new();
    best.insert(source, Derivation::empty(source));
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let path = best[&v].clone();
        for &step in &out_edges[v.index()] {
            if let std::collections::btree_map::Entry::Vacant(e) = best.entry(step.target) {
                e.insert(path.extended(step).unwrap());
                queue.push_back(step.target);
            }
        }
    }
    best.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{a_c, a_lc, a_loop, two_loops};

    fn labels(ars: &Ars, names: &[&str]) -> Vec<LabelId> {
        names.iter().map(|n| ars.label(n).unwrap()).collect()
    }

    fn render_all(ars: &Ars, z: &AbstractStrategy) -> Vec<String> {
        z.render(ars)
    }

    fn ascending(ars: &Ars) -> IntensionalStrategy {
        IntensionalStrategy::Greatmost(LabelOrder::chain(ars, &labels(ars, &["phi1", "phi2", "phi3", "phi4"])).unwrap())
    }

    fn descending(ars: &Ars) -> IntensionalStrategy {
        IntensionalStrategy::Greatmost(LabelOrder::chain(ars, &labels(ars, &["phi4", "phi3", "phi2", "phi1"])).unwrap())
    }

    #[test]
    fn order_validation() {
        let ars = a_lc();
        let [p1, p2, p3, _] = labels(&ars, &["phi1", "phi2", "phi3", "phi4"])[..] else {
            unreachable!()
        };
        assert_eq!(LabelOrder::new(&ars, &[(p1, p1)]), Err(OrderError::Cyclic(p1)));
        assert!(matches!(
            LabelOrder::new(&ars, &[(p1, p2), (p2, p3), (p3, p1)]),
            Err(OrderError::Cyclic(_))
        ));
        let partial = LabelOrder::new(&ars, &[(p1, p2), (p2, p3)]).unwrap();
        assert!(partial.less(p1, p3));
        assert!(!partial.is_total());
        assert!(LabelOrder::chain(&ars, &labels(&ars, &["phi1", "phi2", "phi3", "phi4"]))
            .unwrap()
            .is_total());
    }

    #[test]
    fn greatmost_ascending() {
        let ars = a_lc();
        let gm = ascending(&ars);
        let a = ars.object("a").unwrap();
        let choice = gm.eval(&ars, &Trace::empty(a));
        assert_eq!(choice.steps.len(), 1);
        assert_eq!(ars.label_name(choice.steps[0].label), "phi2");
        assert_eq!(
            render_all(&ars, &gm.finite_support(&ars, 5, None)),
            ["a -phi2-> c", "b -phi4-> d"]
        );
        assert!(gm.lassos_of_memoryless(&ars).unwrap().is_empty());
    }

    #[test]
    fn greatmost_descending() {
        let ars = a_lc();
        let gm = descending(&ars);
        assert_eq!(
            render_all(&ars, &gm.finite_support(&ars, 3, None)),
            [
                "a -phi1-> b",
                "a -phi1-> b -phi3-> a",
                "a -phi1-> b -phi3-> a -phi1-> b",
                "b -phi3-> a",
                "b -phi3-> a -phi1-> b",
                "b -phi3-> a -phi1-> b -phi3-> a",
            ]
        );
        let lassos: Vec<String> = gm
            .lassos_of_memoryless(&ars)
            .unwrap()
            .iter()
            .map(|l| ars.render_lasso(l))
            .collect();
        assert_eq!(lassos, ["a ( -phi1-> b -phi3-> a )^w", "b ( -phi3-> a -phi1-> b )^w"]);
    }

    #[test]
    fn greatmost_partial_order_keeps_all_maximal() {
        let ars = a_lc();
        let p = labels(&ars, &["phi3", "phi4"]);
        let gm = IntensionalStrategy::Greatmost(LabelOrder::new(&ars, &[(p[0], p[1])]).unwrap());
        let a = ars.object("a").unwrap();
        assert_eq!(gm.eval(&ars, &Trace::empty(a)).steps.len(), 2);
        let d = ars.object("d").unwrap();
        assert!(!gm.eval(&ars, &Trace::empty(d)).defined);
    }

    #[test]
    fn universal_lassos_on_single_object() {
        let ars = a_c();
        let lassos: Vec<String> = IntensionalStrategy::Universal
            .lassos_of_memoryless(&ars)
            .unwrap()
            .iter()
            .map(|l| ars.render_lasso(l))
            .collect();
        assert_eq!(lassos, ["a ( -phi1-> a )^w", "a ( -phi2-> a )^w"]);
    }

    #[test]
    fn lassos_need_memoryless() {
        let ars = a_c();
        assert_eq!(
            IntensionalStrategy::MaxLen(3).lassos_of_memoryless(&ars),
            Err(IntensionalError::MemoryRequired)
        );
    }

    #[test]
    fn max_len_uses_history_length() {
        let ars = a_loop();
        let k = 3;
        let lt = IntensionalStrategy::MaxLen(k);
        let d = ars.derivation_named("a", &["phi1", "phi2"]).unwrap();
        assert_eq!(d.len(), k - 1);
        assert!(lt.eval(&ars, &d.to_trace()).steps.is_empty());
        let short = ars.derivation_named("a", &["phi1"]).unwrap();
        assert_eq!(lt.eval(&ars, &short.to_trace()).steps.len(), 1);
        assert_eq!(lt.finite_support(&ars, 6, None).max_len(), k - 1);
    }

    #[test]
    fn color_alternation() {
        let ars = a_c();
        let [p1, p2] = labels(&ars, &["phi1", "phi2"])[..] else { unreachable!() };
        let wb = IntensionalStrategy::ColorAlternate(BTreeMap::from([(p1, Color::White), (p2, Color::Black)]));
        let after_white = ars.derivation_named("a", &["phi1"]).unwrap().to_trace();
        let choice = wb.eval(&ars, &after_white);
        assert_eq!(choice.steps.iter().map(|s| s.label).collect::<Vec<_>>(), [p2]);
        let words: Vec<Vec<LabelId>> = wb
            .finite_support(&ars, 4, None)
            .finite_part()
            .iter()
            .map(|d| d.labels().to_vec())
            .collect();
        assert!(words.iter().all(|w| w.windows(2).all(|x| x[0] != x[1])));
        assert_eq!(words.len(), 8);
    }

    #[test]
    fn uncolored_last_step_is_undefined() {
        let ars = a_c();
        let p1 = ars.label("phi1").unwrap();
        let wb = IntensionalStrategy::ColorAlternate(BTreeMap::from([(p1, Color::White)]));
        let after_uncolored = ars.derivation_named("a", &["phi2"]).unwrap().to_trace();
        assert!(!wb.eval(&ars, &after_uncolored).defined);
    }

    #[test]
    fn alternate_switches_sets_each_step() {
        // Γ1 = {a → b, b → c}, Γ2 = {b → b}
        let ars = Ars::new(
            &["a", "b", "c"],
            &["ab", "bb", "bc"],
            &[("a", "ab", "b"), ("b", "bb", "b"), ("b", "bc", "c")],
        )
        .unwrap();
        let step = |s: &str, l: &str| ars.step(ars.object(s).unwrap(), ars.label(l).unwrap()).unwrap();
        let alt = IntensionalStrategy::Alternate {
            first: StepSet::of_steps([step("a", "ab"), step("b", "bc")]),
            second: StepSet::of_steps([step("b", "bb")]),
        };
        let after_ab = ars.derivation_named("a", &["ab"]).unwrap().to_trace();
        assert_eq!(alt.eval(&ars, &after_ab).steps, vec![step("b", "bb")]);
        let after_abb = ars.derivation_named("a", &["ab", "bb"]).unwrap().to_trace();
        assert_eq!(alt.eval(&ars, &after_abb).steps, vec![step("b", "bc")]);
        assert_eq!(alt.memory_class(), MemoryClass::Memoried);
        assert_eq!(
            alt.eval(&ars, &Trace::empty(ars.object("b").unwrap())).steps,
            vec![step("b", "bc")]
        );
    }

    #[test]
    fn fail_is_empty() {
        let ars = a_lc();
        assert!(IntensionalStrategy::Fail.finite_support(&ars, 4, None).is_empty());
        assert!(IntensionalStrategy::intersect(vec![IntensionalStrategy::Fail, ascending(&ars)])
            .finite_support(&ars, 4, None)
            .is_empty());
    }

    #[test]
    fn intersect_with_universal_is_identity() {
        let ars = a_lc();
        let gm = descending(&ars);
        let both = IntensionalStrategy::intersect(vec![IntensionalStrategy::Universal, gm.clone()]);
        for d in ars.enumerate_derivations(None, 4) {
            let t = d.to_trace();
            assert_eq!(both.eval(&ars, &t).steps, gm.eval(&ars, &t).steps);
        }
    }

    fn spoke(ars: &Ars, out: (&str, &str), back: (&str, &str)) -> IntensionalStrategy {
        let step = |s: &str, l: &str| ars.step(ars.object(s).unwrap(), ars.label(l).unwrap()).unwrap();
        IntensionalStrategy::Table(
            StrategyTable::new()
                .entry(
                    TracePattern::At(ars.object(out.0).unwrap()),
                    TableValue::Steps(BTreeSet::from([step(out.0, out.1)])),
                )
                .entry(
                    TracePattern::At(ars.object(back.0).unwrap()),
                    TableValue::Steps(BTreeSet::from([step(back.0, back.1)])),
                ),
        )
    }

    #[test]
    fn pointwise_union_crosses_over_committed_does_not() {
        let ars = two_loops();
        let x1 = spoke(&ars, ("a", "phi1"), ("b1", "beta1"));
        let x2 = spoke(&ars, ("a", "phi2"), ("b2", "beta2"));
        let crossing = ars.derivation_named("a", &["phi1", "beta1", "phi2"]).unwrap();

        let pointwise = IntensionalStrategy::union_pointwise(x1.clone(), x2.clone()).finite_support(&ars, 4, None);
        assert!(pointwise.contains(&crossing));

        let committed = IntensionalStrategy::union_committed(x1.clone(), x2.clone());
        for k in 1..=6 {
            let mut expected = x1.finite_support(&ars, k, None).into_finite_part();
            expected.extend(x2.finite_support(&ars, k, None).into_finite_part());
            assert_eq!(committed.finite_support(&ars, k, None).into_finite_part(), expected);
        }

        let with_fail = IntensionalStrategy::union_committed(x1.clone(), IntensionalStrategy::Fail);
        assert_eq!(with_fail.finite_support(&ars, 5, None), x1.finite_support(&ars, 5, None));
    }

    #[test]
    fn memoryless_round_trip() {
        let ars = a_loop();
        let z = AbstractStrategy::finite(ars.enumerate_derivations(None, 2)).unwrap();
        let xi = IntensionalStrategy::memoryless_from(&z).unwrap();
        assert_eq!(xi.memory_class(), MemoryClass::Memoryless);
        assert_eq!(xi.finite_support(&ars, 2, None), z);
    }

    #[test]
    fn memoryless_from_rejects_missing_factor() {
        let ars = a_lc();
        let z = AbstractStrategy::finite([ars.derivation_named("a", &["phi1", "phi3"]).unwrap()]).unwrap();
        assert!(matches!(
            IntensionalStrategy::memoryless_from(&z),
            Err(IntensionalError::NotFactorClosed(_))
        ));
        assert_eq!(
            IntensionalStrategy::memoryless_from(&AbstractStrategy::fail()),
            Ok(IntensionalStrategy::Fail)
        );
    }

    #[test]
    fn memoried_round_trip() {
        let ars = a_lc();
        let target = ars.derivation_named("a", &["phi1", "phi3", "phi2"]).unwrap();
        let z = AbstractStrategy::finite([target]).unwrap().prefix_closure();
        let xi = IntensionalStrategy::memoried_from(&z).unwrap();
        assert_eq!(xi.memory_class(), MemoryClass::Memoried);
        assert_eq!(xi.finite_support(&ars, 3, None), z);
        assert_eq!(xi.finite_support(&ars, 6, None), z);
    }

    #[test]
    fn memoried_from_rejects_missing_prefix() {
        let ars = a_lc();
        let z = AbstractStrategy::finite([ars.derivation_named("a", &["phi1", "phi3"]).unwrap()]).unwrap();
        let Err(IntensionalError::NotPrefixClosed(v)) = IntensionalStrategy::memoried_from(&z) else {
            panic!("expected a prefix violation");
        };
        assert_eq!(ars.render(v.missing()), "a -phi1-> b");
    }

    #[test]
    fn single_steps_give_a_memoryless_equivalent_table() {
        let ars = a_lc();
        let z = AbstractStrategy::finite(ars.enumerate_derivations(None, 1)).unwrap();
        let xi = IntensionalStrategy::memoried_from(&z).unwrap();
        assert_eq!(xi.finite_support(&ars, 4, None), z);
        let memoryless = IntensionalStrategy::intersect(vec![
            IntensionalStrategy::Universal,
            IntensionalStrategy::MaxLen(2),
        ]);
        assert_eq!(memoryless.finite_support(&ars, 4, None), z);
    }

    #[test]
    fn table_extends_pattern_blocks_continuations() {
        let ars = a_lc();
        let blocked = ars.derivation_named("a", &["phi1"]).unwrap();
        let xi = IntensionalStrategy::Table(
            StrategyTable::new()
                .entry(TracePattern::Extends(blocked.clone()), TableValue::Steps(BTreeSet::new()))
                .entry(TracePattern::Any, TableValue::AllSteps),
        );
        let support = xi.finite_support(&ars, 4, None);
        assert!(support.contains(&blocked));
        assert!(support.finite_part().iter().all(|d| !(blocked.is_prefix_of(d) && d.len() > 1)));
    }
}
