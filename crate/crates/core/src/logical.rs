//! Logical strategies: a characteristic predicate or intensional base that
//! chooses steps, and an accepting condition that selects which generated
//! derivations count.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::ars::{Ars, Derivation, LabelId, Lasso, ObjectId, Trace};
use crate::intensional::{IntensionalStrategy, LabelOrder, MemoryClass};
use crate::rexp::RationalExpr;
use crate::strategy::AbstractStrategy;

type PredicateFn = dyn Fn(&[LabelId], ObjectId, LabelId) -> bool + Send + Sync;

/// A named predicate over (history label word, current object, candidate
/// label).
#[derive(Clone)]
pub struct CustomPredicate {
    name: String,
    memoryless: bool,
    test: Arc<PredicateFn>,
}

impl CustomPredicate {
    /// `memoryless` promises the test ignores the label word.
    pub fn new(
        name: impl Into<String>,
        memoryless: bool,
        test: impl Fn(&[LabelId], ObjectId, LabelId) -> bool + Send + Sync + 'static,
    ) -> CustomPredicate {
        CustomPredicate {
            name: name.into(),
            memoryless,
            test: Arc::new(test),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for CustomPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomPredicate({})", self.name)
    }
}

impl PartialEq for CustomPredicate {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && Arc::ptr_eq(&self.test, &other.test)
    }
}

/// `P(⟨α⟩a, φ)`: whether the step labeled `φ` out of `a` may be taken.
#[derive(Debug, Clone, PartialEq)]
pub enum CharacteristicPredicate {
    True,
    False,
    Greatmost(LabelOrder),
    /// `|α| < k`.
    LenLess(usize),
    /// Alternation between label sets; either set may start.
    Alternate {
        first: BTreeSet<LabelId>,
        second: BTreeSet<LabelId>,
    },
    Custom(CustomPredicate),
}

impl CharacteristicPredicate {
    pub fn holds(&self, ars: &Ars, trace: &Trace, label: LabelId) -> bool {
        use CharacteristicPredicate::*;
        match self {
            True => true,
            False => false,
            Greatmost(order) => ars
                .out_steps(trace.head())
                .iter()
                .all(|s| !order.less(label, s.label)),
            LenLess(k) => trace.len() < *k,
            Alternate { first, second } => match trace.pairs().last() {
                None => first.contains(&label) || second.contains(&label),
                Some(&(_, prev)) => {
                    (first.contains(&prev) && second.contains(&label))
                        || (second.contains(&prev) && first.contains(&label))
                }
            },
            Custom(c) => (c.test)(&trace.label_word(), trace.head(), label),
        }
    }

    pub fn memory_class(&self) -> MemoryClass {
        use CharacteristicPredicate::*;
        match self {
            True | False | Greatmost(_) => MemoryClass::Memoryless,
            Custom(c) if c.memoryless => MemoryClass::Memoryless,
            LenLess(_) | Alternate { .. } | Custom(_) => MemoryClass::Memoried,
        }
    }
}

/// The intensional strategy `ξ(⟨α⟩a) = {(a,φ,b) ∈ Γ | P(⟨α⟩a, φ)}`.
pub fn pred_to_strategy(p: CharacteristicPredicate) -> IntensionalStrategy {
    IntensionalStrategy::Predicate(p)
}

/// A decidable set of traced objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AcceptCondition {
    True,
    False,
    /// The whole label word is in the language.
    LabelWordIn(RationalExpr),
    LenAtLeast(usize),
    LenAtMost(usize),
    LenEq(usize),
    AtObject(ObjectId),
    ExplicitTraceSet(BTreeSet<Trace>),
    /// Every prefix, including `⟨Λ⟩` at the source, satisfies the condition.
    Invariant(Box<AcceptCondition>),
    And(Vec<AcceptCondition>),
    Or(Vec<AcceptCondition>),
    Not(Box<AcceptCondition>),
}

impl AcceptCondition {
    pub fn accepts(&self, trace: &Trace) -> bool {
        use AcceptCondition::*;
        match self {
            True => true,
            False => false,
            LabelWordIn(r) => r.matches(&trace.label_word()),
            LenAtLeast(k) => trace.len() >= *k,
            LenAtMost(k) => trace.len() <= *k,
            LenEq(k) => trace.len() == *k,
            AtObject(a) => trace.head() == *a,
            ExplicitTraceSet(set) => set.contains(trace),
            Invariant(c) => (0..=trace.len()).all(|n| c.accepts(&trace.prefix(n))),
            And(cs) => cs.iter().all(|c| c.accepts(trace)),
            Or(cs) => cs.iter().any(|c| c.accepts(trace)),
            Not(c) => !c.accepts(trace),
        }
    }

    /// True only when no extension of `trace` (itself included) can be
    /// accepted. Conservative: `false` means "don't know".
    pub fn is_dead(&self, trace: &Trace) -> bool {
        use AcceptCondition::*;
        match self {
            False => true,
            LenAtMost(k) => trace.len() > *k,
            Invariant(c) => (0..=trace.len()).any(|n| !c.accepts(&trace.prefix(n))),
            And(cs) => cs.iter().any(|c| c.is_dead(trace)),
            Or(cs) => cs.iter().all(|c| c.is_dead(trace)),
            _ => false,
        }
    }
}

/// A pair (base, accept): the base generates, the condition selects.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalStrategy {
    pub base: IntensionalStrategy,
    pub accept: AcceptCondition,
}

impl LogicalStrategy {
    pub fn new(base: IntensionalStrategy, accept: AcceptCondition) -> LogicalStrategy {
        LogicalStrategy { base, accept }
    }

    pub fn from_predicate(p: CharacteristicPredicate, accept: AcceptCondition) -> LogicalStrategy {
        LogicalStrategy::new(pred_to_strategy(p), accept)
    }

    pub fn into_strategy(self) -> IntensionalStrategy {
        IntensionalStrategy::Accept(Box::new(self))
    }

    pub fn accepts(&self, d: &Derivation) -> bool {
        self.accept.accepts(&d.to_trace())
    }

    /// Members of the base's support up to `depth` whose trace is accepted.
    pub fn accepted(&self, ars: &Ars, depth: usize, sources: Option<&[ObjectId]>) -> AbstractStrategy {
        let support = self.base.finite_support(ars, depth, sources);
        AbstractStrategy::from_nonempty(support.into_finite_part().into_iter().filter(|d| self.accepts(d)).collect())
    }

    /// Looks for a lasso, obeyed by the base, whose every unrolling up to
    /// `horizon` times is unaccepted but extends into an accepted derivation
    /// within `horizon` further steps: an infinite limit point of the
    /// accepted set that is not in it.
    ///
    /// Candidates are the base's derivations of length at most `horizon`
    /// from each source in turn, shortest first, then by label word; the
    /// first qualifying lasso is returned. `None` only means no witness up
    /// to the horizon.
    pub fn nonclosed_witness(&self, ars: &Ars, horizon: usize, sources: Option<&[ObjectId]>) -> Option<Lasso> {
        let sources: Vec<ObjectId> = match sources {
            Some(s) => s.to_vec(),
            None => ars.objects().collect(),
        };
        let mut seen = BTreeSet::new();
        for source in sources {
            let mut candidates: Vec<Derivation> = self
                .base
                .finite_support(ars, horizon, Some(&[source]))
                .into_finite_part()
                .into_iter()
                .collect();
            candidates.sort_by(|x, y| (x.len(), x.labels()).cmp(&(y.len(), y.labels())));
            for d in candidates {
                for split in 0..d.len() {
                    let cycle = d.factor(split, d.len());
                    if !cycle.is_simple_cycle() {
                        continue;
                    }
                    let lasso = Lasso::new(d.prefix(split), cycle).expect("stem meets the cycle");
                    if !seen.insert(lasso.clone()) {
                        continue;
                    }
                    if self.is_witness(ars, &lasso, horizon) {
                        return Some(lasso);
                    }
                }
            }
        }
        None
    }

    /// Re-checks the witness condition for a single lasso.
    pub fn is_witness(&self, ars: &Ars, lasso: &Lasso, horizon: usize) -> bool {
        if !self.base.obeys(ars, &lasso.unroll(horizon.max(1))) {
            return false;
        }
        (1..=horizon).all(|i| {
            let p = lasso.unroll(i);
            !self.accepts(&p) && self.extends_to_accepted(ars, &p, horizon)
        })
    }

    /// Whether some base-obeying extension of `d` by 1..=`budget` steps is
    /// accepted.
    pub fn extends_to_accepted(&self, ars: &Ars, d: &Derivation, budget: usize) -> bool {
        if budget == 0 {
            return false;
        }
        let trace = d.to_trace();
        for step in self.base.eval(ars, &trace).steps {
            let next = d.extended(step).expect("chosen step leaves the head");
            let t = next.to_trace();
            if self.accept.accepts(&t) {
                return true;
            }
            if !self.accept.is_dead(&t) && self.extends_to_accepted(ars, &next, budget - 1) {
                return true;
            }
        }
        false
    }
}
