//! The two-signal intersection: queues of waiting cars and a signal per
//! direction, with queues bounded by `Q`.

use std::collections::BTreeSet;
use std::fmt;

use crate::ars::{Ars, Lasso, ObjectId, Step};
use crate::intensional::{IntensionalStrategy, StrategyTable, TableValue, TracePattern};
use crate::logical::{AcceptCondition, LogicalStrategy};
use crate::rexp::RationalExpr;

pub const LABELS: [&str; 6] = ["car1", "car2", "signal1", "signal2", "cross1", "cross2"];

/// `[q1, l1, q2, l2]`: queue lengths and signals (1 = green).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TrafficState {
    pub q1: usize,
    pub l1: u8,
    pub q2: usize,
    pub l2: u8,
}

impl TrafficState {
    pub fn new(q1: usize, l1: u8, q2: usize, l2: u8) -> TrafficState {
        TrafficState { q1, l1, q2, l2 }
    }

    pub fn both_green(self) -> bool {
        self.l1 == 1 && self.l2 == 1
    }

    pub fn parse(name: &str) -> Option<TrafficState> {
        let mut parts = name.strip_prefix("s_")?.split('_');
        let mut next = || parts.next()?.parse::<usize>().ok();
        let (q1, l1, q2, l2) = (next()?, next()?, next()?, next()?);
        if l1 > 1 || l2 > 1 || parts.next().is_some() {
            return None;
        }
        Some(TrafficState::new(q1, l1 as u8, q2, l2 as u8))
    }
}

impl fmt::Display for TrafficState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s_{}_{}_{}_{}", self.q1, self.l1, self.q2, self.l2)
    }
}

#[derive(Debug, Clone)]
pub struct TrafficArena {
    ars: Ars,
    queue_bound: usize,
    states: Vec<TrafficState>,
}

impl TrafficArena {
    /// All `4(Q+1)²` states; arrivals stop at the bound, crossings need a
    /// green signal and a waiting car.
    pub fn new(queue_bound: usize) -> TrafficArena {
        assert!(queue_bound >= 1, "queue bound must be at least 1");
        let mut states = Vec::new();
        for q1 in 0..=queue_bound {
            for l1 in 0..=1 {
                for q2 in 0..=queue_bound {
                    for l2 in 0..=1 {
                        states.push(TrafficState::new(q1, l1, q2, l2));
                    }
                }
            }
        }
        let mut steps = Vec::new();
        for &s in &states {
            let mut add = |label: &str, t: TrafficState| steps.push((s.to_string(), label.to_string(), t.to_string()));
            if s.q1 < queue_bound {
                add("car1", TrafficState { q1: s.q1 + 1, ..s });
            }
            if s.q2 < queue_bound {
                add("car2", TrafficState { q2: s.q2 + 1, ..s });
            }
            add("signal1", TrafficState { l1: 1 - s.l1, ..s });
            add("signal2", TrafficState { l2: 1 - s.l2, ..s });
            if s.l1 == 1 && s.q1 >= 1 {
                add("cross1", TrafficState { q1: s.q1 - 1, ..s });
            }
            if s.l2 == 1 && s.q2 >= 1 {
                add("cross2", TrafficState { q2: s.q2 - 1, ..s });
            }
        }
        let names: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let ars = Ars::new(&names, &LABELS, &steps).expect("traffic schemas are functional");
        TrafficArena {
            ars,
            queue_bound,
            states,
        }
    }

    pub fn ars(&self) -> &Ars {
        &self.ars
    }

    pub fn queue_bound(&self) -> usize {
        self.queue_bound
    }

    pub fn states(&self) -> &[TrafficState] {
        &self.states
    }

    pub fn state(&self, id: ObjectId) -> TrafficState {
        self.states[id.index()]
    }

    pub fn object(&self, state: TrafficState) -> Option<ObjectId> {
        self.ars.object(&state.to_string())
    }

    pub fn both_green_objects(&self) -> Vec<ObjectId> {
        self.ars.objects().filter(|&o| self.state(o).both_green()).collect()
    }

    /// Every out-step except signal toggles into a both-green state.
    pub fn never_both_green_strategy(&self) -> IntensionalStrategy {
        let mut table = StrategyTable::new();
        for a in self.ars.objects() {
            let allowed: BTreeSet<Step> = self
                .ars
                .out_steps(a)
                .iter()
                .copied()
                .filter(|s| !(self.is_signal(s) && self.state(s.target).both_green()))
                .collect();
            table.push(TracePattern::At(a), TableValue::Steps(allowed));
        }
        IntensionalStrategy::Table(table)
    }

    fn is_signal(&self, s: &Step) -> bool {
        self.ars.label_name(s.label).starts_with("signal")
    }

    /// Text of the rational expression for "some pending `car{i}` never
    /// crosses".
    pub fn pending_expr(i: usize) -> String {
        let others: Vec<&str> = LABELS.iter().copied().filter(|l| *l != format!("cross{i}")).collect();
        format!("({})* car{i} ({})*", LABELS.join(" | "), others.join(" | "))
    }

    /// Every arrival is eventually followed, within the trace, by a crossing
    /// on the same queue.
    pub fn fairness_condition(&self) -> AcceptCondition {
        AcceptCondition::And(
            (1..=2)
                .map(|i| {
                    let pending = RationalExpr::parse(&Self::pending_expr(i), &self.ars).expect("labels exist");
                    AcceptCondition::Not(Box::new(AcceptCondition::LabelWordIn(pending)))
                })
                .collect(),
        )
    }

    /// No visited state, the start included, has both signals green.
    pub fn safety_condition(&self) -> AcceptCondition {
        let bad = self.both_green_objects().into_iter().map(AcceptCondition::AtObject).collect();
        AcceptCondition::Invariant(Box::new(AcceptCondition::Not(Box::new(AcceptCondition::Or(bad)))))
    }

    /// The start of the unfair derivation that keeps the north-south car
    /// waiting forever.
    pub fn unfair_start(&self) -> ObjectId {
        self.object(TrafficState::new(1, 0, 1, 1)).expect("Q ≥ 1")
    }

    pub fn fairness_nonclosed_witness(&self, horizon: usize) -> Option<Lasso> {
        LogicalStrategy::new(IntensionalStrategy::Universal, self.fairness_condition()).nonclosed_witness(
            &self.ars,
            horizon,
            Some(&[self.unfair_start()]),
        )
    }

    /// All objects reachable from `start` using the steps `xi` permits.
    pub fn reachable(&self, xi: &IntensionalStrategy, start: ObjectId) -> BTreeSet<ObjectId> {
        let steps = xi.induced_steps(&self.ars).expect("memoryless strategy");
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for s in steps.iter().filter(|s| s.source == v) {
                if seen.insert(s.target) {
                    stack.push(s.target);
                }
            }
        }
        seen
    }

    /// The scenario as a document: the system, both conditions, and
    /// strategies using them.
    pub fn document(&self) -> String {
        let mut out = String::from("ars {\n  objects: ");
        let names: Vec<String> = self.states.iter().map(|s| s.to_string()).collect();
        out += &names.join(", ");
        out += ";\n  labels: ";
        out += &LABELS.join(", ");
        out += ";\n  steps: ";
        let steps: Vec<String> = self
            .ars
            .steps()
            .iter()
            .map(|s| {
                format!(
                    "({}, {}, {})",
                    self.ars.object_name(s.source),
                    self.ars.label_name(s.label),
                    self.ars.object_name(s.target)
                )
            })
            .collect();
        out += &steps.join(", ");
        out += ";\n}\n";
        out += &format!(
            "accept fair = and(not(word({})), not(word({})));\n",
            Self::pending_expr(1),
            Self::pending_expr(2)
        );
        let bad: Vec<String> = self
            .both_green_objects()
            .iter()
            .map(|&o| format!("at({})", self.ars.object_name(o)))
            .collect();
        out += &format!("accept safe = always(not(or({})));\n", bad.join(", "));
        out += "strategy univ = universal;\n";
        out += "strategy fairness = accept(universal, fair);\n";
        out += "strategy safety = accept(universal, safe);\n";
        out += &format!(
            "query witness fairness from {} horizon 6;\n",
            self.ars.object_name(self.unfair_start())
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        for q in 1..=3 {
            let arena = TrafficArena::new(q);
            assert_eq!(arena.ars().object_count(), 4 * (q + 1) * (q + 1));
            assert!(arena.ars().objects().all(|o| arena.ars().out_steps(o).len() <= 6));
        }
    }

    #[test]
    fn schemas_at_the_bound() {
        let arena = TrafficArena::new(1);
        let ars = arena.ars();
        let step = |from: &str, label: &str| ars.step(ars.object(from).unwrap(), ars.label(label).unwrap());
        let s = step("s_1_0_1_1", "cross2").unwrap();
        assert_eq!(ars.object_name(s.target), "s_1_0_0_1");
        let car1 = ars.label("car1").unwrap();
        let cross1 = ars.label("cross1").unwrap();
        for st in ars.steps() {
            let from = arena.state(st.source);
            assert!(!(st.label == car1 && from.q1 == 1));
            assert!(!(st.label == cross1 && from.l1 == 0));
        }
    }

    #[test]
    fn state_names_round_trip() {
        let s = TrafficState::new(2, 1, 0, 1);
        assert_eq!(TrafficState::parse(&s.to_string()), Some(s));
        assert_eq!(TrafficState::parse("s_1_2_0_0"), None);
        assert_eq!(TrafficState::parse("t_1_0_0_0"), None);
    }

    #[test]
    fn safe_strategy_excludes_entering_both_green() {
        let arena = TrafficArena::new(1);
        let ars = arena.ars();
        let xi = arena.never_both_green_strategy();
        let a = ars.object("s_0_1_0_0").unwrap();
        let chosen: Vec<&str> = xi
            .eval(ars, &crate::ars::Trace::empty(a))
            .steps
            .iter()
            .map(|s| ars.label_name(s.label))
            .collect();
        assert_eq!(chosen, ["car1", "car2", "signal1"]);

        let bad = ars.object("s_0_1_0_1").unwrap();
        let leaving: Vec<&str> = xi
            .eval(ars, &crate::ars::Trace::empty(bad))
            .steps
            .iter()
            .map(|s| ars.label_name(s.label))
            .collect();
        assert!(leaving.contains(&"signal1") && leaving.contains(&"signal2"));
    }

    #[test]
    fn safe_strategy_support_stays_safe() {
        let arena = TrafficArena::new(1);
        let xi = arena.never_both_green_strategy();
        let good: Vec<ObjectId> = arena.ars().objects().filter(|&o| !arena.state(o).both_green()).collect();
        let z = xi.finite_support(arena.ars(), 6, Some(&good));
        for d in z.finite_part() {
            assert!(d.targets().iter().all(|&t| !arena.state(t).both_green()));
        }
    }

    #[test]
    fn fairness_witness() {
        let arena = TrafficArena::new(1);
        let w = arena.fairness_nonclosed_witness(6).unwrap();
        assert_eq!(
            arena.ars().render_lasso(&w),
            "s_1_0_1_1 ( -cross2-> s_1_0_0_1 -car2-> s_1_0_1_1 )^w"
        );
        assert_eq!(arena.fairness_nonclosed_witness(1), None);
    }

    #[test]
    fn safety_has_no_witness() {
        let arena = TrafficArena::new(1);
        let ls = LogicalStrategy::new(IntensionalStrategy::Universal, arena.safety_condition());
        assert_eq!(ls.nonclosed_witness(arena.ars(), 6, Some(&[arena.unfair_start()])), None);
    }
}
