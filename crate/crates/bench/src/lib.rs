//! Workloads shared by the benchmarks.

use strat_core::ars::LabelId;
use strat_core::intensional::{IntensionalStrategy, LabelOrder};
use strat_core::scenarios::TrafficArena;
use strat_core::systems::a_lc;
use strat_core::Ars;

/// Descending greatmost over A_lc.
pub fn descending_greatmost() -> (Ars, IntensionalStrategy) {
    let ars = a_lc();
    let mut ls: Vec<LabelId> = ars.labels().collect();
    ls.reverse();
    let order = LabelOrder::chain(&ars, &ls).expect("a chain is acyclic");
    (ars, IntensionalStrategy::Greatmost(order))
}

pub fn traffic(queue_bound: usize) -> TrafficArena {
    TrafficArena::new(queue_bound)
}

/// A word of `n` loop steps followed by the exit label.
pub fn eventual_word(ars: &Ars, n: usize) -> Vec<LabelId> {
    let lp = ars.label("loop").expect("loop label");
    let exit = ars.label("exit").expect("exit label");
    let mut w = vec![lp; n];
    w.push(exit);
    w
}
