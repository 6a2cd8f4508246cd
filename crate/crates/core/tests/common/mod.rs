//! Brute-force oracles and the strategy corpus shared by the integration
//! tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use strat_core::ars::{Ars, Derivation, LabelId, ObjectId, Trace};
use strat_core::intensional::{Color, IntensionalStrategy, LabelOrder, StepSet, StrategyTable, TableValue, TracePattern};
use strat_core::logical::{pred_to_strategy, AcceptCondition, CharacteristicPredicate, LogicalStrategy};
use strat_core::rexp::Rexp;

/// `⟨α⟩a` for the first `j` steps of `d`, built pair by pair.
pub fn trace_prefix(d: &Derivation, j: usize) -> Trace {
    let pairs = (0..j).map(|i| (d.object_at(i), d.labels()[i])).collect();
    Trace::new(pairs, d.object_at(j))
}

/// All derivations up to `k` steps whose every step was chosen by `xi` at
/// its prefix.
pub fn stepwise_oracle(ars: &Ars, xi: &IntensionalStrategy, k: usize, sources: Option<&[ObjectId]>) -> BTreeSet<Derivation> {
    let all: Vec<ObjectId> = ars.objects().collect();
    let sources = sources.unwrap_or(&all);
    let mut out = BTreeSet::new();
    for &a in sources {
        for d in ars.enumerate_derivations(Some(a), k) {
            if (0..d.len()).all(|j| xi.eval(ars, &trace_prefix(&d, j)).steps.contains(&d.step(j))) {
                out.insert(d);
            }
        }
    }
    out
}

/// Closedness of a finite set by its definition: every derivation of the
/// universe all of whose prefixes extend into the set must be in it.
pub fn closed_oracle(members: &BTreeSet<Derivation>, universe: &BTreeSet<Derivation>) -> bool {
    universe.iter().all(|d| {
        let limit = (1..=d.len()).all(|n| {
            let p = d.prefix(n);
            members.iter().any(|m| p.is_prefix_of(m))
        });
        !limit || members.contains(d)
    })
}

#[derive(Clone, PartialEq)]
enum Re {
    Empty,
    Eps,
    Lab(LabelId),
    Cat(Box<Re>, Box<Re>),
    Alt(Box<Re>, Box<Re>),
    Star(Box<Re>),
}

fn lower(r: &Rexp<LabelId>) -> Re {
    let fold = |xs: &[Rexp<LabelId>], f: fn(Box<Re>, Box<Re>) -> Re| {
        let mut it = xs.iter().map(lower);
        let first = it.next().unwrap();
        it.fold(first, |acc, x| f(Box::new(acc), Box::new(x)))
    };
    match r {
        Rexp::Label(l) => Re::Lab(*l),
        Rexp::Concat(xs) => fold(xs, Re::Cat),
        Rexp::Alt(xs) => fold(xs, Re::Alt),
        Rexp::Star(x) => Re::Star(Box::new(lower(x))),
        Rexp::Plus(x) => Re::Cat(Box::new(lower(x)), Box::new(Re::Star(Box::new(lower(x))))),
        Rexp::Opt(x) => Re::Alt(Box::new(Re::Eps), Box::new(lower(x))),
    }
}

fn nullable(r: &Re) -> bool {
    match r {
        Re::Empty | Re::Lab(_) => false,
        Re::Eps | Re::Star(_) => true,
        Re::Cat(a, b) => nullable(a) && nullable(b),
        Re::Alt(a, b) => nullable(a) || nullable(b),
    }
}

fn derive(r: &Re, l: LabelId) -> Re {
    match r {
        Re::Empty | Re::Eps => Re::Empty,
        Re::Lab(m) => {
            if *m == l {
                Re::Eps
            } else {
                Re::Empty
            }
        }
        Re::Cat(a, b) => {
            let left = Re::Cat(Box::new(derive(a, l)), b.clone());
            if nullable(a) {
                Re::Alt(Box::new(left), Box::new(derive(b, l)))
            } else {
                left
            }
        }
        Re::Alt(a, b) => Re::Alt(Box::new(derive(a, l)), Box::new(derive(b, l))),
        Re::Star(a) => Re::Cat(Box::new(derive(a, l)), Box::new(r.clone())),
    }
}

/// Membership by repeated derivatives.
pub fn derivative_matches(r: &Rexp<LabelId>, word: &[LabelId]) -> bool {
    let mut cur = lower(r);
    for &l in word {
        cur = derive(&cur, l);
    }
    nullable(&cur)
}

pub fn words(alphabet: &[LabelId], max_len: usize) -> Vec<Vec<LabelId>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in alphabet {
                let mut v: Vec<LabelId> = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn rexp_corpus() -> Vec<&'static str> {
    vec![
        "x",
        "x y z",
        "x | y | z",
        "x*",
        "x+",
        "x?",
        "(x y)*",
        "(x | y)* z",
        "x* y* z*",
        "(x | y z)+ x?",
        "((x y)* | z)+",
        "x (y | z)* x",
        "(x?)*",
        "(x* y)* (z | x)?",
        "x** | y+?",
        "((x | y) (y | z))* x",
    ]
}

fn labels(ars: &Ars) -> Vec<LabelId> {
    ars.labels().collect()
}

/// Built-ins and combinators instantiated over `ars`.
pub fn corpus_strategies(ars: &Ars) -> Vec<(String, IntensionalStrategy)> {
    let ls = labels(ars);
    let asc = LabelOrder::chain(ars, &ls).unwrap();
    let mut rev = ls.clone();
    rev.reverse();
    let desc = LabelOrder::chain(ars, &rev).unwrap();
    let (evens, odds): (Vec<LabelId>, Vec<LabelId>) = ls.iter().partition(|l| l.index() % 2 == 0);
    let coloring: BTreeMap<LabelId, Color> = ls
        .iter()
        .map(|&l| (l, if l.index() % 2 == 0 { Color::White } else { Color::Black }))
        .collect();
    let first_two: BTreeSet<LabelId> = ls.iter().copied().take(2).collect();
    let alternate = IntensionalStrategy::Alternate {
        first: StepSet::of_labels(evens.iter().copied()),
        second: StepSet::of_labels(odds.iter().copied()),
    };
    let mut history = StrategyTable::new();
    if let Some(&first) = ars.steps().first() {
        history.push(
            TracePattern::Extends(Derivation::from_step(first)),
            TableValue::Steps(BTreeSet::new()),
        );
    }
    history.push(TracePattern::Any, TableValue::AllSteps);

    let mut out: Vec<(String, IntensionalStrategy)> = vec![
        ("universal".into(), IntensionalStrategy::Universal),
        ("fail".into(), IntensionalStrategy::Fail),
        ("greatmost-asc".into(), IntensionalStrategy::Greatmost(asc.clone())),
        ("greatmost-desc".into(), IntensionalStrategy::Greatmost(desc.clone())),
        ("maxlen-1".into(), IntensionalStrategy::MaxLen(1)),
        ("maxlen-3".into(), IntensionalStrategy::MaxLen(3)),
        ("alternate".into(), alternate.clone()),
        ("colors".into(), IntensionalStrategy::ColorAlternate(coloring)),
        ("restrict".into(), IntensionalStrategy::RestrictLabels(first_two.clone())),
        ("history-table".into(), IntensionalStrategy::Table(history)),
        ("pred-true".into(), pred_to_strategy(CharacteristicPredicate::True)),
        ("pred-lenless-2".into(), pred_to_strategy(CharacteristicPredicate::LenLess(2))),
        (
            "pred-alternate".into(),
            pred_to_strategy(CharacteristicPredicate::Alternate {
                first: evens.iter().copied().collect(),
                second: odds.iter().copied().collect(),
            }),
        ),
        (
            "accept-len".into(),
            LogicalStrategy::new(IntensionalStrategy::Universal, AcceptCondition::LenAtLeast(2)).into_strategy(),
        ),
    ];
    let simple: Vec<IntensionalStrategy> = out.iter().map(|(_, x)| x.clone()).collect();
    out.push((
        "intersect".into(),
        IntensionalStrategy::intersect(vec![IntensionalStrategy::Greatmost(desc), IntensionalStrategy::MaxLen(4)]),
    ));
    out.push((
        "union-pointwise".into(),
        IntensionalStrategy::union_pointwise(alternate.clone(), IntensionalStrategy::RestrictLabels(first_two.clone())),
    ));
    out.push((
        "union-committed".into(),
        IntensionalStrategy::union_committed(simple[6].clone(), simple[2].clone()),
    ));
    out.push((
        "nested".into(),
        IntensionalStrategy::union_committed(
            IntensionalStrategy::intersect(vec![simple[7].clone(), simple[5].clone()]),
            IntensionalStrategy::union_pointwise(simple[3].clone(), simple[12].clone()),
        ),
    ));
    out
}
