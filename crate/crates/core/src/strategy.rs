//! Extensional strategies: explicit sets of derivations.
//!
//! An [`AbstractStrategy`] holds a finite set of non-empty finite derivations
//! and a finite set of lassos standing for eventually periodic infinite
//! members. Strategies written with an unbounded parameter are materialized by
//! the caller up to some bound, and every check here is exact over the
//! materialized set.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ars::{Ars, Derivation, Lasso, ObjectId};

/// How many cycle unrollings of a lasso take part in the prefix check.
pub const LASSO_PREFIX_UNROLL: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("abstract strategies contain only non-empty derivations")]
    EmptyDerivation,
    #[error("object {0:?} is not part of the system")]
    UnknownObject(ObjectId),
}

/// A member of a strategy, finite or infinite.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Member {
    Finite(Derivation),
    Infinite(Lasso),
}

impl Member {
    pub fn render(&self, ars: &Ars) -> String {
        match self {
            Member::Finite(d) => ars.render(d),
            Member::Infinite(l) => ars.render_lasso(l),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Applies(BTreeSet<ObjectId>),
    Fails,
    Indeterminate,
}

/// Result of applying a strategy to one object, with the members that
/// justify it: one finite member per reached object for `Applies`, the lassos
/// starting at the object for `Indeterminate`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Application {
    pub outcome: Outcome,
    pub witnesses: Vec<Member>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    PrefixClosed,
    FactorClosed,
    CompositionClosed,
    Closed,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::PrefixClosed => "prefix",
            Property::FactorClosed => "factor",
            Property::CompositionClosed => "composition",
            Property::Closed => "closed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `prefix` is a prefix of `member` and missing from the strategy.
    MissingPrefix { member: Member, prefix: Derivation },
    MissingFactor { member: Derivation, factor: Derivation },
    MissingComposition {
        left: Derivation,
        right: Derivation,
        composed: Derivation,
    },
    /// A finite limit point outside the strategy.
    MissingLimit { limit: Derivation, of: Member },
}

impl Violation {
    /// The derivation that should have been a member.
    pub fn missing(&self) -> &Derivation {
        match self {
            Violation::MissingPrefix { prefix, .. } => prefix,
            Violation::MissingFactor { factor, .. } => factor,
            Violation::MissingComposition { composed, .. } => composed,
            Violation::MissingLimit { limit, .. } => limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub property: Property,
    pub violation: Option<Violation>,
}

impl Verdict {
    fn from_violation(property: Property, violation: Option<Violation>) -> Verdict {
        Verdict { property, violation }
    }

    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AbstractStrategy {
    finite: BTreeSet<Derivation>,
    lassos: BTreeSet<Lasso>,
}

impl AbstractStrategy {
    pub fn new(
        finite: impl IntoIterator<Item = Derivation>,
        lassos: impl IntoIterator<Item = Lasso>,
    ) -> Result<AbstractStrategy, StrategyError> {
        let finite: BTreeSet<Derivation> = finite.into_iter().collect();
        if finite.iter().any(Derivation::is_empty) {
            return Err(StrategyError::EmptyDerivation);
        }
        Ok(AbstractStrategy {
            finite,
            lassos: lassos.into_iter().collect(),
        })
    }

    pub fn finite(finite: impl IntoIterator<Item = Derivation>) -> Result<AbstractStrategy, StrategyError> {
        AbstractStrategy::new(finite, [])
    }

    /// The strategy with no members.
    pub fn fail() -> AbstractStrategy {
        AbstractStrategy::default()
    }

    pub(crate) fn from_nonempty(finite: BTreeSet<Derivation>) -> AbstractStrategy {
        debug_assert!(finite.iter().all(|d| !d.is_empty()));
        AbstractStrategy {
            finite,
            lassos: BTreeSet::new(),
        }
    }

    /// The finite support `ζ_fin`.
    pub fn finite_part(&self) -> &BTreeSet<Derivation> {
        &self.finite
    }

    pub fn lasso_part(&self) -> &BTreeSet<Lasso> {
        &self.lassos
    }

    pub fn into_finite_part(self) -> BTreeSet<Derivation> {
        self.finite
    }

    pub fn contains(&self, d: &Derivation) -> bool {
        self.finite.contains(d)
    }

    pub fn len(&self) -> usize {
        self.finite.len() + self.lassos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.finite.is_empty() && self.lassos.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.finite.iter().map(Derivation::len).max().unwrap_or(0)
    }

    pub fn with_lassos(mut self, lassos: impl IntoIterator<Item = Lasso>) -> AbstractStrategy {
        self.lassos.extend(lassos);
        self
    }

    /// `Dom(ζ)`.
    pub fn domain(&self) -> BTreeSet<ObjectId> {
        self.finite
            .iter()
            .map(Derivation::source)
            .chain(self.lassos.iter().map(Lasso::source))
            .collect()
    }

    /// `⟦ζ⟧(a)`, distinguishing failure from indeterminacy.
    pub fn apply(&self, ars: &Ars, a: ObjectId) -> Result<Application, StrategyError> {
        if !ars.contains_object(a) {
            return Err(StrategyError::UnknownObject(a));
        }
        let mut reached = BTreeSet::new();
        let mut witnesses = Vec::new();
        for d in self.finite.iter().filter(|d| d.source() == a) {
            if reached.insert(d.target()) {
                witnesses.push(Member::Finite(d.clone()));
            }
        }
        if !reached.is_empty() {
            return Ok(Application {
                outcome: Outcome::Applies(reached),
                witnesses,
            });
        }
        let infinite: Vec<Member> = self
            .lassos
            .iter()
            .filter(|l| l.source() == a)
            .map(|l| Member::Infinite(l.clone()))
            .collect();
        if infinite.is_empty() {
            Ok(Application {
                outcome: Outcome::Fails,
                witnesses: Vec::new(),
            })
        } else {
            Ok(Application {
                outcome: Outcome::Indeterminate,
                witnesses: infinite,
            })
        }
    }

    /// Finite prefixes of every lasso that take part in prefix and closedness
    /// checks.
    fn bounded_lasso_prefixes(&self) -> impl Iterator<Item = (&Lasso, Derivation)> + '_ {
        self.lassos.iter().flat_map(|l| {
            let bound = l.stem().len() + LASSO_PREFIX_UNROLL * l.cycle().len();
            (1..=bound).map(move |n| (l, l.prefix(n)))
        })
    }

    pub fn check_prefix_closed(&self) -> Verdict {
        let violation = self
            .first_missing_prefix()
            .map(|(member, prefix)| Violation::MissingPrefix { member, prefix });
        Verdict::from_violation(Property::PrefixClosed, violation)
    }

    fn first_missing_prefix(&self) -> Option<(Member, Derivation)> {
        for d in &self.finite {
            if let Some(p) = d.prefixes().into_iter().find(|p| !self.finite.contains(p)) {
                return Some((Member::Finite(d.clone()), p));
            }
        }
        self.bounded_lasso_prefixes()
            .find(|(_, p)| !self.finite.contains(p))
            .map(|(l, p)| (Member::Infinite(l.clone()), p))
    }

    /// Factor closure over the finite part.
    pub fn check_factor_closed(&self) -> Verdict {
        let violation = self.finite.iter().find_map(|d| {
            d.factors()
                .into_iter()
                .find(|f| !self.finite.contains(f))
                .map(|factor| Violation::MissingFactor {
                    member: d.clone(),
                    factor,
                })
        });
        Verdict::from_violation(Property::FactorClosed, violation)
    }

    /// Closure under composition of composable finite members.
    pub fn check_composition_closed(&self) -> Verdict {
        self.composition_check(usize::MAX)
    }

    /// Composition closure restricted to composites of length at most
    /// `bound`: the form of closure a materialized truncation can have.
    pub fn check_composition_closed_within(&self, bound: usize) -> Verdict {
        self.composition_check(bound)
    }

    fn composition_check(&self, bound: usize) -> Verdict {
        let mut violation = None;
        'outer: for left in &self.finite {
            for right in self.finite.iter().filter(|r| r.source() == left.target()) {
                if left.len() + right.len() > bound {
                    continue;
                }
                let composed = left.compose(right).expect("source matches target");
                if !self.finite.contains(&composed) {
                    violation = Some(Violation::MissingComposition {
                        left: left.clone(),
                        right: right.clone(),
                        composed,
                    });
                    break 'outer;
                }
            }
        }
        Verdict::from_violation(Property::CompositionClosed, violation)
    }

    /// Whether the strategy contains all of its limit points.
    ///
    /// Finite limit points are exactly the finite prefixes of members, so
    /// each must be a finite member; lasso prefixes are taken up to
    /// [`LASSO_PREFIX_UNROLL`] cycle unrollings. An infinite limit point must
    /// have infinitely many prefixes shared with a single lasso of the
    /// (finite) representation, hence equals that lasso, which is a member.
    pub fn check_closed(&self) -> Verdict {
        let violation = self
            .first_missing_prefix()
            .map(|(of, limit)| Violation::MissingLimit { limit, of });
        Verdict::from_violation(Property::Closed, violation)
    }

    pub fn check(&self, property: Property) -> Verdict {
        match property {
            Property::PrefixClosed => self.check_prefix_closed(),
            Property::FactorClosed => self.check_factor_closed(),
            Property::CompositionClosed => self.check_composition_closed(),
            Property::Closed => self.check_closed(),
        }
    }

    /// Adds every finite prefix of every member (lasso prefixes up to the
    /// checked bound).
    pub fn prefix_closure(&self) -> AbstractStrategy {
        let mut finite = self.finite.clone();
        for d in &self.finite {
            finite.extend(d.prefixes());
        }
        finite.extend(self.bounded_lasso_prefixes().map(|(_, p)| p));
        AbstractStrategy {
            finite,
            lassos: self.lassos.clone(),
        }
    }

    /// Members rendered one per line, finite part first.
    pub fn render(&self, ars: &Ars) -> Vec<String> {
        self.finite
            .iter()
            .map(|d| ars.render(d))
            .chain(self.lassos.iter().map(|l| ars.render_lasso(l)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{a_lc, eventual};

    fn d(ars: &Ars, src: &str, labels: &[&str]) -> Derivation {
        ars.derivation_named(src, labels).unwrap()
    }

    /// `{(a -phi1 phi3-> a)^n a -phi2-> c | n <= bound}`
    fn zeta_c(ars: &Ars, bound: usize) -> AbstractStrategy {
        let members = (0..=bound).map(|n| {
            let mut labels = Vec::new();
            for _ in 0..n {
                labels.extend(["phi1", "phi3"]);
            }
            labels.push("phi2");
            d(ars, "a", &labels)
        });
        AbstractStrategy::finite(members).unwrap()
    }

    fn zeta_omega(ars: &Ars) -> AbstractStrategy {
        let a = ars.object("a").unwrap();
        let lasso = Lasso::new(Derivation::empty(a), d(ars, "a", &["phi1", "phi3"])).unwrap();
        AbstractStrategy::new([], [lasso]).unwrap()
    }

    #[test]
    fn rejects_empty_members() {
        let ars = a_lc();
        let empty = Derivation::empty(ars.object("a").unwrap());
        assert_eq!(AbstractStrategy::finite([empty]), Err(StrategyError::EmptyDerivation));
    }

    #[test]
    fn domains() {
        let ars = a_lc();
        let universal = AbstractStrategy::finite(ars.enumerate_derivations(None, 4)).unwrap();
        let names: Vec<&str> = universal.domain().into_iter().map(|o| ars.object_name(o)).collect();
        assert_eq!(names, ["a", "b"]);
        assert!(AbstractStrategy::fail().domain().is_empty());
        assert_eq!(zeta_omega(&ars).domain(), BTreeSet::from([ars.object("a").unwrap()]));
    }

    #[test]
    fn application_outcomes() {
        let ars = a_lc();
        let a = ars.object("a").unwrap();
        let c = ars.object("c").unwrap();
        let zc = zeta_c(&ars, 3);
        assert_eq!(zc.apply(&ars, a).unwrap().outcome, Outcome::Applies(BTreeSet::from([c])));
        assert_eq!(zc.apply(&ars, ars.object("b").unwrap()).unwrap().outcome, Outcome::Fails);

        let zw = zeta_omega(&ars);
        let app = zw.apply(&ars, a).unwrap();
        assert_eq!(app.outcome, Outcome::Indeterminate);
        assert_eq!(app.witnesses.len(), 1);

        let universal = AbstractStrategy::finite(ars.enumerate_derivations(None, 3)).unwrap();
        let Outcome::Applies(reached) = universal.apply(&ars, a).unwrap().outcome else {
            panic!("universal applies on a");
        };
        assert_eq!(reached.len(), 4);
        assert_eq!(universal.apply(&ars, c).unwrap().outcome, Outcome::Fails);
    }

    #[test]
    fn prefix_closure_checks() {
        let ars = a_lc();
        let universal = AbstractStrategy::finite(ars.enumerate_derivations(None, 4)).unwrap();
        assert!(universal.check_prefix_closed().holds());
        assert!(AbstractStrategy::fail().check_prefix_closed().holds());

        let verdict = zeta_c(&ars, 2).check_prefix_closed();
        let violation = verdict.violation.unwrap();
        assert_eq!(ars.render(violation.missing()), "a -phi1-> b");

        assert!(!zeta_omega(&ars).check_prefix_closed().holds());
    }

    #[test]
    fn composition_counterexample() {
        let ars = a_lc();
        let z = AbstractStrategy::finite([d(&ars, "a", &["phi1"]), d(&ars, "b", &["phi3"])]).unwrap();
        let violation = z.check_composition_closed().violation.unwrap();
        assert_eq!(ars.render(violation.missing()), "a -phi1-> b -phi3-> a");
        assert!(z.check_factor_closed().holds());
    }

    #[test]
    fn factor_counterexample() {
        let ars = a_lc();
        let z = AbstractStrategy::finite([d(&ars, "a", &["phi1", "phi3"])]).unwrap();
        let Some(Violation::MissingFactor { factor, .. }) = z.check_factor_closed().violation else {
            panic!("expected a missing factor");
        };
        assert_eq!(ars.render(&factor), "a -phi1-> b");
    }

    #[test]
    fn bounded_composition_closure() {
        let ars = a_lc();
        let z = AbstractStrategy::finite(ars.enumerate_derivations(None, 2)).unwrap();
        assert!(!z.check_composition_closed().holds());
        assert!(z.check_composition_closed_within(2).holds());
    }

    #[test]
    fn closedness() {
        let ars = a_lc();
        assert!(!zeta_c(&ars, 3).check_closed().holds());

        let single = d(&ars, "a", &["phi1", "phi4"]);
        let closure = AbstractStrategy::finite([single]).unwrap().prefix_closure();
        assert!(closure.check_closed().holds());

        let ev = eventual();
        let a = ev.object("a").unwrap();
        let loops: Vec<Derivation> = (1..=4).map(|n| d(&ev, "a", &vec!["loop"; n])).collect();
        let lasso = Lasso::new(Derivation::empty(a), d(&ev, "a", &["loop"])).unwrap();
        let z = AbstractStrategy::new(loops, [lasso.clone()]).unwrap();
        assert!(z.check_closed().holds());

        let only_lasso = AbstractStrategy::new([], [lasso]).unwrap();
        let Some(Violation::MissingLimit { limit, .. }) = only_lasso.check_closed().violation else {
            panic!("lasso prefixes are limit points");
        };
        assert_eq!(ev.render(&limit), "a -loop-> a");
    }

    #[test]
    fn prefix_closure_is_idempotent() {
        let ars = a_lc();
        let z = zeta_c(&ars, 2).with_lassos(zeta_omega(&ars).lasso_part().clone());
        let once = z.prefix_closure();
        assert!(once.check_prefix_closed().holds());
        assert_eq!(once.prefix_closure(), once);
    }
}
