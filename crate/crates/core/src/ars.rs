//! Abstract reduction systems.
//!
//! An [`Ars`] is a finite set of objects, a disjoint finite set of labels and a
//! functional step relation: for each `(source, label)` pair there is at most
//! one target. Because of functionality a finite [`Derivation`] is fully
//! determined by its source and its label word; the intermediate objects are
//! cached alongside.
//!
//! Everything returned as a set is ordered by `(source index, label index)`
//! lexicographically, so output is reproducible byte for byte.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

/// Interned object symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectId(u32);

/// Interned label symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelId(u32);

impl ObjectId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl LabelId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

pub(crate) fn object_id(raw: u32) -> ObjectId {
    ObjectId(raw)
}

pub(crate) fn label_id(raw: u32) -> LabelId {
    LabelId(raw)
}

/// A single labeled reduction `source -label-> target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub source: ObjectId,
    pub label: LabelId,
    pub target: ObjectId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArsError {
    #[error("step ({from}, {label}) has two targets: {first} and {second}")]
    FunctionalityViolation {
        from: String,
        label: String,
        first: String,
        second: String,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{0}` is declared both as an object and as a label")]
    ObjectLabelOverlap(String),
    #[error("`{0}` is declared twice")]
    DuplicateSymbol(String),
    #[error("derivations are not composable: target {target:?} differs from source {next:?}")]
    NotComposable { target: ObjectId, next: ObjectId },
    #[error("trace is incompatible with the system at position {0}")]
    IncompatibleTrace(usize),
    #[error("no step labeled {label:?} leaves {from:?}")]
    MissingStep { from: ObjectId, label: LabelId },
    #[error("lasso cycle must be non-empty")]
    EmptyCycle,
    #[error("lasso cycle does not return to its start object")]
    OpenCycle,
}

/// A finite abstract reduction system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ars {
    objects: Vec<String>,
    labels: Vec<String>,
    object_ids: HashMap<String, ObjectId>,
    label_ids: HashMap<String, LabelId>,
    steps: Vec<Step>,
    out: Vec<Vec<Step>>,
}

impl Ars {
    /// Builds and validates a system from symbol lists. Repeated identical
    /// steps are merged.
    pub fn new<O, L, S>(objects: &[O], labels: &[L], steps: &[(S, S, S)]) -> Result<Ars, ArsError>
    where
        O: AsRef<str>,
        L: AsRef<str>,
        S: AsRef<str>,
    {
        let mut object_ids = HashMap::new();
        for (i, name) in objects.iter().enumerate() {
            let name = name.as_ref();
            if object_ids.insert(name.to_string(), ObjectId(i as u32)).is_some() {
                return Err(ArsError::DuplicateSymbol(name.to_string()));
            }
        }
        let mut label_ids = HashMap::new();
        for (i, name) in labels.iter().enumerate() {
            let name = name.as_ref();
            if object_ids.contains_key(name) {
                return Err(ArsError::ObjectLabelOverlap(name.to_string()));
            }
            if label_ids.insert(name.to_string(), LabelId(i as u32)).is_some() {
                return Err(ArsError::DuplicateSymbol(name.to_string()));
            }
        }

        let object = |name: &str| {
            object_ids
                .get(name)
                .copied()
                .ok_or_else(|| ArsError::UnknownSymbol(name.to_string()))
        };
        let label = |name: &str| {
            label_ids
                .get(name)
                .copied()
                .ok_or_else(|| ArsError::UnknownSymbol(name.to_string()))
        };

        let mut by_key: HashMap<(ObjectId, LabelId), Step> = HashMap::new();
        for (s, l, t) in steps {
            let step = Step {
                source: object(s.as_ref())?,
                label: label(l.as_ref())?,
                target: object(t.as_ref())?,
            };
            if let Some(prev) = by_key.insert((step.source, step.label), step) {
                if prev.target != step.target {
                    return Err(ArsError::FunctionalityViolation {
                        from: s.as_ref().to_string(),
                        label: l.as_ref().to_string(),
                        first: objects[prev.target.index()].as_ref().to_string(),
                        second: t.as_ref().to_string(),
                    });
                }
            }
        }

        let mut steps: Vec<Step> = by_key.into_values().collect();
        steps.sort();
        let mut out = vec![Vec::new(); objects.len()];
        for step in &steps {
            out[step.source.index()].push(*step);
        }

        Ok(Ars {
            objects: objects.iter().map(|o| o.as_ref().to_string()).collect(),
            labels: labels.iter().map(|l| l.as_ref().to_string()).collect(),
            object_ids,
            label_ids,
            steps,
            out,
        })
    }

    pub fn object(&self, name: &str) -> Option<ObjectId> {
        self.object_ids.get(name).copied()
    }

    pub fn label(&self, name: &str) -> Option<LabelId> {
        self.label_ids.get(name).copied()
    }

    pub fn object_name(&self, id: ObjectId) -> &str {
        &self.objects[id.index()]
    }

    pub fn label_name(&self, id: LabelId) -> &str {
        &self.labels[id.index()]
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjectId> + '_ {
        (0..self.objects.len() as u32).map(ObjectId)
    }

    pub fn labels(&self) -> impl Iterator<Item = LabelId> + '_ {
        (0..self.labels.len() as u32).map(LabelId)
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn label_names(&self) -> &[String] {
        &self.labels
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    pub fn contains_object(&self, id: ObjectId) -> bool {
        id.index() < self.objects.len()
    }

    /// All steps, ordered by source then label.
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Outgoing steps of `source`, ordered by label.
    pub fn out_steps(&self, source: ObjectId) -> &[Step] {
        &self.out[source.index()]
    }

    pub fn step(&self, source: ObjectId, label: LabelId) -> Option<Step> {
        self.out_steps(source).iter().find(|s| s.label == label).copied()
    }

    /// The derivation from `source` following `labels`.
    pub fn derivation(&self, source: ObjectId, labels: &[LabelId]) -> Result<Derivation, ArsError> {
        let mut d = Derivation::empty(source);
        for &label in labels {
            let step = self.step(d.target(), label).ok_or(ArsError::MissingStep {
                from: d.target(),
                label,
            })?;
            d.push(step);
        }
        Ok(d)
    }

    /// Convenience over [`Ars::derivation`] taking symbol names.
    pub fn derivation_named(&self, source: &str, labels: &[&str]) -> Result<Derivation, ArsError> {
        let source = self
            .object(source)
            .ok_or_else(|| ArsError::UnknownSymbol(source.to_string()))?;
        let labels = labels
            .iter()
            .map(|l| self.label(l).ok_or_else(|| ArsError::UnknownSymbol(l.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        self.derivation(source, &labels)
    }

    /// The derivation `⟦α⟧` denoted by a compatible trace.
    pub fn derivation_of_trace(&self, trace: &Trace) -> Result<Derivation, ArsError> {
        let pairs = trace.pairs();
        let Some(&(first, _)) = pairs.first() else {
            if !self.contains_object(trace.head()) {
                return Err(ArsError::IncompatibleTrace(0));
            }
            return Ok(Derivation::empty(trace.head()));
        };
        if !self.contains_object(first) {
            return Err(ArsError::IncompatibleTrace(0));
        }
        let mut d = Derivation::empty(first);
        for (i, &(object, label)) in pairs.iter().enumerate() {
            let expected_target = pairs.get(i + 1).map_or(trace.head(), |p| p.0);
            if d.target() != object || !self.contains_object(object) {
                return Err(ArsError::IncompatibleTrace(i));
            }
            match self.step(object, label) {
                Some(step) if step.target == expected_target => d.push(step),
                _ => return Err(ArsError::IncompatibleTrace(i)),
            }
        }
        Ok(d)
    }

    /// Every non-empty derivation of length at most `max_len`, optionally
    /// restricted to one source.
    pub fn enumerate_derivations(&self, source: Option<ObjectId>, max_len: usize) -> BTreeSet<Derivation> {
        let sources: Vec<ObjectId> = match source {
            Some(s) => vec![s],
            None => self.objects().collect(),
        };
        let mut result = BTreeSet::new();
        let mut frontier: Vec<Derivation> = sources.into_iter().map(Derivation::empty).collect();
        for _ in 0..max_len {
            let mut next = Vec::new();
            for d in &frontier {
                for step in self.out_steps(d.target()) {
                    next.push(d.extended(*step).expect("out-step is composable"));
                }
            }
            result.extend(next.iter().cloned());
            frontier = next;
        }
        result
    }

    /// Renders `a -phi1-> b -phi3-> a`; the empty derivation renders as its
    /// source object.
    pub fn render(&self, d: &Derivation) -> String {
        let mut out = self.object_name(d.source()).to_string();
        self.render_steps(d, &mut out);
        out
    }

    fn render_steps(&self, d: &Derivation, out: &mut String) {
        for step in d.steps() {
            out.push_str(" -");
            out.push_str(self.label_name(step.label));
            out.push_str("-> ");
            out.push_str(self.object_name(step.target));
        }
    }

    /// Renders `stem ( cycle )^w`, where the cycle omits its start object.
    pub fn render_lasso(&self, lasso: &Lasso) -> String {
        let mut out = self.render(lasso.stem());
        out.push_str(" (");
        self.render_steps(lasso.cycle(), &mut out);
        out.push_str(" )^w");
        out
    }

    /// Renders `⟨(a,phi1)(b,phi3)⟩a` style traces as `<(a,phi1)(b,phi3)>a`.
    pub fn render_trace(&self, trace: &Trace) -> String {
        let mut out = String::from("<");
        for &(o, l) in trace.pairs() {
            out.push('(');
            out.push_str(self.object_name(o));
            out.push(',');
            out.push_str(self.label_name(l));
            out.push(')');
        }
        out.push('>');
        out.push_str(self.object_name(trace.head()));
        out
    }
}

/// A finite derivation: a source object and a label word, with the visited
/// objects cached.
///
/// The empty derivation is represented at an object so it can still be
/// rendered; composition treats every empty derivation as neutral.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Derivation {
    source: ObjectId,
    labels: Vec<LabelId>,
    targets: Vec<ObjectId>,
}

impl Derivation {
    pub fn empty(at: ObjectId) -> Derivation {
        Derivation {
            source: at,
            labels: Vec::new(),
            targets: Vec::new(),
        }
    }

    pub fn from_step(step: Step) -> Derivation {
        Derivation {
            source: step.source,
            labels: vec![step.label],
            targets: vec![step.target],
        }
    }

    pub fn source(&self) -> ObjectId {
        self.source
    }

    /// `Im(π)`; the source for the empty derivation.
    pub fn target(&self) -> ObjectId {
        self.targets.last().copied().unwrap_or(self.source)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[LabelId] {
        &self.labels
    }

    /// Objects visited after each step.
    pub fn targets(&self) -> &[ObjectId] {
        &self.targets
    }

    /// Object at position `i`; position 0 is the source.
    pub fn object_at(&self, i: usize) -> ObjectId {
        if i == 0 {
            self.source
        } else {
            self.targets[i - 1]
        }
    }

    pub fn step(&self, i: usize) -> Step {
        Step {
            source: self.object_at(i),
            label: self.labels[i],
            target: self.targets[i],
        }
    }

    pub fn steps(&self) -> impl Iterator<Item = Step> + '_ {
        (0..self.len()).map(|i| self.step(i))
    }

    pub fn last_step(&self) -> Option<Step> {
        self.len().checked_sub(1).map(|i| self.step(i))
    }

    fn push(&mut self, step: Step) {
        debug_assert_eq!(step.source, self.target());
        self.labels.push(step.label);
        self.targets.push(step.target);
    }

    /// `π` followed by one step.
    pub fn extended(&self, step: Step) -> Result<Derivation, ArsError> {
        if step.source != self.target() {
            return Err(ArsError::NotComposable {
                target: self.target(),
                next: step.source,
            });
        }
        let mut d = self.clone();
        d.push(step);
        Ok(d)
    }

    /// Composition `π₁π₂`; defined when either side is empty or
    /// `Im(π₁) = Dom(π₂)`.
    pub fn compose(&self, other: &Derivation) -> Result<Derivation, ArsError> {
        if self.is_empty() {
            return Ok(other.clone());
        }
        if other.is_empty() {
            return Ok(self.clone());
        }
        if self.target() != other.source {
            return Err(ArsError::NotComposable {
                target: self.target(),
                next: other.source,
            });
        }
        let mut d = self.clone();
        d.labels.extend_from_slice(&other.labels);
        d.targets.extend_from_slice(&other.targets);
        Ok(d)
    }

    pub fn is_composable_with(&self, other: &Derivation) -> bool {
        self.is_empty() || other.is_empty() || self.target() == other.source
    }

    /// The factor covering steps `start..end`, re-sourced at its first object.
    pub fn factor(&self, start: usize, end: usize) -> Derivation {
        assert!(start <= end && end <= self.len(), "factor bounds out of range");
        Derivation {
            source: self.object_at(start),
            labels: self.labels[start..end].to_vec(),
            targets: self.targets[start..end].to_vec(),
        }
    }

    /// The prefix of length `n`.
    pub fn prefix(&self, n: usize) -> Derivation {
        self.factor(0, n)
    }

    /// All non-empty prefixes, shortest first (including `self`).
    pub fn prefixes(&self) -> Vec<Derivation> {
        (1..=self.len()).map(|n| self.prefix(n)).collect()
    }

    /// All non-empty factors.
    pub fn factors(&self) -> BTreeSet<Derivation> {
        let mut out = BTreeSet::new();
        for start in 0..self.len() {
            for end in start + 1..=self.len() {
                out.insert(self.factor(start, end));
            }
        }
        out
    }

    /// True when `self` is a (possibly non-strict) prefix of `other`.
    pub fn is_prefix_of(&self, other: &Derivation) -> bool {
        self.source == other.source && other.labels.starts_with(&self.labels)
    }

    /// Visits no object twice, except that the last object may equal the
    /// first.
    pub fn is_simple_cycle(&self) -> bool {
        if self.is_empty() || self.target() != self.source {
            return false;
        }
        let mut seen = HashSet::new();
        (0..self.len()).all(|i| seen.insert(self.object_at(i)))
    }

    /// The compatible trace `⟨α⟩Im(π)` with `⟦α⟧ = π`.
    pub fn to_trace(&self) -> Trace {
        Trace {
            pairs: (0..self.len()).map(|i| (self.object_at(i), self.labels[i])).collect(),
            head: self.target(),
        }
    }

    /// True when `⟦α⟧ = self` for the given trace.
    pub fn matches_trace(&self, trace: &Trace) -> bool {
        trace.len() == self.len() && self.is_traced_prefix_of(trace)
    }

    /// True when `self` is a prefix of `⟦α⟧` for the given trace.
    pub fn is_traced_prefix_of(&self, trace: &Trace) -> bool {
        let n = self.len();
        if trace.len() < n || trace.object_at(n) != self.target() {
            return false;
        }
        (0..n).all(|i| trace.pairs()[i] == (self.object_at(i), self.labels[i]))
    }
}

/// A history `α` and the current object: the traced object `⟨α⟩a`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Trace {
    pairs: Vec<(ObjectId, LabelId)>,
    head: ObjectId,
}

impl Trace {
    pub fn new(pairs: Vec<(ObjectId, LabelId)>, head: ObjectId) -> Trace {
        Trace { pairs, head }
    }

    /// `⟨Λ⟩a`.
    pub fn empty(head: ObjectId) -> Trace {
        Trace {
            pairs: Vec::new(),
            head,
        }
    }

    pub fn pairs(&self) -> &[(ObjectId, LabelId)] {
        &self.pairs
    }

    pub fn head(&self) -> ObjectId {
        self.head
    }

    /// `|α|`.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn label_word(&self) -> Vec<LabelId> {
        self.pairs.iter().map(|p| p.1).collect()
    }

    /// Object at position `i` of the history; position `len()` is the head.
    pub fn object_at(&self, i: usize) -> ObjectId {
        self.pairs.get(i).map_or(self.head, |p| p.0)
    }

    /// The step closing the history, `(u, φ', a)` for `α'⊙(u,φ')` at `a`.
    pub fn last_step(&self) -> Option<Step> {
        self.pairs.last().map(|&(source, label)| Step {
            source,
            label,
            target: self.head,
        })
    }

    /// Step `i` of `⟦α⟧`, assuming compatibility.
    pub fn step(&self, i: usize) -> Step {
        let (source, label) = self.pairs[i];
        Step {
            source,
            label,
            target: self.object_at(i + 1),
        }
    }

    /// The traced object after the first `n` steps.
    pub fn prefix(&self, n: usize) -> Trace {
        Trace {
            pairs: self.pairs[..n].to_vec(),
            head: self.object_at(n),
        }
    }

    /// `⟨α ⊙ (a, φ)⟩b` from `⟨α⟩a`.
    pub fn then(&self, label: LabelId, next: ObjectId) -> Trace {
        let mut pairs = self.pairs.clone();
        pairs.push((self.head, label));
        Trace { pairs, head: next }
    }

    /// Monoid product of histories `α ⊙ β`, keeping the head of `other`.
    pub fn concat(&self, other: &Trace) -> Trace {
        let mut pairs = self.pairs.clone();
        pairs.extend_from_slice(&other.pairs);
        Trace {
            pairs,
            head: other.head,
        }
    }
}

/// The eventually periodic infinite derivation `stem · cycle^ω`.
///
/// Lassos are kept in a canonical form: the cycle is primitive and the stem is
/// as short as possible, so two lassos are equal exactly when they denote the
/// same infinite derivation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lasso {
    stem: Derivation,
    cycle: Derivation,
}

impl Lasso {
    pub fn new(stem: Derivation, cycle: Derivation) -> Result<Lasso, ArsError> {
        if cycle.is_empty() {
            return Err(ArsError::EmptyCycle);
        }
        if cycle.target() != cycle.source() {
            return Err(ArsError::OpenCycle);
        }
        if stem.target() != cycle.source() {
            return Err(ArsError::NotComposable {
                target: stem.target(),
                next: cycle.source(),
            });
        }
        let mut stem = stem;
        let mut cycle = primitive_root(cycle);
        while let (Some(last), Some(cycle_last)) = (stem.last_step(), cycle.last_step()) {
            if last != cycle_last {
                break;
            }
            stem = stem.prefix(stem.len() - 1);
            cycle = rotate_right(&cycle);
        }
        Ok(Lasso { stem, cycle })
    }

    pub fn stem(&self) -> &Derivation {
        &self.stem
    }

    pub fn cycle(&self) -> &Derivation {
        &self.cycle
    }

    pub fn source(&self) -> ObjectId {
        self.stem.source()
    }

    /// `stem · cycle^k`.
    pub fn unroll(&self, k: usize) -> Derivation {
        let mut d = self.stem.clone();
        for _ in 0..k {
            d = d.compose(&self.cycle).expect("lasso cycle is composable");
        }
        d
    }

    /// The finite prefix of length `n` of the infinite derivation.
    pub fn prefix(&self, n: usize) -> Derivation {
        let reps = n.saturating_sub(self.stem.len()).div_ceil(self.cycle.len());
        self.unroll(reps).prefix(n)
    }
}

fn primitive_root(cycle: Derivation) -> Derivation {
    let n = cycle.len();
    for period in 1..n {
        if n.is_multiple_of(period)
            && cycle.object_at(period) == cycle.source()
            && (period..n).all(|i| cycle.labels[i] == cycle.labels[i - period])
        {
            return cycle.prefix(period);
        }
    }
    cycle
}

fn rotate_right(cycle: &Derivation) -> Derivation {
    let n = cycle.len();
    let last = cycle.step(n - 1);
    let mut d = Derivation::from_step(last);
    for i in 0..n - 1 {
        d.push(cycle.step(i));
    }
    d
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for LabelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.0)
    }
}
