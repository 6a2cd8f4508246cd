//! Abstract rewriting systems and strategies over them: extensional
//! derivation sets, intensional (memoryless and memoried) strategies, and
//! logical strategies with accepting conditions.

pub mod ars;
pub mod intensional;
pub mod logical;
pub mod rexp;
pub mod scenarios;
pub mod spec_lang;
pub mod strategy;
pub mod systems;

pub use ars::{Ars, ArsError, Derivation, LabelId, Lasso, ObjectId, Step, Trace};
pub use intensional::{Choice, Color, IntensionalError, IntensionalStrategy, LabelOrder, MemoryClass};
pub use logical::{AcceptCondition, CharacteristicPredicate, LogicalStrategy};
pub use rexp::RationalExpr;
pub use strategy::{AbstractStrategy, Outcome, Property, Verdict};
