//! Parser, static checker and reactive interpreter for Pantagruel, a
//! rule-based language orchestrating networked entities.
//!
//! A program has two layers. The specification layer declares interfaces
//! (typed attributes, sensed events and actions) and the entities that
//! implement them. The orchestration layer is a block of
//! `when ... trigger ... end` rules. The runtime executes the rules in
//! discrete ticks over a pair of stores (previous and current), joining the
//! partial stores produced by every rule.

pub mod domains;
pub mod rule_eval;
pub mod runtime;
pub mod spec_eval;
pub mod syntax;

pub use domains::{ConflictError, DualStore, Entity, EnvEntity, EnvInterface, Interface, Reference, Store, Value};
pub use rule_eval::{FiredRule, RuleError, TriggerMode};
pub use runtime::{run_trace, ChangeError, ExternalChange, RunState, Runtime, StepConfig, StepError, TickRecord};
pub use spec_eval::{compile, CheckedProgram, Diagnostic, DiagnosticCode, Severity};
pub use syntax::{parse_program, ParseError, ProgramAst, SourceSpan};
