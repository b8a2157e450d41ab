//! A checker for equational proofs about small functional programs.
//!
//! A module declares data types, typed functions defined by pattern
//! matching equations, axioms and lemmas. Each lemma carries a proof by
//! rewriting, extensionality, case analysis or structural induction.
//! Any expression, rule name, proof or declaration may be left as a hole
//! (`_`, `...`), which makes the result incomplete rather than wrong.
//!
//! The pipeline is [`parse_file`], [`resolve_names`], [`check_module_types`]
//! and [`check_module`]. [`match_module`] compares a solution against a
//! blueprint with holes before any of that.

pub mod blueprint;
pub mod diagnostics;
pub mod parser;
pub mod proofcheck;
pub mod rewrite;
pub mod syntax;
pub mod typecheck;

pub use blueprint::{match_module, MatchOutcome};
pub use diagnostics::{render, render_machine, rendered_slices, Diagnostic, Label, Phase, Sources};
pub use parser::{parse_file, parse_module, parse_term, parse_type, resolve_names};
pub use proofcheck::{check_module, HoleInfo, HoleKind, LemmaReport, ModuleReport, ProofStatus};
pub use rewrite::{check_step, Incomplete, Rule, RuleOrigin, StepVerdict};
pub use syntax::*;
pub use typecheck::{
    check_module_types, infer_type, unify, Scheme, TySubst, Type, TypeEnv, UnifyError,
};
