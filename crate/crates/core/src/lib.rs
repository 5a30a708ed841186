//! Resource-aware Featherweight Java.
//!
//! Grade algebras ([`grades`]) and their heterogeneous combination
//! ([`hetero`]) annotate types and environments of a small Java core
//! ([`lang`]). The checker ([`typing`]) elaborates source programs into
//! annotated ones, which the instrumented interpreter ([`runtime`]) runs
//! while consuming variable grades. [`prop`] checks the soundness results
//! on a corpus and [`cli`] exposes everything on the command line.

pub mod cli;
pub mod exec;
pub mod grades;
pub mod hetero;
pub mod lang;
pub mod prop;
pub mod runtime;
pub mod typing;
