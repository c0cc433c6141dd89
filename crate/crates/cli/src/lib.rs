//! Concrete syntax for the toolkit: parser and pretty-printers, shared by
//! the `lamgs` binary and its tests.

pub mod parse;
pub mod render;
