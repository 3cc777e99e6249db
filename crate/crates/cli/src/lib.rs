//! Machine-readable outputs of the `rankagg` binary. Each format has a
//! writer and a reader, and reading then writing reproduces the input
//! byte for byte.

pub mod output;
