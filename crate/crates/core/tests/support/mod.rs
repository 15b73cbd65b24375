#![allow(dead_code)]

pub mod oracle;

use csr_core::{translate_str, ConfigStructure};

pub fn term(t: &str) -> ConfigStructure {
    translate_str(t).unwrap_or_else(|e| panic!("`{t}`: {e}"))
}
