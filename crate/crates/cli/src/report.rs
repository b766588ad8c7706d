//! Assertion bookkeeping: one summary line per assertion on stderr.

use serde::Serialize;

use crate::exit;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Default)]
pub struct Report {
    pub assertions: Vec<Assertion>,
}

impl Report {
    /// Records an assertion and prints its summary line.
    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        let a = Assertion {
            name: name.into(),
            passed,
            detail: detail.into(),
        };
        eprintln!("{} {}: {}", if passed { "PASS" } else { "FAIL" }, a.name, a.detail);
        self.assertions.push(a);
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            exit::OK
        } else {
            exit::ASSERTION_FAILED
        }
    }
}
