use std::fmt;

use super::PhiTriple;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
}

/// One named inequality `value ≤ threshold` or `value ≥ threshold`.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckEntry {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub relation: Relation,
}

impl CheckEntry {
    pub fn at_most(name: &'static str, value: f64, threshold: f64) -> Self {
        CheckEntry {
            name,
            value,
            threshold,
            relation: Relation::AtMost,
        }
    }

    pub fn at_least(name: &'static str, value: f64, threshold: f64) -> Self {
        CheckEntry {
            name,
            value,
            threshold,
            relation: Relation::AtLeast,
        }
    }

    pub fn passed(&self) -> bool {
        match self.relation {
            Relation::AtMost => self.value <= self.threshold,
            Relation::AtLeast => self.value >= self.threshold,
        }
    }
}

impl fmt::Display for CheckEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        };
        let mark = if self.passed() { "ok" } else { "FAIL" };
        write!(f, "{mark:4} {}: {:e} {op} {:e}", self.name, self.value, self.threshold)
    }
}

/// Per-sample diagnostics along the curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiSample {
    pub s: f64,
    pub phi: PhiTriple,
    pub isoparam_residual: f64,
}

/// Outcome of a condition check: named inequalities plus optional
/// per-sample values.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub check: &'static str,
    pub entries: Vec<CheckEntry>,
    pub samples: Vec<PhiSample>,
}

impl ConditionReport {
    pub fn new(check: &'static str) -> Self {
        ConditionReport {
            check,
            entries: Vec::new(),
            samples: Vec::new(),
        }
    }

    pub fn push(&mut self, entry: CheckEntry) {
        self.entries.push(entry);
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(CheckEntry::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| !e.passed())
    }

    pub fn entry(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "pass" } else { "fail" };
        writeln!(f, "{}: {verdict}", self.check)?;
        for e in &self.entries {
            writeln!(f, "  {e}")?;
        }
        Ok(())
    }
}
