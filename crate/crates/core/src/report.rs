//! Verification reports shared by the counting and geometry verifiers.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

/// An exact value in a report: integers as JSON numbers, rationals as `"p/q"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactValue {
    Int(BigInt),
    Rat(BigRational),
    Text(String),
}

impl From<i128> for ExactValue {
    fn from(v: i128) -> Self {
        ExactValue::Int(BigInt::from(v))
    }
}

impl From<BigRational> for ExactValue {
    fn from(v: BigRational) -> Self {
        ExactValue::Rat(v)
    }
}

impl From<String> for ExactValue {
    fn from(v: String) -> Self {
        ExactValue::Text(v)
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactValue::Int(v) => write!(f, "{v}"),
            ExactValue::Rat(v) => f.write_str(&rational_string(v)),
            ExactValue::Text(v) => f.write_str(v),
        }
    }
}

impl Serialize for ExactValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExactValue::Int(v) => match v.to_i64() {
                Some(x) => serializer.serialize_i64(x),
                None => serializer.serialize_str(&v.to_string()),
            },
            other => serializer.serialize_str(&other.to_string()),
        }
    }
}

/// `p/q`, or just `p` for integers.
pub fn rational_string(v: &BigRational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
}

/// One comparison at one index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub i: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub part: Option<&'static str>,
    pub lhs: ExactValue,
    pub rhs: ExactValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub lemma: String,
    pub range: Option<[usize; 2]>,
    pub verdict: Verdict,
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<Comparison>,
    /// Every comparison made, in index order (counting verifiers only).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub entries: Vec<Comparison>,
}

impl VerificationReport {
    pub fn new(lemma: impl Into<String>, range: Option<[usize; 2]>) -> Self {
        Self {
            lemma: lemma.into(),
            range,
            verdict: Verdict::Holds,
            checked: 0,
            skipped: 0,
            failures: Vec::new(),
            entries: Vec::new(),
        }
    }

    /// Records one comparison together with its outcome.
    pub fn record(&mut self, cmp: Comparison, holds: bool, keep_entry: bool) {
        self.checked += 1;
        if !holds {
            self.verdict = Verdict::Fails;
            self.failures.push(cmp.clone());
        }
        if keep_entry {
            self.entries.push(cmp);
        }
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn first_failure(&self) -> Option<&Comparison> {
        self.failures.first()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// Folds another report for the same check into this one.
    pub fn merge(&mut self, other: VerificationReport) {
        self.checked += other.checked;
        self.skipped += other.skipped;
        if other.verdict == Verdict::Fails {
            self.verdict = Verdict::Fails;
        }
        self.failures.extend(other.failures);
        self.entries.extend(other.entries);
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.verdict {
            Verdict::Holds => "holds",
            Verdict::Fails => "FAILS",
        };
        write!(f, "{}: {verdict}", self.lemma)?;
        if let Some([lo, hi]) = self.range {
            write!(f, " on [{lo}, {hi}]")?;
        }
        write!(f, " ({} checked, {} skipped)", self.checked, self.skipped)?;
        if let Some(first) = self.failures.first() {
            write!(f, "; first failure at i={}: {} vs {}", first.i, first.lhs, first.rhs)?;
            if let Some(d) = &first.detail {
                write!(f, " [{d}]")?;
            }
        }
        Ok(())
    }
}
