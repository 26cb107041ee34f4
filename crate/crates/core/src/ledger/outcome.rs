use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::grid::DomainError;

/// How a recorded move was judged against the grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", content = "reason", rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    /// The cited rationale does not hold, but the move is kept and applied
    /// for a reviewer to inspect.
    IncorrectButRecorded(String),
    /// The move was rejected and changed nothing.
    IntegrityError(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub redundant: bool,
    pub review: bool,
}

/// Serialised flat: `{"class", "reason", "redundant", "review"}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationOutcome {
    pub verdict: Verdict,
    pub flags: Flags,
}

impl ValidationOutcome {
    pub fn valid() -> Self {
        ValidationOutcome {
            verdict: Verdict::Valid,
            flags: Flags::default(),
        }
    }

    pub fn incorrect(reason: impl Into<String>) -> Self {
        ValidationOutcome {
            verdict: Verdict::IncorrectButRecorded(single_line(reason.into())),
            flags: Flags {
                redundant: false,
                review: true,
            },
        }
    }

    pub fn integrity(reason: impl Into<String>) -> Self {
        ValidationOutcome {
            verdict: Verdict::IntegrityError(single_line(reason.into())),
            flags: Flags::default(),
        }
    }

    #[must_use]
    pub fn with_redundant(mut self, redundant: bool) -> Self {
        self.flags.redundant = redundant;
        self
    }

    pub fn is_valid(&self) -> bool {
        matches!(self.verdict, Verdict::Valid)
    }

    pub fn is_incorrect(&self) -> bool {
        matches!(self.verdict, Verdict::IncorrectButRecorded(_))
    }

    pub fn is_integrity_error(&self) -> bool {
        matches!(self.verdict, Verdict::IntegrityError(_))
    }

    pub fn reason(&self) -> Option<&str> {
        match &self.verdict {
            Verdict::Valid => None,
            Verdict::IncorrectButRecorded(r) | Verdict::IntegrityError(r) => Some(r),
        }
    }

    pub fn class(&self) -> &'static str {
        match self.verdict {
            Verdict::Valid => "valid",
            Verdict::IncorrectButRecorded(_) => "incorrect",
            Verdict::IntegrityError(_) => "integrity",
        }
    }
}

fn single_line(reason: String) -> String {
    if reason.contains(['\n', '\r']) {
        reason.replace(['\n', '\r'], " ")
    } else {
        reason
    }
}

impl Serialize for ValidationOutcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ValidationOutcome", 4)?;
        s.serialize_field("class", self.class())?;
        s.serialize_field("reason", &self.reason())?;
        s.serialize_field("redundant", &self.flags.redundant)?;
        s.serialize_field("review", &self.flags.review)?;
        s.end()
    }
}

/// `class[+redundant][+review][:reason]`
impl fmt::Display for ValidationOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.class())?;
        if self.flags.redundant {
            f.write_str("+redundant")?;
        }
        if self.flags.review {
            f.write_str("+review")?;
        }
        if let Some(reason) = self.reason() {
            write!(f, ":{reason}")?;
        }
        Ok(())
    }
}

impl FromStr for ValidationOutcome {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || DomainError::new("outcome", s);
        let (head, reason) = match s.split_once(':') {
            Some((head, reason)) => (head, Some(reason)),
            None => (s, None),
        };
        let mut parts = head.split('+');
        let class = parts.next().ok_or_else(err)?;
        let mut flags = Flags::default();
        for flag in parts {
            match flag {
                "redundant" if !flags.redundant && !flags.review => flags.redundant = true,
                "review" if !flags.review => flags.review = true,
                _ => return Err(err()),
            }
        }
        let verdict = match (class, reason) {
            ("valid", None) => Verdict::Valid,
            ("incorrect", Some(r)) => Verdict::IncorrectButRecorded(r.to_owned()),
            ("integrity", Some(r)) => Verdict::IntegrityError(r.to_owned()),
            _ => return Err(err()),
        };
        let outcome = ValidationOutcome { verdict, flags };
        // the review flag travels with incorrect verdicts and nothing else
        if outcome.is_incorrect() != flags.review {
            return Err(err());
        }
        Ok(outcome)
    }
}
