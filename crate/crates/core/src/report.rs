//! Structured text reports: a verdict plus ordered sections of lines.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// 0 for PASS/INFO, 1 for FAIL.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Fail => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Info => "INFO",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub heading: String,
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub claim: String,
    pub verdict: Verdict,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(claim: impl Into<String>, verdict: Verdict) -> Self {
        Report {
            claim: claim.into(),
            verdict,
            sections: Vec::new(),
        }
    }

    pub fn with_section<I, S>(mut self, heading: impl Into<String>, lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.push_section(heading, lines);
        self
    }

    pub fn push_section<I, S>(&mut self, heading: impl Into<String>, lines: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.sections.push(Section {
            heading: heading.into(),
            lines: lines.into_iter().map(Into::into).collect(),
        });
    }

    /// Downgrades the verdict to FAIL if `ok` is false.
    pub fn require(&mut self, ok: bool) {
        if !ok {
            self.verdict = Verdict::Fail;
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "claim: {}", self.claim)?;
        for s in &self.sections {
            writeln!(f, "[{}]", s.heading)?;
            for l in &s.lines {
                writeln!(f, "  {l}")?;
            }
        }
        writeln!(f, "verdict: {}", self.verdict)
    }
}
