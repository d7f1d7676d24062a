use std::fmt::Write as _;
use std::io::{self, Write};

use crate::error::Error;
use crate::format::fmt_f64;

/// One named measurement against its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub metric: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub context: String,
}

impl Check {
    /// Passes when `metric ≤ tolerance`.
    pub fn at_most(name: &str, metric: f64, tolerance: f64, context: &str) -> Self {
        Self {
            name: name.into(),
            metric,
            tolerance,
            pass: metric <= tolerance,
            context: context.into(),
        }
    }

    /// Passes when `|metric − target| ≤ tolerance`.
    pub fn within(name: &str, metric: f64, target: f64, tolerance: f64, context: &str) -> Self {
        Self {
            pass: (metric - target).abs() <= tolerance,
            ..Self::at_most(name, metric, tolerance, context)
        }
    }

    pub fn error(name: &str, context: &str, err: &Error) -> Self {
        Self {
            name: name.into(),
            metric: f64::NAN,
            tolerance: f64::NAN,
            pass: false,
            context: format!("{context} error: {err}"),
        }
    }

    pub fn from_result(
        name: &str,
        metric: crate::Result<f64>,
        tolerance: f64,
        context: &str,
    ) -> Self {
        match metric {
            Ok(m) => Self::at_most(name, m, tolerance, context),
            Err(e) => Self {
                tolerance,
                ..Self::error(name, context, &e)
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub scenario: String,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(scenario: &str) -> Self {
        Self {
            scenario: scenario.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    /// True iff every check passed and there is at least one.
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Largest metric among checks called `name`.
    pub fn worst(&self, name: &str) -> Option<&Check> {
        self.checks
            .iter()
            .filter(|c| c.name == name)
            .max_by(|a, b| a.metric.total_cmp(&b.metric))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "name,metric,tolerance,pass,context")?;
        for c in &self.checks {
            writeln!(
                w,
                "{},{},{},{},{}",
                quote(&c.name),
                fmt_f64(c.metric),
                fmt_f64(c.tolerance),
                c.pass,
                quote(&c.context)
            )?;
        }
        Ok(())
    }

    /// One line per check name with its worst metric, then the verdict.
    pub fn summary(&self) -> String {
        let mut names: Vec<&str> = Vec::new();
        for c in &self.checks {
            if !names.contains(&c.name.as_str()) {
                names.push(&c.name);
            }
        }
        let mut out = String::new();
        for name in names {
            let group: Vec<&Check> = self.checks.iter().filter(|c| c.name == name).collect();
            let failed = group.iter().filter(|c| !c.pass).count();
            let worst = group
                .iter()
                .map(|c| c.metric)
                .fold(f64::NEG_INFINITY, |m, x| {
                    if x.is_nan() || m.is_nan() {
                        f64::NAN
                    } else {
                        m.max(x)
                    }
                });
            let _ = writeln!(
                out,
                "{} {name}: {}/{} passed, worst {} (tol {})",
                if failed == 0 { "PASS" } else { "FAIL" },
                group.len() - failed,
                group.len(),
                fmt_f64(worst),
                fmt_f64(group[0].tolerance),
            );
            for c in group.iter().filter(|c| !c.pass) {
                let _ = writeln!(
                    out,
                    "    {} > {} at {}",
                    fmt_f64(c.metric),
                    fmt_f64(c.tolerance),
                    c.context
                );
            }
        }
        let failed = self.failures().count();
        let _ = writeln!(
            out,
            "{}: {} ({} checks, {} failed)",
            self.scenario,
            if self.passed() { "PASS" } else { "FAIL" },
            self.checks.len(),
            failed
        );
        out
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
