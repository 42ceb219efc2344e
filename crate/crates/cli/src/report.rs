//! Machine-readable reports. Field order is fixed by the struct layout and
//! checks are sorted by id, so equal inputs give equal bytes.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::RunConfig;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    /// Family the check belongs to.
    pub tag: String,
    pub instances: usize,
    /// `exact-zero`, `nonzero`, a max-abs float, or `n/a` for ranks.
    pub residual: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, String>,
    /// Wall time of the batch that produced the check; only with `--timings`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl Check {
    pub fn new(id: impl Into<String>, tag: &str, instances: usize) -> Check {
        Check {
            id: id.into(),
            tag: tag.into(),
            instances,
            residual: "n/a".into(),
            pass: false,
            expected: None,
            actual: None,
            detail: None,
            values: BTreeMap::new(),
            elapsed_ms: None,
        }
    }

    /// Exact check: `failures` instances left a nonzero residual.
    pub fn exact(id: impl Into<String>, tag: &str, instances: usize, failures: usize) -> Check {
        let mut c = Check::new(id, tag, instances);
        c.pass = failures == 0;
        if c.pass {
            c.residual = "exact-zero".into();
        } else {
            c.residual = "nonzero".into();
            c.detail = Some(format!("{failures} of {instances} instances leave a nonzero residual"));
        }
        c
    }

    pub fn rank(id: impl Into<String>, tag: &str, expected: usize, actual: usize) -> Check {
        let mut c = Check::new(id, tag, 1);
        c.pass = expected == actual;
        c.expected = Some(expected.to_string());
        c.actual = Some(actual.to_string());
        c
    }

    pub fn detail(mut self, d: impl Into<String>) -> Check {
        self.detail = Some(d.into());
        self
    }

    pub fn value(mut self, k: impl Into<String>, v: impl Into<String>) -> Check {
        self.values.insert(k.into(), v.into());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scope: Option<String>,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &str, scope: Option<&str>, config: &RunConfig, mut checks: Vec<Check>) -> Report {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let pass = checks.iter().filter(|c| c.pass).count();
        Report {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            scope: scope.map(str::to_string),
            config: config.clone(),
            summary: Summary { pass, fail: checks.len() - pass },
            checks,
        }
    }

    pub fn ok(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per check plus a summary line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{verdict} {} {}", c.id, c.residual));
            if let (Some(e), Some(a)) = (&c.expected, &c.actual) {
                out.push_str(&format!(" expected={e} actual={a}"));
            }
            if let Some(d) = &c.detail {
                out.push_str(&format!(" ({d})"));
            }
            out.push('\n');
        }
        out.push_str(&format!("{}: {} pass, {} fail\n", self.command, self.summary.pass, self.summary.fail));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            assert_eq!(float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn checks_sorted_and_counted() {
        let cfg = RunConfig::default();
        let r = Report::new(
            "x",
            None,
            &cfg,
            vec![Check::exact("eq:b", "t", 1, 1), Check::exact("eq:a", "t", 1, 0)],
        );
        assert_eq!(r.checks[0].id, "eq:a");
        assert_eq!(r.summary, Summary { pass: 1, fail: 1 });
        assert!(!r.ok());
    }
}
