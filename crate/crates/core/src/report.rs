use serde::{Deserialize, Serialize};

/// Whether a report checks an equality or a one-sided bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Identity,
    Inequality,
    /// Reported for trend inspection only; never fails a run.
    Monitored,
}

/// Outcome of one numerical check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub instance: String,
    pub kind: CheckKind,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub holds: bool,
    pub tolerance: f64,
    /// Number of configurations examined (1 for single-value checks).
    pub configurations: u64,
    /// Configurations that violated the statement.
    pub counterexamples: u64,
    /// True when no configuration met the statement's premise.
    pub vacuous: bool,
}

fn ratio_of(lhs: f64, rhs: f64) -> f64 {
    if rhs == 0.0 {
        if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        lhs / rhs
    }
}

impl VerificationReport {
    /// `|lhs - rhs| <= tol`.
    pub fn identity(name: impl Into<String>, instance: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            instance: instance.into(),
            kind: CheckKind::Identity,
            lhs,
            rhs,
            ratio: ratio_of(lhs, rhs),
            holds: (lhs - rhs).abs() <= tol,
            tolerance: tol,
            configurations: 1,
            counterexamples: u64::from((lhs - rhs).abs() > tol),
            vacuous: false,
        }
    }

    /// `lhs <= rhs * (1 + tol) + tol`.
    pub fn inequality(name: impl Into<String>, instance: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let holds = lhs <= rhs * (1.0 + tol) + tol;
        Self {
            name: name.into(),
            instance: instance.into(),
            kind: CheckKind::Inequality,
            lhs,
            rhs,
            ratio: ratio_of(lhs, rhs),
            holds,
            tolerance: tol,
            configurations: 1,
            counterexamples: u64::from(!holds),
            vacuous: false,
        }
    }

    pub fn monitored(name: impl Into<String>, instance: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            instance: instance.into(),
            kind: CheckKind::Monitored,
            lhs,
            rhs,
            ratio: ratio_of(lhs, rhs),
            holds: true,
            tolerance: 0.0,
            configurations: 1,
            counterexamples: 0,
            vacuous: false,
        }
    }

    /// Aggregate over an exhaustive enumeration. `lhs`/`rhs` hold the tightest
    /// configuration seen (largest `lhs - rhs` for a bound that reads lhs <= rhs).
    pub fn enumeration(
        name: impl Into<String>,
        instance: impl Into<String>,
        configurations: u64,
        counterexamples: u64,
        worst: Option<(f64, f64)>,
        tol: f64,
    ) -> Self {
        let (lhs, rhs) = worst.unwrap_or((0.0, 0.0));
        Self {
            name: name.into(),
            instance: instance.into(),
            kind: CheckKind::Inequality,
            lhs,
            rhs,
            ratio: ratio_of(lhs, rhs),
            holds: counterexamples == 0,
            tolerance: tol,
            configurations,
            counterexamples,
            vacuous: configurations == 0,
        }
    }
}

/// Combines reports of one check over many instances. Counts add up, and
/// `lhs`/`rhs` come from the part closest to failing (largest `ratio` for
/// monitored parts).
pub fn merge(name: impl Into<String>, instance: impl Into<String>, parts: &[VerificationReport]) -> VerificationReport {
    let kind = parts.first().map_or(CheckKind::Inequality, |p| p.kind);
    let live: Vec<&VerificationReport> = parts.iter().filter(|p| !p.vacuous).collect();
    let worst = live.iter().copied().max_by(|a, b| {
        let key = |r: &VerificationReport| match r.kind {
            CheckKind::Identity => (r.lhs - r.rhs).abs(),
            CheckKind::Inequality => r.lhs - r.rhs,
            CheckKind::Monitored => r.ratio,
        };
        key(a).total_cmp(&key(b))
    });
    let (lhs, rhs) = worst.map_or((0.0, 0.0), |w| (w.lhs, w.rhs));
    VerificationReport {
        name: name.into(),
        instance: instance.into(),
        kind,
        lhs,
        rhs,
        ratio: ratio_of(lhs, rhs),
        holds: parts.iter().all(|p| p.holds),
        tolerance: parts.iter().map(|p| p.tolerance).fold(0.0, f64::max),
        configurations: parts.iter().map(|p| p.configurations).sum(),
        counterexamples: parts.iter().map(|p| p.counterexamples).sum(),
        vacuous: live.is_empty(),
    }
}

/// Tracks the configuration closest to violating `lhs <= rhs`.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Tightest {
    pub best: Option<(f64, f64)>,
}

impl Tightest {
    pub fn offer(&mut self, lhs: f64, rhs: f64) {
        let slack = rhs - lhs;
        match self.best {
            Some((l, r)) if r - l <= slack => {}
            _ => self.best = Some((lhs, rhs)),
        }
    }
}
