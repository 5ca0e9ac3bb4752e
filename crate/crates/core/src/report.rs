//! Machine-readable check reports.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gridcalc::{convergence_order, OrderEstimate};

pub const REPORT_SCHEMA: &str = "hsl-lab/report/1";
pub const DEFAULT_TOL: f64 = 1e-10;
pub const MIN_ORDER: f64 = 1.7;
/// Environment variable overriding the default tolerance of exact checks.
pub const TOL_ENV: &str = "HSL_LAB_TOL";

pub fn default_tolerance() -> f64 {
    std::env::var(TOL_ENV).ok().and_then(|s| s.parse().ok()).filter(|t: &f64| *t > 0.0).unwrap_or(DEFAULT_TOL)
}

/// How a check is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Passes when `residual <= tolerance`.
    Exact,
    /// Passes when the observed order is at least `tolerance`, or every level
    /// sits at the exactness floor.
    Order,
    /// Negative control: passes when `residual >= tolerance`.
    LowerBound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReportedOrder {
    Exact,
    Value(f64),
}

impl Serialize for ReportedOrder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ReportedOrder::Exact => s.serialize_str("exact"),
            ReportedOrder::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for ReportedOrder {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) if t == "exact" => Ok(ReportedOrder::Exact),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("unknown order '{t}'"))),
            Raw::Number(v) => Ok(ReportedOrder::Value(v)),
        }
    }
}

impl From<OrderEstimate> for ReportedOrder {
    fn from(o: OrderEstimate) -> Self {
        match o {
            OrderEstimate::Exact => ReportedOrder::Exact,
            OrderEstimate::Order(v) => ReportedOrder::Value(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    /// Residual on the finest level.
    pub residual: f64,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<ReportedOrder>,
    /// `(h, residual)` per level, coarse to fine.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<(f64, f64)>,
    pub pass: bool,
}

impl Check {
    pub fn exact(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let pass = residual <= tolerance;
        Self { name: name.into(), kind: CheckKind::Exact, residual, tolerance, order: None, levels: vec![], pass }
    }

    pub fn lower_bound(name: impl Into<String>, residual: f64, bound: f64) -> Self {
        let pass = residual >= bound;
        Self {
            name: name.into(),
            kind: CheckKind::LowerBound,
            residual,
            tolerance: bound,
            order: None,
            levels: vec![],
            pass,
        }
    }

    /// `levels` as `(h, residual)` in any order.
    pub fn order(name: impl Into<String>, levels: Vec<(f64, f64)>, min_order: f64) -> Result<Self> {
        let mut levels = levels;
        levels.sort_by(|a, b| b.0.total_cmp(&a.0));
        let est = convergence_order(&levels)?;
        let residual = levels.last().map(|l| l.1).unwrap_or(f64::NAN);
        Ok(Self {
            name: name.into(),
            kind: CheckKind::Order,
            residual,
            tolerance: min_order,
            order: Some(est.into()),
            pass: est.at_least(min_order),
            levels,
        })
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        match (&self.kind, &self.order) {
            (CheckKind::Order, Some(ReportedOrder::Exact)) => {
                write!(
                    f,
                    "{verdict} {} residual {:.3e} order exact (need >= {})",
                    self.name, self.residual, self.tolerance
                )
            }
            (CheckKind::Order, Some(ReportedOrder::Value(p))) => {
                write!(
                    f,
                    "{verdict} {} residual {:.3e} order {p:.2} (need >= {})",
                    self.name, self.residual, self.tolerance
                )
            }
            (CheckKind::LowerBound, _) => {
                write!(f, "{verdict} {} residual {:.3e} (need >= {:.1e})", self.name, self.residual, self.tolerance)
            }
            _ => write!(f, "{verdict} {} residual {:.3e} (tol {:.1e})", self.name, self.residual, self.tolerance),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub subject: String,
    /// Finest level.
    pub grid: Option<GridInfo>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grids: Vec<GridInfo>,
    pub checks: Vec<Check>,
    /// `[re, im]`
    pub lambda_samples: Vec<[f64; 2]>,
    /// Derived classifications (special Lagrangian, CMC, …) that are
    /// reported but not judged.
    #[serde(default)]
    pub properties: BTreeMap<String, serde_json::Value>,
    pub versions: BTreeMap<String, String>,
    pub seed: u64,
}

impl Report {
    pub fn new(subject: impl Into<String>, seed: u64) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert("hsl-lab".to_string(), env!("CARGO_PKG_VERSION").to_string());
        versions.insert("report-schema".to_string(), REPORT_SCHEMA.to_string());
        Self {
            schema: REPORT_SCHEMA.to_string(),
            subject: subject.into(),
            grid: None,
            grids: vec![],
            checks: vec![],
            lambda_samples: vec![],
            properties: BTreeMap::new(),
            versions,
            seed,
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn property(&mut self, key: impl Into<String>, v: impl Into<serde_json::Value>) {
        self.properties.insert(key.into(), v.into());
    }

    /// Orders checks by name; ties keep insertion order.
    pub fn finish(mut self) -> Self {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Non-finite numbers have no JSON form; they are written as `null`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// One row of the per-λ residual curves.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub check: String,
    pub lambda: [f64; 2],
    pub h: f64,
    pub residual: f64,
}

pub fn curves_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("check,lambda_re,lambda_im,h,residual\n");
    for p in points {
        out.push_str(&format!("{},{:e},{:e},{:e},{:e}\n", p.check, p.lambda[0], p.lambda[1], p.h, p.residual));
    }
    out
}
