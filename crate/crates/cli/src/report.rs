use serde::Serialize;

use hyptype_core::MetricFamily;

pub const TOOL: &str = "hyptype";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Violation,
    Found,
    NotFound,
}

#[derive(Debug, Clone, Serialize)]
pub struct DhvBound {
    pub c: f64,
    pub delta: f64,
}

/// Certified Gromov constants of every family.
#[derive(Debug, Clone, Serialize)]
pub struct BoundTable {
    pub go: f64,
    pub dhv: DhvBound,
    pub na: f64,
    pub ibr: f64,
}

impl BoundTable {
    pub fn new(c: f64) -> Self {
        Self {
            go: MetricFamily::GehringOsgood.certified_delta(),
            dhv: DhvBound {
                c,
                delta: MetricFamily::Dhv { c }.certified_delta(),
            },
            na: MetricFamily::NikolovAndreev.certified_delta(),
            ibr: MetricFamily::Ibragimov.certified_delta(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report<C: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: C,
    pub seed: u64,
    pub certified_bounds: BoundTable,
    pub result: R,
    pub status: Status,
}

impl<C: Serialize, R: Serialize> Report<C, R> {
    pub fn new(
        command: &'static str,
        config: C,
        seed: u64,
        c: f64,
        result: R,
        status: Status,
    ) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command,
            config,
            seed,
            certified_bounds: BoundTable::new(c),
            result,
            status,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}
