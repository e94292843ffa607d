//! Channel and input distribution in, aggregate rate region out.

use crate::channel::{validate_injectivity, ChannelSpec};
use crate::entropy::{build_entropy_table, InputDistribution};
use crate::error::{Error, Result};
use crate::hk_region::{build_a1, project_to_aggregate};
use crate::polytope::{Region, DEFAULT_TOL};
use crate::theorem_region::{default_a_max, enumerate_facets, DEFAULT_FACET_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Eliminate the split rates from the rate-splitting region.
    HkProject,
    /// Enumerate facet choices directly.
    Theorem,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionOptions {
    pub tol: f64,
    /// Defaults to [`default_a_max`] for the channel's user count.
    pub a_max: Option<u32>,
    pub facet_cap: usize,
    pub allow_non_injective: bool,
}

impl Default for RegionOptions {
    fn default() -> Self {
        RegionOptions {
            tol: DEFAULT_TOL,
            a_max: None,
            facet_cap: DEFAULT_FACET_CAP,
            allow_non_injective: false,
        }
    }
}

pub fn capacity_region(spec: &ChannelSpec, dist: &InputDistribution, method: Method, opts: &RegionOptions) -> Result<Region> {
    if !opts.allow_non_injective {
        let report = validate_injectivity(spec);
        if let Some(c) = report.violations.first() {
            return Err(Error::Domain(format!(
                "channel is not injective at receiver {} (x = {}): {:?} and {:?} give the same output",
                c.receiver + 1,
                c.x,
                c.first,
                c.second
            )));
        }
    }
    let table = build_entropy_table(spec, dist)?;
    match method {
        Method::HkProject => project_to_aggregate(&build_a1(&table), opts.tol),
        Method::Theorem => {
            let a_max = opts.a_max.unwrap_or_else(|| default_a_max(spec.k()));
            enumerate_facets(&table, a_max, opts.facet_cap, opts.tol)
        }
    }
}
