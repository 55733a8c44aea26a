//! Micro-local and overall dispersive decay exponents.
//!
//! Near a hyperbolic direction with coupling vanishing order `ℓ` and tangency
//! order `γ̄` the solution decays like `t^{-1/(2ℓ)}` when `2ℓ ≤ γ̄` and like
//! `t^{-1/γ̄}` otherwise. Away from hyperbolic directions the rate is `t^{-1}`,
//! and a sheet whose coupling vanishes identically decays like `t^{-1/2}`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::fresnel::{tangency_order, FresnelError, TangencyResult};
use crate::hyperbolic::{circular_distance, HyperbolicCatalog, HyperbolicError};
use crate::media::{check_assumptions, Assumption, AssumptionReport, Moduli};
use crate::spectral::Sheet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecayError {
    #[error("assumption {assumption} is violated")]
    AssumptionViolated { assumption: Assumption },
    #[error(transparent)]
    Hyperbolic(#[from] HyperbolicError),
    #[error(transparent)]
    Fresnel(#[from] FresnelError),
}

/// Exact decay exponent `p/q` in `t^{-p/q}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Exponent(pub Rational64);

impl Exponent {
    pub const ONE: Exponent = Exponent(Rational64::new_raw(1, 1));
    pub const HALF: Exponent = Exponent(Rational64::new_raw(1, 2));

    pub fn new(numer: i64, denom: i64) -> Self {
        Exponent(Rational64::new(numer, denom))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// `"t^-1/2"` style rate string.
    pub fn rate(&self) -> String {
        format!("t^-{self}")
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Exponent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        let n: i64 = n.trim().parse().map_err(|_| format!("bad exponent {s:?}"))?;
        let d: i64 = d.trim().parse().map_err(|_| format!("bad exponent {s:?}"))?;
        if d == 0 {
            return Err(format!("bad exponent {s:?}"));
        }
        Ok(Exponent::new(n, d))
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Exponent for one hyperbolic direction.
pub fn microlocal_exponent(ell: u32, gamma_bar: u8) -> Exponent {
    assert!(ell >= 1, "vanishing order must be positive");
    assert!((2..=4).contains(&gamma_bar), "tangency order must be 2, 3 or 4");
    if 2 * ell <= gamma_bar as u32 {
        Exponent::new(1, 2 * ell as i64)
    } else {
        Exponent::new(1, gamma_bar as i64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayEntry {
    pub phi: f64,
    pub sheet: Sheet,
    pub ell: u32,
    pub gamma_bar: u8,
    pub exponent: Exponent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub assumptions: AssumptionReport,
    pub entries: Vec<DecayEntry>,
    /// Set for media whose hyperbolic sheet has identically vanishing coupling.
    pub identically_hyperbolic: bool,
    pub overall: Exponent,
    pub numerator: i64,
    pub denominator: i64,
    pub rate: String,
}

impl DecayReport {
    /// Assembles the report from already computed pieces. `tangency` must be
    /// aligned with `catalog.directions`.
    pub fn from_parts(
        assumptions: AssumptionReport,
        catalog: &HyperbolicCatalog,
        tangency: &[TangencyResult],
    ) -> Result<Self, DecayError> {
        if let Some(assumption) = assumptions.first_failure() {
            return Err(DecayError::AssumptionViolated { assumption });
        }
        let entries: Vec<DecayEntry> = catalog
            .directions
            .iter()
            .zip(tangency)
            .map(|(d, t)| DecayEntry {
                phi: d.phi,
                sheet: d.sheet,
                ell: d.ell,
                gamma_bar: t.gamma_bar,
                exponent: microlocal_exponent(d.ell, t.gamma_bar),
            })
            .collect();
        let overall = if catalog.identically_hyperbolic {
            Exponent::HALF
        } else {
            entries.iter().map(|e| e.exponent).min().unwrap_or(Exponent::ONE)
        };
        Ok(DecayReport {
            assumptions,
            entries,
            identically_hyperbolic: catalog.identically_hyperbolic,
            overall,
            numerator: overall.numer(),
            denominator: overall.denom(),
            rate: overall.rate(),
        })
    }

    /// Predicted exponent for data supported in the angular sector
    /// `|φ − center| ≤ half_width` (together with its mirror image).
    pub fn sector_exponent(&self, center: f64, half_width: f64) -> Exponent {
        if self.identically_hyperbolic {
            return Exponent::HALF;
        }
        self.entries
            .iter()
            .filter(|e| circular_distance(e.phi, center) <= half_width)
            .map(|e| e.exponent)
            .min()
            .unwrap_or(Exponent::ONE)
    }
}

/// Tangency orders for every catalog entry.
pub fn tangency_orders(
    m: &Moduli,
    catalog: &HyperbolicCatalog,
) -> Result<Vec<TangencyResult>, FresnelError> {
    catalog.directions.iter().map(|d| tangency_order(m, d.phi, d.sheet)).collect()
}

/// Full pipeline from moduli to the overall decay exponent.
pub fn overall_rate(m: &Moduli) -> Result<DecayReport, DecayError> {
    let (assumptions, catalog) = check_assumptions(m)?;
    if let Some(assumption) = assumptions.first_failure() {
        return Err(DecayError::AssumptionViolated { assumption });
    }
    let catalog = catalog.expect("catalog exists when (A1)-(A3) hold");
    let tangency = tangency_orders(m, &catalog)?;
    DecayReport::from_parts(assumptions, &catalog, &tangency)
}
