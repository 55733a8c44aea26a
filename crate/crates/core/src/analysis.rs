//! End-to-end pipeline collecting every result for one medium.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decay::{tangency_orders, DecayError, DecayReport};
use crate::fresnel::{FresnelError, TangencyResult};
use crate::hyperbolic::{HyperbolicCatalog, HyperbolicError};
use crate::media::{check_assumptions, AssumptionReport, Moduli, SymmetryClass};
use crate::simulate::SimResult;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Hyperbolic(#[from] HyperbolicError),
    #[error(transparent)]
    Fresnel(#[from] FresnelError),
    #[error(transparent)]
    Decay(#[from] DecayError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisBundle {
    pub medium: Moduli,
    pub class: SymmetryClass,
    pub assumptions: AssumptionReport,
    /// Present when (A1)–(A3) hold.
    pub catalog: Option<HyperbolicCatalog>,
    pub tangency: Vec<TangencyResult>,
    /// Present exactly when every assumption holds.
    pub decay: Option<DecayReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimResult>,
}

pub fn analyze(m: &Moduli) -> Result<AnalysisBundle, AnalysisError> {
    let (assumptions, catalog) = check_assumptions(m)?;
    let tangency = match &catalog {
        Some(c) => tangency_orders(m, c)?,
        None => vec![],
    };
    let decay = match (&catalog, assumptions.all_ok()) {
        (Some(c), true) => Some(DecayReport::from_parts(assumptions.clone(), c, &tangency)?),
        _ => None,
    };
    Ok(AnalysisBundle {
        medium: *m,
        class: assumptions.class,
        assumptions,
        catalog,
        tangency,
        decay,
        simulation: None,
    })
}
