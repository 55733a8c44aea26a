//! Material description, the elastic symbol `A(η) = D(η)ᵀ S D(η)` and the
//! admissibility checks for positivity and distinct eigenvalues.
//!
//! A medium is described by the six stiffness entries
//!
//! ```text
//!     ⎡ τ₁  λ   σ₁ ⎤
//! S = ⎢ λ   τ₂  σ₂ ⎥
//!     ⎣ σ₁  σ₂  μ  ⎦
//! ```
//!
//! together with the thermo-elastic coupling `γ > 0` and the thermal
//! conductivity `κ > 0`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hyperbolic::{check_a4, find_hyperbolic_directions, A4Check, HyperbolicCatalog, HyperbolicError};

/// Relative tolerance for the equality tests that decide the symmetry class.
pub const TOL_CLASS: f64 = 1e-12;

/// Number of equally spaced angles used by the grid-based admissibility checks.
pub const ANGLE_GRID: usize = 4096;

/// Relative tolerance on `κ₂ − κ₁` (scaled by the trace) below which a
/// direction counts as degenerate.
pub const TOL_DEGENERATE: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum MediumError {
    #[error("modulus `{0}` is not finite")]
    NonFinite(&'static str),
    #[error("thermo-elastic coupling gamma must be positive, got {0}")]
    NonPositiveGamma(f64),
    #[error("thermal conductivity kappa must be positive, got {0}")]
    NonPositiveKappa(f64),
    #[error("malformed medium file: {0}")]
    Parse(String),
}

/// The elasticity moduli of a medium plus its thermal parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModuli", into = "RawModuli")]
pub struct Moduli {
    pub tau1: f64,
    pub tau2: f64,
    pub lambda: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub mu: f64,
    pub gamma: f64,
    pub kappa: f64,
}

/// Wire form of [`Moduli`]; every key is required and unknown keys are rejected.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModuli {
    tau1: f64,
    tau2: f64,
    lambda: f64,
    sigma1: f64,
    sigma2: f64,
    mu: f64,
    gamma: f64,
    kappa: f64,
}

impl TryFrom<RawModuli> for Moduli {
    type Error = MediumError;

    fn try_from(r: RawModuli) -> Result<Self, Self::Error> {
        Moduli::new(r.tau1, r.tau2, r.lambda, r.sigma1, r.sigma2, r.mu, r.gamma, r.kappa)
    }
}

impl From<Moduli> for RawModuli {
    fn from(m: Moduli) -> Self {
        RawModuli {
            tau1: m.tau1,
            tau2: m.tau2,
            lambda: m.lambda,
            sigma1: m.sigma1,
            sigma2: m.sigma2,
            mu: m.mu,
            gamma: m.gamma,
            kappa: m.kappa,
        }
    }
}

impl Moduli {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        tau1: f64,
        tau2: f64,
        lambda: f64,
        sigma1: f64,
        sigma2: f64,
        mu: f64,
        gamma: f64,
        kappa: f64,
    ) -> Result<Self, MediumError> {
        let named = [
            ("tau1", tau1),
            ("tau2", tau2),
            ("lambda", lambda),
            ("sigma1", sigma1),
            ("sigma2", sigma2),
            ("mu", mu),
            ("gamma", gamma),
            ("kappa", kappa),
        ];
        if let Some((name, _)) = named.iter().find(|(_, v)| !v.is_finite()) {
            return Err(MediumError::NonFinite(name));
        }
        if gamma <= 0.0 {
            return Err(MediumError::NonPositiveGamma(gamma));
        }
        if kappa <= 0.0 {
            return Err(MediumError::NonPositiveKappa(kappa));
        }
        Ok(Moduli { tau1, tau2, lambda, sigma1, sigma2, mu, gamma, kappa })
    }

    /// Isotropic medium with Lamé parameters `λ`, `μ` and unit thermal parameters.
    pub fn isotropic(lambda: f64, mu: f64) -> Self {
        let tau = lambda + 2.0 * mu;
        Self::elastic(tau, tau, lambda, 0.0, 0.0, mu)
    }

    /// Cubic medium: `τ₁ = τ₂ = τ`, `σ₁ = σ₂ = 0`.
    pub fn cubic(tau: f64, lambda: f64, mu: f64) -> Self {
        Self::elastic(tau, tau, lambda, 0.0, 0.0, mu)
    }

    /// Rhombic medium: `σ₁ = σ₂ = 0`.
    pub fn rhombic(tau1: f64, tau2: f64, lambda: f64, mu: f64) -> Self {
        Self::elastic(tau1, tau2, lambda, 0.0, 0.0, mu)
    }

    /// The exceptional family `τ₁ = τ₂ = λ + 2μ`, `σ₁ = 0`, `σ₂ = μ`.
    pub fn exceptional(lambda: f64, mu: f64) -> Self {
        let tau = lambda + 2.0 * mu;
        Self::elastic(tau, tau, lambda, 0.0, mu, mu)
    }

    /// Medium with the given stiffness entries and `γ = κ = 1`.
    ///
    /// Panics if an entry is not finite.
    pub fn elastic(tau1: f64, tau2: f64, lambda: f64, sigma1: f64, sigma2: f64, mu: f64) -> Self {
        Self::new(tau1, tau2, lambda, sigma1, sigma2, mu, 1.0, 1.0)
            .expect("stiffness entries must be finite")
    }

    pub fn with_thermal(self, gamma: f64, kappa: f64) -> Result<Self, MediumError> {
        Self::new(
            self.tau1, self.tau2, self.lambda, self.sigma1, self.sigma2, self.mu, gamma, kappa,
        )
    }

    /// Multiplies the six stiffness entries by `c`; the thermal parameters are kept.
    pub fn scaled(&self, c: f64) -> Self {
        Moduli {
            tau1: c * self.tau1,
            tau2: c * self.tau2,
            lambda: c * self.lambda,
            sigma1: c * self.sigma1,
            sigma2: c * self.sigma2,
            mu: c * self.mu,
            ..*self
        }
    }

    pub fn from_json(text: &str) -> Result<Self, MediumError> {
        serde_json::from_str(text).map_err(|e| MediumError::Parse(e.to_string()))
    }

    /// Largest stiffness entry in absolute value, used to scale tolerances.
    pub fn scale(&self) -> f64 {
        [self.tau1, self.tau2, self.lambda, self.sigma1, self.sigma2, self.mu]
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
            .max(f64::MIN_POSITIVE)
    }

    /// The stiffness matrix `S` as a dense 3×3 array.
    pub fn stiffness(&self) -> [[f64; 3]; 3] {
        [
            [self.tau1, self.lambda, self.sigma1],
            [self.lambda, self.tau2, self.sigma2],
            [self.sigma1, self.sigma2, self.mu],
        ]
    }

    fn approx_eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= TOL_CLASS * self.scale()
    }

    fn approx_zero(&self, a: f64) -> bool {
        self.approx_eq(a, 0.0)
    }

    /// Coefficients of the entries of `A(φ)` in the basis `{1, cos 2φ, sin 2φ}`.
    pub(crate) fn harmonics(&self) -> [Harmonic; 3] {
        let (t1, t2, l, s1, s2, mu) =
            (self.tau1, self.tau2, self.lambda, self.sigma1, self.sigma2, self.mu);
        [
            Harmonic { c0: 0.5 * (t1 + mu), cc: 0.5 * (t1 - mu), cs: s1 },
            Harmonic { c0: 0.5 * (s1 + s2), cc: 0.5 * (s1 - s2), cs: 0.5 * (l + mu) },
            Harmonic { c0: 0.5 * (mu + t2), cc: 0.5 * (mu - t2), cs: s2 },
        ]
    }
}

/// `c0 + cc·cos 2φ + cs·sin 2φ`
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Harmonic {
    pub c0: f64,
    pub cc: f64,
    pub cs: f64,
}

impl Harmonic {
    /// k-th derivative with respect to φ.
    pub fn derivative(&self, phi: f64, k: u32) -> f64 {
        let (s, c) = (2.0 * phi).sin_cos();
        let scale = 2f64.powi(k as i32);
        let (dc, ds) = match k % 4 {
            0 => (c, s),
            1 => (-s, c),
            2 => (-c, -s),
            _ => (s, -c),
        };
        let osc = scale * (self.cc * dc + self.cs * ds);
        if k == 0 {
            self.c0 + osc
        } else {
            osc
        }
    }
}

/// Symmetry classes with dedicated closed-form admissibility conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymmetryClass {
    Isotropic,
    Cubic,
    Rhombic,
    ExceptionalS2,
    Generic,
}

/// Returns the most specific class whose defining equalities hold.
pub fn classify_symmetry(m: &Moduli) -> SymmetryClass {
    let sigma_free = m.approx_zero(m.sigma1) && m.approx_zero(m.sigma2);
    let lame = m.lambda + 2.0 * m.mu;
    if m.approx_eq(m.tau1, lame)
        && m.approx_eq(m.tau2, lame)
        && m.approx_zero(m.sigma1)
        && m.approx_eq(m.sigma2, m.mu)
        && !m.approx_zero(m.mu)
    {
        return SymmetryClass::ExceptionalS2;
    }
    if !sigma_free {
        return SymmetryClass::Generic;
    }
    if m.approx_eq(m.tau1, m.tau2) {
        if m.approx_eq(m.tau1, lame) {
            SymmetryClass::Isotropic
        } else {
            SymmetryClass::Cubic
        }
    } else {
        SymmetryClass::Rhombic
    }
}

/// The symmetric 2×2 matrix `A(ξ)`; only the upper triangle is stored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolMatrix {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl SymbolMatrix {
    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    /// `(a11 − a22)² + 4 a12²`, the squared eigenvalue gap.
    pub fn discriminant(&self) -> f64 {
        let d = self.a11 - self.a22;
        d * d + 4.0 * self.a12 * self.a12
    }

    /// `κ₂ − κ₁`.
    pub fn gap(&self) -> f64 {
        (self.a11 - self.a22).hypot(2.0 * self.a12)
    }

    pub fn is_degenerate(&self) -> bool {
        self.gap() <= TOL_DEGENERATE * self.trace().abs()
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a11 * v[0] + self.a12 * v[1], self.a12 * v[0] + self.a22 * v[1]]
    }

    /// `uᵀ A v`
    pub fn bilinear(&self, u: [f64; 2], v: [f64; 2]) -> f64 {
        let av = self.apply(v);
        u[0] * av[0] + u[1] * av[1]
    }
}

/// `A(ξ)` for an arbitrary (not necessarily unit) covector `ξ`.
pub fn symbol_at(m: &Moduli, xi: [f64; 2]) -> SymbolMatrix {
    let [x1, x2] = xi;
    let (xx, xy, yy) = (x1 * x1, x1 * x2, x2 * x2);
    SymbolMatrix {
        a11: m.tau1 * xx + 2.0 * m.sigma1 * xy + m.mu * yy,
        a12: m.sigma1 * xx + (m.lambda + m.mu) * xy + m.sigma2 * yy,
        a22: m.mu * xx + 2.0 * m.sigma2 * xy + m.tau2 * yy,
    }
}

/// `A(η)` with `η = (cos φ, sin φ)`.
pub fn assemble_symbol(m: &Moduli, phi: f64) -> SymbolMatrix {
    symbol_at(m, direction(phi))
}

/// Entrywise k-th derivative of `φ ↦ A(η(φ))`.
pub fn symbol_derivative(m: &Moduli, phi: f64, k: u32) -> SymbolMatrix {
    if k == 0 {
        return assemble_symbol(m, phi);
    }
    let [h11, h12, h22] = m.harmonics();
    SymbolMatrix {
        a11: h11.derivative(phi, k),
        a12: h12.derivative(phi, k),
        a22: h22.derivative(phi, k),
    }
}

pub fn direction(phi: f64) -> [f64; 2] {
    let (s, c) = phi.sin_cos();
    [c, s]
}

pub fn perpendicular(phi: f64) -> [f64; 2] {
    let (s, c) = phi.sin_cos();
    [-s, c]
}

/// Maps an angle into `[0, 2π)`.
pub fn normalize_angle(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

fn grid_angle(k: usize) -> f64 {
    TAU * k as f64 / ANGLE_GRID as f64
}

/// Which scalar failed the positivity test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PositivityQuantity {
    Trace,
    Determinant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityCheck {
    pub ok: bool,
    /// Verdict of the class-specific closed form, when the class has one.
    pub closed_form: Option<bool>,
    pub min_trace: f64,
    pub min_trace_phi: f64,
    pub min_det: f64,
    pub min_det_phi: f64,
    pub violated: Option<PositivityQuantity>,
    /// Minimiser of the violated quantity, or of the determinant on success.
    pub worst_phi: f64,
    /// For the exceptional family: whether the stricter `λ > μ > 0` holds.
    /// `Some(false)` with `ok == true` is a warning, not a failure.
    pub strict_exceptional_bound: Option<bool>,
}

#[derive(Clone, Copy, Debug)]
struct GridMinimum {
    value: f64,
    phi: f64,
}

/// Minimum of a trig polynomial over the angle grid, refined by Newton steps on
/// its derivative. `f(φ, k)` must return the k-th derivative.
fn trig_minimum(f: impl Fn(f64, u32) -> f64) -> GridMinimum {
    let (k_min, v_min) = (0..ANGLE_GRID)
        .map(|k| (k, f(grid_angle(k), 0)))
        .fold((0, f64::INFINITY), |acc, (k, v)| if v < acc.1 { (k, v) } else { acc });
    let h = TAU / ANGLE_GRID as f64;
    let start = grid_angle(k_min);
    let mut phi = start;
    for _ in 0..30 {
        let d1 = f(phi, 1);
        let d2 = f(phi, 2);
        if d2 <= 0.0 {
            break;
        }
        let step = d1 / d2;
        let next = phi - step;
        if (next - start).abs() > h {
            break;
        }
        phi = next;
        if step.abs() < 1e-15 {
            break;
        }
    }
    let v = f(phi, 0);
    if v < v_min {
        GridMinimum { value: v, phi: normalize_angle(phi) }
    } else {
        GridMinimum { value: v_min, phi: start }
    }
}

fn det_derivative(m: &Moduli, phi: f64, k: u32) -> f64 {
    // Leibniz rule on a11·a22 − a12²
    let d: Vec<SymbolMatrix> = (0..=k).map(|j| symbol_derivative(m, phi, j)).collect();
    let mut acc = 0.0;
    for j in 0..=k {
        let binom = binomial(k, j);
        let (a, b) = (&d[j as usize], &d[(k - j) as usize]);
        acc += binom * (a.a11 * b.a22 - a.a12 * b.a12);
    }
    acc
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Positivity of `A(η)` for all directions, i.e. trace and determinant stay positive.
pub fn check_positivity(m: &Moduli) -> PositivityCheck {
    let class = classify_symmetry(m);
    let scale = m.scale();
    let tr = trig_minimum(|phi, k| symbol_derivative(m, phi, k).trace());
    let det = trig_minimum(|phi, k| det_derivative(m, phi, k));
    let tr_ok = tr.value > TOL_CLASS * scale;
    let det_ok = det.value > TOL_CLASS * scale * scale;
    let grid_ok = tr_ok && det_ok;

    let (mu, l) = (m.mu, m.lambda);
    let closed_form = match class {
        SymmetryClass::Isotropic => Some(mu > 0.0 && l + 2.0 * mu > 0.0),
        SymmetryClass::Cubic => {
            let tau = 0.5 * (m.tau1 + m.tau2);
            Some(mu > 0.0 && tau > 0.0 && (tau - l) * (tau + l + 2.0 * mu) > 0.0)
        }
        SymmetryClass::Rhombic => {
            let ok = mu > 0.0 && m.tau1 > 0.0 && m.tau2 > 0.0 && {
                let g = (m.tau1 * m.tau2).sqrt();
                (g - l) * (g + l + 2.0 * mu) > 0.0
            };
            Some(ok)
        }
        SymmetryClass::ExceptionalS2 => {
            Some(mu > 0.0 && l > -(8.0 - 3.0 * 3f64.sqrt()) / 4.0 * mu)
        }
        SymmetryClass::Generic => None,
    };
    let ok = match class {
        SymmetryClass::ExceptionalS2 => closed_form == Some(true) && grid_ok,
        _ => closed_form.unwrap_or(grid_ok),
    };
    let violated = if ok {
        None
    } else if !tr_ok {
        Some(PositivityQuantity::Trace)
    } else {
        Some(PositivityQuantity::Determinant)
    };
    let worst_phi = match violated {
        Some(PositivityQuantity::Trace) => tr.phi,
        _ => det.phi,
    };
    PositivityCheck {
        ok,
        closed_form,
        min_trace: tr.value,
        min_trace_phi: tr.phi,
        min_det: det.value,
        min_det_phi: det.phi,
        violated,
        worst_phi,
        strict_exceptional_bound: (class == SymmetryClass::ExceptionalS2)
            .then_some(l > mu && mu > 0.0),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinctnessCheck {
    pub ok: bool,
    /// Angles in `[0, 2π)` where the two eigenvalues coincide.
    pub degenerate_angles: Vec<f64>,
    /// Set when `A(η)` is a multiple of the identity for every direction.
    pub everywhere: bool,
    /// Smallest `κ₂ − κ₁` seen on the angle grid.
    pub min_gap: f64,
    pub min_gap_phi: f64,
}

/// Assumption that `A(η)` has two distinct eigenvalues in every direction.
pub fn check_distinct_eigenvalues(m: &Moduli) -> DistinctnessCheck {
    let class = classify_symmetry(m);
    let (mu, l) = (m.mu, m.lambda);
    let gaps: Vec<f64> = (0..ANGLE_GRID).map(|k| assemble_symbol(m, grid_angle(k)).gap()).collect();
    let (k_min, min_gap) = gaps
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, &g)| if g < acc.1 { (k, g) } else { acc });

    let mut everywhere = false;
    let mut angles: Vec<f64> = match class {
        SymmetryClass::Isotropic => {
            everywhere = m.approx_zero(l + mu);
            vec![]
        }
        SymmetryClass::Cubic => {
            let tau = 0.5 * (m.tau1 + m.tau2);
            let shear = m.approx_zero(l + mu);
            let axial = m.approx_eq(tau, mu);
            everywhere = shear && axial;
            let mut v = vec![];
            if axial && !everywhere {
                v.extend((0..4).map(|k| k as f64 * FRAC_PI_2));
            }
            if shear && !everywhere {
                v.extend((0..4).map(|k| FRAC_PI_4 + k as f64 * FRAC_PI_2));
            }
            v
        }
        SymmetryClass::Rhombic => {
            let (d1, d2) = (m.tau1 - mu, m.tau2 - mu);
            let mut v = vec![];
            if m.approx_zero(d1) {
                v.extend([0.0, PI]);
            }
            if m.approx_zero(d2) {
                v.extend([FRAC_PI_2, 3.0 * FRAC_PI_2]);
            }
            if m.approx_zero(l + mu) {
                if m.approx_zero(d1) && m.approx_zero(d2) {
                    everywhere = true;
                    v.clear();
                } else if !m.approx_zero(d2) && d1 / d2 > 0.0 {
                    // (τ₁ − μ) cos²φ = (τ₂ − μ) sin²φ
                    let a = (d1 / d2).sqrt().atan();
                    v.extend([a, PI - a, PI + a, TAU - a]);
                }
            }
            v
        }
        SymmetryClass::ExceptionalS2 => {
            let s3 = 3f64.sqrt();
            let mut v = vec![];
            if m.approx_zero(l + mu) {
                v.extend([0.0, PI]);
            }
            if m.approx_eq(l, (s3 - 1.0) * mu) {
                v.extend([2.0 * FRAC_PI_3, 5.0 * FRAC_PI_3]);
            }
            if m.approx_eq(l, -(s3 + 1.0) * mu) {
                v.extend([FRAC_PI_3, 4.0 * FRAC_PI_3]);
            }
            v
        }
        SymmetryClass::Generic => generic_degenerate_angles(m, &gaps),
    };
    if class == SymmetryClass::Generic && gaps.iter().all(|&g| g <= TOL_DEGENERATE * m.scale()) {
        everywhere = true;
        angles.clear();
    }
    for a in angles.iter_mut() {
        *a = normalize_angle(*a);
    }
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    DistinctnessCheck {
        ok: angles.is_empty() && !everywhere,
        degenerate_angles: angles,
        everywhere,
        min_gap,
        min_gap_phi: grid_angle(k_min),
    }
}

/// Local minima of the discriminant on the grid, refined with Newton steps,
/// kept when the refined gap is below the degeneracy tolerance.
fn generic_degenerate_angles(m: &Moduli, gaps: &[f64]) -> Vec<f64> {
    let n = gaps.len();
    let disc = |phi: f64, k: u32| -> f64 {
        // (a11 − a22)² + 4 a12², differentiated with the Leibniz rule
        let d: Vec<SymbolMatrix> = (0..=k).map(|j| symbol_derivative(m, phi, j)).collect();
        (0..=k)
            .map(|j| {
                let (a, b) = (&d[j as usize], &d[(k - j) as usize]);
                binomial(k, j)
                    * ((a.a11 - a.a22) * (b.a11 - b.a22) + 4.0 * a.a12 * b.a12)
            })
            .sum()
    };
    let h = TAU / n as f64;
    let mut out = vec![];
    for k in 0..n {
        let (prev, next) = (gaps[(k + n - 1) % n], gaps[(k + 1) % n]);
        if gaps[k] > prev || gaps[k] > next {
            continue;
        }
        let start = grid_angle(k);
        let mut phi = start;
        for _ in 0..40 {
            let d2 = disc(phi, 2);
            if d2 <= 0.0 {
                break;
            }
            let step = disc(phi, 1) / d2;
            phi -= step;
            if (phi - start).abs() > h || step.abs() < 1e-16 {
                break;
            }
        }
        if assemble_symbol(m, phi).is_degenerate() {
            out.push(phi);
        }
    }
    out
}

/// Which admissibility assumption failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Assumption {
    /// Positivity of `A(η)`.
    #[serde(rename = "A1-A2")]
    Positivity,
    /// Two distinct eigenvalues in every direction.
    #[serde(rename = "A3")]
    Distinct,
    /// `γ² ≠ κ_hyp − κ_parab` at hyperbolic directions.
    #[serde(rename = "A4")]
    Coupling,
}

impl std::fmt::Display for Assumption {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Assumption::Positivity => "(A1)-(A2) positivity",
            Assumption::Distinct => "(A3) distinct eigenvalues",
            Assumption::Coupling => "(A4) coupling constant",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub class: SymmetryClass,
    pub a1a2_ok: bool,
    pub a3_ok: bool,
    /// `None` when (A4) could not be evaluated because an earlier check failed.
    pub a4_ok: Option<bool>,
    pub positivity: PositivityCheck,
    pub distinct: DistinctnessCheck,
    pub a4: Option<A4Check>,
}

impl AssumptionReport {
    pub fn all_ok(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn first_failure(&self) -> Option<Assumption> {
        if !self.a1a2_ok {
            Some(Assumption::Positivity)
        } else if !self.a3_ok {
            Some(Assumption::Distinct)
        } else if self.a4_ok != Some(true) {
            Some(Assumption::Coupling)
        } else {
            None
        }
    }
}

/// Runs (A1)–(A4). The hyperbolic catalog is returned when (A1)–(A3) hold.
pub fn check_assumptions(
    m: &Moduli,
) -> Result<(AssumptionReport, Option<HyperbolicCatalog>), HyperbolicError> {
    let positivity = check_positivity(m);
    let distinct = check_distinct_eigenvalues(m);
    let (a4, catalog) = if positivity.ok && distinct.ok {
        let catalog = find_hyperbolic_directions(m)?;
        (Some(check_a4(m, &catalog)?), Some(catalog))
    } else {
        (None, None)
    };
    let report = AssumptionReport {
        class: classify_symmetry(m),
        a1a2_ok: positivity.ok,
        a3_ok: positivity.ok && distinct.ok,
        a4_ok: a4.as_ref().map(|c| c.ok),
        positivity,
        distinct,
        a4,
    };
    Ok((report, catalog))
}
