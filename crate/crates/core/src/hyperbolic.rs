//! Hyperbolic directions: the angles where `η^⊥` is an eigenvector of `A(η)`.
//!
//! They are the zeros of the trigonometric polynomial
//!
//! ```text
//! p(φ) = 4(σ₁+σ₂) cos 2φ + 4(σ₁−σ₂) cos 4φ − 2(τ₁−τ₂) sin 2φ − (τ₁+τ₂−2λ−4μ) sin 4φ,
//! ```
//!
//! which equals `8 η^⊥·A(η)η`. Roots are bracketed by sign changes of `p`
//! (odd multiplicity) and of `p'` (even multiplicity), then classified by
//! their exact analytic derivatives and polished as simple roots of `p^(m−1)`.

use std::f64::consts::{PI, TAU};
use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::media::{assemble_symbol, direction, normalize_angle, Moduli, TOL_CLASS};
use crate::spectral::{eigen_at, Sheet, SpectralError};

/// Number of samples used to bracket roots.
pub const ROOT_SAMPLES: usize = 8192;
/// A hyperbolic direction must have `|a_j| < TOL_ZERO`.
pub const TOL_ZERO: f64 = 1e-8;
/// (A4) counts as violated when `γ²` is this close (relative to the trace) to
/// an excluded value.
pub const TOL_A4: f64 = 1e-9;
/// Relative size below which a derivative of `p` is treated as vanishing.
const TOL_MULTIPLICITY: f64 = 1e-9;
/// Roots closer than this are merged.
const MERGE_RADIUS: f64 = 1e-6;
/// Steps used by the log-log fit of the coupling function.
const ORDER_STEPS: [f64; 4] = [1e-2, 3.162_277_660_168_379_5e-3, 1e-3, 3.162_277_660_168_379_5e-4];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HyperbolicError {
    #[error("root of the hyperbolic polynomial near phi = {phi} did not converge")]
    RootFindingFailure { phi: f64 },
    #[error("vanishing order at phi = {phi} is ambiguous (log-log slope {slope})")]
    OrderAmbiguous { phi: f64, slope: f64 },
    #[error("vanishing order {ell} at phi = {phi} exceeds the root multiplicity {multiplicity}")]
    Domination { phi: f64, ell: u32, multiplicity: u32 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// `a cos 2φ + b cos 4φ + c sin 2φ + d sin 4φ`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypPoly {
    pub cos2: f64,
    pub cos4: f64,
    pub sin2: f64,
    pub sin4: f64,
}

impl HypPoly {
    pub fn new(m: &Moduli) -> Self {
        HypPoly {
            cos2: 4.0 * (m.sigma1 + m.sigma2),
            cos4: 4.0 * (m.sigma1 - m.sigma2),
            sin2: -2.0 * (m.tau1 - m.tau2),
            sin4: -(m.tau1 + m.tau2 - 2.0 * m.lambda - 4.0 * m.mu),
        }
    }

    pub fn eval(&self, phi: f64) -> f64 {
        self.derivative(phi, 0)
    }

    /// Exact k-th derivative.
    pub fn derivative(&self, phi: f64, k: u32) -> f64 {
        let term = |n: f64, cc: f64, cs: f64| {
            let (s, c) = (n * phi).sin_cos();
            let (dc, ds) = match k % 4 {
                0 => (c, s),
                1 => (-s, c),
                2 => (-c, -s),
                _ => (s, -c),
            };
            n.powi(k as i32) * (cc * dc + cs * ds)
        };
        term(2.0, self.cos2, self.sin2) + term(4.0, self.cos4, self.sin4)
    }

    pub fn scale(&self) -> f64 {
        self.cos2.abs() + self.cos4.abs() + self.sin2.abs() + self.sin4.abs()
    }

    fn vanishing_tol(&self, k: u32) -> f64 {
        TOL_MULTIPLICITY * self.scale() * 4f64.powi(k as i32)
    }
}

/// `p(φ)` for the medium.
pub fn hyp_poly(m: &Moduli, phi: f64) -> f64 {
    HypPoly::new(m).eval(phi)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicDirection {
    /// Angle in `[0, 2π)`.
    pub phi: f64,
    /// Sheet whose eigenvector is perpendicular to `η` here.
    pub sheet: Sheet,
    /// Root order of `p` at `phi`.
    pub poly_multiplicity: u32,
    /// Vanishing order of the coupling function of `sheet`.
    pub ell: u32,
    pub kappa_hyp: f64,
    pub kappa_parab: f64,
}

impl HyperbolicDirection {
    /// `κ_hyp − κ_parab`, the value `γ²` must avoid.
    pub fn a4_value(&self) -> f64 {
        self.kappa_hyp - self.kappa_parab
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicCatalog {
    /// Sorted ascending in `phi`.
    pub directions: Vec<HyperbolicDirection>,
    /// Every direction is hyperbolic (`p ≡ 0`, the isotropic case).
    pub identically_hyperbolic: bool,
}

impl HyperbolicCatalog {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn ell_sum(&self) -> u32 {
        self.directions.iter().map(|d| d.ell).sum()
    }

    pub fn multiplicity_sum(&self) -> u32 {
        self.directions.iter().map(|d| d.poly_multiplicity).sum()
    }

    /// Entry closest to `phi` (on the circle) within `tol`.
    pub fn find(&self, phi: f64, tol: f64) -> Option<&HyperbolicDirection> {
        self.directions
            .iter()
            .map(|d| (circular_distance(d.phi, phi), d))
            .filter(|(dist, _)| *dist <= tol)
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, d)| d)
    }

    /// Index pairs `(i, j)` with `φ_j = φ_i + π`.
    pub fn orbits(&self) -> Vec<(usize, usize)> {
        let mut out = vec![];
        for (i, d) in self.directions.iter().enumerate() {
            if d.phi >= PI - MERGE_RADIUS {
                continue;
            }
            if let Some(j) = self
                .directions
                .iter()
                .position(|e| circular_distance(e.phi, d.phi + PI) < 1e-7)
            {
                out.push((i, j));
            }
        }
        out
    }

    /// Columns `phi, sheet, poly_multiplicity, ell, kappa_hyp, kappa_parab`.
    pub fn write_csv<W: io::Write>(&self, out: W, degrees: bool) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["phi", "sheet", "poly_multiplicity", "ell", "kappa_hyp", "kappa_parab"])?;
        for d in &self.directions {
            let phi = if degrees { d.phi.to_degrees() } else { d.phi };
            w.write_record([
                format!("{phi:.16e}"),
                d.sheet.to_string(),
                d.poly_multiplicity.to_string(),
                d.ell.to_string(),
                format!("{:.16e}", d.kappa_hyp),
                format!("{:.16e}", d.kappa_parab),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// Tries multiplicities from high to low: a root of multiplicity `k` is a
/// simple root of `p^(k−1)` where all lower derivatives vanish.
fn classify_root(p: &HypPoly, start: f64) -> Option<(f64, u32)> {
    for k in (1..=4u32).rev() {
        let mut phi = start;
        let mut converged = false;
        for _ in 0..60 {
            let g = p.derivative(phi, k - 1);
            let dg = p.derivative(phi, k);
            if dg == 0.0 {
                converged = g == 0.0;
                break;
            }
            let step = g / dg;
            phi -= step;
            if (phi - start).abs() > 1e-3 {
                break;
            }
            if step.abs() <= 1e-15 * (1.0 + phi.abs()) {
                converged = true;
                break;
            }
        }
        if !converged || (phi - start).abs() > 1e-3 {
            continue;
        }
        let lower_vanish = (0..k).all(|j| p.derivative(phi, j).abs() <= p.vanishing_tol(j));
        if lower_vanish && p.derivative(phi, k).abs() > p.vanishing_tol(k) {
            return Some((phi, k));
        }
    }
    None
}

/// Locates all roots of `p` in `[0, 2π)` with their multiplicities.
pub fn poly_roots(p: &HypPoly) -> Result<Vec<(f64, u32)>, HyperbolicError> {
    let n = ROOT_SAMPLES;
    let grid: Vec<f64> = (0..=n).map(|k| TAU * k as f64 / n as f64).collect();
    let mut found: Vec<(f64, u32)> = vec![];
    for order in 0..2u32 {
        let f = |phi: f64| p.derivative(phi, order);
        let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        for k in 0..n {
            let (v0, v1) = (vals[k], vals[k + 1]);
            let candidate = if v0 == 0.0 {
                Some(grid[k])
            } else if v0 * v1 < 0.0 {
                Some(bisect(f, grid[k], grid[k + 1]))
            } else {
                None
            };
            let Some(c) = candidate else { continue };
            match classify_root(p, c) {
                Some(root) => found.push(root),
                // a sign change of p itself must be a root
                None if order == 0 => return Err(HyperbolicError::RootFindingFailure { phi: c }),
                None => {}
            }
        }
    }
    for r in found.iter_mut() {
        r.0 = normalize_angle(r.0);
        if TAU - r.0 < 1e-12 {
            r.0 = 0.0;
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, u32)> = vec![];
    for r in found {
        match merged.iter_mut().find(|m| circular_distance(m.0, r.0) < MERGE_RADIUS) {
            Some(m) if r.1 > m.1 => *m = r,
            Some(_) => {}
            None => merged.push(r),
        }
    }
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(merged)
}

/// Finds every hyperbolic direction with its sheet, multiplicity and
/// vanishing order.
pub fn find_hyperbolic_directions(m: &Moduli) -> Result<HyperbolicCatalog, HyperbolicError> {
    let p = HypPoly::new(m);
    if p.scale() <= 4.0 * TOL_CLASS * m.scale() {
        return Ok(HyperbolicCatalog { directions: vec![], identically_hyperbolic: true });
    }
    let mut directions = vec![];
    for (phi, multiplicity) in poly_roots(&p)? {
        let e = eigen_at(m, phi)?;
        let eta = direction(phi);
        let a = |sheet: Sheet| {
            let r = e.vector(sheet);
            (eta[0] * r[0] + eta[1] * r[1]).abs()
        };
        let sheet = if a(Sheet::First) <= a(Sheet::Second) { Sheet::First } else { Sheet::Second };
        if a(sheet) >= TOL_ZERO {
            return Err(HyperbolicError::RootFindingFailure { phi });
        }
        let mut dir = HyperbolicDirection {
            phi,
            sheet,
            poly_multiplicity: multiplicity,
            ell: 0,
            kappa_hyp: e.kappa(sheet),
            kappa_parab: e.kappa(sheet.other()),
        };
        dir.ell = vanishing_order(m, &dir)?;
        if dir.ell > multiplicity {
            return Err(HyperbolicError::Domination { phi, ell: dir.ell, multiplicity });
        }
        directions.push(dir);
    }
    Ok(HyperbolicCatalog { directions, identically_hyperbolic: false })
}

/// Vanishing order of `a_j` at a hyperbolic direction, from the slope of
/// `log |a_j(φ₀ + h)|` against `log h`.
pub fn vanishing_order(m: &Moduli, dir: &HyperbolicDirection) -> Result<u32, HyperbolicError> {
    let mut xs = [0.0; 4];
    let mut ys = [0.0; 4];
    for (i, h) in ORDER_STEPS.iter().enumerate() {
        let phi = dir.phi + h;
        let r = eigen_at(m, phi)?.vector(dir.sheet);
        let eta = direction(phi);
        xs[i] = h.ln();
        ys[i] = (eta[0] * r[0] + eta[1] * r[1]).abs().ln();
    }
    let slope = least_squares_slope(&xs, &ys);
    let ell = slope.round();
    if !slope.is_finite() || ell < 1.0 || (slope - ell).abs() >= 0.1 {
        return Err(HyperbolicError::OrderAmbiguous { phi: dir.phi, slope });
    }
    Ok(ell as u32)
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcludedValue {
    pub phi: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct A4Check {
    pub ok: bool,
    pub gamma_squared: f64,
    /// Distinct values of `κ_hyp − κ_parab` over the hyperbolic directions.
    pub excluded: Vec<ExcludedValue>,
    /// Direction at which `γ²` hits an excluded value.
    pub violating_phi: Option<f64>,
    pub interpretation: String,
}

/// (A4): `γ² ≠ κ_hyp − κ_parab` at every hyperbolic direction.
pub fn check_a4(m: &Moduli, catalog: &HyperbolicCatalog) -> Result<A4Check, HyperbolicError> {
    let g2 = m.gamma * m.gamma;
    let mut values: Vec<(f64, f64, f64)> = vec![];
    if catalog.identically_hyperbolic {
        // η^⊥ is an eigenvector in every direction; φ = 0 represents them all
        let e = eigen_at(m, 0.0)?;
        let hyp = if e.r1[0].abs() < e.r2[0].abs() { Sheet::First } else { Sheet::Second };
        let d = e.kappa(hyp) - e.kappa(hyp.other());
        values.push((0.0, d, assemble_symbol(m, 0.0).trace()));
    } else {
        for d in &catalog.directions {
            values.push((d.phi, d.a4_value(), d.kappa_hyp + d.kappa_parab));
        }
    }
    let violating_phi = values
        .iter()
        .find(|(_, d, tr)| (g2 - d).abs() <= TOL_A4 * tr.abs())
        .map(|(phi, _, _)| *phi);
    let mut excluded: Vec<ExcludedValue> = vec![];
    for (phi, value, tr) in values {
        if !excluded.iter().any(|e| (e.value - value).abs() <= TOL_A4 * tr.abs()) {
            excluded.push(ExcludedValue { phi, value });
        }
    }
    Ok(A4Check {
        ok: violating_phi.is_none(),
        gamma_squared: g2,
        excluded,
        violating_phi,
        interpretation: "eigenvalue difference".to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::perpendicular;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn angles(c: &HyperbolicCatalog) -> Vec<f64> {
        c.directions.iter().map(|d| d.phi).collect()
    }

    #[test]
    fn polynomial_is_eight_times_transverse_form() {
        let m = Moduli::elastic(2.3, 4.1, 0.7, 0.25, -0.4, 1.3);
        for k in 0..50 {
            let phi = k as f64 * 0.13;
            let q = assemble_symbol(&m, phi).bilinear(perpendicular(phi), direction(phi));
            assert!((hyp_poly(&m, phi) - 8.0 * q).abs() < 1e-12);
        }
    }

    #[test]
    fn cubic_and_exceptional_reductions() {
        let (tau, l, mu) = (0.5, 0.0, 1.0);
        let cubic = Moduli::cubic(tau, l, mu);
        let ex = Moduli::exceptional(2.0, 1.0);
        for k in 0..20 {
            let phi = 0.31 * k as f64;
            let reduced = -(2.0 * tau - 2.0 * l - 4.0 * mu) * (4.0 * phi).sin();
            assert!((hyp_poly(&cubic, phi) - reduced).abs() < 1e-13);
            let reduced = 4.0 * (2.0 * phi).cos() - 4.0 * (4.0 * phi).cos();
            assert!((hyp_poly(&ex, phi) - reduced).abs() < 1e-13);
            assert_eq!(hyp_poly(&Moduli::isotropic(1.0, 1.0), phi), 0.0);
        }
    }

    #[test]
    fn cubic_has_eight_simple_directions() {
        let c = find_hyperbolic_directions(&Moduli::cubic(0.5, 0.0, 1.0)).unwrap();
        assert_eq!(c.len(), 8);
        for (k, d) in c.directions.iter().enumerate() {
            assert!((d.phi - k as f64 * FRAC_PI_4).abs() < 1e-12);
            assert_eq!((d.poly_multiplicity, d.ell), (1, 1));
        }
        assert_eq!(c.orbits().len(), 4);
    }

    #[test]
    fn rhombic_direction_counts() {
        let four = find_hyperbolic_directions(&Moduli::rhombic(1.0 / 3.0, 8.0, 1.0, 1.0)).unwrap();
        assert_eq!(angles(&four).len(), 4);
        for (k, phi) in angles(&four).iter().enumerate() {
            assert!((phi - k as f64 * FRAC_PI_2).abs() < 1e-12);
        }
        let eight = find_hyperbolic_directions(&Moduli::rhombic(4.0, 8.0, 0.5, 1.0)).unwrap();
        let a = 0.5 * (4.0f64 / 7.0).acos();
        let expected = [0.0, a, FRAC_PI_2, PI - a, PI, PI + a, 3.0 * FRAC_PI_2, TAU - a];
        assert_eq!(eight.len(), 8);
        for (phi, e) in angles(&eight).iter().zip(expected) {
            assert!((phi - e).abs() < 1e-12, "{phi} vs {e}");
        }
        assert!((a - 0.481275).abs() < 1e-6);
    }

    #[test]
    fn triple_root_of_rhombic_family() {
        let c = find_hyperbolic_directions(&Moduli::rhombic(2.5, 8.0, 0.5, 1.0)).unwrap();
        assert_eq!(c.len(), 4);
        let d0 = c.find(0.0, 1e-9).unwrap();
        assert_eq!((d0.poly_multiplicity, d0.ell), (3, 3));
        assert_eq!(d0.sheet, Sheet::First);
        assert_eq!(c.find(PI, 1e-9).unwrap().ell, 3);
        assert_eq!(c.ell_sum(), 8);
    }

    #[test]
    fn exceptional_double_roots() {
        for l in [0.0, 2.0] {
            let c = find_hyperbolic_directions(&Moduli::exceptional(l, 1.0)).unwrap();
            assert_eq!(c.len(), 6);
            for (k, d) in c.directions.iter().enumerate() {
                assert!((d.phi - k as f64 * FRAC_PI_3).abs() < 1e-10, "{}", d.phi);
                let expect = if k % 3 == 0 { 2 } else { 1 };
                assert_eq!((d.poly_multiplicity, d.ell), (expect, expect));
            }
        }
    }

    #[test]
    fn isotropic_is_identically_hyperbolic() {
        let m = Moduli::isotropic(1.0, 1.0);
        let c = find_hyperbolic_directions(&m).unwrap();
        assert!(c.identically_hyperbolic && c.is_empty());
        let a4 = check_a4(&m, &c).unwrap();
        assert_eq!(a4.excluded.len(), 1);
        assert!((a4.excluded[0].value + 2.0).abs() < 1e-14);
    }

    #[test]
    fn a4_excluded_sets() {
        let cubic = Moduli::cubic(0.5, 0.0, 1.0);
        let c = find_hyperbolic_directions(&cubic).unwrap();
        let a4 = check_a4(&cubic, &c).unwrap();
        let mut vals: Vec<f64> = a4.excluded.iter().map(|e| e.value).collect();
        vals.sort_by(f64::total_cmp);
        assert_eq!(vals.len(), 2);
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[1] - 0.5).abs() < 1e-12);
        assert!(a4.ok);
        let bad = cubic.with_thermal(0.5f64.sqrt(), 1.0).unwrap();
        assert!(!check_a4(&bad, &c).unwrap().ok);

        let rh = Moduli::rhombic(4.0, 8.0, 0.5, 1.0);
        let a4 = check_a4(&rh, &find_hyperbolic_directions(&rh).unwrap()).unwrap();
        let mut vals: Vec<f64> = a4.excluded.iter().map(|e| e.value).collect();
        vals.sort_by(f64::total_cmp);
        for (v, e) in vals.iter().zip([-7.0, -3.0, -1.5]) {
            assert!((v - e).abs() < 1e-12);
        }

        let (l, mu) = (2.0, 1.0);
        let ex = Moduli::exceptional(l, mu);
        let a4 = check_a4(&ex, &find_hyperbolic_directions(&ex).unwrap()).unwrap();
        let s3 = 3f64.sqrt();
        let mut vals: Vec<f64> = a4.excluded.iter().map(|e| e.value).collect();
        vals.sort_by(f64::total_cmp);
        for (v, e) in vals.iter().zip([-mu - l - s3 * mu, -(l + mu), (s3 - 1.0) * mu - l]) {
            assert!((v - e).abs() < 1e-10, "{vals:?}");
        }
    }
}
