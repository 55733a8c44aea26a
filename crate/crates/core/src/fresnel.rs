//! Fresnel curve `S = {ξ : 1 ∈ spec A(ξ)}`: sheet sampling, tangency orders at
//! hyperbolic directions, convexity of the inner sheet and line intersections.

use std::f64::consts::TAU;
use std::io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::media::{assemble_symbol, direction, Moduli, SymbolMatrix, ANGLE_GRID};
use crate::poly::{Poly, Sturm};
use crate::spectral::{eigen_at, eigen_jet, sample_branch, Sheet, SpectralError};

/// Relative tolerance for the tangency test quantities.
pub const TOL_H: f64 = 1e-7;
/// Sheet points must satisfy `|det(A(ξ) − I)| < TOL_CURVE`.
pub const TOL_CURVE: f64 = 1e-9;
/// Coupling size accepted as "hyperbolic" by [`tangency_order`].
const TOL_HYPERBOLIC: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FresnelError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("tangency order at phi = {phi} is ambiguous (h = {h}, dh = {dh})")]
    OrderAmbiguous { phi: f64, h: f64, dh: f64 },
    #[error("phi = {phi} is not a hyperbolic direction of sheet {sheet} (|a| = {coupling})")]
    NotHyperbolic { phi: f64, sheet: Sheet, coupling: f64 },
}

/// `κ_j(φ)^{-1/2} η(φ)`.
pub fn sheet_point(m: &Moduli, phi: f64, sheet: Sheet) -> Result<[f64; 2], SpectralError> {
    let r = eigen_at(m, phi)?.kappa(sheet).sqrt().recip();
    let eta = direction(phi);
    Ok([r * eta[0], r * eta[1]])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FresnelSheet {
    pub sheet: Sheet,
    pub phi: Vec<f64>,
    pub points: Vec<[f64; 2]>,
}

/// Samples both sheets on `n` equispaced angles.
pub fn sample_sheets(m: &Moduli, n: usize) -> Result<[FresnelSheet; 2], SpectralError> {
    let phi: Vec<f64> = (0..n).map(|k| TAU * k as f64 / n as f64).collect();
    let mut pts = [Vec::with_capacity(n), Vec::with_capacity(n)];
    for &p in &phi {
        let e = eigen_at(m, p)?;
        let eta = direction(p);
        for s in Sheet::BOTH {
            let r = e.kappa(s).sqrt().recip();
            pts[s.index()].push([r * eta[0], r * eta[1]]);
        }
    }
    let [p1, p2] = pts;
    Ok([
        FresnelSheet { sheet: Sheet::First, phi: phi.clone(), points: p1 },
        FresnelSheet { sheet: Sheet::Second, phi, points: p2 },
    ])
}

/// `det(A(ξ) − I)`.
pub fn curve_residual(m: &Moduli, xi: [f64; 2]) -> f64 {
    let a = crate::media::symbol_at(m, xi);
    (a.a11 - 1.0) * (a.a22 - 1.0) - a.a12 * a.a12
}

/// Columns `phi, x1, y1, x2, y2`.
pub fn write_sheets_csv<W: io::Write>(sheets: &[FresnelSheet; 2], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["phi", "x1", "y1", "x2", "y2"])?;
    for i in 0..sheets[0].phi.len() {
        let [x1, y1] = sheets[0].points[i];
        let [x2, y2] = sheets[1].points[i];
        w.write_record(
            [sheets[0].phi[i], x1, y1, x2, y2].iter().map(|v| format!("{v:.16e}")),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// One row of the plot export: both sheets and the coupling curves
/// `(2 + a_j(η)) η`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub phi: f64,
    pub s1: [f64; 2],
    pub s2: [f64; 2],
    pub c1: [f64; 2],
    pub c2: [f64; 2],
}

pub fn plot_rows(m: &Moduli, n: usize) -> Result<Vec<PlotRow>, SpectralError> {
    let b = sample_branch(m, n)?;
    let sheets = sample_sheets(m, n)?;
    Ok((0..n)
        .map(|i| {
            let eta = direction(b.phi[i]);
            let c = |a: f64| [(2.0 + a) * eta[0], (2.0 + a) * eta[1]];
            PlotRow {
                phi: b.phi[i],
                s1: sheets[0].points[i],
                s2: sheets[1].points[i],
                c1: c(b.coupling[0][i]),
                c2: c(b.coupling[1][i]),
            }
        })
        .collect())
}

/// Columns `phi, s1x, s1y, s2x, s2y, c1x, c1y, c2x, c2y`.
pub fn write_plot_csv<W: io::Write>(rows: &[PlotRow], out: W, degrees: bool) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["phi", "s1x", "s1y", "s2x", "s2y", "c1x", "c1y", "c2x", "c2y"])?;
    for r in rows {
        let phi = if degrees { r.phi.to_degrees() } else { r.phi };
        let vals = [phi, r.s1[0], r.s1[1], r.s2[0], r.s2[1], r.c1[0], r.c1[1], r.c2[0], r.c2[1]];
        w.write_record(vals.iter().map(|v| format!("{v:.16e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Closed polylines in a square SVG centred on the origin.
pub fn write_svg<W: io::Write>(mut out: W, curves: &[(&str, &[[f64; 2]])]) -> io::Result<()> {
    const COLORS: [&str; 4] = ["#1f4e9c", "#c0392b", "#7f8c8d", "#27ae60"];
    let extent = curves
        .iter()
        .flat_map(|(_, pts)| pts.iter())
        .fold(0.0_f64, |a, p| a.max(p[0].abs()).max(p[1].abs()))
        * 1.05;
    let size = 600.0;
    let scale = size / (2.0 * extent.max(f64::MIN_POSITIVE));
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    )?;
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    for (i, (name, pts)) in curves.iter().enumerate() {
        let coords: Vec<String> = pts
            .iter()
            .map(|p| format!("{:.3},{:.3}", size / 2.0 + scale * p[0], size / 2.0 - scale * p[1]))
            .collect();
        writeln!(
            out,
            r#"<polygon id="{name}" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            COLORS[i % COLORS.len()],
            coords.join(" ")
        )?;
    }
    writeln!(out, "</svg>")
}

/// Tangency test quantities at a direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangencyValues {
    /// `∂²√κ + √κ`
    pub h: f64,
    /// `∂(∂²√κ + √κ)`
    pub dh: f64,
    /// `2√κ·h = ∂²κ − (∂κ)²/(2κ) + 2κ`
    pub g: f64,
    /// `∂³κ + ∂κ(1 − 3∂²κ/(2κ)) + 3(∂κ)³/(4κ²) = 2√κ·∂h`; it equals `∂g`
    /// wherever `h = 0`.
    pub dg: f64,
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangencyResult {
    pub phi0: f64,
    pub sheet: Sheet,
    pub gamma_bar: u8,
    pub h_values: TangencyValues,
}

enum Size {
    Zero,
    NonZero,
    Ambiguous,
}

fn size_of(v: f64, tol: f64) -> Size {
    if v.abs() <= tol {
        Size::Zero
    } else if v.abs() > 10.0 * tol {
        Size::NonZero
    } else {
        Size::Ambiguous
    }
}

/// Evaluates the tangency test quantities of sheet `j` at `phi0`.
pub fn tangency_values(m: &Moduli, phi0: f64, sheet: Sheet) -> Result<TangencyValues, FresnelError> {
    let jet = eigen_jet(m, phi0, sheet)?;
    let d3 = jet.d3;
    let (k, k1, k2) = (jet.value, jet.d1, jet.d2);
    let g = k2 - k1 * k1 / (2.0 * k) + 2.0 * k;
    let dg = d3 + k1 * (1.0 - 3.0 * k2 / (2.0 * k)) + 3.0 * k1.powi(3) / (4.0 * k * k);
    let sk = k.sqrt();
    Ok(TangencyValues {
        h: g / (2.0 * sk),
        dh: dg / (2.0 * sk),
        g,
        dg,
        tol: TOL_H * assemble_symbol(m, phi0).trace(),
    })
}

/// Contact order of the tangent line to sheet `j` at the hyperbolic
/// direction `phi0`.
pub fn tangency_order(m: &Moduli, phi0: f64, sheet: Sheet) -> Result<TangencyResult, FresnelError> {
    let e = eigen_at(m, phi0)?;
    let eta = direction(phi0);
    let r = e.vector(sheet);
    let a = (eta[0] * r[0] + eta[1] * r[1]).abs();
    if a > TOL_HYPERBOLIC {
        return Err(FresnelError::NotHyperbolic { phi: phi0, sheet, coupling: a });
    }
    let v = tangency_values(m, phi0, sheet)?;
    let ambiguous = FresnelError::OrderAmbiguous { phi: phi0, h: v.h, dh: v.dh };
    let gamma_bar = match (size_of(v.h, v.tol), size_of(v.dh, v.tol)) {
        (Size::NonZero, _) => 2,
        (Size::Zero, Size::NonZero) => 3,
        (Size::Zero, Size::Zero) => 4,
        _ => return Err(ambiguous),
    };
    Ok(TangencyResult { phi0, sheet, gamma_bar, h_values: v })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityCertificate {
    pub ok: bool,
    /// Minimum of `r² + 2r'² − r r''` for `r = κ₂^{-1/2}`.
    pub min_numerator: f64,
    pub worst_phi: f64,
}

/// Curvature numerator of the inner sheet, computed as `(ρ + ρ'')/ρ³` with
/// `ρ = √κ₂`.
pub fn convexity_numerator(m: &Moduli, phi: f64) -> Result<f64, SpectralError> {
    let j = eigen_jet(m, phi, Sheet::Second)?;
    let rho = j.value.sqrt();
    let rho2 = j.d2 / (2.0 * rho) - j.d1 * j.d1 / (4.0 * j.value * rho);
    Ok((rho + rho2) / rho.powi(3))
}

pub fn convexity_certificate(m: &Moduli) -> Result<ConvexityCertificate, SpectralError> {
    let vals: Vec<(f64, f64)> = (0..ANGLE_GRID)
        .into_par_iter()
        .map(|k| {
            let phi = TAU * k as f64 / ANGLE_GRID as f64;
            convexity_numerator(m, phi).map(|v| (phi, v))
        })
        .collect::<Result<_, _>>()?;
    let (worst_phi, min_numerator) = vals
        .into_iter()
        .fold((0.0, f64::INFINITY), |acc, (p, v)| if v < acc.1 { (p, v) } else { acc });
    Ok(ConvexityCertificate { ok: min_numerator > 0.0, min_numerator, worst_phi })
}

/// Symmetric bilinear form of the symbol, `A(u, v)` with `A(u, u) = A(u)`.
fn polarize(m: &Moduli, u: [f64; 2], v: [f64; 2]) -> SymbolMatrix {
    let sym = u[0] * v[1] + u[1] * v[0];
    SymbolMatrix {
        a11: m.tau1 * u[0] * v[0] + m.sigma1 * sym + m.mu * u[1] * v[1],
        a12: m.sigma1 * u[0] * v[0] + 0.5 * (m.lambda + m.mu) * sym + m.sigma2 * u[1] * v[1],
        a22: m.mu * u[0] * v[0] + m.sigma2 * sym + m.tau2 * u[1] * v[1],
    }
}

/// Coefficients of `s ↦ det(A(p + s d) − I)`, ascending.
pub fn line_polynomial(m: &Moduli, p: [f64; 2], d: [f64; 2]) -> [f64; 5] {
    let a0 = polarize(m, p, p);
    let a1 = polarize(m, p, d);
    let a2 = polarize(m, d, d);
    let e11 = [a0.a11 - 1.0, 2.0 * a1.a11, a2.a11];
    let e22 = [a0.a22 - 1.0, 2.0 * a1.a22, a2.a22];
    let e12 = [a0.a12, 2.0 * a1.a12, a2.a12];
    let mut c = [0.0; 5];
    for i in 0..3 {
        for j in 0..3 {
            c[i + j] += e11[i] * e22[j] - e12[i] * e12[j];
        }
    }
    c
}

/// Parameters `s` of the distinct real intersections of the line `p + s d`
/// with the Fresnel curve.
pub fn line_roots(m: &Moduli, p: [f64; 2], d: [f64; 2]) -> Vec<f64> {
    assert!(d[0] != 0.0 || d[1] != 0.0, "line direction must be nonzero");
    let poly = Poly::new(line_polynomial(m, p, d).to_vec());
    if poly.degree() == 0 {
        return vec![];
    }
    Sturm::new(&poly).roots()
}

/// Number of distinct intersection points of a line with the Fresnel curve.
pub fn line_intersections(m: &Moduli, p: [f64; 2], d: [f64; 2]) -> usize {
    assert!(d[0] != 0.0 || d[1] != 0.0, "line direction must be nonzero");
    let poly = Poly::new(line_polynomial(m, p, d).to_vec());
    if poly.degree() == 0 {
        return 0;
    }
    Sturm::new(&poly).count_all()
}

/// Intersections per sheet, assigning each point to the sheet whose
/// eigenvalue `|ξ|² κ_j` is closest to one.
pub fn line_sheet_hits(m: &Moduli, p: [f64; 2], d: [f64; 2]) -> [usize; 2] {
    let mut hits = [0; 2];
    for s in line_roots(m, p, d) {
        let xi = [p[0] + s * d[0], p[1] + s * d[1]];
        let a = crate::media::symbol_at(m, xi);
        let half_gap = 0.5 * a.gap();
        let mid = 0.5 * a.trace();
        let sheet = if ((mid - half_gap) - 1.0).abs() <= ((mid + half_gap) - 1.0).abs() { 0 } else { 1 };
        hits[sheet] += 1;
    }
    hits
}
