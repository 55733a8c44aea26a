//! Eigenanalysis of the symbol `A(η)`: closed-form eigenpairs, continuation of
//! the eigenvector branches around the circle, coupling functions
//! `a_j(η) = η·r_j(η)` and local Taylor coefficients of scalar branch functions.

use std::f64::consts::TAU;
use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::media::{
    assemble_symbol, direction, normalize_angle, perpendicular, symbol_derivative, Moduli,
    SymbolMatrix,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("eigenvalues coincide at phi = {phi} (gap {gap:e})")]
    DegenerateDirection { phi: f64, gap: f64 },
    #[error("Richardson extrapolation did not converge for derivative {order} (error estimate {error:e})")]
    NonConvergent { order: usize, error: f64 },
}

/// Sheet index in ascending eigenvalue order: `First` ↔ `κ₁`, the outer Fresnel sheet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sheet {
    #[serde(rename = "1")]
    First,
    #[serde(rename = "2")]
    Second,
}

impl Sheet {
    pub const BOTH: [Sheet; 2] = [Sheet::First, Sheet::Second];

    pub fn index(self) -> usize {
        match self {
            Sheet::First => 0,
            Sheet::Second => 1,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn other(self) -> Sheet {
        match self {
            Sheet::First => Sheet::Second,
            Sheet::Second => Sheet::First,
        }
    }
}

impl std::fmt::Display for Sheet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Ordered eigenvalues `κ₁ < κ₂` with unit eigenvectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub kappa1: f64,
    pub kappa2: f64,
    pub r1: [f64; 2],
    pub r2: [f64; 2],
}

impl EigenPair {
    pub fn kappa(&self, sheet: Sheet) -> f64 {
        match sheet {
            Sheet::First => self.kappa1,
            Sheet::Second => self.kappa2,
        }
    }

    pub fn vector(&self, sheet: Sheet) -> [f64; 2] {
        match sheet {
            Sheet::First => self.r1,
            Sheet::Second => self.r2,
        }
    }
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Fixes the sign of an eigenvector: nonnegative second component, or
/// nonnegative first component when the second is zero.
fn canonical_sign(v: [f64; 2]) -> [f64; 2] {
    let flip = if v[1].abs() > 1e-14 { v[1] < 0.0 } else { v[0] < 0.0 };
    if flip {
        [-v[0], -v[1]]
    } else {
        v
    }
}

/// Unit vector spanning the kernel of `A − κI`, taken orthogonal to the row
/// of larger magnitude.
fn kernel_vector(a: &SymbolMatrix, kappa: f64) -> [f64; 2] {
    let row1 = [a.a11 - kappa, a.a12];
    let row2 = [a.a12, a.a22 - kappa];
    let row = if row1[0].hypot(row1[1]) >= row2[0].hypot(row2[1]) { row1 } else { row2 };
    let n = row[0].hypot(row[1]);
    canonical_sign([row[1] / n, -row[0] / n])
}

/// Closed-form eigenpair of a symmetric 2×2 matrix. `phi` only labels the error.
pub fn eigen_of(a: &SymbolMatrix, phi: f64) -> Result<EigenPair, SpectralError> {
    if a.is_degenerate() {
        return Err(SpectralError::DegenerateDirection { phi, gap: a.gap() });
    }
    let tr = a.trace();
    let gap = a.gap();
    let kappa2 = 0.5 * (tr + gap);
    // det/κ₂ avoids cancellation in (tr − gap)/2 when κ₁ ≪ κ₂
    let kappa1 = if kappa2 > 0.0 { a.det() / kappa2 } else { 0.5 * (tr - gap) };
    let r1 = kernel_vector(a, kappa1);
    let r2 = canonical_sign([-r1[1], r1[0]]);
    Ok(EigenPair { kappa1, kappa2, r1, r2 })
}

/// Eigenpair of `A(η(φ))`.
pub fn eigen_at(m: &Moduli, phi: f64) -> Result<EigenPair, SpectralError> {
    eigen_of(&assemble_symbol(m, phi), phi)
}

/// Eigenvalue of one sheet together with its first three φ-derivatives.
/// `d1`, `d2` come from perturbation formulas, `d3` from differentiating
/// `κ = (tr ± √D)/2` with `D` the squared gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

fn third_derivative(m: &Moduli, phi: f64, sheet: Sheet) -> f64 {
    let a: [SymbolMatrix; 4] = std::array::from_fn(|k| symbol_derivative(m, phi, k as u32));
    let u: [f64; 4] = std::array::from_fn(|k| a[k].a11 - a[k].a22);
    let v: [f64; 4] = std::array::from_fn(|k| a[k].a12);
    let d1 = 2.0 * u[0] * u[1] + 8.0 * v[0] * v[1];
    let d2 = 2.0 * (u[1] * u[1] + u[0] * u[2]) + 8.0 * (v[1] * v[1] + v[0] * v[2]);
    let d3 = 2.0 * (3.0 * u[1] * u[2] + u[0] * u[3]) + 8.0 * (3.0 * v[1] * v[2] + v[0] * v[3]);
    // s = √D: 2ss' = D', 2s'² + 2ss'' = D'', 6s's'' + 2ss''' = D'''
    let s0 = a[0].gap();
    let s1 = d1 / (2.0 * s0);
    let s2 = (d2 - 2.0 * s1 * s1) / (2.0 * s0);
    let s3 = (d3 - 6.0 * s1 * s2) / (2.0 * s0);
    let sign = match sheet {
        Sheet::First => -1.0,
        Sheet::Second => 1.0,
    };
    0.5 * (a[3].trace() + sign * s3)
}

pub fn eigen_jet(m: &Moduli, phi: f64, sheet: Sheet) -> Result<EigenJet, SpectralError> {
    let e = eigen_at(m, phi)?;
    let r = e.vector(sheet);
    let s = e.vector(sheet.other());
    let da = symbol_derivative(m, phi, 1);
    let dda = symbol_derivative(m, phi, 2);
    let coupling = da.bilinear(s, r);
    let sep = e.kappa(sheet) - e.kappa(sheet.other());
    Ok(EigenJet {
        value: e.kappa(sheet),
        d1: da.bilinear(r, r),
        d2: dda.bilinear(r, r) + 2.0 * coupling * coupling / sep,
        d3: third_derivative(m, phi, sheet),
    })
}

/// Continues the sheet's eigenvector from `φ = 0` (canonical sign) to `phi`
/// and returns the coupling function `η·r_j` there.
pub fn coupling(m: &Moduli, phi: f64, sheet: Sheet) -> Result<f64, SpectralError> {
    const STEPS_PER_TURN: f64 = 2048.0;
    let target = normalize_angle(phi);
    let steps = ((target / TAU) * STEPS_PER_TURN).ceil().max(1.0) as usize;
    let mut v = eigen_at(m, 0.0)?.vector(sheet);
    for k in 1..=steps {
        let p = target * k as f64 / steps as f64;
        let w = eigen_at(m, p)?.vector(sheet);
        v = if dot(v, w) < 0.0 { [-w[0], -w[1]] } else { w };
    }
    Ok(dot(direction(target), v))
}

/// Branch-continuous samples of both eigenvalue branches and coupling functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchSample {
    pub phi: Vec<f64>,
    pub kappa: [Vec<f64>; 2],
    /// `a_j = η·r_j`
    pub coupling: [Vec<f64>; 2],
    /// `η^⊥·r_j`
    pub transverse: [Vec<f64>; 2],
    /// Smallest `|r_j(φ_k)·r_j(φ_{k+1})|` over consecutive samples.
    pub min_continuity: f64,
    /// Whether continuing `r_j` once around the circle flips its sign.
    pub monodromy_flip: [bool; 2],
}

impl BranchSample {
    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    /// Columns `phi, kappa1, kappa2, a1, a2`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["phi", "kappa1", "kappa2", "a1", "a2"])?;
        for i in 0..self.len() {
            let row = [
                self.phi[i],
                self.kappa[0][i],
                self.kappa[1][i],
                self.coupling[0][i],
                self.coupling[1][i],
            ];
            w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Number of sign changes or exact zeros of `a_j` around the closed circle.
    pub fn coupling_zero_count(&self, sheet: Sheet, tol: f64) -> usize {
        let a = &self.coupling[sheet.index()];
        let n = a.len();
        let flip = if self.monodromy_flip[sheet.index()] { -1.0 } else { 1.0 };
        let mut count = 0;
        for i in 0..n {
            let (x, y) = if i + 1 < n { (a[i], a[i + 1]) } else { (a[i], flip * a[0]) };
            if x.abs() <= tol || (y.abs() > tol && x * y < 0.0) {
                count += 1;
            }
        }
        count
    }
}

/// Samples both branches on `n` equally spaced angles of `[0, 2π)`.
pub fn sample_branch(m: &Moduli, n: usize) -> Result<BranchSample, SpectralError> {
    let n = n.max(2);
    let mut phi = Vec::with_capacity(n);
    let mut kappa = [Vec::with_capacity(n), Vec::with_capacity(n)];
    let mut coupling = [Vec::with_capacity(n), Vec::with_capacity(n)];
    let mut transverse = [Vec::with_capacity(n), Vec::with_capacity(n)];
    let mut prev: Option<[[f64; 2]; 2]> = None;
    let mut first: Option<[[f64; 2]; 2]> = None;
    let mut min_continuity = 1.0_f64;
    for k in 0..n {
        let p = TAU * k as f64 / n as f64;
        let e = eigen_at(m, p)?;
        let mut vs = [e.r1, e.r2];
        if let Some(pv) = prev {
            for j in 0..2 {
                let d = dot(pv[j], vs[j]);
                if d < 0.0 {
                    vs[j] = [-vs[j][0], -vs[j][1]];
                }
                min_continuity = min_continuity.min(d.abs());
            }
        }
        let (eta, perp) = (direction(p), perpendicular(p));
        phi.push(p);
        for j in 0..2 {
            kappa[j].push(if j == 0 { e.kappa1 } else { e.kappa2 });
            coupling[j].push(dot(eta, vs[j]));
            transverse[j].push(dot(perp, vs[j]));
        }
        first.get_or_insert(vs);
        prev = Some(vs);
    }
    let (first, last) = (first.unwrap(), prev.unwrap());
    let monodromy_flip = [dot(first[0], last[0]) < 0.0, dot(first[1], last[1]) < 0.0];
    Ok(BranchSample { phi, kappa, coupling, transverse, min_continuity, monodromy_flip })
}

/// Settings for [`taylor_coeffs_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RichardsonOptions {
    /// Largest step; later steps halve it.
    pub h0: f64,
    pub levels: usize,
    /// Required error estimate, relative to `max(|f(φ₀)|, 1)`.
    pub tol: f64,
}

impl Default for RichardsonOptions {
    fn default() -> Self {
        RichardsonOptions { h0: 0.2, levels: 10, tol: 1e-5 }
    }
}

/// Coefficients `c_k` of `Σ c_k (φ − φ₀)^k` with their error estimates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaylorSeries {
    pub phi0: f64,
    pub coeffs: Vec<f64>,
    pub errors: Vec<f64>,
}

impl TaylorSeries {
    /// k-th derivative at `φ₀`.
    pub fn derivative(&self, k: usize) -> f64 {
        self.coeffs[k] * factorial(k)
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// Central difference for the k-th derivative, with an error expansion in h².
fn central_difference(f: &impl Fn(f64) -> f64, x: f64, h: f64, k: usize) -> f64 {
    match k {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h.powi(3)),
        4 => {
            (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h))
                / h.powi(4)
        }
        _ => unreachable!("derivative order {k} not supported"),
    }
}

/// Richardson tableau in h²; returns the entry with the smallest change to
/// its neighbours over the whole tableau.
fn richardson(f: &impl Fn(f64) -> f64, x: f64, k: usize, opts: &RichardsonOptions) -> (f64, f64) {
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(opts.levels);
    let mut best = (f64::NAN, f64::INFINITY);
    let mut h = opts.h0;
    for i in 0..opts.levels {
        let mut row = vec![central_difference(f, x, h, k)];
        for j in 1..=i {
            let factor = 4f64.powi(j as i32);
            let prev = row[j - 1];
            row.push(prev + (prev - table[i - 1][j - 1]) / (factor - 1.0));
        }
        if i > 0 {
            for j in 1..=i {
                let err = (row[j] - row[j - 1]).abs().max((row[j] - table[i - 1][j - 1]).abs());
                if err <= best.1 {
                    best = (row[j], err);
                }
            }
        }
        table.push(row);
        h *= 0.5;
    }
    best
}

/// Taylor coefficients up to `order ≤ 4` with default Richardson settings.
pub fn taylor_coeffs(
    f: impl Fn(f64) -> f64,
    phi0: f64,
    order: usize,
) -> Result<TaylorSeries, SpectralError> {
    taylor_coeffs_with(f, phi0, order, &RichardsonOptions::default())
}

pub fn taylor_coeffs_with(
    f: impl Fn(f64) -> f64,
    phi0: f64,
    order: usize,
    opts: &RichardsonOptions,
) -> Result<TaylorSeries, SpectralError> {
    assert!(order <= 4, "Taylor coefficients are available up to order 4");
    let f0 = f(phi0);
    let scale = f0.abs().max(1.0);
    let mut coeffs = vec![f0];
    let mut errors = vec![0.0];
    for k in 1..=order {
        let (d, err) = richardson(&f, phi0, k, opts);
        if err.is_nan() || err > opts.tol * scale {
            return Err(SpectralError::NonConvergent { order: k, error: err });
        }
        coeffs.push(d / factorial(k));
        errors.push(err / factorial(k));
    }
    Ok(TaylorSeries { phi0, coeffs, errors })
}

/// The eigenvalue branch of one sheet as a function of φ. Panics on a
/// degenerate direction, so use it only where (A3) is known to hold.
pub fn branch_fn(m: &Moduli, sheet: Sheet) -> impl Fn(f64) -> f64 + '_ {
    move |phi| {
        eigen_at(m, phi)
            .unwrap_or_else(|e| panic!("branch evaluated at degenerate direction: {e}"))
            .kappa(sheet)
    }
}
