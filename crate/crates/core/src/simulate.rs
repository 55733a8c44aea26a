//! Fourier-spectral integration of the coupled system.
//!
//! With the convention `∇ ↦ iξ` each frequency evolves independently:
//!
//! ```text
//! dÛ/dt = Ŵ
//! dŴ/dt = −A(ξ)Û − iγξθ̂
//! dθ̂/dt = −κ|ξ|²θ̂ − iγ ξ·Ŵ
//! ```
//!
//! and `E = |Ŵ|² + ⟨A(ξ)Û, Û⟩ + |θ̂|²` satisfies `dE/dt = −2κ|ξ|²|θ̂|²`.
//! Data are seeded in an annular sector, advanced with classical RK4 and
//! transformed back to physical space at the sample times, where the sup-norm
//! of `(U_t, √A(D)U, θ)` is recorded.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::media::{assemble_symbol, direction, symbol_at, Moduli, SymbolMatrix, ANGLE_GRID};
use crate::spectral::{eigen_at, eigen_of, Sheet, SpectralError};

/// Courant factor: `dt ≤ C_STAB / (max wave speed · max |ξ|)`.
pub const C_STAB: f64 = 0.5;
/// Largest `κ|ξ|²dt` allowed for the heat part.
pub const HEAT_STAB: f64 = 2.0;
/// A mode whose energy exceeds this multiple of its initial value aborts the run.
pub const BLOWUP_FACTOR: f64 = 10.0;

/// Seeded modes below this fraction of the peak amplitude are dropped.
pub const AMPLITUDE_FLOOR: f64 = 1e-16;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("mode at xi = ({}, {}) grew by a factor {growth} at t = {t}", xi[0], xi[1])]
    UnstableStep { t: f64, xi: [f64; 2], growth: f64 },
    #[error("fit window [{t_lo}, {t_hi}] holds {count} samples, need at least 10 with t_lo >= 1")]
    InsufficientData { t_lo: f64, t_hi: f64, count: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ModeState {
    pub u: [Complex64; 2],
    pub w: [Complex64; 2],
    pub theta: Complex64,
}

impl ModeState {
    fn axpy(&self, a: f64, d: &ModeState) -> ModeState {
        ModeState {
            u: [self.u[0] + d.u[0] * a, self.u[1] + d.u[1] * a],
            w: [self.w[0] + d.w[0] * a, self.w[1] + d.w[1] * a],
            theta: self.theta + d.theta * a,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.u.iter().chain(&self.w).map(|z| z.norm_sqr()).sum::<f64>() + self.theta.norm_sqr()
    }
}

fn apply(a: &SymbolMatrix, v: [Complex64; 2]) -> [Complex64; 2] {
    [v[0] * a.a11 + v[1] * a.a12, v[0] * a.a12 + v[1] * a.a22]
}

/// The ODE of a single frequency.
#[derive(Clone, Copy, Debug)]
pub struct ModeSystem {
    pub xi: [f64; 2],
    pub a: SymbolMatrix,
    pub gamma: f64,
    pub kappa: f64,
}

impl ModeSystem {
    pub fn new(m: &Moduli, xi: [f64; 2]) -> Self {
        ModeSystem { xi, a: symbol_at(m, xi), gamma: m.gamma, kappa: m.kappa }
    }

    fn xi_sqr(&self) -> f64 {
        self.xi[0] * self.xi[0] + self.xi[1] * self.xi[1]
    }

    pub fn rhs(&self, s: &ModeState) -> ModeState {
        let au = apply(&self.a, s.u);
        let ig = I * self.gamma;
        let xi_w = s.w[0] * self.xi[0] + s.w[1] * self.xi[1];
        ModeState {
            u: s.w,
            w: [-au[0] - ig * self.xi[0] * s.theta, -au[1] - ig * self.xi[1] * s.theta],
            theta: -s.theta * (self.kappa * self.xi_sqr()) - ig * xi_w,
        }
    }

    pub fn energy(&self, s: &ModeState) -> f64 {
        let au = apply(&self.a, s.u);
        let potential = (au[0] * s.u[0].conj() + au[1] * s.u[1].conj()).re;
        s.w[0].norm_sqr() + s.w[1].norm_sqr() + potential + s.theta.norm_sqr()
    }

    /// Exact energy rate `−2κ|ξ|²|θ̂|²`.
    pub fn dissipation(&self, s: &ModeState) -> f64 {
        -2.0 * self.kappa * self.xi_sqr() * s.theta.norm_sqr()
    }

    /// One classical fourth-order Runge–Kutta step.
    pub fn step(&self, s: &ModeState, dt: f64) -> ModeState {
        let k1 = self.rhs(s);
        let k2 = self.rhs(&s.axpy(0.5 * dt, &k1));
        let k3 = self.rhs(&s.axpy(0.5 * dt, &k2));
        let k4 = self.rhs(&s.axpy(dt, &k3));
        s.axpy(dt / 6.0, &k1)
            .axpy(dt / 3.0, &k2)
            .axpy(dt / 3.0, &k3)
            .axpy(dt / 6.0, &k4)
    }
}

/// Time derivative of a mode state.
pub fn mode_rhs(m: &Moduli, xi: [f64; 2], s: &ModeState) -> ModeState {
    ModeSystem::new(m, xi).rhs(s)
}

/// Mode energy `|Ŵ|² + ⟨A(ξ)Û, Û⟩ + |θ̂|²`.
pub fn energy(m: &Moduli, xi: [f64; 2], s: &ModeState) -> f64 {
    ModeSystem::new(m, xi).energy(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Seed {
    /// `Ŵ` along the eigenvector of `A` most nearly perpendicular to the
    /// sector centre.
    Velocity,
    /// `θ̂` only.
    Temperature,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    /// Grid points per axis.
    pub n: usize,
    /// Spatial period `L`.
    pub period: f64,
    /// Sector centre `φ̄`.
    pub center: f64,
    pub half_width: f64,
    pub r0: f64,
    pub r1: f64,
    pub t_final: f64,
    /// Upper bound on the step; the stability bound is used when absent.
    pub dt: Option<f64>,
    pub seed: Seed,
    /// Number of equispaced sample times in `(0, t_final]`.
    pub samples: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 512,
            period: 256.0 * PI,
            center: 0.0,
            half_width: 0.6,
            r0: 0.5,
            r1: 2.0,
            t_final: 128.0,
            dt: None,
            seed: Seed::Velocity,
            samples: 48,
        }
    }
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let cfg: SimConfig =
            serde_json::from_str(text).map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / self.period
    }

    fn invalid(msg: impl Into<String>) -> SimError {
        SimError::InvalidConfig(msg.into())
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.n < 8 || !self.n.is_multiple_of(2) {
            return Err(Self::invalid("n must be even and at least 8"));
        }
        let finite = [self.period, self.center, self.half_width, self.r0, self.r1, self.t_final];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Self::invalid("all parameters must be finite"));
        }
        if self.period <= 0.0 || self.t_final <= 0.0 {
            return Err(Self::invalid("period and t_final must be positive"));
        }
        if !(self.half_width > 0.0 && self.half_width < FRAC_PI_2) {
            return Err(Self::invalid("half_width must lie in (0, pi/2)"));
        }
        if !(self.r0 >= 0.0 && self.r0 < self.r1) {
            return Err(Self::invalid("radial band needs 0 <= r0 < r1"));
        }
        let nyquist = self.frequency_step() * (self.n / 2) as f64;
        if self.r1 > nyquist {
            return Err(Self::invalid(format!("r1 exceeds the grid's Nyquist radius {nyquist}")));
        }
        if self.samples == 0 {
            return Err(Self::invalid("samples must be positive"));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Self::invalid("dt must be positive"));
            }
        }
        Ok(())
    }

    /// Largest stable step for the medium.
    pub fn stable_dt(&self, m: &Moduli) -> f64 {
        let c_max = max_wave_speed(m);
        let by_wave = C_STAB / (c_max * self.r1);
        let by_heat = HEAT_STAB / (m.kappa * self.r1 * self.r1);
        by_wave.min(by_heat)
    }
}

/// `max_φ √κ₂(φ)`.
pub fn max_wave_speed(m: &Moduli) -> f64 {
    (0..ANGLE_GRID)
        .map(|k| {
            let a = assemble_symbol(m, std::f64::consts::TAU * k as f64 / ANGLE_GRID as f64);
            0.5 * (a.trace() + a.gap())
        })
        .fold(0.0, f64::max)
        .sqrt()
}

fn bump(u: f64) -> f64 {
    if u.abs() < 1.0 {
        (-1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

/// Smooth cutoff: bump in `|ξ|` over `[r0, r1]` (centred at the origin when
/// `r0 = 0`) times a bump in angle around `center`.
pub fn cutoff(cfg: &SimConfig, xi: [f64; 2]) -> f64 {
    let r = xi[0].hypot(xi[1]);
    let radial = if cfg.r0 > 0.0 {
        let mid = 0.5 * (cfg.r0 + cfg.r1);
        bump((r - mid) / (0.5 * (cfg.r1 - cfg.r0)))
    } else {
        bump(r / cfg.r1)
    };
    if radial == 0.0 {
        return 0.0;
    }
    let d = (xi[1].atan2(xi[0]) - cfg.center + PI).rem_euclid(2.0 * PI) - PI;
    radial * bump(d / cfg.half_width)
}

/// `√A(ξ)` for a non-degenerate direction, `|ξ|(√κ₁ r₁r₁ᵀ + √κ₂ r₂r₂ᵀ)`.
fn sqrt_symbol(m: &Moduli, xi: [f64; 2]) -> Result<SymbolMatrix, SpectralError> {
    let r = xi[0].hypot(xi[1]);
    let phi = xi[1].atan2(xi[0]);
    let e = eigen_of(&assemble_symbol(m, phi), phi)?;
    let (s1, s2) = (e.kappa1.sqrt() * r, e.kappa2.sqrt() * r);
    Ok(SymbolMatrix {
        a11: s1 * e.r1[0] * e.r1[0] + s2 * e.r2[0] * e.r2[0],
        a12: s1 * e.r1[0] * e.r1[1] + s2 * e.r2[0] * e.r2[1],
        a22: s1 * e.r1[1] * e.r1[1] + s2 * e.r2[1] * e.r2[1],
    })
}

/// Grid frequency of index `i`.
fn wavenumber(i: usize, n: usize, dk: f64) -> f64 {
    let k = if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
    k as f64 * dk
}

struct Mode {
    sys: ModeSystem,
    sqrt_a: SymbolMatrix,
    index: (usize, usize),
    mirror: (usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub stderr: f64,
    /// `exponent ± 2·stderr`.
    pub interval: [f64; 2],
    pub t_lo: f64,
    pub t_hi: f64,
    pub samples: usize,
}

/// Least-squares slope of `log y` against `log t` over `[t_lo, t_hi]`,
/// reported as a decay exponent (minus the slope).
pub fn fit_exponent(times: &[f64], values: &[f64], window: [f64; 2]) -> Result<FitResult, SimError> {
    let [t_lo, t_hi] = window;
    let (xs, ys): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|(t, y)| **t >= t_lo && **t <= t_hi && **y > 0.0)
        .map(|(t, y)| (t.ln(), y.ln()))
        .unzip();
    let count = xs.len();
    if count < 10 || t_lo < 1.0 {
        return Err(SimError::InsufficientData { t_lo, t_hi, count });
    }
    let n = count as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (rss / (n - 2.0) / sxx).sqrt();
    let exponent = -slope;
    Ok(FitResult {
        exponent,
        stderr,
        interval: [exponent - 2.0 * stderr, exponent + 2.0 * stderr],
        t_lo,
        t_hi,
        samples: count,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub config: SimConfig,
    pub dt: f64,
    pub steps: usize,
    pub modes: usize,
    pub times: Vec<f64>,
    pub supnorm: Vec<f64>,
    /// Sum of the mode energies.
    pub energy: Vec<f64>,
    /// Fit over `[T/4, T]`, when that window holds enough samples.
    pub fit: Option<FitResult>,
}

#[derive(Serialize)]
struct Summary<'a> {
    exponent: Option<f64>,
    stderr: Option<f64>,
    fit: Option<&'a FitResult>,
    modes: usize,
    dt: f64,
    steps: usize,
    config: &'a SimConfig,
}

impl SimResult {
    /// Columns `t, supnorm, energy`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "supnorm", "energy"])?;
        for i in 0..self.times.len() {
            w.write_record([
                format!("{:.16e}", self.times[i]),
                format!("{:.16e}", self.supnorm[i]),
                format!("{:.16e}", self.energy[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::to_value(Summary {
            exponent: self.fit.map(|f| f.exponent),
            stderr: self.fit.map(|f| f.stderr),
            fit: self.fit.as_ref(),
            modes: self.modes,
            dt: self.dt,
            steps: self.steps,
            config: &self.config,
        })
        .expect("summary serializes")
    }
}

/// Direction of the seeded velocity.
fn seed_vector(m: &Moduli, center: f64) -> Result<[f64; 2], SpectralError> {
    let e = eigen_at(m, center)?;
    let eta = direction(center);
    let a = |s: Sheet| {
        let r = e.vector(s);
        (r[0] * eta[0] + r[1] * eta[1]).abs()
    };
    Ok(if a(Sheet::First) <= a(Sheet::Second) { e.r1 } else { e.r2 })
}

fn collect_modes(m: &Moduli, cfg: &SimConfig) -> Result<(Vec<Mode>, Vec<f64>), SimError> {
    let n = cfg.n;
    let dk = cfg.frequency_step();
    let mut modes = vec![];
    let mut amps = vec![];
    for i in 0..n {
        for j in 0..n {
            if i == n / 2 || j == n / 2 || (i == 0 && j == 0) {
                continue;
            }
            let xi = [wavenumber(i, n, dk), wavenumber(j, n, dk)];
            let amp = cutoff(cfg, xi);
            if amp <= 0.0 {
                continue;
            }
            modes.push(Mode {
                sys: ModeSystem::new(m, xi),
                sqrt_a: sqrt_symbol(m, xi)?,
                index: (i, j),
                mirror: ((n - i) % n, (n - j) % n),
            });
            amps.push(amp);
        }
    }
    // amplitudes this far below the peak cannot affect the sup-norm
    let peak = amps.iter().copied().fold(0.0, f64::max);
    let keep: Vec<bool> = amps.iter().map(|&a| a >= AMPLITUDE_FLOOR * peak).collect();
    let mut k = keep.iter();
    modes.retain(|_| *k.next().unwrap());
    amps.retain(|&a| a >= AMPLITUDE_FLOOR * peak);
    Ok((modes, amps))
}

/// 2-D inverse FFT (unnormalised) in place, returning the transposed result.
fn inverse_fft_2d(grid: &mut Vec<Complex64>, n: usize, planner: &mut FftPlanner<f64>) {
    let fft = planner.plan_fft_inverse(n);
    fft.process(grid);
    let mut t = vec![Complex64::default(); n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = grid[i * n + j];
        }
    }
    fft.process(&mut t);
    *grid = t;
}

/// Physical field of a single spectral component with Hermitian completion,
/// `Σ c(ξ) e^{iξ·x} + conj`. Returned as complex values (transposed layout)
/// so the imaginary part can be inspected.
pub fn reconstruct(n: usize, entries: &[((usize, usize), Complex64)]) -> Vec<Complex64> {
    let mut grid = vec![Complex64::default(); n * n];
    for &((i, j), c) in entries {
        grid[i * n + j] += c;
        grid[((n - i) % n) * n + (n - j) % n] += c.conj();
    }
    inverse_fft_2d(&mut grid, n, &mut FftPlanner::new());
    grid
}

fn sup_norm(modes: &[Mode], states: &[ModeState], n: usize, planner: &mut FftPlanner<f64>) -> f64 {
    // three complex transforms carry five real fields: (W₁, W₂), (S₁, S₂), (θ, 0)
    let mut grids = vec![vec![Complex64::default(); n * n]; 3];
    for (mode, s) in modes.iter().zip(states) {
        let su = apply(&mode.sqrt_a, s.u);
        let vals = [(s.w[0], s.w[1]), (su[0], su[1]), (s.theta, Complex64::default())];
        let (i, j) = mode.index;
        let (mi, mj) = mode.mirror;
        for (g, (a, b)) in grids.iter_mut().zip(vals) {
            g[i * n + j] += a + I * b;
            g[mi * n + mj] += a.conj() + I * b.conj();
        }
    }
    for g in grids.iter_mut() {
        inverse_fft_2d(g, n, planner);
    }
    (0..n * n)
        .map(|k| grids[0][k].norm_sqr() + grids[1][k].norm_sqr() + grids[2][k].re.powi(2))
        .fold(0.0, f64::max)
        .sqrt()
}

/// Integrates the seeded modes to `t_final`, sampling the sup-norm.
pub fn evolve(m: &Moduli, cfg: &SimConfig) -> Result<SimResult, SimError> {
    cfg.validate()?;
    let stable = cfg.stable_dt(m);
    let dt_max = match cfg.dt {
        Some(dt) if dt > stable => {
            return Err(SimError::InvalidConfig(format!(
                "dt = {dt} exceeds the stability bound {stable}"
            )))
        }
        Some(dt) => dt,
        None => stable,
    };
    let interval = cfg.t_final / cfg.samples as f64;
    let per_sample = (interval / dt_max).ceil() as usize;
    let dt = interval / per_sample as f64;

    let (modes, amps) = collect_modes(m, cfg)?;
    if modes.is_empty() {
        return Err(SimError::InvalidConfig("cutoff selects no grid frequencies".into()));
    }
    let mut states: Vec<ModeState> = match cfg.seed {
        Seed::Velocity => {
            let r = seed_vector(m, cfg.center)?;
            amps.iter()
                .map(|&a| ModeState { w: [(a * r[0]).into(), (a * r[1]).into()], ..Default::default() })
                .collect()
        }
        Seed::Temperature => {
            amps.iter().map(|&a| ModeState { theta: a.into(), ..Default::default() }).collect()
        }
    };
    let e0: Vec<f64> = modes.iter().zip(&states).map(|(md, s)| md.sys.energy(s)).collect();

    let mut planner = FftPlanner::new();
    let mut times = vec![0.0];
    let mut supnorm = vec![sup_norm(&modes, &states, cfg.n, &mut planner)];
    let mut total_energy = vec![e0.iter().sum()];
    for k in 1..=cfg.samples {
        states.par_iter_mut().zip(modes.par_iter()).for_each(|(s, md)| {
            for _ in 0..per_sample {
                *s = md.sys.step(s, dt);
            }
        });
        let t = k as f64 * interval;
        let energies: Vec<f64> =
            modes.par_iter().zip(states.par_iter()).map(|(md, s)| md.sys.energy(s)).collect();
        if let Some((idx, growth)) = energies
            .iter()
            .zip(&e0)
            .enumerate()
            .find(|(_, (e, e0))| e.is_nan() || **e > BLOWUP_FACTOR * **e0)
            .map(|(idx, (e, e0))| (idx, e / e0))
        {
            return Err(SimError::UnstableStep { t, xi: modes[idx].sys.xi, growth });
        }
        times.push(t);
        supnorm.push(sup_norm(&modes, &states, cfg.n, &mut planner));
        total_energy.push(energies.iter().sum());
    }
    let fit = fit_exponent(&times, &supnorm, [cfg.t_final / 4.0, cfg.t_final]).ok();
    Ok(SimResult {
        config: cfg.clone(),
        dt,
        steps: per_sample * cfg.samples,
        modes: modes.len(),
        times,
        supnorm,
        energy: total_energy,
        fit,
    })
}
