//! Position-space wavefunctions `ψ(x) = (1/2π)∫ e^{ikx} φ(k) dk`.
//!
//! `φ` is a sum of terms `|k|^e exp(−γ|k|^β)` whose powers are not smooth at
//! `k = 0`, so a plain discrete transform would converge only like `Δk^{e+1}`.
//! Every non-smooth power up to a cutoff is subtracted as `d_s |k|^s e^{−a|k|}`
//! and transformed in closed form,
//!
//! ```text
//! (1/π)∫₀^∞ k^s e^{−ak} {cos, sin}(kx) dk = Γ(s+1)/π · {Re, Im} (a − ix)^{−(s+1)},
//! ```
//!
//! leaving a remainder that the centered FFT integrates to near machine
//! precision. The closed-form part also carries the power-law tails of `ψ`
//! beyond the grid. States regularized by an origin cutoff are transformed
//! without subtraction and flagged as approximate.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::genpoly::{MomentumState, Term};
use crate::quad::{self, pairwise_sum, Tolerance};
use crate::spectrum::gamma;

pub const DEFAULT_POINTS: usize = 1 << 17;
pub const MIN_POINTS: usize = 1 << 10;
/// Default spectral extent; sets the x step `π/k_max` to 1/128.
pub const DEFAULT_SPECTRAL_EXTENT: f64 = 128.0 * PI;

const EXPONENT_TOL: f64 = 1e-9;

/// Symmetric k grid `[−k_max, k_max)` with `points` nodes and its
/// reciprocal x grid: `Δk = 2k_max/points`, `Δx = π/k_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub k_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(k_max: f64, points: usize) -> Result<Self> {
        if !(k_max.is_finite() && k_max > 0.0) {
            return Err(Error::InvalidGrid(format!("k_max must be positive, got {k_max}")));
        }
        if points < MIN_POINTS || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points must be a power of two ≥ {MIN_POINTS}, got {points}"
            )));
        }
        Ok(Self { k_max, points })
    }

    /// Default grid: the envelope is below 1e−16 well inside `k_max`.
    pub fn for_state(state: &MomentumState) -> Self {
        Self {
            k_max: (1.5 * state.envelope_cutoff(1e-16)).max(DEFAULT_SPECTRAL_EXTENT),
            points: DEFAULT_POINTS,
        }
    }

    /// Twice the points and twice the extent: same `Δk`, half the `Δx`.
    pub fn refined(&self) -> Self {
        Self { k_max: 2.0 * self.k_max, points: 2 * self.points }
    }

    pub fn dk(&self) -> f64 {
        2.0 * self.k_max / self.points as f64
    }

    pub fn dx(&self) -> f64 {
        PI / self.k_max
    }

    /// Half-width of the x grid.
    pub fn x_extent(&self) -> f64 {
        0.5 * self.points as f64 * self.dx()
    }

    fn check(&self, state: &MomentumState) -> Result<()> {
        Self::new(self.k_max, self.points)?;
        let env = state.envelope(self.k_max);
        if env >= 1e-16 {
            return Err(Error::InvalidGrid(format!(
                "envelope at k_max = {} is {env:e}, needs < 1e-16",
                self.k_max
            )));
        }
        Ok(())
    }
}

/// `φ` restricted to `k > 0` plus the data needed for the odd/even extension.
#[derive(Clone, Debug)]
struct Spectrum {
    terms: Vec<Term>,
    parity: u8,
    rate: f64,
    power: f64,
    cutoff: Option<f64>,
    /// `φ(k) = phase · sgn(k)^parity · radial(|k|)`
    phase: Complex64,
}

impl Spectrum {
    fn of_state(state: &MomentumState) -> Self {
        let scale = state.norm().unwrap_or(1.0);
        Self {
            terms: state
                .poly()
                .terms()
                .iter()
                .map(|t| Term::new(scale * t.coeff, t.exponent))
                .collect(),
            parity: state.poly().parity(),
            rate: state.decay_rate(),
            power: state.decay_exponent(),
            cutoff: state.cutoff(),
            phase: state.phase(),
        }
    }

    /// Spectrum of `ψ′`, i.e. `ik·φ(k)`.
    fn times_ik(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|t| Term::new(t.coeff, t.exponent + 1.0)).collect(),
            parity: 1 - self.parity,
            phase: self.phase * Complex64::i(),
            ..self.clone()
        }
    }

    fn radial(&self, k: f64) -> f64 {
        if self.cutoff.is_some_and(|eps| k < eps) {
            return 0.0;
        }
        let poly: f64 = self.terms.iter().map(|t| t.coeff * k.powf(t.exponent)).sum();
        poly * (-self.rate * k.powf(self.power)).exp()
    }

    fn is_smooth_power(&self, e: f64) -> bool {
        let r = e.round();
        e > -EXPONENT_TOL && (e - r).abs() < EXPONENT_TOL && (r as i64).rem_euclid(2) == self.parity as i64
    }

    /// `ψ = phase · i^parity · u`, with `u` real.
    fn real_phase(&self) -> Complex64 {
        if self.parity == 1 {
            self.phase * Complex64::i()
        } else {
            self.phase
        }
    }

    /// Coefficient of `k⁰` in the small-k expansion of the even extension.
    fn origin_value(&self) -> f64 {
        if self.parity == 1 || self.cutoff.is_some() {
            return 0.0;
        }
        self.terms
            .iter()
            .filter(|t| t.exponent.abs() < EXPONENT_TOL)
            .map(|t| t.coeff)
            .sum()
    }

    /// Non-smooth powers of the small-k expansion with exponent ≤ `s_max`.
    fn singular_powers(&self, s_max: f64) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for t in &self.terms {
            let mut coeff = t.coeff;
            let mut i = 0u32;
            loop {
                let e = t.exponent + i as f64 * self.power;
                if e > s_max + EXPONENT_TOL {
                    break;
                }
                if !self.is_smooth_power(e) {
                    add_power(&mut out, e, coeff);
                }
                i += 1;
                coeff *= -self.rate / i as f64;
            }
        }
        out
    }
}

fn add_power(list: &mut Vec<(f64, f64)>, e: f64, c: f64) {
    match list.iter_mut().find(|(s, _)| (*s - e).abs() < EXPONENT_TOL) {
        Some(entry) => entry.1 += c,
        None => list.push((e, c)),
    }
}

/// `u_sing(x) = Σ w_s {Re, Im} (a − ix)^{−(s+1)}` with `w_s = d_s Γ(s+1)/π`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct SingularPart {
    a: f64,
    parity: u8,
    /// `(s, d_s)` as subtracted in k
    powers: Vec<(f64, f64)>,
    weights: Vec<f64>,
}

impl SingularPart {
    fn build(spec: &Spectrum, s_max: f64, a: f64) -> Result<Self> {
        let mut pending = spec.singular_powers(s_max);
        let mut powers = Vec::new();
        while !pending.is_empty() {
            let (idx, _) = pending
                .iter()
                .enumerate()
                .min_by(|x, y| x.1 .0.total_cmp(&y.1 .0))
                .expect("non-empty");
            let (s, d) = pending.swap_remove(idx);
            if d == 0.0 {
                continue;
            }
            powers.push((s, d));
            // |k|^s e^{−a|k|} itself contributes d(−a)^m/m! at s + m
            let mut c = d;
            let mut m = 1u32;
            while s + m as f64 <= s_max + EXPONENT_TOL {
                c *= -a / m as f64;
                if !spec.is_smooth_power(s + m as f64) {
                    add_power(&mut pending, s + m as f64, -c);
                }
                m += 1;
            }
        }
        let weights = powers
            .iter()
            .map(|&(s, d)| Ok(d * gamma(s + 1.0)? / PI))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self { a, parity: spec.parity, powers, weights })
    }

    fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    /// Smallest subtracted power; `u_sing ~ |x|^{−(s_min+1)}`.
    fn min_power(&self) -> Option<f64> {
        self.powers.iter().map(|p| p.0).reduce(f64::min)
    }

    fn k_space(&self, k: f64) -> f64 {
        let damp = (-self.a * k).exp();
        self.powers.iter().map(|&(s, d)| d * k.powf(s)).sum::<f64>() * damp
    }

    pub(crate) fn eval(&self, x: f64) -> f64 {
        let r = self.a.hypot(x);
        let theta = (-x).atan2(self.a);
        let mut acc = 0.0;
        for (&(s, _), &w) in self.powers.iter().zip(&self.weights) {
            let p = -(s + 1.0);
            let mag = r.powf(p);
            let ang = p * theta;
            acc += w * mag * if self.parity == 0 { ang.cos() } else { ang.sin() };
        }
        acc
    }
}

/// Largest subtracted power for a given `Δk`: the remainder's error
/// `~ Δk^{s+1}` must drop below 1e−18.
fn subtraction_order(dk: f64) -> f64 {
    if dk >= 1.0 {
        return 10.0;
    }
    (18.0 * std::f64::consts::LN_10 / -dk.ln() - 1.0).clamp(1.0, 10.0)
}

/// Real transform `u(x_j)` of a spectrum on the grid.
fn transform_samples(spec: &Spectrum, grid: &GridSpec, k_support: f64) -> Result<(Vec<f64>, Option<SingularPart>)> {
    let n = grid.points;
    let dk = grid.dk();
    let singular = if spec.cutoff.is_none() {
        let s_max = subtraction_order(dk);
        let a = (45.0 + s_max * k_support.max(1.0).ln()) / k_support;
        let part = SingularPart::build(spec, s_max, a)?;
        (!part.is_empty()).then_some(part)
    } else {
        None
    };

    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let sign = if spec.parity == 1 { -1.0 } else { 1.0 };
    buf[0] = Complex64::new(spec.origin_value(), 0.0);
    for m in 1..n / 2 {
        let k = m as f64 * dk;
        let mut g = spec.radial(k);
        if let Some(part) = &singular {
            g -= part.k_space(k);
        }
        buf[m] = Complex64::new(g, 0.0);
        buf[n - m] = Complex64::new(sign * g, 0.0);
    }
    // k = −k_max is left at zero so the sum keeps its symmetry
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);

    let scale = dk / (2.0 * PI);
    let mut u = vec![0.0; n];
    for j in 0..n {
        // x index j − n/2 is stored at position j
        let b = buf[(j + n / 2) % n];
        let x = (j as f64 - (n / 2) as f64) * grid.dx();
        let reg = if spec.parity == 1 { b.im } else { b.re } * scale;
        u[j] = reg + singular.as_ref().map_or(0.0, |p| p.eval(x));
    }
    Ok((u, singular))
}

/// Closed-form model of `ψ` and `ψ′` beyond the grid.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct TailModel {
    pub(crate) psi: SingularPart,
    pub(crate) dpsi: SingularPart,
    /// `|ψ|² ~ |x|^{−decay}`
    pub(crate) decay: f64,
    /// `|ψ′|² ~ |x|^{−derivative_decay}`
    pub(crate) derivative_decay: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PositionState {
    n: u32,
    alpha: f64,
    grid: GridSpec,
    x: Vec<f64>,
    psi: Vec<Complex64>,
    psi_prime: Vec<Complex64>,
    phase: Complex64,
    tails: Option<TailModel>,
    cutoff: Option<f64>,
    momentum_mass: f64,
    norm_check: f64,
}

/// Inverse Fourier transform of `state` on `grid`.
pub fn inverse_fourier(state: &MomentumState, grid: &GridSpec) -> Result<PositionState> {
    state.require_normalizable()?;
    grid.check(state)?;
    let spec = Spectrum::of_state(state);
    let dspec = spec.times_ik();
    let support = state.envelope_cutoff(1e-16);
    let (u, sing) = transform_samples(&spec, grid, support)?;
    let (du, dsing) = transform_samples(&dspec, grid, support)?;
    let phase = spec.real_phase();
    let dphase = dspec.real_phase();

    let tails = match (sing, dsing) {
        (Some(psi), Some(dpsi)) => {
            let decay = 2.0 * (psi.min_power().expect("non-empty") + 1.0);
            let derivative_decay = 2.0 * (dpsi.min_power().expect("non-empty") + 1.0);
            Some(TailModel { psi, dpsi, decay, derivative_decay })
        }
        _ => None,
    };
    let n = grid.points;
    let x: Vec<f64> = (0..n).map(|j| (j as f64 - (n / 2) as f64) * grid.dx()).collect();
    let mut pos = PositionState {
        n: state.n(),
        alpha: state.alpha().value(),
        grid: *grid,
        x,
        psi: u.iter().map(|&v| phase * v).collect(),
        psi_prime: du.iter().map(|&v| dphase * v).collect(),
        phase,
        tails,
        cutoff: state.cutoff(),
        momentum_mass: state.mass(Tolerance::default())?,
        norm_check: f64::NAN,
    };
    pos.norm_check = pos.mass()? / (pos.momentum_mass / (2.0 * PI));
    Ok(pos)
}

/// Samples of `ψ′(x)` on the grid of [`inverse_fourier`].
pub fn spectral_derivative(state: &MomentumState, grid: &GridSpec) -> Result<Vec<Complex64>> {
    Ok(inverse_fourier(state, grid)?.psi_prime)
}

/// `∫|ψ|² dx / ((1/2π)∫|φ|² dk)`.
pub fn parseval_ratio(position: &PositionState, momentum: &MomentumState) -> Result<f64> {
    let k_side = momentum.mass(Tolerance::default())? / (2.0 * PI);
    Ok(position.mass()? / k_side)
}

impl PositionState {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn psi_prime(&self) -> &[Complex64] {
        &self.psi_prime
    }

    /// Constant phase `θ` with `ψ = θ·u`, `u` real.
    pub fn phase(&self) -> Complex64 {
        self.phase
    }

    /// Parseval ratio computed at construction.
    pub fn norm_check(&self) -> f64 {
        self.norm_check
    }

    pub fn cutoff(&self) -> Option<f64> {
        self.cutoff
    }

    /// Regularized states have no tail model and a discontinuous spectrum.
    pub fn is_approximate(&self) -> bool {
        self.cutoff.is_some()
    }

    /// `|ψ|² ~ |x|^{−decay}` beyond the grid; `None` when the tail is
    /// faster than any power.
    pub fn tail_decay(&self) -> Option<f64> {
        self.tails.as_ref().map(|t| t.decay)
    }

    pub fn density(&self) -> Vec<f64> {
        self.psi.iter().map(|p| p.norm_sqr()).collect()
    }

    /// Trapezoid sum over the grid of `f(x, |ψ|², |ψ′|²)`.
    pub(crate) fn grid_sum(&self, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
        let vals: Vec<f64> = self
            .x
            .iter()
            .zip(self.psi.iter().zip(&self.psi_prime))
            .map(|(&x, (p, d))| f(x, p.norm_sqr(), d.norm_sqr()))
            .collect();
        pairwise_sum(&vals) * self.grid.dx()
    }

    /// `∫_{|x|>X} f(x, |ψ|², |ψ′|²) dx` from the tail model, for an integrand
    /// decaying like `|x|^{−decay}`. Infinite when `decay ≤ 1`.
    pub(crate) fn tail_integral(&self, f: impl Fn(f64, f64, f64) -> f64, decay: f64) -> Result<f64> {
        let Some(tail) = &self.tails else {
            return Ok(0.0);
        };
        if decay <= 1.0 {
            return Ok(f64::INFINITY);
        }
        let r = quad::integrate_tail(
            |x| {
                let u = tail.psi.eval(x);
                let du = tail.dpsi.eval(x);
                let v = f(x, u * u, du * du);
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            },
            self.grid.x_extent(),
            decay,
            Tolerance::new(1e-15, 1e-10),
        )?;
        Ok(2.0 * r.value)
    }

    pub(crate) fn tail_model(&self) -> Option<&TailModel> {
        self.tails.as_ref()
    }

    /// `∫|ψ|² dx` including the tails beyond the grid.
    pub fn mass(&self) -> Result<f64> {
        let decay = self.tail_decay().unwrap_or(f64::INFINITY);
        Ok(self.grid_sum(|_, r, _| r) + self.tail_integral(|_, r, _| r, decay)?)
    }

    /// Closed-form `ψ/phase` beyond the grid, if a tail model exists.
    pub fn tail_value(&self, x: f64) -> Option<f64> {
        self.tails.as_ref().map(|t| t.psi.eval(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genpoly::momentum_state;

    fn normalized(n: u32, alpha: f64) -> MomentumState {
        momentum_state(n, alpha).unwrap().normalized().unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(10.0, 1000).is_err());
        assert!(GridSpec::new(10.0, 512).is_err());
        assert!(GridSpec::new(-1.0, 1024).is_err());
        let g = GridSpec::new(10.0, 1024).unwrap();
        assert!((g.dx() * g.dk() * g.points as f64 - 2.0 * PI).abs() < 1e-12);
        let s = momentum_state(0, 2.0).unwrap();
        assert!(inverse_fourier(&s, &GridSpec::new(5.0, 1024).unwrap()).is_err());
    }

    #[test]
    fn gaussian_self_transform() {
        let s = momentum_state(0, 2.0).unwrap();
        let p = inverse_fourier(&s, &GridSpec::for_state(&s)).unwrap();
        // (1/2π)∫e^{ikx}e^{−k²/2}dk = e^{−x²/2}/√(2π)
        let peak = 1.0 / (2.0 * PI).sqrt();
        let mut worst: f64 = 0.0;
        let mut worst_sup: f64 = 0.0;
        for (x, psi) in p.x().iter().zip(p.psi()) {
            let exact = (-0.5 * x * x).exp() * peak;
            worst_sup = worst_sup.max((psi.re - exact).abs() / peak);
            // pointwise relative error until the Gaussian nears round-off
            if x.abs() < 5.0 {
                worst = worst.max((psi.re - exact).abs() / exact);
            }
            assert!(psi.im.abs() < 1e-14);
        }
        assert!(worst < 1e-8, "{worst}");
        assert!(worst_sup < 1e-13, "{worst_sup}");
        assert!((p.norm_check() - 1.0).abs() < 1e-8);
        assert!(p.tail_decay().is_none());
    }

    #[test]
    fn first_excited_at_two() {
        // φ₁ = −2ik e^{−k²/2} ⇒ ψ₁ = 2x e^{−x²/2}/√(2π)
        let s = momentum_state(1, 2.0).unwrap();
        let p = inverse_fourier(&s, &GridSpec::for_state(&s)).unwrap();
        for (x, (psi, dpsi)) in p.x().iter().zip(p.psi().iter().zip(p.psi_prime())) {
            if x.abs() < 6.0 {
                let g = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
                assert!((psi.re - 2.0 * x * g).abs() < 1e-12);
                assert!((dpsi.re - 2.0 * (1.0 - x * x) * g).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ground_derivative_at_two() {
        let s = momentum_state(0, 2.0).unwrap();
        let d = spectral_derivative(&s, &GridSpec::for_state(&s)).unwrap();
        let g = GridSpec::for_state(&s);
        let n = g.points;
        for j in (0..n).step_by(97) {
            let x = (j as f64 - (n / 2) as f64) * g.dx();
            let exact = -x * (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
            assert!((d[j].re - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn non_normalizable_rejected() {
        let s = momentum_state(3, 1.5).unwrap();
        let g = GridSpec::new(200.0, 1 << 12).unwrap();
        assert!(matches!(inverse_fourier(&s, &g), Err(Error::NonNormalizable { .. })));
    }

    #[test]
    fn parseval_fractional() {
        for (n, tol) in [(0, 1e-8), (1, 1e-6), (2, 1e-6)] {
            let s = normalized(n, 1.5);
            let p = inverse_fourier(&s, &GridSpec::for_state(&s)).unwrap();
            let r = parseval_ratio(&p, &s).unwrap();
            assert!((r - 1.0).abs() < tol, "n={n}: {r}");
        }
    }

    #[test]
    fn singular_part_matches_quadrature() {
        // direct check of the closed form against the defining integral
        let part = SingularPart {
            a: 2.0,
            parity: 0,
            powers: vec![(-0.25, 1.0)],
            weights: vec![gamma(0.75).unwrap() / PI],
        };
        let x = 1.3;
        let direct = quad::integrate(
            |k| k.powf(-0.25) * (-2.0 * k).exp() * (k * x).cos() / PI,
            0.0,
            40.0,
            Tolerance::new(1e-14, 1e-13),
            &[quad::SingularityHint::new(0.0, -0.25)],
        )
        .unwrap()
        .value;
        assert!((part.eval(x) - direct).abs() < 1e-12);
    }

    #[test]
    fn realness_and_parity() {
        for n in 0..3 {
            let s = normalized(n, 1.5);
            let p = inverse_fourier(&s, &GridSpec::for_state(&s)).unwrap();
            let len = p.x().len();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for j in 1..len {
                let z = p.psi()[j] / p.phase();
                assert!(z.im.abs() < 1e-10);
                let mirror = p.psi()[len - j];
                assert!((p.psi()[j] - sign * mirror).norm() < 1e-8);
            }
        }
    }
}
