//! Information-theoretic functionals of one-dimensional densities.
//!
//! Every functional is reduced to a handful of raw integrals of the
//! unscaled density `ρ₀` (mass, `∫ρ₀′²/ρ₀`, `∫ρ₀ ln ρ₀`, `∫ρ₀²`, moments).
//! A density carries a scale `s` and a length scale `λ`, so that the density
//! it represents is `ρ(y) = s·ρ₀(y/λ)/λ`; normalization and rescaling only
//! change `s` and `λ`.

use std::fmt;

use crate::error::{Error, Result};
use crate::genpoly::{origin_hint, MomentumState};
use crate::quad::{self, pairwise_sum, SingularityHint, Tolerance};
use crate::transform::PositionState;

const UNDERFLOW: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Representation {
    Position,
    Momentum,
}

impl Representation {
    pub fn label(self) -> &'static str {
        match self {
            Representation::Position => "x",
            Representation::Momentum => "k",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Source {
    /// `ρ₀ = |φ(k)|²` integrated analytically.
    Momentum(MomentumState),
    /// `ρ₀ = |ψ(x)|²` on the transform grid plus closed-form tails.
    Position(Box<PositionState>),
    /// Uniform samples `ρ₀(start + i·step)`, zero outside.
    Samples { start: f64, step: f64, values: Vec<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Functional {
    Mass,
    Fisher,
    PLogP,
    Square,
    FirstMoment,
    SecondMoment,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledDensity {
    representation: Representation,
    source: Source,
    raw_mass: f64,
    scale: f64,
    length_scale: f64,
    normalized: bool,
    norm_constant: f64,
    clipped: usize,
    tolerance: Option<Tolerance>,
}

impl SampledDensity {
    /// `|φ(k)|²` of a momentum state; uses the state's normalization if set.
    pub fn momentum(state: &MomentumState) -> Result<Self> {
        state.require_normalizable()?;
        Self::build(Representation::Momentum, Source::Momentum(state.clone()), 0)
    }

    /// `|ψ(x)|²` of a transformed state.
    pub fn position(state: PositionState) -> Result<Self> {
        Self::build(Representation::Position, Source::Position(Box::new(state)), 0)
    }

    /// Uniformly spaced samples. Values in `[−1e−12, 0)` are clipped to zero
    /// and counted; anything more negative is rejected.
    pub fn from_samples(representation: Representation, start: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0 && step.is_finite() && start.is_finite()) || values.len() < 2 {
            return Err(Error::InvalidDensity(format!(
                "need at least two samples on a positive step, got {} at step {step}",
                values.len()
            )));
        }
        let mut clipped = 0;
        let mut cleaned = Vec::with_capacity(values.len());
        for v in values {
            if !v.is_finite() || v < -1e-12 {
                return Err(Error::InvalidDensity(format!("sample {v} is not a density value")));
            }
            if v < 0.0 {
                clipped += 1;
                cleaned.push(0.0);
            } else {
                cleaned.push(v);
            }
        }
        Self::build(representation, Source::Samples { start, step, values: cleaned }, clipped)
    }

    fn build(representation: Representation, source: Source, clipped: usize) -> Result<Self> {
        let mut d = Self {
            representation,
            source,
            raw_mass: f64::NAN,
            scale: 1.0,
            length_scale: 1.0,
            normalized: false,
            norm_constant: 1.0,
            clipped,
            tolerance: None,
        };
        d.raw_mass = d.raw(Functional::Mass)?;
        if !(d.raw_mass > 0.0 && d.raw_mass.is_finite()) {
            return Err(Error::InvalidDensity(format!("mass {} is not positive", d.raw_mass)));
        }
        Ok(d)
    }

    /// Quadrature tolerance for analytic integrands, replacing the defaults.
    pub fn with_tolerance(&self, tol: Tolerance) -> Result<Self> {
        let mut d = Self { tolerance: Some(tol), ..self.clone() };
        let mass = d.raw(Functional::Mass)?;
        if !self.normalized {
            d.raw_mass = mass;
        }
        Ok(d)
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Mass divided out by [`normalize`]; 1 when never normalized.
    pub fn norm_constant(&self) -> f64 {
        self.norm_constant
    }

    /// Number of slightly negative samples set to zero.
    pub fn clipped(&self) -> usize {
        self.clipped
    }

    /// Regularized states yield approximate measures.
    pub fn is_approximate(&self) -> bool {
        match &self.source {
            Source::Momentum(s) => s.cutoff().is_some(),
            Source::Position(p) => p.is_approximate(),
            Source::Samples { .. } => false,
        }
    }

    /// Known singularities of the density at the origin.
    pub fn singularities(&self) -> Vec<SingularityHint> {
        match &self.source {
            Source::Momentum(s) if s.cutoff().is_none() => origin_hint(s.density_exponent()),
            _ => Vec::new(),
        }
    }

    /// `∫ρ`.
    pub fn mass(&self) -> f64 {
        self.scale * self.raw_mass
    }

    /// Copy with every length multiplied by `factor`: `ρ(y) → ρ(y/λ)/λ`.
    pub fn rescale(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale factor {factor}")));
        }
        Ok(Self { length_scale: self.length_scale * factor, ..self.clone() })
    }

    /// `(y, ρ(y))` pairs. Momentum densities are sampled at `points`
    /// cell centres of `[−k_max, k_max]`, which avoids `k = 0`.
    pub fn samples(&self, points: usize, k_max: f64) -> Vec<(f64, f64)> {
        let lam = self.length_scale;
        let s = self.scale / lam;
        match &self.source {
            Source::Momentum(state) => {
                let h = 2.0 * k_max / points as f64;
                (0..points)
                    .map(|i| {
                        let k = -k_max + (i as f64 + 0.5) * h;
                        let v = state.radial(k.abs());
                        (lam * k, s * v * v)
                    })
                    .collect()
            }
            Source::Position(p) => p
                .x()
                .iter()
                .zip(p.psi())
                .map(|(&x, psi)| (lam * x, s * psi.norm_sqr()))
                .collect(),
            Source::Samples { start, step, values } => values
                .iter()
                .enumerate()
                .map(|(i, v)| (lam * (start + i as f64 * step), s * v))
                .collect(),
        }
    }

    fn raw(&self, which: Functional) -> Result<f64> {
        match &self.source {
            Source::Momentum(state) => momentum_raw(state, which, self.tolerance),
            Source::Position(p) => position_raw(p, which),
            Source::Samples { start, step, values } => Ok(samples_raw(*start, *step, values, which)),
        }
    }
}

/// Hint for an integrand whose small-k expansion starts at `leading` and
/// continues at `leading + step`.
fn leading_hint(leading: f64, step: f64) -> Vec<SingularityHint> {
    let h = origin_hint(leading);
    if h.is_empty() && step.fract() != 0.0 {
        origin_hint(leading + step)
    } else {
        h
    }
}

fn momentum_raw(state: &MomentumState, which: Functional, tol: Option<Tolerance>) -> Result<f64> {
    let default_tol = tol.unwrap_or_default();
    let fisher_tol = tol.unwrap_or(Tolerance::fisher());
    let alpha = state.alpha();
    let e_min = state.min_exponent();
    let beta = alpha.decay_exponent();
    let upper = state.envelope_cutoff(1e-18);
    let lower = state.cutoff().unwrap_or(0.0).min(upper);
    let regularized = state.cutoff().is_some();
    let scale = state.norm().unwrap_or(1.0);
    let poly = state.poly();
    let log_scale = scale.ln();
    let rate = state.decay_rate();

    let half_line = |f: &dyn Fn(f64) -> f64, leading: f64, tol: Tolerance| -> Result<f64> {
        let hints = if regularized || lower > 0.0 { Vec::new() } else { leading_hint(leading, beta) };
        let r = quad::integrate(f, lower, upper, tol, &hints)?;
        Ok(2.0 * r.value)
    };
    let rho = |k: f64| state.radial(k).powi(2);
    match which {
        Functional::Mass => half_line(&rho, 2.0 * e_min, default_tol),
        Functional::Fisher => {
            // (√ρ)′ = (P′ − k^{α/2}P)·E
            let q = &poly.differentiate() - &poly.mul_monomial(1.0, alpha.half(), 1);
            let q_min = q.min_exponent().unwrap_or(0.0);
            if !regularized && 2.0 * q_min <= -1.0 {
                return Err(Error::DivergentMeasure { measure: "fisher", exponent: 2.0 * q_min });
            }
            half_line(
                &|k| {
                    let v = scale * q.eval_abs(k) * state.envelope(k);
                    4.0 * v * v
                },
                2.0 * q_min,
                fisher_tol,
            )
        }
        Functional::PLogP => half_line(
            &|k| {
                let r = rho(k);
                if r < UNDERFLOW {
                    return 0.0;
                }
                // ln ρ assembled from its factors to keep the tail exact
                let ln_rho = 2.0 * (log_scale + poly.eval_abs(k).abs().ln()) - 2.0 * rate * k.powf(beta);
                r * ln_rho
            },
            2.0 * e_min,
            default_tol,
        ),
        Functional::Square => {
            if !regularized && 4.0 * e_min <= -1.0 {
                return Err(Error::DivergentMeasure {
                    measure: "disequilibrium",
                    exponent: 4.0 * e_min,
                });
            }
            half_line(&|k| rho(k).powi(2), 4.0 * e_min, default_tol)
        }
        Functional::FirstMoment => Ok(0.0),
        Functional::SecondMoment => half_line(&|k| k * k * rho(k), 2.0 * e_min + 2.0, default_tol),
    }
}

fn position_raw(p: &PositionState, which: Functional) -> Result<f64> {
    let (q, qd) = p
        .tail_model()
        .map_or((f64::INFINITY, f64::INFINITY), |t| (t.decay, t.derivative_decay));
    let plogp = |r: f64| if r < UNDERFLOW { 0.0 } else { r * r.ln() };
    match which {
        Functional::Mass => p.mass(),
        Functional::Fisher => {
            // ψ has a constant phase, so ρ′²/ρ = 4|ψ′|²
            Ok(p.grid_sum(|_, _, d| 4.0 * d) + p.tail_integral(|_, _, d| 4.0 * d, qd)?)
        }
        Functional::PLogP => Ok(p.grid_sum(|_, r, _| plogp(r)) + p.tail_integral(|_, r, _| plogp(r), q)?),
        Functional::Square => Ok(p.grid_sum(|_, r, _| r * r) + p.tail_integral(|_, r, _| r * r, 2.0 * q)?),
        Functional::FirstMoment => Ok(0.0),
        Functional::SecondMoment => {
            Ok(p.grid_sum(|x, r, _| x * x * r) + p.tail_integral(|x, r, _| x * x * r, q - 2.0)?)
        }
    }
}

fn trapezoid(values: impl Iterator<Item = f64>, step: f64) -> f64 {
    let v: Vec<f64> = values.collect();
    let n = v.len();
    let ends = 0.5 * (v[0] + v[n - 1]);
    (pairwise_sum(&v) - ends) * step
}

fn samples_raw(start: f64, step: f64, values: &[f64], which: Functional) -> f64 {
    let x = |i: usize| start + i as f64 * step;
    let it = values.iter().copied().enumerate();
    match which {
        Functional::Mass => trapezoid(values.iter().copied(), step),
        Functional::Fisher => {
            // 4∫(√ρ)′² with central differences, one-sided at the ends
            let root: Vec<f64> = values.iter().map(|v| v.sqrt()).collect();
            let n = root.len();
            let d = (0..n).map(|i| {
                let (lo, hi) = (i.saturating_sub(1), (i + 1).min(n - 1));
                let g = (root[hi] - root[lo]) / ((hi - lo) as f64 * step);
                4.0 * g * g
            });
            trapezoid(d, step)
        }
        Functional::PLogP => trapezoid(values.iter().map(|&r| if r < UNDERFLOW { 0.0 } else { r * r.ln() }), step),
        Functional::Square => trapezoid(values.iter().map(|r| r * r), step),
        Functional::FirstMoment => trapezoid(it.map(|(i, r)| x(i) * r), step),
        Functional::SecondMoment => trapezoid(values.iter().enumerate().map(|(i, r)| x(i) * x(i) * r), step),
    }
}

/// Copy scaled to unit mass.
pub fn normalize(density: &SampledDensity) -> Result<SampledDensity> {
    let mass = density.mass();
    let mut out = density.clone();
    out.normalized = true;
    if (mass - 1.0).abs() < 1e-12 {
        out.norm_constant = 1.0;
    } else {
        out.scale = density.scale / mass;
        out.norm_constant = mass;
    }
    Ok(out)
}

/// `∫ρ′²/ρ`.
pub fn fisher(density: &SampledDensity) -> Result<f64> {
    let lam = density.length_scale;
    Ok(density.scale * density.raw(Functional::Fisher)? / (lam * lam))
}

/// `−∫ρ ln ρ`.
pub fn shannon(density: &SampledDensity) -> Result<f64> {
    let s = density.scale;
    let lam = density.length_scale;
    Ok(-s * (density.raw(Functional::PLogP)? + density.raw_mass * (s / lam).ln()))
}

/// `∫ρ²`.
pub fn disequilibrium(density: &SampledDensity) -> Result<f64> {
    let s = density.scale;
    Ok(s * s * density.raw(Functional::Square)? / density.length_scale)
}

/// Second central moment.
pub fn variance(density: &SampledDensity) -> Result<f64> {
    let m = density.raw_mass;
    let m1 = density.raw(Functional::FirstMoment)?;
    let m2 = density.raw(Functional::SecondMoment)?;
    let lam = density.length_scale;
    Ok(density.scale * lam * lam * (m2 - m1 * m1 / m))
}

#[derive(Clone, Debug, PartialEq)]
pub struct InfoMeasures {
    pub fisher: f64,
    pub shannon: f64,
    pub disequilibrium: f64,
    /// `H = e^S`
    pub exp_entropy: f64,
    /// `C = H·D`
    pub complexity: f64,
    /// `e^{2S/3}/(2πe)`
    pub j3: f64,
    /// `e^{2S}/(2πe)`
    pub j1: f64,
    /// `J3·F`
    pub fisher_shannon: f64,
    /// `J1·F`
    pub fisher_shannon_1d: f64,
    pub variance: f64,
    /// Measures that diverge; their fields hold `+∞`.
    pub divergent: Vec<&'static str>,
    pub approximate: bool,
}

impl InfoMeasures {
    pub fn from_parts(fisher: f64, shannon: f64, disequilibrium: f64, variance: f64) -> Self {
        let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
        let exp_entropy = shannon.exp();
        let j3 = (2.0 * shannon / 3.0).exp() / two_pi_e;
        let j1 = (2.0 * shannon).exp() / two_pi_e;
        Self {
            fisher,
            shannon,
            disequilibrium,
            exp_entropy,
            complexity: exp_entropy * disequilibrium,
            j3,
            j1,
            fisher_shannon: j3 * fisher,
            fisher_shannon_1d: j1 * fisher,
            variance,
            divergent: Vec::new(),
            approximate: false,
        }
    }
}

/// All measures of `density`; divergent ones are recorded as `+∞`.
pub fn compose_measures(density: &SampledDensity) -> Result<InfoMeasures> {
    let mut divergent = Vec::new();
    let mut take = |name: &'static str, r: Result<f64>| -> Result<f64> {
        match r {
            Ok(v) if v.is_infinite() => {
                divergent.push(name);
                Ok(f64::INFINITY)
            }
            Ok(v) => Ok(v),
            Err(Error::DivergentMeasure { .. }) => {
                divergent.push(name);
                Ok(f64::INFINITY)
            }
            Err(e) => Err(e),
        }
    };
    let f = take("fisher", fisher(density))?;
    let s = take("shannon", shannon(density))?;
    let d = take("disequilibrium", disequilibrium(density))?;
    let v = take("variance", variance(density))?;
    let mut m = InfoMeasures::from_parts(f, s, d, v);
    m.divergent = divergent;
    m.approximate = density.is_approximate();
    Ok(m)
}
