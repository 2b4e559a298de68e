//! Globally adaptive Gauss–Kronrod (7/15) quadrature with algebraic endpoint
//! singularities.
//!
//! Panels that touch a [`SingularityHint`] are integrated in the variable
//! `s` with `t = location ± len·s^{1/(1+exponent)}`, which turns an integrand
//! `~ |t − location|^exponent` into one that is bounded at `s = 0`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

/// Hard ceiling on the number of panels.
pub const MAX_PANELS: usize = 1 << 15;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("integrand ~ |t − {location}|^{exponent} is not integrable")]
    NonIntegrable { location: f64, exponent: f64 },

    #[error("quadrature did not converge: value {value}, error estimate {error_estimate} after {evaluations} evaluations")]
    NonConvergent {
        value: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("integrand is not finite at t = {t}")]
    NonFinite { t: f64 },

    #[error("invalid quadrature input: {0}")]
    InvalidInput(String),
}

/// Converged when the error estimate is at most `max(abs, rel·|value|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    /// Default for Fisher integrands.
    pub const fn fisher() -> Self {
        Self::new(1e-8, 1e-8)
    }

    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if ok(self.abs) && ok(self.rel) && (self.abs > 0.0 || self.rel > 0.0) {
            Ok(())
        } else {
            Err(QuadError::InvalidInput(format!("tolerance {self:?}")))
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-10, 1e-10)
    }
}

/// Integrand behaves like `|t − location|^exponent` near `location`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularityHint {
    pub location: f64,
    pub exponent: f64,
}

impl SingularityHint {
    pub const fn new(location: f64, exponent: f64) -> Self {
        Self { location, exponent }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug)]
enum Map {
    Identity,
    /// `t = loc + len·s^power`
    Left { loc: f64, len: f64, power: f64 },
    /// `t = loc − len·s^power`
    Right { loc: f64, len: f64, power: f64 },
}

impl Map {
    #[inline]
    fn apply(&self, s: f64) -> (f64, f64) {
        match *self {
            Map::Identity => (s, 1.0),
            Map::Left { loc, len, power } => {
                let sp = s.powf(power - 1.0);
                (loc + len * sp * s, len * power * sp)
            }
            Map::Right { loc, len, power } => {
                let sp = s.powf(power - 1.0);
                (loc - len * sp * s, len * power * sp)
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Panel {
    segment: usize,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.segment.cmp(&self.segment))
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
/// Returns `(kronrod value, error estimate)`.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> (f64, f64) {
    let (value, error, _, _) = gk15(&f, a, b);
    (value, error)
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = fc.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let err = rescale_error((res_k - res_g) * half, res_abs * scale, res_asc * scale);
    (res_k * half, err, res_abs * scale, res_asc * scale)
}

/// Pairwise summation in a fixed order.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

fn build_segments(a: f64, b: f64, hints: &[SingularityHint]) -> Result<Vec<(f64, f64, Map)>, QuadError> {
    for h in hints {
        if !(h.exponent > -1.0) {
            return Err(QuadError::NonIntegrable {
                location: h.location,
                exponent: h.exponent,
            });
        }
        if !(h.location >= a && h.location <= b) {
            return Err(QuadError::InvalidInput(format!(
                "hint at {} outside [{a}, {b}]",
                h.location
            )));
        }
    }
    let exponent_at = |x: f64| {
        hints
            .iter()
            .filter(|h| h.location == x)
            .map(|h| h.exponent)
            .reduce(f64::min)
    };
    let mut breaks: Vec<f64> = std::iter::once(a)
        .chain(hints.iter().map(|h| h.location))
        .chain(std::iter::once(b))
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut segments = Vec::new();
    for w in breaks.windows(2) {
        let (l, r) = (w[0], w[1]);
        let (hl, hr) = (exponent_at(l), exponent_at(r));
        let halves = if hl.is_some() && hr.is_some() {
            let m = 0.5 * (l + r);
            vec![(l, m, hl, None), (m, r, None, hr)]
        } else {
            vec![(l, r, hl, hr)]
        };
        for (l, r, hl, hr) in halves {
            match (hl, hr) {
                (Some(p), _) => {
                    let len = 0.25 * (r - l);
                    let power = 1.0 / (1.0 + p);
                    segments.push((0.0, 1.0, Map::Left { loc: l, len, power }));
                    segments.push((l + len, r, Map::Identity));
                }
                (_, Some(p)) => {
                    let len = 0.25 * (r - l);
                    let power = 1.0 / (1.0 + p);
                    segments.push((l, r - len, Map::Identity));
                    segments.push((0.0, 1.0, Map::Right { loc: r, len, power }));
                }
                _ => segments.push((l, r, Map::Identity)),
            }
        }
    }
    Ok(segments)
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
    hints: &[SingularityHint],
) -> Result<QuadratureResult, QuadError> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(QuadError::InvalidInput(format!("interval [{a}, {b}]")));
    }
    tol.validate()?;
    let segments = build_segments(a, b, hints)?;

    let mut evaluations = 0usize;
    let mut eval_panel = |seg: usize, lo: f64, hi: f64| -> Result<Panel, QuadError> {
        let map = segments[seg].2;
        let g = |s: f64| {
            let (t, jac) = map.apply(s);
            f(t) * jac
        };
        let (value, error, _, _) = gk15(&g, lo, hi);
        evaluations += 15;
        if !value.is_finite() || !error.is_finite() {
            return Err(QuadError::NonFinite { t: map.apply(0.5 * (lo + hi)).0 });
        }
        Ok(Panel { segment: seg, a: lo, b: hi, value, error })
    };

    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    for (i, &(lo, hi, _)) in segments.iter().enumerate() {
        let p = eval_panel(i, lo, hi)?;
        value += p.value;
        error += p.error;
        heap.push(p);
    }

    let mut stuck = false;
    while error > tol.target(value) {
        if heap.len() >= MAX_PANELS {
            break;
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            heap.push(worst);
            stuck = true;
            break;
        }
        let (left, right) = match (
            eval_panel(worst.segment, worst.a, mid),
            eval_panel(worst.segment, mid, worst.b),
        ) {
            (Ok(l), Ok(r)) => (l, r),
            // refinement ran into overflow: keep the last finite estimate
            _ => {
                heap.push(worst);
                stuck = true;
                break;
            }
        };
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.segment.cmp(&q.segment).then(p.a.total_cmp(&q.a)));
    let values: Vec<f64> = panels.iter().map(|p| p.value).collect();
    let errors: Vec<f64> = panels.iter().map(|p| p.error).collect();
    let value = pairwise_sum(&values);
    let error_estimate = pairwise_sum(&errors);
    let converged = !stuck && error_estimate <= tol.target(value);
    if converged {
        Ok(QuadratureResult { value, error_estimate, evaluations, converged })
    } else {
        Err(QuadError::NonConvergent { value, error_estimate, evaluations })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tail {
    /// Integrate `[0, upper]` only; the caller guarantees the rest is negligible.
    Truncate { upper: f64 },
    /// `t = u/(1 − u)` onto `[0, 1)`.
    RationalMap,
}

/// `t` beyond which `exp(−2t^{α/2+1}/(α+2)) < threshold`.
pub fn envelope_cutoff(alpha: f64, threshold: f64) -> f64 {
    let rate = 2.0 / (alpha + 2.0);
    (-threshold.ln() / rate).powf(1.0 / (0.5 * alpha + 1.0))
}

/// `∫_{−∞}^{∞} f` for an integrand of declared symmetry. Hints refer to the
/// half-line `t ≥ 0`.
pub fn integrate_semiinfinite<F: Fn(f64) -> f64>(
    f: F,
    symmetry: Symmetry,
    tail: Tail,
    tol: Tolerance,
    hints: &[SingularityHint],
) -> Result<QuadratureResult, QuadError> {
    if symmetry == Symmetry::Odd {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        });
    }
    let half_tol = Tolerance::new(0.5 * tol.abs, tol.rel);
    let r = match tail {
        Tail::Truncate { upper } => integrate(&f, 0.0, upper, half_tol, hints)?,
        Tail::RationalMap => {
            let mapped: Vec<SingularityHint> = hints
                .iter()
                .map(|h| SingularityHint::new(h.location / (1.0 + h.location), h.exponent))
                .collect();
            integrate(
                |u| {
                    let w = 1.0 - u;
                    f(u / w) / (w * w)
                },
                0.0,
                1.0,
                half_tol,
                &mapped,
            )?
        }
    };
    Ok(QuadratureResult {
        value: 2.0 * r.value,
        error_estimate: 2.0 * r.error_estimate,
        ..r
    })
}

/// `∫_start^∞ f` for an integrand decaying like `t^{−decay}`, via `t = start/u`.
pub fn integrate_tail<F: Fn(f64) -> f64>(
    f: F,
    start: f64,
    decay: f64,
    tol: Tolerance,
) -> Result<QuadratureResult, QuadError> {
    if !(start > 0.0) {
        return Err(QuadError::InvalidInput(format!("tail start {start}")));
    }
    let exponent = decay - 2.0;
    if exponent <= -1.0 {
        return Err(QuadError::NonIntegrable {
            location: f64::INFINITY,
            exponent: -decay,
        });
    }
    let hints = if exponent < 0.0 {
        vec![SingularityHint::new(0.0, exponent)]
    } else {
        Vec::new()
    };
    integrate(
        |u| {
            let t = start / u;
            f(t) * t / u
        },
        0.0,
        1.0,
        tol,
        &hints,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant() {
        let r = integrate(|_| 1.0, 0.0, 1.0, Tolerance::default(), &[]).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        assert!(r.converged);
        assert!(r.error_estimate >= 0.0);
    }

    #[test]
    fn inverse_sqrt_with_hint() {
        let h = [SingularityHint::new(0.0, -0.5)];
        let r = integrate(|t| t.powf(-0.5), 0.0, 1.0, Tolerance::default(), &h).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
    }

    #[test]
    fn right_endpoint_hint() {
        // ∫₀¹ (1 − t)^{1/3} dt = 3/4
        let h = [SingularityHint::new(1.0, 1.0 / 3.0)];
        let r = integrate(|t| (1.0 - t).cbrt(), 0.0, 1.0, Tolerance::new(1e-13, 1e-13), &h).unwrap();
        assert!((r.value - 0.75).abs() < 1e-12);
    }

    #[test]
    fn interior_hint() {
        // ∫_{-1}^{1} |t|^{-1/2} dt = 4
        let h = [SingularityHint::new(0.0, -0.5)];
        let r = integrate(|t| t.abs().powf(-0.5), -1.0, 1.0, Tolerance::new(1e-12, 1e-12), &h).unwrap();
        assert!((r.value - 4.0).abs() < 1e-11);
    }

    #[test]
    fn rejects_bad_input() {
        let f = |t: f64| t;
        assert!(matches!(
            integrate(f, 0.0, 1.0, Tolerance::default(), &[SingularityHint::new(0.0, -1.0)]),
            Err(QuadError::NonIntegrable { .. })
        ));
        assert!(matches!(
            integrate(f, 1.0, 0.0, Tolerance::default(), &[]),
            Err(QuadError::InvalidInput(_))
        ));
        assert!(matches!(
            integrate(f, 0.0, 1.0, Tolerance::new(0.0, 0.0), &[]),
            Err(QuadError::InvalidInput(_))
        ));
        assert!(matches!(
            integrate(f, 0.0, 1.0, Tolerance::default(), &[SingularityHint::new(2.0, 0.5)]),
            Err(QuadError::InvalidInput(_))
        ));
    }

    #[test]
    fn non_convergent_reports_partial() {
        // 1/t is not integrable and no hint is supplied
        let r = integrate(|t| 1.0 / t, 0.0, 1.0, Tolerance::new(1e-12, 1e-12), &[]);
        match r {
            Err(QuadError::NonConvergent { value, error_estimate, evaluations }) => {
                assert!(value > 10.0);
                assert!(error_estimate > 0.0);
                assert!(evaluations > 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gaussian_half_line_rational_map() {
        let r = integrate_semiinfinite(
            |t| (-t * t).exp(),
            Symmetry::Even,
            Tail::RationalMap,
            Tolerance::default(),
            &[],
        )
        .unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-10);
        let half = integrate(
            |u: f64| {
                let t = u / (1.0 - u);
                (-t * t).exp() / ((1.0 - u) * (1.0 - u))
            },
            0.0,
            1.0,
            Tolerance::default(),
            &[],
        )
        .unwrap();
        assert!((half.value - 0.886_226_925_452_758).abs() < 1e-10);
    }

    #[test]
    fn gaussian_full_line_truncated() {
        let r = integrate_semiinfinite(
            |t| (-t * t).exp(),
            Symmetry::Even,
            Tail::Truncate { upper: 10.0 },
            Tolerance::default(),
            &[],
        )
        .unwrap();
        assert!((r.value - 1.772_453_850_905_516).abs() < 1e-10);
    }

    #[test]
    fn odd_is_zero_without_evaluation() {
        let r = integrate_semiinfinite(
            |_| panic!("must not be called"),
            Symmetry::Odd,
            Tail::RationalMap,
            Tolerance::default(),
            &[],
        )
        .unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.evaluations, 0);
    }

    #[test]
    fn tail_integral() {
        // ∫₁^∞ t^{-1.5} dt = 2
        let r = integrate_tail(|t| t.powf(-1.5), 1.0, 1.5, Tolerance::new(1e-13, 1e-13)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(integrate_tail(|t| 1.0 / t, 1.0, 1.0, Tolerance::default()).is_err());
    }

    #[test]
    fn envelope_cutoff_value() {
        let k = envelope_cutoff(2.0, 1e-18);
        assert!(((-0.5 * k * k).exp() - 1e-18).abs() < 1e-30);
    }

    #[test]
    fn pairwise_sum_matches() {
        let v: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 5050.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}
