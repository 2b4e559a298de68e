//! Generalized polynomials in |k| and the Riesz-Feller Hermite family.
//!
//! A [`GeneralizedPolynomial`] is a finite sum `Σ cⱼ |k|^eⱼ` with real
//! exponents, multiplied by an overall `sgn(k)^p`. All algebra is carried out
//! on the half-line `k > 0`; the parity flag restores the full-line function.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::levy::LevyIndex;
use crate::quad::{self, SingularityHint, Tolerance};

/// Exponents closer than this are the same exponent.
const EXPONENT_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub exponent: f64,
}

impl Term {
    pub fn new(coeff: f64, exponent: f64) -> Self {
        Self { coeff, exponent }
    }
}

/// `sgn(k)^parity · Σ coeff·|k|^exponent`, terms in strictly decreasing
/// exponent order with nonzero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedPolynomial {
    terms: Vec<Term>,
    parity: u8,
}

fn same_exponent(a: f64, b: f64) -> bool {
    (a - b).abs() <= EXPONENT_EPS * a.abs().max(b.abs()).max(1.0)
}

fn canonicalize(mut terms: Vec<Term>) -> Vec<Term> {
    terms.retain(|t| t.coeff != 0.0);
    terms.sort_by(|a, b| b.exponent.total_cmp(&a.exponent));
    let mut out: Vec<Term> = Vec::with_capacity(terms.len());
    let mut magnitude: Vec<f64> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if same_exponent(last.exponent, t.exponent) => {
                last.coeff += t.coeff;
                *magnitude.last_mut().unwrap() += t.coeff.abs();
            }
            _ => {
                out.push(t);
                magnitude.push(t.coeff.abs());
            }
        }
    }
    // sums that cancel to round-off are exact zeros of the underlying algebra
    out.into_iter()
        .zip(magnitude)
        .filter(|(t, m)| t.coeff.abs() > 8.0 * f64::EPSILON * m)
        .map(|(t, _)| t)
        .collect()
}

impl GeneralizedPolynomial {
    pub fn from_terms(terms: impl IntoIterator<Item = Term>, parity: u8) -> Self {
        Self {
            terms: canonicalize(terms.into_iter().collect()),
            parity: parity % 2,
        }
    }

    pub fn zero(parity: u8) -> Self {
        Self { terms: Vec::new(), parity: parity % 2 }
    }

    pub fn one() -> Self {
        Self::monomial(1.0, 0.0, 0)
    }

    pub fn monomial(coeff: f64, exponent: f64, parity: u8) -> Self {
        Self::from_terms([Term::new(coeff, exponent)], parity)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_exponent(&self) -> Option<f64> {
        self.terms.first().map(|t| t.exponent)
    }

    pub fn min_exponent(&self) -> Option<f64> {
        self.terms.last().map(|t| t.exponent)
    }

    /// Coefficient of the term with the given exponent, zero if absent.
    pub fn coeff_of(&self, exponent: f64) -> f64 {
        self.terms
            .iter()
            .find(|t| same_exponent(t.exponent, exponent))
            .map_or(0.0, |t| t.coeff)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_terms(
            self.terms.iter().map(|t| Term::new(c * t.coeff, t.exponent)),
            self.parity,
        )
    }

    /// Multiply by `coeff · sgn(k)^parity · |k|^exponent`.
    pub fn mul_monomial(&self, coeff: f64, exponent: f64, parity: u8) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| Term::new(coeff * t.coeff, t.exponent + exponent)),
            self.parity + parity,
        )
    }

    /// Power-rule derivative on `k > 0`; flips the parity.
    pub fn differentiate(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|t| !same_exponent(t.exponent, 0.0))
                .map(|t| Term::new(t.coeff * t.exponent, t.exponent - 1.0)),
            self.parity + 1,
        )
    }

    /// `Σ c·k^e` for `k > 0`.
    pub fn eval_abs(&self, k: f64) -> f64 {
        debug_assert!(k > 0.0);
        let lnk = k.ln();
        self.terms
            .iter()
            .map(|t| t.coeff * (t.exponent * lnk).exp())
            .sum()
    }

    /// Full-line value at `k ≠ 0`.
    pub fn eval(&self, k: f64) -> f64 {
        let v = self.eval_abs(k.abs());
        if k < 0.0 && self.parity == 1 {
            -v
        } else {
            v
        }
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        assert_eq!(
            self.parity, other.parity,
            "adding generalized polynomials of different parity"
        );
        Self::from_terms(
            self.terms.iter().copied().chain(
                other
                    .terms
                    .iter()
                    .map(|t| Term::new(sign * t.coeff, t.exponent)),
            ),
            self.parity,
        )
    }
}

impl Add for &GeneralizedPolynomial {
    type Output = GeneralizedPolynomial;
    fn add(self, rhs: Self) -> GeneralizedPolynomial {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &GeneralizedPolynomial {
    type Output = GeneralizedPolynomial;
    fn sub(self, rhs: Self) -> GeneralizedPolynomial {
        self.combine(rhs, -1.0)
    }
}

impl Neg for &GeneralizedPolynomial {
    type Output = GeneralizedPolynomial;
    fn neg(self) -> GeneralizedPolynomial {
        self.scale(-1.0)
    }
}

impl Mul for &GeneralizedPolynomial {
    type Output = GeneralizedPolynomial;
    fn mul(self, rhs: Self) -> GeneralizedPolynomial {
        let mut terms = Vec::with_capacity(self.len() * rhs.len());
        for a in &self.terms {
            for b in &rhs.terms {
                terms.push(Term::new(a.coeff * b.coeff, a.exponent + b.exponent));
            }
        }
        GeneralizedPolynomial::from_terms(terms, self.parity + rhs.parity)
    }
}

/// Riesz-Feller Hermite polynomial H̃ₙ via the ladder recurrence
/// `H̃ₙ₊₁ = 2 sgn(k)|k|^{α/2} H̃ₙ − H̃ₙ′`.
pub fn hermite_tilde(n: u32, alpha: f64) -> Result<GeneralizedPolynomial> {
    Ok(hermite_tilde_at(n, LevyIndex::new(alpha)?))
}

pub(crate) fn hermite_tilde_at(n: u32, alpha: LevyIndex) -> GeneralizedPolynomial {
    let half = alpha.half();
    let mut h = GeneralizedPolynomial::one();
    for _ in 0..n {
        let raised = h.mul_monomial(2.0, half, 1);
        h = &raised - &h.differentiate();
    }
    h
}

/// Independent construction of H̃ₙ from the Rodrigues-type formula
/// `H̃ₙ = (−1)ⁿ sgn(k)ⁿ e^{g} dⁿ/dkⁿ e^{−g}`, `g = 2|k|^{α/2+1}/(α/2+1)`.
///
/// The n-th derivative of `e^{−g}` is expanded with complete Bell
/// polynomials in the derivatives of `−g`, so no ladder step is shared with
/// [`hermite_tilde`].
pub fn rodrigues_oracle(n: u32, alpha: f64) -> Result<GeneralizedPolynomial> {
    let alpha = LevyIndex::new(alpha)?;
    let half = alpha.half();
    let n = n as usize;

    // x[j] = -g^{(j)}; g^{(j)} = 2 (α/2)(α/2 − 1)…(α/2 − j + 2) |k|^{α/2 − j + 1}
    let mut x = vec![GeneralizedPolynomial::zero(0)];
    let mut falling = 1.0;
    for j in 1..=n {
        if j >= 2 {
            falling *= half - (j as f64 - 2.0);
        }
        x.push(GeneralizedPolynomial::monomial(
            -2.0 * falling,
            half - j as f64 + 1.0,
            (j % 2) as u8,
        ));
    }

    let mut bell = vec![GeneralizedPolynomial::one()];
    for m in 0..n {
        let mut next = GeneralizedPolynomial::zero(((m + 1) % 2) as u8);
        let mut binom = 1.0;
        for i in 0..=m {
            let term = &bell[m - i] * &x[i + 1];
            next = &next + &term.scale(binom);
            binom = binom * (m - i) as f64 / (i + 1) as f64;
        }
        bell.push(next);
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(bell[n].scale(sign))
}

/// Momentum-space eigenstate `φₙ(k) = (−i)ⁿ H̃ₙ(k) exp(−2|k|^{α/2+1}/(α+2))`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumState {
    n: u32,
    alpha: LevyIndex,
    poly: GeneralizedPolynomial,
    norm: Option<f64>,
    cutoff: Option<f64>,
}

pub fn momentum_state(n: u32, alpha: f64) -> Result<MomentumState> {
    Ok(MomentumState::new(n, LevyIndex::new(alpha)?))
}

impl MomentumState {
    pub fn new(n: u32, alpha: LevyIndex) -> Self {
        Self {
            n,
            alpha,
            poly: hermite_tilde_at(n, alpha),
            norm: None,
            cutoff: None,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn alpha(&self) -> LevyIndex {
        self.alpha
    }

    pub fn poly(&self) -> &GeneralizedPolynomial {
        &self.poly
    }

    pub fn decay_exponent(&self) -> f64 {
        self.alpha.decay_exponent()
    }

    pub fn decay_rate(&self) -> f64 {
        self.alpha.decay_rate()
    }

    /// Scale factor applied by [`MomentumState::normalized`].
    pub fn norm(&self) -> Option<f64> {
        self.norm
    }

    pub fn cutoff(&self) -> Option<f64> {
        self.cutoff
    }

    /// Odd states carry an imaginary global factor.
    pub fn imaginary_flag(&self) -> bool {
        self.n % 2 == 1
    }

    /// Global phase `(−i)ⁿ`.
    pub fn phase(&self) -> Complex64 {
        match self.n % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, -1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, 1.0),
        }
    }

    pub fn min_exponent(&self) -> f64 {
        self.poly.min_exponent().unwrap_or(0.0)
    }

    /// `|φ|² ~ |k|^{density_exponent}` at the origin.
    pub fn density_exponent(&self) -> f64 {
        2.0 * self.min_exponent()
    }

    pub fn is_normalizable(&self) -> bool {
        self.cutoff.is_some() || self.density_exponent() > -1.0
    }

    pub fn require_normalizable(&self) -> Result<()> {
        if self.is_normalizable() {
            Ok(())
        } else {
            Err(Error::NonNormalizable {
                n: self.n,
                alpha: self.alpha.value(),
                exponent: self.density_exponent(),
            })
        }
    }

    /// Excise `|k| < eps`. Used to regularize states whose density is not
    /// integrable at the origin; every consumer reports the cutoff.
    pub fn with_cutoff(mut self, eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "regularization epsilon must be positive, got {eps}"
            )));
        }
        self.cutoff = Some(eps);
        self.norm = None;
        Ok(self)
    }

    /// `exp(−2|k|^{α/2+1}/(α+2))` at `|k|`.
    pub fn envelope(&self, k_abs: f64) -> f64 {
        (-self.decay_rate() * k_abs.powf(self.decay_exponent())).exp()
    }

    /// `|k|` beyond which the envelope drops below `threshold`.
    pub fn envelope_cutoff(&self, threshold: f64) -> f64 {
        (-threshold.ln() / self.decay_rate()).powf(1.0 / self.decay_exponent())
    }

    fn scale(&self) -> f64 {
        self.norm.unwrap_or(1.0)
    }

    /// Real amplitude without the global phase, `k > 0`.
    pub(crate) fn radial(&self, k: f64) -> f64 {
        if self.cutoff.is_some_and(|eps| k < eps) {
            return 0.0;
        }
        self.scale() * self.poly.eval_abs(k) * self.envelope(k)
    }

    /// Real amplitude without the global phase, `sgn(k)^p · radial(|k|)`.
    pub fn amplitude(&self, k: f64) -> Result<f64> {
        if k == 0.0 {
            return self.amplitude_at_origin();
        }
        let v = self.radial(k.abs());
        Ok(if k < 0.0 && self.poly.parity() == 1 { -v } else { v })
    }

    fn amplitude_at_origin(&self) -> Result<f64> {
        if self.cutoff.is_some() || self.poly.is_empty() {
            return Ok(0.0);
        }
        let e = self.min_exponent();
        if same_exponent(e, 0.0) {
            if self.poly.parity() == 1 {
                Ok(0.0)
            } else {
                Ok(self.scale() * self.poly.coeff_of(0.0))
            }
        } else if e > 0.0 {
            Ok(0.0)
        } else {
            Err(Error::SingularPoint { k: 0.0 })
        }
    }

    /// Pointwise value `φₙ(k)`.
    pub fn evaluate(&self, k: f64) -> Result<Complex64> {
        Ok(self.phase() * self.amplitude(k)?)
    }

    /// `∫|φ|² dk` over the whole line.
    pub fn mass(&self, tol: Tolerance) -> Result<f64> {
        self.require_normalizable()?;
        let upper = self.envelope_cutoff(1e-18);
        let (lower, hints) = match self.cutoff {
            Some(eps) => (eps.min(upper), Vec::new()),
            None => (0.0, origin_hint(self.density_exponent())),
        };
        let r = quad::integrate(
            |k| {
                let v = self.radial(k);
                v * v
            },
            lower,
            upper,
            tol,
            &hints,
        )?;
        Ok(2.0 * r.value)
    }

    /// Copy scaled so that `∫|φ|² dk = 1`.
    pub fn normalized(&self) -> Result<Self> {
        let mut raw = self.clone();
        raw.norm = None;
        let mass = raw.mass(Tolerance::default())?;
        raw.norm = Some(1.0 / mass.sqrt());
        Ok(raw)
    }
}

/// Hint for an integrand `~ k^exponent` at the origin, unless it is smooth there.
pub(crate) fn origin_hint(exponent: f64) -> Vec<SingularityHint> {
    let smooth = exponent >= 0.0 && (exponent - exponent.round()).abs() < 1e-12;
    if !smooth {
        vec![SingularityHint::new(0.0, exponent)]
    } else {
        Vec::new()
    }
}
