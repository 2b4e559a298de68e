//! Closed-form fractional oscillator spectrum and its semiclassical check.

use crate::error::{Error, Result};
use crate::levy::LevyIndex;
use crate::quad::{self, SingularityHint, Tolerance};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(z)` for `z > 0`.
pub fn log_gamma(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::InvalidArgument(format!("log_gamma needs z > 0, got {z}")));
    }
    Ok(ln_gamma(z))
}

fn ln_gamma(z: f64) -> f64 {
    use std::f64::consts::PI;
    if z < 0.5 {
        // reflection
        return (PI / (PI * z).sin()).ln() - ln_gamma(1.0 - z);
    }
    if z == 1.0 || z == 2.0 {
        return 0.0;
    }
    let z = z - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// `Γ(z)` for `z > 0`.
pub fn gamma(z: f64) -> Result<f64> {
    Ok(log_gamma(z)?.exp())
}

/// Euler Beta function `B(a, b)`.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    Ok((log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?).exp())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Units {
    pub hbar: f64,
    pub m: f64,
    pub omega: f64,
}

impl Units {
    pub fn new(hbar: f64, m: f64, omega: f64) -> Result<Self> {
        if [hbar, m, omega].iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(Self { hbar, m, omega })
        } else {
            Err(Error::InvalidArgument(format!(
                "units must be positive, got ħ={hbar}, m={m}, ω={omega}"
            )))
        }
    }
}

impl Default for Units {
    fn default() -> Self {
        Self { hbar: 1.0, m: 1.0, omega: 1.0 }
    }
}

/// Semiclassical energy of level `n`, valid for `1 ≤ α ≤ 2`.
pub fn energy_level(n: u32, alpha: f64, units: &Units) -> Result<f64> {
    let a = LevyIndex::inclusive(alpha)?.value();
    let Units { hbar, m, omega } = *units;
    let b = beta(0.5, 1.0 / a + 1.0)?;
    let base = std::f64::consts::PI * hbar * omega * (n as f64 + 0.5)
        / (2f64.powf(0.5 + 1.0 / a) * m.powf(1.0 / a - 0.5) * b);
    Ok(base.powf(2.0 * a / (2.0 + a)))
}

/// `∮ p dx = 4∫₀^{x_tp} (2mE − m²ω²x²)^{1/α} dx`.
pub fn action_integral(energy: f64, alpha: f64, units: &Units) -> Result<f64> {
    let a = LevyIndex::inclusive(alpha)?.value();
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::InvalidArgument(format!("energy must be positive, got {energy}")));
    }
    let Units { m, omega, .. } = *units;
    let x_tp = (2.0 * energy / m).sqrt() / omega;
    let mw2 = m * m * omega * omega;
    // y = x_tp − x keeps the zero at the turning point free of cancellation
    let r = quad::integrate(
        |y| (mw2 * y * (2.0 * x_tp - y)).powf(1.0 / a),
        0.0,
        x_tp,
        Tolerance::new(0.0, 1e-13),
        &[SingularityHint::new(0.0, 1.0 / a)],
    )?;
    Ok(4.0 * r.value)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub n: u32,
    pub alpha: f64,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumTable {
    pub entries: Vec<SpectrumEntry>,
    pub units: Units,
}

impl SpectrumTable {
    /// Entries ordered by `(α, n)` as given.
    pub fn compute(ns: &[u32], alphas: &[f64], units: Units) -> Result<Self> {
        let mut entries = Vec::with_capacity(ns.len() * alphas.len());
        for &alpha in alphas {
            for &n in ns {
                entries.push(SpectrumEntry { n, alpha, energy: energy_level(n, alpha, &units)? });
            }
        }
        Ok(Self { entries, units })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn log_gamma_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert!((log_gamma(0.5).unwrap() - 0.572_364_942_924_700_1).abs() < 1e-14);
        let g35 = 2.5 * 1.5 * 0.5 * PI.sqrt();
        assert!((log_gamma(3.5).unwrap() - g35.ln()).abs() < 1e-14);
        assert!((log_gamma(11.0).unwrap() - 3_628_800f64.ln()).abs() < 1e-13 * 15.1);
        assert!((gamma(0.1).unwrap() - 9.513_507_698_668_732).abs() < 1e-12);
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
    }

    #[test]
    fn beta_values() {
        assert!((beta(0.5, 1.5).unwrap() - PI / 2.0).abs() < 1e-14);
        assert!((beta(0.5, 2.0).unwrap() - 4.0 / 3.0).abs() < 1e-14);
        assert!((beta(1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(beta(0.0, 1.0).is_err());
    }

    #[test]
    fn energy_examples() {
        let u = Units::default();
        assert!((energy_level(0, 2.0, &u).unwrap() - 0.5).abs() < 1e-15);
        assert!((energy_level(1, 2.0, &u).unwrap() - 1.5).abs() < 1e-15);
        // (3π/(16√2))^{2/3}
        let e01 = (3.0 * PI / (16.0 * 2f64.sqrt())).powf(2.0 / 3.0);
        assert!((energy_level(0, 1.0, &u).unwrap() - e01).abs() < 1e-14);
        assert!((e01 - 0.5578).abs() < 1e-4);
        assert!(energy_level(0, 0.9, &u).is_err());
        assert!(energy_level(0, 2.1, &u).is_err());
    }

    #[test]
    fn units_scale_at_two() {
        let u = Units::new(2.0, 3.0, 5.0).unwrap();
        assert!((energy_level(3, 2.0, &u).unwrap() - 2.0 * 5.0 * 3.5).abs() < 1e-12);
        assert!(Units::new(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn action_examples() {
        let u = Units::default();
        assert!((action_integral(0.5, 2.0, &u).unwrap() - PI).abs() < 1e-11);
        assert!((action_integral(1.5, 2.0, &u).unwrap() - 3.0 * PI).abs() < 1e-11);
        let e = energy_level(0, 1.5, &u).unwrap();
        assert!((action_integral(e, 1.5, &u).unwrap() - PI).abs() < 1e-10);
    }

    #[test]
    fn table_order() {
        let t = SpectrumTable::compute(&[0, 1], &[1.5, 2.0], Units::default()).unwrap();
        let keys: Vec<(f64, u32)> = t.entries.iter().map(|e| (e.alpha, e.n)).collect();
        assert_eq!(keys, vec![(1.5, 0), (1.5, 1), (2.0, 0), (2.0, 1)]);
    }
}
