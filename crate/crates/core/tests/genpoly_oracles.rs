use fracinfo::{hermite_tilde, momentum_state, rodrigues_oracle, GeneralizedPolynomial, Term};
use proptest::prelude::*;

fn coeff_gap(a: &GeneralizedPolynomial, b: &GeneralizedPolynomial) -> f64 {
    a.terms()
        .iter()
        .chain(b.terms())
        .map(|t| (a.coeff_of(t.exponent) - b.coeff_of(t.exponent)).abs() / a.coeff_of(t.exponent).abs().max(1.0))
        .fold(0.0, f64::max)
}

/// Physicists' Hermite coefficients from the three-term recurrence.
fn hermite_coeffs(n: usize) -> Vec<f64> {
    let (mut prev, mut cur) = (vec![1.0], vec![0.0, 2.0]);
    if n == 0 {
        return prev;
    }
    for m in 1..n {
        let mut next = vec![0.0; m + 2];
        for (p, c) in cur.iter().enumerate() {
            next[p + 1] += 2.0 * c;
        }
        for (p, c) in prev.iter().enumerate() {
            next[p] -= 2.0 * m as f64 * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

#[test]
fn reduces_to_classical_hermite() {
    for n in 0..=10 {
        let h = hermite_tilde(n as u32, 2.0).unwrap();
        let want = hermite_coeffs(n);
        for (p, c) in want.iter().enumerate() {
            assert_eq!(h.coeff_of(p as f64), *c, "n={n} power {p}");
        }
        assert_eq!(h.len(), want.iter().filter(|c| **c != 0.0).count());
        assert!(h.terms().iter().all(|t: &Term| t.exponent.fract() == 0.0));
    }
}

#[test]
fn leading_coefficient_is_power_of_two() {
    for n in 0..=8 {
        let h = hermite_tilde(n, 1.5).unwrap();
        let top = h.max_exponent().unwrap();
        assert!((top - 0.75 * n as f64).abs() < 1e-12);
        assert_eq!(h.coeff_of(top), 2f64.powi(n as i32));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recurrence_matches_rodrigues(alpha in 1.0001f64..=2.0, n in 0u32..=8) {
        let rec = hermite_tilde(n, alpha).unwrap();
        let rod = rodrigues_oracle(n, alpha).unwrap();
        prop_assert!(coeff_gap(&rec, &rod) < 1e-10);
    }

    #[test]
    fn density_is_even(alpha in 1.0001f64..=2.0, n in 0u32..=6, k in 0.01f64..6.0) {
        let s = momentum_state(n, alpha).unwrap();
        let (p, m) = (s.evaluate(k).unwrap(), s.evaluate(-k).unwrap());
        prop_assert!((p.norm_sqr() - m.norm_sqr()).abs() <= 1e-13 * p.norm_sqr().max(1e-300));
        // amplitude parity follows n
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((s.amplitude(-k).unwrap() - sign * s.amplitude(k).unwrap()).abs() <= 1e-13 * s.amplitude(k).unwrap().abs());
    }

    #[test]
    fn exponents_lie_on_half_alpha_lattice(alpha in 1.0001f64..=2.0, n in 0u32..=8) {
        // every exponent is jα/2 − m with j + m ≤ n
        let h = hermite_tilde(n, alpha).unwrap();
        for t in h.terms() {
            let found = (0..=n).any(|j| (0..=n - j).any(|m| (t.exponent - (j as f64 * alpha / 2.0 - m as f64)).abs() < 1e-9));
            prop_assert!(found, "exponent {}", t.exponent);
        }
    }
}
