//! Jensen-Shannon divergence between discretized densities.

use crate::error::{domain, Error, Result};
use crate::real::Real;

fn check_normalized<T: Real>(p: &[T]) -> Result<()> {
    let total = p.iter().fold(T::zero(), |acc, &v| acc + v);
    let slack = T::lit(1e-6).max(T::lit(1000.0) * T::epsilon());
    if p.iter().any(|&v| v < T::zero() || !v.is_finite()) {
        return Err(domain("js_divergence", "masses must be finite and nonnegative"));
    }
    if (total - T::one()).abs() > slack {
        return Err(Error::Unnormalized {
            mass: total.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// JS(p, q) in nats for probability vectors on a common grid; lies in
/// `[0, ln 2]`.
pub fn js_divergence<T: Real>(p: &[T], q: &[T]) -> Result<T> {
    if p.len() != q.len() || p.is_empty() {
        return Err(domain(
            "js_divergence",
            format!("grids differ in length ({} vs {})", p.len(), q.len()),
        ));
    }
    check_normalized(p)?;
    check_normalized(q)?;
    let half = T::lit(0.5);
    let term = |a: T, m: T| if a > T::zero() { a * (a / m).ln() } else { T::zero() };
    let mut acc = T::zero();
    for (&a, &b) in p.iter().zip(q) {
        let m = half * (a + b);
        acc = acc + half * (term(a, m) + term(b, m));
    }
    Ok(acc.max(T::zero()).min(T::LN_2()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_disjoint_and_unnormalized() {
        let p = [0.2, 0.3, 0.5, 0.0];
        assert_eq!(js_divergence(&p, &p).unwrap(), 0.0);
        let a = [0.5f64, 0.5, 0.0, 0.0];
        let b = [0.0f64, 0.0, 0.25, 0.75];
        assert!((js_divergence(&a, &b).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(matches!(
            js_divergence(&[0.5, 0.6], &[0.5, 0.5]),
            Err(Error::Unnormalized { .. })
        ));
        let af = [0.5f32, 0.5, 0.0];
        let bf = [0.0f32, 0.0, 1.0];
        assert!((js_divergence(&af, &bf).unwrap() - std::f32::consts::LN_2).abs() < 1e-6);
    }
}
