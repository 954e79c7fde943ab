//! Bracketed scalar minimization.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for a minimum of `f` on `[a, b]`, stopping when the
/// bracket is narrower than `rel_tol` times its midpoint. The result is the
/// best point evaluated, with ties going to the smaller `x`. Works on
/// non-smooth (step-like) objectives; it then returns a local minimum.
pub fn golden_section_min<F>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a < b) || !(rel_tol > 0.0) {
        return Err(Error::NotBracketed(format!("empty interval [{a}, {b}]")));
    }
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut evaluations = 2;
    let mut best = pick((x1, f1), (x2, f2));

    while hi - lo > rel_tol * 0.5 * (hi + lo).abs() && evaluations < 200 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
            best = pick(best, (x1, f1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
            best = pick(best, (x2, f2));
        }
        evaluations += 1;
    }
    Ok(Minimum {
        x: best.0,
        value: best.1,
        evaluations,
    })
}

fn pick(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
        b
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_minimum() {
        let m = golden_section_min(|x| Ok((x - 3.2).powi(2) + 1.0), 0.0, 10.0, 1e-9).unwrap();
        assert!((m.x - 3.2).abs() < 1e-6);
        assert!((m.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn handles_steps() {
        let f = |x: f64| Ok((x - 5.0).abs().floor());
        let m = golden_section_min(f, 0.0, 9.0, 1e-6).unwrap();
        assert_eq!(m.value, 0.0);
        assert!((m.x - 5.0).abs() < 1.0);
    }

    #[test]
    fn rejects_empty_interval() {
        assert!(golden_section_min(Ok, 1.0, 1.0, 1e-3).is_err());
    }
}
