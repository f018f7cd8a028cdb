use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Elliptic modulus `p` stored together with its complement `pc = sqrt(1 - p^2)`.
///
/// Both numbers are kept because moduli extremely close to one are common in the
/// stationary-state problem: `pc` then carries all significant digits while `p`
/// rounds to `1.0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipticModulus {
    p: f64,
    pc: f64,
}

impl EllipticModulus {
    /// Builds the modulus from `p` in `[0, 1]`.
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("elliptic modulus must lie in [0, 1], got {p}")));
        }
        Ok(Self { p, pc: ((1.0 - p) * (1.0 + p)).sqrt() })
    }

    /// Builds the modulus from the complementary modulus `pc` in `[0, 1]`.
    pub fn from_complement(pc: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&pc) {
            return Err(Error::Domain(format!("complementary modulus must lie in [0, 1], got {pc}")));
        }
        Ok(Self { p: ((1.0 - pc) * (1.0 + pc)).sqrt(), pc })
    }

    /// The modulus `p`.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// The complementary modulus `sqrt(1 - p^2)`.
    pub fn pc(&self) -> f64 {
        self.pc
    }

    /// The complementary modulus as an `EllipticModulus`.
    pub fn complement(&self) -> Self {
        Self { p: self.pc, pc: self.p }
    }
}

pub(crate) fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 2.0 * f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind `K(p)` in the modulus convention,
/// `K(p) = int_0^{pi/2} dtheta / sqrt(1 - p^2 sin^2 theta)`.
///
/// Diverges at `p = 1`.
pub fn elliptic_k(m: EllipticModulus) -> Result<f64> {
    if m.pc == 0.0 {
        return Err(Error::Divergent("K(p) diverges at p = 1".into()));
    }
    Ok(FRAC_PI_2 / agm(1.0, m.pc))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k_quadrature(p: f64) -> f64 {
        // Composite Simpson in the variable t with theta = pi/2 * (1 - (1 - t)^2), which
        // removes the square-root behaviour at theta = pi/2 for p close to one.
        let n = 200_000;
        let h = 1.0 / n as f64;
        let f = |t: f64| {
            let th = FRAC_PI_2 * (1.0 - (1.0 - t) * (1.0 - t));
            let dth = FRAC_PI_2 * 2.0 * (1.0 - t);
            dth / (1.0 - p * p * th.sin().powi(2)).sqrt()
        };
        let mut s = f(0.0) + f(1.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn k_matches_quadrature() {
        for &p in &[0.0, 0.1, 0.5, 0.75, 0.9, 0.99] {
            let k = elliptic_k(EllipticModulus::new(p).unwrap()).unwrap();
            let r = k_quadrature(p);
            assert!((k - r).abs() <= 1e-10 * r, "p={p} k={k} r={r}");
        }
    }

    #[test]
    fn k_near_one_uses_complement() {
        let pc = 1e-12;
        let k = elliptic_k(EllipticModulus::from_complement(pc).unwrap()).unwrap();
        let asym = (4.0 / pc).ln();
        assert!((k - asym).abs() < 1e-20_f64.max(1e-12 * asym));
        assert!(matches!(elliptic_k(EllipticModulus::new(1.0).unwrap()), Err(Error::Divergent(_))));
        assert!(EllipticModulus::new(1.5).is_err());
        assert_eq!(elliptic_k(EllipticModulus::new(0.0).unwrap()).unwrap(), FRAC_PI_2);
    }
}
