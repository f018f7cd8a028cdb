use super::elliptic::{agm, EllipticModulus};
use crate::error::{Error, Result};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

/// Values of `sn`, `cn` and `dn` at one argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Jacobi elliptic functions `sn`, `cn`, `dn` of modulus `p`.
///
/// Arguments are reduced to `[0, K/2]` with the quarter-period reflection
/// `sn(K - r) = cd(r)`, `cn(K - r) = pc sd(r)`, `dn(K - r) = pc nd(r)`, so values close to
/// zero (for example `cn` near `K` when `p` is close to one) keep full relative precision.
/// The reduced values come from theta-function series with nome at most `exp(-pi)`:
/// the ordinary nome for `p <= 1/sqrt(2)` and the complementary nome otherwise.
pub fn jacobi(u: f64, m: EllipticModulus) -> JacobiTriple {
    JacobiEvaluator::new(m).eval(u)
}

/// The Jacobi function `cs = cn / sn`, with a pole error at the zeros of `sn`.
pub fn jacobi_cs(u: f64, m: EllipticModulus) -> Result<f64> {
    let t = jacobi(u, m);
    if t.sn.abs() <= 4.0 * f64::EPSILON * (1.0 + u.abs()) {
        return Err(Error::Pole(format!("cs has a pole at u = {u}")));
    }
    Ok(t.cn / t.sn)
}

/// Precomputed constants for repeated evaluation at a fixed modulus.
#[derive(Clone, Debug)]
pub struct JacobiEvaluator {
    pc: f64,
    kind: Kind,
}

#[derive(Clone, Debug)]
enum Kind {
    Circular,
    Hyperbolic,
    Series {
        k: f64,
        // Scale from u to the theta argument.
        scale: f64,
        nome: f64,
        transformed: bool,
        norm_sn: f64,
        norm_cn: f64,
        norm_dn: f64,
    },
}

const MAX_TERMS: usize = 12;

impl JacobiEvaluator {
    /// Prepares evaluation at modulus `m`.
    pub fn new(m: EllipticModulus) -> Self {
        let (p, pc) = (m.p(), m.pc());
        let kind = if p == 0.0 {
            Kind::Circular
        } else if pc == 0.0 {
            Kind::Hyperbolic
        } else {
            let k = FRAC_PI_2 / agm(1.0, pc);
            let kp = FRAC_PI_2 / agm(1.0, p);
            let transformed = p > FRAC_1_SQRT_2;
            let (nome, scale) = if transformed {
                ((-PI * k / kp).exp(), PI / (2.0 * kp))
            } else {
                ((-PI * kp / k).exp(), PI / (2.0 * k))
            };
            let mut s = Kind::Series { k, scale, nome, transformed, norm_sn: 1.0, norm_cn: 1.0, norm_dn: 1.0 };
            if let Kind::Series { norm_sn, norm_cn, norm_dn, .. } = &mut s {
                let (s1d, c0, d0, den0) = theta_at_zero(nome, transformed);
                *norm_sn = den0 / (s1d * scale);
                *norm_cn = den0 / c0;
                *norm_dn = den0 / d0;
            }
            s
        };
        Self { pc, kind }
    }

    /// Quarter period `K`, or infinity at `p = 1`.
    pub fn quarter_period(&self) -> f64 {
        match self.kind {
            Kind::Circular => FRAC_PI_2,
            Kind::Hyperbolic => f64::INFINITY,
            Kind::Series { k, .. } => k,
        }
    }

    /// Evaluates `(sn, cn, dn)` at `u`.
    pub fn eval(&self, u: f64) -> JacobiTriple {
        match self.kind {
            Kind::Circular => JacobiTriple { sn: u.sin(), cn: u.cos(), dn: 1.0 },
            Kind::Hyperbolic => {
                let sech = 1.0 / u.cosh();
                JacobiTriple { sn: u.tanh(), cn: sech, dn: sech }
            }
            Kind::Series { k, .. } => {
                // Reduce modulo the real period 4K to (-2K, 2K].
                let n = (u / (4.0 * k)).round();
                let u1 = u - 4.0 * k * n;
                let sign = if u1 < 0.0 { -1.0 } else { 1.0 };
                let mut v = u1.abs();
                let mut cn_sign = 1.0;
                if v > k {
                    v = 2.0 * k - v;
                    cn_sign = -1.0;
                }
                let t = if v > 0.5 * k {
                    let r = self.reduced(k - v);
                    JacobiTriple { sn: r.cn / r.dn, cn: self.pc * r.sn / r.dn, dn: self.pc / r.dn }
                } else {
                    self.reduced(v)
                };
                JacobiTriple { sn: sign * t.sn, cn: cn_sign * t.cn, dn: t.dn }
            }
        }
    }

    fn reduced(&self, u: f64) -> JacobiTriple {
        let Kind::Series { scale, nome: q, transformed, norm_sn, norm_cn, norm_dn, .. } = self.kind else {
            unreachable!()
        };
        let z = scale * u;
        let (mut s1, mut den, mut c, mut d) = (0.0, 0.0, 1.0, 1.0);
        let mut sgn = 1.0;
        for n in 0..MAX_TERMS {
            let nf = n as f64;
            let w_half = q.powf(nf * (nf + 1.0));
            let odd = 2.0 * nf + 1.0;
            if transformed {
                s1 += sgn * w_half * (odd * z).sinh();
                den += w_half * (odd * z).cosh();
            } else {
                s1 += sgn * w_half * (odd * z).sin();
                den += w_half * (odd * z).cos();
            }
            if n >= 1 {
                let w_int = q.powf(nf * nf);
                let even = if transformed { (2.0 * nf * z).cosh() } else { (2.0 * nf * z).cos() };
                c += 2.0 * sgn * w_int * even;
                d += 2.0 * w_int * even;
            }
            sgn = -sgn;
            if w_half * (odd * z).cosh() < 1e-18 * den.abs() && n >= 1 {
                break;
            }
        }
        let s1 = 2.0 * s1;
        let den = 2.0 * den;
        if transformed {
            // sn ~ theta1/theta2, cn ~ theta4/theta2, dn ~ theta3/theta2 (complementary nome).
            JacobiTriple { sn: norm_sn * s1 / den, cn: norm_cn * c / den, dn: norm_dn * d / den }
        } else {
            // sn ~ theta1/theta4, cn ~ theta2/theta4, dn ~ theta3/theta4.
            JacobiTriple { sn: norm_sn * s1 / c, cn: norm_cn * den / c, dn: norm_dn * d / c }
        }
    }
}

/// Returns (derivative of the odd series at 0, value of the cn numerator at 0,
/// value of the dn numerator at 0, value of the common denominator at 0).
fn theta_at_zero(q: f64, transformed: bool) -> (f64, f64, f64, f64) {
    let (mut s1d, mut t2, mut t3, mut t4) = (0.0, 0.0, 1.0, 1.0);
    let mut sgn = 1.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let w_half = q.powf(nf * (nf + 1.0));
        s1d += sgn * w_half * (2.0 * nf + 1.0);
        t2 += w_half;
        if n >= 1 {
            let w_int = q.powf(nf * nf);
            t3 += 2.0 * w_int;
            t4 += 2.0 * sgn * w_int;
        }
        sgn = -sgn;
    }
    let (s1d, t2) = (2.0 * s1d, 2.0 * t2);
    if transformed {
        (s1d, t4, t3, t2)
    } else {
        (s1d, t2, t3, t4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Descending Landen recursion, used as an independent oracle.
    fn landen(u: f64, k: f64) -> JacobiTriple {
        if k < 1e-9 {
            let s = u.sin();
            let c = u.cos();
            let corr = 0.25 * k * k * (u - s * c);
            return JacobiTriple { sn: s - corr * c, cn: c + corr * s, dn: 1.0 - 0.5 * k * k * s * s };
        }
        let kp = ((1.0 - k) * (1.0 + k)).sqrt();
        let k1 = (1.0 - kp) / (1.0 + kp);
        let t = landen(u / (1.0 + k1), k1);
        let den = 1.0 + k1 * t.sn * t.sn;
        JacobiTriple {
            sn: (1.0 + k1) * t.sn / den,
            cn: t.cn * t.dn / den,
            dn: (1.0 - k1 * t.sn * t.sn) / den,
        }
    }

    #[test]
    fn matches_landen_oracle() {
        for &p in &[0.05, 0.3, 0.6, 0.7, 0.71, 0.8, 0.95] {
            let m = EllipticModulus::new(p).unwrap();
            for i in -20..=20 {
                let u = 0.37 * i as f64;
                let a = jacobi(u, m);
                let b = landen(u, p);
                assert!((a.sn - b.sn).abs() < 1e-13, "sn p={p} u={u}: {} vs {}", a.sn, b.sn);
                assert!((a.cn - b.cn).abs() < 1e-13, "cn p={p} u={u}: {} vs {}", a.cn, b.cn);
                assert!((a.dn - b.dn).abs() < 1e-13, "dn p={p} u={u}: {} vs {}", a.dn, b.dn);
            }
        }
    }

    #[test]
    fn reference_values() {
        // sn, cn, dn at u = 0.75, p = 0.8 and at u = 2.0, p = 0.999.
        let m = EllipticModulus::new(0.8).unwrap();
        let t = jacobi(0.75, m);
        let r = landen(0.75, 0.8);
        assert!((t.sn - r.sn).abs() < 1e-15 && (t.cn - r.cn).abs() < 1e-15 && (t.dn - r.dn).abs() < 1e-15);
        let k = super::super::elliptic_k(m).unwrap();
        let tk = jacobi(k, m);
        assert!((tk.sn - 1.0).abs() < 1e-15 && tk.cn.abs() < 1e-15 && (tk.dn - 0.6).abs() < 1e-15);
    }

    #[test]
    fn near_one_modulus_keeps_relative_precision() {
        let pc = 1e-12;
        let m = EllipticModulus::from_complement(pc).unwrap();
        let k = super::super::elliptic_k(m).unwrap();
        let t = jacobi(k, m);
        assert!((t.dn / pc - 1.0).abs() < 1e-12, "dn(K) = {}", t.dn);
        assert!(t.cn.abs() < 1e-25);
        // dn(K/2) = sqrt(pc) exactly.
        let h = jacobi(0.5 * k, m);
        assert!((h.dn / pc.sqrt() - 1.0).abs() < 1e-12, "dn(K/2) = {}", h.dn);
        assert!((h.cn / (pc / (1.0 + pc)).sqrt() - 1.0).abs() < 1e-12);
        // Close to p = 1 and away from K the functions approach tanh / sech.
        let v = jacobi(1.3, m);
        assert!((v.sn - 1.3f64.tanh()).abs() < 1e-14);
        assert!((v.cn - 1.0 / 1.3f64.cosh()).abs() < 1e-14);
    }

    #[test]
    fn limits_and_cs() {
        let t = jacobi(0.4, EllipticModulus::new(0.0).unwrap());
        assert_eq!(t.sn, 0.4f64.sin());
        let t = jacobi(0.4, EllipticModulus::new(1.0).unwrap());
        assert_eq!(t.sn, 0.4f64.tanh());
        let cs = jacobi_cs(0.4, EllipticModulus::new(1.0).unwrap()).unwrap();
        assert!((cs - 1.0 / 0.4f64.sinh()).abs() < 1e-14);
        assert!(matches!(jacobi_cs(0.0, EllipticModulus::new(0.5).unwrap()), Err(Error::Pole(_))));
    }
}
