//! Lambert W, the complete elliptic integral, Jacobi functions and Fresnel integrals.
use winter_nls::specfun::{elliptic_k, fresnel, jacobi, jacobi_cs, lambert_w0, lambert_wm1, EllipticModulus};

fn main() -> winter_nls::Result<()> {
    for x in [-0.3, 0.5, 10.0] {
        let w = lambert_w0(x)?;
        println!("W0({x}) = {w:.17e}  residual {:.1e}", w * w.exp() - x);
    }
    println!("W-1(-0.1) = {:.17e}", lambert_wm1(-0.1)?);

    let m = EllipticModulus::new(0.8)?;
    let k = elliptic_k(m)?;
    println!("K(0.8) = {k:.17e}");
    for u in [0.3, k, 2.0 * k] {
        let s = jacobi(u, m);
        println!(
            "u = {u:.6}: sn {:.12} cn {:.12} dn {:.12}  sn^2+cn^2-1 = {:.1e}",
            s.sn,
            s.cn,
            s.dn,
            s.sn * s.sn + s.cn * s.cn - 1.0
        );
    }
    println!("cs(0.3 | 0.8) = {:.12}", jacobi_cs(0.3, m)?);

    let (c, s) = fresnel(1.5);
    println!("C(1.5) = {c:.15}, S(1.5) = {s:.15}");
    Ok(())
}
