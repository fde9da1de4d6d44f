//! Trigonometric R-matrix, its twisted form, and Yang–Baxter checks.

use serde::{Deserialize, Serialize};

use crate::error::{nonzero, Error, Result};
use crate::linalg::{c, kron, rel_residual, CMatrix, C64, ONE, ZERO};

/// Principal square root, used for every `q^{1/2}` and `t^{1/2}`.
#[inline]
pub fn sqrt(z: C64) -> C64 {
    z.sqrt()
}

/// `q^{1/2} − q^{−1/2}`.
pub fn c_tilde(q: C64) -> C64 {
    let s = sqrt(q);
    s - s.inv()
}

/// `q^{1/2} + q^{−1/2}`.
pub fn q_bar(q: C64) -> C64 {
    let s = sqrt(q);
    s + s.inv()
}

pub fn weight_a(u: C64, q: C64) -> C64 {
    let s = sqrt(q);
    s * u - (s * u).inv()
}

pub fn weight_b(u: C64) -> C64 {
    u - u.inv()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RMatrix {
    pub q: C64,
    pub t: C64,
    pub u: C64,
    pub matrix: CMatrix,
}

/// Raw 4×4 twisted R-matrix without argument validation.
pub fn r_matrix(u: C64, q: C64, t: C64) -> CMatrix {
    let a = weight_a(u, q);
    let b = weight_b(u);
    let ct = c_tilde(q);
    CMatrix::from_rows(&[
        [a, ZERO, ZERO, ZERO],
        [ZERO, t * b, ct, ZERO],
        [ZERO, ct, b / t, ZERO],
        [ZERO, ZERO, ZERO, a],
    ])
}

pub fn build_r(u: C64, q: C64, t: C64) -> Result<RMatrix> {
    nonzero(u, "u")?;
    nonzero(q, "q")?;
    nonzero(t, "t")?;
    Ok(RMatrix {
        q,
        t,
        u,
        matrix: r_matrix(u, q, t),
    })
}

/// The 4×4 swap `P(x⊗y) = y⊗x`.
pub fn swap4() -> CMatrix {
    CMatrix::from_rows(&[
        [ONE, ZERO, ZERO, ZERO],
        [ZERO, ZERO, ONE, ZERO],
        [ZERO, ONE, ZERO, ZERO],
        [ZERO, ZERO, ZERO, ONE],
    ])
}

/// `R₂₁ = P R₁₂ P`.
pub fn r21(m: &CMatrix) -> CMatrix {
    let p = swap4();
    &(&p * m) * &p
}

/// Transpose in the second tensor factor of a 4×4 matrix.
pub fn partial_transpose_2(m: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            for cc in 0..2 {
                for d in 0..2 {
                    out.set(2 * a + d, 2 * cc + b, m.get(2 * a + b, 2 * cc + d));
                }
            }
        }
    }
    out
}

/// Transpose in the first tensor factor of a 4×4 matrix.
pub fn partial_transpose_1(m: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            for cc in 0..2 {
                for d in 0..2 {
                    out.set(2 * cc + b, 2 * a + d, m.get(2 * a + b, 2 * cc + d));
                }
            }
        }
    }
    out
}

/// Diagonal twist `exp(iθ(σ₃/2⊗1 − 1⊗σ₃/2))` with the central element folded into θ.
pub fn build_twist(theta_z: C64) -> CMatrix {
    let i = c(0.0, 1.0);
    let e = (i * theta_z).exp();
    CMatrix::from_diag(&[ONE, e, e.inv(), ONE])
}

/// `t = e^{−2iθ}`.
pub fn twist_parameter(theta_z: C64) -> C64 {
    (c(0.0, -2.0) * theta_z).exp()
}

/// Residual of `ℱ⁻¹ R(u;1) ℱ⁻¹ = R(u; e^{−2iθ})`.
pub fn check_twist_conjugation(u: C64, q: C64, theta_z: C64) -> Result<f64> {
    let fi = build_twist(theta_z).inverse()?;
    let lhs = &(&fi * &r_matrix(u, q, ONE)) * &fi;
    rel_residual(&lhs, &r_matrix(u, q, twist_parameter(theta_z)))
}

/// Residuals of the twist cocycle conditions on the triple space:
/// `ℱ₁₂ℱ₂₁ = 1` and `ℱ₁₂ℱ₁₃ℱ₂₃ = ℱ₂₃ℱ₁₃ℱ₁₂`.
pub fn check_twist_cocycle(theta_z: C64) -> Result<[f64; 2]> {
    let f = build_twist(theta_z);
    let inv = rel_residual(&(&f * &r21(&f)), &CMatrix::identity(4))?;
    let (f12, f13, f23) = triple(&f);
    let lhs = &(&f12 * &f13) * &f23;
    let rhs = &(&f23 * &f13) * &f12;
    Ok([inv, rel_residual(&lhs, &rhs)?])
}

fn p23() -> CMatrix {
    kron(&CMatrix::identity(2), &swap4())
}

/// Embeds a two-factor operator as (12), (13), (23) on three 2-dim spaces.
fn triple(m: &CMatrix) -> (CMatrix, CMatrix, CMatrix) {
    let id = CMatrix::identity(2);
    let m12 = kron(m, &id);
    let p = p23();
    let m13 = &(&p * &m12) * &p;
    let m23 = kron(&id, m);
    (m12, m13, m23)
}

/// `R₁₂(u/v) R₁₃(u/w) R₂₃(v/w) = R₂₃(v/w) R₁₃(u/w) R₁₂(u/v)`.
pub fn check_ybe(q: C64, t: C64, u: C64, v: C64, w: C64) -> Result<f64> {
    for (z, n) in [(q, "q"), (t, "t"), (u, "u"), (v, "v"), (w, "w")] {
        nonzero(z, n)?;
    }
    let id = CMatrix::identity(2);
    let r12 = kron(&r_matrix(u / v, q, t), &id);
    let p = p23();
    let r13 = &(&p * &kron(&r_matrix(u / w, q, t), &id)) * &p;
    let r23 = kron(&id, &r_matrix(v / w, q, t));
    let lhs = &(&r12 * &r13) * &r23;
    let rhs = &(&r23 * &r13) * &r12;
    rel_residual(&lhs, &rhs)
}

/// `ζ(u) = q + q⁻¹ − u² − u⁻²`.
pub fn zeta(u: C64, q: C64) -> Result<C64> {
    nonzero(u, "u")?;
    nonzero(q, "q")?;
    Ok(q + q.inv() - u * u - (u * u).inv())
}

/// Residual of `R₁₂(u) R₂₁(u⁻¹) = ζ(u)·I₄`.
pub fn check_unitarity(u: C64, q: C64, t: C64) -> Result<f64> {
    let z = zeta(u, q)?;
    nonzero(t, "t")?;
    let lhs = &r_matrix(u, q, t) * &r21(&r_matrix(u.inv(), q, t));
    rel_residual(&lhs, &CMatrix::scalar(4, z))
}

/// Residual of the crossing relation
/// `{{{R^{t₂}(u)}⁻¹}^{t₂}}⁻¹ = ζ(q^{1/2}u)/ζ(qu) · (1⊗M) R(qu) (1⊗M)⁻¹`.
pub fn check_m_relation(q: C64, t: C64, u: C64, m: &CMatrix) -> Result<f64> {
    nonzero(t, "t")?;
    let zq = zeta(q * u, q)?;
    if zq.norm() < 1e-10 {
        return Err(Error::Degenerate("ζ(qu) vanishes".into()));
    }
    let inner = partial_transpose_2(&r_matrix(u, q, t))
        .inverse()
        .map_err(|_| Error::Degenerate("R^{t2}(u) not invertible".into()))?;
    let lhs = partial_transpose_2(&inner)
        .inverse()
        .map_err(|_| Error::Degenerate("partial-transpose inverse singular".into()))?;
    let one_m = kron(&CMatrix::identity(2), m);
    let ratio = zeta(sqrt(q) * u, q)? / zq;
    let rhs = (&(&one_m * &r_matrix(q * u, q, t)) * &one_m.inverse()?).scale(ratio);
    rel_residual(&lhs, &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::r;

    fn q0() -> C64 {
        c(1.3, 0.4)
    }

    #[test]
    fn r_at_one_is_scaled_swap() {
        let q = q0();
        let m = r_matrix(ONE, q, c(0.6, 0.8));
        assert!(rel_residual(&m, &swap4().scale(c_tilde(q))).unwrap() < 1e-15);
    }

    #[test]
    fn untwisted_limit_and_off_diagonals() {
        let (u, q, t) = (c(0.9, 0.3), q0(), c(0.0, 1.0));
        let m = r_matrix(u, q, t);
        assert_eq!(m.get(1, 2), c_tilde(q));
        assert_eq!(m.get(2, 1), c_tilde(q));
        let m1 = r_matrix(u, q, ONE);
        assert_eq!(m1.get(1, 1), weight_b(u));
        assert_eq!(m1.get(0, 0), weight_a(u, q));
    }

    #[test]
    fn twist_basics() {
        assert_eq!(build_twist(ZERO), CMatrix::identity(4));
        let th = r(0.37);
        let prod = &build_twist(th) * &build_twist(-th);
        assert!(rel_residual(&prod, &CMatrix::identity(4)).unwrap() < 1e-15);
        assert!(check_twist_conjugation(c(1.1, 0.2), q0(), th).unwrap() < 1e-14);
        let [a, b] = check_twist_cocycle(th).unwrap();
        assert!(a < 1e-15 && b < 1e-15);
    }

    #[test]
    fn ybe_fixed_point() {
        let t = c(0.7f64.cos(), 0.7f64.sin());
        let res = check_ybe(q0(), t, r(1.1), r(0.8), r(1.7)).unwrap();
        assert!(res < 1e-12, "{res}");
        assert!(check_ybe(q0(), ONE, r(1.1), r(0.8), r(1.7)).unwrap() < 1e-12);
        assert!(check_ybe(q0(), t, r(1.1), r(1.1), r(1.7)).unwrap() < 1e-13);
    }

    #[test]
    fn zeta_values() {
        let q = q0();
        let z1 = zeta(ONE, q).unwrap();
        assert!((z1 - (q + q.inv() - r(2.0))).norm() < 1e-15);
        let u = c(0.8, -0.5);
        let aa = weight_a(u, q) * weight_a(u.inv(), q);
        assert!((zeta(u, q).unwrap() - aa).norm() < 1e-13);
        assert!(zeta(ZERO, q).is_err());
    }

    #[test]
    fn m_relation_identity_and_control() {
        let (q, t, u) = (q0(), c(0.6, 0.8), c(0.9, 0.4));
        assert!(check_m_relation(q, t, u, &CMatrix::identity(2)).unwrap() < 1e-12);
        let bad = CMatrix::from_diag(&[ONE, r(2.0)]);
        assert!(check_m_relation(q, t, u, &bad).unwrap() > 1e-3);
    }

    #[test]
    fn partial_transposes_compose_to_full() {
        let m = r_matrix(c(1.2, 0.1), q0(), c(0.6, 0.8));
        let both = partial_transpose_1(&partial_transpose_2(&m));
        assert_eq!(both, m.transpose());
    }
}
