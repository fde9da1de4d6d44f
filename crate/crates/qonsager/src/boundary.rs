//! Boundary K-matrices, reflection equations and Sklyanin dressing.

use crate::error::{nonzero, Error, Result};
use crate::lax::{lax_on_site, lax_tilde_on_site, spin_half_rep};
use crate::linalg::{kron, rel_residual, AuxOperator, CMatrix, C64, ONE};
pub use crate::params::BoundaryParams;
use crate::params::ModelParams;
use crate::yang_baxter::{
    c_tilde, partial_transpose_1, partial_transpose_2, q_bar, r21, r_matrix, sqrt, swap4, weight_a,
    weight_b,
};

/// c-number solution of the reflection equation.
pub fn build_kminus_c(u: C64, p: &BoundaryParams, q: C64) -> Result<CMatrix> {
    nonzero(u, "u")?;
    let ct = c_tilde(q);
    if ct.norm() < 1e-14 {
        return Err(Error::Degenerate("q = ±1 makes c̃ vanish".into()));
    }
    let d = u * u - (u * u).inv();
    Ok(CMatrix::m2(
        u * p.eps_plus + p.eps_minus / u,
        p.k_plus / ct * d,
        p.k_minus / ct * d,
        u * p.eps_minus + p.eps_plus / u,
    ))
}

/// c-number solution of the dual reflection equation.
pub fn build_kplus_c(u: C64, p: &BoundaryParams, q: C64) -> Result<CMatrix> {
    nonzero(u, "u")?;
    let s = sqrt(q);
    let e = q * u * u - (q * u * u).inv();
    let qb = q_bar(q);
    Ok(CMatrix::m2(
        s * u * p.kappa + p.kappa_star / (s * u),
        p.kappa_plus * qb * e,
        p.kappa_minus * qb * e,
        s * u * p.kappa_star + p.kappa / (s * u),
    ))
}

/// `u ↦ K₋ᵗ(q^{−1/2}u⁻¹)·M` with `M = I`.
pub fn dualize<F>(kminus: F, q: C64) -> impl Fn(C64) -> CMatrix
where
    F: Fn(C64) -> CMatrix,
{
    let s = sqrt(q);
    move |u: C64| kminus((s * u).inv()).transpose()
}

/// Dual-side constants reached by dualizing `K₋ᶜ`, expressed in the
/// `K₊ᶜ` parameterization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualMap {
    pub kappa: C64,
    pub kappa_star: C64,
    pub kappa_plus: C64,
    pub kappa_minus: C64,
    /// Least-squares residual of the fit over the sampled `u`.
    pub fit_residual: f64,
}

/// Closed form: `κ = ε₋`, `κ* = ε₊`, `κ± = −k∓/(q − q⁻¹)`.
pub fn dual_map_closed_form(p: &BoundaryParams, q: C64) -> BoundaryParams {
    let qq = q - q.inv();
    BoundaryParams {
        kappa: p.eps_minus,
        kappa_star: p.eps_plus,
        kappa_plus: -p.k_minus / qq,
        kappa_minus: -p.k_plus / qq,
        ..*p
    }
}

/// Fits `dualize(K₋ᶜ)` at the given spectral points by `K₊ᶜ` (linear in the
/// four κ constants).
pub fn fit_dual_map(p: &BoundaryParams, q: C64, us: &[C64]) -> Result<DualMap> {
    let dual = dualize(|x| build_kminus_c(x, p, q).expect("nonzero u"), q);
    let unit = |k: usize| {
        let z = crate::linalg::ZERO;
        let mut b = BoundaryParams {
            kappa: z,
            kappa_star: z,
            kappa_plus: z,
            kappa_minus: z,
            ..*p
        };
        match k {
            0 => b.kappa = ONE,
            1 => b.kappa_star = ONE,
            2 => b.kappa_plus = ONE,
            _ => b.kappa_minus = ONE,
        }
        b
    };
    let mut a_rows = Vec::new();
    let mut rhs = Vec::new();
    for &u in us {
        let cols: Vec<CMatrix> = (0..4)
            .map(|k| build_kplus_c(u, &unit(k), q))
            .collect::<Result<_>>()?;
        let target = dual(u);
        for e in 0..4 {
            a_rows.push([
                cols[0].data()[e],
                cols[1].data()[e],
                cols[2].data()[e],
                cols[3].data()[e],
            ]);
            rhs.push([target.data()[e]]);
        }
    }
    let a = CMatrix::from_rows(&a_rows);
    let b = CMatrix::from_rows(&rhs);
    // normal equations: A^H A x = A^H b
    let ah = a.adjoint();
    let x = (&ah * &a).solve(&(&ah * &b))?;
    let fit = &a * &x;
    let res = rel_residual(&fit, &b)?;
    Ok(DualMap {
        kappa: x.get(0, 0),
        kappa_star: x.get(1, 0),
        kappa_plus: x.get(2, 0),
        kappa_minus: x.get(3, 0),
        fit_residual: res,
    })
}

/// Operator-valued K on `aux₁ ⊗ aux₂ ⊗ quantum`: returns `(K¹, K²)`.
fn lift(k: &AuxOperator) -> (CMatrix, CMatrix) {
    let d = 1usize << k.n_sites();
    let id2 = CMatrix::identity(2);
    let mut k1 = CMatrix::zeros(4 * d, 4 * d);
    let mut k2 = CMatrix::zeros(4 * d, 4 * d);
    for a in 0..2 {
        for b in 0..2 {
            let mut e = CMatrix::zeros(2, 2);
            e.set(a, b, ONE);
            k1 += &kron(&kron(&e, &id2), k.block(a, b));
            k2 += &kron(&kron(&id2, &e), k.block(a, b));
        }
    }
    (k1, k2)
}

fn lift_r(m: &CMatrix, n_sites: usize) -> CMatrix {
    kron(m, &CMatrix::identity(1 << n_sites))
}

/// Both sides of `R₁₂(u/v)K¹(u)X(uv)K²(v) = K²(v)R₁₂(uv)K¹(u)X(u/v)` where
/// `X` is `R₂₁` (`transposed = false`) or `R₁₂^{t₁t₂}`.
fn reflection_sides(
    ku: &AuxOperator,
    kv: &AuxOperator,
    q: C64,
    t: C64,
    u: C64,
    v: C64,
    transposed: bool,
) -> Result<(CMatrix, CMatrix)> {
    for (z, n) in [(q, "q"), (t, "t"), (u, "u"), (v, "v")] {
        nonzero(z, n)?;
    }
    if ku.n_sites() != kv.n_sites() {
        return Err(Error::DimensionMismatch(
            "K(u) and K(v) act on different spaces".into(),
        ));
    }
    let n = ku.n_sites();
    let x = |z: C64| {
        let m = r_matrix(z, q, t);
        if transposed {
            partial_transpose_1(&partial_transpose_2(&m))
        } else {
            r21(&m)
        }
    };
    let (k1, _) = lift(ku);
    let (_, k2) = lift(kv);
    let r_m = lift_r(&r_matrix(u / v, q, t), n);
    let r_p = lift_r(&r_matrix(u * v, q, t), n);
    let x_p = lift_r(&x(u * v), n);
    let x_m = lift_r(&x(u / v), n);
    let lhs = &(&(&r_m * &k1) * &x_p) * &k2;
    let rhs = &(&(&k2 * &r_p) * &k1) * &x_m;
    Ok((lhs, rhs))
}

/// Reflection equation in the Sklyanin arrangement
/// `R₁₂(u/v)K¹(u)R₂₁(uv)K²(v) = K²(v)R₁₂(uv)K¹(u)R₂₁(u/v)`.
pub fn check_reflection(
    ku: &AuxOperator,
    kv: &AuxOperator,
    q: C64,
    t: C64,
    u: C64,
    v: C64,
) -> Result<f64> {
    let (l, r) = reflection_sides(ku, kv, q, t, u, v, false)?;
    rel_residual(&l, &r)
}

/// Reflection equation with `R₁₂^{t₁t₂}` in the place of `R₂₁`.
pub fn check_reflection_transposed(
    ku: &AuxOperator,
    kv: &AuxOperator,
    q: C64,
    t: C64,
    u: C64,
    v: C64,
) -> Result<f64> {
    let (l, r) = reflection_sides(ku, kv, q, t, u, v, true)?;
    rel_residual(&l, &r)
}

fn aux_transpose(k: &AuxOperator) -> AuxOperator {
    let b = k.blocks();
    AuxOperator::new(
        k.n_sites(),
        [
            [b[0][0].clone(), b[1][0].clone()],
            [b[0][1].clone(), b[1][1].clone()],
        ],
    )
    .expect("same blocks")
}

/// Dual reflection equation with `M = I`:
/// `R₁₂(u⁻¹v)K₊^{t₁}(u)X(q⁻¹u⁻¹v⁻¹)K₊^{t₂}(v) = K₊^{t₂}(v)R₁₂(q⁻¹u⁻¹v⁻¹)K₊^{t₁}(u)X(u⁻¹v)`
/// with `X = R₂₁`.
pub fn check_dual_reflection(
    kp_u: &AuxOperator,
    kp_v: &AuxOperator,
    q: C64,
    t: C64,
    u: C64,
    v: C64,
) -> Result<f64> {
    dual_sides(kp_u, kp_v, q, t, u, v, false)
}

/// Dual reflection equation with `R₁₂^{t₁t₂}` in the transposed slots.
pub fn check_dual_reflection_transposed(
    kp_u: &AuxOperator,
    kp_v: &AuxOperator,
    q: C64,
    t: C64,
    u: C64,
    v: C64,
) -> Result<f64> {
    dual_sides(kp_u, kp_v, q, t, u, v, true)
}

fn dual_sides(
    kp_u: &AuxOperator,
    kp_v: &AuxOperator,
    q: C64,
    t: C64,
    u: C64,
    v: C64,
    transposed: bool,
) -> Result<f64> {
    nonzero(u, "u")?;
    nonzero(v, "v")?;
    // Rewriting with x = q^{-1/2}/u, y = q^{-1/2}/v turns the dual equation
    // into the reflection equation for K₊ᵗ at (x, y).
    let x = (sqrt(q) * u).inv();
    let y = (sqrt(q) * v).inv();
    let (l, r) = reflection_sides(
        &aux_transpose(kp_u),
        &aux_transpose(kp_v),
        q,
        t,
        x,
        y,
        transposed,
    )?;
    debug_assert!(((x / y) - v / u).norm() < 1e-12 * (v / u).norm().max(1.0));
    rel_residual(&l, &r)
}

/// Residuals of the sixteen scalar component equations.
#[derive(Clone, Debug, PartialEq)]
pub struct SixteenReport {
    /// Without the ordering and duplicate-term fixes below.
    pub uncorrected: [f64; 16],
    /// With operator-ordering fixes in (5), (6), (13), (14).
    pub corrected: [f64; 16],
    /// Each `d×d` block of `LHS − RHS` of the full reflection equation.
    pub matrix: [f64; 16],
}

/// Evaluates the sixteen component equations for `K(u) = [[A,B],[C,D]]`,
/// `K(v) = [[A′,B′],[C′,D′]]` and the sixteen blocks of the matrix equation.
pub fn check_sixteen(
    ku: &AuxOperator,
    kv: &AuxOperator,
    q: C64,
    u: C64,
    v: C64,
) -> Result<SixteenReport> {
    let (am, ap) = (weight_a(u / v, q), weight_a(u * v, q));
    let (bm, bp) = (weight_b(u / v), weight_b(u * v));
    let ct = c_tilde(q);
    let [[a, b], [c, d]] = ku.blocks().clone();
    let [[a_, b_], [c_, d_]] = kv.blocks().clone();
    let m = |x: &CMatrix, y: &CMatrix| x * y;
    type Term = (C64, CMatrix);
    let eq = |terms: Vec<Term>| -> f64 {
        let mut sum = CMatrix::zeros(a.rows(), a.cols());
        let mut scale = 0.0;
        for (z, t) in &terms {
            let s = t.scale(*z);
            scale += s.norm();
            sum += &s;
        }
        sum.norm() / scale.max(1.0)
    };
    let cm = |x: &CMatrix, y: &CMatrix| vec![(ONE, m(x, y)), (-ONE, m(y, x))];
    let with = |z: C64, v: Vec<Term>| v.into_iter().map(|(w, t)| (w * z, t)).collect::<Vec<_>>();
    let cat = |parts: Vec<Vec<Term>>| parts.into_iter().flatten().collect::<Vec<_>>();
    let c2 = ct * ct;

    let e1 = cat(vec![
        with(am * ct, vec![(ONE, m(&b, &c_)), (-ONE, m(&b_, &c))]),
        with(am * ap, cm(&a, &a_)),
    ]);
    let e2 = cat(vec![
        with(am * ct, vec![(ONE, m(&c, &b_)), (-ONE, m(&c_, &b))]),
        with(am * ap, cm(&d, &d_)),
    ]);
    let e3 = cat(vec![
        with(bm * bp, cm(&a, &d_)),
        with(c2, cm(&d, &d_)),
        with(ct * ap, vec![(ONE, m(&c, &b_)), (-ONE, m(&c_, &b))]),
    ]);
    let e4 = cat(vec![
        with(bm * bp, cm(&d, &a_)),
        with(c2, cm(&a, &a_)),
        with(ct * ap, vec![(ONE, m(&b, &c_)), (-ONE, m(&b_, &c))]),
    ]);
    let e5 = |fixed: bool| {
        cat(vec![
            with(ct * bp, vec![(ONE, m(&d, &a_)), (-ONE, m(&d_, &a))]),
            with(
                bm * ct,
                vec![
                    (ONE, m(&a, &a_)),
                    (-ONE, if fixed { m(&d_, &d) } else { m(&d, &d_) }),
                ],
            ),
            with(bm * ap, cm(&b, &c_)),
        ])
    };
    let e6 = |fixed: bool| {
        cat(vec![
            with(ct * bp, vec![(ONE, m(&a, &d_)), (-ONE, m(&a_, &d))]),
            with(
                bm * ct,
                vec![
                    (ONE, m(&d, &d_)),
                    (-ONE, if fixed { m(&a_, &a) } else { m(&a, &a_) }),
                ],
            ),
            with(bm * ap, cm(&c, &b_)),
        ])
    };
    let e7 = vec![
        (bm * bp, m(&a, &c_)),
        (c2, m(&d, &c_)),
        (ct * ap, m(&c, &a_)),
        (-am * ap, m(&c_, &a)),
        (-am * ct, m(&d_, &c)),
    ];
    let e8 = vec![
        (bm * bp, m(&d, &b_)),
        (c2, m(&a, &b_)),
        (ct * ap, m(&b, &d_)),
        (-am * ap, m(&b_, &d)),
        (-am * ct, m(&a_, &b)),
    ];
    let e9 = vec![
        (bm * bp, m(&b_, &a)),
        (c2, m(&b_, &d)),
        (ct * ap, m(&a_, &b)),
        (-am * ap, m(&a, &b_)),
        (-am * ct, m(&b, &d_)),
    ];
    let e10 = vec![
        (bm * bp, m(&c_, &d)),
        (c2, m(&c_, &a)),
        (ct * ap, m(&d_, &c)),
        (-am * ap, m(&d, &c_)),
        (-am * ct, m(&c, &a_)),
    ];
    let e11 = vec![
        (bm * ap, m(&b, &d_)),
        (ct * bp, m(&d, &b_)),
        (bm * ct, m(&a, &b_)),
        (-am * bp, m(&d_, &b)),
    ];
    let e12 = vec![
        (bm * ap, m(&c, &a_)),
        (ct * bp, m(&a, &c_)),
        (bm * ct, m(&d, &c_)),
        (-am * bp, m(&a_, &c)),
    ];
    let e13 = |fixed: bool| {
        vec![
            (bm * ap, m(&a_, &b)),
            (ct * bp, m(&b_, &a)),
            (bm * ct, m(&b_, &d)),
            (-am * bp, if fixed { m(&b, &a_) } else { m(&b_, &a) }),
        ]
    };
    let e14 = |fixed: bool| {
        vec![
            (bm * ap, m(&d_, &c)),
            (ct * bp, m(&c_, &d)),
            (bm * ct, m(&c_, &a)),
            (-am * bp, if fixed { m(&c, &d_) } else { m(&c_, &d) }),
        ]
    };
    let e15 = with(am * bp, cm(&b, &b_));
    let e16 = with(am * bp, cm(&c, &c_));

    let build = |fixed: bool| -> [f64; 16] {
        [
            eq(e1.clone()),
            eq(e2.clone()),
            eq(e3.clone()),
            eq(e4.clone()),
            eq(e5(fixed)),
            eq(e6(fixed)),
            eq(e7.clone()),
            eq(e8.clone()),
            eq(e9.clone()),
            eq(e10.clone()),
            eq(e11.clone()),
            eq(e12.clone()),
            eq(e13(fixed)),
            eq(e14(fixed)),
            eq(e15.clone()),
            eq(e16.clone()),
        ]
    };

    let (lhs, rhs) = reflection_sides(ku, kv, q, ONE, u, v, false)?;
    let dim = lhs.rows() / 4;
    let diff = &lhs - &rhs;
    let scale = lhs.norm().max(rhs.norm()).max(1.0);
    let mut matrix = [0.0; 16];
    for i in 0..4 {
        for j in 0..4 {
            matrix[4 * i + j] = diff.block(i * dim, j * dim, dim, dim).norm() / scale;
        }
    }
    Ok(SixteenReport {
        uncorrected: build(false),
        corrected: build(true),
        matrix,
    })
}

/// Operator-valued solution `K⁽ᴺ⁾ = L_N⋯L₁ K₀ L̃₁⋯L̃_N` on `N` sites.
#[derive(Clone, Debug, PartialEq)]
pub struct DressedK {
    pub n_sites: usize,
    pub k: AuxOperator,
}

/// Dresses the c-number `k0` (evaluated at `u`) through `params.n_sites()` sites.
pub fn dress(u: C64, k0: &CMatrix, params: &ModelParams) -> Result<DressedK> {
    nonzero(u, "u")?;
    let n = params.n_sites();
    let mut k = AuxOperator::from_c_number(k0, n);
    for i in 1..=n {
        let rep = spin_half_rep(params.q, params.t[i - 1])?;
        let vi = params.v[i - 1];
        let l = lax_on_site(u * vi, &rep, i, n)?;
        let lt = lax_tilde_on_site(vi / u, &rep, i, n)?;
        k = l.mul(&k).mul(&lt);
    }
    Ok(DressedK { n_sites: n, k })
}

/// `dress(K₋ᶜ(u))` for the model's boundary constants.
pub fn dressed_kminus(u: C64, params: &ModelParams) -> Result<DressedK> {
    let k0 = build_kminus_c(u, &params.boundary, params.q)?;
    dress(u, &k0, params)
}

/// Scalar swap helper kept for tests of the arrangement.
#[doc(hidden)]
pub fn swap() -> CMatrix {
    swap4()
}
