//! Open-chain transfer matrix, its decomposition into conserved charges, the
//! generalized McCoy–Wu Hamiltonian and exact diagonalization.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{build_kplus_c, dressed_kminus};
use crate::error::{nonzero, Error, Result};
use crate::linalg::{
    commutator_residual, embed_site, kron, pauli, rel_residual, CMatrix, C64, ONE,
};
use crate::onsager::{
    charges, coefficient_tower, generators, q_commutator, two_term_w, ChargeConvention,
    CoefficientTower,
};
use crate::params::ModelParams;
use crate::yang_baxter::{c_tilde, q_bar, sqrt};

/// `t(u) = Tr₀(K₊ᶜ(u)·K₋⁽ᴺ⁾(u))` on the `2^N` quantum space.
pub fn transfer(u: C64, params: &ModelParams) -> Result<CMatrix> {
    let k = dressed_kminus(u, params)?.k;
    let kp = build_kplus_c(u, &params.boundary, params.q)?;
    Ok(k.trace_with(&kp))
}

/// Largest `rel_residual(t(u)t(v), t(v)t(u))` over all pairs of the samples.
pub fn check_commutation(params: &ModelParams, us: &[C64]) -> Result<f64> {
    let ts: Vec<CMatrix> = us
        .par_iter()
        .map(|&u| transfer(u, params))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for (i, a) in ts.iter().enumerate() {
        for b in &ts[i + 1..] {
            worst = worst.max(commutator_residual(a, b));
        }
    }
    Ok(worst)
}

/// `c̃^{2N}(q^{1/2}+q^{−1/2})(ε₊+ε₋)(κ+κ*)`, the value of `t(1)` on the identity.
pub fn transfer_at_one_scalar(params: &ModelParams) -> C64 {
    let q = params.q;
    let b = &params.boundary;
    c_tilde(q).powu(2 * params.n_sites() as u32)
        * q_bar(q)
        * (b.eps_plus + b.eps_minus)
        * (b.kappa + b.kappa_star)
}

/// Residual of `t(1)` against that multiple of the identity, on the
/// homogeneous chain (inhomogeneities are reset to 1).
pub fn check_transfer_at_one(params: &ModelParams) -> Result<f64> {
    let p = params.clone().homogeneous();
    let t1 = transfer(ONE, &p)?;
    rel_residual(&t1, &CMatrix::scalar(t1.rows(), transfer_at_one_scalar(&p)))
}

/// Scalar part `ℱ(u)` of the decomposition.
pub fn scalar_part(u: C64, params: &ModelParams, tower: &CoefficientTower) -> C64 {
    let q = params.q;
    let b = &params.boundary;
    let qq = q_bar(q);
    let uu = u * u - (u * u).inv();
    let ee = q * u * u - (q * u * u).inv();
    let (ep, em) = (tower.eps_plus_n, tower.eps_minus_n);
    qq * (b.kappa_star * ep + b.kappa * em)
        + tower.x(u) * (b.kappa * ep + b.kappa_star * em)
        + qq * uu
            * ee
            * (b.kappa_plus / (b.k_plus * tower.pi1) + b.kappa_minus / (b.k_minus * tower.pi2))
            * tower.j(u)
}

/// Residual of `t(u) = ℱ(u)·I + (u²−u⁻²)(qu²−q^{−e}u⁻²)Σₖ P₋ₖ(u)·I_{2k+1}`
/// with `e = q_exponent`, maximized over the samples.
pub fn decomposition_residual(
    params: &ModelParams,
    convention: ChargeConvention,
    us: &[C64],
    q_exponent: i32,
) -> Result<f64> {
    let n = params.n_sites();
    let q = params.q;
    let fam = generators(params, n.max(1))?;
    let tower = coefficient_tower(params, n)?;
    let ch = charges(&fam, params, convention)?;
    let id = CMatrix::identity(1 << n);
    let res: Vec<f64> = us
        .par_iter()
        .map(|&u| {
            nonzero(u, "u")?;
            let t = transfer(u, params)?;
            let uu = u * u - (u * u).inv();
            let ee = q * u * u - (q.powi(q_exponent) * u * u).inv();
            let mut rhs = id.scale(scalar_part(u, params, &tower));
            for (k, i) in ch.iter().enumerate() {
                rhs += &i.scale(uu * ee * tower.p(u, k));
            }
            rel_residual(&t, &rhs)
        })
        .collect::<Result<_>>()?;
    Ok(res.into_iter().fold(0.0, f64::max))
}

pub fn check_decomposition(
    params: &ModelParams,
    convention: ChargeConvention,
    us: &[C64],
) -> Result<f64> {
    decomposition_residual(params, convention, us, 1)
}

/// Picks the charge convention whose decomposition residual is smallest.
pub fn select_charge_convention(
    params: &ModelParams,
    us: &[C64],
) -> Result<(ChargeConvention, Vec<(ChargeConvention, f64)>)> {
    let scores = ChargeConvention::ALL
        .iter()
        .map(|&c| check_decomposition(params, c, us).map(|r| (c, r)))
        .collect::<Result<Vec<_>>>()?;
    let best = scores
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|s| s.0)
        .expect("two conventions");
    Ok((best, scores))
}

fn site(op: &CMatrix, i: usize, n: usize) -> Result<CMatrix> {
    embed_site(op, i, n).map(|o| o.into_matrix())
}

/// `Δ = (q^{1/2}+q^{−1/2})/2`.
pub fn anisotropy(q: C64) -> C64 {
    q_bar(q) / 2.0
}

/// Generalized McCoy–Wu Hamiltonian for a homogeneous chain.
pub fn mccoy_wu_hamiltonian(params: &ModelParams) -> Result<CMatrix> {
    let n = params.n_sites();
    if n == 0 {
        return Err(Error::Depth("Hamiltonian needs at least one site".into()));
    }
    let q = params.q;
    let b = &params.boundary;
    let (ct, qq) = (c_tilde(q), q_bar(q));
    let epsum = b.eps_plus + b.eps_minus;
    let kapsum = b.kappa + b.kappa_star;
    if epsum.norm() < 1e-14 {
        return Err(Error::Degenerate(
            "boundary denominator eps_plus + eps_minus vanishes".into(),
        ));
    }
    if kapsum.norm() < 1e-14 {
        return Err(Error::Degenerate(
            "boundary denominator kappa + kappa_star vanishes".into(),
        ));
    }
    if ct.norm() < 1e-14 {
        return Err(Error::Degenerate("q = 1".into()));
    }
    let st: Vec<C64> = params.t.iter().map(|&t| sqrt(t)).collect();
    let (sp, sm, s3) = (pauli::sigma_plus(), pauli::sigma_minus(), pauli::sigma3());
    let delta = anisotropy(q);
    let mut h = CMatrix::zeros(1 << n, 1 << n);
    for k in 1..n {
        let (a, bb) = (st[k], st[k - 1]);
        h += &(&site(&sp, k + 1, n)? * &site(&sm, k, n)?).scale(2.0 * a / bb);
        h += &(&site(&sm, k + 1, n)? * &site(&sp, k, n)?).scale(2.0 * bb / a);
        h += &(&site(&s3, k + 1, n)? * &site(&s3, k, n)?).scale(delta);
    }
    let left = &site(&s3, n, n)?.scale((b.kappa - b.kappa_star) / 2.0)
        + &(&site(&sp, n, n)?.scale(st[n - 1] * b.kappa_plus)
            + &site(&sm, n, n)?.scale(b.kappa_minus / st[n - 1]))
            .scale(2.0 * qq);
    h += &left.scale(ct / kapsum);
    let right = &site(&s3, 1, n)?.scale((b.eps_plus - b.eps_minus) / 2.0)
        + &(&site(&sp, 1, n)?.scale(st[0] * b.k_plus) + &site(&sm, 1, n)?.scale(b.k_minus / st[0]))
            .scale(2.0 / ct);
    h += &right.scale(ct / epsum);
    Ok(h)
}

/// Untwisted open XXZ chain with boundary fields, assembled from
/// `σˣ, σʸ, σᶻ` by explicit tensor products:
/// `Σₖ(σˣσˣ + σʸσʸ + Δσᶻσᶻ) + Σ_{a=x,y,z}(h_aσ^a_N + g_aσ^a_1)`.
pub fn xxz_reference(n: usize, delta: C64, left: [C64; 3], right: [C64; 3]) -> CMatrix {
    let paulis = [pauli::sigma1(), pauli::sigma2(), pauli::sigma3()];
    let chain = |ops: &[(usize, &CMatrix)]| {
        // position j (1-based) from the right
        let mut m = CMatrix::identity(1);
        for j in (1..=n).rev() {
            let f = ops
                .iter()
                .find(|(s, _)| *s == j)
                .map(|(_, o)| (*o).clone())
                .unwrap_or_else(pauli::id2);
            m = kron(&m, &f);
        }
        m
    };
    let mut h = CMatrix::zeros(1 << n, 1 << n);
    for k in 1..n {
        for (a, p) in paulis.iter().enumerate() {
            let c = if a == 2 { delta } else { ONE };
            h += &chain(&[(k + 1, p), (k, p)]).scale(c);
        }
    }
    for (a, p) in paulis.iter().enumerate() {
        h += &chain(&[(n, p)]).scale(left[a]);
        h += &chain(&[(1, p)]).scale(right[a]);
    }
    h
}

/// Boundary-field components `(h_x, h_y, h_z)` of the untwisted McCoy–Wu
/// Hamiltonian, left (site N) and right (site 1), from `σ± = (σˣ ± iσʸ)/2`.
pub fn xxz_boundary_fields(params: &ModelParams) -> ([C64; 3], [C64; 3]) {
    let q = params.q;
    let b = &params.boundary;
    let (ct, qq) = (c_tilde(q), q_bar(q));
    let i = C64::new(0.0, 1.0);
    let split = |z: C64, plus: C64, minus: C64| [(plus + minus) / 2.0, i * (plus - minus) / 2.0, z];
    let lk = ct / (b.kappa + b.kappa_star);
    let left = split(
        lk * (b.kappa - b.kappa_star) / 2.0,
        lk * 2.0 * qq * b.kappa_plus,
        lk * 2.0 * qq * b.kappa_minus,
    );
    let re = ct / (b.eps_plus + b.eps_minus);
    let right = split(
        re * (b.eps_plus - b.eps_minus) / 2.0,
        re * 2.0 / ct * b.k_plus,
        re * 2.0 / ct * b.k_minus,
    );
    (left, right)
}

/// Entrywise distance between `H(tᵢ = 1)` and the independent XXZ build.
pub fn check_xxz_reduction(params: &ModelParams) -> Result<f64> {
    let p = params.clone().untwisted();
    let h = mccoy_wu_hamiltonian(&p)?;
    let (l, r) = xxz_boundary_fields(&p);
    Ok(h.max_abs_diff(&xxz_reference(p.n_sites(), anisotropy(p.q), l, r)))
}

/// Diagonal gauge `U = ⊗ᵢ diag(tᵢ^{1/4}, tᵢ^{−1/4})` with `H(t) = U·H(1)·U⁻¹`.
pub fn twist_gauge(params: &ModelParams) -> CMatrix {
    let mut u = CMatrix::identity(1);
    for &t in params.t.iter().rev() {
        let r = sqrt(sqrt(t));
        u = kron(&u, &CMatrix::from_diag(&[r, r.inv()]));
    }
    u
}

/// Residual of `H(t) = U H(1) U⁻¹`.
pub fn check_twist_gauge(params: &ModelParams) -> Result<f64> {
    let h = mccoy_wu_hamiltonian(params)?;
    let h1 = mccoy_wu_hamiltonian(&params.clone().untwisted())?;
    let u = twist_gauge(params);
    let conj = &(&u * &h1) * &u.inverse()?;
    rel_residual(&h, &conj)
}

/// Central-difference steps for the derivative at `u = 1`.
pub const DERIVATIVE_STEPS: [f64; 2] = [1e-4, 5e-5];

/// `t(1)⁻¹·t′(1)` by central differences and one Richardson step.
pub fn log_derivative_at_one(params: &ModelParams) -> Result<CMatrix> {
    let d: Vec<CMatrix> = DERIVATIVE_STEPS
        .iter()
        .map(|&h| {
            let hp = transfer(C64::new(1.0 + h, 0.0), params)?;
            let hm = transfer(C64::new(1.0 - h, 0.0), params)?;
            Ok((&hp - &hm).scale(C64::new(0.5 / h, 0.0)))
        })
        .collect::<Result<_>>()?;
    let ratio = DERIVATIVE_STEPS[0] / DERIVATIVE_STEPS[1];
    let w = ratio * ratio;
    let rich = (&d[1].scale(C64::new(w, 0.0)) - &d[0]).scale(C64::new(1.0 / (w - 1.0), 0.0));
    let t1 = transfer(ONE, params)?;
    t1.solve(&rich)
        .map_err(|_| Error::Singular("t(1) in the Hamiltonian limit".into()))
}

/// `(c̃/(q^{1/2}+q^{−1/2}) + 2NΔ/c̃)·I + (2/c̃)·H`.
pub fn hamiltonian_limit(params: &ModelParams) -> Result<CMatrix> {
    let q = params.q;
    let n = params.n_sites();
    let (ct, qq) = (c_tilde(q), q_bar(q));
    let h = mccoy_wu_hamiltonian(params)?;
    let c0 = ct / qq + 2.0 * n as f64 * anisotropy(q) / ct;
    Ok(&CMatrix::scalar(1 << n, c0) + &h.scale(2.0 / ct))
}

/// Residual of `t(1)⁻¹t′(1)` against [`hamiltonian_limit`] on the
/// homogeneous chain.
pub fn check_hamiltonian_derivation(params: &ModelParams) -> Result<f64> {
    let p = params.clone().homogeneous();
    let rhs = hamiltonian_limit(&p)?;
    rel_residual(&log_derivative_at_one(&p)?, &rhs)
}

/// `rel_residual(H I, I H)` for every charge of the homogeneous chain.
pub fn check_charge_conservation(
    params: &ModelParams,
    convention: ChargeConvention,
) -> Result<Vec<f64>> {
    let p = params.clone().homogeneous();
    let h = mccoy_wu_hamiltonian(&p)?;
    let fam = generators(&p, p.n_sites())?;
    Ok(charges(&fam, &p, convention)?
        .iter()
        .map(|i| commutator_residual(&h, i))
        .collect())
}

/// `I₁` on the homogeneous chain from the two-term `W₀, W₁` recursion:
/// `κW₀ + κ*W₁ + (κ₊/k₊)[W₀,W₁]_q + (κ₋/k₋)[W₁,W₀]_q`.
pub fn first_charge_two_term(params: &ModelParams) -> Result<CMatrix> {
    let p = params.clone().homogeneous();
    let b = &p.boundary;
    b.require_k()?;
    let (w0, w1) = two_term_w(&p);
    let g = q_commutator(&w1, &w0, p.q, false)?;
    let gt = q_commutator(&w0, &w1, p.q, false)?;
    Ok(
        &(&(&w0.scale(b.kappa) + &w1.scale(b.kappa_star)) + &gt.scale(b.kappa_plus / b.k_plus))
            + &g.scale(b.kappa_minus / b.k_minus),
    )
}

/// Sorted eigenvalues of a quantum-space operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub n_sites: usize,
    pub eigenvalues: Vec<C64>,
}

/// Largest supported chain for dense diagonalization.
pub const MAX_DIAG_SITES: usize = 10;

pub fn diagonalize(h: &CMatrix) -> Result<Spectrum> {
    if !h.is_square() || !h.rows().is_power_of_two() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} is not a chain operator",
            h.rows(),
            h.cols()
        )));
    }
    let n = h.rows().trailing_zeros() as usize;
    if n > MAX_DIAG_SITES {
        return Err(Error::Config(format!("{n} sites exceeds {MAX_DIAG_SITES}")));
    }
    let mut ev = h.eigenvalues()?;
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(Spectrum {
        n_sites: n,
        eigenvalues: ev,
    })
}

impl Spectrum {
    /// CSV with columns `index,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,re,im")?;
        for (i, z) in self.eigenvalues.iter().enumerate() {
            writeln!(w, "{i},{:.17e},{:.17e}", z.re, z.im)?;
        }
        Ok(())
    }

    /// Largest distance between two spectra matched in sorted order.
    pub fn distance(&self, other: &Spectrum) -> f64 {
        if self.eigenvalues.len() != other.eigenvalues.len() {
            return f64::INFINITY;
        }
        self.eigenvalues
            .iter()
            .zip(&other.eigenvalues)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Matching distance between two multisets of complex numbers that does
/// not rely on a sort order (robust to near-ties).
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("same length");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ZERO};
    use crate::params::Sampler;

    fn samples(s: &mut Sampler, k: usize) -> Vec<C64> {
        (0..k).map(|_| s.spectral()).collect()
    }

    #[test]
    fn commuting_transfer_matrices() {
        let mut s = Sampler::new(1);
        for n in 1..=3 {
            let p = s.model(n);
            let us = samples(&mut s, 3);
            assert!(check_commutation(&p, &us).unwrap() < 1e-10);
        }
    }

    #[test]
    fn transfer_at_one() {
        let mut s = Sampler::new(2);
        for n in 1..=3 {
            let p = s.model(n);
            assert!(check_transfer_at_one(&p).unwrap() < 1e-12);
        }
    }

    #[test]
    fn decomposition_and_convention() {
        let mut s = Sampler::new(3);
        for n in 1..=3 {
            let p = s.model(n);
            let us = samples(&mut s, 2 * n + 2);
            let (conv, scores) = select_charge_convention(&p, &us).unwrap();
            assert_eq!(conv, ChargeConvention::FirstSite);
            let best = scores.iter().find(|x| x.0 == conv).unwrap().1;
            assert!(best < 1e-10, "N={n} {scores:?}");
            if n == 2 {
                assert!(scores.iter().any(|x| x.1 > 1e-3));
            }
        }
        // one site: q⁻¹ in the second factor, not q⁻²
        let p = s.model(1);
        let us = samples(&mut s, 4);
        assert!(decomposition_residual(&p, ChargeConvention::FirstSite, &us, 1).unwrap() < 1e-12);
        assert!(decomposition_residual(&p, ChargeConvention::FirstSite, &us, 2).unwrap() > 1e-3);
    }

    #[test]
    fn zero_left_boundary_kills_transfer() {
        let mut s = Sampler::new(4);
        let mut p = s.model(2);
        p.boundary.kappa = ZERO;
        p.boundary.kappa_star = ZERO;
        p.boundary.kappa_plus = ZERO;
        p.boundary.kappa_minus = ZERO;
        let u = s.spectral();
        assert_eq!(transfer(u, &p).unwrap().norm(), 0.0);
        let tower = coefficient_tower(&p, 2).unwrap();
        assert_eq!(scalar_part(u, &p, &tower), ZERO);
    }

    #[test]
    fn hamiltonian_limit_and_conservation() {
        let mut s = Sampler::new(5);
        for n in 1..=3 {
            let p = s.model(n).homogeneous();
            let r = check_hamiltonian_derivation(&p).unwrap();
            assert!(r < 1e-6, "N={n} {r}");
            let c = check_charge_conservation(&p, ChargeConvention::FirstSite).unwrap();
            assert!(c.iter().all(|x| *x < 1e-10), "{c:?}");
        }
    }

    #[test]
    fn xxz_reduction() {
        let mut s = Sampler::new(6);
        for n in 1..=4 {
            let p = s.model(n);
            assert!(check_xxz_reduction(&p).unwrap() < 1e-12);
        }
    }

    #[test]
    fn two_site_zero_boundary_spectrum() {
        let mut s = Sampler::new(7);
        let mut p = s.model(2).untwisted();
        let b = &mut p.boundary;
        b.k_plus = ZERO;
        b.k_minus = ZERO;
        b.kappa_plus = ZERO;
        b.kappa_minus = ZERO;
        b.eps_minus = b.eps_plus;
        b.kappa_star = b.kappa;
        let h = mccoy_wu_hamiltonian(&p).unwrap();
        let d = anisotropy(p.q);
        let want = [d, d, -d + 2.0, -d - 2.0];
        let got = diagonalize(&h).unwrap();
        assert!(multiset_distance(&got.eigenvalues, &want) < 1e-12);
    }

    #[test]
    fn one_site_boundary_only_spectrum() {
        let p = Sampler::new(8).model(1);
        let h = mccoy_wu_hamiltonian(&p).unwrap();
        // h = a σ₃ + b σ₊ + c σ₋ has eigenvalues ±sqrt(a² + bc)
        let (a, bb, cc) = ((h.get(0, 0) - h.get(1, 1)) / 2.0, h.get(0, 1), h.get(1, 0));
        let shift = (h.get(0, 0) + h.get(1, 1)) / 2.0;
        let r = (a * a + bb * cc).sqrt();
        let got = diagonalize(&h).unwrap();
        assert!(multiset_distance(&got.eigenvalues, &[shift + r, shift - r]) < 1e-12);
    }

    #[test]
    fn twist_gauge_and_spectrum_invariance() {
        let mut s = Sampler::new(9);
        let p = s.model(3);
        assert!(check_twist_gauge(&p).unwrap() < 1e-13);
        let a = diagonalize(&mccoy_wu_hamiltonian(&p).unwrap()).unwrap();
        let b = diagonalize(&mccoy_wu_hamiltonian(&p.clone().untwisted()).unwrap()).unwrap();
        assert!(multiset_distance(&a.eigenvalues, &b.eigenvalues) < 1e-9);
    }

    #[test]
    fn u1_limit_commutes_with_total_sz() {
        let mut s = Sampler::new(10);
        let mut p = s.model(3).untwisted();
        p.boundary.k_plus = ZERO;
        p.boundary.k_minus = ZERO;
        p.boundary.kappa_plus = ZERO;
        p.boundary.kappa_minus = ZERO;
        let h = mccoy_wu_hamiltonian(&p).unwrap();
        let mut sz = CMatrix::zeros(8, 8);
        for i in 1..=3 {
            sz += &site(&pauli::sigma3(), i, 3).unwrap();
        }
        assert!(commutator_residual(&h, &sz) < 1e-15);
    }

    #[test]
    fn first_charge_routes_agree() {
        let mut s = Sampler::new(11);
        for n in 1..=3 {
            let p = s.model(n).homogeneous();
            let fam = generators(&p, n).unwrap();
            let i = charges(&fam, &p, ChargeConvention::FirstSite).unwrap();
            let j = first_charge_two_term(&p).unwrap();
            assert!(rel_residual(&i[0], &j).unwrap() < 1e-10);
        }
    }

    #[test]
    fn spectrum_sorted_and_csv() {
        let h = CMatrix::from_diag(&[c(1.0, 1.0), c(-1.0, 0.0), c(1.0, -1.0), ZERO]);
        let sp = diagonalize(&h).unwrap();
        assert_eq!(sp.n_sites, 2);
        assert_eq!(
            sp.eigenvalues,
            vec![c(-1.0, 0.0), ZERO, c(1.0, -1.0), c(1.0, 1.0)]
        );
        let mut buf = Vec::new();
        sp.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("index,re,im\n0,"));
        assert_eq!(text.lines().count(), 5);
        assert!(diagonalize(&CMatrix::identity(3)).is_err());
    }
}
