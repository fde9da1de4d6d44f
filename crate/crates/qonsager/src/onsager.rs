//! q-Onsager generators of the dressed boundary solution: explicit one-site
//! operators, the site-by-site recursion, scalar coefficient towers and the
//! algebraic relations they obey.

use serde::{Deserialize, Serialize};

use crate::error::{nonzero, Error, Result};
use crate::lax::{spin_half_rep, CasimirSet, SklyaninRep};
use crate::linalg::{kron, pauli, rel_residual, AuxOperator, CMatrix, C64, ONE, ZERO};
use crate::params::ModelParams;
use crate::yang_baxter::{c_tilde, q_bar, sqrt};

/// Generator lists of one chain length. Index `k` holds `W₋ₖ`, `Wₖ₊₁`,
/// `Gₖ₊₁` and `G̃ₖ₊₁` respectively.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorFamily {
    pub n_sites: usize,
    pub w_minus: Vec<CMatrix>,
    pub w_plus: Vec<CMatrix>,
    pub g: Vec<CMatrix>,
    pub g_tilde: Vec<CMatrix>,
}

impl GeneratorFamily {
    pub fn depth(&self) -> usize {
        self.w_minus.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    /// `W₀`.
    pub fn w0(&self) -> &CMatrix {
        &self.w_minus[0]
    }

    /// `W₁`.
    pub fn w1(&self) -> &CMatrix {
        &self.w_plus[0]
    }

    /// `W_k` for any integer `k` within depth: `k ≥ 1` reads the plus list,
    /// `k ≤ 0` the minus list.
    pub fn w(&self, k: isize) -> &CMatrix {
        if k >= 1 {
            &self.w_plus[(k - 1) as usize]
        } else {
            &self.w_minus[(-k) as usize]
        }
    }

    fn truncate(&mut self, depth: usize) {
        self.w_minus.truncate(depth);
        self.w_plus.truncate(depth);
        self.g.truncate(depth);
        self.g_tilde.truncate(depth);
    }
}

/// `q^{±1/2}XY − q^{∓1/2}YX`; `inverse` selects the lower signs.
pub fn q_commutator(x: &CMatrix, y: &CMatrix, q: C64, inverse: bool) -> Result<CMatrix> {
    let s = if inverse { sqrt(q).inv() } else { sqrt(q) };
    let xy = x.try_matmul(y)?;
    let yx = y.matmul(x);
    Ok(&xy.scale(s) - &yx.scale(s.inv()))
}

fn qc(x: &CMatrix, y: &CMatrix, q: C64) -> CMatrix {
    q_commutator(x, y, q, false).expect("same dimension")
}

fn qci(x: &CMatrix, y: &CMatrix, q: C64) -> CMatrix {
    q_commutator(x, y, q, true).expect("same dimension")
}

fn comm(x: &CMatrix, y: &CMatrix) -> CMatrix {
    x.commutator(y)
}

fn rr(a: &CMatrix, b: &CMatrix) -> f64 {
    rel_residual(a, b).expect("same dimension")
}

/// Elementary symmetric polynomial `e_m(xs)`.
fn elementary_symmetric(xs: &[C64], m: usize) -> C64 {
    let mut e = vec![ZERO; m + 1];
    e[0] = ONE;
    for &x in xs {
        for j in (1..=m).rev() {
            e[j] = e[j] + e[j - 1] * x;
        }
    }
    e[m]
}

/// Scalar coefficients of the `N`-site dressed solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTower {
    pub n_sites: usize,
    pub q: C64,
    pub k_plus: C64,
    pub k_minus: C64,
    pub eps_plus_n: C64,
    pub eps_minus_n: C64,
    pub omega0: C64,
    /// `α₁..α_N`.
    pub alpha: Vec<C64>,
    /// `C₀, C₋₁, …, C₋₍N₋₁₎`.
    pub c: Vec<C64>,
    /// `∏ₖ(−w₀₁⁽ᵏ⁾)`, `∏ₖ(−w₀₂⁽ᵏ⁾)`.
    pub pi1: C64,
    pub pi2: C64,
    pub rho0: C64,
}

/// `λ = q^{−1/2}w₋v² + q^{1/2}w₊v⁻²`.
fn lambda(q: C64, v: C64, cas: &CasimirSet) -> C64 {
    let s = sqrt(q);
    cas.w_minus / s * v * v + cas.w_plus * s / (v * v)
}

pub fn coefficient_tower(params: &ModelParams, n: usize) -> Result<CoefficientTower> {
    if n > params.n_sites() {
        return Err(Error::Depth(format!(
            "tower for {n} sites requested, model has {}",
            params.n_sites()
        )));
    }
    let b = &params.boundary;
    b.require_k()?;
    let q = params.q;
    let ct = c_tilde(q);
    let qq = q_bar(q);
    if ct.norm() < 1e-14 || qq.norm() < 1e-14 {
        return Err(Error::Degenerate("q = ±1".into()));
    }
    let cas = CasimirSet::spin_half(q);
    let lam: Vec<C64> = params.v[..n].iter().map(|&v| lambda(q, v, &cas)).collect();
    let (mut ep, mut em) = (b.eps_plus, b.eps_minus);
    for l in &lam {
        (ep, em) = (cas.w * em - l * ep, cas.w * ep - l * em);
    }
    let mut alpha: Vec<C64> = lam
        .iter()
        .map(|l| l * cas.w / (qq * cas.w01 * cas.w02))
        .collect();
    if n > 0 {
        alpha[0] += b.eps_plus * b.eps_minus * ct * ct / (b.k_plus * b.k_minus * qq);
    }
    let pi1 = (-cas.w01).powu(n as u32);
    let pi2 = (-cas.w02).powu(n as u32);
    let sign = |p: usize| if p.is_multiple_of(2) { ONE } else { -ONE };
    let omega0 = sign(n) * b.k_plus * b.k_minus / ct * alpha.iter().product::<C64>() * pi1 * pi2;
    let c = (0..n)
        .map(|m| sign(n - m) * qq * elementary_symmetric(&alpha, n - m - 1))
        .collect();
    let rho0 = qq * qq * b.k_plus * b.k_minus * (cas.w_minus * cas.w_plus).powu(n as u32);
    Ok(CoefficientTower {
        n_sites: n,
        q,
        k_plus: b.k_plus,
        k_minus: b.k_minus,
        eps_plus_n: ep,
        eps_minus_n: em,
        omega0,
        alpha,
        c,
        pi1,
        pi2,
        rho0,
    })
}

impl CoefficientTower {
    /// `X(u) = q^{1/2}u² + q^{−1/2}u⁻²`.
    pub fn x(&self, u: C64) -> C64 {
        let s = sqrt(self.q);
        s * u * u + (s * u * u).inv()
    }

    /// `P₋ₖ(u) = −(q^{1/2}+q^{−1/2})^{k−1} Σ_{n=k}^{N−1} X(u)^{n−k} C₋ₙ`.
    pub fn p(&self, u: C64, k: usize) -> C64 {
        let qq = q_bar(self.q);
        let x = self.x(u);
        let sum: C64 = (k..self.n_sites)
            .map(|n| x.powu((n - k) as u32) * self.c[n])
            .sum();
        -qq.powi(k as i32 - 1) * sum
    }

    /// `𝒥(u) = k₊k₋Π/c̃ · X(u)P₀(u) + ω₀`.
    pub fn j(&self, u: C64) -> C64 {
        let ct = c_tilde(self.q);
        self.k_plus * self.k_minus * self.pi1 * self.pi2 / ct * self.x(u) * self.p(u, 0)
            + self.omega0
    }
}

/// One-site `ω₀` in its direct form `−(k₊k₋wλ + c̃²ε₊ε₋w₋w₊)/(q − q⁻¹)`.
pub fn omega0_one_site(params: &ModelParams) -> Result<C64> {
    let v = *params
        .v
        .first()
        .ok_or_else(|| Error::Depth("needs one site".into()))?;
    let q = params.q;
    let b = &params.boundary;
    let cas = CasimirSet::spin_half(q);
    let ct = c_tilde(q);
    let l = lambda(q, v, &cas);
    Ok(-(b.k_plus * b.k_minus * cas.w * l
        + ct * ct * b.eps_plus * b.eps_minus * cas.w_minus * cas.w_plus)
        / (q - q.inv()))
}

fn site_one(params: &ModelParams) -> Result<(SklyaninRep, C64, C64)> {
    if params.n_sites() == 0 {
        return Err(Error::Depth("needs one site".into()));
    }
    params.boundary.require_k()?;
    let rep = spin_half_rep(params.q, params.t[0])?;
    Ok((rep, params.t[0], params.v[0]))
}

/// Explicit one-site `W₀, W₁, G₁ = [W₁,W₀]_q, G̃₁ = [W₀,W₁]_q`.
pub fn n1_generators(params: &ModelParams) -> Result<GeneratorFamily> {
    let (r, t, v) = site_one(params)?;
    let b = &params.boundary;
    let q = params.q;
    let ct = c_tilde(q);
    let st = sqrt(t);
    let w0 = &(&(&r.tau21 * &r.tau1_minus).scale(st * b.k_plus * v / ct)
        - &(&r.tau12 * &r.tau2_plus).scale(b.k_minus / (st * v * ct)))
        - &(&r.tau1_minus * &r.tau2_plus).scale(b.eps_plus);
    let w1 = &(&(&r.tau12 * &r.tau2_minus).scale(b.k_minus * v / (st * ct))
        - &(&r.tau21 * &r.tau1_plus).scale(st * b.k_plus / (v * ct)))
        - &(&r.tau1_plus * &r.tau2_minus).scale(b.eps_minus);
    let g1 = qc(&w1, &w0, q);
    let gt1 = qc(&w0, &w1, q);
    Ok(GeneratorFamily {
        n_sites: 1,
        w_minus: vec![w0],
        w_plus: vec![w1],
        g: vec![g1],
        g_tilde: vec![gt1],
    })
}

/// One-site `G₁` and `G̃₁` from their expanded displays in terms of the
/// algebra generators (independent of the q-commutator).
pub fn n1_g_expanded(params: &ModelParams) -> Result<(CMatrix, CMatrix)> {
    let (r, t, v) = site_one(params)?;
    let b = &params.boundary;
    let q = params.q;
    let (s, ct, qq) = (sqrt(q), c_tilde(q), q_bar(q));
    let st = sqrt(t);
    let cas = CasimirSet::spin_half(q);
    let (w01, w02) = (cas.w01, cas.w02);
    let l = lambda(q, v, &cas);
    let id = CMatrix::identity(2);
    let sq = |m: &CMatrix| m * m;
    let scalar = ct * w01 * w02 * b.eps_minus * b.eps_plus
        + b.k_plus * b.k_minus * cas.w * l / (w01 * w02 * ct);
    let g1 = &(&(&sq(&r.tau12).scale(-w02 / t * qq * b.k_minus * b.k_minus / ct)
        + &(&sq(&r.tau1_minus).scale(v * v / s) + &sq(&r.tau1_plus).scale(s / (v * v)))
            .scale(w02 * qq * b.k_plus * b.k_minus / ct))
        + &id.scale(scalar))
        - &(&(&r.tau12 * &r.tau1_plus).scale(-s / v * b.eps_minus)
            + &(&r.tau12 * &r.tau1_minus).scale(v / s * b.eps_plus))
            .scale(w02 * b.k_minus / st * qq);
    let gt1 = &(&(&sq(&r.tau21).scale(-w01 * t * qq * b.k_plus * b.k_plus / ct)
        + &(&sq(&r.tau2_minus).scale(v * v / s) + &sq(&r.tau2_plus).scale(s / (v * v)))
            .scale(w01 * qq * b.k_plus * b.k_minus / ct))
        + &id.scale(scalar))
        - &(&(&r.tau21 * &r.tau2_plus).scale(-s / v * b.eps_plus)
            + &(&r.tau21 * &r.tau2_minus).scale(v / s * b.eps_minus))
            .scale(w01 * b.k_plus * st * qq);
    Ok((g1, gt1))
}

/// The `N = 0` scalar data: `W₋ₗ = ε_{(−)^l}`, `W_{l+1} = ε_{(−)^{l+1}}`,
/// `G = G̃ = c̃ε₊ε₋`.
pub fn scalar_initial_family(params: &ModelParams, depth: usize) -> GeneratorFamily {
    let b = &params.boundary;
    let ct = c_tilde(params.q);
    let one = |z: C64| CMatrix::scalar(1, z);
    let alt = |l: usize, even: C64, odd: C64| one(if l.is_multiple_of(2) { even } else { odd });
    GeneratorFamily {
        n_sites: 0,
        w_minus: (0..depth)
            .map(|l| alt(l, b.eps_plus, b.eps_minus))
            .collect(),
        w_plus: (0..depth)
            .map(|l| alt(l, b.eps_minus, b.eps_plus))
            .collect(),
        g: vec![one(ct * b.eps_plus * b.eps_minus); depth],
        g_tilde: vec![one(ct * b.eps_plus * b.eps_minus); depth],
    }
}

/// One-site family to arbitrary depth: the explicit generators extended
/// through the one-site closure relation.
pub fn level_one(params: &ModelParams, depth: usize) -> Result<GeneratorFamily> {
    let mut fam = n1_generators(params)?;
    let tower = coefficient_tower(params, 1)?;
    let qq = q_bar(params.q);
    let a = tower.alpha[0];
    let (ep, em) = (tower.eps_plus_n, tower.eps_minus_n);
    let id = CMatrix::identity(2);
    for k in 1..depth {
        let (em_k, ep_k) = if k % 2 == 1 { (ep, em) } else { (em, ep) };
        let wm = &fam.w_minus[k - 1].scale(a / qq) + &id.scale(em_k / qq);
        let wp = &fam.w_plus[k - 1].scale(a / qq) + &id.scale(ep_k / qq);
        let g = fam.g[k - 1].scale(a / qq);
        let gt = fam.g_tilde[k - 1].scale(a / qq);
        fam.w_minus.push(wm);
        fam.w_plus.push(wp);
        fam.g.push(g);
        fam.g_tilde.push(gt);
    }
    if depth == 0 {
        fam.truncate(0);
    }
    Ok(fam)
}

/// Level `N = prev.n_sites + 1` from level `N − 1`, new site leftmost.
/// Entries are produced in increasing `k`; each may use the `k − 1` entry of
/// the level being built.
pub fn recurse_generators(
    prev: &GeneratorFamily,
    params: &ModelParams,
    depth: usize,
) -> Result<GeneratorFamily> {
    let n = prev.n_sites + 1;
    if n > params.n_sites() {
        return Err(Error::Depth(format!(
            "site {n} beyond the {}-site model",
            params.n_sites()
        )));
    }
    if prev.depth() < depth {
        return Err(Error::Depth(format!(
            "level {} has depth {}, need {depth}",
            prev.n_sites,
            prev.depth()
        )));
    }
    let b = &params.boundary;
    b.require_k()?;
    let q = params.q;
    let (s, ct, qq) = (sqrt(q), c_tilde(q), q_bar(q));
    let cas = CasimirSet::spin_half(q);
    let (w01, w02, w) = (cas.w01, cas.w02, cas.w);
    let (kp, km) = (b.k_plus, b.k_minus);
    let t = params.t[n - 1];
    let st = sqrt(t);
    let v = params.v[n - 1];
    let r = spin_half_rep(q, t)?;
    let d = prev.dim();
    let pi1p = (-w01).powu(n as u32 - 1);
    let pi2p = (-w02).powu(n as u32 - 1);
    let pi1 = pi1p * -w01;
    let pi2 = pi2p * -w02;
    let lam = lambda(q, v, &cas);
    let self_c = lam * w / (w01 * w02 * qq * qq);
    let pref = (kp * km * qq * qq * pi1p * pi2p).inv();
    let g_init_prev = CMatrix::scalar(d, kp * km * qq * qq * pi1p * pi2p / ct);
    let g_init = CMatrix::scalar(2 * d, kp * km * qq * qq * pi1 * pi2 / ct);
    let zero_prev = CMatrix::zeros(d, d);
    let id2 = pauli::id2();

    // previous-level entry at index j, with the k = 0 conventions at j = −1
    let at = |list: &Vec<CMatrix>, j: isize, is_g: bool| -> CMatrix {
        if j < 0 {
            if is_g {
                g_init_prev.clone()
            } else {
                zero_prev.clone()
            }
        } else {
            list[j as usize].clone()
        }
    };
    let t1m_t2p = &r.tau1_minus * &r.tau2_plus;
    let t1p_t2m = &r.tau1_plus * &r.tau2_minus;
    let t21_t1m = &r.tau21 * &r.tau1_minus;
    let t21_t1p = &r.tau21 * &r.tau1_plus;
    let t12_t2p = &r.tau12 * &r.tau2_plus;
    let t12_t2m = &r.tau12 * &r.tau2_minus;
    let t12_t1p = &r.tau12 * &r.tau1_plus;
    let t12_t1m = &r.tau12 * &r.tau1_minus;
    let t21_t2p = &r.tau21 * &r.tau2_plus;
    let t21_t2m = &r.tau21 * &r.tau2_minus;
    let t12_sq = &r.tau12 * &r.tau12;
    let t21_sq = &r.tau21 * &r.tau21;
    let diag1 = &(&r.tau1_minus * &r.tau1_minus).scale(v * v / s)
        + &(&r.tau1_plus * &r.tau1_plus).scale(s / (v * v));
    let diag2 = &(&r.tau2_minus * &r.tau2_minus).scale(v * v / s)
        + &(&r.tau2_plus * &r.tau2_plus).scale(s / (v * v));

    let mut out = GeneratorFamily {
        n_sites: n,
        w_minus: Vec::with_capacity(depth),
        w_plus: Vec::with_capacity(depth),
        g: Vec::with_capacity(depth),
        g_tilde: Vec::with_capacity(depth),
    };
    for k in 0..depth {
        let ki = k as isize;
        let wm0 = at(&prev.w_minus, ki, false);
        let wm1 = at(&prev.w_minus, ki - 1, false);
        let wp0 = at(&prev.w_plus, ki, false);
        let wp1 = at(&prev.w_plus, ki - 1, false);
        let g0 = at(&prev.g, ki, true);
        let g1 = at(&prev.g, ki - 1, true);
        let gt0 = at(&prev.g_tilde, ki, true);
        let gt1 = at(&prev.g_tilde, ki - 1, true);

        let mut wm = &(&kron(&t1m_t2p, &(&wp1 - &wm0)) + &kron(&id2, &wp1).scale(w / qq))
            - &kron(&id2, &wm1).scale(lam / qq);
        wm += &(&kron(&t21_t1m, &g1).scale(pref * kp * st * v * pi1p)
            - &kron(&t12_t2p, &gt1).scale(pref * km / (st * v) * pi2p));
        let mut wp = &(&kron(&t1p_t2m, &(&wm1 - &wp0)) + &kron(&id2, &wm1).scale(w / qq))
            - &kron(&id2, &wp1).scale(lam / qq);
        wp += &(&kron(&t12_t2m, &gt1).scale(pref * km / st * v * pi2p)
            - &kron(&t21_t1p, &g1).scale(pref * kp * st / v * pi1p));
        if k > 0 {
            wm += &out.w_minus[k - 1].scale(self_c);
            wp += &out.w_plus[k - 1].scale(self_c);
        }

        let mut g = &(&kron(&t12_sq, &gt1).scale(km / t * pi2 / (kp * qq * pi1p))
            + &kron(&diag1, &g1).scale(w02 / qq))
            + &kron(&id2, &g0).scale(w01 * w02);
        g += &(&kron(&t12_t1p, &(&wm1 - &wp0)).scale(s / v)
            - &kron(&t12_t1m, &(&wp1 - &wm0)).scale(v / s))
            .scale(km / st * qq * pi2);
        let mut gt = &(&kron(&t21_sq, &g1).scale(kp * t * pi1 / (km * qq * pi2p))
            + &kron(&diag2, &gt1).scale(w01 / qq))
            + &kron(&id2, &gt0).scale(w01 * w02);
        gt += &(&kron(&t21_t2p, &(&wp1 - &wm0)).scale(s / v)
            - &kron(&t21_t2m, &(&wm1 - &wp0)).scale(v / s))
            .scale(kp * st * qq * pi1);
        if k > 0 {
            g += &out.g[k - 1].scale(self_c);
            gt += &out.g_tilde[k - 1].scale(self_c);
        } else {
            g += &g_init.scale(self_c);
            gt += &g_init.scale(self_c);
        }

        out.w_minus.push(wm);
        out.w_plus.push(wp);
        out.g.push(g);
        out.g_tilde.push(gt);
    }
    Ok(out)
}

/// Families for `1..=N` sites, each to the given depth. Level one comes from
/// the explicit generators.
pub fn build_generators(params: &ModelParams, depth: usize) -> Result<Vec<GeneratorFamily>> {
    let n = params.n_sites();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut fams = vec![level_one(params, depth)?];
    for _ in 2..=n {
        let next = recurse_generators(fams.last().expect("non-empty"), params, depth)?;
        fams.push(next);
    }
    Ok(fams)
}

/// The `N`-site family to the given depth.
pub fn generators(params: &ModelParams, depth: usize) -> Result<GeneratorFamily> {
    build_generators(params, depth)?
        .pop()
        .ok_or_else(|| Error::Depth("model has no sites".into()))
}

/// `W₀, W₁` through the two-term recursion
/// `W⁽ᴺ⁾ = (k₊t_N^{1/2}σ₊ + k₋t_N^{−1/2}σ₋)⊗I + q^{±σ₃/2}⊗W⁽ᴺ⁻¹⁾`
/// starting from `W₀⁽⁰⁾ = ε₊`, `W₁⁽⁰⁾ = ε₋`. Valid for homogeneous chains.
pub fn two_term_w(params: &ModelParams) -> (CMatrix, CMatrix) {
    let b = &params.boundary;
    let s = sqrt(params.q);
    let up = CMatrix::from_diag(&[s, s.inv()]);
    let down = CMatrix::from_diag(&[s.inv(), s]);
    let mut w0 = CMatrix::scalar(1, b.eps_plus);
    let mut w1 = CMatrix::scalar(1, b.eps_minus);
    for &t in &params.t {
        let st = sqrt(t);
        let hop =
            &pauli::sigma_plus().scale(b.k_plus * st) + &pauli::sigma_minus().scale(b.k_minus / st);
        let id = CMatrix::identity(w0.rows());
        w0 = &kron(&hop, &id) + &kron(&up, &w0);
        w1 = &kron(&hop, &id) + &kron(&down, &w1);
    }
    (w0, w1)
}

/// Blocks `𝒜, ℬ, 𝒞, 𝒟` of the dressed solution assembled from the
/// generators and the scalar tower.
pub fn blocks_from_generators(
    u: C64,
    fam: &GeneratorFamily,
    tower: &CoefficientTower,
) -> Result<AuxOperator> {
    nonzero(u, "u")?;
    let n = fam.n_sites;
    if tower.n_sites != n || fam.depth() < n {
        return Err(Error::Depth("generator depth below chain length".into()));
    }
    let q = tower.q;
    let (s, qq) = (sqrt(q), q_bar(q));
    let d = fam.dim();
    let id = CMatrix::identity(d);
    let uu = u * u - (u * u).inv();
    let sum = |list: &Vec<CMatrix>| {
        let mut acc = CMatrix::zeros(d, d);
        for (k, m) in list.iter().take(n).enumerate() {
            acc += &m.scale(tower.p(u, k));
        }
        acc
    };
    let (swm, swp, sg, sgt) = (
        sum(&fam.w_minus),
        sum(&fam.w_plus),
        sum(&fam.g),
        sum(&fam.g_tilde),
    );
    let (ep, em) = (tower.eps_plus_n, tower.eps_minus_n);
    let a = &id.scale(u * ep + em / u) + &(&swm.scale(u * s) - &swp.scale((u * s).inv())).scale(uu);
    let dd =
        &id.scale(u * em + ep / u) + &(&swp.scale(u * s) - &swm.scale((u * s).inv())).scale(uu);
    let j = id.scale(tower.j(u));
    let bb = (&j + &sg.scale(qq.inv())).scale(uu / (tower.k_minus * tower.pi2));
    let cc = (&j + &sgt.scale(qq.inv())).scale(uu / (tower.k_plus * tower.pi1));
    AuxOperator::new(n, [[a, bb], [cc, dd]])
}

/// Residuals of the two Askey–Wilson relations at one site:
/// `[W₁,[W₁,W₀]_q]_{q⁻¹} = ρ₀W₀ + (q−q⁻¹)ω₀W₁ − (q^{1/2}+q^{−1/2})k₊k₋w₋w₊ε₋⁽¹⁾` and
/// its `0 ↔ 1`, `ε₋ → ε₊` mirror.
pub fn check_askey_wilson(fam: &GeneratorFamily, tower: &CoefficientTower) -> Result<[f64; 2]> {
    askey_wilson(fam, tower, true)
}

pub(crate) fn askey_wilson(
    fam: &GeneratorFamily,
    tower: &CoefficientTower,
    inhomogeneous: bool,
) -> Result<[f64; 2]> {
    if fam.n_sites != 1 || tower.n_sites != 1 {
        return Err(Error::Depth("Askey-Wilson relations are one-site".into()));
    }
    let q = tower.q;
    let qq = q_bar(q);
    let cas = CasimirSet::spin_half(q);
    let (w0, w1) = (fam.w0(), fam.w1());
    let id = CMatrix::identity(2);
    let inh = if inhomogeneous {
        qq * tower.k_plus * tower.k_minus * cas.w_minus * cas.w_plus
    } else {
        ZERO
    };
    let rhs = |x: &CMatrix, y: &CMatrix, e: C64| {
        &(&x.scale(tower.rho0) + &y.scale((q - q.inv()) * tower.omega0)) - &id.scale(inh * e)
    };
    let lhs1 = qci(w1, &qc(w1, w0, q), q);
    let lhs2 = qci(w0, &qc(w0, w1, q), q);
    Ok([
        rr(&lhs1, &rhs(w0, w1, tower.eps_minus_n)),
        rr(&lhs2, &rhs(w1, w0, tower.eps_plus_n)),
    ])
}

/// `[W₁,[W₁,[W₁,W₀]_q]_{q⁻¹}] = ρ₀[W₁,W₀]` and the mirror.
pub fn check_q_dolan_grady(fam: &GeneratorFamily, tower: &CoefficientTower) -> Result<[f64; 2]> {
    if fam.depth() == 0 {
        return Err(Error::Depth("empty family".into()));
    }
    let q = tower.q;
    let (w0, w1) = (fam.w0(), fam.w1());
    let side = |a: &CMatrix, b: &CMatrix| {
        (
            comm(a, &qci(a, &qc(a, b, q), q)),
            comm(a, b).scale(tower.rho0),
        )
    };
    let (l1, r1) = side(w1, w0);
    let (l2, r2) = side(w0, w1);
    Ok([rr(&l1, &r1), rr(&l2, &r2)])
}

/// Named residual groups for the relations among generators of one level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationTable {
    pub entries: Vec<(String, f64)>,
}

impl RelationTable {
    pub fn max(&self) -> f64 {
        self.entries.iter().map(|e| e.1).fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.0 == name).map(|e| e.1)
    }
}

/// Depth needed by [`check_relations`] for `N` sites.
pub fn relations_depth(n: usize) -> usize {
    n + 3
}

/// Residuals of the exchange, closure and lowest-order relations.
/// Commutator-type identities are measured as `rel_residual(XY, YX)`.
pub fn check_relations(fam: &GeneratorFamily, tower: &CoefficientTower) -> Result<RelationTable> {
    let n = fam.n_sites;
    if fam.depth() < relations_depth(n) {
        return Err(Error::Depth(format!(
            "relations at {n} sites need depth {}, have {}",
            relations_depth(n),
            fam.depth()
        )));
    }
    let q = tower.q;
    let (ct, qq) = (c_tilde(q), q_bar(q));
    let id = CMatrix::identity(fam.dim());
    let (wm, wp, g, gt) = (&fam.w_minus, &fam.w_plus, &fam.g, &fam.g_tilde);
    let mut entries = Vec::new();
    let fmax = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, f64::max);

    let lists = [("W-", wm), ("W+", wp), ("G", g), ("G~", gt)];
    let ks = 0..n;
    let within = fmax(&mut lists.iter().flat_map(|(_, x)| {
        ks.clone()
            .flat_map(move |k| (0..n).map(move |l| rr(&(&x[k] * &x[l]), &(&x[l] * &x[k]))))
    }));
    entries.push(("commuting within families".to_string(), within));

    let mut cross = 0.0f64;
    for i in 0..4 {
        for j in (i + 1)..4 {
            let (x, y) = (lists[i].1, lists[j].1);
            for k in 0..n {
                for l in 0..n {
                    cross = cross.max(rr(&comm(&x[k], &y[l]), &comm(&x[l], &y[k])));
                }
            }
        }
    }
    entries.push(("symmetric exchange".to_string(), cross));

    let mut qex = 0.0f64;
    for k in 1..=n as isize {
        for l in 1..=n as isize {
            let (ku, lu) = (k as usize - 1, l as usize - 1);
            let dk = fam.w(k) - fam.w(-k);
            let dl = fam.w(l) - fam.w(-l);
            let ek = fam.w(1 - k) - fam.w(k + 1);
            let el = fam.w(1 - l) - fam.w(l + 1);
            qex = qex
                .max(rr(&qc(&dk, &g[lu], q), &qc(&dl, &g[ku], q)))
                .max(rr(&qci(&dk, &gt[lu], q), &qci(&dl, &gt[ku], q)))
                .max(rr(&qci(&ek, &g[lu], q), &qci(&el, &g[ku], q)))
                .max(rr(&qc(&ek, &gt[lu], q), &qc(&el, &gt[ku], q)));
        }
    }
    entries.push(("q-bracket exchange".to_string(), qex));

    let pi = tower.pi1 * tower.pi2;
    let pref = qq.powu(3) * tower.k_plus * tower.k_minus / ct * pi;
    let mut ggr = 0.0f64;
    for k in 1..=n as isize {
        for l in 1..=n as isize {
            let (ku, lu) = (k as usize - 1, l as usize - 1);
            let lhs = &(&gt[lu] * &g[ku]) - &(&gt[ku] * &g[lu]);
            let rhs = (&comm(fam.w(k), fam.w(-l)) + &comm(fam.w(-k), fam.w(l))).scale(pref);
            ggr = ggr.max(rr(&lhs, &rhs));
        }
    }
    entries.push(("G~G exchange".to_string(), ggr));

    // Σ-closure: a·X_l + Σ_{k=1}^{N} qq^{k−1}C₋ₖ₊₁·X_{l+k} + ε-term = 0, read as
    // the recursion for the top generator X_{l+N}: the terms grow
    // geometrically and cancel down to the O(1) ε-term, so comparing the
    // full sum with the ε-term would measure roundoff of the large terms.
    let a = -ct * tower.omega0 / (tower.k_plus * tower.k_minus * pi);
    let (ep, em) = (tower.eps_plus_n, tower.eps_minus_n);
    let closure = |x: &Vec<CMatrix>, l: usize, eps: C64| -> f64 {
        let top = x[n + l].scale(qq.powu(n as u32 - 1) * tower.c[n - 1]);
        let mut rest = &x[l].scale(-a) - &id.scale(eps);
        for k in 1..n {
            rest = &rest - &x[k + l].scale(qq.powu(k as u32 - 1) * tower.c[k - 1]);
        }
        rr(&top, &rest)
    };
    let mut clos = [0.0f64; 4];
    for l in 0..3 {
        let (e_minus_list, e_plus_list) = if l % 2 == 0 { (ep, em) } else { (em, ep) };
        clos[0] = clos[0].max(closure(wm, l, e_minus_list));
        clos[1] = clos[1].max(closure(wp, l, e_plus_list));
        clos[2] = clos[2].max(closure(g, l, ZERO));
        clos[3] = clos[3].max(closure(gt, l, ZERO));
    }
    for (name, v) in ["W-", "W+", "G", "G~"].iter().zip(clos) {
        entries.push((format!("closure {name}"), v));
    }

    entries.push((
        "G1 = [W1,W0]_q".to_string(),
        rr(&g[0], &qc(&wp[0], &wm[0], q)).max(rr(&gt[0], &qc(&wm[0], &wp[0], q))),
    ));
    let rho = tower.rho0;
    entries.push((
        "W2 lowest order".to_string(),
        rr(&wp[1], &(&wm[0] - &qci(&wp[0], &g[0], q).scale(rho.inv()))),
    ));
    entries.push((
        "W-1 lowest order".to_string(),
        rr(&wm[1], &(&wp[0] + &qc(&wm[0], &g[0], q).scale(rho.inv()))),
    ));
    Ok(RelationTable { entries })
}

/// Denominator convention for the `G`, `G̃` terms of the charges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChargeConvention {
    /// One-site values `w₀ᵢ⁽¹⁾`.
    FirstSite,
    /// Products `∏ₖw₀ᵢ⁽ᵏ⁾` over the chain.
    SiteProduct,
}

impl ChargeConvention {
    pub const ALL: [ChargeConvention; 2] = [Self::FirstSite, Self::SiteProduct];

    fn denominators(self, q: C64, n: usize) -> (C64, C64) {
        let cas = CasimirSet::spin_half(q);
        match self {
            Self::FirstSite => (cas.w01, cas.w02),
            Self::SiteProduct => (cas.w01.powu(n as u32), cas.w02.powu(n as u32)),
        }
    }
}

/// `I_{2k+1} = κW₋ₖ + κ*Wₖ₊₁ − κ₊/(k₊d₁)G̃ₖ₊₁ − κ₋/(k₋d₂)Gₖ₊₁`, `k = 0..N−1`.
pub fn charges(
    fam: &GeneratorFamily,
    params: &ModelParams,
    convention: ChargeConvention,
) -> Result<Vec<CMatrix>> {
    let b = &params.boundary;
    b.require_k()?;
    let n = fam.n_sites;
    if fam.depth() < n {
        return Err(Error::Depth("generator depth below chain length".into()));
    }
    let (d1, d2) = convention.denominators(params.q, n);
    Ok((0..n)
        .map(|k| {
            &(&(&fam.w_minus[k].scale(b.kappa) + &fam.w_plus[k].scale(b.kappa_star))
                - &fam.g_tilde[k].scale(b.kappa_plus / (b.k_plus * d1)))
                - &fam.g[k].scale(b.kappa_minus / (b.k_minus * d2))
        })
        .collect())
}

/// Largest `rel_residual(I_a I_b, I_b I_a)` over all pairs.
pub fn check_charges_commute(charges: &[CMatrix]) -> f64 {
    let mut m = 0.0f64;
    for a in charges {
        for b in charges {
            m = m.max(rr(&(a * b), &(b * a)));
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::dressed_kminus;
    use crate::params::Sampler;

    #[test]
    fn q_commutator_identities() {
        let mut s = Sampler::new(1);
        let q = s.deformation();
        let x = CMatrix::m2(s.generic(), s.generic(), s.generic(), s.generic());
        let y = CMatrix::m2(s.generic(), s.generic(), s.generic(), s.generic());
        let xx = q_commutator(&x, &x, q, false).unwrap();
        assert!(rr(&xx, &(&x * &x).scale(c_tilde(q))) < 1e-14);
        let iy = q_commutator(&CMatrix::identity(2), &y, q, false).unwrap();
        assert!(rr(&iy, &y.scale(c_tilde(q))) < 1e-14);
        let plain = q_commutator(&x, &y, ONE, false).unwrap();
        assert!(rr(&plain, &x.commutator(&y)) < 1e-15);
        assert!(q_commutator(&x, &CMatrix::identity(4), q, false).is_err());
    }

    #[test]
    fn elementary_symmetric_small() {
        let xs = [ONE, C64::new(2.0, 0.0), C64::new(3.0, 0.0)];
        assert_eq!(elementary_symmetric(&xs, 0), ONE);
        assert_eq!(elementary_symmetric(&xs, 1), C64::new(6.0, 0.0));
        assert_eq!(elementary_symmetric(&xs, 2), C64::new(11.0, 0.0));
        assert_eq!(elementary_symmetric(&xs, 3), C64::new(6.0, 0.0));
    }

    #[test]
    fn one_site_tower() {
        let mut s = Sampler::new(2);
        let p = s.model(1).homogeneous();
        let t = coefficient_tower(&p, 1).unwrap();
        let q = p.q;
        let b = p.boundary;
        // at v = 1 the ε± coefficient is −2 and the ε∓ coefficient q + 1/q
        let want = -2.0 * b.eps_plus + (q + q.inv()) * b.eps_minus;
        assert!((t.eps_plus_n - want).norm() < 1e-13);
        assert!((t.omega0 - omega0_one_site(&p).unwrap()).norm() < 1e-12 * t.omega0.norm());
        assert!((t.p(s.spectral(), 0) - ONE).norm() < 1e-14);
        assert!((t.rho0 - q_bar(q) * q_bar(q) * b.k_plus * b.k_minus).norm() < 1e-13);
    }

    #[test]
    fn n1_expanded_matches_q_commutators() {
        let p = Sampler::new(3).model(1);
        let f = n1_generators(&p).unwrap();
        let (g1, gt1) = n1_g_expanded(&p).unwrap();
        assert!(rr(&f.g[0], &g1) < 1e-13);
        assert!(rr(&f.g_tilde[0], &gt1) < 1e-13);
    }

    #[test]
    fn n1_generators_vanish_without_boundary() {
        let mut p = Sampler::new(4).model(1);
        p.boundary.eps_plus = ZERO;
        p.boundary.eps_minus = ZERO;
        p.boundary.k_plus = ZERO;
        p.boundary.k_minus = ZERO;
        assert!(n1_generators(&p).is_err());
        p.boundary.k_plus = C64::new(1e-300, 0.0);
        p.boundary.k_minus = C64::new(1e-300, 0.0);
        let f = n1_generators(&p).unwrap();
        assert!(f.w0().norm() < 1e-250 && f.w1().norm() < 1e-250);
    }

    #[test]
    fn scalar_seed_reproduces_level_one() {
        let p = Sampler::new(5).model(1);
        let f0 = scalar_initial_family(&p, 1);
        let f1 = recurse_generators(&f0, &p, 1).unwrap();
        let n1 = n1_generators(&p).unwrap();
        for (a, b) in [
            (&f1.w_minus[0], &n1.w_minus[0]),
            (&f1.w_plus[0], &n1.w_plus[0]),
            (&f1.g[0], &n1.g[0]),
            (&f1.g_tilde[0], &n1.g_tilde[0]),
        ] {
            assert!(rr(a, b) < 1e-12, "{}", rr(a, b));
        }
    }

    #[test]
    fn blocks_match_dressing() {
        let mut s = Sampler::new(6);
        for n in 1..=3 {
            let p = s.model(n);
            let fam = generators(&p, n).unwrap();
            let tower = coefficient_tower(&p, n).unwrap();
            let u = s.spectral();
            let k = dressed_kminus(u, &p).unwrap().k;
            let f = blocks_from_generators(u, &fam, &tower).unwrap();
            assert!(rr(&k.to_full(), &f.to_full()) < 1e-11, "N={n}");
        }
    }

    #[test]
    fn one_site_relations() {
        let p = Sampler::new(7).model(1);
        let fam = generators(&p, 4).unwrap();
        let tower = coefficient_tower(&p, 1).unwrap();
        assert!(check_askey_wilson(&fam, &tower)
            .unwrap()
            .iter()
            .all(|r| *r < 1e-11));
        assert!(askey_wilson(&fam, &tower, false)
            .unwrap()
            .iter()
            .any(|r| *r > 1e-3));
        assert!(check_q_dolan_grady(&fam, &tower)
            .unwrap()
            .iter()
            .all(|r| *r < 1e-11));
        let tab = check_relations(&fam, &tower).unwrap();
        assert!(tab.max() < 1e-11, "{:?}", tab);
    }

    #[test]
    fn two_term_recursion_matches() {
        let p = Sampler::new(8).model(3).homogeneous();
        let fam = generators(&p, 1).unwrap();
        let (w0, w1) = two_term_w(&p);
        assert!(rr(fam.w0(), &w0) < 1e-12);
        assert!(rr(fam.w1(), &w1) < 1e-12);
    }

    #[test]
    fn depth_errors() {
        let p = Sampler::new(9).model(2);
        let fam = generators(&p, 2).unwrap();
        let tower = coefficient_tower(&p, 2).unwrap();
        assert!(matches!(
            check_relations(&fam, &tower),
            Err(Error::Depth(_))
        ));
        let f1 = level_one(&p, 1).unwrap();
        assert!(recurse_generators(&f1, &p, 2).is_err());
        assert!(coefficient_tower(&p, 3).is_err());
    }

    #[test]
    fn charge_conventions_agree_at_one_site() {
        let p = Sampler::new(10).model(1);
        let fam = generators(&p, 1).unwrap();
        let a = charges(&fam, &p, ChargeConvention::FirstSite).unwrap();
        let b = charges(&fam, &p, ChargeConvention::SiteProduct).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn relations_up_to_four_sites() {
        let mut s = Sampler::new(11);
        for n in 2..=4 {
            let p = s.model(n);
            let fam = generators(&p, relations_depth(n)).unwrap();
            let tower = coefficient_tower(&p, n).unwrap();
            let tab = check_relations(&fam, &tower).unwrap();
            assert!(tab.max() < 1e-8, "N={n} {:?}", tab);
            assert!(check_q_dolan_grady(&fam, &tower)
                .unwrap()
                .iter()
                .all(|r| *r < 1e-9));
            let i = charges(&fam, &p, ChargeConvention::FirstSite).unwrap();
            assert!(check_charges_commute(&i) < 1e-9);
        }
    }
}
