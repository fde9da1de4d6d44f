//! Spin-1/2 realization of the (t-deformed) extended trigonometric Sklyanin
//! algebra, Lax operators `L`, `L̃`, and their algebra checks.

use serde::{Deserialize, Serialize};

use crate::error::{nonzero, Result};
use crate::linalg::{kron, pauli, rel_residual, AuxOperator, CMatrix, C64, ONE};
use crate::yang_baxter::{c_tilde, r_matrix, sqrt};

/// Generators of the untwisted algebra plus the twist factor `τ_g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SklyaninRep {
    pub q: C64,
    pub t: C64,
    pub tau1_plus: CMatrix,
    pub tau1_minus: CMatrix,
    pub tau2_plus: CMatrix,
    pub tau2_minus: CMatrix,
    pub tau12: CMatrix,
    pub tau21: CMatrix,
    pub tau_g: CMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CasimirSet {
    pub w_plus: C64,
    pub w_minus: C64,
    pub w01: C64,
    pub w02: C64,
    pub w: C64,
}

impl CasimirSet {
    /// Closed-form values for the spin-1/2 realization.
    pub fn spin_half(q: C64) -> Self {
        let s = sqrt(q);
        Self {
            w_plus: s.inv(),
            w_minus: s,
            w01: -ONE,
            w02: -ONE,
            w: q + q.inv(),
        }
    }
}

/// `diag(q^{p}, q^{−p})`, i.e. `q^{pσ₃}`.
fn q_pow_sigma3(q: C64, p: f64) -> CMatrix {
    let x = q.powf(p);
    CMatrix::from_diag(&[x, x.inv()])
}

pub fn spin_half_rep(q: C64, t: C64) -> Result<SklyaninRep> {
    nonzero(q, "q")?;
    nonzero(t, "t")?;
    let q4 = q.powf(0.25);
    let ct = c_tilde(q);
    let st = sqrt(t);
    Ok(SklyaninRep {
        q,
        t,
        tau1_plus: q_pow_sigma3(q, -0.25).scale(-q4.inv()),
        tau1_minus: q_pow_sigma3(q, 0.25).scale(q4),
        tau2_plus: q_pow_sigma3(q, 0.25).scale(-q4.inv()),
        tau2_minus: q_pow_sigma3(q, -0.25).scale(q4),
        tau12: pauli::sigma_minus().scale(ct),
        tau21: pauli::sigma_plus().scale(ct),
        tau_g: CMatrix::from_diag(&[st, st.inv()]),
    })
}

impl SklyaninRep {
    pub fn sqrt_t(&self) -> C64 {
        sqrt(self.t)
    }

    /// Casimir values read off the realization (each is a multiple of `I₂`).
    pub fn casimirs(&self) -> CasimirSet {
        let s = sqrt(self.q);
        let w = &(&(&self.tau12 * &self.tau21) - &(&self.tau1_minus * &self.tau2_plus).scale(s))
            - &(&self.tau1_plus * &self.tau2_minus).scale(s.inv());
        CasimirSet {
            w_plus: (&self.tau1_plus * &self.tau2_plus).get(0, 0),
            w_minus: (&self.tau1_minus * &self.tau2_minus).get(0, 0),
            w01: (&self.tau1_minus * &self.tau1_plus).get(0, 0),
            w02: (&self.tau2_minus * &self.tau2_plus).get(0, 0),
            w: w.get(0, 0),
        }
    }

    /// Residuals that every Casimir expression is a scalar matrix, including
    /// both forms of the fifth Casimir.
    pub fn casimir_scalar_residuals(&self) -> Vec<(String, f64)> {
        let s = sqrt(self.q);
        let cas = self.casimirs();
        let id = CMatrix::identity(2);
        let w_a = &(&(&self.tau12 * &self.tau21) - &(&self.tau1_minus * &self.tau2_plus).scale(s))
            - &(&self.tau1_plus * &self.tau2_minus).scale(s.inv());
        let w_b = &(&(&self.tau21 * &self.tau12)
            - &(&self.tau1_minus * &self.tau2_plus).scale(s.inv()))
            - &(&self.tau1_plus * &self.tau2_minus).scale(s);
        let checks = [
            ("w+", &self.tau1_plus * &self.tau2_plus, cas.w_plus),
            ("w-", &self.tau1_minus * &self.tau2_minus, cas.w_minus),
            ("w01", &self.tau1_minus * &self.tau1_plus, cas.w01),
            ("w02", &self.tau2_minus * &self.tau2_plus, cas.w02),
            ("w (12·21 form)", w_a, cas.w),
            ("w (21·12 form)", w_b, cas.w),
        ];
        checks
            .into_iter()
            .map(|(n, m, z)| (n.to_string(), rel_residual(&m, &id.scale(z)).unwrap()))
            .collect()
    }

    /// Twisted generators `τᵢ^± = τ̃ᵢ^±τ_g`, `τ₁₂ = t^{−1/2}τ̃₁₂τ_g`, `τ₂₁ = t^{1/2}τ̃₂₁τ_g`.
    pub fn twisted(&self) -> [CMatrix; 6] {
        let st = self.sqrt_t();
        let g = &self.tau_g;
        [
            &self.tau1_plus * g,
            &self.tau1_minus * g,
            &self.tau2_plus * g,
            &self.tau2_minus * g,
            (&self.tau12 * g).scale(st.inv()),
            (&self.tau21 * g).scale(st),
        ]
    }
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    rel_residual(a, b).expect("2x2 relation")
}

/// Residuals of the t-deformed algebra relations on the twisted generators.
/// The `τ₂^±τ₂₁` line is the exchange relation that follows from RLL.
pub fn check_twisted_relations(rep: &SklyaninRep) -> Vec<(String, f64)> {
    let [t1p, t1m, t2p, t2m, t12, t21] = rep.twisted();
    let (q, t) = (rep.q, rep.t);
    let s = sqrt(q);
    let ct = c_tilde(q);
    let mut out = Vec::new();
    let diag = [("t1+", &t1p), ("t1-", &t1m), ("t2+", &t2p), ("t2-", &t2m)];
    let mut comm = 0.0f64;
    for (_, a) in &diag {
        for (_, b) in &diag {
            comm = comm.max(rel(&(*a * *b), &(*b * *a)));
        }
    }
    out.push(("[tau_i^e, tau_j^e'] = 0".to_string(), comm));
    for (sign, t1, t2) in [(1.0, &t1p, &t2p), (-1.0, &t1m, &t2m)] {
        let qs = s.powf(sign);
        let pm = if sign > 0.0 { "+" } else { "-" };
        out.push((
            format!("tau1{pm} tau12 = t^-1 q^(±1/2) tau12 tau1{pm}"),
            rel(&(t1 * &t12), &(&t12 * t1).scale(qs / t)),
        ));
        out.push((
            format!("tau2{pm} tau12 = t^-1 q^(∓1/2) tau12 tau2{pm}"),
            rel(&(t2 * &t12), &(&t12 * t2).scale(qs.inv() / t)),
        ));
        out.push((
            format!("tau1{pm} tau21 = t q^(∓1/2) tau21 tau1{pm}"),
            rel(&(t1 * &t21), &(&t21 * t1).scale(t / qs)),
        ));
        out.push((
            format!("tau2{pm} tau21 = t q^(±1/2) tau21 tau2{pm}"),
            rel(&(t2 * &t21), &(&t21 * t2).scale(t * qs)),
        ));
    }
    let lhs = &(&t21 * &t12).scale(t) - &(&t12 * &t21).scale(t.inv());
    let rhs = (&(&t1p * &t2m) - &(&t1m * &t2p)).scale(ct);
    out.push((
        "t tau21 tau12 - t^-1 tau12 tau21".to_string(),
        rel(&lhs, &rhs),
    ));
    out
}

/// The line `τ₂^±τ₁₂ = t q^{±1/2} τ₂₁τ₂^±`, a miswritten exchange relation
/// which mixes `τ₁₂` and `τ₂₁` and does not hold.
pub fn mixed_exchange_line(rep: &SklyaninRep) -> Vec<(String, f64)> {
    let [_, _, t2p, t2m, t12, t21] = rep.twisted();
    let s = sqrt(rep.q);
    [(1.0, t2p, "+"), (-1.0, t2m, "-")]
        .into_iter()
        .map(|(sign, t2, pm)| {
            (
                format!("tau2{pm} tau12 = t q^(±1/2) tau21 tau2{pm}"),
                rel(&(&t2 * &t12), &(&t21 * &t2).scale(rep.t * s.powf(sign))),
            )
        })
        .collect()
}

/// Residuals of the untwisted algebra relations, reading the left factor of
/// each exchange relation as `τ̃ᵢ^±`.
pub fn check_untwisted_relations(rep: &SklyaninRep) -> Vec<(String, f64)> {
    let s = sqrt(rep.q);
    let ct = c_tilde(rep.q);
    let mut out = Vec::new();
    for (sign, t1, t2) in [
        (1.0, &rep.tau1_plus, &rep.tau2_plus),
        (-1.0, &rep.tau1_minus, &rep.tau2_minus),
    ] {
        let qs = s.powf(sign);
        let pm = if sign > 0.0 { "+" } else { "-" };
        out.push((
            format!("tau1{pm} tau12 = q^(±1/2) tau12 tau1{pm}"),
            rel(&(t1 * &rep.tau12), &(&rep.tau12 * t1).scale(qs)),
        ));
        out.push((
            format!("tau2{pm} tau12 = q^(∓1/2) tau12 tau2{pm}"),
            rel(&(t2 * &rep.tau12), &(&rep.tau12 * t2).scale(qs.inv())),
        ));
        out.push((
            format!("tau1{pm} tau21 = q^(∓1/2) tau21 tau1{pm}"),
            rel(&(t1 * &rep.tau21), &(&rep.tau21 * t1).scale(qs.inv())),
        ));
        out.push((
            format!("tau2{pm} tau21 = q^(±1/2) tau21 tau2{pm}"),
            rel(&(t2 * &rep.tau21), &(&rep.tau21 * t2).scale(qs)),
        ));
    }
    let lhs = rep.tau21.commutator(&rep.tau12);
    let rhs = (&(&rep.tau1_plus * &rep.tau2_minus) - &(&rep.tau1_minus * &rep.tau2_plus)).scale(ct);
    out.push((
        "[tau21, tau12] = c(tau1+ tau2- - tau1- tau2+)".to_string(),
        rel(&lhs, &rhs),
    ));
    out
}

/// Residuals of `τ_gτ̃₁₂ = t⁻¹τ̃₁₂τ_g`, `τ_gτ̃₂₁ = tτ̃₂₁τ_g`, `[τ_g, τ̃ᵢ^±] = 0`.
pub fn check_tau_g(rep: &SklyaninRep) -> Vec<(String, f64)> {
    let g = &rep.tau_g;
    let mut comm = 0.0f64;
    for x in [
        &rep.tau1_plus,
        &rep.tau1_minus,
        &rep.tau2_plus,
        &rep.tau2_minus,
    ] {
        comm = comm.max(rel(&(g * x), &(x * g)));
    }
    vec![
        (
            "tau_g tau12 = t^-1 tau12 tau_g".to_string(),
            rel(&(g * &rep.tau12), &(&rep.tau12 * g).scale(rep.t.inv())),
        ),
        (
            "tau_g tau21 = t tau21 tau_g".to_string(),
            rel(&(g * &rep.tau21), &(&rep.tau21 * g).scale(rep.t)),
        ),
        ("[tau_g, tau_i^±] = 0".to_string(), comm),
    ]
}

fn lax_blocks(u: C64, rep: &SklyaninRep) -> [[CMatrix; 2]; 2] {
    let st = rep.sqrt_t();
    let ui = u.inv();
    let g = &rep.tau_g;
    [
        [
            &(&rep.tau1_minus.scale(u) + &rep.tau1_plus.scale(ui)) * g,
            &rep.tau12.scale(st.inv()) * g,
        ],
        [
            &rep.tau21.scale(st) * g,
            &(&rep.tau2_minus.scale(u) + &rep.tau2_plus.scale(ui)) * g,
        ],
    ]
}

fn lax_tilde_blocks(u: C64, rep: &SklyaninRep) -> [[CMatrix; 2]; 2] {
    let st = rep.sqrt_t();
    let s = sqrt(rep.q);
    let ui = u.inv();
    let gi = CMatrix::from_diag(&[st.inv(), st]);
    [
        [
            &gi * &(-(&rep.tau2_minus.scale(u / s) + &rep.tau2_plus.scale(s * ui))),
            &gi * &rep.tau12.scale(st.inv()),
        ],
        [
            &gi * &rep.tau21.scale(st),
            &gi * &(-(&rep.tau1_minus.scale(u / s) + &rep.tau1_plus.scale(s * ui))),
        ],
    ]
}

pub fn build_lax(u: C64, rep: &SklyaninRep) -> Result<AuxOperator> {
    nonzero(u, "u")?;
    AuxOperator::new(1, lax_blocks(u, rep))
}

pub fn build_lax_tilde(u: C64, rep: &SklyaninRep) -> Result<AuxOperator> {
    nonzero(u, "u")?;
    AuxOperator::new(1, lax_tilde_blocks(u, rep))
}

/// `L(u)` acting on site `site` of an `n_sites` chain.
pub fn lax_on_site(u: C64, rep: &SklyaninRep, site: usize, n_sites: usize) -> Result<AuxOperator> {
    nonzero(u, "u")?;
    AuxOperator::from_site(&lax_blocks(u, rep), site, n_sites)
}

pub fn lax_tilde_on_site(
    u: C64,
    rep: &SklyaninRep,
    site: usize,
    n_sites: usize,
) -> Result<AuxOperator> {
    nonzero(u, "u")?;
    AuxOperator::from_site(&lax_tilde_blocks(u, rep), site, n_sites)
}

/// `ρ(u) = w − (q^{−1/2}w₋u² + q^{1/2}w₊u⁻²)`.
pub fn rho(u: C64, q: C64, cas: &CasimirSet) -> C64 {
    let s = sqrt(q);
    cas.w - (cas.w_minus * u * u / s + s * cas.w_plus / (u * u))
}

/// Residual of `L(u)L̃(u) = ρ(u)·I`.
pub fn check_lax_inverse(u: C64, rep: &SklyaninRep) -> Result<f64> {
    let prod = build_lax(u, rep)?.mul(&build_lax_tilde(u, rep)?).to_full();
    let z = rho(u, rep.q, &rep.casimirs());
    rel_residual(&prod, &CMatrix::scalar(4, z))
}

/// `L` at `u = 1` in the factored permutation form
/// `c̃·[[E₁₁, t^{−1/2}σ₋], [t^{1/2}σ₊, E₂₂]]·τ_g`.
pub fn lax_at_one_closed_form(rep: &SklyaninRep) -> AuxOperator {
    let ct = c_tilde(rep.q);
    let st = rep.sqrt_t();
    let e11 = CMatrix::from_diag(&[ONE, crate::linalg::ZERO]);
    let e22 = CMatrix::from_diag(&[crate::linalg::ZERO, ONE]);
    let g = &rep.tau_g;
    let b = [
        [&e11.scale(ct) * g, &pauli::sigma_minus().scale(ct / st) * g],
        [&pauli::sigma_plus().scale(ct * st) * g, &e22.scale(ct) * g],
    ];
    AuxOperator::new(1, b).expect("2x2 blocks")
}

/// Expands a one-site aux operator into the two-auxiliary space:
/// `first = true` gives `L¹` (aux 1), otherwise `L²` (aux 2); quantum space last.
fn lift_two_aux(l: &AuxOperator, first: bool) -> CMatrix {
    let id2 = CMatrix::identity(2);
    let mut out = CMatrix::zeros(8, 8);
    for a in 0..2 {
        for b in 0..2 {
            let mut e = CMatrix::zeros(2, 2);
            e.set(a, b, ONE);
            let term = if first {
                kron(&kron(&e, &id2), l.block(a, b))
            } else {
                kron(&kron(&id2, &e), l.block(a, b))
            };
            out += &term;
        }
    }
    out
}

/// Residual of `R(u/v) L¹(u) L²(v) = L²(v) L¹(u) R(u/v)` with `R` built
/// at twist `r_twist`.
pub fn check_rll_with(u: C64, v: C64, rep: &SklyaninRep, r_twist: C64) -> Result<f64> {
    nonzero(v, "v")?;
    let l1 = lift_two_aux(&build_lax(u, rep)?, true);
    let l2 = lift_two_aux(&build_lax(v, rep)?, false);
    let r = kron(&r_matrix(u / v, rep.q, r_twist), &CMatrix::identity(2));
    rel_residual(&(&(&r * &l1) * &l2), &(&(&l2 * &l1) * &r))
}

/// RLL relation for a site of twist `t`; the intertwiner is the twisted
/// R-matrix at `t⁻¹` (equivalently `R₂₁` at `t`).
pub fn check_rll(u: C64, v: C64, rep: &SklyaninRep) -> Result<f64> {
    check_rll_with(u, v, rep, rep.t.inv())
}
