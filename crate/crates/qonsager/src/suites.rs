//! Verification suites and the orchestrator that runs them on a worker pool.
//!
//! Every check draws its samples from its own stream, keyed by the run seed,
//! the check's qualified name and the sample index, so results do not depend
//! on scheduling or on which other suites run.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::boundary::{
    build_kminus_c, build_kplus_c, check_dual_reflection, check_reflection,
    check_reflection_transposed, check_sixteen, dressed_kminus, dual_map_closed_form, dualize,
    fit_dual_map,
};
use crate::config::{RunConfig, SUITES};
use crate::error::{Error, Result};
use crate::lax::{
    build_lax, check_lax_inverse, check_rll, check_rll_with, check_tau_g, check_twisted_relations,
    check_untwisted_relations, lax_at_one_closed_form, mixed_exchange_line, spin_half_rep,
    CasimirSet,
};
use crate::linalg::{
    commutator_residual, embed_site, pauli, rel_residual, AuxOperator, CMatrix, C64, ONE, ZERO,
};
use crate::onsager::{
    askey_wilson, blocks_from_generators, charges, check_charges_commute, check_q_dolan_grady,
    check_relations, coefficient_tower, generators, n1_g_expanded, n1_generators, omega0_one_site,
    recurse_generators, relations_depth, scalar_initial_family, two_term_w, ChargeConvention,
};
use crate::params::{ModelParams, Sampler};
use crate::report::{CheckRecord, Comparison, Environment, SuiteReport, VerificationReport};
use crate::transfer::{
    anisotropy, check_charge_conservation, check_commutation, check_decomposition,
    check_hamiltonian_derivation, check_transfer_at_one, check_twist_gauge, check_xxz_reduction,
    decomposition_residual, diagonalize, first_charge_two_term, mccoy_wu_hamiltonian,
    multiset_distance, select_charge_convention, Spectrum, MAX_DIAG_SITES,
};
use crate::yang_baxter::{
    check_m_relation, check_twist_cocycle, check_twist_conjugation, check_unitarity, check_ybe,
    q_bar, r_matrix, zeta,
};

/// A negative control passes when its smallest residual reaches this,
/// far above every acceptance tolerance.
pub const CONTROL_FLOOR: f64 = 1e-6;

/// Environment variable holding the worker-pool size.
pub const WORKERS_ENV: &str = "QONSAGER_WORKERS";

/// One-line descriptions, in canonical order.
pub fn list_suites() -> [(&'static str, &'static str); 9] {
    let d = [
        "twisted R-matrix: Yang-Baxter, twist conjugation, unitarity, crossing",
        "RLL relation for the twisted Lax operator",
        "spin-1/2 realization: exchange relations, Casimirs, L·L̃",
        "c-number K-matrices: reflection and dual reflection equations",
        "Sklyanin dressing of K₋ on N sites",
        "q-Onsager generators: Askey-Wilson, q-Dolan-Grady, exchange relations, charges",
        "open transfer matrix: commutativity, charge decomposition, t(1)",
        "McCoy-Wu Hamiltonian: derivation, conservation, XXZ limit, twist gauge",
        "exact spectra of the Hamiltonian",
    ];
    std::array::from_fn(|i| (SUITES[i], d[i]))
}

/// Worker count from [`WORKERS_ENV`], else the available parallelism.
pub fn workers() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::Config(format!(
                "{WORKERS_ENV}={v}: expected a positive integer"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Runs the configured suites (each once, in listed order) and aggregates
/// their checks.
pub fn run_suite(config: &RunConfig) -> Result<VerificationReport> {
    config.validate()?;
    let workers = workers()?;
    let mut seen = BTreeSet::new();
    let names: Vec<&str> = config
        .suites
        .iter()
        .map(String::as_str)
        .filter(|s| seen.insert(*s))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let suites: Vec<SuiteReport> = pool.install(|| {
        names
            .par_iter()
            .map(|s| run_one(config, s))
            .collect::<Result<_>>()
    })?;
    for key in config.tolerance_overrides.keys() {
        let (suite, check) = key.split_once('.').expect("validated key");
        if let Some(rep) = suites.iter().find(|r| r.name == suite) {
            if !rep.checks.iter().any(|c| c.name == check) {
                return Err(Error::Config(format!(
                    "tolerance override `{key}` matches no check"
                )));
            }
        }
    }
    Ok(VerificationReport::new(
        config.clone(),
        Environment::current(workers),
        suites,
    ))
}

fn run_one(cfg: &RunConfig, name: &str) -> Result<SuiteReport> {
    let mut r = Runner {
        cfg,
        suite: name,
        records: Vec::new(),
    };
    match name {
        "ybe" => ybe(&mut r),
        "rll" => rll(&mut r),
        "algebra" => algebra(&mut r),
        "reflection" => reflection(&mut r),
        "dressing" => dressing(&mut r),
        "onsager" => onsager(&mut r),
        "transfer" => transfer(&mut r),
        "hamiltonian" => hamiltonian(&mut r),
        "spectrum" => spectrum(&mut r),
        other => return Err(Error::UnknownSuite(other.to_string())),
    }
    Ok(SuiteReport::new(name, r.records))
}

struct Runner<'a> {
    cfg: &'a RunConfig,
    suite: &'a str,
    records: Vec<CheckRecord>,
}

impl Runner<'_> {
    /// Runs `f` on independent sample streams and records the worst residual
    /// (largest for `AtMost`, smallest for `AtLeast`).
    fn check<F>(
        &mut self,
        name: &str,
        relation: &str,
        tol: f64,
        cmp: Comparison,
        samples: usize,
        f: F,
    ) where
        F: Fn(&mut Sampler) -> Result<f64> + Sync,
    {
        let label = format!("{}.{}", self.suite, name);
        let tol = self
            .cfg
            .tolerance_overrides
            .get(&label)
            .copied()
            .unwrap_or(tol);
        let samples = self.cfg.q_sampling.count.unwrap_or(samples);
        let cfg = self.cfg;
        let out: Vec<Result<f64>> = (0..samples as u64)
            .into_par_iter()
            .map(|i| f(&mut cfg.sampler(&label, i)))
            .collect();
        let mut worst: Option<f64> = None;
        for r in out {
            match r {
                Err(e) => {
                    self.records
                        .push(CheckRecord::error(name, relation, tol, cmp, e.to_string()));
                    return;
                }
                Ok(x) => {
                    worst = Some(match (worst, cmp) {
                        (_, _) if x.is_nan() => f64::NAN,
                        (None, _) => x,
                        (Some(w), _) if w.is_nan() => w,
                        (Some(w), Comparison::AtMost) => w.max(x),
                        (Some(w), Comparison::AtLeast) => w.min(x),
                    })
                }
            }
        }
        let rec = CheckRecord::judge(name, relation, samples, worst.unwrap_or(f64::NAN), tol, cmp);
        self.records.push(match cmp {
            Comparison::AtLeast => rec.with_note("negative control: must be rejected"),
            Comparison::AtMost => rec,
        });
    }

    fn at_most<F>(&mut self, name: &str, relation: &str, tol: f64, samples: usize, f: F)
    where
        F: Fn(&mut Sampler) -> Result<f64> + Sync,
    {
        self.check(name, relation, tol, Comparison::AtMost, samples, f)
    }

    fn control<F>(&mut self, name: &str, relation: &str, tol: f64, samples: usize, f: F)
    where
        F: Fn(&mut Sampler) -> Result<f64> + Sync,
    {
        self.check(name, relation, tol, Comparison::AtLeast, samples, f)
    }

    fn annotate(&mut self, note: String) {
        if let Some(last) = self.records.last_mut() {
            if last.note.is_none() {
                last.note = Some(note);
            }
        }
    }
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, |a, b| {
        if b.is_nan() || a.is_nan() {
            f64::NAN
        } else {
            a.max(b)
        }
    })
}

fn min_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::INFINITY, f64::min)
}

fn named_max(v: Vec<(String, f64)>) -> f64 {
    max_of(v.into_iter().map(|e| e.1))
}

/// Twist with phase in `[π/3, 5π/3]`, well away from 1; used by controls
/// whose failure needs a genuine twist.
fn far_twist(s: &mut Sampler) -> C64 {
    C64::from_polar(1.0, s.uniform(PI / 3.0, 5.0 * PI / 3.0))
}

fn cnum(k: CMatrix) -> AuxOperator {
    AuxOperator::from_c_number(&k, 0)
}

fn rel_scalar(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

fn ybe(r: &mut Runner) {
    let cfg = r.cfg;
    r.at_most(
        "ybe",
        "R12(u/v) R13(u/w) R23(v/w) = R23(v/w) R13(u/w) R12(u/v)",
        1e-10,
        100,
        |s| {
            let q = s.deformation();
            let t = cfg.twist(s);
            check_ybe(q, t, s.spectral(), s.spectral(), s.spectral())
        },
    );
    r.at_most(
        "twist conjugation",
        "F^-1 R(u;1) F^-1 = R(u; e^{-2iθ})",
        1e-12,
        20,
        |s| {
            let theta = C64::new(s.uniform(0.0, PI), 0.0);
            check_twist_conjugation(s.spectral(), s.deformation(), theta)
        },
    );
    r.at_most(
        "twist cocycle",
        "F12 F21 = 1, F12 F13 F23 = F23 F13 F12",
        1e-12,
        20,
        |s| {
            let theta = C64::new(s.uniform(0.0, PI), 0.0);
            check_twist_cocycle(theta).map(max_of)
        },
    );
    r.at_most(
        "unitarity",
        "R12(u) R21(1/u) = (q + 1/q - u² - u⁻²) I",
        1e-10,
        50,
        |s| {
            let q = s.deformation();
            let t = cfg.twist(s);
            check_unitarity(s.spectral(), q, t)
        },
    );
    let crossing = |m: CMatrix| {
        move |s: &mut Sampler| {
            let q = s.deformation();
            let t = cfg.twist(s);
            let u = loop {
                let u = s.spectral();
                if zeta(q * u, q)?.norm() > 1e-3 {
                    break u;
                }
            };
            check_m_relation(q, t, u, &m)
        }
    };
    r.at_most(
        "crossing M = I",
        "{{{R^t2(u)}^-1}^t2}^-1 = ζ(q^½u)/ζ(qu) (1⊗M) R(qu) (1⊗M)^-1, M = I",
        1e-10,
        50,
        crossing(CMatrix::identity(2)),
    );
    r.control(
        "crossing M = diag(1,2)",
        "same crossing relation with M = diag(1, 2)",
        CONTROL_FLOOR,
        20,
        crossing(CMatrix::from_diag(&[ONE, C64::new(2.0, 0.0)])),
    );
}

fn rll(r: &mut Runner) {
    let cfg = r.cfg;
    r.at_most(
        "rll",
        "R(u/v; 1/t) L1(u) L2(v) = L2(v) L1(u) R(u/v; 1/t)",
        1e-10,
        50,
        |s| {
            let rep = spin_half_rep(s.deformation(), cfg.twist(s))?;
            check_rll(s.spectral(), s.spectral(), &rep)
        },
    );
    r.control(
        "rll untwisted intertwiner",
        "RLL with R(u/v; 1) at t != 1",
        CONTROL_FLOOR,
        20,
        |s| {
            let rep = spin_half_rep(s.deformation(), far_twist(s))?;
            check_rll_with(s.spectral(), s.spectral(), &rep, ONE)
        },
    );
    r.at_most(
        "lax at one",
        "L(1) = c̃ [[E11, t^-½ σ-], [t^½ σ+, E22]] τ_g",
        1e-12,
        20,
        |s| {
            let rep = spin_half_rep(s.deformation(), cfg.twist(s))?;
            rel_residual(
                &build_lax(ONE, &rep)?.to_full(),
                &lax_at_one_closed_form(&rep).to_full(),
            )
        },
    );
    r.at_most("untwisted lax", "L(u) = R(u; 1) at t = 1", 1e-12, 20, |s| {
        let q = s.deformation();
        let u = s.spectral();
        let rep = spin_half_rep(q, ONE)?;
        rel_residual(&build_lax(u, &rep)?.to_full(), &r_matrix(u, q, ONE))
    });
}

fn algebra(r: &mut Runner) {
    let cfg = r.cfg;
    let rep = move |s: &mut Sampler| spin_half_rep(s.deformation(), cfg.twist(s));
    r.at_most(
        "twisted relations",
        "t-deformed exchange relations of τi±, τ12, τ21",
        1e-12,
        100,
        |s| Ok(named_max(check_twisted_relations(&rep(s)?))),
    );
    r.at_most(
        "untwisted relations",
        "exchange relations of τ̃i±, τ̃12, τ̃21",
        1e-12,
        100,
        |s| Ok(named_max(check_untwisted_relations(&rep(s)?))),
    );
    r.at_most(
        "twist factor",
        "τ_g τ̃12 = t⁻¹ τ̃12 τ_g, τ_g τ̃21 = t τ̃21 τ_g, [τ_g, τ̃i±] = 0",
        1e-12,
        100,
        |s| Ok(named_max(check_tau_g(&rep(s)?))),
    );
    r.at_most(
        "casimir values",
        "(w+, w-, w01, w02, w) = (q^-½, q^½, -1, -1, q + 1/q)",
        1e-12,
        100,
        |s| {
            let rp = rep(s)?;
            let (g, w) = (rp.casimirs(), CasimirSet::spin_half(rp.q));
            Ok(max_of([
                rel_scalar(g.w_plus, w.w_plus),
                rel_scalar(g.w_minus, w.w_minus),
                rel_scalar(g.w01, w.w01),
                rel_scalar(g.w02, w.w02),
                rel_scalar(g.w, w.w),
            ]))
        },
    );
    r.at_most(
        "casimirs central",
        "each Casimir expression is a multiple of I",
        1e-12,
        100,
        |s| Ok(named_max(rep(s)?.casimir_scalar_residuals())),
    );
    r.at_most("lax inverse", "L(u) L̃(u) = ρ(u) I", 1e-12, 50, |s| {
        let rp = rep(s)?;
        check_lax_inverse(s.spectral(), &rp)
    });
    r.control(
        "mixed exchange line",
        "τ2± τ12 = t q^(±½) τ21 τ2± (mixes τ12 and τ21)",
        CONTROL_FLOOR,
        20,
        |s| {
            Ok(min_of(
                mixed_exchange_line(&rep(s)?).into_iter().map(|e| e.1),
            ))
        },
    );
    r.control(
        "tau12 replaced by sigma+",
        "twisted relations with τ̃12 = σ+",
        CONTROL_FLOOR,
        20,
        |s| {
            let mut rp = rep(s)?;
            rp.tau12 = pauli::sigma_plus();
            Ok(named_max(check_twisted_relations(&rp)))
        },
    );
}

fn reflection(r: &mut Runner) {
    let cfg = r.cfg;
    const RE: &str = "R12(u/v) K1(u) R21(uv) K2(v) = K2(v) R12(uv) K1(u) R21(u/v)";
    r.at_most("reflection", RE, 1e-10, 50, |s| {
        let (b, q, t) = (s.boundary(), s.deformation(), cfg.twist(s));
        let (u, v) = (s.spectral(), s.spectral());
        let k = |x| build_kminus_c(x, &b, q).map(cnum);
        check_reflection(&k(u)?, &k(v)?, q, t, u, v)
    });
    r.at_most(
        "dual reflection of dualized K-",
        "dual reflection equation for K+(u) = K-(q^-½/u)^t",
        1e-10,
        50,
        |s| {
            let (b, q, t) = (s.boundary(), s.deformation(), cfg.twist(s));
            let (u, v) = (s.spectral(), s.spectral());
            let k = |x| build_kminus_c(x, &b, q).expect("generic sample");
            let d = dualize(k, q);
            check_dual_reflection(&cnum(d(u)), &cnum(d(v)), q, t, u, v)
        },
    );
    r.at_most(
        "dual reflection K+",
        "dual reflection equation for K+ with M = I",
        1e-10,
        50,
        |s| {
            let (b, q, t) = (s.boundary(), s.deformation(), cfg.twist(s));
            let (u, v) = (s.spectral(), s.spectral());
            let k = |x| build_kplus_c(x, &b, q).map(cnum);
            check_dual_reflection(&k(u)?, &k(v)?, q, t, u, v)
        },
    );
    let sixteen = |corrected: bool| {
        move |s: &mut Sampler| {
            let (b, q) = (s.boundary(), s.deformation());
            let (u, v) = (s.spectral(), s.spectral());
            let k = |x| build_kminus_c(x, &b, q).map(cnum);
            let rep = check_sixteen(&k(u)?, &k(v)?, q, u, v)?;
            Ok(max_of(if corrected { rep.corrected } else { rep.matrix }))
        }
    };
    r.at_most(
        "sixteen components",
        "each 1x1 block of LHS - RHS of the reflection equation",
        1e-12,
        50,
        sixteen(false),
    );
    r.at_most(
        "sixteen scalar equations",
        "component equations with operator ordering kept",
        1e-12,
        50,
        sixteen(true),
    );
    r.at_most(
        "twist independence",
        "spread of the reflection residual over t = 1, sampled t, generic complex t, far t",
        1e-12,
        20,
        |s| {
            let (b, q) = (s.boundary(), s.deformation());
            let (u, v) = (s.spectral(), s.spectral());
            let ts = [ONE, cfg.twist(s), s.generic(), far_twist(s)];
            let k = |x| build_kminus_c(x, &b, q).map(cnum);
            let (ku, kv) = (k(u)?, k(v)?);
            let rs = ts
                .iter()
                .map(|&t| check_reflection(&ku, &kv, q, t, u, v))
                .collect::<Result<Vec<_>>>()?;
            Ok(max_of(rs.iter().copied()) - min_of(rs))
        },
    );
    r.at_most(
        "dual map",
        "least-squares fit of K-(q^-½/u)^t to K+ recovers κ = ε-, κ* = ε+, κ± = -k∓/(q - 1/q)",
        1e-10,
        20,
        |s| {
            let (b, q) = (s.boundary(), s.deformation());
            let us: Vec<C64> = (0..4).map(|_| s.spectral()).collect();
            let fit = fit_dual_map(&b, q, &us)?;
            let w = dual_map_closed_form(&b, q);
            Ok(max_of([
                fit.fit_residual,
                rel_scalar(fit.kappa, w.kappa),
                rel_scalar(fit.kappa_star, w.kappa_star),
                rel_scalar(fit.kappa_plus, w.kappa_plus),
                rel_scalar(fit.kappa_minus, w.kappa_minus),
            ]))
        },
    );
    r.control(
        "perturbed K-",
        "reflection equation with K-[0,1] multiplied by u",
        CONTROL_FLOOR,
        20,
        |s| {
            let (b, q, t) = (s.boundary(), s.deformation(), cfg.twist(s));
            let (u, v) = (s.spectral(), s.spectral());
            let k = |x: C64| -> Result<AuxOperator> {
                let mut m = build_kminus_c(x, &b, q)?;
                m.set(0, 1, m.get(0, 1) * x);
                Ok(cnum(m))
            };
            check_reflection(&k(u)?, &k(v)?, q, t, u, v)
        },
    );
    r.control(
        "transposed arrangement",
        "reflection equation with R12^{t1t2} for R21 at t != 1",
        CONTROL_FLOOR,
        20,
        |s| {
            let (b, q, t) = (s.boundary(), s.deformation(), far_twist(s));
            let (u, v) = (s.spectral(), s.spectral());
            let k = |x| build_kminus_c(x, &b, q).map(cnum);
            check_reflection_transposed(&k(u)?, &k(v)?, q, t, u, v)
        },
    );
}

fn dressing(r: &mut Runner) {
    let cfg = r.cfg;
    for n in 1..=cfg.n_sites.min(5) {
        r.at_most(
            &format!("reflection N={n}"),
            "reflection equation for L_N..L_1 K-(u) L̃_1..L̃_N",
            1e-9,
            20,
            move |s| {
                let p = cfg.model(s, n)?;
                let (u, v, t) = (s.spectral(), s.spectral(), cfg.twist(s));
                let ku = dressed_kminus(u, &p)?.k;
                let kv = dressed_kminus(v, &p)?.k;
                check_reflection(&ku, &kv, p.q, t, u, v)
            },
        );
    }
    r.at_most(
        "one-site blocks",
        "N = 1 dressed blocks = closed forms in W0, W1, G1, G̃1",
        1e-10,
        20,
        |s| {
            let p = cfg.model(s, 1)?;
            let u = s.spectral();
            let k = dressed_kminus(u, &p)?.k.to_full();
            let f = blocks_from_generators(u, &n1_generators(&p)?, &coefficient_tower(&p, 1)?)?;
            rel_residual(&k, &f.to_full())
        },
    );
    r.at_most(
        "one-site q-commutators",
        "explicit G1, G̃1 = [W1, W0]_q, [W0, W1]_q",
        1e-10,
        20,
        |s| {
            let p = cfg.model(s, 1)?;
            let f = n1_generators(&p)?;
            let (g, gt) = n1_g_expanded(&p)?;
            Ok(max_of([
                rel_residual(&f.g[0], &g)?,
                rel_residual(&f.g_tilde[0], &gt)?,
            ]))
        },
    );
    if cfg.n_sites >= 2 {
        r.at_most(
            "sixteen scalar equations N=2",
            "component equations on the dressed N = 2 solution",
            1e-9,
            10,
            |s| {
                let p = cfg.model(s, 2)?;
                let (u, v) = (s.spectral(), s.spectral());
                let rep = check_sixteen(
                    &dressed_kminus(u, &p)?.k,
                    &dressed_kminus(v, &p)?.k,
                    p.q,
                    u,
                    v,
                )?;
                Ok(max_of(rep.corrected))
            },
        );
    }
}

/// Convention for the `G`, `G̃` denominators in the charges, chosen by the
/// decomposition residual on a two-site sample of this run.
fn charge_convention(cfg: &RunConfig) -> Result<(ChargeConvention, Vec<(ChargeConvention, f64)>)> {
    let n = cfg.n_sites.min(2);
    let mut s = cfg.sampler("charge convention", 0);
    let p = cfg.model(&mut s, n)?;
    let us: Vec<C64> = (0..6).map(|_| s.spectral()).collect();
    select_charge_convention(&p, &us)
}

fn depth_for(cfg: &RunConfig, n: usize) -> usize {
    cfg.depth.unwrap_or(relations_depth(n))
}

fn onsager(r: &mut Runner) {
    let cfg = r.cfg;
    r.at_most(
        "askey-wilson",
        "[W1,[W1,W0]_q]_{1/q} = ρ0 W0 + (q - 1/q) ω0 W1 - qq k+ k- w- w+ ε-⁽¹⁾ and mirror, N = 1",
        1e-9,
        20,
        |s| {
            let p = cfg.model(s, 1)?;
            let fam = generators(&p, depth_for(cfg, 1))?;
            Ok(max_of(askey_wilson(
                &fam,
                &coefficient_tower(&p, 1)?,
                true,
            )?))
        },
    );
    r.control(
        "askey-wilson without constant",
        "same relations with the multiple of I dropped",
        CONTROL_FLOOR,
        20,
        |s| {
            let p = cfg.model(s, 1)?;
            let fam = generators(&p, depth_for(cfg, 1))?;
            Ok(max_of(askey_wilson(
                &fam,
                &coefficient_tower(&p, 1)?,
                false,
            )?))
        },
    );
    let conv = charge_convention(cfg);
    for n in 1..=cfg.n_sites.min(4) {
        let setup = move |s: &mut Sampler| -> Result<_> {
            let p = cfg.model(s, n)?;
            let fam = generators(&p, depth_for(cfg, n))?;
            let tower = coefficient_tower(&p, n)?;
            Ok((p, fam, tower))
        };
        r.at_most(
            &format!("q-dolan-grady N={n}"),
            "[W1,[W1,[W1,W0]_q]_{1/q}] = ρ0 [W1,W0] and mirror",
            1e-8,
            20,
            move |s| {
                let (_, fam, tower) = setup(s)?;
                Ok(max_of(check_q_dolan_grady(&fam, &tower)?))
            },
        );
        r.at_most(
            &format!("rho0 N={n}"),
            "ρ0 = (q^½ + q^-½)² k+ k-",
            1e-12,
            5,
            move |s| {
                let p = cfg.model(s, n)?;
                let t = coefficient_tower(&p, n)?;
                let b = &p.boundary;
                Ok(rel_scalar(
                    t.rho0,
                    q_bar(p.q) * q_bar(p.q) * b.k_plus * b.k_minus,
                ))
            },
        );
        r.at_most(
            &format!("relations N={n}"),
            "commuting families, exchange relations, closure sums, lowest-order relations",
            1e-8,
            20,
            move |s| {
                let (_, fam, tower) = setup(s)?;
                Ok(check_relations(&fam, &tower)?.max())
            },
        );
        let conv = conv.as_ref().map(|c| c.0).map_err(|e| e.to_string());
        r.at_most(
            &format!("charges commute N={n}"),
            "[I_{2k+1}, I_{2l+1}] = 0",
            1e-8,
            20,
            move |s| {
                let conv = conv.clone().map_err(Error::Config)?;
                let p = cfg.model(s, n)?;
                let fam = generators(&p, n)?;
                Ok(check_charges_commute(&charges(&fam, &p, conv)?))
            },
        );
    }
    for n in 1..=cfg.n_sites.min(3) {
        r.at_most(
            &format!("generator blocks N={n}"),
            "dressed K- = polynomial in u of W-k, Wk+1, Gk+1, G̃k+1",
            1e-9,
            5,
            move |s| {
                let p = cfg.model(s, n)?;
                let u = s.spectral();
                let fam = generators(&p, n)?;
                let f = blocks_from_generators(u, &fam, &coefficient_tower(&p, n)?)?;
                rel_residual(&dressed_kminus(u, &p)?.k.to_full(), &f.to_full())
            },
        );
    }
    r.at_most(
        "scalar seed",
        "one recursion step from the c-number family gives the N = 1 generators",
        1e-10,
        20,
        |s| {
            let p = cfg.model(s, 1)?;
            let f1 = recurse_generators(&scalar_initial_family(&p, 1), &p, 1)?;
            let n1 = n1_generators(&p)?;
            Ok(max_of([
                rel_residual(&f1.w_minus[0], &n1.w_minus[0])?,
                rel_residual(&f1.w_plus[0], &n1.w_plus[0])?,
                rel_residual(&f1.g[0], &n1.g[0])?,
                rel_residual(&f1.g_tilde[0], &n1.g_tilde[0])?,
            ]))
        },
    );
    let n2 = cfg.n_sites.min(3);
    r.at_most(
        "two-term recursion",
        "W0, W1 from the two-term site recursion (homogeneous)",
        1e-10,
        10,
        move |s| {
            let p = cfg.model(s, n2)?.homogeneous();
            let fam = generators(&p, 1)?;
            let (w0, w1) = two_term_w(&p);
            Ok(max_of([
                rel_residual(fam.w0(), &w0)?,
                rel_residual(fam.w1(), &w1)?,
            ]))
        },
    );
    r.at_most(
        "omega0",
        "ω0 of the tower = one-site closed form",
        1e-12,
        20,
        |s| {
            let p = cfg.model(s, 1)?.homogeneous();
            Ok(rel_scalar(
                coefficient_tower(&p, 1)?.omega0,
                omega0_one_site(&p)?,
            ))
        },
    );
}

fn transfer(r: &mut Runner) {
    let cfg = r.cfg;
    let conv = charge_convention(cfg);
    match &conv {
        Ok((c, scores)) => {
            let best = scores.iter().find(|x| x.0 == *c).map_or(f64::NAN, |x| x.1);
            r.check(
                "charge convention",
                "smallest decomposition residual over denominator conventions",
                1e-8,
                Comparison::AtMost,
                1,
                |_| Ok(best),
            );
            r.annotate(format!(
                "selected {c:?}; {}",
                scores
                    .iter()
                    .map(|(c, x)| format!("{c:?} {x:.2e}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
        }
        Err(e) => r.records.push(CheckRecord::error(
            "charge convention",
            "smallest decomposition residual over denominator conventions",
            1e-8,
            Comparison::AtMost,
            e.to_string(),
        )),
    }
    let conv = conv.map(|c| c.0).map_err(|e| e.to_string());
    for n in 1..=cfg.n_sites.min(6) {
        r.at_most(
            &format!("commutation N={n}"),
            "[t(u), t(v)] = 0",
            1e-9,
            20,
            move |s| {
                let p = cfg.model(s, n)?;
                let us: Vec<C64> = (0..3).map(|_| s.spectral()).collect();
                check_commutation(&p, &us)
            },
        );
        r.at_most(
            &format!("t(1) N={n}"),
            "t(1) = c̃^{2N} (q^½ + q^-½)(ε+ + ε-)(κ + κ*) I (homogeneous)",
            1e-10,
            3,
            move |s| check_transfer_at_one(&cfg.model(s, n)?),
        );
    }
    for n in 1..=cfg.n_sites.min(3) {
        let conv = conv.clone();
        r.at_most(
            &format!("decomposition N={n}"),
            "t(u) = F(u) I + (u² - u⁻²)(q u² - q⁻¹u⁻²) Σk P-k(u) I_{2k+1}",
            1e-8,
            3,
            move |s| {
                let conv = conv.clone().map_err(Error::Config)?;
                let p = cfg.model(s, n)?;
                let us: Vec<C64> = (0..2 * n + 2).map(|_| s.spectral()).collect();
                check_decomposition(&p, conv, &us)
            },
        );
    }
    r.control(
        "decomposition with q⁻²",
        "N = 1 decomposition with (q u² - q⁻²u⁻²)",
        CONTROL_FLOOR,
        10,
        |s| {
            let p = cfg.model(s, 1)?;
            let us: Vec<C64> = (0..4).map(|_| s.spectral()).collect();
            decomposition_residual(&p, ChargeConvention::FirstSite, &us, 2)
        },
    );
    if cfg.n_sites >= 2 {
        r.control(
            "site-product denominators",
            "N = 2 decomposition with d = w0i^N",
            CONTROL_FLOOR,
            5,
            |s| {
                let p = cfg.model(s, 2)?;
                let us: Vec<C64> = (0..6).map(|_| s.spectral()).collect();
                check_decomposition(&p, ChargeConvention::SiteProduct, &us)
            },
        );
    }
}

fn hamiltonian(r: &mut Runner) {
    let cfg = r.cfg;
    let conv = charge_convention(cfg)
        .map(|c| c.0)
        .map_err(|e| e.to_string());
    for n in 1..=cfg.n_sites.min(4) {
        r.at_most(
            &format!("derivation N={n}"),
            "t(1)⁻¹ t'(1) = (c̃/(q^½ + q^-½) + 2NΔ/c̃) I + (2/c̃) H",
            1e-6,
            3,
            move |s| check_hamiltonian_derivation(&cfg.model(s, n)?),
        );
        let conv = conv.clone();
        r.at_most(
            &format!("charge conservation N={n}"),
            "[H, I_{2k+1}] = 0 for all k",
            1e-8,
            3,
            move |s| {
                let conv = conv.clone().map_err(Error::Config)?;
                Ok(max_of(check_charge_conservation(&cfg.model(s, n)?, conv)?))
            },
        );
    }
    for n in 1..=cfg.n_sites.min(6) {
        r.at_most(
            &format!("xxz limit N={n}"),
            "H at t = 1 = open XXZ built from σx, σy, σz (max |entry|)",
            1e-12,
            3,
            move |s| check_xxz_reduction(&cfg.model(s, n)?),
        );
    }
    let ng = cfg.n_sites.min(6);
    r.at_most(
        &format!("twist gauge N={ng}"),
        "H(t) = U H(1) U⁻¹, U = ⊗ diag(t^¼, t^-¼)",
        1e-12,
        3,
        move |s| check_twist_gauge(&cfg.model(s, ng)?),
    );
    for n in 1..=cfg.n_sites.min(3) {
        r.at_most(
            &format!("first charge N={n}"),
            "I1 from the tower = I1 from W0, W1 and their q-commutators",
            1e-10,
            3,
            move |s| {
                let p = cfg.model(s, n)?.homogeneous();
                let i = charges(&generators(&p, n)?, &p, ChargeConvention::FirstSite)?;
                rel_residual(&i[0], &first_charge_two_term(&p)?)
            },
        );
    }
    let nu = cfg.n_sites.min(4);
    r.at_most(
        &format!("u(1) limit N={nu}"),
        "[H, Σ σz] = 0 when k± = κ± = 0",
        1e-12,
        3,
        move |s| {
            let mut p = cfg.model(s, nu)?.untwisted();
            let b = &mut p.boundary;
            (b.k_plus, b.k_minus, b.kappa_plus, b.kappa_minus) = (ZERO, ZERO, ZERO, ZERO);
            let h = mccoy_wu_hamiltonian(&p)?;
            let mut sz = CMatrix::zeros(h.rows(), h.cols());
            for i in 1..=nu {
                sz += embed_site(&pauli::sigma3(), i, nu)?.matrix();
            }
            Ok(commutator_residual(&h, &sz))
        },
    );
}

fn spectrum(r: &mut Runner) {
    let cfg = r.cfg;
    r.at_most(
        "two-site zero boundary",
        "spec H = {Δ, Δ, 2 - Δ, -2 - Δ} with only ε, κ fields",
        1e-12,
        10,
        |s| {
            let mut p = cfg.model(s, 2)?.untwisted();
            let b = &mut p.boundary;
            (b.k_plus, b.k_minus, b.kappa_plus, b.kappa_minus) = (ZERO, ZERO, ZERO, ZERO);
            b.eps_minus = b.eps_plus;
            b.kappa_star = b.kappa;
            let d = anisotropy(p.q);
            let got = diagonalize(&mccoy_wu_hamiltonian(&p)?)?;
            Ok(multiset_distance(
                &got.eigenvalues,
                &[d, d, 2.0 - d, -2.0 - d],
            ))
        },
    );
    r.at_most(
        "one site",
        "spec H = shift ± sqrt(a² + bc) for H = shift + aσz + bσ+ + cσ-",
        1e-12,
        10,
        |s| {
            let h = mccoy_wu_hamiltonian(&cfg.model(s, 1)?)?;
            let a = (h.get(0, 0) - h.get(1, 1)) / 2.0;
            let shift = (h.get(0, 0) + h.get(1, 1)) / 2.0;
            let w = (a * a + h.get(0, 1) * h.get(1, 0)).sqrt();
            Ok(multiset_distance(
                &diagonalize(&h)?.eigenvalues,
                &[shift + w, shift - w],
            ))
        },
    );
    let n = cfg.n_sites.min(8);
    r.at_most(
        &format!("twist invariance N={n}"),
        "spec H(t) = spec H(1), relative to the spectral radius",
        1e-8,
        2,
        move |s| {
            let p = cfg.model(s, n)?;
            let a = diagonalize(&mccoy_wu_hamiltonian(&p)?)?;
            let b = diagonalize(&mccoy_wu_hamiltonian(&p.clone().untwisted())?)?;
            let scale = a.eigenvalues.iter().map(|z| z.norm()).fold(1.0, f64::max);
            Ok(multiset_distance(&a.eigenvalues, &b.eigenvalues) / scale)
        },
    );
}

/// Spectrum of the Hamiltonian for the model sampled from `config`
/// (`n_sites` sites, stream `"spectrum export"`).
pub fn export_spectrum(config: &RunConfig) -> Result<(ModelParams, Spectrum)> {
    config.validate()?;
    if config.n_sites > MAX_DIAG_SITES {
        return Err(Error::Config(format!(
            "n_sites = {} exceeds the dense limit {MAX_DIAG_SITES}",
            config.n_sites
        )));
    }
    let p = config.model(&mut config.sampler("spectrum export", 0), config.n_sites)?;
    let sp = diagonalize(&mccoy_wu_hamiltonian(&p)?)?;
    Ok((p, sp))
}
