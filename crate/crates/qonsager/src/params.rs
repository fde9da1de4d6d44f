//! Model parameters and seeded generic-point sampling.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{nonzero, Error, Result};
use crate::linalg::{C64, ONE};

/// Boundary constants: `ε±, k±` for the right (minus) boundary and
/// `κ, κ*, κ±` for the left (plus) boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryParams {
    pub eps_plus: C64,
    pub eps_minus: C64,
    pub k_plus: C64,
    pub k_minus: C64,
    pub kappa: C64,
    pub kappa_star: C64,
    pub kappa_plus: C64,
    pub kappa_minus: C64,
}

impl BoundaryParams {
    pub fn require_k(&self) -> Result<()> {
        nonzero(self.k_plus, "k_plus")?;
        nonzero(self.k_minus, "k_minus")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub q: C64,
    /// Per-site twists `t₁..t_N`.
    pub t: Vec<C64>,
    /// Per-site inhomogeneities `v₁..v_N`.
    pub v: Vec<C64>,
    pub boundary: BoundaryParams,
}

impl ModelParams {
    pub fn new(q: C64, t: Vec<C64>, v: Vec<C64>, boundary: BoundaryParams) -> Result<Self> {
        if t.len() != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} twists but {} inhomogeneities",
                t.len(),
                v.len()
            )));
        }
        nonzero(q, "q")?;
        for z in &t {
            nonzero(*z, "t_i")?;
        }
        for z in &v {
            nonzero(*z, "v_i")?;
        }
        Ok(Self { q, t, v, boundary })
    }

    pub fn n_sites(&self) -> usize {
        self.t.len()
    }

    /// Same parameters restricted to the first `n` sites.
    pub fn truncated(&self, n: usize) -> Self {
        Self {
            q: self.q,
            t: self.t[..n].to_vec(),
            v: self.v[..n].to_vec(),
            boundary: self.boundary,
        }
    }

    pub fn homogeneous(mut self) -> Self {
        self.v.iter_mut().for_each(|v| *v = ONE);
        self
    }

    pub fn untwisted(mut self) -> Self {
        self.t.iter_mut().for_each(|t| *t = ONE);
        self
    }
}

/// Seeded sampler of generic complex parameters.
#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
    annulus: (f64, f64),
}

/// Default modulus range of generic samples.
pub const DEFAULT_ANNULUS: (f64, f64) = (0.7, 1.4);

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            annulus: DEFAULT_ANNULUS,
        }
    }

    /// Independent stream derived from this seed and a label.
    pub fn fork(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            rng,
            annulus: DEFAULT_ANNULUS,
        }
    }

    /// Moduli of generic samples drawn from `[lo, hi)` instead.
    pub fn with_annulus(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::Config(format!("bad annulus [{lo}, {hi})")));
        }
        self.annulus = (lo, hi);
        Ok(self)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    /// Modulus in the annulus (default `[0.7, 1.4)`), uniform phase.
    pub fn generic(&mut self) -> C64 {
        let m = self.uniform(self.annulus.0, self.annulus.1);
        let ph = self.uniform(0.0, TAU);
        C64::from_polar(m, ph)
    }

    pub fn unimodular(&mut self) -> C64 {
        C64::from_polar(1.0, self.uniform(0.0, TAU))
    }

    /// Deformation parameter kept away from `q = ±1`, where `c̃` or
    /// `q^{1/2}+q^{−1/2}` vanish.
    pub fn deformation(&mut self) -> C64 {
        loop {
            let q = self.generic();
            if (q - ONE).norm() >= 0.05 && (q + ONE).norm() >= 0.3 {
                return q;
            }
        }
    }

    /// Spectral parameter away from `u² = 1`.
    pub fn spectral(&mut self) -> C64 {
        loop {
            let u = self.generic();
            if (u * u - ONE).norm() >= 0.05 {
                return u;
            }
        }
    }

    pub fn boundary(&mut self) -> BoundaryParams {
        BoundaryParams {
            eps_plus: self.generic(),
            eps_minus: self.generic(),
            k_plus: self.generic(),
            k_minus: self.generic(),
            kappa: self.generic(),
            kappa_star: self.generic(),
            kappa_plus: self.generic(),
            kappa_minus: self.generic(),
        }
    }

    /// Fully generic model: unimodular twists, generic inhomogeneities.
    pub fn model(&mut self, n_sites: usize) -> ModelParams {
        let q = self.deformation();
        let t = (0..n_sites).map(|_| self.unimodular()).collect();
        let v = (0..n_sites).map(|_| self.generic()).collect();
        let boundary = self.boundary();
        ModelParams { q, t, v, boundary }
    }
}
