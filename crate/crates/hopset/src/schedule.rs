//! Derived constants of one hopset build.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::log2_padded;

/// How the `ε` given to [`compute_schedule`] is interpreted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum EpsilonMode {
    /// `ε` is the final stretch target. It is divided down to the internal
    /// value the construction needs, which makes `β` very large.
    Rescaled,
    /// `ε` is used directly inside the construction; the build reports the
    /// stretch this guarantees.
    Internal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterSchedule {
    pub n: usize,
    /// `log2` of the padded vertex count.
    pub log_n: u32,
    pub mode: EpsilonMode,
    /// Final stretch parameter `ε''`.
    pub epsilon: f64,
    /// Per-scale stretch parameter `ε'`.
    pub epsilon_prime: f64,
    /// `ε` used by the phases.
    pub internal_epsilon: f64,
    pub kappa: u32,
    pub rho: f64,
    pub aspect_ratio: f64,
    /// Length of the shortest edge; distances are measured in this unit.
    pub unit: f64,
    pub lambda: i64,
    pub k0: i64,
    pub ell: usize,
    pub i0: i64,
    /// `deg_i` for `i = 0..=ell` as real numbers.
    pub deg: Vec<f64>,
    /// `⌈deg_i⌉`.
    pub deg_cap: Vec<usize>,
    /// `h_0 ..= h_ell`.
    pub h: Vec<f64>,
    pub beta: u64,
    /// `σ_0 ..= σ_ell`.
    pub sigma: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Per-scale values.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleParams {
    pub k: i64,
    pub alpha: f64,
    pub delta: Vec<f64>,
    pub delta_hat: Vec<f64>,
    /// `R_0 ..= R_ell`.
    pub radius: Vec<f64>,
    /// `ε_{k-1}`.
    pub eps_prev: f64,
    /// `ε_k`.
    pub eps_k: f64,
}

fn ceil_tol(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

fn floor_tol(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x.floor()
    }
}

/// `ℓ = ⌊log κρ⌋ + ⌈(κ+1)/(κρ)⌉ − 1` and `i_0 = ⌊log κρ⌋`.
pub fn phase_count(kappa: u32, rho: f64) -> (usize, i64) {
    let kr = kappa as f64 * rho;
    let i0 = floor_tol(kr.log2()) as i64;
    let ell = i0 + ceil_tol((kappa as f64 + 1.0) / kr) as i64 - 1;
    (ell.max(0) as usize, i0)
}

/// `h_0 = 1`, `h_i = (1/ε + 2)(h_{i-1} + 1) + 2i + 1`.
pub fn hop_sequence(eps: f64, ell: usize) -> Vec<f64> {
    let mut h = vec![1.0];
    for i in 1..=ell {
        let prev = h[i - 1];
        h.push((1.0 / eps + 2.0) * (prev + 1.0) + 2.0 * i as f64 + 1.0);
    }
    h
}

pub fn compute_schedule(
    n: usize,
    epsilon: f64,
    kappa: u32,
    rho: f64,
    aspect_ratio: f64,
    mode: EpsilonMode,
) -> Result<ParameterSchedule> {
    if n == 0 {
        return Err(Error::Config("graph has no vertices".into()));
    }
    if kappa < 2 {
        return Err(Error::Config(format!("kappa must be an integer >= 2, got {kappa}")));
    }
    if !(rho > 0.0 && rho < 0.5) {
        return Err(Error::Config(format!("rho must lie in (0, 1/2), got {rho}")));
    }
    let eps_ok = match mode {
        EpsilonMode::Rescaled => epsilon > 0.0 && epsilon <= 1.0,
        EpsilonMode::Internal => epsilon > 0.0 && epsilon < 1.0,
    };
    if !eps_ok {
        return Err(Error::Config(format!("epsilon out of range: {epsilon}")));
    }
    if !(aspect_ratio >= 1.0) || !aspect_ratio.is_finite() {
        return Err(Error::Config(format!("aspect ratio must be >= 1, got {aspect_ratio}")));
    }

    let log_n = log2_padded(n);
    let lg = log_n as f64;
    let lambda = ceil_tol(aspect_ratio.log2()) as i64 - 1;
    let (ell, i0) = phase_count(kappa, rho);
    let lam1 = lambda.max(1) as f64;
    let factor = 20.0 * lg * (ell as f64 + 1.0);
    let (eps2, eps1, eps) = match mode {
        EpsilonMode::Rescaled => {
            let eps1 = epsilon / (2.0 * lam1);
            (epsilon, eps1, eps1 / factor)
        }
        EpsilonMode::Internal => {
            let eps1 = factor * epsilon;
            (2.0 * lam1 * eps1, eps1, epsilon)
        }
    };
    if eps < f64::EPSILON {
        return Err(Error::Config(format!(
            "internal epsilon {eps:e} is below machine precision"
        )));
    }

    let nf = n as f64;
    let deg: Vec<f64> = (0..=ell)
        .map(|i| {
            if (i as i64) <= i0 {
                nf.powf(2f64.powi(i as i32) / kappa as f64)
            } else {
                nf.powf(rho)
            }
        })
        .collect();
    let deg_cap = deg.iter().map(|&d| ceil_tol(d).max(1.0) as usize).collect();

    let h = hop_sequence(eps, ell);
    let h_ell = h[ell];
    let beta = if h_ell >= u64::MAX as f64 {
        u64::MAX
    } else {
        ceil_tol(h_ell) as u64
    };
    let k0 = floor_tol(h_ell.log2()) as i64;
    let beta_f = beta as f64;

    let mut sigma = vec![0.0];
    for i in 0..ell {
        let s = sigma[i];
        sigma.push((4.0 * lg + 1.0) * s + 2.0 * (2.0 * beta_f + 1.0) * lg);
    }

    let mut warnings = Vec::new();
    if beta_f >= nf {
        warnings.push(format!(
            "hopset vacuous at this scale: beta = {beta} >= n = {n}; plain beta-hop Bellman-Ford is already exact"
        ));
    }
    let sched = ParameterSchedule {
        n,
        log_n,
        mode,
        epsilon: eps2,
        epsilon_prime: eps1,
        internal_epsilon: eps,
        kappa,
        rho,
        aspect_ratio,
        unit: 1.0,
        lambda,
        k0,
        ell,
        i0,
        deg,
        deg_cap,
        h,
        beta,
        sigma,
        warnings,
    };
    if !sched.assumption_holds() {
        let mut s = sched;
        s.warnings.push(format!(
            "internal epsilon {} is not below 1/(2(4 log n + 1)); the stretch guarantee does not apply",
            s.internal_epsilon
        ));
        return Ok(s);
    }
    Ok(sched)
}

impl ParameterSchedule {
    /// Scale indices `k_0 ..= λ` (empty when `k_0 > λ`).
    pub fn scales(&self) -> std::ops::RangeInclusive<i64> {
        self.k0.max(0)..=self.lambda
    }

    pub fn exploration_hopbound(&self) -> u64 {
        self.beta.saturating_mul(2).saturating_add(1)
    }

    /// Bound on memory-path hops: `2σ_ℓ + 2β + 1`.
    pub fn memory_hop_cap(&self) -> f64 {
        2.0 * self.sigma[self.ell] + 2.0 * self.beta as f64 + 1.0
    }

    pub fn assumption_holds(&self) -> bool {
        self.internal_epsilon < 1.0 / (2.0 * (4.0 * self.log_n as f64 + 1.0))
    }

    pub fn is_vacuous(&self) -> bool {
        self.beta as f64 >= self.n as f64
    }

    /// `1 + ε_k` with `ε_k = 0` below `k_0`.
    pub fn one_plus_eps(&self, k: i64) -> f64 {
        if k < self.k0 {
            1.0
        } else {
            (1.0 + self.epsilon_prime).powi((k - self.k0 + 1) as i32)
        }
    }

    /// Guaranteed stretch of the full hopset, `1 + ε_λ`.
    pub fn stretch_bound(&self) -> f64 {
        self.one_plus_eps(self.lambda)
    }

    pub fn scale(&self, k: i64) -> ScaleParams {
        let eps = self.internal_epsilon;
        let lg = self.log_n as f64;
        let alpha = eps.powi(self.ell as i32) * 2f64.powi((k + 1) as i32) * self.unit;
        let eps_prev = self.one_plus_eps(k - 1) - 1.0;
        let delta: Vec<f64> = (0..=self.ell).map(|i| alpha * (1.0 / eps).powi(i as i32)).collect();
        let delta_hat: Vec<f64> = delta.iter().map(|d| (1.0 + eps_prev) * d).collect();
        let mut radius = vec![0.0];
        for i in 0..self.ell {
            let r = radius[i];
            radius.push((2.0 * delta_hat[i] + 4.0 * r) * lg + r);
        }
        ScaleParams {
            k,
            alpha,
            delta,
            delta_hat,
            radius,
            eps_prev,
            eps_k: self.one_plus_eps(k) - 1.0,
        }
    }
}

impl ScaleParams {
    /// Weight of a superclustering edge added in phase `i`.
    pub fn supercluster_weight(&self, i: usize, log_n: u32) -> f64 {
        2.0 * (self.delta_hat[i] + 2.0 * self.radius[i]) * log_n as f64
    }
}
