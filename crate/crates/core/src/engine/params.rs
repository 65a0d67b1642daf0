use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::edge_count;
use crate::spookybox::{derive_parameters, BoxGameConfig, Parameters};

/// Largest supported `n`; per-edge arrays grow with `n²`.
pub const MAX_N: u32 = 5000;

/// How the fair-share slack of an auxiliary game is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EllSetting {
    /// `δpn` for the degree game, `δp³n²` for the neighbourhood game.
    #[default]
    Nominal,
    /// `max(nominal value, ell_min)`.
    Auto,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MakerKind {
    /// The two-box-game meta-strategy.
    #[default]
    Potential,
    /// Uniform unclaimed edges.
    Random,
    /// Unclaimed edge maximising `deg(u) + deg(v)` in Maker's graph.
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealGameParams {
    pub n: u32,
    pub p: f64,
    pub b: u32,
    pub epsilon: f64,
    /// Overrides `δ = 10⁻⁶ε²`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default)]
    pub ell_degree: EllSetting,
    #[serde(default)]
    pub ell_nbhd: EllSetting,
    pub seed: u64,
    #[serde(default)]
    pub breaker_first: bool,
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub maker: MakerKind,
}

/// The theorem's size conditions, recorded but never enforced.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremHypotheses {
    /// `p ≥ 10⁸ ε⁻² n^{−1/2}`.
    pub density_ok: bool,
    /// `b ≤ 10⁻²⁴ ε⁶ / p`.
    pub bias_ok: bool,
}

impl RealGameParams {
    pub fn new(n: u32, p: f64, b: u32, epsilon: f64, seed: u64) -> Self {
        RealGameParams {
            n,
            p,
            b,
            epsilon,
            delta: None,
            ell_degree: EllSetting::Nominal,
            ell_nbhd: EllSetting::Nominal,
            seed,
            breaker_first: false,
            strict: false,
            maker: MakerKind::Potential,
        }
    }

    pub fn with_ell_auto(mut self) -> Self {
        self.ell_degree = EllSetting::Auto;
        self.ell_nbhd = EllSetting::Auto;
        self
    }

    pub fn with_maker(mut self, maker: MakerKind) -> Self {
        self.maker = maker;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::Config(format!("p out of range (0, 1]: {}", self.p)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon out of range (0, 1): {}", self.epsilon)));
        }
        if self.b == 0 {
            return Err(Error::Config("b must be at least 1".into()));
        }
        if self.n < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {}", self.n)));
        }
        if self.n > MAX_N {
            return Err(Error::Size {
                what: "n",
                got: self.n as usize,
                limit: MAX_N as usize,
            });
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::Config(format!("delta must be positive, got {d}")));
            }
        }
        for (name, s) in [("ell_degree", self.ell_degree), ("ell_nbhd", self.ell_nbhd)] {
            if let EllSetting::Fixed(v) = s {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::Config(format!("{name} must be finite and >= 0, got {v}")));
                }
            }
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(1e-6 * self.epsilon * self.epsilon)
    }

    pub fn edge_count(&self) -> usize {
        edge_count(self.n as usize)
    }

    /// Box size cap of the neighbourhood game, `⌈p²n²⌉`.
    pub fn nbhd_cap(&self) -> u32 {
        let n = self.n as f64;
        // Shave rounding noise so that exact squares are not bumped up by one.
        let x = self.p * self.p * n * n * (1.0 - 1e-12);
        (x.ceil() as u64).clamp(1, u32::MAX as u64) as u32
    }

    fn resolve(&self, setting: EllSetting, nominal: f64, mut cfg: BoxGameConfig) -> Result<BoxGameConfig> {
        cfg.ell = match setting {
            EllSetting::Nominal => nominal,
            EllSetting::Fixed(v) => v,
            EllSetting::Auto => {
                let probe = derive_parameters(&BoxGameConfig {
                    ell: 0.0,
                    strict_preconditions: false,
                    ..cfg.clone()
                })?;
                nominal.max(probe.ell_min)
            }
        };
        Ok(cfg)
    }

    /// `SB(1, 2b, E(K_n), n boxes, ℓ_d, M = n)`.
    pub fn degree_config(&self) -> Result<BoxGameConfig> {
        let n = self.n as f64;
        let base = BoxGameConfig {
            m: 1,
            b: 2 * self.b,
            vertex_count: self.edge_count() as u32,
            e: self.n,
            max_box: self.n,
            ell: 0.0,
            strict_preconditions: self.strict,
        };
        self.resolve(self.ell_degree, self.delta() * self.p * n, base)
    }

    /// `SB(1, 2b, E(K_n), n boxes, ℓ_nbh, M = ⌈p²n²⌉)`.
    pub fn nbhd_config(&self) -> Result<BoxGameConfig> {
        let n = self.n as f64;
        let base = BoxGameConfig {
            m: 1,
            b: 2 * self.b,
            vertex_count: self.edge_count() as u32,
            e: self.n,
            max_box: self.nbhd_cap(),
            ell: 0.0,
            strict_preconditions: self.strict,
        };
        self.resolve(self.ell_nbhd, self.delta() * self.p.powi(3) * n * n, base)
    }

    pub fn box_parameters(&self) -> Result<(Parameters, Parameters)> {
        Ok((
            derive_parameters(&self.degree_config()?)?,
            derive_parameters(&self.nbhd_config()?)?,
        ))
    }

    pub fn theorem_hypotheses(&self) -> TheoremHypotheses {
        let eps = self.epsilon;
        let n = self.n as f64;
        TheoremHypotheses {
            density_ok: self.p >= 1e8 / (eps * eps) / n.sqrt(),
            bias_ok: (self.b as f64) <= 1e-24 * eps.powi(6) / self.p,
        }
    }
}
