use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quad::Tol;

/// Numerical budgets shared by every integrator and sampler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    /// Spatial scale: core half-width before the tail maps take over.
    pub box_radius: f64,
    /// Initial panels per axis in the nested cubature.
    pub nodes_per_axis: usize,
    /// Split point of ray integrals for non-compact correlations.
    pub t_max: f64,
    /// Initial panels on the ray.
    pub t_panels: usize,
    pub mc_samples: usize,
    pub seed: u64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Levels of the symmetrization profile.
    pub levels: usize,
    /// Subdivision budget of each adaptive integral.
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            box_radius: 4.0,
            nodes_per_axis: 2,
            t_max: 8.0,
            t_panels: 4,
            mc_samples: 200_000,
            seed: 0x5eed_1e55,
            rel_tol: 1e-7,
            abs_tol: 1e-13,
            levels: 256,
            max_subdivisions: 400,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.box_radius, self.t_max];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return domain("box_radius and t_max must be positive");
        }
        if self.nodes_per_axis == 0
            || self.t_panels == 0
            || self.mc_samples == 0
            || self.levels < 2
            || self.max_subdivisions == 0
        {
            return domain("node, panel, sample and level counts must be positive");
        }
        for (name, v) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(v > 0.0 && v < 1.0) {
                return domain(format!("{name} must lie in (0, 1), got {v}"));
            }
        }
        Ok(())
    }

    pub fn tol(&self) -> Tol {
        Tol::new(self.abs_tol, self.rel_tol).with_limit(self.max_subdivisions)
    }

    /// Cheaper budgets, suitable for whole-body constructions.
    pub fn coarse() -> Self {
        Self { rel_tol: 1e-6, abs_tol: 1e-12, max_subdivisions: 200, ..Self::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mc_samples(mut self, n: usize) -> Self {
        self.mc_samples = n;
        self
    }

    pub fn with_rel_tol(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let c = QuadConfig::default();
        c.validate().unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<QuadConfig>(&s).unwrap(), c);
        assert!(QuadConfig { rel_tol: 0.0, ..c.clone() }.validate().is_err());
        assert!(QuadConfig { mc_samples: 0, ..c }.validate().is_err());
    }
}
