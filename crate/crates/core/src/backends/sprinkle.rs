//! Poisson sprinkling into regions of Minkowski space.

use crate::backends::causal_set::CausalSet;
use crate::backends::minkowski::Region;
use crate::error::{input, Result};
use crate::space::PointRef;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SprinkleConfig {
    /// Spacetime dimension `N = 1 + n`.
    pub dimension: usize,
    pub region: Region,
    /// Expected points per unit volume.
    pub intensity: f64,
    pub seed: u64,
}

impl SprinkleConfig {
    pub fn unit_diamond(dimension: usize, intensity: f64, seed: u64) -> Self {
        Self {
            dimension,
            region: Region::rest_diamond(dimension.saturating_sub(1), 1.0),
            intensity,
            seed,
        }
    }
}

/// Seeded uniform points in a bounded region, `count` of them.
pub fn uniform_points<R: Rng + ?Sized>(region: &Region, count: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    let (lo, hi) = region.bounding_box()?;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| l + (h - l) * rng.random::<f64>())
            .collect();
        if region.contains(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

/// Sprinkles a Poisson(intensity * volume) number of uniform points and
/// returns them as a causal set with coordinate-induced structure. Ids are
/// `p0, p1, ...` in sampling order.
pub fn sprinkle(cfg: &SprinkleConfig) -> Result<CausalSet> {
    if !(cfg.intensity > 0.0) || !cfg.intensity.is_finite() {
        return Err(input(format!("intensity must be positive, got {}", cfg.intensity)));
    }
    if cfg.dimension == 0 {
        return Err(input("dimension must be at least 1"));
    }
    match cfg.region.dimension() {
        Some(d) if d == cfg.dimension => {}
        Some(d) => {
            return Err(input(format!(
                "region dimension {d} does not match {}",
                cfg.dimension
            )))
        }
        None => return Err(input("sprinkling needs a bounded region")),
    }
    let volume = cfg.region.volume()?;
    if !(volume > 0.0) || !volume.is_finite() {
        return Err(input(format!("region volume must be finite and positive, got {volume}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let count = Poisson::new(cfg.intensity * volume)
        .map_err(|e| input(format!("poisson rate: {e}")))?
        .sample(&mut rng) as usize;
    let pts = uniform_points(&cfg.region, count, &mut rng)?;
    CausalSet::from_minkowski(
        pts.into_iter()
            .enumerate()
            .map(|(i, c)| PointRef::with_coords(format!("p{i}"), c))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_points() {
        let cfg = SprinkleConfig::unit_diamond(2, 100.0, 42);
        let a = sprinkle(&cfg).unwrap();
        let b = sprinkle(&cfg).unwrap();
        assert_eq!(a.points(), b.points());
        assert!(!a.is_empty());
        for p in a.points() {
            assert!(cfg.region.contains(p.coords.as_ref().unwrap()));
        }
    }

    #[test]
    fn zero_volume_region_is_rejected() {
        let cfg = SprinkleConfig {
            dimension: 2,
            region: Region::Diamond {
                p: vec![0.0, 0.0],
                q: vec![1.0, 1.0],
            },
            intensity: 100.0,
            seed: 1,
        };
        assert!(sprinkle(&cfg).is_err());
        let flat = SprinkleConfig {
            region: Region::Box {
                lo: vec![0.0, 0.0],
                hi: vec![0.0, 1.0],
            },
            ..cfg
        };
        assert!(sprinkle(&flat).is_err());
    }

    #[test]
    fn non_positive_intensity_is_rejected() {
        assert!(sprinkle(&SprinkleConfig::unit_diamond(2, 0.0, 1)).is_err());
    }

    #[test]
    fn counts_are_poisson_with_diamond_mean() {
        // volume of the unit diamond in 1+1 is 0.5, so the mean count is 50
        let counts: Vec<f64> = (0..1000u64)
            .map(|s| sprinkle(&SprinkleConfig::unit_diamond(2, 100.0, s)).unwrap().len() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / counts.len() as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64;
        let sigma_mean = (50.0f64 / 1000.0).sqrt();
        assert!((mean - 50.0).abs() < 3.0 * sigma_mean, "mean {mean}");
        assert!((var / 50.0 - 1.0).abs() < 0.2, "variance {var}");
    }
}
