use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Field parameters. Lengths in metres, angles in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldSpec {
    pub row_spacing_m: f64,
    pub seed_spacing_m: f64,
    pub plant_base_height_m: f64,
    /// Heights are drawn uniformly from `[base, base + var]`.
    pub plant_height_var_m: f64,
    /// Yaws are drawn uniformly from `[-range, +range]`.
    pub plant_yaw_range_deg: f64,
    pub row_length_m: f64,
    pub row_count: u32,
    /// Half-width of the uniform lateral offset of each plant from its row.
    pub lateral_jitter_m: f64,
    /// Half-width of the uniform along-row offset of each plant. Off by default.
    pub seed_jitter_m: f64,
    pub rng_seed: u64,
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec {
            row_spacing_m: 0.60,
            seed_spacing_m: 0.16,
            plant_base_height_m: 0.06,
            plant_height_var_m: 0.03,
            plant_yaw_range_deg: 145.0,
            row_length_m: 6.0,
            row_count: 20,
            lateral_jitter_m: 0.01,
            seed_jitter_m: 0.0,
            rng_seed: 0,
        }
    }
}

impl FieldSpec {
    pub fn validate(&self) -> Result<()> {
        positive("row_spacing_m", self.row_spacing_m)?;
        positive("seed_spacing_m", self.seed_spacing_m)?;
        positive("plant_base_height_m", self.plant_base_height_m)?;
        positive("row_length_m", self.row_length_m)?;
        non_negative("plant_height_var_m", self.plant_height_var_m)?;
        non_negative("plant_yaw_range_deg", self.plant_yaw_range_deg)?;
        non_negative("lateral_jitter_m", self.lateral_jitter_m)?;
        non_negative("seed_jitter_m", self.seed_jitter_m)?;
        if self.plant_yaw_range_deg > 180.0 {
            return Err(Error::invalid("plant_yaw_range_deg", "must not exceed 180"));
        }
        if self.row_count == 0 {
            return Err(Error::invalid("row_count", "must be at least 1"));
        }
        if self.lateral_jitter_m * 2.0 >= self.row_spacing_m {
            return Err(Error::invalid(
                "lateral_jitter_m",
                "must be less than half the row spacing",
            ));
        }
        Ok(())
    }

    /// Plants per row: `k = 0, 1, ...` while `k * seed_spacing <= row_length`.
    pub fn plants_per_row(&self) -> u32 {
        // The tolerance keeps exact multiples (6.0 / 0.15 = 40) from rounding down.
        (self.row_length_m / self.seed_spacing_m + 1e-9).floor() as u32 + 1
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive and finite, got {v}")))
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be non-negative and finite, got {v}")))
    }
}
