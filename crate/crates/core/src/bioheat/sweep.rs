use rayon::prelude::*;

use crate::dielectrics::DielectricDatabase;
use crate::multilayer::{solve_layer_fields, LayerStack, PlaneWaveExcitation};
use crate::{Error, Result};

use super::{solve_steady_theta, ThermalStack};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClothingTemperaturePoint {
    /// Clothing thickness, m.
    pub thickness: f64,
    /// Steady θ at the skin surface, °C.
    pub surface_theta: f64,
    /// Fraction of the incident power entering the skin.
    pub skin_transmission: f64,
}

/// Surface temperature elevation of a clothed stack as the clothing
/// thickness varies over [0, 10] mm. A zero thickness is treated as bare
/// skin, including air cooling at the surface.
pub fn clothing_thickness_temperature_sweep(
    stack: &LayerStack,
    thicknesses: &[f64],
    excitation: &PlaneWaveExcitation,
    db: &DielectricDatabase,
) -> Result<Vec<ClothingTemperaturePoint>> {
    if stack.clothing_thickness().is_none() {
        return Err(Error::Usage("clothing sweep needs a clothed stack".into()));
    }
    if let Some(bad) = thicknesses.iter().find(|d| !(0.0..=10e-3).contains(*d)) {
        return Err(Error::domain(format!(
            "clothing thickness {} mm is outside [0, 10] mm",
            bad * 1e3
        )));
    }
    thicknesses
        .par_iter()
        .map(|&d| {
            let resized = stack.with_clothing_thickness(d)?;
            let fields = solve_layer_fields(&resized, excitation, db)?;
            let thermal = ThermalStack::from_stack(&resized, db)?;
            let theta = solve_steady_theta(&thermal, &fields)?;
            Ok(ClothingTemperaturePoint {
                thickness: d,
                surface_theta: theta.surface_theta(),
                skin_transmission: fields.transmitted_fraction(thermal.layers()[0].em_index),
            })
        })
        .collect()
}
