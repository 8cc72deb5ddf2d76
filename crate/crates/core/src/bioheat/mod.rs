//! Temperature elevation θ(z) = T(z) − T_baseline(z) from the Pennes
//! bioheat equation, driven by the SAR·ρ of a solved field.
//!
//! Steady state obeys k θ″ − h_b θ + SAR·ρ = 0 in every layer, with
//! k₁θ′ = hθ at the skin surface, continuity of θ and kθ′ at interfaces and
//! θ = 0 at the thermal depth (35 mm by default). The metabolic heat and the
//! blood and air temperatures only shape the pre-exposure baseline, so they
//! drop out of θ.
//!
//! Depths in this module are measured from the skin surface. Clothing takes
//! part in the electromagnetic solve but carries no heat equation; when it
//! covers the skin the surface is treated as insulated.

mod analytic;
mod fd;
mod sweep;

pub use analytic::{solve_steady_theta, ThermalLayerSolution, ThermalSolution};
pub use fd::{
    baseline_temperature_fd, solve_steady_theta_fd, solve_transient_theta, FdProfile,
    TransientSolution,
};
pub use sweep::{clothing_thickness_temperature_sweep, ClothingTemperaturePoint};

use crate::constants::{DEFAULT_T_AIR, DEFAULT_T_BLOOD, SKIN_AIR_HEAT_TRANSFER, THERMAL_DEPTH};
use crate::dielectrics::{DielectricDatabase, Tissue, TissueThermalRecord};
use crate::multilayer::{LayerFieldSolution, LayerStack};
use crate::{Error, Result};

/// Perfusion heat-transfer coefficient h_b = ρ_blood·c_blood·ω, W/m³/°C,
/// where ω = w·10⁻⁶/60·ρ_tissue converts a perfusion rate in mL/kg/min into
/// a volumetric rate in s⁻¹.
pub fn heat_transfer_coefficient(layer: &TissueThermalRecord, blood: &TissueThermalRecord) -> f64 {
    let per_second = layer.w * 1e-6 / 60.0 * layer.rho;
    blood.rho * blood.c * per_second
}

/// Surroundings of the tissue. Only `surface_h` enters θ; the temperatures
/// matter for absolute (baseline) profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    pub t_air: f64,
    pub t_blood: f64,
    /// Surface heat-transfer coefficient, W/m²/°C.
    pub surface_h: f64,
}

impl Default for Environment {
    fn default() -> Self {
        Self {
            t_air: DEFAULT_T_AIR,
            t_blood: DEFAULT_T_BLOOD,
            surface_h: SKIN_AIR_HEAT_TRANSFER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalLayer {
    pub tissue: Tissue,
    /// Index of the matching layer in the electromagnetic stack.
    pub em_index: usize,
    /// Depth of the left face below the skin surface, m.
    pub start: f64,
    /// m.
    pub thickness: f64,
    pub rho: f64,
    pub c: f64,
    pub k_thermal: f64,
    /// mL/kg/min.
    pub w: f64,
    pub q_m: f64,
    /// W/m³/°C.
    pub h_b: f64,
}

/// Tissue layers of a [`LayerStack`] with their thermal properties.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalStack {
    layers: Vec<ThermalLayer>,
    environment: Environment,
    depth: f64,
    /// Global electromagnetic depth of the skin surface, m.
    surface_offset: f64,
    em_layers: usize,
}

impl ThermalStack {
    /// Thermal domain of `stack` down to [`THERMAL_DEPTH`], with surface
    /// transfer 7 W/m²/°C for bare skin and 0 under clothing.
    pub fn from_stack(stack: &LayerStack, db: &DielectricDatabase) -> Result<Self> {
        let clothed = stack.clothing_thickness().is_some_and(|d| d > 0.0);
        let environment = Environment {
            surface_h: if clothed { 0.0 } else { SKIN_AIR_HEAT_TRANSFER },
            ..Environment::default()
        };
        Self::with_options(stack, db, environment, THERMAL_DEPTH)
    }

    pub fn with_options(
        stack: &LayerStack,
        db: &DielectricDatabase,
        environment: Environment,
        depth: f64,
    ) -> Result<Self> {
        if !(depth.is_finite() && depth > 0.0) {
            return Err(Error::domain(format!(
                "thermal depth must be positive, got {depth}"
            )));
        }
        if !(environment.surface_h.is_finite() && environment.surface_h >= 0.0) {
            return Err(Error::domain(
                "surface heat-transfer coefficient must be non-negative",
            ));
        }
        let blood = db.thermal(Tissue::Blood)?;
        let starts = stack.layer_starts();
        let first = usize::from(stack.clothing_thickness().is_some());
        let surface_offset = starts[first];

        let mut layers = Vec::new();
        for (i, layer) in stack.layers().iter().enumerate().skip(first) {
            let start = starts[i] - surface_offset;
            let thickness = match layer.thickness {
                Some(0.0) => continue,
                Some(d) => d.min(depth - start),
                None => depth - start,
            };
            let record = match layer.thermal {
                Some(r) => r,
                None => *db.thermal(layer.tissue)?,
            };
            record.validate()?;
            layers.push(ThermalLayer {
                tissue: layer.tissue,
                em_index: i,
                start,
                thickness,
                rho: record.rho,
                c: record.c,
                k_thermal: record.k_thermal,
                w: record.w,
                q_m: record.q_m,
                h_b: heat_transfer_coefficient(&record, blood),
            });
            if start + thickness >= depth - 1e-12 {
                break;
            }
        }
        Ok(Self {
            layers,
            environment,
            depth,
            surface_offset,
            em_layers: stack.len(),
        })
    }

    pub fn with_surface_h(mut self, h: f64) -> Result<Self> {
        if !(h.is_finite() && h >= 0.0) {
            return Err(Error::domain(
                "surface heat-transfer coefficient must be non-negative",
            ));
        }
        self.environment.surface_h = h;
        Ok(self)
    }

    pub fn with_temperatures(mut self, t_air: f64, t_blood: f64) -> Self {
        self.environment.t_air = t_air;
        self.environment.t_blood = t_blood;
        self
    }

    pub fn layers(&self) -> &[ThermalLayer] {
        &self.layers
    }

    pub fn environment(&self) -> Environment {
        self.environment
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn surface_offset(&self) -> f64 {
        self.surface_offset
    }

    /// Depths of the interior interfaces, m.
    pub fn interfaces(&self) -> Vec<f64> {
        self.layers.iter().skip(1).map(|l| l.start).collect()
    }

    pub(crate) fn check_fields(&self, fields: &LayerFieldSolution) -> Result<()> {
        let consistent = fields.layers.len() == self.em_layers
            && self.layers.iter().all(|l| {
                let f = &fields.layers[l.em_index];
                f.tissue == l.tissue && (f.start - self.surface_offset - l.start).abs() < 1e-12
            });
        if consistent {
            Ok(())
        } else {
            Err(Error::Usage(
                "field solution does not belong to the stack this thermal model was built from"
                    .into(),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::MM;
    use crate::multilayer::ModelPreset;

    fn db() -> &'static DielectricDatabase {
        DielectricDatabase::bundled()
    }

    #[test]
    fn skin_perfusion_coefficient() {
        let skin = db().thermal(Tissue::Skin).unwrap();
        let blood = db().thermal(Tissue::Blood).unwrap();
        // 1050 · 3617 · (106e-6 / 60) · 1109 = 7440.8
        let hb = heat_transfer_coefficient(skin, blood);
        assert!((hb - 7.4e3).abs() <= 0.1e3, "{hb}");
        assert!((hb - 7440.8).abs() < 0.1);
    }

    #[test]
    fn perfusion_is_linear_in_rate_and_density() {
        let blood = db().thermal(Tissue::Blood).unwrap();
        let skin = heat_transfer_coefficient(db().thermal(Tissue::Skin).unwrap(), blood);
        let bone = heat_transfer_coefficient(db().thermal(Tissue::Bone).unwrap(), blood);
        assert!((bone - (10.0 / 106.0) * (1908.0 / 1109.0) * skin).abs() < 1e-9 * skin);
        let mut still = *db().thermal(Tissue::Skin).unwrap();
        still.w = 0.0;
        assert_eq!(heat_transfer_coefficient(&still, blood), 0.0);
    }

    #[test]
    fn presets_span_35_mm() {
        for p in ModelPreset::ALL {
            let stack = LayerStack::preset(p, 1.0 * MM).unwrap();
            let t = ThermalStack::from_stack(&stack, db()).unwrap();
            let total: f64 = t.layers().iter().map(|l| l.thickness).sum();
            assert!((total - 35.0 * MM).abs() < 1e-12);
            assert_eq!(t.layers().len(), 3);
            assert_eq!(t.layers()[0].tissue, Tissue::Skin);
            assert!((t.layers()[2].thickness - 31.0 * MM).abs() < 1e-12);
            let h = t.environment().surface_h;
            assert_eq!(h, if p.is_clothed() { 0.0 } else { 7.0 });
        }
    }

    #[test]
    fn bare_clothing_layer_keeps_air_contact() {
        let stack = LayerStack::preset(ModelPreset::HatOnForehead, 0.0).unwrap();
        let t = ThermalStack::from_stack(&stack, db()).unwrap();
        assert_eq!(t.environment().surface_h, 7.0);
    }

    #[test]
    fn shallow_thermal_depth_truncates_layers() {
        let stack = LayerStack::preset(ModelPreset::NakedSkin, 0.0).unwrap();
        let t = ThermalStack::with_options(&stack, db(), Environment::default(), 3.0 * MM).unwrap();
        assert_eq!(t.layers().len(), 2);
        assert!((t.layers()[1].thickness - 2.0 * MM).abs() < 1e-15);
        let t = ThermalStack::with_options(&stack, db(), Environment::default(), 4.0 * MM).unwrap();
        assert_eq!(t.layers().len(), 2);
        assert!(ThermalStack::with_options(&stack, db(), Environment::default(), 0.0).is_err());
    }
}
