use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::constants::{free_space_impedance, free_space_wavenumber, EPSILON_0};
use crate::dielectrics::{ComplexPermittivity, DielectricDatabase, Tissue};
use crate::{Error, Result};

use super::LayerStack;

/// Normally incident continuous plane wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveExcitation {
    frequency: f64,
    incident_power_density: f64,
}

impl PlaneWaveExcitation {
    /// `frequency` in Hz, `incident_power_density` in W/m². A zero power
    /// density is accepted and yields an all-zero field.
    pub fn new(frequency: f64, incident_power_density: f64) -> Result<Self> {
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(Error::domain(format!(
                "frequency must be positive, got {frequency}"
            )));
        }
        if !(incident_power_density.is_finite() && incident_power_density >= 0.0) {
            return Err(Error::domain(format!(
                "incident power density must be non-negative, got {incident_power_density}"
            )));
        }
        Ok(Self {
            frequency,
            incident_power_density,
        })
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn incident_power_density(&self) -> f64 {
        self.incident_power_density
    }
}

/// Peak amplitude |E₀⁺| = √(2η₀·PD) of the incident wave, V/m.
pub fn incident_amplitude(power_density: f64) -> f64 {
    (2.0 * free_space_impedance() * power_density.max(0.0)).sqrt()
}

/// Forward and backward amplitudes in one layer, with E⁻ referenced to the
/// layer's left face: E(z) = E⁺e^{−jkz} + E⁻e^{+jkz} for local z ≥ 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerField {
    pub tissue: Tissue,
    /// Global depth of the left face, m.
    pub start: f64,
    /// `None` for the semi-infinite last layer.
    pub thickness: Option<f64>,
    pub permittivity: ComplexPermittivity,
    /// σ = ε″ωε₀, S/m.
    pub sigma: f64,
    pub e_plus: Complex64,
    pub e_minus: Complex64,
    /// k = β − jα, rad/m.
    pub k: Complex64,
    /// η = √(μ₀/(ε₀ε*)), Ω.
    pub eta: Complex64,
}

impl LayerField {
    pub fn beta(&self) -> f64 {
        self.k.re
    }

    pub fn alpha(&self) -> f64 {
        -self.k.im
    }

    pub fn e_at(&self, z: f64) -> Complex64 {
        let phase = Complex64::i() * self.k * z;
        self.e_plus * (-phase).exp() + self.e_minus * phase.exp()
    }

    pub fn h_at(&self, z: f64) -> Complex64 {
        let phase = Complex64::i() * self.k * z;
        (self.e_plus * (-phase).exp() - self.e_minus * phase.exp()) / self.eta
    }

    /// (E⁺)(E⁻)* = u + jv.
    pub fn cross_term(&self) -> Complex64 {
        self.e_plus * self.e_minus.conj()
    }

    /// SAR·ρ at local depth `z` from the three-term expansion
    /// (σ/2)[|E⁺|²e^{−2αz} + |E⁻|²e^{2αz} + 2u cos2βz + 2v sin2βz], W/m³.
    pub fn sar_rho_at(&self, z: f64) -> f64 {
        let (alpha, beta) = (self.alpha(), self.beta());
        let uv = self.cross_term();
        let (s, c) = (2.0 * beta * z).sin_cos();
        let value = self.e_plus.norm_sqr() * (-2.0 * alpha * z).exp()
            + self.e_minus.norm_sqr() * (2.0 * alpha * z).exp()
            + 2.0 * uv.re * c
            + 2.0 * uv.im * s;
        (0.5 * self.sigma * value).max(0.0)
    }

    /// ∫ SAR·ρ dz over the layer, W/m².
    pub fn absorbed_power(&self) -> f64 {
        let (alpha, beta) = (self.alpha(), self.beta());
        let plus = self.e_plus.norm_sqr();
        let minus = self.e_minus.norm_sqr();
        let uv = self.cross_term();
        let integral = match self.thickness {
            None => {
                if plus == 0.0 {
                    0.0
                } else if alpha > 0.0 {
                    plus / (2.0 * alpha)
                } else {
                    f64::INFINITY
                }
            }
            Some(d) => {
                let decay = if alpha > 0.0 {
                    plus * -(-2.0 * alpha * d).exp_m1() / (2.0 * alpha)
                        + minus * (2.0 * alpha * d).exp_m1() / (2.0 * alpha)
                } else {
                    (plus + minus) * d
                };
                let (s, c) = (2.0 * beta * d).sin_cos();
                decay + (uv.re * s + uv.im * (1.0 - c)) / beta
            }
        };
        0.5 * self.sigma * integral
    }

    /// Time-averaged Poynting flux ½Re(E H*) crossing the left face, W/m².
    pub fn entering_power(&self) -> f64 {
        0.5 * (self.e_at(0.0) * self.h_at(0.0).conj()).re
    }
}

/// Field amplitudes for every layer of a solved stack.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerFieldSolution {
    pub frequency: f64,
    /// E₀⁺, real and non-negative.
    pub incident: Complex64,
    /// E₀⁻ at the first interface.
    pub reflected: Complex64,
    pub layers: Vec<LayerField>,
}

fn propagation(eps: ComplexPermittivity, frequency: f64) -> (Complex64, Complex64) {
    let root = eps.to_complex().sqrt();
    let k = free_space_wavenumber(frequency) * root;
    let eta = Complex64::from(free_space_impedance()) / root;
    (k, eta)
}

/// Solves E and H continuity at every interface as one linear system.
///
/// Unknowns are the reflected amplitude in air plus, per layer, E⁺ at the
/// left face and E⁻ at the right face (the last layer has no E⁻). Referencing
/// each wave to the face it grows away from keeps every matrix entry bounded
/// by one in magnitude, however lossy the layer.
pub fn solve_layer_fields(
    stack: &LayerStack,
    excitation: &PlaneWaveExcitation,
    db: &DielectricDatabase,
) -> Result<LayerFieldSolution> {
    let frequency = excitation.frequency();
    let n = stack.len();
    let e0 = Complex64::from(incident_amplitude(excitation.incident_power_density()));
    let eta0 = free_space_impedance();

    let mut media = Vec::with_capacity(n);
    for layer in stack.layers() {
        let eps = layer.permittivity(frequency, db)?;
        let (k, eta) = propagation(eps, frequency);
        // Phase factor across the layer, |e^{−jkd}| ≤ 1.
        let across = layer
            .thickness
            .map(|d| (-Complex64::i() * k * d).exp())
            .unwrap_or_default();
        media.push((eps, k, eta, across));
    }

    // Column of layer i's forward / backward unknowns.
    let fwd = |i: usize| 1 + 2 * i;
    let bwd = |i: usize| 2 + 2 * i;
    let size = 2 * n;
    let zero = Complex64::default();
    let one = Complex64::from(1.0);
    let mut a = DMatrix::from_element(size, size, zero);
    let mut b = DVector::from_element(size, zero);

    // Air / first layer. H rows are scaled by η₀ to balance the system.
    a[(0, 0)] = one;
    b[0] = -e0;
    a[(1, 0)] = -one;
    b[1] = -e0;
    for i in 0..n {
        let (_, _, eta, across) = media[i];
        let last = i + 1 == n;
        // Right-hand medium seen at its left face.
        let (row_e, row_h) = (2 * i, 2 * i + 1);
        a[(row_e, fwd(i))] -= one;
        a[(row_h, fwd(i))] -= eta0 / eta;
        if !last {
            a[(row_e, bwd(i))] -= across;
            a[(row_h, bwd(i))] += across * eta0 / eta;

            // Same layer seen from its right face, at the next interface.
            let (row_e, row_h) = (2 * i + 2, 2 * i + 3);
            a[(row_e, fwd(i))] += across;
            a[(row_e, bwd(i))] += one;
            a[(row_h, fwd(i))] += across * eta0 / eta;
            a[(row_h, bwd(i))] -= eta0 / eta;
        }
    }

    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::numeric("singular field system (degenerate layer parameters)"))?;
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::numeric("non-finite field amplitudes"));
    }

    let starts = stack.layer_starts();
    let layers = stack
        .layers()
        .iter()
        .enumerate()
        .map(|(i, layer)| {
            let (eps, k, eta, across) = media[i];
            let e_minus = if i + 1 == n { zero } else { x[bwd(i)] * across };
            LayerField {
                tissue: layer.tissue,
                start: starts[i],
                thickness: layer.thickness,
                permittivity: eps,
                sigma: eps.eps_imag() * 2.0 * std::f64::consts::PI * frequency * EPSILON_0,
                e_plus: x[fwd(i)],
                e_minus,
                k,
                eta,
            }
        })
        .collect();

    Ok(LayerFieldSolution {
        frequency,
        incident: e0,
        reflected: x[0],
        layers,
    })
}

impl LayerFieldSolution {
    pub fn incident_power_density(&self) -> f64 {
        self.incident.norm_sqr() / (2.0 * free_space_impedance())
    }

    pub fn reflected_power_density(&self) -> f64 {
        self.reflected.norm_sqr() / (2.0 * free_space_impedance())
    }

    /// |E₀⁻/E₀⁺|²; zero when there is no incident wave.
    pub fn reflectance(&self) -> f64 {
        if self.incident.norm() == 0.0 {
            0.0
        } else {
            (self.reflected / self.incident).norm_sqr()
        }
    }

    /// Index of the layer containing global depth `z` and the local depth
    /// within it. A point on an interface belongs to the deeper layer.
    pub fn locate(&self, z: f64) -> Result<(usize, f64)> {
        if !(z.is_finite() && z >= 0.0) {
            return Err(Error::OutsideDomain { z_mm: z * 1e3 });
        }
        let idx = self
            .layers
            .iter()
            .rposition(|l| l.start <= z && l.thickness.is_none_or(|d| d > 0.0 || l.start < z))
            .unwrap_or(0);
        Ok((idx, z - self.layers[idx].start))
    }

    pub fn e_at(&self, z: f64) -> Result<Complex64> {
        let (i, local) = self.locate(z)?;
        Ok(self.layers[i].e_at(local))
    }

    pub fn sar_rho_at(&self, z: f64) -> Result<f64> {
        let (i, local) = self.locate(z)?;
        Ok(self.layers[i].sar_rho_at(local))
    }

    /// SAR·ρ (W/m³) at each global depth of `z_grid` (m).
    pub fn sar_rho_profile(&self, z_grid: &[f64]) -> Result<Vec<f64>> {
        z_grid.iter().map(|&z| self.sar_rho_at(z)).collect()
    }

    /// Power absorbed in each layer, W/m².
    pub fn absorbed_per_layer(&self) -> Vec<f64> {
        self.layers.iter().map(LayerField::absorbed_power).collect()
    }

    pub fn total_absorbed(&self) -> f64 {
        self.absorbed_per_layer().iter().sum()
    }

    /// |incident − reflected − absorbed| / incident.
    pub fn energy_balance_error(&self) -> f64 {
        let incident = self.incident_power_density();
        if incident == 0.0 {
            return 0.0;
        }
        (incident - self.reflected_power_density() - self.total_absorbed()).abs() / incident
    }

    /// Poynting flux entering layer `index` divided by the incident flux.
    pub fn transmitted_fraction(&self, index: usize) -> f64 {
        let incident = self.incident_power_density();
        if incident == 0.0 {
            return 0.0;
        }
        self.layers[index].entering_power() / incident
    }

    /// Relative mismatch of E and of H at every interface, starting with the
    /// air / first-layer interface.
    pub fn interface_residuals(&self) -> Vec<(f64, f64)> {
        let eta0 = free_space_impedance();
        let mut left = (
            self.incident + self.reflected,
            (self.incident - self.reflected) / eta0,
        );
        let mut out = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let right = (layer.e_at(0.0), layer.h_at(0.0));
            out.push((relative_gap(left.0, right.0), relative_gap(left.1, right.1)));
            if let Some(d) = layer.thickness {
                left = (layer.e_at(d), layer.h_at(d));
            }
        }
        out
    }

    pub fn max_interface_residual(&self) -> f64 {
        self.interface_residuals()
            .into_iter()
            .flat_map(|(e, h)| [e, h])
            .fold(0.0, f64::max)
    }
}

fn relative_gap(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}
