use nalgebra::{DMatrix, DVector};

use crate::multilayer::LayerFieldSolution;
use crate::{Error, Result};

use super::ThermalStack;

/// Closed-form θ in one layer, in the layer's local coordinate s ∈ [0, d]:
///
/// θ(s) = c_a·e^{−ms} + c_b·e^{−m(d−s)} + ζ(s) + ξ(s) + ψ(s), m = √(h_b/k)
///
/// with the particular solutions
/// ζ = ζ₀e^{−2αs}, ξ = ξ₀e^{2αs}, ψ = ψ_c cos2βs + ψ_s sin2βs.
/// For an unperfused layer (h_b = 0) the homogeneous part is c_a + c_b·s/d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalLayerSolution {
    /// Depth of the left face below the skin surface, m.
    pub start: f64,
    pub thickness: f64,
    pub k_thermal: f64,
    pub h_b: f64,
    pub m: f64,
    pub c_a: f64,
    pub c_b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub zeta0: f64,
    pub xi0: f64,
    pub psi_cos: f64,
    pub psi_sin: f64,
}

impl ThermalLayerSolution {
    fn basis(&self, s: f64) -> [(f64, f64); 2] {
        let d = self.thickness;
        if self.m == 0.0 {
            [(1.0, 0.0), (s / d, 1.0 / d)]
        } else {
            let a = (-self.m * s).exp();
            let b = (-self.m * (d - s)).exp();
            [(a, -self.m * a), (b, self.m * b)]
        }
    }

    fn particular(&self, s: f64) -> (f64, f64) {
        let decay = self.zeta0 * (-2.0 * self.alpha * s).exp();
        let growth = self.xi0 * (2.0 * self.alpha * s).exp();
        let (sin, cos) = (2.0 * self.beta * s).sin_cos();
        let value = decay + growth + self.psi_cos * cos + self.psi_sin * sin;
        let slope = -2.0 * self.alpha * decay
            + 2.0 * self.alpha * growth
            + 2.0 * self.beta * (self.psi_sin * cos - self.psi_cos * sin);
        (value, slope)
    }

    /// θ and dθ/ds at local depth `s`.
    pub fn eval(&self, s: f64) -> (f64, f64) {
        let [(p, dp), (q, dq)] = self.basis(s);
        let (v, dv) = self.particular(s);
        (
            self.c_a * p + self.c_b * q + v,
            self.c_a * dp + self.c_b * dq + dv,
        )
    }

    /// Coefficients of e^{−ms} and e^{+ms} in the homogeneous solution.
    pub fn homogeneous_coefficients(&self) -> (f64, f64) {
        if self.m == 0.0 {
            (self.c_a, self.c_b / self.thickness)
        } else {
            (self.c_a, self.c_b * (-self.m * self.thickness).exp())
        }
    }
}

/// Steady temperature elevation, evaluable anywhere in [0, depth].
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalSolution {
    pub layers: Vec<ThermalLayerSolution>,
    pub depth: f64,
    pub surface_h: f64,
}

impl ThermalSolution {
    fn locate(&self, z: f64) -> Result<(&ThermalLayerSolution, f64)> {
        if !(z.is_finite() && z >= 0.0) {
            return Err(Error::OutsideDomain { z_mm: z * 1e3 });
        }
        let idx = self.layers.iter().rposition(|l| l.start <= z).unwrap_or(0);
        let layer = &self.layers[idx];
        Ok((layer, (z - layer.start).min(layer.thickness)))
    }

    /// θ(z) in °C for a depth below the skin surface. The tissue beyond the
    /// thermal depth sits at its baseline, so θ is zero there.
    pub fn theta_at(&self, z: f64) -> Result<f64> {
        if z >= self.depth {
            return Ok(0.0);
        }
        let (layer, s) = self.locate(z)?;
        Ok(layer.eval(s).0)
    }

    /// Conductive flux k·dθ/dz, W/m².
    pub fn flux_at(&self, z: f64) -> Result<f64> {
        let (layer, s) = self.locate(z.min(self.depth))?;
        Ok(layer.k_thermal * layer.eval(s).1)
    }

    pub fn surface_theta(&self) -> f64 {
        self.layers[0].eval(0.0).0
    }

    pub fn profile(&self, z_grid: &[f64]) -> Result<Vec<f64>> {
        z_grid.iter().map(|&z| self.theta_at(z)).collect()
    }

    /// (|Δθ|, |Δ(kθ′)|) across every interior interface.
    pub fn interface_residuals(&self) -> Vec<(f64, f64)> {
        self.layers
            .windows(2)
            .map(|pair| {
                let (left, right) = (&pair[0], &pair[1]);
                let (tl, dl) = left.eval(left.thickness);
                let (tr, dr) = right.eval(0.0);
                (
                    (tl - tr).abs(),
                    (left.k_thermal * dl - right.k_thermal * dr).abs(),
                )
            })
            .collect()
    }

    /// |k₁θ′(0) − hθ(0)| at the surface, W/m².
    pub fn surface_residual(&self) -> f64 {
        let first = &self.layers[0];
        let (t, dt) = first.eval(0.0);
        (first.k_thermal * dt - self.surface_h * t).abs()
    }
}

/// Closed-form steady θ for the SAR·ρ of `fields`.
pub fn solve_steady_theta(
    thermal: &ThermalStack,
    fields: &LayerFieldSolution,
) -> Result<ThermalSolution> {
    thermal.check_fields(fields)?;
    let surface_h = thermal.environment().surface_h;

    let mut layers = Vec::with_capacity(thermal.layers().len());
    for tl in thermal.layers() {
        let f = &fields.layers[tl.em_index];
        let (k, hb) = (tl.k_thermal, tl.h_b);
        let (alpha, beta) = (f.alpha(), f.beta());
        let uv = f.cross_term();
        let (mut zeta0, mut xi0) = (0.0, 0.0);
        if f.sigma > 0.0 {
            let resonance = 4.0 * alpha * alpha * k - hb;
            if resonance.abs() < 1e-6 * (4.0 * alpha * alpha * k).max(hb) {
                return Err(Error::DegenerateResonance {
                    layer: tl.em_index,
                    value: resonance,
                });
            }
            zeta0 = -f.sigma * f.e_plus.norm_sqr() / (2.0 * resonance);
            xi0 = -f.sigma * f.e_minus.norm_sqr() / (2.0 * resonance);
        }
        // (σ/2)(2u cos2βs + 2v sin2βs) balanced by ψ with k ψ″ − h_b ψ = −(4β²k + h_b) ψ.
        let standing = 4.0 * beta * beta * k + hb;
        layers.push(ThermalLayerSolution {
            start: tl.start,
            thickness: tl.thickness,
            k_thermal: k,
            h_b: hb,
            m: (hb / k).sqrt(),
            c_a: 0.0,
            c_b: 0.0,
            alpha,
            beta,
            zeta0,
            xi0,
            psi_cos: f.sigma * uv.re / standing,
            psi_sin: f.sigma * uv.im / standing,
        });
    }

    let n = layers.len();
    let mut a = DMatrix::<f64>::zeros(2 * n, 2 * n);
    let mut rhs = DVector::<f64>::zeros(2 * n);

    // Surface: k₁θ′ − hθ = 0.
    {
        let l = &layers[0];
        let [(p, dp), (q, dq)] = l.basis(0.0);
        let (v, dv) = l.particular(0.0);
        a[(0, 0)] = l.k_thermal * dp - surface_h * p;
        a[(0, 1)] = l.k_thermal * dq - surface_h * q;
        rhs[0] = -(l.k_thermal * dv - surface_h * v);
    }
    // Interior interfaces: θ and kθ′ continuous.
    for i in 0..n.saturating_sub(1) {
        let (l, r) = (&layers[i], &layers[i + 1]);
        let [(lp, ldp), (lq, ldq)] = l.basis(l.thickness);
        let (lv, ldv) = l.particular(l.thickness);
        let [(rp, rdp), (rq, rdq)] = r.basis(0.0);
        let (rv, rdv) = r.particular(0.0);
        let (row_t, row_f) = (1 + 2 * i, 2 + 2 * i);
        a[(row_t, 2 * i)] = lp;
        a[(row_t, 2 * i + 1)] = lq;
        a[(row_t, 2 * i + 2)] = -rp;
        a[(row_t, 2 * i + 3)] = -rq;
        rhs[row_t] = rv - lv;
        a[(row_f, 2 * i)] = l.k_thermal * ldp;
        a[(row_f, 2 * i + 1)] = l.k_thermal * ldq;
        a[(row_f, 2 * i + 2)] = -r.k_thermal * rdp;
        a[(row_f, 2 * i + 3)] = -r.k_thermal * rdq;
        rhs[row_f] = r.k_thermal * rdv - l.k_thermal * ldv;
    }
    // θ = 0 at the thermal depth.
    {
        let l = &layers[n - 1];
        let [(p, _), (q, _)] = l.basis(l.thickness);
        let (v, _) = l.particular(l.thickness);
        a[(2 * n - 1, 2 * n - 2)] = p;
        a[(2 * n - 1, 2 * n - 1)] = q;
        rhs[2 * n - 1] = -v;
    }

    let x = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::numeric("singular thermal boundary system"))?;
    for (i, layer) in layers.iter_mut().enumerate() {
        layer.c_a = x[2 * i];
        layer.c_b = x[2 * i + 1];
    }
    Ok(ThermalSolution {
        layers,
        depth: thermal.depth(),
        surface_h,
    })
}
