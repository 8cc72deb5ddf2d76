//! Finite-difference (finite-volume on a node grid) bioheat solvers.
//!
//! These share no code with the closed form and serve as its independent
//! check. Layer interfaces must fall on grid nodes; each interface node
//! balances the conductive fluxes of the two half-cells around it, which
//! keeps the scheme second-order accurate across jumps in k, h_b and SAR·ρ.

use crate::multilayer::LayerFieldSolution;
use crate::{Error, Result};

use super::ThermalStack;

const MAX_GRID_STEP: f64 = 50e-6;
const MAX_TIME_STEPS: usize = 1_000_000;

/// Values sampled on a uniform depth grid (m from the skin surface).
#[derive(Debug, Clone, PartialEq)]
pub struct FdProfile {
    pub z: Vec<f64>,
    pub values: Vec<f64>,
}

impl FdProfile {
    pub fn surface(&self) -> f64 {
        self.values[0]
    }
}

struct Grid {
    step: f64,
    z: Vec<f64>,
    /// Layer index of each cell [z_j, z_{j+1}].
    cell_layer: Vec<usize>,
}

fn build_grid(thermal: &ThermalStack, step: f64) -> Result<Grid> {
    if !(step.is_finite() && step > 0.0 && step <= MAX_GRID_STEP * (1.0 + 1e-12)) {
        return Err(Error::domain(format!(
            "grid step must lie in (0, 50] µm, got {} µm",
            step * 1e6
        )));
    }
    let mut cell_layer = Vec::new();
    for (i, layer) in thermal.layers().iter().enumerate() {
        let cells = layer.thickness / step;
        let rounded = cells.round();
        if rounded < 1.0 || (cells - rounded).abs() > 1e-6 * cells.max(1.0) {
            return Err(Error::domain(format!(
                "layer {i} ({:.4} mm) is not a whole number of {} µm grid steps",
                layer.thickness * 1e3,
                step * 1e6
            )));
        }
        cell_layer.extend(std::iter::repeat_n(i, rounded as usize));
    }
    let z = (0..=cell_layer.len()).map(|j| j as f64 * step).collect();
    Ok(Grid {
        step,
        z,
        cell_layer,
    })
}

/// Row j: sub[j]·x[j−1] + diag[j]·x[j] + sup[j]·x[j+1] = rhs[j].
struct Tridiagonal {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl Tridiagonal {
    /// Thomas algorithm; the systems assembled here are diagonally dominant.
    fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0];
        if denom.abs() < f64::MIN_POSITIVE {
            return Err(Error::numeric("singular finite-difference matrix"));
        }
        c[0] = self.sup[0] / denom;
        d[0] = rhs[0] / denom;
        for j in 1..n {
            denom = self.diag[j] - self.sub[j] * c[j - 1];
            if denom.abs() < f64::MIN_POSITIVE || !denom.is_finite() {
                return Err(Error::numeric("singular finite-difference matrix"));
            }
            c[j] = self.sup[j] / denom;
            d[j] = (rhs[j] - self.sub[j] * d[j - 1]) / denom;
        }
        for j in (0..n - 1).rev() {
            d[j] -= c[j] * d[j + 1];
        }
        Ok(d)
    }
}

/// Discrete operator −k∂² + h_b with the surface Robin row, plus the nodal
/// heat capacities. The last row is the Dirichlet condition.
fn operator(thermal: &ThermalStack, grid: &Grid) -> (Tridiagonal, Vec<f64>) {
    let n = grid.z.len();
    let h = grid.step;
    let layers = thermal.layers();
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut cap = vec![0.0; n];
    for j in 0..n - 1 {
        if j > 0 {
            let l = &layers[grid.cell_layer[j - 1]];
            sub[j] = -l.k_thermal / h;
            diag[j] += l.k_thermal / h + l.h_b * h / 2.0;
            cap[j] += l.rho * l.c * h / 2.0;
        }
        let r = &layers[grid.cell_layer[j]];
        sup[j] = -r.k_thermal / h;
        diag[j] += r.k_thermal / h + r.h_b * h / 2.0;
        cap[j] += r.rho * r.c * h / 2.0;
    }
    diag[0] += thermal.environment().surface_h;
    diag[n - 1] = 1.0;
    (Tridiagonal { sub, diag, sup }, cap)
}

/// Nodal load ∫ f over the half-cells around each node, with `f(layer, s)`
/// evaluated at the node from each side.
#[allow(clippy::needless_range_loop)]
fn load(grid: &Grid, f: impl Fn(usize, f64) -> f64, starts: &[f64]) -> Vec<f64> {
    let n = grid.z.len();
    let h = grid.step;
    let mut out = vec![0.0; n];
    for j in 0..n - 1 {
        if j > 0 {
            let i = grid.cell_layer[j - 1];
            out[j] += f(i, grid.z[j] - starts[i]) * h / 2.0;
        }
        let i = grid.cell_layer[j];
        out[j] += f(i, grid.z[j] - starts[i]) * h / 2.0;
    }
    out
}

fn sar_load(thermal: &ThermalStack, grid: &Grid, fields: &LayerFieldSolution) -> Vec<f64> {
    let layers = thermal.layers();
    let starts: Vec<f64> = layers.iter().map(|l| l.start).collect();
    load(
        grid,
        |i, s| fields.layers[layers[i].em_index].sar_rho_at(s),
        &starts,
    )
}

/// Steady θ on a uniform grid of spacing `grid_step` (≤ 50 µm).
pub fn solve_steady_theta_fd(
    thermal: &ThermalStack,
    fields: &LayerFieldSolution,
    grid_step: f64,
) -> Result<FdProfile> {
    thermal.check_fields(fields)?;
    let grid = build_grid(thermal, grid_step)?;
    let (matrix, _) = operator(thermal, &grid);
    let mut rhs = sar_load(thermal, &grid, fields);
    *rhs.last_mut().unwrap() = 0.0;
    let values = matrix.solve(&rhs)?;
    Ok(FdProfile { z: grid.z, values })
}

/// Pre-exposure temperature T_s(z) in °C: k T″ − h_b(T − T_blood) + Q_m = 0
/// with k T′ = h(T − T_air) at the surface and T = T_blood at the thermal
/// depth.
pub fn baseline_temperature_fd(thermal: &ThermalStack, grid_step: f64) -> Result<FdProfile> {
    let grid = build_grid(thermal, grid_step)?;
    let env = thermal.environment();
    let (matrix, _) = operator(thermal, &grid);
    let layers = thermal.layers();
    let starts: Vec<f64> = layers.iter().map(|l| l.start).collect();
    let mut rhs = load(
        &grid,
        |i, _| layers[i].q_m + layers[i].h_b * env.t_blood,
        &starts,
    );
    rhs[0] += env.surface_h * env.t_air;
    *rhs.last_mut().unwrap() = env.t_blood;
    let values = matrix.solve(&rhs)?;
    Ok(FdProfile { z: grid.z, values })
}

/// θ(z, t) under constant exposure, starting from θ = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TransientSolution {
    pub z: Vec<f64>,
    /// s; the first entry is t = 0.
    pub times: Vec<f64>,
    pub profiles: Vec<Vec<f64>>,
}

impl TransientSolution {
    pub fn last(&self) -> &[f64] {
        self.profiles.last().unwrap()
    }

    /// Absolute temperatures given the baseline on the same grid.
    pub fn absolute(&self, baseline: &FdProfile) -> Result<Vec<Vec<f64>>> {
        if baseline.z.len() != self.z.len() {
            return Err(Error::Usage(
                "baseline grid differs from the transient grid".into(),
            ));
        }
        Ok(self
            .profiles
            .iter()
            .map(|p| p.iter().zip(&baseline.values).map(|(a, b)| a + b).collect())
            .collect())
    }
}

/// Backward-Euler integration of ρc ∂θ/∂t = k ∂²θ/∂z² − h_b θ + SAR·ρ.
///
/// The implicit step is unconditionally stable and, because the stepping
/// matrix is an M-matrix, θ never decreases in time under constant exposure.
pub fn solve_transient_theta(
    thermal: &ThermalStack,
    fields: &LayerFieldSolution,
    grid_step: f64,
    duration: f64,
    time_step: f64,
) -> Result<TransientSolution> {
    thermal.check_fields(fields)?;
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(Error::numeric(format!("invalid duration {duration} s")));
    }
    if !(time_step.is_finite() && time_step > 0.0) {
        return Err(Error::numeric(format!("invalid time step {time_step} s")));
    }
    let steps = (duration / time_step - 1e-9).ceil().max(0.0);
    if steps > MAX_TIME_STEPS as f64 {
        return Err(Error::numeric(format!(
            "{steps} time steps exceed the limit of {MAX_TIME_STEPS}; use a larger step"
        )));
    }
    let steps = steps as usize;

    let grid = build_grid(thermal, grid_step)?;
    let (matrix, cap) = operator(thermal, &grid);
    let source = sar_load(thermal, &grid, fields);
    let n = grid.z.len();

    let mut times = vec![0.0];
    let mut profiles = vec![vec![0.0; n]];
    let mut t = 0.0;
    let mut current_dt = f64::NAN;
    let mut stepping = Tridiagonal {
        sub: matrix.sub.clone(),
        diag: matrix.diag.clone(),
        sup: matrix.sup.clone(),
    };
    for _ in 0..steps {
        let dt = time_step.min(duration - t);
        if dt != current_dt {
            for (j, d) in stepping.diag.iter_mut().enumerate().take(n - 1) {
                *d = matrix.diag[j] + cap[j] / dt;
            }
            current_dt = dt;
        }
        let prev = profiles.last().unwrap();
        let mut rhs: Vec<f64> = (0..n).map(|j| source[j] + cap[j] / dt * prev[j]).collect();
        rhs[n - 1] = 0.0;
        let next = stepping.solve(&rhs)?;
        t += dt;
        times.push(t);
        profiles.push(next);
    }
    Ok(TransientSolution {
        z: grid.z,
        times,
        profiles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bioheat::{solve_steady_theta, ThermalStack};
    use crate::constants::{GHZ, MM};
    use crate::dielectrics::DielectricDatabase;
    use crate::multilayer::{solve_layer_fields, LayerStack, ModelPreset, PlaneWaveExcitation};

    fn setup(p: ModelPreset, pd: f64) -> (ThermalStack, LayerFieldSolution) {
        let db = DielectricDatabase::bundled();
        let stack = LayerStack::preset(p, 1.0 * MM).unwrap();
        let fields = solve_layer_fields(
            &stack,
            &PlaneWaveExcitation::new(60.0 * GHZ, pd).unwrap(),
            db,
        )
        .unwrap();
        (ThermalStack::from_stack(&stack, db).unwrap(), fields)
    }

    fn max_error(thermal: &ThermalStack, fields: &LayerFieldSolution, step: f64) -> f64 {
        let exact = solve_steady_theta(thermal, fields).unwrap();
        let fd = solve_steady_theta_fd(thermal, fields, step).unwrap();
        fd.z.iter()
            .zip(&fd.values)
            .map(|(&z, &v)| (exact.theta_at(z).unwrap() - v).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn thomas_solves_a_small_system() {
        let m = Tridiagonal {
            sub: vec![0.0, -1.0, -1.0],
            diag: vec![2.0, 2.0, 2.0],
            sup: vec![-1.0, -1.0, 0.0],
        };
        let x = m.solve(&[1.0, 0.0, 1.0]).unwrap();
        for (a, b) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn grid_must_resolve_layers() {
        let (thermal, fields) = setup(ModelPreset::NakedSkin, 10.0);
        assert!(solve_steady_theta_fd(&thermal, &fields, 60e-6).is_err());
        assert!(solve_steady_theta_fd(&thermal, &fields, 30e-6).is_err());
        assert!(solve_steady_theta_fd(&thermal, &fields, 0.0).is_err());
        assert!(solve_steady_theta_fd(&thermal, &fields, 50e-6).is_ok());
    }

    #[test]
    fn zero_source_zero_profile() {
        let (thermal, fields) = setup(ModelPreset::HatOnForehead, 0.0);
        let fd = solve_steady_theta_fd(&thermal, &fields, 20e-6).unwrap();
        assert!(fd.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn agrees_with_closed_form() {
        for p in ModelPreset::ALL {
            let (thermal, fields) = setup(p, 10.0);
            let err = max_error(&thermal, &fields, 10e-6);
            assert!(err < 1e-3, "{p}: {err}");
        }
    }

    #[test]
    fn second_order_convergence() {
        let (thermal, fields) = setup(ModelPreset::NakedSkin, 10.0);
        let coarse = max_error(&thermal, &fields, 20e-6);
        let fine = max_error(&thermal, &fields, 10e-6);
        let order = (coarse / fine).log2();
        assert!((order - 2.0).abs() <= 0.2, "order {order}");
    }

    #[test]
    fn baseline_is_bounded_by_air_and_blood() {
        let (thermal, _) = setup(ModelPreset::NakedSkin, 10.0);
        let base = baseline_temperature_fd(&thermal, 50e-6).unwrap();
        assert_eq!(*base.values.last().unwrap(), 37.0);
        // Metabolic heat can lift tissue slightly above blood temperature.
        assert!(base.values.iter().all(|&t| t > 23.0 && t < 38.0));
        assert!(base.surface() < 37.0);
    }

    #[test]
    fn transient_rises_monotonically() {
        let (thermal, fields) = setup(ModelPreset::NakedSkin, 10.0);
        let tr = solve_transient_theta(&thermal, &fields, 50e-6, 600.0, 30.0).unwrap();
        assert_eq!(tr.times.len(), 21);
        for pair in tr.profiles.windows(2) {
            for (a, b) in pair[0].iter().zip(&pair[1]) {
                assert!(b >= a);
            }
        }
    }

    #[test]
    fn transient_reaches_steady_state() {
        let (thermal, fields) = setup(ModelPreset::NakedForehead, 10.0);
        let steady = solve_steady_theta(&thermal, &fields).unwrap();
        let tr = solve_transient_theta(&thermal, &fields, 10e-6, 1e7, 1e5).unwrap();
        let worst =
            tr.z.iter()
                .zip(tr.last())
                .map(|(&z, &v)| (steady.theta_at(z).unwrap() - v).abs())
                .fold(0.0, f64::max);
        assert!(worst < 1e-3, "{worst}");
    }

    #[test]
    fn transient_rejects_bad_steps() {
        let (thermal, fields) = setup(ModelPreset::NakedSkin, 10.0);
        assert!(matches!(
            solve_transient_theta(&thermal, &fields, 50e-6, 10.0, 0.0),
            Err(Error::Numeric(_))
        ));
        assert!(matches!(
            solve_transient_theta(&thermal, &fields, 50e-6, 1e9, 1e-3),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn transient_last_step_lands_on_duration() {
        let (thermal, fields) = setup(ModelPreset::NakedSkin, 10.0);
        let tr = solve_transient_theta(&thermal, &fields, 50e-6, 100.0, 30.0).unwrap();
        assert_eq!(tr.times, vec![0.0, 30.0, 60.0, 90.0, 100.0]);
    }
}
