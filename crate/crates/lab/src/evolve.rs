//! Free and magnetic Dirac flows `e^{itD}` and `e^{itD_A}` on a periodic box.

use magdirac_core::dirac::{exp_i_alpha_dot_apply, Spinor};
use magdirac_core::params::ConstructionParams;
use magdirac_core::quasimode::{Profile, Quasimode};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::grid::{Grid3, SpinorField3D};
use crate::spectral::Spectral3;

/// Edge/peak ratio above which a run is declared truncated. Coarse lattices
/// ring at the 1e-2 level everywhere in the box, well below a front that
/// actually reaches a face.
pub const TRUNCATION_TOL: f64 = 5e-2;

/// Largest tolerated `dt·max|A|`.
pub const POTENTIAL_CFL: f64 = 0.1;
/// Largest tolerated `dt·|ξ|_max`.
pub const FREE_CFL: f64 = 0.5;

/// Potential seen by the magnetic flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    /// `A ≡ 0`.
    Free,
    /// `A(x) = |x|^{−δ} M x`.
    Homogeneous { delta: f64 },
}

impl Potential {
    pub fn eval(&self, x: [f64; 3]) -> Result<[f64; 3]> {
        match *self {
            Potential::Free => Ok([0.0; 3]),
            Potential::Homogeneous { delta } => Ok(magdirac_core::potential::eval_a(delta, x)?),
        }
    }
}

/// Time step, step count, checkpoint stride and potential of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorSpec {
    pub dt: f64,
    pub steps: usize,
    /// Keep every `checkpoint_every`-th state (the final state is always kept).
    pub checkpoint_every: usize,
    pub potential: Potential,
}

impl PropagatorSpec {
    /// Step size `T/steps` with `steps` chosen as the smallest count meeting
    /// both stability bounds on `grid`.
    pub fn covering(grid: &Grid3, horizon: f64, potential: Potential, checkpoints: usize) -> Result<Self> {
        if !(horizon > 0.0) || checkpoints == 0 {
            return Err(LabError::Parameter(format!("bad horizon {horizon} or checkpoint count {checkpoints}")));
        }
        let xi_max = grid.spacing.iter().map(|h| (std::f64::consts::PI / h).powi(2)).sum::<f64>().sqrt();
        let a_max = max_potential(grid, potential)?;
        let dt_max = (FREE_CFL / xi_max).min(if a_max > 0.0 { POTENTIAL_CFL / a_max } else { f64::INFINITY });
        let per = ((horizon / checkpoints as f64) / dt_max).ceil().max(1.0) as usize;
        let steps = per * checkpoints;
        Ok(Self { dt: horizon / steps as f64, steps, checkpoint_every: per, potential })
    }
}

/// `max |A|` over the nodes of `grid`; the origin must not be a node.
pub fn max_potential(grid: &Grid3, potential: Potential) -> Result<f64> {
    let mut m = 0.0f64;
    for idx in 0..grid.len() {
        let a = potential.eval(grid.point(idx))?;
        m = m.max((a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt());
    }
    Ok(m)
}

fn check_support(field: &SpinorField3D, step: usize) -> Result<()> {
    let ratio = field.edge_ratio();
    if ratio > TRUNCATION_TOL {
        return Err(LabError::Truncation { step, ratio });
    }
    Ok(())
}

fn apply_symbol(sp: &Spectral3, field: &SpinorField3D, t: f64) -> SpinorField3D {
    let mut hat: [Vec<Complex64>; 4] = std::array::from_fn(|c| sp.forward(&field.data[c]));
    let n = field.grid.len();
    let chunks: Vec<(usize, Vec<Spinor>)> = (0..n)
        .collect::<Vec<_>>()
        .par_chunks(4096)
        .map(|idx| {
            let out = idx
                .iter()
                .map(|&i| {
                    let s: Spinor = std::array::from_fn(|c| hat[c][i]);
                    exp_i_alpha_dot_apply(sp.xi(i), t, &s)
                })
                .collect();
            (idx[0], out)
        })
        .collect();
    for (start, vals) in chunks {
        for (o, s) in vals.into_iter().enumerate() {
            for c in 0..4 {
                hat[c][start + o] = s[c];
            }
        }
    }
    let mut out = field.clone();
    for (c, mut h) in hat.into_iter().enumerate() {
        sp.fft.inverse(&mut h);
        out.data[c] = h;
    }
    out.time = field.time + t;
    out
}

/// `e^{itD} f`: `exp(itα·ξ)` on every Fourier coefficient.
pub fn free_step(field: &SpinorField3D, t: f64) -> Result<SpinorField3D> {
    check_support(field, 0)?;
    Ok(apply_symbol(&Spectral3::new(field.grid), field, t))
}

/// `e^{itD} f` on the periodic box, for data that need not decay.
pub fn free_step_periodic(field: &SpinorField3D, t: f64) -> SpinorField3D {
    apply_symbol(&Spectral3::new(field.grid), field, t)
}

/// `exp(−i dt α·A(x))` at every node, `A` given pointwise.
pub fn potential_step<F>(field: &SpinorField3D, dt: f64, a: F) -> Result<SpinorField3D>
where
    F: Fn([f64; 3]) -> Result<[f64; 3]> + Sync,
{
    let g = field.grid;
    let vals = (0..g.len())
        .into_par_iter()
        .map(|i| Ok(exp_i_alpha_dot_apply(a(g.point(i))?, -dt, &field.get(i))))
        .collect::<Result<Vec<Spinor>>>()?;
    let mut out = field.clone();
    for (i, s) in vals.iter().enumerate() {
        out.set(i, s);
    }
    Ok(out)
}

/// Precomputed propagator factors for one grid and potential.
struct Strang {
    sp: Spectral3,
    a: Vec<[f64; 3]>,
}

impl Strang {
    fn new(grid: Grid3, potential: Potential) -> Result<Self> {
        let a = (0..grid.len()).map(|i| potential.eval(grid.point(i))).collect::<Result<Vec<_>>>()?;
        Ok(Self { sp: Spectral3::new(grid), a })
    }

    fn half_potential(&self, field: &mut SpinorField3D, dt: f64) {
        if self.a.iter().all(|v| *v == [0.0; 3]) {
            return;
        }
        let vals: Vec<Spinor> = (0..field.grid.len())
            .into_par_iter()
            .map(|i| exp_i_alpha_dot_apply(self.a[i], -0.5 * dt, &field.get(i)))
            .collect();
        for (i, s) in vals.iter().enumerate() {
            field.set(i, s);
        }
    }

    fn step(&self, field: &SpinorField3D, dt: f64) -> SpinorField3D {
        let mut u = field.clone();
        self.half_potential(&mut u, dt);
        let mut u = apply_symbol(&self.sp, &u, dt);
        self.half_potential(&mut u, dt);
        u
    }
}

/// `u_{n+1} = P(dt/2) F(dt) P(dt/2) u_n`; returns the initial state and every
/// checkpoint.
pub fn strang_evolve(f: &SpinorField3D, spec: &PropagatorSpec) -> Result<Vec<SpinorField3D>> {
    if !(spec.dt.is_finite() && spec.dt != 0.0) || spec.checkpoint_every == 0 {
        return Err(LabError::Parameter(format!("bad propagator spec {spec:?}")));
    }
    check_support(f, 0)?;
    let prop = Strang::new(f.grid, spec.potential)?;
    let mut out = vec![f.clone()];
    let mut u = f.clone();
    for n in 1..=spec.steps {
        u = prop.step(&u, spec.dt);
        if n % spec.checkpoint_every == 0 || n == spec.steps {
            check_support(&u, n)?;
            out.push(u.clone());
        }
    }
    Ok(out)
}

/// `|⟨u, v⟩| / (‖u‖ ‖v‖)`.
pub fn fidelity(u: &SpinorField3D, reference: &SpinorField3D) -> Result<f64> {
    let (a, b) = (u.l2_norm(), reference.l2_norm());
    if a == 0.0 || b == 0.0 {
        return Err(LabError::Parameter("fidelity of a zero field".into()));
    }
    Ok((u.inner(reference)?.norm() / (a * b)).min(1.0))
}

/// Box for following `f_R` up to `T = R^β`: the support grown by `T` in every
/// direction, plus ten percent. Even transverse counts keep the axis, and so
/// the origin, off the nodes.
pub fn persistence_box(params: &ConstructionParams, dims: [usize; 3]) -> Result<Grid3> {
    if !dims[0].is_multiple_of(2) || !dims[1].is_multiple_of(2) {
        return Err(LabError::Parameter(format!("transverse node counts must be even, got {dims:?}")));
    }
    let (rg, t) = (params.r_gamma(), params.horizon());
    let half = 1.1 * (params.r + rg + t);
    let reach = rg + 1.3 * t;
    Grid3::cell_centred([-half, -half, params.r - reach], [half, half, params.r + reach], dims)
}

/// Fidelities to `W_R(t)` of the magnetic and the free flow of `f_R`.
#[derive(Debug, Clone, PartialEq)]
pub struct Persistence {
    pub times: Vec<f64>,
    pub magnetic: Vec<f64>,
    pub free: Vec<f64>,
    pub spec: PropagatorSpec,
    /// `‖u(T)‖/‖f_R‖ − 1` for the magnetic flow.
    pub mass_drift: f64,
    /// Magnetic flow at the last checkpoint.
    pub last: SpinorField3D,
}

impl Persistence {
    /// Magnetic fidelity at least the free one at every checkpoint, strictly at the last.
    pub fn dominates(&self) -> bool {
        let n = self.times.len();
        n > 0 && self.magnetic.iter().zip(&self.free).all(|(m, f)| m >= f) && self.magnetic[n - 1] > self.free[n - 1]
    }
}

/// Runs both flows of `f_R` on `grid` up to `R^β` and compares them with
/// `W_R(t)` at `checkpoints` equally spaced times.
pub fn persistence<P>(qm: &Quasimode<'_, P>, grid: Grid3, checkpoints: usize) -> Result<Persistence>
where
    P: Profile + Sync + ?Sized,
{
    let horizon = qm.params.horizon();
    let f = SpinorField3D::sample(grid, 0.0, |x| qm.f_r(x));
    let spec =
        PropagatorSpec::covering(&grid, horizon, Potential::Homogeneous { delta: qm.params.delta }, checkpoints)?;
    let traj = strang_evolve(&f, &spec)?;
    let last = traj.last().cloned().unwrap_or_else(|| f.clone());
    let mut out = Persistence { times: vec![], magnetic: vec![], free: vec![], spec, mass_drift: 0.0, last };
    for (c, u) in traj.iter().enumerate().skip(1) {
        let t = c as f64 * spec.dt * spec.checkpoint_every as f64;
        let w = SpinorField3D::sample(grid, t, |x| qm.w_r(t, x));
        let free = free_step(&f, t)?;
        check_support(&free, c * spec.checkpoint_every)?;
        out.times.push(t);
        out.magnetic.push(fidelity(u, &w)?);
        out.free.push(fidelity(&free, &w)?);
    }
    out.mass_drift = out.last.l2_norm() / f.l2_norm() - 1.0;
    Ok(out)
}
