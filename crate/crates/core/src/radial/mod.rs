//! Lowest-channel hyperradial equation
//!
//! ```text
//! -(1/R) d/dR (R dF/dR) + [lambda_0(cR)^2 / R^2 + U_00(R)] F = k^2 F
//! ```
//!
//! integrated in `t = ln(s R)`, where it reads
//! `F_tt = [lambda_0^2 + rho^2 (U / s^2 - (k/s)^2)] F` with `rho = s R` and no
//! first-derivative term. The scale `s` is `c` (or `k`, or `q`, when the
//! coupling vanishes), so the integration only ever sees dimensionless
//! numbers and is covariant under a common rescaling of all lengths.
//!
//! The conserved Wronskian of two solutions is `F G_t - F_t G = R (F G' - F' G)`.
//!
//! For `k << c` both solutions of the forbidden region change as powers of
//! `R` (at most `R^{+-3}`), so the state never approaches overflow and no
//! renormalization or logarithmic form is needed.

pub(crate) mod ode;

use serde::{Deserialize, Serialize};

use crate::channels::lambda_root;
use crate::error::{Error, Result};
use crate::fit::two_function_fit;
use crate::specfun;
use crate::wkb;

pub use crate::potential::{potential_value, ModelPotential, ThreeBodyPotential, MAX_C_R0};
pub use ode::IntegrationStats;
use ode::State;

pub const DEFAULT_NODES_PER_EFOLD: usize = 100;
pub const DEFAULT_RTOL: f64 = 1e-11;
/// `R_max = RMAX_FACTOR / k` unless overridden.
pub const RMAX_FACTOR: f64 = 40.0;
/// Smallest admissible `k R_max`.
pub const MIN_K_RMAX: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialOptions {
    /// Inner start; defaults to `1e-6 min(r0, 1/c)`.
    pub r_min: Option<f64>,
    /// Outer end; defaults to `40 / k`.
    pub r_max: Option<f64>,
    /// Output nodes per unit of `ln R`.
    pub nodes_per_efold: usize,
    /// Relative local error target of the step controller.
    pub rtol: f64,
}

impl Default for RadialOptions {
    fn default() -> Self {
        RadialOptions {
            r_min: None,
            r_max: None,
            nodes_per_efold: DEFAULT_NODES_PER_EFOLD,
            rtol: DEFAULT_RTOL,
        }
    }
}

impl RadialOptions {
    fn validate(&self) -> Result<()> {
        if self.nodes_per_efold < 4 {
            return Err(Error::invalid("nodes_per_efold must be at least 4"));
        }
        if !(self.rtol > 1e-15 && self.rtol < 1e-3) {
            return Err(Error::invalid(format!("rtol = {:e} outside (1e-15, 1e-3)", self.rtol)));
        }
        Ok(())
    }
}

/// Dimensionless form of the problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Scaled {
    /// Length scale: `rho = s R`.
    pub s: f64,
    /// `c / s`, either 0 or 1.
    pub cs: f64,
    pub kappa: f64,
    pub qs: f64,
    pub beta_s: f64,
    /// Potential edge `s r0`; infinite when there is no potential.
    pub rho0: f64,
}

impl Scaled {
    pub fn new(c: f64, k: f64, p: Option<&ModelPotential>) -> Self {
        let s = if c > 0.0 {
            c
        } else if k > 0.0 {
            k
        } else {
            p.map_or(1.0, |p| p.q())
        };
        Scaled {
            s,
            cs: if c > 0.0 { 1.0 } else { 0.0 },
            kappa: k / s,
            qs: p.map_or(0.0, |p| p.q() / s),
            beta_s: p.map_or(0.0, |p| p.beta() / s),
            rho0: p.map_or(f64::INFINITY, |p| p.r0() * s),
        }
    }

    pub fn without_potential(&self) -> Self {
        Scaled {
            qs: 0.0,
            beta_s: 0.0,
            rho0: f64::INFINITY,
            ..*self
        }
    }

    pub fn has_potential(&self) -> bool {
        self.rho0.is_finite()
    }

    /// `F_tt / F` at `rho`.
    #[inline]
    pub fn coefficient(&self, rho: f64, inside: bool) -> f64 {
        let lam = if self.cs > 0.0 {
            lambda_root(0, rho).unwrap_or(f64::NAN)
        } else {
            0.0
        };
        let mut v = lam * lam - rho * rho * self.kappa * self.kappa;
        if inside {
            v -= rho * rho * self.qs * self.qs + rho * self.beta_s;
        }
        v
    }

    /// Default inner start in scaled units.
    pub fn default_rho_min(&self) -> f64 {
        let mut scale = self.rho0;
        if self.cs > 0.0 {
            scale = scale.min(1.0);
        }
        if !scale.is_finite() {
            scale = if self.kappa > 0.0 { 1.0 / self.kappa } else { 1.0 };
        }
        1e-6 * scale
    }

    /// Regular small-`R` behaviour: `J0(Q R)` inside the well with
    /// `Q^2 = q^2 + k^2`, `I0(2 sqrt(beta R))` for the bare channel, `J0(k R)`
    /// for the free problem.
    pub fn regular_start(&self, rho: f64) -> Result<State> {
        if rho < self.rho0 {
            let x = (self.qs * self.qs + self.kappa * self.kappa).sqrt() * rho;
            let j = specfun::j_all(x);
            Ok([j[0], -x * j[1]])
        } else if self.cs > 0.0 {
            let z = 2.0 * (crate::channels::BETA_OVER_C * rho).sqrt();
            Ok([specfun::bessel_i0(z)?, 0.5 * z * specfun::bessel_i1(z)?])
        } else {
            let x = self.kappa * rho;
            let j = specfun::j_all(x);
            Ok([j[0], -x * j[1]])
        }
    }
}

/// Values at a sequence of `t` nodes.
pub(crate) struct Trajectory {
    pub ys: Vec<State>,
    pub residual: Vec<f64>,
    pub stats: IntegrationStats,
}

/// Integrate through `ts` (monotone in either direction) starting from `y0`
/// at `ts[0]`. On every segment the potential is switched on or off
/// according to the segment midpoint, so the jump at `r0` must be a node.
pub(crate) fn integrate_nodes(sc: &Scaled, ts: &[f64], y0: State, rtol: f64) -> Result<Trajectory> {
    let mut ys = Vec::with_capacity(ts.len());
    let mut residual = Vec::with_capacity(ts.len());
    let mut stats = IntegrationStats::default();
    ys.push(y0);
    residual.push(0.0);
    let mut y = y0;
    let mut h = ts.get(1).map_or(0.01, |t1| (t1 - ts[0]).abs());
    for w in ts.windows(2) {
        let inside = (0.5 * (w[0] + w[1])).exp() < sc.rho0;
        let mut rhs = |t: f64, y: &State| -> State { [y[1], sc.coefficient(t.exp(), inside) * y[0]] };
        let seg = ode::segment(&mut rhs, w[0], w[1], y, h, rtol, &mut stats)?;
        y = seg.y;
        h = seg.h;
        ys.push(y);
        residual.push(seg.error);
    }
    Ok(Trajectory { ys, residual, stats })
}

/// Log-uniform nodes from `rho_min` to `rho_max`, with `extra` nodes placed
/// exactly (replacing a neighbour when it is closer than a quarter spacing).
pub(crate) fn log_nodes(rho_min: f64, rho_max: f64, per_efold: usize, extra: &[f64]) -> Vec<f64> {
    let (t0, t1) = (rho_min.ln(), rho_max.ln());
    let n = (((t1 - t0) * per_efold as f64).ceil() as usize).max(2);
    let dt = (t1 - t0) / n as f64;
    let mut ts: Vec<f64> = (0..=n).map(|i| t0 + dt * i as f64).collect();
    ts[n] = t1;
    for &e in extra {
        if !(e > t0 && e < t1) {
            continue;
        }
        let idx = ts.partition_point(|&t| t < e);
        if (ts[idx] - e).abs() < 0.25 * dt && idx != n {
            ts[idx] = e;
        } else if idx > 0 && (e - ts[idx - 1]).abs() < 0.25 * dt && idx - 1 != 0 {
            ts[idx - 1] = e;
        } else {
            ts.insert(idx, e);
        }
    }
    ts
}

/// Sampled solution of the radial equation. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub grid: Vec<f64>,
    pub f: Vec<f64>,
    pub df: Vec<f64>,
    /// Summed relative error estimate of the steps ending at each node.
    pub local_residual: Vec<f64>,
    pub k: f64,
    pub c: f64,
    pub potential: Option<ModelPotential>,
    pub stats: IntegrationStats,
}

impl RadialSolution {
    pub(crate) fn from_trajectory(
        sc: &Scaled,
        ts: &[f64],
        traj: Trajectory,
        k: f64,
        c: f64,
        potential: Option<ModelPotential>,
    ) -> Result<Self> {
        let mut grid = Vec::with_capacity(ts.len());
        let mut f = Vec::with_capacity(ts.len());
        let mut df = Vec::with_capacity(ts.len());
        for (t, y) in ts.iter().zip(&traj.ys) {
            let mut r = t.exp() / sc.s;
            if let Some(p) = &potential {
                if ((r - p.r0()) / p.r0()).abs() < 1e-12 {
                    r = p.r0();
                }
            }
            if !y[0].is_finite() || !y[1].is_finite() {
                return Err(Error::Breakdown(format!("non-finite F at R = {r:e}")));
            }
            grid.push(r);
            f.push(y[0]);
            df.push(y[1] / r);
        }
        Ok(RadialSolution {
            grid,
            f,
            df,
            local_residual: traj.residual,
            k,
            c,
            potential,
            stats: traj.stats,
        })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// `R (F G' - F' G)` at every node; the two solutions must share a grid.
    pub fn wronskian(&self, other: &RadialSolution) -> Result<Vec<f64>> {
        if self.grid != other.grid {
            return Err(Error::invalid("Wronskian needs solutions on a common grid"));
        }
        Ok((0..self.len())
            .map(|i| self.grid[i] * (self.f[i] * other.df[i] - self.df[i] * other.f[i]))
            .collect())
    }

    /// Largest relative deviation of the Wronskian from its first value.
    pub fn wronskian_drift(&self, other: &RadialSolution) -> Result<f64> {
        let w = self.wronskian(other)?;
        let w0 = w[0];
        if w0 == 0.0 {
            return Err(Error::Breakdown("solutions are linearly dependent".into()));
        }
        Ok(w.iter().map(|v| ((v - w0) / w0).abs()).fold(0.0, f64::max))
    }

    /// Index of the first node with `R >= r`.
    pub fn index_at(&self, r: f64) -> usize {
        self.grid.partition_point(|&g| g < r).min(self.len().saturating_sub(1))
    }
}

fn check_physics(c: f64, k: f64) -> Result<()> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::invalid(format!("coupling c = {c} must be finite and >= 0")));
    }
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::invalid(format!("wavenumber k = {k} must be finite and >= 0")));
    }
    Ok(())
}

/// Resolved integration range in scaled units.
pub(crate) fn scaled_range(sc: &Scaled, k: f64, opts: &RadialOptions) -> Result<(f64, f64)> {
    opts.validate()?;
    let rho_min = match opts.r_min {
        Some(r) => {
            if !(r > 0.0) {
                return Err(Error::invalid(format!("R_min = {r} must be > 0")));
            }
            let rho = r * sc.s;
            if sc.has_potential() && rho >= sc.rho0 {
                return Err(Error::invalid("R_min must lie inside the potential range r0"));
            }
            if !sc.has_potential() && sc.cs > 0.0 && rho > 1e-4 {
                return Err(Error::invalid("R_min must satisfy c R_min <= 1e-4"));
            }
            rho
        }
        None => sc.default_rho_min(),
    };
    let rho_max = match opts.r_max {
        Some(r) => {
            if k > 0.0 && k * r < MIN_K_RMAX * (1.0 - 1e-12) {
                return Err(Error::invalid(format!("R_max = {r} violates k R_max >= {MIN_K_RMAX}")));
            }
            r * sc.s
        }
        None => {
            if k == 0.0 {
                return Err(Error::invalid("R_max is required when k = 0"));
            }
            RMAX_FACTOR / sc.kappa
        }
    };
    if !(rho_max > rho_min) {
        return Err(Error::invalid("R_max must exceed R_min"));
    }
    Ok((rho_min, rho_max))
}

/// Outward integration of the regular solution from `R_min` to `R_max`.
pub fn integrate_radial(
    c: f64,
    k: f64,
    potential: Option<&ModelPotential>,
    opts: &RadialOptions,
) -> Result<RadialSolution> {
    check_physics(c, k)?;
    if let Some(p) = potential {
        if (p.c() - c).abs() > 1e-14 * c.max(1.0) {
            return Err(Error::invalid("potential was built for a different coupling c"));
        }
    }
    let sc = Scaled::new(c, k, potential);
    let (rho_min, rho_max) = scaled_range(&sc, k, opts)?;
    let extra: Vec<f64> = if sc.has_potential() { vec![sc.rho0.ln()] } else { vec![] };
    let ts = log_nodes(rho_min, rho_max, opts.nodes_per_efold, &extra);
    let y0 = sc.regular_start(rho_min)?;
    let traj = integrate_nodes(&sc, &ts, y0, opts.rtol)?;
    RadialSolution::from_trajectory(&sc, &ts, traj, k, c, potential.copied())
}

/// Least-squares `(a, b)` of `F ~ a J_n(kR) + b Y_n(kR)` over the nodes with
/// `R` in `[r_lo, r_hi]`.
pub(crate) fn fit_jy(sol: &RadialSolution, order: usize, r_lo: f64, r_hi: f64) -> Result<(f64, f64, usize)> {
    // The top node is exp(ln rho_max) / s and may round either side of an
    // edge placed at R_max; the slack keeps node selection scale-invariant.
    let (lo, hi) = (r_lo * (1.0 - 1e-12), r_hi * (1.0 + 1e-12));
    let idx: Vec<usize> = (0..sol.len())
        .filter(|&i| sol.grid[i] >= lo && sol.grid[i] <= hi)
        .collect();
    if idx.len() < 20 {
        return Err(Error::ExtractionUnstable(format!(
            "fit window [{r_lo:e}, {r_hi:e}] holds {} nodes, need 20",
            idx.len()
        )));
    }
    let mut u = Vec::with_capacity(idx.len());
    let mut v = Vec::with_capacity(idx.len());
    let mut y = Vec::with_capacity(idx.len());
    for &i in &idx {
        let x = sol.k * sol.grid[i];
        u.push(specfun::j_all(x)[order]);
        v.push(specfun::y_all(x)[order]);
        y.push(sol.f[i]);
    }
    let (a, b) = two_function_fit(&u, &v, &y)?;
    Ok((a, b, idx.len()))
}

/// Outer regular (`F+`) and irregular (`F-`) solutions of the bare channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FBasis {
    /// Outward from `I0(2 sqrt(beta R))`.
    pub plus: RadialSolution,
    /// Inward from `N Y3(kR)`, `N = -pi^{3/2} / (32 sqrt(3) Xi) (k/c)^3`.
    pub minus: RadialSolution,
    /// `J3` coefficient of `F+` in units of `(c/k)^3`.
    pub plus_j3: f64,
    /// `Y3` coefficient of `F+` in units of `(c/k)^3` (background phase).
    pub plus_y3: f64,
    /// Normalization `N` that turns the inward `Y3` solution into the one
    /// matching `K0(2 sqrt(beta R))` at `R_min`, measured numerically. The
    /// `J3` admixture of that solution sits a factor `(k/c)^6` below its `Y3`
    /// part near the origin and is not resolvable in double precision, so
    /// `F-` carries none by construction.
    pub minus_norm_numeric: f64,
    /// The quasiclassical value of the same normalization, used to scale `F-`.
    pub minus_norm_wkb: f64,
    pub wronskian_drift: f64,
}

/// Build `F+` and `F-` on a common grid. Requires `k <= c / 50`.
pub fn construct_f_basis(c: f64, k: f64, opts: &RadialOptions) -> Result<FBasis> {
    check_physics(c, k)?;
    if !(c > 0.0) || !(k > 0.0) || k > c / 50.0 {
        return Err(Error::invalid(format!("F basis needs 0 < k <= c/50 (k = {k}, c = {c})")));
    }
    let sc = Scaled::new(c, k, None);
    let (rho_min, rho_max) = scaled_range(&sc, k, opts)?;
    let ts = log_nodes(rho_min, rho_max, opts.nodes_per_efold, &[]);
    let plus_traj = integrate_nodes(&sc, &ts, sc.regular_start(rho_min)?, opts.rtol)?;
    let plus = RadialSolution::from_trajectory(&sc, &ts, plus_traj, k, c, None)?;

    let rev: Vec<f64> = ts.iter().rev().copied().collect();
    let x_max = sc.kappa * rho_max;
    let (_, _, y3, y3p) = specfun::jy_with_derivs(3, x_max);
    let mut minus_traj = integrate_nodes(&sc, &rev, [y3, x_max * y3p], opts.rtol)?;
    minus_traj.ys.reverse();
    minus_traj.residual.reverse();
    let raw = RadialSolution::from_trajectory(&sc, &ts, minus_traj, k, c, None)?;

    // At R_min the inward solution is gamma K plus a part far below rounding,
    // with K the solution behaving as K0(2 sqrt(beta R)); W[I0, K0] = -1/2.
    let z = 2.0 * (crate::channels::BETA_OVER_C * rho_min).sqrt();
    let kk = [specfun::bessel_k0(z)?, -0.5 * z * specfun::bessel_k1(z)?];
    let yr = [raw.f[0], raw.df[0] * raw.grid[0]];
    let sp = [plus.f[0], plus.df[0] * plus.grid[0]];
    let w = |a: [f64; 2], b: [f64; 2]| a[0] * b[1] - a[1] * b[0];
    let gamma = w(sp, yr) / w(sp, kk);

    let r_max = rho_max / sc.s;
    let (a_j, a_y, _) = fit_jy(&plus, 3, 0.625 * r_max, r_max)?;

    let xi = wkb::xi()?;
    let kc3 = (k / c).powi(3);
    let norm_wkb = -std::f64::consts::PI.powf(1.5) / (32.0 * 3f64.sqrt() * xi) * kc3;
    let minus = RadialSolution {
        f: raw.f.iter().map(|v| v * norm_wkb).collect(),
        df: raw.df.iter().map(|v| v * norm_wkb).collect(),
        ..raw
    };

    let wr = plus.wronskian(&minus)?;
    let mid = plus.index_at(1.0 / c);
    let i = mid;
    let size = (plus.grid[i] * plus.f[i] * minus.df[i]).abs() + (plus.grid[i] * plus.df[i] * minus.f[i]).abs();
    if wr[i].abs() < 1e-8 * size {
        return Err(Error::Breakdown("F+ and F- lost linear independence".into()));
    }
    let drift = plus.wronskian_drift(&minus)?;
    Ok(FBasis {
        plus,
        minus,
        plus_j3: a_j * kc3,
        plus_y3: a_y * kc3,
        minus_norm_numeric: 1.0 / gamma,
        minus_norm_wkb: norm_wkb,
        wronskian_drift: drift,
    })
}

/// Coefficient ratio `C1/C2` of `F = C1 F+ + C2 F-` just outside the well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    /// `ln(2 sqrt(beta r0)) + J0(q r0) / (2 q r0 J1(q r0))`: the inner
    /// `J0(qR)` matched to the small-argument forms `I0 ~ 1`, `K0 ~ -ln z`.
    pub c1_over_c2: f64,
    /// Integrated inner solution matched to the same small-argument basis.
    pub numeric_small_arg: f64,
    /// Integrated inner solution matched to the full `I0`, `K0`.
    pub numeric_exact: f64,
    /// `R F'/F` of the integrated inner solution at `r0`.
    pub inner_logderiv: f64,
}

impl MatchResult {
    pub fn relative_discrepancy(&self) -> f64 {
        ((self.numeric_small_arg - self.c1_over_c2) / self.c1_over_c2).abs()
    }
}

/// Logarithmic-derivative matching at `r0`.
pub fn match_ratio(p: &ModelPotential, k: f64) -> Result<MatchResult> {
    let c = p.c();
    if !(c > 0.0) {
        return Err(Error::invalid("matching needs c > 0"));
    }
    if !(k >= 0.0) || k > p.q() / 100.0 {
        return Err(Error::invalid(format!("matching needs 0 <= k <= q/100 (k = {k}, q = {})", p.q())));
    }
    let jr = p.j_ratio()?;
    let beta = p.beta();
    let r0 = p.r0();
    let z0 = 2.0 * (beta * r0).sqrt();
    let closed = z0.ln() + 0.5 * jr;

    let sc = Scaled::new(c, k, Some(p));
    let rho_min = sc.default_rho_min();
    let ts = log_nodes(rho_min, sc.rho0, DEFAULT_NODES_PER_EFOLD, &[]);
    let traj = integrate_nodes(&sc, &ts, sc.regular_start(rho_min)?, DEFAULT_RTOL)?;
    let [f, ft] = *traj.ys.last().expect("non-empty trajectory");
    let logd = ft / f;

    // basis (1, -ln z) has t-derivatives (0, -1/2)
    let small = z0.ln() - 0.5 / logd;
    // exact: F = C1 I0 + C2 K0, F_t = (z/2)(C1 I1 - C2 K1)
    let (i0, i1) = (specfun::bessel_i0(z0)?, specfun::bessel_i1(z0)?);
    let (k0, k1) = (specfun::bessel_k0(z0)?, specfun::bessel_k1(z0)?);
    let h = 0.5 * z0;
    let exact = -(k0 * logd + h * k1) / (i0 * logd - h * i1);
    Ok(MatchResult {
        c1_over_c2: closed,
        numeric_small_arg: small,
        numeric_exact: exact,
        inner_logderiv: logd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_channel_is_j0() {
        let k = 0.5;
        let sol = integrate_radial(0.0, k, None, &RadialOptions::default()).unwrap();
        for i in (0..sol.len()).step_by(37) {
            let x = k * sol.grid[i];
            let j0 = specfun::j_all(x)[0];
            let tol = 1e-8 * j0.abs().max(1e-2);
            assert!((sol.f[i] - j0).abs() < tol, "R = {}: {} vs {}", sol.grid[i], sol.f[i], j0);
        }
        assert!(sol.local_residual.iter().all(|&r| r <= 1e-8));
    }

    #[test]
    fn jump_is_a_node() {
        let p = ModelPotential::from_qr0(1.0, 0.01, 1.0).unwrap();
        let sol = integrate_radial(1.0, 0.02, Some(&p), &RadialOptions::default()).unwrap();
        assert!(sol.grid.contains(&0.01));
    }

    #[test]
    fn spot_match() {
        let p = ModelPotential::from_qr0(1.0, 0.01, 1.0).unwrap();
        let m = match_ratio(&p, 0.0).unwrap();
        assert!((m.c1_over_c2 + 0.590).abs() < 0.012, "{m:?}");
        assert!(m.relative_discrepancy() < 0.02, "{m:?}");
    }

    #[test]
    fn rejects_bad_ranges() {
        let opts = RadialOptions {
            r_max: Some(10.0),
            ..RadialOptions::default()
        };
        assert!(integrate_radial(1.0, 1.0, None, &opts).is_err());
        assert!(integrate_radial(1.0, 0.0, None, &RadialOptions::default()).is_err());
        assert!(construct_f_basis(1.0, 0.1, &RadialOptions::default()).is_err());
    }

    #[test]
    fn log_nodes_force_extra_points() {
        let ts = log_nodes(1e-3, 10.0, 10, &[0.1f64.ln()]);
        assert!(ts.contains(&0.1f64.ln()));
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
    }
}
