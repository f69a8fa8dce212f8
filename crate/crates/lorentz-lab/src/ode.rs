//! Shooting solver for the conjectured general-`p` limit density.
//!
//! The profile `G` solves `G'' = -G' (1-G)^{p/q-1} x^{p-1}`, `G(0) = 0`,
//! with a free initial slope. Below the critical slope `G` plateaus short of
//! 1; above it `G` reaches 1 with the slope bounded away from 0; at the
//! critical slope `c_{p,q}` the mass is exactly 1 and `f(x) = G'(|x|)/2` is
//! the conjectured density.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sampler::SampleBatch;

/// Terminal gap `1 - G` treated as "reached 1".
const EPS_G: f64 = 1e-10;
/// Terminal slope treated as a plateau.
const EPS_SLOPE: f64 = 1e-12;
/// Integration cutoff; every validation case decays well before this.
const X_MAX: f64 = 50.0;
/// Step clamp factor against the `(1-G)^{p/q-1}` endpoint singularity.
const ETA: f64 = 0.1;
/// Reporting window for the Critical label: terminal slope below this ...
const CRIT_SLOPE: f64 = 1e-4;
/// ... with the terminal gap below this.
const CRIT_GAP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    /// `G` plateaus strictly below 1.
    Subcritical,
    /// `G -> 1` with `G' -> 0`.
    Critical,
    /// `G` reaches 1 with the slope bounded away from 0.
    Supercritical,
}

#[derive(Clone, Copy, Debug)]
pub struct GridPoint {
    pub x: f64,
    pub g: f64,
    pub dg: f64,
}

#[derive(Clone, Debug)]
pub struct OdeSolution {
    pub p: f64,
    pub q: f64,
    pub initial_slope: f64,
    /// `(x, G, G')` with strictly increasing `x`.
    pub grid: Vec<GridPoint>,
    pub classification: Classification,
    /// The `x` where `G` first reaches 1; `f64::INFINITY` when it does not.
    pub support_radius: f64,
}

impl OdeSolution {
    pub fn terminal(&self) -> GridPoint {
        *self.grid.last().unwrap()
    }

    /// CSV trajectory: classification comment, then `x,G,dG` rows.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(
            w,
            "# p={} q={} initial_slope={} classification={:?} support_radius={}",
            self.p, self.q, self.initial_slope, self.classification, self.support_radius
        )?;
        writeln!(w, "x,G,dG")?;
        for pt in &self.grid {
            writeln!(w, "{:.17e},{:.17e},{:.17e}", pt.x, pt.g, pt.dg)?;
        }
        Ok(())
    }
}

/// Integrator settings; `tol` is the per-step error tolerance of the
/// embedded 4th/5th-order pair.
#[derive(Clone, Copy, Debug)]
pub struct StepControl {
    pub tol: f64,
    pub max_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { tol: 1e-11, max_step: 0.02 }
    }
}

fn validate_pq(p: f64, q: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p must be a finite real >= 1, got {p}")));
    }
    if !(q >= p && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("need p <= q < inf, got p = {p}, q = {q}")));
    }
    Ok(())
}

struct Rhs {
    alpha: f64, // p/q - 1
    pm1: f64,   // p - 1
}

impl Rhs {
    #[inline]
    fn eval(&self, x: f64, g: f64, v: f64) -> (f64, f64) {
        let d = (1.0 - g).max(1e-14);
        let xp = if self.pm1 == 0.0 { 1.0 } else { x.powf(self.pm1) };
        let dpow = if self.alpha == 0.0 { 1.0 } else { d.powf(self.alpha) };
        (v, -v * dpow * xp)
    }
}

// Cash-Karp embedded Runge-Kutta pair.
const A: [[f64; 5]; 5] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
    [3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0, 0.0, 0.0],
    [-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0, 0.0],
    [
        1631.0 / 55296.0,
        175.0 / 512.0,
        575.0 / 13824.0,
        44275.0 / 110592.0,
        253.0 / 4096.0,
    ],
];
const C: [f64; 6] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0];
const B5: [f64; 6] = [37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0];
const B4: [f64; 6] = [
    2825.0 / 27648.0,
    0.0,
    18575.0 / 48384.0,
    13525.0 / 55296.0,
    277.0 / 14336.0,
    1.0 / 4.0,
];

enum Termination {
    ReachedOne,
    Plateau,
    Cutoff,
}

/// Integrate the profile ODE from `x = 0` with the given initial slope.
pub fn integrate_g(
    p: f64,
    q: f64,
    initial_slope: f64,
    ctrl: StepControl,
) -> Result<OdeSolution> {
    validate_pq(p, q)?;
    if !(initial_slope > 0.0 && initial_slope.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "initial slope must be positive, got {initial_slope}"
        )));
    }
    let rhs = Rhs { alpha: p / q - 1.0, pm1: p - 1.0 };
    let mut x = 0.0;
    let mut g = 0.0;
    let mut v = initial_slope;
    let mut grid = vec![GridPoint { x, g, dg: v }];
    let mut h = ctrl.max_step.min(0.01);
    let termination = loop {
        let gap = 1.0 - g;
        if gap < EPS_G {
            break Termination::ReachedOne;
        }
        if v < EPS_SLOPE {
            break Termination::Plateau;
        }
        if x >= X_MAX {
            break Termination::Cutoff;
        }
        h = h.min(ctrl.max_step).min(X_MAX - x).max(1e-13);
        if rhs.alpha < 0.0 {
            h = h.min((ETA * gap / v.max(1e-300)).max(1e-13));
        }
        // never step across G = 1: cap the linear prediction, concavity does
        // the rest
        if v * h > gap - 0.5 * EPS_G {
            h = (gap - 0.5 * EPS_G) / v;
        }
        // Cash-Karp attempt
        let mut kg = [0.0f64; 6];
        let mut kv = [0.0f64; 6];
        let (dg0, dv0) = rhs.eval(x, g, v);
        kg[0] = dg0;
        kv[0] = dv0;
        for s in 1..6 {
            let mut gg = g;
            let mut vv = v;
            for (j, row) in A[s - 1].iter().enumerate().take(s) {
                gg += h * row * kg[j];
                vv += h * row * kv[j];
            }
            let (dgs, dvs) = rhs.eval(x + C[s] * h, gg, vv);
            kg[s] = dgs;
            kv[s] = dvs;
        }
        let mut g5 = g;
        let mut v5 = v;
        let mut g4 = g;
        let mut v4 = v;
        for s in 0..6 {
            g5 += h * B5[s] * kg[s];
            v5 += h * B5[s] * kv[s];
            g4 += h * B4[s] * kg[s];
            v4 += h * B4[s] * kv[s];
        }
        if !(g5.is_finite() && v5.is_finite()) {
            return Err(Error::OdeOverflow { x });
        }
        let err = ((g5 - g4).abs() / (ctrl.tol * (1.0 + g.abs())))
            .max((v5 - v4).abs() / (ctrl.tol * (1.0 + v.abs())));
        if err <= 1.0 || h <= 2e-13 {
            x += h;
            g = g5;
            v = v5.max(0.0);
            grid.push(GridPoint { x, g, dg: v });
            if err > 0.0 {
                h *= (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
            } else {
                h *= 5.0;
            }
        } else {
            h *= (0.9 * err.powf(-0.25)).clamp(0.1, 1.0);
        }
    };
    let gap = 1.0 - g;
    let classification = match termination {
        Termination::ReachedOne => {
            if v < CRIT_SLOPE {
                Classification::Critical
            } else {
                Classification::Supercritical
            }
        }
        Termination::Plateau => {
            if gap < CRIT_GAP {
                Classification::Critical
            } else {
                Classification::Subcritical
            }
        }
        Termination::Cutoff => {
            if v < CRIT_SLOPE && gap < CRIT_GAP {
                Classification::Critical
            } else if gap < CRIT_GAP {
                Classification::Supercritical
            } else {
                Classification::Subcritical
            }
        }
    };
    let support_radius = support_radius(p, q, &grid, classification, v, gap);
    Ok(OdeSolution { p, q, initial_slope, grid, classification, support_radius })
}

/// Endpoint estimate: transversal crossings extend linearly; for `p < q` the
/// endpoint behavior is the power law `1 - G ~ A (r - x)^{q/(q-p)}`, fitted
/// through the last two grid points; `p = q` never reaches 1 at finite `x`.
fn support_radius(
    p: f64,
    q: f64,
    grid: &[GridPoint],
    classification: Classification,
    v_end: f64,
    gap_end: f64,
) -> f64 {
    if classification == Classification::Subcritical {
        return f64::INFINITY;
    }
    let last = grid[grid.len() - 1];
    if v_end >= CRIT_SLOPE {
        return last.x + gap_end / v_end;
    }
    if p == q {
        return f64::INFINITY;
    }
    let beta = q / (q - p);
    for prev in grid.iter().rev().skip(1) {
        let d1 = 1.0 - prev.g;
        let d2 = 1.0 - last.g;
        if d1 > 2.0 * d2 && d2 > 0.0 {
            let rho = (d1 / d2).powf(1.0 / beta);
            if rho > 1.0 + 1e-9 {
                return (rho * last.x - prev.x) / (rho - 1.0);
            }
        }
    }
    last.x
}

pub struct CriticalSlope {
    pub c_pq: f64,
    pub solution: OdeSolution,
}

/// Bisection for the critical slope, with bracket auto-expansion (halving
/// `lo` / doubling `hi`, up to 60 steps each).
pub fn find_critical_slope(
    p: f64,
    q: f64,
    bracket: (f64, f64),
    tol: f64,
) -> Result<CriticalSlope> {
    validate_pq(p, q)?;
    let ctrl = StepControl::default();
    find_critical_slope_with(p, q, bracket, tol, ctrl)
}

pub fn find_critical_slope_with(
    p: f64,
    q: f64,
    bracket: (f64, f64),
    tol: f64,
    ctrl: StepControl,
) -> Result<CriticalSlope> {
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidBracket(format!("need 0 < lo < hi, got ({lo}, {hi})")));
    }
    // Supercritical test at the terminal point. Freezing x near the end, the
    // ODE has the first integral G' = V(1-G) with
    // V(d) = V_end - x^{p-1} (d_end^{p/q} - d^{p/q}) q/p, so the trajectory
    // carries to G = 1 with positive slope iff
    // G'_end (p/q) >= x^{p-1} (1-G_end)^{p/q}. Thresholding on this quantity
    // instead of the raw terminal gap removes the O(q ε^{1/q}) bias the gap
    // cutoff ε would otherwise inject into the bisection.
    let reaches = |s: f64| -> Result<bool> {
        let sol = integrate_g(p, q, s, ctrl)?;
        let t = sol.terminal();
        let d = (1.0 - t.g).max(1e-300);
        let xp = if p == 1.0 { 1.0 } else { t.x.powf(p - 1.0) };
        Ok(t.dg * (p / q) >= xp * d.powf(p / q))
    };
    let mut iters = 0;
    while reaches(lo)? {
        lo *= 0.5;
        iters += 1;
        if iters > 60 {
            return Err(Error::InvalidBracket(format!(
                "no subcritical slope found down to {lo}"
            )));
        }
    }
    iters = 0;
    while !reaches(hi)? {
        hi *= 2.0;
        iters += 1;
        if iters > 60 {
            return Err(Error::InvalidBracket(format!(
                "no supercritical slope found up to {hi}"
            )));
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if reaches(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let c_pq = 0.5 * (lo + hi);
    let solution = integrate_g(p, q, c_pq, ctrl)?;
    Ok(CriticalSlope { c_pq, solution })
}

/// The symmetric conjectured density `f(x) = G'(|x|)/2` of the critical
/// solution, with monotone cubic interpolation between grid points.
pub struct ConjectureDensity {
    pub critical: CriticalSlope,
    interp: Pchip,
}

pub fn conjecture_density(p: f64, q: f64) -> Result<ConjectureDensity> {
    let critical = find_critical_slope(p, q, (0.25, 4.0), 1e-8)?;
    let xs: Vec<f64> = critical.solution.grid.iter().map(|pt| pt.x).collect();
    let ys: Vec<f64> = critical.solution.grid.iter().map(|pt| pt.dg).collect();
    let interp = Pchip::new(xs, ys);
    Ok(ConjectureDensity { critical, interp })
}

impl ConjectureDensity {
    pub fn density(&self, x: f64) -> f64 {
        0.5 * self.interp.eval(x.abs()).max(0.0)
    }

    /// Total mass by trapezoid quadrature over the solution grid (equals the
    /// terminal `G` up to interpolation error).
    pub fn mass(&self) -> f64 {
        let grid = &self.critical.solution.grid;
        let mut total = 0.0;
        for w in grid.windows(2) {
            total += 0.5 * (w[1].x - w[0].x) * (w[0].dg + w[1].dg);
        }
        total
    }
}

/// Fritsch-Carlson monotone cubic (PCHIP) interpolant; constant beyond the
/// last knot would be wrong for a decaying slope, so it is zero there.
struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ms: Vec<f64>,
}

impl Pchip {
    fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let n = xs.len();
        assert!(n >= 2);
        let deltas: Vec<f64> =
            (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();
        let mut ms = vec![0.0; n];
        ms[0] = deltas[0];
        ms[n - 1] = deltas[n - 2];
        for i in 1..n - 1 {
            if deltas[i - 1] * deltas[i] > 0.0 {
                let w1 = 2.0 * (xs[i + 1] - xs[i]) + (xs[i] - xs[i - 1]);
                let w2 = (xs[i + 1] - xs[i]) + 2.0 * (xs[i] - xs[i - 1]);
                ms[i] = (w1 + w2) / (w1 / deltas[i - 1] + w2 / deltas[i]);
            }
        }
        // limiter against overshoot
        for i in 0..n - 1 {
            if deltas[i] == 0.0 {
                ms[i] = 0.0;
                ms[i + 1] = 0.0;
            } else {
                let a = ms[i] / deltas[i];
                let b = ms[i + 1] / deltas[i];
                let s = (a * a + b * b).sqrt();
                if s > 3.0 {
                    ms[i] = 3.0 * deltas[i] * a / s;
                    ms[i + 1] = 3.0 * deltas[i] * b / s;
                }
            }
        }
        Pchip { xs, ys, ms }
    }

    fn eval(&self, x: f64) -> f64 {
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= *self.xs.last().unwrap() {
            return 0.0;
        }
        let i = self.xs.partition_point(|&v| v <= x) - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.ms[i] + h01 * self.ys[i + 1] + h11 * h * self.ms[i + 1]
    }
}

/// Quadrature of `∫ x^p (1-G)^{p/q-1} G' dx - 1` over the solution grid: the
/// maximum-entropy energy constraint, zero for the critical solution.
pub fn energy_constraint_residual(solution: &OdeSolution) -> f64 {
    let alpha = solution.p / solution.q - 1.0;
    let p = solution.p;
    let mut total = 0.0;
    let weight = |pt: &GridPoint| -> f64 {
        let d = (1.0 - pt.g).max(1e-14);
        pt.x.powf(p) * d.powf(alpha) * pt.dg
    };
    for w in solution.grid.windows(2) {
        total += 0.5 * (w[1].x - w[0].x) * (weight(&w[0]) + weight(&w[1]));
    }
    total - 1.0
}

/// Discrete quantile constraint per row, maximized over a batch, and the
/// worst discrepancy between the quantile-form and rearrangement-form
/// evaluations (an exact identity up to summation order).
pub struct QuantileCheck {
    pub max_value: f64,
    pub max_identity_gap: f64,
}

pub fn quantile_constraint_check(batch: &SampleBatch, p: f64, q: f64) -> Result<QuantileCheck> {
    validate_pq(p, q)?;
    let n = batch.params.n;
    let mut max_value = 0.0f64;
    let mut max_gap = 0.0f64;
    for row in batch.rows() {
        let mut sorted: Vec<f64> = row.iter().map(|v| v.abs()).collect();
        sorted.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
        let rearranged = quantile_constraint_sorted(&sorted, p, q);
        // quantile form: Q at t in ((i-1)/n, i/n) is the i-th smallest value,
        // weighted by (1 - (i-1)/n)^{p/q-1}
        let mut quantile_form = 0.0;
        for i in 1..=n {
            let weight = (1.0 - (i - 1) as f64 / n as f64).powf(p / q - 1.0);
            let x = sorted[n - i];
            quantile_form += weight * x.powf(p) / n as f64;
        }
        max_value = max_value.max(rearranged);
        max_gap = max_gap.max((rearranged - quantile_form).abs());
    }
    Ok(QuantileCheck { max_value, max_identity_gap: max_gap })
}

/// `Σ_i (i/n)^{p/q-1} (x_i^*)^p / n` for a non-increasing nonnegative row.
pub fn quantile_constraint_sorted(sorted: &[f64], p: f64, q: f64) -> f64 {
    let n = sorted.len();
    let mut total = 0.0;
    for (i, &x) in sorted.iter().enumerate().rev() {
        let weight = ((i + 1) as f64 / n as f64).powf(p / q - 1.0);
        total += weight * x.powf(p) / n as f64;
    }
    total
}

/// Trajectories for a family of slopes (Figure-1 style); per-slope failures
/// are returned in place, not fatal.
pub fn figure1_family(p: f64, q: f64, slopes: &[f64]) -> Vec<Result<OdeSolution>> {
    slopes
        .par_iter()
        .map(|&s| integrate_g(p, q, s, StepControl::default()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit_law::limit_law;
    use crate::qindex::QIndex;
    use crate::rng::RngStreamSpec;
    use crate::sampler::{sample_exact, BallParams, Normalization};

    fn ctrl() -> StepControl {
        StepControl::default()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(integrate_g(0.5, 2.0, 1.0, ctrl()).is_err());
        assert!(integrate_g(3.0, 2.0, 1.0, ctrl()).is_err());
        assert!(integrate_g(1.0, 2.0, -1.0, ctrl()).is_err());
        assert!(integrate_g(1.0, f64::INFINITY, 1.0, ctrl()).is_err());
    }

    #[test]
    fn p_equals_q_decouples() {
        // at p = q the ODE is linear in G': G'(x) = s exp(-x^p/p)
        let s = 0.5;
        let sol = integrate_g(2.0, 2.0, s, ctrl()).unwrap();
        for pt in &sol.grid {
            if pt.x > 10.0 {
                break;
            }
            let exact = s * (-pt.x * pt.x / 2.0).exp();
            assert!(
                (pt.dg - exact).abs() < 1e-8,
                "x = {}: {} vs {}",
                pt.x,
                pt.dg,
                exact
            );
        }
        assert_eq!(sol.classification, Classification::Subcritical);
    }

    #[test]
    fn closed_form_critical_case() {
        // p=1, q=2, slope 2: G(x) = 1 - (1-x)^2 on [0,1]
        let sol = integrate_g(1.0, 2.0, 2.0, ctrl()).unwrap();
        assert_eq!(sol.classification, Classification::Critical);
        for pt in &sol.grid {
            let exact = 1.0 - (1.0 - pt.x) * (1.0 - pt.x);
            assert!((pt.g - exact).abs() < 1e-7, "x = {}: {} vs {exact}", pt.x, pt.g);
        }
        assert!((sol.support_radius - 1.0).abs() < 1e-4, "r = {}", sol.support_radius);
    }

    #[test]
    fn subcritical_plateau() {
        // p=1, q=2, slope 1: plateau at G = 1 - ((2-s)/2)^2 = 3/4
        let sol = integrate_g(1.0, 2.0, 1.0, ctrl()).unwrap();
        assert_eq!(sol.classification, Classification::Subcritical);
        let plateau = sol.terminal().g;
        assert!((plateau - 0.75).abs() < 1e-6, "plateau {plateau}");
        assert!(sol.support_radius.is_infinite());
    }

    #[test]
    fn grid_invariants() {
        for &(p, q, s) in &[(1.0, 2.0, 1.5), (2.0, 2.0, 1.0), (1.5, 3.0, 1.0)] {
            let sol = integrate_g(p, q, s, ctrl()).unwrap();
            assert_eq!(sol.grid[0].x, 0.0);
            assert_eq!(sol.grid[0].g, 0.0);
            for w in sol.grid.windows(2) {
                assert!(w[1].x > w[0].x);
                assert!(w[1].g >= w[0].g);
                assert!(w[1].dg <= w[0].dg + 1e-12);
            }
            for pt in &sol.grid {
                assert!(pt.g <= 1.0 + 1e-9);
                assert!(pt.dg >= 0.0);
            }
        }
    }

    #[test]
    fn critical_slope_q2() {
        let c = find_critical_slope(1.0, 2.0, (0.5, 4.0), 1e-8).unwrap();
        assert!((c.c_pq - 2.0).abs() < 1e-4, "c = {}", c.c_pq);
        assert_eq!(c.solution.classification, Classification::Critical);
    }

    #[test]
    fn critical_slope_gaussian_case() {
        let c = find_critical_slope(2.0, 2.0, (0.5, 4.0), 1e-8).unwrap();
        let expected = (2.0 / std::f64::consts::PI).sqrt();
        assert!((c.c_pq - expected).abs() < 1e-4, "c = {} vs {expected}", c.c_pq);
    }

    #[test]
    fn support_radius_q3() {
        let c = find_critical_slope(1.0, 3.0, (0.5, 8.0), 1e-8).unwrap();
        assert!((c.c_pq - 3.0).abs() < 1e-4, "c = {}", c.c_pq);
        assert!(
            (c.solution.support_radius - 0.5).abs() < 1e-3,
            "r = {}",
            c.solution.support_radius
        );
    }

    #[test]
    fn bracket_expansion_and_failure() {
        // a bracket entirely on the subcritical side still converges
        let c = find_critical_slope(1.0, 2.0, (0.01, 0.02), 1e-8).unwrap();
        assert!((c.c_pq - 2.0).abs() < 1e-4);
        assert!(find_critical_slope(1.0, 2.0, (2.0, 1.0), 1e-8).is_err());
    }

    #[test]
    fn density_matches_limit_law() {
        let d = conjecture_density(1.0, 2.0).unwrap();
        let law = limit_law(QIndex::Finite(2.0)).unwrap();
        let mut sup = 0.0f64;
        for k in 0..2000 {
            let x = -1.0 + 2.0 * (k as f64 + 0.5) / 2000.0;
            sup = sup.max((d.density(x) - law.density(x)).abs());
        }
        assert!(sup < 1e-3, "sup {sup}");
    }

    #[test]
    fn density_matches_standard_normal() {
        let d = conjecture_density(2.0, 2.0).unwrap();
        let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        let mut sup = 0.0f64;
        for k in 0..2000 {
            let x = -4.0 + 8.0 * (k as f64 + 0.5) / 2000.0;
            sup = sup.max((d.density(x) - norm * (-x * x / 2.0).exp()).abs());
        }
        assert!(sup < 1e-3, "sup {sup}");
    }

    #[test]
    fn density_mass_is_one() {
        // tolerance reflects the trapezoid rule on the adaptive grid, not the
        // slope accuracy; the terminal G itself sits within 1e-9 of 1
        for &(p, q) in &[(1.0, 2.0), (2.0, 2.0), (1.5, 3.0)] {
            let d = conjecture_density(p, q).unwrap();
            assert!((d.mass() - 1.0).abs() < 1e-4, "p={p}, q={q}: {}", d.mass());
        }
    }

    #[test]
    fn energy_residual_vanishes_at_criticality() {
        for &(p, q) in &[(1.0, 2.0), (2.0, 2.0)] {
            let c = find_critical_slope(p, q, (0.5, 4.0), 1e-8).unwrap();
            let res = energy_constraint_residual(&c.solution);
            assert!(res.abs() < 1e-3, "p={p}, q={q}: residual {res}");
        }
        let sub = integrate_g(1.0, 2.0, 1.0, ctrl()).unwrap();
        assert!(energy_constraint_residual(&sub) < 0.0);
    }

    #[test]
    fn classification_monotone_in_slope() {
        let c = 2.0; // p=1, q=2
        let rank = |cl: Classification| match cl {
            Classification::Subcritical => 0,
            Classification::Critical => 1,
            Classification::Supercritical => 2,
        };
        let mut prev = 0;
        for k in 0..20 {
            let s = c / 2.0 + (2.0 * c - c / 2.0) * k as f64 / 19.0;
            let sol = integrate_g(1.0, 2.0, s, ctrl()).unwrap();
            let r = rank(sol.classification);
            assert!(r >= prev, "inversion at slope {s}");
            prev = r;
        }
    }

    #[test]
    fn refinement_stability() {
        for &(p, q) in &[(1.0, 2.0), (2.0, 2.0), (1.5, 3.0)] {
            let coarse = find_critical_slope_with(p, q, (0.25, 4.0), 1e-8, ctrl()).unwrap();
            let fine = find_critical_slope_with(
                p,
                q,
                (0.25, 4.0),
                1e-8,
                StepControl { tol: ctrl().tol * 0.5, max_step: ctrl().max_step },
            )
            .unwrap();
            assert!(
                (coarse.c_pq - fine.c_pq).abs() < 1e-6,
                "p={p}, q={q}: {} vs {}",
                coarse.c_pq,
                fine.c_pq
            );
        }
    }

    #[test]
    fn finite_radius_iff_p_below_q() {
        for &(p, q) in &[(1.0, 2.0), (1.5, 3.0), (2.0, 4.0)] {
            let c = find_critical_slope(p, q, (0.25, 8.0), 1e-8).unwrap();
            assert!(c.solution.support_radius.is_finite(), "p={p}, q={q}");
        }
        let c = find_critical_slope(2.0, 2.0, (0.25, 4.0), 1e-8).unwrap();
        assert!(c.solution.support_radius.is_infinite());
    }

    #[test]
    fn quantile_constraint_on_batch() {
        let params = BallParams::lorentz(QIndex::Finite(2.0), 100, Normalization::Tilde).unwrap();
        let batch = sample_exact(params, 20, RngStreamSpec::new(77, 0)).unwrap();
        let check = quantile_constraint_check(&batch, 1.0, 2.0).unwrap();
        assert!(check.max_value <= 1.0 + 1e-10, "max {}", check.max_value);
        assert!(check.max_identity_gap < 1e-12, "gap {}", check.max_identity_gap);
    }

    #[test]
    fn quantile_constraint_constant_vector() {
        // s chosen so that s * Σ (i/n)^{p/q-1} / n = 1 at p = 1
        let (p, q, n) = (1.0, 2.0, 64usize);
        let weight_sum: f64 =
            (1..=n).map(|i| (i as f64 / n as f64).powf(p / q - 1.0)).sum::<f64>() / n as f64;
        let s = 1.0 / weight_sum;
        let row = vec![s; n];
        let value = quantile_constraint_sorted(&row, p, q);
        assert!((value - 1.0).abs() < 1e-12, "value {value}");
    }

    #[test]
    fn family_collects_per_slope() {
        let fam = figure1_family(1.0, 2.0, &[1.0, 2.0, 3.0]);
        assert_eq!(fam.len(), 3);
        let classes: Vec<_> =
            fam.iter().map(|r| r.as_ref().unwrap().classification).collect();
        assert_eq!(classes[0], Classification::Subcritical);
        assert_eq!(classes[1], Classification::Critical);
        assert_eq!(classes[2], Classification::Supercritical);
        assert!(figure1_family(1.0, 2.0, &[]).is_empty());
        let with_bad = figure1_family(1.0, 2.0, &[-1.0, 1.0]);
        assert!(with_bad[0].is_err());
        assert!(with_bad[1].is_ok());
    }

    #[test]
    fn csv_export_shape() {
        let sol = integrate_g(1.0, 2.0, 2.0, ctrl()).unwrap();
        let mut buf = Vec::new();
        sol.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].contains("classification=Critical"));
        assert_eq!(lines[1], "x,G,dG");
        assert_eq!(lines.len(), 2 + sol.grid.len());
    }
}
