//! Equidistribution statistics of zero cycles: angle and radius
//! discrepancy, the Erdős–Turán size and the bounds it controls.
//!
//! Approximations are one-sided by construction: discrepancies never exceed
//! their true suprema and η never falls below its true value when the
//! coefficient-sum sup-norm bound is used. Every inequality checked against
//! these numbers is therefore implied by the exact one.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{self, LatticePolytope};
use crate::poly::{bigint_to_f64, sup_norm_grid, sup_norm_upper, support, PolySystem};
use crate::resultant::{classify_exceptional, DirectionalReport};
use crate::solver::ZeroCycle;

/// Largest number of distinct points for exact bivariate angle discrepancy.
pub const EXACT_LIMIT_2D: usize = 200;
/// Equispaced directions sampled for the sup over `w` in dimension 2.
pub const ETA_SAMPLES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleMode {
    Exact,
    Grid,
}

/// Argument in `(-pi, pi]`.
pub fn arg(z: num_complex::Complex64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Weighted points compressed to sorted distinct coordinates.
struct Compressed {
    axes: Vec<Vec<f64>>,
    /// `(index per axis, weight)`.
    points: Vec<(Vec<usize>, usize)>,
}

fn compress(cycle: &ZeroCycle) -> Compressed {
    let n = cycle.n;
    let args: Vec<(Vec<f64>, usize)> = cycle
        .points
        .iter()
        .map(|p| (p.coords.0.iter().map(|&z| arg(z)).collect(), p.mult))
        .collect();
    let axes: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut v: Vec<f64> = args.iter().map(|a| a.0[j]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        })
        .collect();
    let points = args
        .iter()
        .map(|(a, m)| {
            let idx = (0..n)
                .map(|j| axes[j].binary_search_by(|x| x.total_cmp(&a[j])).unwrap())
                .collect();
            (idx, *m)
        })
        .collect();
    Compressed { axes, points }
}

/// Best `D[k2] - D[k1]` over `k1 < k2` and best `D[k1] - D[k2]`.
fn best_increase_decrease(d: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut up, mut down) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for x in d {
        up = up.max(x - lo);
        down = down.max(hi - x);
        lo = lo.min(x);
        hi = hi.max(x);
    }
    (up, down)
}

/// Exact supremum over boxes in one variable.
fn exact_1d(c: &Compressed, total: f64) -> f64 {
    let xs = &c.axes[0];
    let mut w = vec![0usize; xs.len()];
    for (idx, m) in &c.points {
        w[idx[0]] += m;
    }
    // Excess: closed [x_a, x_b] over data points.
    // D(k) = W(<= x_k)/N - x_k/2pi; excess = D(b) - D(a) + w_a/N.
    let mut best = 0.0f64;
    let mut prefix = 0usize;
    let mut lo = f64::INFINITY;
    for (k, &x) in xs.iter().enumerate() {
        // Lower endpoint at x_k: subtract mass strictly before.
        lo = lo.min(prefix as f64 / total - x / (2.0 * PI));
        prefix += w[k];
        best = best.max(prefix as f64 / total - x / (2.0 * PI) - lo);
    }
    // Deficit: open (a, b) with a, b in {-pi} ∪ xs ∪ {pi}.
    let mut cand: Vec<(f64, usize)> = vec![(-PI, 0)];
    cand.extend(xs.iter().zip(&w).map(|(&x, &m)| (x, m)));
    if *xs.last().unwrap() < PI {
        cand.push((PI, 0));
    }
    // E(k) = x_k/2pi - W(< x_k)/N; deficit(a<b) = E(b) - E(a) - w_a/N.
    let mut prefix = 0usize;
    let mut lo = f64::INFINITY;
    for &(x, m) in &cand {
        let e_strict = x / (2.0 * PI) - prefix as f64 / total;
        best = best.max(e_strict - lo);
        prefix += m;
        lo = lo.min(x / (2.0 * PI) - prefix as f64 / total);
    }
    best.min(1.0)
}

/// Exact supremum over boxes in two variables by a separable sweep: the
/// x-interval is enumerated, the y-interval optimized in one pass.
fn exact_2d(c: &Compressed, total: f64) -> f64 {
    let (xs, ys) = (&c.axes[0], &c.axes[1]);
    let (kx, ky) = (xs.len(), ys.len());
    let mut grid = vec![vec![0usize; ky]; kx];
    for (idx, m) in &c.points {
        grid[idx[0]][idx[1]] += m;
    }
    let scale = 4.0 * PI * PI;
    let mut best = 0.0f64;

    // Excess over closed rectangles with data corners.
    for a in 0..kx {
        let mut col = vec![0usize; ky];
        for b in a..kx {
            for j in 0..ky {
                col[j] += grid[b][j];
            }
            let xw = xs[b] - xs[a];
            let mut prefix = 0usize;
            let mut lo = f64::INFINITY;
            for j in 0..ky {
                lo = lo.min(prefix as f64 / total - xw * ys[j] / scale);
                prefix += col[j];
                best = best.max(prefix as f64 / total - xw * ys[j] / scale - lo);
            }
        }
    }

    // Deficit over open rectangles with corners in {-pi} ∪ data ∪ {pi}.
    let with_ends = |v: &Vec<f64>| {
        let mut out: Vec<(f64, Option<usize>)> = vec![(-PI, None)];
        out.extend(v.iter().enumerate().map(|(i, &x)| (x, Some(i))));
        if *v.last().unwrap() < PI {
            out.push((PI, None));
        }
        out
    };
    let cx = with_ends(xs);
    let cy = with_ends(ys);
    for a in 0..cx.len() {
        let mut col = vec![0usize; ky];
        for b in a + 1..cx.len() {
            // col holds mass strictly between cx[a] and cx[b].
            if b > a + 1 {
                if let Some(i) = cx[b - 1].1 {
                    for j in 0..ky {
                        col[j] += grid[i][j];
                    }
                }
            }
            let xw = cx[b].0 - cx[a].0;
            let mut prefix = 0usize;
            let mut lo = f64::INFINITY;
            for &(y, jy) in &cy {
                let e_strict = xw * y / scale - prefix as f64 / total;
                best = best.max(e_strict - lo);
                if let Some(j) = jy {
                    prefix += col[j];
                }
                lo = lo.min(xw * y / scale - prefix as f64 / total);
            }
        }
    }
    best.min(1.0)
}

fn breakpoint(k: usize, g: usize) -> f64 {
    -PI + (2.0 * PI * k as f64) / g as f64
}

/// Cell `k` holds arguments in `(t_k, t_{k+1}]`.
fn cell(theta: f64, g: usize) -> usize {
    let guess = (((theta + PI) / (2.0 * PI)) * g as f64).ceil() as isize - 1;
    let mut k = guess.clamp(0, g as isize - 1) as usize;
    while k > 0 && theta <= breakpoint(k, g) {
        k -= 1;
    }
    while k + 1 < g && theta > breakpoint(k + 1, g) {
        k += 1;
    }
    k
}

/// Supremum over boxes whose sides are unions of grid cells: a lower bound
/// of the true supremum since every such box is admissible.
fn grid_nd(cycle: &ZeroCycle, g: usize, total: f64) -> Result<f64> {
    let t: Vec<f64> = (0..=g).map(|k| breakpoint(k, g)).collect();
    match cycle.n {
        1 => {
            let mut w = vec![0usize; g];
            for p in &cycle.points {
                w[cell(arg(p.coords.0[0]), g)] += p.mult;
            }
            let mut prefix = vec![0usize; g + 1];
            for k in 0..g {
                prefix[k + 1] = prefix[k] + w[k];
            }
            let d = (0..=g).map(|k| prefix[k] as f64 / total - (t[k] + PI) / (2.0 * PI));
            let (up, down) = best_increase_decrease(d);
            Ok(up.max(down).clamp(0.0, 1.0))
        }
        2 => {
            let mut grid = vec![vec![0usize; g]; g];
            for p in &cycle.points {
                let (a, b) = (cell(arg(p.coords.0[0]), g), cell(arg(p.coords.0[1]), g));
                grid[a][b] += p.mult;
            }
            let scale = 4.0 * PI * PI;
            let mut best = 0.0f64;
            for a in 0..g {
                let mut col = vec![0usize; g];
                for b in a + 1..=g {
                    for j in 0..g {
                        col[j] += grid[b - 1][j];
                    }
                    let xw = t[b] - t[a];
                    let mut prefix = 0usize;
                    let d = (0..=g).map(|k| {
                        if k > 0 {
                            prefix += col[k - 1];
                        }
                        prefix as f64 / total - xw * (t[k] + PI) / scale
                    });
                    let (up, down) = best_increase_decrease(d);
                    best = best.max(up).max(down);
                }
            }
            Ok(best.clamp(0.0, 1.0))
        }
        n => Err(Error::UnsupportedDimension {
            op: "angle_discrepancy",
            n,
        }),
    }
}

/// `sup |deg Z_{a,b} / deg Z - prod (b_j - a_j) / 2pi|` over boxes
/// `a_j < arg xi_j <= b_j` inside `[-pi, pi]^n`.
///
/// Exact mode realizes the supremum as a limit over data-cornered boxes;
/// grid mode restricts the corners to `grid` equispaced breakpoints and
/// returns a lower bound.
pub fn angle_discrepancy(cycle: &ZeroCycle, mode: AngleMode, grid: usize) -> Result<f64> {
    let total = cycle.degree();
    if total == 0 {
        return domain("angle discrepancy of an empty cycle");
    }
    let total = total as f64;
    match mode {
        AngleMode::Grid => {
            if grid == 0 {
                return domain("grid size must be positive");
            }
            grid_nd(cycle, grid, total)
        }
        AngleMode::Exact => match cycle.n {
            1 => Ok(exact_1d(&compress(cycle), total)),
            2 => {
                if cycle.points.len() > EXACT_LIMIT_2D {
                    return Err(Error::ExactModeTooLarge {
                        points: cycle.points.len(),
                        limit: EXACT_LIMIT_2D,
                    });
                }
                Ok(exact_2d(&compress(cycle), total))
            }
            n => Err(Error::UnsupportedDimension {
                op: "angle_discrepancy",
                n,
            }),
        },
    }
}

/// Fraction of zeros outside `1 - eps < |xi_j| < 1/(1 - eps)` for some `j`.
pub fn radius_discrepancy(cycle: &ZeroCycle, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("epsilon {eps} outside (0, 1)"));
    }
    let total = cycle.degree();
    if total == 0 {
        return domain("radius discrepancy of an empty cycle");
    }
    let (lo, hi) = (1.0 - eps, 1.0 / (1.0 - eps));
    let inside: usize = cycle
        .points
        .iter()
        .filter(|p| p.coords.0.iter().all(|z| lo < z.norm() && z.norm() < hi))
        .map(|p| p.mult)
        .sum();
    Ok(1.0 - inside as f64 / total as f64)
}

/// How `||f_i||_sup` is estimated in η.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SupNormMode {
    /// `sum |a_J|`: an over-estimate, which keeps η an over-estimate.
    Upper,
    /// Maximum over a `G^n` torus grid: an under-estimate.
    Grid(usize),
}

/// `log |c|` for a nonzero big integer.
pub fn log_abs(c: &BigInt) -> f64 {
    let bits = c.bits();
    if bits <= 1000 {
        return bigint_to_f64(c).abs().ln();
    }
    let shift = bits - 64;
    let top = (c.abs() >> shift as usize).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NormalTerm {
    pub normal: Vec<i64>,
    pub log_abs_resultant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DwSample {
    /// Direction angle of `w`.
    pub theta: f64,
    pub dw: Vec<f64>,
}

/// Erdős–Turán size of a system together with its ingredients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EtaReport {
    pub eta: f64,
    /// Direction achieving the maximum (angle for `n = 2`, ±1 for `n = 1`).
    pub w_argmax: Vec<f64>,
    /// Mixed volume of the supports.
    pub d: u64,
    pub per_normal: Vec<NormalTerm>,
    pub dw_table: Vec<DwSample>,
    pub sup_norms: Vec<f64>,
    pub eta_upper_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum EtaOutcome {
    Finite(EtaReport),
    /// A facet directional resultant vanishes.
    Infinite { normal: Vec<i64> },
}

impl EtaOutcome {
    pub fn value(&self) -> f64 {
        match self {
            EtaOutcome::Finite(r) => r.eta,
            EtaOutcome::Infinite { .. } => f64::INFINITY,
        }
    }
}

fn newton_polytopes(system: &PolySystem) -> Result<Vec<LatticePolytope>> {
    system
        .polys
        .iter()
        .map(|p| geometry::convex_hull(&support(p)?))
        .collect()
}

fn mixed_volume_u64(hulls: &[LatticePolytope]) -> Result<u64> {
    let mv = geometry::mixed_volume(hulls)?;
    mv.to_integer()
        .to_u64()
        .ok_or_else(|| Error::Domain("mixed volume out of range".into()))
}

fn sup_norms(system: &PolySystem, mode: SupNormMode) -> Result<Vec<f64>> {
    system
        .polys
        .iter()
        .map(|p| match mode {
            SupNormMode::Upper => Ok(bigint_to_f64(&sup_norm_upper(p))),
            SupNormMode::Grid(g) => sup_norm_grid(p, g),
        })
        .collect()
}

/// Closed form for one variable: `(1/D) log(S / sqrt|a_lo a_hi|)` where
/// `a_lo`, `a_hi` are the extreme coefficients and `D` the support length.
pub fn eta_univariate_closed_form(system: &PolySystem, mode: SupNormMode) -> Result<f64> {
    if system.n != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: system.n,
        });
    }
    let f = &system.polys[0];
    let terms: Vec<_> = f.laurent_terms().collect();
    let (lo, hi) = (terms.first().unwrap(), terms.last().unwrap());
    let len = (hi.0 .0[0] - lo.0 .0[0]) as f64;
    let s = sup_norms(system, mode)?[0];
    Ok((s.ln() - 0.5 * (log_abs(lo.1) + log_abs(hi.1))) / len)
}

/// Sum over facet normals of `|<v, w>|/2 log|Res_v|`.
fn resultant_term(per_normal: &[NormalTerm], w: &[f64]) -> f64 {
    per_normal
        .iter()
        .map(|t| {
            let dot: f64 = t.normal.iter().zip(w).map(|(&v, x)| v as f64 * x).sum();
            0.5 * dot.abs() * t.log_abs_resultant
        })
        .sum()
}

/// The η objective for `n = 2` at `w = (cos t, sin t)`, and its `D_{w,i}`.
fn objective_2d(hulls: &[LatticePolytope], logs: &[f64], per_normal: &[NormalTerm], t: f64) -> (f64, [f64; 2]) {
    let w = [t.cos(), t.sin()];
    let perp = [-w[1], w[0]];
    let dw = [hulls[1].width_along(&perp), hulls[0].width_along(&perp)];
    (dw[0] * logs[0] + dw[1] * logs[1] - resultant_term(per_normal, &w), dw)
}

/// Maximum of the η objective on one arc where it is linear in `w`.
fn arc_max(hulls: &[LatticePolytope], logs: &[f64], per_normal: &[NormalTerm], t0: f64, t1: f64) -> (f64, f64) {
    let mid = 0.5 * (t0 + t1);
    let w = [mid.cos(), mid.sin()];
    let perp = [-w[1], w[0]];
    // Active width vector of each polytope and signs of <v, w> at the midpoint.
    let mut c = [0.0f64; 2];
    for (i, other) in [1usize, 0].into_iter().enumerate() {
        let verts = hulls[other].vertices();
        let proj = |q: &crate::LatticePoint| q.0[0] as f64 * perp[0] + q.0[1] as f64 * perp[1];
        let hi = verts.iter().max_by(|a, b| proj(a).total_cmp(&proj(b))).unwrap();
        let lo = verts.iter().min_by(|a, b| proj(a).total_cmp(&proj(b))).unwrap();
        let e = [(hi.0[0] - lo.0[0]) as f64, (hi.0[1] - lo.0[1]) as f64];
        // <e, perp(w)> = e_1 (-w_2) + e_2 w_1 = <(e_2, -e_1), w>.
        c[0] += logs[i] * e[1];
        c[1] -= logs[i] * e[0];
    }
    for term in per_normal {
        let dot = term.normal[0] as f64 * w[0] + term.normal[1] as f64 * w[1];
        let s = dot.signum() * 0.5 * term.log_abs_resultant;
        c[0] -= s * term.normal[0] as f64;
        c[1] -= s * term.normal[1] as f64;
    }
    let mut best = (objective_2d(hulls, logs, per_normal, t0).0, t0);
    let end = objective_2d(hulls, logs, per_normal, t1).0;
    if end > best.0 {
        best = (end, t1);
    }
    let tc = c[1].atan2(c[0]);
    for shift in [-2.0 * PI, 0.0, 2.0 * PI] {
        let t = tc + shift;
        if t > t0 && t < t1 {
            let v = objective_2d(hulls, logs, per_normal, t).0;
            if v > best.0 {
                best = (v, t);
            }
        }
    }
    best
}

/// Edge directions of a polygon (angles where widths change slope).
fn edge_angles(p: &LatticePolytope) -> Vec<f64> {
    let v = p.vertices();
    let k = v.len();
    if k < 2 {
        return vec![];
    }
    let mut out = Vec::new();
    for i in 0..k {
        let (a, b) = (&v[i], &v[(i + 1) % k]);
        let e = [(b.0[0] - a.0[0]) as f64, (b.0[1] - a.0[1]) as f64];
        out.push(e[1].atan2(e[0]));
        out.push((-e[1]).atan2(-e[0]));
    }
    out
}

/// Erdős–Turán size `η(f)` for systems of dimension 1 or 2.
///
/// Only facet normals of the Minkowski sum of supports contribute to the
/// denominator. For `n = 1` the directions are `w = ±1` with `D_{w,1} = 1`;
/// for `n = 2` the supremum over the circle combines an exact maximization
/// on every arc between breakpoints with a dense sample.
pub fn erdos_turan_size(system: &PolySystem, mode: SupNormMode) -> Result<EtaOutcome> {
    let report = classify_exceptional(system)?;
    erdos_turan_size_with(system, &report, mode)
}

/// As [`erdos_turan_size`], reusing an existing classification.
pub fn erdos_turan_size_with(system: &PolySystem, report: &DirectionalReport, mode: SupNormMode) -> Result<EtaOutcome> {
    let n = system.n;
    if n > 2 {
        return Err(Error::UnsupportedDimension {
            op: "erdos_turan_size",
            n,
        });
    }
    if let Some(e) = report.entries.iter().find(|e| e.is_zero) {
        return Ok(EtaOutcome::Infinite {
            normal: e.normal.clone(),
        });
    }
    let hulls = newton_polytopes(system)?;
    let d = mixed_volume_u64(&hulls)?;
    if d == 0 {
        return domain("η needs supports with positive mixed volume");
    }
    let norms = sup_norms(system, mode)?;
    let logs: Vec<f64> = norms.iter().map(|s| s.ln()).collect();
    let per_normal: Vec<NormalTerm> = report
        .entries
        .iter()
        .map(|e| NormalTerm {
            normal: e.normal.clone(),
            log_abs_resultant: log_abs(&e.resultant),
        })
        .collect();

    let (best, w_argmax, dw_table) = if n == 1 {
        let mut best = (f64::NEG_INFINITY, 0.0);
        for w in [-1.0, 1.0] {
            let v = logs[0] - resultant_term(&per_normal, &[w]);
            if v > best.0 {
                best = (v, w);
            }
        }
        let table = vec![
            DwSample { theta: PI, dw: vec![1.0] },
            DwSample { theta: 0.0, dw: vec![1.0] },
        ];
        (best.0, vec![best.1], table)
    } else {
        let mut best = (f64::NEG_INFINITY, 0.0);
        let mut table = Vec::new();
        for k in 0..ETA_SAMPLES {
            let t = -PI + 2.0 * PI * k as f64 / ETA_SAMPLES as f64;
            let (v, dw) = objective_2d(&hulls, &logs, &per_normal, t);
            if v > best.0 {
                best = (v, t);
            }
            if k % 64 == 0 {
                table.push(DwSample { theta: t, dw: dw.to_vec() });
            }
        }
        let mut cuts: Vec<f64> = hulls.iter().flat_map(edge_angles).collect();
        cuts.push(-PI);
        cuts.push(PI);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for pair in cuts.windows(2) {
            if pair[1] - pair[0] > 0.0 {
                let (v, t) = arc_max(&hulls, &logs, &per_normal, pair[0], pair[1]);
                if v > best.0 {
                    best = (v, t);
                }
            }
        }
        (best.0, vec![best.1], table)
    };
    Ok(EtaOutcome::Finite(EtaReport {
        eta: best / d as f64,
        w_argmax,
        d,
        per_normal,
        dw_table,
        sup_norms: norms,
        eta_upper_bound: eta_upper_bound(system)?,
    }))
}

/// `(1/D) (n + sqrt n) (prod d_i) sum log ||f_i|| / d_i` with the
/// coefficient-sum sup-norm bound and `D` the mixed volume of the supports.
pub fn eta_upper_bound(system: &PolySystem) -> Result<f64> {
    let hulls = newton_polytopes(system)?;
    let d = mixed_volume_u64(&hulls)? as f64;
    let n = system.n as f64;
    let degs: Vec<f64> = system
        .polys
        .iter()
        .map(|p| p.degree().unwrap_or(0) as f64)
        .collect();
    let prod: f64 = degs.iter().product();
    let sum: f64 = system
        .polys
        .iter()
        .zip(&degs)
        .map(|(p, &di)| bigint_to_f64(&sup_norm_upper(p)).ln() / di)
        .sum();
    Ok((n + n.sqrt()) * prod * sum / d)
}

/// Bounds on angle and radius discrepancy implied by `η`:
/// `66 n 2^n (18 + log+(1/η))^{2(n-1)/3} η^{1/3}` and `(2n/ε) η`.
pub fn discrepancy_bounds(eta: f64, n: usize, eps: f64) -> (f64, f64) {
    if eta == 0.0 {
        return (0.0, 0.0);
    }
    if eta.is_infinite() {
        return (f64::INFINITY, f64::INFINITY);
    }
    let nf = n as f64;
    let log_plus = (1.0 / eta).ln().max(0.0);
    let b_ang = 66.0 * nf * 2f64.powi(n as i32) * (18.0 + log_plus).powf(2.0 * (nf - 1.0) / 3.0) * eta.cbrt();
    let b_rad = 2.0 * nf / eps * eta;
    (b_ang, b_rad)
}

/// Product of open annuli and half-open argument intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PolarBox {
    /// `r_lo < |z_j| < r_hi`; `None` means no upper limit.
    pub radial: Vec<(f64, Option<f64>)>,
    /// `alpha < arg z_j <= beta` with `-pi <= alpha < beta <= pi`.
    pub angular: Vec<(f64, f64)>,
}

impl PolarBox {
    /// The whole of `(C^*)^n`.
    pub fn full(n: usize) -> Self {
        PolarBox {
            radial: vec![(0.0, None); n],
            angular: vec![(-PI, PI); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.radial.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.radial.len() != self.angular.len() || self.radial.is_empty() {
            return domain("polar box needs one radial and one angular interval per coordinate");
        }
        for &(lo, hi) in &self.radial {
            if !(lo >= 0.0 && hi.is_none_or(|h| h > lo)) {
                return domain(format!("bad radial interval ({lo}, {hi:?})"));
            }
        }
        for &(a, b) in &self.angular {
            if !(-PI <= a && a < b && b <= PI) {
                return domain(format!("bad angular interval ({a}, {b}]"));
            }
        }
        Ok(())
    }

    pub fn contains(&self, z: &[num_complex::Complex64]) -> bool {
        z.iter().zip(&self.radial).zip(&self.angular).all(|((z, &(lo, hi)), &(a, b))| {
            let r = z.norm();
            let t = arg(*z);
            lo < r && hi.is_none_or(|h| r < h) && a < t && t <= b
        })
    }

    /// Haar mass: the angular product if every annulus meets the unit circle.
    pub fn haar_mass(&self) -> f64 {
        let meets = self.radial.iter().all(|&(lo, hi)| lo < 1.0 && hi.is_none_or(|h| h > 1.0));
        if !meets {
            return 0.0;
        }
        self.angular.iter().map(|&(a, b)| (b - a) / (2.0 * PI)).product()
    }
}

/// One trial as seen by the expected-measure estimator. Exceptional trials
/// contribute the zero measure.
#[derive(Clone, Copy, Debug)]
pub struct MeasureSample<'a> {
    pub d: u32,
    pub exceptional: bool,
    pub cycle: Option<&'a ZeroCycle>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MeasureEstimate {
    pub estimate: f64,
    pub haar: f64,
    /// Zeros counted in the box over all non-exceptional trials.
    pub hits: u64,
    /// `M d^n`.
    pub normalizer: u64,
}

/// `(1/(M d^n)) sum_trials #(Z(f_d) ∩ U)` and the Haar mass of `U`.
pub fn expected_measure_estimate(samples: &[MeasureSample], bx: &PolarBox) -> Result<MeasureEstimate> {
    bx.validate()?;
    let Some(first) = samples.first() else {
        return domain("no trials to average");
    };
    let n = bx.dim();
    if samples.iter().any(|s| s.d != first.d) {
        return domain("all trials must share the degree");
    }
    let mut hits = 0u64;
    for s in samples.iter().filter(|s| !s.exceptional) {
        let Some(c) = s.cycle else {
            return domain("non-exceptional trial without a zero cycle");
        };
        if c.n != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: c.n,
            });
        }
        hits += c
            .points
            .iter()
            .filter(|p| bx.contains(&p.coords.0))
            .map(|p| p.mult as u64)
            .sum::<u64>();
    }
    let normalizer = samples.len() as u64 * (first.d as u64).pow(n as u32);
    Ok(MeasureEstimate {
        estimate: hits as f64 / normalizer as f64,
        haar: bx.haar_mass(),
        hits,
        normalizer,
    })
}

/// Discrepancy measurements of one cycle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiscrepancyReport {
    pub delta_ang: f64,
    /// `"exact"` or `"grid(G)"`; grid values are lower bounds.
    pub angle_mode: String,
    /// `(eps, value)` pairs.
    pub delta_rad: Vec<(f64, f64)>,
}

pub fn discrepancy_report(cycle: &ZeroCycle, mode: AngleMode, grid: usize, epsilons: &[f64]) -> Result<DiscrepancyReport> {
    // Fall back to the grid when the exact sweep would be too large.
    let (mode, label) = match mode {
        AngleMode::Exact if cycle.n == 2 && cycle.points.len() > EXACT_LIMIT_2D => (AngleMode::Grid, format!("grid({grid})")),
        AngleMode::Exact => (AngleMode::Exact, "exact".to_string()),
        AngleMode::Grid => (AngleMode::Grid, format!("grid({grid})")),
    };
    Ok(DiscrepancyReport {
        delta_ang: angle_discrepancy(cycle, mode, grid)?,
        angle_mode: label,
        delta_rad: epsilons
            .iter()
            .map(|&e| Ok((e, radius_discrepancy(cycle, e)?)))
            .collect::<Result<_>>()?,
    })
}
