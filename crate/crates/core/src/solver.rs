//! Numerical zeros: Aberth–Ehrlich for univariate polynomials, and bivariate
//! systems by exact elimination, back-substitution and Newton polishing.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry;
use crate::poly::{support, ComplexPoint, IntPolynomial, PolySystem};
use crate::resultant::{eliminant_bivariate, squarefree_decomposition, Axis, DirectionalReport, UnivariateIntPoly};

/// Scaled residual a point must satisfy to be emitted.
pub const RESIDUAL_TOLERANCE: f64 = 1e-6;
/// Clustering radius factor: points closer than `factor * max(1, |xi|)`
/// merge into one point with multiplicity.
pub const CLUSTER_FACTOR: f64 = 1e-7;
pub const MAX_SWEEPS: usize = 200;
const POLISH_STEPS: usize = 3;

/// `x * 2^e` without intermediate overflow.
fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// `c * 2^-shift` as a double, using the top 64 bits of `c`.
fn scaled_to_f64(c: &BigInt, shift: i64) -> f64 {
    let bits = c.bits() as i64;
    if bits == 0 {
        return 0.0;
    }
    let drop = (bits - 64).max(0);
    let top = (c >> drop as usize).to_f64().unwrap();
    ldexp(top, drop - shift)
}

/// Converts big coefficients to doubles after a common power-of-2 scaling
/// that brings the largest one near `2^512`.
pub fn scaled_coefficients(coeffs: &[BigInt]) -> Vec<f64> {
    let max_bits = coeffs.iter().map(|c| c.bits()).max().unwrap_or(0) as i64;
    let shift = max_bits - 512;
    coeffs.iter().map(|c| scaled_to_f64(c, shift)).collect()
}

/// Roots of a univariate polynomial with their convergence bookkeeping.
#[derive(Clone, Debug)]
pub struct UnivariateRoots {
    pub roots: Vec<Complex64>,
    pub sweeps: usize,
    /// Per root: Aberth correction did not settle within the sweep budget.
    pub unconverged: Vec<bool>,
}

impl UnivariateRoots {
    pub fn all_converged(&self) -> bool {
        !self.unconverged.iter().any(|&u| u)
    }
}

/// Newton ratio `p(z)/p'(z)` for `p = sum a_k z^k`, evaluated on the
/// reversed polynomial outside the unit disk so that nothing overflows.
fn newton_ratio(a: &[Complex64], z: Complex64) -> Complex64 {
    let m = a.len() - 1;
    if z.norm() <= 1.0 {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for c in a.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        p / dp
    } else {
        let w = z.inv();
        let mut q = Complex64::zero();
        let mut dq = Complex64::zero();
        for c in a.iter() {
            dq = dq * w + q;
            q = q * w + c;
        }
        z * q / (q * m as f64 - w * dq)
    }
}

/// `|p(z)| / sum |a_k| |z|^k`, computed without overflow.
pub fn relative_residual(a: &[Complex64], z: Complex64) -> f64 {
    let (mut p, mut s) = (Complex64::zero(), 0.0);
    if z.norm() <= 1.0 {
        let r = z.norm();
        for c in a.iter().rev() {
            p = p * z + c;
            s = s * r + c.norm();
        }
    } else {
        let w = z.inv();
        let r = w.norm();
        for c in a.iter() {
            p = p * w + c;
            s = s * r + c.norm();
        }
    }
    if s == 0.0 {
        0.0
    } else {
        p.norm() / s
    }
}

/// All roots of `sum coeffs[k] z^k` by Aberth–Ehrlich iteration from a
/// perturbed circle of radius `|a_0/a_d|^(1/d)`, followed by Newton polishing.
pub fn roots_complex(coeffs: &[Complex64]) -> Result<UnivariateRoots> {
    let mut a: Vec<Complex64> = coeffs.to_vec();
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    if a.len() < 2 {
        return domain("root finding needs degree at least 1");
    }
    if a.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return domain("non-finite polynomial coefficient");
    }
    let zeros_at_origin = a.iter().take_while(|c| c.is_zero()).count();
    let a: Vec<Complex64> = a[zeros_at_origin..].to_vec();
    let m = a.len() - 1;
    let mut roots = vec![Complex64::zero(); zeros_at_origin];
    let mut unconverged = vec![false; zeros_at_origin];
    if m == 0 {
        return Ok(UnivariateRoots {
            roots,
            sweeps: 0,
            unconverged,
        });
    }
    let scale = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let a: Vec<Complex64> = a.iter().map(|c| c / scale).collect();

    let radius = (a[0].norm() / a[m].norm()).powf(1.0 / m as f64);
    let mut z: Vec<Complex64> = (0..m)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / m as f64 + 0.4;
            let wobble = 1.0 + 0.02 * ((k as f64 * 0.618_033_988_75).fract() - 0.5);
            Complex64::from_polar(radius * wobble, theta)
        })
        .collect();
    let mut done = vec![false; m];
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS && done.iter().any(|&d| !d) {
        sweeps += 1;
        for i in 0..m {
            if done[i] {
                continue;
            }
            let ratio = newton_ratio(&a, z[i]);
            if ratio.is_zero() {
                done[i] = true;
                continue;
            }
            let mut sum = Complex64::zero();
            for j in 0..m {
                if j != i {
                    sum += (z[i] - z[j]).inv();
                }
            }
            let mut step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if !step.re.is_finite() || !step.im.is_finite() {
                step = if ratio.re.is_finite() && ratio.im.is_finite() {
                    ratio
                } else {
                    Complex64::zero()
                };
            }
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            }
        }
    }
    polish(&a, &mut z);
    roots.extend(z);
    unconverged.extend(done.iter().map(|d| !d));
    Ok(UnivariateRoots {
        roots,
        sweeps,
        unconverged,
    })
}

/// A few Newton steps per root, each accepted only if it lowers the residual
/// and stays closer to its root than to any neighbour.
fn polish(a: &[Complex64], z: &mut [Complex64]) {
    let m = z.len();
    for i in 0..m {
        let gap = (0..m)
            .filter(|&j| j != i)
            .map(|j| (z[i] - z[j]).norm())
            .fold(f64::INFINITY, f64::min);
        let mut res = relative_residual(a, z[i]);
        for _ in 0..POLISH_STEPS {
            let step = newton_ratio(a, z[i]);
            if !step.re.is_finite() || !step.im.is_finite() || step.norm() >= 0.5 * gap {
                break;
            }
            let cand = z[i] - step;
            let r = relative_residual(a, cand);
            if r < res {
                z[i] = cand;
                res = r;
            } else {
                break;
            }
        }
    }
}

/// All complex roots of an integer polynomial.
pub fn roots_univariate(p: &UnivariateIntPoly) -> Result<UnivariateRoots> {
    if p.degree().unwrap_or(0) < 1 {
        return domain("root finding needs degree at least 1");
    }
    let c: Vec<Complex64> = scaled_coefficients(p.coeffs())
        .into_iter()
        .map(|x| Complex64::new(x, 0.0))
        .collect();
    if c.last().unwrap().is_zero() {
        return domain("leading coefficient vanishes after scaling");
    }
    roots_complex(&c)
}

/// One point of a zero cycle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclePoint {
    pub coords: ComplexPoint,
    pub mult: usize,
    pub residual: f64,
}

/// A finite formal sum of points of `C^n` with multiplicities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroCycle {
    pub n: usize,
    pub points: Vec<CyclePoint>,
}

fn cmp_complex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn cmp_coords(a: &[Complex64], b: &[Complex64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| cmp_complex(x, y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn sup_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn sup_abs(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn cluster_radius(a: &[Complex64]) -> f64 {
    CLUSTER_FACTOR * sup_abs(a).max(1.0)
}

impl ZeroCycle {
    pub fn empty(n: usize) -> Self {
        ZeroCycle { n, points: vec![] }
    }

    /// Merges points within the clustering radius, keeping the member with
    /// the smallest residual as representative, and sorts the result.
    pub fn from_points(n: usize, mut pts: Vec<(Vec<Complex64>, usize, f64)>) -> Self {
        pts.sort_by(|a, b| a.2.total_cmp(&b.2).then_with(|| cmp_coords(&a.0, &b.0)));
        let mut points: Vec<CyclePoint> = Vec::new();
        for (x, mult, res) in pts {
            match points
                .iter_mut()
                .find(|p| sup_dist(&p.coords.0, &x) <= cluster_radius(&p.coords.0))
            {
                Some(p) => p.mult += mult,
                None => points.push(CyclePoint {
                    coords: ComplexPoint(x),
                    mult,
                    residual: res,
                }),
            }
        }
        points.sort_by(|a, b| cmp_coords(&a.coords.0, &b.coords.0));
        ZeroCycle { n, points }
    }

    /// `sum m_xi`.
    pub fn degree(&self) -> usize {
        self.points.iter().map(|p| p.mult).sum()
    }

    pub fn max_residual(&self) -> f64 {
        self.points.iter().map(|p| p.residual).fold(0.0, f64::max)
    }

    /// The points repeated by multiplicity.
    pub fn expanded(&self) -> Vec<&ComplexPoint> {
        self.points
            .iter()
            .flat_map(|p| std::iter::repeat_n(&p.coords, p.mult))
            .collect()
    }

    /// Multiset equality up to the clustering radius.
    pub fn agrees_with(&self, other: &ZeroCycle) -> bool {
        if self.n != other.n || self.degree() != other.degree() {
            return false;
        }
        let mut left: Vec<(Vec<Complex64>, usize)> =
            other.points.iter().map(|p| (p.coords.0.clone(), p.mult)).collect();
        for p in &self.points {
            let mut need = p.mult;
            let tol = cluster_radius(&p.coords.0);
            for q in left.iter_mut() {
                if need == 0 {
                    break;
                }
                if q.1 > 0 && sup_dist(&q.0, &p.coords.0) <= tol.max(cluster_radius(&q.0)) {
                    let take = need.min(q.1);
                    q.1 -= take;
                    need -= take;
                }
            }
            if need > 0 {
                return false;
            }
        }
        true
    }
}

/// Bookkeeping of one solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveDiagnostics {
    pub eliminant_degree: usize,
    pub iterations: usize,
    pub max_residual: f64,
    pub residual_tolerance: f64,
    pub cluster_factor: f64,
    /// Mixed volume of the supports.
    pub count_expected: u64,
    pub count_found: usize,
    /// Roots of the eliminant (or of `f`) with no acceptable solution point.
    pub rejected_roots: usize,
    pub unconverged_roots: usize,
    /// `Some(false)` when eliminating the other variable gives a different
    /// multiset of solutions.
    pub cross_check_agrees: Option<bool>,
}

impl SolveDiagnostics {
    /// Solver-side inconsistency worth flagging on a trial.
    pub fn count_mismatch(&self) -> bool {
        self.cross_check_agrees == Some(false) || self.rejected_roots > 0
    }
}

/// Solution set and diagnostics of a system, in the zero-cycle wire format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    #[serde(flatten)]
    pub cycle: ZeroCycle,
    pub diagnostics: SolveDiagnostics,
}

/// Dense double-precision copy of an integer polynomial for fast evaluation.
#[derive(Clone, Debug)]
struct Evaluator {
    terms: Vec<(Vec<i32>, f64)>,
    degree: i32,
    sup: f64,
}

impl Evaluator {
    fn new(f: &IntPolynomial) -> Result<Self> {
        if f.is_laurent() {
            return domain("solving Laurent polynomials with negative exponents is not supported");
        }
        let coeffs: Vec<BigInt> = f.terms().map(|(_, c)| c.clone()).collect();
        let scaled = scaled_coefficients(&coeffs);
        let terms: Vec<(Vec<i32>, f64)> = f
            .terms()
            .zip(scaled)
            .map(|((e, _), c)| (e.0.iter().map(|&x| x as i32).collect(), c))
            .collect();
        let sup = terms.iter().map(|t| t.1.abs()).sum();
        Ok(Evaluator {
            degree: f.degree().unwrap_or(0) as i32,
            terms,
            sup,
        })
    }

    fn value(&self, x: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(x).fold(Complex64::new(*c, 0.0), |m, (&p, z)| m * z.powi(p)))
            .sum()
    }

    /// Value and gradient of a bivariate polynomial.
    fn value_grad2(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64, Complex64) {
        let (mut f, mut fx, mut fy) = (Complex64::zero(), Complex64::zero(), Complex64::zero());
        for (e, c) in &self.terms {
            let (a, b) = (e[0], e[1]);
            let xa = x.powi(a);
            let yb = y.powi(b);
            f += xa * yb * c;
            if a > 0 {
                fx += x.powi(a - 1) * yb * (c * a as f64);
            }
            if b > 0 {
                fy += xa * y.powi(b - 1) * (c * b as f64);
            }
        }
        (f, fx, fy)
    }

    /// `|f(x)| / (S max(1, |x|_inf)^deg)` with `S = sum |a_J|`.
    fn scaled_residual(&self, x: &[Complex64]) -> f64 {
        let r = sup_abs(x).max(1.0);
        self.value(x).norm() / (self.sup * r.powi(self.degree))
    }

    /// Coefficients in `x` of `f(x, y)` at a fixed `y`.
    fn coefficients_in_x(&self, y: Complex64) -> Vec<Complex64> {
        let dx = self.terms.iter().map(|(e, _)| e[0]).max().unwrap_or(0) as usize;
        let mut out = vec![Complex64::zero(); dx + 1];
        for (e, c) in &self.terms {
            out[e[0] as usize] += y.powi(e[1]) * c;
        }
        out
    }
}

fn system_residual(evals: &[Evaluator], x: &[Complex64]) -> f64 {
    evals.iter().map(|e| e.scaled_residual(x)).fold(0.0, f64::max)
}

/// Newton iteration on a bivariate system, keeping the best iterate.
fn newton_polish2(evals: &[Evaluator; 2], start: [Complex64; 2], steps: usize) -> ([Complex64; 2], f64) {
    let mut best = start;
    let mut best_res = system_residual(evals, &best);
    let mut cur = start;
    for _ in 0..steps {
        let (f1, f1x, f1y) = evals[0].value_grad2(cur[0], cur[1]);
        let (f2, f2x, f2y) = evals[1].value_grad2(cur[0], cur[1]);
        let det = f1x * f2y - f1y * f2x;
        if det.is_zero() || !det.re.is_finite() || !det.im.is_finite() {
            break;
        }
        let dx = (f1 * f2y - f2 * f1y) / det;
        let dy = (f1x * f2 - f2x * f1) / det;
        let next = [cur[0] - dx, cur[1] - dy];
        if !next.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            break;
        }
        let res = system_residual(evals, &next);
        cur = next;
        if res < best_res {
            best = next;
            best_res = res;
        }
        if dx.norm().max(dy.norm()) <= 4.0 * f64::EPSILON * sup_abs(&cur).max(1.0) {
            break;
        }
    }
    (best, best_res)
}

fn mixed_volume_count(polys: &[IntPolynomial]) -> Result<u64> {
    let hulls = polys
        .iter()
        .map(|p| geometry::convex_hull(&support(p)?))
        .collect::<Result<Vec<_>>>()?;
    let mv = geometry::mixed_volume(&hulls)?;
    Ok(mv.to_integer().to_u64().unwrap_or(u64::MAX))
}

struct PartialSolve {
    points: Vec<(Vec<Complex64>, usize, f64)>,
    eliminant_degree: usize,
    sweeps: usize,
    rejected: usize,
    unconverged: usize,
}

/// Eliminates `x`, then recovers `x` at each cluster of eliminant roots.
fn solve_eliminating_x(f1: &IntPolynomial, f2: &IntPolynomial) -> Result<PartialSolve> {
    let r = eliminant_bivariate(f1, f2, Axis::X)?;
    if r.is_zero() {
        return Err(Error::NonIsolated);
    }
    let evals = [Evaluator::new(f1)?, Evaluator::new(f2)?];
    let mut out = PartialSolve {
        points: vec![],
        eliminant_degree: r.degree().unwrap(),
        sweeps: 0,
        rejected: 0,
        unconverged: 0,
    };
    if r.degree() == Some(0) {
        return Ok(out);
    }
    // Exact squarefree splitting gives every root its multiplicity.
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for (q, k) in squarefree_decomposition(&r) {
        let ys = roots_univariate(&q)?;
        out.sweeps = out.sweeps.max(ys.sweeps);
        out.unconverged += ys.unconverged.iter().filter(|&&u| u).count() * k;
        clusters.extend(ys.roots.into_iter().map(|y| (y, k)));
    }
    for (y, k) in clusters {
        let mut cands: Vec<([Complex64; 2], f64)> = Vec::new();
        for e in &evals {
            let coeffs = e.coefficients_in_x(y);
            let Ok(xr) = roots_complex(&coeffs) else { continue };
            for x in xr.roots {
                cands.push(newton_polish2(&evals, [x, y], 8));
            }
        }
        cands.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut accepted: Vec<(Vec<Complex64>, usize, f64)> = Vec::new();
        for (pt, res) in cands {
            if accepted.len() == k || res > RESIDUAL_TOLERANCE {
                break;
            }
            let pt = pt.to_vec();
            if accepted.iter().any(|a| sup_dist(&a.0, &pt) <= cluster_radius(&a.0)) {
                continue;
            }
            accepted.push((pt, 1, res));
        }
        if accepted.is_empty() {
            out.rejected += k;
            continue;
        }
        // A multiple root of the eliminant with fewer distinct solutions is
        // a higher-multiplicity point.
        let found: usize = accepted.len();
        accepted[0].1 += k - found;
        out.points.extend(accepted);
    }
    Ok(out)
}

/// All isolated solutions of a bivariate system.
///
/// The solve eliminating `x` is returned; the solve eliminating `y` is run as
/// a cross-check and its agreement recorded in the diagnostics.
pub fn solve_bivariate(f1: &IntPolynomial, f2: &IntPolynomial) -> Result<Solution> {
    for f in [f1, f2] {
        if f.nvars() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: f.nvars(),
            });
        }
    }
    let primary = solve_eliminating_x(f1, f2)?;
    let swapped = solve_eliminating_x(&f1.swap_variables(0, 1), &f2.swap_variables(0, 1))?;
    let cycle = ZeroCycle::from_points(2, primary.points);
    let other = ZeroCycle::from_points(
        2,
        swapped
            .points
            .into_iter()
            .map(|(x, m, r)| (vec![x[1], x[0]], m, r))
            .collect(),
    );
    let diagnostics = SolveDiagnostics {
        eliminant_degree: primary.eliminant_degree,
        iterations: primary.sweeps,
        max_residual: cycle.max_residual(),
        residual_tolerance: RESIDUAL_TOLERANCE,
        cluster_factor: CLUSTER_FACTOR,
        count_expected: mixed_volume_count(&[f1.clone(), f2.clone()])?,
        count_found: cycle.degree(),
        rejected_roots: primary.rejected,
        unconverged_roots: primary.unconverged,
        cross_check_agrees: Some(cycle.agrees_with(&other)),
    };
    Ok(Solution { cycle, diagnostics })
}

/// All roots of a univariate integer polynomial as a zero cycle.
pub fn solve_univariate(f: &IntPolynomial) -> Result<Solution> {
    let p = UnivariateIntPoly::from_int_poly(f)?;
    if p.is_zero() {
        return Err(Error::NonIsolated);
    }
    let deg = p.degree().unwrap();
    let order = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    let mut diagnostics = SolveDiagnostics {
        eliminant_degree: deg,
        iterations: 0,
        max_residual: 0.0,
        residual_tolerance: RESIDUAL_TOLERANCE,
        cluster_factor: CLUSTER_FACTOR,
        count_expected: (deg - order) as u64,
        count_found: 0,
        rejected_roots: 0,
        unconverged_roots: 0,
        cross_check_agrees: None,
    };
    if deg == 0 {
        return Ok(Solution {
            cycle: ZeroCycle::empty(1),
            diagnostics,
        });
    }
    let roots = roots_univariate(&p)?;
    let a: Vec<Complex64> = scaled_coefficients(p.coeffs())
        .into_iter()
        .map(|x| Complex64::new(x, 0.0))
        .collect();
    let mut pts = Vec::with_capacity(deg);
    for z in roots.roots.iter() {
        let res = relative_residual(&a, *z);
        if res <= RESIDUAL_TOLERANCE {
            pts.push((vec![*z], 1, res));
        } else {
            diagnostics.rejected_roots += 1;
        }
    }
    let cycle = ZeroCycle::from_points(1, pts);
    diagnostics.iterations = roots.sweeps;
    diagnostics.unconverged_roots = roots.unconverged.iter().filter(|&&u| u).count();
    diagnostics.max_residual = cycle.max_residual();
    diagnostics.count_found = cycle.degree();
    Ok(Solution { cycle, diagnostics })
}

/// Solves a system of dimension 1 or 2.
pub fn solve_system(system: &PolySystem) -> Result<Solution> {
    match system.n {
        1 => solve_univariate(&system.polys[0]),
        2 => solve_bivariate(&system.polys[0], &system.polys[1]),
        n => Err(Error::UnsupportedDimension { op: "solve", n }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum VerdictStatus {
    Pass,
    Fail,
    Skipped,
}

/// Outcome of comparing a solution count with the generic count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CountVerdict {
    pub status: VerdictStatus,
    pub found: usize,
    /// Mixed volume of the supports.
    pub mixed_volume: u64,
    /// `prod deg f_i`, which equals `d^n` for full systems.
    pub bezout: u64,
    pub reason: Option<String>,
}

/// Non-exceptional systems must have exactly mixed-volume many zeros.
pub fn count_check(system: &PolySystem, cycle: &ZeroCycle, report: &DirectionalReport) -> Result<CountVerdict> {
    let bezout = system
        .polys
        .iter()
        .map(|p| p.degree().unwrap_or(0).max(0) as u64)
        .product();
    let mixed_volume = mixed_volume_count(&system.polys)?;
    let found = cycle.degree();
    let (status, reason) = if report.exceptional {
        (VerdictStatus::Skipped, Some("system lies in the exceptional set".to_string()))
    } else if found as u64 == mixed_volume {
        (VerdictStatus::Pass, None)
    } else {
        (
            VerdictStatus::Fail,
            Some(format!("found {found} zeros, expected {mixed_volume}")),
        )
    };
    Ok(CountVerdict {
        status,
        found,
        mixed_volume,
        bezout,
        reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::sample_bernoulli_system;
    use crate::resultant::classify_exceptional;

    fn bivariate(terms: &[((i64, i64), i64)]) -> IntPolynomial {
        IntPolynomial::from_terms(2, terms.iter().map(|&((a, b), c)| (vec![a, b], c))).unwrap()
    }

    fn sorted_re(v: &[Complex64]) -> Vec<f64> {
        let mut r: Vec<f64> = v.iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        r
    }

    #[test]
    fn roots_of_unity() {
        for d in [1usize, 2, 5, 16, 64] {
            let mut c = vec![0i64; d + 1];
            c[0] = -1;
            c[d] = 1;
            let r = roots_univariate(&UnivariateIntPoly::from_i64(&c)).unwrap();
            assert!(r.all_converged());
            assert_eq!(r.roots.len(), d);
            for k in 0..d {
                let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64);
                let near = r.roots.iter().map(|z| (z - w).norm()).fold(f64::INFINITY, f64::min);
                assert!(near < 1e-10, "d={d} k={k} err={near}");
            }
        }
    }

    #[test]
    fn cubic_with_integer_roots() {
        let r = roots_univariate(&UnivariateIntPoly::from_i64(&[-6, 11, -6, 1])).unwrap();
        let re = sorted_re(&r.roots);
        for (x, want) in re.iter().zip([1.0, 2.0, 3.0]) {
            assert!((x - want).abs() < 1e-12);
        }
        assert!(r.roots.iter().all(|z| z.im.abs() < 1e-12));
    }

    #[test]
    fn zero_roots_are_exact() {
        let r = roots_univariate(&UnivariateIntPoly::from_i64(&[0, 0, -1, 1])).unwrap();
        assert_eq!(r.roots.iter().filter(|z| z.is_zero()).count(), 2);
        assert!(roots_univariate(&UnivariateIntPoly::from_i64(&[4])).is_err());
    }

    #[test]
    fn high_degree_bernoulli_residuals_and_vieta() {
        for (d, seed) in [(200u32, 1u64), (500, 2), (2000, 3)] {
            let s = sample_bernoulli_system(1, d, seed, 0).unwrap();
            let p = UnivariateIntPoly::from_int_poly(&s.polys[0]).unwrap();
            let r = roots_univariate(&p).unwrap();
            assert_eq!(r.roots.len(), d as usize);
            let sum_abs = (d + 1) as f64;
            for z in &r.roots {
                // Residual relative to sum |a_k| (|z| is close to 1 here).
                let a: Vec<Complex64> = p.coeffs().iter().map(|c| Complex64::new(c.to_f64().unwrap(), 0.0)).collect();
                let val = if z.norm() <= 1.0 {
                    a.iter().rev().fold(Complex64::zero(), |acc, c| acc * z + c).norm()
                } else {
                    relative_residual(&a, *z) * a.iter().map(|c| c.norm()).sum::<f64>() * z.norm().powi(d as i32)
                };
                assert!(val <= 1e-8 * sum_abs * z.norm().max(1.0).powi(d as i32), "d={d}");
            }
            let sum: Complex64 = r.roots.iter().sum();
            let want = -p.coeff(d as usize - 1).to_f64().unwrap() / p.coeff(d as usize).to_f64().unwrap();
            assert!((sum - want).norm() <= 1e-8 * d as f64 * want.abs().max(1.0), "d={d} sum={sum}");
        }
    }

    #[test]
    fn huge_coefficients_are_scaled() {
        // (x - 2)(x - 3) * 10^400.
        let k: BigInt = num_traits::pow(BigInt::from(10), 400);
        let p = UnivariateIntPoly::new(vec![&k * 6, &k * -5, k.clone()]);
        let r = roots_univariate(&p).unwrap();
        let re = sorted_re(&r.roots);
        assert!((re[0] - 2.0).abs() < 1e-12 && (re[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn circle_and_hyperbola() {
        let f1 = bivariate(&[((2, 0), 1), ((0, 2), 1), ((0, 0), -5)]);
        let f2 = bivariate(&[((1, 1), 1), ((0, 0), -2)]);
        let sol = solve_bivariate(&f1, &f2).unwrap();
        assert_eq!(sol.cycle.degree(), 4);
        assert_eq!(sol.diagnostics.cross_check_agrees, Some(true));
        let want = [(-2.0, -1.0), (-1.0, -2.0), (1.0, 2.0), (2.0, 1.0)];
        for (p, (x, y)) in sol.cycle.points.iter().zip(want) {
            assert!((p.coords.0[0] - x).norm() < 1e-12 && (p.coords.0[1] - y).norm() < 1e-12);
            assert_eq!(p.mult, 1);
        }
    }

    #[test]
    fn crossing_lines() {
        let sol = solve_bivariate(&bivariate(&[((1, 0), 1), ((0, 1), -1)]), &bivariate(&[((1, 0), 1), ((0, 1), 1)])).unwrap();
        assert_eq!(sol.cycle.degree(), 1);
        assert!(sol.cycle.points[0].coords.max_abs() < 1e-14);
        let f = bivariate(&[((1, 0), 1), ((0, 1), 2), ((0, 0), 1)]);
        assert!(matches!(solve_bivariate(&f, &f), Err(Error::NonIsolated)));
    }

    #[test]
    fn tangency_is_a_double_point() {
        // y = x^2 meets y = 0 doubly at the origin.
        let sol = solve_bivariate(&bivariate(&[((0, 1), 1), ((2, 0), -1)]), &bivariate(&[((0, 1), 1)])).unwrap();
        assert_eq!(sol.cycle.degree(), 2);
        assert_eq!(sol.cycle.points.len(), 1);
        assert_eq!(sol.cycle.points[0].mult, 2);
    }

    #[test]
    fn bernoulli_counts_and_symmetry() {
        let mut checked = 0;
        for trial in 0..6 {
            let s = sample_bernoulli_system(2, 4, 42, trial).unwrap();
            let rep = classify_exceptional(&s).unwrap();
            let sol = solve_system(&s).unwrap();
            let verdict = count_check(&s, &sol.cycle, &rep).unwrap();
            if rep.exceptional {
                assert_eq!(verdict.status, VerdictStatus::Skipped);
                continue;
            }
            checked += 1;
            assert_eq!(sol.cycle.degree(), 16);
            assert_eq!(verdict.status, VerdictStatus::Pass);
            assert_eq!((verdict.mixed_volume, verdict.bezout), (16, 16));
            assert_eq!(sol.diagnostics.cross_check_agrees, Some(true));
            assert!(sol.cycle.points.iter().all(|p| p.residual <= RESIDUAL_TOLERANCE));
            // Real coefficients: closed under conjugation.
            let conj = ZeroCycle::from_points(
                2,
                sol.cycle
                    .points
                    .iter()
                    .map(|p| (p.coords.0.iter().map(|z| z.conj()).collect(), p.mult, p.residual))
                    .collect(),
            );
            assert!(sol.cycle.agrees_with(&conj));
        }
        assert!(checked > 0);
    }

    #[test]
    fn count_check_on_sparse_supports() {
        // Triangle 2*Sigma_2 against the segment conv{(0,0),(1,1)}.
        let f1 = bivariate(&[((0, 0), 3), ((1, 0), -2), ((0, 1), 5), ((2, 0), 1), ((1, 1), -7), ((0, 2), 4)]);
        let f2 = bivariate(&[((0, 0), 2), ((1, 1), -3)]);
        let s = PolySystem::new(2, 2, vec![f1, f2]).unwrap();
        let rep = classify_exceptional(&s).unwrap();
        assert!(!rep.exceptional);
        let sol = solve_system(&s).unwrap();
        let v = count_check(&s, &sol.cycle, &rep).unwrap();
        assert_eq!(v.mixed_volume, 4);
        assert_eq!(v.status, VerdictStatus::Pass);
    }

    #[test]
    fn zero_cycle_json_shape() {
        let s = sample_bernoulli_system(1, 3, 1, 0).unwrap();
        let sol = solve_system(&s).unwrap();
        let v = serde_json::to_value(&sol).unwrap();
        assert_eq!(v["n"], 1);
        assert!(v["points"][0]["coords"][0].as_array().unwrap().len() == 2);
        assert!(v["points"][0]["mult"].is_u64());
        assert!(v["diagnostics"]["countFound"].is_u64());
        let back: Solution = serde_json::from_value(v).unwrap();
        assert_eq!(back, sol);
    }
}
