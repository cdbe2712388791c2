//! Exact convex geometry over the integer lattice.
//!
//! Hulls are computed with integer predicates only: monotone chain in the
//! plane and an incremental (beneath-beyond) hull in space. Volumes and mixed
//! volumes are exact rationals. The support function follows the infimum
//! convention `s_Q(v) = min_{q in Q} <q, v>`, so facet normals point inward.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest ambient dimension handled by the hull and volume routines.
pub const MAX_DIM: usize = 3;

/// A point of `Z^n`, used both as an exponent vector and as a lattice
/// coordinate. Ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        LatticePoint(coords.into())
    }

    pub fn zero(dim: usize) -> Self {
        LatticePoint(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dot(&self, v: &[i64]) -> i64 {
        dot(&self.0, v)
    }

    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Sum of the coordinates (total degree of an exponent vector).
    pub fn norm1(&self) -> i64 {
        self.0.iter().sum()
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        LatticePoint(v)
    }
}

impl<const N: usize> From<[i64; N]> for LatticePoint {
    fn from(v: [i64; N]) -> Self {
        LatticePoint(v.to_vec())
    }
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Divides a nonzero integer vector by the gcd of its entries.
pub fn primitive(v: &[i64]) -> Result<Vec<i64>> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g == 0 {
        return domain("direction vector must be nonzero");
    }
    Ok(v.iter().map(|x| x / g).collect())
}

pub fn is_primitive(v: &[i64]) -> bool {
    v.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1
}

/// A face `Q^v` of a polytope: the generators minimizing `<q, v>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    /// Primitive form of the requested direction.
    pub normal: Vec<i64>,
    pub support_value: i64,
    pub points: Vec<LatticePoint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Facet3 {
    /// Primitive inward normal.
    normal: [i64; 3],
    offset: i64,
}

/// Convex hull of a finite subset of `Z^n`, `n <= 3`.
///
/// `points` are the deduplicated generators, `vertices` the hull vertices.
/// In the plane the vertices are stored counter-clockwise starting at the
/// lexicographically smallest one; otherwise they are sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolytope {
    dim: usize,
    affine_dim: usize,
    points: Vec<LatticePoint>,
    vertices: Vec<LatticePoint>,
    facets3: Vec<Facet3>,
    /// Six times the volume, for full-dimensional polytopes in space.
    six_volume: i128,
}

impl LatticePolytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the affine hull of the generators.
    pub fn affine_dim(&self) -> usize {
        self.affine_dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim == self.dim
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    /// The scaled standard simplex `d * Sigma_n` with all its lattice points
    /// as generators.
    pub fn scaled_simplex(n: usize, d: u32) -> Result<Self> {
        convex_hull(&simplex_lattice_points(n, d))
    }

    /// Translate by a lattice vector.
    pub fn translate(&self, b: &LatticePoint) -> Result<Self> {
        let pts: Vec<_> = self.points.iter().map(|p| p.add(b)).collect();
        convex_hull(&pts)
    }

    /// Width of the orthogonal projection onto the line spanned by `u`:
    /// `max <q,u> - min <q,u>` over the vertices.
    pub fn width_along(&self, u: &[f64]) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in &self.vertices {
            let s: f64 = v.0.iter().zip(u).map(|(&a, b)| a as f64 * b).sum();
            lo = lo.min(s);
            hi = hi.max(s);
        }
        hi - lo
    }
}

/// All lattice points of `d * Sigma_n`, in lexicographic order.
pub fn simplex_lattice_points(n: usize, d: u32) -> Vec<LatticePoint> {
    fn rec(n: usize, budget: i64, prefix: &mut Vec<i64>, out: &mut Vec<LatticePoint>) {
        if prefix.len() == n {
            out.push(LatticePoint(prefix.clone()));
            return;
        }
        for j in 0..=budget {
            prefix.push(j);
            rec(n, budget - j, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d as i64, &mut Vec::with_capacity(n), &mut out);
    out
}

fn check_points(points: &[LatticePoint]) -> Result<usize> {
    let first = points
        .first()
        .ok_or_else(|| Error::Domain("convex hull of an empty point set".into()))?;
    let n = first.dim();
    if n == 0 || n > MAX_DIM {
        return Err(Error::UnsupportedDimension {
            op: "convex_hull",
            n,
        });
    }
    if let Some(p) = points.iter().find(|p| p.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.dim(),
        });
    }
    Ok(n)
}

/// Exact convex hull of a nonempty finite point set in dimension 1, 2 or 3.
pub fn convex_hull(points: &[LatticePoint]) -> Result<LatticePolytope> {
    let dim = check_points(points)?;
    let pts: Vec<LatticePoint> = points
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut poly = LatticePolytope {
        dim,
        affine_dim: 0,
        points: pts.clone(),
        vertices: Vec::new(),
        facets3: Vec::new(),
        six_volume: 0,
    };

    match dim {
        1 => {
            let lo = pts.first().unwrap().clone();
            let hi = pts.last().unwrap().clone();
            if lo == hi {
                poly.vertices = vec![lo];
            } else {
                poly.affine_dim = 1;
                poly.vertices = vec![lo, hi];
            }
        }
        2 => {
            let xy: Vec<[i64; 2]> = pts.iter().map(|p| [p.0[0], p.0[1]]).collect();
            let hull = monotone_chain(&xy);
            poly.affine_dim = match hull.len() {
                1 => 0,
                2 => 1,
                _ => 2,
            };
            poly.vertices = hull.iter().map(|&i| pts[i].clone()).collect();
        }
        3 => hull3(&pts, &mut poly),
        _ => unreachable!(),
    }
    Ok(poly)
}

fn cross2(o: [i64; 2], a: [i64; 2], b: [i64; 2]) -> i128 {
    (a[0] - o[0]) as i128 * (b[1] - o[1]) as i128 - (a[1] - o[1]) as i128 * (b[0] - o[0]) as i128
}

/// Andrew's monotone chain over lexicographically sorted distinct points.
/// Returns indices of the strict hull, counter-clockwise from the first point.
fn monotone_chain(pts: &[[i64; 2]]) -> Vec<usize> {
    let n = pts.len();
    if n <= 1 {
        return (0..n).collect();
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * n);
    for i in 0..n {
        while hull.len() >= 2
            && cross2(pts[hull[hull.len() - 2]], pts[hull[hull.len() - 1]], pts[i]) <= 0
        {
            hull.pop();
        }
        hull.push(i);
    }
    let lower = hull.len() + 1;
    for i in (0..n - 1).rev() {
        while hull.len() >= lower
            && cross2(pts[hull[hull.len() - 2]], pts[hull[hull.len() - 1]], pts[i]) <= 0
        {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    if hull.len() == 2 && hull[0] == hull[1] {
        hull.pop();
    }
    hull
}

type P3 = [i64; 3];

fn sub3(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross3(a: P3, b: P3) -> P3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: P3, b: P3) -> i128 {
    a[0] as i128 * b[0] as i128 + a[1] as i128 * b[1] as i128 + a[2] as i128 * b[2] as i128
}

/// Signed six-fold volume of the tetrahedron (a, b, c, p).
fn orient3(a: P3, b: P3, c: P3, p: P3) -> i128 {
    dot3(cross3(sub3(b, a), sub3(c, a)), sub3(p, a))
}

fn hull3(pts: &[LatticePoint], poly: &mut LatticePolytope) {
    let p: Vec<P3> = pts.iter().map(|q| [q.0[0], q.0[1], q.0[2]]).collect();
    let a = 0;
    let Some(b) = (1..p.len()).find(|&i| p[i] != p[a]) else {
        poly.affine_dim = 0;
        poly.vertices = vec![pts[a].clone()];
        return;
    };
    let Some(c) = (0..p.len()).find(|&i| cross3(sub3(p[b], p[a]), sub3(p[i], p[a])) != [0, 0, 0])
    else {
        // Collinear: the extreme points along the line.
        poly.affine_dim = 1;
        let u = sub3(p[b], p[a]);
        let key = |i: usize| dot3(sub3(p[i], p[a]), u);
        let lo = (0..p.len()).min_by_key(|&i| key(i)).unwrap();
        let hi = (0..p.len()).max_by_key(|&i| key(i)).unwrap();
        let mut v = vec![pts[lo].clone(), pts[hi].clone()];
        v.sort();
        poly.vertices = v;
        return;
    };
    let Some(d) = (0..p.len()).find(|&i| orient3(p[a], p[b], p[c], p[i]) != 0) else {
        // Coplanar: drop a coordinate along which the plane projects injectively.
        poly.affine_dim = 2;
        let nrm = cross3(sub3(p[b], p[a]), sub3(p[c], p[a]));
        let k = (0..3).find(|&k| nrm[k] != 0).unwrap();
        let keep: Vec<usize> = (0..3).filter(|&j| j != k).collect();
        let mut proj: Vec<([i64; 2], usize)> =
            (0..p.len()).map(|i| ([p[i][keep[0]], p[i][keep[1]]], i)).collect();
        proj.sort();
        let xy: Vec<[i64; 2]> = proj.iter().map(|x| x.0).collect();
        let mut v: Vec<LatticePoint> = monotone_chain(&xy)
            .into_iter()
            .map(|h| pts[proj[h].1].clone())
            .collect();
        v.sort();
        poly.vertices = v;
        return;
    };

    poly.affine_dim = 3;
    // Triangles oriented so that (b-a)x(c-a) points outward.
    let mut faces: Vec<[usize; 3]> = Vec::new();
    let tet = [a, b, c, d];
    for skip in 0..4 {
        let tri: Vec<usize> = (0..4).filter(|&k| k != skip).map(|k| tet[k]).collect();
        let (x, y, z) = (tri[0], tri[1], tri[2]);
        if orient3(p[x], p[y], p[z], p[tet[skip]]) > 0 {
            faces.push([x, z, y]);
        } else {
            faces.push([x, y, z]);
        }
    }
    for i in 0..p.len() {
        if tet.contains(&i) {
            continue;
        }
        let visible: Vec<bool> = faces
            .iter()
            .map(|f| orient3(p[f[0]], p[f[1]], p[f[2]], p[i]) > 0)
            .collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut vis_edges: HashSet<(usize, usize)> = HashSet::new();
        for (f, _) in faces.iter().zip(&visible).filter(|(_, &v)| v) {
            for k in 0..3 {
                vis_edges.insert((f[k], f[(k + 1) % 3]));
            }
        }
        let mut next: Vec<[usize; 3]> = Vec::with_capacity(faces.len() + 4);
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for (f, &v) in faces.iter().zip(&visible) {
            if !v {
                next.push(*f);
                continue;
            }
            for k in 0..3 {
                let e = (f[k], f[(k + 1) % 3]);
                if !vis_edges.contains(&(e.1, e.0)) {
                    horizon.push(e);
                }
            }
        }
        for (u, w) in horizon {
            next.push([u, w, i]);
        }
        faces = next;
    }

    // Merge coplanar triangles into facets keyed by inward primitive normal.
    let mut facet_map: BTreeMap<[i64; 3], i64> = BTreeMap::new();
    let mut six_volume: i128 = 0;
    let origin = p[a];
    for f in &faces {
        six_volume += orient3(origin, p[f[0]], p[f[1]], p[f[2]]);
        let out = cross3(sub3(p[f[1]], p[f[0]]), sub3(p[f[2]], p[f[0]]));
        let inward = primitive(&[-out[0], -out[1], -out[2]]).expect("nondegenerate triangle");
        let n3 = [inward[0], inward[1], inward[2]];
        facet_map.insert(n3, dot3(n3, p[f[0]]) as i64);
    }
    poly.six_volume = six_volume.abs();

    let mut verts: BTreeSet<LatticePoint> = BTreeSet::new();
    for (&normal, &offset) in &facet_map {
        // Strict polygon of the generators on this facet.
        let k = (0..3).find(|&k| normal[k] != 0).unwrap();
        let keep: Vec<usize> = (0..3).filter(|&j| j != k).collect();
        let mut on: Vec<([i64; 2], usize)> = (0..p.len())
            .filter(|&i| dot3(normal, p[i]) as i64 == offset)
            .map(|i| ([p[i][keep[0]], p[i][keep[1]]], i))
            .collect();
        on.sort();
        let xy: Vec<[i64; 2]> = on.iter().map(|x| x.0).collect();
        for h in monotone_chain(&xy) {
            verts.insert(pts[on[h].1].clone());
        }
        poly.facets3.push(Facet3 { normal, offset });
    }
    poly.vertices = verts.into_iter().collect();
}

/// Minkowski sum `P + Q`: the hull of all pairwise vertex sums.
pub fn minkowski_sum(p: &LatticePolytope, q: &LatticePolytope) -> Result<LatticePolytope> {
    if p.dim != q.dim {
        return Err(Error::DimensionMismatch {
            expected: p.dim,
            found: q.dim,
        });
    }
    let mut sums = BTreeSet::new();
    for a in &p.vertices {
        for b in &q.vertices {
            sums.insert(a.add(b));
        }
    }
    let sums: Vec<_> = sums.into_iter().collect();
    convex_hull(&sums)
}

/// Minkowski sum of a nonempty list of polytopes.
pub fn minkowski_sum_all(polys: &[&LatticePolytope]) -> Result<LatticePolytope> {
    let (first, rest) = polys
        .split_first()
        .ok_or_else(|| Error::Domain("Minkowski sum of an empty family".into()))?;
    let mut acc = (*first).clone();
    for q in rest {
        acc = minkowski_sum(&acc, q)?;
    }
    Ok(acc)
}

/// Lebesgue volume as an exact rational; zero for lower-dimensional hulls.
pub fn volume(p: &LatticePolytope) -> BigRational {
    if !p.is_full_dimensional() {
        return BigRational::zero();
    }
    match p.dim {
        1 => BigRational::from_integer(BigInt::from(
            p.vertices[1].0[0] - p.vertices[0].0[0],
        )),
        2 => {
            let v = &p.vertices;
            let mut twice: i128 = 0;
            for i in 0..v.len() {
                let j = (i + 1) % v.len();
                twice += v[i].0[0] as i128 * v[j].0[1] as i128 - v[j].0[0] as i128 * v[i].0[1] as i128;
            }
            BigRational::new(BigInt::from(twice.abs()), BigInt::from(2))
        }
        3 => BigRational::new(BigInt::from(p.six_volume), BigInt::from(6)),
        _ => unreachable!(),
    }
}

/// Mixed volume of `n` polytopes in `R^n` by the polarization formula
/// `MV = sum over nonempty S of (-1)^(n-|S|) Vol(sum_{j in S} Q_j)`.
pub fn mixed_volume(qs: &[LatticePolytope]) -> Result<BigRational> {
    let n = qs.first().map(|q| q.dim).unwrap_or(0);
    if qs.len() != n || n == 0 {
        return domain(format!(
            "mixed volume needs exactly n polytopes in R^n, got {} in dimension {}",
            qs.len(),
            n
        ));
    }
    if let Some(q) = qs.iter().find(|q| q.dim != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: q.dim,
        });
    }
    let mut total = BigRational::zero();
    for mask in 1u32..(1 << n) {
        let members: Vec<&LatticePolytope> =
            (0..n).filter(|j| mask & (1 << j) != 0).map(|j| &qs[j]).collect();
        let vol = volume(&minkowski_sum_all(&members)?);
        if (n - members.len()).is_multiple_of(2) {
            total += vol;
        } else {
            total -= vol;
        }
    }
    Ok(total)
}

fn check_direction(p: &LatticePolytope, v: &[i64]) -> Result<()> {
    if v.len() != p.dim {
        return Err(Error::DimensionMismatch {
            expected: p.dim,
            found: v.len(),
        });
    }
    if v.iter().all(|&x| x == 0) {
        return domain("direction vector must be nonzero");
    }
    Ok(())
}

/// `s_P(v) = min <q, v>` over the vertices.
pub fn support_value(p: &LatticePolytope, v: &[i64]) -> Result<i64> {
    check_direction(p, v)?;
    Ok(p.vertices.iter().map(|q| q.dot(v)).min().unwrap())
}

/// The face `P^v`: generators attaining the support value.
pub fn face(p: &LatticePolytope, v: &[i64]) -> Result<Face> {
    let s = support_value(p, v)?;
    let normal = primitive(v)?;
    let k = normal.iter().position(|&x| x != 0).unwrap();
    let g = v[k] / normal[k];
    Ok(Face {
        support_value: s / g,
        points: p.points.iter().filter(|q| q.dot(v) == s).cloned().collect(),
        normal,
    })
}

/// Primitive inward facet normals, sorted lexicographically.
pub fn facet_normals(p: &LatticePolytope) -> Result<Vec<Vec<i64>>> {
    if !p.is_full_dimensional() {
        return domain(format!(
            "facet normals need a full-dimensional polytope (affine dimension {} in R^{})",
            p.affine_dim, p.dim
        ));
    }
    let mut normals: Vec<Vec<i64>> = match p.dim {
        1 => vec![vec![-1], vec![1]],
        2 => {
            let v = &p.vertices;
            (0..v.len())
                .map(|i| {
                    let e = v[(i + 1) % v.len()].sub(&v[i]);
                    primitive(&[-e.0[1], e.0[0]]).expect("distinct hull vertices")
                })
                .collect()
        }
        3 => p.facets3.iter().map(|f| f.normal.to_vec()).collect(),
        _ => unreachable!(),
    };
    normals.sort();
    normals.dedup();
    Ok(normals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hull(pts: &[&[i64]]) -> LatticePolytope {
        let v: Vec<LatticePoint> = pts.iter().map(|p| LatticePoint(p.to_vec())).collect();
        convex_hull(&v).unwrap()
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn lp(v: &[i64]) -> LatticePoint {
        LatticePoint(v.to_vec())
    }

    #[test]
    fn hull_of_simplex_generators() {
        let p = hull(&[&[0, 0], &[1, 0], &[0, 1], &[0, 0]]);
        let mut v = p.vertices().to_vec();
        v.sort();
        assert_eq!(v, vec![lp(&[0, 0]), lp(&[0, 1]), lp(&[1, 0])]);
    }

    #[test]
    fn hull_of_collinear_points_is_a_segment() {
        let p = hull(&[&[0, 0], &[2, 0], &[1, 0]]);
        assert_eq!(p.vertices(), &[lp(&[0, 0]), lp(&[2, 0])]);
        assert_eq!(p.affine_dim(), 1);
        assert_eq!(volume(&p), rat(0, 1));
    }

    #[test]
    fn interval_hull() {
        let pts: Vec<LatticePoint> = (0..=4).map(|i| lp(&[i])).collect();
        let p = convex_hull(&pts).unwrap();
        assert_eq!(p.vertices(), &[lp(&[0]), lp(&[4])]);
        assert_eq!(volume(&p), rat(4, 1));
    }

    #[test]
    fn hull_errors() {
        assert!(matches!(convex_hull(&[]), Err(Error::Domain(_))));
        assert!(matches!(
            convex_hull(&[lp(&[0, 0]), lp(&[1])]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(convex_hull(&[lp(&[0, 0, 0, 0])]).is_err());
    }

    #[test]
    fn hull3_drops_interior_and_edge_points() {
        let mut pts = Vec::new();
        for x in 0..=2 {
            for y in 0..=2 {
                for z in 0..=2 {
                    pts.push(lp(&[x, y, z]));
                }
            }
        }
        let p = convex_hull(&pts).unwrap();
        assert_eq!(p.vertices().len(), 8);
        assert_eq!(volume(&p), rat(8, 1));
        assert_eq!(facet_normals(&p).unwrap().len(), 6);
    }

    #[test]
    fn hull3_degenerate_inputs() {
        let planar = hull(&[&[0, 0, 1], &[2, 0, 1], &[0, 2, 1], &[1, 1, 1], &[1, 0, 1]]);
        assert_eq!(planar.affine_dim(), 2);
        assert_eq!(planar.vertices().len(), 3);
        let line = hull(&[&[0, 0, 0], &[1, 1, 1], &[3, 3, 3]]);
        assert_eq!(line.vertices(), &[lp(&[0, 0, 0]), lp(&[3, 3, 3])]);
        let point = hull(&[&[5, 5, 5]]);
        assert_eq!(point.affine_dim(), 0);
    }

    #[test]
    fn minkowski_examples() {
        let s = LatticePolytope::scaled_simplex(2, 1).unwrap();
        let two_s = minkowski_sum(&s, &s).unwrap();
        assert_eq!(two_s.vertices(), LatticePolytope::scaled_simplex(2, 2).unwrap().vertices());

        let square = hull(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let seg = hull(&[&[0, 0], &[1, 0]]);
        let rect = minkowski_sum(&square, &seg).unwrap();
        let mut v = rect.vertices().to_vec();
        v.sort();
        assert_eq!(v, vec![lp(&[0, 0]), lp(&[0, 1]), lp(&[2, 0]), lp(&[2, 1])]);

        let pt = hull(&[&[3, -1]]);
        let moved = minkowski_sum(&square, &pt).unwrap();
        assert_eq!(moved, square.translate(&lp(&[3, -1])).unwrap());

        assert!(minkowski_sum(&square, &hull(&[&[1]])).is_err());
    }

    #[test]
    fn volume_examples() {
        assert_eq!(volume(&LatticePolytope::scaled_simplex(2, 3).unwrap()), rat(9, 2));
        assert_eq!(volume(&hull(&[&[0, 0], &[1, 1]])), rat(0, 1));
        assert_eq!(volume(&hull(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])), rat(1, 1));
        assert_eq!(volume(&LatticePolytope::scaled_simplex(3, 2).unwrap()), rat(8, 6));
    }

    #[test]
    fn mixed_volume_examples() {
        let t = LatticePolytope::scaled_simplex(2, 3).unwrap();
        assert_eq!(mixed_volume(&[t.clone(), t]).unwrap(), rat(9, 1));

        let square = hull(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let seg = hull(&[&[0, 0], &[1, 0]]);
        assert_eq!(mixed_volume(&[square, seg]).unwrap(), rat(1, 1));

        let tri = hull(&[&[0, 0], &[2, 0], &[0, 2]]);
        let diag = hull(&[&[0, 0], &[1, 1]]);
        assert_eq!(mixed_volume(&[tri, diag]).unwrap(), rat(4, 1));

        let s3 = LatticePolytope::scaled_simplex(3, 2).unwrap();
        assert_eq!(mixed_volume(&[s3.clone(), s3.clone(), s3.clone()]).unwrap(), rat(8, 1));
        assert!(mixed_volume(&[s3.clone(), s3]).is_err());
    }

    #[test]
    fn support_and_faces() {
        let s = LatticePolytope::scaled_simplex(2, 1).unwrap();
        assert_eq!(support_value(&s, &[1, 0]).unwrap(), 0);
        assert_eq!(support_value(&s, &[-1, -1]).unwrap(), -1);
        let pt = hull(&[&[5, 5]]);
        assert_eq!(support_value(&pt, &[2, -7]).unwrap(), 5 * (2 - 7));
        assert!(support_value(&s, &[0, 0]).is_err());

        let d = 4;
        let ds = LatticePolytope::scaled_simplex(2, d).unwrap();
        let f = face(&ds, &[1, 0]).unwrap();
        let expected: Vec<_> = (0..=d as i64).map(|t| lp(&[0, t])).collect();
        assert_eq!(f.points, expected);
        let f = face(&ds, &[-1, -1]).unwrap();
        assert!(f.points.iter().all(|p| p.norm1() == d as i64));
        assert_eq!(f.points.len(), d as usize + 1);
        let f = face(&ds, &[-2, -2]).unwrap();
        assert_eq!(f.normal, vec![-1, -1]);
        assert_eq!(f.support_value, -(d as i64));

        let square = hull(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(face(&square, &[1, 1]).unwrap().points, vec![lp(&[0, 0])]);
    }

    #[test]
    fn facet_normal_examples() {
        let ds = LatticePolytope::scaled_simplex(2, 3).unwrap();
        assert_eq!(facet_normals(&ds).unwrap(), vec![vec![-1, -1], vec![0, 1], vec![1, 0]]);
        let square = hull(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(
            facet_normals(&square).unwrap(),
            vec![vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0]]
        );
        let ds3 = LatticePolytope::scaled_simplex(3, 2).unwrap();
        assert_eq!(
            facet_normals(&ds3).unwrap(),
            vec![vec![-1, -1, -1], vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]
        );
        assert_eq!(
            facet_normals(&LatticePolytope::scaled_simplex(1, 5).unwrap()).unwrap(),
            vec![vec![-1], vec![1]]
        );
        assert!(facet_normals(&hull(&[&[0, 0], &[1, 1]])).is_err());
    }

    fn arb_polytope(n: usize) -> impl Strategy<Value = LatticePolytope> {
        prop::collection::vec(prop::collection::vec(0i64..=5, n), 1..8)
            .prop_map(|pts| convex_hull(&pts.into_iter().map(LatticePoint).collect::<Vec<_>>()).unwrap())
    }

    fn arb_family(n: usize) -> impl Strategy<Value = Vec<LatticePolytope>> {
        prop::collection::vec(arb_polytope(n), n)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn mixed_volume_is_symmetric(qs in prop_oneof![arb_family(2), arb_family(3)]) {
            let base = mixed_volume(&qs).unwrap();
            let mut rev = qs.clone();
            rev.reverse();
            prop_assert_eq!(&base, &mixed_volume(&rev).unwrap());
            let mut rot = qs.clone();
            rot.rotate_left(1);
            prop_assert_eq!(&base, &mixed_volume(&rot).unwrap());
        }

        #[test]
        fn mixed_volume_is_multilinear(qs in prop_oneof![arb_family(2), arb_family(3)], extra in prop_oneof![arb_polytope(2), arb_polytope(3)]) {
            prop_assume!(extra.dim() == qs.len());
            let mut sum = qs.clone();
            sum[0] = minkowski_sum(&qs[0], &extra).unwrap();
            let mut other = qs.clone();
            other[0] = extra;
            prop_assert_eq!(
                mixed_volume(&sum).unwrap(),
                mixed_volume(&qs).unwrap() + mixed_volume(&other).unwrap()
            );
        }

        #[test]
        fn mixed_volume_of_copies(q in prop_oneof![arb_polytope(2), arb_polytope(3)]) {
            let n = q.dim();
            let fact: i64 = (1..=n as i64).product();
            let copies = vec![q.clone(); n];
            prop_assert_eq!(
                mixed_volume(&copies).unwrap(),
                volume(&q) * BigRational::from_integer(fact.into())
            );
        }

        #[test]
        fn translation_invariance(qs in prop_oneof![arb_family(2), arb_family(3)], shift in prop::collection::vec(-4i64..=4, 3)) {
            let n = qs.len();
            let b = LatticePoint(shift[..n].to_vec());
            let moved: Vec<_> = qs.iter().map(|q| q.translate(&b).unwrap()).collect();
            prop_assert_eq!(volume(&qs[0]), volume(&moved[0]));
            prop_assert_eq!(mixed_volume(&qs).unwrap(), mixed_volume(&moved).unwrap());
        }

        #[test]
        fn facet_normals_support_generators(q in prop_oneof![arb_polytope(2), arb_polytope(3)]) {
            prop_assume!(q.is_full_dimensional());
            for v in facet_normals(&q).unwrap() {
                let s = support_value(&q, &v).unwrap();
                prop_assert!(q.points().iter().all(|p| p.dot(&v) >= s));
                let f = face(&q, &v).unwrap();
                prop_assert!(f.points.len() >= q.dim());
                prop_assert!(f.points.iter().all(|p| p.dot(&v) == s && q.points().contains(p)));
            }
        }

        #[test]
        fn vertices_are_exactly_the_essential_generators(q in prop_oneof![arb_polytope(2), arb_polytope(3)]) {
            for p in q.points() {
                let rest: Vec<_> = q.points().iter().filter(|x| *x != p).cloned().collect();
                if rest.is_empty() { continue; }
                let smaller = convex_hull(&rest).unwrap();
                let is_vertex = q.vertices().contains(p);
                prop_assert_eq!(is_vertex, smaller.vertices() != q.vertices());
            }
        }
    }

    #[test]
    fn simplex_facet_count() {
        for n in 1..=3 {
            for d in 1..=4 {
                let s = LatticePolytope::scaled_simplex(n, d).unwrap();
                assert_eq!(facet_normals(&s).unwrap().len(), n + 1);
            }
        }
    }
}
