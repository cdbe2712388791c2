//! Exact multivariate integer polynomials and random Bernoulli systems.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{self, is_primitive, simplex_lattice_points, LatticePoint};

/// Multivariate polynomial `x^offset * sum_J a_J x^J` with exact integer
/// coefficients. Stored exponents are nonnegative; any Laurent shift lives in
/// `offset`. No stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    nvars: usize,
    terms: BTreeMap<LatticePoint, BigInt>,
    offset: LatticePoint,
}

impl IntPolynomial {
    pub fn zero(nvars: usize) -> Self {
        IntPolynomial {
            nvars,
            terms: BTreeMap::new(),
            offset: LatticePoint::zero(nvars),
        }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs. Repeated
    /// exponents are summed; negative exponents are absorbed into the offset.
    pub fn from_terms<E, C>(nvars: usize, terms: impl IntoIterator<Item = (E, C)>) -> Result<Self>
    where
        E: Into<LatticePoint>,
        C: Into<BigInt>,
    {
        let mut map: BTreeMap<LatticePoint, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            let e = e.into();
            if e.dim() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: e.dim(),
                });
            }
            *map.entry(e).or_insert_with(BigInt::zero) += c.into();
        }
        map.retain(|_, c| !c.is_zero());
        let mut offset = vec![0i64; nvars];
        for e in map.keys() {
            for (o, &x) in offset.iter_mut().zip(&e.0) {
                *o = (*o).min(x);
            }
        }
        let terms = if offset.iter().all(|&o| o == 0) {
            map
        } else {
            let shift = LatticePoint(offset.clone());
            map.into_iter().map(|(e, c)| (e.sub(&shift), c)).collect()
        };
        Ok(IntPolynomial {
            nvars,
            terms,
            offset: LatticePoint(offset),
        })
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        IntPolynomial::from_terms(nvars, [(LatticePoint::zero(nvars), c.into())]).unwrap()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn offset(&self) -> &LatticePoint {
        &self.offset
    }

    /// Terms with stored (offset-free) exponents.
    pub fn terms(&self) -> impl Iterator<Item = (&LatticePoint, &BigInt)> {
        self.terms.iter()
    }

    /// Terms with true exponents, i.e. stored exponent plus offset.
    pub fn laurent_terms(&self) -> impl Iterator<Item = (LatticePoint, &BigInt)> + '_ {
        self.terms.iter().map(|(e, c)| (e.add(&self.offset), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exponent: &LatticePoint) -> BigInt {
        let e = exponent.sub(&self.offset);
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    /// Maximum total degree over the true exponents; `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        self.laurent_terms().map(|(e, _)| e.norm1()).max()
    }

    /// Maximum exponent of variable `k`.
    pub fn degree_in(&self, k: usize) -> Option<i64> {
        self.laurent_terms().map(|(e, _)| e.0[k]).max()
    }

    pub fn is_laurent(&self) -> bool {
        self.offset.0.iter().any(|&o| o != 0)
    }

    /// Substitute an integer value for variable `k`, keeping the variable
    /// count (the variable simply no longer occurs).
    pub fn substitute(&self, k: usize, value: &BigInt) -> IntPolynomial {
        let mut map: BTreeMap<LatticePoint, BigInt> = BTreeMap::new();
        for (e, c) in self.laurent_terms() {
            let p = e.0[k];
            let mut e2 = e.clone();
            e2.0[k] = 0;
            let factor = if p >= 0 {
                num_traits::pow(value.clone(), p as usize)
            } else {
                // Negative powers only make sense for units.
                assert!(value.abs().is_one(), "negative power of a non-unit");
                num_traits::pow(value.clone(), (-p) as usize)
            };
            *map.entry(e2).or_insert_with(BigInt::zero) += c * factor;
        }
        IntPolynomial::from_terms(self.nvars, map).unwrap()
    }

    /// Drop variable `k` (which must not occur).
    pub fn drop_variable(&self, k: usize) -> IntPolynomial {
        let terms = self.laurent_terms().map(|(e, c)| {
            debug_assert_eq!(e.0[k], 0);
            let mut v = e.0;
            v.remove(k);
            (LatticePoint(v), c.clone())
        });
        IntPolynomial::from_terms(self.nvars - 1, terms.collect::<Vec<_>>()).unwrap()
    }

    /// Exchange variables `a` and `b`.
    pub fn swap_variables(&self, a: usize, b: usize) -> IntPolynomial {
        let terms: Vec<_> = self
            .laurent_terms()
            .map(|(mut e, c)| {
                e.0.swap(a, b);
                (e, c.clone())
            })
            .collect();
        IntPolynomial::from_terms(self.nvars, terms).unwrap()
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = ["x", "y", "z", "w"];
        for (i, (e, c)) in self.laurent_terms().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i > 0 || c.is_negative() {
                write!(f, "{sign}")?;
            }
            let mono: Vec<String> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, &p)| p != 0)
                .map(|(k, &p)| {
                    let name = names.get(k).map(|s| s.to_string()).unwrap_or(format!("x{k}"));
                    if p == 1 {
                        name
                    } else {
                        format!("{name}^{p}")
                    }
                })
                .collect();
            let mag = c.abs();
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{mag}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// A point of `C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPoint(pub Vec<Complex64>);

impl ComplexPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return domain("complex point has non-finite coordinates");
        }
        Ok(ComplexPoint(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Serialize for ComplexPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.0.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(d)?;
        Ok(ComplexPoint(
            pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
        ))
    }
}

/// Lossy conversion of an exact integer to `f64` that never overflows to
/// NaN (huge values saturate to infinity).
pub fn bigint_to_f64(c: &BigInt) -> f64 {
    c.to_f64().unwrap_or(if c.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

/// Evaluates `f` at `x` in double precision.
pub fn evaluate(f: &IntPolynomial, x: &ComplexPoint) -> Result<Complex64> {
    if x.dim() != f.nvars {
        return Err(Error::DimensionMismatch {
            expected: f.nvars,
            found: x.dim(),
        });
    }
    Ok(evaluate_unchecked(f, &x.0))
}

pub(crate) fn evaluate_unchecked(f: &IntPolynomial, x: &[Complex64]) -> Complex64 {
    if f.nvars == 1 {
        // Horner in the single variable.
        let z = x[0];
        let mut acc = Complex64::zero();
        let mut prev: Option<i64> = None;
        for (e, c) in f.terms.iter().rev() {
            let p = e.0[0];
            if let Some(q) = prev {
                acc *= z.powi((q - p) as i32);
            }
            acc += bigint_to_f64(c);
            prev = Some(p);
        }
        if let Some(q) = prev {
            acc *= z.powi((q + f.offset.0[0]) as i32);
        }
        return acc;
    }
    let mut acc = Complex64::zero();
    for (e, c) in f.terms.iter() {
        let mut m = Complex64::new(bigint_to_f64(c), 0.0);
        for (z, &p) in x.iter().zip(&e.0) {
            if p != 0 {
                m *= z.powi(p as i32);
            }
        }
        acc += m;
    }
    for (z, &o) in x.iter().zip(&f.offset.0) {
        if o != 0 {
            acc *= z.powi(o as i32);
        }
    }
    acc
}

/// Exponent set of the nonzero terms (true exponents).
pub fn support(f: &IntPolynomial) -> Result<Vec<LatticePoint>> {
    if f.is_zero() {
        return domain("support of the zero polynomial");
    }
    Ok(f.laurent_terms().map(|(e, _)| e).collect())
}

/// `F(t_0, ..., t_n) = t_0^d f(t_1/t_0, ..., t_n/t_0)`.
pub fn homogenize(f: &IntPolynomial, d: u32) -> Result<IntPolynomial> {
    if f.is_laurent() {
        return domain("cannot homogenize a Laurent polynomial with negative exponents");
    }
    if let Some(deg) = f.degree() {
        if deg > d as i64 {
            return domain(format!("degree {deg} exceeds homogenization degree {d}"));
        }
    }
    let terms: Vec<_> = f
        .terms
        .iter()
        .map(|(e, c)| {
            let mut v = Vec::with_capacity(f.nvars + 1);
            v.push(d as i64 - e.norm1());
            v.extend_from_slice(&e.0);
            (LatticePoint(v), c.clone())
        })
        .collect();
    IntPolynomial::from_terms(f.nvars + 1, terms)
}

/// The directed polynomial `f^v` re-expressed in coordinates of `v^perp`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectedPolynomial {
    /// Polynomial in `n - 1` variables: the face terms after translation by
    /// `translation`, written in the lattice basis `basis`.
    pub poly: IntPolynomial,
    /// The translation vector `b` (a point of the face).
    pub translation: LatticePoint,
    /// Integer basis of `Z^n ∩ v^perp`.
    pub basis: Vec<LatticePoint>,
}

/// Integer basis of `v^perp` together with a coordinate map.
///
/// For `n = 2` the basis vector is `±(-v_2, v_1)` with the sign making its
/// last nonzero entry positive; this reproduces "drop the coordinate" for
/// `v = e_m` and `y = x_2 / x_1` for `v = -(e_1 + e_2)`. In higher dimension
/// `v = ±e_m` drops coordinate `m`, `v = -sum e_m` uses `e_{i+1} - e_1`, and
/// other directions fall back to a unimodular completion.
struct PerpBasis {
    basis: Vec<LatticePoint>,
    /// Rows `r_i` with `w = sum_i <r_i, w> basis_i` for every `w` in `v^perp`.
    coords: Vec<Vec<i64>>,
}

impl PerpBasis {
    fn new(v: &[i64]) -> PerpBasis {
        let n = v.len();
        let unit = |k: usize| {
            let mut e = vec![0i64; n];
            e[k] = 1;
            e
        };
        if n == 1 {
            return PerpBasis {
                basis: vec![],
                coords: vec![],
            };
        }
        if n == 2 {
            let mut u = [-v[1], v[0]];
            let last = if u[1] != 0 { u[1] } else { u[0] };
            if last < 0 {
                u = [-u[0], -u[1]];
            }
            // u is primitive with |u|^2 = q; the coordinate is <w,u>/q, which
            // we encode as a pseudo-row and divide afterwards.
            return PerpBasis {
                basis: vec![LatticePoint(u.to_vec())],
                coords: vec![u.to_vec()],
            };
        }
        let nonzero: Vec<usize> = (0..n).filter(|&k| v[k] != 0).collect();
        if nonzero.len() == 1 {
            let m = nonzero[0];
            let keep: Vec<usize> = (0..n).filter(|&k| k != m).collect();
            return PerpBasis {
                basis: keep.iter().map(|&k| LatticePoint(unit(k))).collect(),
                coords: keep.iter().map(|&k| unit(k)).collect(),
            };
        }
        if v.iter().all(|&x| x == -1) {
            let basis = (1..n)
                .map(|i| {
                    let mut e = unit(i);
                    e[0] = -1;
                    LatticePoint(e)
                })
                .collect();
            return PerpBasis {
                basis,
                coords: (1..n).map(unit).collect(),
            };
        }
        // Column operations reducing the row v to a single ±1 entry; the
        // remaining columns of U span v^perp and U^{-1} gives coordinates.
        let mut row = v.to_vec();
        let mut u: Vec<Vec<i64>> = (0..n).map(unit).collect(); // u[r][c]
        let mut uinv: Vec<Vec<i64>> = (0..n).map(unit).collect();
        loop {
            let nz: Vec<usize> = (0..n).filter(|&k| row[k] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let i = *nz.iter().min_by_key(|&&k| row[k].abs()).unwrap();
            for &j in nz.iter().filter(|&&j| j != i) {
                let q = row[j].div_euclid(row[i]);
                // col_j -= q col_i
                row[j] -= q * row[i];
                for ur in u.iter_mut() {
                    ur[j] -= q * ur[i];
                }
                // row_i of U^{-1} += q row_j
                let rj = uinv[j].clone();
                for (a, b) in uinv[i].iter_mut().zip(&rj) {
                    *a += q * b;
                }
            }
        }
        let pivot = (0..n).find(|&k| row[k] != 0).unwrap();
        let cols: Vec<usize> = (0..n).filter(|&k| k != pivot).collect();
        PerpBasis {
            basis: cols
                .iter()
                .map(|&c| LatticePoint((0..n).map(|r| u[r][c]).collect()))
                .collect(),
            coords: cols.iter().map(|&c| uinv[c].clone()).collect(),
        }
    }

    fn coordinates(&self, w: &LatticePoint) -> Vec<i64> {
        if self.basis.len() == 1 && w.dim() == 2 {
            let u = &self.basis[0];
            let q = u.dot(&u.0);
            let t = w.dot(&u.0);
            debug_assert_eq!(t % q, 0);
            return vec![t / q];
        }
        self.coords.iter().map(|r| w.dot(r)).collect()
    }
}

/// Restricts `f` to the face of its support in direction `v` and rewrites it
/// as a polynomial on `v^perp`, translated so that every exponent is
/// nonnegative and each coordinate attains zero.
pub fn directed_polynomial(f: &IntPolynomial, v: &[i64]) -> Result<DirectedPolynomial> {
    let n = f.nvars;
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    if !is_primitive(v) {
        return domain(format!("direction {v:?} is not a primitive nonzero vector"));
    }
    if f.is_zero() {
        return domain("directed polynomial of the zero polynomial");
    }
    let s = f.laurent_terms().map(|(e, _)| e.dot(v)).min().unwrap();
    let face: Vec<(LatticePoint, BigInt)> = f
        .laurent_terms()
        .filter(|(e, _)| e.dot(v) == s)
        .map(|(e, c)| (e, c.clone()))
        .collect();
    let pb = PerpBasis::new(v);
    let p0 = face[0].0.clone();
    let coords: Vec<Vec<i64>> = face.iter().map(|(e, _)| pb.coordinates(&e.sub(&p0))).collect();
    let mins: Vec<i64> = (0..n - 1)
        .map(|k| coords.iter().map(|c| c[k]).min().unwrap())
        .collect();
    let mut b = p0.clone();
    for (m, u) in mins.iter().zip(&pb.basis) {
        for (bi, ui) in b.0.iter_mut().zip(&u.0) {
            *bi += m * ui;
        }
    }
    let terms: Vec<_> = coords
        .into_iter()
        .zip(face)
        .map(|(c, (_, coef))| {
            let e: Vec<i64> = c.iter().zip(&mins).map(|(x, m)| x - m).collect();
            (LatticePoint(e), coef)
        })
        .collect();
    Ok(DirectedPolynomial {
        poly: IntPolynomial::from_terms(n - 1, terms)?,
        translation: b,
        basis: pb.basis,
    })
}

/// `sum |a_J|`, a certified upper bound of the sup norm on the unit torus.
pub fn sup_norm_upper(f: &IntPolynomial) -> BigInt {
    f.terms.values().map(|c| c.abs()).sum()
}

/// Maximum of `|f|` over the `G^n` torus grid `(e^{2 pi i k_1/G}, ...)`:
/// a lower estimate of the sup norm.
pub fn sup_norm_grid(f: &IntPolynomial, grid: usize) -> Result<f64> {
    if grid < 8 {
        return domain(format!("grid size {grid} below the minimum of 8"));
    }
    let n = f.nvars;
    let roots: Vec<Complex64> = (0..grid)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / grid as f64))
        .collect();
    let total = grid.checked_pow(n as u32).ok_or_else(|| Error::Domain("grid too large".into()))?;
    let mut best = 0.0f64;
    let mut x = vec![Complex64::one(); n];
    for idx in 0..total {
        let mut r = idx;
        for z in x.iter_mut() {
            *z = roots[r % grid];
            r /= grid;
        }
        best = best.max(evaluate_unchecked(f, &x).norm());
    }
    Ok(best)
}

/// A square system of `n` polynomials in `n` variables.
///
/// Sampled systems carry their seed and trial id; imported ones may carry
/// arbitrary integer coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem {
    pub n: usize,
    pub d: u32,
    pub seed: u64,
    pub trial: u64,
    pub polys: Vec<IntPolynomial>,
}

impl PolySystem {
    pub fn new(n: usize, d: u32, polys: Vec<IntPolynomial>) -> Result<Self> {
        if polys.len() != n {
            return domain(format!("system of dimension {n} needs {n} polynomials, got {}", polys.len()));
        }
        if let Some(p) = polys.iter().find(|p| p.nvars() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.nvars(),
            });
        }
        Ok(PolySystem {
            n,
            d,
            seed: 0,
            trial: 0,
            polys,
        })
    }

    /// Full support `d Sigma_n` with every coefficient in `{-1, +1}`.
    pub fn is_bernoulli(&self) -> bool {
        let full = simplex_lattice_points(self.n, self.d);
        self.polys.iter().all(|p| {
            !p.is_laurent()
                && p.num_terms() == full.len()
                && full.iter().all(|e| p.coeff(e).abs().is_one())
        })
    }

    /// Newton polytopes of the polynomials.
    pub fn newton_polytopes(&self) -> Result<Vec<geometry::LatticePolytope>> {
        self.polys
            .iter()
            .map(|p| geometry::convex_hull(&support(p)?))
            .collect()
    }

    pub fn to_json(&self) -> SystemJson {
        SystemJson {
            n: self.n,
            d: self.d,
            seed: self.seed,
            trial: self.trial,
            polys: self
                .polys
                .iter()
                .map(|p| {
                    p.laurent_terms()
                        .map(|(e, c)| (e.0, JsonInt::from(c)))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(j: &SystemJson) -> Result<Self> {
        let polys = j
            .polys
            .iter()
            .map(|terms| {
                let parsed: Result<Vec<(LatticePoint, BigInt)>> = terms
                    .iter()
                    .map(|(e, c)| Ok((LatticePoint(e.clone()), c.to_bigint()?)))
                    .collect();
                IntPolynomial::from_terms(j.n, parsed?)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut sys = PolySystem::new(j.n, j.d, polys)?;
        sys.seed = j.seed;
        sys.trial = j.trial;
        Ok(sys)
    }
}

/// Integer coefficient in JSON: a number when it fits in `i64`, otherwise a
/// decimal string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonInt {
    Small(i64),
    Big(String),
}

impl JsonInt {
    pub fn to_bigint(&self) -> Result<BigInt> {
        match self {
            JsonInt::Small(v) => Ok(BigInt::from(*v)),
            JsonInt::Big(s) => s
                .parse()
                .map_err(|_| Error::Domain(format!("invalid integer coefficient {s:?}"))),
        }
    }
}

impl From<&BigInt> for JsonInt {
    fn from(c: &BigInt) -> Self {
        match c.to_i64() {
            Some(v) => JsonInt::Small(v),
            None => JsonInt::Big(c.to_string()),
        }
    }
}

/// Wire format of a polynomial system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemJson {
    pub n: usize,
    pub d: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub trial: u64,
    pub polys: Vec<Vec<(Vec<i64>, JsonInt)>>,
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive hash of a word sequence, used as a counter-based RNG.
pub fn hash_words(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0x243F_6A88_85A3_08D3u64, |h, &w| mix64(h ^ mix64(w)))
}

/// The sign of coefficient `rank` of polynomial `poly` for `(seed, trial)`.
pub fn bernoulli_sign(seed: u64, trial: u64, poly: u64, rank: u64) -> i64 {
    if hash_words(&[seed, trial, poly, rank]) >> 63 == 0 {
        1
    } else {
        -1
    }
}

/// Samples `n` polynomials with full support `d Sigma_n` and independent
/// ±1 coefficients. Coefficient `J` of polynomial `i` depends only on
/// `(seed, trial, i, rank of J)` where ranks follow lexicographic order.
pub fn sample_bernoulli_system(n: usize, d: u32, seed: u64, trial: u64) -> Result<PolySystem> {
    if n == 0 || d == 0 {
        return domain(format!("dimension and degree must be positive (n={n}, d={d})"));
    }
    let support = simplex_lattice_points(n, d);
    let polys = (0..n)
        .map(|i| {
            let terms = support.iter().enumerate().map(|(rank, e)| {
                (e.clone(), BigInt::from(bernoulli_sign(seed, trial, i as u64, rank as u64)))
            });
            IntPolynomial::from_terms(n, terms.collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sys = PolySystem::new(n, d, polys)?;
    sys.seed = seed;
    sys.trial = trial;
    Ok(sys)
}

pub fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(nvars: usize, terms: &[(&[i64], i64)]) -> IntPolynomial {
        IntPolynomial::from_terms(nvars, terms.iter().map(|(e, c)| (e.to_vec(), *c))).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sampling_shapes_and_determinism() {
        let s = sample_bernoulli_system(1, 2, 9, 0).unwrap();
        assert_eq!(s.polys[0].num_terms(), 3);
        assert!(s.is_bernoulli());

        let s = sample_bernoulli_system(2, 3, 11, 4).unwrap();
        assert!(s.polys.iter().all(|p| p.num_terms() == 10));
        assert!(s.is_bernoulli());
        assert_eq!(s, sample_bernoulli_system(2, 3, 11, 4).unwrap());
        assert_ne!(s, sample_bernoulli_system(2, 3, 11, 5).unwrap());

        assert!(sample_bernoulli_system(0, 3, 1, 1).is_err());
        assert!(sample_bernoulli_system(2, 0, 1, 1).is_err());
    }

    #[test]
    fn sign_stream_is_balanced() {
        // Mean of 1e5 signs within 4 sigma (sigma = 1/sqrt(N)).
        let n = 100_000u64;
        for trial in 0..3 {
            let sum: i64 = (0..n).map(|r| bernoulli_sign(7, trial, 0, r)).sum();
            let mean = sum as f64 / n as f64;
            assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "trial {trial}: mean {mean}");
        }
    }

    #[test]
    fn evaluation_examples() {
        let f = poly(2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1)]);
        let v = evaluate(&f, &ComplexPoint(vec![c(1.0, 0.0), c(1.0, 0.0)])).unwrap();
        assert_eq!(v, c(3.0, 0.0));

        let g = poly(1, &[(&[2], 1), (&[0], -1)]);
        let v = evaluate(&g, &ComplexPoint(vec![c(0.0, 1.0)])).unwrap();
        assert!((v - c(-2.0, 0.0)).norm() < 1e-15);

        for n in 1..=3 {
            let d = 4;
            let ones = IntPolynomial::from_terms(
                n,
                simplex_lattice_points(n, d).into_iter().map(|e| (e, 1)),
            )
            .unwrap();
            let v = evaluate(&ones, &ComplexPoint(vec![c(1.0, 0.0); n])).unwrap();
            assert_eq!(v.re, binomial(n as u64 + d as u64, n as u64) as f64);
        }
        assert!(evaluate(&f, &ComplexPoint(vec![c(1.0, 0.0)])).is_err());
    }

    #[test]
    fn support_examples() {
        let f = poly(2, &[(&[0, 0], 1), (&[1, 1], 1)]);
        assert_eq!(
            support(&f).unwrap(),
            vec![LatticePoint::from([0, 0]), LatticePoint::from([1, 1])]
        );
        let s = sample_bernoulli_system(2, 3, 1, 1).unwrap();
        assert_eq!(support(&s.polys[0]).unwrap(), simplex_lattice_points(2, 3));
        assert_eq!(support(&poly(1, &[(&[3], 1)])).unwrap(), vec![LatticePoint::from([3])]);
        assert!(support(&IntPolynomial::zero(2)).is_err());
    }

    #[test]
    fn homogenize_examples() {
        let f = poly(1, &[(&[0], 1), (&[1], 1)]);
        assert_eq!(homogenize(&f, 1).unwrap(), poly(2, &[(&[1, 0], 1), (&[0, 1], 1)]));

        let f = poly(2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 2], 1)]);
        let h = homogenize(&f, 2).unwrap();
        assert_eq!(h, poly(3, &[(&[2, 0, 0], 1), (&[1, 1, 0], 1), (&[0, 0, 2], 1)]));
        assert!(homogenize(&f, 1).is_err());
    }

    #[test]
    fn directed_univariate_faces() {
        let f = poly(1, &[(&[0], 5), (&[1], 1), (&[3], -7)]);
        let up = directed_polynomial(&f, &[1]).unwrap();
        assert_eq!(up.poly, IntPolynomial::constant(0, 5));
        let down = directed_polynomial(&f, &[-1]).unwrap();
        assert_eq!(down.poly, IntPolynomial::constant(0, -7));
        assert_eq!(down.translation, LatticePoint::from([3]));
        assert!(directed_polynomial(&f, &[2]).is_err());
    }

    #[test]
    fn directed_bivariate_faces() {
        let d = 4u32;
        let s = sample_bernoulli_system(2, d, 3, 0).unwrap();
        let f = &s.polys[0];

        let g = directed_polynomial(f, &[1, 0]).unwrap();
        assert_eq!(g.translation, LatticePoint::from([0, 0]));
        let expected = IntPolynomial::from_terms(
            1,
            (0..=d as i64).map(|t| (vec![t], f.coeff(&LatticePoint::from([0, t])))),
        )
        .unwrap();
        assert_eq!(g.poly, expected);

        let g = directed_polynomial(f, &[0, 1]).unwrap();
        let expected = IntPolynomial::from_terms(
            1,
            (0..=d as i64).map(|t| (vec![t], f.coeff(&LatticePoint::from([t, 0])))),
        )
        .unwrap();
        assert_eq!(g.poly, expected);

        // y = x_2 / x_1 with b = (d, 0).
        let g = directed_polynomial(f, &[-1, -1]).unwrap();
        assert_eq!(g.translation, LatticePoint::from([d as i64, 0]));
        let expected = IntPolynomial::from_terms(
            1,
            (0..=d as i64).map(|k| (vec![k], f.coeff(&LatticePoint::from([d as i64 - k, k])))),
        )
        .unwrap();
        assert_eq!(g.poly, expected);
        assert_eq!(g.poly.degree(), Some(d as i64));
    }

    #[test]
    fn directed_coordinate_faces_in_higher_dimension() {
        let (n, d) = (3usize, 3u32);
        let s = sample_bernoulli_system(n, d, 5, 2).unwrap();
        for m in 0..n {
            let mut v = vec![0i64; n];
            v[m] = 1;
            for f in &s.polys {
                let g = directed_polynomial(f, &v).unwrap();
                assert_eq!(g.translation, LatticePoint::zero(n));
                assert_eq!(g.poly.num_terms() as u64, binomial(n as u64 - 1 + d as u64, n as u64 - 1));
                assert!(g.poly.terms().all(|(_, c)| c.abs().is_one()));
            }
        }
        let g = directed_polynomial(&s.polys[0], &[-1, -1, -1]).unwrap();
        assert_eq!(g.translation, LatticePoint::from([d as i64, 0, 0]));
        assert_eq!(g.poly.num_terms(), 10);
        // A generic direction goes through the unimodular fallback.
        let g = directed_polynomial(&s.polys[0], &[2, 3, -1]).unwrap();
        assert_eq!(g.poly.nvars(), 2);
        assert!(g.basis.iter().all(|u| u.dot(&[2, 3, -1]) == 0));
    }

    #[test]
    fn sup_norm_examples() {
        let s = sample_bernoulli_system(2, 5, 1, 1).unwrap();
        assert_eq!(sup_norm_upper(&s.polys[0]), BigInt::from(21));
        assert_eq!(sup_norm_upper(&poly(1, &[(&[2], 3)])), BigInt::from(3));
        assert_eq!(sup_norm_upper(&poly(1, &[(&[0], 1), (&[1], -1)])), BigInt::from(2));

        let d = 6;
        let geo = IntPolynomial::from_terms(1, (0..=d).map(|k| (vec![k], 1))).unwrap();
        assert!((sup_norm_grid(&geo, 16).unwrap() - (d + 1) as f64).abs() < 1e-12);
        assert!((sup_norm_grid(&poly(1, &[(&[1], 1)]), 8).unwrap() - 1.0).abs() < 1e-15);
        assert!(sup_norm_grid(&geo, 4).is_err());
    }

    #[test]
    fn json_round_trip_with_big_coefficients() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let f = IntPolynomial::from_terms(2, [(vec![0, 0], big.clone()), (vec![1, 0], BigInt::from(-3))]).unwrap();
        let g = poly(2, &[(&[0, 1], 1)]);
        let sys = PolySystem::new(2, 1, vec![f, g]).unwrap();
        let text = serde_json::to_string(&sys.to_json()).unwrap();
        assert!(text.contains("\"123456789012345678901234567890\""));
        let back: SystemJson = serde_json::from_str(&text).unwrap();
        assert_eq!(PolySystem::from_json(&back).unwrap(), sys);
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = IntPolynomial> {
        prop::collection::vec((prop::collection::vec(0i64..=4, n), -5i64..=5), 1..8)
            .prop_map(move |t| IntPolynomial::from_terms(n, t).unwrap())
    }

    fn arb_point(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-1.5f64..1.5, -1.5f64..1.5), n)
            .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
    }

    proptest! {
        #[test]
        fn homogenization_dehomogenizes(f in arb_poly(2), x in arb_point(2)) {
            prop_assume!(!f.is_zero());
            let d = f.degree().unwrap() as u32;
            let h = homogenize(&f, d + 1).unwrap();
            let mut hx = vec![Complex64::one()];
            hx.extend_from_slice(&x);
            let a = evaluate_unchecked(&h, &hx);
            let b = evaluate_unchecked(&f, &x);
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm().max(a.norm())) * 100.0);
        }

        #[test]
        fn grid_sup_never_exceeds_coefficient_bound(f in arb_poly(2), g in 8usize..24) {
            prop_assume!(!f.is_zero());
            let upper = bigint_to_f64(&sup_norm_upper(&f));
            prop_assert!(sup_norm_grid(&f, g).unwrap() <= upper * (1.0 + 1e-12));
        }

        #[test]
        fn directed_support_matches_face(f in arb_poly(2), v in prop::sample::select(vec![
            vec![1i64, 0], vec![0, 1], vec![-1, -1], vec![1, -2], vec![-3, 1], vec![2, 5]
        ])) {
            prop_assume!(!f.is_zero());
            let hull = geometry::convex_hull(&support(&f).unwrap()).unwrap();
            let face = geometry::face(&hull, &v).unwrap();
            let g = directed_polynomial(&f, &v).unwrap();
            prop_assert_eq!(g.poly.num_terms(), face.points.len());
            // Mapping back through the basis recovers the face exactly.
            let mut back: Vec<LatticePoint> = g.poly.laurent_terms().map(|(e, _)| {
                let mut p = g.translation.clone();
                for (t, u) in e.0.iter().zip(&g.basis) {
                    for (pi, ui) in p.0.iter_mut().zip(&u.0) { *pi += t * ui; }
                }
                p
            }).collect();
            back.sort();
            prop_assert_eq!(back, face.points);
        }
    }
}
