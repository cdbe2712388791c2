//! Exact resultants over the integers and the exceptional-set classifier.
//!
//! Resultants follow the Sylvester convention: the determinant of the
//! Sylvester matrix with the rows of the first argument on top. Only
//! vanishing matters for classification, so sparse resultants are replaced
//! by Sylvester resultants of the directed polynomials.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{self, facet_normals, primitive, LatticePoint};
use crate::poly::{bigint_to_f64, directed_polynomial, IntPolynomial, PolySystem};

/// Dense univariate integer polynomial; `coeffs[k]` multiplies `x^k`.
/// The highest stored coefficient is nonzero (the zero polynomial is empty).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UnivariateIntPoly {
    coeffs: Vec<BigInt>,
}

impl UnivariateIntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UnivariateIntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        UnivariateIntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        UnivariateIntPoly { coeffs: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * z + bigint_to_f64(c))
    }

    pub fn mul(&self, other: &UnivariateIntPoly) -> UnivariateIntPoly {
        if self.is_zero() || other.is_zero() {
            return UnivariateIntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UnivariateIntPoly::new(out)
    }

    /// gcd of the coefficients (nonnegative).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    fn scale(&self, k: &BigInt) -> UnivariateIntPoly {
        UnivariateIntPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    fn div_exact(&self, k: &BigInt) -> UnivariateIntPoly {
        UnivariateIntPoly::new(
            self.coeffs
                .iter()
                .map(|c| {
                    debug_assert!((c % k).is_zero());
                    c / k
                })
                .collect(),
        )
    }

    /// Converts a polynomial in one variable (nonnegative exponents).
    pub fn from_int_poly(f: &IntPolynomial) -> Result<Self> {
        if f.nvars() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: f.nvars(),
            });
        }
        let Some(deg) = f.degree() else {
            return Ok(UnivariateIntPoly::zero());
        };
        let mut coeffs = vec![BigInt::zero(); deg as usize + 1];
        for (e, c) in f.laurent_terms() {
            if e.0[0] < 0 {
                return domain("negative exponent in univariate conversion");
            }
            coeffs[e.0[0] as usize] = c.clone();
        }
        Ok(UnivariateIntPoly::new(coeffs))
    }

    pub fn to_int_poly(&self) -> IntPolynomial {
        IntPolynomial::from_terms(
            1,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| (vec![k as i64], c.clone()))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }
}

/// Sylvester matrix with formal degrees `m >= deg f`, `n >= deg g`: `n` rows
/// of `f` coefficients (highest first) followed by `m` rows of `g`.
pub fn sylvester_matrix_formal(
    f: &UnivariateIntPoly,
    m: usize,
    g: &UnivariateIntPoly,
    n: usize,
) -> Result<Vec<Vec<BigInt>>> {
    if f.degree().unwrap_or(0) > m || g.degree().unwrap_or(0) > n {
        return domain("formal degree below actual degree");
    }
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for shift in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for k in 0..=m {
            row[shift + m - k] = f.coeff(k);
        }
        rows.push(row);
    }
    for shift in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for k in 0..=n {
            row[shift + n - k] = g.coeff(k);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Classical Sylvester matrix of `f` and `g` at their actual degrees.
pub fn sylvester_matrix(f: &UnivariateIntPoly, g: &UnivariateIntPoly) -> Result<Vec<Vec<BigInt>>> {
    let (m, n) = (f.degree().unwrap_or(0), g.degree().unwrap_or(0));
    if m == 0 && n == 0 {
        return domain("Sylvester matrix of two constants");
    }
    sylvester_matrix_formal(f, m, g, n)
}

/// Fraction-free (Bareiss) determinant of a square integer matrix.
pub fn determinant(matrix: &[Vec<BigInt>]) -> BigInt {
    let n = matrix.len();
    let mut a: Vec<Vec<BigInt>> = matrix.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    sign * &a[n - 1][n - 1]
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) a mod b`.
fn pseudo_remainder(a: &UnivariateIntPoly, b: &UnivariateIntPoly) -> UnivariateIntPoly {
    let db = b.degree().expect("nonzero divisor");
    let lb = b.leading().unwrap().clone();
    let mut r = a.coeffs.clone();
    let mut e = a.degree().unwrap() as i64 - db as i64 + 1;
    while r.len() > db && !r.is_empty() {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - 1 - db;
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (k, bc) in b.coeffs.iter().enumerate() {
            r[shift + k] -= &lr * bc;
        }
        r.pop();
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
        e -= 1;
    }
    let r = UnivariateIntPoly::new(r);
    if e > 0 {
        r.scale(&num_traits::pow(lb, e as usize))
    } else {
        r
    }
}

/// Resultant at the actual degrees, via the subresultant pseudo-remainder
/// sequence.
///
/// `Res(c, g) = c^deg g` for a nonzero constant `c`; a zero argument gives 0.
pub fn resultant_univariate(f: &UnivariateIntPoly, g: &UnivariateIntPoly) -> Result<BigInt> {
    if f.is_zero() && g.is_zero() {
        return domain("resultant of two zero polynomials");
    }
    if f.is_zero() || g.is_zero() {
        return Ok(BigInt::zero());
    }
    let (df, dg) = (f.degree().unwrap(), g.degree().unwrap());
    if df == 0 {
        return Ok(num_traits::pow(f.coeffs[0].clone(), dg));
    }
    if dg == 0 {
        return Ok(num_traits::pow(g.coeffs[0].clone(), df));
    }
    let (mut a, mut b, mut s) = if df < dg {
        let s = if (df * dg) % 2 == 1 { -1 } else { 1 };
        (g.clone(), f.clone(), s)
    } else {
        (f.clone(), g.clone(), 1)
    };
    let ca = a.content();
    let cb = b.content();
    let t = num_traits::pow(ca.clone(), b.degree().unwrap()) * num_traits::pow(cb.clone(), a.degree().unwrap());
    a = a.div_exact(&ca);
    b = b.div_exact(&cb);
    let mut gg = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let (da, db) = (a.degree().unwrap(), b.degree().unwrap());
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = pseudo_remainder(&a, &b);
        a = b;
        if r.is_zero() {
            return Ok(BigInt::zero());
        }
        b = r.div_exact(&(&gg * num_traits::pow(h.clone(), delta)));
        gg = a.leading().unwrap().clone();
        h = if delta == 0 {
            h
        } else {
            num_traits::pow(gg.clone(), delta) / num_traits::pow(h.clone(), delta - 1)
        };
        if b.degree() == Some(0) {
            let da = a.degree().unwrap();
            let lb = b.coeffs[0].clone();
            let hh = num_traits::pow(lb, da) / num_traits::pow(h, da - 1);
            return Ok(BigInt::from(s) * t * hh);
        }
    }
}

/// Resultant with formal degrees `m >= deg f`, `n >= deg g`: the determinant
/// of [`sylvester_matrix_formal`], computed by peeling vanishing leading
/// coefficients and delegating to [`resultant_univariate`].
pub fn resultant_formal(f: &UnivariateIntPoly, m: usize, g: &UnivariateIntPoly, n: usize) -> Result<BigInt> {
    let df = f.degree();
    let dg = g.degree();
    if df.unwrap_or(0) > m || dg.unwrap_or(0) > n {
        return domain("formal degree below actual degree");
    }
    if m + n == 0 {
        return Ok(BigInt::one());
    }
    let (Some(df), Some(dg)) = (df, dg) else {
        return Ok(BigInt::zero());
    };
    let (kf, kg) = (m - df, n - dg);
    if kf > 0 && kg > 0 {
        return Ok(BigInt::zero());
    }
    let core = if df == 0 && dg == 0 {
        BigInt::one()
    } else {
        resultant_univariate(f, g)?
    };
    if kf > 0 {
        // Expanding along the first column picks g_n with sign (-1)^n.
        let sign = if (n * kf) % 2 == 1 { -1 } else { 1 };
        Ok(BigInt::from(sign) * num_traits::pow(g.leading().unwrap().clone(), kf) * core)
    } else if kg > 0 {
        Ok(num_traits::pow(f.leading().unwrap().clone(), kg) * core)
    } else {
        Ok(core)
    }
}

impl UnivariateIntPoly {
    pub fn derivative(&self) -> UnivariateIntPoly {
        UnivariateIntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    /// Content-free associate with positive leading coefficient.
    pub fn primitive_part(&self) -> UnivariateIntPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.leading().unwrap().is_negative() {
            c = -c;
        }
        self.div_exact(&c)
    }

    /// Exact quotient `self / d` in `Z[x]`; `None` if `d` does not divide.
    pub fn div_polynomial(&self, d: &UnivariateIntPoly) -> Option<UnivariateIntPoly> {
        let dd = d.degree()?;
        if self.is_zero() {
            return Some(UnivariateIntPoly::zero());
        }
        let ds = self.degree().unwrap();
        if ds < dd {
            return None;
        }
        let lc = d.leading().unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); ds - dd + 1];
        for k in (0..=ds - dd).rev() {
            let top = &r[k + dd];
            if !(top % lc).is_zero() {
                return None;
            }
            let t = top / lc;
            for (j, c) in d.coeffs.iter().enumerate() {
                r[k + j] -= &t * c;
            }
            q[k] = t;
        }
        r.iter().all(|c| c.is_zero()).then(|| UnivariateIntPoly::new(q))
    }
}

/// Primitive gcd in `Z[x]` (positive leading coefficient) by the primitive
/// pseudo-remainder sequence.
pub fn gcd_univariate(f: &UnivariateIntPoly, g: &UnivariateIntPoly) -> UnivariateIntPoly {
    let (mut a, mut b) = (f.primitive_part(), g.primitive_part());
    if a.degree() < b.degree() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        let r = pseudo_remainder(&a, &b).primitive_part();
        a = b;
        b = r;
    }
    a
}

const MODULUS: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn reduce_mod(c: &BigInt) -> u64 {
    use num_traits::ToPrimitive;
    c.mod_floor(&BigInt::from(MODULUS)).to_u64().unwrap()
}

/// Degree of `gcd(f mod p, g mod p)` over `F_p`, `p = 2^61 - 1`.
fn gcd_degree_mod_p(f: &[u64], g: &[u64]) -> usize {
    let trim = |mut v: Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    };
    let (mut a, mut b) = (trim(f.to_vec()), trim(g.to_vec()));
    while !b.is_empty() {
        let inv = powmod(*b.last().unwrap(), MODULUS - 2);
        while a.len() >= b.len() {
            let t = mulmod(*a.last().unwrap(), inv);
            let shift = a.len() - b.len();
            for (k, &c) in b.iter().enumerate() {
                a[shift + k] = (a[shift + k] + MODULUS - mulmod(t, c)) % MODULUS;
            }
            a = trim(a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// `f = c * prod_k q_k^k` with squarefree, pairwise coprime primitive `q_k`;
/// returns the nonconstant `(q_k, k)`.
///
/// A squarefree test modulo a large prime settles the generic case without
/// any big-integer gcd.
pub fn squarefree_decomposition(f: &UnivariateIntPoly) -> Vec<(UnivariateIntPoly, usize)> {
    let Some(deg) = f.degree() else {
        return vec![];
    };
    if deg == 0 {
        return vec![];
    }
    let f = f.primitive_part();
    let fm: Vec<u64> = f.coeffs.iter().map(reduce_mod).collect();
    if *fm.last().unwrap() != 0 {
        let dm: Vec<u64> = f.derivative().coeffs.iter().map(reduce_mod).collect();
        if gcd_degree_mod_p(&fm, &dm) == 0 {
            return vec![(f, 1)];
        }
    }
    // Yun's algorithm.
    let df = f.derivative();
    let a0 = gcd_univariate(&f, &df);
    let mut b = f.div_polynomial(&a0).expect("gcd divides f");
    let mut c = df.div_polynomial(&a0).expect("gcd divides f'");
    let mut d = sub(&c, &b.derivative());
    let mut out = Vec::new();
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = gcd_univariate(&b, &d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        b = b.div_polynomial(&a).expect("gcd divides b");
        c = d.div_polynomial(&a).expect("gcd divides d");
        d = sub(&c, &b.derivative());
        i += 1;
    }
    out
}

fn sub(a: &UnivariateIntPoly, b: &UnivariateIntPoly) -> UnivariateIntPoly {
    let n = a.coeffs.len().max(b.coeffs.len());
    UnivariateIntPoly::new((0..n).map(|k| a.coeff(k) - b.coeff(k)).collect())
}

/// Which variable of a bivariate system to eliminate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }

    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }
}

/// `f(x, y)` as a polynomial in `x` whose coefficients are polynomials in `y`,
/// both dense: `rows[i][j]` multiplies `x^i y^j`.
fn coefficient_rows(f: &IntPolynomial) -> Result<Vec<Vec<BigInt>>> {
    if f.is_laurent() {
        return domain("eliminant of a Laurent polynomial with negative exponents");
    }
    let dx = f.degree_in(0).unwrap_or(0) as usize;
    let dy = f.degree_in(1).unwrap_or(0) as usize;
    let mut rows = vec![vec![BigInt::zero(); dy + 1]; dx + 1];
    for (e, c) in f.terms() {
        rows[e.0[0] as usize][e.0[1] as usize] = c.clone();
    }
    Ok(rows)
}

fn specialize(rows: &[Vec<BigInt>], y: &BigInt) -> UnivariateIntPoly {
    UnivariateIntPoly::new(
        rows.iter()
            .map(|r| r.iter().rev().fold(BigInt::zero(), |acc, c| acc * y + c))
            .collect(),
    )
}

/// Integer interpolation nodes `0, 1, -1, 2, -2, ...`.
pub fn symmetric_nodes(count: usize) -> Vec<BigInt> {
    (0..count as i64)
        .map(|k| if k % 2 == 1 { (k + 1) / 2 } else { -(k / 2) })
        .map(BigInt::from)
        .collect()
}

/// Exact interpolation through `(nodes[i], values[i])` by Newton divided
/// differences; the result must have integer coefficients.
pub fn interpolate_integer(nodes: &[BigInt], values: &[BigInt]) -> Result<UnivariateIntPoly> {
    let n = nodes.len();
    let xs: Vec<BigRational> = nodes.iter().map(|x| BigRational::from(x.clone())).collect();
    let mut dd: Vec<BigRational> = values.iter().map(|v| BigRational::from(v.clone())).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    // Expand the Newton form by Horner from the innermost coefficient.
    let mut poly: Vec<BigRational> = vec![];
    for i in (0..n).rev() {
        // poly = poly * (x - xs[i]) + dd[i]
        let mut next = vec![BigRational::zero(); poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * &xs[i];
        }
        next[0] += &dd[i];
        poly = next;
    }
    let mut coeffs = Vec::with_capacity(poly.len());
    for c in poly {
        if !c.is_integer() {
            return domain("interpolated eliminant has a non-integral coefficient");
        }
        coeffs.push(c.to_integer());
    }
    Ok(UnivariateIntPoly::new(coeffs))
}

/// `R(t) = Res_x(f1, f2)` (or `Res_y`), a polynomial in the remaining
/// variable, by exact evaluation at integer nodes and interpolation.
///
/// At every node the Sylvester matrix uses the global degrees in the
/// eliminated variable, so nodes where both leading coefficients vanish
/// still contribute the correct determinant. An identically zero result
/// signals a common factor (non-isolated zeros).
pub fn eliminant_bivariate(f1: &IntPolynomial, f2: &IntPolynomial, eliminate: Axis) -> Result<UnivariateIntPoly> {
    for f in [f1, f2] {
        if f.nvars() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: f.nvars(),
            });
        }
        if f.is_zero() {
            return domain("eliminant of a zero polynomial");
        }
    }
    if eliminate == Axis::Y {
        return eliminant_bivariate(&f1.swap_variables(0, 1), &f2.swap_variables(0, 1), Axis::X);
    }
    let r1 = coefficient_rows(f1)?;
    let r2 = coefficient_rows(f2)?;
    let (m, n) = (r1.len() - 1, r2.len() - 1);
    if m == 0 && n == 0 {
        return domain("neither polynomial involves the eliminated variable");
    }
    let bound = (f1.degree().unwrap() * f2.degree().unwrap()) as usize;
    let nodes = symmetric_nodes(bound + 1);
    let values = nodes
        .iter()
        .map(|y| resultant_formal(&specialize(&r1, y), m, &specialize(&r2, y), n))
        .collect::<Result<Vec<_>>>()?;
    interpolate_integer(&nodes, &values)
}

/// Facet normals of the Minkowski sum of the Newton polytopes; empty when
/// the sum is not full-dimensional.
pub fn system_facet_normals(polys: &[IntPolynomial]) -> Result<Vec<Vec<i64>>> {
    let hulls = polys
        .iter()
        .map(|p| geometry::convex_hull(&crate::poly::support(p)?))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<_> = hulls.iter().collect();
    let sum = geometry::minkowski_sum_all(&refs)?;
    if !sum.is_full_dimensional() {
        return Ok(vec![]);
    }
    facet_normals(&sum)
}

fn check_square(polys: &[IntPolynomial], op: &'static str) -> Result<usize> {
    let n = polys.len();
    if n == 0 {
        return domain("empty system");
    }
    if let Some(p) = polys.iter().find(|p| p.nvars() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.nvars(),
        });
    }
    if polys.iter().any(|p| p.is_zero()) {
        return domain("system contains the zero polynomial");
    }
    if n > 2 {
        return Err(Error::UnsupportedDimension { op, n });
    }
    Ok(n)
}

fn directed_resultant_unchecked(polys: &[IntPolynomial], v: &[i64]) -> Result<BigInt> {
    let directed = polys
        .iter()
        .map(|p| directed_polynomial(p, v))
        .collect::<Result<Vec<_>>>()?;
    if polys.len() == 1 {
        return Ok(directed[0].poly.coeff(&LatticePoint::zero(0)));
    }
    let g1 = UnivariateIntPoly::from_int_poly(&directed[0].poly)?;
    let g2 = UnivariateIntPoly::from_int_poly(&directed[1].poly)?;
    if g1.degree() == Some(0) && g2.degree() == Some(0) {
        return Ok(BigInt::one());
    }
    resultant_univariate(&g1, &g2)
}

/// Resultant of the directed system `(f_1^v, ..., f_n^v)` for `n <= 2`.
///
/// `n = 1` gives the face coefficient; `n = 2` the resultant of the two
/// directed univariate polynomials. Directions that are not facet normals of
/// the Minkowski sum of supports give 1.
pub fn directional_resultant(polys: &[IntPolynomial], v: &[i64]) -> Result<BigInt> {
    let n = check_square(polys, "directional_resultant")?;
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    let v = primitive(v)?;
    if !system_facet_normals(polys)?.contains(&v) {
        return Ok(BigInt::one());
    }
    directed_resultant_unchecked(polys, &v)
}

/// One facet direction of a [`DirectionalReport`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionalEntry {
    pub normal: Vec<i64>,
    pub resultant: BigInt,
    pub is_zero: bool,
}

/// Exact membership test for the exceptional set: a vanishing facet
/// resultant or a common zero with a zero coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionalReport {
    pub seed: u64,
    pub trial: u64,
    pub entries: Vec<DirectionalEntry>,
    /// Entry `i`: the system restricted to `x_i = 0` has a common root.
    pub zero_coordinate: Vec<bool>,
    pub exceptional: bool,
}

/// Wire form: `res_v` maps `"v1,v2"` to a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionalRecord {
    pub res_v: BTreeMap<String, String>,
    pub zero_coord: Vec<bool>,
    pub exceptional: bool,
}

impl DirectionalReport {
    pub fn to_record(&self) -> DirectionalRecord {
        DirectionalRecord {
            res_v: self
                .entries
                .iter()
                .map(|e| {
                    let key = e.normal.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
                    (key, e.resultant.to_string())
                })
                .collect(),
            zero_coord: self.zero_coordinate.clone(),
            exceptional: self.exceptional,
        }
    }

    pub fn any_zero_resultant(&self) -> bool {
        self.entries.iter().any(|e| e.is_zero)
    }
}

fn have_common_root(a: &UnivariateIntPoly, b: &UnivariateIntPoly) -> Result<bool> {
    Ok(match (a.degree(), b.degree()) {
        (None, None) => true,
        (None, Some(d)) | (Some(d), None) => d >= 1,
        _ => resultant_univariate(a, b)?.is_zero(),
    })
}

/// Classifies a system of dimension 1 or 2 against the exceptional set.
pub fn classify_exceptional(system: &PolySystem) -> Result<DirectionalReport> {
    let polys = &system.polys;
    let n = check_square(polys, "classify_exceptional")?;
    let entries = system_facet_normals(polys)?
        .into_iter()
        .map(|v| {
            let r = directed_resultant_unchecked(polys, &v)?;
            Ok(DirectionalEntry {
                is_zero: r.is_zero(),
                normal: v,
                resultant: r,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let zero_coordinate = if n == 1 {
        vec![polys[0].coeff(&LatticePoint::zero(1)).is_zero()]
    } else {
        (0..2)
            .map(|i| {
                let restricted: Vec<UnivariateIntPoly> = polys
                    .iter()
                    .map(|p| {
                        let q = p.substitute(i, &BigInt::zero()).drop_variable(i);
                        UnivariateIntPoly::from_int_poly(&q)
                    })
                    .collect::<Result<_>>()?;
                have_common_root(&restricted[0], &restricted[1])
            })
            .collect::<Result<Vec<_>>>()?
    };
    let exceptional = entries.iter().any(|e| e.is_zero) || zero_coordinate.iter().any(|&z| z);
    Ok(DirectionalReport {
        seed: system.seed,
        trial: system.trial,
        entries,
        zero_coordinate,
        exceptional,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{hash_words, sample_bernoulli_system};
    use proptest::prelude::*;

    fn up(c: &[i64]) -> UnivariateIntPoly {
        UnivariateIntPoly::from_i64(c)
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn bivariate(terms: &[((i64, i64), i64)]) -> IntPolynomial {
        IntPolynomial::from_terms(2, terms.iter().map(|&((a, b), c)| (vec![a, b], c))).unwrap()
    }

    /// Degree of the gcd over Q by the plain Euclidean algorithm on rationals.
    fn rational_gcd_degree(f: &UnivariateIntPoly, g: &UnivariateIntPoly) -> usize {
        let to_q = |p: &UnivariateIntPoly| -> Vec<BigRational> {
            p.coeffs().iter().map(|c| BigRational::from(c.clone())).collect()
        };
        let (mut a, mut b) = (to_q(f), to_q(g));
        while !b.is_empty() {
            while a.len() >= b.len() {
                let q = a.last().unwrap() / b.last().unwrap();
                let shift = a.len() - b.len();
                for (k, c) in b.iter().enumerate() {
                    a[shift + k] -= &q * c;
                }
                a.pop();
                while a.last().is_some_and(|c| c.is_zero()) {
                    a.pop();
                }
            }
            std::mem::swap(&mut a, &mut b);
        }
        a.len() - 1
    }

    #[test]
    fn sylvester_examples() {
        let m = sylvester_matrix(&up(&[-2, 1]), &up(&[-3, 1])).unwrap();
        assert_eq!(m, vec![vec![big(1), big(-2)], vec![big(1), big(-3)]]);
        assert_eq!(determinant(&m), big(-1));

        let m = sylvester_matrix(&up(&[-1, 0, 1]), &up(&[-1, 1])).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(determinant(&m), big(0));

        let x = up(&[0, 1]);
        assert_eq!(determinant(&sylvester_matrix(&x, &x).unwrap()), big(0));
        assert!(sylvester_matrix(&up(&[3]), &up(&[5])).is_err());
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(resultant_univariate(&up(&[-2, 1]), &up(&[-3, 1])).unwrap(), big(-1));
        assert_eq!(resultant_univariate(&up(&[-1, 0, 1]), &up(&[-1, 1])).unwrap(), big(0));
        assert_eq!(resultant_univariate(&up(&[1, 0, 1]), &up(&[-1, 0, 1])).unwrap(), big(4));
        assert_eq!(resultant_univariate(&up(&[3]), &up(&[1, 2, 1])).unwrap(), big(9));
        assert_eq!(resultant_univariate(&up(&[1, 2, 1]), &up(&[-2])).unwrap(), big(4));
        assert_eq!(resultant_univariate(&UnivariateIntPoly::zero(), &up(&[1, 1])).unwrap(), big(0));
        assert!(resultant_univariate(&UnivariateIntPoly::zero(), &UnivariateIntPoly::zero()).is_err());
    }

    #[test]
    fn determinant_of_small_matrices() {
        assert_eq!(determinant(&[]), big(1));
        assert_eq!(determinant(&[vec![big(7)]]), big(7));
        // Needs a pivot swap.
        let m = vec![vec![big(0), big(2)], vec![big(3), big(4)]];
        assert_eq!(determinant(&m), big(-6));
    }

    fn random_poly(words: &[u64], deg: usize, range: i64) -> UnivariateIntPoly {
        let mut c: Vec<i64> = (0..=deg)
            .map(|k| {
                let mut w = words.to_vec();
                w.push(k as u64);
                (hash_words(&w) % (2 * range as u64 + 1)) as i64 - range
            })
            .collect();
        if c[deg] == 0 {
            c[deg] = 1;
        }
        up(&c)
    }

    #[test]
    fn vanishing_matches_rational_gcd_on_planted_pairs() {
        let mut planted_zero = 0;
        for case in 0..1000u64 {
            let plant = case % 2 == 0;
            let pick = |salt: u64, hi: usize| (hash_words(&[case, salt]) % (hi as u64 + 1)) as usize;
            let (f, mut g) = if plant {
                let h = random_poly(&[case, 1], 1 + pick(1, 2), 4);
                let room = 8 - h.degree().unwrap();
                let a = random_poly(&[case, 2], pick(2, room), 4);
                let b = random_poly(&[case, 3], pick(3, room), 4);
                (a.mul(&h), b.mul(&h))
            } else {
                (random_poly(&[case, 2], pick(2, 8), 4), random_poly(&[case, 3], pick(3, 8), 4))
            };
            if f.degree() == Some(0) && g.degree() == Some(0) {
                g = up(&[1, 1]);
            }
            let r = resultant_univariate(&f, &g).unwrap();
            let gcd_deg = rational_gcd_degree(&f, &g);
            assert_eq!(r.is_zero(), gcd_deg >= 1, "case {case}: f={f:?} g={g:?}");
            if plant {
                assert!(r.is_zero());
                planted_zero += 1;
            }
            let det = determinant(&sylvester_matrix(&f, &g).unwrap());
            assert_eq!(r, det, "case {case}: PRS and Sylvester disagree");
        }
        assert_eq!(planted_zero, 500);
    }

    #[test]
    fn formal_resultant_matches_padded_sylvester() {
        for case in 0..300u64 {
            let df = (hash_words(&[case, 1]) % 5) as usize;
            let dg = (hash_words(&[case, 2]) % 5) as usize;
            let f = random_poly(&[case, 3], df, 3);
            let g = random_poly(&[case, 4], dg, 3);
            let m = df + (hash_words(&[case, 5]) % 3) as usize;
            let n = dg + (hash_words(&[case, 6]) % 3) as usize;
            if m + n == 0 {
                continue;
            }
            let det = determinant(&sylvester_matrix_formal(&f, m, &g, n).unwrap());
            assert_eq!(resultant_formal(&f, m, &g, n).unwrap(), det, "f={f:?} m={m} g={g:?} n={n}");
        }
    }

    #[test]
    fn eliminant_examples() {
        // x^2 + y^2 - 5, xy - 2: solutions (1,2),(2,1),(-1,-2),(-2,-1).
        let f1 = bivariate(&[((2, 0), 1), ((0, 2), 1), ((0, 0), -5)]);
        let f2 = bivariate(&[((1, 1), 1), ((0, 0), -2)]);
        let r = eliminant_bivariate(&f1, &f2, Axis::X).unwrap();
        assert_eq!(r.degree(), Some(4));
        for y in [-2, -1, 1, 2] {
            assert!(r.eval(&big(y)).is_zero());
        }
        assert!(!r.eval(&big(0)).is_zero());

        let r = eliminant_bivariate(&bivariate(&[((1, 0), 1), ((0, 1), -1)]), &bivariate(&[((1, 0), 1), ((0, 1), 1)]), Axis::X)
            .unwrap();
        assert_eq!(r.degree(), Some(1));
        assert!(r.coeff(0).is_zero());

        let f = bivariate(&[((1, 1), 1), ((0, 0), 3), ((2, 0), -1)]);
        assert!(eliminant_bivariate(&f, &f, Axis::X).unwrap().is_zero());
        assert!(eliminant_bivariate(&f, &f, Axis::Y).unwrap().is_zero());
    }

    #[test]
    fn eliminant_handles_node_degree_drops() {
        // Leading x-coefficients y and y-1 both vanish nowhere simultaneously,
        // but each vanishes at a node.
        let f1 = bivariate(&[((1, 1), 1), ((0, 0), 1)]);
        let f2 = bivariate(&[((1, 1), 1), ((1, 0), -1), ((0, 1), 1)]);
        let r = eliminant_bivariate(&f1, &f2, Axis::X).unwrap();
        for y in -4..=4 {
            let direct = determinant(
                &sylvester_matrix_formal(&specialize(&coefficient_rows(&f1).unwrap(), &big(y)), 1, &specialize(&coefficient_rows(&f2).unwrap(), &big(y)), 1)
                    .unwrap(),
            );
            assert_eq!(r.eval(&big(y)), direct);
        }
    }

    #[test]
    fn eliminant_degree_is_bezout_for_generic_bernoulli() {
        for trial in 0..4 {
            let s = sample_bernoulli_system(2, 4, 17, trial).unwrap();
            let rep = classify_exceptional(&s).unwrap();
            if rep.any_zero_resultant() {
                continue;
            }
            let r = eliminant_bivariate(&s.polys[0], &s.polys[1], Axis::X).unwrap();
            assert_eq!(r.degree(), Some(16));
        }
    }

    #[test]
    fn directional_examples() {
        for seed in 0..8 {
            let s = sample_bernoulli_system(1, 7, seed, 0).unwrap();
            let up = directional_resultant(&s.polys, &[1]).unwrap();
            let down = directional_resultant(&s.polys, &[-1]).unwrap();
            assert!(up.abs().is_one() && down.abs().is_one());
            assert_eq!(up, s.polys[0].coeff(&LatticePoint::from([0])));
            assert_eq!(down, s.polys[0].coeff(&LatticePoint::from([7])));
        }

        // Equal e1-faces: f1 = f2 on the x2-axis.
        let f1 = bivariate(&[((0, 0), 1), ((0, 1), 1), ((0, 2), -1), ((1, 0), 1), ((2, 0), 1), ((1, 1), -1)]);
        let f2 = bivariate(&[((0, 0), 1), ((0, 1), 1), ((0, 2), -1), ((1, 0), -1), ((2, 0), 1), ((1, 1), 1)]);
        assert_eq!(directional_resultant(&[f1.clone(), f2.clone()], &[1, 0]).unwrap(), big(0));
        assert_eq!(directional_resultant(&[f1.clone(), f2.clone()], &[1, 1]).unwrap(), big(1));
        assert_eq!(directional_resultant(&[f1.clone(), f2.clone()], &[2, -1]).unwrap(), big(1));

        let three = sample_bernoulli_system(3, 2, 1, 1).unwrap();
        assert!(matches!(
            directional_resultant(&three.polys, &[1, 0, 0]),
            Err(Error::UnsupportedDimension { n: 3, .. })
        ));
        assert!(matches!(classify_exceptional(&three), Err(Error::UnsupportedDimension { .. })));
    }

    #[test]
    fn classifier_examples() {
        for seed in 0..16 {
            let s = sample_bernoulli_system(1, 5, seed, 3).unwrap();
            let rep = classify_exceptional(&s).unwrap();
            assert!(!rep.exceptional);
            assert_eq!(rep.entries.iter().map(|e| e.normal.clone()).collect::<Vec<_>>(), vec![vec![-1], vec![1]]);
        }

        let f1 = bivariate(&[((0, 0), 1), ((1, 0), 1), ((0, 1), 1)]);
        let f2 = bivariate(&[((0, 0), -1), ((1, 0), 1), ((0, 1), 1)]);
        let rep = classify_exceptional(&PolySystem::new(2, 1, vec![f1.clone(), f2]).unwrap()).unwrap();
        assert!(rep.exceptional);
        let diag = rep.entries.iter().find(|e| e.normal == vec![-1, -1]).unwrap();
        assert!(diag.is_zero);

        let f3 = bivariate(&[((0, 0), 1), ((1, 0), 1), ((0, 1), -1)]);
        let rep = classify_exceptional(&PolySystem::new(2, 1, vec![f1, f3]).unwrap()).unwrap();
        assert!(rep.exceptional);
        assert_eq!(rep.zero_coordinate, vec![false, true]);
        // With dense supports the x2 = 0 restriction is the e2 face.
        let e2 = rep.entries.iter().find(|e| e.normal == vec![0, 1]).unwrap();
        assert!(e2.is_zero);
        let record = serde_json::to_value(rep.to_record()).unwrap();
        assert_eq!(record["res_v"]["-1,-1"], "2");
    }

    #[test]
    fn classifier_is_invariant_under_relabeling() {
        for trial in 0..40 {
            let s = sample_bernoulli_system(2, 2, 5, trial).unwrap();
            let rep = classify_exceptional(&s).unwrap();
            let mut swapped = s.clone();
            swapped.polys.reverse();
            assert_eq!(classify_exceptional(&swapped).unwrap().exceptional, rep.exceptional);

            let mut xy = s.clone();
            xy.polys = s.polys.iter().map(|p| p.swap_variables(0, 1)).collect();
            let rep_xy = classify_exceptional(&xy).unwrap();
            assert_eq!(rep_xy.exceptional, rep.exceptional);
            for e in &rep.entries {
                let v = vec![e.normal[1], e.normal[0]];
                let twin = rep_xy.entries.iter().find(|t| t.normal == v).unwrap();
                assert_eq!(twin.is_zero, e.is_zero);
            }
            assert_eq!(rep_xy.zero_coordinate, vec![rep.zero_coordinate[1], rep.zero_coordinate[0]]);
        }
    }

    #[test]
    fn squarefree_decomposition_recovers_powers() {
        let a = up(&[1, 1]); // x + 1
        let b = up(&[-2, 0, 1]); // x^2 - 2
        let c = up(&[3, -1, 2]);
        let f = a.mul(&a).mul(&a).mul(&a).mul(&b).mul(&c).mul(&c).scale(&big(-6));
        let mut dec = squarefree_decomposition(&f);
        dec.sort_by_key(|(_, k)| *k);
        assert_eq!(dec, vec![(b.clone(), 1), (c.clone(), 2), (a.clone(), 4)]);
        assert_eq!(squarefree_decomposition(&b.mul(&c)), vec![(b.mul(&c), 1)]);
        assert!(squarefree_decomposition(&up(&[5])).is_empty());
        assert_eq!(gcd_univariate(&a.mul(&b), &a.mul(&c)), a);
    }

    fn arb_up(max_deg: usize) -> impl Strategy<Value = UnivariateIntPoly> {
        prop::collection::vec(-6i64..=6, 1..=max_deg + 1).prop_map(|mut c| {
            let last = c.len() - 1;
            if c[last] == 0 {
                c[last] = 1;
            }
            up(&c)
        })
    }

    proptest! {
        #[test]
        fn swap_sign_law(f in arb_up(8), g in arb_up(8)) {
            let (df, dg) = (f.degree().unwrap(), g.degree().unwrap());
            prop_assume!(df + dg > 0);
            let sign = if (df * dg) % 2 == 1 { big(-1) } else { big(1) };
            prop_assert_eq!(resultant_univariate(&f, &g).unwrap(), sign * resultant_univariate(&g, &f).unwrap());
        }

        #[test]
        fn multiplicative_in_second_argument(f in arb_up(5), g in arb_up(5), h in arb_up(5)) {
            let lhs = resultant_univariate(&f, &g.mul(&h)).unwrap();
            let rhs = resultant_univariate(&f, &g).unwrap() * resultant_univariate(&f, &h).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn prs_matches_bareiss(f in arb_up(10), g in arb_up(10)) {
            prop_assume!(f.degree().unwrap() + g.degree().unwrap() > 0);
            prop_assert_eq!(
                resultant_univariate(&f, &g).unwrap(),
                determinant(&sylvester_matrix(&f, &g).unwrap())
            );
        }

        #[test]
        fn interpolation_recovers_polynomials(p in arb_up(12), extra in 0usize..4) {
            let nodes = symmetric_nodes(p.degree().unwrap() + 1 + extra);
            let values: Vec<BigInt> = nodes.iter().map(|x| p.eval(x)).collect();
            prop_assert_eq!(interpolate_integer(&nodes, &values).unwrap(), p);
        }
    }
}
