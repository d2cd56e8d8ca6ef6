//! Exact arithmetic in cyclotomic fields `Q(ω)`, `ω` a primitive `m`-th root of unity.
//!
//! Elements are stored in the power basis `1, ω, …, ω^{φ(m)-1}` of `Q[x]/(Φ_m(x))`
//! with arbitrary-precision rational coordinates. The representation is always fully
//! reduced, so two elements of the same order are equal iff their coordinates are.
//! Elements of different orders are combined inside the field of order `lcm(m₁, m₂)`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `Φ_m` as integer coefficients, lowest degree first.
pub fn cyclotomic_polynomial(m: u64) -> Vec<BigInt> {
    assert!(m >= 1, "cyclotomic order must be positive");
    cached_cyclotomic(m).as_ref().clone()
}

fn cached_cyclotomic(m: u64) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(phi) = cache.lock().unwrap().get(&m) {
        return phi.clone();
    }
    // x^m - 1 divided by every Φ_d with d | m, d < m.
    let mut num = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m.is_multiple_of(d) {
            let divisor = cached_cyclotomic(d);
            num = exact_div_monic(&num, &divisor);
        }
    }
    let phi = Arc::new(num);
    cache.lock().unwrap().insert(m, phi.clone());
    phi
}

/// Exact quotient of `num` by the monic `den` over `Z`; the remainder must vanish.
fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dd;
    let mut quot = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

/// Euler's totient, i.e. the degree of `Φ_m`.
pub fn totient(m: u64) -> usize {
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result as usize
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Reduce a dense rational polynomial modulo `Φ_m`, returning exactly `φ(m)` coordinates.
fn reduce(order: u64, mut poly: Vec<BigRational>) -> Vec<BigRational> {
    let phi = cached_cyclotomic(order);
    let deg = phi.len() - 1;
    if poly.len() > deg {
        for i in (deg..poly.len()).rev() {
            let c = std::mem::take(&mut poly[i]);
            if c.is_zero() {
                continue;
            }
            // x^i = x^{i-deg} * x^deg and x^deg ≡ -(Φ_m - x^deg)
            for j in 0..deg {
                if !phi[j].is_zero() {
                    let t = &c * BigRational::from_integer(phi[j].clone());
                    poly[i - deg + j] -= t;
                }
            }
        }
    }
    poly.resize(deg, BigRational::zero());
    poly
}

/// An exact element of the `order`-th cyclotomic field.
#[derive(Clone, Debug)]
pub struct CycloRational {
    order: u64,
    coeffs: Vec<BigRational>,
}

impl CycloRational {
    /// Build from arbitrary power-basis coordinates (any length); the result is reduced.
    pub fn from_coeffs(order: u64, coeffs: Vec<BigRational>) -> Self {
        assert!(order >= 1, "cyclotomic order must be positive");
        CycloRational {
            order,
            coeffs: reduce(order, coeffs),
        }
    }

    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(big(n))
    }

    pub fn from_rational(q: BigRational) -> Self {
        CycloRational {
            order: 1,
            coeffs: vec![q],
        }
    }

    /// `ω^k` in the field of order `m`, `k` taken modulo `m`.
    pub fn root_of_unity(m: u64, k: i64) -> Self {
        assert!(m >= 1, "cyclotomic order must be positive");
        let e = k.rem_euclid(m as i64) as usize;
        let mut poly = vec![BigRational::zero(); e + 1];
        poly[e] = BigRational::one();
        Self::from_coeffs(m, poly)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Power-basis coordinates; always `totient(order)` long.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Re-express this element in the field of order `target`, which must be a multiple
    /// of the current order.
    pub fn embed(&self, target: u64) -> Self {
        assert!(
            target.is_multiple_of(self.order),
            "cannot embed order {} into order {}",
            self.order,
            target
        );
        if target == self.order {
            return self.clone();
        }
        let stride = (target / self.order) as usize;
        let mut poly = vec![BigRational::zero(); (self.coeffs.len().max(1) - 1) * stride + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[i * stride] = c.clone();
        }
        Self::from_coeffs(target, poly)
    }

    fn unify(&self, other: &Self) -> (Self, Self) {
        if self.order == other.order {
            (self.clone(), other.clone())
        } else {
            let l = self.order.lcm(&other.order);
            (self.embed(l), other.embed(l))
        }
    }

    fn add_ref(&self, other: &Self) -> Self {
        if self.order == other.order {
            let coeffs = self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect();
            return CycloRational {
                order: self.order,
                coeffs,
            };
        }
        let (a, b) = self.unify(other);
        a.add_ref(&b)
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.order != other.order {
            let (a, b) = self.unify(other);
            return a.mul_ref(&b);
        }
        if self.order <= 2 {
            return CycloRational {
                order: self.order,
                coeffs: vec![&self.coeffs[0] * &other.coeffs[0]],
            };
        }
        let n = self.coeffs.len();
        let mut prod = vec![BigRational::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Self::from_coeffs(self.order, prod)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        CycloRational {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = CycloRational::one().embed(self.order);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against `Φ_m`.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero { order: self.order });
        }
        if self.order <= 2 {
            return Ok(CycloRational {
                order: self.order,
                coeffs: vec![self.coeffs[0].recip()],
            });
        }
        let phi: Vec<BigRational> = cached_cyclotomic(self.order)
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let mut r0 = phi;
        let mut r1 = trim(self.coeffs.clone());
        let mut t0: Vec<BigRational> = Vec::new();
        let mut t1: Vec<BigRational> = vec![BigRational::one()];
        while !r1.is_empty() {
            let (q, r) = div_rem(&r0, &r1);
            let t2 = poly_sub(&t0, &poly_mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            t0 = std::mem::replace(&mut t1, t2);
        }
        // Φ_m is irreducible, so the gcd is a nonzero constant.
        if r0.len() != 1 {
            return Err(Error::InternalInconsistency(format!(
                "gcd with cyclotomic polynomial of order {} is not constant",
                self.order
            )));
        }
        let g = r0[0].recip();
        let inv = t0.into_iter().map(|c| c * &g).collect();
        Ok(Self::from_coeffs(self.order, inv))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    /// Approximate complex value with `ω = exp(2πi/m)`. For display only.
    pub fn to_complex(&self) -> (f64, f64) {
        let step = 2.0 * std::f64::consts::PI / self.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(re, im), (k, c)| {
                let v = c.to_f64().unwrap_or(f64::NAN);
                let angle = step * k as f64;
                (re + v * angle.cos(), im + v * angle.sin())
            })
    }

    /// Smallest `k` with `self == ω_m^k`, if the element is an `m`-th root of unity.
    pub fn root_of_unity_exponent(&self, m: u64) -> Option<u64> {
        (0..m).find(|&k| *self == CycloRational::root_of_unity(m, k as i64))
    }
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let zero = BigRational::zero();
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
            .collect(),
    )
}

fn div_rem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    if a.len() < b.len() {
        return (Vec::new(), trim(rem));
    }
    let lead = b[db].recip();
    let mut quot = vec![BigRational::zero(); a.len() - db];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + db] * &lead;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[i + j] -= &c * bj;
        }
        quot[i] = c;
    }
    rem.truncate(db);
    (trim(quot), trim(rem))
}

impl PartialEq for CycloRational {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = self.unify(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloRational {}

impl Default for CycloRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for CycloRational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigRational> for CycloRational {
    fn from(q: BigRational) -> Self {
        Self::from_rational(q)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&CycloRational> for &CycloRational {
            type Output = CycloRational;
            fn $method(self, rhs: &CycloRational) -> CycloRational {
                $body(self, rhs)
            }
        }
        impl $tr<CycloRational> for CycloRational {
            type Output = CycloRational;
            fn $method(self, rhs: CycloRational) -> CycloRational {
                $body(&self, &rhs)
            }
        }
        impl $tr<&CycloRational> for CycloRational {
            type Output = CycloRational;
            fn $method(self, rhs: &CycloRational) -> CycloRational {
                $body(&self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &CycloRational, b: &CycloRational| a
    .add_ref(b));
forward_binop!(Sub, sub, |a: &CycloRational, b: &CycloRational| a
    .add_ref(&-b));
forward_binop!(Mul, mul, |a: &CycloRational, b: &CycloRational| a
    .mul_ref(b));

impl Neg for &CycloRational {
    type Output = CycloRational;
    fn neg(self) -> CycloRational {
        CycloRational {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycloRational {
    type Output = CycloRational;
    fn neg(self) -> CycloRational {
        -&self
    }
}

/// `m:[c0,c1,...]`, each coordinate written as `num/den` in lowest terms.
impl fmt::Display for CycloRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:[", self.order)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}/{}", c.numer(), c.denom())?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed cyclotomic literal: {0}")]
pub struct ParseCycloError(pub String);

pub(crate) fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => BigInt::from_str(s.trim())
            .ok()
            .map(BigRational::from_integer),
    }
}

impl FromStr for CycloRational {
    type Err = ParseCycloError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let err = || ParseCycloError(s.to_string());
        let (order, rest) = s.trim().split_once(':').ok_or_else(err)?;
        let order: u64 = order.trim().parse().map_err(|_| err())?;
        if order == 0 {
            return Err(err());
        }
        let body = rest
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(err)?;
        let coeffs = body
            .split(',')
            .map(|c| parse_rational(c).ok_or_else(err))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if coeffs.len() != totient(order) {
            return Err(err());
        }
        Ok(CycloRational::from_coeffs(order, coeffs))
    }
}
