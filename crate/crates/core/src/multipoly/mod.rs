//! Sparse multivariate polynomials over [`CycloRational`].
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], whose ordering is graded
//! lexicographic (lower degree first; within a degree, larger exponents on lower
//! variable indices first). Zero coefficients are never stored.

mod text;
mod vars;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::cyclotomic::CycloRational;
use crate::error::{Error, Result};

pub use text::{parse_poly, write_poly};
pub use vars::{Layout, VarTable};

/// A power product `∏ x_v^{e_v}` with every stored exponent positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    powers: Vec<(usize, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { powers: Vec::new() }
    }

    pub fn var(v: usize) -> Self {
        Monomial {
            powers: vec![(v, 1)],
        }
    }

    /// Build from `(variable, exponent)` pairs in any order; repeated variables add up
    /// and zero exponents are dropped.
    pub fn from_powers(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut map: BTreeMap<usize, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_default() += e;
        }
        Monomial {
            powers: map.into_iter().filter(|&(_, e)| e > 0).collect(),
        }
    }

    /// Multilinear monomial over the given variables.
    pub fn from_vars(vars: impl IntoIterator<Item = usize>) -> Self {
        Self::from_powers(vars.into_iter().map(|v| (v, 1)))
    }

    pub fn powers(&self) -> &[(usize, u32)] {
        &self.powers
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.powers.iter().map(|&(v, _)| v)
    }

    pub fn degree(&self) -> usize {
        self.powers.iter().map(|&(_, e)| e as usize).sum()
    }

    pub fn exponent(&self, v: usize) -> u32 {
        self.powers
            .binary_search_by_key(&v, |&(w, _)| w)
            .map(|i| self.powers[i].1)
            .unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn is_multilinear(&self) -> bool {
        self.powers.iter().all(|&(_, e)| e == 1)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.powers.last().map(|&(v, _)| v)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.powers.len() + other.powers.len());
        let (mut i, mut j) = (0, 0);
        while i < self.powers.len() && j < other.powers.len() {
            let (a, b) = (self.powers[i], other.powers[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.powers[i..]);
        out.extend_from_slice(&other.powers[j..]);
        Monomial { powers: out }
    }

    /// Lower the exponent of `v` by one; returns the old exponent, or `None` if `v`
    /// does not occur.
    fn differentiate(&self, v: usize) -> Option<(u32, Monomial)> {
        let idx = self.powers.binary_search_by_key(&v, |&(w, _)| w).ok()?;
        let mut powers = self.powers.clone();
        let e = powers[idx].1;
        if e == 1 {
            powers.remove(idx);
        } else {
            powers[idx].1 -= 1;
        }
        Some((e, Monomial { powers }))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (a, b) in self.powers.iter().zip(&other.powers) {
                if a.0 != b.0 {
                    // the lower-index variable is present only in the smaller key
                    return a.0.cmp(&b.0);
                }
                if a.1 != b.1 {
                    return b.1.cmp(&a.1);
                }
            }
            self.powers.len().cmp(&other.powers.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `nvars` variables with cyclotomic-rational coefficients.
///
/// Equality compares the term maps only; the declared universe size is metadata.
#[derive(Clone, Debug, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, CycloRational>,
    nvars: usize,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for MultiPoly {}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            terms: BTreeMap::new(),
            nvars,
        }
    }

    pub fn constant(c: CycloRational, nvars: usize) -> Self {
        Self::from_terms(nvars, [(Monomial::one(), c)])
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(CycloRational::one(), nvars)
    }

    pub fn var(v: usize, nvars: usize) -> Self {
        assert!(v < nvars, "variable {v} outside universe of size {nvars}");
        Self::from_terms(nvars, [(Monomial::var(v), CycloRational::one())])
    }

    /// Collects terms, summing duplicates and dropping zeros. Panics if a variable
    /// index is not below `nvars`.
    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, CycloRational)>,
    ) -> Self {
        let mut p = MultiPoly::zero(nvars);
        for (m, c) in terms {
            if let Some(v) = m.max_var() {
                assert!(v < nvars, "variable {v} outside universe of size {nvars}");
            }
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: CycloRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Same terms in a different declared universe.
    pub fn with_nvars(mut self, nvars: usize) -> Result<Self> {
        if let Some(v) = self.max_var() {
            if v >= nvars {
                return Err(Error::DimensionMismatch(format!(
                    "variable {v} does not fit in a universe of {nvars} variables"
                )));
            }
        }
        self.nvars = nvars;
        Ok(self)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &CycloRational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> CycloRational {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(CycloRational::zero)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.keys().filter_map(Monomial::max_var).max()
    }

    /// Variables that occur in some term.
    pub fn support(&self) -> BTreeSet<usize> {
        self.terms.keys().flat_map(|m| m.vars()).collect()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(Monomial::is_multilinear)
    }

    /// The constant term, i.e. the value at the origin.
    pub fn constant_term(&self) -> CycloRational {
        self.coefficient(&Monomial::one())
    }

    /// Least common multiple of the coefficient field orders (1 for the zero polynomial).
    pub fn coefficient_order(&self) -> u64 {
        use num_integer::Integer;
        self.terms.values().fold(1, |acc, c| acc.lcm(&c.order()))
    }

    pub fn scale(&self, c: &CycloRational) -> MultiPoly {
        MultiPoly::from_terms(
            self.nvars,
            self.terms.iter().map(|(m, a)| (m.clone(), a * c)),
        )
    }

    fn add_ref(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.nvars = self.nvars.max(other.nvars);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn mul_ref(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars.max(other.nvars));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        (0..e).fold(MultiPoly::one(self.nvars), |acc, _| &acc * self)
    }

    /// Formal partial derivative with respect to variable `v`.
    pub fn partial_derivative(&self, v: usize) -> MultiPoly {
        debug_assert!(v < self.nvars || self.nvars == 0 || self.support().is_empty());
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            if let Some((e, dm)) = m.differentiate(v) {
                out.add_term(
                    dm,
                    c.scale(&num_rational::BigRational::from_integer(e.into())),
                );
            }
        }
        out
    }

    /// Apply `∂/∂v` for each listed variable in turn. Terms that cannot survive the
    /// whole sequence are discarded up front.
    pub fn derivative_sequence(&self, vars: &[usize]) -> MultiPoly {
        let mut need: BTreeMap<usize, u32> = BTreeMap::new();
        for &v in vars {
            *need.entry(v).or_default() += 1;
        }
        let filtered = MultiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| need.iter().all(|(&v, &k)| m.exponent(v) >= k))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
            nvars: self.nvars,
        };
        vars.iter()
            .fold(filtered, |acc, &v| acc.partial_derivative(v))
    }

    /// Evaluate at a point; variables missing from `point` are taken to be zero.
    pub fn evaluate(&self, point: &BTreeMap<usize, CycloRational>) -> CycloRational {
        let mut acc = CycloRational::zero();
        'terms: for (m, c) in &self.terms {
            let mut val = c.clone();
            for &(v, e) in m.powers() {
                match point.get(&v) {
                    Some(x) if !x.is_zero() => {
                        if !x.is_one() {
                            val = &val * &x.pow(e as u64);
                        }
                    }
                    _ => continue 'terms,
                }
            }
            acc = acc + val;
        }
        acc
    }

    /// Evaluate at a dense point, one value per variable index.
    pub fn evaluate_dense(&self, point: &[CycloRational]) -> CycloRational {
        let map = point
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (i, x.clone()))
            .collect();
        self.evaluate(&map)
    }

    /// Substitute constants for the variables in `fixings`, then rename variables by
    /// `relabel`. Variables in neither map keep their index.
    ///
    /// The result's universe is just large enough for its surviving variables; use
    /// [`MultiPoly::with_nvars`] to declare a different one.
    pub fn restrict_and_relabel(
        &self,
        fixings: &BTreeMap<usize, CycloRational>,
        relabel: &BTreeMap<usize, usize>,
    ) -> Result<MultiPoly> {
        if let Some(v) = fixings.keys().find(|v| relabel.contains_key(v)) {
            return Err(Error::InvalidRelabelling(format!(
                "variable {v} is both fixed and relabelled"
            )));
        }
        let mut targets = BTreeSet::new();
        for (&from, &to) in relabel {
            if !targets.insert(to) {
                return Err(Error::InvalidRelabelling(format!(
                    "variable {from} relabelled onto already-used index {to}"
                )));
            }
        }
        let kept: BTreeSet<usize> = self
            .support()
            .into_iter()
            .filter(|v| !fixings.contains_key(v) && !relabel.contains_key(v))
            .collect();
        if let Some(v) = kept.intersection(&targets).next() {
            return Err(Error::InvalidRelabelling(format!(
                "relabel target {v} collides with a surviving variable"
            )));
        }

        let mut out = MultiPoly::zero(0);
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut powers = Vec::with_capacity(m.powers().len());
            for &(v, e) in m.powers() {
                if let Some(x) = fixings.get(&v) {
                    coeff = &coeff * &x.pow(e as u64);
                } else {
                    powers.push((relabel.get(&v).copied().unwrap_or(v), e));
                }
            }
            out.add_term(Monomial::from_powers(powers), coeff);
        }
        out.nvars = out.max_var().map_or(0, |v| v + 1);
        Ok(out)
    }
}

macro_rules! forward_poly_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                $body(self, rhs)
            }
        }
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                $body(&self, &rhs)
            }
        }
    };
}

forward_poly_binop!(Add, add, |a: &MultiPoly, b: &MultiPoly| a.add_ref(b));
forward_poly_binop!(Sub, sub, |a: &MultiPoly, b: &MultiPoly| a.add_ref(&-b));
forward_poly_binop!(Mul, mul, |a: &MultiPoly, b: &MultiPoly| a.mul_ref(b));

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
            nvars: self.nvars,
        }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let table = VarTable::vector('x', self.nvars);
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}")?;
            for &(v, e) in m.powers() {
                write!(f, "*{}", table.name(v))?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}
