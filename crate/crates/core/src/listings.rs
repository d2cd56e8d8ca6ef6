//! Additive listings: polynomials whose monomial support lists the YES instances of
//! a Boolean function.
//!
//! Vector-input listings live in variables `a_0..a_{n-1}`. Matrix-input listings
//! live in the `n²` variables `a_{i,j}`, flattened row-major as `n·i + j`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use itertools::Itertools;

use crate::cyclotomic::CycloRational;
use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::multipoly::{Monomial, MultiPoly};

/// Caps on the size of expanded listings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_terms: u128,
    /// Apply the fixed per-builder bounds on `n` in addition to `max_terms`.
    pub enforce_n_caps: bool,
}

pub const DEFAULT_MAX_TERMS: u128 = 100_000;
pub const MAX_TERMS_ENV: &str = "DIFFCOMP_MAX_TERMS";

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_terms: DEFAULT_MAX_TERMS,
            enforce_n_caps: true,
        }
    }
}

impl Limits {
    /// Default limits, unless `DIFFCOMP_MAX_TERMS` is set: then that value becomes the
    /// only cap.
    pub fn from_env() -> Self {
        match std::env::var(MAX_TERMS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u128>().ok())
        {
            Some(max_terms) => Limits {
                max_terms,
                enforce_n_caps: false,
            },
            None => Limits::default(),
        }
    }

    fn check(&self, what: &str, n: usize, n_cap: usize, terms: u128) -> Result<()> {
        if (self.enforce_n_caps && n > n_cap) || terms > self.max_terms {
            return Err(Error::SizeCap(format!(
                "{what} listing for n = {n} has {terms} terms (limit {}{})",
                self.max_terms,
                if self.enforce_n_caps {
                    format!(", n <= {n_cap}")
                } else {
                    String::new()
                }
            )));
        }
        Ok(())
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, |acc, k| acc.saturating_mul(k))
}

fn power(n: usize) -> u128 {
    (0..n).fold(1u128, |acc, _| acc.saturating_mul(n as u128))
}

/// Index of a bit vector in the big-endian enumeration of `{0,1}^n`.
pub fn lex_index(bits: &[bool]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
}

/// Inverse of [`lex_index`].
pub fn lex_bits(index: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| (index >> (n - 1 - i)) & 1 == 1).collect()
}

pub const MAX_ARITY: usize = 63;

/// A Boolean function given by its YES instances, each carrying a phase `k` so that
/// the listing coefficient is `ω_m^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    arity: usize,
    order: u64,
    yes: BTreeMap<u64, u64>,
}

impl TruthTable {
    pub fn new(arity: usize, order: u64) -> Result<Self> {
        if arity > MAX_ARITY {
            return Err(Error::Domain(format!("arity {arity} exceeds {MAX_ARITY}")));
        }
        if order == 0 {
            return Err(Error::Domain("order must be positive".into()));
        }
        Ok(TruthTable {
            arity,
            order,
            yes: BTreeMap::new(),
        })
    }

    /// Binary table (`m = 1`) from a predicate on bit vectors.
    pub fn from_predicate(arity: usize, pred: impl Fn(&[bool]) -> bool) -> Result<Self> {
        let mut t = TruthTable::new(arity, 1)?;
        for idx in 0..(1u64 << arity) {
            if pred(&lex_bits(idx, arity)) {
                t.yes.insert(idx, 0);
            }
        }
        Ok(t)
    }

    /// Binary table whose YES set is given by lex indices.
    pub fn from_lex_indices(arity: usize, indices: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut t = TruthTable::new(arity, 1)?;
        for idx in indices {
            t.insert_lex(idx, 0)?;
        }
        Ok(t)
    }

    pub fn insert(&mut self, bits: &[bool], phase: u64) -> Result<()> {
        if bits.len() != self.arity {
            return Err(Error::DimensionMismatch(format!(
                "instance of length {} for arity {}",
                bits.len(),
                self.arity
            )));
        }
        self.insert_lex(lex_index(bits), phase)
    }

    fn insert_lex(&mut self, idx: u64, phase: u64) -> Result<()> {
        if self.arity < 64 && idx >> self.arity != 0 {
            return Err(Error::Domain(format!("instance {idx} out of range")));
        }
        self.yes.insert(idx, phase % self.order);
        Ok(())
    }

    /// Replace every phase; `phase_of` receives the lex index of each YES instance.
    pub fn with_phases(mut self, order: u64, phase_of: impl Fn(u64) -> u64) -> Result<Self> {
        if order == 0 {
            return Err(Error::Domain("order must be positive".into()));
        }
        self.order = order;
        for (idx, ph) in self.yes.iter_mut() {
            *ph = phase_of(*idx) % order;
        }
        Ok(self)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn value(&self, bits: &[bool]) -> bool {
        bits.len() == self.arity && self.yes.contains_key(&lex_index(bits))
    }

    pub fn phase(&self, bits: &[bool]) -> Option<u64> {
        self.yes.get(&lex_index(bits)).copied()
    }

    /// YES instances with their phases, in lex order.
    pub fn yes_instances(&self) -> impl Iterator<Item = (Vec<bool>, u64)> + '_ {
        self.yes
            .iter()
            .map(move |(&idx, &ph)| (lex_bits(idx, self.arity), ph))
    }

    pub fn yes_count(&self) -> usize {
        self.yes.len()
    }

    /// Header `n m`, then one `<bitstring> <phase>` line per YES instance.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.arity, self.order);
        for (bits, ph) in self.yes_instances() {
            let b: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
            let _ = writeln!(s, "{b} {ph}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hl, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing `n m` header"))?;
        let nums = parse_usizes(hl, header)?;
        let [n, m] = nums[..] else {
            return Err(Error::parse(hl, "header must be `n m`"));
        };
        let mut t = TruthTable::new(n, m as u64).map_err(|e| Error::parse(hl, e.to_string()))?;
        for (ln, line) in lines {
            let mut parts = line.split_whitespace();
            let bits_str = parts.next().unwrap_or_default();
            let phase: u64 = match parts.next() {
                Some(p) => p.parse().map_err(|_| Error::parse(ln, "bad phase"))?,
                None => return Err(Error::parse(ln, "expected `<bitstring> <phase>`")),
            };
            if parts.next().is_some() {
                return Err(Error::parse(ln, "trailing fields"));
            }
            let bits = parse_bits(bits_str).ok_or_else(|| Error::parse(ln, "bad bitstring"))?;
            if bits.len() != n {
                return Err(Error::parse(ln, format!("expected {n} bits")));
            }
            if m == 1 && phase != 0 {
                return Err(Error::parse(ln, "binary tables carry phase 0"));
            }
            t.insert(&bits, phase)
                .map_err(|e| Error::parse(ln, e.to_string()))?;
        }
        Ok(t)
    }
}

pub(crate) fn parse_bits(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_usizes(line_no: usize, line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::parse(line_no, format!("expected integer, got `{t}`")))
        })
        .collect()
}

/// A function `g: Z_n → Z_n` as its image vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FunctionTable {
    images: Vec<usize>,
}

impl FunctionTable {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if let Some(&bad) = images.iter().find(|&&g| g >= n) {
            return Err(Error::Domain(format!("image {bad} outside Z_{n}")));
        }
        Ok(FunctionTable { images })
    }

    pub fn identity(n: usize) -> Self {
        FunctionTable {
            images: (0..n).collect(),
        }
    }

    pub fn constant(n: usize, c: usize) -> Result<Self> {
        Self::new(vec![c; n])
    }

    /// `x ↦ x + shift mod n`.
    pub fn shift(n: usize, shift: usize) -> Self {
        FunctionTable {
            images: (0..n).map(|i| (i + shift) % n).collect(),
        }
    }

    /// All `n^n` functions in lexicographic order of their image vectors.
    pub fn all(n: usize) -> impl Iterator<Item = FunctionTable> {
        (0..n)
            .map(|_| 0..n)
            .multi_cartesian_product()
            .map(|images| FunctionTable { images })
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// Matrix-variable indices `n·i + g(i)` of the edges `i → g(i)`.
    pub fn edge_vars(&self) -> Vec<usize> {
        let n = self.n();
        self.images
            .iter()
            .enumerate()
            .map(|(i, &g)| n * i + g)
            .collect()
    }

    /// `M_g = ∏ a_{i,g(i)}`.
    pub fn monomial_listing(&self) -> MultiPoly {
        let n = self.n();
        MultiPoly::from_terms(
            n * n,
            [(Monomial::from_vars(self.edge_vars()), CycloRational::one())],
        )
    }

    pub fn to_graph(&self) -> Graph {
        let mut g = Graph::empty(self.n());
        for (i, &j) in self.images.iter().enumerate() {
            g.set_edge(i, j, true);
        }
        g
    }

    /// Header `n`, then the images on one line.
    pub fn to_text(&self) -> String {
        format!("{}\n{}\n", self.n(), self.images.iter().join(" "))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hl, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing `n` header"))?;
        let n = match parse_usizes(hl, header)?[..] {
            [n] => n,
            _ => return Err(Error::parse(hl, "header must be `n`")),
        };
        let mut images = Vec::with_capacity(n);
        let mut last = hl;
        for (ln, line) in lines {
            images.extend(parse_usizes(ln, line)?);
            last = ln;
        }
        if images.len() != n {
            return Err(Error::parse(
                last,
                format!("expected {n} images, got {}", images.len()),
            ));
        }
        FunctionTable::new(images).map_err(|e| Error::parse(last, e.to_string()))
    }
}

/// `P_{F,m} = Σ_{F(b)=1} ω^{phase(b)} ∏ a_i^{b_i}`.
pub fn listing_from_truth_table(t: &TruthTable) -> MultiPoly {
    MultiPoly::from_terms(
        t.arity,
        t.yes_instances().map(|(bits, ph)| {
            let vars = bits.iter().positions(|&b| b);
            (
                Monomial::from_vars(vars),
                CycloRational::root_of_unity(t.order, ph as i64),
            )
        }),
    )
}

/// Recover the truth table (support and phases) of a multilinear listing.
pub fn truth_table_from_listing(p: &MultiPoly, arity: usize, order: u64) -> Result<TruthTable> {
    let mut t = TruthTable::new(arity, order)?;
    for (m, c) in p.terms() {
        if !m.is_multilinear() {
            return Err(Error::Domain("listing is not multilinear".into()));
        }
        let mut bits = vec![false; arity];
        for v in m.vars() {
            if v >= arity {
                return Err(Error::DimensionMismatch(format!(
                    "variable {v} beyond arity {arity}"
                )));
            }
            bits[v] = true;
        }
        let phase = c.root_of_unity_exponent(order).ok_or_else(|| {
            Error::Domain(format!(
                "coefficient {c} is not a root of unity of order {order}"
            ))
        })?;
        t.insert(&bits, phase)?;
    }
    Ok(t)
}

/// `Σ_{f: Z_n → Z_n} ∏_i a_{i,f(i)}`, fully expanded.
pub fn listing_functional_graphs(n: usize, limits: &Limits) -> Result<MultiPoly> {
    limits.check("functional-graph", n, 6, power(n))?;
    Ok(MultiPoly::from_terms(
        n * n,
        FunctionTable::all(n).map(|f| (Monomial::from_vars(f.edge_vars()), CycloRational::one())),
    ))
}

fn permutation_sign(perm: &[usize]) -> i64 {
    let inversions = (0..perm.len())
        .flat_map(|i| (i + 1..perm.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| perm[i] > perm[j])
        .count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn permutation_listing(n: usize, signed: bool) -> MultiPoly {
    let m = if signed { 2 } else { 1 };
    MultiPoly::from_terms(
        n * n,
        (0..n).permutations(n).map(|perm| {
            let phase = if signed && permutation_sign(&perm) < 0 {
                1
            } else {
                0
            };
            let f = FunctionTable { images: perm };
            (
                Monomial::from_vars(f.edge_vars()),
                CycloRational::root_of_unity(m, phase),
            )
        }),
    )
}

/// `Per(A)`: the binary listing of permutation matrices.
pub fn listing_permanent(n: usize, limits: &Limits) -> Result<MultiPoly> {
    limits.check("permanent", n, 7, factorial(n))?;
    Ok(permutation_listing(n, false))
}

/// `Det(A)`: the listing of permutation matrices with exponent parameter two.
pub fn listing_determinant(n: usize, limits: &Limits) -> Result<MultiPoly> {
    limits.check("determinant", n, 7, factorial(n))?;
    Ok(permutation_listing(n, true))
}

/// Sum of the edge listings of all conjugates `σGσ⁻¹`, each distinct edge set once.
pub fn listing_graph_isomorphism(g: &Graph, limits: &Limits) -> Result<MultiPoly> {
    let n = g.n();
    limits.check("isomorphism", n, 6, factorial(n))?;
    let edges = g.edges();
    let classes: BTreeSet<Vec<usize>> = (0..n)
        .permutations(n)
        .map(|sigma| {
            let mut conj: Vec<usize> = edges
                .iter()
                .map(|&(i, j)| n * sigma[i] + sigma[j])
                .collect();
            conj.sort_unstable();
            conj
        })
        .collect();
    Ok(MultiPoly::from_terms(
        n * n,
        classes
            .into_iter()
            .map(|vars| (Monomial::from_vars(vars), CycloRational::one())),
    ))
}

/// Listing of the constant functions: `Σ_j ∏_i a_{i,j}`.
pub fn listing_constant_functions(n: usize) -> MultiPoly {
    MultiPoly::from_terms(
        n * n,
        (0..n).map(|j| {
            (
                Monomial::from_vars((0..n).map(|i| n * i + j)),
                CycloRational::one(),
            )
        }),
    )
}

/// Listing of the cyclic group generated by `x ↦ x + 1`: `Σ_j ∏_i a_{i,i+j mod n}`.
pub fn listing_cyclic_group(n: usize) -> MultiPoly {
    MultiPoly::from_terms(
        n * n,
        (0..n).map(|j| {
            (
                Monomial::from_vars(FunctionTable::shift(n, j).edge_vars()),
                CycloRational::one(),
            )
        }),
    )
}

/// One factor `(y_i - (1 - b_i)) / (2 b_i - 1)` of a Lagrange basis product: `y_i`
/// when `bit` is set, `1 - y_i` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LagrangeFactor {
    pub var: usize,
    pub bit: bool,
}

impl LagrangeFactor {
    fn expand(&self, nvars: usize) -> MultiPoly {
        let y = MultiPoly::var(self.var, nvars);
        if self.bit {
            y
        } else {
            MultiPoly::one(nvars) - y
        }
    }
}

fn require_binary(t: &TruthTable) -> Result<()> {
    if t.order != 1 {
        return Err(Error::Domain(format!(
            "Lagrange interpolation needs a binary table, got order {}",
            t.order
        )));
    }
    Ok(())
}

/// Unexpanded Lagrange interpolant: one factor list per YES instance.
pub fn lagrange_factors(t: &TruthTable) -> Result<Vec<Vec<LagrangeFactor>>> {
    require_binary(t)?;
    Ok(t.yes_instances()
        .map(|(bits, _)| {
            bits.iter()
                .enumerate()
                .map(|(var, &bit)| LagrangeFactor { var, bit })
                .collect()
        })
        .collect())
}

/// The expanded Lagrange interpolant `L_F(y)`.
pub fn lagrange_interpolant(t: &TruthTable) -> Result<MultiPoly> {
    let n = t.arity;
    Ok(lagrange_factors(t)?
        .iter()
        .map(|factors| {
            factors
                .iter()
                .fold(MultiPoly::one(n), |acc, f| &acc * &f.expand(n))
        })
        .fold(MultiPoly::zero(n), |acc, term| &acc + &term))
}

/// Apply the binomial substitutions `(y_i - (1 - b_i)) / (2 b_i - 1) ← a_i^{b_i}` to
/// the factored interpolant, which yields the binary listing.
pub fn binomial_reduction(t: &TruthTable) -> Result<MultiPoly> {
    let n = t.arity;
    Ok(MultiPoly::from_terms(
        n,
        lagrange_factors(t)?.into_iter().map(|factors| {
            let vars = factors.iter().filter(|f| f.bit).map(|f| f.var);
            (Monomial::from_vars(vars), CycloRational::one())
        }),
    ))
}

/// Whether the monomial supports of `p` are exactly the YES instances of `t`.
pub fn monomial_support_equals(p: &MultiPoly, t: &TruthTable) -> bool {
    if !p.is_multilinear() || p.term_count() != t.yes_count() {
        return false;
    }
    p.terms().all(|(m, _)| {
        let mut bits = vec![false; t.arity];
        for v in m.vars() {
            match bits.get_mut(v) {
                Some(b) => *b = true,
                None => return false,
            }
        }
        t.value(&bits)
    })
}
