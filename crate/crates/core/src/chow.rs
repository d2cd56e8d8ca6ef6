//! Chow decompositions
//!
//! A decomposition with `ρ` summands of degree `d` in `n` variables is the hypermatrix
//! `H` of shape `ρ × d × (n+1)` whose slice `H[u][v]` holds the linear form
//! `H[u][v][n] + Σ_w H[u][v][w]·x_w`; it represents `Σ_u ∏_v l_{u,v}`. Slot `n` is
//! the constant term.
//!
//! `ρ` of any verified decomposition bounds the Chow rank from above. Lower bounds
//! come from the rank of the symmetric matrix of a quadratic form (each summand
//! contributes at most two to it) and, for totally non-overlapping polynomials, from
//! restricting to the quadratic case.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_integer::Integer;
use num_rational::BigRational;

use crate::cyclotomic::CycloRational;
use crate::error::{Error, Result};
use crate::linalg::{rank, CycloMatrix};
use crate::listings::{content_lines, parse_usizes, FunctionTable};
use crate::multipoly::{Monomial, MultiPoly};

pub const CHOW_FORMAT_HEADER: &str = "# diffcomp chow v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChowDecomposition {
    rho: usize,
    degree: usize,
    nvars: usize,
    entries: Vec<CycloRational>,
}

impl ChowDecomposition {
    pub fn new(
        rho: usize,
        degree: usize,
        nvars: usize,
        entries: Vec<CycloRational>,
    ) -> Result<Self> {
        let expected = rho * degree * (nvars + 1);
        if entries.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "hypermatrix of shape {rho}×{degree}×{} needs {expected} entries, got {}",
                nvars + 1,
                entries.len()
            )));
        }
        Ok(ChowDecomposition {
            rho,
            degree,
            nvars,
            entries,
        })
    }

    pub fn zeros(rho: usize, degree: usize, nvars: usize) -> Self {
        ChowDecomposition {
            rho,
            degree,
            nvars,
            entries: vec![CycloRational::zero(); rho * degree * (nvars + 1)],
        }
    }

    /// Build from explicit affine linear forms, `forms[u][v]` being `l_{u,v}`.
    pub fn from_forms(nvars: usize, forms: &[Vec<MultiPoly>]) -> Result<Self> {
        let degree = forms.first().map_or(0, Vec::len);
        let mut c = ChowDecomposition::zeros(forms.len(), degree, nvars);
        for (u, summand) in forms.iter().enumerate() {
            if summand.len() != degree {
                return Err(Error::DimensionMismatch(format!(
                    "summand {u} has {} forms, expected {degree}",
                    summand.len()
                )));
            }
            for (v, form) in summand.iter().enumerate() {
                for (m, coeff) in form.terms() {
                    match m.powers() {
                        [] => c.set(u, v, nvars, coeff.clone()),
                        [(w, 1)] if *w < nvars => c.set(u, v, *w, coeff.clone()),
                        _ => {
                            return Err(Error::Domain(format!(
                                "form ({u},{v}) is not an affine linear form in {nvars} variables"
                            )))
                        }
                    }
                }
            }
        }
        Ok(c)
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// `|H| = (n+1)·ρ·d`.
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    fn idx(&self, u: usize, v: usize, w: usize) -> usize {
        assert!(
            u < self.rho && v < self.degree && w <= self.nvars,
            "index out of shape"
        );
        (u * self.degree + v) * (self.nvars + 1) + w
    }

    pub fn get(&self, u: usize, v: usize, w: usize) -> &CycloRational {
        &self.entries[self.idx(u, v, w)]
    }

    pub fn set(&mut self, u: usize, v: usize, w: usize, value: CycloRational) {
        let i = self.idx(u, v, w);
        self.entries[i] = value;
    }

    pub fn constant(&self, u: usize, v: usize) -> &CycloRational {
        self.get(u, v, self.nvars)
    }

    pub fn is_homogeneous(&self) -> bool {
        (0..self.rho).all(|u| (0..self.degree).all(|v| self.constant(u, v).is_zero()))
    }

    pub fn order(&self) -> u64 {
        self.entries.iter().fold(1, |acc, e| acc.lcm(&e.order()))
    }

    /// `l_{u,v}` as a polynomial.
    pub fn form(&self, u: usize, v: usize) -> MultiPoly {
        let mut terms = vec![(Monomial::one(), self.constant(u, v).clone())];
        terms.extend((0..self.nvars).map(|w| (Monomial::var(w), self.get(u, v, w).clone())));
        MultiPoly::from_terms(self.nvars, terms)
    }

    /// Concatenate the summands of two decompositions of equal degree and universe.
    pub fn stack(&self, other: &ChowDecomposition) -> Result<ChowDecomposition> {
        if self.degree != other.degree || self.nvars != other.nvars {
            return Err(Error::DimensionMismatch(
                "stacked decompositions must share degree and variable count".into(),
            ));
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        ChowDecomposition::new(self.rho + other.rho, self.degree, self.nvars, entries)
    }

    pub fn to_text(&self) -> String {
        let m = self.order();
        let mut s = format!(
            "{CHOW_FORMAT_HEADER}\n{} {} {} {}\n",
            self.rho, self.degree, self.nvars, m
        );
        for row in self.entries.chunks(self.nvars + 1) {
            let line: Vec<String> = row.iter().map(|e| e.embed(m).to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hl, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing `rho d n m` header"))?;
        let [rho, degree, nvars, m] = parse_usizes(hl, header)?[..] else {
            return Err(Error::parse(hl, "header must be `rho d n m`"));
        };
        if m == 0 {
            return Err(Error::parse(hl, "order must be positive"));
        }
        let mut entries = Vec::with_capacity(rho * degree * (nvars + 1));
        let mut count = 0;
        for (ln, line) in lines {
            let row = line
                .split_whitespace()
                .map(|t| {
                    let e: CycloRational =
                        t.parse().map_err(|e| Error::parse(ln, format!("{e}")))?;
                    if !(m as u64).is_multiple_of(e.order()) {
                        return Err(Error::parse(ln, "entry order does not divide header order"));
                    }
                    Ok(e)
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != nvars + 1 {
                return Err(Error::parse(ln, format!("expected {} entries", nvars + 1)));
            }
            entries.extend(row);
            count += 1;
        }
        if count != rho * degree {
            return Err(Error::parse(
                hl,
                format!("expected {} form lines, got {count}", rho * degree),
            ));
        }
        ChowDecomposition::new(rho, degree, nvars, entries)
    }
}

/// `Σ_u ∏_v (H[u,v,n] + Σ_w H[u,v,w]·x_w)`, fully expanded.
pub fn expand(c: &ChowDecomposition) -> MultiPoly {
    (0..c.rho)
        .map(|u| (0..c.degree).fold(MultiPoly::one(c.nvars), |acc, v| &acc * &c.form(u, v)))
        .fold(MultiPoly::zero(c.nvars), |acc, s| acc + s)
}

/// Whether `c` expands exactly to `target`.
pub fn verify(c: &ChowDecomposition, target: &MultiPoly) -> bool {
    expand(c) == *target
}

/// Zero every constant slot. For a homogeneous target of degree `d` the inhomogeneous
/// contributions cancel, so the result still expands to the target.
pub fn homogenize(c: &ChowDecomposition, target: &MultiPoly) -> Result<ChowDecomposition> {
    let homogeneous_of_degree =
        target.is_zero() || (target.is_homogeneous() && target.degree() == Some(c.degree));
    if !homogeneous_of_degree {
        return Err(Error::NotHomogeneous { degree: c.degree });
    }
    if !verify(c, target) {
        return Err(Error::Domain(
            "decomposition does not expand to the target".into(),
        ));
    }
    let mut h = c.clone();
    for u in 0..c.rho {
        for v in 0..c.degree {
            h.set(u, v, c.nvars, CycloRational::zero());
        }
    }
    if !verify(&h, target) {
        return Err(Error::InternalInconsistency(
            "homogenized decomposition no longer expands to the target".into(),
        ));
    }
    Ok(h)
}

/// Each term `α ∏ x_w^{e_w}` as one summand of single-variable forms, `α` folded into
/// the first form. Needs a nonzero homogeneous polynomial of positive degree.
pub fn expanded_form_decomposition(p: &MultiPoly) -> Result<ChowDecomposition> {
    let d = match p.degree() {
        Some(d) if d > 0 && p.is_homogeneous() => d,
        _ => return Err(Error::NotApplicable(
            "expanded-form decomposition needs a nonzero homogeneous polynomial of positive degree"
                .into(),
        )),
    };
    let n = p.nvars();
    let mut c = ChowDecomposition::zeros(p.term_count(), d, n);
    for (u, (m, coeff)) in p.terms().enumerate() {
        let vars = m
            .powers()
            .iter()
            .flat_map(|&(w, e)| std::iter::repeat_n(w, e as usize));
        for (v, w) in vars.enumerate() {
            let value = if v == 0 {
                coeff.clone()
            } else {
                CycloRational::one()
            };
            c.set(u, v, w, value);
        }
    }
    Ok(c)
}

/// `ρ = 1` decomposition `∏_i Σ_j a_{i,j}` of the functional-graph listing.
pub fn product_form_functional(n: usize) -> ChowDecomposition {
    let mut c = ChowDecomposition::zeros(1, n, n * n);
    for v in 0..n {
        for j in 0..n {
            c.set(0, v, n * v + j, CycloRational::one());
        }
    }
    c
}

fn require_quadratic_form(p: &MultiPoly) -> Result<()> {
    if !(p.is_zero() || (p.is_homogeneous() && p.degree() == Some(2))) {
        return Err(Error::Domain(
            "expected a homogeneous polynomial of degree 2".into(),
        ));
    }
    Ok(())
}

/// The unique symmetric `A` with `p = xᵀ A x`.
pub fn symmetric_matrix_of(p: &MultiPoly) -> Result<CycloMatrix> {
    require_quadratic_form(p)?;
    let n = p.nvars();
    let half = BigRational::new(1.into(), 2.into());
    let mut a = vec![vec![CycloRational::zero(); n]; n];
    for (m, c) in p.terms() {
        match *m.powers() {
            [(i, 2)] => a[i][i] = c.clone(),
            [(i, 1), (j, 1)] => {
                let h = c.scale(&half);
                a[i][j] = h.clone();
                a[j][i] = h;
            }
            _ => unreachable!("degree-2 monomial"),
        }
    }
    Ok(a)
}

/// `⌈rank(A)/2⌉` for the symmetric matrix `A` of a quadratic form: any homogeneous
/// decomposition with `ρ` summands gives `A = (B + Bᵀ)/2` with `rank B ≤ ρ`.
pub fn degree2_chow_lower_bound(p: &MultiPoly) -> Result<usize> {
    let a = symmetric_matrix_of(p)?;
    Ok(rank(&a).div_ceil(2))
}

/// Relabelling that exhibits a totally non-overlapping polynomial as `P_m`: the `j`-th
/// variable of the `i`-th term goes to `m·i + j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PmWitness {
    pub term_degree: usize,
    pub terms: usize,
    pub relabel: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonOverlap {
    pub non_overlapping: bool,
    pub witness: Option<PmWitness>,
}

/// Multilinear with every variable in at most one term. The witness is present when,
/// additionally, all terms share a degree `m ≥ 2`.
pub fn is_totally_non_overlapping(p: &MultiPoly) -> NonOverlap {
    let mut seen = BTreeSet::new();
    let ok = p.is_multilinear() && p.terms().all(|(m, _)| m.vars().all(|v| seen.insert(v)));
    if !ok {
        return NonOverlap {
            non_overlapping: false,
            witness: None,
        };
    }
    let witness = match p.degree() {
        Some(m) if m >= 2 && p.is_homogeneous() => {
            let relabel = p
                .terms()
                .enumerate()
                .flat_map(|(i, (mono, _))| {
                    mono.vars()
                        .enumerate()
                        .map(move |(j, v)| (v, m * i + j))
                        .collect::<Vec<_>>()
                })
                .collect();
            Some(PmWitness {
                term_degree: m,
                terms: p.term_count(),
                relabel,
            })
        }
        _ => None,
    };
    NonOverlap {
        non_overlapping: true,
        witness,
    }
}

/// `P_m = Σ_i α_i ∏_{j<m} x_{m·i+j}` in `m·n` variables.
pub fn p_m(m: usize, alphas: &[CycloRational]) -> MultiPoly {
    MultiPoly::from_terms(
        m * alphas.len(),
        alphas
            .iter()
            .enumerate()
            .map(|(i, a)| (Monomial::from_vars((0..m).map(|j| m * i + j)), a.clone())),
    )
}

/// Fix `x_{m·i+j} = 1` for `j ≥ 2` and send `x_{m·i+j} ↦ x_{2i+j}` for `j < 2`,
/// taking `P_m` with `n` terms to `P_2`.
pub fn pm_to_p2_maps(
    m: usize,
    n: usize,
) -> (BTreeMap<usize, CycloRational>, BTreeMap<usize, usize>) {
    let mut fix = BTreeMap::new();
    let mut relabel = BTreeMap::new();
    for i in 0..n {
        for j in 0..m {
            if j < 2 {
                if m * i + j != 2 * i + j {
                    relabel.insert(m * i + j, 2 * i + j);
                }
            } else {
                fix.insert(m * i + j, CycloRational::one());
            }
        }
    }
    (fix, relabel)
}

/// Lower bound for a totally non-overlapping polynomial: relabel to `P_m`, restrict to
/// `P_2`, then take the quadratic-form bound.
pub fn certify_non_overlapping_lower_bound(p: &MultiPoly) -> Result<usize> {
    if is_linear_form(p) {
        return Ok(1);
    }
    let w = is_totally_non_overlapping(p).witness.ok_or_else(|| {
        Error::NotApplicable(
            "needs a totally non-overlapping homogeneous polynomial of degree ≥ 2".into(),
        )
    })?;
    let pm = p
        .restrict_and_relabel(&BTreeMap::new(), &w.relabel)?
        .with_nvars(w.term_degree * w.terms)?;
    let (fix, relabel) = pm_to_p2_maps(w.term_degree, w.terms);
    let p2 = pm
        .restrict_and_relabel(&fix, &relabel)?
        .with_nvars(2 * w.terms)?;
    degree2_chow_lower_bound(&p2)
}

fn is_linear_form(p: &MultiPoly) -> bool {
    p.degree() == Some(1) && p.is_homogeneous()
}

/// Chow rank of a totally non-overlapping homogeneous multilinear polynomial: its term
/// count for degree at least two, attained by the expanded-form decomposition. A
/// nonzero linear form has rank 1.
pub fn chow_rank_non_overlapping(p: &MultiPoly) -> Result<(usize, ChowDecomposition)> {
    if is_linear_form(p) {
        return Ok((
            1,
            ChowDecomposition::from_forms(p.nvars(), &[vec![p.clone()]])?,
        ));
    }
    let check = is_totally_non_overlapping(p);
    if check.witness.is_none() {
        return Err(Error::NotApplicable(
            "needs a totally non-overlapping homogeneous multilinear polynomial of degree ≥ 2"
                .into(),
        ));
    }
    let c = expanded_form_decomposition(p)?;
    Ok((p.term_count(), c))
}

/// The depth-two formula `Σ_u ∏_v x_{u,v}` instantiated for one input function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledFormula {
    /// `ρ × n` input values.
    pub values: Vec<Vec<CycloRational>>,
    pub scalar: CycloRational,
}

/// Instantiate `x_{u,v} = H[u][v][a_{v,g(v)}]` for a homogeneous decomposition of a
/// degree-`n` functional listing.
///
/// Each form must draw its variables from a single row of `A`. Forms are matched to
/// rows within each summand; a summand whose forms miss some row vanishes under full
/// differentiation and gets an all-zero value row.
pub fn compile_functional(c: &ChowDecomposition, g: &FunctionTable) -> Result<CompiledFormula> {
    let n = g.n();
    if !c.is_homogeneous() {
        return Err(Error::Domain(
            "compile_functional needs a homogeneous decomposition".into(),
        ));
    }
    if c.nvars != n * n || c.degree != n {
        return Err(Error::DimensionMismatch(format!(
            "decomposition of degree {} in {} variables for a function on Z_{n}",
            c.degree, c.nvars
        )));
    }
    let mut values = Vec::with_capacity(c.rho);
    for u in 0..c.rho {
        let mut form_of_row: Vec<Option<usize>> = vec![None; n];
        let mut alive = true;
        for v in 0..n {
            let rows: BTreeSet<usize> = (0..c.nvars)
                .filter(|&w| !c.get(u, v, w).is_zero())
                .map(|w| w / n)
                .collect();
            match rows.len() {
                0 => alive = false,
                1 => {
                    let r = *rows.first().unwrap();
                    if form_of_row[r].replace(v).is_some() {
                        alive = false;
                    }
                }
                _ => {
                    return Err(Error::Domain(format!(
                        "form ({u},{v}) mixes variables from several rows"
                    )))
                }
            }
        }
        let row = if alive {
            (0..n)
                .map(|i| {
                    let v = form_of_row[i].expect("every row has a form");
                    c.get(u, v, n * i + g.apply(i)).clone()
                })
                .collect()
        } else {
            vec![CycloRational::zero(); n]
        };
        values.push(row);
    }
    let scalar = values
        .iter()
        .map(|row| row.iter().fold(CycloRational::one(), |acc, x| &acc * x))
        .fold(CycloRational::zero(), |acc, t| acc + t);
    Ok(CompiledFormula { values, scalar })
}
