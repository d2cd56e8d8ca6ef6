//! The differential computer: a listing is the program, the input selects which
//! partial derivatives to take, and the output is the `m`-th power of the value at
//! the origin.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::cyclotomic::CycloRational;
use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::listings::{listing_determinant, FunctionTable, Limits};
use crate::multipoly::MultiPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputKind {
    /// Bit vectors of length `n`; program in `n` variables.
    Vector,
    /// `n × n` bit matrices; program in `n²` variables.
    Matrix,
    /// Functions `Z_n → Z_n`; program in `n²` variables.
    Functional,
}

impl InputKind {
    pub fn program_vars(self, n: usize) -> usize {
        match self {
            InputKind::Vector => n,
            InputKind::Matrix | InputKind::Functional => n * n,
        }
    }
}

/// Result of one execution: the output bit and the scalar before the `m`-th power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub bit: bool,
    pub scalar: CycloRational,
}

#[derive(Clone, Debug)]
pub struct DifferentialComputer {
    program: MultiPoly,
    arity: usize,
    order: u64,
    kind: InputKind,
}

impl DifferentialComputer {
    pub fn new(program: MultiPoly, kind: InputKind, arity: usize, order: u64) -> Result<Self> {
        let expected = kind.program_vars(arity);
        if program.nvars() != expected || program.max_var().is_some_and(|v| v >= expected) {
            return Err(Error::DimensionMismatch(format!(
                "{kind:?} input of size {arity} needs a program in {expected} variables, got {}",
                program.nvars()
            )));
        }
        if order == 0 || !order.is_multiple_of(program.coefficient_order()) {
            return Err(Error::Domain(format!(
                "exponent parameter {order} is not a multiple of the coefficient field order {}",
                program.coefficient_order()
            )));
        }
        Ok(DifferentialComputer {
            program,
            arity,
            order,
            kind,
        })
    }

    /// Exponent parameter taken as the coefficient field order of the program.
    pub fn with_inferred_order(program: MultiPoly, kind: InputKind, arity: usize) -> Result<Self> {
        let order = program.coefficient_order();
        Self::new(program, kind, arity, order)
    }

    pub fn program(&self) -> &MultiPoly {
        &self.program
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn kind(&self) -> InputKind {
        self.kind
    }

    fn expect_kind(&self, kind: InputKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Domain(format!(
                "computer takes {:?} inputs, not {kind:?}",
                self.kind
            )));
        }
        Ok(())
    }

    /// Raise to the `m`-th power and read off the bit.
    fn finish(&self, scalar: CycloRational) -> Result<RunOutput> {
        let powered = scalar.pow(self.order);
        if powered.is_zero() {
            Ok(RunOutput { bit: false, scalar })
        } else if powered.is_one() {
            Ok(RunOutput { bit: true, scalar })
        } else {
            Err(Error::ModelViolation { scalar })
        }
    }

    fn run_on_vars(&self, vars: &[usize]) -> Result<RunOutput> {
        let derived = self.program.derivative_sequence(vars);
        self.finish(derived.constant_term())
    }

    pub fn run_vector(&self, bits: &[bool]) -> Result<RunOutput> {
        self.expect_kind(InputKind::Vector)?;
        if bits.len() != self.arity {
            return Err(Error::DimensionMismatch(format!(
                "input of length {} for arity {}",
                bits.len(),
                self.arity
            )));
        }
        let vars: Vec<usize> = (0..bits.len()).filter(|&i| bits[i]).collect();
        self.run_on_vars(&vars)
    }

    pub fn run_matrix(&self, input: &Graph) -> Result<RunOutput> {
        self.expect_kind(InputKind::Matrix)?;
        if input.n() != self.arity {
            return Err(Error::DimensionMismatch(format!(
                "{0}×{0} input for a computer on {1}×{1} matrices",
                input.n(),
                self.arity
            )));
        }
        let vars: Vec<usize> = (0..self.arity * self.arity)
            .filter(|&k| input.bits()[k])
            .collect();
        self.run_on_vars(&vars)
    }

    /// Differentiate along `a_{i,g(i)}` for every `i`. There is no evaluation at the
    /// origin: the fully differentiated program must already be constant.
    pub fn run_functional(&self, g: &FunctionTable) -> Result<RunOutput> {
        self.expect_kind(InputKind::Functional)?;
        if g.n() != self.arity {
            return Err(Error::DimensionMismatch(format!(
                "function on Z_{} for a computer on Z_{}",
                g.n(),
                self.arity
            )));
        }
        let derived = self.program.derivative_sequence(&g.edge_vars());
        if derived.degree().unwrap_or(0) > 0 {
            return Err(Error::Domain(
                "fully differentiated program is not constant; listing is not a functional listing"
                    .into(),
            ));
        }
        self.finish(derived.constant_term())
    }
}

/// Evaluate a matrix-variable listing at the 0/1 point given by an adjacency matrix.
pub fn count_eval(p: &MultiPoly, input: &Graph) -> CycloRational {
    let point: BTreeMap<usize, CycloRational> = input
        .bits()
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(k, _)| (k, CycloRational::one()))
        .collect();
    p.evaluate(&point)
}

pub type RationalMatrix = Vec<Vec<BigRational>>;

pub const MAX_INVERSE_SIZE: usize = 5;

/// Inverse through `A⁻¹[i][j] = (∂ Det / ∂ a_{j,i})(A) / Det(A)`.
pub fn inverse_via_gradient(m: &[Vec<BigRational>]) -> Result<RationalMatrix> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch("matrix is not square".into()));
    }
    if n == 0 || n > MAX_INVERSE_SIZE {
        return Err(Error::Domain(format!(
            "inverse_via_gradient supports 1 ≤ n ≤ {MAX_INVERSE_SIZE}, got {n}"
        )));
    }
    let det_listing = listing_determinant(n, &Limits::default())?;
    let point: Vec<CycloRational> = m
        .iter()
        .flatten()
        .map(|q| CycloRational::from_rational(q.clone()))
        .collect();
    let det = det_listing.evaluate_dense(&point);
    if det.is_zero() {
        return Err(Error::Singular);
    }
    let inv_det = det.inverse()?;
    let mut out = vec![vec![BigRational::zero(); n]; n];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let cofactor = det_listing
                .partial_derivative(n * j + i)
                .evaluate_dense(&point);
            *entry = (&cofactor * &inv_det).as_rational().ok_or_else(|| {
                Error::InternalInconsistency(
                    "rational matrix produced an irrational inverse".into(),
                )
            })?;
        }
    }
    Ok(out)
}
