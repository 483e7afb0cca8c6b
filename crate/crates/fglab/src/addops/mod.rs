//! Additive operations between free theories in Chern-character coordinates.
//!
//! Over Q an additive operation from a Morava law to a target law is the
//! diagonal map that multiplies the codimension-D part by λ(D). Integrality is
//! tested on products of projective spaces through the symbol series G_l.

mod algebra;
mod kernel;
mod solver;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{format_rational, is_p_integral, parse_rational, vp, ArithError, Prime, Rational};
use crate::fgl::{FglError, FormalGroupLaw};
use crate::series::{indexed_vars, SeriesError};
use crate::QSeries;

pub use algebra::{combination, cross_iso, invert, self_basis, CrossIsoReport, Inverse};
pub use kernel::{permutations, KernelEntry, Partition, SymbolKernel};
pub use solver::{
    d_constant, d_recursion, required_leading_valuation, solve_generator, solve_stages, LeadMode, SolvePath, SolverConfig, StageFailure,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AddopsError {
    #[error(transparent)]
    Fgl(#[from] FglError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("the source must be a Morava law")]
    SourceNotMorava,
    #[error("caps are insufficient: {0}")]
    CapInsufficient(String),
    #[error("no integral operation with leading valuation up to {e_max} at lead {lead}; last failure: {last}")]
    SearchExhausted { lead: u32, e_max: u32, last: String },
    #[error("stage {} is infeasible at {:?}: {}", .0.stage, .0.parts, .0.reason)]
    Infeasible(StageFailure),
    #[error("operation is not integral at arity {arity}, monomial {monomial:?}: {coefficient}")]
    NotIntegral { arity: usize, monomial: Vec<u16>, coefficient: String },
    #[error("theories do not match: {0}")]
    Mismatch(String),
    #[error("basis is singular at codimension {0}")]
    SingularBasis(u32),
    #[error("coefficient a_{index} = {value} is not a p-unit")]
    NonUnit { index: u32, value: String },
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error("malformed lambda table: {0}")]
    Table(String),
}

/// Arity and degree caps for integrality checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub arity: u32,
    pub degree: u32,
}

impl Caps {
    pub fn square(n: u32) -> Self {
        Caps { arity: n, degree: n }
    }
}

/// First coefficient of some G_l that is not p-integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralityWitness {
    pub arity: usize,
    pub monomial: Vec<u16>,
    pub coefficient: Rational,
}

/// An additive operation from a Morava law to a target law.
#[derive(Debug, Clone)]
pub struct DiagonalOperation {
    pub source: FormalGroupLaw,
    pub target: FormalGroupLaw,
    /// n of the source law.
    pub n: u32,
    pub lead: u32,
    /// λ(D) keyed by codimension D.
    pub lambda: BTreeMap<u32, Rational>,
    pub caps: Caps,
    pub leading_valuation: Option<i64>,
}

fn source_n(source: &FormalGroupLaw) -> Result<u32, AddopsError> {
    source.morava_spec().map(|s| s.n).ok_or(AddopsError::SourceNotMorava)
}

impl DiagonalOperation {
    pub fn new(
        source: &FormalGroupLaw,
        target: &FormalGroupLaw,
        lead: u32,
        lambda: BTreeMap<u32, Rational>,
        caps: Caps,
    ) -> Result<Self, AddopsError> {
        let n = source_n(source)?;
        if source.prime() != target.prime() {
            return Err(AddopsError::Mismatch("different primes".into()));
        }
        if source.cap() < caps.degree || target.cap() < caps.degree {
            return Err(AddopsError::CapInsufficient(format!(
                "degree cap {} exceeds a law cap ({} / {})",
                caps.degree,
                source.cap(),
                target.cap()
            )));
        }
        let lambda = lambda.into_iter().filter(|(d, l)| *d <= caps.degree && !l.is_zero()).collect();
        Ok(DiagonalOperation { source: source.clone(), target: target.clone(), n, lead, lambda, caps, leading_valuation: None })
    }

    /// Multipliers λ(D) = 1 for every codimension: the identity when source = target.
    pub fn identity(law: &FormalGroupLaw, caps: Caps) -> Result<Self, AddopsError> {
        let lambda = (1..=caps.degree).map(|d| (d, Rational::one())).collect();
        Self::new(law, law, 1, lambda, caps)
    }

    /// λ = δ_{D,i}: the degree-i Chern-character component.
    pub fn ch(source: &FormalGroupLaw, target: &FormalGroupLaw, i: u32, caps: Caps) -> Result<Self, AddopsError> {
        Self::new(source, target, i, BTreeMap::from([(i, Rational::one())]), caps)
    }

    pub fn prime(&self) -> Prime {
        self.source.prime()
    }

    /// p^n − 1, the spacing of supported codimensions.
    pub fn period(&self) -> u32 {
        (self.prime().get().pow(self.n) - 1) as u32
    }

    pub fn lambda_at(&self, d: u32) -> Rational {
        self.lambda.get(&d).cloned().unwrap_or_else(Rational::zero)
    }

    /// λ supported on codimensions lead + s(p^n − 1).
    pub fn has_single_support_class(&self) -> bool {
        let m = self.period();
        self.lambda.keys().all(|&d| d >= self.lead && (d - self.lead).is_multiple_of(m))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let mut out = self.clone();
        out.lambda = self.lambda.iter().map(|(d, l)| (*d, l * k)).filter(|(_, l)| !l.is_zero()).collect();
        out.leading_valuation = None;
        out
    }

    /// Pointwise sum; both operations must share source, target and caps.
    pub fn add(&self, other: &Self) -> Result<Self, AddopsError> {
        self.check_same_theories(other)?;
        let mut lambda = self.lambda.clone();
        for (d, l) in &other.lambda {
            *lambda.entry(*d).or_insert_with(Rational::zero) += l;
        }
        let caps = Caps { arity: self.caps.arity.min(other.caps.arity), degree: self.caps.degree.min(other.caps.degree) };
        Self::new(&self.source, &self.target, self.lead.min(other.lead), lambda, caps)
    }

    fn check_same_theories(&self, other: &Self) -> Result<(), AddopsError> {
        if self.source != other.source || self.target != other.target {
            return Err(AddopsError::Mismatch("operations act between different theories".into()));
        }
        Ok(())
    }

    pub fn kernel(&self) -> SymbolKernel {
        SymbolKernel::new(&self.source, &self.target, self.caps.arity, self.caps.degree)
    }

    /// The coefficient of z^α in G_l for a partition α.
    pub fn coefficient(&self, kernel: &SymbolKernel, parts: &[u16]) -> Rational {
        kernel.find(parts).map(|e| e.pair(&self.lambda)).unwrap_or_else(Rational::zero)
    }

    /// G_l as a series in z_1..z_l up to the degree cap.
    pub fn evaluate_g(&self, arity: usize) -> Result<QSeries, AddopsError> {
        if arity as u32 > self.caps.arity {
            return Err(AddopsError::CapInsufficient(format!("arity {arity} exceeds the cap {}", self.caps.arity)));
        }
        let kernel = SymbolKernel::new(&self.source, &self.target, arity as u32, self.caps.degree);
        Ok(g_from_kernel(&kernel, arity, |e| e.pair(&self.lambda)))
    }

    /// Integrality of every G_l coefficient within caps; the first failure
    /// in (degree, arity, partition) order otherwise.
    pub fn is_integral(&self) -> Result<(), IntegralityWitness> {
        let kernel = self.kernel();
        integrality(&kernel, self.prime(), |e| e.pair(&self.lambda))
    }

    /// op2 ∘ op1 with pointwise multipliers; `self` is op2.
    pub fn compose(&self, first: &Self) -> Result<Self, AddopsError> {
        if first.target != self.source {
            return Err(AddopsError::Mismatch("target of the first operation is not the source of the second".into()));
        }
        let lambda: BTreeMap<u32, Rational> =
            first.lambda.iter().filter_map(|(d, l)| self.lambda.get(d).map(|m| (*d, l * m))).filter(|(_, l)| !l.is_zero()).collect();
        let caps = Caps { arity: self.caps.arity.min(first.caps.arity), degree: self.caps.degree.min(first.caps.degree) };
        let lead = lambda.keys().next().copied().unwrap_or(first.lead.max(self.lead));
        Self::new(&first.source, &self.target, lead, lambda, caps)
    }

    /// The leading coefficient read from the symbol: the coefficient of z_1⋯z_lead in G_lead.
    pub fn eta(&self) -> Rational {
        let kernel = SymbolKernel::new(&self.source, &self.target, self.lead, self.lead);
        self.coefficient(&kernel, &vec![1; self.lead as usize])
    }

    pub fn to_table(&self) -> Result<LambdaTable, AddopsError> {
        if !self.has_single_support_class() {
            return Err(AddopsError::Table("lambda is not supported on a single residue class".into()));
        }
        let m = self.period();
        Ok(LambdaTable {
            lead: self.lead,
            p: self.prime().get(),
            n: self.n,
            lambda: self.lambda.iter().map(|(d, l)| ((d - self.lead) / m, format_rational(l))).collect(),
            caps: self.caps,
            leading_valuation: self.leading_valuation,
        })
    }

    pub fn from_table(table: &LambdaTable, source: &FormalGroupLaw, target: &FormalGroupLaw) -> Result<Self, AddopsError> {
        if table.p != source.prime().get() || table.n != source_n(source)? {
            return Err(AddopsError::Table("p or n does not match the source law".into()));
        }
        let m = (table.p.pow(table.n) - 1) as u32;
        let mut lambda = BTreeMap::new();
        for (s, v) in &table.lambda {
            lambda.insert(table.lead + s * m, parse_rational(v)?);
        }
        let mut op = Self::new(source, target, table.lead, lambda, table.caps)?;
        op.leading_valuation = table.leading_valuation;
        Ok(op)
    }
}

/// Builds G_l from per-partition coefficients.
pub fn g_from_kernel(kernel: &SymbolKernel, arity: usize, coef: impl Fn(&KernelEntry) -> Rational) -> QSeries {
    let vars = indexed_vars("z", arity);
    let mut terms = Vec::new();
    for entry in kernel.entries.iter().filter(|e| e.arity() == arity) {
        let c = coef(entry);
        if c.is_zero() {
            continue;
        }
        for perm in permutations(&entry.parts) {
            terms.push((perm, c.clone()));
        }
    }
    QSeries::from_terms(vars, kernel.degree, terms)
}

/// Checks p-integrality of per-partition coefficients in kernel order.
pub fn integrality(kernel: &SymbolKernel, p: Prime, coef: impl Fn(&KernelEntry) -> Rational) -> Result<(), IntegralityWitness> {
    for entry in &kernel.entries {
        let c = coef(entry);
        if !is_p_integral(&c, p) {
            return Err(IntegralityWitness { arity: entry.arity(), monomial: entry.parts.clone(), coefficient: c });
        }
    }
    Ok(())
}

/// Triangular expansion of `op` in a basis with strictly increasing leads.
/// Returns the coefficient of each basis element, keyed by its lead.
pub fn expand_in_basis(op: &DiagonalOperation, basis: &[DiagonalOperation]) -> Result<BTreeMap<u32, Rational>, AddopsError> {
    for w in basis.windows(2) {
        if w[0].lead >= w[1].lead {
            return Err(AddopsError::Mismatch("basis leads must increase strictly".into()));
        }
    }
    for b in basis {
        if b.source != op.source || b.target != op.target {
            return Err(AddopsError::Mismatch("basis element acts between different theories".into()));
        }
        if b.lambda_at(b.lead).is_zero() {
            return Err(AddopsError::SingularBasis(b.lead));
        }
    }
    let degree = basis.iter().map(|b| b.caps.degree).chain([op.caps.degree]).min().unwrap_or(0);
    let mut coeffs: BTreeMap<u32, Rational> = BTreeMap::new();
    for d in 1..=degree {
        let mut residual = op.lambda_at(d);
        for b in basis.iter().filter(|b| b.lead < d) {
            if let Some(c) = coeffs.get(&b.lead) {
                residual -= c * b.lambda_at(d);
            }
        }
        match basis.iter().find(|b| b.lead == d) {
            Some(b) => {
                let c = residual / b.lambda_at(d);
                coeffs.insert(d, c);
            }
            None => {
                if !residual.is_zero() {
                    return Err(AddopsError::SingularBasis(d));
                }
            }
        }
    }
    Ok(coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect())
}

/// The valuation of the lead multiplier, when finite.
pub fn lead_valuation(op: &DiagonalOperation) -> Option<i64> {
    vp(&op.lambda_at(op.lead), op.prime()).finite()
}

/// Serialized λ table; keys s index codimension lead + s(p^n − 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaTable {
    pub lead: u32,
    pub p: u64,
    pub n: u32,
    pub lambda: BTreeMap<u32, String>,
    pub caps: Caps,
    pub leading_valuation: Option<i64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};
    use crate::fgl::MoravaSpec;

    fn k(p: u64, n: u32, cap: u32) -> FormalGroupLaw {
        FormalGroupLaw::morava(&MoravaSpec::standard(Prime::new(p).unwrap(), n), cap).unwrap()
    }

    #[test]
    fn identity_symbol_is_leading_monomial() {
        let law = k(2, 1, 6);
        let id = DiagonalOperation::identity(&law, Caps::square(6)).unwrap();
        for l in 1..=3 {
            let g = id.evaluate_g(l).unwrap();
            assert_eq!(g.num_terms(), 1);
            assert_eq!(g.coeff(&vec![1; l]), int(1));
        }
    }

    #[test]
    fn ch_components_integrality() {
        let law = k(2, 2, 8);
        let chow = FormalGroupLaw::additive(law.prime(), 8);
        for i in 1..=3 {
            assert!(DiagonalOperation::ch(&law, &chow, i, Caps::square(8)).unwrap().is_integral().is_ok());
        }
        let w = DiagonalOperation::ch(&law, &chow, 4, Caps::square(8)).unwrap().is_integral().unwrap_err();
        assert_eq!(vp(&w.coefficient, law.prime()).finite(), Some(-1));
        let scaled = DiagonalOperation::ch(&law, &chow, 4, Caps::square(8)).unwrap().scale(&int(1024));
        assert!(scaled.is_integral().is_ok());
    }

    #[test]
    fn grading_support_vanishing() {
        let law = k(2, 2, 8);
        let lambda = BTreeMap::from([(1, int(1)), (4, int(1)), (7, int(1))]);
        let op = DiagonalOperation::new(&law, &law, 1, lambda, Caps::square(8)).unwrap();
        assert!(op.evaluate_g(2).unwrap().is_zero());
        assert!(op.evaluate_g(3).unwrap().is_zero());
        assert!(!op.evaluate_g(4).unwrap().is_zero());
    }

    #[test]
    fn compose_and_expand() {
        let law = k(2, 1, 6);
        let caps = Caps::square(6);
        let id = DiagonalOperation::identity(&law, caps).unwrap();
        let op = DiagonalOperation::new(&law, &law, 2, BTreeMap::from([(2, int(2)), (3, ratio(1, 3))]), caps).unwrap();
        let c = id.compose(&op).unwrap();
        assert_eq!(c.lambda, op.lambda);
        let basis: Vec<_> = (1..=6).map(|i| DiagonalOperation::ch(&law, &law, i, caps).unwrap()).collect();
        let coeffs = expand_in_basis(&op, &basis).unwrap();
        assert_eq!(coeffs, BTreeMap::from([(2, int(2)), (3, ratio(1, 3))]));
    }

    #[test]
    fn table_round_trip() {
        let law = k(2, 2, 8);
        let op = DiagonalOperation::new(&law, &law, 1, BTreeMap::from([(1, int(1)), (4, ratio(-1, 2))]), Caps::square(8)).unwrap();
        let t = op.to_table().unwrap();
        let text = serde_json::to_string(&t).unwrap();
        assert!(text.contains(r#""lambda":{"0":"1","1":"-1/2"}"#));
        let back: LambdaTable = serde_json::from_str(&text).unwrap();
        let op2 = DiagonalOperation::from_table(&back, &law, &law).unwrap();
        assert_eq!(op2.lambda, op.lambda);
    }
}
