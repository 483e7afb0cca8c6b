//! Inversion of generator combinations and cross-theory isomorphisms.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{expand_in_basis, solve_generator, AddopsError, Caps, DiagonalOperation, SolverConfig};
use crate::arith::{format_rational, is_p_integral, is_p_unit, Rational};
use crate::fgl::{FormalGroupLaw, MoravaSpec};

/// Self generators φ_1..φ_N of a Morava law at square caps N.
pub fn self_basis(law: &FormalGroupLaw, caps: Caps, config: SolverConfig) -> Result<Vec<DiagonalOperation>, AddopsError> {
    (1..=caps.degree.min(caps.arity)).map(|i| solve_generator(law, law, i, caps, config)).collect()
}

/// A two-sided inverse of Σ a_i φ_i up to the caps.
#[derive(Debug, Clone)]
pub struct Inverse {
    pub op: DiagonalOperation,
    /// Coefficients of the inverse in the generator basis, keyed by lead.
    pub coefficients: BTreeMap<u32, Rational>,
    /// Every multiplier of inverse ∘ original equals 1.
    pub verified: bool,
}

/// The combination Σ a_i φ_i.
pub fn combination(basis: &[DiagonalOperation], coefficients: &BTreeMap<u32, Rational>) -> Result<DiagonalOperation, AddopsError> {
    let first = basis.first().ok_or_else(|| AddopsError::Mismatch("empty basis".into()))?;
    let mut total = first.scale(&Rational::zero());
    for b in basis {
        if let Some(a) = coefficients.get(&b.lead) {
            total = total.add(&b.scale(a))?;
        }
    }
    Ok(total)
}

/// Inverts Σ a_i φ_i in a basis of self generators with leads 1..N.
///
/// Fails at the first i < p^n whose a_i is not a p-unit. Otherwise starts from
/// Σ_{i<p^n} φ_i/(a_i β_i²) and removes the lowest remaining error term
/// α_k φ_k by composing with id + xφ_k, x = −α_k/(1 + α_k β_k).
pub fn invert(basis: &[DiagonalOperation], coefficients: &BTreeMap<u32, Rational>) -> Result<Inverse, AddopsError> {
    let first = basis.first().ok_or_else(|| AddopsError::Mismatch("empty basis".into()))?;
    let p = first.prime();
    let q = p.get().pow(first.n) as u32;
    for i in 1..q {
        let a = coefficients.get(&i).cloned().unwrap_or_else(Rational::zero);
        if !is_p_unit(&a, p) {
            return Err(AddopsError::NonUnit { index: i, value: format_rational(&a) });
        }
    }
    let phi = combination(basis, coefficients)?;
    let caps = phi.caps;
    let identity = DiagonalOperation::identity(&first.source, caps)?;
    let beta = |b: &DiagonalOperation| b.lambda_at(b.lead);

    let mut psi = first.scale(&Rational::zero());
    for b in basis.iter().filter(|b| b.lead < q) {
        let a = &coefficients[&b.lead];
        let bt = beta(b);
        psi = psi.add(&b.scale(&(a * &bt * &bt).recip()))?;
    }
    for _ in 0..=basis.len() {
        let err = psi.compose(&phi)?.add(&identity.scale(&-Rational::one()))?;
        let alphas = expand_in_basis(&err, basis)?;
        let Some((&k, alpha)) = alphas.iter().next() else { break };
        if k < q {
            return Err(AddopsError::Inconsistent(format!("error term at lead {k} below p^n")));
        }
        let b = basis.iter().find(|b| b.lead == k).expect("expansion keys are basis leads");
        let x = -(alpha / (Rational::one() + alpha * beta(b)));
        psi = psi.add(&b.scale(&x).compose(&psi)?)?;
    }
    let check = psi.compose(&phi)?;
    let verified = (1..=caps.degree).all(|d| check.lambda_at(d).is_one());
    let coefficients = expand_in_basis(&psi, basis)?;
    Ok(Inverse { op: psi, coefficients, verified })
}

/// Outcome of the cross-theory isomorphism check.
#[derive(Debug, Clone)]
pub struct CrossIsoReport {
    /// Σ_{i<p^n} φ_i from the first law to the second.
    pub forward: DiagonalOperation,
    /// Σ_{i<p^n} φ_i from the second law to the first.
    pub backward: DiagonalOperation,
    /// backward ∘ forward in the first law's generator basis.
    pub composite: BTreeMap<u32, Rational>,
    /// forward ∘ backward in the second law's generator basis.
    pub reverse_composite: BTreeMap<u32, Rational>,
    pub invertible: bool,
}

fn unit_criterion(coeffs: &BTreeMap<u32, Rational>, q: u32, p: crate::arith::Prime) -> bool {
    coeffs.values().all(|c| is_p_integral(c, p)) && (1..q).all(|i| coeffs.get(&i).is_some_and(|c| is_p_unit(c, p)))
}

pub fn cross_iso(first: &MoravaSpec, second: &MoravaSpec, caps: Caps, config: SolverConfig) -> Result<CrossIsoReport, AddopsError> {
    if first.p != second.p || first.n != second.n {
        return Err(AddopsError::Mismatch("laws differ in p or n".into()));
    }
    let k1 = FormalGroupLaw::morava(first, caps.degree)?;
    let k2 = FormalGroupLaw::morava(second, caps.degree)?;
    let q = first.q() as u32;
    let sum = |src: &FormalGroupLaw, tgt: &FormalGroupLaw| -> Result<DiagonalOperation, AddopsError> {
        let mut total: Option<DiagonalOperation> = None;
        for i in 1..q.min(caps.degree + 1) {
            let op = solve_generator(src, tgt, i, caps, config)?;
            total = Some(match total {
                None => op,
                Some(t) => t.add(&op)?,
            });
        }
        total.ok_or_else(|| AddopsError::CapInsufficient("no leads below p^n within the caps".into()))
    };
    let forward = sum(&k1, &k2)?;
    let backward = sum(&k2, &k1)?;
    let composite = expand_in_basis(&backward.compose(&forward)?, &self_basis(&k1, caps, config)?)?;
    let reverse_composite = expand_in_basis(&forward.compose(&backward)?, &self_basis(&k2, caps, config)?)?;
    let p = first.p;
    let invertible = unit_criterion(&composite, q, p) && unit_criterion(&reverse_composite, q, p);
    Ok(CrossIsoReport { forward, backward, composite, reverse_composite, invertible })
}
