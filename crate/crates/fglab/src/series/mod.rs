//! Sparse multivariate power series truncated at a total-degree cap.
//!
//! Every series carries its cap. Binary operations truncate to the smaller
//! operand cap and never extrapolate past it.

mod budget;
mod graded;
mod ring;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{Prime, Rational};

pub use budget::{estimate_bytes, memory_limit_mb, set_memory_limit_mb, with_memory_limit_mb};
pub use graded::GradedPolynomial;
pub use ring::CoefficientRing;

pub type Exponents = Vec<u16>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("variable lists differ: {left:?} vs {right:?}")]
    VariableMismatch { left: Vec<String>, right: Vec<String> },
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("substituted series for {0:?} has a nonzero constant term")]
    ConstantTerm(String),
    #[error("linear coefficient is not invertible")]
    NotInvertible,
    #[error("expected a univariate series, found {0} variables")]
    NotUnivariate(usize),
    #[error("requested cap {requested} exceeds the available cap {available}")]
    CapExceeded { requested: u32, available: u32 },
    #[error("series storage estimate {estimated_bytes} bytes exceeds the budget of {limit_bytes} bytes")]
    MemoryCap { estimated_bytes: u64, limit_bytes: u64 },
    #[error("malformed series JSON: {0}")]
    Json(String),
}

/// A power series in named variables, exact below `cap` (inclusive).
#[derive(Clone, Debug)]
pub struct TruncatedSeries<C> {
    vars: Vec<String>,
    cap: u32,
    terms: BTreeMap<Exponents, C>,
}

fn total_degree(e: &[u16]) -> u32 {
    e.iter().map(|&k| k as u32).sum()
}

/// Variable names `prefix1 .. prefixN`.
pub fn indexed_vars(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}{i}")).collect()
}

impl<C: CoefficientRing> TruncatedSeries<C> {
    pub fn zero(vars: Vec<String>, cap: u32) -> Self {
        TruncatedSeries { vars, cap, terms: BTreeMap::new() }
    }

    pub fn constant(vars: Vec<String>, cap: u32, c: C) -> Self {
        let zero_exp = vec![0; vars.len()];
        Self::from_terms(vars, cap, [(zero_exp, c)])
    }

    /// The series consisting of the variable at `index`.
    pub fn variable(vars: Vec<String>, cap: u32, index: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[index] = 1;
        Self::from_terms(vars, cap, [(e, C::one())])
    }

    /// Builds a series, summing duplicates and dropping zeros and over-cap terms.
    pub fn from_terms(vars: Vec<String>, cap: u32, terms: impl IntoIterator<Item = (Exponents, C)>) -> Self {
        let mut out = Self::zero(vars, cap);
        for (e, c) in terms {
            assert_eq!(e.len(), out.vars.len(), "exponent length must match the variable count");
            out.add_term(e, c);
        }
        out
    }

    /// A univariate series from (exponent, coefficient) pairs.
    pub fn univariate(var: &str, cap: u32, coeffs: impl IntoIterator<Item = (u16, C)>) -> Self {
        Self::from_terms(vec![var.to_string()], cap, coeffs.into_iter().map(|(k, c)| (vec![k], c)))
    }

    /// A univariate series from a dense coefficient list starting at degree 0.
    pub fn from_dense(var: &str, cap: u32, dense: &[C]) -> Self {
        Self::univariate(var, cap, dense.iter().enumerate().map(|(k, c)| (k as u16, c.clone())))
    }

    fn add_term(&mut self, e: Exponents, c: C) {
        if c.is_zero() || total_degree(&e) > self.cap {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_ref(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, e: &[u16]) -> Option<&C> {
        self.terms.get(e)
    }

    pub fn coeff(&self, e: &[u16]) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&vec![0; self.vars.len()])
    }

    /// Dense coefficient list of a univariate series, indices 0..=cap.
    pub fn dense(&self) -> Result<Vec<C>, SeriesError> {
        self.require_univariate()?;
        let mut out = vec![C::zero(); self.cap as usize + 1];
        for (e, c) in &self.terms {
            out[e[0] as usize] = c.clone();
        }
        Ok(out)
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| total_degree(e)).min()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| total_degree(e)).max()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    fn require_univariate(&self) -> Result<(), SeriesError> {
        if self.vars.len() == 1 {
            Ok(())
        } else {
            Err(SeriesError::NotUnivariate(self.vars.len()))
        }
    }

    fn check_vars(&self, other: &Self) -> Result<(), SeriesError> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(SeriesError::VariableMismatch { left: self.vars.clone(), right: other.vars.clone() })
        }
    }

    /// Drops terms above `cap`; asking for more than is known is an error.
    pub fn truncate(&self, cap: u32) -> Result<Self, SeriesError> {
        if cap > self.cap {
            return Err(SeriesError::CapExceeded { requested: cap, available: self.cap });
        }
        Ok(self.truncated(cap))
    }

    fn truncated(&self, cap: u32) -> Self {
        let cap = cap.min(self.cap);
        let terms = self.terms.iter().filter(|(e, _)| total_degree(e) <= cap).map(|(e, c)| (e.clone(), c.clone())).collect();
        TruncatedSeries { vars: self.vars.clone(), cap, terms }
    }

    /// Same terms under new variable names.
    pub fn rename(&self, vars: Vec<String>) -> Self {
        assert_eq!(vars.len(), self.vars.len());
        TruncatedSeries { vars, cap: self.cap, terms: self.terms.clone() }
    }

    /// Re-embeds into a larger variable list; each old variable goes to the named slot.
    pub fn embed(&self, vars: &[String]) -> Result<Self, SeriesError> {
        let slots = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).ok_or_else(|| SeriesError::UnknownVariable(v.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let terms = self.terms.iter().map(|(e, c)| {
            let mut out = vec![0; vars.len()];
            for (i, &s) in slots.iter().enumerate() {
                out[s] += e[i];
            }
            (out, c.clone())
        });
        Ok(Self::from_terms(vars.to_vec(), self.cap, terms))
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_vars(other)?;
        let mut out = self.truncated(other.cap);
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect();
        TruncatedSeries { vars: self.vars.clone(), cap: self.cap, terms }
    }

    pub fn scale(&self, k: &C) -> Self {
        if k.is_zero() {
            return Self::zero(self.vars.clone(), self.cap);
        }
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), c.mul_ref(k))).filter(|(_, c)| !c.is_zero()).collect();
        TruncatedSeries { vars: self.vars.clone(), cap: self.cap, terms }
    }

    fn by_degree(&self, cap: u32) -> Vec<(u32, &Exponents, &C)> {
        let mut v: Vec<_> = self.terms.iter().map(|(e, c)| (total_degree(e), e, c)).filter(|(d, _, _)| *d <= cap).collect();
        v.sort_by_key(|t| t.0);
        v
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_vars(other)?;
        let cap = self.cap.min(other.cap);
        Self::mul_raw(&self.vars, cap, self, other)
    }

    fn mul_raw(vars: &[String], cap: u32, a: &Self, b: &Self) -> Result<Self, SeriesError> {
        let left = a.by_degree(cap);
        let right = b.by_degree(cap);
        let coef_bytes = left.first().map(|t| t.2.approx_bytes()).unwrap_or(64);
        let mut acc: HashMap<Exponents, C> = HashMap::new();
        for (da, ea, ca) in &left {
            for (db, eb, cb) in &right {
                if da + db > cap {
                    break;
                }
                let key: Exponents = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                acc.entry(key).or_insert_with(C::zero).add_product(ca, cb);
            }
            budget::check(acc.len(), vars.len(), coef_bytes)?;
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(TruncatedSeries { vars: vars.to_vec(), cap, terms })
    }

    pub fn pow(&self, k: u32) -> Result<Self, SeriesError> {
        let mut out = Self::constant(self.vars.clone(), self.cap, C::one());
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// The homogeneous component of total degree `d`.
    pub fn homogeneous_component(&self, d: u32) -> Self {
        let terms = self.terms.iter().filter(|(e, _)| total_degree(e) == d).map(|(e, c)| (e.clone(), c.clone())).collect();
        TruncatedSeries { vars: self.vars.clone(), cap: self.cap, terms }
    }

    /// Composition. Each variable of `self` is replaced by its assigned series;
    /// unassigned variables must occur in the assigned series' variable list and
    /// map to themselves. All assigned series share one variable list.
    pub fn substitute(&self, assignment: &[(&str, &Self)]) -> Result<Self, SeriesError> {
        let out_vars: Vec<String> = match assignment.first() {
            Some((_, s)) => s.vars.clone(),
            None => return Ok(self.clone()),
        };
        let mut cap = self.cap;
        for (name, s) in assignment {
            if s.vars != out_vars {
                return Err(SeriesError::VariableMismatch { left: out_vars.clone(), right: s.vars.clone() });
            }
            if self.var_index(name).is_none() {
                return Err(SeriesError::UnknownVariable(name.to_string()));
            }
            cap = cap.min(s.cap);
        }
        let mut images: Vec<Self> = Vec::with_capacity(self.vars.len());
        for (idx, v) in self.vars.iter().enumerate() {
            let img = match assignment.iter().find(|(name, _)| name == v) {
                Some((_, s)) => (*s).truncated(cap),
                None => {
                    let slot = out_vars.iter().position(|w| w == v).ok_or_else(|| SeriesError::UnknownVariable(v.clone()))?;
                    Self::variable(out_vars.clone(), cap, slot)
                }
            };
            let occurs = self.terms.keys().any(|e| e[idx] > 0);
            if occurs && !img.constant_term().is_zero() {
                return Err(SeriesError::ConstantTerm(v.clone()));
            }
            images.push(img);
        }
        let entries: Vec<(&Exponents, &C)> = self.terms.iter().collect();
        let mut caches: Vec<Vec<Self>> =
            images.iter().map(|img| vec![Self::constant(out_vars.clone(), cap, C::one()), img.clone()]).collect();
        Self::substitute_rec(&entries, 0, &images, &mut caches, &out_vars, cap)
    }

    fn power_of(caches: &mut [Vec<Self>], images: &[Self], var: usize, k: usize) -> Result<Self, SeriesError> {
        while caches[var].len() <= k {
            let next = caches[var].last().unwrap().mul(&images[var])?;
            caches[var].push(next);
        }
        Ok(caches[var][k].clone())
    }

    fn substitute_rec(
        entries: &[(&Exponents, &C)],
        var: usize,
        images: &[Self],
        caches: &mut [Vec<Self>],
        out_vars: &[String],
        cap: u32,
    ) -> Result<Self, SeriesError> {
        if var == images.len() {
            let mut c = C::zero();
            for (_, coef) in entries {
                c.add_ref(coef);
            }
            return Ok(Self::constant(out_vars.to_vec(), cap, c));
        }
        let mut groups: BTreeMap<u16, Vec<(&Exponents, &C)>> = BTreeMap::new();
        for &(e, c) in entries {
            groups.entry(e[var]).or_default().push((e, c));
        }
        let mut total = Self::zero(out_vars.to_vec(), cap);
        for (k, group) in groups {
            let inner = Self::substitute_rec(&group, var + 1, images, caches, out_vars, cap)?;
            if inner.is_zero() {
                continue;
            }
            let term = if k == 0 {
                inner
            } else {
                let min_img = images[var].min_degree().unwrap_or(u32::MAX);
                if min_img.saturating_mul(k as u32) > cap {
                    continue;
                }
                let power = Self::power_of(caches, images, var, k as usize)?;
                Self::mul_raw(out_vars, cap, &power, &inner)?
            };
            for (e, c) in term.terms {
                total.add_term(e, c);
            }
        }
        Ok(total)
    }

    /// Univariate composition `self(g)`.
    pub fn compose(&self, g: &Self) -> Result<Self, SeriesError> {
        self.require_univariate()?;
        self.substitute(&[(&self.vars[0], g)])
    }

    /// Compositional inverse of a univariate series with invertible linear term.
    pub fn reverse(&self) -> Result<Self, SeriesError> {
        self.require_univariate()?;
        if !self.constant_term().is_zero() {
            return Err(SeriesError::ConstantTerm(self.vars[0].clone()));
        }
        let n = self.cap as usize;
        let f = self.dense()?;
        let inv1 = if n >= 1 { f[1].try_inverse().ok_or(SeriesError::NotInvertible)? } else { C::zero() };
        let mut g = vec![C::zero(); n + 1];
        // pw[j][d] = [x^d] g^j for d ≤ current degree
        let mut pw: Vec<Vec<C>> = vec![vec![C::zero(); n + 1]; n + 1];
        if n >= 1 {
            g[1] = inv1.clone();
            pw[1][1] = inv1.clone();
        }
        for k in 2..=n {
            let mut s = C::zero();
            for j in 2..=k {
                let mut acc = C::zero();
                for d in (j - 1)..k {
                    if !pw[j - 1][d].is_zero() && !g[k - d].is_zero() {
                        acc.add_product(&pw[j - 1][d], &g[k - d]);
                    }
                }
                if !f[j].is_zero() {
                    s.add_product(&f[j], &acc);
                }
                pw[j][k] = acc;
            }
            g[k] = -(s.mul_ref(&inv1));
            pw[1][k] = g[k].clone();
        }
        Ok(Self::from_dense(&self.vars[0], self.cap, &g))
    }

    /// Every positive exponent of every variable is ≡ 1 mod p^n − 1.
    pub fn is_pn_gradable(&self, p: Prime, n: u32) -> bool {
        let m = p.get().pow(n) - 1;
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0 || (k as u64 - 1).is_multiple_of(m)))
    }

    /// Invariance under every permutation of the variables.
    pub fn is_symmetric(&self) -> bool {
        let k = self.vars.len();
        if k < 2 {
            return true;
        }
        // transpositions (0 1) and the cycle generate the symmetric group
        let swap = |e: &Exponents| {
            let mut f = e.clone();
            f.swap(0, 1);
            f
        };
        let cycle = |e: &Exponents| {
            let mut f = e.clone();
            f.rotate_left(1);
            f
        };
        self.terms.iter().all(|(e, c)| self.terms.get(&swap(e)) == Some(c) && self.terms.get(&cycle(e)) == Some(c))
    }

    /// Every monomial contains every variable.
    pub fn divisible_by_all_vars(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k > 0))
    }

    /// Coefficients at nonincreasing exponent vectors: one representative per
    /// orbit of a symmetric series.
    pub fn partition_view(&self) -> BTreeMap<Exponents, C> {
        self.terms.iter().filter(|(e, _)| e.windows(2).all(|w| w[0] >= w[1])).map(|(e, c)| (e.clone(), c.clone())).collect()
    }

    /// Equality of all terms up to the smaller cap.
    pub fn eq_up_to_cap(&self, other: &Self) -> bool {
        let cap = self.cap.min(other.cap);
        self.vars == other.vars && self.truncated(cap).terms == other.truncated(cap).terms
    }

    pub fn map_coefficients<D: CoefficientRing>(&self, f: impl Fn(&C) -> D) -> TruncatedSeries<D> {
        TruncatedSeries::from_terms(self.vars.clone(), self.cap, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            vars: self.vars.clone(),
            cap: self.cap,
            terms: self.terms.iter().map(|(e, c)| TermJson { exp: e.clone(), coef: c.to_text() }).collect(),
        }
    }

    pub fn from_json(json: &SeriesJson) -> Result<Self, SeriesError> {
        let mut terms = Vec::with_capacity(json.terms.len());
        for t in &json.terms {
            if t.exp.len() != json.vars.len() {
                return Err(SeriesError::Json(format!("exponent {:?} does not match {} variables", t.exp, json.vars.len())));
            }
            if total_degree(&t.exp) > json.cap {
                return Err(SeriesError::Json(format!("exponent {:?} exceeds cap {}", t.exp, json.cap)));
            }
            terms.push((t.exp.clone(), C::from_text(&t.coef).map_err(SeriesError::Json)?));
        }
        Ok(Self::from_terms(json.vars.clone(), json.cap, terms))
    }
}

impl<C: CoefficientRing> PartialEq for TruncatedSeries<C> {
    fn eq(&self, other: &Self) -> bool {
        self.eq_up_to_cap(other)
    }
}

/// Degree-`degree` component of ∏_{j=1}^{arity} f(z_j), computed by
/// enumerating exponent compositions directly.
pub fn symmetric_product_expand<C: CoefficientRing>(
    f: &TruncatedSeries<C>,
    arity: usize,
    degree: u32,
) -> Result<TruncatedSeries<C>, SeriesError> {
    f.require_univariate()?;
    if degree > f.cap {
        return Err(SeriesError::CapExceeded { requested: degree, available: f.cap });
    }
    if !f.constant_term().is_zero() {
        return Err(SeriesError::ConstantTerm(f.vars[0].clone()));
    }
    let support: Vec<(u16, &C)> = f.terms.iter().map(|(e, c)| (e[0], c)).collect();
    let vars = indexed_vars("z", arity);
    let mut out = TruncatedSeries::zero(vars, degree);
    if arity == 0 {
        if degree == 0 {
            out.add_term(Vec::new(), C::one());
        }
        return Ok(out);
    }
    let mut exps = Vec::with_capacity(arity);
    let min_exp = support.first().map(|s| s.0 as u32).unwrap_or(u32::MAX);
    fn rec<C: CoefficientRing>(
        support: &[(u16, &C)],
        arity: usize,
        remaining: u32,
        min_exp: u32,
        exps: &mut Vec<u16>,
        coef: C,
        out: &mut TruncatedSeries<C>,
    ) {
        let slots_left = (arity - exps.len()) as u32;
        if slots_left == 0 {
            if remaining == 0 {
                out.add_term(exps.clone(), coef);
            }
            return;
        }
        for &(k, c) in support {
            let k32 = k as u32;
            if k32 > remaining || k32 + (slots_left - 1) * min_exp > remaining {
                break;
            }
            exps.push(k);
            rec(support, arity, remaining - k32, min_exp, exps, coef.mul_ref(c), out);
            exps.pop();
        }
    }
    rec(&support, arity, degree, min_exp, &mut exps, C::one(), &mut out);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub vars: Vec<String>,
    pub cap: u32,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Exponents,
    pub coef: String,
}

impl<C: CoefficientRing> Serialize for TruncatedSeries<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de, C: CoefficientRing> Deserialize<'de> for TruncatedSeries<C> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let json = SeriesJson::deserialize(d)?;
        Self::from_json(&json).map_err(serde::de::Error::custom)
    }
}

/// Convenience: the univariate rational series with the given (exponent, coefficient) pairs.
pub fn qseries(var: &str, cap: u32, coeffs: &[(u16, Rational)]) -> TruncatedSeries<Rational> {
    TruncatedSeries::univariate(var, cap, coeffs.iter().cloned())
}

impl<C: CoefficientRing> TruncatedSeries<C> {
    /// The identity series x in one variable.
    pub fn identity(var: &str, cap: u32) -> Self {
        Self::univariate(var, cap, [(1, C::one())])
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};

    type Q = TruncatedSeries<Rational>;

    fn xy(cap: u32) -> (Q, Q) {
        let vars = vec!["x".to_string(), "y".to_string()];
        (Q::variable(vars.clone(), cap, 0), Q::variable(vars, cap, 1))
    }

    #[test]
    fn substitute_examples() {
        let f = qseries("x", 3, &[(2, int(1))]);
        let (x, y) = xy(3);
        let s = x.add(&y).unwrap();
        let got = f.substitute(&[("x", &s)]).unwrap();
        let want = Q::from_terms(s.vars().to_vec(), 3, [(vec![2, 0], int(1)), (vec![1, 1], int(2)), (vec![0, 2], int(1))]);
        assert_eq!(got, want);

        let log = qseries("x", 2, &[(1, int(1)), (2, ratio(1, 2))]);
        let two_x = qseries("x", 2, &[(1, int(2))]);
        assert_eq!(log.compose(&two_x).unwrap(), qseries("x", 2, &[(1, int(2)), (2, int(2))]));
        let id = Q::identity("x", 2);
        assert_eq!(log.compose(&id).unwrap(), log);
    }

    #[test]
    fn substitute_rejects_constant_terms() {
        let f = qseries("x", 3, &[(2, int(1))]);
        let one_plus_x = qseries("x", 3, &[(0, int(1)), (1, int(1))]);
        assert!(matches!(f.substitute(&[("x", &one_plus_x)]), Err(SeriesError::ConstantTerm(_))));
    }

    #[test]
    fn reverse_examples() {
        let f = qseries("x", 3, &[(1, int(1)), (2, ratio(1, 2))]);
        let g = f.reverse().unwrap();
        assert_eq!(g, qseries("x", 3, &[(1, int(1)), (2, ratio(-1, 2)), (3, ratio(1, 2))]));
        assert_eq!(f.compose(&g).unwrap(), Q::identity("x", 3));
        assert_eq!(Q::identity("x", 5).reverse().unwrap(), Q::identity("x", 5));
        let bad = qseries("x", 3, &[(2, int(1))]);
        assert_eq!(bad.reverse(), Err(SeriesError::NotInvertible));
    }

    #[test]
    fn gradability() {
        let p = Prime::new(3).unwrap();
        assert!(!qseries("x", 5, &[(1, int(1)), (4, int(1))]).is_pn_gradable(p, 1));
        assert!(qseries("x", 5, &[(1, int(1)), (3, int(1))]).is_pn_gradable(p, 1));
        assert!(!qseries("x", 5, &[(1, int(1)), (2, int(1))]).is_pn_gradable(p, 1));
    }

    #[test]
    fn symmetric_products() {
        let x = qseries("x", 5, &[(1, int(1))]);
        let got = symmetric_product_expand(&x, 3, 3).unwrap();
        assert_eq!(got.terms().collect::<Vec<_>>(), vec![(&vec![1, 1, 1], &int(1))]);
        let f = qseries("x", 5, &[(1, int(1)), (2, int(1))]);
        let got = symmetric_product_expand(&f, 2, 3).unwrap();
        let keys: Vec<_> = got.terms().map(|(e, _)| e.clone()).collect();
        assert_eq!(keys, vec![vec![1, 2], vec![2, 1]]);
        assert!(got.is_symmetric());
    }

    #[test]
    fn json_round_trip() {
        let f = qseries("x", 4, &[(1, int(1)), (3, ratio(-2, 3))]);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"{"vars":["x"],"cap":4,"terms":[{"exp":[1],"coef":"1"},{"exp":[3],"coef":"-2/3"}]}"#);
        let back: Q = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.cap(), 4);
    }

    #[test]
    fn memory_cap_breach() {
        let (x, y) = xy(6);
        let r = with_memory_limit_mb(Some(0), || x.add(&y).unwrap().pow(3));
        assert!(matches!(r, Err(SeriesError::MemoryCap { .. })));
    }

    #[test]
    fn caps_are_never_extended() {
        let f = qseries("x", 4, &[(1, int(1))]);
        assert!(f.truncate(5).is_err());
        let g = qseries("x", 2, &[(1, int(1))]);
        assert_eq!(f.add(&g).unwrap().cap(), 2);
    }
}
