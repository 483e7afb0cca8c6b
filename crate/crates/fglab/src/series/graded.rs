//! Polynomials over Q in generators v_1, v_2, … with deg v_j = 1 − p^j.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::CoefficientRing;
use crate::arith::{format_rational, parse_rational, Prime, Rational};

/// A sparse polynomial; exponent vectors are indexed by generator number minus one
/// and stored without trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct GradedPolynomial {
    terms: BTreeMap<Vec<u32>, Rational>,
}

fn trim(mut e: Vec<u32>) -> Vec<u32> {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

impl GradedPolynomial {
    pub fn constant(q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Vec::new(), q);
        }
        GradedPolynomial { terms }
    }

    /// The generator v_j, j ≥ 1.
    pub fn generator(j: usize) -> Self {
        assert!(j >= 1, "generators are numbered from 1");
        let mut e = vec![0; j];
        e[j - 1] = 1;
        GradedPolynomial::monomial(e, Rational::one())
    }

    pub fn monomial(exponents: Vec<u32>, coef: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(trim(exponents), coef);
        }
        GradedPolynomial { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Rational {
        let key = trim(exponents.to_vec());
        self.terms.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    /// The constant term, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = GradedPolynomial::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return GradedPolynomial::zero();
        }
        GradedPolynomial { terms: self.terms.iter().map(|(e, c)| (e.clone(), c * q)).collect() }
    }

    /// Degree of a monomial under deg v_j = 1 − p^j.
    pub fn monomial_degree(exponents: &[u32], p: Prime) -> i64 {
        exponents.iter().enumerate().map(|(idx, &k)| k as i64 * (1 - (p.get() as i64).pow(idx as u32 + 1))).sum()
    }

    /// Whether every monomial has degree `d`. The zero polynomial is homogeneous of every degree.
    pub fn is_homogeneous_of(&self, d: i64, p: Prime) -> bool {
        self.terms.keys().all(|e| Self::monomial_degree(e, p) == d)
    }

    /// The common degree of all monomials; `None` for zero or inhomogeneous input.
    pub fn homogeneous_degree(&self, p: Prime) -> Option<i64> {
        let mut degs = self.terms.keys().map(|e| Self::monomial_degree(e, p));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Sets every generator v_j with `kill(j)` to zero.
    pub fn kill_generators(&self, kill: impl Fn(usize) -> bool) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.iter().enumerate().all(|(idx, &k)| k == 0 || !kill(idx + 1)))
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        GradedPolynomial { terms }
    }

    /// Evaluates at rational generator values; missing values count as zero.
    pub fn evaluate(&self, values: &[Rational]) -> Rational {
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (idx, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                match values.get(idx) {
                    Some(v) => term *= num_traits::pow(v.clone(), k as usize),
                    None => term = Rational::zero(),
                }
            }
            total += term;
        }
        total
    }

    /// The smallest p-adic valuation among the coefficients; `None` for zero.
    pub fn min_valuation(&self, p: Prime) -> Option<i64> {
        self.terms.values().filter_map(|c| crate::arith::vp(c, p).finite()).min()
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }
}

impl fmt::Display for GradedPolynomial {
    /// Terms joined by " + ", each "coef" or "coef*v1^2*v3".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", format_rational(c))?;
            for (idx, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*v{}", idx + 1)?,
                    _ => write!(f, "*v{}^{}", idx + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for GradedPolynomial {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = GradedPolynomial::zero();
        if s.trim() == "0" {
            return Ok(out);
        }
        for term in s.split(" + ") {
            let mut factors = term.trim().split('*');
            let coef = parse_rational(factors.next().unwrap_or("")).map_err(|e| e.to_string())?;
            let mut e: Vec<u32> = Vec::new();
            for factor in factors {
                let body = factor.strip_prefix('v').ok_or_else(|| format!("bad factor {factor:?}"))?;
                let (idx, k) = match body.split_once('^') {
                    Some((i, k)) => (i, k.parse::<u32>().map_err(|_| format!("bad exponent in {factor:?}"))?),
                    None => (body, 1),
                };
                let idx: usize = idx.parse().map_err(|_| format!("bad generator in {factor:?}"))?;
                if idx == 0 {
                    return Err("generators are numbered from 1".into());
                }
                if e.len() < idx {
                    e.resize(idx, 0);
                }
                e[idx - 1] += k;
            }
            out.add_term(trim(e), coef);
        }
        Ok(out)
    }
}

impl Zero for GradedPolynomial {
    fn zero() -> Self {
        GradedPolynomial::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for GradedPolynomial {
    fn one() -> Self {
        GradedPolynomial::constant(Rational::one())
    }
}

impl Add for GradedPolynomial {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Neg for GradedPolynomial {
    type Output = Self;

    fn neg(self) -> Self {
        GradedPolynomial { terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect() }
    }
}

impl Sub for GradedPolynomial {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for &GradedPolynomial {
    type Output = GradedPolynomial;

    // exponents add under multiplication
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &GradedPolynomial) -> GradedPolynomial {
        let mut out = GradedPolynomial::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let len = ea.len().max(eb.len());
                let e: Vec<u32> = (0..len).map(|i| ea.get(i).copied().unwrap_or(0) + eb.get(i).copied().unwrap_or(0)).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Mul for GradedPolynomial {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl CoefficientRing for GradedPolynomial {
    fn from_rational(q: &Rational) -> Self {
        GradedPolynomial::constant(q.clone())
    }

    fn try_inverse(&self) -> Option<Self> {
        let c = self.as_constant()?;
        (!c.is_zero()).then(|| GradedPolynomial::constant(c.recip()))
    }

    fn grading(&self, p: Prime) -> Option<i64> {
        if self.is_zero() {
            return Some(0);
        }
        self.homogeneous_degree(p)
    }

    fn to_text(&self) -> String {
        self.to_string()
    }

    fn from_text(text: &str) -> Result<Self, String> {
        text.parse()
    }

    fn approx_bytes(&self) -> usize {
        self.terms.iter().map(|(e, c)| 72 + 4 * e.len() + c.approx_bytes()).sum::<usize>() + 24
    }

    fn mul_ref(&self, a: &Self) -> Self {
        self * a
    }
}
