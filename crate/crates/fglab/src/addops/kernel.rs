//! Partition-indexed symbol data for additive operations.
//!
//! For a source exponential exp_S and a target logarithm log_T put
//! Q_a(t) = Σ_k e_k [z^a] log_T(z)^k t^k, where e_k are the coefficients of
//! exp_S. Then ∏_j exp_S(t·log_T(z_j)) = Σ_α z^α M_α(t) with
//! M_α = ∏_j Q_{α_j}, and the t-degree records the codimension. An operation
//! with multipliers λ(D) has coefficient Σ_D λ(D) [t^D] M_α at z^α.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::arith::Rational;
use crate::fgl::FormalGroupLaw;

/// A nonincreasing list of positive parts.
pub type Partition = Vec<u16>;

#[derive(Debug, Clone)]
pub struct KernelEntry {
    pub parts: Partition,
    pub degree: u32,
    /// Coefficients of M_α(t), t^0 ..= t^degree.
    pub m: Vec<Rational>,
}

impl KernelEntry {
    pub fn arity(&self) -> usize {
        self.parts.len()
    }

    /// [t^d] M_α.
    pub fn at(&self, d: u32) -> &Rational {
        static ZERO: std::sync::OnceLock<Rational> = std::sync::OnceLock::new();
        self.m.get(d as usize).unwrap_or_else(|| ZERO.get_or_init(Rational::zero))
    }

    /// Σ_D λ(D) [t^D] M_α.
    pub fn pair(&self, lambda: &BTreeMap<u32, Rational>) -> Rational {
        let mut total = Rational::zero();
        for (&d, l) in lambda.range(..=self.degree) {
            let m = self.at(d);
            if !m.is_zero() && !l.is_zero() {
                total += m * l;
            }
        }
        total
    }
}

/// All M_α for partitions with at most `arity` parts and weight at most `degree`,
/// sorted by (weight, length, parts).
#[derive(Debug, Clone)]
pub struct SymbolKernel {
    pub degree: u32,
    pub arity: u32,
    /// q[a][k] = [t^k] Q_a.
    pub q: Vec<Vec<Rational>>,
    pub entries: Vec<KernelEntry>,
}

fn poly_mul(a: &[Rational], b: &[Rational], max_deg: usize) -> Vec<Rational> {
    let len = (a.len() + b.len()).saturating_sub(1).min(max_deg + 1);
    let mut out = vec![Rational::zero(); len];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

impl SymbolKernel {
    pub fn new(source: &FormalGroupLaw, target: &FormalGroupLaw, arity: u32, degree: u32) -> Self {
        let n = degree as usize;
        let e = dense(source.exp(), n);
        let log = dense(target.log(), n);
        // powers[k][a] = [z^a] log^k
        let mut powers = vec![vec![Rational::zero(); n + 1]; n + 1];
        powers[0][0] = Rational::from_integer(1.into());
        for k in 1..=n {
            powers[k] = poly_mul(&powers[k - 1], &log, n);
            powers[k].resize(n + 1, Rational::zero());
        }
        let mut q = vec![vec![Rational::zero(); n + 1]; n + 1];
        for a in 1..=n {
            for k in 1..=a {
                if !e[k].is_zero() && !powers[k][a].is_zero() {
                    q[a][k] = &e[k] * &powers[k][a];
                }
            }
        }
        let mut entries = Vec::new();
        let mut parts = Vec::new();
        let one = vec![Rational::from_integer(1.into())];
        enumerate(&q, arity as usize, degree, degree as u16, 0, &one, &mut parts, &mut entries);
        entries.sort_by(|x, y| (x.degree, x.parts.len(), &x.parts).cmp(&(y.degree, y.parts.len(), &y.parts)));
        SymbolKernel { degree, arity, q, entries }
    }

    /// Entries with weight in `lo..=hi`.
    pub fn window(&self, lo: u32, hi: u32) -> impl Iterator<Item = &KernelEntry> {
        let start = self.entries.partition_point(|e| e.degree < lo);
        self.entries[start..].iter().take_while(move |e| e.degree <= hi)
    }

    pub fn find(&self, parts: &[u16]) -> Option<&KernelEntry> {
        self.entries.iter().find(|e| e.parts == parts)
    }
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    q: &[Vec<Rational>],
    arity: usize,
    budget: u32,
    max_part: u16,
    weight: u32,
    m: &[Rational],
    parts: &mut Vec<u16>,
    out: &mut Vec<KernelEntry>,
) {
    if !parts.is_empty() {
        out.push(KernelEntry { parts: parts.clone(), degree: weight, m: m.to_vec() });
    }
    if parts.len() == arity {
        return;
    }
    let top = max_part.min((budget - weight) as u16);
    for a in 1..=top {
        let next = poly_mul(m, &q[a as usize], (weight + a as u32) as usize);
        parts.push(a);
        enumerate(q, arity, budget, a, weight + a as u32, &next, parts, out);
        parts.pop();
    }
}

fn dense(s: &crate::QSeries, n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n + 1];
    for (e, c) in s.terms() {
        if (e[0] as usize) <= n {
            out[e[0] as usize] = c.clone();
        }
    }
    out
}

/// Distinct permutations of a partition, in lexicographic order.
pub fn permutations(parts: &[u16]) -> Vec<Vec<u16>> {
    let mut cur: Vec<u16> = parts.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn next_permutation(v: &mut [u16]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
