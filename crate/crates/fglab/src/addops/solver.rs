//! Triangular integrality completion.
//!
//! Stage s fixes λ at codimension D_s = lead + s·(p^n − 1). Every partition of
//! weight in [D_s, D_{s+1} − 1] gives a constraint v_p(q·λ_s + r) ≥ 0 where q
//! is the M_α coefficient at D_s and r collects earlier stages. Each such
//! constraint is a p-adic ball, and the stage value is picked from their
//! intersection.
//!
//! Greedy picks can paint later stages into a corner. After the bounded retry
//! the solver falls back to an exact completion: unimodular row elimination
//! over Z_(p) decides feasibility of the whole system, and back-substitution
//! recovers a solution with the same canonical picks.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use super::kernel::{KernelEntry, Partition, SymbolKernel};
use super::{source_n, AddopsError, Caps, DiagonalOperation};
use crate::arith::{alternative_pick, ball_intersect, canonical_pick, format_rational, int, is_p_integral, PadicBall, Prime, Rational};
use crate::fgl::{FormalGroupLaw, MoravaSpec};

/// Search limits for the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    /// Largest leading valuation tried.
    pub e_max: u32,
    /// Alternative representatives tried per earlier stage after a failure.
    pub retries: u32,
    /// Run the exact completion when greedy search and retries fail.
    pub exact_completion: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { e_max: 24, retries: 2, exact_completion: true }
    }
}

impl SolverConfig {
    /// Greedy search with bounded retry only.
    pub fn greedy_only() -> Self {
        SolverConfig { exact_completion: false, ..Self::default() }
    }
}

/// Which phase of the search produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolvePath {
    Greedy,
    Retry,
    Exact,
}

/// How the stage-zero multiplier is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeadMode {
    /// λ_0 = p^e.
    FixedPower(u32),
    /// The element of least valuation allowed by the stage-zero constraints.
    Generator,
}

/// Where and why a stage has no admissible value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageFailure {
    pub stage: usize,
    pub parts: Partition,
    pub reason: String,
}

struct Stages<'a> {
    kernel: &'a SymbolKernel,
    p: Prime,
    degrees: Vec<u32>,
    residue: Option<&'a HashMap<Partition, Rational>>,
}

impl Stages<'_> {
    fn window(&self, s: usize) -> (u32, u32) {
        let hi = self.degrees.get(s + 1).map(|d| d - 1).unwrap_or(self.kernel.degree);
        (self.degrees[s], hi.min(self.kernel.degree))
    }

    fn residue(&self, entry: &KernelEntry) -> Rational {
        self.residue.and_then(|r| r.get(&entry.parts)).cloned().unwrap_or_else(Rational::zero)
    }

    fn offset(&self, entry: &KernelEntry, lambdas: &[Rational]) -> Rational {
        let mut r = self.residue(entry);
        for (d, l) in self.degrees.iter().zip(lambdas) {
            if !l.is_zero() {
                let m = entry.at(*d);
                if !m.is_zero() {
                    r += m * l;
                }
            }
        }
        r
    }

    fn fail(&self, s: usize, entry: &KernelEntry, reason: String) -> StageFailure {
        StageFailure { stage: s, parts: entry.parts.clone(), reason }
    }

    /// Residues below the lead must already be integral.
    fn check_below_lead(&self) -> Result<(), StageFailure> {
        let lead = self.degrees[0];
        if lead == 0 {
            return Ok(());
        }
        for entry in self.kernel.window(0, lead - 1) {
            let r = self.residue(entry);
            if !is_p_integral(&r, self.p) {
                return Err(self.fail(0, entry, format!("fixed coefficient {} below the lead", format_rational(&r))));
            }
        }
        Ok(())
    }

    /// The admissible set for stage s; `None` when no constraint involves λ_s.
    fn ball(&self, s: usize, lambdas: &[Rational]) -> Result<Option<PadicBall>, StageFailure> {
        let (lo, hi) = self.window(s);
        let d = self.degrees[s];
        let mut acc: Option<PadicBall> = None;
        for entry in self.kernel.window(lo, hi) {
            let q = entry.at(d);
            let r = self.offset(entry, &lambdas[..s]);
            if q.is_zero() {
                if !is_p_integral(&r, self.p) {
                    return Err(self.fail(s, entry, format!("fixed coefficient {} is not integral", format_rational(&r))));
                }
                continue;
            }
            let ball = PadicBall::from_affine(q, &r, self.p);
            acc = match acc {
                None => Some(ball),
                Some(prev) => match ball_intersect(&[prev, ball.clone()], self.p) {
                    Some(b) => Some(b),
                    None => return Err(self.fail(s, entry, format!("constraint {ball} is disjoint from earlier ones"))),
                },
            };
        }
        Ok(acc)
    }

    fn check_fixed(&self, s: usize, lambdas: &[Rational]) -> Result<(), StageFailure> {
        let (lo, hi) = self.window(s);
        for entry in self.kernel.window(lo, hi) {
            let c = self.offset(entry, lambdas);
            if !is_p_integral(&c, self.p) {
                return Err(self.fail(s, entry, format!("coefficient {} is not integral", format_rational(&c))));
            }
        }
        Ok(())
    }

    /// Exact feasibility over Z_(p) with back-substitution.
    ///
    /// Rows are (M_α at each stage codimension | fixed part). Columns 1.. are
    /// eliminated with unimodular row operations, pivoting on least valuation.
    /// Rows left without a pivot constrain λ_0 alone; pivot rows are then
    /// solved from the last column back.
    fn exact(&self, mode: LeadMode) -> Option<Vec<Rational>> {
        let lead = self.degrees[0];
        let cols = self.degrees.len();
        let mut rows: Vec<Vec<Rational>> = self
            .kernel
            .window(lead, self.kernel.degree)
            .map(|e| {
                let mut row: Vec<Rational> = self.degrees.iter().map(|&d| e.at(d).clone()).collect();
                row.push(self.residue(e));
                row
            })
            .collect();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
        let mut is_pivot = vec![false; rows.len()];
        for c in 1..cols {
            let best = rows
                .iter()
                .enumerate()
                .filter(|(r, row)| !is_pivot[*r] && !row[c].is_zero())
                .min_by_key(|(_, row)| crate::arith::vp(&row[c], self.p))
                .map(|(r, _)| r);
            let Some(pr) = best else { continue };
            is_pivot[pr] = true;
            pivot_of_col[c] = Some(pr);
            let prow = rows[pr].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if is_pivot[r] || row[c].is_zero() {
                    continue;
                }
                let f = &row[c] / &prow[c];
                for (k, v) in prow.iter().enumerate() {
                    if !v.is_zero() {
                        row[k] -= &f * v;
                    }
                }
            }
        }
        // rows without a pivot: row[0]·λ_0 + const must be integral
        let mut lead_ball: Option<PadicBall> = None;
        let lead_value = match mode {
            LeadMode::FixedPower(e) => {
                let v = self.p.power(e as i64);
                for (r, row) in rows.iter().enumerate() {
                    if !is_pivot[r] && !is_p_integral(&(&row[0] * &v + &row[cols]), self.p) {
                        return None;
                    }
                }
                v
            }
            LeadMode::Generator => {
                for (r, row) in rows.iter().enumerate() {
                    if is_pivot[r] {
                        continue;
                    }
                    if row[0].is_zero() {
                        if !is_p_integral(&row[cols], self.p) {
                            return None;
                        }
                        continue;
                    }
                    let b = PadicBall::from_affine(&row[0], &row[cols], self.p);
                    lead_ball = match lead_ball {
                        None => Some(b),
                        Some(prev) => Some(ball_intersect(&[prev, b], self.p)?),
                    };
                }
                match &lead_ball {
                    None => Rational::one(),
                    Some(b) if b.contains_zero(self.p) => self.p.power(b.radius()),
                    Some(b) => canonical_pick(b, self.p),
                }
            }
        };
        let mut lambdas = vec![Rational::zero(); cols];
        lambdas[0] = lead_value;
        for c in (1..cols).rev() {
            let Some(pr) = pivot_of_col[c] else { continue };
            let row = &rows[pr];
            let mut rest = row[cols].clone();
            for (k, l) in lambdas.iter().enumerate() {
                if k != c && !l.is_zero() && !row[k].is_zero() {
                    rest += &row[k] * l;
                }
            }
            lambdas[c] = canonical_pick(&PadicBall::from_affine(&row[c], &rest, self.p), self.p);
        }
        Some(lambdas)
    }

    fn greedy(&self, from: usize, lambdas: &mut Vec<Rational>, balls: &mut Vec<Option<PadicBall>>) -> Result<(), StageFailure> {
        for s in from..self.degrees.len() {
            let ball = self.ball(s, lambdas)?;
            let value = ball.as_ref().map(|b| canonical_pick(b, self.p)).unwrap_or_else(Rational::zero);
            lambdas.truncate(s);
            lambdas.push(value);
            balls.truncate(s);
            balls.push(ball);
        }
        Ok(())
    }
}

/// Runs the staged solve for one leading choice and returns λ keyed by codimension.
pub fn solve_stages(
    kernel: &SymbolKernel,
    p: Prime,
    lead: u32,
    period: u32,
    residue: Option<&HashMap<Partition, Rational>>,
    mode: LeadMode,
    config: SolverConfig,
) -> Result<(BTreeMap<u32, Rational>, SolvePath), StageFailure> {
    let mut degrees = Vec::new();
    let mut d = lead;
    while d <= kernel.degree {
        degrees.push(d);
        d += period.max(1);
    }
    if degrees.is_empty() {
        return Ok((BTreeMap::new(), SolvePath::Greedy));
    }
    let stages = Stages { kernel, p, degrees, residue };
    stages.check_below_lead()?;
    let (lead_value, lead_ball) = match mode {
        LeadMode::FixedPower(e) => {
            let v = p.power(e as i64);
            stages.check_fixed(0, std::slice::from_ref(&v))?;
            (v, None)
        }
        LeadMode::Generator => {
            let ball = stages.ball(0, &[])?;
            let v = match &ball {
                None => Rational::one(),
                Some(b) if b.contains_zero(p) => p.power(b.radius()),
                Some(b) => canonical_pick(b, p),
            };
            (v, ball)
        }
    };
    let mut lambdas = vec![lead_value];
    let mut balls = vec![lead_ball];
    let first_failure = match stages.greedy(1, &mut lambdas, &mut balls) {
        Ok(()) => return Ok((collect(&stages.degrees, &lambdas), SolvePath::Greedy)),
        Err(f) => f,
    };
    // bounded retry: vary one earlier stage at a time, most recent first
    let failed_at = first_failure.stage;
    for back in (1..failed_at).rev() {
        let Some(ball) = balls[back].clone() else { continue };
        for j in 1..=config.retries {
            let mut trial_l = lambdas[..back].to_vec();
            let mut trial_b = balls[..back].to_vec();
            trial_l.push(alternative_pick(&ball, p, j));
            trial_b.push(Some(ball.clone()));
            if stages.greedy(back + 1, &mut trial_l, &mut trial_b).is_ok() {
                return Ok((collect(&stages.degrees, &trial_l), SolvePath::Retry));
            }
        }
    }
    if config.exact_completion {
        if let Some(lambdas) = stages.exact(mode) {
            return Ok((collect(&stages.degrees, &lambdas), SolvePath::Exact));
        }
    }
    Err(first_failure)
}

fn collect(degrees: &[u32], lambdas: &[Rational]) -> BTreeMap<u32, Rational> {
    degrees.iter().zip(lambdas).filter(|(_, l)| !l.is_zero()).map(|(d, l)| (*d, l.clone())).collect()
}

fn check_caps(source: &FormalGroupLaw, target: &FormalGroupLaw, lead: u32, caps: Caps) -> Result<(), AddopsError> {
    if lead == 0 || lead > caps.degree || lead > caps.arity {
        return Err(AddopsError::CapInsufficient(format!("lead {lead} must lie in 1..=min(arity {}, degree {})", caps.arity, caps.degree)));
    }
    if source.cap() < caps.degree || target.cap() < caps.degree {
        return Err(AddopsError::CapInsufficient(format!("laws must be known to degree {}", caps.degree)));
    }
    Ok(())
}

/// The integral operation with λ(lead) = p^e for the least e the solver reaches.
pub fn solve_generator(
    source: &FormalGroupLaw,
    target: &FormalGroupLaw,
    lead: u32,
    caps: Caps,
    config: SolverConfig,
) -> Result<DiagonalOperation, AddopsError> {
    let n = source_n(source)?;
    check_caps(source, target, lead, caps)?;
    let period = (source.prime().get().pow(n) - 1) as u32;
    let kernel = SymbolKernel::new(source, target, caps.arity, caps.degree);
    let mut last = None;
    for e in 0..=config.e_max {
        match solve_stages(&kernel, source.prime(), lead, period, None, LeadMode::FixedPower(e), config) {
            Ok((lambda, _)) => {
                let mut op = DiagonalOperation::new(source, target, lead, lambda, caps)?;
                op.leading_valuation = Some(e as i64);
                if let Err(w) = super::integrality(&kernel, source.prime(), |en| en.pair(&op.lambda)) {
                    return Err(AddopsError::Inconsistent(format!(
                        "solver output fails integrality at {:?}: {}",
                        w.monomial,
                        format_rational(&w.coefficient)
                    )));
                }
                return Ok(op);
            }
            Err(f) => last = Some(f),
        }
    }
    let detail = last.map(|f| format!("stage {} at {:?}: {}", f.stage, f.parts, f.reason)).unwrap_or_default();
    Err(AddopsError::SearchExhausted { lead, e_max: config.e_max, last: detail })
}

/// The least p^k with p^k·ch_i integral from K(n) to Chow groups, by direct search.
pub fn d_constant(p: Prime, n: u32, i: u32, caps: Caps) -> Result<Rational, AddopsError> {
    if caps.arity < i || caps.degree < i {
        return Err(AddopsError::CapInsufficient(format!("d_{i} needs arity and degree caps of at least {i}")));
    }
    let source = FormalGroupLaw::morava(&MoravaSpec::standard(p, n), caps.degree)?;
    let target = FormalGroupLaw::additive(p, caps.degree);
    let kernel = SymbolKernel::new(&source, &target, caps.arity, caps.degree);
    const SEARCH_LIMIT: u32 = 256;
    for k in 0..=SEARCH_LIMIT {
        let lambda = BTreeMap::from([(i, p.power(k as i64))]);
        if super::integrality(&kernel, p, |e| e.pair(&lambda)).is_ok() {
            return Ok(p.power(k as i64));
        }
    }
    Err(AddopsError::SearchExhausted { lead: i, e_max: SEARCH_LIMIT, last: String::new() })
}

/// d_1 = 1 and d_i = max_{0<j<i} d_j d_{i−j}, times p when i is a power of p^n.
pub fn d_recursion(p: Prime, n: u32, i_max: u32) -> Vec<Rational> {
    let q = p.get().pow(n);
    let mut d: Vec<Rational> = vec![int(1)];
    for i in 2..=i_max as usize {
        let mut best = Rational::zero();
        for j in 1..i {
            let prod = &d[j - 1] * &d[i - j - 1];
            if prod > best {
                best = prod;
            }
        }
        let mut m = q;
        while m < i as u64 {
            m *= q;
        }
        if m == i as u64 {
            best *= int(p.get() as i64);
        }
        d.push(best);
    }
    d.truncate(i_max as usize);
    d
}

/// The solver's leading valuation at each square cap of the schedule; `None`
/// when the search limit is exceeded.
pub fn required_leading_valuation(
    source: &FormalGroupLaw,
    target: &FormalGroupLaw,
    lead: u32,
    schedule: &[u32],
    config: SolverConfig,
) -> Result<Vec<Option<u32>>, AddopsError> {
    let mut out = Vec::with_capacity(schedule.len());
    for &cap in schedule {
        match solve_generator(source, target, lead, Caps::square(cap), config) {
            Ok(op) => out.push(op.leading_valuation.map(|e| e as u32)),
            Err(AddopsError::SearchExhausted { .. }) => out.push(None),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prime(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn recursion_table() {
        let d: Vec<Rational> = d_recursion(prime(2), 1, 6);
        assert_eq!(d, [1, 2, 2, 8, 8, 16].map(int).to_vec());
        assert_eq!(d_recursion(prime(3), 1, 2)[1], int(1));
        assert_eq!(d_recursion(prime(2), 2, 4)[3], int(2));
    }

    #[test]
    fn brute_force_matches_small_cases() {
        let p = prime(2);
        for (i, want) in [(1, 1), (2, 2), (3, 2), (4, 8)] {
            assert_eq!(d_constant(p, 1, i, Caps::square(i + 2)).unwrap(), int(want));
        }
        assert!(matches!(d_constant(p, 1, 4, Caps::square(3)), Err(AddopsError::CapInsufficient(_))));
    }

    #[test]
    fn chow_generator_is_scaled_ch() {
        let p = prime(2);
        let k = FormalGroupLaw::morava(&MoravaSpec::standard(p, 1), 8).unwrap();
        let chow = FormalGroupLaw::additive(p, 8);
        let op = solve_generator(&k, &chow, 4, Caps::square(8), SolverConfig::default()).unwrap();
        assert_eq!(op.lambda, BTreeMap::from([(4, int(8))]));
        assert_eq!(op.leading_valuation, Some(3));
    }

    #[test]
    fn self_generators_low_leads() {
        let p = prime(2);
        let k = FormalGroupLaw::morava(&MoravaSpec::standard(p, 1), 8).unwrap();
        let op = solve_generator(&k, &k, 1, Caps::square(8), SolverConfig::default()).unwrap();
        assert_eq!(op.leading_valuation, Some(0));
        let op = solve_generator(&k, &k, 2, Caps::square(8), SolverConfig::default()).unwrap();
        assert_eq!(op.leading_valuation, Some(1));
        assert!(op.is_integral().is_ok());
    }
}
