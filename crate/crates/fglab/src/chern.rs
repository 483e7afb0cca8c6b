//! Chern classes from a Morava law to a p^n-typical target.
//!
//! The series θ = log_S(c_tot) is additive in its argument, so
//! c_tot = exp_S(Σ θ_i t^i) and c_i = θ_i + P_i(c_1, …, c_{i−1}) where
//! P_i = [t^i](c_tot − log_S c_tot). The tower is built one index at a time:
//! the symbol of P_i is folded into the residues of the staged solver, which
//! then picks the additive part θ_i of least leading valuation.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::addops::{
    d_recursion, g_from_kernel, solve_stages, AddopsError, Caps, DiagonalOperation, LambdaTable, LeadMode, Partition, SolvePath,
    SolverConfig, StageFailure, SymbolKernel,
};
use crate::arith::{format_rational, int, is_p_unit, vp, vp_integer, Prime, Rational};
use crate::fgl::{FglError, FormalGroupLaw, LawKind};
use crate::series::{indexed_vars, SeriesError};
use crate::{ArakiSeries, GradedPolynomial, QSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChernError {
    #[error(transparent)]
    Addops(#[from] AddopsError),
    #[error(transparent)]
    Fgl(#[from] FglError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("the source must be a Morava law")]
    SourceNotMorava,
    #[error("the target law is not {0}-typical")]
    NotTypical(u64),
    #[error("caps are insufficient: {0}")]
    CapInsufficient(String),
    #[error("no admissible c_{index}: stage {} at {:?}: {}", .failure.stage, .failure.parts, .failure.reason)]
    Solver { index: u32, failure: StageFailure },
    #[error("c_{index} is not integral at arity {arity}, monomial {monomial:?}: {value}")]
    NotIntegral { index: u32, arity: usize, monomial: Vec<u16>, value: String },
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
}

/// Largest Chern index, arity of the symbols and their degree cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerCaps {
    pub max_index: u32,
    pub arity: u32,
    pub degree: u32,
}

impl TowerCaps {
    fn caps(self) -> Caps {
        Caps { arity: self.arity, degree: self.degree }
    }

    pub fn describe(self) -> String {
        format!("I={} L={} N={}", self.max_index, self.arity, self.degree)
    }
}

/// P_i for i = 1..=max_index as polynomials in c_1, c_2, … (variable j is c_j).
pub fn chern_polynomials(source: &FormalGroupLaw, max_index: u32) -> Result<Vec<GradedPolynomial>, SeriesError> {
    let cap = max_index;
    let total = ArakiSeries::univariate("t", cap, (1..=max_index).map(|j| (j as u16, GradedPolynomial::generator(j as usize))));
    let mut log_of_total = ArakiSeries::zero(vec!["t".into()], cap);
    let mut power = total.clone();
    for k in 1..=max_index {
        let l_k = source.log().coeff(&[k as u16]);
        if !l_k.is_zero() {
            let term = power.scale(&GradedPolynomial::constant(l_k));
            log_of_total = log_of_total.add(&term)?;
        }
        if k < max_index {
            power = power.mul(&total)?;
        }
    }
    let diff = total.sub(&log_of_total)?;
    Ok((1..=max_index).map(|i| diff.coeff(&[i as u16])).collect())
}

/// Substitutes symbol series for c_1, c_2, … into a Chern polynomial.
pub fn evaluate_polynomial(poly: &GradedPolynomial, classes: &[QSeries], zero: &QSeries) -> Result<QSeries, SeriesError> {
    let mut powers: HashMap<(usize, u32), QSeries> = HashMap::new();
    let mut total = zero.clone();
    for (exps, coef) in poly.terms() {
        let mut term: Option<QSeries> = None;
        let mut vanishes = false;
        for (j, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let Some(base) = classes.get(j) else {
                vanishes = true;
                break;
            };
            if base.is_zero() {
                vanishes = true;
                break;
            }
            if !powers.contains_key(&(j, e)) {
                let mut k = (1..e).rev().find(|k| powers.contains_key(&(j, *k))).unwrap_or(0);
                let mut acc = if k == 0 { base.clone() } else { powers[&(j, k)].clone() };
                if k == 0 {
                    k = 1;
                    powers.insert((j, 1), acc.clone());
                }
                while k < e {
                    acc = acc.mul(base)?;
                    k += 1;
                    powers.insert((j, k), acc.clone());
                }
            }
            let factor = &powers[&(j, e)];
            term = Some(match term {
                None => factor.clone(),
                Some(t) => t.mul(factor)?,
            });
        }
        if vanishes {
            continue;
        }
        let term = match term {
            Some(t) => t.scale(coef),
            None => zero.add(&QSeries::constant(zero.vars().to_vec(), zero.cap(), coef.clone()))?,
        };
        total = total.add(&term)?;
    }
    Ok(total)
}

/// The exponent μ_i = max(0, −ν_p(P_i)) read from the polynomial's coefficients.
pub fn mu_from_polynomial(poly: &GradedPolynomial, p: Prime) -> u32 {
    poly.min_valuation(p).map(|v| (-v).max(0) as u32).unwrap_or(0)
}

/// μ_i = k for i = p^{nk}·v with p^n ∤ v.
pub fn mu_closed_form(p: Prime, n: u32, i: u32) -> u32 {
    let q = p.get().pow(n);
    let mut i = i as u64;
    let mut k = 0;
    while i > 0 && i.is_multiple_of(q) {
        i /= q;
        k += 1;
    }
    k
}

/// Chern classes c_1..c_I with their symbols on products of projective spaces.
#[derive(Debug, Clone)]
pub struct ChernTower {
    pub source: FormalGroupLaw,
    pub target: FormalGroupLaw,
    pub n: u32,
    pub caps: TowerCaps,
    /// θ_i, the additive part of c_i.
    pub thetas: Vec<DiagonalOperation>,
    /// P_i in c_1..c_{i−1}.
    pub polynomials: Vec<GradedPolynomial>,
    /// symbols[i − 1][l − 1] = G_l(c_i) in z_1..z_l.
    pub symbols: Vec<Vec<QSeries>>,
    /// Which solver phase produced each θ_i.
    pub paths: Vec<SolvePath>,
    kernel: SymbolKernel,
}

impl ChernTower {
    pub fn build(source: &FormalGroupLaw, target: &FormalGroupLaw, caps: TowerCaps, config: SolverConfig) -> Result<Self, ChernError> {
        let spec = match source.kind() {
            LawKind::Morava(spec) => spec.clone(),
            _ => return Err(ChernError::SourceNotMorava),
        };
        let p = source.prime();
        let n = spec.n;
        if !target.is_pn_typical(n)? {
            return Err(ChernError::NotTypical(p.get().pow(n)));
        }
        if caps.max_index == 0 || caps.arity == 0 || caps.degree < caps.max_index {
            return Err(ChernError::CapInsufficient(format!("{} needs N ≥ I ≥ 1 and L ≥ 1", caps.describe())));
        }
        if source.cap() < caps.degree || target.cap() < caps.degree {
            return Err(ChernError::CapInsufficient(format!("laws must be known to degree {}", caps.degree)));
        }
        let period = (p.get().pow(n) - 1) as u32;
        let kernel = SymbolKernel::new(source, target, caps.arity, caps.degree);
        let polynomials = chern_polynomials(source, caps.max_index)?;
        let zeros: Vec<QSeries> = (1..=caps.arity as usize).map(|l| QSeries::zero(indexed_vars("z", l), caps.degree)).collect();

        let mut tower = ChernTower {
            source: source.clone(),
            target: target.clone(),
            n,
            caps,
            thetas: Vec::new(),
            polynomials,
            symbols: Vec::new(),
            paths: Vec::new(),
            kernel,
        };
        for i in 1..=caps.max_index {
            let poly = &tower.polynomials[(i - 1) as usize];
            let mut residual_series = Vec::with_capacity(zeros.len());
            for (l_idx, zero) in zeros.iter().enumerate() {
                let classes: Vec<QSeries> = tower.symbols.iter().map(|s| s[l_idx].clone()).collect();
                residual_series.push(evaluate_polynomial(poly, &classes, zero)?);
            }
            let residue: HashMap<Partition, Rational> = tower
                .kernel
                .entries
                .iter()
                .filter_map(|e| {
                    let c = residual_series[e.arity() - 1].coeff(&e.parts);
                    (!c.is_zero()).then(|| (e.parts.clone(), c))
                })
                .collect();
            let (lambda, path) = solve_stages(&tower.kernel, p, i, period, Some(&residue), LeadMode::Generator, config)
                .map_err(|failure| ChernError::Solver { index: i, failure })?;
            let mut theta = DiagonalOperation::new(source, target, i, lambda, caps.caps())?;
            theta.leading_valuation = vp(&theta.lambda_at(i), p).finite();
            let mut symbols = Vec::with_capacity(zeros.len());
            for (l_idx, rest) in residual_series.iter().enumerate() {
                let g = g_from_kernel(&tower.kernel, l_idx + 1, |e| e.pair(&theta.lambda));
                symbols.push(g.add(rest)?);
            }
            for (l_idx, g) in symbols.iter().enumerate() {
                if let Some((e, c)) = g.terms().find(|(_, c)| !crate::arith::is_p_integral(c, p)) {
                    return Err(ChernError::NotIntegral { index: i, arity: l_idx + 1, monomial: e.clone(), value: format_rational(c) });
                }
            }
            tower.thetas.push(theta);
            tower.symbols.push(symbols);
            tower.paths.push(path);
        }
        Ok(tower)
    }

    pub fn prime(&self) -> Prime {
        self.source.prime()
    }

    /// p^n.
    pub fn q(&self) -> u32 {
        self.prime().get().pow(self.n) as u32
    }

    /// G_l(c_i).
    pub fn symbol(&self, i: u32, l: usize) -> Option<&QSeries> {
        self.symbols.get((i as usize).checked_sub(1)?)?.get(l.checked_sub(1)?)
    }

    /// The coefficient of z^α in G_{len α}(c_i).
    pub fn coefficient(&self, i: u32, parts: &[u16]) -> Result<Rational, ChernError> {
        let need = parts.iter().map(|&a| a as u32).sum::<u32>();
        if i > self.caps.max_index || parts.len() as u32 > self.caps.arity || need > self.caps.degree {
            return Err(ChernError::CapInsufficient(format!("c_{i} at {parts:?} is outside {}", self.caps.describe())));
        }
        Ok(self.symbol(i, parts.len()).map(|g| g.coeff(parts)).unwrap_or_else(Rational::zero))
    }

    /// a_i: the coefficient of z_1⋯z_i in c_i(z_1⋯z_i).
    pub fn constant_a(&self, i: u32) -> Result<Rational, ChernError> {
        self.coefficient(i, &vec![1; i as usize])
    }

    /// e_j: the coefficient of z_1⋯z_l in c_{p^n}(z_1⋯z_l), l = 1 + j(p^n − 1).
    pub fn constant_e(&self, j: u32) -> Result<Rational, ChernError> {
        let l = 1 + j * (self.q() - 1);
        self.coefficient(self.q(), &vec![1; l as usize])
    }

    /// Coefficients (α_i, β_i) of z_1⋯z_l and z_1^{p^n} z_2⋯z_l in G_l of the
    /// additive part of c_{p^n}, l = 1 + i(p^n − 1), for every i within caps,
    /// checked against the pull-back relation along [p] on the first factor.
    pub fn additive_recursion(&self) -> Result<RecursionCheck, ChernError> {
        let q = self.q();
        let theta =
            self.thetas.get((q - 1) as usize).ok_or_else(|| ChernError::CapInsufficient(format!("the tower stops before index {q}")))?;
        let m = q - 1;
        let mut alphas = Vec::new();
        let mut betas = Vec::new();
        let mut i = 0;
        loop {
            let l = 1 + i * m;
            if l > self.caps.arity || q + l - 1 > self.caps.degree {
                break;
            }
            let mut beta_parts = vec![1u16; l as usize];
            beta_parts[0] = q as u16;
            let pair = |parts: &[u16]| self.kernel.find(parts).map(|e| e.pair(&theta.lambda)).unwrap_or_else(Rational::zero);
            alphas.push(pair(&vec![1; l as usize]));
            betas.push(pair(&beta_parts));
            i += 1;
        }
        let p_series = self.source.m_series(self.prime().get() as i64)?;
        let v_n = p_series.coeff(&[q as u16]);
        if v_n.is_zero() {
            return Err(ChernError::CrossCheck("[p]·x has no x^{p^n} term".into()));
        }
        let p = Rational::from_integer(self.prime().as_bigint());
        let factor = (num_traits::pow(p.clone(), q as usize) - &p) / &v_n;
        let mut predicted = Vec::new();
        let mut stated_sign_holds = true;
        for k in 0..alphas.len().saturating_sub(1) {
            predicted.push(&alphas[k] + &factor * &betas[k]);
            stated_sign_holds &= &alphas[k] - &factor * &betas[k] == alphas[k + 1];
        }
        let holds = predicted.iter().zip(&alphas[1..]).all(|(x, y)| x == y);
        Ok(RecursionCheck { v_n, alphas, betas, predicted, holds, stated_sign_holds })
    }

    /// Coefficients of z_1⋯z_l in (Ψ_k − k^{p^n})∘c_{p^n} on z_1⋯z_l, l = 1 + j(p^n − 1).
    pub fn chi_constants(&self, k: i64, j_max: u32) -> Result<Vec<ChiConstant>, ChernError> {
        let q = self.q();
        let adams = AdamsOperation::new(&self.source, k)?;
        let kq = num_traits::pow(int(k), q as usize);
        let mut out = Vec::new();
        for j in 2..=j_max {
            let l = (1 + j * (q - 1)) as usize;
            let g = self
                .symbol(q, l)
                .filter(|_| l as u32 <= self.caps.arity && l as u32 <= self.caps.degree && q <= self.caps.max_index)
                .ok_or_else(|| ChernError::CapInsufficient(format!("h_{j} needs c_{q} at arity {l}")))?;
            let psi = adams.apply(g)?;
            let chi = psi.sub(&g.scale(&kq))?;
            let value = chi.coeff(&vec![1; l]);
            let e_j = self.constant_e(j)?;
            let predicted = &e_j * &kq * (num_traits::pow(int(k), ((j - 1) * (q - 1)) as usize) - Rational::one());
            out.push(ChiConstant { j, k, value, predicted });
        }
        Ok(out)
    }

    /// χ constants with k = p.
    pub fn f_constants(&self, j_max: u32) -> Result<Vec<ChiConstant>, ChernError> {
        self.chi_constants(self.prime().get() as i64, j_max)
    }

    /// Min total degree of G_l(c_i) is at least i, for every i and l.
    pub fn degree_support_holds(&self) -> bool {
        self.symbols.iter().enumerate().all(|(i, gs)| gs.iter().all(|g| g.min_degree().is_none_or(|d| d as usize > i)))
    }

    /// G_l(c_i) vanishes unless l ≡ i mod p^n − 1.
    pub fn grading_support_holds(&self) -> bool {
        let m = (self.q() - 1) as usize;
        self.symbols
            .iter()
            .enumerate()
            .all(|(i, gs)| gs.iter().enumerate().all(|(l, g)| g.is_zero() || m == 1 || (l + 1) % m == (i + 1) % m))
    }

    /// Compares c_tot(u + v), built from additivity of θ and the polynomials
    /// P_i, with F_S(c_tot(u), c_tot(v)) computed from the law series, where
    /// u = z_1⋯z_a and v = z_{a+1}⋯z_{a+b}.
    pub fn cartan_holds(&self, a: usize, b: usize, cap: u32) -> Result<bool, ChernError> {
        if a == 0 || b == 0 || a.max(b) as u32 > self.caps.arity {
            return Err(ChernError::CapInsufficient(format!("Cartan check at ({a}, {b}) exceeds arity {}", self.caps.arity)));
        }
        let cap = cap.min(self.caps.degree);
        let vars = indexed_vars("z", a + b);
        let shifted: Vec<String> = (a + 1..=a + b).map(|k| format!("z{k}")).collect();
        let place = |g: &QSeries, shift: bool| -> Result<QSeries, SeriesError> {
            let g = if shift { g.rename(shifted.clone()) } else { g.clone() };
            g.embed(&vars)?.truncate(cap)
        };
        let top = self.caps.max_index as usize;
        let zero = QSeries::zero(vars.clone(), cap);
        let mut at_u = vec![zero.clone()];
        let mut at_v = vec![zero.clone()];
        let mut at_sum = vec![zero.clone()];
        for i in 1..=top {
            at_u.push(place(&self.symbols[i - 1][a - 1], false)?);
            at_v.push(place(&self.symbols[i - 1][b - 1], true)?);
            let theta = &self.thetas[i - 1];
            let tu = place(&g_from_kernel(&self.kernel, a, |e| e.pair(&theta.lambda)), false)?;
            let tv = place(&g_from_kernel(&self.kernel, b, |e| e.pair(&theta.lambda)), true)?;
            let rest = evaluate_polynomial(&self.polynomials[i - 1], &at_sum[1..], &zero)?;
            at_sum.push(tu.add(&tv)?.add(&rest)?);
        }
        let law = self.source.law()?;
        let mut x_powers = vec![t_one(&zero, top)];
        let mut y_powers = vec![t_one(&zero, top)];
        for k in 1..=top {
            x_powers.push(t_mul(&x_powers[k - 1], &at_u, top)?);
            y_powers.push(t_mul(&y_powers[k - 1], &at_v, top)?);
        }
        let mut rhs = vec![zero.clone(); top + 1];
        for (e, c) in law.terms() {
            let (i, j) = (e[0] as usize, e[1] as usize);
            if i + j > top || i + j == 0 {
                continue;
            }
            let prod = t_mul(&x_powers[i], &y_powers[j], top)?;
            for (slot, s) in rhs.iter_mut().zip(prod) {
                if !s.is_zero() {
                    *slot = slot.add(&s.scale(c))?;
                }
            }
        }
        Ok((1..=top).all(|i| at_sum[i] == rhs[i]))
    }

    /// λ tables of θ_1..θ_I.
    pub fn to_tables(&self) -> Result<Vec<LambdaTable>, ChernError> {
        Ok(self.thetas.iter().map(|t| t.to_table()).collect::<Result<_, _>>()?)
    }

    /// The Chow-valued classes whose additive parts are the codimension-i
    /// leads of this tower. Their symbols must equal the degree-i parts of
    /// this tower's symbols.
    pub fn truncation(&self) -> Result<TruncationCheck, ChernError> {
        let target = FormalGroupLaw::additive(self.prime(), self.caps.degree);
        let kernel = SymbolKernel::new(&self.source, &target, self.caps.arity, self.caps.degree);
        let zeros: Vec<QSeries> = (1..=self.caps.arity as usize).map(|l| QSeries::zero(indexed_vars("z", l), self.caps.degree)).collect();
        let mut symbols: Vec<Vec<QSeries>> = Vec::new();
        let mut matches = true;
        let mut integral = true;
        for i in 1..=self.caps.max_index {
            let lead = BTreeMap::from([(i, self.thetas[(i - 1) as usize].lambda_at(i))]);
            let mut row = Vec::new();
            for (l_idx, zero) in zeros.iter().enumerate() {
                let classes: Vec<QSeries> = symbols.iter().map(|s| s[l_idx].clone()).collect();
                let rest = evaluate_polynomial(&self.polynomials[(i - 1) as usize], &classes, zero)?;
                let g = g_from_kernel(&kernel, l_idx + 1, |e| e.pair(&lead)).add(&rest)?;
                matches &= g == self.symbols[(i - 1) as usize][l_idx].homogeneous_component(i);
                integral &= g.terms().all(|(_, c)| crate::arith::is_p_integral(c, self.prime()));
                row.push(g);
            }
            symbols.push(row);
        }
        Ok(TruncationCheck { matches, integral })
    }

    /// Cross-checks against the closed-form μ_i and b_i: μ from P_i must agree,
    /// and for a Chow target the lead of θ_i must have the valuation of b_i.
    pub fn cross_check_mu_b(&self, rows: &[MuBRow]) -> Result<(), ChernError> {
        let p = self.prime();
        for row in rows.iter().filter(|r| r.i <= self.caps.max_index) {
            let mu = mu_from_polynomial(&self.polynomials[(row.i - 1) as usize], p);
            if mu != row.mu {
                return Err(ChernError::CrossCheck(format!("μ_{} is {} from P_{} but {} in closed form", row.i, mu, row.i, row.mu)));
            }
            if matches!(self.target.kind(), LawKind::Additive) {
                let lead = self.thetas[(row.i - 1) as usize].lambda_at(row.i);
                if vp(&lead, p) != vp(&row.b, p) {
                    return Err(ChernError::CrossCheck(format!(
                        "θ_{} has lead {} but b_{} = {}",
                        row.i,
                        format_rational(&lead),
                        row.i,
                        format_rational(&row.b)
                    )));
                }
            }
        }
        Ok(())
    }
}

fn t_one(zero: &QSeries, top: usize) -> Vec<QSeries> {
    let mut out = vec![zero.clone(); top + 1];
    out[0] = QSeries::constant(zero.vars().to_vec(), zero.cap(), Rational::one());
    out
}

/// Product of polynomials in t with series coefficients, truncated at t^top.
fn t_mul(a: &[QSeries], b: &[QSeries], top: usize) -> Result<Vec<QSeries>, SeriesError> {
    let mut out: Vec<QSeries> = vec![QSeries::zero(a[0].vars().to_vec(), a[0].cap()); top + 1];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().take(top + 1 - i).filter(|(_, y)| !y.is_zero()) {
            out[i + j] = out[i + j].add(&x.mul(y)?)?;
        }
    }
    Ok(out)
}

/// Outcome of the additive-part recursion check.
#[derive(Debug, Clone)]
pub struct RecursionCheck {
    /// The x^{p^n} coefficient of [p]·x.
    pub v_n: Rational,
    pub alphas: Vec<Rational>,
    pub betas: Vec<Rational>,
    /// α_{i+1} = α_i + (p^{p^n} − p)β_i / v_n, from comparing the
    /// z_1^{p^n} z_2⋯z_l coefficients of G_l([p]z_1, z_2, …) and
    /// p·G_l + v_n·G_{l+p^n−1}(z_1, …, z_1, z_2, …).
    pub predicted: Vec<Rational>,
    pub holds: bool,
    /// Whether the same recursion with the sign of the β term flipped also holds.
    pub stated_sign_holds: bool,
}

/// A χ-operation constant with the value predicted from e_j.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiConstant {
    pub j: u32,
    pub k: i64,
    pub value: Rational,
    pub predicted: Rational,
}

/// The expected valuation t_j of h_j for k as in [`default_chi_k`].
pub fn expected_chi_valuation(p: Prime, j: u32) -> Option<u64> {
    if j < 2 {
        return None;
    }
    let v = vp_integer(&((j - 1) as i64).into(), p);
    Some(if p.get() != 2 {
        v + 1
    } else if v == 0 {
        1
    } else {
        v + 2
    })
}

/// Outcome of comparing a tower with its Chow truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationCheck {
    pub matches: bool,
    pub integral: bool,
}

/// 3 for p = 2, otherwise the least generator of (Z/p²)^×.
pub fn default_chi_k(p: Prime) -> i64 {
    let p = p.get();
    if p == 2 {
        return 3;
    }
    let m = p * p;
    let order = p * (p - 1);
    (2..m)
        .find(|&g| {
            if g % p == 0 {
                return false;
            }
            let mut x = 1u64;
            for k in 1..=order {
                x = x * g % m;
                if x == 1 {
                    return k == order;
                }
            }
            false
        })
        .expect("(Z/p²)^× is cyclic for odd p") as i64
}

/// The Adams operation Ψ_k: the ring map sending z to [k]·z on each factor.
#[derive(Debug, Clone)]
pub struct AdamsOperation {
    pub k: i64,
    /// [k]·x for the law.
    pub series: QSeries,
}

impl AdamsOperation {
    pub fn new(law: &FormalGroupLaw, k: i64) -> Result<Self, SeriesError> {
        Ok(AdamsOperation { k, series: law.m_series(k)? })
    }

    /// Ψ_k applied to a class given as a series in z_1..z_l.
    pub fn apply(&self, g: &QSeries) -> Result<QSeries, SeriesError> {
        let cap = g.cap().min(self.series.cap());
        let images =
            g.vars().iter().map(|v| self.series.rename(vec![v.clone()]).embed(g.vars())?.truncate(cap)).collect::<Result<Vec<_>, _>>()?;
        let assignment: Vec<(&str, &QSeries)> = g.vars().iter().map(String::as_str).zip(images.iter()).collect();
        g.truncate(cap)?.substitute(&assignment)
    }

    /// Multipliers read off Ψ_k(z_1⋯z_D) at z_1⋯z_D, for D = 1..=max.
    pub fn read_multipliers(&self, max: u32) -> Result<Vec<Rational>, SeriesError> {
        (1..=max)
            .map(|d| {
                let vars = indexed_vars("z", d as usize);
                let product = QSeries::from_terms(vars, d, [(vec![1; d as usize], Rational::one())]);
                Ok(self.apply(&product)?.coeff(&vec![1; d as usize]))
            })
            .collect()
    }

    /// Whether the diagonal operation with λ(D) = k^D has the same symbols as
    /// Ψ_k on every product of at most `caps.arity` projective spaces.
    pub fn is_diagonal(&self, law: &FormalGroupLaw, caps: Caps) -> Result<bool, ChernError> {
        let lambda: BTreeMap<u32, Rational> = (1..=caps.degree).map(|d| (d, num_traits::pow(int(self.k), d as usize))).collect();
        let kernel = SymbolKernel::new(law, law, caps.arity, caps.degree);
        for l in 1..=caps.arity as usize {
            let diagonal = g_from_kernel(&kernel, l, |e| e.pair(&lambda));
            let vars = indexed_vars("z", l);
            let product = QSeries::from_terms(vars, caps.degree, [(vec![1; l], Rational::one())]);
            if self.apply(&product)? != diagonal {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Closed-form exponents μ_i and image constants b_i = d_i / p^{μ_i}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuBRow {
    pub i: u32,
    pub d: Rational,
    pub mu: u32,
    pub b: Rational,
}

pub fn mu_and_b(p: Prime, n: u32, i_max: u32) -> Vec<MuBRow> {
    let d = d_recursion(p, n, i_max);
    (1..=i_max)
        .map(|i| {
            let d_i = d[(i - 1) as usize].clone();
            let mu = mu_closed_form(p, n, i);
            let b = &d_i / p.power(mu as i64);
            MuBRow { i, d: d_i, mu, b }
        })
        .collect()
}

/// One named constant with its provenance caps.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantRow {
    pub index: u32,
    pub name: String,
    pub value: Rational,
    pub caps: String,
}

impl ConstantRow {
    fn new(index: u32, name: &str, value: Rational, caps: String) -> Self {
        ConstantRow { index, name: name.into(), value, caps }
    }
}

/// Every named constant available at the tower's caps: a_i and the e_j, h_j,
/// f_j family from the self tower, d_i, μ_i and b_i from the closed forms.
pub fn constants_table(self_tower: &ChernTower, k: i64) -> Result<Vec<ConstantRow>, ChernError> {
    let caps = self_tower.caps;
    let label = caps.describe();
    let p = self_tower.prime();
    let q = self_tower.q();
    let mut rows = Vec::new();
    for i in 1..=caps.max_index.min(caps.arity) {
        rows.push(ConstantRow::new(i, "a", self_tower.constant_a(i)?, label.clone()));
    }
    for r in mu_and_b(p, self_tower.n, caps.max_index) {
        rows.push(ConstantRow::new(r.i, "d", r.d.clone(), label.clone()));
        rows.push(ConstantRow::new(r.i, "mu", int(r.mu as i64), label.clone()));
        rows.push(ConstantRow::new(r.i, "b", r.b.clone(), label.clone()));
    }
    if q <= caps.max_index {
        let j_max = (caps.arity.min(caps.degree) - 1) / (q - 1);
        for j in 1..=j_max {
            rows.push(ConstantRow::new(j, "e", self_tower.constant_e(j)?, label.clone()));
        }
        for h in self_tower.chi_constants(k, j_max)? {
            rows.push(ConstantRow::new(h.j, "h", h.value, format!("{label} k={k}")));
        }
        for f in self_tower.f_constants(j_max)? {
            rows.push(ConstantRow::new(f.j, "f", f.value, format!("{label} k={}", p.get())));
        }
    }
    Ok(rows)
}

/// A stated valuation property and whether the computation satisfies it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl Claim {
    fn new(name: String, holds: bool, detail: String) -> Self {
        Claim { name, holds, detail }
    }
}

/// Valuation statements on the self-tower constants within caps.
pub fn constant_claims(self_tower: &ChernTower, k: i64) -> Result<Vec<Claim>, ChernError> {
    let p = self_tower.prime();
    let q = self_tower.q();
    let caps = self_tower.caps;
    let mut claims = Vec::new();
    for i in 1..=caps.max_index.min(caps.arity) {
        let a = self_tower.constant_a(i)?;
        let shown = format_rational(&a);
        claims.push(Claim::new(format!("a_{i} ≠ 0"), !a.is_zero(), shown.clone()));
        if i <= q {
            claims.push(Claim::new(format!("a_{i} is a unit"), is_p_unit(&a, p), shown));
        }
    }
    if q <= caps.max_index {
        let j_max = (caps.arity.min(caps.degree) - 1) / (q - 1);
        for j in 1..=j_max {
            let e = self_tower.constant_e(j)?;
            claims.push(Claim::new(format!("e_{j} is a unit"), is_p_unit(&e, p), format_rational(&e)));
        }
        let rec = self_tower.additive_recursion()?;
        claims.push(Claim::new(
            "additive-part recursion".into(),
            rec.holds,
            format!(
                "α = {:?}, β = {:?}, opposite β sign holds: {}",
                rec.alphas.iter().map(format_rational).collect::<Vec<_>>(),
                rec.betas.iter().map(format_rational).collect::<Vec<_>>(),
                rec.stated_sign_holds
            ),
        ));
        for h in self_tower.chi_constants(k, j_max)? {
            let v = vp(&h.value, p);
            let t = expected_chi_valuation(p, h.j).map(|t| t as i64);
            claims.push(Claim::new(
                format!("h_{} (k = {k}) has valuation t_{}", h.j, h.j),
                v.finite() == t && h.value == h.predicted,
                format!("h = {}, v = {v}, expected {t:?}", format_rational(&h.value)),
            ));
        }
        for f in self_tower.f_constants(j_max)? {
            let v = vp(&f.value, p);
            claims.push(Claim::new(
                format!("f_{} has valuation p^n", f.j),
                v.finite() == Some(q as i64) && f.value == f.predicted,
                format!("f = {}, v = {v}", format_rational(&f.value)),
            ));
        }
    }
    Ok(claims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::fgl::MoravaSpec;

    fn k(p: u64, n: u32, cap: u32) -> FormalGroupLaw {
        FormalGroupLaw::morava(&MoravaSpec::standard(Prime::new(p).unwrap(), n), cap).unwrap()
    }

    #[test]
    fn chern_polynomials_low_index() {
        // log = x + x²/2 at p = 2, n = 1: P_2 = −c_1²/2, P_3 = −c_1c_2
        let polys = chern_polynomials(&k(2, 1, 8), 4).unwrap();
        assert!(polys[0].is_zero());
        assert_eq!(polys[1], GradedPolynomial::monomial(vec![2], ratio(-1, 2)));
        assert_eq!(polys[2], GradedPolynomial::monomial(vec![1, 1], int(-1)));
        assert_eq!(mu_from_polynomial(&polys[3], Prime::new(2).unwrap()), 2);
    }

    #[test]
    fn mu_closed_form_values() {
        let p = Prime::new(2).unwrap();
        let mus: Vec<u32> = (1..=8).map(|i| mu_closed_form(p, 1, i)).collect();
        assert_eq!(mus, vec![0, 1, 0, 2, 0, 1, 0, 3]);
        assert_eq!(mu_closed_form(p, 2, 16), 2);
        assert_eq!(mu_closed_form(p, 2, 8), 1);
    }

    #[test]
    fn b_table_p2_n1() {
        let rows = mu_and_b(Prime::new(2).unwrap(), 1, 6);
        let b: Vec<Rational> = rows.iter().map(|r| r.b.clone()).collect();
        assert_eq!(b, [1, 1, 2, 2, 8, 8].map(int));
    }

    #[test]
    fn chow_tower_small() {
        let src = k(2, 1, 8);
        let tgt = FormalGroupLaw::additive(Prime::new(2).unwrap(), 8);
        let caps = TowerCaps { max_index: 4, arity: 4, degree: 8 };
        let tower = ChernTower::build(&src, &tgt, caps, SolverConfig::default()).unwrap();
        assert!(tower.degree_support_holds());
        assert!(tower.grading_support_holds());
        tower.cross_check_mu_b(&mu_and_b(src.prime(), 1, 4)).unwrap();
        assert!(tower.cartan_holds(1, 1, 8).unwrap());
        assert!(tower.cartan_holds(2, 1, 8).unwrap());
        for th in &tower.thetas {
            assert_eq!(th.lambda.len(), 1, "Chow-valued additive parts live in one codimension");
        }
    }

    #[test]
    fn additive_recursion_p3() {
        let src = k(3, 1, 9);
        let caps = TowerCaps { max_index: 3, arity: 5, degree: 9 };
        let tower = ChernTower::build(&src, &src, caps, SolverConfig::default()).unwrap();
        let rec = tower.additive_recursion().unwrap();
        assert!(rec.alphas.len() >= 3);
        assert!(rec.holds);
        assert!(is_p_unit(&tower.constant_e(1).unwrap(), src.prime()));
        assert!(is_p_unit(&tower.constant_e(2).unwrap(), src.prime()));
    }

    #[test]
    fn adams_multipliers() {
        let law = k(2, 1, 6);
        for kk in [0i64, 1, 3, -1] {
            let psi = AdamsOperation::new(&law, kk).unwrap();
            let m = psi.read_multipliers(4).unwrap();
            assert_eq!(m, (1..=4).map(|d| num_traits::pow(int(kk), d)).collect::<Vec<_>>());
            assert!(psi.is_diagonal(&law, Caps { arity: 3, degree: 6 }).unwrap());
        }
    }

    #[test]
    fn default_k_values() {
        assert_eq!(default_chi_k(Prime::new(2).unwrap()), 3);
        assert_eq!(default_chi_k(Prime::new(3).unwrap()), 2);
        assert_eq!(default_chi_k(Prime::new(7).unwrap()), 3);
        assert_eq!(expected_chi_valuation(Prime::new(2).unwrap(), 3), Some(3));
        assert_eq!(expected_chi_valuation(Prime::new(3).unwrap(), 2), Some(1));
    }
}
