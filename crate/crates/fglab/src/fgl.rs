//! Logarithm-backed formal group laws over Q with p-local checks.
//!
//! A law is stored as its logarithm; the exponential, the bivariate law
//! F(x, y) = exp(log x + log y) and the m-series are derived from it.

use std::sync::OnceLock;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{format_rational, int, is_p_integral, is_p_unit, parse_rational, vp, ArithError, Prime, Rational, Valuation};
use crate::series::{GradedPolynomial, SeriesError, TruncatedSeries};
use crate::{ArakiSeries, QSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FglError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("a_{index} = {value} is not a p-unit")]
    NonUnit { index: usize, value: String },
    #[error("coefficient of {monomial} is {value}, which is not p-integral")]
    NonIntegral { monomial: String, value: String },
    #[error("cap {cap} is too small; degree {needed} is required")]
    CapTooSmall { cap: u32, needed: u64 },
    #[error("logarithm must have zero constant term and linear coefficient 1")]
    InvalidLog,
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error("invalid law specification: {0}")]
    Spec(String),
}

/// Parameters of a Morava K(n) law: log = x + Σ_k (a_k/p^k) x^{p^{nk}}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoravaSpec {
    pub p: Prime,
    pub n: u32,
    /// a_1, a_2, …; indices past the end reuse the last entry.
    pub a: Vec<Rational>,
}

impl MoravaSpec {
    /// The default instance, every a_k = 1.
    pub fn standard(p: Prime, n: u32) -> Self {
        MoravaSpec { p, n, a: vec![Rational::one()] }
    }

    /// a_k = a_1^k for k ≤ `count`; integral for every unit a_1.
    pub fn geometric(p: Prime, n: u32, a1: Rational, count: usize) -> Self {
        let mut a = Vec::with_capacity(count);
        let mut cur = Rational::one();
        for _ in 0..count.max(1) {
            cur *= &a1;
            a.push(cur.clone());
        }
        MoravaSpec { p, n, a }
    }

    /// a_k from the recursion a_k = Σ_{i=1}^{k} s_i p^{i−1} a_{k−i}, a_0 = 1.
    /// With p-integral s_i and unit s_1 the resulting law is integral.
    pub fn from_recursion(p: Prime, n: u32, s: &[Rational], count: usize) -> Self {
        let mut a = vec![Rational::one()];
        for k in 1..=count.max(1) {
            let mut total = Rational::zero();
            for i in 1..=k {
                if let Some(si) = s.get(i - 1) {
                    total += si * p.power(i as i64 - 1) * &a[k - i];
                }
            }
            a.push(total);
        }
        a.remove(0);
        MoravaSpec { p, n, a }
    }

    /// a_k, 1-based.
    pub fn a_at(&self, k: usize) -> Rational {
        assert!(k >= 1);
        self.a.get(k - 1).or(self.a.last()).cloned().unwrap_or_else(Rational::one)
    }

    /// p^n.
    pub fn q(&self) -> u64 {
        self.p.get().pow(self.n)
    }

    pub fn validate(&self, count: usize) -> Result<(), FglError> {
        if self.n == 0 {
            return Err(FglError::Spec("n must be positive".into()));
        }
        for k in 1..=count.max(1) {
            let a = self.a_at(k);
            if !is_p_unit(&a, self.p) {
                return Err(FglError::NonUnit { index: k, value: format_rational(&a) });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LawKind {
    Morava(MoravaSpec),
    Multiplicative { beta: Rational },
    Additive,
    Log,
}

/// Outcome of the height computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeightVerdict {
    Finite(u32),
    Infinite,
    /// No unit coefficient visible below the cap.
    CapLimited,
}

#[derive(Debug, Clone)]
pub struct FormalGroupLaw {
    prime: Prime,
    kind: LawKind,
    log: QSeries,
    exp: QSeries,
    law: OnceLock<QSeries>,
}

impl PartialEq for FormalGroupLaw {
    fn eq(&self, other: &Self) -> bool {
        self.prime == other.prime && self.log == other.log && self.log.cap() == other.log.cap()
    }
}

/// Results of the group-law axiom checks up to the cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxiomReport {
    pub commutative: bool,
    pub unital: bool,
    pub associative: bool,
    pub log_exp_inverse: bool,
    /// log F(x, y) = log x + log y.
    pub log_additive: bool,
}

impl AxiomReport {
    pub fn all(&self) -> bool {
        self.commutative && self.unital && self.associative && self.log_exp_inverse && self.log_additive
    }
}

fn xy_vars() -> Vec<String> {
    vec!["x".into(), "y".into()]
}

impl FormalGroupLaw {
    /// A law from a univariate logarithm in `x` with log(x) = x + higher terms.
    pub fn from_log(prime: Prime, log: QSeries, kind: LawKind) -> Result<Self, FglError> {
        if log.vars().len() != 1 || !log.constant_term().is_zero() || log.cap() == 0 || !log.coeff(&[1]).is_one() {
            return Err(FglError::InvalidLog);
        }
        let log = log.rename(vec!["x".into()]);
        let exp = log.reverse()?;
        Ok(FormalGroupLaw { prime, kind, log, exp, law: OnceLock::new() })
    }

    pub fn morava(spec: &MoravaSpec, cap: u32) -> Result<Self, FglError> {
        let q = spec.q();
        let mut count = 0;
        let mut deg = q;
        while deg <= cap as u64 {
            count += 1;
            deg = deg.saturating_mul(q);
        }
        spec.validate(count)?;
        let mut coeffs = vec![(1u16, Rational::one())];
        let mut deg = q;
        for k in 1..=count {
            coeffs.push((deg as u16, spec.a_at(k) * spec.p.power(-(k as i64))));
            deg *= q;
        }
        let log = QSeries::univariate("x", cap, coeffs);
        Self::from_log(spec.p, log, LawKind::Morava(spec.clone()))
    }

    /// x + y + βxy.
    pub fn multiplicative(prime: Prime, beta: Rational, cap: u32) -> Result<Self, FglError> {
        let mut coeffs = Vec::new();
        let mut power = Rational::one();
        for k in 1..=cap {
            coeffs.push((k as u16, &power / int(k as i64)));
            power *= -&beta;
        }
        let log = QSeries::univariate("x", cap, coeffs);
        Self::from_log(prime, log, LawKind::Multiplicative { beta })
    }

    pub fn additive(prime: Prime, cap: u32) -> Self {
        let log = QSeries::identity("x", cap);
        FormalGroupLaw { prime, kind: LawKind::Additive, exp: log.clone(), log, law: OnceLock::new() }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn kind(&self) -> &LawKind {
        &self.kind
    }

    pub fn cap(&self) -> u32 {
        self.log.cap()
    }

    pub fn log(&self) -> &QSeries {
        &self.log
    }

    pub fn exp(&self) -> &QSeries {
        &self.exp
    }

    /// The Morava parameters, if this is a Morava law.
    pub fn morava_spec(&self) -> Option<&MoravaSpec> {
        match &self.kind {
            LawKind::Morava(s) => Some(s),
            _ => None,
        }
    }

    /// The same law with a smaller cap.
    pub fn truncated(&self, cap: u32) -> Result<Self, FglError> {
        let log = self.log.truncate(cap)?;
        Self::from_log(self.prime, log, self.kind.clone())
    }

    /// F(x, y) in variables x, y.
    pub fn law(&self) -> Result<&QSeries, FglError> {
        if let Some(f) = self.law.get() {
            return Ok(f);
        }
        let vars = xy_vars();
        let lx = self.log.embed(&vars)?;
        let ly = self.log.rename(vec!["y".into()]).embed(&vars)?;
        let f = self.exp.substitute(&[("x", &lx.add(&ly)?)])?;
        Ok(self.law.get_or_init(|| f))
    }

    /// F(a, b) for two series over a common variable list.
    pub fn apply(&self, a: &QSeries, b: &QSeries) -> Result<QSeries, FglError> {
        Ok(self.law()?.substitute(&[("x", a), ("y", b)])?)
    }

    /// [m](x) = exp(m log x).
    pub fn m_series(&self, m: i64) -> Result<QSeries, SeriesError> {
        self.exp.compose(&self.log.scale(&int(m)))
    }

    /// Every coefficient of F is p-integral; otherwise the first offender.
    pub fn integrality_witness(&self) -> Result<Option<(Vec<u16>, Rational)>, FglError> {
        Ok(self.law()?.terms().find(|(_, c)| !is_p_integral(c, self.prime)).map(|(e, c)| (e.clone(), c.clone())))
    }

    pub fn height_mod_p(&self) -> Result<HeightVerdict, FglError> {
        let p = self.prime;
        if let Some((e, c)) = self.integrality_witness()? {
            return Err(FglError::NonIntegral { monomial: format!("x^{} y^{}", e[0], e[1]), value: format_rational(&c) });
        }
        let cap = self.cap() as u64;
        if cap < p.get() {
            return Err(FglError::CapTooSmall { cap: self.cap(), needed: p.get() });
        }
        if matches!(self.kind, LawKind::Additive) {
            return Ok(HeightVerdict::Infinite);
        }
        let series = self.m_series(p.get() as i64)?;
        let mut k = 1u32;
        let mut deg = p.get();
        while deg <= cap {
            for (e, c) in series.terms() {
                let d = e[0] as u64;
                if d < deg && vp(c, p) < Valuation::Finite(1) {
                    return Err(FglError::Inconsistent(format!("[p]x has a unit coefficient at non-p-power degree {d}")));
                }
            }
            if is_p_unit(&series.coeff(&[deg as u16]), p) {
                return Ok(HeightVerdict::Finite(k));
            }
            k += 1;
            deg = deg.saturating_mul(p.get());
        }
        Ok(HeightVerdict::CapLimited)
    }

    /// The logarithm has only p-power exponents.
    pub fn is_p_typical(&self) -> bool {
        let p = self.prime.get();
        self.log.terms().all(|(e, _)| is_power_of(e[0] as u64, p))
    }

    /// The logarithm has only p^{nk} exponents; cross-checked against
    /// p-typicality together with p^n-gradability of [p](x).
    pub fn is_pn_typical(&self, n: u32) -> Result<bool, FglError> {
        let q = self.prime.get().pow(n);
        let direct = self.log.terms().all(|(e, _)| is_power_of(e[0] as u64, q));
        let indirect = self.is_p_typical() && self.m_series(self.prime.get() as i64)?.is_pn_gradable(self.prime, n);
        if direct != indirect {
            return Err(FglError::Inconsistent(format!("logarithm criterion says {direct}, p-series criterion says {indirect}")));
        }
        Ok(direct)
    }

    /// The units a_k recovered from the logarithm coefficients at x^{p^{nk}}.
    pub fn read_back_units(&self, n: u32) -> Vec<Rational> {
        let q = self.prime.get().pow(n);
        let mut out = Vec::new();
        let mut deg = q;
        let mut k = 1;
        while deg <= self.cap() as u64 {
            out.push(self.log.coeff(&[deg as u16]) * self.prime.power(k));
            deg *= q;
            k += 1;
        }
        out
    }

    pub fn check_axioms(&self) -> Result<AxiomReport, FglError> {
        let f = self.law()?;
        let cap = self.cap();
        let swapped = QSeries::from_terms(xy_vars(), cap, f.terms().map(|(e, c)| (vec![e[1], e[0]], c.clone())));
        let commutative = swapped == *f;
        let x_only: Vec<_> = f.terms().filter(|(e, _)| e[1] == 0).collect();
        let unital = x_only.len() == 1 && x_only[0].0 == &vec![1, 0] && x_only[0].1.is_one();

        let xyz: Vec<String> = vec!["x".into(), "y".into(), "z".into()];
        let x = QSeries::variable(xyz.clone(), cap, 0);
        let z = QSeries::variable(xyz.clone(), cap, 2);
        let fxy = f.embed(&xyz)?;
        let fyz = f.rename(vec!["y".into(), "z".into()]).embed(&xyz)?;
        let left = f.substitute(&[("x", &fxy), ("y", &z)])?;
        let right = f.substitute(&[("x", &x), ("y", &fyz)])?;
        let associative = left == right;

        let log_exp_inverse =
            self.log.compose(&self.exp)? == QSeries::identity("x", cap) && self.exp.compose(&self.log)? == QSeries::identity("x", cap);

        let lhs = self.log.substitute(&[("x", f)])?;
        let lx = self.log.embed(&xy_vars())?;
        let ly = self.log.rename(vec!["y".into()]).embed(&xy_vars())?;
        let log_additive = lhs == lx.add(&ly)?;
        Ok(AxiomReport { commutative, unital, associative, log_exp_inverse, log_additive })
    }
}

fn is_power_of(d: u64, q: u64) -> bool {
    let mut m = 1u64;
    while m < d {
        m = m.saturating_mul(q);
    }
    m == d
}

/// The universal p-typical logarithm Σ l_k x^{p^k} over Q[v_1..v_m], from
/// p·l_k = Σ_{i=0}^{k} l_i v_{k−i}^{p^i} with v_0 = p and v_j = 0 for j > m.
pub fn araki_log(m: usize, p: Prime, cap: u32) -> ArakiSeries {
    let v = |j: usize| -> GradedPolynomial {
        if j == 0 {
            GradedPolynomial::constant(Rational::from_integer(p.as_bigint()))
        } else if j <= m {
            GradedPolynomial::generator(j)
        } else {
            GradedPolynomial::zero()
        }
    };
    let mut l = vec![GradedPolynomial::one()];
    let mut degs = vec![1u64];
    let mut k = 1;
    while p.get().pow(k as u32) <= cap as u64 {
        let mut total = GradedPolynomial::zero();
        for (i, li) in l.iter().enumerate() {
            let vk = v(k - i);
            if vk.is_zero() {
                continue;
            }
            total = total + li * &vk.pow(p.get().pow(i as u32) as u32);
        }
        let denom = Rational::from_integer(p.as_bigint()) - Rational::from_integer(p.as_bigint().pow(p.get().pow(k as u32) as u32));
        l.push(total.scale(&denom.recip()));
        degs.push(p.get().pow(k as u32));
        k += 1;
    }
    TruncatedSeries::univariate("x", cap, degs.into_iter().map(|d| d as u16).zip(l))
}

/// Outcome of specializing the universal logarithm to the p^n-typical quotient.
#[derive(Debug, Clone, PartialEq)]
pub struct BpnReport {
    pub specialized: ArakiSeries,
    /// Exponents carrying a nonzero coefficient after specialization.
    pub exponents: Vec<u16>,
    /// Exponents of the form p^j with n ∤ j whose coefficient survived.
    pub violations: Vec<u16>,
    pub pass: bool,
}

/// Kills v_j for n ∤ j and checks that only x^{p^{nk}} terms survive.
pub fn bpn_check(n: u32, m: usize, p: Prime, cap: u32) -> BpnReport {
    let log = araki_log(m, p, cap);
    let specialized = log.map_coefficients(|c| c.kill_generators(|j| j % n as usize != 0));
    let q = p.get().pow(n);
    let exponents: Vec<u16> = specialized.terms().map(|(e, _)| e[0]).collect();
    let violations: Vec<u16> = exponents.iter().copied().filter(|&e| !is_power_of(e as u64, q)).collect();
    BpnReport { pass: violations.is_empty(), specialized, exponents, violations }
}

/// A strict isomorphism γ between two laws with its verification.
#[derive(Debug, Clone)]
pub struct StrictIso {
    /// γ = exp_1(log_2(x)), so that F1(γx, γy) = γ(F2(x, y)).
    pub gamma: QSeries,
    pub verified: bool,
}

pub fn strict_iso(f1: &FormalGroupLaw, f2: &FormalGroupLaw) -> Result<StrictIso, FglError> {
    if f1.prime() != f2.prime() {
        return Err(FglError::Spec("laws are over different primes".into()));
    }
    let cap = f1.cap().min(f2.cap());
    let gamma = f1.exp().truncate(cap)?.compose(&f2.log().truncate(cap)?)?;
    let vars = xy_vars();
    let gx = gamma.embed(&vars)?;
    let gy = gamma.rename(vec!["y".into()]).embed(&vars)?;
    let left = f1.apply(&gx, &gy)?;
    let right = gamma.substitute(&[("x", f2.law()?)])?;
    Ok(StrictIso { verified: left == right, gamma })
}

/// The first non-integral coefficient of γ as (degree, coefficient), or `None`.
pub fn iso_is_integral(gamma: &QSeries, p: Prime) -> Option<(u16, Rational)> {
    gamma.terms().find(|(_, c)| !is_p_integral(c, p)).map(|(e, c)| (e[0], c.clone()))
}

/// Whether some unit α satisfies α ≡ a_1/a_2 and b_1 α² ≡ b_2 mod p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedIsoVerdict {
    /// Residue of the forced α in [1, p).
    pub alpha: u64,
    pub obstructed: bool,
}

pub fn graded_iso_obstruction(
    p: Prime,
    first: (&Rational, &Rational),
    second: (&Rational, &Rational),
) -> Result<GradedIsoVerdict, FglError> {
    let (a1, b1) = first;
    let (a2, b2) = second;
    for (idx, a) in [(1, a1), (2, a2)] {
        if !is_p_unit(a, p) {
            return Err(FglError::NonUnit { index: idx, value: format_rational(a) });
        }
    }
    for b in [b1, b2] {
        if !is_p_integral(b, p) {
            return Err(FglError::Spec(format!("{} is not p-integral", format_rational(b))));
        }
    }
    let alpha_q = a1 / a2;
    let alpha = crate::arith::reduce_mod_power(&alpha_q, p, 1).and_then(|r| r.to_u64()).expect("unit ratio reduces mod p");
    let defect = b1 * &alpha_q * &alpha_q - b2;
    let obstructed = vp(&defect, p) < Valuation::Finite(1);
    Ok(GradedIsoVerdict { alpha, obstructed })
}

/// JSON description of a law.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LawSpec {
    Morava {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<u64>,
        n: u32,
        #[serde(default)]
        a: Vec<String>,
    },
    Multiplicative {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<u64>,
        beta: String,
    },
    Log {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<u64>,
        coeffs: Vec<(String, String)>,
    },
    Additive {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<u64>,
    },
}

impl LawSpec {
    fn prime_field(&self) -> Option<u64> {
        match self {
            LawSpec::Morava { p, .. } | LawSpec::Multiplicative { p, .. } | LawSpec::Log { p, .. } | LawSpec::Additive { p } => *p,
        }
    }

    /// Builds the law; `default_p` is used when the spec names no prime.
    pub fn build(&self, default_p: Option<u64>, cap: u32) -> Result<FormalGroupLaw, FglError> {
        let raw = self.prime_field().or(default_p).ok_or_else(|| FglError::Spec("no prime given".into()))?;
        let p = Prime::new(raw)?;
        match self {
            LawSpec::Morava { n, a, .. } => {
                let a = if a.is_empty() {
                    vec![Rational::one()]
                } else {
                    a.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?
                };
                FormalGroupLaw::morava(&MoravaSpec { p, n: *n, a }, cap)
            }
            LawSpec::Multiplicative { beta, .. } => FormalGroupLaw::multiplicative(p, parse_rational(beta)?, cap),
            LawSpec::Additive { .. } => Ok(FormalGroupLaw::additive(p, cap)),
            LawSpec::Log { coeffs, .. } => {
                let mut terms = Vec::new();
                for (e, c) in coeffs {
                    let e: u16 = e.parse().map_err(|_| FglError::Spec(format!("bad exponent {e:?}")))?;
                    terms.push((e, parse_rational(c)?));
                }
                FormalGroupLaw::from_log(p, QSeries::univariate("x", cap, terms), LawKind::Log)
            }
        }
    }
}

/// The exponent k when x = p^k.
pub fn as_p_power(x: &Rational, p: Prime) -> Option<i64> {
    let v = vp(x, p).finite()?;
    (x.is_positive() && *x == p.power(v)).then_some(v)
}
