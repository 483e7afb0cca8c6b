//! Gamma-filtration bounds for cellular K(n)-modules.
//!
//! A module is a free Z_(p)-module on cells with known codimension and
//! grading and partially known multiplication. Operation values on
//! subvariety cells are known only up to their leading term; everything else
//! becomes a polynomial in unknown parameters ranging over Z_(p). The engine
//! enumerates products of operation values, eliminates unknowns through unit
//! pivots, and reads torsion bounds off the fully known part.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::addops::SolverConfig;
use crate::arith::{format_rational, is_p_integral, vp, Prime, Rational};
use crate::chern::{ChernError, ChernTower, TowerCaps};
use crate::fgl::{FormalGroupLaw, MoravaSpec};
use crate::GradedPolynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GammaError {
    #[error(transparent)]
    Chern(#[from] ChernError),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("unknown cell {0}")]
    UnknownCell(String),
    #[error("cell {0} is not a subvariety class")]
    NotSubvariety(String),
    #[error("no constant for {op} on a cell of codimension {codim}")]
    ConstantUnavailable { op: String, codim: u32 },
    #[error("malformed JSON: {0}")]
    Json(String),
}

/// One basis element of the module.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub name: String,
    pub codim: u32,
    pub grading: i64,
    #[serde(rename = "subvariety")]
    pub subvariety: bool,
}

/// Whether the part of a product above its leading term is known to vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    Unknown,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lead {
    #[serde(with = "crate::arith::rational_string")]
    pub coef: Rational,
    pub cell: String,
}

/// a·b = lead + tail, where the tail lives in strictly higher codimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductRule {
    pub a: String,
    pub b: String,
    pub lead: Option<Lead>,
    pub tail: Tail,
}

/// Cells, partial multiplication and the user-asserted isomorphism flag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellularModule {
    pub p: u64,
    pub n: u32,
    pub cells: Vec<Cell>,
    pub products: Vec<ProductRule>,
    pub iso_flag: bool,
}

impl CellularModule {
    pub fn prime(&self) -> Result<Prime, GammaError> {
        Prime::new(self.p).map_err(|e| GammaError::InvalidModule(e.to_string()))
    }

    /// p^n − 1.
    pub fn period(&self) -> i64 {
        self.p.pow(self.n) as i64 - 1
    }

    /// The grading class of g.
    pub fn residue(&self, g: i64) -> i64 {
        g.rem_euclid(self.period())
    }

    pub fn cell_index(&self, name: &str) -> Result<usize, GammaError> {
        self.cells.iter().position(|c| c.name == name).ok_or_else(|| GammaError::UnknownCell(name.into()))
    }

    /// The codimension-zero cell.
    pub fn unit(&self) -> Result<usize, GammaError> {
        self.cells.iter().position(|c| c.codim == 0).ok_or_else(|| GammaError::InvalidModule("no unit cell".into()))
    }

    pub fn validate(&self) -> Result<(), GammaError> {
        let p = self.prime()?;
        if self.n == 0 {
            return Err(GammaError::InvalidModule("n must be positive".into()));
        }
        let mut names = BTreeSet::new();
        for c in &self.cells {
            if !names.insert(c.name.as_str()) {
                return Err(GammaError::InvalidModule(format!("duplicate cell {}", c.name)));
            }
        }
        let units = self.cells.iter().filter(|c| c.codim == 0).count();
        if units != 1 {
            return Err(GammaError::InvalidModule(format!("expected exactly one codimension-0 cell, found {units}")));
        }
        for r in &self.products {
            let a = &self.cells[self.cell_index(&r.a)?];
            let b = &self.cells[self.cell_index(&r.b)?];
            if let Some(lead) = &r.lead {
                let c = &self.cells[self.cell_index(&lead.cell)?];
                if c.codim != a.codim + b.codim {
                    return Err(GammaError::InvalidModule(format!("{}·{}: lead codimension is not additive", r.a, r.b)));
                }
                if self.residue(c.grading) != self.residue(a.grading + b.grading) {
                    return Err(GammaError::InvalidModule(format!("{}·{}: lead grading is not additive", r.a, r.b)));
                }
                if !is_p_integral(&lead.coef, p) {
                    return Err(GammaError::InvalidModule(format!("{}·{}: lead coefficient is not p-integral", r.a, r.b)));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, GammaError> {
        let m: CellularModule = serde_json::from_str(text).map_err(|e| GammaError::Json(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("module serializes")
    }
}

/// The split Pfister quadric attached to a pure symbol of degree n + 2, at p = 2.
///
/// Cells h^0..h^m have codimension i, cells l_0..l_m have codimension
/// dim − i, with m = 2^{n+1} − 1 and dim = 2^{n+2} − 2. Powers of h multiply
/// exactly; h^a·l_i = l_{i−a} up to an unknown tail.
pub fn pfister(n: u32) -> CellularModule {
    let m = 2u32.pow(n + 1) - 1;
    let dim = 2u32.pow(n + 2) - 2;
    let period = 2i64.pow(n) - 1;
    let grading = |codim: u32| (codim as i64 - 1).rem_euclid(period) + 1;
    let mut cells = Vec::new();
    for i in 0..=m {
        cells.push(Cell { name: format!("h{i}"), codim: i, grading: grading(i), subvariety: false });
    }
    for i in 0..=m {
        cells.push(Cell { name: format!("l{i}"), codim: dim - i, grading: grading(dim - i), subvariety: true });
    }
    let mut products = Vec::new();
    for a in 1..=m {
        for b in a..=m {
            if a + b <= m {
                let lead = Some(Lead { coef: Rational::one(), cell: format!("h{}", a + b) });
                products.push(ProductRule { a: format!("h{a}"), b: format!("h{b}"), lead, tail: Tail::Zero });
            }
        }
        for i in 0..=m {
            let lead = (i >= a).then(|| Lead { coef: Rational::one(), cell: format!("l{}", i - a) });
            let tail = if i > a { Tail::Unknown } else { Tail::Zero };
            products.push(ProductRule { a: format!("h{a}"), b: format!("l{i}"), lead, tail });
        }
    }
    CellularModule { p: 2, n, cells, products, iso_flag: true }
}

/// The operations whose values the engine knows to leading order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    Chern(u32),
    Chi(i64),
    PsiP,
}

impl std::fmt::Display for OpKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OpKind::Chern(i) => write!(f, "c{i}"),
            OpKind::Chi(k) => write!(f, "chi{k}"),
            OpKind::PsiP => write!(f, "psi"),
        }
    }
}

/// Leading coefficients of operation values on subvariety classes, keyed by codimension.
#[derive(Debug, Clone, PartialEq)]
pub struct OperationConstants {
    pub p: u64,
    pub n: u32,
    /// Largest codimension the constants cover.
    pub top: u32,
    /// (i, codim) ↦ coefficient of z_1⋯z_codim in c_i(z_1⋯z_codim).
    pub chern: BTreeMap<(u32, u32), Rational>,
    pub chi_k: i64,
    /// codim ↦ h_j for codim = 1 + j(p^n − 1).
    pub chi: BTreeMap<u32, Rational>,
    /// codim ↦ f_j.
    pub psi: BTreeMap<u32, Rational>,
}

impl OperationConstants {
    /// Reads every constant available at the tower's caps.
    pub fn from_tower(tower: &ChernTower, chi_k: i64) -> Result<Self, ChernError> {
        let top = tower.caps.arity.min(tower.caps.degree);
        let mut chern = BTreeMap::new();
        for i in 1..=tower.caps.max_index {
            for c in i..=top {
                let k = tower.coefficient(i, &vec![1; c as usize])?;
                if !k.is_zero() {
                    chern.insert((i, c), k);
                }
            }
        }
        let q = tower.q();
        let mut chi = BTreeMap::new();
        let mut psi = BTreeMap::new();
        if q <= tower.caps.max_index {
            let j_max = (top - 1) / (q - 1);
            for h in tower.chi_constants(chi_k, j_max)? {
                chi.insert(1 + h.j * (q - 1), h.value);
            }
            for f in tower.f_constants(j_max)? {
                psi.insert(1 + f.j * (q - 1), f.value);
            }
        }
        Ok(OperationConstants { p: tower.prime().get(), n: tower.n, top, chern, chi_k, chi, psi })
    }

    /// Builds the self tower of the standard Morava law up to c_{p^n}, with
    /// arity and degree large enough for every subvariety cell of the module.
    pub fn for_module(module: &CellularModule, chi_k: Option<i64>, config: SolverConfig) -> Result<Self, GammaError> {
        let p = module.prime()?;
        let q = p.get().pow(module.n) as u32;
        let top = module.cells.iter().filter(|c| c.subvariety).map(|c| c.codim).max().unwrap_or(0).max(q);
        let law = FormalGroupLaw::morava(&MoravaSpec::standard(p, module.n), top).map_err(ChernError::from)?;
        let caps = TowerCaps { max_index: q, arity: top, degree: top };
        let tower = ChernTower::build(&law, &law, caps, config)?;
        let k = chi_k.unwrap_or_else(|| crate::chern::default_chi_k(p));
        Ok(Self::from_tower(&tower, k)?)
    }

    fn leading(&self, op: OpKind, codim: u32) -> Option<Rational> {
        match op {
            OpKind::Chern(i) if codim <= self.top => Some(self.chern.get(&(i, codim)).cloned().unwrap_or_else(Rational::zero)),
            OpKind::Chern(_) => None,
            OpKind::Chi(k) if k == self.chi_k => self.chi.get(&codim).cloned(),
            OpKind::Chi(_) => None,
            OpKind::PsiP => self.psi.get(&codim).cloned(),
        }
    }

    /// The operations with at least one known constant.
    pub fn operations(&self) -> Vec<OpKind> {
        let mut ops: Vec<OpKind> = self.chern.keys().map(|(i, _)| OpKind::Chern(*i)).collect::<BTreeSet<_>>().into_iter().collect();
        if !self.chi.is_empty() {
            ops.push(OpKind::Chi(self.chi_k));
        }
        if !self.psi.is_empty() {
            ops.push(OpKind::PsiP);
        }
        ops
    }
}

/// A module element whose entries are polynomials in unknown parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricVector {
    /// Cell index ↦ entry.
    pub entries: BTreeMap<usize, GradedPolynomial>,
    /// The γ-filtration index this element is known to lie in.
    pub weight: u32,
    /// Entries below this codimension vanish.
    pub lead_codim: u32,
    pub label: String,
}

impl ParametricVector {
    /// Every entry is a known constant.
    pub fn is_known(&self) -> bool {
        self.entries.values().all(|e| e.as_constant().is_some())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Dense entries after substituting parameter values (parameter j is values[j − 1]).
    pub fn instantiate(&self, values: &[Rational], len: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); len];
        for (&c, e) in &self.entries {
            out[c] = e.evaluate(values);
        }
        out
    }

    fn known_entries(&self) -> Option<BTreeMap<usize, Rational>> {
        self.entries.iter().map(|(c, e)| e.as_constant().map(|v| (*c, v))).collect()
    }

    fn axpy(&mut self, k: &GradedPolynomial, other: &ParametricVector) {
        for (c, e) in &other.entries {
            let slot = self.entries.entry(*c).or_insert_with(GradedPolynomial::zero);
            *slot = slot.clone() + k.clone() * e.clone();
            if slot.is_zero() {
                self.entries.remove(c);
            }
        }
    }
}

/// Builds operation values and products over a module.
pub struct GammaEngine<'a> {
    pub module: &'a CellularModule,
    pub constants: &'a OperationConstants,
    params: Vec<String>,
    param_index: HashMap<String, usize>,
    rules: HashMap<(usize, usize), &'a ProductRule>,
    cell_products: HashMap<(usize, usize), BTreeMap<usize, GradedPolynomial>>,
}

impl<'a> GammaEngine<'a> {
    pub fn new(module: &'a CellularModule, constants: &'a OperationConstants) -> Result<Self, GammaError> {
        module.validate()?;
        if constants.p != module.p || constants.n != module.n {
            return Err(GammaError::InvalidModule("constants were computed for a different p or n".into()));
        }
        let mut rules = HashMap::new();
        for r in &module.products {
            let a = module.cell_index(&r.a)?;
            let b = module.cell_index(&r.b)?;
            rules.insert((a.min(b), a.max(b)), r);
        }
        Ok(GammaEngine { module, constants, params: Vec::new(), param_index: HashMap::new(), rules, cell_products: HashMap::new() })
    }

    /// Names of the parameters introduced so far; parameter j is `names[j − 1]`.
    pub fn parameters(&self) -> &[String] {
        &self.params
    }

    fn param(&mut self, name: String) -> GradedPolynomial {
        let next = self.params.len() + 1;
        let j = *self.param_index.entry(name.clone()).or_insert_with(|| {
            self.params.push(name);
            next
        });
        GradedPolynomial::generator(j)
    }

    /// Fresh unknowns on every cell of the given grading with codimension above `above`.
    fn unknown_tail(&mut self, tag: &str, grading: i64, above: u32) -> BTreeMap<usize, GradedPolynomial> {
        let targets: Vec<(usize, String)> = self
            .module
            .cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.codim > above && self.module.residue(c.grading) == self.module.residue(grading))
            .map(|(i, c)| (i, c.name.clone()))
            .collect();
        targets.into_iter().map(|(i, name)| (i, self.param(format!("{tag}>{name}")))).collect()
    }

    fn cell_product(&mut self, a: usize, b: usize) -> BTreeMap<usize, GradedPolynomial> {
        let key = (a.min(b), a.max(b));
        if let Some(v) = self.cell_products.get(&key) {
            return v.clone();
        }
        let cells = &self.module.cells;
        let unit = self.module.unit().expect("validated");
        let out = if a == unit {
            BTreeMap::from([(b, GradedPolynomial::one())])
        } else if b == unit {
            BTreeMap::from([(a, GradedPolynomial::one())])
        } else {
            let codim = cells[a].codim + cells[b].codim;
            let grading = cells[a].grading + cells[b].grading;
            let tag = format!("{}*{}", cells[key.0].name, cells[key.1].name);
            match self.rules.get(&key).copied() {
                Some(rule) => {
                    let mut out = BTreeMap::new();
                    if let Some(lead) = &rule.lead {
                        let c = self.module.cell_index(&lead.cell).expect("validated");
                        out.insert(c, GradedPolynomial::constant(lead.coef.clone()));
                    }
                    if rule.tail == Tail::Unknown {
                        out.extend(self.unknown_tail(&tag, grading, codim));
                    }
                    out
                }
                None => self.unknown_tail(&tag, grading, codim.saturating_sub(1)),
            }
        };
        self.cell_products.insert(key, out.clone());
        out
    }

    /// A single cell as an element of γ^1 (γ^0 for the unit).
    pub fn cell_vector(&self, name: &str) -> Result<ParametricVector, GammaError> {
        let i = self.module.cell_index(name)?;
        let codim = self.module.cells[i].codim;
        Ok(ParametricVector {
            entries: BTreeMap::from([(i, GradedPolynomial::one())]),
            weight: codim.min(1),
            lead_codim: codim,
            label: name.into(),
        })
    }

    /// The γ-weight of an operation's values.
    pub fn op_weight(&self, op: OpKind) -> u32 {
        match op {
            OpKind::Chern(i) => i,
            OpKind::Chi(_) | OpKind::PsiP => 2 * self.module.p.pow(self.module.n) as u32 - 1,
        }
    }

    fn op_grading(&self, op: OpKind) -> i64 {
        match op {
            OpKind::Chern(i) => i as i64,
            OpKind::Chi(_) | OpKind::PsiP => 1,
        }
    }

    /// op(cell) = (leading constant)·cell + unknown tail on every higher
    /// cell of the value's grading.
    pub fn op_value(&mut self, cell: &str, op: OpKind) -> Result<ParametricVector, GammaError> {
        let i = self.module.cell_index(cell)?;
        let c = self.module.cells[i].clone();
        let weight = self.op_weight(op);
        let label = format!("{op}({cell})");
        if c.codim == 0 {
            return Ok(ParametricVector { entries: BTreeMap::new(), weight, lead_codim: weight, label });
        }
        if !c.subvariety {
            return Err(GammaError::NotSubvariety(cell.into()));
        }
        let lead =
            self.constants.leading(op, c.codim).ok_or_else(|| GammaError::ConstantUnavailable { op: op.to_string(), codim: c.codim })?;
        let grading = self.op_grading(op);
        let mut entries = self.unknown_tail(&label, grading, c.codim);
        if !lead.is_zero() && self.module.residue(c.grading) == self.module.residue(grading) {
            entries.insert(i, GradedPolynomial::constant(lead));
        }
        let lead_codim = entries.keys().map(|&k| self.module.cells[k].codim).min().unwrap_or(c.codim + 1);
        Ok(ParametricVector { entries, weight, lead_codim, label })
    }

    pub fn multiply(&mut self, a: &ParametricVector, b: &ParametricVector) -> ParametricVector {
        let mut out = ParametricVector {
            entries: BTreeMap::new(),
            weight: a.weight + b.weight,
            lead_codim: a.lead_codim + b.lead_codim,
            label: format!("{}*{}", a.label, b.label),
        };
        for (&x, ex) in &a.entries {
            for (&y, ey) in &b.entries {
                let prod = self.cell_product(x, y);
                let k = ex.clone() * ey.clone();
                out.axpy(&k, &ParametricVector { entries: prod, weight: 0, lead_codim: 0, label: String::new() });
            }
        }
        out
    }

    /// Operation values with a nonzero leading constant on every subvariety cell.
    pub fn atoms(&mut self) -> Vec<ParametricVector> {
        let mut atoms = Vec::new();
        let cells: Vec<Cell> = self.module.cells.clone();
        for c in cells.iter().filter(|c| c.codim > 0) {
            atoms.push(self.cell_vector(&c.name).expect("cell exists"));
        }
        for op in self.constants.operations() {
            for c in cells.iter().filter(|c| c.subvariety && c.codim > 0) {
                if let Ok(v) = self.op_value(&c.name, op) {
                    let i = self.module.cell_index(&c.name).expect("cell exists");
                    if v.entries.get(&i).is_some_and(|e| !e.is_zero()) {
                        atoms.push(v);
                    }
                }
            }
        }
        atoms
    }

    /// Every generator the engine enumerates, regardless of weight: atoms,
    /// their multiples by powers of codimension-1 cells, and pairwise products
    /// of atoms, all with leading codimension at most `degree_cap`.
    pub fn all_generators(&mut self, degree_cap: u32) -> Vec<ParametricVector> {
        let unit = self.module.unit().expect("validated");
        let mut out = vec![ParametricVector {
            entries: BTreeMap::from([(unit, GradedPolynomial::one())]),
            weight: 0,
            lead_codim: 0,
            label: self.module.cells[unit].name.clone(),
        }];
        let atoms = self.atoms();
        let lines: Vec<ParametricVector> = atoms.iter().filter(|a| a.lead_codim == 1 && a.weight == 1).cloned().collect();
        for a in &atoms {
            let mut frontier = vec![a.clone()];
            while let Some(v) = frontier.pop() {
                if v.lead_codim > degree_cap || v.is_zero() {
                    continue;
                }
                for h in &lines {
                    let next = self.multiply(h, &v);
                    if next.lead_codim <= degree_cap && !next.is_zero() {
                        frontier.push(next);
                    }
                }
                out.push(v);
            }
        }
        for (i, a) in atoms.iter().enumerate() {
            for b in &atoms[i..] {
                if a.lead_codim + b.lead_codim <= degree_cap && !(a.lead_codim == 1 && a.weight == 1) {
                    let prod = self.multiply(a, b);
                    if !prod.is_zero() {
                        out.push(prod);
                    }
                }
            }
        }
        out
    }

    /// Generators of weight at least m.
    pub fn gamma_generators(&mut self, m: u32, degree_cap: u32) -> Vec<ParametricVector> {
        self.all_generators(degree_cap).into_iter().filter(|g| g.weight >= m).collect()
    }
}

/// Z_(p)-combinations of the input that are fully known for every parameter value.
///
/// Columns are processed by increasing codimension. The pivot is a known
/// entry of least valuation; it clears an entry of another row only when the
/// quotient is p-integral, so unknowns are removed only through pivots whose
/// valuation does not exceed theirs.
pub fn guaranteed_span(vectors: &[ParametricVector], module: &CellularModule) -> Result<Vec<ParametricVector>, GammaError> {
    let p = module.prime()?;
    let mut rows: Vec<ParametricVector> =
        vectors.iter().filter(|v| v.entries.values().any(|e| e.as_constant().is_some())).cloned().collect();
    let mut order: Vec<usize> = (0..module.cells.len()).collect();
    order.sort_by_key(|&c| (module.cells[c].codim, c));
    let mut used = vec![false; rows.len()];
    for col in order {
        let pivot = rows
            .iter()
            .enumerate()
            .filter(|(r, row)| !used[*r] && row.entries.get(&col).and_then(|e| e.as_constant()).is_some())
            .min_by_key(|(_, row)| vp(&row.entries[&col].as_constant().expect("filtered"), p))
            .map(|(r, _)| r);
        let Some(pr) = pivot else { continue };
        used[pr] = true;
        let pivot_row = rows[pr].clone();
        let pv = pivot_row.entries[&col].as_constant().expect("pivot is known");
        let pv_val = vp(&pv, p).finite().expect("pivot is nonzero");
        for (r, row) in rows.iter_mut().enumerate() {
            if r == pr {
                continue;
            }
            let Some(e) = row.entries.get(&col).cloned() else { continue };
            if e.min_valuation(p).is_some_and(|v| v >= pv_val) {
                let k = -e.scale(&pv.recip());
                row.axpy(&k, &pivot_row);
                row.entries.remove(&col);
            }
        }
    }
    Ok(rows.into_iter().filter(|r| r.is_known() && !r.is_zero()).collect())
}

/// Valuations of the nonzero elementary divisors of a p-integral matrix over Z_(p).
pub fn elementary_divisors(rows: &[Vec<Rational>], p: Prime) -> Vec<i64> {
    let mut m: Vec<Vec<Rational>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut out = Vec::new();
    while !m.is_empty() {
        let mut best: Option<(usize, usize, i64)> = None;
        for (i, r) in m.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                if let Some(v) = vp(x, p).finite() {
                    if best.is_none_or(|(_, _, b)| v < b) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let Some((pi, pj, v)) = best else { break };
        out.push(v);
        let pivot_row = m.swap_remove(pi);
        let pivot = pivot_row[pj].clone();
        for r in m.iter_mut() {
            if r[pj].is_zero() {
                continue;
            }
            let f = &r[pj] / &pivot;
            for (x, y) in r.iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
        // column operations clear the rest of the pivot row; they do not
        // affect the remaining rows once column pj is zero there
        for r in m.iter_mut() {
            r.remove(pj);
        }
        m.retain(|r| r.iter().any(|x| !x.is_zero()));
    }
    out.sort_unstable();
    out
}

/// Structure bound for one graded piece.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub degree: u32,
    pub free_rank: usize,
    /// p-power elementary divisors of the torsion bound.
    pub torsion: Vec<String>,
    pub generators_used: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedReport {
    pub p: u64,
    pub n: u32,
    pub iso_flag: bool,
    pub degrees: Vec<DegreeReport>,
}

/// Bounds gr^i_γ for i ≤ i_max by the cells of codimension ≥ i in the grading
/// of i, modulo the guaranteed part of γ^{i+1}.
pub fn graded_report(module: &CellularModule, constants: &OperationConstants, i_max: u32) -> Result<GradedReport, GammaError> {
    let p = module.prime()?;
    let cap = module.cells.iter().map(|c| c.codim).max().unwrap_or(0);
    let mut engine = GammaEngine::new(module, constants)?;
    let all = engine.all_generators(cap);
    let mut degrees = Vec::new();
    for i in 0..=i_max {
        let window: Vec<usize> = (0..module.cells.len())
            .filter(|&c| module.cells[c].codim >= i && module.residue(module.cells[c].grading) == module.residue(i as i64))
            .collect();
        let gens: Vec<ParametricVector> = all.iter().filter(|g| g.weight > i).cloned().collect();
        let span = guaranteed_span(&gens, module)?;
        let mut used = Vec::new();
        let mut matrix = Vec::new();
        for v in &span {
            let known = v.known_entries().expect("guaranteed vectors are known");
            if !known.keys().all(|c| window.contains(c)) {
                continue;
            }
            matrix.push(window.iter().map(|c| known.get(c).cloned().unwrap_or_else(Rational::zero)).collect::<Vec<_>>());
            used.push(v.label.clone());
        }
        let divisors = elementary_divisors(&matrix, p);
        let torsion = divisors.iter().filter(|&&v| v > 0).map(|&v| format_rational(&p.power(v))).collect();
        degrees.push(DegreeReport { degree: i, free_rank: window.len() - divisors.len(), torsion, generators_used: used });
    }
    Ok(GradedReport { p: p.get(), n: module.n, iso_flag: module.iso_flag, degrees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn toy_constants(p: u64, n: u32) -> OperationConstants {
        OperationConstants { p, n, top: 0, chern: BTreeMap::new(), chi_k: 3, chi: BTreeMap::new(), psi: BTreeMap::new() }
    }

    fn toy_module() -> CellularModule {
        let cells = vec![
            Cell { name: "u".into(), codim: 0, grading: 0, subvariety: false },
            Cell { name: "x".into(), codim: 1, grading: 0, subvariety: true },
            Cell { name: "y".into(), codim: 2, grading: 0, subvariety: true },
        ];
        CellularModule { p: 2, n: 1, cells, products: vec![], iso_flag: true }
    }

    fn vector(entries: &[(usize, GradedPolynomial)], label: &str) -> ParametricVector {
        ParametricVector { entries: entries.iter().cloned().collect(), weight: 1, lead_codim: 1, label: label.into() }
    }

    #[test]
    fn pfister_shape() {
        let m = pfister(1);
        m.validate().unwrap();
        assert_eq!(m.cells.iter().filter(|c| c.name.starts_with('h')).count(), 4);
        assert_eq!(m.cells.iter().filter(|c| c.name.starts_with('l')).count(), 4);
        assert_eq!(m.cells.iter().map(|c| c.codim).max(), Some(6));
        let m2 = pfister(2);
        let l7 = &m2.cells[m2.cell_index("l7").unwrap()];
        assert_eq!((l7.codim, l7.grading), (7, 1));
        let h1 = &m2.cells[m2.cell_index("h1").unwrap()];
        assert_eq!((h1.codim, h1.grading), (1, 1));
        let back = CellularModule::from_json(&m2.to_json()).unwrap();
        assert_eq!(back, m2);
    }

    #[test]
    fn span_of_known_vector_is_itself() {
        let m = toy_module();
        let v = vector(&[(1, GradedPolynomial::constant(int(2)))], "v");
        assert_eq!(guaranteed_span(std::slice::from_ref(&v), &m).unwrap(), vec![v]);
    }

    #[test]
    fn unit_pivot_eliminates_unknown() {
        let m = toy_module();
        let u = GradedPolynomial::generator(1);
        let a = vector(&[(1, GradedPolynomial::constant(int(3))), (2, u)], "a");
        let b = vector(&[(2, GradedPolynomial::constant(int(5)))], "b");
        let span = guaranteed_span(&[a, b], &m).unwrap();
        assert_eq!(span.len(), 2);
        assert!(span.iter().any(|v| v.entries.keys().eq([1].iter())));
    }

    #[test]
    fn no_overclaim_without_pivot() {
        let m = toy_module();
        let u = GradedPolynomial::generator(1);
        let a = vector(&[(1, GradedPolynomial::constant(int(2))), (2, u)], "a");
        assert!(guaranteed_span(&[a], &m).unwrap().is_empty());
    }

    #[test]
    fn operations_kill_the_unit() {
        let m = toy_module();
        let consts = toy_constants(2, 1);
        let mut e = GammaEngine::new(&m, &consts).unwrap();
        assert!(e.op_value("u", OpKind::Chern(1)).unwrap().is_zero());
    }

    #[test]
    fn divisors_of_small_matrix() {
        let p = Prime::new(2).unwrap();
        let rows = vec![vec![int(2), int(0)], vec![int(0), int(4)], vec![int(2), int(4)]];
        assert_eq!(elementary_divisors(&rows, p), vec![1, 2]);
        let rows = vec![vec![int(6), int(4)], vec![int(2), int(2)]];
        // det = 4, gcd of entries = 2: divisors 2 and 2
        assert_eq!(elementary_divisors(&rows, p), vec![1, 1]);
    }
}
