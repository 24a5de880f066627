//! Order-ħ² content of the RLL relations over free generators `l_{αβ}[k]`.
//!
//! With `L⁺(z) = I + ħ Σ_{k≥0} l[k] z^{−k−1}`, `L⁻(z) = I + ħ Σ_{k≥0} l[−k−1] z^k`
//! and `R(w) = I + ħ r₁(w) + ħ² r₂(w) + ⋯` (normalized, `w = z − z'`), the ħ²
//! part of `R(w) L₁(z) L₂(z') = L₂(z') L₁(z) R(w + ħK)` reads
//! `[X₁(z), Y₂(z')] = [X₁, r₁] + [Y₂, r₁] + (r₂(w+ħK) − r₂(w))|_{ħ²}`.
//! Expanding `1/w^j` in the region fixed by the relation kind and reading off
//! the coefficient of `z^{−m−1} z'^{−n−1}` yields `[l[m], l[n]]`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::algebra::{Rat, RatFunc, Scalar};
use crate::error::{Error, Result};
use crate::fusion::Relation;
use crate::report::{CheckReport, ResidualEntry};
use crate::rmatrix::{normalized_r_general, RMode};
use crate::tensor::TensorMat;

/// Generator `l_{αβ}[mode]`, indices 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeGen {
    pub mode: i64,
    pub alpha: u8,
    pub beta: u8,
}

impl ModeGen {
    pub fn new(alpha: u8, beta: u8, mode: i64) -> Self {
        ModeGen { mode, alpha, beta }
    }
}

impl fmt::Display for ModeGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l({},{})[{}]", self.alpha, self.beta, self.mode)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Word {
    Unit,
    Central,
    Single(ModeGen),
    Pair(ModeGen, ModeGen),
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Unit => f.write_str("1"),
            Word::Central => f.write_str("K"),
            Word::Single(g) => write!(f, "{g}"),
            Word::Pair(a, b) => write!(f, "{a} {b}"),
        }
    }
}

/// Rational combination of words of length at most 2 in the generators and `K`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BilinearExpr {
    terms: BTreeMap<Word, Rat>,
}

impl BilinearExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn word(w: Word, c: Rat) -> Self {
        let mut e = Self::zero();
        e.add_term(w, c);
        e
    }

    pub fn gen(g: ModeGen) -> Self {
        Self::word(Word::Single(g), Rat::one())
    }

    pub fn central(c: Rat) -> Self {
        Self::word(Word::Central, c)
    }

    /// `ab − ba` as a formal expression.
    pub fn commutator(a: ModeGen, b: ModeGen) -> Self {
        let mut e = Self::word(Word::Pair(a, b), Rat::one());
        e.add_term(Word::Pair(b, a), -Rat::one());
        e
    }

    pub fn add_term(&mut self, w: Word, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w.clone()).or_insert_with(Rat::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = Self::zero();
        for (w, x) in &self.terms {
            out.add_term(w.clone(), x * c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Word, Rat> {
        &self.terms
    }

    pub fn coeff(&self, w: &Word) -> Rat {
        self.terms.get(w).cloned().unwrap_or_else(Rat::zero)
    }

    /// The part without `K`.
    pub fn without_central(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&Word::Central);
        out
    }

    pub fn generators(&self) -> impl Iterator<Item = ModeGen> + '_ {
        self.terms.keys().flat_map(|w| match w {
            Word::Single(g) => vec![*g],
            Word::Pair(a, b) => vec![*a, *b],
            _ => vec![],
        })
    }
}

impl fmt::Display for BilinearExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            let neg = *c < Rat::zero();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match (w, mag == Rat::one()) {
                (Word::Unit, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "{w}")?,
                (_, false) => write!(f, "{mag}*{w}")?,
            }
        }
        Ok(())
    }
}

/// Commutators `[a, b]` for `a < b`; `[b, a] = −[a, b]` and `[a, a] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketTable {
    pub relations: Vec<Relation>,
    pub cutoff: i64,
    entries: BTreeMap<(ModeGen, ModeGen), BilinearExpr>,
    unknown: BTreeSet<(ModeGen, ModeGen)>,
    /// Internal consistency failures found during extraction.
    pub violations: Vec<String>,
}

#[derive(Serialize)]
struct EntryJson {
    a: String,
    b: String,
    bracket: String,
}

#[derive(Serialize)]
struct PairJson {
    a: String,
    b: String,
}

#[derive(Serialize)]
struct TableJson {
    relations: Vec<&'static str>,
    cutoff: i64,
    entries: Vec<EntryJson>,
    unknown: Vec<PairJson>,
    violations: Vec<String>,
}

impl BracketTable {
    fn empty(relations: Vec<Relation>, cutoff: i64) -> Self {
        BracketTable { relations, cutoff, entries: BTreeMap::new(), unknown: BTreeSet::new(), violations: Vec::new() }
    }

    /// `[a, b]`: `None` when the pair is not covered or is marked unknown.
    pub fn get(&self, a: ModeGen, b: ModeGen) -> Option<BilinearExpr> {
        if a == b {
            return Some(BilinearExpr::zero());
        }
        if a < b {
            self.entries.get(&(a, b)).cloned()
        } else {
            self.entries.get(&(b, a)).map(|e| e.scale(&-Rat::one()))
        }
    }

    pub fn is_unknown(&self, a: ModeGen, b: ModeGen) -> bool {
        self.unknown.contains(&(a.min(b), a.max(b)))
    }

    pub fn entries(&self) -> &BTreeMap<(ModeGen, ModeGen), BilinearExpr> {
        &self.entries
    }

    pub fn unknown(&self) -> &BTreeSet<(ModeGen, ModeGen)> {
        &self.unknown
    }

    fn record(&mut self, a: ModeGen, b: ModeGen, value: Option<BilinearExpr>) {
        if a == b {
            if let Some(v) = value.filter(|v| !v.is_zero()) {
                self.violations.push(format!("[{a}, {a}] = {v}, expected 0"));
            }
            return;
        }
        let key = (a.min(b), a.max(b));
        let value = value.map(|v| if a < b { v } else { v.scale(&-Rat::one()) });
        match value {
            None => {
                if !self.entries.contains_key(&key) {
                    self.unknown.insert(key);
                }
            }
            Some(v) => {
                self.unknown.remove(&key);
                if let Some(prev) = self.entries.get(&key) {
                    if *prev != v {
                        self.violations.push(format!("[{}, {}] extracted as both {prev} and {v}", key.0, key.1));
                    }
                } else {
                    self.entries.insert(key, v);
                }
            }
        }
    }

    /// Union of several tables (e.g. the three relation kinds).
    pub fn merge(tables: &[&BracketTable]) -> BracketTable {
        let relations = tables.iter().flat_map(|t| t.relations.clone()).collect();
        let cutoff = tables.iter().map(|t| t.cutoff).min().unwrap_or(0);
        let mut out = BracketTable::empty(relations, cutoff);
        for t in tables {
            out.violations.extend(t.violations.iter().cloned());
            for (&(a, b), v) in &t.entries {
                out.record(a, b, Some(v.clone()));
            }
            for &(a, b) in &t.unknown {
                out.record(a, b, None);
            }
        }
        out
    }

    /// Negative control: the entry `[a, b]` replaced by its negative.
    pub fn corrupted(&self, a: ModeGen, b: ModeGen) -> Result<BracketTable> {
        let key = (a.min(b), a.max(b));
        let mut out = self.clone();
        let e = out
            .entries
            .get_mut(&key)
            .ok_or_else(|| Error::InvalidConfig(format!("no entry [{a}, {b}] to corrupt")))?;
        *e = e.scale(&-Rat::one());
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = TableJson {
            relations: self.relations.iter().map(|r| r.name()).collect(),
            cutoff: self.cutoff,
            entries: self
                .entries
                .iter()
                .map(|((a, b), v)| EntryJson { a: a.to_string(), b: b.to_string(), bracket: v.to_string() })
                .collect(),
            unknown: self.unknown.iter().map(|(a, b)| PairJson { a: a.to_string(), b: b.to_string() }).collect(),
            violations: self.violations.clone(),
        };
        serde_json::to_value(j).expect("table serializes")
    }
}

/// Which half of the modes a generating series carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Half {
    /// `L⁺`: exponents `e ≤ −1`.
    Plus,
    /// `L⁻`: exponents `e ≥ 0`.
    Minus,
}

impl Half {
    fn contains(self, e: i64) -> bool {
        match self {
            Half::Plus => e <= -1,
            Half::Minus => e >= 0,
        }
    }
}

/// Mode of the generator multiplying `z^e` in either series.
fn mode_of(e: i64) -> i64 {
    -e - 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    /// `x_{μν}(z)` from the first operator.
    X(u8, u8),
    /// `y_{μν}(z')` from the second operator.
    Y(u8, u8),
    K,
}

/// `coeff · source / w^power`.
#[derive(Debug, Clone, PartialEq)]
struct Term {
    coeff: Rat,
    source: Source,
    power: i64,
}

/// The ħ-expansion data of `R(w)` needed at order ħ².
#[derive(Debug, Clone)]
pub struct RExpansion {
    /// `r₁(w)`.
    pub r1: TensorMat<RatFunc>,
    /// Coefficient of `K` in `r₂(w+ħK) − r₂(w)`.
    pub k_linear: TensorMat<RatFunc>,
    /// Coefficient of `K²` there; must vanish.
    pub k_quadratic: TensorMat<RatFunc>,
}

/// Expands the normalized `R(w + bħ)` to order ħ² for `b = 0, 1, 2` and
/// interpolates the ħ² coefficient as a quadratic polynomial in `b = K`.
pub fn r_expansion() -> Result<RExpansion> {
    let w = RatFunc::var();
    let at = |b: i64| -> Result<TensorMat<RatFunc>> {
        Ok(normalized_r_general(w.clone(), &Rat::from_int(b), 2)?.map(|s| s.coeff(2)))
    };
    let r1 = normalized_r_general(w.clone(), &Rat::zero(), 2)?.map(|s| s.coeff(1));
    let (v0, v1, v2) = (at(0)?, at(1)?, at(2)?);
    let half = Rat::new(1, 2);
    let k_linear = v1.scale(&RatFunc::constant(Rat::from_int(4))).sub(&v0.scale(&RatFunc::constant(Rat::from_int(3)))).sub(&v2);
    let k_linear = k_linear.scale(&RatFunc::constant(half.clone()));
    let k_quadratic = v0.sub(&v1.scale(&RatFunc::constant(Rat::from_int(2)))).add(&v2).scale(&RatFunc::constant(half));
    Ok(RExpansion { r1, k_linear, k_quadratic })
}

fn monomial_term(f: &RatFunc, source: Source, scale: &Rat, out: &mut Vec<Term>) -> Result<()> {
    if f.is_zero() {
        return Ok(());
    }
    let (c, k) = f
        .as_inverse_monomial()
        .ok_or_else(|| Error::InvalidConfig(format!("R-matrix coefficient {} is not of the form c/w^k", f.fmt_in("w"))))?;
    out.push(Term { coeff: &c * scale, source, power: k as i64 });
    Ok(())
}

/// Right side of `[x_{αβ}(z), y_{γδ}(z')]` as terms `c·source/w^j`; indices 0-based.
fn bracket_terms(exp: &RExpansion, shifted: bool, a: usize, b: usize, g: usize, d: usize) -> Result<Vec<Term>> {
    let idx = |p: usize, q: usize| 2 * p + q;
    let r1 = |row: usize, col: usize| exp.r1.get(row, col);
    let one = Rat::one();
    let minus = -Rat::one();
    let mut out = Vec::new();
    for mu in 0..2 {
        // [X, r₁]: Σ_μ x_{αμ} r₁[(μγ),(βδ)] − Σ_μ r₁[(αγ),(μδ)] x_{μβ}
        monomial_term(r1(idx(mu, g), idx(b, d)), Source::X(a as u8, mu as u8), &one, &mut out)?;
        monomial_term(r1(idx(a, g), idx(mu, d)), Source::X(mu as u8, b as u8), &minus, &mut out)?;
        // [Y, r₁]: Σ_ν y_{γν} r₁[(αν),(βδ)] − Σ_ν r₁[(αγ),(βν)] y_{νδ}
        monomial_term(r1(idx(a, mu), idx(b, d)), Source::Y(g as u8, mu as u8), &one, &mut out)?;
        monomial_term(r1(idx(a, g), idx(b, mu)), Source::Y(mu as u8, d as u8), &minus, &mut out)?;
    }
    if shifted {
        monomial_term(exp.k_linear.get(idx(a, g), idx(b, d)), Source::K, &one, &mut out)?;
    }
    Ok(out)
}

fn binom(n: i64, k: i64) -> Rat {
    if k < 0 || n < k {
        return Rat::zero();
    }
    (0..k).fold(Rat::one(), |acc, i| &(&acc * &Rat::from_int(n - i)) / &Rat::from_int(i + 1))
}

/// Expansion regions of `1/w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    /// `|z| > |z'|`: `1/w^j = Σ_p C(p+j−1, j−1) z^{−j−p} z'^p`.
    ZOuter,
    /// `|z'| > |z|`: `1/w^j = (−1)^j Σ_p C(p+j−1, j−1) z^p z'^{−j−p}`.
    ZPrimeOuter,
}

/// Coefficient of `z^ea z'^eb` in `1/w^j` times a monomial `z^sa z'^sb`,
/// as the expansion index `p` and the numeric factor.
fn expansion_coeff(region: Region, j: i64, ea: i64, eb: i64, sa: i64, sb: i64) -> Rat {
    let (za, zb) = (ea - sa, eb - sb);
    let p = match region {
        Region::ZOuter => {
            if za != -j - zb {
                return Rat::zero();
            }
            zb
        }
        Region::ZPrimeOuter => {
            if zb != -j - za {
                return Rat::zero();
            }
            za
        }
    };
    if p < 0 {
        return Rat::zero();
    }
    let c = binom(p + j - 1, j - 1);
    match region {
        Region::ZPrimeOuter if j % 2 == 1 => -c,
        _ => c,
    }
}

/// Coefficient of `z^ea z'^eb` in a sum of terms, as an expression in the generators.
fn extract(terms: &[Term], region: Region, hx: Half, hy: Half, ea: i64, eb: i64) -> BilinearExpr {
    let mut out = BilinearExpr::zero();
    for t in terms {
        match t.source {
            Source::K => {
                let c = expansion_coeff(region, t.power, ea, eb, 0, 0);
                out.add_term(Word::Central, &c * &t.coeff);
            }
            Source::X(mu, nu) => {
                // x(z) = Σ_e l[mode(e)] z^e; solve for the exponent e of the generator
                if let Some(e) = exponent_candidates(region, t.power, ea, eb, true) {
                    if hx.contains(e) {
                        let c = expansion_coeff(region, t.power, ea, eb, e, 0);
                        out.add_term(Word::Single(ModeGen::new(mu + 1, nu + 1, mode_of(e))), &c * &t.coeff);
                    }
                }
            }
            Source::Y(mu, nu) => {
                if let Some(e) = exponent_candidates(region, t.power, ea, eb, false) {
                    if hy.contains(e) {
                        let c = expansion_coeff(region, t.power, ea, eb, 0, e);
                        out.add_term(Word::Single(ModeGen::new(mu + 1, nu + 1, mode_of(e))), &c * &t.coeff);
                    }
                }
            }
        }
    }
    out
}

/// The exponent of the generator series compatible with the target monomial.
fn exponent_candidates(region: Region, j: i64, ea: i64, eb: i64, in_z: bool) -> Option<i64> {
    // total degree is preserved: ea + eb = e − j
    let e = ea + eb + j;
    let ok = match (region, in_z) {
        (Region::ZOuter, true) => eb >= 0,
        (Region::ZOuter, false) => -j - ea >= 0,
        (Region::ZPrimeOuter, true) => -j - eb >= 0,
        (Region::ZPrimeOuter, false) => ea >= 0,
    };
    ok.then_some(e)
}

fn kind_layout(relation: Relation) -> (Half, Half, Region) {
    match relation {
        Relation::PlusPlus => (Half::Plus, Half::Plus, Region::ZOuter),
        Relation::MinusMinus => (Half::Minus, Half::Minus, Region::ZPrimeOuter),
        Relation::MinusPlus => (Half::Minus, Half::Plus, Region::ZPrimeOuter),
    }
}

/// Extracts all commutators between the generators of the two operators of the
/// given relation with `|mode| ≤ cutoff`. Entries whose value involves a mode
/// beyond the cutoff are listed as unknown. Coefficients outside the mode
/// supports must vanish; failures are recorded in `violations`.
pub fn expand_rll(relation: Relation, cutoff: i64) -> Result<BracketTable> {
    if cutoff < 1 {
        return Err(Error::InvalidConfig(format!("mode cutoff must be >= 1, got {cutoff}")));
    }
    let exp = r_expansion()?;
    let mut table = BracketTable::empty(vec![relation], cutoff);
    if !exp.k_quadratic.is_zero() {
        table.violations.push(format!("K^2 term of the shifted R-matrix does not vanish: {:?}", exp.k_quadratic));
    }
    let (hx, hy, region) = kind_layout(relation);
    let box_range = -cutoff - 2..=cutoff + 1;
    for (a, b, g, d) in (0..16).map(|k| (k >> 3, (k >> 2) & 1, (k >> 1) & 1, k & 1)) {
        let terms = bracket_terms(&exp, relation == Relation::MinusPlus, a, b, g, d)?;
        for ea in box_range.clone() {
            for eb in box_range.clone() {
                let value = extract(&terms, region, hx, hy, ea, eb);
                if !(hx.contains(ea) && hy.contains(eb)) {
                    if !value.is_zero() {
                        table.violations.push(format!(
                            "entry ({}{},{}{}) at z^{ea} z'^{eb} outside the mode supports: {value}",
                            a + 1,
                            g + 1,
                            b + 1,
                            d + 1
                        ));
                    }
                    continue;
                }
                let (m, n) = (mode_of(ea), mode_of(eb));
                if m.abs() > cutoff || n.abs() > cutoff {
                    continue;
                }
                let ga = ModeGen::new(a as u8 + 1, b as u8 + 1, m);
                let gb = ModeGen::new(g as u8 + 1, d as u8 + 1, n);
                let known = value.generators().all(|x| x.mode.abs() <= cutoff);
                table.record(ga, gb, known.then_some(value));
            }
        }
    }
    Ok(table)
}

/// How generators map into the loop algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Identification {
    /// `l_{αβ}[k] ↦ E_{βα} ⊗ t^k` for `k ≥ 0` and `−E_{βα} ⊗ t^k` for `k < 0`.
    Signed,
    /// `l_{αβ}[k] ↦ E_{βα} ⊗ t^k`.
    Transposed,
    /// `l_{αβ}[k] ↦ E_{αβ} ⊗ t^k`.
    Direct,
}

impl Identification {
    fn sign(self, mode: i64) -> Rat {
        match self {
            Identification::Signed if mode < 0 => -Rat::one(),
            _ => Rat::one(),
        }
    }

    /// Image `(sign, row, col)` of a generator; the inverse map has the same shape.
    fn image(self, g: ModeGen) -> (Rat, u8, u8) {
        match self {
            Identification::Direct => (Rat::one(), g.alpha, g.beta),
            _ => (self.sign(g.mode), g.beta, g.alpha),
        }
    }

    fn preimage(self, row: u8, col: u8, mode: i64) -> (Rat, ModeGen) {
        let (s, a, b) = self.image(ModeGen::new(row, col, mode));
        (s, ModeGen::new(a, b, mode))
    }
}

fn delta(a: u8, b: u8) -> Rat {
    if a == b {
        Rat::one()
    } else {
        Rat::zero()
    }
}

/// `tr(xy) − ½ tr x tr y` on the generators' matrix units; invariant under
/// transposition.
pub fn traceless_trace_form(a: ModeGen, b: ModeGen) -> Rat {
    let (al, be, ga, de) = (a.alpha, a.beta, b.alpha, b.beta);
    &(&delta(al, de) * &delta(be, ga)) - &(&(&delta(al, be) * &delta(ga, de)) * &Rat::new(1, 2))
}

/// `res(t^m d t^n) = n δ_{m+n,0}`.
pub fn residue_pairing(m: i64, n: i64) -> Rat {
    if m + n == 0 {
        Rat::from_int(n)
    } else {
        Rat::zero()
    }
}

/// Loop-algebra bracket of two generators pulled back through an
/// identification, without the central term.
pub fn loop_bracket(a: ModeGen, b: ModeGen, id: Identification) -> BilinearExpr {
    let (sa, x1, y1) = id.image(a);
    let (sb, x2, y2) = id.image(b);
    let k = a.mode + b.mode;
    let s = &sa * &sb;
    let mut out = BilinearExpr::zero();
    // [E_{x1 y1}, E_{x2 y2}] = δ_{y1 x2} E_{x1 y2} − δ_{y2 x1} E_{x2 y1}
    for (row, col, c) in [(x1, y2, delta(y1, x2)), (x2, y1, -delta(y2, x1))] {
        if c.is_zero() {
            continue;
        }
        let (sp, g) = id.preimage(row, col, k);
        out.add_term(Word::Single(g), &(&s * &c) * &sp);
    }
    out
}

fn central_reference(a: ModeGen, b: ModeGen, id: Identification) -> Rat {
    let s = &id.image(a).0 * &id.image(b).0;
    &(&s * &traceless_trace_form(a, b)) * &residue_pairing(a.mode, b.mode)
}

/// Compares every known entry with the loop bracket plus `κ · B(x,y) · res(t^m d t^n) · K`
/// on the images, with `B = tr(xy) − ½ tr x tr y`; `κ` is fitted from the table and reported
/// against `B` and against the Killing form `4B`.
pub fn compare_loop_algebra(table: &BracketTable, id: Identification) -> CheckReport {
    let mut kappa: Option<Rat> = None;
    let mut kappa_consistent = true;
    let mut central_support_ok = true;
    for (&(a, b), v) in table.entries() {
        let observed = v.coeff(&Word::Central);
        let reference = central_reference(a, b, id);
        if reference.is_zero() {
            if !observed.is_zero() {
                central_support_ok = false;
            }
            continue;
        }
        let ratio = &observed / &reference;
        match &kappa {
            None => kappa = Some(ratio),
            Some(k) if *k != ratio => kappa_consistent = false,
            _ => {}
        }
    }
    let kappa_value = kappa.clone().unwrap_or_else(Rat::zero);
    let mut mismatches = Vec::new();
    let mut first: Option<ResidualEntry> = None;
    for (pos, (&(a, b), v)) in table.entries().iter().enumerate() {
        let central = &central_reference(a, b, id) * &kappa_value;
        let expected = loop_bracket(a, b, id).add(&BilinearExpr::central(central));
        if *v != expected {
            mismatches.push(serde_json::json!({
                "a": a.to_string(),
                "b": b.to_string(),
                "got": v.to_string(),
                "expected": expected.to_string(),
            }));
            if first.is_none() {
                first = Some(ResidualEntry { entry: format!("[{a}, {b}] = {v}, expected {expected}"), index: [pos, 0] });
            }
        }
    }
    let relations: Vec<&str> = table.relations.iter().map(|r| r.name()).collect();
    let mut report = CheckReport::new("classical_limit", RMode::Normalized { order: 2 })
        .param("relations", relations.join(","))
        .param("cutoff", table.cutoff)
        .param("identification", serde_json::to_value(id).unwrap().as_str().unwrap())
        .detail("entries", table.entries().len())
        .detail("unknown", table.unknown().len())
        .detail("mismatches", mismatches)
        .detail("violations", table.violations.clone())
        .detail("central_support_ok", central_support_ok)
        .detail("central_constant_consistent", kappa_consistent);
    if let Some(k) = &kappa {
        report = report
            .detail("central_constant_trace_form", k.to_string())
            .detail("central_constant_killing_form", (k * &Rat::new(1, 4)).to_string());
    }
    report.residual = first;
    report.pass = report.residual.is_none() && table.violations.is_empty() && central_support_ok && kappa_consistent;
    report
}

/// Jacobi identity on every triple whose nested brackets are all known.
pub fn jacobi_check(table: &BracketTable) -> CheckReport {
    let gens: BTreeSet<ModeGen> = table.entries().keys().flat_map(|&(a, b)| [a, b]).collect();
    let gens: Vec<ModeGen> = gens.into_iter().collect();
    let bracket_with = |e: &BilinearExpr, c: ModeGen| -> Option<BilinearExpr> {
        let mut out = BilinearExpr::zero();
        for (w, coef) in e.terms() {
            match w {
                Word::Unit | Word::Central => {}
                Word::Single(g) => out = out.add(&table.get(*g, c)?.scale(coef)),
                Word::Pair(..) => return None,
            }
        }
        Some(out)
    };
    let mut checked = 0usize;
    let mut failure: Option<ResidualEntry> = None;
    for (x, &a) in gens.iter().enumerate() {
        for (y, &b) in gens.iter().enumerate().skip(x + 1) {
            for &c in gens.iter().skip(y + 1) {
                let parts = (|| {
                    let ab = table.get(a, b)?;
                    let bc = table.get(b, c)?;
                    let ca = table.get(c, a)?;
                    Some(bracket_with(&ab, c)?.add(&bracket_with(&bc, a)?).add(&bracket_with(&ca, b)?))
                })();
                if let Some(sum) = parts {
                    checked += 1;
                    if !sum.is_zero() && failure.is_none() {
                        failure = Some(ResidualEntry { entry: format!("jacobi({a}, {b}, {c}) = {sum}"), index: [x, y] });
                    }
                }
            }
        }
    }
    let relations: Vec<&str> = table.relations.iter().map(|r| r.name()).collect();
    let mut report = CheckReport::new("jacobi", RMode::Normalized { order: 2 })
        .param("relations", relations.join(","))
        .param("cutoff", table.cutoff)
        .detail("triples_checked", checked);
    report.pass = failure.is_none() && checked > 0;
    report.residual = failure;
    report
}
