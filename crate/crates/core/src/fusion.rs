//! L-operators in the evaluation representation.
//!
//! The auxiliary space is tensor leg 1; quantum leg `j` of a system with `n`
//! points is tensor leg `j + 1`. In `V` the operator `L⁺(t)` acts as `R(t)`,
//! in the dual `V*` as `(R(t)^{t₂})⁻¹`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{HSeries, Poly, Rat, RatFunc, Scalar};
use crate::error::{Error, Result};
use crate::qkz::QkzSystem;
use crate::report::CheckReport;
use crate::rmatrix::{bare_r, normalized_r_general, proportionality, Bare, HbarAffine, Normalized, RFamily, RMode};
use crate::tensor::{leg_bit, TensorMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LKind {
    Plus,
    MinusDual,
}

/// How a factor `R^{(a,j)}(arg)` enters an ordered product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoration {
    Plain,
    /// `R^{t_j}`, transposed on the quantum leg.
    PartialTranspose,
    /// `(R^{t_j})⁻¹`.
    InverseOfPartialTranspose,
    /// Full transpose on both legs.
    Transpose,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LFactor {
    pub leg: usize,
    pub arg: HbarAffine,
    pub decoration: Decoration,
}

/// Ordered product of decorated R-factors on aux ⊗ `V^{⊗n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalLOperator {
    pub kind: LKind,
    pub n: usize,
    pub factors: Vec<LFactor>,
}

impl EvalLOperator {
    /// `L⁺_1(t − z_1) ⋯ L⁺_n(t − z_n)` in `V^{⊗n}`.
    pub fn l_plus(points: &[HbarAffine], t: &HbarAffine) -> Self {
        let factors = points
            .iter()
            .enumerate()
            .map(|(j, z)| LFactor { leg: j + 1, arg: t - z, decoration: Decoration::Plain })
            .collect();
        EvalLOperator { kind: LKind::Plus, n: points.len(), factors }
    }

    /// Same product in `(V*)^{⊗n}`.
    pub fn l_plus_dual(points: &[HbarAffine], t: &HbarAffine) -> Self {
        let mut op = Self::l_plus(points, t);
        for f in &mut op.factors {
            f.decoration = Decoration::InverseOfPartialTranspose;
        }
        op.kind = LKind::MinusDual;
        op
    }

    pub fn evaluate<F: RFamily>(&self, family: &F) -> Result<TensorMat<F::S>> {
        let legs = self.n + 1;
        let mut acc = TensorMat::identity(legs);
        for f in &self.factors {
            if f.leg == 0 || f.leg > self.n {
                return Err(Error::BadLegIndex { leg: f.leg, n_legs: self.n });
            }
            let q = f.leg + 1;
            let r = family.r_matrix(&f.arg)?.embed(legs, 1, q)?;
            let m = match f.decoration {
                Decoration::Plain => r,
                Decoration::PartialTranspose => r.partial_transpose(q)?,
                Decoration::InverseOfPartialTranspose => r.partial_transpose(q)?.inverse()?,
                Decoration::Transpose => r.transpose(),
            };
            acc = acc.mul(&m);
        }
        Ok(acc)
    }
}

impl fmt::Display for EvalLOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|x| {
                let r = format!("R^(a,{})({})", x.leg, x.arg);
                match x.decoration {
                    Decoration::Plain => r,
                    Decoration::PartialTranspose => format!("{r}^t{}", x.leg),
                    Decoration::InverseOfPartialTranspose => format!("({r}^t{})^-1", x.leg),
                    Decoration::Transpose => format!("{r}^t"),
                }
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// `R(t − z_j)` on (aux, quantum).
pub fn eval_l_plus<F: RFamily>(family: &F, arg: &HbarAffine) -> Result<TensorMat<F::S>> {
    family.r_matrix(arg)
}

/// `(R(t)^{t₂})⁻¹`.
pub fn eval_l_plus_dual<F: RFamily>(family: &F, arg: &HbarAffine) -> Result<TensorMat<F::S>> {
    family.r_matrix(arg)?.partial_transpose(2)?.inverse()
}

/// The `B` with `Σ y'x' ⊗ x''y'' = Id` for `A = Σ x'⊗x''`, `B = Σ y'⊗y''`
/// (products in the second factor taken in the opposite order).
pub fn twisted_inverse<S: Scalar>(a: &TensorMat<S>) -> Result<TensorMat<S>> {
    a.partial_transpose(2)?.inverse()?.partial_transpose(2)
}

/// `R̃(z)`, the twisted inverse of `(R(z)^{t₂})⁻¹`.
pub fn r_tilde<F: RFamily>(family: &F, z: &HbarAffine) -> Result<TensorMat<F::S>> {
    twisted_inverse(&eval_l_plus_dual(family, z)?)
}

/// `((R(z)⁻¹)^{t₂})⁻¹`, an alternative reading of `R̃`.
pub fn r_tilde_literal<F: RFamily>(family: &F, z: &HbarAffine) -> Result<TensorMat<F::S>> {
    family.r_matrix(z)?.inverse()?.partial_transpose(2)?.inverse()
}

/// Image of `i_z(L⁻_{(i)}(t_i))` in aux ⊗ `(V*)^{⊗n}`, split around the slot of
/// `L⁻_i` itself: factors `j < i` at `t_i + z_{ij}` and `j > i` at
/// `t_i + z_{ij} − ħk`, all in the dual representation.
pub fn iz_l_minus_dual_raw<F: RFamily>(
    sys: &QkzSystem<F>,
    i: usize,
    t_i: &HbarAffine,
) -> Result<(EvalLOperator, EvalLOperator)> {
    let n = sys.n();
    if i == 0 || i > n {
        return Err(Error::BadLegIndex { leg: i, n_legs: n });
    }
    let z = sys.points();
    let k = sys.level();
    let arg = |j: usize| t_i + &(&z[i - 1] - &z[j - 1]);
    let left = (1..i)
        .map(|j| LFactor { leg: j, arg: arg(j), decoration: Decoration::InverseOfPartialTranspose })
        .collect();
    let right = (i + 1..=n)
        .map(|j| LFactor { leg: j, arg: arg(j).shift_hbar(&-k), decoration: Decoration::InverseOfPartialTranspose })
        .collect();
    Ok((
        EvalLOperator { kind: LKind::MinusDual, n, factors: left },
        EvalLOperator { kind: LKind::MinusDual, n, factors: right },
    ))
}

/// The same image after moving every factor to the other side of the
/// invariance identity: `R^{(a,i−1)}(t_i+z_{i,i−1}+2ħ)^{t_{i−1}} ⋯ R^{(a,1)}(⋯)^{t_1}
/// R^{(a,n)}(t_i+z_{in}−ħk)^{t_n} ⋯ R^{(a,i+1)}(⋯)^{t_{i+1}}`.
pub fn iz_l_minus_dual_image<F: RFamily>(sys: &QkzSystem<F>, i: usize, t_i: &HbarAffine) -> Result<EvalLOperator> {
    let (left, right) = iz_l_minus_dual_raw(sys, i, t_i)?;
    let two = Rat::from_int(2);
    let mut factors: Vec<LFactor> = left
        .factors
        .iter()
        .rev()
        .map(|f| LFactor { leg: f.leg, arg: f.arg.shift_hbar(&two), decoration: Decoration::PartialTranspose })
        .collect();
    factors.extend(
        right
            .factors
            .iter()
            .rev()
            .map(|f| LFactor { leg: f.leg, arg: f.arg.clone(), decoration: Decoration::PartialTranspose }),
    );
    Ok(EvalLOperator { kind: LKind::MinusDual, n: sys.n(), factors })
}

/// Reverse-ordered product of fully transposed factors.
pub fn id3_form(image: &EvalLOperator) -> EvalLOperator {
    let factors = image
        .factors
        .iter()
        .rev()
        .map(|f| LFactor { leg: f.leg, arg: f.arg.clone(), decoration: Decoration::Transpose })
        .collect();
    EvalLOperator { kind: image.kind, n: image.n, factors }
}

/// `Σ_β (e^β ⊗ 1) X (v_i ⊗ v_1 ⊗ ⋯ ⊗ e_β ⊗ ⋯ ⊗ v_n)`: feeds the `i`-th vector
/// into the auxiliary slot and contracts the auxiliary output with leg `i`.
/// Equals `Tr_a(X P^{(a,i)})`.
pub fn contract_aux<S: Scalar>(x: &TensorMat<S>, i: usize) -> Result<TensorMat<S>> {
    let legs = x.n_legs();
    if legs < 2 || i == 0 || i + 1 > legs {
        return Err(Error::BadLegIndex { leg: i, n_legs: legs.saturating_sub(1) });
    }
    let n = legs - 1;
    let half = 1usize << n;
    let shift = n - i;
    Ok(TensorMat::from_fn(n, |r, c| {
        let vi = leg_bit(c, n, i);
        (0..2).fold(S::zero(), |acc, beta| {
            let col = (c & !(1 << shift)) | (beta << shift);
            acc.add_ref(x.get(beta * half + r, vi * half + col))
        })
    }))
}

/// Checks each step from the dual-representation image of `i_z(L⁻_{(i)}(ħk))`
/// down to `A_i`: the twisted inverse of every left factor equals its
/// `2ħ`-shifted partial transpose, transposing the auxiliary space yields the
/// reversed product of transposed factors, and the contraction equals `A_iᵀ`.
pub fn iz_consistency_check<F: RFamily>(sys: &QkzSystem<F>, i: usize) -> Result<CheckReport> {
    let t_i = HbarAffine::new(Rat::zero(), sys.level().clone());
    let (left, _) = iz_l_minus_dual_raw(sys, i, &t_i)?;
    let mut twisted_ok = true;
    let mut twisted_scalar_only = true;
    let mut literal_ok = true;
    for f in &left.factors {
        let shifted = sys.family().r_matrix(&f.arg.shift_hbar(&Rat::from_int(2)))?.partial_transpose(2)?;
        let twisted = r_tilde(sys.family(), &f.arg)?;
        if twisted != shifted {
            twisted_ok = false;
            if proportionality(&shifted, &twisted).is_none() {
                twisted_scalar_only = false;
            }
        }
        if r_tilde_literal(sys.family(), &f.arg)? != shifted {
            literal_ok = false;
        }
    }
    let image = iz_l_minus_dual_image(sys, i, &t_i)?;
    let x = image.evaluate(sys.family())?;
    let x3 = id3_form(&image).evaluate(sys.family())?;
    let aux_transpose_ok = x.partial_transpose(1)? == x3;
    let y = contract_aux(&x3, i)?;
    let a = sys.build_a(i)?;
    let equals_a = y == a;
    let points: Vec<String> = sys.points().iter().map(|p| p.to_string()).collect();
    let report = CheckReport::new("iz_contraction", sys.family().mode())
        .param("i", i)
        .param("level", sys.level())
        .param("points", points.join(", "))
        .param("convention", "contraction = transpose(A_i)");
    let report = sys
        .family()
        .describe(report)
        .detail("image", image.to_string())
        .detail("twisted_inverse_is_shifted_transpose", twisted_ok)
        .detail("twisted_inverse_matches_up_to_scalar", twisted_scalar_only)
        .detail("literal_tilde_is_shifted_transpose", literal_ok)
        .detail("aux_transpose_is_reversed_transposed_product", aux_transpose_ok)
        .detail("contraction_equals_a_untransposed", equals_a);
    let mut report = report.with_residual(y.first_nonzero_residual(&a.transpose()));
    if !aux_transpose_ok {
        report.pass = false;
    }
    Ok(report)
}

/// Relation kinds of the RLL presentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    PlusPlus,
    MinusPlus,
    MinusMinus,
}

impl Relation {
    pub const ALL: [Relation; 3] = [Relation::PlusPlus, Relation::MinusPlus, Relation::MinusMinus];

    pub fn name(self) -> &'static str {
        match self {
            Relation::PlusPlus => "plus_plus",
            Relation::MinusPlus => "minus_plus",
            Relation::MinusMinus => "minus_minus",
        }
    }
}

impl std::str::FromStr for Relation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "plusplus" | "pp" => Ok(Relation::PlusPlus),
            "minusplus" | "mp" => Ok(Relation::MinusPlus),
            "minusminus" | "mm" => Ok(Relation::MinusMinus),
            _ => Err(Error::Parse(format!("unknown relation kind {s:?}"))),
        }
    }
}

/// Sample point for [`rll_sample_check`]. `L⁻_{(i)}` entries use `i`, `t_i`;
/// `L⁺` entries use `t`. For `MinusMinus` the second operator is `L⁻_{(j)}(t_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RllSample {
    pub points: Vec<HbarAffine>,
    pub t: HbarAffine,
    pub t_prime: HbarAffine,
    pub i: usize,
    pub j: usize,
    /// Value of the central element `K`.
    pub central: Rat,
    /// Negative control: the right side uses `T₁T₂` instead of `T₂T₁`.
    pub misorder: bool,
}

/// `T⁻_{(i)}(t_i) = Π_j R^{(a,j)}(t_i + z_{ij} − [j > i]ħK)` on `n + 1` legs.
fn l_minus_factors(points: &[HbarAffine], i: usize, t_i: &HbarAffine, central: &Rat) -> Vec<(usize, HbarAffine)> {
    let zi = &points[i - 1];
    (1..=points.len())
        .map(|j| {
            let arg = t_i + &(zi - &points[j - 1]);
            (j, if j > i { arg.shift_hbar(&-central) } else { arg })
        })
        .collect()
}

fn l_plus_factors(points: &[HbarAffine], t: &HbarAffine) -> Vec<(usize, HbarAffine)> {
    points.iter().enumerate().map(|(j, z)| (j + 1, t - z)).collect()
}

/// Monodromy on two auxiliary legs (1, 2) and `n` quantum legs (3..).
fn monodromy<F: RFamily>(family: &F, aux: usize, n: usize, factors: &[(usize, HbarAffine)]) -> Result<TensorMat<F::S>> {
    let legs = n + 2;
    let mut acc = TensorMat::identity(legs);
    for (j, arg) in factors {
        acc = acc.mul(&family.r_matrix(arg)?.embed(legs, aux, j + 2)?);
    }
    Ok(acc)
}

/// `R(u) T₁ T₂ = T₂ T₁ R(u')` with the two monodromies on auxiliary legs 1, 2;
/// `u' = u` except for `MinusPlus`, where `u' = u + ħK`.
pub fn rll_sample_check<F: RFamily>(family: &F, relation: Relation, s: &RllSample) -> Result<CheckReport> {
    let n = s.points.len();
    if n == 0 {
        return Err(Error::InvalidConfig("need at least one point".into()));
    }
    for idx in [s.i, s.j] {
        if idx == 0 || idx > n {
            return Err(Error::BadLegIndex { leg: idx, n_legs: n });
        }
    }
    let zero = Rat::zero();
    let (f1, f2, u, u_shift) = match relation {
        Relation::PlusPlus => {
            let u = &s.t - &s.t_prime;
            (l_plus_factors(&s.points, &s.t), l_plus_factors(&s.points, &s.t_prime), u, zero)
        }
        Relation::MinusMinus => {
            let zi = &s.points[s.i - 1];
            let zj = &s.points[s.j - 1];
            let u = &(&(zi - zj) + &s.t) - &s.t_prime;
            (
                l_minus_factors(&s.points, s.i, &s.t, &s.central),
                l_minus_factors(&s.points, s.j, &s.t_prime, &s.central),
                u,
                zero,
            )
        }
        Relation::MinusPlus => {
            let zi = &s.points[s.i - 1];
            let u = &(zi + &s.t) - &s.t_prime;
            (l_minus_factors(&s.points, s.i, &s.t, &s.central), l_plus_factors(&s.points, &s.t_prime), u, s.central.clone())
        }
    };
    let legs = n + 2;
    let t1 = monodromy(family, 1, n, &f1)?;
    let t2 = monodromy(family, 2, n, &f2)?;
    let r_left = family.r_matrix(&u)?.embed(legs, 1, 2)?;
    let r_right = family.r_matrix(&u.shift_hbar(&u_shift))?.embed(legs, 1, 2)?;
    let lhs = r_left.mul(&t1).mul(&t2);
    let rhs = if s.misorder { t1.mul(&t2) } else { t2.mul(&t1) }.mul(&r_right);
    let points: Vec<String> = s.points.iter().map(|p| p.to_string()).collect();
    let mut report = CheckReport::new("rll", family.mode())
        .param("relation", relation.name())
        .param("points", points.join(", "))
        .param("t", &s.t)
        .param("t_prime", &s.t_prime)
        .param("central", &s.central);
    if relation != Relation::PlusPlus {
        report = report.param("i", s.i);
    }
    if relation == Relation::MinusMinus {
        report = report.param("j", s.j);
    }
    if s.misorder {
        report = report.detail("misordered", true);
    }
    Ok(family.describe(report).with_residual(lhs.first_nonzero_residual(&rhs)))
}

/// `l₁₁(t) l₂₂(t−ħ) − l₁₂(t) l₂₁(t−ħ)` from the auxiliary blocks of `L(t)` and `L(t−ħ)`.
pub fn qdet_blocks<S: Scalar>(l_t: &TensorMat<S>, l_shifted: &TensorMat<S>) -> TensorMat<S> {
    let a = l_t.leg1_block(0, 0).mul(&l_shifted.leg1_block(1, 1));
    let b = l_t.leg1_block(0, 1).mul(&l_shifted.leg1_block(1, 0));
    a.sub(&b)
}

/// `det_ħ` of `R(t)` viewed as an L-operator.
pub fn qdet_as_l<F: RFamily>(family: &F, t: &HbarAffine) -> Result<F::S> {
    let l = family.r_matrix(t)?;
    let ls = family.r_matrix(&t.shift_hbar(&Rat::from_int(-1)))?;
    qdet_blocks(&l, &ls)
        .as_scalar()
        .ok_or_else(|| Error::NotInvertible("quantum determinant is not scalar".into()))
}

/// `det_ħ` of the bare `R(t)` as a rational function of `t`, for numeric ħ.
pub fn qdet_bare_symbolic(hbar: &Rat) -> Result<RatFunc> {
    let t = RatFunc::var();
    let h = RatFunc::constant(hbar.clone());
    let l = bare_r(&t, &h)?;
    let ls = bare_r(&t.sub_ref(&h), &h)?;
    qdet_blocks(&l, &ls)
        .as_scalar()
        .ok_or_else(|| Error::NotInvertible("quantum determinant is not scalar".into()))
}

/// `(t − ħ)/t` for numeric ħ.
pub fn qdet_bare_expected(hbar: &Rat) -> RatFunc {
    RatFunc::new(Poly::new(vec![-hbar.clone(), Rat::one()]), Poly::var()).unwrap()
}

/// `det_ħ` of the normalized `R(t)` as an ħ-series over rational functions of `t`.
pub fn qdet_normalized_symbolic(order: usize) -> Result<HSeries<RatFunc>> {
    let l = normalized_r_general(RatFunc::var(), &Rat::zero(), order)?;
    let ls = normalized_r_general(RatFunc::var(), &Rat::from_int(-1), order)?;
    qdet_blocks(&l, &ls)
        .as_scalar()
        .ok_or_else(|| Error::NotInvertible("quantum determinant is not scalar".into()))
}

/// Symbolic quantum determinant check: `(t−ħ)/t` for bare, `1 + O(ħ^{N+1})` for normalized.
pub fn qdet_check(mode: RMode, hbar: &Rat) -> Result<CheckReport> {
    match mode.validate()? {
        RMode::Bare => {
            let det = qdet_bare_symbolic(hbar)?;
            let expected = qdet_bare_expected(hbar);
            let residual = det.sub_ref(&expected);
            let report = CheckReport::new("quantum_determinant", mode)
                .param("hbar", hbar)
                .detail("det", det.fmt_in("t"))
                .detail("expected", expected.fmt_in("t"));
            Ok(report.with_residual(as_residual(residual)))
        }
        RMode::Normalized { order } => {
            let det = qdet_normalized_symbolic(order)?;
            let residual = det.sub_ref(&HSeries::one());
            let shown = HSeries::from_coeffs(det.coeffs().to_vec(), det.order());
            let report = CheckReport::new("quantum_determinant", mode)
                .param("hbar", "formal")
                .detail("det", shown.to_string())
                .detail("expected", "1");
            Ok(report.with_residual(as_residual(residual)))
        }
    }
}

fn as_residual<S: Scalar>(value: S) -> Option<crate::tensor::Residual<S>> {
    (!value.is_zero()).then_some(crate::tensor::Residual { row: 0, col: 0, value })
}

/// `det_ħ(L_1(t−z_1)⋯L_n(t−z_n)) = Π_j det_ħ(R(t−z_j))` on `V^{⊗n}`.
pub fn qdet_multiplicativity_check<F: RFamily>(family: &F, t: &HbarAffine, points: &[HbarAffine]) -> Result<CheckReport> {
    let at = |t: &HbarAffine| EvalLOperator::l_plus(points, t).evaluate(family);
    let det = qdet_blocks(&at(t)?, &at(&t.shift_hbar(&Rat::from_int(-1)))?);
    let mut product = F::S::one();
    for z in points {
        product = product.mul_ref(&qdet_as_l(family, &(t - z))?);
    }
    let expected = TensorMat::identity(points.len()).scale(&product);
    let pts: Vec<String> = points.iter().map(|p| p.to_string()).collect();
    let report = CheckReport::new("qdet_multiplicativity", family.mode())
        .param("t", t)
        .param("points", pts.join(", "))
        .detail("product_of_factors", product.to_string());
    Ok(family.describe(report).with_residual(det.first_nonzero_residual(&expected)))
}

pub fn qdet_multiplicativity(mode: RMode, hbar: &Rat, t: &Rat, points: &[Rat]) -> Result<CheckReport> {
    let t = HbarAffine::constant(t.clone());
    let pts: Vec<HbarAffine> = points.iter().cloned().map(HbarAffine::constant).collect();
    match mode.validate()? {
        RMode::Bare => qdet_multiplicativity_check(&Bare { hbar: hbar.clone() }, &t, &pts),
        RMode::Normalized { order } => qdet_multiplicativity_check(&Normalized { order }, &t, &pts),
    }
}
