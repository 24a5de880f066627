//! The qKZ difference operators
//! `A_i = R^{(i,i−1)}(z_{i,i−1}+η)⋯R^{(i,1)}(z_{i,1}+η) · R^{(i,n)}(z_{i,n})⋯R^{(i,i+1)}(z_{i,i+1})`
//! with step `η = ħ(k+2)`, their discrete flatness, and transport of vectors
//! of `V^{⊗n}` along lattice paths.
//!
//! Points are stored as `a + bħ`; a shift by `ηδ_i` adds `k + 2` to `b_i`.

use serde::{Deserialize, Serialize};

use crate::algebra::{Rat, Scalar};
use crate::error::{Error, Result};
use crate::report::CheckReport;
use crate::rmatrix::{HbarAffine, RFamily};
use crate::tensor::TensorMat;

#[derive(Debug, Clone)]
pub struct QkzSystem<F: RFamily> {
    family: F,
    level: Rat,
    points: Vec<HbarAffine>,
    corrupt: Option<(usize, usize)>,
}

/// One lattice step `z → z + sign·ηδ_i` (legs are 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub i: usize,
    pub sign: i8,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePath {
    pub steps: Vec<Step>,
}

impl LatticePath {
    pub fn new(steps: Vec<Step>) -> Self {
        LatticePath { steps }
    }

    /// `p` steps along `+δ_i`, `q` along `+δ_j`, then back along both.
    pub fn rectangle(i: usize, j: usize, p: usize, q: usize) -> Self {
        let mut steps = Vec::with_capacity(2 * (p + q));
        steps.extend(std::iter::repeat_n(Step { i, sign: 1 }, p));
        steps.extend(std::iter::repeat_n(Step { i: j, sign: 1 }, q));
        steps.extend(std::iter::repeat_n(Step { i, sign: -1 }, p));
        steps.extend(std::iter::repeat_n(Step { i: j, sign: -1 }, q));
        LatticePath { steps }
    }

    pub fn concat(&self, other: &LatticePath) -> LatticePath {
        LatticePath { steps: self.steps.iter().chain(&other.steps).copied().collect() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoinvariantVector<S> {
    components: Vec<S>,
}

impl<S: Scalar> CoinvariantVector<S> {
    pub fn new(components: Vec<S>, n: usize) -> Result<Self> {
        if components.len() != 1 << n {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {n} points (expected {})",
                components.len(),
                1usize << n
            )));
        }
        Ok(CoinvariantVector { components })
    }

    pub fn components(&self) -> &[S] {
        &self.components
    }

    pub fn into_components(self) -> Vec<S> {
        self.components
    }
}

impl<F: RFamily> QkzSystem<F> {
    pub fn new(family: F, level: Rat, points: Vec<HbarAffine>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 points, got {}", points.len())));
        }
        let sys = QkzSystem { family, level, points, corrupt: None };
        sys.validate_points()?;
        Ok(sys)
    }

    /// Convenience constructor from rational points.
    pub fn from_rats(family: F, level: Rat, points: &[Rat]) -> Result<Self> {
        Self::new(family, level, points.iter().cloned().map(HbarAffine::constant).collect())
    }

    fn validate_points(&self) -> Result<()> {
        for (x, p) in self.points.iter().enumerate() {
            for q in &self.points[x + 1..] {
                if !self.family.distinct(p, q) {
                    return Err(Error::InvalidConfig("points must be pairwise distinct".into()));
                }
            }
        }
        Ok(())
    }

    /// Test hook: the factor `R^{(i,j)}` of every `A_i` is replaced by the identity.
    pub fn with_corrupted_factor(mut self, i: usize, j: usize) -> Self {
        self.corrupt = Some((i, j));
        self
    }

    pub fn family(&self) -> &F {
        &self.family
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn level(&self) -> &Rat {
        &self.level
    }

    pub fn points(&self) -> &[HbarAffine] {
        &self.points
    }

    /// `k + 2`, the step in units of ħ.
    pub fn step_in_hbar(&self) -> Rat {
        &self.level + &Rat::from_int(2)
    }

    pub fn degenerate_step(&self) -> bool {
        self.step_in_hbar().is_zero()
    }

    fn check_leg(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n() {
            return Err(Error::BadLegIndex { leg: i, n_legs: self.n() });
        }
        Ok(())
    }

    /// The system at `z + sign·ηδ_i`. Lattice sites may bring points
    /// together; coincidences surface as poles of the factors that need them.
    pub fn shifted(&self, i: usize, sign: i8) -> Result<Self> {
        self.check_leg(i)?;
        let mut out = self.clone();
        let db = &self.step_in_hbar() * &Rat::from_int(sign as i64);
        out.points[i - 1] = out.points[i - 1].shift_hbar(&db);
        Ok(out)
    }

    /// The same system with every point translated by `c`.
    pub fn translated(&self, c: &HbarAffine) -> Result<Self> {
        let points = self.points.iter().map(|p| p + c).collect();
        let mut out = Self::new(self.family.clone(), self.level.clone(), points)?;
        out.corrupt = self.corrupt;
        Ok(out)
    }

    /// Ordered factors `(j, argument)` of `A_i`, each meaning `R^{(i,j)}(argument)`.
    pub fn a_factors(&self, i: usize) -> Result<Vec<(usize, HbarAffine)>> {
        self.check_leg(i)?;
        let zi = &self.points[i - 1];
        let eta = self.step_in_hbar();
        let mut out = Vec::with_capacity(self.n() - 1);
        for j in (1..i).rev() {
            out.push((j, (zi - &self.points[j - 1]).shift_hbar(&eta)));
        }
        for j in (i + 1..=self.n()).rev() {
            out.push((j, zi - &self.points[j - 1]));
        }
        Ok(out)
    }

    fn factor(&self, i: usize, j: usize, arg: &HbarAffine) -> Result<TensorMat<F::S>> {
        if self.corrupt == Some((i, j)) {
            return Ok(TensorMat::identity(self.n()));
        }
        let r = self.family.r_matrix(arg).map_err(|e| match e {
            Error::PoleEncountered(msg) => {
                Error::PoleEncountered(format!("factor R^({i},{j})({arg}) of A_{i}: {msg}"))
            }
            other => other,
        })?;
        r.embed(self.n(), i, j)
    }

    pub fn build_a(&self, i: usize) -> Result<TensorMat<F::S>> {
        let mut acc = TensorMat::identity(self.n());
        for (j, arg) in self.a_factors(i)? {
            acc = acc.mul(&self.factor(i, j, &arg)?);
        }
        Ok(acc)
    }

    /// `A_i⁻¹` as the reverse-ordered product of inverted factors.
    pub fn build_a_inverse(&self, i: usize) -> Result<TensorMat<F::S>> {
        let mut acc = TensorMat::identity(self.n());
        for (j, arg) in self.a_factors(i)?.into_iter().rev() {
            let inv = self.factor(i, j, &arg)?.inverse().map_err(|e| singular_as_pole(e, i, self))?;
            acc = acc.mul(&inv);
        }
        Ok(acc)
    }

    fn pair_report(&self, identity: &str, i: usize, j: usize) -> CheckReport {
        let points: Vec<String> = self.points.iter().map(|p| p.to_string()).collect();
        let report = CheckReport::new(identity, self.family.mode())
            .param("i", i)
            .param("j", j)
            .param("level", &self.level)
            .param("points", points.join(", "));
        let report = self.family.describe(report);
        if self.degenerate_step() {
            report.detail("degenerate_step", true)
        } else {
            report
        }
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        self.check_leg(i)?;
        self.check_leg(j)?;
        if i == j {
            return Err(Error::InvalidConfig(format!("flatness needs two different directions, got i = j = {i}")));
        }
        Ok(())
    }

    /// `A_j(z+ηδ_i) A_i(z) = A_i(z+ηδ_j) A_j(z)`.
    pub fn flatness_check(&self, i: usize, j: usize) -> Result<CheckReport> {
        self.check_pair(i, j)?;
        let lhs = self.shifted(i, 1)?.build_a(j)?.mul(&self.build_a(i)?);
        let rhs = self.shifted(j, 1)?.build_a(i)?.mul(&self.build_a(j)?);
        Ok(self.pair_report("flatness", i, j).with_residual(lhs.first_nonzero_residual(&rhs)))
    }

    /// `A_i(z)⁻¹ A_j(z+ηδ_i)⁻¹ A_i(z+ηδ_j) A_j(z)`.
    pub fn plaquette_monodromy(&self, i: usize, j: usize) -> Result<TensorMat<F::S>> {
        self.check_pair(i, j)?;
        let a = self.build_a_inverse(i)?;
        let b = self.shifted(i, 1)?.build_a_inverse(j)?;
        let c = self.shifted(j, 1)?.build_a(i)?;
        let d = self.build_a(j)?;
        Ok(a.mul(&b).mul(&c).mul(&d))
    }

    pub fn plaquette_check(&self, i: usize, j: usize) -> Result<CheckReport> {
        let m = self.plaquette_monodromy(i, j)?;
        let id = TensorMat::identity(self.n());
        Ok(self.pair_report("plaquette_monodromy", i, j).with_residual(m.first_nonzero_residual(&id)))
    }

    /// One step of transport: forward applies `A_i(z)`, backward applies
    /// `A_i(z − ηδ_i)⁻¹`.
    pub fn step(&self, step: Step, v: &CoinvariantVector<F::S>) -> Result<(CoinvariantVector<F::S>, Self)> {
        match step.sign {
            1 => {
                let w = self.build_a(step.i)?.apply(&v.components)?;
                Ok((CoinvariantVector { components: w }, self.shifted(step.i, 1)?))
            }
            -1 => {
                let back = self.shifted(step.i, -1)?;
                let w = back.build_a(step.i)?.solve(&v.components).map_err(|e| singular_as_pole(e, step.i, &back))?;
                Ok((CoinvariantVector { components: w }, back))
            }
            s => Err(Error::InvalidConfig(format!("step sign must be 1 or -1, got {s}"))),
        }
    }

    /// Transports `v` along `path`; errors carry the index of the failing step.
    pub fn transport(
        &self,
        path: &LatticePath,
        v: &CoinvariantVector<F::S>,
    ) -> Result<(CoinvariantVector<F::S>, Self)> {
        if v.components.len() != 1 << self.n() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} points",
                v.components.len(),
                self.n()
            )));
        }
        let mut state = (v.clone(), self.clone());
        for (k, &s) in path.steps.iter().enumerate() {
            state = state.1.step(s, &state.0).map_err(|e| Error::AtStep { step: k, source: Box::new(e) })?;
        }
        Ok(state)
    }
}

// A zero of det A_i is a pole of A_i⁻¹.
fn singular_as_pole<F: RFamily>(e: Error, i: usize, sys: &QkzSystem<F>) -> Error {
    match e {
        Error::SingularOperator(msg) => {
            let points: Vec<String> = sys.points.iter().map(|p| p.to_string()).collect();
            Error::PoleEncountered(format!("inverse of A_{i} at points [{}]: {msg}", points.join(", ")))
        }
        other => other,
    }
}
