//! Problem instances for the four application families.
//!
//! Every family is stored in the same internal form: a quadratic smooth part
//! ½xᵀHx + qᵀx + const, a nonsmooth penalty that depends on the family, and a
//! feasible set. The subsolvers only ever need H (through Q̄ = H + θI), the
//! gradient Hx + q, and the penalty.

mod curvature;
mod feasible;
mod norms;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use curvature::{curvature_alpha, CurvatureMatrix};
pub use feasible::FeasibleSet;
pub(crate) use feasible::project_simplex;
pub use norms::{subgrad_top_s, top_s_norm, top_s_support};

use crate::error::{Error, Result};
use crate::linalg;

/// Tolerance band for the hard indicators x ≥ 0 and −1 ≤ x ≤ 1.
pub const INDICATOR_TOL: f64 = 1e-9;

/// Margin added to the power-iteration eigenvalue when a shift is `Auto`.
const AUTO_SHIFT_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Sparse index tracking on the simplex.
    Sit,
    /// Nonnegative sparse PCA on the nonnegative unit sphere.
    Nnspca,
    /// Binary-relaxed least squares, concave quadratic penalty.
    Dcpb1,
    /// Binary-relaxed least squares, −λ‖x‖₂ penalty.
    Dcpb2,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Sit => "sit",
            Family::Nnspca => "nnspca",
            Family::Dcpb1 => "dcpb1",
            Family::Dcpb2 => "dcpb2",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sit" => Ok(Family::Sit),
            "nnspca" => Ok(Family::Nnspca),
            "dcpb1" => Ok(Family::Dcpb1),
            "dcpb2" => Ok(Family::Dcpb2),
            other => Err(Error::InvalidConfig(format!("unknown family '{other}'"))),
        }
    }
}

/// A diagonal shift that is either given or derived from the spectrum of AᵀA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shift {
    Auto,
    Value(f64),
}

#[derive(Debug, Clone)]
pub struct ProblemInstance {
    family: Family,
    a: Option<DMatrix<f64>>,
    y: DVector<f64>,
    lambda: f64,
    s: usize,
    c: f64,
    gamma: f64,
    theta: f64,
    hessian: DMatrix<f64>,
    linear: DVector<f64>,
    offset: f64,
    /// Constant separating F from its penalty form (DCPB1 only).
    penalty_offset: f64,
}

impl ProblemInstance {
    /// ½‖Ax − y‖² − λ‖x‖_\[s\] over the unit simplex.
    pub fn sit(a: DMatrix<f64>, y: DVector<f64>, lambda: f64, s: usize, theta: f64) -> Result<Self> {
        check_data(&a, Some(&y))?;
        check_common(a.ncols(), lambda, theta)?;
        check_sparsity(s, a.ncols())?;
        let (hessian, linear, offset) = least_squares_parts(&a, &y);
        Ok(Self {
            family: Family::Sit,
            a: Some(a),
            y,
            lambda,
            s,
            c: 1.0,
            gamma: 0.0,
            theta,
            hessian,
            linear,
            offset,
            penalty_offset: 0.0,
        })
    }

    /// ½xᵀQ̂x + λ(xᵀ1 − ‖x‖_\[s\]) over the nonnegative unit sphere, with
    /// Q̂ = γI − AᵀA.
    pub fn nnspca(a: DMatrix<f64>, lambda: f64, s: usize, gamma: Shift, theta: f64) -> Result<Self> {
        check_data(&a, None)?;
        let gram = a.transpose() * &a;
        let gamma = resolve_shift(&gram, gamma)?;
        let qhat = DMatrix::identity(gram.nrows(), gram.ncols()) * gamma - gram;
        let mut p = Self::nnspca_with_qhat(qhat, lambda, s, theta)?;
        p.a = Some(a);
        p.gamma = gamma;
        Ok(p)
    }

    /// NNSPCA with the positive semidefinite matrix Q̂ given directly.
    pub fn nnspca_with_qhat(qhat: DMatrix<f64>, lambda: f64, s: usize, theta: f64) -> Result<Self> {
        let n = qhat.ncols();
        check_square_finite(&qhat)?;
        check_common(n, lambda, theta)?;
        check_sparsity(s, n)?;
        check_psd(&qhat, "NNSPCA matrix γI − AᵀA")?;
        Ok(Self {
            family: Family::Nnspca,
            a: None,
            y: DVector::zeros(0),
            lambda,
            s,
            c: 1.0,
            gamma: 0.0,
            theta,
            hessian: qhat,
            linear: DVector::zeros(n),
            offset: 0.0,
            penalty_offset: 0.0,
        })
    }

    /// pᵀx − ½xᵀQ̂x over the box-hyperplane set, with p = −Aᵀy and
    /// Q̂ = 2λI − AᵀA. `lambda` is the penalty λ, so the diagonal shift is 2λ.
    pub fn dcpb1(a: DMatrix<f64>, y: DVector<f64>, c: f64, lambda: Shift, theta: f64) -> Result<Self> {
        check_data(&a, Some(&y))?;
        let gram = a.transpose() * &a;
        let shift = match lambda {
            Shift::Auto => resolve_shift(&gram, Shift::Auto)?,
            Shift::Value(l) => {
                if !(l >= 0.0 && l.is_finite()) {
                    return Err(Error::InvalidInstance(format!("lambda must be finite and >= 0, got {l}")));
                }
                2.0 * l
            }
        };
        let qhat = DMatrix::identity(gram.nrows(), gram.ncols()) * shift - gram;
        let p = -(a.transpose() * &y);
        let mut inst = Self::dcpb1_with_qhat(p, qhat, c, theta)?;
        inst.penalty_offset = 0.5 * y.norm_squared() + 0.5 * shift * a.ncols() as f64;
        inst.lambda = 0.5 * shift;
        inst.gamma = shift;
        inst.a = Some(a);
        inst.y = y;
        Ok(inst)
    }

    /// DCPB1 with p and the positive semidefinite Q̂ given directly. The
    /// penalty λ is unknown here and reported as 0.
    pub fn dcpb1_with_qhat(p: DVector<f64>, qhat: DMatrix<f64>, c: f64, theta: f64) -> Result<Self> {
        let n = qhat.ncols();
        check_square_finite(&qhat)?;
        if p.len() != n || p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance(format!("linear term must be finite with length {n}")));
        }
        check_common(n, 0.0, theta)?;
        check_target(c, n)?;
        check_psd(&qhat, "DCPB1 matrix 2λI − AᵀA")?;
        Ok(Self {
            family: Family::Dcpb1,
            a: None,
            y: DVector::zeros(0),
            lambda: 0.0,
            s: n,
            c,
            gamma: 0.0,
            theta,
            hessian: -qhat,
            linear: p,
            offset: 0.0,
            penalty_offset: 0.0,
        })
    }

    /// ½‖Ax − y‖² − λ‖x‖₂ over the box-hyperplane set.
    pub fn dcpb2(a: DMatrix<f64>, y: DVector<f64>, lambda: f64, c: f64, theta: f64) -> Result<Self> {
        check_data(&a, Some(&y))?;
        check_common(a.ncols(), lambda, theta)?;
        check_target(c, a.ncols())?;
        let (hessian, linear, offset) = least_squares_parts(&a, &y);
        Ok(Self {
            family: Family::Dcpb2,
            s: a.ncols(),
            a: Some(a),
            y,
            lambda,
            c,
            gamma: 0.0,
            theta,
            hessian,
            linear,
            offset,
            penalty_offset: 0.0,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.hessian.ncols()
    }

    /// Data matrix A, when the instance was built from one.
    pub fn a(&self) -> Option<&DMatrix<f64>> {
        self.a.as_ref()
    }

    /// Target vector y (empty for NNSPCA and directly specified DCPB1).
    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn sparsity(&self) -> usize {
        self.s
    }

    /// Hyperplane target c (DCPB families); 1 for the others.
    pub fn sum_target(&self) -> f64 {
        self.c
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Hessian H of the smooth part (AᵀA, Q̂ or −Q̂ depending on the family).
    pub fn hessian(&self) -> &DMatrix<f64> {
        &self.hessian
    }

    /// Linear term q of the smooth part.
    pub fn linear(&self) -> &DVector<f64> {
        &self.linear
    }

    /// Same instance with a different proximal parameter.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        check_common(self.n(), self.lambda, theta)?;
        Ok(Self { theta, ..self.clone() })
    }

    pub fn feasible_set(&self) -> FeasibleSet {
        match self.family {
            Family::Sit => FeasibleSet::Simplex,
            Family::Nnspca => FeasibleSet::NonnegSphere,
            Family::Dcpb1 | Family::Dcpb2 => FeasibleSet::BoxHyperplane { c: self.c },
        }
    }

    /// Q̄ = H + θI.
    pub fn curvature(&self) -> CurvatureMatrix {
        let n = self.n();
        let qbar = &self.hessian + DMatrix::identity(n, n) * self.theta;
        CurvatureMatrix::new(qbar).expect("H is symmetric by construction")
    }

    /// F(x) = f(x) + h(x) + g(x), with the hard indicators checked.
    pub fn eval_objective(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_indicator(x)?;
        Ok(self.objective(x))
    }

    /// F(x) without the indicator check.
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        self.smooth_value(x) + self.penalty(x)
    }

    /// ½xᵀHx + qᵀx + const.
    pub fn smooth_value(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.hessian * x)) + self.linear.dot(x) + self.offset
    }

    /// The nonsmooth, non-indicator part of F.
    pub fn penalty(&self, x: &DVector<f64>) -> f64 {
        let xs = x.as_slice();
        match self.family {
            Family::Sit => -self.lambda * top_s_norm(xs, self.s),
            Family::Nnspca => self.lambda * (x.sum() - top_s_norm(xs, self.s)),
            Family::Dcpb1 => 0.0,
            Family::Dcpb2 => -self.lambda * x.norm(),
        }
    }

    /// F written as a nonnegative penalty added to the data fit:
    /// SIT ½‖Ax−y‖² + λ(‖x‖₁ − ‖x‖_\[s\]); DCPB1 ½‖Ax−y‖² + λ(n − ‖x‖²);
    /// DCPB2 ½‖Ax−y‖² + λ(√n − ‖x‖₂). Differs from F by a constant on Ω.
    pub fn penalty_form_objective(&self, x: &DVector<f64>) -> f64 {
        let f = self.objective(x);
        match self.family {
            Family::Sit => f + self.lambda * x.lp_norm(1),
            Family::Nnspca => f,
            Family::Dcpb1 => f + self.penalty_offset,
            Family::Dcpb2 => f + self.lambda * (self.n() as f64).sqrt(),
        }
    }

    /// ∇f(x) = Hx + q.
    pub fn eval_gradient_f(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.hessian * x + &self.linear
    }

    /// An element of ∇f(x) + ∂g(x) + ∂h(x), taking 0 for the indicator part
    /// and the tie-broken subgradient for ‖x‖_\[s\].
    pub fn composite_subgradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.eval_gradient_f(x) + self.penalty_subgradient(x)
    }

    /// An element of the subdifferential of [`penalty`](Self::penalty).
    pub fn penalty_subgradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = self.n();
        match self.family {
            Family::Sit => {
                let sg = subgrad_top_s(x.as_slice(), self.s);
                DVector::from_iterator(n, sg.into_iter().map(|v| -self.lambda * v))
            }
            Family::Nnspca => {
                let sg = subgrad_top_s(x.as_slice(), self.s);
                DVector::from_iterator(n, sg.into_iter().map(|v| self.lambda * (1.0 - v)))
            }
            Family::Dcpb1 => DVector::zeros(n),
            Family::Dcpb2 => {
                let norm = x.norm();
                if norm > 0.0 {
                    x * (-self.lambda / norm)
                } else {
                    DVector::zeros(n)
                }
            }
        }
    }

    /// penalty(x + d) − penalty(x) for a step `d` on `block`, given
    /// `x_support = top_s_support(x)` and `x_new = x + d`. Works from the
    /// touched coordinates only: differencing the two penalties loses about
    /// ε·λ‖x‖ to cancellation, which hides small improvements when λ is large.
    pub(crate) fn penalty_delta(
        &self,
        x: &DVector<f64>,
        x_support: &[usize],
        x_new: &DVector<f64>,
        block: &[usize],
        d: &[f64],
    ) -> f64 {
        let top_s_change = || {
            let step = |i: usize| block.iter().position(|&b| b == i).map_or(0.0, |a| d[a]);
            let new_support = top_s_support(x_new.as_slice(), self.s);
            let mut change = 0.0;
            for &i in &new_support {
                change += if x_support.binary_search(&i).is_ok() { norms::abs_change(x[i], step(i)) } else { x_new[i].abs() };
            }
            for &i in x_support {
                if new_support.binary_search(&i).is_err() {
                    change -= x[i].abs();
                }
            }
            change
        };
        match self.family {
            Family::Sit => -self.lambda * top_s_change(),
            Family::Nnspca => self.lambda * (d.iter().sum::<f64>() - top_s_change()),
            Family::Dcpb1 => 0.0,
            Family::Dcpb2 => {
                let sq_change: f64 = block.iter().zip(d).map(|(&i, &di)| di * (2.0 * x[i] + di)).sum();
                let denom = x_new.norm() + x.norm();
                if denom > 0.0 {
                    -self.lambda * sq_change / denom
                } else {
                    0.0
                }
            }
        }
    }

    fn check_indicator(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::InvalidInstance(format!("point has length {}, expected {}", x.len(), self.n())));
        }
        let bad = |v: f64| match self.family {
            Family::Sit | Family::Nnspca => !(v >= -INDICATOR_TOL),
            Family::Dcpb1 | Family::Dcpb2 => !(v.abs() <= 1.0 + INDICATOR_TOL),
        };
        match x.iter().position(|&v| bad(v) || !v.is_finite()) {
            Some(index) => Err(Error::InfeasibleIndicator { index, value: x[index] }),
            None => Ok(()),
        }
    }
}

fn least_squares_parts(a: &DMatrix<f64>, y: &DVector<f64>) -> (DMatrix<f64>, DVector<f64>, f64) {
    let at = a.transpose();
    (&at * a, -(&at * y), 0.5 * y.norm_squared())
}

fn resolve_shift(gram: &DMatrix<f64>, shift: Shift) -> Result<f64> {
    match shift {
        Shift::Value(g) if g.is_finite() && g >= 0.0 => Ok(g),
        Shift::Value(g) => Err(Error::InvalidInstance(format!("shift must be finite and >= 0, got {g}"))),
        Shift::Auto => {
            let top = linalg::power_iteration(gram, linalg::POWER_ITERATION_STEPS, linalg::POWER_ITERATION_TOL);
            let mut gamma = top.max(0.0) + AUTO_SHIFT_MARGIN;
            // Power iteration approaches λmax from below; top up if it fell short.
            let n = gram.nrows();
            let deficit = -linalg::min_eigenvalue(&(DMatrix::identity(n, n) * gamma - gram));
            if deficit > 0.0 {
                gamma += deficit + AUTO_SHIFT_MARGIN;
            }
            Ok(gamma)
        }
    }
}

fn check_data(a: &DMatrix<f64>, y: Option<&DVector<f64>>) -> Result<()> {
    if a.nrows() < 1 || a.ncols() < 2 {
        return Err(Error::InvalidInstance(format!(
            "data matrix must be m x n with m >= 1 and n >= 2, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInstance("data matrix has non-finite entries".into()));
    }
    if let Some(y) = y {
        if y.len() != a.nrows() {
            return Err(Error::InvalidInstance(format!("target has length {}, expected {}", y.len(), a.nrows())));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance("target has non-finite entries".into()));
        }
    }
    Ok(())
}

fn check_square_finite(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() || m.ncols() < 2 {
        return Err(Error::InvalidInstance(format!("expected a square matrix with n >= 2, got {}x{}", m.nrows(), m.ncols())));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInstance("matrix has non-finite entries".into()));
    }
    Ok(())
}

fn check_common(n: usize, lambda: f64, theta: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInstance(format!("need n >= 2, got {n}")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInstance(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::InvalidInstance(format!("theta must be finite and >= 0, got {theta}")));
    }
    Ok(())
}

fn check_sparsity(s: usize, n: usize) -> Result<()> {
    if s > n {
        return Err(Error::InvalidInstance(format!("sparsity {s} exceeds n = {n}")));
    }
    Ok(())
}

fn check_target(c: f64, n: usize) -> Result<()> {
    if !c.is_finite() || c.abs() > n as f64 {
        return Err(Error::InfeasibleTarget { c, n });
    }
    Ok(())
}

fn check_psd(m: &DMatrix<f64>, what: &str) -> Result<()> {
    let min = linalg::min_eigenvalue(m);
    let tol = 1e-9 * linalg::max_abs(m).max(1.0);
    if min < -tol {
        return Err(Error::InvalidInstance(format!("{what} is not positive semidefinite (min eigenvalue {min:e})")));
    }
    Ok(())
}
