//! Explicit high-order jump conditions, evaluated on correction functions
//! to verify that the minimization enforces them implicitly.
//!
//! Each condition is the jump of a per-side expression built from field
//! derivatives. For the cylinder problems every condition vanishes for the
//! exact solution, so its value on the computed expansions is an error.

use serde::{Deserialize, Serialize};

use crate::analytic::{Material, ReferenceSolution};
use crate::cfm::CorrectionFunction;
use crate::geometry::Patch;
use crate::grid::FieldKind::{self, Ez, Hx, Hy};
use crate::{Error, Result, Side};

/// Anything that can supply space-time derivatives of both one-sided fields.
pub trait FieldDerivatives {
    /// `orders = [d_x, d_y, d_t]`.
    fn derivative(&self, side: Side, field: FieldKind, orders: [usize; 3], x: f64, y: f64, t: f64) -> Result<f64>;
}

impl FieldDerivatives for CorrectionFunction {
    fn derivative(&self, side: Side, field: FieldKind, orders: [usize; 3], x: f64, y: f64, t: f64) -> Result<f64> {
        CorrectionFunction::derivative(self, side, field, orders, x, y, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    NonMagnetic,
    Magnetic,
}

/// One side's view at an interface point, with the frame frozen there.
pub struct SideView<'a> {
    source: &'a dyn FieldDerivatives,
    side: Side,
    pub material: Material,
    pub point: [f64; 2],
    pub normal: [f64; 2],
    pub t: f64,
}

impl SideView<'_> {
    pub fn d(&self, field: FieldKind, orders: [usize; 3]) -> Result<f64> {
        self.source.derivative(self.side, field, orders, self.point[0], self.point[1], self.t)
    }

    /// Tangent: the normal rotated by +90 degrees.
    pub fn tangent(&self) -> [f64; 2] {
        [-self.normal[1], self.normal[0]]
    }

    /// Derivative of `field` along direction `dir`, plus extra orders.
    fn dir(&self, field: FieldKind, dir: [f64; 2], extra: [usize; 3]) -> Result<f64> {
        let [a, b, c] = extra;
        Ok(dir[0] * self.d(field, [a + 1, b, c])? + dir[1] * self.d(field, [a, b + 1, c])?)
    }

    /// Components of `H` along `dir` and its derivative along `along`.
    fn h_along(&self, dir: [f64; 2], along: Option<[f64; 2]>) -> Result<f64> {
        match along {
            None => Ok(dir[0] * self.d(Hx, [0; 3])? + dir[1] * self.d(Hy, [0; 3])?),
            Some(a) => Ok(dir[0] * self.dir(Hx, a, [0; 3])? + dir[1] * self.dir(Hy, a, [0; 3])?),
        }
    }

    /// `d/d(along) (mu H . dir)` with the product rule on `mu`.
    fn d_mu_h(&self, dir: [f64; 2], along: [f64; 2]) -> Result<f64> {
        let g = self.material.grad_mu;
        let d_mu = g[0] * along[0] + g[1] * along[1];
        Ok(d_mu * self.h_along(dir, None)? + self.material.mu * self.h_along(dir, Some(along))?)
    }
}

type Expression = fn(&SideView) -> Result<f64>;

#[derive(Clone, Copy)]
pub struct JumpCondition {
    pub order: usize,
    pub name: &'static str,
    expression: Expression,
}

impl std::fmt::Debug for JumpCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("JumpCondition").field("order", &self.order).field("name", &self.name).finish()
    }
}

impl JumpCondition {
    /// Per-side expression whose jump the condition constrains.
    pub fn side_value(&self, view: &SideView) -> Result<f64> {
        (self.expression)(view)
    }
}

#[derive(Debug, Clone)]
pub struct JumpConditionSet {
    pub regime: Regime,
    pub conditions: Vec<JumpCondition>,
}

fn c(order: usize, name: &'static str, expression: Expression) -> JumpCondition {
    JumpCondition { order, name, expression }
}

impl JumpConditionSet {
    /// Twelve conditions of orders 0 to 3 for continuous `mu` and piecewise
    /// constant `eps`, from continuity of time derivatives.
    pub fn non_magnetic() -> Self {
        let conditions = vec![
            c(0, "Hx", |v| v.d(Hx, [0, 0, 0])),
            c(0, "Hy", |v| v.d(Hy, [0, 0, 0])),
            c(0, "Ez", |v| v.d(Ez, [0, 0, 0])),
            c(1, "dy Ez", |v| v.d(Ez, [0, 1, 0])),
            c(1, "dx Ez", |v| v.d(Ez, [1, 0, 0])),
            c(1, "curl H / eps", |v| Ok((v.d(Hy, [1, 0, 0])? - v.d(Hx, [0, 1, 0])?) / v.material.eps)),
            c(2, "laplacian Ez / eps", |v| Ok((v.d(Ez, [2, 0, 0])? + v.d(Ez, [0, 2, 0])?) / v.material.eps)),
            c(2, "(dyy Hx - dxy Hy) / eps", |v| Ok((v.d(Hx, [0, 2, 0])? - v.d(Hy, [1, 1, 0])?) / v.material.eps)),
            c(2, "(dxx Hy - dxy Hx) / eps", |v| Ok((v.d(Hy, [2, 0, 0])? - v.d(Hx, [1, 1, 0])?) / v.material.eps)),
            c(3, "dy laplacian Ez / eps", |v| Ok((v.d(Ez, [2, 1, 0])? + v.d(Ez, [0, 3, 0])?) / v.material.eps)),
            c(3, "dx laplacian Ez / eps", |v| Ok((v.d(Ez, [3, 0, 0])? + v.d(Ez, [1, 2, 0])?) / v.material.eps)),
            c(3, "third-order H / eps^2", |v| {
                let s = v.d(Hy, [3, 0, 0])? + v.d(Hy, [1, 2, 0])? - v.d(Hx, [0, 3, 0])? - v.d(Hx, [2, 1, 0])?;
                Ok(s / (v.material.eps * v.material.eps))
            }),
        ];
        Self { regime: Regime::NonMagnetic, conditions }
    }

    /// Seven conditions of orders 0 and 1 in the local normal/tangent frame.
    pub fn magnetic() -> Self {
        let conditions = vec![
            c(0, "H tangential", |v| v.h_along(v.tangent(), None)),
            c(0, "mu H normal", |v| Ok(v.material.mu * v.h_along(v.normal, None)?)),
            c(0, "Ez", |v| v.d(Ez, [0, 0, 0])),
            c(1, "dtau Ez", |v| v.dir(Ez, v.tangent(), [0; 3])),
            c(1, "dn Ez / mu", |v| Ok(v.dir(Ez, v.normal, [0; 3])? / v.material.mu)),
            c(1, "div mu H", |v| Ok(v.d_mu_h(v.normal, v.normal)? + v.d_mu_h(v.tangent(), v.tangent())?)),
            c(1, "curl mu H - dt mu eps Ez", |v| {
                let curl = v.d_mu_h(v.tangent(), v.normal)? - v.d_mu_h(v.normal, v.tangent())?;
                Ok(curl - v.material.mu * v.material.eps * v.d(Ez, [0, 0, 1])?)
            }),
        ];
        Self { regime: Regime::Magnetic, conditions }
    }

    pub fn for_regime(regime: Regime) -> Self {
        match regime {
            Regime::NonMagnetic => Self::non_magnetic(),
            Regime::Magnetic => Self::magnetic(),
        }
    }

    pub fn max_order(&self) -> usize {
        self.conditions.iter().map(|c| c.order).max().unwrap_or(0)
    }
}

/// Jump of `condition` at one interface point.
pub fn condition_jump(
    source: &dyn FieldDerivatives,
    reference: &dyn ReferenceSolution,
    condition: &JumpCondition,
    point: [f64; 2],
    normal: [f64; 2],
    t: f64,
) -> Result<f64> {
    let mut values = [0.0; 2];
    for side in Side::BOTH {
        let view = SideView { source, side, material: reference.material(side, point[0], point[1]), point, normal, t };
        values[side.index()] = condition.side_value(&view)?;
    }
    Ok(values[0] - values[1])
}

/// `(integral over the patch's interface arcs of jump^2)^(1/2)` at `t_f`.
pub fn jump_error(
    correction: &CorrectionFunction,
    patch: &Patch,
    reference: &dyn ReferenceSolution,
    condition: &JumpCondition,
    t_f: f64,
) -> Result<f64> {
    let t_rel = t_f - correction.t_end;
    if t_rel > 1e-12 * correction.frame.time_length || t_rel < -correction.frame.time_length * (1.0 + 1e-12) {
        return Err(Error::OutOfPatch { x: patch.center[0], y: patch.center[1], t: t_f });
    }
    let mut sum = 0.0;
    for s in &patch.samples {
        let j = condition_jump(correction, reference, condition, s.point, s.normal, t_f)?;
        sum += s.weight * j * j;
    }
    Ok(sum.sqrt())
}

/// Per-order maxima over patches, plus per-condition maxima.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpTable {
    /// `(order, E_order)`.
    pub orders: Vec<(usize, f64)>,
    /// `(order, name, max over patches)`.
    pub conditions: Vec<(usize, String, f64)>,
}

impl JumpTable {
    pub fn order(&self, q: usize) -> Option<f64> {
        self.orders.iter().find(|(o, _)| *o == q).map(|(_, e)| *e)
    }
}

pub fn max_over_patches<'a>(
    corrections: &[CorrectionFunction],
    patches: impl IntoIterator<Item = &'a Patch>,
    reference: &dyn ReferenceSolution,
    set: &JumpConditionSet,
    t_f: f64,
) -> Result<JumpTable> {
    let mut per_condition = vec![0.0f64; set.conditions.len()];
    for (cf, patch) in corrections.iter().zip(patches) {
        for (k, cond) in set.conditions.iter().enumerate() {
            per_condition[k] = per_condition[k].max(jump_error(cf, patch, reference, cond, t_f)?);
        }
    }
    let orders = (0..=set.max_order())
        .filter(|q| set.conditions.iter().any(|c| c.order == *q))
        .map(|q| {
            let e = set.conditions.iter().zip(&per_condition).filter(|(c, _)| c.order == q).map(|(_, e)| *e).fold(0.0, f64::max);
            (q, e)
        })
        .collect();
    let conditions = set.conditions.iter().zip(&per_condition).map(|(c, e)| (c.order, c.name.to_string(), *e)).collect();
    Ok(JumpTable { orders, conditions })
}
