//! Lorenz '63 dynamics in shifted operator form.
//!
//! The state equation is `du/dt + A u + B(u, u) = f` with
//!
//! ```text
//!     A = [ alpha  -alpha  0 ]        f = [ 0            ]
//!         [ alpha   1      0 ]            [ 0            ]
//!         [ 0       0      b ]            [ -b (r+alpha) ]
//!
//!     B(u, v) = ( 0,  (u_x v_z + u_z v_x)/2,  -(u_x v_y + u_y v_x)/2 )
//! ```
//!
//! which is the classical system written in coordinates shifted so that the
//! origin sits at `(0, 0, -(r+alpha))` of the unshifted system. `A` is
//! strictly positive (`<Au,u> > |u|^2` for `alpha, b > 1`) and `B` conserves
//! energy (`<B(u,u),u> = 0`), which is what the stability analysis leans on.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Point in R^3 in the shifted coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateVec {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl StateVec {
    pub const ZERO: StateVec = StateVec { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        StateVec { x, y, z }
    }

    /// Euclidean inner product.
    pub fn dot(self, other: StateVec) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Squared Euclidean norm `|u|^2`.
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    /// Euclidean norm `|u|`.
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Largest component magnitude, used by the overflow guard.
    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn as_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        StateVec::new(a[0], a[1], a[2])
    }
}

impl Add for StateVec {
    type Output = StateVec;
    fn add(self, o: StateVec) -> StateVec {
        StateVec::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for StateVec {
    fn add_assign(&mut self, o: StateVec) {
        *self = *self + o;
    }
}

impl Sub for StateVec {
    type Output = StateVec;
    fn sub(self, o: StateVec) -> StateVec {
        StateVec::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for StateVec {
    type Output = StateVec;
    fn mul(self, s: f64) -> StateVec {
        StateVec::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for StateVec {
    type Output = StateVec;
    fn neg(self) -> StateVec {
        StateVec::new(-self.x, -self.y, -self.z)
    }
}

/// Lorenz parameters `(alpha, b, r)` together with the derived attractor
/// constants, cached because every bound evaluation uses them.
///
/// `K = b^2 (r+alpha)^2 / (4 (b-1))` bounds `|u(t)|^2` on the global
/// attractor and `beta = 2 (K^{1/2} - 1)` is the pathwise separation
/// exponent. The supported range is `alpha, b > 1` and `r > 0`; `K >= 1`
/// follows automatically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorenzParams {
    alpha: f64,
    b: f64,
    r: f64,
    k: f64,
    beta: f64,
}

impl LorenzParams {
    pub fn new(alpha: f64, b: f64, r: f64) -> Result<Self> {
        if !(alpha.is_finite() && b.is_finite() && r.is_finite()) {
            return Err(Error::DegenerateParams("parameters must be finite".into()));
        }
        if alpha <= 1.0 {
            return Err(Error::DegenerateParams(format!("alpha must exceed 1, got {alpha}")));
        }
        if b <= 1.0 {
            return Err(Error::DegenerateParams(format!("b must exceed 1, got {b}")));
        }
        if r <= 0.0 {
            return Err(Error::DegenerateParams(format!("r must be positive, got {r}")));
        }
        let k = b * b * (r + alpha) * (r + alpha) / (4.0 * (b - 1.0));
        let beta = 2.0 * (k.sqrt() - 1.0);
        Ok(LorenzParams { alpha, b, r, k, beta })
    }

    /// The classical chaotic regime `(10, 8/3, 28)`.
    pub fn classical() -> Self {
        LorenzParams::new(10.0, 8.0 / 3.0, 28.0).expect("classical parameters are valid")
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Attractor radius-squared bound `K`.
    pub fn k(&self) -> f64 {
        self.k
    }

    /// Pathwise separation exponent `beta`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Critical inflation ratio `eta_c = 4 / K` for the continuous filter.
    pub fn eta_c(&self) -> f64 {
        4.0 / self.k
    }

    /// Forcing vector `f = (0, 0, -b (r+alpha))`.
    pub fn forcing(&self) -> StateVec {
        StateVec::new(0.0, 0.0, -self.b * (self.r + self.alpha))
    }

    /// The equilibrium of the shifted system, `(0, 0, -(r+alpha))`.
    pub fn equilibrium(&self) -> StateVec {
        StateVec::new(0.0, 0.0, -(self.r + self.alpha))
    }
}

/// Matrix-vector product `A u`.
pub fn apply_a(u: StateVec, p: &LorenzParams) -> StateVec {
    StateVec::new(
        p.alpha * u.x - p.alpha * u.y,
        p.alpha * u.x + u.y,
        p.b * u.z,
    )
}

/// Symmetric bilinear term `B(u, v)`.
pub fn bilinear_b(u: StateVec, v: StateVec) -> StateVec {
    StateVec::new(
        0.0,
        (u.x * v.z + u.z * v.x) / 2.0,
        -(u.x * v.y + u.y * v.x) / 2.0,
    )
}

/// Right-hand side `du/dt = f - A u - B(u, u)`.
pub fn vector_field(u: StateVec, p: &LorenzParams) -> StateVec {
    p.forcing() - apply_a(u, p) - bilinear_b(u, u)
}

/// Fixed-step integration scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    ExplicitEuler,
    Rk4,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::ExplicitEuler => write!(f, "euler"),
            Scheme::Rk4 => write!(f, "rk4"),
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euler" => Ok(Scheme::ExplicitEuler),
            "rk4" => Ok(Scheme::Rk4),
            other => Err(Error::InvalidConfig(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Blow-up threshold: a step whose output exceeds this magnitude in any
/// component is reported as [`Error::Divergence`].
pub const DEFAULT_OVERFLOW_GUARD: f64 = 1e6;

fn euler_step(u: StateVec, dt: f64, p: &LorenzParams) -> StateVec {
    u + vector_field(u, p) * dt
}

fn rk4_step(u: StateVec, dt: f64, p: &LorenzParams) -> StateVec {
    let k1 = vector_field(u, p);
    let k2 = vector_field(u + k1 * (dt / 2.0), p);
    let k3 = vector_field(u + k2 * (dt / 2.0), p);
    let k4 = vector_field(u + k3 * dt, p);
    u + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

/// One deterministic integration step with the default overflow guard.
pub fn step(u: StateVec, dt: f64, p: &LorenzParams, scheme: Scheme) -> Result<StateVec> {
    step_with_guard(u, dt, p, scheme, DEFAULT_OVERFLOW_GUARD)
}

/// One step with an explicit overflow guard.
pub fn step_with_guard(
    u: StateVec,
    dt: f64,
    p: &LorenzParams,
    scheme: Scheme,
    guard: f64,
) -> Result<StateVec> {
    let next = match scheme {
        Scheme::ExplicitEuler => euler_step(u, dt, p),
        Scheme::Rk4 => rk4_step(u, dt, p),
    };
    if !(next.max_abs() <= guard) {
        return Err(Error::Divergence { t: dt, guard });
    }
    Ok(next)
}

/// Uniformly sampled solution path: states at `t0 + k dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    pub states: Vec<StateVec>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn state(&self, k: usize) -> StateVec {
        self.states[k]
    }

    pub fn last(&self) -> StateVec {
        *self.states.last().expect("trajectory holds at least one state")
    }

    /// Number of trajectory steps per `spacing`, requiring `spacing` to be
    /// an integer multiple of `dt` to within 1e-12 relative.
    pub fn stride_for(&self, spacing: f64) -> Result<usize> {
        let ratio = spacing / self.dt;
        let rounded = ratio.round();
        if rounded < 1.0 || (ratio - rounded).abs() > 1e-12 * ratio.max(1.0) {
            return Err(Error::GridMismatch(format!(
                "spacing {spacing} is not an integer multiple of trajectory dt {}",
                self.dt
            )));
        }
        Ok(rounded as usize)
    }
}

/// Number of steps covering a horizon `t_span` at step `dt`: `ceil(t_span/dt)`
/// with a 1e-9 relative snap so that exact multiples do not gain a step.
pub(crate) fn step_count(t_span: f64, dt: f64) -> usize {
    let ratio = t_span / dt;
    let rounded = ratio.round();
    if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        rounded as usize
    } else {
        ratio.ceil() as usize
    }
}

/// Integrate from `u0` over `[0, t_span]`, producing `ceil(t_span/dt) + 1`
/// states. Deterministic: identical inputs give bitwise identical output.
pub fn solve(
    u0: StateVec,
    t_span: f64,
    dt: f64,
    p: &LorenzParams,
    scheme: Scheme,
) -> Result<Trajectory> {
    if !(t_span > 0.0) || !(dt > 0.0) || dt > t_span {
        return Err(Error::InvalidConfig(format!(
            "solve requires 0 < dt <= t_span, got dt = {dt}, t_span = {t_span}"
        )));
    }
    let n = step_count(t_span, dt);
    let mut states = Vec::with_capacity(n + 1);
    states.push(u0);
    let mut u = u0;
    for k in 0..n {
        u = step_with_guard(u, dt, p, scheme, DEFAULT_OVERFLOW_GUARD).map_err(|e| match e {
            Error::Divergence { guard, .. } => Error::Divergence { t: (k + 1) as f64 * dt, guard },
            other => other,
        })?;
        states.push(u);
    }
    Ok(Trajectory { t0: 0.0, dt, states })
}

/// Burn-in integration: returns the endpoint after `t_burn` time units of
/// explicit Euler at step `dt`, treated by callers as a point approximately
/// on the global attractor. `t_burn <= 0` returns the input unchanged.
pub fn spin_up(u_init: StateVec, t_burn: f64, dt: f64, p: &LorenzParams) -> Result<StateVec> {
    if t_burn <= 0.0 {
        return Ok(u_init);
    }
    let n = step_count(t_burn, dt);
    let mut u = u_init;
    for k in 0..n {
        u = step_with_guard(u, dt, p, Scheme::ExplicitEuler, DEFAULT_OVERFLOW_GUARD).map_err(
            |e| match e {
                Error::Divergence { guard, .. } => {
                    Error::Divergence { t: (k + 1) as f64 * dt, guard }
                }
                other => other,
            },
        )?;
    }
    Ok(u)
}
