//! Closed-form stability and accuracy bounds.
//!
//! Everything here is an explicit function of the model constants: the
//! attractor bound `K`, the separation exponent `beta`, the one-step
//! mean-square amplification factors `M1`, `M2`, `M = max(M1, M2)` for the
//! discrete filter, the grid-certified contraction pair `(lambda, h_c)` with
//! `M(tau) <= 1 - lambda tau` on `(0, h_c]`, and the asymptotic error levels
//! `2 eps^2 / (lambda h)` (discrete) and `eps^2 / (lambda eta^2)` with
//! `lambda = 2 (1 - eta K / 4)` (continuous).

use crate::dynamics::LorenzParams;
use crate::error::{Error, Result};

/// Evaluations clamp the elapsed time at this value: with `beta` near 76 the
/// exponentials overflow shortly beyond it, and the regime of interest is
/// `tau = h << 1` anyway.
pub const TAU_CLAMP: f64 = 10.0;

/// Grid resolution used by [`find_lambda_discrete`].
pub const CONTRACTION_GRID: usize = 10_000;

/// Default search horizon for the contraction certificate.
pub const DEFAULT_H_MAX: f64 = 0.1;

fn clamp_tau(tau: f64) -> f64 {
    tau.clamp(0.0, TAU_CLAMP)
}

fn gain_sq(eta: f64) -> f64 {
    let g = eta / (1.0 + eta);
    g * g
}

/// Amplification factor `M1(tau)` for the full-norm part of the error
/// recursion.
pub fn m1(tau: f64, eta: f64, p: &LorenzParams) -> f64 {
    let tau = clamp_tau(tau);
    let (k, alpha, beta) = (p.k(), p.alpha(), p.beta());
    let g2 = gain_sq(eta);
    let e_beta = (beta * tau).exp();
    let e_neg = (-tau).exp();
    let e_neg_alpha = (-alpha * tau).exp();
    k * alpha / (beta + alpha)
        * ((e_beta - e_neg) / (beta + 1.0) - (e_neg_alpha - e_neg) / (1.0 - alpha))
        + e_neg
        + 2.0 * g2 * (alpha / (beta + alpha)) * (e_beta - e_neg_alpha)
}

/// Amplification factor `M2(tau)` for the observed-component part.
pub fn m2(tau: f64, eta: f64, p: &LorenzParams) -> f64 {
    let tau = clamp_tau(tau);
    let (k, alpha) = (p.k(), p.alpha());
    let g2 = gain_sq(eta);
    k / (1.0 - alpha) * ((-alpha * tau).exp() - (-tau).exp()) + 2.0 * g2 * (-alpha * tau).exp()
}

/// `M(tau) = max(M1(tau), M2(tau))`.
pub fn m_max(tau: f64, eta: f64, p: &LorenzParams) -> f64 {
    m1(tau, eta, p).max(m2(tau, eta, p))
}

/// Grid-certified contraction pair `(lambda, h_c)`.
///
/// Scans `M` on a uniform grid of [`CONTRACTION_GRID`] points over
/// `(0, h_max]`; `h_c` is the last grid point before the first crossing
/// `M >= 1` (or `h_max` when none occurs). `lambda` is the minimum of
/// `(1 - M(tau)) / tau` over a second grid of the same resolution on
/// `(0, h_c]`, less a 1e-9 safety margin so the certificate never
/// over-claims. Fails with [`Error::NoContraction`] when even the first grid
/// point has `M >= 1` (inflation ratio too large).
pub fn find_lambda_discrete(eta: f64, p: &LorenzParams, h_max: f64) -> Result<(f64, f64)> {
    if !(eta > 0.0) {
        return Err(Error::InvalidConfig(format!("eta must be positive, got {eta}")));
    }
    if !(h_max > 0.0) {
        return Err(Error::InvalidConfig(format!("h_max must be positive, got {h_max}")));
    }
    let n = CONTRACTION_GRID;
    let mut h_c = h_max;
    for i in 1..=n {
        let tau = h_max * i as f64 / n as f64;
        if m_max(tau, eta, p) >= 1.0 {
            if i == 1 {
                return Err(Error::NoContraction { h_max });
            }
            h_c = h_max * (i - 1) as f64 / n as f64;
            break;
        }
    }
    let mut lambda = f64::INFINITY;
    for i in 1..=n {
        let tau = h_c * i as f64 / n as f64;
        lambda = lambda.min((1.0 - m_max(tau, eta, p)) / tau);
    }
    lambda -= 1e-9;
    if !(lambda > 0.0) {
        return Err(Error::NoContraction { h_max });
    }
    Ok((lambda, h_c))
}

/// Every constant and bound the theory produces, evaluated for one
/// configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub k: f64,
    pub beta: f64,
    pub eta: f64,
    pub eps: f64,
    pub h: f64,
    /// `M1`, `M2`, `max(M1, M2)` evaluated at the configured `h`.
    pub m1: f64,
    pub m2: f64,
    pub m_max: f64,
    /// Certified contraction rate; when the configured `h` exceeds `h_c`
    /// this is the (non-positive) grid minimum of `(1 - M)/tau` over
    /// `(0, h]`, meaning no certificate applies at this spacing.
    pub lambda_discrete: f64,
    pub h_c: f64,
    /// Per-step noise constant of the mean-square recursion in its sharp
    /// form, `2 eps^2 / (1+eta)^2`; the recursion is stated (and tested)
    /// with the weaker constant `2 eps^2`.
    pub recursion_constant_sharp: f64,
    /// `2 eps^2 / (lambda h)`; absent without a positive certificate.
    pub asymptotic_discrete: Option<f64>,
    /// `2 (1 - eta K / 4)`; non-positive means no continuous certificate.
    pub lambda_continuous: f64,
    /// `eps^2 / (lambda eta^2)`; absent when `lambda_continuous <= 0`.
    pub asymptotic_continuous: Option<f64>,
    pub eta_c: f64,
}

impl BoundReport {
    /// Key-value rows in a fixed order, shared by the text and CSV renderers.
    pub fn rows(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("K", self.k),
            ("beta", self.beta),
            ("eta", self.eta),
            ("eps", self.eps),
            ("h", self.h),
            ("M1(h)", self.m1),
            ("M2(h)", self.m2),
            ("M(h)", self.m_max),
            ("lambda_discrete", self.lambda_discrete),
            ("h_c", self.h_c),
            ("recursion_constant_sharp", self.recursion_constant_sharp),
            ("asymptotic_discrete", self.asymptotic_discrete.unwrap_or(f64::NAN)),
            ("lambda_continuous", self.lambda_continuous),
            ("asymptotic_continuous", self.asymptotic_continuous.unwrap_or(f64::NAN)),
            ("eta_c", self.eta_c),
        ]
    }
}

/// Evaluate the full [`BoundReport`] for `(eta, eps, h)`.
///
/// Propagates [`Error::NoContraction`] when no discrete certificate exists at
/// all; a merely-too-large `h` (beyond `h_c`) is reported in-band via a
/// non-positive `lambda_discrete`. `lambda_continuous <= 0` (when
/// `eta K >= 4`) is likewise reported rather than raised.
pub fn asymptotic_bounds(eta: f64, eps: f64, h: f64, p: &LorenzParams) -> Result<BoundReport> {
    if !(eta > 0.0) || !(h > 0.0) || !(eps >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "bounds require eta > 0, h > 0, eps >= 0; got eta = {eta}, h = {h}, eps = {eps}"
        )));
    }
    let (lambda_cert, h_c) = find_lambda_discrete(eta, p, DEFAULT_H_MAX.max(h))?;
    let lambda_discrete = if h <= h_c {
        lambda_cert
    } else {
        // No certificate at this spacing: report the (non-positive) grid
        // minimum over (0, h] so the invariant "lambda > 0 implies
        // M(h) <= 1 - lambda h" stays honest.
        let n = CONTRACTION_GRID;
        let mut lambda = f64::INFINITY;
        for i in 1..=n {
            let tau = h * i as f64 / n as f64;
            lambda = lambda.min((1.0 - m_max(tau, eta, p)) / tau);
        }
        lambda - 1e-9
    };
    let asymptotic_discrete =
        (lambda_discrete > 0.0).then(|| 2.0 * eps * eps / (lambda_discrete * h));
    let gain = 1.0 / (1.0 + eta);
    let recursion_constant_sharp = 2.0 * eps * eps * gain * gain;
    let lambda_continuous = 2.0 * (1.0 - eta * p.k() / 4.0);
    let asymptotic_continuous =
        (lambda_continuous > 0.0).then(|| eps * eps / (lambda_continuous * eta * eta));
    Ok(BoundReport {
        k: p.k(),
        beta: p.beta(),
        eta,
        eps,
        h,
        m1: m1(h, eta, p),
        m2: m2(h, eta, p),
        m_max: m_max(h, eta, p),
        lambda_discrete,
        h_c,
        recursion_constant_sharp,
        asymptotic_discrete,
        lambda_continuous,
        asymptotic_continuous,
        eta_c: p.eta_c(),
    })
}

/// Pathwise separation bound between observations:
/// `|delta(t)|^2 <= |delta_0|^2 e^{beta t}`.
pub fn pathwise_separation_bound(delta0_sq: f64, t: f64, p: &LorenzParams) -> f64 {
    delta0_sq * (p.beta() * clamp_tau(t)).exp()
}

/// Interval bounds on the observed part and the full error:
/// returns `(p_bound, full_bound)` where
///
/// ```text
/// |P delta(t)|^2 <= alpha |d0|^2 / (beta+alpha) (e^{beta t} - e^{-alpha t})
///                   + |P d0|^2 e^{-alpha t}
/// |delta(t)|^2   <= K alpha |d0|^2 / (beta+alpha)
///                     [ (e^{beta t} - e^{-t})/(beta+1)
///                       - (e^{-alpha t} - e^{-t})/(1-alpha) ]
///                   + K |P d0|^2 / (1-alpha) (e^{-alpha t} - e^{-t})
///                   + |d0|^2 e^{-t}
/// ```
pub fn lemma_sim_bounds(
    delta0_sq: f64,
    p_delta0_sq: f64,
    t: f64,
    p: &LorenzParams,
) -> (f64, f64) {
    let t = clamp_tau(t);
    let (k, alpha, beta) = (p.k(), p.alpha(), p.beta());
    let e_beta = (beta * t).exp();
    let e_neg = (-t).exp();
    let e_neg_alpha = (-alpha * t).exp();
    let p_bound =
        alpha * delta0_sq / (beta + alpha) * (e_beta - e_neg_alpha) + p_delta0_sq * e_neg_alpha;
    let full_bound = k * alpha * delta0_sq / (beta + alpha)
        * ((e_beta - e_neg) / (beta + 1.0) - (e_neg_alpha - e_neg) / (1.0 - alpha))
        + k * p_delta0_sq / (1.0 - alpha) * (e_neg_alpha - e_neg)
        + delta0_sq * e_neg;
    (p_bound, full_bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classical() -> LorenzParams {
        LorenzParams::classical()
    }

    /// Independent transcription of M1 as a plain term list over `expm1`,
    /// kept deliberately different from the production expression.
    fn m1_oracle(tau: f64, eta: f64, p: &LorenzParams) -> f64 {
        let (k, a, b) = (p.k(), p.alpha(), p.beta());
        let g = eta / (1.0 + eta);
        let diff_beta_neg = f64::exp_m1(b * tau) - f64::exp_m1(-tau);
        let diff_alpha_neg = f64::exp_m1(-a * tau) - f64::exp_m1(-tau);
        let diff_beta_alpha = f64::exp_m1(b * tau) - f64::exp_m1(-a * tau);
        let mut total = 0.0;
        total += k * a / (b + a) * diff_beta_neg / (b + 1.0);
        total -= k * a / (b + a) * diff_alpha_neg / (1.0 - a);
        total += (-tau).exp();
        total += 2.0 * g * g * a / (b + a) * diff_beta_alpha;
        total
    }

    fn m2_oracle(tau: f64, eta: f64, p: &LorenzParams) -> f64 {
        let (k, a) = (p.k(), p.alpha());
        let g = eta / (1.0 + eta);
        let mut total = 0.0;
        total += k / (1.0 - a) * (f64::exp_m1(-a * tau) - f64::exp_m1(-tau));
        total += 2.0 * g * g * (-a * tau).exp();
        total
    }

    #[test]
    fn boundary_values_at_tau_zero() {
        let p = classical();
        for eta in [1e-4, 1e-2, 0.1, 1.0, 10.0] {
            assert_eq!(m1(0.0, eta, &p), 1.0);
            let g = eta / (1.0 + eta);
            assert_eq!(m2(0.0, eta, &p), 2.0 * g * g);
        }
    }

    #[test]
    fn m1_initial_slope_matches_closed_form() {
        // M1'(0) = -1 + 2 alpha (eta/(1+eta))^2, central differences.
        let p = classical();
        for eta in [1e-3, 1e-2, 0.1] {
            let step = 1e-7;
            let fd = (m1(step, eta, &p) - m1_signed(-step, eta, &p)) / (2.0 * step);
            let g = eta / (1.0 + eta);
            let expected = -1.0 + 2.0 * p.alpha() * g * g;
            assert!((fd - expected).abs() <= 1e-4, "eta = {eta}: fd = {fd}, want {expected}");
        }
    }

    // m1 clamps negative tau to zero; the slope test needs the analytic
    // continuation for the central difference.
    fn m1_signed(tau: f64, eta: f64, p: &LorenzParams) -> f64 {
        let (k, alpha, beta) = (p.k(), p.alpha(), p.beta());
        let g2 = {
            let g = eta / (1.0 + eta);
            g * g
        };
        let e_beta = (beta * tau).exp();
        let e_neg = (-tau).exp();
        let e_neg_alpha = (-alpha * tau).exp();
        k * alpha / (beta + alpha)
            * ((e_beta - e_neg) / (beta + 1.0) - (e_neg_alpha - e_neg) / (1.0 - alpha))
            + e_neg
            + 2.0 * g2 * (alpha / (beta + alpha)) * (e_beta - e_neg_alpha)
    }

    #[test]
    fn dual_transcription_agreement() {
        let p = classical();
        for eta in [1e-3, 1e-2, 0.1] {
            for tau in [1e-6, 1e-4, 1e-3, 1e-2, 0.1] {
                let lhs = m1(tau, eta, &p);
                let rhs = m1_oracle(tau, eta, &p);
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0),
                    "m1({tau}, {eta}): {lhs} vs oracle {rhs}"
                );
                let lhs = m2(tau, eta, &p);
                let rhs = m2_oracle(tau, eta, &p);
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0),
                    "m2({tau}, {eta}): {lhs} vs oracle {rhs}"
                );
            }
        }
    }

    #[test]
    fn certificate_postcondition_replays() {
        let p = classical();
        let (lambda, h_c) = find_lambda_discrete(0.01, &p, DEFAULT_H_MAX).unwrap();
        assert!(lambda > 0.0);
        assert!(h_c > 0.0);
        for i in 1..=CONTRACTION_GRID {
            let tau = h_c * i as f64 / CONTRACTION_GRID as f64;
            assert!(
                m_max(tau, 0.01, &p) <= 1.0 - lambda * tau,
                "certificate violated at tau = {tau}"
            );
        }
    }

    #[test]
    fn certified_rate_is_monotone_in_eta() {
        // Smaller inflation ratio never hurts the certified rate.
        let p = classical();
        let lambdas: Vec<f64> = [1e-4, 1e-3, 1e-2]
            .iter()
            .map(|&eta| find_lambda_discrete(eta, &p, DEFAULT_H_MAX).unwrap().0)
            .collect();
        assert!(lambdas[0] >= lambdas[1] - 1e-12);
        assert!(lambdas[1] >= lambdas[2] - 1e-12);
    }

    #[test]
    fn no_contraction_for_large_eta() {
        // 2 (eta/(1+eta))^2 >= 1 pushes M2(0) to one or above.
        let p = classical();
        assert!(matches!(
            find_lambda_discrete(10.0, &p, DEFAULT_H_MAX),
            Err(Error::NoContraction { .. })
        ));
    }

    #[test]
    fn report_constants_and_forced_values() {
        let p = classical();
        let k_oracle: f64 = 92416.0 / 60.0;
        let beta_oracle = 2.0 * (k_oracle.sqrt() - 1.0);
        let eta = 2.0 / p.k();
        let report = asymptotic_bounds(eta, 0.01, 1e-4, &p).unwrap();
        assert!((report.k - k_oracle).abs() <= 1e-9 * k_oracle);
        assert!((report.beta - beta_oracle).abs() <= 1e-9 * beta_oracle);
        assert!((report.eta_c - 4.0 / k_oracle).abs() <= 1e-9 * (4.0 / k_oracle));
        // eta = 2/K forces lambda = 2 (1 - 1/2) = 1.
        assert!((report.lambda_continuous - 1.0).abs() <= 1e-12);
        // eps^2 K^2 / 4 evaluated independently.
        let asym_oracle = 0.01 * 0.01 * k_oracle * k_oracle / 4.0;
        let asym = report.asymptotic_continuous.unwrap();
        assert!((asym - asym_oracle).abs() <= 1e-9 * asym_oracle);
    }

    #[test]
    fn report_without_continuous_certificate() {
        let p = classical();
        let report = asymptotic_bounds(0.1, 0.01, 1e-4, &p).unwrap();
        assert!(report.lambda_continuous <= 0.0);
        assert!(report.asymptotic_continuous.is_none());
        assert!(report.lambda_discrete > 0.0);
        assert!(report.asymptotic_discrete.is_some());
    }

    #[test]
    fn report_with_h_beyond_certificate() {
        let p = classical();
        let report = asymptotic_bounds(0.01, 0.1, 0.05, &p).unwrap();
        assert!(report.h > report.h_c);
        assert!(report.lambda_discrete <= 0.0);
        assert!(report.asymptotic_discrete.is_none());
        // The in-band invariant: a positive lambda always certifies M at h.
        let ok = asymptotic_bounds(0.01, 0.1, 6e-5, &p).unwrap();
        assert!(ok.lambda_discrete > 0.0);
        assert!(ok.m_max <= 1.0 - ok.lambda_discrete * ok.h);
    }

    #[test]
    fn continuous_rate_is_capped_and_signed_by_eta_c() {
        // lambda_continuous = 2 (1 - eta K / 4) never exceeds 2 and is
        // positive exactly when eta < eta_c.
        let p = classical();
        for factor in [1e-3, 0.5, 0.999, 1.001, 10.0] {
            let eta = factor * p.eta_c();
            let report = asymptotic_bounds(eta, 0.01, 1e-4, &p).unwrap();
            assert!(report.lambda_continuous <= 2.0);
            assert_eq!(report.lambda_continuous > 0.0, eta * p.k() < 4.0);
            assert_eq!(report.asymptotic_continuous.is_some(), report.lambda_continuous > 0.0);
        }
    }

    #[test]
    fn separation_bounds_at_t_zero() {
        let p = classical();
        assert_eq!(pathwise_separation_bound(0.25, 0.0, &p), 0.25);
        let (pb, fb) = lemma_sim_bounds(0.25, 0.04, 0.0, &p);
        assert_eq!(pb, 0.04);
        assert_eq!(fb, 0.25);
    }

    #[test]
    fn lemma_sim_dual_transcription() {
        // Full-error bound at delta_0 = (0.1, 0, 0), t = 0.01, against an
        // independently arranged term-by-term sum.
        let p = classical();
        let (d0, pd0, t) = (0.01, 0.01, 0.01);
        let (_, fb) = lemma_sim_bounds(d0, pd0, t, &p);
        let (k, a, b) = (p.k(), p.alpha(), p.beta());
        let mut oracle = 0.0;
        oracle += k * a * d0 / (b + a) / (b + 1.0) * (f64::exp_m1(b * t) - f64::exp_m1(-t));
        oracle -= k * a * d0 / (b + a) / (1.0 - a) * (f64::exp_m1(-a * t) - f64::exp_m1(-t));
        oracle += k * pd0 / (1.0 - a) * (f64::exp_m1(-a * t) - f64::exp_m1(-t));
        oracle += d0 * (-t).exp();
        assert!((fb - oracle).abs() <= 1e-12 * oracle.abs());
    }

    #[test]
    fn tau_clamp_keeps_values_nan_free() {
        let p = classical();
        for tau in [5.0, 10.0, 50.0, 1e9] {
            for f in [m1(tau, 0.1, &p), m2(tau, 0.1, &p), m_max(tau, 0.1, &p)] {
                assert!(!f.is_nan());
            }
            assert!(!pathwise_separation_bound(1.0, tau, &p).is_nan());
            let (pb, fb) = lemma_sim_bounds(1.0, 0.5, tau, &p);
            assert!(!pb.is_nan() && !fb.is_nan());
        }
    }

    #[test]
    fn small_tau_limit_and_initial_contraction() {
        let p = classical();
        let eta = 0.01;
        // m_max -> max(1, M2(0)) = 1 from below as tau -> 0, and stays
        // below one on an initial interval.
        let mut tau = 1e-2;
        while tau >= 1e-8 {
            if tau <= 1.2e-4 {
                assert!(m_max(tau, eta, &p) < 1.0, "m_max >= 1 at tau = {tau}");
            }
            tau /= 10.0;
        }
        assert!((m_max(1e-8, eta, &p) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn bound_functions_are_grid_continuous() {
        // Adjacent evaluations move by at most an empirically fitted
        // Lipschitz constant; a transcription typo (wrong sign, dropped
        // term) breaks this immediately.
        let p = classical();
        let eta = 0.01;
        let coarse = 1_000;
        let h_max = 0.05;
        let mut slope_max: f64 = 0.0;
        for i in 1..coarse {
            let a = m_max(h_max * i as f64 / coarse as f64, eta, &p);
            let b = m_max(h_max * (i + 1) as f64 / coarse as f64, eta, &p);
            slope_max = slope_max.max((b - a).abs() / (h_max / coarse as f64));
        }
        let fitted = 2.0 * slope_max;
        let fine = 10_000;
        let dt = h_max / fine as f64;
        for i in 1..fine {
            let a = m_max(h_max * i as f64 / fine as f64, eta, &p);
            let b = m_max(h_max * (i + 1) as f64 / fine as f64, eta, &p);
            assert!((b - a).abs() <= fitted * dt + 1e-12);
        }
    }
}
