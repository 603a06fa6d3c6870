//! Reaction nonlinearities `f` on `[0, 1]`.

use crate::error::{param, Error, Result};
use crate::quadrature;

#[derive(Debug, Clone, PartialEq)]
pub enum ReactionSpec {
    /// `f(u) = r·u(1 − u)`
    KppQuadratic { r: f64 },
    /// `f(u) = u^m (1 − u)`, `m ≥ 2`
    Degenerate { m: u32 },
    /// `f(u) = e^{−E/u}(1 − u)`
    Arrhenius { activation: f64 },
    /// `χ^θ(u)·f_base(u)`, vanishing below `θ/2`.
    IgnitionCutoff { base: Box<ReactionSpec>, theta: f64 },
    /// Piecewise-linear through uniformly spaced nodes on `[0, 1]`, with a declared `f'(0)`.
    Tabulated {
        values: Vec<f64>,
        slope_at_zero: f64,
    },
}

/// Outcome of sampling the KPP inequality `f(u) ≤ u·f'(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KppCheck {
    pub holds: bool,
    /// Largest `f(u) − u·f'(0)` over the samples (negative when the bound is strict).
    pub worst_violation: f64,
    pub at: f64,
}

impl ReactionSpec {
    pub fn kpp(r: f64) -> Self {
        Self::KppQuadratic { r }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::KppQuadratic { r } if !(*r > 0.0 && r.is_finite()) => {
                Err(param("r", format!("growth rate must be positive, got {r}")))
            }
            Self::Degenerate { m } if *m < 2 => Err(param("m", "degenerate exponent must be >= 2")),
            Self::Arrhenius { activation } if !(*activation > 0.0) => {
                Err(param("activation", "must be positive"))
            }
            Self::IgnitionCutoff { base, theta } => {
                if !(*theta > 0.0 && *theta < 1.0) {
                    return Err(param("theta", format!("must lie in (0, 1), got {theta}")));
                }
                if !base.is_positive() {
                    return Err(param("base", "cut-off needs a positive base nonlinearity"));
                }
                base.validate()
            }
            Self::Tabulated { values, .. } if values.len() < 2 => {
                Err(param("values", "need at least two nodes"))
            }
            _ => Ok(()),
        }
    }

    /// `f'(0)`, stored analytically per variant.
    pub fn slope_at_zero(&self) -> f64 {
        match self {
            Self::KppQuadratic { r } => *r,
            Self::Degenerate { .. } | Self::Arrhenius { .. } | Self::IgnitionCutoff { .. } => 0.0,
            Self::Tabulated { slope_at_zero, .. } => *slope_at_zero,
        }
    }

    pub fn is_kpp(&self) -> bool {
        matches!(self, Self::KppQuadratic { .. })
    }

    pub fn is_positive(&self) -> bool {
        matches!(
            self,
            Self::KppQuadratic { .. } | Self::Degenerate { .. } | Self::Arrhenius { .. }
        )
    }

    pub fn is_ignition(&self) -> bool {
        matches!(self, Self::IgnitionCutoff { .. })
    }

    /// `f(u)` with `u` clamped to `[0, 1]`.
    pub fn eval(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self {
            Self::KppQuadratic { r } => r * u * (1.0 - u),
            Self::Degenerate { m } => u.powi(*m as i32) * (1.0 - u),
            Self::Arrhenius { activation } => {
                if u == 0.0 {
                    0.0
                } else {
                    (-activation / u).exp() * (1.0 - u)
                }
            }
            Self::IgnitionCutoff { base, theta } => {
                let chi = cutoff(u, *theta);
                if chi == 0.0 {
                    0.0
                } else {
                    chi * base.eval(u)
                }
            }
            Self::Tabulated { values, .. } => {
                let n = values.len() - 1;
                let s = u * n as f64;
                let i = (s.floor() as usize).min(n - 1);
                let w = s - i as f64;
                (1.0 - w) * values[i] + w * values[i + 1]
            }
        }
    }

    /// Largest `df/du` magnitude bound used for time-step selection.
    pub fn lipschitz_bound(&self) -> f64 {
        match self {
            Self::KppQuadratic { r } => *r,
            Self::Degenerate { m } => *m as f64 + 1.0,
            Self::Arrhenius { activation } => {
                1.0 + 4.0 / (activation * std::f64::consts::E.powi(2))
            }
            Self::IgnitionCutoff { base, theta } => base.lipschitz_bound() * (1.0 + 3.75 / theta),
            Self::Tabulated { values, .. } => {
                let n = (values.len() - 1) as f64;
                values
                    .windows(2)
                    .map(|w| ((w[1] - w[0]) * n).abs())
                    .fold(0.0, f64::max)
            }
        }
    }
}

/// Quintic smoothstep ramp: 0 for `u ≤ θ/2`, 1 for `u ≥ θ`, C² in between.
pub fn cutoff(u: f64, theta: f64) -> f64 {
    let half = 0.5 * theta;
    let w = ((u - half) / half).clamp(0.0, 1.0);
    w * w * w * (w * (6.0 * w - 15.0) + 10.0)
}

pub fn f_eval(spec: &ReactionSpec, u: f64) -> f64 {
    spec.eval(u)
}

pub fn kpp_bound_check(spec: &ReactionSpec, n_samples: usize) -> Result<KppCheck> {
    let slope = spec.slope_at_zero();
    if slope <= 0.0 {
        return Err(Error::InapplicableClassification(format!(
            "f'(0) = {slope}; the KPP bound needs f'(0) > 0"
        )));
    }
    if n_samples < 2 {
        return Err(param("n_samples", "need at least two samples"));
    }
    let mut check = KppCheck {
        holds: true,
        worst_violation: f64::NEG_INFINITY,
        at: 0.0,
    };
    for i in 0..n_samples {
        let u = i as f64 / (n_samples - 1) as f64;
        let excess = spec.eval(u) - u * slope;
        if excess > check.worst_violation {
            check.worst_violation = excess;
            check.at = u;
        }
    }
    check.holds = check.worst_violation <= 1e-12;
    Ok(check)
}

pub fn ignition_cutoff(base: &ReactionSpec, theta: f64) -> Result<ReactionSpec> {
    let spec = ReactionSpec::IgnitionCutoff {
        base: Box::new(base.clone()),
        theta,
    };
    spec.validate()?;
    Ok(spec)
}

/// `∫₀¹ √(2 f(ξ)) dξ`, a flow-independent lower bound on front speeds.
pub fn heinze_lower_bound(spec: &ReactionSpec) -> f64 {
    quadrature::integrate(|u| (2.0 * spec.eval(u).max(0.0)).sqrt(), 0.0, 1.0, 1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn kpp1() -> ReactionSpec {
        ReactionSpec::kpp(1.0)
    }

    #[test]
    fn point_values() {
        assert_eq!(f_eval(&kpp1(), 0.5), 0.25);
        let cut = ignition_cutoff(&kpp1(), 0.5).unwrap();
        assert_eq!(f_eval(&cut, 0.2), 0.0);
        assert_abs_diff_eq!(f_eval(&cut, 0.8), 0.16, epsilon = 1e-15);
        assert_eq!(f_eval(&cut, 1.0), 0.0);
    }

    #[test]
    fn endpoints_vanish() {
        let specs = [
            kpp1(),
            ReactionSpec::kpp(3.0),
            ReactionSpec::Degenerate { m: 3 },
            ReactionSpec::Arrhenius { activation: 2.0 },
            ignition_cutoff(&ReactionSpec::Degenerate { m: 2 }, 0.3).unwrap(),
        ];
        for s in &specs {
            assert_eq!(s.eval(0.0), 0.0, "{s:?}");
            assert_eq!(s.eval(1.0), 0.0, "{s:?}");
        }
    }

    #[test]
    fn classification_flags() {
        assert!(kpp1().is_kpp() && kpp1().is_positive());
        let deg = ReactionSpec::Degenerate { m: 2 };
        assert!(!deg.is_kpp() && deg.is_positive());
        assert_eq!(deg.slope_at_zero(), 0.0);
        let cut = ignition_cutoff(&kpp1(), 0.2).unwrap();
        assert!(cut.is_ignition() && !cut.is_positive());
        assert_eq!(cut.slope_at_zero(), 0.0);
        for u in [0.01, 0.05, 0.1] {
            assert_eq!(cut.eval(u), 0.0);
        }
        for u in [0.21, 0.5, 0.99] {
            assert!(cut.eval(u) > 0.0);
        }
    }

    #[test]
    fn kpp_bound() {
        assert!(kpp_bound_check(&kpp1(), 1001).unwrap().holds);
        assert!(
            kpp_bound_check(&ReactionSpec::kpp(2.0), 1001)
                .unwrap()
                .holds
        );
        let bumped = ReactionSpec::Tabulated {
            values: vec![0.0, 0.7, 0.0],
            slope_at_zero: 1.0,
        };
        let check = kpp_bound_check(&bumped, 101).unwrap();
        assert!(!check.holds);
        assert_abs_diff_eq!(check.worst_violation, 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(check.at, 0.5, epsilon = 1e-12);
        assert!(matches!(
            kpp_bound_check(&ReactionSpec::Degenerate { m: 2 }, 11),
            Err(Error::InapplicableClassification(_))
        ));
    }

    #[test]
    fn cutoff_parameter_errors() {
        assert!(ignition_cutoff(&kpp1(), 0.0).is_err());
        assert!(ignition_cutoff(&kpp1(), 1.0).is_err());
        let cut = ignition_cutoff(&kpp1(), 0.3).unwrap();
        assert!(ignition_cutoff(&cut, 0.2).is_err());
    }

    #[test]
    fn cutoff_monotone_probe() {
        let a = ignition_cutoff(&kpp1(), 0.2).unwrap().eval(0.3);
        let b = ignition_cutoff(&kpp1(), 0.4).unwrap().eval(0.3);
        assert_abs_diff_eq!(a, 0.21, epsilon = 1e-15);
        assert!(b < a);
    }

    #[test]
    fn cutoff_converges_uniformly() {
        let mut prev = f64::INFINITY;
        for theta in [0.4, 0.2, 0.1, 0.05] {
            let cut = ignition_cutoff(&kpp1(), theta).unwrap();
            let err = (0..=10_000)
                .map(|i| i as f64 / 10_000.0)
                .map(|u| (cut.eval(u) - kpp1().eval(u)).abs())
                .fold(0.0, f64::max);
            assert!(err < prev, "theta {theta}: {err} !< {prev}");
            // |f^θ − f| ≤ max_{u ≤ θ} f(u) ≤ θ
            assert!(err <= theta);
            prev = err;
        }
    }

    #[test]
    fn heinze_values() {
        // Independent route: substitute u = (1 − cos s)/2 which removes the
        // square-root endpoint behaviour, then a plain composite midpoint rule.
        let oracle = |r: f64| {
            let n = 200_000;
            let ds = std::f64::consts::PI / n as f64;
            (0..n)
                .map(|i| {
                    let s = (i as f64 + 0.5) * ds;
                    let u = 0.5 * (1.0 - s.cos());
                    (2.0 * r * u * (1.0 - u)).sqrt() * 0.5 * s.sin() * ds
                })
                .sum::<f64>()
        };
        let exact = std::f64::consts::PI * 2f64.sqrt() / 8.0;
        assert_abs_diff_eq!(oracle(1.0), exact, epsilon = 1e-9);
        assert_abs_diff_eq!(heinze_lower_bound(&kpp1()), exact, epsilon = 1e-8);
        assert_abs_diff_eq!(
            heinze_lower_bound(&ReactionSpec::kpp(4.0)),
            oracle(4.0),
            epsilon = 1e-8
        );
        let zero = ReactionSpec::Tabulated {
            values: vec![0.0, 0.0],
            slope_at_zero: 0.0,
        };
        assert_eq!(heinze_lower_bound(&zero), 0.0);
    }

    #[test]
    fn heinze_scales_with_sqrt_rate() {
        let base = heinze_lower_bound(&kpp1());
        for r in [0.25, 1.0, 4.0] {
            let v = heinze_lower_bound(&ReactionSpec::kpp(r)) / r.sqrt();
            assert_abs_diff_eq!(v, base, epsilon = 1e-6);
        }
    }

    proptest! {
        #[test]
        fn cutoff_family_nondecreasing_as_theta_drops(t1 in 0.01f64..0.99, t2 in 0.01f64..0.99) {
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let a = ignition_cutoff(&kpp1(), lo).unwrap();
            let b = ignition_cutoff(&kpp1(), hi).unwrap();
            for i in 0..=1000 {
                let u = i as f64 / 1000.0;
                prop_assert!(a.eval(u) >= b.eval(u) - 1e-15);
            }
        }

        #[test]
        fn kpp_quadratic_always_satisfies_bound(r in 1e-3f64..50.0) {
            prop_assert!(kpp_bound_check(&ReactionSpec::kpp(r), 501).unwrap().holds);
        }
    }
}
