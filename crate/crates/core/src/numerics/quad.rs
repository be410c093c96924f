use crate::numerics::{NumericsError, ToleranceSpec};
use crate::real::Real;

/// Number of Simpson panels used for the initial estimate. Each panel is
/// refined independently with a share of the global tolerance.
const INITIAL_PANELS: usize = 16;

struct Refiner<'a, T, F> {
    f: &'a F,
    _scalar: std::marker::PhantomData<T>,
    max_depth: usize,
    exhausted: bool,
}

impl<T: Real, F: Fn(T) -> T> Refiner<'_, T, F> {
    fn eval(&self, x: T) -> Result<T, NumericsError> {
        let y = (self.f)(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(NumericsError::NonFiniteIntegrand { x: x.as_f64() })
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: T,
        fa: T,
        m: T,
        fm: T,
        b: T,
        fb: T,
        whole: T,
        tol: T,
        depth: usize,
    ) -> Result<T, NumericsError> {
        let two = T::lit(2.0);
        let lm = (a + m) / two;
        let rm = (m + b) / two;
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let sixth = T::lit(1.0 / 6.0);
        let left = (m - a) * sixth * (fa + T::lit(4.0) * flm + fm);
        let right = (b - m) * sixth * (fm + T::lit(4.0) * frm + fb);
        let pair = left + right;
        let delta = pair - whole;
        let fifteen = T::lit(15.0);

        // roundoff floor: the difference is indistinguishable from noise
        let noise = T::epsilon() * T::lit(32.0) * (left.abs() + right.abs());
        if delta.abs() <= fifteen * tol || delta.abs() <= noise {
            return Ok(pair + delta / fifteen);
        }
        if depth >= self.max_depth || lm <= a || rm >= b {
            self.exhausted = true;
            return Ok(pair + delta / fifteen);
        }
        let half = tol / two;
        let l = self.refine(a, fa, lm, flm, m, fm, left, half, depth + 1)?;
        let r = self.refine(m, fm, rm, frm, b, fb, right, half, depth + 1)?;
        Ok(l + r)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// The target error is `max(abs_tol, rel_tol * |I|)` where `I` is a
/// composite-Simpson estimate on a fixed initial partition. An empty
/// interval (`a == b`) integrates to zero.
pub fn integrate<T, F>(f: F, a: T, b: T, tol: &ToleranceSpec<T>) -> Result<T, NumericsError>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(NumericsError::InvalidInterval {
            a: a.as_f64(),
            b: b.as_f64(),
        });
    }
    if a == b {
        return Ok(T::zero());
    }
    tol.validate()?;

    let mut refiner = Refiner {
        f: &f,
        _scalar: std::marker::PhantomData,
        max_depth: tol.max_depth,
        exhausted: false,
    };

    let n = INITIAL_PANELS;
    let nt = T::from_usize(n).unwrap();
    let width = b - a;
    let node = |i: usize| {
        if i == n {
            b
        } else {
            a + width * T::from_usize(i).unwrap() / nt
        }
    };

    let mut panels = Vec::with_capacity(n);
    let mut estimate = T::zero();
    let mut f_lo = refiner.eval(a)?;
    for i in 0..n {
        let lo = node(i);
        let hi = node(i + 1);
        let mid = (lo + hi) / T::lit(2.0);
        let f_mid = refiner.eval(mid)?;
        let f_hi = refiner.eval(hi)?;
        let s = (hi - lo) / T::lit(6.0) * (f_lo + T::lit(4.0) * f_mid + f_hi);
        estimate = estimate + s;
        panels.push((lo, f_lo, mid, f_mid, hi, f_hi, s));
        f_lo = f_hi;
    }

    let target = tol.abs_tol.max(tol.rel_tol * estimate.abs());
    let mut total = T::zero();
    for (lo, flo, mid, fmid, hi, fhi, s) in panels {
        let share = target * (hi - lo) / width;
        total = total + refiner.refine(lo, flo, mid, fmid, hi, fhi, s, share, 1)?;
    }

    if refiner.exhausted {
        return Err(NumericsError::DepthExhausted {
            a: a.as_f64(),
            b: b.as_f64(),
            estimate: total.as_f64(),
        });
    }
    Ok(total)
}

/// Integrates `f` over `[a, inf)`.
///
/// The half line is mapped onto `(0, 1]` by `u = 1/(1 + x - a)`, followed
/// by `u = s^2` so that integrands decaying like `x^-p` with `p >= 3/2`
/// stay bounded at the far end. The sliver `s < eps^(3/4)` (that is,
/// `x > eps^(-3/2)`) is dropped.
pub fn integrate_to_infinity<T, F>(f: F, a: T, tol: &ToleranceSpec<T>) -> Result<T, NumericsError>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !a.is_finite() {
        return Err(NumericsError::InvalidInterval {
            a: a.as_f64(),
            b: f64::INFINITY,
        });
    }
    let one = T::one();
    let two = T::lit(2.0);
    let s_min = T::epsilon().powf(T::lit(0.75));
    let g = |s: T| {
        let s2 = s * s;
        let x = a + one / s2 - one;
        f(x) * two / (s2 * s)
    };
    integrate(g, s_min, one, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> ToleranceSpec<f64> {
        ToleranceSpec::default()
    }

    #[test]
    fn polynomial_and_constant() {
        let v = integrate(|x: f64| x * x, 0.0, 1.0, &tol()).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        let v = integrate(|_x: f64| 1.0, 2.0, 5.0, &tol()).unwrap();
        assert!((v - 3.0).abs() < 1e-14);
    }

    #[test]
    fn exponential_on_finite_interval() {
        let v = integrate(|x: f64| (-x).exp(), 0.0, 10.0, &tol()).unwrap();
        let exact = 1.0 - (-10.0f64).exp();
        assert!((v - exact).abs() <= 1e-8 * exact);
        assert!((v - 0.999_954_6).abs() < 1e-7);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(integrate(|x: f64| x, 3.0, 3.0, &tol()).unwrap(), 0.0);
    }

    #[test]
    fn reversed_interval_rejected() {
        let err = integrate(|x: f64| x, 1.0, 0.0, &tol()).unwrap_err();
        assert!(matches!(err, NumericsError::InvalidInterval { .. }));
    }

    #[test]
    fn non_finite_integrand_reports_abscissa() {
        let err = integrate(|x: f64| 1.0 / (x - 0.5), 0.0, 1.0, &tol()).unwrap_err();
        match err {
            NumericsError::NonFiniteIntegrand { x } => assert_eq!(x, 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn depth_exhaustion_carries_estimate() {
        let shallow = ToleranceSpec {
            max_depth: 2,
            ..ToleranceSpec::default()
        };
        let err = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 3.0, &shallow).unwrap_err();
        match err {
            NumericsError::DepthExhausted { estimate, .. } => assert!(estimate.is_finite()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn half_line_examples() {
        let v = integrate_to_infinity(|x: f64| (-x).exp(), 0.0, &tol()).unwrap();
        assert!((v - 1.0).abs() < 1e-8);
        let v = integrate_to_infinity(|x: f64| (1.0 + x).powf(-3.5), 0.0, &tol()).unwrap();
        assert!((v - 0.4).abs() < 0.4e-8);
        let v = integrate_to_infinity(|x: f64| (1.0 + x).powi(-2), 1.0, &tol()).unwrap();
        assert!((v - 0.5).abs() < 0.5e-8);
    }

    #[test]
    fn half_line_power_laws_match_closed_form() {
        for p in [1.5_f64, 2.0, 3.5] {
            let v = integrate_to_infinity(|x: f64| (1.0 + x).powf(-p), 0.0, &tol()).unwrap();
            let exact = 1.0 / (p - 1.0);
            assert!(((v - exact) / exact).abs() <= 1e-8, "p={p}: {v} vs {exact}");
        }
    }

    #[test]
    fn single_precision_works() {
        let t = ToleranceSpec::<f32>::default();
        let v = integrate(|x: f32| x * x, 0.0, 1.0, &t).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-5);
        let v = integrate_to_infinity(|x: f32| (1.0 + x).powi(-2), 0.0, &t).unwrap();
        assert!((v - 1.0).abs() < 1e-4);
    }
}
