use crate::numerics::{NumericsError, Table1D, ToleranceSpec};
use crate::real::Real;

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th order weights equal the last row of A (FSAL); these are the
// differences between the 5th and embedded 4th order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
// PI controller exponents (Hairer & Wanner, order 5)
const ALPHA: f64 = 0.7 / 5.0;
const BETA: f64 = 0.4 / 5.0;

/// Integrates the scalar problem `y' = rhs(t, y)`, `y(t0) = y0` up to `t1`
/// with an embedded Dormand-Prince 5(4) pair under PI step-size control.
///
/// `t1 < t0` integrates backwards. The returned table holds every accepted
/// step, endpoints included, ordered by ascending `t`.
pub fn solve_ode<T, F>(rhs: F, y0: T, t0: T, t1: T, tol: &ToleranceSpec<T>) -> Result<Table1D<T>, NumericsError>
where
    T: Real,
    F: Fn(T, T) -> T,
{
    tol.validate()?;
    if t0 == t1 || !t0.is_finite() || !t1.is_finite() || !y0.is_finite() {
        return Err(NumericsError::InvalidInterval {
            a: t0.as_f64(),
            b: t1.as_f64(),
        });
    }

    let eval = |t: T, y: T| {
        let v = rhs(t, y);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumericsError::NonFiniteRhs {
                t: t.as_f64(),
                y: y.as_f64(),
            })
        }
    };
    let c = C.map(T::lit);
    let a = A.map(|row| row.map(T::lit));
    let e = E.map(T::lit);

    let span = t1 - t0;
    let dir = span.signum();
    let min_step = span.abs() * T::lit(1e-14);
    let scale = |y_old: T, y_new: T| tol.abs_tol + tol.rel_tol * y_old.abs().max(y_new.abs());

    let mut t = t0;
    let mut y = y0;
    let mut k = [T::zero(); 7];
    k[0] = eval(t, y)?;

    // Initial step from the local derivative scale.
    let mut h = {
        let d0 = y.abs() / scale(y, y).max(T::min_positive_value());
        let d1 = k[0].abs() / scale(y, y).max(T::min_positive_value());
        let guess = if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) {
            span.abs() * T::lit(1e-3)
        } else {
            T::lit(0.01) * d0 / d1
        };
        guess.min(span.abs()).max(min_step)
    };

    let mut ts = vec![t];
    let mut ys = vec![y];
    let mut err_prev = T::lit(1e-4);
    let mut steps = 0usize;

    while (t1 - t) * dir > T::zero() {
        steps += 1;
        if steps > tol.max_steps {
            return Err(NumericsError::StepBudget {
                t: t.as_f64(),
                steps: tol.max_steps,
            });
        }
        let remaining = (t1 - t).abs();
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        let hs = step * dir;

        for i in 1..7 {
            let mut acc = T::zero();
            for (j, kj) in k.iter().enumerate().take(i) {
                acc = acc + a[i][j] * *kj;
            }
            k[i] = eval(t + c[i] * hs, y + hs * acc)?;
        }
        let mut y_new = y;
        for j in 0..6 {
            y_new = y_new + hs * a[6][j] * k[j];
        }
        let mut err_est = T::zero();
        for j in 0..7 {
            err_est = err_est + e[j] * k[j];
        }
        let err = (hs * err_est).abs() / scale(y, y_new).max(T::min_positive_value());

        if err <= T::one() {
            t = if last { t1 } else { t + hs };
            y = y_new;
            ts.push(t);
            ys.push(y);
            // FSAL: the last stage is the derivative at the new point.
            k[0] = k[6];
            let err_c = err.max(T::lit(1e-10));
            let factor = T::lit(SAFETY) * err_c.powf(-T::lit(ALPHA)) * err_prev.powf(T::lit(BETA));
            h = step * factor.max(T::lit(MIN_FACTOR)).min(T::lit(MAX_FACTOR));
            err_prev = err_c;
        } else {
            let factor = T::lit(SAFETY) * err.powf(-T::lit(1.0 / 5.0));
            h = step * factor.max(T::lit(MIN_FACTOR));
        }
        if h < min_step && (t1 - t) * dir > T::zero() {
            return Err(NumericsError::StepUnderflow { t: t.as_f64() });
        }
    }

    if dir < T::zero() {
        ts.reverse();
        ys.reverse();
    }
    Table1D::new(ts, ys)
}
