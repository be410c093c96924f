use crate::numerics::NumericsError;
use crate::real::Real;

/// Tabulated function on a strictly ascending grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1D<T> {
    xs: Vec<T>,
    ys: Vec<T>,
}

impl<T: Real> Table1D<T> {
    pub fn new(xs: Vec<T>, ys: Vec<T>) -> Result<Self, NumericsError> {
        if xs.len() != ys.len() {
            return Err(NumericsError::InvalidTable(format!(
                "length mismatch: {} abscissae, {} ordinates",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(NumericsError::InvalidTable("need at least two points".into()));
        }
        if let Some(i) = xs.iter().chain(&ys).position(|v| !v.is_finite()) {
            return Err(NumericsError::InvalidTable(format!(
                "non-finite entry at position {}",
                i % xs.len()
            )));
        }
        if let Some(i) = xs.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(NumericsError::InvalidTable(format!(
                "abscissae not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(Self { xs, ys })
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    pub fn ys(&self) -> &[T] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn x_range(&self) -> (T, T) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    fn check_range(&self, x: T) -> Result<(), NumericsError> {
        let (lo, hi) = self.x_range();
        if x >= lo && x <= hi {
            Ok(())
        } else {
            Err(NumericsError::OutOfRange {
                value: x.as_f64(),
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            })
        }
    }

    /// Index `i` of the interval `[xs[i], xs[i+1]]` containing `x`.
    fn interval(&self, x: T) -> usize {
        let n = self.xs.len();
        let upper = self.xs.partition_point(|&v| v <= x);
        upper.clamp(1, n - 1) - 1
    }

    fn secant(&self, i: usize) -> T {
        (self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i])
    }

    /// Knot derivative: three-point parabolic estimate, limited so the
    /// Hermite cubic stays monotone wherever the data are.
    fn knot_slope(&self, i: usize) -> T {
        let n = self.xs.len();
        let three = T::lit(3.0);
        if n == 2 {
            return self.secant(0);
        }
        if i == 0 || i == n - 1 {
            let (d_near, d_far, h_near, h_far) = if i == 0 {
                (
                    self.secant(0),
                    self.secant(1),
                    self.xs[1] - self.xs[0],
                    self.xs[2] - self.xs[1],
                )
            } else {
                (
                    self.secant(n - 2),
                    self.secant(n - 3),
                    self.xs[n - 1] - self.xs[n - 2],
                    self.xs[n - 2] - self.xs[n - 3],
                )
            };
            let mut d = ((T::lit(2.0) * h_near + h_far) * d_near - h_near * d_far) / (h_near + h_far);
            if d * d_near <= T::zero() {
                d = T::zero();
            } else if d.abs() > three * d_near.abs() {
                d = three * d_near;
            }
            return d;
        }
        let d_left = self.secant(i - 1);
        let d_right = self.secant(i);
        if d_left * d_right <= T::zero() {
            return T::zero();
        }
        let h_left = self.xs[i] - self.xs[i - 1];
        let h_right = self.xs[i + 1] - self.xs[i];
        let p = (d_left * h_right + d_right * h_left) / (h_left + h_right);
        let bound = three * d_left.abs().min(d_right.abs());
        p.signum() * p.abs().min(bound)
    }

    fn hermite(&self, i: usize, x: T) -> (T, T) {
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.knot_slope(i) * h, self.knot_slope(i + 1) * h);
        let one = T::one();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = two * s3 - three * s2 + one;
        let h10 = s3 - two * s2 + s;
        let h01 = -two * s3 + three * s2;
        let h11 = s3 - s2;
        let value = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
        let six = T::lit(6.0);
        let four = T::lit(4.0);
        let d00 = six * s2 - six * s;
        let d10 = three * s2 - four * s + one;
        let d01 = -six * s2 + six * s;
        let d11 = three * s2 - two * s;
        let deriv = (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / h;
        (value, deriv)
    }

    /// Monotone cubic interpolant at `x`.
    pub fn eval(&self, x: T) -> Result<T, NumericsError> {
        self.check_range(x)?;
        let i = self.interval(x);
        if x == self.xs[i] {
            return Ok(self.ys[i]);
        }
        if x == self.xs[i + 1] {
            return Ok(self.ys[i + 1]);
        }
        Ok(self.hermite(i, x).0)
    }

    /// First derivative of the interpolant at `x`.
    pub fn derivative(&self, x: T) -> Result<T, NumericsError> {
        self.check_range(x)?;
        let i = self.interval(x);
        Ok(self.hermite(i, x).1)
    }

    /// Solves `eval(x) = y` by bisection on the interpolant.
    pub fn invert(&self, y: T) -> Result<T, NumericsError> {
        let n = self.ys.len();
        let increasing = self.ys[1] > self.ys[0];
        let strictly = self
            .ys
            .windows(2)
            .all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] });
        if !strictly {
            return Err(NumericsError::NotMonotone);
        }
        let (y_lo, y_hi) = if increasing {
            (self.ys[0], self.ys[n - 1])
        } else {
            (self.ys[n - 1], self.ys[0])
        };
        if !(y >= y_lo && y <= y_hi) {
            return Err(NumericsError::OutOfRange {
                value: y.as_f64(),
                lo: y_lo.as_f64(),
                hi: y_hi.as_f64(),
            });
        }

        // knot bracket
        let upper = if increasing {
            self.ys.partition_point(|&v| v <= y)
        } else {
            self.ys.partition_point(|&v| v >= y)
        };
        let i = upper.clamp(1, n - 1) - 1;
        if y == self.ys[i] {
            return Ok(self.xs[i]);
        }
        if y == self.ys[i + 1] {
            return Ok(self.xs[i + 1]);
        }

        let mut lo = self.xs[i];
        let mut hi = self.xs[i + 1];
        let target = T::lit(1e-10) * (hi - lo).max(lo.abs().max(hi.abs()));
        let two = T::lit(2.0);
        for _ in 0..200 {
            let mid = (lo + hi) / two;
            if mid <= lo || mid >= hi || hi - lo <= target {
                break;
            }
            let v = self.hermite(i, mid).0;
            if (v < y) == increasing {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo + hi) / two)
    }
}

/// Monotone cubic interpolation of `table` at `x`.
pub fn interp_monotone<T: Real>(table: &Table1D<T>, x: T) -> Result<T, NumericsError> {
    table.eval(x)
}

/// Abscissa at which the interpolant of `table` takes the value `y`.
pub fn invert_monotone<T: Real>(table: &Table1D<T>, y: T) -> Result<T, NumericsError> {
    table.invert(y)
}
