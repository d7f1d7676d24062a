//! Piecewise Hermite interpolation of tabulated trajectories.
//!
//! A [`SampledFunction`] stores values on strictly increasing knots together
//! with optional first and second derivatives. With both derivative levels the
//! interpolant is the quintic Hermite polynomial on each interval (C²); with
//! first derivatives only it is cubic Hermite (C¹); with values only the
//! slopes are estimated by three-point differences.

use crate::error::{Error, Result};

/// Value and derivatives of an interpolant at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    knots: Vec<f64>,
    values: Vec<f64>,
    d1: Option<Vec<f64>>,
    d2: Option<Vec<f64>>,
}

impl SampledFunction {
    /// Values only; slopes are estimated from neighbouring knots.
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_knots(&knots, &[&values])?;
        let slopes = estimate_slopes(&knots, &values);
        Ok(Self {
            knots,
            values,
            d1: Some(slopes),
            d2: None,
        })
    }

    pub fn with_derivative(knots: Vec<f64>, values: Vec<f64>, d1: Vec<f64>) -> Result<Self> {
        check_knots(&knots, &[&values, &d1])?;
        Ok(Self {
            knots,
            values,
            d1: Some(d1),
            d2: None,
        })
    }

    pub fn with_derivatives(
        knots: Vec<f64>,
        values: Vec<f64>,
        d1: Vec<f64>,
        d2: Vec<f64>,
    ) -> Result<Self> {
        check_knots(&knots, &[&values, &d1, &d2])?;
        Ok(Self {
            knots,
            values,
            d1: Some(d1),
            d2: Some(d2),
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivative_values(&self) -> Option<&[f64]> {
        self.d1.as_deref()
    }

    pub fn second_derivative_values(&self) -> Option<&[f64]> {
        self.d2.as_deref()
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = self.range();
        t >= lo && t <= hi
    }

    /// Interval index `i` with `knots[i] <= t <= knots[i + 1]`.
    fn locate(&self, t: f64) -> Result<usize> {
        let (lo, hi) = self.range();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfRange { t, lo, hi });
        }
        let i = self.knots.partition_point(|&k| k <= t);
        Ok(i.saturating_sub(1).min(self.knots.len() - 2))
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        Ok(self.eval(t)?.value)
    }

    /// Interpolant value with its first and second derivatives.
    pub fn eval(&self, t: f64) -> Result<Jet> {
        let i = self.locate(t)?;
        let (t0, t1) = (self.knots[i], self.knots[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (f0, f1) = (self.values[i], self.values[i + 1]);
        let d1 = self.d1.as_ref().expect("slopes always present");
        let (g0, g1) = (d1[i] * h, d1[i + 1] * h);

        let (v, ds, dss) = match &self.d2 {
            Some(d2) => {
                let (c0, c1) = (d2[i] * h * h, d2[i + 1] * h * h);
                quintic(s, f0, g0, c0, f1, g1, c1)
            }
            None => cubic(s, f0, g0, f1, g1),
        };
        Ok(Jet {
            value: v,
            d1: ds / h,
            d2: dss / (h * h),
        })
    }

    /// Returns a copy with values and derivatives scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let scale = |v: &Vec<f64>| v.iter().map(|x| x * factor).collect::<Vec<_>>();
        Self {
            knots: self.knots.clone(),
            values: scale(&self.values),
            d1: self.d1.as_ref().map(scale),
            d2: self.d2.as_ref().map(scale),
        }
    }
}

fn check_knots(knots: &[f64], columns: &[&Vec<f64>]) -> Result<()> {
    if knots.len() < 2 {
        return Err(Error::InvalidSamples("at least two knots required".into()));
    }
    if columns.iter().any(|c| c.len() != knots.len()) {
        return Err(Error::InvalidSamples(
            "sample columns differ in length from knots".into(),
        ));
    }
    if knots.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidSamples(
            "knots must be strictly increasing".into(),
        ));
    }
    if columns
        .iter()
        .flat_map(|c| c.iter())
        .chain(knots)
        .any(|v| !v.is_finite())
    {
        return Err(Error::InvalidSamples("non-finite sample".into()));
    }
    Ok(())
}

fn estimate_slopes(knots: &[f64], values: &[f64]) -> Vec<f64> {
    let n = knots.len();
    (0..n)
        .map(|i| {
            if n == 2 || i == 0 {
                let j = if i == 0 { 0 } else { n - 2 };
                return (values[j + 1] - values[j]) / (knots[j + 1] - knots[j]);
            }
            if i == n - 1 {
                return (values[n - 1] - values[n - 2]) / (knots[n - 1] - knots[n - 2]);
            }
            // derivative of the parabola through three neighbours
            let (h0, h1) = (knots[i] - knots[i - 1], knots[i + 1] - knots[i]);
            let (s0, s1) = (
                (values[i] - values[i - 1]) / h0,
                (values[i + 1] - values[i]) / h1,
            );
            (h1 * s0 + h0 * s1) / (h0 + h1)
        })
        .collect()
}

fn cubic(s: f64, f0: f64, g0: f64, f1: f64, g1: f64) -> (f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    let v = (2.0 * s3 - 3.0 * s2 + 1.0) * f0
        + (s3 - 2.0 * s2 + s) * g0
        + (-2.0 * s3 + 3.0 * s2) * f1
        + (s3 - s2) * g1;
    let d = (6.0 * s2 - 6.0 * s) * f0
        + (3.0 * s2 - 4.0 * s + 1.0) * g0
        + (-6.0 * s2 + 6.0 * s) * f1
        + (3.0 * s2 - 2.0 * s) * g1;
    let dd = (12.0 * s - 6.0) * f0
        + (6.0 * s - 4.0) * g0
        + (-12.0 * s + 6.0) * f1
        + (6.0 * s - 2.0) * g1;
    (v, d, dd)
}

fn quintic(s: f64, f0: f64, g0: f64, c0: f64, f1: f64, g1: f64, c1: f64) -> (f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    // basis polynomials and their first two derivatives in s
    let h0 = [
        1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
        -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
        -60.0 * s + 180.0 * s2 - 120.0 * s3,
    ];
    let h1 = [
        s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
        1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
        -36.0 * s + 96.0 * s2 - 60.0 * s3,
    ];
    let h2 = [
        0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5),
        0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4),
        0.5 * (2.0 - 18.0 * s + 36.0 * s2 - 20.0 * s3),
    ];
    let h3 = [
        10.0 * s3 - 15.0 * s4 + 6.0 * s5,
        30.0 * s2 - 60.0 * s3 + 30.0 * s4,
        60.0 * s - 180.0 * s2 + 120.0 * s3,
    ];
    let h4 = [
        -4.0 * s3 + 7.0 * s4 - 3.0 * s5,
        -12.0 * s2 + 28.0 * s3 - 15.0 * s4,
        -24.0 * s + 84.0 * s2 - 60.0 * s3,
    ];
    let h5 = [
        0.5 * (s3 - 2.0 * s4 + s5),
        0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4),
        0.5 * (6.0 * s - 24.0 * s2 + 20.0 * s3),
    ];
    let comb =
        |k: usize| h0[k] * f0 + h1[k] * g0 + h2[k] * c0 + h3[k] * f1 + h4[k] * g1 + h5[k] * c1;
    (comb(0), comb(1), comb(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn reproduces_knot_values() {
        let t = grid(11, 0.0, 2.0);
        let v: Vec<f64> = t.iter().map(|x| x.exp()).collect();
        let f = SampledFunction::new(t.clone(), v.clone()).unwrap();
        for (ti, vi) in t.iter().zip(&v) {
            assert_eq!(f.value(*ti).unwrap(), *vi);
        }
    }

    #[test]
    fn quintic_is_exact_for_quintic_polynomials() {
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(3) + 0.25 * x.powi(5);
        let dp = |x: f64| -2.0 + 1.5 * x * x + 1.25 * x.powi(4);
        let ddp = |x: f64| 3.0 * x + 5.0 * x.powi(3);
        let t = vec![-1.0, 0.3, 1.1, 2.0];
        let f = SampledFunction::with_derivatives(
            t.clone(),
            t.iter().map(|&x| p(x)).collect(),
            t.iter().map(|&x| dp(x)).collect(),
            t.iter().map(|&x| ddp(x)).collect(),
        )
        .unwrap();
        for x in [-0.7, 0.0, 0.5, 1.37, 1.99] {
            let j = f.eval(x).unwrap();
            assert!((j.value - p(x)).abs() < 1e-12);
            assert!((j.d1 - dp(x)).abs() < 1e-11);
            assert!((j.d2 - ddp(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn cubic_hermite_accuracy_scales_as_h4() {
        let err = |n: usize| {
            let t = grid(n, 0.0, 3.0);
            let f = SampledFunction::with_derivative(
                t.clone(),
                t.iter().map(|x| x.sin()).collect(),
                t.iter().map(|x| x.cos()).collect(),
            )
            .unwrap();
            (0..300)
                .map(|k| 0.01 * k as f64)
                .map(|x| (f.value(x).unwrap() - x.sin()).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(21) / err(41);
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    }

    #[test]
    fn rejects_bad_knots_and_out_of_range() {
        assert!(SampledFunction::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(SampledFunction::new(vec![0.0], vec![1.0]).is_err());
        assert!(SampledFunction::new(vec![0.0, 1.0], vec![1.0]).is_err());
        let f = SampledFunction::new(vec![0.0, 1.0], vec![1.0, 2.0]).unwrap();
        assert!(matches!(f.value(1.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(f.value(f64::NAN), Err(Error::OutOfRange { .. })));
    }
}
