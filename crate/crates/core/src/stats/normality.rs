//! Shapiro–Wilk W test with Royston's coefficient and p-value approximations
//! (algorithm AS R94), valid for 3 ≤ n ≤ 5000.

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::special::{normal_quantile, normal_sf};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapiroWilk {
    pub w: f64,
    pub p_value: f64,
}

const SMALL: f64 = 1e-19;
const G: [f64; 2] = [-2.273, 0.459];
const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

/// Royston's approximation to the upper-half Shapiro–Wilk coefficients,
/// largest first.
fn coefficients(n: usize) -> Vec<f64> {
    let half = n / 2;
    if n == 3 {
        return alloc::vec![libm::sqrt(0.5)];
    }
    let an = n as f64;
    let an25 = an + 0.25;
    let mut a: Vec<f64> = (1..=half).map(|i| normal_quantile((i as f64 - 0.375) / an25)).collect();
    let summ2 = 2.0 * a.iter().map(|m| m * m).sum::<f64>();
    let ssumm2 = libm::sqrt(summ2);
    let rsn = 1.0 / libm::sqrt(an);
    let a1 = poly(&C1, rsn) - a[0] / ssumm2;
    let (first_scaled, fac) = if n > 5 {
        let a2 = -a[1] / ssumm2 + poly(&C2, rsn);
        let fac = libm::sqrt(
            (summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2),
        );
        a[1] = a2;
        (2, fac)
    } else {
        let fac = libm::sqrt((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1));
        (1, fac)
    };
    a[0] = a1;
    for v in &mut a[first_scaled..] {
        *v /= -fac;
    }
    a
}

pub fn shapiro_wilk(sample: &[f64]) -> Result<ShapiroWilk> {
    let n = sample.len();
    if n < 3 {
        return Err(Error::InsufficientFrames { required: 3, available: n });
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateSample("non-finite value"));
    }
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let range = x[n - 1] - x[0];
    if range < SMALL {
        return Err(Error::DegenerateSample("all values identical"));
    }
    let a = coefficients(n);
    let mean = x.iter().sum::<f64>() / n as f64;
    let ssq: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    let num: f64 = a.iter().enumerate().map(|(i, ai)| ai * (x[n - 1 - i] - x[i])).sum();
    let w = (num * num / ssq).min(1.0);

    let p_value = if n == 3 {
        // exact for n = 3
        let pw = 6.0 / PI * (libm::asin(libm::sqrt(w)) - PI / 3.0);
        pw.clamp(0.0, 1.0)
    } else {
        let w1 = 1.0 - w;
        let an = n as f64;
        if w1 <= 0.0 {
            1.0
        } else if n <= 11 {
            let gamma = poly(&G, an);
            let y = libm::log(w1);
            if y >= gamma {
                1e-99
            } else {
                let y = -libm::log(gamma - y);
                let m = poly(&C3, an);
                let s = libm::exp(poly(&C4, an));
                normal_sf((y - m) / s)
            }
        } else {
            let y = libm::log(w1);
            let xx = libm::log(an);
            let m = poly(&C5, xx);
            let s = libm::exp(poly(&C6, xx));
            normal_sf((y - m) / s)
        }
    };
    Ok(ShapiroWilk { w, p_value })
}
