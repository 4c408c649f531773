//! Cylinder functions of small integer order.
//!
//! `J_n` and `Y_n` for `n = 0..=3`, the modified functions `I_0`, `I_1`,
//! `K_0`, `K_1` and the Hankel function `H^(1)_n = J_n + i Y_n`.
//!
//! Small arguments use ascending series. Above [`SWITCH_JY`] the pair
//! `J_0, Y_0` (and their first derivatives) comes from Steed's method, i.e.
//! the continued fraction for `J'_0/J_0` combined with the complex continued
//! fraction for `(J'_0 + i Y'_0)/(J_0 + i Y_0)`; the higher orders follow
//! from upward recurrence, which is stable for `Y` at every argument and for
//! `J` once `x` exceeds the order. `K` uses Steed's continued fraction above
//! `x = 2`, `I` switches to its asymptotic series above [`SWITCH_I`].
//!
//! All functions are pure and thread-safe.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Series / continued-fraction switchover for `J` and `Y`.
pub const SWITCH_JY: f64 = 8.0;

/// Series / asymptotic switchover for `I_0`, `I_1`.
pub const SWITCH_I: f64 = 30.0;

const SWITCH_K: f64 = 2.0;
const EPS: f64 = 1e-17;
const FPMIN: f64 = 1e-300;
const MAXIT: usize = 100_000;

/// Order of a cylinder function, restricted to `0..=3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CylinderOrder(u8);

impl CylinderOrder {
    pub const ZERO: CylinderOrder = CylinderOrder(0);
    pub const ONE: CylinderOrder = CylinderOrder(1);
    pub const TWO: CylinderOrder = CylinderOrder(2);
    pub const THREE: CylinderOrder = CylinderOrder(3);

    pub fn new(order: u32) -> Result<Self> {
        if order <= 3 {
            Ok(CylinderOrder(order as u8))
        } else {
            Err(Error::domain(
                "CylinderOrder::new",
                format!("order {order} outside 0..=3"),
            ))
        }
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }
}

impl TryFrom<u32> for CylinderOrder {
    type Error = Error;

    fn try_from(order: u32) -> Result<Self> {
        CylinderOrder::new(order)
    }
}

fn check_arg(func: &'static str, x: f64, allow_zero: bool) -> Result<()> {
    if x.is_nan() {
        return Err(Error::domain(func, "argument is NaN"));
    }
    if x < 0.0 || (!allow_zero && x == 0.0) {
        let bound = if allow_zero { "x >= 0" } else { "x > 0" };
        return Err(Error::domain(func, format!("x = {x:e} violates {bound}")));
    }
    Ok(())
}

/// Bessel function of the first kind `J_n(x)`, `x >= 0`.
pub fn bessel_j(order: CylinderOrder, x: f64) -> Result<f64> {
    check_arg("bessel_j", x, true)?;
    Ok(j_all(x)[order.get()])
}

/// Bessel function of the second kind `Y_n(x)`, `x > 0`.
pub fn bessel_y(order: CylinderOrder, x: f64) -> Result<f64> {
    check_arg("bessel_y", x, false)?;
    Ok(y_all(x)[order.get()])
}

/// Derivative `J'_n(x)`.
pub fn bessel_j_prime(order: CylinderOrder, x: f64) -> Result<f64> {
    check_arg("bessel_j_prime", x, true)?;
    let j = j_all(x);
    Ok(match order.get() {
        0 => -j[1],
        n if x == 0.0 => {
            if n == 1 {
                0.5
            } else {
                0.0
            }
        }
        n => j[n - 1] - n as f64 / x * j[n],
    })
}

/// Derivative `Y'_n(x)`.
pub fn bessel_y_prime(order: CylinderOrder, x: f64) -> Result<f64> {
    check_arg("bessel_y_prime", x, false)?;
    let y = y_all(x);
    Ok(match order.get() {
        0 => -y[1],
        n => y[n - 1] - n as f64 / x * y[n],
    })
}

/// Hankel function of the first kind `H^(1)_n(x) = J_n(x) + i Y_n(x)`.
pub fn hankel1(order: CylinderOrder, x: f64) -> Result<Complex64> {
    check_arg("hankel1", x, false)?;
    let n = order.get();
    Ok(Complex64::new(j_all(x)[n], y_all(x)[n]))
}

/// Modified Bessel function `I_0(x)`, `x >= 0`.
pub fn bessel_i0(x: f64) -> Result<f64> {
    check_arg("bessel_i0", x, true)?;
    Ok(i01(x).0)
}

/// Modified Bessel function `I_1(x)`, `x >= 0`.
pub fn bessel_i1(x: f64) -> Result<f64> {
    check_arg("bessel_i1", x, true)?;
    Ok(i01(x).1)
}

/// Modified Bessel function `K_0(x)`, `x > 0`.
pub fn bessel_k0(x: f64) -> Result<f64> {
    check_arg("bessel_k0", x, false)?;
    Ok(k01(x).0)
}

/// Modified Bessel function `K_1(x)`, `x > 0`.
pub fn bessel_k1(x: f64) -> Result<f64> {
    check_arg("bessel_k1", x, false)?;
    Ok(k01(x).1)
}

/// `[J_0, J_1, J_2, J_3]` at `x >= 0` (unchecked).
pub(crate) fn j_all(x: f64) -> [f64; 4] {
    if x <= SWITCH_JY {
        [j_series(0, x), j_series(1, x), j_series(2, x), j_series(3, x)]
    } else {
        let (j0, j1, _, _) = steed_jy0(x);
        let j2 = 2.0 / x * j1 - j0;
        let j3 = 4.0 / x * j2 - j1;
        [j0, j1, j2, j3]
    }
}

/// `[Y_0, Y_1, Y_2, Y_3]` at `x > 0` (unchecked).
pub(crate) fn y_all(x: f64) -> [f64; 4] {
    let (y0, y1) = if x <= SWITCH_JY {
        y01_series(x)
    } else {
        let (_, _, y0, y1) = steed_jy0(x);
        (y0, y1)
    };
    let y2 = 2.0 / x * y1 - y0;
    let y3 = 4.0 / x * y2 - y1;
    [y0, y1, y2, y3]
}

/// `J_n(x)` and `Y_n(x)` together with their derivatives, for `n <= 3`.
pub(crate) fn jy_with_derivs(n: usize, x: f64) -> (f64, f64, f64, f64) {
    let j = j_all(x);
    let y = y_all(x);
    if n == 0 {
        (j[0], -j[1], y[0], -y[1])
    } else {
        let nf = n as f64;
        (
            j[n],
            j[n - 1] - nf / x * j[n],
            y[n],
            y[n - 1] - nf / x * y[n],
        )
    }
}

fn j_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for m in 1..=n {
        term *= half / m as f64;
    }
    if term == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let q = -half * half;
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + n as f64));
        sum += term;
        if term.abs() <= EPS * sum.abs() || k > 200.0 {
            break;
        }
        k += 1.0;
    }
    sum
}

fn y01_series(x: f64) -> (f64, f64) {
    let half = 0.5 * x;
    let lnh = half.ln();
    let q = half * half;
    let j0 = j_series(0, x);
    let j1 = j_series(1, x);

    // Y0: harmonic-number series.
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut s0 = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        harmonic += 1.0 / kf;
        let t = -term * harmonic;
        s0 += t;
        if t.abs() <= EPS * s0.abs() {
            break;
        }
    }
    let y0 = 2.0 / PI * ((lnh + EULER_GAMMA) * j0 + s0);

    // Y1: psi(k+1) + psi(k+2) = -2 gamma + H_k + H_{k+1}.
    let mut term = half;
    let mut h_k = 0.0;
    let mut s1 = term * (-2.0 * EULER_GAMMA + 1.0);
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * (kf + 1.0));
        h_k += 1.0 / kf;
        let t = term * (-2.0 * EULER_GAMMA + 2.0 * h_k + 1.0 / (kf + 1.0));
        s1 += t;
        if t.abs() <= EPS * s1.abs() {
            break;
        }
    }
    let y1 = -2.0 / (PI * x) + 2.0 / PI * lnh * j1 - s1 / PI;
    (y0, y1)
}

/// Steed's method at order zero, valid for `x >= 2`.
/// Returns `(J_0, J_1, Y_0, Y_1)`.
fn steed_jy0(x: f64) -> (f64, f64, f64, f64) {
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: f = J'_0 / J_0 by modified Lentz.
    let mut isign = 1.0;
    let mut h = FPMIN;
    let mut b = 0.0;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    let f = h;

    // CF2: p + i q = (J'_0 + i Y'_0) / (J_0 + i Y_0).
    let mut a = 0.25;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = a * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    for i in 2..MAXIT {
        a += 2.0 * (i - 1) as f64;
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di /= -den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < EPS {
            break;
        }
    }

    let gam = (p - f) / q;
    let j0 = isign * (w / ((p - f) * gam + q)).sqrt();
    let j0p = f * j0;
    let y0 = j0 * gam;
    let y0p = y0 * (p + q / gam);
    (j0, -j0p, y0, -y0p)
}

fn i01(x: f64) -> (f64, f64) {
    if x <= SWITCH_I {
        let q = 0.25 * x * x;
        let mut t0 = 1.0;
        let mut s0 = 1.0;
        let mut t1 = 0.5 * x;
        let mut s1 = t1;
        let mut k = 1.0;
        loop {
            t0 *= q / (k * k);
            t1 *= q / (k * (k + 1.0));
            s0 += t0;
            s1 += t1;
            if (t0 <= EPS * s0 && t1 <= EPS * s1) || k > 500.0 {
                break;
            }
            k += 1.0;
        }
        (s0, s1)
    } else {
        (i_asymptotic(0.0, x), i_asymptotic(4.0, x))
    }
}

/// Large-argument expansion of `I_nu`, with `mu = 4 nu^2`.
fn i_asymptotic(mu: f64, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= EPS * sum.abs() {
            break;
        }
    }
    x.exp() / (2.0 * PI * x).sqrt() * sum
}

fn k01(x: f64) -> (f64, f64) {
    if x <= SWITCH_K {
        let (i0, i1) = i01(x);
        let lnh = (0.5 * x).ln();
        let q = 0.25 * x * x;

        let mut term = 1.0;
        let mut harmonic = 0.0;
        let mut s0 = 0.0;
        for k in 1..200 {
            let kf = k as f64;
            term *= q / (kf * kf);
            harmonic += 1.0 / kf;
            let t = term * harmonic;
            s0 += t;
            if t <= EPS * s0 {
                break;
            }
        }
        let k0 = -(lnh + EULER_GAMMA) * i0 + s0;

        let mut term = 1.0;
        let mut h_k = 0.0;
        let mut s1 = -2.0 * EULER_GAMMA + 1.0;
        for k in 1..200 {
            let kf = k as f64;
            term *= q / (kf * (kf + 1.0));
            h_k += 1.0 / kf;
            let t = term * (-2.0 * EULER_GAMMA + 2.0 * h_k + 1.0 / (kf + 1.0));
            s1 += t;
            if t.abs() <= EPS * s1.abs() {
                break;
            }
        }
        let k1 = 1.0 / x + lnh * i1 - 0.25 * x * s1;
        (k0, k1)
    } else {
        steed_k01(x)
    }
}

/// Steed's continued fraction for `K_0`, `K_1` at `x >= 2`.
fn steed_k01(x: f64) -> (f64, f64) {
    let xi = 1.0 / x;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAXIT {
        a -= 2.0 * (i - 1) as f64;
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) * xi;
    (k0, k1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn j0_at_zero_is_one() {
        assert_eq!(bessel_j(CylinderOrder::ZERO, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(CylinderOrder::THREE, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn j0_at_one() {
        // Power series with 20 terms, summed by hand in the test.
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 0..20 {
            if k > 0 {
                term *= -0.25 / (k as f64 * k as f64);
            }
            sum += term;
        }
        let v = bessel_j(CylinderOrder::ZERO, 1.0).unwrap();
        assert_relative_eq!(v, sum, max_relative = 1e-14);
        assert!((v - 0.765_197_686_6).abs() < 1e-10);
    }

    #[test]
    fn small_argument_order_three() {
        for &x in &[1e-3, 5e-4, 1e-5] {
            let j = bessel_j(CylinderOrder::THREE, x).unwrap();
            assert_relative_eq!(j, x * x * x / 48.0, max_relative = 1e-6);
            let y = bessel_y(CylinderOrder::THREE, x).unwrap();
            assert_relative_eq!(y, -16.0 / (PI * x * x * x), max_relative = 1e-6);
        }
    }

    #[test]
    fn y0_small_argument_log_form() {
        let x = 1e-5;
        let y = bessel_y(CylinderOrder::ZERO, x).unwrap();
        let lim = 2.0 / PI * ((0.5 * x).ln() + EULER_GAMMA);
        assert!((y - lim).abs() < 1e-8);
    }

    #[test]
    fn k0_small_argument() {
        for &z in &[1e-4, 1e-6] {
            let k = bessel_k0(z).unwrap();
            let lim = -z.ln() + (2f64.ln() - EULER_GAMMA);
            assert!((k - lim).abs() < 10.0 * z * z * (-z.ln()));
        }
    }

    #[test]
    fn i0_asymptotic_form() {
        let z: f64 = 30.0;
        let v = bessel_i0(z).unwrap();
        let asym = z.exp() / (2.0 * PI * z).sqrt() * (1.0 + 1.0 / (8.0 * z));
        assert!((v / asym - 1.0).abs() < 0.01);
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
    }

    #[test]
    fn series_and_continued_fraction_meet_at_switch() {
        let x = SWITCH_JY;
        let (j0, j1, y0, y1) = steed_jy0(x);
        let (sy0, sy1) = y01_series(x);
        assert!((j_series(0, x) - j0).abs() < 1e-14, "J0");
        assert!((j_series(1, x) - j1).abs() < 1e-14, "J1");
        // the Y series cancels about two digits at the switch
        assert!((sy0 - y0).abs() < 1e-13, "Y0 {sy0} {y0}");
        assert!((sy1 - y1).abs() < 1e-13, "Y1 {sy1} {y1}");
        let (k0a, k1a) = k01(SWITCH_K);
        let (k0b, k1b) = steed_k01(SWITCH_K);
        assert_relative_eq!(k0a, k0b, max_relative = 1e-12);
        assert_relative_eq!(k1a, k1b, max_relative = 1e-12);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_j(CylinderOrder::ONE, -1.0).is_err());
        assert!(bessel_y(CylinderOrder::ONE, 0.0).is_err());
        assert!(bessel_y(CylinderOrder::ONE, -2.0).is_err());
        assert!(bessel_k0(0.0).is_err());
        assert!(bessel_i0(-1e-3).is_err());
        assert!(bessel_j(CylinderOrder::ZERO, f64::NAN).is_err());
        assert!(CylinderOrder::new(4).is_err());
    }

    #[test]
    fn hankel_combines_j_and_y() {
        let h = hankel1(CylinderOrder::THREE, 7.5).unwrap();
        assert_eq!(h.re, bessel_j(CylinderOrder::THREE, 7.5).unwrap());
        assert_eq!(h.im, bessel_y(CylinderOrder::THREE, 7.5).unwrap());
    }

    #[test]
    fn i0_k0_product_positive_and_decreasing() {
        let mut prev = f64::INFINITY;
        let mut x = 0.1;
        while x <= 30.0 {
            let p = bessel_i0(x).unwrap() * bessel_k0(x).unwrap();
            assert!(p > 0.0 && p < prev, "x = {x}");
            prev = p;
            x *= 1.05;
        }
    }
}
