//! Admissible test functions with exact Fourier data: Gaussians, shifted
//! Gaussian pairs, indicator convolution powers, bump convolutions, cosine
//! modulations, and odd derivatives.

use crate::error::{Error, Result};
use num_complex::Complex64;
use statrs::function::erf::erfc;
use std::f64::consts::PI;
use std::sync::OnceLock;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AdmissibilityClass {
    Schwartz,
    CompactSupport(f64),
    ConvPower(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    /// e^{-x^2/2c}
    Gaussian { c: f64 },
    /// e^{-c(x-T)^2/2} + e^{-c(x+T)^2/2}
    GaussianPair { c: f64, center: f64 },
    /// k-fold convolution of (1/2a) 1_{[-a,a]}, normalized to unit mass
    IndicatorPower { a: f64, k: u32 },
    /// (beta * beta)(x / scale) with beta(x) = e^{-1/(1-x^2)}
    BumpPower { scale: f64 },
    /// 2 base(x) cos(nu x)
    Modulated { base: Box<TestFunction>, nu: f64 },
    /// base'(x)
    OddDerivative { base: Box<TestFunction> },
}

use TestFunction::*;

impl TestFunction {
    pub fn gaussian(c: f64) -> Self {
        assert!(c > 0.0);
        Gaussian { c }
    }

    pub fn gaussian_pair(c: f64, center: f64) -> Self {
        assert!(c > 0.0 && center >= 0.0);
        GaussianPair { c, center }
    }

    pub fn indicator_power(a: f64, k: u32) -> Self {
        assert!(a > 0.0 && k >= 1);
        IndicatorPower { a, k }
    }

    pub fn bump_power(scale: f64) -> Self {
        assert!(scale > 0.0);
        BumpPower { scale }
    }

    pub fn modulated(base: TestFunction, nu: f64) -> Result<Self> {
        if base.parity() != Parity::Even {
            return Err(Error::Parity("modulation requires an even base".into()));
        }
        Ok(Modulated { base: Box::new(base), nu })
    }

    pub fn odd_derivative(base: TestFunction) -> Result<Self> {
        match base {
            Gaussian { .. } | GaussianPair { .. } | IndicatorPower { .. } => {
                Ok(OddDerivative { base: Box::new(base) })
            }
            _ => Err(Error::Unsupported("odd derivative of this kind".into())),
        }
    }

    pub fn parity(&self) -> Parity {
        match self {
            OddDerivative { .. } => Parity::Odd,
            _ => Parity::Even,
        }
    }

    pub fn admissibility_class(&self) -> AdmissibilityClass {
        match self {
            Gaussian { .. } | GaussianPair { .. } => AdmissibilityClass::Schwartz,
            IndicatorPower { a: _, k } => AdmissibilityClass::ConvPower(*k),
            BumpPower { scale } => AdmissibilityClass::CompactSupport(2.0 * scale),
            Modulated { base, .. } | OddDerivative { base } => base.admissibility_class(),
        }
    }

    /// Support radius, when compactly supported.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            IndicatorPower { a, k } => Some(*a * *k as f64),
            BumpPower { scale } => Some(2.0 * scale),
            Modulated { base, .. } | OddDerivative { base } => base.support_radius(),
            _ => None,
        }
    }

    /// Eligibility for use on the geometric side of the trace formulas:
    /// Gaussian-type kinds, indicator powers with even k >= 6, their
    /// modulations and odd derivatives.
    pub fn check_trace_admissible(&self) -> Result<()> {
        match self {
            Gaussian { .. } | GaussianPair { .. } => Ok(()),
            IndicatorPower { a: _, k } => {
                if *k >= 6 && k % 2 == 0 {
                    Ok(())
                } else {
                    Err(Error::Inadmissible(format!(
                        "indicator power k = {k}; need even k >= 6"
                    )))
                }
            }
            BumpPower { .. } => {
                Err(Error::Inadmissible("bump convolutions are for Weyl bounds only".into()))
            }
            Modulated { base, .. } | OddDerivative { base } => base.check_trace_admissible(),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Gaussian { c } => (-x * x / (2.0 * c)).exp(),
            GaussianPair { c, center } => {
                (-c * (x - center).powi(2) / 2.0).exp() + (-c * (x + center).powi(2) / 2.0).exp()
            }
            IndicatorPower { a, k } => {
                irwin_hall(*k, (x + *k as f64 * a) / (2.0 * a)) / (2.0 * a)
            }
            BumpPower { scale } => phi0_value(x / scale),
            Modulated { base, nu } => 2.0 * base.value(x) * (nu * x).cos(),
            OddDerivative { base } => match &**base {
                Gaussian { c } => -(x / c) * (-x * x / (2.0 * c)).exp(),
                GaussianPair { c, center } => {
                    -c * (x - center) * (-c * (x - center).powi(2) / 2.0).exp()
                        - c * (x + center) * (-c * (x + center).powi(2) / 2.0).exp()
                }
                IndicatorPower { a, k } => {
                    irwin_hall_d1(*k, (x + *k as f64 * a) / (2.0 * a)) / (4.0 * a * a)
                }
                _ => unreachable!("constructor restricts the base kind"),
            },
        }
    }

    /// Fourier transform with the convention hat f(t) = int f(x) e^{-itx} dx.
    /// Real for even kinds, purely imaginary for odd ones.
    pub fn fourier(&self, t: f64) -> Complex64 {
        match self {
            OddDerivative { base } => Complex64::new(0.0, t) * base.fourier(t),
            _ => Complex64::new(self.fourier_even(t), 0.0),
        }
    }

    fn fourier_even(&self, t: f64) -> f64 {
        match self {
            Gaussian { c } => (2.0 * PI * c).sqrt() * (-c * t * t / 2.0).exp(),
            GaussianPair { c, center } => {
                2.0 * (2.0 * PI / c).sqrt() * (-t * t / (2.0 * c)).exp() * (center * t).cos()
            }
            IndicatorPower { a, k } => sinc(a * t).powi(*k as i32),
            BumpPower { scale } => scale * beta_hat(scale * t).powi(2),
            Modulated { base, nu } => base.fourier_even(t - nu) + base.fourier_even(t + nu),
            OddDerivative { .. } => unreachable!(),
        }
    }

    /// hat f(i s) = int f(x) cosh(s x) dx, for even kinds with enough decay.
    pub fn fourier_imag(&self, s: f64) -> Result<f64> {
        match self {
            Gaussian { c } => Ok((2.0 * PI * c).sqrt() * (c * s * s / 2.0).exp()),
            GaussianPair { c, center } => {
                Ok(2.0 * (2.0 * PI / c).sqrt() * (s * s / (2.0 * c)).exp() * (center * s).cosh())
            }
            IndicatorPower { a, k } => Ok(sinhc(a * s).powi(*k as i32)),
            BumpPower { scale } => Ok(scale * beta_hat_imag(scale * s).powi(2)),
            Modulated { .. } => Err(Error::Unsupported("imaginary-axis transform of a modulation".into())),
            OddDerivative { .. } => Err(Error::Parity("imaginary-axis transform needs an even function".into())),
        }
    }

    pub fn second_derivative_at_zero(&self) -> Result<f64> {
        match self {
            Gaussian { c } => Ok(-1.0 / c),
            GaussianPair { c, center } => {
                Ok(2.0 * (c * c * center * center - c) * (-c * center * center / 2.0).exp())
            }
            IndicatorPower { a, k } => {
                if *k < 3 {
                    return Err(Error::Unsupported(format!(
                        "indicator power k = {k} is not twice differentiable at 0"
                    )));
                }
                Ok(irwin_hall_d2(*k, *k as f64 / 2.0) / (8.0 * a * a * a))
            }
            BumpPower { scale } => Ok(phi0_second_at_zero() / (scale * scale)),
            Modulated { base, nu } => {
                Ok(2.0 * (base.second_derivative_at_zero()? - nu * nu * base.value(0.0)))
            }
            OddDerivative { .. } => {
                Err(Error::Parity("second derivative at 0 needs an even function".into()))
            }
        }
    }

    /// int_x^infinity hat f(T) dT for even kinds.
    pub fn tail_integral(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::InvalidRange(format!("tail integral lower bound {x} < 0")));
        }
        match self {
            Gaussian { c } => Ok(PI * erfc(x * (c / 2.0).sqrt())),
            GaussianPair { c, .. } => {
                // gaussian envelope: |hat f(t)| <= 2 sqrt(2 pi / c) e^{-t^2/2c}
                let mut hi = x.max(1.0);
                while 2.0 * (2.0 * PI / c).sqrt() * (PI * c / 2.0).sqrt()
                    * erfc(hi / (2.0 * c).sqrt())
                    > 1e-15
                {
                    hi += (2.0 * c).sqrt();
                }
                Ok(integrate(&|t| self.fourier_even(t), x, hi, 1e-13))
            }
            IndicatorPower { a, k } => {
                if k % 2 != 0 {
                    return Err(Error::Unsupported(
                        "tail integral of an odd sinc power is not absolutely controlled".into(),
                    ));
                }
                let ki = *k as i32;
                // int_0^infinity sinc^k = pi H(0) by the Fourier pair, so the
                // tail is that minus an easy finite integral
                let full = PI * irwin_hall(*k, *k as f64 / 2.0) / 2.0;
                let head = integrate(&|u| sinc(u).powi(ki), 0.0, a * x, 1e-13);
                Ok((full - head) / a)
            }
            BumpPower { .. } | Modulated { .. } => {
                Err(Error::Unsupported("tail integral for this kind".into()))
            }
            OddDerivative { .. } => {
                Err(Error::Parity("tail integral needs an even function".into()))
            }
        }
    }
}

pub fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        1.0 - t * t / 6.0 + t.powi(4) / 120.0
    } else {
        t.sin() / t
    }
}

fn sinhc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        1.0 + t * t / 6.0 + t.powi(4) / 120.0
    } else {
        t.sinh() / t
    }
}

/// c_k = int_0^infinity sinc^k and d_k = int_1^infinity sinc^k, k even.
pub fn sinc_moments(k: u32) -> Result<(f64, f64)> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::InvalidRange(format!("sinc moments need even k >= 2, got {k}")));
    }
    let f = TestFunction::indicator_power(1.0, k);
    let c_k = f.tail_integral(0.0)?;
    let d_k = f.tail_integral(1.0)?;
    Ok((c_k, d_k))
}

fn binomial(n: u32, j: u32) -> f64 {
    let mut v = 1.0;
    for i in 0..j {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Density of a sum of k independent U[0,1] variables (piecewise polynomial).
fn irwin_hall(k: u32, u: f64) -> f64 {
    let kf = k as f64;
    if u <= 0.0 || u >= kf {
        return 0.0;
    }
    // reflect for numerical stability of the alternating sum
    let u = if u > kf / 2.0 { kf - u } else { u };
    let mut s = 0.0;
    for j in 0..=(u.floor() as u32) {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * binomial(k, j) * (u - j as f64).powi(k as i32 - 1);
    }
    s / factorial(k - 1)
}

fn irwin_hall_d1(k: u32, u: f64) -> f64 {
    let kf = k as f64;
    if u <= 0.0 || u >= kf || k < 2 {
        return 0.0;
    }
    let (u, refl) = if u > kf / 2.0 { (kf - u, -1.0) } else { (u, 1.0) };
    let mut s = 0.0;
    for j in 0..=(u.floor() as u32) {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * binomial(k, j) * (u - j as f64).powi(k as i32 - 2);
    }
    refl * s / factorial(k - 2)
}

fn irwin_hall_d2(k: u32, u: f64) -> f64 {
    let kf = k as f64;
    if u <= 0.0 || u >= kf || k < 3 {
        return 0.0;
    }
    let u = if u > kf / 2.0 { kf - u } else { u };
    let mut s = 0.0;
    for j in 0..=(u.floor() as u32) {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * binomial(k, j) * (u - j as f64).powi(k as i32 - 3);
    }
    s / factorial(k - 3)
}

fn beta(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

fn beta_d1(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        let d = 1.0 - x * x;
        beta(x) * (-2.0 * x / (d * d))
    }
}

/// phi0 = beta * beta (convolution), supported on [-2, 2].
fn phi0_value(u: f64) -> f64 {
    let u = u.abs();
    if u >= 2.0 {
        return 0.0;
    }
    let lo = (-1.0_f64).max(u - 1.0);
    let hi = 1.0_f64.min(u + 1.0);
    integrate(&|t| beta(t) * beta(u - t), lo, hi, 1e-12)
}

fn phi0_second_at_zero() -> f64 {
    static V: OnceLock<f64> = OnceLock::new();
    // phi0'' (0) = -int beta'(t)^2 dt
    *V.get_or_init(|| -integrate(&|t| beta_d1(t) * beta_d1(t), -1.0, 1.0, 1e-12))
}

fn beta_hat(t: f64) -> f64 {
    2.0 * integrate(&|x| beta(x) * (t * x).cos(), 0.0, 1.0, 1e-12)
}

fn beta_hat_imag(s: f64) -> f64 {
    2.0 * integrate(&|x| beta(x) * (s * x).cosh(), 0.0, 1.0, 1e-12)
}

/// Minimum of the transform of phi0(x / scale) over [-R, R], which under the
/// standing assumption sits at the endpoints; verified on a sample grid.
pub fn bump_min_on_interval(scale: f64, r: f64) -> Result<f64> {
    if !(scale > 0.0 && r > 0.0) {
        return Err(Error::InvalidRange("bump minimum needs scale > 0 and R > 0".into()));
    }
    let hat = |t: f64| scale * beta_hat(scale * t).powi(2);
    let end = hat(r);
    let n = 64;
    for i in 0..n {
        let t = r * i as f64 / n as f64;
        if hat(t) < end - 1e-12 {
            return Err(Error::AssumptionFailure(r));
        }
    }
    Ok(end)
}

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let h = (b - a) / 2.0;
    let m = (a + b) / 2.0;
    let mut k = 0.0;
    let mut g = 0.0;
    for i in 0..8 {
        let fv = if i == 7 {
            f(m)
        } else {
            f(m - h * XGK[i]) + f(m + h * XGK[i])
        };
        k += WGK[i] * fv;
        if i % 2 == 1 || i == 7 {
            g += WG[i / 2] * fv;
        }
    }
    (h * k, (h * (k - g)).abs())
}

/// Adaptive Gauss-Kronrod quadrature to absolute tolerance.
pub(crate) fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    // seed with panels no wider than 1 so oscillation is resolved
    let n0 = ((b - a).ceil() as usize).clamp(1, 4096);
    let mut stack: Vec<(f64, f64, f64)> = Vec::new();
    for i in 0..n0 {
        let x0 = a + (b - a) * i as f64 / n0 as f64;
        let x1 = a + (b - a) * (i + 1) as f64 / n0 as f64;
        stack.push((x0, x1, tol * (x1 - x0) / (b - a)));
    }
    let mut total = 0.0;
    let mut comp = 0.0;
    let mut depth = 0;
    while let Some((x0, x1, t)) = stack.pop() {
        let (v, e) = gk15(f, x0, x1);
        if e <= t.max(1e-16) || x1 - x0 < 1e-12 {
            // Kahan-compensated accumulation
            let y = v - comp;
            let s = total + y;
            comp = (s - total) - y;
            total = s;
        } else {
            let mid = (x0 + x1) / 2.0;
            stack.push((x0, mid, t / 2.0));
            stack.push((mid, x1, t / 2.0));
            depth += 1;
            assert!(depth < 1_000_000, "quadrature failed to converge");
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quadrature_basics() {
        assert_abs_diff_eq!(integrate(&|x| x * x, 0.0, 1.0, 1e-13), 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(integrate(&|x| x.sin(), 0.0, PI, 1e-13), 2.0, epsilon = 1e-11);
        assert_abs_diff_eq!(
            integrate(&|x| (-x * x / 2.0).exp(), -10.0, 10.0, 1e-13),
            (2.0 * PI).sqrt(),
            epsilon = 1e-11
        );
    }

    #[test]
    fn gaussian_data() {
        let g = TestFunction::gaussian(1.0);
        assert_eq!(g.value(0.0), 1.0);
        assert_abs_diff_eq!(g.fourier(0.0).re, (2.0 * PI).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(g.tail_integral(0.0).unwrap(), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(g.second_derivative_at_zero().unwrap(), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            g.fourier_imag(1.0).unwrap(),
            (2.0 * PI).sqrt() * (0.5_f64).exp(),
            epsilon = 1e-12
        );
        // the single-parameter tail value quoted at 3.5
        assert_abs_diff_eq!(g.tail_integral(3.5).unwrap() / PI, 0.000465258, epsilon = 1e-8);
    }

    #[test]
    fn indicator_power_values() {
        let t2 = TestFunction::indicator_power(1.0, 2);
        assert_abs_diff_eq!(t2.value(0.0), 0.5, epsilon = 1e-14);
        let h6 = TestFunction::indicator_power(1.0, 6);
        assert_abs_diff_eq!(h6.value(0.0), 11.0 / 40.0, epsilon = 1e-13);
        assert_eq!(h6.fourier(0.0).re, 1.0);
        assert_eq!(h6.value(6.01), 0.0);
        assert_eq!(h6.support_radius(), Some(6.0));
        // mass check by quadrature
        assert_abs_diff_eq!(
            integrate(&|x| h6.value(x), -6.0, 6.0, 1e-12),
            1.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn fourier_matches_quadrature() {
        let fns = [
            TestFunction::gaussian(2.0),
            TestFunction::gaussian_pair(5.0, 1.5),
            TestFunction::indicator_power(1.0, 6),
            TestFunction::indicator_power(0.5, 8),
            TestFunction::bump_power(1.0),
            TestFunction::modulated(TestFunction::gaussian(1.0), 2.0).unwrap(),
        ];
        for f in &fns {
            let rad = f.support_radius().unwrap_or(12.0);
            for i in 0..11 {
                let t = -10.0 + 2.0 * i as f64;
                let quad = integrate(&|x| f.value(x) * (t * x).cos(), -rad, rad, 1e-11);
                assert_abs_diff_eq!(f.fourier(t).re, quad, epsilon = 1e-8);
                assert!(f.fourier(t).im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn odd_derivative_fourier() {
        let k = TestFunction::odd_derivative(TestFunction::gaussian(1.0)).unwrap();
        assert_eq!(k.parity(), Parity::Odd);
        for t in [0.5, 1.0, 3.0] {
            let quad = integrate(&|x| -k.value(x) * (t * x).sin(), -12.0, 12.0, 1e-11);
            let hat = k.fourier(t);
            assert!(hat.re.abs() < 1e-12);
            assert_abs_diff_eq!(hat.im, quad, epsilon = 1e-9);
        }
        let ki = TestFunction::odd_derivative(TestFunction::indicator_power(1.0, 6)).unwrap();
        let quad = integrate(&|x| -ki.value(x) * (2.0 * x).sin(), -6.0, 6.0, 1e-11);
        assert_abs_diff_eq!(ki.fourier(2.0).im, quad, epsilon = 1e-9);
    }

    #[test]
    fn fourier_imag_values() {
        let f = TestFunction::indicator_power(1.0, 8);
        assert_abs_diff_eq!(
            f.fourier_imag(1.0).unwrap(),
            (1.0_f64.sinh()).powi(8),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(f.fourier_imag(0.0).unwrap(), 1.0, epsilon = 1e-14);
        let g = TestFunction::gaussian(1.0);
        let quad = integrate(&|x| g.value(x) * (0.8 * x).cosh(), -14.0, 14.0, 1e-11);
        assert_abs_diff_eq!(g.fourier_imag(0.8).unwrap(), quad, epsilon = 1e-9);
    }

    #[test]
    fn second_derivatives_match_finite_differences() {
        let h = 1e-4;
        let fns = [
            TestFunction::gaussian(1.5),
            TestFunction::gaussian_pair(5.0, 7.5),
            TestFunction::indicator_power(1.0, 6),
            TestFunction::bump_power(1.0),
            TestFunction::modulated(TestFunction::gaussian(1.0), 3.0).unwrap(),
        ];
        for f in &fns {
            let fd = (f.value(h) - 2.0 * f.value(0.0) + f.value(-h)) / (h * h);
            assert_abs_diff_eq!(f.second_derivative_at_zero().unwrap(), fd, epsilon = 1e-5);
        }
        assert_abs_diff_eq!(
            TestFunction::indicator_power(1.0, 6).second_derivative_at_zero().unwrap(),
            -0.125,
            epsilon = 1e-14
        );
    }

    #[test]
    fn dilation_identity() {
        // H(x) = G(x/T) has hat H(t) = T hat G(T t)
        let t_dil = 2.5;
        let g = TestFunction::gaussian(1.0);
        let h = TestFunction::gaussian(t_dil * t_dil);
        for t in [0.0, 0.3, 1.0, 2.0] {
            assert_abs_diff_eq!(
                h.fourier(t).re,
                t_dil * g.fourier(t_dil * t).re,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn tail_monotone_and_pair_tail() {
        let g = TestFunction::gaussian(1.0);
        let mut prev = f64::INFINITY;
        for i in 0..10 {
            let v = g.tail_integral(i as f64 * 0.5).unwrap();
            assert!(v <= prev);
            prev = v;
        }
        let p = TestFunction::gaussian_pair(5.0, 2.0);
        // check against half the full integral 2 pi f(0) symmetry: int_R hat f = 2 pi f(0)
        let full = p.tail_integral(0.0).unwrap();
        assert_abs_diff_eq!(2.0 * full, 2.0 * PI * p.value(0.0), epsilon = 1e-9);
    }

    #[test]
    fn sinc_moment_values() {
        let (c2, _) = sinc_moments(2).unwrap();
        assert_abs_diff_eq!(c2, PI / 2.0, epsilon = 1e-10);
        let (c6, d6) = sinc_moments(6).unwrap();
        assert_abs_diff_eq!(c6, 11.0 * PI / 40.0, epsilon = 1e-10);
        let inner = integrate(&|u| sinc(u).powi(6), 0.0, 1.0, 1e-13);
        assert_abs_diff_eq!(d6, c6 - inner, epsilon = 1e-10);
        assert!(sinc_moments(5).is_err());
    }

    #[test]
    fn bump_constants() {
        let b = TestFunction::bump_power(1.0);
        assert_abs_diff_eq!(b.value(0.0), 0.133086, epsilon = 1e-5);
        assert_abs_diff_eq!(b.second_derivative_at_zero().unwrap(), -0.409586, epsilon = 1e-5);
        assert_abs_diff_eq!(b.fourier(0.0).re, 0.19713, epsilon = 1e-4);
        assert_eq!(b.value(2.0), 0.0);
        let m = bump_min_on_interval(1.0, 0.15).unwrap();
        assert_abs_diff_eq!(m, 0.19643, epsilon = 1e-4);
        // continuity at 0 and monotonicity in R
        assert_abs_diff_eq!(bump_min_on_interval(1.0, 1e-6).unwrap(), 0.19713, epsilon = 1e-4);
        let mut prev = f64::INFINITY;
        for r in [0.05, 0.1, 0.15, 0.2, 0.3] {
            let v = bump_min_on_interval(1.0, r).unwrap();
            assert!(v <= prev + 1e-12);
            prev = v;
        }
    }

    #[test]
    fn admissibility_rules() {
        assert!(TestFunction::gaussian(1.0).check_trace_admissible().is_ok());
        assert!(TestFunction::indicator_power(1.0, 8).check_trace_admissible().is_ok());
        assert!(TestFunction::indicator_power(1.0, 4).check_trace_admissible().is_err());
        assert!(TestFunction::bump_power(1.0).check_trace_admissible().is_err());
        assert!(TestFunction::odd_derivative(TestFunction::gaussian(1.0))
            .unwrap()
            .check_trace_admissible()
            .is_ok());
        assert!(TestFunction::odd_derivative(TestFunction::bump_power(1.0)).is_err());
    }

    #[test]
    fn parity_of_samples() {
        let g = TestFunction::gaussian_pair(3.0, 1.0);
        for x in [0.3, 1.1, 2.7] {
            assert_abs_diff_eq!(g.value(x), g.value(-x), epsilon = 1e-15);
        }
        let k = TestFunction::odd_derivative(TestFunction::indicator_power(1.0, 6)).unwrap();
        for x in [0.3, 1.1, 2.7] {
            assert_abs_diff_eq!(k.value(x), -k.value(-x), epsilon = 1e-15);
        }
    }
}
