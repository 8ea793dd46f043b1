//! Effective constants: local Weyl laws, eta and Froyshov a-priori bounds,
//! refined spectral density, geodesic Chebyshev bounds, and tail errors for
//! the eta evaluation.

use crate::error::{Error, Result};
use crate::spinc::SpinCLengthSpectrum;
use crate::testfn::{bump_min_on_interval, sinc_moments, TestFunction};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeylCoefficients {
    /// coexact and spinor quadratic coefficient
    pub a: f64,
    /// coexact constant term
    pub b: f64,
    /// small-eigenvalue count
    pub c: f64,
    /// functions constant term
    pub d: f64,
    /// spinor constant term
    pub e: f64,
}

impl WeylCoefficients {
    /// Presentation rounding: one decimal for the real coefficients, ceiling
    /// for the integer-valued count.
    pub fn presentation(&self) -> WeylCoefficients {
        let dec = |x: f64| (x * 10.0).round() / 10.0;
        WeylCoefficients {
            a: dec(self.a),
            b: dec(self.b),
            c: self.c.ceil(),
            d: self.d.round(),
            e: dec(self.e),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityBound {
    pub quadratic: f64,
    pub constant: f64,
    /// smallest nu at which the bound is claimed
    pub valid_from: f64,
}

impl DensityBound {
    pub fn eval(&self, nu: f64) -> f64 {
        self.quadratic * nu * nu + self.constant
    }
}

/// Riemann zeta at integer m >= 2 by direct summation with a midpoint tail.
pub fn zeta(m: u32) -> f64 {
    assert!(m >= 2);
    let mi = -(m as i32);
    let n = 200_000u64;
    let mut s = 0.0;
    for k in (1..=n).rev() {
        s += (k as f64).powi(mi);
    }
    s + (n as f64 + 0.5).powi(mi + 1) / (m as f64 - 1.0)
}

fn bump_scale(phi: &TestFunction) -> Result<f64> {
    match phi {
        TestFunction::BumpPower { scale } => Ok(*scale),
        _ => Err(Error::Unsupported("Weyl constants need a bump convolution".into())),
    }
}

struct BumpData {
    phi0: f64,
    phi2: f64,
    hat0: f64,
    m_r: f64,
}

fn bump_data(phi: &TestFunction, r: f64) -> Result<BumpData> {
    let scale = bump_scale(phi)?;
    Ok(BumpData {
        phi0: phi.value(0.0),
        phi2: phi.second_derivative_at_zero()?,
        hat0: phi.fourier(0.0).re,
        m_r: bump_min_on_interval(scale, r)?,
    })
}

/// Coexact 1-form count in a unit window at height nu: A nu^2 + B.
pub fn weyl_coexact(vol: f64, r: f64, phi: &TestFunction) -> Result<(f64, f64)> {
    let bd = bump_data(phi, r)?;
    let a = 2.0 * vol * bd.phi0 / (PI * r * bd.m_r);
    let b = (2.0 / (r * bd.m_r)) * (r * bd.hat0 + (vol / PI) * (bd.phi0 - bd.phi2 / (r * r)));
    Ok((a, b))
}

/// Bound on the number of small (nu <= 2) coexact parameters.
pub fn weyl_small(vol: f64, r: f64, phi: &TestFunction) -> Result<f64> {
    let bd = bump_data(phi, r)?;
    Ok(-vol * bd.phi2 / (2.0 * PI * r.powi(3) * bd.hat0))
}

/// Function-spectrum count: (A/2) nu^2 + D, given the small-eigenvalue
/// bound C.
pub fn weyl_functions(vol: f64, r: f64, phi: &TestFunction, c: f64) -> Result<(f64, f64)> {
    let bd = bump_data(phi, r)?;
    let a_half = vol * bd.phi0 / (PI * r * bd.m_r);
    let d = (1.0 / (r * bd.m_r))
        * (-vol * bd.phi2 / (PI * r * r) + 2.0 * bd.phi0 * ((2.0 * r).exp() - (-2.0 * r).exp()) * c);
    Ok((a_half, d))
}

/// Spinor count: A nu^2 + E.
pub fn weyl_spinor(vol: f64, r: f64, phi: &TestFunction) -> Result<(f64, f64)> {
    let bd = bump_data(phi, r)?;
    let a = 2.0 * vol * bd.phi0 / (PI * r * bd.m_r);
    let e = (2.0 * vol / (PI * r * bd.m_r)) * (0.25 * bd.phi0 - bd.phi2 / (r * r));
    Ok((a, e))
}

fn eta_bound_common(k: u32, co: &WeylCoefficients, inj: f64) -> Result<f64> {
    if k < 6 || k % 2 != 0 {
        return Err(Error::InvalidRange(format!("eta bounds need even k >= 6, got {k}")));
    }
    if inj <= 0.0 {
        return Err(Error::InvalidRange("injectivity radius must be positive".into()));
    }
    Ok((1.0 / inj)
        * (co.c * 1.0_f64.sinh().powi(k as i32)
            + (co.a / 2.0) * zeta(k - 2)
            + co.d * (zeta(k) + 1.0)))
}

/// A-priori bound on |eta| of the odd signature operator.
pub fn eta_sign_bound(k: u32, co: &WeylCoefficients, inj: f64) -> Result<f64> {
    let (c_k, d_k) = sinc_moments(k)?;
    let kf = k as f64;
    let common = eta_bound_common(k, co, inj)?;
    Ok((1.0 / c_k)
        * (co.b * c_k
            + (co.a + co.b) * d_k
            + (1.0 / (kf - 1.0)) * (co.a * (zeta(k - 3) - 1.0) + co.b * (zeta(k - 1) - 1.0))
            + common))
}

/// A-priori bound on |eta| of the Dirac operator: the spinor constant E
/// replaces B in the window terms.
pub fn eta_dirac_bound(k: u32, co: &WeylCoefficients, inj: f64) -> Result<f64> {
    let (c_k, d_k) = sinc_moments(k)?;
    let kf = k as f64;
    let common = eta_bound_common(k, co, inj)?;
    Ok((1.0 / c_k)
        * (co.e * c_k
            + (co.a + co.e) * d_k
            + (1.0 / (kf - 1.0)) * (co.a * (zeta(k - 3) - 1.0) + co.e * (zeta(k - 1) - 1.0))
            + common))
}

/// |h| <= |eta_sign| / 8 + |eta_Dir| / 2.
pub fn froyshov_bound(sign_bound: f64, dirac_bound: f64) -> f64 {
    sign_bound / 8.0 + dirac_bound / 2.0
}

/// Density of coexact parameters in [nu - 1/2, nu + 1/2] refined by a known
/// geodesic sum: (vol/2pi (11/20 nu^2 + 1/4) + geodesics + zero modes) over
/// the sinc-power floor.
pub fn refined_density(
    vol: f64,
    geodesic_sum_bound: f64,
    zero_eig_bound: f64,
    sinc_floor: f64,
) -> Result<DensityBound> {
    if sinc_floor <= 0.0 {
        return Err(Error::InvalidRange("sinc floor must be positive".into()));
    }
    Ok(DensityBound {
        quadratic: vol * (11.0 / 20.0) / (2.0 * PI * sinc_floor),
        constant: (vol / (2.0 * PI) * 0.25 + geodesic_sum_bound + zero_eig_bound) / sinc_floor,
        valid_from: 3.0,
    })
}

/// Chebyshev-type bound A(T) on the primitive-length sum over geodesics with
/// length in [T - 1/2, T + 1/2].
pub fn geodesic_chebyshev_bound(
    t: f64,
    c: f64,
    vol: f64,
    density: &DensityBound,
    zero_param_included: bool,
) -> Result<f64> {
    if c * t * t <= 1.0 {
        return Err(Error::InvalidRange(format!("need c T^2 > 1, got c = {c}, T = {t}")));
    }
    let gauss = 2.0 * (2.0 * PI / c).sqrt();
    let zero_term = if zero_param_included {
        gauss * (0.5 / c).exp() * t.cosh()
    } else {
        0.0
    };
    let mut series = 0.0;
    let mut n = 3.0_f64.max(density.valid_from);
    loop {
        let term = density.eval(n) * gauss * (-(n - 0.5) * (n - 0.5) / (2.0 * c)).exp();
        series += term;
        if term < 1e-18 * series.max(1e-300) && n > t + 3.0 * c {
            break;
        }
        n += 1.0;
        if n > 1e7 {
            return Err(Error::Validation("Chebyshev series failed to converge".into()));
        }
    }
    let identity = (vol / PI) * (-c * t * t / 2.0).exp() * (c - c * c * t * t);
    Ok((c / 8.0).exp() * (2.0 * (t + 0.5).cosh() + 2.0) * (zero_term + series - identity))
}

/// Bound on the discarded geometric eta terms beyond the cutoff: an explicit
/// slice where the spectrum is still known, then a Chebyshev-majorized
/// series over unit windows.
pub fn eta_geometric_tail(
    l: f64,
    cut: f64,
    explicit_part: &SpinCLengthSpectrum,
    a_bound: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    if l <= 0.0 || cut <= 0.0 {
        return Err(Error::InvalidRange("need positive L and cut".into()));
    }
    let cut_known = explicit_part.cutoff_r;
    let mut total = 0.0;
    for e in &explicit_part.entries {
        if e.ell < cut || e.ell > cut_known {
            continue;
        }
        let g = (-(e.ell / l) * (e.ell / l) / 2.0).exp();
        total += (2.0 / PI) * e.ell0 / (2.0 * e.ell.sinh() - 2.0) * g / e.ell;
    }
    let mut n = cut_known.floor();
    loop {
        let g = (-(n / l) * (n / l) / 2.0).exp();
        let term = (1.0 / PI) * g / ((n.sinh() - 1.0) * n) * a_bound(n + 0.5)?;
        total += term;
        if term < 1e-18 * total.max(1e-300) {
            break;
        }
        n += 1.0;
        if n > 1e6 {
            return Err(Error::Validation("geometric tail series failed to converge".into()));
        }
    }
    Ok(total)
}

/// Bound on eta contributions from spectral windows beyond those treated
/// exactly: count times the Gaussian tail from the window's lower edge.
pub fn eta_spectral_tail(l: f64, windows: &[(f64, f64, u32)]) -> Result<f64> {
    let g = TestFunction::gaussian(1.0);
    let mut total = 0.0;
    for &(lower, upper, count) in windows {
        if !(0.0 <= lower && lower <= upper) {
            return Err(Error::InvalidRange(format!("bad window [{lower}, {upper}]")));
        }
        total += count as f64 * (1.0 / PI) * g.tail_integral(l * lower)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn census_coeffs() -> WeylCoefficients {
        let phi = TestFunction::bump_power(1.0);
        let (a, b) = weyl_coexact(6.5, 0.15, &phi).unwrap();
        let c = weyl_small(6.5, 0.15, &phi).unwrap();
        let (_ah, d) = weyl_functions(6.5, 0.15, &phi, c).unwrap();
        let (_a2, e) = weyl_spinor(6.5, 0.15, &phi).unwrap();
        WeylCoefficients { a, b, c, d, e }
    }

    #[test]
    fn zeta_values() {
        assert_abs_diff_eq!(zeta(2), PI * PI / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(zeta(4), PI.powi(4) / 90.0, epsilon = 1e-13);
        assert_abs_diff_eq!(zeta(6), PI.powi(6) / 945.0, epsilon = 1e-13);
    }

    #[test]
    fn census_weyl_constants() {
        let co = census_coeffs();
        assert!((co.a - 18.7).abs() / 18.7 < 0.005);
        assert!((co.b - 2577.3).abs() / 2577.3 < 0.005);
        assert!((co.c - 637.0).abs() / 637.0 < 0.005);
        assert!((co.d - 4782.0).abs() / 4782.0 < 0.005);
        assert!((co.e - 2561.3).abs() / 2561.3 < 0.005);
        let p = co.presentation();
        assert_eq!(p.a, 18.7);
        assert_eq!(p.b, 2577.3);
        assert_eq!(p.c, 637.0);
        assert_eq!(p.d, 4782.0);
        assert_eq!(p.e, 2561.2);
        assert!(co.e < co.b);
        // functions quadratic is half the coexact one, spinor equals it
        let phi = TestFunction::bump_power(1.0);
        let (ah, _) = weyl_functions(6.5, 0.15, &phi, co.c).unwrap();
        assert_abs_diff_eq!(ah, co.a / 2.0, epsilon = 1e-12);
        let (a2, _) = weyl_spinor(6.5, 0.15, &phi).unwrap();
        assert_abs_diff_eq!(a2, co.a, epsilon = 1e-12);
    }

    #[test]
    fn weyl_linearity_and_scaling() {
        let phi = TestFunction::bump_power(1.0);
        let (a1, _) = weyl_coexact(6.5, 0.15, &phi).unwrap();
        let (a2, _) = weyl_coexact(13.0, 0.15, &phi).unwrap();
        assert_abs_diff_eq!(a2, 2.0 * a1, epsilon = 1e-9);
        let c1 = weyl_small(6.5, 0.15, &phi).unwrap();
        let c2 = weyl_small(6.5, 0.30, &phi).unwrap();
        // C scales as 1/R^3 apart from the hat ratio, which is R-free here
        assert_abs_diff_eq!(c1 / c2, 8.0, epsilon = 1e-9);
    }

    #[test]
    fn eta_and_froyshov_bounds() {
        // assembled from the published rounded census constants
        let co = WeylCoefficients { a: 18.7, b: 2577.3, c: 637.0, d: 4782.0, e: 2561.3 };
        let s = eta_sign_bound(8, &co, 0.15).unwrap();
        let d = eta_dirac_bound(8, &co, 0.15).unwrap();
        assert!((s.ceil() - 108267.0).abs() <= 1.0, "sign bound {s}");
        assert!((d - 108249.0).abs() <= 1.5, "dirac bound {d}");
        assert!((s - d).abs() < 20.0);
        let h = froyshov_bound(108267.0, 108249.0);
        assert_abs_diff_eq!(h, 67657.875, epsilon = 1e-9);
        assert_eq!(h.ceil(), 67658.0);
        assert_eq!(froyshov_bound(8.0, 2.0), 2.0);
        // degenerate coefficients give zero window terms
        let z = WeylCoefficients { a: 0.0, b: 0.0, c: 0.0, d: 0.0, e: 0.0 };
        assert_abs_diff_eq!(eta_sign_bound(8, &z, 0.15).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn eta_bound_substitution_property() {
        let co = census_coeffs();
        let with_e_as_b = WeylCoefficients { e: co.b, ..co };
        let s = eta_sign_bound(8, &co, 0.15).unwrap();
        let d = eta_dirac_bound(8, &with_e_as_b, 0.15).unwrap();
        assert_abs_diff_eq!(s, d, epsilon = 1e-9);
    }

    #[test]
    fn refined_density_values() {
        let db = refined_density(11.199, 4.827, 0.0055, 0.777).unwrap();
        assert!((db.quadratic - 1.262).abs() < 0.0005, "quadratic {}", db.quadratic);
        assert!((db.constant - 6.793).abs() < 0.0005, "constant {}", db.constant);
        let smaller = refined_density(11.199, 0.0, 0.0055, 0.777).unwrap();
        assert!(smaller.constant < db.constant);
        assert_abs_diff_eq!(
            db.quadratic,
            11.199 * 0.55 / (2.0 * PI * 0.777),
            epsilon = 1e-12
        );
    }

    #[test]
    fn chebyshev_bound_behavior() {
        let db = refined_density(11.199, 4.827, 0.0055, 0.777).unwrap();
        let mut ratios = Vec::new();
        let mut t = 7.5;
        while t <= 40.0 {
            let a = geodesic_chebyshev_bound(t, 5.0, 11.199, &db, true).unwrap();
            assert!(a > 0.0);
            ratios.push(a / (2.0 * t).exp());
            t += 2.5;
        }
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        assert!(hi / lo < 10.0, "ratio range [{lo}, {hi}]");
        assert!(matches!(
            geodesic_chebyshev_bound(0.3, 5.0, 11.199, &db, true),
            Err(Error::InvalidRange(_))
        ));
    }

    #[test]
    fn far_tail_term_is_negligible() {
        let db = refined_density(11.199, 4.827, 0.0055, 0.777).unwrap();
        let n = 31.0_f64;
        let l = 1.7;
        let a = geodesic_chebyshev_bound(n + 0.5, 5.0, 11.199, &db, true).unwrap();
        let term = (1.0 / PI) * (-(n / l) * (n / l) / 2.0).exp() / ((n.sinh() - 1.0) * n) * a;
        assert!(term < 1e-55 && term > 1e-62, "term {term:e}");
    }

    #[test]
    fn geometric_tail_empty_parts() {
        let spec = SpinCLengthSpectrum { cutoff_r: 8.0, entries: vec![], manifold_volume: 11.2 };
        let v = eta_geometric_tail(1.7, 7.5, &spec, |_| Ok(0.0)).unwrap();
        assert_eq!(v, 0.0);
        // decreasing in the cutoff
        let db = refined_density(11.199, 4.827, 0.0055, 0.777).unwrap();
        let ab = |t: f64| geodesic_chebyshev_bound(t, 5.0, 11.199, &db, true);
        let v75 = eta_geometric_tail(1.7, 7.5, &spec, ab).unwrap();
        let spec8 = SpinCLengthSpectrum { cutoff_r: 9.0, entries: vec![], manifold_volume: 11.2 };
        let v80 = eta_geometric_tail(1.7, 8.0, &spec8, ab).unwrap();
        assert!(v80 < v75);
        assert!(v75 < 0.06, "series-only tail {v75}");
    }

    #[test]
    fn spectral_tail_values() {
        let v = eta_spectral_tail(1.7, &[(2.0, 3.0, 22)]).unwrap();
        assert!(v <= 22.0 * 0.00068);
        assert!(v > 22.0 * 0.0006);
        let single = eta_spectral_tail(1.0, &[(3.5, 3.5, 1)]).unwrap();
        assert_abs_diff_eq!(single, 0.000465258, epsilon = 1e-8);
        assert_eq!(eta_spectral_tail(1.7, &[]).unwrap(), 0.0);
        assert!(eta_spectral_tail(1.7, &[(-1.0, 0.0, 1)]).is_err());
    }
}
