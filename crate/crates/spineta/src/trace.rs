//! Geometric and spectral sides of the trace formulas for functions, coexact
//! 1-forms, and spinors, in both parities.

use crate::error::{Error, Result};
use crate::spinc::SpinCLengthSpectrum;
use crate::testfn::{Parity, TestFunction};
use num_traits::ToPrimitive;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralKind {
    Functions,
    Coexact,
    Spinor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
    Unsigned,
}

impl Sign {
    pub fn factor(self) -> Result<f64> {
        match self {
            Sign::Plus => Ok(1.0),
            Sign::Minus => Ok(-1.0),
            Sign::Unsigned => Err(Error::MissingSign),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamValue {
    Real(f64),
    /// r = i s with s in [0, 1]; functions kind only (small eigenvalues)
    Imaginary(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralParam {
    pub value: ParamValue,
    pub multiplicity: u32,
    pub sign: Sign,
}

#[derive(Clone, Debug)]
pub struct SpectrumSample {
    pub kind: SpectralKind,
    pub parameters: Vec<SpectralParam>,
    pub b1: i64,
}

#[derive(Clone, Copy, Debug)]
pub struct GeodesicSum {
    pub value: f64,
    pub n_terms: usize,
    pub cutoff: f64,
}

/// Compensated accumulator so geodesic sums are reproducible bit-for-bit.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    total: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, v: f64) {
        let y = v - self.comp;
        let s = self.total + y;
        self.comp = (s - self.total) - y;
        self.total = s;
    }

    pub fn value(&self) -> f64 {
        self.total
    }
}

/// |1 - e^{l + i h}| |1 - e^{-l - i h}|, between 2 sinh(l) - 2 and
/// 2 cosh(l) + 2.
pub fn weyl_denominator(ell: f64, hol: f64) -> f64 {
    let ep = (ell.exp() * ell.exp() - 2.0 * ell.exp() * hol.cos() + 1.0).sqrt();
    let em = ((-ell).exp() * (-ell).exp() - 2.0 * (-ell).exp() * hol.cos() + 1.0).sqrt();
    ep * em
}

fn identity_term(kind: SpectralKind, parity: Parity, f: &TestFunction, vol: f64) -> Result<f64> {
    if parity == Parity::Odd {
        return Ok(0.0);
    }
    let h0 = f.value(0.0);
    let h2 = f.second_derivative_at_zero()?;
    Ok(match kind {
        SpectralKind::Functions => vol / (2.0 * PI) * (-h2),
        SpectralKind::Coexact => vol / (2.0 * PI) * (h0 - h2),
        SpectralKind::Spinor => vol / (2.0 * PI) * (0.25 * h0 - h2),
    })
}

fn geodesic_weight(kind: SpectralKind, parity: Parity, theta: f64, phi: f64) -> f64 {
    match (kind, parity) {
        (SpectralKind::Functions, _) => 1.0,
        (SpectralKind::Coexact, Parity::Even) => (2.0 * theta).cos(),
        (SpectralKind::Coexact, Parity::Odd) => (2.0 * theta).sin(),
        (SpectralKind::Spinor, Parity::Even) => theta.cos() * (2.0 * PI * phi).cos(),
        (SpectralKind::Spinor, Parity::Odd) => theta.sin() * (2.0 * PI * phi).cos(),
    }
}

fn check_kind_parity(kind: SpectralKind, parity: Parity) -> Result<()> {
    if kind == SpectralKind::Functions && parity == Parity::Odd {
        return Err(Error::Unsupported("functions kind has no odd trace formula".into()));
    }
    Ok(())
}

/// Sum over the geodesic spectrum only, without the identity term.
pub fn geodesic_sum(
    kind: SpectralKind,
    parity: Parity,
    spectrum: &SpinCLengthSpectrum,
    f: &TestFunction,
) -> Result<GeodesicSum> {
    check_kind_parity(kind, parity)?;
    f.check_trace_admissible()?;
    if f.parity() != parity {
        return Err(Error::Parity("test function parity does not match the formula".into()));
    }
    let mut acc = KahanSum::default();
    let mut n = 0;
    for e in &spectrum.entries {
        if let Some(rad) = f.support_radius() {
            if e.ell >= rad {
                continue;
            }
        }
        let fv = f.value(e.ell);
        if fv == 0.0 {
            continue;
        }
        let phi = e.phi.to_f64().unwrap();
        let w = geodesic_weight(kind, parity, e.theta, phi);
        acc.add(e.ell0 * w * fv / weyl_denominator(e.ell, 2.0 * e.theta));
        n += 1;
    }
    Ok(GeodesicSum { value: acc.value(), n_terms: n, cutoff: spectrum.cutoff_r })
}

/// Identity term plus geodesic sum.  Odd-parity results are the real
/// coefficient of i.
pub fn geometric_side(
    kind: SpectralKind,
    parity: Parity,
    spectrum: &SpinCLengthSpectrum,
    f: &TestFunction,
    vol: f64,
    _b1: i64,
) -> Result<f64> {
    let g = geodesic_sum(kind, parity, spectrum, f)?;
    Ok(identity_term(kind, parity, f, vol)? + g.value)
}

/// Spectral-sum side.  For odd parity all parameter signs must be known, and
/// the result is the real coefficient of i in (1/2) sum of hat K.
pub fn spectral_side(
    kind: SpectralKind,
    parity: Parity,
    s: &SpectrumSample,
    f: &TestFunction,
) -> Result<f64> {
    check_kind_parity(kind, parity)?;
    if f.parity() != parity {
        return Err(Error::Parity("test function parity does not match the formula".into()));
    }
    if s.kind != kind {
        return Err(Error::Validation("spectrum sample kind mismatch".into()));
    }
    let mut acc = KahanSum::default();
    for p in &s.parameters {
        let mult = p.multiplicity as f64;
        match (parity, p.value) {
            (Parity::Even, ParamValue::Real(t)) => {
                acc.add(mult * f.fourier(t).re);
            }
            (Parity::Even, ParamValue::Imaginary(sv)) => {
                if kind != SpectralKind::Functions {
                    return Err(Error::Validation(
                        "imaginary parameters only occur for the functions kind".into(),
                    ));
                }
                acc.add(mult * f.fourier_imag(sv)?);
            }
            (Parity::Odd, ParamValue::Real(t)) => {
                acc.add(mult * p.sign.factor()? * f.fourier(t.abs()).im);
            }
            (Parity::Odd, ParamValue::Imaginary(_)) => {
                return Err(Error::Validation("imaginary parameter in an odd formula".into()));
            }
        }
    }
    Ok(match (kind, parity) {
        (SpectralKind::Functions, _) => acc.value(),
        (SpectralKind::Coexact, Parity::Even) => {
            0.5 * (s.b1 - 1) as f64 * f.fourier(0.0).re + 0.5 * acc.value()
        }
        (_, _) => 0.5 * acc.value(),
    })
}

/// Interval certain to contain the full spectral sum: truncated geometric
/// side plus/minus the geometric tail bound.
pub fn even_sum_interval(
    kind: SpectralKind,
    spectrum: &SpinCLengthSpectrum,
    f: &TestFunction,
    vol: f64,
    b1: i64,
    geometric_tail_bound: f64,
) -> Result<(f64, f64)> {
    if geometric_tail_bound < 0.0 {
        return Err(Error::InvalidRange("negative tail bound".into()));
    }
    let g = geometric_side(kind, Parity::Even, spectrum, f, vol, b1)?;
    Ok((g - geometric_tail_bound, g + geometric_tail_bound))
}
