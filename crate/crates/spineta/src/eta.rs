//! Eta-invariant estimation via the Mellin split, with a rigorous error
//! budget and exact-rational rounding to the admissible lattice.

use num_rational::Rational64;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::spinc::SpinCLengthSpectrum;
use crate::testfn::{Parity, TestFunction};
use crate::trace::{weyl_denominator, KahanSum, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtaKind {
    Sign,
    Dirac,
}

/// A certified interval on |t| for a batch of eigenvalue parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenvalueWindow {
    pub lower: f64,
    pub upper: f64,
    pub multiplicity: u32,
    pub sign: Sign,
    /// Wide windows contribute the endpoint average with half-spread error
    /// instead of the midpoint value with full-spread error.
    pub averaged: bool,
}

impl EigenvalueWindow {
    pub fn new(lower: f64, upper: f64, multiplicity: u32, sign: Sign) -> Result<Self> {
        if !(0.0 <= lower && lower <= upper) {
            return Err(Error::Validation(format!("bad window [{lower}, {upper}]")));
        }
        if multiplicity == 0 {
            return Err(Error::Validation("window multiplicity must be >= 1".into()));
        }
        Ok(EigenvalueWindow { lower, upper, multiplicity, sign, averaged: false })
    }

    pub fn averaged(lower: f64, upper: f64, multiplicity: u32, sign: Sign) -> Result<Self> {
        Ok(EigenvalueWindow { averaged: true, ..Self::new(lower, upper, multiplicity, sign)? })
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtaEstimate {
    pub central: f64,
    pub err_geometric_tail: f64,
    pub err_window_width: f64,
    pub err_spectral_tail: f64,
}

impl EtaEstimate {
    pub fn total_error(&self) -> f64 {
        self.err_geometric_tail + self.err_window_width + self.err_spectral_tail
    }

    pub fn interval(&self) -> (f64, f64) {
        let e = self.total_error();
        (self.central - e, self.central + e)
    }
}

/// The arithmetic progression {offset + step n : n in Z} of values an eta
/// invariant is allowed to take.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdmissibleRational {
    pub offset: Rational64,
    pub step: Rational64,
}

impl AdmissibleRational {
    pub fn new(offset: Rational64, step: Rational64) -> Result<Self> {
        if !step.is_positive() {
            return Err(Error::Validation("admissible step must be positive".into()));
        }
        Ok(AdmissibleRational { offset, step })
    }
}

fn check_eta_admissible(g: &TestFunction) -> Result<()> {
    g.check_trace_admissible()?;
    if g.parity() != Parity::Even {
        return Err(Error::Parity("eta split needs an even test function".into()));
    }
    Ok(())
}

fn rational_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Truncated geodesic contribution to eta, normalized by the full Fourier
/// mass of G on [0, inf).
pub fn eta_geometric_partial(
    spectrum: &SpinCLengthSpectrum,
    g: &TestFunction,
    l: f64,
    kind: EtaKind,
) -> Result<f64> {
    check_eta_admissible(g)?;
    if l <= 0.0 {
        return Err(Error::InvalidRange("split point L must be positive".into()));
    }
    let den = g.tail_integral(0.0)?;
    let mut entries: Vec<_> = spectrum.entries.iter().collect();
    entries.sort_by(|a, b| b.ell.total_cmp(&a.ell));
    let mut sum = KahanSum::default();
    for e in entries {
        let weight = match kind {
            EtaKind::Sign => 2.0 * (2.0 * e.theta).sin(),
            EtaKind::Dirac => {
                2.0 * e.theta.sin() * (2.0 * std::f64::consts::PI * rational_f64(e.phi)).cos()
            }
        };
        let denom = weyl_denominator(e.ell, 2.0 * e.theta);
        sum.add(-e.ell0 * weight / denom * g.value(e.ell / l) / e.ell);
    }
    Ok(sum.value() / den)
}

/// Windowed spectral contribution, returning (value, width error).
pub fn eta_spectral_partial(
    windows: &[EigenvalueWindow],
    g: &TestFunction,
    l: f64,
) -> Result<(f64, f64)> {
    check_eta_admissible(g)?;
    if l <= 0.0 {
        return Err(Error::InvalidRange("split point L must be positive".into()));
    }
    let den = g.tail_integral(0.0)?;
    let mut value = KahanSum::default();
    let mut width = 0.0;
    for w in windows {
        if w.upper == 0.0 {
            continue;
        }
        let s = w.sign.factor()?;
        let m = w.multiplicity as f64;
        let t_lo = g.tail_integral(l * w.lower)?;
        let t_hi = g.tail_integral(l * w.upper)?;
        if w.averaged {
            value.add(s * m * 0.5 * (t_lo + t_hi) / den);
            width += m * 0.5 * (t_lo - t_hi).abs() / den;
        } else {
            value.add(s * m * g.tail_integral(l * w.midpoint())? / den);
            width += m * (t_lo - t_hi).abs() / den;
        }
    }
    Ok((value.value(), width))
}

/// Mellin-split eta estimate: truncated geodesic side plus windowed spectral
/// side, with the supplied tail bounds folded into the error budget.
pub fn eta_estimate(
    spectrum: &SpinCLengthSpectrum,
    windows: &[EigenvalueWindow],
    g: &TestFunction,
    l: f64,
    cut: f64,
    kind: EtaKind,
    tails: (f64, f64),
) -> Result<EtaEstimate> {
    let truncated = SpinCLengthSpectrum {
        cutoff_r: cut.min(spectrum.cutoff_r),
        entries: spectrum.entries.iter().copied().filter(|e| e.ell < cut).collect(),
        manifold_volume: spectrum.manifold_volume,
    };
    let geom = eta_geometric_partial(&truncated, g, l, kind)?;
    let (spec, width) = eta_spectral_partial(windows, g, l)?;
    Ok(EtaEstimate {
        central: geom + spec,
        err_geometric_tail: tails.0,
        err_window_width: width,
        err_spectral_tail: tails.1,
    })
}

/// Oracle form of the split identity: both split integrals evaluated
/// spectrally for exact (zero-width) parameters. The lower integral is
/// quadrature of the Fourier transform on [0, L t], the upper one the tail
/// integral; per parameter they sum to sign times the full mass.
pub fn eta_split_check(
    windows: &[EigenvalueWindow],
    g: &TestFunction,
    l: f64,
) -> Result<f64> {
    check_eta_admissible(g)?;
    let den = g.tail_integral(0.0)?;
    let mut sum = KahanSum::default();
    for w in windows {
        if w.upper == 0.0 {
            continue;
        }
        let s = w.sign.factor()?;
        let m = w.multiplicity as f64;
        let t = w.midpoint();
        let head = crate::testfn::integrate(&|u| g.fourier(u).re, 0.0, l * t, 1e-12);
        let tail = g.tail_integral(l * t)?;
        sum.add(s * m * (head + tail) / den);
    }
    Ok(sum.value())
}

/// Lattice of values allowed by 3 eta_sign = 2 cs + tau mod 2Z.
pub fn chern_simons_constraint(cs: Rational64, tau: i64) -> AdmissibleRational {
    AdmissibleRational {
        offset: (Rational64::from_integer(2) * cs + Rational64::from_integer(tau))
            / Rational64::from_integer(3),
        step: Rational64::new(2, 3),
    }
}

/// The unique member of the admissible progression strictly inside the
/// interval.
pub fn round_to_admissible(interval: (f64, f64), set: &AdmissibleRational) -> Result<Rational64> {
    let (lo, hi) = interval;
    if !(lo < hi) {
        return Err(Error::InvalidRange(format!("empty interval [{lo}, {hi}]")));
    }
    let off = rational_f64(set.offset);
    let step = rational_f64(set.step);
    let n_lo = ((lo - off) / step).floor() as i64 - 1;
    let n_hi = ((hi - off) / step).ceil() as i64 + 1;
    let mut members = Vec::new();
    for n in n_lo..=n_hi {
        let cand = set.offset + set.step * Rational64::from_integer(n);
        let x = rational_f64(cand);
        if lo < x && x < hi {
            members.push(cand);
        }
    }
    match members.len() {
        0 => Err(Error::Inconclusive(lo, hi)),
        1 => Ok(members[0]),
        k => Err(Error::Ambiguous { count: k, lo, hi }),
    }
}

/// Combine the eta invariants into the Froyshov invariant h: the interval for
/// -2h = eta_sign / 4 + eta_Dir is rounded on the admissible lattice and
/// halved with a sign flip.
pub fn froyshov(
    eta_sign: Rational64,
    eta_dirac_interval: (f64, f64),
    admissible: &AdmissibleRational,
) -> Result<Rational64> {
    let quarter = rational_f64(eta_sign) / 4.0;
    let interval = (eta_dirac_interval.0 + quarter, eta_dirac_interval.1 + quarter);
    let rounded = round_to_admissible(interval, admissible)?;
    Ok(-rounded / Rational64::from_integer(2))
}

/// Back-solve the Dirac eta from a known Froyshov invariant and sign eta.
pub fn dirac_from_froyshov(h: Rational64, eta_sign: f64) -> f64 {
    -2.0 * rational_f64(h) - eta_sign / 4.0
}

/// Everything needed to test an ambiguous window under both signs.
pub struct SignContext<'a> {
    pub spectrum: &'a SpinCLengthSpectrum,
    pub g: &'a TestFunction,
    pub l: f64,
    pub cut: f64,
    pub kind: EtaKind,
    pub other_windows: &'a [EigenvalueWindow],
    pub tails: (f64, f64),
    pub eta_sign: Rational64,
    pub admissible: AdmissibleRational,
}

/// Resolve an unsigned window by checking which sign choice lands the -2h
/// interval on the admissible lattice.
pub fn sign_disambiguation(window: &EigenvalueWindow, ctx: &SignContext) -> Result<Sign> {
    if window.upper == 0.0 {
        return Ok(Sign::Plus);
    }
    let mut hits = Vec::new();
    for sign in [Sign::Plus, Sign::Minus] {
        let mut windows = ctx.other_windows.to_vec();
        windows.push(EigenvalueWindow { sign, ..*window });
        let est = eta_estimate(ctx.spectrum, &windows, ctx.g, ctx.l, ctx.cut, ctx.kind, ctx.tails)?;
        match froyshov(ctx.eta_sign, est.interval(), &ctx.admissible) {
            Ok(_) | Err(Error::Ambiguous { .. }) => hits.push(sign),
            Err(Error::Inconclusive(..)) => {}
            Err(e) => return Err(e),
        }
    }
    match hits.as_slice() {
        [s] => Ok(*s),
        [] => Err(Error::Inconclusive(0.0, 0.0)),
        _ => Err(Error::Ambiguous { count: 2, lo: 0.0, hi: 0.0 }),
    }
}
