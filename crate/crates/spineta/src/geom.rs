//! The two models of orientation-preserving hyperbolic isometries used
//! throughout: 4x4 matrices in SO(Q)^0 for Q = -t^2+x^2+y^2+z^2 acting on the
//! upper hyperboloid sheet, and 2x2 complex matrices with |det| = 1 acting on
//! hermitian matrices by g X g^*.  The identification sends (t,x,y,z) to
//! [[t+z, x-iy], [x+iy, t-z]].

use crate::error::{Error, Result};
use nalgebra::{Matrix2, Matrix4, SMatrix, Vector4};
use num_complex::Complex64;

pub const DEFAULT_TOL: f64 = 1e-9;

pub type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzMatrix {
    pub m: Matrix4<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GElement {
    pub m: Matrix2<C>,
    /// true when the entries are meant as an SL2(C) representative (det = 1),
    /// not merely |det| = 1
    pub unit_det: bool,
}

/// Conjugacy invariants of a loxodromic element: translation length, the
/// half-holonomy of the chosen lift, and the twisting-character phase in
/// turns (an approximate real, snapped to an exact rational by callers).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjugacyData {
    pub ell: f64,
    pub theta: f64,
    pub phi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperboloidPoint {
    pub coords: Vector4<f64>,
}

pub fn minkowski_inner(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

pub fn minkowski_q() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0))
}

impl HyperboloidPoint {
    pub fn origin() -> Self {
        HyperboloidPoint { coords: Vector4::new(1.0, 0.0, 0.0, 0.0) }
    }

    pub fn new(coords: Vector4<f64>) -> Result<Self> {
        let q = minkowski_inner(&coords, &coords);
        if (q + 1.0).abs() > 1e-6 * coords[0].max(1.0) || coords[0] < 1.0 - 1e-9 {
            return Err(Error::NotOnSheet(format!("Q = {q}, t = {}", coords[0])));
        }
        Ok(HyperboloidPoint { coords })
    }

    /// Rescales onto the Q = -1 sheet; used after long matrix products.
    pub fn normalized(coords: Vector4<f64>) -> Result<Self> {
        let q = minkowski_inner(&coords, &coords);
        if q >= 0.0 || coords[0] <= 0.0 {
            return Err(Error::NotOnSheet(format!("Q = {q}, t = {}", coords[0])));
        }
        Ok(HyperboloidPoint { coords: coords / (-q).sqrt() })
    }
}

impl LorentzMatrix {
    pub fn identity() -> Self {
        LorentzMatrix { m: Matrix4::identity() }
    }

    /// Q-orthogonality residual; zero for exact elements of O(Q).
    pub fn q_residual(&self) -> f64 {
        let q = minkowski_q();
        (self.m.transpose() * q * self.m - q).abs().max()
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let r = self.q_residual();
        if r > tol {
            return Err(Error::Validation(format!("not Q-orthogonal, residual {r:.3e}")));
        }
        if self.m[(0, 0)] <= 0.0 {
            return Err(Error::Validation("does not preserve the upper sheet".into()));
        }
        let det = self.m.determinant();
        if (det - 1.0).abs() > 64.0 * tol * self.m.abs().max().powi(3) {
            return Err(Error::Validation(format!("determinant {det} != +1")));
        }
        Ok(())
    }

    /// Exact-form inverse Q f^T Q, valid for any element of O(Q).
    pub fn inverse(&self) -> Self {
        let q = minkowski_q();
        LorentzMatrix { m: q * self.m.transpose() * q }
    }

    pub fn apply(&self, x: &HyperboloidPoint) -> HyperboloidPoint {
        // renormalize to absorb rounding drift on the sheet
        HyperboloidPoint::normalized(self.m * x.coords)
            .expect("Lorentz image left the upper sheet")
    }

    pub fn mul(&self, rhs: &LorentzMatrix) -> Self {
        LorentzMatrix { m: self.m * rhs.m }
    }
}

fn hermitian_of(v: &Vector4<f64>) -> Matrix2<C> {
    let (t, x, y, z) = (v[0], v[1], v[2], v[3]);
    Matrix2::new(
        C::new(t + z, 0.0),
        C::new(x, -y),
        C::new(x, y),
        C::new(t - z, 0.0),
    )
}

fn vector_of_hermitian(h: &Matrix2<C>) -> Vector4<f64> {
    Vector4::new(
        0.5 * (h[(0, 0)].re + h[(1, 1)].re),
        h[(1, 0)].re,
        h[(1, 0)].im,
        0.5 * (h[(0, 0)].re - h[(1, 1)].re),
    )
}

impl GElement {
    pub fn identity() -> Self {
        GElement { m: Matrix2::identity(), unit_det: true }
    }

    pub fn det(&self) -> C {
        self.m[(0, 0)] * self.m[(1, 1)] - self.m[(0, 1)] * self.m[(1, 0)]
    }

    pub fn trace(&self) -> C {
        self.m[(0, 0)] + self.m[(1, 1)]
    }

    pub fn mul(&self, rhs: &GElement) -> Self {
        GElement { m: self.m * rhs.m, unit_det: self.unit_det && rhs.unit_det }
    }

    pub fn neg(&self) -> Self {
        GElement { m: -self.m, unit_det: self.unit_det }
    }

    pub fn inverse(&self) -> Self {
        let d = self.det();
        let m = Matrix2::new(
            self.m[(1, 1)] / d,
            -self.m[(0, 1)] / d,
            -self.m[(1, 0)] / d,
            self.m[(0, 0)] / d,
        );
        GElement { m, unit_det: self.unit_det }
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let d = self.det();
        if (d.norm() - 1.0).abs() > tol {
            return Err(Error::Validation(format!("|det| = {} != 1", d.norm())));
        }
        if self.unit_det && (d - C::new(1.0, 0.0)).norm() > tol {
            return Err(Error::Validation(format!("det = {d} != 1 for SL2 representative")));
        }
        Ok(())
    }
}

/// The action g X g^* on hermitian matrices, read back in (t,x,y,z)
/// coordinates.  Depends only on the image of g in PSL2(C): the central
/// circle acts trivially.
pub fn moebius_to_lorentz(g: &GElement) -> LorentzMatrix {
    let gs = g.m.map(|c| c.conj()).transpose();
    let mut m = Matrix4::zeros();
    for k in 0..4 {
        let mut e = Vector4::zeros();
        e[k] = 1.0;
        let y = g.m * hermitian_of(&e) * gs;
        m.set_column(k, &vector_of_hermitian(&y));
    }
    LorentzMatrix { m }
}

/// Inverts the hermitian action: finds g in SL2(C), unique up to sign, with
/// g X g^* = f(X).  Writing the constraint as g X = f(X) g^# with
/// g^# = [[conj d, -conj c], [-conj b, conj a]] makes it a real-linear system
/// in the eight real components of g, solved by a null-vector extraction.
pub fn lorentz_to_moebius(f: &LorentzMatrix) -> Result<GElement> {
    let mut rows: SMatrix<f64, 32, 8> = SMatrix::zeros();
    let mut row = 0;
    for k in 0..4 {
        let mut e = Vector4::zeros();
        e[k] = 1.0;
        let x = hermitian_of(&e);
        let y = hermitian_of(&(f.m * e));
        // complex coefficients on (a,b,c,d) and on their conjugates
        let mut cc = [[C::new(0.0, 0.0); 8]; 4];
        cc[0][0] = x[(0, 0)];
        cc[0][1] = x[(1, 0)];
        cc[0][7] = -y[(0, 0)];
        cc[0][5] = y[(0, 1)];
        cc[1][0] = x[(0, 1)];
        cc[1][1] = x[(1, 1)];
        cc[1][6] = y[(0, 0)];
        cc[1][4] = -y[(0, 1)];
        cc[2][2] = x[(0, 0)];
        cc[2][3] = x[(1, 0)];
        cc[2][7] = -y[(1, 0)];
        cc[2][5] = y[(1, 1)];
        cc[3][2] = x[(0, 1)];
        cc[3][3] = x[(1, 1)];
        cc[3][6] = y[(1, 0)];
        cc[3][4] = -y[(1, 1)];
        for eq in &cc {
            for u in 0..4 {
                let c1 = eq[u];
                let c2 = eq[4 + u];
                rows[(row, 2 * u)] += c1.re + c2.re;
                rows[(row, 2 * u + 1)] += -c1.im + c2.im;
                rows[(row + 1, 2 * u)] += c1.im + c2.im;
                rows[(row + 1, 2 * u + 1)] += c1.re - c2.re;
            }
            row += 2;
        }
    }
    let svd = rows.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut imin = 0;
    for i in 1..8 {
        if svd.singular_values[i] < svd.singular_values[imin] {
            imin = i;
        }
    }
    let smax = svd.singular_values.max();
    let residual = svd.singular_values[imin] / smax.max(1.0);
    if residual > 1e-6 {
        return Err(Error::Conversion { residual });
    }
    let u = v_t.row(imin);
    let mut g = Matrix2::new(
        C::new(u[0], u[1]),
        C::new(u[2], u[3]),
        C::new(u[4], u[5]),
        C::new(u[6], u[7]),
    );
    let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
    if det.norm() < 1e-12 {
        return Err(Error::Conversion { residual: det.norm() });
    }
    g /= det.sqrt();
    let mut out = GElement { m: g, unit_det: true };
    normalize_sign(&mut out);
    // confirm against the forward map
    let back = moebius_to_lorentz(&out);
    let err = (back.m - f.m).abs().max() / f.m.abs().max().max(1.0);
    if err > 1e-7 {
        return Err(Error::Conversion { residual: err });
    }
    Ok(out)
}

/// Deterministic representative of {g, -g}: the first entry of modulus above
/// tolerance gets a positive real part, ties broken by positive imaginary
/// part.  Spin-lift code owns the actual sign choices.
pub fn normalize_sign(g: &mut GElement) {
    for idx in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let e = g.m[idx];
        if e.norm() > 1e-9 {
            if e.re < -1e-12 || (e.re.abs() <= 1e-12 && e.im < 0.0) {
                g.m = -g.m;
            }
            return;
        }
    }
}

/// Eigenvalue data via the trace quadratic x^2 - (tr g) x + 1 = 0, after
/// factoring a determinant phase out of non-SL2 input.  The root with
/// |lambda| > 1 gives ell = 2 log|lambda| and theta = arg(lambda) mod 2pi.
pub fn conjugacy_normal_form(g: &GElement) -> Result<ConjugacyData> {
    let det = g.det();
    let (tr, phi) = if g.unit_det {
        (g.trace(), 0.0)
    } else {
        let half_phase = C::from_polar(1.0, det.arg() / 2.0);
        (g.trace() / half_phase, det.arg() / (4.0 * std::f64::consts::PI))
    };
    let half = tr / 2.0;
    let disc = (half * half - C::new(1.0, 0.0)).sqrt();
    let r1 = half + disc;
    let r2 = half - disc;
    let lambda = if r1.norm() >= r2.norm() { r1 } else { r2 };
    if lambda.norm() <= 1.0 + 1e-8 {
        return Err(Error::NotLoxodromic { modulus: lambda.norm() });
    }
    let ell = 2.0 * lambda.norm().ln();
    let theta = lambda.arg().rem_euclid(2.0 * std::f64::consts::PI);
    let phi = phi.rem_euclid(1.0);
    Ok(ConjugacyData { ell, theta, phi })
}

/// arccosh(-<x,y>) on the upper sheet.  Arguments slightly below 1 from
/// rounding clamp to distance zero; anything further below is an error.
pub fn hyperbolic_distance(x: &HyperboloidPoint, y: &HyperboloidPoint) -> Result<f64> {
    let c = -minkowski_inner(&x.coords, &y.coords);
    if c < 1.0 {
        if c > 1.0 - 1e-9 * x.coords[0].max(y.coords[0]) {
            return Ok(0.0);
        }
        return Err(Error::DistanceRange(c));
    }
    Ok(c.acosh())
}
