//! Dirichlet domain data model and the word-reduction algorithm writing group
//! elements as products of face-pairing generators.

use crate::error::{Error, Result};
use crate::geom::{hyperbolic_distance, HyperboloidPoint, LorentzMatrix};

#[derive(Clone, Debug)]
pub struct DirichletDomain {
    pub center: HyperboloidPoint,
    pub face_pairings: Vec<LorentzMatrix>,
    /// face i is paired with face inverse_index[i]; the matrices are mutual
    /// inverses
    pub inverse_index: Vec<usize>,
    pub edge_cycles: Vec<GroupWord>,
    pub volume: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupWord {
    pub letters: Vec<usize>,
}

impl GroupWord {
    pub fn empty() -> Self {
        GroupWord { letters: Vec::new() }
    }
}

pub const CONTAINS_TOL: f64 = 1e-9;

impl DirichletDomain {
    pub fn validate(&self, tol: f64) -> Result<()> {
        let n = self.face_pairings.len();
        if self.inverse_index.len() != n {
            return Err(Error::Validation("inverse_index length mismatch".into()));
        }
        for (i, &j) in self.inverse_index.iter().enumerate() {
            if j >= n || self.inverse_index[j] != i {
                return Err(Error::Validation(format!("faces {i},{j} not paired involutively")));
            }
            let prod = self.face_pairings[i].mul(&self.face_pairings[j]);
            let r = (prod.m - LorentzMatrix::identity().m).abs().max();
            if r > tol.max(1e-7) {
                return Err(Error::Validation(format!(
                    "pairing {i} times pairing {j} is not the identity (residual {r:.3e})"
                )));
            }
        }
        for (i, g) in self.face_pairings.iter().enumerate() {
            g.validate(1e-7)?;
            let d = hyperbolic_distance(&self.center, &g.apply(&self.center))?;
            if d <= 2.0 * CONTAINS_TOL {
                return Err(Error::Validation(format!("face pairing {i} fixes the center")));
            }
        }
        for w in &self.edge_cycles {
            for &l in &w.letters {
                if l >= n {
                    return Err(Error::Validation(format!("edge cycle letter {l} out of range")));
                }
            }
        }
        if self.volume <= 0.0 {
            return Err(Error::Validation("volume must be positive".into()));
        }
        Ok(())
    }

    /// Minimal displacement of the center over all face pairings; controls
    /// the reduction iteration cap.
    pub fn min_face_displacement(&self) -> f64 {
        self.face_pairings
            .iter()
            .map(|g| hyperbolic_distance(&self.center, &g.apply(&self.center)).unwrap_or(0.0))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Membership test d(x, o) <= d(x, gamma_i o) + tol for all face pairings.
pub fn contains(d: &DirichletDomain, x: &HyperboloidPoint) -> bool {
    let d_center = match hyperbolic_distance(x, &d.center) {
        Ok(v) => v,
        Err(_) => return false,
    };
    for g in &d.face_pairings {
        let go = g.apply(&d.center);
        match hyperbolic_distance(x, &go) {
            Ok(v) => {
                if d_center > v + CONTAINS_TOL {
                    return false;
                }
            }
            Err(_) => return false,
        }
    }
    true
}

/// Left-to-right product of the referenced face pairings.
pub fn evaluate_word(d: &DirichletDomain, w: &GroupWord) -> LorentzMatrix {
    let mut out = LorentzMatrix::identity();
    for &l in &w.letters {
        out = out.mul(&d.face_pairings[l]);
    }
    out
}

/// Expresses g (assumed in the group generated by the face pairings) as a
/// word: repeatedly apply the inverse pairing that most decreases
/// d(gamma^-1 x, o) for x the running image of the center, ties to the lowest
/// index, until x lands in the domain.
pub fn reduce(d: &DirichletDomain, g: &LorentzMatrix) -> Result<GroupWord> {
    let mut letters = Vec::new();
    let mut x = g.apply(&d.center);
    let d0 = hyperbolic_distance(&x, &d.center)?;
    let min_disp = d.min_face_displacement();
    if !(min_disp > 0.0) {
        return Err(Error::Validation("degenerate domain: zero face displacement".into()));
    }
    let cap = (10.0 * d0 / min_disp).ceil() as usize + 16;
    let mut iter = 0;
    while !contains(d, &x) {
        let dist = hyperbolic_distance(&x, &d.center)?;
        let mut best: Option<(usize, f64)> = None;
        for i in 0..d.face_pairings.len() {
            let xi = d.face_pairings[d.inverse_index[i]].apply(&x);
            let di = hyperbolic_distance(&xi, &d.center)?;
            if di < dist - CONTAINS_TOL && best.map_or(true, |(_, bd)| di < bd - 1e-13) {
                best = Some((i, di));
            }
        }
        let Some((i, _)) = best else {
            return Err(Error::ReductionStuck { distance: dist });
        };
        // x <- gamma_i^-1 x, so gamma_i is the next letter of the word
        x = d.face_pairings[d.inverse_index[i]].apply(&x);
        letters.push(i);
        iter += 1;
        if iter > cap {
            return Err(Error::ReductionDiverged(cap));
        }
    }
    // the remainder fixes the center up to rounding, so it must be trivial
    let word = GroupWord { letters };
    let back = evaluate_word(d, &word);
    let resid = (back.m - g.m).abs().max() / g.m.abs().max().max(1.0);
    if resid > 1e-8 {
        return Err(Error::ReductionMismatch(resid));
    }
    Ok(word)
}

pub mod sample {
    //! A dodecahedral domain with 2 pi / 5 dihedral angles, used across the
    //! crate's tests.  Face pairings translate along the 12 icosahedral
    //! axes by twice the inradius after a 3 pi / 5 twist.

    use super::*;
    use nalgebra::{Matrix3, Matrix4, Vector3};

    pub fn rot_about(v: Vector3<f64>, alpha: f64) -> Matrix4<f64> {
        let v = v.normalize();
        let k = Matrix3::new(0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0);
        let r3 = Matrix3::identity() + alpha.sin() * k + (1.0 - alpha.cos()) * (k * k);
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(&r3);
        m
    }

    pub fn boost_along(v: Vector3<f64>, s: f64) -> Matrix4<f64> {
        let v = v.normalize();
        let z = Vector3::new(0.0, 0.0, 1.0);
        let u = if (v - z).norm() < 1e-12 {
            Matrix4::identity()
        } else if (v + z).norm() < 1e-12 {
            rot_about(Vector3::new(1.0, 0.0, 0.0), std::f64::consts::PI)
        } else {
            let ax = z.cross(&v);
            rot_about(ax, ax.norm().atan2(z.dot(&v)))
        };
        let mut b = Matrix4::identity();
        b[(0, 0)] = s.cosh();
        b[(0, 3)] = s.sinh();
        b[(3, 0)] = s.sinh();
        b[(3, 3)] = s.cosh();
        u * b * u.transpose()
    }

    pub fn axes() -> Vec<Vector3<f64>> {
        let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let mut raw = Vec::new();
        for s1 in [1.0, -1.0] {
            for s2 in [1.0, -1.0] {
                raw.push(Vector3::new(0.0, s1, s2 * phi));
                raw.push(Vector3::new(s1, s2 * phi, 0.0));
                raw.push(Vector3::new(s2 * phi, 0.0, s1));
            }
        }
        // order so opposite(i) = i ^ 1
        let mut ordered = Vec::new();
        let mut used = [false; 12];
        for i in 0..12 {
            if used[i] {
                continue;
            }
            used[i] = true;
            ordered.push(raw[i].normalize());
            for j in 0..12 {
                if !used[j] && (raw[j] + raw[i]).norm() < 1e-12 {
                    used[j] = true;
                    ordered.push(raw[j].normalize());
                    break;
                }
            }
        }
        ordered
    }

    pub fn inradius() -> f64 {
        let c72 = (2.0 * std::f64::consts::PI / 5.0).cos();
        let s5 = 5.0_f64.sqrt();
        let sinh2r = (c72 + 1.0 / s5) / (1.0 - 1.0 / s5);
        sinh2r.sqrt().asinh()
    }

    pub fn domain() -> DirichletDomain {
        let axes = axes();
        let r = inradius();
        let alpha = 3.0 * std::f64::consts::PI / 5.0;
        let pairings: Vec<LorentzMatrix> = (0..12)
            .map(|i| LorentzMatrix { m: boost_along(axes[i], 2.0 * r) * rot_about(axes[i], alpha) })
            .collect();
        DirichletDomain {
            center: HyperboloidPoint::origin(),
            face_pairings: pairings,
            inverse_index: (0..12).map(|i| i ^ 1).collect(),
            // each edge has five faces around it; the five-letter words come
            // from walking the identifications and evaluate to the identity
            edge_cycles: [
                [0, 8, 10, 4, 3],
                [2, 10, 6, 0, 5],
                [0, 3, 9, 7, 5],
                [2, 7, 9, 4, 10],
                [2, 8, 0, 11, 7],
                [4, 9, 11, 0, 6],
            ]
            .iter()
            .map(|w| GroupWord { letters: w.to_vec() })
            .collect(),
            volume: 11.199064741253448,
        }
    }

}
