//! Ball enumeration of the deck group, compressed by the rotational symmetry
//! of the tiling: states are canonical representatives of the 60-element
//! conjugation orbits, stored in an exact spatial hash on center images.

use nalgebra::{Matrix4, Vector4};
use std::collections::HashMap;

use crate::geometry::Geometry;

const BIN: f64 = 0.25;
/// centers of distinct group elements are at least 2r apart hyperbolically,
/// hence well over one unit apart in raw coordinates, so a sub-unit match in
/// adjacent bins identifies the element exactly
const MATCH_DIST: f64 = 0.5;

/// Exact point-keyed map: buckets raw hyperboloid coordinates and resolves
/// boundary jitter by probing the neighbouring bins of coordinates close to a
/// bin edge.
pub struct PointMap {
    bins: HashMap<[i64; 4], Vec<u32>>,
    pub points: Vec<Vector4<f64>>,
}

pub fn base_key(p: &Vector4<f64>) -> [i64; 4] {
    [0, 1, 2, 3].map(|i| (p[i] / BIN).floor() as i64)
}

impl PointMap {
    pub fn new() -> Self {
        PointMap { bins: HashMap::new(), points: Vec::new() }
    }

    pub fn get(&self, p: &Vector4<f64>) -> Option<u32> {
        let mut options: [(i64, bool); 4] = [(0, false); 4];
        for i in 0..4 {
            let f = p[i] / BIN;
            let base = f.floor();
            let eps = 1e-6 * (1.0 + p[i].abs()) / BIN;
            let frac = f - base;
            // probe neighbouring bins when the coordinate sits near an edge
            options[i] = (base as i64, frac < eps || frac > 1.0 - eps);
        }
        let deltas = |flag: bool| if flag { vec![0i64, -1, 1] } else { vec![0i64] };
        for d0 in deltas(options[0].1) {
            for d1 in deltas(options[1].1) {
                for d2 in deltas(options[2].1) {
                    for d3 in deltas(options[3].1) {
                        let key = [
                            options[0].0 + d0,
                            options[1].0 + d1,
                            options[2].0 + d2,
                            options[3].0 + d3,
                        ];
                        if let Some(v) = self.bins.get(&key) {
                            for &idx in v {
                                if (self.points[idx as usize] - p).norm() < MATCH_DIST {
                                    return Some(idx);
                                }
                            }
                        }
                    }
                }
            }
        }
        None
    }

    /// Inserts without a duplicate check; call get first.
    pub fn insert(&mut self, p: Vector4<f64>) -> u32 {
        let idx = self.points.len() as u32;
        self.bins.entry(base_key(&p)).or_default().push(idx);
        self.points.push(p);
        idx
    }
}

impl Default for PointMap {
    fn default() -> Self {
        Self::new()
    }
}

/// True when a strictly precedes b coordinate-wise with tolerance; used to
/// pick the canonical point of a rotation orbit.
fn lex_less(a: &Vector4<f64>, b: &Vector4<f64>, tol: f64) -> bool {
    for i in 1..4 {
        if a[i] < b[i] - tol {
            return true;
        }
        if a[i] > b[i] + tol {
            return false;
        }
    }
    false
}

pub struct Ball {
    /// canonical orbit representatives, identity first
    pub states: Vec<Matrix4<f64>>,
}

/// Enumerates all group elements whose center displacement is at most d_max,
/// up to conjugation by the 60 tiling rotations. Plain breadth-first search
/// over the face pairings is complete here: greedy reduction shortens any
/// element one letter at a time without ever exceeding its own displacement.
pub fn enumerate(geom: &Geometry, d_max: f64) -> Ball {
    let t_max = d_max.cosh();
    let gens: Vec<Matrix4<f64>> = geom.domain.face_pairings.iter().map(|g| g.m).collect();
    let gen_points: Vec<Vector4<f64>> =
        gens.iter().map(|g| g.column(0).into_owned()).collect();
    let mut map = PointMap::new();
    let mut states = vec![Matrix4::identity()];
    map.insert(Vector4::new(1.0, 0.0, 0.0, 0.0));
    let mut head = 0usize;
    while head < states.len() {
        let a = states[head];
        head += 1;
        for j in 0..12 {
            let p = a * gen_points[j];
            if p[0] > t_max {
                continue;
            }
            // canonical point of the rotation orbit
            let tol = 1e-6 * p[0];
            let mut best = p;
            let mut best_rot = 0usize;
            for (ri, rot) in geom.rotations.iter().enumerate() {
                let q = rot * p;
                if lex_less(&best, &q, tol) {
                    best = q;
                    best_rot = ri;
                }
            }
            if map.get(&best).is_some() {
                continue;
            }
            let rot = &geom.rotations[best_rot];
            let canon = rot * (a * gens[j]) * rot.transpose();
            map.insert(best);
            states.push(canon);
            if states.len() % 100_000 == 0 {
                eprintln!("  tiling: {} states", states.len());
            }
        }
    }
    Ball { states }
}
