//! Conjugacy classing of the enumerated ball: every short element is
//! conjugated so that its axis crosses the fundamental domain, the resulting
//! segment representatives are deduplicated in a point map, and segments of
//! the same closed geodesic are merged by walking each axis forward to its
//! successor segment.

use nalgebra::{Matrix4, Vector4};

use crate::geometry::Geometry;
use crate::tiling::{base_key, Ball, PointMap};

const STEP: f64 = 0.15;

fn mink(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

fn lorentz_inverse(m: &Matrix4<f64>) -> Matrix4<f64> {
    let q = Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0));
    q * m.transpose() * q
}

/// Fixed points on the light cone (attracting, repelling, both scaled to unit
/// time component) and the translation length, via power iteration of the
/// eighth power.
pub fn axis_data(g: &Matrix4<f64>) -> (Vector4<f64>, Vector4<f64>, f64) {
    let mut b = g * g;
    b = b * b;
    b = b * b;
    let iterate = |b: &Matrix4<f64>| {
        let mut v = Vector4::new(1.0, 0.0, 0.0, 0.0);
        for _ in 0..6 {
            v = b * v;
            v /= v[0];
        }
        v
    };
    let u_plus = iterate(&b);
    let u_minus = iterate(&lorentz_inverse(&b));
    let fwd = g * u_plus;
    let ell = fwd[0].ln();
    let resid = (fwd - ell.exp() * u_plus).norm() / ell.exp();
    assert!(resid < 1e-7, "power iteration failed to converge ({resid:.3e})");
    assert!(ell > 0.5, "unexpected short translation length {ell}");
    (u_plus, u_minus, ell)
}

fn axis_point(u_plus: &Vector4<f64>, u_minus: &Vector4<f64>, s: f64) -> Vector4<f64> {
    let c = s.exp() * u_plus + (-s).exp() * u_minus;
    let n = -mink(&c, &c);
    c / n.sqrt()
}

/// Parameter of a point on the axis relative to the closest point to the
/// center at s = 0.
fn axis_param(u_plus: &Vector4<f64>, u_minus: &Vector4<f64>, q: &Vector4<f64>) -> f64 {
    0.5 * (mink(q, u_minus) / mink(q, u_plus)).ln()
}

/// Greedy reduction of a point into the domain; returns the reduced point and
/// the accumulated group element applied to it.
fn reduce_point(gens: &[Matrix4<f64>], q0: &Vector4<f64>) -> (Vector4<f64>, Matrix4<f64>, bool) {
    let mut q = *q0;
    let mut w = Matrix4::identity();
    let mut moved = false;
    loop {
        let n = -mink(&q, &q);
        q /= n.sqrt();
        let mut best = (q[0] * (1.0 - 1e-12), usize::MAX);
        for (i, g) in gens.iter().enumerate() {
            let t = g.row(0).transpose().dot(&q);
            if t < best.0 - 1e-9 * q[0] {
                best = (t, i);
            }
        }
        if best.1 == usize::MAX {
            return (q, w, moved);
        }
        q = gens[best.1] * q;
        w = gens[best.1] * w;
        moved = true;
    }
}

struct Entry {
    conj: Matrix4<f64>,
    start: Vector4<f64>,
}

pub struct Classes {
    /// one representative matrix per conjugacy class, paired with the trace
    /// length and the primitive length
    pub reps: Vec<(Matrix4<f64>, f64, f64)>,
}

struct Segments {
    map: PointMap,
    entries: Vec<Entry>,
    parent: Vec<u32>,
}

impl Segments {
    fn find(&mut self, mut i: u32) -> u32 {
        while self.parent[i as usize] != i {
            self.parent[i as usize] = self.parent[self.parent[i as usize] as usize];
            i = self.parent[i as usize];
        }
        i
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb) as usize] = ra.min(rb);
        }
    }

    fn insert(&mut self, conj: Matrix4<f64>, start: Vector4<f64>) -> u32 {
        let idx = self.map.insert(conj.column(0).into_owned());
        debug_assert_eq!(idx as usize, self.entries.len());
        self.entries.push(Entry { conj, start });
        self.parent.push(idx);
        idx
    }

    /// Reduces the closest axis point of g and returns the segment entry of
    /// the reduced conjugate, inserting it when new.
    fn locate(
        &mut self,
        gens: &[Matrix4<f64>],
        g: &Matrix4<f64>,
        insert_missing: bool,
    ) -> Option<u32> {
        let (up, um, _) = axis_data(g);
        let p = axis_point(&up, &um, 0.0);
        let (q, w, _) = reduce_point(gens, &p);
        let conj = w * g * lorentz_inverse(&w);
        match self.map.get(&conj.column(0).into_owned()) {
            Some(idx) => Some(idx),
            None if insert_missing => Some(self.insert(conj, q)),
            None => None,
        }
    }
}

/// Groups the ball elements of trace length at most `cutoff` into conjugacy
/// classes.
pub fn conjugacy_classes(geom: &Geometry, ball: Ball, cutoff: f64) -> Classes {
    let gens: Vec<Matrix4<f64>> = geom.domain.face_pairings.iter().map(|g| g.m).collect();
    // keep only the short states, freeing the ball
    let mut selected: Vec<(Matrix4<f64>, Vector4<f64>, Vector4<f64>)> = Vec::new();
    for g in ball.states.iter().skip(1) {
        let (up, um, ell) = axis_data(g);
        if ell <= cutoff + 1e-4 {
            selected.push((*g, up, um));
        }
    }
    drop(ball);
    eprintln!("  classes: {} short orbit representatives", selected.len());

    let mut seg =
        Segments { map: PointMap::new(), entries: Vec::new(), parent: Vec::new() };
    for (g, up, um) in &selected {
        let p = axis_point(up, um, 0.0);
        for rot in &geom.rotations {
            let (q, w, _) = reduce_point(&gens, &(rot * p));
            let m = w * rot;
            let conj = m * g * lorentz_inverse(&m);
            if seg.map.get(&conj.column(0).into_owned()).is_none() {
                seg.insert(conj, q);
            }
        }
    }
    drop(selected);
    eprintln!("  classes: {} axis segments", seg.entries.len());

    // link every segment to the next segment of its geodesic
    let mut walked = 0usize;
    while walked < seg.entries.len() {
        let e = walked;
        walked += 1;
        let conj = seg.entries[e].conj;
        let start = seg.entries[e].start;
        let (up, um, ell) = axis_data(&conj);
        let s0 = axis_param(&up, &um, &start);
        let mut s = s0;
        loop {
            s += STEP;
            assert!(s - s0 < ell + 5.0, "axis walk failed to leave the segment");
            let (q, w, moved) = reduce_point(&gens, &axis_point(&up, &um, s));
            if !moved {
                continue;
            }
            let next = w * conj * lorentz_inverse(&w);
            let idx = match seg.map.get(&next.column(0).into_owned()) {
                Some(idx) => idx,
                None => seg.insert(next, q),
            };
            seg.union(e as u32, idx);
            break;
        }
        if walked % 500_000 == 0 {
            eprintln!("  classes: walked {walked} of {} segments", seg.entries.len());
        }
    }

    // class representative: the entry with the smallest center image
    let n = seg.entries.len();
    let mut rep_of: std::collections::HashMap<u32, usize> = std::collections::HashMap::new();
    for i in 0..n as u32 {
        let root = seg.find(i);
        let better = |a: usize, b: usize, seg: &Segments| {
            let (ka, kb) = (
                base_key(&seg.entries[a].conj.column(0).into_owned()),
                base_key(&seg.entries[b].conj.column(0).into_owned()),
            );
            let (ta, tb) = (seg.entries[a].conj[(0, 0)], seg.entries[b].conj[(0, 0)]);
            (ta, ka) < (tb, kb)
        };
        match rep_of.get(&root) {
            Some(&cur) if !better(i as usize, cur, &seg) => {}
            _ => {
                rep_of.insert(root, i as usize);
            }
        }
    }
    let mut reps: Vec<(Matrix4<f64>, f64, f64)> = Vec::new();
    for (_, &i) in &rep_of {
        let (_, _, ell) = axis_data(&seg.entries[i].conj);
        reps.push((seg.entries[i].conj, ell, 0.0));
    }
    reps.sort_by(|a, b| {
        a.1.total_cmp(&b.1)
            .then_with(|| base_key(&a.0.column(0).into_owned()).cmp(&base_key(&b.0.column(0).into_owned())))
    });

    // primitive lengths: powers of each primitive mark their classes
    let mut root_index: std::collections::HashMap<u32, usize> = std::collections::HashMap::new();
    for (i, r) in reps.iter().enumerate() {
        let key = seg.map.get(&r.0.column(0).into_owned()).expect("rep must be a segment");
        root_index.insert(seg.find(key), i);
    }
    for i in 0..reps.len() {
        if reps[i].2 != 0.0 {
            continue;
        }
        reps[i].2 = reps[i].1;
        let ell0 = reps[i].1;
        let mut power = reps[i].0;
        let mut k = 2u32;
        while f64::from(k) * ell0 <= cutoff + 1e-4 {
            power *= reps[i].0;
            let found = seg
                .locate(&gens, &power, false)
                .map(|e| seg.find(e))
                .and_then(|r| root_index.get(&r).copied());
            match found {
                Some(j) => {
                    assert!(
                        reps[j].2 == 0.0 || (reps[j].2 - ell0).abs() < 1e-6,
                        "conflicting primitive lengths"
                    );
                    reps[j].2 = ell0;
                    assert!(
                        (reps[j].1 - f64::from(k) * ell0).abs() < 1e-5 * reps[j].1,
                        "power length mismatch"
                    );
                }
                None => assert!(
                    f64::from(k) * ell0 > cutoff - 1e-3,
                    "missing class for a short power"
                ),
            }
            k += 1;
        }
    }
    for r in &mut reps {
        if r.2 == 0.0 {
            r.2 = r.1;
        }
    }
    Classes { reps }
}
