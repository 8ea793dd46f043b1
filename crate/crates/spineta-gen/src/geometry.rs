//! Dodecahedral domain construction and combinatorics: face pairings, the
//! rotation group preserving the tiling, edge cycles derived by walking the
//! face identifications, the CW presentation with its linking form, and the
//! correspondence between twisting characters and first-Chern classes.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use num_rational::Rational64;
use spineta::dirichlet::{evaluate_word, DirichletDomain, GroupWord};
use spineta::geom::{HyperboloidPoint, LorentzMatrix};
use spineta::linking::{h1_from_relations, linking_form, CWPresentation, LinkingForm, H1};
use spineta::spinc::{frac_mod1, TwistCharacter};

pub const VOLUME: f64 = 11.199064741253448;
const ALPHA: f64 = 3.0 * std::f64::consts::PI / 5.0;

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

/// Icosahedral face axes ordered so the opposite of axis i is axis i ^ 1.
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

/// Dodecahedron vertex directions, dual to the face axes.
fn vertex_directions() -> Vec<Vector3<f64>> {
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let inv = 1.0 / phi;
    let mut out = Vec::new();
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for sz in [1.0, -1.0] {
                out.push(Vector3::new(sx, sy, sz).normalize());
            }
        }
    }
    for s1 in [1.0, -1.0] {
        for s2 in [1.0, -1.0] {
            out.push(Vector3::new(0.0, s1 * phi, s2 * inv).normalize());
            out.push(Vector3::new(s1 * phi, s2 * inv, 0.0).normalize());
            out.push(Vector3::new(s1 * inv, 0.0, s2 * phi).normalize());
        }
    }
    assert_eq!(out.len(), 20);
    out
}

pub fn inradius() -> f64 {
    let c72 = (2.0 * std::f64::consts::PI / 5.0).cos();
    let s5 = 5.0_f64.sqrt();
    let sinh2r = (c72 + 1.0 / s5) / (1.0 - 1.0 / s5);
    sinh2r.sqrt().asinh()
}

fn pairings() -> Vec<Matrix4<f64>> {
    let axes = axes();
    let r = inradius();
    (0..12).map(|i| boost_along(axes[i], 2.0 * r) * rot_about(axes[i], ALPHA)).collect()
}

/// Distance from the center to the vertices: solved from the bisector plane
/// of any face adjacent to a vertex direction.
fn outradius(axes: &[Vector3<f64>], vdir: &Vector3<f64>, r: f64) -> f64 {
    let mut s = None;
    for v in axes {
        let dot = v.dot(vdir);
        // adjacent faces have the maximal positive axis-vertex angle cosine
        if dot < 0.75 {
            continue;
        }
        let t = ((2.0 * r).cosh() - 1.0) / ((2.0 * r).sinh() * dot);
        let si = t.atanh();
        if let Some(prev) = s {
            assert!((si - prev as f64).abs() < 1e-12, "vertex not equidistant from faces");
        }
        s = Some(si);
    }
    s.expect("vertex has no adjacent face")
}

fn point(dir: &Vector3<f64>, s: f64) -> Vector4<f64> {
    Vector4::new(s.cosh(), s.sinh() * dir[0], s.sinh() * dir[1], s.sinh() * dir[2])
}

/// The 60 rotations preserving the face-axis configuration, as closure of two
/// five-fold generators.
pub fn rotation_group(axes: &[Vector3<f64>]) -> Vec<Matrix4<f64>> {
    let step = 2.0 * std::f64::consts::PI / 5.0;
    let gens = [rot_about(axes[0], step), rot_about(axes[2], step)];
    let mut group: Vec<Matrix4<f64>> = vec![Matrix4::identity()];
    let close = |group: &[Matrix4<f64>], m: &Matrix4<f64>| {
        group.iter().any(|g| (g - m).abs().max() < 1e-9)
    };
    loop {
        let mut added = false;
        for gi in 0..group.len() {
            for g in &gens {
                let m = group[gi] * g;
                if !close(&group, &m) {
                    group.push(m);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    assert_eq!(group.len(), 60, "icosahedral rotation group has 60 elements");
    group
}

#[derive(Clone, Debug)]
struct Edge {
    verts: [usize; 2],
    faces: [usize; 2],
    /// class index and oriented vertex pair, set by the cycle walk
    class: usize,
    orient: [usize; 2],
}

pub struct Geometry {
    pub domain: DirichletDomain,
    pub rotations: Vec<Matrix4<f64>>,
    pub cw: CWPresentation,
    pub q: LinkingForm,
    /// homology class of each face pairing, reduced onto the torsion basis
    /// mod 5
    pub gen_on_basis: Vec<[i64; 3]>,
}

fn nearest<const N: usize>(points: &[Vector4<f64>], p: &Vector4<f64>, tol: f64) -> usize {
    let mut best = (f64::INFINITY, usize::MAX);
    for (i, q) in points.iter().enumerate() {
        let d = (q - p).norm();
        if d < best.0 {
            best = (d, i);
        }
    }
    assert!(best.0 < tol, "no point within {tol} (closest {})", best.0);
    best.1
}

pub fn build() -> Geometry {
    let axes = axes();
    let r = inradius();
    let pair_mats = pairings();
    let vdirs = vertex_directions();
    let s_out = outradius(&axes, &vdirs[0], r);
    assert!((s_out - 1.9028473444057499).abs() < 1e-10);
    let vpoints: Vec<Vector4<f64>> = vdirs.iter().map(|d| point(d, s_out)).collect();

    // faces: the five nearest vertex directions, ordered around the axis
    let mut faces: Vec<Vec<usize>> = Vec::with_capacity(12);
    for v in &axes {
        let mut idx: Vec<usize> = (0..20).collect();
        idx.sort_by(|&a, &b| v.dot(&vdirs[b]).total_cmp(&v.dot(&vdirs[a])));
        assert!(v.dot(&vdirs[idx[4]]) - v.dot(&vdirs[idx[5]]) > 0.2);
        let mut five = idx[..5].to_vec();
        let e1 = (vdirs[five[0]] - v * v.dot(&vdirs[five[0]])).normalize();
        let e2 = v.cross(&e1);
        five.sort_by(|&a, &b| {
            let ang = |u: &Vector3<f64>| u.dot(&e2).atan2(u.dot(&e1));
            ang(&vdirs[a]).total_cmp(&ang(&vdirs[b]))
        });
        faces.push(five);
    }

    // edges: nearest-neighbour vertex pairs, each on exactly two faces
    let min_gap = (0..20)
        .flat_map(|i| (i + 1..20).map(move |j| (i, j)))
        .map(|(i, j)| (vdirs[i] - vdirs[j]).norm())
        .fold(f64::INFINITY, f64::min);
    let mut edges: Vec<Edge> = Vec::new();
    for i in 0..20 {
        for j in i + 1..20 {
            if (vdirs[i] - vdirs[j]).norm() < min_gap + 1e-9 {
                let on: Vec<usize> = (0..12)
                    .filter(|&f| faces[f].contains(&i) && faces[f].contains(&j))
                    .collect();
                assert_eq!(on.len(), 2, "edge must lie on two faces");
                edges.push(Edge {
                    verts: [i, j],
                    faces: [on[0], on[1]],
                    class: usize::MAX,
                    orient: [i, j],
                });
            }
        }
    }
    assert_eq!(edges.len(), 30);

    let edge_of = |edges: &[Edge], a: usize, b: usize| -> usize {
        edges
            .iter()
            .position(|e| e.verts == [a.min(b), a.max(b)])
            .expect("vertex pair is not an edge")
    };

    // edge cycles: walk flags (edge, face) across the identifications; each
    // cycle closes after five steps with the letter product equal to the
    // identity, defines one edge class, and propagates a consistent
    // orientation along the class
    let opp = |i: usize| i ^ 1;
    let mut cycles: Vec<GroupWord> = Vec::new();
    let mut n_classes = 0usize;
    for start in 0..edges.len() {
        if edges[start].class != usize::MAX {
            continue;
        }
        let class = n_classes;
        n_classes += 1;
        edges[start].class = class;
        let mut letters = Vec::new();
        let (mut e, mut f) = (start, edges[start].faces[0]);
        let start_orient = edges[start].orient;
        loop {
            letters.push(f);
            let g = pair_mats[opp(f)];
            let a = nearest::<4>(&vpoints, &(g * vpoints[edges[e].orient[0]]), 1e-6);
            let b = nearest::<4>(&vpoints, &(g * vpoints[edges[e].orient[1]]), 1e-6);
            let e_next = edge_of(&edges, a, b);
            let f_next = if edges[e_next].faces[0] == opp(f) {
                edges[e_next].faces[1]
            } else {
                assert_eq!(edges[e_next].faces[1], opp(f));
                edges[e_next].faces[0]
            };
            if e_next == start {
                assert_eq!([a, b], start_orient, "edge orientation does not close up");
                assert_eq!(f_next, edges[start].faces[0]);
                break;
            }
            assert_eq!(edges[e_next].class, usize::MAX, "edge classes must not merge");
            edges[e_next].class = class;
            edges[e_next].orient = [a, b];
            (e, f) = (e_next, f_next);
        }
        assert_eq!(letters.len(), 5, "edge cycles have length five");
        cycles.push(GroupWord { letters });
    }
    assert_eq!(n_classes, 6);

    let domain = DirichletDomain {
        center: HyperboloidPoint::origin(),
        face_pairings: pair_mats.iter().map(|&m| LorentzMatrix { m }).collect(),
        inverse_index: (0..12).map(opp).collect(),
        edge_cycles: cycles,
        volume: VOLUME,
    };
    domain.validate(1e-9).expect("derived domain must validate");
    for w in &domain.edge_cycles {
        let resid = (evaluate_word(&domain, w).m - Matrix4::identity()).abs().max();
        assert!(resid < 1e-9, "edge cycle word is not the identity ({resid:.3e})");
    }

    // rotations normalize the group: conjugation permutes the pairings
    let rotations = rotation_group(&axes);
    for rot in &rotations {
        for g in &pair_mats {
            let c = rot * g * rot.transpose();
            assert!(
                pair_mats.iter().any(|h| (h - c).abs().max() < 1e-9),
                "rotation does not permute the face pairings"
            );
        }
    }

    // face boundaries: one 2-cell per face pair, traversed along the even face
    let mut face_boundaries = vec![vec![0i64; 6]; 6];
    for k in 0..6 {
        let cyc = &faces[2 * k];
        for t in 0..5 {
            let (a, b) = (cyc[t], cyc[(t + 1) % 5]);
            let e = edge_of(&edges, a, b);
            let sign = if edges[e].orient == [a, b] { 1 } else { -1 };
            face_boundaries[k][edges[e].class] += sign;
        }
    }
    let h1 = h1_from_relations(&face_boundaries).expect("H1 from face boundaries");
    assert_eq!(h1.factors(), vec![5, 5, 5]);

    // homology class of each pairing: a skeleton path from the base vertex to
    // its image, crossing once into the neighbouring copy of the domain
    let paths = vertex_paths(&edges);
    let path_class = |from: usize, to: usize| -> Vec<i64> {
        let mut acc = vec![0i64; 6];
        let mut v = from;
        for &next in &paths[from][to] {
            let e = edge_of(&edges, v, next);
            let sign = if edges[e].orient == [v, next] { 1 } else { -1 };
            acc[edges[e].class] += sign;
            v = next;
        }
        acc
    };
    let mut gen_classes = Vec::with_capacity(12);
    for i in 0..12 {
        let w = faces[i][0];
        let u = nearest::<4>(&vpoints, &(pair_mats[opp(i)] * vpoints[w]), 1e-6);
        let part1 = path_class(0, w);
        let part2 = path_class(u, 0);
        gen_classes.push((0..6).map(|c| part1[c] + part2[c]).collect::<Vec<i64>>());
    }
    // opposite pairings are inverse in homology
    for i in 0..6 {
        let sum: Vec<i64> =
            (0..6).map(|c| gen_classes[2 * i][c] + gen_classes[2 * i + 1][c]).collect();
        assert!(h1.class_eq(&sum, &[0; 6]), "opposite pairings must cancel in homology");
    }

    // torsion basis: first edge triple whose classes generate
    let basis = (0..6)
        .flat_map(|i| (i + 1..6).flat_map(move |j| (j + 1..6).map(move |k| [i, j, k])))
        .find(|b| basis_matrix(&h1, b).is_some())
        .expect("no edge triple generates the torsion");
    let on_basis = |h1: &H1, basis: &[usize; 3], class: &[i64]| -> [i64; 3] {
        express_on_basis(h1, basis, class).expect("class outside the torsion span")
    };
    let gen_on_basis: Vec<[i64; 3]> =
        gen_classes.iter().map(|c| on_basis(&h1, &basis, c)).collect();

    // dual curves for the first three pairings: the arc to the translated
    // center crosses its own face once, signed by the orientation class of
    // (face frame, outward direction)
    let mut dual_intersections = Vec::new();
    let mut dual_curve_classes = Vec::new();
    for (row, gen) in [0usize, 2, 4].into_iter().enumerate() {
        let c = point(&axes[gen], r);
        let cyc = &faces[gen];
        let project = |d: Vector4<f64>| {
            let inner = -d[0] * c[0] + d[1] * c[1] + d[2] * c[2] + d[3] * c[3];
            d + inner * c
        };
        let t1 = project(vpoints[cyc[1]] - vpoints[cyc[0]]);
        let t2 = project(vpoints[cyc[2]] - vpoints[cyc[1]]);
        let n = Vector4::new(
            r.sinh(),
            r.cosh() * axes[gen][0],
            r.cosh() * axes[gen][1],
            r.cosh() * axes[gen][2],
        );
        let det = Matrix4::from_columns(&[c, t1, t2, n]).determinant();
        assert!(det.abs() > 1e-9);
        let mut inter = vec![0i64; 6];
        inter[row] = if det > 0.0 { 1 } else { -1 };
        dual_intersections.push(inter);
        let mut class = vec![0i64; 6];
        for (t, &b) in basis.iter().enumerate() {
            class[b] = gen_on_basis[gen][t];
        }
        dual_curve_classes.push(class);
    }

    let cw = CWPresentation {
        edge_labels: ["a", "b", "c", "d", "e", "f"].map(String::from).to_vec(),
        face_boundaries,
        dual_intersections,
        dual_curve_classes,
        basis: basis.to_vec(),
    };
    let q = linking_form(&cw).expect("linking form from derived CW data");
    assert_eq!(q.group, vec![5, 5, 5]);

    Geometry { domain, rotations, cw, q, gen_on_basis }
}

/// BFS shortest paths between all vertex pairs of the skeleton.
fn vertex_paths(edges: &[Edge]) -> Vec<Vec<Vec<usize>>> {
    let mut adj = vec![Vec::new(); 20];
    for e in edges {
        adj[e.verts[0]].push(e.verts[1]);
        adj[e.verts[1]].push(e.verts[0]);
    }
    let mut all = Vec::with_capacity(20);
    for from in 0..20 {
        let mut prev = vec![usize::MAX; 20];
        let mut queue = std::collections::VecDeque::from([from]);
        prev[from] = from;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if prev[w] == usize::MAX {
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        let mut paths = Vec::with_capacity(20);
        for to in 0..20 {
            let mut rev = vec![to];
            let mut v = to;
            while v != from {
                v = prev[v];
                rev.push(v);
            }
            rev.pop();
            rev.reverse();
            paths.push(rev);
        }
        all.push(paths);
    }
    all
}

/// Coefficient columns of the basis classes in the mod-5 Smith coordinates;
/// None when the triple does not generate.
fn basis_matrix(h1: &H1, basis: &[usize; 3]) -> Option<[[i64; 3]; 3]> {
    let torsion: Vec<usize> =
        (0..h1.diagonal.len()).filter(|&i| h1.diagonal[i] == 5).collect();
    assert_eq!(torsion.len(), 3);
    let mut m = [[0i64; 3]; 3];
    for (col, &b) in basis.iter().enumerate() {
        let mut unit = [0i64; 6];
        unit[b] = 1;
        let co = h1.coordinates(&unit);
        for row in 0..3 {
            m[row][col] = co[torsion[row]].rem_euclid(5);
        }
    }
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    (det.rem_euclid(5) != 0).then_some(m)
}

/// Coefficients x with sum x_j basis_j homologous to the given class, mod 5.
pub fn express_on_basis(h1: &H1, basis: &[usize; 3], class: &[i64]) -> Option<[i64; 3]> {
    let target = h1.coordinates(class);
    let m = basis_matrix(h1, basis)?;
    let torsion: Vec<usize> =
        (0..h1.diagonal.len()).filter(|&i| h1.diagonal[i] == 5).collect();
    for x0 in 0..5 {
        for x1 in 0..5 {
            for x2 in 0..5 {
                let x = [x0, x1, x2];
                let ok = (0..3).all(|row| {
                    let v: i64 = (0..3).map(|c| m[row][c] * x[c]).sum();
                    v.rem_euclid(5) == target[torsion[row]].rem_euclid(5)
                });
                if ok {
                    return Some(x);
                }
            }
        }
    }
    None
}

/// First-Chern coordinates on the torsion basis for each twisting character:
/// the character evaluated on the basis classes is solved from its generator
/// values, then inverted through the linking form.
pub fn character_chern_classes(geom: &Geometry, chars: &[TwistCharacter]) -> Vec<[i64; 3]> {
    let mut out = Vec::with_capacity(chars.len());
    let mut seen = std::collections::HashSet::new();
    for chi in chars {
        let mut psi = None;
        for p0 in 0..5i64 {
            for p1 in 0..5i64 {
                for p2 in 0..5i64 {
                    let p = [p0, p1, p2];
                    let ok = (0..12).all(|i| {
                        let num: i64 =
                            (0..3).map(|j| geom.gen_on_basis[i][j] * p[j]).sum();
                        chi.generator_values[i] == frac_mod1(Rational64::new(num, 5))
                    });
                    if ok {
                        assert!(psi.is_none(), "character values underdetermined");
                        psi = Some(p);
                    }
                }
            }
        }
        let psi = psi.expect("character inconsistent with the edge homology");
        let mut x_found = None;
        for x0 in 0..5i64 {
            for x1 in 0..5i64 {
                for x2 in 0..5i64 {
                    let x = [x0, x1, x2];
                    let ok = (0..3).all(|j| {
                        let mut acc = Rational64::new(0, 1);
                        for i in 0..3 {
                            acc += Rational64::from_integer(x[i]) * geom.q.matrix[i][j];
                        }
                        frac_mod1(acc) == frac_mod1(Rational64::new(psi[j], 5))
                    });
                    if ok {
                        assert!(x_found.is_none(), "linking form degenerate");
                        x_found = Some(x);
                    }
                }
            }
        }
        let x = x_found.expect("no Chern class matches the character");
        assert!(seen.insert(x), "character to Chern class map not injective");
        out.push(x);
    }
    out
}
