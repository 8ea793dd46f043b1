//! Spin lifts over GF(2), twisting characters of the torsion H1 via the
//! Smith normal form, and assembly of spin^c length spectra.

use crate::dirichlet::{reduce, DirichletDomain, GroupWord};
use crate::error::{Error, Result};
use crate::geom::{conjugacy_normal_form, lorentz_to_moebius, GElement, LorentzMatrix};
use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug)]
pub struct Presentation {
    pub n_generators: usize,
    pub relations: Vec<GroupWord>,
}

#[derive(Clone, Debug)]
pub struct SpinLift {
    /// signed SL2 lifts, one per generator
    pub generator_lifts: Vec<GElement>,
    /// sign bits applied to the initial lifts
    pub signs: Vec<u8>,
    /// dimension of the GF(2) solution space (0 means the lift is unique)
    pub solution_dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistCharacter {
    /// value on the i-th Smith basis element, in (1/d_i) Z / Z
    pub smith_basis_values: Vec<Rational64>,
    /// value on each original generator, in Q / Z
    pub generator_values: Vec<Rational64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub class_id: u64,
    pub ell: f64,
    pub ell0: f64,
    /// half-holonomy of the lift, in [0, 2 pi)
    pub theta: f64,
    /// twisting-character value, exact rational mod 1
    pub phi: Rational64,
}

#[derive(Clone, Debug)]
pub struct SpinCLengthSpectrum {
    pub cutoff_r: f64,
    pub entries: Vec<SpectrumEntry>,
    pub manifold_volume: f64,
}

/// Conjugacy-class representative fed into spectrum assembly.
#[derive(Clone, Debug)]
pub struct ClassRep {
    pub id: u64,
    pub matrix: LorentzMatrix,
    pub ell0: f64,
}

pub fn frac_mod1(r: Rational64) -> Rational64 {
    let one = Rational64::one();
    let mut v = r - (r.floor());
    if v >= one {
        v -= one;
    }
    v
}

impl SpinCLengthSpectrum {
    pub fn validate(&self) -> Result<()> {
        let mut prev = 0.0;
        for e in &self.entries {
            if e.ell <= 0.0 || e.ell > self.cutoff_r + 1e-9 {
                return Err(Error::Validation(format!(
                    "entry {} length {} outside (0, {}]",
                    e.class_id, e.ell, self.cutoff_r
                )));
            }
            if e.ell0 > e.ell + 1e-9 {
                return Err(Error::Validation(format!(
                    "entry {} primitive length exceeds length",
                    e.class_id
                )));
            }
            let ratio = e.ell / e.ell0;
            if (ratio - ratio.round()).abs() > 1e-6 {
                return Err(Error::Validation(format!(
                    "entry {} length is not a multiple of its primitive length",
                    e.class_id
                )));
            }
            if e.ell < prev - 1e-12 {
                return Err(Error::Validation("entries not sorted by length".into()));
            }
            prev = e.ell;
        }
        Ok(())
    }
}

/// Solves for sign flips of the initial SL2 lifts making every relation word
/// evaluate to +identity; linear algebra over GF(2) with free variables 0.
pub fn solve_spin_lift(p: &Presentation, initial_lifts: &[GElement]) -> Result<SpinLift> {
    if initial_lifts.len() != p.n_generators {
        return Err(Error::Validation("lift count does not match generator count".into()));
    }
    for g in initial_lifts {
        g.validate(1e-6)?;
    }
    let n = p.n_generators;
    // rows: [coefficients | rhs] packed as bits in Vec<u8>
    let mut rows: Vec<(Vec<u8>, u8)> = Vec::new();
    for (ri, rel) in p.relations.iter().enumerate() {
        let mut prod = GElement::identity();
        let mut coeff = vec![0u8; n];
        for &l in &rel.letters {
            if l >= n {
                return Err(Error::Validation(format!("relation {ri} letter {l} out of range")));
            }
            prod = prod.mul(&initial_lifts[l]);
            coeff[l] ^= 1;
        }
        let d_plus = (prod.m - GElement::identity().m).map(|c| c.norm()).max();
        let d_minus = (prod.m + GElement::identity().m).map(|c| c.norm()).max();
        let rhs = if d_plus < 1e-6 {
            0u8
        } else if d_minus < 1e-6 {
            1u8
        } else {
            return Err(Error::BadRelation { index: ri, residual: d_plus.min(d_minus) });
        };
        rows.push((coeff, rhs));
    }
    // Gaussian elimination over GF(2)
    let mut pivot_of_col = vec![usize::MAX; n];
    let mut rank = 0;
    for col in 0..n {
        let Some(pr) = (rank..rows.len()).find(|&r| rows[r].0[col] == 1) else {
            continue;
        };
        rows.swap(rank, pr);
        let (pivot_row, pivot_rhs) = (rows[rank].0.clone(), rows[rank].1);
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.0[col] == 1 {
                for j in 0..n {
                    row.0[j] ^= pivot_row[j];
                }
                row.1 ^= pivot_rhs;
            }
        }
        pivot_of_col[col] = rank;
        rank += 1;
    }
    for row in &rows[rank..] {
        if row.1 == 1 {
            return Err(Error::InconsistentSpinSystem);
        }
    }
    let mut signs = vec![0u8; n];
    for col in 0..n {
        if pivot_of_col[col] != usize::MAX {
            // free variables are 0, so the pivot value is just the rhs
            signs[col] = rows[pivot_of_col[col]].1;
        }
    }
    let lifts = initial_lifts
        .iter()
        .zip(&signs)
        .map(|(g, &s)| if s == 1 { g.neg() } else { *g })
        .collect();
    Ok(SpinLift { generator_lifts: lifts, signs, solution_dimension: n - rank })
}

/// U M V = D with U, V unimodular and d_i | d_{i+1}, in exact big integers.
pub fn smith_normal_form(
    m: &[Vec<BigInt>],
) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    let mut d: Vec<Vec<BigInt>> = m.to_vec();
    let mut u: Vec<Vec<BigInt>> = identity(rows);
    let mut v: Vec<Vec<BigInt>> = identity(cols);

    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: minimal absolute nonzero value in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !d[i][j].is_zero()
                    && pivot.map_or(true, |(pi, pj)| d[i][j].abs() < d[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);
        // clear the pivot row and column
        let mut clean = true;
        for i in t + 1..rows {
            if !d[i][t].is_zero() {
                let q = div_round(&d[i][t], &d[t][t]);
                row_sub(&mut d, i, t, &q);
                row_sub(&mut u, i, t, &q);
                if !d[i][t].is_zero() {
                    clean = false;
                }
            }
        }
        for j in t + 1..cols {
            if !d[t][j].is_zero() {
                let q = div_round(&d[t][j], &d[t][t]);
                col_sub(&mut d, j, t, &q);
                col_sub(&mut v, j, t, &q);
                if !d[t][j].is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue;
        }
        // enforce divisibility d_t | everything below-right
        let mut fixed = true;
        'scan: for i in t + 1..rows {
            for j in t + 1..cols {
                if !(&d[i][j] % &d[t][t]).is_zero() {
                    // fold row i into row t and restart this pivot
                    let one = BigInt::one();
                    for jj in 0..cols {
                        let val = d[i][jj].clone() * &one;
                        d[t][jj] += val;
                    }
                    for jj in 0..rows {
                        let val = u[i][jj].clone() * &one;
                        u[t][jj] += val;
                    }
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if !fixed {
            continue;
        }
        if d[t][t].is_negative() {
            for j in 0..cols {
                d[t][j] = -d[t][j].clone();
            }
            for j in 0..rows {
                u[t][j] = -u[t][j].clone();
            }
        }
        t += 1;
    }
    (u, d, v)
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

fn swap_cols(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

fn row_sub(m: &mut [Vec<BigInt>], i: usize, t: usize, q: &BigInt) {
    let trow = m[t].clone();
    for (x, tv) in m[i].iter_mut().zip(trow.iter()) {
        *x -= q * tv;
    }
}

fn col_sub(m: &mut [Vec<BigInt>], j: usize, t: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let tv = row[t].clone();
        row[j] -= q * tv;
    }
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // quotient minimizing |a - q b|
    let q = a / b;
    let r = a - &q * b;
    if &r.abs() * 2 > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

pub fn invariant_factors(d: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = d.len().min(if d.is_empty() { 0 } else { d[0].len() });
    (0..n).map(|i| d[i][i].clone()).collect()
}

/// Abelianized relation matrix: one row per relation, one column per
/// generator, entry = letter count.
pub fn relation_matrix(p: &Presentation) -> Vec<Vec<BigInt>> {
    let mut m = vec![vec![BigInt::zero(); p.n_generators]; p.relations.len()];
    for (ri, rel) in p.relations.iter().enumerate() {
        for &l in &rel.letters {
            m[ri][l] += 1;
        }
    }
    m
}

/// All homomorphisms from the abelianization to Q/Z, zero character first,
/// then mixed-radix lexicographic in the Smith coordinates.
pub fn enumerate_characters(p: &Presentation) -> Result<Vec<TwistCharacter>> {
    let m = relation_matrix(p);
    let (_u, d, v) = smith_normal_form(&m);
    let n = p.n_generators;
    let facs = invariant_factors(&d);
    if facs.len() < n || facs.iter().any(|f| f.is_zero()) {
        return Err(Error::PositiveB1);
    }
    let d_i: Vec<i64> = facs
        .iter()
        .map(|f| i64::try_from(f).map_err(|_| Error::Validation("invariant factor overflow".into())))
        .collect::<Result<_>>()?;
    let total: i64 = d_i.iter().product();
    let mut out = Vec::with_capacity(total as usize);
    for idx in 0..total {
        let mut rem = idx;
        // digits, least significant on the last factor
        let mut digits = vec![0i64; n];
        for i in (0..n).rev() {
            digits[i] = rem % d_i[i];
            rem /= d_i[i];
        }
        let smith_vals: Vec<Rational64> =
            (0..n).map(|i| Rational64::new(digits[i], d_i[i])).collect();
        // phi(e_j) = sum_i V[j][i] y_i mod 1; only V mod d_i matters
        let gen_vals: Vec<Rational64> = (0..n)
            .map(|j| {
                let mut acc = Rational64::zero();
                for i in 0..n {
                    if d_i[i] > 1 && digits[i] != 0 {
                        let vm = ((&v[j][i] % d_i[i]) + d_i[i]) % d_i[i];
                        let vm = i64::try_from(vm).unwrap();
                        acc += Rational64::new(vm * digits[i], d_i[i]);
                    }
                }
                frac_mod1(acc)
            })
            .collect();
        out.push(TwistCharacter { smith_basis_values: smith_vals, generator_values: gen_vals });
    }
    Ok(out)
}

/// Reduces each representative to a word, takes the signed-lift product for
/// (ell, theta), and sums the character over the word's letters for phi.
pub fn assemble_spectrum(
    domain: &DirichletDomain,
    lift: &SpinLift,
    chi: &TwistCharacter,
    reps: &[ClassRep],
    cutoff: f64,
) -> Result<SpinCLengthSpectrum> {
    let mut entries = Vec::with_capacity(reps.len());
    for rep in reps {
        let word = reduce(domain, &rep.matrix)
            .map_err(|e| Error::Validation(format!("class {}: {e}", rep.id)))?;
        let entry = spectrum_entry(lift, chi, rep.id, &word, rep.ell0)
            .map_err(|e| Error::Validation(format!("class {}: {e}", rep.id)))?;
        if entry.ell <= cutoff + 1e-9 {
            entries.push(entry);
        }
    }
    entries.sort_by(|a, b| a.ell.total_cmp(&b.ell).then(a.class_id.cmp(&b.class_id)));
    let s = SpinCLengthSpectrum {
        cutoff_r: cutoff,
        entries,
        manifold_volume: domain.volume,
    };
    s.validate()?;
    Ok(s)
}

/// Spectrum record for a class already expressed as a word.
pub fn spectrum_entry(
    lift: &SpinLift,
    chi: &TwistCharacter,
    id: u64,
    word: &GroupWord,
    ell0: f64,
) -> Result<SpectrumEntry> {
    let mut g = GElement::identity();
    let mut phi = Rational64::zero();
    for &l in &word.letters {
        g = g.mul(&lift.generator_lifts[l]);
        phi += chi.generator_values[l];
    }
    let cd = conjugacy_normal_form(&g)?;
    Ok(SpectrumEntry { class_id: id, ell: cd.ell, ell0, theta: cd.theta, phi: frac_mod1(phi) })
}

/// Initial SL2 lifts of a domain's face pairings via the conversion map.
pub fn initial_lifts(domain: &DirichletDomain) -> Result<Vec<GElement>> {
    domain.face_pairings.iter().map(lorentz_to_moebius).collect()
}
