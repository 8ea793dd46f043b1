//! Line-oriented, versioned text formats for domains, geodesic classes,
//! spin^c spectra, CW presentations, eigenvalue windows, and manifest files,
//! plus report emission. Floats are serialized at 17 significant digits so
//! round trips are lossless.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Matrix4, Vector4};
use num_rational::Rational64;

use crate::dirichlet::{DirichletDomain, GroupWord};
use crate::error::{Error, Result};
use crate::eta::EigenvalueWindow;
use crate::geom::{HyperboloidPoint, LorentzMatrix};
use crate::spinc::{SpectrumEntry, SpinCLengthSpectrum};
use crate::linking::CWPresentation;
use crate::trace::Sign;

/// A geodesic conjugacy class recorded as a reduced word in the face
/// pairings.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassWord {
    pub id: u64,
    pub ell: f64,
    pub ell0: f64,
    pub word: GroupWord,
}

/// One spin^c class entry of a manifest: the twisting character in Smith
/// coordinates and the first-Chern class on the linking basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifestClass {
    pub label: String,
    pub spin: bool,
    pub character: Vec<Rational64>,
    pub x: Vec<i64>,
    pub windows_file: String,
}

/// Resolved windows plus counted tail ranges for the spectral error budget.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WindowsFile {
    pub windows: Vec<EigenvalueWindow>,
    /// (lower, upper, count) ranges treated only through tail bounds
    pub tails: Vec<(f64, f64, u32)>,
}

/// Top-level fixture description.
#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub cs: Rational64,
    pub tau: i64,
    pub volume: f64,
    pub cutoff: f64,
    /// geodesic-sum bound, zero-eigenvalue bound, sinc floor for the refined
    /// density
    pub density: (f64, f64, f64),
    pub domain_file: String,
    pub classes_file: String,
    pub cw_file: String,
    pub sign_windows_file: String,
    pub classes: Vec<ManifestClass>,
}

/// Run parameters shared by the CLI commands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub l: f64,
    pub cut: f64,
    pub gaussian_c: f64,
    pub tolerance: f64,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { l: 1.7, cut: 7.5, gaussian_c: 1.0, tolerance: 1e-9, parallel: false }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.l <= 0.0 || self.cut <= 0.0 || self.gaussian_c <= 0.0 || self.tolerance <= 0.0 {
            return Err(Error::Validation("run parameters must be positive".into()));
        }
        Ok(())
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct Parser<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, header: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(i, l)| *i == 1 || (!l.is_empty() && !l.starts_with('#')))
            .collect();
        let Some(&(_, first)) = lines.first() else {
            return Err(Error::Parse { line: 1, msg: "empty file".into() });
        };
        if first != header {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header '{header}', found '{first}'"),
            });
        }
        Ok(Parser { lines, pos: 1 })
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let line = self.lines.get(self.pos).or(self.lines.last()).map_or(0, |&(n, _)| n);
        Error::Parse { line, msg: msg.into() }
    }

    fn next_record(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let Some(&(_, line)) = self.lines.get(self.pos) else {
            return Err(self.err(format!("missing '{key}' record")));
        };
        let mut fields = line.split_whitespace();
        let head = fields.next().unwrap_or("");
        if head != key {
            return Err(self.err(format!("expected '{key}' record, found '{head}'")));
        }
        self.pos += 1;
        Ok(fields.collect())
    }

    fn peek_key(&self) -> Option<&'a str> {
        self.lines.get(self.pos).and_then(|&(_, l)| l.split_whitespace().next())
    }

    fn done(&self) -> Result<()> {
        if self.pos < self.lines.len() {
            return Err(self.err("trailing content"));
        }
        Ok(())
    }

    fn parse_f64(&self, s: &str) -> Result<f64> {
        s.parse().map_err(|_| self.err(format!("bad float '{s}'")))
    }

    fn parse_usize(&self, s: &str) -> Result<usize> {
        s.parse().map_err(|_| self.err(format!("bad integer '{s}'")))
    }

    fn parse_i64(&self, s: &str) -> Result<i64> {
        s.parse().map_err(|_| self.err(format!("bad integer '{s}'")))
    }

    fn parse_rational(&self, s: &str) -> Result<Rational64> {
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let n: i64 = n.parse().map_err(|_| self.err(format!("bad rational '{s}'")))?;
        let d: i64 = d.parse().map_err(|_| self.err(format!("bad rational '{s}'")))?;
        if d == 0 {
            return Err(self.err(format!("zero denominator in '{s}'")));
        }
        Ok(Rational64::new(n, d))
    }

    fn floats(&self, fields: &[&str], n: usize) -> Result<Vec<f64>> {
        if fields.len() != n {
            return Err(self.err(format!("expected {n} fields, found {}", fields.len())));
        }
        fields.iter().map(|s| self.parse_f64(s)).collect()
    }
}

pub fn serialize_domain(d: &DirichletDomain) -> String {
    let mut out = String::from("# spineta domain v1\n");
    let c = d.center.coords;
    writeln!(out, "center {} {} {} {}", fmt_f64(c[0]), fmt_f64(c[1]), fmt_f64(c[2]), fmt_f64(c[3]))
        .unwrap();
    writeln!(out, "volume {}", fmt_f64(d.volume)).unwrap();
    writeln!(out, "faces {}", d.face_pairings.len()).unwrap();
    for f in &d.face_pairings {
        let row: Vec<String> = f.m.transpose().iter().map(|&v| fmt_f64(v)).collect();
        writeln!(out, "face {}", row.join(" ")).unwrap();
    }
    let inv: Vec<String> = d.inverse_index.iter().map(|i| i.to_string()).collect();
    writeln!(out, "inverse {}", inv.join(" ")).unwrap();
    writeln!(out, "cycles {}", d.edge_cycles.len()).unwrap();
    for c in &d.edge_cycles {
        let w: Vec<String> = c.letters.iter().map(|l| l.to_string()).collect();
        writeln!(out, "cycle {}", w.join(" ")).unwrap();
    }
    out
}

pub fn parse_domain_str(text: &str) -> Result<DirichletDomain> {
    let mut p = Parser::new(text, "# spineta domain v1")?;
    let c = p.next_record("center")?;
    let c = p.floats(&c, 4)?;
    let center = HyperboloidPoint::new(Vector4::new(c[0], c[1], c[2], c[3]))
        .map_err(|e| p.err(e.to_string()))?;
    let v = p.next_record("volume")?;
    let volume = p.floats(&v, 1)?[0];
    let n = p.next_record("faces")?;
    if n.len() != 1 {
        return Err(p.err("faces record takes one count"));
    }
    let n = p.parse_usize(n[0])?;
    let mut face_pairings = Vec::with_capacity(n);
    for _ in 0..n {
        let f = p.next_record("face")?;
        let vals = p.floats(&f, 16)?;
        face_pairings.push(LorentzMatrix { m: Matrix4::from_row_slice(&vals) });
    }
    let inv = p.next_record("inverse")?;
    if inv.len() != n {
        return Err(p.err(format!("inverse record needs {n} indices")));
    }
    let inverse_index: Vec<usize> =
        inv.iter().map(|s| p.parse_usize(s)).collect::<Result<_>>()?;
    let k = p.next_record("cycles")?;
    if k.len() != 1 {
        return Err(p.err("cycles record takes one count"));
    }
    let k = p.parse_usize(k[0])?;
    let mut edge_cycles = Vec::with_capacity(k);
    for _ in 0..k {
        let cyc = p.next_record("cycle")?;
        let letters: Vec<usize> = cyc.iter().map(|s| p.parse_usize(s)).collect::<Result<_>>()?;
        edge_cycles.push(GroupWord { letters });
    }
    p.done()?;
    let d = DirichletDomain { center, face_pairings, inverse_index, edge_cycles, volume };
    d.validate(1e-7)?;
    Ok(d)
}

pub fn serialize_classes(classes: &[ClassWord]) -> String {
    let mut out = String::from("# spineta classes v1\n");
    writeln!(out, "count {}", classes.len()).unwrap();
    for c in classes {
        let w: Vec<String> = c.word.letters.iter().map(|l| l.to_string()).collect();
        writeln!(out, "class {} {} {} {}", c.id, fmt_f64(c.ell), fmt_f64(c.ell0), w.join(" "))
            .unwrap();
    }
    out
}

pub fn parse_classes_str(text: &str) -> Result<Vec<ClassWord>> {
    let mut p = Parser::new(text, "# spineta classes v1")?;
    let n = p.next_record("count")?;
    if n.len() != 1 {
        return Err(p.err("count record takes one value"));
    }
    let n = p.parse_usize(n[0])?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let f = p.next_record("class")?;
        if f.len() < 4 {
            return Err(p.err("class record needs id, lengths, and a word"));
        }
        let id: u64 = f[0].parse().map_err(|_| p.err(format!("bad id '{}'", f[0])))?;
        let ell = p.parse_f64(f[1])?;
        let ell0 = p.parse_f64(f[2])?;
        let letters: Vec<usize> = f[3..].iter().map(|s| p.parse_usize(s)).collect::<Result<_>>()?;
        if ell <= 0.0 || ell0 <= 0.0 || ell0 > ell + 1e-9 {
            return Err(p.err(format!("inconsistent lengths {ell}, {ell0}")));
        }
        out.push(ClassWord { id, ell, ell0, word: GroupWord { letters } });
    }
    p.done()?;
    for w in out.windows(2) {
        if w[1].ell < w[0].ell {
            return Err(Error::Validation("class lengths not ascending".into()));
        }
    }
    Ok(out)
}

pub fn serialize_spectrum(s: &SpinCLengthSpectrum) -> String {
    let mut out = String::from("# spineta spectrum v1\n");
    writeln!(out, "cutoff {}", fmt_f64(s.cutoff_r)).unwrap();
    writeln!(out, "volume {}", fmt_f64(s.manifold_volume)).unwrap();
    for e in &s.entries {
        writeln!(
            out,
            "entry {} {} {} {} {}/{}",
            e.class_id,
            fmt_f64(e.ell),
            fmt_f64(e.ell0),
            fmt_f64(e.theta),
            e.phi.numer(),
            e.phi.denom()
        )
        .unwrap();
    }
    out
}

pub fn parse_spectrum_str(text: &str) -> Result<SpinCLengthSpectrum> {
    let mut p = Parser::new(text, "# spineta spectrum v1")?;
    let c = p.next_record("cutoff")?;
    let cutoff_r = p.floats(&c, 1)?[0];
    let v = p.next_record("volume")?;
    let manifold_volume = p.floats(&v, 1)?[0];
    let mut entries = Vec::new();
    while p.peek_key() == Some("entry") {
        let f = p.next_record("entry")?;
        if f.len() != 5 {
            return Err(p.err("entry record needs 5 fields"));
        }
        let class_id: u64 = f[0].parse().map_err(|_| p.err(format!("bad id '{}'", f[0])))?;
        entries.push(SpectrumEntry {
            class_id,
            ell: p.parse_f64(f[1])?,
            ell0: p.parse_f64(f[2])?,
            theta: p.parse_f64(f[3])?,
            phi: p.parse_rational(f[4])?,
        });
    }
    p.done()?;
    let s = SpinCLengthSpectrum { cutoff_r, entries, manifold_volume };
    s.validate()?;
    Ok(s)
}

pub fn serialize_cw(p: &CWPresentation) -> String {
    let mut out = String::from("# spineta cw v1\n");
    writeln!(out, "edges {}", p.edge_labels.join(" ")).unwrap();
    let ints = |row: &[i64]| row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    for row in &p.face_boundaries {
        writeln!(out, "boundary {}", ints(row)).unwrap();
    }
    for row in &p.dual_intersections {
        writeln!(out, "intersect {}", ints(row)).unwrap();
    }
    for row in &p.dual_curve_classes {
        writeln!(out, "dualclass {}", ints(row)).unwrap();
    }
    writeln!(out, "basis {}", ints(&p.basis.iter().map(|&b| b as i64).collect::<Vec<_>>()))
        .unwrap();
    out
}

pub fn parse_cw_str(text: &str) -> Result<CWPresentation> {
    let mut p = Parser::new(text, "# spineta cw v1")?;
    let labels = p.next_record("edges")?;
    let edge_labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
    let ints = |p: &Parser, fields: &[&str]| -> Result<Vec<i64>> {
        fields.iter().map(|s| p.parse_i64(s)).collect()
    };
    let mut face_boundaries = Vec::new();
    while p.peek_key() == Some("boundary") {
        let f = p.next_record("boundary")?;
        face_boundaries.push(ints(&p, &f)?);
    }
    let mut dual_intersections = Vec::new();
    while p.peek_key() == Some("intersect") {
        let f = p.next_record("intersect")?;
        dual_intersections.push(ints(&p, &f)?);
    }
    let mut dual_curve_classes = Vec::new();
    while p.peek_key() == Some("dualclass") {
        let f = p.next_record("dualclass")?;
        dual_curve_classes.push(ints(&p, &f)?);
    }
    let b = p.next_record("basis")?;
    let basis: Vec<usize> = b.iter().map(|s| p.parse_usize(s)).collect::<Result<_>>()?;
    p.done()?;
    let cw = CWPresentation {
        edge_labels,
        face_boundaries,
        dual_intersections,
        dual_curve_classes,
        basis,
    };
    cw.validate()?;
    Ok(cw)
}

pub fn serialize_windows(wf: &WindowsFile) -> String {
    let mut out = String::from("# spineta windows v1\n");
    for w in &wf.windows {
        let sign = match w.sign {
            Sign::Plus => "+",
            Sign::Minus => "-",
            Sign::Unsigned => "?",
        };
        let mode = if w.averaged { "avg" } else { "mid" };
        writeln!(
            out,
            "window {} {} {} {} {}",
            fmt_f64(w.lower),
            fmt_f64(w.upper),
            w.multiplicity,
            sign,
            mode
        )
        .unwrap();
    }
    for &(lo, hi, count) in &wf.tails {
        writeln!(out, "tail {} {} {}", fmt_f64(lo), fmt_f64(hi), count).unwrap();
    }
    out
}

pub fn parse_windows_str(text: &str) -> Result<WindowsFile> {
    let mut p = Parser::new(text, "# spineta windows v1")?;
    let mut out = WindowsFile::default();
    while p.peek_key() == Some("window") {
        let f = p.next_record("window")?;
        if f.len() != 5 {
            return Err(p.err("window record needs 5 fields"));
        }
        let lower = p.parse_f64(f[0])?;
        let upper = p.parse_f64(f[1])?;
        let multiplicity = p.parse_usize(f[2])? as u32;
        let sign = match f[3] {
            "+" => Sign::Plus,
            "-" => Sign::Minus,
            "?" => Sign::Unsigned,
            s => return Err(p.err(format!("bad sign '{s}'"))),
        };
        let averaged = match f[4] {
            "mid" => false,
            "avg" => true,
            s => return Err(p.err(format!("bad window mode '{s}'"))),
        };
        let w = EigenvalueWindow::new(lower, upper, multiplicity, sign)
            .map_err(|e| p.err(e.to_string()))?;
        out.windows.push(EigenvalueWindow { averaged, ..w });
    }
    while p.peek_key() == Some("tail") {
        let f = p.next_record("tail")?;
        if f.len() != 3 {
            return Err(p.err("tail record needs 3 fields"));
        }
        let lo = p.parse_f64(f[0])?;
        let hi = p.parse_f64(f[1])?;
        let count = p.parse_usize(f[2])? as u32;
        if !(0.0 <= lo && lo <= hi) {
            return Err(p.err(format!("bad tail range [{lo}, {hi}]")));
        }
        out.tails.push((lo, hi, count));
    }
    p.done()?;
    Ok(out)
}

pub fn serialize_manifest(m: &Manifest) -> String {
    let mut out = String::from("# spineta manifest v1\n");
    writeln!(out, "cs {}/{}", m.cs.numer(), m.cs.denom()).unwrap();
    writeln!(out, "tau {}", m.tau).unwrap();
    writeln!(out, "volume {}", fmt_f64(m.volume)).unwrap();
    writeln!(out, "cutoff {}", fmt_f64(m.cutoff)).unwrap();
    writeln!(
        out,
        "density {} {} {}",
        fmt_f64(m.density.0),
        fmt_f64(m.density.1),
        fmt_f64(m.density.2)
    )
    .unwrap();
    writeln!(out, "domain {}", m.domain_file).unwrap();
    writeln!(out, "classes {}", m.classes_file).unwrap();
    writeln!(out, "cw {}", m.cw_file).unwrap();
    writeln!(out, "signwindows {}", m.sign_windows_file).unwrap();
    for c in &m.classes {
        let chi: Vec<String> =
            c.character.iter().map(|r| format!("{}/{}", r.numer(), r.denom())).collect();
        let x: Vec<String> = c.x.iter().map(|v| v.to_string()).collect();
        writeln!(
            out,
            "class {} {} chi {} x {} windows {}",
            c.label,
            if c.spin { "spin" } else { "nonspin" },
            chi.join(" "),
            x.join(" "),
            c.windows_file
        )
        .unwrap();
    }
    out
}

pub fn parse_manifest_str(text: &str) -> Result<Manifest> {
    let mut p = Parser::new(text, "# spineta manifest v1")?;
    let cs = p.next_record("cs")?;
    if cs.len() != 1 {
        return Err(p.err("cs record takes one rational"));
    }
    let cs = p.parse_rational(cs[0])?;
    let tau = p.next_record("tau")?;
    if tau.len() != 1 {
        return Err(p.err("tau record takes one integer"));
    }
    let tau = p.parse_i64(tau[0])?;
    let v = p.next_record("volume")?;
    let volume = p.floats(&v, 1)?[0];
    let c = p.next_record("cutoff")?;
    let cutoff = p.floats(&c, 1)?[0];
    let d = p.next_record("density")?;
    let d = p.floats(&d, 3)?;
    let density = (d[0], d[1], d[2]);
    let one = |p: &mut Parser, key: &str| -> Result<String> {
        let f = p.next_record(key)?;
        if f.len() != 1 {
            return Err(p.err(format!("{key} record takes one path")));
        }
        Ok(f[0].to_string())
    };
    let domain_file = one(&mut p, "domain")?;
    let classes_file = one(&mut p, "classes")?;
    let cw_file = one(&mut p, "cw")?;
    let sign_windows_file = one(&mut p, "signwindows")?;
    let mut classes = Vec::new();
    while p.peek_key() == Some("class") {
        let f = p.next_record("class")?;
        let mut it = f.iter().peekable();
        let label = it.next().ok_or_else(|| p.err("class record needs a label"))?.to_string();
        let spin = match it.next() {
            Some(&"spin") => true,
            Some(&"nonspin") => false,
            _ => return Err(p.err("class record needs spin|nonspin")),
        };
        if it.next() != Some(&"chi") {
            return Err(p.err("class record needs a chi section"));
        }
        let mut character = Vec::new();
        while it.peek().map_or(false, |s| **s != "x") {
            character.push(p.parse_rational(it.next().unwrap())?);
        }
        if it.next() != Some(&"x") {
            return Err(p.err("class record needs an x section"));
        }
        let mut x = Vec::new();
        while it.peek().map_or(false, |s| **s != "windows") {
            x.push(p.parse_i64(it.next().unwrap())?);
        }
        if it.next() != Some(&"windows") {
            return Err(p.err("class record needs a windows file"));
        }
        let windows_file =
            it.next().ok_or_else(|| p.err("class record needs a windows path"))?.to_string();
        if it.next().is_some() {
            return Err(p.err("trailing fields in class record"));
        }
        classes.push(ManifestClass { label, spin, character, x, windows_file });
    }
    p.done()?;
    Ok(Manifest {
        cs,
        tau,
        volume,
        cutoff,
        density,
        domain_file,
        classes_file,
        cw_file,
        sign_windows_file,
        classes,
    })
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(Error::Io)
}

pub fn parse_domain(path: &Path) -> Result<DirichletDomain> {
    parse_domain_str(&read_to_string(path)?)
}

pub fn parse_classes(path: &Path) -> Result<Vec<ClassWord>> {
    parse_classes_str(&read_to_string(path)?)
}

pub fn parse_spectrum(path: &Path) -> Result<SpinCLengthSpectrum> {
    parse_spectrum_str(&read_to_string(path)?)
}

pub fn parse_cw(path: &Path) -> Result<CWPresentation> {
    parse_cw_str(&read_to_string(path)?)
}

pub fn parse_windows(path: &Path) -> Result<WindowsFile> {
    parse_windows_str(&read_to_string(path)?)
}

pub fn parse_manifest(path: &Path) -> Result<Manifest> {
    parse_manifest_str(&read_to_string(path)?)
}

/// Deterministic key/value report grouped into titled sections.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub sections: Vec<(String, Vec<(String, String)>)>,
}

impl Report {
    pub fn section(&mut self, title: impl Into<String>) -> &mut Vec<(String, String)> {
        self.sections.push((title.into(), Vec::new()));
        &mut self.sections.last_mut().unwrap().1
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        if self.sections.is_empty() {
            self.sections.push(("report".into(), Vec::new()));
        }
        self.sections.last_mut().unwrap().1.push((key.into(), value.into()));
    }

    pub fn push_f64(&mut self, key: impl Into<String>, value: f64) {
        self.push(key, fmt_f64(value));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (title, rows) in &self.sections {
            writeln!(out, "[{title}]").unwrap();
            for (k, v) in rows {
                writeln!(out, "{k} = {v}").unwrap();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::sample;
    use crate::linking::sample as cw_sample;

    #[test]
    fn domain_round_trip() {
        let d = sample::domain();
        let text = serialize_domain(&d);
        let d2 = parse_domain_str(&text).unwrap();
        assert_eq!(serialize_domain(&d2), text);
        assert_eq!(d2.inverse_index, d.inverse_index);
        assert_eq!(d2.volume, d.volume);
        for (a, b) in d.face_pairings.iter().zip(&d2.face_pairings) {
            assert_eq!(a.m, b.m);
        }
    }

    #[test]
    fn domain_parse_errors() {
        assert!(matches!(
            parse_domain_str("# wrong header\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        let d = sample::domain();
        let text = serialize_domain(&d);
        // drop the inverse section
        let truncated: String = text
            .lines()
            .filter(|l| !l.starts_with("inverse"))
            .map(|l| format!("{l}\n"))
            .collect();
        let err = parse_domain_str(&truncated).unwrap_err();
        assert!(err.to_string().contains("inverse"), "{err}");
        let bad = text.replacen("volume", "volume bogus", 1);
        assert!(parse_domain_str(&bad).is_err());
    }

    #[test]
    fn classes_round_trip_and_order() {
        let classes = vec![
            ClassWord { id: 0, ell: 1.5, ell0: 1.5, word: GroupWord { letters: vec![0, 3] } },
            ClassWord { id: 1, ell: 2.0, ell0: 1.0, word: GroupWord { letters: vec![1] } },
        ];
        let text = serialize_classes(&classes);
        assert_eq!(parse_classes_str(&text).unwrap(), classes);
        let swapped = serialize_classes(&[classes[1].clone(), classes[0].clone()]);
        assert!(parse_classes_str(&swapped).is_err());
    }

    #[test]
    fn spectrum_round_trip() {
        let s = SpinCLengthSpectrum {
            cutoff_r: 4.0,
            entries: vec![SpectrumEntry {
                class_id: 3,
                ell: 1.9927694256362732,
                ell0: 1.9927694256362732,
                theta: 0.3 * std::f64::consts::PI,
                phi: Rational64::new(2, 5),
            }],
            manifold_volume: 11.199064741253448,
        };
        let text = serialize_spectrum(&s);
        let s2 = parse_spectrum_str(&text).unwrap();
        assert_eq!(serialize_spectrum(&s2), text);
        assert_eq!(s2.entries[0].phi, Rational64::new(2, 5));
        assert_eq!(s2.entries[0].ell, s.entries[0].ell);
    }

    #[test]
    fn cw_round_trip() {
        let cw = cw_sample::dodecahedral();
        let text = serialize_cw(&cw);
        let cw2 = parse_cw_str(&text).unwrap();
        assert_eq!(serialize_cw(&cw2), text);
        assert_eq!(cw2.basis, cw.basis);
        assert_eq!(cw2.face_boundaries, cw.face_boundaries);
    }

    #[test]
    fn windows_round_trip() {
        let wf = WindowsFile {
            windows: vec![
                EigenvalueWindow::new(1.42787720680237, 1.43033743858337, 6, Sign::Plus)
                    .unwrap(),
                EigenvalueWindow {
                    averaged: true,
                    ..EigenvalueWindow::new(0.04, 0.41, 1, Sign::Unsigned).unwrap()
                },
            ],
            tails: vec![(2.0, 3.0, 22), (3.0, 4.0, 21)],
        };
        let text = serialize_windows(&wf);
        let wf2 = parse_windows_str(&text).unwrap();
        assert_eq!(wf2, wf);
        assert!(parse_windows_str("# spineta windows v1\nwindow 1 2 0 + mid\n").is_err());
        assert!(parse_windows_str("# spineta windows v1\ntail 3 2 5\n").is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let m = Manifest {
            cs: Rational64::new(-1, 30),
            tau: 0,
            volume: 11.199064741253448,
            cutoff: 7.5,
            density: (4.827, 0.0055, 0.777),
            domain_file: "domain.txt".into(),
            classes_file: "classes.txt".into(),
            cw_file: "cw.txt".into(),
            sign_windows_file: "windows_sign.txt".into(),
            classes: vec![ManifestClass {
                label: "spin".into(),
                spin: true,
                character: vec![
                    Rational64::new(0, 1),
                    Rational64::new(0, 1),
                    Rational64::new(0, 1),
                ],
                x: vec![0, 0, 0],
                windows_file: "windows_spin.txt".into(),
            }],
        };
        let text = serialize_manifest(&m);
        let m2 = parse_manifest_str(&text).unwrap();
        assert_eq!(m2, m);
        assert_eq!(serialize_manifest(&m2), text);
    }

    #[test]
    fn report_rendering_is_deterministic() {
        let mut r = Report::default();
        r.section("weyl");
        r.push_f64("a", 18.690743399506506);
        r.push("c", "637");
        let one = r.render();
        assert_eq!(one, r.render());
        assert!(one.starts_with("[weyl]\n"));
        assert!(one.contains("a = 1.8690743399506506e1"));
    }

    #[test]
    fn run_config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = RunConfig { l: 0.0, ..RunConfig::default() };
        assert!(bad.validate().is_err());
    }
}
