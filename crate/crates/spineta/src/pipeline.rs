//! End-to-end orchestration: load a fixture directory, lift the face
//! pairings, evaluate the sign and per-class Dirac eta estimates, and round
//! to the Froyshov table.

use std::path::{Path, PathBuf};

use num_rational::Rational64;
use num_traits::Zero;

use crate::bounds::{eta_geometric_tail, eta_spectral_tail, geodesic_chebyshev_bound, refined_density};
use crate::dirichlet::DirichletDomain;
use crate::error::{Error, Result};
use crate::eta::{
    chern_simons_constraint, eta_geometric_partial, eta_spectral_partial, froyshov,
    round_to_admissible, sign_disambiguation, AdmissibleRational, EigenvalueWindow, EtaEstimate,
    EtaKind, SignContext,
};
use crate::io::{self, ClassWord, Manifest, WindowsFile};
use crate::linking::{linking_form, CWPresentation, LinkingForm};
use crate::spinc::{
    enumerate_characters, initial_lifts, solve_spin_lift, spectrum_entry, Presentation,
    SpinCLengthSpectrum, SpinLift, TwistCharacter,
};
use crate::testfn::TestFunction;
use crate::trace::Sign;

/// A fully parsed fixture directory.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub manifest: Manifest,
    pub domain: DirichletDomain,
    pub classes: Vec<ClassWord>,
    pub cw: CWPresentation,
    pub sign_windows: WindowsFile,
    pub class_windows: Vec<WindowsFile>,
}

/// Fixture directory for a named manifold: $SPINETA_FIXTURES/<name> when the
/// environment variable is set, ./fixtures/<name> otherwise.
pub fn fixture_dir(name: &str) -> PathBuf {
    let base = std::env::var_os("SPINETA_FIXTURES")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fixtures"));
    base.join(name)
}

pub fn fixture_available(dir: &Path) -> bool {
    dir.join("manifest.txt").is_file()
}

pub fn load_fixture(dir: &Path) -> Result<Fixture> {
    let manifest = io::parse_manifest(&dir.join("manifest.txt"))?;
    let domain = io::parse_domain(&dir.join(&manifest.domain_file))?;
    let classes = io::parse_classes(&dir.join(&manifest.classes_file))?;
    let cw = io::parse_cw(&dir.join(&manifest.cw_file))?;
    let sign_windows = io::parse_windows(&dir.join(&manifest.sign_windows_file))?;
    let class_windows = manifest
        .classes
        .iter()
        .map(|c| io::parse_windows(&dir.join(&c.windows_file)))
        .collect::<Result<_>>()?;
    Ok(Fixture { manifest, domain, classes, cw, sign_windows, class_windows })
}

/// Group presentation carried by a domain: one generator per face pairing,
/// relations from edge cycles and the inverse pairing.
pub fn presentation_from_domain(domain: &DirichletDomain) -> Presentation {
    let mut relations = domain.edge_cycles.clone();
    for (i, &j) in domain.inverse_index.iter().enumerate() {
        if i <= j {
            relations.push(crate::dirichlet::GroupWord { letters: vec![i, j] });
        }
    }
    Presentation { n_generators: domain.face_pairings.len(), relations }
}

/// All twisting characters of the fixture's fundamental group.
pub fn characters(domain: &DirichletDomain) -> Result<Vec<TwistCharacter>> {
    enumerate_characters(&presentation_from_domain(domain))
}

fn check_character(p: &Presentation, values: &[Rational64]) -> Result<()> {
    if values.len() != p.n_generators {
        return Err(Error::Validation(format!(
            "character has {} values for {} generators",
            values.len(),
            p.n_generators
        )));
    }
    for (i, rel) in p.relations.iter().enumerate() {
        let total: Rational64 = rel.letters.iter().map(|&l| values[l]).sum();
        if !crate::spinc::frac_mod1(total).is_zero() {
            return Err(Error::Validation(format!("character does not kill relation {i}")));
        }
    }
    Ok(())
}

/// Spin^c length spectrum for one character, evaluated from the cached class
/// words.
pub fn spectrum_for_character(
    lift: &SpinLift,
    chi: &TwistCharacter,
    classes: &[ClassWord],
    cutoff: f64,
    volume: f64,
    parallel: bool,
) -> Result<SpinCLengthSpectrum> {
    let eval = |c: &ClassWord| -> Result<_> {
        let e = spectrum_entry(lift, chi, c.id, &c.word, c.ell0)?;
        if (e.ell - c.ell).abs() > 1e-6 * c.ell.max(1.0) {
            return Err(Error::Validation(format!(
                "class {}: word length {} disagrees with recorded {}",
                c.id, e.ell, c.ell
            )));
        }
        Ok(e)
    };
    let mut entries = if parallel && classes.len() > 1024 {
        let workers = std::thread::available_parallelism().map_or(2, |n| n.get()).min(8);
        let chunk = classes.len().div_ceil(workers);
        let mut parts: Vec<Result<Vec<_>>> = Vec::new();
        std::thread::scope(|s| {
            let handles: Vec<_> = classes
                .chunks(chunk)
                .map(|cs| s.spawn(move || cs.iter().map(eval).collect::<Result<Vec<_>>>()))
                .collect();
            for h in handles {
                parts.push(h.join().expect("worker panicked"));
            }
        });
        let mut all = Vec::with_capacity(classes.len());
        for p in parts {
            all.extend(p?);
        }
        all
    } else {
        classes.iter().map(eval).collect::<Result<Vec<_>>>()?
    };
    entries.retain(|e| e.ell <= cutoff + 1e-9);
    entries.sort_by(|a, b| a.ell.total_cmp(&b.ell).then(a.class_id.cmp(&b.class_id)));
    let s = SpinCLengthSpectrum { cutoff_r: cutoff, entries, manifold_volume: volume };
    s.validate()?;
    Ok(s)
}

/// Per-spin^c-class outcome.
#[derive(Clone, Debug)]
pub struct ClassResult {
    pub label: String,
    pub spin: bool,
    /// self-linking value constraining the fractional part of -2h
    pub lk: Rational64,
    pub dirac_geometric: f64,
    pub dirac: EtaEstimate,
    pub minus_two_h_central: f64,
    pub minus_two_h: Rational64,
    pub h: Rational64,
    pub resolved_sign: Option<Sign>,
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub eta_sign: EtaEstimate,
    pub eta_sign_rounded: Rational64,
    pub linking: LinkingForm,
    pub classes: Vec<ClassResult>,
}

fn tail_budget(
    fixture: &Fixture,
    config: &io::RunConfig,
    wf: &WindowsFile,
    length_spectrum: &SpinCLengthSpectrum,
) -> Result<(f64, f64)> {
    let m = &fixture.manifest;
    let density = refined_density(m.volume, m.density.0, m.density.1, m.density.2)?;
    let geo = eta_geometric_tail(config.l, config.cut, length_spectrum, |t| {
        geodesic_chebyshev_bound(t, 5.0, m.volume, &density, true)
    })?;
    let spec = eta_spectral_tail(config.l, &wf.tails)?;
    Ok((geo, spec))
}

/// Full run: sign eta, per-class Dirac eta with disambiguation, Froyshov
/// table.
pub fn run(fixture: &Fixture, config: &io::RunConfig) -> Result<PipelineResult> {
    config.validate()?;
    let m = &fixture.manifest;
    let p = presentation_from_domain(&fixture.domain);
    let lift = solve_spin_lift(&p, &initial_lifts(&fixture.domain)?)?;
    let g = TestFunction::gaussian(config.gaussian_c);

    // character-independent length data for the geometric tail
    let length_spectrum = SpinCLengthSpectrum {
        cutoff_r: m.cutoff,
        entries: fixture
            .classes
            .iter()
            .map(|c| crate::spinc::SpectrumEntry {
                class_id: c.id,
                ell: c.ell,
                ell0: c.ell0,
                theta: 0.0,
                phi: Rational64::zero(),
            })
            .collect(),
        manifold_volume: m.volume,
    };

    // sign eta with the trivial twist
    let trivial = TwistCharacter {
        smith_basis_values: vec![],
        generator_values: vec![Rational64::zero(); p.n_generators],
    };
    let sign_spectrum = spectrum_for_character(
        &lift,
        &trivial,
        &fixture.classes,
        m.cutoff,
        m.volume,
        config.parallel,
    )?;
    let sign_tails = tail_budget(fixture, config, &fixture.sign_windows, &length_spectrum)?;
    let truncate = |s: &SpinCLengthSpectrum| SpinCLengthSpectrum {
        cutoff_r: config.cut.min(s.cutoff_r),
        entries: s.entries.iter().copied().filter(|e| e.ell < config.cut).collect(),
        manifold_volume: s.manifold_volume,
    };
    // the sign sum needs no spin data, so it consumes every class the fixture
    // carries; config.cut only marks the radius certified by the tail bound,
    // which stays valid (conservatively) for the longer sum
    let sign_geom = eta_geometric_partial(&sign_spectrum, &g, config.l, EtaKind::Sign)?;
    let (sign_spec, sign_width) =
        eta_spectral_partial(&fixture.sign_windows.windows, &g, config.l)?;
    let eta_sign = EtaEstimate {
        central: sign_geom + sign_spec,
        err_geometric_tail: sign_tails.0,
        err_window_width: sign_width,
        err_spectral_tail: sign_tails.1,
    };
    let cs_lattice = chern_simons_constraint(m.cs, m.tau);
    let eta_sign_rounded = round_to_admissible(eta_sign.interval(), &cs_lattice)?;

    let linking = linking_form(&fixture.cw)?;

    let mut classes = Vec::with_capacity(m.classes.len());
    for (mc, wf) in m.classes.iter().zip(&fixture.class_windows) {
        check_character(&p, &mc.character)?;
        let chi = TwistCharacter {
            smith_basis_values: vec![],
            generator_values: mc.character.clone(),
        };
        let spectrum = spectrum_for_character(
            &lift,
            &chi,
            &fixture.classes,
            m.cutoff,
            m.volume,
            config.parallel,
        )?;
        let tails = tail_budget(fixture, config, wf, &length_spectrum)?;
        let (lk, admissible) = if mc.spin {
            (
                Rational64::zero(),
                AdmissibleRational::new(Rational64::zero(), Rational64::new(1, 4))?,
            )
        } else {
            let v = linking.eval(&mc.x, &mc.x);
            (v, AdmissibleRational::new(v, Rational64::new(1, 1))?)
        };
        // resolve unsigned windows against the admissible lattice
        let mut windows: Vec<EigenvalueWindow> =
            wf.windows.iter().copied().filter(|w| w.sign != Sign::Unsigned).collect();
        let mut resolved_sign = None;
        for w in wf.windows.iter().filter(|w| w.sign == Sign::Unsigned) {
            let ctx = SignContext {
                spectrum: &spectrum,
                g: &g,
                l: config.l,
                cut: config.cut,
                kind: EtaKind::Dirac,
                other_windows: &windows,
                tails,
                eta_sign: eta_sign_rounded,
                admissible,
            };
            let s = sign_disambiguation(w, &ctx)?;
            resolved_sign = Some(s);
            windows.push(EigenvalueWindow { sign: s, ..*w });
        }
        let trunc = truncate(&spectrum);
        let dirac_geometric = eta_geometric_partial(&trunc, &g, config.l, EtaKind::Dirac)?;
        let (spec_part, width) = eta_spectral_partial(&windows, &g, config.l)?;
        let dirac = EtaEstimate {
            central: dirac_geometric + spec_part,
            err_geometric_tail: tails.0,
            err_window_width: width,
            err_spectral_tail: tails.1,
        };
        let h = froyshov(eta_sign_rounded, dirac.interval(), &admissible)?;
        let minus_two_h = -h * Rational64::from_integer(2);
        let quarter = *eta_sign_rounded.numer() as f64 / *eta_sign_rounded.denom() as f64 / 4.0;
        classes.push(ClassResult {
            label: mc.label.clone(),
            spin: mc.spin,
            lk,
            dirac_geometric,
            dirac,
            minus_two_h_central: dirac.central + quarter,
            minus_two_h,
            h,
            resolved_sign,
        });
    }
    Ok(PipelineResult { eta_sign, eta_sign_rounded, linking, classes })
}

/// Render the run as a deterministic report.
pub fn report(result: &PipelineResult) -> io::Report {
    let mut r = io::Report::default();
    r.section("eta_sign");
    r.push_f64("central", result.eta_sign.central);
    r.push_f64("err_geometric_tail", result.eta_sign.err_geometric_tail);
    r.push_f64("err_window_width", result.eta_sign.err_window_width);
    r.push_f64("err_spectral_tail", result.eta_sign.err_spectral_tail);
    r.push("rounded", format!("{}", result.eta_sign_rounded));
    for c in &result.classes {
        r.section(format!("class {}", c.label));
        r.push("spin", if c.spin { "yes" } else { "no" });
        r.push("lk", format!("{}", c.lk));
        r.push_f64("dirac_geometric", c.dirac_geometric);
        r.push_f64("dirac_central", c.dirac.central);
        r.push_f64("error_budget", c.dirac.total_error());
        r.push_f64("minus_two_h_central", c.minus_two_h_central);
        if let Some(s) = c.resolved_sign {
            r.push("resolved_sign", format!("{s:?}"));
        }
        r.push("minus_two_h", format!("{}", c.minus_two_h));
        r.push("h", format!("{}", c.h));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::sample;
    use crate::io::{serialize_classes, serialize_cw, serialize_domain, serialize_manifest, serialize_windows, ManifestClass};
    use crate::linking::sample as cw_sample;
    use approx::assert_abs_diff_eq;

    fn write_fixture(dir: &Path) -> Fixture {
        let domain = sample::domain();
        // two short closed words with lengths computed through the lift
        let p = presentation_from_domain(&domain);
        let lift = solve_spin_lift(&p, &initial_lifts(&domain).unwrap()).unwrap();
        let trivial = TwistCharacter {
            smith_basis_values: vec![],
            generator_values: vec![Rational64::zero(); p.n_generators],
        };
        let words = [vec![0usize], vec![0, 2]];
        let mut classes = Vec::new();
        for (i, letters) in words.iter().enumerate() {
            let w = crate::dirichlet::GroupWord { letters: letters.clone() };
            let e = spectrum_entry(&lift, &trivial, i as u64, &w, 1.0).unwrap();
            classes.push(ClassWord { id: i as u64, ell: e.ell, ell0: e.ell, word: w });
        }
        classes.sort_by(|a, b| a.ell.total_cmp(&b.ell));
        for (i, c) in classes.iter_mut().enumerate() {
            c.id = i as u64;
        }
        // a genuine character of the sample presentation: kills the edge
        // cycles as well as the inverse pairs
        let chi: Vec<Rational64> = [2, 3, 0, 0, 3, 2, 0, 0, 4, 1, 1, 4]
            .iter()
            .map(|&v| Rational64::new(v, 5))
            .collect();
        let manifest = Manifest {
            cs: Rational64::new(-1, 30),
            tau: 0,
            volume: domain.volume,
            cutoff: 7.5,
            density: (4.827, 0.0055, 0.777),
            domain_file: "domain.txt".into(),
            classes_file: "classes.txt".into(),
            cw_file: "cw.txt".into(),
            sign_windows_file: "windows_sign.txt".into(),
            classes: vec![ManifestClass {
                label: "c2".into(),
                spin: false,
                character: chi,
                x: vec![1, 0, 0],
                windows_file: "windows_c2.txt".into(),
            }],
        };
        let sign_windows = WindowsFile {
            windows: vec![EigenvalueWindow::new(1.428, 1.430, 6, Sign::Plus).unwrap()],
            tails: vec![(2.0, 3.0, 22)],
        };
        let class_windows = WindowsFile {
            windows: vec![EigenvalueWindow::new(0.9, 1.0, 2, Sign::Plus).unwrap()],
            tails: vec![(2.0, 3.0, 12)],
        };
        std::fs::write(dir.join("manifest.txt"), serialize_manifest(&manifest)).unwrap();
        std::fs::write(dir.join("domain.txt"), serialize_domain(&domain)).unwrap();
        std::fs::write(dir.join("classes.txt"), serialize_classes(&classes)).unwrap();
        std::fs::write(dir.join("cw.txt"), serialize_cw(&cw_sample::dodecahedral())).unwrap();
        std::fs::write(dir.join("windows_sign.txt"), serialize_windows(&sign_windows)).unwrap();
        std::fs::write(dir.join("windows_c2.txt"), serialize_windows(&class_windows)).unwrap();
        load_fixture(dir).unwrap()
    }

    #[test]
    fn smoke_run_on_synthetic_fixture() {
        let tmp = tempfile::tempdir().unwrap();
        let fixture = write_fixture(tmp.path());
        assert!(fixture_available(tmp.path()));
        assert_eq!(fixture.classes.len(), 2);
        let config = io::RunConfig::default();
        let result = run(&fixture, &config).unwrap();
        // the synthetic sign data rounds on the Chern-Simons lattice
        let v = *result.eta_sign_rounded.numer() as f64
            / *result.eta_sign_rounded.denom() as f64;
        let (lo, hi) = result.eta_sign.interval();
        assert!(lo < v && v < hi);
        assert_eq!(result.classes.len(), 1);
        let c = &result.classes[0];
        assert_eq!(c.lk, Rational64::new(0, 1));
        // -2h sits on the integer lattice offset by lk
        assert_eq!(*(-c.h * Rational64::from_integer(2)).denom(), 1);
        assert_abs_diff_eq!(
            c.minus_two_h_central,
            c.dirac.central + v / 4.0,
            epsilon = 1e-15
        );
        // deterministic report
        let r1 = report(&result).render();
        let r2 = report(&run(&fixture, &config).unwrap()).render();
        assert_eq!(r1, r2);
        // parallel flag gives identical numbers
        let par = io::RunConfig { parallel: true, ..config };
        let r3 = report(&run(&fixture, &par).unwrap()).render();
        assert_eq!(r1, r3);
    }

    #[test]
    fn character_validation_rejects_bad_values() {
        let domain = sample::domain();
        let p = presentation_from_domain(&domain);
        let mut chi = vec![Rational64::zero(); p.n_generators];
        chi[0] = Rational64::new(1, 5);
        // opposite face left at zero: the pair relation is violated
        assert!(check_character(&p, &chi).is_err());
        assert!(check_character(&p, &chi[1..]).is_err());
        // pairs fixed but the edge cycles through face 0 still see 1/5
        chi[domain.inverse_index[0]] = Rational64::new(-1, 5);
        assert!(check_character(&p, &chi).is_err());
        let good: Vec<Rational64> = [2, 3, 0, 0, 3, 2, 0, 0, 4, 1, 1, 4]
            .iter()
            .map(|&v| Rational64::new(v, 5))
            .collect();
        assert!(check_character(&p, &good).is_ok());
    }

    #[test]
    fn spectrum_cache_consistency_check() {
        let domain = sample::domain();
        let p = presentation_from_domain(&domain);
        let lift = solve_spin_lift(&p, &initial_lifts(&domain).unwrap()).unwrap();
        let trivial = TwistCharacter {
            smith_basis_values: vec![],
            generator_values: vec![Rational64::zero(); p.n_generators],
        };
        let w = crate::dirichlet::GroupWord { letters: vec![0] };
        let e = spectrum_entry(&lift, &trivial, 0, &w, 1.0).unwrap();
        let good = ClassWord { id: 0, ell: e.ell, ell0: e.ell, word: w.clone() };
        assert!(spectrum_for_character(&lift, &trivial, &[good], 8.0, 11.2, false).is_ok());
        let bad = ClassWord { id: 0, ell: e.ell + 0.1, ell0: e.ell, word: w };
        assert!(spectrum_for_character(&lift, &trivial, &[bad], 8.0, 11.2, false).is_err());
    }
}
