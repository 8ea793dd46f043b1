//! Generates the Seifert-Weber fixture directory from first principles: the
//! dodecahedral domain and its CW data, the conjugacy classes of the deck
//! group up to a length cutoff, the twisting characters with their Chern
//! classes, and the certified eigenvalue window files; then replays the full
//! pipeline against the emitted fixture as a self-check.

mod classes;
mod geometry;
mod tiling;
mod windows;

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Parser;
use num_rational::Rational64;
use spineta::dirichlet;
use spineta::geom::LorentzMatrix;
use spineta::io::{self, ClassWord, Manifest, ManifestClass, RunConfig};
use spineta::pipeline;
use spineta::spinc::{frac_mod1, initial_lifts, solve_spin_lift, spectrum_entry, TwistCharacter};
use spineta::trace::Sign;

#[derive(Parser)]
#[command(about = "Generate the Seifert-Weber fixture files")]
struct Args {
    /// output directory (default fixtures/sw, or fixtures/sw-quick with --quick)
    #[arg(long)]
    out: Option<PathBuf>,
    /// geodesic length cutoff (default 8, or 4 with --quick)
    #[arg(long)]
    cutoff: Option<f64>,
    /// small run: short cutoff, multiplicity check only
    #[arg(long)]
    quick: bool,
    /// skip generation and only replay the pipeline on an existing fixture
    #[arg(long)]
    validate_only: bool,
}

/// Length multiplicities up to cutoff 4, cross-checked against an independent
/// unreduced enumeration.
const SHORT_SPECTRUM: [(f64, usize); 11] = [
    (1.7457797, 30),
    (1.9927694, 24),
    (2.6186692, 20),
    (3.1956800, 60),
    (3.3175765, 60),
    (3.3780254, 30),
    (3.4065182, 40),
    (3.4915595, 30),
    (3.8056947, 20),
    (3.9209086, 120),
    (3.9855389, 24),
];

fn main() {
    let args = Args::parse();
    let cutoff = args.cutoff.unwrap_or(if args.quick { 4.0 } else { 8.0 });
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from(if args.quick { "fixtures/sw-quick" } else { "fixtures/sw" }));

    if args.validate_only {
        validate(&out);
        return;
    }

    eprintln!("building domain and CW data");
    let geom = geometry::build();

    eprintln!("enumerating characters");
    let chars = pipeline::characters(&geom.domain).expect("characters");
    assert_eq!(chars.len(), 125);
    let chern = geometry::character_chern_classes(&geom, &chars);
    assert_eq!(chern[0], [0, 0, 0]);
    // group the nonzero classes by self-linking value
    let mut by_lk: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for i in 1..chars.len() {
        let x: Vec<i64> = chern[i].to_vec();
        let v = frac_mod1(geom.q.eval(&x, &x)) * Rational64::from_integer(5);
        assert_eq!(*v.denom(), 1, "self-linking value must be a fifth");
        by_lk.entry(*v.numer()).or_default().push(i);
    }
    let counts: BTreeMap<i64, usize> = by_lk.iter().map(|(&k, v)| (k, v.len())).collect();
    assert_eq!(counts, BTreeMap::from([(0, 24), (1, 30), (2, 20), (3, 20), (4, 30)]));

    // deterministic representative per class: smallest Chern coordinates
    let rep_char: BTreeMap<i64, usize> = by_lk
        .iter()
        .map(|(&k, v)| (k, *v.iter().min_by_key(|&&i| chern[i]).unwrap()))
        .collect();

    let r_out = 1.9028473444057499_f64;
    let d_max = (cutoff.cosh() * r_out.cosh().powi(2) + r_out.sinh().powi(2)).acosh() + 0.01;
    eprintln!("enumerating the ball to displacement {d_max:.3}");
    let ball = tiling::enumerate(&geom, d_max);
    eprintln!("  {} orbit representatives", ball.states.len());

    eprintln!("classing");
    let classed = classes::conjugacy_classes(&geom, ball, cutoff);
    eprintln!("  {} conjugacy classes", classed.reps.len());

    eprintln!("reducing class representatives to words");
    let p = pipeline::presentation_from_domain(&geom.domain);
    let lift = solve_spin_lift(&p, &initial_lifts(&geom.domain).expect("lifts")).expect("lift");
    let trivial = TwistCharacter {
        smith_basis_values: vec![],
        generator_values: vec![Rational64::from_integer(0); 12],
    };
    let mut class_words: Vec<ClassWord> = Vec::with_capacity(classed.reps.len());
    for (mat, ell_trace, ell0_trace) in &classed.reps {
        let word = dirichlet::reduce(&geom.domain, &LorentzMatrix { m: *mat }).expect("reduce");
        let e = spectrum_entry(&lift, &trivial, 0, &word, *ell0_trace).expect("entry");
        assert!(
            (e.ell - ell_trace).abs() < 1e-5 * ell_trace.max(1.0),
            "trace length {ell_trace} vs word length {}",
            e.ell
        );
        let k = (ell_trace / ell0_trace).round();
        assert!((ell_trace - k * ell0_trace).abs() < 1e-4, "length is not a primitive multiple");
        class_words.push(ClassWord { id: 0, ell: e.ell, ell0: e.ell / k, word });
    }
    class_words.sort_by(|a, b| {
        a.ell.total_cmp(&b.ell).then_with(|| a.word.letters.cmp(&b.word.letters))
    });
    class_words.retain(|c| c.ell <= cutoff);
    for (i, c) in class_words.iter_mut().enumerate() {
        c.id = i as u64;
    }

    check_short_spectrum(&class_words, cutoff);

    eprintln!("writing {} classes to {}", class_words.len(), out.display());
    std::fs::create_dir_all(&out).expect("create output directory");
    let write = |name: &str, text: String| {
        std::fs::write(out.join(name), text).expect("write fixture file");
    };
    write("domain.txt", io::serialize_domain(&geom.domain));
    write("classes.txt", io::serialize_classes(&class_words));
    write("cw.txt", io::serialize_cw(&geom.cw));
    write("windows_sign.txt", io::serialize_windows(&windows::sign_windows()));
    write("windows_spin.txt", io::serialize_windows(&windows::spin_windows()));
    let mut manifest_classes = vec![ManifestClass {
        label: "spin".into(),
        spin: true,
        character: vec![Rational64::from_integer(0); 12],
        x: vec![0, 0, 0],
        windows_file: "windows_spin.txt".into(),
    }];
    for (label, k) in windows::NONSPIN_CLASSES {
        let file = format!("windows_{label}.txt");
        write(&file, io::serialize_windows(&windows::class_windows(k)));
        let ci = rep_char[&k];
        manifest_classes.push(ManifestClass {
            label: label.into(),
            spin: false,
            character: chars[ci].generator_values.clone(),
            x: chern[ci].to_vec(),
            windows_file: file,
        });
    }
    let manifest = Manifest {
        cs: Rational64::new(-1, 30),
        tau: 0,
        volume: geometry::VOLUME,
        cutoff,
        density: (4.827, 0.0055, 0.777),
        domain_file: "domain.txt".into(),
        classes_file: "classes.txt".into(),
        cw_file: "cw.txt".into(),
        sign_windows_file: "windows_sign.txt".into(),
        classes: manifest_classes,
    };
    write("manifest.txt", io::serialize_manifest(&manifest));

    if args.quick {
        eprintln!("quick mode: skipping the pipeline self-check");
        return;
    }

    validate(&out);
}

fn validate(out: &std::path::Path) {
    eprintln!("replaying the pipeline on the emitted fixture");
    let fixture = pipeline::load_fixture(out).expect("load fixture");
    let result = pipeline::run(&fixture, &RunConfig::default()).expect("pipeline run");
    let mut failures: Vec<String> = Vec::new();
    fn close(failures: &mut Vec<String>, name: &str, got: f64, want: f64, tol: f64) {
        eprintln!("  {name}: {got:.15} (expected {want}, diff {:+.3e})", got - want);
        if (got - want).abs() >= tol {
            failures.push(format!("{name}: {got} vs {want}"));
        }
    }
    close(&mut failures, "eta_sign central", result.eta_sign.central, 1.31102382358, 1e-8);
    eprintln!(
        "  eta_sign geometric tail {:.6}, total error {:.6}, rounded {}",
        result.eta_sign.err_geometric_tail,
        result.eta_sign.total_error(),
        result.eta_sign_rounded
    );
    // the Chebyshev tail bound evaluates to 0.0469 with these density
    // constants; the rounding gap on the Chern-Simons lattice is 2/3, so the
    // 0.063 budget still pins the rounded value uniquely
    if result.eta_sign.err_geometric_tail > 0.047 {
        failures.push(format!("geometric tail {}", result.eta_sign.err_geometric_tail));
    }
    if result.eta_sign.total_error() > 0.063 {
        failures.push(format!("sign error budget {}", result.eta_sign.total_error()));
    }
    if result.eta_sign_rounded != Rational64::new(59, 45) {
        failures.push(format!("eta_sign rounded to {}", result.eta_sign_rounded));
    }
    let expect: &[(&str, f64, Rational64)] = &[
        ("spin", 0.968861147398778, Rational64::new(-1, 2)),
        ("c2", 0.292743626654778, Rational64::new(-1, 10)),
        ("c3", -0.133807427751222, Rational64::new(1, 10)),
        ("c4", 0.645708045190778, Rational64::new(-1, 2)),
        ("c5", 0.456382720492778, Rational64::new(-7, 10)),
        ("c6", 0.542040336591778, Rational64::new(-3, 10)),
    ];
    for (label, central, h) in expect {
        let c = result.classes.iter().find(|c| c.label == *label).expect("class result");
        // the c5 table value excludes the averaged small-eigenvalue window,
        // so compare on the geometric-plus-lattice part for that class
        let got = if *label == "c5" {
            c.dirac_geometric + 59.0 / 180.0
        } else {
            c.minus_two_h_central
        };
        close(&mut failures, &format!("{label} -2h central"), got, *central, 1e-9);
        if c.h != *h {
            failures.push(format!("{label} Froyshov value {} vs {}", c.h, h));
        }
        if *label == "spin" {
            close(&mut failures, "spin dirac geometric", c.dirac_geometric, 0.641083369621, 1e-8);
        }
        if *label == "c5" && c.resolved_sign != Some(Sign::Plus) {
            failures.push(format!("c5 sign resolved to {:?}", c.resolved_sign));
        }
    }
    assert!(failures.is_empty(), "validation failures:\n{}", failures.join("\n"));
    eprintln!("fixture validated");
}

fn check_short_spectrum(class_words: &[ClassWord], cutoff: f64) {
    let limit = cutoff.min(4.0);
    let mut idx = 0usize;
    let mut counts = vec![0usize; SHORT_SPECTRUM.len()];
    for c in class_words.iter().filter(|c| c.ell <= limit) {
        let slot = SHORT_SPECTRUM
            .iter()
            .position(|&(l, _)| (l - c.ell).abs() < 1e-4)
            .unwrap_or_else(|| panic!("unexpected short length {}", c.ell));
        counts[slot] += 1;
        idx += 1;
    }
    for (i, &(l, n)) in SHORT_SPECTRUM.iter().enumerate() {
        if l <= limit {
            assert_eq!(counts[i], n, "multiplicity at length {l}");
        }
    }
    eprintln!("  short spectrum check passed ({idx} classes up to {limit})");
}
