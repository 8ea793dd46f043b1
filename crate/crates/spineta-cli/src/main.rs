//! Command-line front end: fixture-driven spectra, trace-formula evaluation,
//! Weyl census constants, eta estimates, and the Froyshov table.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nalgebra::Matrix4;
use num_rational::Rational64;
use num_traits::Zero;
use spineta::dirichlet;
use spineta::geom::{lorentz_to_moebius, moebius_to_lorentz, LorentzMatrix, DEFAULT_TOL};
use spineta::io::{self, Report, RunConfig};
use spineta::linking::{linking_form, self_linking_table};
use spineta::pipeline::{self, Fixture};
use spineta::spinc::{initial_lifts, solve_spin_lift, TwistCharacter};
use spineta::testfn::TestFunction;
use spineta::trace::{geometric_side, SpectralKind};
use spineta::{bounds, Error, Result};

#[derive(Parser)]
#[command(name = "spineta", about = "Spectral invariants of closed hyperbolic 3-manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FixtureArgs {
    /// fixture name (resolved under SPINETA_FIXTURES or ./fixtures) or path
    #[arg(long)]
    fixture: String,
}

#[derive(Args)]
struct RunArgs {
    /// Mellin split point
    #[arg(long = "L", default_value_t = 1.7)]
    l: f64,
    /// certified geodesic length cutoff
    #[arg(long, default_value_t = 7.5)]
    cut: f64,
    /// numerical tolerance
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// evaluate per-class spectra on worker threads
    #[arg(long, default_value_t = false)]
    parallel: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Lift a Lorentz matrix to SL2(C) and report the round-trip residual
    Convert {
        /// 16 row-major entries of an SO(3,1)^0 matrix
        #[arg(long, num_args = 16, allow_hyphen_values = true)]
        matrix: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tolerance: f64,
    },
    /// Express a deck transformation as a word in the face pairings
    Reduce {
        #[command(flatten)]
        fixture: FixtureArgs,
        #[arg(long, num_args = 16, allow_hyphen_values = true)]
        matrix: Vec<f64>,
    },
    /// Solve the spin lift of the face pairings
    Spinlift {
        #[command(flatten)]
        fixture: FixtureArgs,
    },
    /// Enumerate the torsion characters of the fundamental group
    Characters {
        #[command(flatten)]
        fixture: FixtureArgs,
    },
    /// Emit the spin^c length spectrum for one character
    Spectrum {
        #[command(flatten)]
        fixture: FixtureArgs,
        /// manifest class label, "trivial", or comma-separated rationals
        #[arg(long, default_value = "trivial")]
        character: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Evaluate the geometric side of an even trace formula
    Trace {
        #[command(flatten)]
        fixture: FixtureArgs,
        /// functions, coexact, or spinor
        #[arg(long)]
        kind: String,
        #[arg(long, default_value = "trivial")]
        character: String,
        /// gaussian:c, indicator:a,k, or bump:scale
        #[arg(long, default_value = "gaussian:1")]
        testfn: String,
        /// modulate the test function by cos(nu x)
        #[arg(long)]
        nu: Option<f64>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// A-priori Weyl and eta bounds from volume and injectivity radius
    Weyl {
        #[arg(long)]
        vol: f64,
        #[arg(long)]
        inj: f64,
        /// convolution power of the window indicator
        #[arg(long, default_value_t = 8)]
        k: u32,
    },
    /// Full eta estimate with its error budget
    Eta {
        #[command(flatten)]
        fixture: FixtureArgs,
        /// sign or dirac
        #[arg(long)]
        kind: String,
        /// manifest class label for the dirac kind
        #[arg(long)]
        character: Option<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Froyshov invariants of every spin^c class in the fixture
    Froyshov {
        #[command(flatten)]
        fixture: FixtureArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Linking form and self-linking table
    Linking {
        #[command(flatten)]
        fixture: FixtureArgs,
    },
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn load(args: &FixtureArgs) -> Result<Fixture> {
    let dir = if args.fixture.contains('/') {
        PathBuf::from(&args.fixture)
    } else {
        pipeline::fixture_dir(&args.fixture)
    };
    if !pipeline::fixture_available(&dir) {
        return Err(Error::Validation(format!("no fixture manifest under {}", dir.display())));
    }
    pipeline::load_fixture(&dir)
}

fn config(run: &RunArgs) -> RunConfig {
    RunConfig {
        l: run.l,
        cut: run.cut,
        tolerance: run.tolerance,
        parallel: run.parallel,
        ..RunConfig::default()
    }
}

fn parse_matrix(entries: &[f64]) -> Result<LorentzMatrix> {
    if entries.len() != 16 {
        return Err(Error::Validation(format!("need 16 matrix entries, got {}", entries.len())));
    }
    Ok(LorentzMatrix { m: Matrix4::from_row_slice(entries) })
}

fn parse_rational(s: &str) -> Result<Rational64> {
    let err = || Error::Validation(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| err())?;
            let d: i64 = d.trim().parse().map_err(|_| err())?;
            if d == 0 {
                return Err(err());
            }
            Ok(Rational64::new(n, d))
        }
        None => Ok(Rational64::from_integer(s.trim().parse().map_err(|_| err())?)),
    }
}

fn parse_character(fixture: &Fixture, spec: &str, n: usize) -> Result<TwistCharacter> {
    let values = if spec == "trivial" {
        vec![Rational64::zero(); n]
    } else if let Some(mc) = fixture.manifest.classes.iter().find(|c| c.label == spec) {
        mc.character.clone()
    } else {
        spec.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?
    };
    if values.len() != n {
        return Err(Error::Validation(format!(
            "character needs {n} values, got {}",
            values.len()
        )));
    }
    Ok(TwistCharacter { smith_basis_values: vec![], generator_values: values })
}

fn parse_testfn(spec: &str) -> Result<TestFunction> {
    let err = || Error::Validation(format!("bad test function {spec:?}"));
    let (name, params) = spec.split_once(':').unwrap_or((spec, "1"));
    let nums: Vec<&str> = params.split(',').collect();
    let f = |s: &str| s.trim().parse::<f64>().map_err(|_| err());
    match name {
        "gaussian" if nums.len() == 1 => Ok(TestFunction::gaussian(f(nums[0])?)),
        "bump" if nums.len() == 1 => Ok(TestFunction::bump_power(f(nums[0])?)),
        "indicator" if nums.len() == 2 => {
            let k: u32 = nums[1].trim().parse().map_err(|_| err())?;
            Ok(TestFunction::indicator_power(f(nums[0])?, k))
        }
        _ => Err(err()),
    }
}

fn parse_kind(s: &str) -> Result<SpectralKind> {
    match s {
        "functions" => Ok(SpectralKind::Functions),
        "coexact" => Ok(SpectralKind::Coexact),
        "spinor" => Ok(SpectralKind::Spinor),
        _ => Err(Error::Validation(format!("unknown spectral kind {s:?}"))),
    }
}

fn spectrum_for(
    fixture: &Fixture,
    character: &str,
    run: &RunArgs,
) -> Result<spineta::SpinCLengthSpectrum> {
    let p = pipeline::presentation_from_domain(&fixture.domain);
    let lift = solve_spin_lift(&p, &initial_lifts(&fixture.domain)?)?;
    let chi = parse_character(fixture, character, p.n_generators)?;
    pipeline::spectrum_for_character(
        &lift,
        &chi,
        &fixture.classes,
        run.cut.min(fixture.manifest.cutoff),
        fixture.manifest.volume,
        run.parallel,
    )
}

fn eta_section(r: &mut Report, title: &str, e: &spineta::eta::EtaEstimate) {
    r.section(title);
    r.push_f64("central", e.central);
    r.push_f64("err_geometric_tail", e.err_geometric_tail);
    r.push_f64("err_window_width", e.err_window_width);
    r.push_f64("err_spectral_tail", e.err_spectral_tail);
    r.push_f64("total_error", e.total_error());
    let (lo, hi) = e.interval();
    r.push_f64("interval_lower", lo);
    r.push_f64("interval_upper", hi);
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Convert { matrix, tolerance } => {
            let m = parse_matrix(&matrix)?;
            m.validate(tolerance)?;
            let g = lorentz_to_moebius(&m)?;
            let back = moebius_to_lorentz(&g);
            let residual = (back.m - m.m).norm();
            let mut r = Report::default();
            r.section("sl2 lift");
            for (i, label) in ["a", "b", "c", "d"].iter().enumerate() {
                let v = g.m[(i / 2, i % 2)];
                r.push_f64(format!("{label}_re"), v.re);
                r.push_f64(format!("{label}_im"), v.im);
            }
            r.push("unit_det", if g.unit_det { "yes" } else { "no" });
            r.push_f64("round_trip_residual", residual);
            print!("{}", r.render());
        }
        Command::Reduce { fixture, matrix } => {
            let fx = load(&fixture)?;
            let m = parse_matrix(&matrix)?;
            let word = dirichlet::reduce(&fx.domain, &m)?;
            let back = dirichlet::evaluate_word(&fx.domain, &word);
            let mut r = Report::default();
            r.section("word");
            r.push(
                "letters",
                word.letters.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" "),
            );
            r.push_f64("residual", (back.m - m.m).norm());
            print!("{}", r.render());
        }
        Command::Spinlift { fixture } => {
            let fx = load(&fixture)?;
            let p = pipeline::presentation_from_domain(&fx.domain);
            let lift = solve_spin_lift(&p, &initial_lifts(&fx.domain)?)?;
            let mut r = Report::default();
            r.section("spin lift");
            r.push("solution_dimension", lift.solution_dimension.to_string());
            r.push(
                "signs",
                lift.signs.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" "),
            );
            for (i, g) in lift.generator_lifts.iter().enumerate() {
                r.section(format!("generator {i}"));
                for (j, label) in ["a", "b", "c", "d"].iter().enumerate() {
                    let v = g.m[(j / 2, j % 2)];
                    r.push_f64(format!("{label}_re"), v.re);
                    r.push_f64(format!("{label}_im"), v.im);
                }
            }
            print!("{}", r.render());
        }
        Command::Characters { fixture } => {
            let fx = load(&fixture)?;
            let chars = pipeline::characters(&fx.domain)?;
            let mut r = Report::default();
            r.section("characters");
            r.push("count", chars.len().to_string());
            for (i, c) in chars.iter().enumerate() {
                let row: Vec<String> =
                    c.generator_values.iter().map(|v| format!("{v}")).collect();
                r.push(format!("chi_{i}"), row.join(" "));
            }
            print!("{}", r.render());
        }
        Command::Spectrum { fixture, character, run } => {
            let fx = load(&fixture)?;
            let s = spectrum_for(&fx, &character, &run)?;
            print!("{}", io::serialize_spectrum(&s));
        }
        Command::Trace { fixture, kind, character, testfn, nu, run } => {
            let fx = load(&fixture)?;
            let kind = parse_kind(&kind)?;
            let mut f = parse_testfn(&testfn)?;
            if let Some(nu) = nu {
                f = TestFunction::modulated(f, nu)?;
            }
            let s = spectrum_for(&fx, &character, &run)?;
            let value = geometric_side(
                kind,
                spineta::testfn::Parity::Even,
                &s,
                &f,
                fx.manifest.volume,
                0,
            )?;
            let mut r = Report::default();
            r.section("geometric side");
            r.push("kind", format!("{kind:?}"));
            r.push("classes", s.entries.len().to_string());
            r.push_f64("cutoff", s.cutoff_r);
            r.push_f64("value", value);
            print!("{}", r.render());
        }
        Command::Weyl { vol, inj, k } => {
            let phi = TestFunction::bump_power(1.0);
            let (a, b) = bounds::weyl_coexact(vol, inj, &phi)?;
            let c = bounds::weyl_small(vol, inj, &phi)?;
            let (_, d) = bounds::weyl_functions(vol, inj, &phi, c)?;
            let (_, e) = bounds::weyl_spinor(vol, inj, &phi)?;
            let co = bounds::WeylCoefficients { a, b, c, d, e }.presentation();
            let mut r = Report::default();
            r.section("weyl constants");
            r.push("coexact", format!("{} nu^2 + {}", co.a, co.b));
            r.push("small_eigenvalues", format!("{}", co.c));
            r.push("functions", format!("{} nu^2 + {}", co.a, co.d));
            r.push("spinor", format!("{} nu^2 + {}", co.a, co.e));
            r.section("eta bounds");
            let sign = bounds::eta_sign_bound(k, &co, inj)?;
            let dirac = bounds::eta_dirac_bound(k, &co, inj)?;
            r.push_f64("eta_sign", sign);
            r.push_f64("eta_dirac", dirac);
            r.push_f64("froyshov", bounds::froyshov_bound(sign, dirac));
            print!("{}", r.render());
        }
        Command::Eta { fixture, kind, character, run } => {
            let fx = load(&fixture)?;
            let result = pipeline::run(&fx, &config(&run))?;
            let mut r = Report::default();
            match kind.as_str() {
                "sign" => {
                    eta_section(&mut r, "eta_sign", &result.eta_sign);
                    r.push("rounded", format!("{}", result.eta_sign_rounded));
                }
                "dirac" => {
                    let label = character.as_deref().unwrap_or("spin");
                    let c = result
                        .classes
                        .iter()
                        .find(|c| c.label == label)
                        .ok_or_else(|| {
                            Error::Validation(format!("no manifest class labelled {label:?}"))
                        })?;
                    eta_section(&mut r, &format!("eta_dirac {label}"), &c.dirac);
                    r.push_f64("geometric_part", c.dirac_geometric);
                    if let Some(s) = c.resolved_sign {
                        r.push("resolved_sign", format!("{s:?}"));
                    }
                }
                other => {
                    return Err(Error::Validation(format!("unknown eta kind {other:?}")));
                }
            }
            print!("{}", r.render());
        }
        Command::Froyshov { fixture, run } => {
            let fx = load(&fixture)?;
            let result = pipeline::run(&fx, &config(&run))?;
            print!("{}", pipeline::report(&result).render());
        }
        Command::Linking { fixture } => {
            let fx = load(&fixture)?;
            let q = linking_form(&fx.cw)?;
            let mut r = Report::default();
            r.section("linking form");
            r.push("basis", q.basis_labels.join(" "));
            r.push(
                "group",
                q.group.iter().map(|v| format!("Z/{v}")).collect::<Vec<_>>().join(" x "),
            );
            for (i, row) in q.matrix.iter().enumerate() {
                let row: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
                r.push(format!("row_{i}"), row.join(" "));
            }
            r.section("self-linking counts");
            for (value, count) in self_linking_table(&q)? {
                r.push(format!("lk {value}"), count.to_string());
            }
            print!("{}", r.render());
        }
    }
    Ok(())
}
