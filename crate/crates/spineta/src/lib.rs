//! Spectral computation of eta and Froyshov invariants for closed hyperbolic
//! rational homology 3-spheres.
//!
//! The pipeline starts from a Dirichlet domain and a list of conjugacy-class
//! representatives (a complex length spectrum), lifts the holonomy to SL2(C),
//! enumerates the twisting characters of the torsion H1, and feeds the
//! resulting spin^c length spectra into trace-formula evaluations with
//! explicitly tracked error budgets.

pub mod bounds;
pub mod dirichlet;
pub mod error;
pub mod eta;
pub mod geom;
pub mod io;
pub mod linking;
pub mod pipeline;
pub mod spinc;
pub mod testfn;
pub mod trace;

pub use error::{Error, Result};
pub use geom::{ConjugacyData, GElement, HyperboloidPoint, LorentzMatrix};
pub use spinc::SpinCLengthSpectrum;
pub use testfn::TestFunction;
