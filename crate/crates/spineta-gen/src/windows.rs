//! Certified eigenvalue windows and counted tail ranges for the Seifert-Weber
//! fixture, one file per spin^c class plus the sign spectrum.

use spineta::eta::EigenvalueWindow;
use spineta::io::WindowsFile;
use spineta::trace::Sign;

fn window(lower: f64, upper: f64, mult: u32, sign: Sign, averaged: bool) -> EigenvalueWindow {
    let w = EigenvalueWindow::new(lower, upper, mult, sign).expect("valid window");
    EigenvalueWindow { averaged, ..w }
}

pub fn sign_windows() -> WindowsFile {
    WindowsFile {
        windows: vec![window(1.42787720680237, 1.43033743858337, 6, Sign::Plus, false)],
        tails: vec![(2.0, 3.0, 22), (3.0, 4.0, 21)],
    }
}

pub fn spin_windows() -> WindowsFile {
    WindowsFile {
        windows: vec![],
        tails: vec![(1.45, 2.0, 8), (2.0, 3.0, 12), (3.0, 4.0, 31)],
    }
}

/// Dirac windows for the nonspin classes, keyed by the self-linking value
/// lk(x,x) = k/5.
pub fn class_windows(k: i64) -> WindowsFile {
    match k {
        1 => WindowsFile {
            windows: vec![],
            tails: vec![(0.8, 1.0, 2), (1.0, 1.5, 4), (1.5, 2.0, 6), (2.0, 3.0, 15), (3.0, 4.0, 30)],
        },
        4 => WindowsFile {
            windows: vec![],
            tails: vec![(1.0, 1.5, 4), (1.5, 2.0, 7), (2.0, 3.0, 16), (3.0, 4.0, 29)],
        },
        0 => WindowsFile {
            windows: vec![],
            tails: vec![
                (0.545, 1.05, 1),
                (1.05, 1.39, 2),
                (1.39, 1.85, 4),
                (1.85, 2.2, 7),
                (2.2, 3.0, 15),
                (3.0, 4.0, 30),
            ],
        },
        2 => WindowsFile {
            windows: vec![window(0.0408361, 0.4077692, 1, Sign::Unsigned, true)],
            tails: vec![(1.55, 2.0, 6), (2.0, 3.0, 16), (3.0, 4.0, 30)],
        },
        3 => WindowsFile {
            windows: vec![],
            tails: vec![(1.0, 1.5, 4), (1.5, 2.0, 5), (2.0, 3.0, 16), (3.0, 4.0, 30)],
        },
        _ => panic!("no window data for lk value {k}/5"),
    }
}

/// (label, lk numerator) for the nonspin manifest classes, in table order.
pub const NONSPIN_CLASSES: [(&str, i64); 5] =
    [("c2", 1), ("c3", 4), ("c4", 0), ("c5", 2), ("c6", 3)];
