//! Exact construction and verification of m-ovoids in the symplectic polar
//! spaces W(2r-1, p^e), built from semiprimitive cyclotomic classes.

pub mod bundle;
pub mod construct;
pub mod cyclotomy;
pub mod gf;
pub mod symplectic;
pub mod verify;

use std::sync::atomic::{AtomicBool, Ordering};

static PROGRESS: AtomicBool = AtomicBool::new(false);

/// Enable progress lines on stderr for long sweeps.
pub fn set_progress(on: bool) {
    PROGRESS.store(on, Ordering::Relaxed);
}

pub(crate) fn progress_enabled() -> bool {
    PROGRESS.load(Ordering::Relaxed)
}
