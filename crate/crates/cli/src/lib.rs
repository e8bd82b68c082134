//! Reproducible experiments over the maxlab constructions: segment-space
//! bounds, basic-space brackets, family region sweeps, gluing identities
//! and generic `(k, p)` sweeps.

pub mod experiments;
pub mod report;
pub mod sweep;

pub use report::{Check, Report};

/// Caps the global rayon pool at `MAXLAB_THREADS` when it is set.
pub fn init_threads() -> anyhow::Result<()> {
    if let Ok(value) = std::env::var("MAXLAB_THREADS") {
        let threads: usize = value
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("MAXLAB_THREADS must be a positive integer, got `{value}`"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global()?;
    }
    Ok(())
}

/// Doubles with 17 significant digits, enough to round-trip exactly.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}
