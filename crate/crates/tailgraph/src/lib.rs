//! File formats, pipeline stages and reporting on top of `tailgraph-core`.

pub mod analysis;
pub mod io;
pub mod plot;

/// Builds the global rayon pool, capped by `TAILGRAPH_THREADS` when set.
pub fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("TAILGRAPH_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("TAILGRAPH_THREADS must be a positive integer, got {v:?}"))?;
        anyhow::ensure!(n >= 1, "TAILGRAPH_THREADS must be at least 1");
        // a second call keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
