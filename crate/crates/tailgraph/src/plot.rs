//! Plot-ready TSV for frequency and CCDF charts on log-log axes.
//!
//! The CCDF is `P(X >= x)`, so the smallest value sits at 1. With
//! `zero_shift`, the zero bin is written at abscissa 0.1 and tagged `zero`
//! in a third column so a plotting layer can label it "0".

use std::io::{self, Write};

use tailgraph_core::tailfit::EmpiricalDistribution;

/// Abscissa used for the zero bin when shifting.
pub const ZERO_ABSCISSA: f64 = 0.1;
pub const ZERO_MARKER: &str = "zero";

/// `(value, count)` rows including the zero bin, in increasing order.
fn rows(d: &EmpiricalDistribution) -> impl Iterator<Item = (u64, u64)> + '_ {
    let zero = (d.zero_count() > 0).then_some((0, d.zero_count()));
    zero.into_iter().chain(d.iter())
}

fn write_x(w: &mut impl Write, x: u64, zero_shift: bool) -> io::Result<()> {
    if x == 0 && zero_shift {
        write!(w, "{ZERO_ABSCISSA}")
    } else {
        write!(w, "{x}")
    }
}

fn write_marker(w: &mut impl Write, x: u64, zero_shift: bool) -> io::Result<()> {
    if x == 0 && zero_shift {
        write!(w, "\t{ZERO_MARKER}")?;
    }
    writeln!(w)
}

/// `x<TAB>count[<TAB>zero]` rows. An empty distribution writes nothing.
pub fn write_frequency(d: &EmpiricalDistribution, zero_shift: bool, mut w: impl Write) -> io::Result<()> {
    for (x, c) in rows(d) {
        write_x(&mut w, x, zero_shift)?;
        write!(w, "\t{c}")?;
        write_marker(&mut w, x, zero_shift)?;
    }
    w.flush()
}

/// `(x, P(X >= x))` over the distinct values, zeros included.
pub fn ccdf(d: &EmpiricalDistribution) -> Vec<(u64, f64)> {
    let n = (d.total() + d.zero_count()) as f64;
    let mut remaining = d.total() + d.zero_count();
    rows(d)
        .map(|(x, c)| {
            let p = remaining as f64 / n;
            remaining -= c;
            (x, p)
        })
        .collect()
}

/// Header line naming the CCDF convention.
pub const CCDF_HEADER: &str = "# x\tP(X>=x)";

/// `x<TAB>P(X>=x)[<TAB>zero]` rows under [`CCDF_HEADER`]. An empty
/// distribution writes nothing.
pub fn write_ccdf(d: &EmpiricalDistribution, zero_shift: bool, mut w: impl Write) -> io::Result<()> {
    let points = ccdf(d);
    if !points.is_empty() {
        writeln!(w, "{CCDF_HEADER}")?;
    }
    for (x, p) in points {
        write_x(&mut w, x, zero_shift)?;
        write!(w, "\t{p}")?;
        write_marker(&mut w, x, zero_shift)?;
    }
    w.flush()
}
