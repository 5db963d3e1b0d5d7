//! Writes the bundled crawl-like fixture: host-labelled nodes, heavy-tailed
//! out-degrees, preferential in-links, dangling nodes and back-links, plus
//! small sites disconnected from the main crawl.
//!
//! cargo run -p tailgraph --example crawl_fixture -- fixtures/crawl_10k.tsv.gz

use std::fs::File;
use std::io::{BufWriter, Write};

use flate2::write::GzEncoder;
use flate2::Compression;
use tailgraph_core::rng::{below, stream, uniform, uniform_open0};

const NODES: u64 = 8_500;
const ISLAND_NODES: u64 = 1_500;
const SEED: u64 = 2017;
const TLDS: [&str; 6] = ["com", "net", "org", "co.uk", "de", "ck"];

fn main() -> std::io::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "fixtures/crawl_10k.tsv.gz".into());
    let mut rng = stream(SEED, 0);

    // hosts cluster under registrable domains; a fifth of nodes open a new one
    let mut domains: Vec<String> = Vec::new();
    let mut labels = Vec::with_capacity(NODES as usize);
    for t in 0..NODES {
        if domains.is_empty() || uniform(&mut rng) < 0.2 {
            let tld = TLDS[below(&mut rng, TLDS.len() as u64) as usize];
            domains.push(format!("site{}.{tld}", domains.len()));
        }
        let domain = &domains[below(&mut rng, domains.len() as u64) as usize];
        labels.push(if t % 7 == 0 { domain.clone() } else { format!("h{t}.{domain}") });
    }
    labels.sort();
    labels.dedup();
    let n = labels.len() as u64;

    let mut out = BufWriter::new(GzEncoder::new(File::create(&path)?, Compression::default()));
    let mut targets: Vec<u64> = Vec::new();
    for u in 0..n {
        // a quarter of the frontier is never crawled
        if uniform(&mut rng) < 0.25 {
            continue;
        }
        let k = ((2.0 * uniform_open0(&mut rng).powf(-1.0 / 1.6)) as u64).min(400);
        for _ in 0..k {
            let r = uniform(&mut rng);
            let v = if r < 0.45 && !targets.is_empty() {
                targets[below(&mut rng, targets.len() as u64) as usize]
            } else if r < 0.75 || u == 0 {
                below(&mut rng, n)
            } else {
                below(&mut rng, u)
            };
            if v != u {
                targets.push(v);
                writeln!(out, "{}\t{}", labels[u as usize], labels[v as usize])?;
            }
        }
    }
    // islands: heavy-tailed sizes, each weakly connected through a random tree
    let mut placed = 0;
    let mut island = 0;
    while placed < ISLAND_NODES {
        let size = ((2.0 * uniform_open0(&mut rng).powf(-1.0 / 1.5)) as u64).clamp(2, ISLAND_NODES - placed + 1);
        let host = |i: u64| format!("h{i}.island{island}.org");
        for i in 1..size {
            let (a, b) = (i, below(&mut rng, i));
            let (a, b) = if uniform(&mut rng) < 0.5 { (a, b) } else { (b, a) };
            writeln!(out, "{}\t{}", host(a), host(b))?;
            if uniform(&mut rng) < 0.3 {
                writeln!(out, "{}\t{}", host(b), host(a))?;
            }
        }
        placed += size;
        island += 1;
    }
    out.into_inner().map_err(|e| e.into_error())?.finish()?.flush()
}
