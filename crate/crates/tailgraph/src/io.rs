//! Text formats: edge lists, label maps, frequency files and group maps.
//! Any input may be gzip-compressed; compression is detected from the
//! stream's magic bytes, not the file name.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use flate2::read::MultiGzDecoder;
use tailgraph_core::aggregation::GroupMap;
use tailgraph_core::tailfit::EmpiricalDistribution;
use tailgraph_core::{AdjacencyGraph, GraphBuilder, NodeId, SelfLoopPolicy};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {}: {source}", path.display())]
    Open { path: PathBuf, source: io::Error },
    #[error("read error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Graph(#[from] tailgraph_core::Error),
    #[error("node {label:?} has no group")]
    Ungrouped { label: String },
}

fn parse_error(line: usize, reason: impl Into<String>) -> InputError {
    InputError::Parse { line, reason: reason.into() }
}

/// Opens a file for buffered reading, decompressing gzip transparently.
pub fn open_input(path: &Path) -> Result<Box<dyn BufRead>, InputError> {
    let file = File::open(path).map_err(|source| InputError::Open { path: path.to_owned(), source })?;
    let mut reader = BufReader::with_capacity(1 << 16, file);
    let magic = reader.fill_buf().map_err(|source| InputError::Open { path: path.to_owned(), source })?;
    if magic.starts_with(&[0x1f, 0x8b]) {
        Ok(Box::new(BufReader::with_capacity(1 << 16, MultiGzDecoder::new(reader))))
    } else {
        Ok(Box::new(reader))
    }
}

/// Iterates the meaningful lines of a text stream with 1-based line
/// numbers; blank lines and `#` comments are skipped.
fn records(reader: impl BufRead) -> impl Iterator<Item = Result<(usize, String), InputError>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(e.into())),
        Ok(l) => {
            let l = l.trim_end_matches('\r');
            if l.trim().is_empty() || l.starts_with('#') {
                None
            } else {
                Some(Ok((i + 1, l.to_owned())))
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeListOptions {
    /// Merge repeated arcs; when off a repeat is an error.
    pub dedup: bool,
    pub self_loops: SelfLoopPolicy,
}

impl Default for EdgeListOptions {
    fn default() -> Self {
        EdgeListOptions { dedup: true, self_loops: SelfLoopPolicy::Keep }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: AdjacencyGraph,
    pub records: u64,
    pub self_loops_dropped: u64,
}

/// First-seen interning of node labels.
#[derive(Debug, Default)]
struct Interner {
    ids: HashMap<String, NodeId>,
    labels: Vec<String>,
}

impl Interner {
    fn intern(&mut self, label: &str, line: usize) -> Result<NodeId, InputError> {
        if let Some(&id) = self.ids.get(label) {
            return Ok(id);
        }
        let id = NodeId::try_from(self.labels.len()).map_err(|_| parse_error(line, "more than 2^32 nodes"))?;
        self.ids.insert(label.to_owned(), id);
        self.labels.push(label.to_owned());
        Ok(id)
    }
}

/// Reads `src<TAB>dst` records. Labels (numeric or not) are interned in
/// first-seen order. A record with a single field declares a node without
/// arcs, so isolated nodes survive a write/read round trip.
pub fn read_edge_list(reader: impl BufRead, opts: EdgeListOptions) -> Result<LoadedGraph, InputError> {
    let mut interner = Interner::default();
    let mut builder = GraphBuilder::new(0).dedup(opts.dedup).self_loops(opts.self_loops);
    let mut count = 0u64;
    for rec in records(reader) {
        let (line, text) = rec?;
        let mut fields = text.split('\t');
        let src = fields.next().unwrap_or("");
        let dst = fields.next();
        if fields.next().is_some() {
            return Err(parse_error(line, "expected `src<TAB>dst`, found more than two fields"));
        }
        if src.is_empty() || dst.is_some_and(str::is_empty) {
            return Err(parse_error(line, "empty node label"));
        }
        let s = interner.intern(src, line)?;
        match dst {
            Some(dst) => {
                let t = interner.intern(dst, line)?;
                builder.add_arc(s, t);
            }
            None => builder.ensure_node(s),
        }
        count += 1;
    }
    let self_loops_dropped = builder.self_loops_dropped();
    let graph = builder.build()?.with_labels(interner.labels)?;
    Ok(LoadedGraph { graph, records: count, self_loops_dropped })
}

pub fn load_edge_list(path: &Path, opts: EdgeListOptions) -> Result<LoadedGraph, InputError> {
    read_edge_list(open_input(path)?, opts)
}

/// The node's label, or its id when the graph is unlabeled.
pub fn node_label(g: &AdjacencyGraph, u: NodeId) -> std::borrow::Cow<'_, str> {
    match g.label(u) {
        Some(l) => l.into(),
        None => u.to_string().into(),
    }
}

/// Writes every node as a declaration in id order, then the arcs. Reading
/// the result back reproduces the same ids.
pub fn write_edge_list(g: &AdjacencyGraph, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "# nodes: {}, arcs: {}", g.node_count(), g.arc_count())?;
    for u in g.nodes() {
        writeln!(w, "{}", node_label(g, u))?;
    }
    for (u, v) in g.arcs() {
        writeln!(w, "{}\t{}", node_label(g, u), node_label(g, v))?;
    }
    w.flush()
}

/// `id<TAB>label` lines.
pub fn write_label_map(g: &AdjacencyGraph, mut w: impl Write) -> io::Result<()> {
    for u in g.nodes() {
        writeln!(w, "{u}\t{}", node_label(g, u))?;
    }
    w.flush()
}

/// `node_label<TAB>value` lines, e.g. component ids.
pub fn write_assignment(g: &AdjacencyGraph, values: &[u32], mut w: impl Write) -> io::Result<()> {
    for u in g.nodes() {
        writeln!(w, "{}\t{}", node_label(g, u), values[u as usize])?;
    }
    w.flush()
}

/// Reads `value<TAB>count` lines or bare `value` lines (count 1), in any
/// mix. Values are non-negative integers; zeros are kept aside.
pub fn read_distribution(reader: impl BufRead) -> Result<EmpiricalDistribution, InputError> {
    let mut freq: Vec<(u64, u64)> = Vec::new();
    for rec in records(reader) {
        let (line, text) = rec?;
        let mut fields = text.split(['\t', ' ']).filter(|f| !f.is_empty());
        let parse = |f: Option<&str>, what: &str| -> Result<u64, InputError> {
            let f = f.ok_or_else(|| parse_error(line, format!("missing {what}")))?;
            f.parse().map_err(|_| parse_error(line, format!("{what} {f:?} is not a non-negative integer")))
        };
        let value = parse(fields.next(), "value")?;
        let count = match fields.next() {
            Some(c) => parse(Some(c), "count")?,
            None => 1,
        };
        if fields.next().is_some() {
            return Err(parse_error(line, "expected `value` or `value<TAB>count`"));
        }
        freq.push((value, count));
    }
    Ok(EmpiricalDistribution::from_frequencies(freq))
}

pub fn load_distribution(path: &Path) -> Result<EmpiricalDistribution, InputError> {
    read_distribution(open_input(path)?)
}

/// `value<TAB>count` lines in increasing value order, zeros first.
pub fn write_distribution(d: &EmpiricalDistribution, mut w: impl Write) -> io::Result<()> {
    if d.zero_count() > 0 {
        writeln!(w, "0\t{}", d.zero_count())?;
    }
    for (v, c) in d.iter() {
        writeln!(w, "{v}\t{c}")?;
    }
    w.flush()
}

/// Reads `node_label<TAB>group_label` lines and resolves them against the
/// graph's labels. Every node must be listed.
pub fn read_group_map(reader: impl BufRead, g: &AdjacencyGraph) -> Result<GroupMap, InputError> {
    let mut groups: HashMap<String, String> = HashMap::new();
    for rec in records(reader) {
        let (line, text) = rec?;
        let (node, group) = text
            .split_once('\t')
            .filter(|(n, g)| !n.is_empty() && !g.is_empty() && !g.contains('\t'))
            .ok_or_else(|| parse_error(line, "expected `node_label<TAB>group_label`"))?;
        groups.insert(node.to_owned(), group.to_owned());
    }
    let labels: Vec<&str> = g
        .nodes()
        .map(|u| {
            let l = node_label(g, u);
            groups.get(l.as_ref()).map(String::as_str).ok_or_else(|| InputError::Ungrouped { label: l.into_owned() })
        })
        .collect::<Result<_, _>>()?;
    Ok(GroupMap::from_labels(labels))
}

/// Creates `path` for writing, with parent directories.
pub fn create_output(path: &Path) -> io::Result<io::BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(io::BufWriter::new(File::create(path)?))
}

/// Reads a whole (possibly compressed) text file.
pub fn read_to_string(path: &Path) -> Result<String, InputError> {
    let mut s = String::new();
    open_input(path)?.read_to_string(&mut s)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn load(text: &str) -> Result<LoadedGraph, InputError> {
        read_edge_list(text.as_bytes(), EdgeListOptions::default())
    }

    #[test]
    fn empty_input() {
        let g = load("").unwrap().graph;
        assert_eq!((g.node_count(), g.arc_count()), (0, 0));
    }

    #[test]
    fn repeated_arc_merges() {
        let g = load("a\tb\nb\tc\n# comment\n\na\tb\n").unwrap().graph;
        assert_eq!((g.node_count(), g.arc_count()), (3, 2));
        assert_eq!(g.label(2), Some("c"));
        let strict = read_edge_list("a\tb\na\tb\n".as_bytes(), EdgeListOptions { dedup: false, ..Default::default() });
        assert!(matches!(strict, Err(InputError::Graph(tailgraph_core::Error::DuplicateArc { .. }))));
    }

    #[test]
    fn malformed_records_name_the_line() {
        for (text, line) in [("a\tb\na\tb\tc\n", 2), ("# x\n\ta\n", 2), ("a\t\n", 1)] {
            match load(text) {
                Err(InputError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn arc_count_matches_distinct_pairs() {
        let mut state = 12345u64;
        let mut next = || {
            state = tailgraph_core::rng::mix64(state);
            state % 50
        };
        let pairs: Vec<(u64, u64)> = (0..1000).map(|_| (next(), next())).collect();
        let text: String = pairs.iter().map(|(a, b)| format!("n{a}\tn{b}\n")).collect();
        let g = load(&text).unwrap().graph;
        let distinct: HashSet<_> = pairs.iter().collect();
        assert_eq!(g.arc_count(), distinct.len());
    }

    #[test]
    fn round_trip_keeps_ids_and_isolated_nodes() {
        let g = load("x\ty\nlonely\ny\tx\nz\tz\n").unwrap().graph;
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let h = read_edge_list(buf.as_slice(), EdgeListOptions::default()).unwrap().graph;
        assert_eq!(g, h);
        assert_eq!(h.node_count(), 4);
    }

    #[test]
    fn self_loops_can_be_dropped() {
        let opts = EdgeListOptions { self_loops: SelfLoopPolicy::Drop, ..Default::default() };
        let loaded = read_edge_list("a\ta\na\tb\n".as_bytes(), opts).unwrap();
        assert_eq!((loaded.graph.node_count(), loaded.graph.arc_count(), loaded.self_loops_dropped), (2, 1, 1));
    }

    #[test]
    fn gzip_is_detected() {
        use flate2::{write::GzEncoder, Compression};
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("edges.txt");
        let mut enc = GzEncoder::new(File::create(&path).unwrap(), Compression::default());
        enc.write_all(b"a\tb\nb\tc\n").unwrap();
        enc.finish().unwrap();
        assert_eq!(load_edge_list(&path, EdgeListOptions::default()).unwrap().graph.arc_count(), 2);
    }

    #[test]
    fn distribution_formats() {
        let d = read_distribution("0\t5\n1\t10\n3\n3\n# c\n7 2\n".as_bytes()).unwrap();
        assert_eq!(d.zero_count(), 5);
        assert_eq!(d.iter().collect::<Vec<_>>(), [(1, 10), (3, 2), (7, 2)]);
        let mut out = Vec::new();
        write_distribution(&d, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0\t5\n1\t10\n3\t2\n7\t2\n");
        assert!(matches!(read_distribution("1\n-2\n".as_bytes()), Err(InputError::Parse { line: 2, .. })));
    }

    #[test]
    fn group_map_must_cover_nodes() {
        let g = load("a\tb\nc\tb\n").unwrap().graph;
        let m = read_group_map("a\tA\nb\tB\nc\tA\n".as_bytes(), &g).unwrap();
        assert_eq!(m.assignment(), &[0, 1, 0]);
        assert!(matches!(read_group_map("a\tA\n".as_bytes(), &g), Err(InputError::Ungrouped { .. })));
    }
}
