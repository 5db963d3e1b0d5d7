//! Host extraction from URLs, pay-level domains under public suffix rules,
//! and quotient graphs over a node grouping.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{AdjacencyGraph, GraphBuilder, NodeId, SelfLoopPolicy};

fn extraction(url: &str, reason: &'static str) -> Error {
    Error::HostExtraction { url: url.to_string(), reason }
}

/// Lowercased host of an absolute URL, with scheme, userinfo, port, path,
/// query and fragment removed. IDN labels are kept as opaque ASCII.
pub fn parse_url_host(url: &str) -> Result<String> {
    let url = url.trim();
    let (scheme, rest) = url.split_once("://").ok_or_else(|| extraction(url, "not an absolute URL"))?;
    let mut chars = scheme.chars();
    let scheme_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    if !scheme_ok {
        return Err(extraction(url, "invalid scheme"));
    }
    let authority = rest.split(['/', '?', '#']).next().unwrap_or("");
    let host_port = authority.rsplit_once('@').map_or(authority, |(_, h)| h);
    let host = if let Some(v6) = host_port.strip_prefix('[') {
        let (inner, after) = v6.split_once(']').ok_or_else(|| extraction(url, "unterminated IPv6 literal"))?;
        if !(after.is_empty() || after.starts_with(':')) {
            return Err(extraction(url, "junk after IPv6 literal"));
        }
        if inner.is_empty() {
            return Err(extraction(url, "empty host"));
        }
        return Ok(inner.to_ascii_lowercase());
    } else {
        match host_port.rsplit_once(':') {
            Some((h, port)) if port.bytes().all(|b| b.is_ascii_digit()) => h,
            Some(_) => return Err(extraction(url, "invalid port")),
            None => host_port,
        }
    };
    // a single trailing dot denotes the root zone and names the same host
    let host = host.strip_suffix('.').unwrap_or(host);
    if host.is_empty() {
        return Err(extraction(url, "empty host"));
    }
    if host.split('.').any(str::is_empty) {
        return Err(extraction(url, "empty label in host"));
    }
    if host.bytes().any(|b| b.is_ascii_whitespace() || b.is_ascii_control()) {
        return Err(extraction(url, "whitespace in host"));
    }
    Ok(host.to_ascii_lowercase())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Normal,
    /// `*.parent`: every direct child of `parent` is a suffix.
    Wildcard,
    /// `!name`: carves `name` out of a wildcard, so its parent is the suffix.
    Exception,
}

/// Public suffix rules. Lookup is longest match, exceptions win over
/// everything, and the implicit `*` rule makes the last label a suffix when
/// nothing else matches.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuffixRules {
    normal: BTreeSet<String>,
    /// Keyed by the parent of the `*` label.
    wildcard: BTreeSet<String>,
    exception: BTreeSet<String>,
}

impl SuffixRules {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses the public suffix list text format. Only the first whitespace
    /// separated token of a line counts; blank and `//` lines are skipped.
    pub fn parse(text: &str) -> Self {
        let mut rules = SuffixRules::new();
        for line in text.lines() {
            let Some(token) = line.split_whitespace().next() else { continue };
            if token.starts_with("//") {
                continue;
            }
            rules.insert(token);
        }
        rules
    }

    /// Adds one rule in list syntax. The bare `*` rule is implicit and
    /// ignored, as are single-label exceptions.
    pub fn insert(&mut self, rule: &str) {
        let rule = rule.trim_end_matches('.').to_ascii_lowercase();
        if let Some(name) = rule.strip_prefix('!') {
            // an exception removes one label, so it needs at least two
            if name.contains('.') {
                self.exception.insert(name.to_string());
            }
        } else if let Some(parent) = rule.strip_prefix("*.") {
            if !parent.is_empty() {
                self.wildcard.insert(parent.to_string());
            }
        } else if !rule.is_empty() && rule != "*" {
            self.normal.insert(rule);
        }
    }

    pub fn len(&self) -> usize {
        self.normal.len() + self.wildcard.len() + self.exception.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rules(&self) -> impl Iterator<Item = (RuleKind, &str)> + '_ {
        let n = self.normal.iter().map(|r| (RuleKind::Normal, r.as_str()));
        let w = self.wildcard.iter().map(|r| (RuleKind::Wildcard, r.as_str()));
        let e = self.exception.iter().map(|r| (RuleKind::Exception, r.as_str()));
        n.chain(w).chain(e)
    }

    /// Number of trailing labels of `host` that form its public suffix.
    /// Always at least one.
    pub fn suffix_labels(&self, host: &str) -> usize {
        // byte offsets where each dotted suffix starts, longest first
        let starts: Vec<usize> =
            core::iter::once(0).chain(host.match_indices('.').map(|(i, _)| i + 1)).collect();
        let total = starts.len();
        for (i, &s) in starts.iter().enumerate() {
            if self.exception.contains(&host[s..]) {
                return total - i - 1;
            }
        }
        for (i, &s) in starts.iter().enumerate() {
            let wild = starts.get(i + 1).is_some_and(|&p| self.wildcard.contains(&host[p..]));
            if wild || self.normal.contains(&host[s..]) {
                return total - i;
            }
        }
        1
    }

    /// The public suffix of `host`.
    pub fn public_suffix<'a>(&self, host: &'a str) -> &'a str {
        tail_labels(host, self.suffix_labels(host))
    }

    /// The public suffix plus one label. Fails when `host` is itself a suffix.
    pub fn pld_of_host<'a>(&self, host: &'a str) -> Result<&'a str> {
        let keep = self.suffix_labels(host) + 1;
        if keep > host.split('.').count() {
            return Err(Error::NoPld { host: host.to_string() });
        }
        Ok(tail_labels(host, keep))
    }
}

fn tail_labels(host: &str, labels: usize) -> &str {
    let cut = host.rmatch_indices('.').nth(labels.wrapping_sub(1)).map_or(0, |(i, _)| i + 1);
    &host[cut..]
}

/// Total mapping from nodes to dense group ids, with one label per group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupMap {
    assignment: Vec<NodeId>,
    labels: Vec<String>,
}

impl GroupMap {
    /// Every node its own group, labelled by its id.
    pub fn identity(n: usize) -> Self {
        GroupMap { assignment: (0..n as NodeId).collect(), labels: (0..n).map(|i| i.to_string()).collect() }
    }

    /// Interns one group label per node. Ids follow first appearance.
    pub fn from_labels<S: AsRef<str>>(node_groups: impl IntoIterator<Item = S>) -> Self {
        let mut ids: BTreeMap<String, NodeId> = BTreeMap::new();
        let mut labels = Vec::new();
        let assignment = node_groups
            .into_iter()
            .map(|g| {
                let g = g.as_ref();
                if let Some(&id) = ids.get(g) {
                    return id;
                }
                let id = labels.len() as NodeId;
                ids.insert(g.to_string(), id);
                labels.push(g.to_string());
                id
            })
            .collect();
        GroupMap { assignment, labels }
    }

    /// Takes explicit group ids; every id in `0..group_count` must be used.
    pub fn from_assignment(assignment: Vec<NodeId>, group_count: usize) -> Result<Self> {
        let mut used = alloc::vec![false; group_count];
        for &g in &assignment {
            *used
                .get_mut(g as usize)
                .ok_or_else(|| Error::invalid("group id not below group count"))? = true;
        }
        if used.iter().any(|&u| !u) {
            return Err(Error::invalid("group ids are not dense"));
        }
        Ok(GroupMap { assignment, labels: (0..group_count).map(|i| i.to_string()).collect() })
    }

    /// Groups hosts by pay-level domain. Hosts that are public suffixes form
    /// their own group; the second value counts them.
    pub fn by_pld<S: AsRef<str>>(hosts: &[S], rules: &SuffixRules) -> (Self, u64) {
        let mut suffix_hosts = 0u64;
        let map = GroupMap::from_labels(hosts.iter().map(|h| {
            let h = h.as_ref();
            rules.pld_of_host(h).unwrap_or_else(|_| {
                suffix_hosts += 1;
                h
            })
        }));
        (map, suffix_hosts)
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn group_count(&self) -> usize {
        self.labels.len()
    }

    pub fn group_of(&self, node: NodeId) -> Option<NodeId> {
        self.assignment.get(node as usize).copied()
    }

    pub fn assignment(&self) -> &[NodeId] {
        &self.assignment
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// Quotient graph: one node per group and an arc between two groups when any
/// member arc joins them. The result carries the group labels.
pub fn aggregate_graph(g: &AdjacencyGraph, m: &GroupMap, self_loops: SelfLoopPolicy) -> Result<AdjacencyGraph> {
    let n = g.node_count();
    if m.node_count() < n {
        return Err(Error::UnmappedNode { node: m.node_count() as NodeId });
    }
    if m.node_count() > n {
        return Err(Error::invalid("group map covers more nodes than the graph"));
    }
    let mut b = GraphBuilder::with_capacity(m.group_count(), g.arc_count()).self_loops(self_loops);
    for (u, v) in g.arcs() {
        b.add_arc(m.assignment[u as usize], m.assignment[v as usize]);
    }
    b.build()?.with_labels(m.labels.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rules(text: &str) -> SuffixRules {
        SuffixRules::parse(text)
    }

    #[test]
    fn url_hosts() {
        assert_eq!(parse_url_host("http://www.example.1.com").unwrap(), "www.example.1.com");
        assert_eq!(parse_url_host("http://www.foo.a.b.co.uk:8080/path?query=answer").unwrap(), "www.foo.a.b.co.uk");
        assert_eq!(parse_url_host("https://user:pw@Example.COM/x#frag").unwrap(), "example.com");
        assert_eq!(parse_url_host("http://example.com?q=a@b").unwrap(), "example.com");
        assert_eq!(parse_url_host("http://[::1]:80/").unwrap(), "::1");
        assert_eq!(parse_url_host("http://example.com./").unwrap(), "example.com");
    }

    #[test]
    fn url_host_errors() {
        for bad in ["example.com", "http://", "http:///path", "http://a..b/", "1http://a.b", "http://a.b:x/"] {
            assert!(matches!(parse_url_host(bad), Err(Error::HostExtraction { .. })), "{bad}");
        }
    }

    #[test]
    fn parse_rule_kinds() {
        let r = rules("// comment\n\ncom\nco.uk\n*.ck\n!www.ck\n");
        let kinds: Vec<_> = r.rules().collect();
        assert_eq!(
            kinds,
            [
                (RuleKind::Normal, "co.uk"),
                (RuleKind::Normal, "com"),
                (RuleKind::Wildcard, "ck"),
                (RuleKind::Exception, "www.ck")
            ]
        );
    }

    #[test]
    fn worked_plds() {
        let r = rules("com\nuk\nco.uk");
        assert_eq!(r.pld_of_host("www.example.1.com").unwrap(), "1.com");
        assert_eq!(r.pld_of_host("www.foo.a.b.co.uk").unwrap(), "b.co.uk");
        assert_eq!(r.pld_of_host("b.co.uk").unwrap(), "b.co.uk");
        assert!(matches!(r.pld_of_host("co.uk"), Err(Error::NoPld { .. })));
    }

    #[test]
    fn implicit_root_rule() {
        let r = SuffixRules::parse("");
        assert!(r.is_empty());
        assert_eq!(r.public_suffix("a.b.example"), "example");
        assert_eq!(r.pld_of_host("a.b.example").unwrap(), "b.example");
        assert!(r.pld_of_host("example").is_err());
    }

    #[test]
    fn exception_beats_wildcard_beats_shorter() {
        let r = rules("ck\n*.ck\n!www.ck");
        assert_eq!(r.public_suffix("a.b.ck"), "b.ck");
        assert_eq!(r.pld_of_host("a.b.ck").unwrap(), "a.b.ck");
        assert_eq!(r.public_suffix("x.www.ck"), "ck");
        assert_eq!(r.pld_of_host("x.www.ck").unwrap(), "www.ck");
        assert_eq!(r.public_suffix("ck"), "ck");
    }

    #[test]
    fn longest_normal_match_wins() {
        let r = rules("uk\nco.uk\nfoo.co.uk");
        assert_eq!(r.public_suffix("a.foo.co.uk"), "foo.co.uk");
        assert_eq!(r.public_suffix("a.bar.co.uk"), "co.uk");
        assert_eq!(r.public_suffix("a.org.uk"), "uk");
    }

    #[test]
    fn pld_batch_keeps_suffix_hosts() {
        let r = rules("com\nco.uk");
        let hosts = ["a.x.com", "b.x.com", "co.uk", "y.co.uk"];
        let (m, warnings) = GroupMap::by_pld(&hosts, &r);
        assert_eq!(warnings, 1);
        assert_eq!(m.assignment(), &[0, 0, 1, 2]);
        assert_eq!(m.labels(), &["x.com", "co.uk", "y.co.uk"]);
    }

    #[test]
    fn aggregate_examples() {
        let g = AdjacencyGraph::from_arcs(2, [(0, 1)]).unwrap();
        let m = GroupMap::from_assignment(vec![0, 0], 1).unwrap();
        let q = aggregate_graph(&g, &m, SelfLoopPolicy::Drop).unwrap();
        assert_eq!((q.node_count(), q.arc_count()), (1, 0));
        let q = aggregate_graph(&g, &m, SelfLoopPolicy::Keep).unwrap();
        assert_eq!((q.node_count(), q.arc_count()), (1, 1));

        let g = AdjacencyGraph::from_arcs(3, [(0, 1), (2, 1)]).unwrap();
        let m = GroupMap::from_labels(["A", "B", "A"]);
        let q = aggregate_graph(&g, &m, SelfLoopPolicy::Drop).unwrap();
        assert_eq!((q.node_count(), q.arc_count()), (2, 1));
        assert_eq!(q.label(0), Some("A"));
    }

    #[test]
    fn unmapped_node_is_an_error() {
        let g = AdjacencyGraph::from_arcs(3, [(0, 2)]).unwrap();
        let m = GroupMap::from_assignment(vec![0, 1], 2).unwrap();
        assert_eq!(aggregate_graph(&g, &m, SelfLoopPolicy::Drop), Err(Error::UnmappedNode { node: 2 }));
        assert!(GroupMap::from_assignment(vec![0, 2], 3).is_err());
    }
}
