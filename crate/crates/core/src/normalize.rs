//! Entity normalization.
//!
//! Surface forms of organizations and persons are grouped into clusters by
//! two matching rules:
//!
//! * organizations ([`match_org`]) match when both are multi-word names with
//!   the same initials, when one is a contiguous token run of the other, or
//!   when one is an acronym of the other ("S&P" for "Standard & Poor");
//! * persons ([`match_pers`]) match when one name is contained in the other or
//!   when the last name of one appears in the other, honorifics ignored.
//!
//! Clusters are merged pass by pass ([`merge_pass`]) until nothing changes.
//! Under [`Mode::Max`] two clusters merge when their most frequent surfaces
//! match. Under [`Mode::Average`] every frequent surface (count above the
//! average) of one cluster must match every frequent surface of the other.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use crate::annotation::{EntityMention, EntityType, UnknownEntityType};
use crate::error::{Error, Result};

const CONNECTORS: &[&str] = &["and", "of", "the", "for", "&"];
pub const DEFAULT_HONORIFICS: &[&str] = &["Mr", "Mrs", "Ms", "Miss", "Chairman", "Dr"];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SurfaceStat {
    pub surface: String,
    pub etype: EntityType,
    pub count: u64,
}

/// Surface forms resolved to one entity. Members are sorted by surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityCluster {
    pub members: Vec<SurfaceStat>,
    pub etype: EntityType,
    pub canonical: String,
}

impl EntityCluster {
    pub fn singleton(stat: SurfaceStat) -> Self {
        EntityCluster {
            etype: stat.etype,
            canonical: stat.surface.clone(),
            members: vec![stat],
        }
    }

    /// Builds a cluster, choosing the most frequent member as canonical
    /// (lexicographically smallest on ties).
    pub fn from_members(mut members: Vec<SurfaceStat>) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptyInput)?;
        let etype = first.etype;
        if let Some(other) = members.iter().find(|m| m.etype != etype) {
            return Err(Error::MixedTypes(etype.to_string(), other.etype.to_string()));
        }
        members.sort_by(|a, b| a.surface.cmp(&b.surface));
        let canonical = members
            .iter()
            .min_by(|a, b| b.count.cmp(&a.count).then_with(|| a.surface.cmp(&b.surface)))
            .map(|m| m.surface.clone())
            .unwrap_or_default();
        Ok(EntityCluster {
            members,
            etype,
            canonical,
        })
    }

    pub fn total_count(&self) -> u64 {
        self.members.iter().map(|m| m.count).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Compare the most frequent surface of each cluster.
    Max,
    /// Compare all surfaces occurring more often than the average.
    Average,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "P_MAX" | "MAX" => Ok(Mode::Max),
            "P_AV" | "AV" | "AVERAGE" => Ok(Mode::Average),
            _ => Err(Error::InvalidArgument(format!(
                "normalization mode `{s}` (expected P_MAX or P_AV)"
            ))),
        }
    }
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Max => "P_MAX",
            Mode::Average => "P_AV",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationPolicy {
    pub mode: Mode,
    av_override: Option<f64>,
    pub honorifics: Vec<String>,
}

impl NormalizationPolicy {
    pub fn new(mode: Mode) -> Self {
        NormalizationPolicy {
            mode,
            av_override: None,
            honorifics: DEFAULT_HONORIFICS.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn with_av_override(mut self, av: f64) -> Result<Self> {
        if !(av.is_finite() && av > 0.0) {
            return Err(Error::InvalidArgument(format!("av_override must be > 0, got {av}")));
        }
        self.av_override = Some(av);
        Ok(self)
    }

    pub fn with_honorifics<I, S>(mut self, honorifics: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.honorifics = honorifics.into_iter().map(Into::into).collect();
        self
    }

    pub fn av_override(&self) -> Option<f64> {
        self.av_override
    }
}

fn strip_edges(token: &str) -> &str {
    token.trim_matches(|c: char| !c.is_alphanumeric())
}

/// Lowercased tokens with edge punctuation and possessive `'s` removed;
/// tokens that are pure punctuation disappear.
fn tokens(name: &str) -> Vec<String> {
    name.split_whitespace()
        .map(|t| {
            let t = strip_edges(t);
            t.strip_suffix("'s").or_else(|| t.strip_suffix("\u{2019}s")).unwrap_or(t)
        })
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn is_connector(token: &str) -> bool {
    CONNECTORS.iter().any(|c| c.eq_ignore_ascii_case(token))
}

fn content_tokens(name: &str) -> Vec<&str> {
    name.split_whitespace()
        .filter(|t| !is_connector(t))
        .map(strip_edges)
        .filter(|t| !t.is_empty() && !is_connector(t))
        .collect()
}

/// First letters of the content tokens, uppercased.
pub fn initials(name: &str) -> String {
    content_tokens(name)
        .iter()
        .filter_map(|t| t.chars().next())
        .flat_map(char::to_uppercase)
        .collect()
}

/// True when `needle` occurs as a contiguous run in `hay`.
fn contains_run(hay: &[String], needle: &[String]) -> bool {
    !needle.is_empty() && needle.len() <= hay.len() && hay.windows(needle.len()).any(|w| w == needle)
}

fn same_name(a: &str, b: &str) -> bool {
    a.trim().to_lowercase() == b.trim().to_lowercase()
}

fn acronym_of(short: &str, long: &str) -> bool {
    let words: Vec<&str> = short.split_whitespace().collect();
    if words.len() != 1 || content_tokens(long).len() < 2 {
        return false;
    }
    let letters: String = words[0]
        .chars()
        .filter(|c| !matches!(c, '&' | '.'))
        .collect();
    !letters.is_empty() && letters.to_uppercase() == initials(long)
}

/// Organization rule.
pub fn match_org(a: &str, b: &str) -> bool {
    if same_name(a, b) {
        return true;
    }
    let (ca, cb) = (content_tokens(a), content_tokens(b));
    if ca.len() > 1 && cb.len() > 1 && initials(a) == initials(b) {
        return true;
    }
    let (ta, tb) = (tokens(a), tokens(b));
    if contains_run(&ta, &tb) || contains_run(&tb, &ta) {
        return true;
    }
    acronym_of(a, b) || acronym_of(b, a)
}

fn person_tokens(name: &str, honorifics: &[String]) -> Vec<String> {
    tokens(name)
        .into_iter()
        .filter(|t| !honorifics.iter().any(|h| strip_edges(h).eq_ignore_ascii_case(t)))
        .collect()
}

/// Person rule with the default honorific list.
pub fn match_pers(a: &str, b: &str) -> bool {
    let honorifics: Vec<String> = DEFAULT_HONORIFICS.iter().map(|s| s.to_string()).collect();
    match_pers_with(a, b, &honorifics)
}

pub fn match_pers_with(a: &str, b: &str, honorifics: &[String]) -> bool {
    if same_name(a, b) {
        return true;
    }
    let (ta, tb) = (person_tokens(a, honorifics), person_tokens(b, honorifics));
    if ta.is_empty() || tb.is_empty() {
        return false;
    }
    contains_run(&ta, &tb)
        || contains_run(&tb, &ta)
        || ta.last().is_some_and(|last| tb.contains(last))
        || tb.last().is_some_and(|last| ta.contains(last))
}

fn matches(policy: &NormalizationPolicy, etype: EntityType, a: &str, b: &str) -> bool {
    match etype {
        EntityType::Person => match_pers_with(a, b, &policy.honorifics),
        _ => match_org(a, b),
    }
}

/// Mean count per distinct surface. All stats must share one entity type.
pub fn average_occurrences(stats: &[SurfaceStat]) -> Result<f64> {
    let first = stats.first().ok_or(Error::EmptyInput)?;
    if let Some(other) = stats.iter().find(|s| s.etype != first.etype) {
        return Err(Error::MixedTypes(first.etype.to_string(), other.etype.to_string()));
    }
    let total: u64 = stats.iter().map(|s| s.count).sum();
    Ok(total as f64 / stats.len() as f64)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Outcome of one [`merge_pass`].
#[derive(Debug, Clone)]
pub struct MergeOutcome {
    pub clusters: Vec<EntityCluster>,
    pub changed: bool,
    /// Canonical labels of each directly matched pair, in scan order.
    pub merged_pairs: Vec<(String, String)>,
}

fn canonical_order(a: &EntityCluster, b: &EntityCluster) -> Ordering {
    a.canonical.cmp(&b.canonical).then_with(|| a.members.len().cmp(&b.members.len()))
}

/// One merge pass over clusters of a single entity type. Pairs are scanned in
/// lexicographic order of canonical labels and merged through a union-find,
/// so chains of matches collapse within the pass. `av` is only read in
/// [`Mode::Average`].
pub fn merge_pass(
    clusters: &[EntityCluster],
    policy: &NormalizationPolicy,
    av: f64,
) -> Result<MergeOutcome> {
    let Some(first) = clusters.first() else {
        return Ok(MergeOutcome {
            clusters: Vec::new(),
            changed: false,
            merged_pairs: Vec::new(),
        });
    };
    let etype = first.etype;
    if let Some(other) = clusters.iter().find(|c| c.etype != etype) {
        return Err(Error::MixedTypes(etype.to_string(), other.etype.to_string()));
    }
    if policy.mode == Mode::Average && !(av > 0.0) {
        return Err(Error::InvalidArgument(format!("average must be > 0, got {av}")));
    }
    let mut sorted: Vec<&EntityCluster> = clusters.iter().collect();
    sorted.sort_by(|a, b| canonical_order(a, b));

    // Representatives compared for each cluster.
    let reps: Vec<Vec<&str>> = sorted
        .iter()
        .map(|c| match policy.mode {
            Mode::Max => vec![c.canonical.as_str()],
            Mode::Average => c
                .members
                .iter()
                .filter(|m| m.count as f64 > av)
                .map(|m| m.surface.as_str())
                .collect(),
        })
        .collect();

    let mut uf = UnionFind::new(sorted.len());
    let mut merged_pairs = Vec::new();
    for i in 0..sorted.len() {
        if reps[i].is_empty() {
            continue;
        }
        for j in i + 1..sorted.len() {
            if reps[j].is_empty() {
                continue;
            }
            let all_match = reps[i]
                .iter()
                .all(|a| reps[j].iter().all(|b| matches(policy, etype, a, b)));
            if all_match {
                uf.union(i, j);
                merged_pairs.push((sorted[i].canonical.clone(), sorted[j].canonical.clone()));
            }
        }
    }

    let mut groups: BTreeMap<usize, Vec<SurfaceStat>> = BTreeMap::new();
    for (i, c) in sorted.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().extend(c.members.iter().cloned());
    }
    let changed = groups.len() != sorted.len();
    let clusters = groups
        .into_values()
        .map(EntityCluster::from_members)
        .collect::<Result<Vec<_>>>()?;
    Ok(MergeOutcome {
        clusters,
        changed,
        merged_pairs,
    })
}

/// Per-type surface counts of organization and person mentions, sorted by
/// type then surface.
pub fn surface_stats(mentions: &[EntityMention]) -> Vec<SurfaceStat> {
    let mut counts: BTreeMap<(EntityType, &str), u64> = BTreeMap::new();
    for m in mentions.iter().filter(|m| m.etype.is_actor()) {
        *counts.entry((m.etype, m.surface.as_str())).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|((etype, surface), count)| SurfaceStat {
            surface: surface.to_string(),
            etype,
            count,
        })
        .collect()
}

/// Clusters surface statistics: organizations and persons separately, each
/// from singletons, merging until a pass changes nothing.
pub fn normalize_stats(stats: &[SurfaceStat], policy: &NormalizationPolicy) -> Result<Vec<EntityCluster>> {
    let mut by_type: BTreeMap<EntityType, Vec<SurfaceStat>> = BTreeMap::new();
    for s in stats {
        if s.count == 0 {
            return Err(Error::InvalidArgument(format!("surface `{}` has count 0", s.surface)));
        }
        by_type.entry(s.etype).or_default().push(s.clone());
    }
    let mut out = Vec::new();
    for (_, stats) in by_type {
        let av = match policy.av_override {
            Some(av) => av,
            None => average_occurrences(&stats)?,
        };
        let mut clusters: Vec<EntityCluster> = stats.into_iter().map(EntityCluster::singleton).collect();
        loop {
            let outcome = merge_pass(&clusters, policy, av)?;
            clusters = outcome.clusters;
            if !outcome.changed {
                break;
            }
        }
        out.extend(clusters);
    }
    sort_clusters(&mut out);
    Ok(out)
}

/// Clusters the organization and person mentions; other types are ignored.
pub fn normalize(mentions: &[EntityMention], policy: &NormalizationPolicy) -> Result<Vec<EntityCluster>> {
    normalize_stats(&surface_stats(mentions), policy)
}

/// Descending total count, then canonical label, then type.
pub fn sort_clusters(clusters: &mut [EntityCluster]) {
    clusters.sort_by(|a, b| {
        b.total_count()
            .cmp(&a.total_count())
            .then_with(|| a.canonical.cmp(&b.canonical))
            .then_with(|| a.etype.cmp(&b.etype))
    });
}

/// Maps (type, surface) to the index of its cluster.
pub fn cluster_index(clusters: &[EntityCluster]) -> HashMap<(EntityType, &str), usize> {
    let mut index = HashMap::new();
    for (i, c) in clusters.iter().enumerate() {
        for m in &c.members {
            index.insert((c.etype, m.surface.as_str()), i);
        }
    }
    index
}

fn escape_member(s: &str) -> String {
    s.replace('\\', "\\\\").replace('|', "\\|")
}

fn split_members(field: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut chars = field.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                if let Some(n) = chars.next() {
                    out.last_mut().unwrap().push(n);
                }
            }
            '|' => out.push(String::new()),
            _ => out.last_mut().unwrap().push(c),
        }
    }
    out
}

/// Cluster dump: `TYPE<TAB>canonical<TAB>total_count<TAB>member1|member2|…`.
/// `|` and `\` inside member surfaces are backslash-escaped.
pub fn write_cluster_dump(clusters: &[EntityCluster]) -> String {
    let mut out = String::new();
    for c in clusters {
        let members: Vec<String> = c.members.iter().map(|m| escape_member(&m.surface)).collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            c.etype,
            c.canonical,
            c.total_count(),
            members.join("|")
        );
    }
    out
}

/// A cluster as stored in a dump: member counts are not recorded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterRecord {
    pub etype: EntityType,
    pub canonical: String,
    pub total_count: u64,
    pub members: Vec<String>,
}

pub fn read_cluster_dump(input: &str) -> Result<Vec<ClusterRecord>> {
    let mut out = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line_no = n + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::Malformed {
                line: line_no,
                message: format!("expected 4 tab-separated fields, found {}", fields.len()),
            });
        }
        let etype = fields[0]
            .parse()
            .map_err(|UnknownEntityType(label)| Error::UnknownEntityType { line: line_no, label })?;
        let total_count = fields[2].parse().map_err(|_| Error::Malformed {
            line: line_no,
            message: format!("bad total count `{}`", fields[2]),
        })?;
        let members = split_members(fields[3]);
        if !members.iter().any(|m| m == fields[1]) {
            return Err(Error::Malformed {
                line: line_no,
                message: format!("canonical `{}` is not a member", fields[1]),
            });
        }
        out.push(ClusterRecord {
            etype,
            canonical: fields[1].to_string(),
            total_count,
            members,
        });
    }
    Ok(out)
}

/// Re-attaches member counts from mentions. The stored canonical label and
/// order are kept; member counts must add up to the stored totals.
pub fn clusters_from_records(records: &[ClusterRecord], mentions: &[EntityMention]) -> Result<Vec<EntityCluster>> {
    let counts: HashMap<(EntityType, String), u64> = surface_stats(mentions)
        .into_iter()
        .map(|s| ((s.etype, s.surface), s.count))
        .collect();
    records
        .iter()
        .map(|r| {
            let mut members: Vec<SurfaceStat> = r
                .members
                .iter()
                .map(|surface| SurfaceStat {
                    surface: surface.clone(),
                    etype: r.etype,
                    count: counts.get(&(r.etype, surface.clone())).copied().unwrap_or(0),
                })
                .collect();
            members.sort_by(|a, b| a.surface.cmp(&b.surface));
            let cluster = EntityCluster {
                members,
                etype: r.etype,
                canonical: r.canonical.clone(),
            };
            if cluster.total_count() != r.total_count {
                return Err(Error::InvalidArgument(format!(
                    "cluster `{}`: mentions give {} occurrences, dump says {}",
                    r.canonical,
                    cluster.total_count(),
                    r.total_count
                )));
            }
            Ok(cluster)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stat(surface: &str, etype: EntityType, count: u64) -> SurfaceStat {
        SurfaceStat {
            surface: surface.into(),
            etype,
            count,
        }
    }

    fn cluster(etype: EntityType, members: &[(&str, u64)]) -> EntityCluster {
        EntityCluster::from_members(members.iter().map(|&(s, c)| stat(s, etype, c)).collect()).unwrap()
    }

    #[test]
    fn initials_examples() {
        assert_eq!(initials("Standard and Poor"), "SP");
        assert_eq!(initials("A"), "A");
        assert_eq!(initials("Office of Thrift Supervision"), "OTS");
        assert_eq!(initials("Standard & Poor"), "SP");
        assert_eq!(initials("the Bank for International Settlements"), "BIS");
        assert_eq!(initials("(Federal) Reserve,"), "FR");
    }

    #[test]
    fn org_examples() {
        assert!(match_org("Standard & Poor", "S&P"));
        assert!(match_org("X", "X"));
        assert!(!match_org("Goldman Sachs", "Morgan Stanley"));
        assert!(match_org("Standard and Poor", "Standard & Poor"));
        assert!(match_org("Office of Thrift Supervision", "OTS"));
        assert!(match_org("Goldman", "Goldman Sachs"));
        assert!(match_org("Standard & Poor", "Standard & Poor's executive board"));
        assert!(!match_org("Goldman", "Goldmann Sachs"));
        // Single-word names never match on initials alone.
        assert!(!match_org("Fed", "Freddie"));
        assert!(!match_org("SEC", "Fed"));
    }

    #[test]
    fn org_rule_by_clause() {
        // Hand oracle for the Goldman/Morgan pair: initials GS vs MS, no shared
        // token run, neither side a single-token acronym.
        assert_ne!(initials("Goldman Sachs"), initials("Morgan Stanley"));
        assert!(!contains_run(&tokens("Goldman Sachs"), &tokens("Morgan Stanley")));
        assert!(!acronym_of("Goldman Sachs", "Morgan Stanley"));
        // Acronym with periods.
        assert!(match_org("F.D.I.C.", "Federal Deposit Insurance Corporation"));
        assert!(!match_org("FDIC", "Federal Deposit Corporation"));
    }

    #[test]
    fn person_examples() {
        assert!(match_pers("Mary Schapiro", "Schapiro"));
        assert!(match_pers("Chairman Schapiro", "Mary Schapiro"));
        assert!(!match_pers("Ben Bernanke", "Mark Olson"));
        assert!(match_pers("Miss Schapiro", "Chairman Schapiro"));
        assert!(match_pers("Ben S. Bernanke", "Bernanke"));
        assert!(!match_pers("Mr.", "Dr."));
        assert!(!match_pers("Ben Bernanke", "Ben Smith"));
    }

    #[test]
    fn custom_honorifics() {
        let h = vec!["Governor".to_string()];
        assert!(match_pers_with("Governor Warsh", "Kevin Warsh", &h));
        assert!(!match_pers_with("Governor Kohn", "Governor Warsh", &h));
        // Without the honorific the shared first token is not a last name either.
        assert!(!match_pers("Governor Kohn", "Governor Warsh"));
    }

    #[test]
    fn average_examples() {
        let s = |cs: &[u64]| -> Vec<SurfaceStat> {
            cs.iter()
                .enumerate()
                .map(|(i, &c)| stat(&format!("s{i}"), EntityType::Organization, c))
                .collect()
        };
        assert_eq!(average_occurrences(&s(&[1, 2, 3])).unwrap(), 2.0);
        assert_eq!(average_occurrences(&s(&[5])).unwrap(), 5.0);
        assert_eq!(average_occurrences(&s(&[1, 1, 4])).unwrap(), 2.0);
        assert!(matches!(average_occurrences(&[]), Err(Error::EmptyInput)));
        let mixed = [stat("a", EntityType::Person, 1), stat("b", EntityType::Organization, 1)];
        assert!(matches!(average_occurrences(&mixed), Err(Error::MixedTypes(..))));
    }

    #[test]
    fn pass_max_merges_schapiro() {
        let p = NormalizationPolicy::new(Mode::Max);
        let cs = [
            cluster(EntityType::Person, &[("Mary Schapiro", 3)]),
            cluster(EntityType::Person, &[("Schapiro", 2)]),
        ];
        let out = merge_pass(&cs, &p, 1.0).unwrap();
        assert!(out.changed);
        assert_eq!(out.clusters.len(), 1);
        assert_eq!(out.clusters[0].canonical, "Mary Schapiro");
        assert_eq!(out.clusters[0].total_count(), 5);
    }

    #[test]
    fn pass_single_cluster_unchanged() {
        let p = NormalizationPolicy::new(Mode::Max);
        let cs = [cluster(EntityType::Person, &[("Mary Schapiro", 3)])];
        let out = merge_pass(&cs, &p, 1.0).unwrap();
        assert!(!out.changed);
        assert_eq!(out.clusters, cs);
    }

    #[test]
    fn pass_average_uses_frequent_members_only() {
        // Hand trace with av = 2: A1 = {S&P} (Sx has 1), A2 = {Standard & Poor};
        // the single cross pair matches by the acronym clause, so they merge.
        let p = NormalizationPolicy::new(Mode::Average);
        let cs = [
            cluster(EntityType::Organization, &[("S&P", 10), ("Sx", 1)]),
            cluster(EntityType::Organization, &[("Standard & Poor", 4)]),
        ];
        assert!(!match_org("Sx", "Standard & Poor"));
        let out = merge_pass(&cs, &p, 2.0).unwrap();
        assert!(out.changed);
        assert_eq!(out.clusters.len(), 1);
        assert_eq!(out.clusters[0].canonical, "S&P");

        // With av = 0.5 the rare member joins A1 and blocks the merge.
        let out = merge_pass(&cs, &p, 0.5).unwrap();
        assert!(!out.changed);

        // An empty A side never merges.
        let out = merge_pass(&cs, &p, 5.0).unwrap();
        assert!(!out.changed);
    }

    #[test]
    fn pass_rejects_mixed_types_and_bad_av() {
        let p = NormalizationPolicy::new(Mode::Max);
        let cs = [
            cluster(EntityType::Person, &[("A", 1)]),
            cluster(EntityType::Organization, &[("A", 1)]),
        ];
        assert!(matches!(merge_pass(&cs, &p, 1.0), Err(Error::MixedTypes(..))));
        let p = NormalizationPolicy::new(Mode::Average);
        assert!(merge_pass(&cs[..1], &p, 0.0).is_err());
        assert!(NormalizationPolicy::new(Mode::Average).with_av_override(-1.0).is_err());
    }

    #[test]
    fn pass_merges_transitively() {
        // Both shorter names match "Bank of America Corp" but not each other.
        let p = NormalizationPolicy::new(Mode::Max);
        let cs = [
            cluster(EntityType::Organization, &[("Bank of America Corp", 2)]),
            cluster(EntityType::Organization, &[("America Corp", 1)]),
            cluster(EntityType::Organization, &[("Bank", 1)]),
        ];
        assert!(!match_org("America Corp", "Bank"));
        let out = merge_pass(&cs, &p, 1.0).unwrap();
        assert_eq!(out.clusters.len(), 1);
    }

    fn mentions_of(items: &[(&str, EntityType, usize)]) -> Vec<EntityMention> {
        let mut out = Vec::new();
        for &(surface, etype, n) in items {
            for k in 0..n {
                out.push(EntityMention {
                    doc_id: "d".into(),
                    sentence_index: k,
                    start_char: 0,
                    end_char: surface.chars().count(),
                    surface: surface.into(),
                    etype,
                });
            }
        }
        out
    }

    #[test]
    fn normalize_worked_examples() {
        use EntityType::*;
        let variants = [
            ("Standard and Poor", Organization, 2),
            ("Standard & Poor", Organization, 2),
            ("S&P", Organization, 2),
            ("Mary Schapiro", Person, 2),
            ("Schapiro", Person, 2),
            ("Miss Schapiro", Person, 2),
            ("Chairman Schapiro", Person, 2),
            ("Paris", Location, 3),
        ];
        let out = normalize(&mentions_of(&variants), &NormalizationPolicy::new(Mode::Max)).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].etype, Person);
        assert_eq!(out[0].members.len(), 4);
        assert_eq!(out[1].etype, Organization);
        assert_eq!(out[1].members.len(), 3);

        // Under P_AV the variants must be frequent relative to the corpus;
        // with uniform counts nothing exceeds the average and nothing merges.
        let p = NormalizationPolicy::new(Mode::Average);
        assert_eq!(normalize(&mentions_of(&variants), &p).unwrap().len(), 7);
        let mut corpus = variants.to_vec();
        corpus.extend([
            ("Lehman Brothers", Organization, 1),
            ("Countrywide", Organization, 1),
            ("Moody's", Organization, 1),
            ("Alan Greenspan", Person, 1),
            ("Kevin Warsh", Person, 1),
        ]);
        let out = normalize(&mentions_of(&corpus), &p).unwrap();
        assert_eq!(out.len(), 7);
        assert_eq!((out[0].etype, out[0].members.len()), (Person, 4));
        assert_eq!((out[1].etype, out[1].members.len()), (Organization, 3));
    }

    #[test]
    fn normalize_keeps_unrelated_apart() {
        use EntityType::*;
        let p = NormalizationPolicy::new(Mode::Max);
        let ms = mentions_of(&[("Fannie Mae", Organization, 3), ("Lehman", Organization, 1), ("Ben Bernanke", Person, 2)]);
        let out = normalize(&ms, &p).unwrap();
        let labels: Vec<_> = out.iter().map(|c| c.canonical.as_str()).collect();
        assert_eq!(labels, ["Fannie Mae", "Ben Bernanke", "Lehman"]);
        assert!(normalize(&[], &p).unwrap().is_empty());
    }

    #[test]
    fn same_surface_different_types_stay_apart() {
        use EntityType::*;
        let p = NormalizationPolicy::new(Mode::Max);
        let ms = mentions_of(&[("Morgan", Organization, 1), ("Morgan", Person, 1)]);
        assert_eq!(normalize(&ms, &p).unwrap().len(), 2);
    }

    #[test]
    fn dump_roundtrip() {
        use EntityType::*;
        let ms = mentions_of(&[("A|B", Organization, 2), ("A|B Corp", Organization, 1), ("x\\y", Person, 1)]);
        let cs = normalize(&ms, &NormalizationPolicy::new(Mode::Max)).unwrap();
        let dump = write_cluster_dump(&cs);
        assert_eq!(dump, "ORGANIZATION\tA|B\t3\tA\\|B|A\\|B Corp\nPERSON\tx\\y\t1\tx\\\\y\n");
        let records = read_cluster_dump(&dump).unwrap();
        assert_eq!(records[0].members, ["A|B", "A|B Corp"]);
        assert_eq!(clusters_from_records(&records, &ms).unwrap(), cs);
        assert!(clusters_from_records(&records, &ms[1..]).is_err());
        assert!(read_cluster_dump("PERSON\tX\t1\tY\n").is_err());
        assert!(read_cluster_dump("PERSON\tX\t1\n").is_err());
    }

    proptest! {
        #[test]
        fn rules_reflexive_and_symmetric(
            a in "[A-Za-z&. ]{0,20}",
            b in "[A-Za-z&. ]{0,20}",
        ) {
            prop_assert!(match_org(&a, &a));
            prop_assert!(match_pers(&a, &a));
            prop_assert_eq!(match_org(&a, &b), match_org(&b, &a));
            prop_assert_eq!(match_pers(&a, &b), match_pers(&b, &a));
        }

        #[test]
        fn rules_symmetric_on_name_like_input(
            a in proptest::collection::vec("(Bank|of|America|Mary|Schapiro|Mr|S&P|Standard|&|Poor|Fed)", 1..4),
            b in proptest::collection::vec("(Bank|of|America|Mary|Schapiro|Mr|S&P|Standard|&|Poor|Fed)", 1..4),
        ) {
            let (a, b) = (a.join(" "), b.join(" "));
            prop_assert_eq!(match_org(&a, &b), match_org(&b, &a));
            prop_assert_eq!(match_pers(&a, &b), match_pers(&b, &a));
        }
    }
}
