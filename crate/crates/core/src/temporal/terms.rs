//! Domain term extraction.
//!
//! Candidates are word n-grams (up to four words) inside runs free of
//! stopwords, numbers, punctuation and entity mentions. A candidate scores
//! `frequency × log2(1 + words)`, where occurrences nested inside a longer
//! candidate that scores higher than the shorter one's undiscounted score do
//! not count towards its frequency.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::annotation::EntityMention;
use crate::ingest::Document;
use crate::text::words;

#[derive(Debug, Clone, PartialEq)]
pub struct TermRecord {
    pub term: String,
    pub score: f64,
    pub count: u64,
}

pub const DEFAULT_STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and", "any",
    "are", "as", "at", "be", "because", "been", "before", "being", "below", "between", "both",
    "but", "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "even",
    "few", "for", "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers",
    "herself", "him", "himself", "his", "how", "however", "i", "if", "in", "into", "is", "it",
    "its", "itself", "just", "least", "less", "many", "may", "me", "might", "more", "most",
    "much", "must", "my", "myself", "no", "nor", "not", "now", "of", "off", "on", "once", "one",
    "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own", "said", "same",
    "say", "says", "she", "should", "since", "so", "some", "such", "than", "that", "the",
    "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this", "those",
    "through", "thus", "to", "too", "under", "until", "up", "upon", "us", "very", "was", "we",
    "were", "what", "when", "where", "whether", "which", "while", "who", "whom", "why", "will",
    "with", "within", "without", "would", "yet", "you", "your", "yours",
];

/// Char spans of entity mentions, per (document, sentence).
#[derive(Debug, Clone, Default)]
pub struct MentionMask {
    spans: HashMap<(String, usize), Vec<(usize, usize)>>,
}

impl MentionMask {
    pub fn new(mentions: &[EntityMention]) -> Self {
        let mut spans: HashMap<(String, usize), Vec<(usize, usize)>> = HashMap::new();
        for m in mentions {
            spans
                .entry((m.doc_id.clone(), m.sentence_index))
                .or_default()
                .push((m.start_char, m.end_char));
        }
        MentionMask { spans }
    }

    fn get(&self, doc_id: &str, sentence: usize) -> &[(usize, usize)] {
        self.spans
            .get(&(doc_id.to_string(), sentence))
            .map_or(&[], Vec::as_slice)
    }
}

#[derive(Debug, Clone)]
pub struct TermExtractor {
    stopwords: HashSet<String>,
    max_len: usize,
    mask: MentionMask,
}

impl Default for TermExtractor {
    fn default() -> Self {
        TermExtractor::new(DEFAULT_STOPWORDS.iter().copied())
    }
}

impl TermExtractor {
    pub fn new<I, S>(stopwords: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        TermExtractor {
            stopwords: stopwords.into_iter().map(|s| s.as_ref().trim().to_lowercase()).collect(),
            max_len: 4,
            mask: MentionMask::default(),
        }
    }

    /// Words covered by these mentions never take part in terms.
    pub fn with_mask(mut self, mentions: &[EntityMention]) -> Self {
        self.mask = MentionMask::new(mentions);
        self
    }

    /// Stopword-free runs of lowercased words in one sentence.
    pub(crate) fn runs(&self, doc_id: &str, sentence: usize, text: &str) -> Vec<Vec<String>> {
        let masked = self.mask.get(doc_id, sentence);
        let mut runs: Vec<Vec<String>> = Vec::new();
        let mut current: Vec<String> = Vec::new();
        for w in words(text) {
            let blocked = self.stopwords.contains(&w.norm)
                || w.norm.chars().all(|c| c.is_ascii_digit())
                || masked.iter().any(|&(s, e)| w.start < e && s < w.end);
            if w.broken_before || blocked {
                if !current.is_empty() {
                    runs.push(std::mem::take(&mut current));
                }
            }
            if !blocked {
                current.push(w.norm);
            }
        }
        if !current.is_empty() {
            runs.push(current);
        }
        runs
    }

    fn all_runs(&self, docs: &[Document]) -> Vec<Vec<String>> {
        docs.iter()
            .flat_map(|d| d.sentences.iter().flat_map(|s| self.runs(&d.doc_id, s.index, &s.text)))
            .collect()
    }

    /// Distinct terms from `terms` occurring in one sentence.
    pub(crate) fn terms_in<'t>(
        &self,
        doc_id: &str,
        sentence: usize,
        text: &str,
        terms: &'t HashSet<String>,
        max_words: usize,
    ) -> BTreeSet<&'t str> {
        let mut found = BTreeSet::new();
        for run in self.runs(doc_id, sentence, text) {
            for start in 0..run.len() {
                for len in 1..=max_words.min(run.len() - start) {
                    let phrase = run[start..start + len].join(" ");
                    if let Some(t) = terms.get(&phrase) {
                        found.insert(t.as_str());
                    }
                }
            }
        }
        found
    }

    /// Top `n` terms by score, ties broken lexicographically.
    pub fn extract(&self, docs: &[Document], n: usize) -> Vec<TermRecord> {
        let runs = self.all_runs(docs);
        let mut phrase_ids: HashMap<String, usize> = HashMap::new();
        let mut phrases: Vec<(String, usize)> = Vec::new();
        // ids[r][s][len-1] = phrase starting at word s of run r.
        let mut ids: Vec<Vec<Vec<usize>>> = Vec::with_capacity(runs.len());
        let mut raw = Vec::new();
        for run in &runs {
            let mut table = Vec::with_capacity(run.len());
            for s in 0..run.len() {
                let mut row = Vec::new();
                for len in 1..=self.max_len.min(run.len() - s) {
                    let phrase = run[s..s + len].join(" ");
                    let id = *phrase_ids.entry(phrase.clone()).or_insert_with(|| {
                        phrases.push((phrase, len));
                        raw.push(0u64);
                        phrases.len() - 1
                    });
                    raw[id] += 1;
                    row.push(id);
                }
                table.push(row);
            }
            ids.push(table);
        }

        let weight = |len: usize| (1.0 + len as f64).log2();
        let raw_score: Vec<f64> = phrases.iter().zip(&raw).map(|((_, len), &f)| f as f64 * weight(*len)).collect();
        let mut freq = vec![0u64; phrases.len()];
        let mut score = vec![0.0f64; phrases.len()];
        for len in (1..=self.max_len).rev() {
            for table in &ids {
                for s in 0..table.len() {
                    let Some(&id) = table[s].get(len - 1) else { continue };
                    let covered = (s.saturating_sub(self.max_len - 1)..=s).any(|s2| {
                        table[s2].iter().enumerate().any(|(k, &sup)| {
                            let sup_len = k + 1;
                            sup_len > len && s2 + sup_len >= s + len && score[sup] > raw_score[id]
                        })
                    });
                    if !covered {
                        freq[id] += 1;
                    }
                }
            }
            for (id, (_, l)) in phrases.iter().enumerate() {
                if *l == len {
                    score[id] = freq[id] as f64 * weight(len);
                }
            }
        }

        let mut records: Vec<TermRecord> = phrases
            .into_iter()
            .enumerate()
            .filter(|(id, _)| freq[*id] > 0)
            .map(|(id, (term, _))| TermRecord {
                term,
                score: score[id],
                count: freq[id],
            })
            .collect();
        records.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.term.cmp(&b.term)));
        records.truncate(n);
        records
    }

    /// Scores a user-supplied term list against the corpus; terms that never
    /// occur are dropped.
    pub fn score_listed(&self, docs: &[Document], listed: &[String]) -> Vec<TermRecord> {
        let wanted: HashSet<String> = listed
            .iter()
            .map(|t| words(t).into_iter().map(|w| w.norm).collect::<Vec<_>>().join(" "))
            .filter(|t| !t.is_empty())
            .collect();
        let max_words = wanted.iter().map(|t| t.split(' ').count()).max().unwrap_or(0);
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for run in self.all_runs(docs) {
            for s in 0..run.len() {
                for len in 1..=max_words.min(run.len() - s) {
                    if let Some(t) = wanted.get(&run[s..s + len].join(" ")) {
                        *counts.entry(t.as_str()).or_default() += 1;
                    }
                }
            }
        }
        let mut records: Vec<TermRecord> = counts
            .into_iter()
            .map(|(term, count)| TermRecord {
                term: term.to_string(),
                score: count as f64 * (1.0 + term.split(' ').count() as f64).log2(),
                count,
            })
            .collect();
        records.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.term.cmp(&b.term)));
        records
    }
}

/// [`TermExtractor::extract`] with the default stopword list.
pub fn extract_terms(docs: &[Document], n: usize) -> Vec<TermRecord> {
    TermExtractor::default().extract(docs, n)
}

/// Reads a term list: one term per line, `#` comments allowed.
pub fn parse_term_list(input: &str) -> Vec<String> {
    input
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}
