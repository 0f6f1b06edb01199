//! Named-entity annotations: the standoff TSV interface, a gazetteer tagger
//! for self-contained runs, and year extraction from date mentions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ingest::Document;
use crate::ingest::normalize_whitespace;
use crate::text::char_slice;

/// The seven MUC entity types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityType {
    Time,
    Location,
    Organization,
    Person,
    Money,
    Percent,
    Date,
}

impl EntityType {
    pub const ALL: [EntityType; 7] = [
        EntityType::Time,
        EntityType::Location,
        EntityType::Organization,
        EntityType::Person,
        EntityType::Money,
        EntityType::Percent,
        EntityType::Date,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityType::Time => "TIME",
            EntityType::Location => "LOCATION",
            EntityType::Organization => "ORGANIZATION",
            EntityType::Person => "PERSON",
            EntityType::Money => "MONEY",
            EntityType::Percent => "PERCENT",
            EntityType::Date => "DATE",
        }
    }

    /// Organizations and persons are the actors that get normalized and linked.
    pub fn is_actor(self) -> bool {
        matches!(self, EntityType::Organization | EntityType::Person)
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownEntityType(pub String);

impl FromStr for EntityType {
    type Err = UnknownEntityType;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        EntityType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| UnknownEntityType(s.to_string()))
    }
}

/// One tagged span. Offsets are char offsets into the sentence text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityMention {
    pub doc_id: String,
    pub sentence_index: usize,
    pub start_char: usize,
    pub end_char: usize,
    pub surface: String,
    pub etype: EntityType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMention<'a> {
    pub doc_id: &'a str,
    pub sentence_index: usize,
    pub year: i32,
}

/// Parses annotation TSV: `doc_id, sentence_index, start_char, end_char,
/// surface, type`, one mention per line. Blank lines and `#` comments are
/// skipped.
pub fn parse_annotations(input: &str) -> Result<Vec<EntityMention>> {
    let mut out = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line_no = n + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 6 {
            return Err(Error::Malformed {
                line: line_no,
                message: format!("expected 6 tab-separated fields, found {}", fields.len()),
            });
        }
        let number = |i: usize, what: &str| -> Result<usize> {
            fields[i].parse().map_err(|_| Error::Malformed {
                line: line_no,
                message: format!("{what} `{}` is not a non-negative integer", fields[i]),
            })
        };
        let sentence_index = number(1, "sentence_index")?;
        let start_char = number(2, "start_char")?;
        let end_char = number(3, "end_char")?;
        if start_char >= end_char {
            return Err(Error::Malformed {
                line: line_no,
                message: format!("empty span {start_char}..{end_char}"),
            });
        }
        let etype = fields[5].parse().map_err(|UnknownEntityType(label)| Error::UnknownEntityType {
            line: line_no,
            label,
        })?;
        out.push(EntityMention {
            doc_id: fields[0].to_string(),
            sentence_index,
            start_char,
            end_char,
            surface: fields[4].to_string(),
            etype,
        });
    }
    Ok(out)
}

pub fn serialize_annotations(mentions: &[EntityMention]) -> String {
    let mut out = String::new();
    for m in mentions {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            m.doc_id, m.sentence_index, m.start_char, m.end_char, m.surface, m.etype
        ));
    }
    out
}

/// Checks every mention against the loaded documents: the document and
/// sentence must exist and the surface must equal the sentence substring.
pub fn validate_mentions(mentions: &[EntityMention], docs: &[Document]) -> Result<()> {
    let by_id: HashMap<&str, &Document> = docs.iter().map(|d| (d.doc_id.as_str(), d)).collect();
    for m in mentions {
        let fail = |message: String| Error::OffsetMismatch {
            doc_id: m.doc_id.clone(),
            sentence_index: m.sentence_index,
            start: m.start_char,
            end: m.end_char,
            surface: m.surface.clone(),
            message,
        };
        let doc = by_id
            .get(m.doc_id.as_str())
            .ok_or_else(|| fail("unknown document".into()))?;
        let sentence = doc
            .sentence(m.sentence_index)
            .ok_or_else(|| fail("sentence index out of range".into()))?;
        match char_slice(&sentence.text, m.start_char, m.end_char) {
            Some(s) if s == m.surface => {}
            Some(s) => return Err(fail(format!("sentence has `{s}` at these offsets"))),
            None => return Err(fail("span outside sentence".into())),
        }
    }
    Ok(())
}

/// Surface form → type lookup for [`heuristic_tag`].
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: BTreeMap<String, EntityType>,
    /// Keys grouped by first char, longest first.
    by_first: HashMap<char, Vec<(Vec<char>, EntityType)>>,
}

impl Gazetteer {
    pub fn new<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, EntityType)>,
        S: AsRef<str>,
    {
        let entries: BTreeMap<String, EntityType> = entries
            .into_iter()
            .map(|(s, t)| (normalize_whitespace(s.as_ref()), t))
            .filter(|(s, _)| !s.is_empty())
            .collect();
        let mut by_first: HashMap<char, Vec<(Vec<char>, EntityType)>> = HashMap::new();
        for (key, &etype) in &entries {
            let chars: Vec<char> = key.chars().collect();
            by_first.entry(chars[0]).or_default().push((chars, etype));
        }
        for keys in by_first.values_mut() {
            keys.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        }
        Gazetteer { entries, by_first }
    }

    /// Parses `surface<TAB>TYPE` lines; `#` comments allowed.
    pub fn parse(input: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, line) in input.lines().enumerate() {
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (surface, label) = line.rsplit_once('\t').ok_or_else(|| Error::Malformed {
                line: n + 1,
                message: "expected `surface<TAB>TYPE`".into(),
            })?;
            let etype = label.trim().parse().map_err(|UnknownEntityType(label)| {
                Error::UnknownEntityType { line: n + 1, label }
            })?;
            entries.push((surface.to_string(), etype));
        }
        Ok(Gazetteer::new(entries))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, surface: &str) -> Option<EntityType> {
        self.entries.get(surface).copied()
    }
}

fn opens_token(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | '[' | '"' | '\'' | '\u{201c}' | '\u{2018}')
}

/// Tags each sentence by a left-to-right, longest-match scan against the
/// gazetteer, plus every standalone 4-digit number in 1000..=2999 as DATE.
/// Returned mentions never overlap within a sentence.
pub fn heuristic_tag(doc: &Document, gazetteer: &Gazetteer) -> Vec<EntityMention> {
    let mut out = Vec::new();
    for sentence in &doc.sentences {
        let chars: Vec<char> = sentence.text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let at_token_start = i == 0 || opens_token(chars[i - 1]);
            if !at_token_start || chars[i].is_whitespace() {
                i += 1;
                continue;
            }
            let ends_cleanly = |end: usize| end == chars.len() || !chars[end].is_alphanumeric();
            let gaz_hit = gazetteer.by_first.get(&chars[i]).and_then(|keys| {
                keys.iter().find(|(key, _)| {
                    chars[i..].starts_with(key) && ends_cleanly(i + key.len())
                })
            });
            let hit = match gaz_hit {
                Some((key, etype)) => Some((i + key.len(), *etype)),
                None => {
                    let digits = chars[i..].iter().take_while(|c| c.is_ascii_digit()).count();
                    let end = i + digits;
                    let year_like = digits == 4
                        && ends_cleanly(end)
                        && matches!(chars[i], '1' | '2');
                    year_like.then_some((end, EntityType::Date))
                }
            };
            match hit {
                Some((end, etype)) => {
                    out.push(EntityMention {
                        doc_id: doc.doc_id.clone(),
                        sentence_index: sentence.index,
                        start_char: i,
                        end_char: end,
                        surface: chars[i..end].iter().collect(),
                        etype,
                    });
                    i = end;
                }
                None => i += 1,
            }
        }
    }
    out
}

/// 4-digit numbers in `text` not embedded in a longer digit run.
fn four_digit_numbers(text: &str) -> impl Iterator<Item = i32> + '_ {
    let bytes = text.as_bytes();
    let mut i = 0;
    std::iter::from_fn(move || {
        while i < bytes.len() {
            if !bytes[i].is_ascii_digit() {
                i += 1;
                continue;
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i - start == 4 {
                return text[start..i].parse().ok();
            }
        }
        None
    })
}

/// One [`YearMention`] per distinct in-range year found in each DATE or TIME
/// mention; output follows mention order, years ascending within a mention.
pub fn extract_years(mentions: &[EntityMention], lo: i32, hi: i32) -> Vec<YearMention<'_>> {
    let mut out = Vec::new();
    for m in mentions {
        if !matches!(m.etype, EntityType::Date | EntityType::Time) {
            continue;
        }
        let years: BTreeSet<i32> = four_digit_numbers(&m.surface)
            .filter(|y| (lo..=hi).contains(y))
            .collect();
        out.extend(years.into_iter().map(|year| YearMention {
            doc_id: &m.doc_id,
            sentence_index: m.sentence_index,
            year,
        }));
    }
    out
}
