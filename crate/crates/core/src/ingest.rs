//! Corpus ingestion: markup stripping, whitespace normalization and sentence
//! segmentation.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    HtmlPages,
    PlainText,
}

impl SourceKind {
    fn name(self) -> &'static str {
        match self {
            SourceKind::HtmlPages => "html_pages",
            SourceKind::PlainText => "plain_text",
        }
    }
}

/// Undecoded pages of one document, in reading order.
#[derive(Debug, Clone)]
pub struct RawCorpus {
    pub doc_id: String,
    pub pages: Vec<Vec<u8>>,
    pub source_kind: SourceKind,
}

impl RawCorpus {
    pub fn html<I, P>(doc_id: impl Into<String>, pages: I) -> Self
    where
        I: IntoIterator<Item = P>,
        P: Into<Vec<u8>>,
    {
        RawCorpus {
            doc_id: doc_id.into(),
            pages: pages.into_iter().map(Into::into).collect(),
            source_kind: SourceKind::HtmlPages,
        }
    }

    pub fn plain(doc_id: impl Into<String>, text: impl Into<Vec<u8>>) -> Self {
        RawCorpus {
            doc_id: doc_id.into(),
            pages: vec![text.into()],
            source_kind: SourceKind::PlainText,
        }
    }

    /// Loads a directory of `.html`/`.htm` pages (lexicographic filename order)
    /// or a single text file. The document id is the directory name or the
    /// file stem.
    pub fn load(path: &Path) -> Result<Self> {
        let doc_id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "doc".to_string());
        if path.is_dir() {
            let mut files: Vec<_> = fs::read_dir(path)
                .map_err(|e| Error::io(path, e))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| {
                    p.extension()
                        .and_then(|e| e.to_str())
                        .is_some_and(|e| e.eq_ignore_ascii_case("html") || e.eq_ignore_ascii_case("htm"))
                })
                .collect();
            files.sort();
            let pages = files
                .iter()
                .map(|p| fs::read(p).map_err(|e| Error::io(p, e)))
                .collect::<Result<Vec<_>>>()?;
            Ok(RawCorpus {
                doc_id,
                pages,
                source_kind: SourceKind::HtmlPages,
            })
        } else {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            Ok(RawCorpus::plain(doc_id, bytes))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub index: usize,
    pub start_char: usize,
    pub end_char: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub text: String,
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn sentence(&self, index: usize) -> Option<&Sentence> {
        self.sentences.get(index)
    }

    /// Sidecar lines `index<TAB>start_char<TAB>end_char`.
    pub fn sidecar(&self) -> String {
        let mut out = String::new();
        for s in &self.sentences {
            let _ = writeln!(out, "{}\t{}\t{}", s.index, s.start_char, s.end_char);
        }
        out
    }

    /// Rebuilds a document from its text and sentence sidecar.
    pub fn from_sidecar(doc_id: impl Into<String>, text: String, sidecar: &str) -> Result<Self> {
        let byte_at: Vec<usize> = text.char_indices().map(|(i, _)| i).chain([text.len()]).collect();
        let mut sentences = Vec::new();
        for (n, line) in sidecar.lines().enumerate() {
            let line_no = n + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let parse = |i: usize| -> Result<usize> {
                fields
                    .get(i)
                    .and_then(|f| f.parse().ok())
                    .ok_or_else(|| Error::Malformed {
                        line: line_no,
                        message: "expected `index<TAB>start_char<TAB>end_char`".into(),
                    })
            };
            if fields.len() != 3 {
                return Err(Error::Malformed {
                    line: line_no,
                    message: format!("expected 3 fields, found {}", fields.len()),
                });
            }
            let (index, start, end) = (parse(0)?, parse(1)?, parse(2)?);
            if index != sentences.len() || start >= end {
                return Err(Error::Malformed {
                    line: line_no,
                    message: "sentence spans out of order".into(),
                });
            }
            if end >= byte_at.len() {
                return Err(Error::Malformed {
                    line: line_no,
                    message: format!("span {start}..{end} outside document text"),
                });
            }
            let span = &text[byte_at[start]..byte_at[end]];
            sentences.push(Sentence {
                index,
                start_char: start,
                end_char: end,
                text: span.to_string(),
            });
        }
        Ok(Document {
            doc_id: doc_id.into(),
            text,
            sentences,
        })
    }
}

/// Collapses every whitespace run to one space and trims the ends.
pub fn normalize_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

const BLOCK_TAGS: &[&str] = &[
    "address", "article", "aside", "blockquote", "br", "dd", "div", "dl", "dt", "footer",
    "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "li", "main", "nav", "ol", "p",
    "pre", "section", "table", "tbody", "td", "th", "thead", "title", "tr", "ul",
];

/// Strips markup from one page. Unbalanced or truncated tags are tolerated;
/// block-level tags become line breaks so line-based filters still apply.
fn strip_markup(html: &str) -> String {
    let mut out = String::with_capacity(html.len());
    let lower = html.to_ascii_lowercase();
    let bytes = html.as_bytes();
    let mut i = 0;
    let mut text_start = 0;
    while i < bytes.len() {
        if bytes[i] != b'<' {
            i += 1;
            continue;
        }
        let next = bytes.get(i + 1).copied().unwrap_or(b' ');
        if !(next.is_ascii_alphabetic() || matches!(next, b'/' | b'!' | b'?')) {
            // A bare '<' in running text.
            i += 1;
            continue;
        }
        out.push_str(&html[text_start..i]);
        if lower[i..].starts_with("<!--") {
            i = lower[i + 4..].find("-->").map_or(bytes.len(), |p| i + 4 + p + 3);
            text_start = i;
            continue;
        }
        let Some(close) = html[i..].find('>').map(|p| i + p) else {
            // Truncated tag: drop the remainder.
            text_start = bytes.len();
            break;
        };
        let inner = &lower[i + 1..close];
        let name: String = inner
            .trim_start_matches('/')
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric())
            .collect();
        i = close + 1;
        if !inner.starts_with('/') && matches!(name.as_str(), "script" | "style" | "title") {
            let end_tag = format!("</{name}");
            i = match lower[i..].find(&end_tag) {
                Some(p) => lower[i + p..].find('>').map_or(bytes.len(), |q| i + p + q + 1),
                None => bytes.len(),
            };
        } else if BLOCK_TAGS.contains(&name.as_str()) {
            out.push('\n');
        }
        text_start = i;
    }
    if text_start < bytes.len() {
        out.push_str(&html[text_start..]);
    }
    html_escape::decode_html_entities(&out).into_owned()
}

fn is_page_number(line: &str) -> bool {
    let t = line.trim();
    !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
}

fn drop_page_numbers(text: &str) -> String {
    text.lines()
        .filter(|l| !is_page_number(l))
        .collect::<Vec<_>>()
        .join("\n")
}

fn decode_pages(corpus: &RawCorpus) -> Result<Vec<&str>> {
    if corpus.pages.is_empty() {
        return Err(Error::EmptyInput);
    }
    corpus
        .pages
        .iter()
        .enumerate()
        .map(|(page, bytes)| std::str::from_utf8(bytes).map_err(|_| Error::Undecodable { page }))
        .collect()
}

/// Concatenates the visible text of all pages (space-separated) and
/// normalizes whitespace. Sentences are left empty.
pub fn html_to_text(corpus: &RawCorpus, strip_page_numbers: bool) -> Result<Document> {
    if corpus.source_kind != SourceKind::HtmlPages {
        return Err(Error::WrongSourceKind {
            expected: SourceKind::HtmlPages.name(),
            actual: corpus.source_kind.name(),
        });
    }
    let pages = decode_pages(corpus)?;
    let mut joined = String::new();
    for page in pages {
        let mut visible = strip_markup(page);
        if strip_page_numbers {
            visible = drop_page_numbers(&visible);
        }
        joined.push_str(&visible);
        joined.push(' ');
    }
    Ok(Document {
        doc_id: corpus.doc_id.clone(),
        text: normalize_whitespace(&joined),
        sentences: Vec::new(),
    })
}

/// Plain-text counterpart of [`html_to_text`].
pub fn plain_to_text(corpus: &RawCorpus, strip_page_numbers: bool) -> Result<Document> {
    let pages = decode_pages(corpus)?;
    let mut joined = String::new();
    for page in pages {
        if strip_page_numbers {
            joined.push_str(&drop_page_numbers(page));
        } else {
            joined.push_str(page);
        }
        joined.push(' ');
    }
    Ok(Document {
        doc_id: corpus.doc_id.clone(),
        text: normalize_whitespace(&joined),
        sentences: Vec::new(),
    })
}

/// Rule-based sentence splitter.
///
/// A sentence ends at `.`, `!` or `?` (plus any closing quotes or brackets)
/// when followed by a space and an uppercase letter or digit. A period does
/// not end a sentence when the token before it is a single uppercase letter
/// or a listed abbreviation.
#[derive(Debug, Clone)]
pub struct Segmenter {
    abbreviations: HashSet<String>,
}

pub const DEFAULT_ABBREVIATIONS: &[&str] = &["Mr", "Mrs", "Ms", "Dr", "Inc", "Corp", "Co", "U.S"];

impl Default for Segmenter {
    fn default() -> Self {
        Segmenter::new(DEFAULT_ABBREVIATIONS.iter().copied())
    }
}

impl Segmenter {
    pub fn new<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Segmenter {
            abbreviations: abbreviations
                .into_iter()
                .map(|a| a.into().trim_end_matches('.').to_string())
                .collect(),
        }
    }

    fn guards_period(&self, chars: &[char], period: usize) -> bool {
        let start = chars[..period]
            .iter()
            .rposition(|c| c.is_whitespace())
            .map_or(0, |p| p + 1);
        let token: String = chars[start..period].iter().collect();
        let token = token.trim_start_matches(['(', '[', '"', '\'', '\u{201c}', '\u{2018}']);
        let mut cs = token.chars();
        if let (Some(c), None) = (cs.next(), cs.next()) {
            if c.is_uppercase() {
                return true;
            }
        }
        self.abbreviations.contains(token)
    }

    /// Sentence spans as char offsets.
    pub fn spans(&self, text: &str) -> Vec<(usize, usize)> {
        let chars: Vec<char> = text.chars().collect();
        let mut spans = Vec::new();
        let mut start = 0;
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if !matches!(c, '.' | '!' | '?') {
                i += 1;
                continue;
            }
            let mut j = i + 1;
            while j < chars.len() && matches!(chars[j], '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}') {
                j += 1;
            }
            let boundary = j + 1 < chars.len()
                && chars[j] == ' '
                && (chars[j + 1].is_uppercase() || chars[j + 1].is_ascii_digit());
            if boundary && !(c == '.' && self.guards_period(&chars, i)) {
                spans.push((start, j));
                start = j + 1;
                i = j + 1;
            } else {
                i += 1;
            }
        }
        if start < chars.len() {
            spans.push((start, chars.len()));
        }
        spans
    }

    pub fn segment(&self, mut doc: Document) -> Document {
        let chars: Vec<char> = doc.text.chars().collect();
        doc.sentences = self
            .spans(&doc.text)
            .into_iter()
            .enumerate()
            .map(|(index, (start_char, end_char))| Sentence {
                index,
                start_char,
                end_char,
                text: chars[start_char..end_char].iter().collect(),
            })
            .collect();
        doc
    }
}

/// Segments with the default abbreviation list.
pub fn segment_sentences(doc: Document) -> Document {
    Segmenter::default().segment(doc)
}

/// Extracts, normalizes and segments one raw corpus.
pub fn ingest(corpus: &RawCorpus, strip_page_numbers: bool, segmenter: &Segmenter) -> Result<Document> {
    let doc = match corpus.source_kind {
        SourceKind::HtmlPages => html_to_text(corpus, strip_page_numbers)?,
        SourceKind::PlainText => plain_to_text(corpus, strip_page_numbers)?,
    };
    Ok(segmenter.segment(doc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sentence_texts(text: &str) -> Vec<String> {
        segment_sentences(Document {
            doc_id: "d".into(),
            text: text.into(),
            sentences: vec![],
        })
        .sentences
        .into_iter()
        .map(|s| s.text)
        .collect()
    }

    #[test]
    fn concatenates_pages_with_space() {
        let c = RawCorpus::html("d", ["<p>Hello</p>", "<p>world</p>"]);
        assert_eq!(html_to_text(&c, false).unwrap().text, "Hello world");
    }

    #[test]
    fn inline_tags_vanish() {
        let c = RawCorpus::html("d", ["<b>A</b>"]);
        assert_eq!(html_to_text(&c, false).unwrap().text, "A");
    }

    #[test]
    fn page_numbers_stripped_on_request() {
        let page = "<p>The agency acted.\n417\nIt failed.</p>";
        let c = RawCorpus::html("d", [page]);
        assert_eq!(html_to_text(&c, true).unwrap().text, "The agency acted. It failed.");
        assert_eq!(html_to_text(&c, false).unwrap().text, "The agency acted. 417 It failed.");
        // Block tags around the number count as line breaks too.
        let c = RawCorpus::html("d", ["<p>x</p><p> 12 </p><p>y</p>"]);
        assert_eq!(html_to_text(&c, true).unwrap().text, "x y");
    }

    #[test]
    fn script_style_and_comments_removed() {
        let c = RawCorpus::html(
            "d",
            ["<html><head><title>Hidden</title><style>p{color:red}</style><script>var a = 1 < 2;</script></head><!-- hidden --><body>Shown &amp; kept</body>"],
        );
        assert_eq!(html_to_text(&c, false).unwrap().text, "Shown & kept");
    }

    #[test]
    fn lenient_on_broken_markup() {
        let c = RawCorpus::html("d", ["<p>a < b and <i>c</p></div> d <span"]);
        assert_eq!(html_to_text(&c, false).unwrap().text, "a < b and c d");
    }

    #[test]
    fn empty_and_undecodable() {
        let c = RawCorpus::html("d", Vec::<Vec<u8>>::new());
        assert!(matches!(html_to_text(&c, false), Err(Error::EmptyInput)));
        let c = RawCorpus::html("d", [b"ok".to_vec(), vec![0xff, 0xfe]]);
        let err = html_to_text(&c, false).unwrap_err();
        assert!(matches!(err, Error::Undecodable { page: 1 }));
        assert!(err.to_string().contains("page 1"));
    }

    #[test]
    fn plain_text_rejected_by_html_path() {
        let c = RawCorpus::plain("d", "x");
        assert!(matches!(html_to_text(&c, false), Err(Error::WrongSourceKind { .. })));
        assert_eq!(plain_to_text(&c, false).unwrap().text, "x");
    }

    #[test]
    fn whitespace_examples() {
        assert_eq!(normalize_whitespace("a\n\nb\tc"), "a b c");
        assert_eq!(normalize_whitespace("abc"), "abc");
        assert_eq!(normalize_whitespace("  x  "), "x");
        assert_eq!(normalize_whitespace("a\r\n b"), "a b");
    }

    #[test]
    fn segmentation_examples() {
        assert_eq!(sentence_texts("A fell. B rose."), ["A fell.", "B rose."]);
        assert_eq!(sentence_texts("Mr. Smith spoke."), ["Mr. Smith spoke."]);
        assert!(sentence_texts("").is_empty());
    }

    #[test]
    fn abbreviation_guard() {
        // Oracle: the default list plus single-capital initials never split.
        for abbr in DEFAULT_ABBREVIATIONS {
            let text = format!("See {abbr}. Next word here.");
            assert_eq!(sentence_texts(&text).len(), 1, "{text}");
        }
        assert_eq!(sentence_texts("Ben S. Bernanke spoke. Then it ended.").len(), 2);
        assert_eq!(sentence_texts("It grew in the U.S. Markets fell.").len(), 1);
        assert_eq!(sentence_texts("Growth was 3.5 percent. Prices fell!").len(), 2);
        assert_eq!(sentence_texts("He said \"no.\" Then left."), ["He said \"no.\"", "Then left."]);
        assert_eq!(sentence_texts("Was it? 2008 came."), ["Was it?", "2008 came."]);
        assert_eq!(sentence_texts("It ended. then more."), ["It ended. then more."]);
    }

    #[test]
    fn custom_abbreviations() {
        let seg = Segmenter::new(["Gov."]);
        let doc = seg.segment(Document {
            doc_id: "d".into(),
            text: "Gov. Paterson spoke. Mr. Smith left.".into(),
            sentences: vec![],
        });
        let texts: Vec<&str> = doc.sentences.iter().map(|s| s.text.as_str()).collect();
        assert_eq!(texts, ["Gov. Paterson spoke.", "Mr.", "Smith left."]);
    }

    #[test]
    fn sidecar_roundtrip() {
        let doc = segment_sentences(Document {
            doc_id: "d".into(),
            text: "Über alles. Zweiter Satz.".into(),
            sentences: vec![],
        });
        assert_eq!(doc.sidecar(), "0\t0\t11\n1\t12\t25\n");
        let back = Document::from_sidecar("d", doc.text.clone(), &doc.sidecar()).unwrap();
        assert_eq!(back, doc);
        assert!(Document::from_sidecar("d", "abc".into(), "0\t0\t9\n").is_err());
        assert!(Document::from_sidecar("d", "abc".into(), "0\t0\n").is_err());
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in "[ a-zA-Z\t\n\r.]{0,40}") {
            let once = normalize_whitespace(&s);
            prop_assert_eq!(normalize_whitespace(&once), once.clone());
            prop_assert!(!once.contains("  ") && !once.contains('\n') && !once.contains('\t'));
        }

        #[test]
        fn sentences_rejoin_to_text(s in "[A-Za-z0-9 .!?\"]{0,80}") {
            let text = normalize_whitespace(&s);
            let doc = segment_sentences(Document { doc_id: "d".into(), text: text.clone(), sentences: vec![] });
            let joined = doc.sentences.iter().map(|s| s.text.as_str()).collect::<Vec<_>>().join(" ");
            prop_assert_eq!(joined, text);
            for w in doc.sentences.windows(2) {
                prop_assert!(w[0].end_char < w[1].start_char);
            }
            for s in &doc.sentences {
                prop_assert!(s.start_char < s.end_char);
            }
        }

        #[test]
        fn no_tag_brackets_leak(body in "[a-z ]{0,10}", tag in "[a-z]{1,6}") {
            let html = format!("<{tag} class=\"x\">{body}</{tag}><br/>{body}");
            let c = RawCorpus::html("d", [html]);
            let text = html_to_text(&c, false).unwrap().text;
            prop_assert!(!text.contains('<') && !text.contains('>'));
        }
    }
}
