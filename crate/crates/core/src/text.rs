//! Small string helpers shared by the stages. Offsets are in `char`s.

/// Substring by char offsets, `None` when out of range.
pub(crate) fn char_slice(s: &str, start: usize, end: usize) -> Option<&str> {
    if start > end {
        return None;
    }
    let mut indices = s.char_indices().map(|(i, _)| i).chain(std::iter::once(s.len()));
    let from = indices.nth(start)?;
    let to = if end == start {
        from
    } else {
        indices.nth(end - start - 1)?
    };
    Some(&s[from..to])
}

/// A word token of a sentence, located by char offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Word {
    pub start: usize,
    pub end: usize,
    /// Lowercased text.
    pub norm: String,
    /// True when non-space characters separate this word from the previous one.
    pub broken_before: bool,
}

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '\u{2019}')
}

/// Splits text into alphanumeric words; `-` and apostrophes are kept when they
/// sit between two alphanumerics ("sub-prime", "poor's").
pub(crate) fn words(text: &str) -> Vec<Word> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut gap_has_punct = false;
    while i < chars.len() {
        let c = chars[i];
        if c.is_alphanumeric() {
            let start = i;
            let mut j = i + 1;
            while j < chars.len() {
                if chars[j].is_alphanumeric() {
                    j += 1;
                } else if is_joiner(chars[j])
                    && j + 1 < chars.len()
                    && chars[j + 1].is_alphanumeric()
                {
                    j += 2;
                } else {
                    break;
                }
            }
            out.push(Word {
                start,
                end: j,
                norm: chars[start..j].iter().collect::<String>().to_lowercase(),
                broken_before: gap_has_punct,
            });
            gap_has_punct = false;
            i = j;
        } else {
            if !c.is_whitespace() {
                gap_has_punct = true;
            }
            i += 1;
        }
    }
    out
}
