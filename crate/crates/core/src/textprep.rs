//! Comment normalization and tokenization.
//!
//! `normalize` applies, in order:
//!
//! 1. URLs (`http://`, `https://`, `ftp://`, `www.`) become `URL`.
//! 2. Emoticons from a fixed lexicon become `EMO`.
//! 3. Numbers, including decimals, fractions (`1/2`) and times (`10:30`), become `KNUMK`.
//! 4. Runs of three or more identical characters collapse to one.
//! 5. Punctuation is detached from words, one mark per token.
//! 6. Contractions are split: `don't` becomes `do n't`, `he's` becomes `he 's`.
//!
//! The output is whitespace-normalized (single spaces, trimmed) and
//! `normalize(normalize(x)) == normalize(x)`.

use std::collections::HashSet;
use std::sync::LazyLock;

use regex::Regex;

pub const URL_TOKEN: &str = "URL";
pub const EMO_TOKEN: &str = "EMO";
pub const NUM_TOKEN: &str = "KNUMK";

const EMOTICON_DATA: &str = include_str!("../data/emoticons.txt");

static URL_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(?:(?:https?|ftp)://|\bwww\.)\S*").unwrap());
static NUM_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\d+(?:[.,:/]\d+)*").unwrap());

static EMOTICONS: LazyLock<Vec<&'static str>> = LazyLock::new(|| {
    let mut list: Vec<&str> = EMOTICON_DATA
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    // longest first so suffix matching prefers ":-)" over ")"-style overlaps
    list.sort_by_key(|e| std::cmp::Reverse(e.len()));
    list
});
static EMOTICON_SET: LazyLock<HashSet<&'static str>> =
    LazyLock::new(|| EMOTICONS.iter().copied().collect());

const CONTRACTIONS: [&str; 7] = ["n't", "'s", "'re", "'ve", "'ll", "'d", "'m"];

/// A labeled input document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawDocument {
    pub text: String,
    pub label: crate::Label,
}

impl RawDocument {
    pub fn new(label: crate::Label, text: impl Into<String>) -> Self {
        RawDocument {
            text: text.into(),
            label,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<String>,
}

impl TokenStream {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn join(&self) -> String {
        self.tokens.join(" ")
    }
}

pub fn is_special_token(token: &str) -> bool {
    matches!(token, URL_TOKEN | EMO_TOKEN | NUM_TOKEN)
}

pub fn normalize(doc: &RawDocument) -> RawDocument {
    RawDocument {
        text: normalize_text(&doc.text),
        label: doc.label,
    }
}

pub fn normalize_text(text: &str) -> String {
    let text = text.replace('\u{2019}', "'");
    let text = URL_RE.replace_all(&text, " URL ");
    let text = replace_emoticons(&text);
    let text = NUM_RE.replace_all(&text, " KNUMK ");
    let text = squeeze_runs(&text);

    let mut out: Vec<String> = Vec::new();
    for chunk in text.split_whitespace() {
        for piece in detach_punctuation(chunk) {
            split_contractions(piece, &mut out);
        }
    }
    out.join(" ")
}

/// Whitespace split; every token except `URL`, `EMO` and `KNUMK` is lowercased.
pub fn tokenize(doc: &RawDocument) -> TokenStream {
    tokenize_text(&doc.text)
}

pub fn tokenize_text(text: &str) -> TokenStream {
    TokenStream {
        tokens: text
            .split_whitespace()
            .map(|t| {
                if is_special_token(t) {
                    t.to_string()
                } else {
                    t.to_lowercase()
                }
            })
            .collect(),
    }
}

fn replace_emoticons(text: &str) -> String {
    let mut out: Vec<String> = Vec::new();
    for token in text.split_whitespace() {
        let squeezed = squeeze_runs(token);
        if EMOTICON_SET.contains(squeezed.as_str()) {
            out.push(EMO_TOKEN.to_string());
            continue;
        }
        // "great:)" -> "great EMO"; only for emoticons that open with eyes
        let suffix = EMOTICONS.iter().find(|e| {
            e.starts_with([':', ';', '='])
                && squeezed.len() > e.len()
                && squeezed.ends_with(*e)
                && squeezed[..squeezed.len() - e.len()]
                    .chars()
                    .next_back()
                    .is_some_and(char::is_alphanumeric)
        });
        match suffix {
            Some(e) => {
                out.push(squeezed[..squeezed.len() - e.len()].to_string());
                out.push(EMO_TOKEN.to_string());
            }
            None => out.push(token.to_string()),
        }
    }
    out.join(" ")
}

/// Collapses every run of 3+ identical characters to a single character.
pub fn squeeze_runs(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let mut j = i;
        while j < chars.len() && chars[j] == c {
            j += 1;
        }
        let run = j - i;
        let keep = if run >= 3 { 1 } else { run };
        for _ in 0..keep {
            out.push(c);
        }
        i = j;
    }
    out
}

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || ('\u{2000}'..='\u{206F}').contains(&c)
        || matches!(c, '«' | '»' | '¡' | '¿')
}

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !is_punct(c)
}

/// Splits a whitespace-free chunk into words and single punctuation marks.
/// Apostrophes stay inside words ("don't"), and a leading apostrophe stays when
/// the rest is a contraction tail ("'s").
fn detach_punctuation(chunk: &str) -> Vec<&str> {
    let chars: Vec<(usize, char)> = chunk.char_indices().collect();
    let mut pieces = Vec::new();
    let mut word_start: Option<usize> = None;
    let end_of = |k: usize| chars.get(k).map_or(chunk.len(), |&(b, _)| b);

    for k in 0..chars.len() {
        let (b, c) = chars[k];
        let joins_word = if c == '\'' {
            let next_word = chars.get(k + 1).is_some_and(|&(_, n)| is_word_char(n));
            if word_start.is_some() {
                next_word
            } else if next_word {
                let mut e = k + 1;
                while e < chars.len() && is_word_char(chars[e].1) {
                    e += 1;
                }
                let tail = chunk[b..end_of(e)].to_lowercase();
                CONTRACTIONS[1..].contains(&tail.as_str())
            } else {
                false
            }
        } else {
            is_word_char(c)
        };

        if joins_word {
            word_start.get_or_insert(b);
        } else {
            if let Some(s) = word_start.take() {
                pieces.push(&chunk[s..b]);
            }
            pieces.push(&chunk[b..end_of(k + 1)]);
        }
    }
    if let Some(s) = word_start {
        pieces.push(&chunk[s..]);
    }
    pieces
}

fn split_contractions(word: &str, out: &mut Vec<String>) {
    let mut tails = Vec::new();
    let mut rest = word;
    'outer: loop {
        let lower = rest.to_lowercase();
        for suffix in CONTRACTIONS {
            if lower.len() > suffix.len() && lower.ends_with(suffix) {
                let cut = rest.len() - suffix.len();
                if rest.is_char_boundary(cut) {
                    tails.push(&rest[cut..]);
                    rest = &rest[..cut];
                    continue 'outer;
                }
            }
        }
        break;
    }
    out.push(rest.to_string());
    out.extend(tails.into_iter().rev().map(str::to_string));
}
