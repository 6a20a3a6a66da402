//! Text formats for corpora, vocabularies, datasets, rankings, models and
//! predictions. Parsers report `path:line:column` on malformed input.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! artifact reads back bit-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::classify::LinearModel;
use crate::dataset::{Dataset, Label, SparseVector};
use crate::error::{Error, Result};
use crate::igselect::IgRanking;
use crate::resample::{Provenance, ResampleResult};
use crate::textprep::RawDocument;
use crate::vectorize::Vocabulary;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes `text`, creating parent directories as needed.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Whitespace-free fields of a line with their 1-based columns.
fn fields(line: &str, sep: char) -> impl Iterator<Item = (usize, &str)> {
    let mut col = 1;
    line.split(sep).map(move |f| {
        let here = col;
        col += f.chars().count() + 1;
        (here, f)
    })
}

struct Lines<'a> {
    source: PathBuf,
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, source: &Path) -> Self {
        Lines {
            source: source.to_path_buf(),
            inner: text.lines().enumerate(),
        }
    }

    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> Error {
        Error::parse(&self.source, line, column, message)
    }
}

impl<'a> Iterator for Lines<'a> {
    type Item = (usize, &'a str);

    fn next(&mut self) -> Option<Self::Item> {
        self.inner
            .next()
            .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
    }
}

fn parse_label(lines: &Lines, line: usize, column: usize, s: &str) -> Result<Label> {
    match s.parse::<Label>() {
        Ok(l) if l >= 1 => Ok(l),
        _ => Err(lines.err(
            line,
            column,
            format!("expected a positive class label, found {s:?}"),
        )),
    }
}

/// `label<TAB>text` per line.
pub fn parse_corpus(text: &str, source: &Path) -> Result<Vec<RawDocument>> {
    let mut lines = Lines::new(text, source);
    let mut docs = Vec::new();
    while let Some((n, line)) = lines.next() {
        let Some((label, body)) = line.split_once('\t') else {
            return Err(lines.err(
                n,
                line.chars().count() + 1,
                "missing TAB between label and text",
            ));
        };
        docs.push(RawDocument::new(parse_label(&lines, n, 1, label)?, body));
    }
    Ok(docs)
}

pub fn read_corpus(path: &Path) -> Result<Vec<RawDocument>> {
    parse_corpus(&read_text(path)?, path)
}

pub fn format_corpus(docs: &[RawDocument]) -> String {
    let mut s = String::new();
    for d in docs {
        // a newline or tab inside the text would break the line format
        let body: String = d
            .text
            .chars()
            .map(|c| {
                if c == '\n' || c == '\r' || c == '\t' {
                    ' '
                } else {
                    c
                }
            })
            .collect();
        writeln!(s, "{}\t{}", d.label, body).unwrap();
    }
    s
}

/// `# remove_leq=N` then `ngram<TAB>index<TAB>frequency` per entry.
pub fn format_vocabulary(vocab: &Vocabulary) -> String {
    let mut s = format!("# remove_leq={}\n", vocab.remove_leq());
    for (i, (g, f)) in vocab.entries().iter().enumerate() {
        writeln!(s, "{g}\t{i}\t{f}").unwrap();
    }
    s
}

pub fn parse_vocabulary(text: &str, source: &Path) -> Result<Vocabulary> {
    let mut lines = Lines::new(text, source);
    let mut entries = Vec::new();
    let mut remove_leq = 0;
    while let Some((n, line)) = lines.next() {
        if n == 1 && !line.contains('\t') {
            if let Some(v) = line.strip_prefix("# remove_leq=") {
                remove_leq = v
                    .parse()
                    .map_err(|_| lines.err(n, 14, "bad remove_leq value"))?;
                continue;
            }
        }
        let parts: Vec<(usize, &str)> = fields(line, '\t').collect();
        if parts.len() != 3 {
            return Err(lines.err(
                n,
                1,
                format!("expected 3 TAB-separated fields, found {}", parts.len()),
            ));
        }
        let (ci, idx) = parts[1];
        let (cf, freq) = parts[2];
        let idx: usize = idx
            .parse()
            .map_err(|_| lines.err(n, ci, "bad feature index"))?;
        if idx != entries.len() {
            return Err(lines.err(
                n,
                ci,
                format!("expected index {}, found {idx}", entries.len()),
            ));
        }
        let freq: u64 = freq
            .parse()
            .map_err(|_| lines.err(n, cf, "bad frequency"))?;
        entries.push((parts[0].1.to_string(), freq));
    }
    if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(lines.err(1, 1, "vocabulary entries are not in sorted order"));
    }
    Ok(Vocabulary::from_entries(entries, remove_leq))
}

pub fn read_vocabulary(path: &Path) -> Result<Vocabulary> {
    parse_vocabulary(&read_text(path)?, path)
}

/// `# dim=V classes=m` then `label idx:value ...` per row.
pub fn format_dataset(ds: &Dataset) -> String {
    let mut s = format!("# dim={} classes={}\n", ds.dim(), ds.n_classes());
    for (row, label) in ds.rows().iter().zip(ds.labels()) {
        write!(s, "{label}").unwrap();
        for (i, v) in row.iter() {
            write!(s, " {i}:{v}").unwrap();
        }
        s.push('\n');
    }
    s
}

/// Reads the sparse format. Without a header the dimension and class count
/// are inferred from the largest index and label.
pub fn parse_dataset(text: &str, source: &Path) -> Result<Dataset> {
    let mut lines = Lines::new(text, source);
    let mut header: Option<(usize, usize)> = None;
    let mut pairs_rows = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = None;
    while let Some((n, line)) = lines.next() {
        if n == 1 {
            if let Some(h) = line.strip_prefix("# ") {
                header = Some(parse_header(&lines, h)?);
                continue;
            }
        }
        let mut it = fields(line, ' ').filter(|(_, f)| !f.is_empty());
        let Some((c0, label)) = it.next() else {
            return Err(lines.err(n, 1, "empty line"));
        };
        labels.push(parse_label(&lines, n, c0, label)?);
        let mut pairs = Vec::new();
        for (col, f) in it {
            let Some((i, v)) = f.split_once(':') else {
                return Err(lines.err(n, col, format!("expected index:value, found {f:?}")));
            };
            let i: usize = i
                .parse()
                .map_err(|_| lines.err(n, col, "bad feature index"))?;
            let v: f64 = v
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| lines.err(n, col, "bad feature value"))?;
            if let Some((dim, _)) = header {
                if i >= dim {
                    return Err(lines.err(n, col, format!("feature index {i} >= dimension {dim}")));
                }
            }
            if pairs.last().is_some_and(|&(p, _)| p >= i) {
                return Err(lines.err(n, col, "feature indices must increase"));
            }
            max_index = max_index.max(Some(i));
            pairs.push((i, v));
        }
        pairs_rows.push((n, pairs));
    }
    let (dim, m) = header.unwrap_or_else(|| {
        (
            max_index.map_or(0, |i| i + 1),
            labels.iter().copied().max().unwrap_or(0) as usize,
        )
    });
    if let Some((pos, &l)) = labels.iter().enumerate().find(|(_, &l)| l as usize > m) {
        return Err(lines.err(
            pairs_rows[pos].0,
            1,
            format!("label {l} exceeds class count {m}"),
        ));
    }
    let rows = pairs_rows
        .into_iter()
        .map(|(_, p)| SparseVector::from_pairs(dim, p))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(rows, labels, m, dim)
}

fn parse_header(lines: &Lines, h: &str) -> Result<(usize, usize)> {
    let mut dim = None;
    let mut m = None;
    for (col, f) in fields(h, ' ') {
        let bad = || lines.err(1, col + 2, format!("bad header field {f:?}"));
        let (k, v) = f.split_once('=').ok_or_else(bad)?;
        let v: usize = v.parse().map_err(|_| bad())?;
        match k {
            "dim" => dim = Some(v),
            "classes" => m = Some(v),
            _ => return Err(bad()),
        }
    }
    match (dim, m) {
        (Some(d), Some(m)) => Ok((d, m)),
        _ => Err(lines.err(1, 1, "header needs dim= and classes=")),
    }
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    parse_dataset(&read_text(path)?, path)
}

/// `row<TAB>tag<TAB>origin`: the source input row for originals and
/// duplicates, `base:partner:delta` for synthetic rows.
pub fn format_provenance(result: &ResampleResult) -> String {
    let mut s = String::from("row\ttag\torigin\n");
    for (row, p) in result.provenance.iter().enumerate() {
        match p {
            Provenance::Original(i) | Provenance::Duplicate(i) => {
                writeln!(s, "{row}\t{}\t{i}", p.tag())
            }
            Provenance::Synthetic(o) => {
                writeln!(
                    s,
                    "{row}\t{}\t{}:{}:{}",
                    p.tag(),
                    o.base,
                    o.partner,
                    o.delta
                )
            }
        }
        .unwrap();
    }
    s
}

/// `index<TAB>ngram<TAB>ig_score` in ranking order. Without a vocabulary the
/// n-gram column repeats the index.
pub fn format_ranking(ranking: &IgRanking, vocab: Option<&Vocabulary>) -> String {
    let mut s = String::new();
    for &f in &ranking.order {
        let name = vocab.map_or_else(|| f.to_string(), |v| v.ngram(f).to_string());
        writeln!(s, "{f}\t{name}\t{}", ranking.scores[f]).unwrap();
    }
    s
}

/// Header `linear-svm dim=V classes=m reg=R epochs=E seed=S`, then one line
/// per class: the bias followed by the dense weights.
pub fn format_model(model: &LinearModel) -> String {
    let mut s = format!(
        "linear-svm dim={} classes={} reg={} epochs={} seed={}\n",
        model.dim,
        model.n_classes(),
        model.reg,
        model.epochs,
        model.seed
    );
    for (w, b) in model.weights.iter().zip(&model.bias) {
        write!(s, "{b}").unwrap();
        for x in w {
            write!(s, " {x}").unwrap();
        }
        s.push('\n');
    }
    s
}

pub fn parse_model(text: &str, source: &Path) -> Result<LinearModel> {
    let mut lines = Lines::new(text, source);
    let (_, head) = lines
        .next()
        .ok_or_else(|| lines.err(1, 1, "empty model file"))?;
    let mut it = fields(head, ' ');
    if it.next().map(|f| f.1) != Some("linear-svm") {
        return Err(lines.err(1, 1, "expected a linear-svm header"));
    }
    let (mut dim, mut m, mut reg, mut epochs, mut seed) = (None, None, None, None, None);
    for (col, f) in it {
        let bad = || lines.err(1, col, format!("bad header field {f:?}"));
        let (k, v) = f.split_once('=').ok_or_else(bad)?;
        match k {
            "dim" => dim = Some(v.parse::<usize>().map_err(|_| bad())?),
            "classes" => m = Some(v.parse::<usize>().map_err(|_| bad())?),
            "reg" => reg = Some(v.parse::<f64>().map_err(|_| bad())?),
            "epochs" => epochs = Some(v.parse::<usize>().map_err(|_| bad())?),
            "seed" => seed = Some(v.parse::<u64>().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    let (Some(dim), Some(m), Some(reg), Some(epochs), Some(seed)) = (dim, m, reg, epochs, seed)
    else {
        return Err(lines.err(1, 1, "header needs dim, classes, reg, epochs and seed"));
    };
    let mut weights = Vec::with_capacity(m);
    let mut bias = Vec::with_capacity(m);
    for (n, line) in lines.by_ref() {
        let mut vals = Vec::with_capacity(dim + 1);
        for (col, f) in fields(line, ' ') {
            vals.push(
                f.parse::<f64>()
                    .map_err(|_| Error::parse(source, n, col, format!("bad number {f:?}")))?,
            );
        }
        if vals.len() != dim + 1 {
            return Err(Error::parse(
                source,
                n,
                1,
                format!("expected {} numbers, found {}", dim + 1, vals.len()),
            ));
        }
        bias.push(vals[0]);
        vals.remove(0);
        weights.push(vals);
    }
    if weights.len() != m {
        return Err(Error::parse(
            source,
            1,
            1,
            format!("header declares {m} classes, found {}", weights.len()),
        ));
    }
    Ok(LinearModel {
        dim,
        weights,
        bias,
        reg,
        epochs,
        seed,
    })
}

pub fn read_model(path: &Path) -> Result<LinearModel> {
    parse_model(&read_text(path)?, path)
}

/// `row<TAB>true<TAB>predicted` with a header line.
pub fn format_predictions(truth: &[Label], predicted: &[Label]) -> String {
    let mut s = String::from("row\ttrue\tpredicted\n");
    for (i, (t, p)) in truth.iter().zip(predicted).enumerate() {
        writeln!(s, "{i}\t{t}\t{p}").unwrap();
    }
    s
}

pub fn parse_predictions(text: &str, source: &Path) -> Result<(Vec<Label>, Vec<Label>)> {
    let mut lines = Lines::new(text, source);
    let mut truth = Vec::new();
    let mut predicted = Vec::new();
    while let Some((n, line)) = lines.next() {
        if n == 1 && line.starts_with("row") {
            continue;
        }
        let parts: Vec<(usize, &str)> = fields(line, '\t').collect();
        if parts.len() != 3 {
            return Err(lines.err(
                n,
                1,
                format!("expected 3 TAB-separated fields, found {}", parts.len()),
            ));
        }
        truth.push(parse_label(&lines, n, parts[1].0, parts[1].1)?);
        predicted.push(parse_label(&lines, n, parts[2].0, parts[2].1)?);
    }
    Ok((truth, predicted))
}
