use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::config::{Criterion, ExperimentConfig, SamplerSpec};
use crate::dataset::{Dataset, Label};
use crate::error::Result;
use crate::evaluate::{csv_field, csv_header, MetricsReport};
use crate::io::{format_predictions, write_text};

/// One evaluated sweep position. `rows`, `truth` and `predicted` list every
/// test row of every fold, fold by fold.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    /// `None` for methods without a ratio.
    pub ratio: Option<f64>,
    pub report: MetricsReport,
    pub rows: Vec<usize>,
    pub truth: Vec<Label>,
    pub predicted: Vec<Label>,
}

impl SweepPoint {
    fn ratio_label(&self) -> String {
        self.ratio
            .map_or_else(|| "na".to_string(), |r| r.to_string())
    }

    fn value(&self, criterion: Criterion) -> f64 {
        match criterion {
            Criterion::Fscore => self.report.fscore,
            Criterion::Recall(c) => self.report.recall[c as usize - 1],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerOutcome {
    pub spec: SamplerSpec,
    /// Successful points in ascending grid position.
    pub points: Vec<SweepPoint>,
    /// First error met, if any point failed.
    pub failure: Option<String>,
}

/// The point maximizing `criterion`; ties go to the smaller ratio.
pub fn select_representative(points: &[SweepPoint], criterion: Criterion) -> Option<&SweepPoint> {
    let key = |p: &SweepPoint| p.ratio.unwrap_or(0.0);
    points
        .iter()
        .fold(None, |best: Option<&SweepPoint>, p| match best {
            None => Some(p),
            Some(b) => {
                let (vp, vb) = (p.value(criterion), b.value(criterion));
                if vp > vb || (vp == vb && key(p) < key(b)) {
                    Some(p)
                } else {
                    Some(b)
                }
            }
        })
}

/// The files of an experiment, keyed by path relative to the output directory.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExperimentOutput {
    pub files: BTreeMap<String, String>,
}

impl ExperimentOutput {
    pub(crate) fn assemble(
        config: &ExperimentConfig,
        dataset: &Dataset,
        outcomes: Vec<SamplerOutcome>,
    ) -> Self {
        let m = dataset.n_classes();
        let counts = dataset.class_counts();
        let smallest = (0..m).min_by_key(|&c| (counts[c], c)).unwrap_or(0);
        let largest = (0..m)
            .max_by_key(|&c| (counts[c], std::cmp::Reverse(c)))
            .unwrap_or(0);
        let mut files = BTreeMap::new();
        files.insert("config.json".to_string(), config.to_json());

        let mut selection = String::from("criterion,name,ratio,value\n");
        for &criterion in &config.criteria {
            let mut rows: Vec<(f64, String)> = Vec::new();
            let mut failed = Vec::new();
            for o in &outcomes {
                let name = o.spec.display_name();
                let rep = match (&o.failure, select_representative(&o.points, criterion)) {
                    (None, Some(p)) => p,
                    (reason, _) => {
                        let reason = reason.as_deref().unwrap_or("no sweep points");
                        failed.push(format!("{},FAILED,{}", csv_field(&name), csv_field(reason)));
                        continue;
                    }
                };
                writeln!(
                    selection,
                    "{},{},{},{:.6}",
                    criterion.slug(),
                    csv_field(&name),
                    rep.ratio_label(),
                    rep.value(criterion)
                )
                .unwrap();
                rows.push((rep.report.fscore, rep.report.csv_row(&name)));
            }
            // stable: equal f-scores keep config order
            rows.sort_by(|a, b| b.0.total_cmp(&a.0));
            let mut table = csv_header(m);
            table.push('\n');
            for (_, r) in rows {
                table.push_str(&r);
                table.push('\n');
            }
            for f in failed {
                table.push_str(&f);
                table.push('\n');
            }
            files.insert(format!("results_{}.csv", criterion.slug()), table);
        }
        files.insert("selection.csv".to_string(), selection);

        for o in &outcomes {
            let key = o.spec.key();
            if config.write_predictions {
                for p in &o.points {
                    files.insert(
                        format!("predictions/{key}_{}.tsv", p.ratio_label()),
                        format_predictions_with_rows(&p.rows, &p.truth, &p.predicted),
                    );
                }
            }
            files.insert(
                format!("sweeps/{key}.csv"),
                sweep_csv(&o.points, smallest, largest),
            );
        }
        ExperimentOutput { files }
    }

    pub fn write(&self, out_dir: &Path) -> Result<()> {
        for (rel, text) in &self.files {
            write_text(&out_dir.join(rel), text)?;
        }
        Ok(())
    }
}

/// `ratio,accuracy,f-score,rec_min,rec_maj` per point, with the recalls of
/// the given zero-based classes.
pub fn sweep_csv(points: &[SweepPoint], min_class: usize, maj_class: usize) -> String {
    let mut out = String::from("ratio,accuracy,f-score,rec_min,rec_maj\n");
    for p in points {
        let r = &p.report;
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6}",
            p.ratio_label(),
            r.accuracy,
            r.fscore,
            r.recall[min_class],
            r.recall[maj_class]
        )
        .unwrap();
    }
    out
}

fn format_predictions_with_rows(rows: &[usize], truth: &[Label], predicted: &[Label]) -> String {
    let plain = format_predictions(truth, predicted);
    let mut out = String::with_capacity(plain.len());
    for (i, line) in plain.lines().enumerate() {
        if i == 0 {
            out.push_str(line);
        } else {
            let (_, rest) = line.split_once('\t').expect("row column");
            write!(out, "{}\t{rest}", rows[i - 1]).unwrap();
        }
        out.push('\n');
    }
    out
}
