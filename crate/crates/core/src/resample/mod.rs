//! Resampling algorithms.
//!
//! Undersamplers and cleaners take a whole (possibly multiclass) dataset and
//! treat the smallest class as the minority. Oversamplers work on a binary
//! view, [`Groups`], whose minority rows are grown until the minority count
//! reaches `ceil(ratio * |majority|)`. Synthetic rows carry their
//! construction in [`Provenance::Synthetic`] so every one can be re-derived
//! as `base + (partner - base) * delta`.

mod adasyn;
mod editing;
mod hybrid;
mod near_miss;
mod plan;
mod prototype;
mod random;
mod smote;

pub use adasyn::{adasyn, adasyn_allocation, adasyn_weights};
pub use editing::{
    edited_nn, enn_misclassified, guarded_enn_step, neighborhood_cleaning, repeated_edited_nn,
};
pub use hybrid::{clean_enn, clean_tomek, smote_enn, smote_tomek};
pub use near_miss::{near_miss1, NEAR_MISS_NEIGHBORS};
pub use plan::{DeltaMode, Method, OversampleOptions, ResamplePlan, SmoteVariant};
pub use prototype::{condensed_nn, condensed_store, one_sided_selection};
pub use random::{random_over, random_under};
pub use smote::{danger_rows, majority_counts, smote};

use crate::dataset::{Dataset, Label, SparseVector};
use crate::error::{Error, Result};

/// Where a row of a resampled dataset came from. Indices refer to rows of the
/// input dataset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Provenance {
    Original(usize),
    Duplicate(usize),
    Synthetic(SyntheticOrigin),
}

/// `row = base + (partner - base) * delta`. Extrapolated rows have negative delta.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticOrigin {
    pub base: usize,
    pub partner: usize,
    pub delta: f64,
}

impl Provenance {
    pub fn tag(&self) -> &'static str {
        match self {
            Provenance::Original(_) => "original",
            Provenance::Duplicate(_) => "duplicate",
            Provenance::Synthetic(_) => "synthetic",
        }
    }

    pub fn source(&self) -> Option<usize> {
        match *self {
            Provenance::Original(i) | Provenance::Duplicate(i) => Some(i),
            Provenance::Synthetic(_) => None,
        }
    }
}

/// Conditions worth reporting that did not stop the sampler.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flag {
    /// The minority already met the target; nothing was generated.
    TargetMet,
    /// Borderline SMOTE found no DANGER rows; the input was returned unchanged.
    NoDangerRows,
    /// SVM-SMOTE found no minority support vectors and fell back to regular SMOTE.
    NoSupportVectors,
    /// ADASYN saw no majority neighbors at all and fell back to regular SMOTE.
    ZeroDensity,
    /// A repeated-edit pass spared a class that would otherwise have been emptied.
    ClassSpared(Label),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResampleResult {
    pub dataset: Dataset,
    pub provenance: Vec<Provenance>,
    /// Input rows absent from the output, ascending.
    pub removed: Vec<usize>,
    /// Synthetic rows generated and later removed by a cleaning stage.
    pub dropped_synthetic: usize,
    pub flags: Vec<Flag>,
}

impl ResampleResult {
    pub fn identity(ds: &Dataset) -> Self {
        ResampleResult {
            dataset: ds.clone(),
            provenance: (0..ds.len()).map(Provenance::Original).collect(),
            removed: Vec::new(),
            dropped_synthetic: 0,
            flags: Vec::new(),
        }
    }

    /// Keeps the listed input rows (ascending) and reports the rest as removed.
    pub fn keep(ds: &Dataset, keep: &[usize]) -> Self {
        debug_assert!(keep.windows(2).all(|w| w[0] < w[1]));
        ResampleResult {
            dataset: ds.subset(keep),
            provenance: keep.iter().map(|&i| Provenance::Original(i)).collect(),
            removed: crate::vectorize::complement(ds.len(), keep),
            dropped_synthetic: 0,
            flags: Vec::new(),
        }
    }

    /// Every input row once, followed by the generated rows.
    pub(crate) fn augment(ds: &Dataset, generated: Generated) -> Result<Self> {
        let mut out = ResampleResult::identity(ds);
        for (row, label, prov) in generated.rows {
            out.dataset.push(row, label)?;
            out.provenance.push(prov);
        }
        out.flags = generated.flags;
        Ok(out)
    }

    /// Drops rows of this result by position, updating the removal record.
    pub fn drop_rows(&mut self, positions: &[usize]) {
        if positions.is_empty() {
            return;
        }
        let mut gone = vec![false; self.dataset.len()];
        for &p in positions {
            gone[p] = true;
        }
        let keep: Vec<usize> = (0..gone.len()).filter(|&p| !gone[p]).collect();
        for &p in positions {
            match self.provenance[p] {
                Provenance::Original(i) => self.removed.push(i),
                _ => self.dropped_synthetic += 1,
            }
        }
        self.removed.sort_unstable();
        self.removed.dedup();
        self.dataset = self.dataset.subset(&keep);
        self.provenance = keep.iter().map(|&p| self.provenance[p]).collect();
    }

    pub fn count(&self, tag: &str) -> usize {
        self.provenance.iter().filter(|p| p.tag() == tag).count()
    }
}

/// A binary view for oversampling: minority rows (all of one class) against
/// majority rows. Indices refer to rows of the dataset the view was built on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Groups {
    pub label: Label,
    pub minority: Vec<usize>,
    pub majority: Vec<usize>,
}

impl Groups {
    /// The smallest class against every other row.
    pub fn minority_vs_rest(ds: &Dataset) -> Result<Groups> {
        let label = ds.minority_class().ok_or(Error::EmptyDataset)?;
        let (minority, majority) = (0..ds.len()).partition(|&i| ds.label(i) == label);
        Ok(Groups {
            label,
            minority,
            majority,
        })
    }

    /// Rows of `focus` against rows of the `others` classes.
    pub fn focus(ds: &Dataset, focus: Label, others: &[Label]) -> Groups {
        let mut minority = Vec::new();
        let mut majority = Vec::new();
        for (i, &l) in ds.labels().iter().enumerate() {
            if l == focus {
                minority.push(i);
            } else if others.contains(&l) {
                majority.push(i);
            }
        }
        Groups {
            label: focus,
            minority,
            majority,
        }
    }

    /// Minority rows followed by majority rows.
    pub fn union(&self) -> Vec<usize> {
        let mut u = self.minority.clone();
        u.extend_from_slice(&self.majority);
        u
    }

    /// `ceil(ratio * |majority|)`, the minority size an oversampler aims for.
    pub fn target(&self, ratio: f64) -> usize {
        crate::rng::ceil_tol(ratio * self.majority.len() as f64)
    }
}

/// Rows produced by an oversampler, not yet attached to a dataset.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Generated {
    pub rows: Vec<(SparseVector, Label, Provenance)>,
    pub flags: Vec<Flag>,
}

fn check_ratio(ratio: f64) -> Result<()> {
    if ratio > 0.0 && ratio <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "ratio {ratio} outside (0, 1]"
        )))
    }
}

/// Runs an oversampling plan on a binary view and returns only the new rows.
/// Hybrids return their SMOTE stage; cleaning is left to the caller.
pub fn oversample(ds: &Dataset, groups: &Groups, plan: &ResamplePlan) -> Result<Generated> {
    let opts = plan.oversample_options()?;
    let mut generated = match plan.method {
        Method::RandomOver => random::random_over_rows(ds, groups, opts.ratio, opts.seed)?,
        Method::SmoteRegular | Method::SmoteTomek | Method::SmoteEnn => {
            smote::smote_rows(ds, groups, SmoteVariant::Regular, &opts)?
        }
        Method::SmoteB1 => smote::smote_rows(ds, groups, SmoteVariant::Borderline1, &opts)?,
        Method::SmoteB2 => smote::smote_rows(ds, groups, SmoteVariant::Borderline2, &opts)?,
        Method::SmoteSvm => smote::smote_rows(ds, groups, SmoteVariant::Svm, &opts)?,
        Method::Adasyn => adasyn::adasyn_rows(ds, groups, &opts)?,
        m => {
            return Err(Error::NotAnOversampler {
                method: m.name().to_string(),
            })
        }
    };
    if plan.round_synthetic {
        for (row, _, _) in &mut generated.rows {
            *row = row.rounded();
        }
    }
    Ok(generated)
}

/// Applies a plan to a whole dataset. Oversamplers use the smallest class
/// against all other rows.
pub fn resample(ds: &Dataset, plan: &ResamplePlan) -> Result<ResampleResult> {
    plan.validate()?;
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let k = plan.k_neighbors;
    match plan.method {
        Method::RandomUnder => random_under(ds, plan.ratio_or_one(), plan.seed),
        Method::Cnn => condensed_nn(ds, plan.seed),
        Method::Oss => one_sided_selection(ds, plan.seed),
        Method::Enn => edited_nn(ds, k, &plan.protect),
        Method::Renn => repeated_edited_nn(ds, k, &plan.protect),
        Method::Ncr => neighborhood_cleaning(ds, k),
        Method::NearMiss1 => near_miss1(ds, plan.ratio_or_one()),
        _ => {
            let groups = Groups::minority_vs_rest(ds)?;
            let generated = oversample(ds, &groups, plan)?;
            let result = ResampleResult::augment(ds, generated)?;
            Ok(match plan.method {
                Method::SmoteTomek => clean_tomek(result),
                Method::SmoteEnn => clean_enn(result),
                _ => result,
            })
        }
    }
}
