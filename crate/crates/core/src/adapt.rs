//! Multiclass decomposition for oversamplers.
//!
//! Each class in turn is the focus (group A) and is grown against group B:
//! every other class (`one_vs_all`) or only its ordinal neighbors
//! (`one_vs_neighbor`). Runs read original rows only, so they are independent
//! of each other and of their order.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::resample::{
    self, clean_enn, clean_tomek, Generated, Groups, Method, ResamplePlan, ResampleResult,
};
use crate::rng::derive;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    OneVsAll,
    OneVsNeighbor,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::OneVsAll, Scheme::OneVsNeighbor];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::OneVsAll => "one_vs_all",
            Scheme::OneVsNeighbor => "one_vs_neighbor",
        }
    }

    /// Classes opposing `focus` among `1..=m`.
    pub fn opponents(self, focus: Label, m: usize) -> Vec<Label> {
        let m = m as Label;
        match self {
            Scheme::OneVsAll => (1..=m).filter(|&c| c != focus).collect(),
            Scheme::OneVsNeighbor => [focus.wrapping_sub(1), focus + 1]
                .into_iter()
                .filter(|&c| c >= 1 && c <= m)
                .collect(),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scheme {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionRun {
    pub scheme: Scheme,
    pub focus: Label,
    pub group_a: Vec<usize>,
    pub group_b: Vec<usize>,
}

impl DecompositionRun {
    pub fn groups(&self) -> Groups {
        Groups {
            label: self.focus,
            minority: self.group_a.clone(),
            majority: self.group_b.clone(),
        }
    }
}

/// One run per class, in ascending class order.
pub fn decompose(ds: &Dataset, scheme: Scheme) -> Result<Vec<DecompositionRun>> {
    let m = ds.n_classes();
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "decomposition needs at least two classes, dataset declares {m}"
        )));
    }
    Ok((1..=m as Label)
        .map(|focus| {
            let g = Groups::focus(ds, focus, &scheme.opponents(focus, m));
            DecompositionRun {
                scheme,
                focus,
                group_a: g.minority,
                group_b: g.majority,
            }
        })
        .collect())
}

/// Oversamples every class that is below `ratio * |group B|`, collecting the
/// synthetic rows of all runs after the original rows. Hybrid methods clean
/// the assembled dataset once.
pub fn apply_oversampler(
    ds: &Dataset,
    plan: &ResamplePlan,
    scheme: Scheme,
) -> Result<ResampleResult> {
    if !plan.method.is_oversampler() {
        return Err(Error::NotAnOversampler {
            method: plan.method.name().to_string(),
        });
    }
    plan.validate()?;
    let ratio = plan.ratio.unwrap_or(1.0);
    let runs = decompose(ds, scheme)?;
    let generated: Vec<Generated> = runs
        .par_iter()
        .map(|run| {
            let groups = run.groups();
            if run.group_a.is_empty()
                || run.group_b.is_empty()
                || run.group_a.len() >= groups.target(ratio)
            {
                return Ok(Generated::default());
            }
            let mut run_plan = plan.clone();
            run_plan.seed = derive(plan.seed, "run", u64::from(run.focus));
            resample::oversample(ds, &groups, &run_plan).map_err(|e| Error::InRun {
                class: run.focus,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    let mut all = Generated::default();
    for g in generated {
        all.rows.extend(g.rows);
        all.flags.extend(g.flags);
    }
    let result = ResampleResult::augment(ds, all)?;
    Ok(match plan.method {
        Method::SmoteTomek => clean_tomek(result),
        Method::SmoteEnn => clean_enn(result),
        _ => result,
    })
}

/// Oversamplers go through the decomposition; every other method handles
/// the multiclass dataset itself and ignores `scheme`.
pub fn apply(ds: &Dataset, plan: &ResamplePlan, scheme: Scheme) -> Result<ResampleResult> {
    if plan.method.is_oversampler() {
        apply_oversampler(ds, plan, scheme)
    } else {
        resample::resample(ds, plan)
    }
}

/// The default grid `0.1, 0.2, ..., 1.0`.
pub fn default_ratios() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 10.0).collect()
}

/// One independent result per ratio; the run at position `i` uses seed
/// `plan.seed + i`.
pub fn ratio_sweep(
    ds: &Dataset,
    template: &ResamplePlan,
    scheme: Scheme,
    ratios: &[f64],
) -> Result<Vec<(f64, ResampleResult)>> {
    if ratios.is_empty() {
        return Err(Error::InvalidArgument(
            "ratio sweep needs at least one ratio".into(),
        ));
    }
    ratios
        .par_iter()
        .enumerate()
        .map(|(i, &r)| {
            let mut plan = template.clone();
            plan.ratio = Some(r);
            plan.seed = template.seed.wrapping_add(i as u64);
            apply(ds, &plan, scheme).map(|res| (r, res))
        })
        .collect()
}
