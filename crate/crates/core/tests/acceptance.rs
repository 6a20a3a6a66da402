//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every criterion is reported even when
//! an earlier one fails. Pass criterion numbers as arguments to run a subset.
//! The process exits nonzero on a failure only when `ACCEPTANCE_STRICT` is set.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::Rng as _;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use sentiskew::adapt::{default_ratios, Scheme};
use sentiskew::classify::SvmSettings;
use sentiskew::evaluate::{
    aggregate_folds, confusion, mean_fold_fscore, metrics, ConfusionMatrix, FScore,
};
use sentiskew::experiment::{
    evaluate_plan, prepare, run_experiment, sweep_on, CorpusSource, ExperimentConfig,
};
use sentiskew::igselect::{rank_features, rank_features_base, IgMode};
use sentiskew::neighbors::DistanceIndex;
use sentiskew::resample::{
    adasyn, adasyn_weights, condensed_store, edited_nn, near_miss1, one_sided_selection,
    repeated_edited_nn, smote, smote_enn, smote_tomek, Groups, OversampleOptions, Provenance,
    ResampleResult, SmoteVariant,
};
use sentiskew::rng::{seeded, Rng};
use sentiskew::synth::{SyntheticProfile, EPICURIOUS_COUNTS};
use sentiskew::vectorize::{stratified_split, stratified_train_counts, Fraction};
use sentiskew::{Dataset, Label};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn within(elapsed: Duration, limit: Duration) -> (bool, String) {
    (elapsed < limit, format!("{:.2?} of {:.0?}", elapsed, limit))
}

// ---------------------------------------------------------------- fixtures

fn dense_rows(ds: &Dataset) -> Vec<Vec<f64>> {
    ds.rows().iter().map(|r| r.to_dense()).collect()
}

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `n` rows over `dim` features with `m` skewed classes, at least two rows
/// each. Integer values give many equidistant pairs; `continuous` avoids them.
fn random_dataset(rng: &mut Rng, n: usize, dim: usize, m: usize, continuous: bool) -> Dataset {
    let mut labels: Vec<Label> = (0..n).map(|i| (i % m) as Label + 1).collect();
    for l in labels.iter_mut().skip(2 * m) {
        // skew toward the last class
        if rng.random::<f64>() < 0.6 {
            *l = m as Label;
        }
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    if continuous {
                        rng.random::<f64>() * 3.0
                    } else if rng.random::<f64>() < 0.4 {
                        rng.random_range(1..=3) as f64
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    Dataset::from_dense(&rows, &labels, m).unwrap()
}

fn knn_oracle(x: &[Vec<f64>], q: usize, k: usize, cand: &[usize]) -> Vec<usize> {
    let mut d: Vec<(f64, usize)> = cand
        .iter()
        .filter(|&&j| j != q)
        .map(|&j| (sq(&x[q], &x[j]), j))
        .collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    d.into_iter().take(k).map(|p| p.1).collect()
}

fn tomek_oracle(x: &[Vec<f64>], labels: &[Label]) -> BTreeSet<(usize, usize)> {
    let n = x.len();
    let mut links = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            if labels[i] == labels[j] {
                continue;
            }
            let dij = sq(&x[i], &x[j]);
            let closer = (0..n)
                .any(|z| z != i && z != j && (sq(&x[i], &x[z]) < dij || sq(&x[j], &x[z]) < dij));
            if !closer {
                links.insert((i, j));
            }
        }
    }
    links
}

/// Leave-one-out vote among `k` neighbors; a row is misclassified unless its
/// own class gets strictly more votes than every other class.
fn enn_oracle(x: &[Vec<f64>], labels: &[Label], k: usize) -> Vec<bool> {
    let all: Vec<usize> = (0..x.len()).collect();
    (0..x.len())
        .map(|i| {
            let nb = knn_oracle(x, i, k, &all);
            if nb.is_empty() {
                return false;
            }
            let mut votes: BTreeMap<Label, usize> = BTreeMap::new();
            for j in nb {
                *votes.entry(labels[j]).or_default() += 1;
            }
            let own = votes.get(&labels[i]).copied().unwrap_or(0);
            votes.iter().any(|(&c, &v)| c != labels[i] && v >= own)
        })
        .collect()
}

fn kept_rows(r: &ResampleResult) -> BTreeSet<usize> {
    r.provenance.iter().filter_map(|p| p.source()).collect()
}

fn minority_of(labels: &[Label]) -> Label {
    let mut counts: BTreeMap<Label, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_default() += 1;
    }
    counts
        .iter()
        .min_by_key(|(&c, &n)| (n, c))
        .map(|(&c, _)| c)
        .unwrap()
}

// ---------------------------------------------------------------- criteria

fn c1_stratified_split() -> Outcome {
    let t = Instant::now();
    let expected_train = [72, 522, 3763, 2365];
    let expected_test = [36, 265, 1885, 1181];
    let two_thirds = Fraction::new(2, 3).unwrap();
    let quotas = stratified_train_counts(&EPICURIOUS_COUNTS, two_thirds);

    let labels: Vec<Label> = EPICURIOUS_COUNTS
        .iter()
        .enumerate()
        .flat_map(|(c, &n)| std::iter::repeat_n(c as Label + 1, n))
        .collect();
    let rows = vec![vec![0.0]; labels.len()];
    let ds = Dataset::from_dense(&rows, &labels, 4).unwrap();
    let (train, test) = stratified_split(&ds, two_thirds, 7);
    let (ok_t, time) = within(t.elapsed(), Duration::from_secs(1));
    let pass =
        train.class_counts() == expected_train && test.class_counts() == expected_test && ok_t;
    Outcome::new(
        pass,
        format!(
            "train {:?} test {:?} (quotas {:?}), expected {:?}/{:?}; {time}",
            train.class_counts(),
            test.class_counts(),
            quotas,
            expected_train,
            expected_test
        ),
    )
}

fn c2_neighbor_oracles() -> Outcome {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for seed in 0..200u64 {
        let mut rng = seeded(seed);
        let n = rng.random_range(20..=200);
        let dim = rng.random_range(2..=20);
        let m = rng.random_range(2..=3);
        let ds = random_dataset(&mut rng, n, dim, m, false);
        let x = dense_rows(&ds);
        let labels = ds.labels();
        let all: Vec<usize> = (0..n).collect();
        let index = DistanceIndex::new(ds.rows());

        let k = rng.random_range(1..=7);
        let knn_all = index.all_knn(k);
        for (q, got) in knn_all.iter().enumerate() {
            let want = knn_oracle(&x, q, k, &all);
            if index.knn(q, k, None) != want || *got != want {
                failures.push(format!("seed {seed}: knn row {q}"));
                break;
            }
        }
        let cand: Vec<usize> = (0..n).filter(|i| i % 3 != 0).collect();
        let q = rng.random_range(0..n);
        if index.knn(q, k, Some(&cand)) != knn_oracle(&x, q, k, &cand) {
            failures.push(format!("seed {seed}: restricted knn"));
        }

        let links: BTreeSet<(usize, usize)> = index
            .tomek_links(labels)
            .iter()
            .map(|l| (l.i, l.j))
            .collect();
        if links != tomek_oracle(&x, labels) {
            failures.push(format!("seed {seed}: tomek links"));
        }

        let mis = enn_oracle(&x, labels, 3);
        let want: Vec<usize> = (0..n).filter(|&i| mis[i]).collect();
        if edited_nn(&ds, 3, &[]).unwrap().removed != want {
            failures.push(format!("seed {seed}: enn removal set"));
        }

        // repeated editing by direct simulation, sparing a class that would vanish
        let mut current: Vec<usize> = all.clone();
        loop {
            let cx: Vec<Vec<f64>> = current.iter().map(|&i| x[i].clone()).collect();
            let cl: Vec<Label> = current.iter().map(|&i| labels[i]).collect();
            let mis = enn_oracle(&cx, &cl, 3);
            let vanishing: BTreeSet<Label> = cl
                .iter()
                .copied()
                .filter(|&c| (0..cl.len()).filter(|&p| cl[p] == c).all(|p| mis[p]))
                .collect();
            let next: Vec<usize> = (0..cl.len())
                .filter(|&p| !mis[p] || vanishing.contains(&cl[p]))
                .map(|p| current[p])
                .collect();
            if next.len() == current.len() {
                break;
            }
            current = next;
        }
        let renn = repeated_edited_nn(&ds, 3, &[]).unwrap();
        if kept_rows(&renn) != current.iter().copied().collect() {
            failures.push(format!("seed {seed}: renn fixpoint"));
        }
        let after = enn_oracle(&dense_rows(&renn.dataset), renn.dataset.labels(), 3);
        let stuck = (1..=m as Label).all(|c| {
            let rows: Vec<usize> = (0..renn.dataset.len())
                .filter(|&p| renn.dataset.label(p) == c)
                .collect();
            rows.iter().all(|&p| !after[p]) || rows.iter().all(|&p| after[p])
        });
        if !stuck {
            failures.push(format!("seed {seed}: renn output is not a fixpoint"));
        }

        let ratio = [0.3, 0.5, 0.8, 1.0][rng.random_range(0..4)];
        let minority = minority_of(labels);
        let min_rows: Vec<usize> = (0..n).filter(|&i| labels[i] == minority).collect();
        let target = (min_rows.len() as f64 / ratio - 1e-9).ceil() as usize;
        let mut keep: BTreeSet<usize> = min_rows.iter().copied().collect();
        for c in 1..=m as Label {
            let rows: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
            if c == minority || rows.len() <= target {
                keep.extend(rows);
                continue;
            }
            let mut scored: Vec<(f64, usize)> = rows
                .iter()
                .map(|&r| {
                    let nb = knn_oracle(&x, r, 3, &min_rows);
                    (
                        nb.iter().map(|&j| sq(&x[r], &x[j])).sum::<f64>() / nb.len() as f64,
                        r,
                    )
                })
                .collect();
            scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            keep.extend(scored[..target].iter().map(|p| p.1));
        }
        if kept_rows(&near_miss1(&ds, ratio).unwrap()) != keep {
            failures.push(format!("seed {seed}: near_miss1 retained set"));
        }

        // condensing is checked on tie-free data: exact duplicates with
        // different labels cannot be separated by any store
        let cds = random_dataset(&mut rng, n, dim, m, true);
        let cx = dense_rows(&cds);
        let cl = cds.labels();
        let store = condensed_store(&cds, seed).unwrap();
        let cmin = minority_of(cl);
        if !(0..n)
            .filter(|&i| cl[i] == cmin)
            .all(|i| store.contains(&i))
        {
            failures.push(format!("seed {seed}: store lacks a minority row"));
        }
        for r in 0..n {
            let nearest = store
                .iter()
                .map(|&s| (sq(&cx[r], &cx[s]), s))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .unwrap()
                .1;
            if cl[nearest] != cl[r] {
                failures.push(format!("seed {seed}: store misclassifies row {r}"));
                break;
            }
        }
        let sx: Vec<Vec<f64>> = store.iter().map(|&s| cx[s].clone()).collect();
        let sl: Vec<Label> = store.iter().map(|&s| cl[s]).collect();
        let mut oss_keep: BTreeSet<usize> = store.iter().copied().collect();
        for (a, b) in tomek_oracle(&sx, &sl) {
            for p in [a, b] {
                if sl[p] != cmin {
                    oss_keep.remove(&store[p]);
                }
            }
        }
        if kept_rows(&one_sided_selection(&cds, seed).unwrap()) != oss_keep {
            failures.push(format!("seed {seed}: one-sided selection"));
        }
        checked += 1;
    }
    let (ok_t, time) = within(t.elapsed(), Duration::from_secs(60));
    let head = failures.first().cloned().unwrap_or_default();
    Outcome::new(
        failures.is_empty() && ok_t,
        format!(
            "{checked} seeds, {} disagreements {head}; {time}",
            failures.len()
        ),
    )
}

/// Two overlapping square clouds in the plane; seed 0 with 20 minority and
/// 100 majority rows is the standard fixture.
fn overlapping(seed: u64, n_min: usize, n_maj: usize) -> Dataset {
    let mut rng = seeded(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for _ in 0..n_min {
        rows.push(vec![rng.random::<f64>() * 1.2, rng.random::<f64>() * 1.2]);
        labels.push(1);
    }
    for _ in 0..n_maj {
        rows.push(vec![
            0.8 + rng.random::<f64>() * 1.2,
            0.8 + rng.random::<f64>() * 1.2,
        ]);
        labels.push(2);
    }
    Dataset::from_dense(&rows, &labels, 2).unwrap()
}

fn c3_smote_geometry() -> Outcome {
    let t = Instant::now();
    let variants = [
        SmoteVariant::Regular,
        SmoteVariant::Borderline1,
        SmoteVariant::Borderline2,
        SmoteVariant::Svm,
    ];
    let mut problems = Vec::new();
    let mut worst = 0.0f64;
    let mut counts = [0usize; 4];
    let k = 5;
    for (v, &variant) in variants.iter().enumerate() {
        let mut seed = 0;
        while counts[v] < 250 && seed < 200 {
            let ds = overlapping(seed, 20, 100);
            let x = dense_rows(&ds);
            let groups = Groups::minority_vs_rest(&ds).unwrap();
            let union = groups.union();
            let kprime = |i: usize| {
                knn_oracle(&x, i, k, &union)
                    .iter()
                    .filter(|&&j| ds.label(j) == 2)
                    .count()
            };
            let opts = OversampleOptions::new(1.0, k, seed);
            let out = smote(&ds, &groups, variant, &opts).unwrap();
            for (p, prov) in out.provenance.iter().enumerate() {
                let Provenance::Synthetic(o) = *prov else {
                    continue;
                };
                if counts[v] == 250 {
                    break;
                }
                counts[v] += 1;
                let row = out.dataset.row(p).to_dense();
                let residual = (0..2)
                    .map(|d| {
                        (row[d] - (x[o.base][d] + o.delta * (x[o.partner][d] - x[o.base][d]))).abs()
                    })
                    .fold(0.0, f64::max);
                worst = worst.max(residual);
                let partner_major = ds.label(o.partner) == 2;
                let kp = kprime(o.base);
                let in_range = match variant {
                    SmoteVariant::Regular => !partner_major && (0.0..1.0).contains(&o.delta),
                    SmoteVariant::Borderline1 => {
                        !partner_major && (0.0..1.0).contains(&o.delta) && kp < k && 2 * kp >= k
                    }
                    SmoteVariant::Borderline2 if partner_major => {
                        (0.0..0.5).contains(&o.delta) && kp < k && 2 * kp >= k
                    }
                    SmoteVariant::Borderline2 => {
                        (0.0..1.0).contains(&o.delta) && kp < k && 2 * kp >= k
                    }
                    SmoteVariant::Svm if 2 * kp < k => {
                        !partner_major && (0.0..1.0).contains(&o.delta)
                    }
                    SmoteVariant::Svm => !partner_major && o.delta > -0.5 && o.delta <= 0.0,
                };
                if residual >= 1e-9 || !in_range {
                    problems.push(format!(
                        "{variant:?} seed {seed} row {p}: delta {} k' {kp}",
                        o.delta
                    ));
                }
            }
            seed += 1;
        }
    }
    let total: usize = counts.iter().sum();
    let (ok_t, time) = within(t.elapsed(), Duration::from_secs(10));
    Outcome::new(
        problems.is_empty() && total == 1000 && ok_t,
        format!(
            "{total} rows {counts:?}, max residual {worst:.1e}, {} violations {}; {time}",
            problems.len(),
            problems.first().cloned().unwrap_or_default()
        ),
    )
}

/// Largest-remainder split of `g` by integer weights, ties to the lower index.
fn largest_remainder(weights: &[usize], g: usize) -> Vec<usize> {
    let total: usize = weights.iter().sum();
    let mut out: Vec<usize> = weights.iter().map(|&w| w * g / total).collect();
    let mut rest: Vec<(usize, usize)> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| (w * g % total, i))
        .collect();
    rest.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let left = g - out.iter().sum::<usize>();
    for &(_, i) in &rest[..left] {
        out[i] += 1;
    }
    out
}

fn per_base(out: &ResampleResult, minority: &[usize]) -> Vec<usize> {
    let mut c = vec![0; minority.len()];
    for p in &out.provenance {
        if let Provenance::Synthetic(o) = p {
            c[minority.iter().position(|&m| m == o.base).unwrap()] += 1;
        }
    }
    c
}

/// Minority rows on a line, each with three majority rows at distance one and
/// nothing else nearby, so every minority row has the same k'.
fn uniform_density(seed: u64) -> Dataset {
    let mut rng = seeded(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..10 {
        let cx = 100.0 * i as f64 + rng.random::<f64>();
        rows.push(vec![cx, 0.0]);
        labels.push(1);
        for (dx, dy) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0)] {
            rows.push(vec![cx + dx, dy]);
            labels.push(2);
        }
    }
    for j in 0..3 {
        rows.push(vec![5000.0, j as f64]);
        labels.push(2);
    }
    Dataset::from_dense(&rows, &labels, 2).unwrap()
}

fn c4_adasyn() -> Outcome {
    let mut problems = Vec::new();
    let mut worst_sum = 0.0f64;
    for seed in 0..50u64 {
        let ds = overlapping(seed, 15 + seed as usize % 10, 90);
        let x = dense_rows(&ds);
        let groups = Groups::minority_vs_rest(&ds).unwrap();
        let union = groups.union();
        let k = 5;
        let w = adasyn_weights(&ds, &groups, k).unwrap();
        worst_sum = worst_sum.max((w.iter().sum::<f64>() - 1.0).abs());
        let ratio = [0.5, 0.75, 1.0][seed as usize % 3];
        let out = adasyn(&ds, &groups, &OversampleOptions::new(ratio, k, seed)).unwrap();
        let g =
            (ratio * groups.majority.len() as f64 - 1e-9).ceil() as usize - groups.minority.len();
        let made = per_base(&out, &groups.minority);
        let kprime: Vec<usize> = groups
            .minority
            .iter()
            .map(|&i| {
                knn_oracle(&x, i, k, &union)
                    .iter()
                    .filter(|&&j| ds.label(j) == 2)
                    .count()
            })
            .collect();
        if made.iter().sum::<usize>() != g {
            problems.push(format!(
                "seed {seed}: generated {} of G={g}",
                made.iter().sum::<usize>()
            ));
        } else if made != largest_remainder(&kprime, g) {
            problems.push(format!(
                "seed {seed}: per-base counts differ from largest remainder"
            ));
        }
    }

    let mut ada = vec![0u64; 10];
    let mut reg = vec![0u64; 10];
    for seed in 0..50u64 {
        let ds = uniform_density(seed);
        let groups = Groups::minority_vs_rest(&ds).unwrap();
        let opts = OversampleOptions::new(1.0, 3, seed);
        for (acc, out) in [
            (&mut ada, adasyn(&ds, &groups, &opts).unwrap()),
            (
                &mut reg,
                smote(&ds, &groups, SmoteVariant::Regular, &opts).unwrap(),
            ),
        ] {
            for (a, c) in acc.iter_mut().zip(per_base(&out, &groups.minority)) {
                *a += c as u64;
            }
        }
    }
    // 2 x 10 contingency table of per-base counts
    let (ta, tr) = (
        ada.iter().sum::<u64>() as f64,
        reg.iter().sum::<u64>() as f64,
    );
    let mut stat = 0.0;
    for (&a, &r) in ada.iter().zip(&reg) {
        let col = (a + r) as f64;
        for (obs, tot) in [(a as f64, ta), (r as f64, tr)] {
            let e = col * tot / (ta + tr);
            if e > 0.0 {
                stat += (obs - e).powi(2) / e;
            }
        }
    }
    let p = 1.0 - ChiSquared::new(9.0).unwrap().cdf(stat);
    Outcome::new(
        problems.is_empty() && worst_sum <= 1e-9 && p > 0.01,
        format!(
            "max |sum r - 1| {worst_sum:.1e}, {} allocation errors {}; uniform-k' chi2 {stat:.3} p {p:.3}",
            problems.len(),
            problems.first().cloned().unwrap_or_default()
        ),
    )
}

fn c5_hybrids() -> Outcome {
    let mut problems = Vec::new();
    let mut sizes = Vec::new();
    for seed in 0..20u64 {
        let ds = overlapping(seed, 20, 100);
        let groups = Groups::minority_vs_rest(&ds).unwrap();
        let opts = OversampleOptions::new(1.0, 5, seed);
        let tomek = smote_tomek(&ds, &groups, &opts).unwrap();
        if !tomek_oracle(&dense_rows(&tomek.dataset), tomek.dataset.labels()).is_empty() {
            problems.push(format!("seed {seed}: Tomek link left after smote_tomek"));
        }

        let stage = smote(&ds, &groups, SmoteVariant::Regular, &opts).unwrap();
        let mis = enn_oracle(&dense_rows(&stage.dataset), stage.dataset.labels(), 3);
        let keep: Vec<usize> = (0..mis.len()).filter(|&p| !mis[p]).collect();
        let enn = smote_enn(&ds, &groups, &opts).unwrap();
        if enn.dataset != stage.dataset.subset(&keep) {
            problems.push(format!(
                "seed {seed}: smote_enn differs from composed oracle"
            ));
        }
        let removed_enn = stage.dataset.len() - enn.dataset.len();
        let removed_tomek = stage.dataset.len() - tomek.dataset.len();
        sizes.push((removed_enn, removed_tomek));
    }
    // the size claim is gated on the standard fixture (seed 0); the other
    // seeds are reported only
    let (enn0, tomek0) = sizes[0];
    let holds = sizes.iter().filter(|(e, t)| e >= t).count();
    Outcome::new(
        problems.is_empty() && enn0 >= tomek0,
        format!(
            "standard fixture removed enn {enn0} vs tomek {tomek0}, claim holds on {holds} of {} seeds; {} oracle violations {}",
            sizes.len(),
            problems.len(),
            problems.first().cloned().unwrap_or_default()
        ),
    )
}

/// Information gain from scratch: -sum P(c) log P(c) + sum over values v of
/// P(v) sum P(c|v) log P(c|v), natural log. With `presence` the values are
/// {0, 1}; otherwise every distinct count is its own value.
fn ig_oracle(x: &[Vec<f64>], labels: &[Label], f: usize, presence: bool) -> f64 {
    let n = labels.len() as f64;
    let classes: BTreeSet<Label> = labels.iter().copied().collect();
    let plogp = |p: f64| if p > 0.0 { p * p.ln() } else { 0.0 };
    let mut ig: f64 = -classes
        .iter()
        .map(|&c| plogp(labels.iter().filter(|&&l| l == c).count() as f64 / n))
        .sum::<f64>();
    let value = |v: f64| {
        if presence {
            (v != 0.0) as u64
        } else {
            v as u64
        }
    };
    let values: BTreeSet<u64> = x.iter().map(|r| value(r[f])).collect();
    for v in values {
        let rows: Vec<usize> = (0..x.len()).filter(|&i| value(x[i][f]) == v).collect();
        let nv = rows.len() as f64;
        let inner: f64 = classes
            .iter()
            .map(|&c| plogp(rows.iter().filter(|&&i| labels[i] == c).count() as f64 / nv))
            .sum();
        ig += nv / n * inner;
    }
    ig
}

fn oracle_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        if (scores[a] - scores[b]).abs() <= 1e-9 {
            a.cmp(&b)
        } else {
            scores[b].total_cmp(&scores[a])
        }
    });
    order
}

fn c6_information_gain() -> Outcome {
    let mut problems = Vec::new();
    for seed in 0..50u64 {
        let mut rng = seeded(1000 + seed);
        let m = rng.random_range(2..=4);
        let labels: Vec<Label> = (0..20)
            .map(|i| {
                if i < m {
                    i as Label + 1
                } else {
                    rng.random_range(1..=m as Label)
                }
            })
            .collect();
        let mut rows: Vec<Vec<f64>> = (0..20)
            .map(|_| {
                (0..10)
                    .map(|_| {
                        if rng.random::<f64>() < 0.5 {
                            rng.random_range(1..=3) as f64
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        for r in rows.iter_mut() {
            r[0] = 2.0; // constant column
        }
        let ds = Dataset::from_dense(&rows, &labels, m).unwrap();
        for (mode, presence) in [(IgMode::Presence, true), (IgMode::Count, false)] {
            let r2 = rank_features(&ds, mode);
            if r2.scores.iter().any(|&s| s < -1e-12) {
                problems.push(format!("seed {seed}: negative IG"));
            }
            if r2.scores[0].abs() > 1e-12 {
                problems.push(format!(
                    "seed {seed}: constant feature scored {}",
                    r2.scores[0]
                ));
            }
            for base in [std::f64::consts::E, 10.0] {
                if rank_features_base(&ds, mode, base).order != r2.order {
                    problems.push(format!("seed {seed}: order changes with log base {base}"));
                }
            }
            let oracle: Vec<f64> = (0..10)
                .map(|f| ig_oracle(&rows, &labels, f, presence))
                .collect();
            if r2.order != oracle_order(&oracle) {
                problems.push(format!("seed {seed} {mode:?}: rank differs from oracle"));
            }
            let ln2 = std::f64::consts::LN_2;
            if r2
                .scores
                .iter()
                .zip(&oracle)
                .any(|(s, o)| (s * ln2 - o).abs() > 1e-9)
            {
                problems.push(format!("seed {seed} {mode:?}: score differs from oracle"));
            }
        }
        let binary: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| (v != 0.0) as u8 as f64).collect())
            .collect();
        let bds = Dataset::from_dense(&binary, &labels, m).unwrap();
        let (p, c) = (
            rank_features(&bds, IgMode::Presence),
            rank_features(&bds, IgMode::Count),
        );
        if p.scores != c.scores || p.order != c.order {
            problems.push(format!(
                "seed {seed}: presence and count disagree on binary data"
            ));
        }
    }
    Outcome::new(
        problems.is_empty(),
        format!(
            "50 datasets of 20x10; {} problems {}",
            problems.len(),
            problems.first().cloned().unwrap_or_default()
        ),
    )
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        for &p in &idx[i..=j] {
            ranks[p] = (i + j) as f64 / 2.0 + 1.0;
        }
        i = j + 1;
    }
    ranks
}

/// Pearson correlation of average ranks; 0 when either side is constant.
fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        cov / (va * vb).sqrt()
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn scaled_config(profile: SyntheticProfile, seed: u64) -> ExperimentConfig {
    let mut config =
        ExperimentConfig::new(CorpusSource::Synthetic(profile.with_seed(seed)), vec![]);
    config.features = Some(500);
    config.seed = seed;
    config
}

fn c7_ratio_trend() -> Outcome {
    let t = Instant::now();
    let ratios = default_ratios();
    let mut rho1 = Vec::new();
    let mut rho3 = Vec::new();
    let mut curves = Vec::new();
    for seed in 0..5u64 {
        let config = scaled_config(SyntheticProfile::scaled(2000), seed);
        let prepared = prepare(&config).unwrap();
        let (train, test) = prepared.split_datasets(&prepared.splits[0]);
        let points = sweep_on(
            &train,
            &test,
            sentiskew::resample::Method::Adasyn,
            Scheme::OneVsAll,
            &ratios,
            &SvmSettings::default(),
            FScore::Macro,
            seed,
        )
        .unwrap();
        let r1: Vec<f64> = points.iter().map(|p| p.report.recall[0]).collect();
        let r3: Vec<f64> = points.iter().map(|p| p.report.recall[2]).collect();
        rho1.push(spearman(&ratios, &r1));
        rho3.push(spearman(&ratios, &r3));
        curves.push(format!("{:.2}..{:.2}", r1[0], r1[r1.len() - 1]));
    }
    let (m1, m3) = (median(rho1.clone()), median(rho3.clone()));
    let (ok_t, time) = within(t.elapsed(), Duration::from_secs(600));
    Outcome::new(
        m1 >= 0.6 && m3 <= -0.3 && ok_t,
        format!(
            "median rho(ratio, rec_1) {m1:.2} (need >= 0.6; per seed {:?}, rec_1 {:?}), median rho(ratio, rec_3) {m3:.2} (need <= -0.3); {time}",
            rho1.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>(),
            curves
        ),
    )
}

fn c8_zero_separability() -> Outcome {
    let profile = SyntheticProfile {
        separability: 0.0,
        polarity: 0.0,
        ..SyntheticProfile::scaled(2000)
    };
    let config = scaled_config(profile, 0);
    let prepared = prepare(&config).unwrap();
    let (train, test) = prepared.split_datasets(&prepared.splits[0]);
    let svm_seed = sentiskew::rng::derive(config.seed, "svm", 0);
    let pred = evaluate_plan(&train, &test, None, Scheme::OneVsAll, &config.svm, svm_seed).unwrap();
    let report = metrics(&confusion(test.labels(), &pred, 4).unwrap());
    let counts = test.class_counts();
    let share = *counts.iter().max().unwrap() as f64 / test.len() as f64;
    let (p1, r1) = (report.precision[0], report.recall[0]);
    Outcome::new(
        p1 == 0.0 && r1 == 0.0 && (report.accuracy - share).abs() <= 0.05,
        format!(
            "prec_1 {p1:.3} rec_1 {r1:.3}; accuracy {:.3} vs majority share {share:.3} (|diff| {:.3}, need <= 0.05)",
            report.accuracy,
            (report.accuracy - share).abs()
        ),
    )
}

fn c9_fold_aggregation() -> Outcome {
    let folds = [
        ConfusionMatrix::from_rows(&[vec![10, 0], vec![0, 1]]).unwrap(),
        ConfusionMatrix::from_rows(&[vec![10, 0], vec![1, 0]]).unwrap(),
        ConfusionMatrix::from_rows(&[vec![11, 0], vec![0, 0]]).unwrap(),
    ];
    let pooled = aggregate_folds(&folds, FScore::Macro).unwrap();
    let averaged = mean_fold_fscore(&folds, FScore::Macro);
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let invariant = perms.iter().all(|p| {
        let r = aggregate_folds(&p.map(|i| folds[i].clone()), FScore::Macro).unwrap();
        r.matrix == pooled.matrix
            && r.accuracy == pooled.accuracy
            && r.fscore == pooled.fscore
            && r.precision == pooled.precision
            && r.recall == pooled.recall
            && r.f1 == pooled.f1
    });
    Outcome::new(
        (pooled.fscore - averaged).abs() > 0.05 && invariant,
        format!(
            "pooled macro-F {:.4} vs mean per-fold {averaged:.4}; order invariant {invariant}",
            pooled.fscore
        ),
    )
}

fn tree(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(
                    p.strip_prefix(dir).unwrap().to_path_buf(),
                    std::fs::read(&p).unwrap(),
                );
            }
        }
    }
    out
}

fn c10_determinism() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/epicurious_desk.json");
    let config = ExperimentConfig::load(&path).unwrap();
    let swept = config.samplers.iter().filter(|s| s.swept()).count();
    let mut trees = Vec::new();
    let mut times = Vec::new();
    let tmp = tempfile::tempdir().unwrap();
    for run in 0..2 {
        let t = Instant::now();
        let out = run_experiment(&config).unwrap();
        let dir = tmp.path().join(format!("run{run}"));
        out.write(&dir).unwrap();
        times.push(t.elapsed());
        trees.push(tree(&dir));
    }
    let identical = trees[0] == trees[1];
    let (ok_t, time) = within(*times.iter().max().unwrap(), Duration::from_secs(30 * 60));
    Outcome::new(
        identical && ok_t,
        format!(
            "{} samplers ({swept} swept), {} files, byte-identical {identical}; slowest run {time}",
            config.samplers.len(),
            trees[0].len()
        ),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 10] = [
    (
        1,
        "stratified split of the Epicurious class profile",
        c1_stratified_split,
    ),
    (2, "neighbor and cleaning oracles", c2_neighbor_oracles),
    (3, "SMOTE family geometry", c3_smote_geometry),
    (4, "ADASYN densities and allocation", c4_adasyn),
    (5, "hybrid cleaners", c5_hybrids),
    (6, "information gain", c6_information_gain),
    (
        7,
        "ratio trend of minority and majority recall",
        c7_ratio_trend,
    ),
    (
        8,
        "no-sampling baseline on a zero-separability corpus",
        c8_zero_separability,
    ),
    (9, "pooled fold aggregation", c9_fold_aggregation),
    (10, "end-to-end determinism", c10_determinism),
];

fn main() {
    let wanted: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = Vec::new();
    let mut ran = 0;
    for (n, name, check) in CRITERIA {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        ran += 1;
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::new(false, format!("panicked: {msg}"))
        });
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {verdict}: {name}: {}", outcome.detail);
        if !outcome.pass {
            failed.push(n);
        }
    }
    println!(
        "acceptance: {} of {ran} criteria passed; failed {:?}",
        ran - failed.len(),
        failed
    );
    if !failed.is_empty() && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
