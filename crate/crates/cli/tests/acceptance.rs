//! Acceptance gate: one line per criterion, then a single assertion.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use renyirate::approx::{approx_rate_sequence, markov_approximation, renyi_rate_approx};
use renyirate::counterexample::{
    all_ones_lower_bound, build_g1, construct, entropy_lower_bound_sequence, renyi_upper_bound_sequence,
    ConstructionParams,
};
use renyirate::cutstack::{
    fractional_ics, independent_cut_stack, kronecker, m_fold_ics, merge_gadget, normalized_shannon_entropy, Column,
    Gadget, RationalInterval,
};
use renyirate::entropy::{binary_entropy, renyi_entropy, shannon_entropy, FiniteDistribution};
use renyirate::fit::fit_polynomial;
use renyirate::processes::{renyi_entropy_prefix, renyi_rate_sequence, ProcessModel, Symbol};
use renyirate::rational::{int, rat, to_f64, zero, Rational};
use renyirate::spectral::{renyi_rate_markov, shannon_rate_markov, MarkovChain};

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_dist(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn random_table(rng: &mut ChaCha8Rng, k: usize) -> Vec<Vec<f64>> {
    (0..k).map(|_| random_dist(rng, k)).collect()
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut shrink = BTreeMap::new();
    for _ in 0..10 {
        let table = random_table(&mut rng, 3);
        let mc = MarkovChain::from_dense(&table, None).map_err(|e| e.to_string())?;
        let p = ProcessModel::markov(3, 1, table, None).map_err(|e| e.to_string())?;
        for alpha in [0.5, 2.0, 4.0] {
            let rate = renyi_rate_markov(&mc, alpha, 2.0).unwrap().value;
            let gap = |n: usize| (renyi_entropy_prefix(&p, n, alpha, 2.0).unwrap().value / n as f64 - rate).abs();
            let (g6, g12) = (gap(6), gap(12));
            worst = worst.max(g12);
            *shrink.entry(alpha.to_bits()).or_insert(0) += usize::from(g12 < g6);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let min_shrink = *shrink.values().min().unwrap();
    check(
        worst <= 0.05 && min_shrink >= 9 && secs < 30.0,
        format!("max gap at n=12 {worst:.4} bits, gap shrinks 6→12 in ≥{min_shrink}/10 per α, {secs:.1}s"),
    )
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let k = rng.gen_range(2..=8);
        let d = FiniteDistribution::new(random_dist(&mut rng, k)).unwrap();
        let h = shannon_entropy(&d, 2.0).unwrap().value;
        for a in [1.0 - 1e-4, 1.0 + 1e-4] {
            worst = worst.max((renyi_entropy(&d, a, 2.0).unwrap().value - h).abs());
        }
    }
    for _ in 0..10 {
        let mc = MarkovChain::from_dense(&random_table(&mut rng, 3), None).unwrap();
        let h = shannon_rate_markov(&mc, 2.0).unwrap().value;
        for a in [1.0 - 1e-4, 1.0 + 1e-4] {
            worst = worst.max((renyi_rate_markov(&mc, a, 2.0).unwrap().value - h).abs());
        }
    }
    check(worst <= 1e-2, format!("max |H_α − H| at α = 1 ± 1e-4: {worst:.2e} bits"))
}

fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let p = ProcessModel::markov(3, 1, random_table(&mut rng, 3), None).unwrap();
        for alpha in [0.5, 2.0, 4.0] {
            let r: Vec<f64> = (1..=3)
                .map(|m| renyi_rate_approx(&markov_approximation(&p, m).unwrap(), alpha, 2.0).unwrap().value)
                .collect();
            worst = worst.max((r[0] - r[1]).abs()).max((r[0] - r[2]).abs());
        }
    }
    check(worst <= 1e-9, format!("max spread over m = 1, 2, 3: {worst:.2e} bits"))
}

fn example_hmm() -> ProcessModel {
    ProcessModel::binary_hmm(0.3, 0.05).unwrap()
}

fn criterion_4() -> Verdict {
    let r = approx_rate_sequence(&example_hmm(), 2.0, 6, 2.0).map_err(|e| e.to_string())?;
    let diffs: Vec<f64> = r.differences().iter().map(|d| d.abs()).collect();
    let positive = diffs.len() == 5 && diffs.iter().all(|d| *d > 0.0);
    check(
        positive && r.fitted_rate < 1.0 && r.residual_rms < 0.15,
        format!(
            "|ΔH| for m = 1..5 = {:?}, ρ̂ = {:.4}, residual RMS = {:.4}",
            diffs.iter().map(|d| format!("{d:.2e}")).collect::<Vec<_>>(),
            r.fitted_rate,
            r.residual_rms
        ),
    )
}

fn criterion_5() -> Verdict {
    let seq = renyi_rate_sequence(&example_hmm(), 14, 2.0, 2.0).map_err(|e| e.to_string())?;
    let from2: Vec<(usize, f64)> = seq.estimates.iter().copied().filter(|e| e.0 >= 2).collect();
    let fit = fit_polynomial(&from2);
    let diffs: Vec<f64> = from2.windows(2).map(|w| (w[1].1 - w[0].1).abs()).collect();
    // diffs[i] is |v_{i+3} − v_{i+2}|; start at n = 6
    let tail = &diffs[4..];
    let monotone = tail.windows(2).all(|w| w[1] < w[0]);
    check(
        (0.4..=1.6).contains(&fit.fitted_rate) && monotone,
        format!("γ̂ = {:.4} on n = 2..14, differences shrink for n ≥ 6: {monotone}", fit.fitted_rate),
    )
}

/// Columns of the given widths, heights and labels laid end to end from `start`.
fn layout(start: Rational, cols: &[(Rational, Vec<Symbol>)]) -> Gadget {
    let mut at = start;
    let mut out = Vec::new();
    for (w, label) in cols {
        let mut levels = Vec::new();
        for _ in label {
            levels.push(RationalInterval::new(at.clone(), w.clone()).unwrap());
            at += w;
        }
        out.push(Column::from_intervals(levels, label.clone()).unwrap());
    }
    Gadget::new(out).unwrap()
}

/// Gadget of total width `1/6` with up to four columns of height ≤ 3.
fn random_gadget(rng: &mut ChaCha8Rng, start: Rational) -> Gadget {
    let k = rng.gen_range(1..=4);
    let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..20)).collect();
    let n: i64 = weights.iter().sum();
    let cols: Vec<(Rational, Vec<Symbol>)> = weights
        .iter()
        .map(|&w| {
            let h = rng.gen_range(1..=3);
            (rat(w, 6 * n), (0..h).map(|_| rng.gen_range(0..2)).collect())
        })
        .collect();
    layout(start, &cols)
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = 0;
    for _ in 0..50 {
        let s = random_gadget(&mut rng, zero());
        let t = random_gadget(&mut rng, rat(1, 2));
        let g = independent_cut_stack(&s, &t).unwrap();
        bad += usize::from(g.width_distribution() != kronecker(&s.width_distribution(), &t.width_distribution()));
    }
    for m in [2, 3, 4] {
        let s = random_gadget(&mut rng, zero());
        let w = s.width_distribution();
        let mut expect = w.clone();
        for _ in 1..m {
            expect = kronecker(&expect, &w);
        }
        bad += usize::from(m_fold_ics(&s, m).width_distribution() != expect);
    }
    check(bad == 0, format!("{bad} mismatches over 50 ICS and 3 M-fold instances (exact)"))
}

fn label(i: usize, h: usize) -> Vec<Symbol> {
    (0..h).map(|b| ((i >> b) & 1) as Symbol).collect()
}

/// Unit-measure gadget of height 3; column 0 shares its label with column 1.
fn lemma_gadget(rng: &mut ChaCha8Rng, distinct: bool) -> Gadget {
    let k = rng.gen_range(2..=5);
    let idx: Vec<usize> = if distinct {
        let mut all: Vec<usize> = (0..8).collect();
        for i in (1..all.len()).rev() {
            all.swap(i, rng.gen_range(0..=i));
        }
        all[..k].to_vec()
    } else {
        (0..k).map(|_| rng.gen_range(0..3)).collect()
    };
    let mut labels = vec![label(idx[0], 3)];
    labels.extend(idx.iter().map(|&i| label(i, 3)));
    let weights: Vec<i64> = (0..=k).map(|_| rng.gen_range(1..30)).collect();
    let n: i64 = weights.iter().sum();
    let cols: Vec<(Rational, Vec<Symbol>)> =
        weights.iter().zip(labels).map(|(&w, l)| (rat(w, 3 * n), l)).collect();
    layout(zero(), &cols)
}

fn split(g: &Gadget) -> (Column, Gadget) {
    (g.columns()[0].clone(), Gadget::new(g.columns()[1..].to_vec()).unwrap())
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut merge_bad = 0;
    for _ in 0..25 {
        let g = lemma_gadget(&mut rng, false);
        let a = normalized_shannon_entropy(&g, 2.0).unwrap();
        let b = normalized_shannon_entropy(&merge_gadget(&g), 2.0).unwrap();
        merge_bad += usize::from(a != b || g.label_distribution() != merge_gadget(&g).label_distribution());
    }
    let mut lemma_gap: f64 = 0.0;
    for _ in 0..25 {
        let g = lemma_gadget(&mut rng, false);
        let m = rng.gen_range(1..=3);
        let (c0, rest) = split(&g);
        let a = normalized_shannon_entropy(&fractional_ics(&c0, &rest, m).unwrap(), 2.0).unwrap();
        let b = normalized_shannon_entropy(&fractional_ics(&c0, &merge_gadget(&rest), m).unwrap(), 2.0).unwrap();
        lemma_gap = lemma_gap.max((a - b).abs());
    }
    let mut violations = 0;
    let mut tried = 0;
    while tried < 100 {
        let g = lemma_gadget(&mut rng, true);
        let (c0, rest) = split(&g);
        let shared = c0.measure() + rest.columns().iter().filter(|c| c.label() == c0.label()).fold(zero(), |a, c| a + c.measure());
        if to_f64(&shared) > (-1.0f64).exp() {
            continue;
        }
        tried += 1;
        let m = rng.gen_range(1..=3);
        let before = normalized_shannon_entropy(&g, 2.0).unwrap();
        let after = normalized_shannon_entropy(&fractional_ics(&c0, &rest, m).unwrap(), 2.0).unwrap();
        let hb = binary_entropy(to_f64(&c0.measure()), 2.0).unwrap();
        violations += usize::from(after < before - hb - 1e-12);
    }
    check(
        merge_bad == 0 && lemma_gap < 1e-12 && violations == 0,
        format!(
            "merge mismatches {merge_bad}/25, max |H(S') − H(S̃')| = {lemma_gap:.1e} over 25, entropy-drop violations {violations}/100"
        ),
    )
}

fn criterion_8() -> Verdict {
    let g1 = build_g1(&ConstructionParams::toy()).map_err(|e| e.to_string())?;
    let iv = g1.intervals.as_ref().ok_or("toy G(1) keeps intervals")?;
    let mut cols = iv.right.columns().to_vec();
    cols.push(iv.left.clone());
    let mut pooled: BTreeMap<Vec<Symbol>, Rational> = BTreeMap::new();
    for c in &cols {
        let measure = c.width() * int(c.height() as u64);
        *pooled.entry(c.label().to_vec()).or_insert_with(zero) += measure;
    }
    let by_hand: f64 = pooled.values().map(|m| -to_f64(m) * to_f64(m).log2()).sum::<f64>() / 6.0;
    let ours = normalized_shannon_entropy(&Gadget::new(cols).unwrap(), 2.0).unwrap();
    let closed = 31.0 / 48.0;
    check(
        (ours - closed).abs() < 1e-12 && (by_hand - closed).abs() < 1e-12,
        format!("H(G(1)) = {ours:.15}, from column measures {by_hand:.15}, 31/48 = {closed:.15}"),
    )
}

fn criterion_9() -> Verdict {
    let start = Instant::now();
    let toy = ConstructionParams::toy();
    let levels = construct(&toy, 3).map_err(|e| e.to_string())?;
    let b_ok = levels.iter().all(|l| all_ones_lower_bound(l).is_ok());
    let h: Vec<f64> = levels
        .iter()
        .map(|l| l.labels.as_ref().unwrap().normalized_shannon_entropy(2.0).unwrap())
        .collect();
    let corollary = (0..2).all(|i| {
        let hb = binary_entropy(to_f64(&toy.beta(i + 2)), 2.0).unwrap();
        h[i + 1] >= h[i] - hb - 1e-12
    });
    let faithful = ConstructionParams::faithful().map_err(|e| e.to_string())?;
    let bounds = entropy_lower_bound_sequence(&faithful, 50).map_err(|e| e.to_string())?;
    let min_bound = bounds.iter().cloned().fold(f64::INFINITY, f64::min);
    let built = construct(&faithful, 50).map_err(|e| e.to_string())?;
    let tracks = built.iter().all(|l| l.entropy >= l.entropy_lower_bound - 1e-9);
    let renyi = *renyi_upper_bound_sequence(&faithful, 2.0, 10_000).map_err(|e| e.to_string())?.last().unwrap();
    let secs = start.elapsed().as_secs_f64();
    check(
        b_ok && corollary && min_bound > 0.5 && tracks && renyi < 0.05 && secs < 60.0,
        format!(
            "toy: (B) exact {b_ok}, corollary at m = 1, 2 {corollary}; faithful l1 = {}, N = {}: min bound over 50 levels {min_bound:.4}, gadget entropies above bounds {tracks}, Rényi bound at m = 10^4 {renyi:.4}; {secs:.1}s",
            faithful.l1, faithful.n
        ),
    )
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).to_string_lossy().into_owned()
}

/// Runs the binary in a fresh directory; returns stdout and every file it wrote.
fn snapshot(args: &[String]) -> (i32, Vec<(PathBuf, Vec<u8>)>, Vec<u8>) {
    let dir = tempfile::tempdir().unwrap();
    let mut full: Vec<String> = args.to_vec();
    if !matches!(args.first().map(String::as_str), Some("cutstack")) {
        full.push("--out".into());
        full.push(dir.path().to_string_lossy().into_owned());
    }
    let o = Command::new(env!("CARGO_BIN_EXE_renyirate")).args(&full).output().unwrap();
    let mut files: Vec<(PathBuf, Vec<u8>)> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().into(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    (o.status.code().unwrap_or(-1), files, o.stdout)
}

fn criterion_10() -> Verdict {
    let runs: Vec<Vec<String>> = [
        vec!["renyi", &data("hmm_flip05.txt"), "--enumerate", "--n-max", "12", "--alpha", "0.5,2"],
        vec!["renyi", &data("markov2.txt"), "--spectral", "--enumerate", "--alpha", "2,4"],
        vec!["approx", &data("hmm_flip05.txt"), "--m-max", "6"],
        vec!["cutstack", "ics", &data("left.gadget"), &data("right.gadget")],
        vec!["cutstack", "merge", &data("quarter.gadget")],
        vec!["cutstack", "mfold", &data("left.gadget"), "-m", "3"],
        vec!["cutstack", "entropy", &data("quarter.gadget")],
        vec!["cutstack", "eps-indep", &data("left.gadget"), &data("right.gadget")],
        vec!["counterexample", "--mode", "toy", "--levels", "3", "--alpha", "2,4"],
        vec!["counterexample", "--mode", "faithful", "--levels", "50"],
        vec!["sample", &data("hmm_flip05.txt"), "-n", "500", "--seed", "11"],
    ]
    .iter()
    .map(|r| r.iter().map(|s| s.to_string()).collect())
    .collect();
    let mut differing = Vec::new();
    for args in &runs {
        let a = snapshot(args);
        let b = snapshot(args);
        if a.0 != 0 || a != b || (a.1.is_empty() && a.2.is_empty()) {
            differing.push(format!("{} {}", args[0], args[1]));
        }
    }
    check(
        differing.is_empty(),
        format!("{} subcommand runs repeated; differing or failing: {differing:?}", runs.len()),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("1 spectral-enumeration agreement", criterion_1),
        ("2 continuity at alpha = 1", criterion_2),
        ("3 upscaling invariance", criterion_3),
        ("4 exponential approximation trend", criterion_4),
        ("5 polynomial-rate property", criterion_5),
        ("6 Kronecker width law", criterion_6),
        ("7 gadget entropy lemmas", criterion_7),
        ("8 G(1) closed form", criterion_8),
        ("9 counterexample verdicts", criterion_9),
        ("10 determinism", criterion_10),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (name, f) in criteria {
        let verdict = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, detail) = match &verdict {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        writeln!(out, "[{tag}] criterion {name}: {detail}").unwrap();
        if verdict.is_err() {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
