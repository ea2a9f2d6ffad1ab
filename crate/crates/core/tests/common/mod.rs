#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use renyirate::cutstack::{Column, Gadget, RationalInterval};
use renyirate::entropy::FiniteDistribution;
use renyirate::processes::{ProcessModel, Symbol};
use renyirate::spectral::MarkovChain;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn normalize(w: Vec<f64>) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Strictly positive probability vector of length `k`.
pub fn positive_dist(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, k).prop_map(normalize)
}

pub fn dist_any_len(lo: usize, hi: usize) -> impl Strategy<Value = Vec<f64>> {
    (lo..=hi).prop_flat_map(positive_dist)
}

/// Row-stochastic matrix with every entry positive.
pub fn positive_matrix(k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(positive_dist(k), k)
}

pub fn chain(k: usize) -> impl Strategy<Value = MarkovChain> {
    positive_matrix(k).prop_map(|m| MarkovChain::from_dense(&m, None).unwrap())
}

pub fn iid_model() -> impl Strategy<Value = ProcessModel> {
    dist_any_len(2, 3).prop_map(|d| ProcessModel::iid(FiniteDistribution::new(d).unwrap()).unwrap())
}

pub fn markov_model() -> impl Strategy<Value = ProcessModel> {
    (2usize..=3, 1usize..=2).prop_flat_map(|(a, order)| {
        prop::collection::vec(positive_dist(a), a.pow(order as u32))
            .prop_map(move |table| ProcessModel::markov(a, order, table, None).unwrap())
    })
}

pub fn hmm_model() -> impl Strategy<Value = ProcessModel> {
    (2usize..=3, 2usize..=3).prop_flat_map(|(states, a)| {
        (positive_matrix(states), prop::collection::vec(positive_dist(a), states)).prop_map(|(t, e)| {
            ProcessModel::hmm(MarkovChain::from_dense(&t, None).unwrap(), e).unwrap()
        })
    })
}

pub fn any_model() -> impl Strategy<Value = ProcessModel> {
    prop_oneof![iid_model(), markov_model(), hmm_model()]
}

/// One column per `(width, label)`, levels laid end to end from `start`.
pub fn layout(start: &BigRational, cols: &[(BigRational, Vec<Symbol>)]) -> Gadget {
    let mut at = start.clone();
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

/// Raw column description: width weight, height and label seed.
pub type ColumnSpec = (u32, usize, u32);

pub fn column_specs(max_cols: usize, max_height: usize) -> impl Strategy<Value = Vec<ColumnSpec>> {
    prop::collection::vec((1u32..20, 1usize..=max_height, any::<u32>()), 1..=max_cols)
}

fn label_from(seed: u32, h: usize) -> Vec<Symbol> {
    (0..h).map(|i| ((seed >> (i % 32)) & 1) as Symbol).collect()
}

/// Gadget of total width `1/t` starting at `start`; fits in `[start, start + 1/2)`
/// when `t ≥ 2·max height`.
pub fn gadget_from_specs(start: &BigRational, specs: &[ColumnSpec], t: i64) -> Gadget {
    let n: i64 = specs.iter().map(|s| s.0 as i64).sum();
    let cols: Vec<(BigRational, Vec<Symbol>)> = specs
        .iter()
        .map(|&(w, h, seed)| (rat(w as i64, n * t), label_from(seed, h)))
        .collect();
    layout(start, &cols)
}

/// Unit-measure gadget of uniform height with the given weights and labels.
pub fn unit_gadget(weights: &[u32], labels: &[Vec<Symbol>]) -> Gadget {
    let h = labels[0].len() as i64;
    let n: i64 = weights.iter().map(|w| *w as i64).sum();
    let cols: Vec<(BigRational, Vec<Symbol>)> = weights
        .iter()
        .zip(labels)
        .map(|(w, l)| (rat(*w as i64, n * h), l.clone()))
        .collect();
    layout(&rat(0, 1), &cols)
}
