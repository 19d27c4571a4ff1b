//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use sonar_belief::{FocalSet, Frame, MassFunction};

pub fn frame(n: usize) -> Frame {
    Frame::new((0..n).map(|i| format!("c{i}"))).unwrap()
}

pub fn ab() -> Frame {
    Frame::new(["A", "B"]).unwrap()
}

/// The two expert bbas of the two-class worked example.
pub fn worked_pair() -> (MassFunction, MassFunction) {
    let f = ab();
    let m1 = MassFunction::from_labels(f.clone(), &[("A", 0.6), ("A|B", 0.4)]).unwrap();
    let m2 = MassFunction::from_labels(f, &[("A", 0.3), ("B", 0.2), ("A|B", 0.5)]).unwrap();
    (m1, m2)
}

fn normalized(frame: Frame, raw: Vec<(u32, f64)>) -> MassFunction {
    let total: f64 = raw.iter().map(|r| r.1).sum();
    MassFunction::new(
        frame,
        raw.into_iter()
            .map(|(b, w)| (FocalSet::from_bits(b), w / total)),
    )
    .unwrap()
}

fn raw_entries(n: usize, open_world: bool) -> impl Strategy<Value = Vec<(u32, f64)>> {
    let lo = if open_world { 0 } else { 1 };
    prop::collection::vec((lo..(1u32 << n), 0.01f64..1.0), 1..6)
}

/// `count` random bbas on one frame of 1..=max_n classes.
pub fn bbas(
    max_n: usize,
    count: usize,
    open_world: bool,
) -> impl Strategy<Value = Vec<MassFunction>> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(raw_entries(n, open_world), count)
            .prop_map(move |raws| raws.into_iter().map(|r| normalized(frame(n), r)).collect())
    })
}

pub fn bba(max_n: usize, open_world: bool) -> impl Strategy<Value = MassFunction> {
    bbas(max_n, 1, open_world).prop_map(|mut v| v.remove(0))
}

pub fn all_sets(n: usize) -> impl Iterator<Item = FocalSet> {
    (0..1u32 << n).map(FocalSet::from_bits)
}

pub fn bel_oracle(m: &MassFunction, x: FocalSet) -> f64 {
    let n = m.frame().len();
    (1..1u32 << n)
        .filter(|y| y & !x.bits() == 0)
        .map(|y| m.mass(FocalSet::from_bits(y)))
        .sum()
}

pub fn pl_oracle(m: &MassFunction, x: FocalSet) -> f64 {
    let n = m.frame().len();
    (1..1u32 << n)
        .filter(|y| y & x.bits() != 0)
        .map(|y| m.mass(FocalSet::from_bits(y)))
        .sum()
}

pub fn betp_oracle(m: &MassFunction, x: FocalSet) -> f64 {
    let n = m.frame().len();
    let open = 1.0 - m.mass(FocalSet::EMPTY);
    let mut s = 0.0;
    for y in 1..1u32 << n {
        let common = (x.bits() & y).count_ones() as f64;
        s += common / y.count_ones() as f64 * m.mass(FocalSet::from_bits(y)) / open;
    }
    s
}

/// Calls `f` with every tuple of subsets (one per source, from the whole
/// power set, zero masses included) and their masses.
pub fn each_tuple(n: usize, sources: &[&MassFunction], f: &mut dyn FnMut(&[u32], &[f64])) {
    let k = sources.len();
    let size = 1usize << n;
    let mut sets = vec![0u32; k];
    let mut masses = vec![0.0; k];
    for code in 0..size.pow(k as u32) {
        let mut c = code;
        for j in 0..k {
            sets[j] = (c % size) as u32;
            masses[j] = sources[j].mass(FocalSet::from_bits(sets[j]));
            c /= size;
        }
        f(&sets, &masses);
    }
}

/// Conjunctive consensus by full enumeration, one value per subset code.
pub fn conjunctive_oracle(sources: &[MassFunction]) -> Vec<f64> {
    let n = sources[0].frame().len();
    let full = (1u32 << n) - 1;
    let mut out = vec![0.0; 1 << n];
    let refs: Vec<&MassFunction> = sources.iter().collect();
    each_tuple(n, &refs, &mut |sets, masses| {
        let inter = sets.iter().fold(full, |a, &s| a & s);
        out[inter as usize] += masses.iter().product::<f64>();
    });
    out
}

/// PCR written term by term: for every non-empty X and every source i,
/// the `(M−1)`-tuples of the other sources over the whole power set whose
/// intersection misses X contribute `m_i(X)² Π / (m_i(X) + Σ)`.
pub fn pcr_oracle(sources: &[MassFunction]) -> Vec<f64> {
    let n = sources[0].frame().len();
    let full = (1u32 << n) - 1;
    let mut out = conjunctive_oracle(sources);
    out[0] = 0.0;
    for x in 1..1u32 << n {
        let mut extra = 0.0;
        for (i, mi) in sources.iter().enumerate() {
            let mix = mi.mass(FocalSet::from_bits(x));
            if mix == 0.0 {
                continue;
            }
            // sigma_i skips index i
            let others: Vec<&MassFunction> = (0..sources.len() - 1)
                .map(|j| if j < i { &sources[j] } else { &sources[j + 1] })
                .collect();
            each_tuple(n, &others, &mut |sets, masses| {
                let inter = sets.iter().fold(full, |a, &s| a & s);
                if inter & x != 0 {
                    return;
                }
                let denom = mix + masses.iter().sum::<f64>();
                if denom != 0.0 {
                    extra += mix * mix * masses.iter().product::<f64>() / denom;
                }
            });
        }
        out[x as usize] += extra;
    }
    out
}

pub fn dense(m: &MassFunction) -> Vec<f64> {
    all_sets(m.frame().len()).map(|s| m.mass(s)).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Step of the central differences.
pub const FD_STEP: f64 = 1e-5;
/// Denominator floor of the relative error, so parameters with a near-zero
/// gradient are judged on absolute error instead.
pub const FD_FLOOR: f64 = 1e-6;

/// Largest relative error between backprop and central differences over
/// every weight and bias of `net`.
pub fn gradient_check(net: &sonar_belief::mlp::Network, x: &[f64], target: &[f64]) -> f64 {
    let analytic = net.error_gradient(x, target).unwrap();
    let mut probe = net.clone();
    let mut worst: f64 = 0.0;
    let mut compare = |a: f64, n: f64| {
        let rel = (a - n).abs() / a.abs().max(n.abs()).max(FD_FLOOR);
        worst = worst.max(rel);
    };
    for l in 0..net.layers().len() {
        for k in 0..net.layers()[l].weights.len() {
            let n = central(&mut probe, x, target, |p| &mut p.layers_mut()[l].weights[k]);
            compare(analytic.weights[l][k], n);
        }
        if net.has_bias() {
            for k in 0..net.layers()[l].biases.len() {
                let n = central(&mut probe, x, target, |p| &mut p.layers_mut()[l].biases[k]);
                compare(analytic.biases[l][k], n);
            }
        }
    }
    worst
}

fn central(
    net: &mut sonar_belief::mlp::Network,
    x: &[f64],
    target: &[f64],
    mut param: impl FnMut(&mut sonar_belief::mlp::Network) -> &mut f64,
) -> f64 {
    let orig = *param(net);
    *param(net) = orig + FD_STEP;
    let up = net.sample_error(x, target).unwrap();
    *param(net) = orig - FD_STEP;
    let down = net.sample_error(x, target).unwrap();
    *param(net) = orig;
    (up - down) / (2.0 * FD_STEP)
}

/// Random net, input and target for the gradient check.
pub fn random_case(sizes: &[usize], seed: u64) -> (sonar_belief::mlp::Network, Vec<f64>, Vec<f64>) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let slope = rng.gen_range(0.5..2.0);
    let net = sonar_belief::mlp::init_network_with(sizes, rng.gen(), 1.0, slope, true).unwrap();
    let x = (0..sizes[0]).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let t = (0..sizes[sizes.len() - 1])
        .map(|_| rng.gen_range(0.0..1.0))
        .collect();
    (net, x, t)
}
