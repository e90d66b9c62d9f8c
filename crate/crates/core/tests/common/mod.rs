//! Independent oracles for the integration suites.
//!
//! Nothing here shares code with the library's enumeration or solvers: orbits
//! are found by filtering all words of bounded length, counts come from the
//! Mobius/necklace formula, and scalar constants from one-dimensional
//! bisection on closed-form equations.

#![allow(dead_code)]

use orbitpair::model::{Edge, HomologyClass, MarkovFlowModel};

pub const PHI: f64 = 1.618033988749895;

/// One vertex, loops of length 1 (weight +1) and the golden ratio (weight -1).
pub fn golden_model() -> MarkovFlowModel {
    MarkovFlowModel::new(
        1,
        vec!["v".into()],
        vec![
            Edge {
                source: 0,
                target: 0,
                length: 1.0,
                weight: HomologyClass::new(vec![1]),
            },
            Edge {
                source: 0,
                target: 0,
                length: PHI,
                weight: HomologyClass::new(vec![-1]),
            },
        ],
    )
    .unwrap()
}

/// One vertex, two unit loops with weights +1 and -1 (the full 2-shift).
pub fn unit_shift_model() -> MarkovFlowModel {
    MarkovFlowModel::new(
        1,
        vec!["v".into()],
        vec![
            Edge {
                source: 0,
                target: 0,
                length: 1.0,
                weight: HomologyClass::new(vec![1]),
            },
            Edge {
                source: 0,
                target: 0,
                length: 1.0,
                weight: HomologyClass::new(vec![-1]),
            },
        ],
    )
    .unwrap()
}

/// Entropy of the golden model by bisection on exp(-s) + exp(-phi s) = 1.
pub fn golden_entropy_oracle() -> f64 {
    let f = |s: f64| (-s).exp() + (-PHI * s).exp() - 1.0;
    let (mut lo, mut hi) = (0.1, 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Winding cycle of the golden model from the stationary measure closed form.
pub fn golden_winding_oracle() -> f64 {
    let h = golden_entropy_oracle();
    let pa = (-h).exp();
    let pb = (-PHI * h).exp();
    (pa - pb) / (pa + PHI * pb)
}

/// Mobius function by trial division.
pub fn mobius(n: u64) -> i64 {
    if n == 1 {
        return 1;
    }
    let mut m = n;
    let mut result = 1i64;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if m > 1 {
        result = -result;
    }
    result
}

/// Number of primitive necklaces of length n over an `a`-letter alphabet:
/// (1/n) * sum over d | n of mobius(d) a^(n/d).
pub fn necklace_count(n: u64, alphabet: u64) -> u64 {
    let mut total: i64 = 0;
    for d in 1..=n {
        if n.is_multiple_of(d) {
            total += mobius(d) * (alphabet as i64).pow((n / d) as u32);
        }
    }
    (total / n as i64) as u64
}

/// Every prime orbit of the model with length <= t_max, found by brute force:
/// run an odometer over all edge words up to the maximal word length, keep
/// the closed ones that equal their own minimal rotation and are not proper
/// powers. Completely independent of the library's pruned search.
pub fn brute_force_orbits(model: &MarkovFlowModel, t_max: f64) -> Vec<(f64, Vec<i64>)> {
    let edges = model.edges();
    let m = edges.len();
    let min_len = edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min);
    let max_word = (t_max / min_len).floor() as usize;
    let mut found = Vec::new();
    for word_len in 1..=max_word {
        let mut word = vec![0usize; word_len];
        loop {
            if is_closed(model, &word) && is_min_rotation(&word) && !is_proper_power(&word) {
                let length: f64 = word.iter().map(|&e| edges[e].length).sum();
                if length <= t_max {
                    let mut hom = vec![0i64; model.betti_number()];
                    for &e in &word {
                        for (acc, &w) in hom.iter_mut().zip(edges[e].weight.coords()) {
                            *acc += w;
                        }
                    }
                    found.push((length, hom));
                }
            }
            // odometer
            let mut pos = word_len;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                word[pos] += 1;
                if word[pos] < m {
                    break;
                }
                word[pos] = 0;
            }
            if word.iter().all(|&x| x == 0) {
                break;
            }
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    found
}

fn is_closed(model: &MarkovFlowModel, word: &[usize]) -> bool {
    let edges = model.edges();
    (0..word.len()).all(|i| edges[word[i]].target == edges[word[(i + 1) % word.len()]].source)
}

fn is_min_rotation(word: &[usize]) -> bool {
    let n = word.len();
    let doubled: Vec<usize> = word.iter().chain(word.iter()).cloned().collect();
    for r in 1..n {
        if doubled[r..r + n] < *word {
            return false;
        }
    }
    true
}

fn is_proper_power(word: &[usize]) -> bool {
    let n = word.len();
    (1..n).any(|p| n.is_multiple_of(p) && (0..n).all(|i| word[i] == word[(i + p) % n]))
}

/// Ordered pair counts by class difference from a flat orbit list: the
/// quadratic-loop definition, with the diagonal included.
pub fn brute_force_pair_count(orbits: &[(f64, Vec<i64>)], t: f64, beta: &[i64]) -> u64 {
    let mut total = 0u64;
    for (la, ha) in orbits {
        if *la > t {
            continue;
        }
        for (lb, hb) in orbits {
            if *lb > t {
                continue;
            }
            if ha
                .iter()
                .zip(hb.iter())
                .zip(beta.iter())
                .all(|((a, b), d)| a - b == *d)
            {
                total += 1;
            }
        }
    }
    total
}

/// A deterministic xorshift generator for reproducible randomized tests.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn range_usize(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() as usize) % (hi - lo)
    }

    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % (hi - lo) as u64) as i64
    }
}

/// Random strongly connected model: a Hamiltonian cycle through `n` vertices
/// (which forces strong connectivity) plus random chords, with irrational-ish
/// lengths and small integer weights.
pub fn random_connected_model(
    rng: &mut TestRng,
    k: usize,
    n: usize,
    extra: usize,
) -> MarkovFlowModel {
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    let random_edge = |rng: &mut TestRng, s: usize, t: usize| Edge {
        source: s,
        target: t,
        length: rng.range_f64(0.5, 2.0) + std::f64::consts::SQRT_2 * rng.next_f64(),
        weight: HomologyClass::new((0..k).map(|_| rng.range_i64(-2, 3)).collect()),
    };
    for i in 0..n {
        let (s, t) = (i, (i + 1) % n);
        edges.push(random_edge(rng, s, t));
    }
    for _ in 0..extra.max(2usize.saturating_sub(n)) {
        let s = rng.range_usize(0, n);
        let t = rng.range_usize(0, n);
        edges.push(random_edge(rng, s, t));
    }
    MarkovFlowModel::new(k, vertices, edges).unwrap()
}
