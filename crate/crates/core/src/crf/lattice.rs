//! Log-space potentials of one sentence and the chain algorithms over them.
//!
//! A label sequence `y` scores
//! `start[y0] + node[0][y0] + Σ_t (transition[y(t-1)][y(t)] + node[t][y(t)])`.

use alloc::vec;
use alloc::vec::Vec;

/// `log(Σ exp(x))`, stable for large magnitudes.
pub fn log_sum_exp(values: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    let sum: f64 = values.into_iter().map(|v| libm::exp(v - max)).sum();
    max + libm::log(sum)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    len: usize,
    labels: usize,
    node: Vec<f64>,
    transition: Vec<f64>,
    start: Vec<f64>,
}

/// Posterior marginals: `node[t*K + k] = P(y_t = k)` and
/// `edge[(t-1)*K*K + i*K + j] = P(y_(t-1) = i, y_t = j)` for `t ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub labels: usize,
    pub node: Vec<f64>,
    pub edge: Vec<f64>,
}

impl Marginals {
    pub fn node(&self, t: usize, k: usize) -> f64 {
        self.node[t * self.labels + k]
    }

    pub fn edge(&self, t: usize, i: usize, j: usize) -> f64 {
        let k = self.labels;
        self.edge[(t - 1) * k * k + i * k + j]
    }
}

impl Lattice {
    /// `node` is `len × labels` row-major, `transition` is `labels × labels`
    /// indexed `[from][to]`.
    pub fn new(len: usize, labels: usize, node: Vec<f64>, transition: Vec<f64>, start: Vec<f64>) -> Self {
        assert!(len >= 1 && labels >= 1, "lattice needs at least one position and label");
        assert_eq!(node.len(), len * labels);
        assert_eq!(transition.len(), labels * labels);
        assert_eq!(start.len(), labels);
        Lattice {
            len,
            labels,
            node,
            transition,
            start,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn labels(&self) -> usize {
        self.labels
    }

    pub fn node(&self, t: usize, k: usize) -> f64 {
        self.node[t * self.labels + k]
    }

    pub fn node_mut(&mut self, t: usize, k: usize) -> &mut f64 {
        &mut self.node[t * self.labels + k]
    }

    pub fn transition(&self, from: usize, to: usize) -> f64 {
        self.transition[from * self.labels + to]
    }

    pub fn start(&self, k: usize) -> f64 {
        self.start[k]
    }

    pub fn sequence_score(&self, labels: &[usize]) -> f64 {
        assert_eq!(labels.len(), self.len);
        let mut score = self.start(labels[0]) + self.node(0, labels[0]);
        for t in 1..self.len {
            score = score + self.transition(labels[t - 1], labels[t]) + self.node(t, labels[t]);
        }
        score
    }

    /// Forward log-potentials `alpha[t*K + k]`.
    pub fn forward(&self) -> Vec<f64> {
        let k = self.labels;
        let mut alpha = vec![0.0; self.len * k];
        for (j, a) in alpha[..k].iter_mut().enumerate() {
            *a = self.start(j) + self.node(0, j);
        }
        for t in 1..self.len {
            for j in 0..k {
                let prev = &alpha[(t - 1) * k..t * k];
                let incoming = log_sum_exp((0..k).map(|i| prev[i] + self.transition(i, j)));
                alpha[t * k + j] = incoming + self.node(t, j);
            }
        }
        alpha
    }

    /// Backward log-potentials `beta[t*K + k]`, zero at the last position.
    pub fn backward(&self) -> Vec<f64> {
        let k = self.labels;
        let mut beta = vec![0.0; self.len * k];
        for t in (0..self.len - 1).rev() {
            for i in 0..k {
                let next = &beta[(t + 1) * k..(t + 2) * k];
                beta[t * k + i] = log_sum_exp(
                    (0..k).map(|j| self.transition(i, j) + self.node(t + 1, j) + next[j]),
                );
            }
        }
        beta
    }

    pub fn log_partition(&self) -> f64 {
        let alpha = self.forward();
        log_sum_exp(alpha[(self.len - 1) * self.labels..].iter().copied())
    }

    /// Node and edge posteriors plus `log Z`.
    pub fn marginals(&self) -> (Marginals, f64) {
        let k = self.labels;
        let alpha = self.forward();
        let beta = self.backward();
        let log_z = log_sum_exp(alpha[(self.len - 1) * k..].iter().copied());
        let node = alpha
            .iter()
            .zip(&beta)
            .map(|(a, b)| libm::exp(a + b - log_z))
            .collect();
        let mut edge = Vec::with_capacity((self.len - 1) * k * k);
        for t in 1..self.len {
            for i in 0..k {
                for j in 0..k {
                    let log_p = alpha[(t - 1) * k + i]
                        + self.transition(i, j)
                        + self.node(t, j)
                        + beta[t * k + j]
                        - log_z;
                    edge.push(libm::exp(log_p));
                }
            }
        }
        (
            Marginals {
                labels: k,
                node,
                edge,
            },
            log_z,
        )
    }

    /// Highest-scoring label sequence and its score. Ties go to the lowest
    /// label index, both for the final label and at every backpointer.
    #[allow(clippy::needless_range_loop)]
    pub fn viterbi(&self) -> (Vec<usize>, f64) {
        let k = self.labels;
        let mut delta: Vec<f64> = (0..k).map(|j| self.start(j) + self.node(0, j)).collect();
        let mut back = vec![0usize; self.len * k];
        let mut next = vec![0.0; k];
        for t in 1..self.len {
            for j in 0..k {
                let mut best = 0;
                let mut best_score = delta[0] + self.transition(0, j);
                for i in 1..k {
                    let score = delta[i] + self.transition(i, j);
                    if score > best_score {
                        best = i;
                        best_score = score;
                    }
                }
                back[t * k + j] = best;
                next[j] = best_score + self.node(t, j);
            }
            core::mem::swap(&mut delta, &mut next);
        }
        let mut last = 0;
        for j in 1..k {
            if delta[j] > delta[last] {
                last = j;
            }
        }
        let score = delta[last];
        let mut path = vec![0; self.len];
        path[self.len - 1] = last;
        for t in (1..self.len).rev() {
            path[t - 1] = back[t * k + path[t]];
        }
        (path, score)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_lattice(rng: &mut ChaCha8Rng, len: usize, labels: usize, scale: f64) -> Lattice {
        let mut draw = |n: usize| (0..n).map(|_| rng.gen_range(-scale..scale)).collect::<Vec<_>>();
        Lattice::new(len, labels, draw(len * labels), draw(labels * labels), draw(labels))
    }

    fn all_sequences(len: usize, labels: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|p| (0..labels).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                }))
                .collect();
        }
        out
    }

    #[test]
    fn zero_scores() {
        let lattice = Lattice::new(5, 3, vec![0.0; 15], vec![0.0; 9], vec![0.0; 3]);
        assert!((lattice.log_partition() - 5.0 * libm::log(3.0)).abs() < 1e-12);
        let (marginals, _) = lattice.marginals();
        for p in &marginals.node {
            assert!((p - 1.0 / 3.0).abs() < 1e-10);
        }
        assert_eq!(lattice.viterbi(), (vec![0; 5], 0.0));
    }

    #[test]
    fn single_position_is_log_sum_exp() {
        let lattice = Lattice::new(1, 2, vec![1.0, -0.5], vec![9.0; 4], vec![0.25, 2.0]);
        let expected = libm::log(libm::exp(1.25) + libm::exp(1.5));
        assert!((lattice.log_partition() - expected).abs() < 1e-12);
    }

    #[test]
    fn stable_for_large_scores() {
        let lattice = Lattice::new(3, 2, vec![1e4, -1e4, 1e4, 1e4, -1e4, 1e4], vec![0.0; 4], vec![0.0; 2]);
        let log_z = lattice.log_partition();
        assert!(log_z.is_finite());
        assert!((log_z - (3e4 + libm::log(2.0))).abs() < 1e-9);
    }

    #[test]
    fn marginals_sum_to_one_and_match_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let len = rng.gen_range(1..5);
            let labels = rng.gen_range(1..4);
            let lattice = random_lattice(&mut rng, len, labels, 2.0);
            let (marginals, log_z) = lattice.marginals();
            let sequences = all_sequences(len, labels);
            let mut node = vec![0.0; len * labels];
            for seq in &sequences {
                let p = libm::exp(lattice.sequence_score(seq) - log_z);
                for (t, &k) in seq.iter().enumerate() {
                    node[t * labels + k] += p;
                }
            }
            for t in 0..len {
                let total: f64 = (0..labels).map(|k| marginals.node(t, k)).sum();
                assert!((total - 1.0).abs() < 1e-10);
                for k in 0..labels {
                    assert!((marginals.node(t, k) - node[t * labels + k]).abs() < 1e-10);
                }
            }
            for t in 1..len {
                let total: f64 = marginals.edge[(t - 1) * labels * labels..t * labels * labels].iter().sum();
                assert!((total - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn constant_shift_at_one_position() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let len = rng.gen_range(1..6);
            let labels = rng.gen_range(1..4);
            let lattice = random_lattice(&mut rng, len, labels, 3.0);
            let t = rng.gen_range(0..len);
            let c = rng.gen_range(-5.0..5.0);
            let mut shifted = lattice.clone();
            for k in 0..labels {
                *shifted.node_mut(t, k) += c;
            }
            assert!((shifted.log_partition() - lattice.log_partition() - c).abs() < 1e-9);
            assert_eq!(shifted.viterbi().0, lattice.viterbi().0);
        }
    }

    #[test]
    fn log_partition_bounds_every_sequence() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let len = rng.gen_range(1..5);
            let labels = rng.gen_range(1..4);
            let lattice = random_lattice(&mut rng, len, labels, 2.0);
            let log_z = lattice.log_partition();
            for seq in all_sequences(len, labels) {
                let score = lattice.sequence_score(&seq);
                if labels == 1 {
                    assert!((log_z - score).abs() < 1e-12);
                } else {
                    assert!(log_z > score);
                }
            }
        }
    }

    #[test]
    fn viterbi_score_is_path_score() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let (len, labels) = (rng.gen_range(1..8), rng.gen_range(1..5));
            let lattice = random_lattice(&mut rng, len, labels, 4.0);
            let (path, score) = lattice.viterbi();
            assert_eq!(score, lattice.sequence_score(&path));
        }
    }
}
