//! Bitstring probability distributions and shot histograms.
//!
//! Outcome `s` is a `u64` whose bit `i` is the value of the `i`-th qubit of
//! the measured subset. The printed bitstring lists qubit 0 first.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbDist {
    pub bits: usize,
    pub probs: BTreeMap<u64, f64>,
    /// `None` for exact distributions.
    pub shot_count: Option<u64>,
    /// Set on the output of readout unfolding; its second moments then need
    /// the propagated covariance rather than the multinomial one.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unfolded: bool,
}

pub fn bitstring(s: u64, bits: usize) -> String {
    (0..bits).map(|i| if (s >> i) & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn parse_bitstring(t: &str) -> Option<u64> {
    if t.len() > 64 {
        return None;
    }
    let mut s = 0u64;
    for (i, ch) in t.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => s |= 1 << i,
            _ => return None,
        }
    }
    Some(s)
}

impl ProbDist {
    pub fn exact(bits: usize, probs: BTreeMap<u64, f64>) -> Self {
        ProbDist {
            bits,
            probs,
            shot_count: None,
            unfolded: false,
        }
    }

    pub fn point(bits: usize, s: u64) -> Self {
        Self::exact(bits, BTreeMap::from([(s, 1.0)]))
    }

    /// From a dense vector of length `2^bits`; zero entries are dropped.
    pub fn from_dense(v: &[f64], shot_count: Option<u64>) -> Self {
        let bits = v.len().trailing_zeros() as usize;
        let probs = v
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0.0)
            .map(|(i, &p)| (i as u64, p))
            .collect();
        ProbDist {
            bits,
            probs,
            shot_count,
            unfolded: false,
        }
    }

    pub fn from_counts(bits: usize, counts: &BTreeMap<u64, u64>) -> Self {
        let n: u64 = counts.values().sum();
        let probs = counts.iter().map(|(&s, &c)| (s, c as f64 / n as f64)).collect();
        ProbDist {
            bits,
            probs,
            shot_count: Some(n),
            unfolded: false,
        }
    }

    pub fn from_samples(bits: usize, samples: &[u64]) -> Self {
        let mut counts = BTreeMap::new();
        for &s in samples {
            *counts.entry(s).or_insert(0u64) += 1;
        }
        Self::from_counts(bits, &counts)
    }

    pub fn prob(&self, s: u64) -> f64 {
        self.probs.get(&s).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    pub fn to_dense(&self) -> Result<Vec<f64>> {
        if self.bits > 26 {
            return Err(Error::QubitCountExceeded { n: self.bits, max: 26 });
        }
        let mut v = vec![0.0; 1 << self.bits];
        for (&s, &p) in &self.probs {
            v[s as usize] = p;
        }
        Ok(v)
    }

    /// Marginal over the listed bit positions (new bit `i` = old bit `positions[i]`).
    pub fn marginal(&self, positions: &[usize]) -> ProbDist {
        let mut probs = BTreeMap::new();
        for (&s, &p) in &self.probs {
            *probs.entry(project(s, positions)).or_insert(0.0) += p;
        }
        ProbDist {
            bits: positions.len(),
            probs,
            shot_count: self.shot_count,
            unfolded: self.unfolded,
        }
    }

    pub fn total_variation(&self, other: &ProbDist) -> f64 {
        let keys: std::collections::BTreeSet<u64> = self.probs.keys().chain(other.probs.keys()).copied().collect();
        0.5 * keys.iter().map(|&k| (self.prob(k) - other.prob(k)).abs()).sum::<f64>()
    }

    pub fn validate(&self) -> Result<()> {
        if self.probs.values().any(|&p| p < -1e-12) {
            return Err(Error::InvalidParameter("negative probability".into()));
        }
        let t = self.total();
        if (t - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("probabilities sum to {t}")));
        }
        Ok(())
    }

    /// Draws `shots` samples from this distribution as a finite-shot histogram.
    pub fn resample<R: Rng + ?Sized>(&self, shots: u64, rng: &mut R) -> ProbDist {
        let keys: Vec<u64> = self.probs.keys().copied().collect();
        let ps: Vec<f64> = self.probs.values().copied().collect();
        let counts = multinomial(&ps, shots, rng);
        let map: BTreeMap<u64, u64> = keys.into_iter().zip(counts).filter(|(_, c)| *c > 0).collect();
        ProbDist::from_counts(self.bits, &map)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("bitstring,probability\n");
        for (&k, &p) in &self.probs {
            writeln!(s, "{},{}", bitstring(k, self.bits), p).unwrap();
        }
        s
    }
}

pub fn project(s: u64, positions: &[usize]) -> u64 {
    positions
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &p)| acc | (((s >> p) & 1) << i))
}

/// Multinomial counts via conditional binomials.
pub fn multinomial<R: Rng + ?Sized>(ps: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let mut out = vec![0u64; ps.len()];
    let mut left = shots;
    let mut mass: f64 = ps.iter().map(|p| p.max(0.0)).sum();
    for (i, &p) in ps.iter().enumerate() {
        if left == 0 {
            break;
        }
        let p = p.max(0.0);
        if i + 1 == ps.len() || mass <= 0.0 {
            out[i] = left;
            break;
        }
        let q = (p / mass).clamp(0.0, 1.0);
        let c = if q >= 1.0 {
            left
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(left, q).expect("valid binomial").sample(rng)
        };
        out[i] = c;
        left -= c;
        mass -= p;
    }
    out
}

/// Finite-shot histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotCounts {
    pub bits: usize,
    pub counts: BTreeMap<u64, u64>,
}

impl ShotCounts {
    pub fn from_samples(bits: usize, samples: &[u64]) -> Self {
        let mut counts = BTreeMap::new();
        for &s in samples {
            *counts.entry(s).or_insert(0u64) += 1;
        }
        ShotCounts { bits, counts }
    }

    pub fn shots(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn to_dist(&self) -> ProbDist {
        ProbDist::from_counts(self.bits, &self.counts)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("bitstring,count\n");
        for (&k, &c) in &self.counts {
            writeln!(s, "{},{}", bitstring(k, self.bits), c).unwrap();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bitstring_roundtrip() {
        assert_eq!(bitstring(0b110, 4), "0110");
        assert_eq!(parse_bitstring("0110"), Some(0b110));
    }

    #[test]
    fn marginal_of_bell() {
        let d = ProbDist::exact(2, BTreeMap::from([(0, 0.5), (3, 0.5)]));
        let m = d.marginal(&[1]);
        assert_eq!(m.prob(0), 0.5);
        assert_eq!(m.prob(1), 0.5);
    }

    #[test]
    fn multinomial_sums_to_shots() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = multinomial(&[0.1, 0.0, 0.6, 0.3], 1000, &mut rng);
        assert_eq!(c.iter().sum::<u64>(), 1000);
        assert_eq!(c[1], 0);
    }
}
