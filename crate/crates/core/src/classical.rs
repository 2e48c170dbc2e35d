//! Classical collision-counting distinguishers.
//!
//! Each attack queries the oracle on all `2^n` values of one sub-block with
//! the others fixed at zero, maps every answer to a key, and counts the pairs
//! `i < j` with equal keys. For RP the count is near `2^{n-1}`; for FS⁴ and
//! `G_3^4` it is near `2^n`. The verdict threshold is the midpoint `3·2^{n-2}`.
//!
//! The `k+1` round key `S¹` is a single random function of `I¹`, so its count
//! sits near `2^{n-1}` as well and [`Statistic::Gk`] does not separate.

use serde::{Deserialize, Serialize};

use crate::distinguish::Label;
use crate::error::{config, Result};
use crate::oracle::{mask, BlockFunction, OracleInstance};
use crate::stats::mean_std;

/// Which collision statistic to count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// Inputs `(a, 0)`, key `a ⊕ c`.
    Fs4,
    /// Inputs `(0, I², 0)`, key `I² ⊕ S¹`.
    G34,
    /// Inputs `(I¹, 0, …, 0)`, key `S¹` (the `I²` term is identically zero).
    Gk,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::Fs4 => "fs4",
            Statistic::G34 => "g34",
            Statistic::Gk => "gk",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub statistic: Statistic,
    pub n: u32,
    pub k: u32,
    pub seed: u64,
    /// Oracle queries made.
    pub m: u64,
    /// Colliding pairs `N`.
    pub pairs: u64,
    pub expected_rp: f64,
    pub expected_scheme: f64,
    pub threshold: f64,
    /// Standard deviation of `N` across the batch this report belongs to, once known.
    pub empirical_std: Option<f64>,
    pub verdict: Label,
}

/// Queries the oracle on the statistic's input set and returns the keys, plus the query count.
pub fn collision_keys(oracle: &OracleInstance, statistic: Statistic) -> Result<(Vec<u64>, u64)> {
    collision_keys_of(oracle, oracle.params().n, oracle.params().k, statistic)
}

/// [`collision_keys`] over any `kn`-bit block function.
pub fn collision_keys_of(
    oracle: &dyn BlockFunction,
    n: u32,
    k: u32,
    statistic: Statistic,
) -> Result<(Vec<u64>, u64)> {
    match statistic {
        Statistic::Fs4 if k != 2 => return config(format!("the a ⊕ c statistic needs a 2n-bit oracle, got k = {k}")),
        Statistic::G34 if k != 3 => return config(format!("the I² ⊕ S¹ statistic needs a 3n-bit oracle, got k = {k}")),
        Statistic::Gk if k < 4 => return config(format!("the k+1 round statistic needs k >= 4, got k = {k}")),
        _ => {}
    }
    if n == 0 || oracle.input_bits() != n * k || oracle.output_bits() != n * k {
        return config(format!("expected a {}-bit oracle for n = {n}, k = {k}", n * k));
    }
    let top = (k - 1) * n;
    let mut queries = 0u64;
    let keys = (0..1u64 << n)
        .map(|x| {
            queries += 1;
            match statistic {
                Statistic::Fs4 => x ^ (oracle.apply(x << n) >> n),
                Statistic::G34 => x ^ (oracle.apply(x << n) >> top),
                Statistic::Gk => oracle.apply(x << top) >> top,
            }
        })
        .collect();
    Ok((keys, queries))
}

/// `Σ_v C(mult(v), 2)` over `n`-bit keys.
pub fn count_collisions(keys: &[u64], n: u32) -> u64 {
    let mut mult = vec![0u64; 1usize << n];
    for &key in keys {
        mult[(key & mask(n)) as usize] += 1;
    }
    mult.iter().map(|&c| c * c.saturating_sub(1) / 2).sum()
}

fn report(oracle: &OracleInstance, statistic: Statistic) -> Result<CollisionReport> {
    let (keys, m) = collision_keys(oracle, statistic)?;
    let n = oracle.params().n;
    let pairs = count_collisions(&keys, n);
    let mut r = CollisionReport {
        statistic,
        n,
        k: oracle.params().k,
        seed: oracle.seed(),
        m,
        pairs,
        expected_rp: (n as f64 - 1.0).exp2(),
        expected_scheme: f64::from(n).exp2(),
        threshold: 3.0 * (n as f64 - 2.0).exp2(),
        empirical_std: None,
        verdict: Label::Scheme,
    };
    r.verdict = classical_verdict(&r);
    Ok(r)
}

/// Collision count of `a ⊕ c` over `(a, 0)` for a `2n`-bit oracle.
pub fn count_pairs_fs4(oracle: &OracleInstance) -> Result<CollisionReport> {
    report(oracle, Statistic::Fs4)
}

/// Collision count of `I² ⊕ S¹` over `(0, I², 0)` for a `3n`-bit oracle.
pub fn count_pairs_g34(oracle: &OracleInstance) -> Result<CollisionReport> {
    report(oracle, Statistic::G34)
}

/// Collision count of `S¹` over `(I¹, 0, …, 0)` for a `kn`-bit oracle, `k ≥ 4`.
pub fn count_pairs_gk(oracle: &OracleInstance, k: u32) -> Result<CollisionReport> {
    if k < 4 {
        return config(format!("the k+1 round statistic needs k >= 4, got k = {k}"));
    }
    if oracle.params().k != k {
        return config(format!("oracle has k = {}, expected {k}", oracle.params().k));
    }
    report(oracle, Statistic::Gk)
}

/// `SCHEME` iff `N ≥ 3·2^{n-2}`.
pub fn classical_verdict(report: &CollisionReport) -> Label {
    if report.pairs as f64 >= report.threshold {
        Label::Scheme
    } else {
        Label::Rp
    }
}

/// Mean and standard deviation of `N` over a batch; fills each report's `empirical_std`.
pub fn summarize_batch(reports: &mut [CollisionReport]) -> (f64, f64) {
    let ns: Vec<f64> = reports.iter().map(|r| r.pairs as f64).collect();
    let (mean, std) = mean_std(&ns);
    for r in reports.iter_mut() {
        r.empirical_std = Some(std);
    }
    (mean, std)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{BlockParams, OracleKind, RoundFunction};

    fn pair_loop(keys: &[u64]) -> u64 {
        let mut n = 0;
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                n += u64::from(keys[i] == keys[j]);
            }
        }
        n
    }

    fn zero_oracle(params: BlockParams, kind: OracleKind) -> OracleInstance {
        let rounds =
            (0..params.d).map(|_| RoundFunction::zero(params.round_input_bits(), params.n).unwrap()).collect();
        OracleInstance::with_rounds(kind, params, rounds).unwrap()
    }

    #[test]
    fn degenerate_fs4_is_one_fiber() {
        // Four zero rounds are the identity, so a ⊕ c = 0 for every a.
        let o = zero_oracle(BlockParams::balanced(5, 4).unwrap(), OracleKind::Feistel);
        let r = count_pairs_fs4(&o).unwrap();
        assert_eq!(r.pairs, 32 * 31 / 2);
        assert_eq!(r.m, 32);
        assert_eq!(r.verdict, Label::Scheme);
    }

    #[test]
    fn degenerate_unbalanced_matches_pair_loop() {
        let o = zero_oracle(BlockParams::new(4, 3, 4).unwrap(), OracleKind::Unbalanced);
        let (keys, _) = collision_keys(&o, Statistic::G34).unwrap();
        assert_eq!(count_pairs_g34(&o).unwrap().pairs, pair_loop(&keys));
        let o = zero_oracle(BlockParams::new(4, 4, 5).unwrap(), OracleKind::Unbalanced);
        let (keys, _) = collision_keys(&o, Statistic::Gk).unwrap();
        assert_eq!(count_pairs_gk(&o, 4).unwrap().pairs, pair_loop(&keys));
    }

    #[test]
    fn histogram_matches_pair_loop() {
        for seed in 0..20 {
            let cases = [
                (OracleKind::Feistel, BlockParams::balanced(6, 4).unwrap(), Statistic::Fs4),
                (OracleKind::RandomPermutation, BlockParams::new(6, 2, 1).unwrap(), Statistic::Fs4),
                (OracleKind::Unbalanced, BlockParams::new(5, 3, 4).unwrap(), Statistic::G34),
                (OracleKind::Unbalanced, BlockParams::new(4, 4, 5).unwrap(), Statistic::Gk),
            ];
            for (kind, p, stat) in cases {
                let o = OracleInstance::build(kind, p, seed).unwrap();
                let (keys, m) = collision_keys(&o, stat).unwrap();
                assert_eq!(m, 1u64 << p.n);
                let r = report(&o, stat).unwrap();
                assert_eq!(r.pairs, pair_loop(&keys));
                assert!(r.pairs <= m * (m - 1) / 2);
            }
        }
    }

    #[test]
    fn verdict_threshold() {
        let o = OracleInstance::build(OracleKind::Feistel, BlockParams::balanced(8, 4).unwrap(), 1).unwrap();
        let mut r = count_pairs_fs4(&o).unwrap();
        assert_eq!(r.threshold, 192.0);
        r.pairs = 256;
        assert_eq!(classical_verdict(&r), Label::Scheme);
        r.pairs = 128;
        assert_eq!(classical_verdict(&r), Label::Rp);
        r.pairs = 192;
        assert_eq!(classical_verdict(&r), Label::Scheme);
        r.pairs = 191;
        assert_eq!(classical_verdict(&r), Label::Rp);
    }

    #[test]
    fn shape_errors() {
        let o = OracleInstance::build(OracleKind::Feistel, BlockParams::balanced(4, 4).unwrap(), 1).unwrap();
        assert!(count_pairs_g34(&o).is_err());
        assert!(count_pairs_gk(&o, 3).is_err());
        assert!(count_pairs_gk(&o, 4).is_err());
    }

    #[test]
    fn batch_std_is_filled() {
        let mut reports: Vec<_> = (0..5)
            .map(|s| {
                count_pairs_fs4(
                    &OracleInstance::build(OracleKind::RandomPermutation, BlockParams::new(6, 2, 1).unwrap(), s)
                        .unwrap(),
                )
                .unwrap()
            })
            .collect();
        let (mean, std) = summarize_batch(&mut reports);
        assert!(mean > 0.0 && std >= 0.0);
        assert!(reports.iter().all(|r| r.empirical_std == Some(std)));
    }
}
