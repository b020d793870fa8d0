use rand::Rng;
use serde::Serialize;

use super::{is_perfect, Correlation, MacKernel, OutputSymbol, SbcParams};
use crate::error::{arg, Error, Result};
use crate::prob::{sample, Distribution, SeededRng};

/// `n` i.i.d. channel uses at fixed product inputs, each flagged for audit
/// by the receiver with probability 1/2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SucoSamples {
    pub triples: Vec<(usize, usize, usize)>,
    pub queried: Vec<bool>,
    pub correlation: Correlation,
}

/// Turns a noisy kernel plus product inputs into i.i.d. correlated triples.
/// Perfect channels are rejected: an output that determines both inputs
/// leaves nothing to build oblivious transfer from.
pub fn reduce_to_suco(
    kernel: &MacKernel,
    d1: &Distribution,
    d2: &Distribution,
    n: usize,
    rng: &mut SeededRng,
) -> Result<SucoSamples> {
    let correlation = kernel.correlation(d1, d2)?;
    if is_perfect(&correlation) {
        return Err(Error::Domain(
            "channel is perfect at these inputs (H(X1,X2|Y) = 0); no oblivious transfer is possible".into(),
        ));
    }
    let mut triples = Vec::with_capacity(n);
    let mut queried = Vec::with_capacity(n);
    for _ in 0..n {
        let x1 = sample(d1, rng);
        let x2 = sample(d2, rng);
        let y = kernel.sample_output(x1, x2, rng);
        triples.push((x1, x2, y));
        queried.push(rng.gen_bool(0.5));
    }
    Ok(SucoSamples {
        triples,
        queried,
        correlation,
    })
}

/// One symmetric-correlation sample built from two realizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SbcSample {
    pub x1: usize,
    pub x2: usize,
    /// Bob's pair of outputs from the two realizations.
    pub y: (usize, usize),
    pub erased: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SbcReduction {
    pub samples: Vec<SbcSample>,
    /// Realizations consumed per emitted sample.
    pub consumption: f64,
    /// `12 * min_l P(l)` over the four kept patterns `l` of a realization pair.
    pub alpha: f64,
    /// `6 / alpha`: the expected consumption.
    pub analytic_consumption: f64,
    /// The induced erasure correlation over binary inputs.
    pub sbc: SbcParams,
}

/// Builds a joint-erasure binary correlation from two independent uses of a
/// correlation.
///
/// Sender 1 restricts to symbols `(a1, b1)`, sender 2 to `(a2, b2)`. A pair
/// of realizations `(u1, u2), (u1', u2')` is kept only when both senders'
/// symbols differ between the two realizations; the bit of sender `i` is 0
/// when its first symbol is `a_i` and 1 otherwise. Kept patterns are thinned
/// to a common probability so all four bit pairs are equally likely; other
/// pairs are announced and discarded. Bob's output is the pair of outputs;
/// those with equal likelihood under all four bit pairs carry no
/// information and form the erasure set.
pub fn reduce_suco_to_sbc(
    c: &Correlation,
    sender1: (usize, usize),
    sender2: (usize, usize),
    n_target: usize,
    rng: &mut SeededRng,
) -> Result<SbcReduction> {
    let (a1, b1) = sender1;
    let (a2, b2) = sender2;
    if a1 == b1 || a2 == b2 || a1.max(b1) >= c.x1_size() || a2.max(b2) >= c.x2_size() {
        return arg("each sender needs two distinct symbols inside its alphabet");
    }
    let sym1 = [a1, b1];
    let sym2 = [a2, b2];
    let ny = c.y_size();
    let rows: Vec<Vec<f64>> = (0..4)
        .map(|r| {
            c.conditional_row(sym1[r / 2], sym2[r % 2])
                .ok_or_else(|| Error::Domain(format!("input pair {:?} has zero probability", (sym1[r / 2], sym2[r % 2]))))
        })
        .collect::<Result<_>>()?;
    if !(0..ny).any(|y| rows.iter().all(|r| r[y] > 0.0)) {
        return Err(Error::Domain(format!(
            "no output is reachable from all of ({a1},{a2}), ({a1},{b2}), ({b1},{a2}), ({b1},{b2})"
        )));
    }

    // Pattern for bits (x1, x2): first realization (sym1[x1], sym2[x2]),
    // second (sym1[1-x1], sym2[1-x2]).
    let pattern_prob = |x1: usize, x2: usize| {
        c.input_mass(sym1[x1], sym2[x2]) * c.input_mass(sym1[1 - x1], sym2[1 - x2])
    };
    let probs: Vec<f64> = (0..4).map(|r| pattern_prob(r / 2, r % 2)).collect();
    let min_p = probs.iter().cloned().fold(f64::INFINITY, f64::min);
    let alpha = 12.0 * min_p;

    // Likelihood of Bob's output pair under each bit pair.
    let lik = |x1: usize, x2: usize, y: usize, y2: usize| rows[x1 * 2 + x2][y] * rows[(1 - x1) * 2 + (1 - x2)][y2];
    let mut erased_pair = vec![false; ny * ny];
    for y in 0..ny {
        for y2 in 0..ny {
            let l: Vec<f64> = (0..4).map(|r| lik(r / 2, r % 2, y, y2)).collect();
            erased_pair[y * ny + y2] = l[0] > 0.0 && l.iter().all(|v| (v - l[0]).abs() <= 1e-12 * l[0].max(1.0));
        }
    }

    let input_flat = Distribution::from_weights(
        &(0..c.x1_size() * c.x2_size())
            .map(|r| c.input_mass(r / c.x2_size(), r % c.x2_size()))
            .collect::<Vec<_>>(),
    )?;
    let mut samples = Vec::with_capacity(n_target);
    let mut consumed = 0usize;
    let cap = n_target.saturating_mul(1_000_000).max(1_000_000);
    while samples.len() < n_target {
        if consumed > cap {
            return Err(Error::Domain("reduction accepts too rarely to finish".into()));
        }
        let u = sample(&input_flat, rng);
        let v = sample(&input_flat, rng);
        consumed += 2;
        let (u1, u2) = (u / c.x2_size(), u % c.x2_size());
        let (v1, v2) = (v / c.x2_size(), v % c.x2_size());
        let bit = |s: usize, syms: [usize; 2]| syms.iter().position(|t| *t == s);
        let (Some(x1), Some(x2), Some(w1), Some(w2)) = (bit(u1, sym1), bit(u2, sym2), bit(v1, sym1), bit(v2, sym2)) else {
            continue;
        };
        if x1 == w1 || x2 == w2 {
            continue;
        }
        if !rng.gen_bool((min_p / probs[x1 * 2 + x2]).min(1.0)) {
            continue;
        }
        let y = c_sample_output(c, u1, u2, rng);
        let y2 = c_sample_output(c, v1, v2, rng);
        samples.push(SbcSample {
            x1,
            x2,
            y: (y, y2),
            erased: erased_pair[y * ny + y2],
        });
    }

    let sbc = induced_sbc(c, &rows, &erased_pair)?;
    Ok(SbcReduction {
        consumption: consumed as f64 / n_target.max(1) as f64,
        alpha,
        analytic_consumption: 6.0 / alpha,
        samples,
        sbc,
    })
}

fn c_sample_output(c: &Correlation, x1: usize, x2: usize, rng: &mut SeededRng) -> usize {
    let row = c.conditional_row(x1, x2).expect("sampled inputs have mass");
    sample(&Distribution::from_weights(&row).expect("row has mass"), rng)
}

/// The erasure correlation whose revealed branch is the normalized
/// distribution of non-erased output pairs.
fn induced_sbc(c: &Correlation, rows: &[Vec<f64>], erased_pair: &[bool]) -> Result<SbcParams> {
    let ny = c.y_size();
    let lik = |x1: usize, x2: usize, y: usize, y2: usize| rows[x1 * 2 + x2][y] * rows[(1 - x1) * 2 + (1 - x2)][y2];
    let revealed: Vec<(usize, usize)> = (0..ny * ny)
        .filter(|i| !erased_pair[*i])
        .map(|i| (i / ny, i % ny))
        .filter(|(y, y2)| (0..4).any(|r| lik(r / 2, r % 2, *y, *y2) > 0.0))
        .collect();
    let erased_mass: f64 = (0..ny * ny).filter(|i| erased_pair[*i]).map(|i| lik(0, 0, i / ny, i % ny)).sum();
    let p = 1.0 - erased_mass;
    if revealed.is_empty() || !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "induced correlation is degenerate: non-erasure probability {p}"
        )));
    }
    let labels = c.labels();
    let outputs = revealed
        .iter()
        .map(|(y, y2)| OutputSymbol::plain(format!("{}/{}", labels[*y], labels[*y2])))
        .collect();
    let w_rows = (0..4)
        .map(|r| revealed.iter().map(|(y, y2)| lik(r / 2, r % 2, *y, *y2) / p).collect())
        .collect();
    let w = MacKernel::new(2, 2, outputs, w_rows)?;
    super::su_sbc(p, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{adder_mac, identity_mac, noisy_adder_mac};

    fn uniform() -> Distribution {
        Distribution::uniform(2).unwrap()
    }

    #[test]
    fn suco_examples() {
        let mut rng = SeededRng::new(11, 0);
        let s = reduce_to_suco(&adder_mac(), &uniform(), &uniform(), 100, &mut rng).unwrap();
        assert_eq!(s.triples.len(), 100);
        let q = s.queried.iter().filter(|b| **b).count();
        assert!((30..=70).contains(&q));
        assert!(matches!(
            reduce_to_suco(&identity_mac(), &uniform(), &uniform(), 10, &mut rng),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn suco_frequencies_match_joint() {
        let mut rng = SeededRng::new(12, 0);
        let k = noisy_adder_mac(0.6).unwrap();
        let s = reduce_to_suco(&k, &uniform(), &uniform(), 10_000, &mut rng).unwrap();
        let ny = k.y_size();
        let mut counts = vec![0.0; 4 * ny];
        for (a, b, y) in &s.triples {
            counts[(a * 2 + b) * ny + y] += 1e-4;
        }
        let tv: f64 = 0.5 * counts.iter().zip(s.correlation.joint().probs()).map(|(a, b)| (a - b).abs()).sum::<f64>();
        assert!(tv <= 0.05, "{tv}");
    }

    #[test]
    fn sbc_reduction_rejects_missing_overlap() {
        let c = adder_mac().uniform_correlation();
        let mut rng = SeededRng::new(1, 1);
        assert!(matches!(reduce_suco_to_sbc(&c, (0, 1), (0, 1), 10, &mut rng), Err(Error::Domain(_))));
    }

    #[test]
    fn sbc_reduction_on_noisy_adder() {
        let c = noisy_adder_mac(0.5).unwrap().uniform_correlation();
        let mut rng = SeededRng::new(1, 2);
        let r = reduce_suco_to_sbc(&c, (0, 1), (0, 1), 500, &mut rng).unwrap();
        // each kept pattern has probability 1/16 at uniform inputs
        assert!((r.alpha - 0.75).abs() < 1e-12);
        assert!((r.analytic_consumption - 8.0).abs() < 1e-12);
        assert!((r.consumption / r.analytic_consumption - 1.0).abs() <= 0.2);
        assert!(r.consumption <= 12.0 / r.alpha * 1.2);
        assert!(r.samples.iter().any(|s| s.erased) && r.samples.iter().any(|s| !s.erased));
        // both realizations erased: (1-p)^2
        assert!((r.sbc.p - 0.75).abs() < 1e-12);
    }
}
