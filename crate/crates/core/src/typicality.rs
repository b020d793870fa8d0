//! Empirical types, conditional typicality and the random-query audit that
//! catches parties deviating from the channel statistics.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::MacKernel;
use crate::error::{arg, Result};
use crate::prob::{sample, sample_subset, Distribution, SeededRng};

/// Counts of `(x1, x2, y)` triples over a sequence of length `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JointType {
    shape: [usize; 3],
    counts: Vec<u64>,
    n: u64,
}

impl JointType {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn count(&self, x1: usize, x2: usize, y: usize) -> u64 {
        self.counts[(x1 * self.shape[1] + x2) * self.shape[2] + y]
    }

    pub fn pair_count(&self, x1: usize, x2: usize) -> u64 {
        (0..self.shape[2]).map(|y| self.count(x1, x2, y)).sum()
    }

    pub fn output_count(&self, y: usize) -> u64 {
        (0..self.shape[0] * self.shape[1])
            .map(|r| self.count(r / self.shape[1], r % self.shape[1], y))
            .sum()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

/// Counts triples; `shape` gives the alphabet sizes `(|X1|, |X2|, |Y|)`.
pub fn empirical_type(x1seq: &[usize], x2seq: &[usize], yseq: &[usize], shape: [usize; 3]) -> Result<JointType> {
    if x1seq.len() != x2seq.len() || x1seq.len() != yseq.len() {
        return arg(format!(
            "sequence lengths differ: {}, {}, {}",
            x1seq.len(),
            x2seq.len(),
            yseq.len()
        ));
    }
    let mut counts = vec![0u64; shape.iter().product()];
    for ((a, b), y) in x1seq.iter().zip(x2seq).zip(yseq) {
        if *a >= shape[0] || *b >= shape[1] || *y >= shape[2] {
            return arg(format!("triple ({a}, {b}, {y}) outside alphabets {shape:?}"));
        }
        counts[(a * shape[1] + b) * shape[2] + y] += 1;
    }
    Ok(JointType {
        shape,
        counts,
        n: x1seq.len() as u64,
    })
}

/// Worst cell deviation `|N(x1,x2,y) - W(y|x1,x2) N(x1,x2)| / n` and the number
/// of cells observed with positive count where `W` is zero.
pub fn type_deviation(t: &JointType, kernel: &MacKernel) -> (f64, u64) {
    let [n1, n2, ny] = t.shape;
    if t.n == 0 {
        return (0.0, 0);
    }
    let n = t.n as f64;
    let mut worst = 0.0f64;
    let mut impossible = 0;
    for x1 in 0..n1 {
        for x2 in 0..n2 {
            let pair = t.pair_count(x1, x2) as f64;
            for y in 0..ny {
                let c = t.count(x1, x2, y);
                let w = kernel.prob(y, x1, x2);
                if w == 0.0 && c > 0 {
                    impossible += c;
                }
                worst = worst.max((c as f64 - w * pair).abs() / n);
            }
        }
    }
    (worst, impossible)
}

/// Max-deviation conditional typicality: every cell within `eps` of its
/// expectation given the input-pair counts, and no triple the kernel cannot
/// produce.
pub fn is_cond_typical(t: &JointType, kernel: &MacKernel, eps: f64) -> bool {
    if t.shape != [kernel.x1_size(), kernel.x2_size(), kernel.y_size()] {
        return false;
    }
    let (worst, impossible) = type_deviation(t, kernel);
    impossible == 0 && worst <= eps
}

/// Detection tolerance `delta^4 eta^2 / (2 |X1|^2 |X2|^2 |Z|)`.
pub fn detection_epsilon(delta: f64, eta: f64, x1_size: usize, x2_size: usize, y_size: usize) -> f64 {
    let (a, b) = (x1_size as f64, x2_size as f64);
    delta.powi(4) * eta * eta / (2.0 * a * a * b * b * y_size as f64)
}

/// Escape probability bound `2 exp(-n eps^4 / 2)`.
pub fn detection_bound(n: u64, eps: f64) -> f64 {
    2.0 * (-(n as f64) * eps.powi(4) / 2.0).exp()
}

/// Tolerance at which an honest sample of length `n` over `cells` cells is
/// rejected with probability at most `alpha` (Hoeffding plus a union bound).
pub fn typicality_tolerance(n: u64, cells: usize, alpha: f64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    ((2.0 * cells as f64 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheatRole {
    Sender1,
    Sender2,
    Receiver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheatMode {
    /// Senders transmit the next symbol but report the honest draw;
    /// the receiver reports the next output symbol.
    Flip,
    /// Senders transmit symbol 0 but report the honest draw; the receiver
    /// reports output 0.
    Constant,
    /// Senders transmit honestly and report the next symbol; the receiver
    /// reports a uniformly random output.
    Misreport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheatStrategy {
    pub role: CheatRole,
    pub delta: f64,
    pub mode: CheatMode,
}

impl CheatStrategy {
    pub fn new(role: CheatRole, delta: f64, mode: CheatMode) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return arg(format!("deviation fraction {delta} outside [0,1]"));
        }
        Ok(Self { role, delta, mode })
    }

    /// `ceil(delta * n)`.
    pub fn deviating_positions(&self, n: usize) -> usize {
        ((self.delta * n as f64).ceil() as usize).min(n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub n: usize,
    pub queried: Vec<usize>,
    /// Reported `(x1, x2, y)` at the queried positions.
    pub reported: Vec<(usize, usize, usize)>,
    pub max_deviation: f64,
    pub impossible: u64,
    pub typical: bool,
}

/// One audited block of `n` channel uses.
///
/// Honest inputs are drawn from `d1`, `d2`. A cheater deviates in
/// `ceil(delta n)` uniformly chosen positions. Each position is queried
/// independently with probability 1/2 and the verdict is conditional
/// typicality of the reported triples at the queried positions, measured
/// against the subsample's own length.
pub fn run_test_unit(
    kernel: &MacKernel,
    d1: &Distribution,
    d2: &Distribution,
    n: usize,
    strategy: Option<&CheatStrategy>,
    eps: f64,
    rng: &mut SeededRng,
) -> Result<TestReport> {
    if !(eps > 0.0) {
        return arg(format!("typicality tolerance {eps} must be positive"));
    }
    if d1.alphabet_size() != kernel.x1_size() || d2.alphabet_size() != kernel.x2_size() {
        return arg("input distributions do not match the kernel's alphabets");
    }
    let x1: Vec<usize> = (0..n).map(|_| sample(d1, rng)).collect();
    let x2: Vec<usize> = (0..n).map(|_| sample(d2, rng)).collect();
    let (mut sent1, mut sent2) = (x1.clone(), x2.clone());
    let (mut rep1, mut rep2) = (x1, x2);
    let mut cheat_at = vec![false; n];
    if let Some(s) = strategy {
        let all: Vec<usize> = (0..n).collect();
        for i in sample_subset(&all, s.deviating_positions(n), rng) {
            cheat_at[i] = true;
        }
        let deviate = |sent: &mut [usize], rep: &mut [usize], size: usize| {
            for i in (0..n).filter(|i| cheat_at[*i]) {
                match s.mode {
                    CheatMode::Flip => sent[i] = (sent[i] + 1) % size,
                    CheatMode::Constant => sent[i] = 0,
                    CheatMode::Misreport => rep[i] = (rep[i] + 1) % size,
                }
            }
        };
        match s.role {
            CheatRole::Sender1 => deviate(&mut sent1, &mut rep1, kernel.x1_size()),
            CheatRole::Sender2 => deviate(&mut sent2, &mut rep2, kernel.x2_size()),
            CheatRole::Receiver => {}
        }
    }
    let mut y: Vec<usize> = (0..n).map(|i| kernel.sample_output(sent1[i], sent2[i], rng)).collect();
    if let Some(s) = strategy.filter(|s| s.role == CheatRole::Receiver) {
        let ny = kernel.y_size();
        for i in (0..n).filter(|i| cheat_at[*i]) {
            y[i] = match s.mode {
                CheatMode::Flip => (y[i] + 1) % ny,
                CheatMode::Constant => 0,
                CheatMode::Misreport => rng.gen_range(0..ny),
            };
        }
    }
    let queried: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    let reported: Vec<(usize, usize, usize)> = queried.iter().map(|i| (rep1[*i], rep2[*i], y[*i])).collect();
    let (a, b, c): (Vec<_>, Vec<_>, Vec<_>) = reported.iter().fold((vec![], vec![], vec![]), |mut acc, t| {
        acc.0.push(t.0);
        acc.1.push(t.1);
        acc.2.push(t.2);
        acc
    });
    let t = empirical_type(&a, &b, &c, [kernel.x1_size(), kernel.x2_size(), kernel.y_size()])?;
    let (max_deviation, impossible) = type_deviation(&t, kernel);
    Ok(TestReport {
        n,
        typical: impossible == 0 && max_deviation <= eps,
        queried,
        reported,
        max_deviation,
        impossible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{identity_mac, noisy_identity_mac, su_sbc};

    fn uniform() -> Distribution {
        Distribution::uniform(2).unwrap()
    }

    #[test]
    fn type_examples() {
        let t = empirical_type(&[1; 5], &[0; 5], &[2; 5], [2, 2, 4]).unwrap();
        assert_eq!(t.count(1, 0, 2), 5);
        assert_eq!(t.counts().iter().sum::<u64>(), 5);
        // hand-counted
        let t = empirical_type(&[0, 1, 0, 0], &[1, 1, 1, 0], &[1, 3, 1, 0], [2, 2, 4]).unwrap();
        assert_eq!(t.count(0, 1, 1), 2);
        assert_eq!(t.count(1, 1, 3), 1);
        assert_eq!(t.count(0, 0, 0), 1);
        assert_eq!(t.pair_count(0, 1), 2);
        assert!(empirical_type(&[0], &[0, 1], &[0], [2, 2, 2]).is_err());
    }

    #[test]
    fn identity_type_matches_inputs() {
        let mut rng = SeededRng::new(5, 0);
        let x1: Vec<usize> = (0..50).map(|_| rng.gen_range(0..2)).collect();
        let x2: Vec<usize> = (0..50).map(|_| rng.gen_range(0..2)).collect();
        let y: Vec<usize> = crate::channels::transmit(&identity_mac(), &x1, &x2, &mut rng)
            .unwrap()
            .iter()
            .map(|o| o.y)
            .collect();
        let t = empirical_type(&x1, &x2, &y, [2, 2, 4]).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let direct = x1.iter().zip(&x2).filter(|(p, q)| **p == a && **q == b).count() as u64;
                assert_eq!(t.count(a, b, a * 2 + b), direct);
                assert_eq!(t.pair_count(a, b), direct);
            }
        }
        assert!(is_cond_typical(&t, &identity_mac(), 1e-9));
        let flipped: Vec<usize> = y.iter().map(|v| 3 - v).collect();
        let t = empirical_type(&x1, &x2, &flipped, [2, 2, 4]).unwrap();
        assert!(!is_cond_typical(&t, &identity_mac(), 0.49));
    }

    #[test]
    fn detection_formulas() {
        assert!((detection_epsilon(1.0, 1.0, 2, 2, 2) - 1.0 / 64.0).abs() < 1e-15);
        assert_eq!(detection_bound(0, 0.3), 2.0);
        assert!(detection_bound(u64::MAX, 0.3) < 1e-300);
    }

    #[test]
    fn honest_noisy_sample_is_typical() {
        let k = noisy_identity_mac(0.1).unwrap();
        let mut typical = 0;
        for t in 0..500 {
            let mut rng = SeededRng::new(77, t);
            let x1: Vec<usize> = (0..1000).map(|_| rng.gen_range(0..2)).collect();
            let x2: Vec<usize> = (0..1000).map(|_| rng.gen_range(0..2)).collect();
            let y: Vec<usize> = x1.iter().zip(&x2).map(|(a, b)| k.sample_output(*a, *b, &mut rng)).collect();
            if is_cond_typical(&empirical_type(&x1, &x2, &y, [2, 2, 4]).unwrap(), &k, 0.05) {
                typical += 1;
            }
        }
        assert!(typical >= 495, "{typical}");
    }

    #[test]
    fn test_unit_detects_flips() {
        let k = su_sbc(0.5, identity_mac()).unwrap().kernel();
        let s = CheatStrategy::new(CheatRole::Sender1, 0.3, CheatMode::Flip).unwrap();
        let eps = typicality_tolerance(200, 4 * k.y_size(), 0.01);
        let detected = (0..200)
            .filter(|t| {
                let mut rng = SeededRng::new(9, *t);
                !run_test_unit(&k, &uniform(), &uniform(), 400, Some(&s), eps, &mut rng).unwrap().typical
            })
            .count();
        assert!(detected >= 198, "{detected}");
        let mut rng = SeededRng::new(9, 1000);
        assert!(run_test_unit(&identity_mac(), &uniform(), &uniform(), 400, None, 1e-9, &mut rng).unwrap().typical);
    }

    #[test]
    fn honest_noisy_false_positive_rate() {
        let k = su_sbc(0.5, noisy_identity_mac(0.05).unwrap()).unwrap().kernel();
        let eps = typicality_tolerance(100, 4 * k.y_size(), 0.05);
        let fp = (0..200)
            .filter(|t| {
                let mut rng = SeededRng::new(10, *t);
                !run_test_unit(&k, &uniform(), &uniform(), 400, None, eps, &mut rng).unwrap().typical
            })
            .count();
        assert!(fp <= 10, "{fp}");
    }

    #[test]
    fn receiver_and_constant_modes_are_caught() {
        let k = su_sbc(0.5, identity_mac()).unwrap().kernel();
        for s in [
            CheatStrategy::new(CheatRole::Receiver, 1.0, CheatMode::Flip).unwrap(),
            CheatStrategy::new(CheatRole::Sender2, 1.0, CheatMode::Constant).unwrap(),
            CheatStrategy::new(CheatRole::Sender2, 1.0, CheatMode::Misreport).unwrap(),
        ] {
            let mut rng = SeededRng::new(3, 3);
            assert!(!run_test_unit(&k, &uniform(), &uniform(), 100, Some(&s), 0.1, &mut rng).unwrap().typical);
        }
        assert!(CheatStrategy::new(CheatRole::Receiver, 1.5, CheatMode::Flip).is_err());
    }
}
