//! Monte-Carlo and exact checks of correctness and privacy, and measurements
//! of what deviating parties gain.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{bec, identity_mac, su_sbc, MacKernel, SbcParams};
use crate::error::{arg, size_check, Error, Result};
use crate::prob::{Distribution, SeededRng};
use crate::protocol::{
    majority_coin, mac_ot, malicious_bob, two_party_ot, FctAbort, OtOutcome, OtSource, ProtocolParams, ReceiverChoice,
    SenderInput, SetSizing, SplitRule, TwoPartyParams,
};
use crate::typicality::{run_test_unit, CheatStrategy};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Largest state space an exact enumeration may visit.
pub const ENUMERATION_CAP: u128 = 1 << 22;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// A binomial proportion with its Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proportion {
    pub count: u64,
    pub trials: u64,
    pub rate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Proportion {
    pub fn new(count: u64, trials: u64) -> Self {
        let (lower, upper) = wilson_interval(count, trials, Z95);
        Self {
            count,
            trials,
            rate: if trials == 0 { 0.0 } else { count as f64 / trials as f64 },
            lower,
            upper,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ProtocolConfig {
    /// The two-sender protocol on an erasure-mixture channel.
    Mac { sbc: SbcParams, params: ProtocolParams },
    /// The one-sender protocol on an erasure channel.
    TwoParty { p_erase: f64, params: TwoPartyParams },
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialStats {
    pub trials: u64,
    pub completed: u64,
    pub aborted: u64,
    pub decode_errors: u64,
    /// Correct recoveries among runs that did not abort; decode errors count
    /// as failures.
    pub correctness: Proportion,
    pub abort_rate: Proportion,
    /// Seconds per trial. Ignored by equality.
    pub mean_runtime: f64,
}

impl PartialEq for TrialStats {
    fn eq(&self, other: &Self) -> bool {
        (self.trials, self.completed, self.aborted, self.decode_errors, self.correctness, self.abort_rate)
            == (other.trials, other.completed, other.aborted, other.decode_errors, other.correctness, other.abort_rate)
    }
}

enum TrialResult {
    Correct,
    Wrong,
    Aborted,
    DecodeError,
}

fn one_trial(cfg: &ProtocolConfig, rng: &mut SeededRng) -> Result<TrialResult> {
    let classify = |outcome: &OtOutcome, truth: Vec<_>| match outcome {
        OtOutcome::Completed { recovered } if recovered.to_vec() == truth => TrialResult::Correct,
        OtOutcome::Completed { .. } => TrialResult::Wrong,
        OtOutcome::Aborted { .. } => TrialResult::Aborted,
        OtOutcome::DecodeError { .. } => TrialResult::DecodeError,
    };
    match cfg {
        ProtocolConfig::Mac { sbc, params } => {
            let in1 = SenderInput::random(params.k1, rng);
            let in2 = SenderInput::random(params.k2, rng);
            let choice = ReceiverChoice::new(rng.gen_range(0..2), rng.gen_range(0..2))?;
            let run = mac_ot(sbc, &in1, &in2, choice, params, rng, None)?;
            let truth = vec![in1.get(choice.get(0)).clone(), in2.get(choice.get(1)).clone()];
            Ok(classify(&run.outcome, truth))
        }
        ProtocolConfig::TwoParty { p_erase, params } => {
            let input = SenderInput::random(params.k, rng);
            let z: u8 = rng.gen_range(0..2);
            let run = two_party_ot(&bec(*p_erase)?, &input, z, params, rng)?;
            Ok(classify(&run.outcome, vec![input.get(z as usize).clone()]))
        }
    }
}

/// Independent runs on streams `(master_seed, 0..trials)` with random
/// inputs and choices.
pub fn run_trials(cfg: &ProtocolConfig, trials: u64, master_seed: u64) -> Result<TrialStats> {
    if trials == 0 {
        return arg("at least one trial is required");
    }
    let results: Vec<(TrialResult, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = SeededRng::new(master_seed, t);
            let start = Instant::now();
            let r = one_trial(cfg, &mut rng)?;
            Ok((r, start.elapsed().as_secs_f64()))
        })
        .collect::<Result<_>>()?;
    let count = |f: fn(&TrialResult) -> bool| results.iter().filter(|(r, _)| f(r)).count() as u64;
    let correct = count(|r| matches!(r, TrialResult::Correct));
    let wrong = count(|r| matches!(r, TrialResult::Wrong));
    let aborted = count(|r| matches!(r, TrialResult::Aborted));
    let decode_errors = count(|r| matches!(r, TrialResult::DecodeError));
    Ok(TrialStats {
        trials,
        completed: correct + wrong,
        aborted,
        decode_errors,
        correctness: Proportion::new(correct, trials - aborted),
        abort_rate: Proportion::new(aborted, trials),
        mean_runtime: results.iter().map(|(_, s)| s).sum::<f64>() / trials as f64,
    })
}

/// One information quantity, in bits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageReport {
    pub quantity: String,
    /// Computed from an exact table rather than estimated.
    pub exact: bool,
    pub value: f64,
    pub bound: Option<f64>,
}

/// Tiny instance of the two-sender protocol on the joint-erasure
/// correlation with `P(not erased) = p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverPrivacyConfig {
    pub n: usize,
    pub p: f64,
    /// The receiver aborts unless it holds at least this many erased and
    /// this many non-erased positions.
    pub set_size: usize,
    #[serde(default = "equal_sizing")]
    pub sizing: SetSizing,
}

fn equal_sizing() -> SetSizing {
    SetSizing::Equal
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceiverPrivacyReport {
    /// `I(Z_i; U_i)` for each sender, given that the run did not abort.
    pub leakage: [LeakageReport; 2],
    /// `I(Z_i; U_i | Z_other)`: what a sender learns once the other
    /// sender's choice is fixed, since every set goes over the shared
    /// public channel.
    pub given_other_choice: [f64; 2],
    pub non_abort_probability: f64,
    pub states: u128,
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All `size`-subsets of `items`, as bitmasks.
fn subsets(items: &[usize], size: usize) -> Vec<u32> {
    fn rec(items: &[usize], size: usize, start: usize, mask: u32, out: &mut Vec<u32>) {
        if size == 0 {
            out.push(mask);
            return;
        }
        for i in start..items.len() {
            if items.len() - i < size {
                break;
            }
            rec(items, size - 1, i + 1, mask | 1 << items[i], out);
        }
    }
    let mut out = Vec::new();
    rec(items, size, 0, 0, &mut out);
    out
}

/// `sum p log2(p / (p_a p_b))` over a table indexed by `(a, b)`.
fn table_information<K: Ord + Clone>(table: &BTreeMap<(K, u8), f64>) -> f64 {
    let total: f64 = table.values().sum();
    let mut pa: BTreeMap<K, f64> = BTreeMap::new();
    let mut pb = [0.0; 2];
    for ((a, b), v) in table {
        *pa.entry(a.clone()).or_default() += v / total;
        pb[*b as usize] += v / total;
    }
    table
        .iter()
        .filter(|(_, v)| **v > 0.0)
        .map(|((a, b), v)| {
            let p = v / total;
            p * (p / (pa[a] * pb[*b as usize])).log2()
        })
        .sum()
}

/// Exact `I(Z_i; U_i)` by enumerating erasure patterns, the receiver's set
/// choices and both choice bits (uniform and independent).
///
/// A sender's view is its inputs, channel bits, hash seeds and the public
/// transcript. Everything but the revealed sets is independent of the
/// choices and the sets, so the sets are the whole of the relevant view.
pub fn receiver_privacy_exact(cfg: &ReceiverPrivacyConfig) -> Result<ReceiverPrivacyReport> {
    let n = cfg.n;
    if n == 0 || n > 20 {
        return arg(format!("n = {n} outside 1..=20"));
    }
    if !(0.0..=1.0).contains(&cfg.p) {
        return arg(format!("p = {} outside [0,1]", cfg.p));
    }
    let (chosen, unchosen) = cfg.sizing.sizes(cfg.set_size);
    let s = cfg.set_size;
    if s == 0 {
        return arg("set size must be positive");
    }
    let states: u128 = (1u128 << n)
        + (s..=n - s.min(n))
            .map(|c| binom(n, c) * binom(c, chosen) * binom(n - c, unchosen) * 4)
            .sum::<u128>();
    size_check("receiver-privacy states", states, ENUMERATION_CAP)?;

    // view -> (z1, z2) -> probability; a view is the two ordered set pairs
    let mut table: BTreeMap<[u32; 4], [[f64; 2]; 2]> = BTreeMap::new();
    let mut non_abort = 0.0;
    for pattern in 0u32..1 << n {
        let erased: Vec<usize> = (0..n).filter(|i| pattern >> i & 1 == 1).collect();
        let clear: Vec<usize> = (0..n).filter(|i| pattern >> i & 1 == 0).collect();
        if clear.len() < s || erased.len() < s {
            continue;
        }
        let prob = cfg.p.powi(clear.len() as i32) * (1.0 - cfg.p).powi(erased.len() as i32);
        if prob == 0.0 {
            continue;
        }
        non_abort += prob;
        let goods = subsets(&clear, chosen);
        let bads = subsets(&erased, unchosen);
        let w = prob / (goods.len() * bads.len()) as f64 / 4.0;
        for g in &goods {
            for b in &bads {
                let order = |z: usize| if z == 0 { [*g, *b] } else { [*b, *g] };
                for z1 in 0..2 {
                    for z2 in 0..2 {
                        let [a0, a1] = order(z1);
                        let [b0, b1] = order(z2);
                        table.entry([a0, a1, b0, b1]).or_insert([[0.0; 2]; 2])[z1][z2] += w;
                    }
                }
            }
        }
    }
    if non_abort == 0.0 {
        return Err(Error::Domain("the receiver aborts on every erasure pattern".into()));
    }
    let marginal = |sender: usize| {
        let mut t = BTreeMap::new();
        for (view, p) in &table {
            for z in 0..2u8 {
                let v = if sender == 0 { p[z as usize][0] + p[z as usize][1] } else { p[0][z as usize] + p[1][z as usize] };
                t.insert((*view, z), v);
            }
        }
        table_information(&t)
    };
    let conditional = |sender: usize| {
        (0..2)
            .map(|other| {
                let mut t = BTreeMap::new();
                for (view, p) in &table {
                    for z in 0..2u8 {
                        let v = if sender == 0 { p[z as usize][other] } else { p[other][z as usize] };
                        t.insert((*view, z), v);
                    }
                }
                0.5 * table_information(&t)
            })
            .sum::<f64>()
    };
    let report = |i: usize| LeakageReport {
        quantity: format!("I(Z{}; U{})", i + 1, i + 1),
        exact: true,
        value: marginal(i).max(0.0),
        bound: None,
    };
    Ok(ReceiverPrivacyReport {
        leakage: [report(0), report(1)],
        given_other_choice: [conditional(0).max(0.0), conditional(1).max(0.0)],
        non_abort_probability: non_abort,
        states,
    })
}

/// How the receiver fills the set whose string it should not learn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReceiverBehavior {
    /// Every position of the unselected set is erased.
    Honest,
    /// `n` uses at non-erasure probability `p`, non-erased positions spread
    /// over both sets by `rule`; set 1 plays the unselected set.
    Split { rule: SplitRule, n: usize, p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SenderPrivacyConfig {
    pub set_size: usize,
    pub k: usize,
    #[serde(default)]
    pub digest_len: Option<usize>,
    /// Use the identity map as key hash; needs `k == set_size`.
    #[serde(default)]
    pub identity_hash: bool,
    pub receiver: ReceiverBehavior,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SenderPrivacyReport {
    /// `k - H(key | key seed, outputs on the set)` for one sender.
    pub per_sender: LeakageReport,
    /// Both senders' unselected keys together.
    pub joint: LeakageReport,
    pub hashed_entropy: f64,
    /// Collision entropy of the set's bits given the receiver's outputs,
    /// `-log2 E 2^-u` with `u` the unknown count.
    pub renyi2: f64,
    /// `(u, P(u))`
    pub unknown_distribution: Vec<(usize, f64)>,
    pub bound_holds: Option<bool>,
}

/// `P(rank = r)` for a uniform `rows x cols` matrix over GF(2).
pub fn rank_distribution(rows: usize, cols: usize) -> Vec<f64> {
    let top = rows.min(cols);
    let mut out = vec![0.0; top + 1];
    for (r, slot) in out.iter_mut().enumerate() {
        let mut v = 0.5f64.powi((rows * cols) as i32);
        for i in 0..r {
            let two_i = 2f64.powi(i as i32);
            v *= (2f64.powi(rows as i32) - two_i) * (2f64.powi(cols as i32) - two_i) / (2f64.powi(r as i32) - two_i);
        }
        *slot = v;
    }
    out
}

fn expected_rank(rows: usize, cols: usize) -> f64 {
    rank_distribution(rows, cols).iter().enumerate().map(|(r, p)| r as f64 * p).sum()
}

/// Unknown-count distribution of the unselected set.
fn unknown_distribution(cfg: &SenderPrivacyConfig) -> Result<Vec<(usize, f64)>> {
    let m = cfg.set_size;
    match cfg.receiver {
        ReceiverBehavior::Honest => Ok(vec![(m, 1.0)]),
        ReceiverBehavior::Split { rule, n, p } => {
            if 2 * m > n {
                return arg(format!("two sets of {m} do not fit in {n} positions"));
            }
            if !(0.0..=1.0).contains(&p) {
                return arg(format!("p = {p} outside [0,1]"));
            }
            let mut dist = vec![0.0; m + 1];
            let weight = |c: usize| binom(n, c) as f64 * p.powi(c as i32) * (1.0 - p).powi((n - c) as i32);
            for c in 0..=n {
                let first = match rule {
                    SplitRule::Even => c.div_ceil(2).min(m),
                    SplitRule::AllInS0 | SplitRule::AllInS1 => c.min(m),
                };
                let rest = (c - first).min(m);
                // set 1 gets the remainder, except when the rule favors it
                let known = if rule == SplitRule::AllInS1 { first } else { rest };
                dist[m - known] += weight(c);
            }
            Ok(dist.into_iter().enumerate().filter(|(_, p)| *p > 0.0).collect())
        }
    }
}

/// Exact key entropy left to the receiver on the unselected set, from the
/// unknown-count distribution and the rank distribution of random linear
/// hashes restricted to the unknown positions.
pub fn sender_privacy_exact(cfg: &SenderPrivacyConfig) -> Result<SenderPrivacyReport> {
    let (m, k) = (cfg.set_size, cfg.k);
    size_check("set size", m as u128, 16)?;
    size_check("key length", k as u128, 8)?;
    if k == 0 || k > m {
        return arg(format!("key length {k} outside 1..={m}"));
    }
    if cfg.identity_hash && (k != m || cfg.digest_len.is_some()) {
        return arg("the identity hash needs k equal to the set size and no digest");
    }
    let d = cfg.digest_len.unwrap_or(0);
    if d > m {
        return arg(format!("digest length {d} exceeds the set size {m}"));
    }
    let dist = unknown_distribution(cfg)?;
    // H(key | seeds, outputs, digest) at u unknown positions
    let entropy_at = |u: usize| -> f64 {
        if cfg.identity_hash {
            u as f64
        } else {
            expected_rank(k + d, u) - expected_rank(d, u)
        }
    };
    let hashed_entropy: f64 = dist.iter().map(|(u, p)| p * entropy_at(*u)).sum();
    let leakage = (k as f64 - hashed_entropy).max(0.0);
    let renyi2 = -dist.iter().map(|(u, p)| p * 0.5f64.powi(*u as i32)).sum::<f64>().log2();
    let bound = (d == 0).then(|| 2f64.powf(k as f64 - renyi2) / std::f64::consts::LN_2);

    // the two senders share the unknown positions but hash independent bits
    let joint_value: f64 = dist.iter().map(|(u, p)| p * 2.0 * (k as f64 - entropy_at(*u))).sum();
    Ok(SenderPrivacyReport {
        per_sender: LeakageReport {
            quantity: "k - H(key | seed, outputs)".into(),
            exact: true,
            value: leakage,
            bound,
        },
        joint: LeakageReport {
            quantity: "2k - H(both keys | seeds, outputs)".into(),
            exact: true,
            value: joint_value.max(0.0),
            bound: bound.map(|b| 2.0 * b),
        },
        hashed_entropy,
        renyi2,
        unknown_distribution: dist,
        bound_holds: bound.map(|b| leakage <= b + 1e-12),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdvantageConfig {
    pub n: usize,
    pub p: f64,
    pub eta: f64,
    pub k: usize,
    /// Receiver-assumed rate; defaults to `p - eta`.
    #[serde(default)]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdvantageArm {
    pub runs: u64,
    pub aborted: u64,
    /// Mean exact probability of guessing an unselected string.
    pub unselected_success: f64,
    /// Mean exact probability of guessing both strings of a sender.
    pub both_success: f64,
    /// `unselected_success * 2^k`; 1 means no advantage over a blind guess.
    pub advantage_ratio: f64,
    /// Sampled guesses at both strings that came out right.
    pub both_guessed: Proportion,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdvantageReport {
    pub honest: AdvantageArm,
    pub malicious: AdvantageArm,
    pub split: SplitRule,
    /// Runs where the erased-count floor applied and failed.
    pub floor_violations: u64,
    pub floor_checked: u64,
}

/// Compares an honest receiver with one splitting the non-erased positions
/// by `split`, on the identity correlation, over `trials` runs each.
pub fn malicious_bob_advantage(cfg: &AdvantageConfig, split: SplitRule, trials: u64, master_seed: u64) -> Result<AdvantageReport> {
    if trials == 0 {
        return arg("at least one trial is required");
    }
    let sbc = su_sbc(cfg.p, identity_mac())?;
    let r = cfg.r.unwrap_or(cfg.p - cfg.eta);
    let params = ProtocolParams::with_defaults(cfg.n, cfg.p)
        .with_eta(cfg.eta)
        .with_rates(r, r)
        .with_k(cfg.k, cfg.k);
    params.validate()?;
    let adversary = malicious_bob(split);
    let arm = |malicious: bool| -> Result<(AdvantageArm, u64, u64)> {
        let runs: Vec<_> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = SeededRng::new(master_seed, t).substream(&[malicious as u64]);
                let in1 = SenderInput::random(cfg.k, &mut rng);
                let in2 = SenderInput::random(cfg.k, &mut rng);
                let choice = ReceiverChoice::new(rng.gen_range(0..2), rng.gen_range(0..2))?;
                let run = mac_ot(&sbc, &in1, &in2, choice, &params, &mut rng, malicious.then_some(&adversary))?;
                Ok((run, choice))
            })
            .collect::<Result<_>>()?;
        let (mut aborted, mut unsel, mut both, mut guessed, mut counted) = (0u64, 0.0, 0.0, 0u64, 0u64);
        let (mut violations, mut checked) = (0u64, 0u64);
        for (run, choice) in &runs {
            if let Some(m) = &run.malicious {
                if m.floor_applicable {
                    checked += 1;
                    violations += !m.floor_holds as u64;
                }
            }
            let Some(knowledge) = run.knowledge.as_ref().filter(|_| !matches!(run.outcome, OtOutcome::Aborted { .. })) else {
                aborted += 1;
                continue;
            };
            for (i, k) in knowledge.iter().enumerate() {
                let z = choice.get(i);
                unsel += k[1 - z].success;
                both += k[0].success * k[1].success;
                guessed += (k[0].guessed_correctly && k[1].guessed_correctly) as u64;
                counted += 1;
            }
        }
        let c = counted.max(1) as f64;
        Ok((
            AdvantageArm {
                runs: trials,
                aborted,
                unselected_success: unsel / c,
                both_success: both / c,
                advantage_ratio: unsel / c * 2f64.powi(cfg.k as i32),
                both_guessed: Proportion::new(guessed, counted),
            },
            violations,
            checked,
        ))
    };
    let (honest, _, _) = arm(false)?;
    let (malicious, floor_violations, floor_checked) = arm(true)?;
    Ok(AdvantageReport {
        honest,
        malicious,
        split,
        floor_violations,
        floor_checked,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FctBiasReport {
    pub rounds: usize,
    pub ones: Proportion,
    /// `|P(coin = 1) - 1/2|` at the point estimate.
    pub bias: f64,
    /// Interval for the bias implied by the interval on `P(coin = 1)`.
    pub bias_lower: f64,
    pub bias_upper: f64,
    pub aborted_runs: u64,
}

/// Estimates the bias of the majority-of-`rounds` coin under `abort`.
pub fn fct_bias(source: &OtSource, abort: FctAbort, rounds: usize, runs: u64, master_seed: u64) -> Result<FctBiasReport> {
    if runs < 100 {
        return arg(format!("{runs} runs; at least 100 are required"));
    }
    let outs: Vec<_> = (0..runs)
        .into_par_iter()
        .map(|t| majority_coin(source, abort, rounds, &mut SeededRng::new(master_seed, t)))
        .collect::<Result<_>>()?;
    let ones = Proportion::new(outs.iter().filter(|o| o.coin).count() as u64, runs);
    let (lo, hi) = (ones.lower - 0.5, ones.upper - 0.5);
    let (bias_lower, bias_upper) = if lo <= 0.0 && hi >= 0.0 { (0.0, lo.abs().max(hi.abs())) } else { (lo.abs().min(hi.abs()), lo.abs().max(hi.abs())) };
    Ok(FctBiasReport {
        rounds,
        bias: (ones.rate - 0.5).abs(),
        ones,
        bias_lower,
        bias_upper,
        aborted_runs: outs.iter().filter(|o| o.aborted_at.is_some()).count() as u64,
    })
}

/// Fraction of test-unit blocks rejected, with uniform honest inputs.
pub fn test_unit_rejection(
    kernel: &MacKernel,
    strategy: Option<&CheatStrategy>,
    n: usize,
    eps: f64,
    trials: u64,
    master_seed: u64,
) -> Result<Proportion> {
    let d1 = Distribution::uniform(kernel.x1_size())?;
    let d2 = Distribution::uniform(kernel.x2_size())?;
    let rejected: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| Ok(!run_test_unit(kernel, &d1, &d2, n, strategy, eps, &mut SeededRng::new(master_seed, t))?.typical))
        .collect::<Result<_>>()?;
    Ok(Proportion::new(rejected.iter().filter(|r| **r).count() as u64, trials))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(50, 100, Z95);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
        let (lo, hi) = wilson_interval(0, 10, Z95);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.2775).abs() < 1e-3);
        assert_eq!(wilson_interval(0, 0, Z95), (0.0, 1.0));
    }

    #[test]
    fn rank_law_sums_to_one() {
        for (r, c) in [(1, 1), (2, 5), (4, 4), (3, 10)] {
            let d = rank_distribution(r, c);
            assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        // 1x1: rank 1 iff the entry is 1
        assert_eq!(rank_distribution(1, 1), vec![0.5, 0.5]);
    }

    #[test]
    fn receiver_privacy_small() {
        let honest = receiver_privacy_exact(&ReceiverPrivacyConfig { n: 6, p: 0.5, set_size: 2, sizing: SetSizing::Equal }).unwrap();
        assert!(honest.leakage.iter().all(|l| l.value <= 1e-9));
        // the other sender's sets give away Z1 xor Z2
        assert!((honest.given_other_choice[0] - 1.0).abs() < 1e-9);
        let bug = receiver_privacy_exact(&ReceiverPrivacyConfig { n: 6, p: 0.5, set_size: 2, sizing: SetSizing::Asymmetric }).unwrap();
        assert!(bug.leakage[0].value > 0.99);
        assert!(receiver_privacy_exact(&ReceiverPrivacyConfig { n: 4, p: 0.5, set_size: 3, sizing: SetSizing::Equal }).is_err());
    }

    #[test]
    fn sender_privacy_honest_values() {
        let r = sender_privacy_exact(&SenderPrivacyConfig {
            set_size: 6,
            k: 2,
            digest_len: None,
            identity_hash: false,
            receiver: ReceiverBehavior::Honest,
        })
        .unwrap();
        // E[2 - rank] for a uniform 2x6 matrix: P(rank 0) = 2^-12, P(rank 1) = 3 * 63 / 4096
        let expect = 2.0 * 2f64.powi(-12) + 3.0 * 63.0 / 4096.0;
        assert!((r.per_sender.value - expect).abs() < 1e-12);
        assert_eq!(r.renyi2, 6.0);
        assert_eq!(r.bound_holds, Some(true));
        assert!((r.joint.value - 2.0 * r.per_sender.value).abs() < 1e-12);
        let id = sender_privacy_exact(&SenderPrivacyConfig {
            set_size: 4,
            k: 4,
            digest_len: None,
            identity_hash: true,
            receiver: ReceiverBehavior::Honest,
        })
        .unwrap();
        assert_eq!(id.per_sender.value, 0.0);
    }

    #[test]
    fn trials_are_deterministic_and_abort_when_infeasible() {
        let cfg = ProtocolConfig::TwoParty {
            p_erase: 0.5,
            params: TwoPartyParams { n: 256, k: 16, r: 0.3 },
        };
        let a = run_trials(&cfg, 20, 3).unwrap();
        assert_eq!(a, run_trials(&cfg, 20, 3).unwrap());
        assert_eq!(a.completed + a.aborted + a.decode_errors, 20);
        let dead = ProtocolConfig::TwoParty {
            p_erase: 0.0,
            params: TwoPartyParams { n: 64, k: 4, r: 0.25 },
        };
        assert_eq!(run_trials(&dead, 10, 1).unwrap().aborted, 10);
        assert!(run_trials(&cfg, 0, 1).is_err());
    }

    #[test]
    fn fct_ideal_is_fair() {
        let r = fct_bias(&OtSource::Ideal, FctAbort::Honest, 1, 4000, 5).unwrap();
        assert!(r.bias_lower == 0.0 || r.bias < 0.05);
        assert!(fct_bias(&OtSource::Ideal, FctAbort::Honest, 1, 10, 5).is_err());
    }
}
