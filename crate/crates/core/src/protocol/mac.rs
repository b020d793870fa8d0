use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{
    decode_step5, guess_string, mask_pair, GuessReport, MaskedPair, Message, OtOutcome, ProtocolParams, PublicChannel,
    ReceiverChoice, ReceiverView, SenderInput, SenderView, EXHAUSTIVE_CAP,
};
use crate::channels::{transmit, MacSymbolOut, SbcParams};
use crate::error::{Error, Result};
use crate::prob::{sample_subset, BitString, Distribution, SeededRng};
use crate::typicality::{run_test_unit, CheatStrategy, TestReport};

/// How a dishonest receiver spreads the non-erased positions over the two
/// revealed sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitRule {
    /// Half of the non-erased positions into each set.
    Even,
    /// As many non-erased positions as fit into set 0, the rest into set 1.
    AllInS0,
    AllInS1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Adversary {
    MaliciousBob { split: SplitRule },
    /// A sender deviating on an audit block checked by the test unit.
    UnfairSender { strategy: CheatStrategy, eps: f64 },
}

pub fn malicious_bob(split: SplitRule) -> Adversary {
    Adversary::MaliciousBob { split }
}

pub fn unfair_sender(strategy: CheatStrategy, eps: f64) -> Result<Adversary> {
    if !(strategy.delta > 0.0 && strategy.delta <= 1.0) {
        return Err(Error::Argument(format!("deviation fraction {} outside (0,1]", strategy.delta)));
    }
    Ok(Adversary::UnfairSender { strategy, eps })
}

/// Sizes of the (chosen, unchosen) sets a receiver reveals. Only `Equal` is
/// a correct receiver; `Asymmetric` exists to show what unequal sizes leak.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetSizing {
    Equal,
    Asymmetric,
}

impl SetSizing {
    pub fn sizes(&self, s: usize) -> (usize, usize) {
        match self {
            SetSizing::Equal => (s, s),
            SetSizing::Asymmetric => (s, s.saturating_sub(1)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaliciousReport {
    pub non_erased: usize,
    pub erased_in_sets: [usize; 2],
    /// `(p - 3 eta) n / 2`.
    pub floor: f64,
    /// Whether the non-erased count is at most `(p + eta) n`, the regime in
    /// which the floor is claimed.
    pub floor_applicable: bool,
    /// Every set holds at least `floor` erased positions, up to rounding.
    pub floor_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MacOtRun {
    pub outcome: OtOutcome,
    pub senders: Vec<SenderView>,
    pub receiver: ReceiverView,
    pub audit: Option<TestReport>,
    pub malicious: Option<MaliciousReport>,
    /// Per sender, the receiver's optimal guess at each of the two strings,
    /// when the outputs determine the non-erased inputs.
    pub knowledge: Option<Vec<[GuessReport; 2]>>,
}

/// The two-sender protocol over a joint-erasure correlation.
///
/// 1. Each sender transmits `n` uniform bits.
/// 2. The receiver splits positions into erased and non-erased and aborts
///    if either has fewer than `max(r_i n, (p - eta) n)` elements.
/// 3. It draws one set of `(p - eta) n` non-erased and one of erased
///    positions, and reveals them to sender `i` in the order given by `Z_i`.
///    Both senders get the same two sets, so the selected positions line up
///    for joint decoding.
/// 4. Sender `i` masks `M_ij` with a hash of its bits on `S_ij` and
///    publishes seeds, ciphertexts and optional digests.
/// 5. The receiver decodes both senders' bits on the selected set and
///    unmasks.
pub fn mac_ot(
    sbc: &SbcParams,
    in1: &SenderInput,
    in2: &SenderInput,
    choice: ReceiverChoice,
    params: &ProtocolParams,
    rng: &mut SeededRng,
    adversary: Option<&Adversary>,
) -> Result<MacOtRun> {
    params.validate()?;
    if (params.p - sbc.p).abs() > 1e-12 {
        return Err(Error::Parameter(format!("protocol p = {} but the correlation has p = {}", params.p, sbc.p)));
    }
    if sbc.w_prime.is_some() {
        return Err(Error::Argument("the protocol runs on the joint-erasure correlation only".into()));
    }
    if sbc.w.x1_size() != 2 || sbc.w.x2_size() != 2 {
        return Err(Error::Argument("the protocol needs binary inputs".into()));
    }
    let inputs = [in1, in2];
    for i in 0..2 {
        if inputs[i].len() != params.k(i) {
            return Err(Error::Argument(format!(
                "sender {} strings have {} bits, expected {}",
                i + 1,
                inputs[i].len(),
                params.k(i)
            )));
        }
    }
    let kernel = sbc.kernel();
    let n = params.n;
    let uniform = Distribution::uniform(2)?;

    let audit = match adversary {
        Some(Adversary::UnfairSender { strategy, eps }) => {
            Some(run_test_unit(&kernel, &uniform, &uniform, n, Some(strategy), *eps, rng)?)
        }
        _ => None,
    };

    let x = [BitString::random(n, rng), BitString::random(n, rng)];
    let xs: Vec<Vec<usize>> = x.iter().map(|b| (0..n).map(|i| b.get(i) as usize).collect()).collect();
    let received = transmit(&kernel, &xs[0], &xs[1], rng)?;
    let clear: Vec<usize> = (0..n).filter(|i| !received[*i].erased1 && !received[*i].erased2).collect();
    let erased: Vec<usize> = (0..n).filter(|i| received[*i].erased1 && received[*i].erased2).collect();

    let mut public = PublicChannel::new(3);
    let s = params.set_size();
    let mut malicious = None;

    let abort_reason = if audit.as_ref().is_some_and(|a| !a.typical) {
        Some("test unit rejected the sender's channel statistics".to_string())
    } else {
        match adversary {
            Some(Adversary::MaliciousBob { .. }) => (2 * s > n).then(|| format!("infeasible split: two sets of {s} from {n} positions")),
            _ => (0..2).find_map(|i| {
                let need = (params.r(i) * n as f64).max(s as f64);
                ((clear.len() as f64) < need || (erased.len() as f64) < need).then(|| {
                    format!(
                        "sender {}: {} erased and {} non-erased positions, need {need}",
                        i + 1,
                        erased.len(),
                        clear.len()
                    )
                })
            }),
        }
    };
    if let Some(reason) = abort_reason {
        public.send(Message::Abort { reason: reason.clone() });
        return Ok(assemble(OtOutcome::Aborted { reason }, inputs, x, choice, &received, public, audit, None, None));
    }

    // the chosen string sits on the non-erased set
    let sets_for = |good: Vec<usize>, bad: Vec<usize>, z: usize| if z == 0 { [good, bad] } else { [bad, good] };
    let per_sender: [[Vec<usize>; 2]; 2] = match adversary {
        Some(Adversary::MaliciousBob { split }) => {
            let (a, b) = split_sets(&clear, &erased, s, *split, rng);
            let report = MaliciousReport {
                non_erased: clear.len(),
                erased_in_sets: [a.iter().filter(|i| erased.binary_search(i).is_ok()).count(), b.iter().filter(|i| erased.binary_search(i).is_ok()).count()],
                floor: (params.p - 3.0 * params.eta) * n as f64 / 2.0,
                floor_applicable: clear.len() as f64 <= (params.p + params.eta) * n as f64,
                floor_holds: true,
            };
            let min_erased = report.erased_in_sets[0].min(report.erased_in_sets[1]) as f64;
            malicious = Some(MaliciousReport {
                floor_holds: !report.floor_applicable || min_erased >= report.floor - 1.5,
                ..report
            });
            [[a.clone(), b.clone()], [a, b]]
        }
        _ => {
            let good = sample_subset(&clear, s, rng);
            let bad = sample_subset(&erased, s, rng);
            [
                sets_for(good.clone(), bad.clone(), choice.get(0)),
                sets_for(good, bad, choice.get(1)),
            ]
        }
    };
    for (i, sets) in per_sender.iter().enumerate() {
        public.send(Message::Sets { sender: i, sets: sets.clone() });
    }
    let mut masked: Vec<MaskedPair> = Vec::with_capacity(2);
    for i in 0..2 {
        let mp = mask_pair(&x[i], &per_sender[i], inputs[i], params.digest_len(i), rng)?;
        public.send(Message::Seeds {
            sender: i,
            keys: mp.keys.clone(),
            digests: mp.digest_seeds.clone(),
        });
        if let Some(d) = &mp.digests {
            public.send(Message::Digests { sender: i, values: d.clone() });
        }
        public.send(Message::Ciphertexts {
            sender: i,
            values: mp.ciphertexts.clone(),
        });
        masked.push(mp);
    }

    let knowledge = if kernel.determines_inputs() {
        let mut all = Vec::with_capacity(2);
        for i in 0..2 {
            let a = knowledge_of(i, 0, &per_sender[i][0], &received, &x[i], &masked[i], inputs[i].get(0), rng)?;
            let b = knowledge_of(i, 1, &per_sender[i][1], &received, &x[i], &masked[i], inputs[i].get(1), rng)?;
            all.push([a, b]);
        }
        Some(all)
    } else {
        None
    };

    let outcome = if malicious.is_some() {
        let k = knowledge.as_ref().ok_or_else(|| Error::Argument("malicious receiver analysis needs outputs that reveal inputs".into()))?;
        OtOutcome::Completed {
            recovered: (0..2).map(|i| k[i][choice.get(i)].guess.clone()).collect(),
        }
    } else {
        let z = [choice.get(0), choice.get(1)];
        let selected = &per_sender[0][z[0]];
        let ys: Vec<usize> = selected.iter().map(|pos| received[*pos].y).collect();
        let digest = |i: usize| {
            masked[i]
                .digest_seeds
                .as_ref()
                .zip(masked[i].digests.as_ref())
                .map(|(h, d)| (&h[z[i]], &d[z[i]]))
        };
        match decode_step5(&sbc.w, &ys, [digest(0), digest(1)], params.eps_typ, params.decode, EXHAUSTIVE_CAP)? {
            Ok(x_hat) => {
                let mut recovered = Vec::with_capacity(2);
                for i in 0..2 {
                    let key = masked[i].keys[z[i]].apply(&x_hat[i])?;
                    recovered.push(masked[i].ciphertexts[z[i]].xor(&key)?);
                }
                OtOutcome::Completed { recovered }
            }
            Err(failure) => OtOutcome::DecodeError { failure },
        }
    };
    Ok(assemble(outcome, inputs, x, choice, &received, public, audit, malicious, knowledge))
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    outcome: OtOutcome,
    inputs: [&SenderInput; 2],
    x: [BitString; 2],
    choice: ReceiverChoice,
    received: &[MacSymbolOut],
    public: PublicChannel,
    audit: Option<TestReport>,
    malicious: Option<MaliciousReport>,
    knowledge: Option<Vec<[GuessReport; 2]>>,
) -> MacOtRun {
    let mut copies = public.into_copies().into_iter();
    let [x1, x2] = x;
    let senders = vec![
        SenderView {
            input: inputs[0].clone(),
            channel_input: x1,
            transcript: copies.next().expect("three copies"),
        },
        SenderView {
            input: inputs[1].clone(),
            channel_input: x2,
            transcript: copies.next().expect("three copies"),
        },
    ];
    MacOtRun {
        outcome,
        senders,
        receiver: ReceiverView {
            choices: vec![choice.z1, choice.z2],
            outputs: received.iter().map(|o| o.y).collect(),
            transcript: copies.next().expect("three copies"),
        },
        audit,
        malicious,
        knowledge,
    }
}

/// The receiver's best guess at `M_ij` from the outputs it holds on `set`.
#[allow(clippy::too_many_arguments)]
fn knowledge_of(
    sender: usize,
    j: usize,
    set: &[usize],
    received: &[MacSymbolOut],
    x: &BitString,
    masked: &MaskedPair,
    truth: &BitString,
    rng: &mut SeededRng,
) -> Result<GuessReport> {
    let revealed = |pos: usize| if sender == 0 { received[pos].hat_x1 } else { received[pos].hat_x2 };
    let unknown: Vec<bool> = set.iter().map(|pos| revealed(*pos).is_none()).collect();
    // the receiver's copy of the bits: revealed ones from the outputs, zeros elsewhere
    let mut known = BitString::zeros(set.len());
    for (t, pos) in set.iter().enumerate() {
        if let Some(v) = revealed(*pos) {
            debug_assert_eq!(v == 1, x.get(*pos));
            known.set(t, v == 1);
        }
    }
    let digest = masked
        .digest_seeds
        .as_ref()
        .zip(masked.digests.as_ref())
        .map(|(h, d)| (&h[j], &d[j]));
    guess_string(&known, &unknown, &masked.keys[j], digest, &masked.ciphertexts[j], truth, rng)
}

/// Dishonest set formation: distributes the non-erased positions by `rule`
/// and pads both sets to size `s` with erased positions.
fn split_sets(clear: &[usize], erased: &[usize], s: usize, rule: SplitRule, rng: &mut SeededRng) -> (Vec<usize>, Vec<usize>) {
    let mut c = clear.to_vec();
    c.shuffle(rng);
    let first = match rule {
        SplitRule::Even => c.len().div_ceil(2).min(s),
        SplitRule::AllInS0 | SplitRule::AllInS1 => c.len().min(s),
    };
    let mut a: Vec<usize> = c[..first].to_vec();
    let mut b: Vec<usize> = c[first..].iter().take(s).cloned().collect();
    let mut e = erased.to_vec();
    e.shuffle(rng);
    let mut pad = e.into_iter();
    while a.len() < s {
        a.push(pad.next().expect("2s <= n leaves enough erased positions"));
    }
    while b.len() < s {
        b.push(pad.next().expect("2s <= n leaves enough erased positions"));
    }
    a.sort_unstable();
    b.sort_unstable();
    if rule == SplitRule::AllInS1 {
        (b, a)
    } else {
        (a, b)
    }
}
