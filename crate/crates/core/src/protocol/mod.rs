//! Oblivious transfer protocols: the two-party protocol over an erasure
//! channel, the two-sender protocol over a joint-erasure MAC correlation,
//! adversarial receivers and senders, and the coin-flip demo built on OT.

mod decode;
mod fct;
mod mac;
mod two_party;

pub use decode::{decode_step5, DecodeFailure, DecodeMode, EXHAUSTIVE_CAP};
pub use fct::{majority_coin, ot_to_fct, CoinOutcome, FctAbort, MajorityOutcome, OtSource};
pub use mac::{mac_ot, malicious_bob, unfair_sender, Adversary, MacOtRun, MaliciousReport, SetSizing, SplitRule};
pub use two_party::{two_party_ot, TwoPartyParams, TwoPartyRun};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::{gf2_rank, sample_seed, LinearHashSeed};
use crate::prob::BitString;

/// Parameters of the two-sender protocol. Rates are fractions of `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolParams {
    pub n: usize,
    pub k1: usize,
    pub k2: usize,
    /// Non-erasure probability the receiver assumes.
    pub p: f64,
    pub eta: f64,
    pub r1: f64,
    pub r2: f64,
    /// Verification digest rates; `None` disables the digests.
    #[serde(default)]
    pub s1: Option<f64>,
    #[serde(default)]
    pub s2: Option<f64>,
    pub eps_typ: f64,
    #[serde(default)]
    pub decode: DecodeMode,
}

pub const DEFAULT_ETA: f64 = 0.05;
pub const DEFAULT_GAMMA: f64 = 0.01;
pub const DEFAULT_EPS_TYP: f64 = 0.05;

impl ProtocolParams {
    /// `eta = 0.05`, `r_i = p - 2 eta`, `k_i = floor((r_i - 0.01) n)`, no digests.
    pub fn with_defaults(n: usize, p: f64) -> Self {
        let r = p - 2.0 * DEFAULT_ETA;
        let k = (((r - DEFAULT_GAMMA) * n as f64).floor().max(0.0)) as usize;
        Self {
            n,
            k1: k,
            k2: k,
            p,
            eta: DEFAULT_ETA,
            r1: r,
            r2: r,
            s1: None,
            s2: None,
            eps_typ: DEFAULT_EPS_TYP,
            decode: DecodeMode::Auto,
        }
    }

    pub fn with_k(mut self, k1: usize, k2: usize) -> Self {
        self.k1 = k1;
        self.k2 = k2;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_rates(mut self, r1: f64, r2: f64) -> Self {
        self.r1 = r1;
        self.r2 = r2;
        self
    }

    pub fn with_verification(mut self, s1: f64, s2: f64) -> Self {
        self.s1 = Some(s1);
        self.s2 = Some(s2);
        self
    }

    pub fn with_eps_typ(mut self, eps: f64) -> Self {
        self.eps_typ = eps;
        self
    }

    pub fn with_decode(mut self, mode: DecodeMode) -> Self {
        self.decode = mode;
        self
    }

    /// `floor((p - eta) n)`, the size of every revealed index set.
    pub fn set_size(&self) -> usize {
        ((self.p - self.eta) * self.n as f64 + 1e-9).floor().max(0.0) as usize
    }

    pub fn k(&self, sender: usize) -> usize {
        [self.k1, self.k2][sender]
    }

    pub fn r(&self, sender: usize) -> f64 {
        [self.r1, self.r2][sender]
    }

    /// Digest length `ceil(s_i n)`, if digests are on.
    pub fn digest_len(&self, sender: usize) -> Option<usize> {
        [self.s1, self.s2][sender].map(|s| (s * self.n as f64 - 1e-9).ceil() as usize)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        if !(self.p > 0.0 && self.p <= 1.0) {
            return bad(format!("p = {} outside (0,1]", self.p));
        }
        if !(self.eta > 0.0 && self.eta < self.p) {
            return bad(format!("eta = {} outside (0, p)", self.eta));
        }
        if ((self.p - self.eta) * self.n as f64) < 1.0 {
            return bad(format!("(p - eta) n = {} < 1", (self.p - self.eta) * self.n as f64));
        }
        if !(self.eps_typ > 0.0) {
            return bad(format!("eps_typ = {} must be positive", self.eps_typ));
        }
        for i in 0..2 {
            let (r, k) = (self.r(i), self.k(i));
            if !(r > 0.0) {
                return bad(format!("r{} = {r} must be positive", i + 1));
            }
            if r > self.p - self.eta + 1e-12 {
                return bad(format!("r{} = {r} exceeds p - eta = {}", i + 1, self.p - self.eta));
            }
            if k == 0 || k as f64 > r * self.n as f64 + 1e-9 {
                return bad(format!("k{} = {k} outside [1, r{} n = {}]", i + 1, i + 1, r * self.n as f64));
            }
            if let Some(d) = self.digest_len(i) {
                if d == 0 || d > self.set_size() {
                    return bad(format!("digest length {d} outside [1, set size {}]", self.set_size()));
                }
            }
        }
        Ok(())
    }
}

/// A sender's two strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SenderInput {
    pub m0: BitString,
    pub m1: BitString,
}

impl SenderInput {
    pub fn new(m0: BitString, m1: BitString) -> Result<Self> {
        if m0.len() != m1.len() {
            return Err(Error::Argument(format!("string lengths differ: {} vs {}", m0.len(), m1.len())));
        }
        Ok(Self { m0, m1 })
    }

    pub fn random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        Self {
            m0: BitString::random(k, rng),
            m1: BitString::random(k, rng),
        }
    }

    pub fn get(&self, j: usize) -> &BitString {
        if j == 0 {
            &self.m0
        } else {
            &self.m1
        }
    }

    pub fn len(&self) -> usize {
        self.m0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m0.is_empty()
    }
}

/// The receiver's choice bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReceiverChoice {
    pub z1: u8,
    pub z2: u8,
}

impl ReceiverChoice {
    pub fn new(z1: u8, z2: u8) -> Result<Self> {
        if z1 > 1 || z2 > 1 {
            return Err(Error::Argument(format!("choice bits must be 0 or 1, got ({z1}, {z2})")));
        }
        Ok(Self { z1, z2 })
    }

    pub fn get(&self, sender: usize) -> usize {
        [self.z1, self.z2][sender] as usize
    }
}

/// One message on the noiseless public channel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Message {
    Abort { reason: String },
    Sets { sender: usize, sets: [Vec<usize>; 2] },
    Seeds { sender: usize, keys: [LinearHashSeed; 2], digests: Option<[LinearHashSeed; 2]> },
    Digests { sender: usize, values: [BitString; 2] },
    Ciphertexts { sender: usize, values: [BitString; 2] },
}

/// Append-only record of public messages.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Transcript {
    messages: Vec<Message>,
}

impl Transcript {
    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn sets(&self, sender: usize) -> Option<&[Vec<usize>; 2]> {
        self.messages.iter().find_map(|m| match m {
            Message::Sets { sender: s, sets } if *s == sender => Some(sets),
            _ => None,
        })
    }
}

/// Delivers every public message to each party's own transcript copy.
#[derive(Debug, Clone)]
pub(crate) struct PublicChannel {
    copies: Vec<Transcript>,
}

impl PublicChannel {
    pub(crate) fn new(parties: usize) -> Self {
        Self {
            copies: vec![Transcript::default(); parties],
        }
    }

    pub(crate) fn send(&mut self, m: Message) {
        for c in &mut self.copies {
            c.messages.push(m.clone());
        }
    }

    pub(crate) fn into_copies(self) -> Vec<Transcript> {
        self.copies
    }
}

/// What a sender observed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SenderView {
    pub input: SenderInput,
    pub channel_input: BitString,
    pub transcript: Transcript,
}

/// What the receiver observed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReceiverView {
    pub choices: Vec<u8>,
    pub outputs: Vec<usize>,
    pub transcript: Transcript,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum OtOutcome {
    Completed { recovered: Vec<BitString> },
    Aborted { reason: String },
    DecodeError { failure: DecodeFailure },
}

impl OtOutcome {
    pub fn is_completed(&self) -> bool {
        matches!(self, OtOutcome::Completed { .. })
    }

    pub fn recovered(&self) -> Option<&[BitString]> {
        match self {
            OtOutcome::Completed { recovered } => Some(recovered),
            _ => None,
        }
    }
}

/// A sender's step-4 output for one pair of revealed sets.
pub(crate) struct MaskedPair {
    pub keys: [LinearHashSeed; 2],
    pub digest_seeds: Option<[LinearHashSeed; 2]>,
    pub digests: Option<[BitString; 2]>,
    pub ciphertexts: [BitString; 2],
}

/// Hashes the channel input restricted to each set into a key, masks the
/// strings with it, and optionally digests the restrictions.
pub(crate) fn mask_pair<R: Rng + ?Sized>(
    x: &BitString,
    sets: &[Vec<usize>; 2],
    input: &SenderInput,
    digest_len: Option<usize>,
    rng: &mut R,
) -> Result<MaskedPair> {
    let k = input.len();
    let m = sets[0].len();
    let keys = [sample_seed(k, m, rng)?, sample_seed(k, m, rng)?];
    let digest_seeds = match digest_len {
        Some(d) => Some([sample_seed(d, m, rng)?, sample_seed(d, m, rng)?]),
        None => None,
    };
    let restricted = [x.restrict(&sets[0]), x.restrict(&sets[1])];
    let ciphertexts = [
        input.m0.xor(&keys[0].apply(&restricted[0])?)?,
        input.m1.xor(&keys[1].apply(&restricted[1])?)?,
    ];
    let digests = match &digest_seeds {
        Some(h) => Some([h[0].apply(&restricted[0])?, h[1].apply(&restricted[1])?]),
        None => None,
    };
    Ok(MaskedPair {
        keys,
        digest_seeds,
        digests,
        ciphertexts,
    })
}

/// A receiver's best guess at one masked string from partial knowledge of
/// the hashed positions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuessReport {
    /// Positions of the set whose input the receiver does not know.
    pub unknown: usize,
    /// Exact probability that the optimal guess is right.
    pub success: f64,
    pub guess: BitString,
    pub guessed_correctly: bool,
}

/// Guesses `M = c + K x` when `x` is known outside `unknown_mask` and the
/// optional digest `h = H x` is public. Given the digest the unknown part is
/// uniform on an affine subspace, so the key is uniform on a coset of
/// dimension `rank([K; H]_U) - rank(H_U)` and the best guess succeeds with
/// probability `2^-dim`.
pub(crate) fn guess_string<R: Rng + ?Sized>(
    known_x: &BitString,
    unknown_mask: &[bool],
    key: &LinearHashSeed,
    digest: Option<(&LinearHashSeed, &BitString)>,
    ciphertext: &BitString,
    truth: &BitString,
    rng: &mut R,
) -> Result<GuessReport> {
    let unknown: Vec<usize> = (0..unknown_mask.len()).filter(|i| unknown_mask[*i]).collect();
    let known: Vec<usize> = (0..unknown_mask.len()).filter(|i| !unknown_mask[*i]).collect();
    let key_u: Vec<BitString> = key.rows().iter().map(|r| r.restrict(&unknown)).collect();
    let h_u: Vec<BitString> = digest.map_or(Vec::new(), |(h, _)| h.rows().iter().map(|r| r.restrict(&unknown)).collect());
    let mut stacked = key_u.clone();
    stacked.extend(h_u.iter().cloned());
    let dim = gf2_rank(&stacked) - gf2_rank(&h_u);
    let success = 0.5f64.powi(dim as i32);

    // a uniformly random completion of the unknown bits consistent with the digest
    let xk = known_x.restrict(&known);
    let partial = |rows: &[BitString]| -> BitString {
        let mut out = BitString::zeros(rows.len());
        for (i, r) in rows.iter().enumerate() {
            out.set(i, r.restrict(&known).dot(&xk));
        }
        out
    };
    let u_guess = match digest {
        Some((h, d)) => {
            let rhs = d.xor(&partial(h.rows()))?;
            solve_gf2(&h_u, &rhs, unknown.len(), rng).ok_or_else(|| Error::Domain("digest inconsistent with known bits".into()))?
        }
        None => BitString::random(unknown.len(), rng),
    };
    let mut x_guess = known_x.clone();
    for (j, pos) in unknown.iter().enumerate() {
        x_guess.set(*pos, u_guess.get(j));
    }
    let guess = ciphertext.xor(&key.apply(&x_guess)?)?;
    Ok(GuessReport {
        unknown: unknown.len(),
        success,
        guessed_correctly: &guess == truth,
        guess,
    })
}

/// A uniformly random solution of `A u = b` over GF(2), if one exists.
pub(crate) fn solve_gf2<R: Rng + ?Sized>(a: &[BitString], b: &BitString, cols: usize, rng: &mut R) -> Option<BitString> {
    let mut rows: Vec<(BitString, bool)> = a.iter().cloned().zip((0..b.len()).map(|i| b.get(i))).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|i| rows[*i].0.get(c)) else {
            continue;
        };
        rows.swap(r, p);
        let (pr, pb) = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.0.get(c) {
                row.0 = row.0.xor(&pr).expect("equal widths");
                row.1 ^= pb;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| row.1) {
        return None;
    }
    let mut u = BitString::random(cols, rng);
    for c in &pivots {
        u.set(*c, false);
    }
    // back-substitute pivot variables from the free ones
    for (i, c) in pivots.iter().enumerate() {
        let (row, rhs) = &rows[i];
        let mut v = *rhs;
        for j in 0..cols {
            if j != *c && row.get(j) && u.get(j) {
                v ^= true;
            }
        }
        u.set(*c, v);
    }
    Some(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::SeededRng;

    #[test]
    fn default_parameters() {
        let p = ProtocolParams::with_defaults(1024, 0.5);
        assert!((p.r1 - 0.4).abs() < 1e-12);
        assert_eq!(p.k1, 399);
        assert_eq!(p.set_size(), 460);
        p.validate().unwrap();
        assert!(matches!(
            ProtocolParams::with_defaults(8, 0.5).with_eta(0.45).with_rates(0.05, 0.05).with_k(0, 0).validate(),
            Err(Error::Parameter(_))
        ));
        assert!(ProtocolParams::with_defaults(1024, 0.5).with_rates(0.5, 0.4).validate().is_err());
        assert!(ProtocolParams::with_defaults(1024, 0.5).with_k(500, 64).validate().is_err());
    }

    #[test]
    fn masking_is_an_involution() {
        let mut rng = SeededRng::new(1, 0);
        let x = BitString::random(20, &mut rng);
        let input = SenderInput::random(6, &mut rng);
        let sets = [vec![0, 2, 4, 6, 8, 10, 12], vec![1, 3, 5, 7, 9, 11, 13]];
        let mp = mask_pair(&x, &sets, &input, Some(3), &mut rng).unwrap();
        for j in 0..2 {
            let key = mp.keys[j].apply(&x.restrict(&sets[j])).unwrap();
            assert_eq!(&mp.ciphertexts[j].xor(&key).unwrap(), input.get(j));
        }
    }

    #[test]
    fn solver_finds_consistent_solutions() {
        let mut rng = SeededRng::new(2, 0);
        for _ in 0..50 {
            let a: Vec<BitString> = (0..4).map(|_| BitString::random(7, &mut rng)).collect();
            let u = BitString::random(7, &mut rng);
            let mut b = BitString::zeros(4);
            for (i, r) in a.iter().enumerate() {
                b.set(i, r.dot(&u));
            }
            let s = solve_gf2(&a, &b, 7, &mut rng).unwrap();
            assert!(a.iter().enumerate().all(|(i, r)| r.dot(&s) == b.get(i)));
        }
        let a = vec![BitString::parse("10").unwrap(), BitString::parse("10").unwrap()];
        assert!(solve_gf2(&a, &BitString::parse("01").unwrap(), 2, &mut rng).is_none());
    }

    #[test]
    fn guessing_fully_known_and_fully_unknown() {
        let mut rng = SeededRng::new(3, 0);
        let x = BitString::random(8, &mut rng);
        let key = sample_seed(3, 8, &mut rng).unwrap();
        let m = BitString::random(3, &mut rng);
        let c = m.xor(&key.apply(&x).unwrap()).unwrap();
        let g = guess_string(&x, &[false; 8], &key, None, &c, &m, &mut rng).unwrap();
        assert_eq!(g.success, 1.0);
        assert!(g.guessed_correctly);
        let g = guess_string(&x, &[true; 8], &key, None, &c, &m, &mut rng).unwrap();
        assert_eq!(g.success, 0.5f64.powi(gf2_rank(key.rows()) as i32));
        // a digest through the key itself pins the key value down
        let g = guess_string(&x, &[true; 8], &key, Some((&key, &key.apply(&x).unwrap())), &c, &m, &mut rng).unwrap();
        assert_eq!(g.success, 1.0);
        assert!(g.guessed_correctly);
    }
}
