use serde::{Deserialize, Serialize};

use super::{mask_pair, Message, OtOutcome, PublicChannel, ReceiverView, SenderInput, SenderView};
use crate::channels::{transmit, MacKernel};
use crate::error::{Error, Result};
use crate::prob::{sample_subset, BitString, SeededRng};

/// `n` channel uses, index sets of size `floor(r n)`, strings of `k` bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoPartyParams {
    pub n: usize,
    pub k: usize,
    pub r: f64,
}

impl TwoPartyParams {
    pub fn set_size(&self) -> usize {
        (self.r * self.n as f64 + 1e-9).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r <= 0.5) {
            return Err(Error::Parameter(format!("r = {} outside (0, 1/2]", self.r)));
        }
        if self.k == 0 || self.k > self.set_size() {
            return Err(Error::Parameter(format!("k = {} outside [1, floor(r n) = {}]", self.k, self.set_size())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoPartyRun {
    pub outcome: OtOutcome,
    pub alice: SenderView,
    pub bob: ReceiverView,
}

/// One-sender OT over an erasure channel.
///
/// Alice sends uniform bits; Bob splits the received positions into
/// erased and non-erased, aborting if either has fewer than `r n` elements.
/// He reveals `S_z` drawn from the non-erased and `S_{1-z}` from the erased
/// positions; Alice masks `m_j` with a hash of her bits on `S_j`.
pub fn two_party_ot(
    channel: &MacKernel,
    input: &SenderInput,
    z: u8,
    params: &TwoPartyParams,
    rng: &mut SeededRng,
) -> Result<TwoPartyRun> {
    params.validate()?;
    if channel.x1_size() != 2 || channel.x2_size() != 1 || !channel.determines_inputs() {
        return Err(Error::Argument("two-party OT needs a binary erasure-type channel with one sender".into()));
    }
    if z > 1 {
        return Err(Error::Argument(format!("choice bit {z} is not 0 or 1")));
    }
    if input.len() != params.k {
        return Err(Error::Argument(format!("strings have {} bits, expected k = {}", input.len(), params.k)));
    }
    let n = params.n;
    let x = BitString::random(n, rng);
    let xs: Vec<usize> = (0..n).map(|i| x.get(i) as usize).collect();
    let received = transmit(channel, &xs, &vec![0; n], rng)?;
    let erased: Vec<usize> = (0..n).filter(|i| received[*i].erased1).collect();
    let clear: Vec<usize> = (0..n).filter(|i| !received[*i].erased1).collect();

    let mut public = PublicChannel::new(2);
    let threshold = params.r * n as f64;
    let outcome = if (erased.len() as f64) < threshold || (clear.len() as f64) < threshold {
        let reason = format!(
            "insufficient erasures: {} erased, {} received, need {threshold}",
            erased.len(),
            clear.len()
        );
        public.send(Message::Abort { reason: reason.clone() });
        OtOutcome::Aborted { reason }
    } else {
        let s = params.set_size();
        let good = sample_subset(&clear, s, rng);
        let bad = sample_subset(&erased, s, rng);
        let sets = if z == 0 { [good, bad] } else { [bad, good] };
        public.send(Message::Sets { sender: 0, sets: sets.clone() });
        let masked = mask_pair(&x, &sets, input, None, rng)?;
        public.send(Message::Seeds {
            sender: 0,
            keys: masked.keys.clone(),
            digests: None,
        });
        public.send(Message::Ciphertexts {
            sender: 0,
            values: masked.ciphertexts.clone(),
        });
        let zi = z as usize;
        let mut x_hat = BitString::zeros(s);
        for (j, pos) in sets[zi].iter().enumerate() {
            x_hat.set(j, received[*pos].hat_x1.expect("non-erased output reveals the input") == 1);
        }
        let m_hat = masked.ciphertexts[zi].xor(&masked.keys[zi].apply(&x_hat)?)?;
        OtOutcome::Completed { recovered: vec![m_hat] }
    };
    let mut copies = public.into_copies().into_iter();
    Ok(TwoPartyRun {
        outcome,
        alice: SenderView {
            input: input.clone(),
            channel_input: x,
            transcript: copies.next().expect("two copies"),
        },
        bob: ReceiverView {
            choices: vec![z],
            outputs: received.iter().map(|o| o.y).collect(),
            transcript: copies.next().expect("two copies"),
        },
    })
}
