use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{two_party_ot, SenderInput, TwoPartyParams};
use crate::channels::bec;
use crate::error::{Error, Result};
use crate::prob::{BitString, SeededRng};

/// Where the single-bit OT comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OtSource {
    Ideal,
    /// The two-party protocol over an erasure channel, with `k = 1`.
    ErasureChannel { p_erase: f64, n: usize, r: f64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FctAbort {
    #[default]
    Honest,
    /// The receiver wants a 1 and walks away whenever it sees a 0 before the
    /// sender does.
    ReceiverWhenLosing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoinOutcome {
    pub b_a: bool,
    pub b_b: bool,
    /// `b_a xor b_b`, absent when someone aborted.
    pub coin: Option<bool>,
    /// Whether `b_a xor b_b == 0`; recorded, never acted on.
    pub consistent: bool,
    pub aborted: bool,
}

/// One coin from one OT: the sender inputs random bits `m0, m1` and keeps
/// `b_a = m0 xor m1`; the receiver chooses a random `z`, learns `m_z` and
/// keeps `b_b = m_z xor z`. The sender announces `b_a` first.
pub fn ot_to_fct(source: &OtSource, abort: FctAbort, rng: &mut SeededRng) -> Result<CoinOutcome> {
    let m0: bool = rng.gen();
    let m1: bool = rng.gen();
    let z: bool = rng.gen();
    let m_z = match source {
        OtSource::Ideal => Some(if z { m1 } else { m0 }),
        OtSource::ErasureChannel { p_erase, n, r } => {
            let params = TwoPartyParams { n: *n, k: 1, r: *r };
            let input = SenderInput::new(BitString::from_bits(&[m0 as u8])?, BitString::from_bits(&[m1 as u8])?)?;
            let run = two_party_ot(&bec(*p_erase)?, &input, z as u8, &params, rng)?;
            run.outcome.recovered().map(|r| r[0].get(0))
        }
    };
    let b_a = m0 ^ m1;
    let Some(m_z) = m_z else {
        return Ok(CoinOutcome {
            b_a,
            b_b: false,
            coin: None,
            consistent: false,
            aborted: true,
        });
    };
    let b_b = m_z ^ z;
    let coin = b_a ^ b_b;
    let walk_away = abort == FctAbort::ReceiverWhenLosing && !coin;
    Ok(CoinOutcome {
        b_a,
        b_b,
        coin: (!walk_away).then_some(coin),
        consistent: !coin,
        aborted: walk_away,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MajorityOutcome {
    pub coin: bool,
    /// Round at which the protocol was abandoned, if any.
    pub aborted_at: Option<usize>,
}

/// Majority of `rounds` coins. After an abort the sender flips the current
/// and all remaining coins locally.
pub fn majority_coin(source: &OtSource, abort: FctAbort, rounds: usize, rng: &mut SeededRng) -> Result<MajorityOutcome> {
    if rounds.is_multiple_of(2) {
        return Err(Error::Argument(format!("majority needs an odd number of rounds, got {rounds}")));
    }
    let mut ones = 0;
    let mut aborted_at = None;
    for i in 0..rounds {
        if aborted_at.is_some() {
            ones += rng.gen::<bool>() as usize;
            continue;
        }
        let c = ot_to_fct(source, abort, rng)?;
        match c.coin {
            Some(b) => ones += b as usize,
            None => {
                aborted_at = Some(i);
                ones += rng.gen::<bool>() as usize;
            }
        }
    }
    Ok(MajorityOutcome {
        coin: 2 * ones > rounds,
        aborted_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_evaluation() {
        // with m0 = m1 = 0 and z = 0 both shares are 0; check through the identity b = m_{1-z} xor z
        for seed in 0..200 {
            let mut rng = SeededRng::new(40, seed);
            let c = ot_to_fct(&OtSource::Ideal, FctAbort::Honest, &mut rng).unwrap();
            assert_eq!(c.coin, Some(c.b_a ^ c.b_b));
            assert_eq!(c.consistent, !(c.b_a ^ c.b_b));
        }
    }

    #[test]
    fn ideal_coin_is_fair() {
        let ones = (0..10_000)
            .filter(|t| {
                let mut rng = SeededRng::new(41, *t);
                ot_to_fct(&OtSource::Ideal, FctAbort::Honest, &mut rng).unwrap().coin.unwrap()
            })
            .count();
        assert!((4800..=5200).contains(&ones), "{ones}");
    }

    #[test]
    fn erasure_channel_source_and_aborts() {
        let src = OtSource::ErasureChannel { p_erase: 0.5, n: 64, r: 0.25 };
        let mut rng = SeededRng::new(42, 0);
        let c = ot_to_fct(&src, FctAbort::Honest, &mut rng).unwrap();
        assert!(c.coin.is_some());
        let dead = OtSource::ErasureChannel { p_erase: 0.0, n: 64, r: 0.25 };
        assert!(ot_to_fct(&dead, FctAbort::Honest, &mut rng).unwrap().aborted);
        assert!(majority_coin(&OtSource::Ideal, FctAbort::Honest, 4, &mut rng).is_err());
    }
}
