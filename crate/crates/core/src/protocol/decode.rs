use serde::{Deserialize, Serialize};

use crate::channels::MacKernel;
use crate::error::{size_check, Error, Result};
use crate::hashing::LinearHashSeed;
use crate::prob::BitString;
use crate::typicality::{empirical_type, is_cond_typical};

/// Most candidate input pairs the exhaustive decoder will try.
pub const EXHAUSTIVE_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecodeMode {
    /// Direct when the outputs determine the inputs, exhaustive otherwise.
    #[default]
    Auto,
    /// Read inputs off the outputs.
    Direct,
    /// Try every candidate pair of input strings.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecodeFailure {
    NoCandidate,
    Ambiguous,
}

/// Recovers both senders' inputs on the selected positions: the unique pair
/// `(a, b)` such that the outputs are conditionally typical given `(a, b)`
/// under `w` and every published digest matches.
///
/// `outputs` are indices into `w`'s outputs, one per selected position.
pub fn decode_step5(
    w: &MacKernel,
    outputs: &[usize],
    digests: [Option<(&LinearHashSeed, &BitString)>; 2],
    eps_typ: f64,
    mode: DecodeMode,
    cap: u128,
) -> Result<std::result::Result<[BitString; 2], DecodeFailure>> {
    if w.x1_size() != 2 || w.x2_size() != 2 {
        return Err(Error::Argument("decoding needs binary inputs".into()));
    }
    let m = outputs.len();
    let shape = [2, 2, w.y_size()];
    let passes = |a: &BitString, b: &BitString| -> Result<bool> {
        let xa: Vec<usize> = (0..m).map(|j| a.get(j) as usize).collect();
        let xb: Vec<usize> = (0..m).map(|j| b.get(j) as usize).collect();
        if !is_cond_typical(&empirical_type(&xa, &xb, outputs, shape)?, w, eps_typ) {
            return Ok(false);
        }
        for (x, d) in [a, b].into_iter().zip(digests) {
            if let Some((seed, value)) = d {
                if &seed.apply(x)? != value {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    };

    let revealed: Vec<_> = outputs.iter().map(|y| w.revealed_inputs(*y)).collect();
    let direct_ok = revealed.iter().all(|(a, b)| a.is_some() && b.is_some());
    let direct = match mode {
        DecodeMode::Direct if !direct_ok => {
            return Err(Error::Domain("outputs do not determine the inputs; direct decoding impossible".into()))
        }
        DecodeMode::Direct => true,
        DecodeMode::Auto => direct_ok,
        DecodeMode::Exhaustive => false,
    };
    if direct {
        let mut a = BitString::zeros(m);
        let mut b = BitString::zeros(m);
        for (j, (ra, rb)) in revealed.iter().enumerate() {
            a.set(j, ra.expect("direct") == 1);
            b.set(j, rb.expect("direct") == 1);
        }
        return Ok(if passes(&a, &b)? { Ok([a, b]) } else { Err(DecodeFailure::NoCandidate) });
    }

    size_check("exhaustive decoding candidate pairs", 1u128 << (2 * m).min(127), cap)?;
    // per-position feasible input pairs; anything else has zero likelihood
    let feasible: Vec<[bool; 4]> = outputs
        .iter()
        .map(|y| std::array::from_fn(|r| w.prob(*y, r / 2, r % 2) > 0.0))
        .collect();
    let mut found: Option<[BitString; 2]> = None;
    for ai in 0..(1u64 << m) {
        for bi in 0..(1u64 << m) {
            if !(0..m).all(|j| feasible[j][((ai >> j & 1) * 2 + (bi >> j & 1)) as usize]) {
                continue;
            }
            let a = BitString::from_u64(ai, m);
            let b = BitString::from_u64(bi, m);
            if passes(&a, &b)? {
                if found.is_some() {
                    return Ok(Err(DecodeFailure::Ambiguous));
                }
                found = Some([a, b]);
            }
        }
    }
    Ok(found.ok_or(DecodeFailure::NoCandidate))
}
