//! Seeded sweep of the entropy inequalities over random small joints.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{arg, Result};
use crate::info::{
    chain_rule_bounds, check_lemma1, conditional_entropy, continuity_check, iid_smooth_lower_bound, min_entropy,
    renyi2_entropy, shannon_entropy, smooth_conditional_min_entropy, zero_entropy, Inequality, CHECK_TOL,
};
use crate::prob::{JointDistribution, SeededRng};

/// Smoothing parameters the sweep draws from.
pub const SMOOTHING_CHOICES: [f64; 4] = [0.01, 0.05, 0.1, 0.2];

/// Largest block length of the i.i.d. check.
pub const IID_MAX_N: u32 = 4;

/// Violation count and smallest margin of one inequality over the sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundTally {
    pub name: String,
    pub checked: u64,
    pub violations: u64,
    pub worst_margin: f64,
}

impl BoundTally {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            checked: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
        }
    }

    fn record(&mut self, margin: f64) {
        self.checked += 1;
        if margin < -CHECK_TOL {
            self.violations += 1;
        }
        self.worst_margin = self.worst_margin.min(margin);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundSuiteReport {
    pub joints: u64,
    pub max_alphabet: usize,
    pub tallies: Vec<BoundTally>,
}

impl BoundSuiteReport {
    pub fn tally(&self, name: &str) -> Option<&BoundTally> {
        self.tallies.iter().find(|t| t.name == name)
    }

    pub fn total_violations(&self) -> u64 {
        self.tallies.iter().map(|t| t.violations).sum()
    }
}

/// Random joint over `shape`; roughly a fifth of the cells are zeroed and
/// the rest skewed toward small masses.
pub fn random_joint(shape: Vec<usize>, rng: &mut SeededRng) -> Result<JointDistribution> {
    let cells: usize = shape.iter().product();
    loop {
        let w: Vec<f64> = (0..cells)
            .map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>().powi(2) })
            .collect();
        if w.iter().any(|v| *v > 0.0) {
            return JointDistribution::from_weights(shape, &w);
        }
    }
}

const NAMES: [&str; 11] = [
    "sandwich-lower",
    "sandwich-upper",
    "chain-first",
    "chain-second-lower",
    "chain-second-upper",
    "chain-third",
    "continuity",
    "order-min-collision",
    "order-collision-shannon",
    "order-shannon-zero",
    "iid-smooth-lower",
];

/// Checks every inequality on `count` random joints over `(U, V, W)` with
/// alphabets of size `2..=max_alphabet`, plus the i.i.d. smooth lower bound
/// on random binary pairs at block lengths `1..=4`. Joint `t` uses stream
/// `t` of `master_seed`.
pub fn bound_suite(master_seed: u64, count: u64, max_alphabet: usize) -> Result<BoundSuiteReport> {
    if !(2..=4).contains(&max_alphabet) {
        return arg(format!("alphabet bound {max_alphabet} outside 2..=4"));
    }
    let mut tallies: Vec<BoundTally> = NAMES.iter().map(|n| BoundTally::new(n)).collect();
    let mut rec = |name: &str, margin: f64| {
        tallies.iter_mut().find(|t| t.name == name).expect("known name").record(margin);
    };
    let margin = |i: &Inequality| i.margin;
    for t in 0..count {
        let mut rng = SeededRng::new(master_seed, t);
        let shape: Vec<usize> = (0..3).map(|_| rng.gen_range(2..=max_alphabet)).collect();
        let j3 = random_joint(shape, &mut rng)?;
        let eps = *SMOOTHING_CHOICES.choose(&mut rng).expect("nonempty");
        let eps2 = *SMOOTHING_CHOICES.choose(&mut rng).expect("nonempty");

        let uv = j3.marginalize(&[0, 1])?;
        let s = check_lemma1(&uv, eps)?;
        rec("sandwich-lower", s.min_entropy - (s.smooth - s.log_term));
        rec("sandwich-upper", s.smooth - s.min_entropy);

        let c = chain_rule_bounds(&j3, eps, eps2)?;
        rec("chain-first", margin(&c.first));
        rec("chain-second-lower", margin(&c.second_lower));
        rec("chain-second-upper", margin(&c.second_upper));
        rec("chain-third", margin(&c.third));

        let pz = j3.marginal(2)?;
        let live: Vec<usize> = (0..pz.alphabet_size()).filter(|z| pz.prob(*z) > 0.0).collect();
        if live.len() >= 2 {
            let k = continuity_check(&j3, live[0], live[1])?;
            rec("continuity", k.bound - k.difference);
        }

        let flat = j3.flatten();
        let (hmin, h2, h, h0) = (min_entropy(&flat), renyi2_entropy(&flat), shannon_entropy(&flat), zero_entropy(&flat));
        rec("order-min-collision", h2 - hmin);
        rec("order-collision-shannon", h - h2);
        rec("order-shannon-zero", h0 - h);

        let pair = random_joint(vec![2, 2], &mut rng)?;
        let n = 1 + (t % IID_MAX_N as u64) as u32;
        let h_cond = conditional_entropy(&pair, &[0], &[1])?;
        let exact = smooth_conditional_min_entropy(&pair.iid_power(n)?, eps)?;
        rec("iid-smooth-lower", exact - iid_smooth_lower_bound(n, h_cond, eps, 2));
    }
    Ok(BoundSuiteReport {
        joints: count,
        max_alphabet,
        tallies,
    })
}
