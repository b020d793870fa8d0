use mac_ot::capacity::{
    max_over_products, region_hbc_capacity, region_malicious, region_ska_upper, Bound, GridConfig, Objective,
};
use mac_ot::channels::{su_sbc, ChannelSpec, MacKernel, OutputSymbol};
use mac_ot::hashing::exact_collision_probability;
use mac_ot::info::{
    conditional_entropy, conditional_min_entropy, joint_entropy, min_entropy, mutual_information, renyi2_entropy,
    shannon_entropy, smooth_conditional_min_entropy, smooth_min_entropy, zero_entropy,
};
use mac_ot::protocol::{ProtocolParams, TwoPartyParams};
use mac_ot::seceval::{run_trials, ProtocolConfig};
use mac_ot::{BitString, Distribution, JointDistribution};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn weights(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.0..1.0f64], len)
        .prop_filter("some mass", |w| w.iter().any(|v| *v > 1e-6))
}

fn dist() -> impl Strategy<Value = Distribution> {
    (1usize..9).prop_flat_map(weights).prop_map(|w| Distribution::from_weights(&w).unwrap())
}

fn joint(axes: usize, max: usize) -> impl Strategy<Value = JointDistribution> {
    prop::collection::vec(2..=max, axes).prop_flat_map(|shape| {
        let cells = shape.iter().product();
        weights(cells).prop_map(move |w| JointDistribution::from_weights(shape.clone(), &w).unwrap())
    })
}

/// Binary-input kernel with three plain outputs.
fn kernel() -> impl Strategy<Value = MacKernel> {
    prop::collection::vec(prop::collection::vec(0.01..1.0f64, 3), 4).prop_map(|rows| {
        let rows = rows
            .into_iter()
            .map(|r| {
                let s: f64 = r.iter().sum();
                r.into_iter().map(|v| v / s).collect()
            })
            .collect();
        MacKernel::new(2, 2, ["a", "b", "c"].map(OutputSymbol::plain).to_vec(), rows).unwrap()
    })
}

fn tv(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn entropy_orderings(d in dist()) {
        let (hmin, h2, h, h0) = (min_entropy(&d), renyi2_entropy(&d), shannon_entropy(&d), zero_entropy(&d));
        prop_assert!(hmin <= h2 + TOL && h2 <= h + TOL && h <= h0 + TOL);
        prop_assert!(h0 <= (d.alphabet_size() as f64).log2() + TOL);
    }

    #[test]
    fn smoothing_raises_min_entropy_monotonically(d in dist(), a in 0.0..0.5f64, b in 0.0..0.5f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let s_lo = smooth_min_entropy(&d, lo).unwrap();
        let s_hi = smooth_min_entropy(&d, hi).unwrap();
        prop_assert!(min_entropy(&d) <= s_lo + TOL && s_lo <= s_hi + TOL);
        prop_assert!(s_hi <= (d.alphabet_size() as f64).log2() + TOL);
    }

    #[test]
    fn chain_rule_and_mutual_information(j in joint(2, 4)) {
        let hxy = joint_entropy(&j, &[0, 1]).unwrap();
        let hx = joint_entropy(&j, &[0]).unwrap();
        let hy_x = conditional_entropy(&j, &[1], &[0]).unwrap();
        prop_assert!((hxy - hx - hy_x).abs() < TOL);
        let i_xy = mutual_information(&j, &[0], &[1], &[]).unwrap();
        let i_yx = mutual_information(&j, &[1], &[0], &[]).unwrap();
        prop_assert!(i_xy >= -TOL && (i_xy - i_yx).abs() < TOL);
        prop_assert!(conditional_min_entropy(&j).unwrap() <= conditional_entropy(&j, &[0], &[1]).unwrap() + TOL);
    }

    /// A smoothed joint attaining the reported value exists, and no level
    /// slightly below it is reachable within the budget.
    #[test]
    fn conditional_smoothing_witness_and_certificate(j in joint(2, 5), eps in 0.0..0.6f64) {
        let (nx, ny) = (j.shape()[0], j.shape()[1]);
        let t = 2f64.powf(-smooth_conditional_min_entropy(&j, eps).unwrap());
        let mut moved = 0.0;
        let mut moved_below = 0.0;
        let below = t * (1.0 - 1e-7);
        for y in 0..ny {
            let py: f64 = (0..nx).map(|x| j.get(&[x, y])).sum();
            if py == 0.0 {
                continue;
            }
            let slice: Vec<f64> = (0..nx).map(|x| j.get(&[x, y]) / py).collect();
            let excess: f64 = slice.iter().map(|p| (p - t).max(0.0)).sum();
            let room: f64 = slice.iter().map(|p| (t - p).max(0.0)).sum();
            prop_assert!(room + TOL >= excess);
            let q: Vec<f64> = slice
                .iter()
                .map(|p| if *p > t { t } else if room > 0.0 { p + excess * (t - p) / room } else { *p })
                .collect();
            prop_assert!((q.iter().sum::<f64>() - 1.0).abs() < TOL);
            prop_assert!(q.iter().all(|v| *v <= t + TOL));
            moved += py * tv(&slice, &q);
            moved_below += py * slice.iter().map(|p| (p - below).max(0.0)).sum::<f64>();
        }
        prop_assert!(moved <= eps + TOL);
        prop_assert!((t - 1.0 / nx as f64).abs() < TOL || moved_below > eps - TOL);
    }

    #[test]
    fn hash_collisions_are_two_to_minus_k(k in 1usize..5, m in 2usize..7, a in 0u64..64, b in 0u64..64) {
        let (x0, x1) = (a % (1 << m), b % (1 << m));
        prop_assume!(x0 != x1);
        let c = exact_collision_probability(k, m, &BitString::from_u64(x0, m), &BitString::from_u64(x1, m)).unwrap();
        prop_assert_eq!(c, 0.5f64.powi(k as i32));
    }

    #[test]
    fn bitstring_roundtrips(bits in prop::collection::vec(0u8..2, 1..150), other in prop::collection::vec(0u8..2, 150)) {
        let s = BitString::from_bits(&bits).unwrap();
        prop_assert_eq!(s.to_bits(), bits.clone());
        let t = BitString::from_bits(&other[..bits.len()]).unwrap();
        prop_assert_eq!(s.xor(&t).unwrap().xor(&t).unwrap(), s.clone());
        let json = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(serde_json::from_str::<BitString>(&json).unwrap(), s.clone());
        if bits.len() <= 64 {
            prop_assert_eq!(BitString::from_u64(s.to_u64(), bits.len()), s);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn region_inclusions(w in kernel(), p in 0.05..0.95f64) {
        let cfg = GridConfig::with_step(0.05);
        let sbc = su_sbc(p, w).unwrap();
        let hbc = region_hbc_capacity(&sbc, &cfg).unwrap().bounds();
        let mal = region_malicious(&sbc, &cfg).unwrap().bounds();
        let ska = region_ska_upper(&sbc.kernel(), &cfg).unwrap().bounds();
        for i in 0..3 {
            prop_assert!(mal[i] <= hbc[i] + TOL, "{:?} {:?}", mal, hbc);
            prop_assert!((ska[i] - hbc[i]).abs() < 1e-6, "{:?} {:?}", ska, hbc);
        }
        prop_assert!(hbc[2] <= hbc[0] + hbc[1] + TOL);
    }

    #[test]
    fn regions_grow_with_non_erasure(w in kernel(), a in 0.05..0.95f64, b in 0.05..0.95f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let cfg = GridConfig::with_step(0.05);
        let small = region_hbc_capacity(&su_sbc(lo, w.clone()).unwrap(), &cfg).unwrap().bounds();
        let large = region_hbc_capacity(&su_sbc(hi, w).unwrap(), &cfg).unwrap().bounds();
        for i in 0..3 {
            prop_assert!(small[i] <= large[i] + TOL);
        }
    }

    #[test]
    fn refinement_never_loses(w in kernel()) {
        for obj in [Objective::MutualJoint, Objective::HbcUpper(Bound::Sum), Objective::Malicious(Bound::R1)] {
            let m = max_over_products(&w, obj, &GridConfig::with_step(0.1)).unwrap();
            prop_assert!(m.value >= m.grid_value - TOL);
        }
    }

    #[test]
    fn trial_counts_add_up(seed in any::<u64>()) {
        let two = ProtocolConfig::TwoParty { p_erase: 0.5, params: TwoPartyParams { n: 64, k: 4, r: 0.25 } };
        let sbc = su_sbc(0.5, mac_ot::channels::identity_mac()).unwrap();
        let mac = ProtocolConfig::Mac { sbc, params: ProtocolParams::with_defaults(128, 0.5).with_k(4, 4) };
        for cfg in [two, mac] {
            let s = run_trials(&cfg, 6, seed).unwrap();
            prop_assert_eq!(s.completed + s.aborted + s.decode_errors, s.trials);
            prop_assert_eq!(s.abort_rate.count, s.aborted);
            prop_assert_eq!(&s, &run_trials(&cfg, 6, seed).unwrap());
        }
    }
}

#[test]
fn channel_specs_roundtrip_through_documents() {
    for text in ["adder", "noisy-adder:p=0.5", "su-sbc:p=0.4,w=identity", "bec:p_erase=0.3"] {
        let spec = ChannelSpec::parse(text).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<ChannelSpec>(&json).unwrap(), spec, "{text}");
    }
}
