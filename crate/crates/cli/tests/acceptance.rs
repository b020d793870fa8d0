//! One line per acceptance criterion with the measured values, the pinned
//! tolerance and the runtime against its limit.
//!
//! Criterion 8 includes the middle chain-rule inequality
//! `H_min^eps(UV|W) vs H_min^eps(U|VW) + H_min(V|W)`, which fails on random
//! joints in both directions; that failure is reported, and is the only
//! failure this target tolerates.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use mac_ot::bounds::bound_suite;
use mac_ot::channels::{
    adder_mac, find_redundant_inputs, identity_mac, is_perfect_kernel, remove_redundancy, su_sbc, MacKernel, OutputSymbol,
};
use mac_ot::hashing::{dlhl_distance_to_uniform, exact_collision_probability, HashedSource};
use mac_ot::info::conditional_entropy;
use mac_ot::protocol::{ProtocolParams, SetSizing, TwoPartyParams};
use mac_ot::seceval::{
    receiver_privacy_exact, run_trials, sender_privacy_exact, test_unit_rejection, ProtocolConfig, ReceiverBehavior,
    ReceiverPrivacyConfig, SenderPrivacyConfig,
};
use mac_ot::typicality::{typicality_tolerance, CheatMode, CheatRole, CheatStrategy};
use mac_ot::{BitString, JointDistribution};
use serde_json::Value;

/// Sub-checks of criterion 8 that are expected to fail.
const KNOWN_FALSE: [&str; 2] = ["chain-second-lower", "chain-second-upper"];

struct Check {
    pass: bool,
    values: String,
    tol: &'static str,
    failed: Vec<String>,
}

impl Check {
    fn new(tol: &'static str) -> Self {
        Check {
            pass: true,
            values: String::new(),
            tol,
            failed: Vec::new(),
        }
    }

    fn expect(&mut self, name: &str, ok: bool, value: impl std::fmt::Display) {
        if !self.values.is_empty() {
            self.values.push_str(", ");
        }
        self.values.push_str(&format!("{name}={value}"));
        if !ok {
            self.pass = false;
            self.failed.push(name.to_string());
        }
    }
}

fn macot(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_macot")).args(args).output().expect("spawn macot");
    assert!(out.status.success(), "macot {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json document")
}

fn region_bounds(doc: &Value) -> Vec<[f64; 3]> {
    doc["result"]["regions"]
        .as_array()
        .expect("regions")
        .iter()
        .map(|r| {
            let g = |k: &str| r["region"][k].as_f64().expect("bound");
            [g("r1_max"), g("r2_max"), g("sum_max")]
        })
        .collect()
}

fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn fmt3(b: [f64; 3]) -> String {
    format!("({:.4}, {:.4}, {:.4})", b[0], b[1], b[2])
}

fn c1() -> Check {
    let mut c = Check::new("abs 1e-3");
    let doc = macot(&["regions", "--channel", "adder", "--which", "hbc-upper"]);
    let sum = region_bounds(&doc)[0][2];
    c.expect("sum", near(sum, 0.5, 1e-3), format!("{sum:.6}"));
    c
}

fn c2() -> Check {
    let mut c = Check::new("abs 1e-3");
    let ch = "su-sbc:p=0.4,w=identity";
    let hbc = region_bounds(&macot(&["regions", "--channel", ch, "--which", "hbc"]))[0];
    let mal = region_bounds(&macot(&["regions", "--channel", ch, "--which", "malicious"]))[0];
    let ok = |b: [f64; 3], e: [f64; 3]| (0..3).all(|i| near(b[i], e[i], 1e-3));
    c.expect("hbc", ok(hbc, [0.4, 0.4, 0.8]), fmt3(hbc));
    c.expect("malicious", ok(mal, [0.2, 0.2, 0.4]), fmt3(mal));
    c
}

fn c3() -> Check {
    let mut c = Check::new("abs 1e-3");
    let ps = [0.2, 0.5, 0.8];
    let sweep = ["regions", "--channel", "noisy-adder:p=0.5", "--sweep", "p=0.2,0.5,0.8", "--which"];
    let hbc = region_bounds(&macot(&[&sweep[..], &["hbc"]].concat()));
    let mal = region_bounds(&macot(&[&sweep[..], &["malicious"]].concat()));
    for (i, p) in ps.iter().enumerate() {
        let h = hbc[i];
        let ok = near(h[0], *p, 1e-3) && near(h[1], *p, 1e-3) && near(h[2], 1.5 * p, 1e-3);
        c.expect(&format!("hbc[p={p}]"), ok, fmt3(h));
        let m = mal[i];
        let ok = near(m[0], 0.75 * p, 1e-3) && near(m[1], 0.75 * p, 1e-3);
        c.expect(&format!("malicious[p={p}]"), ok, format!("({:.4}, {:.4})", m[0], m[1]));
    }
    c
}

fn c4() -> Check {
    let mut c = Check::new("correctness >= 0.99, abort upper 95% <= 0.05");
    let mac = ProtocolConfig::Mac {
        sbc: su_sbc(0.5, identity_mac()).unwrap(),
        params: ProtocolParams::with_defaults(1024, 0.5).with_k(64, 64),
    };
    let two = ProtocolConfig::TwoParty {
        p_erase: 0.5,
        params: TwoPartyParams { n: 2048, k: 64, r: 0.45 },
    };
    for (name, cfg) in [("mac", mac), ("bec", two)] {
        let s = run_trials(&cfg, 200, 7).unwrap();
        c.expect(
            &format!("{name}.correct"),
            s.correctness.rate >= 0.99,
            format!("{}/{} [lower {:.3}]", s.correctness.count, s.correctness.trials, s.correctness.lower),
        );
        c.expect(
            &format!("{name}.abort"),
            s.abort_rate.upper <= 0.05,
            format!("{}/{} [upper {:.3}]", s.aborted, s.trials, s.abort_rate.upper),
        );
    }
    c
}

fn c5() -> Check {
    let mut c = Check::new("honest <= 1e-9, canary > 1e-3");
    let honest = receiver_privacy_exact(&ReceiverPrivacyConfig { n: 8, p: 0.5, set_size: 3, sizing: SetSizing::Equal }).unwrap();
    let worst = honest.leakage.iter().map(|l| l.value).fold(0.0, f64::max);
    c.expect("I(Z;U)", worst <= 1e-9, format!("{worst:.2e}"));
    let canary =
        receiver_privacy_exact(&ReceiverPrivacyConfig { n: 8, p: 0.5, set_size: 3, sizing: SetSizing::Asymmetric }).unwrap();
    let leak = canary.leakage.iter().map(|l| l.value).fold(0.0, f64::max);
    c.expect("canary", leak > 1e-3, format!("{leak:.4}"));
    c
}

fn c6() -> Check {
    let mut c = Check::new("strictly decreasing, bound at every point");
    let mut prev = f64::INFINITY;
    for m in [6, 8, 10] {
        let r = sender_privacy_exact(&SenderPrivacyConfig {
            set_size: m,
            k: 2,
            digest_len: None,
            identity_hash: false,
            receiver: ReceiverBehavior::Honest,
        })
        .unwrap();
        let v = r.per_sender.value;
        let bound = r.per_sender.bound.unwrap_or(f64::NAN);
        c.expect(
            &format!("|S|={m}"),
            v < prev && r.bound_holds == Some(true),
            format!("{v:.3e}<={bound:.3e}"),
        );
        prev = v;
    }
    c
}

fn c7() -> Check {
    let mut c = Check::new("exact equality, distance <= bound");
    for (k, m) in [(1, 2), (2, 4), (3, 4)] {
        let mut pairs = 0;
        let mut all = true;
        for a in 0..1u64 << m {
            for b in a + 1..1u64 << m {
                let q = exact_collision_probability(k, m, &BitString::from_u64(a, m), &BitString::from_u64(b, m)).unwrap();
                all &= q == 0.5f64.powi(k as i32);
                pairs += 1;
            }
        }
        c.expect(&format!("collision(k={k},m={m})"), all, format!("{pairs} pairs"));
    }
    let src = |i, o| HashedSource { input_bits: i, output_bits: o };
    let fixtures = [
        ("uniform", vec![src(3, 1)], JointDistribution::new(vec![8, 1], vec![0.125; 8]).unwrap()),
        ("two-source", vec![src(3, 1), src(2, 1)], JointDistribution::new(vec![8, 4, 1], vec![1.0 / 32.0; 32]).unwrap()),
        (
            "side-bit",
            vec![src(4, 1)],
            JointDistribution::from_fn(vec![16, 2], |i| if i[0] & 1 == i[1] { 1.0 / 16.0 } else { 0.0 }).unwrap(),
        ),
    ];
    for (name, sources, joint) in fixtures {
        let r = dlhl_distance_to_uniform(&sources, &joint, 0.5, 0.0).unwrap();
        c.expect(name, r.within_bound, format!("{:.4}<={:.4}", r.distance, r.bound));
    }
    c
}

fn c8() -> Check {
    let mut c = Check::new("0 violations, margin tol 1e-9");
    let r = bound_suite(1, 1000, 4).unwrap();
    for t in &r.tallies {
        c.expect(&t.name, t.violations == 0, format!("{}/{}", t.violations, t.checked));
    }
    c
}

fn c9() -> Check {
    let mut c = Check::new("detection lower 95% >= 0.95, false-positive upper 95% <= 0.05");
    let kernel = su_sbc(0.5, identity_mac()).unwrap().kernel();
    let cells = kernel.x1_size() * kernel.x2_size() * kernel.y_size();
    let cheat = CheatStrategy::new(CheatRole::Sender1, 0.2, CheatMode::Flip).unwrap();
    let mut prev = 0.0;
    for n in [100usize, 200, 400] {
        let eps = typicality_tolerance((n / 2) as u64, cells, 0.01);
        let fp = test_unit_rejection(&kernel, None, n, eps, 200, 90 + n as u64).unwrap();
        let det = test_unit_rejection(&kernel, Some(&cheat), n, eps, 200, 91 + n as u64).unwrap();
        c.expect(&format!("fp[n={n}]"), fp.upper <= 0.05, format!("{:.3} [upper {:.3}]", fp.rate, fp.upper));
        let ok = det.rate >= prev && (n != 400 || det.lower >= 0.95);
        c.expect(&format!("det[n={n}]"), ok, format!("{:.3} [lower {:.3}]", det.rate, det.lower));
        prev = det.rate;
    }
    c
}

fn planted_kernel() -> MacKernel {
    let rows = vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.3, 0.6], vec![0.2, 0.2, 0.6], vec![0.4, 0.25, 0.35]];
    MacKernel::new(2, 2, ["a", "b", "c"].map(OutputSymbol::plain).to_vec(), rows).unwrap()
}

fn c10() -> Check {
    let mut c = Check::new("abs 1e-9");
    c.expect("identity perfect", is_perfect_kernel(&identity_mac()), true);
    let adder = adder_mac();
    c.expect("adder perfect", !is_perfect_kernel(&adder), false);
    let h = conditional_entropy(adder.uniform_correlation().joint(), &[0, 1], &[2]).unwrap();
    c.expect("H(X1X2|Y)", near(h, 0.5, 1e-9), format!("{h:.12}"));
    let planted = planted_kernel();
    let flagged = find_redundant_inputs(&planted);
    c.expect("flagged", flagged == vec![(1, 1)], format!("{flagged:?}"));
    let mut idem = true;
    for k in [planted, adder] {
        let once = remove_redundancy(&k.uniform_correlation());
        idem &= remove_redundancy(&once) == once;
    }
    c.expect("idempotent", idem, idem);
    c
}

fn main() -> ExitCode {
    type Criterion = (&'static str, &'static str, fn() -> Check, u64);
    let criteria: [Criterion; 10] = [
        ("1", "adder hbc-upper sum", c1, 5),
        ("2", "su-sbc p=0.4 regions", c2, 10),
        ("3", "noisy adder regions", c3, 30),
        ("4", "protocol correctness", c4, 60),
        ("5", "receiver privacy", c5, 120),
        ("6", "sender privacy trend", c6, 60),
        ("7", "hashing exactness", c7, 10),
        ("8", "entropy bound suite", c8, 120),
        ("9", "test unit rates", c9, 60),
        ("10", "structure checks", c10, 5),
    ];
    let mut unexpected = Vec::new();
    for (id, desc, run, limit) in criteria {
        let start = Instant::now();
        let check = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let pass = check.pass && in_time;
        println!(
            "[{}] criterion {id:>2} {desc} | {} | tol {} | {:.2}s/{limit}s",
            if pass { "PASS" } else { "FAIL" },
            check.values,
            check.tol,
            elapsed.as_secs_f64(),
        );
        let tolerated = id == "8" && in_time && check.failed.iter().all(|f| KNOWN_FALSE.contains(&f.as_str()));
        if !pass && !tolerated {
            unexpected.push(id);
        } else if !pass {
            println!("       criterion  8 fails only on {}: expected", check.failed.join(", "));
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria pass apart from the expected criterion 8 chain-rule failure");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures in criteria {}", unexpected.join(", "));
        ExitCode::FAILURE
    }
}
