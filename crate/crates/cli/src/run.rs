use mac_ot::bounds::bound_suite;
use mac_ot::capacity::{
    region_hbc_capacity, region_hbc_upper, region_malicious, region_ska_upper, GridConfig, RateRegion,
};
use mac_ot::channels::{
    find_redundant_inputs, identity_mac, is_perfect, is_perfect_kernel, reduce_suco_to_sbc, remove_redundancy,
    ChannelSpec, SbcParams,
};
use mac_ot::info::conditional_entropy;
use mac_ot::prob::mix_ids;
use mac_ot::protocol::{OtSource, ProtocolParams, SetSizing, TwoPartyParams};
use mac_ot::seceval::{
    fct_bias, malicious_bob_advantage, receiver_privacy_exact, run_trials, sender_privacy_exact, test_unit_rejection,
    AdvantageConfig, ProtocolConfig, ReceiverBehavior, ReceiverPrivacyConfig, SenderPrivacyConfig,
};
use mac_ot::typicality::{typicality_tolerance, CheatStrategy};
use mac_ot::{Error, SeededRng};
use serde_json::{json, Value};

use crate::config::{
    BoundsArgs, ChannelArg, Command, FctArgs, ProtocolKind, ReduceArgs, RegionsArgs, SimulateArgs, SourceKind,
    TestunitArgs, Which,
};

/// Why a command failed, and the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Size { what: String, needed: u128, cap: u128 },
    Domain(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Size { .. } => 3,
            Failure::Domain(_) | Failure::Io(_) => 1,
        }
    }

    pub fn document(&self) -> Value {
        let (kind, message) = match self {
            Failure::Usage(m) => ("usage", m.clone()),
            Failure::Size { what, needed, cap } => {
                return json!({"error": {
                    "kind": "size",
                    "message": format!("{what} needs {needed}, cap is {cap}"),
                    "what": what,
                    "needed": needed.to_string(),
                    "cap": cap.to_string(),
                }})
            }
            Failure::Domain(m) => ("domain", m.clone()),
            Failure::Io(m) => ("io", m.clone()),
        };
        json!({"error": {"kind": kind, "message": message}})
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Argument(_) | Error::Parameter(_) => Failure::Usage(e.to_string()),
            Error::Size { what, needed, cap } => Failure::Size { what, needed, cap },
            Error::Domain(_) => Failure::Domain(e.to_string()),
        }
    }
}

/// What a command produced: a result tree, optional table rows for the
/// comma-separated form, and whether the run was dominated by aborts.
pub struct Outcome {
    pub result: Value,
    pub table: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
    pub abort_dominated: bool,
}

impl Outcome {
    fn plain(result: Value) -> Self {
        Self {
            result,
            table: None,
            abort_dominated: false,
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

pub fn execute(cmd: &Command, seed: u64) -> Result<Outcome, Failure> {
    match cmd {
        Command::Regions(a) => regions(a),
        Command::Simulate(a) => simulate(a, seed),
        Command::Testunit(a) => testunit(a, seed),
        Command::Bounds(a) => bounds(a, seed),
        Command::Reduce(a) => reduce(a, seed),
        Command::Fct(a) => fct(a, seed),
    }
}

/// Replaces `field` in a short channel form such as `su-sbc:p=0.4,w=identity`.
fn with_field(channel: &str, field: &str, value: &str) -> Result<String, Failure> {
    let (name, rest) = channel.split_once(':').unwrap_or((channel, ""));
    let mut found = false;
    let parts: Vec<String> = rest
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| match p.split_once('=') {
            Some((k, _)) if k.trim() == field => {
                found = true;
                format!("{field}={value}")
            }
            _ => p.to_string(),
        })
        .collect();
    if !found {
        return Err(Failure::Usage(format!("sweep field '{field}' is not a field of channel '{channel}'")));
    }
    Ok(format!("{name}:{}", parts.join(",")))
}

fn sweep_channels(a: &RegionsArgs) -> Result<Vec<ChannelArg>, Failure> {
    let Some(sweep) = &a.sweep else {
        return Ok(vec![a.channel.clone()]);
    };
    let ChannelArg::Short(base) = &a.channel else {
        return Err(Failure::Usage("sweeps need the short channel form".into()));
    };
    let Some((field, values)) = sweep.split_once('=') else {
        return Err(Failure::Usage(format!("sweep '{sweep}' is not field=v1,v2,...")));
    };
    values
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("sweep value '{v}' is not a number")))?;
            Ok(ChannelArg::Short(with_field(base, field.trim(), v.trim())?))
        })
        .collect()
}

fn require_sbc(spec: &ChannelSpec, what: &str) -> Result<SbcParams, Failure> {
    spec.sbc()?
        .ok_or_else(|| Failure::Usage(format!("{what} needs an erasure-mixture channel (su-sbc, su-sbc-full or noisy-adder)")))
}

fn region_for(spec: &ChannelSpec, which: Which, cfg: &GridConfig) -> Result<RateRegion, Failure> {
    Ok(match which {
        Which::HbcUpper => region_hbc_upper(&spec.kernel()?, cfg)?,
        Which::Ska => region_ska_upper(&spec.kernel()?, cfg)?,
        Which::Hbc => region_hbc_capacity(&require_sbc(spec, "the hbc region")?, cfg)?,
        Which::Malicious => region_malicious(&require_sbc(spec, "the malicious region")?, cfg)?,
    })
}

fn channel_label(c: &ChannelArg) -> String {
    match c {
        ChannelArg::Short(s) => s.clone(),
        ChannelArg::Spec(s) => serde_json::to_string(s).expect("spec serializes"),
    }
}

fn regions(a: &RegionsArgs) -> Result<Outcome, Failure> {
    let mut cfg = GridConfig::default();
    cfg.step = a.step;
    if a.no_refine {
        cfg.refine_iters = 0;
    }
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for ch in sweep_channels(a)? {
        let spec = ch.parse()?;
        let r = region_for(&spec, a.which, &cfg)?;
        rows.push(vec![
            channel_label(&ch),
            to_value(&a.which).as_str().expect("unit variant").to_string(),
            r.r1_max.to_string(),
            r.r2_max.to_string(),
            r.sum_max.to_string(),
            to_value(&r.method).as_str().expect("unit variant").to_string(),
            r.grid_step.to_string(),
            r.strict.to_string(),
        ]);
        entries.push(json!({"channel": to_value(&ch), "region": to_value(&r)}));
    }
    Ok(Outcome {
        result: json!({ "regions": entries }),
        table: Some((
            vec!["channel", "which", "r1_max", "r2_max", "sum_max", "method", "grid_step", "strict"],
            rows,
        )),
        abort_dominated: false,
    })
}

fn simulate(a: &SimulateArgs, seed: u64) -> Result<Outcome, Failure> {
    let spec = a.channel.parse()?;
    let kind = a.protocol.unwrap_or(if matches!(spec, ChannelSpec::Bec { .. }) {
        ProtocolKind::TwoParty
    } else {
        ProtocolKind::Mac
    });
    let mut result = serde_json::Map::new();
    let (cfg, leakage) = match kind {
        ProtocolKind::TwoParty => {
            let ChannelSpec::Bec { p_erase } = spec else {
                return Err(Failure::Usage("the two-party protocol runs on a bec channel".into()));
            };
            if a.k2.is_some() || a.eta.is_some() || a.receiver.split().is_some() {
                return Err(Failure::Usage("k2, eta and receiver apply to the two-sender protocol only".into()));
            }
            let params = TwoPartyParams {
                n: a.n,
                k: a.k,
                r: a.r.unwrap_or(0.25),
            };
            params.validate()?;
            let m = params.set_size().min(16);
            let sender = sender_privacy_exact(&SenderPrivacyConfig {
                set_size: m,
                k: a.k.min(8).min(m),
                digest_len: None,
                identity_hash: false,
                receiver: ReceiverBehavior::Honest,
            })?;
            (ProtocolConfig::TwoParty { p_erase, params }, json!({"sender": to_value(&sender)}))
        }
        ProtocolKind::Mac => {
            let sbc = require_sbc(&spec, "the two-sender protocol")?;
            let mut params = ProtocolParams::with_defaults(a.n, sbc.p).with_k(a.k, a.k2.unwrap_or(a.k));
            if let Some(eta) = a.eta {
                let r = sbc.p - 2.0 * eta;
                params = params.with_eta(eta).with_rates(r, r);
            }
            if let Some(r) = a.r {
                params = params.with_rates(r, r);
            }
            params.validate()?;
            let leakage = mac_leakage(a, &sbc, &params)?;
            if let Some(rule) = a.receiver.split() {
                if sbc.w != identity_mac() || sbc.w_prime.is_some() {
                    return Err(Failure::Usage("the malicious-receiver arm is modeled on su-sbc with w=identity".into()));
                }
                let adv = malicious_bob_advantage(
                    &AdvantageConfig {
                        n: a.n,
                        p: sbc.p,
                        eta: params.eta,
                        k: params.k1,
                        r: Some(params.r1),
                    },
                    rule,
                    a.trials,
                    mix_ids(&[seed, 1]),
                )?;
                result.insert("malicious_receiver".into(), to_value(&adv));
            }
            (ProtocolConfig::Mac { sbc, params }, leakage)
        }
    };
    let stats = run_trials(&cfg, a.trials, seed)?;
    let abort_dominated = stats.abort_rate.rate > 0.5;
    let mut stats_v = to_value(&stats);
    // wall-clock time would break byte-identical reruns
    stats_v.as_object_mut().expect("struct").remove("mean_runtime");
    result.insert("protocol".into(), to_value(&cfg));
    result.insert("trial_stats".into(), stats_v);
    result.insert("leakage".into(), leakage);
    result.insert("abort_dominated".into(), abort_dominated.into());
    Ok(Outcome {
        result: Value::Object(result),
        table: None,
        abort_dominated,
    })
}

/// Exact leakage on small instances at the same erasure probability: the
/// receiver-privacy check at `n = 8`, and sender privacy at set size
/// `min(set, 16)` with `k` capped at 8.
fn mac_leakage(a: &SimulateArgs, sbc: &SbcParams, params: &ProtocolParams) -> Result<Value, Failure> {
    const PROXY_N: usize = 8;
    let gap = sbc.p - params.eta;
    let proxy_set = ((gap * PROXY_N as f64 + 1e-9).floor() as usize).clamp(1, PROXY_N / 2);
    let receiver = match receiver_privacy_exact(&ReceiverPrivacyConfig {
        n: PROXY_N,
        p: sbc.p,
        set_size: proxy_set,
        sizing: SetSizing::Equal,
    }) {
        Ok(r) => to_value(&r),
        Err(Error::Domain(m)) => json!({ "unavailable": m }),
        Err(e) => return Err(e.into()),
    };
    let m = params.set_size().min(16);
    let behavior = match a.receiver.split() {
        None => ReceiverBehavior::Honest,
        Some(rule) => ReceiverBehavior::Split {
            rule,
            n: ((m as f64 / gap).ceil() as usize).max(2 * m),
            p: sbc.p,
        },
    };
    let sender = sender_privacy_exact(&SenderPrivacyConfig {
        set_size: m,
        k: params.k1.min(8).min(m),
        digest_len: None,
        identity_hash: false,
        receiver: behavior,
    })?;
    Ok(json!({
        "receiver_proxy_n": PROXY_N,
        "receiver_proxy_set_size": proxy_set,
        "receiver": receiver,
        "sender": to_value(&sender),
    }))
}

fn testunit(a: &TestunitArgs, seed: u64) -> Result<Outcome, Failure> {
    let kernel = a.channel.parse()?.kernel()?;
    let cheat = CheatStrategy::new(a.role, a.delta, a.mode)?;
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(Failure::Usage(format!("alpha {} outside (0,1)", a.alpha)));
    }
    let cells = kernel.x1_size() * kernel.x2_size() * kernel.y_size();
    let mut rows = Vec::new();
    for &n in &a.n {
        if n < 2 {
            return Err(Failure::Usage(format!("block length {n} is too short")));
        }
        // about half of the block is queried
        let eps = typicality_tolerance((n / 2) as u64, cells, a.alpha);
        let fp = test_unit_rejection(&kernel, None, n, eps, a.trials, mix_ids(&[seed, n as u64, 0]))?;
        let det = test_unit_rejection(&kernel, Some(&cheat), n, eps, a.trials, mix_ids(&[seed, n as u64, 1]))?;
        rows.push(json!({"n": n, "tolerance": eps, "false_positive": to_value(&fp), "detection": to_value(&det)}));
    }
    Ok(Outcome::plain(json!({"strategy": to_value(&cheat), "rows": rows})))
}

fn bounds(a: &BoundsArgs, seed: u64) -> Result<Outcome, Failure> {
    let r = bound_suite(seed, a.count, a.max_alphabet)?;
    Ok(Outcome::plain(json!({
        "report": to_value(&r),
        "total_violations": r.total_violations(),
    })))
}

fn reduce(a: &ReduceArgs, seed: u64) -> Result<Outcome, Failure> {
    let kernel = a.channel.parse()?.kernel()?;
    let c = kernel.uniform_correlation();
    let reduced = remove_redundancy(&c);
    let sbc = if is_perfect(&c) {
        json!({"unavailable": "perfect channel"})
    } else {
        let mut rng = SeededRng::new(seed, 0);
        match reduce_suco_to_sbc(&c, (0, 1), (0, 1), a.samples, &mut rng) {
            Ok(r) => json!({
                "samples": r.samples.len(),
                "erased": r.samples.iter().filter(|s| s.erased).count(),
                "consumption": r.consumption,
                "analytic_consumption": r.analytic_consumption,
                "alpha": r.alpha,
                "p": r.sbc.p,
            }),
            Err(Error::Domain(m)) => json!({ "unavailable": m }),
            Err(e) => return Err(e.into()),
        }
    };
    Ok(Outcome::plain(json!({
        "perfect_kernel": is_perfect_kernel(&kernel),
        "perfect_at_uniform": is_perfect(&c),
        "equivocation_at_uniform": conditional_entropy(c.joint(), &[0, 1], &[2])?,
        "redundant_inputs": find_redundant_inputs(&kernel),
        "reduced": {
            "shape": [reduced.x1_size(), reduced.x2_size(), reduced.y_size()],
            "labels": reduced.labels(),
            "idempotent": remove_redundancy(&reduced) == reduced,
        },
        "sbc_reduction": sbc,
    })))
}

fn fct(a: &FctArgs, seed: u64) -> Result<Outcome, Failure> {
    let source = match a.source {
        SourceKind::Ideal => OtSource::Ideal,
        SourceKind::Erasure => OtSource::ErasureChannel {
            p_erase: a.p_erase,
            n: a.ot_n,
            r: a.ot_r,
        },
    };
    let rows = a
        .rounds
        .iter()
        .map(|&r| Ok(to_value(&fct_bias(&source, a.abort, r, a.runs, mix_ids(&[seed, r as u64]))?)))
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(Outcome::plain(json!({"source": to_value(&source), "abort": to_value(&a.abort), "rows": rows})))
}
