use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use mac_ot::channels::ChannelSpec;
use mac_ot::protocol::{FctAbort, SplitRule};
use mac_ot::typicality::{CheatMode, CheatRole};
use serde::{Deserialize, Serialize};

/// A whole experiment as read from `--config`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub master_seed: Option<u64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
    pub run: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Rate-region bounds of a channel.
    Regions(RegionsArgs),
    /// Repeated protocol runs with random inputs and choices.
    Simulate(SimulateArgs),
    /// Detection and false-positive rates of the typicality audit.
    Testunit(TestunitArgs),
    /// Random sweep of the entropy inequalities.
    Bounds(BoundsArgs),
    /// Perfectness, redundancy and erasure-correlation reduction of a channel.
    Reduce(ReduceArgs),
    /// Coin-flip bias from oblivious transfer.
    Fct(FctArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Regions(_) => "regions",
            Command::Simulate(_) => "simulate",
            Command::Testunit(_) => "testunit",
            Command::Bounds(_) => "bounds",
            Command::Reduce(_) => "reduce",
            Command::Fct(_) => "fct",
        }
    }
}

/// A channel given in short form on the command line, or either form in a
/// config document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelArg {
    Short(String),
    Spec(ChannelSpec),
}

impl std::str::FromStr for ChannelArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(ChannelArg::Short(s.to_string()))
    }
}

impl ChannelArg {
    pub fn parse(&self) -> mac_ot::Result<ChannelSpec> {
        match self {
            ChannelArg::Short(s) => ChannelSpec::parse(s),
            ChannelArg::Spec(c) => {
                c.kernel()?;
                Ok(c.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Which {
    HbcUpper,
    Hbc,
    Malicious,
    Ska,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionsArgs {
    /// Channel, e.g. `su-sbc:p=0.4,w=identity`.
    #[arg(long)]
    pub channel: ChannelArg,
    #[arg(long, value_enum)]
    pub which: Which,
    /// Grid step; defaults to 1e-3 for binary inputs and 0.02 otherwise.
    #[arg(long)]
    #[serde(default)]
    pub step: Option<f64>,
    /// Report the raw grid optimum without local refinement.
    #[arg(long)]
    #[serde(default)]
    pub no_refine: bool,
    /// Sweep one numeric channel field, e.g. `p=0.1,0.2,0.3`.
    #[arg(long)]
    #[serde(default)]
    pub sweep: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    /// Two senders on an erasure-mixture channel.
    Mac,
    /// One sender on an erasure channel.
    TwoParty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReceiverSpec {
    #[default]
    Honest,
    Even,
    AllInS0,
    AllInS1,
}

impl ReceiverSpec {
    pub fn split(&self) -> Option<SplitRule> {
        match self {
            ReceiverSpec::Honest => None,
            ReceiverSpec::Even => Some(SplitRule::Even),
            ReceiverSpec::AllInS0 => Some(SplitRule::AllInS0),
            ReceiverSpec::AllInS1 => Some(SplitRule::AllInS1),
        }
    }
}

fn default_sim_channel() -> ChannelArg {
    ChannelArg::Short("su-sbc:p=0.5,w=identity".into())
}

fn default_trials() -> u64 {
    200
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateArgs {
    #[arg(long, default_value = "su-sbc:p=0.5,w=identity")]
    #[serde(default = "default_sim_channel")]
    pub channel: ChannelArg,
    /// Defaults to `two-party` for `bec` channels and `mac` otherwise.
    #[arg(long, value_enum)]
    #[serde(default)]
    pub protocol: Option<ProtocolKind>,
    #[arg(long)]
    pub n: usize,
    /// String length; for two senders this is sender 1's.
    #[arg(long)]
    pub k: usize,
    /// Sender 2's string length; defaults to `k`.
    #[arg(long)]
    #[serde(default)]
    pub k2: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub eta: Option<f64>,
    /// Rate of every index set (two senders: both `r_i`).
    #[arg(long)]
    #[serde(default)]
    pub r: Option<f64>,
    #[arg(long, default_value_t = 200)]
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Receiver behavior for the malicious-receiver arm and the leakage proxy.
    #[arg(long, value_enum, default_value = "honest")]
    #[serde(default)]
    pub receiver: ReceiverSpec,
}

fn default_delta() -> f64 {
    0.2
}

fn default_test_n() -> Vec<usize> {
    vec![400]
}

fn default_alpha() -> f64 {
    0.01
}

fn default_role() -> CheatRole {
    CheatRole::Sender1
}

fn default_mode() -> CheatMode {
    CheatMode::Flip
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoleArg {
    Sender1,
    Sender2,
    Receiver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Flip,
    Constant,
    Misreport,
}

fn parse_role(s: &str) -> Result<CheatRole, String> {
    Ok(match RoleArg::from_str(s, false)? {
        RoleArg::Sender1 => CheatRole::Sender1,
        RoleArg::Sender2 => CheatRole::Sender2,
        RoleArg::Receiver => CheatRole::Receiver,
    })
}

fn parse_mode(s: &str) -> Result<CheatMode, String> {
    Ok(match ModeArg::from_str(s, false)? {
        ModeArg::Flip => CheatMode::Flip,
        ModeArg::Constant => CheatMode::Constant,
        ModeArg::Misreport => CheatMode::Misreport,
    })
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestunitArgs {
    #[arg(long, default_value = "su-sbc:p=0.5,w=identity")]
    #[serde(default = "default_sim_channel")]
    pub channel: ChannelArg,
    /// Fraction of deviating positions.
    #[arg(long, default_value_t = 0.2)]
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Block lengths, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "400")]
    #[serde(default = "default_test_n")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[arg(long, default_value = "sender1", value_parser = parse_role)]
    #[serde(default = "default_role")]
    pub role: CheatRole,
    #[arg(long, default_value = "flip", value_parser = parse_mode)]
    #[serde(default = "default_mode")]
    pub mode: CheatMode,
    /// Target false-positive level of the typicality tolerance.
    #[arg(long, default_value_t = 0.01)]
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_count() -> u64 {
    1000
}

fn default_alphabet() -> usize {
    4
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsArgs {
    /// Number of random joints.
    #[arg(long, default_value_t = 1000)]
    #[serde(default = "default_count")]
    pub count: u64,
    #[arg(long, default_value_t = 4)]
    #[serde(default = "default_alphabet")]
    pub max_alphabet: usize,
}

fn default_samples() -> usize {
    2000
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceArgs {
    #[arg(long)]
    pub channel: ChannelArg,
    /// Erasure-correlation samples to build.
    #[arg(long, default_value_t = 2000)]
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_rounds() -> Vec<usize> {
    vec![1, 9, 25]
}

fn default_runs() -> u64 {
    20000
}

fn default_abort() -> FctAbort {
    FctAbort::ReceiverWhenLosing
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AbortArg {
    Honest,
    ReceiverWhenLosing,
}

fn parse_abort(s: &str) -> Result<FctAbort, String> {
    Ok(match AbortArg::from_str(s, false)? {
        AbortArg::Honest => FctAbort::Honest,
        AbortArg::ReceiverWhenLosing => FctAbort::ReceiverWhenLosing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    #[default]
    Ideal,
    Erasure,
}

fn default_ot_n() -> usize {
    64
}

fn default_ot_r() -> f64 {
    0.25
}

fn default_p_erase() -> f64 {
    0.5
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FctArgs {
    /// Majority lengths, comma separated, each odd.
    #[arg(long, value_delimiter = ',', default_value = "1,9,25")]
    #[serde(default = "default_rounds")]
    pub rounds: Vec<usize>,
    #[arg(long, default_value_t = 20000)]
    #[serde(default = "default_runs")]
    pub runs: u64,
    #[arg(long, default_value = "receiver-when-losing", value_parser = parse_abort)]
    #[serde(default = "default_abort")]
    pub abort: FctAbort,
    #[arg(long, value_enum, default_value = "ideal")]
    #[serde(default)]
    pub source: SourceKind,
    /// Erasure probability of the channel behind each OT.
    #[arg(long, default_value_t = 0.5)]
    #[serde(default = "default_p_erase")]
    pub p_erase: f64,
    /// Channel uses per OT.
    #[arg(long, default_value_t = 64)]
    #[serde(default = "default_ot_n")]
    pub ot_n: usize,
    #[arg(long, default_value_t = 0.25)]
    #[serde(default = "default_ot_r")]
    pub ot_r: f64,
}
