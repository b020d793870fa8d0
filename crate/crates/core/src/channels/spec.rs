use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    adder_mac, bec, identity_mac, noisy_adder_mac, noisy_identity_mac, special_bemac, su_sbc, su_sbc_full,
    su_sbc_independent, MacKernel, OutputSymbol, SbcParams,
};
use crate::error::{arg, Result};

/// A channel description, either parsed from a short form such as
/// `su-sbc:p=0.4,w=identity` or deserialized from a document with a `type`
/// key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ChannelSpec {
    Adder,
    Identity,
    SpecialBemac,
    Bec { p_erase: f64 },
    NoisyAdder { p: f64 },
    NoisyIdentity { nu: f64 },
    SuSbc { p: f64, w: BranchSpec },
    SuSbcFull { p: f64, w: BranchSpec, w_prime: BranchSpec },
    SuSbcIndependent { p1: f64, p2: f64, w: BranchSpec },
    Custom(KernelTable),
}

/// The kernel used inside an erasure mixture: a builder name or a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BranchSpec {
    /// `identity`, `adder`, `special-bemac` or `noisy-identity:<nu>`.
    Named(String),
    Table(KernelTable),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelTable {
    pub x1_size: usize,
    pub x2_size: usize,
    pub outputs: Vec<OutputSymbol>,
    pub rows: Vec<Vec<f64>>,
}

impl KernelTable {
    fn kernel(&self) -> Result<MacKernel> {
        MacKernel::new(self.x1_size, self.x2_size, self.outputs.clone(), self.rows.clone())
    }
}

impl BranchSpec {
    pub fn kernel(&self) -> Result<MacKernel> {
        match self {
            BranchSpec::Table(t) => t.kernel(),
            BranchSpec::Named(name) => match name.split_once(':') {
                Some(("noisy-identity", nu)) => noisy_identity_mac(parse_num("nu", nu)?),
                Some(_) => arg(format!("unknown branch kernel '{name}'")),
                None => match name.as_str() {
                    "identity" => Ok(identity_mac()),
                    "adder" => Ok(adder_mac()),
                    "special-bemac" => Ok(special_bemac()),
                    _ => arg(format!("unknown branch kernel '{name}'")),
                },
            },
        }
    }
}

fn parse_num(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .or_else(|_| arg(format!("field '{key}': '{v}' is not a number")))
}

impl ChannelSpec {
    /// Parses `name` or `name:key=value,key=value`.
    pub fn parse(s: &str) -> Result<Self> {
        let (name, rest) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let mut fields = BTreeMap::new();
        // branch names may themselves contain ':', so only split on ',' then the first '='
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let Some((k, v)) = part.split_once('=') else {
                return arg(format!("channel field '{part}' is not key=value"));
            };
            if fields.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return arg(format!("channel field '{}' given twice", k.trim()));
            }
        }
        let mut take = |key: &str| fields.remove(key).ok_or_else(|| crate::Error::Argument(format!("channel '{name}' needs field '{key}'")));
        let spec = match name {
            "adder" => ChannelSpec::Adder,
            "identity" => ChannelSpec::Identity,
            "special-bemac" => ChannelSpec::SpecialBemac,
            "bec" => ChannelSpec::Bec {
                p_erase: parse_num("p_erase", &take("p_erase")?)?,
            },
            "noisy-adder" => ChannelSpec::NoisyAdder {
                p: parse_num("p", &take("p")?)?,
            },
            "noisy-identity" => ChannelSpec::NoisyIdentity {
                nu: parse_num("nu", &take("nu")?)?,
            },
            "su-sbc" => ChannelSpec::SuSbc {
                p: parse_num("p", &take("p")?)?,
                w: BranchSpec::Named(take("w")?),
            },
            "su-sbc-full" => ChannelSpec::SuSbcFull {
                p: parse_num("p", &take("p")?)?,
                w: BranchSpec::Named(take("w")?),
                w_prime: BranchSpec::Named(take("w_prime")?),
            },
            "su-sbc-independent" => ChannelSpec::SuSbcIndependent {
                p1: parse_num("p1", &take("p1")?)?,
                p2: parse_num("p2", &take("p2")?)?,
                w: BranchSpec::Named(take("w")?),
            },
            _ => return arg(format!("unknown channel type '{name}'")),
        };
        if let Some(k) = fields.keys().next() {
            return arg(format!("channel '{name}' has unknown field '{k}'"));
        }
        spec.kernel()?;
        Ok(spec)
    }

    pub fn kernel(&self) -> Result<MacKernel> {
        match self {
            ChannelSpec::Adder => Ok(adder_mac()),
            ChannelSpec::Identity => Ok(identity_mac()),
            ChannelSpec::SpecialBemac => Ok(special_bemac()),
            ChannelSpec::Bec { p_erase } => bec(*p_erase),
            ChannelSpec::NoisyAdder { p } => noisy_adder_mac(*p),
            ChannelSpec::NoisyIdentity { nu } => noisy_identity_mac(*nu),
            ChannelSpec::SuSbcIndependent { p1, p2, w } => su_sbc_independent(*p1, *p2, w.kernel()?),
            ChannelSpec::Custom(t) => t.kernel(),
            ChannelSpec::SuSbc { .. } | ChannelSpec::SuSbcFull { .. } => {
                Ok(self.sbc()?.expect("erasure-mixture variant").kernel())
            }
        }
    }

    /// The erasure-correlation parameters for the `su-sbc` variants and the
    /// noisy adder.
    pub fn sbc(&self) -> Result<Option<SbcParams>> {
        match self {
            ChannelSpec::SuSbc { p, w } => su_sbc(*p, w.kernel()?).map(Some),
            ChannelSpec::SuSbcFull { p, w, w_prime } => su_sbc_full(*p, w.kernel()?, w_prime.kernel()?).map(Some),
            // the noisy adder is the adder inside a joint erasure
            ChannelSpec::NoisyAdder { p } if *p < 1.0 => su_sbc(*p, adder_mac()).map(Some),
            _ => Ok(None),
        }
    }
}
