//! Text syntax for channels: `name[:key=val[,key=val…]]` or `@file.json`.
//!
//! | name           | keys                          |
//! |----------------|-------------------------------|
//! | `identity`     |                               |
//! | `depolarizing` | `p` (default 1)               |
//! | `dephasing`    | `p` (default 1)               |
//! | `unitary`      | `theta` (phase ramp) or `seed` (Haar) |
//! | `replacer`     | `state` = `zero` \| `mixed`   |
//! | `random`       | `env` (default d²), `seed`    |

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::channel::Channel;
use super::named::{named_channel, phase_unitary, ChannelFamily};
use super::random::{default_env, random_channel, seeded_rng};
use crate::error::{Error, Result};
use crate::linalg::random::haar_unitary;
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Named {
        name: String,
        params: BTreeMap<String, String>,
    },
    File(PathBuf),
}

impl FromStr for ChannelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(path) = s.strip_prefix('@') {
            if path.is_empty() {
                return Err(Error::Parse("empty path after '@'".into()));
            }
            return Ok(Self::File(PathBuf::from(path)));
        }
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n, Some(r)),
            None => (s, None),
        };
        if name.is_empty() {
            return Err(Error::Parse("empty channel name".into()));
        }
        let mut params = BTreeMap::new();
        if let Some(rest) = rest {
            for kv in rest.split(',').filter(|kv| !kv.is_empty()) {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("expected key=value, got '{kv}'")))?;
                if params.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                    return Err(Error::Parse(format!("duplicate key '{k}'")));
                }
            }
        }
        Ok(Self::Named {
            name: name.to_ascii_lowercase(),
            params,
        })
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::File(p) => write!(f, "@{}", p.display()),
            Self::Named { name, params } => {
                write!(f, "{name}")?;
                for (i, (k, v)) in params.iter().enumerate() {
                    write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
                }
                Ok(())
            }
        }
    }
}

fn param<T: FromStr>(params: &BTreeMap<String, String>, key: &str, default: T) -> Result<T> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| Error::Parse(format!("cannot parse value '{v}' for key '{key}'"))),
    }
}

fn reject_unknown(params: &BTreeMap<String, String>, allowed: &[&str]) -> Result<()> {
    match params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::Parse(format!("unknown key '{k}'"))),
        None => Ok(()),
    }
}

impl ChannelSpec {
    /// Builds the channel on `C^d`; file specs must match `d`.
    pub fn build(&self, d: usize) -> Result<Channel> {
        match self {
            Self::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
                let ch: Channel =
                    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("invalid channel file: {e}")))?;
                if ch.d() != d {
                    return Err(Error::InvalidArgument(format!(
                        "channel file has d={}, requested d={d}",
                        ch.d()
                    )));
                }
                Ok(ch)
            }
            Self::Named { name, params } => match name.as_str() {
                "identity" | "id" => {
                    reject_unknown(params, &[])?;
                    named_channel(&ChannelFamily::Identity, d)
                }
                "depolarizing" => {
                    reject_unknown(params, &["p"])?;
                    named_channel(&ChannelFamily::Depolarizing(param(params, "p", 1.0)?), d)
                }
                "dephasing" => {
                    reject_unknown(params, &["p"])?;
                    named_channel(&ChannelFamily::Dephasing(param(params, "p", 1.0)?), d)
                }
                "unitary" => {
                    reject_unknown(params, &["theta", "seed"])?;
                    let u = match (params.get("theta"), params.get("seed")) {
                        (Some(_), Some(_)) => return Err(Error::Parse("unitary takes theta or seed, not both".into())),
                        (_, Some(_)) => haar_unitary(&mut seeded_rng(param(params, "seed", 0u64)?), d),
                        _ => phase_unitary(d, param(params, "theta", std::f64::consts::PI)?),
                    };
                    named_channel(&ChannelFamily::Unitary(u), d)
                }
                "replacer" => {
                    reject_unknown(params, &["state"])?;
                    let sigma = match params.get("state").map(String::as_str).unwrap_or("zero") {
                        "zero" => {
                            let mut s = ComplexMatrix::zeros(d, d);
                            s.set(0, 0, crate::linalg::ONE);
                            s
                        }
                        "mixed" => ComplexMatrix::identity(d).scale(1.0 / d as f64),
                        other => return Err(Error::Parse(format!("unknown replacer state '{other}'"))),
                    };
                    named_channel(&ChannelFamily::Replacer(sigma), d)
                }
                "random" => {
                    reject_unknown(params, &["env", "seed"])?;
                    let env = param(params, "env", default_env(d))?;
                    if env == 0 {
                        return Err(Error::InvalidArgument("env must be positive".into()));
                    }
                    Ok(random_channel(d, env, param(params, "seed", 0u64)?))
                }
                other => Err(Error::Parse(format!("unknown channel '{other}'"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_named_specs() {
        let s: ChannelSpec = "depolarizing:p=0.5".parse().unwrap();
        assert_eq!(s.to_string(), "depolarizing:p=0.5");
        let ch = s.build(2).unwrap();
        assert_eq!(ch.kraus().len(), 5);
        let s: ChannelSpec = "random:env=3,seed=9".parse().unwrap();
        assert_eq!(s.build(2).unwrap().kraus().len(), 3);
        assert!(matches!(
            "@ch.json".parse::<ChannelSpec>().unwrap(),
            ChannelSpec::File(_)
        ));
    }

    #[test]
    fn rejects_malformed_specs() {
        assert!("depolarizing:p".parse::<ChannelSpec>().is_err());
        assert!("".parse::<ChannelSpec>().is_err());
        assert!("depolarizing:p=2".parse::<ChannelSpec>().unwrap().build(2).is_err());
        assert!("depolarizing:q=0.1".parse::<ChannelSpec>().unwrap().build(2).is_err());
        assert!("nosuch".parse::<ChannelSpec>().unwrap().build(2).is_err());
    }
}
