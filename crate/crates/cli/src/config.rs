//! Run configuration: parsed from TOML, merged with flags, then resolved so that every
//! default is spelled out. The resolved form is written as the run's manifest.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use dimlab_core::families::IndexFamily;

pub const DEFAULT_HORIZON: u64 = 1 << 13;
pub const DEFAULT_ESTIMATOR: &str = "compressor";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Construct,
    Profile,
    Transduce,
    Wtt,
    Exactk,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Construct => "construct",
            CommandKind::Profile => "profile",
            CommandKind::Transduce => "transduce",
            CommandKind::Wtt => "wtt",
            CommandKind::Exactk => "exactk",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimator: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub construction: Option<ConstructionConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transduce: Option<TransduceConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wtt: Option<WttConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exactk: Option<ExactKConfig>,
}

/// How the sequence under study is built.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionConfig {
    /// `source`, `segments`, `double-segment`, `use-bounded` or `generic`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    /// Root source spec; the random source `R` for segment constructions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<String>,
    /// Guide set spec: `X0` for double segments, `S0` for use-bounded.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guide: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub use_bound: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub low: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub high: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_block: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<u64>,
    /// Requirements as `<polarity> <index set spec>`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bank: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    /// A family manifest file; inlined on resolution.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<String>>,
    /// Whether the window's cofinite tails join the family (default true).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tails: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_min: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_grid: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransduceConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stages: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WttConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub machine: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_budget: Option<u64>,
    /// Output bits to compute; defaults to the horizon.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bits: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactKConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub program_max: Option<usize>,
}

/// Command-line values that override the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub horizon: Option<u64>,
    pub estimator: Option<String>,
    pub family: Option<String>,
    pub window_nmin: Option<u64>,
    pub stages: Option<u64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Applies flags, then fills every default the command reads. Resolving an already
    /// resolved config changes nothing.
    pub fn resolve(mut self, command: CommandKind, o: &Overrides) -> Result<Self> {
        if let Some(c) = self.command {
            if c != command {
                bail!("config is for `{}` but `{}` was requested", c.name(), command.name());
            }
        }
        self.command = Some(command);
        self.seed = o.seed.or(self.seed).or(Some(0));
        self.horizon = o.horizon.or(self.horizon).or(Some(DEFAULT_HORIZON));
        let seed = self.seed.expect("set above");
        let horizon = self.horizon.expect("set above");

        match command {
            CommandKind::Construct => {
                self.construction = Some(resolve_construction(self.construction.take(), seed)?);
            }
            CommandKind::Profile => {
                self.construction = Some(resolve_construction(self.construction.take(), seed)?);
                self.estimator = o.estimator.clone().or(self.estimator).or(Some(DEFAULT_ESTIMATOR.into()));
                let mut w = self.window.take().unwrap_or_default();
                w.n_min = o.window_nmin.or(w.n_min).or(Some(dimlab_core::dimensions::Window::DEFAULT_N_MIN));
                let window = dimlab_core::dimensions::Window::new(w.n_min.expect("set"), horizon, w.m_grid)?;
                w.m_grid = Some(window.m_grid().to_vec());
                self.window = Some(w);
                self.family = Some(resolve_family(self.family.take(), o.family.as_deref())?);
            }
            CommandKind::Transduce => {
                self.estimator = o.estimator.clone().or(self.estimator).or(Some(DEFAULT_ESTIMATOR.into()));
                let mut t = self.transduce.take().unwrap_or_default();
                t.a0 = t.a0.or(Some("kind=zeros".into()));
                t.a1 = t.a1.or(Some(format!("kind=pseudorandom seed={seed}")));
                t.stages = o.stages.or(t.stages).or(Some(horizon));
                self.transduce = Some(t);
            }
            CommandKind::Wtt => {
                self.construction = Some(resolve_construction(self.construction.take(), seed)?);
                let mut m = self.wtt.take().unwrap_or_default();
                m.machine = m.machine.or(Some("bit-repeat".into()));
                m.step_budget = m.step_budget.or(Some(dimlab_core::reductions::wtt::DEFAULT_STEP_BUDGET));
                m.bits = m.bits.or(Some(horizon));
                self.wtt = Some(m);
            }
            CommandKind::Exactk => {
                let mut e = self.exactk.take().unwrap_or_default();
                e.l_max = e.l_max.or(Some(8));
                e.program_max = e.program_max.or(Some(2 * e.l_max.expect("set") + 2));
                self.exactk = Some(e);
            }
        }
        Ok(self)
    }
}

fn resolve_construction(c: Option<ConstructionConfig>, seed: u64) -> Result<ConstructionConfig> {
    let mut c = c.unwrap_or_default();
    let kind = c.kind.get_or_insert_with(|| "segments".into()).clone();
    let random = format!("kind=pseudorandom seed={seed}");
    let quadratic = "kind=quadratic c=1".to_string();
    let unused = |c: &ConstructionConfig, allowed: &[&str]| -> Result<()> {
        let present = [
            ("source", c.source.is_some()),
            ("schedule", c.schedule.is_some()),
            ("guide", c.guide.is_some()),
            ("mode", c.mode.is_some()),
            ("use_bound", c.use_bound.is_some()),
            ("low", c.low.is_some()),
            ("high", c.high.is_some()),
            ("min_block", c.min_block.is_some()),
            ("growth", c.growth.is_some()),
            ("bank", c.bank.is_some()),
        ];
        for (key, set) in present {
            if set && !allowed.contains(&key) {
                bail!("construction kind `{kind}` does not take `{key}`");
            }
        }
        Ok(())
    };
    match kind.as_str() {
        "source" => {
            unused(&c, &["source"])?;
            c.source = c.source.or(Some(random));
        }
        "segments" => {
            unused(&c, &["source", "schedule"])?;
            c.source = c.source.or(Some(random));
            c.schedule = c.schedule.or(Some(quadratic));
        }
        "double-segment" => {
            unused(&c, &["source", "schedule", "guide", "mode"])?;
            c.source = c.source.or(Some(random));
            c.schedule = c.schedule.or(Some(quadratic));
            c.guide = c.guide.or(Some("kind=evens".into()));
            c.mode = c.mode.or(Some("si-zero".into()));
        }
        "use-bounded" => {
            unused(&c, &["source", "guide", "use_bound"])?;
            c.source = c.source.or(Some(random));
            c.guide = c.guide.or(Some("kind=all".into()));
            c.use_bound = c.use_bound.or(Some("identity".into()));
        }
        "generic" => {
            unused(&c, &["low", "high", "min_block", "growth", "bank"])?;
            c.low = c.low.or(Some("kind=zeros".into()));
            c.high = c.high.or(Some(random));
            c.min_block = c.min_block.or(Some(64));
            c.growth = c.growth.or(Some(8));
            if c.bank.as_ref().is_none_or(Vec::is_empty) {
                bail!("a generic construction needs a nonempty `bank`");
            }
        }
        other => bail!("unknown construction kind `{other}`"),
    }
    Ok(c)
}

fn resolve_family(f: Option<FamilyConfig>, flag: Option<&str>) -> Result<FamilyConfig> {
    let mut f = f.unwrap_or_default();
    if let Some(path) = flag {
        f.path = Some(path.into());
        f.label = None;
        f.members = None;
    }
    if let Some(path) = f.path.take() {
        if f.members.is_some() {
            bail!("family `path` and `members` are mutually exclusive");
        }
        let fam = IndexFamily::load(&path).with_context(|| format!("loading family {path}"))?;
        f.label = Some(fam.label.clone());
        f.members = Some(fam.members.iter().map(|m| m.to_spec()).collect());
    }
    f.tails = f.tails.or(Some(true));
    f.members = f.members.or(Some(Vec::new()));
    if f.members.as_ref().is_some_and(Vec::is_empty) && f.tails == Some(false) {
        bail!("the family is empty: no members and tails disabled");
    }
    f.label = f.label.or(Some("tails".into()));
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::parse("horizon = 8\ncolour = 3\n").is_err());
        assert!(ExperimentConfig::parse("[window]\nnmin = 3\n").is_err());
    }

    #[test]
    fn resolution_is_idempotent() {
        let cfg = ExperimentConfig::parse("[family]\nmembers = [\"kind=ap start=1 step=3\"]\n").unwrap();
        let o = Overrides {
            horizon: Some(4096),
            ..Default::default()
        };
        let once = cfg.resolve(CommandKind::Profile, &o).unwrap();
        let twice = once.clone().resolve(CommandKind::Profile, &Overrides::default()).unwrap();
        assert_eq!(once, twice);
        let text = once.to_toml().unwrap();
        assert_eq!(ExperimentConfig::parse(&text).unwrap(), once);
    }

    #[test]
    fn command_mismatch_is_an_error() {
        let cfg = ExperimentConfig::parse("command = \"wtt\"\n").unwrap();
        assert!(cfg.resolve(CommandKind::Profile, &Overrides::default()).is_err());
    }

    #[test]
    fn construction_rejects_foreign_keys() {
        let cfg = ExperimentConfig::parse("[construction]\nkind = \"segments\"\nbank = []\n").unwrap();
        assert!(cfg.resolve(CommandKind::Construct, &Overrides::default()).is_err());
    }
}
