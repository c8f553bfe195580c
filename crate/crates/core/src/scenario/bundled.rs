//! Scenario files shipped inside the binary.

use super::config::ScenarioConfig;
use crate::error::Result;

/// A scenario compiled into the binary.
#[derive(Clone, Copy, Debug)]
pub struct BundledScenario {
    pub name: &'static str,
    pub text: &'static str,
}

impl BundledScenario {
    /// First comment line of the file.
    pub fn description(&self) -> &'static str {
        self.text.lines().find_map(|l| l.strip_prefix('#')).map(str::trim).unwrap_or("")
    }

    pub fn config(&self) -> Result<ScenarioConfig> {
        ScenarioConfig::parse(self.text, self.name)
    }
}

macro_rules! entry {
    ($name:literal) => {
        BundledScenario { name: $name, text: include_str!(concat!("../../scenarios/", $name, ".ini")) }
    };
}

const BUNDLED: &[BundledScenario] = &[
    entry!("fig2a"),
    entry!("fig2b"),
    entry!("fig2c"),
    entry!("fig2d"),
    entry!("fig4a"),
    entry!("fig4b"),
    entry!("fig4c"),
    entry!("fig4d"),
    entry!("fig5a"),
    entry!("fig5b"),
    entry!("fig5c"),
    entry!("fig5d"),
    entry!("se-local-max"),
    entry!("jc-transfer"),
    entry!("xy-n10-crosscheck"),
];

pub fn bundled_scenarios() -> &'static [BundledScenario] {
    BUNDLED
}

pub fn bundled(name: &str) -> Option<&'static BundledScenario> {
    BUNDLED.iter().find(|s| s.name == name)
}
