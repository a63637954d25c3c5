//! Optional TOML run configuration. Command-line flags win over file values.
//!
//! ```toml
//! base = "https://w3id.org/odang#"
//!
//! [link]
//! min_score = 0.0
//! candidate_limit = 10
//! mentions = "all"        # or "leading"
//! case_fold = false
//!
//! [profile]
//! count = "occurrences"   # or "presence"
//! levels = "conservative" # or "all"
//! columns = ["PS", "DDP", "DDF", "DMC", "ASM", "ASF", "QAS", "CDS", "SVP"]
//!
//! [stereotype]
//! release_demographics = false
//! strict_caps = true
//! ```

use std::path::Path;

use anyhow::Context;
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub base: Option<String>,
    #[serde(default)]
    pub link: LinkSection,
    #[serde(default)]
    pub profile: ProfileSection,
    #[serde(default)]
    pub stereotype: StereotypeSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    pub min_score: Option<f64>,
    pub candidate_limit: Option<usize>,
    pub mentions: Option<String>,
    pub case_fold: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    pub count: Option<String>,
    pub levels: Option<String>,
    pub columns: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StereotypeSection {
    pub release_demographics: Option<bool>,
    pub strict_caps: Option<bool>,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}
