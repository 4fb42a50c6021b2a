//! Run configuration: a TOML file plus `--set section.key=value` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::geometry::Point3;
use crate::optimizer::OptConfig;
use crate::planner::PlannerConfig;

use super::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSpec {
    /// Label written to the SIG column.
    pub name: String,
    /// Occupancy grid file.
    pub grid: PathBuf,
    /// Obstacle cloud file; the occupied cell centers are used when absent.
    pub cloud: Option<PathBuf>,
    /// Ground vehicle tether anchor.
    pub anchor: Point3,
    pub start: Point3,
    pub goal: Point3,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            name: "scenario".into(),
            grid: PathBuf::from("grid.occ"),
            cloud: None,
            anchor: Point3::ORIGIN,
            start: Point3::new(0.0, 0.0, 1.0),
            goal: Point3::new(1.0, 0.0, 1.0),
        }
    }
}

impl ScenarioSpec {
    pub fn signature(&self) -> String {
        let f = |p: Point3| format!("({} {} {})", p.x, p.y, p.z);
        format!("{} - {} - {}", self.name, f(self.start), f(self.goal))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    /// Write wall-clock compute times to the TCI/TCO columns. Off by default so
    /// that repeated runs produce identical files.
    pub timing: bool,
    /// Write one `tether_###.xyz` polyline per optimized state.
    pub tether_files: bool,
    /// Also write trajectories as JSON.
    pub json: bool,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self { timing: false, tether_files: true, json: false }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioSpec,
    pub planner: PlannerConfig,
    pub optimizer: OptConfig,
    pub report: ReportConfig,
}

impl Config {
    /// Optimizer settings with the tether bound taken from the planner.
    pub fn optimizer_config(&self) -> OptConfig {
        OptConfig { l_max: self.planner.l_max, ..self.optimizer.clone() }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn parse_value(raw: &str) -> toml::Value {
    let raw = raw.trim();
    match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Applies `section.key=value`; `value` is read as a TOML literal and falls
/// back to a plain string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), CliError> {
    let bad = |msg: &str| CliError::Config(format!("--set {assignment}: {msg}"));
    let (path, value) = assignment.split_once('=').ok_or_else(|| bad("expected key=value"))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(bad("empty key"));
    }
    let mut cur = table;
    for k in &keys[..keys.len() - 1] {
        let entry = cur.entry(k.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| bad(&format!("{k} is not a table")))?;
    }
    cur.insert(keys[keys.len() - 1].to_string(), parse_value(value));
    Ok(())
}

/// Loads the config file (defaults when `None`), applies the overrides and
/// resolves relative world paths against the file's directory.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<Config, CliError> {
    let (mut table, base) = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            let table = text.parse::<toml::Table>().map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            (table, p.parent().map(Path::to_path_buf).unwrap_or_default())
        }
        None => (toml::Table::new(), PathBuf::new()),
    };
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let mut cfg: Config =
        toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    let resolve = |p: &Path| if p.is_relative() { base.join(p) } else { p.to_path_buf() };
    cfg.scenario.grid = resolve(&cfg.scenario.grid);
    cfg.scenario.cloud = cfg.scenario.cloud.as_deref().map(resolve);
    cfg.planner.validate().map_err(|e| CliError::Config(e.to_string()))?;
    cfg.optimizer_config().validate().map_err(|e| CliError::Config(e.to_string()))?;
    if cfg.scenario.start == cfg.scenario.goal {
        return Err(CliError::Config("start and goal coincide".into()));
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse_typed_values() {
        let mut t = toml::Table::new();
        apply_override(&mut t, "optimizer.gamma_v=0.5").unwrap();
        apply_override(&mut t, "planner.tether_aware=false").unwrap();
        apply_override(&mut t, "scenario.name=arc").unwrap();
        apply_override(&mut t, "scenario.goal={x=1,y=2,z=3}").unwrap();
        let cfg: Config = toml::Value::Table(t).try_into().unwrap();
        assert_eq!(cfg.optimizer.gamma_v, 0.5);
        assert!(!cfg.planner.tether_aware);
        assert_eq!(cfg.scenario.name, "arc");
        assert_eq!(cfg.scenario.goal, Point3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn malformed_override() {
        let mut t = toml::Table::new();
        assert!(apply_override(&mut t, "novalue").is_err());
        assert!(apply_override(&mut t, "a..b=1").is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = load_config(None, &["optimizer.gamma_q=1".into()]).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }

    #[test]
    fn toml_round_trip() {
        let cfg = Config::default();
        let back: Config = toml::from_str(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }
}
