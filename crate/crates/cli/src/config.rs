//! Scenario configuration: TOML with strict keys, validated field by field.

use serde::{Deserialize, Serialize};
use toa_core::packets::{EDGE_TOL, TAIL_TOL};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ScenarioKind {
    Density,
    Currents,
    Means,
    NegativeFlux,
    Semiclassical,
    Barrier,
    WignerCheck,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Density => "density",
            ScenarioKind::Currents => "currents",
            ScenarioKind::Means => "means",
            ScenarioKind::NegativeFlux => "negative_flux",
            ScenarioKind::Semiclassical => "semiclassical",
            ScenarioKind::Barrier => "barrier",
            ScenarioKind::WignerCheck => "wigner_check",
        }
    }

    fn needs_tau_window(self) -> bool {
        matches!(
            self,
            ScenarioKind::Density
                | ScenarioKind::Currents
                | ScenarioKind::Means
                | ScenarioKind::NegativeFlux
                | ScenarioKind::Barrier
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub kind: ScenarioKind,
    /// Detector position `X`.
    #[serde(default)]
    pub detector: f64,
    /// Output file name, relative to the `--out` directory.
    pub output: Option<String>,
    #[serde(default)]
    pub constants: Constants,
    pub packet: Packet,
    pub tau: Option<TauWindow>,
    #[serde(default)]
    pub grid: Grid,
    pub barrier: Option<Barrier>,
    pub semiclassical: Option<Semiclassical>,
    pub negative_flux: Option<NegativeFlux>,
    pub wigner: Option<Wigner>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn positive_direction() -> i64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Packet {
    /// `1` for motion toward `+x`, `-1` toward `-x`.
    #[serde(default = "positive_direction")]
    pub direction: i64,
    pub component: Vec<Component>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    #[serde(default = "one")]
    pub weight: f64,
    pub center: f64,
    pub spread: f64,
    #[serde(default)]
    pub origin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauWindow {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    /// Minimum number of momentum nodes.
    pub nodes: Option<usize>,
    /// Cap on the number of momentum nodes.
    pub max_nodes: Option<usize>,
    /// Largest `|tau|` the grid must resolve; derived from the scenario when absent.
    pub tau_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Barrier {
    Free,
    Delta { strength: f64 },
    Rectangular { height: f64, width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Semiclassical {
    pub tau: f64,
    #[serde(default = "default_scales")]
    pub scales: Vec<f64>,
}

fn default_scales() -> Vec<f64> {
    vec![1.0, 0.5, 0.25, 0.125]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NegativeFlux {
    #[serde(default = "default_margin")]
    pub margin: f64,
}

impl Default for NegativeFlux {
    fn default() -> Self {
        Self {
            margin: default_margin(),
        }
    }
}

fn default_margin() -> f64 {
    toa_core::asymptotics::DEFAULT_MARGIN
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wigner {
    pub taus: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Largest allowed probability on wrong-sign momenta.
    #[serde(default = "default_tail")]
    pub tail: f64,
    /// Largest allowed `|psi|^2` at the grid ends relative to its maximum.
    #[serde(default = "default_edge")]
    pub edge: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tail: TAIL_TOL,
            edge: EDGE_TOL,
        }
    }
}

fn default_tail() -> f64 {
    TAIL_TOL
}

fn default_edge() -> f64 {
    EDGE_TOL
}

fn field_error(field: impl Into<String>, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{}: {reason}", field.into()))
}

fn require(ok: bool, field: &str, reason: impl std::fmt::Display) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(field_error(field, reason))
    }
}

fn finite(field: &str, v: f64) -> Result<(), CliError> {
    require(v.is_finite(), field, format!("must be finite, got {v}"))
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    require(
        v.is_finite() && v > 0.0,
        field,
        format!("must be > 0, got {v}"),
    )
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Config = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        positive("constants.hbar", self.constants.hbar)?;
        positive("constants.mass", self.constants.mass)?;
        finite("detector", self.detector)?;
        require(
            self.packet.direction == 1 || self.packet.direction == -1,
            "packet.direction",
            format!("must be 1 or -1, got {}", self.packet.direction),
        )?;
        require(
            !self.packet.component.is_empty(),
            "packet.component",
            "at least one component is required",
        )?;
        for (i, c) in self.packet.component.iter().enumerate() {
            let f = |name: &str| format!("packet.component[{i}].{name}");
            finite(&f("weight"), c.weight)?;
            positive(&f("center"), c.center)?;
            positive(&f("spread"), c.spread)?;
            finite(&f("origin"), c.origin)?;
        }
        positive("tolerances.tail", self.tolerances.tail)?;
        positive("tolerances.edge", self.tolerances.edge)?;
        if let Some(n) = self.grid.nodes {
            require(n >= 2, "grid.nodes", format!("must be >= 2, got {n}"))?;
        }
        if let Some(n) = self.grid.max_nodes {
            require(n >= 2, "grid.max_nodes", format!("must be >= 2, got {n}"))?;
        }
        if let Some(t) = self.grid.tau_max {
            require(
                t.is_finite() && t >= 0.0,
                "grid.tau_max",
                format!("must be >= 0, got {t}"),
            )?;
        }
        if let Some(name) = &self.output {
            require(!name.is_empty(), "output", "must not be empty")?;
        }

        match &self.tau {
            Some(t) => {
                finite("tau.start", t.start)?;
                finite("tau.end", t.end)?;
                require(
                    t.end > t.start,
                    "tau.end",
                    format!("must exceed tau.start = {}", t.start),
                )?;
                require(
                    t.count >= 2,
                    "tau.count",
                    format!("must be >= 2, got {}", t.count),
                )?;
            }
            None if self.kind.needs_tau_window() => {
                return Err(field_error(
                    "tau",
                    format!("required for kind {}", self.kind.name()),
                ))
            }
            None => {}
        }

        match self.kind {
            ScenarioKind::Barrier => match self.barrier {
                None => return Err(field_error("barrier", "required for kind barrier")),
                Some(Barrier::Free) => {}
                Some(Barrier::Delta { strength }) => {
                    require(
                        strength.is_finite() && strength >= 0.0,
                        "barrier.strength",
                        format!("must be >= 0, got {strength}"),
                    )?;
                }
                Some(Barrier::Rectangular { height, width }) => {
                    positive("barrier.height", height)?;
                    positive("barrier.width", width)?;
                }
            },
            ScenarioKind::Semiclassical => {
                let s = self.semiclassical.as_ref().ok_or_else(|| {
                    field_error("semiclassical", "required for kind semiclassical")
                })?;
                finite("semiclassical.tau", s.tau)?;
                require(s.tau != 0.0, "semiclassical.tau", "must be nonzero")?;
                require(
                    !s.scales.is_empty(),
                    "semiclassical.scales",
                    "must not be empty",
                )?;
                for (i, &v) in s.scales.iter().enumerate() {
                    positive(&format!("semiclassical.scales[{i}]"), v)?;
                }
                require(
                    s.scales.windows(2).all(|w| w[1] < w[0]),
                    "semiclassical.scales",
                    "must be strictly decreasing",
                )?;
            }
            ScenarioKind::WignerCheck => {
                let w = self
                    .wigner
                    .as_ref()
                    .ok_or_else(|| field_error("wigner", "required for kind wigner_check"))?;
                require(!w.taus.is_empty(), "wigner.taus", "must not be empty")?;
                for (i, &t) in w.taus.iter().enumerate() {
                    finite(&format!("wigner.taus[{i}]"), t)?;
                }
            }
            ScenarioKind::NegativeFlux => {
                let margin = self.negative_flux.unwrap_or_default().margin;
                positive("negative_flux.margin", margin)?;
                let comps = &self.packet.component;
                require(
                    comps.len() == 2,
                    "packet.component",
                    format!(
                        "negative_flux needs exactly 2 components, got {}",
                        comps.len()
                    ),
                )?;
                require(
                    comps[0].spread == comps[1].spread,
                    "packet.component[1].spread",
                    "negative_flux needs equal spreads",
                )?;
                require(
                    comps[0].origin == comps[1].origin,
                    "packet.component[1].origin",
                    "negative_flux needs equal origins",
                )?;
                require(
                    self.packet.direction == 1,
                    "packet.direction",
                    "negative_flux is defined for direction 1",
                )?;
            }
            ScenarioKind::Density | ScenarioKind::Currents | ScenarioKind::Means => {}
        }
        Ok(())
    }

    pub fn output_name(&self) -> String {
        self.output
            .clone()
            .unwrap_or_else(|| format!("{}.csv", self.kind.name()))
    }
}

const CANONICAL_PACKET: &str = r#"
[constants]
hbar = 1.0
mass = 1.0

[packet]
direction = 1

[[packet.component]]
weight = 1.0
center = 1.0
spread = 0.05
origin = -10.0
"#;

/// A ready-to-run configuration for `kind`.
pub fn demo_config(kind: ScenarioKind) -> String {
    let head = format!("kind = \"{}\"\n", kind.name());
    let body = match kind {
        ScenarioKind::Density | ScenarioKind::Currents | ScenarioKind::Means => format!(
            "detector = 0.0\n{CANONICAL_PACKET}\n[tau]\nstart = -150.0\nend = 250.0\ncount = 4001\n"
        ),
        ScenarioKind::Semiclassical => format!(
            "detector = 0.0\n{CANONICAL_PACKET}\n[semiclassical]\ntau = 10.0\nscales = [1.0, 0.5, 0.25, 0.125]\n"
        ),
        ScenarioKind::WignerCheck => {
            format!("detector = 0.0\n{CANONICAL_PACKET}\n[wigner]\ntaus = [0.0, 10.0, 20.0]\n")
        }
        ScenarioKind::Barrier => "\
# the packet starts far from the barrier at the origin
detector = 5.0

[packet]
direction = 1

[[packet.component]]
weight = 1.0
center = 1.0
spread = 0.05
origin = -100.0

[tau]
start = 0.0
end = 250.0
count = 2501

[barrier]
kind = \"delta\"
strength = 1.0
"
        .to_string(),
        ScenarioKind::NegativeFlux => "\
# alpha1 / alpha2 = 3, p2 / p1 = 10; one interference period 4 pi / 99
detector = 0.0

[packet]
direction = 1

[[packet.component]]
weight = 3.0
center = 1.0
spread = 0.1
origin = 0.0

[[packet.component]]
weight = 1.0
center = 10.0
spread = 0.1
origin = 0.0

[tau]
start = 0.0
end = 0.12693303650867852
count = 201

[negative_flux]
margin = 3.0
"
        .to_string(),
    };
    head + &body
}

#[cfg(test)]
mod tests {
    use super::*;

    const KINDS: [ScenarioKind; 7] = [
        ScenarioKind::Density,
        ScenarioKind::Currents,
        ScenarioKind::Means,
        ScenarioKind::NegativeFlux,
        ScenarioKind::Semiclassical,
        ScenarioKind::Barrier,
        ScenarioKind::WignerCheck,
    ];

    #[test]
    fn demo_configs_parse() {
        for kind in KINDS {
            let cfg = Config::parse(&demo_config(kind)).unwrap();
            assert_eq!(cfg.kind, kind);
        }
    }

    #[test]
    fn negative_flux_demo_window_is_one_period() {
        let cfg = Config::parse(&demo_config(ScenarioKind::NegativeFlux)).unwrap();
        let period = 4.0 * std::f64::consts::PI / 99.0;
        assert!((cfg.tau.unwrap().end - period).abs() < 1e-15);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text =
            demo_config(ScenarioKind::Density).replace("hbar = 1.0", "hbar = 1.0\nhbarr = 2.0");
        let err = Config::parse(&text).unwrap_err().to_string();
        assert!(err.contains("hbarr"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let text = "kind = \"density\"\n[packet\n";
        let err = Config::parse(text).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn field_names_in_validation_errors() {
        let text = demo_config(ScenarioKind::Density).replace("spread = 0.05", "spread = -0.05");
        let err = Config::parse(&text).unwrap_err().to_string();
        assert!(err.contains("packet.component[0].spread"), "{err}");

        let text = demo_config(ScenarioKind::Density).replace("count = 4001", "count = 1");
        let err = Config::parse(&text).unwrap_err().to_string();
        assert!(err.contains("tau.count"), "{err}");
    }

    #[test]
    fn scenario_sections_required() {
        let text = demo_config(ScenarioKind::Barrier)
            .replace("[barrier]\nkind = \"delta\"\nstrength = 1.0\n", "");
        let err = Config::parse(&text).unwrap_err().to_string();
        assert!(err.contains("barrier"), "{err}");

        let text = demo_config(ScenarioKind::Density)
            .replace("[tau]", "[grid]")
            .replace("start = -150.0\nend = 250.0\ncount = 4001\n", "");
        let err = Config::parse(&text).unwrap_err().to_string();
        assert!(err.contains("tau"), "{err}");
    }

    #[test]
    fn barrier_fields_are_strict() {
        let text = demo_config(ScenarioKind::Barrier)
            .replace("strength = 1.0", "strength = 1.0\nwidth = 2.0");
        assert!(Config::parse(&text).is_err());
    }

    #[test]
    fn defaults_fill_in() {
        let text = "kind = \"density\"\n[packet]\n[[packet.component]]\ncenter = 1.0\nspread = 0.05\n[tau]\nstart = 0.0\nend = 1.0\ncount = 2\n";
        let cfg = Config::parse(text).unwrap();
        assert_eq!(cfg.constants, Constants::default());
        assert_eq!(cfg.packet.direction, 1);
        assert_eq!(cfg.packet.component[0].weight, 1.0);
        assert_eq!(cfg.output_name(), "density.csv");
    }
}
