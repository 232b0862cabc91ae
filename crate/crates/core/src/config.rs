//! Structured run configuration. A run is fully determined by the config
//! file plus the seed; the effective config is echoed into the output
//! directory so artifacts are self-describing.

use serde::{Deserialize, Serialize};

use crate::coeffs::{
    CoefficientSet, Form, GammaProfile, MatrixProfile, ScalarProfile, VectorProfile,
};
use crate::domain::Generator;
use crate::error::{Error, Result};
use crate::geom::Point;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Command the file was written for; the CLI subcommand wins on conflict.
    pub command: Option<String>,
    pub seed: u64,
    /// Output directory; flag and environment override, in that order.
    pub out_dir: Option<String>,
    pub domain: Generator,
    pub grid: GridConfig,
    pub operator: OperatorConfig,
    pub experiment: ExperimentConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            seed: 42,
            out_dir: None,
            domain: Generator::HalfSpaceSlab { n: 1, width: 2.0, t_end: 1.0 },
            grid: GridConfig::default(),
            operator: OperatorConfig::default(),
            experiment: ExperimentConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub h: f64,
    /// Time step; `h^2` when omitted.
    pub tau: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { h: 1.0 / 32.0, tau: None }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatorConfig {
    pub form: Form,
    pub nu: f64,
    pub a: MatrixProfile,
    pub b: VectorProfile,
    pub c: VectorProfile,
    pub c0: ScalarProfile,
    pub gamma: GammaProfile,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        let heat = CoefficientSet::heat(Form::NonDivergence);
        OperatorConfig {
            form: heat.form,
            nu: heat.nu,
            a: heat.a,
            b: heat.b,
            c: heat.c,
            c0: heat.c0,
            gamma: heat.gamma,
        }
    }
}

impl OperatorConfig {
    pub fn coefficient_set(&self) -> CoefficientSet {
        CoefficientSet {
            form: self.form,
            nu: self.nu,
            a: self.a,
            b: self.b,
            c: self.c,
            c0: self.c0,
            gamma: self.gamma,
        }
    }
}

/// Load selection for solve-style commands.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoadConfig {
    Const {
        v: f64,
    },
    /// `v` where the boundary distance exceeds `cut`, zero on the collar.
    FarField {
        v: f64,
        cut: f64,
    },
    /// Constant bump on a parabolic ball.
    Spot {
        center: [f64; 3],
        t: f64,
        radius: f64,
        value: f64,
    },
}

impl Default for LoadConfig {
    fn default() -> Self {
        LoadConfig::Const { v: 1.0 }
    }
}

/// Command-specific knobs, one flat block; commands read what they need.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Boundary points sampled by the condition checkers.
    pub boundary_samples: usize,
    /// Cylinder radius ladder; empty means a dyadic ladder from the domain.
    pub radii: Vec<f64>,
    /// Monte Carlo samples per measure estimate.
    pub samples: usize,
    pub theta_floor: f64,
    /// Shell base for condition (B) and the Wiener sums.
    pub lambda: f64,
    pub k_max: u32,
    /// Grid cells per axis when rasterizing capacity shell sets.
    pub cells_per_axis: usize,
    /// Kernel dilation steps in the capacity LP.
    pub dilation_m: usize,
    /// Spatial center for point queries; domain's distinguished point if unset.
    pub x0: Option<Vec<f64>>,
    pub t0: Option<f64>,
    /// Cylinder radius for growth experiments.
    pub r: f64,
    /// Shrink factor per growth level.
    pub delta: f64,
    pub levels: usize,
    /// Weight exponent for weighted-sup reports.
    pub beta: f64,
    /// Integrability exponent for pointwise bound checks.
    pub p0: f64,
    /// Heat-ball dimensions and radii.
    pub heatball_n: Vec<usize>,
    pub heatball_r: Vec<f64>,
    /// Dyadic square sides for the capacity family.
    pub sides: Vec<f64>,
    /// 1-D example grid.
    pub x_min: f64,
    pub ratio: f64,
    pub load: LoadConfig,
    pub dump_mask: bool,
    pub dump_solution: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            boundary_samples: 24,
            radii: Vec::new(),
            samples: 20_000,
            theta_floor: 0.05,
            lambda: 2.0,
            k_max: 8,
            cells_per_axis: 16,
            dilation_m: 2,
            x0: None,
            t0: None,
            r: 0.3,
            delta: 0.5,
            levels: 4,
            beta: 0.5,
            p0: 2.0,
            heatball_n: vec![1, 2],
            heatball_r: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            sides: vec![0.5, 0.25, 0.125],
            x_min: 1e-6,
            ratio: 1.1,
            load: LoadConfig::default(),
            dump_mask: false,
            dump_solution: false,
        }
    }
}

impl ExperimentConfig {
    /// The query point: configured coordinates or the domain's own
    /// distinguished point.
    pub fn query_point(&self, distinguished: &[Point]) -> Result<Point> {
        match (&self.x0, self.t0) {
            (Some(xs), Some(t)) => {
                if xs.is_empty() || xs.len() > 3 {
                    return Err(Error::Config(format!(
                        "x0 needs 1 to 3 coordinates, got {}",
                        xs.len()
                    )));
                }
                let mut x = [0.0; 3];
                x[..xs.len()].copy_from_slice(xs);
                Ok(Point { x, t })
            }
            (None, None) => distinguished.first().copied().ok_or_else(|| {
                Error::Config("domain has no distinguished point; set x0 and t0".into())
            }),
            _ => Err(Error::Config("x0 and t0 must be set together".into())),
        }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    validate(&cfg)?;
    Ok(cfg)
}

pub fn to_toml(cfg: &RunConfig) -> Result<String> {
    toml::to_string_pretty(cfg).map_err(|e| Error::Config(e.to_string()))
}

fn validate(cfg: &RunConfig) -> Result<()> {
    if !(cfg.grid.h > 0.0 && cfg.grid.h.is_finite()) {
        return Err(Error::Config(format!("grid.h must be positive, got {}", cfg.grid.h)));
    }
    if let Some(tau) = cfg.grid.tau {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Config(format!("grid.tau must be positive, got {tau}")));
        }
    }
    if !(cfg.operator.nu > 0.0 && cfg.operator.nu <= 1.0) {
        return Err(Error::Config(format!(
            "operator.nu must lie in (0, 1], got {}",
            cfg.operator.nu
        )));
    }
    let e = &cfg.experiment;
    if e.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::Config("experiment.radii must be positive".into()));
    }
    if e.samples == 0 {
        return Err(Error::Config("experiment.samples must be positive".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_roundtrips_through_toml() {
        let cfg = RunConfig::default();
        let text = to_toml(&cfg).unwrap();
        let back = parse_config(&text).unwrap();
        assert_eq!(back.seed, cfg.seed);
        assert_eq!(back.domain, cfg.domain);
        assert_eq!(back.grid.h, cfg.grid.h);
        assert_eq!(back.experiment.samples, cfg.experiment.samples);
    }

    #[test]
    fn parses_a_sparse_file() {
        let cfg = parse_config(
            r#"
            seed = 7

            [domain]
            kind = "wedge"
            c = 0.5

            [grid]
            h = 0.0625

            [operator]
            form = "divergence"

            [operator.b]
            kind = "const"
            v = [0.5, 0.0, 0.0]

            [experiment]
            samples = 5000
            "#,
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert!(matches!(cfg.domain, Generator::Wedge { c } if c == 0.5));
        assert_eq!(cfg.grid.h, 0.0625);
        assert_eq!(cfg.operator.form, Form::Divergence);
        assert!(matches!(cfg.operator.b, VectorProfile::Const { v } if v[0] == 0.5));
        assert_eq!(cfg.experiment.samples, 5000);
        // untouched blocks keep defaults
        assert_eq!(cfg.experiment.lambda, 2.0);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_scalars() {
        let err = parse_config("nonsense = 1").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let msg = format!("{err}");
        assert!(msg.contains("line") || msg.contains('1'), "uninformative: {msg}");

        let err = parse_config("[grid]\nh = -0.5").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn query_point_falls_back_to_distinguished() {
        let e = ExperimentConfig::default();
        let pts = [Point::d1(0.25, 0.5)];
        let p = e.query_point(&pts).unwrap();
        assert_eq!(p.x[0], 0.25);

        let with = ExperimentConfig {
            x0: Some(vec![0.1, 0.2]),
            t0: Some(0.75),
            ..ExperimentConfig::default()
        };
        let p = with.query_point(&pts).unwrap();
        assert_eq!(p.x[1], 0.2);
        assert_eq!(p.t, 0.75);

        let half = ExperimentConfig { x0: Some(vec![0.1]), ..ExperimentConfig::default() };
        assert!(half.query_point(&pts).is_err());
    }
}
