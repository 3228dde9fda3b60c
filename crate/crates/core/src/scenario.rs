//! Scenario files: sections of `key = value` lines.
//!
//! ```text
//! [mesh]
//! nx = 16
//! ny = 16
//! tags = all_dirichlet
//! [growth]
//! law = product
//! [boundary]
//! f_x = x / (1 - t)
//! f_y = y / (1 - t)
//! [time]
//! t_end = 0.5
//! dt = 1e-3
//! ```
//!
//! `#` starts a comment. Boundary and initial data are expressions of
//! `t, x, y` (see [`crate::expr`]). Unknown sections or keys are errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use crate::elasticity::{GrowthSampler, Method, SolverOptions, TractionFn};
use crate::error::{Error, Result};
use crate::expr::{parse as parse_expr, Expr, Var};
use crate::fem::fields::MatrixField;
use crate::fem::sparse::SolverChoice;
use crate::integrator::{GuardConfig, TimeGrid};
use crate::mesh::{
    build_rectangle_mesh, read_mesh, ElasticTag, Mesh, NutrientTag, Rect, TagRule, Triangulation,
};
use crate::models::checks::{
    check_coercivity, check_derivatives, check_frame_indifference, check_growth_law,
    check_nutrient_assumptions, check_nutrient_frame_indifference, check_reference_state,
    AssumptionReport,
};
use crate::models::energy::{DistanceVolumetricEnergy, EnergyModel};
use crate::models::growth::{
    GrowthLaw, MultiplicativeGrowth, NoGrowth, NutrientResponse, ProductGrowth,
    StressNutrientGrowth, StressResponse,
};
use crate::models::nutrient::DetRatioNutrient;
use crate::nutrient_solver::ScalarPointFn;
use crate::tensor::MatD;

#[derive(Clone, Debug, PartialEq)]
pub enum MeshSource {
    Generated {
        nx: usize,
        ny: usize,
        extent: Rect,
        triangulation: Triangulation,
        rule: TagRule,
    },
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyConfig {
    pub exponent: f64,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GrowthConfig {
    None,
    Product,
    Multiplicative(MatD),
    StressNutrient {
        gamma: Expr,
        eta: NutrientResponse,
        mu: StressResponse,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct NutrientConfig {
    /// Row-major entries of the reference diffusion tensor, functions of `x, y`.
    pub d0: [Expr; 4],
    pub beta0: Expr,
    pub nu: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Traction {
    None,
    Components(Expr, Expr),
    /// `g = p n` with the outward normal `n`.
    Normal(Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryConfig {
    pub f: [Expr; 2],
    pub traction: Traction,
    pub f_n: Expr,
    pub g_n: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialGrowth {
    Constant(MatD),
    /// `G0 = grad g0`, a compatible growth tensor.
    Gradient([Expr; 2]),
    /// Row-major entries as expressions of `x, y`.
    Field([Expr; 4]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Coupling {
    /// `grad y` and `N` frozen over each growth step.
    #[default]
    Staggered,
    /// Equilibrium and nutrient re-solved at every RK stage.
    Stages,
}

impl FromStr for Coupling {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "staggered" => Ok(Self::Staggered),
            "stages" | "substeps" => Ok(Self::Stages),
            other => Err(format!(
                "unknown coupling `{other}` (expected staggered or stages)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GuardSettings {
    pub det_min: f64,
    /// Absolute bound; defaults to `10 |G0|_inf`.
    pub norm_max: Option<f64>,
    pub contraction_budget: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub directory: Option<PathBuf>,
    /// Write field files every this many steps (the final state is always written).
    pub snapshot_every: usize,
    pub vtk: bool,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    /// Directory that relative paths are resolved against.
    pub base_dir: Option<PathBuf>,
    pub mesh: MeshSource,
    pub energy: EnergyConfig,
    pub growth: GrowthConfig,
    pub nutrient: NutrientConfig,
    pub boundary: BoundaryConfig,
    pub initial: InitialGrowth,
    pub time: TimeGrid,
    pub coupling: Coupling,
    pub guards: GuardSettings,
    pub solver: SolverOptions,
    pub warm_start: bool,
    pub output: OutputConfig,
}

struct Entry {
    value: String,
    line: usize,
    used: bool,
}

struct Sections {
    map: BTreeMap<String, BTreeMap<String, Entry>>,
}

const SECTIONS: [&str; 10] = [
    "mesh", "energy", "growth", "nutrient", "boundary", "initial", "time", "guards", "solver",
    "output",
];

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

impl Sections {
    fn parse(text: &str) -> Result<Self> {
        let mut map: BTreeMap<String, BTreeMap<String, Entry>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| parse_err(line, "unterminated section header"))?
                    .trim()
                    .to_string();
                if !SECTIONS.contains(&name.as_str()) {
                    return Err(parse_err(line, format!("unknown section [{name}]")));
                }
                map.entry(name.clone()).or_default();
                current = Some(name);
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                parse_err(line, format!("expected `key = value`, got `{content}`"))
            })?;
            let section = current
                .as_ref()
                .ok_or_else(|| parse_err(line, "key outside of any section"))?;
            let key = key.trim().to_string();
            let entries = map.get_mut(section).unwrap();
            if entries.contains_key(&key) {
                return Err(parse_err(
                    line,
                    format!("duplicate key `{key}` in [{section}]"),
                ));
            }
            entries.insert(
                key,
                Entry {
                    value: value.trim().to_string(),
                    line,
                    used: false,
                },
            );
        }
        Ok(Self { map })
    }

    fn take(&mut self, section: &str, key: &str) -> Option<(String, usize)> {
        let e = self.map.get_mut(section)?.get_mut(key)?;
        e.used = true;
        Some((e.value.clone(), e.line))
    }

    fn get<T: FromStr>(&mut self, section: &str, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.take(section, key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| parse_err(line, format!("[{section}] {key}: {e}"))),
        }
    }

    fn get_or<T: FromStr>(&mut self, section: &str, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get(section, key)?.unwrap_or(default))
    }

    fn expr(&mut self, section: &str, key: &str) -> Result<Option<Expr>> {
        match self.take(section, key) {
            None => Ok(None),
            Some((v, line)) => parse_expr(&v)
                .map(Some)
                .map_err(|e| parse_err(line, format!("[{section}] {key}: {e}"))),
        }
    }

    fn expr_or(&mut self, section: &str, key: &str, default: &str) -> Result<Expr> {
        Ok(match self.expr(section, key)? {
            Some(e) => e,
            None => parse_expr(default).expect("valid default expression"),
        })
    }

    fn numbers(&mut self, section: &str, key: &str, count: usize) -> Result<Option<Vec<f64>>> {
        match self.take(section, key) {
            None => Ok(None),
            Some((v, line)) => {
                let nums: std::result::Result<Vec<f64>, _> =
                    v.split_whitespace().map(str::parse).collect();
                match nums {
                    Ok(n) if n.len() == count => Ok(Some(n)),
                    _ => Err(parse_err(
                        line,
                        format!("[{section}] {key}: expected {count} numbers"),
                    )),
                }
            }
        }
    }

    fn finish(self) -> Result<()> {
        for (section, entries) in &self.map {
            for (key, e) in entries {
                if !e.used {
                    return Err(parse_err(
                        e.line,
                        format!("unknown key `{key}` in [{section}]"),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn parse_matrix2(v: &[f64]) -> MatD {
    MatD::from_row_slice(v)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into());
    let mut s = parse_scenario(&text, &name)?;
    s.base_dir = path.parent().map(Path::to_path_buf);
    Ok(s)
}

pub fn parse_scenario(text: &str, name: &str) -> Result<Scenario> {
    let mut sec = Sections::parse(text)?;

    let mesh = match sec.take("mesh", "file") {
        Some((path, _)) => MeshSource::File(PathBuf::from(path)),
        None => {
            let nx = sec.get_or("mesh", "nx", 16usize)?;
            let ny = sec.get_or("mesh", "ny", nx)?;
            let extent = match sec.numbers("mesh", "extent", 4)? {
                Some(v) => Rect {
                    x0: v[0],
                    x1: v[1],
                    y0: v[2],
                    y1: v[3],
                },
                None => Rect::UNIT,
            };
            let triangulation = sec.get_or("mesh", "triangulation", Triangulation::Crossed)?;
            let mut rule = match sec.take("mesh", "tags") {
                None => TagRule::all_dirichlet(),
                Some((v, line)) => TagRule::preset(&v)
                    .ok_or_else(|| parse_err(line, format!("unknown tag preset `{v}`")))?,
            };
            let sides = ["left", "right", "bottom", "top"];
            if let Some((v, line)) = sec.take("mesh", "nutrient") {
                rule.nutrient = [nutrient_tag(&v).map_err(|e| parse_err(line, e))?; 4];
            }
            for (k, side) in sides.iter().enumerate() {
                if let Some((v, line)) = sec.take("mesh", &format!("elastic_{side}")) {
                    rule.elastic[k] = match v.as_str() {
                        "dirichlet" => ElasticTag::Dirichlet,
                        "neumann" => ElasticTag::Neumann,
                        other => {
                            return Err(parse_err(line, format!("unknown elastic tag `{other}`")))
                        }
                    };
                }
                if let Some((v, line)) = sec.take("mesh", &format!("nutrient_{side}")) {
                    rule.nutrient[k] = nutrient_tag(&v).map_err(|e| parse_err(line, e))?;
                }
            }
            MeshSource::Generated {
                nx,
                ny,
                extent,
                triangulation,
                rule,
            }
        }
    };

    if let Some((model, line)) = sec.take("energy", "model") {
        if model != "distance_volumetric" {
            return Err(parse_err(line, format!("unknown energy model `{model}`")));
        }
    }
    let energy = EnergyConfig {
        exponent: sec.get_or("energy", "exponent", 2.0)?,
        radius: sec.get_or("energy", "radius", DistanceVolumetricEnergy::DEFAULT_RADIUS)?,
    };

    let law = sec.take("growth", "law").unwrap_or(("none".into(), 0));
    let growth = match law.0.as_str() {
        "none" => GrowthConfig::None,
        "product" => GrowthConfig::Product,
        "multiplicative" => GrowthConfig::Multiplicative(parse_matrix2(
            &sec.numbers("growth", "h", 4)?
                .ok_or_else(|| parse_err(law.1, "multiplicative growth needs `h`"))?,
        )),
        "stress_nutrient" => {
            let gamma = sec.expr_or("growth", "gamma", "1")?;
            let eta = match sec.take("growth", "eta") {
                None => NutrientResponse::Linear(1.0),
                Some((v, line)) => parse_response(&v)
                    .and_then(|(k, c)| match k.as_str() {
                        "constant" => Some(NutrientResponse::Constant(c)),
                        "linear" => Some(NutrientResponse::Linear(c)),
                        "saturating" => Some(NutrientResponse::Saturating(c)),
                        _ => None,
                    })
                    .ok_or_else(|| {
                        parse_err(
                            line,
                            format!("bad eta `{v}` (constant|linear|saturating <c>)"),
                        )
                    })?,
            };
            let mu = match sec.take("growth", "mu") {
                None => StressResponse::Identity,
                Some((v, _)) if v == "identity" => StressResponse::Identity,
                Some((v, line)) => parse_response(&v)
                    .and_then(|(k, c)| (k == "linear").then_some(StressResponse::Linear(c)))
                    .ok_or_else(|| {
                        parse_err(line, format!("bad mu `{v}` (identity | linear <c>)"))
                    })?,
            };
            GrowthConfig::StressNutrient { gamma, eta, mu }
        }
        other => return Err(parse_err(law.1, format!("unknown growth law `{other}`"))),
    };

    if let Some((model, line)) = sec.take("nutrient", "model") {
        if model != "det_ratio" {
            return Err(parse_err(line, format!("unknown nutrient model `{model}`")));
        }
    }
    let nutrient = NutrientConfig {
        d0: [
            sec.expr_or("nutrient", "d0_xx", "1")?,
            sec.expr_or("nutrient", "d0_xy", "0")?,
            sec.expr_or("nutrient", "d0_yx", "0")?,
            sec.expr_or("nutrient", "d0_yy", "1")?,
        ],
        beta0: sec.expr_or("nutrient", "beta0", "1")?,
        nu: sec.get_or("nutrient", "nu", 0.1)?,
    };

    let traction = match (
        sec.expr("boundary", "g_x")?,
        sec.expr("boundary", "g_y")?,
        sec.expr("boundary", "traction_normal")?,
    ) {
        (None, None, None) => Traction::None,
        (None, None, Some(p)) => Traction::Normal(p),
        (gx, gy, None) => Traction::Components(
            gx.unwrap_or(Expr::constant(0.0)),
            gy.unwrap_or(Expr::constant(0.0)),
        ),
        _ => {
            let line = sec
                .take("boundary", "traction_normal")
                .map(|v| v.1)
                .unwrap_or(0);
            return Err(parse_err(
                line,
                "give either g_x/g_y or traction_normal, not both",
            ));
        }
    };
    let boundary = BoundaryConfig {
        f: [
            sec.expr_or("boundary", "f_x", "x")?,
            sec.expr_or("boundary", "f_y", "y")?,
        ],
        traction,
        f_n: sec.expr_or("boundary", "f_n", "1")?,
        g_n: sec.expr_or("boundary", "g_n", "0")?,
    };

    let initial = if let Some(v) = sec.numbers("initial", "g0_matrix", 4)? {
        InitialGrowth::Constant(parse_matrix2(&v))
    } else if let (Some(gx), Some(gy)) =
        (sec.expr("initial", "g0_x")?, sec.expr("initial", "g0_y")?)
    {
        InitialGrowth::Gradient([gx, gy])
    } else if let Some(xx) = sec.expr("initial", "G0_xx")? {
        InitialGrowth::Field([
            xx,
            sec.expr_or("initial", "G0_xy", "0")?,
            sec.expr_or("initial", "G0_yx", "0")?,
            sec.expr_or("initial", "G0_yy", "1")?,
        ])
    } else {
        InitialGrowth::Constant(MatD::identity(2))
    };

    let t0 = sec.get_or("time", "t0", 0.0)?;
    let t_end = sec.get_or("time", "t_end", 1.0)?;
    let dt = sec.get_or("time", "dt", 1e-2)?;
    let adaptive = sec.get_or("time", "adaptive", false)?;
    let time = TimeGrid::new(t0, t_end, dt, adaptive).map_err(|e| parse_err(0, e.to_string()))?;
    let coupling = sec.get_or("time", "coupling", Coupling::Staggered)?;

    let guards = GuardSettings {
        det_min: sec.get_or("guards", "det_min", 0.1)?,
        norm_max: sec.get("guards", "norm_max")?,
        contraction_budget: sec.get("guards", "contraction_budget")?,
    };

    let defaults = SolverOptions::default();
    let linear_solver = match sec.take("solver", "linear_solver") {
        None => SolverChoice::Auto,
        Some((v, line)) => match v.as_str() {
            "auto" => SolverChoice::Auto,
            "direct" => SolverChoice::Direct,
            "cg" => SolverChoice::ConjugateGradient,
            other => return Err(parse_err(line, format!("unknown linear solver `{other}`"))),
        },
    };
    let solver = SolverOptions {
        method: sec.get_or("solver", "method", Method::FixedPoint)?,
        tol_increment: sec.get_or("solver", "tol_increment", defaults.tol_increment)?,
        tol_residual: sec.get_or("solver", "tol_residual", defaults.tol_residual)?,
        max_iterations: sec.get_or("solver", "max_iterations", defaults.max_iterations)?,
        line_search: sec.get_or("solver", "line_search", defaults.line_search)?,
        check_coercivity: sec.get_or("solver", "check_coercivity", defaults.check_coercivity)?,
        linear_solver,
    };
    let warm_start = sec.get_or("solver", "warm_start", true)?;

    let output = OutputConfig {
        directory: sec.get::<String>("output", "directory")?.map(PathBuf::from),
        snapshot_every: sec.get_or("output", "snapshot_every", 0usize)?,
        vtk: sec.get_or("output", "vtk", true)?,
    };
    sec.finish()?;

    Ok(Scenario {
        name: name.to_string(),
        base_dir: None,
        mesh,
        energy,
        growth,
        nutrient,
        boundary,
        initial,
        time,
        coupling,
        guards,
        solver,
        warm_start,
        output,
    })
}

fn nutrient_tag(v: &str) -> std::result::Result<NutrientTag, String> {
    match v {
        "dirichlet" => Ok(NutrientTag::Dirichlet),
        "neumann" => Ok(NutrientTag::Neumann),
        other => Err(format!("unknown nutrient tag `{other}`")),
    }
}

fn parse_response(v: &str) -> Option<(String, f64)> {
    let mut it = v.split_whitespace();
    let kind = it.next()?.to_string();
    let c = it.next().map_or(Some(1.0), |s| s.parse().ok())?;
    it.next().is_none().then_some((kind, c))
}

fn const_mat(e: &[Expr; 4], p: &[f64; 2]) -> MatD {
    MatD::from_row_slice(&[
        e[0].eval_at(0.0, p),
        e[1].eval_at(0.0, p),
        e[2].eval_at(0.0, p),
        e[3].eval_at(0.0, p),
    ])
}

impl Scenario {
    pub fn build_mesh(&self) -> Result<Mesh> {
        match &self.mesh {
            MeshSource::Generated {
                nx,
                ny,
                extent,
                triangulation,
                rule,
            } => build_rectangle_mesh(*nx, *ny, *extent, *triangulation, rule),
            MeshSource::File(path) => {
                let full = match (&self.base_dir, path.is_relative()) {
                    (Some(base), true) => base.join(path),
                    _ => path.clone(),
                };
                read_mesh(std::io::BufReader::new(std::fs::File::open(full)?))
            }
        }
    }

    /// Replaces the resolution of a generated mesh.
    pub fn with_resolution(mut self, n: usize) -> Self {
        if let MeshSource::Generated { nx, ny, .. } = &mut self.mesh {
            *nx = n;
            *ny = n;
        }
        self
    }

    pub fn energy_model(&self) -> Arc<dyn EnergyModel> {
        Arc::new(
            DistanceVolumetricEnergy::with_exponent(2, self.energy.exponent)
                .radius(self.energy.radius),
        )
    }

    pub fn growth_law(&self) -> Arc<dyn GrowthLaw> {
        match &self.growth {
            GrowthConfig::None => Arc::new(NoGrowth),
            GrowthConfig::Product => Arc::new(ProductGrowth),
            GrowthConfig::Multiplicative(h) => Arc::new(MultiplicativeGrowth { h: *h }),
            GrowthConfig::StressNutrient { gamma, eta, mu } => {
                let gamma = gamma.clone();
                Arc::new(StressNutrientGrowth {
                    energy: self.energy_model(),
                    gamma: Arc::new(move |x: &[f64]| gamma.eval(0.0, x[0], x[1])),
                    eta: *eta,
                    mu: *mu,
                })
            }
        }
    }

    pub fn nutrient_model(&self) -> Arc<DetRatioNutrient> {
        let d0 = self.nutrient.d0.clone();
        let beta0 = self.nutrient.beta0.clone();
        Arc::new(DetRatioNutrient {
            d0: Arc::new(move |x: &[f64]| const_mat(&d0, &[x[0], x[1]])),
            beta0: Arc::new(move |x: &[f64]| beta0.eval(0.0, x[0], x[1])),
            nu: self.nutrient.nu,
        })
    }

    /// Initial growth tensor at a point.
    pub fn g0_at(&self, p: &[f64; 2]) -> MatD {
        match &self.initial {
            InitialGrowth::Constant(m) => *m,
            InitialGrowth::Field(e) => const_mat(e, p),
            InitialGrowth::Gradient(g) => MatD::from_row_slice(&[
                g[0].diff(Var::X).eval_at(0.0, p),
                g[0].diff(Var::Y).eval_at(0.0, p),
                g[1].diff(Var::X).eval_at(0.0, p),
                g[1].diff(Var::Y).eval_at(0.0, p),
            ]),
        }
    }

    pub fn g0_field(&self, mesh: &Mesh) -> MatrixField {
        MatrixField(mesh.vertices().iter().map(|p| self.g0_at(p)).collect())
    }

    /// Quadrature-point sampler of `G0 = grad g0` for compatible data.
    pub fn g0_analytic_sampler(&self) -> Option<GrowthSampler> {
        let InitialGrowth::Gradient(g) = &self.initial else {
            return None;
        };
        let d = [
            g[0].diff(Var::X),
            g[0].diff(Var::Y),
            g[1].diff(Var::X),
            g[1].diff(Var::Y),
        ];
        Some(GrowthSampler::Analytic(Arc::new(move |p: &[f64; 2]| {
            const_mat(&d, p)
        })))
    }

    pub fn is_compatible(&self) -> bool {
        matches!(self.initial, InitialGrowth::Gradient(_))
            || matches!(self.initial, InitialGrowth::Constant(m) if m == MatD::identity(2))
    }

    pub fn dirichlet_at(&self, t: f64) -> impl Fn(&[f64; 2]) -> [f64; 2] + Send + Sync + 'static {
        let f = self.boundary.f.clone();
        move |p: &[f64; 2]| [f[0].eval_at(t, p), f[1].eval_at(t, p)]
    }

    pub fn traction_at(&self, t: f64) -> Option<TractionFn> {
        match &self.boundary.traction {
            Traction::None => None,
            Traction::Components(gx, gy) => {
                let (gx, gy) = (gx.clone(), gy.clone());
                Some(Arc::new(move |p: &[f64; 2], _n: &[f64; 2]| {
                    [gx.eval_at(t, p), gy.eval_at(t, p)]
                }))
            }
            Traction::Normal(pr) => {
                let pr = pr.clone();
                Some(Arc::new(move |p: &[f64; 2], n: &[f64; 2]| {
                    let v = pr.eval_at(t, p);
                    [v * n[0], v * n[1]]
                }))
            }
        }
    }

    pub fn nutrient_dirichlet_at(&self, t: f64) -> ScalarPointFn {
        let e = self.boundary.f_n.clone();
        Arc::new(move |p: &[f64; 2]| e.eval_at(t, p))
    }

    pub fn nutrient_flux_at(&self, t: f64) -> ScalarPointFn {
        let e = self.boundary.g_n.clone();
        Arc::new(move |p: &[f64; 2]| e.eval_at(t, p))
    }

    pub fn guard_config(&self, g0: &MatrixField) -> GuardConfig {
        let mut cfg = GuardConfig::defaults_for(g0);
        cfg.det_min = self.guards.det_min;
        if let Some(n) = self.guards.norm_max {
            cfg.norm_max = n;
        }
        cfg.contraction_budget = self.guards.contraction_budget;
        cfg
    }
}

/// Results of all assumption checks for a scenario.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub checks: Vec<AssumptionReport>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.to_string())
            .collect()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

const CHECK_SAMPLES: usize = 200;

/// Runs every assumption check; the report lists passes and failures.
pub fn assess_scenario(s: &Scenario) -> Result<ValidationReport> {
    let mesh = s.build_mesh()?;
    let energy = s.energy_model();
    let nutrient = s.nutrient_model();
    let law = s.growth_law();
    let mut checks = vec![
        check_frame_indifference(energy.as_ref(), 1000),
        check_coercivity(energy.as_ref(), CHECK_SAMPLES),
        check_reference_state(energy.as_ref(), CHECK_SAMPLES),
        check_derivatives(
            energy.as_ref(),
            CHECK_SAMPLES,
            0.6 * energy.admissible_radius(),
        ),
        check_nutrient_assumptions(nutrient.as_ref(), 2, CHECK_SAMPLES),
        check_nutrient_frame_indifference(nutrient.as_ref(), 2, CHECK_SAMPLES),
        check_growth_law(law.as_ref(), 2, CHECK_SAMPLES),
    ];
    checks.push(check_boundary_signs(s, &mesh));
    checks.push(check_nutrient_uniqueness(s, &mesh));
    checks.push(check_initial_growth(s, &mesh, energy.admissible_radius()));
    Ok(ValidationReport { checks })
}

/// [`assess_scenario`], failing with the list of violated assumptions.
pub fn validate_scenario(s: &Scenario) -> Result<ValidationReport> {
    let report = assess_scenario(s)?;
    if report.passed() {
        Ok(report)
    } else {
        Err(Error::Validation(report.failures()))
    }
}

fn sample_times(s: &Scenario) -> [f64; 3] {
    [s.time.t0, 0.5 * (s.time.t0 + s.time.t_end), s.time.t_end]
}

fn check_boundary_signs(s: &Scenario, mesh: &Mesh) -> AssumptionReport {
    let mut worst = f64::INFINITY;
    for f in mesh.facets() {
        let (p, q) = (
            mesh.vertices()[f.vertices[0]],
            mesh.vertices()[f.vertices[1]],
        );
        let mid = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
        let expr = match f.nutrient {
            NutrientTag::Dirichlet => &s.boundary.f_n,
            NutrientTag::Neumann => &s.boundary.g_n,
        };
        for t in sample_times(s) {
            for pt in [p, mid, q] {
                let v = expr.eval_at(t, &pt);
                worst = worst.min(if v.is_nan() { f64::NEG_INFINITY } else { v });
            }
        }
    }
    AssumptionReport {
        name: "nutrient boundary signs".into(),
        passed: worst >= 0.0,
        value: worst,
        detail: "min of f_n on Dirichlet and g_n on Neumann facets".into(),
    }
}

fn check_nutrient_uniqueness(s: &Scenario, mesh: &Mesh) -> AssumptionReport {
    let dirichlet_facets = mesh
        .facets()
        .iter()
        .filter(|f| f.nutrient == NutrientTag::Dirichlet)
        .count();
    let mut absorbing_area = 0.0;
    for c in 0..mesh.num_cells() {
        let p = mesh.cell_points(c);
        let centroid = [
            (p[0][0] + p[1][0] + p[2][0]) / 3.0,
            (p[0][1] + p[1][1] + p[2][1]) / 3.0,
        ];
        if s.nutrient.beta0.eval_at(0.0, &centroid) > 0.0 {
            absorbing_area += mesh.cell_area(c);
        }
    }
    AssumptionReport {
        name: "nutrient uniqueness".into(),
        passed: dirichlet_facets > 0 || absorbing_area > 0.0,
        value: absorbing_area,
        detail: format!(
            "{dirichlet_facets} nutrient Dirichlet facets; area with beta0 > 0 = {absorbing_area:.3e}"
        ),
    }
}

fn check_initial_growth(s: &Scenario, mesh: &Mesh, radius: f64) -> AssumptionReport {
    let g0 = s.g0_field(mesh);
    let min_det = g0.min_det();
    let max_dist =
        g0.0.iter()
            .map(|g| (*g - MatD::identity(2)).norm_inf())
            .fold(0.0, f64::max);
    AssumptionReport {
        name: "initial growth admissible".into(),
        passed: min_det > 0.0 && max_dist < radius,
        value: max_dist,
        detail: format!("min det G0 = {min_det:.6e}, max |G0 - 1| = {max_dist:.3e} < {radius}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = "
[mesh]
nx = 4
tags = left_clamped
[growth]
law = stress_nutrient
eta = saturating 2
mu = linear 0.1
[boundary]
f_x = x
traction_normal = 0.01
[time]
t_end = 0.1
dt = 0.05
[solver]
method = newton
";

    #[test]
    fn parses_basic_scenario() {
        let s = parse_scenario(BASIC, "basic").unwrap();
        assert_eq!(s.solver.method, Method::Newton);
        assert!(matches!(s.boundary.traction, Traction::Normal(_)));
        assert!(matches!(
            s.growth,
            GrowthConfig::StressNutrient {
                eta: NutrientResponse::Saturating(c),
                mu: StressResponse::Linear(m),
                ..
            } if c == 2.0 && m == 0.1
        ));
        let report = validate_scenario(&s).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        for (text, line) in [
            ("[mesh]\nnx = four\n", 2),
            ("[mesh]\nnx = 4\n[bogus]\n", 3),
            ("[mesh]\nsize = 3\n", 2),
            ("nx = 3\n", 1),
            ("[boundary]\nf_x = sin(\n", 2),
            ("[solver]\nmethod = magic\n", 2),
        ] {
            match parse_scenario(text, "bad") {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn missing_nutrient_uniqueness_is_reported() {
        let text =
            "[mesh]\nnx = 4\nnutrient = neumann\n[nutrient]\nbeta0 = 0\n[boundary]\ng_n = 0\n";
        let s = parse_scenario(text, "n2").unwrap();
        match validate_scenario(&s) {
            Err(Error::Validation(v)) => {
                assert!(v.iter().any(|m| m.contains("nutrient uniqueness")))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn compatible_initial_growth_is_a_gradient() {
        let text =
            "[initial]\ng0_x = x + 0.05*sin(pi*x)*sin(pi*y)\ng0_y = y + 0.05*sin(pi*x)*sin(pi*y)\n";
        let s = parse_scenario(text, "c").unwrap();
        let p = [0.3, 0.6];
        let g = s.g0_at(&p);
        let pi = std::f64::consts::PI;
        let expected = 1.0 + 0.05 * pi * (pi * p[0]).cos() * (pi * p[1]).sin();
        assert!((g[(0, 0)] - expected).abs() < 1e-14);
        assert!((g[(1, 0)] - (expected - 1.0)).abs() < 1e-14);
        assert!(s.is_compatible());
    }
}
