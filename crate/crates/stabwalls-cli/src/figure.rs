//! Figure specs and their rendering.

use clap::ValueEnum;
use num_traits::Zero;
use serde::Deserialize;

use stabwalls::chern::{delta, format_rational, parse_rational, to_f64, ChernCharacter, Rational};
use stabwalls::geometry::{sample_gamma, sample_theta, Window};
use stabwalls::walls::{nu_wall, trace_polys, NuWallKind, WallError, WallPolys, WallTrace};

use crate::svg::Canvas;
use crate::CliError;

/// Fixed color roles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Theta,
    Gamma,
    Nu,
    Lambda,
    LambdaAlt,
}

impl Role {
    pub fn color(self) -> &'static str {
        match self {
            Role::Theta => "#1f4fd1",
            Role::Gamma => "#d62728",
            Role::Nu => "#b0209f",
            Role::Lambda => "#000000",
            Role::LambdaAlt => "#e07b00",
        }
    }

    fn parse(text: &str) -> Result<Self, CliError> {
        match text {
            "theta" => Ok(Role::Theta),
            "gamma" => Ok(Role::Gamma),
            "nu" => Ok(Role::Nu),
            "lambda" => Ok(Role::Lambda),
            "lambda_alt" => Ok(Role::LambdaAlt),
            other => Err(CliError::Input(format!("unknown style role `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Curve {
    Theta { v: ChernCharacter },
    /// Vertical line `beta = mu(v)`.
    MuLine { v: ChernCharacter },
    Gamma { v: ChernCharacter, s: Rational, branches: Option<Vec<String>> },
    NuWall { u: ChernCharacter, v: ChernCharacter },
    LambdaWall { u: ChernCharacter, v: ChernCharacter, s: Rational },
    Point { beta: Rational, alpha_sq: Rational },
}

impl Curve {
    fn default_role(&self) -> Role {
        match self {
            Curve::Theta { .. } | Curve::MuLine { .. } => Role::Theta,
            Curve::Gamma { .. } | Curve::Point { .. } => Role::Gamma,
            Curve::NuWall { .. } => Role::Nu,
            Curve::LambdaWall { .. } => Role::Lambda,
        }
    }

    fn describe(&self) -> String {
        match self {
            Curve::Theta { v } => format!("Θ v=({v})"),
            Curve::MuLine { v } => format!("β=μ v=({v})"),
            Curve::Gamma { v, s, branches } => match branches {
                Some(b) => format!("Γ[{}] v=({v}) s={}", b.join(","), format_rational(s)),
                None => format!("Γ v=({v}) s={}", format_rational(s)),
            },
            Curve::NuWall { u, .. } => format!("Ξ u=({u})"),
            Curve::LambdaWall { u, v, s } => format!("Υ u=({u}) v=({v}) s={}", format_rational(s)),
            Curve::Point { beta, alpha_sq } => format!("β={} α²={}", format_rational(beta), format_rational(alpha_sq)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Layer {
    pub curve: Curve,
    pub role: Role,
    pub dashed: bool,
    pub label: Option<String>,
}

impl Layer {
    fn new(curve: Curve) -> Self {
        let role = curve.default_role();
        Layer {
            curve,
            role,
            dashed: false,
            label: None,
        }
    }

    fn role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }

    fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

#[derive(Debug, Clone)]
pub struct FigureSpec {
    pub title: Option<String>,
    pub window: Window,
    pub step: Rational,
    pub layers: Vec<Layer>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Theta, Gamma minus, the nu-wall and the lambda-wall of the ideal sheaf of a line.
    IdealLine,
    /// Four lambda-walls and Gamma minus meeting at one point, for the ideal sheaf of a point.
    IdealPoint,
    /// The Theta hyperbola and the line beta = mu for ch<=2 = (2,-1,-5/2).
    ThetaRegions,
}

#[derive(Deserialize)]
struct RawWindow {
    beta_min: String,
    beta_max: String,
    alpha_max: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayer {
    kind: String,
    v: Option<String>,
    u: Option<String>,
    s: Option<String>,
    branches: Option<Vec<String>>,
    beta: Option<String>,
    alpha_sq: Option<String>,
    role: Option<String>,
    #[serde(default)]
    dashed: bool,
    label: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    title: Option<String>,
    window: RawWindow,
    step: Option<String>,
    layers: Vec<RawLayer>,
}

fn ch(text: &str) -> ChernCharacter {
    text.parse().expect("preset characters are valid")
}

fn q(text: &str) -> Rational {
    parse_rational(text).expect("preset rationals are valid")
}

fn field<'a>(value: &'a Option<String>, name: &str, kind: &str) -> Result<&'a str, CliError> {
    value
        .as_deref()
        .ok_or_else(|| CliError::Input(format!("layer `{kind}` needs `{name}`")))
}

impl RawLayer {
    fn into_layer(self) -> Result<Layer, CliError> {
        let k = self.kind.as_str();
        let v = || crate::chern(field(&self.v, "v", k)?);
        let u = || crate::chern(field(&self.u, "u", k)?);
        let s = || crate::rational(field(&self.s, "s", k)?);
        let curve = match k {
            "theta" => Curve::Theta { v: v()? },
            "mu_line" => Curve::MuLine { v: v()? },
            "gamma" => Curve::Gamma {
                v: v()?,
                s: s()?,
                branches: self.branches.clone(),
            },
            "nu_wall" => Curve::NuWall { u: u()?, v: v()? },
            "lambda_wall" => Curve::LambdaWall { u: u()?, v: v()?, s: s()? },
            "point" => Curve::Point {
                beta: crate::rational(field(&self.beta, "beta", k)?)?,
                alpha_sq: crate::rational(field(&self.alpha_sq, "alpha_sq", k)?)?,
            },
            other => return Err(CliError::Input(format!("unknown layer kind `{other}`"))),
        };
        let mut layer = Layer::new(curve);
        if let Some(r) = &self.role {
            layer.role = Role::parse(r)?;
        }
        layer.dashed = self.dashed;
        layer.label = self.label;
        Ok(layer)
    }
}

impl FigureSpec {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let raw: RawSpec = serde_json::from_str(text).map_err(|e| CliError::Input(format!("figure spec: {e}")))?;
        if raw.layers.is_empty() {
            return Err(CliError::Input("figure spec has no layers".into()));
        }
        let window = Window::new(
            crate::rational(&raw.window.beta_min)?,
            crate::rational(&raw.window.beta_max)?,
            crate::rational(&raw.window.alpha_max)?,
        )
        .map_err(CliError::input)?;
        let step = match &raw.step {
            Some(s) => crate::rational(s)?,
            None => Rational::new(1.into(), 64.into()),
        };
        if step <= Rational::zero() {
            return Err(CliError::Input("step must be positive".into()));
        }
        let layers = raw.layers.into_iter().map(RawLayer::into_layer).collect::<Result<_, _>>()?;
        Ok(FigureSpec {
            title: raw.title,
            window,
            step,
            layers,
        })
    }

    pub fn preset(p: Preset) -> Self {
        let window = |b0: &str, b1: &str, a: &str| Window::new(q(b0), q(b1), q(a)).expect("preset windows are valid");
        match p {
            Preset::IdealLine => {
                let v = ch("1,0,-1,1");
                let u = ch("1,-1,1/2,-1/6");
                let s = q("1/3");
                FigureSpec {
                    title: Some("ideal sheaf of a line, s = 1/3".into()),
                    window: window("-4", "1", "2"),
                    step: q("1/64"),
                    layers: vec![
                        Layer::new(Curve::Theta { v: v.clone() }),
                        Layer::new(Curve::Gamma {
                            v: v.clone(),
                            s: s.clone(),
                            branches: Some(vec!["minus".into()]),
                        }),
                        Layer::new(Curve::NuWall { u: u.clone(), v: v.clone() }),
                        Layer::new(Curve::LambdaWall { u, v, s }),
                        Layer::new(Curve::Point { beta: q("-3/2"), alpha_sq: q("1/4") }).role(Role::Nu),
                        Layer::new(Curve::Point { beta: q("-2"), alpha_sq: q("1/3") }),
                    ],
                }
            }
            Preset::IdealPoint => {
                let v = ch("1,0,0,-1");
                let u = ch("-2,3,-3/2,-1/2");
                let w = ch("-1,2,-2,4/3");
                let w1 = ch("1,-1,1/2,-1/6");
                let u1 = ch("0,3,-9/2,7/2");
                let s = q("1/3");
                let wall = |a: &ChernCharacter, b: &ChernCharacter| Curve::LambdaWall {
                    u: a.clone(),
                    v: b.clone(),
                    s: s.clone(),
                };
                FigureSpec {
                    title: Some("ideal sheaf of a point, s = 1/3".into()),
                    window: window("-7/2", "-1/2", "3/2"),
                    step: q("1/128"),
                    layers: vec![
                        Layer::new(Curve::Gamma {
                            v: v.clone(),
                            s: s.clone(),
                            branches: Some(vec!["minus".into()]),
                        }),
                        Layer::new(wall(&u, &w)).role(Role::LambdaAlt).dashed(),
                        Layer::new(wall(&w1, &u1)).dashed(),
                        Layer::new(wall(&w, &v)),
                        Layer::new(wall(&u1, &v)).role(Role::LambdaAlt),
                        Layer::new(Curve::Point { beta: q("-2"), alpha_sq: q("1/3") }),
                    ],
                }
            }
            Preset::ThetaRegions => {
                let v = ch("2,-1,-5/2,0");
                FigureSpec {
                    title: Some("regions cut out by Theta and beta = mu".into()),
                    window: window("-4", "3", "3"),
                    step: q("1/64"),
                    layers: vec![
                        Layer::new(Curve::Theta { v: v.clone() }),
                        Layer::new(Curve::MuLine { v }).dashed(),
                    ],
                }
            }
        }
    }
}

/// Renders every layer. Returns the document and the number of trace links
/// left unexplained; uncertified traces are still drawn.
pub fn render(spec: &FigureSpec) -> Result<(String, usize), CliError> {
    if spec.layers.is_empty() {
        return Err(CliError::Input("figure spec has no layers".into()));
    }
    let w = &spec.window;
    let mut canvas = Canvas::new(to_f64(&w.beta_min), to_f64(&w.beta_max), to_f64(&w.alpha_max));
    canvas.axes();
    let mut legend = Vec::new();
    let mut unresolved = 0usize;
    for layer in &spec.layers {
        let color = layer.role.color();
        match &layer.curve {
            Curve::Theta { v } => {
                let samples = sample_theta(v, w, &spec.step).map_err(CliError::input)?;
                draw_samples(&mut canvas, &samples, None, color, layer.dashed);
            }
            Curve::MuLine { v } => {
                let mu = v.mu().ok_or_else(|| CliError::Input("mu line needs nonzero rank".into()))?;
                let b = to_f64(&mu);
                canvas.polyline(&[(b, 0.0), (b, to_f64(&w.alpha_max))], color, layer.dashed, f64::INFINITY);
            }
            Curve::Gamma { v, s, branches } => {
                let samples = sample_gamma(v, s, w, &spec.step).map_err(CliError::input)?;
                draw_samples(&mut canvas, &samples, branches.as_deref(), color, layer.dashed);
            }
            Curve::NuWall { u, v } => match nu_wall(u, v).map_err(CliError::input)? {
                NuWallKind::Wall(nw) => {
                    let c = to_f64(&nw.center);
                    let r = to_f64(&nw.radius_sq).sqrt();
                    let pts: Vec<(f64, f64)> = (0..=720)
                        .map(|i| {
                            let t = std::f64::consts::PI * i as f64 / 720.0;
                            (c + r * t.cos(), r * t.sin())
                        })
                        .collect();
                    canvas.polyline(&pts, color, layer.dashed, 40.0);
                }
                NuWallKind::Degenerate => {
                    let d02 = delta(0, 2, u, v).map_err(CliError::input)?;
                    if !d02.is_zero() {
                        let b = to_f64(&(delta(1, 2, u, v).map_err(CliError::input)? / d02));
                        canvas.polyline(&[(b, 0.0), (b, to_f64(&w.alpha_max))], color, layer.dashed, f64::INFINITY);
                    }
                }
                NuWallKind::Empty => {}
            },
            Curve::LambdaWall { u, v, s } => {
                let trace = trace_curve(u, v, s, w, &spec.step).map_err(CliError::input)?;
                unresolved += trace.unresolved_links;
                draw_trace(&mut canvas, &trace, color, layer.dashed);
            }
            Curve::Point { beta, alpha_sq } => {
                let (b, a) = (to_f64(beta), to_f64(alpha_sq).sqrt());
                canvas.marker(b, a, color);
                if let Some(text) = &layer.label {
                    canvas.label(b, a, text, color);
                }
                continue;
            }
        }
        legend.push((layer.label.clone().unwrap_or_else(|| layer.curve.describe()), color));
    }
    canvas.legend(&legend);
    Ok((canvas.finish(spec.title.as_deref()), unresolved))
}

fn trace_curve(
    u: &ChernCharacter,
    v: &ChernCharacter,
    s: &Rational,
    w: &Window,
    step: &Rational,
) -> Result<WallTrace, WallError> {
    let polys = WallPolys::new(u, v, s);
    if polys.is_zero() {
        return Err(WallError::Proportional);
    }
    trace_polys(&polys, w, step)
}

fn draw_samples(
    canvas: &mut Canvas,
    samples: &[stabwalls::geometry::CurveSample],
    only: Option<&[String]>,
    color: &str,
    dashed: bool,
) {
    let mut labels: Vec<&str> = samples.iter().map(|p| p.label).collect();
    labels.dedup();
    for label in labels {
        if only.is_some_and(|keep| !keep.iter().any(|k| k == label)) {
            continue;
        }
        let pts: Vec<(f64, f64)> = samples.iter().filter(|p| p.label == label).map(|p| (p.beta, p.alpha)).collect();
        canvas.polyline(&pts, color, dashed, 25.0);
    }
}

fn draw_trace(canvas: &mut Canvas, trace: &WallTrace, color: &str, dashed: bool) {
    for c in &trace.components {
        let pts: Vec<(f64, f64)> = c.vertices.iter().map(|p| (p.beta_f64(), p.alpha_f64())).collect();
        canvas.polyline(&pts, color, dashed, 60.0);
    }
}

/// Figure emitted by `wall --svg`.
pub fn wall_figure(
    u: &ChernCharacter,
    v: &ChernCharacter,
    s: &Rational,
    window: &Window,
    step: &Rational,
    trace: &WallTrace,
) -> Result<String, CliError> {
    let mut canvas = Canvas::new(to_f64(&window.beta_min), to_f64(&window.beta_max), to_f64(&window.alpha_max));
    canvas.axes();
    let mut legend = Vec::new();
    if let Ok(samples) = sample_theta(v, window, step) {
        draw_samples(&mut canvas, &samples, None, Role::Theta.color(), false);
        legend.push((format!("Θ v=({v})"), Role::Theta.color()));
    }
    if let Ok(samples) = sample_gamma(v, s, window, step) {
        draw_samples(&mut canvas, &samples, None, Role::Gamma.color(), false);
        legend.push((format!("Γ s={}", format_rational(s)), Role::Gamma.color()));
    }
    if let Ok(NuWallKind::Wall(nw)) = nu_wall(u, v) {
        let c = to_f64(&nw.center);
        let r = to_f64(&nw.radius_sq).sqrt();
        let pts: Vec<(f64, f64)> = (0..=720)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / 720.0;
                (c + r * t.cos(), r * t.sin())
            })
            .collect();
        canvas.polyline(&pts, Role::Nu.color(), false, 40.0);
        legend.push((format!("Ξ u=({u})"), Role::Nu.color()));
    }
    draw_trace(&mut canvas, trace, Role::Lambda.color(), false);
    legend.push((format!("Υ u=({u})"), Role::Lambda.color()));
    canvas.legend(&legend);
    Ok(canvas.finish(None))
}
