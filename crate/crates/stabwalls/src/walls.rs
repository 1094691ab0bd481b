//! Numerical nu-walls and lambda-walls: construction, classification,
//! crossings with `Gamma` and `Theta`, singular points, and certified
//! tracing of the wall inside a window.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::chern::{delta_unchecked, int, rat, to_f64, ChernCharacter, HalfPlanePoint, Rational, SPoint};
use crate::exactpoly::{
    cmp_root_rational, cmp_roots, real_roots, refine, sign_at_root, simplest_between, Interval, IsolatedRoot,
    PolyError, QuadraticSurd, RationalPoly,
};
use crate::geometry::{
    gamma_alpha_sq, gamma_alpha_sq_fraction, gamma_branch_of, gamma_poly_with, gamma_theta_intersections,
    lambda_bar_numerator, theta_alpha_sq_poly, twisted_polys, GammaBranch, GeometryError, Window,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WallError {
    Proportional,
    IdenticalWalls,
    AsymptoteUndefined,
    RankZero,
    Geometry(GeometryError),
    Poly(PolyError),
}

impl fmt::Display for WallError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WallError::Proportional => write!(f, "wall undefined: the characters are proportional"),
            WallError::IdenticalWalls => write!(f, "identical walls: the classes agree"),
            WallError::AsymptoteUndefined => write!(f, "asymptote undefined for these inputs"),
            WallError::RankZero => write!(f, "the target character must have nonzero rank"),
            WallError::Geometry(e) => write!(f, "{e}"),
            WallError::Poly(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for WallError {}

impl From<GeometryError> for WallError {
    fn from(e: GeometryError) -> Self {
        WallError::Geometry(e)
    }
}

impl From<PolyError> for WallError {
    fn from(e: PolyError) -> Self {
        WallError::Poly(e)
    }
}

fn d(i: usize, j: usize, u: &ChernCharacter, v: &ChernCharacter) -> Rational {
    delta_unchecked(i, j, u, v)
}

fn check_pair(u: &ChernCharacter, v: &ChernCharacter) -> Result<(), WallError> {
    if u.is_proportional_to(v) {
        Err(WallError::Proportional)
    } else {
        Ok(())
    }
}

/// The semicircle `(beta - center)^2 + a = radius_sq`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NuWall {
    pub center: Rational,
    pub radius_sq: Rational,
}

impl NuWall {
    /// `a` on the circle as a polynomial in `beta`.
    pub fn alpha_sq_poly(&self) -> RationalPoly {
        let shift = RationalPoly::linear_root(&self.center);
        &RationalPoly::constant(self.radius_sq.clone()) - &(&shift * &shift)
    }

    /// The two feet on the axis, as roots of `(beta - center)^2 - radius_sq`.
    pub fn feet(&self) -> (RationalPoly, Vec<IsolatedRoot>) {
        let p = -&self.alpha_sq_poly();
        let roots = real_roots(&p).unwrap_or_default();
        (p, roots)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NuWallKind {
    Wall(NuWall),
    Empty,
    /// `delta_01 = 0`: the locus is a vertical line or nothing.
    Degenerate,
}

pub fn nu_wall(u: &ChernCharacter, v: &ChernCharacter) -> Result<NuWallKind, WallError> {
    check_pair(u, v)?;
    let d01 = d(0, 1, u, v);
    if d01.is_zero() {
        return Ok(NuWallKind::Degenerate);
    }
    let center = d(0, 2, u, v) / &d01;
    let radius_sq = &center * &center - int(2) * d(1, 2, u, v) / &d01;
    if radius_sq.is_positive() {
        Ok(NuWallKind::Wall(NuWall { center, radius_sq }))
    } else {
        Ok(NuWallKind::Empty)
    }
}

/// `f_{u,v,s} = tau_u rho_v - tau_v rho_u` at a point.
pub fn lambda_f(u: &ChernCharacter, v: &ChernCharacter, sp: &SPoint) -> Rational {
    lambda_f_at(u, v, &sp.point, sp.s())
}

fn lambda_f_at(u: &ChernCharacter, v: &ChernCharacter, p: &HalfPlanePoint, s: &Rational) -> Rational {
    use crate::geometry::{rho, tau_at};
    tau_at(u, p, s) * rho(v, p) - tau_at(v, p, s) * rho(u, p)
}

/// The wall function written as `c0(beta) + c1(beta) a + c2(beta) a^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct WallPolys {
    pub c0: RationalPoly,
    pub c1: RationalPoly,
    pub c2: RationalPoly,
}

impl WallPolys {
    pub fn new(u: &ChernCharacter, v: &ChernCharacter, s: &Rational) -> Self {
        let tu = twisted_polys(u);
        let tv = twisted_polys(v);
        let k = s + rat(1, 6);
        let half = rat(1, 2);
        let (u0, v0) = (u.rank() * &half, v.rank() * &half);
        let c0 = &(&tu[3] * &tv[2]) - &(&tv[3] * &tu[2]);
        let c1 = &(&(&tv[3].scale(&u0) - &tu[3].scale(&v0)) + &(&tv[1] * &tu[2]).scale(&k))
            - &(&tu[1] * &tv[2]).scale(&k);
        let c2 = (&tu[1].scale(&v0) - &tv[1].scale(&u0)).scale(&k);
        WallPolys { c0, c1, c2 }
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero() && self.c2.is_zero()
    }

    /// The section over a fixed `beta`, as a polynomial in `a`.
    pub fn section(&self, beta: &Rational) -> RationalPoly {
        RationalPoly::new(vec![self.c0.eval(beta), self.c1.eval(beta), self.c2.eval(beta)])
    }

    pub fn eval(&self, beta: &Rational, a: &Rational) -> Rational {
        self.section(beta).eval(a)
    }

    pub fn eval_surd(&self, beta: &Rational, a: &QuadraticSurd) -> QuadraticSurd {
        self.section(beta).eval_surd(a)
    }

    pub fn eval_f64(&self, beta: f64, a: f64) -> f64 {
        self.c0.eval_f64(beta) + a * (self.c1.eval_f64(beta) + a * self.c2.eval_f64(beta))
    }

    /// `(df/dbeta, df/da)` in floating point.
    pub fn gradient_f64(&self, beta: f64, a: f64) -> (f64, f64) {
        let fb = self.c0.derivative().eval_f64(beta)
            + a * (self.c1.derivative().eval_f64(beta) + a * self.c2.derivative().eval_f64(beta));
        let fa = self.c1.eval_f64(beta) + 2.0 * a * self.c2.eval_f64(beta);
        (fb, fa)
    }

    /// `f(beta, a)` with `a` fixed, as a polynomial in `beta`.
    pub fn at_height(&self, a: &Rational) -> RationalPoly {
        &(&self.c0 + &self.c1.scale(a)) + &self.c2.scale(&(a * a))
    }

    /// `f(beta, A(beta))`.
    pub fn compose_a(&self, a: &RationalPoly) -> RationalPoly {
        &(&self.c0 + &(&self.c1 * a)) + &(&(&self.c2 * a) * a)
    }

    /// `D^2 f(beta, N/D)` for a rational function `N/D`.
    pub fn compose_fraction(&self, num: &RationalPoly, den: &RationalPoly) -> RationalPoly {
        &(&(&self.c0 * &(den * den)) + &(&(&self.c1 * num) * den)) + &(&self.c2 * &(num * num))
    }

    /// Discriminant of the section in `a`.
    pub fn discriminant(&self) -> RationalPoly {
        &(&self.c1 * &self.c1) - &(&self.c2 * &self.c0).scale(&int(4))
    }
}

pub fn lambda_section_in_a(u: &ChernCharacter, v: &ChernCharacter, s: &Rational, beta: &Rational) -> RationalPoly {
    WallPolys::new(u, v, s).section(beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WallTag {
    Bounded,
    Unbounded,
    Degenerate,
}

impl WallTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            WallTag::Bounded => "Bounded",
            WallTag::Unbounded => "Unbounded",
            WallTag::Degenerate => "Degenerate",
        }
    }
}

/// Shape of the wall together with the normal form of `u` under the
/// equivalence `u ~ phi v + psi u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallClass {
    pub tag: WallTag,
    pub canonical: ChernCharacter,
}

pub fn classify_wall(u: &ChernCharacter, v: &ChernCharacter) -> Result<WallClass, WallError> {
    if v.rank().is_zero() {
        return Err(WallError::RankZero);
    }
    check_pair(u, v)?;
    let (d01, d02, d03) = (d(0, 1, u, v), d(0, 2, u, v), d(0, 3, u, v));
    let zero = Rational::zero;
    if !d01.is_zero() {
        return Ok(WallClass {
            tag: WallTag::Bounded,
            canonical: ChernCharacter::new(zero(), int(1), &d02 / &d01, &d03 / &d01),
        });
    }
    if !d02.is_zero() {
        return Ok(WallClass {
            tag: WallTag::Unbounded,
            canonical: ChernCharacter::new(zero(), zero(), int(1), &d03 / &d02),
        });
    }
    Ok(WallClass {
        tag: WallTag::Degenerate,
        canonical: ChernCharacter::new(zero(), zero(), zero(), int(1)),
    })
}

/// The vertical asymptote of an unbounded wall for `s != 1/3`.
pub fn unbounded_asymptote(u: &ChernCharacter, v: &ChernCharacter, s: &Rational) -> Result<Rational, WallError> {
    let d20 = d(2, 0, u, v);
    if !d(1, 0, u, v).is_zero() || d20.is_zero() || *s == rat(1, 3) {
        return Err(WallError::AsymptoteUndefined);
    }
    let k = (int(6) * s + int(1)) * d(2, 1, u, v) / int(3) - d(3, 0, u, v);
    Ok(int(3) / ((int(6) * s - int(2)) * d20) * k)
}

/// A point where the wall meets `Gamma_{v,s}`.
#[derive(Debug, Clone)]
pub struct GammaCrossing {
    pub beta: IsolatedRoot,
    pub beta_poly: RationalPoly,
    pub alpha_sq: Interval,
    pub branch: GammaBranch,
    /// True for the point of `Gamma_{v,s} ∩ Theta_v`, which lies on every wall.
    pub nodal: bool,
}

fn fine_tol() -> Rational {
    rat(1, 1 << 50)
}

/// Branch of `Gamma` through an algebraic `beta`, read off at a rational
/// point of the same local piece.
fn branch_near(v: &ChernCharacter, s: &Rational, p: &RationalPoly, r: &IsolatedRoot) -> GammaBranch {
    let r = refine(r, p, &fine_tol());
    let b = match r.as_exact() {
        Some(x) => x.clone(),
        None => simplest_between(&r.lo, &r.hi),
    };
    if let Ok(Some(a)) = gamma_alpha_sq(v, s, &b) {
        if let Some(br) = gamma_branch_of(v, s, &b, &a) {
            return br;
        }
    }
    match v.mu() {
        Some(m) if b < m => GammaBranch::Minus,
        Some(m) if b > m => GammaBranch::Plus,
        _ => GammaBranch::Zero,
    }
}

fn enclose_at(p: &RationalPoly, r: &IsolatedRoot, q: &RationalPoly) -> Interval {
    match r.as_exact() {
        Some(x) => Interval::point(q.eval(x)),
        None => q.eval_interval(&refine(r, p, &fine_tol()).interval()),
    }
}

/// Crossings of the wall with `Gamma_{v,s}` above the axis. Off `Theta_v`
/// their `beta` values are the roots of the restricted slope numerator and
/// do not depend on `s`; the point `Gamma ∩ Theta_v` is added as a nodal
/// crossing.
pub fn wall_gamma_crossings(u: &ChernCharacter, v: &ChernCharacter, s: &Rational) -> Result<Vec<GammaCrossing>, WallError> {
    if u.is_proportional_to(v) {
        return Ok(Vec::new());
    }
    let p = lambda_bar_numerator(u, v);
    let (num, den) = gamma_alpha_sq_fraction(v, s);
    let mut out = Vec::new();
    if !p.is_zero() {
        for r in real_roots(&p)? {
            if sign_at_root(&p, &r, &den) == 0 || sign_at_root(&p, &r, &(&num * &den)) <= 0 {
                continue;
            }
            let alpha_sq = match r.as_exact() {
                Some(x) => Interval::point(num.eval(x) / den.eval(x)),
                None => {
                    let iv = refine(&r, &p, &fine_tol()).interval();
                    num.eval_interval(&iv)
                        .div(&den.eval_interval(&iv))
                        .unwrap_or_else(|| Interval::point(Rational::zero()))
                }
            };
            out.push(GammaCrossing {
                branch: branch_near(v, s, &p, &r),
                beta: r,
                beta_poly: p.clone(),
                alpha_sq,
                nodal: false,
            });
        }
    }
    if v.mu().is_some() && !v.q_tilt().is_negative() {
        for t in gamma_theta_intersections(v, s)? {
            let dup = out.iter().any(|c| cmp_roots(&c.beta_poly, &c.beta, &t.beta_poly, &t.beta) == Ordering::Equal);
            if dup {
                continue;
            }
            out.push(GammaCrossing {
                branch: branch_near(v, s, &t.beta_poly, &t.beta),
                alpha_sq: t.alpha_sq.clone(),
                beta: t.beta,
                beta_poly: t.beta_poly,
                nodal: true,
            });
        }
    }
    out.sort_by(|x, y| cmp_roots(&x.beta_poly, &x.beta, &y.beta_poly, &y.beta));
    Ok(out)
}

/// A point where the wall meets `Theta_v`.
#[derive(Debug, Clone)]
pub struct ThetaCrossing {
    pub beta: IsolatedRoot,
    pub beta_poly: RationalPoly,
    pub alpha_sq: Interval,
    /// True for the point of `Gamma_{v,s} ∩ Theta_v`.
    pub nodal: bool,
}

/// Points of the wall on `Theta_v`: either `rho_u = rho_v = 0`, or the
/// nodal points where `tau_v` vanishes too.
pub fn wall_theta_crossings(u: &ChernCharacter, v: &ChernCharacter, s: &Rational) -> Result<Vec<ThetaCrossing>, WallError> {
    check_pair(u, v)?;
    if v.mu().is_none() || v.q_tilt().is_negative() {
        return Ok(Vec::new());
    }
    let a_poly = theta_alpha_sq_poly(v)?;
    let mut out = Vec::new();
    let d01 = d(0, 1, u, v);
    if !d01.is_zero() {
        let beta = d(0, 2, u, v) / &d01;
        let a = a_poly.eval(&beta);
        if a.is_positive() {
            out.push(ThetaCrossing {
                beta_poly: RationalPoly::linear_root(&beta),
                beta: IsolatedRoot::exact(beta, 1),
                alpha_sq: Interval::point(a),
                nodal: false,
            });
        }
    }
    for t in gamma_theta_intersections(v, s)? {
        let dup = out.iter().any(|c| cmp_roots(&c.beta_poly, &c.beta, &t.beta_poly, &t.beta) == Ordering::Equal);
        if !dup {
            out.push(ThetaCrossing {
                beta: t.beta,
                beta_poly: t.beta_poly,
                alpha_sq: t.alpha_sq,
                nodal: true,
            });
        }
    }
    Ok(out)
}

/// Partial derivatives of `f_{u,v,s}` at a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceGradient {
    /// `(df/dalpha) / alpha`.
    pub df_dalpha_over_alpha: Rational,
    pub df_dbeta: Rational,
    pub df_ds: Rational,
}

pub fn surface_gradient(u: &ChernCharacter, v: &ChernCharacter, sp: &SPoint) -> SurfaceGradient {
    let p = &sp.point;
    let cu = u.tilt(p);
    let cv = v.tilt(p);
    let big = |i: usize, j: usize| &cu[i] * &cv[j] - &cu[j] * &cv[i];
    let a = p.alpha_sq();
    let k = sp.s() - rat(1, 3);
    SurfaceGradient {
        df_dalpha_over_alpha: (int(1) + int(2) * &k) * big(2, 1) - big(3, 0) + a * &k * big(1, 0),
        df_dbeta: -big(3, 1) - a * &k * big(2, 0),
        df_ds: a * big(2, 1),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HorizontalKind {
    MaxOnGamma,
    MinOnNuWall,
    InflectionSpecial,
}

impl HorizontalKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            HorizontalKind::MaxOnGamma => "MaxOnGamma",
            HorizontalKind::MinOnNuWall => "MinOnNuWall",
            HorizontalKind::InflectionSpecial => "InflectionSpecial",
        }
    }
}

/// A point where the wall at `s = 1/3` has a horizontal tangent.
#[derive(Debug, Clone)]
pub struct HorizontalPoint {
    pub beta: IsolatedRoot,
    pub beta_poly: RationalPoly,
    pub alpha_sq: Interval,
    pub kind: HorizontalKind,
    pub on_theta: bool,
}

/// `Delta_31` at `s = 1/3`; the `alpha` terms cancel so it is a polynomial
/// in `beta` alone.
pub fn horizontal_cubic(u: &ChernCharacter, v: &ChernCharacter) -> RationalPoly {
    let tu = twisted_polys(u);
    let tv = twisted_polys(v);
    &(&tu[3] * &tv[1]) - &(&tu[1] * &tv[3])
}

pub fn horizontal_points(u: &ChernCharacter, v: &ChernCharacter) -> Result<Vec<HorizontalPoint>, WallError> {
    if u.is_proportional_to(v) {
        return Ok(Vec::new());
    }
    let third = rat(1, 3);
    let cubic = horizontal_cubic(u, v);
    if cubic.is_zero() {
        return Ok(Vec::new());
    }
    let polys = WallPolys::new(u, v, &third);
    let (num, den) = gamma_alpha_sq_fraction(v, &third);
    let on_gamma_poly = polys.compose_fraction(&num, &den);
    let d01 = d(0, 1, u, v);
    let xi = match nu_wall(u, v)? {
        NuWallKind::Wall(w) => Some(w.alpha_sq_poly()),
        _ => None,
    };
    let theta = theta_alpha_sq_poly(v).ok();

    let mut out = Vec::new();
    for r in real_roots(&cubic)? {
        let gamma_a = if sign_at_root(&cubic, &r, &den) != 0
            && sign_at_root(&cubic, &r, &(&num * &den)) > 0
            && sign_at_root(&cubic, &r, &on_gamma_poly) == 0
        {
            let a = match r.as_exact() {
                Some(x) => Interval::point(num.eval(x) / den.eval(x)),
                None => {
                    let iv = refine(&r, &cubic, &fine_tol()).interval();
                    num.eval_interval(&iv).div(&den.eval_interval(&iv)).unwrap_or_else(|| Interval::point(int(0)))
                }
            };
            Some(a)
        } else {
            None
        };
        let xi_a = match &xi {
            Some(x) if sign_at_root(&cubic, &r, x) > 0 && sign_at_root(&cubic, &r, &polys.compose_a(x)) == 0 => {
                Some(enclose_at(&cubic, &r, x))
            }
            _ => None,
        };
        let on_vertical_xi = d01.is_zero() && {
            let d02 = d(0, 2, u, v);
            !d02.is_zero() && cmp_root_rational(&cubic, &r, &(d(1, 2, u, v) / d02)) == Ordering::Equal
        };
        let theta_on_gamma = theta
            .as_ref()
            .is_some_and(|t| sign_at_root(&cubic, &r, &(&(t * &den) - &num)) == 0);
        let theta_on_xi = |x: &RationalPoly| theta.as_ref().is_some_and(|t| sign_at_root(&cubic, &r, &(t - x)) == 0);
        let same_point = match (&xi, gamma_a.is_some() && xi_a.is_some()) {
            (Some(x), true) => sign_at_root(&cubic, &r, &(&(x * &den) - &num)) == 0,
            _ => false,
        };
        let mut push = |kind, alpha_sq, on_theta| {
            out.push(HorizontalPoint {
                beta: r.clone(),
                beta_poly: cubic.clone(),
                alpha_sq,
                kind,
                on_theta,
            })
        };
        if let Some(g) = gamma_a {
            if on_vertical_xi {
                push(HorizontalKind::InflectionSpecial, g, theta_on_gamma);
                continue;
            }
            push(HorizontalKind::MaxOnGamma, g, theta_on_gamma);
        }
        if let (Some(x), Some(poly)) = (xi_a, &xi) {
            if !same_point {
                push(HorizontalKind::MinOnNuWall, x, theta_on_xi(poly));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SingularModel {
    ConeAxisNuWall,
    CuspNuGamma,
    SmoothTriple,
    ReducibleFamily,
}

impl SingularModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SingularModel::ConeAxisNuWall => "ConeAxisNuWall",
            SingularModel::CuspNuGamma => "CuspNuGamma",
            SingularModel::SmoothTriple => "SmoothTriple",
            SingularModel::ReducibleFamily => "ReducibleFamily",
        }
    }
}

/// A singular point of the surface `f_{u,v,s}(alpha, beta) = 0` in
/// `(alpha, beta, s)` space.
#[derive(Debug, Clone)]
pub struct SingularPoint {
    pub beta: IsolatedRoot,
    pub beta_poly: RationalPoly,
    /// `None` when the whole vertical line is singular.
    pub alpha_sq: Option<Interval>,
    /// `None` when the point is singular for every `s`.
    pub s: Option<Rational>,
    pub model: SingularModel,
}

pub fn classify_singularities(u: &ChernCharacter, v: &ChernCharacter) -> Result<Vec<SingularPoint>, WallError> {
    if v.rank().is_zero() {
        return Err(WallError::RankZero);
    }
    check_pair(u, v)?;
    let third = rat(1, 3);
    let ch3_v = twisted_polys(v)[3].clone();
    let mut out = Vec::new();

    let mut feet: Vec<(RationalPoly, IsolatedRoot)> = Vec::new();
    let mut xi_cross: Vec<(RationalPoly, IsolatedRoot, Interval)> = Vec::new();
    match nu_wall(u, v)? {
        NuWallKind::Wall(w) => {
            let (p, roots) = w.feet();
            feet.extend(roots.into_iter().map(|r| (p.clone(), r)));
            let a_xi = w.alpha_sq_poly();
            let g = gamma_poly_with(v, &third, &a_xi);
            if !g.is_zero() {
                for r in real_roots(&g)? {
                    if sign_at_root(&g, &r, &a_xi) > 0 {
                        let a = enclose_at(&g, &r, &a_xi);
                        xi_cross.push((g.clone(), r, a));
                    }
                }
            }
        }
        NuWallKind::Degenerate => {
            let d02 = d(0, 2, u, v);
            if !d02.is_zero() {
                let b = d(1, 2, u, v) / d02;
                feet.push((RationalPoly::linear_root(&b), IsolatedRoot::exact(b.clone(), 1)));
                if let Ok(Some(a)) = gamma_alpha_sq(v, &third, &b) {
                    if a.is_positive() {
                        xi_cross.push((RationalPoly::linear_root(&b), IsolatedRoot::exact(b, 1), Interval::point(a)));
                    }
                }
            }
        }
        NuWallKind::Empty => {}
    }
    for (p, r) in feet {
        let on_gamma = sign_at_root(&p, &r, &ch3_v) == 0;
        out.push(SingularPoint {
            beta: r,
            beta_poly: p,
            alpha_sq: Some(Interval::point(Rational::zero())),
            s: if on_gamma { Some(third.clone()) } else { None },
            model: if on_gamma {
                SingularModel::SmoothTriple
            } else {
                SingularModel::ConeAxisNuWall
            },
        });
    }
    for (p, r, a) in xi_cross {
        out.push(SingularPoint {
            beta: r,
            beta_poly: p,
            alpha_sq: Some(a),
            s: Some(third.clone()),
            model: SingularModel::CuspNuGamma,
        });
    }

    if let (Some(mu_u), Some(mu_v)) = (u.mu(), v.mu()) {
        if mu_u == mu_v {
            let tu = u.twist(&mu_u);
            let tv = v.twist(&mu_v);
            let (cu, cv) = (tu.components(), tv.components());
            let d20 = &cu[2] * &cv[0] - &cu[0] * &cv[2];
            if cu[3].is_zero() && cv[3].is_zero() && !d20.is_zero() {
                out.push(SingularPoint {
                    beta_poly: RationalPoly::linear_root(&mu_u),
                    beta: IsolatedRoot::exact(mu_u, 1),
                    alpha_sq: None,
                    s: None,
                    model: SingularModel::ReducibleFamily,
                });
            }
        }
    }
    Ok(out)
}

// ----------------------------------------------------------------------------
// Tracing

const LINK_K: f64 = 4.0;
const MAX_DEPTH: u32 = 2;
const SUBDIVISIONS: i64 = 10;

/// A traced point with exact coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceVertex {
    pub beta: Rational,
    pub alpha_sq: QuadraticSurd,
}

impl TraceVertex {
    pub fn beta_f64(&self) -> f64 {
        to_f64(&self.beta)
    }

    pub fn alpha_f64(&self) -> f64 {
        self.alpha_sq.to_f64().max(0.0).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceComponent {
    pub vertices: Vec<TraceVertex>,
    pub bounded: bool,
    pub closed: bool,
    /// The whole vertical segment over one grid column lies on the wall.
    pub vertical: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WallTrace {
    pub window: Window,
    pub step: Rational,
    pub components: Vec<TraceComponent>,
    /// Column pairs whose roots could not be linked or explained.
    pub unresolved_links: usize,
}

impl WallTrace {
    pub fn bounded_flags(&self) -> Vec<bool> {
        self.components.iter().map(|c| c.bounded).collect()
    }

    pub fn is_certified(&self) -> bool {
        self.unresolved_links == 0
    }
}

#[derive(Debug, Clone)]
struct ColumnRoot {
    a: QuadraticSurd,
    a_f: f64,
    slope: f64,
}

#[derive(Debug, Clone)]
struct Column {
    beta: Rational,
    full: bool,
    roots: Vec<ColumnRoot>,
    boundary: bool,
}

type Vertex = (usize, usize);

/// Exact roots of the section over `beta` with `0 < a <= amax`.
fn solve_column(polys: &WallPolys, beta: &Rational, amax: &Rational) -> Column {
    let sec = polys.section(beta);
    let mut col = Column {
        beta: beta.clone(),
        full: sec.is_zero(),
        roots: Vec::new(),
        boundary: false,
    };
    if col.full {
        return col;
    }
    let (c0, c1, c2) = (sec.coeff(0), sec.coeff(1), sec.coeff(2));
    let mut cands = Vec::new();
    if c2.is_zero() {
        if !c1.is_zero() {
            cands.push(QuadraticSurd::rational(-&c0 / &c1));
        }
    } else {
        let disc = &c1 * &c1 - int(4) * &c2 * &c0;
        if !disc.is_negative() {
            let den = int(2) * &c2;
            let base = -&c1 / &den;
            let b = den.recip();
            if disc.is_zero() {
                cands.push(QuadraticSurd::rational(base));
            } else {
                cands.push(QuadraticSurd::new(base.clone(), -&b, disc.clone()));
                cands.push(QuadraticSurd::new(base, b, disc));
            }
        }
    }
    let bf = to_f64(beta);
    for a in cands {
        if a.sign() <= 0 || a.cmp_rational(amax) == Ordering::Greater {
            continue;
        }
        let a = match a.as_rational() {
            Some(q) => QuadraticSurd::rational(q),
            None => a,
        };
        let a_f = a.to_f64();
        let (fb, fa) = polys.gradient_f64(bf, a_f);
        let slope = if fa.abs() > 1e-300 { (-fb / fa).clamp(-1e12, 1e12) } else { 1e12 };
        col.roots.push(ColumnRoot { a, a_f, slope });
    }
    col.roots.sort_by(|x, y| x.a_f.total_cmp(&y.a_f));
    col
}

/// Root set of an auxiliary polynomial, for counting events between columns.
struct EventRoots {
    poly: RationalPoly,
    roots: Vec<IsolatedRoot>,
    everywhere: bool,
}

impl EventRoots {
    fn new(poly: RationalPoly) -> Self {
        if poly.is_zero() {
            return EventRoots {
                poly,
                roots: Vec::new(),
                everywhere: true,
            };
        }
        let roots = real_roots(&poly).unwrap_or_default();
        EventRoots {
            poly,
            roots,
            everywhere: false,
        }
    }

    /// Roots in `[lo, hi]`, each with its multiplicity.
    fn in_range(&self, lo: &Rational, hi: &Rational) -> Vec<u32> {
        self.roots
            .iter()
            .filter(|r| r.hi >= *lo && r.lo <= *hi)
            .filter(|r| {
                cmp_root_rational(&self.poly, r, lo) != Ordering::Less
                    && cmp_root_rational(&self.poly, r, hi) != Ordering::Greater
            })
            .map(|r| r.multiplicity_hint)
            .collect()
    }
}

struct Tracer<'a> {
    polys: &'a WallPolys,
    amax: Rational,
    amax_f: f64,
    columns: Vec<Column>,
    edges: Vec<(Vertex, Vertex)>,
    top_exits: HashSet<Vertex>,
    unresolved: usize,
    bottom: EventRoots,
    top: EventRoots,
    folds: EventRoots,
}

impl<'a> Tracer<'a> {
    fn threshold(h: f64, r: &ColumnRoot) -> f64 {
        LINK_K * h * (1.0 + r.slope.abs())
    }

    fn push_column(&mut self, col: Column) -> usize {
        self.columns.push(col);
        self.columns.len() - 1
    }

    fn link(&mut self, ia: usize, ib: usize, depth: u32) {
        let (lo, hi) = (self.columns[ia].beta.clone(), self.columns[ib].beta.clone());
        let h = to_f64(&(&hi - &lo));
        if self.columns[ia].full || self.columns[ib].full {
            return;
        }
        let na = self.columns[ia].roots.len();
        let nb = self.columns[ib].roots.len();
        if na == 0 && nb == 0 {
            return;
        }

        let bottom = self.bottom.in_range(&lo, &hi);
        let mut excluded_a: HashSet<usize> = HashSet::new();
        let mut excluded_b: HashSet<usize> = HashSet::new();
        // Cone points on the axis: two rays meet at a = 0 and must not be joined.
        for _ in bottom.iter().filter(|m| **m >= 2 && **m % 2 == 0) {
            let pick = |col: &Column, ex: &HashSet<usize>| {
                col.roots
                    .iter()
                    .enumerate()
                    .find(|(i, r)| !ex.contains(i) && r.a_f <= 4.0 * Self::threshold(h, r))
                    .map(|(i, _)| i)
            };
            if let Some(i) = pick(&self.columns[ia], &excluded_a) {
                excluded_a.insert(i);
            }
            if let Some(i) = pick(&self.columns[ib], &excluded_b) {
                excluded_b.insert(i);
            }
        }

        let mut pairs = Vec::new();
        for (i, ra) in self.columns[ia].roots.iter().enumerate() {
            if excluded_a.contains(&i) {
                continue;
            }
            for (j, rb) in self.columns[ib].roots.iter().enumerate() {
                if excluded_b.contains(&j) {
                    continue;
                }
                let gap = (ra.a_f - rb.a_f).abs();
                let tol = Self::threshold(h, ra).max(Self::threshold(h, rb));
                if gap <= tol {
                    pairs.push((gap, i, j));
                }
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        let mut used_a = vec![false; na];
        let mut used_b = vec![false; nb];
        let mut new_edges = Vec::new();
        for (_, i, j) in pairs {
            if !used_a[i] && !used_b[j] {
                used_a[i] = true;
                used_b[j] = true;
                new_edges.push(((ia, i), (ib, j)));
            }
        }

        // Folds: two adjacent unmatched roots of one column meeting in between.
        let mut fold_budget = self.folds.in_range(&lo, &hi).len();
        let mut fold_edges = Vec::new();
        for (ci, used) in [(ia, &mut used_a), (ib, &mut used_b)] {
            let mut k = 0;
            while k + 1 < used.len() && fold_budget > 0 {
                if !used[k] && !used[k + 1] {
                    used[k] = true;
                    used[k + 1] = true;
                    fold_edges.push(((ci, k), (ci, k + 1)));
                    fold_budget -= 1;
                    k += 2;
                } else {
                    k += 1;
                }
            }
        }

        let mut loose: Vec<Vertex> = Vec::new();
        loose.extend((0..na).filter(|i| !used_a[*i]).map(|i| (ia, i)));
        loose.extend((0..nb).filter(|j| !used_b[*j]).map(|j| (ib, j)));
        let bottom_budget: u32 = bottom.iter().sum();
        let top_budget: u32 = self.top.in_range(&lo, &hi).iter().sum();
        let unlimited = self.bottom.everywhere || self.top.everywhere;

        if loose.len() as u32 <= bottom_budget + top_budget || unlimited {
            self.edges.extend(new_edges);
            self.edges.extend(fold_edges);
            let (mut b_left, mut t_left) = (bottom_budget, top_budget);
            loose.sort_by(|x, y| self.columns[x.0].roots[x.1].a_f.total_cmp(&self.columns[y.0].roots[y.1].a_f));
            for vtx in loose {
                let a_f = self.columns[vtx.0].roots[vtx.1].a_f;
                if (a_f <= self.amax_f / 2.0 && b_left > 0) || t_left == 0 {
                    b_left = b_left.saturating_sub(1);
                } else {
                    t_left -= 1;
                    self.top_exits.insert(vtx);
                }
            }
            return;
        }

        if depth < MAX_DEPTH {
            let sub = (&hi - &lo) / int(SUBDIVISIONS);
            let mut prev = ia;
            for i in 1..SUBDIVISIONS {
                let b = &lo + &sub * int(i);
                let col = solve_column(self.polys, &b, &self.amax);
                let idx = self.push_column(col);
                self.link(prev, idx, depth + 1);
                prev = idx;
            }
            self.link(prev, ib, depth + 1);
            return;
        }

        self.edges.extend(new_edges);
        self.edges.extend(fold_edges);
        self.unresolved += 1;
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Traces `f_{u,v,s} = 0` over the window by exact column solves on a
/// `beta` grid of the given step, linking neighbouring roots into components.
pub fn trace_wall(
    u: &ChernCharacter,
    v: &ChernCharacter,
    s: &Rational,
    window: &Window,
    step: &Rational,
) -> Result<WallTrace, WallError> {
    let polys = WallPolys::new(u, v, s);
    trace_polys(&polys, window, step)
}

pub fn trace_polys(polys: &WallPolys, window: &Window, step: &Rational) -> Result<WallTrace, WallError> {
    let grid = window.beta_grid(step)?;
    let amax = window.alpha_sq_max();
    let mut columns: Vec<Column> = grid.par_iter().map(|b| solve_column(polys, b, &amax)).collect();
    let last = columns.len() - 1;
    columns[0].boundary = true;
    columns[last].boundary = true;

    let mut tracer = Tracer {
        polys,
        amax_f: to_f64(&amax),
        top: EventRoots::new(polys.at_height(&amax)),
        bottom: EventRoots::new(polys.c0.clone()),
        folds: EventRoots::new(polys.discriminant()),
        amax,
        columns,
        edges: Vec::new(),
        top_exits: HashSet::new(),
        unresolved: 0,
    };
    for i in 0..last {
        tracer.link(i, i + 1, 0);
    }

    let mut index: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut verts: Vec<Vertex> = Vec::new();
    for (ci, col) in tracer.columns.iter().enumerate() {
        for ri in 0..col.roots.len() {
            index.insert((ci, ri), verts.len());
            verts.push((ci, ri));
        }
    }
    let mut uf = UnionFind::new(verts.len());
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); verts.len()];
    for (x, y) in &tracer.edges {
        let (a, b) = (index[x], index[y]);
        uf.union(a, b);
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..verts.len() {
        let r = uf.find(i);
        groups.entry(r).or_default().push(i);
    }

    let vertex_of = |i: usize| {
        let (ci, ri) = verts[i];
        TraceVertex {
            beta: tracer.columns[ci].beta.clone(),
            alpha_sq: tracer.columns[ci].roots[ri].a.clone(),
        }
    };
    let mut components = Vec::new();
    for members in groups.values() {
        let (order, closed) = walk(members, &adj);
        let bounded = members.iter().all(|&i| {
            let vtx = verts[i];
            !tracer.columns[vtx.0].boundary && !tracer.top_exits.contains(&vtx)
        });
        components.push(TraceComponent {
            vertices: order.into_iter().map(vertex_of).collect(),
            bounded,
            closed,
            vertical: false,
        });
    }
    for col in tracer.columns.iter().filter(|c| c.full) {
        let lowest = (step * step).min(tracer.amax.clone() / int(2));
        components.push(TraceComponent {
            vertices: vec![
                TraceVertex {
                    beta: col.beta.clone(),
                    alpha_sq: QuadraticSurd::rational(lowest),
                },
                TraceVertex {
                    beta: col.beta.clone(),
                    alpha_sq: QuadraticSurd::rational(tracer.amax.clone()),
                },
            ],
            bounded: false,
            closed: false,
            vertical: true,
        });
    }
    components.sort_by(|x, y| {
        let key = |c: &TraceComponent| {
            let v = &c.vertices[0];
            (v.beta.clone(), v.alpha_f64())
        };
        let (kx, ky) = (key(x), key(y));
        kx.0.cmp(&ky.0).then(kx.1.total_cmp(&ky.1))
    });
    Ok(WallTrace {
        window: window.clone(),
        step: step.clone(),
        components,
        unresolved_links: tracer.unresolved,
    })
}

/// Orders the members of a component along its edges, starting from an
/// endpoint when there is one.
fn walk(members: &[usize], adj: &[Vec<usize>]) -> (Vec<usize>, bool) {
    let start = members
        .iter()
        .copied()
        .find(|&i| adj[i].len() <= 1)
        .unwrap_or(members[0]);
    let closed = members.iter().all(|&i| adj[i].len() == 2) && members.len() > 2;
    let mut seen: HashSet<usize> = HashSet::new();
    let mut order = Vec::with_capacity(members.len());
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        if !seen.insert(x) {
            continue;
        }
        order.push(x);
        for &y in adj[x].iter().rev() {
            if !seen.contains(&y) {
                stack.push(y);
            }
        }
    }
    if closed {
        order.push(start);
    }
    (order, closed)
}

// ----------------------------------------------------------------------------
// Intersections of two walls

/// An approximate intersection point of two walls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallIntersection {
    pub alpha: f64,
    pub beta: f64,
}

pub fn walls_intersect(
    u: &ChernCharacter,
    u2: &ChernCharacter,
    v: &ChernCharacter,
    s: &Rational,
    window: &Window,
    step: &Rational,
    tol: f64,
) -> Result<Vec<WallIntersection>, WallError> {
    let c1 = classify_wall(u, v)?;
    let c2 = classify_wall(u2, v)?;
    if c1.canonical == c2.canonical {
        return Err(WallError::IdenticalWalls);
    }
    let d01 = d(0, 1, u, v);
    if d01.is_zero() && d(0, 1, u2, v).is_zero() {
        return Ok(Vec::new());
    }
    let amax = window.alpha_sq_max();
    let in_window = |b: f64, a: f64| {
        a > 0.0 && a <= to_f64(&amax) && b >= to_f64(&window.beta_min) && b <= to_f64(&window.beta_max)
    };
    let same_low = (0..3).all(|i| u.get(i) == u2.get(i));
    if !d01.is_zero() && same_low {
        let mut out = Vec::new();
        for t in wall_theta_crossings(u, v, s)? {
            let mid = refine(&t.beta, &t.beta_poly, &fine_tol()).midpoint();
            let b = to_f64(&mid);
            let a = to_f64(&t.alpha_sq.midpoint());
            if in_window(b, a) {
                out.push(WallIntersection { alpha: a.sqrt(), beta: b });
            }
        }
        return Ok(out);
    }

    let p1 = WallPolys::new(u, v, s);
    let p2 = WallPolys::new(u2, v, s);
    let trace = trace_polys(&p1, window, step)?;
    let mut out: Vec<WallIntersection> = Vec::new();
    let mut push = |pt: WallIntersection| {
        if !out.iter().any(|q| (q.alpha - pt.alpha).hypot(q.beta - pt.beta) < tol) {
            out.push(pt);
        }
    };
    for comp in trace.components.iter().filter(|c| !c.vertical) {
        let signs: Vec<i32> = comp.vertices.iter().map(|x| p2.eval_surd(&x.beta, &x.alpha_sq).sign()).collect();
        for (i, x) in comp.vertices.iter().enumerate() {
            if signs[i] == 0 {
                push(WallIntersection {
                    alpha: x.alpha_f64(),
                    beta: x.beta_f64(),
                });
            }
        }
        for i in 0..comp.vertices.len().saturating_sub(1) {
            if signs[i] * signs[i + 1] < 0 {
                push(bisect_crossing(&p1, &p2, &comp.vertices[i], &comp.vertices[i + 1], &amax, tol));
            }
        }
    }
    out.sort_by(|x, y| x.beta.total_cmp(&y.beta).then(x.alpha.total_cmp(&y.alpha)));
    Ok(out)
}

/// Bisection along wall 1 between two linked vertices on which wall 2's
/// function has opposite signs.
fn bisect_crossing(
    p1: &WallPolys,
    p2: &WallPolys,
    x: &TraceVertex,
    y: &TraceVertex,
    amax: &Rational,
    tol: f64,
) -> WallIntersection {
    let (mut bl, mut al) = (x.beta.clone(), x.alpha_sq.to_f64());
    let (mut br, mut ar) = (y.beta.clone(), y.alpha_sq.to_f64());
    let sl = p2.eval_surd(&x.beta, &x.alpha_sq).sign();
    if bl == br {
        let a = (al + ar) / 2.0;
        return WallIntersection {
            alpha: a.max(0.0).sqrt(),
            beta: to_f64(&bl),
        };
    }
    let target = (tol * 1e-3).max(1e-12);
    for _ in 0..60 {
        if to_f64(&(&br - &bl)).abs() < target {
            break;
        }
        let bm = (&bl + &br) / int(2);
        let guess = (al + ar) / 2.0;
        let col = solve_column(p1, &bm, amax);
        let Some(r) = col
            .roots
            .iter()
            .min_by(|p, q| (p.a_f - guess).abs().total_cmp(&(q.a_f - guess).abs()))
        else {
            break;
        };
        let sm = p2.eval_surd(&bm, &r.a).sign();
        if sm == 0 {
            return WallIntersection {
                alpha: r.a_f.sqrt(),
                beta: to_f64(&bm),
            };
        }
        if sm == sl {
            bl = bm;
            al = r.a_f;
        } else {
            br = bm;
            ar = r.a_f;
        }
    }
    WallIntersection {
        alpha: ((al + ar) / 2.0).max(0.0).sqrt(),
        beta: (to_f64(&bl) + to_f64(&br)) / 2.0,
    }
}

// ----------------------------------------------------------------------------
// Singular points of the wall curve for a solved value of s

/// Search box for critical points of `f` in `(alpha, beta)`; `s` is solved.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSearch {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub cells: usize,
}

impl Default for CriticalSearch {
    fn default() -> Self {
        CriticalSearch {
            alpha_min: 0.25,
            alpha_max: 10.0,
            beta_min: -10.0,
            beta_max: 10.0,
            cells: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub alpha: f64,
    pub beta: f64,
    pub s: f64,
    /// Largest of the three equations, each relative to the size of its terms.
    pub residual: f64,
}

fn tilt_f64(v: &[f64; 4], beta: f64, a: f64) -> [f64; 4] {
    let [v0, v1, v2, v3] = *v;
    let c1 = v1 - beta * v0;
    let c2 = v2 - beta * v1 + beta * beta * v0 / 2.0;
    let c3 = v3 - beta * v2 + beta * beta * v1 / 2.0 - beta * beta * beta * v0 / 6.0;
    [v0, c1, c2 - a * v0 / 2.0, c3 - a * c1 / 2.0]
}

struct SurfaceF64 {
    u: [f64; 4],
    v: [f64; 4],
}

impl SurfaceF64 {
    fn deltas(&self, alpha: f64, beta: f64) -> [[f64; 4]; 4] {
        let a = alpha * alpha;
        let cu = tilt_f64(&self.u, beta, a);
        let cv = tilt_f64(&self.v, beta, a);
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = cu[i] * cv[j] - cu[j] * cv[i];
            }
        }
        out
    }

    /// `k = s - 1/3` making `df/dbeta` vanish.
    fn k_at(&self, alpha: f64, beta: f64) -> Option<f64> {
        let dl = self.deltas(alpha, beta);
        let den = alpha * alpha * dl[2][0];
        if den.abs() < 1e-300 {
            None
        } else {
            Some(-dl[3][1] / den)
        }
    }

    /// `(f, (df/dalpha)/alpha)` with `k` eliminated.
    fn system(&self, alpha: f64, beta: f64) -> Option<[f64; 2]> {
        let k = self.k_at(alpha, beta)?;
        let dl = self.deltas(alpha, beta);
        let a = alpha * alpha;
        let f = dl[3][2] - a * k * dl[1][2];
        let g = (1.0 + 2.0 * k) * dl[2][1] - dl[3][0] + a * k * dl[1][0];
        Some([f, g])
    }

    fn newton(&self, mut alpha: f64, mut beta: f64) -> Option<(f64, f64)> {
        for _ in 0..80 {
            let g = self.system(alpha, beta)?;
            let ha = 1e-7 * (1.0 + alpha.abs());
            let hb = 1e-7 * (1.0 + beta.abs());
            let ga_p = self.system(alpha + ha, beta)?;
            let ga_m = self.system(alpha - ha, beta)?;
            let gb_p = self.system(alpha, beta + hb)?;
            let gb_m = self.system(alpha, beta - hb)?;
            let j11 = (ga_p[0] - ga_m[0]) / (2.0 * ha);
            let j21 = (ga_p[1] - ga_m[1]) / (2.0 * ha);
            let j12 = (gb_p[0] - gb_m[0]) / (2.0 * hb);
            let j22 = (gb_p[1] - gb_m[1]) / (2.0 * hb);
            let det = j11 * j22 - j12 * j21;
            if !det.is_finite() || det.abs() < 1e-300 {
                return None;
            }
            let da = (g[0] * j22 - g[1] * j12) / det;
            let db = (j11 * g[1] - j21 * g[0]) / det;
            let scale = 1.0f64.min(1.0 / (da.abs() + db.abs()).max(1e-300));
            alpha -= da * scale;
            beta -= db * scale;
            if !alpha.is_finite() || !beta.is_finite() || alpha <= 0.0 {
                return None;
            }
            if da.abs() + db.abs() < 1e-13 * (1.0 + alpha.abs() + beta.abs()) {
                return Some((alpha, beta));
            }
        }
        None
    }

    fn residual(&self, alpha: f64, beta: f64, k: f64) -> f64 {
        let a = alpha * alpha;
        let cu = tilt_f64(&self.u, beta, a);
        let cv = tilt_f64(&self.v, beta, a);
        let rel = |x: f64, terms: f64| x.abs() / terms.max(1e-300);
        let dl = self.deltas(alpha, beta);
        let t = |i: usize, j: usize| (cu[i] * cv[j]).abs() + (cu[j] * cv[i]).abs();
        let f = dl[3][2] - a * k * dl[1][2];
        let g = (1.0 + 2.0 * k) * dl[2][1] - dl[3][0] + a * k * dl[1][0];
        let hb = -dl[3][1] - a * k * dl[2][0];
        rel(f, t(3, 2) + (a * k).abs() * t(1, 2))
            .max(rel(g, (1.0 + 2.0 * k).abs() * t(2, 1) + t(3, 0) + (a * k).abs() * t(1, 0)))
            .max(rel(hb, t(3, 1) + (a * k).abs() * t(2, 0)))
    }
}

/// Points `(alpha, beta, s)` with `alpha > 0` and `s > 0` where `f` and both
/// partial derivatives in `alpha` and `beta` vanish: singular points of the
/// wall `Upsilon_{u,v,s}` for that `s`, such as isolated points. Found by
/// Newton iteration from a grid, with `s` eliminated through `df/dbeta = 0`.
pub fn surface_critical_points(u: &ChernCharacter, v: &ChernCharacter, search: &CriticalSearch) -> Vec<CriticalPoint> {
    let conv = |w: &ChernCharacter| {
        let c = w.components();
        [to_f64(&c[0]), to_f64(&c[1]), to_f64(&c[2]), to_f64(&c[3])]
    };
    let surf = SurfaceF64 { u: conv(u), v: conv(v) };
    let n = search.cells.max(1);
    let starts: Vec<(f64, f64)> = (0..=n)
        .flat_map(|i| (0..=2 * n).map(move |j| (i, j)))
        .map(|(i, j)| {
            let al = search.alpha_min + (search.alpha_max - search.alpha_min) * i as f64 / n as f64;
            let be = search.beta_min + (search.beta_max - search.beta_min) * j as f64 / (2 * n) as f64;
            (al, be)
        })
        .collect();
    let found: Vec<CriticalPoint> = starts
        .par_iter()
        .filter_map(|&(al, be)| {
            let (alpha, beta) = surf.newton(al, be)?;
            let k = surf.k_at(alpha, beta)?;
            let s = k + 1.0 / 3.0;
            let residual = surf.residual(alpha, beta, k);
            let inside = alpha <= search.alpha_max * 1.5 && beta >= search.beta_min - 1.0 && beta <= search.beta_max + 1.0;
            (s > 0.0 && residual < 1e-6 && inside).then_some(CriticalPoint { alpha, beta, s, residual })
        })
        .collect();
    let mut out: Vec<CriticalPoint> = Vec::new();
    for p in found {
        if !out
            .iter()
            .any(|q| (q.alpha - p.alpha).abs() + (q.beta - p.beta).abs() + (q.s - p.s).abs() < 1e-6)
        {
            out.push(p);
        }
    }
    out.sort_by(|x, y| x.beta.total_cmp(&y.beta).then(x.alpha.total_cmp(&y.alpha)));
    out
}

// ----------------------------------------------------------------------------
// Dossier

/// Everything the library knows about one numerical wall.
#[derive(Debug, Clone)]
pub struct WallDossier {
    pub u: ChernCharacter,
    pub v: ChernCharacter,
    pub s: Rational,
    pub class: WallClass,
    pub nu_wall: NuWallKind,
    pub asymptote: Option<Rational>,
    pub theta_crossings: Vec<ThetaCrossing>,
    pub gamma_crossings: Vec<GammaCrossing>,
    pub horizontal_points: Vec<HorizontalPoint>,
    pub singular_points: Vec<SingularPoint>,
    pub trace: Option<WallTrace>,
}

impl WallDossier {
    /// Assembles the dossier; the trace is computed when a window is given.
    pub fn build(
        u: &ChernCharacter,
        v: &ChernCharacter,
        s: &Rational,
        trace: Option<(&Window, &Rational)>,
    ) -> Result<Self, WallError> {
        let class = classify_wall(u, v)?;
        let asymptote = unbounded_asymptote(u, v, s).ok();
        let trace = match trace {
            Some((w, h)) => Some(trace_wall(u, v, s, w, h)?),
            None => None,
        };
        Ok(WallDossier {
            u: u.clone(),
            v: v.clone(),
            s: s.clone(),
            class,
            nu_wall: nu_wall(u, v)?,
            asymptote,
            theta_crossings: wall_theta_crossings(u, v, s)?,
            gamma_crossings: wall_gamma_crossings(u, v, s)?,
            horizontal_points: horizontal_points(u, v)?,
            singular_points: classify_singularities(u, v)?,
            trace,
        })
    }
}
