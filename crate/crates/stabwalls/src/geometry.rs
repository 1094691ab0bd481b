//! Slope functions, the hyperbola `Theta_v`, the curve `Gamma_{v,s}` with its
//! branches, and the region decomposition of the upper half plane.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::chern::{int, rat, to_f64, ChernCharacter, HalfPlanePoint, Rational, SPoint};
use crate::exactpoly::{
    cmp_root_rational, real_roots, refine, sign, sign_at_root, Interval, IsolatedRoot, PolyError,
    RationalPoly,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeometryError {
    RegionUndefined,
    ParametrizationUndefined,
    RankZero,
    NegativeDiscriminant,
    EmptyWindow,
    Poly(PolyError),
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::RegionUndefined => {
                write!(f, "region decomposition undefined (needs nonzero rank and Q^tilt >= 0)")
            }
            GeometryError::ParametrizationUndefined => {
                write!(f, "parametrization undefined on the vertical line beta = mu")
            }
            GeometryError::RankZero => write!(f, "operation needs a character of nonzero rank"),
            GeometryError::NegativeDiscriminant => write!(f, "Q^tilt is negative"),
            GeometryError::EmptyWindow => write!(f, "window or step is empty"),
            GeometryError::Poly(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for GeometryError {}

impl From<PolyError> for GeometryError {
    fn from(e: PolyError) -> Self {
        GeometryError::Poly(e)
    }
}

/// A slope value; `Infinity` sorts above every rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slope {
    Finite(Rational),
    Infinity,
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Slope::Infinity, Slope::Infinity) => Ordering::Equal,
            (Slope::Infinity, _) => Ordering::Greater,
            (_, Slope::Infinity) => Ordering::Less,
            (Slope::Finite(a), Slope::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(q) => write!(f, "{q}"),
            Slope::Infinity => write!(f, "inf"),
        }
    }
}

/// Rectangle `beta_min <= beta <= beta_max`, `0 < alpha <= alpha_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub beta_min: Rational,
    pub beta_max: Rational,
    pub alpha_max: Rational,
}

impl Window {
    pub fn new(beta_min: Rational, beta_max: Rational, alpha_max: Rational) -> Result<Self, GeometryError> {
        if beta_min >= beta_max || !alpha_max.is_positive() {
            return Err(GeometryError::EmptyWindow);
        }
        Ok(Window {
            beta_min,
            beta_max,
            alpha_max,
        })
    }

    pub fn alpha_sq_max(&self) -> Rational {
        &self.alpha_max * &self.alpha_max
    }

    /// Grid `beta_min, beta_min + step, ...` up to and including `beta_max`
    /// when it falls on the grid.
    pub fn beta_grid(&self, step: &Rational) -> Result<Vec<Rational>, GeometryError> {
        if !step.is_positive() {
            return Err(GeometryError::EmptyWindow);
        }
        let mut out = Vec::new();
        let mut b = self.beta_min.clone();
        while b <= self.beta_max {
            out.push(b.clone());
            b += step;
        }
        Ok(out)
    }
}

/// The region of the upper half plane cut out by `Theta_v` and `Mu_v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    RMinus,
    RZeroMinus,
    RZeroPlus,
    RPlus,
    OnThetaLeft,
    OnThetaRight,
    OnMu,
}

/// The three principal regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrincipalRegion {
    Minus,
    Zero,
    Plus,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::RMinus => "R_minus",
            Region::RZeroMinus => "R_zero_minus",
            Region::RZeroPlus => "R_zero_plus",
            Region::RPlus => "R_plus",
            Region::OnThetaLeft => "On_Theta_left",
            Region::OnThetaRight => "On_Theta_right",
            Region::OnMu => "On_Mu",
        }
    }

    /// The principal region owning this tag. The middle and right regions
    /// own the branch of the hyperbola on their left, and the vertical line
    /// belongs to the middle region.
    pub fn principal(&self) -> PrincipalRegion {
        match self {
            Region::RMinus => PrincipalRegion::Minus,
            Region::RZeroMinus | Region::RZeroPlus | Region::OnThetaLeft | Region::OnMu => {
                PrincipalRegion::Zero
            }
            Region::RPlus | Region::OnThetaRight => PrincipalRegion::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GammaBranch {
    Minus,
    Zero,
    Plus,
}

impl GammaBranch {
    pub fn as_str(&self) -> &'static str {
        match self {
            GammaBranch::Minus => "minus",
            GammaBranch::Zero => "zero",
            GammaBranch::Plus => "plus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ThetaBranch {
    Left,
    Right,
}

impl ThetaBranch {
    pub fn as_str(&self) -> &'static str {
        match self {
            ThetaBranch::Left => "left",
            ThetaBranch::Right => "right",
        }
    }
}

/// The twisted entries `ch_i^beta(v)` as polynomials in `beta`.
pub fn twisted_polys(v: &ChernCharacter) -> [RationalPoly; 4] {
    let [v0, v1, v2, v3] = v.components();
    [
        RationalPoly::constant(v0.clone()),
        RationalPoly::new(vec![v1.clone(), -v0]),
        RationalPoly::new(vec![v2.clone(), -v1, v0 * rat(1, 2)]),
        RationalPoly::new(vec![v3.clone(), -v2, v1 * rat(1, 2), -v0 * rat(1, 6)]),
    ]
}

/// `rho_v = v2 - v1 beta + v0 (beta^2 - a)/2`, the numerator of the nu-slope.
pub fn rho(v: &ChernCharacter, p: &HalfPlanePoint) -> Rational {
    v.tilt(p)[2].clone()
}

/// `tau_{v,s}` at a point, allowing any `s` including zero.
pub fn tau_at(v: &ChernCharacter, p: &HalfPlanePoint, s: &Rational) -> Rational {
    let t = v.twist(p.beta());
    &t.components()[3] - (s + rat(1, 6)) * p.alpha_sq() * &t.components()[1]
}

/// Numerator `tau_{v,s}` of the lambda-slope.
pub fn tau(v: &ChernCharacter, sp: &SPoint) -> Rational {
    tau_at(v, &sp.point, sp.s())
}

pub fn nu_slope(v: &ChernCharacter, p: &HalfPlanePoint) -> Slope {
    let c1 = v.twist(p.beta()).components()[1].clone();
    if c1.is_zero() {
        Slope::Infinity
    } else {
        Slope::Finite(rho(v, p) / c1)
    }
}

pub fn lambda_slope(v: &ChernCharacter, sp: &SPoint) -> Slope {
    let r = rho(v, &sp.point);
    if r.is_zero() {
        Slope::Infinity
    } else {
        Slope::Finite(tau(v, sp) / r)
    }
}

/// `alpha^2` on `Theta_v` above `beta`: `(beta - mu)^2 - Q^tilt / v0^2`.
pub fn theta_alpha_sq_poly(v: &ChernCharacter) -> Result<RationalPoly, GeometryError> {
    let mu = v.mu().ok_or(GeometryError::RankZero)?;
    let v0 = v.rank();
    let shift = RationalPoly::linear_root(&mu);
    Ok(&(&shift * &shift) - &RationalPoly::constant(v.q_tilt() / (v0 * v0)))
}

pub fn region_of(v: &ChernCharacter, p: &HalfPlanePoint) -> Result<Region, GeometryError> {
    let mu = v.mu().ok_or(GeometryError::RegionUndefined)?;
    if v.q_tilt().is_negative() {
        return Err(GeometryError::RegionUndefined);
    }
    let side = p.beta().cmp(&mu);
    if side == Ordering::Equal {
        return Ok(Region::OnMu);
    }
    let outside = sign(&rho(v, p)) * sign(v.rank());
    let left = side == Ordering::Less;
    Ok(match (outside, left) {
        (0, true) => Region::OnThetaLeft,
        (0, false) => Region::OnThetaRight,
        (1, true) => Region::RMinus,
        (1, false) => Region::RPlus,
        (_, true) => Region::RZeroMinus,
        (_, false) => Region::RZeroPlus,
    })
}

/// `-6 tau_{v,s}` with `a` replaced by a polynomial in `beta`.
pub(crate) fn gamma_poly_with(v: &ChernCharacter, s: &Rational, a: &RationalPoly) -> RationalPoly {
    let [v0, v1, v2, v3] = v.components();
    let cubic = RationalPoly::new(vec![-v3 * int(6), v2 * int(6), -v1 * int(3), v0.clone()]);
    let lin = RationalPoly::new(vec![-v1, v0.clone()]);
    let k = s * int(6) + int(1);
    &cubic - &(a * &lin).scale(&k)
}

/// Cubic in `beta` whose roots are the points of `Gamma_{v,s}` at height `a`.
pub fn gamma_beta_poly(v: &ChernCharacter, s: &Rational, a: &Rational) -> RationalPoly {
    gamma_poly_with(v, s, &RationalPoly::constant(a.clone()))
}

/// The `a` with `(beta, a)` on `Gamma_{v,s}`; `None` when it is negative.
pub fn gamma_alpha_sq(v: &ChernCharacter, s: &Rational, beta: &Rational) -> Result<Option<Rational>, GeometryError> {
    let t = v.twist(beta);
    let c1 = &t.components()[1];
    if c1.is_zero() {
        return Err(GeometryError::ParametrizationUndefined);
    }
    let a = &t.components()[3] / ((s + rat(1, 6)) * c1);
    Ok(if a.is_negative() { None } else { Some(a) })
}

/// Numerator and denominator of [`gamma_alpha_sq`] as polynomials in `beta`.
pub fn gamma_alpha_sq_fraction(v: &ChernCharacter, s: &Rational) -> (RationalPoly, RationalPoly) {
    let t = twisted_polys(v);
    (t[3].clone(), t[1].scale(&(s + rat(1, 6))))
}

/// Discriminant-type invariant of the Gamma cubic at height `a`; its sign
/// gives the number of real roots and at `a = 0` it equals `27 q(v)`.
pub fn gamma_discriminant(v: &ChernCharacter, s: &Rational, a: &Rational) -> Rational {
    let v0 = v.rank();
    let k = s * int(6) + int(1);
    let qt = v.q_tilt();
    let v0sq = v0 * v0;
    a * a * a * &v0sq * &v0sq * &k * &k * &k + int(9) * a * a * &v0sq * &k * &k * &qt
        + int(27) * a * &k * &qt * &qt
        + int(27) * v.q_quartic()
}

/// The same invariant as a cubic polynomial in `a`.
pub fn gamma_discriminant_poly(v: &ChernCharacter, s: &Rational) -> RationalPoly {
    let v0 = v.rank();
    let k = s * int(6) + int(1);
    let qt = v.q_tilt();
    let v0sq = v0 * v0;
    RationalPoly::new(vec![
        int(27) * v.q_quartic(),
        int(27) * &k * &qt * &qt,
        int(9) * &v0sq * &k * &k * &qt,
        &v0sq * &v0sq * &k * &k * &k,
    ])
}

/// Height above which the Gamma cubic has three distinct real roots: the
/// largest non-negative root of the discriminant cubic, or `None` when the
/// discriminant is positive for every `a >= 0`.
pub fn gamma_three_root_threshold(v: &ChernCharacter, s: &Rational) -> Option<IsolatedRoot> {
    let p = gamma_discriminant_poly(v, s);
    if p.is_zero() {
        return None;
    }
    let roots = real_roots(&p).ok()?;
    roots
        .into_iter()
        .rfind(|r| cmp_root_rational(&p, r, &Rational::zero()) != Ordering::Less)
}

/// Points of `Gamma_{v,s}` at height `a`, labelled by branch. With three
/// real roots they are minus, zero, plus from left to right; with a single
/// root the label is the side of `mu(v)`, since the two branches that merge
/// are always adjacent. A double root is labelled zero.
pub fn gamma_branches_at(
    v: &ChernCharacter,
    s: &Rational,
    a: &Rational,
) -> Result<Vec<(GammaBranch, IsolatedRoot)>, GeometryError> {
    let p = gamma_beta_poly(v, s, a);
    if p.is_zero() {
        return Ok(Vec::new());
    }
    let roots = real_roots(&p)?;
    let mu = v.mu();
    let side = |r: &IsolatedRoot| match &mu {
        Some(m) => match cmp_root_rational(&p, r, m) {
            Ordering::Less => GammaBranch::Minus,
            Ordering::Greater => GammaBranch::Plus,
            Ordering::Equal => GammaBranch::Zero,
        },
        None => GammaBranch::Zero,
    };
    let labels: Vec<GammaBranch> = match roots.len() {
        3 => vec![GammaBranch::Minus, GammaBranch::Zero, GammaBranch::Plus],
        1 => vec![side(&roots[0])],
        2 if mu.is_none() => vec![GammaBranch::Minus, GammaBranch::Plus],
        2 => {
            if roots[0].multiplicity_hint >= 2 {
                vec![GammaBranch::Zero, GammaBranch::Plus]
            } else {
                vec![GammaBranch::Minus, GammaBranch::Zero]
            }
        }
        _ => roots.iter().map(side).collect(),
    };
    Ok(labels.into_iter().zip(roots).collect())
}

/// Branch of a rational point known to lie on `Gamma_{v,s}`.
pub fn gamma_branch_of(v: &ChernCharacter, s: &Rational, beta: &Rational, a: &Rational) -> Option<GammaBranch> {
    let p = gamma_beta_poly(v, s, a);
    gamma_branches_at(v, s, a)
        .ok()?
        .into_iter()
        .find(|(_, r)| cmp_root_rational(&p, r, beta) == Ordering::Equal)
        .map(|(b, _)| b)
}

/// An intersection point of `Gamma_{v,s}` with `Theta_v`.
#[derive(Debug, Clone)]
pub struct ThetaGammaPoint {
    pub branch: ThetaBranch,
    pub beta: IsolatedRoot,
    /// Polynomial in `beta` whose root is isolated by `beta`.
    pub beta_poly: RationalPoly,
    /// `alpha^2` along the hyperbola as a polynomial in `beta`.
    pub alpha_sq_poly: RationalPoly,
    /// Enclosure of `alpha^2` at the point.
    pub alpha_sq: Interval,
}

impl ThetaGammaPoint {
    /// Approximate `(alpha, beta)` after refining to width `tol`.
    pub fn approx(&self, tol: &Rational) -> (f64, f64) {
        let mid = refine(&self.beta, &self.beta_poly, tol).midpoint();
        let a = self.alpha_sq_poly.eval(&mid);
        (to_f64(&a).max(0.0).sqrt(), to_f64(&mid))
    }
}

/// Solves `rho_v = tau_{v,s} = 0` by substituting the hyperbola into `tau`.
pub fn gamma_theta_intersections(v: &ChernCharacter, s: &Rational) -> Result<Vec<ThetaGammaPoint>, GeometryError> {
    let mu = v.mu().ok_or(GeometryError::RankZero)?;
    if v.q_tilt().is_negative() {
        return Err(GeometryError::NegativeDiscriminant);
    }
    let a_poly = theta_alpha_sq_poly(v)?;
    let p = gamma_poly_with(v, s, &a_poly);
    if p.is_zero() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for r in real_roots(&p)? {
        if sign_at_root(&p, &r, &a_poly) <= 0 {
            continue;
        }
        let branch = match cmp_root_rational(&p, &r, &mu) {
            Ordering::Less => ThetaBranch::Left,
            _ => ThetaBranch::Right,
        };
        let fine = refine(&r, &p, &rat(1, 1 << 40));
        let alpha_sq = a_poly.eval_interval(&fine.interval());
        out.push(ThetaGammaPoint {
            branch,
            beta: fine,
            beta_poly: p.clone(),
            alpha_sq_poly: a_poly.clone(),
            alpha_sq,
        });
    }
    Ok(out)
}

/// Numerator of the lambda-slope of `u` restricted to `Gamma_{v,s}`:
/// `d01 b^3 - 3 d02 b^2 + 3 (d03 + d12) b - 3 d13` with `dij = delta_ij(u, v)`.
pub fn lambda_bar_numerator(u: &ChernCharacter, v: &ChernCharacter) -> RationalPoly {
    let d = |i, j| crate::chern::delta_unchecked(i, j, u, v);
    RationalPoly::new(vec![
        d(1, 3) * int(-3),
        (d(0, 3) + d(1, 2)) * int(3),
        d(0, 2) * int(-3),
        d(0, 1),
    ])
}

/// One sampled point of a curve, with `alpha = sqrt(a)` as a float.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    pub beta: f64,
    pub alpha: f64,
    pub label: &'static str,
    /// True when `beta` and `a` are exact rationals at this sample.
    pub exact: bool,
}

fn alpha_grid(window: &Window, step: &Rational) -> Vec<Rational> {
    let mut out = Vec::new();
    let mut al = step.clone();
    while al <= window.alpha_max {
        out.push(&al * &al);
        al += step;
    }
    out
}

fn finish_samples(mut out: Vec<CurveSample>) -> Vec<CurveSample> {
    out.sort_by(|x, y| {
        x.label
            .cmp(y.label)
            .then(x.beta.total_cmp(&y.beta))
            .then(x.alpha.total_cmp(&y.alpha))
    });
    out.dedup_by(|x, y| x.label == y.label && (x.beta - y.beta).abs() < 1e-12 && (x.alpha - y.alpha).abs() < 1e-12);
    out
}

/// Samples of `Gamma_{v,s}` inside the window: the exact parametrization over
/// the `beta` grid plus root isolation over an `alpha` grid.
pub fn sample_gamma(v: &ChernCharacter, s: &Rational, window: &Window, step: &Rational) -> Result<Vec<CurveSample>, GeometryError> {
    let amax = window.alpha_sq_max();
    let mut out = Vec::new();
    for beta in window.beta_grid(step)? {
        let a = match gamma_alpha_sq(v, s, &beta) {
            Ok(Some(a)) if a.is_positive() && a <= amax => a,
            _ => continue,
        };
        if let Some(branch) = gamma_branch_of(v, s, &beta, &a) {
            out.push(CurveSample {
                beta: to_f64(&beta),
                alpha: to_f64(&a).sqrt(),
                label: branch.as_str(),
                exact: true,
            });
        }
    }
    let bmin = to_f64(&window.beta_min);
    let bmax = to_f64(&window.beta_max);
    for a in alpha_grid(window, step) {
        let p = gamma_beta_poly(v, s, &a);
        for (branch, r) in gamma_branches_at(v, s, &a)? {
            let r = refine(&r, &p, &rat(1, 1 << 30));
            let b = r.approx();
            if b < bmin || b > bmax {
                continue;
            }
            out.push(CurveSample {
                beta: b,
                alpha: to_f64(&a).sqrt(),
                label: branch.as_str(),
                exact: r.as_exact().is_some(),
            });
        }
    }
    Ok(finish_samples(out))
}

/// Samples of `Theta_v` inside the window.
pub fn sample_theta(v: &ChernCharacter, window: &Window, step: &Rational) -> Result<Vec<CurveSample>, GeometryError> {
    let mu = v.mu().ok_or(GeometryError::RankZero)?;
    let v0 = v.rank();
    let c = v.q_tilt() / (v0 * v0);
    if c.is_negative() {
        return Err(GeometryError::NegativeDiscriminant);
    }
    let a_poly = theta_alpha_sq_poly(v)?;
    let amax = window.alpha_sq_max();
    let mut out = Vec::new();
    for beta in window.beta_grid(step)? {
        let a = a_poly.eval(&beta);
        if a.is_positive() && a <= amax {
            let label = if beta < mu { ThetaBranch::Left } else { ThetaBranch::Right };
            out.push(CurveSample {
                beta: to_f64(&beta),
                alpha: to_f64(&a).sqrt(),
                label: label.as_str(),
                exact: true,
            });
        }
    }
    let (bmin, bmax) = (to_f64(&window.beta_min), to_f64(&window.beta_max));
    let muf = to_f64(&mu);
    for a in alpha_grid(window, step) {
        let half = to_f64(&(&a + &c)).sqrt();
        for (label, b) in [(ThetaBranch::Left, muf - half), (ThetaBranch::Right, muf + half)] {
            if b >= bmin && b <= bmax {
                out.push(CurveSample {
                    beta: b,
                    alpha: to_f64(&a).sqrt(),
                    label: label.as_str(),
                    exact: false,
                });
            }
        }
    }
    Ok(finish_samples(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::cubic_discriminant;
    use proptest::prelude::*;

    fn ch(s: &str) -> ChernCharacter {
        s.parse().unwrap()
    }

    fn pt(beta: Rational, a: Rational) -> HalfPlanePoint {
        HalfPlanePoint::new(beta, a).unwrap()
    }

    fn sp(beta: Rational, a: Rational, s: Rational) -> SPoint {
        SPoint::new(pt(beta, a), s).unwrap()
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&ch("1,0,-1,1"), &pt(rat(-3, 2), rat(1, 4))), int(0));
        assert_eq!(rho(&ch("2,0,-1,0"), &pt(int(-2), rat(1, 3))), rat(8, 3));
        assert_eq!(rho(&ch("0,0,5,9"), &pt(rat(7, 3), rat(2, 9))), int(5));
    }

    #[test]
    fn tau_examples() {
        let v = ch("1,0,-1,1");
        for s in [rat(1, 6), rat(1, 3), int(1)] {
            let a = (int(6) * &s + int(1)).recip();
            assert_eq!(tau(&v, &sp(int(-2), a, s)), int(0));
        }
        assert_eq!(tau(&ch("3,0,-5,0"), &sp(int(0), rat(7, 2), rat(2, 3))), int(0));
        assert_eq!(tau_at(&ch("3,1,4,1/6"), &pt(int(0), int(0)), &rat(1, 3)), rat(1, 6));
    }

    #[test]
    fn tau_matches_tilt_form() {
        let v = ch("2,-1,-5/2,1/3");
        let p = pt(rat(-5, 4), rat(3, 7));
        let s = rat(2, 5);
        let t = v.tilt(&p);
        let c1 = v.twist(p.beta()).components()[1].clone();
        assert_eq!(tau_at(&v, &p, &s), &t[3] - p.alpha_sq() * (&s - rat(1, 3)) * c1);
    }

    #[test]
    fn slope_examples() {
        assert_eq!(
            nu_slope(&ch("1,-1,1/2,-1/6"), &pt(rat(-3, 2), rat(1, 4))),
            Slope::Finite(int(0))
        );
        assert_eq!(nu_slope(&ch("0,0,1,0"), &pt(int(3), int(1))), Slope::Infinity);
        assert_eq!(nu_slope(&ch("1,0,0,0"), &pt(int(-1), int(1))), Slope::Finite(int(0)));
        let v = ch("1,0,-1,1");
        assert_eq!(lambda_slope(&v, &sp(int(-2), rat(1, 3), rat(1, 3))), Slope::Finite(int(0)));
        assert_eq!(lambda_slope(&v, &sp(rat(-3, 2), rat(1, 4), rat(1, 3))), Slope::Infinity);
        assert_eq!(lambda_slope(&ch("0,0,0,1"), &sp(int(2), int(1), int(1))), Slope::Infinity);
        assert!(Slope::Infinity > Slope::Finite(int(1_000_000)));
    }

    #[test]
    fn region_examples() {
        let v = ch("1,0,-1,1");
        assert_eq!(region_of(&v, &pt(int(-3), int(1))).unwrap(), Region::RMinus);
        assert_eq!(region_of(&v, &pt(int(0), int(1))).unwrap(), Region::OnMu);
        assert_eq!(region_of(&v, &pt(rat(-3, 2), rat(1, 4))).unwrap(), Region::OnThetaLeft);
        assert_eq!(Region::OnThetaLeft.principal(), PrincipalRegion::Zero);
        assert_eq!(region_of(&v, &pt(int(-1), int(1))).unwrap(), Region::RZeroMinus);
        assert_eq!(region_of(&v, &pt(int(3), int(1))).unwrap(), Region::RPlus);
        assert!(region_of(&ch("0,1,0,0"), &pt(int(0), int(1))).is_err());
        assert!(region_of(&ch("1,0,1,0"), &pt(int(0), int(1))).is_err());
    }

    #[test]
    fn gamma_poly_examples() {
        // (m, 0, -n, 0): roots 0 and beta^2 = (6s+1) a + 6n/m
        let v = ch("2,0,-3,0");
        let s = rat(1, 3);
        let a = int(1);
        let roots = real_roots(&gamma_beta_poly(&v, &s, &a)).unwrap();
        assert_eq!(roots.len(), 3);
        assert_eq!(roots[1].as_exact(), Some(&int(0)));
        let b2 = (int(6) * &s + int(1)) * &a + int(9);
        let top = refine(&roots[2], &gamma_beta_poly(&v, &s, &a), &rat(1, 1 << 30));
        assert!((top.approx().powi(2) - to_f64(&b2)).abs() < 1e-6);
        let p = gamma_beta_poly(&ch("1,0,-1,1"), &s, &rat(1, 3));
        assert!(p.eval(&int(-2)).is_zero());
        let p = gamma_beta_poly(&ch("1,0,0,-1"), &rat(5, 7), &int(0));
        let r = real_roots(&p).unwrap();
        assert_eq!(r.len(), 1);
        let r = refine(&r[0], &p, &rat(1, 1 << 30));
        assert!((r.approx() + 6f64.cbrt()).abs() < 1e-6);
    }

    #[test]
    fn gamma_alpha_sq_examples() {
        let s = rat(1, 3);
        assert_eq!(gamma_alpha_sq(&ch("1,0,-1,1"), &s, &int(-2)).unwrap(), Some(rat(1, 3)));
        assert_eq!(gamma_alpha_sq(&ch("1,0,0,-1"), &s, &int(-2)).unwrap(), Some(rat(1, 3)));
        assert_eq!(gamma_alpha_sq(&ch("1,0,-1,1"), &s, &int(-1)).unwrap(), Some(rat(1, 3)));
        assert_eq!(
            gamma_alpha_sq(&ch("1,0,-1,1"), &s, &int(0)),
            Err(GeometryError::ParametrizationUndefined)
        );
    }

    #[test]
    fn gamma_discriminant_examples() {
        let s = rat(1, 3);
        assert!(gamma_discriminant(&ch("1,0,-1,1"), &s, &int(0)).is_negative());
        assert!(gamma_discriminant(&ch("2,0,-1,0"), &s, &int(0)).is_positive());
        let v = ch("3,4,2,2/3");
        assert_eq!(gamma_discriminant(&v, &s, &int(0)), int(27) * v.q_quartic());
    }

    #[test]
    fn theta_gamma_examples() {
        let s = rat(1, 3);
        let pts = gamma_theta_intersections(&ch("1,0,-1,1"), &s).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].branch, ThetaBranch::Left);
        assert!((pts[0].beta.approx() + 3f64.cbrt()).abs() < 1e-9);
        let pts = gamma_theta_intersections(&ch("3,4,2,2/3"), &s).unwrap();
        let left: Vec<_> = pts.iter().filter(|p| p.branch == ThetaBranch::Left).collect();
        assert_eq!(left.len(), 1);
        let (al, be) = left[0].approx(&rat(1, 1 << 30));
        assert!((al - 0.27).abs() < 0.01 && (be - 0.62).abs() < 0.01, "{al} {be}");
        let pts = gamma_theta_intersections(&ch("2,0,-1,0"), &s).unwrap();
        assert!(pts.iter().all(|p| p.branch != ThetaBranch::Left));
    }

    #[test]
    fn lambda_bar_examples() {
        let u = ch("1,-1,1/2,-1/6");
        let v = ch("1,0,-1,1");
        let p = lambda_bar_numerator(&u, &v);
        assert_eq!(p, RationalPoly::new(vec![int(3), rat(13, 2), rat(9, 2), int(1)]));
        assert!(lambda_bar_numerator(&v.scale(&int(3)), &v).is_zero());
        let p = lambda_bar_numerator(&ch("1,0,-1,1"), &ch("2,0,-1,0"));
        assert!(p.degree().unwrap() <= 2);
    }

    #[test]
    fn branches_three_roots() {
        let v = ch("2,-1,-1,0");
        let s = rat(1, 3);
        let br = gamma_branches_at(&v, &s, &int(50)).unwrap();
        let labels: Vec<_> = br.iter().map(|(b, _)| *b).collect();
        assert_eq!(labels, vec![GammaBranch::Minus, GammaBranch::Zero, GammaBranch::Plus]);
    }

    fn arb_char() -> impl Strategy<Value = ChernCharacter> {
        (1i64..=4, -6i64..=6, -12i64..=12, -36i64..=36)
            .prop_map(|(r, c, d, e)| ChernCharacter::new(int(r), int(c), rat(d, 2), rat(e, 6)))
    }

    fn arb_point() -> impl Strategy<Value = HalfPlanePoint> {
        (-40i64..=40, 1i64..=8, 0i64..=60, 1i64..=8)
            .prop_map(|(b, bd, a, ad)| HalfPlanePoint::new(rat(b, bd), rat(a, ad)).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn theta_membership(v in arb_char(), p in arb_point()) {
            let on = rho(&v, &p).is_zero();
            let mu = v.mu().unwrap();
            let lhs = (p.beta() - &mu) * (p.beta() - &mu) - p.alpha_sq();
            let rhs = v.q_tilt() / (v.rank() * v.rank());
            prop_assert_eq!(on, lhs == rhs);
        }

        #[test]
        fn parametrization_lies_on_gamma(v in arb_char(), b in -30i64..=30, s in 1i64..=12) {
            let beta = rat(b, 4);
            let s = rat(s, 6);
            if let Ok(Some(a)) = gamma_alpha_sq(&v, &s, &beta) {
                prop_assert!(tau_at(&v, &pt(beta, a), &s).is_zero());
            }
        }

        #[test]
        fn region_tags_agree_with_signs(v in arb_char(), p in arb_point()) {
            prop_assume!(!v.q_tilt().is_negative());
            let r = region_of(&v, &p).unwrap();
            let mu = v.mu().unwrap();
            let rh = rho(&v, &p) * v.rank().signum();
            let expected = if *p.beta() == mu {
                Region::OnMu
            } else if rh.is_zero() {
                if *p.beta() < mu { Region::OnThetaLeft } else { Region::OnThetaRight }
            } else if rh.is_positive() {
                if *p.beta() < mu { Region::RMinus } else { Region::RPlus }
            } else if *p.beta() < mu {
                Region::RZeroMinus
            } else {
                Region::RZeroPlus
            };
            prop_assert_eq!(r, expected);
        }

        #[test]
        fn discriminant_matches_cubic(v in arb_char(), a in 0i64..=40, s in 1i64..=12) {
            let s = rat(s, 6);
            let a = rat(a, 3);
            let p = gamma_beta_poly(&v, &s, &a);
            let d = cubic_discriminant(&p).unwrap();
            prop_assert_eq!(d.clone(), gamma_discriminant(&v, &s, &a) * int(4));
            let n = real_roots(&p).unwrap().len();
            match sign(&d) {
                1 => prop_assert_eq!(n, 3),
                -1 => prop_assert_eq!(n, 1),
                _ => prop_assert!(n <= 2),
            }
        }

        #[test]
        fn three_roots_above_threshold(v in arb_char(), s in 1i64..=12) {
            let s = rat(s, 6);
            let a = match gamma_three_root_threshold(&v, &s) {
                Some(t) => t.hi.clone() + int(1),
                None => int(1),
            };
            let br = gamma_branches_at(&v, &s, &a).unwrap();
            prop_assert_eq!(br.len(), 3);
        }

        #[test]
        fn left_cap_criterion(v in arb_char(), s in prop::sample::select(vec![rat(1, 3), int(1)])) {
            prop_assume!(!v.q_tilt().is_negative() && v.q_quartic().is_negative());
            let [v0, v1, v2, v3] = v.components();
            let criterion = v0 * v0 * v3 > v0 * v1 * v2 - v1 * v1 * v1 / int(3);
            let pts = gamma_theta_intersections(&v, &s).unwrap();
            let left = pts.iter().any(|p| p.branch == ThetaBranch::Left);
            prop_assert_eq!(left, criterion);
        }

        #[test]
        fn quartic_invariant_under_dual_and_integer_twist(v in arb_char(), k in -5i64..=5) {
            prop_assert_eq!(v.dual().q_quartic(), v.q_quartic());
            prop_assert_eq!(v.twist(&int(k)).q_quartic(), v.q_quartic());
        }
    }
}
