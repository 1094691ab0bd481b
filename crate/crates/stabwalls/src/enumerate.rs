//! Lattice searches for pseudo lambda-walls through a point of `Gamma` and
//! for numerical nu-walls of a character.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::chern::{delta_unchecked, int, rat, ChernCharacter, HalfPlanePoint, Rational, SPoint};
use crate::exactpoly::QuadraticSurd;
use crate::geometry::{rho, tau_at};
use crate::walls::{classify_wall, lambda_f, nu_wall, NuWall, NuWallKind, WallClass};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnumerateError {
    PointNotOnGamma,
    U3Unconstrained,
    RankZero,
    NegativeDiscriminant,
    EmptyBox,
}

impl fmt::Display for EnumerateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnumerateError::PointNotOnGamma => write!(f, "point is not on Gamma (tau_v does not vanish there)"),
            EnumerateError::U3Unconstrained => {
                write!(f, "u3 unconstrained at this point (rho_v vanishes there)")
            }
            EnumerateError::RankZero => write!(f, "the character must have positive rank"),
            EnumerateError::NegativeDiscriminant => write!(f, "Q^tilt of the character is negative"),
            EnumerateError::EmptyBox => write!(f, "search box is empty"),
        }
    }
}

impl std::error::Error for EnumerateError {}

/// Integer ranges for `u0`, `u1`, and bounds on `|2 u2|` and `|6 u3|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBox {
    pub rank_min: i64,
    pub rank_max: i64,
    pub c1_min: i64,
    pub c1_max: i64,
    pub c2_bound: i64,
    pub c3_bound: i64,
}

impl SearchBox {
    pub fn new(rank_min: i64, rank_max: i64, c1_min: i64, c1_max: i64, c2_bound: i64, c3_bound: i64) -> Result<Self, EnumerateError> {
        if rank_min > rank_max || c1_min > c1_max || c2_bound < 0 || c3_bound < 0 {
            return Err(EnumerateError::EmptyBox);
        }
        Ok(SearchBox {
            rank_min,
            rank_max,
            c1_min,
            c1_max,
            c2_bound,
            c3_bound,
        })
    }

    /// Ranks `1..=2 v0`; the degree range is left wide because the scan
    /// clips it to the exact interval forced at the point.
    pub fn default_for(v: &ChernCharacter) -> Self {
        let r = v.rank().abs().ceil().to_integer().to_i64().unwrap_or(1).max(1);
        SearchBox {
            rank_min: 1,
            rank_max: 2 * r,
            c1_min: -1000,
            c1_max: 1000,
            c2_bound: 10_000,
            c3_bound: 1_000_000,
        }
    }

    /// Box used for nu-wall searches: ranks `0..=2 v0`.
    pub fn default_nu(v: &ChernCharacter) -> Self {
        SearchBox {
            rank_min: 0,
            c1_min: -200,
            c1_max: 200,
            c2_bound: 400,
            ..SearchBox::default_for(v)
        }
    }
}

/// How the no-nu-wall filter is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NuFilterMode {
    Off,
    On,
    /// Applied when the nu-candidate search for `v` comes back empty.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoWallFilters {
    /// Integrality of `chi(u(k))` for all `k`.
    pub chi: bool,
    /// `Q^tilt(u) >= 0` and `Q^tilt(v - u) >= 0`.
    pub bogomolov: bool,
    pub no_nu_walls: NuFilterMode,
    /// `rank(v - u) >= 0`.
    pub quotient_rank: bool,
    /// Reject `u = k u'` with `k >= 2` and `Q_P(u) = 0`.
    pub split_multiples: bool,
    /// `|y + r| <= 2|x|` for `x != 0`, specific to `v = (2,0,-1,0)`.
    pub lambda_nu: bool,
}

impl Default for PseudoWallFilters {
    fn default() -> Self {
        PseudoWallFilters {
            chi: true,
            bogomolov: true,
            no_nu_walls: NuFilterMode::Off,
            quotient_rank: true,
            split_multiples: true,
            lambda_nu: false,
        }
    }
}

/// One named test with the exact value it looked at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub name: &'static str,
    pub passed: bool,
    pub value: Option<Rational>,
}

impl Diagnostic {
    fn new(name: &'static str, passed: bool, value: Option<Rational>) -> Self {
        Diagnostic { name, passed, value }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoWallCandidate {
    pub u: ChernCharacter,
    pub diagnostics: Vec<Diagnostic>,
    pub wall_class: Option<WallClass>,
    /// Index of an earlier accepted candidate giving the same wall.
    pub coincides_with: Option<usize>,
}

impl PseudoWallCandidate {
    pub fn passed(&self) -> bool {
        self.diagnostics.iter().all(|d| d.passed)
    }

    /// Name of the first failing test.
    pub fn first_failure(&self) -> Option<&'static str> {
        self.diagnostics.iter().find(|d| !d.passed).map(|d| d.name)
    }

    pub fn diagnostic(&self, name: &str) -> Option<&Diagnostic> {
        self.diagnostics.iter().find(|d| d.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoWallSearch {
    pub candidates: Vec<PseudoWallCandidate>,
    pub rejected: Vec<PseudoWallCandidate>,
    pub nu_filter_applied: bool,
}

impl PseudoWallSearch {
    /// Number of distinct walls among the accepted candidates.
    pub fn distinct_walls(&self) -> usize {
        self.candidates.iter().filter(|c| c.coincides_with.is_none()).count()
    }
}

fn check_on_gamma(v: &ChernCharacter, sp: &SPoint) -> Result<(), EnumerateError> {
    if tau_at(v, &sp.point, sp.s()).is_zero() {
        Ok(())
    } else {
        Err(EnumerateError::PointNotOnGamma)
    }
}

/// The `u3` putting `u` on the wall through `P`, i.e. making `tau_u(P) = 0`.
pub fn solve_u3_on_point(
    v: &ChernCharacter,
    sp: &SPoint,
    u012: (&Rational, &Rational, &Rational),
) -> Result<Rational, EnumerateError> {
    check_on_gamma(v, sp)?;
    if rho(v, &sp.point).is_zero() {
        return Err(EnumerateError::U3Unconstrained);
    }
    let (u0, u1, u2) = u012;
    let probe = ChernCharacter::new(u0.clone(), u1.clone(), u2.clone(), Rational::zero());
    Ok(-tau_at(&probe, &sp.point, sp.s()))
}

fn is_chi_integral(u: &ChernCharacter) -> bool {
    (0..4).all(|k| u.twist(&int(-k)).euler_char_p3().is_integer())
}

fn is_split_multiple(u: &ChernCharacter, check_chi: bool) -> bool {
    let [u0, u1, ..] = u.components();
    if !u0.is_integer() || !u1.is_integer() {
        return false;
    }
    let g = u0.to_integer().gcd(&u1.to_integer());
    let g = g.to_i64().unwrap_or(0);
    (2..=g.abs()).any(|k| {
        let part = u.scale(&rat(1, k));
        part.is_lattice() && (!check_chi || is_chi_integral(&part))
    })
}

/// Diagnostics of the no-nu-wall filter: the nu-wall of `u` is empty and
/// `u` sits on the correct side of `v` in tilt slope at the point. The two
/// delta tests only constrain `u` when `delta_01 != 0`.
fn nu_filter_diagnostics(u: &ChernCharacter, v: &ChernCharacter, p: &HalfPlanePoint) -> Vec<Diagnostic> {
    let d01 = delta_unchecked(0, 1, u, v);
    let d02 = delta_unchecked(0, 2, u, v);
    let d12 = delta_unchecked(1, 2, u, v);
    let vertical = d01.is_zero();
    let prod = &d01 * &d12;
    let disc = int(4) * &prod - &d02 * &d02;
    let side = crate::chern::big_delta(2, 1, v, u, p).unwrap_or_default();
    vec![
        Diagnostic::new("nu_delta_product", vertical || !prod.is_negative(), Some(prod)),
        Diagnostic::new("nu_discriminant", vertical || !disc.is_negative(), Some(disc)),
        Diagnostic::new("nu_tilt_side", !side.is_negative(), Some(side)),
    ]
}

/// Runs every pseudo-wall test on `u` and reports each with its value.
pub fn check_pseudo_wall(
    u: &ChernCharacter,
    v: &ChernCharacter,
    sp: &SPoint,
    filters: &PseudoWallFilters,
    apply_nu_filter: bool,
) -> PseudoWallCandidate {
    let p = &sp.point;
    let beta = p.beta();
    let q = v - u;
    let mut diags = Vec::new();

    diags.push(Diagnostic::new("lattice", u.is_lattice(), None));
    if filters.chi {
        diags.push(Diagnostic::new("chi", is_chi_integral(u), Some(u.euler_char_p3())));
    }
    let f = lambda_f(u, v, sp);
    diags.push(Diagnostic::new("on_wall", f.is_zero(), Some(f)));

    let rho_u = rho(u, p);
    let rho_q = rho(v, p) - &rho_u;
    diags.push(Diagnostic::new("rho_positive", rho_u.is_positive(), Some(rho_u)));
    diags.push(Diagnostic::new("rho_below", rho_q.is_positive(), Some(rho_q)));

    let c1_u = u.twist(beta).components()[1].clone();
    let c1_q = q.twist(beta).components()[1].clone();
    diags.push(Diagnostic::new("ch1_lower", !c1_u.is_negative(), Some(c1_u)));
    diags.push(Diagnostic::new("ch1_upper", !c1_q.is_negative(), Some(c1_q)));

    let qu = u.q_full(p);
    let qq = q.q_full(p);
    let slack = v.q_full(p) - &qu - &qq;
    diags.push(Diagnostic::new("q_u", !qu.is_negative(), Some(qu.clone())));
    diags.push(Diagnostic::new("q_quotient", !qq.is_negative(), Some(qq)));
    diags.push(Diagnostic::new("q_sum", !slack.is_negative(), Some(slack)));

    if filters.quotient_rank {
        let r = q.rank().clone();
        diags.push(Diagnostic::new("quotient_rank", !r.is_negative(), Some(r)));
    }
    if filters.bogomolov {
        let (bu, bq) = (u.q_tilt(), q.q_tilt());
        diags.push(Diagnostic::new("bogomolov_u", !bu.is_negative(), Some(bu)));
        diags.push(Diagnostic::new("bogomolov_quotient", !bq.is_negative(), Some(bq)));
    }
    if apply_nu_filter {
        diags.extend(nu_filter_diagnostics(u, v, p));
    }
    if filters.split_multiples {
        let split = qu.is_zero() && is_split_multiple(u, filters.chi);
        diags.push(Diagnostic::new("split_multiple", !split, None));
    }
    if filters.lambda_nu {
        let [r, x, u2, _] = u.components();
        let y = u2 * int(2);
        let ok = x.is_zero() || (&y + r).abs() <= int(2) * x.abs();
        diags.push(Diagnostic::new("lambda_nu", ok, Some((&y + r).abs() - int(2) * x.abs())));
    }

    let wall_class = classify_wall(u, v).ok();
    PseudoWallCandidate {
        u: u.clone(),
        diagnostics: diags,
        wall_class,
        coincides_with: None,
    }
}

fn floor_i64(q: &Rational) -> i64 {
    q.floor().to_integer().to_i64().unwrap_or(i64::MIN / 4)
}

fn ceil_i64(q: &Rational) -> i64 {
    q.ceil().to_integer().to_i64().unwrap_or(i64::MAX / 4)
}

fn cmp_chern(a: &ChernCharacter, b: &ChernCharacter) -> Ordering {
    a.components().cmp(b.components())
}

/// Marks accepted candidates that give the same wall as an earlier one.
fn group_by_class(cands: &mut [PseudoWallCandidate]) {
    for i in 0..cands.len() {
        let class = cands[i].wall_class.clone();
        cands[i].coincides_with = match class {
            Some(c) => (0..i).find(|&j| cands[j].coincides_with.is_none() && cands[j].wall_class.as_ref() == Some(&c)),
            None => None,
        };
    }
}

/// Decides whether the no-nu-wall filter is in force for `v`.
pub fn nu_filter_applies(v: &ChernCharacter, mode: NuFilterMode) -> bool {
    match mode {
        NuFilterMode::Off => false,
        NuFilterMode::On => true,
        NuFilterMode::Auto => enumerate_nu_candidates(v, &SearchBox::default_nu(v))
            .map(|c| c.is_empty())
            .unwrap_or(false),
    }
}

/// All lattice `u` through `P` passing the pseudo-wall tests. The scan
/// covers the degree interval forced by `0 <= ch1^beta(u) <= ch1^beta(v)`
/// and the `ch2` interval forced by `0 < rho_u < rho_v`, both widened by one
/// so that near misses land in the rejection log; `u3` is always forced.
pub fn enumerate_pseudo_walls(
    v: &ChernCharacter,
    sp: &SPoint,
    search: &SearchBox,
    filters: &PseudoWallFilters,
) -> Result<PseudoWallSearch, EnumerateError> {
    if v.rank().is_zero() {
        return Err(EnumerateError::RankZero);
    }
    check_on_gamma(v, sp)?;
    let rho_v = rho(v, &sp.point);
    if rho_v.is_zero() {
        return Err(EnumerateError::U3Unconstrained);
    }
    let apply_nu = nu_filter_applies(v, filters.no_nu_walls);
    let p = &sp.point;
    let beta = p.beta();
    let c1_v = v.twist(beta).components()[1].clone();
    let shift = (beta * beta - p.alpha_sq()) / int(2);

    let shards: Vec<(i64, i64)> = (search.rank_min..=search.rank_max)
        .flat_map(|r| {
            let rb = int(r) * beta;
            let (lo, hi) = if c1_v.is_negative() { (&rb + &c1_v, rb.clone()) } else { (rb.clone(), &rb + &c1_v) };
            let x_lo = (floor_i64(&lo) - 1).max(search.c1_min);
            let x_hi = (ceil_i64(&hi) + 1).min(search.c1_max);
            (x_lo..=x_hi).map(move |x| (r, x))
        })
        .collect();

    let results: Vec<Vec<PseudoWallCandidate>> = shards
        .par_iter()
        .map(|&(r, x)| {
            let (rr, xx) = (int(r), int(x));
            // rho_u = y/2 - x beta + r (beta^2 - a)/2
            let base = &xx * beta - &rr * &shift;
            let (ylo, yhi) = (int(2) * &base, int(2) * (&base + &rho_v));
            let (ylo, yhi) = if ylo <= yhi { (ylo, yhi) } else { (yhi, ylo) };
            let y_lo = (floor_i64(&ylo) - 1).max(-search.c2_bound);
            let y_hi = (ceil_i64(&yhi) + 1).min(search.c2_bound);
            let mut out = Vec::new();
            for y in y_lo..=y_hi {
                let u2 = rat(y, 2);
                let Ok(u3) = solve_u3_on_point(v, sp, (&rr, &xx, &u2)) else {
                    continue;
                };
                if (&u3 * int(6)).abs() > int(search.c3_bound) {
                    continue;
                }
                let u = ChernCharacter::new(rr.clone(), xx.clone(), u2, u3);
                if u.is_zero() {
                    continue;
                }
                out.push(check_pseudo_wall(&u, v, sp, filters, apply_nu));
            }
            out
        })
        .collect();

    let mut all: Vec<PseudoWallCandidate> = results.into_iter().flatten().collect();
    all.sort_by(|a, b| cmp_chern(&a.u, &b.u));
    let (mut candidates, rejected): (Vec<_>, Vec<_>) = all.into_iter().partition(|c| c.passed());
    group_by_class(&mut candidates);
    Ok(PseudoWallSearch {
        candidates,
        rejected,
        nu_filter_applied: apply_nu,
    })
}

/// A numerical nu-wall crossing the vertical line through the
/// left point of `Theta_v` on the axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NuCandidate {
    /// Representative `(r, x, y/2)` with the smallest rank in its class.
    pub u_trunc: [Rational; 3],
    pub wall: NuWall,
    /// Every truncated vector in the box giving this wall.
    pub members: Vec<[Rational; 3]>,
}

/// `beta_0 = mu - sqrt(Q^tilt / v0^2)`.
pub fn nu_anchor(v: &ChernCharacter) -> Result<QuadraticSurd, EnumerateError> {
    let mu = v.mu().ok_or(EnumerateError::RankZero)?;
    let qt = v.q_tilt();
    if qt.is_negative() {
        return Err(EnumerateError::NegativeDiscriminant);
    }
    let v0 = v.rank().abs();
    Ok(QuadraticSurd::new(mu, -v0.recip(), qt))
}

/// Truncated lattice vectors `u = (r, x, y/2)` whose nu-wall with `v` is a
/// nonempty semicircle crossing `beta_0`, with `0 < ch1^{beta_0}(u) <
/// ch1^{beta_0}(v)`, `y = x (mod 2)` and both Bogomolov discriminants
/// non-negative. Vectors giving the same circle are grouped.
pub fn enumerate_nu_candidates(v: &ChernCharacter, search: &SearchBox) -> Result<Vec<NuCandidate>, EnumerateError> {
    let beta0 = nu_anchor(v)?;
    let [v0, v1, v2, _] = v.components().clone();
    let c1v = QuadraticSurd::new(&v1 - &v0 * &beta0.a, -&v0 * &beta0.b, beta0.d.clone());

    let shards: Vec<(i64, i64)> = (search.rank_min..=search.rank_max)
        .flat_map(|r| (search.c1_min.max(-200)..=search.c1_max.min(200)).map(move |x| (r, x)))
        .collect();
    let found: Vec<([Rational; 3], NuWall)> = shards
        .par_iter()
        .flat_map_iter(|&(r, x)| {
            let (rr, xx) = (int(r), int(x));
            let c1u = QuadraticSurd::new(&xx - &rr * &beta0.a, -&rr * &beta0.b, beta0.d.clone());
            let inside = c1u.sign() > 0 && c1v.sub(&c1u).sign() > 0;
            let mut out = Vec::new();
            if !inside {
                return out.into_iter();
            }
            // Q^tilt(u) >= 0 bounds y from above when r > 0
            let y_hi = if r > 0 { Integer::div_floor(&(x * x), &r) } else { search.c2_bound };
            // Q^tilt(v - u) >= 0 bounds y from below when rank(v - u) > 0
            let rq = &v0 - &rr;
            let y_lo = if rq.is_positive() {
                let d = &v1 - &xx;
                ceil_i64(&(int(2) * &v2 - &d * &d / &rq)).max(-search.c2_bound)
            } else {
                -search.c2_bound
            };
            for y in y_lo..=y_hi.min(search.c2_bound) {
                if (y - x).rem_euclid(2) != 0 {
                    continue;
                }
                let u2 = rat(y, 2);
                let u = ChernCharacter::new(rr.clone(), xx.clone(), u2.clone(), Rational::zero());
                let q = ChernCharacter::new(&v0 - &rr, &v1 - &xx, &v2 - &u2, Rational::zero());
                if u.q_tilt().is_negative() || q.q_tilt().is_negative() {
                    continue;
                }
                if u.truncation_proportional_to(v) {
                    continue;
                }
                let Ok(NuWallKind::Wall(w)) = nu_wall(&u, v) else {
                    continue;
                };
                // (beta0 - c)^2 < radius^2
                let off = beta0.add_rational(&-&w.center);
                if off.mul(&off).add_rational(&-&w.radius_sq).sign() >= 0 {
                    continue;
                }
                out.push(([rr.clone(), xx.clone(), u2], w));
            }
            out.into_iter()
        })
        .collect();

    let mut found = found;
    found.sort_by(|a, b| a.0.cmp(&b.0));
    let mut classes: Vec<NuCandidate> = Vec::new();
    for (u, w) in found {
        match classes.iter_mut().find(|c| c.wall == w) {
            Some(c) => c.members.push(u),
            None => classes.push(NuCandidate {
                u_trunc: u.clone(),
                wall: w,
                members: vec![u],
            }),
        }
    }
    for c in &mut classes {
        // prefer the smallest positive rank as representative
        let key = |m: &[Rational; 3]| (!m[0].is_positive(), m[0].abs(), m.clone());
        if let Some(best) = c.members.iter().min_by_key(|m| key(m)).cloned() {
            c.u_trunc = best;
        }
    }
    classes.sort_by(|a, b| a.wall.center.cmp(&b.wall.center).then(a.u_trunc.cmp(&b.u_trunc)));
    Ok(classes)
}
