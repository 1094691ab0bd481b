//! JSON and CSV renderings of library results.

use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use stabwalls::chern::{format_rational, to_f64, ChernCharacter, Rational, SPoint};
use stabwalls::enumerate::{
    NuCandidate, NuFilterMode, PseudoWallCandidate, PseudoWallFilters, PseudoWallSearch, SearchBox,
};
use stabwalls::exactpoly::{IsolatedRoot, Interval, QuadraticSurd};
use stabwalls::geometry::{gamma_three_root_threshold, CurveSample, Window};
use stabwalls::walls::{NuWallKind, WallClass, WallDossier, WallTrace};

use crate::envelope;

fn q(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

fn chern(v: &ChernCharacter) -> Value {
    Value::String(v.to_string())
}

/// Floats are rounded so that reports stay short and stable.
fn approx(x: f64) -> Value {
    json!((x * 1e12).round() / 1e12)
}

fn root(r: &IsolatedRoot) -> Value {
    json!({ "lo": q(&r.lo), "hi": q(&r.hi), "approx": approx(r.approx()) })
}

fn interval(iv: &Interval) -> Value {
    json!({ "lo": q(&iv.lo), "hi": q(&iv.hi) })
}

/// `alpha` from an enclosure of `alpha^2`.
fn alpha_of(iv: &Interval) -> Value {
    approx(to_f64(&iv.midpoint()).max(0.0).sqrt())
}

fn window(w: &Window) -> Value {
    json!({ "beta_min": q(&w.beta_min), "beta_max": q(&w.beta_max), "alpha_max": q(&w.alpha_max) })
}

fn class(c: &WallClass) -> Value {
    json!({ "tag": c.tag.as_str(), "canonical": chern(&c.canonical) })
}

fn surd(x: &QuadraticSurd) -> Value {
    json!({ "rational": q(&x.a), "coefficient": q(&x.b), "radicand": q(&x.d), "approx": approx(x.to_f64()) })
}

pub fn invariants(v: &ChernCharacter, s: &Rational) -> Value {
    let qt = v.q_tilt();
    let theta_feet = match v.mu() {
        Some(mu) if !qt.is_negative() => {
            let half_sq = &qt / (v.rank() * v.rank());
            let half = to_f64(&half_sq).sqrt();
            let m = to_f64(&mu);
            json!({ "center": q(&mu), "half_width_sq": q(&half_sq), "approx": [approx(m - half), approx(m + half)] })
        }
        _ => Value::Null,
    };
    let threshold = if v.rank().is_zero() {
        Value::Null
    } else {
        gamma_three_root_threshold(v, s).map(|r| root(&r)).unwrap_or(Value::Null)
    };
    envelope(
        "invariants",
        json!({
            "v": chern(v),
            "rank": q(v.rank()),
            "degree": q(v.degree()),
            "mu": v.mu().map(|m| q(&m)).unwrap_or(Value::Null),
            "q_tilt": q(&qt),
            "q_quartic": q(&v.q_quartic()),
            "chi": q(&v.euler_char_p3()),
            "dual": chern(&v.dual()),
            "lattice": v.is_lattice(),
            "bogomolov": !qt.is_negative(),
            "theta_feet": theta_feet,
            "gamma_three_root_threshold": { "s": q(s), "alpha_sq": threshold },
        }),
    )
}

fn trace_summary(t: &WallTrace) -> Value {
    let comps: Vec<Value> = t
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (lo, hi) = c
                .vertices
                .iter()
                .map(|p| p.beta_f64())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), b| (l.min(b), h.max(b)));
            json!({
                "id": i,
                "vertices": c.vertices.len(),
                "bounded": c.bounded,
                "closed": c.closed,
                "vertical": c.vertical,
                "beta_range": [approx(lo), approx(hi)],
            })
        })
        .collect();
    json!({
        "window": window(&t.window),
        "step": q(&t.step),
        "component_count": t.components.len(),
        "components": comps,
        "unresolved_links": t.unresolved_links,
        "certified": t.is_certified(),
    })
}

pub fn dossier(d: &WallDossier) -> Value {
    let nu = match &d.nu_wall {
        NuWallKind::Wall(w) => json!({ "kind": "wall", "center": q(&w.center), "radius_sq": q(&w.radius_sq) }),
        NuWallKind::Empty => json!({ "kind": "empty" }),
        NuWallKind::Degenerate => json!({ "kind": "degenerate" }),
    };
    let theta: Vec<Value> = d
        .theta_crossings
        .iter()
        .map(|c| {
            json!({
                "beta": root(&c.beta),
                "alpha_sq": interval(&c.alpha_sq),
                "alpha": alpha_of(&c.alpha_sq),
                "nodal": c.nodal,
            })
        })
        .collect();
    let gamma: Vec<Value> = d
        .gamma_crossings
        .iter()
        .map(|c| {
            json!({
                "beta": root(&c.beta),
                "alpha_sq": interval(&c.alpha_sq),
                "alpha": alpha_of(&c.alpha_sq),
                "branch": c.branch.as_str(),
                "nodal": c.nodal,
            })
        })
        .collect();
    let horizontal: Vec<Value> = d
        .horizontal_points
        .iter()
        .map(|h| {
            json!({
                "beta": root(&h.beta),
                "alpha_sq": interval(&h.alpha_sq),
                "kind": h.kind.as_str(),
                "on_theta": h.on_theta,
            })
        })
        .collect();
    let singular: Vec<Value> = d
        .singular_points
        .iter()
        .map(|p| {
            json!({
                "beta": root(&p.beta),
                "alpha_sq": p.alpha_sq.as_ref().map(interval).unwrap_or(Value::Null),
                "s": p.s.as_ref().map(q).unwrap_or(Value::Null),
                "model": p.model.as_str(),
            })
        })
        .collect();
    envelope(
        "wall",
        json!({
            "u": chern(&d.u),
            "v": chern(&d.v),
            "s": q(&d.s),
            "class": class(&d.class),
            "nu_wall": nu,
            "asymptote": d.asymptote.as_ref().map(q).unwrap_or(Value::Null),
            "theta_crossings": theta,
            "gamma_crossings": gamma,
            "horizontal_points": horizontal,
            "singular_points": singular,
            "trace": d.trace.as_ref().map(trace_summary).unwrap_or(Value::Null),
        }),
    )
}

pub fn trace_csv(t: &WallTrace) -> String {
    let mut out = String::from("component,beta,alpha\n");
    for (i, c) in t.components.iter().enumerate() {
        for p in &c.vertices {
            let _ = writeln!(out, "{i},{},{:.12}", format_rational(&p.beta), p.alpha_f64());
        }
    }
    out
}

pub fn samples_csv(samples: &[CurveSample], digits: usize) -> String {
    let mut out = String::from("beta,alpha,branch,exact\n");
    for p in samples {
        let _ = writeln!(out, "{:.*},{:.*},{},{}", digits, p.beta, digits, p.alpha, p.label, p.exact);
    }
    out
}

fn search_box(b: &SearchBox) -> Value {
    json!({
        "rank_min": b.rank_min,
        "rank_max": b.rank_max,
        "c1_min": b.c1_min,
        "c1_max": b.c1_max,
        "c2_bound": b.c2_bound,
        "c3_bound": b.c3_bound,
    })
}

fn candidate(c: &PseudoWallCandidate, class_id: Option<usize>) -> Value {
    let diags: Vec<Value> = c
        .diagnostics
        .iter()
        .map(|d| json!({ "name": d.name, "passed": d.passed, "value": d.value.as_ref().map(q).unwrap_or(Value::Null) }))
        .collect();
    json!({
        "u": chern(&c.u),
        "class_id": class_id,
        "coincides_with": c.coincides_with,
        "wall_class": c.wall_class.as_ref().map(class).unwrap_or(Value::Null),
        "first_failure": c.first_failure(),
        "diagnostics": diags,
    })
}

pub fn pseudo_walls(
    v: &ChernCharacter,
    sp: &SPoint,
    bx: &SearchBox,
    filters: &PseudoWallFilters,
    res: &PseudoWallSearch,
    with_rejected: bool,
) -> Value {
    let mut leaders = Vec::new();
    let accepted: Vec<Value> = res
        .candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let leader = c.coincides_with.unwrap_or(i);
            let id = match leaders.iter().position(|&l| l == leader) {
                Some(k) => k,
                None => {
                    leaders.push(leader);
                    leaders.len() - 1
                }
            };
            candidate(c, Some(id))
        })
        .collect();
    let rejected: Value = if with_rejected {
        Value::Array(res.rejected.iter().map(|c| candidate(c, None)).collect())
    } else {
        Value::Null
    };
    let nu_mode = match filters.no_nu_walls {
        NuFilterMode::Off => "off",
        NuFilterMode::On => "on",
        NuFilterMode::Auto => "auto",
    };
    envelope(
        "enumerate pseudo",
        json!({
            "v": chern(v),
            "s": q(sp.s()),
            "point": { "beta": q(sp.beta()), "alpha_sq": q(sp.alpha_sq()) },
            "box": search_box(bx),
            "filters": {
                "chi": filters.chi,
                "bogomolov": filters.bogomolov,
                "no_nu_walls": nu_mode,
                "quotient_rank": filters.quotient_rank,
                "split_multiples": filters.split_multiples,
                "lambda_nu": filters.lambda_nu,
            },
            "nu_filter_applied": res.nu_filter_applied,
            "candidate_count": res.candidates.len(),
            "distinct_walls": res.distinct_walls(),
            "candidates": accepted,
            "rejected_count": res.rejected.len(),
            "rejected": rejected,
        }),
    )
}

pub fn nu_candidates(v: &ChernCharacter, bx: &SearchBox, anchor: &QuadraticSurd, found: &[NuCandidate]) -> Value {
    let trunc = |t: &[Rational; 3]| Value::Array(t.iter().map(q).collect());
    let classes: Vec<Value> = found
        .iter()
        .map(|c| {
            json!({
                "u_trunc": trunc(&c.u_trunc),
                "center": q(&c.wall.center),
                "radius_sq": q(&c.wall.radius_sq),
                "members": c.members.iter().map(&trunc).collect::<Vec<_>>(),
            })
        })
        .collect();
    envelope(
        "enumerate nu",
        json!({
            "v": chern(v),
            "box": search_box(bx),
            "anchor_beta": surd(anchor),
            "class_count": found.len(),
            "classes": classes,
        }),
    )
}
