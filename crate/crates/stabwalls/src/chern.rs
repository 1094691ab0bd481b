//! Numerical Chern characters on a Picard rank one threefold and the
//! bilinear and quartic invariants built from them.
//!
//! Every quantity here is an exact rational. Points of the upper half plane
//! are stored through `a = alpha^2`, which keeps all slope functions rational.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Arbitrary precision rational number used throughout the crate.
pub type Rational = BigRational;

/// Builds the rational `n/d`. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Lossy conversion used only when producing approximate output.
pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Parses a rational written as `p/q` or as an integer. Decimal notation is
/// rejected so that special parameter values such as `1/3` stay exact.
pub fn parse_rational(text: &str) -> Result<Rational, ChernError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(ChernError::Parse {
            position: 0,
            message: "empty rational".into(),
        });
    }
    if t.contains('.') || t.contains('e') || t.contains('E') {
        return Err(ChernError::Parse {
            position: 0,
            message: format!("`{t}` is not an exact rational (use p/q)"),
        });
    }
    Rational::from_str(t).map_err(|e| ChernError::Parse {
        position: 0,
        message: format!("`{t}`: {e}"),
    })
}

/// Formats a rational as `p/q`, or as a bare integer when the denominator is 1.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChernError {
    IndexOutOfRange(usize),
    NegativeAlphaSquared,
    NegativeS,
    Parse { position: usize, message: String },
}

impl fmt::Display for ChernError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChernError::IndexOutOfRange(i) => write!(f, "index {i} out of range (expected 0..=3)"),
            ChernError::NegativeAlphaSquared => write!(f, "alpha^2 must be non-negative"),
            ChernError::NegativeS => write!(f, "s must be positive"),
            ChernError::Parse { position, message } => {
                write!(f, "parse error at position {position}: {message}")
            }
        }
    }
}

impl std::error::Error for ChernError {}

/// A point of the upper half plane given by `beta` and `a = alpha^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HalfPlanePoint {
    beta: Rational,
    a: Rational,
}

impl HalfPlanePoint {
    /// Creates a point; `a = 0` is accepted and denotes the boundary axis.
    pub fn new(beta: Rational, a: Rational) -> Result<Self, ChernError> {
        if a.is_negative() {
            return Err(ChernError::NegativeAlphaSquared);
        }
        Ok(HalfPlanePoint { beta, a })
    }

    pub fn on_axis(beta: Rational) -> Self {
        HalfPlanePoint {
            beta,
            a: Rational::zero(),
        }
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn alpha_sq(&self) -> &Rational {
        &self.a
    }

    pub fn alpha_f64(&self) -> f64 {
        to_f64(&self.a).sqrt()
    }
}

/// A point of the half plane together with the parameter `s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SPoint {
    pub point: HalfPlanePoint,
    s: Rational,
}

impl SPoint {
    /// Requires `s > 0`.
    pub fn new(point: HalfPlanePoint, s: Rational) -> Result<Self, ChernError> {
        if !s.is_positive() {
            return Err(ChernError::NegativeS);
        }
        Ok(SPoint { point, s })
    }

    /// Like [`SPoint::new`] but also accepts `s = 0`.
    pub fn new_allowing_zero(point: HalfPlanePoint, s: Rational) -> Result<Self, ChernError> {
        if s.is_negative() {
            return Err(ChernError::NegativeS);
        }
        Ok(SPoint { point, s })
    }

    pub fn s(&self) -> &Rational {
        &self.s
    }

    pub fn beta(&self) -> &Rational {
        &self.point.beta
    }

    pub fn alpha_sq(&self) -> &Rational {
        &self.point.a
    }
}

/// A numerical Chern character `(v0, v1, v2, v3)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChernCharacter {
    c: [Rational; 4],
}

impl ChernCharacter {
    pub fn new(v0: Rational, v1: Rational, v2: Rational, v3: Rational) -> Self {
        ChernCharacter {
            c: [v0, v1, v2, v3],
        }
    }

    pub fn from_array(c: [Rational; 4]) -> Self {
        ChernCharacter { c }
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_fracs(c: [(i64, i64); 4]) -> Self {
        ChernCharacter {
            c: c.map(|(n, d)| rat(n, d)),
        }
    }

    pub fn zero() -> Self {
        ChernCharacter {
            c: std::array::from_fn(|_| Rational::zero()),
        }
    }

    pub fn components(&self) -> &[Rational; 4] {
        &self.c
    }

    /// Component `i`, with the convention that indices past 3 give zero.
    pub fn get(&self, i: usize) -> Rational {
        self.c.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn rank(&self) -> &Rational {
        &self.c[0]
    }

    pub fn degree(&self) -> &Rational {
        &self.c[1]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    /// Whether the entries lie in `Z x Z x (1/2)Z x (1/6)Z`.
    pub fn is_lattice(&self) -> bool {
        let scales = [1, 1, 2, 6];
        self.c
            .iter()
            .zip(scales)
            .all(|(x, k)| (x * int(k)).is_integer())
    }

    /// Slope `v1/v0`, if the rank is nonzero.
    pub fn mu(&self) -> Option<Rational> {
        if self.c[0].is_zero() {
            None
        } else {
            Some(&self.c[1] / &self.c[0])
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        ChernCharacter {
            c: std::array::from_fn(|i| &self.c[i] * k),
        }
    }

    /// True when one character is a rational multiple of the other.
    pub fn is_proportional_to(&self, other: &ChernCharacter) -> bool {
        (0..4).all(|i| (i + 1..4).all(|j| delta_unchecked(i, j, self, other).is_zero()))
    }

    /// Same as [`ChernCharacter::is_proportional_to`] on the first three entries.
    pub fn truncation_proportional_to(&self, other: &ChernCharacter) -> bool {
        (0..3).all(|i| (i + 1..3).all(|j| delta_unchecked(i, j, self, other).is_zero()))
    }

    /// The twisted character `ch^beta = ch * exp(-beta H)`.
    pub fn twist(&self, beta: &Rational) -> Self {
        let [v0, v1, v2, v3] = &self.c;
        let b2 = beta * beta;
        let b3 = &b2 * beta;
        let half = rat(1, 2);
        let sixth = rat(1, 6);
        ChernCharacter::new(
            v0.clone(),
            v1 - beta * v0,
            v2 - beta * v1 + &b2 * v0 * &half,
            v3 - beta * v2 + &b2 * v1 * &half - &b3 * v0 * &sixth,
        )
    }

    /// The uniform character `ch^{alpha,beta}`: the twisted character with
    /// `alpha^2/2` times the entry two degrees lower subtracted.
    pub fn tilt(&self, p: &HalfPlanePoint) -> [Rational; 4] {
        let t = self.twist(&p.beta);
        let h = &p.a * rat(1, 2);
        let [t0, t1, t2, t3] = t.c;
        let c2 = &t2 - &h * &t0;
        let c3 = &t3 - &h * &t1;
        [t0, t1, c2, c3]
    }

    /// One entry of [`ChernCharacter::tilt`]; out-of-range indices give zero.
    pub fn tilt_component(&self, i: usize, p: &HalfPlanePoint) -> Rational {
        if i > 3 {
            return Rational::zero();
        }
        self.tilt(p)[i].clone()
    }

    /// Bogomolov discriminant `v1^2 - 2 v0 v2`.
    pub fn q_tilt(&self) -> Rational {
        let [v0, v1, v2, _] = &self.c;
        v1 * v1 - int(2) * v0 * v2
    }

    /// Generalized Bogomolov form at a point.
    pub fn q_full(&self, p: &HalfPlanePoint) -> Rational {
        let t = self.twist(&p.beta);
        &p.a * self.q_tilt() + int(4) * &t.c[2] * &t.c[2] - int(6) * &t.c[1] * &t.c[3]
    }

    /// The quartic invariant `3v1²v2² − 6v1³v3 + 18v0v1v2v3 − 8v0v2³ − 9v0²v3²`.
    pub fn q_quartic(&self) -> Rational {
        let [v0, v1, v2, v3] = &self.c;
        int(3) * v1 * v1 * v2 * v2 - int(6) * v1 * v1 * v1 * v3 + int(18) * v0 * v1 * v2 * v3
            - int(8) * v0 * v2 * v2 * v2
            - int(9) * v0 * v0 * v3 * v3
    }

    /// Euler characteristic against the structure sheaf of projective 3-space.
    pub fn euler_char_p3(&self) -> Rational {
        let [v0, v1, v2, v3] = &self.c;
        v0 + rat(11, 6) * v1 + int(2) * v2 + v3
    }

    /// `(v0, -v1, v2, -v3)`.
    pub fn dual(&self) -> Self {
        let [v0, v1, v2, v3] = &self.c;
        ChernCharacter::new(v0.clone(), -v1, v2.clone(), -v3)
    }
}

impl Add for &ChernCharacter {
    type Output = ChernCharacter;
    fn add(self, rhs: &ChernCharacter) -> ChernCharacter {
        ChernCharacter {
            c: std::array::from_fn(|i| &self.c[i] + &rhs.c[i]),
        }
    }
}

impl Sub for &ChernCharacter {
    type Output = ChernCharacter;
    fn sub(self, rhs: &ChernCharacter) -> ChernCharacter {
        ChernCharacter {
            c: std::array::from_fn(|i| &self.c[i] - &rhs.c[i]),
        }
    }
}

impl Neg for &ChernCharacter {
    type Output = ChernCharacter;
    fn neg(self) -> ChernCharacter {
        ChernCharacter {
            c: std::array::from_fn(|i| -&self.c[i]),
        }
    }
}

impl fmt::Display for ChernCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.c.iter().map(format_rational).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for ChernCharacter {
    type Err = ChernError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fields: Vec<&str> = s.split(',').collect();
        if fields.len() != 4 {
            return Err(ChernError::Parse {
                position: 0,
                message: format!("expected 4 comma-separated rationals, found {}", fields.len()),
            });
        }
        let mut out: [Rational; 4] = std::array::from_fn(|_| Rational::zero());
        let mut offset = 0;
        for (i, field) in fields.iter().enumerate() {
            out[i] = parse_rational(field).map_err(|e| match e {
                ChernError::Parse { message, .. } => ChernError::Parse {
                    position: offset,
                    message: format!("component {i}: {message}"),
                },
                other => other,
            })?;
            offset += field.len() + 1;
        }
        Ok(ChernCharacter { c: out })
    }
}

fn check_index(i: usize) -> Result<(), ChernError> {
    if i > 3 {
        Err(ChernError::IndexOutOfRange(i))
    } else {
        Ok(())
    }
}

pub(crate) fn delta_unchecked(i: usize, j: usize, u: &ChernCharacter, v: &ChernCharacter) -> Rational {
    &u.c[i] * &v.c[j] - &u.c[j] * &v.c[i]
}

/// `delta_ij(u, v) = u_i v_j - u_j v_i`.
pub fn delta(i: usize, j: usize, u: &ChernCharacter, v: &ChernCharacter) -> Result<Rational, ChernError> {
    check_index(i)?;
    check_index(j)?;
    Ok(delta_unchecked(i, j, u, v))
}

/// All sixteen brackets of the uniform characters of `u` and `v` at `p`.
#[derive(Debug, Clone)]
pub struct Brackets {
    m: [[Rational; 4]; 4],
}

impl Brackets {
    pub fn at(u: &ChernCharacter, v: &ChernCharacter, p: &HalfPlanePoint) -> Self {
        Self::from_tilts(&u.tilt(p), &v.tilt(p))
    }

    pub fn from_tilts(cu: &[Rational; 4], cv: &[Rational; 4]) -> Self {
        Brackets {
            m: std::array::from_fn(|i| std::array::from_fn(|j| &cu[i] * &cv[j] - &cu[j] * &cv[i])),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.m[i][j]
    }
}

/// `Delta_ij` at `p`, computed from the uniform characters `ch^{alpha,beta}`.
pub fn big_delta(
    i: usize,
    j: usize,
    u: &ChernCharacter,
    v: &ChernCharacter,
    p: &HalfPlanePoint,
) -> Result<Rational, ChernError> {
    check_index(i)?;
    check_index(j)?;
    let cu = u.tilt(p);
    let cv = v.tilt(p);
    Ok(&cu[i] * &cv[j] - &cu[j] * &cv[i])
}
