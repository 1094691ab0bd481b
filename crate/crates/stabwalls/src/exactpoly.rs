//! Exact univariate polynomials over the rationals with certified real-root
//! isolation (Sturm sequences) and refinement by bisection.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::chern::{int, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    IndeterminateRootSet,
    DegreeMismatch { expected: usize, found: Option<usize> },
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::IndeterminateRootSet => write!(f, "indeterminate root set (zero polynomial)"),
            PolyError::DegreeMismatch { expected, found } => match found {
                Some(d) => write!(f, "expected a polynomial of degree {expected}, found degree {d}"),
                None => write!(f, "expected a polynomial of degree {expected}, found the zero polynomial"),
            },
        }
    }
}

impl std::error::Error for PolyError {}

/// Sign of a rational as -1, 0 or 1.
pub fn sign(q: &Rational) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Polynomial with rational coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| int(x)).collect())
    }

    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    /// The linear polynomial `x - r`.
    pub fn linear_root(r: &Rational) -> Self {
        Self::new(vec![-r, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    /// Exact value at a quadratic surd, returned in the same radicand.
    pub fn eval_surd(&self, x: &QuadraticSurd) -> QuadraticSurd {
        let mut acc = QuadraticSurd::rational(Rational::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add_rational(c);
        }
        acc
    }

    pub fn sign_at(&self, x: &Rational) -> i32 {
        sign(&self.eval(x))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
        }
    }

    /// Euclidean division. Panics on division by the zero polynomial.
    pub fn div_rem(&self, d: &RationalPoly) -> (RationalPoly, RationalPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.leading().unwrap().clone();
        let mut r = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); n - dd];
        for k in (0..n - dd).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(a: &RationalPoly, b: &RationalPoly) -> RationalPoly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r;
        }
        x.monic()
    }

    /// Substitutes `inner` for the variable.
    pub fn compose(&self, inner: &RationalPoly) -> RationalPoly {
        let mut acc = RationalPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &RationalPoly::constant(c.clone());
        }
        acc
    }

    pub fn pow(&self, k: u32) -> RationalPoly {
        let mut acc = RationalPoly::constant(Rational::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// The monic square-free part `p / gcd(p, p')`.
    pub fn square_free(&self) -> RationalPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = Self::gcd(self, &self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Integer leading coefficient of the primitive integer multiple of `self`.
    fn primitive_leading(&self) -> BigInt {
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for x in &ints {
            g = g.gcd(x);
        }
        match ints.last() {
            Some(l) if !g.is_zero() => (l / g).abs(),
            _ => BigInt::one(),
        }
    }

    /// Conservative enclosure of the values on `[lo, hi]` by interval Horner.
    pub fn eval_interval(&self, iv: &Interval) -> Interval {
        let mut acc = Interval::point(Rational::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(iv).add_scalar(c);
        }
        acc
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(out)
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let t = match i {
                0 => format!("{c}"),
                1 => format!("({c})x"),
                _ => format!("({c})x^{i}"),
            };
            terms.push(t);
        }
        write!(f, "{}", terms.join(" + "))
    }
}

/// Closed rational interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn add_scalar(&self, c: &Rational) -> Interval {
        Interval {
            lo: &self.lo + c,
            hi: &self.hi + c,
        }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let p = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = p.iter().min().unwrap().clone();
        let hi = p.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    /// Quotient; `None` when the divisor interval contains zero.
    pub fn div(&self, o: &Interval) -> Option<Interval> {
        if !o.lo.is_positive() && !o.hi.is_negative() {
            return None;
        }
        let inv = Interval {
            lo: o.hi.recip(),
            hi: o.lo.recip(),
        };
        Some(self.mul(&inv))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

/// Exact number `a + b * sqrt(d)` with rational `a`, `b` and `d >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticSurd {
    pub a: Rational,
    pub b: Rational,
    pub d: Rational,
}

impl QuadraticSurd {
    pub fn new(a: Rational, b: Rational, d: Rational) -> Self {
        assert!(!d.is_negative(), "negative radicand");
        QuadraticSurd { a, b, d }
    }

    pub fn rational(a: Rational) -> Self {
        QuadraticSurd {
            a,
            b: Rational::zero(),
            d: Rational::zero(),
        }
    }

    /// Exact sign of the number.
    pub fn sign(&self) -> i32 {
        let sa = sign(&self.a);
        let sb = if self.d.is_zero() { 0 } else { sign(&self.b) };
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * &self.d;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn add_rational(&self, c: &Rational) -> Self {
        QuadraticSurd::new(&self.a + c, self.b.clone(), self.d.clone())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        QuadraticSurd::new(&self.a * k, &self.b * k, self.d.clone())
    }

    /// Product of two surds sharing the same radicand.
    pub fn mul(&self, o: &QuadraticSurd) -> Self {
        let d = if self.d.is_zero() { o.d.clone() } else { self.d.clone() };
        debug_assert!(self.b.is_zero() || o.b.is_zero() || self.d == o.d);
        QuadraticSurd::new(
            &self.a * &o.a + &self.b * &o.b * &d,
            &self.a * &o.b + &self.b * &o.a,
            d,
        )
    }

    /// Difference of two surds sharing the same radicand.
    pub fn sub(&self, o: &QuadraticSurd) -> Self {
        let d = if self.d.is_zero() { o.d.clone() } else { self.d.clone() };
        debug_assert!(self.b.is_zero() || o.b.is_zero() || self.d == o.d);
        QuadraticSurd::new(&self.a - &o.a, &self.b - &o.b, d)
    }

    /// Exact comparison with a rational.
    pub fn cmp_rational(&self, x: &Rational) -> Ordering {
        self.add_rational(&-x).sign().cmp(&0)
    }

    /// The value as a rational when the surd part vanishes or `d` is a square.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.b.is_zero() || self.d.is_zero() {
            return Some(self.a.clone());
        }
        rational_sqrt(&self.d).map(|r| &self.a + &self.b * r)
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.a) + to_f64(&self.b) * to_f64(&self.d).sqrt()
    }

    /// A rational enclosure of width at most `tol`.
    pub fn enclose(&self, tol: &Rational) -> Interval {
        if let Some(r) = self.as_rational() {
            return Interval::point(r);
        }
        let root = sqrt_interval(&self.d, &(tol / (self.b.abs() + int(1))));
        let scaled = Interval::point(self.b.clone()).mul(&root);
        scaled.add_scalar(&self.a)
    }
}

/// Exact square root of a rational when it exists.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Rational interval of width at most `tol` containing `sqrt(q)`.
pub fn sqrt_interval(q: &Rational, tol: &Rational) -> Interval {
    if let Some(r) = rational_sqrt(q) {
        return Interval::point(r);
    }
    let mut lo = Rational::zero();
    let mut hi = if q > &int(1) { q.clone() } else { int(1) };
    while &(&hi - &lo) > tol {
        let mid = (&lo + &hi) / int(2);
        if &(&mid * &mid) <= q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Interval::new(lo, hi)
}

/// An isolating interval for one distinct real root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsolatedRoot {
    pub lo: Rational,
    pub hi: Rational,
    pub multiplicity_hint: u32,
}

impl IsolatedRoot {
    pub fn exact(x: Rational, multiplicity_hint: u32) -> Self {
        IsolatedRoot {
            lo: x.clone(),
            hi: x,
            multiplicity_hint,
        }
    }

    /// The root itself when it is rational and was detected as such.
    pub fn as_exact(&self) -> Option<&Rational> {
        if self.lo == self.hi {
            Some(&self.lo)
        } else {
            None
        }
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn approx(&self) -> f64 {
        to_f64(&self.midpoint())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.lo.clone(), self.hi.clone())
    }
}

/// Sturm sequence of a square-free polynomial.
struct SturmChain {
    seq: Vec<RationalPoly>,
}

impl SturmChain {
    fn new(p: &RationalPoly) -> Self {
        let mut seq = vec![p.clone(), p.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(-&r);
        }
        SturmChain { seq }
    }

    fn variations_of(signs: impl Iterator<Item = i32>) -> usize {
        let mut last = 0;
        let mut count = 0;
        for s in signs {
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    fn variations(&self, x: &Rational) -> usize {
        Self::variations_of(self.seq.iter().map(|p| p.sign_at(x)))
    }

    /// Number of distinct roots in the half-open interval `(lo, hi]`.
    fn count(&self, lo: &Rational, hi: &Rational) -> usize {
        self.variations(lo).saturating_sub(self.variations(hi))
    }
}

fn cauchy_bound(p: &RationalPoly) -> Rational {
    let lead = p.leading().unwrap().abs();
    let m = p.coeffs[..p.coeffs.len() - 1]
        .iter()
        .map(|c| c.abs() / &lead)
        .max()
        .unwrap_or_else(Rational::zero);
    m + int(1)
}

/// The rational with the smallest denominator in the closed interval `[lo, hi]`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    let next = &fl + int(1);
    if &next <= hi {
        return next;
    }
    let inner = simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

/// Shrinks `(lo, hi]`, known to contain exactly one root of the square-free
/// `sqf`, until either the root is found exactly or neither endpoint is a root.
fn tighten(sqf: &RationalPoly, chain: &SturmChain, mut lo: Rational, mut hi: Rational) -> (Rational, Rational) {
    if sqf.eval(&hi).is_zero() {
        return (hi.clone(), hi);
    }
    while sqf.eval(&lo).is_zero() {
        let mid = (&lo + &hi) / int(2);
        if sqf.eval(&mid).is_zero() {
            return (mid.clone(), mid);
        }
        if chain.count(&lo, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

fn bisect_once(sqf: &RationalPoly, lo: &mut Rational, hi: &mut Rational) -> bool {
    let s_lo = sqf.sign_at(lo);
    let mid = (&*lo + &*hi) / int(2);
    let s = sqf.sign_at(&mid);
    if s == 0 {
        *lo = mid.clone();
        *hi = mid;
        return true;
    }
    if s == s_lo {
        *lo = mid;
    } else {
        *hi = mid;
    }
    false
}

fn multiplicity(p: &RationalPoly, sqf: &RationalPoly, lo: &Rational, hi: &Rational) -> u32 {
    let mut m = 1;
    let mut d = p.derivative();
    while !d.is_zero() {
        let g = RationalPoly::gcd(sqf, &d);
        let has = if lo == hi {
            g.eval(lo).is_zero()
        } else {
            g.degree().unwrap_or(0) > 0 && SturmChain::new(&g).count(lo, hi) > 0
        };
        if !has {
            break;
        }
        m += 1;
        d = d.derivative();
    }
    m
}

/// All distinct real roots of `p` as isolating intervals sorted ascending.
/// Rational roots are returned with `lo == hi`.
pub fn real_roots(p: &RationalPoly) -> Result<Vec<IsolatedRoot>, PolyError> {
    if p.is_zero() {
        return Err(PolyError::IndeterminateRootSet);
    }
    if p.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let sqf = p.square_free();
    let chain = SturmChain::new(&sqf);
    let b = cauchy_bound(&sqf);
    let lead = sqf.primitive_leading();
    let gap = Rational::new(BigInt::one(), &lead * &lead * BigInt::from(2));

    let mut stack = vec![(-b.clone(), b.clone())];
    let mut found: Vec<(Rational, Rational)> = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        let n = chain.count(&lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 {
            found.push((lo, hi));
            continue;
        }
        let mid = (&lo + &hi) / int(2);
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    found.sort();

    let mut out = Vec::with_capacity(found.len());
    for (lo, hi) in found {
        let (mut lo, mut hi) = tighten(&sqf, &chain, lo, hi);
        if lo != hi {
            while &hi - &lo > gap {
                if bisect_once(&sqf, &mut lo, &mut hi) {
                    break;
                }
            }
            if lo != hi {
                let cand = simplest_between(&lo, &hi);
                if sqf.eval(&cand).is_zero() {
                    lo = cand.clone();
                    hi = cand;
                }
            }
        }
        let m = multiplicity(p, &sqf, &lo, &hi);
        out.push(IsolatedRoot {
            lo,
            hi,
            multiplicity_hint: m,
        });
    }
    Ok(out)
}

/// Roots of `p` lying in the closed interval `[lo, hi]`.
pub fn real_roots_in(p: &RationalPoly, lo: &Rational, hi: &Rational) -> Result<Vec<IsolatedRoot>, PolyError> {
    let all = real_roots(p)?;
    let mut out = Vec::new();
    for r in all {
        if cmp_root_rational(p, &r, lo) != Ordering::Less && cmp_root_rational(p, &r, hi) != Ordering::Greater {
            out.push(r);
        }
    }
    Ok(out)
}

/// Narrows `r` to width at most `tol` by sign-preserving bisection.
pub fn refine(r: &IsolatedRoot, p: &RationalPoly, tol: &Rational) -> IsolatedRoot {
    if r.lo == r.hi {
        return r.clone();
    }
    let sqf = p.square_free();
    let mut lo = r.lo.clone();
    let mut hi = r.hi.clone();
    while &(&hi - &lo) > tol {
        if bisect_once(&sqf, &mut lo, &mut hi) {
            break;
        }
    }
    IsolatedRoot {
        lo,
        hi,
        multiplicity_hint: r.multiplicity_hint,
    }
}

/// Sign of `q` at the root of `p` isolated by `r`, decided exactly.
pub fn sign_at_root(p: &RationalPoly, r: &IsolatedRoot, q: &RationalPoly) -> i32 {
    if q.is_zero() {
        return 0;
    }
    if let Some(x) = r.as_exact() {
        return q.sign_at(x);
    }
    let sqf = p.square_free();
    let g = RationalPoly::gcd(&sqf, q);
    if g.degree().unwrap_or(0) > 0 {
        let gc = SturmChain::new(&g.square_free());
        if gc.count(&r.lo, &r.hi) > 0 {
            return 0;
        }
    }
    let qs = q.square_free();
    let qc = SturmChain::new(&qs);
    let mut lo = r.lo.clone();
    let mut hi = r.hi.clone();
    loop {
        if qc.count(&lo, &hi) == 0 && !qs.eval(&lo).is_zero() {
            return q.sign_at(&hi);
        }
        if bisect_once(&sqf, &mut lo, &mut hi) {
            return q.sign_at(&lo);
        }
    }
}

/// Exact comparison of a root of `p` with a rational.
pub fn cmp_root_rational(p: &RationalPoly, r: &IsolatedRoot, x: &Rational) -> Ordering {
    sign_at_root(p, r, &RationalPoly::linear_root(x)).cmp(&0)
}

/// Exact comparison of a root of `p` with a root of `q`.
pub fn cmp_roots(p: &RationalPoly, r: &IsolatedRoot, q: &RationalPoly, t: &IsolatedRoot) -> Ordering {
    if let Some(x) = t.as_exact() {
        return cmp_root_rational(p, r, x);
    }
    if let Some(x) = r.as_exact() {
        return cmp_root_rational(q, t, x).reverse();
    }
    let g = RationalPoly::gcd(&p.square_free(), &q.square_free());
    let lo = (&r.lo).max(&t.lo).clone();
    let hi = (&r.hi).min(&t.hi).clone();
    if lo < hi && g.degree().unwrap_or(0) > 0 {
        // A common root inside both intervals is the root of each.
        let gs = g.square_free();
        let gc = SturmChain::new(&gs);
        let inside = gc.count(&lo, &hi) > 0 || gs.eval(&lo).is_zero();
        if inside {
            return Ordering::Equal;
        }
    }
    let (mut a, mut b) = (r.clone(), t.clone());
    let (ps, qs) = (p.square_free(), q.square_free());
    loop {
        if a.hi < b.lo {
            return Ordering::Less;
        }
        if b.hi < a.lo {
            return Ordering::Greater;
        }
        if a.lo != a.hi && bisect_once(&ps, &mut a.lo, &mut a.hi) {
            return cmp_root_rational(q, &b, &a.lo).reverse();
        }
        if b.lo != b.hi && bisect_once(&qs, &mut b.lo, &mut b.hi) {
            return cmp_root_rational(p, &a, &b.lo);
        }
    }
}

/// Discriminant of a cubic `c3 x^3 + c2 x^2 + c1 x + c0`.
pub fn cubic_discriminant(p: &RationalPoly) -> Result<Rational, PolyError> {
    if p.degree() != Some(3) {
        return Err(PolyError::DegreeMismatch {
            expected: 3,
            found: p.degree(),
        });
    }
    let (a, b, c, d) = (p.coeff(3), p.coeff(2), p.coeff(1), p.coeff(0));
    Ok(&b * &b * &c * &c - int(4) * &a * &c * &c * &c - int(4) * &b * &b * &b * &d
        - int(27) * &a * &a * &d * &d
        + int(18) * &a * &b * &c * &d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chern::rat;
    use proptest::prelude::*;

    fn poly(c: &[i64]) -> RationalPoly {
        RationalPoly::from_ints(c)
    }

    #[test]
    fn cube_root_example() {
        let p = poly(&[3, 0, 0, 1]);
        let roots = real_roots(&p).unwrap();
        assert_eq!(roots.len(), 1);
        let r = refine(&roots[0], &p, &rat(1, 1_000_000));
        assert!(r.width() <= rat(1, 1_000_000));
        assert!((r.approx() + 3f64.cbrt()).abs() < 1e-6);
    }

    #[test]
    fn no_real_roots() {
        assert!(real_roots(&poly(&[1, 0, 1])).unwrap().is_empty());
        assert_eq!(real_roots(&RationalPoly::zero()), Err(PolyError::IndeterminateRootSet));
    }

    #[test]
    fn rational_roots_are_exact() {
        let roots = real_roots(&poly(&[6, 13, 9, 2])).unwrap();
        let exact: Vec<Rational> = roots.iter().map(|r| r.as_exact().unwrap().clone()).collect();
        assert_eq!(exact, vec![int(-2), rat(-3, 2), int(-1)]);
    }

    #[test]
    fn refine_examples() {
        let r = IsolatedRoot::exact(int(-2), 1);
        assert_eq!(refine(&r, &poly(&[6, 13, 9, 2]), &rat(1, 10)), r);
        let p = poly(&[-2, 0, 1]);
        let r = IsolatedRoot {
            lo: int(1),
            hi: int(2),
            multiplicity_hint: 1,
        };
        let t = refine(&r, &p, &rat(1, 1000));
        assert!(t.width() <= rat(1, 1000));
        assert!((t.approx() - 2f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(cubic_discriminant(&poly(&[3, 0, 0, 1])).unwrap(), int(-243));
        assert_eq!(cubic_discriminant(&poly(&[0, -1, 0, 1])).unwrap(), int(4));
        // (x-1)^2 (x+2) = x^3 - 3x + 2
        assert_eq!(cubic_discriminant(&poly(&[2, -3, 0, 1])).unwrap(), int(0));
        assert!(cubic_discriminant(&poly(&[1, 1])).is_err());
    }

    #[test]
    fn multiplicity_hints() {
        // (x-1)^2 (x+2)
        let roots = real_roots(&poly(&[2, -3, 0, 1])).unwrap();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0].multiplicity_hint, 1);
        assert_eq!(roots[1].multiplicity_hint, 2);
        // (x^2 - 2)^2 has two double irrational roots
        let p = &poly(&[-2, 0, 1]) * &poly(&[-2, 0, 1]);
        let roots = real_roots(&p).unwrap();
        assert!(roots.iter().all(|r| r.multiplicity_hint == 2 && r.as_exact().is_none()));
    }

    #[test]
    fn sign_at_root_cases() {
        let p = poly(&[-2, 0, 1]);
        let roots = real_roots(&p).unwrap();
        // x - 1 at sqrt 2 is positive, at -sqrt 2 negative.
        assert_eq!(sign_at_root(&p, &roots[1], &poly(&[-1, 1])), 1);
        assert_eq!(sign_at_root(&p, &roots[0], &poly(&[-1, 1])), -1);
        // x^2 - 2 vanishes at either root.
        assert_eq!(sign_at_root(&p, &roots[0], &poly(&[-2, 0, 1])), 0);
        // x^4 - 4 vanishes too.
        assert_eq!(sign_at_root(&p, &roots[1], &poly(&[-4, 0, 0, 0, 1])), 0);
        // compare sqrt 2 with cbrt 3
        let q = poly(&[-3, 0, 0, 1]);
        let t = real_roots(&q).unwrap();
        assert_eq!(cmp_roots(&p, &roots[1], &q, &t[0]), Ordering::Less);
        assert_eq!(cmp_roots(&p, &roots[1], &(&p * &q), &real_roots(&(&p * &q)).unwrap()[1]), Ordering::Equal);
    }

    #[test]
    fn surd_signs() {
        // 3 - 2 sqrt 2 > 0, 1 - sqrt 2 < 0, 2 - sqrt 4 = 0
        assert_eq!(QuadraticSurd::new(int(3), int(-2), int(2)).sign(), 1);
        assert_eq!(QuadraticSurd::new(int(1), int(-1), int(2)).sign(), -1);
        assert_eq!(QuadraticSurd::new(int(2), int(-1), int(4)).sign(), 0);
        let s = QuadraticSurd::new(int(1), int(1), int(2));
        let sq = s.mul(&s);
        assert_eq!(sq, QuadraticSurd::new(int(3), int(2), int(2)));
        let enc = s.enclose(&rat(1, 1000));
        assert!(enc.width() <= rat(1, 1000));
        assert!(enc.lo < rat(241422, 100_000) && enc.hi > rat(241421, 100_000));
    }

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_between(&rat(-31, 20), &rat(-29, 20)), rat(-3, 2));
        assert_eq!(simplest_between(&rat(1, 3), &rat(1, 3)), rat(1, 3));
        assert_eq!(simplest_between(&rat(3, 10), &rat(2, 5)), rat(1, 3));
    }

    /// Oracle: scan a grid and bisect cells with interval enclosures of the
    /// square-free part and its derivative, without any Sturm sequence.
    fn grid_root_count(p: &RationalPoly) -> usize {
        fn cell(f: &RationalPoly, df: &RationalPoly, lo: &Rational, hi: &Rational, depth: u32) -> usize {
            let iv = Interval::new(lo.clone(), hi.clone());
            let e = f.eval_interval(&iv);
            if e.lo.is_positive() || e.hi.is_negative() {
                return 0;
            }
            let (sl, sh) = (f.sign_at(lo), f.sign_at(hi));
            let d = df.eval_interval(&iv);
            let monotone = d.lo.is_positive() || d.hi.is_negative();
            if monotone {
                return usize::from(sh == 0 || (sl != 0 && sl != sh));
            }
            if depth == 0 {
                return usize::from(sh == 0 || (sl != 0 && sl != sh));
            }
            let mid = (lo + hi) / int(2);
            cell(f, df, lo, &mid, depth - 1) + cell(f, df, &mid, hi, depth - 1)
        }
        let sqf = p.square_free();
        let dsqf = sqf.derivative();
        let b = cauchy_bound(&sqf);
        let steps = 64;
        let h = &b * int(2) / int(steps);
        let mut count = usize::from(sqf.eval(&-b.clone()).is_zero());
        for i in 0..steps {
            let lo = -&b + &h * int(i);
            let hi = &lo + &h;
            count += cell(&sqf, &dsqf, &lo, &hi, 30);
        }
        count
    }

    fn arb_poly() -> impl Strategy<Value = RationalPoly> {
        prop::collection::vec((-6i64..=6, 1i64..=3), 2..=7).prop_map(|cs| {
            RationalPoly::new(cs.into_iter().map(|(n, d)| rat(n, d)).collect())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]

        #[test]
        fn root_count_matches_grid_oracle(p in arb_poly()) {
            prop_assume!(p.degree().unwrap_or(0) >= 1);
            let roots = real_roots(&p).unwrap();
            prop_assert_eq!(roots.len(), grid_root_count(&p));
            for w in roots.windows(2) {
                prop_assert!(w[0].hi <= w[1].lo);
            }
            let sqf = p.square_free();
            for r in &roots {
                if let Some(x) = r.as_exact() {
                    prop_assert!(p.eval(x).is_zero());
                } else {
                    prop_assert!(sqf.sign_at(&r.lo) * sqf.sign_at(&r.hi) < 0);
                }
            }
        }

        #[test]
        fn roots_of_product_are_union(p in arb_poly(), q in arb_poly()) {
            prop_assume!(p.degree().unwrap_or(0) >= 1 && q.degree().unwrap_or(0) >= 1);
            let pq = &p * &q;
            let rp = real_roots(&p).unwrap();
            let rq = real_roots(&q).unwrap();
            let rpq = real_roots(&pq).unwrap();
            for r in &rpq {
                let in_p = rp.iter().any(|s| cmp_roots(&pq, r, &p, s) == Ordering::Equal);
                let in_q = rq.iter().any(|s| cmp_roots(&pq, r, &q, s) == Ordering::Equal);
                prop_assert!(in_p || in_q);
            }
            for s in rp.iter() {
                prop_assert!(rpq.iter().any(|r| cmp_roots(&p, s, &pq, r) == Ordering::Equal));
            }
            for s in rq.iter() {
                prop_assert!(rpq.iter().any(|r| cmp_roots(&q, s, &pq, r) == Ordering::Equal));
            }
        }

        #[test]
        fn discriminant_sign_matches_root_count(c in prop::collection::vec(-5i64..=5, 3), lead in 1i64..=3) {
            let p = RationalPoly::new(vec![int(c[0]), int(c[1]), int(c[2]), int(lead)]);
            let d = cubic_discriminant(&p).unwrap();
            let n = real_roots(&p).unwrap().len();
            match sign(&d) {
                1 => prop_assert_eq!(n, 3),
                -1 => prop_assert_eq!(n, 1),
                _ => prop_assert!(n < 3),
            }
        }
    }
}
