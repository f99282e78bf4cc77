//! Exact polynomial and rational-map arithmetic over arbitrary-precision
//! rationals, with Sturm-sequence real root counting.
//!
//! Everything in this module is exact; floating point only enters through
//! [`RatMapEval`], the dual-chart f64 evaluator used by the dynamics code.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

#[derive(Debug, thiserror::Error)]
pub enum RatFuncError {
    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,
    #[error("sturm_count requires a nonzero polynomial")]
    ZeroPolynomial,
    #[error("indeterminate form 0/0 in reduced rational map (internal corruption)")]
    IndeterminateForm,
    #[error("malformed polynomial literal: {0}")]
    Parse(String),
}

/// Dense univariate polynomial, coefficients ascending by degree.
/// Invariant: no trailing zero coefficient (zero polynomial = empty vec).
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Rat>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{}", c),
                1 => format!("({})x", c),
                _ => format!("({})x^{}", c, i),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Polynomial::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn x() -> Self {
        Polynomial::new(vec![Rat::zero(), Rat::one()])
    }

    /// x - a
    pub fn linear_root(a: &Rat) -> Self {
        Polynomial::new(vec![-a.clone(), Rat::one()])
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Polynomial::new(cs.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero);
            let b = other.coeffs.get(i).cloned().unwrap_or_else(Rat::zero);
            out.push(a + b);
        }
        Polynomial::new(out)
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn scale(&self, c: &Rat) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * rat_int(i as i64 + 1))
                .collect(),
        )
    }

    /// Formal antiderivative with constant term 0.
    pub fn integral(&self) -> Polynomial {
        let mut out = vec![Rat::zero()];
        for (i, c) in self.coeffs.iter().enumerate() {
            out.push(c / rat_int(i as i64 + 1));
        }
        Polynomial::new(out)
    }

    pub fn compose(&self, inner: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Polynomial::constant(c.clone()));
        }
        acc
    }

    /// Euclidean division; the divisor must be nonzero.
    pub fn divrem(&self, d: &Polynomial) -> Result<(Polynomial, Polynomial), RatFuncError> {
        if d.is_zero() {
            return Err(RatFuncError::DivisionByZeroPolynomial);
        }
        let dd = d.degree().unwrap();
        let lead = d.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() < d.coeffs.len() {
            return Ok((Polynomial::zero(), self.clone()));
        }
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let q = &rem[i] / &lead;
            if !q.is_zero() {
                for j in 0..=dd {
                    let t = &q * &d.coeffs[j];
                    rem[i - dd + j] -= t;
                }
            }
            quot[i - dd] = q;
        }
        rem.truncate(dd);
        Ok((Polynomial::new(quot), Polynomial::new(rem)))
    }

    /// Exact division; errors via the remainder being returned if nonzero.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        let (q, r) = self.divrem(d).ok()?;
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Rescale by a positive rational so the coefficients become coprime
    /// integers; signs are preserved. Tames the coefficient blowup in
    /// Euclidean remainder sequences.
    pub fn primitive_scaled(&self) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| num::Integer::lcm(&acc, c.denom()));
        let gcd = self.coeffs.iter().fold(BigInt::zero(), |acc, c| {
            num::Integer::gcd(&acc, &(c.numer() * &lcm / c.denom()))
        });
        let scale = Rat::new(lcm, gcd);
        self.scale(&scale)
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let mut a = self.primitive_scaled();
        let mut b = other.primitive_scaled();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b).expect("nonzero divisor");
            a = b;
            b = r.primitive_scaled();
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.leading().unwrap().clone();
        a.scale(&(Rat::one() / lead))
    }

    /// p / gcd(p, p'): same real roots, all simple.
    pub fn squarefree_part(&self) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            return self.clone();
        }
        self.div_exact(&g).expect("gcd divides")
    }

    /// Sign of p(x) as x -> +inf.
    pub fn sign_at_pos_inf(&self) -> i8 {
        match self.leading() {
            None => 0,
            Some(c) => rat_sign(c),
        }
    }

    /// Sign of p(x) as x -> -inf.
    pub fn sign_at_neg_inf(&self) -> i8 {
        match self.degree() {
            None => 0,
            Some(d) => {
                let s = rat_sign(self.leading().unwrap());
                if d % 2 == 0 {
                    s
                } else {
                    -s
                }
            }
        }
    }

    /// p(m(x)) * (cx+d)^deg(p) for the Moebius map m = (ax+b)/(cx+d).
    pub fn compose_mobius(&self, m: &Mobius) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let deg = self.degree().unwrap();
        let top = Polynomial::new(vec![m.b.clone(), m.a.clone()]);
        let bot = Polynomial::new(vec![m.d.clone(), m.c.clone()]);
        let mut out = Polynomial::zero();
        // precompute powers
        let mut top_pows = vec![Polynomial::one()];
        let mut bot_pows = vec![Polynomial::one()];
        for i in 0..deg {
            top_pows.push(top_pows[i].mul(&top));
            bot_pows.push(bot_pows[i].mul(&bot));
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out = out.add(&top_pows[i].mul(&bot_pows[deg - i]).scale(c));
        }
        out
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat_to_f64).collect()
    }
}

pub fn rat_sign(r: &Rat) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // num's ToPrimitive on BigRational is exactness-limited for huge
    // numerators; go through a scaled integer division instead.
    use num::ToPrimitive;
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back: shift into f64 range.
    let num_bits = r.numer().bits() as i64;
    let den_bits = r.denom().bits() as i64;
    let shift = (num_bits - den_bits).max(0).min(60) as u64;
    let q = r.numer() / (r.denom() << shift);
    q.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

/// Serialize a rational as "num/den" (or "num" when integral).
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_from_string(s: &str) -> Result<Rat, RatFuncError> {
    let s = s.trim();
    let parse_int =
        |t: &str| BigInt::from_str(t.trim()).map_err(|_| RatFuncError::Parse(t.to_string()));
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(RatFuncError::Parse(s.to_string()));
            }
            Ok(Rat::new(parse_int(n)?, d))
        }
        None => Ok(Rat::from(parse_int(s)?)),
    }
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    coeffs: Vec<String>,
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        PolyJson {
            coeffs: self.coeffs.iter().map(rat_to_string).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = PolyJson::deserialize(de)?;
        let coeffs = raw
            .coeffs
            .iter()
            .map(|s| rat_from_string(s).map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Polynomial::new(coeffs))
    }
}

/// A point of the real projective line.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ProjPoint {
    Finite(Rat),
    Infinity,
}

impl ProjPoint {
    pub fn finite(r: Rat) -> Self {
        ProjPoint::Finite(r)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ProjPoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<&Rat> {
        match self {
            ProjPoint::Finite(r) => Some(r),
            ProjPoint::Infinity => None,
        }
    }

    pub fn to_string_exact(&self) -> String {
        match self {
            ProjPoint::Finite(r) => rat_to_string(r),
            ProjPoint::Infinity => "inf".to_string(),
        }
    }

    pub fn from_string_exact(s: &str) -> Result<Self, RatFuncError> {
        if s.trim() == "inf" {
            Ok(ProjPoint::Infinity)
        } else {
            Ok(ProjPoint::Finite(rat_from_string(s)?))
        }
    }
}

/// Moebius map (a x + b) / (c x + d), det = ad - bc != 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mobius {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
    pub d: Rat,
}

impl Mobius {
    pub fn new(a: Rat, b: Rat, c: Rat, d: Rat) -> Self {
        let m = Mobius { a, b, c, d };
        assert!(!m.det().is_zero(), "degenerate Moebius map");
        m
    }

    pub fn identity() -> Self {
        Mobius::new(Rat::one(), Rat::zero(), Rat::zero(), Rat::one())
    }

    /// x -> -x
    pub fn negate() -> Self {
        Mobius::new(-Rat::one(), Rat::zero(), Rat::zero(), Rat::one())
    }

    /// x -> -1/x (orientation-preserving involution swapping 0 and inf).
    pub fn neg_recip() -> Self {
        Mobius::new(Rat::zero(), -Rat::one(), Rat::one(), Rat::zero())
    }

    pub fn det(&self) -> Rat {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn is_orientation_preserving(&self) -> bool {
        self.det().is_positive()
    }

    pub fn inverse(&self) -> Mobius {
        Mobius::new(self.d.clone(), -self.b.clone(), -self.c.clone(), self.a.clone())
    }

    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        match p {
            ProjPoint::Finite(x) => {
                let den = &self.c * x + &self.d;
                if den.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite((&self.a * x + &self.b) / den)
                }
            }
            ProjPoint::Infinity => {
                if self.c.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(&self.a / &self.c)
                }
            }
        }
    }
}

/// Reduced rational map num/den on the projective line.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RationalMap {
    num: Polynomial,
    den: Polynomial,
}

impl RationalMap {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, RatFuncError> {
        if den.is_zero() {
            return Err(RatFuncError::DivisionByZeroPolynomial);
        }
        if num.is_zero() {
            return Ok(RationalMap {
                num,
                den: Polynomial::one(),
            });
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides"),
                den.div_exact(&g).expect("gcd divides"),
            )
        };
        // Normalize: den has positive leading coefficient.
        let lead = den.leading().unwrap();
        if lead.is_negative() {
            num = num.neg();
            den = den.neg();
        }
        Ok(RationalMap { num, den })
    }

    pub fn identity() -> Self {
        RationalMap::new(Polynomial::x(), Polynomial::one()).unwrap()
    }

    pub fn from_mobius(m: &Mobius) -> Self {
        RationalMap::new(
            Polynomial::new(vec![m.b.clone(), m.a.clone()]),
            Polynomial::new(vec![m.d.clone(), m.c.clone()]),
        )
        .unwrap()
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    /// Projective evaluation; poles map to infinity, and the value at
    /// infinity follows the degree / leading-coefficient rule.
    pub fn eval(&self, p: &ProjPoint) -> Result<ProjPoint, RatFuncError> {
        match p {
            ProjPoint::Finite(x) => {
                let n = self.num.eval(x);
                let d = self.den.eval(x);
                if d.is_zero() {
                    if n.is_zero() {
                        return Err(RatFuncError::IndeterminateForm);
                    }
                    Ok(ProjPoint::Infinity)
                } else {
                    Ok(ProjPoint::Finite(n / d))
                }
            }
            ProjPoint::Infinity => {
                let dn = self.num.degree();
                let dd = self.den.degree();
                match (dn, dd) {
                    (None, _) => Ok(ProjPoint::Finite(Rat::zero())),
                    (Some(a), Some(b)) if a > b => Ok(ProjPoint::Infinity),
                    (Some(a), Some(b)) if a < b => Ok(ProjPoint::Finite(Rat::zero())),
                    (Some(_), Some(_)) => Ok(ProjPoint::Finite(
                        self.num.leading().unwrap() / self.den.leading().unwrap(),
                    )),
                    (Some(_), None) => unreachable!("den nonzero"),
                }
            }
        }
    }

    /// Derivative as a rational map: (n'd - nd') / d^2.
    pub fn derivative_map(&self) -> RationalMap {
        let w = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        RationalMap::new(w, self.den.mul(&self.den)).expect("den^2 nonzero")
    }

    /// Numerator of the derivative before reduction: n'd - nd'.
    pub fn derivative_numerator(&self) -> Polynomial {
        self.num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()))
    }

    /// Exact derivative value at a finite non-pole point.
    pub fn derivative_at(&self, x: &Rat) -> Option<Rat> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return None;
        }
        let w = self.derivative_numerator().eval(x);
        Some(w / (&d * &d))
    }

    /// Precompose with a Moebius map: x -> self(m(x)).
    pub fn precompose_mobius(&self, m: &Mobius) -> RationalMap {
        let dn = self.num.degree().unwrap_or(0);
        let dd = self.den.degree().unwrap_or(0);
        let deg = dn.max(dd);
        let bot = Polynomial::new(vec![m.d.clone(), m.c.clone()]);
        // Pad both to common homogeneous degree so the bot^deg factors cancel.
        let pad = |p: &Polynomial| -> Polynomial {
            let pd = p.degree().unwrap_or(0);
            p.compose_mobius(m).mul(&bot.pow((deg - pd) as u32))
        };
        RationalMap::new(pad(&self.num), pad(&self.den)).expect("nondegenerate")
    }

    /// Postcompose with a Moebius map: x -> m(self(x)).
    pub fn postcompose_mobius(&self, m: &Mobius) -> RationalMap {
        let num = self.num.scale(&m.a).add(&self.den.scale(&m.b));
        let den = self.num.scale(&m.c).add(&self.den.scale(&m.d));
        RationalMap::new(num, den).expect("nondegenerate")
    }
}

/// Interval endpoint for root counting.
#[derive(Clone, Debug)]
pub enum Bound {
    NegInf,
    Finite(Rat),
    PosInf,
}

fn sign_at_bound(p: &Polynomial, b: &Bound) -> i8 {
    match b {
        Bound::NegInf => p.sign_at_neg_inf(),
        Bound::PosInf => p.sign_at_pos_inf(),
        Bound::Finite(x) => rat_sign(&p.eval(x)),
    }
}

fn sturm_chain(p: &Polynomial) -> Vec<Polynomial> {
    // positive rescaling of the chain elements preserves every sign, so
    // the variation counts are unchanged
    let p = p.primitive_scaled();
    let dp = p.derivative().primitive_scaled();
    let mut chain = vec![p, dp];
    while !chain.last().unwrap().is_zero() {
        let n = chain.len();
        let (_, r) = chain[n - 2].divrem(&chain[n - 1]).expect("nonzero");
        chain.push(r.neg().primitive_scaled());
    }
    chain.pop();
    chain
}

fn variations(chain: &[Polynomial], b: &Bound) -> usize {
    let mut count = 0;
    let mut last: i8 = 0;
    for p in chain {
        let s = sign_at_bound(p, b);
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Exact count of distinct real roots of `p` in the half-open interval
/// `(lo, hi]` (infinite endpoints allowed).
pub fn sturm_count(p: &Polynomial, lo: &Bound, hi: &Bound) -> Result<usize, RatFuncError> {
    if p.is_zero() {
        return Err(RatFuncError::ZeroPolynomial);
    }
    let mut q = p.squarefree_part();
    // Deflate roots sitting exactly on the endpoints so the Sturm counts
    // are taken with nonvanishing endpoint values.
    let mut hi_is_root = false;
    if let Bound::Finite(x) = hi {
        if q.eval(x).is_zero() {
            hi_is_root = true;
            q = q.div_exact(&Polynomial::linear_root(x)).expect("root divides");
        }
    }
    if let Bound::Finite(x) = lo {
        if q.eval(x).is_zero() {
            q = q.div_exact(&Polynomial::linear_root(x)).expect("root divides");
        }
    }
    let open_count = if q.degree().map_or(true, |d| d == 0) {
        0
    } else {
        let chain = sturm_chain(&q);
        let va = variations(&chain, lo);
        let vb = variations(&chain, hi);
        va.saturating_sub(vb)
    };
    Ok(open_count + usize::from(hi_is_root))
}

/// Count of distinct real roots over the whole line.
pub fn sturm_count_all(p: &Polynomial) -> Result<usize, RatFuncError> {
    sturm_count(p, &Bound::NegInf, &Bound::PosInf)
}

/// All distinct real roots of `p` as f64, sorted ascending. Roots are
/// isolated exactly with Sturm counts and then polished with Newton on
/// the squarefree part.
pub fn real_roots_f64(p: &Polynomial) -> Result<Vec<f64>, RatFuncError> {
    if p.is_zero() {
        return Err(RatFuncError::ZeroPolynomial);
    }
    let q = p.squarefree_part();
    let Some(deg) = q.degree() else {
        return Ok(Vec::new());
    };
    if deg == 0 {
        return Ok(Vec::new());
    }
    let total = sturm_count(&q, &Bound::NegInf, &Bound::PosInf)?;
    if total == 0 {
        return Ok(Vec::new());
    }
    // Cauchy root bound with slack
    let lead = rat_to_f64(&q.leading().expect("nonzero"));
    let bound = 2.0
        + q.coeffs()
            .iter()
            .map(|c| (rat_to_f64(c) / lead).abs())
            .fold(0.0f64, f64::max);
    let qf: Vec<f64> = q.coeffs().iter().map(rat_to_f64).collect();
    let qdf: Vec<f64> = q
        .derivative()
        .coeffs()
        .iter()
        .map(rat_to_f64)
        .collect();
    let mut out = Vec::new();
    let mut stack = vec![(-bound, bound)];
    while let Some((lo, hi)) = stack.pop() {
        let n = sturm_count(
            &q,
            &Bound::Finite(Rat::from_float(lo).expect("finite")),
            &Bound::Finite(Rat::from_float(hi).expect("finite")),
        )?;
        if n == 0 {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        if n == 1 && hi - lo < 1e-6 * (1.0 + mid.abs()) {
            // simple root of the squarefree part: Newton converges
            let mut x = mid;
            for _ in 0..60 {
                let v = horner(&qf, x);
                let dv = horner(&qdf, x);
                if dv == 0.0 || !dv.is_finite() {
                    break;
                }
                let step = v / dv;
                x -= step;
                if step.abs() < 1e-16 * (1.0 + x.abs()) {
                    break;
                }
            }
            out.push(x.clamp(lo, hi));
            continue;
        }
        stack.push((lo, mid));
        stack.push((mid, hi));
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    Ok(out)
}

// ---------------------------------------------------------------------------
// f64 evaluator
// ---------------------------------------------------------------------------

fn horner(cs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for c in cs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Minimal double-double value. The cover map can be nearly flat on long
/// stretches (its derivative dips below 1e-10 on some certified covers),
/// where plain f64 value arithmetic cannot resolve the inversion that
/// evaluates a lift; the compensated representation recovers ~32 digits
/// for exactly those residuals.
#[derive(Clone, Copy, Debug)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd {
            hi: s,
            lo: (a - (s - bb)) + (b - bb),
        }
    }

    fn two_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    pub fn add(self, o: Dd) -> Dd {
        let s = Self::two_sum(self.hi, o.hi);
        Self::quick_two_sum(s.hi, s.lo + self.lo + o.lo)
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = Self::two_prod(self.hi, o.hi);
        Self::quick_two_sum(p.hi, p.lo + self.hi * o.lo + self.lo * o.hi)
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let p = Self::two_prod(self.hi, b);
        Self::quick_two_sum(p.hi, p.lo + self.lo * b)
    }

    pub fn add_f64(self, b: f64) -> Dd {
        self.add(Dd::from_f64(b))
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r2 = r.sub(o.mul_f64(q2));
        let q3 = r2.hi / o.hi;
        Self::quick_two_sum(q1, q2).add_f64(q3)
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }

    /// Reduce into [0, 1) (the lo limb stays tiny, so subtracting the
    /// floor of the hi limb and renormalizing is exact).
    pub fn rem_euclid_one(self) -> Dd {
        let mut r = Self::quick_two_sum(self.hi - self.hi.floor(), self.lo);
        if r.hi >= 1.0 {
            r = r.add_f64(-1.0);
        }
        if r.hi < 0.0 {
            r = r.add_f64(1.0);
        }
        r
    }
}

/// pi in double-double.
pub const DD_PI: Dd = Dd {
    hi: std::f64::consts::PI,
    lo: 1.2246467991473532e-16,
};

/// sin(pi u) and cos(pi u) in double-double: reduce u modulo 1/2 so the
/// Taylor argument stays below pi/4, then recombine by quadrant.
pub fn sincos_pi_dd(u: Dd) -> (Dd, Dd) {
    let k = (u.hi * 2.0).round();
    let r = u.sub(Dd::from_f64(k * 0.5));
    let th = DD_PI.mul(r);
    let th2 = th.mul(th);
    // sin(th)/th and cos(th) as Taylor series; |th| <= pi/4, and 14 terms
    // put the truncation below the double-double noise floor
    let mut s = Dd::from_f64(0.0);
    let mut c = Dd::from_f64(0.0);
    let mut term = Dd::from_f64(1.0);
    let mut fact_s = 1.0f64;
    let mut fact_c = 1.0f64;
    for n in 0..14 {
        let m = 2.0 * n as f64;
        if n > 0 {
            fact_s *= m * (m + 1.0);
            fact_c *= (m - 1.0) * m;
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        s = s.add(term.mul_f64(sign / fact_s));
        c = c.add(term.mul_f64(sign / fact_c));
        term = term.mul(th2);
    }
    s = s.mul(th);
    let k4 = ((k as i64) % 4 + 4) % 4;
    match k4 {
        0 => (s, c),
        1 => (c, s.neg()),
        2 => (s.neg(), c.neg()),
        _ => (c.neg(), s),
    }
}

/// Double-double chart coordinate of u: tan(pi u) on the lo chart,
/// -cot(pi u) on the hi chart (chosen so |w| <= 1).
pub fn u_to_chart_dd(u: Dd) -> (Dd, bool) {
    let (s, c) = sincos_pi_dd(u);
    if s.hi.abs() <= c.hi.abs() {
        (s.div(c), true)
    } else {
        (c.neg().div(s), false)
    }
}

/// Additive coordinate of the projective fraction n/d in double-double:
/// start from the f64 arctangent and apply one compensated Newton step
/// on sin(pi u) d - cos(pi u) n = 0.
pub fn frac_to_u_dd(n: Dd, d: Dd) -> Dd {
    let u0 = frac_to_u(n.to_f64(), d.to_f64());
    let (s, c) = sincos_pi_dd(Dd::from_f64(u0));
    let f = s.mul(d).sub(c.mul(n));
    let fp = DD_PI.mul(c.mul(d).add(s.mul(n)));
    if fp.hi == 0.0 {
        return Dd::from_f64(u0);
    }
    Dd::from_f64(u0).sub(f.div(fp)).rem_euclid_one()
}

fn horner_dd_full(cs: &[Dd], x: Dd) -> Dd {
    let mut acc = Dd::from_f64(0.0);
    for c in cs.iter().rev() {
        acc = acc.mul(x).add(*c);
    }
    acc
}

fn horner_dd2(cs: &[Dd], x: f64) -> Dd {
    let mut acc = Dd::from_f64(0.0);
    for c in cs.iter().rev() {
        acc = acc.mul_f64(x).add(*c);
    }
    acc
}

/// Split an exact rational into a double-double (hi = nearest f64,
/// lo = nearest f64 of the remainder). Certified covers can carry chart
/// coefficients around 1e19, where the f64 rounding of a single
/// coefficient already exceeds the polynomial's true value near a
/// high-order ramification point; keeping the second limb preserves the
/// root structure down to ~1e-32 relative.
pub fn rat_to_dd(r: &Rat) -> Dd {
    let hi = rat_to_f64(r);
    if !hi.is_finite() {
        return Dd::from_f64(hi);
    }
    let rem = r - Rat::from_float(hi).unwrap_or_else(Rat::zero);
    Dd {
        hi,
        lo: rat_to_f64(&rem),
    }
}

fn to_dd_coeffs(p: &Polynomial) -> Vec<Dd> {
    p.coeffs().iter().map(rat_to_dd).collect()
}

/// Homogeneous reversal of `to_dd_coeffs`.
fn hi_chart_dd_coeffs(p: &Polynomial, deg_total: usize) -> Vec<Dd> {
    let mut out = vec![Dd::from_f64(0.0); deg_total + 1];
    for (i, c) in p.coeffs().iter().enumerate() {
        let v = rat_to_dd(c);
        out[deg_total - i] = if i % 2 == 1 { v.neg() } else { v };
    }
    while out.last().map_or(false, |c| c.hi == 0.0 && c.lo == 0.0) {
        out.pop();
    }
    out
}

/// Homogeneous reversal: coefficients of y^deg_total * p(-1/y).
fn hi_chart_coeffs(p: &Polynomial, deg_total: usize) -> Vec<f64> {
    let mut out = vec![0.0; deg_total + 1];
    for (i, c) in p.coeffs().iter().enumerate() {
        let v = rat_to_f64(c);
        out[deg_total - i] = if i % 2 == 1 { -v } else { v };
    }
    while out.last().map_or(false, |c| *c == 0.0) {
        out.pop();
    }
    out
}

/// Dual-chart floating evaluator for a rational map on the circle.
///
/// Points live in the additive coordinate u in [0,1); the projective
/// coordinate is x = tan(pi u), with the chart y = -1/x used when |x| > 1
/// so that nothing overflows near u = 1/2.
#[derive(Clone, Debug)]
pub struct RatMapEval {
    num_lo: Vec<f64>,
    den_lo: Vec<f64>,
    dnum_lo: Vec<f64>,
    dden_lo: Vec<f64>,
    num_hi: Vec<f64>,
    den_hi: Vec<f64>,
    dnum_hi: Vec<f64>,
    dden_hi: Vec<f64>,
    num_lo_dd: Vec<Dd>,
    den_lo_dd: Vec<Dd>,
    num_hi_dd: Vec<Dd>,
    den_hi_dd: Vec<Dd>,
}

/// Convert additive coordinate u to chart value; returns (value, is_lo_chart).
pub fn u_to_chart(u: f64) -> (f64, bool) {
    let u = u.rem_euclid(1.0);
    if (0.25..=0.75).contains(&u) {
        // y = -cot(pi u), in [-1, 1] on this range
        let y = -1.0 / (std::f64::consts::PI * u).tan();
        (y, false)
    } else {
        ((std::f64::consts::PI * u).tan(), true)
    }
}

/// Additive coordinate of a finite projective x.
pub fn x_to_u(x: f64) -> f64 {
    if x.is_infinite() {
        return 0.5;
    }
    if x.abs() <= 1.0 {
        (x.atan() / std::f64::consts::PI).rem_euclid(1.0)
    } else {
        (0.5 + (-1.0 / x).atan() / std::f64::consts::PI).rem_euclid(1.0)
    }
}

/// Additive coordinate of a fraction n/d (robust at poles: d = 0 -> u = 1/2).
pub fn frac_to_u(n: f64, d: f64) -> f64 {
    if n.abs() <= d.abs() {
        ((n / d).atan() / std::f64::consts::PI).rem_euclid(1.0)
    } else {
        (0.5 + (-d / n).atan() / std::f64::consts::PI).rem_euclid(1.0)
    }
}

/// u-coordinate of an exact projective point.
pub fn proj_to_u(p: &ProjPoint) -> f64 {
    match p {
        ProjPoint::Finite(r) => x_to_u(rat_to_f64(r)),
        ProjPoint::Infinity => 0.5,
    }
}

/// Circle distance in the u metric.
pub fn circle_dist(u1: f64, u2: f64) -> f64 {
    let d = (u1 - u2).rem_euclid(1.0);
    d.min(1.0 - d)
}

impl RatMapEval {
    pub fn new(map: &RationalMap) -> Self {
        let dn = map.num().degree().unwrap_or(0);
        let dd = map.den().degree().unwrap_or(0);
        let deg = dn.max(dd);
        let num_lo = map.num().to_f64_coeffs();
        let den_lo = map.den().to_f64_coeffs();
        let dnum = map.num().derivative();
        let dden = map.den().derivative();
        RatMapEval {
            dnum_lo: dnum.to_f64_coeffs(),
            dden_lo: dden.to_f64_coeffs(),
            num_hi: hi_chart_coeffs(map.num(), deg),
            den_hi: hi_chart_coeffs(map.den(), deg),
            dnum_hi: hi_chart_coeffs(&dnum, deg.saturating_sub(1)),
            dden_hi: hi_chart_coeffs(&dden, deg.saturating_sub(1)),
            num_lo_dd: to_dd_coeffs(map.num()),
            den_lo_dd: to_dd_coeffs(map.den()),
            num_hi_dd: hi_chart_dd_coeffs(map.num(), deg),
            den_hi_dd: hi_chart_dd_coeffs(map.den(), deg),
            num_lo,
            den_lo,
        }
    }

    /// Value as an (unreduced) fraction in the projective coordinate.
    pub fn value_frac(&self, u: f64) -> (f64, f64) {
        let (w, lo) = u_to_chart(u);
        if lo {
            (horner(&self.num_lo, w), horner(&self.den_lo, w))
        } else {
            (horner(&self.num_hi, w), horner(&self.den_hi, w))
        }
    }

    /// Value as an (unreduced) fraction in the projective coordinate,
    /// computed in double-double arithmetic.
    pub fn value_frac_dd(&self, u: f64) -> (Dd, Dd) {
        let (w, lo) = u_to_chart(u);
        if lo {
            (horner_dd2(&self.num_lo_dd, w), horner_dd2(&self.den_lo_dd, w))
        } else {
            (horner_dd2(&self.num_hi_dd, w), horner_dd2(&self.den_hi_dd, w))
        }
    }

    /// Like `value_frac_dd`, but with a double-double input point, so the
    /// chart coordinate itself carries ~32 digits (needed when lifts are
    /// chained: the intermediate point must be resolved far below one ulp
    /// before a steep second lift amplifies it).
    pub fn value_frac_dd2(&self, u: Dd) -> (Dd, Dd) {
        let (w, lo) = u_to_chart_dd(u);
        if lo {
            (
                horner_dd_full(&self.num_lo_dd, w),
                horner_dd_full(&self.den_lo_dd, w),
            )
        } else {
            (
                horner_dd_full(&self.num_hi_dd, w),
                horner_dd_full(&self.den_hi_dd, w),
            )
        }
    }

    /// Map u upstairs to the u-coordinate of the image.
    pub fn value_u(&self, u: f64) -> f64 {
        let (n, d) = self.value_frac(u);
        frac_to_u(n, d)
    }

    /// Derivative of the induced circle map in the u coordinate.
    pub fn deriv_u(&self, u: f64) -> f64 {
        let (w, lo_chart) = u_to_chart(u);
        let (n, d, dn, dd) = if lo_chart {
            (
                horner(&self.num_lo, w),
                horner(&self.den_lo, w),
                horner(&self.dnum_lo, w),
                horner(&self.dden_lo, w),
            )
        } else {
            // hi chart: value = num_hi(y)/den_hi(y); its y-derivative is
            // obtained from the homogenized derivative coefficients via
            // d/dy [p(-1/y) y^D] = p'(-1/y) y^(D-2) + D y^(D-1) p(-1/y),
            // which we evaluate directly from the two chart polynomials.
            let nv = horner(&self.num_hi, w);
            let dv = horner(&self.den_hi, w);
            let deg = (self.num_hi.len().max(self.den_hi.len()) - 1) as f64;
            let np = horner(&self.dnum_hi, w);
            let dp = horner(&self.dden_hi, w);
            // y-derivatives of the chart numerator / denominator:
            let n_y = np / (w * w).max(f64::MIN_POSITIVE) * (w * w) // keep shape explicit
                ;
            let _ = n_y;
            // Simpler: differentiate P(y) = y^D p(-1/y): P'(y) = D y^{D-1} p(-1/y) + y^{D-2} p'(-1/y)
            //        = (D P(y) + Q(y)) / y, with Q(y) = y^{D-1} p'(-1/y).
            let n_dy = if w != 0.0 { (deg * nv + np) / w } else { f64::NAN };
            let d_dy = if w != 0.0 { (deg * dv + dp) / w } else { f64::NAN };
            if w == 0.0 {
                // u exactly 1/2: nudge
                let w2 = 1e-14;
                let nv2 = horner(&self.num_hi, w2);
                let dv2 = horner(&self.den_hi, w2);
                let np2 = horner(&self.dnum_hi, w2);
                let dp2 = horner(&self.dden_hi, w2);
                (nv2, dv2, (deg * nv2 + np2) / w2, (deg * dv2 + dp2) / w2)
            } else {
                (nv, dv, n_dy, d_dy)
            }
        };
        // chart-in factor du/dw = 1/(pi (1+w^2)); we need dw/du = pi(1+w^2)
        let in_factor = std::f64::consts::PI * (1.0 + w * w);
        let s = dn * d - n * dd; // shared derivative numerator in chart coords
        if n.abs() <= d.abs() {
            let v = n / d;
            let dv_dw = s / (d * d);
            in_factor * dv_dw / (std::f64::consts::PI * (1.0 + v * v))
        } else {
            let y = -d / n;
            let dy_dw = s / (n * n);
            in_factor * dy_dw / (std::f64::consts::PI * (1.0 + y * y))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_cube() {
        let p = Polynomial::from_ints(&[0, 0, 0, 1]);
        assert_eq!(p.derivative(), Polynomial::from_ints(&[0, 0, 3]));
    }

    #[test]
    fn gcd_is_monic_common_factor() {
        let a = Polynomial::from_ints(&[-1, 0, 1]); // x^2 - 1
        let b = Polynomial::from_ints(&[-1, 1]); // x - 1
        assert_eq!(a.gcd(&b), b);
    }

    #[test]
    fn compose_square_with_shift() {
        let sq = Polynomial::from_ints(&[0, 0, 1]);
        let shift = Polynomial::from_ints(&[1, 1]);
        assert_eq!(sq.compose(&shift), Polynomial::from_ints(&[1, 2, 1]));
    }

    #[test]
    fn sturm_basic_counts() {
        let p = Polynomial::from_ints(&[-1, 0, 1]); // x^2-1
        assert_eq!(
            sturm_count(&p, &Bound::Finite(rat_int(-2)), &Bound::Finite(rat_int(2))).unwrap(),
            2
        );
        let q = Polynomial::from_ints(&[1, 0, 1]); // x^2+1
        assert_eq!(sturm_count_all(&q).unwrap(), 0);
    }

    #[test]
    fn sturm_half_open_endpoints() {
        let p = Polynomial::from_ints(&[0, 1]); // x, root at 0
        assert_eq!(
            sturm_count(&p, &Bound::Finite(rat_int(0)), &Bound::Finite(rat_int(1))).unwrap(),
            0
        );
        assert_eq!(
            sturm_count(&p, &Bound::Finite(rat_int(-1)), &Bound::Finite(rat_int(0))).unwrap(),
            1
        );
    }

    #[test]
    fn sturm_multiple_roots_counted_once() {
        // (x-1)^3 (x+2)
        let p = Polynomial::from_ints(&[-1, 1]).pow(3).mul(&Polynomial::from_ints(&[2, 1]));
        assert_eq!(sturm_count_all(&p).unwrap(), 2);
    }

    #[test]
    fn ratmap_eval_pole_and_infinity() {
        // pi2(x) = (x+1)^2 (x-1)^2 / (x (x^2+1))
        let num = Polynomial::from_ints(&[1, 1]).pow(2).mul(&Polynomial::from_ints(&[-1, 1]).pow(2));
        let den = Polynomial::from_ints(&[0, 1]).mul(&Polynomial::from_ints(&[1, 0, 1]));
        let m = RationalMap::new(num, den).unwrap();
        assert_eq!(
            m.eval(&ProjPoint::Finite(rat_int(1))).unwrap(),
            ProjPoint::Finite(rat_int(0))
        );
        assert_eq!(m.eval(&ProjPoint::Finite(rat_int(0))).unwrap(), ProjPoint::Infinity);
        assert_eq!(m.eval(&ProjPoint::Infinity).unwrap(), ProjPoint::Infinity);
        let id = RationalMap::identity();
        assert_eq!(id.eval(&ProjPoint::Infinity).unwrap(), ProjPoint::Infinity);
    }

    #[test]
    fn reduction_invariant_after_arith() {
        let num = Polynomial::from_ints(&[-1, 0, 1]); // (x-1)(x+1)
        let den = Polynomial::from_ints(&[-1, 1]); // x-1
        let m = RationalMap::new(num, den).unwrap();
        assert_eq!(m.num(), &Polynomial::from_ints(&[1, 1]));
        assert_eq!(m.den(), &Polynomial::one());
        let d = m.derivative_map();
        assert_eq!(d.num().gcd(d.den()).degree(), Some(0));
    }

    #[test]
    fn mobius_precompose_matches_pointwise() {
        let num = Polynomial::from_ints(&[1, 2, 3]);
        let den = Polynomial::from_ints(&[5, 0, 1]);
        let m = RationalMap::new(num, den).unwrap();
        let mob = Mobius::new(rat_int(2), rat_int(1), rat_int(1), rat_int(3));
        let comp = m.precompose_mobius(&mob);
        for x in [-3i64, -1, 0, 2, 7] {
            let p = ProjPoint::Finite(rat_int(x));
            let expect = m.eval(&mob.apply(&p)).unwrap();
            assert_eq!(comp.eval(&p).unwrap(), expect);
        }
    }

    #[test]
    fn float_evaluator_matches_exact() {
        let num = Polynomial::from_ints(&[1, 1]).pow(2).mul(&Polynomial::from_ints(&[-1, 1]).pow(2));
        let den = Polynomial::from_ints(&[0, 1]).mul(&Polynomial::from_ints(&[1, 0, 1]));
        let m = RationalMap::new(num, den).unwrap();
        let ev = RatMapEval::new(&m);
        for &x in &[0.3, -0.7, 2.5, -4.0, 100.0] {
            let u = x_to_u(x);
            let exact = {
                let xr = rat_from_f64(x).unwrap();
                let n = m.num().eval(&xr);
                let d = m.den().eval(&xr);
                rat_to_f64(&(n / d))
            };
            let got_u = ev.value_u(u);
            assert!(
                circle_dist(got_u, x_to_u(exact)) < 1e-9,
                "x={x} got_u={got_u} expect={}",
                x_to_u(exact)
            );
        }
    }

    #[test]
    fn float_derivative_matches_finite_difference() {
        let num = Polynomial::from_ints(&[1, 1]).pow(2).mul(&Polynomial::from_ints(&[-1, 1]).pow(2));
        let den = Polynomial::from_ints(&[0, 1]).mul(&Polynomial::from_ints(&[1, 0, 1]));
        let m = RationalMap::new(num, den).unwrap();
        let ev = RatMapEval::new(&m);
        for &u in &[0.07, 0.18, 0.33, 0.52, 0.61, 0.77, 0.93] {
            let h = 1e-6;
            let a = ev.value_u(u - h);
            let b = ev.value_u(u + h);
            // unwrap across the seam
            let mut diff = b - a;
            if diff > 0.5 {
                diff -= 1.0;
            } else if diff < -0.5 {
                diff += 1.0;
            }
            let fd = diff / (2.0 * h);
            let got = ev.deriv_u(u);
            assert!(
                (got - fd).abs() <= 1e-4 * (1.0 + fd.abs()),
                "u={u} got={got} fd={fd}"
            );
        }
    }
}
