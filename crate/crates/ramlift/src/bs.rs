//! Exact algebra of BS(1,n) = <a, b | a b a^-1 = b^n>, affine maps of the
//! line, the standard projective action, and circle-point coordinates.
//!
//! An element is stored in affine normal form x |-> n^k x + t with
//! t = m / n^j in lowest n-adic terms; two words are equal in the group
//! exactly when their normal forms agree.

use crate::ratfunc::{rat_to_f64, ProjPoint, Rat};
use num::bigint::BigInt;
use num::{One, Zero};
use serde::Serialize;
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BsError {
    #[error("malformed word: unexpected character '{0}' (expected a, A, b, B)")]
    MalformedWord(char),
    #[error("group parameter mismatch: {0} vs {1}")]
    ParameterMismatch(u32, u32),
    #[error("translation part is not in Z[1/{0}]")]
    NotNAdic(u32),
    #[error("group parameter must be >= 2, got {0}")]
    BadParameter(u32),
}

/// Element of BS(1,n) in affine normal form x |-> n^k x + m/n^j,
/// with n not dividing m when j > 0.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct BSElement {
    n: u32,
    k: i64,
    #[serde(serialize_with = "ser_bigint")]
    m: BigInt,
    j: u32,
}

fn ser_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl fmt::Display for BSElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k={}, t={}/{}^{})", self.k, self.m, self.n, self.j)
    }
}

impl BSElement {
    pub fn identity(n: u32) -> Result<Self, BsError> {
        if n < 2 {
            return Err(BsError::BadParameter(n));
        }
        Ok(BSElement {
            n,
            k: 0,
            m: BigInt::zero(),
            j: 0,
        })
    }

    /// Generator a: x |-> n x.
    pub fn gen_a(n: u32) -> Result<Self, BsError> {
        let mut e = BSElement::identity(n)?;
        e.k = 1;
        Ok(e)
    }

    /// Generator b: x |-> x + 1.
    pub fn gen_b(n: u32) -> Result<Self, BsError> {
        let mut e = BSElement::identity(n)?;
        e.m = BigInt::one();
        Ok(e)
    }

    pub fn from_parts(n: u32, k: i64, t: Rat) -> Result<Self, BsError> {
        if n < 2 {
            return Err(BsError::BadParameter(n));
        }
        let nn = BigInt::from(n);
        // t is in Z[1/n] iff every prime factor of its reduced denominator
        // divides n; strip shared factors until the denominator is exhausted
        let mut den = t.denom().clone();
        let mut j = 0u32;
        while !den.is_one() {
            let g = num::Integer::gcd(&den, &nn);
            if g.is_one() {
                return Err(BsError::NotNAdic(n));
            }
            den /= g;
            j += 1;
        }
        // m = t * n^j is integral by construction of j
        let m = t.numer() * nn.pow(j) / t.denom();
        let mut e = BSElement { n, k, m, j };
        e.reduce();
        Ok(e)
    }

    fn reduce(&mut self) {
        let nn = BigInt::from(self.n);
        while self.j > 0 {
            let (q, r) = num::Integer::div_rem(&self.m, &nn);
            if !r.is_zero() {
                break;
            }
            self.m = q;
            self.j -= 1;
        }
        if self.m.is_zero() {
            self.j = 0;
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    /// Translation part t = m/n^j as an exact rational.
    pub fn t(&self) -> Rat {
        Rat::new(self.m.clone(), BigInt::from(self.n).pow(self.j))
    }

    pub fn is_identity(&self) -> bool {
        self.k == 0 && self.m.is_zero()
    }

    /// Slope n^k as an exact rational.
    pub fn slope(&self) -> Rat {
        let nn = BigInt::from(self.n);
        if self.k >= 0 {
            Rat::from(nn.pow(self.k as u32))
        } else {
            Rat::new(BigInt::one(), nn.pow((-self.k) as u32))
        }
    }
}

/// (g1 g2)(x) = g1(g2(x)): slope n^(k1+k2), offset t1 + n^k1 t2.
pub fn bs_mul(g1: &BSElement, g2: &BSElement) -> Result<BSElement, BsError> {
    if g1.n != g2.n {
        return Err(BsError::ParameterMismatch(g1.n, g2.n));
    }
    let t = g1.t() + g1.slope() * g2.t();
    BSElement::from_parts(g1.n, g1.k + g2.k, t)
}

pub fn bs_inv(g: &BSElement) -> BSElement {
    // inverse of x -> cx + t is x -> x/c - t/c
    let t = -g.t() / g.slope();
    BSElement::from_parts(g.n, -g.k, t).expect("n-adic closed under division by n^k")
}

pub fn bs_pow(g: &BSElement, e: i64) -> BSElement {
    let (base, n) = if e >= 0 { (g.clone(), e) } else { (bs_inv(g), -e) };
    let mut acc = BSElement::identity(g.n).unwrap();
    for _ in 0..n {
        acc = bs_mul(&acc, &base).unwrap();
    }
    acc
}

/// Parse a word over {a, A, b, B} (A = a^-1, B = b^-1); whitespace ignored.
pub fn word_to_element(word: &str, n: u32) -> Result<BSElement, BsError> {
    let mut acc = BSElement::identity(n)?;
    let a = BSElement::gen_a(n)?;
    let b = BSElement::gen_b(n)?;
    for ch in word.chars() {
        if ch.is_whitespace() {
            continue;
        }
        let g = match ch {
            'a' => a.clone(),
            'A' => bs_inv(&a),
            'b' => b.clone(),
            'B' => bs_inv(&b),
            other => return Err(BsError::MalformedWord(other)),
        };
        acc = bs_mul(&acc, &g)?;
    }
    Ok(acc)
}

/// Affine map x |-> c x + d on the line (c != 0), with an exact rational
/// path kept whenever the data is rational.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    pub c: f64,
    pub d: f64,
    pub exact: Option<(Rat, Rat)>,
}

impl AffineMap {
    pub fn new_exact(c: Rat, d: Rat) -> Self {
        assert!(!c.is_zero(), "affine slope must be nonzero");
        AffineMap {
            c: rat_to_f64(&c),
            d: rat_to_f64(&d),
            exact: Some((c, d)),
        }
    }

    pub fn new_f64(c: f64, d: f64) -> Self {
        assert!(c != 0.0, "affine slope must be nonzero");
        AffineMap { c, d, exact: None }
    }

    pub fn identity() -> Self {
        AffineMap::new_exact(Rat::one(), Rat::zero())
    }

    pub fn from_bs(g: &BSElement) -> Self {
        AffineMap::new_exact(g.slope(), g.t())
    }

    pub fn is_orientation_preserving(&self) -> bool {
        self.c > 0.0
    }

    pub fn is_identity(&self) -> bool {
        match &self.exact {
            Some((c, d)) => c.is_one() && d.is_zero(),
            None => self.c == 1.0 && self.d == 0.0,
        }
    }

    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        match (&self.exact, &other.exact) {
            (Some((c1, d1)), Some((c2, d2))) => {
                AffineMap::new_exact(c1 * c2, c1 * d2 + d1)
            }
            _ => AffineMap::new_f64(self.c * other.c, self.c * other.d + self.d),
        }
    }

    pub fn inverse(&self) -> AffineMap {
        match &self.exact {
            Some((c, d)) => AffineMap::new_exact(Rat::one() / c, -d / c),
            None => AffineMap::new_f64(1.0 / self.c, -self.d / self.c),
        }
    }

    pub fn apply_f64(&self, x: f64) -> f64 {
        self.c * x + self.d
    }

    pub fn apply_exact(&self, p: &ProjPoint) -> Option<ProjPoint> {
        let (c, d) = self.exact.as_ref()?;
        Some(match p {
            ProjPoint::Finite(x) => ProjPoint::Finite(c * x + d),
            ProjPoint::Infinity => ProjPoint::Infinity,
        })
    }
}

/// A point of the circle R P^1, canonically the additive coordinate
/// u in [0,1); the projective coordinate x = tan(pi u) is derived, with
/// infinity an explicit tag (u = 1/2), never a float sentinel.
#[derive(Clone, Debug, PartialEq)]
pub enum CirclePoint {
    /// Exact projective coordinate.
    Exact(ProjPoint),
    /// Additive coordinate u in [0,1).
    U(f64),
}

impl CirclePoint {
    pub fn from_u(u: f64) -> Self {
        CirclePoint::U(u.rem_euclid(1.0))
    }

    pub fn infinity() -> Self {
        CirclePoint::Exact(ProjPoint::Infinity)
    }

    pub fn from_x_exact(x: Rat) -> Self {
        CirclePoint::Exact(ProjPoint::Finite(x))
    }

    pub fn u(&self) -> f64 {
        match self {
            CirclePoint::U(u) => *u,
            CirclePoint::Exact(p) => crate::ratfunc::proj_to_u(p),
        }
    }

    /// Projective coordinate; None encodes infinity.
    pub fn x(&self) -> Option<f64> {
        match self {
            CirclePoint::Exact(ProjPoint::Infinity) => None,
            CirclePoint::Exact(ProjPoint::Finite(r)) => Some(rat_to_f64(r)),
            CirclePoint::U(u) => {
                if (*u - 0.5).abs() < 1e-300 {
                    None
                } else {
                    Some((std::f64::consts::PI * u).tan())
                }
            }
        }
    }

    pub fn exact(&self) -> Option<&ProjPoint> {
        match self {
            CirclePoint::Exact(p) => Some(p),
            CirclePoint::U(_) => None,
        }
    }
}

/// Standard representation: a |-> (x -> n x), b |-> (x -> x + 1), acting
/// projectively with global fixed point at infinity.
pub fn std_rep_eval(g: &BSElement, p: &CirclePoint) -> CirclePoint {
    let f = AffineMap::from_bs(g);
    match p {
        CirclePoint::Exact(pt) => CirclePoint::Exact(f.apply_exact(pt).expect("exact map")),
        CirclePoint::U(u) => {
            if (*u - 0.5).abs() < 1e-300 {
                CirclePoint::infinity()
            } else {
                let x = (std::f64::consts::PI * u).tan();
                CirclePoint::from_u(crate::ratfunc::x_to_u(f.apply_f64(x)))
            }
        }
    }
}
