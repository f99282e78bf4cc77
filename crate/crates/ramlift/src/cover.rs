//! Construction and certification of rational ramified covering maps.
//!
//! A ramified cover over a base point p is a rational circle map that is a
//! d-fold covering away from the fiber over p, with local model x -> x^s at
//! each fiber point. Certification is exact: Sturm counts witness that the
//! derivative numerator has no real roots beyond the prescribed ones, which
//! forces monotonicity on every complementary arc.
//!
//! Fiber indexing convention: ascending projective order with infinity
//! first when it lies in the fiber, i.e. the cyclic order with the cut
//! placed at infinity.

use crate::ratfunc::{
    rat, rat_int, rat_sign, rat_to_string, sturm_count_all, Mobius, Polynomial,
    ProjPoint, Rat, RationalMap,
};
use crate::sig::{validate_signature, SignatureVector};
use num::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum CoverError {
    #[error("construction failed after exhausting the N/epsilon search:\n{trace}")]
    ConstructionFailed { trace: String },
    #[error("cover is not certified")]
    UncertifiedCover,
    #[error("Moebius adjustment does not fix the base point")]
    BasePointNotFixed,
    #[error("certification failed: {0}")]
    CertificationFailed(String),
    #[error("malformed cover data: {0}")]
    BadCoverData(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BasePoint {
    Zero,
    Infinity,
}

impl BasePoint {
    pub fn as_str(&self) -> &'static str {
        match self {
            BasePoint::Zero => "0",
            BasePoint::Infinity => "inf",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CoverError> {
        match s.trim() {
            "0" => Ok(BasePoint::Zero),
            "inf" => Ok(BasePoint::Infinity),
            other => Err(CoverError::BadCoverData(format!("bad base point {other:?}"))),
        }
    }
}

/// One ramification point: location, local order, and the orientation of
/// the outgoing arc (from this point to the next in cyclic order).
#[derive(Clone, Debug, PartialEq)]
pub struct RamPoint {
    pub q: ProjPoint,
    pub s: u32,
    pub o: i8,
}

#[derive(Clone, Debug)]
pub struct RamifiedCover {
    map: RationalMap,
    base: BasePoint,
    ram: Vec<RamPoint>,
    certified: bool,
}

impl RamifiedCover {
    pub fn map(&self) -> &RationalMap {
        &self.map
    }

    pub fn base(&self) -> BasePoint {
        self.base
    }

    pub fn ram(&self) -> &[RamPoint] {
        &self.ram
    }

    pub fn degree(&self) -> usize {
        self.ram.len()
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// Exact base point as a projective point.
    pub fn base_point(&self) -> ProjPoint {
        match self.base {
            BasePoint::Zero => ProjPoint::Finite(Rat::zero()),
            BasePoint::Infinity => ProjPoint::Infinity,
        }
    }
}

/// The signature of a certified cover, read off the stored ramification
/// data (which [`certify_cover`] recomputes from the map itself).
pub fn signature_of(c: &RamifiedCover) -> Result<SignatureVector, CoverError> {
    if !c.certified {
        return Err(CoverError::UncertifiedCover);
    }
    sig_from_ram(&c.ram)
}

fn sig_from_ram(ram: &[RamPoint]) -> Result<SignatureVector, CoverError> {
    let s: Vec<u32> = ram.iter().map(|r| r.s).collect();
    let o: Vec<i8> = ram.iter().map(|r| r.o).collect();
    validate_signature(&s, &o)
        .map_err(|e| CoverError::CertificationFailed(format!("extracted labels invalid: {e}")))
}

// ---------------------------------------------------------------------------
// certification
// ---------------------------------------------------------------------------

/// Divide p exactly by (x - q)^s; None if the division is not exact.
fn divide_out(p: &Polynomial, q: &Rat, s: u32) -> Option<Polynomial> {
    let lin = Polynomial::linear_root(q);
    let mut acc = p.clone();
    for _ in 0..s {
        acc = acc.div_exact(&lin)?;
    }
    Some(acc)
}

/// Structural certification for a base-0 cover whose fiber is the given
/// finite points with the given orders. Exact throughout.
fn certify_base0_finite(map: &RationalMap, claims: &[(Rat, u32)]) -> Result<(), CoverError> {
    if claims.is_empty() {
        return Err(CoverError::CertificationFailed("empty fiber".into()));
    }
    for w in claims.windows(2) {
        if w[0].0 >= w[1].0 {
            return Err(CoverError::CertificationFailed(
                "fiber points not strictly ascending".into(),
            ));
        }
    }
    let num = map.num();
    let den = map.den();
    let dn = num.degree().ok_or_else(|| {
        CoverError::CertificationFailed("zero numerator".into())
    })?;
    let dd = den.degree().expect("denominator nonzero");

    // fiber completeness: num = prod (x-q)^s * C with C free of real roots
    let mut cof = num.clone();
    for (q, s) in claims {
        if *s < 1 {
            return Err(CoverError::CertificationFailed("order < 1".into()));
        }
        cof = divide_out(&cof, q, *s).ok_or_else(|| {
            CoverError::CertificationFailed(format!(
                "numerator does not vanish to order {s} at {}",
                rat_to_string(q)
            ))
        })?;
    }
    if !cof.is_zero() && cof.degree() != Some(0) {
        let extra = sturm_count_all(&cof)
            .map_err(|e| CoverError::CertificationFailed(e.to_string()))?;
        if extra != 0 {
            return Err(CoverError::CertificationFailed(format!(
                "numerator has {extra} real roots outside the claimed fiber"
            )));
        }
    }

    // criticality: W vanishes to order exactly s-1 at each q and nowhere
    // else on the real line
    let w = map.derivative_numerator();
    let mut w_red = w;
    for (q, s) in claims {
        if *s > 1 {
            w_red = divide_out(&w_red, q, *s - 1).ok_or_else(|| {
                CoverError::CertificationFailed(format!(
                    "derivative numerator does not vanish to order {} at {}",
                    s - 1,
                    rat_to_string(q)
                ))
            })?;
        }
    }
    if w_red.is_zero() {
        return Err(CoverError::CertificationFailed(
            "derivative numerator vanished identically".into(),
        ));
    }
    if w_red.degree() != Some(0) {
        let crit = sturm_count_all(&w_red)
            .map_err(|e| CoverError::CertificationFailed(e.to_string()))?;
        if crit != 0 {
            return Err(CoverError::CertificationFailed(format!(
                "{crit} real critical points outside the fiber"
            )));
        }
    }

    // behavior at infinity: either a simple pole or a regular finite value
    let w_deg = map.derivative_numerator().degree().unwrap_or(0);
    if dn == dd + 1 {
        // simple pole at infinity: monotone passage, nothing more to check
    } else if dn == dd {
        // finite nonzero value at infinity; regular iff the chart
        // derivative W(x) x^2 / den(x)^2 has a nonzero limit
        if w_deg != dn + dd - 2 {
            return Err(CoverError::CertificationFailed(
                "map is critical at infinity".into(),
            ));
        }
    } else if dn < dd {
        return Err(CoverError::CertificationFailed(
            "infinity is an unclaimed fiber point (map sends it to the base)".into(),
        ));
    } else {
        return Err(CoverError::CertificationFailed(format!(
            "pole of order {} > 1 at infinity",
            dn - dd
        )));
    }
    Ok(())
}

/// General structural certification: reduce to the finite base-0 case by
/// conjugating with x -> -1/x (for base infinity) and precomposing with a
/// Moebius map fixing 0 (to move a fiber point off infinity).
fn certify_any(
    map: &RationalMap,
    base: BasePoint,
    claims: &[(ProjPoint, u32)],
) -> Result<(), CoverError> {
    let mu = Mobius::neg_recip();
    let (map, claims): (RationalMap, Vec<(ProjPoint, u32)>) = match base {
        BasePoint::Zero => (map.clone(), claims.to_vec()),
        BasePoint::Infinity => (
            map.precompose_mobius(&mu).postcompose_mobius(&mu),
            claims.iter().map(|(q, s)| (mu.apply(q), *s)).collect(),
        ),
    };
    let has_inf = claims.iter().any(|(q, _)| q.is_infinity());
    let (map, claims) = if has_inf {
        // nu = x/(cx+1) fixes 0, is orientation-preserving, and moves
        // infinity to -1/c; pick c so no transformed point degenerates
        let mut chosen = None;
        'outer: for c in [rat(1, 1), rat(1, 2), rat(1, 3), rat(2, 1), rat(3, 1)] {
            let nu_inv = Mobius::new(Rat::one(), Rat::zero(), -c.clone(), Rat::one());
            let mut moved = Vec::new();
            for (q, s) in &claims {
                match nu_inv.apply(q) {
                    ProjPoint::Finite(r) => moved.push((ProjPoint::Finite(r), *s)),
                    ProjPoint::Infinity => continue 'outer,
                }
            }
            let nu = Mobius::new(Rat::one(), Rat::zero(), c, Rat::one());
            chosen = Some((map.precompose_mobius(&nu), moved));
            break;
        }
        chosen.ok_or_else(|| {
            CoverError::CertificationFailed("could not move fiber off infinity".into())
        })?
    } else {
        (map, claims)
    };
    let mut finite: Vec<(Rat, u32)> = claims
        .into_iter()
        .map(|(q, s)| match q {
            ProjPoint::Finite(r) => (r, s),
            ProjPoint::Infinity => unreachable!("moved off infinity"),
        })
        .collect();
    finite.sort_by(|a, b| a.0.cmp(&b.0));
    certify_base0_finite(&map, &finite)
}

/// Read the orientation labels off the certified structure: sign of the
/// derivative numerator W at one interior sample point per arc (W keeps a
/// constant sign on each open arc, including across simple poles).
fn extract_ram(
    map: &RationalMap,
    base: BasePoint,
    claims: &[(ProjPoint, u32)],
) -> Result<Vec<RamPoint>, CoverError> {
    let mut sorted: Vec<(ProjPoint, u32)> = claims.to_vec();
    sorted.sort_by(|a, b| match (&a.0, &b.0) {
        (ProjPoint::Infinity, ProjPoint::Infinity) => std::cmp::Ordering::Equal,
        (ProjPoint::Infinity, _) => std::cmp::Ordering::Less,
        (_, ProjPoint::Infinity) => std::cmp::Ordering::Greater,
        (ProjPoint::Finite(x), ProjPoint::Finite(y)) => x.cmp(y),
    });
    let w = map.derivative_numerator();
    let d = sorted.len();
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        let next = &sorted[(i + 1) % d].0;
        let cur = &sorted[i].0;
        // one sample point strictly inside the arc (cur, next)
        let sample: Rat = match (cur, next) {
            (ProjPoint::Finite(x), ProjPoint::Finite(y)) => {
                if x < y {
                    (x + y) / rat_int(2)
                } else {
                    // wrap-around arc through infinity
                    x + rat_int(1)
                }
            }
            (ProjPoint::Finite(x), ProjPoint::Infinity) => x + rat_int(1),
            (ProjPoint::Infinity, ProjPoint::Finite(y)) => y - rat_int(1),
            (ProjPoint::Infinity, ProjPoint::Infinity) => {
                // d = 1 with the single fiber point at infinity
                Rat::zero()
            }
        };
        let o = rat_sign(&w.eval(&sample));
        if o == 0 {
            return Err(CoverError::CertificationFailed(
                "derivative numerator vanished at an arc sample point".into(),
            ));
        }
        out.push(RamPoint {
            q: cur.clone(),
            s: sorted[i].1,
            o,
        });
    }
    // base infinity: the target passes through infinity at fiber points
    // only, so the derivative sign in circle coordinates is still sign(W)
    let _ = base;
    Ok(out)
}

/// Certify that `map` is a ramified cover over `base` with exactly the
/// claimed fiber points and orders; on success returns the cover with
/// orientation labels extracted from the map.
pub fn certify_cover(
    map: RationalMap,
    base: BasePoint,
    claims: &[(ProjPoint, u32)],
) -> Result<RamifiedCover, CoverError> {
    certify_any(&map, base, claims)?;
    let ram = extract_ram(&map, base, claims)?;
    sig_from_ram(&ram)?;
    Ok(RamifiedCover {
        map,
        base,
        ram,
        certified: true,
    })
}

// ---------------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------------

/// Helper polynomial: h = A + integral of prod (t - a_i), with A chosen so
/// h >= 1 at every critical point, hence everywhere (its only critical
/// points are the a_i and it tends to +infinity on both ends).
fn helper_poly(nodes: &[Rat]) -> Polynomial {
    let mut hp = Polynomial::one();
    for a in nodes {
        hp = hp.mul(&Polynomial::linear_root(a));
    }
    let big_h = hp.integral();
    let min = nodes
        .iter()
        .map(|a| big_h.eval(a))
        .min()
        .expect("nonempty nodes");
    big_h.add(&Polynomial::constant(Rat::one() - min))
}

/// Cheap exact prescreen before the full Sturm certification: the sign of
/// the derivative numerator must be constant on each complementary arc.
fn prescreen(map: &RationalMap, qs: &[Rat]) -> bool {
    let w = map.derivative_numerator();
    let d = qs.len();
    let sample_signs = |points: &[Rat]| -> Option<i8> {
        let mut sgn = 0i8;
        for p in points {
            let s = rat_sign(&w.eval(p));
            if s == 0 {
                return None;
            }
            if sgn == 0 {
                sgn = s;
            } else if s != sgn {
                return None;
            }
        }
        Some(sgn)
    };
    for i in 0..d {
        let points: Vec<Rat> = if i + 1 < d {
            let (lo, hi) = (&qs[i], &qs[i + 1]);
            let step = (hi - lo) / rat_int(8);
            (1..8).map(|k| lo + &step * rat_int(k)).collect()
        } else {
            // wrap arc through infinity
            let hi = &qs[d - 1];
            let lo = &qs[0];
            let mut v: Vec<Rat> = [rat(1, 4), rat_int(1), rat_int(3), rat_int(10), rat_int(50)]
                .iter()
                .map(|t| hi + t)
                .collect();
            v.extend(
                [rat(1, 4), rat_int(1), rat_int(3), rat_int(10), rat_int(50)]
                    .iter()
                    .map(|t| lo - t),
            );
            v
        };
        if sample_signs(&points).is_none() {
            return false;
        }
    }
    true
}

/// Build a certified rational ramified cover over the requested base point
/// realizing the signature exactly.
///
/// Over base 0: zeros of order s_i at the odd integers 1, 3, .., 2d-1,
/// simple poles at the even integers in between and at infinity; the map
/// is P h^N / (Q (1 + eps x^(2m))) with N and eps searched and every
/// candidate certified exactly. A global sign flip matches the edge
/// labels. Base-infinity covers are conjugates by x -> -1/x.
pub fn build_cover(target: &SignatureVector, base: BasePoint) -> Result<RamifiedCover, CoverError> {
    let built = build_cover_base0(target)?;
    match base {
        BasePoint::Zero => Ok(built),
        BasePoint::Infinity => conjugate_base(&built),
    }
}

fn build_cover_base0(target: &SignatureVector) -> Result<RamifiedCover, CoverError> {
    let d = target.d();
    let svec = target.vertex_labels();
    let nodes: Vec<Rat> = (1..=(2 * d - 1) as i64).map(rat_int).collect();
    let qs: Vec<Rat> = (0..d).map(|i| rat_int(2 * i as i64 + 1)).collect();
    let mut p_poly = Polynomial::one();
    for (i, q) in qs.iter().enumerate() {
        p_poly = p_poly.mul(&Polynomial::linear_root(q).pow(svec[i]));
    }
    let mut q_poly = Polynomial::one();
    for k in 0..d.saturating_sub(1) {
        q_poly = q_poly.mul(&Polynomial::linear_root(&rat_int(2 * k as i64 + 2)));
    }
    let h = helper_poly(&nodes);
    debug_assert_eq!(sturm_count_all(&h).unwrap(), 0);

    let claims: Vec<(ProjPoint, u32)> = qs
        .iter()
        .zip(svec)
        .map(|(q, &s)| (ProjPoint::Finite(q.clone()), s))
        .collect();
    let mut trace = Vec::new();
    let mut n_exp = 1u32;
    while n_exp <= 64 {
        let num0 = p_poly.mul(&h.pow(n_exp));
        let dn = num0.degree().unwrap();
        let dq = q_poly.degree().unwrap_or(0);
        let two_m = dn - dq - 1;
        assert!(two_m % 2 == 0, "pole order at infinity must be odd");
        let mut certified_this_n = false;
        let mut j = 1u32;
        while j <= 128 {
            let eps = Rat::new(num::BigInt::one(), num::BigInt::from(2u32).pow(j));
            let mut corr = vec![Rat::zero(); two_m + 1];
            corr[0] = Rat::one();
            corr[two_m] = eps;
            let den = q_poly.mul(&Polynomial::new(corr));
            let map = RationalMap::new(num0.clone(), den)
                .map_err(|e| CoverError::BadCoverData(e.to_string()))?;
            if map.num().degree() != Some(dn) {
                trace.push(format!("N={n_exp} eps=2^-{j}: unexpected cancellation"));
                j *= 2;
                continue;
            }
            if !prescreen(&map, &qs) {
                if j == 128 {
                    trace.push(format!("N={n_exp}: prescreen failed for all eps"));
                }
                j *= 2;
                continue;
            }
            match certify_cover(map, BasePoint::Zero, &claims) {
                Ok(cover) => {
                    certified_this_n = true;
                    match finish_orientation(cover, target, &claims) {
                        Ok(done) => return Ok(done),
                        Err(e) => {
                            trace.push(format!("N={n_exp} eps=2^-{j}: {e}"));
                        }
                    }
                }
                Err(e) => {
                    trace.push(format!("N={n_exp} eps=2^-{j}: {e}"));
                }
            }
            if certified_this_n {
                break;
            }
            j *= 2;
        }
        n_exp *= 2;
    }
    Err(CoverError::ConstructionFailed {
        trace: trace.join("\n"),
    })
}

/// The construction realizes the target vertex labels and one of the two
/// edge-label completions; postcomposing with x -> -x flips every edge
/// label while fixing base, fiber and orders.
fn finish_orientation(
    cover: RamifiedCover,
    target: &SignatureVector,
    claims: &[(ProjPoint, u32)],
) -> Result<RamifiedCover, CoverError> {
    let got = signature_of(&cover)?;
    if got == *target {
        return Ok(cover);
    }
    if got == target.sign_involution() {
        let flipped = cover.map.postcompose_mobius(&Mobius::negate());
        let cover = certify_cover(flipped, cover.base, claims)?;
        let got = signature_of(&cover)?;
        if got == *target {
            return Ok(cover);
        }
        return Err(CoverError::CertificationFailed(format!(
            "sign flip did not reach the target: got {got:?}"
        )));
    }
    Err(CoverError::CertificationFailed(format!(
        "construction realized {got:?}, not the target {target:?} or its flip"
    )))
}

// ---------------------------------------------------------------------------
// adjustments
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub enum Adjustment {
    /// Precompose with x -> -x (reflects the fiber).
    PreNegate,
    /// Postcompose with a Moebius map fixing the base point.
    PostMoebius(Mobius),
}

pub fn adjust_cover(c: &RamifiedCover, adj: &Adjustment) -> Result<RamifiedCover, CoverError> {
    if !c.certified {
        return Err(CoverError::UncertifiedCover);
    }
    match adj {
        Adjustment::PreNegate => {
            let neg = Mobius::negate();
            let map = c.map.precompose_mobius(&neg);
            let claims: Vec<(ProjPoint, u32)> = c
                .ram
                .iter()
                .map(|r| (neg.apply(&r.q), r.s))
                .collect();
            certify_cover(map, c.base, &claims)
        }
        Adjustment::PostMoebius(m) => {
            if m.apply(&c.base_point()) != c.base_point() {
                return Err(CoverError::BasePointNotFixed);
            }
            let map = c.map.postcompose_mobius(m);
            let claims: Vec<(ProjPoint, u32)> =
                c.ram.iter().map(|r| (r.q.clone(), r.s)).collect();
            certify_cover(map, c.base, &claims)
        }
    }
}

/// Swap the base point 0 <-> infinity by conjugating with the rotation
/// x -> -1/x; the signature is unchanged.
pub fn conjugate_base(c: &RamifiedCover) -> Result<RamifiedCover, CoverError> {
    if !c.certified {
        return Err(CoverError::UncertifiedCover);
    }
    let mu = Mobius::neg_recip();
    let map = c.map.precompose_mobius(&mu).postcompose_mobius(&mu);
    let claims: Vec<(ProjPoint, u32)> = c.ram.iter().map(|r| (mu.apply(&r.q), r.s)).collect();
    let base = match c.base {
        BasePoint::Zero => BasePoint::Infinity,
        BasePoint::Infinity => BasePoint::Zero,
    };
    certify_cover(map, base, &claims)
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RamJson {
    q: String,
    s: u32,
    o: i8,
}

#[derive(Serialize, Deserialize)]
struct CoverJson {
    base: String,
    num: Polynomial,
    den: Polynomial,
    ram: Vec<RamJson>,
    certified: bool,
}

pub fn cover_to_json(c: &RamifiedCover) -> String {
    let js = CoverJson {
        base: c.base.as_str().to_string(),
        num: c.map.num().clone(),
        den: c.map.den().clone(),
        ram: c
            .ram
            .iter()
            .map(|r| RamJson {
                q: r.q.to_string_exact(),
                s: r.s,
                o: r.o,
            })
            .collect(),
        certified: c.certified,
    };
    serde_json::to_string_pretty(&js).expect("serializable")
}

/// Load a cover from JSON and re-certify it from scratch; the stored
/// `certified` flag is advisory only.
pub fn cover_from_json(text: &str) -> Result<RamifiedCover, CoverError> {
    let js: CoverJson =
        serde_json::from_str(text).map_err(|e| CoverError::BadCoverData(e.to_string()))?;
    let base = BasePoint::parse(&js.base)?;
    let map = RationalMap::new(js.num, js.den)
        .map_err(|e| CoverError::BadCoverData(e.to_string()))?;
    let claims: Vec<(ProjPoint, u32)> = js
        .ram
        .iter()
        .map(|r| {
            ProjPoint::from_string_exact(&r.q)
                .map(|q| (q, r.s))
                .map_err(|e| CoverError::BadCoverData(e.to_string()))
        })
        .collect::<Result<_, _>>()?;
    certify_cover(map, base, &claims)
}

/// The degree-4 rational cover over 0 with signature (2,2,-1,1):
/// (x+1)^2 (x-1)^2 / (x (x^2+1)).
pub fn pi2() -> RamifiedCover {
    let num = Polynomial::from_ints(&[1, 1])
        .pow(2)
        .mul(&Polynomial::from_ints(&[-1, 1]).pow(2));
    let den = Polynomial::from_ints(&[0, 1]).mul(&Polynomial::from_ints(&[1, 0, 1]));
    let map = RationalMap::new(num, den).expect("nonzero denominator");
    certify_cover(
        map,
        BasePoint::Zero,
        &[
            (ProjPoint::Finite(rat_int(-1)), 2),
            (ProjPoint::Finite(rat_int(1)), 2),
        ],
    )
    .expect("pi2 certifies")
}
