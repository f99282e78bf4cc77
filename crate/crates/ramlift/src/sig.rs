//! Signature vectors of ramified covers, the dihedral actions on them,
//! stabilizers, the parity homomorphism delta, and canonical-orbit
//! enumeration.
//!
//! A signature is (s_1..s_d, o_1..o_d) with s_i >= 1 and o_i in {+1,-1},
//! subject to
//!   (1) the number of even s_i is even, and
//!   (2) (-1)^(s_i+1) = o_{i-1} o_i for every i mod d.

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SigError {
    #[error("property (1) violated: odd number of even vertex labels")]
    PropertyOneViolation,
    #[error("property (2) violated at index {index}: edge parity mismatch")]
    PropertyTwoViolation { index: usize },
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("dimension mismatch: element acts on {expected} vertices, signature has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("element does not hash-stabilize the signature")]
    NotInHashStabilizer,
}

/// Labelled d-gon data (s_1..s_d, o_1..o_d).
///
/// Values produced by [`validate_signature`] / [`complete_from_prefix`] /
/// [`act`] satisfy properties (1) and (2). Values produced by [`act_hash`]
/// need not: the hash action carries edge labels unchanged, which can break
/// property (2); they are plain labelled vectors used for equality tests.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignatureVector {
    d: usize,
    s: Vec<u32>,
    o: Vec<i8>,
}

impl fmt::Debug for SignatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.s.iter().map(|x| x.to_string()).collect();
        let o: Vec<String> = self.o.iter().map(|x| x.to_string()).collect();
        write!(f, "({}; {})", s.join(","), o.join(","))
    }
}

impl fmt::Display for SignatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl SignatureVector {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vertex_labels(&self) -> &[u32] {
        &self.s
    }

    pub fn edge_labels(&self) -> &[i8] {
        &self.o
    }

    /// Sign involution I: flip every edge label.
    pub fn sign_involution(&self) -> SignatureVector {
        SignatureVector {
            d: self.d,
            s: self.s.clone(),
            o: self.o.iter().map(|x| -x).collect(),
        }
    }

    pub fn is_valid(&self) -> bool {
        validate_signature(&self.s, &self.o).is_ok()
    }

    pub fn max_order(&self) -> u32 {
        *self.s.iter().max().expect("d >= 1")
    }
}

/// Check properties (1) and (2) and build a signature vector.
pub fn validate_signature(s: &[u32], o: &[i8]) -> Result<SignatureVector, SigError> {
    if s.is_empty() || s.len() != o.len() {
        return Err(SigError::MalformedInput(format!(
            "need equal-length nonempty label lists, got {} and {}",
            s.len(),
            o.len()
        )));
    }
    if let Some(&bad) = s.iter().find(|&&x| x == 0) {
        return Err(SigError::MalformedInput(format!(
            "vertex labels must be >= 1, got {bad}"
        )));
    }
    if let Some(&bad) = o.iter().find(|&&x| x != 1 && x != -1) {
        return Err(SigError::MalformedInput(format!(
            "edge labels must be +1 or -1, got {bad}"
        )));
    }
    let d = s.len();
    if s.iter().filter(|&&x| x % 2 == 0).count() % 2 != 0 {
        return Err(SigError::PropertyOneViolation);
    }
    // check the consecutive pairs first and the wrap-around pair last, so
    // the reported index is the first in-sequence mismatch
    for i in (1..d).chain([0]) {
        let parity: i8 = if s[i] % 2 == 0 { -1 } else { 1 };
        let prev = o[(i + d - 1) % d];
        if prev * o[i] != parity {
            return Err(SigError::PropertyTwoViolation { index: i + 1 });
        }
    }
    Ok(SignatureVector {
        d,
        s: s.to_vec(),
        o: o.to_vec(),
    })
}

/// Unique completion of a signature from its vertex labels and first edge
/// label; consistent exactly when property (1) holds.
pub fn complete_from_prefix(s: &[u32], o1: i8) -> Result<SignatureVector, SigError> {
    if s.is_empty() {
        return Err(SigError::MalformedInput("empty vertex labels".into()));
    }
    if o1 != 1 && o1 != -1 {
        return Err(SigError::MalformedInput(format!("o1 must be +-1, got {o1}")));
    }
    let d = s.len();
    let mut o = vec![0i8; d];
    o[0] = o1;
    for i in 1..d {
        let parity: i8 = if s[i] % 2 == 0 { -1 } else { 1 };
        o[i] = o[i - 1] * parity;
    }
    match validate_signature(s, &o) {
        Ok(v) => Ok(v),
        Err(SigError::PropertyTwoViolation { .. }) => Err(SigError::PropertyOneViolation),
        Err(e) => Err(e),
    }
}

/// Element b^rot a^flip of the dihedral group D_d, where b is the basic
/// rotation and a the reflection fixing vertex 1.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DihedralElement {
    d: usize,
    rot: usize,
    flip: bool,
}

impl fmt::Debug for DihedralElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rot, self.flip) {
            (0, false) => write!(f, "id"),
            (0, true) => write!(f, "a"),
            (1, false) => write!(f, "b"),
            (k, false) => write!(f, "b^{k}"),
            (1, true) => write!(f, "b·a"),
            (k, true) => write!(f, "b^{k}·a"),
        }
    }
}

impl fmt::Display for DihedralElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for DihedralElement {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("DihedralElement", 2)?;
        st.serialize_field("rot", &self.rot)?;
        st.serialize_field("flip", &self.flip)?;
        st.end()
    }
}

/// Wire form {"rot":int,"flip":bool}; attach a degree with
/// [`DihedralElement::from_wire`].
#[derive(Serialize, Deserialize, Clone, Copy, Debug)]
pub struct DihedralWire {
    pub rot: i64,
    pub flip: bool,
}

impl DihedralElement {
    pub fn new(d: usize, rot: i64, flip: bool) -> Self {
        assert!(d >= 1);
        DihedralElement {
            d,
            rot: rot.rem_euclid(d as i64) as usize,
            flip,
        }
    }

    pub fn from_wire(d: usize, w: DihedralWire) -> Self {
        DihedralElement::new(d, w.rot, w.flip)
    }

    pub fn identity(d: usize) -> Self {
        DihedralElement::new(d, 0, false)
    }

    /// The basic rotation b.
    pub fn rotation(d: usize) -> Self {
        DihedralElement::new(d, 1, false)
    }

    /// The reflection a.
    pub fn reflection(d: usize) -> Self {
        DihedralElement::new(d, 0, true)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rot(&self) -> usize {
        self.rot
    }

    pub fn flip(&self) -> bool {
        self.flip
    }

    pub fn is_identity(&self) -> bool {
        self.rot == 0 && !self.flip
    }

    /// Group law: b^k1 a^e1 · b^k2 a^e2 = b^(k1 + (-1)^e1 k2) a^(e1+e2).
    pub fn mul(&self, other: &DihedralElement) -> DihedralElement {
        assert_eq!(self.d, other.d, "mixed dihedral degrees");
        let k2 = if self.flip {
            (self.d - other.rot) % self.d
        } else {
            other.rot
        };
        DihedralElement::new(
            self.d,
            (self.rot + k2) as i64,
            self.flip ^ other.flip,
        )
    }

    pub fn inv(&self) -> DihedralElement {
        if self.flip {
            *self
        } else {
            DihedralElement::new(self.d, -(self.rot as i64), false)
        }
    }

    pub fn pow(&self, e: i64) -> DihedralElement {
        let mut acc = DihedralElement::identity(self.d);
        let (base, n) = if e >= 0 {
            (*self, e)
        } else {
            (self.inv(), -e)
        };
        for _ in 0..n {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn order(&self) -> usize {
        let mut acc = *self;
        let mut n = 1;
        while !acc.is_identity() {
            acc = acc.mul(self);
            n += 1;
        }
        n
    }

    /// Image of vertex position j (0-based) under the geometric action on
    /// the labelled d-gon: b moves vertex j to j-1, a sends j to 2-j
    /// (1-based).
    pub fn vertex_image(&self, j: usize) -> usize {
        debug_assert!(j < self.d);
        let d = self.d;
        if self.flip {
            (2 * d - j - self.rot) % d
        } else {
            (j + d - self.rot) % d
        }
    }

    /// Image of edge position j (0-based; edge j runs from vertex j to
    /// vertex j+1); returns (new position, whether the sign flips).
    pub fn edge_image(&self, j: usize) -> (usize, bool) {
        debug_assert!(j < self.d);
        let d = self.d;
        if self.flip {
            ((3 * d - 1 - j - self.rot) % d, true)
        } else {
            ((j + d - self.rot) % d, false)
        }
    }
}

/// Full dihedral action on signatures: permutes vertex and edge labels,
/// reflections negate edge labels. Preserves properties (1) and (2).
pub fn act(zeta: &DihedralElement, sig: &SignatureVector) -> Result<SignatureVector, SigError> {
    if zeta.d() != sig.d() {
        return Err(SigError::DimensionMismatch {
            expected: zeta.d(),
            got: sig.d(),
        });
    }
    let d = sig.d();
    let mut s = vec![0u32; d];
    let mut o = vec![0i8; d];
    for j in 0..d {
        s[zeta.vertex_image(j)] = sig.s[j];
        let (i, flips) = zeta.edge_image(j);
        o[i] = if flips { -sig.o[j] } else { sig.o[j] };
    }
    Ok(SignatureVector { d, s, o })
}

/// Hash action: permutes the vertex labels the same way but carries the
/// edge labels unchanged. The result is a plain labelled vector and can
/// violate property (2).
pub fn act_hash(zeta: &DihedralElement, sig: &SignatureVector) -> Result<SignatureVector, SigError> {
    if zeta.d() != sig.d() {
        return Err(SigError::DimensionMismatch {
            expected: zeta.d(),
            got: sig.d(),
        });
    }
    let d = sig.d();
    let mut s = vec![0u32; d];
    for j in 0..d {
        s[zeta.vertex_image(j)] = sig.s[j];
    }
    Ok(SignatureVector {
        d,
        s,
        o: sig.o.clone(),
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Group {
    C,
    D,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Action {
    Plain,
    Hash,
}

/// Elements of C_d or D_d sorted by (rotation, flip).
pub fn group_elements(d: usize, group: Group) -> Vec<DihedralElement> {
    let mut out = Vec::new();
    for k in 0..d {
        out.push(DihedralElement::new(d, k as i64, false));
        if group == Group::D {
            out.push(DihedralElement::new(d, k as i64, true));
        }
    }
    out.sort();
    out
}

/// Brute-force stabilizer of `sig` in the chosen group under the chosen
/// action.
pub fn stabilizer(sig: &SignatureVector, group: Group, action: Action) -> Vec<DihedralElement> {
    group_elements(sig.d(), group)
        .into_iter()
        .filter(|z| {
            let image = match action {
                Action::Plain => act(z, sig),
                Action::Hash => act_hash(z, sig),
            };
            image.map_or(false, |t| t == *sig)
        })
        .collect()
}

/// The parity homomorphism on the hash stabilizer: 0 if the full action
/// fixes the signature, 1 if it flips every edge label.
pub fn delta(sig: &SignatureVector, zeta: &DihedralElement) -> Result<u8, SigError> {
    let full = act(zeta, sig)?;
    if full == *sig {
        Ok(0)
    } else if full == sig.sign_involution() {
        Ok(1)
    } else {
        Err(SigError::NotInHashStabilizer)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizerReport {
    pub signature: SignatureVector,
    pub stab_c: Vec<DihedralElement>,
    pub stab_d: Vec<DihedralElement>,
    pub stab_c_hash: Vec<DihedralElement>,
    pub stab_d_hash: Vec<DihedralElement>,
    /// 1 if delta vanishes on the hash stabilizer, 2 if it is onto Z/2.
    pub delta_image_size: u8,
}

pub fn stabilizer_report(sig: &SignatureVector) -> StabilizerReport {
    let stab_d_hash = stabilizer(sig, Group::D, Action::Hash);
    let delta_image_size = if stab_d_hash
        .iter()
        .any(|z| delta(sig, z).expect("hash stabilizer element") == 1)
    {
        2
    } else {
        1
    };
    StabilizerReport {
        signature: sig.clone(),
        stab_c: stabilizer(sig, Group::C, Action::Plain),
        stab_d: stabilizer(sig, Group::D, Action::Plain),
        stab_c_hash: stabilizer(sig, Group::C, Action::Hash),
        stab_d_hash,
        delta_image_size,
    }
}

/// Lexicographically smallest signature in the C- or D-orbit, comparing
/// the concatenation (s_1..s_d, o_1..o_d) with -1 < 1.
pub fn canonical_rep(sig: &SignatureVector, group: Group) -> SignatureVector {
    group_elements(sig.d(), group)
        .iter()
        .map(|z| act(z, sig).expect("matching degree"))
        .min()
        .expect("orbit nonempty")
}

/// One canonical representative per orbit among valid signatures with all
/// vertex labels <= max_s; sorted, deterministic.
pub fn enumerate_canonical(d: usize, max_s: u32, group: Group) -> Vec<SignatureVector> {
    assert!(d >= 1 && max_s >= 1);
    let mut out = Vec::new();
    let mut labels = vec![1u32; d];
    loop {
        if labels.iter().filter(|&&x| x % 2 == 0).count() % 2 == 0 {
            for o1 in [-1i8, 1] {
                if let Ok(sig) = complete_from_prefix(&labels, o1) {
                    if canonical_rep(&sig, group) == sig {
                        out.push(sig);
                    }
                }
            }
        }
        // odometer over {1..max_s}^d
        let mut pos = 0;
        loop {
            if pos == d {
                out.sort();
                out.dedup();
                return out;
            }
            if labels[pos] < max_s {
                labels[pos] += 1;
                break;
            }
            labels[pos] = 1;
            pos += 1;
        }
    }
}

impl Serialize for SignatureVector {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("SignatureVector", 3)?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("s", &self.s)?;
        st.serialize_field("o", &self.o)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for SignatureVector {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            d: usize,
            s: Vec<u32>,
            o: Vec<i8>,
        }
        let w = Wire::deserialize(de)?;
        if w.d != w.s.len() {
            return Err(serde::de::Error::custom("d does not match label length"));
        }
        validate_signature(&w.s, &w.o).map_err(serde::de::Error::custom)
    }
}

/// Parse a comma-separated literal "s_1,..,s_d,o_1,..,o_d".
pub fn parse_signature_literal(lit: &str) -> Result<SignatureVector, SigError> {
    let vals: Result<Vec<i64>, _> = lit
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect();
    let vals = vals.map_err(|e| SigError::MalformedInput(e.to_string()))?;
    if vals.len() % 2 != 0 || vals.is_empty() {
        return Err(SigError::MalformedInput(
            "literal must list s-labels then o-labels, total length 2d".into(),
        ));
    }
    let d = vals.len() / 2;
    let s: Vec<u32> = vals[..d]
        .iter()
        .map(|&x| u32::try_from(x).map_err(|_| SigError::MalformedInput(format!("bad s-label {x}"))))
        .collect::<Result<_, _>>()?;
    let o: Vec<i8> = vals[d..]
        .iter()
        .map(|&x| i8::try_from(x).map_err(|_| SigError::MalformedInput(format!("bad o-label {x}"))))
        .collect::<Result<_, _>>()?;
    validate_signature(&s, &o)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(s: &[u32], o: &[i8]) -> SignatureVector {
        validate_signature(s, o).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(validate_signature(&[2, 2], &[1, -1]).is_ok());
        assert!(validate_signature(&[1], &[1]).is_ok());
        assert_eq!(
            validate_signature(&[2, 1], &[1, 1]).unwrap_err(),
            SigError::PropertyOneViolation
        );
        assert_eq!(
            validate_signature(&[2, 2], &[1, 1]).unwrap_err(),
            SigError::PropertyTwoViolation { index: 2 }
        );
    }

    #[test]
    fn completion_examples() {
        assert_eq!(complete_from_prefix(&[2, 2], 1).unwrap(), sig(&[2, 2], &[1, -1]));
        assert_eq!(complete_from_prefix(&[3], 1).unwrap(), sig(&[3], &[1]));
        assert_eq!(
            complete_from_prefix(&[2, 3], 1).unwrap_err(),
            SigError::PropertyOneViolation
        );
    }

    #[test]
    fn completion_round_trips() {
        for d in 1..=5usize {
            for s in enumerate_canonical(d, 4, Group::C) {
                let re = complete_from_prefix(s.vertex_labels(), s.edge_labels()[0]).unwrap();
                assert_eq!(re, s);
            }
        }
    }

    #[test]
    fn generator_actions_match_definitions() {
        let s1 = sig(&[2, 2], &[1, -1]);
        let b = DihedralElement::rotation(2);
        let a = DihedralElement::reflection(2);
        assert_eq!(act(&b, &s1).unwrap(), sig(&[2, 2], &[-1, 1]));
        assert_eq!(act(&a, &s1).unwrap(), s1);
        assert_eq!(act(&DihedralElement::identity(2), &s1).unwrap(), s1);
        // a(s_1..s_d, o_1..o_d) = (s_1, s_d..s_2, -o_d..-o_1) on a d=3 case
        let t = sig(&[1, 2, 2], &[1, -1, 1]);
        let a3 = DihedralElement::reflection(3);
        assert_eq!(act(&a3, &t).unwrap(), sig(&[1, 2, 2], &[-1, 1, -1]));
    }

    #[test]
    fn dihedral_relations() {
        for d in 1..=6usize {
            let a = DihedralElement::reflection(d);
            let b = DihedralElement::rotation(d);
            assert!(a.mul(&a).is_identity());
            assert_eq!(b.order(), d);
            assert_eq!(a.mul(&b).mul(&a), b.inv());
        }
    }

    #[test]
    fn action_is_a_group_action() {
        let s = sig(&[2, 3, 1, 2, 3, 1], &[-1, -1, -1, 1, 1, 1]);
        for z1 in group_elements(6, Group::D) {
            for z2 in group_elements(6, Group::D) {
                let lhs = act(&z1.mul(&z2), &s).unwrap();
                let rhs = act(&z1, &act(&z2, &s).unwrap()).unwrap();
                assert_eq!(lhs, rhs, "z1={z1:?} z2={z2:?}");
                let lhs = act_hash(&z1.mul(&z2), &s).unwrap();
                let rhs = act_hash(&z1, &act_hash(&z2, &s).unwrap()).unwrap();
                assert_eq!(lhs, rhs, "hash z1={z1:?} z2={z2:?}");
            }
        }
    }

    #[test]
    fn full_action_preserves_validity() {
        for d in 1..=5usize {
            for s in enumerate_canonical(d, 4, Group::C) {
                for z in group_elements(d, Group::D) {
                    assert!(act(&z, &s).unwrap().is_valid(), "z={z:?} s={s:?}");
                }
            }
        }
    }

    #[test]
    fn sixteen_entry_stabilizers() {
        let s = sig(
            &[2, 1, 2, 1, 2, 1, 2, 1],
            &[1, 1, -1, -1, 1, 1, -1, -1],
        );
        let b = DihedralElement::rotation(8);
        let a = DihedralElement::reflection(8);
        let gen = |gens: &[DihedralElement]| -> Vec<DihedralElement> {
            let mut set = vec![DihedralElement::identity(8)];
            loop {
                let mut grew = false;
                for g in gens {
                    for h in set.clone() {
                        let p = g.mul(&h);
                        if !set.contains(&p) {
                            set.push(p);
                            grew = true;
                        }
                    }
                }
                if !grew {
                    set.sort();
                    return set;
                }
            }
        };
        assert_eq!(stabilizer(&s, Group::C, Action::Plain), gen(&[b.pow(4)]));
        assert_eq!(stabilizer(&s, Group::D, Action::Plain), gen(&[a, b.pow(4)]));
        assert_eq!(stabilizer(&s, Group::C, Action::Hash), gen(&[b.pow(2)]));
        assert_eq!(stabilizer(&s, Group::D, Action::Hash), gen(&[a, b.pow(2)]));
        assert_eq!(delta(&s, &b.pow(2)).unwrap(), 1);
        assert_eq!(stabilizer_report(&s).delta_image_size, 2);
    }

    #[test]
    fn asymmetric_six_entry_example() {
        let s = sig(&[2, 3, 1, 2, 3, 1], &[-1, -1, -1, 1, 1, 1]);
        assert_eq!(
            stabilizer(&s, Group::D, Action::Plain),
            vec![DihedralElement::identity(6)]
        );
        let b3 = DihedralElement::rotation(6).pow(3);
        let hash = stabilizer(&s, Group::D, Action::Hash);
        assert_eq!(hash, vec![DihedralElement::identity(6), b3]);
        assert_eq!(delta(&s, &b3).unwrap(), 1);
    }

    #[test]
    fn d1_stabilizers() {
        let s = sig(&[1], &[1]);
        assert_eq!(stabilizer(&s, Group::D, Action::Plain).len(), 1);
        assert_eq!(stabilizer(&s, Group::D, Action::Hash).len(), 2);
    }

    #[test]
    fn delta_is_a_homomorphism_on_hash_stabilizer() {
        let s = sig(
            &[2, 1, 2, 1, 2, 1, 2, 1],
            &[1, 1, -1, -1, 1, 1, -1, -1],
        );
        let stab = stabilizer(&s, Group::D, Action::Hash);
        for z1 in &stab {
            for z2 in &stab {
                let lhs = delta(&s, &z1.mul(z2)).unwrap();
                let rhs = (delta(&s, z1).unwrap() + delta(&s, z2).unwrap()) % 2;
                assert_eq!(lhs, rhs);
            }
        }
        // kernel of delta = plain stabilizer
        let plain = stabilizer(&s, Group::D, Action::Plain);
        let kernel: Vec<_> = stab
            .iter()
            .copied()
            .filter(|z| delta(&s, z).unwrap() == 0)
            .collect();
        assert_eq!(kernel, plain);
    }

    #[test]
    fn canonical_rep_examples() {
        assert_eq!(
            canonical_rep(&sig(&[2, 2], &[1, -1]), Group::C),
            sig(&[2, 2], &[-1, 1])
        );
        assert_eq!(
            canonical_rep(&sig(&[1], &[1]), Group::D),
            sig(&[1], &[-1])
        );
        let single = sig(&[2, 2], &[1, -1]);
        let c = canonical_rep(&single, Group::D);
        assert_eq!(canonical_rep(&c, Group::D), c);
    }

    #[test]
    fn canonical_rep_is_orbit_invariant() {
        for d in 1..=4usize {
            for s in enumerate_canonical(d, 3, Group::C) {
                for z in group_elements(d, Group::D) {
                    let moved = act(&z, &s).unwrap();
                    assert_eq!(canonical_rep(&moved, Group::D), canonical_rep(&s, Group::D));
                }
                for z in group_elements(d, Group::C) {
                    let moved = act(&z, &s).unwrap();
                    assert_eq!(canonical_rep(&moved, Group::C), canonical_rep(&s, Group::C));
                }
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        let d1 = enumerate_canonical(1, 5, Group::D);
        assert_eq!(
            d1,
            vec![sig(&[1], &[-1]), sig(&[3], &[-1]), sig(&[5], &[-1])]
        );
        assert_eq!(enumerate_canonical(2, 2, Group::D).len(), 2);
        assert_eq!(enumerate_canonical(2, 2, Group::C).len(), 3);
    }

    #[test]
    fn json_round_trip() {
        let s = sig(&[2, 2], &[1, -1]);
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, r#"{"d":2,"s":[2,2],"o":[1,-1]}"#);
        let back: SignatureVector = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<SignatureVector>(r#"{"d":2,"s":[2,1],"o":[1,1]}"#).is_err());
    }

    #[test]
    fn literal_parsing() {
        assert_eq!(parse_signature_literal("2,2,-1,1"), Ok(sig(&[2, 2], &[-1, 1])));
        assert!(parse_signature_literal("2,1,1,1").is_err());
        assert!(parse_signature_literal("2,2,1").is_err());
    }
}
