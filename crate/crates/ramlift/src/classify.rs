//! Enumeration of conjugacy-class descriptors (s, [h]) for ramified
//! lifts of the standard BS(1,n) action.
//!
//! The full set runs over D-orbit representatives of signatures with
//! homs into Stab_D(s) up to conjugacy there; the orientation-preserving
//! set runs over C-orbit representatives with homs into Stab_C(s). An
//! independent brute-force oracle quotients all (signature, hom) pairs by
//! the global moving-conjugacy relation and compares counts.

use crate::sig::{
    act, enumerate_canonical, group_elements, stabilizer, Action, DihedralElement,
    Group, SignatureVector,
};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum ClassifyError {
    #[error("element list is not closed under multiplication")]
    NotAGroup,
    #[error("oracle mismatch: enumerate_classes gave {fast}, brute force gave {oracle} ({witness})")]
    MismatchDetected {
        fast: usize,
        oracle: usize,
        witness: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationClass {
    Full,
    OrientationPreserving,
}

impl OrientationClass {
    fn group(self) -> Group {
        match self {
            OrientationClass::Full => Group::D,
            OrientationClass::OrientationPreserving => Group::C,
        }
    }
}

/// One conjugacy class of lifted representations: the canonical
/// signature together with the canonical hom representative.
#[derive(Clone, Debug, Serialize)]
pub struct ClassDescriptor {
    pub n: u32,
    pub signature: SignatureVector,
    pub zeta_a: DihedralElement,
    pub zeta_b: DihedralElement,
    pub orientation_class: OrientationClass,
}

fn elem_key(e: &DihedralElement) -> (usize, bool) {
    (e.rot(), e.flip())
}

fn hom_key(h: &(DihedralElement, DihedralElement)) -> ((usize, bool), (usize, bool)) {
    (elem_key(&h.0), elem_key(&h.1))
}

/// All homs BS(1,n) -> H: pairs (A, B) with A B A^-1 = B^n. The element
/// list is spot-checked for closure first.
pub fn enumerate_homs(
    elements: &[DihedralElement],
    n: u32,
) -> Result<Vec<(DihedralElement, DihedralElement)>, ClassifyError> {
    for x in elements {
        for y in elements {
            if !elements.contains(&x.mul(y)) {
                return Err(ClassifyError::NotAGroup);
            }
        }
    }
    let mut homs = Vec::new();
    for a in elements {
        for b in elements {
            if a.mul(b).mul(&a.inv()) == b.pow(i64::from(n)) {
                homs.push((a.clone(), b.clone()));
            }
        }
    }
    homs.sort_by_key(hom_key);
    Ok(homs)
}

/// One representative per orbit of simultaneous conjugation
/// (A, B) -> (g A g^-1, g B g^-1) over g in H; the representative is the
/// lexicographic minimum under (rotation, flip) element order.
pub fn hom_classes(
    elements: &[DihedralElement],
    homs: &[(DihedralElement, DihedralElement)],
) -> Vec<(DihedralElement, DihedralElement)> {
    let mut reps = Vec::new();
    for h in homs {
        let min = elements
            .iter()
            .map(|g| (g.mul(&h.0).mul(&g.inv()), g.mul(&h.1).mul(&g.inv())))
            .min_by_key(hom_key)
            .expect("nonempty group");
        if !reps.contains(&min) {
            reps.push(min);
        }
    }
    reps.sort_by_key(hom_key);
    reps
}

/// All class descriptors with degree exactly `d` and labels at most
/// `max_s`. `quotient` controls whether hom conjugacy is quotiented for
/// the orientation-preserving set (the full set is always quotiented).
pub fn enumerate_classes(
    n: u32,
    d: usize,
    max_s: u32,
    oc: OrientationClass,
    quotient: bool,
) -> Vec<ClassDescriptor> {
    let group = oc.group();
    let mut out = Vec::new();
    for sig in enumerate_canonical(d, max_s, group) {
        let stab = stabilizer(&sig, group, Action::Plain);
        let homs = enumerate_homs(&stab, n).expect("stabilizer is a group");
        let homs = if quotient || oc == OrientationClass::Full {
            hom_classes(&stab, &homs)
        } else {
            homs
        };
        for (za, zb) in homs {
            out.push(ClassDescriptor {
                n,
                signature: sig.clone(),
                zeta_a: za,
                zeta_b: zb,
                orientation_class: oc,
            });
        }
    }
    out
}

/// Independent oracle: enumerate every valid signature with entries at
/// most max_s (all orbit members, not only canonical ones) paired with
/// every hom into its stabilizer, quotient by the full moving conjugacy
/// (s, h) ~ (zeta(s), zeta h zeta^-1), and compare class counts.
pub fn cross_check(
    n: u32,
    d: usize,
    max_s: u32,
    oc: OrientationClass,
) -> Result<(usize, usize), ClassifyError> {
    let group = oc.group();
    let fast = enumerate_classes(n, d, max_s, oc, true).len();
    let moving = group_elements(d, group);

    // all valid signatures of degree d, any orbit position
    let mut all_sigs = Vec::new();
    for canon in enumerate_canonical(d, max_s, group) {
        for zeta in &moving {
            let img = act(zeta, &canon).expect("action preserves validity");
            if !all_sigs.contains(&img) {
                all_sigs.push(img);
            }
        }
    }

    let mut keys: Vec<(SignatureVector, ((usize, bool), (usize, bool)))> = Vec::new();
    let mut total_pairs = 0usize;
    for sig in &all_sigs {
        let stab = stabilizer(sig, group, Action::Plain);
        for h in enumerate_homs(&stab, n)? {
            total_pairs += 1;
            // canonical key of the (signature, hom) pair under the
            // moving conjugacy by the whole group
            let key = moving
                .iter()
                .map(|g| {
                    let s2 = act(g, sig).expect("valid");
                    let h2 = (g.mul(&h.0).mul(&g.inv()), g.mul(&h.1).mul(&g.inv()));
                    (s2, hom_key(&h2))
                })
                .min()
                .expect("nonempty group");
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
    }
    let oracle = keys.len();
    if fast != oracle {
        return Err(ClassifyError::MismatchDetected {
            fast,
            oracle,
            witness: format!(
                "d={d} max_s={max_s} n={n} {oc:?}: {total_pairs} raw pairs over {} signatures",
                all_sigs.len()
            ),
        });
    }
    Ok((fast, oracle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sig::{canonical_rep, validate_signature};

    #[test]
    fn homs_trivial_group() {
        let h = vec![DihedralElement::identity(3)];
        let homs = enumerate_homs(&h, 2).unwrap();
        assert_eq!(homs.len(), 1);
        assert!(homs[0].0.is_identity() && homs[0].1.is_identity());
    }

    #[test]
    fn homs_z2() {
        // Z/2 generated by the reflection; n=2 forces B = B^2 = e
        let h = vec![
            DihedralElement::identity(2),
            DihedralElement::new(2, 0, true),
        ];
        let homs = enumerate_homs(&h, 2).unwrap();
        assert_eq!(homs.len(), 2);
        assert!(homs.iter().all(|(_, b)| b.is_identity()));
    }

    #[test]
    fn homs_klein_four_in_d8() {
        // <a, b^4> = Z/2 x Z/2 inside D_8: every B has B^2 = e, so the
        // n=2 relation forces B = e; 4 homs out of 16 pairs
        let h = vec![
            DihedralElement::identity(8),
            DihedralElement::new(8, 4, false),
            DihedralElement::new(8, 0, true),
            DihedralElement::new(8, 4, true),
        ];
        let homs = enumerate_homs(&h, 2).unwrap();
        assert_eq!(homs.len(), 4);
        assert!(homs.iter().all(|(_, b)| b.is_identity()));
    }

    #[test]
    fn not_a_group_detected() {
        let h = vec![
            DihedralElement::identity(4),
            DihedralElement::rotation(4), // b, but b^2 missing
        ];
        assert!(matches!(
            enumerate_homs(&h, 2),
            Err(ClassifyError::NotAGroup)
        ));
    }

    #[test]
    fn hom_class_orbit_sizes_sum() {
        // full D_3 acting on its own homs
        let h = group_elements(3, Group::D);
        let homs = enumerate_homs(&h, 2).unwrap();
        let reps = hom_classes(&h, &homs);
        // recount: orbit sizes must partition the hom list
        let mut covered = 0usize;
        for rep in &reps {
            let mut orbit = Vec::new();
            for g in &h {
                let img = (
                    g.mul(&rep.0).mul(&g.inv()),
                    g.mul(&rep.1).mul(&g.inv()),
                );
                if !orbit.contains(&img) {
                    orbit.push(img);
                }
            }
            assert!(orbit.iter().all(|x| homs.contains(x)));
            covered += orbit.len();
        }
        assert_eq!(covered, homs.len());
        // abelian subgroup: classes == homs
        let c3 = group_elements(3, Group::C);
        let homs_c = enumerate_homs(&c3, 2).unwrap();
        assert_eq!(hom_classes(&c3, &homs_c).len(), homs_c.len());
    }

    #[test]
    fn d1_classes_one_per_odd_label() {
        let classes = enumerate_classes(2, 1, 1, OrientationClass::Full, true);
        assert_eq!(classes.len(), 1);
        assert!(classes[0].zeta_a.is_identity() && classes[0].zeta_b.is_identity());

        let classes5 = enumerate_classes(2, 1, 5, OrientationClass::Full, true);
        assert_eq!(classes5.len(), 3);
        let labels: Vec<u32> = classes5.iter().map(|c| c.signature.vertex_labels()[0]).collect();
        assert_eq!(labels, vec![1, 3, 5]);
    }

    #[test]
    fn descriptors_satisfy_relation() {
        for oc in [OrientationClass::Full, OrientationClass::OrientationPreserving] {
            for d in 1..=3usize {
                for c in enumerate_classes(2, d, 3, oc, true) {
                    let lhs = c.zeta_a.mul(&c.zeta_b).mul(&c.zeta_a.inv());
                    assert_eq!(lhs, c.zeta_b.pow(2));
                    // signature canonical, hom inside the plain stabilizer
                    assert_eq!(
                        c.signature,
                        canonical_rep(&c.signature, oc.group())
                    );
                    let stab = stabilizer(&c.signature, oc.group(), Action::Plain);
                    assert!(stab.contains(&c.zeta_a) && stab.contains(&c.zeta_b));
                }
            }
        }
    }

    #[test]
    fn oracle_matches_small() {
        assert_eq!(cross_check(2, 1, 5, OrientationClass::Full).unwrap().0, 3);
        cross_check(2, 2, 2, OrientationClass::Full).unwrap();
        cross_check(2, 2, 2, OrientationClass::OrientationPreserving).unwrap();
        cross_check(3, 3, 3, OrientationClass::Full).unwrap();
    }

    #[test]
    fn counts_monotone_in_max_s() {
        let mut prev = 0usize;
        for max_s in 1..=4 {
            let count = enumerate_classes(2, 2, max_s, OrientationClass::Full, true).len();
            assert!(count >= prev, "max_s={max_s}: {count} < {prev}");
            prev = count;
        }
    }

    #[test]
    fn unquotiented_plus_at_least_quotiented() {
        let q = enumerate_classes(2, 2, 2, OrientationClass::OrientationPreserving, true).len();
        let u = enumerate_classes(2, 2, 2, OrientationClass::OrientationPreserving, false).len();
        assert!(u >= q);
    }

    #[test]
    fn descriptor_json_shape() {
        let s = validate_signature(&[1], &[-1]).unwrap();
        let c = ClassDescriptor {
            n: 2,
            signature: s,
            zeta_a: DihedralElement::identity(1),
            zeta_b: DihedralElement::identity(1),
            orientation_class: OrientationClass::Full,
        };
        let j = serde_json::to_string(&c).unwrap();
        assert!(j.contains("\"orientation_class\":\"full\""), "{j}");
        assert!(j.contains("\"zeta_a\""), "{j}");
    }
}
