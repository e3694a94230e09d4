use super::*;
use crate::base::{delpezzo_nef_oracle, Violation};
use crate::certificate::{verify, Verdict};
use crate::lattice::int;

fn v(s: &str) -> ClassVector {
    s.parse().unwrap()
}

fn glue_inners(c: &Certificate, out: &mut Vec<ClassVector>) {
    if let Certificate::Glue { inner, .. } = c {
        out.push(inner.vector().clone());
    }
    for child in c.children() {
        glue_inners(child, out);
    }
}

fn proved(v: &ClassVector, kind: PositivityKind) -> Certificate {
    match prove(v, kind, &SearchLimits::default()) {
        ProveOutcome::Proved(c) => {
            assert_eq!(verify(&c), Verdict::Valid { vector: v.clone(), kind });
            c
        }
        other => panic!("{v}: {other:?}"),
    }
}

#[test]
fn ten_three_eleven() {
    let report = prove_with_report(&v("10;3^11"), PositivityKind::Nef, &SearchLimits::default());
    let ProveOutcome::Proved(c) = &report.outcome else {
        panic!("{:?}", report.outcome)
    };
    assert!(verify(c).is_valid());
    let mut inners = Vec::new();
    glue_inners(c, &mut inners);
    assert_eq!(inners, vec![v("6;3^4")]);
    let bad = report
        .pruned
        .iter()
        .find(|p| p.outer == v("10;3^2,9"))
        .expect("the (9;3^9) branch is pruned");
    assert_eq!(bad.inner, v("9;3^9"));
    assert_eq!(bad.reason.to_string(), "10 < 9+3");
}

#[test]
fn disproofs() {
    match prove(&v("2;1^5"), PositivityKind::Nef, &SearchLimits::default()) {
        ProveOutcome::Disproved(dp) => {
            assert!(matches!(dp.reason.violation, Violation::SelfIntersection { .. }));
        }
        other => panic!("{other:?}"),
    }
    // (4; 3,2,2) reflects to (1; 0,-1,-1).
    match prove(&v("4;3,2,2"), PositivityKind::Nef, &SearchLimits::default()) {
        ProveOutcome::Disproved(dp) => {
            assert_eq!(crate::cremona::apply_word(&dp.word, &v("4;3,2,2")).unwrap(), dp.image);
        }
        other => panic!("{other:?}"),
    }
    assert!(prove(&v("3;1^9"), PositivityKind::Ample, &SearchLimits::default()).is_disproved());
}

#[test]
fn small_limits_are_inconclusive() {
    let limits = SearchLimits {
        max_depth: 2,
        node_budget: 2_000,
        ..SearchLimits::default()
    };
    assert!(matches!(
        prove(&v("19;6^10"), PositivityKind::Nef, &limits),
        ProveOutcome::Inconclusive { nodes_used } if nodes_used > 0
    ));
}

#[test]
fn low_k_cases() {
    for s in ["5;3", "5;3,0", "5;0,3", "7;3,4", "4;", "0;0,0", "3;0^4"] {
        proved(&v(s), PositivityKind::Nef);
    }
    for s in ["5;3", "5;2", "6;1", "7;3,2", "2;"] {
        proved(&v(s), PositivityKind::Ample);
    }
    assert!(prove(&v("5;3,3"), PositivityKind::Nef, &SearchLimits::default()).is_disproved());
}

#[test]
fn rational_input_is_scaled() {
    let c = proved(&v("7/2;3/2^2,1/2"), PositivityKind::Nef);
    assert!(matches!(c, Certificate::Scale { .. }));
}

#[test]
fn determinism() {
    let a = prove(&v("10;3^11"), PositivityKind::Nef, &SearchLimits::default());
    let b = prove(&v("10;3^11"), PositivityKind::Nef, &SearchLimits::default());
    assert_eq!(a, b);
}

#[test]
fn parallel_mode_proves() {
    let limits = SearchLimits {
        parallel: true,
        ..SearchLimits::default()
    };
    let ProveOutcome::Proved(c) = prove(&v("10;3^11"), PositivityKind::Nef, &limits) else {
        panic!()
    };
    assert!(verify(&c).is_valid());
}

#[test]
fn proofs_agree_with_oracle() {
    for s in ["6;2^3,1^3", "9;3^8", "8;3^7", "12;4^6,3^2", "6;3,2^4,1"] {
        let vec = v(s);
        let outcome = prove(&vec, PositivityKind::Nef, &SearchLimits::default());
        let nef = delpezzo_nef_oracle(&vec).unwrap();
        match outcome {
            ProveOutcome::Proved(c) => {
                assert!(nef, "{s}");
                assert!(verify(&c).is_valid());
            }
            ProveOutcome::Disproved(_) => assert!(!nef, "{s}"),
            ProveOutcome::Inconclusive { .. } => {}
        }
    }
}

#[test]
fn candidate_examples() {
    let degrees = 2..=16;
    let ds = candidate_decompositions(&v("10;3^11"), &degrees);
    let inners: Vec<_> = ds.iter().map(|d| d.inner.clone()).collect();
    assert!(inners.contains(&v("6;3^4")));
    assert!(inners.contains(&v("9;3^9")));
    let ds = candidate_decompositions(&v("170;39^19"), &degrees);
    assert!(ds.iter().any(|d| d.inner == v("78;39^4") && d.outer == v("170;39^15,78")));
    let ds = candidate_decompositions(&v("13;2^36"), &degrees);
    assert!(ds.iter().any(|d| d.inner == v("12;2^36") && d.outer == v("13;12")));
}

fn check_family(c: Result<Certificate, ProverError>, expected: &str, self_intersection: i64) {
    let c = c.unwrap();
    let verdict = verify(&c);
    assert_eq!(
        verdict,
        Verdict::Valid {
            vector: v(expected),
            kind: PositivityKind::Nef
        },
        "{expected}"
    );
    assert_eq!(c.vector().self_intersection(), int(self_intersection));
}

#[test]
fn part1_examples() {
    check_family(asymp1_part1(1, 2), "3;1^8", 1);
    check_family(asymp1_part1(2, 1), "5;2^6", 1);
    check_family(asymp1_part1(2, 2), "9;2^20", 1);
    assert!(asymp1_part1(1, 1).is_err());
    assert!(delpezzo_nef_oracle(&v("3;1^8")).unwrap());
    assert!(delpezzo_nef_oracle(&v("5;2^6")).unwrap());
}

#[test]
fn part2_examples() {
    check_family(asymp1_part2(2, 2), "7;2^12", 1);
    check_family(asymp1_part2(3, 1), "8;3^7", 1);
    assert!(delpezzo_nef_oracle(&v("8;3^7")).unwrap());
    assert!(matches!(asymp1_part2(2, 1), Err(ProverError::PreconditionViolated(_))));
    assert!(!delpezzo_nef_oracle(&v("3;2,2")).unwrap());
}

#[test]
fn part3_examples() {
    check_family(asymp1_part3(1, 3), "7;2^12,1", 0);
    check_family(asymp1_part3(1, 5), "11;2^30,1", 0);
    check_family(asymp1_part3(2, 5), "41;4^105,1", 0);
    check_family(asymp1_part3(1, 4), "9;2^20,1", 0);
    check_family(asymp1_part3_trimmed(1, 3), "7;2^12", 1);
    assert!(asymp1_part3(1, 2).is_err());
    assert!(asymp1_part3(3, 5).is_err());
}

#[test]
fn coef2_examples() {
    check_family(coef2_certificate(7), "7;2^12", 1);
    check_family(coef2_certificate(5), "5;2^6", 1);
    check_family(coef2_certificate(4), "4;2^4", 0);
    assert!(matches!(coef2_certificate(3), Err(ProverError::PreconditionViolated(_))));
    assert!(coef2_certificate(1).is_err());
}

#[test]
fn nagata_examples() {
    let x = Rational::new(33.into(), 8.into());
    let c = nagata_compose(16, 16, &int(17), &int(1), &x).unwrap();
    match verify(&c) {
        Verdict::ConditionallyValid { vector, assumptions, kind } => {
            assert_eq!(vector, v("17;1^256"));
            assert_eq!(kind, PositivityKind::Ample);
            assert_eq!(assumptions.into_iter().collect::<Vec<_>>(), vec!["nagata(16)"]);
        }
        other => panic!("{other:?}"),
    }
    let c = nagata_compose(9, 10, &int(10), &int(1), &Rational::new(31.into(), 10.into())).unwrap();
    assert_eq!(
        c.assumptions().into_iter().collect::<Vec<_>>(),
        vec!["nagata(10)", "nagata(9)"]
    );
    assert!(nagata_compose(16, 16, &int(17), &int(1), &int(5)).is_err());
    assert!(nagata_compose(16, 16, &int(17), &int(1), &int(4)).is_err());
}

#[test]
fn probe_finds_decompositions() {
    let r = indecomposability_probe(&v("10;3^11"), &ProbeLimits::default());
    match r.verdict {
        ProbeVerdict::DecompositionFound { decompositions, .. } => {
            assert!(decompositions.iter().any(|d| d.inner == v("6;3^4")));
        }
        other => panic!("{other:?}"),
    }
}
