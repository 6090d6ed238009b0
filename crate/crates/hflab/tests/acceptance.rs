//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with its runtime budget. Run with `--nocapture` to see the lines for
//! passing criteria.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hopfgamma::graded::{bicharacter_cocycle, GradedSystem};
use hopfgamma::growth::{
    ball_growth, classify_growth, commutation_certificate, verdicts, BorelElement, Certificate,
    Classification, GkVerdict, NoetherianVerdict, RegularVerdict,
};
use hopfgamma::hopf::{coradical_filtration, is_semisimple};
use hopfgamma::qls::{build_fiber, Character, DatumMode, QlsDatum};
use hopfgamma::scalar::CycloScalar;

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join("scenarios")
}

fn stamp(n: u32, name: &str, budget_ms: u128, started: Instant) {
    let elapsed = started.elapsed().as_millis();
    println!("ACCEPTANCE {n:02} {name}: PASS ({elapsed} ms, budget {budget_ms} ms)");
    assert!(
        elapsed <= budget_ms,
        "criterion {n} exceeded its {budget_ms} ms budget ({elapsed} ms)"
    );
}

fn sweedler() -> QlsDatum {
    QlsDatum::new(1, 2, vec![vec![1]], DatumMode::Qls).unwrap()
}

fn taft3() -> QlsDatum {
    QlsDatum::new(1, 3, vec![vec![1]], DatumMode::Qls).unwrap()
}

fn klein() -> QlsDatum {
    QlsDatum::new(2, 2, vec![vec![1, 1], vec![1, 1]], DatumMode::Qls).unwrap()
}

fn group_only(order: i64) -> QlsDatum {
    QlsDatum::new(1, order as u32, vec![vec![1]], DatumMode::GroupOnly).unwrap()
}

fn all_data() -> Vec<QlsDatum> {
    vec![sweedler(), taft3(), klein(), group_only(2), group_only(6)]
}

#[test]
fn criterion_01_hopf_axiom_suite() {
    let t = Instant::now();
    for datum in all_data() {
        let fiber = build_fiber(&datum, &datum.char_identity()).unwrap();
        let report = fiber.hopf.verify_hopf();
        assert_eq!(report.entries.len(), 9, "nine axiom checks expected");
        assert!(report.all_passed(), "{report}");
    }
    stamp(1, "hopf_axiom_suite", 5_000, t);
}

#[test]
fn criterion_02_dimension_uniformity() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for datum in all_data() {
        let expected = datum.fiber_dim();
        for _ in 0..20 {
            let tvals: Vec<CycloScalar> = (0..datum.theta())
                .map(|_| {
                    let v = loop {
                        let v = rng.gen_range(-6i64..=6);
                        if v != 0 {
                            break v;
                        }
                    };
                    CycloScalar::from_int(datum.conductor(), v)
                })
                .collect();
            let svals: Vec<CycloScalar> = if datum.is_group_only() {
                vec![]
            } else {
                (0..datum.theta())
                    .map(|_| CycloScalar::from_int(datum.conductor(), rng.gen_range(-6i64..=6)))
                    .collect()
            };
            let kappa = datum.character(tvals, svals).unwrap();
            let fiber = build_fiber(&datum, &kappa).unwrap();
            assert_eq!(fiber.hopf.dim, expected);
            assert!(fiber.hopf.verify_algebra().all_passed());
        }
    }
    stamp(2, "dimension_uniformity", 10_000, t);
}

fn powers_support(datum: &QlsDatum, kappa: &Character) -> Vec<Character> {
    vec![
        datum.char_identity(),
        kappa.clone(),
        datum.char_inv(kappa).unwrap(),
        datum.char_mul(kappa, kappa).unwrap(),
    ]
}

#[test]
fn criterion_03_strong_grading() {
    let t = Instant::now();
    let datum = sweedler();
    let kappa = datum.character_from_ints(&[2], &[1]).unwrap();
    let sys = GradedSystem::new(datum.clone(), vec![kappa.clone()]).unwrap();
    let sup = powers_support(&datum, &kappa);
    let pairs: Vec<(Character, Character)> = sup
        .iter()
        .flat_map(|a| sup.iter().map(move |b| (a.clone(), b.clone())))
        .collect();
    assert_eq!(pairs.len(), 16);
    let report = sys.verify_strong_grading(&pairs).unwrap();
    assert!(report.all_passed(), "{report}");
    for entry in &report.entries {
        assert_eq!(entry.evidence["rank"], 4);
    }
    stamp(3, "strong_grading", 10_000, t);
}

#[test]
fn criterion_04_exact_sequence() {
    let t = Instant::now();
    let datum = sweedler();
    let kappa = datum.character_from_ints(&[2], &[0]).unwrap();
    let sys = GradedSystem::new(datum.clone(), vec![kappa.clone()]).unwrap();
    let sup = powers_support(&datum, &kappa);
    assert_eq!(sup.len() * sys.dim_component(), 16, "16-dim truncation");
    let report = sys.verify_exact_sequence(&sup).unwrap();
    assert!(report.all_passed(), "{report}");
    let coinv = report.get("coinvariants_equal_identity_component").unwrap();
    assert_eq!(coinv.evidence["dim"], 4);
    let codim = report.get("augmentation_ideal_codimension_one").unwrap();
    assert_eq!(codim.evidence["dims"], serde_json::json!([3, 3, 3, 3]));
    stamp(4, "exact_sequence", 10_000, t);
}

#[test]
fn criterion_05_hopf_system_coherence() {
    let t = Instant::now();
    let datum = sweedler();
    let kappa = datum.character_from_ints(&[2], &[1]).unwrap();
    let sys = GradedSystem::new(datum.clone(), vec![kappa.clone()]).unwrap();
    // coassociativity on all triples from {e, kappa, kappa^{-1}}
    let chars = vec![
        datum.char_identity(),
        kappa.clone(),
        datum.char_inv(&kappa).unwrap(),
    ];
    let report = sys.verify_coherence(&chars).unwrap();
    assert!(report.all_passed(), "{report}");
    // antipode identity at (2,0) and (2,3)
    let sys20 = GradedSystem::new(
        datum.clone(),
        vec![datum.character_from_ints(&[2], &[0]).unwrap()],
    )
    .unwrap();
    for (tv, sv) in [(2i64, 0i64), (2, 3)] {
        let k = datum.character_from_ints(&[tv], &[sv]).unwrap();
        let report = sys20.verify_coherence(&[k]).unwrap();
        assert!(report.all_passed(), "{report}");
    }
    stamp(5, "hopf_system_coherence", 10_000, t);
}

#[test]
fn criterion_06_coradical_theorem() {
    let t = Instant::now();
    for (datum, expected_dims) in [
        (sweedler(), vec![2usize, 4]),
        (taft3(), vec![3, 6, 9]),
    ] {
        let kappa = datum.character_from_ints(&[2], &[0]).unwrap();
        let sys = GradedSystem::new(datum.clone(), vec![kappa.clone()]).unwrap();
        let sup = powers_support(&datum, &kappa);
        for alpha in &sup {
            let comp = sys.component(alpha).unwrap();
            let chain = coradical_filtration(&comp.coalgebra).unwrap();
            let dims: Vec<usize> = chain.iter().map(|s| s.dim()).collect();
            assert_eq!(dims, expected_dims);
        }
        let report = sys.verify_coradical(&sup).unwrap();
        assert!(report.all_passed(), "{report}");
        let global = report.get("global_equals_componentwise").unwrap();
        let scaled: Vec<usize> = expected_dims.iter().map(|d| d * sup.len()).collect();
        assert_eq!(
            global.evidence["global_dims"],
            serde_json::to_value(&scaled).unwrap()
        );
    }
    stamp(6, "coradical_theorem", 30_000, t);
}

#[test]
fn criterion_07_cosemisimplicity() {
    let t = Instant::now();
    for datum in [sweedler(), taft3(), klein()] {
        let h = build_fiber(&datum, &datum.char_identity()).unwrap().hopf;
        let (ss, ev) = is_semisimple(&h).unwrap();
        assert!(!ss);
        assert!(ev.radical_dim > 0);
        assert!(ev.counit_of_integral.is_zero());
    }
    for datum in [group_only(2), group_only(6)] {
        let h = build_fiber(&datum, &datum.char_identity()).unwrap().hopf;
        let (ss, ev) = is_semisimple(&h).unwrap();
        assert!(ss);
        assert_eq!(ev.radical_dim, 0);
        assert!(!ev.counit_of_integral.is_zero());
    }
    stamp(7, "cosemisimplicity", 5_000, t);
}

#[test]
fn criterion_08_twisting() {
    let t = Instant::now();
    let datum = klein();
    let kappa = datum.character_from_ints(&[2, 1], &[0, 0]).unwrap();
    let gamma = datum.character_from_ints(&[1, 1], &[1, 0]).unwrap();
    let kg = datum.char_mul(&kappa, &gamma).unwrap();
    let sup = vec![datum.char_identity(), kappa.clone(), gamma.clone(), kg];
    let sys = GradedSystem::new(datum.clone(), vec![kappa.clone(), gamma.clone()]).unwrap();
    let h_eps = build_fiber(&datum, &datum.char_identity()).unwrap().hopf;
    let sigma = bicharacter_cocycle(&datum, &h_eps, &[vec![0, 1], vec![0, 0]]).unwrap();
    let twisted = sys.twisted(sigma).unwrap();
    // route equality is asserted inside each component build
    for k in &sup {
        twisted.component(k).unwrap();
    }
    // criterion 3 on the twisted system
    let pairs: Vec<(Character, Character)> = sup
        .iter()
        .flat_map(|a| sup.iter().map(move |b| (a.clone(), b.clone())))
        .collect();
    let report = twisted.verify_strong_grading(&pairs).unwrap();
    assert!(report.all_passed(), "{report}");
    // criterion 4 on the twisted system
    let report = twisted.verify_exact_sequence(&sup).unwrap();
    assert!(report.all_passed(), "{report}");
    // criterion 5 on the twisted system
    let chars = vec![
        datum.char_identity(),
        kappa.clone(),
        datum.char_inv(&kappa).unwrap(),
    ];
    let report = twisted.verify_coherence(&chars).unwrap();
    assert!(report.all_passed(), "{report}");
    stamp(8, "twisting", 30_000, t);
}

#[test]
fn criterion_09_growth() {
    let t = Instant::now();
    let diag = |v: i64| {
        BorelElement::new(vec![(CycloScalar::from_int(1, v), CycloScalar::zero(1))]).unwrap()
    };
    let affine = |tv: i64, sv: i64| {
        BorelElement::new(vec![(
            CycloScalar::from_int(1, tv),
            CycloScalar::from_int(1, sv),
        )])
        .unwrap()
    };

    // closed forms derived by exhaustive word enumeration up to radius 6
    let naive_sizes = |gens: &[BorelElement], n: usize| -> Vec<u64> {
        let mut alphabet = Vec::new();
        for g in gens {
            alphabet.push(g.clone());
            alphabet.push(g.inv().unwrap());
        }
        let id = BorelElement::identity(1, 1);
        let mut seen: std::collections::HashSet<BorelElement> = [id.clone()].into();
        let mut current: Vec<BorelElement> = vec![id];
        let mut sizes = vec![1u64];
        for _ in 1..=n {
            let mut next = Vec::new();
            for w in &current {
                for a in &alphabet {
                    let e = w.mul(a);
                    if seen.insert(e.clone()) {
                        next.push(e);
                    }
                }
            }
            sizes.push(seen.len() as u64);
            current = next;
        }
        sizes
    };

    // rank one
    let gens = vec![diag(2)];
    let closed: Vec<u64> = (0..=12).map(|n| 2 * n + 1).collect();
    assert_eq!(naive_sizes(&gens, 6), closed[..7].to_vec());
    let sizes = ball_growth(&gens, 12, 512).unwrap();
    assert_eq!(sizes, closed);
    let (class, _) = classify_growth(&sizes).unwrap();
    assert_eq!(class, Classification::Polynomial { degree: 1 });

    // rank two
    let gens = vec![diag(2), diag(3)];
    let closed: Vec<u64> = (0..=12).map(|n| 2 * n * n + 2 * n + 1).collect();
    assert_eq!(naive_sizes(&gens, 6), closed[..7].to_vec());
    let sizes = ball_growth(&gens, 12, 512).unwrap();
    assert_eq!(sizes, closed);
    let (class, _) = classify_growth(&sizes).unwrap();
    assert_eq!(class, Classification::Polynomial { degree: 2 });

    // exponential scaling-plus-shift pair
    let gens = vec![diag(2), affine(1, 1)];
    let sizes = ball_growth(&gens, 12, 512).unwrap();
    assert_eq!(sizes[..7].to_vec(), naive_sizes(&gens, 6));
    let (class, diag_info) = classify_growth(&sizes).unwrap();
    assert_eq!(class, Classification::Exponential);
    assert!(diag_info.tail_ratios.iter().all(|r| *r >= 1.0 + 1.0 / 16.0));
    stamp(9, "growth", 60_000, t);
}

#[test]
fn criterion_10_verdict_table() {
    let t = Instant::now();
    let diag = |v: i64| {
        BorelElement::new(vec![(CycloScalar::from_int(1, v), CycloScalar::zero(1))]).unwrap()
    };
    let affine = |tv: i64, sv: i64| {
        BorelElement::new(vec![(
            CycloScalar::from_int(1, tv),
            CycloScalar::from_int(1, sv),
        )])
        .unwrap()
    };

    // rank-two grading group over the semisimple group-only identity fiber
    let h2 = build_fiber(&group_only(2), &group_only(2).char_identity())
        .unwrap()
        .hopf;
    let (ss2, _) = is_semisimple(&h2).unwrap();
    let gens = vec![diag(2), diag(3)];
    let sizes = ball_growth(&gens, 12, 512).unwrap();
    let (class, _) = classify_growth(&sizes).unwrap();
    let cert = commutation_certificate(&gens, 10).unwrap();
    let v = verdicts(class, cert, ss2, &sizes);
    assert_eq!(v.gk, GkVerdict::Finite { value: 2 });
    assert_eq!(v.noetherian, NoetherianVerdict::Yes);
    assert_eq!(v.regular, RegularVerdict::Yes);
    assert_eq!(v.gldim_bound, Some(2));

    // infinite cyclic over the non-semisimple identity fiber
    let hs = build_fiber(&sweedler(), &sweedler().char_identity())
        .unwrap()
        .hopf;
    let (ss_sw, _) = is_semisimple(&hs).unwrap();
    assert!(!ss_sw);
    let gens = vec![diag(2)];
    let sizes = ball_growth(&gens, 12, 512).unwrap();
    let (class, _) = classify_growth(&sizes).unwrap();
    let cert = commutation_certificate(&gens, 10).unwrap();
    let v = verdicts(class, cert, ss_sw, &sizes);
    assert_eq!(v.gk, GkVerdict::Finite { value: 1 });
    assert_eq!(v.noetherian, NoetherianVerdict::Yes);
    assert_eq!(v.regular, RegularVerdict::No);

    // exponential growth: dimension infinite, Noetherianity left open
    let gens = vec![diag(2), affine(1, 1)];
    let sizes = ball_growth(&gens, 12, 512).unwrap();
    let (class, _) = classify_growth(&sizes).unwrap();
    let cert = commutation_certificate(&gens, 6).unwrap();
    assert!(matches!(cert, Certificate::NonAbelian { .. }));
    let v = verdicts(class, cert, ss_sw, &sizes);
    assert_eq!(v.gk, GkVerdict::Infinite);
    assert_eq!(v.noetherian, NoetherianVerdict::Undetermined);
    assert_eq!(v.regular, RegularVerdict::NotApplicable);

    // the golden reports pin the same table through the CLI
    for (scenario, expects) in [
        (
            "group_only2_z2.json",
            vec![r#""regular": "yes""#, r#""gldim_bound": 2"#],
        ),
        (
            "sweedler_z.json",
            vec![r#""noetherian": "yes""#, r#""regular": "no""#],
        ),
        (
            "sweedler_z2.json",
            vec![r#""kind": "finite""#, r#""regular": "no""#],
        ),
        (
            "group_only_z.json",
            vec![r#""regular": "yes""#, r#""gldim_bound": 1"#],
        ),
        (
            "growth_exponential.json",
            vec![r#""kind": "infinite""#, r#""noetherian": "undetermined""#],
        ),
    ] {
        let golden = scenario_dir().join("golden").join(scenario);
        let text = std::fs::read_to_string(&golden)
            .unwrap_or_else(|_| panic!("missing golden report {}", golden.display()));
        for needle in expects {
            assert!(
                text.contains(needle),
                "{scenario} golden lacks {needle}"
            );
        }
    }
    stamp(10, "verdict_table", 60_000, t);
}

#[test]
fn criterion_11_mutation_sensitivity() {
    let t = Instant::now();
    for scenario in [
        "mutation_antipode.json",
        "mutation_zero_block.json",
        "mutation_cocycle.json",
        "invalid_datum.json",
    ] {
        let path = scenario_dir().join(scenario);
        let output = Command::new(env!("CARGO_BIN_EXE_hflab"))
            .arg("run")
            .arg(&path)
            .output()
            .expect("binary runs");
        let code = output.status.code().unwrap_or(-1);
        assert_eq!(
            code, 1,
            "{scenario} must exit 1 (got {code}); stdout: {}",
            String::from_utf8_lossy(&output.stdout)
        );
    }
    stamp(11, "mutation_sensitivity", 60_000, t);
}
