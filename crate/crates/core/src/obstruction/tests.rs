use super::*;
use crate::joins::{conditional_glue, JoinProblem};
use crate::rational::{frac, int};
use crate::testutil::{anti, discrete_schema, list, random_table, tab};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn complex(gens: Vec<DataTable>) -> DataComplexGen {
    DataComplexGen::new(discrete_schema(2), gens).unwrap()
}

fn triangle() -> (DataComplexGen, DataSection) {
    let gens = vec![anti("xy"), anti("xz"), anti("yz")];
    let sigma = DataSection::from_tables(1, gens.clone()).unwrap();
    (complex(gens), sigma)
}

/// X-marginals disagree between the xy and xz tables.
fn conflicting() -> (DataComplexGen, DataSection) {
    let xz = tab("xz", &[(&[0, 0], frac(1, 2)), (&[0, 1], frac(1, 2))]);
    let gens = vec![anti("xy"), xz, anti("yz")];
    let sigma = DataSection::from_tables(1, gens.clone()).unwrap();
    (complex(gens), sigma)
}

#[test]
fn membership_of_generators_and_glues() {
    let solver = Solver::default();
    let a = tab("ab", &[(&[0, 1], frac(1, 3)), (&[1, 1], frac(2, 3))]);
    let b = tab("bc", &[(&[1, 0], frac(1, 2)), (&[1, 1], frac(1, 2))]);
    let c = complex(vec![a.clone(), b.clone()]);
    assert!(in_filtration(&solver, &c, &a, &int(0)).unwrap().member);
    let g = conditional_glue(&JoinProblem::from_maps(a, b, vec![1], vec![0]).unwrap()).unwrap();
    let m = in_filtration(&solver, &c, &g, &int(0)).unwrap();
    assert!(m.member);
    assert_eq!(m.witnesses.len(), 3);
}

#[test]
fn membership_of_perturbation() {
    let solver = Solver::default();
    let c = complex(vec![tab("a", &[(&[0], frac(1, 2)), (&[1], frac(1, 2))])]);
    let moved = tab("a", &[(&[0], frac(6, 10)), (&[1], frac(4, 10))]);
    assert!(!in_filtration(&solver, &c, &moved, &frac(1, 11)).unwrap().member);
    assert!(in_filtration(&solver, &c, &moved, &frac(1, 10)).unwrap().member);
    assert!(in_filtration(&solver, &c, &moved, &int(1)).unwrap().member);
    let heavier = tab("a", &[(&[0], int(1)), (&[1], int(1))]);
    assert!(!in_filtration(&solver, &c, &heavier, &int(5)).unwrap().member);
}

#[test]
fn default_cells_follow_the_domain() {
    let (_, sigma) = triangle();
    assert_eq!(default_cells(&sigma).unwrap(), vec![list("xyz")]);
}

#[test]
fn triangle_cocycle() {
    let solver = Solver::default();
    let (c, sigma) = triangle();
    let cells = default_cells(&sigma).unwrap();
    let r = evaluate_cocycle(&solver, &c, &sigma, &cells, &int(0)).unwrap();
    assert_eq!(r.nontrivial_cells(), cells);
    assert!(r.conflicts.is_empty());
    let r = evaluate_cocycle(&solver, &c, &sigma, &cells, &frac(1, 3)).unwrap();
    assert!(r.all_trivial());

    let v = classify_trichotomy(&solver, &c, &sigma, &cells, &int(0)).unwrap();
    assert_eq!(v.case, 2);
    let repaired = v.repair.unwrap().section.unwrap();
    let uniform = tab("xy", &[(&[0, 0], frac(1, 4)), (&[0, 1], frac(1, 4)), (&[1, 0], frac(1, 4)), (&[1, 1], frac(1, 4))]);
    // the repair keeps single-attribute marginals
    assert_eq!(repaired.cells[&list("xy")].marginalize(1).unwrap(), uniform.marginalize(1).unwrap());
    let recheck = evaluate_cocycle(&solver, &c, &repaired, &cells, &int(0));
    // repaired values need not be tables of the complex itself
    assert!(recheck.is_err() || recheck.unwrap().all_trivial());

    let p = persistence(&solver, &c, &sigma, &cells).unwrap();
    assert_eq!(p.t_n, Some(frac(1, 3)));
    assert_eq!(p.t_prime_n, Some(int(0)));
    assert_eq!(p.case_at_0, 2);
}

#[test]
fn triviality_is_monotone_in_slack() {
    let solver = Solver::default();
    let (c, sigma) = triangle();
    let cells = default_cells(&sigma).unwrap();
    let mut was = false;
    for k in 0..=8 {
        let now = evaluate_cocycle(&solver, &c, &sigma, &cells, &frac(k, 12)).unwrap().all_trivial();
        assert!(!was || now);
        assert_eq!(now, k >= 4);
        was = now;
    }
}

#[test]
fn joint_section_is_case_one() {
    let solver = Solver::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let joint = random_table(&mut rng, "xyz", 2);
    let c = complex(vec![joint.clone()]);
    let sigma = DataSection::from_tables(1, (0..3).map(|j| joint.marginalize(j).unwrap())).unwrap();
    let cells = default_cells(&sigma).unwrap();
    let v = classify_trichotomy(&solver, &c, &sigma, &cells, &int(0)).unwrap();
    assert_eq!(v.case, 1);
    let cb = is_coboundary(&solver, &c, &sigma, &cells, &int(0)).unwrap();
    assert!(cb.coboundary);
    assert_eq!(cb.section.as_ref(), Some(&sigma));
    let p = persistence(&solver, &c, &sigma, &cells).unwrap();
    assert_eq!((p.t_n, p.t_prime_n, p.case_at_0), (Some(int(0)), Some(int(0)), 1));
}

#[test]
fn conflicting_marginals_are_case_three() {
    let solver = Solver::default();
    let (c, sigma) = conflicting();
    let cells = default_cells(&sigma).unwrap();
    assert_eq!(sigma.face_conflicts().unwrap().len(), 1);
    let v = classify_trichotomy(&solver, &c, &sigma, &cells, &int(0)).unwrap();
    assert_eq!(v.case, 3);
    assert!(!v.repair.unwrap().coboundary);
    let p = persistence(&solver, &c, &sigma, &cells).unwrap();
    assert_eq!(p.t_prime_n, Some(frac(1, 4)));
    // total variation of the x-marginals bounds both levels below by 1/4
    assert_eq!(p.t_n, Some(frac(1, 4)));
    assert_eq!(classify_trichotomy(&solver, &c, &sigma, &cells, &frac(1, 5)).unwrap().case, 3);
    assert_eq!(classify_trichotomy(&solver, &c, &sigma, &cells, &frac(1, 4)).unwrap().case, 1);
}

#[test]
fn coboundary_of_a_cocycle_vanishes() {
    let solver = Solver::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let joint = random_table(&mut rng, "abcd", 2);
    let c = complex(vec![joint.clone()]);
    let pairs = ["ab", "ac", "ad", "bc", "bd", "cd"].map(|p| {
        let keep: Vec<usize> = p.chars().map(|ch| "abcd".find(ch).unwrap()).collect();
        joint.project(&keep, list(p))
    });
    let sigma = DataSection::from_tables(1, pairs).unwrap();
    let cells = default_cells(&sigma).unwrap();
    assert_eq!(cells.len(), 4);
    let r = evaluate_cocycle(&solver, &c, &sigma, &cells, &int(0)).unwrap();
    assert!(!coboundary_value(&r, &list("abcd")).unwrap());
    let mut flipped = r.clone();
    flipped.values[0].trivial = false;
    assert!(coboundary_value(&flipped, &list("abcd")).unwrap());
    assert!(matches!(coboundary_value(&r, &list("abce")), Err(Error::MissingFace(_))));
}

#[test]
fn input_errors() {
    let solver = Solver::default();
    let c = complex(vec![tab("a", &[(&[0], int(1))]), tab("b", &[(&[0], int(1))])]);
    let sigma = DataSection::from_tables(0, vec![tab("a", &[(&[0], int(1))])]).unwrap();
    assert!(matches!(
        evaluate_cocycle(&solver, &c, &sigma, &[list("ab")], &int(0)),
        Err(Error::NotPathConnected(_))
    ));
    let (c, _) = triangle();
    let outside = DataSection::from_tables(1, vec![tab("xy", &[(&[0, 0], int(1))])]).unwrap();
    assert!(matches!(evaluate_cocycle(&solver, &c, &outside, &[], &int(0)), Err(Error::NotNatural(_))));
    let (_, sigma) = triangle();
    assert!(matches!(evaluate_cocycle(&solver, &c, &sigma, &[list("xya")], &int(0)), Err(Error::MissingFace(_))));
    assert!(DataSection::new(1, BTreeMap::from([(list("xz"), anti("xy"))])).is_err());
}
