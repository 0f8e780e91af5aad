use proptest::prelude::*;
use theta_quartic::chars::{
    complete_4tuple, derived_forms, enumerate_aronhold, enumerate_aronhold_brute, enumerate_aronhold_with, eval_form,
    is_aronhold, is_azygetic_triple, symplectic_form,
};
use theta_quartic::{AronholdSystem, Exec, F2Vector, QuadForm};

fn odd_form() -> impl Strategy<Value = QuadForm> {
    (0usize..28).prop_map(|i| QuadForm::odd()[i])
}

fn any_form() -> impl Strategy<Value = QuadForm> {
    (0u8..64).prop_map(|i| QuadForm::new(F2Vector::from_index(i)))
}

fn any_vector() -> impl Strategy<Value = F2Vector> {
    (0u8..64).prop_map(F2Vector::from_index)
}

#[test]
fn orbit_sizes() {
    assert_eq!(QuadForm::even().len(), 36);
    assert_eq!(QuadForm::odd().len(), 28);
    assert!(QuadForm::ORIGIN.is_even());
}

#[test]
fn exactly_288_aronhold_systems() {
    let systems = enumerate_aronhold();
    assert_eq!(systems.len(), 288);
    let mut sorted: Vec<_> = systems.iter().map(|s| s.sorted()).collect();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), 288);
    assert!(systems.iter().all(|s| is_aronhold(s.forms())));
}

#[test]
fn backtracking_matches_brute_force() {
    let fast: Vec<_> = enumerate_aronhold_with(Exec::Sequential).iter().map(|s| s.sorted()).collect();
    let brute: Vec<_> = enumerate_aronhold_brute(Exec::Parallel).iter().map(|s| s.sorted()).collect();
    assert_eq!(fast, brute);
    assert_eq!(enumerate_aronhold_with(Exec::Parallel), enumerate_aronhold_with(Exec::Sequential));
}

#[test]
fn reference_systems_are_listed() {
    let all = enumerate_aronhold();
    for sys in [AronholdSystem::reference(), AronholdSystem::summing_to_origin()] {
        assert!(all.iter().any(|s| s.sorted() == sys.sorted()));
    }
    assert_eq!(AronholdSystem::summing_to_origin().sum(), QuadForm::ORIGIN);
}

#[test]
fn every_system_has_a_complete_derived_set() {
    for sys in enumerate_aronhold().iter().step_by(17) {
        let d = derived_forms(sys).unwrap();
        let mut odd: Vec<QuadForm> = sys.forms().to_vec();
        odd.extend(d.pairs.iter().map(|(_, q)| *q));
        odd.sort();
        assert_eq!(odd, QuadForm::odd());
        assert_eq!(d.triples.len(), 35);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn forms_are_quadratic_refinements(q in any_form(), v in any_vector(), w in any_vector()) {
        let lhs = eval_form(q, v + w);
        let rhs = (eval_form(q, v) + eval_form(q, w) + symplectic_form(v, w)) % 2;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn arf_counts_zeros(q in any_form()) {
        let zeros = F2Vector::all().filter(|&v| eval_form(q, v) == 0).count();
        prop_assert_eq!(zeros, if q.is_even() { 36 } else { 28 });
    }

    #[test]
    fn azygy_is_symmetric(a in odd_form(), b in odd_form(), c in odd_form()) {
        prop_assume!(a != b && b != c && a != c);
        let x = is_azygetic_triple(a, b, c).unwrap();
        prop_assert_eq!(x, is_azygetic_triple(b, c, a).unwrap());
        prop_assert_eq!(x, is_azygetic_triple(c, b, a).unwrap());
    }

    #[test]
    fn azygetic_tuples_have_two_completions(idx in 0usize..288, pick in 0usize..35) {
        let sys = enumerate_aronhold()[idx];
        // any four members of an Aronhold system are an azygetic 4-tuple
        let quads: Vec<[usize; 4]> = (0..7).flat_map(|a| (a + 1..7).flat_map(move |b| (b + 1..7).flat_map(move |c| (c + 1..7).map(move |d| [a, b, c, d])))).collect();
        let sel = quads[pick % quads.len()];
        let quad = sel.map(|i| sys.forms()[i]);
        let completions = complete_4tuple(quad).unwrap();
        prop_assert_eq!(completions.len(), 2);
        for t in completions {
            let mut seven = quad.to_vec();
            seven.extend(t);
            prop_assert!(is_aronhold(&seven));
        }
    }

    #[test]
    fn reduced_characteristic_round_trip(q in any_form()) {
        let m = q.characteristic();
        prop_assert!(m.is_reduced());
        prop_assert_eq!(m.form(), q);
        prop_assert_eq!(m.is_odd(), q.is_odd());
    }
}
