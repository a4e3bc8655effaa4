use dip::genome::Component::{self, Controller as C, Memory as M, Visual as V};
use dip::moea::{ProtectionKind, ProtectionPolicy};
use dip::verify::{check_age_bookkeeping, oracle, simulate_lineage};

#[test]
fn exhaustive_sequences_up_to_six() {
    let c = check_age_bookkeeping(6).unwrap();
    assert!(c.passed, "{c}");
}

fn ages(kind: ProtectionKind, events: &[Component]) -> Vec<u32> {
    simulate_lineage(&ProtectionPolicy::new(kind), events, 0).0
}

#[test]
fn hand_traces() {
    let seq = [C, C, V, C, M, C];
    assert_eq!(ages(ProtectionKind::Dip, &seq), vec![0, 1, 2, 0, 1, 0, 1]);
    assert_eq!(
        ages(ProtectionKind::ControllerProtect, &seq),
        vec![0, 0, 0, 1, 0, 1, 0]
    );
    assert_eq!(
        ages(ProtectionKind::MemoryAndControllerProtect, &seq),
        vec![0, 0, 0, 1, 0, 0, 0]
    );
    assert_eq!(ages(ProtectionKind::None, &seq), vec![0, 1, 2, 3, 4, 5, 6]);
}

#[test]
fn random_age_stays_in_range() {
    let policy = ProtectionPolicy::new(ProtectionKind::RandomAge);
    let events = [V, M, C, C, V, M];
    for seed in 0..50 {
        let (a, draws) = simulate_lineage(&policy, &events, seed);
        assert!(a.iter().all(|&x| x <= 20));
        assert_eq!(
            a,
            oracle::lineage_ages(ProtectionKind::RandomAge, &events, &draws)
        );
    }
}
