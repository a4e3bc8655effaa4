use serde::{Deserialize, Serialize};

use super::pareto::ObjectiveSet;
use super::population::Individual;
use crate::genome::{Component, MutationEvent};
use crate::rng::RandomSource;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtectionKind {
    /// Reset age when the visual or memory component mutates.
    Dip,
    /// Reset age when the controller mutates.
    ControllerProtect,
    /// Reset age when the memory or controller mutates.
    MemoryAndControllerProtect,
    /// Age re-drawn uniformly at every evaluation.
    RandomAge,
    /// Reward-only GA; age tracked but excluded from dominance.
    None,
}

impl ProtectionKind {
    pub const ALL: [ProtectionKind; 5] = [
        ProtectionKind::Dip,
        ProtectionKind::ControllerProtect,
        ProtectionKind::MemoryAndControllerProtect,
        ProtectionKind::RandomAge,
        ProtectionKind::None,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtectionKind::Dip => "dip",
            ProtectionKind::ControllerProtect => "controller-protect",
            ProtectionKind::MemoryAndControllerProtect => "memory-and-controller-protect",
            ProtectionKind::RandomAge => "random-age",
            ProtectionKind::None => "none",
        }
    }
}

fn default_random_age_range() -> [u32; 2] {
    [0, 20]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtectionPolicy {
    pub kind: ProtectionKind,
    /// Inclusive bounds for the random-age treatment.
    #[serde(default = "default_random_age_range")]
    pub random_age_range: [u32; 2],
}

impl ProtectionPolicy {
    pub fn new(kind: ProtectionKind) -> Self {
        Self {
            kind,
            random_age_range: default_random_age_range(),
        }
    }

    pub fn objectives(&self) -> ObjectiveSet {
        match self.kind {
            ProtectionKind::None => ObjectiveSet::RewardOnly,
            _ => ObjectiveSet::AgeAndReward,
        }
    }

    /// Whether mutating `component` resets the age under this policy.
    pub fn resets_on(&self, component: Component) -> bool {
        match self.kind {
            ProtectionKind::Dip => matches!(component, Component::Visual | Component::Memory),
            ProtectionKind::ControllerProtect => component == Component::Controller,
            ProtectionKind::MemoryAndControllerProtect => {
                matches!(component, Component::Memory | Component::Controller)
            }
            ProtectionKind::RandomAge | ProtectionKind::None => false,
        }
    }

    pub fn random_age(&self, rng: &mut RandomSource) -> u32 {
        let [lo, hi] = self.random_age_range;
        rng.int_inclusive(lo, hi)
    }

    /// Per-generation age update: `+1`, or a fresh draw under random-age.
    pub fn advance_age(&self, age: u32, rng: &mut RandomSource) -> u32 {
        match self.kind {
            ProtectionKind::RandomAge => self.random_age(rng),
            _ => age.saturating_add(1),
        }
    }
}

impl Default for ProtectionPolicy {
    fn default() -> Self {
        Self::new(ProtectionKind::Dip)
    }
}

/// Sets a freshly mutated child's age from its birth event. The child's
/// `age` must hold the parent's (already advanced) age on entry.
pub fn apply_protection<T>(
    event: &MutationEvent,
    mut child: Individual<T>,
    policy: &ProtectionPolicy,
    rng: &mut RandomSource,
) -> Individual<T> {
    child.birth = Some(event.component);
    if policy.kind == ProtectionKind::RandomAge {
        child.age = policy.random_age(rng);
    } else if policy.resets_on(event.component) {
        child.age = 0;
    }
    child
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::{ArchitectureConfig, Genome};

    fn child(age: u32) -> Individual<f64> {
        let mut c = Individual::new(
            1,
            Genome::zeros(&ArchitectureConfig::desk_scale(1)).unwrap(),
        );
        c.age = age;
        c
    }

    fn ev(component: Component) -> MutationEvent {
        MutationEvent {
            component,
            sigma: 0.03,
        }
    }

    #[test]
    fn dip_resets_upstream_only() {
        let p = ProtectionPolicy::new(ProtectionKind::Dip);
        let mut rng = RandomSource::new(0, 0);
        assert_eq!(
            apply_protection(&ev(Component::Visual), child(7), &p, &mut rng).age,
            0
        );
        assert_eq!(
            apply_protection(&ev(Component::Memory), child(7), &p, &mut rng).age,
            0
        );
        assert_eq!(
            apply_protection(&ev(Component::Controller), child(7), &p, &mut rng).age,
            7
        );
    }

    #[test]
    fn reset_tables() {
        use Component::*;
        let table = [
            (ProtectionKind::Dip, [true, true, false]),
            (ProtectionKind::ControllerProtect, [false, false, true]),
            (
                ProtectionKind::MemoryAndControllerProtect,
                [false, true, true],
            ),
            (ProtectionKind::RandomAge, [false, false, false]),
            (ProtectionKind::None, [false, false, false]),
        ];
        for (kind, resets) in table {
            let p = ProtectionPolicy::new(kind);
            for (c, r) in [Visual, Memory, Controller].into_iter().zip(resets) {
                assert_eq!(p.resets_on(c), r, "{kind:?} {c}");
            }
        }
    }

    #[test]
    fn random_age_uniform_chi_square() {
        let p = ProtectionPolicy::new(ProtectionKind::RandomAge);
        let mut rng = RandomSource::new(17, 4);
        let n = 10_000;
        let mut counts = [0f64; 21];
        for _ in 0..n {
            let c = apply_protection(&ev(Component::Controller), child(3), &p, &mut rng);
            counts[c.age as usize] += 1.0;
        }
        let expected = n as f64 / 21.0;
        let chi2: f64 = counts
            .iter()
            .map(|o| (o - expected).powi(2) / expected)
            .sum();
        // chi-square critical value, 20 dof, 1% level
        assert!(chi2 < 37.566, "chi2 = {chi2}");
    }

    #[test]
    fn policy_toml_round_trip() {
        let p: ProtectionPolicy =
            toml::from_str("kind = \"memory-and-controller-protect\"").unwrap();
        assert_eq!(p.kind, ProtectionKind::MemoryAndControllerProtect);
        assert_eq!(p.random_age_range, [0, 20]);
    }
}
