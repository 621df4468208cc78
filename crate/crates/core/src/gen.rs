//! Seeded generation of random definite databases, used by the fuzz command
//! and the cross-engine test campaigns.

use rand::Rng;

use crate::kb::{Database, Interpretation, Rule, RuleId, VarId};

/// Draws a database with `1..=n_max` variables named `p1..` and `0..=k_max`
/// rules. Bodies have up to three atom occurrences, sampled with
/// replacement, so duplicate body atoms occur.
pub fn random_database(rng: &mut impl Rng, n_max: usize, k_max: usize) -> Database {
    assert!(n_max >= 1, "n_max must be >= 1");
    let n = rng.gen_range(1..=n_max);
    let k = rng.gen_range(0..=k_max);
    let names = (1..=n).map(|i| format!("p{i}")).collect();
    let rules = (0..k)
        .map(|id| {
            let body_len = rng.gen_range(0..=3usize.min(n));
            Rule {
                id: RuleId(id),
                body: (0..body_len).map(|_| VarId(rng.gen_range(0..n))).collect(),
                head: VarId(rng.gen_range(0..n)),
            }
        })
        .collect();
    Database::new(names, rules).expect("generated databases are well-formed")
}

pub fn random_interpretation(rng: &mut impl Rng, n: usize) -> Interpretation {
    Interpretation::from_bools((0..n).map(|_| rng.gen()).collect())
}
