//! Fixtures and independent oracles shared by the integration suites.

#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use snpneg_core::kb::{enumerate_interpretations, Database, Interpretation, Rule, RuleId, VarId};
use snpneg_core::semantics::is_model;
use snpneg_core::text::parse_kb;

pub const EXAMPLE1_SRC: &str = "\
vars p1, p2, p3, p4, p5, p6, p7, p8, p9.
-> p1.
p1 -> p2.
p1 & p2 -> p3.
p3 & p6 -> p4.
p4 -> p5.
p7 -> p6.
p6 -> p5.
p8 -> p9.
p7 -> p2.
p9 -> p8.
";

pub const THREE_VAR_SRC: &str = "\
vars p1, p2, p3.
p1 -> p2.
p1 & p2 -> p3.
";

pub fn example1() -> Database {
    parse_kb(EXAMPLE1_SRC).expect("fixture parses")
}

pub fn three_var_db() -> Database {
    parse_kb(THREE_VAR_SRC).expect("fixture parses")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// 1-based variable indices of a set, for readable assertions.
pub fn indices(set: &std::collections::BTreeSet<VarId>) -> Vec<usize> {
    set.iter().map(|v| v.0 + 1).collect()
}

/// Every database over `n` variables whose rules are drawn from the
/// duplicate-free candidates (any head, any subset body), up to `max_rules`
/// rules. Exhaustive for small `n`; candidate count is `n * 2^n`.
pub fn exhaustive_databases(n: usize, max_rules: usize) -> Vec<Database> {
    let mut candidates: Vec<(Vec<usize>, usize)> = Vec::new();
    for head in 0..n {
        for body_mask in 0..(1usize << n) {
            let body: Vec<usize> = (0..n).filter(|j| body_mask & (1 << j) != 0).collect();
            candidates.push((body, head));
        }
    }
    let mut out = Vec::new();
    let mut picks: Vec<usize> = Vec::new();
    subsets_up_to(&candidates, 0, max_rules, &mut picks, &mut out, n);
    out
}

fn subsets_up_to(
    candidates: &[(Vec<usize>, usize)],
    from: usize,
    left: usize,
    picks: &mut Vec<usize>,
    out: &mut Vec<Database>,
    n: usize,
) {
    out.push(build_db(candidates, picks, n));
    if left == 0 {
        return;
    }
    for next in from..candidates.len() {
        picks.push(next);
        subsets_up_to(candidates, next + 1, left - 1, picks, out, n);
        picks.pop();
    }
}

fn build_db(candidates: &[(Vec<usize>, usize)], picks: &[usize], n: usize) -> Database {
    let names = (1..=n).map(|i| format!("p{i}")).collect();
    let rules = picks
        .iter()
        .enumerate()
        .map(|(id, &c)| {
            let (body, head) = &candidates[c];
            Rule {
                id: RuleId(id),
                body: body.iter().map(|&j| VarId(j)).collect(),
                head: VarId(*head),
            }
        })
        .collect();
    Database::new(names, rules).expect("enumerated databases are well-formed")
}

/// Least model by exhaustive enumeration: the intersection of all models.
pub fn least_model_by_enumeration(db: &Database) -> Interpretation {
    let mut acc = Interpretation::top(db.n());
    for i in enumerate_interpretations(db.n()) {
        if is_model(db, &i).expect("lengths match") {
            acc = acc.intersect(&i).expect("lengths match");
        }
    }
    acc
}
