use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ufg_core::depth::consistency::{gap_table, reference_pmf};
use ufg_core::poset::{enumerate_posets, ItemUniverse, Poset, PosetSet, DEFAULT_ENUM_LIMIT};
use ufg_core::ufg::{
    enumerate_ufg_family_exhaustive, enumerate_ufg_family_with, is_ufg, is_ufg_oracle,
    FamilyOptions, PosetSample, UfgFamily,
};

use crate::output::{Failure, EXIT_SELFCHECK};
use crate::SelfcheckArgs;

type SuiteResult = Result<String, String>;

struct Case {
    sample: PosetSample,
    family: UfgFamily,
}

fn cases(args: &SelfcheckArgs) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let pools = [
        enumerate_posets(3, DEFAULT_ENUM_LIMIT).unwrap(),
        enumerate_posets(4, DEFAULT_ENUM_LIMIT).unwrap(),
    ];
    let opts = FamilyOptions {
        assume_downward_closed: args.inject_fault,
        ..FamilyOptions::default()
    };
    (0..args.samples)
        .map(|i| {
            let pool = &pools[i % 2];
            let unique = rng.gen_range(2..=6);
            let chosen: Vec<Poset> = pool.choose_multiple(&mut rng, unique).copied().collect();
            let counts: Vec<u64> = chosen.iter().map(|_| rng.gen_range(1..=3)).collect();
            let sample = PosetSample::from_counts(
                ItemUniverse::numbered(3 + i % 2),
                chosen.into_iter().zip(counts),
            )
            .expect("distinct posets on one universe");
            let family = enumerate_ufg_family_with(&sample, opts);
            Case { sample, family }
        })
        .collect()
}

fn oracle_equivalence(cases: &[Case]) -> SuiteResult {
    let mut subsets = 0;
    for case in cases {
        let unique = case.sample.unique();
        for mask in 1u32..(1 << unique.len()) {
            let set = PosetSet::new(
                (0..unique.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| unique[i]),
            )
            .expect("distinct posets");
            let oracle = is_ufg_oracle(&set, DEFAULT_ENUM_LIMIT).map_err(|e| e.to_string())?;
            if is_ufg(&set) != oracle {
                return Err(format!("membership differs on {:?}", set.members()));
            }
            subsets += 1;
        }
        let exhaustive =
            enumerate_ufg_family_exhaustive(&case.sample).map_err(|e| e.to_string())?;
        let mut got: Vec<Vec<usize>> = case
            .family
            .sets
            .iter()
            .map(|s| s.member_ids.clone())
            .collect();
        got.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        if got != exhaustive {
            return Err(format!(
                "family has {} sets, exhaustive search {}",
                got.len(),
                exhaustive.len()
            ));
        }
    }
    Ok(format!("{subsets} subsets, {} families", cases.len()))
}

fn bounds(cases: &[Case]) -> SuiteResult {
    for case in cases {
        let m = case.sample.m();
        let bound = case
            .family
            .vc_obs
            .unwrap_or(usize::MAX)
            .min(m * (m - 1) / 2);
        if let Some(s) = case
            .family
            .sets
            .iter()
            .find(|s| s.member_ids.len() < 2 || s.member_ids.len() > bound)
        {
            return Err(format!("set {:?} outside [2, {bound}]", s.member_ids));
        }
    }
    for m in [3, 4] {
        let singles = (0..m).flat_map(|i| (i + 1..m).map(move |j| Poset::from_edges(m, [(i, j)])));
        if !is_ufg(&PosetSet::new(singles).expect("distinct")) {
            return Err(format!("single-edge posets on {m} items rejected"));
        }
    }
    Ok("sizes within bounds; bound attained at m = 3, 4".into())
}

fn connectedness(cases: &[Case]) -> SuiteResult {
    let mut checked = 0;
    for case in cases {
        let ids: Vec<&Vec<usize>> = case.family.sets.iter().map(|s| &s.member_ids).collect();
        for set in ids.iter().filter(|s| s.len() >= 3) {
            let has_sub = (0..set.len()).any(|i| {
                let mut sub = (*set).clone();
                sub.remove(i);
                ids.contains(&&sub)
            });
            if !has_sub {
                return Err(format!("set {set:?} has no member one smaller"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} sets of size >= 3"))
}

fn consistency(seed: u64) -> SuiteResult {
    let rows = gap_table(&reference_pmf(), &[50, 200, 800], 20, seed).map_err(|e| e.to_string())?;
    let table: Vec<String> = rows
        .iter()
        .map(|r| format!("n={}: {:.4}", r.n, r.median))
        .collect();
    if rows[2].median < rows[0].median {
        Ok(table.join(", "))
    } else {
        Err(format!("median gap did not shrink: {}", table.join(", ")))
    }
}

pub fn run(args: SelfcheckArgs) -> Result<(), Failure> {
    let cases = cases(&args);
    let suites: [(&str, SuiteResult); 4] = [
        ("oracle-equivalence", oracle_equivalence(&cases)),
        ("bounds", bounds(&cases)),
        ("connectedness", connectedness(&cases)),
        ("consistency", consistency(args.seed)),
    ];
    let mut failed = 0;
    for (name, result) in &suites {
        match result {
            Ok(detail) => println!("{name:<20} pass  {detail}"),
            Err(why) => {
                failed += 1;
                println!("{name:<20} FAIL  {why}");
            }
        }
    }
    if failed > 0 {
        return Err(Failure {
            code: EXIT_SELFCHECK,
            message: format!("{failed} of {} suites failed", suites.len()),
        });
    }
    Ok(())
}
