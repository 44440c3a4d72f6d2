use std::collections::{BTreeMap, BTreeSet};

use plandiv_core::domain::BlockId;
use plandiv_core::generate::{
    count_blocksworld_states, enumerate_blocksworld_states, random_complete_blocksworld_state,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Hand-empty arrangements as sets of bottom-to-top towers, by brute force
/// over every support function.
fn brute_force_states(n: usize) -> BTreeSet<BTreeSet<Vec<usize>>> {
    let mut out = BTreeSet::new();
    // support[i] = n means table, otherwise the block below i.
    let total = (n + 1).pow(n as u32);
    'outer: for code in 0..total {
        let mut c = code;
        let support: Vec<usize> = (0..n)
            .map(|_| {
                let d = c % (n + 1);
                c /= n + 1;
                d
            })
            .collect();
        for i in 0..n {
            if support[i] == i {
                continue 'outer;
            }
            for j in 0..i {
                if support[i] < n && support[i] == support[j] {
                    continue 'outer;
                }
            }
        }
        let mut towers = BTreeSet::new();
        for bottom in (0..n).filter(|&i| support[i] == n) {
            let mut tower = vec![bottom];
            while let Some(next) = (0..n).find(|&j| support[j] == *tower.last().unwrap()) {
                tower.push(next);
            }
            towers.insert(tower);
        }
        if towers.iter().map(Vec::len).sum::<usize>() == n {
            out.insert(towers);
        }
    }
    out
}

fn towers_of(s: &plandiv_core::domain::BlocksworldState) -> BTreeSet<Vec<usize>> {
    let n = s.n_blocks();
    let below: BTreeMap<usize, usize> = s.on_pairs().into_iter().map(|(a, b)| (b.index(), a.index())).collect();
    (0..n)
        .filter(|&i| s.on_table(BlockId::new(i).unwrap()))
        .map(|bottom| {
            let mut t = vec![bottom];
            while let Some(&up) = below.get(t.last().unwrap()) {
                t.push(up);
            }
            t
        })
        .collect()
}

#[test]
fn enumeration_matches_brute_force() {
    for n in 1..=5 {
        let brute = brute_force_states(n);
        let ours: BTreeSet<_> = enumerate_blocksworld_states(n).iter().map(towers_of).collect();
        assert_eq!(ours, brute, "n = {n}");
        assert_eq!(count_blocksworld_states(n), brute.len() as u128);
    }
}

#[test]
fn sampler_is_uniform() {
    for n in 2..=4 {
        let states = brute_force_states(n);
        let index: BTreeMap<_, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let per_cell = 400;
        let draws = per_cell * states.len();
        let mut counts = vec![0usize; states.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for _ in 0..draws {
            counts[index[&towers_of(&random_complete_blocksworld_state(n, &mut rng))]] += 1;
        }
        let expected = per_cell as f64;
        let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        let p = 1.0 - ChiSquared::new((states.len() - 1) as f64).unwrap().cdf(stat);
        assert!(p > 1e-3, "n = {n}: chi2 = {stat}, p = {p}");
    }
}
