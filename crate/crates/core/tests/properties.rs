use std::collections::BTreeSet;

use plandiv_core::domain::{
    AirplaneId, BlockId, Blocksworld, BlocksworldAction, BlocksworldState, Location, Logistics, LogisticsAction,
    LogisticsState, LogisticsTopology, PackageId, PackagePosition, PlanningDomain, TruckId,
};
use plandiv_core::generate::random_complete_blocksworld_state;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_blocksworld_actions(n: usize) -> Vec<BlocksworldAction> {
    let ids: Vec<BlockId> = (0..n).map(|i| BlockId::new(i).unwrap()).collect();
    let mut out = Vec::new();
    for &a in &ids {
        out.push(BlocksworldAction::PickUp { block: a });
        out.push(BlocksworldAction::PutDown { block: a });
        for &b in &ids {
            out.push(BlocksworldAction::Stack { block: a, target: b });
            out.push(BlocksworldAction::Unstack { block: a, from: b });
        }
    }
    out
}

fn blocksworld_inverse(a: BlocksworldAction) -> BlocksworldAction {
    match a {
        BlocksworldAction::PickUp { block } => BlocksworldAction::PutDown { block },
        BlocksworldAction::PutDown { block } => BlocksworldAction::PickUp { block },
        BlocksworldAction::Stack { block, target } => BlocksworldAction::Unstack { block, from: target },
        BlocksworldAction::Unstack { block, from } => BlocksworldAction::Stack { block, target: from },
    }
}

fn random_walk_blocksworld(n: usize, steps: usize, seed: u64) -> BlocksworldState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = random_complete_blocksworld_state(n, &mut rng);
    for _ in 0..steps {
        let acts = Blocksworld::applicable(&s);
        s = Blocksworld::apply(&s, &acts[rng.gen_range(0..acts.len())]).unwrap();
    }
    s
}

fn all_logistics_actions(s: &LogisticsState) -> Vec<LogisticsAction> {
    let topo = *s.topology();
    let locs: Vec<Location> = topo.locations().collect();
    let mut out = Vec::new();
    for p in (0..s.n_packages() as u8).map(PackageId) {
        for &at in &locs {
            for t in s.trucks() {
                out.push(LogisticsAction::LoadTruck { package: p, truck: t, at });
                out.push(LogisticsAction::UnloadTruck { package: p, truck: t, at });
            }
            for a in s.airplanes() {
                out.push(LogisticsAction::LoadAirplane { package: p, airplane: a, at });
                out.push(LogisticsAction::UnloadAirplane { package: p, airplane: a, at });
            }
        }
    }
    for &from in &locs {
        for &to in &locs {
            for t in s.trucks() {
                for city in 0..topo.n_cities {
                    out.push(LogisticsAction::DriveTruck { truck: t, from, to, city });
                }
            }
            for a in s.airplanes() {
                out.push(LogisticsAction::FlyAirplane { airplane: a, from, to });
            }
        }
    }
    out
}

fn random_walk_logistics(seed: u64, steps: usize) -> LogisticsState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topo = LogisticsTopology::new(rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(0..=2)).unwrap();
    let n_packages = rng.gen_range(0..=3);
    let packages = (0..n_packages)
        .map(|_| {
            PackagePosition::At(Location::new(
                rng.gen_range(0..topo.n_cities),
                rng.gen_range(0..topo.locations_per_city),
            ))
        })
        .collect();
    let trucks = (0..topo.n_cities).map(|_| rng.gen_range(0..topo.locations_per_city)).collect();
    let planes = (0..topo.n_airplanes).map(|_| rng.gen_range(0..topo.n_cities)).collect();
    let mut s = LogisticsState::new(topo, packages, trucks, planes).unwrap();
    for _ in 0..steps {
        let acts = Logistics::applicable(&s);
        if acts.is_empty() {
            break;
        }
        s = Logistics::apply(&s, &acts[rng.gen_range(0..acts.len())]).unwrap();
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn blocksworld_applicable_matches_apply(n in 1usize..=6, steps in 0usize..20, seed: u64) {
        let s = random_walk_blocksworld(n, steps, seed);
        let applicable: BTreeSet<_> = Blocksworld::applicable(&s).into_iter().collect();
        for a in all_blocksworld_actions(n) {
            let result = Blocksworld::apply(&s, &a);
            prop_assert_eq!(result.is_ok(), applicable.contains(&a), "{}", a);
            if let Ok(next) = result {
                prop_assert!(BlocksworldState::new(next.supports().to_vec()).is_ok());
                prop_assert_eq!(Blocksworld::apply(&next, &blocksworld_inverse(a)).unwrap(), s.clone());
            }
        }
    }

    #[test]
    fn logistics_applicable_matches_apply(seed: u64, steps in 0usize..20) {
        let s = random_walk_logistics(seed, steps);
        let applicable: BTreeSet<_> = Logistics::applicable(&s).into_iter().collect();
        for a in all_logistics_actions(&s) {
            let result = Logistics::apply(&s, &a);
            prop_assert_eq!(result.is_ok(), applicable.contains(&a), "{}", a);
            if let Ok(next) = result {
                let rebuilt = LogisticsState::new(
                    *next.topology(),
                    next.packages().to_vec(),
                    next.trucks().map(|t| next.truck_at(t).index).collect(),
                    next.airplanes().map(|p| next.airplane_at(p).city).collect(),
                );
                prop_assert_eq!(rebuilt.unwrap(), next);
            }
        }
    }

    #[test]
    fn logistics_package_positions_stay_valid(seed: u64, steps in 0usize..30) {
        let s = random_walk_logistics(seed, steps);
        for p in s.packages() {
            match *p {
                PackagePosition::InTruck(TruckId(t)) => prop_assert!(t < s.topology().n_cities),
                PackagePosition::InAirplane(AirplaneId(a)) => prop_assert!(a < s.topology().n_airplanes),
                PackagePosition::At(l) => prop_assert!(s.topology().contains(l)),
            }
        }
    }
}
