//! Logistics: packages moved by one truck per city and by airplanes flying
//! between city airports. Location 0 of every city is its airport.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{InvalidTask, PlanningDomain, Violation, ViolationReason};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LogisticsTopology {
    pub n_cities: u8,
    pub locations_per_city: u8,
    pub n_airplanes: u8,
}

impl LogisticsTopology {
    pub fn new(n_cities: u8, locations_per_city: u8, n_airplanes: u8) -> Result<Self, InvalidTask> {
        if n_cities == 0 || locations_per_city == 0 {
            return Err(InvalidTask::new("topology needs at least one city and one location per city"));
        }
        Ok(LogisticsTopology { n_cities, locations_per_city, n_airplanes })
    }

    pub fn contains(&self, loc: Location) -> bool {
        loc.city < self.n_cities && loc.index < self.locations_per_city
    }

    pub fn airport(&self, city: u8) -> Location {
        Location { city, index: 0 }
    }

    /// Every location, city-major.
    pub fn locations(&self) -> impl Iterator<Item = Location> + '_ {
        (0..self.n_cities).flat_map(move |city| (0..self.locations_per_city).map(move |index| Location { city, index }))
    }
}

/// `location_<city>_<index>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Location {
    pub city: u8,
    pub index: u8,
}

impl Location {
    pub fn new(city: u8, index: u8) -> Self {
        Location { city, index }
    }

    pub fn is_airport(self) -> bool {
        self.index == 0
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "location_{}_{}", self.city, self.index)
    }
}

/// Trucks are numbered by the city they serve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TruckId(pub u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AirplaneId(pub u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PackageId(pub u8);

impl fmt::Display for TruckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "truck_{}", self.0)
    }
}

impl fmt::Display for AirplaneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "airplane_{}", self.0)
    }
}

impl fmt::Display for PackageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "package_{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PackagePosition {
    At(Location),
    InTruck(TruckId),
    InAirplane(AirplaneId),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawLogisticsState")]
pub struct LogisticsState {
    topology: LogisticsTopology,
    packages: Vec<PackagePosition>,
    /// Location index (within the truck's own city) per truck.
    trucks: Vec<u8>,
    /// City whose airport each airplane is at.
    airplanes: Vec<u8>,
}

#[derive(Deserialize)]
struct RawLogisticsState {
    topology: LogisticsTopology,
    packages: Vec<PackagePosition>,
    trucks: Vec<u8>,
    airplanes: Vec<u8>,
}

impl TryFrom<RawLogisticsState> for LogisticsState {
    type Error = InvalidTask;

    fn try_from(raw: RawLogisticsState) -> Result<Self, Self::Error> {
        LogisticsState::new(raw.topology, raw.packages, raw.trucks, raw.airplanes)
    }
}

impl LogisticsState {
    pub fn new(
        topology: LogisticsTopology,
        packages: Vec<PackagePosition>,
        trucks: Vec<u8>,
        airplanes: Vec<u8>,
    ) -> Result<Self, InvalidTask> {
        if trucks.len() != topology.n_cities as usize {
            return Err(InvalidTask::new("need exactly one truck per city"));
        }
        if airplanes.len() != topology.n_airplanes as usize {
            return Err(InvalidTask::new("airplane count disagrees with topology"));
        }
        if let Some(t) = trucks.iter().find(|&&l| l >= topology.locations_per_city) {
            return Err(InvalidTask::new(format!("truck location index {t} outside its city")));
        }
        if let Some(c) = airplanes.iter().find(|&&c| c >= topology.n_cities) {
            return Err(InvalidTask::new(format!("airplane at unknown city {c}")));
        }
        for pos in &packages {
            let ok = match *pos {
                PackagePosition::At(loc) => topology.contains(loc),
                PackagePosition::InTruck(t) => t.0 < topology.n_cities,
                PackagePosition::InAirplane(a) => a.0 < topology.n_airplanes,
            };
            if !ok {
                return Err(InvalidTask::new(format!("package position {pos:?} does not exist")));
            }
        }
        Ok(LogisticsState { topology, packages, trucks, airplanes })
    }

    pub fn topology(&self) -> &LogisticsTopology {
        &self.topology
    }

    pub fn n_packages(&self) -> usize {
        self.packages.len()
    }

    pub fn package(&self, p: PackageId) -> PackagePosition {
        self.packages[p.0 as usize]
    }

    pub fn packages(&self) -> &[PackagePosition] {
        &self.packages
    }

    pub fn truck_at(&self, t: TruckId) -> Location {
        Location::new(t.0, self.trucks[t.0 as usize])
    }

    pub fn airplane_at(&self, a: AirplaneId) -> Location {
        self.topology.airport(self.airplanes[a.0 as usize])
    }

    pub fn trucks(&self) -> impl Iterator<Item = TruckId> {
        (0..self.topology.n_cities).map(TruckId)
    }

    pub fn airplanes(&self) -> impl Iterator<Item = AirplaneId> {
        (0..self.topology.n_airplanes).map(AirplaneId)
    }

    fn has_package(&self, p: PackageId) -> bool {
        (p.0 as usize) < self.packages.len()
    }

    fn has_truck(&self, t: TruckId) -> bool {
        t.0 < self.topology.n_cities
    }

    fn has_airplane(&self, a: AirplaneId) -> bool {
        a.0 < self.topology.n_airplanes
    }
}

/// Destinations for packages; vehicles are unconstrained.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(PackageId, Location)>", into = "Vec<(PackageId, Location)>")]
pub struct LogisticsGoal {
    destinations: Vec<(PackageId, Location)>,
}

impl LogisticsGoal {
    pub fn new(destinations: impl IntoIterator<Item = (PackageId, Location)>) -> Result<Self, InvalidTask> {
        let mut destinations: Vec<_> = destinations.into_iter().collect();
        destinations.sort();
        if destinations.is_empty() {
            return Err(InvalidTask::new("goal has no package destinations"));
        }
        if destinations.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(InvalidTask::new("package given two destinations"));
        }
        Ok(LogisticsGoal { destinations })
    }

    pub fn destinations(&self) -> &[(PackageId, Location)] {
        &self.destinations
    }

    /// Checks destinations against a concrete topology and package count.
    pub fn check_against(&self, state: &LogisticsState) -> Result<(), InvalidTask> {
        for &(p, loc) in &self.destinations {
            if !state.has_package(p) {
                return Err(InvalidTask::new(format!("goal mentions unknown {p}")));
            }
            if !state.topology.contains(loc) {
                return Err(InvalidTask::new(format!("goal destination {loc} does not exist")));
            }
        }
        Ok(())
    }
}

impl TryFrom<Vec<(PackageId, Location)>> for LogisticsGoal {
    type Error = InvalidTask;

    fn try_from(d: Vec<(PackageId, Location)>) -> Result<Self, Self::Error> {
        Self::new(d)
    }
}

impl From<LogisticsGoal> for Vec<(PackageId, Location)> {
    fn from(goal: LogisticsGoal) -> Self {
        goal.destinations
    }
}

/// Variant order is the deterministic action-kind order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum LogisticsAction {
    LoadTruck { package: PackageId, truck: TruckId, at: Location },
    LoadAirplane { package: PackageId, airplane: AirplaneId, at: Location },
    UnloadTruck { package: PackageId, truck: TruckId, at: Location },
    UnloadAirplane { package: PackageId, airplane: AirplaneId, at: Location },
    DriveTruck { truck: TruckId, from: Location, to: Location, city: u8 },
    FlyAirplane { airplane: AirplaneId, from: Location, to: Location },
}

impl LogisticsAction {
    pub fn name(&self) -> &'static str {
        match self {
            LogisticsAction::LoadTruck { .. } => "load-truck",
            LogisticsAction::LoadAirplane { .. } => "load-airplane",
            LogisticsAction::UnloadTruck { .. } => "unload-truck",
            LogisticsAction::UnloadAirplane { .. } => "unload-airplane",
            LogisticsAction::DriveTruck { .. } => "drive-truck",
            LogisticsAction::FlyAirplane { .. } => "fly-airplane",
        }
    }
}

impl fmt::Display for LogisticsAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogisticsAction::LoadTruck { package, truck, at } => write!(f, "load-truck({package}, {truck}, {at})"),
            LogisticsAction::LoadAirplane { package, airplane, at } => {
                write!(f, "load-airplane({package}, {airplane}, {at})")
            }
            LogisticsAction::UnloadTruck { package, truck, at } => write!(f, "unload-truck({package}, {truck}, {at})"),
            LogisticsAction::UnloadAirplane { package, airplane, at } => {
                write!(f, "unload-airplane({package}, {airplane}, {at})")
            }
            LogisticsAction::DriveTruck { truck, from, to, city } => {
                write!(f, "drive-truck({truck}, {from}, {to}, city_{city})")
            }
            LogisticsAction::FlyAirplane { airplane, from, to } => write!(f, "fly-airplane({airplane}, {from}, {to})"),
        }
    }
}

pub struct Logistics;

impl PlanningDomain for Logistics {
    type State = LogisticsState;
    type Goal = LogisticsGoal;
    type Action = LogisticsAction;

    fn apply(state: &LogisticsState, action: &LogisticsAction) -> Result<LogisticsState, Violation> {
        use LogisticsAction::*;
        use ViolationReason::*;

        let fail = |reason| Err(Violation::new(action.to_string(), reason));
        let topo = state.topology;
        let mut next = state.clone();
        match *action {
            LoadTruck { package, truck, at } => {
                if !state.has_package(package) || !state.has_truck(truck) || !topo.contains(at) {
                    return fail(UnknownObject);
                }
                if state.truck_at(truck) != at {
                    return fail(VehicleNotAtLocation);
                }
                if state.package(package) != PackagePosition::At(at) {
                    return fail(PackageNotAtLocation);
                }
                next.packages[package.0 as usize] = PackagePosition::InTruck(truck);
            }
            LoadAirplane { package, airplane, at } => {
                if !state.has_package(package) || !state.has_airplane(airplane) || !topo.contains(at) {
                    return fail(UnknownObject);
                }
                if state.airplane_at(airplane) != at {
                    return fail(VehicleNotAtLocation);
                }
                if state.package(package) != PackagePosition::At(at) {
                    return fail(PackageNotAtLocation);
                }
                next.packages[package.0 as usize] = PackagePosition::InAirplane(airplane);
            }
            UnloadTruck { package, truck, at } => {
                if !state.has_package(package) || !state.has_truck(truck) || !topo.contains(at) {
                    return fail(UnknownObject);
                }
                if state.package(package) != PackagePosition::InTruck(truck) {
                    return fail(PackageNotInVehicle);
                }
                if state.truck_at(truck) != at {
                    return fail(VehicleNotAtLocation);
                }
                next.packages[package.0 as usize] = PackagePosition::At(at);
            }
            UnloadAirplane { package, airplane, at } => {
                if !state.has_package(package) || !state.has_airplane(airplane) || !topo.contains(at) {
                    return fail(UnknownObject);
                }
                if state.package(package) != PackagePosition::InAirplane(airplane) {
                    return fail(PackageNotInVehicle);
                }
                if state.airplane_at(airplane) != at {
                    return fail(VehicleNotAtLocation);
                }
                next.packages[package.0 as usize] = PackagePosition::At(at);
            }
            DriveTruck { truck, from, to, city } => {
                if !state.has_truck(truck) || !topo.contains(from) || !topo.contains(to) || city >= topo.n_cities {
                    return fail(UnknownObject);
                }
                if from.city != city || to.city != city || truck.0 != city {
                    return fail(TruckWrongCity);
                }
                if from == to {
                    return fail(SameObject);
                }
                if state.truck_at(truck) != from {
                    return fail(VehicleNotAtLocation);
                }
                next.trucks[truck.0 as usize] = to.index;
            }
            FlyAirplane { airplane, from, to } => {
                if !state.has_airplane(airplane) || !topo.contains(from) || !topo.contains(to) {
                    return fail(UnknownObject);
                }
                if !from.is_airport() || !to.is_airport() {
                    return fail(NotAnAirport);
                }
                if from == to {
                    return fail(SameObject);
                }
                if state.airplane_at(airplane) != from {
                    return fail(VehicleNotAtLocation);
                }
                next.airplanes[airplane.0 as usize] = to.city;
            }
        }
        Ok(next)
    }

    fn applicable(state: &LogisticsState) -> Vec<LogisticsAction> {
        use LogisticsAction::*;

        let topo = state.topology;
        let mut actions = Vec::new();
        let packages = || (0..state.n_packages() as u8).map(PackageId);
        for package in packages() {
            if let PackagePosition::At(at) = state.package(package) {
                for truck in state.trucks().filter(|&t| state.truck_at(t) == at) {
                    actions.push(LoadTruck { package, truck, at });
                }
            }
        }
        for package in packages() {
            if let PackagePosition::At(at) = state.package(package) {
                for airplane in state.airplanes().filter(|&a| state.airplane_at(a) == at) {
                    actions.push(LoadAirplane { package, airplane, at });
                }
            }
        }
        for package in packages() {
            if let PackagePosition::InTruck(truck) = state.package(package) {
                actions.push(UnloadTruck { package, truck, at: state.truck_at(truck) });
            }
        }
        for package in packages() {
            if let PackagePosition::InAirplane(airplane) = state.package(package) {
                actions.push(UnloadAirplane { package, airplane, at: state.airplane_at(airplane) });
            }
        }
        for truck in state.trucks() {
            let from = state.truck_at(truck);
            for index in (0..topo.locations_per_city).filter(|&i| i != from.index) {
                actions.push(DriveTruck { truck, from, to: Location::new(truck.0, index), city: truck.0 });
            }
        }
        for airplane in state.airplanes() {
            let from = state.airplane_at(airplane);
            for city in (0..topo.n_cities).filter(|&c| c != from.city) {
                actions.push(FlyAirplane { airplane, from, to: topo.airport(city) });
            }
        }
        actions
    }

    fn satisfies(state: &LogisticsState, goal: &LogisticsGoal) -> bool {
        goal.destinations().iter().all(|&(p, loc)| state.has_package(p) && state.package(p) == PackagePosition::At(loc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The two-city, one-package example task.
    fn example_init() -> LogisticsState {
        let topo = LogisticsTopology::new(2, 2, 1).unwrap();
        LogisticsState::new(topo, vec![PackagePosition::At(Location::new(1, 1))], vec![1, 0], vec![0]).unwrap()
    }

    #[test]
    fn drive_within_city_only() {
        let s = example_init();
        let ok = LogisticsAction::DriveTruck {
            truck: TruckId(1),
            from: Location::new(1, 0),
            to: Location::new(1, 1),
            city: 1,
        };
        let next = Logistics::apply(&s, &ok).unwrap();
        assert_eq!(next.truck_at(TruckId(1)), Location::new(1, 1));

        let bad = LogisticsAction::DriveTruck {
            truck: TruckId(1),
            from: Location::new(1, 0),
            to: Location::new(0, 1),
            city: 1,
        };
        assert_eq!(Logistics::apply(&s, &bad).unwrap_err().reason, ViolationReason::TruckWrongCity);
    }

    #[test]
    fn fly_requires_airports() {
        let s = example_init();
        let bad = LogisticsAction::FlyAirplane {
            airplane: AirplaneId(0),
            from: Location::new(0, 0),
            to: Location::new(1, 1),
        };
        assert_eq!(Logistics::apply(&s, &bad).unwrap_err().reason, ViolationReason::NotAnAirport);
    }

    #[test]
    fn load_and_unload_follow_vehicle() {
        let s = example_init();
        let load = LogisticsAction::LoadTruck { package: PackageId(0), truck: TruckId(1), at: Location::new(1, 1) };
        assert_eq!(Logistics::apply(&s, &load).unwrap_err().reason, ViolationReason::VehicleNotAtLocation);
        let s = Logistics::apply(
            &s,
            &LogisticsAction::DriveTruck {
                truck: TruckId(1),
                from: Location::new(1, 0),
                to: Location::new(1, 1),
                city: 1,
            },
        )
        .unwrap();
        let s = Logistics::apply(&s, &load).unwrap();
        assert_eq!(s.package(PackageId(0)), PackagePosition::InTruck(TruckId(1)));
        let unload_wrong =
            LogisticsAction::UnloadTruck { package: PackageId(0), truck: TruckId(1), at: Location::new(1, 0) };
        assert_eq!(Logistics::apply(&s, &unload_wrong).unwrap_err().reason, ViolationReason::VehicleNotAtLocation);
    }

    #[test]
    fn applicable_actions_in_example() {
        let acts = Logistics::applicable(&example_init());
        // one drive per truck, one flight; no loads (nothing co-located with the package)
        assert_eq!(acts.len(), 3);
        for a in &acts {
            assert!(Logistics::apply(&example_init(), a).is_ok(), "{a}");
        }
    }

    #[test]
    fn rejects_bad_states() {
        let topo = LogisticsTopology::new(2, 2, 1).unwrap();
        assert!(LogisticsState::new(topo, vec![], vec![0], vec![0]).is_err());
        assert!(LogisticsState::new(topo, vec![], vec![0, 2], vec![0]).is_err());
        assert!(LogisticsState::new(topo, vec![], vec![0, 0], vec![2]).is_err());
        assert!(
            LogisticsState::new(topo, vec![PackagePosition::InAirplane(AirplaneId(1))], vec![0, 0], vec![0]).is_err()
        );
    }

    #[test]
    fn goal_requires_destinations() {
        assert!(LogisticsGoal::new([]).is_err());
        assert!(LogisticsGoal::new([(PackageId(0), Location::new(0, 0)), (PackageId(0), Location::new(1, 0))]).is_err());
    }
}
