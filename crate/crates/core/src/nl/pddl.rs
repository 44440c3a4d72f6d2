use std::fmt::Write;

use crate::domain::{
    Action, BlocksworldAction, BlocksworldGoal, BlocksworldState, LogisticsAction, LogisticsGoal, LogisticsState,
    PackagePosition, Plan, Problem, Support, TaskInstance,
};

const BLOCKSWORLD_DOMAIN: &str = "(define (domain blocksworld-4ops)
  (:requirements :strips)
  (:predicates (clear ?x) (ontable ?x) (handempty) (holding ?x) (on ?x ?y))
  (:action pick-up
    :parameters (?ob)
    :precondition (and (clear ?ob) (ontable ?ob) (handempty))
    :effect (and (holding ?ob) (not (clear ?ob)) (not (ontable ?ob)) (not (handempty))))
  (:action put-down
    :parameters (?ob)
    :precondition (holding ?ob)
    :effect (and (clear ?ob) (handempty) (ontable ?ob) (not (holding ?ob))))
  (:action stack
    :parameters (?ob ?underob)
    :precondition (and (clear ?underob) (holding ?ob))
    :effect (and (handempty) (clear ?ob) (on ?ob ?underob) (not (clear ?underob)) (not (holding ?ob))))
  (:action unstack
    :parameters (?ob ?underob)
    :precondition (and (on ?ob ?underob) (clear ?ob) (handempty))
    :effect (and (holding ?ob) (clear ?underob) (not (on ?ob ?underob)) (not (clear ?ob)) (not (handempty)))))
";

const LOGISTICS_DOMAIN: &str = "(define (domain logistics-strips)
  (:requirements :strips)
  (:predicates (obj ?o) (truck ?t) (location ?l) (airplane ?a) (city ?c) (airport ?l)
               (at ?x ?l) (in ?o ?v) (in-city ?l ?c))
  (:action load-truck
    :parameters (?obj ?truck ?loc)
    :precondition (and (obj ?obj) (truck ?truck) (location ?loc) (at ?truck ?loc) (at ?obj ?loc))
    :effect (and (not (at ?obj ?loc)) (in ?obj ?truck)))
  (:action load-airplane
    :parameters (?obj ?airplane ?loc)
    :precondition (and (obj ?obj) (airplane ?airplane) (location ?loc) (at ?obj ?loc) (at ?airplane ?loc))
    :effect (and (not (at ?obj ?loc)) (in ?obj ?airplane)))
  (:action unload-truck
    :parameters (?obj ?truck ?loc)
    :precondition (and (obj ?obj) (truck ?truck) (location ?loc) (at ?truck ?loc) (in ?obj ?truck))
    :effect (and (not (in ?obj ?truck)) (at ?obj ?loc)))
  (:action unload-airplane
    :parameters (?obj ?airplane ?loc)
    :precondition (and (obj ?obj) (airplane ?airplane) (location ?loc) (in ?obj ?airplane) (at ?airplane ?loc))
    :effect (and (not (in ?obj ?airplane)) (at ?obj ?loc)))
  (:action drive-truck
    :parameters (?truck ?loc-from ?loc-to ?city)
    :precondition (and (truck ?truck) (location ?loc-from) (location ?loc-to) (city ?city)
                       (at ?truck ?loc-from) (in-city ?loc-from ?city) (in-city ?loc-to ?city))
    :effect (and (not (at ?truck ?loc-from)) (at ?truck ?loc-to)))
  (:action fly-airplane
    :parameters (?airplane ?loc-from ?loc-to)
    :precondition (and (airplane ?airplane) (airport ?loc-from) (airport ?loc-to) (at ?airplane ?loc-from))
    :effect (and (not (at ?airplane ?loc-from)) (at ?airplane ?loc-to))))
";

fn problem_text(name: &str, domain: &str, objects: &[String], init: &[String], goal: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {name})");
    let _ = writeln!(out, "  (:domain {domain})");
    let _ = writeln!(out, "  (:objects {})", objects.join(" "));
    let _ = writeln!(out, "  (:init");
    for atom in init {
        let _ = writeln!(out, "    {atom}");
    }
    let _ = writeln!(out, "  )");
    let _ = writeln!(out, "  (:goal (and {}))", goal.join(" "));
    out.push_str(")\n");
    out
}

fn blocksworld_problem(name: &str, init: &BlocksworldState, goal: &BlocksworldGoal) -> String {
    let objects: Vec<String> = init.blocks().map(|b| b.color().to_owned()).collect();
    let mut atoms: Vec<String> = init.blocks().filter(|&b| init.clear(b)).map(|b| format!("(clear {b})")).collect();
    match init.holding() {
        None => atoms.push("(handempty)".into()),
        Some(b) => atoms.push(format!("(holding {b})")),
    }
    atoms.extend(init.on_pairs().into_iter().map(|(a, b)| format!("(on {a} {b})")));
    atoms.extend(init.blocks().filter(|&b| init.support(b) == Support::Table).map(|b| format!("(ontable {b})")));
    let goal: Vec<String> = goal.atoms().map(|(a, b)| format!("(on {a} {b})")).collect();
    problem_text(name, "blocksworld-4ops", &objects, &atoms, &goal)
}

fn logistics_problem(name: &str, init: &LogisticsState, goal: &LogisticsGoal) -> String {
    let topo = init.topology();
    let mut objects = Vec::new();
    let mut atoms = Vec::new();
    for p in 0..init.n_packages() {
        objects.push(format!("package_{p}"));
        atoms.push(format!("(obj package_{p})"));
    }
    for t in init.trucks() {
        objects.push(t.to_string());
        atoms.push(format!("(truck {t})"));
    }
    for a in init.airplanes() {
        objects.push(a.to_string());
        atoms.push(format!("(airplane {a})"));
    }
    for c in 0..topo.n_cities {
        objects.push(format!("city_{c}"));
        atoms.push(format!("(city city_{c})"));
    }
    for l in topo.locations() {
        objects.push(l.to_string());
        atoms.push(format!("(location {l})"));
        atoms.push(format!("(in-city {l} city_{})", l.city));
        if l.is_airport() {
            atoms.push(format!("(airport {l})"));
        }
    }
    for (p, pos) in init.packages().iter().enumerate() {
        atoms.push(match pos {
            PackagePosition::At(l) => format!("(at package_{p} {l})"),
            PackagePosition::InTruck(t) => format!("(in package_{p} {t})"),
            PackagePosition::InAirplane(a) => format!("(in package_{p} {a})"),
        });
    }
    atoms.extend(init.trucks().map(|t| format!("(at {t} {})", init.truck_at(t))));
    atoms.extend(init.airplanes().map(|a| format!("(at {a} {})", init.airplane_at(a))));
    let goal: Vec<String> = goal.destinations().iter().map(|(p, l)| format!("(at {p} {l})")).collect();
    problem_text(name, "logistics-strips", &objects, &atoms, &goal)
}

/// Domain and problem files for an external planner or validator.
pub fn emit_pddl(task: &TaskInstance) -> (String, String) {
    let name = format!("task-{}", task.id());
    match task.problem() {
        Problem::Blocksworld { init, goal } => (BLOCKSWORLD_DOMAIN.to_owned(), blocksworld_problem(&name, init, goal)),
        Problem::Logistics { init, goal } => (LOGISTICS_DOMAIN.to_owned(), logistics_problem(&name, init, goal)),
    }
}

pub fn pddl_action(action: &Action) -> String {
    match action {
        Action::Blocksworld(a) => match a {
            BlocksworldAction::PickUp { block } => format!("(pick-up {block})"),
            BlocksworldAction::PutDown { block } => format!("(put-down {block})"),
            BlocksworldAction::Stack { block, target } => format!("(stack {block} {target})"),
            BlocksworldAction::Unstack { block, from } => format!("(unstack {block} {from})"),
        },
        Action::Logistics(a) => match a {
            LogisticsAction::LoadTruck { package, truck, at } => format!("(load-truck {package} {truck} {at})"),
            LogisticsAction::LoadAirplane { package, airplane, at } => {
                format!("(load-airplane {package} {airplane} {at})")
            }
            LogisticsAction::UnloadTruck { package, truck, at } => format!("(unload-truck {package} {truck} {at})"),
            LogisticsAction::UnloadAirplane { package, airplane, at } => {
                format!("(unload-airplane {package} {airplane} {at})")
            }
            LogisticsAction::DriveTruck { truck, from, to, city } => {
                format!("(drive-truck {truck} {from} {to} city_{city})")
            }
            LogisticsAction::FlyAirplane { airplane, from, to } => format!("(fly-airplane {airplane} {from} {to})"),
        },
    }
}

/// One ground action per line, as read by VAL-style validators.
pub fn pddl_plan(plan: &Plan) -> String {
    plan.actions().iter().map(|a| pddl_action(a) + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{BlockId, DomainKind};
    use crate::nl::reference_example;

    #[test]
    fn two_block_problem() {
        let red = BlockId::from_color("red").unwrap();
        let blue = BlockId::from_color("blue").unwrap();
        let task = TaskInstance::blocksworld(
            BlocksworldState::from_towers(2, &[vec![blue, red]]).unwrap(),
            BlocksworldGoal::new([(blue, red)]).unwrap(),
        )
        .unwrap();
        let (domain, problem) = emit_pddl(&task);
        assert!(domain.contains("(:action unstack"));
        assert!(problem.contains("(:objects red blue)"));
        assert!(problem.contains("(on red blue)"));
        assert!(problem.contains("(:goal (and (on blue red)))"));
    }

    #[test]
    fn reference_goal_conjunction() {
        let (task, plan) = reference_example(DomainKind::Blocksworld);
        let (_, problem) = emit_pddl(&task);
        assert!(problem.contains("(:goal (and (on red blue) (on blue orange) (on yellow red)))"));
        assert!(pddl_plan(&plan).starts_with("(unstack blue yellow)\n"));
    }

    #[test]
    fn balanced_parentheses() {
        for d in [DomainKind::Blocksworld, DomainKind::Logistics] {
            let (task, _) = reference_example(d);
            let (domain, problem) = emit_pddl(&task);
            for text in [domain, problem] {
                let mut depth = 0i32;
                for ch in text.chars() {
                    depth += match ch {
                        '(' => 1,
                        ')' => -1,
                        _ => 0,
                    };
                    assert!(depth >= 0);
                }
                assert_eq!(depth, 0);
            }
        }
    }
}
