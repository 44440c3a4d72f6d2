//! Natural-language templates for tasks, plans and prompts, the inverse plan
//! parser, fine-tuning dataset files and PDDL export.

mod dataset;
mod parse;
mod pddl;

use crate::domain::{
    Action, BlockId, BlocksworldAction, BlocksworldGoal, BlocksworldState, DomainKind, LogisticsAction, LogisticsGoal,
    LogisticsState, PackagePosition, Plan, Problem, TaskInstance,
};

pub use dataset::{
    emit_finetune_dataset, finetune_record, ingest_responses, read_responses, write_responses, ChatMessage,
    DatasetError, FinetuneRecord, ResponseRecord,
};
pub use parse::{extract_plan_lines, parse_plan, parse_response, ParseError, ParseErrorReason};
pub use pddl::{emit_pddl, pddl_action, pddl_plan};

pub const BLOCKSWORLD_INSTRUCTIONS: &str = include_str!("instructions/blocksworld.txt");
pub const LOGISTICS_INSTRUCTIONS: &str = include_str!("instructions/logistics.txt");

pub const PLAN_OPEN: &str = "[PLAN]";
pub const PLAN_CLOSE: &str = "[PLAN END]";

pub fn instructions(domain: DomainKind) -> &'static str {
    match domain {
        DomainKind::Blocksworld => BLOCKSWORLD_INSTRUCTIONS.trim_end(),
        DomainKind::Logistics => LOGISTICS_INSTRUCTIONS.trim_end(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PromptStyle {
    ZeroShot,
    OneShot { example: TaskInstance, plan: Plan },
}

/// `a`, `a and b`, `a, b and c`.
fn join(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

fn block(b: BlockId) -> String {
    format!("the {} block", b.color())
}

fn blocksworld_facts(state: &BlocksworldState) -> Vec<String> {
    let mut facts: Vec<String> =
        state.blocks().filter(|&b| state.clear(b)).map(|b| format!("{} is clear", block(b))).collect();
    facts.push(match state.holding() {
        None => "the hand is empty".to_owned(),
        Some(b) => format!("the hand is currently holding {}", block(b)),
    });
    facts.extend(state.on_pairs().into_iter().map(|(a, b)| format!("{} is on top of {}", block(a), block(b))));
    facts.extend(state.blocks().filter(|&b| state.on_table(b)).map(|b| format!("{} is on the table", block(b))));
    facts
}

fn blocksworld_goal(goal: &BlocksworldGoal) -> Vec<String> {
    goal.atoms().map(|(a, b)| format!("{} is on top of {}", block(a), block(b))).collect()
}

fn logistics_facts(state: &LogisticsState) -> Vec<String> {
    let topo = state.topology();
    let mut facts: Vec<String> = (0..topo.n_cities).map(|c| format!("{} is an airport", topo.airport(c))).collect();
    facts.extend(state.airplanes().map(|a| format!("{a} is at {}", state.airplane_at(a))));
    facts.extend(state.packages().iter().enumerate().map(|(p, pos)| match pos {
        PackagePosition::At(loc) => format!("package_{p} is at {loc}"),
        PackagePosition::InTruck(t) => format!("package_{p} is in {t}"),
        PackagePosition::InAirplane(a) => format!("package_{p} is in {a}"),
    }));
    facts.extend(state.trucks().map(|t| format!("{t} is at {}", state.truck_at(t))));
    facts.extend(topo.locations().map(|l| format!("{l} is in the city city_{}", l.city)));
    facts
}

fn logistics_goal(goal: &LogisticsGoal) -> Vec<String> {
    goal.destinations().iter().map(|(p, loc)| format!("{p} is at {loc}")).collect()
}

/// `[STATEMENT]` block ending with the `My plan is as follows:` line.
pub fn render_task(task: &TaskInstance) -> String {
    let (init, goal, gap) = match task.problem() {
        Problem::Blocksworld { init, goal } => (blocksworld_facts(init), blocksworld_goal(goal), "\n"),
        Problem::Logistics { init, goal } => (logistics_facts(init), logistics_goal(goal), "\n\n"),
    };
    format!(
        "[STATEMENT]\nAs initial conditions I have that, {}.{gap}My goal is to have that {}.\n\nMy plan is as follows:\n",
        join(&init),
        join(&goal)
    )
}

/// Initial and goal sentences only, for text embeddings.
pub fn task_statement(task: &TaskInstance) -> String {
    let text = render_task(task);
    let body = text.trim_start_matches("[STATEMENT]\n");
    body[..body.find("\n\nMy plan is as follows:").unwrap_or(body.len())].replace("\n\n", "\n")
}

pub fn render_action(action: &Action) -> String {
    match action {
        Action::Blocksworld(a) => match *a {
            BlocksworldAction::PickUp { block: b } => format!("pick up {}", block(b)),
            BlocksworldAction::PutDown { block: b } => format!("put down {}", block(b)),
            BlocksworldAction::Stack { block: b, target } => format!("stack {} on top of {}", block(b), block(target)),
            BlocksworldAction::Unstack { block: b, from } => {
                format!("unstack {} from on top of {}", block(b), block(from))
            }
        },
        Action::Logistics(a) => match *a {
            LogisticsAction::LoadTruck { package, truck, at } => format!("load {package} into {truck} at {at}"),
            LogisticsAction::LoadAirplane { package, airplane, at } => {
                format!("load {package} into {airplane} at {at}")
            }
            LogisticsAction::UnloadTruck { package, truck, at } => format!("unload {package} from {truck} at {at}"),
            LogisticsAction::UnloadAirplane { package, airplane, at } => {
                format!("unload {package} from {airplane} at {at}")
            }
            LogisticsAction::DriveTruck { truck, from, to, city } => {
                format!("drive {truck} from {from} to {to} in city_{city}")
            }
            LogisticsAction::FlyAirplane { airplane, from, to } => format!("fly {airplane} from {from} to {to}"),
        },
    }
}

pub fn render_plan(plan: &Plan) -> String {
    let mut out = String::from(PLAN_OPEN);
    out.push('\n');
    for action in plan.actions() {
        out.push_str(&render_action(action));
        out.push('\n');
    }
    out.push_str(PLAN_CLOSE);
    out
}

/// Task statement followed by the domain's query marker.
pub fn render_query(task: &TaskInstance) -> String {
    let marker = match task.domain() {
        DomainKind::Blocksworld => PLAN_CLOSE,
        DomainKind::Logistics => PLAN_OPEN,
    };
    render_task(task) + marker
}

pub fn render_example(task: &TaskInstance, plan: &Plan) -> String {
    render_task(task) + &render_plan(plan)
}

pub fn render_prompt(task: &TaskInstance, style: &PromptStyle) -> String {
    let mut out = format!("{}\n\n", instructions(task.domain()));
    if let PromptStyle::OneShot { example, plan } = style {
        out.push_str(&render_example(example, plan));
        out.push_str("\n\n");
    }
    out.push_str(&render_query(task));
    out
}

/// The worked example shown in one-shot prompts.
pub fn reference_example(domain: DomainKind) -> (TaskInstance, Plan) {
    match domain {
        DomainKind::Blocksworld => {
            let c = |s| BlockId::from_color(s).expect("palette color");
            let init = BlocksworldState::from_towers(4, &[vec![c("red"), c("orange"), c("yellow"), c("blue")]])
                .expect("valid towers");
            let goal = BlocksworldGoal::new([(c("red"), c("blue")), (c("blue"), c("orange")), (c("yellow"), c("red"))])
                .expect("valid goal");
            let text = "unstack the blue block from on top of the yellow block\nput down the blue block\n\
                unstack the yellow block from on top of the orange block\nput down the yellow block\n\
                unstack the orange block from on top of the red block\nput down the orange block\n\
                pick up the blue block\nstack the blue block on top of the orange block\n\
                pick up the red block\nstack the red block on top of the blue block\n\
                pick up the yellow block\nstack the yellow block on top of the red block";
            let task = TaskInstance::blocksworld(init, goal).expect("goal not at init");
            (task, parse_plan(text, domain).expect("reference plan parses"))
        }
        DomainKind::Logistics => {
            use crate::domain::{Location, LogisticsTopology, PackageId};
            let topo = LogisticsTopology::new(2, 2, 1).expect("valid topology");
            let init = LogisticsState::new(topo, vec![PackagePosition::At(Location::new(1, 1))], vec![1, 0], vec![0])
                .expect("valid state");
            let goal = LogisticsGoal::new([(PackageId(0), Location::new(0, 0))]).expect("valid goal");
            let text = "drive truck_1 from location_1_0 to location_1_1 in city_1\n\
                load package_0 into truck_1 at location_1_1\n\
                drive truck_1 from location_1_1 to location_1_0 in city_1\n\
                unload package_0 from truck_1 at location_1_0\n\
                fly airplane_0 from location_0_0 to location_1_0\n\
                load package_0 into airplane_0 at location_1_0\n\
                fly airplane_0 from location_1_0 to location_0_0\n\
                unload package_0 from airplane_0 at location_0_0";
            let task = TaskInstance::logistics(init, goal).expect("goal not at init");
            (task, parse_plan(text, domain).expect("reference plan parses"))
        }
    }
}

impl PromptStyle {
    /// One-shot style using the built-in worked example of `domain`.
    pub fn one_shot_reference(domain: DomainKind) -> Self {
        let (example, plan) = reference_example(domain);
        PromptStyle::OneShot { example, plan }
    }
}
