use std::sync::LazyLock;

use regex::{Captures, Regex, RegexBuilder};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{PLAN_CLOSE, PLAN_OPEN};
use crate::domain::{
    Action, AirplaneId, BlockId, BlocksworldAction, DomainKind, Location, LogisticsAction, PackageId, Plan, TruckId,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParseErrorReason {
    UnknownTemplate,
    UnknownObject,
    MalformedHeader,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("line {line}: {reason:?}: {text:?}")]
pub struct ParseError {
    /// 1-based line number in the parsed text.
    pub line: usize,
    pub reason: ParseErrorReason,
    pub text: String,
}

fn pattern(p: &str) -> Regex {
    let p = p.replace(' ', r"\s+");
    RegexBuilder::new(&format!("^{p}$")).case_insensitive(true).build().expect("valid template regex")
}

struct Templates {
    pick_up: Regex,
    put_down: Regex,
    stack: Regex,
    unstack: Regex,
    load: Regex,
    unload: Regex,
    drive: Regex,
    fly: Regex,
}

static TEMPLATES: LazyLock<Templates> = LazyLock::new(|| Templates {
    pick_up: pattern(r"pick up the (\w+) block"),
    put_down: pattern(r"put down the (\w+) block"),
    stack: pattern(r"stack the (\w+) block on top of the (\w+) block"),
    unstack: pattern(r"unstack the (\w+) block from on top of the (\w+) block"),
    load: pattern(r"load (\S+) into (\S+) at (\S+)"),
    unload: pattern(r"unload (\S+) from (\S+) at (\S+)"),
    drive: pattern(r"drive (\S+) from (\S+) to (\S+) in (\S+)"),
    fly: pattern(r"fly (\S+) from (\S+) to (\S+)"),
});

static INDEXED: LazyLock<Regex> = LazyLock::new(|| {
    RegexBuilder::new(r"^(package|truck|airplane|city|location)_(\d+)(?:_(\d+))?$")
        .case_insensitive(true)
        .build()
        .expect("valid object regex")
});

enum Object {
    Package(PackageId),
    Truck(TruckId),
    Airplane(AirplaneId),
    City(u8),
    Location(Location),
}

fn object(name: &str) -> Option<Object> {
    let caps = INDEXED.captures(name)?;
    let a: u8 = caps[2].parse().ok()?;
    let b = caps.get(3).map(|m| m.as_str().parse::<u8>());
    Some(match (caps[1].to_ascii_lowercase().as_str(), b) {
        ("package", None) => Object::Package(PackageId(a)),
        ("truck", None) => Object::Truck(TruckId(a)),
        ("airplane", None) => Object::Airplane(AirplaneId(a)),
        ("city", None) => Object::City(a),
        ("location", Some(Ok(b))) => Object::Location(Location::new(a, b)),
        _ => return None,
    })
}

enum LineError {
    Template,
    Object,
}

fn blocksworld_line(line: &str) -> Result<Action, LineError> {
    let t = &*TEMPLATES;
    let b = |caps: &Captures, i: usize| BlockId::from_color(&caps[i]).ok_or(LineError::Object);
    let action = if let Some(c) = t.unstack.captures(line) {
        BlocksworldAction::Unstack { block: b(&c, 1)?, from: b(&c, 2)? }
    } else if let Some(c) = t.stack.captures(line) {
        BlocksworldAction::Stack { block: b(&c, 1)?, target: b(&c, 2)? }
    } else if let Some(c) = t.pick_up.captures(line) {
        BlocksworldAction::PickUp { block: b(&c, 1)? }
    } else if let Some(c) = t.put_down.captures(line) {
        BlocksworldAction::PutDown { block: b(&c, 1)? }
    } else {
        return Err(LineError::Template);
    };
    Ok(action.into())
}

fn logistics_line(line: &str) -> Result<Action, LineError> {
    let t = &*TEMPLATES;
    let obj = |caps: &Captures, i: usize| object(&caps[i]).ok_or(LineError::Object);
    let loc = |caps: &Captures, i: usize| match obj(caps, i)? {
        Object::Location(l) => Ok(l),
        _ => Err(LineError::Object),
    };
    let action = if let Some(c) = t.unload.captures(line) {
        match (obj(&c, 1)?, obj(&c, 2)?) {
            (Object::Package(package), Object::Truck(truck)) => {
                LogisticsAction::UnloadTruck { package, truck, at: loc(&c, 3)? }
            }
            (Object::Package(package), Object::Airplane(airplane)) => {
                LogisticsAction::UnloadAirplane { package, airplane, at: loc(&c, 3)? }
            }
            _ => return Err(LineError::Object),
        }
    } else if let Some(c) = t.load.captures(line) {
        match (obj(&c, 1)?, obj(&c, 2)?) {
            (Object::Package(package), Object::Truck(truck)) => {
                LogisticsAction::LoadTruck { package, truck, at: loc(&c, 3)? }
            }
            (Object::Package(package), Object::Airplane(airplane)) => {
                LogisticsAction::LoadAirplane { package, airplane, at: loc(&c, 3)? }
            }
            _ => return Err(LineError::Object),
        }
    } else if let Some(c) = t.drive.captures(line) {
        match (obj(&c, 1)?, obj(&c, 4)?) {
            (Object::Truck(truck), Object::City(city)) => {
                LogisticsAction::DriveTruck { truck, from: loc(&c, 2)?, to: loc(&c, 3)?, city }
            }
            _ => return Err(LineError::Object),
        }
    } else if let Some(c) = t.fly.captures(line) {
        match obj(&c, 1)? {
            Object::Airplane(airplane) => LogisticsAction::FlyAirplane { airplane, from: loc(&c, 2)?, to: loc(&c, 3)? },
            _ => return Err(LineError::Object),
        }
    } else {
        return Err(LineError::Template);
    };
    Ok(action.into())
}

fn is_marker(line: &str) -> bool {
    line.eq_ignore_ascii_case(PLAN_OPEN) || line.eq_ignore_ascii_case(PLAN_CLOSE)
}

fn parse_lines<'a>(lines: impl Iterator<Item = (usize, &'a str)>, domain: DomainKind) -> Result<Plan, ParseError> {
    let mut actions = Vec::new();
    for (line_no, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || is_marker(line) {
            continue;
        }
        let err = |reason| ParseError { line: line_no, reason, text: line.to_owned() };
        if line.starts_with('[') && line.ends_with(']') {
            return Err(err(ParseErrorReason::MalformedHeader));
        }
        let parsed = match domain {
            DomainKind::Blocksworld => blocksworld_line(line),
            DomainKind::Logistics => logistics_line(line),
        };
        match parsed {
            Ok(a) => actions.push(a),
            Err(LineError::Template) => return Err(err(ParseErrorReason::UnknownTemplate)),
            Err(LineError::Object) => return Err(err(ParseErrorReason::UnknownObject)),
        }
    }
    Ok(Plan(actions))
}

/// One action per line; blank lines and plan markers are skipped.
pub fn parse_plan(text: &str, domain: DomainKind) -> Result<Plan, ParseError> {
    parse_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)), domain)
}

/// Numbered lines of the plan section: after the first `[PLAN]` line when one
/// exists, and before the next `[PLAN END]`.
pub fn extract_plan_lines(text: &str) -> Vec<(usize, &str)> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let start = lines.iter().position(|(_, l)| l.trim().eq_ignore_ascii_case(PLAN_OPEN)).map_or(0, |p| p + 1);
    let rest = &lines[start..];
    let end = rest.iter().position(|(_, l)| l.trim().eq_ignore_ascii_case(PLAN_CLOSE)).unwrap_or(rest.len());
    rest[..end].to_vec()
}

/// Parses a model response, ignoring prose around the plan section.
pub fn parse_response(text: &str, domain: DomainKind) -> Result<Plan, ParseError> {
    parse_lines(extract_plan_lines(text).into_iter(), domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nl::{reference_example, render_plan};

    #[test]
    fn reference_plans_parse() {
        let (_, plan) = reference_example(DomainKind::Blocksworld);
        assert_eq!(plan.len(), 12);
        assert_eq!(plan.actions()[0].to_string(), "unstack(blue, yellow)");
        let (_, plan) = reference_example(DomainKind::Logistics);
        assert_eq!(plan.len(), 8);
    }

    #[test]
    fn round_trip() {
        for d in [DomainKind::Blocksworld, DomainKind::Logistics] {
            let (_, plan) = reference_example(d);
            assert_eq!(parse_plan(&render_plan(&plan), d).unwrap(), plan);
        }
    }

    #[test]
    fn lenient_case_and_space() {
        let p = parse_plan(
            "  [plan]\n\n  UNSTACK  the Blue block from on top of the yellow BLOCK \n",
            DomainKind::Blocksworld,
        )
        .unwrap();
        assert_eq!(p.actions()[0].to_string(), "unstack(blue, yellow)");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_plan("pick up the red block\nfly the truck to the moon", DomainKind::Blocksworld).unwrap_err();
        assert_eq!((e.line, e.reason), (2, ParseErrorReason::UnknownTemplate));
        let e = parse_plan("pick up the purple block", DomainKind::Blocksworld).unwrap_err();
        assert_eq!((e.line, e.reason), (1, ParseErrorReason::UnknownObject));
        let e = parse_plan("load package_0 into city_1 at location_0_0", DomainKind::Logistics).unwrap_err();
        assert_eq!(e.reason, ParseErrorReason::UnknownObject);
        let e = parse_plan("[PLAN]\n[STATEMENT]", DomainKind::Logistics).unwrap_err();
        assert_eq!((e.line, e.reason), (2, ParseErrorReason::MalformedHeader));
        let e = parse_plan("pick up the red block and then stack it", DomainKind::Blocksworld).unwrap_err();
        assert_eq!(e.reason, ParseErrorReason::UnknownTemplate);
    }

    #[test]
    fn response_prose_is_trimmed() {
        let text = "Sure, here it is.\n[PLAN]\npick up the red block\n[PLAN END]\nHope that helps!";
        let plan = parse_response(text, DomainKind::Blocksworld).unwrap();
        assert_eq!(plan.len(), 1);
        let e =
            parse_response("[PLAN]\npick up the red block\nnonsense\n[PLAN END]", DomainKind::Blocksworld).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(parse_response("", DomainKind::Logistics).unwrap().is_empty());
    }
}
