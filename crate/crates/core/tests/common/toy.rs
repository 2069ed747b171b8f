//! A two-room corridor joined by a single door.
#![allow(dead_code)]

use tmprl_core::action_lang::{parse_domain, GroundedDomain};
use tmprl_core::motion_planner::OccupancyGrid;
use tmprl_core::planning_loops::TaskMotionDomain;
use tmprl_core::task_planner::PlanningProblem;

pub const DOMAIN: &str = "\
type region. type door. type loc.
object r1 : region. object r2 : region.
object d1 : door. object d1 : loc. object s : loc.
fluent in(region). fluent near(loc). fluent facing(door). fluent open(door). fluent has(region, door).
action approach(door). action open_door(door). action go_through(door).
fact has(r1, d1). fact has(r2, d1).
approach(D) causes near(D). approach(D) causes facing(D).
approach(D) causes -near(X) if near(X), D != X.
nonexecutable approach(D) if near(D).
nonexecutable approach(D) if in(R), -has(R, D).
open_door(D) causes open(D).
nonexecutable open_door(D) if -facing(D).
nonexecutable open_door(D) if open(D).
go_through(D) causes in(R1) if in(R2), has(R1, D), R1 != R2.
go_through(D) causes -in(R2) if in(R2).
nonexecutable go_through(D) if -open(D).
nonexecutable go_through(D) if -facing(D).
inertial in. inertial near. inertial facing. inertial open.
";

/// The start is 30 m from the door's approach pose.
pub const MAP: &str = "\
resolution 1.0
landmark s 0.5 0.5
door d1 r1 r2 30.5 0.5 32.5 0.5
...............................1...
";

pub fn corridor() -> TaskMotionDomain {
    let g = GroundedDomain::ground(&parse_domain(DOMAIN).unwrap()).unwrap();
    TaskMotionDomain::new(g, OccupancyGrid::parse(MAP).unwrap())
}

pub fn problem(dom: &TaskMotionDomain, text: &str) -> PlanningProblem {
    PlanningProblem::parse(text, &dom.domain).unwrap()
}

pub const CROSS: &str = "init in(r1), near(s). goal in(r2).";
