pub mod action_lang;
pub mod harness;
pub mod motion_planner;
pub mod planning_loops;
pub mod rl_core;
pub mod sim_env;
pub mod task_planner;
