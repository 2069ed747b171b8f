//! Stochastic office simulator: navigation time from path length plus
//! noise, door-opening time from per-door normal distributions.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_2_SQRT_PI, SQRT_2};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::action_lang::{GroundedDomain, State};
use crate::motion_planner::{MotionPlanner, Pose, RefineError};
use crate::task_planner::Plan;

/// Mean opening time for doors without a `door_mean` line.
pub const DEFAULT_DOOR_MEAN: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct EnvConfig {
    /// Meters per second.
    pub nav_speed: f64,
    /// Std of the zero-mean normal whose absolute value is added to each
    /// navigation leg, seconds.
    pub nav_noise_std: f64,
    pub door_open_mean: BTreeMap<String, f64>,
    pub door_open_std: f64,
    /// Fixed duration of `go_through` and other non-navigation, non-door actions.
    pub go_through_duration: f64,
    pub rng_seed: u64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            nav_speed: 1.0,
            nav_noise_std: 2.0,
            door_open_mean: BTreeMap::new(),
            door_open_std: 10.0,
            go_through_duration: 5.0,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: `{key}` must be {requirement}")]
    Range {
        line: usize,
        key: String,
        requirement: &'static str,
    },
}

impl EnvConfig {
    /// Parses `key = value` lines and `door_mean <door> <seconds>` lines;
    /// `%` starts a comment. Unlisted keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = EnvConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('%').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let num = |s: &str| -> Result<f64, ConfigError> {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| ConfigError::Syntax {
                        line,
                        msg: format!("expected a number, found `{}`", s.trim()),
                    })
            };
            let nonneg = |key: &str, v: f64| -> Result<f64, ConfigError> {
                if v < 0.0 {
                    return Err(ConfigError::Range {
                        line,
                        key: key.to_string(),
                        requirement: "non-negative",
                    });
                }
                Ok(v)
            };
            if let Some((key, value)) = content.split_once('=') {
                let key = key.trim();
                match key {
                    "nav_speed" => {
                        let v = num(value)?;
                        if v <= 0.0 {
                            return Err(ConfigError::Range {
                                line,
                                key: key.into(),
                                requirement: "positive",
                            });
                        }
                        cfg.nav_speed = v;
                    }
                    "nav_noise_std" => cfg.nav_noise_std = nonneg(key, num(value)?)?,
                    "door_open_std" => cfg.door_open_std = nonneg(key, num(value)?)?,
                    "go_through_duration" => cfg.go_through_duration = nonneg(key, num(value)?)?,
                    "seed" => {
                        cfg.rng_seed = value.trim().parse().map_err(|_| ConfigError::Syntax {
                            line,
                            msg: format!(
                                "seed must be an unsigned integer, found `{}`",
                                value.trim()
                            ),
                        })?
                    }
                    _ => {
                        return Err(ConfigError::Syntax {
                            line,
                            msg: format!("unknown key `{key}`"),
                        })
                    }
                }
                continue;
            }
            match content.split_whitespace().collect::<Vec<_>>().as_slice() {
                ["door_mean", door, secs] => {
                    let v = nonneg("door_mean", num(secs)?)?;
                    cfg.door_open_mean.insert(door.to_string(), v);
                }
                _ => return Err(ConfigError::Syntax {
                    line,
                    msg: format!(
                        "expected `key = value` or `door_mean <door> <seconds>`, found `{content}`"
                    ),
                }),
            }
        }
        Ok(cfg)
    }

    pub fn door_mean(&self, door: &str) -> f64 {
        self.door_open_mean
            .get(door)
            .copied()
            .unwrap_or(DEFAULT_DOOR_MEAN)
    }

    /// Same configuration with every noise source switched off.
    pub fn without_noise(&self) -> Self {
        EnvConfig {
            nav_noise_std: 0.0,
            door_open_std: 0.0,
            ..self.clone()
        }
    }
}

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The generator for one action execution; a pure function of its inputs.
pub fn step_rng(seed: u64, episode: u64, step: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(mix(mix(seed) ^ episode) ^ step))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub state: State,
    /// `None` while the symbolic state has no pose.
    pub pose: Option<Pose>,
    /// Seconds since the episode started.
    pub clock: f64,
    pub episode: u64,
    pub step: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("action `{0}` is not executable in the current state")]
    InapplicableAction(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("navigation failed: {0}")]
    Navigation(#[from] RefineError),
}

/// Outcome of one executed action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub duration: f64,
}

/// Starts an episode in `initial` at step 0.
pub fn env_reset(
    initial: &State,
    episode: u64,
    g: &GroundedDomain,
    motion: &MotionPlanner,
) -> WorldState {
    WorldState {
        state: initial.clone(),
        pose: motion.map_state(initial, g).ok(),
        clock: 0.0,
        episode,
        step: 0,
    }
}

pub fn env_execute(
    w: &mut WorldState,
    a: usize,
    cfg: &EnvConfig,
    g: &GroundedDomain,
    motion: &MotionPlanner,
) -> Result<StepOutcome, EnvError> {
    let action = g.action(a);
    let next = g
        .apply(&w.state, a)
        .ok_or_else(|| EnvError::InapplicableAction(action.label()))?;
    let mut rng = step_rng(cfg.rng_seed, w.episode, w.step);
    let duration = match action.name.as_str() {
        "approach" => {
            let len = match motion.leg_length(g, &w.state, a, &next) {
                Some(r) => r?,
                None => unreachable!("approach is a navigation action"),
            };
            let noise = Normal::new(0.0, cfg.nav_noise_std).expect("finite std");
            len / cfg.nav_speed + noise.sample(&mut rng).abs()
        }
        "open_door" => {
            let door = action.args.first().map(String::as_str).unwrap_or("");
            let d = Normal::new(cfg.door_mean(door), cfg.door_open_std).expect("finite std");
            d.sample(&mut rng).max(0.0)
        }
        _ => cfg.go_through_duration,
    };
    w.pose = motion.map_state(&next, g).ok();
    w.state = next;
    w.clock += duration;
    w.step += 1;
    Ok(StepOutcome {
        reward: 0.0 - duration,
        duration,
    })
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `E[max(0, X)]` for `X ~ N(mean, std)`.
pub fn clamped_normal_mean(mean: f64, std: f64) -> f64 {
    if std == 0.0 {
        return mean.max(0.0);
    }
    let z = mean / std;
    mean * std_normal_cdf(z) + std * std_normal_pdf(z)
}

/// `E|N(0, std)|`.
pub fn half_normal_mean(std: f64) -> f64 {
    std * FRAC_2_SQRT_PI / SQRT_2
}

/// Expected duration of one transition under `cfg`.
pub fn expected_duration(
    cfg: &EnvConfig,
    g: &GroundedDomain,
    motion: &MotionPlanner,
    s: &State,
    a: usize,
    s2: &State,
) -> Result<f64, RefineError> {
    let action = g.action(a);
    Ok(match action.name.as_str() {
        "approach" => {
            let len = motion.leg_length(g, s, a, s2).expect("navigation action")?;
            len / cfg.nav_speed + half_normal_mean(cfg.nav_noise_std)
        }
        "open_door" => clamped_normal_mean(
            cfg.door_mean(action.args.first().map(String::as_str).unwrap_or("")),
            cfg.door_open_std,
        ),
        _ => cfg.go_through_duration,
    })
}

/// Expected execution time of a whole plan.
pub fn expected_plan_duration(
    cfg: &EnvConfig,
    g: &GroundedDomain,
    motion: &MotionPlanner,
    p: &Plan,
) -> Result<f64, RefineError> {
    p.transitions
        .iter()
        .map(|t| expected_duration(cfg, g, motion, &t.from, t.action, &t.to))
        .sum()
}
