use std::time::Instant;

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::report::{Report, SuiteResult};

pub mod cartier;
pub mod fiber;
pub mod identity;
pub mod tower;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    VerifyIdentity,
    Cartier,
    Tower,
    Fiber,
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyIdentity => "verify-identity",
            Command::Cartier => "cartier",
            Command::Tower => "tower",
            Command::Fiber => "fiber",
            Command::All => "all",
        }
    }
}

type Job<'a> = Box<dyn Fn() -> SuiteResult + Send + Sync + 'a>;

/// Per-case seed, so adding a case does not reseed the others.
pub fn case_seed(seed: u64, suite: &str, index: usize) -> u64 {
    let tag = suite.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    let mut z = seed ^ tag ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn jobs<'a>(cmd: Command, cfg: &'a RunConfig) -> Vec<Job<'a>> {
    let mut out: Vec<Job<'a>> = Vec::new();
    let want = |c: Command| cmd == c || cmd == Command::All;
    if want(Command::VerifyIdentity) {
        for &(p, n) in &cfg.pairs {
            out.push(Box::new(move || identity::run_pair(p, n)));
        }
    }
    if want(Command::Cartier) {
        for (i, spec) in cfg.curves.iter().enumerate() {
            let seed = case_seed(cfg.seed, "cartier", i);
            out.push(Box::new(move || cartier::run_curve(spec, cfg.samples, seed)));
        }
    }
    if want(Command::Tower) {
        for (i, spec) in cfg.towers.iter().enumerate() {
            let seed = case_seed(cfg.seed, "tower", i);
            out.push(Box::new(move || tower::run_tower(spec, cfg.r_max, seed)));
        }
    }
    if want(Command::Fiber) {
        for (i, spec) in cfg.fibers.iter().enumerate() {
            let seed = case_seed(cfg.seed, "fiber", i);
            out.push(Box::new(move || fiber::run_fiber(spec, seed)));
        }
    }
    out
}

/// Runs every case of `cmd` on the current rayon pool; results keep the configuration order.
pub fn run(cmd: Command, cfg: &RunConfig, timing: bool) -> Report {
    let results = jobs(cmd, cfg)
        .par_iter()
        .map(|job| {
            let start = Instant::now();
            let mut r = job();
            if timing {
                r.elapsed_ms = Some(start.elapsed().as_millis());
            }
            r
        })
        .collect();
    Report::new(cmd.name(), cfg.seed, results)
}
