use crate::error::Result;
use crate::run::{batch_config, build_bundle, Prepared};
use crate::scenario::{EngineChoice, Mode, Scenario};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rgg_core::batch::BatchEngine;
use rgg_core::rgg::SequentialEngine;
use rgg_core::roadmap::{ExactOracle, ObstacleSolid, ValidityState};

/// Labels compared against the exact oracle.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QualitySummary {
    pub checked: usize,
    pub green: usize,
    pub green_correct: usize,
    pub red: usize,
    pub red_correct: usize,
    pub gray: usize,
    /// Gray components the oracle finds free.
    pub gray_valid: usize,
    pub gray_invalid: usize,
}

fn rate(ok: usize, of: usize) -> f64 {
    if of == 0 {
        1.0
    } else {
        ok as f64 / of as f64
    }
}

impl QualitySummary {
    pub fn green_correct_rate(&self) -> f64 {
        rate(self.green_correct, self.green)
    }

    pub fn red_correct_rate(&self) -> f64 {
        rate(self.red_correct, self.red)
    }

    pub fn gray_fraction(&self) -> f64 {
        if self.checked == 0 {
            0.0
        } else {
            self.gray as f64 / self.checked as f64
        }
    }

    pub fn is_sound(&self) -> bool {
        self.green == self.green_correct && self.red == self.red_correct
    }

    pub fn pretty(&self) -> String {
        format!(
            "checked {}\ngreen {} (correct rate {:.6})\nred {} (correct rate {:.6})\ngray {} (fraction {:.4}; oracle: {} free, {} colliding)\n",
            self.checked,
            self.green,
            self.green_correct_rate(),
            self.red,
            self.red_correct_rate(),
            self.gray,
            self.gray_fraction(),
            self.gray_valid,
            self.gray_invalid
        )
    }
}

fn tally(
    q: &mut QualitySummary,
    states: &[ValidityState],
    picks: &[usize],
    oracle: &ExactOracle,
    p: &Prepared,
    solids: &[ObstacleSolid],
) {
    for &c in picks {
        let truth = oracle.component_valid(&p.bundle.roadmap, c as u32, solids);
        q.checked += 1;
        match states[c] {
            ValidityState::Valid => {
                q.green += 1;
                q.green_correct += truth as usize;
            }
            ValidityState::Invalid => {
                q.red += 1;
                q.red_correct += !truth as usize;
            }
            ValidityState::Unknown => {
                q.gray += 1;
                if truth {
                    q.gray_valid += 1;
                } else {
                    q.gray_invalid += 1;
                }
            }
        }
    }
}

/// Replays the scenario and, before the first move and after every move,
/// checks `sample` random components against the exact oracle.
pub fn classification_quality(s: &Scenario, count: usize) -> Result<QualitySummary> {
    let p = build_bundle(s)?;
    quality_prepared(s, &p, count)
}

pub fn quality_prepared(s: &Scenario, p: &Prepared, count: usize) -> Result<QualitySummary> {
    let oracle = ExactOracle::new(&p.bundle.robot, p.bundle.geometry.eps)?;
    let obstacles = s.obstacles()?;
    let n = p.bundle.component_count();
    let take = count.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(s.moves.seed ^ 0x9a11_17e5);
    let lazy = s.mode == Mode::Lazy;
    let mut q = QualitySummary::default();
    let moves = s.move_script();
    if s.engine == EngineChoice::Batch {
        let mut e = BatchEngine::new(p.bundle.clone(), obstacles, &s.bounds(), batch_config(s))?;
        for i in 0..=moves.len() {
            if i > 0 {
                e.batch_update(&moves[i - 1..i], lazy)?;
            }
            let picks = sample(&mut rng, n, take).into_vec();
            tally(&mut q, e.states(), &picks, &oracle, p, &e.placed_solids());
        }
    } else {
        let mut e = SequentialEngine::new(p.bundle.clone(), obstacles, batch_config(s).engine)?;
        for i in 0..=moves.len() {
            if i > 0 {
                let (o, t) = moves[i - 1];
                e.update_obstacle(o, t, lazy)?;
            }
            let picks = sample(&mut rng, n, take).into_vec();
            tally(&mut q, e.states(), &picks, &oracle, p, &e.placed_solids());
        }
    }
    Ok(q)
}
