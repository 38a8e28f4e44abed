//! Finite-SNR Monte-Carlo evaluation of transmission plans.
//!
//! Every trial draws its own random stream from a counter-based seed
//! `(seed, snr index, trial index)`, so results are a pure function of the
//! plan and the configuration regardless of how trials are scheduled.

pub mod channel;
pub mod evaluate;
pub mod sweep;

pub use channel::{draw_channels, ortho, ChannelDraw, SubbandChannel, C2};
pub use evaluate::{evaluate_plan, Evaluation, MessageRate, StepRecord};
pub use sweep::{db_to_linear, fit_slope, sweep, SimConfig, SweepPoint, SweepResult};

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of sub-stream `index` of `seed`.
pub fn stream_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index.wrapping_mul(0xd605_bbb5_8c8a_bbd5))
}
