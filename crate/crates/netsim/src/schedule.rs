//! Round times of every device.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::SimConfig;
use crate::sim::rng_stream;

/// Devices draw their gaps from streams `FIRST_STREAM + device`.
const FIRST_STREAM: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slot {
    pub device: usize,
    pub time: f64,
    /// 1 for the device's first round.
    pub round: u64,
}

/// All rounds up to `cfg.duration`, ordered by time and then device.
///
/// Every gap, including the first one from time zero, is the period scaled
/// by a factor drawn uniformly from `[1 - jitter, 1 + jitter]`. Each device
/// has its own random stream, so a shorter run is a prefix of a longer one.
pub fn schedule(cfg: &SimConfig) -> Vec<Slot> {
    let gap = |rng: &mut ChaCha8Rng| {
        if cfg.jitter > 0.0 {
            cfg.period * (1.0 + rng.random_range(-cfg.jitter..=cfg.jitter))
        } else {
            cfg.period
        }
    };
    let mut out = Vec::new();
    for device in 0..cfg.devices {
        let rng = &mut rng_stream(cfg.seed, FIRST_STREAM + device as u64);
        let mut t = gap(rng);
        let mut round = 1;
        while t <= cfg.duration {
            out.push(Slot {
                device,
                time: t,
                round,
            });
            t += gap(rng);
            round += 1;
        }
    }
    out.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.device.cmp(&b.device)));
    out
}
