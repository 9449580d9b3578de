//! Positions, connectivity and random-walk mobility.

use rand::Rng;

use crate::config::{Mobility, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y, z: 0.0 }
    }

    pub fn new3(x: f64, y: f64, z: f64) -> Self {
        Point { x, y, z }
    }

    pub fn dist(&self, o: &Point) -> f64 {
        ((self.x - o.x).powi(2) + (self.y - o.y).powi(2) + (self.z - o.z).powi(2)).sqrt()
    }
}

/// Devices within `range` of device `i` (closed ball), excluding `i`.
pub fn neighbours_of(positions: &[Point], i: usize, range: f64) -> Vec<usize> {
    let p = positions[i];
    (0..positions.len())
        .filter(|&j| j != i && p.dist(&positions[j]) <= range)
        .collect()
}

/// The full neighbourhood relation.
pub fn neighbours(positions: &[Point], range: f64) -> Vec<Vec<usize>> {
    (0..positions.len())
        .map(|i| neighbours_of(positions, i, range))
        .collect()
}

/// Whether the neighbourhood graph is connected.
pub fn is_connected(positions: &[Point], range: f64) -> bool {
    if positions.is_empty() {
        return true;
    }
    let adj = neighbours(positions, range);
    let mut seen = vec![false; positions.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for &j in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

pub fn uniform_positions<R: Rng>(n: usize, bounds: Point, rng: &mut R) -> Vec<Point> {
    (0..n)
        .map(|_| {
            Point::new3(
                rng.random::<f64>() * bounds.x,
                rng.random::<f64>() * bounds.y,
                rng.random::<f64>() * bounds.z,
            )
        })
        .collect()
}

/// Per-device state of the random walk.
#[derive(Debug, Clone)]
pub struct Walker {
    pub heading: Point,
    pub leg_left: f64,
}

#[derive(Debug, Clone)]
pub struct MobilityState {
    walkers: Vec<Walker>,
    bounds: Point,
    speed: f64,
}

fn random_heading<R: Rng>(rng: &mut R, three_d: bool) -> Point {
    if three_d {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let r = (1.0 - z * z).sqrt();
        Point::new3(r * a.cos(), r * a.sin(), z)
    } else {
        let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        Point::new(a.cos(), a.sin())
    }
}

impl MobilityState {
    pub fn new<R: Rng>(cfg: &SimConfig, rng: &mut R) -> Option<Self> {
        let Mobility::RandomWalk { speed } = cfg.mobility else {
            return None;
        };
        let bounds = cfg.bounds();
        let max_leg = bounds.x.max(bounds.y).max(bounds.z);
        let walkers = (0..cfg.devices)
            .map(|_| Walker {
                heading: random_heading(rng, bounds.z > 0.0),
                leg_left: rng.random::<f64>() * max_leg,
            })
            .collect();
        Some(MobilityState {
            walkers,
            bounds,
            speed,
        })
    }

    /// Advances every device by `dt` seconds.
    pub fn advance<R: Rng>(&mut self, positions: &mut [Point], dt: f64, rng: &mut R) {
        if dt <= 0.0 || self.speed == 0.0 {
            return;
        }
        let three_d = self.bounds.z > 0.0;
        let max_leg = self.bounds.x.max(self.bounds.y).max(self.bounds.z);
        for (p, w) in positions.iter_mut().zip(&mut self.walkers) {
            let mut travel = self.speed * dt;
            while travel > 0.0 {
                if w.leg_left <= 0.0 {
                    w.heading = random_heading(rng, three_d);
                    w.leg_left = rng.random::<f64>() * max_leg;
                }
                let step = travel.min(w.leg_left);
                p.x += w.heading.x * step;
                p.y += w.heading.y * step;
                p.z += w.heading.z * step;
                reflect(&mut p.x, &mut w.heading.x, self.bounds.x);
                reflect(&mut p.y, &mut w.heading.y, self.bounds.y);
                reflect(&mut p.z, &mut w.heading.z, self.bounds.z);
                travel -= step;
                w.leg_left -= step;
            }
        }
    }
}

fn reflect(c: &mut f64, h: &mut f64, max: f64) {
    if max <= 0.0 {
        *c = 0.0;
        return;
    }
    // Fold the coordinate back into [0, max], flipping the heading once per
    // bounce.
    loop {
        if *c < 0.0 {
            *c = -*c;
            *h = -*h;
        } else if *c > max {
            *c = 2.0 * max - *c;
            *h = -*h;
        } else {
            break;
        }
    }
}
