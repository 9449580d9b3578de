//! Slow, direct reference implementations to test the runtime against.
//!
//! Nothing here is optimised. Each function follows its definition as
//! literally as possible and shares no code with the simulator beyond the
//! data types.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use xc_core::{evaluate, DeviceId, Expr, LocalValue, NValue, TreeEnv};
use xc_netsim::{EventStructure, Outcome};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("the messaging relation has a cycle")]
    Cycle,
    #[error("edge ({0}, {1}) refers to a missing event")]
    Dangling(usize, usize),
    #[error("event {event} has two predecessors on {device}")]
    SharedDevice { event: usize, device: DeviceId },
}

/// Events ordered so that every edge goes forward, by repeated depth-first
/// search from each event in id order.
pub fn causal_order(s: &EventStructure) -> Result<Vec<usize>, OracleError> {
    let n = s.events.len();
    let mut preds = vec![Vec::new(); n];
    for &(a, b) in &s.edges {
        if a >= n || b >= n {
            return Err(OracleError::Dangling(a, b));
        }
        preds[b].push(a);
    }
    // 0 unvisited, 1 on the stack, 2 done.
    let mut mark = vec![0u8; n];
    let mut order = Vec::with_capacity(n);
    fn visit(
        i: usize,
        preds: &[Vec<usize>],
        mark: &mut [u8],
        order: &mut Vec<usize>,
    ) -> Result<(), OracleError> {
        match mark[i] {
            2 => return Ok(()),
            1 => return Err(OracleError::Cycle),
            _ => {}
        }
        mark[i] = 1;
        for &p in &preds[i] {
            visit(p, preds, mark, order)?;
        }
        mark[i] = 2;
        order.push(i);
        Ok(())
    }
    for i in 0..n {
        visit(i, &preds, &mut mark, &mut order)?;
    }
    Ok(order)
}

fn predecessors(s: &EventStructure) -> Vec<Vec<usize>> {
    let mut preds = vec![Vec::new(); s.events.len()];
    for &(a, b) in &s.edges {
        preds[b].push(a);
    }
    preds
}

/// Whether process instance `key` runs at `event`.
pub type MembershipTable<K> = BTreeMap<(K, usize), bool>;

/// Process membership by induction over the messaging relation: an instance
/// runs where it is generated, and where some predecessor running it sent a
/// true status to the event's device.
///
/// `status` is only asked about events where the instance runs.
pub fn oracle_membership<K, G, S>(
    s: &EventStructure,
    generated: G,
    mut status: S,
) -> Result<MembershipTable<K>, OracleError>
where
    K: Ord + Clone,
    G: Fn(usize) -> BTreeSet<K>,
    S: FnMut(&K, usize) -> NValue,
{
    let order = causal_order(s)?;
    let preds = predecessors(s);
    let gen: Vec<BTreeSet<K>> = (0..s.events.len()).map(&generated).collect();
    let keys: BTreeSet<K> = gen.iter().flatten().cloned().collect();
    let mut table = MembershipTable::new();
    for k in &keys {
        let mut pi = vec![false; s.events.len()];
        let mut st: Vec<Option<NValue>> = vec![None; s.events.len()];
        for &e in &order {
            let d = s.events[e].device;
            let active = gen[e].contains(k)
                || preds[e].iter().any(|&p| {
                    pi[p]
                        && st[p]
                            .as_ref()
                            .is_some_and(|w| *w.get(d) == LocalValue::Bool(true))
                });
            pi[e] = active;
            if active {
                st[e] = Some(status(k, e));
            }
            table.insert((k.clone(), e), active);
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Reversed, for a min-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Distance of every node from the nearest source over non-negative
/// weighted edges `adj[i] = [(j, w), ...]`; unreachable nodes get infinity.
pub fn oracle_shortest_paths(adj: &[Vec<(usize, f64)>], sources: &[usize]) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(Entry(0.0, s));
    }
    while let Some(Entry(d, i)) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        for &(j, w) in &adj[i] {
            let nd = d + w;
            if nd < dist[j] {
                dist[j] = nd;
                heap.push(Entry(nd, j));
            }
        }
    }
    dist
}

/// The value of `program` at every event of `s`: each event is evaluated on
/// the trees its predecessors produced, with its recorded sensors.
/// Predecessors whose evaluation failed contribute nothing.
pub fn oracle_denotational(
    s: &EventStructure,
    program: &Expr,
) -> Result<Vec<Outcome>, OracleError> {
    let order = causal_order(s)?;
    let preds = predecessors(s);
    let mut out: Vec<Option<Outcome>> = vec![None; s.events.len()];
    for &e in &order {
        let d = s.events[e].device;
        let mut env = TreeEnv::new();
        for &p in &preds[e] {
            let from = s.events[p].device;
            let produced = out[p].as_ref().expect("predecessor evaluated first");
            if let Some(tree) = produced.tree() {
                if env.insert(from, tree.clone()).is_some() {
                    return Err(OracleError::SharedDevice {
                        event: e,
                        device: from,
                    });
                }
            }
        }
        out[e] = Some(match evaluate(d, &env, &s.sensors[e], program) {
            Ok((value, tree)) => Outcome::Done { value, tree },
            Err(err) => Outcome::Failed(err),
        });
    }
    Ok(out
        .into_iter()
        .map(|o| o.expect("every event evaluated"))
        .collect())
}

/// Indices of events where the two outcome lists disagree.
pub fn disagreements(a: &[Outcome], b: &[Outcome]) -> Vec<usize> {
    let n = a.len().max(b.len());
    (0..n)
        .filter(|&i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x != y,
            _ => true,
        })
        .collect()
}

pub mod fixtures {
    //! Hand-built event structures with known answers.

    use std::collections::BTreeMap;

    use xc_core::{DeviceId, SensorState};
    use xc_netsim::{Event, EventStructure};

    /// Five devices, two overlapping process instances: 5001 generated at
    /// the first event of device 5 and 2001 at the first event of device 2.
    ///
    /// Events are labelled `(device, round)`. `labels[id]` gives the label of
    /// event `id`; ids follow a causal order and times equal ids.
    pub struct Overlapping {
        pub structure: EventStructure,
        pub labels: Vec<(u64, u64)>,
    }

    const ROUNDS: [u64; 5] = [3, 5, 4, 6, 3];

    #[rustfmt::skip]
    const EDGES: &[((u64, u64), (u64, u64))] = &[
        ((1, 1), (1, 2)), ((2, 2), (1, 2)), ((1, 2), (1, 3)), ((2, 3), (1, 3)),
        ((1, 1), (2, 2)), ((2, 1), (2, 2)), ((3, 1), (2, 2)), ((4, 2), (2, 2)),
        ((1, 2), (2, 3)), ((2, 2), (2, 3)), ((2, 3), (2, 4)), ((1, 3), (2, 5)),
        ((2, 4), (2, 5)), ((3, 3), (2, 5)), ((2, 1), (3, 1)), ((4, 1), (3, 1)),
        ((5, 1), (3, 1)), ((2, 2), (3, 2)), ((3, 1), (3, 2)), ((4, 2), (3, 2)),
        ((2, 3), (3, 3)), ((3, 2), (3, 3)), ((4, 4), (3, 3)), ((2, 4), (3, 4)),
        ((3, 3), (3, 4)), ((4, 5), (3, 4)), ((4, 1), (4, 2)), ((5, 1), (4, 2)),
        ((2, 2), (4, 3)), ((3, 1), (4, 3)), ((4, 2), (4, 3)), ((5, 1), (4, 3)),
        ((3, 2), (4, 4)), ((4, 3), (4, 4)), ((3, 2), (4, 5)), ((4, 4), (4, 5)),
        ((5, 2), (4, 5)), ((3, 3), (4, 6)), ((4, 5), (4, 6)), ((4, 3), (5, 2)),
        ((5, 1), (5, 2)), ((4, 5), (5, 3)), ((5, 2), (5, 3)),
    ];

    impl Overlapping {
        pub fn new() -> Self {
            let mut labels: Vec<(u64, u64)> = Vec::new();
            let mut placed: BTreeMap<(u64, u64), usize> = BTreeMap::new();
            let all: Vec<(u64, u64)> = (1..=5u64)
                .flat_map(|d| (1..=ROUNDS[d as usize - 1]).map(move |r| (d, r)))
                .collect();
            // Repeatedly place the events whose predecessors are all placed.
            while labels.len() < all.len() {
                for &ev in &all {
                    if placed.contains_key(&ev) {
                        continue;
                    }
                    let ready = EDGES
                        .iter()
                        .filter(|(_, dst)| *dst == ev)
                        .all(|(src, _)| placed.contains_key(src));
                    if ready {
                        placed.insert(ev, labels.len());
                        labels.push(ev);
                    }
                }
            }
            let events = labels
                .iter()
                .enumerate()
                .map(|(id, &(d, r))| Event {
                    id,
                    device: DeviceId(d),
                    time: id as f64,
                    round: r,
                })
                .collect();
            let mut edges: Vec<(usize, usize)> =
                EDGES.iter().map(|(s, d)| (placed[s], placed[d])).collect();
            edges.sort_unstable();
            let sensors = (0..labels.len())
                .map(|i| SensorState::at_time(i as f64))
                .collect();
            Overlapping {
                structure: EventStructure {
                    events,
                    edges,
                    sensors,
                },
                labels,
            }
        }

        pub fn id(&self, device: u64, round: u64) -> usize {
            self.labels
                .iter()
                .position(|&l| l == (device, round))
                .expect("event exists")
        }

        /// Instances generated at event `id`.
        pub fn generated(&self, id: usize) -> Vec<i64> {
            match self.labels[id] {
                (5, 1) => vec![5001],
                (2, 1) => vec![2001],
                _ => vec![],
            }
        }

        /// How many hops each instance may travel from its initiator.
        pub fn hop_limit(key: i64) -> i64 {
            if key == 5001 {
                2
            } else {
                1
            }
        }
    }

    impl Default for Overlapping {
        fn default() -> Self {
            Self::new()
        }
    }
}
