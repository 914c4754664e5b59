//! Discrete-event simulation of the memoryless RCU process.
//!
//! The writer publishes at the epochs of a rate-`alpha` Poisson process.
//! Readers arrive at rate `lambda`, lock the copy that is current at arrival
//! and hold it for an exponential(`mu`) time. When a copy is replaced it is
//! reclaimed at once if nobody holds it, otherwise when its last reader
//! leaves. `N(t)` counts the current copy plus every replaced copy still
//! locked; the age `Δ(t)` is the time since the current copy's source
//! timestamp, which is the publication epoch before it.
//!
//! Time integrals are exact: `N` and the in-flight read count are piecewise
//! constant and `Δ` is piecewise linear with slope one between events.

mod batch;
mod event;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{validate, ModelParams};
use crate::rng::RandomSource;

pub use batch::BatchIntegrals;
pub use event::{Event, EventKind, EventQueue};

/// Settings for one simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    /// Simulated time discarded before measuring. `None` picks
    /// `max(100/alpha, 100/mu, 100/lambda)`.
    pub warmup_time: Option<f64>,
    /// Expected publications in the measurement window; the window lasts
    /// `horizon_publications / alpha`.
    pub horizon_publications: u64,
    /// Equal-duration batches used for the confidence intervals.
    pub batch_count: usize,
    /// Collect the time-weighted distribution of `N`.
    pub sample_n_distribution: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            warmup_time: None,
            horizon_publications: 100_000,
            batch_count: 20,
            sample_n_distribution: false,
        }
    }
}

impl SimConfig {
    pub fn check(&self) -> Result<()> {
        if self.horizon_publications < 1000 {
            return Err(Error::Config("horizon_publications must be at least 1000"));
        }
        if self.batch_count < 10 {
            return Err(Error::Config("batch_count must be at least 10"));
        }
        if let Some(w) = self.warmup_time {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::Config("warmup_time must be finite and nonnegative"));
            }
        }
        Ok(())
    }

    pub fn warmup_for(&self, params: &ModelParams) -> f64 {
        self.warmup_time.unwrap_or_else(|| default_warmup(params))
    }
}

/// Several relaxation times of every process in the model.
pub fn default_warmup(params: &ModelParams) -> f64 {
    let mut w = (100.0 / params.alpha).max(100.0 / params.mu);
    if params.lambda > 0.0 {
        w = w.max(100.0 / params.lambda);
    }
    w
}

/// Life cycle of one published copy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateRecord {
    pub index: u64,
    pub publish_time: f64,
    pub replace_time: Option<f64>,
    /// Locks held when the copy was replaced.
    pub residual_readers: u32,
    pub grace_end_time: Option<f64>,
}

/// Time-weighted distribution of `N`: `mass[i]` is the fraction of time with
/// `N = i + 1`; `overflow` covers `N > mass.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct NHistogram {
    pub mass: Vec<f64>,
    pub overflow: f64,
}

impl NHistogram {
    /// Mass at `N - 1 = n`, i.e. with `n` replaced copies still locked.
    pub fn stale(&self, n: usize) -> f64 {
        self.mass.get(n).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum::<f64>() + self.overflow
    }

    pub fn mean(&self) -> f64 {
        self.mass
            .iter()
            .enumerate()
            .map(|(i, m)| (i + 1) as f64 * m)
            .sum()
    }
}

/// Summary of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimStats {
    /// Time average of `N(t)` over the measurement window.
    pub mean_active_updates: f64,
    /// Time average of `Δ(t)`.
    pub mean_age: f64,
    pub ci_half_width_n: f64,
    pub ci_half_width_age: f64,
    /// Time average of the number of reads in flight.
    pub mean_reads_in_flight: f64,
    pub ci_half_width_reads: f64,
    /// Publications inside the measurement window.
    pub publications: u64,
    /// Reads started over the whole run, warmup included.
    pub reads_arrived: u64,
    /// Reads finished over the whole run.
    pub reads_served: u64,
    /// Reads still holding a lock when the run stopped.
    pub reads_open: u64,
    pub window: f64,
    pub n_histogram: Option<NHistogram>,
}

/// Sample-path detail for cross-checks; kept only by [`simulate_traced`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimTrace {
    /// `W` of every publication in the window, in order; the first entry
    /// reaches back to the publication before the window.
    pub write_intervals: Vec<f64>,
    /// Event-loop `∫Δ dt` from the first to the last publication in the window.
    pub age_area_between_publications: f64,
    /// Every copy replaced inside the window.
    pub updates: Vec<UpdateRecord>,
    /// Smallest `N` seen at any event boundary.
    pub min_n: u64,
    /// Locks still held at the end, per copy.
    pub open_locks: Vec<(u64, u32)>,
}

#[derive(Debug, Clone, Copy)]
struct LockedCopy {
    locks: u32,
    publish_time: f64,
    replace_time: Option<f64>,
    residual_readers: u32,
}

struct Run<'a> {
    params: &'a ModelParams,
    now: f64,
    // current copy
    current: u64,
    current_publish: f64,
    /// Source timestamp of the current copy.
    generated_at: f64,
    copies: BTreeMap<u64, LockedCopy>,
    stale_active: u64,
    in_flight: u64,
    // measurement
    window_start: f64,
    window_end: f64,
    batch_len: f64,
    batches: usize,
    area_n: BatchIntegrals,
    area_age: BatchIntegrals,
    area_reads: BatchIntegrals,
    hist: Option<(Vec<f64>, f64)>,
    age_area_total: f64,
    publications: u64,
    reads_arrived: u64,
    reads_served: u64,
    trace: Option<SimTrace>,
    age_area_at_first_pub: Option<f64>,
    age_area_at_last_pub: f64,
}

impl Run<'_> {
    fn n(&self) -> u64 {
        1 + self.stale_active
    }

    /// Integrates every observable from `now` to `to`, split at batch edges.
    fn advance(&mut self, to: f64) {
        let to = to.min(self.window_end);
        while self.now < to {
            if self.now < self.window_start {
                self.now = to.min(self.window_start);
                continue;
            }
            let offset = self.now - self.window_start;
            let mut batch = ((offset / self.batch_len) as usize).min(self.batches - 1);
            let mut edge = self.batch_end(batch);
            // rounding can put `now` on or past the computed edge
            while edge <= self.now && batch + 1 < self.batches {
                batch += 1;
                edge = self.batch_end(batch);
            }
            let end = to.min(edge);
            let dt = end - self.now;
            let n = self.n();
            let age0 = self.now - self.generated_at;
            let age_area = age0 * dt + 0.5 * dt * dt;
            self.area_n.add(batch, n as f64 * dt);
            self.area_age.add(batch, age_area);
            self.area_reads.add(batch, self.in_flight as f64 * dt);
            self.age_area_total += age_area;
            if let Some((mass, overflow)) = self.hist.as_mut() {
                match mass.get_mut(n as usize - 1) {
                    Some(m) => *m += dt,
                    None => *overflow += dt,
                }
            }
            self.now = end;
        }
    }

    fn batch_end(&self, batch: usize) -> f64 {
        if batch + 1 == self.batches {
            self.window_end
        } else {
            self.window_start + self.batch_len * (batch + 1) as f64
        }
    }

    fn in_window(&self) -> bool {
        self.now >= self.window_start && self.now < self.window_end
    }

    fn publish(&mut self) {
        let t = self.now;
        let old = self.current;
        let write_time = t - self.current_publish;
        let replaced = match self.copies.get_mut(&old) {
            Some(c) => {
                c.replace_time = Some(t);
                c.residual_readers = c.locks;
                self.stale_active += 1;
                None
            }
            None => Some(UpdateRecord {
                index: old,
                publish_time: self.current_publish,
                replace_time: Some(t),
                residual_readers: 0,
                grace_end_time: Some(t),
            }),
        };
        if self.in_window() {
            self.publications += 1;
            let area = self.age_area_total;
            if let Some(trace) = self.trace.as_mut() {
                trace.write_intervals.push(write_time);
                if let Some(r) = replaced {
                    trace.updates.push(r);
                }
                self.age_area_at_first_pub.get_or_insert(area);
                self.age_area_at_last_pub = area;
            }
        }
        self.generated_at = self.current_publish;
        self.current_publish = t;
        self.current += 1;
    }

    fn read_arrival(&mut self) {
        let publish_time = self.current_publish;
        self.copies
            .entry(self.current)
            .or_insert(LockedCopy {
                locks: 0,
                publish_time,
                replace_time: None,
                residual_readers: 0,
            })
            .locks += 1;
        self.in_flight += 1;
        self.reads_arrived += 1;
    }

    fn read_completion(&mut self, update: u64) {
        let copy = self
            .copies
            .get_mut(&update)
            .expect("completion for a copy without locks");
        copy.locks -= 1;
        self.in_flight -= 1;
        self.reads_served += 1;
        if copy.locks == 0 {
            let copy = self
                .copies
                .remove(&update)
                .unwrap_or_else(|| unreachable!());
            if update != self.current {
                self.stale_active -= 1;
                let in_window = self.in_window();
                if let (Some(trace), Some(replaced)) = (self.trace.as_mut(), copy.replace_time) {
                    if in_window && replaced >= self.window_start {
                        trace.updates.push(UpdateRecord {
                            index: update,
                            publish_time: copy.publish_time,
                            replace_time: Some(replaced),
                            residual_readers: copy.residual_readers,
                            grace_end_time: Some(self.now),
                        });
                    }
                }
            }
        }
    }
}

fn run(
    params: &ModelParams,
    config: &SimConfig,
    tracing: bool,
) -> Result<(SimStats, Option<SimTrace>)> {
    validate(params)?;
    config.check()?;
    let warmup = config.warmup_for(params);
    let window = config.horizon_publications as f64 / params.alpha;
    let batches = config.batch_count;
    let hist = config.sample_n_distribution.then(|| {
        let cap = 1 + libm::ceil(10.0 * params.lambda / params.mu) as usize + 20;
        (vec![0.0; cap], 0.0)
    });

    let mut writes = RandomSource::new(config.seed, "simulator/publish");
    let mut arrivals = RandomSource::new(config.seed, "simulator/read-arrival");
    let mut service = RandomSource::new(config.seed, "simulator/read-service");

    let mut st = Run {
        params,
        now: 0.0,
        current: 0,
        current_publish: 0.0,
        generated_at: 0.0,
        copies: BTreeMap::new(),
        stale_active: 0,
        in_flight: 0,
        window_start: warmup,
        window_end: warmup + window,
        batch_len: window / batches as f64,
        batches,
        area_n: BatchIntegrals::new(batches, window / batches as f64),
        area_age: BatchIntegrals::new(batches, window / batches as f64),
        area_reads: BatchIntegrals::new(batches, window / batches as f64),
        hist,
        age_area_total: 0.0,
        publications: 0,
        reads_arrived: 0,
        reads_served: 0,
        trace: tracing.then(|| SimTrace {
            min_n: u64::MAX,
            ..SimTrace::default()
        }),
        age_area_at_first_pub: None,
        age_area_at_last_pub: 0.0,
    };

    let mut queue = EventQueue::new();
    queue.schedule(writes.exponential(params.alpha), EventKind::Publish);
    if params.lambda > 0.0 {
        queue.schedule(arrivals.exponential(params.lambda), EventKind::ReadArrival);
    }
    let mut next_read = 0u64;

    while let Some(t) = queue.peek_time() {
        if t > st.window_end {
            break;
        }
        let ev = queue.pop().unwrap_or_else(|| unreachable!());
        st.advance(ev.time);
        st.now = ev.time;
        match ev.kind {
            EventKind::Publish => {
                st.publish();
                queue.schedule(
                    st.now + writes.exponential(st.params.alpha),
                    EventKind::Publish,
                );
            }
            EventKind::ReadArrival => {
                st.read_arrival();
                let read = next_read;
                next_read += 1;
                queue.schedule(
                    st.now + service.exponential(st.params.mu),
                    EventKind::ReadCompletion {
                        update: st.current,
                        read,
                    },
                );
                queue.schedule(
                    st.now + arrivals.exponential(st.params.lambda),
                    EventKind::ReadArrival,
                );
            }
            EventKind::ReadCompletion { update, .. } => st.read_completion(update),
        }
        if let Some(trace) = st.trace.as_mut() {
            trace.min_n = trace.min_n.min(1 + st.stale_active);
        }
    }
    st.advance(st.window_end);

    let (mean_n, ci_n) = st.area_n.mean_and_half_width();
    let (mean_age, ci_age) = st.area_age.mean_and_half_width();
    let (mean_reads, ci_reads) = st.area_reads.mean_and_half_width();
    let n_histogram = st.hist.take().map(|(mass, overflow)| NHistogram {
        mass: mass.into_iter().map(|m| m / window).collect(),
        overflow: overflow / window,
    });
    let reads_open = st.in_flight;
    debug_assert_eq!(reads_open as usize, queue.pending_completions());

    let trace = st.trace.take().map(|mut trace| {
        trace.age_area_between_publications =
            st.age_area_at_last_pub - st.age_area_at_first_pub.unwrap_or(st.age_area_at_last_pub);
        trace.open_locks = st.copies.iter().map(|(k, c)| (*k, c.locks)).collect();
        trace
    });

    Ok((
        SimStats {
            mean_active_updates: mean_n,
            mean_age,
            ci_half_width_n: ci_n,
            ci_half_width_age: ci_age,
            mean_reads_in_flight: mean_reads,
            ci_half_width_reads: ci_reads,
            publications: st.publications,
            reads_arrived: st.reads_arrived,
            reads_served: st.reads_served,
            reads_open,
            window,
            n_histogram,
        },
        trace,
    ))
}

/// Runs one simulation and returns its time averages and intervals.
pub fn simulate(params: &ModelParams, config: &SimConfig) -> Result<SimStats> {
    run(params, config, false).map(|(stats, _)| stats)
}

/// Like [`simulate`], also returning the sample-path trace.
pub fn simulate_traced(params: &ModelParams, config: &SimConfig) -> Result<(SimStats, SimTrace)> {
    let (stats, trace) = run(params, config, true)?;
    Ok((stats, trace.unwrap_or_default()))
}

/// Time-weighted distribution of `N`; requires `sample_n_distribution`.
pub fn simulate_n_distribution(params: &ModelParams, config: &SimConfig) -> Result<NHistogram> {
    if !config.sample_n_distribution {
        return Err(Error::Config("sample_n_distribution is disabled"));
    }
    simulate(params, config)?
        .n_histogram
        .ok_or(Error::Config("histogram was not collected"))
}

/// Average age from the sawtooth decomposed into the slabs
/// `Q_n = (W_{n-1} + W_n)^2/2 - W_n^2/2 = W_{n-1}^2/2 + W_{n-1} W_n`,
/// as `sum Q_n / sum W_n` over `n >= 2`.
pub fn estimate_age_from_polygons(write_intervals: &[f64]) -> Result<f64> {
    if write_intervals.len() < 2 {
        return Err(Error::Domain("need at least two write intervals"));
    }
    let (area, time) = write_intervals
        .windows(2)
        .fold((0.0, 0.0), |(area, time), w| {
            (area + 0.5 * w[0] * w[0] + w[0] * w[1], time + w[1])
        });
    Ok(area / time)
}
