//! Grid evaluation and CSV rendering.

use rayon::prelude::*;
use rcu_age::analytics::{avg_age, en_exact, en_renewal};
use rcu_age::rng::derive_seed;
use rcu_age::simulator::{simulate, NHistogram, SimConfig, SimStats};
use rcu_age::{ModelParams, SeriesControl};

pub const HEADER: [&str; 12] = [
    "alpha",
    "lambda",
    "mu",
    "en_exact",
    "en_bound_jensen",
    "en_bound_simple",
    "avg_age",
    "sim_en",
    "sim_en_ci",
    "sim_age",
    "sim_age_ci",
    "seed",
];

/// Simulated columns of a row.
#[derive(Debug, Clone, PartialEq)]
pub struct SimColumns {
    pub en: f64,
    pub en_ci: f64,
    pub age: f64,
    pub age_ci: f64,
    pub histogram: Option<NHistogram>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: ModelParams,
    pub en_exact: f64,
    pub en_bound_jensen: f64,
    pub en_bound_simple: f64,
    pub avg_age: f64,
    pub sim: Option<SimColumns>,
    pub seed: u64,
}

/// Which analytic value the simulated footprint is judged against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// The closed-form series in the `en_exact` column.
    Exact,
    /// The shared-horizon quadrature, `analytics::en_renewal`.
    Renewal,
}

/// Row-major over alpha, then lambda, then mu.
pub fn grid(alphas: &[f64], lambdas: &[f64], mus: &[f64]) -> Vec<ModelParams> {
    let mut out = Vec::with_capacity(alphas.len() * lambdas.len() * mus.len());
    for &alpha in alphas {
        for &lambda in lambdas {
            for &mu in mus {
                out.push(ModelParams::new(alpha, lambda, mu));
            }
        }
    }
    out
}

fn analytic_row(params: ModelParams, ctrl: &SeriesControl, seed: u64) -> rcu_age::Result<SweepRow> {
    let report = en_exact(&params, ctrl)?;
    Ok(SweepRow {
        params,
        en_exact: report.en_exact,
        en_bound_jensen: report.en_bound_jensen,
        en_bound_simple: report.en_bound_simple,
        avg_age: avg_age(&params)?,
        sim: None,
        seed,
    })
}

/// Analytic rows for every point. The seed column carries the per-point
/// seed a simulation of that point would use.
pub fn analytic_rows(
    points: &[ModelParams],
    ctrl: &SeriesControl,
    base_seed: u64,
) -> rcu_age::Result<Vec<SweepRow>> {
    points
        .par_iter()
        .enumerate()
        .map(|(i, &p)| analytic_row(p, ctrl, derive_seed(base_seed, i as u64)))
        .collect()
}

/// One simulated row plus its deviation from the reference in CI units.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulated {
    pub row: SweepRow,
    pub reference_en: f64,
    pub stats: SimStats,
}

impl Simulated {
    /// `|sim - reference|` over the footprint and the age, in half-widths.
    pub fn ci_units(&self) -> f64 {
        let sim = self.row.sim.as_ref().expect("simulated row");
        let n = (sim.en - self.reference_en).abs() / sim.en_ci;
        let a = (sim.age - self.row.avg_age).abs() / sim.age_ci;
        n.max(a)
    }

    /// Both quantities within `max(3 half-widths, 2 % relative)`.
    pub fn within_tolerance(&self) -> bool {
        let sim = self.row.sim.as_ref().expect("simulated row");
        let ok =
            |got: f64, ci: f64, want: f64| (got - want).abs() <= (3.0 * ci).max(0.02 * want.abs());
        ok(sim.en, sim.en_ci, self.reference_en) && ok(sim.age, sim.age_ci, self.row.avg_age)
    }
}

pub fn simulated_rows(
    points: &[ModelParams],
    ctrl: &SeriesControl,
    base: &SimConfig,
    reference: Reference,
) -> rcu_age::Result<Vec<Simulated>> {
    base.check()?;
    points
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            let seed = derive_seed(base.seed, i as u64);
            let mut row = analytic_row(p, ctrl, seed)?;
            let stats = simulate(&p, &SimConfig { seed, ..*base })?;
            let reference_en = match reference {
                Reference::Exact => row.en_exact,
                Reference::Renewal => en_renewal(&p, ctrl)?,
            };
            row.sim = Some(SimColumns {
                en: stats.mean_active_updates,
                en_ci: stats.ci_half_width_n,
                age: stats.mean_age,
                age_ci: stats.ci_half_width_age,
                histogram: stats.n_histogram.clone(),
            });
            Ok(Simulated {
                row,
                reference_en,
                stats,
            })
        })
        .collect()
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn writer(buf: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(buf)
}

pub fn render_csv(rows: &[SweepRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    {
        let mut w = writer(&mut buf);
        w.write_record(HEADER).expect("write to memory");
        for r in rows {
            let (en, en_ci, age, age_ci) = match &r.sim {
                Some(s) => (
                    fmt_f64(s.en),
                    fmt_f64(s.en_ci),
                    fmt_f64(s.age),
                    fmt_f64(s.age_ci),
                ),
                None => Default::default(),
            };
            w.write_record([
                fmt_f64(r.params.alpha),
                fmt_f64(r.params.lambda),
                fmt_f64(r.params.mu),
                fmt_f64(r.en_exact),
                fmt_f64(r.en_bound_jensen),
                fmt_f64(r.en_bound_simple),
                fmt_f64(r.avg_age),
                en,
                en_ci,
                age,
                age_ci,
                r.seed.to_string(),
            ])
            .expect("write to memory");
        }
        w.flush().expect("write to memory");
    }
    buf
}

/// Long-format time-weighted law of `N`: one line per (point, n).
pub fn render_histogram_csv(rows: &[SweepRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    {
        let mut w = writer(&mut buf);
        w.write_record(["alpha", "lambda", "mu", "seed", "n", "mass"])
            .expect("write to memory");
        for r in rows {
            let Some(h) = r.sim.as_ref().and_then(|s| s.histogram.as_ref()) else {
                continue;
            };
            let lead = [
                fmt_f64(r.params.alpha),
                fmt_f64(r.params.lambda),
                fmt_f64(r.params.mu),
                r.seed.to_string(),
            ];
            for (i, &m) in h.mass.iter().enumerate() {
                let mut rec = lead.to_vec();
                rec.push((i + 1).to_string());
                rec.push(fmt_f64(m));
                w.write_record(&rec).expect("write to memory");
            }
            let mut rec = lead.to_vec();
            rec.push(format!(">{}", h.mass.len()));
            rec.push(fmt_f64(h.overflow));
            w.write_record(&rec).expect("write to memory");
        }
        w.flush().expect("write to memory");
    }
    buf
}
