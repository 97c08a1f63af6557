//! Batch experiments: generate elections, settle each one's optimum, and
//! aggregate how often each heuristic reaches it.

use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Write as _};
use std::io::{BufRead, Write};
use std::str::FromStr;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::election::{Election, ScoreProfile};
use crate::error::{Error, Result};
use crate::exact::{minimum_manipulators, Budget, OptimalityReport, Proof};
use crate::gen::{GenConfig, Model, UrnWeight};

/// Which candidate the coalition backs in generated elections.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Target {
    /// Candidate `m`.
    #[default]
    Last,
    /// The lowest-scoring candidate, lowest index on ties.
    Worst,
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "last" => Ok(Target::Last),
            "worst" => Ok(Target::Worst),
            other => Err(Error::InvalidConfig(format!("unknown target {other:?}"))),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Last => "last",
            Target::Worst => "worst",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub ms: Vec<usize>,
    pub ps: Vec<usize>,
    pub per_cell: usize,
    pub models: Vec<Model>,
    pub seed: u64,
    pub target: Target,
    pub budget: Budget,
    /// Worker threads; 0 picks one per core.
    pub workers: usize,
    /// Write wall-clock times into the CSV. Off by default so that reruns
    /// are byte-identical.
    pub record_timings: bool,
}

impl ExperimentConfig {
    /// m in {4, 8, 16}, p in {4, ..., 128}, 100 elections per cell, backing
    /// the worst-off candidate, node budget only.
    pub fn desk(models: Vec<Model>, seed: u64) -> Self {
        ExperimentConfig {
            ms: vec![4, 8, 16],
            ps: vec![4, 8, 16, 32, 64, 128],
            per_cell: 100,
            models,
            seed,
            target: Target::Worst,
            budget: Budget::nodes(10_000_000),
            workers: 0,
            record_timings: false,
        }
    }

    /// m and p in {4, ..., 128}, 1000 elections per cell. Expect CPU-days.
    pub fn full(models: Vec<Model>, seed: u64) -> Self {
        ExperimentConfig {
            ms: vec![4, 8, 16, 32, 64, 128],
            per_cell: 1000,
            ..Self::desk(models, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ms.is_empty() || self.ms.iter().any(|&m| m < 2) {
            return Err(Error::InvalidConfig("every m must be at least 2".into()));
        }
        if self.ps.is_empty() || self.ps.contains(&0) {
            return Err(Error::InvalidConfig("every p must be at least 1".into()));
        }
        if self.per_cell == 0 {
            return Err(Error::InvalidConfig("need at least one instance per cell".into()));
        }
        if self.models.is_empty() {
            return Err(Error::InvalidConfig("no models selected".into()));
        }
        if let Some(m) = self
            .models
            .iter()
            .find(|m| !matches!(m, Model::Uniform | Model::Urn(_)))
        {
            return Err(Error::InvalidConfig(format!("model {m} is not a random model")));
        }
        self.budget.validate()
    }
}

/// One row of the per-instance CSV.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceRecord {
    pub instance_id: u64,
    pub m: usize,
    pub p: usize,
    pub model: String,
    pub n_reverse: usize,
    pub n_optimal: Option<usize>,
    pub proof: Proof,
    pub rev_opt: Option<bool>,
    pub lslg_opt: Option<bool>,
    pub lsla_opt: Option<bool>,
    pub nodes: u64,
    pub elapsed_ms: u64,
}

pub const CSV_HEADER: [&str; 12] = [
    "instance_id",
    "m",
    "p",
    "model",
    "n_reverse",
    "n_optimal",
    "proof",
    "rev_opt",
    "lslg_opt",
    "lsla_opt",
    "nodes",
    "elapsed_ms",
];

#[derive(Serialize, Deserialize)]
struct CsvRow {
    instance_id: u64,
    m: usize,
    p: usize,
    model: String,
    n_reverse: usize,
    n_optimal: String,
    proof: String,
    rev_opt: String,
    lslg_opt: String,
    lsla_opt: String,
    nodes: u64,
    elapsed_ms: u64,
}

fn flag_str(b: Option<bool>) -> String {
    match b {
        Some(true) => "1",
        Some(false) => "0",
        None => "-",
    }
    .to_string()
}

fn parse_flag(s: &str) -> Result<Option<bool>> {
    match s {
        "1" => Ok(Some(true)),
        "0" => Ok(Some(false)),
        "-" => Ok(None),
        other => Err(Error::Schema(format!("bad flag {other:?}"))),
    }
}

impl InstanceRecord {
    fn from_report(instance_id: u64, m: usize, p: usize, model: &Model, r: &OptimalityReport, timings: bool) -> Self {
        InstanceRecord {
            instance_id,
            m,
            p,
            model: model.to_string(),
            n_reverse: r.n_reverse,
            n_optimal: r.n_optimal,
            proof: r.proof,
            rev_opt: r.reverse_optimal,
            lslg_opt: r.lslg_optimal,
            lsla_opt: r.lsla_optimal(),
            nodes: r.nodes,
            elapsed_ms: if timings { r.elapsed.as_millis() as u64 } else { 0 },
        }
    }

    fn to_row(&self) -> CsvRow {
        CsvRow {
            instance_id: self.instance_id,
            m: self.m,
            p: self.p,
            model: self.model.clone(),
            n_reverse: self.n_reverse,
            n_optimal: self.n_optimal.map_or("unknown".to_string(), |n| n.to_string()),
            proof: self.proof.to_string(),
            rev_opt: flag_str(self.rev_opt),
            lslg_opt: flag_str(self.lslg_opt),
            lsla_opt: flag_str(self.lsla_opt),
            nodes: self.nodes,
            elapsed_ms: self.elapsed_ms,
        }
    }

    fn from_row(row: CsvRow) -> Result<Self> {
        let n_optimal = match row.n_optimal.as_str() {
            "unknown" => None,
            s => Some(s.parse().map_err(|_| Error::Schema(format!("bad n_optimal {s:?}")))?),
        };
        Ok(InstanceRecord {
            instance_id: row.instance_id,
            m: row.m,
            p: row.p,
            model: row.model,
            n_reverse: row.n_reverse,
            n_optimal,
            proof: row.proof.parse()?,
            rev_opt: parse_flag(&row.rev_opt)?,
            lslg_opt: parse_flag(&row.lslg_opt)?,
            lsla_opt: parse_flag(&row.lsla_opt)?,
            nodes: row.nodes,
            elapsed_ms: row.elapsed_ms,
        })
    }
}

/// Writes the per-instance CSV, preceded by a `# root_seed=` comment line.
pub fn write_csv<W: Write>(records: &[InstanceRecord], root_seed: u64, mut out: W) -> Result<()> {
    writeln!(out, "# root_seed={root_seed}")?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(r.to_row())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a per-instance CSV; `#` lines are ignored. An empty input yields no
/// records.
pub fn read_csv<R: BufRead>(input: R) -> Result<Vec<InstanceRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        return Ok(Vec::new());
    }
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Schema(format!(
            "expected columns {}, found {}",
            CSV_HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    rdr.deserialize::<CsvRow>()
        .map(|row| {
            let row = row.map_err(|e| Error::Schema(e.to_string()))?;
            InstanceRecord::from_row(row)
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SummaryRow {
    pub m: usize,
    /// Instances with a known optimum.
    pub instances: usize,
    pub unknown: usize,
    pub reverse: usize,
    pub lslg: usize,
    pub lsla: usize,
    pub lslg_beat_lsla: usize,
}

impl SummaryRow {
    fn add(&mut self, r: &InstanceRecord) {
        if r.n_optimal.is_none() {
            self.unknown += 1;
            return;
        }
        self.instances += 1;
        let yes = |b: Option<bool>| b == Some(true);
        self.reverse += yes(r.rev_opt) as usize;
        self.lslg += yes(r.lslg_opt) as usize;
        self.lsla += yes(r.lsla_opt) as usize;
        self.lslg_beat_lsla += (yes(r.lslg_opt) && !yes(r.lsla_opt)) as usize;
    }

    fn merge(&mut self, o: &SummaryRow) {
        self.instances += o.instances;
        self.unknown += o.unknown;
        self.reverse += o.reverse;
        self.lslg += o.lslg;
        self.lsla += o.lsla;
        self.lslg_beat_lsla += o.lslg_beat_lsla;
    }

    fn rate(&self, count: usize) -> f64 {
        if self.instances == 0 {
            0.0
        } else {
            count as f64 / self.instances as f64
        }
    }

    pub fn reverse_rate(&self) -> f64 {
        self.rate(self.reverse)
    }

    pub fn lslg_rate(&self) -> f64 {
        self.rate(self.lslg)
    }

    pub fn lsla_rate(&self) -> f64 {
        self.rate(self.lsla)
    }
}

/// Optimal-found counts per number of candidates, for one model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummaryTable {
    pub model: String,
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    /// One table per model, rows ordered by `m`.
    pub fn from_records(records: &[InstanceRecord]) -> Vec<SummaryTable> {
        let mut grouped: BTreeMap<&str, BTreeMap<usize, SummaryRow>> = BTreeMap::new();
        for r in records {
            grouped
                .entry(&r.model)
                .or_default()
                .entry(r.m)
                .or_insert_with(|| SummaryRow {
                    m: r.m,
                    ..Default::default()
                })
                .add(r);
        }
        grouped
            .into_iter()
            .map(|(model, rows)| SummaryTable {
                model: model.to_string(),
                rows: rows.into_values().collect(),
            })
            .collect()
    }

    pub fn total(&self) -> SummaryRow {
        let mut t = SummaryRow::default();
        for r in &self.rows {
            t.merge(r);
        }
        t
    }

    /// Totals over rows with `m >= min_m`.
    pub fn total_from(&self, min_m: usize) -> SummaryRow {
        let mut t = SummaryRow::default();
        for r in self.rows.iter().filter(|r| r.m >= min_m) {
            t.merge(r);
        }
        t
    }

    /// Rows where LSLA reached the optimum less often than REVERSE.
    pub fn dominance_warnings(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| r.lsla < r.reverse).map(|r| r.m).collect()
    }

    pub fn render_text(&self) -> String {
        let header = ["m", "# Inst.", "REVERSE", "LSLG", "LSLA", "LSLG beat LSLA", "unknown"];
        let mut lines: Vec<[String; 7]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.m.to_string(),
                    r.instances.to_string(),
                    r.reverse.to_string(),
                    r.lslg.to_string(),
                    r.lsla.to_string(),
                    r.lslg_beat_lsla.to_string(),
                    r.unknown.to_string(),
                ]
            })
            .collect();
        let t = self.total();
        lines.push([
            "Total".into(),
            t.instances.to_string(),
            t.reverse.to_string(),
            t.lslg.to_string(),
            t.lsla.to_string(),
            t.lslg_beat_lsla.to_string(),
            t.unknown.to_string(),
        ]);
        let pct = |c: usize| format!("{:.1}", 100.0 * t.rate(c));
        lines.push([
            "%".into(),
            String::new(),
            pct(t.reverse),
            pct(t.lslg),
            pct(t.lsla),
            pct(t.lslg_beat_lsla),
            String::new(),
        ]);
        let mut widths = header.map(str::len);
        for l in &lines {
            for (w, cell) in widths.iter_mut().zip(l) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        writeln!(out, "model: {}", self.model).unwrap();
        let fmt_line = |cells: &[&str]| -> String {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        writeln!(out, "{}", fmt_line(&header)).unwrap();
        let rule = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
        writeln!(out, "{}", "-".repeat(rule)).unwrap();
        for l in &lines {
            let cells: Vec<&str> = l.iter().map(String::as_str).collect();
            writeln!(out, "{}", fmt_line(&cells)).unwrap();
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from("model,m,instances,reverse,lslg,lsla,lslg_beat_lsla,unknown\n");
        let t = self.total();
        let total = SummaryRow { m: 0, ..t };
        for (label, r) in self
            .rows
            .iter()
            .map(|r| (r.m.to_string(), r))
            .chain(std::iter::once(("total".to_string(), &total)))
        {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.model, label, r.instances, r.reverse, r.lslg, r.lsla, r.lslg_beat_lsla, r.unknown
            )
            .unwrap();
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub records: Vec<InstanceRecord>,
    pub generated: usize,
    pub duplicates: usize,
    pub tables: Vec<SummaryTable>,
    /// Instances where LSLA failed both at REVERSE's size and one below.
    pub dominance_violations: Vec<u64>,
}

/// A generated, deduplicated election ready to solve.
#[derive(Clone, Debug)]
pub struct GeneratedInstance {
    pub id: u64,
    pub m: usize,
    pub p: usize,
    pub model: Model,
    pub profile: ScoreProfile<i64>,
}

/// All instances of an experiment, plus how many elections were drawn and
/// how many of those were duplicates.
#[derive(Clone, Debug)]
pub struct InstanceSet {
    pub instances: Vec<GeneratedInstance>,
    pub generated: usize,
    pub duplicates: usize,
}

fn target_profile(election: &Election, target: Target) -> Result<ScoreProfile<i64>> {
    let profile: ScoreProfile<i64> = election.tally();
    match target {
        Target::Last => Ok(profile),
        Target::Worst => profile.with_distinguished(profile.worst_off()),
    }
}

fn dedup_key(e: &Election) -> Vec<Vec<usize>> {
    let mut votes: Vec<Vec<usize>> = e.votes().iter().map(|v| v.to_indices()).collect();
    votes.sort_unstable();
    votes
}

/// Instance `i` (counting over models, then m, then p, then index) uses
/// seed `root + i`. Repeated ballot multisets within a model are dropped.
pub fn generate_instances(config: &ExperimentConfig) -> Result<InstanceSet> {
    config.validate()?;
    let mut instances = Vec::new();
    let mut generated = 0;
    let mut duplicates = 0;
    let mut id: u64 = 0;
    for &model in &config.models {
        let mut seen: HashSet<(usize, usize, Vec<Vec<usize>>)> = HashSet::new();
        for &m in &config.ms {
            for &p in &config.ps {
                for _ in 0..config.per_cell {
                    let seed = config.seed.wrapping_add(id);
                    let election = GenConfig { m, p, model, seed }.generate()?;
                    generated += 1;
                    if seen.insert((m, p, dedup_key(&election))) {
                        instances.push(GeneratedInstance {
                            id,
                            m,
                            p,
                            model,
                            profile: target_profile(&election, config.target)?,
                        });
                    } else {
                        duplicates += 1;
                    }
                    id += 1;
                }
            }
        }
    }
    Ok(InstanceSet {
        instances,
        generated,
        duplicates,
    })
}

/// Generates, deduplicates and solves every instance on a bounded worker
/// pool. Output order follows instance ids, whatever the scheduling.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let InstanceSet {
        instances: jobs,
        generated,
        duplicates,
    } = generate_instances(config)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let solved: Vec<(InstanceRecord, bool)> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let report = minimum_manipulators(&job.profile, config.budget)?;
                let record =
                    InstanceRecord::from_report(job.id, job.m, job.p, &job.model, &report, config.record_timings);
                Ok((record, report.lsla_dominance_violation))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let dominance_violations: Vec<u64> = solved.iter().filter(|(_, v)| *v).map(|(r, _)| r.instance_id).collect();
    for id in &dominance_violations {
        warn!("instance {id}: LSLA failed at REVERSE's size and one below");
    }
    let records: Vec<InstanceRecord> = solved.into_iter().map(|(r, _)| r).collect();
    let tables = SummaryTable::from_records(&records);
    for t in &tables {
        for m in t.dominance_warnings() {
            warn!("{} m={m}: LSLA optimal count below REVERSE's", t.model);
        }
    }
    Ok(ExperimentResult {
        records,
        generated,
        duplicates,
        tables,
        dominance_violations,
    })
}

/// The urn model with `a = m!`.
pub fn urn_factorial() -> Model {
    Model::Urn(UrnWeight::Factorial)
}
