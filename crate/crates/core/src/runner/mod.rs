//! Experiment orchestration: configs in, CSVs, graymaps and a manifest out.

mod config;
mod oracle;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub use config::{
    mantel_preset, parse_config, preset, ExperimentConfig, FlowSpec, GammaSpec, HamiltonianSpec, InitSpec, InputKind,
    MetricsSpec, MetropolisSpec, Mode, OracleSpec, SampleSpec, SdeSpec,
};
pub use oracle::{run_oracles, OracleResult};

use crate::error::{Error, Result};
use crate::flow::{measure_rates, run_flow, FlowRecord};
use crate::graphon::io::{read_kernel_text, write_pgm};
use crate::graphon::{
    cut_metric_upper, cut_norm, delta2_upper, hom_density, l2_dist, PermSearch, SimpleGraph, StepKernel, ValueRange,
};
use crate::metropolis::{esbm_sample, run_chain, ChainRecord};
use crate::mvg::io::read_mvg;
use crate::mvg::{
    build_net, d2, delta2_mvg_upper, delta_black, gen_cut_norm, mvg_diff, sample_weighted_graph, wass_cut, MvgStepKernel,
};
use crate::sde::{mean_field, run_sde, SdeConfig, SdeRecord};

/// Process exit code for an error: 1 config, 2 numeric guard, 3 I/O.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => 3,
        Error::NonFinite { .. } => 2,
        _ => 1,
    }
}

pub fn load_kernel(path: &Path) -> Result<StepKernel> {
    read_kernel_text(BufReader::new(File::open(path)?))
}

pub fn load_mvg(path: &Path) -> Result<MvgStepKernel> {
    read_mvg(BufReader::new(File::open(path)?))
}

/// What a run produced.
#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    /// Oracle checks that failed (oracle mode only).
    pub failures: usize,
}

struct Out {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Out {
    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let p = self.dir.join(name);
        let f = File::create(&p)?;
        self.files.push(p);
        Ok(BufWriter::new(f))
    }

    fn heatmap(&mut self, step: u64, w: &StepKernel) -> Result<()> {
        let mut f = self.create(&format!("q_{step}.pgm"))?;
        write_pgm(w, &mut f)?;
        f.flush()?;
        Ok(())
    }
}

fn finite(values: &[f64], step: u64, what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { step, what: what.into() })
    }
}

fn upper_header(prefix: &str, r: usize) -> String {
    let mut cols = Vec::new();
    for i in 0..r {
        for j in i..r {
            cols.push(format!("{prefix}_{i}_{j}"));
        }
    }
    cols.join(",")
}

fn upper_row(w: &StepKernel) -> String {
    w.upper_triangle().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn init_kernel(spec: &InitSpec, r: usize, seed: u64) -> Result<StepKernel> {
    match spec {
        InitSpec::Constant(p) => StepKernel::constant(r, *p, ValueRange::UNIT),
        InitSpec::Uniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut upper: Vec<f64> = (0..r * (r + 1) / 2).map(|_| rng.gen()).collect();
            upper.reverse();
            let mut vals = vec![0.0; r * r];
            for i in 0..r {
                for j in i..r {
                    let v = upper.pop().expect("enough draws");
                    vals[i * r + j] = v;
                    vals[j * r + i] = v;
                }
            }
            StepKernel::new(r, vals, ValueRange::UNIT)
        }
        InitSpec::File(p) => {
            let w = load_kernel(p)?;
            if w.r() != r {
                return Err(Error::BlockMismatch { left: w.r(), right: r });
            }
            Ok(w)
        }
    }
}

/// Runs the configured experiment, writing artifacts to `cfg.output_dir`
/// and progress to `log`.
pub fn run(cfg: &ExperimentConfig, log: &mut dyn Write) -> Result<RunSummary> {
    let start = Instant::now();
    fs::create_dir_all(&cfg.output_dir)?;
    let mut out = Out { dir: cfg.output_dir.clone(), files: Vec::new() };
    let mut derived: Vec<(String, String)> = Vec::new();
    for w in &cfg.warnings {
        writeln!(log, "warning: {w}")?;
    }
    let mut failures = 0;

    match cfg.mode {
        Mode::Metropolis => {
            let h = cfg.hamiltonian.build()?;
            let chain = cfg.metropolis.chain_config(cfg.seed)?;
            chain.validate()?;
            let sc = chain.scalings();
            derived.extend([
                ("gamma_n".into(), chain.gamma_n.to_string()),
                ("beta_nr".into(), sc.beta_nr.to_string()),
                ("s_n".into(), sc.s_n.to_string()),
                ("ell_nr".into(), sc.ell.to_string()),
                ("dt_per_step".into(), sc.dt.to_string()),
                ("t_final".into(), (chain.iterations as f64 * sc.dt).to_string()),
            ]);
            echo(log, &derived)?;
            let records = run_chain(&chain, &h, |_| {})?;
            write_chain(&mut out, &records, chain.r, &chain.milestones)?;
        }
        Mode::Sde => {
            let h = cfg.hamiltonian.build()?;
            let s = &cfg.sde;
            let sde = SdeConfig {
                r: s.r,
                beta: s.beta,
                sigma: s.sigma,
                dt: s.dt,
                seed: cfg.seed,
                horizon_t: s.horizon_t,
                drift: s.drift,
                record_every: s.record_every,
            };
            let init = init_kernel(&s.init, s.r, cfg.seed)?;
            if let Some(w) = sde.stability_warning(&h, &init) {
                writeln!(log, "warning: {w}")?;
            }
            derived.push(("steps".into(), sde.steps().to_string()));
            echo(log, &derived)?;
            if s.replicas > 1 {
                let mf = mean_field(&sde, &h, &init, s.replicas)?;
                let mut f = out.create("mean_field.csv")?;
                writeln!(f, "t,H,{}", upper_header("x", s.r))?;
                for (k, (t, w)) in mf.iter().enumerate() {
                    finite(w.values(), k as u64, "mean-field state")?;
                    writeln!(f, "{t},{},{}", crate::hamiltonian::Objective::energy(&h, w), upper_row(w))?;
                }
                f.flush()?;
            } else {
                let records = run_sde(&sde, &h, &init, |_| {})?;
                write_sde(&mut out, &records, s.r)?;
            }
        }
        Mode::Flow => {
            let h = cfg.hamiltonian.build()?;
            let s = &cfg.flow;
            let init = init_kernel(&s.init, s.r, cfg.seed)?;
            let records = run_flow(&h, s.beta, &init, s.dt, s.horizon, s.record_every, |_| {})?;
            let w_star = match &s.w_star {
                Some(p) => load_kernel(p)?,
                None => records.last().expect("at least the initial record").w.clone(),
            };
            derived.push(("steps".into(), records.last().map_or(0, |r| r.step).to_string()));
            echo(log, &derived)?;
            write_flow(&mut out, &records, &w_star, s.r)?;
            if let Ok(rep) = measure_rates(&records, &w_star, &h, s.beta) {
                let mut f = out.create("rates.csv")?;
                writeln!(f, "t_start,t_end,slope,r_squared,points,envelope_ok")?;
                writeln!(f, "{},{},{},{},{},{}", rep.window.0, rep.window.1, rep.slope, rep.r_squared, rep.points, rep.envelope_ok)?;
                f.flush()?;
                writeln!(log, "fitted rate {:.6} (R^2 {:.4}), envelope ok: {}", rep.slope, rep.r_squared, rep.envelope_ok)?;
            }
        }
        Mode::Metrics => {
            echo(log, &derived)?;
            let m = &cfg.metrics;
            let (left, right) = (m.left.as_deref().expect("validated"), m.right.as_deref().expect("validated"));
            let search = PermSearch::with_seed(cfg.seed);
            let mut rows: Vec<(&str, f64)> = Vec::new();
            match m.kind {
                InputKind::Kernel => {
                    let (a, b) = (load_kernel(left)?, load_kernel(right)?);
                    rows.push(("cut_norm_difference", cut_norm(&a.sub(&b)?)));
                    rows.push(("cut_metric_upper", cut_metric_upper(&a, &b, &search)?));
                    rows.push(("l2_dist", l2_dist(&a, &b)?));
                    rows.push(("delta2_upper", delta2_upper(&a, &b, &search)?));
                    let (edge, tri) = (SimpleGraph::edge(), SimpleGraph::triangle());
                    rows.push(("edge_density_left", hom_density(&edge, &a)));
                    rows.push(("edge_density_right", hom_density(&edge, &b)));
                    rows.push(("triangle_density_left", hom_density(&tri, &a)));
                    rows.push(("triangle_density_right", hom_density(&tri, &b)));
                }
                InputKind::Mvg => {
                    let (a, b) = (load_mvg(left)?, load_mvg(right)?);
                    let net = build_net(m.net_eps)?;
                    let g = gen_cut_norm(&mvg_diff(&a, &b)?, &net)?;
                    rows.push(("gen_cut_lower", g.lower));
                    rows.push(("gen_cut_epsilon", g.epsilon));
                    rows.push(("delta_black_lower", delta_black(&a, &b, &net, &search)?));
                    rows.push(("wass_cut", wass_cut(&a, &b, &search)?));
                    rows.push(("d2", d2(&a, &b)?));
                    rows.push(("delta2_upper", delta2_mvg_upper(&a, &b, &search)?));
                    rows.push(("projection_cut_metric_upper", cut_metric_upper(&a.project(), &b.project(), &search)?));
                }
            }
            let mut f = out.create("metrics.csv")?;
            writeln!(f, "metric,value")?;
            for (k, v) in &rows {
                writeln!(f, "{k},{v}")?;
                writeln!(log, "{k:>28} = {v}")?;
            }
            f.flush()?;
        }
        Mode::Sample => {
            echo(log, &derived)?;
            let s = &cfg.sample;
            let input = s.input.as_deref().expect("validated");
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut f = out.create("edges.csv")?;
            if s.esbm {
                let q = load_kernel(input)?;
                let g = esbm_sample(q.r(), s.n, &q, &mut rng)?;
                if g.quantized {
                    writeln!(log, "note: densities rounded to admissible edge counts")?;
                }
                writeln!(f, "u,v")?;
                for (u, v) in &g.edges {
                    writeln!(f, "{u},{v}")?;
                }
                writeln!(log, "{} vertices, {} edges", q.r() * s.n, g.edges.len())?;
            } else {
                let w = match s.kind {
                    InputKind::Kernel => MvgStepKernel::bernoulli_embedding(&load_kernel(input)?)?,
                    InputKind::Mvg => load_mvg(input)?,
                };
                let g = sample_weighted_graph(&w, s.n, &mut rng);
                writeln!(f, "u,v,weight")?;
                for u in 0..s.n {
                    for v in (u + 1)..s.n {
                        let x = g.get(u, v);
                        if x != 0.0 {
                            writeln!(f, "{u},{v},{x}")?;
                        }
                    }
                }
                writeln!(log, "edge density {}", hom_density(&SimpleGraph::edge(), &g))?;
            }
            f.flush()?;
        }
        Mode::Oracle => {
            echo(log, &derived)?;
            let results = run_oracles(&cfg.oracle, cfg.seed);
            let mut f = out.create("oracle.csv")?;
            writeln!(f, "check,pass,detail")?;
            for r in &results {
                writeln!(log, "{} {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail)?;
                writeln!(f, "{},{},\"{}\"", r.name, r.pass, r.detail)?;
                failures += (!r.pass) as usize;
            }
            f.flush()?;
        }
    }

    let text = cfg.to_text();
    let hash = hex::encode(Sha256::digest(text.as_bytes()));
    let mut f = out.create("manifest.txt")?;
    write!(f, "{text}\n[manifest]\nseed = {}\nconfig_sha256 = {hash}\n", cfg.seed)?;
    for (k, v) in &derived {
        writeln!(f, "{k} = {v}")?;
    }
    writeln!(f, "wall_time_s = {:.3}", start.elapsed().as_secs_f64())?;
    f.flush()?;
    Ok(RunSummary { files: out.files, failures })
}

fn echo(log: &mut dyn Write, derived: &[(String, String)]) -> Result<()> {
    for (k, v) in derived {
        writeln!(log, "{k} = {v}")?;
    }
    Ok(())
}

fn write_chain(out: &mut Out, records: &[ChainRecord], r: usize, milestones: &[u64]) -> Result<()> {
    let mut f = out.create("trajectory.csv")?;
    writeln!(f, "step,t,H,acc_prob,accepted,{}", upper_header("q", r))?;
    for rec in records {
        finite(&[rec.t, rec.h, rec.acc_prob], rec.step, "trajectory")?;
        writeln!(f, "{},{},{},{},{},{}", rec.step, rec.t, rec.h, rec.acc_prob, rec.accepted as u8, upper_row(&rec.q))?;
    }
    f.flush()?;
    for rec in records {
        if milestones.is_empty() || milestones.contains(&rec.step) {
            out.heatmap(rec.step, &rec.q)?;
        }
    }
    Ok(())
}

fn write_sde(out: &mut Out, records: &[SdeRecord], r: usize) -> Result<()> {
    let mut f = out.create("trajectory.csv")?;
    writeln!(f, "step,t,H,L0_fro,L1_fro,{}", upper_header("x", r))?;
    for rec in records {
        finite(&[rec.t, rec.h, rec.l0_norm, rec.l1_norm], rec.step, "trajectory")?;
        writeln!(f, "{},{},{},{},{},{}", rec.step, rec.t, rec.h, rec.l0_norm, rec.l1_norm, upper_row(&rec.x))?;
    }
    f.flush()?;
    for rec in records {
        out.heatmap(rec.step, &rec.x)?;
    }
    Ok(())
}

fn write_flow(out: &mut Out, records: &[FlowRecord], w_star: &StepKernel, r: usize) -> Result<()> {
    let mut f = out.create("trajectory.csv")?;
    writeln!(f, "step,t,H,dist,{}", upper_header("w", r))?;
    for rec in records {
        let d = l2_dist(&rec.w, w_star)?;
        finite(&[rec.t, rec.h, d], rec.step, "trajectory")?;
        writeln!(f, "{},{},{},{},{}", rec.step, rec.t, rec.h, d, upper_row(&rec.w))?;
    }
    f.flush()?;
    for rec in records {
        out.heatmap(rec.step, &rec.w)?;
    }
    Ok(())
}
