//! Flat sectioned `key = value` experiment configuration.
//!
//! ```text
//! mode = flow
//! seed = 7
//! output_dir = out/flow
//!
//! [hamiltonian]
//! term.triangle = 1.0
//! term.edge = -0.25
//!
//! [flow]
//! r = 8
//! beta = 0.5
//! ```
//!
//! Keys before the first section header are global. `#` starts a comment.
//! A `[manifest]` section (written by runs) is ignored, so manifests can be
//! fed back in as configs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graphon::SimpleGraph;
use crate::hamiltonian::Hamiltonian;
use crate::metropolis::{ChainConfig, ChainInit};
use crate::sde::DriftModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Metropolis,
    Sde,
    Flow,
    Metrics,
    Sample,
    Oracle,
}

impl Mode {
    pub const ALL: [Mode; 6] = [Mode::Metropolis, Mode::Sde, Mode::Flow, Mode::Metrics, Mode::Sample, Mode::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Metropolis => "metropolis",
            Mode::Sde => "sde",
            Mode::Flow => "flow",
            Mode::Metrics => "metrics",
            Mode::Sample => "sample",
            Mode::Oracle => "oracle",
        }
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Mode::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Mode::ALL.iter().map(|m| m.name()).collect();
            format!("unknown mode '{s}' (expected one of {})", names.join(", "))
        })
    }
}

/// Initial state of a dynamics run.
#[derive(Clone, Debug, PartialEq)]
pub enum InitSpec {
    Constant(f64),
    /// Counts uniform on their range (chain) or entries uniform on `[0, 1]`.
    Uniform,
    /// A kernel in the text format.
    File(PathBuf),
}

impl FromStr for InitSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "uniform" {
            Ok(InitSpec::Uniform)
        } else if let Some(v) = s.strip_prefix("constant:") {
            v.trim().parse().map(InitSpec::Constant).map_err(|_| format!("bad constant '{v}'"))
        } else if let Some(p) = s.strip_prefix("file:") {
            Ok(InitSpec::File(PathBuf::from(p.trim())))
        } else {
            Err(format!("init '{s}' must be uniform, constant:<p> or file:<path>"))
        }
    }
}

impl std::fmt::Display for InitSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitSpec::Constant(p) => write!(f, "constant:{p}"),
            InitSpec::Uniform => write!(f, "uniform"),
            InitSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// `γ_n` as a number or a power of `n`: `0.01`, `1/64`, `0.25/n`, `2/n^0.9`.
#[derive(Clone, Debug, PartialEq)]
pub enum GammaSpec {
    Value(f64),
    OverPower { c: f64, p: f64 },
}

impl GammaSpec {
    pub fn resolve(&self, n: usize) -> f64 {
        match *self {
            GammaSpec::Value(v) => v,
            GammaSpec::OverPower { c, p } => c / (n as f64).powf(p),
        }
    }
}

impl FromStr for GammaSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("gamma_n '{s}' must be a number, a/b, c/n or c/n^p");
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some((num, den)) = t.split_once('/') else {
            return t.parse().map(GammaSpec::Value).map_err(|_| bad());
        };
        let c: f64 = num.parse().map_err(|_| bad())?;
        if den == "n" {
            return Ok(GammaSpec::OverPower { c, p: 1.0 });
        }
        if let Some(p) = den.strip_prefix("n^") {
            return Ok(GammaSpec::OverPower { c, p: p.parse().map_err(|_| bad())? });
        }
        let d: f64 = den.parse().map_err(|_| bad())?;
        Ok(GammaSpec::Value(c / d))
    }
}

impl std::fmt::Display for GammaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GammaSpec::Value(v) => write!(f, "{v}"),
            GammaSpec::OverPower { c, p } if *p == 1.0 => write!(f, "{c}/n"),
            GammaSpec::OverPower { c, p } => write!(f, "{c}/n^{p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    /// `(graph name, coefficient)`
    pub terms: Vec<(String, f64)>,
    pub entropy: f64,
}

impl Default for HamiltonianSpec {
    fn default() -> Self {
        HamiltonianSpec { terms: vec![("triangle".into(), 1.0), ("edge".into(), -0.25)], entropy: 0.0 }
    }
}

impl HamiltonianSpec {
    pub fn build(&self) -> Result<Hamiltonian> {
        let terms = self
            .terms
            .iter()
            .map(|(name, c)| {
                SimpleGraph::by_name(name).map(|g| (*c, g)).ok_or_else(|| Error::Parse(format!("unknown graph '{name}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Hamiltonian::new(terms, self.entropy)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetropolisSpec {
    pub n: usize,
    pub r: usize,
    pub beta: f64,
    pub sigma: f64,
    pub gamma_n: GammaSpec,
    pub iterations: u64,
    pub record_every: u64,
    pub init: InitSpec,
    pub milestones: Vec<u64>,
    pub fast_proposal: bool,
}

impl Default for MetropolisSpec {
    fn default() -> Self {
        MetropolisSpec {
            n: 16,
            r: 4,
            beta: 1.0,
            sigma: 1.0,
            gamma_n: GammaSpec::OverPower { c: 0.25, p: 1.0 },
            iterations: 1000,
            record_every: 100,
            init: InitSpec::Constant(0.5),
            milestones: Vec::new(),
            fast_proposal: false,
        }
    }
}

impl MetropolisSpec {
    /// Chain configuration, loading a kernel init from disk if needed.
    pub fn chain_config(&self, seed: u64) -> Result<ChainConfig> {
        let init = match &self.init {
            InitSpec::Constant(p) => ChainInit::Constant(*p),
            InitSpec::Uniform => ChainInit::Uniform,
            InitSpec::File(p) => ChainInit::Kernel(super::load_kernel(p)?),
        };
        Ok(ChainConfig {
            n: self.n,
            r: self.r,
            beta: self.beta,
            sigma: self.sigma,
            gamma_n: self.gamma_n.resolve(self.n),
            iterations: self.iterations,
            seed,
            record_every: self.record_every,
            milestones: self.milestones.clone(),
            init,
            fast_proposal: self.fast_proposal,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdeSpec {
    pub r: usize,
    pub beta: f64,
    pub sigma: f64,
    pub dt: f64,
    pub horizon_t: f64,
    pub drift: DriftModel,
    pub record_every: u64,
    pub init: InitSpec,
    /// More than one replica writes the entrywise mean path instead.
    pub replicas: usize,
}

impl Default for SdeSpec {
    fn default() -> Self {
        SdeSpec {
            r: 4,
            beta: 1.0,
            sigma: 1.0,
            dt: 1e-3,
            horizon_t: 1.0,
            drift: DriftModel::Gibbs,
            record_every: 100,
            init: InitSpec::Constant(0.5),
            replicas: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowSpec {
    pub r: usize,
    pub beta: f64,
    pub dt: f64,
    pub horizon: f64,
    pub record_every: u64,
    pub init: InitSpec,
    /// Reference minimizer for the rate report; defaults to the terminal state.
    pub w_star: Option<PathBuf>,
}

impl Default for FlowSpec {
    fn default() -> Self {
        FlowSpec { r: 4, beta: 1.0, dt: 1e-3, horizon: 10.0, record_every: 100, init: InitSpec::Constant(0.5), w_star: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputKind {
    Kernel,
    Mvg,
}

impl FromStr for InputKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "kernel" => Ok(InputKind::Kernel),
            "mvg" => Ok(InputKind::Mvg),
            _ => Err(format!("kind '{s}' must be kernel or mvg")),
        }
    }
}

impl std::fmt::Display for InputKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InputKind::Kernel => "kernel",
            InputKind::Mvg => "mvg",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsSpec {
    pub kind: InputKind,
    pub left: Option<PathBuf>,
    pub right: Option<PathBuf>,
    pub net_eps: f64,
}

impl Default for MetricsSpec {
    fn default() -> Self {
        MetricsSpec { kind: InputKind::Kernel, left: None, right: None, net_eps: 0.25 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSpec {
    pub kind: InputKind,
    pub input: Option<PathBuf>,
    pub n: usize,
    /// Sample an exact-count block model (`n` vertices per class) instead.
    pub esbm: bool,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { kind: InputKind::Kernel, input: None, n: 50, esbm: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSpec {
    pub drift_trials: usize,
    pub gaussian_samples: usize,
    pub skorokhod_pairs: usize,
}

impl Default for OracleSpec {
    fn default() -> Self {
        OracleSpec { drift_trials: 20_000, gaussian_samples: 200_000, skorokhod_pairs: 1000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub hamiltonian: HamiltonianSpec,
    pub metropolis: MetropolisSpec,
    pub sde: SdeSpec,
    pub flow: FlowSpec,
    pub metrics: MetricsSpec,
    pub sample: SampleSpec,
    pub oracle: OracleSpec,
    /// Soft-validation messages; not errors.
    pub warnings: Vec<String>,
}

impl ExperimentConfig {
    pub fn new(mode: Mode) -> Self {
        ExperimentConfig {
            mode,
            seed: 0,
            output_dir: PathBuf::from("out"),
            hamiltonian: HamiltonianSpec::default(),
            metropolis: MetropolisSpec::default(),
            sde: SdeSpec::default(),
            flow: FlowSpec::default(),
            metrics: MetricsSpec::default(),
            sample: SampleSpec::default(),
            oracle: OracleSpec::default(),
            warnings: Vec::new(),
        }
    }

    fn uses_hamiltonian(&self) -> bool {
        matches!(self.mode, Mode::Metropolis | Mode::Sde | Mode::Flow)
    }

    /// Canonical text of the configuration with every default filled in.
    /// Parsing it gives back the same configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "mode = {}", self.mode.name());
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "output_dir = {}", self.output_dir.display());
        if self.uses_hamiltonian() {
            let _ = writeln!(s, "\n[hamiltonian]");
            for (name, c) in &self.hamiltonian.terms {
                let _ = writeln!(s, "term.{name} = {c}");
            }
            let _ = writeln!(s, "entropy = {}", self.hamiltonian.entropy);
        }
        let _ = writeln!(s, "\n[{}]", self.mode.name());
        match self.mode {
            Mode::Metropolis => {
                let m = &self.metropolis;
                let ms: Vec<String> = m.milestones.iter().map(|x| x.to_string()).collect();
                let _ = write!(
                    s,
                    "n = {}\nr = {}\nbeta = {}\nsigma = {}\ngamma_n = {}\niterations = {}\nrecord_every = {}\ninit = {}\nmilestones = {}\nfast_proposal = {}\n",
                    m.n, m.r, m.beta, m.sigma, m.gamma_n, m.iterations, m.record_every, m.init, ms.join(","), m.fast_proposal
                );
            }
            Mode::Sde => {
                let m = &self.sde;
                let _ = write!(
                    s,
                    "r = {}\nbeta = {}\nsigma = {}\ndt = {}\nhorizon_t = {}\ndrift = {}\nrecord_every = {}\ninit = {}\nreplicas = {}\n",
                    m.r, m.beta, m.sigma, m.dt, m.horizon_t, m.drift.name(), m.record_every, m.init, m.replicas
                );
            }
            Mode::Flow => {
                let m = &self.flow;
                let _ = write!(
                    s,
                    "r = {}\nbeta = {}\ndt = {}\nhorizon = {}\nrecord_every = {}\ninit = {}\n",
                    m.r, m.beta, m.dt, m.horizon, m.record_every, m.init
                );
                if let Some(p) = &m.w_star {
                    let _ = writeln!(s, "w_star = {}", p.display());
                }
            }
            Mode::Metrics => {
                let m = &self.metrics;
                let _ = writeln!(s, "kind = {}", m.kind);
                for (k, p) in [("left", &m.left), ("right", &m.right)] {
                    if let Some(p) = p {
                        let _ = writeln!(s, "{k} = {}", p.display());
                    }
                }
                let _ = writeln!(s, "net_eps = {}", m.net_eps);
            }
            Mode::Sample => {
                let m = &self.sample;
                let _ = writeln!(s, "kind = {}", m.kind);
                if let Some(p) = &m.input {
                    let _ = writeln!(s, "input = {}", p.display());
                }
                let _ = write!(s, "n = {}\nesbm = {}\n", m.n, m.esbm);
            }
            Mode::Oracle => {
                let m = &self.oracle;
                let _ = write!(
                    s,
                    "drift_trials = {}\ngaussian_samples = {}\nskorokhod_pairs = {}\n",
                    m.drift_trials, m.gaussian_samples, m.skorokhod_pairs
                );
            }
        }
        s
    }
}

const SECTIONS: [&str; 8] = ["", "hamiltonian", "metropolis", "sde", "flow", "metrics", "sample", "oracle"];

struct Reader {
    entries: BTreeMap<(String, String), (String, usize)>,
    used: BTreeSet<(String, String)>,
    errors: Vec<String>,
}

impl Reader {
    fn line(&self, sec: &str, key: &str) -> usize {
        self.entries.get(&(sec.to_string(), key.to_string())).map_or(0, |e| e.1)
    }

    fn raw(&mut self, sec: &str, key: &str) -> Option<(String, usize)> {
        let k = (sec.to_string(), key.to_string());
        let v = self.entries.get(&k).cloned();
        if v.is_some() {
            self.used.insert(k);
        }
        v
    }

    fn get<T: FromStr>(&mut self, sec: &str, key: &str, default: T) -> T
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(sec, key) {
            None => default,
            Some((v, line)) => match v.parse() {
                Ok(x) => x,
                Err(e) => {
                    self.errors.push(format!("line {line}: {}{key}: cannot parse '{v}': {e}", prefix(sec)));
                    default
                }
            },
        }
    }

    fn check(&mut self, ok: bool, sec: &str, key: &str, msg: &str) {
        if !ok {
            let line = self.line(sec, key);
            self.errors.push(format!("line {line}: {}{key}: {msg}", prefix(sec)));
        }
    }
}

fn prefix(sec: &str) -> String {
    if sec.is_empty() {
        String::new()
    } else {
        format!("[{sec}] ")
    }
}

struct Milestones(Vec<u64>);

impl FromStr for Milestones {
    type Err = std::num::ParseIntError;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(str::parse).collect::<std::result::Result<_, _>>().map(Milestones)
    }
}

struct Drift(DriftModel);

impl FromStr for Drift {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DriftModel::parse(s).map(Drift)
    }
}

/// Parses and validates a configuration. Every problem is reported, one
/// per line, with its line number.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut entries = BTreeMap::new();
    let mut errors = Vec::new();
    let mut section = String::new();
    let mut skip = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.split('#').next().unwrap_or("").trim();
        if t.is_empty() {
            continue;
        }
        if let Some(name) = t.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
            let name = name.trim();
            skip = name == "manifest";
            if !skip && !SECTIONS.contains(&name) {
                errors.push(format!("line {line}: unknown section [{name}]"));
            }
            section = name.to_string();
            continue;
        }
        if skip {
            continue;
        }
        let Some((k, v)) = t.split_once('=') else {
            errors.push(format!("line {line}: expected `key = value`"));
            continue;
        };
        let key = (section.clone(), k.trim().to_string());
        if entries.contains_key(&key) {
            errors.push(format!("line {line}: duplicate key '{}'", key.1));
        }
        entries.insert(key, (v.trim().to_string(), line));
    }

    let mut rd = Reader { entries, used: BTreeSet::new(), errors };
    let mode = match rd.raw("", "mode") {
        None => {
            rd.errors.push("line 0: missing required key 'mode'".into());
            Mode::Metropolis
        }
        Some((v, line)) => v.parse().unwrap_or_else(|e| {
            rd.errors.push(format!("line {line}: mode: {e}"));
            Mode::Metropolis
        }),
    };
    let mut cfg = ExperimentConfig::new(mode);
    cfg.seed = rd.get("", "seed", 0u64);
    cfg.output_dir = PathBuf::from(rd.get("", "output_dir", "out".to_string()));

    // hamiltonian
    let mut term_keys: Vec<(usize, String)> = rd
        .entries
        .iter()
        .filter(|((s, k), _)| s == "hamiltonian" && k.starts_with("term."))
        .map(|((_, k), (_, line))| (*line, k.clone()))
        .collect();
    term_keys.sort();
    if !term_keys.is_empty() {
        cfg.hamiltonian.terms.clear();
        for (_, k) in term_keys {
            let name = k.trim_start_matches("term.").to_string();
            let c: f64 = rd.get("hamiltonian", &k, 0.0);
            rd.check(SimpleGraph::by_name(&name).is_some(), "hamiltonian", &k, "unknown graph (edge, path2, triangle, cycle4)");
            cfg.hamiltonian.terms.push((name, c));
        }
    }
    cfg.hamiltonian.entropy = rd.get("hamiltonian", "entropy", 0.0);
    rd.check(cfg.hamiltonian.entropy >= 0.0, "hamiltonian", "entropy", "must be nonnegative");

    // metropolis
    let d = MetropolisSpec::default();
    let s = "metropolis";
    let m = MetropolisSpec {
        n: rd.get(s, "n", d.n),
        r: rd.get(s, "r", d.r),
        beta: rd.get(s, "beta", d.beta),
        sigma: rd.get(s, "sigma", d.sigma),
        gamma_n: rd.get(s, "gamma_n", d.gamma_n),
        iterations: rd.get(s, "iterations", d.iterations),
        record_every: rd.get(s, "record_every", d.record_every),
        init: rd.get(s, "init", d.init),
        milestones: rd.get(s, "milestones", Milestones(vec![])).0,
        fast_proposal: rd.get(s, "fast_proposal", d.fast_proposal),
    };
    rd.check(m.n >= 2, s, "n", "must be at least 2");
    rd.check(m.r >= 1, s, "r", "must be positive");
    rd.check(m.sigma >= 0.0, s, "sigma", "must be nonnegative");
    rd.check(m.record_every >= 1, s, "record_every", "must be positive");
    let gamma = m.gamma_n.resolve(m.n);
    rd.check(gamma > 0.0 && gamma.is_finite(), s, "gamma_n", "must be positive");
    if let InitSpec::Constant(p) = m.init {
        rd.check((0.0..=1.0).contains(&p), s, "init", "constant must lie in [0, 1]");
    }
    cfg.metropolis = m;

    // sde
    let d = SdeSpec::default();
    let s = "sde";
    let m = SdeSpec {
        r: rd.get(s, "r", d.r),
        beta: rd.get(s, "beta", d.beta),
        sigma: rd.get(s, "sigma", d.sigma),
        dt: rd.get(s, "dt", d.dt),
        horizon_t: rd.get(s, "horizon_t", d.horizon_t),
        drift: rd.get(s, "drift", Drift(d.drift)).0,
        record_every: rd.get(s, "record_every", d.record_every),
        init: rd.get(s, "init", d.init),
        replicas: rd.get(s, "replicas", d.replicas),
    };
    rd.check(m.r >= 1, s, "r", "must be positive");
    rd.check(m.dt > 0.0, s, "dt", "must be positive");
    rd.check(m.sigma >= 0.0, s, "sigma", "must be nonnegative");
    rd.check(m.horizon_t >= 0.0, s, "horizon_t", "must be nonnegative");
    rd.check(m.record_every >= 1, s, "record_every", "must be positive");
    rd.check(m.replicas >= 1, s, "replicas", "must be positive");
    cfg.sde = m;

    // flow
    let d = FlowSpec::default();
    let s = "flow";
    let m = FlowSpec {
        r: rd.get(s, "r", d.r),
        beta: rd.get(s, "beta", d.beta),
        dt: rd.get(s, "dt", d.dt),
        horizon: rd.get(s, "horizon", d.horizon),
        record_every: rd.get(s, "record_every", d.record_every),
        init: rd.get(s, "init", d.init),
        w_star: rd.raw(s, "w_star").map(|(v, _)| PathBuf::from(v)),
    };
    rd.check(m.r >= 1, s, "r", "must be positive");
    rd.check(m.dt > 0.0, s, "dt", "must be positive");
    rd.check(m.horizon >= 0.0, s, "horizon", "must be nonnegative");
    rd.check(m.record_every >= 1, s, "record_every", "must be positive");
    cfg.flow = m;

    // metrics
    let s = "metrics";
    let m = MetricsSpec {
        kind: rd.get(s, "kind", InputKind::Kernel),
        left: rd.raw(s, "left").map(|(v, _)| PathBuf::from(v)),
        right: rd.raw(s, "right").map(|(v, _)| PathBuf::from(v)),
        net_eps: rd.get(s, "net_eps", 0.25),
    };
    rd.check(m.net_eps > 0.0 && m.net_eps <= 2.0, s, "net_eps", "must lie in (0, 2]");
    if mode == Mode::Metrics {
        for (k, p) in [("left", &m.left), ("right", &m.right)] {
            match p {
                None => rd.errors.push(format!("line 0: [metrics] missing required key '{k}'")),
                Some(p) => rd.check(p.exists(), s, k, &format!("file {} does not exist", p.display())),
            }
        }
    }
    cfg.metrics = m;

    // sample
    let d = SampleSpec::default();
    let s = "sample";
    let m = SampleSpec {
        kind: rd.get(s, "kind", d.kind),
        input: rd.raw(s, "input").map(|(v, _)| PathBuf::from(v)),
        n: rd.get(s, "n", d.n),
        esbm: rd.get(s, "esbm", d.esbm),
    };
    rd.check(m.n >= 2, s, "n", "must be at least 2");
    if mode == Mode::Sample {
        match &m.input {
            None => rd.errors.push("line 0: [sample] missing required key 'input'".into()),
            Some(p) => rd.check(p.exists(), s, "input", &format!("file {} does not exist", p.display())),
        }
    }
    cfg.sample = m;

    // oracle
    let d = OracleSpec::default();
    let s = "oracle";
    cfg.oracle = OracleSpec {
        drift_trials: rd.get(s, "drift_trials", d.drift_trials),
        gaussian_samples: rd.get(s, "gaussian_samples", d.gaussian_samples),
        skorokhod_pairs: rd.get(s, "skorokhod_pairs", d.skorokhod_pairs),
    };
    rd.check(cfg.oracle.drift_trials >= 2, s, "drift_trials", "must be at least 2");
    rd.check(cfg.oracle.gaussian_samples >= 2, s, "gaussian_samples", "must be at least 2");

    let unused: Vec<(String, usize)> = rd
        .entries
        .iter()
        .filter(|(k, _)| !rd.used.contains(*k) && !k.1.starts_with("term."))
        .map(|((sec, key), (_, line))| (format!("{}{key}", prefix(sec)), *line))
        .collect();
    for (k, line) in unused {
        rd.errors.push(format!("line {line}: unknown key '{k}'"));
    }
    if !rd.errors.is_empty() {
        rd.errors.sort_by_key(|e| e.split(':').next().and_then(|l| l.trim_start_matches("line ").parse::<usize>().ok()));
        return Err(Error::Parse(rd.errors.join("\n")));
    }

    if mode == Mode::Metropolis {
        let chain = ChainConfig {
            n: cfg.metropolis.n,
            r: cfg.metropolis.r,
            gamma_n: cfg.metropolis.gamma_n.resolve(cfg.metropolis.n),
            ..ChainConfig::default()
        };
        cfg.warnings.extend(chain.warnings());
    }
    Ok(cfg)
}

/// The flagship experiment: triangle-free structure emerging from the
/// relaxed Metropolis chain at `n = 16`, `r = 16`.
pub fn mantel_preset() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(Mode::Metropolis);
    cfg.output_dir = PathBuf::from("out/mantel");
    cfg.hamiltonian = HamiltonianSpec::default();
    cfg.metropolis = MetropolisSpec {
        n: 16,
        r: 16,
        beta: 0.25,
        sigma: 1.0,
        gamma_n: GammaSpec::OverPower { c: 0.25, p: 1.0 },
        iterations: 370_000,
        record_every: 1000,
        init: InitSpec::Constant(0.5),
        milestones: vec![0, 350, 930, 20_000, 100_000, 370_000],
        fast_proposal: false,
    };
    cfg
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    match name {
        "mantel" => Ok(mantel_preset()),
        _ => Err(Error::Parse(format!("unknown preset '{name}' (available: mantel)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_flow_config_gets_defaults() {
        let cfg = parse_config("mode = flow\n").unwrap();
        assert_eq!(cfg.mode, Mode::Flow);
        assert_eq!(cfg.flow.dt, 1e-3);
        assert!(cfg.to_text().contains("dt = 0.001"));
    }

    #[test]
    fn missing_mode_is_named() {
        let err = parse_config("seed = 3\n").unwrap_err().to_string();
        assert!(err.contains("mode"), "{err}");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "mode = sde\n\n[sde]\ndt = fast\nbogus = 1\n[nowhere]\n";
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("line 4") && err.contains("dt"), "{err}");
        assert!(err.contains("line 5") && err.contains("bogus"), "{err}");
        assert!(err.contains("line 6") && err.contains("nowhere"), "{err}");
        let err = parse_config("mode = flow\n[flow]\ndt = -1\n").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn gamma_forms() {
        assert_eq!("0.25/n".parse::<GammaSpec>().unwrap().resolve(16), 1.0 / 64.0);
        assert_eq!("1/64".parse::<GammaSpec>().unwrap().resolve(3), 1.0 / 64.0);
        let g = "2/n^0.9".parse::<GammaSpec>().unwrap();
        assert!((g.resolve(10) - 2.0 / 10f64.powf(0.9)).abs() < 1e-15);
        assert!("n/2".parse::<GammaSpec>().is_err());
    }

    #[test]
    fn aggressive_gamma_warns() {
        let cfg = parse_config("mode = metropolis\n[metropolis]\nn = 64\ngamma_n = 0.5\n").unwrap();
        assert!(!cfg.warnings.is_empty());
    }

    #[test]
    fn canonical_text_round_trips() {
        let mut cfg = mantel_preset();
        cfg.seed = 11;
        let back = parse_config(&cfg.to_text()).unwrap();
        assert_eq!(back.to_text(), cfg.to_text());
        assert_eq!(back.metropolis, cfg.metropolis);
        let with_manifest = format!("{}\n[manifest]\nwall_time_s = 3\n", cfg.to_text());
        assert_eq!(parse_config(&with_manifest).unwrap().metropolis, cfg.metropolis);
    }

    #[test]
    fn hamiltonian_terms() {
        let cfg = parse_config("mode = flow\n[hamiltonian]\nterm.cycle4 = 2\nentropy = 0.5\n").unwrap();
        let h = cfg.hamiltonian.build().unwrap();
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.entropy_gamma(), 0.5);
        assert!(parse_config("mode = flow\n[hamiltonian]\nterm.star = 1\n").is_err());
    }
}
