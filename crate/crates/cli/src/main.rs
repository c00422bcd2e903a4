use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treeheat::asymptotics::{ladder, LadderRow, Path, PredictionKind, Regime};
use treeheat::caloric::{
    convergence_diagnostic, mass_function, parse_tree_input, parse_z_input, solve, z_diagnostic, MassChoice, MassKind,
};
use treeheat::heat_tree::{
    certified_profile, heat_tree_quadrature, region_mass, CriticalRegion, HeatProfile, RadiusRule, RadiusRules,
};
use treeheat::special_fn::{envelope_f, ZKernelTable};
use treeheat::spectral::{c_function, gamma, spherical_fn_table, spherical_transform};
use treeheat::tree_geom::{FiniteFn, TreeParams, Vertex};

/// Heat kernels and caloric functions on homogeneous trees.
#[derive(Debug, Parser)]
#[command(name = "treeheat", version)]
struct Cli {
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// The heat kernel on Z, e^{-t} I_j(t), with the envelope and tail bound.
    KernelZ {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 40)]
        jmax: usize,
    },
    /// h_t(n) on the tree by series and/or spectral quadrature.
    KernelTree {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 40)]
        nmax: usize,
        #[arg(long, value_enum, default_value_t = KernelMethod::Series)]
        method: KernelMethod,
    },
    /// Spherical functions phi_lambda(n).
    Spherical {
        #[arg(long)]
        q: u32,
        #[arg(long, allow_hyphen_values = true)]
        lambda_re: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        lambda_im: f64,
        #[arg(long, default_value_t = 20)]
        nmax: usize,
    },
    /// Spherical transform of radial data at one lambda.
    Transform {
        #[arg(long)]
        q: u32,
        /// JSON input ({"radial": [...]} or radial entries).
        #[arg(long)]
        f: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lambda_re: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        lambda_im: f64,
    },
    /// h_t along a path n(t) against an asymptotic formula.
    Asymptotics {
        #[arg(long)]
        q: u32,
        #[arg(long, value_enum)]
        regime: RegimeArg,
        /// Speed for the ballistic path n = floor(c0 t).
        #[arg(long, default_value_t = 0.3)]
        c0: f64,
        /// Exponent for the diffusive path n = floor(t^alpha).
        #[arg(long, default_value_t = 0.7)]
        alpha: f64,
        #[command(flatten)]
        ladder: Ladder,
    },
    /// Share of ||h_t||_p^p inside the critical region.
    Concentrate {
        #[arg(long)]
        q: u32,
        #[arg(long, value_parser = parse_p)]
        p: f64,
        #[command(flatten)]
        ladder: Ladder,
        #[command(flatten)]
        rules: Rules,
    },
    /// ||u - M_p(f) h_t||_p / ||h_t||_p for tree data.
    Converge {
        #[arg(long)]
        q: u32,
        #[arg(long, value_parser = parse_p)]
        p: f64,
        #[arg(long)]
        f: PathBuf,
        /// theorem | boundary | phi0 | constant:<m>
        #[arg(long, default_value = "theorem", value_parser = parse_mass)]
        mass: MassArg,
        #[command(flatten)]
        ladder: Ladder,
        #[command(flatten)]
        rules: Rules,
    },
    /// ||u - M h^Z_t||_p / ||h^Z_t||_p with M = sum f.
    ConvergeZ {
        #[arg(long, value_parser = parse_p)]
        p: f64,
        #[arg(long)]
        f: PathBuf,
        #[command(flatten)]
        ladder: Ladder,
    },
    /// Quick invariant suite; exit 0 iff every check passes.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelMethod {
    Series,
    Quadrature,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RegimeArg {
    Ballistic,
    Diffusive,
    PathLocal,
    NearOrigin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum MassArg {
    Theorem,
    Kind(MassKind),
}

#[derive(Debug, Clone, Args)]
struct Ladder {
    /// Comma-separated times, e.g. 100,300,1000.
    #[arg(long = "t", value_delimiter = ',', conflicts_with = "t_grid")]
    t: Vec<f64>,
    /// Geometric grid start:factor:count, e.g. 250:2:4.
    #[arg(long, value_parser = parse_grid)]
    t_grid: Option<Grid>,
}

/// A parsed geometric time grid.
#[derive(Debug, Clone, PartialEq)]
struct Grid(Vec<f64>);

#[derive(Debug, Clone, Args)]
struct Rules {
    /// p < 2 half-width exponent a in t^a.
    #[arg(long, default_value_t = 0.75)]
    r_exp: f64,
    /// p = 2 inner radius exponent a in (ln t)^a.
    #[arg(long, default_value_t = 1.1)]
    r1_exp: f64,
    /// p = 2 outer radius exponent a in t^a.
    #[arg(long, default_value_t = 0.75)]
    r2_exp: f64,
    /// p > 2 outer radius exponent a in (ln t)^a.
    #[arg(long, default_value_t = 2.0)]
    r3_exp: f64,
}

impl Rules {
    fn build(&self) -> RadiusRules {
        RadiusRules {
            r: RadiusRule::Power(self.r_exp),
            r1: RadiusRule::LogPower(self.r1_exp),
            r2: RadiusRule::Power(self.r2_exp),
            r3: RadiusRule::LogPower(self.r3_exp),
        }
    }
}

fn parse_p(s: &str) -> std::result::Result<f64, String> {
    let p = match s {
        "inf" | "infinity" => f64::INFINITY,
        _ => s.parse::<f64>().map_err(|e| e.to_string())?,
    };
    if p >= 1.0 {
        Ok(p)
    } else {
        Err(format!("p must lie in [1, inf], got {s}"))
    }
}

fn parse_mass(s: &str) -> std::result::Result<MassArg, String> {
    match s {
        "theorem" => Ok(MassArg::Theorem),
        "boundary" => Ok(MassArg::Kind(MassKind::Boundary)),
        "phi0" => Ok(MassArg::Kind(MassKind::Phi0)),
        _ => match s.strip_prefix("constant:") {
            Some(m) => m.parse::<f64>().map(|m| MassArg::Kind(MassKind::Constant(m))).map_err(|e| e.to_string()),
            None => Err(format!("unknown mass '{s}'")),
        },
    }
}

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, factor, count] = parts.as_slice() else {
        return Err("expected start:factor:count".into());
    };
    let start: f64 = start.parse().map_err(|e| format!("start: {e}"))?;
    let factor: f64 = factor.parse().map_err(|e| format!("factor: {e}"))?;
    let count: usize = count.parse().map_err(|e| format!("count: {e}"))?;
    if !(start > 0.0) || !(factor > 1.0) || count == 0 {
        return Err("need start > 0, factor > 1, count >= 1".into());
    }
    Ok(Grid((0..count).map(|k| start * factor.powi(k as i32)).collect()))
}

impl Ladder {
    fn times(&self) -> Result<Vec<f64>, Failure> {
        let ts = self.t_grid.clone().map_or_else(|| self.t.clone(), |g| g.0);
        if ts.is_empty() {
            return Err(Failure::Validation("give --t or --t-grid".into()));
        }
        if ts.iter().any(|t| !(*t > 0.0) || !t.is_finite()) || ts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Failure::Validation("times must be finite, positive and increasing".into()));
        }
        Ok(ts)
    }
}

/// Outcome classes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Validation(String),
    Certification(String),
    Selftest(usize),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "invalid input: {m}"),
            Failure::Certification(m) => write!(f, "certification failed: {m}"),
            Failure::Selftest(n) => write!(f, "{n} selftest check(s) failed"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<treeheat::Error> for Failure {
    fn from(e: treeheat::Error) -> Self {
        match e {
            treeheat::Error::Certification(_) | treeheat::Error::Quadrature { .. } => {
                Failure::Certification(e.to_string())
            }
            _ => Failure::Validation(e.to_string()),
        }
    }
}

fn tree(q: u32) -> Result<TreeParams, Failure> {
    Ok(TreeParams::new(q)?)
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV sink with a `#` provenance header.
struct Sink {
    out: csv::Writer<Box<dyn Write>>,
}

impl Sink {
    fn open(cli: &Cli) -> Result<Self> {
        let mut raw: Box<dyn Write> = match &cli.output {
            Some(p) => Box::new(io::BufWriter::new(
                fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
            None => Box::new(io::BufWriter::new(io::stdout())),
        };
        writeln!(raw, "# treeheat {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(raw, "# seed: {}", cli.seed)?;
        writeln!(raw, "# config: {:?}", cli.command)?;
        Ok(Self { out: csv::Writer::from_writer(raw) })
    }

    fn row<I: IntoIterator<Item = S>, S: AsRef<[u8]>>(&mut self, fields: I) -> Result<()> {
        self.out.write_record(fields)?;
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Selftest => return selftest(cli.seed),
        cmd => validate(cmd)?,
    }
    let mut sink = Sink::open(cli)?;
    let mut uncertified = Vec::new();
    match &cli.command {
        Command::KernelZ { t, jmax } => {
            let z = ZKernelTable::new(*t, *jmax + 2).map_err(Failure::from)?;
            sink.row(["j", "t", "h", "ln_h", "envelope", "tail_bound"])?;
            for j in 0..=*jmax {
                let env = envelope_f(j as i64, *t).map_err(Failure::from)?;
                let tail = z.tail_bound(j).to_real();
                sink.row([j.to_string(), num(*t), num(z.value(j as i64).to_real()), num(z.ln_value(j as i64)), num(env), num(tail)])?;
            }
        }
        Command::KernelTree { q, t, nmax, method } => {
            let tp = tree(*q)?;
            let prof = HeatProfile::new(&tp, *t, *nmax).map_err(Failure::from)?;
            let mut header = vec!["n", "t"];
            if *method != KernelMethod::Quadrature {
                header.extend(["ln_h_series", "bound_series"]);
            }
            if *method != KernelMethod::Series {
                header.extend(["ln_h_quadrature", "bound_quadrature"]);
            }
            if *method == KernelMethod::Both {
                header.extend(["rel_gap", "agree"]);
            }
            sink.row(&header)?;
            for n in 0..=*nmax {
                let mut rec = vec![n.to_string(), num(*t)];
                let s = prof.eval(n);
                if *method != KernelMethod::Quadrature {
                    rec.extend([num(s.value.ln_abs()), num(s.rel_bound)]);
                }
                if *method != KernelMethod::Series {
                    let qd = heat_tree_quadrature(&tp, n, *t, 1e-12).map_err(Failure::from)?;
                    rec.extend([num(qd.value.ln_abs()), num(qd.rel_bound)]);
                    if *method == KernelMethod::Both {
                        let gap = (qd.value.ln_abs() - s.value.ln_abs()).exp_m1().abs();
                        let ok = gap <= s.rel_bound + qd.rel_bound + 1e-12;
                        if !ok {
                            uncertified.push(format!("n = {n}: series and quadrature differ by {gap:e}"));
                        }
                        rec.extend([num(gap), ok.to_string()]);
                    }
                }
                sink.row(&rec)?;
            }
        }
        Command::Spherical { q, lambda_re, lambda_im, nmax } => {
            let tp = tree(*q)?;
            let phi = spherical_fn_table(&tp, Complex::new(*lambda_re, *lambda_im), *nmax);
            sink.row(["n", "re", "im"])?;
            for (n, v) in phi.iter().enumerate() {
                sink.row([n.to_string(), num(v.re), num(v.im)])?;
            }
        }
        Command::Transform { q, f, lambda_re, lambda_im } => {
            let tp = tree(*q)?;
            let data = parse_tree_input(&read_input(f)?, Some(*q)).map_err(Failure::from)?;
            let radial = data.as_radial().ok_or_else(|| Failure::Validation("transform needs radial data".into()))?;
            let v = spherical_transform(&tp, &radial, Complex::new(*lambda_re, *lambda_im));
            sink.row(["lambda_re", "lambda_im", "re", "im"])?;
            sink.row([num(*lambda_re), num(*lambda_im), num(v.re), num(v.im)])?;
        }
        Command::Asymptotics { q, regime, c0, alpha, ladder: lad } => {
            let tp = tree(*q)?;
            let ts = lad.times()?;
            let (path, kind) = match regime {
                RegimeArg::Ballistic => (Path::Linear(*c0), PredictionKind::Theorem(Regime::Ballistic { c0: *c0 })),
                RegimeArg::Diffusive => (Path::Power(*alpha), PredictionKind::Theorem(Regime::Diffusive)),
                RegimeArg::PathLocal => (Path::Power(*alpha), PredictionKind::PathLocal),
                RegimeArg::NearOrigin => (Path::Fixed(0), PredictionKind::NearOrigin),
            };
            let rows: Vec<LadderRow> = ladder(&tp, path, kind, &ts).map_err(Failure::from)?;
            sink.row(["t", "n", "ln_empirical", "ln_predicted", "ratio", "deviation", "C", "rel_bound"])?;
            for r in rows {
                sink.row([
                    num(r.t),
                    r.n.to_string(),
                    num(r.ln_empirical),
                    num(r.ln_predicted),
                    num(r.ratio()),
                    num(r.deviation()),
                    num(r.c),
                    num(r.rel_bound),
                ])?;
            }
        }
        Command::Concentrate { q, p, ladder: lad, rules } => {
            let tp = tree(*q)?;
            let rules = rules.build();
            sink.row(["t", "inner", "outer", "inside", "complement", "tail_bound"])?;
            for t in lad.times()? {
                let prof = certified_profile(&tp, t, *p, 1e-13).map_err(Failure::from)?;
                let region = CriticalRegion::new(&tp, *p, t, &rules);
                let m = region_mass(&prof, &region).map_err(Failure::from)?;
                sink.row([num(t), num(region.inner), num(region.outer), num(m.inside), num(m.complement), num(m.tail_bound)])?;
            }
        }
        Command::Converge { q, p, f, mass, ladder: lad, rules } => {
            let tp = tree(*q)?;
            let data = parse_tree_input(&read_input(f)?, Some(*q)).map_err(Failure::from)?;
            let choice = match mass {
                MassArg::Theorem => MassChoice::Theorem,
                MassArg::Kind(k) => MassChoice::Kind(*k),
            };
            let rows = convergence_diagnostic(&tp, &data, *p, &lad.times()?, choice, &rules.build()).map_err(Failure::from)?;
            sink.row(["t", "E", "E_critical", "E_complement", "mass_sup", "tail_bound", "u_complement", "E_dual", "certified"])?;
            for r in rows {
                if !r.certified {
                    uncertified.push(format!("t = {}: tail bound {:e}", r.t, r.tail_bound));
                }
                sink.row([
                    num(r.t),
                    num(r.e),
                    num(r.e_critical),
                    num(r.e_complement),
                    num(r.mass_sup),
                    num(r.tail_bound),
                    num(r.u_complement),
                    r.e_dual.map(num).unwrap_or_default(),
                    r.certified.to_string(),
                ])?;
            }
        }
        Command::ConvergeZ { p, f, ladder: lad } => {
            let data = parse_z_input(&read_input(f)?).map_err(Failure::from)?;
            let rows = z_diagnostic(&data, *p, &lad.times()?).map_err(Failure::from)?;
            sink.row(["t", "E", "mass", "u_rel", "tail_bound", "certified"])?;
            for r in rows {
                if !r.certified {
                    uncertified.push(format!("t = {}: tail bound {:e}", r.t, r.tail_bound));
                }
                sink.row([num(r.t), num(r.e), num(r.mass), num(r.u_rel), num(r.tail_bound), r.certified.to_string()])?;
            }
        }
        Command::Selftest => unreachable!(),
    }
    sink.finish()?;
    if !uncertified.is_empty() {
        return Err(Failure::Certification(uncertified.join("; ")).into());
    }
    Ok(())
}

fn validate(cmd: &Command) -> Result<(), Failure> {
    let time = |t: f64| {
        if t >= 0.0 && t.is_finite() {
            Ok(())
        } else {
            Err(Failure::Validation(format!("t must be finite and >= 0, got {t}")))
        }
    };
    match cmd {
        Command::KernelTree { q, .. }
        | Command::Spherical { q, .. }
        | Command::Transform { q, .. }
        | Command::Asymptotics { q, .. }
        | Command::Concentrate { q, .. }
        | Command::Converge { q, .. } => {
            tree(*q)?;
        }
        _ => {}
    }
    match cmd {
        Command::KernelZ { t, .. } | Command::KernelTree { t, .. } => time(*t),
        Command::Asymptotics { c0, alpha, .. } => {
            if *c0 > 0.0 && *alpha > 0.0 && *alpha < 1.0 {
                Ok(())
            } else {
                Err(Failure::Validation("need c0 > 0 and 0 < alpha < 1".into()))
            }
        }
        _ => Ok(()),
    }
}

struct Check {
    failed: usize,
}

impl Check {
    fn report(&mut self, name: &str, ok: bool, detail: String) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed += 1;
        }
    }
}

fn selftest(seed: u64) -> Result<()> {
    let mut c = Check { failed: 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut worst = 0.0f64;
    for q in [2, 3, 4] {
        let tp = tree(q)?;
        for t in [0.1, 1.0, 10.0, 100.0] {
            let prof = certified_profile(&tp, t, 1.0, 1e-13)?;
            let total: f64 = (0..=prof.nmax())
                .map(|n| (tp.ln_sphere_volume::<f64>(n) + prof.ln_value(n)).exp())
                .sum();
            worst = worst.max((total - 1.0).abs());
        }
    }
    c.report("conservation", worst < 1e-9, format!("max |sum - 1| = {worst:.2e}"));

    let tp = tree(2)?;
    let mut worst = 0.0f64;
    for t in [1.0, 10.0] {
        let prof = HeatProfile::new(&tp, t, 20)?;
        for n in (0..=20).step_by(5) {
            let qd = heat_tree_quadrature::<f64>(&tp, n, t, 1e-12)?;
            worst = worst.max((qd.value.ln_abs() - prof.ln_value(n) as f64).exp_m1().abs());
        }
    }
    c.report("series vs quadrature", worst < 1e-9, format!("max rel gap = {worst:.2e}"));

    let mut worst = 0.0f64;
    for _ in 0..20 {
        let z = Complex::new(rng.gen_range(0.05..4.0), rng.gen_range(-0.4..0.4));
        let s = c_function(&tp, z)? + c_function(&tp, -z)?;
        worst = worst.max((s - 1.0).norm());
    }
    c.report("c(z) + c(-z) = 1", worst < 1e-10, format!("max error = {worst:.2e}"));

    let mut worst = 0.0f64;
    for _ in 0..20 {
        let lam = Complex::new(rng.gen_range(0.0..4.0), rng.gen_range(-1.0..1.0));
        let phi = spherical_fn_table(&tp, lam, 9);
        let g = gamma(&tp, lam);
        let qf = 2.0;
        worst = worst.max((phi[1] - g * phi[0]).norm());
        for n in 1..8 {
            let mean = (phi[n + 1] * qf + phi[n - 1]) / (qf + 1.0);
            worst = worst.max((mean - g * phi[n]).norm() / phi[n].norm().max(1e-300));
        }
    }
    c.report("spherical eigenrelation", worst < 1e-10, format!("max rel error = {worst:.2e}"));

    let mut f = FiniteFn::new(2);
    for s in ["", "0.1", "2", "1.0.1"] {
        f.add(Vertex::parse(s, 2)?, rng.gen_range(-1.0..1.0));
    }
    let sol = solve(&tp, &f, 20.0, 200)?;
    let gap = (sol.total() - f.sum()).abs();
    c.report("caloric mass conservation", gap < 1e-9, format!("|sum u - sum f| = {gap:.2e}"));

    let root = FiniteFn::delta(2, Vertex::root());
    let mut worst = 0.0f64;
    for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
        let m = mass_function(&tp, &root, p)?;
        for g in 0..m.gate_values.len() {
            worst = worst.max((m.exterior(&tp, g, 7) - 1.0).abs());
        }
    }
    c.report("M_p(delta_o) = 1", worst < 1e-13, format!("max error = {worst:.2e}"));

    if c.failed > 0 {
        return Err(Failure::Selftest(c.failed).into());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("TREEHEAT_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: TREEHEAT_THREADS must be a positive integer, got '{v}'");
                return ExitCode::from(2);
            }
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Failure>() {
                Some(Failure::Validation(_)) => ExitCode::from(2),
                Some(Failure::Certification(_)) => ExitCode::from(3),
                Some(Failure::Selftest(_)) => ExitCode::from(1),
                None => match e.downcast_ref::<treeheat::Error>() {
                    Some(te) => match Failure::from(te.clone()) {
                        Failure::Certification(_) => ExitCode::from(3),
                        _ => ExitCode::from(2),
                    },
                    None => ExitCode::from(1),
                },
            }
        }
    }
}
