use std::error::Error as StdError;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use toboggan::config::parse_potential;
use toboggan::liouville::{minimal_tau, transform};
use toboggan::potential::PowerLawPotential;
use toboggan::propagate::{wavefunction, Equation, StepControl};
use toboggan::rational::Rational;
use toboggan::riemann_path::{make_half_line, make_straight, make_toboggan, Contour, Edge};
use toboggan::scattering::{
    analytic_amplitudes, numerical_amplitudes, resonance_energies, ScatterProblem, ScatterResult,
};
use toboggan::specfun::{gamma, kummer_m, laguerre, reciprocal_gamma, SeriesControl};
use toboggan::spectrum::{find_eigenvalues, oracle_ptsqm, oracle_tqm, EigenProblem, Quasiparity};
use toboggan::susy::{partners, superpotential, to_power_law, StateDescriptor};
use toboggan::Complex64;

type Result<T> = std::result::Result<T, Box<dyn StdError>>;

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(
    name = "toboggan",
    version,
    about = "Spiked PT-symmetric oscillators on winding complex contours"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a contour. CSV columns: t, modulus, argument, re_x, im_x.
    Contour {
        #[command(flatten)]
        contour: ContourArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Eigenvalues in a window. CSV columns: re_E, im_E, residual, converged, n, quasiparity.
    Spectrum {
        #[command(flatten)]
        potential: PotentialArgs,
        #[command(flatten)]
        contour: ContourArgs,
        /// Real search window `a,b`.
        #[arg(long, value_parser = parse_window, default_value = "0,12")]
        window: (f64, f64),
        #[arg(long)]
        grid_points: Option<usize>,
        #[command(flatten)]
        tolerances: Tolerances,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Decaying solution at a fixed energy, psi(vertex) = 1. CSV columns: t, re_psi, im_psi.
    Wavefunction {
        #[command(flatten)]
        potential: PotentialArgs,
        #[command(flatten)]
        contour: ContourArgs,
        #[arg(long, allow_negative_numbers = true)]
        energy: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        energy_im: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[command(flatten)]
        tolerances: Tolerances,
    },
    /// Power change of variables; prints the target potential config.
    Transform {
        /// Exponent `p/q`; defaults to the smallest admissible one.
        #[arg(long)]
        tau: Option<Rational>,
        #[arg(long)]
        potential: PathBuf,
        #[command(flatten)]
        contour: ContourArgs,
        /// Require a half-integer or integer exponent.
        #[arg(long)]
        canonical: bool,
    },
    /// Backward and forward amplitudes as JSON.
    Scatter {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        energy: f64,
        #[arg(long = "N", default_value_t = 0)]
        winding: u32,
        #[arg(long, value_enum, default_value_t = Branch::Lower)]
        branch: Branch,
        #[arg(long, value_enum, default_value_t = Method::Analytic)]
        method: Method,
        /// Perturbed potential for the numerical method.
        #[arg(long)]
        potential: Option<PathBuf>,
        #[arg(long)]
        extraction_radius: Option<f64>,
        #[command(flatten)]
        tolerances: Tolerances,
    },
    /// Energies at which the amplitudes have poles, one per line.
    Resonances {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long)]
        count: usize,
    },
    /// Partner potentials of an exact state.
    Susy {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum)]
        q: Sign,
    },
    /// Closed-form levels, one per line.
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "ell", required_unless_present = "ell")]
        alpha: Option<f64>,
        /// Half-line levels for integer angular momentum.
        #[arg(long)]
        ell: Option<usize>,
    },
    #[command(hide = true)]
    SpecfunProbe {
        #[arg(long, value_enum)]
        function: Special,
        /// `re` or `re,im`.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
        #[arg(long, value_parser = parse_complex, default_value = "0", allow_hyphen_values = true)]
        a: Complex64,
        #[arg(long, value_parser = parse_complex, default_value = "1", allow_hyphen_values = true)]
        b: Complex64,
        #[arg(long, default_value_t = 0)]
        degree: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Branch {
    Lower,
    Upper,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Analytic,
    Numerical,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sign {
    Plus,
    Minus,
}

#[derive(Clone, Copy, ValueEnum)]
enum Special {
    Gamma,
    ReciprocalGamma,
    Kummer,
    Laguerre,
}

#[derive(Args)]
struct ContourArgs {
    /// Number of turns around the branch point.
    #[arg(long = "contour-N", default_value_t = 0)]
    winding: u32,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 8.0)]
    r_max: f64,
    #[arg(long, default_value_t = 512)]
    samples_per_turn: usize,
    /// Positive half-line from this radius instead of a complex contour.
    #[arg(long, value_name = "X_MIN", conflicts_with_all = ["winding", "eps"])]
    half_line: Option<f64>,
}

impl ContourArgs {
    fn build(&self) -> Result<Contour> {
        let n = self.samples_per_turn / 2 + 1;
        Ok(match (self.half_line, self.winding) {
            (Some(x_min), _) => make_half_line(x_min, self.r_max, n)?,
            (None, 0) => make_straight(self.eps, self.r_max, n)?,
            (None, w) => make_toboggan(w, self.eps, self.r_max, self.samples_per_turn)?,
        })
    }
}

#[derive(Args)]
struct PotentialArgs {
    /// Potential config file.
    #[arg(long, required_unless_present = "alpha")]
    potential: Option<PathBuf>,
    /// Plain spiked oscillator with this `alpha`.
    #[arg(long, conflicts_with = "potential")]
    alpha: Option<f64>,
}

impl PotentialArgs {
    fn load(&self) -> Result<PowerLawPotential> {
        match (&self.potential, self.alpha) {
            (Some(path), _) => read_potential(path),
            (None, Some(a)) => Ok(PowerLawPotential::from_alpha(a)),
            (None, None) => Err("either --potential or --alpha is required".into()),
        }
    }
}

#[derive(Args)]
struct Tolerances {
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Energy tolerance of the root refinement.
    #[arg(long)]
    refine_tol: Option<f64>,
}

impl Tolerances {
    fn step_control(&self) -> StepControl {
        let mut ctl = StepControl::default();
        if let Some(a) = self.abs_tol {
            ctl.absolute_tolerance = a;
        }
        if let Some(r) = self.rel_tol {
            ctl.relative_tolerance = r;
        }
        ctl
    }
}

fn read_potential(path: &PathBuf) -> Result<PowerLawPotential> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_potential(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn parse_window(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `a,b`")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(format!("`{s}` is not an interval"));
    }
    Ok((a, b))
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let mut parts = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")));
    let re = parts.next().ok_or("empty value")??;
    let im = parts.next().transpose()?.unwrap_or(0.0);
    if parts.next().is_some() {
        return Err("expected `re` or `re,im`".into());
    }
    Ok(Complex64::new(re, im))
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), json!(SCHEMA));
    }
    v
}

fn print_json(out: &mut String, v: Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(&with_schema(v))?)?;
    Ok(())
}

/// Everything converged.
const OK: u8 = 0;
/// Output written but some result is flagged.
const FLAGGED: u8 = 2;

fn run(cli: Cli, out: &mut String) -> Result<u8> {
    match cli.command {
        Command::Contour { contour, format } => {
            let c = contour.build()?;
            match format {
                Format::Csv => out.push_str(&c.to_csv()),
                Format::Json => print_json(out, c.to_json())?,
            }
            Ok(OK)
        }
        Command::Spectrum {
            potential,
            contour,
            window,
            grid_points,
            tolerances,
            format,
        } => {
            let mut prob = EigenProblem::new(potential.load()?, contour.build()?, window);
            prob.step_control = tolerances.step_control();
            if let Some(g) = grid_points {
                prob.grid_points = g;
            }
            if let Some(t) = tolerances.refine_tol {
                prob.refine_tolerance = t;
            }
            let results = if window.0 == window.1 {
                Vec::new()
            } else {
                find_eigenvalues(&prob)?
            };
            let unconverged = results.iter().filter(|r| !r.converged).count();
            match format {
                Format::Csv => {
                    out.push_str("re_E,im_E,residual,converged,n,quasiparity\n");
                    for r in &results {
                        let (n, q) = match &r.labels {
                            Some(l) => (l.n.to_string(), quasiparity_name(l.quasiparity).to_string()),
                            None => (String::new(), String::new()),
                        };
                        writeln!(
                            out,
                            "{},{},{},{},{n},{q}",
                            num(r.energy.re),
                            num(r.energy.im),
                            num(r.residual),
                            r.converged
                        )?;
                    }
                }
                Format::Json => print_json(
                    out,
                    json!({
                        "window": [window.0, window.1],
                        "winding": prob.contour.winding,
                        "levels": results.iter().map(|r| json!({
                            "energy": complex_json(r.energy),
                            "residual": r.residual,
                            "converged": r.converged,
                            "labels": r.labels.as_ref().map(|l| json!({"n": l.n, "quasiparity": quasiparity_name(l.quasiparity)})),
                        })).collect::<Vec<_>>(),
                    }),
                )?,
            }
            if unconverged > 0 {
                eprintln!("{unconverged} level(s) did not converge");
                return Ok(FLAGGED);
            }
            Ok(OK)
        }
        Command::Wavefunction {
            potential,
            contour,
            energy,
            energy_im,
            points,
            tolerances,
        } => {
            if points < 2 {
                return Err("--points must be at least 2".into());
            }
            let v = potential.load()?;
            let c = contour.build()?;
            let eq = Equation::new(&v, Complex64::new(energy, energy_im));
            let ts: Vec<f64> = (0..points)
                .map(|i| c.t_in + (c.t_out - c.t_in) * i as f64 / (points - 1) as f64)
                .collect();
            let samples = wavefunction(&eq, &c, &ts, &tolerances.step_control())?;
            out.push_str("t,re_psi,im_psi\n");
            for (t, psi) in samples {
                writeln!(out, "{},{},{}", num(t), num(psi.re), num(psi.im))?;
            }
            Ok(OK)
        }
        Command::Transform {
            tau,
            potential,
            contour,
            canonical,
        } => {
            let v = read_potential(&potential)?;
            let tau = tau.unwrap_or_else(|| minimal_tau(&v));
            if canonical && tau.denominator() > 2 {
                return Err(format!("--canonical needs an integer or half-integer tau, got {tau}").into());
            }
            let prob = EigenProblem::new(v, contour.build()?, (0.0, 1.0));
            let (_, map) = transform(&prob, tau)?;
            writeln!(out, "# tau = {tau}")?;
            writeln!(
                out,
                "# winding N = {} -> N' = {}",
                map.source_winding, map.target_winding
            )?;
            writeln!(
                out,
                "# energy slot: coupling of (i y)^({}) is -tau^2 E",
                map.energy_slot
            )?;
            if let Some(l) = map.target_l {
                writeln!(out, "# target L = {}", num(l))?;
            }
            writeln!(out, "# target centrifugal = {}", num(map.target_centrifugal))?;
            writeln!(
                out,
                "# target energy = {} (from the source coupling of (i x)^({}))",
                num(map.target_energy),
                map.inverse_energy_source
            )?;
            writeln!(out, "# canonical = {}", map.canonical)?;
            out.push_str(&map.target_potential.to_config());
            if canonical && !map.canonical {
                eprintln!("target exponents are not all even integers");
                return Ok(FLAGGED);
            }
            Ok(OK)
        }
        Command::Scatter {
            alpha,
            energy,
            winding,
            branch,
            method,
            potential,
            extraction_radius,
            tolerances,
        } => {
            let edge = match branch {
                Branch::Lower => Edge::LowerEdge,
                Branch::Upper => Edge::UpperEdge,
            };
            let mut prob = ScatterProblem::new(alpha, energy, winding, edge);
            if let Some(r) = extraction_radius {
                prob.extraction_radius = r;
            }
            let res = match (method, &potential) {
                (Method::Analytic, Some(_)) => return Err("--potential needs --method numerical".into()),
                (Method::Analytic, None) => analytic_amplitudes(&prob)?,
                (Method::Numerical, p) => {
                    let v = match p {
                        Some(path) => read_potential(path)?,
                        None => PowerLawPotential::from_alpha(alpha),
                    };
                    numerical_amplitudes(&v, &prob, &tolerances.step_control())?
                }
            };
            print_json(
                out,
                json!({
                    "alpha": alpha,
                    "energy": energy,
                    "N": winding,
                    "branch": match branch { Branch::Lower => "lower", Branch::Upper => "upper" },
                    "method": match method { Method::Analytic => "analytic", Method::Numerical => "numerical" },
                    "backward": complex_json(res.backward),
                    "forward": complex_json(res.forward),
                    "conditioning": res.conditioning,
                    "series_error": res.series_error,
                    "resonance": res.resonance,
                    "resonance_proximity": res.resonance_proximity,
                    "trusted": res.trusted,
                    "flags": res.flags,
                }),
            )?;
            Ok(scatter_status(&res))
        }
        Command::Resonances { alpha, count } => {
            for e in resonance_energies(alpha, count) {
                writeln!(out, "{}", num(e))?;
            }
            Ok(OK)
        }
        Command::Susy { n, alpha, q } => {
            let state = StateDescriptor {
                n,
                alpha,
                quasiparity: match q {
                    Sign::Plus => Quasiparity::Plus,
                    Sign::Minus => Quasiparity::Minus,
                },
            };
            let w = superpotential(&state)?;
            let (plus, minus) = partners(&w);
            writeln!(out, "# W = {w}")?;
            writeln!(out, "# V+ = {plus}")?;
            writeln!(out, "# V- = {minus}")?;
            match to_power_law(&plus) {
                Ok(d) => {
                    writeln!(out, "# V+ = V + ({}) with V below", num(d.energy_offset))?;
                    out.push_str(&d.potential.to_config());
                    Ok(OK)
                }
                Err(e) => {
                    eprintln!("V+ has no power-law form: {e}");
                    Ok(FLAGGED)
                }
            }
        }
        Command::Oracle { n, alpha, ell } => {
            match (alpha, ell) {
                (_, Some(l)) => writeln!(out, "{}", num(oracle_tqm(n, l)))?,
                (Some(a), None) => {
                    for q in [Quasiparity::Minus, Quasiparity::Plus] {
                        writeln!(out, "{}", num(oracle_ptsqm(n, a, q)))?;
                    }
                }
                (None, None) => return Err("either --alpha or --ell is required".into()),
            }
            Ok(OK)
        }
        Command::SpecfunProbe {
            function,
            z,
            a,
            b,
            degree,
        } => {
            let value = match function {
                Special::Gamma => gamma(z)?,
                Special::ReciprocalGamma => reciprocal_gamma(z),
                Special::Kummer => kummer_m(a, b, z, &SeriesControl::default())?,
                Special::Laguerre => laguerre(degree, a.re, z),
            };
            writeln!(out, "{},{}", num(value.re), num(value.im))?;
            Ok(OK)
        }
    }
}

fn scatter_status(res: &ScatterResult) -> u8 {
    if res.trusted && !res.resonance {
        OK
    } else {
        for f in &res.flags {
            eprintln!("{f}");
        }
        FLAGGED
    }
}

fn quasiparity_name(q: Quasiparity) -> &'static str {
    match q {
        Quasiparity::Plus => "plus",
        Quasiparity::Minus => "minus",
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(raw) = std::env::var("TOBOGGAN_THREADS") {
        let n: usize = raw
            .trim()
            .parse()
            .map_err(|_| format!("TOBOGGAN_THREADS must be a positive integer, got `{raw}`"))?;
        if n == 0 {
            return Err("TOBOGGAN_THREADS must be at least 1".into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut out = String::new();
    let status = configure_threads().and_then(|_| run(cli, &mut out));
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match status {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
