//! totlab command-line surface. Every subcommand emits a self-describing
//! envelope (JSON by default, CSV with --format csv) with deterministic
//! byte-for-byte output for identical inputs.
//!
//! Config precedence: flags > TOTLAB_* environment variables > defaults.
//! Exit codes: 0 success, 2 argument/domain error, 3 capacity/precision error.

mod envelope;

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num::complex::Complex64;

use totlab::analytic::{r_value, zeta_real, l_chi1};
use totlab::arith::Constants;
use totlab::counting::{bateman_count, c_k, count_phi_ratio, RegimeConfig};
use totlab::error::Error;
use totlab::rational::{parse_rational, rational_to_string};
use totlab::totient::{phi_k, phi_k_brute, phi_k_range, TotientParams};
use totlab::verify::{
    minimal_constant, perron_count_estimate, perron_kernel_check, verify_distribution,
    verify_extremal, verify_mertens, PerronMode,
};

use envelope::{fmt_real, Cell, Envelope, Format};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WhichConstant {
    #[value(alias = "R")]
    R,
    Zeta,
    #[value(alias = "Lchi1")]
    Lchi1,
    Minimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PerronCliMode {
    Kernel,
    Count,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CountMethod {
    ExactA,
    ResidueR,
}

#[derive(Parser, Debug)]
#[command(name = "totlab", version, about = "Generalized totients, their value distribution, and the Euler products behind them")]
struct Cli {
    /// Output format (env TOTLAB_FORMAT)
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads; output is independent of this (env TOTLAB_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the threshold constant kappa (env TOTLAB_KAPPA)
    #[arg(long, global = true)]
    kappa: Option<f64>,
    /// Override the threshold epsilon (env TOTLAB_EPSILON)
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate Phi_k(n) exactly (add --brute for the tuple-enumeration route)
    Phi {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        brute: bool,
    },
    /// Stream ln(Phi_k(n)/n^k) for n = 1..=x into a file
    Range {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Count n <= x with Phi_k(n)/n^beta <= y (beta, y exact rationals)
    Count {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        y: String,
    },
    /// Empirical CDF of Phi_k(n)/n^k at comma-separated grid points
    Cdf {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        grid: String,
    },
    /// Evaluate a named constant: R (Euler product), zeta, Lchi1, minimal
    Constant {
        #[arg(long, value_enum)]
        which: WhichConstant,
        #[arg(long)]
        k: Option<u32>,
        /// Real part of z (R)
        #[arg(long)]
        z: Option<f64>,
        /// Imaginary part of z (R)
        #[arg(long, default_value_t = 0.0)]
        z_im: f64,
        /// Certified relative tail for R
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Argument of zeta
        #[arg(long)]
        s: Option<f64>,
        /// Argument of L(., chi1)
        #[arg(long)]
        j: Option<f64>,
    },
    /// Mertens sums/products at comma-separated x values
    Mertens {
        #[arg(long)]
        xs: String,
    },
    /// Numerical Perron checks: --mode kernel or --mode count
    Perron {
        #[arg(long, value_enum)]
        mode: PerronCliMode,
        /// Kernel: the ratio y; count: y as an exact rational
        #[arg(long)]
        y: Option<String>,
        /// Kernel: abscissa a
        #[arg(long)]
        a: Option<f64>,
        /// Kernel: half-height T
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        beta: Option<String>,
        #[arg(long)]
        x: Option<u64>,
        /// Count: contour abscissa b (EXACT_A)
        #[arg(long)]
        b: Option<f64>,
        /// Count: contour half-height tau
        #[arg(long)]
        tau: Option<f64>,
        /// Count: coarse trapezoid steps per unit length
        #[arg(long, default_value_t = 40)]
        steps: u32,
        #[arg(long, value_enum, default_value_t = CountMethod::ExactA)]
        method: CountMethod,
    },
    /// Exact counts vs main terms at y = alpha x for comma-separated alphas
    VerifyDistribution {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        alphas: String,
    },
    /// Minimal-order ratios along primorials plus max-order rows
    VerifyExtremal {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        smax: u64,
    },
    /// Count all m with phi(m) <= y, with the no-stragglers certificate
    Bateman {
        #[arg(long)]
        y: u64,
    },
}

fn env_var<T: FromStr>(name: &str) -> Option<T> {
    std::env::var(name).ok().and_then(|v| v.parse().ok())
}

struct Resolved {
    format: Format,
    threads: Option<usize>,
    cfg: RegimeConfig,
}

fn resolve(cli: &Cli) -> Resolved {
    let format = match cli.format {
        Some(FormatArg::Json) => Format::Json,
        Some(FormatArg::Csv) => Format::Csv,
        None => match std::env::var("TOTLAB_FORMAT").ok().as_deref() {
            Some("csv") => Format::Csv,
            _ => Format::Json,
        },
    };
    let threads = cli.threads.or_else(|| env_var("TOTLAB_THREADS"));
    let kappa = cli.kappa.or_else(|| env_var("TOTLAB_KAPPA"));
    let epsilon = cli
        .epsilon
        .or_else(|| env_var("TOTLAB_EPSILON"))
        .unwrap_or(0.01);
    let constants = match kappa {
        Some(k) => Constants::with_kappa(k),
        None => Constants::default(),
    };
    Resolved {
        format,
        threads,
        cfg: RegimeConfig { epsilon, constants },
    }
}

fn base_constants(cfg: &RegimeConfig, k: Option<u32>) -> Vec<(&'static str, f64)> {
    let mut v = vec![
        ("gamma", cfg.constants.gamma),
        ("meissel_mertens", cfg.constants.meissel_mertens),
        ("kappa", cfg.constants.kappa),
        ("epsilon", cfg.epsilon),
    ];
    if let Some(k) = k {
        v.push(("c_k", c_k(k)));
    }
    v
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::argument(format!("cannot parse '{t}' as a real")))
        })
        .collect()
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>, Error> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::argument(format!("cannot parse '{t}' as an integer")))
        })
        .collect()
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::argument(format!("missing required flag --{flag} for this mode")))
}

fn run_command(cli: &Cli, r: &Resolved) -> Result<(Envelope, Option<PathBuf>), Error> {
    let cfg = &r.cfg;
    match &cli.cmd {
        Cmd::Phi { k, n, brute } => {
            let (method, value) = if *brute {
                ("brute", phi_k_brute(*n, *k)?)
            } else {
                ("formula", phi_k(*n, *k)?)
            };
            Ok((
                Envelope {
                    command: "phi",
                    params: vec![
                        ("k".into(), k.to_string()),
                        ("n".into(), n.to_string()),
                        ("brute".into(), brute.to_string()),
                    ],
                    constants: base_constants(cfg, Some(*k)),
                    columns: vec!["n", "k", "method", "phi_k"],
                    rows: vec![vec![
                        Cell::Uint(*n),
                        Cell::Uint(*k as u64),
                        Cell::Text(method.into()),
                        Cell::Big(value.to_string()),
                    ]],
                },
                None,
            ))
        }
        Cmd::Range { k, x, out } => {
            let mut rows = Vec::new();
            phi_k_range(*x, *k, |v| {
                rows.push(vec![Cell::Uint(v.n), Cell::Real(v.log_ratio)]);
            })?;
            Ok((
                Envelope {
                    command: "range",
                    params: vec![
                        ("k".into(), k.to_string()),
                        ("x".into(), x.to_string()),
                        ("out".into(), out.display().to_string()),
                    ],
                    constants: base_constants(cfg, Some(*k)),
                    columns: vec!["n", "log_ratio"],
                    rows,
                },
                Some(out.clone()),
            ))
        }
        Cmd::Count { k, beta, x, y } => {
            let params = TotientParams::new(*k, parse_rational(beta)?)?;
            let yv = parse_rational(y)?;
            let rec = count_phi_ratio(&params, *x, &yv, cfg)?;
            Ok((
                Envelope {
                    command: "count",
                    params: vec![
                        ("k".into(), k.to_string()),
                        ("beta".into(), beta.clone()),
                        ("x".into(), x.to_string()),
                        ("y".into(), y.clone()),
                    ],
                    constants: base_constants(cfg, Some(*k)),
                    columns: vec!["k", "beta", "x", "y", "count", "regime", "threshold_y"],
                    rows: vec![vec![
                        Cell::Uint(*k as u64),
                        Cell::Text(rational_to_string(&rec.beta)),
                        Cell::Uint(*x),
                        Cell::Text(rational_to_string(&rec.y)),
                        Cell::Uint(rec.count),
                        Cell::Text(rec.regime.tag.as_str().into()),
                        Cell::opt_real(rec.regime.threshold_y),
                    ]],
                },
                None,
            ))
        }
        Cmd::Cdf { k, x, grid } => {
            let g = parse_f64_list(grid)?;
            let table = totlab::counting::empirical_cdf(*k, *x, &g)?;
            Ok((
                Envelope {
                    command: "cdf",
                    params: vec![
                        ("k".into(), k.to_string()),
                        ("x".into(), x.to_string()),
                        ("grid".into(), grid.clone()),
                    ],
                    constants: base_constants(cfg, Some(*k)),
                    columns: vec!["alpha", "f_hat"],
                    rows: table
                        .into_iter()
                        .map(|(a, f)| vec![Cell::Real(a), Cell::Real(f)])
                        .collect(),
                },
                None,
            ))
        }
        Cmd::Constant {
            which,
            k,
            z,
            z_im,
            tol,
            s,
            j,
        } => {
            let mut params = vec![(
                "which".into(),
                format!("{:?}", which).to_lowercase(),
            )];
            let (columns, row): (Vec<&'static str>, Vec<Cell>) = match which {
                WhichConstant::R => {
                    let k = need(*k, "k")?;
                    let z_re = need(*z, "z")?;
                    params.push(("k".into(), k.to_string()));
                    params.push(("z".into(), fmt_real(z_re)));
                    params.push(("z_im".into(), fmt_real(*z_im)));
                    params.push(("tol".into(), fmt_real(*tol)));
                    let res = r_value(k, Complex64::new(z_re, *z_im), *tol)?;
                    (
                        vec!["which", "k", "z_re", "z_im", "value_re", "value_im", "truncation_prime", "tail_bound"],
                        vec![
                            Cell::Text("R".into()),
                            Cell::Uint(k as u64),
                            Cell::Real(z_re),
                            Cell::Real(*z_im),
                            Cell::Real(res.value.re),
                            Cell::Real(res.value.im),
                            Cell::Uint(res.truncation_prime),
                            Cell::Real(res.tail_bound),
                        ],
                    )
                }
                WhichConstant::Zeta => {
                    let s = need(*s, "s")?;
                    params.push(("s".into(), fmt_real(s)));
                    (
                        vec!["which", "s", "value"],
                        vec![Cell::Text("zeta".into()), Cell::Real(s), Cell::Real(zeta_real(s)?)],
                    )
                }
                WhichConstant::Lchi1 => {
                    let j = need(*j, "j")?;
                    params.push(("j".into(), fmt_real(j)));
                    (
                        vec!["which", "j", "value"],
                        vec![Cell::Text("Lchi1".into()), Cell::Real(j), Cell::Real(l_chi1(j)?)],
                    )
                }
                WhichConstant::Minimal => {
                    let k = need(*k, "k")?;
                    params.push(("k".into(), k.to_string()));
                    (
                        vec!["which", "k", "value"],
                        vec![
                            Cell::Text("minimal".into()),
                            Cell::Uint(k as u64),
                            Cell::Real(minimal_constant(k)?),
                        ],
                    )
                }
            };
            Ok((
                Envelope {
                    command: "constant",
                    params,
                    constants: base_constants(cfg, *k),
                    columns,
                    rows: vec![row],
                },
                None,
            ))
        }
        Cmd::Mertens { xs } => {
            let xv = parse_u64_list(xs)?;
            let rows = verify_mertens(&xv)?;
            Ok((
                Envelope {
                    command: "mertens",
                    params: vec![("xs".into(), xs.clone())],
                    constants: base_constants(cfg, None),
                    columns: vec![
                        "x", "sum", "sum_limit", "sum_dev", "product", "product_limit",
                        "product_ratio", "power2", "power2_limit", "power2_dev", "chi1",
                        "chi1_limit", "chi1_dev",
                    ],
                    rows: rows
                        .into_iter()
                        .map(|r| {
                            vec![
                                Cell::Uint(r.x),
                                Cell::Real(r.sum),
                                Cell::Real(r.sum_limit),
                                Cell::Real(r.sum_dev),
                                Cell::Real(r.product),
                                Cell::Real(r.product_limit),
                                Cell::Real(r.product_ratio),
                                Cell::Real(r.power2),
                                Cell::Real(r.power2_limit),
                                Cell::Real(r.power2_dev),
                                Cell::Real(r.chi1),
                                Cell::Real(r.chi1_limit),
                                Cell::Real(r.chi1_dev),
                            ]
                        })
                        .collect(),
                },
                None,
            ))
        }
        Cmd::Perron {
            mode,
            y,
            a,
            t,
            k,
            beta,
            x,
            b,
            tau,
            steps,
            method,
        } => match mode {
            PerronCliMode::Kernel => {
                let ys = y.as_deref().ok_or_else(|| Error::argument("missing --y"))?;
                let yf: f64 = ys
                    .parse()
                    .map_err(|_| Error::argument(format!("cannot parse '{ys}' as a real")))?;
                let a = need(*a, "a")?;
                let t = need(*t, "t")?;
                let c = perron_kernel_check(yf, a, t)?;
                Ok((
                    Envelope {
                        command: "perron",
                        params: vec![
                            ("mode".into(), "kernel".into()),
                            ("y".into(), ys.to_string()),
                            ("a".into(), fmt_real(a)),
                            ("t".into(), fmt_real(t)),
                        ],
                        constants: base_constants(cfg, None),
                        columns: vec!["mode", "y", "a", "t", "h", "estimate", "bound"],
                        rows: vec![vec![
                            Cell::Text("kernel".into()),
                            Cell::Real(yf),
                            Cell::Real(a),
                            Cell::Real(t),
                            Cell::Real(c.h),
                            Cell::Real(c.estimate),
                            Cell::opt_real(c.bound),
                        ]],
                    },
                    None,
                ))
            }
            PerronCliMode::Count => {
                let k = need(*k, "k")?;
                let beta_s = beta
                    .as_deref()
                    .ok_or_else(|| Error::argument("missing --beta"))?;
                let x = need(*x, "x")?;
                let ys = y.as_deref().ok_or_else(|| Error::argument("missing --y"))?;
                let tau = need(*tau, "tau")?;
                let params_t = TotientParams::new(k, parse_rational(beta_s)?)?;
                let yv = parse_rational(ys)?;
                let (pmode, mname) = match method {
                    CountMethod::ExactA => (PerronMode::ExactA, "exact-a"),
                    CountMethod::ResidueR => (PerronMode::ResidueR, "residue-r"),
                };
                let b_val = match pmode {
                    PerronMode::ExactA => need(*b, "b")?,
                    PerronMode::ResidueR => b.unwrap_or(0.0),
                };
                let est = perron_count_estimate(&params_t, x, &yv, b_val, tau, *steps, pmode, cfg)?;
                Ok((
                    Envelope {
                        command: "perron",
                        params: vec![
                            ("mode".into(), "count".into()),
                            ("method".into(), mname.into()),
                            ("k".into(), k.to_string()),
                            ("beta".into(), beta_s.to_string()),
                            ("x".into(), x.to_string()),
                            ("y".into(), ys.to_string()),
                            ("b".into(), fmt_real(b_val)),
                            ("tau".into(), fmt_real(tau)),
                            ("steps".into(), steps.to_string()),
                        ],
                        constants: base_constants(cfg, Some(k)),
                        columns: vec![
                            "mode", "method", "contour_abscissa", "estimate", "coarse_estimate",
                            "main_term",
                        ],
                        rows: vec![vec![
                            Cell::Text("count".into()),
                            Cell::Text(mname.into()),
                            Cell::Real(est.contour_abscissa),
                            Cell::Real(est.estimate),
                            Cell::Real(est.coarse_estimate),
                            Cell::opt_real(est.main_term),
                        ]],
                    },
                    None,
                ))
            }
        },
        Cmd::VerifyDistribution { k, beta, x, alphas } => {
            let p = TotientParams::new(*k, parse_rational(beta)?)?;
            let al = parse_f64_list(alphas)?;
            let rows = verify_distribution(&p, *x, &al, cfg)?;
            Ok((
                Envelope {
                    command: "verify-distribution",
                    params: vec![
                        ("k".into(), k.to_string()),
                        ("beta".into(), beta.clone()),
                        ("x".into(), x.to_string()),
                        ("alphas".into(), alphas.clone()),
                    ],
                    constants: base_constants(cfg, Some(*k)),
                    columns: vec![
                        "k", "beta", "x", "alpha", "y", "exact_count", "main_term", "rel_err",
                        "regime", "threshold_y",
                    ],
                    rows: rows
                        .into_iter()
                        .map(|r| {
                            vec![
                                Cell::Uint(r.k as u64),
                                Cell::Text(rational_to_string(&r.beta)),
                                Cell::Uint(r.x),
                                Cell::Real(r.alpha),
                                Cell::Text(rational_to_string(&r.y)),
                                Cell::Uint(r.exact_count),
                                Cell::opt_real(r.main_term),
                                Cell::opt_real(r.rel_err),
                                Cell::Text(r.regime.tag.as_str().into()),
                                Cell::opt_real(r.regime.threshold_y),
                            ]
                        })
                        .collect(),
                },
                None,
            ))
        }
        Cmd::VerifyExtremal { k, smax } => {
            let rep = verify_extremal(*k, *smax)?;
            let mut rows = Vec::new();
            for r in &rep.minimal {
                rows.push(vec![
                    Cell::Text("minimal".into()),
                    Cell::Uint(*k as u64),
                    Cell::Uint(r.s),
                    Cell::Uint(r.p_s),
                    Cell::Real(r.ln_n_s),
                    Cell::Real(r.ratio),
                ]);
            }
            for r in &rep.maximal {
                rows.push(vec![
                    Cell::Text("maximal".into()),
                    Cell::Uint(*k as u64),
                    Cell::Null,
                    Cell::Uint(r.p),
                    Cell::Null,
                    Cell::Real(r.ratio),
                ]);
            }
            Ok((
                Envelope {
                    command: "verify-extremal",
                    params: vec![
                        ("k".into(), k.to_string()),
                        ("smax".into(), smax.to_string()),
                    ],
                    constants: base_constants(cfg, Some(*k)),
                    columns: vec!["kind", "k", "s", "p", "ln_n_s", "ratio"],
                    rows,
                },
                None,
            ))
        }
        Cmd::Bateman { y } => {
            let r = bateman_count(*y)?;
            Ok((
                Envelope {
                    command: "bateman",
                    params: vec![("y".into(), y.to_string())],
                    constants: base_constants(cfg, None),
                    columns: vec!["y", "count", "cutoff", "certificate_min"],
                    rows: vec![vec![
                        Cell::Uint(*y),
                        Cell::Uint(r.count),
                        Cell::Uint(r.cutoff),
                        Cell::Uint(r.certificate_min),
                    ]],
                },
                None,
            ))
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Argument(_) | Error::Domain(_) | Error::Geometry(_) => 2,
        Error::Capacity(_) | Error::Precision(_) => 3,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let resolved = resolve(&cli);
    if let Some(n) = resolved.threads {
        // ignore "already initialized" in case a pool exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match run_command(&cli, &resolved) {
        Ok((mut env, out_path)) => {
            env.params.push((
                "format".into(),
                match resolved.format {
                    Format::Json => "json".into(),
                    Format::Csv => "csv".into(),
                },
            ));
            env.params.push((
                "threads".into(),
                resolved
                    .threads
                    .map(|n| n.to_string())
                    .unwrap_or_else(|| "auto".into()),
            ));
            let text = env.render(resolved.format);
            match out_path {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        std::process::exit(3);
                    }
                }
                None => print!("{text}"),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}
