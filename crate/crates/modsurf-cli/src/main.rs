//! Command-line front end: evaluate, classify, construct, verify and export
//! modular surfaces.
//!
//! Complex numbers are written `a+bi` with no spaces (`0.5-0.3i`, `2i`,
//! `-1`). Domains are `disk R` or `rect X0 X1 Y0 Y1` (spaces or `:` between
//! fields). A `--config` file holds `key=value` lines mirroring the long
//! flag names; explicit flags win.
//!
//! Exit codes: 0 success, 1 evaluation/domain failures, 2 usage errors.

use clap::{Args, Parser, Subcommand};
use modsurf::classify::{self, census, default_radii, predict};
use modsurf::construct::{
    sign_locked_construct, BetaSpec, ConstructedF, Domain, SignLockOutcome, TargetSign,
};
use modsurf::fieldtheory::{
    characteristic_f_check, cmc_verify, convexity_bounds, liouville_residual,
    log_harmonic_residual, massless_check, sigma_solve, zmc_scan, Ambient, CmcParams,
    Orientation, ScalarField,
};
use modsurf::geometry::{sample_point, scan_grid, Rect};
use modsurf::jet::{eval_jet, zero_profile, BranchPolicy, DEFAULT_ZERO_TOL};
use modsurf::raster;
use modsurf::{parse_complex, Expr};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "modsurf", version, about = "Modular surface toolkit")]
struct Cli {
    /// Flat key=value file supplying defaults for the long flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the jet and the full geometric sample at a point as JSON.
    Eval(EvalArgs),
    /// Zero profile, taxonomy prediction, circle census and their agreement.
    Classify(ClassifyArgs),
    /// Build a generating function from prescribed construction data.
    Construct(ConstructArgs),
    /// Residual verifications (cmc|zmc|liouville|massless|sigma|bounds).
    Verify(VerifyArgs),
    /// Causal-character raster (plain PGM).
    Raster(GridArgs),
    /// Height mesh (Wavefront OBJ).
    Mesh(GridArgs),
    /// Per-sample table (CSV).
    Csv(GridArgs),
    /// Run the bundled end-to-end example suite and print a summary.
    Repro,
}

#[derive(Args)]
struct EvalArgs {
    /// Generating function, e.g. "exp(z)" or "(z+2)^(1+3i)".
    #[arg(short = 'f', long)]
    function: Option<String>,
    /// Evaluation point, e.g. "0.2+0.1i".
    #[arg(short = 'z', long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Jet order (number of derivatives).
    #[arg(long)]
    order: Option<usize>,
    /// Branch anchor point (with --anchor-value).
    #[arg(long, allow_hyphen_values = true)]
    anchor: Option<String>,
    /// Value the function takes at the anchor.
    #[arg(long, allow_hyphen_values = true)]
    anchor_value: Option<String>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(short = 'f', long)]
    function: Option<String>,
    #[arg(short = 'z', long, allow_hyphen_values = true)]
    z: Option<String>,
}

#[derive(Args)]
struct ConstructArgs {
    /// Prescribed beta expression.
    #[arg(long)]
    beta: Option<String>,
    /// Constant k = F(0)/F'(0).
    #[arg(short = 'k', long, allow_hyphen_values = true)]
    k: Option<String>,
    /// Start value F(0).
    #[arg(long, allow_hyphen_values = true)]
    f0: Option<String>,
    /// "disk R" or "rect X0 X1 Y0 Y1".
    #[arg(long)]
    domain: Option<String>,
    /// pos, neg, or none.
    #[arg(long, default_value = "none")]
    target_sign: String,
    /// Output format: csv or obj.
    #[arg(long, default_value = "csv")]
    out: String,
    /// Output path (defaults to construct.<format>).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 33)]
    nx: usize,
    #[arg(long, default_value_t = 33)]
    ny: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// cmc | zmc | liouville | massless | sigma | bounds
    case: String,
    #[arg(short = 'f', long)]
    function: Option<String>,
    /// Repeated component functions for the sigma case.
    #[arg(long)]
    component: Vec<String>,
    #[arg(long)]
    domain: Option<String>,
    #[arg(short = 'n', long)]
    n: Option<usize>,
    #[arg(long)]
    hmean: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    coupling: Option<f64>,
    #[arg(long)]
    sg: Option<f64>,
    /// x+y or x-y (massless case).
    #[arg(long)]
    orientation: Option<String>,
    /// ++, +-, -+ or -- (sigma case).
    #[arg(long)]
    signature: Option<String>,
    /// euclidean or minkowski (bounds case).
    #[arg(long)]
    ambient: Option<String>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(short = 'f', long)]
    function: Option<String>,
    #[arg(long)]
    domain: Option<String>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    anchor: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    anchor_value: Option<String>,
}

/// Defaults loaded from a key=value file; explicit flags override.
struct Config(HashMap<String, String>);

impl Config {
    fn load(path: Option<&PathBuf>) -> Result<Self, String> {
        let mut map = HashMap::new();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p)
                .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
            for (ln, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    return Err(format!("config line {} is not key=value", ln + 1));
                };
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Config(map))
    }

    fn fill(&self, flag: Option<String>, key: &str) -> Option<String> {
        flag.or_else(|| self.0.get(key).cloned())
    }
}

enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Domain(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

fn require(v: Option<String>, what: &str) -> Result<String, CliError> {
    v.ok_or_else(|| CliError::usage(format!("missing required value: {what}")))
}

fn parse_expr(text: &str) -> Result<Expr, CliError> {
    modsurf::parse(text).map_err(|d| CliError::usage(format!("in expression {text:?}: {d}")))
}

fn parse_c(text: &str) -> Result<Complex64, CliError> {
    parse_complex(text).map_err(CliError::Usage)
}

fn split_fields(text: &str) -> Vec<&str> {
    text.split(|c: char| c.is_whitespace() || c == ':' || c == ',')
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_rect(text: &str) -> Result<Rect, CliError> {
    match split_fields(text).as_slice() {
        ["rect", x0, x1, y0, y1] => {
            let p = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| CliError::usage(format!("bad number {s:?}: {e}")))
            };
            Ok(Rect::new(p(x0)?, p(x1)?, p(y0)?, p(y1)?))
        }
        _ => Err(CliError::usage(format!(
            "domain {text:?} is not \"rect X0 X1 Y0 Y1\""
        ))),
    }
}

fn parse_domain(text: &str) -> Result<Domain, CliError> {
    match split_fields(text).as_slice() {
        ["disk", r] => {
            let radius = r
                .parse::<f64>()
                .map_err(|e| CliError::usage(format!("bad radius {r:?}: {e}")))?;
            Ok(Domain::Disk { radius })
        }
        ["rect", ..] => Ok(Domain::Rect(parse_rect(text)?)),
        _ => Err(CliError::usage(format!(
            "domain {text:?} is neither \"disk R\" nor \"rect X0 X1 Y0 Y1\""
        ))),
    }
}

fn policy_from(anchor: Option<String>, value: Option<String>) -> Result<BranchPolicy, CliError> {
    match (anchor, value) {
        (None, None) => Ok(BranchPolicy::Principal),
        (Some(at), Some(v)) => Ok(BranchPolicy::anchored(parse_c(&at)?, parse_c(&v)?)),
        _ => Err(CliError::usage(
            "--anchor and --anchor-value must be given together",
        )),
    }
}

fn emit(value: &impl Serialize) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serializes")
    );
}

fn cmd_eval(cfg: &Config, a: EvalArgs) -> CliResult {
    let function = require(cfg.fill(a.function, "function"), "--function")?;
    let z = parse_c(&require(cfg.fill(a.z, "z"), "--z")?)?;
    let order = a.order.unwrap_or(4);
    let policy = policy_from(
        cfg.fill(a.anchor, "anchor"),
        cfg.fill(a.anchor_value, "anchor_value"),
    )?;
    let expr = parse_expr(&function)?;
    let jet = eval_jet(&expr, z, order, &policy)?;
    let sample = sample_point(&expr, z, &policy)?;
    let derivatives: Vec<Complex64> = (0..=order).map(|j| jet.derivative(j)).collect();
    emit(&json!({
        "function": function,
        "point": { "re": z.re, "im": z.im },
        "derivatives": derivatives,
        "sample": sample,
    }));
    Ok(())
}

fn cmd_classify(cfg: &Config, a: ClassifyArgs) -> CliResult {
    let function = require(cfg.fill(a.function, "function"), "--function")?;
    let z = parse_c(&require(cfg.fill(a.z, "z"), "--z")?)?;
    let expr = parse_expr(&function)?;
    let policy = BranchPolicy::Principal;
    let profile = zero_profile(&expr, z, 12, DEFAULT_ZERO_TOL, &policy)?;
    let report = match predict(&profile) {
        Ok(pred) => {
            let cen = census(&expr, z, &default_radii(), &policy)
                .map_err(|e| CliError::Domain(e.to_string()))?;
            let agrees = cen.pos_arcs == pred.n_plus && cen.neg_arcs == pred.n_minus;
            json!({
                "function": function,
                "point": { "re": z.re, "im": z.im },
                "profile": profile,
                "prediction": pred,
                "census": cen,
                "verdict": if pred.disputed {
                    "disputed row: census carries the limit-side counts"
                } else if agrees {
                    "census agrees with the prediction"
                } else {
                    "census disagrees with the prediction"
                },
                "agrees": agrees,
            })
        }
        Err(classify::ClassifyError::Unclassified(why)) => {
            // regular or affine point: report the sample instead
            let sample = sample_point(&expr, z, &policy)?;
            json!({
                "function": function,
                "point": { "re": z.re, "im": z.im },
                "profile": profile,
                "prediction": null,
                "note": why,
                "sample": sample,
            })
        }
        Err(e) => return Err(CliError::Domain(e.to_string())),
    };
    emit(&report);
    Ok(())
}

fn cmd_construct(cfg: &Config, a: ConstructArgs) -> CliResult {
    let beta = parse_expr(&require(cfg.fill(a.beta, "beta"), "--beta")?)?;
    let k = parse_c(&require(cfg.fill(a.k, "k"), "--k")?)?;
    let f0 = parse_c(&require(cfg.fill(a.f0, "f0"), "--f0")?)?;
    let domain = parse_domain(&require(cfg.fill(a.domain, "domain"), "--domain")?)?;
    let spec = BetaSpec::new(beta, k, f0, domain)?;

    let target = match a.target_sign.as_str() {
        "pos" => Some(TargetSign::Positive),
        "neg" => Some(TargetSign::Negative),
        "none" => None,
        other => {
            return Err(CliError::usage(format!(
                "--target-sign {other:?} is not pos|neg|none"
            )))
        }
    };
    let cf = match target {
        None => ConstructedF::new(spec, 1e-9),
        Some(t) => match sign_locked_construct(spec, t, 1e-9)? {
            SignLockOutcome::Accepted(cf) => cf,
            SignLockOutcome::Rejected(failure) => {
                emit(&failure);
                return Err(CliError::Domain(format!(
                    "sign lock rejected: {} violations",
                    failure.violations.len()
                )));
            }
        },
    };

    let bb = match cf.spec.domain {
        Domain::Disk { radius } => Rect::centered_square(radius),
        Domain::Rect(r) => r,
    };
    let default_name = format!("construct.{}", a.out);
    let path = a.output.unwrap_or_else(|| PathBuf::from(default_name));
    let mut rows = Vec::new();
    for iy in 0..a.ny {
        for ix in 0..a.nx {
            let x = bb.x0 + (bb.x1 - bb.x0) * ix as f64 / (a.nx - 1) as f64;
            let y = bb.y0 + (bb.y1 - bb.y0) * iy as f64 / (a.ny - 1) as f64;
            let z = Complex64::new(x, y);
            let value = if cf.spec.domain.contains(z) {
                cf.eval(z).ok()
            } else {
                None
            };
            rows.push((x, y, value));
        }
    }
    match a.out.as_str() {
        "csv" => {
            let mut out = String::from("x,y,h,re,im,err\n");
            for (x, y, v) in &rows {
                match v {
                    Some((f, err)) => out.push_str(&format!(
                        "{x:.16e},{y:.16e},{:.16e},{:.16e},{:.16e},{err:.3e}\n",
                        f.norm(),
                        f.re,
                        f.im
                    )),
                    None => out.push_str(&format!("{x:.16e},{y:.16e},,,,\n")),
                }
            }
            std::fs::write(&path, out).map_err(|e| CliError::Domain(e.to_string()))?;
        }
        "obj" => {
            let mut out = String::new();
            let mut index = vec![0usize; a.nx * a.ny];
            let mut next = 0;
            for (i, (x, y, v)) in rows.iter().enumerate() {
                if let Some((f, _)) = v {
                    next += 1;
                    index[i] = next;
                    out.push_str(&format!("v {} {} {}\n", x, y, f.norm()));
                }
            }
            for iy in 0..a.ny - 1 {
                for ix in 0..a.nx - 1 {
                    let i00 = index[iy * a.nx + ix];
                    let i10 = index[iy * a.nx + ix + 1];
                    let i01 = index[(iy + 1) * a.nx + ix];
                    let i11 = index[(iy + 1) * a.nx + ix + 1];
                    if i00 > 0 && i10 > 0 && i01 > 0 && i11 > 0 {
                        out.push_str(&format!("f {i00} {i10} {i11}\nf {i00} {i11} {i01}\n"));
                    }
                }
            }
            std::fs::write(&path, out).map_err(|e| CliError::Domain(e.to_string()))?;
        }
        other => {
            return Err(CliError::usage(format!("--out {other:?} is not csv|obj")));
        }
    }
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn stats(values: &[f64]) -> serde_json::Value {
    if values.is_empty() {
        return json!({ "count": 0 });
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    json!({ "count": values.len(), "min": min, "max": max, "mean": mean })
}

fn cmd_verify(cfg: &Config, a: VerifyArgs) -> CliResult {
    let rect = parse_rect(
        &cfg.fill(a.domain, "domain")
            .unwrap_or_else(|| "rect 0 1 0 1".into()),
    )?;
    let n = a.n.unwrap_or(17);
    match a.case.as_str() {
        "cmc" => {
            let p = CmcParams::new(
                a.hmean.unwrap_or(1.0),
                a.a.unwrap_or(0.0),
                a.b.unwrap_or(0.0),
            )?;
            let (laplace, eikonal) = cmc_verify(&p, rect, n);
            let characteristic = characteristic_f_check(p.a, p.b, p.h_mean, rect, n);
            emit(&json!({
                "case": "cmc",
                "params": p,
                "laplace_residual": laplace,
                "eikonal_residual": eikonal,
                "characteristic_residual": characteristic,
            }));
        }
        "zmc" => {
            let f = parse_expr(&require(cfg.fill(a.function, "function"), "--function")?)?;
            let report = zmc_scan(&f, rect, n, n, &BranchPolicy::Principal);
            emit(&json!({ "case": "zmc", "report": report }));
        }
        "liouville" => {
            let f = parse_expr(&require(cfg.fill(a.function, "function"), "--function")?)?;
            let field = ScalarField::modulus(f, BranchPolicy::Principal, rect, n, n);
            let report = liouville_residual(
                &field,
                a.q.unwrap_or(2.0),
                a.mu.unwrap_or(0.0),
                a.coupling.unwrap_or(1.0),
                a.sg.unwrap_or(0.0),
            )?;
            let nontrivial = report.nontrivial.iter().filter(|&&b| b).count();
            emit(&json!({
                "case": "liouville",
                "residual": stats(&report.residual.values),
                "nontrivial_points": nontrivial,
            }));
        }
        "massless" => {
            let f = parse_expr(&require(cfg.fill(a.function, "function"), "--function")?)?;
            let orientation = match cfg
                .fill(a.orientation, "orientation")
                .unwrap_or_else(|| "x+y".into())
                .as_str()
            {
                "x+y" => Orientation::XPlusY,
                "x-y" => Orientation::XMinusY,
                other => {
                    return Err(CliError::usage(format!(
                        "--orientation {other:?} is not x+y|x-y"
                    )))
                }
            };
            let (box_res, null_res) = massless_check(&f, orientation, rect, n)?;
            emit(&json!({
                "case": "massless",
                "box_residual": box_res,
                "null_residual": null_res,
            }));
        }
        "sigma" => {
            let exprs: Vec<Expr> = if a.component.is_empty() {
                vec![parse_expr(&require(
                    cfg.fill(a.function, "function"),
                    "--function or --component",
                )?)?]
            } else {
                a.component
                    .iter()
                    .map(|s| parse_expr(s))
                    .collect::<Result<_, _>>()?
            };
            let signature = match cfg
                .fill(a.signature, "signature")
                .unwrap_or_else(|| "++".into())
                .as_str()
            {
                "++" => (1, 1),
                "+-" => (1, -1),
                "-+" => (-1, 1),
                "--" => (-1, -1),
                other => {
                    return Err(CliError::usage(format!(
                        "--signature {other:?} is not ++|+-|-+|--"
                    )))
                }
            };
            let fields: Vec<ScalarField> = exprs
                .into_iter()
                .map(|e| ScalarField::modulus(e, BranchPolicy::Principal, rect, n, n))
                .collect();
            let refs: Vec<&ScalarField> = fields.iter().collect();
            let out = sigma_solve(&refs, signature)?;
            emit(&json!({
                "case": "sigma",
                "components": out.n,
                "residual": stats(&out.residual),
                "singular_points": out.singular.iter().filter(|&&s| s).count(),
            }));
        }
        "bounds" => {
            let f = parse_expr(&require(cfg.fill(a.function, "function"), "--function")?)?;
            let ambient = match cfg
                .fill(a.ambient, "ambient")
                .unwrap_or_else(|| "euclidean".into())
                .as_str()
            {
                "euclidean" => Ambient::Euclidean,
                "minkowski" => Ambient::Minkowski,
                other => {
                    return Err(CliError::usage(format!(
                        "--ambient {other:?} is not euclidean|minkowski"
                    )))
                }
            };
            let field = ScalarField::modulus(f, BranchPolicy::Principal, rect, n, n);
            let report = convexity_bounds(&field, ambient)?;
            emit(&json!({ "case": "bounds", "report": report }));
        }
        other => {
            return Err(CliError::usage(format!(
                "verify case {other:?} is not cmc|zmc|liouville|massless|sigma|bounds"
            )))
        }
    }
    Ok(())
}

fn cmd_grid(
    cfg: &Config,
    a: GridArgs,
    writer: fn(&modsurf::GridField, &PathBuf) -> std::io::Result<()>,
    default_out: &str,
) -> CliResult {
    let function = require(cfg.fill(a.function, "function"), "--function")?;
    let rect = parse_rect(&require(cfg.fill(a.domain, "domain"), "--domain")?)?;
    let nx = a.nx.unwrap_or(64);
    let ny = a.ny.unwrap_or(64);
    if nx < 2 || ny < 2 {
        return Err(CliError::usage("resolution must be at least 2x2"));
    }
    let policy = policy_from(
        cfg.fill(a.anchor, "anchor"),
        cfg.fill(a.anchor_value, "anchor_value"),
    )?;
    let expr = parse_expr(&function)?;
    let grid = scan_grid(&expr, rect, nx, ny, &policy);
    let path = a.out.unwrap_or_else(|| PathBuf::from(default_out));
    writer(&grid, &path).map_err(|e| CliError::Domain(e.to_string()))?;
    eprintln!(
        "wrote {} ({} samples, {} excluded)",
        path.display(),
        nx * ny,
        grid.excluded_count()
    );
    Ok(())
}

fn run_repro() -> CliResult {
    let mut all_ok = true;
    let mut check = |name: &str, ok: bool, detail: String| {
        println!("[{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    };

    // worked construction example against its closed form
    let f0 = Complex64::new(-0.5, 0.0).powc(Complex64::new(2.0 / 3.0, 0.0));
    let spec = BetaSpec::new(
        modsurf::parse("z+0.5").unwrap(),
        Complex64::new(-1.0, 0.0),
        f0,
        Domain::Disk { radius: 0.5 },
    )?;
    let closed = modsurf::parse("((z-1)/(z+2))^(0.6666666666666666)").unwrap();
    let policy = BranchPolicy::anchored(Complex64::new(0.0, 0.0), f0);
    let mut max_err = 0.0f64;
    let mut k_neg = true;
    for i in 0..20 {
        let angle = std::f64::consts::TAU * i as f64 / 20.0;
        let z = Complex64::new(0.35 * angle.cos(), 0.35 * angle.sin());
        let (built, _) = modsurf::construct::ullrich_eval(&spec, z, 1e-7)?;
        let want = modsurf::eval_value(&closed, z, &policy)?;
        max_err = max_err.max((built - want).norm());
        let s = sample_point(&closed, z, &policy)?;
        k_neg &= s.k.defined().is_some_and(|k| k < 0.0);
    }
    check(
        "construction vs closed form (20 points)",
        max_err <= 1e-6 && k_neg,
        format!("max error {max_err:.3e}, K<0 everywhere: {k_neg}"),
    );

    // flat families stay flat
    let mut max_k = 0.0f64;
    for (kind, m, n, l) in [
        (
            modsurf::construct::ZeroKKind::Exponential,
            Complex64::new(0.2, 0.1),
            Complex64::new(-1.0, 0.3),
            0.0,
        ),
        (
            modsurf::construct::ZeroKKind::PowerLaw,
            Complex64::new(0.2, -0.05),
            Complex64::new(2.0, 0.1),
            0.7,
        ),
    ] {
        let e = modsurf::construct::zero_k_family(kind, m, n, l);
        let g = scan_grid(
            &e,
            Rect::centered_square(1.0),
            32,
            32,
            &BranchPolicy::Principal,
        );
        for s in g.samples() {
            if let Some(k) = s.k.defined() {
                max_k = max_k.max(k.abs());
            }
        }
    }
    check(
        "flat families on 32x32 grids",
        max_k <= 1e-8,
        format!("max |K| = {max_k:.3e}"),
    );

    // sector censuses against the taxonomy
    let origin = Complex64::new(0.0, 0.0);
    for src in ["1+z+z^4", "1+z^3", "z+z^3", "z^3", "1+z^2", "z+z^2"] {
        let e = modsurf::parse(src).unwrap();
        let p = zero_profile(&e, origin, 10, DEFAULT_ZERO_TOL, &BranchPolicy::Principal)?;
        let pred = predict(&p).map_err(|e| CliError::Domain(e.to_string()))?;
        let cen = census(&e, origin, &default_radii(), &BranchPolicy::Principal)
            .map_err(|e| CliError::Domain(e.to_string()))?;
        check(
            &format!("census {src}"),
            cen.stable && (cen.pos_arcs, cen.neg_arcs) == (pred.n_plus, pred.n_minus),
            format!(
                "predicted ({},{}), census ({},{})",
                pred.n_plus, pred.n_minus, cen.pos_arcs, cen.neg_arcs
            ),
        );
    }

    // the disputed double-zero row, asserted on the limit side
    let e = modsurf::parse("z^2").unwrap();
    let p = zero_profile(&e, origin, 10, DEFAULT_ZERO_TOL, &BranchPolicy::Principal)?;
    let pred = predict(&p).map_err(|e| CliError::Domain(e.to_string()))?;
    let cen = census(&e, origin, &default_radii(), &BranchPolicy::Principal)
        .map_err(|e| CliError::Domain(e.to_string()))?;
    let s = sample_point(&e, origin, &BranchPolicy::Principal)?;
    check(
        "disputed double-zero row (z^2)",
        pred.disputed
            && (cen.pos_arcs, cen.neg_arcs) == (0, 1)
            && (s.k.defined().unwrap_or(f64::NAN) + 4.0).abs() <= 1e-6,
        format!(
            "printed row ({},{}) flagged disputed; census (0,1); K(0) limit {}",
            pred.n_plus,
            pred.n_minus,
            s.k.defined().unwrap_or(f64::NAN)
        ),
    );

    // constant-mean-curvature identities
    let mut worst = 0.0f64;
    for (h, va, vb) in [
        (1.0, 0.0, 0.0),
        (1.0, 1.0, 2.0),
        (-0.5, 0.3, 0.0),
        (2.0, -1.0, 0.5),
    ] {
        let p = CmcParams::new(h, va, vb)?;
        let (laplace, eikonal) = cmc_verify(&p, Rect::centered_square(2.0), 9);
        let characteristic = characteristic_f_check(va, vb, h, Rect::centered_square(2.0), 9);
        worst = worst.max(laplace).max(eikonal).max(characteristic);
    }
    check(
        "constant-mean-curvature identities",
        worst <= 1e-12,
        format!("worst residual {worst:.3e}"),
    );

    // log-harmonicity of a modular height and its failure under a lift
    let field = ScalarField::modulus(
        modsurf::parse("exp(z)").unwrap(),
        BranchPolicy::Principal,
        Rect::new(0.0, 1.0, 0.0, 1.0),
        9,
        9,
    );
    let good = log_harmonic_residual(&field)?.max_abs();
    let lifted = ScalarField::closed(|x, _| x.exp() + 1.0, Rect::new(0.0, 1.0, 0.0, 1.0), 9, 9);
    let bad = log_harmonic_residual(&lifted)?.max_abs();
    check(
        "log-harmonic height vs lifted height",
        good <= 1e-5 && bad >= 0.1,
        format!("modular residual {good:.3e}, lifted residual {bad:.3e}"),
    );

    if all_ok {
        println!("repro: all checks passed");
        Ok(())
    } else {
        Err(CliError::Domain("repro: some checks failed".into()))
    }
}

fn dispatch(cli: Cli) -> CliResult {
    let cfg = Config::load(cli.config.as_ref()).map_err(CliError::Usage)?;
    match cli.command {
        Command::Eval(a) => cmd_eval(&cfg, a),
        Command::Classify(a) => cmd_classify(&cfg, a),
        Command::Construct(a) => cmd_construct(&cfg, a),
        Command::Verify(a) => cmd_verify(&cfg, a),
        Command::Raster(a) => cmd_grid(&cfg, a, |g, p| raster::export_pgm(g, p), "surface.pgm"),
        Command::Mesh(a) => cmd_grid(&cfg, a, |g, p| raster::export_mesh(g, p), "surface.obj"),
        Command::Csv(a) => cmd_grid(&cfg, a, |g, p| raster::export_csv(g, p), "surface.csv"),
        Command::Repro => run_repro(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
