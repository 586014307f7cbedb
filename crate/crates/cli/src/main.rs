use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rpac_core::code::{Code, Scheme};
use rpac_core::construction::{construct_profile, load_profile, save_profile};
use rpac_core::decode::{decode, CheckNode, DecoderConfig, LlrBlock, MetricMode};
use rpac_core::sim::{self, CodeRecipe, DecoderRecipe, OutputRecipe, Recipe, SweepRecipe};
use rpac_core::spectrum::{self, DEFAULT_SUPPORT_BUDGET};
use rpac_core::structure::{compute_wmin, coset_reports, format_coset_reports};

/// Polar, PAC and reverse-PAC codes: construction, error coefficients,
/// list decoding and BLER simulation.
#[derive(Parser, Debug)]
#[command(name = "rpac", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an information set by Gaussian-approximation density evolution.
    Construct(ConstructArgs),
    /// Minimum weight and error coefficient of a code.
    Spectrum(SpectrumArgs),
    /// Per-coset analysis of the plain polar code: K_i sets and classes.
    Cosets(CosetArgs),
    /// Decode one hard-decision word read from a file and print the ranked list.
    Decode(DecodeArgs),
    /// Monte Carlo block error rate over a BI-AWGN channel.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct ConstructArgs {
    /// Block length (power of two).
    #[arg(long)]
    n: usize,
    /// Number of information indices.
    #[arg(long)]
    k: usize,
    /// Design SNR in dB (Es/N0). Required; there is no default.
    #[arg(long = "design-snr", allow_negative_numbers = true)]
    design_snr: f64,
    /// Write the profile here instead of standard output.
    #[arg(long = "profile-out")]
    profile_out: Option<PathBuf>,
}

/// Where the code comes from: a profile file, or N/K/design SNR.
#[derive(Args, Debug, Clone, Default)]
struct CodeArgs {
    /// Profile file written by `construct`.
    #[arg(long, conflicts_with_all = ["n", "k", "design_snr"])]
    profile: Option<PathBuf>,
    /// Block length when constructing on the fly.
    #[arg(long)]
    n: Option<usize>,
    /// Message bits when constructing on the fly (CRC bits are added for crc_polar).
    #[arg(long)]
    k: Option<usize>,
    /// Design SNR in dB (Es/N0) when constructing on the fly.
    #[arg(long = "design-snr", allow_negative_numbers = true)]
    design_snr: Option<f64>,
    /// polar, pac, rpac or crc_polar.
    #[arg(long)]
    scheme: Option<String>,
    /// Precoder taps p_0..p_s, comma separated (default 1,1,0,1,1,0,1,1,0,1).
    #[arg(long)]
    poly: Option<String>,
    /// Attach the 11-bit CRC x^11+x^10+x^9+x^5+1 (same as --scheme crc_polar).
    #[arg(long)]
    crc: bool,
}

impl CodeArgs {
    fn scheme(&self) -> Option<String> {
        match (&self.scheme, self.crc) {
            (_, true) => Some(Scheme::CrcPolar.to_string()),
            (s, false) => s.clone(),
        }
    }

    fn check_crc(&self) -> Result<()> {
        if self.crc {
            if let Some(s) = &self.scheme {
                let s: Scheme = s.parse()?;
                if !matches!(s, Scheme::Polar | Scheme::CrcPolar) {
                    bail!("--crc applies to polar codes only, not {s}");
                }
            }
        }
        Ok(())
    }

    fn recipe(&self) -> Result<CodeRecipe> {
        self.check_crc()?;
        let scheme = self.scheme().context("--scheme is required")?;
        resolve_code(CodeRecipe {
            scheme,
            profile: self.profile.clone(),
            n: self.n,
            k: self.k,
            design_snr_db: self.design_snr,
            poly: self.poly.clone(),
        })
    }

    /// Overrides the fields given on the command line.
    fn apply(&self, base: &mut CodeRecipe) -> Result<()> {
        self.check_crc()?;
        if let Some(s) = self.scheme() {
            base.scheme = s;
        }
        if self.profile.is_some() {
            base.profile = self.profile.clone();
            base.n = None;
            base.k = None;
            base.design_snr_db = None;
        }
        if self.n.is_some() || self.k.is_some() || self.design_snr.is_some() {
            base.profile = None;
        }
        base.n = self.n.or(base.n);
        base.k = self.k.or(base.k);
        base.design_snr_db = self.design_snr.or(base.design_snr_db);
        if self.poly.is_some() {
            base.poly = self.poly.clone();
        }
        Ok(())
    }
}

/// Validates the recipe and fills in the default polynomial.
fn resolve_code(mut recipe: CodeRecipe) -> Result<CodeRecipe> {
    let scheme = recipe.scheme()?;
    recipe.scheme = scheme.to_string();
    match scheme {
        Scheme::Pac | Scheme::Rpac => {
            recipe.poly = Some(recipe.polynomial()?.to_string());
        }
        Scheme::Polar | Scheme::CrcPolar => {
            if recipe.poly.is_some() {
                bail!("--poly does not apply to {scheme}");
            }
        }
    }
    recipe.build()?;
    Ok(recipe)
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// support (weight-capped search), message (all 2^K codewords) or formula (polar only).
    #[arg(long, default_value = "support")]
    method: String,
    /// Largest codeword weight searched by the support method.
    #[arg(long, default_value_t = 4)]
    wcap: usize,
    /// Refuse support searches needing more candidates than this.
    #[arg(long, default_value_t = DEFAULT_SUPPORT_BUDGET)]
    budget: u128,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CosetArgs {
    /// Profile file written by `construct`.
    #[arg(long, conflicts_with_all = ["n", "k", "design_snr"])]
    profile: Option<PathBuf>,
    /// Block length when constructing on the fly.
    #[arg(long)]
    n: Option<usize>,
    /// Information indices when constructing on the fly.
    #[arg(long)]
    k: Option<usize>,
    /// Design SNR in dB (Es/N0) when constructing on the fly.
    #[arg(long = "design-snr", allow_negative_numbers = true)]
    design_snr: Option<f64>,
    /// Write the table here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Received hard decisions: N characters of 0/1, or N/4 hex digits
    /// (first digit holds bits 0..3, most significant first).
    #[arg(long)]
    input: PathBuf,
    /// List size L (1 gives SC-like behaviour).
    #[arg(long = "list-size")]
    list_size: usize,
    /// exact or approx branch metric.
    #[arg(long, default_value = "exact")]
    metric: String,
    /// boxplus or minsum check-node update.
    #[arg(long = "check-node", default_value = "boxplus")]
    check_node: String,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Experiment recipe (TOML); command-line flags override its fields.
    #[arg(long)]
    recipe: Option<PathBuf>,
    #[command(flatten)]
    code: CodeArgs,
    /// List size L.
    #[arg(long = "list-size")]
    list_size: Option<usize>,
    /// exact or approx branch metric.
    #[arg(long)]
    metric: Option<String>,
    /// boxplus or minsum check-node update.
    #[arg(long = "check-node")]
    check_node: Option<String>,
    /// Eb/N0 points in dB, comma separated; an empty value gives a header-only CSV.
    #[arg(long, value_delimiter = ',', num_args = 0.., allow_negative_numbers = true)]
    ebn0: Option<Vec<f64>>,
    /// Stop a point after this many block errors (default 100).
    #[arg(long = "min-errors")]
    min_errors: Option<u64>,
    /// Stop a point after this many frames (default 1000000).
    #[arg(long = "max-frames")]
    max_frames: Option<u64>,
    /// Seed of the noise and message generators (default 1).
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output; the resolved recipe is written next to it as <out>.recipe.toml.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add a union-bound column from a support search up to this weight.
    #[arg(long = "bound-wcap")]
    bound_wcap: Option<usize>,
    /// Candidate budget for that search.
    #[arg(long, default_value_t = DEFAULT_SUPPORT_BUDGET)]
    budget: u128,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(a) => construct(a),
        Command::Spectrum(a) => spectrum_cmd(a),
        Command::Cosets(a) => cosets(a),
        Command::Decode(a) => decode_cmd(a),
        Command::Simulate(a) => simulate(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// The resolved configuration as `#` comment lines.
fn header(command: &str, body: &str) -> String {
    let mut out = format!("# rpac {command} {}\n", env!("CARGO_PKG_VERSION"));
    for line in body.lines() {
        out.push_str(&format!("# {line}\n"));
    }
    out
}

fn code_header(code: &Code, recipe: &CodeRecipe) -> Result<String> {
    let mut body = toml::to_string(recipe)?;
    body.push_str(&code.profile().to_toml_string());
    Ok(body)
}

fn construct(a: ConstructArgs) -> Result<()> {
    let p = construct_profile(a.n, a.k, a.design_snr)?;
    match &a.profile_out {
        Some(path) => {
            save_profile(&p, path).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote ({},{}) profile to {}", a.n, a.k, path.display());
            Ok(())
        }
        None => emit(None, &p.to_toml_string()),
    }
}

fn spectrum_cmd(a: SpectrumArgs) -> Result<()> {
    let recipe = a.code.recipe()?;
    let code = recipe.build()?;
    let report = match a.method.as_str() {
        "support" => spectrum::enumerate_by_support(&code, a.wcap, a.budget)?,
        "message" => spectrum::enumerate_by_message(&code)?,
        "formula" => {
            if code.scheme() != Scheme::Polar {
                bail!("the formula method covers plain polar codes only");
            }
            spectrum::formula_report(code.profile())?
        }
        other => bail!("unknown method {other:?}: expected support, message or formula"),
    };
    let mut body = code_header(&code, &recipe)?;
    body.push_str(&format!("method = \"{}\"\nwcap = {}\nbudget = {}\n", a.method, a.wcap, a.budget));
    let mut text = header("spectrum", &body);
    text.push_str(&report.to_text());
    emit(a.out.as_deref(), &text)
}

fn cosets(a: CosetArgs) -> Result<()> {
    let profile = match (&a.profile, a.n, a.k, a.design_snr) {
        (Some(p), ..) => load_profile(p).with_context(|| format!("reading {}", p.display()))?,
        (None, Some(n), Some(k), Some(snr)) => construct_profile(n, k, snr)?,
        _ => bail!("give --profile or all of --n, --k, --design-snr"),
    };
    let wmin = compute_wmin(&profile)?;
    let mut text = header("cosets", &profile.to_toml_string());
    text.push_str(&format!("# wmin = {wmin}\n"));
    text.push_str(&format_coset_reports(&coset_reports(&profile)?, wmin));
    emit(a.out.as_deref(), &text)
}

/// Parses 0/1 characters or hex digits into `len` bits.
fn parse_word(text: &str, len: usize) -> Result<Vec<u8>> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.strip_prefix("0x").unwrap_or(&s);
    if s.len() == len && s.chars().all(|c| c == '0' || c == '1') {
        return Ok(s.bytes().map(|b| b - b'0').collect());
    }
    if s.len() * 4 == len {
        let mut bits = Vec::with_capacity(len);
        for c in s.chars() {
            let d = c.to_digit(16).with_context(|| format!("{c:?} is not a hex digit"))?;
            bits.extend((0..4).rev().map(|b| ((d >> b) & 1) as u8));
        }
        return Ok(bits);
    }
    bail!("input has {} characters; expected {len} binary digits or {} hex digits", s.len(), len / 4)
}

fn bit_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| char::from(b'0' + b)).collect()
}

fn decode_cmd(a: DecodeArgs) -> Result<()> {
    let recipe = a.code.recipe()?;
    let code = recipe.build()?;
    if a.list_size == 0 {
        bail!("--list-size must be at least 1");
    }
    let cfg = DecoderConfig::new(a.list_size)
        .with_metric(a.metric.parse::<MetricMode>()?)
        .with_check_node(a.check_node.parse::<CheckNode>()?);
    let decoder = DecoderRecipe { list_size: a.list_size, metric: a.metric, check_node: a.check_node };
    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let word = parse_word(&text, code.block_len())?;
    let llr = LlrBlock::new(word.iter().map(|&b| if b == 0 { 1.0 } else { -1.0 }).collect())?;
    let out = decode(&llr, &code, &cfg)?;

    let mut body = code_header(&code, &recipe)?;
    body.push_str("[decoder]\n");
    body.push_str(&toml::to_string(&decoder)?);
    body.push_str(&format!("input = \"{}\"\nnode_visits = {}\n", a.input.display(), out.node_visits));
    let mut report = header("decode", &body);
    report.push_str("rank,metric,crc_ok,message\n");
    for (r, p) in out.paths.iter().enumerate() {
        let crc = p.crc_ok.map_or_else(|| "-".to_string(), |c| c.to_string());
        report.push_str(&format!("{},{:.6},{},{}\n", r + 1, p.metric, crc, bit_string(&p.message)));
    }
    emit(None, &report)
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut recipe = match &a.recipe {
        Some(path) => Recipe::load(path).with_context(|| format!("reading {}", path.display()))?,
        None => Recipe {
            seed: 1,
            code: CodeRecipe {
                scheme: a.code.scheme().context("--scheme is required without --recipe")?,
                profile: None,
                n: None,
                k: None,
                design_snr_db: None,
                poly: None,
            },
            decoder: DecoderRecipe {
                list_size: a.list_size.context("--list-size is required without --recipe")?,
                metric: "exact".into(),
                check_node: "boxplus".into(),
            },
            sweep: SweepRecipe {
                ebn0_db: a.ebn0.clone().context("--ebn0 is required without --recipe")?,
                min_errors: 100,
                max_frames: 1_000_000,
            },
            output: OutputRecipe::default(),
        },
    };
    a.code.apply(&mut recipe.code)?;
    if let Some(l) = a.list_size {
        recipe.decoder.list_size = l;
    }
    if let Some(m) = &a.metric {
        recipe.decoder.metric = m.clone();
    }
    if let Some(c) = &a.check_node {
        recipe.decoder.check_node = c.clone();
    }
    if let Some(e) = &a.ebn0 {
        recipe.sweep.ebn0_db = e.clone();
    }
    recipe.sweep.min_errors = a.min_errors.unwrap_or(recipe.sweep.min_errors);
    recipe.sweep.max_frames = a.max_frames.unwrap_or(recipe.sweep.max_frames);
    recipe.seed = a.seed.unwrap_or(recipe.seed);
    if a.out.is_some() {
        recipe.output.csv = a.out.clone();
    }
    if a.bound_wcap.is_some() {
        recipe.output.bound_wcap = a.bound_wcap;
    }
    recipe.code = resolve_code(recipe.code)?;
    recipe.validate()?;

    let code = recipe.build_code()?;
    let cfg = recipe.decoder_config()?;
    let mut points = sim::run_bler(&code, &cfg, &recipe.sweep.ebn0_db, recipe.stop_rule()?, recipe.seed)?;
    if let Some(w) = recipe.output.bound_wcap {
        let spec = spectrum::enumerate_by_support(&code, w, a.budget)?;
        points = sim::overlay_union_bound(&points, &spec, &code)?;
    }

    let resolved = recipe.to_toml_string()?;
    match &recipe.output.csv {
        Some(path) => {
            let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            sim::write_csv(&points, file)?;
            let mut side = path.clone().into_os_string();
            side.push(".recipe.toml");
            fs::write(&side, resolved).with_context(|| format!("writing {side:?}"))?;
        }
        None => {
            sim::write_csv(&points, io::stdout().lock())?;
            eprint!("{}", header("simulate", &resolved));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rpac_core::precode::POLY_10;

    #[test]
    fn parse_binary_and_hex() {
        assert_eq!(parse_word("0110", 4).unwrap(), vec![0, 1, 1, 0]);
        assert_eq!(parse_word("a\n", 4).unwrap(), vec![1, 0, 1, 0]);
        assert_eq!(parse_word("0x0f", 8).unwrap(), vec![0, 0, 0, 0, 1, 1, 1, 1]);
        assert!(parse_word("012", 4).is_err());
        assert!(parse_word("g", 4).is_err());
    }

    #[test]
    fn default_poly_filled_in() {
        let r = resolve_code(CodeRecipe {
            scheme: "rpac".into(),
            profile: None,
            n: Some(16),
            k: Some(8),
            design_snr_db: Some(2.0),
            poly: None,
        })
        .unwrap();
        assert_eq!(r.poly.as_deref(), Some(POLY_10.map(|b| b.to_string()).join(",").as_str()));
    }
}
