//! tdeg: compute with transducer degrees of polynomial streams.
//!
//! Exit codes: 0 = success / claim holds; 1 = verification mismatch or an
//! incomparable pair; 2 = invalid input.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tdeg_core::certificate::{
    classify_certificate, divisibility_certificate, identity_certificate, Certificate,
    ReplayOutcome,
};
use tdeg_core::degrees::{
    canonicalize_1transform, compare, divisor_lattice, reduce_2transform, CanonicalDegree,
    Comparison, DegreeWitness,
};
use tdeg_core::exact::{Poly, Rat};
use tdeg_core::fst::Fst;
use tdeg_core::stream::StreamSpec;
use tdeg_core::weight::{single_product_poly, Weight};

#[derive(Parser)]
#[command(
    name = "tdeg",
    about = "Transducer degrees of polynomial streams: generate, transduce, classify, certify",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LatticeFormat {
    Dot,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a stream prefix as ASCII bits on stdout.
    Stream {
        /// Polynomial as JSON, e.g. '{"coeffs":["0","0","0","1"]}' for n^3.
        #[arg(long)]
        poly: String,
        /// Number of blocks to emit.
        #[arg(long)]
        blocks: u64,
        /// Additive offset: a nonnegative integer, or "auto" to use the
        /// least offset making every block nonnegative (printed on stderr).
        #[arg(long, default_value = "auto")]
        offset: String,
    },
    /// Run a machine on a bit word.
    FstRun {
        /// Machine description file (JSON).
        #[arg(long)]
        fst: PathBuf,
        /// Input bits inline.
        #[arg(long, conflicts_with = "stdin")]
        bits: Option<String>,
        /// Read input bits from stdin instead.
        #[arg(long)]
        stdin: bool,
    },
    /// Compose two machines (run first, then second) into one.
    FstCompose {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthesize the block-phase machine of an integer weight.
    FstFromWeight {
        /// Weight as JSON, e.g. '{"entries":["0","1"],"constant":"0"}'.
        #[arg(long)]
        weight: String,
        /// Leading blocks to skip.
        #[arg(long, default_value_t = 0)]
        skip: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the product polynomial of a weight with a polynomial.
    ApplyWeight {
        #[arg(long)]
        weight: String,
        #[arg(long)]
        poly: String,
    },
    /// Classify the degree of a weight's product with (n+shift)^3.
    Classify {
        #[arg(long, conflicts_with = "tuple", required_unless_present = "tuple")]
        weight: Option<String>,
        /// A tuple of weights as JSON ({"weights":[...]}); accepted only
        /// when its product with n^3 is a polynomial (shift must be 0).
        #[arg(long)]
        tuple: Option<String>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        shift: i64,
        /// Write the replayable certificate here.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Compare two canonical degrees: `one:<a>`, bottom, or zero.
    Compare {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// Write a stream-level certificate for the step (1-transform
        /// pairs where one side divides the other).
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Reduce the 2-transform a(pn+r)^3 + b(pn+s)^3 to a 3-transform.
    Reduce2 {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        s: u64,
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Canonicalize the 1-transform (an+b)^3 to its (a'n+1)^3 form.
    Canonicalize {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Export the divisibility lattice of degrees below the cube.
    Lattice {
        #[arg(long)]
        max: u64,
        #[arg(long, value_enum, default_value_t = LatticeFormat::Dot)]
        format: LatticeFormat,
    },
    /// Replay a certificate file.
    Verify {
        #[arg(long)]
        certificate: PathBuf,
        /// Target blocks to verify for stream certificates.
        #[arg(long, default_value_t = 30)]
        blocks: u64,
    },
}

struct CliError(String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

type CliResult = Result<u8, CliError>;

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError(format!("cannot write {}: {e}", path.display())))
}

fn parse_poly(json: &str) -> Result<Poly, CliError> {
    serde_json::from_str(json).map_err(|e| CliError(format!("invalid polynomial JSON: {e}")))
}

fn parse_weight(json: &str) -> Result<Weight, CliError> {
    serde_json::from_str(json).map_err(|e| CliError(format!("invalid weight JSON: {e}")))
}

fn load_fst(path: &Path) -> Result<Fst, CliError> {
    serde_json::from_str(&read_file(path)?)
        .map_err(|e| CliError(format!("invalid machine in {}: {e}", path.display())))
}

fn parse_degree(s: &str) -> Result<CanonicalDegree, CliError> {
    match s {
        "zero" => Ok(CanonicalDegree::Zero),
        "bottom" => Ok(CanonicalDegree::Bottom3),
        _ => {
            // "one:7" or a bare "7", both meaning the degree of (7n+1)^3
            let a = s
                .strip_prefix("one:")
                .unwrap_or(s)
                .parse::<u64>()
                .ok()
                .filter(|&a| a >= 1)
                .ok_or_else(|| {
                    CliError(format!(
                        "degree must be one:<a>, a positive integer, bottom, or zero, got {s:?}"
                    ))
                })?;
            Ok(CanonicalDegree::OneT(a))
        }
    }
}

fn write_certificate(path: &Path, cert: &Certificate) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(cert).map_err(|e| CliError(e.to_string()))?;
    write_file(path, &json)
}

fn cmd_stream(poly: &str, blocks: u64, offset: &str) -> CliResult {
    let poly = parse_poly(poly)?;
    let spec = if offset == "auto" {
        let spec = StreamSpec::with_auto_offset(poly)?;
        eprintln!("offset: {}", spec.offset());
        spec
    } else {
        let off = offset
            .parse()
            .map_err(|_| CliError(format!("offset must be \"auto\" or an integer, got {offset:?}")))?;
        StreamSpec::with_offset_from(poly, off, 0)?
    };
    // emitted block by block so huge prefixes never live in memory
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    const ZEROS: [u8; 8192] = [b'0'; 8192];
    for i in 0..blocks {
        out.write_all(b"1")?;
        let mut rest = spec.block_len(i)?;
        while rest > 0 {
            let n = rest.min(ZEROS.len() as u64) as usize;
            out.write_all(&ZEROS[..n])?;
            rest -= n as u64;
        }
    }
    out.write_all(b"\n")?;
    Ok(0)
}

/// Drives the machine over ASCII bits from `input`, writing ASCII output
/// as it goes. Whitespace is skipped; anything else is rejected.
fn run_streaming(machine: &Fst, mut input: impl Read, mut out: impl Write) -> CliResult {
    let mut cursor = machine.cursor();
    let mut buf = [0u8; 64 * 1024];
    let mut bits: Vec<u8> = Vec::with_capacity(buf.len());
    let mut emitted: Vec<u8> = Vec::new();
    loop {
        let n = input.read(&mut buf)?;
        if n == 0 {
            break;
        }
        bits.clear();
        for &byte in &buf[..n] {
            match byte {
                b'0' => bits.push(0),
                b'1' => bits.push(1),
                b' ' | b'\t' | b'\r' | b'\n' => {}
                other => {
                    return Err(CliError(format!(
                        "input bits may only contain '0' and '1', found {:?}",
                        other as char
                    )))
                }
            }
        }
        emitted.clear();
        cursor.feed(&bits, &mut emitted);
        for b in &mut emitted {
            *b += b'0';
        }
        out.write_all(&emitted)?;
    }
    out.write_all(b"\n")?;
    Ok(0)
}

fn cmd_fst_run(fst: &Path, bits: Option<&str>, use_stdin: bool) -> CliResult {
    let machine = load_fst(fst)?;
    let stdout = std::io::stdout();
    let out = std::io::BufWriter::new(stdout.lock());
    match (bits, use_stdin) {
        (Some(b), false) => run_streaming(&machine, b.as_bytes(), out),
        (None, true) => run_streaming(&machine, std::io::stdin().lock(), out),
        _ => Err(CliError("provide exactly one of --bits or --stdin".into())),
    }
}

fn cmd_apply_weight(weight: &str, poly: &str) -> CliResult {
    let weight = parse_weight(weight)?;
    let poly = parse_poly(poly)?;
    let product = single_product_poly(&weight, &poly);
    println!("{}", serde_json::to_string(&product).map_err(|e| CliError(e.to_string()))?);
    eprintln!("product: {product}");
    Ok(0)
}

fn cmd_classify_tuple(tuple: &str, shift: i64, certificate: Option<&Path>) -> CliResult {
    use tdeg_core::degrees::{classify_tuple, TupleClassification};
    use tdeg_core::weight::WeightTuple;
    if shift != 0 {
        return Err(CliError("tuple classification only supports --shift 0".into()));
    }
    let tuple: WeightTuple = serde_json::from_str(tuple)
        .map_err(|e| CliError(format!("invalid weight tuple JSON: {e}")))?;
    match classify_tuple(&tuple) {
        TupleClassification::Classified { beta, .. } => {
            println!("tuple product is the polynomial of the single weight {beta}");
            cmd_classify_weight(&beta, 0, certificate)
        }
        TupleClassification::NotPolynomial { residues } => {
            let mut msg = String::from(
                "refusing to classify: the tuple product of n^3 is not a polynomial; residue polynomials:",
            );
            for (r, p) in residues.iter().enumerate() {
                msg.push_str(&format!("\n  residue {r}: {p}"));
            }
            Err(CliError(msg))
        }
        TupleClassification::CollapseMismatch { product, .. } => Err(CliError(format!(
            "refusing to classify: the tuple product {product} is a polynomial but the collapse \
             only matches it on indices divisible by the tuple length; rotate the tuple so its \
             shortest weight comes first (a degree-preserving shift) and retry"
        ))),
    }
}

fn cmd_classify(weight: &str, shift: i64, certificate: Option<&Path>) -> CliResult {
    let weight = parse_weight(weight)?;
    cmd_classify_weight(&weight, shift, certificate)
}

fn cmd_classify_weight(weight: &Weight, shift: i64, certificate: Option<&Path>) -> CliResult {
    let cert = classify_certificate(weight, shift)?;
    println!("{}", cert.degree);
    println!("product: {}", cert.product);
    match &cert.witness {
        DegreeWitness::Constant { value } => {
            println!("case: constant weight; the stream 1 0^{value} repeats");
        }
        DegreeWitness::OneTransform {
            position,
            coefficient,
            period,
            residue,
            canon,
        } => {
            println!(
                "case: 1-transform; entry {coefficient} at position {position} of period {period}, residue {residue}"
            );
            for step in &canon.chain {
                println!("  {step}");
            }
            println!("canonical representative: ({}n+1)^3", canon.canonical);
        }
        DegreeWitness::TwoTransform {
            mapped_r,
            mapped_s,
            reduce2,
        } => {
            println!(
                "case: 2-transform at positions {mapped_r}, {mapped_s}; reduced with k = {} to a 3-transform on period {} (delta {})",
                reduce2.k, reduce2.period, reduce2.constant_delta
            );
        }
        DegreeWitness::MTransform { m, support } => {
            println!(
                "case: {m}-transform (positive entries at {support:?}); bottom degree by the m >= 3 collapse"
            );
        }
    }
    if let Some(path) = certificate {
        write_certificate(path, &Certificate::Classify(cert))?;
    }
    Ok(0)
}

fn cmd_compare(left: &str, right: &str, certificate: Option<&Path>) -> CliResult {
    let l = parse_degree(left)?;
    let r = parse_degree(right)?;
    let relation = compare(l, r);
    println!("{relation}");
    if let Some(path) = certificate {
        let cert = match (l, r, relation) {
            (CanonicalDegree::OneT(a), CanonicalDegree::OneT(b), Comparison::Above) => {
                divisibility_certificate(a, b / a)?
            }
            (CanonicalDegree::OneT(a), CanonicalDegree::OneT(b), Comparison::Below) => {
                divisibility_certificate(b, a / b)?
            }
            (CanonicalDegree::OneT(a), _, Comparison::Equivalent) => {
                identity_certificate(StreamSpec::new(Poly::linear_cubed(a as i64, 1))?)?
            }
            _ => {
                return Err(CliError(format!(
                    "no replayable certificate for {l} vs {r} ({relation})"
                )))
            }
        };
        write_certificate(path, &Certificate::Transduction(cert))?;
    }
    Ok(if relation == Comparison::Incomparable { 1 } else { 0 })
}

fn cmd_reduce2(
    a: &str,
    b: &str,
    p: u64,
    r: u64,
    s: u64,
    certificate: Option<&Path>,
) -> CliResult {
    let a: Rat = a.parse()?;
    let b: Rat = b.parse()?;
    let cert = reduce_2transform(&a, &b, p, r, s)?;
    let wrapped = Certificate::Reduce2(cert);
    println!(
        "{}",
        serde_json::to_string_pretty(&wrapped).map_err(|e| CliError(e.to_string()))?
    );
    if let Some(path) = certificate {
        write_certificate(path, &wrapped)?;
    }
    Ok(0)
}

fn cmd_canonicalize(a: u64, b: u64, certificate: Option<&Path>) -> CliResult {
    if a < 1 {
        return Err(CliError("period a must be at least 1".into()));
    }
    let (canonical, cert) = canonicalize_1transform(a, b);
    println!("canonical: {canonical}");
    println!("({a}n+{b})^3 is equivalent to ({canonical}n+1)^3");
    for step in &cert.chain {
        println!("  {step}");
    }
    if let Some(path) = certificate {
        write_certificate(path, &Certificate::Canon(cert))?;
    }
    Ok(0)
}

fn cmd_lattice(max: u64, format: LatticeFormat) -> CliResult {
    if max < 1 {
        return Err(CliError("--max must be at least 1".into()));
    }
    let lattice = divisor_lattice(max);
    match format {
        LatticeFormat::Dot => print!("{}", lattice.to_dot()),
        LatticeFormat::Json => println!(
            "{}",
            serde_json::to_string_pretty(&lattice.to_json()).map_err(|e| CliError(e.to_string()))?
        ),
    }
    Ok(0)
}

fn cmd_verify(certificate: &Path, blocks: u64) -> CliResult {
    let cert: Certificate = serde_json::from_str(&read_file(certificate)?)
        .map_err(|e| CliError(format!("invalid certificate: {e}")))?;
    match cert.replay(blocks) {
        ReplayOutcome::Ok => {
            println!("ok");
            Ok(0)
        }
        ReplayOutcome::Mismatch { position } => {
            println!("mismatch at bit {position}");
            Ok(1)
        }
        ReplayOutcome::Invalid { reason } => {
            println!("invalid: {reason}");
            Ok(1)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Stream {
            poly,
            blocks,
            offset,
        } => cmd_stream(&poly, blocks, &offset),
        Command::FstRun { fst, bits, stdin } => cmd_fst_run(&fst, bits.as_deref(), stdin),
        Command::FstCompose { first, second, out } => {
            let composed = load_fst(&first)?.compose(&load_fst(&second)?);
            write_file(
                &out,
                &serde_json::to_string_pretty(&composed).map_err(|e| CliError(e.to_string()))?,
            )?;
            Ok(0)
        }
        Command::FstFromWeight { weight, skip, out } => {
            let weight = parse_weight(&weight)?;
            let skip = usize::try_from(skip).map_err(|_| CliError("skip too large".into()))?;
            let machine = Fst::from_weight(&weight, skip)?;
            write_file(
                &out,
                &serde_json::to_string_pretty(&machine).map_err(|e| CliError(e.to_string()))?,
            )?;
            Ok(0)
        }
        Command::ApplyWeight { weight, poly } => cmd_apply_weight(&weight, &poly),
        Command::Classify {
            weight,
            tuple,
            shift,
            certificate,
        } => match (weight, tuple) {
            (Some(w), None) => cmd_classify(&w, shift, certificate.as_deref()),
            (None, Some(t)) => cmd_classify_tuple(&t, shift, certificate.as_deref()),
            _ => Err(CliError("provide exactly one of --weight or --tuple".into())),
        },
        Command::Compare {
            left,
            right,
            certificate,
        } => cmd_compare(&left, &right, certificate.as_deref()),
        Command::Reduce2 {
            a,
            b,
            p,
            r,
            s,
            certificate,
        } => cmd_reduce2(&a, &b, p, r, s, certificate.as_deref()),
        Command::Canonicalize { a, b, certificate } => {
            cmd_canonicalize(a, b, certificate.as_deref())
        }
        Command::Lattice { max, format } => cmd_lattice(max, format),
        Command::Verify {
            certificate,
            blocks,
        } => cmd_verify(&certificate, blocks),
    }
}

fn main() -> ExitCode {
    // die quietly when a downstream pipe (head, grep -m) closes early
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
