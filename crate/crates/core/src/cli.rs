//! Command-line front end.
//!
//! Codeword files start with `key=value` header lines (`k`, `s`, `m`,
//! `primitive`, `w_p`, `n`) so the decoder can rebuild the same parameters.
//! In text format each following line is one word of `0`/`1` characters. In
//! binary format the header (empty for message files) is followed by a blank
//! line and then one record per word: a big-endian `u32` bit count and the
//! bits packed MSB first.
//!
//! `corrupt` derives the seed of line `i` (0-based) as
//! `splitmix64(seed + i)`, so any line can be reproduced on its own.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::bitstring::{corrupt, delete_at, for_each_flip_set, BitString};
use crate::codec::{decode, encode, CodecParams};
use crate::error::{Error, Result};
use crate::oracle::{decode_cr, separation_sweep, sieve_cr, verify_code, DEFAULT_MAX_N};

#[derive(Debug, Parser)]
#[command(name = "delsub", version, about = "Single-deletion, multiple-substitution correcting code")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Bin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyKind {
    Lemma3,
    Roundtrip,
    Sieve,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Io {
    /// Input file (stdin when absent).
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long = "out")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the code parameters for (k, s).
    Params {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        s: usize,
    },
    /// Encode k-bit message lines.
    Encode {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        s: usize,
        #[command(flatten)]
        io: Io,
    },
    /// Apply one deletion and up to s substitutions to each codeword.
    Corrupt {
        /// Substitution budget; defaults to the header's s.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        io: Io,
    },
    /// Decode corrupted codewords back to messages.
    Decode {
        #[command(flatten)]
        io: Io,
    },
    /// Run a verification suite and print a JSON summary.
    Verify {
        #[arg(value_enum)]
        kind: VerifyKind,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        /// Block length for the checksum separation sweep.
        #[arg(long = "L")]
        len: Option<usize>,
        /// Word length for sieve.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random messages for a roundtrip run.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Corruptions per message for a random roundtrip run.
        #[arg(long, default_value_t = 5)]
        corruptions: usize,
        /// Sweep every message, deletion and substitution pattern.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: usize,
    },
    /// Same as `verify lemma3`.
    #[command(name = "verify-lemma3")]
    VerifyLemma3 {
        #[arg(long = "L")]
        len: usize,
        #[arg(long)]
        s: usize,
    },
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Params { k, s } => {
            let params = CodecParams::derive(k, s)?;
            write_io(out, params_report(&params).as_bytes())?;
            Ok(0)
        }
        Command::Encode { k, s, io } => cmd_encode(k, s, &io, out),
        Command::Corrupt { s, seed, io } => cmd_corrupt(s, seed, &io, out),
        Command::Decode { io } => cmd_decode(&io, out, err),
        Command::Verify { kind, k, s, len, n, seed, trials, corruptions, exhaustive, max_n } => {
            let need = |v: Option<usize>, name: &str| {
                v.ok_or_else(|| Error::InvalidParams(format!("verify {kind:?} needs --{name}")))
            };
            let report = match kind {
                VerifyKind::Lemma3 => verify_separation(need(len, "L")?, need(s, "s")?)?,
                VerifyKind::Roundtrip => {
                    let params = CodecParams::derive(need(k, "k")?, need(s, "s")?)?;
                    let report = if exhaustive {
                        roundtrip_exhaustive(&params)?
                    } else {
                        roundtrip_random(&params, trials, corruptions, seed)?
                    };
                    report.to_json()
                }
                VerifyKind::Sieve => verify_sieve(need(n, "n")?, need(s, "s")?, max_n)?,
            };
            emit_report(out, &report)
        }
        Command::VerifyLemma3 { len, s } => emit_report(out, &verify_separation(len, s)?),
    }
}

fn emit_report(out: &mut dyn Write, report: &Value) -> Result<i32> {
    let text = serde_json::to_string_pretty(report).map_err(|e| Error::Parse(e.to_string()))?;
    write_io(out, format!("{text}\n").as_bytes())?;
    Ok(if report["passed"] == json!(true) { 0 } else { 1 })
}

fn io_err(e: io::Error) -> Error {
    Error::Parse(format!("I/O: {e}"))
}

fn write_io(out: &mut dyn Write, bytes: &[u8]) -> Result<()> {
    out.write_all(bytes).map_err(io_err)
}

/// The `params` report: one `key=value` per line.
pub fn params_report(p: &CodecParams) -> String {
    let code = p.code();
    let generator: String = code.generator_coefficients().iter().map(|b| char::from(b'0' + b)).collect();
    let mut lines = vec![
        format!("k={}", p.k()),
        format!("s={}", p.s()),
        format!("m={}", code.m()),
        format!("primitive=0x{:x}", code.primitive_poly()),
        format!("generator={generator}"),
        format!("kprime={}", code.kprime()),
        format!("n0={}", p.n0()),
        format!("w_p={}", p.w_p()),
        format!("n1={}", p.n1()),
        format!("n2={}", p.n2()),
        format!("fold={}", p.fold()),
        format!("n={}", p.n()),
        format!("redundancy={}", p.redundancy()),
        format!("reference={:.3}", p.reference_redundancy()),
    ];
    lines.push(String::new());
    lines.join("\n")
}

fn header_lines(p: &CodecParams) -> String {
    format!(
        "k={}\ns={}\nm={}\nprimitive=0x{:x}\nw_p={}\nn={}\n",
        p.k(),
        p.s(),
        p.code().m(),
        p.code().primitive_poly(),
        p.w_p(),
        p.n()
    )
}

/// Rebuilds parameters from header fields and checks every field matches.
fn params_from_header(fields: &[(String, String)]) -> Result<CodecParams> {
    let get = |key: &str| {
        fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::Parse(format!("header is missing `{key}`")))
    };
    let num = |key: &str| -> Result<usize> {
        get(key)?.parse().map_err(|_| Error::Parse(format!("header field `{key}` is not a number")))
    };
    let params = CodecParams::derive(num("k")?, num("s")?)?;
    let expected = header_lines(&params);
    for line in expected.lines() {
        let (key, value) = line.split_once('=').expect("header line");
        if let Ok(found) = get(key) {
            if found != value {
                return Err(Error::Parse(format!("header field `{key}` is {found}, expected {value}")));
            }
        }
    }
    Ok(params)
}

struct Document {
    header: Vec<(String, String)>,
    /// (1-based line number, parsed word)
    words: Vec<(usize, std::result::Result<BitString, Error>)>,
}

fn read_input(path: &Option<PathBuf>) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    match path {
        Some(p) => {
            File::open(p).and_then(|mut f| f.read_to_end(&mut bytes)).map_err(io_err)?;
        }
        None => {
            io::stdin().lock().read_to_end(&mut bytes).map_err(io_err)?;
        }
    }
    Ok(bytes)
}

fn parse_document(bytes: &[u8], format: Format) -> Result<Document> {
    let mut reader = BufReader::new(bytes);
    let mut header = Vec::new();
    let mut words = Vec::new();
    let mut line_no = 0;
    let mut line = String::new();
    loop {
        line.clear();
        let read = reader.read_line(&mut line).map_err(io_err)?;
        if read == 0 {
            break;
        }
        line_no += 1;
        let trimmed = line.trim();
        if let Some((k, v)) = trimmed.split_once('=') {
            header.push((k.trim().to_string(), v.trim().to_string()));
            continue;
        }
        match format {
            Format::Bin => {
                if !trimmed.is_empty() {
                    return Err(Error::Parse(format!("line {line_no}: expected blank line after header")));
                }
                break;
            }
            Format::Text => {
                if trimmed.is_empty() {
                    continue;
                }
                let parsed = trimmed.parse::<BitString>();
                words.push((line_no, parsed));
            }
        }
    }
    if format == Format::Bin {
        let mut record = 0;
        loop {
            let mut len_bytes = [0u8; 4];
            match reader.read_exact(&mut len_bytes) {
                Ok(()) => {}
                Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => break,
                Err(e) => return Err(io_err(e)),
            }
            record += 1;
            let len = u32::from_be_bytes(len_bytes) as usize;
            let mut packed = vec![0u8; len.div_ceil(8)];
            reader
                .read_exact(&mut packed)
                .map_err(|_| Error::Parse(format!("record {record}: truncated")))?;
            let bits = (0..len).map(|i| packed[i / 8] >> (7 - i % 8) & 1 == 1);
            words.push((record, Ok(BitString::from_bools(bits))));
        }
    }
    Ok(Document { header, words })
}

fn write_words<'a>(
    out: &mut dyn Write,
    header: Option<&str>,
    words: impl IntoIterator<Item = &'a BitString>,
    format: Format,
) -> Result<()> {
    let mut buf = Vec::new();
    if let Some(h) = header {
        buf.extend_from_slice(h.as_bytes());
    }
    if format == Format::Bin {
        buf.push(b'\n');
    }
    for w in words {
        match format {
            Format::Text => {
                buf.extend_from_slice(w.to_string().as_bytes());
                buf.push(b'\n');
            }
            Format::Bin => {
                buf.extend_from_slice(&(w.len() as u32).to_be_bytes());
                let mut packed = vec![0u8; w.len().div_ceil(8)];
                for (i, &b) in w.as_slice().iter().enumerate() {
                    packed[i / 8] |= b << (7 - i % 8);
                }
                buf.extend_from_slice(&packed);
            }
        }
    }
    write_io(out, &buf)
}

fn with_output(io: &Io, out: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match &io.output {
        Some(path) => {
            let mut file = File::create(path).map_err(io_err)?;
            f(&mut file)
        }
        None => f(out),
    }
}

fn cmd_encode(k: usize, s: usize, io: &Io, out: &mut dyn Write) -> Result<i32> {
    let params = CodecParams::derive(k, s)?;
    let doc = parse_document(&read_input(&io.input)?, io.format)?;
    let mut messages = Vec::with_capacity(doc.words.len());
    for (line, word) in doc.words {
        let word = word.map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
        if word.len() != k {
            return Err(Error::Parse(format!("line {line}: expected {k} bits, got {}", word.len())));
        }
        messages.push(word);
    }
    let codewords = messages
        .par_iter()
        .map(|x| encode(x, &params).map(|c| c.into_bits()))
        .collect::<Result<Vec<_>>>()?;
    with_output(io, out, |w| write_words(w, Some(&header_lines(&params)), &codewords, io.format))?;
    Ok(0)
}

/// Seed of line `index` under master seed `seed`.
pub fn line_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn cmd_corrupt(s: Option<usize>, seed: u64, io: &Io, out: &mut dyn Write) -> Result<i32> {
    let doc = parse_document(&read_input(&io.input)?, io.format)?;
    let params = params_from_header(&doc.header)?;
    let s = s.unwrap_or(params.s());
    let mut corrupted = Vec::with_capacity(doc.words.len());
    for (index, (line, word)) in doc.words.into_iter().enumerate() {
        let word = word.map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
        if word.len() != params.n() {
            return Err(Error::Parse(format!("line {line}: expected {} bits, got {}", params.n(), word.len())));
        }
        corrupted.push(corrupt(&word, s, line_seed(seed, index as u64))?);
    }
    with_output(io, out, |w| write_words(w, Some(&header_lines(&params)), &corrupted, io.format))?;
    Ok(0)
}

fn cmd_decode(io: &Io, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let doc = parse_document(&read_input(&io.input)?, io.format)?;
    let params = params_from_header(&doc.header)?;
    let results: Vec<(usize, Result<BitString>)> = doc
        .words
        .into_par_iter()
        .map(|(line, word)| (line, word.and_then(|w| decode(&w, &params))))
        .collect();
    let mut messages = Vec::new();
    let mut failures = 0;
    for (line, result) in results {
        match result {
            Ok(m) => messages.push(m),
            Err(e) => {
                failures += 1;
                writeln!(err, "line {line}: {e}").map_err(io_err)?;
            }
        }
    }
    with_output(io, out, |w| write_words(w, None, &messages, io.format))?;
    Ok(if failures == 0 { 0 } else { 1 })
}

fn verify_separation(len: usize, s: usize) -> Result<Value> {
    let start = Instant::now();
    let report = separation_sweep(len, s)?;
    let witness = report.violations.first().map(|(a, b)| json!([a.to_string(), b.to_string()]));
    Ok(json!({
        "kind": "lemma3",
        "L": len,
        "s": s,
        "strings": report.strings,
        "buckets": report.buckets,
        "pairs_checked": report.pairs_checked,
        "violations": report.violations.len(),
        "witness": witness,
        "passed": report.violations.is_empty(),
        "wall_ms": start.elapsed().as_millis() as u64,
    }))
}

fn verify_sieve(n: usize, s: usize, max_n: usize) -> Result<Value> {
    let start = Instant::now();
    let code = sieve_cr(n, s, max_n)?;
    let witness = verify_code(code.codebook(), s)?;
    let mut trials = 0usize;
    let mut failures = 0usize;
    for c in code.codebook() {
        for y in corruptions_of(c, s)? {
            trials += 1;
            if decode_cr(&y, &code).as_ref() != Ok(c) {
                failures += 1;
            }
        }
    }
    let pigeonhole = code.pigeonhole_bound();
    let residue: Vec<String> = code.residue().components().iter().map(|r| r.to_string()).collect();
    let passed = witness.is_none() && failures == 0 && code.codebook().len() >= pigeonhole;
    Ok(json!({
        "kind": "sieve",
        "n": n,
        "s": s,
        "nonempty_buckets": code.nonempty_buckets(),
        "codebook_size": code.codebook().len(),
        "pigeonhole_bound": pigeonhole,
        "residue": residue,
        "disjoint": witness.is_none(),
        "witness": witness.map(|(a, b)| json!([a.to_string(), b.to_string()])),
        "decode_trials": trials,
        "decode_failures": failures,
        "passed": passed,
        "wall_ms": start.elapsed().as_millis() as u64,
    }))
}

/// Every distinct word reachable from `c` by one deletion and at most `s`
/// substitutions.
pub fn corruptions_of(c: &BitString, s: usize) -> Result<BTreeSet<BitString>> {
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    for i in 1..=c.len() {
        let y = delete_at(c, i)?;
        if !seen.insert(y.clone()) {
            continue;
        }
        let mut z = y.clone();
        for_each_flip_set(y.len(), s, None, |flips| {
            for &p in flips {
                z.flip(p);
            }
            out.insert(z.clone());
            for &p in flips {
                z.flip(p);
            }
        });
    }
    Ok(out)
}

/// Outcome of a round-trip sweep.
#[derive(Debug, Clone, Default)]
pub struct RoundtripReport {
    pub k: usize,
    pub s: usize,
    pub n: usize,
    pub messages: usize,
    pub trials: usize,
    /// (message, corrupted word, error or wrong output)
    pub failures: Vec<(BitString, BitString, String)>,
    pub wall_ms: u64,
}

impl RoundtripReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let first = self.failures.first().map(|(x, y, e)| json!({"message": x.to_string(), "word": y.to_string(), "error": e}));
        json!({
            "kind": "roundtrip",
            "k": self.k,
            "s": self.s,
            "n": self.n,
            "messages": self.messages,
            "trials": self.trials,
            "failures": self.failures.len(),
            "first_failure": first,
            "passed": self.passed(),
            "wall_ms": self.wall_ms,
        })
    }
}

fn check_decode(x: &BitString, y: &BitString, params: &CodecParams) -> Option<(BitString, BitString, String)> {
    match decode(y, params) {
        Ok(m) if m == *x => None,
        Ok(m) => Some((x.clone(), y.clone(), format!("decoded to {m}"))),
        Err(e) => Some((x.clone(), y.clone(), e.to_string())),
    }
}

/// Every message, every deletion position, every substitution pattern of
/// weight at most `s`. Duplicate corrupted words are decoded once.
pub fn roundtrip_exhaustive(params: &CodecParams) -> Result<RoundtripReport> {
    if params.k() > 16 {
        return Err(Error::TooLarge { n: params.k(), max: 16 });
    }
    let start = Instant::now();
    let mut report = RoundtripReport { k: params.k(), s: params.s(), n: params.n(), ..Default::default() };
    for x in BitString::all_of_length(params.k()) {
        let c = encode(&x, params)?.into_bits();
        let words: Vec<BitString> = corruptions_of(&c, params.s())?.into_iter().collect();
        report.messages += 1;
        report.trials += words.len();
        let failures: Vec<_> = words.par_iter().filter_map(|y| check_decode(&x, y, params)).collect();
        report.failures.extend(failures);
    }
    report.wall_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// `messages` random messages, each hit by `per_message` seeded channel
/// draws.
pub fn roundtrip_random(params: &CodecParams, messages: usize, per_message: usize, seed: u64) -> Result<RoundtripReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<BitString> =
        (0..messages).map(|_| BitString::from_bools((0..params.k()).map(|_| rng.gen_bool(0.5)))).collect();
    let per: Vec<Vec<(BitString, BitString, String)>> = inputs
        .par_iter()
        .enumerate()
        .map(|(i, x)| -> Result<Vec<_>> {
            let c = encode(x, params)?.into_bits();
            let mut failures = Vec::new();
            for j in 0..per_message {
                let y = corrupt(&c, params.s(), line_seed(seed, (i * per_message + j) as u64))?;
                failures.extend(check_decode(x, &y, params));
            }
            Ok(failures)
        })
        .collect::<Result<_>>()?;
    Ok(RoundtripReport {
        k: params.k(),
        s: params.s(),
        n: params.n(),
        messages,
        trials: messages * per_message,
        failures: per.into_iter().flatten().collect(),
        wall_ms: start.elapsed().as_millis() as u64,
    })
}
