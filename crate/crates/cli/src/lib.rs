//! `lectern` command line. Exit codes are a stable contract; see [`EXIT_CODES`].

mod serve;

use std::ffi::OsString;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use lectern::accuracy::{run_bench, BenchConfig, DEFAULT_SIZES_PT, DEFAULT_THRESHOLD};
use lectern::doc::{extract_text_with, DocError, DocumentSource, SourceKind};
use lectern::ingest::{encode_frame, FrameError, DEFAULT_PORT};
use lectern::ocr::atlas::load_samples;
use lectern::ocr::font::{bundled_atlas, bundled_samples};
use lectern::ocr::{OcrError, TemplateAtlas};
use lectern::text::save_text;
use lectern::tts::{self, encode_wav, list_voices, synthesize, SynthesisParams, TtsError, DEFAULT_VOICE, SAMPLE_RATE};

pub use serve::{serve, ServeConfig};

pub const EXIT_CODES: &str = "\
Exit codes:
  0   success
  2   input file or atlas directory missing
  3   unsupported file extension
  4   input could not be parsed
  5   bad parameters (rate, volume, voice, sizes, filename)
  6   I/O or network failure
  7   ingest server rejected a file
  10  HTTP port could not be bound
  11  ingest port could not be bound
  64  usage error";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}: no such file or directory")]
    MissingInput(PathBuf),
    #[error("unsupported file extension: {0}")]
    UnsupportedExtension(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    BadParams(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Rejected(String),
    #[error("cannot bind HTTP port: {0}")]
    HttpBind(std::io::Error),
    #[error("cannot bind ingest port: {0}")]
    IngestBind(std::io::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MissingInput(_) => 2,
            CliError::UnsupportedExtension(_) => 3,
            CliError::Parse(_) => 4,
            CliError::BadParams(_) => 5,
            CliError::Io(_) => 6,
            CliError::Rejected(_) => 7,
            CliError::HttpBind(_) => 10,
            CliError::IngestBind(_) => 11,
            CliError::Usage(_) => 64,
        }
    }
}

impl From<DocError> for CliError {
    fn from(e: DocError) -> Self {
        match e {
            DocError::Io(e) => CliError::Io(e),
            DocError::UnsupportedFormat(m) => CliError::Parse(format!("unsupported format: {m}")),
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<TtsError> for CliError {
    fn from(e: TtsError) -> Self {
        CliError::BadParams(e.to_string())
    }
}

impl From<OcrError> for CliError {
    fn from(e: OcrError) -> Self {
        match e {
            OcrError::Io(e) => CliError::Io(e),
            other => CliError::Parse(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lectern", version, about = "Documents in, speech out", after_help = EXIT_CODES)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Extract text from a .pdf, .txt, .pgm or .png file into a text file.
    Convert {
        input: PathBuf,
        output: PathBuf,
        /// Atlas directory used for raster pages instead of the bundled font.
        #[arg(long)]
        atlas: Option<PathBuf>,
    },
    /// Synthesize a document or a literal string to a WAV file.
    Speak(SpeakArgs),
    /// Run the HTTP API, the ingest listener and the pipeline job loop.
    Serve(ServeArgs),
    /// Measure recognition accuracy over rendered font sizes.
    Bench(BenchArgs),
    /// Template atlas utilities.
    Atlas {
        #[command(subcommand)]
        command: AtlasCmd,
    },
    /// Push files to an ingest listener.
    Send {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, env = "LECTERN_INGEST_PORT", default_value_t = DEFAULT_PORT)]
        port: u16,
    },
    /// List the available voices.
    Voices,
}

#[derive(Debug, Subcommand)]
pub enum AtlasCmd {
    /// Write the bundled glyph samples as an editable atlas directory.
    Export { dir: PathBuf },
}

#[derive(Debug, Args)]
pub struct SpeakArgs {
    /// Document to read aloud.
    #[arg(conflicts_with = "text", required_unless_present = "text")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub text: Option<String>,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, default_value = DEFAULT_VOICE)]
    pub voice: String,
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    #[arg(long, default_value_t = 1.0)]
    pub volume: f64,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub bind: String,
    #[arg(long, env = "LECTERN_HTTP_PORT", default_value_t = 8080)]
    pub http_port: u16,
    #[arg(long, env = "LECTERN_INGEST_PORT", default_value_t = DEFAULT_PORT)]
    pub ingest_port: u16,
    #[arg(long, env = "LECTERN_WATCH_DIR", default_value = "inbox")]
    pub watch_dir: PathBuf,
    #[arg(long, env = "LECTERN_STORE_DIR", default_value = "store")]
    pub store_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated point sizes.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SIZES_PT)]
    pub sizes: Vec<u32>,
    /// Characters per size.
    #[arg(long, default_value_t = 1000)]
    pub chars: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Atlas directory; the bundled font when absent.
    #[arg(long)]
    pub atlas: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Fraction of glyph pixels flipped before scaling.
    #[arg(long, default_value_t = 0.0)]
    pub perturb: f64,
    /// Where the CSV report goes.
    #[arg(long, default_value = "bench.csv")]
    pub csv: PathBuf,
}

/// Parses and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 64 } else { 0 };
        }
    };
    match execute(cli.command, &mut std::io::stdout().lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("lectern: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cmd: Cmd, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Cmd::Convert { input, output, atlas } => convert(&input, &output, atlas.as_deref(), out),
        Cmd::Speak(a) => speak(&a, out),
        Cmd::Serve(a) => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(serve(ServeConfig::from_args(&a)?, shutdown_signal(), out))
        }
        Cmd::Bench(a) => bench(&a, out),
        Cmd::Atlas { command: AtlasCmd::Export { dir } } => {
            TemplateAtlas::save_dir(&bundled_samples(), &dir)?;
            writeln!(out, "wrote {} glyphs to {}", bundled_samples().len(), dir.display())?;
            Ok(())
        }
        Cmd::Send { files, host, port } => send(&files, &host, port, out),
        Cmd::Voices => {
            for v in list_voices() {
                writeln!(out, "{}\t{}", v.name, v.base_f0)?;
            }
            Ok(())
        }
    }
}

async fn shutdown_signal() {
    #[cfg(unix)]
    {
        use tokio::signal::unix::{signal, SignalKind};
        if let Ok(mut term) = signal(SignalKind::terminate()) {
            tokio::select! {
                _ = tokio::signal::ctrl_c() => {}
                _ = term.recv() => {}
            }
            return;
        }
    }
    let _ = tokio::signal::ctrl_c().await;
}

/// Reads a document, checking existence before the extension.
fn load_source(path: &Path) -> Result<DocumentSource, CliError> {
    if !path.exists() {
        return Err(CliError::MissingInput(path.to_path_buf()));
    }
    if SourceKind::from_path(path).is_none() {
        let ext = path.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_default();
        return Err(CliError::UnsupportedExtension(if ext.is_empty() { "(none)".into() } else { ext }));
    }
    Ok(DocumentSource::from_path(path)?)
}

fn load_atlas(dir: Option<&Path>) -> Result<std::borrow::Cow<'static, TemplateAtlas>, CliError> {
    match dir {
        None => Ok(std::borrow::Cow::Borrowed(bundled_atlas())),
        Some(d) if !d.is_dir() => Err(CliError::MissingInput(d.to_path_buf())),
        Some(d) => Ok(std::borrow::Cow::Owned(TemplateAtlas::load_dir(d)?)),
    }
}

fn convert(input: &Path, output: &Path, atlas: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let source = load_source(input)?;
    let atlas = load_atlas(atlas)?;
    let doc = extract_text_with(&source, &atlas)?;
    let bytes = save_text(&doc.pages, output)?;
    writeln!(out, "{}: {} pages, {} chars, {bytes} bytes", output.display(), doc.pages.len(), doc.char_count)?;
    Ok(())
}

fn speak(a: &SpeakArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = match (&a.input, &a.text) {
        (Some(p), None) => extract_text_with(&load_source(p)?, bundled_atlas())?.text(),
        (None, Some(t)) => t.clone(),
        _ => return Err(CliError::Usage("give exactly one of INPUT or --text".into())),
    };
    let params = SynthesisParams { rate: a.rate, volume: a.volume, voice: a.voice.clone() };
    let utterance = tts::plan_text(&text, &params)?;
    let clip = synthesize(&utterance, tts::voice(&params.voice)?, SAMPLE_RATE);
    std::fs::write(&a.output, encode_wav(&clip))?;
    writeln!(out, "{:.3} s, {} sentences", clip.duration_secs(), utterance.sentences.len())?;
    Ok(())
}

fn bench(a: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.sizes.is_empty() || a.sizes.contains(&0) {
        return Err(CliError::BadParams("sizes must be positive point sizes".into()));
    }
    if !(0.0..=1.0).contains(&a.perturb) || !(0.0..=1.0).contains(&a.threshold) {
        return Err(CliError::BadParams("perturb and threshold must lie in [0, 1]".into()));
    }
    let samples = match &a.atlas {
        None => bundled_samples(),
        Some(d) if !d.is_dir() => return Err(CliError::MissingInput(d.clone())),
        Some(d) => load_samples(d)?,
    };
    let config = BenchConfig { sizes_pt: a.sizes.clone(), chars: a.chars, seed: a.seed, threshold: a.threshold, perturb: a.perturb };
    let report = run_bench(&samples, &config)?;
    std::fs::write(&a.csv, report.to_csv())?;
    out.write_all(report.to_table().as_bytes())?;
    writeln!(out, "csv: {}", a.csv.display())?;
    Ok(())
}

fn send(files: &[PathBuf], host: &str, port: u16, out: &mut dyn Write) -> Result<(), CliError> {
    let mut frames = Vec::with_capacity(files.len());
    for f in files {
        if !f.is_file() {
            return Err(CliError::MissingInput(f.clone()));
        }
        let name = f.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
        let frame = encode_frame(&name, &std::fs::read(f)?).map_err(|e| match e {
            FrameError::Io(e) => CliError::Io(e),
            other => CliError::BadParams(format!("{}: {other}", f.display())),
        })?;
        frames.push((name, frame));
    }
    let mut stream = TcpStream::connect((host, port))?;
    let mut acks = BufReader::new(stream.try_clone()?);
    let mut rejected = Vec::new();
    for (name, frame) in frames {
        stream.write_all(&frame)?;
        let mut ack = String::new();
        acks.read_line(&mut ack)?;
        let ack = ack.trim_end();
        writeln!(out, "{name}: {}", if ack.is_empty() { "connection closed" } else { ack })?;
        if ack != "OK" {
            rejected.push(format!("{name} ({ack})"));
            if ack.is_empty() {
                break;
            }
        }
    }
    if rejected.is_empty() {
        Ok(())
    } else {
        Err(CliError::Rejected(format!("rejected: {}", rejected.join(", "))))
    }
}
