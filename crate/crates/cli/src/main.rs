use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dmnbot::load::{self, SourceOptions};
use dmnbot::server::{app, AppState, DEFAULT_IDLE};
use dmnbot_core::compile::{compile, CompileOptions, DEFAULT_DECISION_BUDGET, DEFAULT_INPUT_BUDGET, DEFAULT_SEED};
use dmnbot_core::engine::validate_model;
use dmnbot_core::export::{bundle_digest, export_agent_bundle, export_chatito, write_bundle_dir, write_bundle_zip};
use dmnbot_core::io::ModelFormat;
use dmnbot_core::runtime::{render, Runtime, Status};

#[derive(Parser)]
#[command(name = "dmnbot", version, about = "Decision-table chatbots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Dmn,
    Json,
}

impl From<FormatArg> for ModelFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Dmn => ModelFormat::Dmn,
            FormatArg::Json => ModelFormat::Json,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum OutputFormat {
    Bundle,
    Chatito,
    Both,
}

#[derive(Args, Clone, Default)]
struct SourceArgs {
    /// Decision to serve; repeatable. Default: every root of the model.
    #[arg(long = "root")]
    roots: Vec<String>,
    /// Inputs phrased as "of an existing customer".
    #[arg(long)]
    of: Vec<String>,
    /// Derivable inputs to ask for instead of deriving.
    #[arg(long)]
    ask: Vec<String>,
    /// JSON synonyms file: {input: {reference: [synonym, ...]}}.
    #[arg(long)]
    synonyms: Option<PathBuf>,
    #[arg(long, value_enum)]
    model_format: Option<FormatArg>,
}

impl SourceArgs {
    fn options(&self) -> SourceOptions {
        SourceOptions {
            roots: self.roots.clone(),
            of: self.of.clone(),
            ask: self.ask.clone(),
            synonyms: self.synonyms.clone(),
            format: self.model_format.map(Into::into),
        }
    }
}

#[derive(Args, Clone)]
struct PhraseArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Training phrases per decision intent.
    #[arg(long, default_value_t = DEFAULT_DECISION_BUDGET)]
    budget: usize,
    /// Training phrases per input intent.
    #[arg(long, default_value_t = DEFAULT_INPUT_BUDGET)]
    input_budget: usize,
}

impl PhraseArgs {
    fn options(&self) -> CompileOptions {
        CompileOptions {
            seed: self.seed,
            decision_budget: self.budget,
            input_budget: self.input_budget,
            ..CompileOptions::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a model for overlapping rules and gaps.
    Validate {
        model: PathBuf,
        #[arg(long, value_enum)]
        model_format: Option<FormatArg>,
    },
    /// Build an agent from one or more models.
    Compile {
        #[arg(required = true)]
        models: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "bundle")]
        format: OutputFormat,
        /// Write the bundle as `<out>/agent.zip`.
        #[arg(long)]
        zip: bool,
        #[command(flatten)]
        phrases: PhraseArgs,
        #[command(flatten)]
        sources: SourceArgs,
    },
    /// Talk to an agent in the terminal.
    Chat {
        /// Bundle directory, bundle zip or model file.
        agent: PathBuf,
        /// Replay the user lines of this file and print the transcript.
        #[arg(long)]
        script: Option<PathBuf>,
        #[command(flatten)]
        phrases: PhraseArgs,
        #[command(flatten)]
        sources: SourceArgs,
    },
    /// Serve the chat API over HTTP.
    Serve {
        agent: PathBuf,
        #[arg(long, env = "DMNBOT_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Static files served next to the API.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
        #[command(flatten)]
        phrases: PhraseArgs,
        #[command(flatten)]
        sources: SourceArgs,
    },
}

/// Missing inputs are usage errors.
fn require(path: &Path) -> Result<(), ExitCode> {
    if path.exists() {
        Ok(())
    } else {
        eprintln!("error: {} does not exist", path.display());
        Err(ExitCode::from(2))
    }
}

fn validate(model: &Path, format: Option<FormatArg>) -> Result<ExitCode> {
    let model = load::read_model(model, format.map(Into::into))?;
    let conflicts = validate_model(&model);
    if conflicts.is_empty() {
        println!("ok: {} table(s), no conflicts", model.tables().count());
        return Ok(ExitCode::SUCCESS);
    }
    for c in &conflicts {
        println!("{c}");
    }
    println!("{} conflict(s)", conflicts.len());
    Ok(ExitCode::from(1))
}

fn compile_cmd(models: &[PathBuf], out: &Path, format: OutputFormat, zip: bool, phrases: &PhraseArgs, sources: &SourceArgs) -> Result<ExitCode> {
    let srcs = load::sources(models, &sources.options())?;
    let agent = compile(&srcs, &phrases.options()).context("compilation failed")?;
    let bundle = export_agent_bundle(&agent);
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    if format != OutputFormat::Chatito {
        if zip {
            std::fs::write(out.join("agent.zip"), write_bundle_zip(&bundle)?)?;
        } else {
            write_bundle_dir(&bundle, out)?;
        }
    }
    if format != OutputFormat::Bundle {
        let dir = if format == OutputFormat::Both { out.join("chatito") } else { out.to_path_buf() };
        std::fs::create_dir_all(&dir)?;
        for (name, text) in export_chatito(&agent) {
            std::fs::write(dir.join(name), text)?;
        }
    }
    let phrases: usize = agent.intents.iter().map(|i| i.training_phrases.len()).sum();
    println!("decisions: {}", agent.decisions.len());
    println!("intents: {}", agent.intents.len());
    println!("entities: {}", agent.entities.len());
    println!("phrases: {phrases}");
    println!("digest: {}", bundle_digest(&bundle));
    Ok(ExitCode::SUCCESS)
}

fn chat(agent: &Path, script: Option<&Path>, phrases: &PhraseArgs, sources: &SourceArgs) -> Result<ExitCode> {
    let runtime = Runtime::new(load::agent(agent, &sources.options(), &phrases.options())?)?;
    if let Some(script) = script {
        let text = std::fs::read_to_string(script).with_context(|| format!("cannot read {}", script.display()))?;
        print!("{}", render(&runtime.replay("script", &text).transcript));
        return Ok(ExitCode::SUCCESS);
    }
    let mut session = runtime.start("terminal");
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for t in &session.transcript {
        writeln!(out, "{}", t.text)?;
    }
    let stdin = std::io::stdin();
    loop {
        write!(out, "> ")?;
        out.flush()?;
        let mut line = String::new();
        if stdin.lock().read_line(&mut line)? == 0 {
            break;
        }
        if line.trim().is_empty() {
            continue;
        }
        for reply in runtime.step(&mut session, line.trim())? {
            writeln!(out, "{reply}")?;
        }
        if session.status == Status::Closed {
            break;
        }
    }
    Ok(ExitCode::SUCCESS)
}

async fn serve(agent: &Path, host: &str, port: u16, ui_dir: Option<PathBuf>, phrases: &PhraseArgs, sources: &SourceArgs) -> Result<ExitCode> {
    let runtime = Runtime::new(load::agent(agent, &sources.options(), &phrases.options())?)?;
    let app = app(AppState::new(runtime, DEFAULT_IDLE), ui_dir);
    let listener = tokio::net::TcpListener::bind((host, port))
        .await
        .with_context(|| format!("cannot listen on {host}:{port}"))?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { model, model_format } => {
            if let Err(code) = require(&model) {
                return Ok(code);
            }
            validate(&model, model_format)
        }
        Command::Compile { models, out, format, zip, phrases, sources } => {
            for m in &models {
                if let Err(code) = require(m) {
                    return Ok(code);
                }
            }
            compile_cmd(&models, &out, format, zip, &phrases, &sources)
        }
        Command::Chat { agent, script, phrases, sources } => {
            if let Err(code) = require(&agent) {
                return Ok(code);
            }
            chat(&agent, script.as_deref(), &phrases, &sources)
        }
        Command::Serve { agent, port, host, ui_dir, phrases, sources } => {
            if let Err(code) = require(&agent) {
                return Ok(code);
            }
            tokio::runtime::Runtime::new()?.block_on(serve(&agent, &host, port, ui_dir, &phrases, &sources))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
