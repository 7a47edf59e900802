use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use patchbot::api::{router, spawn_ticker, AppState, ServerConfig};
use patchbot::commands;
use patchbot_core::env::Action;
use patchbot_core::session::SessionConfig;

#[derive(Parser)]
#[command(name = "patchbot", version, about = "Explainable platformer agent with user-driven policy patches")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a base policy on a level.
    Train {
        level: String,
        #[arg(long, default_value_t = 50_000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "policy.txt")]
        policy: PathBuf,
        #[arg(long, default_value = "model.txt")]
        model: PathBuf,
    },
    /// Play one episode greedily and print the frames.
    Play {
        level: String,
        #[arg(long)]
        policy: Option<PathBuf>,
        #[arg(long, default_value_t = 599)]
        max_steps: usize,
        /// Also write the trace in its JSON-lines format.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Explain the action taken at one frame of an episode.
    Explain {
        level: String,
        #[arg(long)]
        policy: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        frame: usize,
        /// Ask why this action was not taken instead of why the chosen one was.
        #[arg(long)]
        whynot: Option<Action>,
        #[arg(long)]
        json: bool,
    },
    /// Play a level, apply a script of fixes and replay it.
    FixScript {
        level: String,
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        policy: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Write the patched policy here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Repair every bundled scenario and print outcomes and patch latency.
    Report {
        #[arg(long)]
        json: bool,
    },
    /// Serve the HTTP API and event stream for one session.
    Serve {
        level: String,
        #[arg(long)]
        policy: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        /// Tick rate multiplier; 1 plays at 10 frames per second.
        #[arg(long, default_value_t = 1.0)]
        speed: f64,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Train { level, steps, seed, policy, model } => {
            let lv = commands::load_level(&level)?;
            let brain = commands::train(&lv, steps, seed)?;
            commands::save_brain(&brain, &policy, &model)?;
            let (_, outcome) = commands::play(&lv, &brain, 599);
            println!("{} states, greedy run: {outcome:?}", brain.policy.len());
            println!("wrote {} and {}", policy.display(), model.display());
        }
        Command::Play { level, policy, max_steps, trace } => {
            let lv = commands::load_level(&level)?;
            let brain = commands::brain_or_base(policy.as_deref(), None)?;
            let (t, outcome) = commands::play(&lv, &brain, max_steps);
            print!("{}", commands::describe_trace(&t));
            println!("{outcome:?} after {} frames", t.len());
            if let Some(path) = trace {
                fs::write(&path, t.to_text()).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Explain { level, policy, model, frame, whynot, json } => {
            let lv = commands::load_level(&level)?;
            let brain = commands::brain_or_base(policy.as_deref(), model.as_deref())?;
            let (e, c) = commands::explain_frame(&lv, brain, frame, whynot)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&serde_json::json!({ "explanation": e, "contrast": c }))?);
            } else {
                println!("{}\n{}", e.rendered_text, c.rendered_text);
            }
        }
        Command::FixScript { level, script, policy, model, out, json } => {
            let lv = commands::load_level(&level)?;
            let brain = commands::brain_or_base(policy.as_deref(), model.as_deref())?;
            let report = commands::fix_script(&lv, brain.clone(), &script)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", commands::format_script_report(&report));
            }
            if let Some(path) = out {
                fs::write(&path, commands::patched_policy(&lv, brain, &script)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Report { json } => {
            let rows = commands::report()?;
            if json {
                let v: Vec<_> = rows.iter().map(|r| serde_json::json!({ "scenario": r.scenario, "report": r.report })).collect();
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else {
                print!("{}", commands::format_report(&rows));
            }
        }
        Command::Serve { level, policy, model, addr, speed } => {
            let lv = commands::load_level(&level)?;
            let brain = commands::brain_or_base(policy.as_deref(), model.as_deref())?;
            let state = AppState::new(ServerConfig { level: lv, brain, session: SessionConfig::default(), speed });
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                spawn_ticker(state.clone());
                let listener = tokio::net::TcpListener::bind(&addr).await.with_context(|| format!("binding {addr}"))?;
                println!("listening on http://{}", listener.local_addr()?);
                axum::serve(listener, router(state)).await?;
                anyhow::Ok(())
            })?;
        }
    }
    Ok(())
}
