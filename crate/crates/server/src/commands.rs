//! The headless commands behind the CLI.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

use patchbot_core::env::{Action, Level};
use patchbot_core::explain::{ContrastReport, Explanation, Question};
use patchbot_core::mdp::{read_model, read_policy, write_model, write_policy, EmpiricalModel, ExploreConfig};
use patchbot_core::patch::write_patch;
use patchbot_core::scenario::{parse_script, run_fix_script, train_base, ScriptReport, SCENARIOS, TRAINING_LEVEL};
use patchbot_core::session::{play_episode, Brain, EpisodeTrace, Outcome, Session, SessionConfig};

/// A level file, or one of the bundled levels by name: `training`, `b1`..`b3`
/// or a scenario's full name.
pub fn load_level(arg: &str) -> Result<Level> {
    let path = Path::new(arg);
    let text = if path.exists() {
        fs::read_to_string(path).with_context(|| format!("reading {arg}"))?
    } else if arg == "training" {
        TRAINING_LEVEL.to_string()
    } else if let Some(sc) = SCENARIOS.iter().find(|s| s.name == arg || s.name.split('-').next() == Some(arg)) {
        sc.level.to_string()
    } else {
        bail!("{arg}: no such file or bundled level");
    };
    Level::parse(&text).with_context(|| format!("parsing level {arg}"))
}

/// Loads a policy file and, if given, the model it was solved from. Without a
/// model, explanations judge safety by simulation alone.
pub fn load_brain(policy: &Path, model: Option<&Path>) -> Result<Brain> {
    let text = fs::read_to_string(policy).with_context(|| format!("reading {}", policy.display()))?;
    let pf = read_policy(&text).with_context(|| format!("parsing {}", policy.display()))?;
    let model = match model {
        Some(m) => {
            let text = fs::read_to_string(m).with_context(|| format!("reading {}", m.display()))?;
            read_model(&text).with_context(|| format!("parsing {}", m.display()))?
        }
        None => EmpiricalModel::new(),
    };
    Ok(Brain { model, policy: pf.policy, values: pf.values, gamma: pf.gamma })
}

/// The bundled base policy unless a policy file is named.
pub fn brain_or_base(policy: Option<&Path>, model: Option<&Path>) -> Result<Brain> {
    match policy {
        Some(p) => load_brain(p, model),
        None => Ok(train_base()),
    }
}

pub fn train(level: &Level, steps: usize, seed: u64) -> Result<Brain> {
    let config = ExploreConfig { total_steps: steps, seed, ..Default::default() };
    Ok(Brain::train(level, &config)?)
}

pub fn save_brain(brain: &Brain, policy: &Path, model: &Path) -> Result<()> {
    fs::write(policy, write_policy(&brain.policy, &brain.values, brain.gamma))
        .with_context(|| format!("writing {}", policy.display()))?;
    fs::write(model, write_model(&brain.model)).with_context(|| format!("writing {}", model.display()))?;
    Ok(())
}

pub fn play(level: &Level, brain: &Brain, max_steps: usize) -> (EpisodeTrace, Outcome) {
    play_episode(level, &brain.policy, max_steps)
}

/// One line per frame: index, position and the action that led there.
pub fn describe_trace(trace: &EpisodeTrace) -> String {
    let mut out = String::new();
    for f in &trace.frames {
        let action = f.action.map_or("-", Action::name);
        writeln!(out, "{:>4} x={:<3} y={:<2} {:<14} {}", f.index, f.world.agent_x, f.world.agent_y, action, f.cumulative.total())
            .unwrap();
    }
    out
}

/// Plays the level, pauses at `frame` and asks about it.
pub fn explain_frame(
    level: &Level,
    brain: Brain,
    frame: usize,
    whynot: Option<Action>,
) -> Result<(Explanation, ContrastReport)> {
    let mut session = Session::start(level.clone(), Some(brain), SessionConfig::default())?;
    session.run_to_end();
    session.seek(frame)?;
    let question = whynot.map_or(Question::Why, Question::WhyNot);
    Ok(session.ask(question)?)
}

pub fn fix_script(level: &Level, brain: Brain, script: &Path) -> Result<ScriptReport> {
    let text = fs::read_to_string(script).with_context(|| format!("reading {}", script.display()))?;
    let requests = parse_script(&text).with_context(|| format!("parsing {}", script.display()))?;
    Ok(run_fix_script(level.clone(), brain, &requests, SessionConfig::default())?)
}

/// The patched policy of a script run, in policy-file format with its patches.
pub fn patched_policy(level: &Level, brain: Brain, script: &Path) -> Result<String> {
    let text = fs::read_to_string(script)?;
    let requests = parse_script(&text)?;
    let mut session = Session::start(level.clone(), Some(brain), SessionConfig::default())?;
    session.run_to_end();
    for mut request in requests {
        if request.anchor_frame.is_none() {
            request.anchor_frame =
                session.trace().frames.iter().position(|f| f.world.alive && request.predicate().matches_key(&f.state_key));
        }
        let Some(anchor) = request.anchor_frame else { bail!("no frame shows {}", request.predicate().to_text()) };
        session.seek(anchor)?;
        session.submit_fix(request)?;
        session.resume()?;
        session.run_to_end();
    }
    let b = session.brain();
    let mut out = write_policy(&b.policy, &b.values, b.gamma);
    for p in session.patches() {
        write_patch(&mut out, p);
    }
    Ok(out)
}

pub fn format_script_report(r: &ScriptReport) -> String {
    let mut out = String::new();
    let outcome = |o: Option<Outcome>| o.map_or("running".to_string(), |o| format!("{o:?}"));
    writeln!(out, "base: {} after {} frames", outcome(r.base_outcome), r.base_frames).unwrap();
    for f in &r.fixes {
        writeln!(
            out,
            "fix #{} at frame {}: {} -> {} for {}; {} relevant states; {} successes, {} failures, {} steps, {} ms; resumed: {}",
            f.patch_id,
            f.anchor_frame,
            f.request.predicate().to_text(),
            f.request.action,
            f.request.goal.title(),
            f.relevant_states,
            f.stats.successes,
            f.stats.failures,
            f.stats.exploration_steps,
            f.stats.wall_time_ms,
            outcome(f.resumed_outcome),
        )
        .unwrap();
    }
    writeln!(out, "final: {:?} after {} frames", r.final_outcome, r.final_frames).unwrap();
    writeln!(out, "repaired: {}", if r.repaired() { "yes" } else { "no" }).unwrap();
    out
}

#[derive(Debug, Clone)]
pub struct ReportRow {
    pub scenario: &'static str,
    pub report: ScriptReport,
}

/// Runs every bundled scenario against the bundled base policy.
pub fn report() -> Result<Vec<ReportRow>> {
    let brain = train_base();
    SCENARIOS
        .iter()
        .map(|sc| {
            let report = run_fix_script(sc.level(), brain.clone(), &sc.script(), SessionConfig::default())?;
            Ok(ReportRow { scenario: sc.name, report })
        })
        .collect()
}

pub fn format_report(rows: &[ReportRow]) -> String {
    let mut out = String::new();
    writeln!(out, "{:<24} {:<9} {:<9} {:>5} {:>9} {:>8} {:>10}", "scenario", "base", "fixed", "fixes", "succ/fail", "patch ms", "repaired").unwrap();
    for row in rows {
        let r = &row.report;
        let (succ, fail) = r.fixes.iter().fold((0, 0), |(s, f), x| (s + x.stats.successes, f + x.stats.failures));
        writeln!(
            out,
            "{:<24} {:<9} {:<9} {:>5} {:>9} {:>8} {:>10}",
            row.scenario,
            r.base_outcome.map_or("running".into(), |o| format!("{o:?}")),
            format!("{:?}", r.final_outcome),
            r.fixes.len(),
            format!("{succ}/{fail}"),
            r.max_patch_ms(),
            if r.repaired() { "yes" } else { "no" },
        )
        .unwrap();
    }
    let repaired = rows.iter().filter(|r| r.report.repaired()).count();
    writeln!(out, "repaired {repaired}/{}", rows.len()).unwrap();
    out
}
