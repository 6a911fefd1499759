use std::fmt::Write as _;
use std::io::{BufRead, Read};
use std::sync::Arc;

use rescue_core::sim::{self, render_bench_table, render_table, BenchSpec, Scenario, ScenarioFile, WorkloadSpec};
use rescue_core::TimePoint;
use rescue_service::{Dispatcher, Genesis, SystemClock};
use rescue_text::{evaluate, extract_features, preprocess, read_corpus, synthetic_corpus, EvalReport, LinearModel, TrainConfig};
use serde_json::json;

use crate::error::{read_input, write_output, CliError, Result};
use crate::{BenchArgs, ClassifyArgs, GenerateArgs, ReplayArgs, ServeArgs, TextInput, TrainArgs};

fn to_usize(n: u64) -> usize {
    usize::try_from(n).unwrap_or(usize::MAX)
}

fn pretty(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

pub fn replay(a: ReplayArgs) -> Result<()> {
    let mut scenario = Scenario::from_json(&read_input(&a.scenario)?)?;
    if let Some(n) = a.units {
        scenario = scenario.with_unit_count(to_usize(n))?;
    }
    let out = sim::replay(&scenario, a.policy)?;
    if !out.metrics_agree() {
        return Err(CliError::Runtime("incremental metrics disagree with the recomputed ones".into()));
    }
    print!("{}", render_table(&out.schedule.entries));
    for u in &out.schedule.unschedulable {
        println!("unschedulable {}: {}", u.task_id, u.reason);
    }
    if !out.schedule.pending.is_empty() {
        println!("pending {}", out.schedule.pending.join(","));
    }
    println!("{}", out.summary_line());
    if let Some(path) = &a.out {
        write_output(path, &pretty(&out.document()))?;
    }
    Ok(())
}

pub fn bench(a: BenchArgs) -> Result<()> {
    let mut spec = match &a.spec {
        Some(path) => BenchSpec::from_json(&read_input(path)?)?,
        None => BenchSpec::default(),
    };
    if !a.policies.is_empty() {
        spec.policies = a.policies;
    }
    if !a.units.is_empty() {
        spec.unit_counts = a.units.into_iter().map(to_usize).collect();
    }
    if !a.seeds.is_empty() {
        spec.seeds = a.seeds;
    }
    let report = sim::bench(&spec)?;
    print!("{}", render_bench_table(&report));
    if let Some(path) = &a.out {
        write_output(path, &pretty(&report))?;
    }
    if let Some(path) = &a.csv {
        write_output(path, &report.series_csv()?)?;
    }
    Ok(())
}

pub fn generate(a: GenerateArgs) -> Result<()> {
    let mut spec: WorkloadSpec = match &a.spec {
        Some(path) => serde_json::from_str(&read_input(path)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?,
        None => WorkloadSpec::default(),
    };
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    if let Some(n) = a.count {
        spec.count = to_usize(n);
    }
    if let Some(n) = a.units {
        spec.units = to_usize(n);
    }
    let file = sim::generate(&spec)?;
    let mut text = file.to_json();
    text.push('\n');
    match &a.out {
        Some(path) => write_output(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn texts(input: &TextInput) -> Result<Vec<String>> {
    if !input.text.is_empty() {
        return Ok(input.text.clone());
    }
    let raw = match &input.input {
        Some(path) => read_input(path)?,
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Runtime(format!("stdin: {e}")))?;
            s
        }
    };
    Ok(raw.as_bytes().lines().map_while(std::result::Result::ok).filter(|l| !l.trim().is_empty()).collect())
}

pub fn features(a: TextInput) -> Result<()> {
    for text in texts(&a)? {
        let line = json!({
            "text": text,
            "tokens": preprocess(&text).tokens,
            "features": extract_features(&text),
        });
        println!("{line}");
    }
    Ok(())
}

fn load_model(path: &std::path::Path) -> Result<LinearModel> {
    Ok(LinearModel::from_json(&read_input(path)?)?)
}

fn render_eval(report: &EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<14} {:>8} {:>10} {:>8} {:>8} {:>9} {:>7}", "label", "support", "precision", "recall", "f1", "accuracy", "auc");
    for c in &report.classes {
        let auc = c.auc.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:<14} {:>8} {:>10.1} {:>8.1} {:>8.1} {:>9.1} {:>7}",
            c.label.name(),
            c.support,
            c.precision,
            c.recall,
            c.f1,
            c.accuracy,
            auc
        );
    }
    let w = &report.weighted;
    let _ = writeln!(out, "{:<14} {:>8} {:>10.1} {:>8.1} {:>8.1} {:>9.1}", "weighted", report.examples, w.precision, w.recall, w.f1, w.accuracy);
    out
}

fn eval_model(model: &LinearModel, corpus: &[rescue_text::LabeledText]) -> Result<EvalReport> {
    let results: Vec<_> = corpus.iter().map(|c| model.classify(&c.text)).collect();
    let predicted: Vec<_> = results.iter().map(|r| r.labels).collect();
    let scores: Vec<[f64; 6]> = results.iter().map(|r| r.scores()).collect();
    let gold: Vec<_> = corpus.iter().map(|c| c.labels).collect();
    Ok(evaluate(&predicted, &gold, Some(&scores))?)
}

pub fn classify(a: ClassifyArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    if let Some(path) = &a.eval {
        let corpus = read_corpus(read_input(path)?.as_bytes())?;
        let report = eval_model(&model, &corpus)?;
        print!("{}", render_eval(&report));
        if let Some(out) = &a.out {
            write_output(out, &pretty(&json!({"format": "rescue-eval/1", "report": report})))?;
        }
        return Ok(());
    }
    for text in texts(&a.input)? {
        let c = model.classify(&text);
        println!("{}", json!({"text": text, "labels": c.labels, "heads": c.heads}));
    }
    Ok(())
}

pub fn train(a: TrainArgs) -> Result<()> {
    let corpus = match (&a.corpus, a.synthetic) {
        (Some(path), _) => read_corpus(read_input(path)?.as_bytes())?,
        (None, Some(n)) => synthetic_corpus(a.seed, n, a.positive_rate),
        (None, None) => return Err(CliError::Usage("give --corpus or --synthetic N".into())),
    };
    if corpus.is_empty() {
        return Err(CliError::Usage("the training corpus is empty".into()));
    }
    let mut config = TrainConfig { seed: a.seed, ..TrainConfig::default() };
    if let Some(e) = a.epochs {
        config.epochs = e;
    }
    if let Some(lr) = a.learning_rate {
        config.learning_rate = lr;
    }
    let model = rescue_text::train(&corpus, &config)?;
    for h in model.heads.iter().filter(|h| !h.available) {
        println!("head {} skipped: training labels are all one class", h.label);
    }
    print!("{}", render_eval(&eval_model(&model, &corpus)?));
    write_output(&a.out, &model.to_json())
}

pub fn serve(a: ServeArgs) -> Result<()> {
    let scenario = match &a.scenario {
        Some(path) => {
            let file = ScenarioFile::from_json(&read_input(path)?)?;
            let s = Scenario::from_file(&file)?;
            Some((file.start, s))
        }
        None => None,
    };
    let start = a.start.or_else(|| scenario.as_ref().and_then(|(s, _)| *s)).unwrap_or(TimePoint::ZERO);
    let genesis = match &scenario {
        Some((_, s)) => Genesis::from_scenario(s, start),
        None => Genesis { start, ..Genesis::default() },
    };
    let clock = Arc::new(SystemClock::starting_at(start));
    let mut d = match &a.log {
        Some(path) => Dispatcher::open(path, genesis, clock)?,
        None => Dispatcher::in_memory(genesis, clock)?,
    };
    if let Some(path) = &a.model {
        d = d.with_model(load_model(path)?);
    }
    if let Some((_, s)) = &scenario {
        if d.snapshot().seq == 0 {
            d.bootstrap(s)?;
        }
    }
    let d = Arc::new(d);
    let seq = d.snapshot().seq;
    eprintln!("listening on {} (events: {seq}, clock: {})", a.listen, d.snapshot().clock);
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Runtime(e.to_string()))?;
    rt.block_on(rescue_service::serve(a.listen, d)).map_err(|e| CliError::Runtime(format!("{}: {e}", a.listen)))
}
