//! One PASS/FAIL line per headline requirement. Each check is
//! self-contained and goes through the public library APIs only.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rescue_core::sched::{schedule_hybrid, DispatchContext, Policy, Schedule};
use rescue_core::sim::{bench, generate, replay, BenchSpec, Scenario, ScenarioFile, WorkloadSpec};
use rescue_core::{score, BurstPredictor, LabelVector, RescueUnit, TimePoint, Weights};
use rescue_service::dispatcher::CompleteRequest;
use rescue_service::{DispatchState, Dispatcher, Genesis, ManualClock, TaskRequest, UnitRequest};
use rescue_text::model::{encode, gradient, loss};
use rescue_text::{evaluate, synthetic_corpus, train, TrainConfig};

type Check = Result<String, String>;

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn priority_reproduction() -> Check {
    let text = std::fs::read_to_string(scenario_path("portarthur.json")).map_err(|e| e.to_string())?;
    let file = ScenarioFile::from_json(&text).map_err(|e| e.to_string())?;
    let weights = Weights::demo();
    let mut got = Vec::new();
    for id in ["1", "2", "3", "4", "5"] {
        let t = file.tasks.iter().find(|t| t.id == id).ok_or(format!("task {id} missing"))?;
        got.push(score(&t.labels, &t.env, &weights).map_err(|e| e.to_string())?.value());
    }
    ensure(got == [7.0, 2.0, 5.0, 5.0, 1.0], || format!("scores {got:?}"))?;
    Ok(format!("ids 1-5 score {got:?}"))
}

// (task, unit, start, waiting, turnaround)
const PUBLISHED: [(&str, &str, &str, u32, u32); 10] = [
    ("1", "1", "14:00", 122, 176),
    ("3", "1", "15:09", 137, 191),
    ("2", "1", "16:09", 211, 265),
    ("4", "2", "14:07", 21, 75),
    ("7", "2", "16:13", 9, 79),
    ("8", "1", "17:55", 86, 116),
    ("10", "2", "18:05", 6, 51),
    ("9", "2", "19:32", 128, 163),
    ("6", "1", "19:41", 272, 347),
    ("5", "2", "20:49", 375, 429),
];

fn port_arthur(units: usize) -> Result<rescue_core::sim::ReplayOutput, String> {
    let s = Scenario::load(scenario_path("portarthur.json")).map_err(|e| e.to_string())?;
    let s = if units == s.units.len() { s } else { s.with_unit_count(units).map_err(|e| e.to_string())? };
    replay(&s, Policy::Hybrid).map_err(|e| e.to_string())
}

fn port_arthur_two_units() -> Check {
    let started = Instant::now();
    let out = port_arthur(2)?;
    let s = &out.schedule;
    let order = |u: &str| s.entries.iter().filter(|e| e.unit_id == u).map(|e| e.task_id.as_str()).collect::<Vec<_>>();
    ensure(order("1") == ["1", "3", "2", "8", "6"], || format!("unit 1 order {:?}", order("1")))?;
    ensure(order("2") == ["4", "7", "10", "9", "5"], || format!("unit 2 order {:?}", order("2")))?;
    let mut worst = 0;
    for (task, unit, start, wait, turn) in PUBLISHED {
        let e = s.entry(task).ok_or(format!("task {task} not scheduled"))?;
        ensure(e.unit_id == unit, || format!("task {task} on unit {}", e.unit_id))?;
        let start: TimePoint = start.parse().map_err(|e: rescue_core::Error| e.to_string())?;
        let d = [
            e.start_time.minutes().abs_diff(start.minutes()),
            e.waiting_time.abs_diff(wait),
            e.turnaround_time.abs_diff(turn),
        ];
        worst = worst.max(*d.iter().max().unwrap());
        ensure(d.iter().all(|&x| x <= 2), || format!("task {task} off by {d:?}"))?;
    }
    let m = &out.recomputed;
    ensure((m.mean_waiting - 137.0).abs() <= 3.0, || format!("mean waiting {}", m.mean_waiting))?;
    ensure((m.mean_turnaround - 189.0).abs() <= 3.0, || format!("mean turnaround {}", m.mean_turnaround))?;
    let elapsed = started.elapsed();
    ensure(elapsed.as_secs_f64() < 1.0, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "orders exact, max row diff {worst} min, mean wait {:.1}, mean turnaround {:.1}",
        m.mean_waiting, m.mean_turnaround
    ))
}

fn port_arthur_four_units() -> Check {
    let m = port_arthur(4)?.recomputed;
    ensure(m.completed == 10, || format!("{} completed", m.completed))?;
    ensure((m.mean_waiting - 49.0).abs() <= 5.0, || format!("mean waiting {}", m.mean_waiting))?;
    ensure((m.mean_turnaround - 102.0).abs() <= 5.0, || format!("mean turnaround {}", m.mean_turnaround))?;
    Ok(format!("mean wait {:.1}, mean turnaround {:.1}", m.mean_waiting, m.mean_turnaround))
}

fn benchmark_direction() -> Check {
    let started = Instant::now();
    let text = std::fs::read_to_string(scenario_path("bench_clustered.json")).map_err(|e| e.to_string())?;
    let spec = BenchSpec::from_json(&text).map_err(|e| e.to_string())?;
    ensure(spec.seeds.len() >= 3, || format!("only {} seeds", spec.seeds.len()))?;
    ensure(spec.unit_counts.contains(&10) && spec.unit_counts.contains(&20), || "needs 10 and 20 units".into())?;
    let report = bench(&spec).map_err(|e| e.to_string())?;
    let cell = |seed, p, u| report.cell(seed, p, u).map(|c| c.mean_avg_wt).ok_or(format!("missing cell {seed} {p} {u}"));
    for &seed in &spec.seeds {
        for units in [10, 20] {
            let h = cell(seed, Policy::Hybrid, units)?;
            let f = cell(seed, Policy::Fcfs, units)?;
            let p = cell(seed, Policy::Priority, units)?;
            ensure(h <= f && h <= p, || format!("seed {seed}, {units} units: hybrid {h:.3} fcfs {f:.3} priority {p:.3}"))?;
        }
        for policy in Policy::ALL {
            let (a, b) = (cell(seed, policy, 20)?, cell(seed, policy, 10)?);
            ensure(a <= b, || format!("seed {seed} {policy}: 20 units {a:.3} > 10 units {b:.3}"))?;
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed.as_secs_f64() < 30.0, || format!("took {elapsed:?}"))?;
    Ok(format!("{} seeds, hybrid lowest at 10 and 20 units, 20 <= 10 for all policies", spec.seeds.len()))
}

fn burst_predictor() -> Check {
    let mut worst: f64 = 0.0;
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alpha: f64 = rng.random_range(0.0..=1.0);
        let start: f64 = rng.random_range(1.0..200.0);
        let mut p = BurstPredictor::with_alpha(start, alpha).map_err(|e| e.to_string())?;
        let (mut oracle, mut lo, mut hi) = (start, start, start);
        for _ in 0..1000 {
            let t: f64 = rng.random_range(0.5..300.0);
            let got = p.observe(t).map_err(|e| e.to_string())?;
            oracle = alpha * t + (1.0 - alpha) * oracle;
            lo = lo.min(t);
            hi = hi.max(t);
            worst = worst.max((got - oracle).abs());
            ensure((got - oracle).abs() <= 1e-9, || format!("seed {seed}: {got} vs {oracle}"))?;
            ensure(got >= lo - 1e-9 && got <= hi + 1e-9, || format!("seed {seed}: {got} outside [{lo}, {hi}]"))?;
        }
    }
    Ok(format!("10 x 1000 steps, max deviation {worst:.1e}"))
}

fn random_scenario(seed: u64) -> Result<Scenario, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = WorkloadSpec {
        seed,
        count: rng.random_range(1..=30),
        units: rng.random_range(1..=4),
        ..WorkloadSpec::default()
    };
    let mut file = generate(&spec).map_err(|e| e.to_string())?;
    for u in &mut file.units {
        u.capacity = Some(rng.random_range(1..=3));
        if rng.random_bool(0.5) {
            u.capabilities.push("boat".into());
        }
    }
    for t in &mut file.tasks {
        t.demand = Some(rng.random_range(1..=2));
        if rng.random_bool(0.2) {
            t.required_capabilities.push("boat".into());
        }
        if rng.random_bool(0.3) {
            t.actual_burst = Some(rng.random_range(10..=120));
        }
    }
    Scenario::from_file(&file).map_err(|e| e.to_string())
}

fn check_schedule(s: &Scenario, sched: &Schedule) -> Result<(), String> {
    let mut seen = BTreeSet::new();
    let all = sched
        .entries
        .iter()
        .map(|e| &e.task_id)
        .chain(sched.unschedulable.iter().map(|u| &u.task_id))
        .chain(sched.pending.iter());
    for id in all {
        ensure(seen.insert(id.clone()), || format!("task {id} accounted twice"))?;
    }
    let expected: BTreeSet<String> = s.tasks.iter().map(|t| t.id.clone()).collect();
    ensure(seen == expected, || "tasks not conserved".into())?;
    for unit in &s.units {
        let mut missions: Vec<_> = sched.missions.iter().filter(|m| m.unit_id == unit.id).collect();
        missions.sort_by_key(|m| m.depart_base);
        let mut free = unit.available_at;
        for m in missions {
            ensure(m.depart_base >= free, || format!("unit {} overlaps at {}", unit.id, m.depart_base))?;
            let demand: u32 = m.tasks.iter().map(|id| s.tasks.iter().find(|t| &t.id == id).unwrap().demand).sum();
            ensure(demand <= unit.capacity, || format!("mission {} over capacity", m.id))?;
            for id in &m.tasks {
                let t = s.tasks.iter().find(|t| &t.id == id).unwrap();
                ensure(unit.can_serve(t), || format!("unit {} cannot serve {id}", unit.id))?;
            }
            let mut at = m.depart_base;
            for leg in &m.legs {
                ensure(leg.is_consistent(), || format!("row {} breaks identities", leg.task_id))?;
                ensure(leg.start_time == at, || format!("row {} not back to back", leg.task_id))?;
                at = leg.completion();
            }
            ensure(m.return_base >= at, || format!("mission {} returns early", m.id))?;
            ensure(
                m.available_at == m.return_base + unit.prep_minutes + unit.rest_minutes,
                || format!("mission {} availability", m.id),
            )?;
            free = m.available_at;
        }
    }
    Ok(())
}

fn scheduler_invariants() -> Check {
    let mut rows = 0;
    for seed in 0..200u64 {
        let s = random_scenario(seed)?;
        for policy in Policy::ALL {
            let out = replay(&s, policy).map_err(|e| format!("seed {seed}: {e}"))?;
            check_schedule(&s, &out.schedule).map_err(|e| format!("seed {seed} {policy}: {e}"))?;
            ensure(out.metrics_agree(), || format!("seed {seed} {policy}: metrics disagree"))?;
            let again = replay(&s, policy).map_err(|e| e.to_string())?;
            let a = serde_json::to_string(&out.document()).unwrap();
            let b = serde_json::to_string(&again.document()).unwrap();
            ensure(a == b, || format!("seed {seed} {policy}: rerun differs"))?;
            rows += out.schedule.entries.len();
        }
    }
    Ok(format!("200 scenarios x 3 policies, {rows} rows checked"))
}

fn classifier_properties() -> Check {
    let corpus = synthetic_corpus(1, 400, 0.3);
    let model = train(&corpus, &TrainConfig::default()).map_err(|e| e.to_string())?;
    let predicted: Vec<LabelVector> = corpus.iter().map(|c| model.classify(&c.text).labels).collect();
    let gold: Vec<LabelVector> = corpus.iter().map(|c| c.labels).collect();
    let report = evaluate(&predicted, &gold, None).map_err(|e| e.to_string())?;
    let min_acc = report.classes.iter().map(|c| c.accuracy).fold(f64::INFINITY, f64::min);
    ensure(min_acc >= 95.0, || format!("lowest head accuracy {min_acc:.1}%"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sample = synthetic_corpus(2, 40, 0.4);
    let rows: Vec<_> = sample.iter().map(|c| encode(&c.text, 10)).collect();
    let y: Vec<bool> = sample.iter().map(|c| c.labels.flood).collect();
    let dim = TrainConfig { dim_bits: 10, ..TrainConfig::default() }.input_dim();
    let w: Vec<f64> = (0..dim).map(|_| rng.random_range(-0.5..0.5)).collect();
    let b = 0.1;
    let l2 = 1e-3;
    let (dw, db) = gradient(&w, b, &rows, &y, l2);
    let h = 1e-5;
    let rel = |num: f64, ana: f64| (num - ana).abs() / num.abs().max(ana.abs()).max(1e-8);
    let mut worst: f64 = 0.0;
    let active: BTreeSet<usize> = rows.iter().flat_map(|r| r.0.iter().map(|p| p.0 as usize)).collect();
    for &i in active.iter().take(40) {
        let (mut up, mut down) = (w.clone(), w.clone());
        up[i] += h;
        down[i] -= h;
        let num = (loss(&up, b, &rows, &y, l2) - loss(&down, b, &rows, &y, l2)) / (2.0 * h);
        worst = worst.max(rel(num, dw[i]));
    }
    let num = (loss(&w, b + h, &rows, &y, l2) - loss(&w, b - h, &rows, &y, l2)) / (2.0 * h);
    worst = worst.max(rel(num, db));
    ensure(worst <= 1e-4, || format!("gradient relative error {worst:.2e}"))?;

    for set in 0..100 {
        let mut flags = || LabelVector::from_array(std::array::from_fn(|_| rng.random_bool(0.4)));
        let pred: Vec<LabelVector> = (0..50).map(|_| flags()).collect();
        let gold: Vec<LabelVector> = (0..50).map(|_| flags()).collect();
        let report = evaluate(&pred, &gold, None).map_err(|e| e.to_string())?;
        for (k, c) in report.classes.iter().enumerate() {
            let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
            for (p, g) in pred.iter().zip(&gold) {
                match (p.to_array()[k], g.to_array()[k]) {
                    (true, true) => tp += 1,
                    (true, false) => fp += 1,
                    (false, true) => fn_ += 1,
                    (false, false) => tn += 1,
                }
            }
            let pct = |a: usize, b: usize| if b == 0 { 0.0 } else { 100.0 * a as f64 / b as f64 };
            let (p, r) = (pct(tp, tp + fp), pct(tp, tp + fn_));
            let f1 = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
            let got = (c.confusion.tp, c.confusion.fp, c.confusion.fn_, c.confusion.tn);
            ensure(got == (tp, fp, fn_, tn), || format!("set {set} head {k}: confusion {got:?}"))?;
            ensure(
                c.precision == p && c.recall == r && c.f1 == f1 && c.accuracy == pct(tp + tn, 50),
                || format!("set {set} head {k}: metrics differ"),
            )?;
        }
    }
    Ok(format!("lowest head accuracy {min_acc:.1}%, gradient rel err {worst:.1e}, 100 oracle sets exact"))
}

fn scripted_session(d: &Dispatcher, clock: &ManualClock, target: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for id in ["a", "b"] {
        d.register_unit(UnitRequest { id: id.into(), ..Default::default() }).map_err(|e| e.to_string())?;
    }
    let mut next = 0;
    while d.snapshot().seq < target {
        clock.advance(rng.random_range(1..10));
        let snap = d.snapshot();
        let before = snap.seq;
        let accepted = match rng.random_range(0..8) {
            0..=2 => {
                next += 1;
                let labels = LabelVector { flood: rng.random_bool(0.5), sick: rng.random_bool(0.3), ..Default::default() };
                let distances: BTreeMap<String, f64> =
                    snap.queue.iter().take(2).map(|t| (t.location.to_string(), rng.random_range(0.5..4.0))).collect();
                d.ingest_task(TaskRequest {
                    id: Some(format!("r{next}")),
                    labels: Some(labels),
                    distance_from_base: Some(rng.random_range(1.0..6.0)),
                    distances,
                    ..Default::default()
                })
                .is_ok()
            }
            3 => match snap.queue.first() {
                Some(t) => {
                    let env = serde_json::from_value(serde_json::json!({"storm": 1.5})).unwrap();
                    d.update_env(&t.id, env).is_ok()
                }
                None => d.update_env("missing", Default::default()).is_ok(),
            },
            4 => match snap.queue.last() {
                Some(t) => d.override_priority(&t.id, 8.5).is_ok(),
                None => d.override_priority("missing", 5.0).is_ok(),
            },
            5 => d.dispatch_next().is_ok(),
            6 => match snap.active.first() {
                Some(m) => {
                    clock.advance(80);
                    let actual = m.tasks.iter().map(|t| (t.clone(), rng.random_range(30..90))).collect();
                    d.complete_mission(&m.id.clone(), CompleteRequest { actual }).is_ok()
                }
                None => d.complete_mission("M404", CompleteRequest::default()).is_ok(),
            },
            _ => d.set_weights(Weights::demo()).is_ok(),
        };
        let after = d.snapshot().seq;
        ensure(after == before + u64::from(accepted), || format!("seq {before} -> {after}, accepted {accepted}"))?;
        d.schedule().map_err(|e| e.to_string())?;
        ensure(d.snapshot().seq == after, || "a read logged an event".into())?;
    }
    Ok(())
}

fn offline_plan(state: &DispatchState) -> Result<Schedule, String> {
    let units: Vec<RescueUnit> = state
        .units
        .iter()
        .map(|u| RescueUnit { available_at: u.available_at.max(state.clock), ..u.clone() })
        .collect();
    let distances = state.distances();
    let mut cfg = state.genesis.scheduler;
    let (gb, gm) = (state.genesis.weights.base_priority, state.genesis.weights.max_priority);
    let (b, m) = (state.weights.base_priority, state.weights.max_priority);
    cfg.high_priority_threshold = b + (cfg.high_priority_threshold - gb) * (m - b) / (gm - gb);
    let ctx = DispatchContext::new(&distances, &state.weights).with_config(cfg);
    let mut predictor =
        BurstPredictor::with_alpha(state.genesis.seed_burst_minutes, state.genesis.ema_alpha).map_err(|e| e.to_string())?;
    for e in &state.completed {
        predictor.observe(f64::from(e.burst_used)).map_err(|e| e.to_string())?;
    }
    schedule_hybrid(&state.queue, &units, &ctx, &mut predictor).map_err(|e| e.to_string())
}

fn service_event_sourcing() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("events.jsonl");
    let start = TimePoint::hm(7, 0);
    let clock = Arc::new(ManualClock::new(start));
    let live = {
        let d = Dispatcher::open(&path, Genesis { start, ..Genesis::default() }, clock.clone()).map_err(|e| e.to_string())?;
        scripted_session(&d, &clock, 50)?;
        d.snapshot()
    };
    let restored = Dispatcher::open(&path, Genesis::default(), Arc::new(ManualClock::new(TimePoint::ZERO)))
        .map_err(|e| e.to_string())?
        .snapshot();
    ensure(*restored == *live, || "replayed state differs".into())?;
    ensure(
        serde_json::to_string(&*restored).unwrap() == serde_json::to_string(&*live).unwrap(),
        || "replayed state serializes differently".into(),
    )?;
    ensure(!live.completed.is_empty() && !live.queue.is_empty(), || "session too idle to be meaningful".into())?;
    let served = Dispatcher::open(&path, Genesis::default(), Arc::new(ManualClock::new(TimePoint::ZERO)))
        .map_err(|e| e.to_string())?
        .schedule()
        .map_err(|e| e.to_string())?;
    let offline = offline_plan(&restored)?;
    ensure(served.schedule.entries == offline.entries, || "served schedule differs from offline plan".into())?;
    ensure(served.schedule.missions == offline.missions, || "served missions differ from offline plan".into())?;
    Ok(format!(
        "50 events replayed exactly ({} completed, {} queued), schedule matches offline plan ({} rows)",
        live.completed.len(),
        live.queue.len(),
        offline.entries.len()
    ))
}

fn main() -> std::process::ExitCode {
    type Named = (&'static str, fn() -> Check);
    let checks: [Named; 8] = [
        ("priority-reproduction", priority_reproduction),
        ("port-arthur-2-units", port_arthur_two_units),
        ("port-arthur-4-units", port_arthur_four_units),
        ("benchmark-direction", benchmark_direction),
        ("burst-predictor-oracle", burst_predictor),
        ("scheduler-invariants", scheduler_invariants),
        ("classifier-properties", classifier_properties),
        ("service-event-sourcing", service_event_sourcing),
    ];
    let mut failed = Vec::new();
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                println!("FAIL {name}: {why}");
                failed.push(name);
            }
        }
    }
    if failed.is_empty() {
        std::process::ExitCode::SUCCESS
    } else {
        eprintln!("failed: {failed:?}");
        std::process::ExitCode::FAILURE
    }
}
