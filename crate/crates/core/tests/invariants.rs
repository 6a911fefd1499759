use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rescue_core::sched::{EnvUpdate, Policy, Schedule};
use rescue_core::sim::workload::CONDITIONS_KEY;
use rescue_core::sim::{generate, replay, Scenario, WorkloadSpec};
use rescue_core::{EnvVector, RescueTask, TimePoint};

const SCENARIOS: u64 = 200;

/// Small random scenario with mixed fleets, demands and env reports.
fn random_scenario(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let spec = WorkloadSpec {
        seed,
        count: rng.random_range(1..40),
        hourly_rates: vec![1.0; rng.random_range(1..8)],
        burst_sd: rng.random_range(0.0..30.0),
        radius_miles: rng.random_range(1.0..10.0),
        clusters: rng.random_range(1..4),
        cluster_radius_miles: rng.random_range(0.1..2.0),
        cluster_share: rng.random_range(0.0..1.0),
        units: rng.random_range(1..6),
        ..WorkloadSpec::default()
    };
    let mut file = generate(&spec).unwrap();
    for (i, unit) in file.units.iter_mut().enumerate() {
        unit.capacity = Some(rng.random_range(1..4));
        if i % 2 == 0 {
            unit.capabilities = vec!["boat".into()];
        }
        if rng.random_bool(0.3) {
            unit.available_at = Some(TimePoint::from_minutes(rng.random_range(0..240)));
        }
    }
    for task in &mut file.tasks {
        if rng.random_bool(0.2) {
            task.required_capabilities = vec!["boat".into()];
        }
        if rng.random_bool(0.2) {
            task.demand = Some(rng.random_range(1..4));
        }
        if rng.random_bool(0.1) {
            task.actual_burst = Some(rng.random_range(10..90));
        }
        if rng.random_bool(0.1) {
            task.priority = Some(rng.random_range(1..=10) as f64);
        }
    }
    let ids: Vec<(String, TimePoint)> = file.tasks.iter().map(|t| (t.id.clone(), t.arrival)).collect();
    for _ in 0..rng.random_range(0..5) {
        let (id, arrival) = &ids[rng.random_range(0..ids.len())];
        file.env_updates.push(EnvUpdate {
            at: *arrival + rng.random_range(0..120),
            task_id: id.clone(),
            env: EnvVector::new().with(CONDITIONS_KEY, rng.random_range(0.5..2.5)),
        });
    }
    Scenario::from_file(&file).unwrap()
}

fn check(scenario: &Scenario, s: &Schedule) -> Result<(), String> {
    let tasks: BTreeMap<&str, &RescueTask> = scenario.tasks.iter().map(|t| (t.id.as_str(), t)).collect();
    let units: BTreeMap<&str, _> = scenario.units.iter().map(|u| (u.id.as_str(), u)).collect();

    // conservation: every task served, rejected or pending exactly once
    let mut seen = BTreeSet::new();
    let all = s
        .entries
        .iter()
        .map(|e| e.task_id.as_str())
        .chain(s.unschedulable.iter().map(|u| u.task_id.as_str()))
        .chain(s.pending.iter().map(String::as_str));
    for id in all {
        if !seen.insert(id) {
            return Err(format!("task {id} accounted twice"));
        }
    }
    if seen.len() != tasks.len() {
        return Err(format!("{} of {} tasks accounted", seen.len(), tasks.len()));
    }
    if !s.pending.is_empty() {
        return Err(format!("tasks left pending: {:?}", s.pending));
    }
    for u in &s.unschedulable {
        let t = tasks[u.task_id.as_str()];
        if units.values().any(|unit| unit.can_serve(t)) {
            return Err(format!("task {} rejected although servable", t.id));
        }
    }

    // per-unit missions never overlap
    let mut by_unit: BTreeMap<&str, Vec<_>> = BTreeMap::new();
    for m in &s.missions {
        by_unit.entry(m.unit_id.as_str()).or_default().push(m);
    }
    for (uid, missions) in &mut by_unit {
        let unit = units.get(uid).ok_or(format!("unknown unit {uid}"))?;
        missions.sort_by_key(|m| m.depart_base);
        if missions[0].depart_base < unit.available_at {
            return Err(format!("unit {uid} departs before it is available"));
        }
        for w in missions.windows(2) {
            if w[1].depart_base < w[0].available_at {
                return Err(format!("unit {uid}: {} overlaps {}", w[1].id, w[0].id));
            }
        }
    }

    for m in &s.missions {
        let unit = units[m.unit_id.as_str()];
        let load: u32 = m.tasks.iter().map(|id| tasks[id.as_str()].demand).sum();
        if load > unit.capacity {
            return Err(format!("mission {} load {load} over capacity {}", m.id, unit.capacity));
        }
        if m.legs.first().map(|l| l.start_time) != Some(m.depart_base) {
            return Err(format!("mission {} first leg does not leave from base", m.id));
        }
        for w in m.legs.windows(2) {
            if w[1].start_time != w[0].completion() {
                return Err(format!("mission {} legs not back to back", m.id));
            }
        }
        let last = m.legs.last().unwrap();
        if m.return_base < last.completion() || m.available_at < m.return_base {
            return Err(format!("mission {} returns before finishing", m.id));
        }
        if m.available_at != m.return_base + unit.prep_minutes + unit.rest_minutes {
            return Err(format!("mission {} turnaround at base is off", m.id));
        }
        if m.tasks.len() > 1 {
            if s.policy != Policy::Hybrid {
                return Err(format!("{} chained tasks", s.policy.name()));
            }
            let anchor = &tasks[m.tasks[0].as_str()].location;
            for id in &m.tasks[1..] {
                let d = scenario.distances.distance(anchor, &tasks[id.as_str()].location).unwrap();
                if d > scenario.scheduler.dis_radius_miles + 1e-9 {
                    return Err(format!("mission {} chains {id} at {d} mi", m.id));
                }
            }
        }
    }

    for e in &s.entries {
        let t = tasks[e.task_id.as_str()];
        let unit = units[e.unit_id.as_str()];
        if !unit.can_serve(t) {
            return Err(format!("unit {} cannot serve {}", unit.id, t.id));
        }
        if !e.is_consistent() {
            return Err(format!("row {} breaks waiting/turnaround identities", e.task_id));
        }
        if e.arrival != t.arrival || e.start_time < t.arrival {
            return Err(format!("row {} starts before arrival", e.task_id));
        }
        if let Some(actual) = t.actual_burst {
            if e.burst_used != actual {
                return Err(format!("row {} ignores actual burst", e.task_id));
            }
        }
    }

    // simulated clock never runs backwards or ahead of an event
    for w in s.trace.windows(2) {
        if w[1].clock < w[0].clock {
            return Err("clock went backwards".into());
        }
    }
    if s.trace.iter().any(|r| r.at > r.clock) {
        return Err("event handled before its timestamp".into());
    }
    Ok(())
}

fn run_policy(policy: Policy) {
    for seed in 0..SCENARIOS {
        let scenario = random_scenario(seed);
        let out = replay(&scenario, policy).unwrap();
        if let Err(msg) = check(&scenario, &out.schedule) {
            panic!("{} seed {seed}: {msg}", policy.name());
        }
        assert!(out.metrics_agree(), "{} seed {seed}: metrics drift", policy.name());
        let again = replay(&scenario, policy).unwrap();
        assert_eq!(
            serde_json::to_string(&out.document()).unwrap(),
            serde_json::to_string(&again.document()).unwrap(),
            "{} seed {seed}: rerun differs",
            policy.name()
        );
    }
}

#[test]
fn fcfs_invariants() {
    run_policy(Policy::Fcfs);
}

#[test]
fn priority_invariants() {
    run_policy(Policy::Priority);
}

#[test]
fn hybrid_invariants() {
    run_policy(Policy::Hybrid);
}

#[test]
fn empty_task_list_gives_zero_report() {
    let s = Scenario::from_json(r#"{"units": [{"id": "1"}], "tasks": []}"#).unwrap();
    for policy in Policy::ALL {
        let out = replay(&s, policy).unwrap();
        assert_eq!(out.recomputed.completed, 0);
        assert_eq!(out.recomputed.mean_waiting, 0.0);
        assert_eq!(out.recomputed.max_avg_wt, 0.0);
    }
}

#[test]
fn capability_mismatch_is_reported_not_dropped() {
    let s = Scenario::from_json(
        r#"{"units": [{"id": "1"}], "tasks": [
            {"id": "a", "arrival": 0, "distance_from_base": 1, "required_capabilities": ["heli"]},
            {"id": "b", "arrival": 0, "distance_from_base": 1}
        ]}"#,
    )
    .unwrap();
    let out = replay(&s, Policy::Hybrid).unwrap();
    assert_eq!(out.schedule.unschedulable.len(), 1);
    assert_eq!(out.schedule.unschedulable[0].task_id, "a");
    assert_eq!(out.schedule.entries.len(), 1);
}
