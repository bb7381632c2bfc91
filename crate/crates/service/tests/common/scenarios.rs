//! End-to-end service scenarios shared by the service tests and the
//! acceptance run. Each returns a short summary on success and a
//! description of the first discrepancy on failure.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, Mutex};

use axum::http::StatusCode;
use serde_json::{json, Value};

use super::Client;
use tasktrace::model::fixtures::f1;
use tasktrace::model::{build_markov, suggest_edits, Abstraction, SuggestConfig};
use tasktrace::{serialize_trace, StepInstance, StepKind, TaskCategory, Trace};
use tasktrace_service::ServiceConfig;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn quiet_config(dir: &Path) -> ServiceConfig {
    let mut cfg = ServiceConfig::new(dir);
    cfg.rebuild_every = 0;
    cfg
}

/// A mix of approved traces, single rejections, and a worker who fails
/// twice and is screened out entirely.
pub fn mixed_traces() -> Vec<Trace> {
    let mut out = f1();
    let short = |id: &str, worker: &str| {
        Trace::new(id, TaskCategory::Mail, worker, vec![StepInstance::new(StepKind::Grab, ["mail"])])
    };
    out.push(short("r1", "w2"));
    out.push(short("r2", "w2"));
    let mut w2_good = out[1].clone();
    w2_good.id = "w2-ok".into();
    w2_good.worker_id = "w2".into();
    out.push(w2_good);
    out.push(short("r3", "w3"));
    let mut g = tasktrace::model::fixtures::groceries_loop();
    g.worker_id = "w3".into();
    g.steps[0] = g.steps[0].clone().with_description("take the milk out of the bag");
    out.push(g);
    out
}

/// Submits, restarts, and checks that every acknowledged write survives
/// byte for byte in the export, together with session acknowledgments.
pub async fn restart_durability(dir: &Path) -> Result<String, String> {
    let mut client = Client::open(quiet_config(dir));
    let token = client.acknowledge().await;
    let traces = mixed_traces();
    for t in &traces {
        let reply = client.post("/traces", serialize_trace(t)).await;
        ensure(
            reply.status == StatusCode::CREATED || reply.status == StatusCode::UNPROCESSABLE_ENTITY,
            || format!("submit {} returned {}", t.id, reply.status),
        )?;
    }
    let before = client.get("/traces/export").await.text();
    let stats_before = client.get("/stats").await.json();
    drop(client);

    let mut client = Client::open(quiet_config(dir));
    let after = client.get("/traces/export").await.text();
    ensure(before == after, || "export changed across restart".into())?;
    ensure(after.lines().count() == traces.len(), || {
        format!("expected {} records, export has {}", traces.len(), after.lines().count())
    })?;
    for (line, t) in after.lines().zip(&traces) {
        let record: Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
        let expected: Value = serde_json::from_str(&serialize_trace(t)).unwrap();
        ensure(record["trace"] == expected, || format!("record for {} differs", t.id))?;
    }
    ensure(client.get("/stats").await.json() == stats_before, || "stats changed across restart".into())?;

    client.session = Some(token);
    let mut extra = f1()[0].clone();
    extra.id = "after-restart".into();
    let reply = client.post("/traces", serialize_trace(&extra)).await;
    ensure(reply.status == StatusCode::CREATED, || {
        format!("acknowledged session lost on restart: {}", reply.status)
    })?;
    Ok(format!("{} records survived restart", traces.len()))
}

fn extra_trace(i: usize) -> Trace {
    let last = match i % 3 {
        0 => StepInstance::new(StepKind::Deliver, ["mail".to_owned(), format!("room {i}")]),
        1 => StepInstance::new(StepKind::Place, ["mail".to_owned(), format!("shelf {i}")]),
        _ => StepInstance::new(StepKind::Wait, Vec::<String>::new()),
    };
    Trace::new(
        format!("e{i:03}"),
        TaskCategory::Mail,
        format!("w{}", 2 + i % 3),
        vec![
            StepInstance::new(StepKind::MoveTo, ["front door"]),
            StepInstance::new(StepKind::Grab, ["mail"]),
            last,
        ],
    )
}

fn stress_hints() -> Vec<Vec<StepInstance>> {
    vec![
        vec![],
        vec![StepInstance::new(StepKind::MoveTo, ["front door"])],
        vec![
            StepInstance::new(StepKind::MoveTo, ["front door"]),
            StepInstance::new(StepKind::Grab, ["mail"]),
        ],
        vec![StepInstance::new(StepKind::Find, ["mail"])],
        vec![
            StepInstance::new(StepKind::Grab, ["mail"]),
            StepInstance::new(StepKind::Grab, ["mail"]),
        ],
    ]
}

pub struct StressOutcome {
    pub requests: usize,
    pub versions_seen: usize,
    pub rebuilds: usize,
}

/// Runs `requests` suggestion queries from `readers` tasks while a writer
/// alternates submissions and rebuilds. Every answer must equal the answer
/// computed offline from the exact trace set of the version it reports.
pub async fn swap_stress(dir: &Path, requests: usize, readers: usize, rebuilds: usize) -> Result<StressOutcome, String> {
    let mut client = Client::open(quiet_config(dir));
    client.acknowledge().await;
    for t in f1() {
        client.post("/traces", serialize_trace(&t)).await;
    }
    let first = client.post("/models/rebuild", "").await.json();
    let first_version = first["version"].as_u64().ok_or("rebuild returned no version")?;

    let versions: Arc<Mutex<BTreeMap<u64, Vec<Trace>>>> =
        Arc::new(Mutex::new(BTreeMap::from([(first_version, f1())])));
    let client = Arc::new(client);
    let hints = Arc::new(stress_hints());

    let writer = {
        let client = client.clone();
        let versions = versions.clone();
        tokio::spawn(async move {
            let mut current = f1();
            for i in 0..rebuilds {
                let t = extra_trace(i);
                let reply = client.post("/traces", serialize_trace(&t)).await;
                if reply.status != StatusCode::CREATED {
                    return Err(format!("writer submit returned {}", reply.status));
                }
                current.push(t);
                let v = client.post("/models/rebuild", "").await.json()["version"]
                    .as_u64()
                    .ok_or("rebuild returned no version")?;
                versions.lock().unwrap().insert(v, current.clone());
                tokio::task::yield_now().await;
            }
            Ok::<(), String>(())
        })
    };

    let per_reader = requests.div_ceil(readers);
    let mut tasks = Vec::new();
    for r in 0..readers {
        let client = client.clone();
        let hints = hints.clone();
        tasks.push(tokio::spawn(async move {
            let mut seen = Vec::with_capacity(per_reader);
            for q in 0..per_reader {
                let h = (r + q) % hints.len();
                let body = json!({"hint": hints[h], "k": 3});
                let reply = client.post("/categories/mail/suggest", body.to_string()).await;
                if reply.status != StatusCode::OK {
                    return Err(format!("suggest returned {}", reply.status));
                }
                seen.push((h, reply.json()));
            }
            Ok::<_, String>(seen)
        }));
    }

    writer.await.map_err(|e| e.to_string())??;
    let mut answers = Vec::new();
    for t in tasks {
        answers.extend(t.await.map_err(|e| e.to_string())??);
    }

    let versions = versions.lock().unwrap().clone();
    let config = SuggestConfig::default();
    let mut expected: BTreeMap<(u64, usize), Value> = BTreeMap::new();
    let mut seen_versions = std::collections::BTreeSet::new();
    for (h, body) in &answers {
        let v = body["model_version"].as_u64().ok_or("answer without model_version")?;
        seen_versions.insert(v);
        let traces = versions
            .get(&v)
            .ok_or_else(|| format!("answer reports unknown version {v}"))?;
        let want = expected.entry((v, *h)).or_insert_with(|| {
            let model = build_markov(traces, Abstraction::Kind, 0.0).unwrap();
            serde_json::to_value(suggest_edits(&model, traces, &hints[*h], &config)).unwrap()
        });
        ensure(body["suggestions"] == *want, || {
            format!("version {v} hint {h}: answer does not match that version's model")
        })?;
        ensure(body["trace_count"] == json!(traces.len()), || {
            format!("version {v}: trace_count {} vs {}", body["trace_count"], traces.len())
        })?;
    }
    Ok(StressOutcome {
        requests: answers.len(),
        versions_seen: seen_versions.len(),
        rebuilds,
    })
}

async fn models_and_stats(client: &Client) -> (Value, BTreeMap<TaskCategory, String>) {
    let stats = client.get("/stats").await.json();
    let snapshot = client.state.snapshot();
    let models = snapshot
        .models
        .iter()
        .map(|(c, m)| (*c, m.model.to_json()))
        .collect();
    (stats, models)
}

/// Exports a seeded store and re-ingests it two ways: as the log of a fresh
/// data directory, and by resubmitting every exported trace. Both must
/// reproduce the original stats and model documents exactly.
pub async fn export_reingest(root: &Path) -> Result<String, String> {
    let dirs: Vec<_> = ["source", "replayed", "resubmitted"]
        .iter()
        .map(|d| {
            let p = root.join(d);
            std::fs::create_dir_all(&p).unwrap();
            p
        })
        .collect();

    let mut source = Client::open(quiet_config(&dirs[0]));
    source.acknowledge().await;
    for t in mixed_traces() {
        source.post("/traces", serialize_trace(&t)).await;
    }
    source.post("/models/rebuild", "").await;
    let export = source.get("/traces/export").await.text();
    let original = models_and_stats(&source).await;
    ensure(!original.1.is_empty(), || "source built no models".into())?;

    std::fs::write(dirs[1].join(tasktrace_service::store::TRACE_LOG), &export).map_err(|e| e.to_string())?;
    let replayed = Client::open(quiet_config(&dirs[1]));
    ensure(models_and_stats(&replayed).await == original, || {
        "replayed log gives different stats or models".into()
    })?;
    ensure(replayed.get("/traces/export").await.text() == export, || {
        "replayed log exports differently".into()
    })?;

    let mut resubmitted = Client::open(quiet_config(&dirs[2]));
    resubmitted.acknowledge().await;
    for line in export.lines() {
        let record: Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
        resubmitted.post("/traces", record["trace"].to_string()).await;
    }
    resubmitted.post("/models/rebuild", "").await;
    ensure(models_and_stats(&resubmitted).await == original, || {
        "resubmitted export gives different stats or models".into()
    })?;
    ensure(resubmitted.get("/traces/export").await.text() == export, || {
        "resubmitted export differs".into()
    })?;
    Ok(format!("{} records reproduced", export.lines().count()))
}
