mod common;

use std::time::Duration;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use dmnbot::server::{router, AppState, Created, Replies, Summary, DEFAULT_IDLE};
use dmnbot_core::model::Value;
use dmnbot_core::runtime::{parse_script, render, Runtime, Status};
use http_body_util::BodyExt;
use serde_json::{json, Value as Json};
use tower::ServiceExt;

fn app(agent: &str) -> Router {
    router(AppState::new(Runtime::new(common::agent(agent)).unwrap(), DEFAULT_IDLE))
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Json>) -> (StatusCode, Json) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(b) => {
            req = req.header("content-type", "application/json");
            Body::from(b.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let json = if bytes.is_empty() {
        Json::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, json)
}

async fn create(app: &Router) -> Created {
    let (status, body) = call(app, Method::POST, "/sessions", None).await;
    assert_eq!(status, StatusCode::CREATED);
    serde_json::from_value(body).unwrap()
}

async fn say(app: &Router, id: &str, text: &str) -> (StatusCode, Json) {
    call(app, Method::POST, &format!("/sessions/{id}/messages"), Some(json!({ "text": text }))).await
}

/// Sends every script line and returns the rendered transcript.
async fn run_script(app: &Router, script: &str) -> String {
    let id = create(app).await.session_id;
    for line in parse_script(script) {
        let (status, _) = say(app, &id, &line).await;
        if status == StatusCode::CONFLICT {
            break;
        }
        assert_eq!(status, StatusCode::OK, "line {line:?}");
    }
    let (_, body) = call(app, Method::GET, &format!("/sessions/{id}"), None).await;
    let summary: Summary = serde_json::from_value(body).unwrap();
    render(&summary.transcript)
}

#[tokio::test]
async fn create_returns_the_greeting() {
    let app = app("risk_category");
    let created = create(&app).await;
    assert!(!created.session_id.is_empty());
    assert_eq!(
        created.greeting,
        "Hello! I can help you determine the risk category. What would you like to know?"
    );
}

#[tokio::test]
async fn full_flow_ends_with_the_decision() {
    let app = app("risk_category");
    let id = create(&app).await.session_id;
    let steps = [
        ("I want to know the risk category", "What is the Existing Customer value?"),
        ("yes", "What is the Risk Score value?"),
    ];
    for (text, expected) in steps {
        let (status, body) = say(&app, &id, text).await;
        assert_eq!(status, StatusCode::OK);
        let r: Replies = serde_json::from_value(body).unwrap();
        assert_eq!(r.replies, vec![expected.to_owned()]);
        assert_eq!(r.status, Status::Collecting);
        assert!(r.decision.is_none());
    }
    let (status, body) = say(&app, &id, "50").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "decided");
    assert_eq!(body["decision"], "LOW");
    let r: Replies = serde_json::from_value(body).unwrap();
    assert_eq!(r.replies, vec!["The Risk Category is LOW.".to_owned()]);
    assert_eq!(r.decision, Some(Value::from("LOW")));
}

#[tokio::test]
async fn summary_uses_camel_case_fields() {
    let app = app("risk_category");
    let id = create(&app).await.session_id;
    say(&app, &id, "risk category").await;
    let (status, body) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["sessionId"], id.as_str());
    assert_eq!(body["status"], "collecting");
    assert_eq!(body["activeDecision"], "riskcategory");
    assert_eq!(body["pending"], "existingcustomer");
    assert_eq!(body["transcript"].as_array().unwrap().len(), 3);
}

#[tokio::test]
async fn unknown_sessions_are_not_found() {
    let app = app("risk_category");
    let (status, body) = say(&app, "nope", "hello").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(body["error"].is_string());
    let (status, _) = call(&app, Method::GET, "/sessions/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn blank_text_is_rejected() {
    let app = app("risk_category");
    let id = create(&app).await.session_id;
    for text in ["", "   "] {
        let (status, _) = say(&app, &id, text).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    }
    let (_, body) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(body["transcript"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn closed_sessions_conflict() {
    let app = app("risk_category");
    let id = create(&app).await.session_id;
    let (status, body) = say(&app, &id, "bye").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "closed");
    let (status, _) = say(&app, &id, "hello").await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn agent_lists_decisions_and_metadata() {
    let app = app("premium_and_plan");
    let (status, body) = call(&app, Method::GET, "/agent", None).await;
    assert_eq!(status, StatusCode::OK);
    let names: Vec<&str> = body["decisions"].as_array().unwrap().iter().map(|d| d["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["insurancepremium", "gymplan"]);
    assert_eq!(body["metadata"]["seed"], 42);
    assert_eq!(body["metadata"]["source_digest"].as_str().unwrap().len(), 64);
}

#[tokio::test]
async fn http_transcripts_match_the_goldens() {
    for (name, agent, script, golden) in common::goldens() {
        let app = app(&agent);
        assert_eq!(run_script(&app, &script).await, golden, "{name}");
    }
}

#[tokio::test]
async fn http_and_replay_agree() {
    for (name, agent, script, _) in common::goldens() {
        let runtime = Runtime::new(common::agent(&agent)).unwrap();
        let replayed = render(&runtime.replay("x", &script).transcript);
        assert_eq!(run_script(&app(&agent), &script).await, replayed, "{name}");
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_sessions_stay_isolated() {
    let app = app("risk_category");
    let goldens: Vec<_> = common::goldens().into_iter().filter(|g| g.1 == "risk_category").collect();
    assert!(goldens.len() >= 5);
    let mut tasks = Vec::new();
    for round in 0..4 {
        for (name, _, script, golden) in goldens.clone() {
            let app = app.clone();
            tasks.push(tokio::spawn(async move {
                let got = run_script(&app, &script).await;
                (format!("{name}#{round}"), got, golden)
            }));
        }
    }
    for t in tasks {
        let (name, got, golden) = t.await.unwrap();
        assert_eq!(got, golden, "{name}");
    }
}

#[tokio::test(start_paused = true)]
async fn idle_sessions_expire() {
    let app = router(AppState::new(
        Runtime::new(common::agent("risk_category")).unwrap(),
        Duration::from_secs(60),
    ));
    let kept = create(&app).await.session_id;
    let dropped = create(&app).await.session_id;
    tokio::time::advance(Duration::from_secs(45)).await;
    assert_eq!(say(&app, &kept, "risk category").await.0, StatusCode::OK);
    tokio::time::advance(Duration::from_secs(30)).await;
    assert_eq!(say(&app, &kept, "yes").await.0, StatusCode::OK);
    assert_eq!(say(&app, &dropped, "hello").await.0, StatusCode::NOT_FOUND);
}
