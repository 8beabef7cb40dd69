use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use spingame::api::router;
use spingame::session::SessionStore;
use tower::ServiceExt;

async fn call(
    app: &Router,
    method: &str,
    uri: &str,
    body: Option<Value>,
) -> (StatusCode, Value, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, value, bytes)
}

async fn create(app: &Router, body: Value) -> String {
    let (status, v, _) = call(app, "POST", "/sessions", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v["id"].as_str().unwrap().to_string()
}

fn play(observable: Value, pick: usize, rounds: u64) -> Value {
    json!({ "strategy": { "observable": observable, "pick": pick }, "rounds": rounds })
}

#[tokio::test]
async fn health() {
    let app = router(SessionStore::new());
    let (status, v, _) = call(&app, "GET", "/health", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["status"], "ok");
}

#[tokio::test]
async fn creation_reports_public_entropy() {
    let app = router(SessionStore::new());
    let (status, v, _) = call(
        &app,
        "POST",
        "/sessions",
        Some(json!({ "ensemble": { "preset": "rho2", "p1": 0.5 }, "rounds": 100 })),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED);
    assert!((v["entropy_bits"].as_f64().unwrap() - 0.600876).abs() < 1e-6);
    assert_eq!(v["dimension"], 2);
    assert_eq!(v["rounds_total"], 100);
    assert_eq!(v["rounds_played"], 0);
    assert!(v.get("preparations").is_none());
    assert!(v.get("seed").is_none());
}

#[tokio::test]
async fn pure_ensemble_wins_every_round() {
    let app = router(SessionStore::new());
    let id = create(
        &app,
        json!({ "ensemble": { "preset": "rho1" }, "rounds": 100 }),
    )
    .await;
    let (status, v, _) = call(
        &app,
        "POST",
        &format!("/sessions/{id}/rounds"),
        Some(play(json!("z"), 0, 100)),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["score"], 100);
    assert_eq!(v["finished"], true);
    assert_eq!(v["outcomes"].as_array().unwrap().len(), 100);
    assert!(v["outcomes"][0].get("prepared").is_none());

    let (status, a, _) = call(&app, "GET", &format!("/sessions/{id}/analysis"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(a["entropy_bits"], 0.0);
    assert_eq!(a["unrestricted_optimum"]["payoff"], 1.0);
    assert_eq!(a["preparations"].as_array().unwrap().len(), 100);
}

#[tokio::test]
async fn maximally_mixed_analysis() {
    let app = router(SessionStore::new());
    let id = create(
        &app,
        json!({ "ensemble": { "preset": "rho3", "p1": 0.5 }, "rounds": 40, "seed": 9 }),
    )
    .await;
    call(
        &app,
        "POST",
        &format!("/sessions/{id}/rounds"),
        Some(play(json!("z"), 0, 40)),
    )
    .await;
    let (_, a, _) = call(&app, "GET", &format!("/sessions/{id}/analysis"), None).await;
    assert!(a["unrestricted_optimum"]["payoff"].as_f64().unwrap().abs() < 1e-12);
    assert!((a["entropy_bits"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(a["seed"], 9);
    assert_eq!(a["strategy_changed"], false);
}

#[tokio::test]
async fn mixed_strategy_analysis_shows_gap() {
    let app = router(SessionStore::new());
    let id = create(
        &app,
        json!({ "ensemble": { "preset": "rho2", "p1": 0.5 }, "rounds": 20, "seed": 4 }),
    )
    .await;
    let uri = format!("/sessions/{id}/rounds");
    call(&app, "POST", &uri, Some(play(json!("z"), 0, 10))).await;
    call(
        &app,
        "POST",
        &uri,
        Some(play(json!({ "theta": 0.0, "phi": 0.0 }), 0, 10)),
    )
    .await;
    let (_, a, _) = call(&app, "GET", &format!("/sessions/{id}/analysis"), None).await;
    assert_eq!(a["strategy_changed"], true);
    assert!((a["restricted_optimum"]["payoff"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let opt = &a["unrestricted_optimum"];
    assert!((opt["payoff"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    assert!((opt["theta"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-9);
    for s in a["strategies"].as_array().unwrap() {
        assert!((s["expected_payoff"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    }
}

#[tokio::test]
async fn status_hides_preparations_until_finished() {
    let app = router(SessionStore::new());
    let id = create(
        &app,
        json!({ "ensemble": { "preset": "rho2", "p1": 0.3 }, "rounds": 10 }),
    )
    .await;
    let (_, played, raw) = call(
        &app,
        "POST",
        &format!("/sessions/{id}/rounds"),
        Some(play(json!("x"), 1, 4)),
    )
    .await;
    assert_eq!(played["finished"], false);
    let text = String::from_utf8(raw).unwrap();
    assert!(!text.contains("prepar"));
    assert!(!text.contains("seed"));
    let (status, s, raw) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(s["rounds_played"], 4);
    let text = String::from_utf8(raw).unwrap();
    assert!(!text.contains("prepar") && !text.contains("seed"));
    let (status, e, _) = call(&app, "GET", &format!("/sessions/{id}/analysis"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert!(e["error"].as_str().unwrap().contains("4 played"));
}

#[tokio::test]
async fn error_statuses() {
    let app = router(SessionStore::new());
    let (status, _, _) = call(&app, "GET", "/sessions/missing", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _, _) = call(
        &app,
        "POST",
        "/sessions/missing/rounds",
        Some(play(json!("z"), 0, 1)),
    )
    .await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let id = create(
        &app,
        json!({ "ensemble": { "preset": "rho1" }, "rounds": 5 }),
    )
    .await;
    let uri = format!("/sessions/{id}/rounds");
    let (status, _, _) = call(&app, "POST", &uri, Some(play(json!("z"), 0, 6))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    call(&app, "POST", &uri, Some(play(json!("z"), 0, 5))).await;
    let (status, _, _) = call(&app, "POST", &uri, Some(play(json!("z"), 0, 1))).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn validation_errors_name_the_field() {
    let app = router(SessionStore::new());
    let cases = [
        (
            json!({ "ensemble": { "preset": "rho2", "p1": 1.5 }, "rounds": 10 }),
            "ensemble.p1",
        ),
        (
            json!({ "ensemble": { "preset": "rho2" }, "rounds": 10 }),
            "ensemble.p1",
        ),
        (
            json!({ "ensemble": { "preset": "rho9" }, "rounds": 10 }),
            "ensemble.preset",
        ),
        (
            json!({ "ensemble": { "preset": "rho1" }, "rounds": "many" }),
            "rounds",
        ),
        (
            json!({ "ensemble": { "preset": "rho1" }, "rounds": 0 }),
            "rounds",
        ),
        (
            json!({ "ensemble": { "preset": "rho1" }, "rounds": 2000000 }),
            "rounds",
        ),
        (
            json!({ "ensemble": { "dimension": 2, "members": [{ "weight": 0.5, "amplitudes": [[1, 0], [0, 0]] }] }, "rounds": 1 }),
            "ensemble.members",
        ),
    ];
    for (body, field) in cases {
        let (status, v, _) = call(&app, "POST", "/sessions", Some(body.clone())).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{body}");
        assert_eq!(v["field"], field, "{body} -> {v}");
        assert!(!v["error"].as_str().unwrap().is_empty());
    }

    let id = create(
        &app,
        json!({ "ensemble": { "preset": "rho1" }, "rounds": 5 }),
    )
    .await;
    let uri = format!("/sessions/{id}/rounds");
    let (status, v, _) = call(&app, "POST", &uri, Some(play(json!("z"), 2, 1))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["field"], "strategy.pick");
    let (status, v, _) = call(
        &app,
        "POST",
        &uri,
        Some(json!({ "strategy": { "observable": "y", "pick": 0 }, "rounds": 1 })),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["field"], "strategy.observable");
    let (status, v, _) = call(&app, "POST", &uri, Some(play(json!("z"), 0, 0))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["field"], "rounds");
}

#[tokio::test]
async fn qutrit_session_with_matrix_observable() {
    let app = router(SessionStore::new());
    let id = create(
        &app,
        json!({
            "ensemble": { "dimension": 3, "members": [
                { "weight": 0.6, "amplitudes": [[1, 0], [0, 0], [0, 0]] },
                { "weight": 0.4, "amplitudes": [[0, 0], [0, 0], [1, 0]] }
            ] },
            "rounds": 50,
            "seed": 3
        }),
    )
    .await;
    let diag = json!({ "matrix": [[[3, 0], [0, 0], [0, 0]], [[0, 0], [2, 0], [0, 0]], [[0, 0], [0, 0], [1, 0]]] });
    let (status, v, _) = call(
        &app,
        "POST",
        &format!("/sessions/{id}/rounds"),
        Some(play(diag, 0, 50)),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{v}");
    let (_, a, _) = call(&app, "GET", &format!("/sessions/{id}/analysis"), None).await;
    assert!(a["restricted_optimum"].is_null());
    assert!((a["unrestricted_optimum"]["payoff"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    assert!((a["strategies"][0]["expected_payoff"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    let prepared: Vec<u64> = a["preparations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect();
    for (r, p) in a["rounds"].as_array().unwrap().iter().zip(&prepared) {
        let won = r["point"] == 1;
        assert_eq!(won, *p == 0);
    }
}

#[tokio::test]
async fn seeded_replay_is_identical() {
    async fn run() -> (Vec<u8>, Value) {
        let app = router(SessionStore::new());
        let id = create(
            &app,
            json!({ "ensemble": { "preset": "rho2", "p1": 0.75 }, "rounds": 30, "seed": 2024 }),
        )
        .await;
        let uri = format!("/sessions/{id}/rounds");
        let mut outcomes = Vec::new();
        for (obs, n) in [("z", 10), ("x", 15), ("z", 5)] {
            let (_, _, raw) = call(&app, "POST", &uri, Some(play(json!(obs), 0, n))).await;
            outcomes.extend(raw);
        }
        let (_, mut a, _) = call(&app, "GET", &format!("/sessions/{id}/analysis"), None).await;
        a.as_object_mut().unwrap().remove("id");
        (outcomes, a)
    }
    let (o1, a1) = run().await;
    let (o2, a2) = run().await;
    assert_eq!(o1, o2);
    assert_eq!(a1, a2);
}
