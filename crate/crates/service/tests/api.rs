use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use imp_slice_service::{app, AppState};

const INTRO: &str = "if (y = 1) then { y := x + 1 } else { y := y + 1 } ; z := z + 1";
const DIVISION: &str = "r := a ; while (b <= r) do { q := q + 1 ; r := r - b } ; \
                        if (!(r = 0)) then { res := 0 } else { res := 1 }";

async fn call(router: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(match body {
            Some(b) => Body::from(b.to_string()),
            None => Body::empty(),
        })
        .unwrap();
    let response = router.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

async fn session(router: &Router, program: &str, state: &str) -> String {
    let (status, body) = call(
        router,
        Method::POST,
        "/sessions",
        Some(json!({"program": program, "state": state})),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    body["session_id"].as_str().unwrap().to_owned()
}

fn router() -> Router {
    app(AppState::default(), None)
}

#[tokio::test]
async fn create_session_runs_the_program() {
    let r = router();
    let (status, body) = call(
        &r,
        Method::POST,
        "/sessions",
        Some(json!({"program": INTRO, "state": "x = 1, y = 0, z = 2"})),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["schema_version"], 1);
    assert_eq!(body["output_text"], "x = 1, y = 1, z = 3");
    assert_eq!(body["output_state"][1], json!({"name": "y", "value": 1}));
    assert_eq!(body["trace_stats"]["assignments"], 2);
    assert_eq!(body["trace_stats"]["branch_decisions"], json!([false]));
    assert_eq!(body["trace_summary"], body["trace_stats"]);

    let id = body["session_id"].as_str().unwrap();
    let (status, again) = call(&r, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again, body);
}

#[tokio::test]
async fn structured_inputs_are_accepted() {
    let r = router();
    let (status, body) = call(
        &r,
        Method::POST,
        "/sessions",
        Some(json!({
            "program": {"assign": {"var": "x", "expr": {"bin": {"op": "add", "lhs": {"var": "x"}, "rhs": {"nat": 1}}}}},
            "state": [{"name": "x", "value": 41}],
        })),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    assert_eq!(body["output_text"], "x = 42");
    assert_eq!(body["program_text"], "x := x + 1");
}

#[tokio::test]
async fn malformed_program_is_a_located_400() {
    let r = router();
    let (status, body) = call(
        &r,
        Method::POST,
        "/sessions",
        Some(json!({"program": "x := (", "state": "x = 1"})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"], "parse_error");
    assert_eq!(body["source"], "program");
    assert_eq!(body["line"], 1);
    assert!(body["expected"].as_array().is_some_and(|e| !e.is_empty()));

    let (status, body) = call(
        &r,
        Method::POST,
        "/sessions",
        Some(json!({"program": "skip", "state": "x = 1, x = 2"})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"], "duplicate_variable");

    let (status, body) = call(&r, Method::POST, "/sessions", Some(json!({"program": "skip"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"], "bad_request");
}

#[tokio::test]
async fn evaluation_failures_are_422() {
    let r = router();
    let (status, body) = call(
        &r,
        Method::POST,
        "/sessions",
        Some(json!({"program": "while (0 = 0) do { skip }", "state": "x = 0", "fuel": 500})),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"], "fuel_exhausted");

    let (status, body) = call(
        &r,
        Method::POST,
        "/sessions",
        Some(json!({"program": "x := y", "state": "x = 0"})),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"], "unbound_variable");

    let (status, _) = call(
        &r,
        Method::POST,
        "/sessions",
        Some(json!({"program": "skip", "state": "x = 0", "fuel": 0})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn backward_slice_with_hole_spans() {
    let r = router();
    let id = session(&r, INTRO, "x = 1, y = 0, z = 2").await;
    let (status, body) = call(
        &r,
        Method::POST,
        &format!("/sessions/{id}/bwd"),
        Some(json!({"criterion": "x = _, y = 1, z = _"})),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(
        body["program_slice_text"],
        "if (y = 1) then { _ } else { y := y + 1 } ; _"
    );
    assert_eq!(body["input_slice_text"], "x = _, y = 0, z = _");
    let text = body["program_text"].as_str().unwrap();
    let dimmed: Vec<&str> = body["holes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|h| &text[h["start"].as_u64().unwrap() as usize..h["end"].as_u64().unwrap() as usize])
        .collect();
    assert_eq!(dimmed, ["y := x + 1", "z := z + 1"]);
}

#[tokio::test]
async fn empty_criterion_dims_the_whole_program() {
    let r = router();
    let id = session(&r, INTRO, "x = 1, y = 0, z = 2").await;
    let (status, body) = call(
        &r,
        Method::POST,
        &format!("/sessions/{id}/bwd"),
        Some(json!({"criterion": "x = _, y = _, z = _"})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["program_slice"], "_");
    assert_eq!(body["holes"][0]["start"], 0);
    assert_eq!(body["holes"][0]["end"], body["program_text"].as_str().unwrap().len());
}

#[tokio::test]
async fn division_slice() {
    let r = router();
    let id = session(&r, DIVISION, "q = 0, r = 0, res = 0, a = 4, b = 2").await;
    let (status, body) = call(
        &r,
        Method::POST,
        &format!("/sessions/{id}/bwd"),
        Some(json!({"criterion": "q = _, r = _, res = 1, a = _, b = _"})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        body["program_slice_text"],
        "r := a ; while (b <= r) do { _ ; r := r - b } ; if (!(r = 0)) then { _ } else { res := 1 }"
    );
    assert_eq!(body["input_slice_text"], "q = _, r = _, res = _, a = 4, b = 2");
    let text = body["program_text"].as_str().unwrap();
    let dimmed: Vec<&str> = body["holes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|h| &text[h["start"].as_u64().unwrap() as usize..h["end"].as_u64().unwrap() as usize])
        .collect();
    assert_eq!(dimmed, ["q := q + 1", "res := 0"]);
}

#[tokio::test]
async fn criterion_errors_are_422() {
    let r = router();
    let id = session(&r, INTRO, "x = 1, y = 0, z = 2").await;
    let (status, body) = call(
        &r,
        Method::POST,
        &format!("/sessions/{id}/bwd"),
        Some(json!({"criterion": "x = _, y = 5, z = _"})),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"], "criterion_mismatch");
    let (status, body) = call(
        &r,
        Method::POST,
        &format!("/sessions/{id}/bwd"),
        Some(json!({"criterion": "x = _"})),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"], "lattice_mismatch");
}

#[tokio::test]
async fn forward_slices() {
    let r = router();
    let id = session(&r, INTRO, "x = 1, y = 0, z = 2").await;
    let uri = format!("/sessions/{id}/fwd");
    let (status, body) = call(
        &r,
        Method::POST,
        &uri,
        Some(json!({"partial_program": "if (y = 1) then { _ } else { y := y + 1 } ; _", "partial_state": "x = _, y = 0, z = _"})),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["partial_output_text"], "x = _, y = 1, z = _");

    let (_, body) = call(
        &r,
        Method::POST,
        &uri,
        Some(json!({"partial_program": "_", "partial_state": "x = 1, y = 0, z = 2"})),
    )
    .await;
    // a hole program erases only what the run wrote
    assert_eq!(body["partial_output_text"], "x = 1, y = _, z = _");

    let (status, body) = call(
        &r,
        Method::POST,
        &uri,
        Some(json!({"partial_program": "skip", "partial_state": "x = _, y = _, z = _"})),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"], "lattice_mismatch");
}

#[tokio::test]
async fn trace_listing() {
    let r = router();
    let id = session(&r, INTRO, "x = 1, y = 0, z = 2").await;
    let (status, body) = call(&r, Method::GET, &format!("/sessions/{id}/trace"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(body["listing"].as_str().unwrap().contains("if_false"));
    assert!(body["trace"].is_object());
}

#[tokio::test]
async fn check_certifies_and_is_cached() {
    let r = router();
    let id = session(&r, INTRO, "x = 1, y = 0, z = 2").await;
    let uri = format!("/sessions/{id}/check");
    let (status, first) = call(&r, Method::GET, &uri, None).await;
    assert_eq!(status, StatusCode::OK, "{first}");
    assert_eq!(first["holds"], true);
    assert_eq!(first["laws"].as_array().unwrap().len(), 7);
    let (_, second) = call(&r, Method::GET, &uri, None).await;
    assert_eq!(first, second);

    let (status, body) = call(&r, Method::GET, &format!("{uri}?bound=10"), None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"], "size_exceeded");
    assert!(body["cardinality"].is_string());
}

#[tokio::test]
async fn repeated_slices_are_identical() {
    let r = router();
    let id = session(&r, DIVISION, "q = 0, r = 0, res = 0, a = 4, b = 2").await;
    let uri = format!("/sessions/{id}/bwd");
    let req = json!({"criterion": "q = _, r = _, res = 1, a = _, b = _"});
    let (_, a) = call(&r, Method::POST, &uri, Some(req.clone())).await;
    let (_, b) = call(&r, Method::POST, &uri, Some(req)).await;
    assert_eq!(a, b);
}

#[tokio::test]
async fn unknown_sessions_and_health() {
    let r = router();
    let (status, body) = call(&r, Method::GET, "/health", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "ok");
    for uri in [
        "/sessions/not-a-uuid",
        "/sessions/00000000-0000-0000-0000-000000000000/trace",
    ] {
        let (status, body) = call(&r, Method::GET, uri, None).await;
        assert_eq!(status, StatusCode::NOT_FOUND);
        assert_eq!(body["error"], "not_found");
    }
}

#[tokio::test]
async fn sessions_are_evicted_least_recently_used_first() {
    let state = AppState::new(2);
    let r = app(state.clone(), None);
    let first = session(&r, "skip", "x = 1").await;
    let _second = session(&r, "skip", "x = 2").await;
    let _third = session(&r, "skip", "x = 3").await;
    assert_eq!(state.len(), 2);
    let (status, _) = call(&r, Method::GET, &format!("/sessions/{first}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}
