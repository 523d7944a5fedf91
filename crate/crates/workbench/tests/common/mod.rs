#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use postedit_core::suggest::SuggestConfig;
use postedit_workbench::providers::{Registry, StubData};
use postedit_workbench::service::Service;
use postedit_workbench::store::Store;
use serde_json::{json, Value};
use tower::ServiceExt;

pub fn stub_registry() -> Registry {
    Registry::stubs(&StubData::bundled()).unwrap()
}

pub fn service(store: Option<Store>) -> Arc<Service> {
    Arc::new(Service::new(stub_registry(), store, SuggestConfig::default(), 7).unwrap())
}

pub fn fixture_doc() -> Value {
    json!({
        "styleTable": {"1": "bold", "2": "equation", "3": "italic"},
        "segments": [
            "The <s 1>red</s 1> car <x 2/> stops",
            "the cat sleeps on the <s 3>mat</s 3>"
        ],
        "meta": {"sourceLang": "en", "targetLang": "de", "title": "Fixture"}
    })
}

pub async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into())) };
    (status, value)
}

pub async fn call_raw(app: &Router, method: &str, uri: &str, body: &str) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json").body(Body::from(body.to_string())).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}
