//! JSON-lines diagnostics on stderr. Info events are emitted only when
//! `PRIZELOOP_LOG=info`; errors always are.

use serde_json::{json, Value};

fn verbose() -> bool {
    std::env::var("PRIZELOOP_LOG").is_ok_and(|v| v.eq_ignore_ascii_case("info"))
}

pub fn event(name: &str, fields: Value) {
    if verbose() {
        eprintln!("{}", json!({"level": "info", "event": name, "fields": fields}));
    }
}

pub fn error(kind: &str, message: &str) {
    eprintln!("{}", json!({"level": "error", "event": kind, "message": message}));
}
