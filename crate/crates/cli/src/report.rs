//! Deterministic report serialization: an order-preserving JSON writer with
//! floats at 17 significant digits, CSV emitters, and the config hash. Two
//! runs with the same config and seed produce byte-identical output.

use bergman_core::C64;
use nalgebra::DMatrix;

/// JSON value with insertion-ordered objects.
#[derive(Debug, Clone)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Array(Vec<Json>),
    Object(Vec<(String, Json)>),
}

impl Json {
    pub fn object() -> Json {
        Json::Object(Vec::new())
    }

    pub fn push(&mut self, key: &str, value: Json) -> &mut Self {
        match self {
            Json::Object(entries) => entries.push((key.to_string(), value)),
            _ => unreachable!("push on non-object"),
        }
        self
    }
}

/// 17 significant digits; round-trips every f64.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // JSON has no infinities; report them as strings
        format!("\"{x}\"")
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

pub fn render_json(value: &Json, out: &mut String, indent: usize) {
    let pad = "  ".repeat(indent);
    match value {
        Json::Null => out.push_str("null"),
        Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Json::Int(i) => out.push_str(&i.to_string()),
        Json::Float(x) => out.push_str(&format_float(*x)),
        Json::Str(s) => {
            out.push('"');
            out.push_str(&escape(s));
            out.push('"');
        }
        Json::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&"  ".repeat(indent + 1));
                render_json(item, out, indent + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad);
            out.push(']');
        }
        Json::Object(entries) => {
            if entries.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (key, item)) in entries.iter().enumerate() {
                out.push_str(&"  ".repeat(indent + 1));
                out.push('"');
                out.push_str(&escape(key));
                out.push_str("\": ");
                render_json(item, out, indent + 1);
                if i + 1 < entries.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad);
            out.push('}');
        }
    }
}

pub fn to_string(value: &Json) -> String {
    let mut out = String::new();
    render_json(value, &mut out, 0);
    out.push('\n');
    out
}

pub fn complex_json(z: C64) -> Json {
    Json::Array(vec![Json::Float(z.re), Json::Float(z.im)])
}

pub fn matrix_json(m: &DMatrix<C64>) -> Json {
    Json::Array(
        (0..m.nrows())
            .map(|i| Json::Array((0..m.ncols()).map(|j| complex_json(m[(i, j)])).collect()))
            .collect(),
    )
}

/// FNV-1a over the raw config bytes, as a hex tag.
pub fn config_hash(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("fnv1a:{hash:016x}")
}

/// The common report envelope every command embeds.
pub fn envelope(command: &str, hash: &str, seed: Option<u64>) -> Json {
    let mut obj = Json::object();
    obj.push("tool", Json::Str("bergman".into()))
        .push("version", Json::Str(env!("CARGO_PKG_VERSION").into()))
        .push("command", Json::Str(command.into()))
        .push("config_hash", Json::Str(hash.into()))
        .push(
            "seed",
            match seed {
                Some(s) => Json::Int(s as i64),
                None => Json::Null,
            },
        );
    obj
}
