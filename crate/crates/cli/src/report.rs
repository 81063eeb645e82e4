//! Deterministic report rendering.
//!
//! Machine output is JSON written by hand so the byte stream is fully
//! pinned: keys keep insertion order, floats are always serialized with 17
//! significant digits (`{:.16e}`), which round-trips every finite f64
//! losslessly, and indentation is fixed at two spaces.

/// Report tree; maps preserve insertion order.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Bool(bool),
    UInt(u64),
    Num(f64),
    Str(String),
    List(Vec<Value>),
    Map(Vec<(String, Value)>),
}

impl Value {
    pub fn map() -> Vec<(String, Value)> {
        Vec::new()
    }

    /// Finite float, or `null` for anything else (infinities show up in
    /// vacuous ordering bounds).
    pub fn num_or_null(x: f64) -> Value {
        if x.is_finite() {
            Value::Num(x)
        } else {
            Value::Null
        }
    }

    pub fn from_states(states: &[usize]) -> Value {
        Value::List(states.iter().map(|&s| Value::UInt(s as u64)).collect())
    }

    /// Renders the tree as pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Value::Null => out.push_str("null"),
            Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Value::UInt(u) => out.push_str(&u.to_string()),
            Value::Num(x) => out.push_str(&format_f64(*x)),
            Value::Str(s) => write_json_string(out, s),
            Value::List(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    item.write(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push(']');
            }
            Value::Map(entries) => {
                if entries.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (key, value)) in entries.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    write_json_string(out, key);
                    out.push_str(": ");
                    value.write(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push('}');
            }
        }
    }
}

fn push_indent(out: &mut String, levels: usize) {
    for _ in 0..levels {
        out.push_str("  ");
    }
}

fn write_json_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

/// 17 significant digits; every finite f64 survives a parse round trip.
pub fn format_f64(x: f64) -> String {
    debug_assert!(x.is_finite(), "reports never carry non-finite numbers");
    let x = if x == 0.0 { 0.0 } else { x }; // collapse -0
    format!("{x:.16e}")
}
