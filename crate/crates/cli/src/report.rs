//! Human-readable summary followed by a `key = value` machine block.

use std::fmt::Write as _;

use monotrack_core::RootSet;

/// 17 significant digits; `-inf` is `unbounded`.
pub fn real(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "unbounded".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}

/// Reals separated by spaces, `none` when empty.
pub fn reals(xs: &[f64]) -> String {
    if xs.is_empty() {
        "none".into()
    } else {
        xs.iter().map(|&x| real(x)).collect::<Vec<_>>().join(" ")
    }
}

/// Roots as `re` or `re±imi` tokens with multiplicity expanded.
pub fn roots(r: &RootSet) -> String {
    let mut toks = Vec::new();
    for x in &r.real {
        for _ in 0..x.multiplicity {
            toks.push(real(x.value));
        }
    }
    for c in &r.complex {
        for _ in 0..c.multiplicity {
            toks.push(format!("{}±{}i", real(c.re), real(c.im)));
        }
    }
    if toks.is_empty() {
        "none".into()
    } else {
        toks.join(" ")
    }
}

/// Short human form of a root set, six significant digits.
pub fn roots_short(r: &RootSet) -> String {
    let mut toks = Vec::new();
    for x in &r.real {
        let t = format!("{:.6}", x.value);
        toks.push(if x.multiplicity > 1 {
            format!("{t} (x{})", x.multiplicity)
        } else {
            t
        });
    }
    for c in &r.complex {
        toks.push(format!("{:.6}±{:.6}i", c.re, c.im));
    }
    if toks.is_empty() {
        "none".into()
    } else {
        toks.join(", ")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    command: String,
    text: Vec<String>,
    machine: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            command: command.to_string(),
            text: Vec::new(),
            machine: Vec::new(),
        }
    }

    pub fn say(&mut self, line: impl Into<String>) -> &mut Self {
        self.text.push(line.into());
        self
    }

    pub fn put(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.machine.push((key.to_string(), value.into()));
        self
    }

    pub fn put_real(&mut self, key: &str, x: f64) -> &mut Self {
        self.put(key, real(x))
    }

    pub fn put_int(&mut self, key: &str, x: usize) -> &mut Self {
        self.put(key, x.to_string())
    }

    pub fn put_bool(&mut self, key: &str, x: bool) -> &mut Self {
        self.put(key, x.to_string())
    }

    pub fn value(&self, key: &str) -> Option<&str> {
        self.machine
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn machine_block(&self) -> String {
        let mut s = String::from("[machine]\n");
        let _ = writeln!(s, "command = {}", self.command);
        for (k, v) in &self.machine {
            let _ = writeln!(s, "{k} = {v}");
        }
        s.push_str("[end]\n");
        s
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for line in &self.text {
            s.push_str(line);
            s.push('\n');
        }
        if !self.text.is_empty() {
            s.push('\n');
        }
        s.push_str(&self.machine_block());
        s
    }
}
