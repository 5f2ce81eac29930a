//! Run reports: human-readable lines on stdout plus a machine-readable
//! JSON document for `--out`. Reports are byte-identical across runs with
//! fixed inputs once timings are excluded via `--no-timings`.

use std::time::Instant;

use serde_json::{json, Value};

pub struct RunReport {
    command: &'static str,
    config: Value,
    results: Value,
    lines: Vec<String>,
    started: Instant,
}

impl RunReport {
    pub fn new(command: &'static str) -> Self {
        RunReport {
            command,
            config: Value::Null,
            results: Value::Null,
            lines: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn config(&mut self, v: Value) {
        self.config = v;
    }

    pub fn results(&mut self, v: Value) {
        self.results = v;
    }

    pub fn line(&mut self, l: String) {
        self.lines.push(l);
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn to_json(&self, with_timings: bool) -> Value {
        let mut doc = json!({
            "command": self.command,
            "config": self.config,
            "results": self.results,
        });
        if with_timings {
            doc["timings"] = json!({
                "elapsed_ms": self.started.elapsed().as_millis() as u64,
            });
        }
        doc
    }

    pub fn print(&self) {
        for l in &self.lines {
            println!("{l}");
        }
    }

    pub fn write_out(&self, path: &std::path::Path, with_timings: bool) -> std::io::Result<()> {
        let doc = self.to_json(with_timings);
        std::fs::write(path, format!("{:#}\n", doc))
    }
}
