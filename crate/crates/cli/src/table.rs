use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Rectangular CSV result with `#` metadata lines on top.
#[derive(Debug, Clone)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), metadata: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "ragged result row");
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Float cell with 17 significant digits (exact round trip).
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// SHA-256 of the canonical JSON of `(command, parameters)`. serde_json maps
/// are sorted, so the hash does not depend on flag order.
pub fn config_hash<T: Serialize>(command: &str, params: &T) -> String {
    let value = serde_json::json!({ "command": command, "parameters": params });
    let digest = Sha256::digest(value.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = ResultTable::new(&["a", "b"]);
        t.meta("seed", 3);
        t.push(vec!["1".into(), "x".into()]);
        assert_eq!(t.to_csv(), "# seed=3\na,b\n1,x\n");
    }

    #[test]
    fn hash_depends_on_command_and_values_only() {
        #[derive(Serialize)]
        struct P {
            x: f64,
            y: u32,
        }
        let h = config_hash("mean", &P { x: 0.5, y: 2 });
        assert_eq!(h.len(), 64);
        assert_eq!(h, config_hash("mean", &serde_json::json!({ "y": 2, "x": 0.5 })));
        assert_ne!(h, config_hash("distance", &P { x: 0.5, y: 2 }));
    }

    #[test]
    fn floats_round_trip() {
        let x = 16.0 / 9.0;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }
}
