//! Tabular reports written as CSV (with a `#` metadata header) or JSON.

use serde_json::{Map, Value};

use crate::error::CliError;

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // 17 significant digits round-trip every binary64 value.
            Cell::Num(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::Num(x) => format!("{x}"),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map(Value::Number).unwrap_or(Value::Null),
            Cell::Int(n) => Value::from(*n),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// Run metadata: command, config echo, versions and status notes.
    pub meta: Map<String, Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(command: &str, config: &impl serde::Serialize, columns: Vec<&'static str>) -> Self {
        let mut meta = Map::new();
        meta.insert("command".into(), Value::from(command));
        meta.insert("config".into(), serde_json::to_value(config).unwrap_or(Value::Null));
        let mut versions = Map::new();
        versions.insert("jacobi-cli".into(), Value::from(env!("CARGO_PKG_VERSION")));
        versions.insert("jacobi-spectral".into(), Value::from(jacobi_spectral::VERSION));
        meta.insert("versions".into(), Value::Object(versions));
        Report { meta, columns, rows: Vec::new() }
    }

    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.meta.insert(key.into(), value.into());
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let text = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("# {k}: {text}\n"));
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| CliError::Output(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(|e| CliError::Output(e.to_string()))?;
        }
        let body = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
        out.push_str(&String::from_utf8(body).map_err(|e| CliError::Output(e.to_string()))?);
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut obj = Map::new();
                for (c, v) in self.columns.iter().zip(r) {
                    obj.insert((*c).into(), v.json());
                }
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("meta".into(), Value::Object(self.meta.clone()));
        doc.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).map_err(|e| CliError::Output(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("test", &serde_json::json!({"x": 1}), vec!["a", "b", "c"]);
        r.push(vec![Cell::Num(0.1), Cell::Empty, Cell::Bool(true)]);
        r.push(vec![Cell::Num(1.0 / 3.0), Cell::Int(7), Cell::Text("x,y".into())]);
        r
    }

    #[test]
    fn csv_numbers_round_trip() {
        let text = sample().to_csv().unwrap();
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body[0], "a,b,c");
        let first: f64 = body[2].split(',').next().unwrap().parse().unwrap();
        assert_eq!(first, 1.0 / 3.0);
        assert!(body[2].ends_with("\"x,y\""));
        assert!(text.starts_with("# command: test\n"));
    }

    #[test]
    fn json_mirrors_rows() {
        let v: Value = serde_json::from_str(&sample().to_json().unwrap()).unwrap();
        assert_eq!(v["rows"][0]["a"], 0.1);
        assert!(v["rows"][0]["b"].is_null());
        assert_eq!(v["rows"][1]["b"], 7);
        assert_eq!(v["meta"]["command"], "test");
    }
}
