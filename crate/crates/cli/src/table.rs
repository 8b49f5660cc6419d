//! Versioned CSV tables: `# dephasing-csv v1 <kind>`, optional `# key=value`
//! metadata lines, a column header, then rows.

pub const SCHEMA_VERSION: &str = "v1";

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub kind: String,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(kind: &str, columns: &[&str]) -> Self {
        Table { kind: kind.into(), meta: vec![], columns: columns.iter().map(|c| c.to_string()).collect(), rows: vec![] }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) {
        self.meta.push((key.into(), value.into()));
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = format!("# dephasing-csv {SCHEMA_VERSION} {}\n", self.kind);
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
        out
    }

    /// Column index by name.
    pub fn col(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// Scientific notation with 12 fractional digits.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.12e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Axis value: integers verbatim, everything else in scientific notation.
pub fn axis_value(x: f64, integer: bool) -> String {
    if integer {
        format!("{}", x as u64)
    } else {
        num(x)
    }
}

/// Parses a rendered table (for tests and downstream checks).
pub fn parse(text: &str) -> Option<Table> {
    let mut lines = text.lines();
    let first = lines.next()?;
    let kind = first.strip_prefix(&format!("# dephasing-csv {SCHEMA_VERSION} "))?.to_string();
    let mut meta = vec![];
    let mut body = String::new();
    for l in lines {
        match l.strip_prefix("# ") {
            Some(m) if body.is_empty() => {
                let (k, v) = m.split_once('=')?;
                meta.push((k.to_string(), v.to_string()));
            }
            _ => {
                body.push_str(l);
                body.push('\n');
            }
        }
    }
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let columns = r.headers().ok()?.iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.map(|x| x.iter().map(String::from).collect())).collect::<Result<_, _>>().ok()?;
    Some(Table { kind, meta, columns, rows })
}
