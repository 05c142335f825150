//! Self-describing output envelope with byte-deterministic JSON and CSV
//! renderings. Both formats share one real-number formatter (15 significant
//! digits), so numeric values are identical across them by construction.

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Uint(u64),
    Real(f64),
    /// Arbitrary-precision integer as a decimal string (JSON keeps it quoted:
    /// these exceed 64-bit).
    Big(String),
    Null,
}

impl Cell {
    pub fn opt_real(v: Option<f64>) -> Cell {
        match v {
            Some(v) => Cell::Real(v),
            None => Cell::Null,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone)]
pub struct Envelope {
    pub command: &'static str,
    pub params: Vec<(String, String)>,
    pub constants: Vec<(&'static str, f64)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

/// 15 significant digits, scientific; the one formatter every real value
/// passes through.
pub fn fmt_real(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    format!("{:.14e}", v)
}

fn json_escape(s: &str) -> String {
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

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Cell {
    fn json(&self) -> String {
        match self {
            Cell::Text(s) => format!("\"{}\"", json_escape(s)),
            Cell::Uint(v) => v.to_string(),
            Cell::Real(v) if v.is_finite() => fmt_real(*v),
            Cell::Real(_) => "null".to_string(),
            Cell::Big(s) => format!("\"{}\"", json_escape(s)),
            Cell::Null => "null".to_string(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => csv_field(s),
            Cell::Uint(v) => v.to_string(),
            Cell::Real(v) if v.is_finite() => fmt_real(*v),
            Cell::Real(_) => String::new(),
            Cell::Big(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }
}

impl Envelope {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n  \"schema_version\": \"1\",\n");
        out.push_str(&format!("  \"command\": \"{}\",\n", json_escape(self.command)));
        out.push_str("  \"params\": {");
        for (i, (k, v)) in self.params.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&format!("\"{}\": \"{}\"", json_escape(k), json_escape(v)));
        }
        out.push_str("},\n  \"constants_used\": {");
        for (i, (k, v)) in self.constants.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&format!("\"{}\": {}", k, fmt_real(*v)));
        }
        out.push_str("},\n  \"rows\": [\n");
        for (ri, row) in self.rows.iter().enumerate() {
            out.push_str("    {");
            for (ci, cell) in row.iter().enumerate() {
                if ci > 0 {
                    out.push_str(", ");
                }
                out.push_str(&format!("\"{}\": {}", self.columns[ci], cell.json()));
            }
            out.push('}');
            if ri + 1 < self.rows.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("  ]\n}\n");
        out
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# schema_version,1\n");
        out.push_str(&format!("# command,{}\n", csv_field(self.command)));
        for (k, v) in &self.params {
            out.push_str(&format!("# param,{},{}\n", csv_field(k), csv_field(v)));
        }
        for (k, v) in &self.constants {
            out.push_str(&format!("# constant,{},{}\n", k, fmt_real(*v)));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|c| c.csv()).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}
