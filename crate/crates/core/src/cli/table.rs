//! CSV tables with a `#` metadata block.

use std::fmt::Write as _;
use std::io::Write;

use sha2::{Digest, Sha256};

use super::file::Units;

/// One CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    /// A named stand-in for a value that does not exist ("saturated", ...).
    Marker(&'static str),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Self::Num(x) if x.is_finite() => format!("{x}"),
            Self::Num(x) if *x == f64::INFINITY => "unbounded".into(),
            Self::Num(_) => "na".into(),
            Self::Int(n) => n.to_string(),
            Self::Bool(b) => b.to_string(),
            Self::Text(s) => s.clone(),
            Self::Marker(m) => (*m).into(),
        }
    }
}

/// Provenance written at the top of every table.
#[derive(Clone, Debug, PartialEq)]
pub struct Metadata {
    pub config_sha256: String,
    pub units: Units,
    pub extra: Vec<(String, String)>,
}

impl Metadata {
    /// Metadata for a resolved configuration, hashed through its canonical
    /// JSON form so defaults and CLI overrides are covered.
    pub fn for_config<T: serde::Serialize>(config: &T, units: Units) -> Self {
        let json = serde_json::to_string(config).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        let mut hex = String::with_capacity(64);
        for b in digest.iter() {
            let _ = write!(hex, "{b:02x}");
        }
        Self {
            config_sha256: hex,
            units,
            extra: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.extra.push((key.to_string(), value.to_string()));
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `# key: value` lines specific to this table.
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn new<S: ToString>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write<W: Write>(&self, mut w: W, meta: &Metadata) -> std::io::Result<()> {
        writeln!(w, "# tool: hetnet {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(w, "# config_sha256: {}", meta.config_sha256)?;
        writeln!(
            w,
            "# units: {} ({})",
            meta.units.name(),
            meta.units.legend()
        )?;
        for (k, v) in meta.extra.iter().chain(&self.notes) {
            writeln!(w, "# {k}: {v}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self, meta: &Metadata) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf, meta).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }
}
