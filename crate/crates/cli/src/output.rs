use std::fmt::Write as _;

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Records,
}

/// Shortest round-trip form, so rows can be compared bit for bit.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), num)
}

#[derive(Clone, Debug, Default)]
pub struct Record {
    pub kind: String,
    pub fields: Vec<(String, String)>,
}

impl Record {
    pub fn new(kind: &str) -> Self {
        Record {
            kind: kind.to_string(),
            fields: Vec::new(),
        }
    }

    pub fn field(mut self, key: &str, value: impl ToString) -> Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn value(self, key: &str, v: f64) -> Self {
        self.field(key, num(v))
    }

    fn line(&self) -> String {
        let mut s = self.kind.clone();
        for (k, v) in &self.fields {
            // values never contain spaces in this format
            let v = v.replace(char::is_whitespace, "_");
            let _ = write!(s, " {k}={v}");
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

enum Block {
    Comment(String),
    Record(Record),
    Table(Table),
}

/// Everything a command prints, rendered at the end.
#[derive(Default)]
pub struct Report {
    blocks: Vec<Block>,
}

impl Report {
    pub fn comment(&mut self, text: impl Into<String>) {
        self.blocks.push(Block::Comment(text.into()));
    }

    pub fn record(&mut self, r: Record) {
        self.blocks.push(Block::Record(r));
    }

    pub fn table(&mut self, t: Table) {
        self.blocks.push(Block::Table(t));
    }

    /// In CSV form records become `#` lines and tables are separated by a
    /// blank line.
    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        let mut after_table = false;
        for block in &self.blocks {
            match block {
                Block::Comment(c) => {
                    for line in c.lines() {
                        let _ = writeln!(out, "# {line}");
                    }
                }
                Block::Record(r) => match format {
                    Format::Csv => {
                        let _ = writeln!(out, "# {}", r.line());
                    }
                    Format::Records => {
                        let _ = writeln!(out, "{}", r.line());
                    }
                },
                Block::Table(t) => match format {
                    Format::Csv => {
                        if after_table {
                            out.push('\n');
                        }
                        let _ = writeln!(out, "{}", t.columns.join(","));
                        for row in &t.rows {
                            let _ = writeln!(out, "{}", row.join(","));
                        }
                    }
                    Format::Records => {
                        for row in &t.rows {
                            let mut r = Record::new(&t.name);
                            for (c, v) in t.columns.iter().zip(row) {
                                r = r.field(c, v);
                            }
                            let _ = writeln!(out, "{}", r.line());
                        }
                    }
                },
            }
            after_table = matches!(block, Block::Table(_));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_records() {
        let mut r = Report::default();
        r.comment("run");
        let mut t = Table::new("row", &["n", "x"]);
        t.push(vec!["1".into(), num(0.5)]);
        r.table(t);
        r.record(Record::new("summary").value("total", 10.0));
        assert_eq!(r.render(Format::Csv), "# run\nn,x\n1,5e-1\n# summary total=1e1\n");
        assert_eq!(r.render(Format::Records), "# run\nrow n=1 x=5e-1\nsummary total=1e1\n");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
