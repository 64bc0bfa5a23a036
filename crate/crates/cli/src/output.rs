//! CSV tables with fixed float formatting.

use std::io::Write;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Rows sharing a parameter echo prefix.
#[derive(Debug, Clone, Default)]
pub struct Table {
    header: Vec<String>,
    echo: Vec<String>,
    result_cols: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(echo: Vec<(String, String)>, result_cols: &[&str]) -> Self {
        let (names, values): (Vec<_>, Vec<_>) = echo.into_iter().unzip();
        let result_cols: Vec<String> = result_cols.iter().map(|s| s.to_string()).collect();
        let header = names.into_iter().chain(result_cols.iter().cloned()).collect();
        Self { header, echo: values, result_cols, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.result_cols.len(), "row width");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// Appends a column holding `value` on every row.
    pub fn add_constant_column(&mut self, name: &str, value: String) {
        self.header.push(name.to_string());
        self.result_cols.push(name.to_string());
        for r in &mut self.rows {
            r.push(value.clone());
        }
    }

    pub fn write(&self, out: &mut impl Write) -> std::io::Result<()> {
        let line = |cells: Vec<&str>| cells.into_iter().map(quote).collect::<Vec<_>>().join(",");
        writeln!(out, "{}", line(self.header.iter().map(String::as_str).collect()))?;
        for r in &self.rows {
            let cells = self.echo.iter().chain(r.iter()).map(String::as_str).collect();
            writeln!(out, "{}", line(cells))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_formatting() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn echo_prefixes_rows() {
        let mut t = Table::new(vec![("p".into(), "2".into()), ("s".into(), "a,b".into())], &["x"]);
        t.push(vec![num(1.0)]);
        t.add_constant_column("seconds", "0".into());
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "p,s,x,seconds\n2,\"a,b\",1.0000000000000000e0,0\n");
    }
}
