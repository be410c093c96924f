//! Fixed-format CSV output.

/// Formats `x` like C's `%.10e`: ten mantissa digits, signed exponent of at
/// least two digits.
pub fn sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.10e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// CSV document with a fixed header and scientific-notation data rows.
#[derive(Debug, Clone)]
pub struct Csv {
    columns: usize,
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self {
            columns: header.len(),
            text,
        }
    }

    pub fn row(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.columns, "row width does not match header");
        let cells: Vec<String> = values.iter().map(|&v| sci(v)).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Parses a CSV written by [`Csv`] back into its header and rows.
pub fn parse_csv(text: &str) -> Option<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header = lines.next()?.split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|c| c.parse::<f64>().ok())
                .collect::<Option<Vec<f64>>>()
        })
        .collect::<Option<Vec<_>>>()?;
    Some((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_c_printf() {
        assert_eq!(sci(1.189273236e9), "1.1892732360e+09");
        assert_eq!(sci(0.0), "0.0000000000e+00");
        assert_eq!(sci(-2.5e-7), "-2.5000000000e-07");
        assert_eq!(sci(1e100), "1.0000000000e+100");
        assert_eq!(sci(1.0), "1.0000000000e+00");
    }

    #[test]
    fn round_trips_to_printed_precision() {
        for x in [1.2345678901234, 6.02214076e23, 1.6e-19, 5.0] {
            let back: f64 = sci(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-10);
        }
    }

    #[test]
    fn csv_layout() {
        let mut csv = Csv::new(&["a", "b"]);
        csv.row(&[1.0, 2.0]);
        let text = csv.into_string();
        assert_eq!(text, "a,b\n1.0000000000e+00,2.0000000000e+00\n");
        let (header, rows) = parse_csv(&text).unwrap();
        assert_eq!(header, ["a", "b"]);
        assert_eq!(rows, vec![vec![1.0, 2.0]]);
    }
}
