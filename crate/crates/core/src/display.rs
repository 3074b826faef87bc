//! The single formatter for numeric output, and TSV/JSON table emitters.
//!
//! Display rule: values are carried with at least 30 significant digits and
//! rounded half away from zero to the requested number of places; exact
//! rationals print as `num/den`.

use num_rational::BigRational;
use serde_json::{Map, Value};

use crate::precision::{Decimal, WORKING_DIGITS};

/// Places used for the A/B approximant tables.
pub const TABLE_DP: u32 = 4;
/// Places used for decimal columns next to exact fractions.
pub const VALUE_DP: u32 = 10;

pub fn fraction(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn fixed(x: &Decimal, dp: u32) -> String {
    x.to_fixed(dp)
}

pub fn rational_fixed(r: &BigRational, dp: u32) -> String {
    Decimal::from_rational(r, WORKING_DIGITS).to_fixed(dp)
}

#[derive(Clone, Debug)]
pub enum Cell {
    Int(i64),
    Text(String),
    Fraction(BigRational),
    Fixed(Decimal, u32),
    Bool(bool),
    Empty,
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Fraction(r) => fraction(r),
            Cell::Fixed(x, dp) => fixed(x, *dp),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(n) => Value::from(*n),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
            other => Value::from(other.text()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Tsv,
    Json,
}

#[derive(Clone, Debug)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_tsv(&self) -> String {
        let mut out = self.columns.join("\t");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::text).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::json))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(rows)).expect("json");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Tsv => self.to_tsv(),
            Format::Json => self.to_json(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emitters() {
        let mut t = Table::new(["d", "value", "approx"]);
        let r = BigRational::new((-3).into(), 8.into());
        t.push(vec![
            Cell::Int(1),
            Cell::Fraction(r.clone()),
            Cell::Fixed(Decimal::from_rational(&r, 40), 10),
        ]);
        assert_eq!(t.to_tsv(), "d\tvalue\tapprox\n1\t-3/8\t-0.3750000000\n");
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v[0]["value"], "-3/8");
        assert_eq!(v[0]["d"], 1);
        assert_eq!(fraction(&BigRational::from_integer((-7).into())), "-7/1");
        assert_eq!(rational_fixed(&BigRational::new(1.into(), 16.into()), 4), "0.0625");
    }
}
