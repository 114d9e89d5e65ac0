use std::io;

use parmint::catalog::IntegralFamily;
use parmint::expr::Bindings;
use parmint::quadrature::QuadratureResult;
use parmint::verifier::{CheckTolerance, Verifier};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

/// One evaluated point: quadrature next to the closed form.
#[derive(Clone, Debug, Serialize)]
pub struct ReportRecord {
    pub family_id: String,
    pub params: Bindings,
    pub quadrature: QuadratureResult,
    pub closed_form_value: f64,
    pub abs_dev: f64,
    pub rel_dev: f64,
    pub pass: bool,
}

impl ReportRecord {
    /// Evaluates `family` at `b`, which must already satisfy its ranges.
    /// A closed form that cannot be evaluated shows up as NaN (null in
    /// JSON) and fails the record.
    pub fn evaluate(verifier: &Verifier, family: &IntegralFamily, b: &Bindings) -> Result<ReportRecord, String> {
        let quadrature = verifier.quadrature(family, b).map_err(|e| e.to_string())?;
        let closed_form_value = family.closed_form_value(b).unwrap_or(f64::NAN);
        let abs_dev = (quadrature.value - closed_form_value).abs();
        let rel_dev = abs_dev / closed_form_value.abs().max(1e-300);
        let allowed = CheckTolerance::closed_form(family).allowed(closed_form_value);
        Ok(ReportRecord {
            family_id: family.id.clone(),
            params: b.clone(),
            quadrature,
            closed_form_value,
            abs_dev,
            rel_dev,
            pass: quadrature.is_converged() && abs_dev <= allowed,
        })
    }
}

/// Pretty JSON with every float written to 17 significant digits, enough
/// to round-trip any f64. Non-finite values become `null`.
struct Sig17<'a>(PrettyFormatter<'a>);

impl Formatter for Sig17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

#[derive(Serialize)]
struct CsvRow {
    param: f64,
    quad_value: f64,
    quad_error: f64,
    closed_form: f64,
    abs_dev: f64,
    rel_dev: f64,
}

/// Sweep table: header row, ',' delimiter, '.' decimals, shortest
/// round-trip float text.
pub fn to_csv(swept: &str, records: &[ReportRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(CsvRow {
            param: r.params.get(swept).unwrap_or(f64::NAN),
            quad_value: r.quadrature.value,
            quad_error: r.quadrature.error_estimate,
            closed_form: r.closed_form_value,
            abs_dev: r.abs_dev,
            rel_dev: r.rel_dev,
        })
        .expect("writing CSV to memory cannot fail");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("CSV is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_17_digits() {
        let s = to_json(&[std::f64::consts::PI, 0.1, f64::NAN]);
        assert!(s.contains("3.1415926535897931e0"), "{s}");
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("null"), "{s}");
        let back: Vec<Option<f64>> = serde_json::from_str(&s).unwrap();
        assert_eq!(back[0], Some(std::f64::consts::PI));
        assert_eq!(back[1], Some(0.1));
    }

    #[test]
    fn csv_header_and_rows() {
        let family = parmint::catalog::Catalog::builtin().get("eq_3.2").unwrap().clone();
        let v = Verifier::new(Default::default());
        let b = Bindings::new().with("a", 1.0).with("l", 0.5);
        let r = ReportRecord::evaluate(&v, &family, &b).unwrap();
        let text = to_csv("l", &[r]);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("param,quad_value,quad_error,closed_form,abs_dev,rel_dev"));
        assert!(lines.next().unwrap().starts_with("0.5,"));
    }
}
