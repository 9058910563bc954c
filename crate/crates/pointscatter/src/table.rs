//! CSV output with a header row and fixed 12-significant-digit numbers.

use std::fs::File;
use std::path::Path;

use crate::error::CliError;

/// `x` with 12 significant digits in the style of C's `%.12g`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub struct Table {
    writer: csv::Writer<File>,
}

impl Table {
    pub fn create<S: AsRef<str>>(path: &Path, header: &[S]) -> Result<Self, CliError> {
        let file = File::create(path).map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
        let mut writer = csv::Writer::from_writer(file);
        writer.write_record(header.iter().map(|h| h.as_ref()))?;
        Ok(Self { writer })
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) -> Result<(), CliError> {
        self.writer.write_record(fields.iter().map(|f| f.as_ref()))?;
        Ok(())
    }

    pub fn numbers(&mut self, values: &[f64]) -> Result<(), CliError> {
        self.writer.write_record(values.iter().map(|&v| fmt_num(v)))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.writer.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_num;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(23.572007215762), "23.5720072158");
        assert_eq!(fmt_num(-0.5), "-0.5");
        assert_eq!(fmt_num(6.1779121e-10), "6.1779121e-10");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(123456789012345.0), "1.23456789012e+14");
        assert_eq!(fmt_num(0.0001), "0.0001");
        assert_eq!(fmt_num(f64::NAN), "nan");
    }
}
