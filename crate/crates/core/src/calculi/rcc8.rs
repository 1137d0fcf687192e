use super::format::{self, CalculusFile};
use super::{Calculus, CalculusError};

/// The shipped RCC-8 table in calculus file format.
pub const RCC8_DATA: &str = include_str!("../../data/rcc8.cal");

/// Parses and validates an RCC-8-style binary calculus file.
pub fn parse_rcc8(text: &str) -> Result<Calculus, CalculusError> {
    let c = match format::parse(text)? {
        CalculusFile::Binary(c) => c,
        _ => return Err(CalculusError::Structure("expected a binary calculus".into())),
    };
    let violations = c.validate();
    if !violations.is_empty() {
        return Err(CalculusError::Invalid {
            name: c.name().to_string(),
            violations,
        });
    }
    Ok(c)
}

/// RCC-8 with identity `EQ`.
///
/// Panics with the list of violated axioms if the embedded table is broken.
pub fn load_rcc8() -> Calculus {
    match parse_rcc8(RCC8_DATA) {
        Ok(c) => c,
        Err(e) => panic!("embedded RCC-8 table is invalid: {e}"),
    }
}
