//! Numeric literal scanning shared by prompt construction and compliance.

use alloc::string::String;
use alloc::vec::Vec;

/// A decimal literal found in text: ASCII digits with an optional fractional
/// part (`[0-9]+(\.[0-9]+)?`). Signs are not part of the token.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberToken {
    pub text: String,
    pub value: f64,
    /// Byte offsets into the scanned text.
    pub start: usize,
    pub end: usize,
}

pub fn scan_numbers(text: &str) -> Vec<NumberToken> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if !bytes[i].is_ascii_digit() {
            i += 1;
            continue;
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
        let literal = &text[start..i];
        out.push(NumberToken {
            text: literal.into(),
            value: literal.parse().unwrap_or(f64::NAN),
            start,
            end: i,
        });
    }
    out
}

/// Equality after rounding both sides to two decimals, so `25`, `25.0` and
/// `25.00` are the same number.
pub fn same_at_two_decimals(a: f64, b: f64) -> bool {
    libm::round(a * 100.0) == libm::round(b * 100.0)
}
