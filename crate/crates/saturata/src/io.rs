//! Family file formats, shared by every tool in the workspace.
//!
//! Two formats are supported and sniffed on read:
//!
//! * JSON: `{"n": 3, "sets": [[1], [1,2], [1,3]]}` with elements `1..=n`.
//! * Compact: line one `n=<int>`, line two the membership bitmap as a
//!   lowercase hex number, least-significant digit last (so the final digit
//!   holds masks 0–3), zero-padded to `max(1, 2^n/4)` digits.

use crate::error::{Error, Result};
use crate::family::{SetFamily, DEFAULT_GROUND_SET_CAP};
use crate::mask::Mask;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyFormat {
    Json,
    Compact,
}

impl FamilyFormat {
    pub fn label(self) -> &'static str {
        match self {
            FamilyFormat::Json => "json",
            FamilyFormat::Compact => "compact",
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    n: usize,
    sets: Vec<Vec<usize>>,
}

pub fn write_family(f: &SetFamily, format: FamilyFormat) -> String {
    match format {
        FamilyFormat::Json => {
            let sets: Vec<Vec<usize>> = f.members().map(|m| m.elements().collect()).collect();
            let mut out = serde_json::to_string(&FamilyJson { n: f.n(), sets })
                .expect("serialization of plain integers cannot fail");
            out.push('\n');
            out
        }
        FamilyFormat::Compact => {
            let n = f.n();
            let digits = (1usize << n).div_ceil(4);
            let mut line = String::with_capacity(digits + 1);
            for d in (0..digits).rev() {
                let bit = 4 * d;
                let nibble = (f.words()[bit >> 6] >> (bit & 63)) & 0xf;
                line.push(char::from_digit(nibble as u32, 16).expect("nibble < 16"));
            }
            format!("n={n}\n{line}\n")
        }
    }
}

pub fn read_family(text: &str) -> Result<SetFamily> {
    read_family_with_cap(text, DEFAULT_GROUND_SET_CAP)
}

pub fn read_family_with_cap(text: &str, cap: usize) -> Result<SetFamily> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        read_json(trimmed, cap)
    } else if trimmed.starts_with("n=") {
        read_compact(trimmed, cap)
    } else {
        Err(Error::Format(
            "expected a JSON object or a compact header line starting with n=".into(),
        ))
    }
}

fn read_json(text: &str, cap: usize) -> Result<SetFamily> {
    let parsed: FamilyJson =
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let n = parsed.n;
    let mut fam = SetFamily::empty_with_cap(n, cap)?;
    for (i, set) in parsed.sets.iter().enumerate() {
        let mut mask = Mask::EMPTY;
        for (j, &elem) in set.iter().enumerate() {
            if elem < 1 || elem > n {
                return Err(Error::Format(format!(
                    "sets[{i}][{j}]: element {elem} out of range 1..={n}"
                )));
            }
            mask = mask.with(elem);
        }
        fam.insert(mask);
    }
    Ok(fam)
}

fn read_compact(text: &str, cap: usize) -> Result<SetFamily> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("missing header line".into()))?
        .trim();
    let n: usize = header
        .strip_prefix("n=")
        .ok_or_else(|| Error::Format(format!("line 1: expected n=<int>, got {header:?}")))?
        .parse()
        .map_err(|_| Error::Format(format!("line 1: invalid ground-set size in {header:?}")))?;
    let mut fam = SetFamily::empty_with_cap(n, cap)?;
    let digits_line = lines
        .next()
        .ok_or_else(|| Error::Format("line 2: missing bitmap line".into()))?
        .trim();
    let expect_digits = (1usize << n).div_ceil(4);
    if digits_line.len() != expect_digits {
        return Err(Error::Format(format!(
            "line 2: expected exactly {expect_digits} hex digits, got {}",
            digits_line.len()
        )));
    }
    for (pos, ch) in digits_line.chars().enumerate() {
        let nibble = ch.to_digit(16).ok_or_else(|| {
            Error::Format(format!("line 2, column {}: invalid hex digit {ch:?}", pos + 1))
        })? as u64;
        let digit_index = expect_digits - 1 - pos;
        let base = 4 * digit_index;
        for b in 0..4 {
            if nibble >> b & 1 == 1 {
                let mask = base + b;
                if mask >= (1usize << n) {
                    return Err(Error::Format(format!(
                        "line 2, column {}: bit for mask {mask} exceeds 2^{n}",
                        pos + 1
                    )));
                }
                fam.insert(Mask(mask as u32));
            }
        }
    }
    if let Some(extra) = lines.next() {
        if !extra.trim().is_empty() {
            return Err(Error::Format("line 3: unexpected trailing content".into()));
        }
    }
    Ok(fam)
}

pub fn read_family_file(path: &Path) -> Result<SetFamily> {
    read_family(&std::fs::read_to_string(path)?)
}

pub fn read_family_file_with_cap(path: &Path, cap: usize) -> Result<SetFamily> {
    read_family_with_cap(&std::fs::read_to_string(path)?, cap)
}

pub fn write_family_file(path: &Path, f: &SetFamily, format: FamilyFormat) -> Result<()> {
    std::fs::write(path, write_family(f, format))?;
    Ok(())
}
