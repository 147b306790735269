//! The family file format.
//!
//! ```text
//! 2 2
//! thresholds: 0 2
//! # family
//! 1 1
//! # family
//! 1 1
//! 1 2
//! ```
//!
//! Line 1 is `n k`. An optional `thresholds:` line may follow the header.
//! Each `# family` line opens a new family; member lines hold `k`
//! space-separated values in `1..=n`. Blank lines are ignored.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::family::{Family, FamilySystem, Tuple, Universe};

const FAMILY_MARKER: &str = "# family";
const THRESHOLDS_PREFIX: &str = "thresholds:";

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_numbers<T: std::str::FromStr>(text: &str, line: usize) -> Result<Vec<T>> {
    text.split_whitespace()
        .map(|w| w.parse::<T>().map_err(|_| parse_err(line, format!("`{w}` is not a nonnegative integer"))))
        .collect()
}

pub fn parse_system(text: &str) -> Result<FamilySystem> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines.next().ok_or_else(|| parse_err(1, "missing `n k` header"))?;
    let nk: Vec<u32> = parse_numbers(header, header_line)?;
    if nk.len() != 2 {
        return Err(parse_err(header_line, "header must be `n k`"));
    }
    let universe = Universe::new(nk[0], nk[1]).map_err(|e| parse_err(header_line, e.to_string()))?;

    let mut thresholds: Option<(usize, Vec<u64>)> = None;
    let mut families: Vec<Family> = Vec::new();
    for (line_no, line) in lines {
        if line == FAMILY_MARKER {
            families.push(Family::empty(universe));
        } else if let Some(rest) = line.strip_prefix(THRESHOLDS_PREFIX) {
            if !families.is_empty() || thresholds.is_some() {
                return Err(parse_err(line_no, "thresholds line must directly follow the header"));
            }
            thresholds = Some((line_no, parse_numbers(rest, line_no)?));
        } else if line.starts_with('#') {
            return Err(parse_err(line_no, format!("unrecognised directive `{line}`")));
        } else {
            let family =
                families.last_mut().ok_or_else(|| parse_err(line_no, "member line before the first `# family`"))?;
            let coords: Vec<u32> = parse_numbers(line, line_no)?;
            if coords.len() != universe.k() as usize {
                return Err(parse_err(
                    line_no,
                    format!("expected {} coordinates, found {}", universe.k(), coords.len()),
                ));
            }
            if let Some(&bad) = coords.iter().find(|&&c| c == 0 || c > universe.n()) {
                return Err(parse_err(line_no, format!("coordinate {bad} out of range 1..={}", universe.n())));
            }
            let t = Tuple::new(coords);
            if !family.insert(&t).map_err(|e| parse_err(line_no, e.to_string()))? {
                return Err(parse_err(line_no, format!("duplicate tuple {t} within a family")));
            }
        }
    }
    if families.is_empty() {
        return Err(parse_err(header_line, "no `# family` section found"));
    }
    let s = families.len();
    let system = FamilySystem::new(universe, families)?;
    match thresholds {
        None => Ok(system),
        Some((line_no, f)) => {
            if f.len() != s {
                return Err(parse_err(line_no, format!("{} thresholds for {s} families", f.len())));
            }
            system.with_thresholds(f)
        }
    }
}

/// Serializes a system; members are written in lexicographic order.
pub fn format_system(system: &FamilySystem) -> String {
    let u = system.universe();
    let mut out = format!("{} {}\n", u.n(), u.k());
    if let Some(f) = system.thresholds() {
        out.push_str(THRESHOLDS_PREFIX);
        for v in f {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    for family in system.families() {
        out.push_str(FAMILY_MARKER);
        out.push('\n');
        for t in family.iter() {
            let line: Vec<String> = t.coords().iter().map(u32::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    out
}

pub fn read_system(path: impl AsRef<Path>) -> Result<FamilySystem> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
    parse_system(&text)
}

pub fn write_system(system: &FamilySystem, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_system(system)).map_err(|source| Error::Io { path: path.to_owned(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(err: Error) -> usize {
        match err {
            Error::Parse { line, .. } => line,
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn parses_minimal_file() {
        let sys = parse_system("2 2\n# family\n1 1\n").unwrap();
        assert_eq!(sys.s(), 1);
        assert_eq!(sys.family(0).to_vec(), vec![Tuple::new([1, 1])]);
        assert!(sys.thresholds().is_none());
    }

    #[test]
    fn parses_thresholds_and_blank_lines() {
        let sys = parse_system("2 2\n\nthresholds: 0 2\n# family\n1 1\n\n# family\n\n2 2\n1 2\n").unwrap();
        assert_eq!(sys.thresholds(), Some(&[0, 2][..]));
        assert_eq!(sys.sizes(), vec![1, 2]);
    }

    #[test]
    fn out_of_range_coordinate() {
        assert_eq!(line_of(parse_system("2 2\n# family\n3 0\n").unwrap_err()), 3);
        assert_eq!(line_of(parse_system("2 2\n# family\n1 3\n").unwrap_err()), 3);
    }

    #[test]
    fn malformed_inputs_name_their_line() {
        assert_eq!(line_of(parse_system("").unwrap_err()), 1);
        assert_eq!(line_of(parse_system("2\n# family\n").unwrap_err()), 1);
        assert_eq!(line_of(parse_system("2 x\n").unwrap_err()), 1);
        assert_eq!(line_of(parse_system("2 2\n1 1\n").unwrap_err()), 2);
        assert_eq!(line_of(parse_system("2 2\n# family\n1 1\n1 1\n").unwrap_err()), 4);
        assert_eq!(line_of(parse_system("2 2\n# family\n1 1 1\n").unwrap_err()), 3);
        assert_eq!(line_of(parse_system("2 2\nthresholds: 1 2\n# family\n").unwrap_err()), 2);
        assert_eq!(line_of(parse_system("2 2\n# family\nthresholds: 1\n").unwrap_err()), 3);
        assert_eq!(line_of(parse_system("2 2\n# famly\n").unwrap_err()), 2);
        assert_eq!(line_of(parse_system("2 2\n").unwrap_err()), 1);
    }

    #[test]
    fn duplicates_across_families_are_fine() {
        let sys = parse_system("2 2\n# family\n1 1\n# family\n1 1\n").unwrap();
        assert_eq!(sys.sizes(), vec![1, 1]);
    }

    #[test]
    fn writes_sorted_members() {
        let u = Universe::new(2, 2).unwrap();
        let f = Family::of(u, &[&[2, 1], &[1, 2]]);
        let sys = FamilySystem::new(u, vec![f, Family::empty(u)]).unwrap().with_thresholds(vec![3, 0]).unwrap();
        assert_eq!(format_system(&sys), "2 2\nthresholds: 3 0\n# family\n1 2\n2 1\n# family\n");
    }
}
