//! Text formats.
//!
//! * `.bm` matrices: a header line `m n`, then `m` lines of exactly `n`
//!   characters from `{0, 1}`.
//! * `.lf` factorizations: a header `m n t lambda`, then `m` rows of `t`
//!   numbers (`U`) and `t` rows of `n` numbers (`V`), whitespace separated.
//!   Numbers are written with 17 significant digits.
//! * group functions: a line `k`, then `2^k` characters from `{0, 1}` in
//!   lexicographic order of `x` (first coordinate most significant).
//!   Whitespace between characters is ignored.
//! * covers: JSON `{"m":.., "n":.., "blocks":[{"rows":[..],"cols":[..]}]}`
//!   with 1-based indices.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cover::BlockyCover;
use crate::error::{Error, Result};
use crate::factor::{Factorization, DEFAULT_TOL};
use crate::gamma2::GroupFunction;
use crate::matrix::BooleanMatrix;

/// Serde adapter writing 0-based index lists as 1-based.
pub mod one_based {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[usize], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|&i| i + 1).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        v.into_iter()
            .map(|i| i.checked_sub(1).ok_or_else(|| serde::de::Error::custom("indices are 1-based; found 0")))
            .collect()
    }
}

/// Like [`one_based`] for a single optional index.
pub mod one_based_opt {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<usize>, s: S) -> Result<S::Ok, S::Error> {
        v.map(|i| i + 1).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<usize>, D::Error> {
        let v = Option::<usize>::deserialize(d)?;
        v.map(|i| i.checked_sub(1).ok_or_else(|| serde::de::Error::custom("indices are 1-based; found 0")))
            .transpose()
    }
}

/// Like [`one_based`] for a single index.
pub mod one_based_index {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &usize, s: S) -> Result<S::Ok, S::Error> {
        (v + 1).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
        usize::deserialize(d)?.checked_sub(1).ok_or_else(|| serde::de::Error::custom("indices are 1-based; found 0"))
    }
}

fn parse_header<const N: usize>(line: Option<(usize, &str)>, what: &str) -> Result<[String; N]> {
    let (no, text) = line.ok_or_else(|| Error::parse(1, format!("missing {what} header")))?;
    let fields: Vec<String> = text.split_whitespace().map(str::to_owned).collect();
    fields
        .try_into()
        .map_err(|f: Vec<String>| Error::parse(no, format!("{what} header needs {N} fields, found {}", f.len())))
}

fn parse_usize(s: &str, line: usize, what: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::parse(line, format!("{what} `{s}` is not a nonnegative integer")))
}

pub fn parse_matrix(text: &str) -> Result<BooleanMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let [m, n] = parse_header::<2>(lines.next(), "matrix")?;
    let m = parse_usize(&m, 1, "row count")?;
    let n = parse_usize(&n, 1, "column count")?;
    let mut rows = Vec::with_capacity(m);
    for _ in 0..m {
        let (no, line) = lines.next().ok_or_else(|| Error::parse(rows.len() + 2, format!("expected {m} rows, found {}", rows.len())))?;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.chars().count() != n {
            return Err(Error::parse(no, format!("row has {} characters, expected {n}", line.chars().count())));
        }
        let row = line
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::parse(no, format!("unexpected character `{other}`"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        rows.push(row);
    }
    for (no, line) in lines {
        if !line.trim().is_empty() {
            return Err(Error::parse(no, "trailing content after the last row"));
        }
    }
    Ok(BooleanMatrix::from_fn(m, n, |i, j| rows[i][j] == 1))
}

pub fn format_matrix(a: &BooleanMatrix) -> String {
    let mut s = format!("{} {}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            s.push(if a.get(i, j) { '1' } else { '0' });
        }
        s.push('\n');
    }
    s
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn format_factorization(f: &Factorization) -> String {
    let (m, t, n) = (f.rows(), f.dim(), f.cols());
    let mut s = format!("{m} {n} {t} {}\n", fmt_f64(f.lambda()));
    let push_row = |s: &mut String, vals: &mut dyn Iterator<Item = f64>| {
        let row: Vec<String> = vals.map(fmt_f64).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    };
    for i in 0..m {
        push_row(&mut s, &mut f.u().row(i).iter().copied());
    }
    for k in 0..t {
        push_row(&mut s, &mut f.v().row(k).iter().copied());
    }
    s
}

/// Parses a `.lf` file; the tolerance is not stored in the file.
pub fn parse_factorization(text: &str, tol: f64) -> Result<Factorization> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    let [m, n, t, lambda] = parse_header::<4>(lines.next(), "factorization")?;
    let m = parse_usize(&m, 1, "m")?;
    let n = parse_usize(&n, 1, "n")?;
    let t = parse_usize(&t, 1, "t")?;
    let lambda: f64 = lambda.parse().map_err(|_| Error::parse(1, format!("lambda `{lambda}` is not a number")))?;
    let mut read_block = |rows: usize, width: usize, what: &str| -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(rows, width);
        for r in 0..rows {
            let (no, line) = lines.next().ok_or_else(|| Error::parse(0, format!("{what}: missing row {}", r + 1)))?;
            let vals = line
                .split_whitespace()
                .map(|x| x.parse::<f64>().map_err(|_| Error::parse(no, format!("`{x}` is not a number"))))
                .collect::<Result<Vec<_>>>()?;
            if vals.len() != width {
                return Err(Error::parse(no, format!("{what} row has {} entries, expected {width}", vals.len())));
            }
            for (c, v) in vals.into_iter().enumerate() {
                out[(r, c)] = v;
            }
        }
        Ok(out)
    };
    let u = read_block(m, t, "U")?;
    let v = read_block(t, n, "V")?;
    if let Some((no, _)) = lines.next() {
        return Err(Error::parse(no, "trailing content after V"));
    }
    Factorization::new(u, v, lambda, tol)
}

pub fn parse_group_function(text: &str) -> Result<GroupFunction> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let [k] = parse_header::<1>(lines.next(), "group function")?;
    let k = parse_usize(&k, 1, "k")?;
    if k > 24 {
        return Err(Error::parse(1, format!("k = {k} is too large")));
    }
    let mut values = Vec::with_capacity(1 << k);
    for (no, line) in lines {
        for c in line.chars().filter(|c| !c.is_whitespace()) {
            match c {
                '0' => values.push(false),
                '1' => values.push(true),
                other => return Err(Error::parse(no, format!("unexpected character `{other}`"))),
            }
        }
    }
    if values.len() != 1 << k {
        return Err(Error::parse(2, format!("expected {} values, found {}", 1usize << k, values.len())));
    }
    GroupFunction::new(k, values)
}

pub fn format_group_function(f: &GroupFunction) -> String {
    let bits: String = f.values().iter().map(|&b| if b { '1' } else { '0' }).collect();
    format!("{}\n{bits}\n", f.k())
}

/// A cover together with the matrix dimensions it refers to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverFile {
    pub m: usize,
    pub n: usize,
    pub blocks: Vec<crate::cover::Rectangle>,
}

impl CoverFile {
    pub fn new(m: usize, n: usize, cover: &BlockyCover) -> Self {
        Self { m, n, blocks: cover.blocks.clone() }
    }

    pub fn cover(&self) -> BlockyCover {
        BlockyCover::new(self.blocks.clone())
    }
}

pub fn read_matrix(path: &Path) -> Result<BooleanMatrix> {
    parse_matrix(&fs::read_to_string(path)?)
}

pub fn read_factorization(path: &Path, tol: f64) -> Result<Factorization> {
    parse_factorization(&fs::read_to_string(path)?, tol)
}

pub fn read_factorization_default(path: &Path) -> Result<Factorization> {
    read_factorization(path, DEFAULT_TOL)
}

pub fn read_group_function(path: &Path) -> Result<GroupFunction> {
    parse_group_function(&fs::read_to_string(path)?)
}

pub fn read_cover(path: &Path) -> Result<CoverFile> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::Rectangle;
    use proptest::prelude::*;

    #[test]
    fn matrix_format_roundtrip() {
        let a = BooleanMatrix::half_graph(4);
        let text = format_matrix(&a);
        assert_eq!(text, "4 4\n1000\n1100\n1110\n1111\n");
        assert_eq!(parse_matrix(&text).unwrap(), a);
    }

    #[test]
    fn ragged_row_names_line() {
        let err = parse_matrix("3 3\n100\n01\n001\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(err.to_string().starts_with("line 3:"));
    }

    #[test]
    fn bad_matrix_inputs() {
        assert!(matches!(parse_matrix("").unwrap_err(), Error::Parse { line: 1, .. }));
        assert!(matches!(parse_matrix("2 2\n10\n").unwrap_err(), Error::Parse { .. }));
        assert!(matches!(parse_matrix("1 2\n1x\n").unwrap_err(), Error::Parse { line: 2, .. }));
        assert!(matches!(parse_matrix("1 1\n1\n1\n").unwrap_err(), Error::Parse { line: 3, .. }));
        assert_eq!(parse_matrix("2 0\n\n\n").unwrap().shape(), (2, 0));
    }

    #[test]
    fn group_function_format() {
        let f = parse_group_function("2\n1000\n").unwrap();
        assert_eq!(f.values(), &[true, false, false, false]);
        assert_eq!(format_group_function(&f), "2\n1000\n");
        assert!(parse_group_function("2\n100\n").is_err());
        assert!(parse_group_function("1\n0\n1\n").is_ok());
    }

    #[test]
    fn cover_json_is_one_based() {
        let c = BlockyCover::new(vec![Rectangle::new(vec![0, 2], vec![1])]);
        let json = serde_json::to_string(&CoverFile::new(3, 2, &c)).unwrap();
        assert_eq!(json, r#"{"m":3,"n":2,"blocks":[{"rows":[1,3],"cols":[2]}]}"#);
        let back: CoverFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.cover(), c);
        assert!(serde_json::from_str::<CoverFile>(r#"{"m":1,"n":1,"blocks":[{"rows":[0],"cols":[1]}]}"#).is_err());
    }

    proptest! {
        #[test]
        fn factorization_text_roundtrip_is_exact(
            entries in proptest::collection::vec(-10.0f64..10.0, 12),
            lambda in 0.1f64..10.0,
        ) {
            let u = DMatrix::from_row_slice(3, 2, &entries[..6]);
            let v = DMatrix::from_row_slice(2, 3, &entries[6..]);
            let f = Factorization::new(u, v, lambda, DEFAULT_TOL).unwrap();
            let back = parse_factorization(&format_factorization(&f), DEFAULT_TOL).unwrap();
            prop_assert_eq!(back, f);
        }

        #[test]
        fn matrix_text_roundtrip(bits in proptest::collection::vec(any::<bool>(), 0..60), n in 1usize..8) {
            let m = bits.len() / n;
            let a = BooleanMatrix::from_fn(m, n, |i, j| bits[i * n + j]);
            prop_assert_eq!(parse_matrix(&format_matrix(&a)).unwrap(), a);
        }
    }
}
