//! Plain-text codebook files.
//!
//! ```text
//! L
//! bits
//! re,im          (2^bits lines, one per constellation point)
//! p_0 p_1 ...    (L lines, one permutation per block)
//! ```
//!
//! Floats are written in shortest round-trip form, so saving a loaded file
//! reproduces it byte for byte. Blank lines and lines starting with `#` are
//! ignored when reading.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::code::PermutationCode;
use super::qam::{Constellation, MAX_BITS};
use crate::error::{Error, Result};

pub fn write_codebook(code: &PermutationCode) -> String {
    let mut s = String::new();
    writeln!(s, "{}", code.blocks()).unwrap();
    writeln!(s, "{}", code.bits()).unwrap();
    for z in code.constellation().points() {
        writeln!(s, "{},{}", z.re, z.im).unwrap();
    }
    for perm in code.perms() {
        let line: Vec<String> = perm.iter().map(|v| v.to_string()).collect();
        writeln!(s, "{}", line.join(" ")).unwrap();
    }
    s
}

pub fn read_codebook(text: &str) -> Result<PermutationCode> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut last_line = 0;
    let mut next = |what: &str| -> Result<(usize, &str)> {
        let item = lines.next().ok_or_else(|| Error::Parse {
            line: last_line + 1,
            message: format!("unexpected end of file, expected {what}"),
        })?;
        last_line = item.0;
        Ok(item)
    };
    let err = |line: usize, message: String| Error::Parse { line, message };

    let (ln, text_blocks) = next("block count L")?;
    let blocks: usize = text_blocks
        .parse()
        .ok()
        .filter(|&b| b >= 1)
        .ok_or_else(|| err(ln, format!("invalid block count {text_blocks:?}")))?;
    let (ln, text_bits) = next("bits")?;
    let bits: u32 = text_bits
        .parse()
        .ok()
        .filter(|b| (1..=MAX_BITS).contains(b))
        .ok_or_else(|| err(ln, format!("invalid bits {text_bits:?} (expected 1..={MAX_BITS})")))?;

    let k = 1usize << bits;
    let mut points = Vec::with_capacity(k);
    let mut first_point_line = 0;
    for i in 0..k {
        let (ln, row) = next("constellation point re,im")?;
        if i == 0 {
            first_point_line = ln;
        }
        let parsed = row
            .split_once(',')
            .and_then(|(re, im)| Some(Complex64::new(re.trim().parse().ok()?, im.trim().parse().ok()?)));
        points.push(parsed.ok_or_else(|| err(ln, format!("invalid point {row:?}")))?);
    }
    let constellation = Constellation::new(points).map_err(|e| err(first_point_line, e.to_string()))?;

    let mut perms = Vec::with_capacity(blocks);
    let mut first_perm_line = 0;
    for b in 0..blocks {
        let (ln, row) = next("permutation")?;
        if b == 0 {
            first_perm_line = ln;
        }
        let perm: Vec<usize> = row
            .split_whitespace()
            .map(|v| v.parse().map_err(|_| err(ln, format!("invalid index {v:?}"))))
            .collect::<Result<_>>()?;
        perms.push(perm);
    }
    if let Some((ln, row)) = lines.next() {
        return Err(err(ln, format!("trailing content {row:?}")));
    }
    PermutationCode::new(constellation, perms).map_err(|e| err(first_perm_line, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::search::{search_permutation_code, SearchOptions};
    use proptest::prelude::*;

    #[test]
    fn round_trip_is_byte_exact() {
        let code = search_permutation_code(2, 2, &SearchOptions::default()).unwrap().code;
        let text = write_codebook(&code);
        let loaded = read_codebook(&text).unwrap();
        assert_eq!(write_codebook(&loaded), text);
        assert!(text.starts_with("2\n2\n"));
    }

    #[test]
    fn reports_line_numbers() {
        let code = search_permutation_code(2, 1, &SearchOptions::default()).unwrap().code;
        let good = write_codebook(&code);
        let mut lines: Vec<&str> = good.lines().collect();

        lines[3] = "1.0;0";
        let e = read_codebook(&lines.join("\n")).unwrap_err();
        assert_eq!(e, Error::Parse { line: 4, message: "invalid point \"1.0;0\"".into() });

        let mut lines: Vec<&str> = good.lines().collect();
        lines[5] = "1 1";
        assert!(matches!(read_codebook(&lines.join("\n")), Err(Error::Parse { line: 5, .. })));

        assert!(matches!(read_codebook("2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(read_codebook("x\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read_codebook("1\n9\n"), Err(Error::Parse { line: 2, .. })));
        let extra = format!("{good}0 1\n");
        assert!(matches!(read_codebook(&extra), Err(Error::Parse { line: 7, .. })));
    }

    #[test]
    fn comments_are_skipped() {
        let code = search_permutation_code(2, 1, &SearchOptions::default()).unwrap().code;
        let text = format!("# generated\n{}", write_codebook(&code));
        assert_eq!(read_codebook(&text).unwrap(), code);
    }

    proptest! {
        #[test]
        fn any_searched_code_round_trips(blocks in 1usize..4, bits in 1u32..6, seed in any::<u64>()) {
            let opts = SearchOptions { budget: 500, seed, restarts: 2 };
            let code = search_permutation_code(blocks, bits, &opts).unwrap().code;
            let text = write_codebook(&code);
            let back = read_codebook(&text).unwrap();
            prop_assert_eq!(&back, &PermutationCode::new(
                Constellation::new(code.constellation().points().to_vec()).unwrap(),
                code.perms().to_vec(),
            ).unwrap());
            prop_assert_eq!(write_codebook(&back), text);
        }
    }
}
