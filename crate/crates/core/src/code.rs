//! Binary linear codes, doubly even codes and their coded vector spaces.

use std::fmt;

use crate::cvs::{pair_indices, triple_indices, Cvs};
use crate::error::{Error, Result};

/// A binary word of fixed length, packed 64 bits per limb.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Codeword {
    len: usize,
    limbs: Vec<u64>,
}

impl Codeword {
    pub fn zero(len: usize) -> Self {
        Codeword {
            len,
            limbs: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut w = Codeword::zero(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                w.set(i);
            }
        }
        w
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.limbs[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        self.limbs[i / 64] |= 1 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    pub fn xor(&self, other: &Codeword) -> Result<Codeword> {
        same_len(self, other)?;
        Ok(Codeword {
            len: self.len,
            limbs: self.limbs.iter().zip(&other.limbs).map(|(a, b)| a ^ b).collect(),
        })
    }

    fn xor_assign(&mut self, other: &Codeword) {
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a ^= b;
        }
    }

    fn weight(&self) -> u32 {
        self.limbs.iter().map(|l| l.count_ones()).sum()
    }

    fn push_bits(&mut self, bits: &[u8]) {
        let start = self.len;
        self.len += bits.len();
        self.limbs.resize(self.len.div_ceil(64), 0);
        for (i, &b) in bits.iter().enumerate() {
            if b == 1 {
                self.set(start + i);
            }
        }
    }
}

impl std::str::FromStr for Codeword {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => {
                    return Err(Error::parse(1, i + 1, format!("`{other}` is not a binary digit")));
                }
            }
        }
        Ok(Codeword::from_bits(&bits))
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn same_len(a: &Codeword, b: &Codeword) -> Result<()> {
    if a.len != b.len {
        return Err(Error::Dimension {
            expected: a.len,
            got: b.len,
        });
    }
    Ok(())
}

pub fn weight(c: &Codeword) -> u32 {
    c.weight()
}

/// Number of coordinates where both words are 1.
pub fn intersect2(c: &Codeword, d: &Codeword) -> Result<u32> {
    same_len(c, d)?;
    Ok(c.limbs
        .iter()
        .zip(&d.limbs)
        .map(|(a, b)| (a & b).count_ones())
        .sum())
}

/// Number of coordinates where all three words are 1.
pub fn intersect3(c: &Codeword, d: &Codeword, e: &Codeword) -> Result<u32> {
    same_len(c, d)?;
    same_len(c, e)?;
    Ok(c.limbs
        .iter()
        .zip(&d.limbs)
        .zip(&e.limbs)
        .map(|((a, b), x)| (a & b & x).count_ones())
        .sum())
}

/// A binary linear code given by linearly independent generator rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryCode {
    length: usize,
    rows: Vec<Codeword>,
}

impl BinaryCode {
    pub fn new(length: usize, rows: Vec<Codeword>) -> Result<Self> {
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != length) {
            return Err(Error::InvalidCode(format!(
                "row {} has length {}, expected {length}",
                i + 1,
                r.len()
            )));
        }
        if let Some(i) = first_dependent_row(&rows) {
            return Err(Error::InvalidCode(format!(
                "row {} is a combination of earlier rows",
                i + 1
            )));
        }
        Ok(BinaryCode { length, rows })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    pub fn generators(&self) -> &[Codeword] {
        &self.rows
    }

    /// All `2^m` codewords; the word at index `i` is the sum of the rows
    /// selected by the bits of `i`.
    pub fn codewords(&self) -> Result<Vec<Codeword>> {
        let m = self.rows.len();
        if m > 24 {
            return Err(Error::Budget(format!("2^{m} codewords")));
        }
        let mut out = Vec::with_capacity(1 << m);
        out.push(Codeword::zero(self.length));
        for row in &self.rows {
            let n = out.len();
            for i in 0..n {
                let mut w = out[i].clone();
                w.xor_assign(row);
                out.push(w);
            }
        }
        Ok(out)
    }

    /// `dist[w]` = number of codewords of weight `w`.
    pub fn weight_distribution(&self) -> Result<Vec<u64>> {
        let mut dist = vec![0u64; self.length + 1];
        for w in self.codewords()? {
            dist[w.weight() as usize] += 1;
        }
        Ok(dist)
    }

    pub fn minimum_weight(&self) -> Result<Option<u32>> {
        Ok(self
            .weight_distribution()?
            .iter()
            .enumerate()
            .skip(1)
            .find(|(_, &n)| n > 0)
            .map(|(w, _)| w as u32))
    }

    /// Basis criterion: every row has weight divisible by 4 and every pair
    /// of rows meets in an even number of places. When the code has at most
    /// `2^16` words the answer is also checked against all weights.
    pub fn is_doubly_even(&self) -> bool {
        let basis = self.rows.iter().all(|r| r.weight() % 4 == 0)
            && pair_indices(self.rows.len())
                .into_iter()
                .all(|(i, j)| intersect2(&self.rows[i], &self.rows[j]).unwrap() % 2 == 0);
        if self.rows.len() <= 16 {
            debug_assert_eq!(Some(basis), self.is_doubly_even_exhaustive());
        }
        basis
    }

    /// Checks every codeword; `None` when there are more than `2^16`.
    pub fn is_doubly_even_exhaustive(&self) -> Option<bool> {
        if self.rows.len() > 16 {
            return None;
        }
        Some(self.codewords().ok()?.iter().all(|w| w.weight() % 4 == 0))
    }

    pub fn emit(&self) -> String {
        let mut out = String::from("code\n");
        for r in &self.rows {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for BinaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.emit())
    }
}

fn first_dependent_row(rows: &[Codeword]) -> Option<usize> {
    // Reduced rows keyed by pivot position.
    let mut pivots: Vec<(usize, Codeword)> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut w = r.clone();
        for (pos, p) in &pivots {
            if w.get(*pos) {
                w.xor_assign(p);
            }
        }
        match (0..w.len()).find(|&b| w.get(b)) {
            None => return Some(i),
            Some(pos) => {
                for (_, p) in pivots.iter_mut() {
                    if p.get(pos) {
                        p.xor_assign(&w);
                    }
                }
                pivots.push((pos, w));
            }
        }
    }
    None
}

/// The coded vector space of a doubly even code: `sigma = wt/4`,
/// `chi = wt(c & d)/2`, `alpha = wt(c & d & e)`, all mod 2, read off the
/// generator rows.
pub fn code_to_cvs(code: &BinaryCode) -> Result<Cvs> {
    if !code.is_doubly_even() {
        return Err(Error::InvalidCode("code is not doubly even".into()));
    }
    let rows = &code.rows;
    let m = rows.len();
    let sigma: Vec<u32> = rows.iter().map(|r| r.weight() / 4 % 2).collect();
    let chi: Vec<u32> = pair_indices(m)
        .into_iter()
        .map(|(i, j)| intersect2(&rows[i], &rows[j]).unwrap() / 2 % 2)
        .collect();
    let alpha: Vec<u32> = triple_indices(m)
        .into_iter()
        .map(|(i, j, l)| intersect3(&rows[i], &rows[j], &rows[l]).unwrap() % 2)
        .collect();
    Cvs::from_tables(2, m, &sigma, &chi, &alpha)
}

const CHI_BLOCK: [[u8; 14]; 2] = [
    [1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1],
];

const ALPHA_BLOCK: [[u8; 13]; 3] = [
    [1, 1, 1, 1, 0, 0, 0, 1, 1, 1, 1, 0, 0],
    [1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 1, 0],
    [1, 0, 0, 0, 1, 1, 1, 1, 1, 1, 0, 0, 1],
];

/// A doubly even code whose coded vector space has exactly the basis tables
/// of `cvs`. Built one basis vector at a time: a block of 8 (sigma = 0) or 4
/// (sigma = 1) ones, then a 14-column block for each `chi(e_i, e_m) = 1`
/// and a 13-column block for each `alpha(e_i, e_j, e_m) = 1`.
pub fn cvs_to_code(cvs: &Cvs) -> Result<BinaryCode> {
    if cvs.prime() != 2 {
        return Err(Error::Unsupported(format!(
            "codes realize spaces over F_2 only, got p = {}",
            cvs.prime()
        )));
    }
    let k = cvs.dim();
    let mut rows: Vec<Codeword> = vec![Codeword::zero(0); k];
    let append = |rows: &mut Vec<Codeword>, blocks: &[(usize, &[u8])], width: usize| {
        let zeros = vec![0u8; width];
        for (r, row) in rows.iter_mut().enumerate() {
            let bits = blocks
                .iter()
                .find(|(idx, _)| *idx == r)
                .map(|(_, b)| *b)
                .unwrap_or(&zeros);
            row.push_bits(bits);
        }
    };
    for m in 0..k {
        let ones: &[u8] = if cvs.sigma_basis()[m] == 0 { &[1; 8] } else { &[1; 4] };
        append(&mut rows, &[(m, ones)], ones.len());
        for i in 0..m {
            if cvs.chi_basis(i, m) == 1 {
                append(&mut rows, &[(i, &CHI_BLOCK[0]), (m, &CHI_BLOCK[1])], 14);
            }
        }
        for i in 0..m {
            for j in (i + 1)..m {
                if cvs.alpha_basis(i, j, m) == 1 {
                    append(
                        &mut rows,
                        &[(i, &ALPHA_BLOCK[0]), (j, &ALPHA_BLOCK[1]), (m, &ALPHA_BLOCK[2])],
                        13,
                    );
                }
            }
        }
    }
    let length = rows.first().map_or(0, |r| r.len());
    BinaryCode::new(length, rows)
}

/// Predicted length of [`cvs_to_code`].
pub fn predicted_code_length(cvs: &Cvs) -> usize {
    let base: usize = cvs
        .sigma_basis()
        .iter()
        .map(|&s| if s == 0 { 8 } else { 4 })
        .sum();
    let chi = cvs.chi_table().iter().filter(|&&v| v == 1).count();
    let alpha = cvs.alpha_table().iter().filter(|&&v| v == 1).count();
    base + 14 * chi + 13 * alpha
}

/// The [7,3,4] simplex code with rows 1110100, 0111010, 0011101.
pub fn builtin_hamming734() -> BinaryCode {
    let rows = ["1110100", "0111010", "0011101"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let code = BinaryCode::new(7, rows).unwrap();
    let dist = code.weight_distribution().unwrap();
    assert_eq!(dist[4], 7, "simplex code weights");
    code
}

/// The extended binary Golay code [24,12,8]: the cyclic [23,12,7] code with
/// generator polynomial `1 + x^2 + x^4 + x^5 + x^6 + x^10 + x^11`, extended by
/// an overall parity bit. Verified on construction.
pub fn builtin_golay24() -> BinaryCode {
    const G: [usize; 7] = [0, 2, 4, 5, 6, 10, 11];
    let rows: Vec<Codeword> = (0..12)
        .map(|shift| {
            let mut bits = vec![false; 24];
            for &g in &G {
                bits[shift + g] = true;
            }
            // seven taps, so parity 1
            bits[23] = true;
            Codeword::from_bits(&bits)
        })
        .collect();
    let code = BinaryCode::new(24, rows).expect("independent shifts");
    let dist = code.weight_distribution().unwrap();
    let mut want = vec![0u64; 25];
    want[0] = 1;
    want[8] = 759;
    want[12] = 2576;
    want[16] = 759;
    want[24] = 1;
    assert_eq!(dist, want, "Golay weight distribution");
    assert!(code.is_doubly_even());
    code
}

/// Parses `code` followed by one 0/1 row per line.
pub fn parse_code(text: &str) -> Result<BinaryCode> {
    let mut lines = crate::text::tokenized_lines(text);
    let Some((line_no, header)) = lines.next() else {
        return Err(Error::parse(1, 1, "empty input, expected `code`"));
    };
    if header.len() != 1 || header[0].text != "code" {
        return Err(Error::parse(line_no, header[0].column, "expected `code` header"));
    }
    let mut rows: Vec<Codeword> = Vec::new();
    let mut length: Option<usize> = None;
    for (line_no, toks) in lines {
        if toks.len() != 1 {
            return Err(Error::parse(line_no, toks[1].column, "one row per line"));
        }
        let tok = toks[0];
        let row: Codeword = tok.text.parse().map_err(|e| match e {
            Error::Parse { column, message, .. } => {
                Error::parse(line_no, tok.column + column - 1, message)
            }
            other => other,
        })?;
        match length {
            None => length = Some(row.len()),
            Some(n) if n != row.len() => {
                return Err(Error::parse(
                    line_no,
                    tok.column,
                    format!("row has length {}, expected {n}", row.len()),
                ));
            }
            Some(_) => {}
        }
        rows.push(row);
        if first_dependent_row(&rows).is_some() {
            return Err(Error::parse(
                line_no,
                tok.column,
                "row is a combination of earlier rows",
            ));
        }
    }
    let Some(length) = length else {
        return Err(Error::parse(1, 1, "code has no rows"));
    };
    BinaryCode::new(length, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Codeword {
        s.parse().unwrap()
    }

    #[test]
    fn weights_and_intersections() {
        assert_eq!(weight(&w("1111000")), 4);
        assert_eq!(intersect2(&w("1111000"), &w("0011110")).unwrap(), 2);
        let c = w("1011001");
        assert_eq!(intersect3(&c, &c, &c).unwrap(), weight(&c));
        assert!(intersect2(&w("11"), &w("111")).is_err());
    }

    #[test]
    fn long_words_cross_limbs() {
        let mut a = Codeword::zero(130);
        a.set(0);
        a.set(64);
        a.set(129);
        assert_eq!(weight(&a), 3);
        assert_eq!(a.to_string().len(), 130);
        assert_eq!(a.to_string().parse::<Codeword>().unwrap(), a);
    }

    #[test]
    fn doubly_even_examples() {
        assert!(builtin_hamming734().is_doubly_even());
        let c = BinaryCode::new(4, vec![w("1100")]).unwrap();
        assert!(!c.is_doubly_even());
        assert!(code_to_cvs(&c).is_err());
        // weight 4 rows meeting once: basis criterion must fail
        let c = BinaryCode::new(7, vec![w("1111000"), w("1000111")]).unwrap();
        assert!(!c.is_doubly_even());
        assert_eq!(c.is_doubly_even_exhaustive(), Some(false));
    }

    #[test]
    fn hamming_gives_octonions() {
        assert_eq!(code_to_cvs(&builtin_hamming734()).unwrap(), Cvs::octonion());
    }

    #[test]
    fn one_dimensional_codes() {
        let eight = BinaryCode::new(8, vec![w("11111111")]).unwrap();
        assert_eq!(code_to_cvs(&eight).unwrap().sigma_basis(), &[0]);
        let four = BinaryCode::new(4, vec![w("1111")]).unwrap();
        assert_eq!(code_to_cvs(&four).unwrap().sigma_basis(), &[1]);
    }

    #[test]
    fn octonion_code_has_length_67() {
        let o = Cvs::octonion();
        let code = cvs_to_code(&o).unwrap();
        assert_eq!(code.length(), 67);
        assert_eq!(predicted_code_length(&o), 67);
        assert!(code.is_doubly_even());
        assert_eq!(code_to_cvs(&code).unwrap(), o);
    }

    #[test]
    fn small_constructions() {
        let c = Cvs::new(2, 1, &[0], &[], &[]).unwrap();
        assert_eq!(cvs_to_code(&c).unwrap().emit(), "code\n11111111\n");
        let c = Cvs::new(2, 2, &[1, 1], &[], &[]).unwrap();
        assert_eq!(cvs_to_code(&c).unwrap().emit(), "code\n11110000\n00001111\n");
        assert!(cvs_to_code(&Cvs::new(3, 1, &[0], &[], &[]).unwrap()).is_err());
    }

    #[test]
    fn golay_facts() {
        let g = builtin_golay24();
        assert_eq!(g.dimension(), 12);
        assert_eq!(g.length(), 24);
        assert_eq!(g.minimum_weight().unwrap(), Some(8));
        assert_eq!(g.weight_distribution().unwrap()[8], 759);
    }

    #[test]
    fn text_format() {
        let c = parse_code("code\n# one row\n1111\n").unwrap();
        assert_eq!((c.length(), c.dimension()), (4, 1));
        assert_eq!(parse_code(&c.emit()).unwrap(), c);
        assert!(matches!(
            parse_code("code\n1111\n111\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_code("code\n1121\n"),
            Err(Error::Parse { line: 2, column: 3, .. })
        ));
        assert!(matches!(
            parse_code("code\n1100\n0011\n1111\n"),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(parse_code("cvs\n").is_err());
    }
}
