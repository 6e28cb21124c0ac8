//! Finite loops given by Cayley tables, and the trait shared with coded
//! loops so that analysis code runs on either.

use std::fmt::Write as _;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// A finite loop on `0..order()`.
pub trait FiniteLoop: Sync {
    fn order(&self) -> usize;
    fn identity(&self) -> usize;
    fn mul(&self, a: usize, b: usize) -> usize;
    /// The two-sided inverse.
    fn inv(&self, a: usize) -> usize;
    /// The `x` with `a x = b`.
    fn ldiv(&self, a: usize, b: usize) -> usize;
    /// The `x` with `x a = b`.
    fn rdiv(&self, b: usize, a: usize) -> usize;
}

impl<L: FiniteLoop + ?Sized> FiniteLoop for &L {
    fn order(&self) -> usize {
        (**self).order()
    }
    fn identity(&self) -> usize {
        (**self).identity()
    }
    fn mul(&self, a: usize, b: usize) -> usize {
        (**self).mul(a, b)
    }
    fn inv(&self, a: usize) -> usize {
        (**self).inv(a)
    }
    fn ldiv(&self, a: usize, b: usize) -> usize {
        (**self).ldiv(a, b)
    }
    fn rdiv(&self, b: usize, a: usize) -> usize {
        (**self).rdiv(b, a)
    }
}

/// Something other than a loop, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TableDefect {
    NoIdentity,
    /// `row` contains `value` twice.
    RowRepeat { row: usize, value: usize },
    /// `column` contains `value` twice.
    ColumnRepeat { column: usize, value: usize },
}

impl std::fmt::Display for TableDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TableDefect::NoIdentity => write!(f, "no two-sided identity"),
            TableDefect::RowRepeat { row, value } => write!(f, "row {row} repeats {value}"),
            TableDefect::ColumnRepeat { column, value } => {
                write!(f, "column {column} repeats {value}")
            }
        }
    }
}

#[derive(Debug)]
pub struct LoopTable {
    n: usize,
    table: Vec<u32>,
    identity: usize,
    /// Prime and dimension of the coded loop this came from, if any.
    meta: Option<(u32, usize)>,
    inverse: OnceLock<Vec<u32>>,
    division: OnceLock<(Vec<u32>, Vec<u32>)>,
}

impl Clone for LoopTable {
    fn clone(&self) -> Self {
        LoopTable {
            n: self.n,
            table: self.table.clone(),
            identity: self.identity,
            meta: self.meta,
            inverse: OnceLock::new(),
            division: OnceLock::new(),
        }
    }
}

impl PartialEq for LoopTable {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.table == other.table
    }
}

impl Eq for LoopTable {}

impl LoopTable {
    /// A loop from a row-major `n x n` table. Rejects anything that is not a
    /// Latin square with a two-sided identity.
    pub fn new(n: usize, table: Vec<u32>) -> Result<Self> {
        let t = LoopTable::new_unchecked(n, table)?;
        if let Some(defect) = t.defect() {
            return Err(Error::InvalidLoop(defect.to_string()));
        }
        Ok(t)
    }

    /// Only checks the shape and the range of entries. Useful for feeding
    /// damaged tables to the identity checkers.
    pub fn new_unchecked(n: usize, table: Vec<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidLoop("empty table".into()));
        }
        if table.len() != n * n {
            return Err(Error::InvalidLoop(format!(
                "expected {} entries, got {}",
                n * n,
                table.len()
            )));
        }
        if let Some(pos) = table.iter().position(|&x| x as usize >= n) {
            return Err(Error::InvalidLoop(format!(
                "entry ({},{}) = {} out of range",
                pos / n,
                pos % n,
                table[pos]
            )));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e * n + x] as usize == x && table[x * n + e] as usize == x))
            .unwrap_or(0);
        Ok(LoopTable {
            n,
            table,
            identity,
            meta: None,
            inverse: OnceLock::new(),
            division: OnceLock::new(),
        })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let mut table = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                table.push(f(a, b) as u32);
            }
        }
        LoopTable::new(n, table)
    }

    /// Copies any finite loop into a table.
    pub fn from_loop<L: FiniteLoop + ?Sized>(l: &L) -> Result<Self> {
        LoopTable::from_fn(l.order(), |a, b| l.mul(a, b))
    }

    pub fn with_meta(mut self, p: u32, k: usize) -> Self {
        self.meta = Some((p, k));
        self
    }

    pub fn meta(&self) -> Option<(u32, usize)> {
        self.meta
    }

    pub fn entries(&self) -> &[u32] {
        &self.table
    }

    /// First reason this is not a loop, if any.
    pub fn defect(&self) -> Option<TableDefect> {
        let n = self.n;
        let e = self.identity;
        if !(0..n).all(|x| self.get(e, x) == x && self.get(x, e) == x) {
            return Some(TableDefect::NoIdentity);
        }
        let mut seen = vec![usize::MAX; n];
        for a in 0..n {
            for b in 0..n {
                let v = self.get(a, b);
                if seen[v] == a {
                    return Some(TableDefect::RowRepeat { row: a, value: v });
                }
                seen[v] = a;
            }
        }
        seen.fill(usize::MAX);
        for b in 0..n {
            for a in 0..n {
                let v = self.get(a, b);
                if seen[v] == b {
                    return Some(TableDefect::ColumnRepeat { column: b, value: v });
                }
                seen[v] = b;
            }
        }
        None
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b] as usize
    }

    fn divisions(&self) -> &(Vec<u32>, Vec<u32>) {
        self.division.get_or_init(|| {
            let n = self.n;
            let mut left = vec![0u32; n * n];
            let mut right = vec![0u32; n * n];
            for a in 0..n {
                for x in 0..n {
                    let b = self.get(a, x);
                    // a x = b
                    left[a * n + b] = x as u32;
                    // x a = b'
                    let b2 = self.get(x, a);
                    right[b2 * n + a] = x as u32;
                }
            }
            (left, right)
        })
    }

    /// CSV with header `n=<order>,p=<p>,k=<k>` (the last two only when
    /// known), then one row per element.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.n * self.n * 4);
        match self.meta {
            Some((p, k)) => writeln!(out, "n={},p={},k={}", self.n, p, k).unwrap(),
            None => writeln!(out, "n={}", self.n).unwrap(),
        }
        for a in 0..self.n {
            for b in 0..self.n {
                if b > 0 {
                    out.push(',');
                }
                write!(out, "{}", self.get(a, b)).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Reads [`LoopTable::to_csv`] output without checking the loop axioms.
    pub fn parse_csv_unchecked(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
        let Some((hl, header)) = lines.next() else {
            return Err(Error::parse(1, 1, "empty input, expected `n=<order>` header"));
        };
        let mut n: Option<usize> = None;
        let mut p: Option<u32> = None;
        let mut k: Option<usize> = None;
        let mut col = 1;
        for field in header.split(',') {
            let (key, value) = field
                .trim()
                .split_once('=')
                .ok_or_else(|| Error::parse(hl + 1, col, "expected key=value"))?;
            let bad = || Error::parse(hl + 1, col, format!("cannot read `{value}`"));
            match key {
                "n" => n = Some(value.parse().map_err(|_| bad())?),
                "p" => p = Some(value.parse().map_err(|_| bad())?),
                "k" => k = Some(value.parse().map_err(|_| bad())?),
                other => return Err(Error::parse(hl + 1, col, format!("unknown header key `{other}`"))),
            }
            col += field.len() + 1;
        }
        let n = n.ok_or_else(|| Error::parse(hl + 1, 1, "header lacks n="))?;
        let mut table = Vec::with_capacity(n * n);
        let mut rows = 0;
        for (ln, line) in lines {
            rows += 1;
            if rows > n {
                return Err(Error::parse(ln + 1, 1, format!("more than {n} rows")));
            }
            let mut count = 0;
            let mut col = 1;
            for cell in line.split(',') {
                let v: u32 = cell
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(ln + 1, col, format!("cannot read `{}`", cell.trim())))?;
                if v as usize >= n {
                    return Err(Error::parse(ln + 1, col, format!("entry {v} out of range")));
                }
                table.push(v);
                count += 1;
                col += cell.len() + 1;
            }
            if count != n {
                return Err(Error::parse(ln + 1, 1, format!("row has {count} entries, expected {n}")));
            }
        }
        if rows != n {
            return Err(Error::parse(text.lines().count().max(1), 1, format!("expected {n} rows, got {rows}")));
        }
        let mut t = LoopTable::new_unchecked(n, table)?;
        if let (Some(p), Some(k)) = (p, k) {
            t.meta = Some((p, k));
        }
        Ok(t)
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let t = LoopTable::parse_csv_unchecked(text)?;
        if let Some(defect) = t.defect() {
            return Err(Error::InvalidLoop(defect.to_string()));
        }
        Ok(t)
    }
}

impl FiniteLoop for LoopTable {
    fn order(&self) -> usize {
        self.n
    }

    fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    fn mul(&self, a: usize, b: usize) -> usize {
        self.get(a, b)
    }

    fn inv(&self, a: usize) -> usize {
        let inv = self.inverse.get_or_init(|| {
            (0..self.n)
                .map(|x| {
                    (0..self.n)
                        .find(|&y| self.get(x, y) == self.identity)
                        .unwrap_or(self.identity) as u32
                })
                .collect()
        });
        inv[a] as usize
    }

    fn ldiv(&self, a: usize, b: usize) -> usize {
        self.divisions().0[a * self.n + b] as usize
    }

    fn rdiv(&self, b: usize, a: usize) -> usize {
        self.divisions().1[b * self.n + a] as usize
    }
}

/// The cyclic group `Z_n` as a table.
pub fn cyclic_group(n: usize) -> LoopTable {
    LoopTable::from_fn(n, |a, b| (a + b) % n).unwrap()
}

/// Direct product; element `(a, b)` has index `a * |M| + b`.
pub fn direct_product(l: &impl FiniteLoop, m: &impl FiniteLoop) -> Result<LoopTable> {
    let nm = m.order();
    LoopTable::from_fn(l.order() * nm, |x, y| {
        l.mul(x / nm, y / nm) * nm + m.mul(x % nm, y % nm)
    })
}

/// The dihedral group of order `2n`: index `s * n + r` is `t^s r^r` with
/// `t r t = r^-1`.
pub fn dihedral_group(n: usize) -> LoopTable {
    LoopTable::from_fn(2 * n, |x, y| {
        let (s1, r1) = (x / n, x % n);
        let (s2, r2) = (y / n, y % n);
        let r = if s2 == 0 { (r1 + r2) % n } else { (n - r1 + r2) % n };
        ((s1 + s2) % 2) * n + r
    })
    .unwrap()
}
