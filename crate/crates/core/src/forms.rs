//! Dense evaluation of the commutator and associator forms from basis data.
//!
//! Shared by coded vector spaces and coded modules. Values live in the cyclic
//! group `Z_m` written additively; coordinates are canonical residues.

use crate::algebra::reduce;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ChiMode {
    /// Bilinear skew extension of the basis table (p odd).
    Bilinear,
    /// Closed form for p = 2, where the commutator form polarizes to the
    /// associator form.
    Polarized,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Forms {
    pub k: usize,
    /// Order of the value group.
    pub m: u32,
    pub mode: ChiMode,
    /// `chi[i*k + j]`, antisymmetric with zero diagonal.
    pub chi: Vec<u32>,
    /// Fully alternating tensor `alpha[(i*k + j)*k + l]`.
    pub alpha: Vec<u32>,
    pub alpha_nonzero: bool,
}

impl Forms {
    /// `chi_upper` yields `(i, j, v)` with `i < j`; `alpha_upper` yields
    /// `(i, j, l, v)` with `i < j < l`.
    pub fn new(
        k: usize,
        m: u32,
        mode: ChiMode,
        chi_upper: impl IntoIterator<Item = (usize, usize, u32)>,
        alpha_upper: impl IntoIterator<Item = (usize, usize, usize, u32)>,
    ) -> Self {
        let mut chi = vec![0u32; k * k];
        for (i, j, v) in chi_upper {
            let v = v % m;
            chi[i * k + j] = v;
            chi[j * k + i] = (m - v) % m;
        }
        let mut alpha = vec![0u32; k * k * k];
        let mut alpha_nonzero = false;
        for (i, j, l, v) in alpha_upper {
            let v = v % m;
            if v == 0 {
                continue;
            }
            alpha_nonzero = true;
            let neg = (m - v) % m;
            for (a, b, c, s) in [
                (i, j, l, v),
                (j, l, i, v),
                (l, i, j, v),
                (j, i, l, neg),
                (i, l, j, neg),
                (l, j, i, neg),
            ] {
                alpha[(a * k + b) * k + c] = s;
            }
        }
        Forms {
            k,
            m,
            mode,
            chi,
            alpha,
            alpha_nonzero,
        }
    }

    #[inline]
    fn t(&self, a: usize, b: usize, c: usize) -> i64 {
        self.alpha[(a * self.k + b) * self.k + c] as i64
    }

    pub fn chi_basis(&self, i: usize, j: usize) -> u32 {
        self.chi[i * self.k + j]
    }

    pub fn alpha_basis(&self, i: usize, j: usize, l: usize) -> u32 {
        self.alpha[(i * self.k + j) * self.k + l]
    }

    pub fn eval_alpha(&self, c: &[u32], d: &[u32], e: &[u32]) -> u32 {
        if !self.alpha_nonzero {
            return 0;
        }
        let k = self.k;
        let mut acc: i64 = 0;
        for a in 0..k {
            if c[a] == 0 {
                continue;
            }
            for b in 0..k {
                if d[b] == 0 || b == a {
                    continue;
                }
                let cd = c[a] as i64 * d[b] as i64;
                let mut inner: i64 = 0;
                for l in 0..k {
                    if e[l] != 0 {
                        inner += e[l] as i64 * self.t(a, b, l);
                    }
                }
                acc = (acc + cd % self.m as i64 * (inner % self.m as i64)) % self.m as i64;
            }
        }
        reduce(acc, self.m)
    }

    pub fn eval_chi(&self, c: &[u32], d: &[u32]) -> u32 {
        match self.mode {
            ChiMode::Bilinear => self.chi_bilinear(c, d),
            ChiMode::Polarized => self.chi_polarized(c, d),
        }
    }

    fn chi_bilinear(&self, c: &[u32], d: &[u32]) -> u32 {
        let k = self.k;
        let mut acc: i64 = 0;
        for a in 0..k {
            if c[a] == 0 {
                continue;
            }
            for b in 0..k {
                if d[b] != 0 {
                    acc += c[a] as i64 * d[b] as i64 % self.m as i64 * self.chi[a * k + b] as i64;
                }
            }
            acc %= self.m as i64;
        }
        reduce(acc, self.m)
    }

    /// `sum_{i!=j} c_i d_j chi_ij + sum_{i<j} sum_l c_i c_j d_l a_ijl
    ///  + sum_i sum_{j<l} c_i d_j d_l a_ijl`
    fn chi_polarized(&self, c: &[u32], d: &[u32]) -> u32 {
        let k = self.k;
        let m = self.m as i64;
        let mut acc = self.chi_bilinear(c, d) as i64;
        if !self.alpha_nonzero {
            return reduce(acc, self.m);
        }
        for i in 0..k {
            if c[i] == 0 {
                continue;
            }
            for j in (i + 1)..k {
                if c[j] == 0 {
                    continue;
                }
                let cc = c[i] as i64 * c[j] as i64 % m;
                for l in 0..k {
                    if d[l] != 0 {
                        acc += cc * d[l] as i64 % m * self.t(i, j, l);
                    }
                }
                acc %= m;
            }
        }
        for i in 0..k {
            if c[i] == 0 {
                continue;
            }
            for j in 0..k {
                if d[j] == 0 {
                    continue;
                }
                let cd = c[i] as i64 * d[j] as i64 % m;
                for l in (j + 1)..k {
                    if d[l] != 0 {
                        acc += cd * d[l] as i64 % m * self.t(i, j, l);
                    }
                }
                acc %= m;
            }
        }
        reduce(acc, self.m)
    }

    /// `chi(x_j, w')` where `w'` keeps only the slots of `w` before `j`.
    pub fn chi_unit_prefix(&self, j: usize, w: &[u32]) -> u32 {
        let k = self.k;
        let m = self.m as u64;
        let mut acc: u64 = 0;
        for i in 0..j {
            if w[i] != 0 {
                acc += w[i] as u64 * self.chi[j * k + i] as u64 % m;
            }
        }
        if self.mode == ChiMode::Polarized && self.alpha_nonzero {
            for i in 0..j {
                if w[i] == 0 {
                    continue;
                }
                for l in (i + 1)..j {
                    if w[l] != 0 {
                        acc += w[i] as u64 * w[l] as u64 % m * self.alpha[(j * k + i) * k + l] as u64;
                    }
                }
                acc %= m;
            }
        }
        (acc % m) as u32
    }

    /// `alpha(u', w', x_j)` with `u'`, `w'` truncated to the slots before `j`.
    pub fn alpha_prefix(&self, u: &[u32], w: &[u32], j: usize) -> u32 {
        if !self.alpha_nonzero {
            return 0;
        }
        let k = self.k;
        let m = self.m as u64;
        let mut acc: u64 = 0;
        for i in 0..j {
            if u[i] == 0 {
                continue;
            }
            let mut inner: u64 = 0;
            for l in 0..j {
                if w[l] != 0 {
                    inner += w[l] as u64 * self.alpha[(i * k + l) * k + j] as u64;
                }
            }
            acc = (acc + u[i] as u64 * (inner % m)) % m;
        }
        acc as u32
    }

    /// `sum_i c_i s_i + sum_{i<j} c_i c_j chi_ij + sum_{i<j<l} c_i c_j c_l a_ijl`
    pub fn sigma_polarized(&self, sigma: &[u32], c: &[u32]) -> u32 {
        let k = self.k;
        let m = self.m as i64;
        let mut acc: i64 = 0;
        for i in 0..k {
            if c[i] == 0 {
                continue;
            }
            acc += c[i] as i64 * sigma[i] as i64 % m;
            for j in (i + 1)..k {
                if c[j] == 0 {
                    continue;
                }
                let cc = c[i] as i64 * c[j] as i64 % m;
                acc += cc * self.chi[i * k + j] as i64 % m;
                for l in (j + 1)..k {
                    if c[l] != 0 {
                        acc += cc * c[l] as i64 % m * self.t(i, j, l) % m;
                    }
                }
            }
            acc %= m;
        }
        reduce(acc, self.m)
    }

    /// `sum_i c_i s_i`
    pub fn sigma_linear(&self, sigma: &[u32], c: &[u32]) -> u32 {
        let acc: i64 = c
            .iter()
            .zip(sigma)
            .map(|(&x, &s)| x as i64 * s as i64 % self.m as i64)
            .sum();
        reduce(acc, self.m)
    }
}
