//! Windowed SDR encoding of symbol sequences.
//!
//! A sequence is cut into overlapping windows of `n` symbols (stride
//! configurable, default 1) and each window becomes one sparse binary input:
//! every window position owns a disjoint band of `bits_per_symbol` bits and
//! contributes its symbol's code, offset into that band. With the default
//! one-hot DNA codebook a window of `n` unambiguous bases activates exactly
//! `n` bits out of `n * 4`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Sparse binary vector stored as its sorted active-bit indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sdr {
    width: usize,
    active: Vec<usize>,
}

impl Sdr {
    /// Build from any list of in-range indices; sorts and deduplicates.
    pub fn new(width: usize, mut active: Vec<usize>) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidInput("SDR width must be positive".into()));
        }
        active.sort_unstable();
        active.dedup();
        if let Some(&last) = active.last() {
            if last >= width {
                return Err(Error::InvalidInput(format!(
                    "active bit {last} out of range for width {width}"
                )));
            }
        }
        Ok(Sdr { width, active })
    }

    /// An SDR with no active bits.
    pub fn empty(width: usize) -> Self {
        Sdr {
            width,
            active: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Sorted, strictly increasing active-bit indices.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    /// Number of active bits.
    pub fn popcount(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    /// Sizes of the intersection and union of two active-bit sets.
    /// Both inputs are sorted, so this is a single merge pass.
    pub(crate) fn overlap_counts(&self, other: &Sdr) -> (usize, usize) {
        let (a, b) = (&self.active, &other.active);
        let mut inter = 0usize;
        let (mut i, mut j) = (0usize, 0usize);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    inter += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        (inter, a.len() + b.len() - inter)
    }

    /// Merge `other`'s active bits into `self` in place.
    pub(crate) fn union_in_place(&mut self, other: &Sdr) {
        debug_assert_eq!(self.width, other.width);
        if other.active.is_empty() {
            return;
        }
        let mut merged = Vec::with_capacity(self.active.len() + other.active.len());
        let (a, b) = (&self.active, &other.active);
        let (mut i, mut j) = (0usize, 0usize);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    merged.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    merged.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    merged.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        merged.extend_from_slice(&a[i..]);
        merged.extend_from_slice(&b[j..]);
        self.active = merged;
    }
}

/// Symbol-to-bit-pattern map plus the designated padding/ambiguity symbol.
///
/// Non-ambiguous symbols must have non-empty, pairwise disjoint codes;
/// ambiguity symbols map to the empty set so they contribute nothing to
/// overlap similarity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    bits_per_symbol: usize,
    pad_symbol: char,
    code: BTreeMap<char, Vec<usize>>,
}

impl Codebook {
    pub fn new(
        bits_per_symbol: usize,
        pad_symbol: char,
        code: BTreeMap<char, Vec<usize>>,
    ) -> Result<Self> {
        if bits_per_symbol == 0 {
            return Err(Error::InvalidConfig(
                "bits_per_symbol must be positive".into(),
            ));
        }
        if !code.contains_key(&pad_symbol) {
            return Err(Error::InvalidConfig(format!(
                "padding symbol '{pad_symbol}' missing from codebook"
            )));
        }
        let mut seen = vec![None::<char>; bits_per_symbol];
        for (&sym, bits) in &code {
            for &b in bits {
                if b >= bits_per_symbol {
                    return Err(Error::InvalidConfig(format!(
                        "code bit {b} for '{sym}' exceeds bits_per_symbol {bits_per_symbol}"
                    )));
                }
                if let Some(prev) = seen[b] {
                    return Err(Error::InvalidConfig(format!(
                        "symbols '{prev}' and '{sym}' share code bit {b}"
                    )));
                }
                seen[b] = Some(sym);
            }
        }
        Ok(Codebook {
            bits_per_symbol,
            pad_symbol,
            code,
        })
    }

    /// One-hot DNA codebook: A,C,G,T each own one bit; N and the IUPAC
    /// ambiguity codes encode to the empty set.
    pub fn dna_one_hot() -> Self {
        let mut code = BTreeMap::new();
        for (i, sym) in ['A', 'C', 'G', 'T'].into_iter().enumerate() {
            code.insert(sym, vec![i]);
        }
        for sym in ['N', 'R', 'Y', 'S', 'W', 'K', 'M', 'B', 'D', 'H', 'V'] {
            code.insert(sym, Vec::new());
        }
        Codebook {
            bits_per_symbol: 4,
            pad_symbol: 'N',
            code,
        }
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// Symbol used to right-pad sequences shorter than the window.
    pub fn pad_symbol(&self) -> char {
        self.pad_symbol
    }

    /// Symbols in the codebook, in sorted order.
    pub fn alphabet(&self) -> impl Iterator<Item = char> + '_ {
        self.code.keys().copied()
    }

    pub fn contains(&self, symbol: char) -> bool {
        self.code.contains_key(&symbol)
    }

    pub(crate) fn bits_of(&self, symbol: char) -> Option<&[usize]> {
        self.code.get(&symbol).map(|v| v.as_slice())
    }

    pub(crate) fn entries(&self) -> impl Iterator<Item = (char, &[usize])> {
        self.code.iter().map(|(&s, v)| (s, v.as_slice()))
    }
}

/// Window length and stride for cutting sequences into inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowConfig {
    pub n: usize,
    pub stride: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig { n: 5, stride: 1 }
    }
}

impl WindowConfig {
    pub fn new(n: usize, stride: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("window length must be >= 1".into()));
        }
        if stride == 0 {
            return Err(Error::InvalidConfig("stride must be >= 1".into()));
        }
        Ok(WindowConfig { n, stride })
    }

    /// Number of windows produced from a sequence of `len` symbols.
    /// Sequences shorter than the window yield a single padded window.
    pub fn window_count(&self, len: usize) -> usize {
        if len < self.n {
            1
        } else {
            (len - self.n) / self.stride + 1
        }
    }
}

/// Cut a sequence into windows of `cfg.n` symbols advancing by `cfg.stride`.
///
/// A sequence shorter than the window is right-padded with `pad` to form a
/// single window; an empty sequence is an error.
pub fn windows(sequence: &[char], cfg: &WindowConfig, pad: char) -> Result<Vec<Vec<char>>> {
    if sequence.is_empty() {
        return Err(Error::InvalidInput("empty sequence".into()));
    }
    if sequence.len() < cfg.n {
        let mut w = sequence.to_vec();
        w.resize(cfg.n, pad);
        return Ok(vec![w]);
    }
    let count = cfg.window_count(sequence.len());
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let start = k * cfg.stride;
        out.push(sequence[start..start + cfg.n].to_vec());
    }
    Ok(out)
}

/// Encode a single symbol as an SDR of width `bits_per_symbol`.
pub fn encode_symbol(cb: &Codebook, symbol: char) -> Result<Sdr> {
    match cb.bits_of(symbol) {
        Some(bits) => Ok(Sdr {
            width: cb.bits_per_symbol(),
            active: bits.to_vec(),
        }),
        None => Err(Error::UnknownSymbol {
            symbol,
            position: 0,
        }),
    }
}

/// Encode a window of exactly `n` symbols as one SDR of width
/// `n * bits_per_symbol`, position `p` occupying bits
/// `[p * bits_per_symbol, (p + 1) * bits_per_symbol)`.
pub fn encode_window(cb: &Codebook, window: &[char], n: usize) -> Result<Sdr> {
    if window.len() != n {
        return Err(Error::InvalidInput(format!(
            "window length {} != configured n {}",
            window.len(),
            n
        )));
    }
    let band = cb.bits_per_symbol();
    let mut active = Vec::with_capacity(n);
    for (p, &sym) in window.iter().enumerate() {
        let bits = cb.bits_of(sym).ok_or(Error::UnknownSymbol {
            symbol: sym,
            position: p,
        })?;
        let offset = p * band;
        // Per-position bands are disjoint and visited left to right, and each
        // symbol code is sorted, so `active` stays sorted without a final sort.
        active.extend(bits.iter().map(|&b| offset + b));
    }
    Ok(Sdr {
        width: n * band,
        active,
    })
}
