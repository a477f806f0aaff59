//! The per-valence-range constants `(gamma, delta, d, q, p)`, stored as
//! program data and guarded by a SHA-256 checksum of a canonical text form.

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Table1Row {
    pub n_min: usize,
    /// `None` for the open-ended range `n >= n_min`.
    pub n_max: Option<usize>,
    pub gamma: f64,
    pub delta: f64,
    pub d: f64,
    pub q: f64,
    pub p: f64,
}

impl Table1Row {
    pub fn contains(&self, n: usize) -> bool {
        n >= self.n_min && self.n_max.is_none_or(|m| n <= m)
    }

    pub fn label(&self) -> String {
        match self.n_max {
            None => format!("n >= {}", self.n_min),
            Some(m) if m == self.n_min => format!("n = {m}"),
            Some(m) => format!("{} <= n <= {}", self.n_min, m),
        }
    }
}

const fn row(n_min: usize, n_max: Option<usize>, c: [f64; 5]) -> Table1Row {
    Table1Row {
        n_min,
        n_max,
        gamma: c[0],
        delta: c[1],
        d: c[2],
        q: c[3],
        p: c[4],
    }
}

pub const TABLE1: [Table1Row; 15] = [
    row(40, None, [1.05, 0.0, 1.9316, 1.9194, 1.9658]),
    row(30, Some(39), [1.09, 0.0057, 1.9344, 1.9222, 1.9687]),
    row(25, Some(29), [1.128, 0.0105, 1.9370, 1.9248, 1.9715]),
    row(22, Some(24), [1.166, 0.0154, 1.9397, 1.9274, 1.9742]),
    row(20, Some(21), [1.201, 0.0202, 1.9421, 1.9298, 1.9767]),
    row(19, Some(19), [1.2228, 0.0249, 1.9436, 1.9313, 1.9782]),
    row(18, Some(18), [1.2488, 0.0278, 1.9454, 1.9330, 1.9801]),
    row(17, Some(17), [1.2796, 0.0314, 1.9475, 1.9351, 1.9823]),
    row(16, Some(16), [1.3166, 0.0356, 1.9500, 1.9376, 1.9848]),
    row(15, Some(15), [1.3615, 0.0408, 1.9531, 1.9405, 1.9880]),
    row(14, Some(14), [1.4168, 0.0472, 1.9568, 1.9442, 1.9918]),
    row(13, Some(13), [1.4861, 0.0553, 1.9614, 1.9487, 1.9965]),
    row(12, Some(12), [1.5744, 0.0657, 1.9672, 1.9544, 2.0]),
    row(11, Some(11), [1.6898, 0.0795, 1.9746, 1.9617, 2.0]),
    row(9, Some(10), [2.0, 0.0983, 1.9941, 1.9808, 2.0]),
];

/// SHA-256 of the canonical text form of [`TABLE1`].
pub const TABLE1_SHA256: &str = "2812187bb11c5b0a98514c16c591e697db4541fe6b81889de8c05b070855b04c";

/// One line per row: `n_min,n_max|*,gamma,delta,d,q,p` using the shortest
/// round-trip decimal form of each value.
pub fn canonical_text(rows: &[Table1Row]) -> String {
    let mut out = String::new();
    for r in rows {
        let n_max = r.n_max.map_or("*".to_owned(), |m| m.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n_min, n_max, r.gamma, r.delta, r.d, r.q, r.p
        ));
    }
    out
}

pub fn table1_checksum(rows: &[Table1Row]) -> String {
    Sha256::digest(canonical_text(rows).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
