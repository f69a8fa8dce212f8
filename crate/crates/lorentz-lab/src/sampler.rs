//! Exact uniform sampling on Lorentz balls, plus a small-dimension rejection
//! oracle used to cross-check it.
//!
//! The exact sampler turns `n + 1` i.i.d. exponentials into suffix sums
//! `S_k = Σ_{j=k}^n E_j / κ_q(j)`, divides by the total `T = Σ_{j=1}^{n+1} E_j`
//! and applies a random permutation and random signs. Each row costs O(n).

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kappa::{kappa, KappaTable};
use crate::norms::lorentz_norm_sorted;
use crate::qindex::QIndex;
use crate::rng::RngStreamSpec;
use crate::volume::ball_volume_from_table;

/// Which rescaled copy of `ℬ_{q,1}^n` to sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// The unit ball itself.
    Unit,
    /// `n^{1/q} ℬ` for finite q, `log(n+1) ℬ` at q = ∞.
    Tilde,
    /// `vol^{-1/n} ℬ`, exact Lebesgue volume 1.
    VolNorm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallParams {
    pub q: QIndex,
    pub p: f64,
    pub n: usize,
    pub normalization: Normalization,
}

impl BallParams {
    pub fn new(q: QIndex, p: f64, n: usize, normalization: Normalization) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension n must be >= 1".into()));
        }
        if p < 1.0 || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("p must be a finite real >= 1, got {p}")));
        }
        if let QIndex::Finite(qv) = q {
            if p > qv {
                return Err(Error::InvalidParameter(format!("p <= q required, got p = {p}, q = {qv}")));
            }
        }
        Ok(BallParams { q, p, n, normalization })
    }

    /// Shorthand for the `p = 1` balls all samplers operate on.
    pub fn lorentz(q: QIndex, n: usize, normalization: Normalization) -> Result<Self> {
        Self::new(q, 1.0, n, normalization)
    }

    /// The scalar the unit ball is multiplied by under this normalization.
    pub fn scale(&self, table: &KappaTable) -> f64 {
        debug_assert_eq!(table.len(), self.n);
        match self.normalization {
            Normalization::Unit => 1.0,
            Normalization::Tilde => self.q.tilde_scale(self.n),
            Normalization::VolNorm => {
                (-ball_volume_from_table(table).log_volume / self.n as f64).exp()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generator {
    ExactThmA,
    RejectionOracle,
    WeylChamber,
}

/// A seeded batch of samples, row-major `count × n`.
#[derive(Clone, Debug)]
pub struct SampleBatch {
    pub params: BallParams,
    pub count: usize,
    pub rng: RngStreamSpec,
    pub generator: Generator,
    /// Observed acceptance rate; rejection oracle only.
    pub acceptance_rate: Option<f64>,
    data: Vec<f64>,
}

impl SampleBatch {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.params.n..(i + 1) * self.params.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.params.n)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Values of one coordinate across all rows.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }
}

fn require_p_one(params: &BallParams) -> Result<()> {
    if params.p != 1.0 {
        return Err(Error::UnsupportedP(params.p));
    }
    Ok(())
}

/// One row of suffix sums `(S_1/T, ..., S_n/T)`, already scaled; the ordered
/// nonnegative representative of a uniform sample. Exposed so experiment
/// drivers can stream rows without materializing a batch.
pub fn fill_weyl_row(
    table: &KappaTable,
    scale: f64,
    rng: &mut crate::rng::SplitMix64,
    out: &mut [f64],
) {
    let n = table.len();
    // exponentials E_1..E_{n+1}
    let mut total = 0.0;
    let mut c = 0.0;
    for slot in out.iter_mut() {
        *slot = rng.exponential();
    }
    let extra = rng.exponential();
    for j in 0..n {
        let term = out[j];
        let y = term - c;
        let t = total + y;
        c = (t - total) - y;
        total = t;
    }
    total += extra - c;
    // backward pass: S_k = sum_{j=k}^n E_j / kappa(j)
    let mut suffix = 0.0;
    for j in (0..n).rev() {
        suffix += out[j] / table.get(j + 1);
        out[j] = suffix;
    }
    let factor = scale / total;
    for v in out.iter_mut() {
        *v *= factor;
    }
}

/// Exact uniform sampling via the suffix-sum representation. Per-row variate
/// order is fixed as: signs, permutation, exponentials.
pub fn sample_exact(params: BallParams, count: usize, rng: RngStreamSpec) -> Result<SampleBatch> {
    require_p_one(&params)?;
    let n = params.n;
    let table = kappa(params.q, n);
    let scale = params.scale(&table);
    let mut data = vec![0.0; count * n];
    let mut signs = vec![0.0f64; n];
    let mut perm: Vec<u32> = vec![0; n];
    let mut ordered = vec![0.0f64; n];
    for (row_idx, row) in data.chunks_exact_mut(n).enumerate() {
        let mut r = rng.row_rng(row_idx as u64);
        for s in signs.iter_mut() {
            *s = r.sign();
        }
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i as u32;
        }
        r.shuffle(&mut perm);
        fill_weyl_row(&table, scale, &mut r, &mut ordered);
        for i in 0..n {
            row[i] = signs[i] * ordered[perm[i] as usize];
        }
    }
    Ok(SampleBatch {
        params,
        count,
        rng,
        generator: Generator::ExactThmA,
        acceptance_rate: None,
        data,
    })
}

/// The ordered nonnegative representative: suffix sums over the total, no
/// permutation or signs. Rows are non-increasing.
pub fn sample_weyl_chamber(
    params: BallParams,
    count: usize,
    rng: RngStreamSpec,
) -> Result<SampleBatch> {
    require_p_one(&params)?;
    let n = params.n;
    let table = kappa(params.q, n);
    let scale = params.scale(&table);
    let mut data = vec![0.0; count * n];
    for (row_idx, row) in data.chunks_exact_mut(n).enumerate() {
        let mut r = rng.row_rng(row_idx as u64);
        fill_weyl_row(&table, scale, &mut r, row);
    }
    Ok(SampleBatch {
        params,
        count,
        rng,
        generator: Generator::WeylChamber,
        acceptance_rate: None,
        data,
    })
}

/// Largest dimension the rejection oracle accepts; the acceptance rate
/// `Π κ_q(i)^{-1}` decays super-exponentially beyond this.
pub const REJECTION_MAX_DIM: usize = 12;

/// Independent oracle: uniform proposals in `[-1, 1]^n` accepted iff inside
/// the ball. Valid because the largest coordinate has weight `κ_q(1) = 1`,
/// so `ℬ_{q,1}^n ⊂ [-1,1]^n`.
pub fn sample_rejection_oracle(
    params: BallParams,
    count: usize,
    rng: RngStreamSpec,
) -> Result<SampleBatch> {
    require_p_one(&params)?;
    let n = params.n;
    if n > REJECTION_MAX_DIM {
        return Err(Error::DimensionTooLarge { n, max: REJECTION_MAX_DIM });
    }
    let table = kappa(params.q, n);
    let scale = params.scale(&table);
    let mut data = vec![0.0; count * n];
    let mut r = rng.row_rng(0);
    let mut proposal = vec![0.0f64; n];
    let mut sorted = vec![0.0f64; n];
    let mut trials: u64 = 0;
    for row in data.chunks_exact_mut(n) {
        loop {
            trials += 1;
            for v in proposal.iter_mut() {
                *v = 2.0 * r.uniform() - 1.0;
            }
            sorted.copy_from_slice(&proposal);
            for v in sorted.iter_mut() {
                *v = v.abs();
            }
            sorted.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
            if lorentz_norm_sorted(&sorted, params.q) <= 1.0 {
                for (dst, &src) in row.iter_mut().zip(&proposal) {
                    *dst = src * scale;
                }
                break;
            }
        }
    }
    Ok(SampleBatch {
        params,
        count,
        rng,
        generator: Generator::RejectionOracle,
        acceptance_rate: Some(count as f64 / trials as f64),
        data,
    })
}

/// Upper-triangular vertex matrix `M`: column `j` holds `κ_q(j)^{-1}` in rows
/// `1..=j`. Its columns are the nonzero extreme points of the Weyl-chamber
/// slice of the ball.
#[derive(Clone, Debug)]
pub struct VertexMatrix {
    pub n: usize,
    /// Row-major `n × n`.
    pub entries: Vec<f64>,
    /// `log det M = -Σ_j log κ_q(j)`.
    pub log_det: f64,
}

pub fn vertex_matrix(q: QIndex, n: usize) -> VertexMatrix {
    let table = kappa(q, n);
    let mut entries = vec![0.0; n * n];
    for j in 0..n {
        let v = 1.0 / table.get(j + 1);
        for i in 0..=j {
            entries[i * n + j] = v;
        }
    }
    VertexMatrix { n, entries, log_det: -table.log_sum() }
}

impl VertexMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }
}

const BINARY_MAGIC: &[u8; 5] = b"LORB1";

#[derive(Serialize, Deserialize)]
struct BinaryHeader {
    params: BallParams,
    count: usize,
    rng: RngStreamSpec,
    generator: Generator,
    acceptance_rate: Option<f64>,
}

impl SampleBatch {
    /// CSV: one comment line with params and seed, a header row, one sample
    /// per line.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(
            w,
            "# q={} p={} n={} normalization={:?} count={} seed={} stream={} generator={:?}",
            self.params.q,
            self.params.p,
            self.params.n,
            self.params.normalization,
            self.count,
            self.rng.master_seed,
            self.rng.stream_id,
            self.generator
        )?;
        let header: Vec<String> = (1..=self.params.n).map(|i| format!("x{i}")).collect();
        writeln!(w, "{}", header.join(","))?;
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// Compact binary layout: magic `LORB1`, little-endian u32 header length,
    /// JSON header, then row-major little-endian doubles.
    pub fn write_binary(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(BINARY_MAGIC)?;
        let header = serde_json::to_vec(&BinaryHeader {
            params: self.params,
            count: self.count,
            rng: self.rng,
            generator: self.generator,
            acceptance_rate: self.acceptance_rate,
        })?;
        w.write_all(&(header.len() as u32).to_le_bytes())?;
        w.write_all(&header)?;
        for v in &self.data {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(r: &mut impl Read) -> Result<SampleBatch> {
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic)?;
        if &magic != BINARY_MAGIC {
            return Err(Error::InvalidParameter("bad magic, not a LORB1 batch".into()));
        }
        let mut len = [0u8; 4];
        r.read_exact(&mut len)?;
        let mut header = vec![0u8; u32::from_le_bytes(len) as usize];
        r.read_exact(&mut header)?;
        let header: BinaryHeader = serde_json::from_slice(&header)?;
        let mut data = vec![0.0f64; header.count * header.params.n];
        let mut buf = [0u8; 8];
        for v in data.iter_mut() {
            r.read_exact(&mut buf)?;
            *v = f64::from_le_bytes(buf);
        }
        Ok(SampleBatch {
            params: header.params,
            count: header.count,
            rng: header.rng,
            generator: header.generator,
            acceptance_rate: header.acceptance_rate,
            data,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::lorentz_norm;
    use crate::volume::ball_volume;

    fn unit(q: QIndex, n: usize) -> BallParams {
        BallParams::lorentz(q, n, Normalization::Unit).unwrap()
    }

    #[test]
    fn rejects_p_above_one() {
        let params = BallParams::new(QIndex::Finite(3.0), 2.0, 4, Normalization::Unit).unwrap();
        assert!(sample_exact(params, 1, RngStreamSpec::new(0, 0)).is_err());
        assert!(sample_rejection_oracle(params, 1, RngStreamSpec::new(0, 0)).is_err());
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(BallParams::new(QIndex::Finite(2.0), 3.0, 4, Normalization::Unit).is_err());
        assert!(BallParams::new(QIndex::Finite(2.0), 0.5, 4, Normalization::Unit).is_err());
        assert!(BallParams::lorentz(QIndex::Finite(2.0), 0, Normalization::Unit).is_err());
    }

    #[test]
    fn membership() {
        for q in [QIndex::Finite(1.0), QIndex::Finite(2.0), QIndex::Finite(3.5), QIndex::Infinite] {
            let batch = sample_exact(unit(q, 20), 200, RngStreamSpec::new(11, 0)).unwrap();
            for row in batch.rows() {
                assert!(lorentz_norm(row, q) <= 1.0 + 1e-10);
            }
        }
    }

    #[test]
    fn membership_under_scalings() {
        for norm in [Normalization::Tilde, Normalization::VolNorm] {
            let q = QIndex::Finite(2.0);
            let params = BallParams::lorentz(q, 50, norm).unwrap();
            let table = kappa(q, 50);
            let s = params.scale(&table);
            let batch = sample_exact(params, 50, RngStreamSpec::new(5, 0)).unwrap();
            for row in batch.rows() {
                let rescaled: Vec<f64> = row.iter().map(|v| v / s).collect();
                assert!(lorentz_norm(&rescaled, q) <= 1.0 + 1e-10);
            }
        }
    }

    #[test]
    fn reproducible_batches() {
        let params = unit(QIndex::Finite(2.0), 8);
        let spec = RngStreamSpec::new(42, 7);
        let a = sample_exact(params, 32, spec).unwrap();
        let b = sample_exact(params, 32, spec).unwrap();
        assert_eq!(a.data(), b.data());
        let c = sample_exact(params, 32, RngStreamSpec::new(42, 8)).unwrap();
        assert_ne!(a.data(), c.data());
    }

    #[test]
    fn weyl_rows_ordered() {
        let batch =
            sample_weyl_chamber(unit(QIndex::Finite(1.5), 30), 100, RngStreamSpec::new(1, 0))
                .unwrap();
        for row in batch.rows() {
            for w in row.windows(2) {
                assert!(w[0] >= w[1]);
            }
            assert!(*row.last().unwrap() >= 0.0);
        }
    }

    #[test]
    fn weyl_row_reconstructs_exponentials() {
        // multiplying by T and differencing suffix sums must reproduce the
        // raw exponentials drawn by the same substream
        let q = QIndex::Finite(2.0);
        let n = 16;
        let spec = RngStreamSpec::new(9, 2);
        let batch = sample_weyl_chamber(unit(q, n), 4, spec).unwrap();
        let table = kappa(q, n);
        for (row_idx, row) in batch.rows().enumerate() {
            let mut r = spec.row_rng(row_idx as u64);
            let exps: Vec<f64> = (0..=n).map(|_| r.exponential()).collect();
            let total: f64 = exps.iter().sum();
            for j in 0..n {
                let next = if j + 1 < n { row[j + 1] } else { 0.0 };
                let recovered = (row[j] - next) * total * table.get(j + 1);
                assert!(
                    (recovered - exps[j]).abs() <= 1e-12 * (1.0 + exps[j]),
                    "row {row_idx} term {j}: {recovered} vs {}",
                    exps[j]
                );
            }
        }
    }

    #[test]
    fn rejection_rate_matches_volume() {
        // n=2, q=2: acceptance = vol/4 = 1/(1 + 2^{-1/2})
        let batch = sample_rejection_oracle(
            unit(QIndex::Finite(2.0), 2),
            200_000,
            RngStreamSpec::new(3, 0),
        )
        .unwrap();
        let rate = batch.acceptance_rate.unwrap();
        let expected = 1.0 / (1.0 + 2f64.powf(-0.5));
        assert!((rate / expected - 1.0).abs() < 0.01, "rate {rate} vs {expected}");
    }

    #[test]
    fn rejection_rate_is_one_in_dim_one() {
        let batch = sample_rejection_oracle(
            unit(QIndex::Finite(4.0), 1),
            1_000,
            RngStreamSpec::new(0, 0),
        )
        .unwrap();
        assert_eq!(batch.acceptance_rate, Some(1.0));
    }

    #[test]
    fn rejection_caps_dimension() {
        let err = sample_rejection_oracle(
            unit(QIndex::Finite(2.0), 13),
            1,
            RngStreamSpec::new(0, 0),
        );
        assert!(matches!(err, Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn vertex_matrix_structure() {
        let m = vertex_matrix(QIndex::Finite(2.0), 2);
        let c = 1.0 / (1.0 + 2f64.powf(-0.5));
        assert_eq!(m.get(0, 0), 1.0);
        assert_eq!(m.get(1, 0), 0.0);
        assert!((m.get(0, 1) - c).abs() < 1e-15);
        assert!((m.get(1, 1) - c).abs() < 1e-15);
        let one = vertex_matrix(QIndex::Finite(7.0), 1);
        assert_eq!(one.entries, vec![1.0]);
    }

    #[test]
    fn det_times_2n_is_the_volume() {
        for q in [QIndex::Finite(1.5), QIndex::Finite(3.0), QIndex::Infinite] {
            for n in [1usize, 5, 40] {
                let m = vertex_matrix(q, n);
                let log_vol = ball_volume(q, n).log_volume;
                assert!((m.log_det + n as f64 * 2f64.ln() - log_vol).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn binary_roundtrip() {
        let batch = sample_exact(unit(QIndex::Infinite, 6), 10, RngStreamSpec::new(2, 1)).unwrap();
        let mut buf = Vec::new();
        batch.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..5], b"LORB1");
        let back = SampleBatch::read_binary(&mut buf.as_slice()).unwrap();
        assert_eq!(back.data(), batch.data());
        assert_eq!(back.params, batch.params);
        assert_eq!(back.rng, batch.rng);
    }

    #[test]
    fn csv_shape() {
        let batch = sample_exact(unit(QIndex::Finite(2.0), 3), 4, RngStreamSpec::new(0, 0)).unwrap();
        let mut buf = Vec::new();
        batch.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# q=2"));
        assert_eq!(lines[1], "x1,x2,x3");
        assert_eq!(lines.len(), 2 + 4);
        assert_eq!(lines[2].split(',').count(), 3);
    }
}
