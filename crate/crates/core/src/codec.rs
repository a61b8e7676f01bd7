//! Generation-based linear network coding.
//!
//! A serial block stream is striped round-robin over `k` lanes; each column
//! of `k` source blocks forms a generation, encoded into `n = k + r` coded
//! blocks with per-generation random coefficient matrices whose every
//! k-by-k submatrix is invertible (any k of n coded blocks decode). The
//! receiver rebuilds a generation by Gaussian elimination as coded blocks
//! arrive.

use crate::gf::Field;
use rand::Rng;
use thiserror::Error;

/// One fixed-length data block of field symbols.
pub type SymbolBlock = Vec<u8>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("generation size k must be at least 1")]
    EmptyGeneration,
    #[error("expected {expected} blocks/coefficients, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("block length {got} does not match session block length {expected}")]
    BlockLengthMismatch { expected: usize, got: usize },
    #[error("coded block belongs to generation {got}, decoder holds generation {expected}")]
    GenerationMismatch { expected: u64, got: u64 },
    #[error("decode needs rank {needed}, only {rank} independent blocks received")]
    InsufficientRank { rank: usize, needed: usize },
    #[error("C({n},{k}) submatrices exceed the MDS verification bound")]
    DimensionsTooLarge { k: usize, n: usize },
    #[error("no MDS coefficient matrix found after {0} attempts")]
    CoefficientSearchFailed(usize),
    #[error("codec requires symbol width <= 8, field has m = {0}")]
    WideField(u32),
}

/// Generation geometry: k source blocks, r redundant blocks, n = k + r.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationParams {
    pub k: usize,
    pub r: usize,
}

impl GenerationParams {
    pub fn new(k: usize, r: usize) -> Result<Self, CodecError> {
        if k == 0 {
            return Err(CodecError::EmptyGeneration);
        }
        Ok(GenerationParams { k, r })
    }

    /// Coded blocks per generation.
    pub fn n(&self) -> usize {
        self.k + self.r
    }
}

/// Length-k coefficient vector attached to a coded block.
pub type CodingVector = Vec<u8>;

/// A coded block as it travels: generation ordinal, coding vector, payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedBlock {
    pub generation_id: u64,
    pub vector: CodingVector,
    pub payload: SymbolBlock,
}

/// Round-robin striping of a block stream over `k` lanes.
///
/// Lanes are padded with zero blocks so every lane has `ceil(M/k)` entries;
/// the original stream length is retained for stripping after decode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lanes {
    lanes: Vec<Vec<SymbolBlock>>,
    source_len: usize,
}

impl Lanes {
    pub fn lane(&self, i: usize) -> &[SymbolBlock] {
        &self.lanes[i]
    }

    pub fn lane_count(&self) -> usize {
        self.lanes.len()
    }

    /// Number of generations, ceil(M/k).
    pub fn generation_count(&self) -> usize {
        self.lanes.first().map_or(0, |l| l.len())
    }

    /// Source blocks of generation `g` in lane order.
    pub fn generation(&self, g: usize) -> Vec<SymbolBlock> {
        self.lanes.iter().map(|l| l[g].clone()).collect()
    }

    /// Original stream length before zero-padding.
    pub fn source_len(&self) -> usize {
        self.source_len
    }

    /// Inverse round-robin: interleave lanes and strip the padding.
    pub fn serialize(&self) -> Vec<SymbolBlock> {
        let k = self.lanes.len();
        let mut out = Vec::with_capacity(self.source_len);
        for g in 0..self.generation_count() {
            for lane in 0..k {
                if out.len() == self.source_len {
                    break;
                }
                out.push(self.lanes[lane][g].clone());
            }
        }
        out
    }
}

/// Stripe `stream` over `k` lanes, block `i` going to lane `i mod k`.
pub fn parallelize(stream: &[SymbolBlock], k: usize) -> Result<Lanes, CodecError> {
    if k == 0 {
        return Err(CodecError::EmptyGeneration);
    }
    let block_len = stream.first().map_or(0, |b| b.len());
    for b in stream {
        if b.len() != block_len {
            return Err(CodecError::BlockLengthMismatch { expected: block_len, got: b.len() });
        }
    }
    let generations = stream.len().div_ceil(k);
    let mut lanes = vec![Vec::with_capacity(generations); k];
    for (i, block) in stream.iter().enumerate() {
        lanes[i % k].push(block.clone());
    }
    // zero-pad the final short generation
    for lane in &mut lanes {
        while lane.len() < generations {
            lane.push(vec![0u8; block_len]);
        }
    }
    Ok(Lanes { lanes, source_len: stream.len() })
}

/// Largest number of k-subsets we are willing to verify exhaustively.
const MDS_SUBSET_BOUND: u64 = 1_000_000;
const MDS_RETRY_BOUND: usize = 200;

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Sample an n-by-k coefficient matrix in which every k-by-k submatrix is
/// invertible, so any k of the n coded blocks suffice to decode.
///
/// Uniformly random matrices over GF(2^8) have this property with high
/// probability; we verify all C(n,k) submatrices and resample on failure.
pub fn make_coefficients(
    field: &Field,
    params: GenerationParams,
    rng: &mut impl Rng,
) -> Result<Vec<CodingVector>, CodecError> {
    if field.width() > 8 {
        return Err(CodecError::WideField(field.width()));
    }
    let (k, n) = (params.k, params.n());
    if binomial(n as u64, k as u64) > MDS_SUBSET_BOUND {
        return Err(CodecError::DimensionsTooLarge { k, n });
    }
    let mask = (field.order() - 1) as u8;
    'attempt: for _ in 0..MDS_RETRY_BOUND {
        let rows: Vec<CodingVector> =
            (0..n).map(|_| (0..k).map(|_| rng.gen::<u8>() & mask).collect()).collect();
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            let sub: Vec<&[u8]> = subset.iter().map(|&i| rows[i].as_slice()).collect();
            if matrix_rank(field, &sub, k) < k {
                continue 'attempt;
            }
            if !next_combination(&mut subset, n) {
                break;
            }
        }
        return Ok(rows);
    }
    Err(CodecError::CoefficientSearchFailed(MDS_RETRY_BOUND))
}

/// Advance `subset` to the next k-combination of 0..n in lexicographic
/// order; false when exhausted.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - (k - i) {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Rank of a set of length-`width` row vectors over `field`.
pub fn matrix_rank(field: &Field, rows: &[&[u8]], width: usize) -> usize {
    let mut work: Vec<Vec<u8>> = rows.iter().map(|r| r.to_vec()).collect();
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..work.len()).find(|&r| work[r][col] != 0) else {
            continue;
        };
        work.swap(rank, pivot);
        let inv = field.inv(work[rank][col] as u16).expect("pivot is nonzero") as u8;
        for c in col..width {
            work[rank][c] = field.mul(work[rank][c] as u16, inv as u16) as u8;
        }
        for r in 0..work.len() {
            if r != rank && work[r][col] != 0 {
                let factor = work[r][col];
                for c in col..width {
                    let sub = field.mul(factor as u16, work[rank][c] as u16);
                    work[r][c] = field.add(work[r][c] as u16, sub) as u8;
                }
            }
        }
        rank += 1;
        if rank == work.len() {
            break;
        }
    }
    rank
}

/// Encode one generation: coded payload j is the coefficient-weighted sum
/// of the k source blocks, symbol by symbol.
pub fn encode_generation(
    field: &Field,
    generation_id: u64,
    source: &[SymbolBlock],
    vectors: &[CodingVector],
) -> Result<Vec<CodedBlock>, CodecError> {
    if source.is_empty() {
        return Err(CodecError::EmptyGeneration);
    }
    let k = source.len();
    let block_len = source[0].len();
    for b in source {
        if b.len() != block_len {
            return Err(CodecError::BlockLengthMismatch { expected: block_len, got: b.len() });
        }
    }
    let mut out = Vec::with_capacity(vectors.len());
    for vector in vectors {
        if vector.len() != k {
            return Err(CodecError::LengthMismatch { expected: k, got: vector.len() });
        }
        let mut payload = vec![0u8; block_len];
        for (coeff, block) in vector.iter().zip(source) {
            if *coeff == 0 {
                continue;
            }
            for (acc, &sym) in payload.iter_mut().zip(block) {
                let term = field.mul(*coeff as u16, sym as u16);
                *acc = field.add(*acc as u16, term) as u8;
            }
        }
        out.push(CodedBlock { generation_id, vector: vector.clone(), payload });
    }
    Ok(out)
}

/// Incremental Gaussian-elimination decoder for one generation.
///
/// Rows are kept in reduced echelon form; rank reaches `k` exactly when the
/// received coding vectors span the source space.
#[derive(Debug, Clone)]
pub struct DecodeState {
    generation_id: u64,
    k: usize,
    // (vector, payload) rows in echelon form, pivot columns in `pivots`.
    rows: Vec<(Vec<u8>, Vec<u8>)>,
    pivots: Vec<usize>,
    received: usize,
}

impl DecodeState {
    pub fn new(generation_id: u64, k: usize) -> Result<Self, CodecError> {
        if k == 0 {
            return Err(CodecError::EmptyGeneration);
        }
        Ok(DecodeState { generation_id, k, rows: Vec::new(), pivots: Vec::new(), received: 0 })
    }

    pub fn generation_id(&self) -> u64 {
        self.generation_id
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Blocks ingested, including dependent ones.
    pub fn received(&self) -> usize {
        self.received
    }

    pub fn decodable(&self) -> bool {
        self.rank() == self.k
    }

    /// Fold one coded block in; true when it raised the rank.
    pub fn ingest(&mut self, field: &Field, block: &CodedBlock) -> Result<bool, CodecError> {
        if block.generation_id != self.generation_id {
            return Err(CodecError::GenerationMismatch {
                expected: self.generation_id,
                got: block.generation_id,
            });
        }
        if block.vector.len() != self.k {
            return Err(CodecError::LengthMismatch { expected: self.k, got: block.vector.len() });
        }
        if let Some((_, p)) = self.rows.first() {
            if block.payload.len() != p.len() {
                return Err(CodecError::BlockLengthMismatch {
                    expected: p.len(),
                    got: block.payload.len(),
                });
            }
        }
        self.received += 1;
        if self.decodable() {
            return Ok(false);
        }

        let mut vec = block.vector.clone();
        let mut payload = block.payload.clone();
        // Reduce by existing pivot rows.
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            if vec[pc] != 0 {
                let factor = vec[pc];
                eliminate(field, &mut vec, &mut payload, factor, &row.0, &row.1);
            }
        }
        let Some(pivot_col) = vec.iter().position(|&c| c != 0) else {
            return Ok(false); // dependent, discard
        };
        // Normalize the new row.
        let inv = field.inv(vec[pivot_col] as u16).expect("pivot nonzero") as u8;
        scale(field, &mut vec, inv);
        scale(field, &mut payload, inv);
        // Back-eliminate the new pivot from existing rows.
        for (row, _) in self.rows.iter_mut().zip(&self.pivots) {
            if row.0[pivot_col] != 0 {
                let factor = row.0[pivot_col];
                eliminate(field, &mut row.0, &mut row.1, factor, &vec, &payload);
            }
        }
        self.rows.push((vec, payload));
        self.pivots.push(pivot_col);
        Ok(true)
    }

    /// Recover the k source blocks in lane order; errors while rank < k.
    pub fn decode(&self, _field: &Field) -> Result<Vec<SymbolBlock>, CodecError> {
        if !self.decodable() {
            return Err(CodecError::InsufficientRank { rank: self.rank(), needed: self.k });
        }
        // Rows are fully reduced: each is a unit vector on its pivot column.
        let mut out = vec![Vec::new(); self.k];
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            debug_assert!(row.0.iter().enumerate().all(|(i, &c)| (i == pc) == (c == 1)));
            out[pc] = row.1.clone();
        }
        Ok(out)
    }
}

fn scale(field: &Field, row: &mut [u8], factor: u8) {
    for x in row {
        *x = field.mul(*x as u16, factor as u16) as u8;
    }
}

/// row -= factor * other, fused over vector and payload.
fn eliminate(
    field: &Field,
    vec: &mut [u8],
    payload: &mut [u8],
    factor: u8,
    other_vec: &[u8],
    other_payload: &[u8],
) {
    for (x, &o) in vec.iter_mut().zip(other_vec) {
        *x = field.add(*x as u16, field.mul(factor as u16, o as u16)) as u8;
    }
    for (x, &o) in payload.iter_mut().zip(other_payload) {
        *x = field.add(*x as u16, field.mul(factor as u16, o as u16)) as u8;
    }
}
