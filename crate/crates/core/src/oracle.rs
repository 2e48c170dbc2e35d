//! Tabulated Feistel-family oracles and random permutations.
//!
//! Blocks are packed into a `u64` with the first sub-block (`a`, or `I¹`) in
//! the most significant position: `[I¹, I², …, I^k]` is
//! `I¹ << (k-1)n | I² << (k-2)n | … | I^k`.
//!
//! A round of the unbalanced contracting scheme XORs `f(I²‖…‖I^k)` into `I¹`
//! and then rotates the block left by `n` bits, so
//! `[I¹, …, I^k] -> [I², …, I^k, I¹ ⊕ f(I²‖…‖I^k)]`. With `k = 2` this is the
//! balanced round `[a, b] -> [b, a ⊕ f(b)]`.

use serde::{Deserialize, Serialize};

use crate::error::{capacity, config, Error, Result};
use crate::seed;

/// Largest round-function input width, in bits, that will be tabulated.
pub const MAX_ROUND_INPUT_BITS: u32 = 24;
/// Largest block width, in bits, for a tabulated random permutation.
pub const MAX_PERMUTATION_BITS: u32 = 24;

/// Anything that maps `input_bits`-wide words to `output_bits`-wide words.
///
/// The simulators only need this much of an oracle, which lets test fixtures
/// (planted-period functions and the like) run through the same circuits.
pub trait BlockFunction: Sync {
    fn input_bits(&self) -> u32;
    fn output_bits(&self) -> u32;
    fn apply(&self, input: u64) -> u64;
}

pub(crate) fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Sub-block width `n`, sub-block count `k` and round count `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockParams {
    pub n: u32,
    pub k: u32,
    pub d: u32,
}

impl BlockParams {
    pub fn new(n: u32, k: u32, d: u32) -> Result<Self> {
        let p = BlockParams { n, k, d };
        p.validate()?;
        Ok(p)
    }

    /// Balanced parameters (`k = 2`).
    pub fn balanced(n: u32, rounds: u32) -> Result<Self> {
        Self::new(n, 2, rounds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return config("sub-block width n must be at least 1");
        }
        if self.k < 2 {
            return config(format!("sub-block count k must be at least 2, got {}", self.k));
        }
        if self.d == 0 {
            return config("round count d must be at least 1");
        }
        let round_in = u64::from(self.n) * u64::from(self.k - 1);
        if round_in > u64::from(MAX_ROUND_INPUT_BITS) {
            return capacity(format!(
                "round functions would take {round_in} input bits (n={}, k={}); \
                 tables are limited to 2^{MAX_ROUND_INPUT_BITS} entries",
                self.n, self.k
            ));
        }
        Ok(())
    }

    /// Total block width `k·n`.
    pub fn block_bits(&self) -> u32 {
        self.n * self.k
    }

    /// Input width of a contracting round function, `(k-1)·n`.
    pub fn round_input_bits(&self) -> u32 {
        self.n * (self.k - 1)
    }
}

/// A dense lookup table from `in_bits` to `out_bits`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundFunction {
    in_bits: u32,
    out_bits: u32,
    table: Vec<u32>,
}

impl RoundFunction {
    pub fn from_table(in_bits: u32, out_bits: u32, table: Vec<u32>) -> Result<Self> {
        if in_bits > MAX_ROUND_INPUT_BITS || out_bits > 32 {
            return capacity(format!("round function {in_bits}->{out_bits} bits is too wide"));
        }
        if table.len() as u64 != 1u64 << in_bits {
            return config(format!(
                "round function table has {} entries, expected 2^{in_bits}",
                table.len()
            ));
        }
        if let Some(bad) = table.iter().find(|&&v| u64::from(v) > mask(out_bits)) {
            return config(format!("table entry {bad} does not fit in {out_bits} bits"));
        }
        Ok(RoundFunction { in_bits, out_bits, table })
    }

    pub fn from_fn(in_bits: u32, out_bits: u32, f: impl Fn(u64) -> u64) -> Result<Self> {
        let table = (0..1u64 << in_bits).map(|x| (f(x) & mask(out_bits)) as u32).collect();
        Self::from_table(in_bits, out_bits, table)
    }

    pub fn zero(in_bits: u32, out_bits: u32) -> Result<Self> {
        Self::from_fn(in_bits, out_bits, |_| 0)
    }

    /// A uniformly random function; entry `x` is the low `out_bits` of the `x`-th stream word.
    pub fn random(in_bits: u32, out_bits: u32, rng: &mut impl rand_core::RngCore) -> Result<Self> {
        if in_bits > MAX_ROUND_INPUT_BITS {
            return capacity(format!("round function input of {in_bits} bits is too wide"));
        }
        let m = mask(out_bits);
        let table = (0..1u64 << in_bits).map(|_| (rng.next_u64() & m) as u32).collect();
        Self::from_table(in_bits, out_bits, table)
    }

    /// A uniformly random permutation of `bits`-wide words (Fisher-Yates).
    pub fn random_permutation(bits: u32, rng: &mut impl rand_core::RngCore) -> Result<Self> {
        if bits > MAX_ROUND_INPUT_BITS {
            return capacity(format!("permutation on {bits} bits is too wide"));
        }
        Self::from_table(bits, bits, seed::fisher_yates(rng, 1usize << bits))
    }

    pub fn in_bits(&self) -> u32 {
        self.in_bits
    }

    pub fn out_bits(&self) -> u32 {
        self.out_bits
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        u64::from(self.table[x as usize])
    }

    /// True when the table is a bijection on its domain.
    pub fn is_permutation(&self) -> bool {
        if self.in_bits != self.out_bits {
            return false;
        }
        let mut seen = vec![false; self.table.len()];
        self.table.iter().all(|&v| !std::mem::replace(&mut seen[v as usize], true))
    }
}

/// One balanced round: `(a, b) -> (b, a ⊕ f(b))`.
pub fn feistel_round(f: &RoundFunction, n: u32, a: u64, b: u64) -> Result<(u64, u64)> {
    if f.in_bits != n || f.out_bits != n {
        return config(format!(
            "round function is {}->{} bits but the half-block is {n} bits",
            f.in_bits, f.out_bits
        ));
    }
    if a > mask(n) || b > mask(n) {
        return config(format!("half-blocks must be below 2^{n}"));
    }
    Ok((b, a ^ f.eval(b)))
}

/// One contracting round on a packed `k·n`-bit block.
pub fn unbalanced_round(f: &RoundFunction, params: &BlockParams, block: u64) -> Result<u64> {
    if f.in_bits != params.round_input_bits() || f.out_bits != params.n {
        return config(format!(
            "round function is {}->{} bits, expected {}->{}",
            f.in_bits,
            f.out_bits,
            params.round_input_bits(),
            params.n
        ));
    }
    if block > mask(params.block_bits()) {
        return config(format!("block must be below 2^{}", params.block_bits()));
    }
    Ok(round_unchecked(f, params, block))
}

#[inline]
fn round_unchecked(f: &RoundFunction, params: &BlockParams, block: u64) -> u64 {
    let rest_bits = params.round_input_bits();
    let rest = block & mask(rest_bits);
    let head = block >> rest_bits;
    (rest << params.n) | (head ^ f.eval(rest))
}

#[inline]
fn inverse_round_unchecked(f: &RoundFunction, params: &BlockParams, block: u64) -> u64 {
    let rest_bits = params.round_input_bits();
    let rest = block >> params.n;
    let tail = block & mask(params.n);
    ((tail ^ f.eval(rest)) << rest_bits) | rest
}

/// Which construction an oracle tabulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    /// Balanced Feistel scheme with `d` random round functions.
    Feistel,
    /// Three balanced rounds whose middle round function is a random permutation.
    Vfs,
    /// Unbalanced contracting scheme `G_k^d`.
    Unbalanced,
    /// Uniformly random permutation on `k·n` bits.
    RandomPermutation,
}

impl OracleKind {
    fn tag(self) -> u64 {
        match self {
            OracleKind::Feistel => 1,
            OracleKind::Vfs => 2,
            OracleKind::Unbalanced => 3,
            OracleKind::RandomPermutation => 4,
        }
    }
}

impl std::fmt::Display for OracleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OracleKind::Feistel => "feistel",
            OracleKind::Vfs => "vfs",
            OracleKind::Unbalanced => "unbalanced",
            OracleKind::RandomPermutation => "random_permutation",
        })
    }
}

/// The minimal description from which an oracle can be rebuilt bit-for-bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSpec {
    pub kind: OracleKind,
    pub params: BlockParams,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Internals {
    Rounds(Vec<RoundFunction>),
    Permutation(Vec<u32>),
}

/// An immutable, fully tabulated oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleInstance {
    spec: OracleSpec,
    internals: Internals,
}

impl OracleInstance {
    /// Builds the oracle deterministically from `(kind, params, seed)`.
    ///
    /// Table `j` is drawn from `seed::stream(derive_path(seed, [kind_tag, j]))`.
    pub fn build(kind: OracleKind, params: BlockParams, seed: u64) -> Result<Self> {
        Self::preflight(kind, &params)?;
        let table_rng = |j: u64| seed::stream(seed::derive_path(seed, &[kind.tag(), j]));
        let internals = match kind {
            OracleKind::Feistel => Internals::Rounds(
                (0..params.d)
                    .map(|j| RoundFunction::random(params.n, params.n, &mut table_rng(j.into())))
                    .collect::<Result<_>>()?,
            ),
            OracleKind::Vfs => Internals::Rounds(vec![
                RoundFunction::random(params.n, params.n, &mut table_rng(0))?,
                RoundFunction::random_permutation(params.n, &mut table_rng(1))?,
                RoundFunction::random(params.n, params.n, &mut table_rng(2))?,
            ]),
            OracleKind::Unbalanced => Internals::Rounds(
                (0..params.d)
                    .map(|j| {
                        RoundFunction::random(params.round_input_bits(), params.n, &mut table_rng(j.into()))
                    })
                    .collect::<Result<_>>()?,
            ),
            OracleKind::RandomPermutation => {
                Internals::Permutation(seed::fisher_yates(&mut table_rng(0), 1usize << params.block_bits()))
            }
        };
        Ok(OracleInstance { spec: OracleSpec { kind, params, seed }, internals })
    }

    /// The checks `build` makes before allocating anything.
    pub fn preflight(kind: OracleKind, params: &BlockParams) -> Result<()> {
        params.validate()?;
        match kind {
            OracleKind::Feistel | OracleKind::Vfs if params.k != 2 => {
                config(format!("{kind} needs k = 2, got k = {}", params.k))
            }
            OracleKind::Vfs if params.d != 3 => config(format!("VFS is fixed at d = 3, got d = {}", params.d)),
            OracleKind::RandomPermutation if params.block_bits() > MAX_PERMUTATION_BITS => capacity(format!(
                "random permutation on {} bits exceeds the 2^{MAX_PERMUTATION_BITS}-entry table limit",
                params.block_bits()
            )),
            _ => Ok(()),
        }
    }

    pub fn from_spec(spec: &OracleSpec) -> Result<Self> {
        Self::build(spec.kind, spec.params, spec.seed)
    }

    /// A Feistel-family oracle with caller-supplied round functions (used for
    /// degenerate and hand-checked instances). The seed is recorded as 0.
    pub fn with_rounds(kind: OracleKind, params: BlockParams, rounds: Vec<RoundFunction>) -> Result<Self> {
        params.validate()?;
        if kind == OracleKind::RandomPermutation {
            return config("a random permutation has no round functions");
        }
        if rounds.len() != params.d as usize {
            return config(format!("expected {} round functions, got {}", params.d, rounds.len()));
        }
        if matches!(kind, OracleKind::Feistel | OracleKind::Vfs) && params.k != 2 {
            return config("balanced schemes need k = 2");
        }
        for (j, f) in rounds.iter().enumerate() {
            if f.in_bits != params.round_input_bits() || f.out_bits != params.n {
                return config(format!("round function {j} has the wrong width"));
            }
        }
        if kind == OracleKind::Vfs && (params.d != 3 || !rounds[1].is_permutation()) {
            return config("VFS needs three rounds with a permutation in the middle");
        }
        Ok(OracleInstance { spec: OracleSpec { kind, params, seed: 0 }, internals: Internals::Rounds(rounds) })
    }

    pub fn spec(&self) -> &OracleSpec {
        &self.spec
    }

    pub fn kind(&self) -> OracleKind {
        self.spec.kind
    }

    pub fn params(&self) -> &BlockParams {
        &self.spec.params
    }

    pub fn seed(&self) -> u64 {
        self.spec.seed
    }

    pub fn round_functions(&self) -> Option<&[RoundFunction]> {
        match &self.internals {
            Internals::Rounds(r) => Some(r),
            Internals::Permutation(_) => None,
        }
    }

    pub fn permutation_table(&self) -> Option<&[u32]> {
        match &self.internals {
            Internals::Permutation(p) => Some(p),
            Internals::Rounds(_) => None,
        }
    }

    /// Evaluates the construction on a packed block; panics on out-of-range input.
    #[inline]
    pub fn evaluate(&self, input: u64) -> u64 {
        assert!(input <= mask(self.spec.params.block_bits()), "block {input:#x} out of range");
        match &self.internals {
            Internals::Rounds(rounds) => {
                rounds.iter().fold(input, |b, f| round_unchecked(f, &self.spec.params, b))
            }
            Internals::Permutation(p) => u64::from(p[input as usize]),
        }
    }

    /// Checked evaluation on a packed block.
    pub fn try_evaluate(&self, input: u64) -> Result<u64> {
        if input > mask(self.spec.params.block_bits()) {
            return config(format!("block must be below 2^{}", self.spec.params.block_bits()));
        }
        Ok(self.evaluate(input))
    }

    /// Evaluates on a balanced `(a, b)` pair, returning `(c, d)`.
    pub fn evaluate_pair(&self, a: u64, b: u64) -> Result<(u64, u64)> {
        let n = self.spec.params.n;
        if self.spec.params.k != 2 {
            return config("pair evaluation needs a balanced (k = 2) oracle");
        }
        let out = self.try_evaluate((a << n) | b)?;
        Ok((out >> n, out & mask(n)))
    }

    /// Runs the rounds backwards (or looks up the inverse permutation).
    pub fn invert(&self, output: u64) -> Result<u64> {
        let params = &self.spec.params;
        if output > mask(params.block_bits()) {
            return config(format!("block must be below 2^{}", params.block_bits()));
        }
        Ok(match &self.internals {
            Internals::Rounds(rounds) => {
                rounds.iter().rev().fold(output, |b, f| inverse_round_unchecked(f, params, b))
            }
            Internals::Permutation(p) => {
                p.iter().position(|&v| u64::from(v) == output).expect("permutation table is a bijection")
                    as u64
            }
        })
    }

    /// Serializable dump; `with_tables` embeds the expanded tables.
    pub fn dump(&self, with_tables: bool) -> OracleDump {
        OracleDump { spec: self.spec, prng: seed::PRNG_ID.to_string(), tables: with_tables.then(|| self.internals.clone()) }
    }

    /// Restores an oracle from a dump. Embedded tables must match a rebuild
    /// from its kind, parameters and seed; hand-built instances (seed 0 with tables) are accepted as given.
    pub fn from_dump(dump: &OracleDump) -> Result<Self> {
        match &dump.tables {
            None => Self::from_spec(&dump.spec),
            Some(Internals::Rounds(r)) if dump.spec.seed == 0 && dump.spec.kind != OracleKind::RandomPermutation => {
                Self::with_rounds(dump.spec.kind, dump.spec.params, r.clone())
            }
            Some(t) => {
                let rebuilt = Self::from_spec(&dump.spec)?;
                if &rebuilt.internals != t {
                    return Err(Error::Config("embedded tables do not match the seeded rebuild".into()));
                }
                Ok(rebuilt)
            }
        }
    }
}

impl BlockFunction for OracleInstance {
    fn input_bits(&self) -> u32 {
        self.spec.params.block_bits()
    }

    fn output_bits(&self) -> u32 {
        self.spec.params.block_bits()
    }

    fn apply(&self, input: u64) -> u64 {
        self.evaluate(input)
    }
}

/// On-disk form of an oracle: kind, parameters, seed, the stream identifier and optional tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleDump {
    #[serde(flatten)]
    pub spec: OracleSpec,
    pub prng: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tables: Option<Internals>,
}

impl OracleDump {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("oracle dump serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("bad oracle dump: {e}")))
    }
}
