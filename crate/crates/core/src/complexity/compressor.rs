//! Embedded bitwise context-mixing compressor.
//!
//! Every quantity is integer arithmetic: 12-bit probabilities, fixed-point
//! logistic mixing, and a 32-bit binary arithmetic coder with underflow
//! carrying. The reported size of a word is what the coder would need to
//! terminate after that word, so the sizes of *all* prefixes of a word are
//! available from a single left-to-right pass.

use std::sync::OnceLock;

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitWord;

/// Fixed per-description overhead in bits.
pub const HEADER_BITS: u64 = 32;

const ORDERS: [u32; 12] = [0, 1, 2, 3, 4, 6, 8, 11, 14, 18, 24, 32];
const HASH_BITS: u32 = 16;
const RUN_CAP: u32 = 4095;
const COUNT_LIMIT: u16 = 255;
const MIXER_SETS: usize = 8;
const INPUTS: usize = ORDERS.len() + 2;
const LEARNING_SHIFT: u32 = 12;

struct Tables {
    stretch: Vec<i16>,
    reciprocal: Vec<u32>,
}

fn squash(d: i32) -> i32 {
    const T: [i32; 33] = [
        1, 2, 3, 6, 10, 16, 27, 45, 73, 120, 194, 310, 488, 747, 1101, 1546, 2047, 2549, 2994,
        3348, 3607, 3785, 3901, 3975, 4022, 4050, 4068, 4079, 4085, 4089, 4092, 4093, 4094,
    ];
    if d > 2047 {
        return 4095;
    }
    if d < -2047 {
        return 1;
    }
    let w = d & 127;
    let i = ((d >> 7) + 16) as usize;
    (T[i] * (128 - w) + T[i + 1] * w + 64) >> 7
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut stretch = vec![0i16; 4096];
        let mut pi = 0usize;
        for x in -2047..=2047 {
            let v = squash(x) as usize;
            for slot in stretch.iter_mut().take(v + 1).skip(pi) {
                *slot = x as i16;
            }
            pi = pi.max(v + 1);
        }
        for slot in stretch.iter_mut().skip(pi) {
            *slot = 2047;
        }
        let reciprocal = (0..=COUNT_LIMIT as u32)
            .map(|n| 131_072 / (2 * n + 3))
            .collect();
        Tables {
            stretch,
            reciprocal,
        }
    })
}

#[derive(Clone, Copy)]
struct Slot {
    p: u16,
    n: u16,
}

impl Default for Slot {
    fn default() -> Self {
        Slot { p: 32768, n: 0 }
    }
}

impl Slot {
    fn p12(self) -> usize {
        (self.p >> 4) as usize
    }

    fn update(&mut self, bit: bool, reciprocal: &[u32]) {
        let target: i64 = if bit { 65535 } else { 0 };
        let p = self.p as i64;
        let step = (target - p) * reciprocal[self.n as usize] as i64 >> 16;
        self.p = (p + step).clamp(32, 65503) as u16;
        if self.n < COUNT_LIMIT {
            self.n += 1;
        }
    }
}

/// Binary arithmetic coder that only counts the bits it would emit.
#[derive(Clone)]
struct BitCounter {
    low: u64,
    high: u64,
    pending: u64,
    emitted: u64,
}

const TOP: u64 = 0xFFFF_FFFF;
const HALF: u64 = 0x8000_0000;
const QUARTER: u64 = 0x4000_0000;

impl BitCounter {
    fn new() -> Self {
        BitCounter {
            low: 0,
            high: TOP,
            pending: 0,
            emitted: 0,
        }
    }

    /// `p1` is P(bit = 1) in units of 1/4096, within [1, 4095].
    fn encode(&mut self, bit: bool, p1: u64) {
        let range = self.high - self.low + 1;
        let split = self.low + (range * p1 >> 12) - 1;
        if bit {
            self.high = split;
        } else {
            self.low = split + 1;
        }
        loop {
            if self.high < HALF {
                self.emitted += 1 + self.pending;
                self.pending = 0;
            } else if self.low >= HALF {
                self.emitted += 1 + self.pending;
                self.pending = 0;
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < 3 * QUARTER {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = self.high << 1 | 1;
        }
    }

    /// Bits needed if the stream were terminated now.
    fn terminated_len(&self) -> u64 {
        self.emitted + self.pending + 2
    }
}

/// Online compressor state: push bits one at a time and read off the
/// terminated code length of everything pushed so far.
#[derive(Clone)]
pub struct OnlineCompressor {
    history: u64,
    seen: u64,
    run_len: u32,
    last: bool,
    slots: Vec<Vec<Slot>>,
    run_slots: Vec<Slot>,
    weights: Vec<[i32; INPUTS]>,
    coder: BitCounter,
}

impl Default for OnlineCompressor {
    fn default() -> Self {
        Self::new()
    }
}

impl OnlineCompressor {
    pub fn new() -> Self {
        let slots = ORDERS
            .iter()
            .map(|&k| {
                let size = if k < HASH_BITS { 1usize << (k + 1) } else { 1usize << HASH_BITS };
                vec![Slot::default(); size]
            })
            .collect();
        OnlineCompressor {
            history: 0,
            seen: 0,
            run_len: 0,
            last: false,
            slots,
            run_slots: vec![Slot::default(); 2 * (RUN_CAP as usize + 1)],
            weights: vec![[(65536 / 4) as i32; INPUTS]; MIXER_SETS],
            coder: BitCounter::new(),
        }
    }

    pub fn len(&self) -> u64 {
        self.seen
    }

    pub fn is_empty(&self) -> bool {
        self.seen == 0
    }

    fn context_index(&self, order_idx: usize) -> usize {
        let k = ORDERS[order_idx];
        let avail = self.seen.min(k as u64) as u32;
        let mask = if avail == 64 { u64::MAX } else { (1u64 << avail) - 1 };
        // Sentinel bit marks how much history is available.
        let ctx = (self.history & mask) | if avail < 64 { 1u64 << avail } else { 0 };
        if k < HASH_BITS {
            ctx as usize
        } else {
            let h = (ctx ^ (k as u64) << 58).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            (h >> (64 - HASH_BITS)) as usize
        }
    }

    fn run_index(&self) -> usize {
        2 * self.run_len.min(RUN_CAP) as usize + self.last as usize
    }

    fn mixer_set(&self) -> usize {
        let bucket = match self.run_len {
            0 => 0,
            1 => 1,
            2..=3 => 2,
            4..=15 => 3,
            _ => 4,
        };
        if bucket == 0 {
            0
        } else {
            (bucket * 2 - 1 + self.last as usize).min(MIXER_SETS - 1)
        }
    }

    /// Appends one bit and returns the terminated code length in bits (without header).
    pub fn push(&mut self, bit: bool) -> u64 {
        let t = tables();
        let mut inputs = [0i32; INPUTS];
        let mut idx = [0usize; ORDERS.len()];
        for (i, slot_idx) in idx.iter_mut().enumerate() {
            *slot_idx = self.context_index(i);
            inputs[i] = t.stretch[self.slots[i][*slot_idx].p12()] as i32;
        }
        let run_idx = self.run_index();
        inputs[ORDERS.len()] = t.stretch[self.run_slots[run_idx].p12()] as i32;
        inputs[ORDERS.len() + 1] = 256;

        let set = self.mixer_set();
        let w = &mut self.weights[set];
        let dot: i64 = inputs
            .iter()
            .zip(w.iter())
            .map(|(&x, &wi)| x as i64 * wi as i64)
            .sum();
        let mixed = (dot >> 16).clamp(-2047, 2047) as i32;
        let p = squash(mixed).clamp(1, 4095);

        self.coder.encode(bit, p as u64);

        let err = ((bit as i32) << 12) - p;
        for (wi, &x) in w.iter_mut().zip(inputs.iter()) {
            *wi += (x * err) >> LEARNING_SHIFT;
        }
        for (i, &slot_idx) in idx.iter().enumerate() {
            self.slots[i][slot_idx].update(bit, &t.reciprocal);
        }
        self.run_slots[run_idx].update(bit, &t.reciprocal);

        if self.seen > 0 && bit == self.last {
            self.run_len = self.run_len.saturating_add(1);
        } else {
            self.run_len = 1;
        }
        self.last = bit;
        self.history = self.history << 1 | bit as u64;
        self.seen += 1;
        self.coder.terminated_len()
    }

    /// Terminated code length of everything pushed so far (without header).
    pub fn code_len(&self) -> u64 {
        if self.seen == 0 {
            0
        } else {
            self.coder.terminated_len()
        }
    }
}

/// Size in bits of the compressed description of `word`, header included.
pub fn compressed_bits(word: &BitWord) -> u64 {
    let mut c = OnlineCompressor::new();
    for b in word.iter() {
        c.push(b);
    }
    HEADER_BITS + c.code_len()
}

/// Compressed sizes of every prefix: entry `n` is the size of `word[..n]`, header included.
pub fn prefix_compressed_bits(word: &BitWord) -> Vec<u64> {
    let mut out = Vec::with_capacity(word.len() + 1);
    out.push(HEADER_BITS);
    let mut c = OnlineCompressor::new();
    for b in word.iter() {
        out.push(HEADER_BITS + c.push(b));
    }
    out
}

/// `C(xy) − C(x) − C(y)` over `count` seeded pairs of words of length below 2048.
///
/// Words are drawn from four textures: uniform bits, sparse ones, short periods and a
/// random word followed by its own copy.
pub fn subadditivity_excess(seed: u64, count: usize) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fn below(rng: &mut ChaCha8Rng, n: u64) -> u64 {
        rng.next_u64() % n
    }
    let word = |rng: &mut ChaCha8Rng| -> BitWord {
        let len = below(rng, 2048) as usize;
        match below(rng, 4) {
            0 => (0..len).map(|_| below(rng, 2) == 1).collect(),
            1 => (0..len).map(|_| below(rng, 16) == 0).collect(),
            2 => {
                let period = 1 + below(rng, 11) as usize;
                let pat: Vec<bool> = (0..period).map(|_| below(rng, 2) == 1).collect();
                (0..len).map(|i| pat[i % period]).collect()
            }
            _ => {
                let half: BitWord = (0..len / 2).map(|_| below(rng, 2) == 1).collect();
                half.concat(&half)
            }
        }
    };
    (0..count)
        .map(|_| {
            let (x, y) = (word(&mut rng), word(&mut rng));
            compressed_bits(&x.concat(&y)) as i64 - compressed_bits(&x) as i64 - compressed_bits(&y) as i64
        })
        .collect()
}
