// SPDX-License-Identifier: Apache-2.0

//! Logic simulation.
//!
//! [`Simulator`] compiles a netlist into a topologically ordered program and
//! evaluates 64 patterns per pass, one pattern per bit of a `u64`. The scalar
//! [`simulate`] walks the netlist by name and is kept deliberately separate so
//! the two can be cross-checked.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::netlist::{GateType, Netlist, NetlistError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("{what} width mismatch: expected {expected}, got {got}")]
    Width {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("interface mismatch: {0}")]
    Interface(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

#[derive(Debug, Clone)]
pub struct Simulator {
    num_inputs: usize,
    num_keys: usize,
    kinds: Vec<GateType>,
    /// `fanin[starts[g]..starts[g + 1]]` are the value slots read by gate `g`.
    starts: Vec<usize>,
    fanin: Vec<usize>,
    outputs: Vec<usize>,
}

impl Simulator {
    pub fn new(n: &Netlist) -> Result<Simulator, SimError> {
        n.check()?;
        let order = n.topo_order()?;
        let mut slot: HashMap<&str, usize> = HashMap::new();
        for (i, name) in n.inputs.iter().chain(&n.key_inputs).enumerate() {
            slot.insert(name, i);
        }
        let base = n.inputs.len() + n.key_inputs.len();
        for (pos, &g) in order.iter().enumerate() {
            slot.insert(&n.gates[g].output, base + pos);
        }
        let mut kinds = Vec::with_capacity(order.len());
        let mut starts = Vec::with_capacity(order.len() + 1);
        let mut fanin = Vec::new();
        for &g in &order {
            let gate = &n.gates[g];
            kinds.push(gate.kind);
            starts.push(fanin.len());
            fanin.extend(gate.inputs.iter().map(|i| slot[i.as_str()]));
        }
        starts.push(fanin.len());
        let outputs = n.outputs.iter().map(|o| slot[o.as_str()]).collect();
        Ok(Simulator {
            num_inputs: n.inputs.len(),
            num_keys: n.key_inputs.len(),
            kinds,
            starts,
            fanin,
            outputs,
        })
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_keys(&self) -> usize {
        self.num_keys
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Evaluate one 64-pattern block. `scratch` is reused between calls.
    pub fn eval_block(
        &self,
        inputs: &[u64],
        keys: &[u64],
        scratch: &mut Vec<u64>,
        out: &mut Vec<u64>,
    ) -> Result<(), SimError> {
        if inputs.len() != self.num_inputs {
            return Err(SimError::Width {
                what: "input",
                expected: self.num_inputs,
                got: inputs.len(),
            });
        }
        if keys.len() != self.num_keys {
            return Err(SimError::Width {
                what: "key",
                expected: self.num_keys,
                got: keys.len(),
            });
        }
        scratch.clear();
        scratch.extend_from_slice(inputs);
        scratch.extend_from_slice(keys);
        let mut ins = [0u64; 8];
        let mut wide = Vec::new();
        for (g, &kind) in self.kinds.iter().enumerate() {
            let pins = &self.fanin[self.starts[g]..self.starts[g + 1]];
            let v = if pins.len() <= ins.len() {
                for (k, &p) in pins.iter().enumerate() {
                    ins[k] = scratch[p];
                }
                kind.eval_words(&ins[..pins.len()])
            } else {
                wide.clear();
                wide.extend(pins.iter().map(|&p| scratch[p]));
                kind.eval_words(&wide)
            };
            scratch.push(v);
        }
        out.clear();
        out.extend(self.outputs.iter().map(|&o| scratch[o]));
        Ok(())
    }

    pub fn eval(&self, inputs: &[u64], keys: &[u64]) -> Result<Vec<u64>, SimError> {
        let mut scratch = Vec::new();
        let mut out = Vec::new();
        self.eval_block(inputs, keys, &mut scratch, &mut out)?;
        Ok(out)
    }
}

/// Broadcast a key to 64 lanes.
pub fn key_words(key: &[bool]) -> Vec<u64> {
    key.iter().map(|&b| if b { !0 } else { 0 }).collect()
}

/// Scalar reference evaluation of one pattern.
pub fn simulate(n: &Netlist, pattern: &[bool], key: &[bool]) -> Result<Vec<bool>, SimError> {
    if pattern.len() != n.inputs.len() {
        return Err(SimError::Width {
            what: "input",
            expected: n.inputs.len(),
            got: pattern.len(),
        });
    }
    if key.len() != n.key_inputs.len() {
        return Err(SimError::Width {
            what: "key",
            expected: n.key_inputs.len(),
            got: key.len(),
        });
    }
    n.check()?;
    let mut values: HashMap<&str, bool> = HashMap::new();
    for (name, &v) in n.inputs.iter().zip(pattern) {
        values.insert(name, v);
    }
    for (name, &v) in n.key_inputs.iter().zip(key) {
        values.insert(name, v);
    }
    let gates = n.gate_index();
    fn eval<'a>(
        net: &'a str,
        n: &'a Netlist,
        gates: &HashMap<&'a str, usize>,
        values: &mut HashMap<&'a str, bool>,
    ) -> bool {
        if let Some(&v) = values.get(net) {
            return v;
        }
        let gate = &n.gates[gates[net]];
        let ins: Vec<bool> = gate
            .inputs
            .iter()
            .map(|i| eval(i, n, gates, values))
            .collect();
        let v = match gate.kind {
            GateType::And => ins.iter().all(|&b| b),
            GateType::Nand => !ins.iter().all(|&b| b),
            GateType::Or => ins.iter().any(|&b| b),
            GateType::Nor => !ins.iter().any(|&b| b),
            GateType::Xor => ins.iter().filter(|&&b| b).count() % 2 == 1,
            GateType::Xnor => ins.iter().filter(|&&b| b).count() % 2 == 0,
            GateType::Not => !ins[0],
            GateType::Buf => ins[0],
            GateType::Mux => {
                if ins[0] {
                    ins[2]
                } else {
                    ins[1]
                }
            }
        };
        values.insert(net, v);
        v
    }
    Ok(n.outputs
        .iter()
        .map(|o| eval(o, n, &gates, &mut values))
        .collect())
}

/// Seeded random patterns, reproducible by `(seed, index)`: block `b`
/// (patterns `64b..64b+63`) comes from ChaCha8 stream `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatternSource {
    pub seed: u64,
    pub width: usize,
}

impl PatternSource {
    pub fn new(seed: u64, width: usize) -> Self {
        PatternSource { seed, width }
    }

    pub fn block(&self, b: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(b);
        (0..self.width).map(|_| rng.random()).collect()
    }

    pub fn pattern(&self, index: u64) -> Pattern {
        let words = self.block(index / 64);
        let bit = index % 64;
        Pattern {
            bits: words.iter().map(|w| (w >> bit) & 1 == 1).collect(),
            seed: self.seed,
            index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub bits: Vec<bool>,
    pub seed: u64,
    pub index: u64,
}

/// Block `b` of the exhaustive enumeration over `width` inputs: pattern
/// `p` assigns bit `i` of `p` to input `i`.
pub fn exhaustive_block(width: usize, b: u64) -> Vec<u64> {
    const LANES: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    (0..width)
        .map(|i| {
            if i < 6 {
                LANES[i]
            } else if (b >> (i - 6)) & 1 == 1 {
                !0
            } else {
                0
            }
        })
        .collect()
}

/// Mask of valid lanes when only `count` patterns remain in a block.
pub fn lane_mask(count: u64) -> u64 {
    if count >= 64 {
        !0
    } else {
        (1u64 << count) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_bench;

    const C17: &str = include_str!("../fixtures/c17.bench");

    #[test]
    fn nand_truth() {
        let n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = NAND(a, b)").unwrap();
        assert_eq!(simulate(&n, &[true, true], &[]).unwrap(), vec![false]);
        assert_eq!(simulate(&n, &[true, false], &[]).unwrap(), vec![true]);
        assert!(matches!(
            simulate(&n, &[true], &[]),
            Err(SimError::Width { what: "input", .. })
        ));
    }

    #[test]
    fn mux_select_zero_passes_data0() {
        let n = parse_bench("INPUT(s)\nINPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = MUX(s, a, b)").unwrap();
        for a in [false, true] {
            for b in [false, true] {
                assert_eq!(simulate(&n, &[false, a, b], &[]).unwrap(), vec![a]);
                assert_eq!(simulate(&n, &[true, a, b], &[]).unwrap(), vec![b]);
            }
        }
    }

    /// Hand-written c17 equations, independent of both simulators.
    fn c17_reference(x: [bool; 5]) -> [bool; 2] {
        let nand = |a: bool, b: bool| !(a && b);
        let [i1, i2, i3, i6, i7] = x;
        let n10 = nand(i1, i3);
        let n11 = nand(i3, i6);
        let n16 = nand(i2, n11);
        let n19 = nand(n11, i7);
        [nand(n10, n16), nand(n16, n19)]
    }

    #[test]
    fn c17_matches_reference_exhaustively() {
        let n = parse_bench(C17).unwrap();
        let sim = Simulator::new(&n).unwrap();
        let block = exhaustive_block(5, 0);
        let out = sim.eval(&block, &[]).unwrap();
        for p in 0..32u32 {
            let x: [bool; 5] = std::array::from_fn(|i| (p >> i) & 1 == 1);
            let expect = c17_reference(x);
            assert_eq!(
                simulate(&n, &x, &[]).unwrap(),
                expect.to_vec(),
                "pattern {p}"
            );
            let lanes: Vec<bool> = out.iter().map(|w| (w >> p) & 1 == 1).collect();
            assert_eq!(lanes, expect.to_vec(), "pattern {p}");
        }
        // all-zero pattern: 10 = 1, 11 = 1, 16 = 1, 19 = 1 -> 22 = 0, 23 = 0
        assert_eq!(simulate(&n, &[false; 5], &[]).unwrap(), vec![false, false]);
    }

    #[test]
    fn pattern_source_is_indexable() {
        let src = PatternSource::new(42, 7);
        let block = src.block(3);
        let p = src.pattern(3 * 64 + 17);
        for (i, w) in block.iter().enumerate() {
            assert_eq!(p.bits[i], (w >> 17) & 1 == 1);
        }
        assert_eq!(src.block(3), block);
        assert_ne!(src.block(4), block);
    }

    #[test]
    fn lane_masks() {
        assert_eq!(lane_mask(64), !0);
        assert_eq!(lane_mask(100), !0);
        assert_eq!(lane_mask(3), 0b111);
        assert_eq!(lane_mask(0), 0);
    }
}
