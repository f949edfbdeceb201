// SPDX-License-Identifier: Apache-2.0

//! MUX key-gate insertion.
//!
//! Four insertion strategies are supported. In each, `f_i -> g_i` (and
//! `f_j -> g_j`) are original wires that become true paths:
//!
//! * `S1`: two multi-output sources, two MUXes on two key bits.
//! * `S2`: two multi-output sources, one MUX in front of `g_i`.
//! * `S3`: a multi-output `f_i` and a single-output `f_j`, one MUX in front
//!   of a fan-out of `f_i`.
//! * `S4`: any two sources, two MUXes sharing one key bit and wired in
//!   opposite orders, so the wrong value swaps both paths.
//!
//! Every insertion is checked against a connectivity guard: a source that
//! loses an original reader must keep an unconditional reader, be a primary
//! output, or be read by a complementary `S4` pair. Together with the loop
//! check this keeps the netlist free of floating wires and cycles under every
//! key assignment. [`naive_mux_lock`] skips the guard on purpose.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::CircuitGraph;
use crate::netlist::{key_index, key_input_name, Gate, GateType, Netlist, NetlistError};
use crate::similarity::{link_clusters, node_clusters, ClusterSet, DEFAULT_HOPS};

/// Random candidate draws before the D-MUX fallback switches to a full scan.
const RANDOM_ATTEMPTS: usize = 256;
/// Pairs tried per strategy inside one node cluster.
const NODE_PAIR_TRIES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    S1,
    S2,
    S3,
    S4,
    Naive,
}

impl Strategy {
    pub const DMUX: [Strategy; 4] = [Strategy::S1, Strategy::S2, Strategy::S3, Strategy::S4];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::S1 => "S1",
            Strategy::S2 => "S2",
            Strategy::S3 => "S3",
            Strategy::S4 => "S4",
            Strategy::Naive => "NAIVE",
        }
    }

    /// Key bits consumed by one application.
    pub fn key_cost(self) -> usize {
        match self {
            Strategy::S1 => 2,
            _ => 1,
        }
    }

    /// Parse a comma separated list such as `S1,S3`.
    pub fn parse_list(s: &str) -> Result<Vec<Strategy>, LockError> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let st: Strategy = part.parse()?;
            if st == Strategy::Naive {
                return Err(LockError::Options("NAIVE is not a D-MUX strategy".into()));
            }
            if !out.contains(&st) {
                out.push(st);
            }
        }
        if out.is_empty() {
            return Err(LockError::Options("empty strategy list".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = LockError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "S1" => Ok(Strategy::S1),
            "S2" => Ok(Strategy::S2),
            "S3" => Ok(Strategy::S3),
            "S4" => Ok(Strategy::S4),
            "NAIVE" => Ok(Strategy::Naive),
            _ => Err(LockError::Options(format!("unknown strategy {s}"))),
        }
    }
}

/// Where a locking decision came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    LinkCluster,
    NodeCluster,
    Random,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::LinkCluster => "LINK_CLUSTER",
            Provenance::NodeCluster => "NODE_CLUSTER",
            Provenance::Random => "RANDOM",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Provenance {
    type Err = LockError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "LINK_CLUSTER" => Ok(Provenance::LinkCluster),
            "NODE_CLUSTER" => Ok(Provenance::NodeCluster),
            "RANDOM" => Ok(Provenance::Random),
            _ => Err(LockError::Options(format!("unknown provenance {s}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    SimLL,
    DMux,
    Naive,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::SimLL => "simll",
            Scheme::DMux => "dmux",
            Scheme::Naive => "naive",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = LockError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "simll" => Ok(Scheme::SimLL),
            "dmux" => Ok(Scheme::DMux),
            "naive" => Ok(Scheme::Naive),
            _ => Err(LockError::Options(format!("unknown scheme {s}"))),
        }
    }
}

/// Placement of the `S3` MUX.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum S3Placement {
    /// The MUX drives a fan-out of the multi-output source `f_i`.
    #[default]
    MultiOutputFanout,
    /// The MUX drives the consumer of the single-output `f_j`. Under the
    /// wrong key `f_j` loses its only reader, so designs built this way do
    /// not keep every wire connected. Only useful for comparison.
    SingleOutputConsumer,
}

/// One MUX key gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LockRecord {
    pub key_index: usize,
    pub strategy: Strategy,
    /// Records produced by one strategy application share a group.
    pub group: usize,
    pub mux: String,
    /// Gate whose input the MUX now drives.
    pub gate: String,
    pub pin: usize,
    pub true_src: String,
    pub false_src: String,
    /// Correct key bit; the true source sits on the data input it selects.
    pub key_value: bool,
    pub provenance: Provenance,
}

impl LockRecord {
    /// Data inputs of the MUX in `(s = 0, s = 1)` order.
    pub fn data_inputs(&self) -> (&str, &str) {
        if self.key_value {
            (&self.false_src, &self.true_src)
        } else {
            (&self.true_src, &self.false_src)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KeyVector {
    pub bits: Vec<bool>,
    pub consumed: Vec<bool>,
}

impl KeyVector {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct LockedDesign {
    pub netlist: Netlist,
    pub key: KeyVector,
    pub records: Vec<LockRecord>,
    pub scheme: Scheme,
    pub seed: u64,
    pub hops: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LockError {
    #[error("key size must be at least 1")]
    ZeroKeys,
    #[error("netlist already has key inputs")]
    AlreadyKeyed,
    #[error("invalid option: {0}")]
    Options(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error("unknown net {0}")]
    UnknownNet(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inserting {from} -> {to} would close a combinational loop")]
    Loop { from: String, to: String },
    #[error("net {0} could be left floating")]
    Float(String),
    #[error("key bits exhausted")]
    KeysExhausted,
    #[error("only {inserted} of {requested} key bits could be inserted")]
    Shortfall { requested: usize, inserted: usize },
}

#[derive(Debug, Clone)]
pub struct LockOptions {
    pub key_size: usize,
    pub hops: usize,
    pub seed: u64,
    pub strategies: Vec<Strategy>,
    pub s3_placement: S3Placement,
}

impl LockOptions {
    pub fn new(key_size: usize, seed: u64) -> Self {
        LockOptions {
            key_size,
            hops: DEFAULT_HOPS,
            seed,
            strategies: Strategy::DMUX.to_vec(),
            s3_placement: S3Placement::default(),
        }
    }

    pub fn hops(mut self, h: usize) -> Self {
        self.hops = h;
        self
    }

    pub fn strategies(mut self, s: &[Strategy]) -> Self {
        self.strategies = s.to_vec();
        self
    }

    fn check(&self) -> Result<(), LockError> {
        if self.key_size == 0 {
            return Err(LockError::ZeroKeys);
        }
        if self.strategies.is_empty() {
            return Err(LockError::Options("empty strategy list".into()));
        }
        if self.strategies.contains(&Strategy::Naive) {
            return Err(LockError::Options("NAIVE is not a D-MUX strategy".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pin {
    gate: usize,
    pin: usize,
}

/// Mutable view of a netlist under locking.
///
/// Net ids of the original netlist follow [`CircuitGraph`] node order
/// (primary inputs, then gates), so graph node ids can be used directly.
#[derive(Debug, Clone)]
pub struct Locker {
    netlist: Netlist,
    names: Vec<String>,
    ids: HashMap<String, usize>,
    original_nets: usize,
    num_inputs: usize,
    driver: Vec<Option<usize>>,
    readers: Vec<Vec<Pin>>,
    gate_out: Vec<usize>,
    gate_in: Vec<Vec<usize>>,
    key_mux: Vec<bool>,
    is_output: Vec<bool>,
    pair_guard: Vec<bool>,
    orig_fanout: Vec<usize>,
    budget: usize,
    key: KeyVector,
    records: Vec<LockRecord>,
    groups: usize,
    mux_counter: usize,
    s3_placement: S3Placement,
    rng: ChaCha8Rng,
}

impl Locker {
    /// Start locking `n` with `key_size` key bits.
    pub fn new(n: &Netlist, key_size: usize, seed: u64) -> Result<Locker, LockError> {
        if key_size == 0 {
            return Err(LockError::ZeroKeys);
        }
        if !n.key_inputs.is_empty() {
            return Err(LockError::AlreadyKeyed);
        }
        n.check()?;
        let mut names: Vec<String> = n.inputs.clone();
        names.extend(n.gates.iter().map(|g| g.output.clone()));
        let ids: HashMap<String, usize> = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let mut driver = vec![None; names.len()];
        let mut readers = vec![Vec::new(); names.len()];
        let mut gate_out = Vec::with_capacity(n.gates.len());
        let mut gate_in = Vec::with_capacity(n.gates.len());
        for (gi, g) in n.gates.iter().enumerate() {
            let out = ids[&g.output];
            driver[out] = Some(gi);
            gate_out.push(out);
            let ins: Vec<usize> = g.inputs.iter().map(|i| ids[i]).collect();
            for (pin, &src) in ins.iter().enumerate() {
                readers[src].push(Pin { gate: gi, pin });
            }
            gate_in.push(ins);
        }
        let mut is_output = vec![false; names.len()];
        for o in &n.outputs {
            is_output[ids[o]] = true;
        }
        let orig_fanout = readers.iter().map(Vec::len).collect();
        Ok(Locker {
            netlist: n.clone(),
            original_nets: names.len(),
            num_inputs: n.inputs.len(),
            names,
            ids,
            driver,
            readers,
            gate_out,
            gate_in,
            key_mux: vec![false; n.gates.len()],
            pair_guard: vec![false; is_output.len()],
            is_output,
            orig_fanout,
            budget: key_size,
            key: KeyVector::default(),
            records: Vec::new(),
            groups: 0,
            mux_counter: 0,
            s3_placement: S3Placement::default(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn set_s3_placement(&mut self, p: S3Placement) {
        self.s3_placement = p;
    }

    /// Unused key bits.
    pub fn keys_left(&self) -> usize {
        self.budget - self.key.len()
    }

    pub fn records(&self) -> &[LockRecord] {
        &self.records
    }

    pub fn netlist(&self) -> &Netlist {
        &self.netlist
    }

    pub fn finish(self, scheme: Scheme, seed: u64, hops: usize) -> LockedDesign {
        LockedDesign {
            netlist: self.netlist,
            key: self.key,
            records: self.records,
            scheme,
            seed,
            hops,
        }
    }

    fn id(&self, name: &str) -> Result<usize, LockError> {
        self.ids
            .get(name)
            .copied()
            .ok_or_else(|| LockError::UnknownNet(name.to_string()))
    }

    fn is_original(&self, net: usize) -> bool {
        net < self.original_nets
    }

    /// Readers that are original gates, i.e. wires that can still be locked.
    fn open_readers(&self, net: usize) -> impl Iterator<Item = Pin> + '_ {
        self.readers[net]
            .iter()
            .copied()
            .filter(|p| !self.key_mux[p.gate])
    }

    fn unconditional(&self, net: usize) -> usize {
        self.readers[net]
            .iter()
            .filter(|p| !self.key_mux[p.gate] || p.pin == 0)
            .count()
    }

    /// Still read under every key after losing `lost` unconditional readers.
    fn guarded(&self, net: usize, lost: usize) -> bool {
        self.is_output[net] || self.pair_guard[net] || self.unconditional(net) > lost
    }

    /// Forward reachability `a ~> b` over nets, with optional extra edge.
    fn reaches(&self, a: usize, b: usize, extra: Option<(usize, usize)>) -> bool {
        if a == b {
            return true;
        }
        let mut seen = vec![false; self.names.len()];
        let mut stack = vec![a];
        seen[a] = true;
        while let Some(x) = stack.pop() {
            let mut push = |y: usize, stack: &mut Vec<usize>| {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            };
            for p in &self.readers[x] {
                push(self.gate_out[p.gate], &mut stack);
            }
            if let Some((s, d)) = extra {
                if s == x {
                    push(d, &mut stack);
                }
            }
            if seen[b] {
                return true;
            }
        }
        false
    }

    fn loop_check(
        &self,
        src: usize,
        at: Pin,
        extra: Option<(usize, usize)>,
    ) -> Result<(), LockError> {
        let g = self.gate_out[at.gate];
        if self.reaches(g, src, extra) {
            return Err(LockError::Loop {
                from: self.names[src].clone(),
                to: self.names[g].clone(),
            });
        }
        Ok(())
    }

    /// First open pin of gate `g` that reads `src`.
    fn pin_of(&self, src: usize, g: &str) -> Result<Pin, LockError> {
        let gid = self.id(g)?;
        let gate = self.driver[gid]
            .filter(|&gi| !self.key_mux[gi])
            .ok_or_else(|| LockError::Precondition(format!("{g} is not a lockable gate")))?;
        self.open_readers(src)
            .find(|p| p.gate == gate)
            .ok_or_else(|| {
                LockError::Precondition(format!("no unlocked wire {} -> {g}", self.names[src]))
            })
    }

    fn check_open(&self, src: usize, at: Pin) -> Result<(), LockError> {
        if self.key_mux[at.gate] || self.gate_in[at.gate][at.pin] != src {
            return Err(LockError::Precondition(format!(
                "wire {} -> {} is not open",
                self.names[src], self.names[self.gate_out[at.gate]]
            )));
        }
        Ok(())
    }

    fn alloc_key(&mut self) -> Result<(usize, usize, bool), LockError> {
        if self.keys_left() == 0 {
            return Err(LockError::KeysExhausted);
        }
        let index = self.key.len();
        let name = key_input_name(index);
        if self.ids.contains_key(&name) {
            return Err(LockError::Precondition(format!(
                "net {name} already exists"
            )));
        }
        let bit: bool = self.rng.random();
        let net = self.add_net(name.clone(), None);
        self.netlist.key_inputs.push(name);
        self.key.bits.push(bit);
        self.key.consumed.push(true);
        Ok((index, net, bit))
    }

    fn add_net(&mut self, name: String, driver: Option<usize>) -> usize {
        let id = self.names.len();
        self.ids.insert(name.clone(), id);
        self.names.push(name);
        self.driver.push(driver);
        self.readers.push(Vec::new());
        self.is_output.push(false);
        self.pair_guard.push(false);
        self.orig_fanout.push(0);
        id
    }

    fn mux_name(&mut self) -> String {
        loop {
            let name = format!("lockmux{}", self.mux_counter);
            self.mux_counter += 1;
            if !self.ids.contains_key(&name) {
                return name;
            }
        }
    }

    /// Insert `MUX(key, ..)` in front of `at`, which currently reads `t`.
    #[allow(clippy::too_many_arguments)]
    fn insert_mux(
        &mut self,
        strategy: Strategy,
        provenance: Provenance,
        (key_index, key_net, bit): (usize, usize, bool),
        t: usize,
        f: usize,
        at: Pin,
    ) {
        let (d0, d1) = if bit { (f, t) } else { (t, f) };
        let name = self.mux_name();
        let gi = self.gate_in.len();
        let out = self.add_net(name.clone(), Some(gi));
        self.gate_out.push(out);
        self.gate_in.push(vec![key_net, d0, d1]);
        self.key_mux.push(true);
        self.readers[key_net].push(Pin { gate: gi, pin: 0 });
        self.readers[d0].push(Pin { gate: gi, pin: 1 });
        self.readers[d1].push(Pin { gate: gi, pin: 2 });
        self.readers[t].retain(|p| *p != at);
        self.readers[out].push(at);
        self.gate_in[at.gate][at.pin] = out;
        self.netlist.gates.push(Gate::new(
            name.clone(),
            GateType::Mux,
            &[&self.names[key_net], &self.names[d0], &self.names[d1]],
        ));
        self.netlist.gates[at.gate].inputs[at.pin] = name.clone();
        self.records.push(LockRecord {
            key_index,
            strategy,
            group: self.groups,
            mux: name,
            gate: self.names[self.gate_out[at.gate]].clone(),
            pin: at.pin,
            true_src: self.names[t].clone(),
            false_src: self.names[f].clone(),
            key_value: bit,
            provenance,
        });
    }

    fn fanout_class(&self, strategy: Strategy, fi: usize, fj: usize) -> Result<(), LockError> {
        let multi = |v: usize| self.orig_fanout[v] >= 2;
        let ok = match strategy {
            Strategy::S1 | Strategy::S2 => multi(fi) && multi(fj),
            Strategy::S3 => multi(fi) && self.orig_fanout[fj] == 1,
            Strategy::S4 => true,
            Strategy::Naive => false,
        };
        if !ok {
            return Err(LockError::Precondition(format!(
                "{strategy}: fan-out of {} ({}) / {} ({}) does not fit",
                self.names[fi], self.orig_fanout[fi], self.names[fj], self.orig_fanout[fj]
            )));
        }
        Ok(())
    }

    /// Check and apply one strategy. `at_j` is required for `S1`/`S4` and,
    /// under the alternative `S3` placement, names the consumer of `f_j`.
    fn place(
        &mut self,
        strategy: Strategy,
        provenance: Provenance,
        fi: usize,
        fj: usize,
        at_i: Pin,
        at_j: Option<Pin>,
    ) -> Result<usize, LockError> {
        if fi == fj {
            return Err(LockError::Precondition("f_i and f_j coincide".into()));
        }
        if !self.is_original(fi) || !self.is_original(fj) {
            return Err(LockError::Precondition(
                "sources must be original nets".into(),
            ));
        }
        if strategy.key_cost() > self.keys_left() {
            return Err(LockError::KeysExhausted);
        }
        self.fanout_class(strategy, fi, fj)?;
        let alt_s3 =
            strategy == Strategy::S3 && self.s3_placement == S3Placement::SingleOutputConsumer;
        let two = matches!(strategy, Strategy::S1 | Strategy::S4);
        let at_j = if two || alt_s3 {
            Some(at_j.ok_or_else(|| {
                LockError::Precondition(format!("{strategy} needs a second output gate"))
            })?)
        } else {
            None
        };
        if alt_s3 {
            let at = at_j.unwrap();
            self.check_open(fj, at)?;
            self.loop_check(fi, at, None)?;
            let k = self.alloc_key()?;
            self.insert_mux(strategy, provenance, k, fj, fi, at);
            self.groups += 1;
            return Ok(1);
        }
        self.check_open(fi, at_i)?;
        if let Some(at_j) = at_j {
            self.check_open(fj, at_j)?;
            if at_j.gate == at_i.gate {
                return Err(LockError::Precondition(
                    "output gates must be distinct".into(),
                ));
            }
        }
        match strategy {
            Strategy::S1 => {
                for f in [fi, fj] {
                    if !self.guarded(f, 1) {
                        return Err(LockError::Float(self.names[f].clone()));
                    }
                }
            }
            Strategy::S2 | Strategy::S3 if !self.guarded(fi, 1) => {
                return Err(LockError::Float(self.names[fi].clone()));
            }
            _ => {}
        }
        self.loop_check(fj, at_i, None)?;
        if let Some(at_j) = at_j {
            let gi = self.gate_out[at_i.gate];
            self.loop_check(fi, at_j, Some((fj, gi)))?;
        }
        match strategy {
            Strategy::S1 => {
                let k1 = self.alloc_key()?;
                let k2 = self.alloc_key()?;
                self.insert_mux(strategy, provenance, k1, fi, fj, at_i);
                self.insert_mux(strategy, provenance, k2, fj, fi, at_j.unwrap());
            }
            Strategy::S4 => {
                let k = self.alloc_key()?;
                self.insert_mux(strategy, provenance, k, fi, fj, at_i);
                self.insert_mux(strategy, provenance, k, fj, fi, at_j.unwrap());
                self.pair_guard[fi] = true;
                self.pair_guard[fj] = true;
            }
            _ => {
                let k = self.alloc_key()?;
                self.insert_mux(strategy, provenance, k, fi, fj, at_i);
            }
        }
        self.groups += 1;
        Ok(strategy.key_cost())
    }

    fn apply_named(
        &mut self,
        strategy: Strategy,
        fi: &str,
        fj: &str,
        gi: &str,
        gj: Option<&str>,
    ) -> Result<Vec<LockRecord>, LockError> {
        let (fi, fj) = (self.id(fi)?, self.id(fj)?);
        let alt_s3 =
            strategy == Strategy::S3 && self.s3_placement == S3Placement::SingleOutputConsumer;
        let at_i = if alt_s3 {
            Pin { gate: 0, pin: 0 }
        } else {
            self.pin_of(fi, gi)?
        };
        let at_j = match (alt_s3, gj) {
            (true, _) => Some(self.pin_of(fj, gi)?),
            (false, Some(g)) => Some(self.pin_of(fj, g)?),
            (false, None) => None,
        };
        let before = self.records.len();
        self.place(strategy, Provenance::Random, fi, fj, at_i, at_j)?;
        Ok(self.records[before..].to_vec())
    }

    /// `S1` on wires `f_i -> g_i` and `f_j -> g_j`.
    pub fn apply_s1(
        &mut self,
        fi: &str,
        fj: &str,
        gi: &str,
        gj: &str,
    ) -> Result<Vec<LockRecord>, LockError> {
        self.apply_named(Strategy::S1, fi, fj, gi, Some(gj))
    }

    /// `S2` on wire `f_i -> g_i` with decoy `f_j`.
    pub fn apply_s2(&mut self, fi: &str, fj: &str, gi: &str) -> Result<Vec<LockRecord>, LockError> {
        self.apply_named(Strategy::S2, fi, fj, gi, None)
    }

    /// `S3` on wire `f_i -> g_i` with single-output decoy `f_j`. Under
    /// [`S3Placement::SingleOutputConsumer`] `g` is the consumer of `f_j`.
    pub fn apply_s3(&mut self, fi: &str, fj: &str, g: &str) -> Result<Vec<LockRecord>, LockError> {
        self.apply_named(Strategy::S3, fi, fj, g, None)
    }

    /// `S4` on wires `f_i -> g_i` and `f_j -> g_j`, sharing one key bit.
    pub fn apply_s4(
        &mut self,
        fi: &str,
        fj: &str,
        gi: &str,
        gj: &str,
    ) -> Result<Vec<LockRecord>, LockError> {
        self.apply_named(Strategy::S4, fi, fj, gi, Some(gj))
    }

    fn random_pin(&mut self, net: usize) -> Option<Pin> {
        let open: Vec<Pin> = self.open_readers(net).collect();
        if open.is_empty() {
            None
        } else {
            Some(open[self.rng.random_range(0..open.len())])
        }
    }

    /// Try `strategy` on sources `(fi, fj)` with randomly chosen output gates.
    fn try_random_gates(
        &mut self,
        strategy: Strategy,
        provenance: Provenance,
        fi: usize,
        fj: usize,
    ) -> bool {
        let alt_s3 =
            strategy == Strategy::S3 && self.s3_placement == S3Placement::SingleOutputConsumer;
        let at_i = if alt_s3 {
            Some(Pin { gate: 0, pin: 0 })
        } else {
            self.random_pin(fi)
        };
        let Some(at_i) = at_i else { return false };
        let at_j = if matches!(strategy, Strategy::S1 | Strategy::S4) || alt_s3 {
            match self.random_pin(fj) {
                Some(p) => Some(p),
                None => return false,
            }
        } else {
            None
        };
        self.place(strategy, provenance, fi, fj, at_i, at_j).is_ok()
    }

    fn lockable_nodes(&self) -> Vec<usize> {
        (0..self.original_nets)
            .filter(|&v| self.open_readers(v).next().is_some())
            .collect()
    }

    fn usable(&self, strategy: Strategy) -> bool {
        strategy.key_cost() <= self.keys_left()
    }

    /// Source pools `(first, second)` for `strategy` drawn from `nodes`.
    fn pools(&self, strategy: Strategy, nodes: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let multi: Vec<usize> = nodes
            .iter()
            .copied()
            .filter(|&v| self.orig_fanout[v] >= 2)
            .collect();
        let single: Vec<usize> = nodes
            .iter()
            .copied()
            .filter(|&v| self.orig_fanout[v] == 1)
            .collect();
        match strategy {
            Strategy::S1 | Strategy::S2 => (multi.clone(), multi),
            Strategy::S3 => (multi, single),
            _ => (nodes.to_vec(), nodes.to_vec()),
        }
    }

    /// Random D-MUX insertion until the key is used up.
    pub fn dmux_fill(&mut self, strategies: &[Strategy]) -> Result<(), LockError> {
        while self.keys_left() > 0 {
            if !self.dmux_step(strategies) {
                return Err(LockError::Shortfall {
                    requested: self.budget,
                    inserted: self.key.len(),
                });
            }
        }
        Ok(())
    }

    fn dmux_step(&mut self, strategies: &[Strategy]) -> bool {
        let nodes = self.lockable_nodes();
        let usable: Vec<Strategy> = strategies
            .iter()
            .copied()
            .filter(|&s| self.usable(s))
            .collect();
        if usable.is_empty() || nodes.len() < 2 {
            return false;
        }
        let pools: Vec<_> = usable.iter().map(|&s| self.pools(s, &nodes)).collect();
        for _ in 0..RANDOM_ATTEMPTS {
            let k = self.rng.random_range(0..usable.len());
            let (a, b) = &pools[k];
            if a.is_empty() || b.is_empty() {
                continue;
            }
            let fi = a[self.rng.random_range(0..a.len())];
            let fj = b[self.rng.random_range(0..b.len())];
            if self.try_random_gates(usable[k], Provenance::Random, fi, fj) {
                return true;
            }
        }
        for (k, &s) in usable.iter().enumerate() {
            let (a, b) = &pools[k];
            for &fi in a {
                for &fj in b {
                    if fi != fj && self.scan_gates(s, fi, fj) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Every output-gate choice for `(fi, fj)` in order.
    fn scan_gates(&mut self, strategy: Strategy, fi: usize, fj: usize) -> bool {
        let alt_s3 =
            strategy == Strategy::S3 && self.s3_placement == S3Placement::SingleOutputConsumer;
        let two = matches!(strategy, Strategy::S1 | Strategy::S4) || alt_s3;
        let first: Vec<Pin> = if alt_s3 {
            vec![Pin { gate: 0, pin: 0 }]
        } else {
            self.open_readers(fi).collect()
        };
        let second: Vec<Option<Pin>> = if two {
            self.open_readers(fj).map(Some).collect()
        } else {
            vec![None]
        };
        for &at_i in &first {
            for &at_j in &second {
                if self
                    .place(strategy, Provenance::Random, fi, fj, at_i, at_j)
                    .is_ok()
                {
                    return true;
                }
            }
        }
        false
    }

    /// Link-cluster phase: `S1` over multi-output-source links, then `S4`
    /// over single-output-source links, cluster by cluster.
    fn link_phase(&mut self, g: &CircuitGraph, clusters: &ClusterSet, strategies: &[Strategy]) {
        let links = g.links();
        for c in &clusters.clusters {
            if self.keys_left() == 0 {
                break;
            }
            let (mut em, mut es): (Vec<usize>, Vec<usize>) = c
                .members
                .iter()
                .copied()
                .partition(|&l| self.orig_fanout[links[l].src] >= 2);
            if strategies.contains(&Strategy::S1) {
                self.pair_links(g, &mut em, Strategy::S1);
            }
            if strategies.contains(&Strategy::S4) {
                self.pair_links(g, &mut es, Strategy::S4);
            }
        }
    }

    fn link_pin(&self, g: &CircuitGraph, l: usize) -> Option<(usize, Pin)> {
        let link = g.links()[l];
        let gate = self.driver[link.dst]?;
        let at = Pin {
            gate,
            pin: link.pin,
        };
        (!self.key_mux[gate] && self.gate_in[gate][link.pin] == link.src).then_some((link.src, at))
    }

    fn pair_links(&mut self, g: &CircuitGraph, set: &mut Vec<usize>, strategy: Strategy) {
        loop {
            set.retain(|&l| self.link_pin(g, l).is_some());
            if set.len() < 2 || !self.usable(strategy) {
                return;
            }
            let (fi, at_i) = self.link_pin(g, set[0]).unwrap();
            let mut done = None;
            for (k, &l) in set.iter().enumerate().skip(1) {
                let (fj, at_j) = self.link_pin(g, l).unwrap();
                if fi == fj || at_i.gate == at_j.gate {
                    continue;
                }
                if self
                    .place(strategy, Provenance::LinkCluster, fi, fj, at_i, Some(at_j))
                    .is_ok()
                {
                    done = Some(k);
                    break;
                }
            }
            match done {
                Some(k) => {
                    set.remove(k);
                    set.remove(0);
                }
                None => {
                    set.remove(0);
                }
            }
        }
    }

    /// Node-cluster phase.
    fn node_phase(&mut self, clusters: &ClusterSet, strategies: &[Strategy]) {
        for c in &clusters.clusters {
            while self.keys_left() > 0 {
                let nodes: Vec<usize> = c
                    .members
                    .iter()
                    .copied()
                    .filter(|&v| self.open_readers(v).next().is_some())
                    .collect();
                let fm = nodes.iter().filter(|&&v| self.orig_fanout[v] >= 2).count();
                let fs = nodes.len() - fm;
                if nodes.len() < 2 {
                    break;
                }
                let mut order = strategies.to_vec();
                order.shuffle(&mut self.rng);
                let mut placed = false;
                for s in order {
                    let applicable = match s {
                        Strategy::S1 => fm >= 2 && self.keys_left() >= 2,
                        Strategy::S2 => fm >= 2,
                        Strategy::S3 => fm >= 1 && fs >= 1,
                        Strategy::S4 => true,
                        Strategy::Naive => false,
                    };
                    if applicable && self.try_cluster_pairs(s, &nodes) {
                        placed = true;
                        break;
                    }
                }
                if !placed {
                    break;
                }
            }
            if self.keys_left() == 0 {
                break;
            }
        }
    }

    fn try_cluster_pairs(&mut self, strategy: Strategy, nodes: &[usize]) -> bool {
        let (a, b) = self.pools(strategy, nodes);
        let mut pairs: Vec<(usize, usize)> = a
            .iter()
            .flat_map(|&x| b.iter().map(move |&y| (x, y)))
            .filter(|(x, y)| x != y)
            .collect();
        pairs.shuffle(&mut self.rng);
        pairs
            .into_iter()
            .take(NODE_PAIR_TRIES)
            .any(|(fi, fj)| self.try_random_gates(strategy, Provenance::NodeCluster, fi, fj))
    }
}

/// Lock `n` with similarity-driven MUX insertion: paired links from one link
/// cluster first, then pairs of similar nodes, then random D-MUX insertion
/// for whatever key bits remain.
pub fn simll_lock(n: &Netlist, opts: &LockOptions) -> Result<LockedDesign, LockError> {
    opts.check()?;
    let mut lk = Locker::new(n, opts.key_size, opts.seed)?;
    lk.set_s3_placement(opts.s3_placement);
    let g = CircuitGraph::from_netlist(n);
    let nc = node_clusters(&g, opts.hops);
    let lc = link_clusters(&g, opts.hops);
    lk.link_phase(&g, &lc, &opts.strategies);
    lk.node_phase(&nc, &opts.strategies);
    lk.dmux_fill(&opts.strategies)?;
    Ok(lk.finish(Scheme::SimLL, opts.seed, opts.hops))
}

/// Random D-MUX locking over the whole netlist.
pub fn dmux_lock(n: &Netlist, opts: &LockOptions) -> Result<LockedDesign, LockError> {
    opts.check()?;
    let mut lk = Locker::new(n, opts.key_size, opts.seed)?;
    lk.set_s3_placement(opts.s3_placement);
    lk.dmux_fill(&opts.strategies)?;
    Ok(lk.finish(Scheme::DMux, opts.seed, 0))
}

/// MUX locking without rerouting: the decoy is an arbitrary net and the true
/// source keeps no other reader, so the wrong key leaves it floating.
pub fn naive_mux_lock(n: &Netlist, key_size: usize, seed: u64) -> Result<LockedDesign, LockError> {
    let mut lk = Locker::new(n, key_size, seed)?;
    let nets = lk.original_nets;
    while lk.keys_left() > 0 {
        let is_source = |lk: &Locker, v: usize| {
            v >= lk.num_inputs
                && !lk.is_output[v]
                && lk.orig_fanout[v] == 1
                && lk.readers[v].len() == 1
                && !lk.key_mux[lk.readers[v][0].gate]
        };
        let mut order: Vec<usize> = (0..nets).filter(|&v| is_source(&lk, v)).collect();
        let mut placed = false;
        order.shuffle(&mut lk.rng);
        'outer: for t in order {
            let at = lk.readers[t][0];
            let mut decoys: Vec<usize> = (0..nets)
                .filter(|&f| f != t && !is_source(&lk, f))
                .filter(|&f| lk.is_output[f] || lk.unconditional(f) >= 1)
                .collect();
            decoys.shuffle(&mut lk.rng);
            for f in decoys {
                if lk.loop_check(f, at, None).is_ok() {
                    let k = lk.alloc_key().expect("key budget checked");
                    lk.insert_mux(Strategy::Naive, Provenance::Random, k, t, f, at);
                    lk.groups += 1;
                    placed = true;
                    break 'outer;
                }
            }
        }
        if !placed {
            return Err(LockError::Shortfall {
                requested: key_size,
                inserted: lk.key.len(),
            });
        }
    }
    Ok(lk.finish(Scheme::Naive, seed, 0))
}

/// Replace every MUX whose select is an assigned key input by the data
/// input it selects. Key inputs stay in the interface.
pub fn collapse_key_muxes(n: &Netlist, assignment: &HashMap<String, bool>) -> Netlist {
    let mut alias: HashMap<&str, &str> = HashMap::new();
    for g in &n.gates {
        if g.kind == GateType::Mux {
            if let Some(&v) = assignment.get(&g.inputs[0]) {
                alias.insert(&g.output, &g.inputs[if v { 2 } else { 1 }]);
            }
        }
    }
    let resolve = |x: &str| {
        let mut x = x.to_string();
        while let Some(&y) = alias.get(x.as_str()) {
            x = y.to_string();
        }
        x
    };
    let outputs: HashSet<&str> = n.outputs.iter().map(String::as_str).collect();
    let mut out = Netlist {
        name: n.name.clone(),
        inputs: n.inputs.clone(),
        key_inputs: n.key_inputs.clone(),
        outputs: n.outputs.clone(),
        gates: Vec::with_capacity(n.gates.len()),
    };
    for g in &n.gates {
        if alias.contains_key(g.output.as_str()) {
            if outputs.contains(g.output.as_str()) {
                out.gates.push(Gate {
                    output: g.output.clone(),
                    kind: GateType::Buf,
                    inputs: vec![resolve(&g.output)],
                });
            }
            continue;
        }
        out.gates.push(Gate {
            output: g.output.clone(),
            kind: g.kind,
            inputs: g.inputs.iter().map(|i| resolve(i)).collect(),
        });
    }
    out
}

/// Assignment of every key input of `n` from a bit vector indexed by key
/// number.
pub fn key_assignment(n: &Netlist, bits: &[bool]) -> HashMap<String, bool> {
    n.key_inputs
        .iter()
        .filter_map(|k| Some((k.clone(), *bits.get(key_index(k)?)?)))
        .collect()
}
