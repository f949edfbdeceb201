// SPDX-License-Identifier: Apache-2.0

//! Attack and corruption metrics.
//!
//! * AC = correct bits / key bits × 100
//! * PC = (correct + undecided) / key bits × 100
//! * FC = fraction of patterns where any output differs from the oracle
//! * HD = mean number of differing output bits per pattern, also reported
//!   as a percentage of the output width

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::netlist::Netlist;
use crate::sim::{exhaustive_block, key_words, lane_mask, PatternSource, SimError, Simulator};

/// Pattern count used when nothing else is asked for.
pub const DEFAULT_PATTERNS: u64 = 200_000;
/// Number of X-resolution seeds averaged by default.
pub const DEFAULT_X_SEEDS: u64 = 10;
/// Random patterns used by [`equivalence_check`] above the exhaustive limit.
pub const EQUIVALENCE_PATTERNS: u64 = 10_240;
/// Largest input count checked exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KeyBit {
    Zero,
    One,
    X,
}

impl KeyBit {
    pub fn from_bool(b: bool) -> KeyBit {
        if b {
            KeyBit::One
        } else {
            KeyBit::Zero
        }
    }

    pub fn value(self) -> Option<bool> {
        match self {
            KeyBit::Zero => Some(false),
            KeyBit::One => Some(true),
            KeyBit::X => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            KeyBit::Zero => '0',
            KeyBit::One => '1',
            KeyBit::X => 'X',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KeyGuess(pub Vec<KeyBit>);

impl KeyGuess {
    pub fn all_x(len: usize) -> KeyGuess {
        KeyGuess(vec![KeyBit::X; len])
    }

    pub fn from_bits(bits: &[bool]) -> KeyGuess {
        KeyGuess(bits.iter().map(|&b| KeyBit::from_bool(b)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn undecided(&self) -> usize {
        self.0.iter().filter(|b| **b == KeyBit::X).count()
    }
}

impl fmt::Display for KeyGuess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{}", b.symbol())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("key length mismatch: guess has {guess} bits, key has {truth}")]
    KeyLength { guess: usize, truth: usize },
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Key accuracy and precision, in percent.
pub fn ac_pc(guess: &KeyGuess, truth: &[bool]) -> Result<(f64, f64), MetricsError> {
    if guess.len() != truth.len() {
        return Err(MetricsError::KeyLength {
            guess: guess.len(),
            truth: truth.len(),
        });
    }
    if truth.is_empty() {
        return Ok((100.0, 100.0));
    }
    let correct = guess
        .0
        .iter()
        .zip(truth)
        .filter(|(g, &t)| g.value() == Some(t))
        .count();
    let x = guess.undecided();
    let total = truth.len() as f64;
    Ok((
        correct as f64 / total * 100.0,
        (correct + x) as f64 / total * 100.0,
    ))
}

/// Replace every X with a uniform random bit drawn from `seed`.
pub fn resolve_x(guess: &KeyGuess, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    guess
        .0
        .iter()
        .map(|b| match b.value() {
            Some(v) => v,
            None => rng.random(),
        })
        .collect()
}

fn check_interface(oracle: &Netlist, locked: &Netlist) -> Result<(), SimError> {
    if !oracle.key_inputs.is_empty() {
        return Err(SimError::Interface(format!(
            "oracle {} has key inputs",
            oracle.name
        )));
    }
    if oracle.inputs != locked.inputs {
        return Err(SimError::Interface(
            "primary inputs differ between oracle and locked netlist".into(),
        ));
    }
    if oracle.outputs != locked.outputs {
        return Err(SimError::Interface(
            "primary outputs differ between oracle and locked netlist".into(),
        ));
    }
    Ok(())
}

/// Which patterns to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Patterns {
    /// `count` seeded random patterns.
    Random { count: u64, seed: u64 },
    /// Every input assignment.
    Exhaustive,
}

impl Patterns {
    pub fn random(count: u64, seed: u64) -> Self {
        Patterns::Random { count, seed }
    }

    fn count(&self, width: usize) -> u64 {
        match *self {
            Patterns::Random { count, .. } => count,
            Patterns::Exhaustive => 1u64 << width,
        }
    }

    fn block(&self, width: usize, b: u64) -> Vec<u64> {
        match *self {
            Patterns::Random { seed, .. } => PatternSource::new(seed, width).block(b),
            Patterns::Exhaustive => exhaustive_block(width, b),
        }
    }
}

/// Raw comparison counts between an oracle and a keyed locked netlist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Corruption {
    pub patterns: u64,
    /// Patterns with at least one differing output.
    pub erroneous: u64,
    /// Total differing output bits.
    pub differing_bits: u64,
    pub output_width: usize,
}

impl Corruption {
    pub fn fc(&self) -> f64 {
        if self.patterns == 0 {
            0.0
        } else {
            self.erroneous as f64 / self.patterns as f64
        }
    }

    pub fn hd_raw(&self) -> f64 {
        if self.patterns == 0 {
            0.0
        } else {
            self.differing_bits as f64 / self.patterns as f64
        }
    }

    pub fn hd_pct(&self) -> f64 {
        if self.output_width == 0 {
            0.0
        } else {
            self.hd_raw() / self.output_width as f64 * 100.0
        }
    }
}

/// Simulate both netlists over `patterns` and count mismatches.
pub fn compare(
    oracle: &Netlist,
    locked: &Netlist,
    key: &[bool],
    patterns: Patterns,
) -> Result<Corruption, SimError> {
    check_interface(oracle, locked)?;
    let reference = Simulator::new(oracle)?;
    let dut = Simulator::new(locked)?;
    if key.len() != dut.num_keys() {
        return Err(SimError::Width {
            what: "key",
            expected: dut.num_keys(),
            got: key.len(),
        });
    }
    let width = oracle.inputs.len();
    let keys = key_words(key);
    let total = patterns.count(width);
    let blocks = total.div_ceil(64);
    let (erroneous, differing_bits) = (0..blocks)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new(), Vec::new()),
            |(scratch, ro, lo), b| {
                let mask = lane_mask(total - b * 64);
                let inputs = patterns.block(width, b);
                reference.eval_block(&inputs, &[], scratch, ro).unwrap();
                dut.eval_block(&inputs, &keys, scratch, lo).unwrap();
                let mut any = 0u64;
                let mut bits = 0u64;
                for (r, l) in ro.iter().zip(lo.iter()) {
                    let d = (r ^ l) & mask;
                    any |= d;
                    bits += d.count_ones() as u64;
                }
                (any.count_ones() as u64, bits)
            },
        )
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(Corruption {
        patterns: total,
        erroneous,
        differing_bits,
        output_width: oracle.outputs.len(),
    })
}

pub fn fc(
    oracle: &Netlist,
    locked: &Netlist,
    key: &[bool],
    patterns: Patterns,
) -> Result<f64, SimError> {
    Ok(compare(oracle, locked, key, patterns)?.fc())
}

/// `(raw, percent)` Hamming distance.
pub fn hd(
    oracle: &Netlist,
    locked: &Netlist,
    key: &[bool],
    patterns: Patterns,
) -> Result<(f64, f64), SimError> {
    let c = compare(oracle, locked, key, patterns)?;
    Ok((c.hd_raw(), c.hd_pct()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Equivalent {
        patterns: u64,
        exhaustive: bool,
    },
    Counterexample {
        pattern: Vec<bool>,
        expected: Vec<bool>,
        got: Vec<bool>,
    },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent { .. })
    }
}

/// Simulation-based equivalence: exhaustive up to [`EXHAUSTIVE_LIMIT`]
/// inputs, otherwise [`EQUIVALENCE_PATTERNS`] random patterns from `seed`.
pub fn equivalence_check(
    oracle: &Netlist,
    locked: &Netlist,
    key: &[bool],
    seed: u64,
) -> Result<Verdict, SimError> {
    let width = oracle.inputs.len();
    let patterns = if width <= EXHAUSTIVE_LIMIT {
        Patterns::Exhaustive
    } else {
        Patterns::random(EQUIVALENCE_PATTERNS, seed)
    };
    equivalence_with(oracle, locked, key, patterns)
}

pub fn equivalence_with(
    oracle: &Netlist,
    locked: &Netlist,
    key: &[bool],
    patterns: Patterns,
) -> Result<Verdict, SimError> {
    check_interface(oracle, locked)?;
    let reference = Simulator::new(oracle)?;
    let dut = Simulator::new(locked)?;
    if key.len() != dut.num_keys() {
        return Err(SimError::Width {
            what: "key",
            expected: dut.num_keys(),
            got: key.len(),
        });
    }
    let width = oracle.inputs.len();
    let keys = key_words(key);
    let total = patterns.count(width);
    let (mut scratch, mut ro, mut lo) = (Vec::new(), Vec::new(), Vec::new());
    for b in 0..total.div_ceil(64) {
        let mask = lane_mask(total - b * 64);
        let inputs = patterns.block(width, b);
        reference.eval_block(&inputs, &[], &mut scratch, &mut ro)?;
        dut.eval_block(&inputs, &keys, &mut scratch, &mut lo)?;
        let diff = ro.iter().zip(&lo).fold(0u64, |acc, (r, l)| acc | (r ^ l)) & mask;
        if diff != 0 {
            let lane = diff.trailing_zeros();
            let bit = |w: &u64| (w >> lane) & 1 == 1;
            return Ok(Verdict::Counterexample {
                pattern: inputs.iter().map(bit).collect(),
                expected: ro.iter().map(bit).collect(),
                got: lo.iter().map(bit).collect(),
            });
        }
    }
    Ok(Verdict::Equivalent {
        patterns: total,
        exhaustive: matches!(patterns, Patterns::Exhaustive),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub ac: f64,
    pub pc: f64,
    pub fc: f64,
    pub hd_raw: f64,
    pub hd_pct: f64,
    pub key_bits: usize,
    pub undecided: usize,
    pub output_width: usize,
    pub patterns: u64,
    pub pattern_seed: u64,
    pub x_seeds: Vec<u64>,
}

impl MetricsReport {
    /// Line-oriented `key=value` form.
    pub fn to_kv(&self) -> String {
        let seeds: Vec<String> = self.x_seeds.iter().map(u64::to_string).collect();
        format!(
            "ac={:.4}\npc={:.4}\nfc={:.6}\nhd_raw={:.6}\nhd_pct={:.4}\nkey_bits={}\nundecided={}\n\
             output_width={}\npatterns={}\npattern_seed={}\nx_seeds={}\n",
            self.ac,
            self.pc,
            self.fc,
            self.hd_raw,
            self.hd_pct,
            self.key_bits,
            self.undecided,
            self.output_width,
            self.patterns,
            self.pattern_seed,
            seeds.join(",")
        )
    }

    pub fn to_table(&self) -> String {
        format!(
            "metric   value\n\
             AC       {:>8.2} %\n\
             PC       {:>8.2} %\n\
             FC       {:>8.4}\n\
             HD       {:>8.4} bits ({:.2} % of {} outputs)\n\
             key bits {:>8} ({} undecided)\n\
             patterns {:>8} (seed {}, {} X fills)\n",
            self.ac,
            self.pc,
            self.fc,
            self.hd_raw,
            self.hd_pct,
            self.output_width,
            self.key_bits,
            self.undecided,
            self.patterns,
            self.pattern_seed,
            self.x_seeds.len()
        )
    }
}

/// Full report for a guess against the true key. FC and HD are averaged over
/// `x_seeds` random fills of the undecided bits (a single fill when the
/// guess has none).
pub fn evaluate(
    oracle: &Netlist,
    locked: &Netlist,
    truth: &[bool],
    guess: &KeyGuess,
    pattern_count: u64,
    pattern_seed: u64,
    x_seeds: &[u64],
) -> Result<MetricsReport, MetricsError> {
    let (ac, pc) = ac_pc(guess, truth)?;
    let fills: Vec<u64> = if guess.undecided() == 0 || x_seeds.is_empty() {
        vec![x_seeds.first().copied().unwrap_or(0)]
    } else {
        x_seeds.to_vec()
    };
    let mut fc_sum = 0.0;
    let mut hd_sum = 0.0;
    let mut width = oracle.outputs.len();
    for &s in &fills {
        let key = resolve_x(guess, s);
        let c = compare(
            oracle,
            locked,
            &key,
            Patterns::random(pattern_count, pattern_seed),
        )?;
        fc_sum += c.fc();
        hd_sum += c.hd_raw();
        width = c.output_width;
    }
    let k = fills.len() as f64;
    let hd_raw = hd_sum / k;
    Ok(MetricsReport {
        ac,
        pc,
        fc: fc_sum / k,
        hd_raw,
        hd_pct: if width == 0 {
            0.0
        } else {
            hd_raw / width as f64 * 100.0
        },
        key_bits: truth.len(),
        undecided: guess.undecided(),
        output_width: width,
        patterns: pattern_count,
        pattern_seed,
        x_seeds: fills,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_bench;

    fn guess(s: &str) -> KeyGuess {
        KeyGuess(
            s.chars()
                .map(|c| match c {
                    '0' => KeyBit::Zero,
                    '1' => KeyBit::One,
                    _ => KeyBit::X,
                })
                .collect(),
        )
    }

    #[test]
    fn ac_pc_formulas() {
        let truth = vec![true; 64];
        let half: String = (0..64).map(|i| if i < 32 { '1' } else { '0' }).collect();
        assert_eq!(ac_pc(&guess(&half), &truth).unwrap(), (50.0, 50.0));
        assert_eq!(ac_pc(&KeyGuess::all_x(64), &truth).unwrap(), (0.0, 100.0));
        let mixed: String = (0..64)
            .map(|i| match i {
                0..=32 => '1',
                33..=52 => 'X',
                _ => '0',
            })
            .collect();
        assert_eq!(ac_pc(&guess(&mixed), &truth).unwrap(), (51.5625, 82.8125));
        assert!(ac_pc(&guess("01"), &truth).is_err());
    }

    #[test]
    fn resolve_x_behaviour() {
        let g = guess("0110");
        assert_eq!(resolve_x(&g, 5), vec![false, true, true, false]);
        let all = KeyGuess::all_x(64);
        assert_ne!(resolve_x(&all, 1), resolve_x(&all, 2));
        assert_eq!(resolve_x(&all, 1), resolve_x(&all, 1));
    }

    #[test]
    fn x_fill_is_fair() {
        let g = guess("1X0X");
        let ones = (0..1000).filter(|&s| resolve_x(&g, s)[1]).count();
        assert!((450..=550).contains(&ones), "{ones}");
    }

    const BUF: &str = "INPUT(a)\nOUTPUT(y)\ny = BUFF(a)\n";
    const INV: &str = "INPUT(a)\nOUTPUT(y)\ny = NOT(a)\n";

    #[test]
    fn inverted_output_is_fully_corrupt() {
        let o = parse_bench(BUF).unwrap();
        let l = parse_bench(INV).unwrap();
        let c = compare(&o, &l, &[], Patterns::random(1000, 3)).unwrap();
        assert_eq!(c.fc(), 1.0);
        assert_eq!(c.hd_raw(), 1.0);
        assert_eq!(c.hd_pct(), 100.0);
        assert_eq!(
            compare(&o, &o, &[], Patterns::Exhaustive).unwrap().fc(),
            0.0
        );
    }

    #[test]
    fn single_output_hd_equals_fc() {
        let o = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)\n").unwrap();
        let l = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = OR(a, b)\n").unwrap();
        let c = compare(&o, &l, &[], Patterns::random(5000, 9)).unwrap();
        assert_eq!(c.fc(), c.hd_raw());
        assert!((c.fc() - 0.5).abs() < 0.03);
        let exact = compare(&o, &l, &[], Patterns::Exhaustive).unwrap();
        assert_eq!((exact.patterns, exact.erroneous), (4, 2));
    }

    #[test]
    fn interface_mismatch() {
        let o = parse_bench(BUF).unwrap();
        let l = parse_bench("INPUT(b)\nOUTPUT(y)\ny = NOT(b)\n").unwrap();
        assert!(matches!(
            compare(&o, &l, &[], Patterns::Exhaustive),
            Err(SimError::Interface(_))
        ));
    }

    #[test]
    fn equivalence_and_counterexample() {
        let o = parse_bench(BUF).unwrap();
        let locked = parse_bench(
            "INPUT(a)\nINPUT(keyinput0)\nOUTPUT(y)\nn = NOT(a)\ny = MUX(keyinput0, a, n)\n",
        )
        .unwrap();
        assert!(equivalence_check(&o, &o, &[], 0).unwrap().is_equivalent());
        assert!(equivalence_check(&o, &locked, &[false], 0)
            .unwrap()
            .is_equivalent());
        match equivalence_check(&o, &locked, &[true], 0).unwrap() {
            Verdict::Counterexample {
                pattern,
                expected,
                got,
            } => {
                assert_eq!(pattern, vec![false]);
                assert_eq!(expected, vec![false]);
                assert_eq!(got, vec![true]);
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn report_for_correct_key() {
        let o = parse_bench(BUF).unwrap();
        let locked = parse_bench(
            "INPUT(a)\nINPUT(keyinput0)\nOUTPUT(y)\nn = NOT(a)\ny = MUX(keyinput0, a, n)\n",
        )
        .unwrap();
        let r = evaluate(&o, &locked, &[false], &guess("0"), 1000, 1, &[1, 2]).unwrap();
        assert_eq!(
            (r.ac, r.pc, r.fc, r.hd_raw, r.hd_pct),
            (100.0, 100.0, 0.0, 0.0, 0.0)
        );
        let r = evaluate(&o, &locked, &[false], &guess("X"), 1000, 1, &[1, 2, 3, 4]).unwrap();
        assert_eq!((r.ac, r.pc), (0.0, 100.0));
        assert!(r.to_kv().contains("x_seeds=1,2,3,4"));
    }
}
