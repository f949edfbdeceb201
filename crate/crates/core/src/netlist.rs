// SPDX-License-Identifier: Apache-2.0

//! Gate-level combinational netlists and the `.bench` text format.
//!
//! The dialect is ISCAS-85 `.bench` with two extensions: a 3-input `MUX`
//! primitive (`y = MUX(s, a, b)`, `s = 0` selects `a`) and key inputs, which
//! are ordinary `INPUT` lines whose net name is `keyinput<digits>`.
//!
//! A [`Netlist`] is plain data. [`Netlist::check`] enforces the hard
//! structural invariants (single driver, declared nets, arity, acyclicity) and
//! [`Netlist::validate`] reports every problem it finds, including floating
//! internal wires, as [`Diagnostics`].

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

/// Prefix that marks an `INPUT` as a key input.
pub const KEY_INPUT_PREFIX: &str = "keyinput";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateType {
    And,
    Nand,
    Or,
    Nor,
    Xor,
    Xnor,
    Not,
    Buf,
    Mux,
}

impl GateType {
    pub const ALL: [GateType; 9] = [
        GateType::And,
        GateType::Nand,
        GateType::Or,
        GateType::Nor,
        GateType::Xor,
        GateType::Xnor,
        GateType::Not,
        GateType::Buf,
        GateType::Mux,
    ];

    /// Canonical upper-case name, as written to `.bench` files.
    pub fn name(self) -> &'static str {
        match self {
            GateType::And => "AND",
            GateType::Nand => "NAND",
            GateType::Or => "OR",
            GateType::Nor => "NOR",
            GateType::Xor => "XOR",
            GateType::Xnor => "XNOR",
            GateType::Not => "NOT",
            GateType::Buf => "BUFF",
            GateType::Mux => "MUX",
        }
    }

    /// Case-insensitive lookup. Accepts both `BUF` and `BUFF`.
    pub fn from_name(name: &str) -> Option<GateType> {
        let upper = name.to_ascii_uppercase();
        Some(match upper.as_str() {
            "AND" => GateType::And,
            "NAND" => GateType::Nand,
            "OR" => GateType::Or,
            "NOR" => GateType::Nor,
            "XOR" => GateType::Xor,
            "XNOR" => GateType::Xnor,
            "NOT" | "INV" => GateType::Not,
            "BUF" | "BUFF" => GateType::Buf,
            "MUX" => GateType::Mux,
            _ => return None,
        })
    }

    pub fn arity_ok(self, n: usize) -> bool {
        match self {
            GateType::Mux => n == 3,
            GateType::Not | GateType::Buf => n == 1,
            _ => n >= 2,
        }
    }

    fn arity_text(self) -> &'static str {
        match self {
            GateType::Mux => "exactly 3",
            GateType::Not | GateType::Buf => "exactly 1",
            _ => "at least 2",
        }
    }

    /// Evaluate on 64 patterns at once. `MUX` takes `(select, data0, data1)`.
    #[inline]
    pub fn eval_words(self, ins: &[u64]) -> u64 {
        match self {
            GateType::And => ins.iter().fold(!0, |a, &b| a & b),
            GateType::Nand => !ins.iter().fold(!0, |a, &b| a & b),
            GateType::Or => ins.iter().fold(0, |a, &b| a | b),
            GateType::Nor => !ins.iter().fold(0, |a, &b| a | b),
            GateType::Xor => ins.iter().fold(0, |a, &b| a ^ b),
            GateType::Xnor => !ins.iter().fold(0, |a, &b| a ^ b),
            GateType::Not => !ins[0],
            GateType::Buf => ins[0],
            GateType::Mux => (!ins[0] & ins[1]) | (ins[0] & ins[2]),
        }
    }
}

impl fmt::Display for GateType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    pub output: String,
    pub kind: GateType,
    pub inputs: Vec<String>,
}

impl Gate {
    pub fn new(output: impl Into<String>, kind: GateType, inputs: &[&str]) -> Gate {
        Gate {
            output: output.into(),
            kind,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Netlist {
    pub name: String,
    pub inputs: Vec<String>,
    pub key_inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub gates: Vec<Gate>,
}

/// Parse the key index out of a `keyinput<digits>` name.
pub fn key_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix(KEY_INPUT_PREFIX)?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

pub fn key_input_name(index: usize) -> String {
    format!("{KEY_INPUT_PREFIX}{index}")
}

fn at(line: &Option<usize>) -> String {
    match line {
        Some(l) => format!("line {l}: "),
        None => String::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetlistError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error(
        "line {line}: sequential element {kind} is not supported (combinational netlists only)"
    )]
    Sequential { line: usize, kind: String },
    #[error("{}duplicate driver for net {net}", at(.line))]
    DuplicateDriver { net: String, line: Option<usize> },
    #[error("{}undefined net {net}", at(.line))]
    UndefinedNet { net: String, line: Option<usize> },
    #[error("{}gate {net}: {kind} takes {expected} inputs, got {got}", at(.line))]
    Arity {
        net: String,
        kind: GateType,
        expected: &'static str,
        got: usize,
        line: Option<usize>,
    },
    #[error("{}net {net} is declared both as a primary input and as a key input", at(.line))]
    KeyInputOverlap { net: String, line: Option<usize> },
    #[error("{}duplicate output {net}", at(.line))]
    DuplicateOutput { net: String, line: Option<usize> },
    #[error("combinational cycle through {}", .nodes.join(" -> "))]
    Cycle { nodes: Vec<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    FloatingWire,
    Cycle,
    Arity,
    UndefinedNet,
    DuplicateDriver,
    KeyInputOverlap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    pub message: String,
    /// Net (or gate output) the diagnostic is attached to.
    pub location: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev}: {} ({})", self.message, self.location)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl Diagnostics {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter()
    }

    pub fn of_kind(&self, kind: DiagnosticKind) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter().filter(move |d| d.kind == kind)
    }

    /// Nets reported as floating internal wires.
    pub fn floating_wires(&self) -> Vec<&str> {
        self.of_kind(DiagnosticKind::FloatingWire)
            .map(|d| d.location.as_str())
            .collect()
    }
}

/// How MUX gates are written out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MuxStyle {
    /// `y = MUX(s, a, b)`
    #[default]
    Primitive,
    /// Expanded into `NOT`/`AND`/`OR` with fresh net names.
    Decomposed,
}

impl Netlist {
    pub fn new(name: impl Into<String>) -> Netlist {
        Netlist {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn num_nets(&self) -> usize {
        self.inputs.len() + self.key_inputs.len() + self.gates.len()
    }

    pub fn has_net(&self, name: &str) -> bool {
        self.inputs.iter().any(|n| n == name)
            || self.key_inputs.iter().any(|n| n == name)
            || self.gates.iter().any(|g| g.output == name)
    }

    /// Position of each gate keyed by its output net.
    pub fn gate_index(&self) -> HashMap<&str, usize> {
        self.gates
            .iter()
            .enumerate()
            .map(|(i, g)| (g.output.as_str(), i))
            .collect()
    }

    pub fn gate(&self, output: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.output == output)
    }

    /// Number of gate input pins reading each net (primary outputs not counted).
    pub fn fanout_counts(&self) -> HashMap<&str, usize> {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for g in &self.gates {
            for i in &g.inputs {
                *counts.entry(i.as_str()).or_default() += 1;
            }
        }
        counts
    }

    pub fn mux_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| g.kind == GateType::Mux)
            .count()
    }

    /// Enforce the hard invariants: unique drivers, declared nets, arity,
    /// disjoint input/key sets and acyclicity.
    pub fn check(&self) -> Result<(), NetlistError> {
        let mut drivers: HashSet<&str> = HashSet::new();
        let inputs: HashSet<&str> = self.inputs.iter().map(String::as_str).collect();
        for k in &self.key_inputs {
            if inputs.contains(k.as_str()) {
                return Err(NetlistError::KeyInputOverlap {
                    net: k.clone(),
                    line: None,
                });
            }
        }
        for net in self
            .inputs
            .iter()
            .chain(&self.key_inputs)
            .chain(self.gates.iter().map(|g| &g.output))
        {
            if !drivers.insert(net) {
                return Err(NetlistError::DuplicateDriver {
                    net: net.clone(),
                    line: None,
                });
            }
        }
        for g in &self.gates {
            if !g.kind.arity_ok(g.inputs.len()) {
                return Err(NetlistError::Arity {
                    net: g.output.clone(),
                    kind: g.kind,
                    expected: g.kind.arity_text(),
                    got: g.inputs.len(),
                    line: None,
                });
            }
            for i in &g.inputs {
                if !drivers.contains(i.as_str()) {
                    return Err(NetlistError::UndefinedNet {
                        net: i.clone(),
                        line: None,
                    });
                }
            }
        }
        let mut seen = HashSet::new();
        for o in &self.outputs {
            if !drivers.contains(o.as_str()) {
                return Err(NetlistError::UndefinedNet {
                    net: o.clone(),
                    line: None,
                });
            }
            if !seen.insert(o.as_str()) {
                return Err(NetlistError::DuplicateOutput {
                    net: o.clone(),
                    line: None,
                });
            }
        }
        if let Some(cycle) = self.cycles().into_iter().next() {
            return Err(NetlistError::Cycle { nodes: cycle });
        }
        Ok(())
    }

    /// Gate indices in topological order (every gate after all gates driving
    /// its inputs). Fails on a cycle.
    pub fn topo_order(&self) -> Result<Vec<usize>, NetlistError> {
        let index = self.gate_index();
        let mut indegree = vec![0usize; self.gates.len()];
        let mut readers: Vec<Vec<usize>> = vec![Vec::new(); self.gates.len()];
        for (gi, g) in self.gates.iter().enumerate() {
            for i in &g.inputs {
                if let Some(&src) = index.get(i.as_str()) {
                    indegree[gi] += 1;
                    readers[src].push(gi);
                }
            }
        }
        let mut order = Vec::with_capacity(self.gates.len());
        let mut stack: Vec<usize> = (0..self.gates.len())
            .rev()
            .filter(|&g| indegree[g] == 0)
            .collect();
        while let Some(g) = stack.pop() {
            order.push(g);
            for &r in readers[g].iter().rev() {
                indegree[r] -= 1;
                if indegree[r] == 0 {
                    stack.push(r);
                }
            }
        }
        if order.len() != self.gates.len() {
            let cycle = self.cycles().into_iter().next().unwrap_or_default();
            return Err(NetlistError::Cycle { nodes: cycle });
        }
        Ok(order)
    }

    /// Strongly connected components of the gate graph that form cycles,
    /// each listed by gate output name in file order.
    pub fn cycles(&self) -> Vec<Vec<String>> {
        let index = self.gate_index();
        let succ: Vec<Vec<usize>> = {
            let mut s = vec![Vec::new(); self.gates.len()];
            for (gi, g) in self.gates.iter().enumerate() {
                for i in &g.inputs {
                    if let Some(&src) = index.get(i.as_str()) {
                        s[src].push(gi);
                    }
                }
            }
            s
        };
        tarjan_scc(&succ)
            .into_iter()
            .filter(|comp| comp.len() > 1 || succ[comp[0]].contains(&comp[0]))
            .map(|mut comp| {
                comp.sort_unstable();
                comp.into_iter()
                    .map(|g| self.gates[g].output.clone())
                    .collect()
            })
            .collect()
    }

    /// Report every structural problem, including floating internal wires
    /// (gate outputs that nothing reads and that are not primary outputs).
    /// Unread primary or key inputs are not reported.
    pub fn validate(&self) -> Diagnostics {
        let mut diags = Vec::new();
        let mut push = |kind, message: String, location: &str| {
            diags.push(Diagnostic {
                severity: Severity::Error,
                kind,
                message,
                location: location.to_string(),
            })
        };

        let mut driven: HashMap<&str, usize> = HashMap::new();
        let inputs: HashSet<&str> = self.inputs.iter().map(String::as_str).collect();
        for k in &self.key_inputs {
            if inputs.contains(k.as_str()) {
                push(
                    DiagnosticKind::KeyInputOverlap,
                    format!("net {k} is both a primary input and a key input"),
                    k,
                );
            }
        }
        for net in self
            .inputs
            .iter()
            .chain(&self.key_inputs)
            .chain(self.gates.iter().map(|g| &g.output))
        {
            *driven.entry(net).or_default() += 1;
        }
        let mut reported = HashSet::new();
        for net in self
            .inputs
            .iter()
            .chain(&self.key_inputs)
            .chain(self.gates.iter().map(|g| &g.output))
        {
            if driven[net.as_str()] > 1 && reported.insert(net.as_str()) {
                push(
                    DiagnosticKind::DuplicateDriver,
                    format!("net {net} has {} drivers", driven[net.as_str()]),
                    net,
                );
            }
        }

        let mut read: HashSet<&str> = HashSet::new();
        for g in &self.gates {
            if !g.kind.arity_ok(g.inputs.len()) {
                push(
                    DiagnosticKind::Arity,
                    format!(
                        "{} takes {} inputs, got {}",
                        g.kind,
                        g.kind.arity_text(),
                        g.inputs.len()
                    ),
                    &g.output,
                );
            }
            for i in &g.inputs {
                read.insert(i);
                if !driven.contains_key(i.as_str()) {
                    push(
                        DiagnosticKind::UndefinedNet,
                        format!("gate {} reads undefined net {i}", g.output),
                        i,
                    );
                }
            }
        }
        for o in &self.outputs {
            read.insert(o);
            if !driven.contains_key(o.as_str()) {
                push(
                    DiagnosticKind::UndefinedNet,
                    format!("primary output {o} is undefined"),
                    o,
                );
            }
        }
        for g in &self.gates {
            if !read.contains(g.output.as_str()) {
                push(
                    DiagnosticKind::FloatingWire,
                    format!("floating internal wire {}", g.output),
                    &g.output,
                );
            }
        }
        for cycle in self.cycles() {
            let location = cycle[0].clone();
            push(
                DiagnosticKind::Cycle,
                format!("combinational cycle through {}", cycle.join(", ")),
                &location,
            );
        }
        Diagnostics(diags)
    }

    /// A net name not used in this netlist, derived from `base`.
    pub fn fresh_name(&self, base: &str, taken: &HashSet<String>) -> String {
        if !taken.contains(base) {
            return base.to_string();
        }
        (0..)
            .map(|i| format!("{base}_{i}"))
            .find(|n| !taken.contains(n))
            .unwrap()
    }

    pub fn net_names(&self) -> HashSet<String> {
        self.inputs
            .iter()
            .chain(&self.key_inputs)
            .chain(self.gates.iter().map(|g| &g.output))
            .cloned()
            .collect()
    }
}

/// Iterative Tarjan SCC over an adjacency list.
fn tarjan_scc(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut child)) = work.last_mut() {
            if *child < succ[v].len() {
                let w = succ[v][*child];
                *child += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(parent, _)) = work.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

fn is_net_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | ',' | '=' | '#')
}

fn parse_name(s: &str, line: usize) -> Result<String, NetlistError> {
    let s = s.trim();
    if s.is_empty() || !s.chars().all(is_net_char) {
        return Err(NetlistError::Syntax {
            line,
            message: format!("invalid net name {s:?}"),
        });
    }
    Ok(s.to_string())
}

/// Split `HEAD(args)` into `HEAD` and the comma-separated args.
fn parse_call(s: &str, line: usize) -> Result<(&str, Vec<&str>), NetlistError> {
    let syntax = |message: &str| NetlistError::Syntax {
        line,
        message: message.to_string(),
    };
    let open = s.find('(').ok_or_else(|| syntax("expected '('"))?;
    let rest = &s[open + 1..];
    let close = rest.rfind(')').ok_or_else(|| syntax("expected ')'"))?;
    if !rest[close + 1..].trim().is_empty() {
        return Err(syntax("unexpected text after ')'"));
    }
    let head = s[..open].trim();
    let body = rest[..close].trim();
    let args = if body.is_empty() {
        Vec::new()
    } else {
        body.split(',').map(str::trim).collect()
    };
    Ok((head, args))
}

/// Parse `.bench` text. The netlist name is taken from a leading `# name`
/// comment line when present, otherwise it is `top`.
pub fn parse_bench(text: &str) -> Result<Netlist, NetlistError> {
    let mut n = Netlist::new("top");
    let mut named = false;
    let mut seen_statement = false;
    let mut lines: HashMap<String, usize> = HashMap::new();
    let mut input_lines = Vec::new();
    let mut output_lines = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let (body, comment) = match raw.find('#') {
            Some(p) => (&raw[..p], Some(&raw[p + 1..])),
            None => (raw, None),
        };
        let body = body.trim();
        if body.is_empty() {
            if let (Some(c), false, false) = (comment, seen_statement, named) {
                if let Some(first) = c.split_whitespace().next() {
                    n.name = first.to_string();
                    named = true;
                }
            }
            continue;
        }
        seen_statement = true;
        if let Some(eq) = body.find('=') {
            let lhs = parse_name(&body[..eq], line)?;
            let (head, args) = parse_call(&body[eq + 1..], line)?;
            let kind = match GateType::from_name(head) {
                Some(k) => k,
                None if head.eq_ignore_ascii_case("DFF") || head.eq_ignore_ascii_case("LATCH") => {
                    return Err(NetlistError::Sequential {
                        line,
                        kind: head.to_ascii_uppercase(),
                    })
                }
                None => {
                    return Err(NetlistError::Syntax {
                        line,
                        message: format!("unknown gate type {head:?}"),
                    })
                }
            };
            let inputs = args
                .into_iter()
                .map(|a| parse_name(a, line))
                .collect::<Result<Vec<_>, _>>()?;
            if !kind.arity_ok(inputs.len()) {
                return Err(NetlistError::Arity {
                    net: lhs,
                    kind,
                    expected: kind.arity_text(),
                    got: inputs.len(),
                    line: Some(line),
                });
            }
            if lines.insert(lhs.clone(), line).is_some() {
                return Err(NetlistError::DuplicateDriver {
                    net: lhs,
                    line: Some(line),
                });
            }
            n.gates.push(Gate {
                output: lhs,
                kind,
                inputs,
            });
        } else {
            let (head, args) = parse_call(body, line)?;
            if args.len() != 1 {
                return Err(NetlistError::Syntax {
                    line,
                    message: format!("{head} takes exactly one net"),
                });
            }
            let net = parse_name(args[0], line)?;
            if head.eq_ignore_ascii_case("INPUT") {
                if lines.insert(net.clone(), line).is_some() {
                    return Err(NetlistError::DuplicateDriver {
                        net,
                        line: Some(line),
                    });
                }
                input_lines.push(line);
                if key_index(&net).is_some() {
                    n.key_inputs.push(net);
                } else {
                    n.inputs.push(net);
                }
            } else if head.eq_ignore_ascii_case("OUTPUT") {
                if n.outputs.contains(&net) {
                    return Err(NetlistError::DuplicateOutput {
                        net,
                        line: Some(line),
                    });
                }
                output_lines.push((net.clone(), line));
                n.outputs.push(net);
            } else {
                return Err(NetlistError::Syntax {
                    line,
                    message: format!("expected INPUT, OUTPUT or an assignment, found {head:?}"),
                });
            }
        }
    }

    for g in &n.gates {
        for i in &g.inputs {
            if !lines.contains_key(i) {
                return Err(NetlistError::UndefinedNet {
                    net: i.clone(),
                    line: lines.get(&g.output).copied(),
                });
            }
        }
    }
    for (o, line) in &output_lines {
        if !lines.contains_key(o) {
            return Err(NetlistError::UndefinedNet {
                net: o.clone(),
                line: Some(*line),
            });
        }
    }
    if let Some(cycle) = n.cycles().into_iter().next() {
        return Err(NetlistError::Cycle { nodes: cycle });
    }
    Ok(n)
}

/// Emit `.bench` text. Inputs come first, then key inputs, outputs and gates
/// in netlist order.
pub fn write_bench(n: &Netlist, style: MuxStyle) -> String {
    use std::fmt::Write;

    let mut s = String::new();
    writeln!(s, "# {}", n.name).unwrap();
    writeln!(
        s,
        "# {} inputs, {} key inputs, {} outputs, {} gates",
        n.inputs.len(),
        n.key_inputs.len(),
        n.outputs.len(),
        n.gates.len()
    )
    .unwrap();
    s.push('\n');
    for i in n.inputs.iter().chain(&n.key_inputs) {
        writeln!(s, "INPUT({i})").unwrap();
    }
    s.push('\n');
    for o in &n.outputs {
        writeln!(s, "OUTPUT({o})").unwrap();
    }
    s.push('\n');

    let mut taken = n.net_names();
    for g in &n.gates {
        if g.kind == GateType::Mux && style == MuxStyle::Decomposed {
            let (sel, a, b) = (&g.inputs[0], &g.inputs[1], &g.inputs[2]);
            let mut fresh = |suffix: &str| {
                let name = n.fresh_name(&format!("{}_{suffix}", g.output), &taken);
                taken.insert(name.clone());
                name
            };
            let t0 = fresh("mux_ns");
            let t1 = fresh("mux_d0");
            let t2 = fresh("mux_d1");
            writeln!(s, "{t0} = NOT({sel})").unwrap();
            writeln!(s, "{t1} = AND({t0}, {a})").unwrap();
            writeln!(s, "{t2} = AND({sel}, {b})").unwrap();
            writeln!(s, "{} = OR({t1}, {t2})", g.output).unwrap();
        } else {
            writeln!(s, "{} = {}({})", g.output, g.kind, g.inputs.join(", ")).unwrap();
        }
    }
    s
}
