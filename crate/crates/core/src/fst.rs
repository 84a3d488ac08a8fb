//! Complete pure sequential finite-state transducers over `{0,1}`.
//!
//! Every machine here is total: each state has exactly one successor and
//! one (possibly empty) output word per input bit, so the realized
//! function is defined on all of `{0,1}*` and preserves prefixes. Machines
//! never reject; feeding input that is not a well-formed stream simply
//! produces whatever the transitions say, and the bit-exact verifier in
//! [`crate::stream`] is the soundness gate for every synthesized machine.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::weight::Weight;

/// A single input bit, stored as 0u8 or 1u8.
pub type Bit = u8;

pub fn bits_from_str(s: &str) -> Result<Vec<Bit>, FstError> {
    s.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(FstError::BadBit(other)),
        })
        .collect()
}

pub fn bits_to_string(bits: &[Bit]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FstError {
    #[error("bit words may only contain '0' and '1', found {0:?}")]
    BadBit(char),
    #[error("scale parameter must be at least 1")]
    InvalidParam,
    #[error("weight machine needs integer entries, got {0}")]
    NonIntegerEntries(String),
    #[error("weight machine needs nonnegative entries, got {0}")]
    NegativeEntries(String),
    #[error("weight entry {0} is too large to emit as a block")]
    EntryTooLarge(String),
    #[error("machine description is invalid: {0}")]
    BadDescription(String),
}

#[derive(Clone, PartialEq, Eq)]
struct Step {
    next: usize,
    out: Vec<Bit>,
}

/// Complete deterministic transducer: for every state and input bit,
/// exactly one successor state and one output word.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FstJson", into = "FstJson")]
pub struct Fst {
    names: Vec<String>,
    initial: usize,
    /// steps[2*q + bit]
    steps: Vec<Step>,
}

pub struct FstBuilder {
    names: Vec<String>,
    index: HashMap<String, usize>,
    steps: Vec<Option<Step>>,
}

impl FstBuilder {
    pub fn new() -> Self {
        FstBuilder {
            names: Vec::new(),
            index: HashMap::new(),
            steps: Vec::new(),
        }
    }

    pub fn state(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), i);
        self.steps.push(None);
        self.steps.push(None);
        i
    }

    pub fn transition(&mut self, from: usize, input: Bit, to: usize, out: &[Bit]) -> &mut Self {
        self.steps[2 * from + input as usize] = Some(Step {
            next: to,
            out: out.to_vec(),
        });
        self
    }

    pub fn build(self, initial: usize) -> Fst {
        let steps: Vec<Step> = self
            .steps
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                s.unwrap_or_else(|| {
                    panic!("incomplete machine: state {} missing bit {}", i / 2, i % 2)
                })
            })
            .collect();
        Fst {
            names: self.names,
            initial,
            steps,
        }
    }
}

impl Default for FstBuilder {
    fn default() -> Self {
        FstBuilder::new()
    }
}

impl Fst {
    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn initial_name(&self) -> &str {
        &self.names[self.initial]
    }

    /// Run the machine on a finite word from the initial state.
    pub fn run(&self, input: &[Bit]) -> Vec<Bit> {
        let mut cursor = self.cursor();
        let mut out = Vec::new();
        cursor.feed(input, &mut out);
        out
    }

    pub fn cursor(&self) -> FstCursor<'_> {
        FstCursor {
            fst: self,
            state: self.initial,
        }
    }

    /// The single-state copy machine.
    pub fn identity() -> Fst {
        let mut b = FstBuilder::new();
        let q = b.state("q0");
        b.transition(q, 0, q, &[0]);
        b.transition(q, 1, q, &[1]);
        b.build(q)
    }

    /// Each 0 becomes a zeros: block lengths are multiplied by a.
    pub fn scale_up(a: usize) -> Result<Fst, FstError> {
        if a == 0 {
            return Err(FstError::InvalidParam);
        }
        let mut b = FstBuilder::new();
        let q = b.state("q0");
        b.transition(q, 0, q, &vec![0; a]);
        b.transition(q, 1, q, &[1]);
        Ok(b.build(q))
    }

    /// One 0 out per a zeros in: inverse of scale_up on streams whose
    /// block lengths are all divisible by a. A '1' resets the counter.
    pub fn scale_down(a: usize) -> Result<Fst, FstError> {
        if a == 0 {
            return Err(FstError::InvalidParam);
        }
        let mut b = FstBuilder::new();
        let states: Vec<usize> = (0..a).map(|j| b.state(&format!("c{j}"))).collect();
        for j in 0..a {
            if j + 1 == a {
                b.transition(states[j], 0, states[0], &[0]);
            } else {
                b.transition(states[j], 0, states[j + 1], &[]);
            }
            b.transition(states[j], 1, states[0], &[1]);
        }
        Ok(b.build(states[0]))
    }

    /// Swallows the first k blocks (each a '1' plus its run of zeros) and
    /// copies everything after.
    pub fn drop_blocks(k: usize) -> Fst {
        if k == 0 {
            return Fst::identity();
        }
        let mut b = FstBuilder::new();
        let seen: Vec<usize> = (0..=k).map(|j| b.state(&format!("d{j}"))).collect();
        let copy = b.state("copy");
        for j in 0..=k {
            b.transition(seen[j], 0, seen[j], &[]);
            if j < k {
                b.transition(seen[j], 1, seen[j + 1], &[]);
            } else {
                b.transition(seen[j], 1, copy, &[1]);
            }
        }
        b.transition(copy, 0, copy, &[0]);
        b.transition(copy, 1, copy, &[1]);
        b.build(seen[0])
    }

    /// Emits u in front of the copied input. The prefix is attached to the
    /// first input bit, so it only appears when the input is nonempty.
    pub fn prepend(u: &[Bit]) -> Fst {
        let mut b = FstBuilder::new();
        let pre = b.state("pre");
        let copy = b.state("copy");
        let with = |tail: Bit| {
            let mut w = u.to_vec();
            w.push(tail);
            w
        };
        b.transition(pre, 0, copy, &with(0));
        b.transition(pre, 1, copy, &with(1));
        b.transition(copy, 0, copy, &[0]);
        b.transition(copy, 1, copy, &[1]);
        b.build(pre)
    }

    /// Each '1' becomes '1' followed by a zeros: adds a to every block.
    pub fn add_const(a: usize) -> Fst {
        let mut b = FstBuilder::new();
        let q = b.state("q0");
        let mut out = vec![1];
        out.extend(std::iter::repeat_n(0, a));
        b.transition(q, 1, q, &out);
        b.transition(q, 0, q, &[0]);
        b.build(q)
    }

    /// After each '1', swallows a zeros: subtracts a from every block.
    /// Blocks shorter than a simply run out of zeros to give.
    pub fn remove_const(a: usize) -> Fst {
        if a == 0 {
            return Fst::identity();
        }
        let mut b = FstBuilder::new();
        let copy = b.state("q0");
        let owe: Vec<usize> = (1..=a).map(|j| b.state(&format!("owe{j}"))).collect();
        b.transition(copy, 0, copy, &[0]);
        b.transition(copy, 1, owe[a - 1], &[1]);
        for j in 1..=a {
            let st = owe[j - 1];
            let next = if j == 1 { copy } else { owe[j - 2] };
            b.transition(st, 0, next, &[]);
            b.transition(st, 1, owe[a - 1], &[1]);
        }
        b.build(copy)
    }

    /// The block-phase machine realizing an integral weight at stream
    /// level: skips `skip` leading blocks, then cycles through the
    /// weight's k entry phases. The '1' opening phase 0 emits `1 0^b`,
    /// the '1's opening other phases emit nothing, and each '0' inside
    /// phase i emits `0^{a_i}`. Consequently it maps the stream of any f
    /// (shifted by skip) to the stream of the weight's product with it.
    pub fn from_weight(alpha: &Weight, skip: usize) -> Result<Fst, FstError> {
        let (entries, constant) = alpha
            .integer_parts()
            .ok_or_else(|| FstError::NonIntegerEntries(alpha.to_string()))?;
        let to_len = |v: &BigInt| -> Result<usize, FstError> {
            if v.sign() == num_bigint::Sign::Minus {
                return Err(FstError::NegativeEntries(alpha.to_string()));
            }
            v.to_usize().ok_or_else(|| FstError::EntryTooLarge(v.to_string()))
        };
        let entry_lens: Vec<usize> = entries.iter().map(&to_len).collect::<Result<_, _>>()?;
        let const_len = to_len(&constant)?;
        let k = entry_lens.len();

        let mut b = FstBuilder::new();
        let pre: Vec<usize> = (0..=skip).map(|j| b.state(&format!("skip{j}"))).collect();
        let phases: Vec<usize> = (0..k).map(|i| b.state(&format!("phase{i}"))).collect();

        let mut open = vec![1];
        open.extend(std::iter::repeat_n(0, const_len));

        for j in 0..=skip {
            b.transition(pre[j], 0, pre[j], &[]);
            if j < skip {
                b.transition(pre[j], 1, pre[j + 1], &[]);
            } else {
                b.transition(pre[j], 1, phases[0], &open);
            }
        }
        for i in 0..k {
            b.transition(phases[i], 0, phases[i], &vec![0; entry_lens[i]]);
            let next = (i + 1) % k;
            let out: &[Bit] = if next == 0 { &open } else { &[] };
            b.transition(phases[i], 1, phases[next], out);
        }
        Ok(b.build(pre[0]))
    }

    /// Product machine realizing "run self, then then_machine on the
    /// output": states are pairs, with the second component advanced over
    /// the first machine's output word. Only reachable pairs are built.
    pub fn compose(&self, then: &Fst) -> Fst {
        struct Product {
            names: Vec<String>,
            index: HashMap<(usize, usize), usize>,
            steps: Vec<Option<Step>>,
            queue: std::collections::VecDeque<(usize, usize)>,
        }
        impl Product {
            fn intern(&mut self, p: (usize, usize), left: &Fst, right: &Fst) -> usize {
                if let Some(&i) = self.index.get(&p) {
                    return i;
                }
                let i = self.names.len();
                self.names
                    .push(format!("{}|{}", left.names[p.0], right.names[p.1]));
                self.index.insert(p, i);
                self.steps.push(None);
                self.steps.push(None);
                self.queue.push_back(p);
                i
            }
        }

        let mut prod = Product {
            names: Vec::new(),
            index: HashMap::new(),
            steps: Vec::new(),
            queue: std::collections::VecDeque::new(),
        };
        let start = prod.intern((self.initial, then.initial), self, then);
        while let Some((q1, q2)) = prod.queue.pop_front() {
            let here = prod.index[&(q1, q2)];
            for bit in 0..2u8 {
                let step1 = &self.steps[2 * q1 + bit as usize];
                // drive the second machine over the first machine's output
                let mut q2_next = q2;
                let mut out = Vec::new();
                for &b in &step1.out {
                    let step2 = &then.steps[2 * q2_next + b as usize];
                    out.extend_from_slice(&step2.out);
                    q2_next = step2.next;
                }
                let to = prod.intern((step1.next, q2_next), self, then);
                prod.steps[2 * here + bit as usize] = Some(Step { next: to, out });
            }
        }
        Fst {
            names: prod.names,
            initial: start,
            steps: prod.steps.into_iter().map(Option::unwrap).collect(),
        }
    }
}

impl std::fmt::Debug for Fst {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fst({} states, initial {})", self.names.len(), self.initial_name())
    }
}

/// Running state of a machine, for feeding input incrementally.
pub struct FstCursor<'a> {
    fst: &'a Fst,
    state: usize,
}

impl FstCursor<'_> {
    pub fn feed(&mut self, input: &[Bit], out: &mut Vec<Bit>) {
        for &b in input {
            let step = &self.fst.steps[2 * self.state + b as usize];
            out.extend_from_slice(&step.out);
            self.state = step.next;
        }
    }

    /// Feed the same bit `count` times. Self-loops (the common case inside
    /// a run of zeros) pay for the transition lookup once.
    pub fn feed_run(&mut self, bit: Bit, count: u64, out: &mut Vec<Bit>) {
        let mut remaining = count;
        while remaining > 0 {
            let step = &self.fst.steps[2 * self.state + bit as usize];
            if step.next == self.state {
                if !step.out.is_empty() {
                    out.reserve(step.out.len() * remaining as usize);
                    for _ in 0..remaining {
                        out.extend_from_slice(&step.out);
                    }
                }
                return;
            }
            out.extend_from_slice(&step.out);
            self.state = step.next;
            remaining -= 1;
        }
    }
}

// --- serialization -----------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TransitionJson {
    from: String,
    input: u8,
    to: String,
    output: String,
}

#[derive(Serialize, Deserialize)]
struct FstJson {
    states: Vec<String>,
    initial: String,
    transitions: Vec<TransitionJson>,
}

impl From<Fst> for FstJson {
    fn from(fst: Fst) -> Self {
        let mut transitions = Vec::with_capacity(fst.steps.len());
        for (q, name) in fst.names.iter().enumerate() {
            for bit in 0..2u8 {
                let step = &fst.steps[2 * q + bit as usize];
                transitions.push(TransitionJson {
                    from: name.clone(),
                    input: bit,
                    to: fst.names[step.next].clone(),
                    output: bits_to_string(&step.out),
                });
            }
        }
        FstJson {
            initial: fst.names[fst.initial].clone(),
            states: fst.names,
            transitions,
        }
    }
}

impl TryFrom<FstJson> for Fst {
    type Error = FstError;

    fn try_from(json: FstJson) -> Result<Self, Self::Error> {
        let bad = |msg: String| FstError::BadDescription(msg);
        if json.states.is_empty() {
            return Err(bad("no states".into()));
        }
        let mut index = HashMap::new();
        for (i, name) in json.states.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(bad(format!("duplicate state {name:?}")));
            }
        }
        if json.transitions.len() != 2 * json.states.len() {
            return Err(bad(format!(
                "expected {} transition records for completeness, found {}",
                2 * json.states.len(),
                json.transitions.len()
            )));
        }
        let initial = *index
            .get(&json.initial)
            .ok_or_else(|| bad(format!("unknown initial state {:?}", json.initial)))?;
        let mut steps: Vec<Option<Step>> = vec![None; 2 * json.states.len()];
        for t in &json.transitions {
            let from = *index
                .get(&t.from)
                .ok_or_else(|| bad(format!("unknown state {:?}", t.from)))?;
            let to = *index
                .get(&t.to)
                .ok_or_else(|| bad(format!("unknown state {:?}", t.to)))?;
            if t.input > 1 {
                return Err(bad(format!("input must be 0 or 1, found {}", t.input)));
            }
            let slot = &mut steps[2 * from + t.input as usize];
            if slot.is_some() {
                return Err(bad(format!(
                    "duplicate transition for state {:?} on input {}",
                    t.from, t.input
                )));
            }
            *slot = Some(Step {
                next: to,
                out: bits_from_str(&t.output)?,
            });
        }
        let steps: Vec<Step> = steps
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                s.ok_or_else(|| {
                    bad(format!(
                        "state {:?} has no transition on input {}",
                        json.states[i / 2],
                        i % 2
                    ))
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Fst {
            names: json.states,
            initial,
            steps,
        })
    }
}
