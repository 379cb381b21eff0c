//! The tree-based Chase-type GS decoder.
//!
//! Preprocessing builds z, the soft weights and the atom chain. The root
//! pattern is decoded by full interpolation of z; afterwards every trial pops
//! the least frontier node f (ordered by bound, Hamming weight, left
//! position), and either exits because the best hypothesis so far is no
//! heavier than B(f), or decodes `z − f` by swapping a single interpolation
//! point in the basis inherited from f's parent. The node's left-most child
//! and next right-sibling are then pushed with the bases Q(f) and Q(parent).
//!
//! A verbose event trace can be captured; its text form is one line per
//! event, `EVENT key=value ...`:
//!
//! | event | keys |
//! |---|---|
//! | `HARD_DECISION` | `z` |
//! | `ATOM_CHAIN` | `atoms` |
//! | `INIT` | `lambda` (soft weight of e* = z) |
//! | `BASIS` | `trial q0 q1` (the two basis polynomials after the HDD) |
//! | `CANDIDATE` | `trial u c e lambda b0 improved` |
//! | `NO_CANDIDATE` | `trial` |
//! | `POP` | `trial pattern bound best` |
//! | `SWAP` | `trial remove add` |
//! | `INSERT` | `trial pattern bound` |
//! | `EXIT` | `reason trial hdd_calls u lambda` |

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::rc::Rc;

use crate::channel::{self, hard_decision, soft_weights, LikelihoodMatrix, SoftWeights};
use crate::chase::{kaneko_bound, leftmost_child, next_sibling, AtomChain, FlippingPattern, TreeNode};
use crate::galois::{Fe, Poly};
use crate::interp::GroebnerBasis;
use crate::rscode::Code;
use crate::{Error, Result};

/// Log-likelihood matrix of the GF(5) worked example, in the text format.
pub const EXAMPLE1_PI: &str = "5 4
-2.44 -1.41 -1.37 -1.45
-1.20 -1.87 -3.24 -2.18
-2.76 -1.50 -1.22 -1.56
-2.32 -1.63 -2.64 -1.48
-1.45 -2.35 -1.81 -1.77
";

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    /// Stop only on a certificate or after `max_trials` HDD calls.
    Budget,
    /// Additionally stop once B(f) ≥ T_z, where `radius_sq` is the squared
    /// Euclidean radius T of the search sphere around r.
    Threshold { radius_sq: f64 },
    /// Simulation aid: stop as soon as the best candidate is the
    /// transmitted codeword.
    Genie,
}

#[derive(Clone, Debug)]
pub struct DecoderConfig {
    pub max_trials: usize,
    pub mode: Mode,
    /// Noise variance per dimension; only read in threshold mode.
    pub sigma2: f64,
}

impl DecoderConfig {
    pub fn budget(max_trials: usize) -> DecoderConfig {
        DecoderConfig {
            max_trials,
            mode: Mode::Budget,
            sigma2: 1.0,
        }
    }

    pub fn genie(max_trials: usize) -> DecoderConfig {
        DecoderConfig {
            mode: Mode::Genie,
            ..Self::budget(max_trials)
        }
    }

    /// Threshold mode for a target frame error rate `epsilon`: T is σ² times
    /// the upper ε/2 quantile of χ² with `dof` degrees of freedom.
    pub fn threshold(max_trials: usize, epsilon: f64, sigma2: f64, dof: usize) -> Result<DecoderConfig> {
        let q = crate::sim::chi2_threshold(epsilon, dof)?;
        Ok(DecoderConfig {
            max_trials,
            mode: Mode::Threshold { radius_sq: q * sigma2 },
            sigma2,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.max_trials == 0 {
            return Err(Error::Config("max trials must be at least 1".into()));
        }
        if matches!(self.mode, Mode::Threshold { .. }) && (self.sigma2 <= 0.0 || self.sigma2.is_nan()) {
            return Err(Error::Config("threshold mode needs sigma2 > 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExitReason {
    /// λ(e*) ≤ B(f) for the least unexplored pattern.
    CertifiedTree,
    /// λ(e*) ≤ B₀(e*).
    CertifiedKaneko,
    BudgetExhausted,
    ThresholdReached,
    GenieStop,
}

impl ExitReason {
    pub fn is_certified(self) -> bool {
        matches!(self, ExitReason::CertifiedTree | ExitReason::CertifiedKaneko)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ExitReason::CertifiedTree => "certified_tree",
            ExitReason::CertifiedKaneko => "certified_kaneko",
            ExitReason::BudgetExhausted => "budget_exhausted",
            ExitReason::ThresholdReached => "threshold_reached",
            ExitReason::GenieStop => "genie_stop",
        }
    }
}

impl fmt::Display for ExitReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct DecodeResult {
    /// Best message found. `None` when no HDD call produced a candidate and
    /// the exit is not certified; a certified exit without candidates
    /// returns the zero message (e* = z).
    pub message: Option<Poly>,
    pub codeword: Option<Vec<Fe>>,
    /// e* = z − c*; z itself when nothing better was found.
    pub best_error: Vec<Fe>,
    /// λ(e*).
    pub best_weight: f64,
    /// HDD invocations, including the initial decode of z.
    pub trials: usize,
    pub exit: ExitReason,
    pub certified: bool,
    pub forward_adds: usize,
    pub backward_removes: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TraceEvent {
    HardDecision { z: Vec<Fe> },
    AtomChain { atoms: String },
    Init { lambda: f64 },
    Basis { trial: usize, q0: String, q1: String },
    Candidate {
        trial: usize,
        u: Poly,
        codeword: Vec<Fe>,
        error: Vec<Fe>,
        lambda: f64,
        b0: f64,
        improved: bool,
    },
    NoCandidate { trial: usize },
    Pop {
        trial: usize,
        pattern: String,
        positions: Vec<u32>,
        bound: f64,
        best: f64,
    },
    Swap { trial: usize, remove: (Fe, Fe), add: (Fe, Fe) },
    Insert { trial: usize, pattern: String, bound: f64 },
    Exit {
        reason: ExitReason,
        trial: usize,
        hdd_calls: usize,
        u: Option<Poly>,
        lambda: f64,
    },
}

fn join(v: &[Fe]) -> String {
    let parts: Vec<String> = v.iter().map(Fe::to_string).collect();
    parts.join(",")
}

fn real(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x:.4}")
    }
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TraceEvent::*;
        match self {
            HardDecision { z } => write!(f, "HARD_DECISION z={}", join(z)),
            AtomChain { atoms } => write!(f, "ATOM_CHAIN atoms={atoms}"),
            Init { lambda } => write!(f, "INIT lambda={}", real(*lambda)),
            Basis { trial, q0, q1 } => write!(f, "BASIS trial={trial} q0={q0} q1={q1}"),
            Candidate {
                trial,
                u,
                codeword,
                error,
                lambda,
                b0,
                improved,
            } => write!(
                f,
                "CANDIDATE trial={trial} u={u} c={} e={} lambda={} b0={} improved={improved}",
                join(codeword),
                join(error),
                real(*lambda),
                real(*b0)
            ),
            NoCandidate { trial } => write!(f, "NO_CANDIDATE trial={trial}"),
            Pop {
                trial,
                pattern,
                bound,
                best,
                ..
            } => write!(
                f,
                "POP trial={trial} pattern={pattern} bound={} best={}",
                real(*bound),
                real(*best)
            ),
            Swap { trial, remove, add } => write!(
                f,
                "SWAP trial={trial} remove=({},{}) add=({},{})",
                remove.0, remove.1, add.0, add.1
            ),
            Insert { trial, pattern, bound } => {
                write!(f, "INSERT trial={trial} pattern={pattern} bound={}", real(*bound))
            }
            Exit {
                reason,
                trial,
                hdd_calls,
                u,
                lambda,
            } => {
                let u = u.as_ref().map_or_else(|| "none".to_string(), Poly::to_string);
                write!(
                    f,
                    "EXIT reason={reason} trial={trial} hdd_calls={hdd_calls} u={u} lambda={}",
                    real(*lambda)
                )
            }
        }
    }
}

pub fn render_trace(events: &[TraceEvent]) -> String {
    events.iter().map(|e| format!("{e}\n")).collect()
}

/// Everything derived from Π before the first trial.
pub(crate) struct Preprocessed {
    pub z: Vec<Fe>,
    pub sw: SoftWeights,
    pub chain: AtomChain,
}

pub(crate) fn preprocess(pi: &LikelihoodMatrix, code: &Code) -> Result<Preprocessed> {
    if pi.q() != code.field().order() || pi.n() != code.n() {
        return Err(Error::Config(format!(
            "likelihood matrix is {}x{}, code needs {}x{}",
            pi.q(),
            pi.n(),
            code.field().order(),
            code.n()
        )));
    }
    let z = hard_decision(pi);
    let sw = soft_weights(pi, &z, code.field())?;
    let chain = AtomChain::build(&sw);
    Ok(Preprocessed { z, sw, chain })
}

/// Running best hypothesis, shared by the tree decoder and the LCC baseline.
pub(crate) struct Best<'a> {
    code: &'a Code,
    pre: &'a Preprocessed,
    pub message: Option<Poly>,
    pub codeword: Option<Vec<Fe>>,
    pub error: Vec<Fe>,
    pub weight: f64,
}

pub(crate) enum Verdict {
    Continue,
    Kaneko,
    Genie,
}

impl<'a> Best<'a> {
    pub fn new(code: &'a Code, pre: &'a Preprocessed) -> Best<'a> {
        Best {
            code,
            pre,
            message: None,
            codeword: None,
            error: pre.z.clone(),
            weight: pre.sw.weight_of(&pre.z),
        }
    }

    /// Scores the HDD output of one trial and updates e* on strict
    /// improvement.
    pub fn consider(
        &mut self,
        trial: usize,
        candidate: Option<Poly>,
        genie: Option<&[Fe]>,
        trace: &mut Option<&mut Vec<TraceEvent>>,
    ) -> Verdict {
        let Some(u) = candidate else {
            if let Some(t) = trace {
                t.push(TraceEvent::NoCandidate { trial });
            }
            return Verdict::Continue;
        };
        let c = self.code.encode(&u).expect("factorization yields deg u < k");
        let e = self.code.difference(&self.pre.z, &c);
        let lambda = self.pre.sw.weight_of(&e);
        let b0 = kaneko_bound(&e, &self.pre.chain, self.code.d_min());
        let improved = lambda < self.weight;
        if let Some(t) = trace {
            t.push(TraceEvent::Candidate {
                trial,
                u: u.clone(),
                codeword: c.clone(),
                error: e.clone(),
                lambda,
                b0,
                improved,
            });
        }
        if !improved {
            return Verdict::Continue;
        }
        self.message = Some(u);
        self.codeword = Some(c);
        self.error = e;
        self.weight = lambda;
        if lambda <= b0 {
            Verdict::Kaneko
        } else if genie.is_some_and(|g| self.codeword.as_deref() == Some(g)) {
            Verdict::Genie
        } else {
            Verdict::Continue
        }
    }

    pub fn finish(
        self,
        exit: ExitReason,
        trials: usize,
        forward_adds: usize,
        backward_removes: usize,
    ) -> DecodeResult {
        let certified = exit.is_certified();
        let (message, codeword) = match (self.message, certified) {
            (Some(m), _) => (Some(m), self.codeword),
            (None, true) => (Some(Poly::zero()), Some(vec![Fe::ZERO; self.code.n()])),
            (None, false) => (None, None),
        };
        DecodeResult {
            message,
            codeword,
            best_error: self.error,
            best_weight: self.weight,
            trials,
            exit,
            certified,
            forward_adds,
            backward_removes,
        }
    }
}

pub fn tcgs_decode(
    pi: &LikelihoodMatrix,
    code: &Code,
    cfg: &DecoderConfig,
    genie: Option<&[Fe]>,
) -> Result<DecodeResult> {
    run(pi, code, cfg, genie, None)
}

/// As [`tcgs_decode`], appending every event to `trace`.
pub fn tcgs_decode_traced(
    pi: &LikelihoodMatrix,
    code: &Code,
    cfg: &DecoderConfig,
    genie: Option<&[Fe]>,
    trace: &mut Vec<TraceEvent>,
) -> Result<DecodeResult> {
    run(pi, code, cfg, genie, Some(trace))
}

fn basis_event(trial: usize, b: &GroebnerBasis) -> TraceEvent {
    TraceEvent::Basis {
        trial,
        q0: b.polys()[0].to_string(),
        q1: b.polys()[1].to_string(),
    }
}

fn run(
    pi: &LikelihoodMatrix,
    code: &Code,
    cfg: &DecoderConfig,
    genie: Option<&[Fe]>,
    mut trace: Option<&mut Vec<TraceEvent>>,
) -> Result<DecodeResult> {
    cfg.validate()?;
    let genie = if cfg.mode == Mode::Genie { genie } else { None };
    let gf = code.field();
    let pre = preprocess(pi, code)?;
    let (z, chain) = (&pre.z, &pre.chain);
    let t_min = code.t_min();
    let points = code.points();

    // T_z = (T − ‖r − φ(z)‖²) / (2σ²), with ‖r − φ(z)‖² recovered from Π.
    let threshold = match cfg.mode {
        Mode::Threshold { radius_sq } => {
            if gf.characteristic() != 2 {
                return Err(Error::Config("threshold mode needs a binary field".into()));
            }
            let resid: f64 = z
                .iter()
                .enumerate()
                .map(|(j, s)| channel::squared_distance_from_loglik(pi.get(s.value(), j), cfg.sigma2, gf.degree()))
                .sum();
            Some((radius_sq - resid) / (2.0 * cfg.sigma2))
        }
        _ => None,
    };

    let mut best = Best::new(code, &pre);
    if let Some(t) = trace.as_deref_mut() {
        t.push(TraceEvent::HardDecision { z: z.clone() });
        t.push(TraceEvent::AtomChain {
            atoms: chain.describe(),
        });
        t.push(TraceEvent::Init { lambda: best.weight });
    }

    let mut forward_adds = 0;
    let mut backward_removes = 0;
    let root_basis = GroebnerBasis::interpolate(gf, code.k(), points.iter().copied().zip(z.iter().copied()))?;
    forward_adds += code.n();
    let mut trials = 1;
    if let Some(t) = trace.as_deref_mut() {
        t.push(basis_event(0, &root_basis));
    }

    let exit_with = |best: Best, reason: ExitReason, trial: usize, trials, fa, br, trace: Option<&mut Vec<TraceEvent>>| {
        if let Some(t) = trace {
            t.push(TraceEvent::Exit {
                reason,
                trial,
                hdd_calls: trials,
                u: best.message.clone().or_else(|| reason.is_certified().then(Poly::zero)),
                lambda: best.weight,
            });
        }
        Ok(best.finish(reason, trials, fa, br))
    };

    match best.consider(0, root_basis.factorize(gf), genie, &mut trace) {
        Verdict::Kaneko => {
            return exit_with(best, ExitReason::CertifiedKaneko, 0, trials, forward_adds, 0, trace)
        }
        Verdict::Genie => return exit_with(best, ExitReason::GenieStop, 0, trials, forward_adds, 0, trace),
        Verdict::Continue => {}
    }

    let mut frontier: BTreeMap<TreeNode, Rc<GroebnerBasis>> = BTreeMap::new();
    let root_basis = Rc::new(root_basis);
    if let Some(child) = leftmost_child(&FlippingPattern::root(), chain) {
        let node = TreeNode::new(child, chain, t_min);
        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceEvent::Insert {
                trial: 0,
                pattern: node.pattern.describe(chain),
                bound: node.bound,
            });
        }
        frontier.insert(node, root_basis);
    }

    let mut trial = 1;
    while trials < cfg.max_trials {
        let Some((node, parent_basis)) = frontier.pop_first() else {
            // every pattern has been tested
            return exit_with(best, ExitReason::CertifiedTree, trial, trials, forward_adds, backward_removes, trace);
        };
        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceEvent::Pop {
                trial,
                pattern: node.pattern.describe(chain),
                positions: node.pattern.positions().to_vec(),
                bound: node.bound,
                best: best.weight,
            });
        }
        if best.weight <= node.bound {
            return exit_with(best, ExitReason::CertifiedTree, trial, trials, forward_adds, backward_removes, trace);
        }
        if threshold.is_some_and(|tz| node.bound >= tz) {
            return exit_with(best, ExitReason::ThresholdReached, trial, trials, forward_adds, backward_removes, trace);
        }

        let atom = *node.pattern.last_atom(chain).expect("frontier never holds the root");
        let x = points[atom.coord];
        let old = (x, z[atom.coord]);
        let new = (x, gf.sub(z[atom.coord], atom.delta));
        let basis = Rc::new(parent_basis.swap_point(gf, old, new)?);
        backward_removes += 1;
        forward_adds += 1;
        trials += 1;
        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceEvent::Swap {
                trial,
                remove: old,
                add: new,
            });
            t.push(basis_event(trial, &basis));
        }

        match best.consider(trial, basis.factorize(gf), genie, &mut trace) {
            Verdict::Kaneko => {
                return exit_with(best, ExitReason::CertifiedKaneko, trial, trials, forward_adds, backward_removes, trace)
            }
            Verdict::Genie => {
                return exit_with(best, ExitReason::GenieStop, trial, trials, forward_adds, backward_removes, trace)
            }
            Verdict::Continue => {}
        }

        let child = leftmost_child(&node.pattern, chain).map(|p| (p, Rc::clone(&basis)));
        let sibling = next_sibling(&node.pattern, chain)?.map(|p| (p, Rc::clone(&parent_basis)));
        for (pattern, b) in child.into_iter().chain(sibling) {
            let n = TreeNode::new(pattern, chain, t_min);
            if let Some(t) = trace.as_deref_mut() {
                t.push(TraceEvent::Insert {
                    trial,
                    pattern: n.pattern.describe(chain),
                    bound: n.bound,
                });
            }
            frontier.insert(n, b);
        }
        // only L − ℓ more patterns can ever be tested
        let cap = cfg.max_trials - trials;
        while frontier.len() > cap {
            frontier.pop_last();
        }
        trial += 1;
    }
    exit_with(best, ExitReason::BudgetExhausted, trial, trials, forward_adds, backward_removes, trace)
}

/// Exhaustive maximum-likelihood decoding over all q^k codewords. Ties keep
/// the lexicographically first message.
pub fn mld_oracle(pi: &LikelihoodMatrix, code: &Code) -> Result<(Poly, Vec<Fe>)> {
    let size = code.size();
    if size > 1_000_000 {
        return Err(Error::CodeTooLarge(size));
    }
    if pi.q() != code.field().order() || pi.n() != code.n() {
        return Err(Error::Length {
            expected: code.field().order() * code.n(),
            got: pi.q() * pi.n(),
        });
    }
    let mut best: Option<(f64, Poly, Vec<Fe>)> = None;
    for idx in 0..size {
        let u = code.message_from_index(idx);
        let c = code.encode(&u)?;
        let metric = pi.metric(&c);
        if best.as_ref().is_none_or(|(m, _, _)| metric > *m) {
            best = Some((metric, u, c));
        }
    }
    let (_, u, c) = best.expect("at least one codeword");
    Ok((u, c))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceCheck {
    Match,
    /// First divergent event; `line` is 1-based over event lines.
    Mismatch {
        line: usize,
        expected: Option<String>,
        actual: Option<String>,
    },
}

/// Event lines of a stored trace: blank lines and `#` comments dropped.
pub fn trace_lines(text: &str) -> Vec<&str> {
    text.lines()
        .map(str::trim_end)
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .collect()
}

pub fn compare_traces(expected: &str, actual: &str) -> Result<TraceCheck> {
    let exp = trace_lines(expected);
    if exp.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let act = trace_lines(actual);
    for i in 0..exp.len().max(act.len()) {
        let (e, a) = (exp.get(i), act.get(i));
        if e != a {
            return Ok(TraceCheck::Mismatch {
                line: i + 1,
                expected: e.map(|s| s.to_string()),
                actual: a.map(|s| s.to_string()),
            });
        }
    }
    Ok(TraceCheck::Match)
}

/// Field size q of a likelihood matrix, as a field. Only prime q and 2^m are
/// accepted.
pub fn field_for_order(q: usize) -> Result<crate::galois::Field> {
    if q.is_power_of_two() && q > 2 {
        crate::galois::Field::new(2, q.trailing_zeros())
    } else {
        crate::galois::Field::prime(q as u32)
    }
}

/// Runs the traced decoder on a Π file, with a code whose field is inferred
/// from q, n from the matrix and `k`, default evaluation points.
pub fn decode_file(pi_path: &Path, k: usize, max_trials: usize) -> Result<(DecodeResult, Vec<TraceEvent>, LikelihoodMatrix, Code)> {
    let pi = LikelihoodMatrix::from_file(pi_path)?;
    let field = std::sync::Arc::new(field_for_order(pi.q())?);
    let code = Code::with_default_points(field, pi.n(), k)?;
    let mut events = Vec::new();
    let res = tcgs_decode_traced(&pi, &code, &DecoderConfig::budget(max_trials), None, &mut events)?;
    Ok((res, events, pi, code))
}

/// Decodes the Π file and diffs the event log against a stored trace.
pub fn verify_trace(pi_path: &Path, expected_trace: &Path, k: usize, max_trials: usize) -> Result<TraceCheck> {
    let expected = std::fs::read_to_string(expected_trace)?;
    if trace_lines(&expected).is_empty() {
        return Err(Error::EmptyTrace);
    }
    let (_, events, _, _) = decode_file(pi_path, k, max_trials)?;
    compare_traces(&expected, &render_trace(&events))
}
