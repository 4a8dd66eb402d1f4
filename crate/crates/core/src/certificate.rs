//! Replayable certificates.
//!
//! A certificate is a log of library calls with their JSON outputs and the
//! SHA-256 of each output. The verdict is a pure function of the logged
//! outputs, so replaying the calls and re-judging reproduces it.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analysis::{
    check_invariance, filtration_descriptor, filtration_level, generate_from, reduce_degree,
    FiltrationLevel, Generation, Invariance, Reduction, Side, Subspace, Window,
};
use crate::arith::scalar::{format_scalar, serde_scalar, Scalar};
use crate::classify::{
    decide_irreducible, decide_iso, iso_intertwiner_evidence, IntertwinerEvidence,
    IrreducibilityVerdict, IsoVerdict, VMap,
};
use crate::element::TensorElement;
use crate::error::{Error, Result};
use crate::expsolve::{separate, ExpPolyStructure, SampleSet, SampleValue};
use crate::modules::{check_bracket, TensorDescriptor};
use crate::vmodule::{validate_vdescriptor, VDescriptor, VValidation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobKind {
    ValidateV,
    CheckBracket,
    Separate,
    Witness,
    Generate,
    Filtration,
    Exhibit,
    Classify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Undecided,
}

/// What a passing certificate asserts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    /// Exact identities on the logged inputs.
    Exact,
    /// Exact identities on every basis element of a finite window.
    WindowExact,
    /// Finite-window evidence for a statement about the whole module.
    WindowEvidence,
}

/// A library call, tagged by operation name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", content = "args", rename_all = "snake_case")]
pub enum StepCall {
    ValidateV {
        v: VDescriptor,
    },
    BracketSweep {
        descriptor: TensorDescriptor,
        mmax: i64,
        probes: Vec<TensorElement>,
    },
    Separate {
        structure: ExpPolyStructure,
        samples: SampleSet,
    },
    ReduceDegree {
        descriptor: TensorDescriptor,
        element: TensorElement,
    },
    GenerateFrom {
        descriptor: TensorDescriptor,
        start: TensorElement,
        window: Window,
        k_bound: i64,
    },
    CheckInvariance {
        descriptor: TensorDescriptor,
        subspace: Subspace,
        window: Window,
        k_bound: i64,
    },
    FiltrationLevel {
        descriptor: TensorDescriptor,
        s: u32,
        side: Side,
        window: Window,
        k_bound: i64,
    },
    DecideIrreducible {
        descriptor: TensorDescriptor,
    },
    DecideIso {
        first: TensorDescriptor,
        second: TensorDescriptor,
    },
    IntertwinerEvidence {
        first: TensorDescriptor,
        second: TensorDescriptor,
        sigma: Vec<usize>,
        vmap: VMap,
        window: Window,
        k_bound: i64,
    },
}

/// Output of a call: the value, or the error it raised.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome<T> {
    Ok(T),
    Error { code: String, message: String },
}

pub fn error_code(e: &Error) -> &'static str {
    match e {
        Error::Arith(_) => "arith",
        Error::WindowOverflow { .. } => "window_overflow",
        Error::InvalidDescriptor(_) => "invalid_descriptor",
        Error::ArityMismatch { .. } => "arity_mismatch",
        Error::SingularSystem { .. } => "singular_system",
        Error::InconsistentSamples => "inconsistent_samples",
        Error::InvalidStructure(_) => "invalid_structure",
        Error::Precondition(_) => "precondition",
        Error::NotReducible { .. } => "not_reducible",
        Error::NotApplicable(_) => "not_applicable",
        Error::UnsupportedComparison(_) => "undecided_at_window",
        Error::Replay(_) => "replay",
        Error::Json(_) => "json",
    }
}

fn outcome<T: Serialize>(r: Result<T>) -> Value {
    let o = match r {
        Ok(v) => Outcome::Ok(v),
        Err(e) => Outcome::Error {
            code: error_code(&e).to_string(),
            message: e.to_string(),
        },
    };
    serde_json::to_value(o).expect("outputs serialize")
}

/// Failing bracket relation on one probe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketFailure {
    pub m: i64,
    pub n: i64,
    pub probe: usize,
    pub residual: TensorElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketSweep {
    pub mmax: i64,
    pub pairs: usize,
    pub probes: usize,
    pub failures: Vec<BracketFailure>,
    pub pass: bool,
}

/// `[L_m, L_n]` on every probe for all `|m|, |n| ≤ mmax`.
pub fn bracket_sweep(d: &TensorDescriptor, mmax: i64, probes: &[TensorElement]) -> Result<BracketSweep> {
    let mut failures = Vec::new();
    let mut pairs = 0;
    for m in -mmax..=mmax {
        for n in -mmax..=mmax {
            pairs += 1;
            let rep = check_bracket(d, m, n, probes)?;
            for (probe, res) in rep.residuals.into_iter().enumerate() {
                if !res.is_zero() {
                    failures.push(BracketFailure { m, n, probe, residual: res });
                }
            }
        }
    }
    Ok(BracketSweep {
        mmax,
        pairs,
        probes: probes.len(),
        pass: failures.is_empty(),
        failures,
    })
}

impl StepCall {
    pub fn execute(&self) -> Value {
        match self {
            StepCall::ValidateV { v } => outcome(Ok(validate_vdescriptor(v))),
            StepCall::BracketSweep {
                descriptor,
                mmax,
                probes,
            } => outcome(bracket_sweep(descriptor, *mmax, probes)),
            StepCall::Separate { structure, samples } => outcome(
                separate(structure, samples).map(|t| {
                    t.into_iter()
                        .map(|row| row.into_iter().map(SampleValue).collect::<Vec<_>>())
                        .collect::<Vec<_>>()
                }),
            ),
            StepCall::ReduceDegree {
                descriptor,
                element,
            } => outcome(reduce_degree(descriptor, element)),
            StepCall::GenerateFrom {
                descriptor,
                start,
                window,
                k_bound,
            } => outcome(generate_from(descriptor, start, *window, *k_bound).map(|(g, _)| g)),
            StepCall::CheckInvariance {
                descriptor,
                subspace,
                window,
                k_bound,
            } => outcome(check_invariance(descriptor, subspace, *window, *k_bound)),
            StepCall::FiltrationLevel {
                descriptor,
                s,
                side,
                window,
                k_bound,
            } => outcome(filtration_level(descriptor, *s, *side, *window, *k_bound)),
            StepCall::DecideIrreducible { descriptor } => outcome(decide_irreducible(descriptor)),
            StepCall::DecideIso { first, second } => outcome(decide_iso(first, second)),
            StepCall::IntertwinerEvidence {
                first,
                second,
                sigma,
                vmap,
                window,
                k_bound,
            } => outcome(iso_intertwiner_evidence(first, second, sigma, vmap, *window, *k_bound)),
        }
    }
}

pub fn hash_value(v: &Value) -> String {
    let bytes = serde_json::to_vec(v).expect("json values serialize");
    hex::encode(Sha256::digest(&bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub op: String,
    pub args: Value,
    pub output: Value,
    pub output_hash: String,
}

impl Step {
    pub fn run(call: StepCall) -> Step {
        let output = call.execute();
        let output_hash = hash_value(&output);
        let Value::Object(mut tagged) = serde_json::to_value(&call).expect("calls serialize") else {
            unreachable!("adjacently tagged enums serialize to objects")
        };
        let op = tagged.remove("op").and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let args = tagged.remove("args").unwrap_or(Value::Null);
        Step {
            op,
            args,
            output,
            output_hash,
        }
    }

    pub fn call(&self) -> Result<StepCall> {
        Ok(serde_json::from_value(json!({"op": self.op, "args": self.args}))?)
    }

    fn outcome<T: DeserializeOwned>(&self) -> Result<Outcome<T>> {
        Ok(serde_json::from_value(self.output.clone())?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: JobKind,
    pub verdict: Verdict,
    pub claim: Claim,
    pub inputs: Value,
    pub config: Value,
    pub rng_seed: Option<u64>,
    pub steps: Vec<Step>,
    /// `"0"` on pass, otherwise the first nonzero residual or failure message.
    pub residual: String,
    pub summary: Value,
}

struct Judgement {
    verdict: Verdict,
    claim: Claim,
    residual: String,
    summary: Value,
}

impl Judgement {
    fn pass(claim: Claim, summary: Value) -> Self {
        Judgement {
            verdict: Verdict::Pass,
            claim,
            residual: "0".into(),
            summary,
        }
    }

    fn other(verdict: Verdict, claim: Claim, residual: impl Into<String>, summary: Value) -> Self {
        Judgement {
            verdict,
            claim,
            residual: residual.into(),
            summary,
        }
    }
}

fn error_verdict(code: &str) -> Verdict {
    match code {
        "not_reducible" | "inconsistent_samples" => Verdict::Fail,
        _ => Verdict::Undecided,
    }
}

fn judge(kind: JobKind, inputs: &Value, steps: &[Step]) -> Result<Judgement> {
    let single = || {
        steps
            .first()
            .ok_or_else(|| Error::Replay("certificate has no steps".into()))
    };
    match kind {
        JobKind::ValidateV => match single()?.outcome::<VValidation>()? {
            Outcome::Ok(v) if v.pass => Ok(Judgement::pass(Claim::WindowEvidence, json!({"validation": v}))),
            Outcome::Ok(v) => {
                let residual = match v.bracket_residuals.first() {
                    Some(b) => format!("[L̄_{}, L̄_{}] on v_{}: {:?}", b.i, b.j, b.column, b.residual),
                    None if !v.top_injective => "L̄_r is not injective on the window".into(),
                    None => "window is not cyclic from v_0".into(),
                };
                Ok(Judgement::other(Verdict::Fail, Claim::WindowEvidence, residual, json!({"validation": v})))
            }
            Outcome::Error { code, message } => Ok(Judgement::other(error_verdict(&code), Claim::WindowEvidence, message, Value::Null)),
        },
        JobKind::CheckBracket => match single()?.outcome::<BracketSweep>()? {
            Outcome::Ok(s) => {
                let summary = json!({"pairs": s.pairs, "probes": s.probes, "failures": s.failures.len()});
                match s.failures.first() {
                    None => Ok(Judgement::pass(Claim::Exact, summary)),
                    Some(f) => Ok(Judgement::other(
                        Verdict::Fail,
                        Claim::Exact,
                        format!("m={} n={} probe {}: {}", f.m, f.n, f.probe, f.residual),
                        summary,
                    )),
                }
            }
            Outcome::Error { code, message } => Ok(Judgement::other(error_verdict(&code), Claim::Exact, message, Value::Null)),
        },
        JobKind::Separate => match single()?.outcome::<Value>()? {
            Outcome::Ok(table) => Ok(Judgement::pass(Claim::Exact, json!({"table": table}))),
            Outcome::Error { code, message } => Ok(Judgement::other(error_verdict(&code), Claim::Exact, message, Value::Null)),
        },
        JobKind::Witness => judge_witness(inputs, steps),
        JobKind::Generate => match single()?.outcome::<Generation>()? {
            Outcome::Ok(g) => {
                let summary = json!({"window_dim": g.window_dim, "reached_dim": g.reached_dim});
                if g.full {
                    Ok(Judgement::pass(Claim::WindowExact, summary))
                } else {
                    let v = if g.overflow_skips > 0 { Verdict::Undecided } else { Verdict::Fail };
                    Ok(Judgement::other(v, Claim::WindowExact, format!("reached {} of {}", g.reached_dim, g.window_dim), summary))
                }
            }
            Outcome::Error { code, message } => Ok(Judgement::other(error_verdict(&code), Claim::WindowExact, message, Value::Null)),
        },
        JobKind::Filtration => {
            let mut levels = Vec::new();
            let mut first_failure: Option<String> = None;
            for st in steps {
                match st.outcome::<FiltrationLevel>()? {
                    Outcome::Ok(l) => {
                        if !l.pass && first_failure.is_none() {
                            first_failure = Some(describe_filtration_failure(&l));
                        }
                        levels.push(json!({"s": l.s, "side": l.side, "pass": l.pass,
                            "quotient_alpha": format_scalar(&l.quotient.quotient_alpha)}));
                    }
                    Outcome::Error { code, message } => {
                        return Ok(Judgement::other(error_verdict(&code), Claim::WindowExact, message, Value::Null))
                    }
                }
            }
            let summary = json!({ "levels": levels });
            Ok(match first_failure {
                None => Judgement::pass(Claim::WindowExact, summary),
                Some(r) => Judgement::other(Verdict::Fail, Claim::WindowExact, r, summary),
            })
        }
        JobKind::Exhibit => {
            let irr = single()?.outcome::<IrreducibilityVerdict>()?;
            let reasons = match irr {
                Outcome::Ok(v) if v.irreducible => {
                    return Ok(Judgement::other(
                        Verdict::Undecided,
                        Claim::WindowExact,
                        "not applicable: descriptor is irreducible",
                        json!({"irreducible": true}),
                    ))
                }
                Outcome::Ok(v) => v.reasons,
                Outcome::Error { code, message } => {
                    return Ok(Judgement::other(error_verdict(&code), Claim::WindowExact, message, Value::Null))
                }
            };
            let inv = steps
                .get(1)
                .ok_or_else(|| Error::Replay("exhibit certificate lacks the invariance step".into()))?
                .outcome::<Invariance>()?;
            match inv {
                Outcome::Ok(inv) => {
                    let summary = json!({"reason": reasons[0], "subspace": inv.subspace,
                        "tested": inv.tested, "outside_witness": inv.outside_witness});
                    if inv.pass {
                        Ok(Judgement::pass(Claim::WindowExact, summary))
                    } else {
                        let r = inv
                            .failures
                            .first()
                            .map_or("subspace is zero or the whole window".into(), |f| {
                                format!("k={} on {}: {}", f.k, f.element, f.residual)
                            });
                        Ok(Judgement::other(Verdict::Fail, Claim::WindowExact, r, summary))
                    }
                }
                Outcome::Error { code, message } => Ok(Judgement::other(error_verdict(&code), Claim::WindowExact, message, Value::Null)),
            }
        }
        JobKind::Classify => {
            let iso = match single()?.outcome::<IsoVerdict>()? {
                Outcome::Ok(v) => v,
                Outcome::Error { code, message } => {
                    return Ok(Judgement::other(error_verdict(&code), Claim::Exact, message, Value::Null))
                }
            };
            match &iso {
                IsoVerdict::Yes { case, sigma, vmap } => {
                    let ev = steps
                        .get(1)
                        .ok_or_else(|| Error::Replay("classify certificate lacks intertwiner evidence".into()))?
                        .outcome::<IntertwinerEvidence>()?;
                    let summary = json!({"iso": "yes", "case": case, "sigma": sigma, "vmap": vmap});
                    match ev {
                        Outcome::Ok(ev) if ev.pass => Ok(Judgement::pass(Claim::Exact, summary)),
                        Outcome::Ok(ev) => {
                            let f = &ev.failures[0];
                            Ok(Judgement::other(Verdict::Fail, Claim::Exact, format!("k={} on {}: {}", f.k, f.element, f.residual), summary))
                        }
                        Outcome::Error { code, message } => Ok(Judgement::other(error_verdict(&code), Claim::Exact, message, summary)),
                    }
                }
                IsoVerdict::No { reason } => Ok(Judgement::pass(
                    Claim::Exact,
                    json!({"iso": "no", "reason": reason, "explanation": reason.to_string()}),
                )),
                IsoVerdict::UndecidedAtWindow { reason, evidence } => Ok(Judgement::other(
                    Verdict::Undecided,
                    Claim::WindowEvidence,
                    reason.clone(),
                    json!({"iso": "undecided-at-window", "evidence": evidence}),
                )),
            }
        }
    }
}

fn describe_filtration_failure(l: &FiltrationLevel) -> String {
    if let Some(f) = l.invariance.failures.first() {
        return format!("s={} {:?}: L_{} of {} leaves V⊗W_s: {}", l.s, l.side, f.k, f.element, f.residual);
    }
    if let Some(f) = l.quotient.failures.first() {
        return format!("s={} {:?}: quotient mismatch at k={} on {}: {}", l.s, l.side, f.k, f.element, f.residual);
    }
    format!("s={} {:?}: chain inclusion or nonvanishing failed", l.s, l.side)
}

fn judge_witness(inputs: &Value, steps: &[Step]) -> Result<Judgement> {
    let seeds: Vec<TensorElement> = serde_json::from_value(inputs["seeds"].clone())?;
    let mut chains = Vec::new();
    let mut idx = 0;
    let mut failure: Option<(Verdict, String)> = None;
    for (n, seed) in seeds.iter().enumerate() {
        let bound = seed.nvars();
        let mut current = seed.clone();
        let mut len = 0;
        loop {
            let st = steps
                .get(idx)
                .ok_or_else(|| Error::Replay(format!("seed {n}: chain ends early")))?;
            idx += 1;
            match st.call()? {
                StepCall::ReduceDegree { element, .. } => {
                    if element != current {
                        return Err(Error::Replay(format!("seed {n}: reduction input is not the previous output")));
                    }
                    match st.outcome::<Reduction>()? {
                        Outcome::Ok(r) => {
                            current = r.output;
                            len += 1;
                        }
                        Outcome::Error { code, message } => {
                            failure.get_or_insert((error_verdict(&code), format!("seed {n}: {message}")));
                            chains.push(json!({"seed": n, "reductions": len, "reached_degree_zero": false}));
                            break;
                        }
                    }
                }
                StepCall::GenerateFrom { start, .. } => {
                    if start != current || current.degree().is_some_and(|d| d.total_degree() > 0) {
                        return Err(Error::Replay(format!("seed {n}: generation does not start at the end of the chain")));
                    }
                    if len > bound {
                        failure.get_or_insert((Verdict::Fail, format!("seed {n}: chain length {len} exceeds bound {bound}")));
                    }
                    match st.outcome::<Generation>()? {
                        Outcome::Ok(g) => {
                            if !g.full {
                                let v = if g.overflow_skips > 0 { Verdict::Undecided } else { Verdict::Fail };
                                failure.get_or_insert((v, format!("seed {n}: generated {} of {}", g.reached_dim, g.window_dim)));
                            }
                            chains.push(json!({"seed": n, "reductions": len, "bound": bound,
                                "reached_degree_zero": true, "generated": g.reached_dim, "window_dim": g.window_dim}));
                        }
                        Outcome::Error { code, message } => {
                            failure.get_or_insert((error_verdict(&code), format!("seed {n}: {message}")));
                        }
                    }
                    break;
                }
                _ => return Err(Error::Replay(format!("unexpected step {} in witness", st.op))),
            }
        }
    }
    if idx != steps.len() {
        return Err(Error::Replay("trailing steps in witness certificate".into()));
    }
    let summary = json!({ "chains": chains });
    Ok(match failure {
        None => Judgement::pass(Claim::WindowExact, summary),
        Some((v, r)) => Judgement::other(v, Claim::WindowExact, r, summary),
    })
}

fn finish(kind: JobKind, inputs: Value, config: Value, rng_seed: Option<u64>, steps: Vec<Step>) -> Result<Certificate> {
    let j = judge(kind, &inputs, &steps)?;
    Ok(Certificate {
        kind,
        verdict: j.verdict,
        claim: j.claim,
        inputs,
        config,
        rng_seed,
        steps,
        residual: j.residual,
        summary: j.summary,
    })
}

pub fn validate_v_job(v: &VDescriptor) -> Result<Certificate> {
    let steps = vec![Step::run(StepCall::ValidateV { v: v.clone() })];
    finish(JobKind::ValidateV, json!({"v": v}), Value::Null, None, steps)
}

pub fn check_bracket_job(d: &TensorDescriptor, mmax: i64, probes: Vec<TensorElement>, rng_seed: u64) -> Result<Certificate> {
    let config = json!({"mmax": mmax, "probes": probes.len()});
    let steps = vec![Step::run(StepCall::BracketSweep {
        descriptor: d.clone(),
        mmax,
        probes,
    })];
    finish(JobKind::CheckBracket, json!({"descriptor": d}), config, Some(rng_seed), steps)
}

pub fn separate_job(structure: &ExpPolyStructure, samples: &SampleSet) -> Result<Certificate> {
    let steps = vec![Step::run(StepCall::Separate {
        structure: structure.clone(),
        samples: samples.clone(),
    })];
    finish(
        JobKind::Separate,
        json!({"structure": structure, "samples": samples}),
        Value::Null,
        None,
        steps,
    )
}

/// Reduces every seed to degree 0, then generates the window from the result.
pub fn witness_job(
    d: &TensorDescriptor,
    seeds: &[TensorElement],
    window: Window,
    k_bound: i64,
    rng_seed: Option<u64>,
) -> Result<Certificate> {
    let mut steps = Vec::new();
    for seed in seeds {
        seed.check_arity(d.nvars())?;
        if seed.is_zero() {
            return Err(Error::Precondition("witness seeds must be nonzero".into()));
        }
        let mut current = seed.clone();
        // Each prescribed step moves the first nonzero coordinate strictly right.
        let cap = 4 * d.nvars() + seed.max_total_degree() as usize + 4;
        let mut ok = true;
        for _ in 0..cap {
            if current.degree().is_some_and(|m| m.is_one()) {
                break;
            }
            let step = Step::run(StepCall::ReduceDegree {
                descriptor: d.clone(),
                element: current.clone(),
            });
            let out = step.outcome::<Reduction>()?;
            steps.push(step);
            match out {
                Outcome::Ok(r) => current = r.output,
                Outcome::Error { .. } => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            steps.push(Step::run(StepCall::GenerateFrom {
                descriptor: d.clone(),
                start: current,
                window,
                k_bound,
            }));
        }
    }
    finish(
        JobKind::Witness,
        json!({"descriptor": d, "seeds": seeds}),
        json!({"window": window, "k_bound": k_bound, "seed_count": seeds.len()}),
        rng_seed,
        steps,
    )
}

pub fn generate_job(d: &TensorDescriptor, window: Window, k_bound: i64) -> Result<Certificate> {
    let start = TensorElement::unit(d.nvars(), 0);
    let steps = vec![Step::run(StepCall::GenerateFrom {
        descriptor: d.clone(),
        start,
        window,
        k_bound,
    })];
    finish(
        JobKind::Generate,
        json!({"descriptor": d}),
        json!({"window": window, "k_bound": k_bound}),
        None,
        steps,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn filtration_job(
    v: &VDescriptor,
    lambda: &Scalar,
    alpha0: &Scalar,
    alpha1: &Scalar,
    s_max: u32,
    window: Window,
    k_bound: i64,
) -> Result<Certificate> {
    let d = filtration_descriptor(v, lambda, alpha0, alpha1)?;
    let mut steps = Vec::new();
    for side in [Side::First, Side::Second] {
        for s in 0..=s_max {
            steps.push(Step::run(StepCall::FiltrationLevel {
                descriptor: d.clone(),
                s,
                side,
                window,
                k_bound,
            }));
        }
    }
    #[derive(Serialize)]
    struct Params<'a> {
        v: &'a VDescriptor,
        #[serde(with = "serde_scalar")]
        lambda: &'a Scalar,
        #[serde(with = "serde_scalar")]
        alpha0: &'a Scalar,
        #[serde(with = "serde_scalar")]
        alpha1: &'a Scalar,
    }
    let inputs = serde_json::to_value(Params { v, lambda, alpha0, alpha1 })?;
    finish(
        JobKind::Filtration,
        inputs,
        json!({"s_max": s_max, "window": window, "k_bound": k_bound}),
        None,
        steps,
    )
}

pub fn exhibit_job(d: &TensorDescriptor, window: Window, k_bound: i64) -> Result<Certificate> {
    let first = Step::run(StepCall::DecideIrreducible { descriptor: d.clone() });
    let mut steps = vec![first];
    if let Outcome::Ok(v) = steps[0].outcome::<IrreducibilityVerdict>()? {
        if let Some(cfg) = v.reasons.first() {
            steps.push(Step::run(StepCall::CheckInvariance {
                descriptor: d.clone(),
                subspace: cfg.subspace(),
                window,
                k_bound,
            }));
        }
    }
    finish(
        JobKind::Exhibit,
        json!({"descriptor": d}),
        json!({"window": window, "k_bound": k_bound}),
        None,
        steps,
    )
}

pub fn classify_job(d1: &TensorDescriptor, d2: &TensorDescriptor, window: Window, k_bound: i64) -> Result<Certificate> {
    let first = Step::run(StepCall::DecideIso {
        first: d1.clone(),
        second: d2.clone(),
    });
    let mut steps = vec![first];
    if let Outcome::Ok(IsoVerdict::Yes { sigma, vmap, .. }) = steps[0].outcome::<IsoVerdict>()? {
        steps.push(Step::run(StepCall::IntertwinerEvidence {
            first: d1.clone(),
            second: d2.clone(),
            sigma,
            vmap,
            window,
            k_bound,
        }));
    }
    finish(
        JobKind::Classify,
        json!({"first": d1, "second": d2}),
        json!({"window": window, "k_bound": k_bound}),
        None,
        steps,
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub steps: usize,
    /// Steps whose recomputed output hash differs from the recorded hash.
    pub hash_mismatches: Vec<usize>,
    /// Steps whose recorded output does not hash to the recorded hash.
    pub tampered_outputs: Vec<usize>,
    pub recorded_verdict: Verdict,
    pub recomputed_verdict: Verdict,
    pub verdict_matches: bool,
    pub pass: bool,
}

/// Recomputes every step and the verdict of a certificate.
pub fn replay(cert: &Certificate) -> Result<ReplayReport> {
    let mut hash_mismatches = Vec::new();
    let mut tampered_outputs = Vec::new();
    let mut fresh = Vec::with_capacity(cert.steps.len());
    for (i, st) in cert.steps.iter().enumerate() {
        if hash_value(&st.output) != st.output_hash {
            tampered_outputs.push(i);
        }
        let again = Step::run(st.call()?);
        if again.output_hash != st.output_hash {
            hash_mismatches.push(i);
        }
        fresh.push(again);
    }
    let j = judge(cert.kind, &cert.inputs, &fresh)?;
    let verdict_matches =
        j.verdict == cert.verdict && j.residual == cert.residual && j.summary == cert.summary && j.claim == cert.claim;
    Ok(ReplayReport {
        steps: cert.steps.len(),
        pass: hash_mismatches.is_empty() && tampered_outputs.is_empty() && verdict_matches,
        hash_mismatches,
        tampered_outputs,
        recorded_verdict: cert.verdict,
        recomputed_verdict: j.verdict,
        verdict_matches,
    })
}
