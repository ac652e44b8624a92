//! The `run` pipeline: build the algebra, then execute the requested tasks in
//! dependency order and collect a report.

use serde_json::{json, Value};

use super::spec::{from_matrix, to_matrix, AlgebraSpec, ProblemSpec, Task};
use super::ExitKind;
use crate::constraints::{dirac_states, t_reduce, verify_equivalence, ConstrainedSystem, TReductionResult};
use crate::error::{Error, Result};
use crate::genrand;
use crate::gns;
use crate::ljb_core::{self, verify_dynamical_correspondence, verify_ljb_axioms, CStarAlgebra, LjbAlgebra, LjbParams};
use crate::linalg::CMat;
use crate::matspace::{AmbientSpace, MatrixSubspace};
use crate::reduction::{reduce_by_ideal, reduce_by_subalgebra, ReductionResult};
use crate::states::{self, StateFunctional};

const VERIFY_TRIALS: usize = 20;
const STATE_SAMPLES: usize = 10;

pub struct RunOutcome {
    pub report: Value,
    pub summary: Vec<String>,
    pub exit: ExitKind,
}

struct TaskOutcome {
    body: Value,
    passed: bool,
    line: String,
}

struct Ctx<'a> {
    spec: &'a ProblemSpec,
    seed: u64,
    params: LjbParams,
    amb: AmbientSpace,
    l: LjbAlgebra,
    f: CStarAlgebra,
    t: Option<TReductionResult>,
    reduction: Option<ReductionResult>,
}

/// Runs every requested task. A failing task is recorded and the remaining
/// tasks still run.
pub fn run_spec(spec: &ProblemSpec, seed: u64) -> RunOutcome {
    let echo = serde_json::to_value(spec).unwrap_or(Value::Null);
    let tasks = spec.ordered_tasks();
    let mut report = json!({ "spec": echo, "seed": seed, "tasks": [] });
    let mut summary = Vec::new();
    if tasks.is_empty() {
        report["passed"] = json!(true);
        summary.push("no tasks requested".to_string());
        return RunOutcome { report, summary, exit: ExitKind::Ok };
    }
    let mut ctx = match Ctx::new(spec, seed) {
        Ok(c) => c,
        Err(e) => {
            let exit = ExitKind::of(&e);
            report["error"] = error_json(&e);
            report["passed"] = json!(false);
            summary.push(format!("setup: error: {e}"));
            return RunOutcome { report, summary, exit };
        }
    };
    let mut exit = ExitKind::Ok;
    let mut entries = Vec::new();
    let mut all_passed = true;
    for task in tasks {
        match ctx.run_task(task) {
            Ok(out) => {
                let mut body = out.body;
                body["task"] = json!(task.name());
                body["passed"] = json!(out.passed);
                if !out.passed {
                    all_passed = false;
                    exit = exit.max(ExitKind::TheoremViolation);
                }
                summary.push(format!(
                    "{}: {} ({})",
                    task.name(),
                    if out.passed { "pass" } else { "FAIL" },
                    out.line
                ));
                entries.push(body);
            }
            Err(e) => {
                all_passed = false;
                exit = exit.max(ExitKind::of(&e));
                summary.push(format!("{}: error: {e}", task.name()));
                entries.push(json!({ "task": task.name(), "passed": false, "error": error_json(&e) }));
            }
        }
    }
    report["tasks"] = Value::Array(entries);
    report["passed"] = json!(all_passed);
    RunOutcome { report, summary, exit }
}

fn error_json(e: &Error) -> Value {
    json!({ "code": ExitKind::of(e).code(), "message": e.to_string() })
}

fn hermitian_span(amb: AmbientSpace, mats: &[super::spec::JsonMatrix]) -> Result<MatrixSubspace> {
    let gens: Vec<CMat> = mats.iter().map(to_matrix).collect();
    MatrixSubspace::span(amb, &gens, true)
}

impl<'a> Ctx<'a> {
    fn new(spec: &'a ProblemSpec, seed: u64) -> Result<Self> {
        let params = spec.params()?;
        let amb = AmbientSpace::new(spec.n)?;
        let l = match &spec.algebra {
            AlgebraSpec::Full => LjbAlgebra::full(spec.n, params)?,
            AlgebraSpec::Basis(b) => LjbAlgebra::new(hermitian_span(amb, b)?, params)?,
            AlgebraSpec::Generated(g) => genrand::gen_algebra_with(g, params)?,
        };
        let f = ljb_core::complexify(&l)?;
        Ok(Ctx {
            spec,
            seed,
            params,
            amb,
            l,
            f,
            t: None,
            reduction: None,
        })
    }

    fn system(&self) -> Result<ConstrainedSystem> {
        if self.spec.constraints.is_empty() {
            return Err(Error::Precondition("no constraints given".into()));
        }
        let cs = self.spec.constraints.iter().map(to_matrix).collect();
        ConstrainedSystem::new(self.f.clone(), cs)
    }

    fn t_reduction(&mut self) -> Result<&TReductionResult> {
        if self.t.is_none() {
            self.t = Some(t_reduce(&self.system()?)?);
        }
        Ok(self.t.as_ref().expect("just set"))
    }

    fn subalgebra_source(&mut self) -> Result<MatrixSubspace> {
        if let Some(sub) = &self.spec.subalgebra {
            return hermitian_span(self.amb, sub);
        }
        if !self.spec.constraints.is_empty() {
            return Ok(self.t_reduction()?.d.hermitian_part());
        }
        Err(Error::Precondition("no subalgebra or constraints given".into()))
    }

    /// The reduction used by the state and GNS tasks: from constraints or an
    /// explicit subalgebra when present, otherwise from the ideal.
    fn reduction(&mut self) -> Result<&ReductionResult> {
        if self.reduction.is_none() {
            let r = if self.spec.subalgebra.is_some() || !self.spec.constraints.is_empty() {
                let j = self.subalgebra_source()?;
                reduce_by_subalgebra(&self.l, &j)?
            } else if let Some(ideal) = &self.spec.ideal {
                reduce_by_ideal(&self.l, &hermitian_span(self.amb, ideal)?)?
            } else {
                return Err(Error::Precondition("no ideal, subalgebra or constraints given".into()));
            };
            self.reduction = Some(r);
        }
        Ok(self.reduction.as_ref().expect("just set"))
    }

    /// Given densities, or the unique Dirac state when none are given.
    fn states(&mut self) -> Result<Vec<(String, StateFunctional)>> {
        let mut out = Vec::new();
        for (i, m) in self.spec.states.iter().enumerate() {
            out.push((format!("state {i}"), StateFunctional::from_density(&self.l, &to_matrix(m))?));
        }
        if out.is_empty() && !self.spec.constraints.is_empty() {
            let report = dirac_states(&self.system()?, 1, self.seed)?;
            if let Some(rho) = report.unique_state {
                out.push(("dirac state".into(), StateFunctional::from_density(&self.l, &rho)?));
            }
        }
        if out.is_empty() {
            return Err(Error::Precondition("no states given".into()));
        }
        Ok(out)
    }

    fn run_task(&mut self, task: Task) -> Result<TaskOutcome> {
        match task {
            Task::Verify => self.verify(),
            Task::ReduceIdeal => {
                let ideal = self
                    .spec
                    .ideal
                    .as_ref()
                    .ok_or_else(|| Error::Precondition("reduce-ideal needs an ideal".into()))?;
                let r = reduce_by_ideal(&self.l, &hermitian_span(self.amb, ideal)?)?;
                Ok(self.reduction_report(&r))
            }
            Task::ReduceSubalgebra => {
                let j = self.subalgebra_source()?;
                let r = reduce_by_subalgebra(&self.l, &j)?;
                Ok(self.reduction_report(&r))
            }
            Task::TReduce => self.t_reduce_task(),
            Task::Equivalence => {
                let cert = verify_equivalence(&self.system()?, self.params, self.seed)?;
                let passed = cert.passed();
                let line = format!(
                    "quotient dims {} / {}, product residual {:.3e}",
                    cert.ljb_quotient_dim, cert.t_quotient_hermitian_dim, cert.product_residual
                );
                Ok(TaskOutcome {
                    body: json!({ "certificate": cert }),
                    passed,
                    line,
                })
            }
            Task::States => self.states_task(),
            Task::Gns => self.gns_task(),
            Task::Purity => self.purity_task(),
            Task::All => unreachable!("expanded by ordered_tasks"),
        }
    }

    fn verify(&self) -> Result<TaskOutcome> {
        let ax = verify_ljb_axioms(&self.l, VERIFY_TRIALS, self.seed);
        let dy = verify_dynamical_correspondence(&self.l, VERIFY_TRIALS, self.seed);
        let passed = ax.passed && dy.passed;
        let line = format!("dim {}, worst residual {:.3e}", self.l.dim(), ax.worst.max(dy.worst));
        Ok(TaskOutcome {
            body: json!({ "dim": self.l.dim(), "axioms": ax, "dynamical": dy }),
            passed,
            line,
        })
    }

    fn reduction_report(&self, r: &ReductionResult) -> TaskOutcome {
        let ax = verify_ljb_axioms(&r.quotient, VERIFY_TRIALS, self.seed);
        let exact = r.dimensions_consistent();
        let passed = exact && r.ideal_check.holds && ax.passed;
        let line = format!(
            "normalizer {}, reducing ideal {}, quotient {}",
            r.normalizer.dim(),
            r.reducing_ideal.dim(),
            r.quotient.dim()
        );
        TaskOutcome {
            body: json!({
                "normalizer_dim": r.normalizer.dim(),
                "reducing_ideal_dim": r.reducing_ideal.dim(),
                "quotient_dim": r.quotient.dim(),
                "exact_sequence": exact,
                "ideal_check": r.ideal_check,
                "quotient_axioms": ax,
                "support": from_matrix(r.support()),
            }),
            passed,
            line,
        }
    }

    fn t_reduce_task(&mut self) -> Result<TaskOutcome> {
        let sys = self.system()?;
        let dirac = dirac_states(&sys, 8, self.seed)?;
        let t = self.t_reduction()?;
        let classes = match dirac.corner_dim {
            0 => Some(0),
            1 => Some(1),
            _ => None,
        };
        let rank = crate::linalg::trace(&dirac.support).re.round() as usize;
        let line = format!(
            "D {}, O {}, quotient {}, Dirac classes {}",
            t.d.complex_dim(),
            t.observables.complex_dim(),
            t.quotient().complex_dim(),
            classes.map_or("continuum".to_string(), |c| c.to_string())
        );
        Ok(TaskOutcome {
            body: json!({
                "d_dim": t.d.complex_dim(),
                "observables_dim": t.observables.complex_dim(),
                "quotient_dim": t.quotient().complex_dim(),
                "dirac_support_rank": rank,
                "dirac_corner_dim": dirac.corner_dim,
                "dirac_classes": classes,
                "dirac_state": dirac.unique_state.as_ref().map(from_matrix),
                "annihilation": dirac.annihilation,
                "maximality": dirac.maximality,
            }),
            passed: dirac.maximality.matches,
            line,
        })
    }

    fn states_task(&mut self) -> Result<TaskOutcome> {
        let list = self.states()?;
        let l = self.l.clone();
        let seed = self.seed;
        let r = self.reduction()?.clone();
        let mut entries = Vec::new();
        let mut passed = true;
        for (label, omega) in &list {
            let rep = states::is_state(omega);
            let vanishes = states::vanishes_on(omega, &r.reducing_ideal)?;
            let mut entry = json!({
                "label": label,
                "is_state": rep.is_state,
                "normalization": rep.normalization,
                "vanishes_on_reducing_ideal": vanishes,
            });
            if rep.is_state && vanishes && r.quotient.dim() > 0 {
                let red = states::reduce_state(omega, &r)?;
                let lifted = states::lift_reduced_state(&red, &r)?;
                let ext = states::extend_state(&lifted, &l)?;
                let d = states::nj0_distance(omega, &ext.state, r.normalizer.carrier())?;
                passed &= d <= crate::tolerance::scaled(crate::tolerance::ROUND_TRIP);
                entry["reduced_values"] = json!(red.values());
                entry["class_round_trip"] = json!(d);
                entry["extension_iterations"] = json!(ext.solver.iterations);
            }
            entries.push(entry);
        }
        let cert = states::verify_state_correspondence(&l, &r, STATE_SAMPLES, seed)?;
        passed &= cert.passed;
        let line = format!(
            "{} states, round trips {:.3e} / {:.3e}",
            list.len(),
            cert.reduced_round_trip,
            cert.class_round_trip
        );
        Ok(TaskOutcome {
            body: json!({ "states": entries, "correspondence": cert }),
            passed,
            line,
        })
    }

    fn gns_task(&mut self) -> Result<TaskOutcome> {
        let list = self.states()?;
        let f = self.f.clone();
        let r = if self.spec.ideal.is_some() || self.spec.subalgebra.is_some() || !self.spec.constraints.is_empty() {
            Some(self.reduction()?.clone())
        } else {
            None
        };
        let mut entries = Vec::new();
        let mut passed = true;
        let mut dims = Vec::new();
        for (label, omega) in &list {
            let rep = gns::gns(&f, omega)?;
            let v = rep.verify();
            let commutant = gns::commutant_dim(&rep);
            passed &= v.passed;
            let mut entry = json!({
                "label": label,
                "hilbert_dim": rep.hilbert_dim(),
                "gelfand_ideal_dim": rep.gelfand_ideal().complex_dim(),
                "gram_eigenvalues": rep.gram_eigenvalues(),
                "commutant_dim": commutant,
                "pure": commutant == 1,
                "verification": v,
            });
            if let Some(r) = &r {
                if r.quotient.dim() > 0 && states::vanishes_on(omega, &r.reducing_ideal)? {
                    let tilde = states::reduce_state(omega, r)?;
                    let cert = gns::reduced_gns_equivalence(&f, r, omega, &tilde)?;
                    passed &= cert.passed;
                    dims.push(format!("({}, {})", cert.reduced_dim, cert.carrier_dim));
                    entry["reduced_equivalence"] = json!(cert);
                }
            }
            entries.push(entry);
        }
        let line = if dims.is_empty() {
            format!("{} representations", entries.len())
        } else {
            format!("reduced/carrier dims {}", dims.join(", "))
        };
        Ok(TaskOutcome {
            body: json!({ "representations": entries }),
            passed,
            line,
        })
    }

    /// Reports the obstruction verdict next to the actual purity of each
    /// state. A pure state with an obstructed verdict fails the task.
    fn purity_task(&mut self) -> Result<TaskOutcome> {
        let list = self.states()?;
        let f = self.f.clone();
        let r = self.reduction()?.clone();
        let mut entries = Vec::new();
        let mut lines = Vec::new();
        let mut passed = true;
        for (label, omega) in &list {
            let rep = gns::purity_obstruction(&f, r.normalizer.carrier(), &r.source, omega)?;
            let pure = gns::is_pure(&f, omega)?;
            let consistent = !(rep.verdict == gns::PurityVerdict::PureImpossible && pure);
            passed &= consistent;
            lines.push(format!("{label}: dim S {} of {}", rep.s_dim, rep.f_dim));
            entries.push(json!({
                "label": label,
                "obstruction": rep,
                "state_is_pure": pure,
                "consistent": consistent,
            }));
        }
        Ok(TaskOutcome {
            body: json!({ "states": entries }),
            passed,
            line: lines.join("; "),
        })
    }
}
