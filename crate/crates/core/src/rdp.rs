//! Rényi-DP under concurrent composition.
//!
//! Optimal adversaries are found by exhaustive search over the deterministic
//! strategies of [`crate::interactive::enumerate_adversaries_on`]; the search
//! space is finite, so an optimum always exists.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{renyi_divergence, ExtReal};
use crate::error::{Error, Result};
use crate::interactive::{
    count_adversaries, enumerate_adversaries_on, view_distribution, AdversaryStrategy, ConcurrentComposition, Mechanism, Step, HALT,
};
use crate::tol;

/// Rényi divergences below the best value by at most this much count as ties.
const TIE: f64 = 1e-12;

/// The strategy maximizing `D_alpha(view(x) || view(x_prime))`, with its
/// value. Ties go to the earliest strategy in canonical order.
pub fn optimal_rdp_adversary(
    m: &Mechanism,
    x: &str,
    x_prime: &str,
    alpha: f64,
    guard: u64,
) -> Result<(AdversaryStrategy, ExtReal)> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::InvalidOrder(alpha));
    }
    let adversaries = enumerate_adversaries_on(m, &[x, x_prime], guard)?;
    let values = adversaries
        .par_iter()
        .map(|b| renyi_divergence(&view_distribution(m, x, b)?, &view_distribution(m, x_prime, b)?, alpha))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        let better = match (*v, values[best]) {
            (ExtReal::Infinity, ExtReal::Finite(_)) => true,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a > b + TIE,
            _ => false,
        };
        if better {
            best = i;
        }
    }
    Ok((adversaries[best].clone(), values[best]))
}

/// Round-robin order of components over the composed adversary rounds:
/// every component's first query, then every second query, and so on.
pub fn round_robin(comp: &ConcurrentComposition) -> Vec<usize> {
    let rounds: Vec<usize> = comp.components().iter().map(Mechanism::adversary_rounds).collect();
    let longest = rounds.iter().copied().max().unwrap_or(0);
    let rounds = &rounds;
    (0..longest)
        .flat_map(|s| (0..rounds.len()).filter(move |&j| s < rounds[j]))
        .collect()
}

/// Plays component `j` by `bs[j]`, seeing only that component's own answers,
/// in the [`round_robin`] order.
pub fn product_adversary(comp: &ConcurrentComposition, bs: &[AdversaryStrategy]) -> Result<AdversaryStrategy> {
    product_adversary_with_schedule(comp, bs, &round_robin(comp))
}

/// As [`product_adversary`] with an explicit component order. `schedule`
/// must name each component once per adversary round it has.
pub fn product_adversary_with_schedule(
    comp: &ConcurrentComposition,
    bs: &[AdversaryStrategy],
    schedule: &[usize],
) -> Result<AdversaryStrategy> {
    let k = comp.components().len();
    if bs.len() != k {
        return Err(Error::InvalidParam(format!("{} strategies for {k} components", bs.len())));
    }
    for j in 0..k {
        let expected = comp.components()[j].adversary_rounds();
        if schedule.iter().filter(|&&s| s == j).count() != expected || schedule.iter().any(|&s| s >= k) {
            return Err(Error::InvalidParam(format!(
                "schedule must list component {j} exactly {expected} times"
            )));
        }
    }
    let mut walk = ProductWalk {
        comp,
        bs,
        schedule,
        choices: BTreeMap::new(),
    };
    let live: Vec<&str> = comp.mechanism().datasets().iter().map(String::as_str).collect();
    walk.visit(&live, &mut Vec::new(), &mut vec![Vec::new(); k], 0)?;
    Ok(AdversaryStrategy::new(walk.choices))
}

struct ProductWalk<'a> {
    comp: &'a ConcurrentComposition,
    bs: &'a [AdversaryStrategy],
    schedule: &'a [usize],
    choices: BTreeMap<Vec<String>, String>,
}

impl ProductWalk<'_> {
    /// Supported answers, each with the live datasets that can produce it.
    fn answers<'d>(&self, live: &[&'d str], steps: &[Step], query: &str) -> Result<Vec<(String, Vec<&'d str>)>> {
        let m = self.comp.mechanism();
        let mut out: BTreeMap<String, Vec<&'d str>> = BTreeMap::new();
        for &d in live {
            for (o, _) in m.kernel(d, steps, query)?.support() {
                out.entry(o.as_text().expect("validated answer label").to_string()).or_default().push(d);
            }
        }
        Ok(out.into_iter().collect())
    }

    fn visit(&mut self, live: &[&str], steps: &mut Vec<Step>, own: &mut Vec<Vec<String>>, turn: usize) -> Result<()> {
        let m = self.comp.mechanism();
        if steps.len() == m.depth() {
            return Ok(());
        }
        if steps.is_empty() && m.mech_first() {
            for (label, reach) in self.answers(live, steps, "")? {
                let parts = self.comp.prologue_answers(&label).expect("recorded prologue").to_vec();
                let first = (0..own.len()).filter(|&j| self.comp.components()[j].mech_first());
                for (j, a) in first.zip(&parts) {
                    own[j].push(a.clone());
                }
                steps.push((String::new(), label));
                self.visit(&reach, steps, own, turn)?;
                steps.pop();
                for (j, c) in self.comp.components().iter().enumerate() {
                    if c.mech_first() {
                        own[j].pop();
                    }
                }
            }
            return Ok(());
        }
        let j = self.schedule[turn];
        let component = &self.comp.components()[j];
        // histories the component cannot produce fall back to its first query
        let q = match self.bs[j].choose(&own[j]) {
            Ok(q) => q.to_string(),
            Err(_) => component
                .rounds()
                .get(own[j].len())
                .and_then(|r| r.queries.first())
                .or_else(|| component.rounds().iter().flat_map(|r| &r.queries).next())
                .cloned()
                .expect("scheduled component takes queries"),
        };
        let tagged = self.comp.tagged_query(j, &q);
        let history: Vec<String> = steps.iter().map(|s| s.1.clone()).collect();
        self.choices.insert(history, tagged.clone());
        for (a, reach) in self.answers(live, steps, &tagged)? {
            let halted = a == HALT;
            if !halted {
                own[j].push(a.clone());
            }
            steps.push((tagged.clone(), a));
            self.visit(&reach, steps, own, turn + 1)?;
            steps.pop();
            if !halted {
                own[j].pop();
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdpReport {
    pub alpha: f64,
    /// `ε_i` of each component on its own.
    pub component_optima: Vec<ExtReal>,
    pub component_sum: ExtReal,
    /// Exhaustive optimum over every deterministic strategy on the composition.
    pub concurrent_optimum: ExtReal,
    pub optimal_strategy: AdversaryStrategy,
    /// Divergence reached by the product of the component optima.
    pub product_value: ExtReal,
    pub adversaries: usize,
    /// Some optimum is infinite (a support violation).
    pub infinite: bool,
    pub passed: bool,
}

/// Checks that the concurrent α-RDP optimum equals the sum of the component
/// optima and is reached by the product of the optimal component strategies.
/// Every component must carry both `x` and `x_prime`.
pub fn verify_rdp_concurrent(
    ms: &[Mechanism],
    x: &str,
    x_prime: &str,
    alpha: f64,
    guard: u64,
) -> Result<RdpReport> {
    let comp = ConcurrentComposition::new(ms)?;
    let mut optima = Vec::with_capacity(ms.len());
    let mut strategies = Vec::with_capacity(ms.len());
    for m in ms {
        let (b, eps) = optimal_rdp_adversary(m, x, x_prime, alpha, guard)?;
        strategies.push(b);
        optima.push(eps);
    }
    let composed = |d: &str| {
        comp.composed_dataset(&vec![d; ms.len()])
            .map(str::to_string)
            .ok_or_else(|| Error::InvalidParam(format!("dataset {d:?} missing from a component")))
    };
    let (cx, cx_prime) = (composed(x)?, composed(x_prime)?);
    let m = comp.mechanism();
    let adversaries = count_adversaries(m, &[&cx, &cx_prime])? as usize;
    let (optimal_strategy, concurrent_optimum) = optimal_rdp_adversary(m, &cx, &cx_prime, alpha, guard)?;
    let pb = product_adversary(&comp, &strategies)?;
    let product_value = renyi_divergence(
        &view_distribution(m, &cx, &pb)?,
        &view_distribution(m, &cx_prime, &pb)?,
        alpha,
    )?;
    let component_sum: ExtReal = optima.iter().copied().sum();
    let infinite = !concurrent_optimum.is_finite() || optima.iter().any(|e| !e.is_finite());
    let passed = concurrent_optimum.approx_eq(component_sum, tol::EQ) && product_value.approx_eq(component_sum, tol::EQ);
    Ok(RdpReport {
        alpha,
        component_optima: optima,
        component_sum,
        concurrent_optimum,
        optimal_strategy,
        product_value,
        adversaries,
        infinite,
        passed,
    })
}
