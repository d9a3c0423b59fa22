//! The theorem suite: every structural result that can be decided on a finite
//! instance, checked in a fixed order with witnesses for every verdict.

use qrt_core::measures::{
    check_additivity_family, check_consistency, check_monotonicity, inconsistency_detector, uniqueness_report,
    Counterexample, MeasureError, MeasureVerdict, ResourceContext, ResourceMeasure, ResourceValue, SandwichStatus,
    SetStatus, Verdict,
};
use qrt_core::model::{RMaxRule, State};
use qrt_core::preorder::minimal_set;
use qrt_core::rates::{ExtRational, Replication};

/// Random words sampled per numeric monotonicity check.
pub const MONOTONICITY_SAMPLES: usize = 100;

/// A replayable conversion recorded with a verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessRecord {
    pub from: String,
    pub to: String,
    pub n: usize,
    pub m: usize,
    pub word: Option<String>,
    pub replayed: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremCheck {
    pub name: String,
    /// The statement being checked, in words.
    pub statement: String,
    pub verdict: Verdict,
    pub detail: String,
    pub witnesses: Vec<WitnessRecord>,
}

impl TheoremCheck {
    fn new(name: &str, statement: &str, verdict: Verdict, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            statement: statement.into(),
            verdict,
            detail: detail.into(),
            witnesses: Vec::new(),
        }
    }
}

fn fail(states: Vec<String>, values: Vec<f64>, detail: String) -> Verdict {
    Verdict::Fail(Counterexample {
        states,
        word: None,
        word_text: None,
        values,
        detail,
    })
}

/// On discrete instances a violated inequality is a failure; numeric rates
/// are horizon estimates, so a violation there is only inconclusive.
fn violated(exact: bool, states: Vec<String>, values: Vec<f64>, detail: String) -> Verdict {
    if exact {
        fail(states, values, detail)
    } else {
        Verdict::Inconclusive(format!("horizon estimate: {detail}"))
    }
}

struct Suite<'c, 'a> {
    ctx: &'c mut ResourceContext<'a>,
    n_max: usize,
    seed: u64,
    exact: bool,
    checks: Vec<TheoremCheck>,
}

/// Runs the suite on a prepared context.
pub fn theorem_suite(
    ctx: &mut ResourceContext<'_>,
    measures: &[ResourceMeasure],
    n_max: usize,
    seed: u64,
) -> Result<Vec<TheoremCheck>, MeasureError> {
    let exact = ctx.exact();
    let mut s = Suite {
        ctx,
        n_max,
        seed,
        exact,
        checks: Vec::new(),
    };
    s.maximal_existence()?;
    s.maximal_not_free()?;
    s.free_is_minimal()?;
    s.reciprocity()?;
    s.rate_chain()?;
    s.dichotomy()?;
    s.copies_invariance()?;
    s.equivalent_state_rates()?;
    s.bounds()?;
    s.maximal_sufficiency()?;
    s.preorder_monotonicity()?;
    s.weak_subadditivity()?;
    s.cost_maximizer()?;
    s.distillation_below_cost()?;
    for m in measures {
        s.measure_checks(m)?;
    }
    s.detector()?;
    Ok(s.checks)
}

impl Suite<'_, '_> {
    fn push(&mut self, check: TheoremCheck) {
        self.checks.push(check);
    }

    fn levels(&self) -> Vec<usize> {
        self.ctx.levels.keys().copied().collect()
    }

    fn roster(&self, level: usize) -> Vec<(String, State)> {
        self.ctx.levels[&level]
            .relation
            .roster
            .iter()
            .map(|r| (r.label.clone(), r.state.clone()))
            .collect()
    }

    fn all_states(&self) -> Vec<(usize, String, State)> {
        self.levels()
            .into_iter()
            .flat_map(|l| self.roster(l).into_iter().map(move |(a, s)| (l, a, s)))
            .collect()
    }

    /// The bounds assume S \ F ≠ ∅ on the system; a level of free states alone is out of scope.
    fn has_resource(&self, level: usize) -> Result<bool, MeasureError> {
        for (_, s) in self.roster(level) {
            if !self.ctx.is_free(&s)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn catalytic(&mut self, s: &State) -> Result<bool, MeasureError> {
        Ok(self.ctx.engine.replication(s)?.catalytically_replicable())
    }

    fn maximal_existence(&mut self) -> Result<(), MeasureError> {
        const NAME: &str = "maximal existence";
        const STATEMENT: &str = "every finite roster has a maximally resourceful state, and every state lies below one";
        let mut parts = Vec::new();
        let mut verdict = Verdict::Pass;
        for (&level, data) in &self.ctx.levels {
            let labels: Vec<&str> = data.maximal.members.iter().map(|&i| data.relation.roster[i].label.as_str()).collect();
            parts.push(format!("level {level}: G = {{{}}}", labels.join(", ")));
            if labels.is_empty() {
                verdict = fail(vec![], vec![], format!("level {level} has no maximal state"));
                break;
            }
            if let Some(p) = data.maximal.upper_bounds.iter().position(Option::is_none) {
                let label = data.relation.roster[p].label.clone();
                verdict = fail(vec![label], vec![], format!("no maximal state above it at level {level}"));
                break;
            }
            if let Some((i, j)) = data.relation.witness_failure(self.ctx.q)? {
                let states = vec![data.relation.roster[i].label.clone(), data.relation.roster[j].label.clone()];
                verdict = fail(states, vec![], "the preorder witness does not replay".into());
                break;
            }
        }
        self.push(TheoremCheck::new(NAME, STATEMENT, verdict, parts.join("; ")));
        Ok(())
    }

    fn maximal_not_free(&mut self) -> Result<(), MeasureError> {
        const NAME: &str = "maximal states are not free";
        const STATEMENT: &str = "when some state is not free, no maximally resourceful state is free";
        let mut checked = 0;
        let mut verdict = Verdict::Pass;
        for (&level, data) in &self.ctx.levels {
            let free: Vec<bool> = data.relation.roster.iter().map(|r| data.free.contains(&r.state)).collect();
            if free.iter().all(|&f| f) {
                continue;
            }
            checked += 1;
            if let Some(&g) = data.maximal.members.iter().find(|&&g| free[g]) {
                let label = data.relation.roster[g].label.clone();
                verdict = fail(vec![label], vec![], format!("maximal and free at level {level}"));
                break;
            }
        }
        if checked == 0 {
            verdict = Verdict::Inconclusive("every roster state is free".into());
        }
        self.push(TheoremCheck::new(NAME, STATEMENT, verdict, format!("{checked} levels with resource states")));
        Ok(())
    }

    fn free_is_minimal(&mut self) -> Result<(), MeasureError> {
        const NAME: &str = "free states are minimal";
        const STATEMENT: &str = "when free states exist, they are exactly the minimal states";
        let mut checked = 0;
        let mut verdict = Verdict::Pass;
        for (&level, data) in &self.ctx.levels {
            if data.free.is_empty() {
                continue;
            }
            checked += 1;
            let free: Vec<usize> = (0..data.relation.len())
                .filter(|&i| data.free.contains(&data.relation.roster[i].state))
                .collect();
            let minimal = minimal_set(&data.relation);
            if free != minimal {
                let label = |v: &[usize]| v.iter().map(|&i| data.relation.roster[i].label.clone()).collect::<Vec<_>>().join(", ");
                verdict = fail(
                    vec![],
                    vec![],
                    format!("level {level}: free {{{}}} but minimal {{{}}}", label(&free), label(&minimal)),
                );
                break;
            }
        }
        if checked == 0 {
            verdict = Verdict::Inconclusive("no free roster states".into());
        }
        self.push(TheoremCheck::new(NAME, STATEMENT, verdict, format!("{checked} levels with free states")));
        Ok(())
    }

    fn reciprocity(&mut self) -> Result<(), MeasureError> {
        const NAME: &str = "reciprocity";
        const STATEMENT: &str = "the copies-in rate r′(φ→ψ) equals 1/r(φ→ψ), with 1/∞ = 0 and 1/0 = ∞";
        let mut verdict = Verdict::Pass;
        let mut pairs = 0;
        'outer: for level in self.levels() {
            let roster = self.roster(level);
            for (a, sa) in &roster {
                for (b, sb) in &roster {
                    let rep = self.ctx.engine.reciprocity(sa, sb)?;
                    pairs += 1;
                    if !rep.consistent {
                        let detail = format!("r = {}, r′ = {}", rep.rate, rep.reciprocal);
                        verdict = violated(self.exact, vec![a.clone(), b.clone()], vec![], detail);
                        break 'outer;
                    }
                }
            }
        }
        self.push(TheoremCheck::new(NAME, STATEMENT, verdict, format!("{pairs} same-level pairs")));
        Ok(())
    }

    fn rate_chain(&mut self) -> Result<(), MeasureError> {
        const NAME: &str = "rate chain";
        const STATEMENT: &str = "r(ρ→ω) ≥ r(ρ→σ)·r(σ→ω), with the composed witness replayed";
        let roster = self.ctx.levels.get(&1).map(|_| self.roster(1)).unwrap_or_default();
        let mut verdict = Verdict::Pass;
        let mut triples = 0;
        let mut witnesses = Vec::new();
        'outer: for (a, sa) in &roster {
            for (b, sb) in &roster {
                for (c, sc) in &roster {
                    let rep = self.ctx.engine.chain_check(sa, sb, sc)?;
                    triples += 1;
                    if !rep.holds {
                        let detail = format!(
                            "r(ρ→ω) = {} but r(ρ→σ)·r(σ→ω) = {} (composed witness replays: {:?})",
                            rep.direct, rep.product, rep.composed_replays
                        );
                        verdict = violated(self.exact, vec![a.clone(), b.clone(), c.clone()], vec![], detail);
                        break 'outer;
                    }
                    if witnesses.is_empty() && a != c {
                        if let (Some(w), Some(true)) = (&rep.composed, rep.composed_replays) {
                            let word = self.ctx.engine.plan_word(&w.plan).ok().map(|x| self.ctx.q.format_word(&x));
                            witnesses.push(WitnessRecord {
                                from: a.clone(),
                                to: c.clone(),
                                n: w.n,
                                m: w.m,
                                word,
                                replayed: Some(true),
                            });
                        }
                    }
                }
            }
        }
        if triples == 0 {
            verdict = Verdict::Inconclusive("no level-1 roster".into());
        }
        let mut check = TheoremCheck::new(NAME, STATEMENT, verdict, format!("{triples} level-1 triples"));
        check.witnesses = witnesses;
        self.push(check);
        Ok(())
    }

    fn dichotomy(&mut self) -> Result<(), MeasureError> {
        const NAME: &str = "replication dichotomy";
        const STATEMENT: &str = "r(ψ→ψ) is either 1 or ∞: a single witnessed amplification makes it unbounded";
        let mut verdict = Verdict::Pass;
        let mut parts = Vec::new();
        let mut witnesses = Vec::new();
        let mut unknown = 0;
        for (_, label, s) in self.all_states() {
            let rep = self.ctx.engine.replication(&s)?;
            let est = self.ctx.engine.estimate(&s, &s)?;
            let amplifies = est.witnesses.iter().any(|w| w.m > w.n);
            match rep.verdict {
                Replication::Infinite => {
                    let Some(w) = rep.witness.clone() else {
                        verdict = fail(vec![label], vec![], "INFINITE without a witness".into());
                        break;
                    };
                    let replayed = if self.ctx.engine.can_replay(&w.plan) {
                        Some(self.ctx.engine.witness_replays(&w, &s, &s)?)
                    } else {
                        None
                    };
                    if replayed == Some(false) {
                        verdict = fail(vec![label], vec![], "the replication witness does not replay".into());
                        break;
                    }
                    parts.push(format!("{label} replication: INFINITE ({} → {} copies)", w.n, w.m));
                    let word = self.ctx.engine.plan_word(&w.plan).ok().map(|x| self.ctx.q.format_word(&x));
                    witnesses.push(WitnessRecord {
                        from: label.clone(),
                        to: label,
                        n: w.n,
                        m: w.m,
                        word,
                        replayed,
                    });
                }
                Replication::Unit => {
                    if amplifies {
                        verdict = fail(vec![label], vec![], "UNIT despite a witness with m > n".into());
                        break;
                    }
                    parts.push(format!("{label} replication: UNIT"));
                }
                Replication::Unknown => {
                    unknown += 1;
                    parts.push(format!("{label} replication: UNKNOWN"));
                }
            }
        }
        if verdict.is_pass() && unknown > 0 {
            verdict = Verdict::Inconclusive(format!("{unknown} states without a certified UNIT verdict"));
        }
        let mut check = TheoremCheck::new(NAME, STATEMENT, verdict, parts.join("; "));
        check.witnesses = witnesses;
        self.push(check);
        Ok(())
    }

    fn copies_invariance(&mut self) -> Result<(), MeasureError> {
        const NAME: &str = "copies invariance";
        const STATEMENT: &str = "r(ψ^⊗n → φ^⊗n) = r(ψ → φ)";
        let roster = self.ctx.levels.get(&1).map(|_| self.roster(1)).unwrap_or_default();
        let mut verdict = Verdict::Pass;
        let mut checked = 0;
        'outer: for (a, sa) in &roster {
            for (b, sb) in &roster {
                let base = self.ctx.engine.rate_value(sa, sb)?;
                for n in 2..=self.n_max {
                    let (pa, pb) = (sa.tensor_power(n), sb.tensor_power(n));
                    let Ok(r) = self.ctx.engine.rate_value(&pa, &pb) else { continue };
                    checked += 1;
                    if r != base {
                        verdict = fail(vec![a.clone(), b.clone()], vec![], format!("n = {n}: {r} against {base}"));
                        break 'outer;
                    }
                }
            }
        }
        if checked == 0 {
            verdict = Verdict::Inconclusive("no tensor powers of roster states in the rate graph".into());
        }
        self.push(TheoremCheck::new(NAME, STATEMENT, verdict, format!("{checked} (pair, n) cases")));
        Ok(())
    }

    fn equivalent_state_rates(&mut self) -> Result<(), MeasureError> {
        const NAME: &str = "equivalent-state rates";
        const STATEMENT: &str =
            "φ ⪰ ψ makes φ harder to reach and better to convert from; equivalent states convert at rate 1 absent catalysis";
        let mut verdict = Verdict::Pass;
        let mut checked = 0;
        'outer: for level in self.levels() {
            let roster = self.roster(level);
            let reaches = self.ctx.levels[&level].relation.reaches.clone();
            let n = roster.len();
            let rate = |ctx: &ResourceContext<'_>, i: usize, j: usize| ctx.engine.rate_value(&roster[i].1, &roster[j].1);
            for i in 0..n {
                for j in (0..n).filter(|&j| reaches[i][j] && j != i) {
                    for k in 0..n {
                        checked += 1;
                        let (to_i, to_j) = (rate(self.ctx, k, i)?, rate(self.ctx, k, j)?);
                        let (from_i, from_j) = (rate(self.ctx, i, k)?, rate(self.ctx, j, k)?);
                        if to_i > to_j || from_j > from_i {
                            let detail = format!(
                                "{} ⪰ {} yet r(ρ→φ) = {to_i} vs r(ρ→ψ) = {to_j}, r(ψ→ρ) = {from_j} vs r(φ→ρ) = {from_i}",
                                roster[i].0, roster[j].0
                            );
                            let states = vec![roster[i].0.clone(), roster[j].0.clone(), roster[k].0.clone()];
                            verdict = violated(self.exact, states, vec![], detail);
                            break 'outer;
                        }
                    }
                    if reaches[j][i] && rate(self.ctx, i, i)? == ExtRational::one() {
                        checked += 1;
                        let (ij, ji) = (rate(self.ctx, i, j)?, rate(self.ctx, j, i)?);
                        if ij != ExtRational::one() || ji != ExtRational::one() {
                            let detail = format!("equivalent, yet r = {ij} one way and {ji} the other");
                            verdict = violated(self.exact, vec![roster[i].0.clone(), roster[j].0.clone()], vec![], detail);
                            break 'outer;
                        }
                    }
                }
            }
        }
        self.push(TheoremCheck::new(NAME, STATEMENT, verdict, format!("{checked} comparisons")));
        Ok(())
    }

    fn values(&self, s: &State) -> Result<(ResourceValue, ResourceValue), MeasureError> {
        Ok((self.ctx.distillable_resource(s)?, self.ctx.resource_cost(s)?))
    }

    fn bounds(&mut self) -> Result<(), MeasureError> {
        const NAME: &str = "distillation and cost bounds";
        const STATEMENT: &str =
            "0 ≤ R_D, R_C ≤ R_max off catalysis, both 0 on free states; catalytic states have R_C = 0 and R_D ∈ {0, ∞}";
        let mut verdict = Verdict::Pass;
        let mut parts = Vec::new();
        let mut checked = 0;
        'outer: for level in self.levels() {
            if !self.has_resource(level)? {
                parts.push(format!("level {level}: every state free"));
                continue;
            }
            checked += 1;
            let (mult, _) = self.ctx.r_max_units(level);
            for (label, s) in self.roster(level) {
                let (rd, rc) = self.values(&s)?;
                parts.push(format!("{label}: R_D = {rd}, R_C = {rc}"));
                let free = self.ctx.is_free(&s)?;
                let problem = if self.catalytic(&s)? {
                    let rd_ok = rd.units.is_zero() || rd.units.is_infinite();
                    (!rc.units.is_zero() || !rd_ok).then_some("catalytic state off R_C = 0, R_D ∈ {0, ∞}")
                } else if free {
                    (!rd.units.is_zero() || !rc.units.is_zero()).then_some("free state with a nonzero value")
                } else {
                    (rd.units > mult || rc.units > mult).then_some("value above R_max")
                };
                if let Some(p) = problem {
                    verdict = violated(self.exact, vec![label], vec![rd.value(), rc.value()], p.to_string());
                    break 'outer;
                }
            }
        }
        if checked == 0 {
            verdict = Verdict::Inconclusive("every roster state is free".into());
        }
        self.push(TheoremCheck::new(NAME, STATEMENT, verdict, parts.join("; ")));
        Ok(())
    }

    fn maximal_sufficiency(&mut self) -> Result<(), MeasureError> {
        const NAME: &str = "maximal states suffice";
        const STATEMENT: &str = "the infima defining R_D and R_C over all states are attained on the maximal states";
        let mut verdict = Verdict::Pass;
        let mut checked = 0;
        'outer: for level in self.levels() {
            for (label, s) in self.roster(level) {
                checked += 1;
                let (rd, rc) = self.values(&s)?;
                let (rd_all, rc_all) = (self.ctx.distillable_over_roster(&s)?, self.ctx.cost_over_roster(&s)?);
                if rd.units != rd_all.units || rc.units != rc_all.units {
                    let detail = format!("over G: ({rd}, {rc}); over the roster: ({rd_all}, {rc_all})");
                    verdict = violated(self.exact, vec![label], vec![rd.value(), rd_all.value()], detail);
                    break 'outer;
                }
            }
        }
        self.push(TheoremCheck::new(NAME, STATEMENT, verdict, format!("{checked} roster states")));
        Ok(())
    }

    fn preorder_monotonicity(&mut self) -> Result<(), MeasureError> {
        const NAME: &str = "preorder monotonicity of R_D and R_C";
        const STATEMENT: &str = "φ ⪰ ψ implies R_D(ψ) ≤ R_D(φ) and R_C(ψ) ≤ R_C(φ)";
        let mut verdict = Verdict::Pass;
        let mut checked = 0;
        'outer: for level in self.levels() {
            let roster = self.roster(level);
            let reaches = self.ctx.levels[&level].relation.reaches.clone();
            let values = roster.iter().map(|(_, s)| self.values(s)).collect::<Result<Vec<_>, _>>()?;
            for i in 0..roster.len() {
                for j in (0..roster.len()).filter(|&j| reaches[i][j]) {
                    checked += 1;
                    let ((di, ci), (dj, cj)) = (&values[i], &values[j]);
                    if dj.units > di.units || cj.units > ci.units {
                        let detail = format!("{} ⪰ {} with (R_D, R_C) = ({di}, {ci}) and ({dj}, {cj})", roster[i].0, roster[j].0);
                        verdict = violated(self.exact, vec![roster[i].0.clone(), roster[j].0.clone()], vec![], detail);
                        break 'outer;
                    }
                }
            }
        }
        self.push(TheoremCheck::new(NAME, STATEMENT, verdict, format!("{checked} ordered pairs")));
        Ok(())
    }

    fn weak_subadditivity(&mut self) -> Result<(), MeasureError> {
        const NAME: &str = "weak subadditivity";
        const STATEMENT: &str = "with R_max = log₂ dim, R_D(ψ^⊗n) ≤ n·R_D(ψ) and R_C(ψ^⊗n) ≤ n·R_C(ψ)";
        if self.ctx.q.r_max != RMaxRule::Log2Dim {
            let v = Verdict::Inconclusive("R_max is not log₂ dim".into());
            self.push(TheoremCheck::new(NAME, STATEMENT, v, ""));
            return Ok(());
        }
        let mut verdict = Verdict::Pass;
        let mut checked = 0;
        'outer: for level in self.levels() {
            for (label, s) in self.roster(level) {
                let (rd, rc) = self.values(&s)?;
                for n in 2..=self.n_max {
                    if !self.ctx.levels.contains_key(&(n * level)) {
                        break;
                    }
                    let power = s.tensor_power(n);
                    let (Ok(rdn), Ok(rcn)) = (self.ctx.distillable_resource(&power), self.ctx.resource_cost(&power)) else {
                        continue;
                    };
                    checked += 1;
                    let k = ExtRational::ratio(n as u64, 1);
                    if rdn.units > rd.units.mul(&k) || rcn.units > rc.units.mul(&k) {
                        let detail = format!("n = {n}: R_D = {rdn} vs n·{rd}, R_C = {rcn} vs n·{rc}");
                        verdict = violated(self.exact, vec![label], vec![rdn.value(), rcn.value()], detail);
                        break 'outer;
                    }
                }
            }
        }
        if checked == 0 {
            verdict = Verdict::Inconclusive("no tensor powers within the roster levels".into());
        }
        self.push(TheoremCheck::new(NAME, STATEMENT, verdict, format!("{checked} (state, n) cases")));
        Ok(())
    }

    fn cost_maximizer(&mut self) -> Result<(), MeasureError> {
        const NAME: &str = "cost maximizer";
        const STATEMENT: &str =
            "with finitely many maximal classes, resource states and no catalysis, some maximal state has R_C = R_max";
        let mut verdict = Verdict::Pass;
        let mut parts = Vec::new();
        let mut checked = 0;
        for level in self.levels() {
            let roster = self.roster(level);
            let mut resource = false;
            let mut catalysis = false;
            for (_, s) in &roster {
                if !self.ctx.is_free(s)? {
                    resource = true;
                    catalysis |= self.catalytic(s)?;
                }
            }
            if !resource || catalysis {
                continue;
            }
            checked += 1;
            let (mult, _) = self.ctx.r_max_units(level);
            let members = self.ctx.levels[&level].maximal.members.clone();
            let mut hit = None;
            for &g in &members {
                if self.ctx.resource_cost(&roster[g].1)?.units == mult {
                    hit = Some(roster[g].0.clone());
                    break;
                }
            }
            match hit {
                Some(label) => parts.push(format!("level {level}: R_C({label}) = R_max")),
                None => {
                    let detail = format!("level {level}: no maximal state attains R_C = R_max");
                    verdict = violated(self.exact, vec![], vec![], detail);
                    break;
                }
            }
        }
        if checked == 0 {
            verdict = Verdict::Inconclusive("no level without catalysis that has resource states".into());
        }
        self.push(TheoremCheck::new(NAME, STATEMENT, verdict, parts.join("; ")));
        Ok(())
    }

    fn distillation_below_cost(&mut self) -> Result<(), MeasureError> {
        const NAME: &str = "distillation below cost";
        const STATEMENT: &str = "R_D ≤ R_C when every resource state has r(ψ→ψ) = 1";
        let mut states = Vec::new();
        for (level, label, s) in self.all_states() {
            if self.has_resource(level)? {
                states.push((level, label, s));
            }
        }
        if states.is_empty() {
            let v = Verdict::Inconclusive("every roster state is free".into());
            self.push(TheoremCheck::new(NAME, STATEMENT, v, ""));
            return Ok(());
        }
        let mut catalytic = Vec::new();
        let mut unknown = 0;
        for (_, label, s) in &states {
            if self.ctx.is_free(s)? {
                continue;
            }
            let rep = self.ctx.engine.replication(s)?;
            match rep.verdict {
                Replication::Infinite => catalytic.push(label.clone()),
                Replication::Unknown => unknown += 1,
                Replication::Unit => {}
            }
        }
        if !catalytic.is_empty() {
            let mut parts = Vec::new();
            for (_, label, s) in states.iter().filter(|(_, l, _)| catalytic.contains(l)) {
                let (rd, rc) = self.values(s)?;
                parts.push(format!("{label}: R_D = {rd}, R_C = {rc}"));
            }
            let v = Verdict::Inconclusive(format!(
                "catalytic exception: {} catalytically replicable, generated without any cost",
                catalytic.join(", ")
            ));
            self.push(TheoremCheck::new(NAME, STATEMENT, v, parts.join("; ")));
            return Ok(());
        }
        let mut verdict = Verdict::Pass;
        for (_, label, s) in &states {
            let (rd, rc) = self.values(s)?;
            if rd.units > rc.units {
                verdict = violated(self.exact, vec![label.clone()], vec![rd.value(), rc.value()], format!("R_D = {rd} > R_C = {rc}"));
                break;
            }
        }
        if verdict.is_pass() && unknown > 0 {
            verdict = Verdict::Inconclusive(format!("{unknown} states without a certified UNIT verdict"));
        }
        self.push(TheoremCheck::new(NAME, STATEMENT, verdict, format!("{} roster states", states.len())));
        Ok(())
    }

    fn push_measure(&mut self, measure: &str, v: MeasureVerdict, statement: &str) {
        let mut check = TheoremCheck::new(&format!("measure {measure}: {}", v.property), statement, v.verdict, v.note);
        if let Some(cx) = check.verdict.counterexample() {
            check.witnesses.push(WitnessRecord {
                from: cx.states.first().cloned().unwrap_or_default(),
                to: cx.states.get(1).cloned().unwrap_or_default(),
                n: 1,
                m: 1,
                word: cx.word_text.clone(),
                replayed: None,
            });
        }
        self.push(check);
    }

    fn measure_checks(&mut self, m: &ResourceMeasure) -> Result<(), MeasureError> {
        let q = self.ctx.q;
        let mono = check_monotonicity(self.ctx, m, q.max_level, MONOTONICITY_SAMPLES, self.seed)?;
        self.push_measure(&m.name, mono, "R does not increase under free operations");
        let singles: Vec<State> = self.ctx.levels.get(&1).map(|_| self.roster(1)).unwrap_or_default().into_iter().map(|(_, s)| s).collect();
        let pairs: Vec<(State, State)> = singles
            .iter()
            .flat_map(|a| singles.iter().map(move |b| (a.clone(), b.clone())))
            .collect();
        for v in check_additivity_family(self.ctx, m, &pairs, self.n_max)? {
            let statement = match v.property.as_str() {
                "subadditivity" => "R(ψ⊗φ) ≤ R(ψ) + R(φ)",
                "superadditivity" => "R(ψ⊗φ) ≥ R(ψ) + R(φ)",
                "strong superadditivity" => "R(ω) ≥ R(ω_A) + R(ω_B)",
                "weak additivity" => "R(ψ^⊗n) = n·R(ψ)",
                _ => "a weakly additive measure vanishes on free states",
            };
            self.push_measure(&m.name, v, statement);
        }
        let consistency = check_consistency(self.ctx, m, self.n_max)?;
        self.push_measure(&m.name, consistency, "R(ψ)·r(φ→ψ) ≤ R(φ) for every witnessed rate");

        let states: Vec<State> = self.all_states().into_iter().map(|(_, _, s)| s).collect();
        let report = uniqueness_report(self.ctx, m, &states, self.n_max)?;
        let mut parts = Vec::new();
        for e in &report.sandwich {
            let v = e.value.map(|x| x.to_string()).unwrap_or_else(|| "undefined".into());
            let tag = match e.status {
                SandwichStatus::Holds => "holds",
                SandwichStatus::Violated => "violated",
                SandwichStatus::CatalyticException => "catalytic exception",
                SandwichStatus::OutsideDomain => "outside the domain",
            };
            parts.push(format!("{}: {} ≤ {v} ≤ {} ({tag})", e.state, e.distillable, e.cost));
        }
        let sandwich = TheoremCheck::new(
            &format!("measure {}: sandwich", m.name),
            "R_D(ψ) ≤ R(ψ) ≤ R_C(ψ) for measures meeting either hypothesis set",
            report.sandwich_verdict(),
            parts.join("; "),
        );
        self.push(sandwich);
        let summary: Vec<String> = report
            .hypotheses
            .iter()
            .map(|h| {
                let status = match h.status {
                    SetStatus::Satisfied => "SATISFIED",
                    SetStatus::Refuted => "REFUTED",
                    SetStatus::Undecided => "UNDECIDED",
                };
                let members: Vec<String> = h.verdicts.iter().map(|v| format!("{} {}", v.property, v.verdict.tag())).collect();
                format!("{}: {status} ({})", h.name, members.join(", "))
            })
            .collect();
        let verdict = if report.hypotheses.iter().any(|h| h.status == SetStatus::Satisfied) {
            Verdict::Pass
        } else {
            Verdict::Inconclusive("no hypothesis set is fully certified".into())
        };
        self.push(TheoremCheck::new(
            &format!("measure {}: hypothesis sets", m.name),
            "which sufficient hypotheses for the sandwich the measure meets",
            verdict,
            summary.join("; "),
        ));
        Ok(())
    }

    fn detector(&mut self) -> Result<(), MeasureError> {
        const NAME: &str = "inconsistency detector";
        const STATEMENT: &str = "a witnessed rate above 1 between two maximal classes rules out conventionally normalized, asymptotically continuous, weakly additive measures";
        let report = inconsistency_detector(self.ctx)?;
        let mut witnesses = Vec::new();
        let mut verdict = Verdict::Pass;
        for f in &report.findings {
            if !f.replayed {
                verdict = fail(vec![f.from.clone(), f.to.clone()], vec![], "cross-class witness does not replay".into());
            }
            witnesses.push(WitnessRecord {
                from: f.from.clone(),
                to: f.to.clone(),
                n: f.witness.n,
                m: f.witness.m,
                word: f.word.clone(),
                replayed: Some(f.replayed),
            });
        }
        let detail = match (&report.message, report.findings.first()) {
            (Some(msg), Some(f)) => format!("fires: {} → {} at rate {} at level {}; {msg}", f.from, f.to, f.rate, f.level),
            _ => "silent: no witnessed amplification between maximal classes".into(),
        };
        let mut check = TheoremCheck::new(NAME, STATEMENT, verdict, detail);
        check.witnesses = witnesses;
        self.push(check);
        Ok(())
    }
}
