//! Exhaustive reference computations, independent of the crate's dynamic
//! programs. Shared by the core integration tests and the acceptance suite.

use tasktrace::model::{AlignCosts, Hmm, MarkovModel, ObservedStep, State, StateKey};
use tasktrace::{StepInstance, StepKind};

/// Minimum cost over every edit script turning `a` into `b`, found by
/// walking every script explicitly (no memoization).
pub fn brute_force_edit_cost(a: &[StepInstance], b: &[StepInstance], costs: &AlignCosts) -> f64 {
    fn pair_cost(x: &StepInstance, y: &StepInstance, c: &AlignCosts) -> f64 {
        if x.kind != y.kind {
            c.substitute
        } else if x.canonical_args() == y.canonical_args() {
            c.matched
        } else {
            c.same_kind_substitute
        }
    }
    fn walk(a: &[StepInstance], b: &[StepInstance], c: &AlignCosts, spent: f64, best: &mut f64) {
        match (a.split_first(), b.split_first()) {
            (None, None) => *best = best.min(spent),
            (Some((x, ra)), Some((y, rb))) => {
                walk(ra, rb, c, spent + pair_cost(x, y, c), best);
                walk(ra, b, c, spent + c.delete, best);
                walk(a, rb, c, spent + c.insert, best);
            }
            (Some((_, ra)), None) => walk(ra, b, c, spent + c.delete, best),
            (None, Some((_, rb))) => walk(a, rb, c, spent + c.insert, best),
        }
    }
    let mut best = f64::INFINITY;
    walk(a, b, costs, 0.0, &mut best);
    best
}

/// Every sequence of length 0..=max_len over `alphabet`.
pub fn all_sequences<T: Clone>(alphabet: &[T], max_len: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for seq in &frontier {
            for sym in alphabet {
                let mut s: Vec<T> = seq.clone();
                s.push(sym.clone());
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// (start, period, repetitions) triples chosen by a direct scan: for each
/// start and period, the largest repetition count whose region equals the
/// block repeated, then a greedy pick by coverage, start, and period.
pub fn brute_force_loops(kinds: &[StepKind], min_reps: usize) -> Vec<(usize, usize, usize)> {
    let n = kinds.len();
    let mut candidates = Vec::new();
    for start in 0..n {
        for period in 1..=n - start {
            let block = &kinds[start..start + period];
            let mut best = 0;
            for reps in 1..=(n - start) / period {
                let region = &kinds[start..start + period * reps];
                if region == block.repeat(reps).as_slice() {
                    best = reps;
                }
            }
            if best >= min_reps.max(2) {
                candidates.push((start, period, best));
            }
        }
    }
    candidates.sort_by_key(|&(s, p, r)| (std::cmp::Reverse(p * r), s, p));
    let mut used = vec![false; n];
    let mut chosen: Vec<(usize, usize, usize)> = Vec::new();
    for (s, p, r) in candidates {
        if (s..s + p * r).any(|i| used[i]) {
            continue;
        }
        (s..s + p * r).for_each(|i| used[i] = true);
        chosen.push((s, p, r));
    }
    chosen.sort();
    chosen
}

/// All hidden paths of the observation length: maximum and sum of the
/// path likelihoods, computed in probability space.
pub fn enumerate_hmm_paths(hmm: &Hmm, obs: &[ObservedStep]) -> (f64, f64) {
    let model = hmm.model();
    let n = hmm.hidden_states().len();
    let mut max = 0.0f64;
    let mut sum = 0.0f64;
    let mut path = vec![0usize; obs.len()];
    loop {
        let mut p = 1.0;
        let mut prev = State::Start;
        for (t, &s) in path.iter().enumerate() {
            let state = State::Step(hmm.hidden_states()[s].clone());
            p *= model.probability(&prev, &state) * hmm.emission(s, &obs[t]);
            prev = state;
        }
        max = max.max(p);
        sum += p;

        // odometer increment
        let mut i = 0;
        loop {
            if i == path.len() {
                return (max, sum);
            }
            path[i] += 1;
            if path[i] < n {
                break;
            }
            path[i] = 0;
            i += 1;
        }
    }
}

/// Probability that the chain takes exactly `len` step states without
/// ending, by enumerating every length-`len` path.
pub fn prefix_mass(model: &MarkovModel, len: usize) -> f64 {
    let keys: Vec<StateKey> = model.step_states().cloned().collect();
    fn go(model: &MarkovModel, keys: &[StateKey], prev: &State, left: usize, p: f64) -> f64 {
        if p == 0.0 {
            return 0.0;
        }
        if left == 0 {
            return p;
        }
        keys.iter()
            .map(|k| {
                let s = State::Step(k.clone());
                go(model, keys, &s, left - 1, p * model.probability(prev, &s))
            })
            .sum()
    }
    go(model, &keys, &State::Start, len, 1.0)
}

/// Total probability of START -> ... -> END sequences with at most
/// `max_steps` step states.
pub fn terminating_mass(model: &MarkovModel, max_steps: usize) -> f64 {
    let keys: Vec<StateKey> = model.step_states().cloned().collect();
    fn go(model: &MarkovModel, keys: &[StateKey], prev: &State, left: usize, p: f64) -> f64 {
        if p == 0.0 {
            return 0.0;
        }
        let mut total = p * model.probability(prev, &State::End);
        if left > 0 {
            for k in keys {
                let s = State::Step(k.clone());
                total += go(model, keys, &s, left - 1, p * model.probability(prev, &s));
            }
        }
        total
    }
    go(model, &keys, &State::Start, max_steps, 1.0)
}

/// Trace-level self-check: total mass of each state row.
pub fn row_sum(model: &MarkovModel, from: &State) -> f64 {
    model
        .successor_alphabet()
        .map(|to| model.probability(from, to))
        .sum()
}
