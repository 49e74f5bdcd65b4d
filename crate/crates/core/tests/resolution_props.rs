mod common;

use std::collections::BTreeSet;

use common::{atom, domains, non_bot_value, program, pu, pw, VARIABLES};
use proptest::prelude::*;
use qlp_core::axioms::sample_grid;
use qlp_core::resolution::{initial_state, resolution_step, GoalState};
use qlp_core::unify::VarSupply;
use qlp_core::{
    parse_goal, solve, Domain, GoalItem, InitialGoal, Program, QVar, QualConstraint, SearchConfig, SearchStatus,
    Selection,
};

fn goal(domain: &Domain) -> BoxedStrategy<InitialGoal> {
    let d = domain.clone();
    proptest::collection::vec((atom(2, &VARIABLES), non_bot_value(domain)), 1..3)
        .prop_map(move |items| {
            let items = items
                .into_iter()
                .enumerate()
                .map(|(i, (atom, threshold))| GoalItem {
                    atom,
                    qvar: QVar::new(&format!("W{}", i + 1)),
                    threshold,
                })
                .collect();
            InitialGoal::new(d.clone(), items).unwrap()
        })
        .boxed()
}

/// Every condition a reachable goal state must meet.
fn check_state(domain: &Domain, s: &GoalState) -> Result<(), String> {
    if !s.sigma.is_idempotent() {
        return Err(format!("sigma not idempotent: {}", s.sigma));
    }
    let mut goal_vars = Vec::new();
    for (a, _) in &s.atoms {
        a.collect_vars(&mut goal_vars);
    }
    if let Some((x, _)) = s.sigma.iter().find(|(x, _)| goal_vars.contains(x)) {
        return Err(format!("{x} is bound yet occurs in the goal"));
    }
    if !s.store.is_admissible(domain) {
        return Err(format!("store not admissible: {}", s.store.display(domain)));
    }
    let atom_qvars: Vec<&QVar> = s.atoms.iter().map(|(_, w)| w).collect();
    let distinct: BTreeSet<&QVar> = atom_qvars.iter().copied().collect();
    if distinct.len() != atom_qvars.len() {
        return Err("qualification variable shared by two atoms".into());
    }
    let thresholds: BTreeSet<&QVar> = s
        .store
        .constraints()
        .iter()
        .filter_map(|c| match c {
            QualConstraint::Threshold { w, .. } => Some(w),
            _ => None,
        })
        .collect();
    if thresholds != distinct {
        return Err(format!("thresholds do not match goal atoms: {}", s.store.display(domain)));
    }
    Ok(())
}

fn any_domain() -> impl Strategy<Value = Domain> {
    (0..domains().len()).prop_map(|i| domains()[i].clone())
}

fn case() -> impl Strategy<Value = (Program, InitialGoal, Vec<(usize, usize)>)> {
    any_domain().prop_flat_map(|d| {
        (
            program(&d, 6),
            goal(&d),
            proptest::collection::vec((any::<usize>(), any::<usize>()), 1..12),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn random_walks_preserve_goal_invariants((p, g, choices) in case()) {
        let domain = p.domain().clone();
        let mut state = initial_state(&g);
        prop_assert!(check_state(&domain, &state).is_ok());
        let mut supply = VarSupply::new("_G");
        for (atom_pick, clause_pick) in choices {
            if state.is_solved() {
                break;
            }
            let index = atom_pick % state.atoms.len();
            let clause = &p.clauses()[clause_pick % p.clauses().len()];
            if let Some(step) = resolution_step(&domain, &state, index, clause, &mut supply, true, None) {
                if let Err(e) = check_state(&domain, &step.state) {
                    return Err(TestCaseError::fail(format!("{e}\nafter {}", step.state.display(&domain))));
                }
                state = step.state;
            }
        }
        if state.is_solved() {
            // defining constraints are equations, so their solution is unique
            let omega = state.store.omega(&domain).unwrap();
            prop_assert!(state.store.check_solution(&domain, &omega));
            for (w, v) in omega.iter() {
                for other in sample_grid(&domain) {
                    if other == *v {
                        continue;
                    }
                    let mut rho = omega.clone();
                    rho.insert(w.clone(), other);
                    prop_assert!(!state.store.check_solution(&domain, &rho));
                }
            }
        }
    }
}

fn answer_set(p: &Program, goal: &str, config: SearchConfig) -> (BTreeSet<String>, SearchStatus, u64) {
    let g = parse_goal(goal, p.domain()).unwrap();
    let mut solver = solve(p, &g, config).unwrap();
    let answers: BTreeSet<String> = solver.by_ref().map(|a| format!("{} | {}", a.sigma, a.mu)).collect();
    (answers, solver.status(), solver.steps())
}

#[test]
fn pruning_changes_effort_but_not_answers() {
    let cases = [
        (pu(), "cruel(X)#W | W>=0.3"),
        (pu(), "eats(X,Y)#W | W>=0.5"),
        (pu(), "human(X)#W1, eats(X,Y)#W2 | W1>=0.75, W2>=0.5"),
        (pw(), "eats(X,Y)#W | W<=3"),
        (pw(), "cruel(X)#W | W<=4"),
    ];
    for (p, goal) in cases {
        // unpruned searches only end under a depth bound
        let bounded = |prune| SearchConfig {
            max_depth: Some(9),
            prune,
            ..SearchConfig::default()
        };
        let (with, _, pruned_steps) = answer_set(&p, goal, bounded(true));
        let (without, _, unpruned_steps) = answer_set(&p, goal, bounded(false));
        assert_eq!(with, without, "{goal}");
        assert!(pruned_steps < unpruned_steps, "{goal}: {pruned_steps} vs {unpruned_steps}");
    }
}

#[test]
fn selection_order_changes_search_not_answers() {
    for (p, goal) in [(pu(), "cruel(X)#W | W>=0.3"), (pw(), "cruel(X)#W | W<=4")] {
        let (left, s1, _) = answer_set(&p, goal, SearchConfig::default());
        let right_config = SearchConfig {
            selection: Selection::Rightmost,
            max_depth: Some(12),
            ..SearchConfig::default()
        };
        let (right, _, _) = answer_set(&p, goal, right_config);
        assert_eq!(s1, SearchStatus::Exhausted, "{goal}");
        assert!(left.is_subset(&right), "{goal}");
    }
}
