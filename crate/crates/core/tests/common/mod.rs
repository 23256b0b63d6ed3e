//! Test oracles that share no code with the library's algorithms.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relrep::search::cnf::CnfInstance;
use relrep::{extract_tables, generate_closure, FiniteAlgebra, Relation};

pub type Pairs = BTreeSet<(usize, usize)>;

pub fn pairs_of(r: &Relation) -> Pairs {
    let n = r.base_size();
    (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| r.contains(x, y)).collect()
}

pub fn naive_compose(a: &Pairs, b: &Pairs) -> Pairs {
    let mut out = Pairs::new();
    for &(x, z) in a {
        for &(z2, y) in b {
            if z == z2 {
                out.insert((x, y));
            }
        }
    }
    out
}

pub fn naive_meet(a: &Pairs, b: &Pairs) -> Pairs {
    a.intersection(b).copied().collect()
}

/// Closure of a set of pair sets under composition and intersection.
pub fn naive_closure(seeds: &[Pairs]) -> HashSet<Pairs> {
    let mut all: Vec<Pairs> = Vec::new();
    let mut seen: HashSet<Pairs> = HashSet::new();
    for s in seeds {
        if seen.insert(s.clone()) {
            all.push(s.clone());
        }
    }
    // Every pair (i, j) with max(i, j) = k is combined when k is reached.
    let mut k = 0;
    while k < all.len() {
        for i in 0..=k {
            let (a, b) = (all[i].clone(), all[k].clone());
            for c in [naive_compose(&a, &b), naive_compose(&b, &a), naive_meet(&a, &b)] {
                if seen.insert(c.clone()) {
                    all.push(c);
                }
            }
        }
        k += 1;
    }
    seen
}

fn mask_to_pairs(mask: u64, n: usize) -> Pairs {
    (0..n * n).filter(|i| mask >> i & 1 == 1).map(|i| (i / n, i % n)).collect()
}

/// Images for every element making the tables hold with distinct images, by
/// enumerating all `2^(n²·m)` candidates. Only for tiny `n` and `m`.
pub fn brute_force_representation(alg: &FiniteAlgebra, n: usize) -> Option<Vec<Pairs>> {
    let m = alg.len();
    let per = 1u64 << (n * n);
    assert!((per as f64).powi(m as i32) <= 2f64.powi(24), "brute force too large");
    let rels: Vec<Pairs> = (0..per).map(|k| mask_to_pairs(k, n)).collect();
    let mut idx = vec![0u64; m];
    loop {
        let imgs: Vec<&Pairs> = idx.iter().map(|&k| &rels[k as usize]).collect();
        let distinct = (0..m).all(|a| (a + 1..m).all(|b| idx[a] != idx[b]));
        let tables = distinct
            && (0..m).all(|a| {
                (0..m).all(|b| {
                    naive_compose(imgs[a], imgs[b]) == *imgs[alg.comp(a, b)]
                        && naive_meet(imgs[a], imgs[b]) == *imgs[alg.meet(a, b)]
                })
            });
        if tables {
            return Some(imgs.into_iter().cloned().collect());
        }
        let mut i = m;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < per {
                break;
            }
            idx[i] = 0;
        }
    }
}

#[allow(clippy::needless_range_loop)]
fn random_tables(rng: &mut ChaCha8Rng) -> FiniteAlgebra {
    let m = rng.random_range(2..=4);
    let names: Vec<String> = (0..m).map(|i| format!("a{i}")).collect();
    let table = |rng: &mut ChaCha8Rng| -> Vec<Vec<usize>> {
        (0..m).map(|_| (0..m).map(|_| rng.random_range(0..m)).collect()).collect()
    };
    let comp = table(rng);
    let mut meet = table(rng);
    // Commutative idempotent meet more often yields instances that survive
    // the first few decisions.
    if rng.random_bool(0.5) {
        for a in 0..m {
            meet[a][a] = a;
            for b in 0..a {
                meet[a][b] = meet[b][a];
            }
        }
    }
    FiniteAlgebra::new(names, comp, meet).unwrap()
}

fn random_closure(rng: &mut ChaCha8Rng) -> Option<FiniteAlgebra> {
    let n = rng.random_range(1..=2);
    let k = rng.random_range(1..=2);
    let seeds: Vec<(String, Relation)> = (0..k)
        .map(|i| {
            let mask: u64 = rng.random_range(0..1u64 << (n * n));
            let pairs = (0..n * n).filter(|j| mask >> j & 1 == 1).map(|j| (j / n, j % n));
            (format!("s{i}"), Relation::from_pairs(n, pairs).unwrap())
        })
        .collect();
    let model = generate_closure(seeds).ok()?;
    if model.len() > 4 {
        return None;
    }
    let alg = extract_tables(&model).ok()?;
    let mut order: Vec<usize> = (0..alg.len()).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    Some(alg.reordered(&order).unwrap())
}

/// Seeded mix of random tables (mostly unrepresentable) and tables of
/// concrete models over one or two points (representable by construction).
pub fn corpus(count: usize, seed: u64) -> Vec<FiniteAlgebra> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if out.len() % 2 == 0 {
            out.push(random_tables(&mut rng));
        } else if let Some(alg) = random_closure(&mut rng) {
            out.push(alg);
        }
    }
    out
}

/// Runs the DIMACS text through an independent CDCL solver. Returns the
/// model as signed literals when satisfiable.
pub fn solve_dimacs(cnf: &CnfInstance) -> Option<Vec<i32>> {
    use varisat::Solver;
    let mut solver = Solver::new();
    solver.add_dimacs_cnf(cnf.to_dimacs().as_bytes()).expect("well-formed DIMACS");
    if !solver.solve().expect("solver runs") {
        return None;
    }
    Some(solver.model().unwrap().iter().map(|l| l.to_dimacs() as i32).collect())
}
