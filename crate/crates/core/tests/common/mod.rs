#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vqa_noise::ansatz::ParamMap;
use vqa_noise::circuit::{Circuit, InitialState};
use vqa_noise::hamiltonian::Hamiltonian;
use vqa_noise::pauli::{Pauli, PauliString};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const PAULIS: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

/// Gates with random weight-1 or weight-2 generators, one parameter each
/// unless `shared` lets several gates reuse a parameter.
pub fn random_circuit(n: usize, q: usize, shared: bool, rng: &mut ChaCha8Rng) -> (Circuit, ParamMap, Vec<f64>) {
    let num_params = if shared { (q / 2).max(1) } else { q };
    let init = if rng.gen::<bool>() { InitialState::AllZero } else { InitialState::AllPlus };
    let mut c = Circuit::new(n, num_params, init).unwrap();
    for k in 0..q {
        let a = rng.gen_range(0..n);
        let mut ops = vec![(a, PAULIS[rng.gen_range(0..3)])];
        if n > 1 && rng.gen::<bool>() {
            let b = (a + rng.gen_range(1..n)) % n;
            ops.push((b, PAULIS[rng.gen_range(0..3)]));
        }
        let gen = PauliString::from_ops(n, &ops).unwrap();
        let (pid, coeff) = if shared { (rng.gen_range(0..num_params), rng.gen_range(-1.5..1.5)) } else { (k, 1.0) };
        c.push(gen, pid, coeff, 0.0).unwrap();
    }
    let pm = ParamMap::from_circuit(&c);
    let params = (0..num_params).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    (c, pm, params)
}

pub fn random_hamiltonian(n: usize, terms: usize, rng: &mut ChaCha8Rng) -> Hamiltonian {
    let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let t: Vec<(f64, PauliString)> = (0..terms)
        .map(|_| {
            let ops: Vec<(usize, Pauli)> = (0..n).map(|j| (j, all[rng.gen_range(0..4)])).collect();
            (rng.gen_range(-1.0..1.0), PauliString::from_ops(n, &ops).unwrap())
        })
        .collect();
    Hamiltonian::new(n, t).unwrap()
}
