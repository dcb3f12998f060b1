//! Statevector kernels. Every kernel is a pure per-element or per-pair map,
//! so the result does not depend on how rayon splits the work.

use num_complex::Complex64;
use rayon::prelude::*;

/// Below this dimension kernels run sequentially.
const PAR_THRESHOLD: usize = 1 << 14;

pub fn uniform_state(dim: usize) -> Vec<Complex64> {
    let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    vec![amp; dim]
}

/// `ψ_x ← e^{-iγ C(x)} ψ_x`.
pub fn apply_phase(state: &mut [Complex64], costs: &[f64], gamma: f64) {
    let kernel = |(a, &c): (&mut Complex64, &f64)| *a *= Complex64::from_polar(1.0, -gamma * c);
    if state.len() >= PAR_THRESHOLD {
        state.par_iter_mut().zip(costs.par_iter()).for_each(kernel);
    } else {
        state.iter_mut().zip(costs.iter()).for_each(kernel);
    }
}

/// Applies the 2x2 matrix `[[c, -i s], [-i s, c]]` to amplitude pairs.
#[inline]
fn rotate(a: &mut Complex64, b: &mut Complex64, c: f64, s: f64) {
    let (x, y) = (*a, *b);
    *a = Complex64::new(c * x.re + s * y.im, c * x.im - s * y.re);
    *b = Complex64::new(c * y.re + s * x.im, c * y.im - s * x.re);
}

/// Runs `f(lo, hi)` on every pair split at `half` inside blocks of `2·half`.
fn for_pairs<F>(state: &mut [Complex64], half: usize, f: F)
where
    F: Fn(&mut [Complex64], &mut [Complex64]) + Sync,
{
    let block = 2 * half;
    let work = |chunk: &mut [Complex64]| {
        for pair in chunk.chunks_exact_mut(block) {
            let (lo, hi) = pair.split_at_mut(half);
            f(lo, hi);
        }
    };
    if state.len() >= PAR_THRESHOLD {
        state.par_chunks_mut(block.max(PAR_THRESHOLD / 4)).for_each(work);
    } else {
        work(state);
    }
}

/// Transverse-field mixer `e^{-iβ H_M}` with `H_M = -Σ σ^x`, i.e. the
/// single-qubit rotation `cos β · I + i sin β · σ^x` on every qubit.
pub fn apply_transverse(state: &mut [Complex64], num_qubits: usize, beta: f64) {
    // the rotate kernel uses -i s, so pass -sin β
    let (c, s) = (beta.cos(), -beta.sin());
    for q in 0..num_qubits {
        for_pairs(state, 1 << q, |lo, hi| {
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                rotate(a, b, c, s);
            }
        });
    }
}

/// XY pair rotation `e^{-iβ(XX + YY)}` on qubits `i`, `j` of a full
/// statevector: `[[cos 2β, -i sin 2β], [-i sin 2β, cos 2β]]` on
/// `{|10⟩, |01⟩}`, identity on `|00⟩` and `|11⟩`.
pub fn apply_xy_pair_full(state: &mut [Complex64], i: usize, j: usize, beta: f64) {
    let (c, s) = ((2.0 * beta).cos(), (2.0 * beta).sin());
    let (bi, bj) = (1usize << i, 1usize << j);
    for idx in 0..state.len() {
        if idx & bi != 0 && idx & bj == 0 {
            let partner = idx ^ bi ^ bj;
            let (mut a, mut b) = (state[idx], state[partner]);
            rotate(&mut a, &mut b, c, s);
            state[idx] = a;
            state[partner] = b;
        }
    }
}

/// Position pairs (0-based) of the XY mixer layers in application order:
/// even layer `(1,2), (3,4), …`, odd layer `(2,3), (4,5), …` (1-based), then
/// the wrap pair `(k, 1)` when `k` is odd.
pub fn xy_layers(k: usize) -> Vec<Vec<(usize, usize)>> {
    let even: Vec<_> = (0..k.saturating_sub(1)).step_by(2).map(|i| (i, i + 1)).collect();
    let odd: Vec<_> = (1..k.saturating_sub(1)).step_by(2).map(|i| (i, i + 1)).collect();
    let mut layers = vec![even, odd];
    if k % 2 == 1 && k > 2 {
        layers.push(vec![(k - 1, 0)]);
    }
    layers
}

/// XY mixer on a product of one-hot blocks of size `k`. A basis index is
/// `Σ_t a_t k^t` where `a_t` is the hot position of block `t`; the number of
/// blocks follows from the state length.
pub fn apply_xy_subspace(state: &mut [Complex64], k: usize, beta: f64) {
    let (c, s) = ((2.0 * beta).cos(), (2.0 * beta).sin());
    let dim = state.len();
    for layer in xy_layers(k) {
        let mut stride = 1;
        while stride < dim {
            let span = stride * k;
            for &(pi, pj) in &layer {
                for base in (0..dim).step_by(span) {
                    for lo in 0..stride {
                        let ii = base + lo + pi * stride;
                        let jj = base + lo + pj * stride;
                        let (mut a, mut b) = (state[ii], state[jj]);
                        rotate(&mut a, &mut b, c, s);
                        state[ii] = a;
                        state[jj] = b;
                    }
                }
            }
            stride = span;
        }
    }
}

/// Grover mixer `e^{-iβ|s⟩⟨s|}` with `|s⟩` uniform:
/// `ψ ← ψ + (e^{-iβ} - 1)⟨s|ψ⟩ s`.
pub fn apply_grover(state: &mut [Complex64], beta: f64) {
    let n = state.len() as f64;
    let overlap: Complex64 = state.iter().sum::<Complex64>() / n.sqrt();
    let shift = (Complex64::from_polar(1.0, -beta) - 1.0) * overlap / n.sqrt();
    state.iter_mut().for_each(|a| *a += shift);
}

pub fn probabilities(state: &[Complex64]) -> Vec<f64> {
    if state.len() >= PAR_THRESHOLD {
        state.par_iter().map(|a| a.norm_sqr()).collect()
    } else {
        state.iter().map(|a| a.norm_sqr()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Dense 2x2 product for checking the single-qubit closed form.
    fn mat_vec(m: [[Complex64; 2]; 2], v: [Complex64; 2]) -> [Complex64; 2] {
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    #[test]
    fn one_qubit_matches_hand_product() {
        let beta = std::f64::consts::FRAC_PI_4;
        for &gamma in &[0.0, 0.3, 1.1, 2.5] {
            let costs = [0.0, 1.0];
            let mut st = uniform_state(2);
            apply_phase(&mut st, &costs, gamma);
            apply_transverse(&mut st, 1, beta);

            let h = 1.0 / 2f64.sqrt();
            let phase = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), Complex64::from_polar(1.0, -gamma)]];
            let mixer = [[c(beta.cos(), 0.0), c(0.0, beta.sin())], [c(0.0, beta.sin()), c(beta.cos(), 0.0)]];
            let v = mat_vec(mixer, mat_vec(phase, [c(h, 0.0), c(h, 0.0)]));
            assert!((st[0] - v[0]).norm() < 1e-12 && (st[1] - v[1]).norm() < 1e-12);
            // closed form P(x = 1) = (1 - sin γ) / 2
            assert!((st[1].norm_sqr() - (1.0 - gamma.sin()) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn transverse_preserves_norm_and_uniform_fixed_point() {
        let mut st = uniform_state(1 << 15);
        apply_transverse(&mut st, 15, 0.37);
        let total: f64 = probabilities(&st).iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        // uniform state is an eigenvector of every σ^x
        let p = probabilities(&st);
        assert!(p.iter().all(|&x| (x - 1.0 / 32768.0).abs() < 1e-15));
    }

    #[test]
    fn xy_pair_full_transfer() {
        // |10⟩ in (qubit0 = 1, qubit1 = 0) order is index 1
        let mut st = vec![c(0.0, 0.0); 4];
        st[1] = c(1.0, 0.0);
        apply_xy_pair_full(&mut st, 0, 1, std::f64::consts::FRAC_PI_4);
        assert!((st[2] - c(0.0, -1.0)).norm() < 1e-12);
        assert!(st[1].norm() < 1e-12);
    }

    #[test]
    fn xy_subspace_single_block() {
        let mut st = vec![c(1.0, 0.0), c(0.0, 0.0)];
        apply_xy_subspace(&mut st, 2, std::f64::consts::FRAC_PI_4);
        assert!(st[0].norm() < 1e-12);
        assert!((st[1] - c(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn layer_pairs() {
        assert_eq!(xy_layers(2), vec![vec![(0, 1)], vec![]]);
        assert_eq!(xy_layers(3), vec![vec![(0, 1)], vec![(1, 2)], vec![(2, 0)]]);
        assert_eq!(xy_layers(4), vec![vec![(0, 1), (2, 3)], vec![(1, 2)]]);
        assert_eq!(xy_layers(5), vec![vec![(0, 1), (2, 3)], vec![(1, 2), (3, 4)], vec![(4, 0)]]);
    }

    #[test]
    fn grover_identity_at_two_pi() {
        let mut st: Vec<Complex64> = (0..6).map(|i| c(i as f64, -(i as f64) / 2.0)).collect();
        let before = st.clone();
        apply_grover(&mut st, std::f64::consts::TAU);
        for (a, b) in st.iter().zip(&before) {
            assert!((a - b).norm() < 1e-12);
        }
        let mut u = uniform_state(6);
        apply_grover(&mut u, 0.8);
        let p = probabilities(&u);
        assert!(p.iter().all(|&x| (x - 1.0 / 6.0).abs() < 1e-12));
    }
}
