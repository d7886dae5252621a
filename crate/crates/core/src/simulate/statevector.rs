use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::circuits::{Circuit, Gate};
use crate::embed::VECTOR_QUBIT_LIMIT;
use crate::error::{Error, Result};
use crate::pauli::{PauliMasks, PauliString, PauliSum};
use crate::C64;

/// States at least this wide use the threaded kernels.
const PAR_QUBITS: usize = 14;

type M2 = [[C64; 2]; 2];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rotation(axis: char, theta: f64) -> M2 {
    let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    match axis {
        'x' => [[c(co, 0.0), c(0.0, -si)], [c(0.0, -si), c(co, 0.0)]],
        'y' => [[c(co, 0.0), c(-si, 0.0)], [c(si, 0.0), c(co, 0.0)]],
        _ => [[c(co, -si), c(0.0, 0.0)], [c(0.0, 0.0), c(co, si)]],
    }
}

fn one_qubit_matrix(g: &Gate) -> Option<(usize, M2)> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    Some(match *g {
        Gate::H(q) => (q, [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]),
        Gate::X(q) => (q, [[z, o], [o, z]]),
        Gate::S(q) => (q, [[o, z], [z, c(0.0, 1.0)]]),
        Gate::Sdg(q) => (q, [[o, z], [z, c(0.0, -1.0)]]),
        Gate::RX(q, t) => (q, rotation('x', t)),
        Gate::RY(q, t) => (q, rotation('y', t)),
        Gate::RZ(q, t) => (q, rotation('z', t)),
        Gate::P(q, t) => (q, [[o, z], [z, C64::from_polar(1.0, t)]]),
        _ => return None,
    })
}

/// Dense state of `n` qubits; qubit 0 is the least significant index bit.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        assert!(n_qubits <= VECTOR_QUBIT_LIMIT, "state too large");
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = C64::new(1.0, 0.0);
        StateVector { n_qubits, amps }
    }

    /// Wraps raw amplitudes; the length must be a power of two. No normalisation is applied.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        if !crate::linalg::is_power_of_two(amps.len()) {
            return Err(Error::NotPowerOfTwo(amps.len()));
        }
        let n_qubits = amps.len().trailing_zeros() as usize;
        if n_qubits > VECTOR_QUBIT_LIMIT {
            return Err(Error::DimensionGuard { what: "state vector".into(), limit: VECTOR_QUBIT_LIMIT });
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        if self.n_qubits >= PAR_QUBITS {
            self.amps.par_iter().map(|a| a.norm_sqr()).sum()
        } else {
            self.amps.iter().map(|a| a.norm_sqr()).sum()
        }
    }

    pub fn apply_circuit(&mut self, circ: &Circuit) -> Result<()> {
        if circ.n_qubits != self.n_qubits {
            return Err(Error::QubitMismatch { left: self.n_qubits, right: circ.n_qubits });
        }
        for g in &circ.gates {
            self.apply_gate(g)?;
        }
        if circ.global_phase != 0.0 {
            self.scale(C64::from_polar(1.0, circ.global_phase));
        }
        Ok(())
    }

    pub fn scale(&mut self, k: C64) {
        self.amps.iter_mut().for_each(|a| *a *= k);
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        if let Some(&q) = g.qubits().iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::invalid(format!("gate {g} touches qubit {q} of {}", self.n_qubits)));
        }
        if let Some((q, m)) = one_qubit_matrix(g) {
            self.apply_1q(q, &m);
            return Ok(());
        }
        match g {
            Gate::CX(a, b) => {
                let s = PauliString::from_ops(self.n_qubits, [(*b, crate::pauli::Pauli::X)]);
                let ctrl = 1usize << a;
                let masks = s.masks().expect("narrow register");
                self.apply_pair_map(masks.x, |b0, x0, x1| if b0 & ctrl != 0 { (x1, x0) } else { (x0, x1) });
            }
            Gate::CP(a, b, t) => {
                let mask = (1usize << a) | (1usize << b);
                let ph = C64::from_polar(1.0, *t);
                self.apply_diagonal(|i| if i & mask == mask { ph } else { C64::new(1.0, 0.0) });
            }
            Gate::Swap(a, b) => {
                let (ma, mb) = (1usize << a, 1usize << b);
                self.apply_pair_map(ma | mb, |b0, x0, x1| {
                    if (b0 & ma == 0) != (b0 & mb == 0) {
                        (x1, x0)
                    } else {
                        (x0, x1)
                    }
                });
            }
            Gate::RXX(a, b, t) => {
                let s = PauliString::from_ops(self.n_qubits, [(*a, crate::pauli::Pauli::X), (*b, crate::pauli::Pauli::X)]);
                self.apply_pauli_rotation(&s.masks().expect("narrow register"), *t);
            }
            Gate::Rpp(s, t) => {
                if s.n_qubits() != self.n_qubits {
                    return Err(Error::QubitMismatch { left: self.n_qubits, right: s.n_qubits() });
                }
                self.apply_pauli_rotation(&s.masks().expect("narrow register"), *t);
            }
            _ => unreachable!("single-qubit gates handled above"),
        }
        Ok(())
    }

    fn apply_1q(&mut self, q: usize, m: &M2) {
        let stride = 1usize << q;
        let m = *m;
        let kernel = move |lo: &mut C64, hi: &mut C64| {
            let (a, b) = (*lo, *hi);
            *lo = m[0][0] * a + m[0][1] * b;
            *hi = m[1][0] * a + m[1][1] * b;
        };
        let chunk_kernel = move |chunk: &mut [C64]| {
            let (lo, hi) = chunk.split_at_mut(stride);
            lo.iter_mut().zip(hi.iter_mut()).for_each(|(a, b)| kernel(a, b));
        };
        if self.n_qubits < PAR_QUBITS {
            self.amps.chunks_mut(2 * stride).for_each(chunk_kernel);
        } else if self.amps.len() / (2 * stride) >= 64 {
            self.amps.par_chunks_mut(2 * stride).for_each(chunk_kernel);
        } else {
            for chunk in self.amps.chunks_mut(2 * stride) {
                let (lo, hi) = chunk.split_at_mut(stride);
                lo.par_iter_mut().zip(hi.par_iter_mut()).for_each(|(a, b)| kernel(a, b));
            }
        }
    }

    /// Multiplies amplitude `i` by `f(i)`.
    pub fn apply_diagonal(&mut self, f: impl Fn(usize) -> C64 + Sync) {
        if self.n_qubits >= PAR_QUBITS {
            self.amps.par_iter_mut().enumerate().for_each(|(i, a)| *a *= f(i));
        } else {
            self.amps.iter_mut().enumerate().for_each(|(i, a)| *a *= f(i));
        }
    }

    /// Visits every pair `(b, b ^ x)` once with `b` having the top bit of `x` clear;
    /// `f(b, ψ_b, ψ_{b^x})` returns the new pair.
    fn apply_pair_map(&mut self, x: usize, f: impl Fn(usize, C64, C64) -> (C64, C64) + Sync) {
        assert!(x != 0, "pair map needs a flip mask");
        let h = usize::BITS as usize - 1 - x.leading_zeros() as usize;
        let half = 1usize << h;
        let xr = x & !half;
        let kernel = |(ci, chunk): (usize, &mut [C64])| {
            let base = ci * 2 * half;
            let (lo, hi) = chunk.split_at_mut(half);
            for o in 0..half {
                let o2 = o ^ xr;
                let (a, b) = f(base + o, lo[o], hi[o2]);
                lo[o] = a;
                hi[o2] = b;
            }
        };
        if self.n_qubits >= PAR_QUBITS && self.amps.len() / (2 * half) >= 8 {
            self.amps.par_chunks_mut(2 * half).enumerate().for_each(kernel);
        } else {
            self.amps.chunks_mut(2 * half).enumerate().for_each(kernel);
        }
    }

    /// `exp(-iθP/2)`.
    pub fn apply_pauli_rotation(&mut self, masks: &PauliMasks, theta: f64) {
        self.apply_weighted_pauli_rotation(masks, theta, |_| 1.0);
    }

    /// `exp(-iθ w(b) P/2)` where the weight `w` may depend only on bits that `P` does not flip.
    pub fn apply_weighted_pauli_rotation(&mut self, masks: &PauliMasks, theta: f64, w: impl Fn(usize) -> f64 + Sync) {
        if masks.x == 0 {
            let m = *masks;
            self.apply_diagonal(|b| {
                let a = theta * w(b) / 2.0;
                C64::new(a.cos(), 0.0) - C64::new(0.0, a.sin()) * m.phase(b)
            });
            return;
        }
        let m = *masks;
        self.apply_pair_map(m.x, |b, lo, hi| {
            let a = theta * w(b) / 2.0;
            let (co, si) = (a.cos(), a.sin());
            let mi = C64::new(0.0, -si);
            // P|b> = phase(b)|b^x>, P|b^x> = phase(b^x)|b>
            let new_lo = lo * co + mi * m.phase(b ^ m.x) * hi;
            let new_hi = hi * co + mi * m.phase(b) * lo;
            (new_lo, new_hi)
        });
    }

    /// `⟨ψ|P|ψ⟩` for one Pauli string.
    pub fn pauli_expectation(&self, masks: &PauliMasks) -> C64 {
        let f = |(b, a): (usize, &C64)| {
            let (ph, b2) = masks.act(b);
            self.amps[b2].conj() * ph * a
        };
        if self.n_qubits >= PAR_QUBITS {
            self.amps.par_iter().enumerate().map(f).sum()
        } else {
            self.amps.iter().enumerate().map(f).sum()
        }
    }

    /// `⟨ψ|O|ψ⟩` for Hermitian `O`.
    pub fn expectation(&self, o: &PauliSum) -> Result<f64> {
        if o.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch { left: self.n_qubits, right: o.n_qubits() });
        }
        if !o.is_hermitian(1e-12) {
            return Err(Error::invalid("expectation needs a Hermitian observable"));
        }
        let mut acc = C64::new(0.0, 0.0);
        for (coef, s) in o.terms() {
            acc += coef * self.pauli_expectation(&s.masks().expect("narrow register"));
        }
        Ok(acc.re)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Marginal distribution of the `width` qubits starting at `offset`.
    pub fn marginal(&self, offset: usize, width: usize) -> Result<Vec<f64>> {
        if offset + width > self.n_qubits {
            return Err(Error::invalid("register outside the state"));
        }
        let mask = (1usize << width) - 1;
        let mut out = vec![0.0; 1 << width];
        for (i, a) in self.amps.iter().enumerate() {
            out[(i >> offset) & mask] += a.norm_sqr();
        }
        Ok(out)
    }

    /// Full-register samples drawn with `rng`.
    pub fn sample_indices(&self, shots: usize, rng: &mut impl Rng) -> Vec<usize> {
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        (0..shots)
            .map(|_| {
                let u: f64 = rng.gen::<f64>() * acc;
                cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
            })
            .collect()
    }

    /// Outcome counts of a register, reproducible for a fixed seed.
    pub fn sample(&self, offset: usize, width: usize, shots: usize, seed: u64) -> Result<Vec<u64>> {
        if offset + width > self.n_qubits {
            return Err(Error::invalid("register outside the state"));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mask = (1usize << width) - 1;
        let mut counts = vec![0u64; 1 << width];
        for i in self.sample_indices(shots, &mut rng) {
            counts[(i >> offset) & mask] += 1;
        }
        Ok(counts)
    }
}
