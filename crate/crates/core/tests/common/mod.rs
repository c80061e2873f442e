//! Reference implementations used as oracles by the integration tests.
//! None of them share code paths with the library's counting or tail code.

#![allow(dead_code)]

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// All-pairs scan of the coincidence condition
/// `(t_a - tau) - t_b` in `[0, delT]` (directional) or `[-delT, delT]`
/// (symmetric). Returns `(K_p, K_t)`.
pub fn brute_force_counts(a: &[f64], b: &[f64], delt: f64, sym: bool, tau: f64) -> (usize, usize) {
    let lo = if sym { -delt } else { 0.0 };
    let matches = |ta: f64, tb: f64| {
        let d = (ta - tau) - tb;
        d >= lo && d <= delt
    };
    let k_p = a
        .iter()
        .filter(|&&ta| b.iter().any(|&tb| matches(ta, tb)))
        .count();
    let k_t = b
        .iter()
        .filter(|&&tb| a.iter().any(|&ta| matches(ta, tb)))
        .count();
    (k_p, k_t)
}

/// Decomposes a finite positive `x` as `mantissa * 2^exp`.
fn dyadic(x: f64) -> (u64, i32) {
    assert!(x > 0.0 && x.is_finite());
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if raw_exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), raw_exp - 1075)
    }
}

/// `num / 2^den_bits` as the nearest-ish f64 (error below 2^-60 relative).
fn ratio_to_f64(num: &BigUint, den_bits: u64) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let bits = num.bits();
    let shift = bits.saturating_sub(64);
    let top = (num >> shift).to_u64().unwrap() as f64;
    let mut exp = shift as i64 - den_bits as i64;
    let mut value = top;
    while exp > 0 {
        let step = exp.min(1000);
        value *= 2f64.powi(step as i32);
        exp -= step;
    }
    while exp < 0 {
        let step = (-exp).min(1000);
        value *= 2f64.powi(-(step as i32));
        exp += step;
    }
    value
}

/// Exact binomial upper tails `P(X >= k)` for `k = 0..=n`, computed with
/// big integers over the exact dyadic value of `p`.
pub fn exact_upper_tails(n: u64, p: f64) -> Vec<f64> {
    assert!(p > 0.0 && p < 1.0);
    let (m, e) = dyadic(p);
    assert!(e < 0);
    let den_bits = (-e) as u64;
    let m = BigUint::from(m);
    let d = BigUint::one() << den_bits;
    let q = &d - &m;

    let mut p_pow = vec![BigUint::one()];
    let mut q_pow = vec![BigUint::one()];
    for i in 1..=n as usize {
        p_pow.push(&p_pow[i - 1] * &m);
        q_pow.push(&q_pow[i - 1] * &q);
    }
    let mut choose = vec![BigUint::one()];
    for k in 1..=n {
        let next = &choose[(k - 1) as usize] * BigUint::from(n - k + 1) / BigUint::from(k);
        choose.push(next);
    }
    let terms: Vec<BigUint> = (0..=n as usize)
        .map(|k| &choose[k] * &p_pow[k] * &q_pow[n as usize - k])
        .collect();

    let mut tails = vec![0.0; n as usize + 1];
    let mut acc = BigUint::zero();
    for k in (0..=n as usize).rev() {
        acc += &terms[k];
        tails[k] = ratio_to_f64(&acc, den_bits * n);
    }
    tails
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Exact permutation-null tails `P(K_p >= kp_obs)`, `P(K_t >= kt_obs)` for
/// two series of `n_a` and `n_b` events placed uniformly on `1..=len`,
/// by enumerating every placement.
#[allow(clippy::too_many_arguments)]
pub fn exact_shuffle_tails(
    len: usize,
    n_a: usize,
    n_b: usize,
    delt: f64,
    sym: bool,
    tau: f64,
    kp_obs: usize,
    kt_obs: usize,
) -> (f64, f64) {
    let as_times = |c: &Vec<usize>| c.iter().map(|&i| (i + 1) as f64).collect::<Vec<_>>();
    let ca = combinations(len, n_a);
    let cb = combinations(len, n_b);
    let (mut hp, mut ht, mut total) = (0usize, 0usize, 0usize);
    for a in &ca {
        let ta = as_times(a);
        for b in &cb {
            let (kp, kt) = brute_force_counts(&ta, &as_times(b), delt, sym, tau);
            hp += (kp >= kp_obs) as usize;
            ht += (kt >= kt_obs) as usize;
            total += 1;
        }
    }
    (hp as f64 / total as f64, ht as f64 / total as f64)
}

/// Minimal deterministic generator for building synthetic inputs, kept
/// separate from the library's RNG streams.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Bernoulli(`rate`) indicator series of length `len`.
pub fn bernoulli_series(rng: &mut SplitMix, len: usize, rate: f64) -> Vec<u8> {
    (0..len).map(|_| (rng.uniform() < rate) as u8).collect()
}

/// Length-`len` indicator series with events exactly at the 1-based
/// positions given.
pub fn series_with_events(len: usize, events: &[usize]) -> Vec<u8> {
    let mut v = vec![0u8; len];
    for &e in events {
        v[e - 1] = 1;
    }
    v
}

/// Two length-`len` series with `n_a` and `n_b` events sharing exactly `k`
/// positions.
pub fn overlapping_pair(len: usize, n_a: usize, n_b: usize, k: usize) -> (Vec<u8>, Vec<u8>) {
    assert!(k <= n_a && k <= n_b && n_a + n_b - k <= len);
    // shared events first, then A-only, then B-only, spread over the series
    let stride = len / (n_a + n_b - k);
    let slots: Vec<usize> = (0..n_a + n_b - k).map(|i| 1 + i * stride).collect();
    let a_pos: Vec<usize> = slots[..n_a].to_vec();
    let b_pos: Vec<usize> = slots[..k].iter().chain(&slots[n_a..]).copied().collect();
    (
        series_with_events(len, &a_pos),
        series_with_events(len, &b_pos),
    )
}
