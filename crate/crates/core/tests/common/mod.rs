//! Oracles derived by hand from the constructions, independent of the
//! library's model code.
#![allow(dead_code)]

/// `T(x_1, x_2, x_3)` written in terms of `h_j = H(x_j)`.
pub fn t_df(h1: f64, h2: f64, h3: f64) -> f64 {
    0.5 * h1 * h2 * h3 + 0.25 * h1 * h2.min(h3) + 0.25 * h2 * h1.min(h3)
}

/// P(no two consecutive successes among `m` Bernoulli(`f`) trials).
pub fn no_two_consecutive(f: f64, m: usize) -> f64 {
    // (last trial failed, last trial succeeded)
    let (mut a, mut b) = (1.0 - f, f);
    for _ in 1..m {
        (a, b) = ((a + b) * (1.0 - f), a * f);
    }
    a + b
}

/// Exact `P(M_n ≤ u_n)` for the ±X sequence with only one of the two
/// components thresholded at intensity `tau`.
/// `negated = false`: `X_i = max(Y_i, Y_{i+1}) ≤ u` for all i, i.e. all
/// n + 1 Y below `u`, with `F(u)^2 = 1 − τ/n`.
/// `negated = true`: `−X_i ≤ v` for all i, i.e. no two consecutive Y
/// below `−v`, with `F(−v)^2 = τ/n`.
pub fn max_ar_block_probability(negated: bool, n: usize, tau: f64) -> f64 {
    let s = tau / n as f64;
    if negated {
        no_two_consecutive(s.sqrt(), n + 1)
    } else {
        (1.0 - s).powf((n + 1) as f64 / 2.0)
    }
}

/// `Q(u_n) = P(X_1 ≤ u_n)` for the single thresholded ±X component.
pub fn max_ar_marginal(n: usize, tau: f64) -> f64 {
    1.0 - tau / n as f64
}

/// Exact `P(Z_1, …, Z_{n+2} ≤ u)` for the 3-dependent construction, with
/// every component at the same level `H(u) = 1 − s`.
///
/// Conditioning on `e_i = 1{U_i > u}`, the coin picks `U_i` or `U_{i+1}`,
/// so `P(Z_i ≤ u | e) = ½(1 − e_i) + ½(1 − e_{i+1})`.
pub fn three_dependent_block_probability(n: usize, s: f64) -> f64 {
    let pe = [1.0 - s, s];
    let w = |a: usize, b: usize| 0.5 * (1 - a) as f64 + 0.5 * (1 - b) as f64;
    let mut v = pe;
    for _ in 0..n + 2 {
        let mut next = [0.0; 2];
        for (b, slot) in next.iter_mut().enumerate() {
            *slot = (0..2).map(|a| v[a] * w(a, b) * pe[b]).sum();
        }
        v = next;
    }
    v[0] + v[1]
}

/// Whether `|p̂ − p| ≤ 3σ` for `hits` out of `total`, σ from `p`.
pub fn within_3sigma(hits: usize, total: usize, p: f64) -> bool {
    let p_hat = hits as f64 / total as f64;
    (p_hat - p).abs() <= 3.0 * (p * (1.0 - p) / total as f64).sqrt()
}
