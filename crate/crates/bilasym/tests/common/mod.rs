//! Independent reference implementations ("oracles") for the acceptance
//! suite. These deliberately use different algorithms than the library:
//! numerical quadrature instead of continued fractions, and a counting
//! table instead of recursive assignment enumeration.

/// Student t survival function by composite Simpson quadrature.
///
/// With x = sqrt(df) tan(theta) the t density becomes proportional to
/// cos(theta)^(df-1), so the survival probability is the ratio of two
/// one-dimensional integrals over [atan(t/sqrt(df)), pi/2] and
/// [-pi/2, pi/2]. Simpson error is far below 1e-9 at this resolution.
pub fn t_survival_quadrature(t: f64, df: f64) -> f64 {
    let theta = (t / df.sqrt()).atan();
    let upper = simpson(|x| x.cos().powf(df - 1.0), theta, std::f64::consts::FRAC_PI_2, 20_000);
    let full = simpson(
        |x| x.cos().powf(df - 1.0),
        -std::f64::consts::FRAC_PI_2,
        std::f64::consts::FRAC_PI_2,
        40_000,
    );
    upper / full
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2; // even
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        sum += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

/// Exact Mann-Whitney tail probabilities by a counting table.
///
/// `count[u]` is the number of orderings of n1 group-1 and n2 group-2
/// distinct values whose statistic (group-2 over group-1 pairs) equals u.
/// Built by a recurrence on the largest element: if it belongs to group 1
/// the statistic is unchanged; if it belongs to group 2 it beats all n1
/// group-1 values. Returns one-sided P(U >= u_obs) and P(U <= u_obs).
pub fn mann_whitney_tails_oracle(n1: usize, n2: usize, u_obs: f64) -> (f64, f64) {
    let max_u = n1 * n2;
    // table[j1][j2] = distribution of U over interleavings of j1 and j2
    let mut table = vec![vec![vec![0u64; max_u + 1]; n2 + 1]; n1 + 1];
    for row in &mut table[0] {
        row[0] = 1;
    }
    for j1 in 1..=n1 {
        table[j1][0][0] = 1;
        for j2 in 1..=n2 {
            for u in 0..=j1 * j2 {
                let top_is_group1 = table[j1 - 1][j2][u];
                let top_is_group2 = if u >= j1 { table[j1][j2 - 1][u - j1] } else { 0 };
                table[j1][j2][u] = top_is_group1 + top_is_group2;
            }
        }
    }
    let dist = &table[n1][n2];
    let total: u64 = dist.iter().sum();
    let ge: u64 = (0..=max_u)
        .filter(|&u| u as f64 >= u_obs)
        .map(|u| dist[u])
        .sum();
    let le: u64 = (0..=max_u)
        .filter(|&u| u as f64 <= u_obs)
        .map(|u| dist[u])
        .sum();
    (ge as f64 / total as f64, le as f64 / total as f64)
}

/// A tie-free sample of distinct ranks whose Mann-Whitney statistic
/// equals exactly `u`: `q` group-2 values above everything, one group-2
/// value above `rem` group-1 values, the rest of group 2 below all of
/// group 1.
pub fn sample_with_u(n1: usize, n2: usize, u: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(u <= n1 * n2);
    let q = u / n1.max(1);
    let rem = u - q * n1;
    // ascending label pattern: the single mid-block group-2 value sits
    // directly above `rem` group-1 values
    let mut labels = Vec::with_capacity(n1 + n2);
    let s = usize::from(rem > 0);
    labels.extend(std::iter::repeat_n(2u8, n2 - q - s));
    labels.extend(std::iter::repeat_n(1u8, rem));
    if s == 1 {
        labels.push(2);
    }
    labels.extend(std::iter::repeat_n(1u8, n1 - rem));
    labels.extend(std::iter::repeat_n(2u8, q));
    let mut g1 = Vec::with_capacity(n1);
    let mut g2 = Vec::with_capacity(n2);
    for (rank, &label) in labels.iter().enumerate() {
        if label == 1 {
            g1.push(rank as f64 + 1.0);
        } else {
            g2.push(rank as f64 + 1.0);
        }
    }
    (g1, g2)
}
