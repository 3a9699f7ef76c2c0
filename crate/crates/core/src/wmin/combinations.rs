//! Revolving-door enumeration of t-subsets of {0, ..., n-1}: consecutive
//! subsets differ by exactly one element leaving and one entering.

/// Walks every `t`-subset of `0..n` in revolving-door order.
///
/// `visit` is called once with `None` for the initial subset `{0, ..., t-1}`
/// and then with `Some((out, in))` for each following subset.
pub fn revolving_door<F: FnMut(Option<(usize, usize)>)>(n: usize, t: usize, mut visit: F) {
    if t > n {
        return;
    }
    visit(None);
    if t == 0 || t == n {
        return;
    }
    // c[1..=t] ascending, c[t+1] = n sentinel
    let mut c = vec![0usize; t + 2];
    for (j, cj) in c.iter_mut().enumerate().take(t + 1).skip(1) {
        *cj = j - 1;
    }
    c[t + 1] = n;
    let odd = t % 2 == 1;
    loop {
        // easy case on c_1
        let mut j = 2;
        let mut increase = !odd;
        if odd {
            if c[1] + 1 < c[2] {
                c[1] += 1;
                visit(Some((c[1] - 1, c[1])));
                continue;
            }
        } else if c[1] > 0 {
            c[1] -= 1;
            visit(Some((c[1] + 1, c[1])));
            continue;
        }
        loop {
            if j > t {
                return;
            }
            if increase {
                // c_{j-1} = j - 2 here
                if c[j] + 1 < c[j + 1] {
                    let out = c[j - 1];
                    c[j - 1] = c[j];
                    c[j] += 1;
                    visit(Some((out, c[j])));
                    break;
                }
                j += 1;
            } else {
                // c_j = c_{j-1} + 1 here
                if c[j] >= j {
                    let out = c[j];
                    c[j] = c[j - 1];
                    c[j - 1] = j - 2;
                    visit(Some((out, j - 2)));
                    break;
                }
                j += 1;
            }
            increase = !increase;
        }
    }
}

/// All `t`-subsets of `0..n` as bit masks, in revolving-door order. `n <= 64`.
pub fn revolving_door_masks(n: usize, t: usize) -> Vec<u64> {
    assert!(n <= 64);
    let mut out = Vec::new();
    let mut mask = if t == 64 { u64::MAX } else { (1u64 << t) - 1 };
    revolving_door(n, t, |step| {
        if let Some((o, i)) = step {
            mask ^= (1u64 << o) | (1u64 << i);
        }
        out.push(mask);
    });
    out
}

/// `n` choose `k`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}
