use std::sync::OnceLock;

use crate::error::{Error, Result};

fn ln_fact(n: i64) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut v = vec![0.0; 1025];
        for k in 1..v.len() {
            v[k] = v[k - 1] + (k as f64).ln();
        }
        v
    });
    let n = n as usize;
    if n < t.len() {
        t[n]
    } else {
        t[t.len() - 1] + ((t.len())..=n).map(|k| (k as f64).ln()).sum::<f64>()
    }
}

/// Clebsch–Gordan coefficient `⟨j1 m1; j2 m2 | J M⟩` with all arguments doubled.
/// Inputs must already be consistent half-integers.
pub fn cg_doubled(j1: i64, m1: i64, j2: i64, m2: i64, j: i64, m: i64) -> f64 {
    if m1 + m2 != m || j < (j1 - j2).abs() || j > j1 + j2 || (j1 + j2 + j) % 2 != 0 {
        return 0.0;
    }
    if m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return 0.0;
    }
    // undoubled integer combinations
    let h = |x: i64| x / 2;
    let a = h(j + j1 - j2);
    let b = h(j - j1 + j2);
    let c = h(j1 + j2 - j);
    let d = h(j1 + j2 + j) + 1;
    let pre = 0.5
        * (((j + 1) as f64).ln() + ln_fact(a) + ln_fact(b) + ln_fact(c) - ln_fact(d)
            + ln_fact(h(j + m))
            + ln_fact(h(j - m))
            + ln_fact(h(j1 - m1))
            + ln_fact(h(j1 + m1))
            + ln_fact(h(j2 - m2))
            + ln_fact(h(j2 + m2)));
    let e1 = c;
    let e2 = h(j1 - m1);
    let e3 = h(j2 + m2);
    let e4 = h(j - j2 + m1);
    let e5 = h(j - j1 - m2);
    let kmin = 0.max(-e4).max(-e5);
    let kmax = e1.min(e2).min(e3);
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for k in kmin..=kmax {
        let ln = pre
            - ln_fact(k)
            - ln_fact(e1 - k)
            - ln_fact(e2 - k)
            - ln_fact(e3 - k)
            - ln_fact(e4 + k)
            - ln_fact(e5 + k);
        let term = if k % 2 == 0 { ln.exp() } else { -ln.exp() };
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

fn doubled(x: f64) -> Result<i64> {
    let d = 2.0 * x;
    if !d.is_finite() || (d - d.round()).abs() > 1e-9 {
        return Err(Error::invalid(format!("{x} is not a half-integer")));
    }
    Ok(d.round() as i64)
}

/// `⟨j1 m1; j2 m2 | J M⟩`, Condon–Shortley convention. Returns 0 when
/// `M ≠ m1 + m2` or the triangle rule fails.
pub fn clebsch_gordan(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> Result<f64> {
    let (j1, m1, j2, m2, j, m) =
        (doubled(j1)?, doubled(m1)?, doubled(j2)?, doubled(m2)?, doubled(j)?, doubled(m)?);
    for (jj, mm) in [(j1, m1), (j2, m2), (j, m)] {
        if jj < 0 || (jj - mm).rem_euclid(2) != 0 {
            return Err(Error::invalid("inconsistent angular momentum labels"));
        }
    }
    Ok(cg_doubled(j1, m1, j2, m2, j, m))
}
