//! Oracles shared by the integration suites.

use fglab::arith::{is_p_integral, vp};
use fglab::{Prime, Rational};
use num_traits::Zero;

/// Membership of `target` in the Z_(p)-span of `rows`, by column-wise
/// reduction with least-valuation pivots.
pub fn in_span(rows: &[Vec<Rational>], target: &[Rational], p: Prime) -> bool {
    let mut pool: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots: Vec<(usize, Vec<Rational>)> = Vec::new();
    for c in 0..target.len() {
        let best =
            pool.iter().enumerate().filter(|(_, r)| !r[c].is_zero()).min_by_key(|(_, r)| vp(&r[c], p).finite().unwrap()).map(|(i, _)| i);
        let Some(i) = best else { continue };
        let pivot = pool.swap_remove(i);
        for r in pool.iter_mut() {
            if !r[c].is_zero() {
                let f = &r[c] / &pivot[c];
                for (x, y) in r.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push((c, pivot));
    }
    let mut g = target.to_vec();
    for (c, pivot) in &pivots {
        if g[*c].is_zero() {
            continue;
        }
        let f = &g[*c] / &pivot[*c];
        if !is_p_integral(&f, p) {
            return false;
        }
        for (x, y) in g.iter_mut().zip(pivot) {
            *x -= &f * y;
        }
    }
    g.iter().all(Rational::is_zero)
}
