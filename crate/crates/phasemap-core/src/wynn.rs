//! Wynn's epsilon algorithm for sequence-to-limit extrapolation.
//!
//! Used to evaluate traces of operator families whose diagonal partial sums
//! carry geometric or oscillatory truncation transients: the epsilon table
//! removes geometric transients exactly and accelerates slowly decaying
//! oscillatory tails far beyond the raw partial sums.

use num_complex::Complex64;

/// Extrapolated limit of the sequence of partial sums `s`.
///
/// Returns the deepest even-column epsilon-table entry. Falls back to the last
/// partial sum for sequences too short to build a table. Exact convergence
/// (zero forward difference) short-circuits to the converged value.
pub fn wynn_limit(s: &[Complex64]) -> Complex64 {
    if s.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    if s.len() < 3 {
        return s[s.len() - 1];
    }
    let scale = s.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let mut prev: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); s.len() + 1];
    let mut cur: Vec<Complex64> = s.to_vec();
    let mut val = s[s.len() - 1];
    let mut col = 0usize;
    while cur.len() >= 2 {
        if col % 2 == 0 {
            // even columns hold sequence estimates: neighbours agreeing to
            // roundoff are converged, and dividing by their noise-level
            // difference would seed spurious poles deeper in the table
            if let Some(i) = (0..cur.len() - 1).position(|i| {
                (cur[i + 1] - cur[i]).norm() <= 1e-14 * cur[i].norm().max(cur[i + 1].norm())
            }) {
                return cur[i + 1];
            }
        } else if (0..cur.len() - 1).any(|i| cur[i + 1] == cur[i]) {
            // identical auxiliary entries: cannot deepen the table safely
            return val;
        }
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            next.push(prev[i + 1] + 1.0 / d);
        }
        prev = cur;
        cur = next;
        col += 1;
        if col % 2 == 0 && !cur.is_empty() {
            let cand = cur[cur.len() - 1];
            // a limit estimate vastly exceeding the sequence magnitude is a
            // pole artefact, not a resummed value
            if cand.norm() <= 1e6 * scale {
                val = cand;
            }
        }
    }
    val
}

/// Partial sums of `terms`, then [`wynn_limit`].
pub fn wynn_sum(terms: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let sums: Vec<Complex64> = terms
        .iter()
        .map(|t| {
            acc += t;
            acc
        })
        .collect();
    wynn_limit(&sums)
}
